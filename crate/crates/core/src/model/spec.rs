use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{make_builtin, QuantileModel};

/// A parsed `name(key=value,...)` model description.
///
/// ```
/// use qfcre::ModelSpec;
/// let spec: ModelSpec = "power_pareto(C=1.5, l1=2, l2=0.25)".parse().unwrap();
/// assert_eq!(spec.name, "power_pareto");
/// let model = spec.build::<f64>().unwrap();
/// assert!(model.quantile(0.5) > 0.0);
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub params: Vec<(String, f64)>,
}

impl ModelSpec {
    pub fn build<T: Real>(&self) -> Result<QuantileModel<T>> {
        let params: Vec<(&str, T)> = self.params.iter().map(|(k, v)| (k.as_str(), T::lit(*v))).collect();
        make_builtin(&self.name, &params)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({})", self.name, body.join(","))
    }
}

fn spec_error(token: &str, position: usize, message: &str) -> Error {
    Error::SpecParse {
        token: token.to_string(),
        position,
        message: message.to_string(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Positions in errors are 1-based character offsets into the input.
impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let open = input
            .find('(')
            .ok_or_else(|| spec_error(input.trim(), 1, "expected `name(key=value,...)`"))?;
        let name = input[..open].trim();
        if !is_ident(name) {
            return Err(spec_error(name, 1, "model name must be an identifier"));
        }
        let rest = &input[open + 1..];
        let close = rest
            .rfind(')')
            .ok_or_else(|| spec_error(rest.trim(), open + 2, "missing closing `)`"))?;
        let trailing = &rest[close + 1..];
        if !trailing.trim().is_empty() {
            return Err(spec_error(
                trailing.trim(),
                open + close + 3,
                "unexpected text after `)`",
            ));
        }

        let body = &rest[..close];
        let mut params = Vec::new();
        let mut offset = open + 2;
        if !body.trim().is_empty() {
            for item in body.split(',') {
                let pos = offset + (item.len() - item.trim_start().len());
                offset += item.len() + 1;
                let item = item.trim();
                let (key, value) = item
                    .split_once('=')
                    .ok_or_else(|| spec_error(item, pos, "expected `key=value`"))?;
                let (key, value) = (key.trim(), value.trim());
                if !is_ident(key) {
                    return Err(spec_error(key, pos, "parameter name must be an identifier"));
                }
                let parsed: f64 = value.parse().map_err(|_| spec_error(value, pos, "not a number"))?;
                if params.iter().any(|(k, _): &(String, f64)| k == key) {
                    return Err(spec_error(key, pos, "parameter given twice"));
                }
                params.push((key.to_string(), parsed));
            }
        }
        Ok(Self {
            name: name.to_string(),
            params,
        })
    }
}
