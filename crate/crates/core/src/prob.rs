//! Probability levels carried together with their complement.
//!
//! Most quantile densities blow up as `u -> 1`, and `1 - u` computed in
//! floating point loses all precision there. A [`Prob`] stores both `u` and
//! `v = 1 - u`, each accurate to working precision, so model formulas can use
//! whichever side is well conditioned.

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prob<T> {
    u: T,
    v: T,
}

impl<T: Real> Prob<T> {
    /// Level from a raw `u`, clamped to `[eps, 1 - eps]` with `eps = 1e-12`
    /// (or a few ulps for narrow types).
    pub fn new(u: T) -> Self {
        let eps = T::endpoint_guard();
        let u = u.max(eps).min(T::one() - eps);
        Self { u, v: T::one() - u }
    }

    /// Level from its complement `v = 1 - u`, clamped like [`Prob::new`].
    pub fn from_complement(v: T) -> Self {
        let eps = T::endpoint_guard();
        let v = v.max(eps).min(T::one() - eps);
        Self { u: T::one() - v, v }
    }

    /// Level `u = 1 - exp(-t)`, i.e. `t = -log(1 - u)`; not clamped.
    pub fn from_log_survival(t: T) -> Self {
        Self {
            u: -(-t).exp_m1(),
            v: (-t).exp(),
        }
    }

    /// Level at log-distance `s` above `self`: `1 - p = (1 - u) exp(-s)`.
    pub fn advance(self, s: T) -> Self {
        Self {
            u: self.u + self.v * -(-s).exp_m1(),
            v: self.v * (-s).exp(),
        }
    }

    /// Build from both sides directly. Callers guarantee `u + v = 1`.
    pub fn from_parts(u: T, v: T) -> Self {
        Self { u, v }
    }

    #[inline]
    pub fn u(self) -> T {
        self.u
    }

    /// `1 - u`.
    #[inline]
    pub fn v(self) -> T {
        self.v
    }

    /// `log(1 - u)`, accurate at both ends.
    pub fn ln_v(self) -> T {
        if self.u < T::lit(0.5) {
            (-self.u).ln_1p()
        } else {
            self.v.ln()
        }
    }

    /// `log(u)`, accurate at both ends.
    pub fn ln_u(self) -> T {
        if self.v < T::lit(0.5) {
            (-self.v).ln_1p()
        } else {
            self.u.ln()
        }
    }

    /// `-log(1 - u)`.
    #[inline]
    pub fn log_survival(self) -> T {
        -self.ln_v()
    }

    /// The mirrored level `1 - u`.
    #[inline]
    pub fn flip(self) -> Self {
        Self { u: self.v, v: self.u }
    }

    /// `1 - (1 - u)^(1/theta)`, the level map of the proportional hazards model.
    pub fn phm(self, theta: T) -> Self {
        let lv = self.ln_v() / theta;
        Self {
            u: -lv.exp_m1(),
            v: lv.exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_survives_far_tail() {
        let p = Prob::<f64>::from_log_survival(200.0);
        assert_eq!(p.u(), 1.0);
        assert!(p.v() > 0.0);
        assert!((p.log_survival() - 200.0).abs() < 1e-12);
    }

    #[test]
    fn advance_from_zero_matches_direct() {
        let base = Prob::from_parts(0.0_f64, 1.0);
        let s = 3.7;
        assert_eq!(base.advance(s), Prob::from_log_survival(s));
    }

    #[test]
    fn clamps_endpoints() {
        let p = Prob::new(1.0_f64);
        assert!(p.v() > 0.0 && p.u() < 1.0);
        let p = Prob::new(0.0_f64);
        assert!(p.u() > 0.0);
    }

    #[test]
    fn phm_identity() {
        let p = Prob::new(0.3_f64);
        let q = p.phm(1.0);
        assert!((q.u() - 0.3).abs() < 1e-15);
        assert!((q.v() - 0.7).abs() < 1e-15);
    }
}
