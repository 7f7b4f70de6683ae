//! Smooth compactly supported test functions with analytic derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One-dimensional `C^∞` test function, equal to 1 at its center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction<S> {
    /// `exp(1 - 1/(1 - s²))` with `s = (x - center)/width`.
    Bump { center: S, width: S },
    /// Equal to 1 for `|x - center| ≤ plateau_halfwidth`, decaying to 0 at
    /// `|x - center| = width` through a `C^∞` smoothstep.
    Sloping { center: S, width: S, plateau_halfwidth: S },
}

/// `exp(-1/t)` for `t > 0`, else 0.
fn flat<S: Scalar>(t: S) -> S {
    if t > S::zero() {
        (-S::one() / t).exp()
    } else {
        S::zero()
    }
}

fn flat_prime<S: Scalar>(t: S) -> S {
    if t > S::zero() {
        flat(t) / (t * t)
    } else {
        S::zero()
    }
}

/// `C^∞` step from 1 at `τ ≤ 0` to 0 at `τ ≥ 1`, with derivative.
fn smooth_drop<S: Scalar>(tau: S) -> (S, S) {
    if tau <= S::zero() {
        return (S::one(), S::zero());
    }
    if tau >= S::one() {
        return (S::zero(), S::zero());
    }
    let (a, b) = (flat(tau), flat(S::one() - tau));
    let (da, db) = (flat_prime(tau), -flat_prime(S::one() - tau));
    let s = a + b;
    (b / s, (db * s - b * (da + db)) / (s * s))
}

impl<S: Scalar> TestFunction<S> {
    pub fn bump(center: S, width: S) -> Self {
        TestFunction::Bump { center, width }
    }

    pub fn sloping(center: S, width: S, plateau_halfwidth: S) -> Self {
        TestFunction::Sloping {
            center,
            width,
            plateau_halfwidth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (c, w) = (self.center(), self.width());
        if !c.is_finite() || !(w > S::zero()) || !w.is_finite() {
            return Err(Error::TestFunction(format!(
                "need finite center and positive width (got {c}, {w})"
            )));
        }
        if let TestFunction::Sloping {
            plateau_halfwidth: p, ..
        } = *self
        {
            if !(p >= S::zero() && p < w) {
                return Err(Error::TestFunction(format!(
                    "plateau half-width {p} must lie in [0, {w})"
                )));
            }
        }
        Ok(())
    }

    pub fn center(&self) -> S {
        match *self {
            TestFunction::Bump { center, .. } | TestFunction::Sloping { center, .. } => center,
        }
    }

    pub fn width(&self) -> S {
        match *self {
            TestFunction::Bump { width, .. } | TestFunction::Sloping { width, .. } => width,
        }
    }

    /// Closed support `[center - width, center + width]`.
    pub fn support(&self) -> (S, S) {
        (self.center() - self.width(), self.center() + self.width())
    }

    pub fn value(&self, x: S) -> S {
        self.eval(x).0
    }

    pub fn derivative(&self, x: S) -> S {
        self.eval(x).1
    }

    /// Value and derivative.
    pub fn eval(&self, x: S) -> (S, S) {
        match *self {
            TestFunction::Bump { center, width } => {
                let s = (x - center) / width;
                let q = S::one() - s * s;
                if q <= S::zero() {
                    return (S::zero(), S::zero());
                }
                let f = (S::one() - S::one() / q).exp();
                (f, f * (-S::lit(2.0) * s / (q * q)) / width)
            }
            TestFunction::Sloping {
                center,
                width,
                plateau_halfwidth,
            } => {
                let d = x - center;
                let ramp = width - plateau_halfwidth;
                let (f, df) = smooth_drop((d.abs() - plateau_halfwidth) / ramp);
                (f, df * d.signum() / ramp)
            }
        }
    }
}

/// One separable term `amplitude ψ_x(x) ψ_t(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct SeparableTerm<S> {
    pub amplitude: S,
    pub x: TestFunction<S>,
    pub t: TestFunction<S>,
}

/// Space-time test function: a finite sum of separable terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct SpaceTimeTestFunction<S> {
    pub terms: Vec<SeparableTerm<S>>,
}

/// `(φ, φ_x, φ_t)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<S> {
    pub value: S,
    pub dx: S,
    pub dt: S,
}

impl<S: Scalar> SpaceTimeTestFunction<S> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn separable(x: TestFunction<S>, t: TestFunction<S>) -> Self {
        Self {
            terms: vec![SeparableTerm {
                amplitude: S::one(),
                x,
                t,
            }],
        }
    }

    pub fn scaled(mut self, factor: S) -> Self {
        for term in &mut self.terms {
            term.amplitude = term.amplitude * factor;
        }
        self
    }

    pub fn plus(mut self, other: &Self) -> Self {
        self.terms.extend(other.terms.iter().copied());
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == S::zero())
    }

    /// Rejects malformed terms and supports reaching `t ≤ 0`.
    pub fn validate(&self) -> Result<()> {
        for term in &self.terms {
            term.x.validate()?;
            term.t.validate()?;
            let (t0, _) = term.t.support();
            if !(t0 > S::zero()) {
                return Err(Error::TestFunction(format!(
                    "time support starts at t = {t0}; test functions must vanish near t = 0"
                )));
            }
        }
        Ok(())
    }

    /// Bounding box `((x0, x1), (t0, t1))` of the support, `None` if empty.
    pub fn bounding_box(&self) -> Option<((S, S), (S, S))> {
        let mut it = self.terms.iter().filter(|t| t.amplitude != S::zero());
        let first = it.next()?;
        let (mut x0, mut x1) = first.x.support();
        let (mut t0, mut t1) = first.t.support();
        for term in it {
            let (a, b) = term.x.support();
            let (c, d) = term.t.support();
            x0 = x0.min(a);
            x1 = x1.max(b);
            t0 = t0.min(c);
            t1 = t1.max(d);
        }
        Some(((x0, x1), (t0, t1)))
    }

    pub fn jet(&self, x: S, t: S) -> Jet<S> {
        let mut out = Jet {
            value: S::zero(),
            dx: S::zero(),
            dt: S::zero(),
        };
        for term in &self.terms {
            let (fx, dfx) = term.x.eval(x);
            if fx == S::zero() && dfx == S::zero() {
                continue;
            }
            let (ft, dft) = term.t.eval(t);
            out.value = out.value + term.amplitude * fx * ft;
            out.dx = out.dx + term.amplitude * dfx * ft;
            out.dt = out.dt + term.amplitude * fx * dft;
        }
        out
    }

    pub fn value(&self, x: S, t: S) -> S {
        self.jet(x, t).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: &TestFunction<f64>, x: f64) -> f64 {
        let h = 1e-6;
        (f.value(x + h) - f.value(x - h)) / (2.0 * h)
    }

    #[test]
    fn bump_shape_and_derivative() {
        let b = TestFunction::bump(0.5, 2.0);
        assert_eq!(b.value(0.5), 1.0);
        assert_eq!(b.value(2.5), 0.0);
        assert_eq!(b.value(-1.6), 0.0);
        for x in [-1.2, -0.3, 0.5, 1.1, 2.2] {
            assert!((b.derivative(x) - fd(&b, x)).abs() < 1e-7, "{x}");
        }
    }

    #[test]
    fn sloping_plateau_and_derivative() {
        let s = TestFunction::sloping(1.0_f64, 1.0, 0.4);
        for x in [0.6, 0.8, 1.0, 1.4] {
            assert_eq!(s.value(x), 1.0);
            assert_eq!(s.derivative(x), 0.0);
        }
        assert_eq!(s.value(2.0), 0.0);
        assert!((s.value(1.7) - 0.5).abs() < 1e-15);
        for x in [0.1, 0.3, 1.5, 1.7, 1.9] {
            assert!((s.derivative(x) - fd(&s, x)).abs() < 1e-7, "{x}");
        }
        assert!(s.value(1.55) > s.value(1.8));
    }

    #[test]
    fn invalid_shapes() {
        assert!(TestFunction::bump(0.0, 0.0).validate().is_err());
        assert!(TestFunction::sloping(0.0, 1.0, 1.0).validate().is_err());
        assert!(TestFunction::sloping(0.0, 1.0, -0.1).validate().is_err());
    }

    #[test]
    fn space_time_support_must_avoid_initial_time() {
        let phi = SpaceTimeTestFunction::separable(TestFunction::bump(0.0, 1.0), TestFunction::bump(0.5, 0.5));
        assert!(matches!(phi.validate(), Err(Error::TestFunction(_))));
        let phi = SpaceTimeTestFunction::separable(TestFunction::bump(0.0_f64, 1.0), TestFunction::bump(1.0, 0.5));
        assert!(phi.validate().is_ok());
        let j = phi.jet(0.2, 1.1);
        let h = 1e-6;
        assert!((j.dt - (phi.value(0.2, 1.1 + h) - phi.value(0.2, 1.1 - h)) / (2.0 * h)).abs() < 1e-7);
        assert!((j.dx - (phi.value(0.2 + h, 1.1) - phi.value(0.2 - h, 1.1)) / (2.0 * h)).abs() < 1e-7);
    }

    #[test]
    fn sums_and_bounding_box() {
        let a = SpaceTimeTestFunction::separable(TestFunction::bump(0.0, 1.0), TestFunction::bump(1.0, 0.5));
        let b = SpaceTimeTestFunction::separable(TestFunction::bump(2.0, 0.5), TestFunction::bump(2.0, 0.5));
        let s = a.clone().plus(&b);
        assert_eq!(s.bounding_box(), Some(((-1.0, 2.5), (0.5, 2.5))));
        assert_eq!(s.value(0.1, 1.2), a.value(0.1, 1.2) + b.value(0.1, 1.2));
        assert!(SpaceTimeTestFunction::<f64>::zero().bounding_box().is_none());
    }
}
