use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Polynomial<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, &c| acc * x + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, x: S) -> (S, S) {
        let mut p = S::zero();
        let mut dp = S::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    /// Largest coefficient magnitude; the natural scale for residuals.
    pub fn scale(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |m, c| m.max(c.abs()))
    }

    /// `sum |c_j| |x|^j`, a bound on the rounding noise of `eval(x)`.
    pub fn magnitude_at(&self, x: S) -> S {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(S::zero(), |acc, &c| acc * ax + c.abs())
    }
}

fn sign<S: Scalar>(x: S) -> i8 {
    if x > S::zero() {
        1
    } else if x < S::zero() {
        -1
    } else {
        0
    }
}

/// Result of sampling a polynomial on a uniform set of points.
#[derive(Debug, Clone)]
pub struct SignScan<S> {
    /// Number of strict sign changes, zeros skipped.
    pub changes: usize,
    /// Sub-interval of the first sign change.
    pub first: Option<(S, S)>,
}

/// Samples `p` at `samples` equispaced points of `[lo, hi]` (endpoints
/// included) and counts sign changes.
pub fn scan_sign_changes<S: Scalar>(p: &Polynomial<S>, lo: S, hi: S, samples: usize) -> SignScan<S> {
    let n = samples.max(2);
    let step = (hi - lo) / S::from_usize_lossy(n - 1);
    let mut changes = 0;
    let mut first = None;
    let mut last: Option<(S, i8)> = None;
    for i in 0..n {
        let x = if i + 1 == n {
            hi
        } else {
            lo + step * S::from_usize_lossy(i)
        };
        let s = sign(p.eval(x));
        if s == 0 {
            continue;
        }
        if let Some((xp, sp)) = last {
            if sp != s {
                changes += 1;
                if first.is_none() {
                    first = Some((xp, x));
                }
            }
        }
        last = Some((x, s));
    }
    SignScan { changes, first }
}

/// Bisection followed by safeguarded Newton on a bracket `[a, b]` where `p`
/// changes sign. Newton iterates that leave the current bracket are replaced
/// by bisection steps.
pub fn bracketed_root<S: Scalar>(p: &Polynomial<S>, a: S, b: S) -> S {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut fa = p.eval(a);
    let fb = p.eval(b);
    if fa == S::zero() {
        return a;
    }
    if fb == S::zero() {
        return b;
    }
    debug_assert!(sign(fa) != sign(fb));

    let two = S::lit(2.0);
    let width0 = b - a;
    // Coarse bisection: shrink the bracket by ~2^-20 before handing over to Newton.
    for _ in 0..20 {
        let m = (a + b) / two;
        let fm = p.eval(m);
        if fm == S::zero() {
            return m;
        }
        if sign(fm) == sign(fa) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if b - a <= width0 * S::lit(1e-6) {
            break;
        }
    }

    let mut x = (a + b) / two;
    for _ in 0..200 {
        let (fx, dfx) = p.eval_with_derivative(x);
        if fx == S::zero() {
            return x;
        }
        if sign(fx) == sign(fa) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let newton = if dfx != S::zero() { x - fx / dfx } else { S::nan() };
        let next = if newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            (a + b) / two
        };
        let tol = S::lit(4.0) * S::epsilon() * x.abs().max(S::min_positive_value());
        if (next - x).abs() <= tol || b - a <= tol {
            return next;
        }
        x = next;
    }
    x
}

/// Unique root of `p` on the open interval `(lo, hi)`.
///
/// The interval is shrunk by `1e-12 (hi - lo)` on both sides and scanned on
/// `samples` points; anything other than exactly one sign change is an error.
pub fn unique_root_in<S: Scalar>(p: &Polynomial<S>, lo: S, hi: S, samples: usize) -> Result<S> {
    let delta = (hi - lo) * S::lit(1e-12);
    let (a, b) = (lo + delta, hi - delta);
    let scan = scan_sign_changes(p, a, b, samples);
    match (scan.changes, scan.first) {
        (1, Some((x0, x1))) => Ok(bracketed_root(p, x0, x1)),
        (0, _) => Err(Error::NoRootInBracket {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        }),
        (count, _) => Err(Error::MultipleRootsInBracket {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
            count,
        }),
    }
}
