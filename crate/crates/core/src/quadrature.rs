//! Gauss–Legendre rules.

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct GaussLegendre<S> {
    pub nodes: Vec<S>,
    pub weights: Vec<S>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<S: Scalar>(n: usize, x: S) -> (S, S) {
    let (mut p0, mut p1) = (S::one(), x);
    for j in 2..=n {
        let j_s = S::from_usize_lossy(j);
        let p2 = ((S::lit(2.0) * j_s - S::one()) * x * p1 - (j_s - S::one()) * p0) / j_s;
        p0 = p1;
        p1 = p2;
    }
    let n_s = S::from_usize_lossy(n);
    let dp = n_s * (x * p1 - p0) / (x * x - S::one());
    (p1, dp)
}

impl<S: Scalar> GaussLegendre<S> {
    /// `n`-point rule on `[-1, 1]`, nodes by Newton's method on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        if n == 1 {
            return Self {
                nodes: vec![S::zero()],
                weights: vec![S::lit(2.0)],
            };
        }
        let mut nodes = vec![S::zero(); n];
        let mut weights = vec![S::zero(); n];
        let pi = S::lit(std::f64::consts::PI);
        for i in 0..n.div_ceil(2) {
            let mut x = (pi * (S::from_usize_lossy(i) + S::lit(0.75)) / (S::from_usize_lossy(n) + S::lit(0.5))).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x = x - dx;
                if dx.abs() <= S::lit(4.0) * S::epsilon() {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = S::lit(2.0) / ((S::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = S::zero();
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Mapped nodes and weights for `[a, b]`.
    pub fn points(&self, a: S, b: S) -> impl Iterator<Item = (S, S)> + '_ {
        let half = (b - a) / S::lit(2.0);
        let mid = (a + b) / S::lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(S) -> S>(&self, a: S, b: S, mut f: F) -> S {
        self.points(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule with `panels` equal panels.
    pub fn composite<F: FnMut(S) -> S>(&self, a: S, b: S, panels: usize, mut f: F) -> S {
        composite_points(self, a, b, panels).map(|(x, w)| w * f(x)).sum()
    }
}

/// All nodes and weights of the composite rule on `[a, b]`.
pub fn composite_points<S: Scalar>(
    rule: &GaussLegendre<S>,
    a: S,
    b: S,
    panels: usize,
) -> impl Iterator<Item = (S, S)> + '_ {
    let panels = panels.max(1);
    let h = (b - a) / S::from_usize_lossy(panels);
    (0..panels).flat_map(move |j| {
        let lo = a + h * S::from_usize_lossy(j);
        let hi = if j + 1 == panels { b } else { lo + h };
        rule.points(lo, hi)
    })
}
