use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Placement of the ξ-nodes on `[-R, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", tag = "kind", rename_all = "snake_case")]
pub enum GridSpec<S> {
    Uniform {
        nodes: usize,
    },
    /// `ξ = c + a sinh(s)` with `s` uniform on either side of a node pinned
    /// at `c`. The default center is the exact shock speed and the default
    /// scale `a` is `ε/8`, which puts roughly 60% of the nodes within `10ε`
    /// of the center.
    Graded {
        nodes: usize,
        #[serde(default)]
        center: Option<S>,
        #[serde(default)]
        scale: Option<S>,
    },
}

impl<S: Scalar> Default for GridSpec<S> {
    fn default() -> Self {
        GridSpec::Graded {
            nodes: 4001,
            center: None,
            scale: None,
        }
    }
}

impl<S: Scalar> GridSpec<S> {
    pub fn nodes(&self) -> usize {
        match *self {
            GridSpec::Uniform { nodes } | GridSpec::Graded { nodes, .. } => nodes,
        }
    }

    pub fn with_center(self, c: S) -> Self {
        match self {
            GridSpec::Graded { nodes, scale, .. } => GridSpec::Graded {
                nodes,
                center: Some(c),
                scale,
            },
            other => other,
        }
    }

    /// Effective cluster scale for viscosity `eps`, if graded.
    pub fn scale_for(&self, eps: S) -> Option<S> {
        match *self {
            GridSpec::Uniform { .. } => None,
            GridSpec::Graded { scale, .. } => Some(scale.unwrap_or(eps / S::lit(8.0))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes() < 3 {
            return Err(Error::InvalidConfig(format!(
                "grid needs at least 3 nodes (got {})",
                self.nodes()
            )));
        }
        if let GridSpec::Graded { scale: Some(a), .. } = *self {
            if !(a > S::zero()) || !a.is_finite() {
                return Err(Error::InvalidConfig(format!("grid scale must be positive (got {a})")));
            }
        }
        Ok(())
    }

    /// Builds the nodes on `[-r, r]`; `default_center` is used when the grid spec
    /// does not pin one.
    pub fn build(&self, r: S, default_center: S, eps: S) -> Result<Vec<S>> {
        self.validate()?;
        let n = self.nodes();
        let last = S::from_usize_lossy(n - 1);
        let mut xi: Vec<S> = match *self {
            GridSpec::Uniform { .. } => (0..n)
                .map(|i| -r + S::lit(2.0) * r * S::from_usize_lossy(i) / last)
                .collect(),
            GridSpec::Graded { center, .. } => {
                let a = self.scale_for(eps).unwrap();
                let c = center.unwrap_or(default_center);
                if !(c > -r && c < r) {
                    return Err(Error::InvalidConfig(format!("grid center {c} outside (-{r}, {r})")));
                }
                let s0 = ((-r - c) / a).asinh();
                let s1 = ((r - c) / a).asinh();
                // Pin a node on the center; each side is uniform in s.
                let i0 = ((-s0 / (s1 - s0)) * last)
                    .round()
                    .to_usize()
                    .unwrap_or(0)
                    .clamp(1, n - 2);
                let (left, right) = (S::from_usize_lossy(i0), S::from_usize_lossy(n - 1 - i0));
                (0..n)
                    .map(|i| {
                        let s = if i <= i0 {
                            s0 * (S::from_usize_lossy(i0 - i) / left)
                        } else {
                            s1 * (S::from_usize_lossy(i - i0) / right)
                        };
                        c + a * s.sinh()
                    })
                    .collect()
            }
        };
        xi[0] = -r;
        xi[n - 1] = r;
        if let Some(i) = (1..n).find(|&i| !(xi[i] > xi[i - 1])) {
            return Err(Error::InvalidConfig(format!(
                "grid spacing underflows near node {i}; reduce the node count or widen the scale"
            )));
        }
        Ok(xi)
    }
}

/// Piecewise-linear interpolation of `(xs, ys)` at `x`, clamped to the end
/// values outside the table.
pub fn interpolate<S: Scalar>(xs: &[S], ys: &[S], x: S) -> S {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let j = xs.partition_point(|&p| p <= x).min(n - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let t = (x - x0) / (x1 - x0);
    ys[j - 1] + t * (ys[j] - ys[j - 1])
}
