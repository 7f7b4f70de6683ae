//! Output formatting shared by the CSV writers.

use crate::scalar::Scalar;

/// 17 significant digits: enough for an exact `f64` round trip.
pub fn fmt_float<S: Scalar>(x: S) -> String {
    format!("{:.16e}", x.to_f64_lossy())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [1.0 / 3.0, -2.5e-300, 4.0, 0.1 + 0.2] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(0.5), "5.0000000000000000e-1");
    }
}
