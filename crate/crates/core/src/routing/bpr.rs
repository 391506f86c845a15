use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bureau of Public Roads latency parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BprParams {
    /// Free-flow travel time.
    pub a: f64,
    pub b: f64,
    /// Capacity.
    pub c: f64,
    /// Power, at least 1.
    pub r: f64,
}

impl BprParams {
    pub fn new(a: f64, b: f64, c: f64, r: f64) -> Result<Self> {
        let p = BprParams { a, b, c, r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.a) && positive(self.b) && positive(self.c)) {
            return Err(Error::domain(format!("BPR parameters must be positive: {self:?}")));
        }
        if !(self.r.is_finite() && self.r >= 1.0) {
            return Err(Error::domain(format!("BPR power must be at least 1, got {}", self.r)));
        }
        Ok(())
    }

    pub fn cost(&self, load: f64) -> f64 {
        self.a * (1.0 + self.b * (load / self.c).powf(self.r))
    }

    /// `int_0^load cost(t) dt`.
    pub fn integral(&self, load: f64) -> f64 {
        self.a * load
            + self.a * self.b * load.powf(self.r + 1.0) / ((self.r + 1.0) * self.c.powf(self.r))
    }

    /// `d cost / d load`.
    pub fn derivative(&self, load: f64) -> f64 {
        self.a * self.b * self.r * load.powf(self.r - 1.0) / self.c.powf(self.r)
    }
}

pub fn bpr_cost(p: &BprParams, load: f64) -> f64 {
    p.cost(load)
}

pub fn bpr_integral(p: &BprParams, load: f64) -> f64 {
    p.integral(load)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson quadrature, used as an independent oracle.
    pub(crate) fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    #[test]
    fn cost_examples() {
        let p = BprParams::new(2.0, 3.0, 10.0, 2.0).unwrap();
        assert_eq!(bpr_cost(&p, 0.0), 2.0);
        assert_eq!(bpr_cost(&p, 10.0), 2.0 * 4.0);
        assert_eq!(bpr_cost(&p, 5.0), 3.5);
    }

    #[test]
    fn integral_examples() {
        let p = BprParams::new(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(bpr_integral(&p, 0.0), 0.0);
        assert_eq!(bpr_integral(&p, 1.0), 3.0);
        let q = simpson(&|t| p.cost(t), 0.0, 1.0, 1e-13);
        assert!((q - 3.0).abs() < 1e-12);

        let p = BprParams::new(1.0, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(bpr_integral(&p, 2.0), 2.5);
        let q = simpson(&|t| p.cost(t), 0.0, 2.0, 1e-13);
        assert!((q - 2.5).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let p = BprParams::new(2.4, 7.0, 65.0, 1.3).unwrap();
        for load in [1.0, 10.0, 63.0, 140.0] {
            let h = 1e-5;
            let fd = (p.cost(load + h) - p.cost(load - h)) / (2.0 * h);
            assert!((fd - p.derivative(load)).abs() <= 1e-7 * p.derivative(load).abs().max(1.0));
        }
    }

    #[test]
    fn invalid_params() {
        assert!(BprParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(BprParams::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(BprParams::new(1.0, 1.0, 1.0, 0.5).is_err());
    }
}
