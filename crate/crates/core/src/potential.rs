//! Strategy spaces, the scaled negative-entropy regularizer and step-size
//! schedules.
//!
//! Every player's strategy space is a scaled simplex
//! `{x >= 0 : sum(x) = S}`. The regularizer on it is
//! `psi(x) = sum_p (x_p / S) log(x_p / S)`, which is `1/S^2`-strongly convex
//! with respect to the l1 norm. Dual vectors are measured in l-infinity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mirror-map outputs below this value are flushed to zero.
pub const FLUSH_THRESHOLD: f64 = 1e-300;

/// Relative tolerance on the coordinate sum of a simplex point.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;

const CONVEXITY_SAMPLES: usize = 512;
const CONVEXITY_SEED: u64 = 0x5eed_0001;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledSimplex {
    dimension: usize,
    scale: f64,
}

impl ScaledSimplex {
    pub fn new(dimension: usize, scale: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::domain("simplex dimension must be positive"));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(format!("simplex scale must be positive, got {scale}")));
        }
        Ok(ScaledSimplex { dimension, scale })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Membership test: nonnegative entries summing to the scale within
    /// `SIMPLEX_SUM_TOL * scale`.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.check(x).is_ok()
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::domain(format!(
                "point has {} entries, simplex has dimension {}",
                x.len(),
                self.dimension
            )));
        }
        if let Some(v) = x.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!("simplex entry {v} is negative or non-finite")));
        }
        let sum: f64 = x.iter().sum();
        if (sum - self.scale).abs() > SIMPLEX_SUM_TOL * self.scale {
            return Err(Error::domain(format!(
                "entries sum to {sum}, expected {}",
                self.scale
            )));
        }
        Ok(())
    }

    /// The barycenter `(S/P, ..., S/P)`.
    pub fn uniform_point(&self) -> Vec<f64> {
        vec![self.scale / self.dimension as f64; self.dimension]
    }

    /// Uniformly distributed point (flat Dirichlet) drawn from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut w: Vec<f64> = (0..self.dimension)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        let total: f64 = w.iter().sum();
        for v in &mut w {
            *v *= self.scale / total;
        }
        w
    }

    /// l1 diameter of the simplex.
    pub fn diameter(&self) -> f64 {
        if self.dimension == 1 {
            0.0
        } else {
            2.0 * self.scale
        }
    }
}

/// `sum_p (x_p/S) log(x_p/S)` with `0 log 0 = 0`.
pub fn entropy(x: &[f64], space: &ScaledSimplex) -> Result<f64> {
    space.check(x)?;
    Ok(entropy_unchecked(x, space.scale))
}

fn entropy_unchecked(x: &[f64], scale: f64) -> f64 {
    x.iter()
        .map(|&v| {
            let u = v / scale;
            if u > 0.0 {
                u * u.ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// Mirror map of the scaled entropy: the maximizer of `<z, x> - psi(x)` over
/// the scaled simplex, `x_p = S exp(S z_p) / sum_q exp(S z_q)`.
///
/// Evaluated with max-subtraction, so it is invariant under adding a
/// constant to every entry of `z`.
pub fn entropy_mirror_map(z: &[f64], space: &ScaledSimplex) -> Result<Vec<f64>> {
    if z.len() != space.dimension {
        return Err(Error::domain(format!(
            "dual vector has {} entries, simplex has dimension {}",
            z.len(),
            space.dimension
        )));
    }
    if let Some(v) = z.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("dual entry {v} is not finite")));
    }
    let s = space.scale;
    let peak = z.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(s * v));
    let mut out: Vec<f64> = z.iter().map(|&v| (s * v - peak).exp()).collect();
    let total: f64 = out.iter().sum();
    let mut flushed = false;
    for v in &mut out {
        *v = s * *v / total;
        if *v < FLUSH_THRESHOLD {
            *v = 0.0;
            flushed = true;
        }
    }
    if flushed {
        let kept: f64 = out.iter().sum();
        for v in &mut out {
            *v *= s / kept;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRegularizer {
    space: ScaledSimplex,
    strong_convexity_mu: f64,
}

impl EntropyRegularizer {
    /// Builds the regularizer with modulus `1/S^2` and verifies the
    /// Bregman lower bound `D(x, x') >= mu/2 |x - x'|_1^2` on sampled pairs.
    pub fn new(space: ScaledSimplex) -> Result<Self> {
        let reg = EntropyRegularizer {
            space,
            strong_convexity_mu: 1.0 / (space.scale * space.scale),
        };
        reg.verify_strong_convexity(CONVEXITY_SAMPLES, CONVEXITY_SEED)?;
        Ok(reg)
    }

    pub fn space(&self) -> &ScaledSimplex {
        &self.space
    }

    pub fn strong_convexity_mu(&self) -> f64 {
        self.strong_convexity_mu
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        entropy(x, &self.space)
    }

    /// `(1/S)(log(x_p/S) + 1)`; undefined on the boundary.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.space.check(x)?;
        let s = self.space.scale;
        x.iter()
            .map(|&v| {
                if v > 0.0 {
                    Ok(((v / s).ln() + 1.0) / s)
                } else {
                    Err(Error::domain("entropy gradient is undefined on the simplex boundary"))
                }
            })
            .collect()
    }

    pub fn mirror_map(&self, z: &[f64]) -> Result<Vec<f64>> {
        entropy_mirror_map(z, &self.space)
    }

    /// `psi(x) - psi(x_ref) - <grad psi(x_ref), x - x_ref>`.
    ///
    /// On the simplex the linear terms cancel and this is the scaled KL
    /// divergence `sum_p (x_p/S) log(x_p / x_ref_p)`, which is what gets
    /// evaluated.
    pub fn bregman(&self, x: &[f64], x_ref: &[f64]) -> Result<f64> {
        self.space.check(x)?;
        self.space.check(x_ref)?;
        if x_ref.iter().any(|&v| v <= 0.0) {
            return Err(Error::domain(
                "Bregman reference point must be strictly positive",
            ));
        }
        let s = self.space.scale;
        let d: f64 = x
            .iter()
            .zip(x_ref)
            .map(|(&a, &b)| if a > 0.0 { (a / s) * (a / b).ln() } else { 0.0 })
            .sum();
        Ok(d.max(0.0))
    }

    fn verify_strong_convexity(&self, samples: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half_mu = 0.5 * self.strong_convexity_mu;
        for _ in 0..samples {
            let x = self.space.sample(&mut rng);
            let x_ref = self.space.sample(&mut rng);
            if x_ref.iter().any(|&v| v <= 0.0) {
                continue;
            }
            let d = self.bregman(&x, &x_ref)?;
            let l1: f64 = x.iter().zip(&x_ref).map(|(a, b)| (a - b).abs()).sum();
            if d + 1e-12 < half_mu * l1 * l1 {
                return Err(Error::domain(format!(
                    "sampled Bregman divergence {d} below strong-convexity bound {}",
                    half_mu * l1 * l1
                )));
            }
        }
        Ok(())
    }
}

/// Step-size families `a_k` with partial sums `A_k = a_1 + ... + a_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StepSchedule {
    /// `a_k = a0 k^beta`, `beta` in `[0, 1]`.
    Power { a0: f64, beta: f64 },
    /// `a_k = a0 / k`.
    Inverse { a0: f64 },
    /// `a_k = a0 / ((k + 1) log(k + 1))`.
    InverseLog { a0: f64 },
}

impl StepSchedule {
    pub fn power(a0: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::Schedule(format!("beta must lie in [0, 1], got {beta}")));
        }
        Self::checked(StepSchedule::Power { a0, beta })
    }

    pub fn inverse(a0: f64) -> Result<Self> {
        Self::checked(StepSchedule::Inverse { a0 })
    }

    pub fn inverse_log(a0: f64) -> Result<Self> {
        Self::checked(StepSchedule::InverseLog { a0 })
    }

    fn checked(s: Self) -> Result<Self> {
        let a0 = s.a0();
        if !(a0.is_finite() && a0 > 0.0) {
            return Err(Error::Schedule(format!("a0 must be positive, got {a0}")));
        }
        Ok(s)
    }

    /// `Power(beta)` with `a0 = mu_star / ((beta + 1) L)`, the largest
    /// prefactor for which `a_k^2 / A_k <= mu_star / L` at every k.
    pub fn default_power(beta: f64, bundle: &SmoothnessBundle) -> Result<Self> {
        Self::power(bundle.mu_star / ((beta + 1.0) * bundle.lipschitz), beta)
    }

    pub fn a0(&self) -> f64 {
        match *self {
            StepSchedule::Power { a0, .. }
            | StepSchedule::Inverse { a0 }
            | StepSchedule::InverseLog { a0 } => a0,
        }
    }

    /// `a_k` for `k >= 1`.
    pub fn a(&self, k: u64) -> f64 {
        debug_assert!(k >= 1);
        let kf = k as f64;
        match *self {
            StepSchedule::Power { a0, beta } => a0 * kf.powf(beta),
            StepSchedule::Inverse { a0 } => a0 / kf,
            StepSchedule::InverseLog { a0 } => a0 / ((kf + 1.0) * (kf + 1.0).ln()),
        }
    }

    /// `A_k`, accumulated term by term (`A_0 = 0`).
    pub fn big_a(&self, k: u64) -> f64 {
        let mut total = 0.0;
        for t in 1..=k {
            total += self.a(t);
        }
        total
    }

    /// `[A_0, A_1, ..., A_n]`.
    pub fn partial_sums(&self, n: u64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n as usize + 1);
        out.push(0.0);
        let mut total = 0.0;
        for t in 1..=n {
            total += self.a(t);
            out.push(total);
        }
        out
    }

    pub fn cursor(&self) -> ScheduleCursor {
        ScheduleCursor::new(*self)
    }

    /// True iff `max_{1<=k<=horizon} a_k^2 / A_k <= mu_star / L`.
    pub fn validate(&self, bundle: &SmoothnessBundle, horizon: u64) -> bool {
        let limit = bundle.mu_star / bundle.lipschitz;
        self.cursor()
            .take(horizon as usize)
            .all(|w| w.a * w.a / w.big_a <= limit)
    }
}

/// Weights consumed by one iteration of the accelerated update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepWeights {
    pub k: u64,
    pub a: f64,
    pub a_next: f64,
    pub big_a_prev: f64,
    pub big_a: f64,
    pub big_a_next: f64,
}

/// Running-sum iterator over [`StepWeights`] for `k = 1, 2, ...`.
#[derive(Clone, Debug)]
pub struct ScheduleCursor {
    schedule: StepSchedule,
    k: u64,
    a: f64,
    big_a: f64,
}

impl ScheduleCursor {
    fn new(schedule: StepSchedule) -> Self {
        ScheduleCursor {
            schedule,
            k: 0,
            a: 0.0,
            big_a: 0.0,
        }
    }
}

impl Iterator for ScheduleCursor {
    type Item = StepWeights;

    fn next(&mut self) -> Option<StepWeights> {
        let k = self.k + 1;
        let big_a_prev = self.big_a;
        let a = if k == 1 { self.schedule.a(1) } else { self.a };
        let big_a = big_a_prev + a;
        let a_next = self.schedule.a(k + 1);
        let big_a_next = big_a + a_next;
        self.k = k;
        self.a = a_next;
        self.big_a = big_a;
        Some(StepWeights {
            k,
            a,
            a_next,
            big_a_prev,
            big_a,
            big_a_next,
        })
    }
}

/// Constants that govern admissible step sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessBundle {
    /// Lipschitz constant of the potential gradient (l1 to l-infinity).
    pub lipschitz: f64,
    /// Smallest strong-convexity modulus over the players' regularizers.
    pub mu_star: f64,
    /// Diameter of the joint strategy space in the working norm.
    pub diameter: f64,
}

impl SmoothnessBundle {
    pub fn new(lipschitz: f64, mu_star: f64, diameter: f64) -> Result<Self> {
        for (name, v) in [("lipschitz", lipschitz), ("mu_star", mu_star), ("diameter", diameter)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(SmoothnessBundle {
            lipschitz,
            mu_star,
            diameter,
        })
    }

    /// `mu_star` as the minimum over the given regularizers.
    pub fn from_regularizers(
        lipschitz: f64,
        regularizers: &[EntropyRegularizer],
        diameter: f64,
    ) -> Result<Self> {
        let mu_star = regularizers
            .iter()
            .map(|r| r.strong_convexity_mu)
            .fold(f64::INFINITY, f64::min);
        Self::new(lipschitz, mu_star, diameter)
    }
}
