//! Operation counting and closed-form complexity models.
//!
//! Counts are tallied explicitly at the call sites of the arithmetic kernels,
//! in units of complex operations. A squared modulus `|z|^2` is charged as one
//! complex multiplication and a real addition that accumulates into a complex
//! kernel is charged as one complex addition.
//!
//! The headline `flops` figure weights a complex multiplication as 6 real
//! floating-point operations and a complex addition as 2. Divisions and square
//! roots are tracked but excluded from the headline figure.

use std::fmt;
use std::iter::Sum;
use std::ops::AddAssign;

use crate::error::{Error, Result};

/// Real flops per complex multiplication.
pub const FLOPS_PER_CMUL: f64 = 6.0;
/// Real flops per complex addition.
pub const FLOPS_PER_CADD: f64 = 2.0;

/// Exact tallies of complex multiplications, additions, divisions and square roots.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlopCounter {
    pub cmul: u64,
    pub cadd: u64,
    pub cdiv: u64,
    pub csqrt: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn mul(&mut self, n: usize) {
        self.cmul += n as u64;
    }

    #[inline]
    pub fn add(&mut self, n: usize) {
        self.cadd += n as u64;
    }

    #[inline]
    pub fn div(&mut self, n: usize) {
        self.cdiv += n as u64;
    }

    #[inline]
    pub fn sqrt(&mut self, n: usize) {
        self.csqrt += n as u64;
    }

    /// Fieldwise sum.
    pub fn merge(&self, other: &FlopCounter) -> FlopCounter {
        FlopCounter {
            cmul: self.cmul + other.cmul,
            cadd: self.cadd + other.cadd,
            cdiv: self.cdiv + other.cdiv,
            csqrt: self.csqrt + other.csqrt,
        }
    }

    /// Weighted real flop count, `6 cmul + 2 cadd`.
    pub fn flops(&self) -> f64 {
        FLOPS_PER_CMUL * self.cmul as f64 + FLOPS_PER_CADD * self.cadd as f64
    }

    /// Unweighted complex operation count, `cmul + cadd`.
    pub fn complex_ops(&self) -> u64 {
        self.cmul + self.cadd
    }
}

impl std::ops::Add for FlopCounter {
    type Output = FlopCounter;
    fn add(self, rhs: FlopCounter) -> FlopCounter {
        self.merge(&rhs)
    }
}

impl AddAssign for FlopCounter {
    fn add_assign(&mut self, rhs: FlopCounter) {
        *self = self.merge(&rhs);
    }
}

impl Sum for FlopCounter {
    fn sum<I: Iterator<Item = FlopCounter>>(iter: I) -> Self {
        iter.fold(FlopCounter::default(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a FlopCounter> for FlopCounter {
    fn sum<I: Iterator<Item = &'a FlopCounter>>(iter: I) -> Self {
        iter.fold(FlopCounter::default(), |a, b| a + *b)
    }
}

impl fmt::Display for FlopCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cmul={} cadd={} cdiv={} csqrt={}",
            self.cmul, self.cadd, self.cdiv, self.csqrt
        )
    }
}

/// Leading-order operation estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlopEstimate {
    pub cmul: f64,
    pub cadd: f64,
    pub flops: f64,
}

impl FlopEstimate {
    pub fn new(cmul: f64, cadd: f64) -> Self {
        Self {
            cmul,
            cadd,
            flops: FLOPS_PER_CMUL * cmul + FLOPS_PER_CADD * cadd,
        }
    }

    /// Mean of a set of measured counters, as an estimate.
    pub fn mean_of(counters: &[FlopCounter]) -> Self {
        if counters.is_empty() {
            return Self::new(0.0, 0.0);
        }
        let n = counters.len() as f64;
        let cmul = counters.iter().map(|c| c.cmul as f64).sum::<f64>() / n;
        let cadd = counters.iter().map(|c| c.cadd as f64).sum::<f64>() / n;
        Self::new(cmul, cadd)
    }
}

/// Which assumption about the detection order a complexity figure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Assumed order statistically independent of the optimal order.
    ExpectedRandomOrder,
    /// Assumed order equal to the optimal order (no retriangularization rotations).
    ExpectedMatchedOrder,
    /// The selected row is always the first one.
    WorstCase,
}

impl Regime {
    pub const ALL: [Regime; 3] = [
        Regime::ExpectedRandomOrder,
        Regime::ExpectedMatchedOrder,
        Regime::WorstCase,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::ExpectedRandomOrder => "expected_random_order",
            Regime::ExpectedMatchedOrder => "expected_matched_order",
            Regime::WorstCase => "worst_case",
        }
    }

    pub fn parse(s: &str) -> Option<Regime> {
        match s {
            "expected_random_order" | "random" | "independent" => Some(Regime::ExpectedRandomOrder),
            "expected_matched_order" | "matched" | "exact" => Some(Regime::ExpectedMatchedOrder),
            "worst_case" | "worst" => Some(Regime::WorstCase),
            _ => None,
        }
    }
}

/// Algorithms with a closed-form complexity model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Proposed,
    PreviousGivens,
    PreviousHouseholder,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::Proposed,
        Algorithm::PreviousGivens,
        Algorithm::PreviousHouseholder,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Proposed => "proposed",
            Algorithm::PreviousGivens => "previous_givens",
            Algorithm::PreviousHouseholder => "previous_householder",
        }
    }
}

/// Leading-order complexity of a whole detection run.
///
/// The previous algorithm's cost does not depend on the assumed order, so
/// its estimate is the same in every regime.
pub fn predict(algorithm: Algorithm, m: usize, n: usize, regime: Regime) -> Result<FlopEstimate> {
    if m == 0 || n < m {
        return Err(Error::InvalidConfig(format!(
            "complexity model needs N >= M >= 1, got M={m} N={n}"
        )));
    }
    let m3 = (m as f64).powi(3);
    let m2n = (m as f64).powi(2) * n as f64;
    let est = match (algorithm, regime) {
        (Algorithm::Proposed, Regime::ExpectedRandomOrder) => {
            FlopEstimate::new(2.0 / 3.0 * m3 + 0.5 * m2n, 4.0 / 9.0 * m3 + 0.5 * m2n)
        }
        (Algorithm::Proposed, Regime::ExpectedMatchedOrder) => {
            FlopEstimate::new(m3 / 3.0 + 0.5 * m2n, m3 / 3.0 + 0.5 * m2n)
        }
        (Algorithm::Proposed, Regime::WorstCase) => {
            FlopEstimate::new(5.0 / 6.0 * m3 + 0.5 * m2n, 0.5 * m3 + 0.5 * m2n)
        }
        (Algorithm::PreviousGivens, _) => FlopEstimate::new(m3 + 3.5 * m2n, m3 / 3.0 + 3.5 * m2n),
        (Algorithm::PreviousHouseholder, _) => {
            FlopEstimate::new(2.0 / 3.0 * m3 + 3.5 * m2n, 2.0 / 3.0 * m3 + 3.5 * m2n)
        }
    };
    Ok(est)
}

/// Retriangularization cost of the proposed algorithm alone, leading order.
pub fn predict_retriangularization(m: usize, regime: Regime) -> FlopEstimate {
    let m3 = (m as f64).powi(3);
    match regime {
        Regime::ExpectedRandomOrder => FlopEstimate::new(m3 / 3.0, m3 / 9.0),
        Regime::ExpectedMatchedOrder => FlopEstimate::new(0.0, 0.0),
        Regime::WorstCase => FlopEstimate::new(m3 / 2.0, m3 / 6.0),
    }
}

/// Speedups in multiplications, additions and flops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Speedup {
    pub mul: f64,
    pub add: f64,
    pub flops: f64,
}

impl Speedup {
    pub fn between(slow: &FlopEstimate, fast: &FlopEstimate) -> Self {
        Self {
            mul: slow.cmul / fast.cmul,
            add: slow.cadd / fast.cadd,
            flops: slow.flops / fast.flops,
        }
    }
}

impl fmt::Display for Speedup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:.3}, {:.3}, {:.3}>", self.mul, self.add, self.flops)
    }
}

/// Predicted speedups of the proposed detector over the previous Givens-based one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupReport {
    pub m: usize,
    pub n: usize,
    pub random_order: Speedup,
    pub matched_order: Speedup,
    pub worst_case: Speedup,
    /// Worst-case over expected (random order) flops of the proposed detector.
    pub worst_to_expected_flops: f64,
}

pub fn speedup_report(m: usize, n: usize) -> Result<SpeedupReport> {
    let prev = predict(Algorithm::PreviousGivens, m, n, Regime::ExpectedRandomOrder)?;
    let random = predict(Algorithm::Proposed, m, n, Regime::ExpectedRandomOrder)?;
    let matched = predict(Algorithm::Proposed, m, n, Regime::ExpectedMatchedOrder)?;
    let worst = predict(Algorithm::Proposed, m, n, Regime::WorstCase)?;
    Ok(SpeedupReport {
        m,
        n,
        random_order: Speedup::between(&prev, &random),
        matched_order: Speedup::between(&prev, &matched),
        worst_case: Speedup::between(&prev, &worst),
        worst_to_expected_flops: worst.flops / random.flops,
    })
}

/// Relative deviation of a measurement from a leading-order prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub cmul: f64,
    pub cadd: f64,
    pub flops: f64,
    /// Measured minus predicted flops, the part attributed to lower-order terms.
    pub lower_order_flops: f64,
    /// Lower-order slack relative to `M^3`.
    pub lower_order_per_m3: f64,
    pub bound: f64,
    pub exceeds: bool,
}

fn rel(measured: f64, predicted: f64) -> f64 {
    if predicted == 0.0 {
        if measured == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (measured - predicted) / predicted
    }
}

/// Compares a measured estimate (usually a mean over trials) against a prediction.
pub fn compare_estimate(
    measured: &FlopEstimate,
    predicted: &FlopEstimate,
    m: usize,
    bound: f64,
) -> Deviation {
    let cmul = rel(measured.cmul, predicted.cmul);
    let cadd = rel(measured.cadd, predicted.cadd);
    let flops = rel(measured.flops, predicted.flops);
    let lower = measured.flops - predicted.flops;
    Deviation {
        cmul,
        cadd,
        flops,
        lower_order_flops: lower,
        lower_order_per_m3: lower / (m.max(1) as f64).powi(3),
        bound,
        exceeds: cmul.abs() > bound || cadd.abs() > bound || flops.abs() > bound,
    }
}

pub fn compare(
    measured: &FlopCounter,
    predicted: &FlopEstimate,
    m: usize,
    bound: f64,
) -> Deviation {
    let measured = FlopEstimate::new(measured.cmul as f64, measured.cadd as f64);
    compare_estimate(&measured, predicted, m, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predict_rejects_bad_sizes() {
        assert!(predict(Algorithm::Proposed, 0, 4, Regime::WorstCase).is_err());
        assert!(predict(Algorithm::Proposed, 4, 3, Regime::WorstCase).is_err());
    }

    #[test]
    fn matched_regime_totals() {
        let e = predict(Algorithm::Proposed, 10, 10, Regime::ExpectedMatchedOrder).unwrap();
        // 5/6 M^3 each of cmul and cadd
        assert!((e.cmul - 5.0 / 6.0 * 1000.0).abs() < 1e-9);
        assert!((e.cadd - 5.0 / 6.0 * 1000.0).abs() < 1e-9);
        assert!((e.cmul + e.cadd - 5.0 / 3.0 * 1000.0).abs() < 1e-9);
    }

    #[test]
    fn previous_givens_mul_coefficient() {
        let e = predict(Algorithm::PreviousGivens, 8, 8, Regime::ExpectedRandomOrder).unwrap();
        assert!((e.cmul / 512.0 - 4.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_size_is_quadratic_dominated() {
        for alg in Algorithm::ALL {
            for regime in Regime::ALL {
                let e = predict(alg, 1, 1, regime).unwrap();
                // cubic terms are at most 1 at M = 1
                let cubic = e.cmul - if alg == Algorithm::Proposed { 0.5 } else { 3.5 };
                assert!(cubic <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn speedups_at_square_sizes() {
        let r = speedup_report(16, 16).unwrap();
        assert!((r.random_order.mul - 27.0 / 7.0).abs() < 1e-12);
        assert!((r.random_order.add - 69.0 / 17.0).abs() < 1e-12);
        assert!((r.random_order.flops - 3.9).abs() < 1e-12);
        assert!((r.matched_order.mul - 5.4).abs() < 1e-12);
        assert!((r.matched_order.add - 4.6).abs() < 1e-12);
        assert!((r.matched_order.flops - 5.2).abs() < 1e-12);
        assert!((r.worst_to_expected_flops - 1.125).abs() < 1e-12);
    }

    #[test]
    fn compare_exact_and_synthetic() {
        let p = FlopEstimate::new(1000.0, 500.0);
        let d = compare_estimate(&p, &p, 10, 0.1);
        assert_eq!(d.cmul, 0.0);
        assert_eq!(d.flops, 0.0);
        assert!(!d.exceeds);

        let m = 20usize;
        let k = 1.0 + 10.0 / m as f64;
        let measured = FlopEstimate::new(1000.0 * k, 500.0 * k);
        let d = compare_estimate(&measured, &p, m, 0.25);
        assert!((d.cmul - 0.5).abs() < 1e-12);
        assert!((d.flops - 0.5).abs() < 1e-12);
        assert!(d.exceeds);
    }

    #[test]
    fn counter_merge_and_display() {
        let mut a = FlopCounter::new();
        a.mul(3);
        a.add(2);
        a.div(1);
        let b = FlopCounter {
            cmul: 1,
            cadd: 1,
            cdiv: 0,
            csqrt: 4,
        };
        let c = a + b;
        assert_eq!(
            c,
            FlopCounter {
                cmul: 4,
                cadd: 3,
                cdiv: 1,
                csqrt: 4
            }
        );
        assert_eq!(c.flops(), 30.0);
        assert_eq!(c.to_string(), "cmul=4 cadd=3 cdiv=1 csqrt=4");
        let total: FlopCounter = [a, b, c].iter().sum();
        assert_eq!(total.cmul, 8);
    }

    #[test]
    fn regime_names_round_trip() {
        for r in Regime::ALL {
            assert_eq!(Regime::parse(r.name()), Some(r));
        }
        assert_eq!(Regime::parse("bogus"), None);
    }
}
