//! Monte Carlo harness: channels, noise, SER sweeps, complexity benchmarks and
//! the subcarrier order-reuse experiment.
//!
//! Every random draw comes from ChaCha8 seeded with the master seed, on a
//! stream selected by `(trial, role, subcarrier)`. A trial therefore sees the
//! same channel, symbols and noise shape at every SNR point and for every
//! detector, and results do not depend on how trials are scheduled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constellation::{Constellation, ConstellationKind};
use crate::detectors::{
    dense_inverse, detect_proposed, AssumedOrder, DetectionProblem, DetectionResult, DetectorKind,
    Feedback,
};
use crate::error::{Error, Result};
use crate::exec::map_trials;
use crate::flops::{
    compare_estimate, predict, Algorithm, Deviation, FlopCounter, FlopEstimate, Regime,
};
use crate::invchol::{conventional_inv_chol, inv_chol};
use crate::matcore::{gram_regularized, ComplexMatrix, Permutation, C64};

/// Human-readable description of the generator, embedded in report headers.
pub const RNG_DESCRIPTION: &str =
    "chacha8 seed_from_u64(seed) stream=(trial<<24)|(subcarrier<<4)|role";

/// Independent random stream within a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Channel = 0,
    Symbols = 1,
    Noise = 2,
    Order = 3,
    Innovation = 4,
}

/// Generator for one `(trial, role, subcarrier)` stream.
pub fn stream_rng(seed: u64, trial: u64, role: Role, subcarrier: u64) -> ChaCha8Rng {
    debug_assert!(trial < 1 << 40 && subcarrier < 1 << 20);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 24) | (subcarrier << 4) | role as u64);
    rng
}

/// One CN(0, 1) draw.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(s * re, s * im)
}

/// `N x M` matrix of i.i.d. CN(0, 1) entries, row by row.
pub fn gen_channel_with<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, m, |_, _| complex_normal(rng))
}

/// Rayleigh channel that depends only on `seed`.
pub fn gen_channel(seed: u64, m: usize, n: usize) -> ComplexMatrix {
    gen_channel_with(&mut ChaCha8Rng::seed_from_u64(seed), m, n)
}

/// `sigma_w^2` for a given SNR in dB with unit symbol energy. `+inf` gives 0.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

fn random_permutation(rng: &mut ChaCha8Rng, m: usize) -> Permutation {
    let mut map: Vec<usize> = (0..m).collect();
    map.shuffle(rng);
    Permutation::new(map).expect("shuffled identity is a permutation")
}

/// How the proposed detector's assumed order is chosen for each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderPolicy {
    Identity,
    /// Uniformly random, independent of the channel.
    Random,
    /// The realized optimal order, so no rotations are needed.
    Matched,
    /// Reverse of the realized optimal order: every step needs the longest chain.
    Adversarial,
}

impl OrderPolicy {
    pub const ALL: [OrderPolicy; 4] = [
        OrderPolicy::Identity,
        OrderPolicy::Random,
        OrderPolicy::Matched,
        OrderPolicy::Adversarial,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OrderPolicy::Identity => "identity",
            OrderPolicy::Random => "random",
            OrderPolicy::Matched => "matched",
            OrderPolicy::Adversarial => "adversarial",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown order policy '{s}'")))
    }

    /// Policy that realizes a complexity regime.
    pub fn for_regime(regime: Regime) -> Self {
        match regime {
            Regime::ExpectedRandomOrder => OrderPolicy::Random,
            Regime::ExpectedMatchedOrder => OrderPolicy::Matched,
            Regime::WorstCase => OrderPolicy::Adversarial,
        }
    }
}

/// Assumed order for one problem. `stream` feeds the random policy.
pub fn assumed_order(
    policy: OrderPolicy,
    problem: &DetectionProblem,
    stream: &mut ChaCha8Rng,
) -> Result<AssumedOrder> {
    let m = problem.m();
    match policy {
        OrderPolicy::Identity => Ok(AssumedOrder::identity(m)),
        OrderPolicy::Random => Ok(AssumedOrder::from_columns(random_permutation(stream, m))),
        OrderPolicy::Matched | OrderPolicy::Adversarial => {
            let first = detect_proposed(problem, &AssumedOrder::identity(m))?;
            if policy == OrderPolicy::Matched {
                AssumedOrder::from_detection_order(&first.detection_order)
            } else {
                AssumedOrder::adversarial_for(&first.detection_order)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub m: usize,
    pub n: usize,
    pub constellation: ConstellationKind,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub detectors: Vec<DetectorKind>,
    pub order: OrderPolicy,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            m: 4,
            n: 4,
            constellation: ConstellationKind::Qpsk,
            snr_db: vec![0.0, 10.0, 20.0, 30.0],
            trials: 2000,
            seed: 1,
            detectors: DetectorKind::ALL.to_vec(),
            order: OrderPolicy::Identity,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m == 0 {
            return bad("M must be at least 1".into());
        }
        if self.n < self.m {
            return bad(format!("N = {} must be at least M = {}", self.n, self.m));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.trials >= 1 << 40 {
            return bad("trials must be below 2^40".into());
        }
        if self.snr_db.is_empty() {
            return bad("at least one SNR point is required".into());
        }
        if self
            .snr_db
            .iter()
            .any(|s| s.is_nan() || *s == f64::NEG_INFINITY)
        {
            return bad("SNR points must be numbers or +inf".into());
        }
        if self.detectors.is_empty() {
            return bad("at least one detector is required".into());
        }
        for (k, d) in self.detectors.iter().enumerate() {
            if self.detectors[..k].contains(d) {
                return bad(format!("detector '{}' listed twice", d.name()));
            }
        }
        let noiseless = self.snr_db.iter().any(|s| s.is_infinite());
        if let Some(d) = self.detectors.iter().find(|d| !d.accepts_zero_alpha()) {
            if noiseless {
                return bad(format!(
                    "detector '{}' needs finite SNR (alpha > 0)",
                    d.name()
                ));
            }
        }
        Ok(())
    }
}

/// One detector's output on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorOutcome {
    pub kind: DetectorKind,
    pub detection_order: Vec<usize>,
    pub decision_indices: Vec<usize>,
    pub estimates: Vec<C64>,
    pub rotations: usize,
    pub counter: FlopCounter,
    /// Operations spent restoring triangular form.
    pub triangularization: FlopCounter,
    pub symbol_errors: usize,
}

impl DetectorOutcome {
    fn from_result(kind: DetectorKind, r: DetectionResult, sent: &[usize]) -> Self {
        let symbol_errors = r
            .decision_indices
            .iter()
            .zip(sent)
            .filter(|(a, b)| a != b)
            .count();
        Self {
            kind,
            rotations: r.total_rotations(),
            detection_order: r.detection_order,
            decision_indices: r.decision_indices,
            estimates: r.estimates,
            counter: r.counter,
            triangularization: r.stages.triangularization,
            symbol_errors,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub snr_db: f64,
    /// Transmitted constellation indices.
    pub sent: Vec<usize>,
    /// In the order of [`SweepConfig::detectors`].
    pub outcomes: Vec<DetectorOutcome>,
    /// All detectors produced the same order and decisions.
    pub agreement: bool,
    /// Largest estimate difference from the first detector.
    pub max_estimate_gap: f64,
}

impl TrialRecord {
    pub fn outcome(&self, kind: DetectorKind) -> Option<&DetectorOutcome> {
        self.outcomes.iter().find(|o| o.kind == kind)
    }
}

/// `x = H a + w` for one trial at one SNR; also returns the sent indices.
pub fn draw_problem(
    seed: u64,
    trial: u64,
    subcarrier: u64,
    channel: ComplexMatrix,
    constellation: &Constellation,
    snr_db: f64,
) -> Result<(DetectionProblem, Vec<usize>)> {
    let (n, m) = (channel.rows(), channel.cols());
    let mut sym = stream_rng(seed, trial, Role::Symbols, subcarrier);
    let sent: Vec<usize> = (0..m)
        .map(|_| sym.random_range(0..constellation.len()))
        .collect();
    let sigma2 = noise_variance(snr_db);
    let sigma = sigma2.sqrt();
    let mut noise = stream_rng(seed, trial, Role::Noise, subcarrier);
    let x: Vec<C64> = (0..n)
        .map(|r| {
            let signal = (0..m).fold(C64::new(0.0, 0.0), |acc, k| {
                acc + channel[(r, k)] * constellation.point(sent[k])
            });
            signal + complex_normal(&mut noise) * sigma
        })
        .collect();
    let problem = DetectionProblem::new(channel, x, sigma2, constellation.clone())?;
    Ok((problem, sent))
}

pub fn run_trial(config: &SweepConfig, trial: u64, snr_db: f64) -> Result<TrialRecord> {
    let constellation = Constellation::new(config.constellation);
    run_trial_with(config, &constellation, trial, snr_db)
}

fn run_trial_with(
    config: &SweepConfig,
    constellation: &Constellation,
    trial: u64,
    snr_db: f64,
) -> Result<TrialRecord> {
    let wrap = |e: Error| e.context(format!("trial {trial} at {snr_db} dB"));
    let channel = gen_channel_with(
        &mut stream_rng(config.seed, trial, Role::Channel, 0),
        config.m,
        config.n,
    );
    let (problem, sent) =
        draw_problem(config.seed, trial, 0, channel, constellation, snr_db).map_err(wrap)?;
    let mut order_rng = stream_rng(config.seed, trial, Role::Order, 0);
    let assumed = assumed_order(config.order, &problem, &mut order_rng).map_err(wrap)?;

    let mut outcomes = Vec::with_capacity(config.detectors.len());
    for kind in &config.detectors {
        let r = kind
            .run(&problem, &assumed, &Feedback::Sliced)
            .map_err(wrap)?;
        outcomes.push(DetectorOutcome::from_result(*kind, r, &sent));
    }
    let first = &outcomes[0];
    let agreement = outcomes.iter().all(|o| {
        o.detection_order == first.detection_order && o.decision_indices == first.decision_indices
    });
    let max_estimate_gap = outcomes
        .iter()
        .flat_map(|o| {
            o.estimates
                .iter()
                .zip(&first.estimates)
                .map(|(a, b)| (a - b).norm())
        })
        .fold(0.0, f64::max);
    Ok(TrialRecord {
        trial,
        snr_db,
        sent,
        outcomes,
        agreement,
        max_estimate_gap,
    })
}

/// All trials of one SNR point, in trial order.
pub fn run_trials(config: &SweepConfig, snr_db: f64) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let constellation = Constellation::new(config.constellation);
    map_trials(config.trials, |t| {
        run_trial_with(config, &constellation, t, snr_db)
    })
}

/// Single-threaded [`run_trials`], kept for benchmarking and debugging.
pub fn run_trials_sequential(config: &SweepConfig, snr_db: f64) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let constellation = Constellation::new(config.constellation);
    crate::exec::map_trials_sequential(config.trials, |t| {
        run_trial_with(config, &constellation, t, snr_db)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorPoint {
    pub kind: DetectorKind,
    pub symbol_errors: u64,
    pub symbols: u64,
    pub ser: f64,
    pub mean_flops: FlopEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub per_detector: Vec<DetectorPoint>,
    pub max_estimate_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// SER per SNR point for one detector.
    pub fn curve(&self, kind: DetectorKind) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| {
                p.per_detector
                    .iter()
                    .find(|d| d.kind == kind)
                    .map(|d| (p.snr_db, d.ser))
            })
            .collect()
    }
}

/// SER per detector over the configured SNR points. Any decision disagreement
/// between detectors is an error.
pub fn ser_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut points = Vec::with_capacity(config.snr_db.len());
    for &snr in &config.snr_db {
        let records = run_trials(config, snr)?;
        if let Some(bad) = records.iter().find(|r| !r.agreement) {
            return Err(Error::DetectorDisagreement {
                trial: bad.trial,
                snr_db: snr,
            });
        }
        let symbols = config.trials * config.m as u64;
        let per_detector = config
            .detectors
            .iter()
            .enumerate()
            .map(|(k, kind)| {
                let symbol_errors: u64 = records
                    .iter()
                    .map(|r| r.outcomes[k].symbol_errors as u64)
                    .sum();
                let counters: Vec<FlopCounter> =
                    records.iter().map(|r| r.outcomes[k].counter).collect();
                DetectorPoint {
                    kind: *kind,
                    symbol_errors,
                    symbols,
                    ser: symbol_errors as f64 / symbols as f64,
                    mean_flops: FlopEstimate::mean_of(&counters),
                }
            })
            .collect();
        let max_estimate_gap = records
            .iter()
            .map(|r| r.max_estimate_gap)
            .fold(0.0, f64::max);
        points.push(SweepPoint {
            snr_db: snr,
            per_detector,
            max_estimate_gap,
        });
    }
    Ok(SweepResult {
        config: config.clone(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub m: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub snr_db: f64,
    pub regimes: Vec<Regime>,
    /// Relative deviation from the leading-order prediction that gets flagged.
    pub bound: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            m: 16,
            n: 16,
            trials: 200,
            seed: 1,
            snr_db: 10.0,
            regimes: Regime::ALL.to_vec(),
            bound: 0.5,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let sweep = SweepConfig {
            m: self.m,
            n: self.n,
            snr_db: vec![self.snr_db],
            trials: self.trials,
            seed: self.seed,
            detectors: vec![DetectorKind::Proposed],
            ..SweepConfig::default()
        };
        sweep.validate()?;
        if self.snr_db.is_infinite() {
            return Err(Error::InvalidConfig("bench needs a finite SNR".into()));
        }
        if self.regimes.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one regime is required".into(),
            ));
        }
        if !(self.bound > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bound must be positive, got {}",
                self.bound
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    pub n: usize,
    pub algorithm: Algorithm,
    pub regime: Regime,
    pub measured: FlopEstimate,
    pub predicted: FlopEstimate,
    pub deviation: Deviation,
    /// Mean rotations (or reflectors) per trial.
    pub mean_rotations: f64,
    /// Measured flops of this algorithm over the proposed one in the same regime.
    pub speedup_vs_proposed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, algorithm: Algorithm, regime: Regime) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.regime == regime)
    }

    /// Measured `previous_givens / proposed` flop ratio for a regime.
    pub fn speedup(&self, regime: Regime) -> Option<f64> {
        self.row(Algorithm::PreviousGivens, regime)
            .map(|r| r.speedup_vs_proposed)
    }
}

struct BenchTrial {
    proposed: Vec<(FlopCounter, usize)>,
    givens: (FlopCounter, usize),
    householder: (FlopCounter, usize),
}

/// Measured operation counts against the leading-order predictions.
pub fn complexity_bench(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let constellation = Constellation::qpsk();
    let (m, n) = (config.m, config.n);
    let trials = map_trials(config.trials, |t| {
        let wrap = |e: Error| e.context(format!("bench trial {t}"));
        let channel = gen_channel_with(&mut stream_rng(config.seed, t, Role::Channel, 0), m, n);
        let (problem, _) = draw_problem(config.seed, t, 0, channel, &constellation, config.snr_db)
            .map_err(wrap)?;
        let mut order_rng = stream_rng(config.seed, t, Role::Order, 0);
        let mut proposed = Vec::with_capacity(config.regimes.len());
        for regime in &config.regimes {
            let assumed = assumed_order(OrderPolicy::for_regime(*regime), &problem, &mut order_rng)
                .map_err(wrap)?;
            let r = DetectorKind::Proposed
                .run(&problem, &assumed, &Feedback::Sliced)
                .map_err(wrap)?;
            proposed.push((r.counter, r.total_rotations()));
        }
        let none = AssumedOrder::identity(m);
        let g = DetectorKind::PreviousGivens
            .run(&problem, &none, &Feedback::Sliced)
            .map_err(wrap)?;
        let h = DetectorKind::PreviousHouseholder
            .run(&problem, &none, &Feedback::Sliced)
            .map_err(wrap)?;
        Ok(BenchTrial {
            proposed,
            givens: (g.counter, g.total_rotations()),
            householder: (h.counter, h.total_rotations()),
        })
    })?;

    let summarize = |samples: Vec<(FlopCounter, usize)>| {
        let counters: Vec<FlopCounter> = samples.iter().map(|s| s.0).collect();
        let rot = samples.iter().map(|s| s.1 as f64).sum::<f64>() / samples.len() as f64;
        (FlopEstimate::mean_of(&counters), rot)
    };
    let givens = summarize(trials.iter().map(|t| t.givens).collect());
    let householder = summarize(trials.iter().map(|t| t.householder).collect());

    let mut rows = Vec::new();
    for (k, regime) in config.regimes.iter().enumerate() {
        let proposed = summarize(trials.iter().map(|t| t.proposed[k]).collect());
        for (algorithm, (measured, mean_rotations)) in [
            (Algorithm::Proposed, proposed),
            (Algorithm::PreviousGivens, givens),
            (Algorithm::PreviousHouseholder, householder),
        ] {
            let predicted = predict(algorithm, m, n, *regime)?;
            rows.push(BenchRow {
                m,
                n,
                algorithm,
                regime: *regime,
                measured,
                predicted,
                deviation: compare_estimate(&measured, &predicted, m, config.bound),
                mean_rotations,
                speedup_vs_proposed: measured.flops / proposed.0.flops,
            });
        }
    }
    Ok(BenchReport {
        config: config.clone(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReuseMode {
    /// Assume the optimal order realized on the previous subcarrier.
    ExactOptimal,
    /// Assume an independent random order on every subcarrier.
    Independent,
}

impl ReuseMode {
    pub fn name(&self) -> &'static str {
        match self {
            ReuseMode::ExactOptimal => "exact",
            ReuseMode::Independent => "independent",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_optimal" => Ok(ReuseMode::ExactOptimal),
            "independent" | "random" => Ok(ReuseMode::Independent),
            _ => Err(Error::InvalidConfig(format!("unknown reuse mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfdmReuseConfig {
    /// Subcarriers reported per trial. One extra leading subcarrier seeds the
    /// first reused order and is not reported.
    pub subcarriers: usize,
    pub mode: ReuseMode,
    /// Correlation between adjacent subcarrier channels.
    pub rho: f64,
}

impl OfdmReuseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subcarriers == 0 || self.subcarriers >= 1 << 20 {
            return Err(Error::InvalidConfig(
                "subcarriers must be in 1..2^20".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidConfig(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubcarrierRecord {
    pub trial: u64,
    /// 1-based among reported subcarriers.
    pub subcarrier: usize,
    pub rotations: usize,
    pub n3: FlopCounter,
    pub symbol_errors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfdmReport {
    pub config: OfdmReuseConfig,
    pub m: usize,
    pub n: usize,
    pub snr_db: f64,
    pub records: Vec<SubcarrierRecord>,
    pub mean_rotations: f64,
    pub mean_n3: FlopEstimate,
    /// Random-order endpoint `(M^3/3, M^3/9)`.
    pub random_endpoint: FlopEstimate,
    pub zero_rotation_fraction: f64,
}

/// Runs the proposed detector over correlated subcarriers, assuming either the
/// previous subcarrier's optimal order or a random one, and records the cost
/// of restoring triangular form.
///
/// Uses the first SNR point of `sweep`; its detector list is ignored.
pub fn ofdm_reuse_experiment(config: &OfdmReuseConfig, sweep: &SweepConfig) -> Result<OfdmReport> {
    config.validate()?;
    let base = SweepConfig {
        detectors: vec![DetectorKind::Proposed],
        ..sweep.clone()
    };
    base.validate()?;
    let (m, n, seed, snr_db) = (sweep.m, sweep.n, sweep.seed, sweep.snr_db[0]);
    let constellation = Constellation::new(sweep.constellation);
    let keep = config.rho;
    let fresh = (1.0 - config.rho * config.rho).max(0.0).sqrt();

    let per_trial = map_trials(sweep.trials, |t| {
        let wrap = |e: Error| e.context(format!("trial {t}"));
        let mut channel = gen_channel_with(&mut stream_rng(seed, t, Role::Channel, 0), m, n);
        let (problem, _) =
            draw_problem(seed, t, 0, channel.clone(), &constellation, snr_db).map_err(wrap)?;
        let mut previous = detect_proposed(&problem, &AssumedOrder::identity(m))
            .map_err(wrap)?
            .detection_order;
        let mut out = Vec::with_capacity(config.subcarriers);
        for k in 1..=config.subcarriers {
            let sub = k as u64;
            let mut innov = stream_rng(seed, t, Role::Innovation, sub);
            let w = gen_channel_with(&mut innov, m, n);
            channel =
                ComplexMatrix::from_fn(n, m, |r, c| channel[(r, c)] * keep + w[(r, c)] * fresh);
            let (problem, sent) =
                draw_problem(seed, t, sub, channel.clone(), &constellation, snr_db)
                    .map_err(wrap)?;
            let assumed = match config.mode {
                ReuseMode::ExactOptimal => AssumedOrder::from_detection_order(&previous)?,
                ReuseMode::Independent => AssumedOrder::from_columns(random_permutation(
                    &mut stream_rng(seed, t, Role::Order, sub),
                    m,
                )),
            };
            let r = detect_proposed(&problem, &assumed).map_err(wrap)?;
            out.push(SubcarrierRecord {
                trial: t,
                subcarrier: k,
                rotations: r.total_rotations(),
                n3: r.stages.triangularization,
                symbol_errors: r
                    .decision_indices
                    .iter()
                    .zip(&sent)
                    .filter(|(a, b)| a != b)
                    .count(),
            });
            previous = r.detection_order;
        }
        Ok(out)
    })?;

    let records: Vec<SubcarrierRecord> = per_trial.into_iter().flatten().collect();
    let count = records.len() as f64;
    let n3: Vec<FlopCounter> = records.iter().map(|r| r.n3).collect();
    let m3 = (m * m * m) as f64;
    Ok(OfdmReport {
        config: config.clone(),
        m,
        n,
        snr_db,
        mean_rotations: records.iter().map(|r| r.rotations as f64).sum::<f64>() / count,
        mean_n3: FlopEstimate::mean_of(&n3),
        random_endpoint: FlopEstimate::new(m3 / 3.0, m3 / 9.0),
        zero_rotation_fraction: records.iter().filter(|r| r.rotations == 0).count() as f64 / count,
        records,
    })
}

/// `H = A B` with `A` of size `N x rank` and `B` of size `rank x M`, so
/// `H^H H` has rank `min(rank, M)`.
pub fn gen_low_rank_channel(seed: u64, m: usize, n: usize, rank: usize) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gen_channel_with(&mut rng, rank, n);
    let b = gen_channel_with(&mut rng, m, rank);
    a.matmul(&b)
}

/// Both factorizers run on `R = H^H H + alpha I` for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizeReport {
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    /// `||F F^H - R^{-1}||_F / ||R^{-1}||_F` with `R^{-1}` from the conventional route.
    pub residual: f64,
    /// Same, against a dense LU inverse.
    pub residual_dense: f64,
    /// Conventional factor against the dense LU inverse.
    pub residual_conventional: f64,
    pub gram: FlopCounter,
    pub fast: FlopCounter,
    pub conventional: FlopCounter,
    /// `M^3/3 + M^2 N/2` cmul for Gram matrix plus factor.
    pub predicted_cmul: f64,
}

impl FactorizeReport {
    /// Gram matrix and bordering factorization together.
    pub fn measured_cmul(&self) -> u64 {
        self.gram.cmul + self.fast.cmul
    }
}

/// Factors `R = H^H H + alpha I` both ways. `rank` below `M` makes `H` rank deficient.
pub fn factorize_check(
    m: usize,
    n: usize,
    alpha: f64,
    seed: u64,
    rank: Option<usize>,
) -> Result<FactorizeReport> {
    if m == 0 || n < m {
        return Err(Error::InvalidConfig(format!(
            "need N >= M >= 1, got M = {m}, N = {n}"
        )));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    let h = match rank {
        Some(0) => return Err(Error::InvalidConfig("rank must be at least 1".into())),
        Some(r) => gen_low_rank_channel(seed, m, n, r),
        None => gen_channel(seed, m, n),
    };
    let mut gram = FlopCounter::new();
    let r = gram_regularized(&h, alpha, &mut gram)?;
    let mut fast = FlopCounter::new();
    let f = inv_chol(&r, &mut fast)?;
    let mut conventional = FlopCounter::new();
    let g = conventional_inv_chol(&r, &mut conventional)?;
    let reference = g.covariance();
    let covariance = f.covariance();
    let dense = dense_inverse(&r.to_dense())?;
    let (mf, nf) = (m as f64, n as f64);
    Ok(FactorizeReport {
        m,
        n,
        alpha,
        residual: covariance.relative_distance(&reference),
        residual_dense: covariance.relative_distance(&dense),
        residual_conventional: reference.relative_distance(&dense),
        gram,
        fast,
        conventional,
        predicted_cmul: mf * mf * mf / 3.0 + mf * mf * nf / 2.0,
    })
}
