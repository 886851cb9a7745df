//! MMSE ordered successive interference cancellation detectors.
//!
//! Three detectors share one problem type and one selection rule (smallest
//! estimation error variance first, lowest current index on ties):
//!
//! * [`detect_proposed`] factors `R = H^H H + alpha I` once by bordering,
//!   keeps `F` upper triangular while deflating, and cancels interference in
//!   `z = H^H x` using the columns of `R`, never touching `x` again.
//! * [`detect_previous`] propagates `P^{1/2}` through the pre-array recursion,
//!   triangularizes a dense `F` at every step, and recomputes `H_m^H x^{(m)}`
//!   after each cancellation.
//! * [`detect_oracle`] inverts `H_m^H H_m + alpha I` from scratch at every step.

use nalgebra::DMatrix;

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::flops::FlopCounter;
use crate::invchol::inv_chol;
use crate::matcore::{gram_regularized, matvec_adjoint, ComplexMatrix, Permutation, C64};
use crate::rotations::{
    block_upper_triangularize_dense, retriangularize, PreArrayState, TriangularizationMode,
};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Received vector `x = H a + w` together with everything needed to detect `a`.
#[derive(Debug, Clone)]
pub struct DetectionProblem {
    pub channel: ComplexMatrix,
    pub received: Vec<C64>,
    /// `sigma_w^2 / sigma_a^2`.
    pub alpha: f64,
    pub constellation: Constellation,
}

impl DetectionProblem {
    pub fn new(
        channel: ComplexMatrix,
        received: Vec<C64>,
        alpha: f64,
        constellation: Constellation,
    ) -> Result<Self> {
        let p = Self {
            channel,
            received,
            alpha,
            constellation,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.channel.rows(), self.channel.cols());
        if m == 0 || n < m {
            return Err(Error::DimensionMismatch(format!(
                "channel must satisfy N >= M >= 1, got {n}x{m}"
            )));
        }
        if self.received.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "received vector has length {} but the channel has {n} rows",
                self.received.len()
            )));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Number of transmit antennas.
    pub fn m(&self) -> usize {
        self.channel.cols()
    }

    /// Number of receive antennas.
    pub fn n(&self) -> usize {
        self.channel.rows()
    }
}

/// Column arrangement of `H` assumed before detection starts.
///
/// Column `k` of the arranged channel is original antenna `columns[k]`; the
/// last column is the one assumed to be detected first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumedOrder {
    columns: Permutation,
}

impl AssumedOrder {
    pub fn identity(m: usize) -> Self {
        Self {
            columns: Permutation::identity(m),
        }
    }

    pub fn from_columns(columns: Permutation) -> Self {
        Self { columns }
    }

    /// Assumes a detection sequence given first-detected first, as reported in
    /// [`DetectionResult::detection_order`].
    pub fn from_detection_order(order: &[usize]) -> Result<Self> {
        let mut cols = order.to_vec();
        cols.reverse();
        Ok(Self {
            columns: Permutation::new(cols)?,
        })
    }

    /// Arrangement that puts every selected row first, forcing the longest rotation chains.
    pub fn adversarial_for(order: &[usize]) -> Result<Self> {
        Ok(Self {
            columns: Permutation::new(order.to_vec())?,
        })
    }

    pub fn columns(&self) -> &Permutation {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.order()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Symbol fed back into interference cancellation.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Feedback {
    /// Hard decision from the slicer.
    #[default]
    Sliced,
    /// True transmitted symbols indexed by antenna. Test aid: isolates the
    /// numerical route from error propagation.
    Genie(Vec<C64>),
}

impl Feedback {
    fn value(&self, antenna: usize, decision: C64) -> C64 {
        match self {
            Feedback::Sliced => decision,
            Feedback::Genie(symbols) => symbols[antenna],
        }
    }

    fn check(&self, m: usize) -> Result<()> {
        match self {
            Feedback::Genie(s) if s.len() != m => Err(Error::DimensionMismatch(format!(
                "genie feedback has {} symbols for M = {m}",
                s.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// Operation counts split by phase of the detector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageCounters {
    /// Gram matrix, initial factor and `H^H x` (proposed) or the pre-array loop (previous).
    pub initialization: FlopCounter,
    /// Row norms used to pick the next stream.
    pub ordering: FlopCounter,
    /// Rotations or reflectors restoring the block triangular form.
    pub triangularization: FlopCounter,
    /// Linear MMSE estimate, including `H_m^H x^{(m)}` for the previous detector.
    pub estimation: FlopCounter,
    /// Interference cancellation.
    pub cancellation: FlopCounter,
}

impl StageCounters {
    pub fn total(&self) -> FlopCounter {
        self.initialization
            + self.ordering
            + self.triangularization
            + self.estimation
            + self.cancellation
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// Original antenna indices, first detected first.
    pub detection_order: Vec<usize>,
    /// Soft estimate per antenna.
    pub estimates: Vec<C64>,
    /// Sliced symbol per antenna.
    pub decisions: Vec<C64>,
    /// Constellation index of each decision.
    pub decision_indices: Vec<usize>,
    /// Rotations (or reflectors) used at each detection step, in detection order.
    pub per_step_rotations: Vec<usize>,
    pub stages: StageCounters,
    pub counter: FlopCounter,
}

impl DetectionResult {
    fn new(m: usize) -> Self {
        Self {
            detection_order: Vec::with_capacity(m),
            estimates: vec![ZERO; m],
            decisions: vec![ZERO; m],
            decision_indices: vec![0; m],
            per_step_rotations: Vec::with_capacity(m),
            stages: StageCounters::default(),
            counter: FlopCounter::default(),
        }
    }

    fn record(&mut self, antenna: usize, estimate: C64, index: usize, decision: C64) {
        self.detection_order.push(antenna);
        self.estimates[antenna] = estimate;
        self.decisions[antenna] = decision;
        self.decision_indices[antenna] = index;
    }

    fn finish(mut self, stages: StageCounters) -> Self {
        self.stages = stages;
        self.counter = stages.total();
        self
    }

    pub fn total_rotations(&self) -> usize {
        self.per_step_rotations.iter().sum()
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

/// `lambda [u^H, lambda*] z`, the last entry of `z` belonging to the detected stream.
fn estimate(u: &[C64], lambda: C64, z_rest: &[C64], z_sel: C64, counter: &mut FlopCounter) -> C64 {
    let k = u.len() + 1;
    let dot = u
        .iter()
        .zip(z_rest)
        .fold(ZERO, |acc, (a, b)| acc + a.conj() * b);
    counter.mul(k + 1);
    counter.add(k - 1);
    lambda * (dot + lambda.conj() * z_sel)
}

/// The proposed square-root detector with the default hard-decision feedback.
pub fn detect_proposed(
    problem: &DetectionProblem,
    assumed: &AssumedOrder,
) -> Result<DetectionResult> {
    detect_proposed_with(problem, assumed, &Feedback::Sliced)
}

pub fn detect_proposed_with(
    problem: &DetectionProblem,
    assumed: &AssumedOrder,
    feedback: &Feedback,
) -> Result<DetectionResult> {
    problem.validate()?;
    let m = problem.m();
    if assumed.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "assumed order over {} antennas for M = {m}",
            assumed.len()
        )));
    }
    feedback.check(m)?;
    let cols = assumed.columns().as_slice();
    let mut st = StageCounters::default();
    let mut out = DetectionResult::new(m);

    let h = problem.channel.select_columns(cols);
    let r = gram_regularized(&h, problem.alpha, &mut st.initialization)?;
    let mut f = inv_chol(&r, &mut st.initialization)
        .map_err(|e| e.context("initial inverse Cholesky factor"))?
        .into_factor();
    let mut z = matvec_adjoint(&h, &problem.received, &mut st.initialization)?;

    // positions in the arranged channel, in current row order of F
    let mut active: Vec<usize> = (0..m).collect();
    let mut norms = f.row_norms_sqr(&mut st.ordering);

    while !active.is_empty() {
        let k = active.len();
        let i = argmin(&norms);
        let step = retriangularize(&f, i, &mut st.triangularization)?;
        out.per_step_rotations.push(step.rotations_used);

        let sel = active.remove(i);
        let z_sel = z.remove(i);
        norms.remove(i);

        let est = estimate(&step.u, step.lambda, &z, z_sel, &mut st.estimation);
        let (index, decision) = problem.constellation.slice(est);
        let antenna = cols[sel];
        out.record(antenna, est, index, decision);

        let a = feedback.value(antenna, decision);
        for (pos, zk) in active.iter().zip(z.iter_mut()) {
            *zk -= a * r.get(*pos, sel);
        }
        st.cancellation.mul(k - 1);
        st.cancellation.add(k - 1);

        for (nrm, u) in norms.iter_mut().zip(&step.u) {
            *nrm -= u.norm_sqr();
        }
        st.ordering.mul(k - 1);
        st.ordering.add(k - 1);

        f = step.next;
    }
    Ok(out.finish(st))
}

/// The earlier square-root detector: pre-array initialization and dense triangularization.
pub fn detect_previous(
    problem: &DetectionProblem,
    mode: TriangularizationMode,
) -> Result<DetectionResult> {
    detect_previous_with(problem, mode, &Feedback::Sliced)
}

pub fn detect_previous_with(
    problem: &DetectionProblem,
    mode: TriangularizationMode,
    feedback: &Feedback,
) -> Result<DetectionResult> {
    problem.validate()?;
    if !(problem.alpha > 0.0) {
        return Err(Error::DegenerateAlpha(problem.alpha));
    }
    let (m, n) = (problem.m(), problem.n());
    feedback.check(m)?;
    let h = &problem.channel;
    let mut st = StageCounters::default();
    let mut out = DetectionResult::new(m);

    let mut state = PreArrayState::new(m, problem.alpha, &mut st.initialization)?;
    for row in 0..n {
        state = state.update(h.row(row), &mut st.initialization)?;
    }
    let mut f = state.psqrt;

    let mut active: Vec<usize> = (0..m).collect();
    let mut x = problem.received.clone();
    let mut norms = f.row_norms_sqr(&mut st.ordering);

    while !active.is_empty() {
        let k = active.len();
        let i = argmin(&norms);
        f.move_row_to_end(i);
        let antenna = active.remove(i);
        active.push(antenna);
        norms.remove(i);

        let split = block_upper_triangularize_dense(&f, mode, &mut st.triangularization)?;
        out.per_step_rotations.push(split.transforms);

        let z: Vec<C64> = active
            .iter()
            .map(|&a| (0..n).fold(ZERO, |acc, r| acc + h[(r, a)].conj() * x[r]))
            .collect();
        st.estimation.mul(k * n);
        st.estimation.add(k * (n - 1));
        let est = estimate(
            &split.u,
            split.lambda,
            &z[..k - 1],
            z[k - 1],
            &mut st.estimation,
        );
        let (index, decision) = problem.constellation.slice(est);
        out.record(antenna, est, index, decision);

        let a = feedback.value(antenna, decision);
        for (r, xr) in x.iter_mut().enumerate() {
            *xr -= h[(r, antenna)] * a;
        }
        st.cancellation.mul(n);
        st.cancellation.add(n);
        active.pop();

        for (nrm, u) in norms.iter_mut().zip(&split.u) {
            *nrm -= u.norm_sqr();
        }
        st.ordering.mul(k - 1);
        st.ordering.add(k - 1);

        f = split.next;
    }
    Ok(out.finish(st))
}

/// Dense inverse through nalgebra's LU, independent of this crate's factorizations.
pub fn dense_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = (a.rows(), a.cols());
    let mat = DMatrix::from_row_slice(rows, cols, a.as_slice());
    let inv = mat.try_inverse().ok_or(Error::SingularMatrix)?;
    let out = ComplexMatrix::from_fn(rows, cols, |r, c| inv[(r, c)]);
    if !out.is_finite() {
        return Err(Error::SingularMatrix);
    }
    Ok(out)
}

/// Brute-force reference: re-inverts the deflated Gram matrix at every step.
pub fn detect_oracle(problem: &DetectionProblem) -> Result<DetectionResult> {
    detect_oracle_with(problem, &Feedback::Sliced)
}

pub fn detect_oracle_with(
    problem: &DetectionProblem,
    feedback: &Feedback,
) -> Result<DetectionResult> {
    problem.validate()?;
    let m = problem.m();
    feedback.check(m)?;
    let h = &problem.channel;
    let mut out = DetectionResult::new(m);
    let mut active: Vec<usize> = (0..m).collect();
    let mut x = problem.received.clone();

    while !active.is_empty() {
        let k = active.len();
        let hk = h.select_columns(&active);
        let hk_adj = hk.adjoint();
        let mut gram = hk_adj.matmul(&hk);
        for j in 0..k {
            gram[(j, j)] += problem.alpha;
        }
        let p = dense_inverse(&gram)?;
        let diag: Vec<f64> = (0..k).map(|j| p[(j, j)].re).collect();
        let i = argmin(&diag);

        let xcol = ComplexMatrix::from_fn(x.len(), 1, |r, _| x[r]);
        let filtered = p.matmul(&hk_adj).matmul(&xcol);
        let est = filtered[(i, 0)];
        let (index, decision) = problem.constellation.slice(est);
        let antenna = active.remove(i);
        out.record(antenna, est, index, decision);
        out.per_step_rotations.push(0);

        let a = feedback.value(antenna, decision);
        for (r, xr) in x.iter_mut().enumerate() {
            *xr -= h[(r, antenna)] * a;
        }
    }
    Ok(out.finish(StageCounters::default()))
}

/// Detector selector used by the simulation harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorKind {
    Proposed,
    PreviousGivens,
    PreviousHouseholder,
    Oracle,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 4] = [
        DetectorKind::Proposed,
        DetectorKind::PreviousGivens,
        DetectorKind::PreviousHouseholder,
        DetectorKind::Oracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DetectorKind::Proposed => "proposed",
            DetectorKind::PreviousGivens => "previous_givens",
            DetectorKind::PreviousHouseholder => "previous_householder",
            DetectorKind::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown detector '{s}'")))
    }

    /// Whether the detector can run with `alpha = 0`.
    pub fn accepts_zero_alpha(&self) -> bool {
        matches!(self, DetectorKind::Proposed | DetectorKind::Oracle)
    }

    pub fn run(
        &self,
        problem: &DetectionProblem,
        assumed: &AssumedOrder,
        feedback: &Feedback,
    ) -> Result<DetectionResult> {
        match self {
            DetectorKind::Proposed => detect_proposed_with(problem, assumed, feedback),
            DetectorKind::PreviousGivens => {
                detect_previous_with(problem, TriangularizationMode::Givens, feedback)
            }
            DetectorKind::PreviousHouseholder => {
                detect_previous_with(problem, TriangularizationMode::Householder, feedback)
            }
            DetectorKind::Oracle => detect_oracle_with(problem, feedback),
        }
    }
}
