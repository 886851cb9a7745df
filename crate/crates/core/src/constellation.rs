//! Unit-energy QAM alphabets with Gray labels.

use crate::error::{Error, Result};
use crate::matcore::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstellationKind {
    Qpsk,
    Qam16,
}

impl ConstellationKind {
    pub fn name(&self) -> &'static str {
        match self {
            ConstellationKind::Qpsk => "qpsk",
            ConstellationKind::Qam16 => "16qam",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" | "4qam" => Ok(ConstellationKind::Qpsk),
            "16qam" | "qam16" => Ok(ConstellationKind::Qam16),
            other => Err(Error::InvalidConfig(format!(
                "unknown constellation '{other}'"
            ))),
        }
    }
}

/// Symbol alphabet with average energy 1. Point `k` carries the Gray label `labels[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    points: Vec<C64>,
    labels: Vec<u8>,
}

/// Gray-coded amplitude levels for one axis, indexed by the axis bits.
fn gray_levels(bits: u32) -> Vec<f64> {
    let n = 1usize << bits;
    let mut levels = vec![0.0; n];
    for pos in 0..n {
        let gray = pos ^ (pos >> 1);
        levels[gray] = (2 * pos) as f64 - (n - 1) as f64;
    }
    levels
}

impl Constellation {
    pub fn new(kind: ConstellationKind) -> Self {
        let axis_bits = match kind {
            ConstellationKind::Qpsk => 1,
            ConstellationKind::Qam16 => 2,
        };
        let levels = gray_levels(axis_bits);
        let side = levels.len();
        // mean of level^2 per axis is (side^2 - 1) / 3
        let scale = (3.0 / (2 * (side * side - 1)) as f64).sqrt();
        let mut points = Vec::with_capacity(side * side);
        let mut labels = Vec::with_capacity(side * side);
        for label in 0..side * side {
            let i_bits = label >> axis_bits;
            let q_bits = label & (side - 1);
            points.push(C64::new(levels[i_bits] * scale, levels[q_bits] * scale));
            labels.push(label as u8);
        }
        Self {
            kind,
            points,
            labels,
        }
    }

    pub fn qpsk() -> Self {
        Self::new(ConstellationKind::Qpsk)
    }

    pub fn qam16() -> Self {
        Self::new(ConstellationKind::Qam16)
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, index: usize) -> C64 {
        self.points[index]
    }

    pub fn label(&self, index: usize) -> u8 {
        self.labels[index]
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.points.len().trailing_zeros()
    }

    /// Nearest point by Euclidean distance; ties go to the lowest index.
    pub fn slice(&self, estimate: C64) -> (usize, C64) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, p) in self.points.iter().enumerate() {
            let d = (estimate - p).norm_sqr();
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        (best, self.points[best])
    }
}

/// Hard decision for one estimate.
pub fn slice(estimate: C64, constellation: &Constellation) -> C64 {
    constellation.slice(estimate).1
}
