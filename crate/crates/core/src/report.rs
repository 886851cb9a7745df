//! CSV and Markdown renderings of harness results.
//!
//! Every CSV starts with a `# schema: <name>/<version>` line, optionally
//! followed by more `#` comment lines, then a header row. Floats carry 17
//! significant digits and complex values are split into `_re`/`_im` columns.

use std::fmt::Write as _;

use crate::detectors::{DetectionResult, DetectorKind};
use crate::error::{Error, Result};
use crate::flops::SpeedupReport;
use crate::matcore::C64;
use crate::simkit::{BenchReport, FactorizeReport, OfdmReport, SweepResult, RNG_DESCRIPTION};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Float(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
        }
    }

    fn markdown(&self) -> String {
        match self {
            Cell::Text(s) => s.replace('|', "\\|"),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.6e}"),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            _ => Err(Error::InvalidConfig(format!(
                "unknown format '{s}' (expected csv or md)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: &'static str,
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &'static str, header: &[&str]) -> Self {
        Self {
            schema,
            comments: Vec::new(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# schema: {}\n", self.schema);
        for c in &self.comments {
            writeln!(out, "# {c}").expect("writing to a String");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidConfig(format!("csv encoding failed: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidConfig(format!("csv encoding failed: {e}")))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("<!-- schema: {} -->\n\n", self.schema);
        for c in &self.comments {
            writeln!(out, "{c}  ").expect("writing to a String");
        }
        if !self.comments.is_empty() {
            out.push('\n');
        }
        writeln!(out, "| {} |", self.header.join(" | ")).expect("writing to a String");
        writeln!(out, "|{}", "---|".repeat(self.header.len())).expect("writing to a String");
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::markdown).collect();
            writeln!(out, "| {} |", cells.join(" | ")).expect("writing to a String");
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Markdown => Ok(self.to_markdown()),
        }
    }
}

fn one_based(order: &[usize]) -> String {
    order
        .iter()
        .map(|k| (k + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn factorize_table(rep: &FactorizeReport) -> Table {
    let mut t = Table::new(
        "vblast-factorize/1",
        &[
            "m",
            "n",
            "alpha",
            "method",
            "residual",
            "residual_dense",
            "cmul",
            "cadd",
            "cdiv",
            "csqrt",
            "predicted_cmul",
        ],
    );
    t.comment("residual = ||F F^H - R^-1||_F / ||R^-1||_F with R^-1 from the conventional factor; residual_dense uses an LU inverse");
    t.comment(
        "bordering cmul includes forming R = H^H H + alpha I; predicted_cmul = M^3/3 + M^2 N/2",
    );
    let fast = rep.gram + rep.fast;
    let conv = rep.gram + rep.conventional;
    for (method, residual, residual_dense, c) in [
        ("bordering", rep.residual, rep.residual_dense, fast),
        ("conventional", 0.0, rep.residual_conventional, conv),
    ] {
        t.push(vec![
            rep.m.into(),
            rep.n.into(),
            rep.alpha.into(),
            method.into(),
            residual.into(),
            residual_dense.into(),
            c.cmul.into(),
            c.cadd.into(),
            c.cdiv.into(),
            c.csqrt.into(),
            rep.predicted_cmul.into(),
        ]);
    }
    t
}

pub fn bench_table(rep: &BenchReport) -> Table {
    let mut t = Table::new(
        "vblast-bench/1",
        &[
            "m",
            "n",
            "algorithm",
            "regime",
            "trials",
            "measured_cmul",
            "measured_cadd",
            "measured_flops",
            "predicted_cmul",
            "predicted_cadd",
            "predicted_flops",
            "deviation_flops",
            "lower_order_per_m3",
            "exceeds_bound",
            "mean_rotations",
            "speedup_vs_proposed",
        ],
    );
    t.comment("flops = 6 cmul + 2 cadd; predicted values are leading-order terms only");
    t.comment(format!(
        "seed={} snr_db={} bound={} rng={RNG_DESCRIPTION}",
        rep.config.seed, rep.config.snr_db, rep.config.bound
    ));
    for r in &rep.rows {
        t.push(vec![
            r.m.into(),
            r.n.into(),
            r.algorithm.name().into(),
            r.regime.name().into(),
            rep.config.trials.into(),
            r.measured.cmul.into(),
            r.measured.cadd.into(),
            r.measured.flops.into(),
            r.predicted.cmul.into(),
            r.predicted.cadd.into(),
            r.predicted.flops.into(),
            r.deviation.flops.into(),
            r.deviation.lower_order_per_m3.into(),
            (if r.deviation.exceeds { "yes" } else { "no" }).into(),
            r.mean_rotations.into(),
            r.speedup_vs_proposed.into(),
        ]);
    }
    t
}

fn sweep_comments(t: &mut Table, res: &SweepResult) {
    let c = &res.config;
    t.comment(format!(
        "m={} n={} constellation={} trials={} seed={} order={} snr_db=10log10(1/sigma_w^2) alpha=sigma_w^2",
        c.m,
        c.n,
        c.constellation.name(),
        c.trials,
        c.seed,
        c.order.name()
    ));
    t.comment(format!("rng={RNG_DESCRIPTION}"));
}

pub fn sweep_table(res: &SweepResult) -> Table {
    let mut t = Table::new(
        "vblast-sweep/1",
        &[
            "snr_db",
            "detector",
            "symbol_errors",
            "symbols",
            "ser",
            "mean_cmul",
            "mean_cadd",
            "mean_flops",
        ],
    );
    sweep_comments(&mut t, res);
    for p in &res.points {
        for d in &p.per_detector {
            t.push(vec![
                p.snr_db.into(),
                d.kind.name().into(),
                d.symbol_errors.into(),
                d.symbols.into(),
                d.ser.into(),
                d.mean_flops.cmul.into(),
                d.mean_flops.cadd.into(),
                d.mean_flops.flops.into(),
            ]);
        }
    }
    t
}

/// SER curve of one detector, without anything that names the detector, so
/// curves of equivalent detectors can be compared byte for byte.
pub fn ser_curve_table(res: &SweepResult, kind: DetectorKind) -> Table {
    let mut t = Table::new(
        "vblast-ser-curve/1",
        &["snr_db", "symbol_errors", "symbols", "ser"],
    );
    sweep_comments(&mut t, res);
    for p in &res.points {
        if let Some(d) = p.per_detector.iter().find(|d| d.kind == kind) {
            t.push(vec![
                p.snr_db.into(),
                d.symbol_errors.into(),
                d.symbols.into(),
                d.ser.into(),
            ]);
        }
    }
    t
}

pub fn ofdm_table(rep: &OfdmReport) -> Table {
    let mut t = Table::new(
        "vblast-ofdm/1",
        &[
            "trial",
            "subcarrier",
            "rotations",
            "n3_cmul",
            "n3_cadd",
            "symbol_errors",
        ],
    );
    t.comment(format!(
        "m={} n={} snr_db={} subcarriers={} reuse={} rho={}",
        rep.m,
        rep.n,
        rep.snr_db,
        rep.config.subcarriers,
        rep.config.mode.name(),
        rep.config.rho
    ));
    t.comment(format!(
        "summary mean_rotations={:.16e} mean_n3_cmul={:.16e} mean_n3_cadd={:.16e} endpoint_cmul={:.16e} endpoint_cadd={:.16e} zero_rotation_fraction={:.16e}",
        rep.mean_rotations,
        rep.mean_n3.cmul,
        rep.mean_n3.cadd,
        rep.random_endpoint.cmul,
        rep.random_endpoint.cadd,
        rep.zero_rotation_fraction
    ));
    for r in &rep.records {
        t.push(vec![
            r.trial.into(),
            r.subcarrier.into(),
            r.rotations.into(),
            r.n3.cmul.into(),
            r.n3.cadd.into(),
            r.symbol_errors.into(),
        ]);
    }
    t
}

/// Step-by-step trace of one detection. The `order` comment lists antennas
/// 1-based, first detected first.
pub fn detect_table(
    detector: DetectorKind,
    result: &DetectionResult,
    sent: Option<&[C64]>,
) -> Table {
    let mut t = Table::new(
        "vblast-detect/1",
        &[
            "step",
            "antenna",
            "estimate_re",
            "estimate_im",
            "decision_re",
            "decision_im",
            "sent_re",
            "sent_im",
            "rotations",
        ],
    );
    t.comment(format!("detector={}", detector.name()));
    t.comment(format!("order: {}", one_based(&result.detection_order)));
    t.comment(format!(
        "counter: {} flops={}",
        result.counter,
        result.counter.flops()
    ));
    for (step, &a) in result.detection_order.iter().enumerate() {
        let est = result.estimates[a];
        let dec = result.decisions[a];
        let s = sent.map(|s| s[a]).unwrap_or(C64::new(f64::NAN, f64::NAN));
        t.push(vec![
            (step + 1).into(),
            (a + 1).into(),
            est.re.into(),
            est.im.into(),
            dec.re.into(),
            dec.im.into(),
            s.re.into(),
            s.im.into(),
            result.per_step_rotations[step].into(),
        ]);
    }
    t
}

pub fn speedup_table(rep: &SpeedupReport) -> Table {
    let mut t = Table::new(
        "vblast-speedup/1",
        &[
            "m",
            "n",
            "regime",
            "mul_speedup",
            "add_speedup",
            "flop_speedup",
        ],
    );
    t.comment("previous_givens over proposed from leading-order terms; flops = 6 cmul + 2 cadd");
    t.comment(format!(
        "worst_to_expected_flops={:.16e}",
        rep.worst_to_expected_flops
    ));
    for (name, s) in [
        ("expected_random_order", rep.random_order),
        ("expected_matched_order", rep.matched_order),
        ("worst_case", rep.worst_case),
    ] {
        t.push(vec![
            rep.m.into(),
            rep.n.into(),
            name.into(),
            s.mul.into(),
            s.add.into(),
            s.flops.into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo/1", &["a", "b", "c"]);
        t.comment("note");
        t.push(vec![Cell::from("x,y"), Cell::from(3usize), Cell::from(0.1)]);
        let csv = t.to_csv().unwrap();
        assert_eq!(
            csv,
            "# schema: demo/1\n# note\na,b,c\n\"x,y\",3,1.0000000000000001e-1\n"
        );
    }

    #[test]
    fn floats_round_trip() {
        for v in [
            0.1,
            1.0 / 3.0,
            6.02214076e23,
            -2.5e-300,
            std::f64::consts::PI,
        ] {
            let s = Cell::Float(v).csv();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn markdown_layout() {
        let mut t = Table::new("demo/1", &["a", "b"]);
        t.push(vec![Cell::from("p|q"), Cell::from(2.0)]);
        let md = t.to_markdown();
        assert!(
            md.contains("| a | b |\n|---|---|\n| p\\|q | 2.000000e0 |\n"),
            "{md}"
        );
    }

    #[test]
    fn format_parse() {
        assert_eq!(Format::parse("csv").unwrap(), Format::Csv);
        assert_eq!(Format::parse("md").unwrap(), Format::Markdown);
        assert!(Format::parse("json").is_err());
    }
}
