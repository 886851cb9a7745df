use std::process::{Command, Output};

fn vblast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vblast"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and data rows of a CSV report, comment lines dropped.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let data = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, data)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn factorize_reports_residual_and_divisions() {
    let o = vblast(&[
        "factorize",
        "--m",
        "4",
        "--n",
        "4",
        "--alpha",
        "0.1",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# schema: vblast-factorize/1\n"));
    let (h, data) = rows(&text);
    let res: f64 = data[0][column(&h, "residual")].parse().unwrap();
    assert!(res <= 1e-9);
    assert_eq!(data[0][column(&h, "cdiv")], "4");
    assert_eq!(data[1][column(&h, "cdiv")], "8");
}

#[test]
fn exit_codes() {
    assert_eq!(vblast(&["factorize", "--m", "0"]).status.code(), Some(2));
    let o = vblast(&[
        "factorize",
        "--m",
        "4",
        "--n",
        "6",
        "--alpha",
        "0",
        "--rank",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("3x3"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
    assert_eq!(vblast(&["bench", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(
        vblast(&["sweep", "--detectors", "zf"]).status.code(),
        Some(2)
    );
    assert_eq!(
        vblast(&["sweep", "--format", "json"]).status.code(),
        Some(2)
    );
    assert_eq!(vblast(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn detect_prints_an_order_line() {
    let o = vblast(&["detect", "--seed", "7", "--m", "4", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix("# order: "))
        .expect("order line");
    let mut order: Vec<usize> = line.split(' ').map(|s| s.parse().unwrap()).collect();
    order.sort();
    assert_eq!(order, vec![1, 2, 3, 4]);
    let (_, data) = rows(&text);
    assert_eq!(data.len(), 4);
}

#[test]
fn detectors_print_the_same_order() {
    let order = |d: &str| {
        let text = stdout(&vblast(&[
            "detect",
            "--seed",
            "11",
            "--m",
            "5",
            "--n",
            "6",
            "--detector",
            d,
        ]));
        text.lines()
            .find(|l| l.starts_with("# order: "))
            .unwrap()
            .to_string()
    };
    let p = order("proposed");
    for d in ["previous_givens", "previous_householder", "oracle"] {
        assert_eq!(order(d), p);
    }
}

#[test]
fn sweep_is_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = vblast(&[
            "sweep",
            "--trials",
            "200",
            "--seed",
            "5",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    let x = std::fs::read(&a).unwrap();
    assert_eq!(x, std::fs::read(&b).unwrap());
    let text = String::from_utf8(x).unwrap();
    let (h, data) = rows(&text);
    assert_eq!(data.len(), 16);
    // equivalent detectors share every error count
    let errors = column(&h, "symbol_errors");
    for chunk in data.chunks(4) {
        assert!(chunk.iter().all(|r| r[errors] == chunk[0][errors]));
    }
}

#[test]
fn ofdm_exact_reuse_on_identical_channels_needs_no_rotations() {
    let o = vblast(&[
        "ofdm",
        "--m",
        "4",
        "--trials",
        "3",
        "--subcarriers",
        "16",
        "--reuse",
        "exact",
        "--rho",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (h, data) = rows(&stdout(&o));
    let rot = column(&h, "rotations");
    assert_eq!(data.len(), 48);
    assert!(data.iter().all(|r| r[rot] == "0"));
}

#[test]
fn bench_speedups_at_sixteen() {
    let o = vblast(&[
        "bench",
        "--m",
        "16",
        "--trials",
        "100",
        "--regime",
        "random,matched",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (h, data) = rows(&stdout(&o));
    let (alg, reg, sp) = (
        column(&h, "algorithm"),
        column(&h, "regime"),
        column(&h, "speedup_vs_proposed"),
    );
    let get = |regime: &str| -> f64 {
        data.iter()
            .find(|r| r[alg] == "previous_givens" && r[reg] == regime)
            .unwrap()[sp]
            .parse()
            .unwrap()
    };
    assert!((3.1..=4.7).contains(&get("expected_random_order")));
    assert!((4.2..=6.2).contains(&get("expected_matched_order")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    std::fs::write(&cfg, "# tiny sweep\ntrials = 0\nsnr = 5,15\nm = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(vblast(&["sweep", "--config", c]).status.code(), Some(2));
    let o = vblast(&["sweep", "--config", c, "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, data) = rows(&stdout(&o));
    assert_eq!(data.len(), 8);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(vblast(&["sweep", "--config", c]).status.code(), Some(2));
    assert_eq!(
        vblast(&["sweep", "--config", "/nonexistent/x.conf"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn markdown_and_unwritable_output() {
    let o = vblast(&["speedup", "--format", "md"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("| m | n | regime |"));
    let o = vblast(&["speedup", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(2));
}
