use std::path::Path;
use std::process::{Command, Output};

use fdl_core::io::read_poly_json;

fn fdl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdl"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("FDL_THREADS")
        .output()
        .expect("spawn fdl")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn build_lp_writes_valid_poly_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdl(dir.path(), &["build-lp", "--p", "2", "--jmax", "10", "--out", "g.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let g = read_poly_json(dir.path().join("g.json")).unwrap();
    assert_eq!(g.degree(), 2 * 10 * (1 << 11) - 1);
    let m: serde_json::Value = serde_json::from_str(&read(dir.path().join("manifest.json"))).unwrap();
    assert_eq!(m["config"]["command"], "build-lp");
    assert_eq!(m["config"]["jmax"], 10);
    assert_eq!(m["exit_code"], 0);
    assert!(m["versions"]["fdl_core"].is_string());
    assert!(m["timings"]["total_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn verify_fejer_reports_u8() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdl(dir.path(), &["verify", "fejer", "--n", "8", "--delta", "1"]);
    assert_eq!(code(&o), 0);
    let csv = read(dir.path().join("fejer.csv"));
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "u_n").unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let u: f64 = cols[col].parse().unwrap();
        assert!((u - 0.2496).abs() < 1e-3);
        assert_eq!(*cols.last().unwrap(), "true");
    }
    assert!(!csv.contains('\r'));
}

#[test]
fn spectrum_pipeline_with_plot_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        assert_eq!(code(&fdl(dir, &["build-lp", "--p", "2", "--jmax", "6", "--out", "g.json"])), 0);
        let input = dir.join("g.json");
        let o = fdl(
            dir,
            &["spectrum", "--in", input.to_str().unwrap(), "--mode", "lp", "--p", "2", "--grid", "1024", "--N", "max", "--plot", "spec.svg"],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["spectrum.csv", "spectrum.json", "spec.svg", "g.json"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let csv = read(a.path().join("spectrum.csv"));
    assert_eq!(csv.lines().next().unwrap(), "beta_center,half_width,count,dim,residual");
    assert_eq!(csv.lines().count(), 1 + 6);
    let svg = read(a.path().join("spec.svg"));
    assert!(svg.starts_with("<svg") && svg.contains(r#"class="reference""#) && svg.contains("stroke-dasharray"));
    let doc: serde_json::Value = serde_json::from_str(&read(a.path().join("spectrum.json"))).unwrap();
    assert_eq!(doc["reference"][0][1], 1.0);
    assert_eq!(doc["n_min"], 16);

    // re-rendering the JSON document reproduces the SVG
    let json = a.path().join("spectrum.json");
    assert_eq!(code(&fdl(a.path(), &["plot", "--in", json.to_str().unwrap(), "--out", "again.svg"])), 0);
    assert_eq!(read(a.path().join("again.svg")), svg);
}

#[test]
fn manifest_replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let o = fdl(&first, &["verify", "fejer", "--n", "32", "--delta", "2", "--trials", "5", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let replay = dir.path().join("replay");
    let manifest = first.join("manifest.json");
    let o = fdl(&replay, &["--manifest", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(first.join("fejer.csv")), read(replay.join("fejer.csv")));
    let m: serde_json::Value = serde_json::from_str(&read(replay.join("manifest.json"))).unwrap();
    assert_eq!(m["seed"], 7);

    let other = dir.path().join("other");
    assert_eq!(code(&fdl(&other, &["verify", "fejer", "--n", "32", "--delta", "2", "--trials", "5", "--seed", "8"])), 0);
    assert_ne!(read(first.join("fejer.csv")), read(other.join("fejer.csv")));
}

#[test]
fn failed_bound_exits_two_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdl(dir.path(), &["build-ct", "--beta", "0.5", "--delta", "0.3", "--k-min", "16", "--k-max", "16"]);
    assert_eq!(code(&o), 2);
    let block = dir.path().join("block.json");
    let doc: serde_json::Value = serde_json::from_str(&read(&block)).unwrap();
    assert_eq!(doc["spec"]["k"], 16);
    assert_eq!(doc["margin"]["flag"], false);

    let o = fdl(dir.path(), &["verify", "ct-bound", "--in", block.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let csv = read(dir.path().join("ct_bound.csv"));
    assert_eq!(csv.lines().next().unwrap(), "arc,x,abs_snp,threshold,holds");
    // at least 16 points in each of the 16 arcs
    assert!(csv.lines().count() > 16 * 16);
    let m: serde_json::Value = serde_json::from_str(&read(dir.path().join("manifest.json"))).unwrap();
    assert_eq!(m["exit_code"], 2);
}

#[test]
fn lp_jumps_and_geom() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdl(dir.path(), &["verify", "lp-jumps", "--p", "1.5", "--j", "5", "--samples-per-arc", "4"]);
    assert_eq!(code(&o), 0);
    let csv = read(dir.path().join("lp_jumps.csv"));
    assert_eq!(csv.lines().next().unwrap(), "J,j,x,n1,n2,gap,bound,holds");
    // arcs of I_{J,5} for J = 1..5: 2^{J-1} each
    assert_eq!(csv.lines().count() - 1, 4 * 31);

    let o = fdl(dir.path(), &["geom", "--family", "dyadic", "--j", "3"]);
    assert_eq!(code(&o), 0);
    let csv = read(dir.path().join("family.csv"));
    assert_eq!(csv.lines().count() - 1, 8);
    assert!(String::from_utf8_lossy(&o.stdout).contains("covers circle: true"));
}

#[test]
fn profile_reports_indices() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fdl(dir.path(), &["build-lp", "--p", "2", "--jmax", "5"])), 0);
    let g = dir.path().join("g.json");
    let o = fdl(dir.path(), &["profile", "--in", g.to_str().unwrap(), "--x", "0.25", "--N", "600"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let prof: serde_json::Value = serde_json::from_str(&read(dir.path().join("profile.json"))).unwrap();
    assert_eq!(prof["n_max"], 600);
    let csv = read(dir.path().join("profile.csv"));
    let maxima: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(maxima.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdl(dir.path(), &["build-lp", "--p", "2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--jmax"));

    let o = fdl(dir.path(), &["verify", "fejer", "--n", "8", "--delta", "1.5"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--delta"));

    let o = fdl(dir.path(), &["spectrum", "--in", "missing.json", "--mode", "ct"]);
    assert_eq!(code(&o), 1);

    let o = fdl(dir.path(), &["frobnicate"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn thread_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_fdl"))
            .args(["geom", "--family", "ikbeta", "--k", "8", "--beta", "0.5", "--out-dir"])
            .arg(dir.path())
            .env("FDL_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1")), 0);
    let m: serde_json::Value = serde_json::from_str(&read(dir.path().join("manifest.json"))).unwrap();
    assert_eq!(m["threads"], 1);
    assert_eq!(code(&run("many")), 1);
}
