use std::path::Path;
use std::process::Command;

use invthresh_cli::run;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_invthresh"))
}

fn exit(args: &[&str]) -> i32 {
    bin().args(args).status().unwrap().code().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn table(file: &str) -> (Vec<String>, Vec<String>) {
    let text = std::fs::read_to_string(file).unwrap();
    let (h, body): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    (
        h.into_iter().map(str::to_owned).collect(),
        body.into_iter().map(str::to_owned).collect(),
    )
}

#[test]
fn construct_cache_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cache = path(dir.path(), "zeros.bin");
    let args = [
        "construct",
        "--delta1",
        "0.5773502691896258",
        "--levels",
        "6",
        "--cache",
        &cache,
        "--no-timestamp",
    ];
    assert_eq!(exit(&args), 0);
    let first = std::fs::read(&cache).unwrap();
    assert_eq!(exit(&args), 0);
    assert_eq!(std::fs::read(&cache).unwrap(), first);
    let (spec, w) = invthresh::cache::load(Path::new(&cache)).unwrap();
    assert_eq!(spec.rows().len(), 6);
    assert_eq!(w.v.len(), 6);
    assert_eq!(invthresh::cache::encode(&spec, &w), first);
}

#[test]
fn covering_on_cached_spec() {
    let dir = tempfile::tempdir().unwrap();
    let cache = path(dir.path(), "zeros.bin");
    let out = path(dir.path(), "cov.csv");
    assert_eq!(
        exit(&[
            "construct",
            "--delta1",
            "0.5773502691896258",
            "--levels",
            "6",
            "--cache",
            &cache
        ]),
        0
    );
    assert_eq!(
        exit(&[
            "verify-covering",
            "--cache",
            &cache,
            "--epsilon-offset",
            "1e-6",
            "--out",
            &out
        ]),
        0
    );
    let (h, body) = table(&out);
    assert!(h[0].starts_with("# invthresh "));
    assert!(h.iter().any(|l| l.starts_with("# spec_sha256 = ")));
    assert_eq!(body[0], "re,im,min_dist,pass");
    assert!(body[1].ends_with(",true"));
    assert_eq!(
        exit(&[
            "verify-covering",
            "--cache",
            &cache,
            "--epsilon-offset",
            "-1e-3",
            "--n-re",
            "60",
            "--n-im",
            "60",
            "--out",
            &out
        ]),
        2
    );
    let (_, body) = table(&out);
    assert!(body.len() > 2 && body[1].ends_with(",false"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exit(&["construct", "--alpha", "1", "--delta1", "0.5"]), 1);
    assert_eq!(exit(&["construct", "--alpha", "-1"]), 1);
    assert_eq!(exit(&["construct", "--delta1", "1.5"]), 1);
    assert_eq!(exit(&["no-such-command"]), 1);
    assert_eq!(exit(&["witness", "--cache", &path(dir.path(), "missing.bin")]), 1);
    assert_eq!(exit(&["verify-bounds", "--stack", "adaptive", "--levels", "2"]), 1);
    let cfg = path(dir.path(), "bad.toml");
    std::fs::write(&cfg, "alpha = 1.0\nnot_a_key = 3\n").unwrap();
    assert_eq!(exit(&["--config", &cfg, "witness"]), 1);
    std::fs::write(&cfg, "delta1 = 0.5\n").unwrap();
    assert_eq!(exit(&["--config", &cfg, "witness", "--alpha", "1"]), 1);
    assert_eq!(run(["invthresh", "--version"]), 0);
}

#[test]
fn damaged_or_foreign_cache_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = path(dir.path(), "zeros.bin");
    assert_eq!(exit(&["construct", "--levels", "3", "--cache", &cache]), 0);
    let mut bytes = std::fs::read(&cache).unwrap();
    bytes[8] ^= 0xff;
    std::fs::write(&cache, &bytes).unwrap();
    let out = bin().args(["witness", "--cache", &cache]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.toml");
    std::fs::write(&cfg, "alpha = 1.0\nlevels = 3\nrho = 2.0\n").unwrap();
    let out = path(dir.path(), "w.csv");
    assert_eq!(
        exit(&[
            "--config",
            &cfg,
            "witness",
            "--levels",
            "5",
            "--out",
            &out,
            "--no-timestamp"
        ]),
        0
    );
    let (h, body) = table(&out);
    assert!(h.contains(&"# levels = 5".to_owned()));
    assert!(h.contains(&"# rho = 2.0".to_owned()));
    assert_eq!(body[0], "n,re,im,modulus_lo,modulus_hi,divergence,min_dist");
    assert_eq!(body.len(), 6);
}

#[test]
fn output_does_not_depend_on_threads() {
    let mut files = Vec::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (t, dir) in ["1", "4"].into_iter().zip(&dirs) {
        // same file name so the echoed config matches
        let args = [
            "sweep-c1",
            "--n-list",
            "10,30",
            "--delta-list",
            "0.6,0.8,1",
            "--threads",
            t,
            "--no-timestamp",
            "--out",
            "s.csv",
        ];
        assert!(bin().args(args).current_dir(dir.path()).status().unwrap().success());
        files.push(std::fs::read_to_string(dir.path().join("s.csv")).unwrap());
    }
    assert!(files[0] == files[1], "outputs differ:\n{}\n{}", files[0], files[1]);
    assert!(files[0].contains("\ndelta,N,sigma_min,inverse_norm,eta,c1_upper,gram_condition\n"));
    assert!(!files[0].contains("generated_unix"));
}

#[test]
fn timestamp_line_is_optional() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.csv");
    let b = path(dir.path(), "b.csv");
    assert_eq!(exit(&["ric-demo", "--j-list", "3,6", "--out", &a]), 0);
    assert_eq!(exit(&["ric-demo", "--j-list", "3,6", "--out", &b, "--no-timestamp"]), 0);
    let (ha, ba) = table(&a);
    let (hb, bb) = table(&b);
    assert_eq!(ba, bb);
    assert_eq!(bb[0], "r,J,best_value,partitions_searched");
    let stripped: Vec<_> = ha.into_iter().filter(|l| !l.starts_with("# generated_unix")).collect();
    // the header echoes the output path, which differs between the runs
    assert_eq!(stripped.len(), hb.len());
}

#[test]
fn figure1_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "fig1.csv");
    assert_eq!(
        exit(&["figure1", "--alpha", "1", "--rho", "1", "--levels", "4", "--out", &out]),
        0
    );
    let (_, body) = table(&out);
    assert_eq!(body[0], "level,k,re,im");
    assert_eq!(body.len(), 1 + 4 * 8);
    // level 0, k = 0 is (1 + i)
    assert!(body.contains(&"0,0,1.0000000000000000e0,1.0000000000000000e0".to_owned()));
    let (_, circles) = table(&path(dir.path(), "fig1.circles.csv"));
    assert_eq!(circles[0], "lambda_re,lambda_im,center_re,center_im,radius");
    assert_eq!(circles.len(), 5);
}

#[test]
fn verify_bounds_passes_on_uniform_stack() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "b.csv");
    assert_eq!(
        exit(&["verify-bounds", "--levels", "6", "--n-points", "500", "--out", &out]),
        0
    );
    let (_, body) = table(&out);
    assert_eq!(body.len(), 501);
    assert!(body[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn corona_and_gmn_emit_one_row_per_request() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "g.csv");
    assert_eq!(
        exit(&[
            "gmn",
            "--epsilon-list",
            "0.3,0.5,0.57",
            "--n-re",
            "30",
            "--n-im",
            "30",
            "--out",
            &out
        ]),
        0
    );
    assert_eq!(table(&out).1.len(), 4);
    assert_eq!(exit(&["corona", "--n-re", "30", "--n-im", "30", "--out", &out]), 0);
    let (_, body) = table(&out);
    assert_eq!(body[0], "delta,f_zeros,eta,re,im");
    assert_eq!(body.len(), 2);
}
