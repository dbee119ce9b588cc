use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use statecert::phase::build_tatarskij;
use statecert::{sample, GridSpec};
use statecert_cli::formats;
use tempfile::TempDir;

fn statecert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statecert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn report<'a>(doc: &'a Value, id: &str) -> &'a Value {
    doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["criterion"] == id)
        .unwrap_or_else(|| panic!("no {id} report"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn three_state_matrix_is_rejected_at_n_2() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("m.txt");
    let (a, b) = (2.0f64 / 3.0, -1.0f64 / 3.0);
    std::fs::write(&f, format!("dim 3\n{a:?} 0 0\n0 {a:?} 0\n0 0 {b:?}\n")).unwrap();
    let o = statecert(&["check", p(&f), "--json"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    let doc = json(&o);
    assert_eq!(doc["outcome"], "rejected");
    let b = report(&doc, "BINOMIAL_SUMS");
    assert_eq!(b["verdict"], "reject");
    assert_eq!(b["witness"], 2);
}

#[test]
fn fock_ground_state_is_pure() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("fock0.wgf");
    let g = statecert(&["gen", "fock", "--n", "0", "--points", "128", "--half-width", "8", "-o", p(&f)]);
    assert_eq!(code(&g), 0);
    let o = statecert(&["check", "--kind", "wigner", p(&f), "--criteria", "pure"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("pure: yes"));
}

#[test]
fn three_state_mixture_reports_five_thirds() {
    let o = statecert(&["check", "--kind", "mixture", "--coeffs", "2/3,2/3,-1/3"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("5/3 * (2 pi hbar)^-1"), "{}", stdout(&o));

    let o = statecert(&["check", "--kind", "mixture", "--coeffs", "2/3,2/3,-1/3", "--json"]);
    let doc = json(&o);
    assert_eq!(doc["exact"]["trace_sqrt"], "5/3");
    assert_eq!(doc["exact"]["binomial"][2], "-4/9");
    assert_eq!(doc["exact"]["limit"], "minus_infinity");
    assert_eq!(report(&doc, "W_BINOMIAL")["witness"], 2);
}

#[test]
fn first_excited_level_changes_sign_and_integrates_to_one() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("fock1.wgf");
    let g = statecert(&["gen", "fock", "--n", "1", "--points", "64", "--half-width", "7", "-o", p(&f)]);
    assert_eq!(code(&g), 0);
    let w = formats::parse_wigner_file(&f).unwrap();
    let min = w.values().iter().copied().fold(f64::INFINITY, f64::min);
    let max = w.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(min < 0.0 && max > 0.0);
    assert!((w.integral() - 1.0).abs() < 1e-6, "{}", w.integral());
}

#[test]
fn generated_density_matrix_is_certified() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("rho.txt");
    let g = statecert(&["gen", "density", "--dim", "8", "--seed", "7", "-o", p(&f)]);
    assert_eq!(code(&g), 0);
    assert!(std::fs::read_to_string(&f).unwrap().starts_with("# random density matrix, seed 7"));
    let o = statecert(&["check", p(&f), "--json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let doc = json(&o);
    assert_eq!(doc["is_state"], true);
    assert_eq!(doc["conflicting"].as_array().unwrap().len(), 0);

    // same seed, same file
    let f2 = dir.path().join("rho2.txt");
    statecert(&["gen", "density", "--dim", "8", "--seed", "7", "-o", p(&f2)]);
    assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(&f2).unwrap());
}

#[test]
fn generated_tatarskij_grid_matches_library() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("t.wgf");
    let g = statecert(&["gen", "tatarskij", "--points", "64", "--half-width", "7", "-o", p(&f)]);
    assert_eq!(code(&g), 0);
    let from_file = formats::parse_wigner_file(&f).unwrap();
    let direct = build_tatarskij::<f64>(GridSpec::square(7.0, 64, 1.0)).unwrap();
    assert_eq!(from_file, direct);
}

#[test]
fn json_is_deterministic_and_report_round_trips() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("rho.txt");
    statecert(&["gen", "density", "--dim", "4", "--seed", "1", "-o", p(&f)]);
    let a = statecert(&["check", p(&f), "--json"]);
    let b = statecert(&["check", p(&f), "--json"]);
    assert_eq!(a.stdout, b.stdout);

    let j = dir.path().join("r.json");
    std::fs::write(&j, &a.stdout).unwrap();
    let again = statecert(&["report", p(&j), "--format", "json"]);
    assert_eq!(code(&again), code(&a));
    assert_eq!(again.stdout, a.stdout);

    let text = statecert(&["report", p(&j)]);
    assert!(stdout(&text).starts_with("CERTIFIED"));
    let csv = statecert(&["report", p(&j), "--format", "csv"]);
    assert!(stdout(&csv).starts_with("criterion,index,value\n"));
}

#[test]
fn random_matrix_file_round_trips_bit_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = sample::random_complex(&mut rng, 5);
    let text = formats::write_matrix_string(&m);
    let back = formats::parse_matrix_str(&text).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(m[(i, j)].re.to_bits(), back[(i, j)].re.to_bits());
            assert_eq!(m[(i, j)].im.to_bits(), back[(i, j)].im.to_bits());
        }
    }
}

#[test]
fn input_errors_exit_with_3() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "dim 2\n1 0\n0 x\n").unwrap();
    let o = statecert(&["check", p(&bad)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3, column 3"));

    assert_eq!(code(&statecert(&["check", p(&dir.path().join("missing.txt"))])), 3);
    assert_eq!(code(&statecert(&["check", "--no-such-flag"])), 3);
    assert_eq!(code(&statecert(&["check", "--kind", "mixture"])), 3);
    assert_eq!(code(&statecert(&["check", "--kind", "wigner", p(&bad)])), 3);
}

#[test]
fn kernel_projector_is_certified_pure() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("k.txt");
    let g = statecert(&["gen", "kernel", "--n", "1", "--points", "65", "-o", p(&f)]);
    assert_eq!(code(&g), 0);
    let o = statecert(&["check", "--kind", "kernel", p(&f), "--criteria", "def2,pure"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("pure: yes"));
}
