use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gcalabi(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcalabi"))
        .args(args)
        .current_dir(dir)
        .env_remove("GCALABI_SAMPLES")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

const TAN: &str = r#"
[surface]
family = "tan"
a = 1.0
h = "1"
H = "1/sqrt(2)"
x = [-0.5, 0.5]
y = [-0.5, 0.5]
z = [0.1, 0.7]

[verify]
samples = 10
seed = 7

[output]
report = "report.json"
"#;

#[test]
fn alpha_branches() {
    let dir = TempDir::new().unwrap();
    let o = gcalabi(&["alpha", "--D", "2", "--branch", "tan"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("α(z) = 2*tan(z)"));
    assert!(stdout(&o).contains("a = 1"));

    let o = gcalabi(&["alpha", "--D", "0"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("-2/z"));
    assert!(stdout(&o).contains("semi-symmetric"));

    let o = gcalabi(&["alpha", "--D", "2", "--branch", "coth"], dir.path());
    assert_eq!(code(&o), 2);

    let o = gcalabi(&["alpha", "--D", "-8", "--branch", "coth"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("a = 2"));
}

#[test]
fn build_verify_passes_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tan.toml", TAN);
    let o = gcalabi(&["build-verify", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = fs::read(dir.path().join("report.json")).unwrap();
    let report: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 14);

    let o = gcalabi(&["build-verify", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(first, fs::read(dir.path().join("report.json")).unwrap());
}

#[test]
fn flipped_potentials_fail_the_structure_equation() {
    let dir = TempDir::new().unwrap();
    let text = TAN
        .replace("h = \"1\"", "h = \"sqrt(2)*exp(x/4)\"")
        .replace("H = \"1/sqrt(2)\"", "H = \"exp(x/4)\"\nflip_potentials = true");
    let cfg = write(&dir, "flip.toml", &text);
    let o = gcalabi(&["build-verify", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("structure_eq_dtheta3"), "{}", stderr(&o));
}

#[test]
fn config_and_build_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "noh.toml", &TAN.replace("H = \"1/sqrt(2)\"", ""));
    let o = gcalabi(&["build-verify", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("surface.H"));

    let cfg = write(&dir, "bad.toml", &TAN.replace("h = \"1\"", "h = \"1 +\""));
    assert_eq!(code(&gcalabi(&["build-verify", cfg.to_str().unwrap()], dir.path())), 2);

    let coth = TAN.replace("\"tan\"", "\"coth\"").replace("[0.1, 0.7]", "[-1.0, -0.1]");
    let cfg = write(&dir, "coth.toml", &coth);
    let o = gcalabi(&["build-verify", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn sample_count_from_environment() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tan.toml", &TAN.replace("samples = 10\n", ""));
    let o = Command::new(env!("CARGO_BIN_EXE_gcalabi"))
        .args(["build-verify", cfg.to_str().unwrap()])
        .env("GCALABI_SAMPLES", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["samples"], 3);
}

#[test]
fn grid_backed_profile_is_flagged() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("x,y,H\n");
    for j in 0..9 {
        for i in 0..9 {
            csv.push_str(&format!("{},{},{}\n", -0.5 + i as f64 / 8.0, -0.5 + j as f64 / 8.0, 0.5f64.sqrt()));
        }
    }
    write(&dir, "H.csv", &csv);
    let cfg = write(&dir, "grid.toml", &TAN.replace("H = \"1/sqrt(2)\"", "H_grid = \"H.csv\""));
    let o = gcalabi(&["build-verify", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["surface"]["grid_backed"], true);
    assert!(report["grid_relaxation"]["tolerance"].as_f64().unwrap() > 1e-8);
    let qch = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "qch_quartic").unwrap();
    assert!(qch["detail"].as_str().unwrap().contains("grid-backed"));
    let kahler = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "kahler").unwrap();
    assert_eq!(kahler["pass"], true);
}

const PDE_TAN: &str = r#"
[surface]
family = "tan"
a = 1.0
h = "1"
x = [0.0, 1.0]
y = [0.0, 1.0]
z = [0.1, 0.7]

[pde]
n = [17]
tol = 1e-12
max_iter = 2
boundary = "constant-root"

[output]
solution = "u.csv"
solve_report = "solve.json"
"#;

#[test]
fn pde_constant_root() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "pde.toml", PDE_TAN);
    let o = gcalabi(&["pde", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&fs::read(dir.path().join("solve.json")).unwrap()).unwrap();
    assert!(report["solves"][0]["iterations"].as_u64().unwrap() <= 2);
    let u = fs::read_to_string(dir.path().join("u.csv")).unwrap();
    assert!(u.starts_with("x,y,u\n"));
    assert_eq!(u.lines().count(), 1 + 17 * 17);
    let root = 0.5 * 0.5f64.ln();
    for line in u.lines().skip(1) {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((v - root).abs() < 1e-12);
    }
}

#[test]
fn pde_stiff_coth_diverges() {
    let dir = TempDir::new().unwrap();
    let text = PDE_TAN
        .replace("\"tan\"", "\"coth\"")
        .replace("boundary = \"constant-root\"", "boundary = \"expr\"\nu = \"100\"")
        .replace("max_iter = 2", "max_iter = 5");
    let cfg = write(&dir, "stiff.toml", &text);
    let o = gcalabi(&["pde", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&fs::read(dir.path().join("solve.json")).unwrap()).unwrap();
    assert_eq!(report["solves"][0]["converged"], false);
    assert_eq!(report["solves"][0]["history"].as_array().unwrap().len(), 6);
}

fn manufactured(family: &str, h: &str) -> String {
    format!(
        r#"
[surface]
family = "{family}"
a = 2.0
h = "{h}"
x = [0.0, 3.141592653589793]
y = [0.0, 3.141592653589793]
z = [-1.0, -0.1]

[pde]
n = [33, 65]
tol = 1e-10
boundary = "expr"
u = "sin(x)*sin(y)"

[output]
solve_report = "solve.json"
"#
    )
}

#[test]
fn pde_manufactured_orders() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tanh.toml", &manufactured("tanh", "sqrt((2*sin(x)*sin(y) + 16*exp(2*sin(x)*sin(y)))/8)"));
    let o = gcalabi(&["pde", cfg.to_str().unwrap(), "--manufactured"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let err = stderr(&o);
    let line = err.lines().find(|l| l.starts_with("order N = 33 → 65: ")).unwrap();
    let q: f64 = line["order N = 33 → 65: ".len()..].split(' ').next().unwrap().parse().unwrap();
    assert!((q - 2.0).abs() < 0.1, "{line}");
    let report: Value = serde_json::from_slice(&fs::read(dir.path().join("solve.json")).unwrap()).unwrap();
    assert_eq!(report["orders"].as_array().unwrap().len(), 1);

    // indefinite linearization: pre-asymptotic on these grids
    let cfg = write(&dir, "tan.toml", &manufactured("tan", "sqrt((-2*sin(x)*sin(y) + 16*exp(2*sin(x)*sin(y)))/8)"));
    let o = gcalabi(&["pde", cfg.to_str().unwrap(), "--manufactured"], dir.path());
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("order N = 33 → 65"));
}

const CALABI: &str = r#"
[surface]
family = "calabi"
alpha = { kind = "constant", c = 2.0 }
h = "1"
potentials = "explicit"
l2 = "0"
n2 = "x"
x = [-0.5, 0.5]
y = [-0.5, 0.5]
z = [0.1, 1.0]
"#;

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn sample_fields() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "calabi.toml", CALABI);
    let o = gcalabi(&["sample", cfg.to_str().unwrap(), "--fields", "tau,alpha", "--grid", "3,3,3,1"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("x,y,z,t,tau,alpha\n"));
    let tau = column(&out, "tau");
    assert_eq!(tau.len(), 27);
    assert!(tau.iter().all(|v| (v + 24.0).abs() < 1e-9));

    let cfg = write(&dir, "tan.toml", TAN);
    let o = gcalabi(&["sample", cfg.to_str().unwrap(), "--fields", "alpha,theta3_dt"], dir.path());
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for (z, a) in column(&out, "z").iter().zip(column(&out, "alpha")) {
        assert!((a - 2.0 * z.tan()).abs() < 1e-12);
    }

    let o = gcalabi(&["sample", cfg.to_str().unwrap(), "--fields", "gamma5"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("available:") && stderr(&o).contains("ricci_11"));
}

#[test]
fn sample_volume_potential_calabi() {
    let dir = TempDir::new().unwrap();
    let text = CALABI
        .replace("h = \"1\"", "h = \"1 + x^2\"")
        .replace("potentials = \"explicit\"\nl2 = \"0\"\nn2 = \"x\"", "potentials = \"volume-potential\"");
    let cfg = write(&dir, "vol.toml", &(text + "\n[verify]\nsamples = 5\n"));
    let o = gcalabi(&["build-verify", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}
