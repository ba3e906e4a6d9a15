use std::process::{Command, Output};

fn widom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_widom")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn capacity_of_minus_two_two() {
    let o = widom(&["capacity", "--bands", "[-2,2]"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["capacity"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(widom(&["capacity", "--bands", "[-2,2]", "--tol", "1"]).status.code(), Some(2));
    assert_eq!(widom(&["capacity", "--bands", "[[0,1],[0.5,2]]"]).status.code(), Some(2));
    assert_eq!(widom(&["verify", "--jacobi", "0.3,0.3", "--p", "3", "--bound", "jacobi"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_three() {
    let atoms = r#"{"kind":{"type":"atomic"},"bands":[],"atoms":[{"location":0.1,"mass":0.5},{"location":0.9,"mass":0.5}]}"#;
    let o = widom(&["recurrence", "--measure", atoms, "--n", "5"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_lists_every_subcommand() {
    let help = stdout(&widom(&["--help"]));
    for cmd in [
        "capacity",
        "eqmeasure",
        "recurrence",
        "extremal",
        "entropy",
        "verify",
        "jacobi-scan",
        "sharpness",
        "isotorus",
        "cantor",
        "conjecture-scan",
    ] {
        assert!(help.contains(cmd), "{cmd} missing");
    }
}

#[test]
fn measure_json_round_trip_is_bitwise_stable() {
    let o = widom(&["isotorus", "--bands", "[[-1,-0.3],[0.2,1]]", "--gammas", "[-0.1]", "--flags", "[1]", "--n-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let measure = serde_json::to_string(&v["measure"]).unwrap();
    let path = std::env::temp_dir().join(format!("widom-measure-{}.json", std::process::id()));
    std::fs::write(&path, &measure).unwrap();
    let path = path.to_str().unwrap();
    let args = ["verify", "--measure", path, "--p", "2", "--n-max", "6", "--format", "csv"];
    let first = stdout(&widom(&args));
    let second = stdout(&widom(&["verify", "--measure", &measure, "--p", "2", "--n-max", "6", "--format", "csv"]));
    assert_eq!(first, second);
    assert_eq!(first.lines().count(), 7);
    let _ = std::fs::remove_file(path);
}

#[test]
fn jacobi_scan_rows() {
    let o = widom(&["jacobi-scan", "--alpha-grid", "-0.5:0.5:3", "--beta-grid", "0,2", "--n-max", "50"]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "alpha,beta,r1,l,min_r,regime");
    assert_eq!(lines.len(), 7);
}

#[test]
fn sharpness_ratios_decrease() {
    let out = stdout(&widom(&["sharpness", "--n", "2", "--p", "2", "--eps", "1e-1,1e-2,1e-3"]));
    let ratios: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 3);
    assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2] && ratios[2] > 1.0);
}

#[test]
fn extremal_output_fields() {
    let o = widom(&["extremal", "--bands", "[-1,1]", "--n", "4", "--p", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["widom_factor"].as_f64().unwrap() - 4.0 / std::f64::consts::PI).abs() < 1e-8);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 5);
}
