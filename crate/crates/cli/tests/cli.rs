use std::io::Write;
use std::process::{Command, Output};

fn borel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_borel")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn coeffs(o: &Output) -> Vec<String> {
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json output");
    v["coeffs"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect()
}

#[test]
fn bender_wu_series_to_sixth_order() {
    let o = borel(&["series", "bender-wu", "--order", "6"]);
    assert!(o.status.success());
    assert_eq!(
        coeffs(&o),
        ["1/1", "3/4", "-21/16", "333/64", "-30885/1024", "916731/4096", "-65518401/32768"]
    );
}

#[test]
fn semiclassical_series_to_sixth_order() {
    let o = borel(&["series", "semiclassical", "--order", "6"]);
    assert!(o.status.success());
    assert_eq!(
        coeffs(&o),
        ["1/1", "5/8", "-35/32", "2555/512", "-69545/2048", "4849705/16384", "-202337485/65536"]
    );
}

#[test]
fn ground_state_has_no_excited_correction() {
    let o = borel(&["series", "excited", "--q", "0", "--order", "8"]);
    assert!(o.status.success());
    assert!(coeffs(&o).iter().all(|c| c == "0/1"));
}

#[test]
fn series_csv_output() {
    let o = borel(&["--format", "csv", "series", "excited", "--q", "1", "--order", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,coeff");
    assert_eq!(lines[2], "1,-2/1");
}

#[test]
fn ratio_plot_has_one_row_per_order() {
    let o = borel(&["diagnose", "ratio-plot", "--order", "100"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("n,ratio"));
    assert_eq!(out.lines().count(), 100);
    assert_eq!(out.lines().nth(1), Some("1,1.75"));
}

#[test]
fn test_function_value() {
    let o = borel(&["poles", "test-function"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let text = v.to_string();
    assert!(text.contains("0.7345") && text.contains("0.4301"), "{text}");
}

#[test]
fn output_file_is_written() {
    let dir = std::env::temp_dir().join(format!("borel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bw.json");
    let o = borel(&["--out", path.to_str().unwrap(), "series", "bender-wu", "--order", "2"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("-21/16"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_argument_is_usage_error() {
    let o = borel(&["resum", "--expansion", "g"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn unknown_config_field_is_rejected() {
    let mut f = tempfile();
    writeln!(f.1, "{{\"bogus\": 1}}").unwrap();
    let o = borel(&["--config", f.0.to_str().unwrap(), "series", "bender-wu", "--order", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    std::fs::remove_file(&f.0).ok();
}

#[test]
fn missing_config_file_is_io_error() {
    let o = borel(&["--config", "/nonexistent/borel.json", "series", "bender-wu", "--order", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

fn tempfile() -> (std::path::PathBuf, std::fs::File) {
    let p = std::env::temp_dir().join(format!("borel-cfg-{}.json", std::process::id()));
    let f = std::fs::File::create(&p).unwrap();
    (p, f)
}
