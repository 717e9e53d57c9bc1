use std::process::{Command, Output};

fn gasket(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gasket")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn exact_sum(values: &[&str]) -> (i128, i128) {
    values.iter().fold((0i128, 1i128), |(n, d), v| {
        let (p, q): (i128, i128) = v
            .split_once('/')
            .map_or_else(|| (v.parse().unwrap(), 1), |(p, q)| (p.parse().unwrap(), q.parse().unwrap()));
        let (n, d) = (n * q + p * d, d * q);
        let g = gcd(n.abs(), d);
        (n / g, d / g)
    })
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn verify_passes_for_small_dimensions() {
    for n in ["2", "3"] {
        let out = gasket(&["verify", "--dim", n]);
        let text = stdout(&out);
        assert!(out.status.success(), "{text}");
        assert!(!text.contains("FAIL"));
        assert!(text.contains("cone"));
    }
}

#[test]
fn verify_skips_cone_checks_when_unsupported() {
    let out = gasket(&["verify", "--dim", "5", "--depth", "4"]);
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("cone invariance: SKIPPED"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn corrupted_matrix_fails_verification() {
    let out = gasket(&["verify", "--corrupt"]);
    assert!(!out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("A_k") && l.contains("FAIL")), "{text}");
}

#[test]
fn profile_endpoints_match_corner_values() {
    let out = gasket(&["profile", "--u", "1,0,0", "--depth", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("t_num,t_den,t,density,density_exact\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 17);
    assert_eq!(r[0][4], "2/3");
    assert_eq!(r[16][4], "1/6");
}

#[test]
fn profiles_of_the_basis_sum_to_one() {
    let profiles: Vec<Vec<Vec<String>>> = ["1,0,0", "0,1,0", "0,0,1"]
        .iter()
        .map(|u| rows(&stdout(&gasket(&["profile", "--edge", "2:1:3", "--u", u, "--depth", "5"]))))
        .collect();
    for idx in 0..profiles[0].len() {
        let vals: Vec<&str> = profiles.iter().map(|p| p[idx][4].as_str()).collect();
        assert_eq!(exact_sum(&vals), (1, 1), "row {idx}");
    }
    let other = rows(&stdout(&gasket(&["profile", "--u", "0,1,-1", "--depth", "3"])));
    assert_eq!(other.len(), 9);
}

#[test]
fn depth_zero_gives_two_rows() {
    let out = gasket(&["profile", "--u", "0,1,-1", "--depth", "0", "--mode", "float"]);
    assert_eq!(rows(&stdout(&out)).len(), 2);
}

#[test]
fn cell_rows_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cells.csv");
    let out = gasket(&["profile", "--u", "1,0,0", "--cells", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("word,nu_h,nu,ratio\n"));
    assert_eq!(rows(&text).len(), 9);
}

#[test]
fn exact_output_is_byte_stable() {
    let args = ["profile", "--dim", "3", "--edge", "1:2:4", "--u", "1/3,-2,0.5,7", "--depth", "6"];
    assert_eq!(gasket(&args).stdout, gasket(&args).stdout);
}

fn slope(stderr: &[u8], key: &str) -> (f64, f64) {
    let text = String::from_utf8(stderr.to_vec()).unwrap();
    let line = text.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("{text}"));
    let nums: Vec<f64> = line.split([' ', '(', ')']).filter_map(|t| t.parse().ok()).collect();
    (nums[0], nums[1])
}

#[test]
fn symmetric_tail_slope() {
    let out = gasket(&["decay", "--mode", "float", "--u", "0.7,0.7,-2.1", "--n-max", "30"]);
    assert!(out.status.success());
    let (fit, predicted) = slope(&out.stderr, "ratio slope");
    assert!((fit / predicted - 1.0).abs() < 0.05);
    assert!((predicted + 2.0 * 3f64.ln()).abs() < 1e-5);
    let csv = stdout(&out);
    assert!(csv.starts_with("n,ratio,log_ratio\n"));
    assert_eq!(rows(&csv).len(), 31);
}

#[test]
fn constant_function_skips_fit() {
    let out = gasket(&["decay", "--u", "2,2,2", "--n-max", "6"]);
    assert!(out.status.success());
    assert!(rows(&stdout(&out)).iter().all(|r| r[1] == "0"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("fit skipped"));
}

#[test]
fn worst_gap_slope() {
    let out = gasket(&["decay", "--gaps", "--u", "1,0,-2", "--n-max", "12"]);
    assert!(out.status.success());
    let (fit, bound) = slope(&out.stderr, "gap slope");
    assert!(fit <= bound + 0.05 * bound.abs(), "{fit} vs {bound}");
}

#[test]
fn maxloc_grid_and_inverse() {
    for n in ["2", "3", "4"] {
        let r = rows(&stdout(&gasket(&["maxloc", "--dim", n, "--count", "21"])));
        let pivot = 1.0 / (n.parse::<f64>().unwrap() + 1.0);
        let vals: Vec<(f64, f64)> = r.iter().map(|x| (x[0].parse().unwrap(), x[1].parse().unwrap())).collect();
        let at = vals.iter().find(|(s, _)| (s - pivot).abs() < 1e-15).unwrap();
        assert!((at.1 - 0.75).abs() < 2f64.powi(-20));
        assert!(vals.windows(2).all(|w| w[1].1 < w[0].1));
        let inv = rows(&stdout(&gasket(&["maxloc", "--dim", n, "--inverse", "0.75"])));
        assert!((inv[0][1].parse::<f64>().unwrap() - pivot).abs() < 2f64.powi(-20));
    }
    assert!(!gasket(&["maxloc", "--inverse", "0.4"]).status.success());
}

#[test]
fn derham_profile_is_increasing() {
    let r = rows(&stdout(&gasket(&["derham", "--depth", "6"])));
    let vals: Vec<f64> = r.iter().map(|x| x[1].parse().unwrap()).collect();
    assert_eq!(vals.len(), 65);
    assert!((vals[0] - 0.5).abs() < 1e-9 && (vals[64] - 1.0).abs() < 1e-9);
    assert!(vals.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn cone_density_matches_corner_value() {
    // ω = 1^∞ lands on the corner p_1 of the edge cell
    let out = gasket(&["cone-density", "--u", "1,0,0", "--tail", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: f64 = text.lines().next().unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((value - 2.0 / 3.0).abs() < 1e-9, "{text}");
    assert!(!gasket(&["cone-density", "--dim", "4", "--u", "1,0,0,0,0", "--tail", "1"]).status.success());
}

#[test]
fn vanish_reports_a_small_ratio() {
    let out = gasket(&["vanish", "--mode", "float", "--u", "3,1,0", "--eps", "1e-4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let ratio: f64 = text.lines().find(|l| l.starts_with("ratio")).unwrap()[6..].parse().unwrap();
    assert!(ratio < 1e-4);
}

#[test]
fn malformed_input_is_rejected() {
    assert!(!gasket(&["profile", "--u", "1,x,0"]).status.success());
    assert!(!gasket(&["profile", "--u", "1,0"]).status.success());
    assert!(!gasket(&["verify", "--dim", "1"]).status.success());
    assert!(!gasket(&["profile", "--u", "1,0,0", "--mode", "quad"]).status.success());
}
