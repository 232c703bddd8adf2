use std::io::Write;
use std::process::{Command, Output, Stdio};

use longrun::core::rational::parse_rational;
use longrun::core::BigRational;

fn longrun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_longrun"))
        .args(args)
        .output()
        .unwrap()
}

fn longrun_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_longrun"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn table_csv_sums_to_one() {
    for n in [1usize, 2, 7, 33] {
        let out = longrun(&["table", "--n", &n.to_string(), "--format", "csv"]);
        assert!(out.status.success());
        let text = stdout(&out);
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("k,pmf_num,pmf_den,pmf,cdf_num,cdf_den,cdf")
        );
        let mut sum = BigRational::from_integer(0.into());
        let mut last_cdf = None;
        for line in lines {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 7);
            sum += parse_rational(&format!("{}/{}", cells[1], cells[2])).unwrap();
            let cdf = parse_rational(&format!("{}/{}", cells[4], cells[5])).unwrap();
            assert_eq!(cdf, sum);
            last_cdf = Some(cdf);
        }
        assert_eq!(sum, BigRational::from_integer(1.into()));
        assert_eq!(last_cdf, Some(BigRational::from_integer(1.into())));
    }
}

#[test]
fn riordan_table_json_carries_report() {
    let out = longrun(&[
        "table", "--n", "6", "--engine", "riordan", "--format", "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["engine"], "riordan");
    assert!(value["report"]["resolutions"]
        .as_array()
        .is_some_and(|r| !r.is_empty()));
    assert_eq!(
        value["report"]["mismatches"].as_array().map(Vec::len),
        Some(0)
    );
    let counting = longrun(&["table", "--n", "6", "--format", "json"]);
    let counting: serde_json::Value = serde_json::from_slice(&counting.stdout).unwrap();
    assert_eq!(value["rows"], counting["rows"]);
}

#[test]
fn test_command_reads_stdin_and_files() {
    let data = "x,residual\n5,-1\n1,1\n2,1\n3,1\n4,1\n";
    let out = longrun_stdin(&["test", "-", "--alpha", "1/4", "--format", "json"], data);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["statistic"]["l_n"], 4);
    assert_eq!(value["p_value"]["exact"], "3/16");
    assert_eq!(value["decision"], "reject");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fit.csv");
    std::fs::write(&path, "x,y,fitted\n1,2,1\n2,3,1\n3,0,1\n4,5,1\n").unwrap();
    let out = longrun(&["test", path.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn fail_on_reject_sets_exit_code() {
    let data = "x,residual\n1,1\n2,1\n3,1\n4,1\n5,-1\n";
    let out = longrun_stdin(&["test", "-", "--alpha", "1/4", "--fail-on-reject"], data);
    assert_eq!(out.status.code(), Some(1));
    let out = longrun_stdin(&["test", "-", "--alpha", "0.01", "--fail-on-reject"], data);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn input_errors_exit_2() {
    let out = longrun_stdin(&["test", "-"], "x,residual\n1,1\n2,oops\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    let out = longrun_stdin(&["test", "-"], "x,residual\n1,1\n2,0\n3,-1\n");
    assert_eq!(out.status.code(), Some(2));
    let out = longrun_stdin(
        &["test", "-", "--zero-policy", "drop"],
        "x,residual\n1,1\n2,0\n3,-1\n",
    );
    assert_eq!(out.status.code(), Some(0));
    let out = longrun(&["test", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_3() {
    for args in [
        &["critical", "--n", "10"][..],
        &["critical", "--n", "10", "--alpha", "1.5"],
        &["critical", "--n", "10", "--alpha", "abc"],
        &[
            "power", "--n", "10", "--p", "0.5", "--shift", "1", "--sigma", "1",
        ],
        &["power", "--n", "10", "--shift", "1"],
        &["power", "--n", "10", "--p", "1.2"],
        &["table", "--n", "5", "--precision", "0"],
        &["snk", "--n", "5", "--x", "0"],
        &["converge", "--p", "0.5", "--k", "5"],
        &["oracle", "--n", "30"],
        &["bogus"],
    ] {
        let out = longrun(args);
        assert_eq!(
            out.status.code(),
            Some(3),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty());
    }
    assert_eq!(longrun(&["--help"]).status.code(), Some(0));
    assert_eq!(longrun(&["--version"]).status.code(), Some(0));
}

#[test]
fn power_matches_hand_value() {
    let out = longrun(&[
        "power", "--n", "4", "--alpha", "3/8", "--p", "0.7", "--format", "json",
    ]);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["power"]["exact"], "2459/5000");
    assert_eq!(value["c"], 2);
    let out = longrun(&[
        "power", "--n", "20", "--alpha", "0.05", "--shift", "-0.5", "--sigma", "1", "--format",
        "json",
    ]);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["p_origin"]["kind"], "gaussian_shift");
    assert_eq!(value["p_origin"]["shift"], -0.5);
}

#[test]
fn snk_engines_agree() {
    for (n, x) in [(5, 2), (12, 3), (20, 7)] {
        let (n, x) = (n.to_string(), x.to_string());
        let dp = longrun(&["snk", "--n", &n, "--x", &x, "--format", "csv"]);
        let p1 = longrun(&[
            "snk",
            "--n",
            &n,
            "--x",
            &x,
            "--engine",
            "proposition1",
            "--format",
            "csv",
        ]);
        assert!(dp.status.success() && p1.status.success());
        assert_eq!(dp.stdout, p1.stdout);
    }
    let out = longrun(&["snk", "--n", "5", "--x", "2", "--format", "csv"]);
    assert_eq!(stdout(&out), "k,count\n0,0\n1,1\n2,7\n3,7\n4,1\n5,0\n");
}

#[test]
fn oracle_and_converge_csv_shapes() {
    let out = longrun(&["oracle", "--n", "4", "--format", "csv"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("k,l,count"));
    let total: u64 = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 16);

    let out = longrun(&[
        "converge", "--p", "0.7", "--k", "5", "--n-grid", "50,100", "--format", "csv",
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().collect::<Vec<_>>().len(), 3);
    assert!(text.starts_with("n,diff\n50,"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["table", "--n", "25", "--format", "json"][..],
        &[
            "power", "--n", "30", "--shift", "0.5", "--sigma", "1", "--format", "csv",
        ],
        &[
            "snk",
            "--n",
            "14",
            "--x",
            "3",
            "--engine",
            "proposition1",
            "--format",
            "json",
        ],
    ] {
        assert_eq!(longrun(args).stdout, longrun(args).stdout);
    }
}
