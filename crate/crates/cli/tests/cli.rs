use std::path::Path;
use std::process::{Command, Output};

fn projlin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projlin"))
        .args(args)
        .env_remove("PROJLIN_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn expected_star() {
    let out = projlin(&["expected", "--tree", "0 1 1 1 1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "8\n");
}

#[test]
fn expected_options() {
    let tree = "2 3 0 3 2 7 5 4";
    assert_eq!(stdout(&projlin(&["expected", "--tree", tree])), "44/3\n");
    assert_eq!(stdout(&projlin(&["expected", "--tree", tree, "--method", "recurrence"])), "44/3\n");
    assert_eq!(stdout(&projlin(&["expected", "--tree", tree, "--variant", "minus_one"])), "23/3\n");
    assert_eq!(stdout(&projlin(&["expected", "--tree", tree, "--decimal", "4"])), "14.6667\n");
}

#[test]
fn tree_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tree.txt");
    std::fs::write(&path, "0 1\n2 3\n").unwrap();
    let out = projlin(&["count", "--tree-file", path.to_str().unwrap()]);
    assert_eq!(stdout(&out), "8\n");
}

#[test]
fn count_path() {
    let out = projlin(&["count", "--tree", "0 1 2 3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "8\n");
}

#[test]
fn minima_row() {
    let out = projlin(&["minima", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("4, 9/2, 2, "), "{}", stdout(&out));
    let all = stdout(&projlin(&["minima", "--n", "13", "--all"]));
    let lines: Vec<&str> = all.lines().collect();
    assert_eq!(lines.len(), 13);
    assert!(lines[12].starts_with("13, 85/3, 2, "));
}

#[test]
fn maxima_and_classes() {
    assert_eq!(stdout(&projlin(&["maxima", "--n", "5"])), "8, 0 1 1 1 1\n");
    assert_eq!(stdout(&projlin(&["classes", "--class", "linear_k", "--n", "6", "--k", "2"])), "48, 26/3\n");
    assert_eq!(stdout(&projlin(&["classes", "--class", "qstar_bridge", "--n", "6"])), "144, 61/6\n");
}

#[test]
fn enumerate_lists_every_arrangement() {
    let out = stdout(&projlin(&["enumerate", "--tree", "0 1 2"]));
    let mut lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    lines.sort();
    assert_eq!(lines, ["1 2 3", "1 3 2", "2 3 1", "3 2 1"]);
}

#[test]
fn sampling_is_deterministic() {
    let args = ["sample", "--tree", "4 4 4 0 4 4 6 6", "--z", "50", "--seed", "17"];
    let a = projlin(&args);
    let b = projlin(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 50);
    let c = projlin(&["sample", "--tree", "4 4 4 0 4 4 6 6", "--z", "50", "--seed", "18"]);
    assert_ne!(a.stdout, c.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_projlin"))
        .args(["sample", "--tree", "4 4 4 0 4 4 6 6", "--z", "50"])
        .env("PROJLIN_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);

    let mean = stdout(&projlin(&["sample", "--tree", "0 1", "--z", "10", "--mean"]));
    assert_eq!(mean, "1\n");
}

#[test]
fn exit_codes() {
    let usage = projlin(&["expected"]);
    assert_eq!(usage.status.code(), Some(1));
    let both = projlin(&["count", "--tree", "0", "--tree-file", "x"]);
    assert_eq!(both.status.code(), Some(1));
    assert_eq!(projlin(&["--help"]).status.code(), Some(0));

    let invalid = projlin(&["expected", "--tree", "2 1"]);
    assert_eq!(invalid.status.code(), Some(2));
    assert!(stderr(&invalid).contains("NoRoot"), "{}", stderr(&invalid));
    let class = projlin(&["classes", "--class", "qstar_hub", "--n", "3"]);
    assert_eq!(class.status.code(), Some(2));
    assert!(stderr(&class).contains("UnsupportedSize"));
    let zero = projlin(&["sample", "--tree", "0 1", "--z", "0"]);
    assert_eq!(zero.status.code(), Some(2));
    assert!(stderr(&zero).contains("ZeroSamples"));

    let cap = projlin(&["enumerate", "--tree", "0 1 1 1", "--cap", "5"]);
    assert_eq!(cap.status.code(), Some(3));
    assert!(stderr(&cap).contains("CapExceeded"));
    let minima = projlin(&["minima", "--n", "25"]);
    assert_eq!(minima.status.code(), Some(3));
}

fn write_corpus(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("corpus.conllu");
    let text = "# sent_id = a\n\
        1\tYou\tyou\tPRON\t_\t_\t2\tnsubj\t_\t_\n\
        2\tbrought\tbring\tVERB\t_\t_\t0\troot\t_\t_\n\
        3\tyour\tyour\tPRON\t_\t_\t4\tdet\t_\t_\n\
        4\tdog\tdog\tNOUN\t_\t_\t2\tobj\t_\t_\n\
        5\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n\
        \n\
        # sent_id = broken\n\
        1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n\
        2\ty\ty\tX\t_\t_\t0\troot\t_\t_\n\
        \n";
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn analyze_writes_both_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path());
    let sentences = dir.path().join("s.csv");
    let summary = dir.path().join("m.csv");
    let run = |filter: bool| {
        let mut args = vec![
            "analyze",
            "--input",
            input.to_str().unwrap(),
            "--z",
            "10,100",
            "--seed",
            "3",
            "--sentences-out",
            sentences.to_str().unwrap(),
            "--summary-out",
            summary.to_str().unwrap(),
        ];
        if filter {
            args.push("--filter-punct");
        }
        let out = projlin(&args);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(stderr(&out).contains("MultipleRoots"));
        (
            std::fs::read_to_string(&sentences).unwrap(),
            std::fs::read_to_string(&summary).unwrap(),
        )
    };
    let (rows, stats) = run(false);
    let rows: Vec<&str> = rows.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("sentence_id,n,observed_d_standard"));
    assert!(rows[1].starts_with("a,5,7,3,true,"), "{}", rows[1]);
    assert_eq!(stats.lines().count(), 3);
    assert!(stats.starts_with("z,n,count,mean_err,ci_low,ci_high,min_err,max_err\n"));

    let (rows, _) = run(true);
    assert!(rows.lines().nth(1).unwrap().starts_with("a,4,4,1,true,"));

    let (again, _) = run(true);
    assert_eq!(again, rows);
}

#[test]
fn selfcheck_passes() {
    let out = projlin(&["selfcheck", "--max-n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
    assert_eq!(text.lines().count(), 8);
}
