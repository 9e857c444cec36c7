use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SAMPLE: &str = include_str!("../../core/tests/fixtures/sample.tsv");

fn tarc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tarc")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = tarc(args, cwd);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str], cwd: &Path) -> i32 {
    let out = tarc(args, cwd);
    assert!(!out.stderr.is_empty(), "failures explain themselves on stderr");
    out.status.code().unwrap()
}

/// The sample sentence as paragraphs 1..=n, optionally without transcriptions.
fn corpus(n: u32, transcribed: bool) -> String {
    let mut lines = SAMPLE.lines();
    let mut out = format!("{}\n", lines.next().unwrap());
    let rows: Vec<&str> = lines.collect();
    for par in 1..=n {
        for row in &rows {
            let mut cells: Vec<String> = row.split('\t').map(String::from).collect();
            cells[2] = par.to_string();
            if !transcribed {
                cells[5] = "-".into();
            }
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
    }
    out
}

fn workspace() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_path_buf();
    fs::write(path.join("sample.tsv"), SAMPLE).unwrap();
    fs::write(path.join("gold.tsv"), corpus(10, true)).unwrap();
    fs::write(path.join("raw.tsv"), corpus(7, false)).unwrap();
    (dir, path)
}

#[test]
fn predict_after_training_on_the_fixture() {
    let (_dir, cwd) = workspace();
    assert_eq!(ok(&["predict", "--corpus", "sample.tsv", "--token", "kifech"], &cwd), "كيفاش\n");
    ok(&["train", "--corpus", "sample.tsv", "--model", "m.json"], &cwd);
    assert_eq!(ok(&["predict", "--model", "m.json", "kifech", "4orba"], &cwd), "كيفاش\nغربة\n");
    let json = ok(&["predict", "--model", "m.json", "--json", "kifech"], &cwd);
    let value: serde_json::Value = serde_json::from_str(json.trim()).unwrap();
    assert_eq!(value["morphemes"][0], "كيفاش");
}

#[test]
fn training_is_byte_reproducible() {
    let (_dir, cwd) = workspace();
    ok(&["train", "--corpus", "gold.tsv", "--model", "a.json"], &cwd);
    ok(&["train", "--corpus", "gold.tsv", "--model", "b.json"], &cwd);
    assert_eq!(fs::read(cwd.join("a.json")).unwrap(), fs::read(cwd.join("b.json")).unwrap());
}

#[test]
fn cv_is_deterministic() {
    let (_dir, cwd) = workspace();
    let args = ["cv", "--corpus", "gold.tsv", "--k", "10", "--seed", "42"];
    let first = ok(&args, &cwd);
    assert_eq!(ok(&args, &cwd), first);
    assert!(first.starts_with("k=10 seed=42 grouped=false\n"));
    assert_eq!(first.lines().filter(|l| l.starts_with("fold")).count(), 10);
    assert_eq!(ok(&["cv", "--corpus", "gold.tsv", "--k", "10"], &cwd), first, "seed defaults to 42");

    let grouped = ok(&["cv", "--corpus", "gold.tsv", "--k", "5", "--grouped", "--json"], &cwd);
    let report: serde_json::Value = serde_json::from_str(&grouped).unwrap();
    assert_eq!(report["grouped"], true);
    // six tokens per sentence, two sentences per fold
    assert!(report["folds"].as_array().unwrap().iter().all(|f| f["test_size"] == 12));
}

#[test]
fn config_file_and_flag_precedence() {
    let (_dir, cwd) = workspace();
    fs::write(cwd.join("tarc.toml"), "seed = 7\n[paths]\ncorpus = \"gold.tsv\"\n[transducer]\norder = 2\n").unwrap();
    let from_file = ok(&["--config", "tarc.toml", "cv", "--k", "5"], &cwd);
    assert!(from_file.starts_with("k=5 seed=7"));
    assert_eq!(from_file, ok(&["cv", "--corpus", "gold.tsv", "--k", "5", "--seed", "7"], &cwd));
    let flagged = ok(&["--config", "tarc.toml", "cv", "--k", "5", "--seed", "9"], &cwd);
    assert!(flagged.starts_with("k=5 seed=9"));

    fs::write(cwd.join("bad.toml"), "sed = 1\n").unwrap();
    assert_eq!(code(&["--config", "bad.toml", "cv"], &cwd), 3);
}

#[test]
fn text_tools() {
    let (_dir, cwd) = workspace();
    assert_eq!(ok(&["normalize", "bniiiiin"], &cwd), "bniiiiin\tbnin\t-\n");
    let segs = ok(&["segment", "manajemnech"], &cwd);
    assert!(segs.lines().any(|l| l == "manajemnech\tma(neg_prefix) najemne(stem) ch(neg_suffix)"));
    assert_eq!(ok(&["expand", "kifech", "--contains", "كيفاش"], &cwd), "true\n");
    let paths = ok(&["expand", "b", "--limit", "100"], &cwd);
    let lines: Vec<&str> = paths.lines().collect();
    assert_eq!(lines[0].parse::<usize>().unwrap(), lines.len() - 1);
}

#[test]
fn block_loop_partitions_and_retrains() {
    let (_dir, cwd) = workspace();
    ok(&["block", "init", "--store", "st", "--corpus", "raw.tsv", "--train", "sample.tsv"], &cwd);
    let mut ids = Vec::new();
    loop {
        let out = tarc(&["block", "make", "--store", "st", "--size", "25"], &cwd);
        if !out.status.success() {
            assert_eq!(out.status.code(), Some(5), "exhausted stream is a workflow error");
            break;
        }
        let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        ids.push(summary["id"].as_u64().unwrap().to_string());
    }
    // blocks concatenate back to the stream
    let mut joined = String::new();
    for id in &ids {
        let tsv = ok(&["block", "export", "--store", "st", "--id", id, "--format", "tsv"], &cwd);
        let mut lines = tsv.lines();
        if joined.is_empty() {
            joined.push_str(lines.next().unwrap());
            joined.push('\n');
        } else {
            lines.next();
        }
        for l in lines {
            joined.push_str(l);
            joined.push('\n');
        }
    }
    assert_eq!(joined, corpus(7, false));

    ok(&["block", "auto", "--store", "st", "--id", "1"], &cwd);
    assert_eq!(code(&["block", "auto", "--store", "st", "--id", "1"], &cwd), 5);
    let sheet = ok(&["block", "export", "--store", "st", "--id", "1"], &cwd);
    assert!(sheet.starts_with("key\tarabish\tpredicted\tfinal\n"));
    let edited: String = sheet
        .lines()
        .map(|l| if l.starts_with("3fE/150902/1/7\t") { l.replace("\tغربة\tغربة", "\tغربة\tغربه") } else { l.to_string() })
        .map(|l| l + "\n")
        .collect();
    fs::write(cwd.join("sheet.tsv"), edited).unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&ok(&["block", "import-corrections", "--store", "st", "--id", "1", "--file", "sheet.tsv"], &cwd))
            .unwrap();
    assert_eq!(summary["status"], "corrected");
    let tokens = summary["tokens"].as_u64().unwrap();
    assert_eq!(summary["accuracy"]["correct"].as_u64().unwrap(), tokens - 1);

    let listed = ok(&["block", "list", "--store", "st"], &cwd);
    assert!(listed.lines().next().unwrap().starts_with("1\tcorrected\t0\t"));

    let v2: serde_json::Value = serde_json::from_str(&ok(&["block", "retrain", "--store", "st"], &cwd)).unwrap();
    assert_eq!(v2["version"], 2);
    assert_eq!(v2["pairs"].as_u64().unwrap(), v2["previous_pairs"].as_u64().unwrap() + tokens);
    assert_eq!(code(&["block", "retrain", "--store", "st"], &cwd), 5);

    let exported = ok(&["export", "--store", "st"], &cwd);
    assert!(exported.lines().any(|l| l.starts_with("3fE\t150902\t1\t7\t4orba\tغربه\t")));
}

#[test]
fn ingest_raw_dumps() {
    let (_dir, cwd) = workspace();
    fs::create_dir(cwd.join("raw")).unwrap();
    fs::write(
        cwd.join("raw/a.txt"),
        "source: 3fE\ndate: 150902\ngender: M\nage: 1985\ncity: Bizerte\n\nkifech tchoufou l3icha\nfil 4orba?\n",
    )
    .unwrap();
    let tsv = ok(&["ingest", "--raw", "raw"], &cwd);
    let rows: Vec<&str> = tsv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], "3fE\t150902\t1\t1\tkifech\t-\t-\t-\t-\tBnz\t25-35\tM");
    assert_eq!(rows[3], "3fE\t150902\t2\t1\tfil\t-\t-\t-\t-\tBnz\t25-35\tM");
}

#[test]
fn exit_codes() {
    let (_dir, cwd) = workspace();
    assert_eq!(code(&["block", "list"], &cwd), 2);
    assert_eq!(code(&["predict", "kifech"], &cwd), 2);
    assert_eq!(code(&["no-such-command"], &cwd), 2);
    fs::write(cwd.join("broken.tsv"), "not a corpus\n").unwrap();
    assert_eq!(code(&["train", "--corpus", "broken.tsv", "--model", "m.json"], &cwd), 3);
    assert_eq!(code(&["predict", "--model", "missing.json", "x"], &cwd), 6);
    assert_eq!(code(&["--lambda", "3", "predict", "--corpus", "sample.tsv", "x"], &cwd), 2);
    assert_eq!(code(&["block", "list", "--store", "nowhere"], &cwd), 6);
}

#[test]
fn every_subcommand_has_help() {
    let (_dir, cwd) = workspace();
    for sub in [
        vec!["ingest"],
        vec!["normalize"],
        vec!["segment"],
        vec!["expand"],
        vec!["train"],
        vec!["predict"],
        vec!["cv"],
        vec!["block"],
        vec!["block", "make"],
        vec!["block", "auto"],
        vec!["block", "export"],
        vec!["block", "import-corrections"],
        vec!["serve"],
        vec!["export"],
    ] {
        let mut args = sub.clone();
        args.push("--help");
        let help = ok(&args, &cwd);
        assert!(help.contains("Usage: tarc"), "{sub:?}");
    }
}
