mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use depbench::bench::{read_report, EnergyReading, EnergySource, RunRecord, SpeedReport};
use depbench::conllu::{parse_conllu, write_conllu};
use depbench::scoring::Paradigm;

fn depbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("toy.conllu", &write_conllu(&common::synthetic_treebank(10, 31)));
        f.write("dev.conllu", &write_conllu(&common::synthetic_treebank(5, 32)));
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn train(&self, paradigm: &str, out: &str, extra: &[&str]) -> Output {
        let mut args = vec![
            "train".to_string(),
            "--paradigm".into(),
            paradigm.into(),
            "--train".into(),
            self.arg("toy.conllu"),
            "--dev".into(),
            self.arg("dev.conllu"),
            "--out-dir".into(),
            self.arg(out),
            "--feature-bits".into(),
            "16".into(),
            "--max-epochs".into(),
            "4".into(),
            "--meter".into(),
            "constant".into(),
            "--watts".into(),
            "20".into(),
        ];
        args.extend(extra.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        depbench(&refs)
    }
}

#[test]
fn help_and_version_exit_zero() {
    let o = depbench(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for cmd in ["train", "parse", "eval", "stats", "bench", "pareto"] {
        assert!(stdout(&o).contains(cmd), "{cmd}");
    }
    assert_eq!(depbench(&["--version"]).status.code(), Some(0));
    assert_eq!(depbench(&["train", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(depbench(&[]).status.code(), Some(1));
    assert_eq!(depbench(&["train", "--no-such-flag"]).status.code(), Some(1));
    let f = Fixture::new();
    let o = depbench(&[
        "train",
        "--paradigm",
        "graph",
        "--train",
        &f.arg("toy.conllu"),
        "--dev",
        &f.arg("missing.conllu"),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("missing.conllu"));
    let o = depbench(&[
        "train",
        "--paradigm",
        "tree-adjoining",
        "--train",
        &f.arg("toy.conllu"),
        "--dev",
        &f.arg("dev.conllu"),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn train_writes_model_and_record() {
    let f = Fixture::new();
    let o = f.train("graph", "out", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(f.path("out/graph-b16-toy.model").is_file());
    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(f.path("out/graph-b16-toy.train.json")).unwrap()).unwrap();
    assert!(record["train_energy"]["joules"].as_f64().unwrap() >= 0.0);
    assert_eq!(record["train_energy"]["source"], "constant_power_model");
    assert!(record.get("generated_unix_s").is_none());
}

#[test]
fn training_is_reproducible_and_seeded() {
    let f = Fixture::new();
    for (out, seed) in [("a", "5"), ("b", "5"), ("c", "6")] {
        let o = f.train("transition", out, &["--seed", seed]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let model = |d: &str| fs::read(f.path(&format!("{d}/transition-b16-toy.model"))).unwrap();
    assert_eq!(model("a"), model("b"));
    let record = |d: &str| -> serde_json::Value {
        serde_json::from_str(&fs::read_to_string(f.path(&format!("{d}/transition-b16-toy.train.json"))).unwrap())
            .unwrap()
    };
    assert_eq!(record("a")["epochs"], record("b")["epochs"]);
    assert_eq!(record("c")["seed"], 6);
}

#[test]
fn unwritable_output_is_io_error() {
    let f = Fixture::new();
    f.write("blocker", "x");
    let o = f.train("seqlab", "blocker/sub", &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let f = Fixture::new();
    f.write(
        "run.cfg",
        "# defaults for this run\nfeature_bits = 12\nmax-epochs = 2\nmeter = constant\n",
    );
    let cfg = f.arg("run.cfg");
    let base = ["--config", &cfg, "train", "--paradigm", "graph"];
    let mut args: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    args.extend([
        "--train".into(),
        f.arg("toy.conllu"),
        "--dev".into(),
        f.arg("dev.conllu"),
    ]);
    args.extend(["--out-dir".into(), f.arg("cfg")]);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = depbench(&refs);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(f.path("cfg/graph-b12-toy.model").is_file());

    let mut with_flag = refs.clone();
    with_flag.extend(["--feature-bits", "14"]);
    assert_eq!(depbench(&with_flag).status.code(), Some(0));
    assert!(f.path("cfg/graph-b14-toy.model").is_file());
}

#[test]
fn parse_reproduces_memorised_gold() {
    let f = Fixture::new();
    let one = common::synthetic_treebank(1, 40);
    f.write("one.conllu", &write_conllu(&one));
    let o = depbench(&[
        "train",
        "--paradigm",
        "graph",
        "--train",
        &f.arg("one.conllu"),
        "--dev",
        &f.arg("one.conllu"),
        "--out-dir",
        &f.arg("m"),
        "--feature-bits",
        "16",
        "--meter",
        "constant",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let model = f.arg("m/graph-b16-one.model");

    // Blank out the gold columns, then parse.
    let mut blank = one.clone();
    for t in &mut blank[0].tokens {
        t.head = 0;
        t.deprel = "_".into();
    }
    f.write("blank.conllu", &write_conllu(&blank));
    let o = depbench(&[
        "parse",
        "--model",
        &model,
        "--input",
        &f.arg("blank.conllu"),
        "--paradigm",
        "graph",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let parsed = parse_conllu(&stdout(&o)).unwrap();
    assert_eq!(parsed, one);

    let o = depbench(&[
        "parse",
        "--model",
        &model,
        "--input",
        &f.arg("blank.conllu"),
        "--output",
        &f.arg("p.conllu"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = depbench(&["eval", "--gold", &f.arg("one.conllu"), "--pred", &f.arg("p.conllu")]);
    assert_eq!(stdout(&o).trim(), "UAS 100.00 LAS 100.00");

    let o = depbench(&[
        "parse",
        "--model",
        &model,
        "--input",
        &f.arg("blank.conllu"),
        "--paradigm",
        "seqlab",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("graph"));

    f.write("bad.conllu", "1\tword\t_\tNOUN\t_\t_\t0\troot\t_\t_\n2\tbroken line\n");
    let o = depbench(&["parse", "--model", &model, "--input", &f.arg("bad.conllu")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn eval_formats() {
    let f = Fixture::new();
    let gold = f.arg("toy.conllu");
    let o = depbench(&["eval", "--gold", &gold, "--pred", &gold]);
    assert_eq!(stdout(&o).trim(), "UAS 100.00 LAS 100.00");
    let o = depbench(&["eval", "--gold", &gold, "--pred", &gold, "--format", "tsv"]);
    assert!(stdout(&o).starts_with("100.00\t100.00\t"));
    let o = depbench(&[
        "eval", "--gold", &gold, "--pred", &gold, "--format", "json", "--punct", "exclude",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["punct_policy"], "exclude_upos_punct");
    let o = depbench(&["eval", "--gold", &gold, "--pred", &f.arg("dev.conllu")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stats_on_two_sentences() {
    let f = Fixture::new();
    f.write(
        "two.conllu",
        "1\tab\t_\tX\t_\t_\t0\troot\t_\t_\n2\tabcd\t_\tX\t_\t_\t1\tdep\t_\t_\n3\tc\t_\tX\t_\t_\t1\tdep\t_\t_\n\n\
         1\ta\t_\tX\t_\t_\t3\tdep\t_\t_\n2\tb\t_\tX\t_\t_\t4\tdep\t_\t_\n3\tc\t_\tX\t_\t_\t0\troot\t_\t_\n4\td\t_\tX\t_\t_\t3\tdep\t_\t_\n5\te\t_\tX\t_\t_\t4\tdep\t_\t_\n\n",
    );
    let o = depbench(&["stats", &f.arg("two.conllu")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "sentences\t2\ntokens\t8\navg_sentence_length\t4.00\nnonprojective_arc_pct\t25.00\navg_word_length\t1.50\n"
    );
    let o = depbench(&["stats", "--format", "json", &f.arg("two.conllu")]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["avg_sentence_length"], 4.0);
}

fn run_record(system: Paradigm, treebank: &str, las: f64, speed: f64) -> RunRecord {
    RunRecord {
        system,
        size_axis: "b18".into(),
        treebank: treebank.into(),
        las,
        uas: las,
        speed: SpeedReport {
            sents_per_sec_mean: speed,
            sents_per_sec_std: 0.0,
            runs: 5,
            batch_size: 256,
            thread_pinning: true,
        },
        train_energy: EnergyReading {
            joules: 100.0,
            duration_s: 5.0,
            source: EnergySource::ConstantPowerModel,
            samples: 0,
            partial: false,
        },
        train_time_s: 5.0,
    }
}

fn write_records(dir: &Path, records: &[RunRecord]) {
    fs::create_dir_all(dir).unwrap();
    for r in records {
        fs::write(dir.join(format!("{}.json", r.id())), serde_json::to_string(r).unwrap()).unwrap();
    }
}

#[test]
fn pareto_reproduces_the_three_point_example() {
    let f = Fixture::new();
    let records = [
        run_record(Paradigm::Graph, "en", 90.0, 100.0),
        run_record(Paradigm::Seqlab, "en", 85.0, 200.0),
        run_record(Paradigm::Transition, "en", 80.0, 50.0),
    ];
    write_records(&f.path("records"), &records);
    // Training records in the same directory are skipped.
    f.write("records/graph-b18-en.train.json", "{}");

    let o = depbench(&["pareto", &f.arg("records"), "--out-dir", &f.arg("report")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_report(&fs::read_to_string(f.path("report/report.json")).unwrap()).unwrap();
    let front: Vec<(f64, f64)> = report.fronts.accuracy_speed["cpu"]
        .overall
        .iter()
        .map(|p| (p.y, p.x))
        .collect();
    assert_eq!(front, [(90.0, 100.0), (85.0, 200.0)]);
    assert_eq!(
        fs::read_to_string(f.path("report/records.csv"))
            .unwrap()
            .lines()
            .count(),
        4
    );
    assert!(stdout(&o).contains("graph-b18-en"));

    let first = fs::read(f.path("report/report.json")).unwrap();
    let o = depbench(&[
        "pareto",
        &f.arg("records"),
        "--out-dir",
        &f.arg("report"),
        "--seed",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(f.path("report/report.json")).unwrap(), first);

    let o = depbench(&[
        "pareto",
        &f.arg("records"),
        "--out-dir",
        &f.arg("stamped"),
        "--timestamps",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(f.path("stamped/report.json"))
        .unwrap()
        .contains("generated_unix_s"));

    f.write("broken.json", "{\"system\": \"graph\"}");
    assert_eq!(depbench(&["pareto", &f.arg("broken.json")]).status.code(), Some(2));
}

#[test]
fn bench_then_pareto() {
    let f = Fixture::new();
    for paradigm in ["graph", "seqlab"] {
        let o = f.train(paradigm, "sweep", &["--treebank", "toy"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let model = f.arg(&format!("sweep/{paradigm}-b16-toy.model"));
        let o = depbench(&[
            "bench",
            "--model",
            &model,
            "--test",
            &f.arg("dev.conllu"),
            "--treebank",
            "toy",
            "--out-dir",
            &f.arg("sweep"),
            "--runs",
            "2",
            "--batch-size",
            "3",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let record: RunRecord =
            serde_json::from_str(&fs::read_to_string(f.path(&format!("sweep/{paradigm}-b16-toy.json"))).unwrap())
                .unwrap();
        assert_eq!(record.speed.runs, 2);
        assert!(record.speed.sents_per_sec_mean > 0.0);
        assert!((0.0..=100.0).contains(&record.las));
    }
    let o = depbench(&["pareto", &f.arg("sweep"), "--out-dir", &f.arg("sweep-report")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_report(&fs::read_to_string(f.path("sweep-report/report.json")).unwrap()).unwrap();
    assert_eq!(report.records.len(), 2);

    let o = depbench(&[
        "bench",
        "--model",
        &f.arg("sweep/graph-b16-toy.model"),
        "--test",
        &f.arg("dev.conllu"),
    ]);
    assert_eq!(o.status.code(), Some(1), "missing training record: {}", stderr(&o));
}
