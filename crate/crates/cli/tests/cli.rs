use std::path::Path;
use std::process::Command;

use fragmol::record::{DecompositionRecord, FileHeader};
use fragmol::synth::{random_corpus, SynthConfig};
use fragmol::write_smiles;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: Vec<u8>,
    stderr: String,
}

fn fragmol(args: &[&str]) -> Run {
    fragmol_with(args, None)
}

fn fragmol_with(args: &[&str], workers: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fragmol"));
    cmd.args(args)
        .env_remove("FRAGMOL_WORKERS")
        .env("RUST_LOG", "warn");
    if let Some(w) = workers {
        cmd.env("FRAGMOL_WORKERS", w);
    }
    let out = cmd.output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const TOY: &str = "C1CCCCC1CC toy1\nC1CCCCC1O toy2\n";

fn fuzz_corpus(dir: &Path, n: usize) -> String {
    let text: String = random_corpus(3, n, &SynthConfig::default())
        .iter()
        .map(|m| write_smiles(m) + "\n")
        .collect();
    write(dir, "fuzz.smi", &text)
}

fn records(bytes: &[u8]) -> Vec<DecompositionRecord> {
    let text = std::str::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    let header: FileHeader = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header.format_version, 1);
    assert_eq!(header.kind, "decomposition");
    assert_eq!(header.config_fingerprint.len(), 64);
    lines.map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn toy_bbb_vocabulary() {
    let dir = TempDir::new().unwrap();
    let corpus = write(dir.path(), "toy.smi", TOY);
    let run = fragmol(&["build-vocab", "--scheme", "bbb", "--k", "1", "-i", &corpus]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let text = String::from_utf8(run.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("\"config_fingerprint\":"));
    assert_eq!(lines.next().unwrap(), "1\tC1CCCCC1\t2\t6\t1");
    assert!(lines.next().is_none());
}

#[test]
fn short_vocabulary_warns() {
    let dir = TempDir::new().unwrap();
    let corpus = write(dir.path(), "c.smi", "C1CCCCC1CCC1CC1\nC1CCC1\nCCCO\n");
    let out = path(dir.path(), "v.tsv");
    let run = fragmol(&[
        "build-vocab",
        "--scheme",
        "bbb",
        "--k",
        "10",
        "-i",
        &corpus,
        "-o",
        &out,
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stderr.contains("fewer than k = 10"), "{}", run.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    // cyclohexane, cyclopropane, cyclobutane and CCCO
    assert_eq!(text.lines().count(), 1 + 4);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let empty = write(dir.path(), "empty.smi", "# nothing\n\n");
    let bad = write(dir.path(), "bad.smi", "CO\nC(C\n");
    let toy = write(dir.path(), "toy.smi", TOY);
    let missing = path(dir.path(), "missing.smi");

    assert_eq!(
        fragmol(&["build-vocab", "--scheme", "bbb", "--k", "1", "-i", &empty]).code,
        1
    );
    let run = fragmol(&["build-vocab", "--scheme", "bbb", "--k", "1", "-i", &bad]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("line 2"), "{}", run.stderr);
    assert_eq!(
        fragmol(&["build-vocab", "--scheme", "bbb", "--k", "1", "-i", &missing]).code,
        4
    );
    assert_eq!(
        fragmol(&["build-vocab", "--scheme", "bbb", "-i", &toy]).code,
        1
    );
    assert_eq!(
        fragmol(&["build-vocab", "--scheme", "nope", "--k", "1", "-i", &toy]).code,
        1
    );
    assert_eq!(
        fragmol(&["build-vocab", "--scheme", "bbb", "--k", "0", "-i", &toy]).code,
        1
    );
    // Single atoms only: nothing to put in a vocabulary.
    let atoms = write(dir.path(), "atoms.smi", "C\nO\n");
    assert_eq!(
        fragmol(&["build-vocab", "--scheme", "psm", "--k", "3", "-i", &atoms]).code,
        1
    );

    let run = fragmol(&[
        "build-vocab",
        "--scheme",
        "bbb",
        "--k",
        "1",
        "-i",
        &bad,
        "--skip-invalid",
    ]);
    assert_eq!(run.code, 1, "the only valid molecule has no motif");
    assert!(run.stderr.contains(":2: skipped"), "{}", run.stderr);

    let bbb = path(dir.path(), "bbb.tsv");
    assert_eq!(
        fragmol(&[
            "build-vocab",
            "--scheme",
            "bbb",
            "--k",
            "4",
            "-i",
            &toy,
            "-o",
            &bbb
        ])
        .code,
        0
    );
    assert_eq!(
        fragmol(&["decompose", "--scheme", "psm", "--vocab", &bbb, "-i", &toy]).code,
        3
    );
    assert_eq!(
        fragmol(&[
            "decompose",
            "--scheme",
            "bbb",
            "--vocab",
            &missing,
            "-i",
            &toy
        ])
        .code,
        4
    );
    let garbage = write(dir.path(), "garbage.tsv", "not a vocabulary\n");
    assert_eq!(
        fragmol(&[
            "decompose",
            "--scheme",
            "bbb",
            "--vocab",
            &garbage,
            "-i",
            &toy
        ])
        .code,
        2
    );
    assert_eq!(
        fragmol(&[
            "--workers",
            "0",
            "decompose",
            "--scheme",
            "bbb",
            "--vocab",
            &bbb,
            "-i",
            &toy
        ])
        .code,
        1
    );
    assert_eq!(
        fragmol(&[
            "split",
            "-i",
            &toy,
            "-o",
            &path(dir.path(), "s"),
            "--split",
            "0.5,0.6,0.1"
        ])
        .code,
        1
    );
}

#[test]
fn subcover_records_never_exceed_bbb() {
    let dir = TempDir::new().unwrap();
    let corpus = fuzz_corpus(dir.path(), 300);
    let vocab = path(dir.path(), "v.tsv");
    assert_eq!(
        fragmol(&[
            "build-vocab",
            "--scheme",
            "bbb",
            "--k",
            "40",
            "-i",
            &corpus,
            "-o",
            &vocab
        ])
        .code,
        0
    );
    let bbb = records(
        &fragmol(&[
            "decompose",
            "--scheme",
            "bbb",
            "--vocab",
            &vocab,
            "-i",
            &corpus,
        ])
        .stdout,
    );
    let sub = records(
        &fragmol(&[
            "decompose",
            "--scheme",
            "subcover",
            "--vocab",
            &vocab,
            "-i",
            &corpus,
        ])
        .stdout,
    );
    assert_eq!(bbb.len(), 300);
    assert_eq!(sub.len(), 300);
    for (b, s) in bbb.iter().zip(&sub) {
        assert_eq!(b.id, s.id);
        assert!(s.cardinality() <= b.cardinality(), "{}", b.id);
    }
    let total = |r: &[DecompositionRecord]| {
        r.iter()
            .map(DecompositionRecord::cardinality)
            .sum::<usize>()
    };
    assert!(total(&sub) < total(&bbb));
}

#[test]
fn empty_vocabulary_gives_all_singles() {
    let dir = TempDir::new().unwrap();
    let corpus = write(dir.path(), "toy.smi", TOY);
    let vocab = write(
        dir.path(),
        "empty.tsv",
        "{\"format_version\":1,\"scheme\":\"bbb\",\"corpus_hash\":\"\",\"k\":0}\n",
    );
    for scheme in ["bbb", "subcover"] {
        let run = fragmol(&[
            "decompose",
            "--scheme",
            scheme,
            "--vocab",
            &vocab,
            "-i",
            &corpus,
        ]);
        assert_eq!(run.code, 0, "{}", run.stderr);
        let recs = records(&run.stdout);
        assert_eq!(recs[0].singles, (0..8).collect::<Vec<_>>());
        assert_eq!(recs[1].singles, (0..7).collect::<Vec<_>>());
        assert!(recs.iter().all(|r| r.motifs.is_empty()));
    }
}

#[test]
fn ring_histogram_of_benzene() {
    let dir = TempDir::new().unwrap();
    let corpus = write(dir.path(), "bz.smi", "c1ccccc1\n");
    let run = fragmol(&["stats", "--report", "rings", "-i", &corpus]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.starts_with("# format_version=1 config_fingerprint="));
    assert!(text.lines().any(|l| l == "6,1,1.0"), "{text}");
    assert!(text.lines().any(|l| l == "5,0,0.0"));
}

#[test]
fn stats_reports_need_their_inputs() {
    let dir = TempDir::new().unwrap();
    let corpus = write(dir.path(), "toy.smi", TOY);
    let vocab = path(dir.path(), "v.tsv");
    fragmol(&[
        "build-vocab",
        "--scheme",
        "bbb",
        "--k",
        "4",
        "-i",
        &corpus,
        "-o",
        &vocab,
    ]);
    assert_eq!(fragmol(&["stats", "--report", "rings"]).code, 1);
    assert_eq!(
        fragmol(&["stats", "--report", "summary", "-i", &corpus, "--vocab", &vocab]).code,
        1
    );
    let run = fragmol(&[
        "stats", "--report", "summary", "--scheme", "subcover", "-i", &corpus, "--vocab", &vocab,
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let text = String::from_utf8(run.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(
        rows[1],
        "scheme,molecules,mean_fragments,median_fragments,mean_motifs,single_atom_rate"
    );
    assert_eq!(rows[2], "subcover,2,2.5,2.5,1.0,0.2");
    let run = fragmol(&["stats", "--report", "vocab", "--vocab", &vocab]);
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(
        text.contains("6,1\n") && text.contains("ring_motif_fraction,1.0"),
        "{text}"
    );
}

#[test]
fn split_is_seeded_and_exact() {
    let dir = TempDir::new().unwrap();
    let corpus = fuzz_corpus(dir.path(), 101);
    let read = |prefix: &str| -> Vec<Vec<String>> {
        ["train", "valid", "test"]
            .iter()
            .map(|p| {
                std::fs::read_to_string(format!("{prefix}.{p}.smi"))
                    .unwrap()
                    .lines()
                    .filter(|l| !l.starts_with('#'))
                    .map(str::to_string)
                    .collect()
            })
            .collect()
    };
    let a = path(dir.path(), "a");
    let b = path(dir.path(), "b");
    assert_eq!(
        fragmol(&["split", "-i", &corpus, "--seed", "7", "-o", &a]).code,
        0
    );
    assert_eq!(
        fragmol(&["split", "-i", &corpus, "--seed", "7", "-o", &b]).code,
        0
    );
    let (pa, pb) = (read(&a), read(&b));
    assert_eq!(pa, pb);
    assert_eq!([pa[0].len(), pa[1].len(), pa[2].len()], [80, 10, 11]);
    let mut ids: Vec<usize> = pa
        .concat()
        .iter()
        .map(|l| l.split(' ').nth(1).unwrap().parse().unwrap())
        .collect();
    ids.sort_unstable();
    assert_eq!(ids, (1..=101).collect::<Vec<_>>());
}

#[test]
fn assemble_breaks_four_cycle() {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "g.jsonl",
        r#"{"id":"square","atoms":["C","C","C","C"],"motifs":[],"candidates":[[0,1,1,0.9],[1,2,1,0.8],[2,3,1,0.7],[0,3,1,0.6]]}
"#,
    );
    for order in ["valency-first", "cycle-first"] {
        let run = fragmol(&["assemble", "-i", &input, "--order", order]);
        assert_eq!(run.code, 0, "{}", run.stderr);
        let text = String::from_utf8(run.stdout).unwrap();
        let line = text.lines().nth(1).unwrap();
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec["smiles"], "CCCC");
        assert_eq!(rec["removed"], serde_json::json!([[0, 3, 1]]));
        assert_eq!(rec["connected"], true);
    }
    let bad = write(dir.path(), "bad.jsonl", "{\"id\":1}\n");
    assert_eq!(fragmol(&["assemble", "-i", &bad]).code, 2);
}

fn outputs_of(dir: &Path, corpus: &str, workers: &str) -> Vec<Vec<u8>> {
    let w = Some(workers);
    let tag = |name: &str| path(dir, &format!("{name}.{workers}"));
    let mut outs = Vec::new();
    let bbb = tag("bbb.tsv");
    let psm = tag("psm.tsv");
    for (scheme, file) in [("bbb", &bbb), ("psm", &psm)] {
        let r = fragmol_with(
            &[
                "build-vocab",
                "--scheme",
                scheme,
                "--k",
                "30",
                "-i",
                corpus,
                "-o",
                file,
            ],
            w,
        );
        assert_eq!(r.code, 0, "{}", r.stderr);
        outs.push(std::fs::read(file).unwrap());
    }
    for (scheme, vocab) in [("bbb", &bbb), ("psm", &psm), ("subcover", &bbb)] {
        outs.push(
            fragmol_with(
                &[
                    "decompose",
                    "--scheme",
                    scheme,
                    "--vocab",
                    vocab,
                    "-i",
                    corpus,
                ],
                w,
            )
            .stdout,
        );
        for report in ["summary", "records", "fragments"] {
            outs.push(
                fragmol_with(
                    &[
                        "stats", "--report", report, "--scheme", scheme, "--vocab", vocab, "-i",
                        corpus,
                    ],
                    w,
                )
                .stdout,
            );
        }
    }
    outs.push(fragmol_with(&["stats", "--report", "rings", "-i", corpus], w).stdout);
    outs.push(fragmol_with(&["stats", "--report", "vocab", "--vocab", &psm], w).stdout);
    outs.push(fragmol_with(&["compare", "--k", "20", "-i", corpus], w).stdout);
    let prefix = tag("split");
    fragmol_with(&["split", "-i", corpus, "--seed", "3", "-o", &prefix], w);
    for part in ["train", "valid", "test"] {
        outs.push(std::fs::read(format!("{prefix}.{part}.smi")).unwrap());
    }
    outs
}

#[test]
fn outputs_do_not_depend_on_workers() {
    let dir = TempDir::new().unwrap();
    let corpus = fuzz_corpus(dir.path(), 400);
    let one = outputs_of(dir.path(), &corpus, "1");
    let again = outputs_of(dir.path(), &corpus, "1");
    let eight = outputs_of(dir.path(), &corpus, "8");
    assert_eq!(one, again);
    assert_eq!(one, eight);
    assert!(one.iter().all(|o| !o.is_empty()));
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fragmol"))
        .args(["build-vocab", "--scheme", "bbb", "--k", "1", "-i", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::null())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(TOY.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("C1CCCCC1\t2"));
}
