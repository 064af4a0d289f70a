use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use fragmol::assemble::assemble as assemble_graph;
use fragmol::corpus::{split_indices, CorpusEntry};
use fragmol::record::{AssembleRecord, AssembledRecord, DecompositionRecord, FileHeader};
use fragmol::stats::{
    decomposition_stats, fragment_histogram_csv, records_csv, ring_histogram, ring_histogram_csv,
    summary_csv, vocab_composition, vocab_composition_csv,
};
use fragmol::vocab::{bbb_build_vocab, psm_build_vocab, write_vocab, FORMAT_VERSION};
use fragmol::{
    decompose as decompose_molecule, write_smiles, Molecule, SchemeMismatch, VocabScheme,
    Vocabulary,
};
use rayon::prelude::*;
use serde_json::json;

use crate::error::CliError;
use crate::output::{
    comment_header, display, fingerprint, jsonl_header, load_vocab, open, read_inputs, write_output,
};
use crate::{
    AssembleArgs, BuildVocabArgs, CompareArgs, DecomposeArgs, Globals, Report, SplitArgs, StatsArgs,
};

fn finish(start: Instant, g: &Globals) {
    if !g.deterministic {
        log::info!("finished in {:.2?}", start.elapsed());
    }
}

fn inputs_name(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| display(p))
        .collect::<Vec<_>>()
        .join(", ")
}

fn build(
    scheme: VocabScheme,
    mols: &[Molecule],
    k: usize,
    inputs: &[PathBuf],
) -> Result<Vocabulary, CliError> {
    let result = match scheme {
        VocabScheme::Bbb => bbb_build_vocab(mols, k),
        VocabScheme::Psm => psm_build_vocab(mols, k),
    };
    result.map_err(|source| CliError::Vocab {
        path: inputs_name(inputs),
        source,
    })
}

fn ring_fraction(vocab: &Vocabulary) -> f64 {
    vocab_composition(vocab).map_or(0.0, |c| c.ring_motif_fraction)
}

pub fn build_vocab(a: &BuildVocabArgs, g: &Globals) -> Result<(), CliError> {
    let start = Instant::now();
    let entries = read_inputs(&a.input.input, a.input.skip_invalid)?;
    let mols: Vec<Molecule> = entries.into_iter().map(|e| e.molecule).collect();
    let scheme = a.scheme.vocab_scheme();
    let vocab = build(scheme, &mols, a.k, &a.input.input)?;
    if vocab.is_empty() {
        return Err(CliError::NoMotifs);
    }
    let fp = fingerprint(&json!({
        "command": "build-vocab",
        "scheme": scheme.as_str(),
        "k": a.k,
        "skip_invalid": a.input.skip_invalid,
    }));
    let mut buf = Vec::new();
    write_vocab(&vocab, Some(&fp), &mut buf).expect("writing to memory");
    write_output(a.output.as_deref(), &buf)?;

    log::info!(
        "{} vocabulary: k = {} (requested {}) from {} molecules",
        scheme,
        vocab.len(),
        a.k,
        mols.len()
    );
    for (rank, e) in vocab.entries().iter().take(10).enumerate() {
        log::info!("  {:>2}. {} ({})", rank + 1, e.smiles, e.count);
    }
    log::info!("ring-motif fraction: {:.3}", ring_fraction(&vocab));
    finish(start, g);
    Ok(())
}

pub fn decompose(a: &DecomposeArgs, g: &Globals) -> Result<(), CliError> {
    let start = Instant::now();
    let (vocab, header) = load_vocab(&a.vocab)?;
    if !a.scheme.accepts(vocab.scheme()) {
        return Err(SchemeMismatch {
            scheme: a.scheme,
            vocab: vocab.scheme(),
        }
        .into());
    }
    let entries = read_inputs(&a.input.input, a.input.skip_invalid)?;
    let fp = fingerprint(&json!({
        "command": "decompose",
        "scheme": a.scheme.as_str(),
        "vocab_scheme": header.scheme.as_str(),
        "vocab_corpus_hash": header.corpus_hash,
        "vocab_k": header.k,
        "skip_invalid": a.input.skip_invalid,
    }));
    let rows: Vec<(String, usize, usize, usize)> = entries
        .par_iter()
        .map(|e| {
            let d =
                decompose_molecule(&e.molecule, &vocab, a.scheme).expect("scheme checked above");
            let rec = DecompositionRecord::new(e.id.clone(), &e.molecule, &d, &vocab);
            let line = serde_json::to_string(&rec).expect("record serializes");
            (
                line,
                d.cardinality(),
                d.singles().len(),
                e.molecule.atom_count(),
            )
        })
        .collect();
    let mut out = jsonl_header("decomposition", &fp);
    let (mut fragments, mut singles, mut atoms) = (0, 0, 0);
    for (line, f, s, n) in &rows {
        out.push_str(line);
        out.push('\n');
        fragments += f;
        singles += s;
        atoms += n;
    }
    write_output(a.output.as_deref(), out.as_bytes())?;
    log::info!(
        "{} molecules, mean |F| = {:.3}, single-atom rate = {:.4}",
        rows.len(),
        fragments as f64 / rows.len() as f64,
        singles as f64 / atoms.max(1) as f64
    );
    finish(start, g);
    Ok(())
}

pub fn stats(a: &StatsArgs, g: &Globals) -> Result<(), CliError> {
    let start = Instant::now();
    let need_input = || -> Result<Vec<CorpusEntry>, CliError> {
        if a.input.is_empty() {
            return Err(CliError::Usage(
                format!("--report {:?} needs --input", a.report).to_lowercase(),
            ));
        }
        read_inputs(&a.input, a.skip_invalid)
    };
    let need_vocab = || -> Result<(Vocabulary, fragmol::vocab::VocabHeader), CliError> {
        let path = a.vocab.as_ref().ok_or_else(|| {
            CliError::Usage(format!("--report {:?} needs --vocab", a.report).to_lowercase())
        })?;
        load_vocab(path)
    };
    let mut config = json!({
        "command": "stats",
        "report": format!("{:?}", a.report).to_lowercase(),
        "skip_invalid": a.skip_invalid,
    });
    let body = match a.report {
        Report::Rings => ring_histogram_csv(&ring_histogram(&need_input()?)),
        Report::Vocab => {
            let (vocab, header) = need_vocab()?;
            config["vocab_corpus_hash"] = json!(header.corpus_hash);
            config["vocab_k"] = json!(header.k);
            let c = vocab_composition(&vocab).map_err(|_| {
                CliError::Usage(format!(
                    "{}: vocabulary is empty",
                    display(a.vocab.as_ref().unwrap())
                ))
            })?;
            vocab_composition_csv(&c)
        }
        Report::Summary | Report::Records | Report::Fragments => {
            let scheme = a
                .scheme
                .ok_or_else(|| CliError::Usage("this report needs --scheme".into()))?;
            let (vocab, header) = need_vocab()?;
            let entries = need_input()?;
            config["scheme"] = json!(scheme.as_str());
            config["vocab_corpus_hash"] = json!(header.corpus_hash);
            config["vocab_k"] = json!(header.k);
            let s = decomposition_stats(&entries, &vocab, scheme)?;
            match a.report {
                Report::Summary => summary_csv(&[s]),
                Report::Records => records_csv(&s),
                _ => fragment_histogram_csv(&s),
            }
        }
    };
    let out = comment_header(&fingerprint(&config)) + &body;
    write_output(a.output.as_deref(), out.as_bytes())?;
    finish(start, g);
    Ok(())
}

pub fn split(a: &SplitArgs, g: &Globals) -> Result<(), CliError> {
    let start = Instant::now();
    let ratios: [f64; 3] = a
        .split
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Usage("--split takes three comma-separated fractions".into()))?;
    let entries = read_inputs(&a.input.input, a.input.skip_invalid)?;
    let parts = split_indices(entries.len(), ratios, a.seed)?;
    let fp = fingerprint(&json!({
        "command": "split",
        "split": ratios,
        "seed": a.seed,
        "skip_invalid": a.input.skip_invalid,
    }));
    for (name, idx) in ["train", "valid", "test"].iter().zip(&parts) {
        let mut out = comment_header(&fp);
        for &i in idx {
            let e = &entries[i];
            let smiles = e
                .molecule
                .source()
                .map_or_else(|| write_smiles(&e.molecule), str::to_string);
            out.push_str(&format!("{smiles} {}\n", e.id));
        }
        let mut path = OsString::from(a.output.as_os_str());
        path.push(format!(".{name}.smi"));
        let path = PathBuf::from(path);
        write_output(Some(&path), out.as_bytes())?;
        log::info!("{}: {} molecules", path.display(), idx.len());
    }
    finish(start, g);
    Ok(())
}

pub fn assemble(a: &AssembleArgs, g: &Globals) -> Result<(), CliError> {
    let start = Instant::now();
    let name = display(&a.input);
    let mut records = Vec::new();
    let mut seen_data = false;
    for (i, line) in std::io::BufRead::lines(open(&a.input)?).enumerate() {
        let line = line.map_err(|source| CliError::Io {
            path: a.input.clone(),
            source,
        })?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if !seen_data {
            seen_data = true;
            if let Ok(h) = serde_json::from_str::<FileHeader>(text) {
                if h.format_version != FORMAT_VERSION {
                    return Err(CliError::record(
                        &name,
                        i + 1,
                        format!("unsupported format version {}", h.format_version),
                    ));
                }
                continue;
            }
        }
        let rec: AssembleRecord =
            serde_json::from_str(text).map_err(|e| CliError::record(&name, i + 1, e))?;
        records.push((i + 1, rec));
    }
    if records.is_empty() {
        return Err(CliError::EmptyInput { path: name });
    }
    let fp = fingerprint(&json!({ "command": "assemble", "order": a.order.as_str() }));
    let lines: Vec<String> = records
        .par_iter()
        .map(|(line, rec)| {
            let graph = rec
                .to_graph()
                .map_err(|e| CliError::record(&name, *line, e))?;
            let result = assemble_graph(&graph, a.order);
            if !result.connected {
                log::warn!(
                    "{name}:{line}: {} assembles into a disconnected molecule",
                    rec.id
                );
            }
            Ok(
                serde_json::to_string(&AssembledRecord::new(rec.id.clone(), &result))
                    .expect("record serializes"),
            )
        })
        .collect::<Result<_, CliError>>()?;
    let mut out = jsonl_header("assembled", &fp);
    for l in &lines {
        out.push_str(l);
        out.push('\n');
    }
    write_output(a.output.as_deref(), out.as_bytes())?;
    log::info!("assembled {} graphs ({})", lines.len(), a.order);
    finish(start, g);
    Ok(())
}

pub fn compare(a: &CompareArgs, g: &Globals) -> Result<(), CliError> {
    let start = Instant::now();
    let entries = read_inputs(&a.input.input, a.input.skip_invalid)?;
    let mols: Vec<Molecule> = entries.iter().map(|e| e.molecule.clone()).collect();
    let bbb = build(VocabScheme::Bbb, &mols, a.k, &a.input.input)?;
    let psm = build(VocabScheme::Psm, &mols, a.k, &a.input.input)?;
    for v in [&bbb, &psm] {
        log::info!(
            "{} vocabulary: k = {}, ring-motif fraction {:.3}",
            v.scheme(),
            v.len(),
            ring_fraction(v)
        );
    }
    let all = vec![
        decomposition_stats(&entries, &bbb, fragmol::Scheme::Bbb)?,
        decomposition_stats(&entries, &psm, fragmol::Scheme::Psm)?,
        decomposition_stats(&entries, &bbb, fragmol::Scheme::Subcover)?,
    ];
    let fp = fingerprint(&json!({
        "command": "compare",
        "k": a.k,
        "skip_invalid": a.input.skip_invalid,
    }));
    let out = comment_header(&fp) + &summary_csv(&all);
    write_output(a.output.as_deref(), out.as_bytes())?;
    finish(start, g);
    Ok(())
}
