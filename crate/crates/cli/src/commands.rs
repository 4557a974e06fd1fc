use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use hinclust_core::metrics::{align_labels, read_labels};
use hinclust_core::model::read_seeds;
use hinclust_core::pipeline::cluster_terms;
use hinclust_core::planted::{generate_planted_hin, PlantedParams};
use hinclust_core::{
    enumerate_instances, evaluate as score, load_hin, transcribe as to_tensor, Hin, MetricsReport,
    Motif, MotifSpec, MotifTerm, SparseTensor,
};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

fn create_dir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).with_context(|| format!("cannot create directory {}", p.display()))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("cannot write {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_file(path, |w| writeln!(w, "{text}"))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

/// File-name-safe version of a motif name.
fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Cache key over the graph files and the motif spec.
fn cache_key(nodes: &[u8], edges: &[u8], spec: &MotifSpec) -> String {
    let mut h = Sha256::new();
    h.update(b"hinclust-tensor-v1");
    for part in [nodes, edges, serde_json::to_string(spec).expect("spec serializes").as_bytes()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    format!("{:x}", h.finalize())
}

#[derive(Debug, Serialize)]
struct ManifestEntry {
    motif: String,
    file: String,
    dims: Vec<usize>,
    nnz: usize,
    key: String,
}

#[derive(Debug, Serialize)]
struct Timing {
    motif: String,
    cached: bool,
    seconds: f64,
}

pub struct Transcribed {
    pub hin: Hin,
    pub terms: Vec<MotifTerm>,
}

fn read_specs(cfg: &RunConfig) -> Result<Vec<MotifSpec>> {
    let mut specs: Vec<MotifSpec> = Vec::new();
    for p in &cfg.motifs {
        let text = fs::read_to_string(p).with_context(|| format!("cannot read motif {}", p.display()))?;
        let spec = MotifSpec::from_json(&text).with_context(|| format!("invalid motif {}", p.display()))?;
        if specs.iter().any(|s| file_stem(&s.name) == file_stem(&spec.name)) {
            bail!("motif name `{}` is used twice", spec.name);
        }
        specs.push(spec);
    }
    Ok(specs)
}

fn cached_tensor(path: &Path, motif: &Motif, hin: &Hin) -> Option<SparseTensor> {
    let reader = open(path).ok()?;
    match SparseTensor::read_tsv(reader, &path.display().to_string()) {
        Ok(t) if t.dims() == motif.dims(hin) => Some(t),
        Ok(_) => None,
        Err(e) => {
            log::warn!("ignoring unreadable cache entry: {e}");
            None
        }
    }
}

/// Enumerates and transcribes every motif, reusing cached tensors, and
/// writes `tensors/*.tsv`, `manifest.json` and `timings.json` under the
/// output directory.
pub fn transcribe(cfg: &RunConfig) -> Result<Transcribed> {
    let nodes_raw = fs::read(&cfg.nodes).with_context(|| format!("cannot read {}", cfg.nodes.display()))?;
    let edges_raw = fs::read(&cfg.edges).with_context(|| format!("cannot read {}", cfg.edges.display()))?;
    let hin = load_hin(&cfg.nodes, &cfg.edges)?;
    let specs = read_specs(cfg)?;

    let tensor_dir = cfg.out_dir.join("tensors");
    let cache_dir = cfg.cache_dir();
    create_dir(&tensor_dir)?;
    create_dir(&cache_dir)?;

    let mut terms = Vec::new();
    let mut manifest = Vec::new();
    let mut timings = Vec::new();
    for spec in &specs {
        let t0 = Instant::now();
        let motif = Motif::resolve(spec, &hin)?;
        let key = cache_key(&nodes_raw, &edges_raw, spec);
        let cache_path = cache_dir.join(format!("{key}.tsv"));
        let (tensor, cached) = match cached_tensor(&cache_path, &motif, &hin) {
            Some(t) => (t, true),
            None => {
                let t = to_tensor(&enumerate_instances(&hin, &motif)?, &hin)?;
                write_file(&cache_path, |w| t.write_tsv(w))?;
                (t, false)
            }
        };
        let file = format!("tensors/{}.tsv", file_stem(&spec.name));
        write_file(&cfg.out_dir.join(&file), |w| tensor.write_tsv(w))?;
        log::info!("motif {}: {} instances", spec.name, tensor.nnz());
        manifest.push(ManifestEntry {
            motif: spec.name.clone(),
            file,
            dims: tensor.dims().to_vec(),
            nnz: tensor.nnz(),
            key,
        });
        timings.push(Timing {
            motif: spec.name.clone(),
            cached,
            seconds: t0.elapsed().as_secs_f64(),
        });
        terms.push(MotifTerm { motif, tensor });
    }
    write_json(&cfg.out_dir.join("manifest.json"), &json!({ "motifs": manifest }))?;
    write_json(&cfg.out_dir.join("timings.json"), &json!({ "motifs": timings }))?;
    Ok(Transcribed { hin, terms })
}

/// What `fit` reports on stdout.
#[derive(Debug, Serialize)]
pub struct FitSummary {
    pub converged: bool,
    pub outer_iterations: usize,
    pub objective: f64,
    pub mu: Vec<(String, f64)>,
}

/// Transcribes (or reuses the cache), fits the model and writes
/// `consensus.tsv`, `labels.tsv`, `mu.tsv` and `iterations.csv`.
pub fn fit(cfg: &RunConfig) -> Result<FitSummary> {
    let Transcribed { hin, terms } = transcribe(cfg)?;
    let seeds = match &cfg.seeds {
        Some(p) => read_seeds(open(p)?, &p.display().to_string(), &hin)?,
        None => Vec::new(),
    };
    let names: Vec<String> = terms.iter().map(|t| t.motif.name.clone()).collect();
    let result = cluster_terms(&hin, terms, &seeds, cfg.hyper.clone())?;
    let out = &cfg.out_dir;

    write_file(&out.join("consensus.tsv"), |w| {
        for a in &result.assignments {
            let ty = hin.node_type_name(a.node_type);
            let ids = hin.nodes_of_type(a.node_type).expect("type from this graph");
            for (j, id) in ids.iter().enumerate() {
                write!(w, "{ty}\t{id}")?;
                for v in a.consensus.column(j) {
                    write!(w, "\t{v}")?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    })?;
    write_file(&out.join("labels.tsv"), |w| {
        for (id, label) in result.labels(&hin) {
            writeln!(w, "{id}\t{label}")?;
        }
        Ok(())
    })?;
    let mu = result.state.weights().as_slice();
    write_file(&out.join("mu.tsv"), |w| {
        for (name, m) in names.iter().zip(mu) {
            writeln!(w, "{name}\t{m}")?;
        }
        Ok(())
    })?;
    write_file(&out.join("iterations.csv"), |w| {
        write!(w, "iter,obj,reconstruction,sparsity,consensus,seed_mask")?;
        for name in &names {
            write!(w, ",mu_{}", file_stem(name))?;
        }
        writeln!(w)?;
        for r in &result.report.log {
            let t = &r.terms;
            write!(
                w,
                "{},{},{},{},{},{}",
                r.iter, r.objective, t.reconstruction, t.sparsity, t.consensus, t.seed_mask
            )?;
            for m in &r.mu {
                write!(w, ",{m}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;

    let report = &result.report;
    Ok(FitSummary {
        converged: report.converged,
        outer_iterations: report.outer_iterations,
        objective: report.log.last().map_or(f64::NAN, |r| r.objective),
        mu: names.into_iter().zip(mu.iter().copied()).collect(),
    })
}

fn read_label_file(path: &Path) -> Result<Vec<(String, usize)>> {
    Ok(read_labels(open(path)?, &path.display().to_string())?)
}

/// Scores predicted labels against the truth, skipping seed nodes unless
/// `include_seeds` is set.
pub fn evaluate(pred: &Path, truth: &Path, seeds: Option<&Path>, include_seeds: bool) -> Result<MetricsReport> {
    let pred = read_label_file(pred)?;
    let truth = read_label_file(truth)?;
    let excluded: Vec<String> = match seeds {
        Some(p) if !include_seeds => read_label_file(p)?.into_iter().map(|(id, _)| id).collect(),
        _ => Vec::new(),
    };
    let part = align_labels(&pred, &truth, &excluded)?;
    Ok(score(&part))
}

/// Writes a planted graph together with its truth, seeds, motif files and a
/// ready-to-run `run.json`.
pub fn gen_planted(params_path: &Path, out: &Path) -> Result<PathBuf> {
    let text = fs::read_to_string(params_path).with_context(|| format!("cannot read {}", params_path.display()))?;
    let params: PlantedParams =
        serde_json::from_str(&text).with_context(|| format!("invalid planted parameters {}", params_path.display()))?;
    let g = generate_planted_hin(&params)?;
    create_dir(&out.join("motifs"))?;
    g.hin.save(&out.join("nodes.tsv"), &out.join("edges.tsv"))?;
    let write_labels = |name: &str, rows: &[(String, usize)]| {
        write_file(&out.join(name), |w| {
            for (id, label) in rows {
                writeln!(w, "{id}\t{label}")?;
            }
            Ok(())
        })
    };
    write_labels("truth.tsv", &g.truth)?;
    write_labels("seeds.tsv", &g.seeds)?;
    let mut motif_files = Vec::new();
    for spec in &g.motifs {
        let file = format!("motifs/{}.json", file_stem(&spec.name));
        write_file(&out.join(&file), |w| writeln!(w, "{}", spec.to_json()))?;
        motif_files.push(file);
    }
    let run = json!({
        "nodes": "nodes.tsv",
        "edges": "edges.tsv",
        "motifs": motif_files,
        "seeds": "seeds.tsv",
        "out_dir": "out",
        "clusters": params.clusters,
    });
    let run_path = out.join("run.json");
    write_json(&run_path, &run)?;
    Ok(run_path)
}
