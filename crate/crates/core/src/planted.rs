//! Synthetic graphs with a planted block structure.
//!
//! Nodes of every type are split into `clusters` contiguous blocks. Each
//! template motif is planted `instances_per_block` times per block: with
//! probability `1 − noise` all of an instance's nodes come from that block,
//! otherwise each node's block is drawn uniformly at random.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hin::{Hin, HinBuilder};
use crate::model::Seed;
use crate::motif::{Direction, MotifSpec, PatternEdgeSpec, PatternNodeSpec};
use crate::tensor::SparseTensor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedTemplate {
    pub motif: MotifSpec,
    pub instances_per_block: usize,
    /// Probability that an instance ignores the block structure.
    pub noise: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantedParams {
    pub clusters: usize,
    pub nodes_per_type: usize,
    pub types: Vec<String>,
    pub templates: Vec<PlantedTemplate>,
    /// Fraction of each block exported as seeds (at least one node when positive).
    pub seed_fraction: f64,
    /// Types that receive seeds; all types when absent.
    pub seed_types: Option<Vec<String>>,
    pub rng_seed: u64,
}

fn pattern(name: &str, nodes: &[(&str, &str)], edges: &[(&str, &str, &str)]) -> MotifSpec {
    MotifSpec {
        name: name.to_owned(),
        nodes: nodes
            .iter()
            .map(|&(id, t)| PatternNodeSpec {
                id: id.to_owned(),
                node_type: t.to_owned(),
            })
            .collect(),
        edges: edges
            .iter()
            .map(|&(s, d, e)| PatternEdgeSpec {
                src: s.to_owned(),
                dst: d.to_owned(),
                etype: e.to_owned(),
                dir: Direction::Undirected,
            })
            .collect(),
        injective_types: None,
    }
}

/// Edge-level `A-T` motif over the `tags` edge type.
pub fn edge_template() -> MotifSpec {
    pattern("AT", &[("a", "A"), ("t", "T")], &[("a", "t", "tags")])
}

/// Four-node star: an author writes a paper that mentions two distinct terms.
pub fn star_template() -> MotifSpec {
    pattern(
        "APTT",
        &[("a", "A"), ("p", "P"), ("t1", "T"), ("t2", "T")],
        &[("a", "p", "writes"), ("p", "t1", "mentions"), ("p", "t2", "mentions")],
    )
}

impl Default for PlantedParams {
    fn default() -> Self {
        PlantedParams {
            clusters: 3,
            nodes_per_type: 60,
            types: vec!["A".into(), "P".into(), "T".into()],
            templates: vec![
                PlantedTemplate {
                    motif: edge_template(),
                    instances_per_block: 120,
                    noise: 0.05,
                },
                PlantedTemplate {
                    motif: star_template(),
                    instances_per_block: 150,
                    noise: 0.05,
                },
            ],
            seed_fraction: 0.05,
            seed_types: None,
            rng_seed: 0,
        }
    }
}

impl PlantedParams {
    /// Sets the same noise rate on every template.
    pub fn with_noise(mut self, noise: f64) -> Self {
        for t in &mut self.templates {
            t.noise = noise;
        }
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Planted(m));
        if self.clusters < 2 {
            return bad("at least two clusters are required".into());
        }
        if self.types.is_empty() {
            return bad("no node types given".into());
        }
        if !(0.0..=1.0).contains(&self.seed_fraction) {
            return bad(format!("seed_fraction {} outside [0, 1]", self.seed_fraction));
        }
        let smallest_block = self.nodes_per_type / self.clusters;
        for tpl in &self.templates {
            tpl.motif.check_structure()?;
            if !(0.0..=1.0).contains(&tpl.noise) {
                return bad(format!("noise {} outside [0, 1]", tpl.noise));
            }
            for n in &tpl.motif.nodes {
                if !self.types.contains(&n.node_type) {
                    return bad(format!(
                        "template `{}` uses undeclared type `{}`",
                        tpl.motif.name, n.node_type
                    ));
                }
                let same = tpl
                    .motif
                    .nodes
                    .iter()
                    .filter(|m| m.node_type == n.node_type)
                    .count();
                if same > smallest_block {
                    return bad(format!(
                        "blocks of {smallest_block} nodes cannot hold {same} distinct `{}` nodes of template `{}`",
                        n.node_type, tpl.motif.name
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A generated graph with its ground truth.
#[derive(Clone, Debug)]
pub struct PlantedGraph {
    pub hin: Hin,
    /// Block of every node, in nodes-file order.
    pub truth: Vec<(String, usize)>,
    pub seeds: Vec<(String, usize)>,
    /// Planted instances per template, as node ids in pattern order.
    pub instances: Vec<Vec<Vec<String>>>,
    pub motifs: Vec<MotifSpec>,
}

impl PlantedGraph {
    /// Seeds resolved against the generated graph.
    pub fn resolved_seeds(&self) -> Vec<Seed> {
        self.seeds
            .iter()
            .map(|(id, label)| Seed {
                node: self.hin.node(id).expect("seed from this graph"),
                label: *label,
            })
            .collect()
    }

    pub fn seed_ids(&self) -> Vec<String> {
        self.seeds.iter().map(|(id, _)| id.clone()).collect()
    }

    /// Ground truth restricted to nodes of one type.
    pub fn truth_of_type(&self, type_name: &str) -> Vec<(String, usize)> {
        let Some(t) = self.hin.node_type_id(type_name) else {
            return Vec::new();
        };
        self.truth
            .iter()
            .filter(|(id, _)| self.hin.node(id).is_some_and(|n| n.ty == t))
            .cloned()
            .collect()
    }
}

fn block_of(j: usize, n: usize, clusters: usize) -> usize {
    j * clusters / n
}

pub fn generate_planted_hin(params: &PlantedParams) -> Result<PlantedGraph> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let n = params.nodes_per_type;
    let c = params.clusters;
    let name = |t: &str, j: usize| format!("{t}{j}");

    let mut b = HinBuilder::new();
    let mut truth = Vec::with_capacity(n * params.types.len());
    for t in &params.types {
        b.declare_type(t);
        for j in 0..n {
            b.add_node(&name(t, j), t)
                .map_err(|e| Error::Planted(e.to_string()))?;
            truth.push((name(t, j), block_of(j, n, c)));
        }
    }
    let members: Vec<Vec<usize>> = (0..c)
        .map(|blk| (0..n).filter(|&j| block_of(j, n, c) == blk).collect())
        .collect();

    let mut instances = Vec::with_capacity(params.templates.len());
    for tpl in &params.templates {
        let spec = &tpl.motif;
        let mut planted = Vec::with_capacity(tpl.instances_per_block * c);
        for blk in 0..c {
            for _ in 0..tpl.instances_per_block {
                let intra = !rng.random_bool(tpl.noise);
                let mut chosen: Vec<(String, usize)> = Vec::with_capacity(spec.nodes.len());
                for node in &spec.nodes {
                    let home = if intra { blk } else { rng.random_range(0..c) };
                    let taken: Vec<usize> = chosen
                        .iter()
                        .filter(|(t, _)| *t == node.node_type)
                        .map(|&(_, j)| j)
                        .collect();
                    let pool: Vec<usize> = members[home]
                        .iter()
                        .copied()
                        .filter(|j| !taken.contains(j))
                        .collect();
                    // Cross-block picks may exhaust a block; fall back to any free node.
                    let j = match pool.choose(&mut rng) {
                        Some(&j) => j,
                        None => *(0..n)
                            .filter(|j| !taken.contains(j))
                            .collect::<Vec<_>>()
                            .choose(&mut rng)
                            .expect("validated block sizes"),
                    };
                    chosen.push((node.node_type.clone(), j));
                }
                let ids: Vec<String> = chosen.iter().map(|(t, j)| name(t, *j)).collect();
                for e in &spec.edges {
                    let s = spec.position_of(&e.src).expect("checked structure");
                    let d = spec.position_of(&e.dst).expect("checked structure");
                    b.add_edge(&ids[s], &ids[d], &e.etype, e.dir == Direction::Directed)
                        .map_err(|err| Error::Planted(err.to_string()))?;
                }
                planted.push(ids);
            }
        }
        instances.push(planted);
    }

    let seed_types: Vec<&String> = match &params.seed_types {
        Some(ts) => ts.iter().collect(),
        None => params.types.iter().collect(),
    };
    let mut seeds = Vec::new();
    if params.seed_fraction > 0.0 {
        for t in seed_types {
            if !params.types.contains(t) {
                return Err(Error::Planted(format!("seed type `{t}` is not declared")));
            }
            for (blk, m) in members.iter().enumerate() {
                let k = ((params.seed_fraction * m.len() as f64).round() as usize)
                    .max(1)
                    .min(m.len());
                let mut pool = m.clone();
                pool.shuffle(&mut rng);
                let mut picked = pool[..k].to_vec();
                picked.sort_unstable();
                seeds.extend(picked.into_iter().map(|j| (name(t, j), blk)));
            }
        }
    }

    Ok(PlantedGraph {
        hin: b.build(),
        truth,
        seeds,
        instances,
        motifs: params.templates.iter().map(|t| t.motif.clone()).collect(),
    })
}

/// A binary tensor with exactly `nnz` distinct non-zeros and a planted block
/// structure over `clusters` blocks per mode.
pub fn planted_tensor(
    dims: &[usize],
    clusters: usize,
    nnz: usize,
    noise: f64,
    rng_seed: u64,
) -> Result<SparseTensor> {
    let capacity: f64 = dims.iter().map(|&d| d as f64).product();
    if dims.is_empty() || dims.iter().any(|&d| d < clusters) || clusters == 0 {
        return Err(Error::Planted("every mode needs at least one node per block".into()));
    }
    if (nnz as f64) > 0.5 * capacity {
        return Err(Error::Planted(format!(
            "{nnz} non-zeros is too dense for dims {dims:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut seen = HashSet::with_capacity(nnz);
    let mut entries = Vec::with_capacity(nnz);
    while entries.len() < nnz {
        let blk = rng.random_range(0..clusters);
        let intra = !rng.random_bool(noise);
        let idx: Vec<usize> = dims
            .iter()
            .map(|&d| {
                let b = if intra { blk } else { rng.random_range(0..clusters) };
                let lo = b * d / clusters;
                let hi = (b + 1) * d / clusters;
                rng.random_range(lo..hi)
            })
            .collect();
        if seen.insert(idx.clone()) {
            entries.push((idx, 1.0));
        }
    }
    SparseTensor::new(dims.to_vec(), entries)
}
