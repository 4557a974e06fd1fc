//! Typed motif patterns, instance enumeration and tensor transcription.
//!
//! Matching is non-induced: a motif instance must contain every pattern edge,
//! but extra graph edges among the matched nodes are allowed.

mod enumerate;

use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hin::{EdgeTypeId, Hin, NodeTypeId};
use crate::tensor::SparseTensor;

pub use enumerate::enumerate_instances;

/// JSON form of a motif, before it is resolved against a graph schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifSpec {
    pub name: String,
    pub nodes: Vec<PatternNodeSpec>,
    #[serde(default)]
    pub edges: Vec<PatternEdgeSpec>,
    /// Types whose pattern nodes must bind distinct graph nodes. `None` means all types.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injective_types: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternNodeSpec {
    pub id: String,
    #[serde(rename = "type")]
    pub node_type: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternEdgeSpec {
    pub src: String,
    pub dst: String,
    pub etype: String,
    pub dir: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "d")]
    Directed,
    #[serde(rename = "u")]
    Undirected,
}

impl MotifSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("motif spec serializes")
    }

    /// Index of every pattern node by id, rejecting duplicates.
    pub(crate) fn position_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Checks that the pattern is non-empty, ids are unique, edges reference
    /// declared nodes and the pattern is connected. Schema checks happen in
    /// [`Motif::resolve`].
    pub fn check_structure(&self) -> Result<Vec<(usize, usize)>> {
        let bad = |reason: String| Error::InvalidMotif {
            motif: self.name.clone(),
            reason,
        };
        if self.nodes.is_empty() {
            return Err(bad("pattern has no nodes".into()));
        }
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(bad(format!("duplicate pattern node id `{}`", n.id)));
            }
        }
        let mut pairs = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let s = self
                .position_of(&e.src)
                .ok_or_else(|| bad(format!("edge {k} references unknown pattern node `{}`", e.src)))?;
            let d = self
                .position_of(&e.dst)
                .ok_or_else(|| bad(format!("edge {k} references unknown pattern node `{}`", e.dst)))?;
            if s == d {
                return Err(bad(format!("edge {k} is a self-loop on `{}`", e.src)));
            }
            pairs.push((s, d));
        }
        if !is_connected(self.nodes.len(), &pairs) {
            return Err(bad("pattern is disconnected".into()));
        }
        Ok(pairs)
    }
}

fn is_connected(n: usize, pairs: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in pairs {
            let other = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                stack.push(other);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatternEdge {
    pub src: usize,
    pub dst: usize,
    pub etype: EdgeTypeId,
    /// When false the edge may be matched in either orientation.
    pub directed: bool,
}

/// A motif resolved against a graph schema. Position `i` in `node_types` is
/// the `i`-th tensor mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Motif {
    pub name: String,
    pub node_ids: Vec<String>,
    pub node_types: Vec<NodeTypeId>,
    pub edges: Vec<PatternEdge>,
    pub injective_types: BTreeSet<NodeTypeId>,
}

impl Motif {
    /// Validates `spec` against the types and edge types of `hin`.
    pub fn resolve(spec: &MotifSpec, hin: &Hin) -> Result<Self> {
        let pairs = spec.check_structure()?;
        let bad = |reason: String| Error::InvalidMotif {
            motif: spec.name.clone(),
            reason,
        };
        let node_types = spec
            .nodes
            .iter()
            .map(|n| {
                hin.node_type_id(&n.node_type)
                    .ok_or_else(|| Error::UnknownNodeType(n.node_type.clone()))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut edges = Vec::with_capacity(spec.edges.len());
        for (e, &(s, d)) in spec.edges.iter().zip(&pairs) {
            let etype = hin
                .edge_type_id(&e.etype)
                .ok_or_else(|| Error::UnknownEdgeType(e.etype.clone()))?;
            let info = hin.edge_type_info(etype);
            let directed = e.dir == Direction::Directed;
            if directed && !info.directed {
                return Err(bad(format!(
                    "edge {}->{} is declared directed but `{}` is undirected",
                    e.src, e.dst, e.etype
                )));
            }
            let (ts, td) = (node_types[s], node_types[d]);
            let ok = if directed {
                info.connects(ts, td)
            } else {
                info.connects(ts, td) || info.connects(td, ts)
            };
            if !ok {
                return Err(bad(format!(
                    "edge {}->{} of type `{}` cannot join `{}` and `{}`",
                    e.src,
                    e.dst,
                    e.etype,
                    hin.node_type_name(ts),
                    hin.node_type_name(td)
                )));
            }
            edges.push(PatternEdge {
                src: s,
                dst: d,
                etype,
                directed,
            });
        }

        let injective_types = match &spec.injective_types {
            None => node_types.iter().copied().collect(),
            Some(names) => names
                .iter()
                .map(|n| hin.node_type_id(n).ok_or_else(|| Error::UnknownNodeType(n.clone())))
                .collect::<Result<_>>()?,
        };

        Ok(Motif {
            name: spec.name.clone(),
            node_ids: spec.nodes.iter().map(|n| n.id.clone()).collect(),
            node_types,
            edges,
            injective_types,
        })
    }

    /// `o(m)`, the number of pattern nodes.
    pub fn order(&self) -> usize {
        self.node_types.len()
    }

    /// Tensor dimensions `(|V_{t_1}|, ..., |V_{t_N}|)`.
    pub fn dims(&self, hin: &Hin) -> Vec<usize> {
        self.node_types.iter().map(|&t| hin.type_size(t)).collect()
    }

    /// Number of pattern nodes sharing the type of position `i`.
    pub fn same_type_count(&self, i: usize) -> usize {
        let t = self.node_types[i];
        self.node_types.iter().filter(|&&u| u == t).count()
    }

    pub(crate) fn must_differ(&self, i: usize, j: usize) -> bool {
        self.node_types[i] == self.node_types[j] && self.injective_types.contains(&self.node_types[i])
    }

    /// Re-checks one tuple against the graph: every pattern edge present and
    /// every injectivity constraint respected.
    pub fn matches(&self, hin: &Hin, tuple: &[u32]) -> bool {
        if tuple.len() != self.order() {
            return false;
        }
        for (i, (&t, &j)) in self.node_types.iter().zip(tuple).enumerate() {
            if j as usize >= hin.type_size(t) {
                return false;
            }
            if (0..i).any(|k| self.must_differ(i, k) && tuple[k] == j) {
                return false;
            }
        }
        let g = |i: usize| {
            hin.global_id(crate::hin::NodeRef {
                ty: self.node_types[i],
                index: tuple[i],
            })
        };
        self.edges.iter().all(|e| {
            let (s, d) = (g(e.src), g(e.dst));
            hin.has_forward_global(e.etype, s, d)
                || (!e.directed && hin.has_forward_global(e.etype, d, s))
        })
    }
}

/// Parses a motif JSON document and resolves it against `hin`.
pub fn parse_motif(spec_text: &str, hin: &Hin) -> Result<Motif> {
    Motif::resolve(&MotifSpec::from_json(spec_text)?, hin)
}

/// All matches of one motif, as sorted, duplicate-free index tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotifInstanceSet {
    pub motif: Motif,
    dims: Vec<usize>,
    flat: Vec<u32>,
}

impl MotifInstanceSet {
    /// Builds a set from arbitrary tuples; sorts and deduplicates them.
    pub fn from_tuples(motif: Motif, dims: Vec<usize>, mut tuples: Vec<Vec<u32>>) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        let flat = tuples.into_iter().flatten().collect();
        MotifInstanceSet { motif, dims, flat }
    }

    pub fn len(&self) -> usize {
        if self.motif.order() == 0 {
            0
        } else {
            self.flat.len() / self.motif.order()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn tuples(&self) -> impl ExactSizeIterator<Item = &[u32]> {
        self.flat.chunks_exact(self.motif.order().max(1))
    }

    /// `#dims` header followed by one tab-separated tuple per line.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write_dims_header(&mut w, &self.dims)?;
        for t in self.tuples() {
            let cols: Vec<String> = t.iter().map(u32::to_string).collect();
            writeln!(w, "{}", cols.join("\t"))?;
        }
        Ok(())
    }

    /// Reads tuples written by [`MotifInstanceSet::write_tsv`].
    pub fn read_tsv<R: BufRead>(motif: Motif, reader: R, name: &str) -> Result<Self> {
        let mut dims = None;
        let mut tuples = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(name, e))?;
            if let Some(rest) = line.strip_prefix("#dims") {
                dims = Some(parse_dims(rest, name, i + 1)?);
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let t = line
                .split('\t')
                .map(|c| c.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(name, i + 1, e.to_string()))?;
            if t.len() != motif.order() {
                return Err(Error::parse(name, i + 1, "tuple arity does not match motif"));
            }
            tuples.push(t);
        }
        let dims = dims.ok_or_else(|| Error::parse(name, 1, "missing #dims header"))?;
        Ok(Self::from_tuples(motif, dims, tuples))
    }
}

pub(crate) fn write_dims_header<W: Write>(w: &mut W, dims: &[usize]) -> io::Result<()> {
    let d: Vec<String> = dims.iter().map(usize::to_string).collect();
    writeln!(w, "#dims {}", d.join(" "))
}

pub(crate) fn parse_dims(rest: &str, name: &str, line: usize) -> Result<Vec<usize>> {
    rest.split_whitespace()
        .map(|d| d.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::parse(name, line, format!("bad #dims header: {e}")))
}

/// Encodes an instance set as a binary tensor with one mode per pattern position.
pub fn transcribe(instances: &MotifInstanceSet, hin: &Hin) -> Result<SparseTensor> {
    let dims = instances.motif.dims(hin);
    if dims != instances.dims {
        return Err(Error::Shape(format!(
            "instance set dims {:?} do not match graph dims {:?}",
            instances.dims, dims
        )));
    }
    SparseTensor::from_sorted_binary(dims, instances.flat.clone())
}
