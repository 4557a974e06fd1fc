//! Typed heterogeneous graph storage.
//!
//! Nodes are addressed by `(type, dense index)`; dense indices follow the
//! order in which nodes were first declared. Adjacency is kept per edge type
//! as sorted CSR lists over a global node numbering in which every type owns
//! a contiguous range, so typed neighbor queries are a binary search away.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeTypeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeTypeId(pub u32);

impl NodeTypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeTypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A node addressed by its type and its dense index within that type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    pub ty: NodeTypeId,
    pub index: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: NodeRef,
    pub dst: NodeRef,
    pub etype: EdgeTypeId,
    pub directed: bool,
}

/// Schema-level facts about one edge type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeTypeInfo {
    pub directed: bool,
    /// `(source type, target type)` pairs observed for this edge type.
    pub endpoints: BTreeSet<(NodeTypeId, NodeTypeId)>,
}

impl EdgeTypeInfo {
    /// Whether an edge of this type may join `a` and `b`, in that orientation
    /// for directed types and in either orientation otherwise.
    pub fn connects(&self, a: NodeTypeId, b: NodeTypeId) -> bool {
        self.endpoints.contains(&(a, b)) || (!self.directed && self.endpoints.contains(&(b, a)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    fn build(num_nodes: usize, pairs: &mut [(u32, u32)]) -> Self {
        pairs.sort_unstable();
        let mut offsets = vec![0usize; num_nodes + 1];
        for &(s, _) in pairs.iter() {
            offsets[s as usize + 1] += 1;
        }
        for i in 0..num_nodes {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|&(_, t)| t).collect();
        Csr { offsets, targets }
    }

    fn row(&self, node: u32) -> &[u32] {
        let n = node as usize;
        &self.targets[self.offsets[n]..self.offsets[n + 1]]
    }
}

/// Immutable typed graph. Build one with [`HinBuilder`] or [`load_hin`].
#[derive(Clone, Debug)]
pub struct Hin {
    node_types: IndexSet<String>,
    edge_types: IndexSet<String>,
    nodes_by_type: Vec<Vec<String>>,
    lookup: HashMap<String, NodeRef>,
    type_offsets: Vec<u32>,
    edges: Vec<Edge>,
    edge_info: Vec<EdgeTypeInfo>,
    forward: Vec<Csr>,
    reverse: Vec<Csr>,
}

impl PartialEq for Hin {
    fn eq(&self, other: &Self) -> bool {
        self.node_types.iter().eq(other.node_types.iter())
            && self.edge_types.iter().eq(other.edge_types.iter())
            && self.nodes_by_type == other.nodes_by_type
            && self.edges == other.edges
            && self.edge_info == other.edge_info
            && self.forward == other.forward
            && self.reverse == other.reverse
    }
}

impl Hin {
    pub fn num_node_types(&self) -> usize {
        self.node_types.len()
    }

    pub fn num_edge_types(&self) -> usize {
        self.edge_types.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.lookup.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_type_id(&self, name: &str) -> Option<NodeTypeId> {
        self.node_types.get_index_of(name).map(|i| NodeTypeId(i as u32))
    }

    pub fn edge_type_id(&self, name: &str) -> Option<EdgeTypeId> {
        self.edge_types.get_index_of(name).map(|i| EdgeTypeId(i as u32))
    }

    pub fn node_type_name(&self, t: NodeTypeId) -> &str {
        &self.node_types[t.index()]
    }

    pub fn edge_type_name(&self, e: EdgeTypeId) -> &str {
        &self.edge_types[e.index()]
    }

    pub fn node_type_ids(&self) -> impl Iterator<Item = NodeTypeId> {
        (0..self.node_types.len() as u32).map(NodeTypeId)
    }

    pub fn edge_type_info(&self, e: EdgeTypeId) -> &EdgeTypeInfo {
        &self.edge_info[e.index()]
    }

    /// Nodes of type `t` in dense-index order.
    pub fn nodes_of_type(&self, t: NodeTypeId) -> Result<&[String]> {
        self.nodes_by_type
            .get(t.index())
            .map(Vec::as_slice)
            .ok_or(Error::UnknownTypeId(t.index()))
    }

    /// `|V_t|` for every type, indexed by type id.
    pub fn type_sizes(&self) -> Vec<usize> {
        self.nodes_by_type.iter().map(Vec::len).collect()
    }

    pub fn type_size(&self, t: NodeTypeId) -> usize {
        self.nodes_by_type[t.index()].len()
    }

    pub fn node(&self, id: &str) -> Option<NodeRef> {
        self.lookup.get(id).copied()
    }

    pub fn node_name(&self, n: NodeRef) -> &str {
        &self.nodes_by_type[n.ty.index()][n.index as usize]
    }

    pub(crate) fn global_id(&self, n: NodeRef) -> u32 {
        self.type_offsets[n.ty.index()] + n.index
    }

    pub(crate) fn type_range(&self, t: NodeTypeId) -> (u32, u32) {
        (self.type_offsets[t.index()], self.type_offsets[t.index() + 1])
    }

    fn node_ref(&self, global: u32) -> NodeRef {
        let ty = self.type_offsets.partition_point(|&o| o <= global) - 1;
        NodeRef {
            ty: NodeTypeId(ty as u32),
            index: global - self.type_offsets[ty],
        }
    }

    /// Sorted global ids reachable from `global` along `e` (both directions
    /// for undirected types).
    pub(crate) fn forward_global(&self, e: EdgeTypeId, global: u32) -> &[u32] {
        self.forward[e.index()].row(global)
    }

    /// Sorted global ids with an `e` edge pointing at `global`.
    pub(crate) fn reverse_global(&self, e: EdgeTypeId, global: u32) -> &[u32] {
        self.reverse[e.index()].row(global)
    }

    pub(crate) fn has_forward_global(&self, e: EdgeTypeId, src: u32, dst: u32) -> bool {
        self.forward_global(e, src).binary_search(&dst).is_ok()
    }

    /// Out-neighbors under `e`; for undirected types this is every neighbor.
    pub fn neighbors(&self, e: EdgeTypeId, n: NodeRef) -> impl Iterator<Item = NodeRef> + '_ {
        self.forward_global(e, self.global_id(n))
            .iter()
            .map(move |&g| self.node_ref(g))
    }

    /// In-neighbors under `e`; identical to [`Hin::neighbors`] for undirected types.
    pub fn in_neighbors(&self, e: EdgeTypeId, n: NodeRef) -> impl Iterator<Item = NodeRef> + '_ {
        self.reverse_global(e, self.global_id(n))
            .iter()
            .map(move |&g| self.node_ref(g))
    }

    /// Whether `src -> dst` is present under `e` (order-free for undirected types).
    pub fn has_edge(&self, e: EdgeTypeId, src: NodeRef, dst: NodeRef) -> bool {
        self.has_forward_global(e, self.global_id(src), self.global_id(dst))
    }

    /// Number of incident edges over all edge types.
    pub fn degree(&self, n: NodeRef) -> usize {
        let g = self.global_id(n);
        (0..self.edge_types.len())
            .map(|e| {
                let e = EdgeTypeId(e as u32);
                if self.edge_info[e.index()].directed {
                    self.forward_global(e, g).len() + self.reverse_global(e, g).len()
                } else {
                    self.forward_global(e, g).len()
                }
            })
            .sum()
    }

    /// Writes the nodes TSV. A `#types` line is emitted first so that types
    /// without nodes survive a reload.
    pub fn write_nodes<W: Write>(&self, mut w: W) -> io::Result<()> {
        let names: Vec<&str> = self.node_types.iter().map(String::as_str).collect();
        writeln!(w, "#types\t{}", names.join("\t"))?;
        // Interleaving by type would reorder first appearance; group by type instead.
        for (t, nodes) in self.nodes_by_type.iter().enumerate() {
            for id in nodes {
                writeln!(w, "{}\t{}", id, self.node_types[t])?;
            }
        }
        Ok(())
    }

    pub fn write_edges<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.edges {
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                self.node_name(e.src),
                self.node_name(e.dst),
                self.edge_types[e.etype.index()],
                if e.directed { "d" } else { "u" }
            )?;
        }
        Ok(())
    }

    pub fn save(&self, nodes_path: &Path, edges_path: &Path) -> Result<()> {
        let write = |path: &Path, f: &dyn Fn(&mut BufWriter<File>) -> io::Result<()>| {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
        };
        write(nodes_path, &|w| self.write_nodes(w))?;
        write(edges_path, &|w| self.write_edges(w))
    }
}

/// Why a builder call was rejected; the loader attaches file and line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildError {
    DuplicateNode(String),
    UnknownNode(String),
    SelfLoop(String),
    MixedDirection(String),
    TooManyNodes,
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::DuplicateNode(id) => write!(f, "duplicate node id `{id}`"),
            BuildError::UnknownNode(id) => write!(f, "edge references unknown node id `{id}`"),
            BuildError::SelfLoop(id) => write!(f, "self-loop on node `{id}` is not allowed"),
            BuildError::MixedDirection(e) => {
                write!(f, "edge type `{e}` is used both directed and undirected")
            }
            BuildError::TooManyNodes => write!(f, "node count exceeds the 32-bit index width"),
        }
    }
}

impl std::error::Error for BuildError {}

impl From<BuildError> for Error {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::UnknownNode(id) => Error::UnknownNode(id),
            other => Error::parse("<builder>", 0, other.to_string()),
        }
    }
}

#[derive(Debug, Default)]
pub struct HinBuilder {
    node_types: IndexSet<String>,
    edge_types: IndexSet<String>,
    nodes_by_type: Vec<Vec<String>>,
    lookup: HashMap<String, NodeRef>,
    edges: Vec<Edge>,
    edge_info: Vec<EdgeTypeInfo>,
    seen: HashSet<(NodeRef, NodeRef, EdgeTypeId)>,
    duplicates: usize,
}

impl HinBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns a node type; idempotent.
    pub fn declare_type(&mut self, name: &str) -> NodeTypeId {
        let (idx, fresh) = self.node_types.insert_full(name.to_owned());
        if fresh {
            self.nodes_by_type.push(Vec::new());
        }
        NodeTypeId(idx as u32)
    }

    pub fn add_node(&mut self, id: &str, type_name: &str) -> Result<NodeRef, BuildError> {
        if self.lookup.contains_key(id) {
            return Err(BuildError::DuplicateNode(id.to_owned()));
        }
        if self.lookup.len() >= u32::MAX as usize {
            return Err(BuildError::TooManyNodes);
        }
        let ty = self.declare_type(type_name);
        let list = &mut self.nodes_by_type[ty.index()];
        let node = NodeRef {
            ty,
            index: list.len() as u32,
        };
        list.push(id.to_owned());
        self.lookup.insert(id.to_owned(), node);
        Ok(node)
    }

    /// Adds an edge. Returns `Ok(false)` when it duplicates an existing edge
    /// and was dropped.
    pub fn add_edge(
        &mut self,
        src: &str,
        dst: &str,
        etype: &str,
        directed: bool,
    ) -> Result<bool, BuildError> {
        let s = *self
            .lookup
            .get(src)
            .ok_or_else(|| BuildError::UnknownNode(src.to_owned()))?;
        let d = *self
            .lookup
            .get(dst)
            .ok_or_else(|| BuildError::UnknownNode(dst.to_owned()))?;
        if s == d {
            return Err(BuildError::SelfLoop(src.to_owned()));
        }
        let (e_idx, fresh) = self.edge_types.insert_full(etype.to_owned());
        let e = EdgeTypeId(e_idx as u32);
        if fresh {
            self.edge_info.push(EdgeTypeInfo {
                directed,
                endpoints: BTreeSet::new(),
            });
        } else if self.edge_info[e_idx].directed != directed {
            return Err(BuildError::MixedDirection(etype.to_owned()));
        }
        let key = if directed || s <= d { (s, d, e) } else { (d, s, e) };
        if !self.seen.insert(key) {
            self.duplicates += 1;
            return Ok(false);
        }
        self.edge_info[e_idx].endpoints.insert((s.ty, d.ty));
        self.edges.push(Edge {
            src: s,
            dst: d,
            etype: e,
            directed,
        });
        Ok(true)
    }

    pub fn build(self) -> Hin {
        if self.duplicates > 0 {
            log::warn!("dropped {} duplicate parallel edge(s)", self.duplicates);
        }
        let mut type_offsets = Vec::with_capacity(self.nodes_by_type.len() + 1);
        let mut acc = 0u32;
        type_offsets.push(0);
        for nodes in &self.nodes_by_type {
            acc += nodes.len() as u32;
            type_offsets.push(acc);
        }
        let num_nodes = acc as usize;
        let gid = |n: NodeRef| type_offsets[n.ty.index()] + n.index;

        let mut fwd: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.edge_types.len()];
        let mut rev: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.edge_types.len()];
        for e in &self.edges {
            let (s, d) = (gid(e.src), gid(e.dst));
            let k = e.etype.index();
            if e.directed {
                fwd[k].push((s, d));
                rev[k].push((d, s));
            } else {
                fwd[k].push((s, d));
                fwd[k].push((d, s));
                rev[k].push((s, d));
                rev[k].push((d, s));
            }
        }
        let forward = fwd.iter_mut().map(|p| Csr::build(num_nodes, p)).collect();
        let reverse = rev.iter_mut().map(|p| Csr::build(num_nodes, p)).collect();

        Hin {
            node_types: self.node_types,
            edge_types: self.edge_types,
            nodes_by_type: self.nodes_by_type,
            lookup: self.lookup,
            type_offsets,
            edges: self.edges,
            edge_info: self.edge_info,
            forward,
            reverse,
        }
    }
}

fn content_lines<R: BufRead>(reader: R, path: &str) -> impl Iterator<Item = Result<(usize, String)>> {
    let path = path.to_owned();
    reader.lines().enumerate().filter_map(move |(i, line)| match line {
        Err(e) => Some(Err(Error::io(path.clone(), e))),
        Ok(l) => {
            let l = l.strip_suffix('\r').map(str::to_owned).unwrap_or(l);
            if l.trim().is_empty() {
                None
            } else {
                Some(Ok((i + 1, l)))
            }
        }
    })
}

/// Parses nodes and edges TSV streams. `nodes_name` and `edges_name` are used
/// in diagnostics only.
pub fn read_hin<N: BufRead, E: BufRead>(
    nodes: N,
    nodes_name: &str,
    edges: E,
    edges_name: &str,
) -> Result<Hin> {
    let mut b = HinBuilder::new();
    for item in content_lines(nodes, nodes_name) {
        let (line_no, line) = item?;
        if let Some(rest) = line.strip_prefix("#types") {
            for name in rest.split(['\t', ' ']).filter(|s| !s.is_empty()) {
                b.declare_type(name);
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(Error::parse(
                nodes_name,
                line_no,
                format!("expected 2 tab-separated columns, found {}", cols.len()),
            ));
        }
        if cols[0].is_empty() || cols[1].is_empty() {
            return Err(Error::parse(nodes_name, line_no, "empty node id or type"));
        }
        b.add_node(cols[0], cols[1])
            .map_err(|e| Error::parse(nodes_name, line_no, e.to_string()))?;
    }
    for item in content_lines(edges, edges_name) {
        let (line_no, line) = item?;
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::parse(
                edges_name,
                line_no,
                format!("expected 4 tab-separated columns, found {}", cols.len()),
            ));
        }
        let directed = match cols[3] {
            "d" => true,
            "u" => false,
            other => {
                return Err(Error::parse(
                    edges_name,
                    line_no,
                    format!("direction must be `d` or `u`, found `{other}`"),
                ))
            }
        };
        if cols[2].is_empty() {
            return Err(Error::parse(edges_name, line_no, "empty edge type"));
        }
        let added = b
            .add_edge(cols[0], cols[1], cols[2], directed)
            .map_err(|e| Error::parse(edges_name, line_no, e.to_string()))?;
        if !added {
            log::warn!("{edges_name}:{line_no}: duplicate edge dropped");
        }
    }
    Ok(b.build())
}

/// Loads a graph from a nodes TSV and an edges TSV.
pub fn load_hin(nodes_path: &Path, edges_path: &Path) -> Result<Hin> {
    let open = |p: &Path| {
        File::open(p)
            .map(BufReader::new)
            .map_err(|e| Error::io(p, e))
    };
    read_hin(
        open(nodes_path)?,
        &nodes_path.display().to_string(),
        open(edges_path)?,
        &edges_path.display().to_string(),
    )
}
