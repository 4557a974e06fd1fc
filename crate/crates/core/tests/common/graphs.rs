//! Random typed graphs and motifs, and an exhaustive instance oracle that
//! only looks at the raw edge list.

use std::collections::{BTreeSet, HashSet};

use hinclust_core::motif::{Direction, MotifSpec, PatternEdgeSpec, PatternNodeSpec};
use hinclust_core::{Hin, HinBuilder, Motif};
use rand::Rng;

const TYPE_NAMES: [&str; 3] = ["A", "B", "C"];

/// A graph with at most `max_nodes` nodes over up to three node types and
/// three edge types with random endpoint types and directedness.
pub fn random_hin<R: Rng>(rng: &mut R, max_nodes: usize) -> Hin {
    let n_types = rng.random_range(1..=3);
    let mut b = HinBuilder::new();
    let mut nodes: Vec<(String, usize)> = Vec::new();
    for name in &TYPE_NAMES[..n_types] {
        b.declare_type(name);
    }
    let total = rng.random_range(n_types.max(2)..=max_nodes);
    for j in 0..total {
        let t = if j < n_types { j } else { rng.random_range(0..n_types) };
        let id = format!("{}{j}", TYPE_NAMES[t]);
        b.add_node(&id, TYPE_NAMES[t]).unwrap();
        nodes.push((id, t));
    }
    let n_etypes = rng.random_range(1..=3);
    for e in 0..n_etypes {
        let directed = rng.random_bool(0.5);
        let (ta, tb) = (rng.random_range(0..n_types), rng.random_range(0..n_types));
        let density = rng.random_range(0.15..0.6);
        for (i, (a, at)) in nodes.iter().enumerate() {
            for (j, (c, ct)) in nodes.iter().enumerate() {
                if i == j || *at != ta || *ct != tb || (!directed && i > j && ta == tb) {
                    continue;
                }
                if rng.random_bool(density) {
                    b.add_edge(a, c, &format!("e{e}"), directed).unwrap();
                }
            }
        }
    }
    b.build()
}

/// A connected motif of order ≤ `max_order` that the schema of `hin` admits,
/// or `None` when the graph has no edges.
pub fn random_motif<R: Rng>(rng: &mut R, hin: &Hin, max_order: usize) -> Option<MotifSpec> {
    // (etype name, directed, source type, target type)
    let mut schema = Vec::new();
    for e in 0..hin.num_edge_types() {
        let id = hinclust_core::EdgeTypeId(e as u32);
        let info = hin.edge_type_info(id);
        for &(s, d) in &info.endpoints {
            schema.push((
                hin.edge_type_name(id).to_owned(),
                info.directed,
                hin.node_type_name(s).to_owned(),
                hin.node_type_name(d).to_owned(),
            ));
        }
    }
    if schema.is_empty() {
        return None;
    }
    let order = rng.random_range(1..=max_order);
    let first = &schema[rng.random_range(0..schema.len())];
    let mut types = vec![first.2.clone()];
    let mut edges: Vec<PatternEdgeSpec> = Vec::new();
    let mk = |s: usize, d: usize, e: &str, dir: Direction| PatternEdgeSpec {
        src: format!("n{s}"),
        dst: format!("n{d}"),
        etype: e.to_owned(),
        dir,
    };
    while types.len() < order {
        let parent = rng.random_range(0..types.len());
        let options: Vec<_> = schema
            .iter()
            .filter(|s| s.2 == types[parent] || s.3 == types[parent])
            .collect();
        let Some(&(ref e, directed, ref st, ref dt)) = options.get(rng.random_range(0..options.len().max(1))).copied() else {
            break;
        };
        let child = types.len();
        let undirected_pattern = !directed || rng.random_bool(0.3);
        if *st == types[parent] && (rng.random_bool(0.5) || *dt != types[parent]) {
            types.push(dt.clone());
            let dir = if undirected_pattern { Direction::Undirected } else { Direction::Directed };
            edges.push(mk(parent, child, e, dir));
        } else {
            types.push(st.clone());
            let dir = if undirected_pattern { Direction::Undirected } else { Direction::Directed };
            edges.push(mk(child, parent, e, dir));
        }
    }
    // A few extra edges between already placed nodes.
    for _ in 0..rng.random_range(0..=2) {
        if types.len() < 2 {
            break;
        }
        let s = rng.random_range(0..types.len());
        let d = rng.random_range(0..types.len());
        if s == d {
            continue;
        }
        if let Some((e, directed, _, _)) = schema.iter().find(|x| x.2 == types[s] && x.3 == types[d]) {
            let dir = if *directed && rng.random_bool(0.7) { Direction::Directed } else { Direction::Undirected };
            edges.push(mk(s, d, e, dir));
        }
    }
    let injective_types = match rng.random_range(0..3) {
        0 => Some(Vec::new()),
        1 => Some(vec![types[0].clone()]),
        _ => None,
    };
    Some(MotifSpec {
        name: "rand".into(),
        nodes: types
            .iter()
            .enumerate()
            .map(|(i, t)| PatternNodeSpec {
                id: format!("n{i}"),
                node_type: t.clone(),
            })
            .collect(),
        edges,
        injective_types,
    })
}

/// Every tuple of dense indices (in pattern order) whose binding satisfies
/// all pattern edges and injectivity constraints, found by trying all of
/// `Π |V_t|` candidates against a set of raw edges.
pub fn brute_force_instances(hin: &Hin, spec: &MotifSpec) -> BTreeSet<Vec<u32>> {
    // (src type, src idx, dst type, dst idx, etype) for every stored
    // orientation; undirected edges are stored both ways.
    let mut arcs = HashSet::new();
    for e in hin.edges() {
        let fwd = (e.src.ty.0, e.src.index, e.dst.ty.0, e.dst.index, e.etype.0);
        arcs.insert(fwd);
        if !e.directed {
            arcs.insert((fwd.2, fwd.3, fwd.0, fwd.1, fwd.4));
        }
    }
    let types: Vec<u32> = spec
        .nodes
        .iter()
        .map(|n| hin.node_type_id(&n.node_type).unwrap().0)
        .collect();
    let pos = |id: &str| spec.nodes.iter().position(|n| n.id == id).unwrap();
    let edges: Vec<(usize, usize, u32, bool)> = spec
        .edges
        .iter()
        .map(|e| (pos(&e.src), pos(&e.dst), hin.edge_type_id(&e.etype).unwrap().0, e.dir == Direction::Directed))
        .collect();
    let injective: Vec<bool> = spec
        .nodes
        .iter()
        .map(|n| match &spec.injective_types {
            None => true,
            Some(ts) => ts.contains(&n.node_type),
        })
        .collect();
    let sizes: Vec<usize> = types
        .iter()
        .map(|&t| hin.type_size(hinclust_core::NodeTypeId(t)))
        .collect();
    let mut out = BTreeSet::new();
    if sizes.contains(&0) {
        return out;
    }
    let mut tuple = vec![0u32; types.len()];
    loop {
        let edges_ok = edges.iter().all(|&(s, d, e, directed)| {
            let a = (types[s], tuple[s], types[d], tuple[d], e);
            let b = (types[d], tuple[d], types[s], tuple[s], e);
            arcs.contains(&a) || (!directed && arcs.contains(&b))
        });
        let inj_ok = (0..types.len()).all(|i| {
            (i + 1..types.len()).all(|j| {
                !(types[i] == types[j] && injective[i] && tuple[i] == tuple[j])
            })
        });
        if edges_ok && inj_ok {
            out.insert(tuple.clone());
        }
        // Odometer increment.
        let mut k = types.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            tuple[k] += 1;
            if (tuple[k] as usize) < sizes[k] {
                break;
            }
            tuple[k] = 0;
        }
    }
}

pub fn enumerated(hin: &Hin, spec: &MotifSpec) -> BTreeSet<Vec<u32>> {
    let motif = Motif::resolve(spec, hin).unwrap();
    hinclust_core::enumerate_instances(hin, &motif)
        .unwrap()
        .tuples()
        .map(<[u32]>::to_vec)
        .collect()
}
