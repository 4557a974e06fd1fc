use rayon::prelude::*;

use super::{Motif, MotifInstanceSet};
use crate::error::{Error, Result};
use crate::hin::{EdgeTypeId, Hin};

#[derive(Clone, Copy, Debug)]
enum Reach {
    Forward,
    Reverse,
    Either,
}

#[derive(Clone, Copy, Debug)]
struct Anchor {
    bound: usize,
    etype: EdgeTypeId,
    reach: Reach,
}

#[derive(Clone, Copy, Debug)]
struct EdgeCheck {
    src: usize,
    dst: usize,
    etype: EdgeTypeId,
    directed: bool,
}

#[derive(Debug)]
struct Step {
    pos: usize,
    range: (u32, u32),
    anchor: Option<Anchor>,
    checks: Vec<EdgeCheck>,
    distinct_from: Vec<usize>,
}

/// Static visiting order: start at the smallest type, then repeatedly take
/// the smallest unbound node adjacent to the bound set (ties by position).
fn plan(hin: &Hin, motif: &Motif) -> Vec<Step> {
    let n = motif.order();
    let size = |p: usize| hin.type_size(motif.node_types[p]);
    let mut bound = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let first = (0..n).min_by_key(|&p| (size(p), p)).expect("non-empty motif");
    bound[first] = true;
    order.push(first);
    while order.len() < n {
        let next = (0..n)
            .filter(|&p| !bound[p])
            .filter(|&p| {
                motif
                    .edges
                    .iter()
                    .any(|e| (e.src == p && bound[e.dst]) || (e.dst == p && bound[e.src]))
            })
            .min_by_key(|&p| (size(p), p))
            .expect("motif pattern is connected");
        bound[next] = true;
        order.push(next);
    }

    let mut placed = vec![false; n];
    let mut steps = Vec::with_capacity(n);
    for &p in &order {
        let mut anchor = None;
        let mut checks = Vec::new();
        for e in &motif.edges {
            let other = if e.src == p {
                e.dst
            } else if e.dst == p {
                e.src
            } else {
                continue;
            };
            if !placed[other] {
                continue;
            }
            if anchor.is_none() {
                let undirected_type = !hin.edge_type_info(e.etype).directed;
                let reach = if undirected_type {
                    Reach::Forward
                } else if !e.directed {
                    Reach::Either
                } else if e.dst == p {
                    Reach::Forward
                } else {
                    Reach::Reverse
                };
                anchor = Some(Anchor {
                    bound: other,
                    etype: e.etype,
                    reach,
                });
            } else {
                checks.push(EdgeCheck {
                    src: e.src,
                    dst: e.dst,
                    etype: e.etype,
                    directed: e.directed,
                });
            }
        }
        let distinct_from = (0..n)
            .filter(|&q| placed[q] && motif.must_differ(p, q))
            .collect();
        steps.push(Step {
            pos: p,
            range: hin.type_range(motif.node_types[p]),
            anchor,
            checks,
            distinct_from,
        });
        placed[p] = true;
    }
    steps
}

fn typed_slice(list: &[u32], (lo, hi): (u32, u32)) -> &[u32] {
    let a = list.partition_point(|&g| g < lo);
    let b = list.partition_point(|&g| g < hi);
    &list[a..b]
}

struct Matcher<'a> {
    hin: &'a Hin,
    steps: &'a [Step],
    offsets: Vec<u32>,
}

impl Matcher<'_> {
    fn candidates(&self, step: &Step, binding: &[u32], scratch: &mut Vec<u32>) {
        scratch.clear();
        let a = step.anchor.expect("non-root step has an anchor");
        let g = binding[a.bound];
        match a.reach {
            Reach::Forward => {
                scratch.extend_from_slice(typed_slice(self.hin.forward_global(a.etype, g), step.range))
            }
            Reach::Reverse => {
                scratch.extend_from_slice(typed_slice(self.hin.reverse_global(a.etype, g), step.range))
            }
            Reach::Either => {
                scratch.extend_from_slice(typed_slice(self.hin.forward_global(a.etype, g), step.range));
                scratch.extend_from_slice(typed_slice(self.hin.reverse_global(a.etype, g), step.range));
                scratch.sort_unstable();
                scratch.dedup();
            }
        }
    }

    fn admissible(&self, step: &Step, binding: &[u32], g: u32) -> bool {
        if step.distinct_from.iter().any(|&q| binding[q] == g) {
            return false;
        }
        step.checks.iter().all(|c| {
            let s = if c.src == step.pos { g } else { binding[c.src] };
            let d = if c.dst == step.pos { g } else { binding[c.dst] };
            self.hin.has_forward_global(c.etype, s, d)
                || (!c.directed && self.hin.has_forward_global(c.etype, d, s))
        })
    }

    fn extend(&self, depth: usize, binding: &mut [u32], out: &mut Vec<Vec<u32>>) {
        if depth == self.steps.len() {
            out.push(
                binding
                    .iter()
                    .zip(&self.offsets)
                    .map(|(&g, &o)| g - o)
                    .collect(),
            );
            return;
        }
        let step = &self.steps[depth];
        let mut cands = Vec::new();
        self.candidates(step, binding, &mut cands);
        for g in cands {
            if self.admissible(step, binding, g) {
                binding[step.pos] = g;
                self.extend(depth + 1, binding, out);
            }
        }
    }
}

/// Every tuple `T` such that binding pattern position `i` to node `T[i]`
/// satisfies all pattern edges and injectivity constraints. Tuples are
/// returned sorted; work is split over the candidates of the first visited
/// position.
pub fn enumerate_instances(hin: &Hin, motif: &Motif) -> Result<MotifInstanceSet> {
    for &t in &motif.node_types {
        if t.index() >= hin.num_node_types() {
            return Err(Error::UnknownTypeId(t.index()));
        }
    }
    let dims = motif.dims(hin);
    let steps = plan(hin, motif);
    let matcher = Matcher {
        hin,
        steps: &steps,
        offsets: motif.node_types.iter().map(|&t| hin.type_range(t).0).collect(),
    };
    let root = &steps[0];
    let (lo, hi) = root.range;
    let per_root: Vec<Vec<Vec<u32>>> = (lo..hi)
        .into_par_iter()
        .map(|g| {
            let mut binding = vec![0u32; motif.order()];
            binding[root.pos] = g;
            let mut out = Vec::new();
            matcher.extend(1, &mut binding, &mut out);
            out
        })
        .collect();
    let tuples = per_root.into_iter().flatten().collect();
    Ok(MotifInstanceSet::from_tuples(motif.clone(), dims, tuples))
}
