use std::io::BufRead;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::hin::{Hin, NodeRef};

/// A user-labeled node: `node` must end up in cluster `label`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Seed {
    pub node: NodeRef,
    pub label: usize,
}

/// Reads `node_id<TAB>cluster_index` lines and resolves ids against `hin`.
pub fn read_seeds<R: BufRead>(reader: R, name: &str, hin: &Hin) -> Result<Vec<Seed>> {
    let mut seeds = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(name, e))?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(Error::parse(name, i + 1, "expected `node_id<TAB>cluster_index`"));
        }
        let node = hin
            .node(cols[0])
            .ok_or_else(|| Error::parse(name, i + 1, format!("unknown node `{}`", cols[0])))?;
        let label = cols[1]
            .trim()
            .parse()
            .map_err(|e| Error::parse(name, i + 1, format!("bad cluster index: {e}")))?;
        seeds.push(Seed { node, label });
    }
    Ok(seeds)
}

/// Per-type `C × |V_t|` 0/1 matrices; entry `(c, j)` is 1 iff node `j` is a
/// seed that must not land in cluster `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedMask {
    masks: Vec<Array2<f64>>,
    seeds: Vec<Seed>,
}

impl SeedMask {
    pub fn new(clusters: usize, type_sizes: &[usize], seeds: &[Seed]) -> Result<Self> {
        let mut masks: Vec<Array2<f64>> = type_sizes
            .iter()
            .map(|&n| Array2::zeros((clusters, n)))
            .collect();
        let mut labels: Vec<Vec<Option<usize>>> =
            type_sizes.iter().map(|&n| vec![None; n]).collect();
        for s in seeds {
            let t = s.node.ty.index();
            let j = s.node.index as usize;
            if t >= type_sizes.len() || j >= type_sizes[t] {
                return Err(Error::InvalidSeed(format!("seed references unknown node {:?}", s.node)));
            }
            if s.label >= clusters {
                return Err(Error::InvalidSeed(format!(
                    "seed label {} is not below the cluster count {clusters}",
                    s.label
                )));
            }
            match labels[t][j] {
                Some(l) if l != s.label => {
                    return Err(Error::InvalidSeed(format!(
                        "node {:?} is seeded with both {l} and {}",
                        s.node, s.label
                    )))
                }
                _ => labels[t][j] = Some(s.label),
            }
            let mut col = masks[t].column_mut(j);
            col.fill(1.0);
            col[s.label] = 0.0;
        }
        let mut seeds = seeds.to_vec();
        seeds.sort();
        seeds.dedup();
        Ok(SeedMask { masks, seeds })
    }

    pub fn for_type(&self, t: usize) -> &Array2<f64> {
        &self.masks[t]
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hin::NodeTypeId;

    fn seed(t: u32, j: u32, label: usize) -> Seed {
        Seed {
            node: NodeRef { ty: NodeTypeId(t), index: j },
            label,
        }
    }

    #[test]
    fn seed_column_masks_all_but_label() {
        let m = SeedMask::new(3, &[4], &[seed(0, 1, 2)]).unwrap();
        let a = m.for_type(0);
        assert_eq!(a.column(1).to_vec(), vec![1.0, 1.0, 0.0]);
        for j in [0, 2, 3] {
            assert!(a.column(j).iter().all(|&v| v == 0.0));
        }
        assert_eq!(a.column(1).sum(), 2.0);
    }

    #[test]
    fn bad_seeds_rejected() {
        assert!(SeedMask::new(3, &[4], &[seed(0, 1, 3)]).is_err());
        assert!(SeedMask::new(3, &[4], &[seed(0, 9, 0)]).is_err());
        assert!(SeedMask::new(3, &[4], &[seed(1, 0, 0)]).is_err());
        assert!(SeedMask::new(3, &[4], &[seed(0, 1, 0), seed(0, 1, 1)]).is_err());
    }
}
