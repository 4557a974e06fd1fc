//! Clustering quality: accuracy (= micro-F1), macro-F1 and NMI.
//!
//! Predicted cluster `c` is compared directly with true label `c`; seeds fix
//! the correspondence, so no label matching is attempted.

use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aligned predicted and true labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPartition {
    pred: Vec<usize>,
    truth: Vec<usize>,
    classes: usize,
}

impl LabeledPartition {
    pub fn new(pred: Vec<usize>, truth: Vec<usize>) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::InvalidPartition(format!(
                "{} predictions for {} true labels",
                pred.len(),
                truth.len()
            )));
        }
        if pred.is_empty() {
            return Err(Error::EmptyPartition);
        }
        let classes = pred.iter().chain(&truth).max().map_or(0, |m| m + 1);
        Ok(LabeledPartition {
            pred,
            truth,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.pred.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pred.is_empty()
    }

    pub fn pred(&self) -> &[usize] {
        &self.pred
    }

    pub fn truth(&self) -> &[usize] {
        &self.truth
    }

    /// Swaps the roles of prediction and truth.
    pub fn swapped(&self) -> Self {
        LabeledPartition {
            pred: self.truth.clone(),
            truth: self.pred.clone(),
            classes: self.classes,
        }
    }

    /// Per-class (true positives, false positives, false negatives).
    fn confusion(&self) -> Vec<(usize, usize, usize)> {
        let mut counts = vec![(0, 0, 0); self.classes];
        for (&p, &t) in self.pred.iter().zip(&self.truth) {
            if p == t {
                counts[p].0 += 1;
            } else {
                counts[p].1 += 1;
                counts[t].2 += 1;
            }
        }
        counts
    }
}

pub fn accuracy(p: &LabeledPartition) -> f64 {
    let correct = p.pred.iter().zip(&p.truth).filter(|(a, b)| a == b).count();
    correct as f64 / p.len() as f64
}

/// Micro-averaged F1 from pooled per-class counts.
pub fn micro_f1(p: &LabeledPartition) -> f64 {
    let (tp, fp, fn_) = p
        .confusion()
        .into_iter()
        .fold((0, 0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1, acc.2 + c.2));
    f1(tp, fp, fn_)
}

fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Unweighted mean of per-class F1 over the classes present in the truth.
pub fn macro_f1(p: &LabeledPartition) -> f64 {
    let mut present = vec![false; p.classes];
    for &t in &p.truth {
        present[t] = true;
    }
    // Per-class F1 is the ratio 2tp / (2tp + fp + fn); summing the ratios
    // exactly keeps hand-computed cases bit-exact.
    let ratios: Vec<(u128, u128)> = p
        .confusion()
        .iter()
        .zip(&present)
        .filter(|(_, &pr)| pr)
        .map(|(&(tp, fp, fn_), _)| {
            let num = 2 * tp as u128;
            (num, (num + fp as u128 + fn_ as u128).max(1))
        })
        .collect();
    let n = ratios.len() as u128;
    match sum_fractions(&ratios) {
        Some((num, den)) => num as f64 / (den * n) as f64,
        None => ratios.iter().map(|&(a, b)| a as f64 / b as f64).sum::<f64>() / n as f64,
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact sum of non-negative fractions, or `None` on overflow.
fn sum_fractions(fs: &[(u128, u128)]) -> Option<(u128, u128)> {
    let mut acc = (0u128, 1u128);
    for &(a, b) in fs {
        let g = gcd(acc.1, b);
        let den = (acc.1 / g).checked_mul(b)?;
        let num = acc.0.checked_mul(b / g)?.checked_add(a.checked_mul(acc.1 / g)?)?;
        let r = gcd(num, den).max(1);
        acc = (num / r, den / r);
        if acc.1 > 1 << 52 {
            return None;
        }
    }
    Some(acc)
}

fn entropy(counts: &[usize], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let q = c as f64 / n;
            -q * q.ln()
        })
        .sum()
}

/// Mutual information divided by the arithmetic mean of the two entropies.
/// Two single-cluster labelings score 1; otherwise a zero-entropy side gives 0.
pub fn nmi(p: &LabeledPartition) -> f64 {
    let n = p.len() as f64;
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut a = vec![0usize; p.classes];
    let mut b = vec![0usize; p.classes];
    for (&x, &y) in p.pred.iter().zip(&p.truth) {
        *joint.entry((x, y)).or_default() += 1;
        a[x] += 1;
        b[y] += 1;
    }
    let ha = entropy(&a, n);
    let hb = entropy(&b, n);
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    // Summing in value order makes the result exactly symmetric in its arguments.
    let mut cells: Vec<f64> = joint
        .into_iter()
        .map(|((x, y), c)| {
            let pxy = c as f64 / n;
            pxy * (pxy * n * n / (a[x] as f64 * b[y] as f64)).ln()
        })
        .collect();
    cells.sort_unstable_by(f64::total_cmp);
    let mi: f64 = cells.into_iter().sum();
    (mi / ((ha + hb) / 2.0)).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub nmi: f64,
}

pub fn evaluate(p: &LabeledPartition) -> MetricsReport {
    MetricsReport {
        accuracy: accuracy(p),
        micro_f1: micro_f1(p),
        macro_f1: macro_f1(p),
        nmi: nmi(p),
    }
}

/// Reads `node_id<TAB>label` lines, preserving file order.
pub fn read_labels<R: BufRead>(reader: R, name: &str) -> Result<Vec<(String, usize)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(name, e))?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(Error::parse(name, i + 1, "expected `node_id<TAB>label`"));
        }
        let label = cols[1]
            .trim()
            .parse()
            .map_err(|e| Error::parse(name, i + 1, format!("bad label: {e}")))?;
        out.push((cols[0].to_owned(), label));
    }
    Ok(out)
}

/// Aligns predictions to the truth, dropping `excluded` ids. Every evaluated
/// truth id must be predicted; predictions for ids without truth are ignored.
pub fn align_labels(
    pred: &[(String, usize)],
    truth: &[(String, usize)],
    excluded: &[String],
) -> Result<LabeledPartition> {
    let lookup: HashMap<&str, usize> = pred.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let skip: std::collections::HashSet<&str> = excluded.iter().map(String::as_str).collect();
    let mut p = Vec::new();
    let mut t = Vec::new();
    for (id, label) in truth {
        if skip.contains(id.as_str()) {
            continue;
        }
        let guess = lookup.get(id.as_str()).ok_or_else(|| {
            Error::InvalidPartition(format!("node `{id}` has a true label but no prediction"))
        })?;
        p.push(*guess);
        t.push(*label);
    }
    LabeledPartition::new(p, t)
}
