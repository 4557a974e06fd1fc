//! Fully dense re-evaluations of the model, independent of the library's
//! objective code.

use hinclust_core::model::ModelState;
use hinclust_core::tensor::dense::{dense_reconstruct, DenseTensor};
use ndarray::Array2;

pub fn densify(x: &hinclust_core::SparseTensor) -> DenseTensor {
    let mut d = DenseTensor::zeros(x.dims().to_vec());
    for (c, v) in x.entries() {
        let idx: Vec<usize> = c.iter().map(|&i| i as usize).collect();
        *d.get_mut(&idx) = v;
    }
    d
}

/// Objective value with weights `mu` (not necessarily on the simplex):
/// reconstruction + λ·l1 + θ·consensus + ρ·mask, all by direct loops.
pub fn dense_objective(state: &ModelState, mu: &[f64]) -> f64 {
    let h = state.hyper();
    let c = h.clusters;
    let mut recon = 0.0;
    let mut l1 = 0.0;
    for (m, term) in state.terms().iter().enumerate() {
        recon += densify(&term.tensor).dist_sq(&dense_reconstruct(state.factors(m)));
        for f in state.factors(m) {
            l1 += f.as_array().iter().sum::<f64>();
        }
    }
    // Consensus by explicit counting of same-type positions.
    let mut consensus: Vec<Array2<f64>> = state
        .type_sizes()
        .iter()
        .map(|&n| Array2::zeros((c, n)))
        .collect();
    for (m, term) in state.terms().iter().enumerate() {
        let types = &term.motif.node_types;
        for (i, t) in types.iter().enumerate() {
            let count = types.iter().filter(|u| *u == t).count() as f64;
            let f = state.factor(m, i).as_array();
            let acc = &mut consensus[t.index()];
            for r in 0..c {
                for j in 0..f.ncols() {
                    acc[[r, j]] += mu[m] / count * f[[r, j]];
                }
            }
        }
    }
    let mut cons = 0.0;
    for (m, term) in state.terms().iter().enumerate() {
        for (i, t) in term.motif.node_types.iter().enumerate() {
            let f = state.factor(m, i).as_array();
            let v = &consensus[t.index()];
            for r in 0..c {
                for j in 0..f.ncols() {
                    cons += (f[[r, j]] - v[[r, j]]).powi(2);
                }
            }
        }
    }
    // Mask rebuilt from the seed list: every cluster but the seed's label.
    let mut mask = 0.0;
    for s in state.mask().seeds() {
        let v = &consensus[s.node.ty.index()];
        for r in (0..c).filter(|&r| r != s.label) {
            mask += v[[r, s.node.index as usize]].powi(2);
        }
    }
    recon + h.lambda * l1 + h.theta * cons + h.rho * mask
}

/// Euclidean projection onto the simplex by trying every support set.
pub fn simplex_by_active_sets(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let shift = (support.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut x = vec![0.0; n];
        let mut feasible = true;
        for &i in &support {
            x[i] = v[i] - shift;
            if x[i] < -1e-15 {
                feasible = false;
            }
        }
        if !feasible {
            continue;
        }
        for xi in &mut x {
            *xi = xi.max(0.0);
        }
        let d: f64 = x.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, x));
        }
    }
    best.unwrap().1
}

/// Whether `a + jitter·I` admits a Cholesky factorization.
pub fn is_psd(a: &Array2<f64>, jitter: f64) -> bool {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[[i, j]] + if i == j { jitter } else { 0.0 };
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[[i, i]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    true
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Largest entrywise error relative to the largest magnitude in `b`.
pub fn max_rel_err(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}
