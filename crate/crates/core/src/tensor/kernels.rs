//! Kernels that touch only the non-zeros of a tensor.
//!
//! None of them materializes the identity core or a Kronecker product of the
//! factors. Parallel work is split into fixed blocks and reduced in order, so
//! results are bit-identical for any thread count.

use ndarray::Array2;
use rayon::prelude::*;

use super::{FactorMatrix, SparseTensor};
use crate::error::{Error, Result};

/// Entries per block in the ordered residual reduction.
const REDUCE_BLOCK: usize = 4096;

/// Negative residuals of at most this magnitude (relative to the summed terms)
/// are cancellation noise and are clamped to zero.
pub const RESIDUAL_EPS: f64 = 1e-12;

fn check_factors(x: &SparseTensor, factors: &[FactorMatrix], skip: Option<usize>) -> Result<usize> {
    if factors.len() != x.order() {
        return Err(Error::Shape(format!(
            "tensor of order {} needs {} factors, got {}",
            x.order(),
            x.order(),
            factors.len()
        )));
    }
    let c = factors[0].clusters();
    for (i, f) in factors.iter().enumerate() {
        if f.clusters() != c {
            return Err(Error::Shape(format!(
                "factor {i} has {} rows, factor 0 has {c}",
                f.clusters()
            )));
        }
        if Some(i) != skip && f.nodes() != x.dims()[i] {
            return Err(Error::Shape(format!(
                "factor {i} has {} columns, mode {i} has size {}",
                f.nodes(),
                x.dims()[i]
            )));
        }
    }
    Ok(c)
}

/// Node-major copies (`d_i × C`, contiguous rows) of every factor but `skip`.
fn node_major(factors: &[FactorMatrix], skip: Option<usize>) -> Vec<Option<Array2<f64>>> {
    factors
        .iter()
        .enumerate()
        .map(|(i, f)| (Some(i) != skip).then(|| f.as_array().t().as_standard_layout().into_owned()))
        .collect()
}

/// Sparse MTTKRP along mode `k`: row `j` of the `d_k × C` result is
/// `Σ_{J: J_k = j} X_J · ⊙_{i≠k} V_i[:, J_i]`. `factors[k]` only contributes
/// its row count.
pub fn mttkrp_sparse(x: &SparseTensor, factors: &[FactorMatrix], k: usize) -> Result<Array2<f64>> {
    if k >= x.order() {
        return Err(Error::Shape(format!("mode {k} out of range for order {}", x.order())));
    }
    let c = check_factors(x, factors, Some(k))?;
    let n = x.order();
    let rows = node_major(factors, Some(k));
    let (offsets, entries) = x.mode_groups(k);
    let mut out = vec![0.0; x.dims()[k] * c];
    if c > 0 {
        out.par_chunks_mut(c)
            .enumerate()
            .for_each_init(
                || vec![0.0; c],
                |prod, (j, acc)| {
                    for &e in &entries[offsets[j]..offsets[j + 1]] {
                        let e = e as usize;
                        let coord = &x.coords[e * n..(e + 1) * n];
                        prod.fill(x.values[e]);
                        for (i, r) in rows.iter().enumerate() {
                            if let Some(r) = r {
                                let row = r.row(coord[i] as usize);
                                for (p, &v) in prod.iter_mut().zip(row.iter()) {
                                    *p *= v;
                                }
                            }
                        }
                        for (a, &p) in acc.iter_mut().zip(prod.iter()) {
                            *a += p;
                        }
                    }
                },
            );
    }
    Ok(Array2::from_shape_vec((x.dims()[k], c), out).expect("shape matches buffer"))
}

fn hadamard_of_grams(factors: &[FactorMatrix], skip: Option<usize>) -> Result<Array2<f64>> {
    let c = factors
        .first()
        .map(FactorMatrix::clusters)
        .ok_or_else(|| Error::Shape("no factors".into()))?;
    let mut g = Array2::from_elem((c, c), 1.0);
    for (i, f) in factors.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        if f.clusters() != c {
            return Err(Error::Shape(format!(
                "factor {i} has {} rows, expected {c}",
                f.clusters()
            )));
        }
        let v = f.as_array();
        g *= &v.dot(&v.t());
    }
    Ok(g)
}

/// `⊙_{i≠k} (V_i V_iᵀ)`, the `C × C` matrix that replaces the dense
/// Khatri-Rao Gram product in the update denominator.
pub fn gram_hadamard(factors: &[FactorMatrix], k: usize) -> Result<Array2<f64>> {
    if k >= factors.len() {
        return Err(Error::Shape(format!(
            "mode {k} out of range for {} factors",
            factors.len()
        )));
    }
    hadamard_of_grams(factors, Some(k))
}

/// `‖X − I ×_i V_i‖_F²` via
/// `‖X‖² − 2 Σ_{nz} X_J Σ_c Π_i V_i[c, J_i] + Σ_{c1,c2} Π_i ⟨V_i[c1,:], V_i[c2,:]⟩`.
pub fn residual_fro_sq(x: &SparseTensor, factors: &[FactorMatrix]) -> Result<f64> {
    let c = check_factors(x, factors, None)?;
    let n = x.order();
    let rows = node_major(factors, None);
    let norm = x.frob_sq();
    let partials: Vec<f64> = x
        .values
        .par_chunks(REDUCE_BLOCK)
        .enumerate()
        .map(|(b, vals)| {
            let mut prod = vec![0.0; c];
            let mut s = 0.0;
            for (o, &v) in vals.iter().enumerate() {
                let e = b * REDUCE_BLOCK + o;
                let coord = &x.coords[e * n..(e + 1) * n];
                prod.fill(1.0);
                for (i, r) in rows.iter().enumerate() {
                    let row = r.as_ref().expect("no mode skipped").row(coord[i] as usize);
                    for (p, &w) in prod.iter_mut().zip(row.iter()) {
                        *p *= w;
                    }
                }
                s += v * prod.iter().sum::<f64>();
            }
            s
        })
        .collect();
    let cross: f64 = partials.iter().sum();
    let recon = hadamard_of_grams(factors, None)?.sum();
    let r = norm - 2.0 * cross + recon;
    if r < 0.0 {
        let scale = norm + 2.0 * cross.abs() + recon;
        if r < -RESIDUAL_EPS * scale.max(1.0) {
            log::debug!("residual {r:e} clamped to zero (scale {scale:e})");
        }
        return Ok(0.0);
    }
    Ok(r)
}
