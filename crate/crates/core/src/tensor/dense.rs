//! Dense reference implementations.
//!
//! Everything here materializes full tensors and Kronecker products, so it
//! is only usable on tiny shapes. It exists to cross-check the sparse
//! kernels and shares no code with them.

use ndarray::Array2;

use super::FactorMatrix;

/// Row-major dense tensor (last index varies fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(dims: Vec<usize>) -> Self {
        let len = dims.iter().product();
        DenseTensor {
            dims,
            values: vec![0.0; len],
        }
    }

    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(dims);
        let mut idx = vec![0; t.dims.len()];
        for flat in 0..t.values.len() {
            t.unravel(flat, &mut idx);
            t.values[flat] = f(&idx);
        }
        t
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.dims.len());
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| {
            assert!(i < d, "index out of bounds");
            acc * d + i
        })
    }

    fn unravel(&self, mut flat: usize, idx: &mut [usize]) {
        for k in (0..self.dims.len()).rev() {
            idx[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.offset(idx)]
    }

    pub fn get_mut(&mut self, idx: &[usize]) -> &mut f64 {
        let o = self.offset(idx);
        &mut self.values[o]
    }

    pub fn frob_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `‖self − other‖_F²`.
    pub fn dist_sq(&self, other: &DenseTensor) -> f64 {
        assert_eq!(self.dims, other.dims);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Superdiagonal identity tensor of order `order` with every mode of size `c`.
pub fn identity_tensor(c: usize, order: usize) -> DenseTensor {
    DenseTensor::from_fn(vec![c; order], |idx| {
        if idx.iter().all(|&i| i == idx[0]) {
            1.0
        } else {
            0.0
        }
    })
}

/// `Y = X ×_k A` with `A` of shape `d_k × d`:
/// `Y[.., j, ..] = Σ_s X[.., s, ..] A[s, j]`.
pub fn mode_product(x: &DenseTensor, a: &Array2<f64>, k: usize) -> DenseTensor {
    assert_eq!(a.nrows(), x.dims[k], "mode product shape mismatch");
    let mut dims = x.dims.clone();
    dims[k] = a.ncols();
    let mut src = vec![0; dims.len()];
    DenseTensor::from_fn(dims, |idx| {
        src.copy_from_slice(idx);
        (0..a.nrows())
            .map(|s| {
                src[k] = s;
                x.get(&src) * a[[s, idx[k]]]
            })
            .sum()
    })
}

/// `Y ×_1 A_1 ×_2 … ×_N A_N`.
pub fn multi_mode_product(y: &DenseTensor, mats: &[Array2<f64>]) -> DenseTensor {
    assert_eq!(mats.len(), y.dims.len());
    mats.iter()
        .enumerate()
        .fold(y.clone(), |acc, (k, a)| mode_product(&acc, a, k))
}

/// `I ×_i V_i`, built by direct summation `Σ_c Π_i V_i[c, j_i]`.
pub fn dense_reconstruct(factors: &[FactorMatrix]) -> DenseTensor {
    let dims: Vec<usize> = factors.iter().map(FactorMatrix::nodes).collect();
    let c = factors[0].clusters();
    DenseTensor::from_fn(dims, |idx| {
        (0..c)
            .map(|r| {
                factors
                    .iter()
                    .zip(idx)
                    .map(|(f, &j)| f.as_array()[[r, j]])
                    .product::<f64>()
            })
            .sum()
    })
}

/// Mode-`k` unfolding: a `(Π_{i≠k} d_i) × d_k` matrix whose column `j` is
/// the row-major vectorization of the slice with index `j` in mode `k`.
pub fn matricize(x: &DenseTensor, k: usize) -> Array2<f64> {
    assert!(k < x.dims.len(), "invalid mode {k}");
    let rows: usize = x
        .dims
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, d)| d)
        .product();
    let mut m = Array2::zeros((rows, x.dims[k]));
    let mut idx = vec![0; x.dims.len()];
    for flat in 0..x.values.len() {
        x.unravel(flat, &mut idx);
        let r = idx
            .iter()
            .zip(&x.dims)
            .enumerate()
            .filter(|&(i, _)| i != k)
            .fold(0, |acc, (_, (&j, &d))| acc * d + j);
        m[[r, idx[k]]] = x.values[flat];
    }
    m
}

pub fn kronecker(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| {
        a[[i / br, j / bc]] * b[[i % br, j % bc]]
    })
}

/// `A_1 ⊗ … ⊗ A_N` over every matrix except `skip`, in mode order.
pub fn kronecker_except(mats: &[Array2<f64>], skip: usize) -> Array2<f64> {
    mats.iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .fold(Array2::from_elem((1, 1), 1.0), |acc, (_, m)| kronecker(&acc, m))
}

fn factor_arrays(factors: &[FactorMatrix]) -> Vec<Array2<f64>> {
    factors.iter().map(|f| f.as_array().clone()).collect()
}

/// `[⊗_{i≠k} V_i]ᵀ I_(k)`: the dense `(Π_{i≠k} d_i) × C` Khatri-Rao matrix.
pub fn khatri_rao_dense(factors: &[FactorMatrix], k: usize) -> Array2<f64> {
    let c = factors[0].clusters();
    let kron = kronecker_except(&factor_arrays(factors), k);
    let ident = matricize(&identity_tensor(c, factors.len()), k);
    kron.t().dot(&ident)
}

/// Dense MTTKRP: `X_(k)ᵀ [⊗_{i≠k} V_i]ᵀ I_(k)`, shape `d_k × C`.
pub fn mttkrp_dense(x: &DenseTensor, factors: &[FactorMatrix], k: usize) -> Array2<f64> {
    matricize(x, k).t().dot(&khatri_rao_dense(factors, k))
}

/// Dense Gram of the Khatri-Rao matrix, `C × C`.
pub fn gram_dense(factors: &[FactorMatrix], k: usize) -> Array2<f64> {
    let w = khatri_rao_dense(factors, k);
    w.t().dot(&w)
}

/// `‖X_(k) − [⊗_{i≠k} A_i]ᵀ Y_(k) A_k‖_F²`, the unfolded form of
/// `‖X − Y ×_i A_i‖_F²` for `A_i` of shape `r_i × d_i`.
pub fn unfolded_residual_sq(
    x: &DenseTensor,
    core: &DenseTensor,
    mats: &[Array2<f64>],
    k: usize,
) -> f64 {
    let kron = kronecker_except(mats, k);
    let approx = kron.t().dot(&matricize(core, k)).dot(&mats[k]);
    let xk = matricize(x, k);
    (&xk - &approx).iter().map(|v| v * v).sum()
}
