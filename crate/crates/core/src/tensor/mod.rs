//! Coordinate-format sparse tensors and the kernels the factorization needs.

pub mod dense;
mod kernels;

use std::io::{self, BufRead, Write};
use std::sync::OnceLock;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::motif::{parse_dims, write_dims_header};

pub use kernels::{gram_hadamard, mttkrp_sparse, residual_fro_sq, RESIDUAL_EPS};

/// Entries of one mode grouped by their index along that mode.
#[derive(Debug, Clone)]
struct ModeIndex {
    offsets: Vec<usize>,
    entries: Vec<u32>,
}

/// An `N`-th order tensor stored as sorted, unique coordinates.
#[derive(Debug)]
pub struct SparseTensor {
    dims: Vec<usize>,
    coords: Vec<u32>,
    values: Vec<f64>,
    by_mode: OnceLock<Vec<ModeIndex>>,
}

impl Clone for SparseTensor {
    fn clone(&self) -> Self {
        SparseTensor {
            dims: self.dims.clone(),
            coords: self.coords.clone(),
            values: self.values.clone(),
            by_mode: OnceLock::new(),
        }
    }
}

impl PartialEq for SparseTensor {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.coords == other.coords && self.values == other.values
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::Shape("tensor order must be at least 1".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d > u32::MAX as usize) {
        return Err(Error::IndexOverflow(d));
    }
    Ok(())
}

impl SparseTensor {
    /// Builds a tensor from arbitrary entries. Entries are sorted; explicit
    /// zeros are dropped; repeated coordinates are an error.
    pub fn new(dims: Vec<usize>, entries: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        check_dims(&dims)?;
        let n = dims.len();
        let mut keyed = Vec::with_capacity(entries.len());
        for (idx, v) in entries {
            if idx.len() != n {
                return Err(Error::Shape(format!(
                    "index {idx:?} has order {}, tensor has order {n}",
                    idx.len()
                )));
            }
            if let Some((k, _)) = idx.iter().zip(&dims).enumerate().find(|(_, (i, d))| i >= d) {
                return Err(Error::Shape(format!(
                    "index {idx:?} out of bounds in mode {k} (dims {dims:?})"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Shape(format!("non-finite value at {idx:?}")));
            }
            if v != 0.0 {
                keyed.push((idx.into_iter().map(|i| i as u32).collect::<Vec<_>>(), v));
            }
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = keyed.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Shape(format!("duplicate coordinate {:?}", w[0].0)));
        }
        let mut coords = Vec::with_capacity(keyed.len() * n);
        let mut values = Vec::with_capacity(keyed.len());
        for (c, v) in keyed {
            coords.extend(c);
            values.push(v);
        }
        Ok(SparseTensor {
            dims,
            coords,
            values,
            by_mode: OnceLock::new(),
        })
    }

    /// Binary tensor from already sorted, unique flat coordinates.
    pub(crate) fn from_sorted_binary(dims: Vec<usize>, coords: Vec<u32>) -> Result<Self> {
        check_dims(&dims)?;
        let n = dims.len();
        debug_assert!(coords
            .chunks_exact(n)
            .zip(coords.chunks_exact(n).skip(1))
            .all(|(a, b)| a < b));
        let values = vec![1.0; coords.len() / n];
        Ok(SparseTensor {
            dims,
            coords,
            values,
            by_mode: OnceLock::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn coords(&self, e: usize) -> &[u32] {
        let n = self.order();
        &self.coords[e * n..(e + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn entries(&self) -> impl ExactSizeIterator<Item = (&[u32], f64)> {
        self.coords
            .chunks_exact(self.order())
            .zip(self.values.iter().copied())
    }

    /// `‖X‖_F²`.
    pub fn frob_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Entry ids grouped by index along `mode`, ascending within each group.
    pub(crate) fn mode_groups(&self, mode: usize) -> (&[usize], &[u32]) {
        let idx = &self.by_mode.get_or_init(|| {
            (0..self.order())
                .map(|k| {
                    let n = self.order();
                    let d = self.dims[k];
                    let mut offsets = vec![0usize; d + 1];
                    for e in 0..self.nnz() {
                        offsets[self.coords[e * n + k] as usize + 1] += 1;
                    }
                    for j in 0..d {
                        offsets[j + 1] += offsets[j];
                    }
                    let mut cursor = offsets.clone();
                    let mut entries = vec![0u32; self.nnz()];
                    for e in 0..self.nnz() {
                        let j = self.coords[e * n + k] as usize;
                        entries[cursor[j]] = e as u32;
                        cursor[j] += 1;
                    }
                    ModeIndex { offsets, entries }
                })
                .collect()
        })[mode];
        (&idx.offsets, &idx.entries)
    }

    pub fn to_dense(&self) -> dense::DenseTensor {
        let mut t = dense::DenseTensor::zeros(self.dims.clone());
        for (c, v) in self.entries() {
            let idx: Vec<usize> = c.iter().map(|&i| i as usize).collect();
            *t.get_mut(&idx) = v;
        }
        t
    }

    /// `#dims d1 .. dN` header, then `j1 .. jN value` per non-zero.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write_dims_header(&mut w, &self.dims)?;
        for (c, v) in self.entries() {
            for i in c {
                write!(w, "{i}\t")?;
            }
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R, name: &str) -> Result<Self> {
        let mut dims: Option<Vec<usize>> = None;
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(name, e))?;
            let line_no = i + 1;
            if let Some(rest) = line.strip_prefix("#dims") {
                dims = Some(parse_dims(rest, name, line_no)?);
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let d = dims
                .as_ref()
                .ok_or_else(|| Error::parse(name, line_no, "entry before #dims header"))?;
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != d.len() + 1 {
                return Err(Error::parse(
                    name,
                    line_no,
                    format!("expected {} columns, found {}", d.len() + 1, cols.len()),
                ));
            }
            let idx = cols[..d.len()]
                .iter()
                .map(|c| c.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(name, line_no, e.to_string()))?;
            let v = cols[d.len()]
                .parse::<f64>()
                .map_err(|e| Error::parse(name, line_no, e.to_string()))?;
            entries.push((idx, v));
        }
        let dims = dims.ok_or_else(|| Error::parse(name, 1, "missing #dims header"))?;
        SparseTensor::new(dims, entries)
    }
}

/// Non-negative `C × n` membership matrix; column `j` holds the cluster
/// memberships of node `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorMatrix(Array2<f64>);

impl FactorMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::Shape(
                "factor matrix entries must be finite and non-negative".into(),
            ));
        }
        Ok(FactorMatrix(values))
    }

    pub fn zeros(clusters: usize, nodes: usize) -> Self {
        FactorMatrix(Array2::zeros((clusters, nodes)))
    }

    pub fn clusters(&self) -> usize {
        self.0.nrows()
    }

    pub fn nodes(&self) -> usize {
        self.0.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Replaces the contents, keeping the shape. Callers keep entries non-negative.
    pub(crate) fn assign(&mut self, values: Array2<f64>) {
        debug_assert_eq!(values.dim(), self.0.dim());
        self.0 = values;
    }

    pub(crate) fn as_array_mut(&mut self) -> &mut Array2<f64> {
        &mut self.0
    }
}
