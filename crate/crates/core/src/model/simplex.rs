use crate::error::{Error, Result};

/// Euclidean projection onto `{x : Σx = 1, x ≥ 0}` by sorting and thresholding.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project an empty vector");
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - tau).max(0.0)).collect();
    // Renormalize away rounding drift so the sum is 1 to machine precision.
    let s: f64 = out.iter().sum();
    if s > 0.0 && (s - 1.0).abs() > 0.0 {
        let support = out.iter().filter(|&&x| x > 0.0).count() as f64;
        let shift = (s - 1.0) / support;
        for x in out.iter_mut().filter(|x| **x > 0.0) {
            *x = (*x - shift).max(0.0);
        }
    }
    out
}

/// Motif weights `μ`, a point of the standard simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct MotifWeights {
    mu: Vec<f64>,
}

impl MotifWeights {
    pub fn uniform(n: usize) -> Self {
        MotifWeights {
            mu: vec![1.0 / n as f64; n],
        }
    }

    pub fn new(mu: Vec<f64>) -> Result<Self> {
        let s: f64 = mu.iter().sum();
        if mu.is_empty() || mu.iter().any(|&x| x.is_nan() || x < 0.0) || (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidHyperparameter(format!(
                "motif weights {mu:?} are not on the simplex"
            )));
        }
        Ok(MotifWeights { mu })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// Unchecked setter used by finite-difference probes.
    pub(crate) fn set_raw(&mut self, mu: Vec<f64>) {
        self.mu = mu;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn on_simplex_is_fixed() {
        let v = [0.2, 0.5, 0.3];
        let p = project_simplex(&v);
        for (a, b) in p.iter().zip(v) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn vertex_case() {
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn single_coordinate_is_one() {
        assert_eq!(project_simplex(&[-7.5]), vec![1.0]);
    }

    #[test]
    fn uniform_weights() {
        assert_eq!(MotifWeights::uniform(2).as_slice(), &[0.5, 0.5]);
        assert!(MotifWeights::new(vec![0.7, 0.7]).is_err());
        assert!(MotifWeights::new(vec![1.2, -0.2]).is_err());
    }
}
