//! Dense symmetric-matrix kernels for small dimensions.
//!
//! Covariance-sized problems (dimension up to ~16) need only a handful of
//! operations: Cholesky factorization, symmetric eigendecomposition, inverse
//! with log-determinant, and the symmetric-definite generalized eigenproblem.
//! At these sizes the cyclic Jacobi method is both simple and accurate, so
//! everything here is written out directly rather than delegated to a BLAS.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense symmetric matrix, row-major storage.
///
/// Construction averages the two triangles, so `get(i, j) == get(j, i)` holds
/// exactly (bitwise) for every matrix that exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from square row data, symmetrizing via
    /// `(A + Aᵀ)/2` to absorb roundoff in the input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Shape("matrix must have dimension >= 1".into()));
        }
        for row in rows {
            if row.len() != dim {
                return Err(Error::Shape(format!(
                    "expected {dim} columns per row, got {}",
                    row.len()
                )));
            }
        }
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix must have dimension >= 1");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = v;
        }
        m
    }

    /// Rank-one matrix `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = v[i] * v[j];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "vector length must match dimension");
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Quadratic form `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "vector length must match dimension");
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.get(i, j) * x[i] * x[j];
            }
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimensions must match");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// `A + ridge·I`.
    pub fn with_ridge(&self, ridge: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] += ridge;
        }
        m
    }

    /// Copy with all off-diagonal entries zeroed.
    pub fn diagonal_part(&self) -> Self {
        Self::from_diagonal(&(0..self.dim).map(|i| self.get(i, i)).collect::<Vec<_>>())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimensions must match");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Cholesky factorization `A = L Lᵀ` with a strictly positive diagonal.
    ///
    /// A pivot at or below `1e-12` times the largest diagonal entry is
    /// treated as a sign of degeneracy rather than roundoff and fails with
    /// [`Error::NotPositiveDefinite`].
    pub fn cholesky(&self) -> Result<CholeskyFactor> {
        let n = self.dim;
        let max_diag = (0..n).map(|i| self.get(i, i)).fold(f64::MIN, f64::max);
        let tolerance = 1e-12 * max_diag.max(0.0);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut pivot = self.get(j, j);
            for k in 0..j {
                pivot -= l[j * n + k] * l[j * n + k];
            }
            if !(pivot > tolerance) {
                return Err(Error::NotPositiveDefinite);
            }
            let ljj = pivot.sqrt();
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut acc = self.get(i, j);
                for k in 0..j {
                    acc -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = acc / ljj;
            }
        }
        Ok(CholeskyFactor { dim: n, data: l })
    }

    /// Eigendecomposition `A = U diag(λ) Uᵀ` by cyclic Jacobi sweeps.
    ///
    /// Eigenvalues come back sorted descending with orthonormal column
    /// eigenvectors; each column is sign-fixed so its first component of
    /// non-negligible magnitude is positive. Convergence means the
    /// off-diagonal Frobenius mass dropped below `1e-14` times the norm of
    /// the input; failing that within 100 sweeps reports
    /// [`Error::NoConvergence`].
    pub fn eigen(&self) -> Result<EigenPair> {
        const MAX_SWEEPS: usize = 100;
        let n = self.dim;
        let norm = self.frobenius_norm();
        let target = 1e-14 * norm;
        let mut a = self.data.clone();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }

        let off_mass = |a: &[f64]| -> f64 {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        acc += a[i * n + j] * a[i * n + j];
                    }
                }
            }
            acc.sqrt()
        };

        let mut converged = off_mass(&a) <= target;
        for _ in 0..MAX_SWEEPS {
            if converged {
                break;
            }
            for p in 0..n.saturating_sub(1) {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    // Stable rotation: t is the smaller root of
                    // t² + 2θt − 1 = 0 with θ = (a_qq − a_pp) / (2 a_pq).
                    let theta = 0.5 * (a[q * n + q] - a[p * n + p]) / apq;
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    a[p * n + p] = app - t * apq;
                    a[q * n + q] = aqq + t * apq;
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    for i in 0..n {
                        if i == p || i == q {
                            continue;
                        }
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = c * aip - s * aiq;
                        a[p * n + i] = a[i * n + p];
                        a[i * n + q] = s * aip + c * aiq;
                        a[q * n + i] = a[i * n + q];
                    }
                    for i in 0..n {
                        let vip = v[i * n + p];
                        let viq = v[i * n + q];
                        v[i * n + p] = c * vip - s * viq;
                        v[i * n + q] = s * vip + c * viq;
                    }
                }
            }
            converged = off_mass(&a) <= target;
        }
        if !converged {
            return Err(Error::NoConvergence);
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap());
        let values: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
        let mut vectors = vec![0.0; n * n];
        for (col, &k) in order.iter().enumerate() {
            let sign = column_sign(&v, n, k);
            for i in 0..n {
                vectors[i * n + col] = sign * v[i * n + k];
            }
        }
        Ok(EigenPair {
            dim: n,
            values,
            vectors,
        })
    }

    /// Inverse and log-determinant through the Cholesky factor:
    /// `ln|A| = 2 Σ ln L_ii`.
    pub fn inverse_and_logdet(&self) -> Result<(SymMatrix, f64)> {
        let chol = self.cholesky()?;
        Ok((chol.inverse(), chol.log_det()))
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.rows()
    }
}

/// Sign convention for eigenvectors: first component of non-negligible
/// magnitude must be positive. For unit vectors the largest component is at
/// least `1/√n`, so the cutoff never skips every entry.
fn column_sign(v: &[f64], n: usize, col: usize) -> f64 {
    for i in 0..n {
        let x = v[i * n + col];
        if x.abs() > 1e-9 {
            return if x < 0.0 { -1.0 } else { 1.0 };
        }
    }
    1.0
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    data: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// `L z`, the map that colors standard-normal draws.
    pub fn mul_vec(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.dim, "vector length must match dimension");
        (0..self.dim)
            .map(|i| (0..=i).map(|j| self.get(i, j) * z[j]).sum())
            .collect()
    }

    /// Solves `L y = b` by forward substitution.
    pub fn solve_forward(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim, "vector length must match dimension");
        let mut y = vec![0.0; self.dim];
        for i in 0..self.dim {
            let mut acc = b[i];
            for j in 0..i {
                acc -= self.get(i, j) * y[j];
            }
            y[i] = acc / self.get(i, i);
        }
        y
    }

    /// Solves `Lᵀ x = y` by back substitution.
    pub fn solve_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.dim, "vector length must match dimension");
        let mut x = vec![0.0; self.dim];
        for i in (0..self.dim).rev() {
            let mut acc = y[i];
            for j in (i + 1)..self.dim {
                acc -= self.get(j, i) * x[j];
            }
            x[i] = acc / self.get(i, i);
        }
        x
    }

    /// Solves `A x = b` where `A = L Lᵀ`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_transpose(&self.solve_forward(b))
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| self.get(i, i).ln()).sum::<f64>()
    }

    /// Inverse of the original matrix, assembled column by column.
    pub fn inverse(&self) -> SymMatrix {
        let n = self.dim;
        let mut cols = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cols[j] = self.solve(&e);
        }
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
        SymMatrix::from_rows(&rows).expect("inverse has valid shape")
    }

    /// `L Lᵀ`, for reconstruction checks.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.dim;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let upto = i.min(j);
                        (0..=upto).map(|k| self.get(i, k) * self.get(j, k)).sum()
                    })
                    .collect()
            })
            .collect();
        SymMatrix::from_rows(&rows).expect("reconstruction has valid shape")
    }
}

/// Eigendecomposition result: descending eigenvalues paired with orthonormal
/// column eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenPair {
    dim: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl EigenPair {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// The eigenvector paired with `values()[k]`.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.vectors[i * self.dim + k]).collect()
    }

    /// Component `i` of eigenvector `k`.
    #[inline]
    pub fn vector_component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.dim + k]
    }

    /// `U diag(λ) Uᵀ`, for reconstruction checks.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.dim;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| {
                                self.values[k]
                                    * self.vector_component(i, k)
                                    * self.vector_component(j, k)
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        SymMatrix::from_rows(&rows).expect("reconstruction has valid shape")
    }
}

/// Top solution of the symmetric-definite generalized eigenproblem
/// `A u = λ B u`.
#[derive(Debug, Clone)]
pub struct GeneralizedEigMax {
    /// Unit-norm eigenvector, first non-negligible component positive.
    pub vector: Vec<f64>,
    /// The associated (largest) generalized eigenvalue.
    pub value: f64,
}

/// Largest-eigenvalue solution of `A u = λ B u` for symmetric `A` and
/// symmetric positive-definite `B`.
///
/// Reduces through `B = L Lᵀ` to the ordinary symmetric problem for
/// `L⁻¹ A L⁻ᵀ` and maps the top eigenvector back. The returned vector is the
/// direction maximizing `uᵀAu` over `uᵀBu = 1`, rescaled to unit Euclidean
/// length.
pub fn generalized_eig_max(a: &SymMatrix, b: &SymMatrix) -> Result<GeneralizedEigMax> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let n = a.dim();
    let l = b.cholesky()?;

    // Y = L⁻¹ A, column by column.
    let mut y_cols = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
        y_cols.push(l.solve_forward(&col));
    }
    // C = Y L⁻ᵀ, i.e. row i of C solves L cᵢ = (row i of Y).
    let mut c_rows = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| y_cols[j][i]).collect();
        c_rows.push(l.solve_forward(&row));
    }
    let c = SymMatrix::from_rows(&c_rows)?;
    let eig = c.eigen()?;
    let z = eig.vector(0);
    let mut u = l.solve_transpose(&z);

    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut u {
        *x /= norm;
    }
    let sign = u
        .iter()
        .find(|x| x.abs() > 1e-9)
        .map(|&x| if x < 0.0 { -1.0 } else { 1.0 })
        .unwrap_or(1.0);
    for x in &mut u {
        *x *= sign;
    }
    Ok(GeneralizedEigMax {
        vector: u,
        value: eig.value(0),
    })
}

/// Dot product helper shared across the crate.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm helper shared across the crate.
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_spd(dim: usize, rng: &mut SplitMix64) -> SymMatrix {
        // MᵀM + I is comfortably positive definite.
        let m: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| 2.0 * rng.next_f64() - 1.0).collect())
            .collect();
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        (0..dim).map(|k| m[k][i] * m[k][j]).sum::<f64>() + if i == j { 1.0 } else { 0.0 }
                    })
                    .collect()
            })
            .collect();
        SymMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn cholesky_identity_is_identity() {
        let l = SymMatrix::identity(2).cholesky().unwrap();
        assert_eq!(l.get(0, 0), 1.0);
        assert_eq!(l.get(1, 1), 1.0);
        assert_eq!(l.get(1, 0), 0.0);
    }

    #[test]
    fn cholesky_diagonal_takes_square_roots() {
        let a = SymMatrix::from_rows(&[vec![4.0, 0.0], vec![0.0, 9.0]]).unwrap();
        let l = a.cholesky().unwrap();
        assert_eq!(l.get(0, 0), 2.0);
        assert_eq!(l.get(1, 1), 3.0);
        assert_eq!(l.get(1, 0), 0.0);
    }

    #[test]
    fn cholesky_reconstructs_dense_example() {
        let a = SymMatrix::from_rows(&[vec![10.0, 1.0], vec![1.0, 5.0]]).unwrap();
        let l = a.cholesky().unwrap();
        assert!(l.reconstruct().max_abs_diff(&a) <= 1e-10);
        assert!(l.get(0, 0) > 0.0 && l.get(1, 1) > 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite_and_singular() {
        let indefinite = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            indefinite.cholesky(),
            Err(Error::NotPositiveDefinite)
        ));
        let singular = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            singular.cholesky(),
            Err(Error::NotPositiveDefinite)
        ));
        let zero = SymMatrix::zeros(3);
        assert!(matches!(zero.cholesky(), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn cholesky_reconstructs_random_spd() {
        let mut rng = SplitMix64::new(11);
        for trial in 0..200 {
            let dim = 1 + trial % 8;
            let a = random_spd(dim, &mut rng);
            let l = a.cholesky().unwrap();
            assert!(
                l.reconstruct().max_abs_diff(&a) <= 1e-10,
                "dim {dim} trial {trial}"
            );
        }
    }

    #[test]
    fn eigen_diagonal_matrix_sorted_descending() {
        let a = SymMatrix::from_diagonal(&[2.0, 3.0]);
        let e = a.eigen().unwrap();
        assert_eq!(e.values(), &[3.0, 2.0]);
        // Axis-aligned eigenvectors: top pairs with the second axis.
        assert!((e.vector(0)[1].abs() - 1.0).abs() < 1e-14);
        assert!((e.vector(1)[0].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_symmetric_swap_spectrum() {
        let a = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = a.eigen().unwrap();
        assert!((e.value(0) - 1.0).abs() < 1e-12);
        assert!((e.value(1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_random_spd() {
        let mut rng = SplitMix64::new(5);
        let a = random_spd(5, &mut rng);
        let e = a.eigen().unwrap();
        assert!(e.reconstruct().max_abs_diff(&a) <= 1e-10);
        for k in 1..5 {
            assert!(e.value(k - 1) >= e.value(k));
        }
    }

    #[test]
    fn eigen_vectors_are_orthonormal() {
        let mut rng = SplitMix64::new(17);
        let a = random_spd(6, &mut rng);
        let e = a.eigen().unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let d = dot(&e.vector(i), &e.vector(j));
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((d - expected).abs() <= 1e-10, "VᵀV[{i}][{j}] = {d}");
            }
        }
    }

    #[test]
    fn eigen_sign_convention_first_component_positive() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..20 {
            let a = random_spd(4, &mut rng);
            let e = a.eigen().unwrap();
            for k in 0..4 {
                let v = e.vector(k);
                let first = v.iter().find(|x| x.abs() > 1e-9).copied().unwrap();
                assert!(first > 0.0);
            }
        }
    }

    #[test]
    fn eigen_trace_and_det_match_spectrum() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..50 {
            let a = random_spd(4, &mut rng);
            let e = a.eigen().unwrap();
            let trace: f64 = e.values().iter().sum();
            assert!((trace - a.trace()).abs() <= 1e-8 * a.trace().abs().max(1.0));
            let det: f64 = e.values().iter().product();
            let logdet = a.cholesky().unwrap().log_det();
            assert!((det.ln() - logdet).abs() <= 1e-8 * logdet.abs().max(1.0));
        }
    }

    #[test]
    fn eigen_spectrum_invariant_under_rotation() {
        // Rotate by an orthonormal eigenbasis of another SPD matrix.
        let mut rng = SplitMix64::new(41);
        let a = random_spd(4, &mut rng);
        let q = random_spd(4, &mut rng).eigen().unwrap();
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        let mut acc = 0.0;
                        for k in 0..4 {
                            for l in 0..4 {
                                acc += q.vector_component(i, k)
                                    * a.get(k, l)
                                    * q.vector_component(j, l);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let rotated = SymMatrix::from_rows(&rows).unwrap();
        let mut s1 = a.eigen().unwrap().values().to_vec();
        let mut s2 = rotated.eigen().unwrap().values().to_vec();
        s1.sort_by(|x, y| x.partial_cmp(y).unwrap());
        s2.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0));
        }
    }

    #[test]
    fn inverse_and_logdet_identity() {
        let (inv, logdet) = SymMatrix::identity(3).inverse_and_logdet().unwrap();
        assert!(inv.max_abs_diff(&SymMatrix::identity(3)) <= 1e-14);
        assert_eq!(logdet, 0.0);
    }

    #[test]
    fn inverse_and_logdet_dense_example() {
        // det [[10,1],[1,5]] = 49; inverse by the 2x2 cofactor formula.
        let a = SymMatrix::from_rows(&[vec![10.0, 1.0], vec![1.0, 5.0]]).unwrap();
        let (inv, logdet) = a.inverse_and_logdet().unwrap();
        assert!((logdet - 49f64.ln()).abs() <= 1e-12);
        let expected = SymMatrix::from_rows(&[
            vec![5.0 / 49.0, -1.0 / 49.0],
            vec![-1.0 / 49.0, 10.0 / 49.0],
        ])
        .unwrap();
        assert!(inv.max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn inverse_and_logdet_diagonal() {
        let a = SymMatrix::from_diagonal(&[4.0, 1.0]);
        let (inv, logdet) = a.inverse_and_logdet().unwrap();
        assert!(inv.max_abs_diff(&SymMatrix::from_diagonal(&[0.25, 1.0])) <= 1e-14);
        assert!((logdet - 4f64.ln()).abs() <= 1e-14);
    }

    #[test]
    fn inverse_times_original_is_identity() {
        let mut rng = SplitMix64::new(53);
        for _ in 0..20 {
            let a = random_spd(5, &mut rng);
            let (inv, _) = a.inverse_and_logdet().unwrap();
            for j in 0..5 {
                let col: Vec<f64> = (0..5).map(|i| a.get(i, j)).collect();
                let prod = inv.mat_vec(&col);
                for (i, p) in prod.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((p - expected).abs() <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn generalized_eig_identity_matches_ordinary() {
        let mut rng = SplitMix64::new(61);
        let a = random_spd(4, &mut rng);
        let top = a.eigen().unwrap();
        let g = generalized_eig_max(&a, &SymMatrix::identity(4)).unwrap();
        assert!((g.value - top.value(0)).abs() <= 1e-8 * top.value(0).abs());
        let cos = dot(&g.vector, &top.vector(0)).abs();
        assert!(cos >= 1.0 - 1e-8, "cos = {cos}");
    }

    #[test]
    fn generalized_eig_rank_one_with_identity() {
        let a = SymMatrix::outer(&[2.0, 0.0]);
        let g = generalized_eig_max(&a, &SymMatrix::identity(2)).unwrap();
        assert!((g.vector[0] - 1.0).abs() <= 1e-12);
        assert!(g.vector[1].abs() <= 1e-12);
    }

    #[test]
    fn generalized_eig_rank_one_matches_direct_solve() {
        // For A = ddᵀ the top generalized eigenvector is collinear with B⁻¹d.
        let mut rng = SplitMix64::new(71);
        for _ in 0..30 {
            let b = random_spd(3, &mut rng);
            let d: Vec<f64> = (0..3).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
            if norm(&d) < 1e-3 {
                continue;
            }
            let a = SymMatrix::outer(&d);
            let g = generalized_eig_max(&a, &b).unwrap();
            let direct = b.cholesky().unwrap().solve(&d);
            let cos = dot(&g.vector, &direct).abs() / norm(&direct);
            assert!(cos >= 1.0 - 1e-8, "cos = {cos}");
            // Residual ‖Au − λBu‖ small relative to the problem scale.
            let au = a.mat_vec(&g.vector);
            let bu = b.mat_vec(&g.vector);
            let resid: f64 = au
                .iter()
                .zip(&bu)
                .map(|(x, y)| (x - g.value * y) * (x - g.value * y))
                .sum::<f64>()
                .sqrt();
            assert!(resid <= 1e-8 * (a.frobenius_norm() + g.value * b.frobenius_norm()));
        }
    }

    #[test]
    fn generalized_eig_requires_positive_definite_b() {
        let a = SymMatrix::identity(2);
        let b = SymMatrix::zeros(2);
        assert!(matches!(
            generalized_eig_max(&a, &b),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn from_rows_symmetrizes_and_validates() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![4.0, 1.0]]).unwrap();
        assert_eq!(a.get(0, 1), 3.0);
        assert_eq!(a.get(1, 0), 3.0);
        assert!(SymMatrix::from_rows(&[]).is_err());
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0]]).is_err());
    }
}
