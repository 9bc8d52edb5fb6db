//! Small dense complex linear algebra for finite-dimensional substrates.
//!
//! Everything here works on plain `Vec<Complex64>` kets and row-major
//! square matrices. Dimensions in this crate are tiny (a handful of
//! qubits at most), so no attempt is made at blocking or SIMD.

pub use num_complex::Complex64;

pub type Ket = Vec<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a).sqrt()
}

pub fn scale(a: &[Complex64], s: Complex64) -> Ket {
    a.iter().map(|x| x * s).collect()
}

pub fn normalize(a: &[Complex64]) -> Option<Ket> {
    let n = norm(a);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(scale(a, c(1.0 / n, 0.0)))
}

pub fn basis_ket(dim: usize, index: usize) -> Ket {
    let mut v = vec![c(0.0, 0.0); dim];
    v[index] = c(1.0, 0.0);
    v
}

/// Real qubit ket `cos θ |0⟩ + sin θ |1⟩` with θ in degrees.
/// `cos θ|0⟩ + sin θ|1⟩`, exact at multiples of 90°.
pub fn angle_ket(degrees: f64) -> Ket {
    let quarter = degrees / 90.0;
    if quarter.fract() == 0.0 && quarter.abs() < 1e15 {
        let (cos, sin) = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][quarter.rem_euclid(4.0) as usize];
        return vec![c(cos, 0.0), c(sin, 0.0)];
    }
    let (sin, cos) = degrees.to_radians().sin_cos();
    vec![c(cos, 0.0), c(sin, 0.0)]
}

pub fn kron_ket(a: &[Complex64], b: &[Complex64]) -> Ket {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Removes the components of `v` along each vector of the orthonormal list `basis`.
/// Two passes of modified Gram-Schmidt keep the residual orthogonal to working precision.
pub fn residual(v: &[Complex64], basis: &[Ket]) -> Ket {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let coeff = inner(b, &r);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= coeff * bi;
            }
        }
    }
    r
}

/// Squared norm of the projection of `v` onto the span of the orthonormal list `basis`.
pub fn projected_weight(v: &[Complex64], basis: &[Ket]) -> f64 {
    basis.iter().map(|b| inner(b, v).norm_sqr()).sum()
}

/// Orthonormal basis of the span of `vectors`, computed by pivoted Gram-Schmidt.
pub fn orthonormal_span(vectors: &[Ket], cutoff: f64) -> Vec<Ket> {
    let mut basis = Vec::new();
    extend_basis(&mut basis, vectors, cutoff);
    basis
}

/// Orthonormal basis of the orthogonal complement of the span of `basis` in `C^dim`.
pub fn orthocomplement(basis: &[Ket], dim: usize, cutoff: f64) -> Vec<Ket> {
    let candidates: Vec<Ket> = (0..dim).map(|i| residual(&basis_ket(dim, i), basis)).collect();
    let mut all = basis.to_vec();
    let start = all.len();
    extend_basis(&mut all, &candidates, cutoff);
    all.split_off(start)
}

/// Appends to the orthonormal list `basis` until it spans `candidates` as well.
///
/// At each step the candidate with the largest residual is taken; candidates
/// whose residual norm falls below `cutoff` are treated as linearly dependent.
fn extend_basis(basis: &mut Vec<Ket>, candidates: &[Ket], cutoff: f64) {
    let mut pending = candidates.to_vec();
    loop {
        let mut best: Option<(usize, Ket, f64)> = None;
        for (i, v) in pending.iter().enumerate() {
            let r = residual(v, basis);
            let n = norm(&r);
            if n > cutoff && best.as_ref().is_none_or(|(_, _, bn)| n > *bn) {
                best = Some((i, r, n));
            }
        }
        match best {
            Some((i, r, n)) => {
                basis.push(scale(&r, c(1.0 / n, 0.0)));
                pending.swap_remove(i);
            }
            None => return,
        }
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![c(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix whose columns are the given kets.
    pub fn from_columns(columns: &[Ket]) -> Self {
        let dim = columns.len();
        let mut m = Self::zeros(dim);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length must equal column count");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        assert_eq!(a.len(), b.len());
        let dim = a.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        m
    }

    /// Orthogonal projector onto the span of an orthonormal list.
    pub fn projector(basis: &[Ket], dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for b in basis {
            m = m.add(&Self::outer(b, b));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == c(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Ket {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().mul(self).max_abs_diff(&Matrix::identity(self.dim)) <= tol
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_drops_dependent_vectors() {
        let v = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        ];
        let b = orthonormal_span(&v, 1e-9);
        assert_eq!(b.len(), 2);
        assert!(inner(&b[0], &b[1]).norm() < 1e-12);
    }

    #[test]
    fn complement_of_zero_ket_is_one_ket() {
        let b = orthocomplement(&[basis_ket(2, 0)], 2, 1e-9);
        assert_eq!(b.len(), 1);
        assert!((inner(&b[0], &basis_ket(2, 1)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = Matrix::identity(2).kron(&Matrix::identity(3));
        assert_eq!(k, Matrix::identity(6));
    }

    #[test]
    fn projector_is_idempotent() {
        let p = Matrix::projector(&[angle_ket(30.0)], 2);
        assert!(p.mul(&p).max_abs_diff(&p) < 1e-12);
        assert!((p.trace().re - 1.0).abs() < 1e-12);
    }
}
