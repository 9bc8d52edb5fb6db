#![allow(dead_code)]

use ctcog::linalg::{self, Ket, Matrix};
use proptest::prelude::*;

/// Complex vectors of a fixed dimension with entries in [-1, 1] + i[-1, 1].
pub fn ket(dim: usize) -> impl Strategy<Value = Ket> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_map(|v| v.into_iter().map(|(re, im)| linalg::c(re, im)).collect())
}

/// A random orthonormal basis of the whole space, or `None` when the draw was degenerate.
pub fn basis_from(vectors: &[Ket]) -> Option<Vec<Ket>> {
    let b = linalg::orthonormal_span(vectors, 1e-4);
    (b.len() == vectors[0].len()).then_some(b)
}

pub fn unitary_from(vectors: &[Ket]) -> Option<Matrix> {
    basis_from(vectors).map(|b| Matrix::from_columns(&b))
}

/// Splits `0..n` into contiguous nonempty blocks at the given cut points.
pub fn blocks(n: usize, cuts: &[bool]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0]];
    for i in 1..n {
        if cuts[(i - 1) % cuts.len()] {
            out.push(Vec::new());
        }
        out.last_mut().unwrap().push(i);
    }
    out
}
