//! Dense linear algebra for the debiasing pipeline: centering, PCA through
//! SVD, subspace projection and removal, cosine similarity.
//!
//! Components returned by [`principal_components`] follow a deterministic
//! sign convention (first coordinate with magnitude above 1e-12 is positive),
//! so repeated runs and different LAPACK builds agree up to that convention.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use ndarray_linalg::SVD;

use crate::error::{Error, Result};

/// Relative gap below which two adjacent singular values are flagged as a
/// near-tie: sigma_i - sigma_{i+1} < NEAR_TIE_REL * sigma_i.
const NEAR_TIE_REL: f64 = 1e-9;

/// Coordinates at or below this magnitude are treated as zero when fixing
/// component signs.
const SIGN_TOL: f64 = 1e-12;

/// Tolerance for orthonormality checks on subspace bases.
const ORTHO_TOL: f64 = 1e-8;

pub(crate) fn norm(v: ArrayView1<'_, f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// Subtracts the column mean from every row. Returns the centered matrix and
/// the mean that was removed; adding the mean back recovers the input up to
/// floating-point rounding.
pub fn center(matrix: ArrayView2<'_, f64>) -> Result<(Array2<f64>, Array1<f64>)> {
    if matrix.nrows() == 0 {
        return Err(Error::EmptyInput);
    }
    let mean = matrix.mean_axis(Axis(0)).expect("nrows >= 1");
    let centered = &matrix - &mean;
    Ok((centered, mean))
}

/// Row-orthonormal basis of a k-dimensional subspace of R^d.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: Array2<f64>,
}

impl Subspace {
    /// Validates that rows are unit length and pairwise orthogonal within
    /// 1e-8.
    pub fn new(basis: Array2<f64>) -> Result<Self> {
        if basis.nrows() == 0 || basis.ncols() == 0 {
            return Err(Error::EmptyInput);
        }
        for i in 0..basis.nrows() {
            let n = norm(basis.row(i));
            if (n - 1.0).abs() > ORTHO_TOL {
                return Err(Error::NotUnit { norm: n });
            }
            for j in 0..i {
                let dot = basis.row(i).dot(&basis.row(j));
                if dot.abs() > ORTHO_TOL {
                    return Err(Error::InvalidInput(format!(
                        "basis rows {j} and {i} are not orthogonal (dot = {dot:e})"
                    )));
                }
            }
        }
        Ok(Subspace { basis })
    }

    /// Number of basis vectors (k).
    pub fn k(&self) -> usize {
        self.basis.nrows()
    }

    /// Ambient dimension (d).
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> ArrayView2<'_, f64> {
        self.basis.view()
    }

    pub fn component(&self, i: usize) -> ArrayView1<'_, f64> {
        self.basis.row(i)
    }

    /// The single basis vector of a 1-dimensional subspace.
    pub fn direction(&self) -> ArrayView1<'_, f64> {
        assert_eq!(self.k(), 1, "direction() requires a 1-dimensional subspace");
        self.basis.row(0)
    }
}

/// Principal directions of a matrix, ordered by decreasing singular value.
#[derive(Debug, Clone)]
pub struct PcaResult {
    pub components: Subspace,
    /// Full singular value spectrum of the input, descending.
    pub singular_values: Vec<f64>,
    /// Indices i (0-based, within the returned components) where the gap to
    /// the next singular value is below 1e-9 relative, meaning the order and
    /// orientation of components i and i+1 are numerically ambiguous.
    pub near_ties: Vec<usize>,
}

/// Top `count` right singular vectors of `matrix`. The caller is expected to
/// have centered the matrix (see [`center`]); no centering happens here.
///
/// Fails with [`Error::RankDeficient`] when `count` exceeds the numerical
/// rank (singular values above `max(n, d) * eps * sigma_max`).
pub fn principal_components(matrix: ArrayView2<'_, f64>, count: usize) -> Result<PcaResult> {
    let (n, d) = matrix.dim();
    if n == 0 || d == 0 {
        return Err(Error::EmptyInput);
    }
    if count == 0 || count > n.min(d) {
        return Err(Error::InvalidInput(format!(
            "component count must be in 1..={}, got {count}",
            n.min(d)
        )));
    }

    let owned = matrix.to_owned();
    let (_, s, vt) = owned
        .svd(false, true)
        .map_err(|e| Error::Numeric(format!("SVD failed: {e}")))?;
    let vt = vt.expect("requested Vt");
    let singular_values = s.to_vec();

    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let rank_tol = n.max(d) as f64 * f64::EPSILON * sigma_max;
    let rank = singular_values.iter().filter(|&&x| x > rank_tol).count();
    if count > rank {
        return Err(Error::RankDeficient { requested: count, available: rank });
    }

    let mut basis = vt.slice(ndarray::s![..count, ..]).to_owned();
    for mut row in basis.rows_mut() {
        let lead = row.iter().find(|c| c.abs() > SIGN_TOL);
        if let Some(&c) = lead {
            if c < 0.0 {
                row.mapv_inplace(|x| -x);
            }
        }
    }

    let mut near_ties = Vec::new();
    for i in 0..count {
        if i + 1 < singular_values.len()
            && singular_values[i] - singular_values[i + 1] < NEAR_TIE_REL * singular_values[i]
        {
            near_ties.push(i);
        }
    }

    Ok(PcaResult { components: Subspace::new(basis)?, singular_values, near_ties })
}

/// Projection of `v` onto the subspace: sum over basis vectors b_j of
/// (v . b_j) b_j.
pub fn project_onto(v: ArrayView1<'_, f64>, subspace: &Subspace) -> Result<Array1<f64>> {
    if v.len() != subspace.dim() {
        return Err(Error::DimensionMismatch { expected: subspace.dim(), got: v.len() });
    }
    let mut out = Array1::zeros(v.len());
    for b in subspace.basis.rows() {
        let coeff = v.dot(&b);
        out.scaled_add(coeff, &b);
    }
    Ok(out)
}

/// `v` minus its component along the unit vector `u`. The result is
/// orthogonal to `u` up to rounding; applying the operation twice changes
/// nothing further.
pub fn remove_component(v: ArrayView1<'_, f64>, u: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    if v.len() != u.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), got: v.len() });
    }
    let n = norm(u);
    if (n - 1.0).abs() > ORTHO_TOL {
        return Err(Error::NotUnit { norm: n });
    }
    let coeff = v.dot(&u);
    let mut out = v.to_owned();
    out.scaled_add(-coeff, &u);
    Ok(out)
}

/// Cosine of the angle between two vectors, clamped to [-1, 1]. Undefined
/// (an error) when either vector has zero length.
pub fn cosine_similarity(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::UndefinedSimilarity);
    }
    Ok((a.dot(&b) / (na * nb)).clamp(-1.0, 1.0))
}
