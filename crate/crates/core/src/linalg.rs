// Copyright 2026 The floquet-cages Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense helpers on top of `faer`: symmetric eigensolves, spectral matrix
//! exponentials and a unitary eigendecomposition that keeps eigenvectors
//! orthonormal inside degenerate bands.

use std::f64::consts::PI;
use std::ops::Range;

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef, Side};

use crate::{Error, Result};

/// Ascending eigenvalues and orthonormal eigenvector columns of a real
/// symmetric matrix. Only the lower triangle is read.
pub fn symmetric_eigen(h: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    if h.nrows() == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

pub fn hermitian_eigen(h: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    if h.nrows() == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn hermitian_eigenvalues(h: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if h.nrows() == 0 {
        return Ok(Vec::new());
    }
    h.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence)
}

pub fn to_complex(m: MatRef<'_, f64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0))
}

/// `V · diag(e^{−i E_k t}) · Vᵀ` for a real orthogonal `V`.
pub fn spectral_exp(values: &[f64], vectors: MatRef<'_, f64>, t: f64) -> Mat<c64> {
    let d = values.len();
    let cos = Mat::from_fn(d, d, |i, k| vectors[(i, k)] * (values[k] * t).cos());
    let sin = Mat::from_fn(d, d, |i, k| -vectors[(i, k)] * (values[k] * t).sin());
    let re = &cos * vectors.transpose();
    let im = &sin * vectors.transpose();
    Mat::from_fn(d, d, |i, j| c64::new(re[(i, j)], im[(i, j)]))
}

/// `V · diag(values) · V†`.
pub fn reconstruct_hermitian(values: &[f64], vectors: MatRef<'_, c64>) -> Mat<c64> {
    let d = values.len();
    let scaled = Mat::from_fn(d, d, |i, k| vectors[(i, k)] * values[k]);
    &scaled * vectors.adjoint()
}

/// `V · diag(phases) · V†` with complex diagonal entries.
pub fn reconstruct_normal(values: &[c64], vectors: MatRef<'_, c64>) -> Mat<c64> {
    let d = values.len();
    let scaled = Mat::from_fn(d, d, |i, k| vectors[(i, k)] * values[k]);
    &scaled * vectors.adjoint()
}

pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

pub fn max_abs_real(m: MatRef<'_, f64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].abs());
        }
    }
    best
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: MatRef<'_, c64>) -> f64 {
    let gram = u.adjoint() * u;
    let d = u.ncols();
    max_abs((gram - Mat::<c64>::identity(d, d)).as_ref())
}

/// Maps a phase to `(−π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

/// Circular distance between two phases.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Groups an ascending list into runs whose consecutive gaps are at most
/// `tol`.
pub fn gap_clusters(sorted: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=sorted.len() {
        if k == sorted.len() || sorted[k] - sorted[k - 1] > tol {
            if k > start {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

/// Eigendecomposition of a unitary matrix.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    /// `θ_k = −arg λ_k ∈ (−π, π]`, ascending.
    pub phases: Vec<f64>,
    pub eigenvalues: Vec<c64>,
    pub vectors: Mat<c64>,
}

/// Eigendecomposition of a unitary `U` through a Hermitian Cayley transform.
///
/// The spectrum is rotated so that `−1` sits in the middle of the widest
/// spectral gap, then `K = i(I + W)⁻¹(I − W)` is diagonalised with a
/// Hermitian solver. Degenerate bands therefore come back with orthonormal
/// eigenvectors. Eigenvalues are Rayleigh quotients against the original `U`.
pub fn unitary_eigen(u: MatRef<'_, c64>) -> Result<UnitaryEigen> {
    let d = u.nrows();
    if u.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.ncols(),
        });
    }
    if d == 0 {
        return Ok(UnitaryEigen {
            phases: Vec::new(),
            eigenvalues: Vec::new(),
            vectors: Mat::zeros(0, 0),
        });
    }

    let half = c64::new(0.5, 0.0);
    let re_part = Mat::from_fn(d, d, |i, j| half * (u[(i, j)] + u[(j, i)].conj()));
    let cosines = hermitian_eigenvalues(re_part.as_ref())?;
    let mut angles: Vec<f64> = cosines
        .iter()
        .flat_map(|&c| {
            let a = c.clamp(-1.0, 1.0).acos();
            [a, -a]
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let cut = widest_gap_midpoint(&angles);

    let rot = c64::from_polar(1.0, PI - cut);
    let w = Mat::from_fn(d, d, |i, j| rot * u[(i, j)]);
    let eye = Mat::<c64>::identity(d, d);
    let plus = &eye + &w;
    let minus = &eye - &w;
    let solved = plus.partial_piv_lu().solve(&minus);
    let i_unit = c64::new(0.0, 1.0);
    let k = Mat::from_fn(d, d, |a, b| {
        half * i_unit * (solved[(a, b)] - solved[(b, a)].conj())
    });
    let (_, vectors) = hermitian_eigen(k.as_ref())?;

    let uv = u * &vectors;
    let mut pairs: Vec<(f64, c64, usize)> = (0..d)
        .map(|col| {
            let mut q = c64::new(0.0, 0.0);
            for row in 0..d {
                q += vectors[(row, col)].conj() * uv[(row, col)];
            }
            let lambda = if q.norm() > 0.0 { q / q.norm() } else { c64::new(1.0, 0.0) };
            (phase_of(lambda), lambda, col)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

    let vectors = Mat::from_fn(d, d, |i, k| vectors[(i, pairs[k].2)]);
    Ok(UnitaryEigen {
        phases: pairs.iter().map(|p| p.0).collect(),
        eigenvalues: pairs.iter().map(|p| p.1).collect(),
        vectors,
    })
}

/// `−arg λ`, mapped into `(−π, π]`.
pub fn phase_of(lambda: c64) -> f64 {
    let theta = -lambda.im.atan2(lambda.re);
    if theta <= -PI {
        PI
    } else {
        theta
    }
}

fn widest_gap_midpoint(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let mut best_gap = sorted[0] + 2.0 * PI - sorted[n - 1];
    let mut best_mid = wrap_phase(sorted[n - 1] + best_gap / 2.0);
    for k in 1..n {
        let gap = sorted[k] - sorted[k - 1];
        if gap > best_gap {
            best_gap = gap;
            best_mid = sorted[k - 1] + gap / 2.0;
        }
    }
    best_mid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_unitary(phases: &[f64]) -> Mat<c64> {
        let d = phases.len();
        Mat::from_fn(d, d, |i, j| {
            if i == j {
                c64::from_polar(1.0, -phases[i])
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn wrap_phase_boundary() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(phase_of(c64::new(-1.0, 0.0)), PI);
        assert_eq!(phase_of(c64::new(-1.0, -0.0)), PI);
    }

    #[test]
    fn gap_clusters_groups_runs() {
        let v = [0.0, 1e-10, 0.5, 0.5, 2.0];
        assert_eq!(gap_clusters(&v, 1e-8), vec![0..2, 2..4, 4..5]);
        assert!(gap_clusters(&[], 1e-8).is_empty());
    }

    #[test]
    fn unitary_eigen_recovers_diagonal_phases() {
        let phases = [0.3, -1.2, PI, 0.3, 2.9];
        let u = diag_unitary(&phases);
        let eig = unitary_eigen(u.as_ref()).unwrap();
        let mut expected = phases.to_vec();
        expected.sort_by(f64::total_cmp);
        for (a, b) in eig.phases.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let rebuilt = reconstruct_normal(&eig.eigenvalues, eig.vectors.as_ref());
        assert!(max_abs((rebuilt - &u).as_ref()) < 1e-12);
    }

    #[test]
    fn unitary_eigen_handles_full_circle() {
        // Phases spread over the whole circle leave only narrow gaps.
        let d = 40;
        let phases: Vec<f64> = (0..d).map(|k| wrap_phase(-PI + 2.0 * PI * k as f64 / d as f64)).collect();
        let (_, q) = symmetric_eigen(
            Mat::from_fn(d, d, |i, j| ((i * 7 + j * 7 + i * j) % 5) as f64 - 2.0).as_ref(),
        )
        .unwrap();
        let qc = to_complex(q.as_ref());
        let u = &qc * diag_unitary(&phases) * qc.adjoint();
        let eig = unitary_eigen(u.as_ref()).unwrap();
        assert!(unitarity_defect(eig.vectors.as_ref()) < 1e-10);
        let rebuilt = reconstruct_normal(&eig.eigenvalues, eig.vectors.as_ref());
        assert!(max_abs((rebuilt - &u).as_ref()) < 1e-10);
    }

    #[test]
    fn spectral_exp_of_dimer() {
        let h = Mat::from_fn(2, 2, |i, j| if i != j { 1.0 } else { 0.0 });
        let (vals, vecs) = symmetric_eigen(h.as_ref()).unwrap();
        let u = spectral_exp(&vals, vecs.as_ref(), PI / 2.0);
        assert!(u[(0, 0)].norm() < 1e-14);
        assert!((u[(0, 1)].norm() - 1.0).abs() < 1e-14);
        assert!(unitarity_defect(u.as_ref()) < 1e-14);
    }
}
