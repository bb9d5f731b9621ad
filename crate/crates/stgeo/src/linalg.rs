//! Dense complex matrix primitives sized for T×k signal blocks (T ≲ 64).
//!
//! Provides the SVD, Hermitian eigenvalues and Haar-random unitaries the
//! geometry layers are built on. Decompositions use cyclic Jacobi sweeps:
//! at these sizes they are simple, accurate to near machine precision and
//! have no external dependencies.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    /// Builds a matrix from row-major entries; checks the count and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        let m = CMat { rows, cols, data };
        if !m.is_finite() {
            return Err(Error::invalid("matrix contains NaN or Inf"));
        }
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Matrix product; panics on inner-dimension mismatch.
    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(l, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian part (m + m†)/2; panics unless square.
    pub fn hermitian_part(&self) -> CMat {
        assert_eq!(self.rows, self.cols, "hermitian part needs a square matrix");
        CMat::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * C64::new(0.5, 0.0)
        })
    }

    /// Largest entry-wise deviation from another matrix.
    pub fn max_abs_diff(&self, rhs: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖m†m − 1‖_max`, the orthonormality defect of the columns.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        gram.max_abs_diff(&CMat::identity(self.cols))
    }

    fn col_dot(&self, p: usize, q: usize) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.rows {
            acc += self[(i, p)].conj() * self[(i, q)];
        }
        acc
    }

    fn col_norm_sqr(&self, p: usize) -> f64 {
        (0..self.rows).map(|i| self[(i, p)].norm_sqr()).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Thin singular value decomposition `m = U · diag(σ) · V†`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMat,
    /// Singular values, descending, non-negative.
    pub sigma: Vec<f64>,
    pub v: CMat,
}

/// One-sided Jacobi SVD. `U` is rows×min, `V` is cols×min, σ descending.
pub fn svd(m: &CMat) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::invalid("svd input contains NaN or Inf"));
    }
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::invalid("svd input is empty"));
    }
    if m.rows < m.cols {
        // m† = V Σ U†, so factorize the adjoint and swap the factors.
        let t = svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }

    let n = m.cols;
    let mut a = m.clone();
    let mut v = CMat::identity(n);

    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let app = a.col_norm_sqr(p);
                let aqq = a.col_norm_sqr(q);
                let apq = a.col_dot(p, q);
                let g = apq.norm();
                if g <= tol::JACOBI_EPS * (app * aqq).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = apq / g; // e^{iφ}
                let tau = (aqq - app) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_cols(&mut a, p, q, c, s, phase);
                rotate_cols(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| a.col_norm_sqr(j).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let mut u = CMat::zeros(m.rows, n);
    let mut vv = CMat::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        sigma.push(norms[src]);
        for i in 0..m.rows {
            u[(i, dst)] = a[(i, src)];
        }
        for i in 0..n {
            vv[(i, dst)] = v[(i, src)];
        }
    }

    // Normalize nonzero columns; replace (near-)zero ones with vectors
    // orthonormal to everything already placed.
    let smax = sigma.first().copied().unwrap_or(0.0);
    let zero_cut = smax * 1e-13;
    for j in 0..n {
        if sigma[j] > zero_cut && sigma[j] > 0.0 {
            let inv = C64::new(1.0 / sigma[j], 0.0);
            for i in 0..m.rows {
                u[(i, j)] *= inv;
            }
        } else {
            sigma[j] = sigma[j].max(0.0);
            complete_column(&mut u, j);
        }
    }

    Ok(Svd { u, sigma, v: vv })
}

/// In-place plane rotation of columns p,q by J = [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]].
fn rotate_cols(m: &mut CMat, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let phase_conj = phase.conj();
    for i in 0..m.rows() {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * c - mq * (phase_conj * s);
        m[(i, q)] = mp * s + mq * (phase_conj * c);
    }
}

/// Overwrites column j of u with a unit vector orthogonal to all other columns.
fn complete_column(u: &mut CMat, j: usize) {
    let rows = u.rows();
    let cols = u.cols();
    for basis in 0..rows {
        let mut v = vec![ZERO; rows];
        v[basis] = ONE;
        // project out every other column (two passes for stability)
        for _ in 0..2 {
            for other in 0..cols {
                if other == j {
                    continue;
                }
                let mut dot = ZERO;
                for i in 0..rows {
                    dot += u[(i, other)].conj() * v[i];
                }
                for i in 0..rows {
                    v[i] -= dot * u[(i, other)];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            let inv = C64::new(1.0 / norm, 0.0);
            for i in 0..rows {
                u[(i, j)] = v[i] * inv;
            }
            return;
        }
    }
    unreachable!("fewer columns than rows always leaves room for completion");
}

/// Eigenvalues of the hermitian part (m + m†)/2, descending.
pub fn hermitian_part_eigs(m: &CMat) -> Result<Vec<f64>> {
    if m.rows != m.cols {
        return Err(Error::shape(format!(
            "hermitian part needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if !m.is_finite() {
        return Err(Error::invalid("input contains NaN or Inf"));
    }
    Ok(hermitian_eigenvalues(&m.hermitian_part()))
}

/// Eigenvalues of a Hermitian matrix via cyclic Jacobi, descending.
/// The input is assumed Hermitian; only its Hermitian part is consulted.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    assert_eq!(h.rows, h.cols);
    let n = h.rows;
    if n == 0 {
        return Vec::new();
    }
    let mut a = h.hermitian_part(); // exact symmetrization guards round-off
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol::JACOBI_EPS * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)].norm();
                if g == 0.0 {
                    continue;
                }
                let phase = a[(p, q)] / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // similarity transform J† A J
                rotate_cols(&mut a, p, q, c, s, phase);
                rotate_rows(&mut a, p, q, c, s, phase);
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    eigs
}

/// In-place row update for J† · m with the same J as [`rotate_cols`].
fn rotate_rows(m: &mut CMat, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    for j in 0..m.cols() {
        let rp = m[(p, j)];
        let rq = m[(q, j)];
        m[(p, j)] = rp * c - rq * (phase * s);
        m[(q, j)] = rp * s + rq * (phase * c);
    }
}

/// Thin QR decomposition via Householder reflections; requires rows ≥ cols.
#[derive(Clone, Debug)]
pub struct Qr {
    pub q: CMat,
    pub r: CMat,
}

pub fn qr(m: &CMat) -> Qr {
    assert!(m.rows >= m.cols, "thin QR requires rows >= cols");
    let rows = m.rows;
    let cols = m.cols;
    let mut r = m.clone();
    // Householder vectors stored column-wise under the diagonal of `vs`.
    let mut vs: Vec<Vec<C64>> = Vec::with_capacity(cols);
    let mut betas = Vec::with_capacity(cols);

    for j in 0..cols {
        let mut v = vec![ZERO; rows - j];
        for i in j..rows {
            v[i - j] = r[(i, j)];
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            vs.push(v);
            betas.push(0.0);
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm;
        v[0] = x0 - alpha;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let beta = if vnorm_sqr > 0.0 { 2.0 / vnorm_sqr } else { 0.0 };

        // apply H = I - beta v v† to the trailing block of r
        for col in j..cols {
            let mut dot = ZERO;
            for i in j..rows {
                dot += v[i - j].conj() * r[(i, col)];
            }
            dot *= beta;
            for i in j..rows {
                let vi = v[i - j];
                r[(i, col)] -= dot * vi;
            }
        }
        vs.push(v);
        betas.push(beta);
    }

    // accumulate thin Q by applying H_1 … H_cols to the identity block
    let mut q = CMat::zeros(rows, cols);
    for j in 0..cols {
        q[(j, j)] = ONE;
    }
    for j in (0..cols).rev() {
        let v = &vs[j];
        let beta = betas[j];
        if beta == 0.0 {
            continue;
        }
        for col in 0..cols {
            let mut dot = ZERO;
            for i in j..rows {
                dot += v[i - j].conj() * q[(i, col)];
            }
            dot *= beta;
            for i in j..rows {
                let vi = v[i - j];
                q[(i, col)] -= dot * vi;
            }
        }
    }

    // zero out the sub-diagonal noise of r
    for j in 0..cols {
        for i in (j + 1)..rows {
            r[(i, j)] = ZERO;
        }
    }
    let mut r_square = CMat::from_fn(cols, cols, |i, j| r[(i, j)]);

    // canonical convention: absorb the diagonal phases of R into Q so that
    // R's diagonal is real non-negative. This keeps Q continuous in the
    // input (Q(A) = A for orthonormal A) and is the standard correction
    // that makes QR of a complex Gaussian exactly Haar.
    for j in 0..cols {
        let d = r_square[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            let phase_conj = phase.conj();
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
            for col in j..cols {
                r_square[(j, col)] *= phase_conj;
            }
        }
    }
    Qr { q, r: r_square }
}

/// Orthonormalized copy: the Q factor of the thin QR.
pub fn orthonormalize(m: &CMat) -> CMat {
    qr(m).q
}

/// Standard complex Gaussian CN(0,1) via Box–Muller (variance ½ per part).
pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    let r = (-u1.ln()).sqrt();
    let phi = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * phi.cos(), r * phi.sin())
}

/// Matrix with i.i.d. CN(0,1) entries.
pub fn complex_gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed n×n unitary: QR of a complex Gaussian with the phases of
/// the triangular factor's diagonal absorbed into Q (making R's diagonal
/// real-positive; the correction is built into [`qr`]). Deterministic per
/// seed.
pub fn haar_unitary(n: usize, seed: u64) -> Result<CMat> {
    if n == 0 {
        return Err(Error::invalid("haar_unitary needs n >= 1"));
    }
    let mut rng = seeded_rng(seed, &[0x48, 0x41, 0x41, 0x52]); // "HAAR"
    Ok(haar_unitary_with(n, &mut rng))
}

/// Haar unitary drawn from a caller-supplied stream.
pub fn haar_unitary_with(n: usize, rng: &mut impl Rng) -> CMat {
    assert!(n >= 1);
    qr(&complex_gaussian_matrix(n, n, rng)).q
}

/// Uniform random Stiefel frame: Q factor of a T×k complex Gaussian.
pub fn random_stiefel_matrix(t: usize, k: usize, rng: &mut impl Rng) -> CMat {
    assert!(t >= k && k >= 1);
    qr(&complex_gaussian_matrix(t, k, rng)).q
}

/// ChaCha stream derived from a user seed plus a domain-separation tag, so
/// independent subsystems never share a stream for the same seed.
pub fn seeded_rng(seed: u64, tag: &[u8]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    for (i, b) in tag.iter().take(16).enumerate() {
        key[8 + i] = *b;
    }
    ChaCha8Rng::from_seed(key)
}

/// Stream for one Monte Carlo trial: fully determined by (seed, tag, trial),
/// independent of worker count.
pub fn trial_rng(seed: u64, tag: &[u8], trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    for (i, b) in tag.iter().take(16).enumerate() {
        key[16 + i] = *b;
    }
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_cmat(rows: usize, cols: usize, seed: u64) -> CMat {
        let mut rng = seeded_rng(seed, b"test");
        complex_gaussian_matrix(rows, cols, &mut rng)
    }

    /// Test-only Jacobi eigensolver for Hermitian matrices, written against
    /// the real-augmented 2x2 reduction. Independent of the production path.
    fn oracle_hermitian_eigs(h: &CMat) -> Vec<f64> {
        let n = h.rows();
        let mut a: Vec<Vec<C64>> = (0..n)
            .map(|i| (0..n).map(|j| (h[(i, j)] + h[(j, i)].conj()) * c(0.5, 0.0)).collect())
            .collect();
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += a[i][j].norm_sqr();
                    }
                }
            }
            if off.sqrt() < 1e-13 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq.norm() < 1e-300 {
                        continue;
                    }
                    // diagonalize the 2x2 principal submatrix exactly
                    let app = a[p][p].re;
                    let aqq = a[q][q].re;
                    let g = apq.norm();
                    let phi = apq / g;
                    let theta = 0.5 * (2.0 * g).atan2(app - aqq);
                    let (cs, sn) = (theta.cos(), theta.sin());
                    // columns: [p q] <- [p q] [[cs, -sn],[sn*phi*, cs*phi*]]
                    let w1: Vec<C64> = (0..n)
                        .map(|i| a[i][p] * cs + a[i][q] * (phi.conj() * sn))
                        .collect();
                    let w2: Vec<C64> = (0..n)
                        .map(|i| -a[i][p] * sn + a[i][q] * (phi.conj() * cs))
                        .collect();
                    for i in 0..n {
                            a[i][p] = w1[i];
                            a[i][q] = w2[i];
                    }
                    let r1: Vec<C64> = (0..n)
                        .map(|j| a[p][j] * cs + a[q][j] * (phi * sn))
                        .collect();
                    let r2: Vec<C64> = (0..n)
                        .map(|j| -a[p][j] * sn + a[q][j] * (phi * cs))
                        .collect();
                    a[p][..n].copy_from_slice(&r1[..n]);
                    a[q][..n].copy_from_slice(&r2[..n]);
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
        eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
        eigs
    }

    #[test]
    fn svd_diagonal_case() {
        let m = CMat::new(2, 2, vec![c(3.0, 0.0), ZERO, ZERO, c(1.0, 0.0)]).unwrap();
        let s = svd(&m).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-12);
        assert!((s.sigma[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_zero_matrix() {
        let m = CMat::zeros(2, 2);
        let s = svd(&m).unwrap();
        assert_eq!(s.sigma, vec![0.0, 0.0]);
        // U must still have orthonormal columns.
        assert!(s.u.orthonormality_defect() < tol::ORTHONORMALITY);
    }

    #[test]
    fn svd_rejects_non_finite() {
        let m = CMat {
            rows: 1,
            cols: 1,
            data: vec![c(f64::NAN, 0.0)],
        };
        assert!(matches!(svd(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn svd_matches_gram_eigenvalues() {
        // σ_i(m) must be the square roots of eig(m†m) from the independent
        // test-only Jacobi eigensolver.
        for seed in 0..10u64 {
            let m = random_cmat(4, 2, seed);
            let s = svd(&m).unwrap();
            let gram = m.adjoint().mul(&m);
            let eigs = oracle_hermitian_eigs(&gram);
            for (i, lam) in eigs.iter().enumerate() {
                assert!(
                    (s.sigma[i] - lam.max(0.0).sqrt()).abs() < 1e-9,
                    "seed {seed}: sigma {} vs sqrt eig {}",
                    s.sigma[i],
                    lam
                );
            }
        }
    }

    #[test]
    fn svd_reconstructs_input() {
        for (rows, cols, seed) in [(4, 2, 1u64), (6, 3, 2), (2, 2, 3), (5, 5, 4), (3, 5, 5)] {
            let m = random_cmat(rows, cols, seed);
            let s = svd(&m).unwrap();
            let mut us = s.u.clone();
            for j in 0..s.sigma.len() {
                for i in 0..us.rows() {
                    us[(i, j)] *= c(s.sigma[j], 0.0);
                }
            }
            let rec = us.mul(&s.v.adjoint());
            let err = rec.sub(&m).frobenius_norm();
            assert!(
                err <= tol::SVD_RECONSTRUCTION * m.frobenius_norm(),
                "reconstruction error {err}"
            );
            assert!(s.u.orthonormality_defect() < tol::ORTHONORMALITY);
            assert!(s.v.orthonormality_defect() < tol::ORTHONORMALITY);
            for w in s.sigma.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn svd_invariant_under_unitaries() {
        for seed in 0..20u64 {
            let m = random_cmat(5, 3, seed);
            let mut rng = seeded_rng(seed, b"unit");
            let u = haar_unitary_with(5, &mut rng);
            let v = haar_unitary_with(3, &mut rng);
            let s0 = svd(&m).unwrap().sigma;
            let s1 = svd(&u.mul(&m).mul(&v)).unwrap().sigma;
            for (a, b) in s0.iter().zip(&s1) {
                assert!((a - b).abs() < tol::CROSS_CHECK);
            }
        }
    }

    #[test]
    fn hermitian_part_eigs_identity() {
        let eigs = hermitian_part_eigs(&CMat::identity(2)).unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-14);
        assert!((eigs[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_part_eigs_analytic_2x2() {
        // m = [[0,2],[0,0]] has hermitian part [[0,1],[1,0]] with eigs (1,-1).
        let m = CMat::new(2, 2, vec![ZERO, c(2.0, 0.0), ZERO, ZERO]).unwrap();
        let eigs = hermitian_part_eigs(&m).unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-14);
        assert!((eigs[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_part_eigs_rejects_non_square() {
        let m = CMat::zeros(2, 3);
        assert!(matches!(hermitian_part_eigs(&m), Err(Error::Shape(_))));
    }

    #[test]
    fn fan_hoffman_inequality_holds() {
        // λ_i((m+m†)/2) ≤ σ_i(m) on a random sweep.
        for seed in 0..1000u64 {
            let m = random_cmat(3, 3, seed);
            let eigs = hermitian_part_eigs(&m).unwrap();
            let sig = svd(&m).unwrap().sigma;
            for i in 0..3 {
                assert!(
                    eigs[i] <= sig[i] + tol::CROSS_CHECK,
                    "seed {seed}: λ_{i}={} > σ_{i}={}",
                    eigs[i],
                    sig[i]
                );
            }
        }
    }

    #[test]
    fn hermitian_eigs_match_oracle() {
        for seed in 100..120u64 {
            let m = random_cmat(4, 4, seed);
            let h = m.hermitian_part();
            let got = hermitian_eigenvalues(&h);
            let want = oracle_hermitian_eigs(&h);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-10, "seed {seed}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn haar_scalar_has_unit_modulus() {
        let u = haar_unitary(1, 7).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_deterministic_per_seed() {
        let a = haar_unitary(3, 42).unwrap();
        let b = haar_unitary(3, 42).unwrap();
        assert_eq!(a, b);
        let c = haar_unitary(3, 43).unwrap();
        assert!(a.max_abs_diff(&c) > 1e-3);
    }

    #[test]
    fn haar_unitarity_for_small_n() {
        for n in 1..=8 {
            let u = haar_unitary(n, 11 + n as u64).unwrap();
            assert!(
                u.orthonormality_defect() < tol::ORTHONORMALITY,
                "n={n} defect {}",
                u.orthonormality_defect()
            );
        }
    }

    #[test]
    fn haar_rejects_zero_dim() {
        assert!(matches!(haar_unitary(0, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn haar_first_entry_moment() {
        // E|u_11|² = 1/n for Haar. For n=2, |u11|² is Uniform(0,1), so the
        // standard error over N samples is sqrt(1/12/N).
        let n_samples = 10_000;
        let mut rng = seeded_rng(5, b"moment");
        let mut acc = 0.0;
        for _ in 0..n_samples {
            let u = haar_unitary_with(2, &mut rng);
            acc += u[(0, 0)].norm_sqr();
        }
        let mean = acc / n_samples as f64;
        let se = (1.0 / 12.0 / n_samples as f64).sqrt();
        assert!(
            (mean - 0.5).abs() < 3.0 * se,
            "mean {mean} outside 3 standard errors ({se})"
        );
    }

    #[test]
    fn qr_orthonormal_and_reconstructs() {
        for seed in 0..10u64 {
            let m = random_cmat(6, 3, seed);
            let f = qr(&m);
            assert!(f.q.orthonormality_defect() < tol::ORTHONORMALITY);
            let err = f.q.mul(&f.r).sub(&m).frobenius_norm();
            assert!(err < 1e-12 * m.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = seeded_rng(9, b"gauss");
        let n = 100_000;
        let mut mean = C64::new(0.0, 0.0);
        let mut pow = 0.0;
        for _ in 0..n {
            let z = complex_gaussian(&mut rng);
            mean += z;
            pow += z.norm_sqr();
        }
        mean /= c(n as f64, 0.0);
        pow /= n as f64;
        assert!(mean.norm() < 4.0 / (n as f64).sqrt());
        assert!((pow - 1.0).abs() < 0.02);
    }

    #[test]
    fn trial_rng_streams_are_distinct() {
        let mut a = trial_rng(1, b"x", 0);
        let mut b = trial_rng(1, b"x", 1);
        let va: Vec<u64> = (0..4).map(|_| a.gen()).collect();
        let vb: Vec<u64> = (0..4).map(|_| b.gen()).collect();
        assert_ne!(va, vb);
        let mut a2 = trial_rng(1, b"x", 0);
        let va2: Vec<u64> = (0..4).map(|_| a2.gen()).collect();
        assert_eq!(va, va2);
    }
}
