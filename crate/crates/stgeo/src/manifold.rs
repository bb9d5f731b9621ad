//! Stiefel/Grassmann geometry of symbol pairs.
//!
//! A code symbol is a k-frame Φ (T×k, Φ†Φ = 1); the non-coherent receiver
//! only resolves its column span ⟨Φ⟩. Two spans are separated by principal
//! angles 0 ≤ ϑ_1 ≤ … ≤ ϑ_k ≤ π/2 with cos ϑ_i = σ_i(Φ†Ψ). The coherent
//! receiver induces d̄(Φ,Ψ) = ‖Φ−Ψ‖_F on frames; the non-coherent receiver
//! induces the chordal distance d̲ = √Σ sin²ϑ_i on spans. Minimizing
//! coherent quantities over the U(k) fibers of both spans gives the closed
//! forms sdist_j = Σ_{|I|=j} 2^j Π_{i∈I}(1 − cos ϑ_{k−i+1}).

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::tol;

/// T×k frame with orthonormal columns (a point on the Stiefel manifold).
#[derive(Clone, Debug)]
pub struct StiefelFrame {
    matrix: CMat,
}

impl StiefelFrame {
    /// Validates T ≥ k ≥ 1 and Φ†Φ = 1 within [`tol::FRAME_TOLERANCE`].
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.cols() < 1 || matrix.rows() < matrix.cols() {
            return Err(Error::shape(format!(
                "a k-frame needs T >= k >= 1, got T={} k={}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::invalid("frame contains NaN or Inf"));
        }
        let defect = matrix.orthonormality_defect();
        if defect > tol::FRAME_TOLERANCE {
            return Err(Error::invalid(format!(
                "columns not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(StiefelFrame { matrix })
    }

    pub fn t(&self) -> usize {
        self.matrix.rows()
    }

    pub fn k(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    /// Fiber action Φ ↦ Φu for unitary u ∈ U(k); keeps the span fixed.
    pub fn rotate(&self, u: &CMat) -> Result<StiefelFrame> {
        if u.rows() != self.k() || u.cols() != self.k() {
            return Err(Error::shape(format!(
                "fiber rotation needs a {0}x{0} unitary",
                self.k()
            )));
        }
        StiefelFrame::new(self.matrix.mul(u))
    }

    /// Ambient action Φ ↦ UΦ for unitary U ∈ U(T).
    pub fn left_multiply(&self, u: &CMat) -> Result<StiefelFrame> {
        if u.rows() != self.t() || u.cols() != self.t() {
            return Err(Error::shape(format!(
                "ambient rotation needs a {0}x{0} unitary",
                self.t()
            )));
        }
        StiefelFrame::new(u.mul(&self.matrix))
    }

    /// Uniform random frame: Q factor of a T×k complex Gaussian.
    pub fn random(t: usize, k: usize, rng: &mut impl rand::Rng) -> Result<StiefelFrame> {
        if k < 1 || t < k {
            return Err(Error::shape(format!("need T >= k >= 1, got T={t} k={k}")));
        }
        StiefelFrame::new(linalg::random_stiefel_matrix(t, k, rng))
    }
}

/// A k-dimensional subspace of C^T, stored as an arbitrary representative.
///
/// No canonical section of the fiber bundle is chosen; all computations on
/// Grassmann points must be invariant under representative change.
#[derive(Clone, Debug)]
pub struct GrassmannPoint {
    rep: StiefelFrame,
}

impl GrassmannPoint {
    /// Requires T ≥ 2k: subspaces with k > T/2 are rejected rather than
    /// complemented.
    pub fn new(rep: StiefelFrame) -> Result<Self> {
        if rep.t() < 2 * rep.k() {
            return Err(Error::UnsupportedGeometry(format!(
                "Grassmann points need T >= 2k, got T={} k={}",
                rep.t(),
                rep.k()
            )));
        }
        Ok(GrassmannPoint { rep })
    }

    pub fn representative(&self) -> &StiefelFrame {
        &self.rep
    }

    pub fn t(&self) -> usize {
        self.rep.t()
    }

    pub fn k(&self) -> usize {
        self.rep.k()
    }

    /// Span equality: all principal angles below [`tol::SUBSPACE_EQUALITY`].
    /// Never compares matrices directly.
    pub fn coincides_with(&self, other: &GrassmannPoint) -> Result<bool> {
        let angles = principal_angles(self, other)?;
        Ok(angles.as_slice().iter().all(|&a| a < tol::SUBSPACE_EQUALITY))
    }
}

/// Principal angles between two subspaces, ascending in [0, π/2].
#[derive(Clone, Debug)]
pub struct PrincipalAngles {
    theta: Vec<f64>,
}

impl PrincipalAngles {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::invalid("need at least one angle"));
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        for w in theta.windows(2) {
            if w[0] > w[1] {
                return Err(Error::invalid("angles must be ascending"));
            }
        }
        if theta[0] < 0.0 || *theta.last().unwrap() > half_pi + 1e-12 {
            return Err(Error::invalid("angles must lie in [0, pi/2]"));
        }
        Ok(PrincipalAngles { theta })
    }

    pub fn k(&self) -> usize {
        self.theta.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }
}

/// Geometry of one symbol pair: both singular-value profiles, the principal
/// angles and every derived metric.
#[derive(Clone, Debug)]
pub struct PairGeometry {
    /// σ̄_i = σ_i(Φ−Ψ) ∈ [0,2], descending.
    pub sigma_coh: Vec<f64>,
    /// σ̲_i = σ_i(Φ†Ψ) = cos ϑ_i ∈ [0,1], descending.
    pub sigma_noncoh: Vec<f64>,
    pub theta: PrincipalAngles,
    /// Coherent receiver metric d̄ = ‖Φ−Ψ‖_F.
    pub d_coh: f64,
    /// Chordal distance d̲ = √Σ sin²ϑ_i.
    pub d_noncoh: f64,
    /// Fiber distance: dist² = 2 Σ (1 − cos ϑ_i).
    pub dist: f64,
    /// Fiber diversity product: pdist² = 2^k Π (1 − cos ϑ_i).
    pub pdist: f64,
    /// sdist[j-1] = Σ_{|I|=j} 2^j Π_{i∈I}(1 − cos ϑ_{k−i+1}), j = 1..k.
    pub sdist: Vec<f64>,
}

impl PairGeometry {
    pub fn k(&self) -> usize {
        self.sigma_coh.len()
    }

    /// sin²ϑ_i in the order matching `theta` (ascending angles).
    pub fn sin_sq(&self) -> Vec<f64> {
        self.theta.as_slice().iter().map(|t| t.sin().powi(2)).collect()
    }
}

fn check_same_shape(a: &StiefelFrame, b: &StiefelFrame) -> Result<()> {
    if a.t() != b.t() || a.k() != b.k() {
        return Err(Error::shape(format!(
            "frames of shape {}x{} and {}x{} are incomparable",
            a.t(),
            a.k(),
            b.t(),
            b.k()
        )));
    }
    Ok(())
}

/// Principal angles via ϑ_i = arccos(σ_i(Φ†Ψ)); any representative will do.
pub fn principal_angles(a: &GrassmannPoint, b: &GrassmannPoint) -> Result<PrincipalAngles> {
    check_same_shape(a.representative(), b.representative())?;
    let cross = a
        .representative()
        .matrix()
        .adjoint()
        .mul(b.representative().matrix());
    let sigma = linalg::svd(&cross)?.sigma;
    // SVD round-off can push cosines past 1 by ~1e-15; clamp before arccos.
    let theta: Vec<f64> = sigma.iter().map(|s| s.clamp(0.0, 1.0).acos()).collect();
    PrincipalAngles::new(theta)
}

/// Canonical representing k-frames for prescribed principal angles:
/// Ψ0 = [1; 0], Φ0 = [(cos ϑ); (sin ϑ); 0]. Needs T ≥ 2k.
pub fn canonical_pair(theta: &PrincipalAngles, t: usize) -> Result<(StiefelFrame, StiefelFrame)> {
    let k = theta.k();
    if t < 2 * k {
        return Err(Error::UnsupportedGeometry(format!(
            "canonical pair needs T >= 2k, got T={t} k={k}"
        )));
    }
    let mut psi = CMat::zeros(t, k);
    let mut phi = CMat::zeros(t, k);
    for (j, &ang) in theta.as_slice().iter().enumerate() {
        psi[(j, j)] = num_complex::Complex64::new(1.0, 0.0);
        phi[(j, j)] = num_complex::Complex64::new(ang.cos(), 0.0);
        phi[(k + j, j)] = num_complex::Complex64::new(ang.sin(), 0.0);
    }
    Ok((StiefelFrame::new(phi)?, StiefelFrame::new(psi)?))
}

/// Full pair geometry: σ̄ from Φ−Ψ, angles and σ̲ from Φ†Ψ, plus the fiber
/// minima sdist_j.
pub fn pair_geometry(a: &StiefelFrame, b: &StiefelFrame) -> Result<PairGeometry> {
    check_same_shape(a, b)?;
    let k = a.k();

    let delta = a.matrix().sub(b.matrix());
    let sigma_coh: Vec<f64> = linalg::svd(&delta)?
        .sigma
        .iter()
        .map(|s| s.clamp(0.0, 2.0))
        .collect();

    let cross = a.matrix().adjoint().mul(b.matrix());
    let sigma_noncoh: Vec<f64> = linalg::svd(&cross)?
        .sigma
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    let theta = PrincipalAngles::new(sigma_noncoh.iter().map(|s| s.acos()).collect())?;

    let d_coh = sigma_coh.iter().map(|s| s * s).sum::<f64>().sqrt();
    let d_noncoh = theta
        .as_slice()
        .iter()
        .map(|t| t.sin().powi(2))
        .sum::<f64>()
        .sqrt();

    // sdist_j = 2^j e_j(1−cos ϑ_1, …, 1−cos ϑ_k): the reflection I ↦ I* in
    // the lemma is a bijection on j-subsets, so the sum is symmetric.
    let one_minus_cos: Vec<f64> = theta.as_slice().iter().map(|t| 1.0 - t.cos()).collect();
    let esym = elem_sym_all(&one_minus_cos);
    let sdist: Vec<f64> = (1..=k).map(|j| 2f64.powi(j as i32) * esym[j]).collect();

    let dist = sdist[0].max(0.0).sqrt();
    let pdist = sdist[k - 1].max(0.0).sqrt();

    Ok(PairGeometry {
        sigma_coh,
        sigma_noncoh,
        theta,
        d_coh,
        d_noncoh,
        dist,
        pdist,
        sdist,
    })
}

/// Squared fiber minimum for one index set: sdist²_I = Π_{i∈I} 2(1 − cos ϑ_{k−i+1}).
/// `subset` holds 0-based positions into the descending σ̄ profile.
pub fn sdist_subset_sq(theta: &PrincipalAngles, subset: &[usize]) -> f64 {
    let k = theta.k();
    subset
        .iter()
        .map(|&i| 2.0 * (1.0 - theta.as_slice()[k - 1 - i].cos()))
        .product()
}

/// Squared coherent subset term: s̄²_I = Π_{i∈I} σ̄_i².
pub fn s_subset_sq(sigma: &[f64], subset: &[usize]) -> f64 {
    subset.iter().map(|&i| sigma[i] * sigma[i]).product()
}

/// Max deviation in the identity ½σ̄_i² = 1 − λ_{k−i+1}(H(Φ†Ψ)); a self-test
/// linking the SVD of the difference to the hermitian part of the product.
pub fn sigma_lambda_check(a: &StiefelFrame, b: &StiefelFrame) -> Result<f64> {
    check_same_shape(a, b)?;
    let k = a.k();
    let delta = a.matrix().sub(b.matrix());
    let sigma = linalg::svd(&delta)?.sigma;
    let cross = a.matrix().adjoint().mul(b.matrix());
    let lambda = linalg::hermitian_part_eigs(&cross)?; // descending
    let mut dev: f64 = 0.0;
    for i in 0..k {
        let lhs = 0.5 * sigma[i] * sigma[i];
        let rhs = 1.0 - lambda[k - 1 - i];
        dev = dev.max((lhs - rhs).abs());
    }
    Ok(dev)
}

/// Coding space selector for dimension formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifoldKind {
    Stiefel,
    Grassmann,
}

/// Real dimension: D̄ = k(2T−k) for the Stiefel manifold, D̲ = 2k(T−k) for
/// the Grassmann manifold.
pub fn manifold_dim(k: usize, t: usize, space: ManifoldKind) -> Result<usize> {
    if k < 1 || t < k {
        return Err(Error::invalid(format!("need T >= k >= 1, got T={t} k={k}")));
    }
    Ok(match space {
        ManifoldKind::Stiefel => k * (2 * t - k),
        ManifoldKind::Grassmann => 2 * k * (t - k),
    })
}

/// All elementary symmetric polynomials e_0..e_n of the inputs, by the
/// stable one-pass recurrence.
pub(crate) fn elem_sym_all(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (m, &x) in xs.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary_with, seeded_rng};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn unit_frame(t: usize, cols: &[usize]) -> StiefelFrame {
        let mut m = CMat::zeros(t, cols.len());
        for (j, &row) in cols.iter().enumerate() {
            m[(row, j)] = num_complex::Complex64::new(1.0, 0.0);
        }
        StiefelFrame::new(m).unwrap()
    }

    fn random_pair(t: usize, k: usize, seed: u64) -> (StiefelFrame, StiefelFrame) {
        let mut rng = seeded_rng(seed, b"pair");
        (
            StiefelFrame::random(t, k, &mut rng).unwrap(),
            StiefelFrame::random(t, k, &mut rng).unwrap(),
        )
    }

    #[test]
    fn frame_rejects_non_orthonormal() {
        let mut m = CMat::zeros(3, 2);
        m[(0, 0)] = num_complex::Complex64::new(1.0, 0.0);
        m[(0, 1)] = num_complex::Complex64::new(1.0, 0.0);
        assert!(StiefelFrame::new(m).is_err());
    }

    #[test]
    fn grassmann_rejects_wide_subspaces() {
        let f = unit_frame(3, &[0, 1]); // k=2 > T/2
        assert!(matches!(
            GrassmannPoint::new(f),
            Err(Error::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn principal_angles_identical_subspaces() {
        let a = GrassmannPoint::new(unit_frame(4, &[0, 1])).unwrap();
        let angles = principal_angles(&a, &a).unwrap();
        for &t in angles.as_slice() {
            assert!(t.abs() < 1e-12);
        }
        assert!(a.coincides_with(&a).unwrap());
    }

    #[test]
    fn principal_angles_orthogonal_subspaces() {
        let a = GrassmannPoint::new(unit_frame(4, &[0, 1])).unwrap();
        let b = GrassmannPoint::new(unit_frame(4, &[2, 3])).unwrap();
        let angles = principal_angles(&a, &b).unwrap();
        for &t in angles.as_slice() {
            assert!((t - FRAC_PI_2).abs() < 1e-12);
        }
        assert!(!a.coincides_with(&b).unwrap());
    }

    #[test]
    fn principal_angles_planted_values() {
        // Ψ = [e1,e2]; Φ columns cos a·e1 + sin a·e3 and cos b·e2 + sin b·e4.
        let (a, b) = (FRAC_PI_6, FRAC_PI_3);
        let mut phi = CMat::zeros(4, 2);
        phi[(0, 0)] = num_complex::Complex64::new(a.cos(), 0.0);
        phi[(2, 0)] = num_complex::Complex64::new(a.sin(), 0.0);
        phi[(1, 1)] = num_complex::Complex64::new(b.cos(), 0.0);
        phi[(3, 1)] = num_complex::Complex64::new(b.sin(), 0.0);
        let p = GrassmannPoint::new(StiefelFrame::new(phi).unwrap()).unwrap();
        let q = GrassmannPoint::new(unit_frame(4, &[0, 1])).unwrap();
        let angles = principal_angles(&p, &q).unwrap();
        assert!((angles.as_slice()[0] - a).abs() < 1e-12);
        assert!((angles.as_slice()[1] - b).abs() < 1e-12);
    }

    #[test]
    fn principal_angles_rejects_shape_mismatch() {
        let a = GrassmannPoint::new(unit_frame(4, &[0, 1])).unwrap();
        let b = GrassmannPoint::new(unit_frame(4, &[0])).unwrap();
        assert!(matches!(principal_angles(&a, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn canonical_pair_zero_angles() {
        let theta = PrincipalAngles::new(vec![0.0, 0.0]).unwrap();
        let (phi, psi) = canonical_pair(&theta, 4).unwrap();
        assert!(phi.matrix().max_abs_diff(psi.matrix()) < 1e-15);
        assert!(phi.matrix().max_abs_diff(unit_frame(4, &[0, 1]).matrix()) < 1e-15);
    }

    #[test]
    fn canonical_pair_right_angles() {
        let theta = PrincipalAngles::new(vec![FRAC_PI_2, FRAC_PI_2]).unwrap();
        let (phi, psi) = canonical_pair(&theta, 4).unwrap();
        assert!(psi.matrix().max_abs_diff(unit_frame(4, &[0, 1]).matrix()) < 1e-15);
        assert!(phi.matrix().max_abs_diff(unit_frame(4, &[2, 3]).matrix()) < 1e-12);
    }

    #[test]
    fn canonical_pair_round_trip() {
        let theta = PrincipalAngles::new(vec![FRAC_PI_6, FRAC_PI_3]).unwrap();
        let (phi, psi) = canonical_pair(&theta, 4).unwrap();
        let pa = GrassmannPoint::new(phi).unwrap();
        let pb = GrassmannPoint::new(psi).unwrap();
        let got = principal_angles(&pa, &pb).unwrap();
        assert!((got.as_slice()[0] - FRAC_PI_6).abs() < 1e-9);
        assert!((got.as_slice()[1] - FRAC_PI_3).abs() < 1e-9);
    }

    #[test]
    fn canonical_pair_needs_room() {
        let theta = PrincipalAngles::new(vec![0.1, 0.2]).unwrap();
        assert!(matches!(
            canonical_pair(&theta, 3),
            Err(Error::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn pair_geometry_identical() {
        let f = unit_frame(4, &[0, 1]);
        let g = pair_geometry(&f, &f).unwrap();
        assert!(g.d_coh < 1e-12);
        assert!(g.d_noncoh < 1e-7); // arccos near 1 loses half the digits
        assert!(g.dist < 1e-7);
        assert!(g.pdist < 1e-7);
    }

    #[test]
    fn pair_geometry_canonical_values() {
        let theta = PrincipalAngles::new(vec![FRAC_PI_6, FRAC_PI_3]).unwrap();
        let (phi, psi) = canonical_pair(&theta, 4).unwrap();
        let g = pair_geometry(&phi, &psi).unwrap();
        let dist_sq = 2.0 * ((1.0 - FRAC_PI_6.cos()) + 0.5);
        let pdist_sq = 4.0 * (1.0 - FRAC_PI_6.cos()) * 0.5;
        assert!((g.d_noncoh * g.d_noncoh - 1.0).abs() < 1e-12);
        assert!((g.dist * g.dist - dist_sq).abs() < 1e-12);
        assert!((g.pdist * g.pdist - pdist_sq).abs() < 1e-12);
        // On canonical frames the fiber minimum is attained: d̄ = dist.
        assert!((g.d_coh - g.dist).abs() < 1e-12);
        // σ̲_i = cos ϑ_i with both sorted by their own conventions.
        assert!((g.sigma_noncoh[0] - FRAC_PI_6.cos()).abs() < 1e-12);
        assert!((g.sigma_noncoh[1] - FRAC_PI_3.cos()).abs() < 1e-12);
    }

    #[test]
    fn fiber_rotations_never_beat_dist() {
        let theta = PrincipalAngles::new(vec![FRAC_PI_6, FRAC_PI_3]).unwrap();
        let (phi, psi) = canonical_pair(&theta, 4).unwrap();
        let base = pair_geometry(&phi, &psi).unwrap();
        let mut rng = seeded_rng(17, b"fiber");
        for _ in 0..100 {
            let u = haar_unitary_with(2, &mut rng);
            let rotated = phi.rotate(&u).unwrap();
            let g = pair_geometry(&rotated, &psi).unwrap();
            assert!(g.d_coh >= base.dist - 1e-12);
        }
    }

    #[test]
    fn fiber_minimum_lemma_subsetwise() {
        // sampled s̄²_I ≥ sdist²_I with equality at u = 1, for every subset.
        let theta = PrincipalAngles::new(vec![0.3, 0.7, 1.2]).unwrap();
        let (phi, psi) = canonical_pair(&theta, 6).unwrap();
        let subsets: Vec<Vec<usize>> = vec![
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
            vec![0, 1, 2],
        ];
        let base = pair_geometry(&phi, &psi).unwrap();
        for sub in &subsets {
            let closed = sdist_subset_sq(&theta, sub);
            let at_one = s_subset_sq(&base.sigma_coh, sub);
            assert!((at_one - closed).abs() < 1e-10, "equality at u=1 for {sub:?}");
        }
        let mut rng = seeded_rng(3, b"lemma");
        for _ in 0..200 {
            let u = haar_unitary_with(3, &mut rng);
            let g = pair_geometry(&phi.rotate(&u).unwrap(), &psi).unwrap();
            for sub in &subsets {
                let closed = sdist_subset_sq(&theta, sub);
                let sampled = s_subset_sq(&g.sigma_coh, sub);
                assert!(sampled >= closed - 1e-9, "subset {sub:?}");
            }
        }
    }

    #[test]
    fn sigma_lambda_identity() {
        let f = unit_frame(4, &[0, 1]);
        assert!(sigma_lambda_check(&f, &f).unwrap() < 1e-12);
        let theta = PrincipalAngles::new(vec![FRAC_PI_6, FRAC_PI_3]).unwrap();
        let (phi, psi) = canonical_pair(&theta, 4).unwrap();
        assert!(sigma_lambda_check(&phi, &psi).unwrap() <= 1e-10);
    }

    #[test]
    fn sigma_lambda_random_sweep() {
        for seed in 0..1000u64 {
            let (a, b) = random_pair(5, 2, seed);
            let dev = sigma_lambda_check(&a, &b).unwrap();
            assert!(dev <= tol::CROSS_CHECK, "seed {seed}: deviation {dev}");
        }
    }

    #[test]
    fn manifold_dim_formulas() {
        assert_eq!(manifold_dim(2, 4, ManifoldKind::Stiefel).unwrap(), 12);
        assert_eq!(manifold_dim(2, 4, ManifoldKind::Grassmann).unwrap(), 8);
        assert_eq!(manifold_dim(3, 3, ManifoldKind::Grassmann).unwrap(), 0);
        assert!(manifold_dim(3, 2, ManifoldKind::Stiefel).is_err());
    }

    #[test]
    fn left_invariance_of_pair_geometry() {
        let mut rng = seeded_rng(23, b"leftinv");
        for _ in 0..50 {
            let (a, b) = {
                let a = StiefelFrame::random(6, 2, &mut rng).unwrap();
                let b = StiefelFrame::random(6, 2, &mut rng).unwrap();
                (a, b)
            };
            let u = haar_unitary_with(6, &mut rng);
            let g0 = pair_geometry(&a, &b).unwrap();
            let g1 = pair_geometry(
                &a.left_multiply(&u).unwrap(),
                &b.left_multiply(&u).unwrap(),
            )
            .unwrap();
            assert!((g0.d_coh - g1.d_coh).abs() < tol::CROSS_CHECK);
            assert!((g0.d_noncoh - g1.d_noncoh).abs() < tol::CROSS_CHECK);
            assert!((g0.dist - g1.dist).abs() < tol::CROSS_CHECK);
            assert!((g0.pdist - g1.pdist).abs() < tol::CROSS_CHECK);
            for i in 0..2 {
                assert!((g0.sigma_coh[i] - g1.sigma_coh[i]).abs() < tol::CROSS_CHECK);
                assert!((g0.sigma_noncoh[i] - g1.sigma_noncoh[i]).abs() < tol::CROSS_CHECK);
            }
        }
    }

    #[test]
    fn right_invariance_of_noncoherent_quantities() {
        let mut rng = seeded_rng(29, b"rightinv");
        for _ in 0..50 {
            let a = StiefelFrame::random(6, 2, &mut rng).unwrap();
            let b = StiefelFrame::random(6, 2, &mut rng).unwrap();
            let u = haar_unitary_with(2, &mut rng);
            let v = haar_unitary_with(2, &mut rng);
            let g0 = pair_geometry(&a, &b).unwrap();
            let g1 = pair_geometry(&a.rotate(&u).unwrap(), &b.rotate(&v).unwrap()).unwrap();
            assert!((g0.d_noncoh - g1.d_noncoh).abs() < tol::CROSS_CHECK);
            for i in 0..2 {
                assert!((g0.sigma_noncoh[i] - g1.sigma_noncoh[i]).abs() < tol::CROSS_CHECK);
                assert!(
                    (g0.theta.as_slice()[i] - g1.theta.as_slice()[i]).abs() < 1e-7,
                    "angles drift"
                );
            }
        }
    }

    #[test]
    fn right_invariance_of_coherent_metric_common_rotation() {
        let mut rng = seeded_rng(31, b"commonv");
        for _ in 0..50 {
            let a = StiefelFrame::random(5, 2, &mut rng).unwrap();
            let b = StiefelFrame::random(5, 2, &mut rng).unwrap();
            let v = haar_unitary_with(2, &mut rng);
            let g0 = pair_geometry(&a, &b).unwrap();
            let g1 = pair_geometry(&a.rotate(&v).unwrap(), &b.rotate(&v).unwrap()).unwrap();
            assert!((g0.d_coh - g1.d_coh).abs() < tol::CROSS_CHECK);
        }
    }

    #[test]
    fn corollary_chain_on_random_pairs() {
        // s̲_j ≤ sdist_j ≤ s̄_j for all j.
        for seed in 0..1000u64 {
            let (a, b) = random_pair(6, 3, seed);
            let g = pair_geometry(&a, &b).unwrap();
            let s_upper = elem_sym_all(&g.sigma_coh.iter().map(|s| s * s).collect::<Vec<_>>());
            let s_lower = elem_sym_all(&g.sin_sq());
            for j in 1..=3 {
                assert!(
                    s_lower[j] <= g.sdist[j - 1] + 1e-9,
                    "seed {seed} j={j}: lower {} vs sdist {}",
                    s_lower[j],
                    g.sdist[j - 1]
                );
                assert!(
                    g.sdist[j - 1] <= s_upper[j] + 1e-9,
                    "seed {seed} j={j}: sdist {} vs upper {}",
                    g.sdist[j - 1],
                    s_upper[j]
                );
            }
            assert!(g.d_noncoh <= g.dist + 1e-12);
            assert!(g.dist <= g.d_coh + 1e-12);
        }
    }
}
