//! Constrained extrema of the angle functionals and their grid oracle.
//!
//! The diversity sums and products restricted to a pair are functions of the
//! principal angles only, of the shape Σ h(ϑ_i) or Π h(ϑ_i) with h = sin²
//! (chordal quantities d̲², p̲²) or h = 2(1 − cos) (fiber quantities dist²,
//! pdist²), on the simplex 0 ≤ ϑ_1 ≤ … ≤ ϑ_k ≤ π/2. Constraining one such
//! functional to a sphere yields closed-form extrema, all attained at
//! configurations of equal, zero or right angles. A brute-force grid search
//! over the simplex validates every closed form numerically.

use rayon::prelude::*;

use crate::error::{Error, Result};

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// Functionals of a principal-angle tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleFn {
    /// d̲² = Σ sin²ϑ_i ∈ [0, k].
    NoncohSumSq,
    /// p̲² = Π sin²ϑ_i ∈ [0, 1].
    NoncohProdSq,
    /// dist² = 2 Σ (1 − cos ϑ_i) ∈ [0, 2k].
    DistSq,
    /// pdist² = 2^k Π (1 − cos ϑ_i) ∈ [0, 2^k].
    PdistSq,
}

impl AngleFn {
    pub fn value(self, theta: &[f64]) -> f64 {
        match self {
            AngleFn::NoncohSumSq => theta.iter().map(|t| t.sin().powi(2)).sum(),
            AngleFn::NoncohProdSq => theta.iter().map(|t| t.sin().powi(2)).product(),
            AngleFn::DistSq => 2.0 * theta.iter().map(|t| 1.0 - t.cos()).sum::<f64>(),
            AngleFn::PdistSq => theta.iter().map(|t| 2.0 * (1.0 - t.cos())).product(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AngleFn::NoncohSumSq => "dsum_nc_sq",
            AngleFn::NoncohProdSq => "dprod_nc_sq",
            AngleFn::DistSq => "dist_sq",
            AngleFn::PdistSq => "pdist_sq",
        }
    }
}

/// Constraint spheres supported by the closed forms and the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// S_{d̲²}(δ), 0 < δ ≤ k.
    NoncohSum,
    /// S_{p̲²}(δ), 0 < δ ≤ 1.
    NoncohProd,
    /// S_{dist²}(δ), 0 < δ ≤ 2k.
    DistSum,
}

impl ConstraintKind {
    pub fn angle_fn(self) -> AngleFn {
        match self {
            ConstraintKind::NoncohSum => AngleFn::NoncohSumSq,
            ConstraintKind::NoncohProd => AngleFn::NoncohProdSq,
            ConstraintKind::DistSum => AngleFn::DistSq,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintKind::NoncohSum => "noncoh-sum",
            ConstraintKind::NoncohProd => "noncoh-prod",
            ConstraintKind::DistSum => "dist-sum",
        }
    }
}

/// Validated constraint level δ on one of the spheres.
#[derive(Clone, Copy, Debug)]
pub struct ConstraintLevel {
    pub kind: ConstraintKind,
    pub delta: f64,
    pub k: usize,
}

impl ConstraintLevel {
    pub fn new(kind: ConstraintKind, delta: f64, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("need k >= 1"));
        }
        let max = match kind {
            ConstraintKind::NoncohSum => k as f64,
            ConstraintKind::NoncohProd => 1.0,
            ConstraintKind::DistSum => 2.0 * k as f64,
        };
        if !(delta > 0.0 && delta <= max) || !delta.is_finite() {
            return Err(Error::invalid(format!(
                "{} constraint needs 0 < delta <= {max}, got {delta}",
                kind.as_str()
            )));
        }
        Ok(ConstraintLevel { kind, delta, k })
    }
}

/// One extremum: value plus the attaining angle configuration.
#[derive(Clone, Debug)]
pub struct Extremum {
    pub value: f64,
    pub theta: Vec<f64>,
}

/// Min and max of a constrained functional.
#[derive(Clone, Debug)]
pub struct MinMax {
    pub min: Extremum,
    pub max: Extremum,
}

fn equal_angles(k: usize, sin_sq: f64) -> Vec<f64> {
    vec![sin_sq.clamp(0.0, 1.0).sqrt().asin(); k]
}

/// max p̲² on S_{d̲²}(δ): (δ/k)^k at k equal angles with sin²ϑ = δ/k.
pub fn max_prod_on_sum(k: usize, delta: f64) -> Result<Extremum> {
    ConstraintLevel::new(ConstraintKind::NoncohSum, delta, k)?;
    let ratio = delta / k as f64;
    Ok(Extremum {
        value: ratio.powi(k as i32),
        theta: equal_angles(k, ratio),
    })
}

/// min/max dist² on S_{d̲²}(δ): the minimum 2k(1 − √(1 − δ/k)) sits at equal
/// angles; the maximum 2(1 − √(1 − (δ − ⌊δ⌋))) + 2⌊δ⌋ at ⌊k−δ⌋ zero angles,
/// one fractional angle and right angles elsewhere.
pub fn minmax_dist_on_sum(k: usize, delta: f64) -> Result<MinMax> {
    ConstraintLevel::new(ConstraintKind::NoncohSum, delta, k)?;
    let kf = k as f64;
    let min_value = 2.0 * kf * (1.0 - (1.0 - delta / kf).max(0.0).sqrt());
    let min_theta = equal_angles(k, delta / kf);

    let whole = delta.floor();
    let frac = delta - whole;
    let max_value = 2.0 * (1.0 - (1.0 - frac).sqrt()) + 2.0 * whole;
    let zeros = (kf - delta).floor() as usize;
    let mut max_theta = vec![0.0; zeros];
    if frac > 0.0 {
        max_theta.push(frac.sqrt().asin());
    }
    while max_theta.len() < k {
        max_theta.push(HALF_PI);
    }
    Ok(MinMax {
        min: Extremum {
            value: min_value,
            theta: min_theta,
        },
        max: Extremum {
            value: max_value,
            theta: max_theta,
        },
    })
}

/// max pdist² on S_{d̲²}(δ): the Lagrange candidates are the faces with l
/// equal free angles (l sin²ϑ = δ − (k−l)) and k−l right angles, giving
/// f^(l) = 2^k (1 − √((k−δ)/l))^l. The maximum is max over feasible l.
///
/// f^(l) is NOT monotone in l: for δ ≤ k−1+… the diagonal l = k wins
/// (the familiar 2^k(1−√(1−δ/k))^k), but as δ approaches k the single
/// fractional angle l = 1 takes over — e.g. k=2, δ=1.8 has
/// f^(1) = 4(1−√0.2) ≈ 2.211 > f^(2) ≈ 1.870, attained at
/// (asin √0.8, π/2). The grid oracle confirms the face maximum on a dense
/// δ sweep; the equal-angle branch alone is beaten there.
pub fn max_pdist_on_sum(k: usize, delta: f64) -> Result<Extremum> {
    ConstraintLevel::new(ConstraintKind::NoncohSum, delta, k)?;
    let kf = k as f64;
    let l_min = ((kf - delta).ceil() as usize).max(1);
    let mut best: Option<Extremum> = None;
    for l in l_min..=k {
        let lf = l as f64;
        let sin_sq = ((delta - (kf - lf)) / lf).clamp(0.0, 1.0);
        let base = 1.0 - (1.0 - sin_sq).max(0.0).sqrt();
        let value = 2f64.powi(k as i32) * base.powi(l as i32);
        if best.as_ref().is_none_or(|b| value > b.value) {
            let mut theta = vec![sin_sq.sqrt().asin(); l];
            theta.resize(k, HALF_PI);
            best = Some(Extremum { value, theta });
        }
    }
    Ok(best.expect("l = k is always feasible"))
}

/// Equal-angle face value 2^k (1 − √(1 − δ/k))^k of the pdist² maximization;
/// the global maximum coincides with it for small δ and dominates it in
/// general. Kept separate because the remark identity
/// (δ̃/k)^k at δ̃ = 2k(1−√(1−δ/k)) reproduces exactly this branch.
pub fn max_pdist_on_sum_diagonal(k: usize, delta: f64) -> Result<f64> {
    ConstraintLevel::new(ConstraintKind::NoncohSum, delta, k)?;
    let ratio = delta / k as f64;
    let base = 1.0 - (1.0 - ratio).max(0.0).sqrt();
    Ok((2.0 * base).powi(k as i32))
}

/// min/max pdist² on S_{p̲²}(δ): the minimum 2^k (1 − √(1 − δ^{1/k}))^k at
/// equal angles with sin²ϑ = δ^{1/k}; the maximum 2^k (1 − √(1 − δ)) at
/// sin²ϑ_1 = δ and right angles elsewhere.
pub fn minmax_pdist_on_prod(k: usize, delta: f64) -> Result<MinMax> {
    ConstraintLevel::new(ConstraintKind::NoncohProd, delta, k)?;
    let root = delta.powf(1.0 / k as f64);
    let min_value = (2.0 * (1.0 - (1.0 - root).max(0.0).sqrt())).powi(k as i32);
    let min_theta = equal_angles(k, root);

    let max_value = 2f64.powi(k as i32) * (1.0 - (1.0 - delta).max(0.0).sqrt());
    let mut max_theta = vec![delta.sqrt().asin()];
    while max_theta.len() < k {
        max_theta.push(HALF_PI);
    }
    Ok(MinMax {
        min: Extremum {
            value: min_value,
            theta: min_theta,
        },
        max: Extremum {
            value: max_value,
            theta: max_theta,
        },
    })
}

/// Explicit embedding bounds: from the codebook minima d̲²min and p̲²min the
/// fiber quantities obey
/// dist²min ≥ 2k(1 − √(1 − d̲²min/k)) ≥ d̲²min and
/// pdist²min ≥ 2^k (1 − √(1 − p̲²min^{1/k}))^k ≥ p̲²min.
/// Returns (dist bound, pdist bound).
pub fn embedding_lower_bounds(k: usize, dsum2_min: f64, dprod2_min: f64) -> Result<(f64, f64)> {
    let dist_bound = minmax_dist_on_sum(k, dsum2_min)?.min.value;
    let pdist_bound = minmax_pdist_on_prod(k, dprod2_min)?.min.value;
    debug_assert!(dist_bound >= dsum2_min - 1e-12);
    debug_assert!(pdist_bound >= dprod2_min - 1e-12);
    Ok((dist_bound, pdist_bound))
}

/// Outcome of one oracle run.
#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub min: f64,
    pub max: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
    /// Grid tuples that passed the constraint band.
    pub feasible: usize,
}

/// Brute-force stand-in for the Lagrangian face recursion: enumerates sorted
/// angle tuples on a uniform grid, keeps those with |constraint − δ| ≤
/// 10·step, slides each survivor onto the constraint surface exactly (a
/// uniform clamped shift, monotone in the shift, solved by bisection) and
/// reports the objective extrema. `Ok(None)` signals an empty feasible set.
///
/// The on-surface correction is what makes the oracle tight: every reported
/// value is attained by a true constraint point, so closed-form bounds can
/// never be exceeded by more than round-off, and since all §4 optima lie on
/// diagonal or corner configurations that the shifted grid hits exactly,
/// the extrema converge to the closed forms as the step shrinks.
pub fn simplex_grid_oracle(
    k: usize,
    objective: AngleFn,
    constraint: ConstraintKind,
    delta: f64,
    step: f64,
) -> Result<Option<OracleOutcome>> {
    if !(1..=4).contains(&k) {
        return Err(Error::invalid("oracle supports 1 <= k <= 4"));
    }
    if !(step > 0.0 && step <= std::f64::consts::PI / 50.0) {
        return Err(Error::invalid("oracle needs 0 < step <= pi/50"));
    }
    ConstraintLevel::new(constraint, delta, k)?;

    let mut grid: Vec<f64> = Vec::new();
    let mut x = 0.0;
    while x < HALF_PI - 1e-12 {
        grid.push(x);
        x += step;
    }
    grid.push(HALF_PI);
    let n = grid.len();
    let band = 10.0 * step;
    let cfn = constraint.angle_fn();

    // partition the search by the leading angle; merge in index order
    let partials: Vec<Option<OracleOutcome>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut theta = vec![0.0; k];
            let mut idx = vec![first; k];
            let mut best: Option<OracleOutcome> = None;
            loop {
                for (slot, &g) in idx.iter().enumerate() {
                    theta[slot] = grid[g];
                }
                let c = cfn.value(&theta);
                if (c - delta).abs() <= band {
                    if let Some(on_surface) = project_by_shift(&theta, cfn, delta) {
                        let value = objective.value(&on_surface);
                        match best.as_mut() {
                            None => {
                                best = Some(OracleOutcome {
                                    min: value,
                                    max: value,
                                    argmin: on_surface.clone(),
                                    argmax: on_surface,
                                    feasible: 1,
                                });
                            }
                            Some(b) => {
                                b.feasible += 1;
                                if value < b.min {
                                    b.min = value;
                                    b.argmin = on_surface.clone();
                                }
                                if value > b.max {
                                    b.max = value;
                                    b.argmax = on_surface;
                                }
                            }
                        }
                    }
                }
                // next ascending tuple with fixed leading index
                let mut slot = k - 1;
                let advanced = loop {
                    if slot == 0 {
                        break false;
                    }
                    if idx[slot] + 1 < n {
                        let v = idx[slot] + 1;
                        for s in slot..k {
                            idx[s] = v;
                        }
                        break true;
                    }
                    slot -= 1;
                };
                if !advanced {
                    break;
                }
            }
            best
        })
        .collect();

    let mut merged: Option<OracleOutcome> = None;
    for part in partials.into_iter().flatten() {
        match merged.as_mut() {
            None => merged = Some(part),
            Some(m) => {
                m.feasible += part.feasible;
                if part.min < m.min {
                    m.min = part.min;
                    m.argmin = part.argmin;
                }
                if part.max > m.max {
                    m.max = part.max;
                    m.argmax = part.argmax;
                }
            }
        }
    }
    Ok(merged)
}

/// Slides the tuple by a uniform clamped shift until the constraint holds
/// exactly. The shifted family c(t) is nondecreasing, covers [0, c_max], and
/// preserves ordering, so plain bisection suffices.
fn project_by_shift(theta: &[f64], cfn: AngleFn, delta: f64) -> Option<Vec<f64>> {
    let shifted = |t: f64| -> Vec<f64> {
        theta
            .iter()
            .map(|&a| (a + t).clamp(0.0, HALF_PI))
            .collect()
    };
    let mut lo = -HALF_PI;
    let mut hi = HALF_PI;
    if cfn.value(&shifted(lo)) > delta || cfn.value(&shifted(hi)) < delta {
        return None;
    }
    for _ in 0..70 {
        let mid = 0.5 * (lo + hi);
        if cfn.value(&shifted(mid)) < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(shifted(0.5 * (lo + hi)))
}
