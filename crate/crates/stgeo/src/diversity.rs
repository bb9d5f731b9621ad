//! Diversity expansion, Chernov bound and exact pairwise error probabilities.
//!
//! For a symbol pair the diversity is Div = Π_i (1 + ϱ σ_i²) = Σ_j s_j ϱ^j,
//! with σ_i = σ̄_i and ϱ = ϱ̄ = ρT/4k on the coherent channel, and
//! σ_i = sin ϑ_i with ϱ = ϱ̲ = ϱ̄²/(ϱ̄ + ¼) on the non-coherent channel.
//! The Chernov bound on the pairwise error probability is ½ Div^{−n_r};
//! the exact probability is the sum of upper-half-plane residues of
//!
//!   F(ω) = −1/(ω + i/2) · Π_i [ c_i (ω² + α_i²) ]^{−n_r},
//!
//! where both channel cases share α_i = √(¼ + 1/c_i) and differ only in the
//! positive constants c_i. Simple well-separated poles with n_r = 1 are
//! summed in closed form; otherwise each pole cluster is integrated on a
//! small circle.

use num_complex::Complex64;

use crate::channel::{Channel, ChannelConfig};
use crate::error::{Error, Result};
use crate::manifold::{elem_sym_all, pair_geometry, GrassmannPoint, PairGeometry};
use crate::tol;

/// Elementary symmetric polynomial sym_j over all ascending j-subsets;
/// sym_0 = 1.
pub fn elementary_sym(values: &[f64], j: usize) -> Result<f64> {
    if j > values.len() {
        return Err(Error::invalid(format!(
            "sym_{j} undefined for {} values",
            values.len()
        )));
    }
    Ok(elem_sym_all(values)[j])
}

/// Effective SNR: ϱ̄ = ρT/(4k) coherent, ϱ̲ = ϱ̄²/(ϱ̄ + ¼) non-coherent.
pub fn effective_snr(rho: f64, t: usize, k: usize, channel: Channel) -> Result<f64> {
    if rho <= 0.0 || !rho.is_finite() || rho.is_nan() {
        return Err(Error::invalid(format!("rho must be positive, got {rho}")));
    }
    if k < 1 || t < k {
        return Err(Error::invalid(format!("need T >= k >= 1, got T={t} k={k}")));
    }
    let coherent = rho * t as f64 / (4.0 * k as f64);
    Ok(match channel {
        Channel::Coherent => coherent,
        Channel::Noncoherent => coherent * coherent / (coherent + 0.25),
    })
}

/// Diversity expansion of one pair in one channel.
#[derive(Clone, Debug)]
pub struct DiversityProfile {
    pub k: usize,
    /// coeffs[j] = s_j = sym_j(σ_1², …, σ_k²); coeffs[0] = 1.
    pub coeffs: Vec<f64>,
    /// Effective SNR ϱ the expansion is evaluated at.
    pub varrho: f64,
    /// Div = Σ_j s_j ϱ^j ≥ 1.
    pub div: f64,
    /// Diversity sum √s_1 (the receiver metric).
    pub dsum: f64,
    /// Diversity product √s_k (the rank/determinant criterion).
    pub dprod: f64,
    pub channel: Channel,
}

/// Expands the diversity polynomial of a pair at the config's effective SNR.
pub fn diversity_profile(
    g: &PairGeometry,
    cfg: &ChannelConfig,
    channel: Channel,
) -> DiversityProfile {
    let k = g.k();
    let sigma_sq: Vec<f64> = match channel {
        Channel::Coherent => g.sigma_coh.iter().map(|s| s * s).collect(),
        Channel::Noncoherent => g.sin_sq(),
    };
    let coeffs = elem_sym_all(&sigma_sq);
    let varrho =
        effective_snr(cfg.rho, cfg.t, cfg.k, channel).expect("config validated on construction");
    let mut div = 0.0;
    for j in (0..=k).rev() {
        div = div * varrho + coeffs[j];
    }
    DiversityProfile {
        k,
        dsum: coeffs[1].max(0.0).sqrt(),
        dprod: coeffs[k].max(0.0).sqrt(),
        coeffs,
        varrho,
        div,
        channel,
    }
}

/// Chernov bound ½ · Div^{−n_r} ∈ (0, ½].
pub fn chernov_bound(p: &DiversityProfile, n_r: usize) -> Result<f64> {
    if n_r < 1 {
        return Err(Error::invalid("need n_r >= 1"));
    }
    Ok(0.5 * p.div.powi(-(n_r as i32)))
}

/// Pole data of the PEP integrand: α_i = √(¼ + 1/c_i) for each active index.
#[derive(Clone, Debug)]
pub struct PepParams {
    /// Pole positions, each ≥ ½.
    pub alphas: Vec<f64>,
    /// Positive constants c_i in the integrand denominator.
    pub coeffs: Vec<f64>,
    /// Pole order multiplier (receive antennas).
    pub n_r: usize,
}

impl PepParams {
    /// Assembles the residue data for one pair. Indices with σ̄_i = 0
    /// (coherent) resp. σ̲_i = 1 (non-coherent) are excluded from the
    /// product; if every index is excluded the pair is degenerate.
    pub fn from_geometry(
        g: &PairGeometry,
        cfg: &ChannelConfig,
        channel: Channel,
    ) -> Result<PepParams> {
        if g.k() != cfg.k {
            return Err(Error::shape(format!(
                "pair has k={} but config has k={}",
                g.k(),
                cfg.k
            )));
        }
        let rtk = cfg.rho_t_over_k();
        let mut coeffs = Vec::new();
        match channel {
            Channel::Coherent => {
                for s in &g.sigma_coh {
                    let s_sq = s * s;
                    if s_sq > tol::PEP_ACTIVE {
                        coeffs.push(rtk * s_sq);
                    }
                }
            }
            Channel::Noncoherent => {
                for sin_sq in g.sin_sq() {
                    if sin_sq > tol::PEP_ACTIVE {
                        coeffs.push(rtk * rtk * sin_sq / (1.0 + rtk));
                    }
                }
            }
        }
        if coeffs.is_empty() {
            return Err(Error::DegeneratePair(format!(
                "symbols indistinguishable on the {channel} channel"
            )));
        }
        let alphas = coeffs.iter().map(|c| (0.25 + 1.0 / c).sqrt()).collect();
        Ok(PepParams {
            alphas,
            coeffs,
            n_r: cfg.n_r,
        })
    }
}

/// Exact pairwise error probability, clamped into [0, ½].
pub fn exact_pep(g: &PairGeometry, cfg: &ChannelConfig, channel: Channel) -> Result<f64> {
    let params = PepParams::from_geometry(g, cfg, channel)?;
    Ok(pep_from_params(&params))
}

/// Residue sum for assembled parameters.
pub fn pep_from_params(params: &PepParams) -> f64 {
    let p = if params.n_r == 1 && well_separated(&params.alphas) {
        pep_partial_fractions(params)
    } else {
        pep_contour(params)
    };
    p.clamp(0.0, 0.5)
}

fn well_separated(alphas: &[f64]) -> bool {
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.windows(2).all(|w| w[1] - w[0] > tol::POLE_CLUSTER)
}

/// Simple-pole partial fractions, valid for n_r = 1 and distinct poles:
/// P = (Π_i 1/c_i) Σ_j [ 2α_j(α_j+½) Π_{i≠j}(α_i² − α_j²) ]^{−1}.
fn pep_partial_fractions(params: &PepParams) -> f64 {
    let alphas = &params.alphas;
    let inv_c: f64 = params.coeffs.iter().map(|c| 1.0 / c).product();
    let mut acc = 0.0;
    for (j, &aj) in alphas.iter().enumerate() {
        let mut denom = 2.0 * aj * (aj + 0.5);
        for (i, &ai) in alphas.iter().enumerate() {
            if i != j {
                denom *= ai * ai - aj * aj;
            }
        }
        acc += 1.0 / denom;
    }
    inv_c * acc
}

/// Numerical residues: poles are clustered (gap < [`tol::POLE_CLUSTER`]) and
/// each cluster is integrated on a circle by the trapezoid rule, which is
/// spectrally accurate on closed contours. A circle around a cluster picks
/// up exactly the residues inside, so poles merged by round-off ties need no
/// special casing.
fn pep_contour(params: &PepParams) -> f64 {
    let mut order: Vec<usize> = (0..params.alphas.len()).collect();
    order.sort_by(|&a, &b| params.alphas[a].partial_cmp(&params.alphas[b]).unwrap());

    // cluster consecutive poles
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some(cluster)
                if params.alphas[idx] - params.alphas[*cluster.last().unwrap()]
                    < tol::POLE_CLUSTER =>
            {
                cluster.push(idx);
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let mut total = 0.0;
    for (ci, cluster) in clusters.iter().enumerate() {
        let lo = params.alphas[cluster[0]];
        let hi = params.alphas[*cluster.last().unwrap()];
        let center = 0.5 * (lo + hi);
        let extent = hi - lo;
        // keep at least CONTOUR_RADIUS_MIN from every enclosed pole and stay
        // well clear of the neighboring clusters and of ω = −i/2
        let mut radius = 0.5 * extent + tol::CONTOUR_RADIUS_MIN.max(0.5 * extent);
        radius = radius.max(tol::CONTOUR_RADIUS_MIN);
        let mut clearance: f64 = 0.25;
        if ci > 0 {
            let prev_hi = params.alphas[*clusters[ci - 1].last().unwrap()];
            clearance = clearance.min(0.5 * (lo - prev_hi) + 0.5 * extent);
        }
        if ci + 1 < clusters.len() {
            let next_lo = params.alphas[clusters[ci + 1][0]];
            clearance = clearance.min(0.5 * (next_lo - hi) + 0.5 * extent);
        }
        radius = radius.min(clearance.max(tol::CONTOUR_RADIUS_MIN));

        let pole = Complex64::new(0.0, center);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..tol::CONTOUR_POINTS {
            let phi = 2.0 * std::f64::consts::PI * m as f64 / tol::CONTOUR_POINTS as f64;
            let offset = Complex64::from_polar(radius, phi);
            let omega = pole + offset;
            acc += integrand(params, omega) * offset;
        }
        total += (acc / tol::CONTOUR_POINTS as f64).re;
    }
    total
}

/// F(ω) evaluated in the log domain so high-SNR products cannot overflow.
fn integrand(params: &PepParams, omega: Complex64) -> Complex64 {
    let mut log_sum = Complex64::new(0.0, 0.0);
    for (&c, &a) in params.coeffs.iter().zip(&params.alphas) {
        log_sum += Complex64::new(c.ln(), 0.0) + (omega * omega + a * a).ln();
    }
    let nr = params.n_r as f64;
    -(-(log_sum * nr)).exp() / (omega + Complex64::new(0.0, 0.5))
}

/// Corollary-1 chain and diversity monotony for one subspace pair.
#[derive(Clone, Debug)]
pub struct EmbeddingReport {
    pub k: usize,
    /// Non-coherent coefficients s̲_j, j = 1..k.
    pub s_lower: Vec<f64>,
    /// Fiber minima sdist_j.
    pub sdist: Vec<f64>,
    /// Coherent coefficients s̄_j at the stored representatives.
    pub s_upper: Vec<f64>,
    pub div_lower: f64,
    pub div_upper: f64,
    /// min_j (sdist_j − s̲_j); the chain holds iff ≥ 0 up to round-off.
    pub margin_lower: f64,
    /// min_j (s̄_j − sdist_j).
    pub margin_upper: f64,
    /// Div̄ − Div̲ ≥ 0 by diversity monotony.
    pub margin_div: f64,
    pub chain_holds: bool,
    pub div_holds: bool,
}

/// Verifies s̲_j ≤ sdist_j ≤ s̄_j for all j and Div̲ ≤ Div̄ on the stored
/// representatives, reporting the margins.
pub fn embedding_report(
    a: &GrassmannPoint,
    b: &GrassmannPoint,
    cfg: &ChannelConfig,
) -> Result<EmbeddingReport> {
    let g = pair_geometry(a.representative(), b.representative())?;
    let k = g.k();
    let lower = diversity_profile(&g, cfg, Channel::Noncoherent);
    let upper = diversity_profile(&g, cfg, Channel::Coherent);

    let s_lower = lower.coeffs[1..].to_vec();
    let s_upper = upper.coeffs[1..].to_vec();
    let sdist = g.sdist.clone();

    let mut margin_lower = f64::INFINITY;
    let mut margin_upper = f64::INFINITY;
    for j in 0..k {
        margin_lower = margin_lower.min(sdist[j] - s_lower[j]);
        margin_upper = margin_upper.min(s_upper[j] - sdist[j]);
    }
    let margin_div = upper.div - lower.div;
    Ok(EmbeddingReport {
        k,
        s_lower,
        sdist,
        s_upper,
        div_lower: lower.div,
        div_upper: upper.div,
        margin_lower,
        margin_upper,
        margin_div,
        chain_holds: margin_lower >= -tol::CROSS_CHECK && margin_upper >= -tol::CROSS_CHECK,
        div_holds: margin_div >= -tol::CROSS_CHECK,
    })
}
