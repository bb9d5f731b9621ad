//! Rayleigh flat-fading MIMO model: X = √ρ S H + W with S = √(T/k) Φ.
//!
//! H (k×n_r) and W (T×n_r) are i.i.d. CN(0,1). The coherent receiver knows
//! H and minimizes ‖X − √(ρT/k) Φ H‖_F; the non-coherent receiver maximizes
//! ‖Φ†X‖_F over the codebook. Monte Carlo estimators here use one ChaCha
//! stream per trial derived from (seed, trial), so results are identical
//! across thread counts.

use rayon::prelude::*;

use crate::codebook::{Codebook, Space};
use crate::diversity::{self, chernov_bound, diversity_profile};
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigenvalues, trial_rng, CMat};
use crate::manifold::{pair_geometry, StiefelFrame};

/// Receiver channel knowledge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Coherent,
    Noncoherent,
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Channel::Coherent => write!(f, "coherent"),
            Channel::Noncoherent => write!(f, "noncoherent"),
        }
    }
}

/// SNR, block shape and receiver knowledge driving PEP and simulation.
#[derive(Clone, Copy, Debug)]
pub struct ChannelConfig {
    pub rho: f64,
    pub t: usize,
    pub k: usize,
    pub n_r: usize,
    pub channel: Channel,
}

impl ChannelConfig {
    pub fn new(rho: f64, t: usize, k: usize, n_r: usize, channel: Channel) -> Result<Self> {
        if rho <= 0.0 || !rho.is_finite() || rho.is_nan() {
            return Err(Error::invalid(format!("rho must be positive, got {rho}")));
        }
        if k < 1 || t < k {
            return Err(Error::invalid(format!("need T >= k >= 1, got T={t} k={k}")));
        }
        if n_r < 1 {
            return Err(Error::invalid("need n_r >= 1"));
        }
        Ok(ChannelConfig {
            rho,
            t,
            k,
            n_r,
            channel,
        })
    }

    /// Out-of-regime configurations are permitted but flagged.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.k < self.n_r {
            w.push(format!(
                "k={} < n_r={}: outside the k >= n_r optimality regime",
                self.k, self.n_r
            ));
        }
        if self.channel == Channel::Noncoherent && self.t < 2 * self.k {
            w.push(format!(
                "noncoherent with T={} < 2k={}: outside the T >= 2k regime",
                self.t,
                2 * self.k
            ));
        }
        w
    }

    /// ρT/k, the per-symbol SNR scale entering PEP formulas.
    pub fn rho_t_over_k(&self) -> f64 {
        self.rho * self.t as f64 / self.k as f64
    }
}

/// Outcome of a Monte Carlo estimator.
#[derive(Clone, Copy, Debug)]
pub struct SimResult {
    pub trials: u64,
    pub errors: u64,
    /// Empirical error rate.
    pub rate: f64,
    /// Binomial standard error √(p̂(1−p̂)/trials).
    pub std_error: f64,
    pub seed: u64,
}

impl SimResult {
    fn from_counts(trials: u64, errors: u64, seed: u64) -> Self {
        let rate = errors as f64 / trials as f64;
        let std_error = (rate * (1.0 - rate) / trials as f64).sqrt();
        SimResult {
            trials,
            errors,
            rate,
            std_error,
            seed,
        }
    }
}

/// Block error estimate plus the analytic bounds it is compared against.
#[derive(Clone, Debug)]
pub struct BlerResult {
    pub sim: SimResult,
    /// confusion[i][j]: trials with symbol i transmitted and j decoded.
    pub confusion: Vec<Vec<u64>>,
    /// Union bound (1/|C|) Σ_i Σ_{j≠i} exact PEP.
    pub union_bound: f64,
    /// Same average with the Chernov bound per pair.
    pub chernov_sum: f64,
}

/// One channel use: X = √(ρT/k)·Φ·H + W. Returns (X, H); H enables
/// genie/coherent decoding.
pub fn transmit(
    symbol: &StiefelFrame,
    cfg: &ChannelConfig,
    rng: &mut impl rand::Rng,
) -> Result<(CMat, CMat)> {
    if symbol.t() != cfg.t || symbol.k() != cfg.k {
        return Err(Error::shape(format!(
            "symbol {}x{} does not match config T={} k={}",
            symbol.t(),
            symbol.k(),
            cfg.t,
            cfg.k
        )));
    }
    let h = linalg::complex_gaussian_matrix(cfg.k, cfg.n_r, rng);
    let w = linalg::complex_gaussian_matrix(cfg.t, cfg.n_r, rng);
    let amp = num_complex::Complex64::new(cfg.rho_t_over_k().sqrt(), 0.0);
    let x = symbol.matrix().mul(&h).scale(amp).add(&w);
    Ok((x, h))
}

/// Maximum-likelihood decision. Pass `h` exactly when the channel is
/// coherent. Ties resolve to the lowest index.
pub fn ml_decode(
    x: &CMat,
    h: Option<&CMat>,
    code: &Codebook,
    cfg: &ChannelConfig,
) -> Result<usize> {
    if code.t() != cfg.t || code.k() != cfg.k {
        return Err(Error::shape("codebook does not match config"));
    }
    if x.rows() != cfg.t || x.cols() != cfg.n_r {
        return Err(Error::shape("received block does not match config"));
    }
    match (cfg.channel, h) {
        (Channel::Coherent, Some(h)) => {
            if h.rows() != cfg.k || h.cols() != cfg.n_r {
                return Err(Error::shape("channel matrix does not match config"));
            }
            let amp = num_complex::Complex64::new(cfg.rho_t_over_k().sqrt(), 0.0);
            let mut best = 0usize;
            let mut best_metric = f64::INFINITY;
            for (i, sym) in code.symbols().iter().enumerate() {
                let predicted = sym.matrix().mul(h).scale(amp);
                let metric = x.sub(&predicted).frobenius_norm();
                if metric < best_metric {
                    best_metric = metric;
                    best = i;
                }
            }
            Ok(best)
        }
        (Channel::Noncoherent, None) => {
            let mut best = 0usize;
            let mut best_metric = f64::NEG_INFINITY;
            for (i, sym) in code.symbols().iter().enumerate() {
                let metric = sym.matrix().adjoint().mul(x).frobenius_norm();
                if metric > best_metric {
                    best_metric = metric;
                    best = i;
                }
            }
            Ok(best)
        }
        (Channel::Coherent, None) => Err(Error::invalid(
            "coherent decoding needs the channel matrix",
        )),
        (Channel::Noncoherent, Some(_)) => Err(Error::invalid(
            "non-coherent decoding must not receive a channel matrix",
        )),
    }
}

fn decode_trial(
    transmitted: &StiefelFrame,
    code: &Codebook,
    cfg: &ChannelConfig,
    rng: &mut impl rand::Rng,
) -> Result<usize> {
    let (x, h) = transmit(transmitted, cfg, rng)?;
    match cfg.channel {
        Channel::Coherent => ml_decode(&x, Some(&h), code, cfg),
        Channel::Noncoherent => ml_decode(&x, None, code, cfg),
    }
}

/// Two-codeword Monte Carlo: transmit `a`, decide between {a, b}, count
/// decisions for `b`. Deterministic per (seed, trial).
pub fn estimate_pep(
    a: &StiefelFrame,
    b: &StiefelFrame,
    cfg: &ChannelConfig,
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    // The space tag only drives duplicate validation, which is skipped here;
    // the decoder reads the channel from cfg, so a Stiefel tag works for
    // both cases (and keeps T < 2k noncoherent experiments possible).
    let code = Codebook::new_unchecked_distance(
        Space::Stiefel,
        vec![a.clone(), b.clone()],
        "pep-pair".into(),
    )?;
    let errors: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, b"pep", trial);
            let decoded = decode_trial(a, &code, cfg, &mut rng).expect("validated dims");
            u64::from(decoded != 0)
        })
        .sum();
    Ok(SimResult::from_counts(trials, errors, seed))
}

/// Block error rate on a codebook with uniform random transmission, plus the
/// union bound and Chernov-sum computed from the exact pairwise formulas.
pub fn estimate_bler(
    code: &Codebook,
    cfg: &ChannelConfig,
    trials: u64,
    seed: u64,
) -> Result<BlerResult> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if code.t() != cfg.t || code.k() != cfg.k {
        return Err(Error::shape("codebook does not match config"));
    }
    let n = code.len();
    let outcomes: Vec<(usize, usize)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, b"bler", trial);
            let tx = (rng.gen::<u64>() % n as u64) as usize;
            let decoded =
                decode_trial(&code.symbols()[tx], code, cfg, &mut rng).expect("validated dims");
            (tx, decoded)
        })
        .collect();

    let mut confusion = vec![vec![0u64; n]; n];
    let mut errors = 0u64;
    for (tx, rx) in outcomes {
        confusion[tx][rx] += 1;
        if tx != rx {
            errors += 1;
        }
    }

    let (union_bound, chernov_sum) = pairwise_bounds(code, cfg)?;
    Ok(BlerResult {
        sim: SimResult::from_counts(trials, errors, seed),
        confusion,
        union_bound,
        chernov_sum,
    })
}

/// (1/|C|) Σ_i Σ_{j≠i} P_ij for both the exact PEP and the Chernov bound.
/// |C| = 1 gives zero: a single symbol can never be confused.
pub fn pairwise_bounds(code: &Codebook, cfg: &ChannelConfig) -> Result<(f64, f64)> {
    let n = code.len();
    if n < 2 {
        return Ok((0.0, 0.0));
    }
    let mut union = 0.0;
    let mut chern = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let g = pair_geometry(&code.symbols()[i], &code.symbols()[j])?;
            let pep = diversity::exact_pep(&g, cfg, cfg.channel)?;
            let profile = diversity_profile(&g, cfg, cfg.channel);
            let cb = chernov_bound(&profile, cfg.n_r)?;
            // P_ij = P_ji: each unordered pair enters the double sum twice.
            union += 2.0 * pep;
            chern += 2.0 * cb;
        }
    }
    Ok((union / n as f64, chern / n as f64))
}

/// Monte Carlo estimate of the coherent ergodic capacity
/// C0 = E log2 det(1 + (ρ/k) H†H) in bits per channel use.
/// Returns (estimate, standard error).
pub fn ergodic_capacity_coherent(cfg: &ChannelConfig, trials: u64, seed: u64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    // Per-trial values are collected and summed in index order so the result
    // does not depend on the parallel schedule.
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, b"capacity", trial);
            let h = linalg::complex_gaussian_matrix(cfg.k, cfg.n_r, &mut rng);
            let gram = h.adjoint().mul(&h); // n_r × n_r
            let scale = cfg.rho / cfg.k as f64;
            hermitian_eigenvalues(&gram)
                .iter()
                .map(|lam| (1.0 + scale * lam.max(0.0)).log2())
                .sum()
        })
        .collect();
    let n = trials as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok((mean, (var / n).sqrt()))
}

use rand::Rng;
