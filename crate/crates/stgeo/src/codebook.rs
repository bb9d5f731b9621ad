//! Codebooks: finite symbol sets with rate, pairwise minimum statistics,
//! composition C^V = C^G · C^U and JSON persistence.
//!
//! The JSON layout is
//! `{"space":"grassmann","T":4,"k":2,"symbols":[[[[re,im], … k], … T], … N]}`
//! with an optional `"label"`; decimal floats, UTF-8.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ChannelConfig};
use crate::diversity::{diversity_profile, effective_snr};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::manifold::{pair_geometry, StiefelFrame};
use crate::tol;

/// Coding space a codebook lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Stiefel,
    Grassmann,
    Unitary,
}

impl Space {
    pub fn as_str(&self) -> &'static str {
        match self {
            Space::Stiefel => "stiefel",
            Space::Grassmann => "grassmann",
            Space::Unitary => "unitary",
        }
    }

    pub fn parse(s: &str) -> Result<Space> {
        match s {
            "stiefel" => Ok(Space::Stiefel),
            "grassmann" => Ok(Space::Grassmann),
            "unitary" => Ok(Space::Unitary),
            other => Err(Error::Validation {
                symbol: None,
                message: format!("unknown space '{other}' (expected stiefel|grassmann|unitary)"),
            }),
        }
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Finite set of k-frames sharing (T, k), tagged with its coding space.
#[derive(Clone, Debug)]
pub struct Codebook {
    space: Space,
    t: usize,
    k: usize,
    symbols: Vec<StiefelFrame>,
    label: String,
}

impl Codebook {
    /// Validates shapes, the space constraint and symbol distinctness
    /// (min pairwise distance in the space's own metric > 1e-8).
    pub fn new(space: Space, symbols: Vec<StiefelFrame>, label: String) -> Result<Self> {
        let book = Self::new_unchecked_distance(space, symbols, label)?;
        if let Some((i, j, d)) = book.closest_pair_in_space_metric() {
            if d <= tol::DUPLICATE_SYMBOL {
                return Err(Error::DegenerateCode(format!(
                    "symbols {i} and {j} coincide in the {} metric (distance {d:.3e})",
                    book.space
                )));
            }
        }
        Ok(book)
    }

    /// Same validation minus the distinctness check; used where coincident
    /// symbols are legitimate (tie-break experiments, two-codeword Monte
    /// Carlo on a degenerate pair).
    pub fn new_unchecked_distance(
        space: Space,
        symbols: Vec<StiefelFrame>,
        label: String,
    ) -> Result<Self> {
        let first = symbols
            .first()
            .ok_or_else(|| Error::invalid("codebook needs at least one symbol"))?;
        let (t, k) = (first.t(), first.k());
        for (idx, s) in symbols.iter().enumerate() {
            if s.t() != t || s.k() != k {
                return Err(Error::Shape(format!(
                    "symbol {idx} is {}x{}, expected {t}x{k}",
                    s.t(),
                    s.k()
                )));
            }
        }
        match space {
            Space::Unitary if t != k => {
                return Err(Error::Shape(format!(
                    "unitary codebooks need T = k, got T={t} k={k}"
                )));
            }
            Space::Grassmann if t < 2 * k => {
                return Err(Error::UnsupportedGeometry(format!(
                    "Grassmann codebooks need T >= 2k, got T={t} k={k}"
                )));
            }
            _ => {}
        }
        Ok(Codebook {
            space,
            t,
            k,
            symbols,
            label,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[StiefelFrame] {
        &self.symbols
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Rate R = (1/T) log2 |C| in bits per channel use.
    pub fn rate(&self) -> f64 {
        (self.symbols.len() as f64).log2() / self.t as f64
    }

    /// Distance in the space's own metric: chordal d̲ for Grassmann,
    /// Frobenius d̄ otherwise. The chordal form ‖B − A(A†B)‖_F equals
    /// √Σ sin²ϑ_i and stays accurate for nearly coincident spans, where the
    /// k − ‖A†B‖² form loses half the digits.
    pub fn space_metric_distance(&self, i: usize, j: usize) -> f64 {
        let a = self.symbols[i].matrix();
        let b = self.symbols[j].matrix();
        match self.space {
            Space::Grassmann => {
                let projected = a.mul(&a.adjoint().mul(b));
                b.sub(&projected).frobenius_norm()
            }
            Space::Stiefel | Space::Unitary => a.sub(b).frobenius_norm(),
        }
    }

    fn closest_pair_in_space_metric(&self) -> Option<(usize, usize, f64)> {
        let n = self.symbols.len();
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.space_metric_distance(i, j);
                if best.map_or(true, |(_, _, bd)| d < bd) {
                    best = Some((i, j, d));
                }
            }
        }
        best
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Codebook> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Codebook::from_json_str(&text)
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Codebook> {
        let file: CodebookFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.into_codebook()
    }

    pub fn to_json_string(&self) -> String {
        let file = CodebookFile::from_codebook(self);
        let mut text = serde_json::to_string_pretty(&file).expect("serialization cannot fail");
        text.push('\n');
        text
    }
}

#[derive(Serialize, Deserialize)]
struct CodebookFile {
    space: String,
    #[serde(rename = "T")]
    t: usize,
    k: usize,
    symbols: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    label: String,
}

impl CodebookFile {
    fn from_codebook(book: &Codebook) -> Self {
        let symbols = book
            .symbols
            .iter()
            .map(|frame| {
                (0..book.t)
                    .map(|i| {
                        (0..book.k)
                            .map(|j| {
                                let z = frame.matrix()[(i, j)];
                                [z.re, z.im]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        CodebookFile {
            space: book.space.as_str().to_string(),
            t: book.t,
            k: book.k,
            symbols,
            label: book.label.clone(),
        }
    }

    fn into_codebook(self) -> Result<Codebook> {
        let space = Space::parse(&self.space)?;
        if self.symbols.is_empty() {
            return Err(Error::Validation {
                symbol: None,
                message: "codebook file holds no symbols".into(),
            });
        }
        let mut frames = Vec::with_capacity(self.symbols.len());
        for (idx, rows) in self.symbols.iter().enumerate() {
            if rows.len() != self.t {
                return Err(Error::Validation {
                    symbol: Some(idx),
                    message: format!("has {} rows, header says T={}", rows.len(), self.t),
                });
            }
            let mut data = Vec::with_capacity(self.t * self.k);
            for row in rows {
                if row.len() != self.k {
                    return Err(Error::Validation {
                        symbol: Some(idx),
                        message: format!("has a row of width {}, header says k={}", row.len(), self.k),
                    });
                }
                for &[re, im] in row {
                    data.push(num_complex::Complex64::new(re, im));
                }
            }
            let matrix = CMat::new(self.t, self.k, data).map_err(|e| Error::Validation {
                symbol: Some(idx),
                message: e.to_string(),
            })?;
            let frame = StiefelFrame::new(matrix).map_err(|e| Error::Validation {
                symbol: Some(idx),
                message: e.to_string(),
            })?;
            frames.push(frame);
        }
        Codebook::new(space, frames, self.label)
    }
}

/// Minima of every pairwise quantity over the codebook, with the pair that
/// attains each one.
#[derive(Clone, Debug)]
pub struct CodeStats {
    pub channel: Channel,
    /// min over pairs of s_j (channel-dependent), j = 1..k.
    pub min_s: Vec<f64>,
    pub argmin_s: Vec<(usize, usize)>,
    /// min over pairs of sdist_j, j = 1..k (channel-independent).
    pub min_sdist: Vec<f64>,
    pub argmin_sdist: Vec<(usize, usize)>,
    /// min diversity sum (the channel's receiver metric).
    pub min_dsum: f64,
    pub argmin_dsum: (usize, usize),
    /// min diversity product.
    pub min_dprod: f64,
    pub argmin_dprod: (usize, usize),
    /// min pairwise diversity at the config's effective SNR.
    pub min_div: f64,
    pub argmin_div: (usize, usize),
}

struct PairRecord {
    i: usize,
    j: usize,
    s: Vec<f64>,
    sdist: Vec<f64>,
    dsum: f64,
    dprod: f64,
    div: f64,
}

/// Exhaustive O(|C|²) pairwise evaluation; refuses |C| > 4096.
pub fn code_stats(code: &Codebook, cfg: &ChannelConfig, channel: Channel) -> Result<CodeStats> {
    let n = code.len();
    if n < 2 {
        return Err(Error::invalid(
            "pairwise statistics need at least two symbols",
        ));
    }
    if n > tol::CODEBOOK_PAIRWISE_CAP {
        return Err(Error::invalid(format!(
            "codebook of size {n} exceeds the exhaustive pairwise cap {}",
            tol::CODEBOOK_PAIRWISE_CAP
        )));
    }
    if code.t() != cfg.t || code.k() != cfg.k {
        return Err(Error::shape("codebook does not match config"));
    }
    let k = code.k();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();

    // collected in pair order, so reductions below are deterministic
    let records: Vec<PairRecord> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<PairRecord> {
            let d = code.space_metric_distance(i, j);
            if d <= tol::DUPLICATE_SYMBOL {
                return Err(Error::DegenerateCode(format!(
                    "symbols {i} and {j} coincide in the {} metric",
                    code.space()
                )));
            }
            let g = pair_geometry(&code.symbols()[i], &code.symbols()[j])?;
            let profile = diversity_profile(&g, cfg, channel);
            let dsum = match channel {
                Channel::Coherent => g.d_coh,
                Channel::Noncoherent => g.d_noncoh,
            };
            Ok(PairRecord {
                i,
                j,
                s: profile.coeffs[1..].to_vec(),
                sdist: g.sdist.clone(),
                dsum,
                dprod: profile.dprod,
                div: profile.div,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut stats = CodeStats {
        channel,
        min_s: vec![f64::INFINITY; k],
        argmin_s: vec![(0, 0); k],
        min_sdist: vec![f64::INFINITY; k],
        argmin_sdist: vec![(0, 0); k],
        min_dsum: f64::INFINITY,
        argmin_dsum: (0, 0),
        min_dprod: f64::INFINITY,
        argmin_dprod: (0, 0),
        min_div: f64::INFINITY,
        argmin_div: (0, 0),
    };
    for r in &records {
        for j in 0..k {
            if r.s[j] < stats.min_s[j] {
                stats.min_s[j] = r.s[j];
                stats.argmin_s[j] = (r.i, r.j);
            }
            if r.sdist[j] < stats.min_sdist[j] {
                stats.min_sdist[j] = r.sdist[j];
                stats.argmin_sdist[j] = (r.i, r.j);
            }
        }
        if r.dsum < stats.min_dsum {
            stats.min_dsum = r.dsum;
            stats.argmin_dsum = (r.i, r.j);
        }
        if r.dprod < stats.min_dprod {
            stats.min_dprod = r.dprod;
            stats.argmin_dprod = (r.i, r.j);
        }
        if r.div < stats.min_div {
            stats.min_div = r.div;
            stats.argmin_div = (r.i, r.j);
        }
    }
    Ok(stats)
}

/// Composed code C^V = {Φu | Φ ∈ C^G, u ∈ C^U} on the Stiefel manifold.
/// The stored representative of each Grassmann symbol is used verbatim.
pub fn compose(cg: &Codebook, cu: &Codebook) -> Result<Codebook> {
    if cg.space() != Space::Grassmann {
        return Err(Error::invalid(format!(
            "first factor must be a grassmann codebook, got {}",
            cg.space()
        )));
    }
    if cu.space() != Space::Unitary {
        return Err(Error::invalid(format!(
            "second factor must be a unitary codebook, got {}",
            cu.space()
        )));
    }
    if cu.k() != cg.k() {
        return Err(Error::shape(format!(
            "unitary factor has k={}, grassmann factor has k={}",
            cu.k(),
            cg.k()
        )));
    }
    let mut symbols = Vec::with_capacity(cg.len() * cu.len());
    for phi in cg.symbols() {
        for u in cu.symbols() {
            symbols.push(phi.rotate(u.matrix())?);
        }
    }
    let label = if cg.label().is_empty() && cu.label().is_empty() {
        String::new()
    } else {
        format!("{}*{}", cg.label(), cu.label())
    };
    Codebook::new(Space::Stiefel, symbols, label)
}

/// Composition bound check: per-coefficient and diversity margins.
#[derive(Clone, Debug)]
pub struct CompositionReport {
    pub composed_size: usize,
    /// s̄^min_j of the composed code, j = 1..k.
    pub min_s_composed: Vec<f64>,
    /// sdist^min_j of the Grassmann factor (∞ when it has one symbol).
    pub min_sdist_grassmann: Vec<f64>,
    /// s̄^min_j of the unitary factor in U(k) (∞ when it has one symbol).
    pub min_s_unitary: Vec<f64>,
    /// s̄^min_j(C^V) − min{sdist^min_j, s̄^{U min}_j} per j; all ≥ 0.
    pub coeff_margins: Vec<f64>,
    pub min_div_composed: f64,
    pub min_div_grassmann: f64,
    /// min over unitary pairs of Σ_i (T/k)^i s̄^U_i (ϱ̄^U)^i.
    pub min_div_unitary_scaled: f64,
    /// Div̄^min(C^V) − min{Div̲^min, Div~^{U min}} ≥ 0.
    pub div_margin: f64,
    pub holds: bool,
}

/// Verifies the composition bound s̄^min_j(C^V) ≥ min{sdist^min_j, s̄^{U min}_j}
/// and its diversity version with (T/k)^i-scaled unitary coefficients.
pub fn verify_composition(
    cg: &Codebook,
    cu: &Codebook,
    cfg: &ChannelConfig,
) -> Result<CompositionReport> {
    let composed = compose(cg, cu)?;
    if composed.len() < 2 {
        return Err(Error::invalid(
            "composition bound needs at least two composed symbols",
        ));
    }
    let k = composed.k();
    let coherent_cfg = ChannelConfig::new(cfg.rho, cfg.t, cfg.k, cfg.n_r, Channel::Coherent)?;
    let stats_v = code_stats(&composed, &coherent_cfg, Channel::Coherent)?;

    // Grassmann factor: fiber minima and non-coherent diversity.
    let (min_sdist_g, min_div_g) = if cg.len() >= 2 {
        let s = code_stats(cg, cfg, Channel::Noncoherent)?;
        (s.min_sdist.clone(), s.min_div)
    } else {
        (vec![f64::INFINITY; k], f64::INFINITY)
    };

    // Unitary factor lives in U(k) = V_{k,k}; its effective SNR is ρ/4 and
    // the power constraint √(T/k) scales coefficient i by (T/k)^i, which is
    // the same as evaluating its polynomial at the composed ϱ̄.
    let (min_s_u, min_div_u) = if cu.len() >= 2 {
        let cfg_u = ChannelConfig::new(cfg.rho, cu.t(), cu.k(), cfg.n_r, Channel::Coherent)?;
        let s = code_stats(cu, &cfg_u, Channel::Coherent)?;
        let varrho_big = effective_snr(cfg.rho, cfg.t, cfg.k, Channel::Coherent)?;
        let mut min_scaled = f64::INFINITY;
        for i in 0..cu.len() {
            for j in (i + 1)..cu.len() {
                let g = pair_geometry(&cu.symbols()[i], &cu.symbols()[j])?;
                let profile = diversity_profile(&g, &cfg_u, Channel::Coherent);
                let mut div = 0.0;
                for idx in (0..=k).rev() {
                    div = div * varrho_big + profile.coeffs[idx];
                }
                min_scaled = min_scaled.min(div);
            }
        }
        (s.min_s.clone(), min_scaled)
    } else {
        (vec![f64::INFINITY; k], f64::INFINITY)
    };

    let coeff_margins: Vec<f64> = (0..k)
        .map(|j| stats_v.min_s[j] - min_sdist_g[j].min(min_s_u[j]))
        .collect();
    let div_margin = stats_v.min_div - min_div_g.min(min_div_u);
    let holds = coeff_margins.iter().all(|&m| m >= -tol::CROSS_CHECK)
        && div_margin >= -tol::CROSS_CHECK;

    Ok(CompositionReport {
        composed_size: composed.len(),
        min_s_composed: stats_v.min_s,
        min_sdist_grassmann: min_sdist_g,
        min_s_unitary: min_s_u,
        coeff_margins,
        min_div_composed: stats_v.min_div,
        min_div_grassmann: min_div_g,
        min_div_unitary_scaled: min_div_u,
        div_margin,
        holds,
    })
}
