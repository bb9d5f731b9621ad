//! Command-line surface: deterministic, file-based workflows over the
//! library. Randomized subcommands require an explicit --seed; identical
//! argv and seed produce byte-identical primary output regardless of the
//! thread count. Wall-clock timestamps live only in the run manifest
//! written beside -o files.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channel::{estimate_bler, Channel, ChannelConfig};
use crate::codebook::{code_stats, compose, verify_composition, Codebook, Space};
use crate::diversity::{chernov_bound, diversity_profile, exact_pep};
use crate::error::{Error, Result};
use crate::extremal::{
    max_pdist_on_sum, max_prod_on_sum, minmax_dist_on_sum, minmax_pdist_on_prod,
    simplex_grid_oracle, AngleFn, ConstraintKind,
};
use crate::manifold::pair_geometry;
use crate::packing::{pack, scaling_experiment, PackMetric, PackingConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_FILE: i32 = 66;

#[derive(Parser)]
#[command(
    name = "stgeo",
    version,
    about = "Space-time block code geometry: pairwise analytics, packing search, extremal formulas and Monte Carlo simulation",
    long_about = "Space-time block code geometry toolbox.\n\n\
        Codebooks are JSON files: {\"space\":\"grassmann\",\"T\":4,\"k\":2,\
        \"symbols\":[[[[re,im], ... k], ... T], ... N]} with an optional \
        \"label\".\n\
        All CSV output starts with a header row; column orders are part of \
        the contract and documented per subcommand.\n\
        Randomized subcommands require --seed and rerun byte-identically, \
        independent of --threads (STGEO_THREADS is the fallback)."
)]
struct Cli {
    /// Cap the worker thread count (fallback: STGEO_THREADS). Results never
    /// depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ChannelArg {
    Coherent,
    Noncoherent,
}

impl From<ChannelArg> for Channel {
    fn from(c: ChannelArg) -> Channel {
        match c {
            ChannelArg::Coherent => Channel::Coherent,
            ChannelArg::Noncoherent => Channel::Noncoherent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    Stiefel,
    Grassmann,
    Unitary,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::Stiefel => Space::Stiefel,
            SpaceArg::Grassmann => Space::Grassmann,
            SpaceArg::Unitary => Space::Unitary,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Coherent,
    Noncoherent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WhichExtremal {
    MaxProdOnSum,
    MinmaxDistOnSum,
    MaxPdistOnSum,
    MinmaxPdistOnProd,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise minimum statistics of a codebook.
    /// CSV columns: quantity,index,value. Rows: space, T, k, size, rate,
    /// channel, rho, nr, min_dsum, min_dsum_sq, min_dprod, min_dprod_sq,
    /// min_div, then min_s and min_sdist per index j=1..k, then the argmin
    /// pairs (value "i:j").
    Analyze {
        codebook: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        nr: usize,
        /// Default: noncoherent for grassmann codebooks, coherent otherwise.
        #[arg(long, value_enum)]
        channel: Option<ChannelArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compose a Grassmann codebook with a unitary codebook into a Stiefel
    /// codebook (JSON to --output). With --verify, prints the composition
    /// bound margins as CSV: quantity,index,value.
    Compose {
        grassmann: PathBuf,
        unitary: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = false)]
        verify: bool,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        nr: usize,
    },
    /// Maximin packing search; writes the best codebook as JSON and prints
    /// CSV: T,N,min_dsum,min_dprod.
    Pack {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long = "T")]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        /// Default: noncoherent for grassmann, coherent otherwise.
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        restarts: usize,
        #[arg(long, default_value_t = 4000)]
        iterations: usize,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Destination for the codebook JSON (stdout gets the CSV line).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fixed-rate packing sweep over block lengths; CSV:
    /// T,N,min_dsum,min_dprod plus a trailing "# nondecreasing=..." comment.
    /// --timing appends a seconds column (wall clock; excluded from the
    /// determinism contract).
    Scaling {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        rate: f64,
        #[arg(long = "Tlist", value_delimiter = ',', required = true)]
        t_list: Vec<usize>,
        #[arg(long, value_enum, default_value_t = SpaceArg::Grassmann)]
        space: SpaceArg,
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        restarts: usize,
        #[arg(long, default_value_t = 4000)]
        iterations: usize,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = false)]
        timing: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Closed-form constrained extrema against the simplex grid oracle;
    /// CSV: k,delta,quantity,closed_form,oracle,gap.
    Extremal {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = WhichExtremal::All)]
        which: WhichExtremal,
        /// Oracle grid step in radians (max pi/50).
        #[arg(long, default_value_t = std::f64::consts::PI / 200.0)]
        step: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo block error rate of a codebook;
    /// CSV: rho,trials,bler,stderr,union_bound,chernov_sum.
    Simulate {
        codebook: PathBuf,
        #[arg(long, required = true, value_delimiter = ',')]
        rho: Vec<f64>,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        nr: usize,
        /// Default: noncoherent for grassmann codebooks, coherent otherwise.
        #[arg(long, value_enum)]
        channel: Option<ChannelArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact pairwise error probability for one symbol pair;
    /// CSV: i,j,channel,rho,nr,exact_pep,chernov_bound.
    Pep {
        codebook: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        nr: usize,
        #[arg(long, value_enum)]
        channel: Option<ChannelArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Sits beside every -o output file as <output>.manifest.json.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
}

struct Outcome {
    /// Primary machine-readable output (CSV or JSON).
    text: String,
    output: Option<PathBuf>,
    seed: Option<u64>,
    /// Secondary file written by the command itself (codebook JSON for pack).
    extra_file: Option<(PathBuf, String)>,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    let threads = cli.threads.or_else(|| {
        std::env::var("STGEO_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        // ignore failure: the global pool can only be initialized once per
        // process (tests call run() repeatedly)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }

    let started = unix_now();
    let command_name = command_name(&cli.command);
    match execute(cli.command) {
        Ok(outcome) => {
            let manifest = |finished: f64| RunManifest {
                command: command_name.clone(),
                argv: argv.clone(),
                seed: outcome.seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                started_unix: started,
                finished_unix: finished,
            };
            let write_with_manifest = |path: &Path, text: &str| -> std::result::Result<(), i32> {
                std::fs::write(path, text).map_err(|e| {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    EXIT_FILE
                })?;
                let m = manifest(unix_now());
                let manifest_path = manifest_path_for(path);
                std::fs::write(
                    &manifest_path,
                    serde_json::to_string_pretty(&m).expect("serializable"),
                )
                .map_err(|e| {
                    eprintln!("error: cannot write {}: {e}", manifest_path.display());
                    EXIT_FILE
                })
            };
            if let Some((path, text)) = &outcome.extra_file {
                if let Err(code) = write_with_manifest(path, text) {
                    return code;
                }
            }
            match &outcome.output {
                Some(path) => {
                    if let Err(code) = write_with_manifest(path, &outcome.text) {
                        return code;
                    }
                }
                None => print!("{}", outcome.text),
            }
            EXIT_OK
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io { .. } => EXIT_FILE,
                _ => EXIT_VALIDATION,
            }
        }
    }
}

fn unix_now() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Analyze { .. } => "analyze",
        Command::Compose { .. } => "compose",
        Command::Pack { .. } => "pack",
        Command::Scaling { .. } => "scaling",
        Command::Extremal { .. } => "extremal",
        Command::Simulate { .. } => "simulate",
        Command::Pep { .. } => "pep",
    }
    .to_string()
}

fn default_channel(space: Space, requested: Option<ChannelArg>) -> Channel {
    match requested {
        Some(c) => c.into(),
        None => match space {
            Space::Grassmann => Channel::Noncoherent,
            Space::Stiefel | Space::Unitary => Channel::Coherent,
        },
    }
}

fn print_warnings(cfg: &ChannelConfig) {
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
}

fn execute(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Analyze {
            codebook,
            rho,
            nr,
            channel,
            output,
        } => {
            let book = Codebook::load(&codebook)?;
            let channel = default_channel(book.space(), channel);
            let cfg = ChannelConfig::new(rho, book.t(), book.k(), nr, channel)?;
            print_warnings(&cfg);
            let stats = code_stats(&book, &cfg, channel)?;
            let mut out = String::from("quantity,index,value\n");
            let push = |out: &mut String, q: &str, idx: &str, v: String| {
                out.push_str(&format!("{q},{idx},{v}\n"));
            };
            push(&mut out, "space", "", book.space().to_string());
            push(&mut out, "T", "", book.t().to_string());
            push(&mut out, "k", "", book.k().to_string());
            push(&mut out, "size", "", book.len().to_string());
            push(&mut out, "rate", "", book.rate().to_string());
            push(&mut out, "channel", "", channel.to_string());
            push(&mut out, "rho", "", rho.to_string());
            push(&mut out, "nr", "", nr.to_string());
            push(&mut out, "min_dsum", "", stats.min_dsum.to_string());
            push(
                &mut out,
                "min_dsum_sq",
                "",
                (stats.min_dsum * stats.min_dsum).to_string(),
            );
            push(&mut out, "min_dprod", "", stats.min_dprod.to_string());
            push(
                &mut out,
                "min_dprod_sq",
                "",
                (stats.min_dprod * stats.min_dprod).to_string(),
            );
            push(&mut out, "min_div", "", stats.min_div.to_string());
            for j in 0..book.k() {
                push(
                    &mut out,
                    "min_s",
                    &(j + 1).to_string(),
                    stats.min_s[j].to_string(),
                );
            }
            for j in 0..book.k() {
                push(
                    &mut out,
                    "min_sdist",
                    &(j + 1).to_string(),
                    stats.min_sdist[j].to_string(),
                );
            }
            push(
                &mut out,
                "argmin_dsum",
                "",
                format!("{}:{}", stats.argmin_dsum.0, stats.argmin_dsum.1),
            );
            push(
                &mut out,
                "argmin_dprod",
                "",
                format!("{}:{}", stats.argmin_dprod.0, stats.argmin_dprod.1),
            );
            push(
                &mut out,
                "argmin_div",
                "",
                format!("{}:{}", stats.argmin_div.0, stats.argmin_div.1),
            );
            Ok(Outcome {
                text: out,
                output,
                seed: None,
                extra_file: None,
            })
        }

        Command::Compose {
            grassmann,
            unitary,
            output,
            verify,
            rho,
            nr,
        } => {
            let cg = Codebook::load(&grassmann)?;
            let cu = Codebook::load(&unitary)?;
            let composed = compose(&cg, &cu)?;
            let json = composed.to_json_string();
            let mut text = String::from("quantity,index,value\n");
            text.push_str(&format!("size,,{}\n", composed.len()));
            text.push_str(&format!("rate,,{}\n", composed.rate()));
            if verify {
                let cfg =
                    ChannelConfig::new(rho, composed.t(), composed.k(), nr, Channel::Coherent)?;
                let report = verify_composition(&cg, &cu, &cfg)?;
                for (j, m) in report.coeff_margins.iter().enumerate() {
                    text.push_str(&format!("coeff_margin,{},{}\n", j + 1, m));
                }
                text.push_str(&format!("div_margin,,{}\n", report.div_margin));
                text.push_str(&format!("holds,,{}\n", report.holds));
            }
            Ok(Outcome {
                text,
                output: None,
                seed: None,
                extra_file: Some((output, json)),
            })
        }

        Command::Pack {
            space,
            t,
            k,
            n,
            metric,
            seed,
            restarts,
            iterations,
            step,
            output,
        } => {
            let space: Space = space.into();
            let metric = match metric {
                Some(MetricArg::Coherent) => PackMetric::DsumCoherent,
                Some(MetricArg::Noncoherent) => PackMetric::DsumNoncoherent,
                None => PackMetric::default_for(space),
            };
            let cfg = PackingConfig {
                space,
                t,
                k,
                n,
                metric,
                restarts,
                iterations,
                step,
                seed,
            };
            let result = pack(&cfg)?;
            let stats_cfg = ChannelConfig::new(
                1.0,
                t,
                k,
                1,
                match metric {
                    PackMetric::DsumCoherent => Channel::Coherent,
                    PackMetric::DsumNoncoherent => Channel::Noncoherent,
                },
            )?;
            let stats = code_stats(&result.codebook, &stats_cfg, stats_cfg.channel)?;
            let csv = format!(
                "T,N,min_dsum,min_dprod\n{},{},{},{}\n",
                t, n, result.min_distance, stats.min_dprod
            );
            let json = result.codebook.to_json_string();
            match output {
                Some(path) => Ok(Outcome {
                    // the codebook is the primary artifact; the CSV line
                    // goes to stdout for quick inspection
                    text: csv,
                    output: None,
                    seed: Some(seed),
                    extra_file: Some((path, json)),
                }),
                None => Ok(Outcome {
                    text: json,
                    output: None,
                    seed: Some(seed),
                    extra_file: None,
                }),
            }
        }

        Command::Scaling {
            k,
            rate,
            t_list,
            space,
            metric,
            seed,
            restarts,
            iterations,
            step,
            timing,
            output,
        } => {
            let space: Space = space.into();
            let metric = match metric {
                Some(MetricArg::Coherent) => PackMetric::DsumCoherent,
                Some(MetricArg::Noncoherent) => PackMetric::DsumNoncoherent,
                None => PackMetric::default_for(space),
            };
            let base = PackingConfig {
                space,
                t: *t_list.first().unwrap_or(&(2 * k)),
                k,
                n: 2,
                metric,
                restarts,
                iterations,
                step,
                seed,
            };
            let table = scaling_experiment(k, rate, &t_list, &base)?;
            let mut text = if timing {
                String::from("T,N,min_dsum,min_dprod,seconds\n")
            } else {
                String::from("T,N,min_dsum,min_dprod\n")
            };
            for row in &table.rows {
                if timing {
                    text.push_str(&format!(
                        "{},{},{},{},{:.3}\n",
                        row.t, row.n, row.min_dsum, row.min_dprod, row.seconds
                    ));
                } else {
                    text.push_str(&format!(
                        "{},{},{},{}\n",
                        row.t, row.n, row.min_dsum, row.min_dprod
                    ));
                }
            }
            text.push_str(&format!(
                "# nondecreasing={} allowance={}\n",
                table.nondecreasing, table.noise_allowance
            ));
            Ok(Outcome {
                text,
                output,
                seed: Some(seed),
                extra_file: None,
            })
        }

        Command::Extremal {
            k,
            delta,
            which,
            step,
            output,
        } => {
            let mut text = String::from("k,delta,quantity,closed_form,oracle,gap\n");
            let mut rows: Vec<(String, f64, AngleFn, ConstraintKind, bool)> = Vec::new();
            let want = |w: WhichExtremal| which == w || which == WhichExtremal::All;
            if want(WhichExtremal::MaxProdOnSum) {
                let e = max_prod_on_sum(k, delta)?;
                rows.push((
                    "max-prod-on-sum".into(),
                    e.value,
                    AngleFn::NoncohProdSq,
                    ConstraintKind::NoncohSum,
                    true,
                ));
            }
            if want(WhichExtremal::MinmaxDistOnSum) {
                let mm = minmax_dist_on_sum(k, delta)?;
                rows.push((
                    "min-dist-on-sum".into(),
                    mm.min.value,
                    AngleFn::DistSq,
                    ConstraintKind::NoncohSum,
                    false,
                ));
                rows.push((
                    "max-dist-on-sum".into(),
                    mm.max.value,
                    AngleFn::DistSq,
                    ConstraintKind::NoncohSum,
                    true,
                ));
            }
            if want(WhichExtremal::MaxPdistOnSum) {
                let e = max_pdist_on_sum(k, delta)?;
                rows.push((
                    "max-pdist-on-sum".into(),
                    e.value,
                    AngleFn::PdistSq,
                    ConstraintKind::NoncohSum,
                    true,
                ));
            }
            if want(WhichExtremal::MinmaxPdistOnProd) {
                let mm = minmax_pdist_on_prod(k, delta)?;
                rows.push((
                    "min-pdist-on-prod".into(),
                    mm.min.value,
                    AngleFn::PdistSq,
                    ConstraintKind::NoncohProd,
                    false,
                ));
                rows.push((
                    "max-pdist-on-prod".into(),
                    mm.max.value,
                    AngleFn::PdistSq,
                    ConstraintKind::NoncohProd,
                    true,
                ));
            }
            for (name, closed, objective, constraint, use_max) in rows {
                let oracle_value = simplex_grid_oracle(k, objective, constraint, delta, step)?
                    .map(|o| if use_max { o.max } else { o.min });
                match oracle_value {
                    Some(v) => text.push_str(&format!(
                        "{k},{delta},{name},{closed},{v},{}\n",
                        v - closed
                    )),
                    None => text.push_str(&format!("{k},{delta},{name},{closed},infeasible,\n")),
                }
            }
            Ok(Outcome {
                text,
                output,
                seed: None,
                extra_file: None,
            })
        }

        Command::Simulate {
            codebook,
            rho,
            trials,
            seed,
            nr,
            channel,
            output,
        } => {
            let book = Codebook::load(&codebook)?;
            let channel = default_channel(book.space(), channel);
            let mut text = String::from("rho,trials,bler,stderr,union_bound,chernov_sum\n");
            for &r in &rho {
                let cfg = ChannelConfig::new(r, book.t(), book.k(), nr, channel)?;
                print_warnings(&cfg);
                let result = estimate_bler(&book, &cfg, trials, seed)?;
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r,
                    trials,
                    result.sim.rate,
                    result.sim.std_error,
                    result.union_bound,
                    result.chernov_sum
                ));
            }
            Ok(Outcome {
                text,
                output,
                seed: Some(seed),
                extra_file: None,
            })
        }

        Command::Pep {
            codebook,
            i,
            j,
            rho,
            nr,
            channel,
            output,
        } => {
            let book = Codebook::load(&codebook)?;
            if i >= book.len() || j >= book.len() || i == j {
                return Err(Error::invalid(format!(
                    "need two distinct symbol indices below {}, got i={i} j={j}",
                    book.len()
                )));
            }
            let channel = default_channel(book.space(), channel);
            let cfg = ChannelConfig::new(rho, book.t(), book.k(), nr, channel)?;
            print_warnings(&cfg);
            let g = pair_geometry(&book.symbols()[i], &book.symbols()[j])?;
            let pep = exact_pep(&g, &cfg, channel)?;
            let bound = chernov_bound(&diversity_profile(&g, &cfg, channel), nr)?;
            let text = format!(
                "i,j,channel,rho,nr,exact_pep,chernov_bound\n{i},{j},{channel},{rho},{nr},{pep},{bound}\n"
            );
            Ok(Outcome {
                text,
                output,
                seed: None,
                extra_file: None,
            })
        }
    }
}
