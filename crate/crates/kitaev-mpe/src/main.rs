//! Command-line surface: single-point evaluation, parameter-plane sweeps,
//! scaling fits, oracle checks. Emits CSV (default) or JSON tables.
//!
//! Flag precedence: command-line flags > `--config` key-value file > defaults.

use clap::{Args, Parser, Subcommand};
use kitaev_mpe::analysis::{self, KindSelector, ParamAxis};
use kitaev_mpe::correlators::{self, OperatorKind};
use kitaev_mpe::error::Error;
use kitaev_mpe::model::{self, ModelParams, ALPHA_NN_SENTINEL, WINDING_DEFAULT_RESOLUTION};
use kitaev_mpe::oracle;
use kitaev_mpe::output::{Cell, Table};
use kitaev_mpe::sweep::{AxisSpec, Observable, SweepSpec};
use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kitaev-mpe", version, about = "Kitaev chain with variable-range pairing: string-operator QFI, winding numbers, susceptibilities, scaling fits")]
struct Cli {
    /// Key-value config file (`key = value` lines) providing flag defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default, Clone)]
struct ParamFlags {
    /// Hopping energy J (> 0).
    #[arg(long = "J")]
    j: Option<f64>,
    /// Chemical potential μ.
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Pairing strength Δ.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Pairing-range exponent α; `inf` selects the nearest-neighbor limit.
    #[arg(long)]
    alpha: Option<String>,
    /// Chain length L (even, >= 4).
    #[arg(long = "L")]
    l: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Momentum grid, Bogoliubov angles and quasiparticle energies.
    Spectrum {
        #[command(flatten)]
        p: ParamFlags,
    },
    /// Winding number of the Bloch vector.
    Winding {
        #[command(flatten)]
        p: ParamFlags,
        /// Dense evaluation grid size (>= 256).
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Fisher density and witnessed entanglement depth.
    Qfi {
        #[command(flatten)]
        p: ParamFlags,
        /// x, y, x_st, y_st, best, or all.
        #[arg(long)]
        operator: Option<String>,
    },
    /// Finite-size scaling fit f_Q = 1 + c L^b.
    Fit {
        #[command(flatten)]
        p: ParamFlags,
        /// Comma-separated size ladder, e.g. 64,96,128,192.
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long)]
        operator: Option<String>,
    },
    /// Two-axis parameter sweep of a scalar observable.
    Sweep {
        #[command(flatten)]
        p: ParamFlags,
        /// First axis, `param:min:max:steps` with param in {mu, delta, alpha}.
        #[arg(long)]
        axis1: Option<String>,
        /// Second axis, same syntax; must name a different parameter.
        #[arg(long)]
        axis2: Option<String>,
        /// fisher_density_best, fisher_density_<kind>, b_exponent,
        /// c_prefactor, winding, chi_mu, chi_delta, chi_alpha, gap.
        #[arg(long)]
        observable: Option<String>,
        /// Size ladder for b/c observables.
        #[arg(long)]
        sizes: Option<String>,
        /// Worker threads; falls back to KITAEV_MPE_WORKERS, then to the
        /// available parallelism.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Fidelity susceptibilities χ_μ, χ_Δ, χ_α.
    Susceptibility {
        #[command(flatten)]
        p: ParamFlags,
    },
    /// Correlation-collapse deviation across system sizes.
    Collapse {
        #[command(flatten)]
        p: ParamFlags,
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long)]
        operator: Option<String>,
        /// Collapse exponent; fitted from the same sizes when omitted.
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
    },
    /// Randomized comparison of the determinant path against the exact
    /// Fock-space oracle at small L.
    OracleCheck {
        #[command(flatten)]
        p: ParamFlags,
        /// Number of randomized parameter draws.
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// `key = value` config file; `#` starts a comment.
fn load_config(path: &PathBuf) -> Result<HashMap<String, String>, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::InvalidParams(format!(
                "config line {}: expected `key = value`",
                lineno + 1
            )));
        };
        map.insert(k.trim().to_lowercase(), v.trim().to_string());
    }
    Ok(map)
}

struct Settings {
    config: HashMap<String, String>,
}

impl Settings {
    fn get<T: std::str::FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, Error>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.config.get(key) {
            Some(raw) => raw.parse().map_err(|e| {
                Error::InvalidParams(format!("config key `{key}` = `{raw}`: {e}"))
            }),
            None => Ok(default),
        }
    }

    fn get_opt(&self, key: &str, flag: Option<String>) -> Option<String> {
        flag.or_else(|| self.config.get(key).cloned())
    }

    fn params(&self, p: &ParamFlags) -> Result<ModelParams, Error> {
        let j = self.get("j", p.j, 1.0)?;
        let mu = self.get("mu", p.mu, 0.0)?;
        let delta = self.get("delta", p.delta, 1.0)?;
        let alpha_raw = self.get_opt("alpha", p.alpha.clone()).unwrap_or_else(|| "2".into());
        let alpha = parse_alpha(&alpha_raw)?;
        let l = self.get("l", p.l, 100)?;
        ModelParams::new(j, mu, delta, alpha, l)
    }
}

fn parse_alpha(s: &str) -> Result<f64, Error> {
    match s.to_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(ALPHA_NN_SENTINEL),
        other => other
            .parse::<f64>()
            .map_err(|_| Error::InvalidParams(format!("alpha = `{s}` is not a number or `inf`"))),
    }
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParams(format!("size `{p}` is not an integer")))
        })
        .collect()
}

fn parse_selector(s: &str) -> Result<KindSelector, Error> {
    if s == "best" {
        return Ok(KindSelector::Best);
    }
    OperatorKind::parse(s)
        .map(KindSelector::Fixed)
        .ok_or_else(|| Error::InvalidParams(format!("operator `{s}` not one of x, y, x_st, y_st, best")))
}

fn parse_axis(s: &str) -> Result<AxisSpec, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(Error::InvalidParams(format!(
            "axis `{s}`: expected param:min:max:steps"
        )));
    }
    let param = ParamAxis::parse(parts[0])
        .ok_or_else(|| Error::InvalidParams(format!("axis parameter `{}` not one of mu, delta, alpha", parts[0])))?;
    let min: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidParams(format!("axis min `{}`", parts[1])))?;
    let max: f64 = parts[2]
        .parse()
        .map_err(|_| Error::InvalidParams(format!("axis max `{}`", parts[2])))?;
    let steps: usize = parts[3]
        .parse()
        .map_err(|_| Error::InvalidParams(format!("axis steps `{}`", parts[3])))?;
    Ok(AxisSpec { param, min, max, steps })
}

fn params_comment(p: &ModelParams) -> String {
    format!("params J={} mu={} delta={} alpha={} L={}", p.j, p.mu, p.delta, p.alpha, p.l)
}

fn qfi_row(q: &correlators::QfiResult) -> Vec<Cell> {
    vec![
        Cell::Text(q.kind.label().into()),
        Cell::Num(q.fisher_density),
        Cell::Num(q.fisher),
        Cell::Int(q.witnessed_depth as i64),
        Cell::Int(q.genuine_l_partite as i64),
    ]
}

/// Simple xorshift64* stream for reproducible oracle-check draws.
struct Rng(u64);

impl Rng {
    fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Table plus a flag for numerical failures surfaced in the output.
struct Outcome {
    table: Table,
    numerical_failure: bool,
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => HashMap::new(),
    };
    let settings = Settings { config };

    let outcome = match &cli.command {
        Command::Spectrum { p } => {
            let params = settings.params(p)?;
            let sol = model::solve(&params)?;
            let grid = model::build_grid(&params)?;
            let mut t = Table::new(&["n", "k", "epsilon", "theta"]);
            t.comment(params_comment(&params));
            if !sol.degenerate_modes().is_empty() {
                t.comment(format!("degenerate modes: {:?}", sol.degenerate_modes()));
            }
            for (n, &k) in grid.modes().iter().enumerate() {
                t.push_row(vec![
                    Cell::Int(n as i64),
                    Cell::Num(k),
                    Cell::Num(sol.epsilon()[n]),
                    Cell::Num(sol.theta()[n]),
                ]);
            }
            Outcome { table: t, numerical_failure: false }
        }

        Command::Winding { p, resolution } => {
            let params = settings.params(p)?;
            let resolution =
                settings.get("resolution", *resolution, WINDING_DEFAULT_RESOLUTION)?;
            let w = model::winding(&params, resolution)?;
            let mut t = Table::new(&["raw", "snapped", "snap_error"]);
            t.comment(params_comment(&params));
            t.push_row(vec![Cell::Num(w.raw), Cell::Num(w.snapped), Cell::Num(w.snap_error)]);
            Outcome { table: t, numerical_failure: false }
        }

        Command::Qfi { p, operator } => {
            let params = settings.params(p)?;
            let op = settings.get_opt("operator", operator.clone()).unwrap_or_else(|| "best".into());
            let mut t = Table::new(&["operator", "fisher_density", "fisher", "witnessed_depth", "genuine_l_partite"]);
            t.comment(params_comment(&params));
            if op == "all" {
                let sol = model::solve(&params)?;
                let kernel = correlators::contraction_kernel(&sol);
                for kind in OperatorKind::ALL {
                    t.push_row(qfi_row(&correlators::fisher_density(&kernel, kind)?));
                }
            } else {
                match parse_selector(&op)? {
                    KindSelector::Best => {
                        let (_, q) = correlators::best_operator(&params)?;
                        t.push_row(qfi_row(&q));
                    }
                    KindSelector::Fixed(kind) => {
                        let sol = model::solve(&params)?;
                        let kernel = correlators::contraction_kernel(&sol);
                        t.push_row(qfi_row(&correlators::fisher_density(&kernel, kind)?));
                    }
                }
            }
            Outcome { table: t, numerical_failure: false }
        }

        Command::Fit { p, sizes, operator } => {
            let params = settings.params(p)?;
            let sizes_raw = settings
                .get_opt("sizes", sizes.clone())
                .unwrap_or_else(|| "64,96,128,192,256,384,512".into());
            let sizes = parse_sizes(&sizes_raw)?;
            let op = settings.get_opt("operator", operator.clone()).unwrap_or_else(|| "best".into());
            let selector = parse_selector(&op)?;
            let fit = analysis::fit_scaling_for(&params, &sizes, selector)?;
            let mut t = Table::new(&["b", "c", "r_squared", "flat", "operator"]);
            t.comment(params_comment(&params));
            t.comment(format!("sizes {sizes_raw}"));
            t.push_row(vec![
                Cell::Num(fit.b),
                Cell::Num(fit.c),
                Cell::Num(fit.r_squared),
                Cell::Int(fit.flat as i64),
                Cell::Text(op.clone()),
            ]);
            Outcome { table: t, numerical_failure: false }
        }

        Command::Sweep { p, axis1, axis2, observable, sizes, workers } => {
            let fixed = settings.params(p)?;
            let axis1 = settings
                .get_opt("axis1", axis1.clone())
                .ok_or_else(|| Error::InvalidParams("sweep needs --axis1".into()))?;
            let axis2 = settings
                .get_opt("axis2", axis2.clone())
                .ok_or_else(|| Error::InvalidParams("sweep needs --axis2".into()))?;
            let obs_raw = settings
                .get_opt("observable", observable.clone())
                .ok_or_else(|| Error::InvalidParams("sweep needs --observable".into()))?;
            let observable = Observable::parse(&obs_raw)
                .ok_or_else(|| Error::InvalidParams(format!("unknown observable `{obs_raw}`")))?;
            let sizes = match settings.get_opt("sizes", sizes.clone()) {
                Some(raw) => parse_sizes(&raw)?,
                None => vec![],
            };
            let workers = match workers {
                Some(w) => *w,
                None => match std::env::var("KITAEV_MPE_WORKERS") {
                    Ok(v) => v.parse().map_err(|_| {
                        Error::InvalidParams(format!("KITAEV_MPE_WORKERS = `{v}` is not an integer"))
                    })?,
                    Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
                },
            };
            let spec = SweepSpec {
                axis1: parse_axis(&axis1)?,
                axis2: parse_axis(&axis2)?,
                fixed,
                observable,
                sizes,
            };
            let result = kitaev_mpe::sweep::run_sweep(&spec, workers)?;
            let failed = result.any_failed();
            Outcome { table: result.to_table(), numerical_failure: failed }
        }

        Command::Susceptibility { p } => {
            let params = settings.params(p)?;
            let s = analysis::susceptibility(&params)?;
            let mut t = Table::new(&["chi_mu", "chi_delta", "chi_alpha"]);
            t.comment(params_comment(&params));
            t.push_row(vec![Cell::Num(s.chi_mu), Cell::Num(s.chi_delta), Cell::Num(s.chi_alpha)]);
            Outcome { table: t, numerical_failure: false }
        }

        Command::Collapse { p, sizes, operator, b } => {
            let params = settings.params(p)?;
            let sizes_raw = settings
                .get_opt("sizes", sizes.clone())
                .unwrap_or_else(|| "100,200,400".into());
            let sizes = parse_sizes(&sizes_raw)?;
            let op = settings.get_opt("operator", operator.clone()).unwrap_or_else(|| "best".into());
            let selector = parse_selector(&op)?;
            // resolve `best` once, at the largest size, so every profile uses
            // the same operator
            let kind = match selector {
                KindSelector::Fixed(k) => k,
                KindSelector::Best => {
                    let largest = ModelParams { l: *sizes.iter().max().unwrap(), ..params };
                    correlators::best_operator(&largest)?.0
                }
            };
            let mut profiles = Vec::new();
            for &l in &sizes {
                let pl = ModelParams { l, ..params };
                let sol = model::solve(&pl)?;
                let kernel = correlators::contraction_kernel(&sol);
                profiles.push(correlators::correlation_profile(&kernel, kind));
            }
            let b_used = match b {
                Some(b) => *b,
                None => {
                    let samples: Vec<(usize, f64)> = profiles
                        .iter()
                        .map(|pr| {
                            (pr.params.l, correlators::fisher_density_of_profile(pr).map(|q| q.fisher_density))
                        })
                        .map(|(l, r)| r.map(|f| (l, f)))
                        .collect::<Result<_, _>>()?;
                    analysis::fit_scaling(&samples)?.b
                }
            };
            let dev = analysis::collapse_deviation(&profiles, b_used)?;
            let mut t = Table::new(&["b", "deviation", "operator"]);
            t.comment(params_comment(&params));
            t.comment(format!("sizes {sizes_raw}"));
            t.push_row(vec![Cell::Num(b_used), Cell::Num(dev), Cell::Text(kind.label().into())]);
            Outcome { table: t, numerical_failure: false }
        }

        Command::OracleCheck { p, draws, seed } => {
            let mut flags = p.clone();
            if flags.l.is_none() {
                flags.l = Some(8);
            }
            let base = settings.params(&flags)?;
            if base.l > oracle::MAX_QFI_L {
                return Err(Error::FockTooLarge(base.l));
            }
            let draws = settings.get("draws", *draws, 10)?;
            let seed = settings.get("seed", *seed, 0x9E3779B97F4A7C15)?;
            let mut rng = Rng(seed | 1);
            let mut t = Table::new(&[
                "draw", "mu", "delta", "alpha", "max_corr_err", "max_fq_err", "energy_err",
                "max_mean", "status",
            ]);
            t.comment(format!("oracle check at L={} with {draws} randomized draws", base.l));
            let mut any_fail = false;
            for draw in 0..draws {
                let params = ModelParams {
                    mu: rng.uniform(-3.0, 3.0) * base.j,
                    delta: rng.uniform(-3.0, 3.0) * base.j,
                    alpha: rng.uniform(0.0, 5.0),
                    ..base
                };
                let sol = model::solve(&params)?;
                let kernel = correlators::contraction_kernel(&sol);
                let psi = oracle::build_ground_state(&params)?;
                let energy_err =
                    (oracle::hamiltonian_expectation(&params, &psi) - sol.ground_energy()).abs();
                let mut max_corr_err: f64 = 0.0;
                let mut max_fq_err: f64 = 0.0;
                let mut max_mean: f64 = 0.0;
                for kind in OperatorKind::ALL {
                    let exact = oracle::brute_force_qfi(&params, kind)?;
                    let det = correlators::fisher_density(&kernel, kind)?;
                    max_fq_err = max_fq_err.max((exact.fisher_density - det.fisher_density).abs());
                    max_mean = max_mean.max(exact.mean.norm());
                    for (l, &c_exact) in (1..).zip(&exact.correlations) {
                        let c_det = correlators::correlation(&kernel, kind, l)?;
                        max_corr_err = max_corr_err.max((c_exact - c_det).abs());
                    }
                }
                let ok = max_corr_err < 1e-9 && max_fq_err < 1e-9 && energy_err < 1e-10 && max_mean < 1e-12;
                any_fail |= !ok;
                t.push_row(vec![
                    Cell::Int(draw as i64),
                    Cell::Num(params.mu),
                    Cell::Num(params.delta),
                    Cell::Num(params.alpha),
                    Cell::Num(max_corr_err),
                    Cell::Num(max_fq_err),
                    Cell::Num(energy_err),
                    Cell::Num(max_mean),
                    Cell::Text(if ok { "ok".into() } else { "mismatch".into() }),
                ]);
            }
            Outcome { table: t, numerical_failure: any_fail }
        }
    };
    Ok(outcome)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnresolvedWinding { .. } | Error::VarianceBound(_) | Error::NegativeExcess(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.format.clone().unwrap_or_else(|| "csv".into());
    let out_path = cli.out.clone();
    match run(cli) {
        Ok(outcome) => {
            let rendered = match format.as_str() {
                "csv" => outcome.table.to_csv(),
                "json" => outcome.table.to_json(),
                other => {
                    eprintln!("error: unknown format `{other}` (use csv or json)");
                    return ExitCode::from(1);
                }
            };
            match out_path {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, rendered) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{rendered}"),
            }
            ExitCode::from(if outcome.numerical_failure { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
