use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ghost_slopes::distribution::{sample_many, SampleKind};
use ghost_slopes::prediction::predict_slopes;
use ghost_slopes::render::{self, rational_str};
use ghost_slopes::verify::{all_passed, run_all, Scale};
use ghost_slopes::{k_newslopes, k_thresholds, GhostContext, GhostError, Mode, Valuation, WeightIndex, WeightPoint};

#[derive(Parser)]
#[command(name = "ghost-slopes", version, about = "Exact ghost-series slope computations")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Prime p >= 5.
    #[arg(short, long, global = true, default_value_t = 7)]
    p: u64,
    #[arg(short, long, global = true, default_value_t = 2)]
    a: u64,
    /// The shift s_eps selecting the congruence class.
    #[arg(short = 'e', long = "s-eps", global = true, default_value_t = 1)]
    s_eps: u64,
    /// Global multiplicity m.
    #[arg(short = 'm', long = "mult", global = true, default_value_t = 1)]
    global_mult: u64,
    #[arg(long, global = true, default_value = "exploratory")]
    mode: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long, global = true, default_value_t = 20_240_601)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Upper bound on weights scanned when locating ghost zeros.
    #[arg(long, global = true)]
    k_ceiling: Option<u64>,
    /// Decimal places in decimal columns.
    #[arg(long, global = true, default_value_t = 6)]
    digits: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct Weights {
    #[arg(short, long, conflicts_with = "k_range")]
    k: Option<u64>,
    /// Inclusive weight range `lo:hi`.
    #[arg(long)]
    k_range: Option<String>,
    /// Keep every `stride`-th weight of the range.
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Ghost coefficients g_1..g_n.
    Ghost {
        #[arg(short, long)]
        n: u64,
    },
    /// k-newslopes at a point of radius `r` around w_k.
    Slopes {
        #[arg(short, long)]
        k: u64,
        /// Radius valuation: integer, `num/den` or `inf`.
        #[arg(short, long)]
        r: String,
    },
    /// Thresholds CS_1..CS_d with provenance.
    Thresholds {
        #[command(flatten)]
        weights: Weights,
    },
    /// Predicted L-invariant slopes.
    Predict {
        #[command(flatten)]
        weights: Weights,
    },
    /// Moments of the normalized slope samples.
    Dist {
        #[command(flatten)]
        weights: Weights,
        /// Highest moment.
        #[arg(short, long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value = "threshold")]
        kind: String,
    },
    /// Runs every property suite; exits 3 on failure.
    Verify {
        /// Run at full scale.
        #[arg(long)]
        full: bool,
    },
}

enum Failure {
    Config(String),
    Domain(String),
    Verification,
}

impl From<GhostError> for Failure {
    fn from(e: GhostError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

fn context(cfg: &RunConfig) -> Result<GhostContext, Failure> {
    let mode: Mode = cfg.mode.parse()?;
    let mut ctx = GhostContext::new(cfg.p, cfg.a, cfg.s_eps, mode)?.with_global_mult(cfg.global_mult)?;
    if let Some(c) = cfg.k_ceiling {
        ctx = ctx.with_k_ceiling(c);
    }
    if let Some(dir) = std::env::var_os("GHOST_SLOPES_CACHE").filter(|d| !d.is_empty()) {
        ctx = ctx.with_cache_dir(dir);
    }
    for w in ctx.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(ctx)
}

fn resolve(ctx: &GhostContext, w: &Weights) -> Result<Vec<WeightIndex>, Failure> {
    if w.stride == 0 {
        return Err(Failure::Config("--stride must be positive".into()));
    }
    match (&w.k, &w.k_range) {
        (Some(k), _) => Ok(vec![ctx.weight(*k)?]),
        (None, Some(range)) => {
            let (lo, hi) = range
                .split_once(':')
                .and_then(|(lo, hi)| Some((lo.trim().parse::<u64>().ok()?, hi.trim().parse::<u64>().ok()?)))
                .ok_or_else(|| Failure::Config(format!("bad --k-range {range:?}, expected lo:hi")))?;
            if lo > hi {
                return Err(Failure::Config(format!("empty --k-range {range:?}")));
            }
            Ok(ctx.weights_in(lo, hi).into_iter().step_by(w.stride).collect())
        }
        (None, None) => Err(Failure::Config("one of -k or --k-range is required".into())),
    }
}

fn json_lines(items: impl IntoIterator<Item = String>) -> String {
    items.into_iter().map(|s| s + "\n").collect()
}

fn run(cli: Cli) -> Result<String, Failure> {
    let cfg = &cli.config;
    if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let ctx = context(cfg)?;
    match cli.command {
        Command::Ghost { n } => {
            let polys = (1..=n).map(|i| ctx.ghost_polynomial(i)).collect::<Result<Vec<_>, _>>()?;
            Ok(match cfg.format {
                Format::Json => render::ghost_json(&polys) + "\n",
                Format::Table => render::ghost_table(&polys),
                Format::Csv => {
                    let mut out = String::from("n,k,mult\n");
                    for g in &polys {
                        for (k, m) in &g.zeros {
                            out.push_str(&format!("{},{k},{m}\n", g.n));
                        }
                    }
                    out
                }
            })
        }
        Command::Slopes { k, r } => {
            let k = ctx.weight(k)?;
            let radius = Valuation::parse(&r).map_err(|e| Failure::Config(e.to_string()))?;
            let shown = match &radius {
                Valuation::Finite(v) => rational_str(v),
                Valuation::Infinity => "inf".into(),
            };
            let ns = k_newslopes(&ctx, k, &WeightPoint::new(k, radius)?)?;
            Ok(match cfg.format {
                Format::Json => render::newslopes_json(k.k(), &shown, &ns) + "\n",
                Format::Table => render::newslopes_table(k.k(), &shown, &ns),
                Format::Csv => {
                    let mut out = String::from("index,slope\n");
                    for (i, s) in ns.values.iter().enumerate() {
                        out.push_str(&format!("{},{}\n", i + 1, rational_str(s)));
                    }
                    out
                }
            })
        }
        Command::Thresholds { weights } => {
            let ks = resolve(&ctx, &weights)?;
            let ths = ks.iter().map(|&k| k_thresholds(&ctx, k)).collect::<Result<Vec<_>, _>>()?;
            Ok(match cfg.format {
                Format::Json => json_lines(ths.iter().map(render::thresholds_json)),
                Format::Table => ths.iter().map(render::thresholds_table).collect(),
                Format::Csv => {
                    let mut out = String::from("k,index,threshold,provenance\n");
                    for th in &ths {
                        for (i, (v, p)) in th.local.iter().zip(&th.provenance).enumerate() {
                            out.push_str(&format!("{},{},{},{}\n", th.k.k(), i + 1, rational_str(v), p.label()));
                        }
                    }
                    out
                }
            })
        }
        Command::Predict { weights } => {
            let ks = resolve(&ctx, &weights)?;
            let preds = ks.iter().map(|&k| predict_slopes(&ctx, k)).collect::<Result<Vec<_>, _>>()?;
            Ok(match cfg.format {
                Format::Json => json_lines(preds.iter().map(render::predict_json)),
                Format::Table => preds.iter().map(render::predict_table).collect(),
                Format::Csv => {
                    let mut out = String::from("k,linv,mult\n");
                    for pr in &preds {
                        for (v, m) in &pr.linv_known {
                            out.push_str(&format!("{},{},{m}\n", pr.k.k(), rational_str(v)));
                        }
                    }
                    out
                }
            })
        }
        Command::Dist { weights, n, kind } => {
            let kind: SampleKind = kind.parse()?;
            let ks = resolve(&ctx, &weights)?;
            let samples = sample_many(&ctx, &ks, kind)?;
            Ok(match cfg.format {
                Format::Json => render::dist_json(&samples, n) + "\n",
                Format::Csv | Format::Table => render::dist_csv(&samples, n, cfg.digits),
            })
        }
        Command::Verify { full } => {
            let scale = if full { Scale::Full } else { Scale::Quick };
            let reports = run_all(&ctx, scale, cfg.seed);
            for r in &reports {
                println!("{r}");
            }
            if all_passed(&reports) {
                Ok(String::new())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => {
            eprintln!("error: verification failed");
            ExitCode::from(3)
        }
    }
}
