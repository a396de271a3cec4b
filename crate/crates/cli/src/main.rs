//! `expfun`: moments of exponential functionals from the command line.

mod config;
mod output;
mod process;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use config::{merge, merge_flag, Config};
use expfun::bgamma::{eval_w, gamma_phi, ln_w};
use expfun::convolution::{verify_identity, TabulatedFunction};
use expfun::montecarlo::{mc_moments, GammaScheme, SimControl};
use expfun::series::{moments, neg_int_moment, zeta, SeriesOptions, SeriesResult};
use expfun::symmetric::{
    cp_half_neg_moment, half_neg_moment, half_pos_moment, n_minus_half_moment, ConvolutionGrid, CpVariant,
};
use expfun::{Bernstein, Error, C64};
use output::{ErrorBody, ErrorDocument, Format, Sink, SCHEMA_VERSION};
use process::{parse_complex, parse_process};

#[derive(Parser)]
#[command(name = "expfun", version, about = "Moments of exponential functionals of Lévy processes")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// JSON object with default values for the command's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// E[I^z(t)] for a subordinator with Laplace exponent phi.
    Moment(MomentArgs),
    /// Bernstein-gamma function W_phi(z).
    Bgamma(BgammaArgs),
    /// Riemann zeta as the -1 moment of the gamma subordinator.
    Zeta(ZetaArgs),
    /// Moments of symmetric Lévy processes.
    Symmetric {
        #[command(subcommand)]
        which: SymmetricCommand,
    },
    /// Residual of the moment convolution identity for two tabulated curves.
    VerifyConv(VerifyArgs),
    /// Monte-Carlo estimate of E[I^z(t)].
    Mc(McArgs),
}

#[derive(Args)]
struct MomentArgs {
    /// Shorthand (`log1p`, `power:0.5`, `linear:1+q=0.2`, ...) or JSON spec.
    #[arg(long)]
    phi: Option<String>,
    /// `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Comma-separated horizons.
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Report a non-converged sum instead of failing.
    #[arg(long)]
    allow_unconverged: bool,
    /// Skip the growth-condition probes on phi (a warning is attached).
    #[arg(long)]
    no_hypothesis_check: bool,
}

#[derive(Args)]
struct BgammaArgs {
    #[arg(long)]
    phi: Option<String>,
    /// Repeatable; `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<Vec<String>>,
}

#[derive(Args)]
struct ZetaArgs {
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum SymmetricCommand {
    /// t^{-1/2}, for processes that are not compound Poisson.
    HalfNeg {
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// The -1/2 moment of a symmetric compound Poisson process.
    CpHalfNeg {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
    },
    /// The 1/2 moment from Psi(1/2).
    HalfPos {
        #[command(flatten)]
        psi: PsiSource,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// The n - 1/2 moment by iterated convolution.
    NMinusHalf {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        psi: PsiSource,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        /// Grid cells over [0, t].
        #[arg(long)]
        cells: Option<usize>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct PsiSource {
    /// Psi(k - 1/2) for k = 1, 2, ... (comma-separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    psi: Option<Vec<f64>>,
    /// Brownian motion with this variance: Psi(u) = sigma2 u^2 / 2.
    #[arg(long)]
    sigma2: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum VariantArg {
    Paper,
    LaplaceDerived,
    Both,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// CSV of E[I^{-z}(t)]: header `t,re[,im]`, optional `# exponent=<e>` line.
    #[arg(long)]
    curve_f: Option<PathBuf>,
    /// CSV of the dual curve E[I^{z-1}(t)].
    #[arg(long)]
    curve_g: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// Jump intensity of a compound Poisson process.
    #[arg(long)]
    cp_lambda: Option<f64>,
}

#[derive(Args)]
struct McArgs {
    /// `gamma`, `drift:<d>`, `brownian:<sigma2>`, `cp:<rate>:<law>`,
    /// `symcp:<rate>:<law>` or `truncated:<eps>:<phi>`.
    #[arg(long)]
    process: Option<String>,
    /// Killing rate.
    #[arg(long)]
    q: Option<f64>,
    /// Repeatable; `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Grid step of the gridded processes.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SchemeArg {
    GridJumps,
    Bridge,
}

/// Failure of a command, mapped onto the exit codes.
enum Failure {
    Numeric(Error),
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn body(&self) -> ErrorBody {
        let (kind, exit_code, message) = match self {
            Failure::Numeric(e) if e.is_domain() => ("domain", 2, e.to_string()),
            Failure::Numeric(e) => ("convergence", 3, e.to_string()),
            Failure::Usage(m) => ("domain", 2, m.clone()),
            Failure::Io(m) => ("io", 4, m.clone()),
        };
        ErrorBody { kind: kind.into(), exit_code, message }
    }
}

type CmdResult = Result<(), Failure>;

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}

fn complex(s: &str) -> Result<C64, Failure> {
    parse_complex(s).map_err(Failure::Usage)
}

fn horizons(t: Option<Vec<f64>>) -> Result<Vec<f64>, Failure> {
    let t = required(t, "t")?;
    if t.is_empty() {
        return Err(Failure::Usage("--t needs at least one value".into()));
    }
    Ok(t)
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct MomentRow {
    t: f64,
    z_re: f64,
    z_im: f64,
    value_re: f64,
    value_im: f64,
    terms_used: usize,
    tail_certificate: f64,
    converged: bool,
    warnings: String,
}

fn moment_row(t: f64, z: C64, r: SeriesResult<f64>) -> MomentRow {
    MomentRow {
        t,
        z_re: z.re,
        z_im: z.im,
        value_re: r.value.re,
        value_im: r.value.im,
        terms_used: r.terms_used,
        tail_certificate: r.tail_certificate,
        converged: r.converged,
        warnings: r.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(";"),
    }
}

fn cmd_moment(mut a: MomentArgs, cfg: &Config, sink: &Sink, warnings: &mut Vec<String>) -> CmdResult {
    merge(&mut a.phi, cfg, "phi", warnings).map_err(Failure::Usage)?;
    merge(&mut a.z, cfg, "z", warnings).map_err(Failure::Usage)?;
    merge(&mut a.t, cfg, "t", warnings).map_err(Failure::Usage)?;
    merge(&mut a.tol, cfg, "tol", warnings).map_err(Failure::Usage)?;
    merge(&mut a.k_max, cfg, "k_max", warnings).map_err(Failure::Usage)?;
    merge_flag(&mut a.allow_unconverged, cfg, "allow_unconverged").map_err(Failure::Usage)?;
    merge_flag(&mut a.no_hypothesis_check, cfg, "no_hypothesis_check").map_err(Failure::Usage)?;

    let spec: Bernstein = required(a.phi, "phi")?.parse()?;
    let z = complex(&required(a.z, "z")?)?;
    let ts = horizons(a.t)?;
    let mut opts = SeriesOptions::default();
    if let Some(tol) = a.tol {
        opts.tol = tol;
    }
    if let Some(k) = a.k_max {
        opts.k_max = k;
    }
    opts.allow_unconverged = a.allow_unconverged;
    opts.check_hypotheses = !a.no_hypothesis_check;

    // negative integers have the shorter single-sum form when phi(0) = 0
    let neg_int = (z.im == 0.0 && z.re < 0.0 && z.re.fract() == 0.0).then_some(z.re as i64);
    let mut rows = Vec::new();
    let direct = match neg_int {
        Some(l) => ts.iter().map(|&t| neg_int_moment(&spec, l, t, &opts)).collect::<Result<Vec<_>, _>>(),
        None => Err(Error::Domain(String::new())),
    };
    let results = match direct {
        Ok(r) => r,
        Err(e) if neg_int.is_some() && !e.is_domain() => return Err(e.into()),
        Err(_) => moments(&spec, z, &ts, &opts)?,
    };
    for (t, r) in ts.iter().zip(results) {
        rows.push(moment_row(*t, z, r));
    }
    sink.emit("moment", rows, std::mem::take(warnings))?;
    Ok(())
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct BgammaRow {
    z_re: f64,
    z_im: f64,
    w_re: f64,
    w_im: f64,
    ln_w_re: f64,
    ln_w_im: f64,
    gamma_phi: f64,
}

fn cmd_bgamma(mut a: BgammaArgs, cfg: &Config, sink: &Sink, warnings: &mut Vec<String>) -> CmdResult {
    merge(&mut a.phi, cfg, "phi", warnings).map_err(Failure::Usage)?;
    merge(&mut a.z, cfg, "z", warnings).map_err(Failure::Usage)?;
    let spec: Bernstein = required(a.phi, "phi")?.parse()?;
    let g = gamma_phi(&spec)?;
    let mut rows = Vec::new();
    for s in required(a.z, "z")? {
        let z = complex(&s)?;
        let l = ln_w(&spec, z)?;
        let w = eval_w(&spec, z).unwrap_or(C64::new(f64::INFINITY, 0.0));
        rows.push(BgammaRow {
            z_re: z.re,
            z_im: z.im,
            w_re: w.re,
            w_im: w.im,
            ln_w_re: l.re,
            ln_w_im: l.im,
            gamma_phi: g,
        });
    }
    sink.emit("bgamma", rows, std::mem::take(warnings))?;
    Ok(())
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct ZetaRow {
    s: f64,
    value: f64,
}

fn cmd_zeta(mut a: ZetaArgs, cfg: &Config, sink: &Sink, warnings: &mut Vec<String>) -> CmdResult {
    merge(&mut a.s, cfg, "s", warnings).map_err(Failure::Usage)?;
    let rows = required(a.s, "s")?
        .into_iter()
        .map(|s| Ok(ZetaRow { s, value: zeta(s)? }))
        .collect::<Result<Vec<_>, Failure>>()?;
    sink.emit("zeta", rows, std::mem::take(warnings))?;
    Ok(())
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct SymmetricRow {
    t: f64,
    value: f64,
    variant: Option<String>,
}

fn psi_values(p: PsiSource, n: usize, cfg: &Config, warnings: &mut Vec<String>) -> Result<Vec<f64>, Failure> {
    let (mut psi, mut sigma2) = (p.psi, p.sigma2);
    if psi.is_none() && sigma2.is_none() {
        merge(&mut psi, cfg, "psi", warnings).map_err(Failure::Usage)?;
        merge(&mut sigma2, cfg, "sigma2", warnings).map_err(Failure::Usage)?;
    }
    match (psi, sigma2) {
        (Some(_), Some(_)) => Err(Failure::Usage("give either --psi or --sigma2".into())),
        (Some(v), None) if v.len() >= n => Ok(v[..n].to_vec()),
        (Some(v), None) => Err(Failure::Usage(format!("--psi needs {n} values, got {}", v.len()))),
        (None, Some(s2)) if s2 > 0.0 => Ok((1..=n).map(|k| 0.5 * s2 * (k as f64 - 0.5).powi(2)).collect()),
        (None, Some(_)) => Err(Failure::Usage("--sigma2 must be > 0".into())),
        (None, None) => Err(Failure::Usage("missing --psi or --sigma2".into())),
    }
}

fn cmd_symmetric(which: SymmetricCommand, cfg: &Config, sink: &Sink, warnings: &mut Vec<String>) -> CmdResult {
    let mut rows = Vec::new();
    let row = |t, value, variant: Option<&str>| SymmetricRow { t, value, variant: variant.map(str::to_string) };
    match which {
        SymmetricCommand::HalfNeg { mut t } => {
            merge(&mut t, cfg, "t", warnings).map_err(Failure::Usage)?;
            for t in horizons(t)? {
                rows.push(row(t, half_neg_moment(t)?, None));
            }
        }
        SymmetricCommand::CpHalfNeg { mut lambda, mut t, mut variant } => {
            merge(&mut lambda, cfg, "lambda", warnings).map_err(Failure::Usage)?;
            merge(&mut t, cfg, "t", warnings).map_err(Failure::Usage)?;
            merge(&mut variant, cfg, "variant", warnings).map_err(Failure::Usage)?;
            let lambda = required(lambda, "lambda")?;
            let variants: &[(CpVariant, &str)] = match variant.unwrap_or(VariantArg::Both) {
                VariantArg::Paper => &[(CpVariant::Paper, "paper")],
                VariantArg::LaplaceDerived => &[(CpVariant::LaplaceDerived, "laplace_derived")],
                VariantArg::Both => &[(CpVariant::Paper, "paper"), (CpVariant::LaplaceDerived, "laplace_derived")],
            };
            for t in horizons(t)? {
                for &(v, name) in variants {
                    rows.push(row(t, cp_half_neg_moment(lambda, t, v)?, Some(name)));
                }
            }
        }
        SymmetricCommand::HalfPos { psi, mut t } => {
            merge(&mut t, cfg, "t", warnings).map_err(Failure::Usage)?;
            let a = psi_values(psi, 1, cfg, warnings)?[0];
            for t in horizons(t)? {
                rows.push(row(t, half_pos_moment(a, t)?, None));
            }
        }
        SymmetricCommand::NMinusHalf { mut n, psi, mut t, mut cells } => {
            merge(&mut n, cfg, "n", warnings).map_err(Failure::Usage)?;
            merge(&mut t, cfg, "t", warnings).map_err(Failure::Usage)?;
            merge(&mut cells, cfg, "cells", warnings).map_err(Failure::Usage)?;
            let n = required(n, "n")?;
            let psi = psi_values(psi, n, cfg, warnings)?;
            for t in horizons(t)? {
                let grid = ConvolutionGrid { span: t, cells: cells.unwrap_or(ConvolutionGrid::<f64>::DEFAULT_CELLS) };
                rows.push(row(t, n_minus_half_moment(&psi, t, grid)?, None));
            }
        }
    }
    sink.emit("symmetric", rows, std::mem::take(warnings))?;
    Ok(())
}

/// Reads `t,re[,im]` rows; a comment line `# exponent=<e>` sets the
/// singularity exponent (default 0).
fn read_curve(path: &PathBuf) -> Result<TabulatedFunction<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut exponent = 0.0;
    let mut body = String::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(c) = trimmed.strip_prefix('#') {
            if let Some(v) = c.trim().strip_prefix("exponent=") {
                exponent = v.trim().parse().map_err(|_| Failure::Usage(format!("bad exponent {v:?}")))?;
            }
        } else if !trimmed.is_empty() {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let bad = |e: csv::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let headers = reader.headers().map_err(bad)?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (it, ire) = match (col("t"), col("re")) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Failure::Usage(format!("{}: header must contain t and re", path.display()))),
    };
    let iim = col("im");
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    for rec in reader.records() {
        let rec = rec.map_err(bad)?;
        let num = |i: usize| -> Result<f64, Failure> {
            rec.get(i)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{}: bad number in row {:?}", path.display(), rec)))
        };
        ts.push(num(it)?);
        vs.push(C64::new(
            num(ire)?,
            match iim {
                Some(i) => num(i)?,
                None => 0.0,
            },
        ));
    }
    Ok(TabulatedFunction::new(ts, vs, exponent)?)
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct IdentityRow {
    t: f64,
    z_re: f64,
    z_im: f64,
    lhs_re: f64,
    lhs_im: f64,
    rhs_re: f64,
    rhs_im: f64,
    abs_residual: f64,
    rel_residual: f64,
}

fn cmd_verify(mut a: VerifyArgs, cfg: &Config, sink: &Sink, warnings: &mut Vec<String>) -> CmdResult {
    merge(&mut a.z, cfg, "z", warnings).map_err(Failure::Usage)?;
    merge(&mut a.curve_f, cfg, "curve_f", warnings).map_err(Failure::Usage)?;
    merge(&mut a.curve_g, cfg, "curve_g", warnings).map_err(Failure::Usage)?;
    merge(&mut a.t, cfg, "t", warnings).map_err(Failure::Usage)?;
    merge(&mut a.cp_lambda, cfg, "cp_lambda", warnings).map_err(Failure::Usage)?;
    let z = complex(&required(a.z, "z")?)?;
    let f = read_curve(&required(a.curve_f, "curve-f")?)?;
    let g = read_curve(&required(a.curve_g, "curve-g")?)?;
    let mut rows = Vec::new();
    for t in horizons(a.t)? {
        let r = verify_identity(&f, &g, z, t, a.cp_lambda)?;
        rows.push(IdentityRow {
            t,
            z_re: z.re,
            z_im: z.im,
            lhs_re: r.lhs.re,
            lhs_im: r.lhs.im,
            rhs_re: r.rhs.re,
            rhs_im: r.rhs.im,
            abs_residual: r.abs_residual,
            rel_residual: r.rel_residual,
        });
    }
    sink.emit("verify-conv", rows, std::mem::take(warnings))?;
    Ok(())
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct McRow {
    z_re: f64,
    z_im: f64,
    t: f64,
    mean_re: f64,
    mean_im: f64,
    stderr: f64,
    n_paths: usize,
    seed: u64,
    scheme: String,
}

fn cmd_mc(mut a: McArgs, cfg: &Config, sink: &Sink, warnings: &mut Vec<String>) -> CmdResult {
    merge(&mut a.process, cfg, "process", warnings).map_err(Failure::Usage)?;
    merge(&mut a.q, cfg, "q", warnings).map_err(Failure::Usage)?;
    merge(&mut a.z, cfg, "z", warnings).map_err(Failure::Usage)?;
    merge(&mut a.t, cfg, "t", warnings).map_err(Failure::Usage)?;
    merge(&mut a.paths, cfg, "paths", warnings).map_err(Failure::Usage)?;
    merge(&mut a.seed, cfg, "seed", warnings).map_err(Failure::Usage)?;
    merge(&mut a.scheme, cfg, "scheme", warnings).map_err(Failure::Usage)?;
    merge(&mut a.step, cfg, "step", warnings).map_err(Failure::Usage)?;
    let spec = parse_process(&required(a.process, "process")?, a.q.unwrap_or(0.0))?;
    let zs = required(a.z, "z")?.iter().map(|s| complex(s)).collect::<Result<Vec<_>, _>>()?;
    let ts = horizons(a.t)?;
    let paths = a.paths.unwrap_or(100_000);
    if paths < 100 {
        return Err(Failure::Usage("--paths must be at least 100".into()));
    }
    let defaults = SimControl::for_kind(&spec.kind, SimControl::default().seed);
    let ctrl = SimControl {
        step: a.step.unwrap_or(defaults.step),
        seed: a.seed.unwrap_or(defaults.seed),
        gamma_scheme: match a.scheme {
            Some(SchemeArg::GridJumps) => GammaScheme::GridJumps,
            Some(SchemeArg::Bridge) | None => GammaScheme::Bridge,
        },
    };
    let est = mc_moments(&spec, &zs, &ts, paths, &ctrl)?;
    let mut rows = Vec::new();
    for (zi, z) in zs.iter().enumerate() {
        for (ti, &t) in ts.iter().enumerate() {
            let e = &est[zi][ti];
            for w in &e.warnings {
                warnings.push(format!("z = {z}, t = {t}: {w}"));
            }
            rows.push(McRow {
                z_re: z.re,
                z_im: z.im,
                t,
                mean_re: e.mean.re,
                mean_im: e.mean.im,
                stderr: e.stderr,
                n_paths: e.n_paths,
                seed: e.seed,
                scheme: e.scheme.clone(),
            });
        }
    }
    sink.emit("mc", rows, std::mem::take(warnings))?;
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let cfg = match &cli.config {
        Some(p) => config::load(p).map_err(Failure::Io)?,
        None => Config::new(),
    };
    let sink = Sink { format: cli.format, path: cli.output };
    let mut warnings = Vec::new();
    match cli.command {
        Command::Moment(a) => cmd_moment(a, &cfg, &sink, &mut warnings),
        Command::Bgamma(a) => cmd_bgamma(a, &cfg, &sink, &mut warnings),
        Command::Zeta(a) => cmd_zeta(a, &cfg, &sink, &mut warnings),
        Command::Symmetric { which } => cmd_symmetric(which, &cfg, &sink, &mut warnings),
        Command::VerifyConv(a) => cmd_verify(a, &cfg, &sink, &mut warnings),
        Command::Mc(a) => cmd_mc(a, &cfg, &sink, &mut warnings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let body = f.body();
            let code = body.exit_code;
            let doc = ErrorDocument { schema_version: SCHEMA_VERSION, error: body };
            eprintln!("{}", serde_json::to_string(&doc).unwrap_or_default());
            ExitCode::from(code as u8)
        }
    }
}
