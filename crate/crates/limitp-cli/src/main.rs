//! Command-line front end: parse a tuple configuration, run one computation
//! or sieve experiment, emit machine-readable rows (CSV or JSON).
//!
//! Exit codes: 0 success, 1 I/O failure or empty report, 2 usage error,
//! 3 capacity/overflow, 4 inadmissible configuration where the computation
//! requires admissibility.

mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use limitp::arith::set_default_segment_len;
use limitp::empirical::{
    bdh_quadratic_mean, dft_identity_check, kfree_approx_distance, mean_sum, prime_sum,
    residue_class_errors,
};
use limitp::global::{
    natural_density, prime_constant, prime_constant_series, singular_series_partial,
};
use limitp::local::{admissibility, local_data};
use limitp::{Error as LibError, TupleConfig};
use report::{emit_csv, emit_json, Row};

#[derive(Parser)]
#[command(
    name = "limitp",
    version,
    about = "Densities, Euler-product constants and sieve experiments for tuples of shifted k-free numbers",
    after_help = "The tuple is given as repeated --pair A:R (meaning the factor kfree_R(n+A)).\n\
                  LIMITP_SEGMENT_SIZE overrides the sieve segment size (integers per segment)."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prime-sum constant: Euler product, cross-checked by its series form
    Constant(CommonArgs),
    /// Natural density of the tuple set vs the singular-series partial sum
    Density(CommonArgs),
    /// Per-prime local data (covered counts, correction, pair correlations)
    Local(CommonArgs),
    /// Singular-series partial sums on a grid of cutoffs up to Q
    Singular(CommonArgs),
    /// Sieve experiment: sum of f over primes vs both normalizations
    Verify(CommonArgs),
    /// Residue-class counts and error terms at modulus q
    Residue(CommonArgs),
    /// Quadratic mean of progression error terms over moduli up to Q
    Bdh(CommonArgs),
    /// Exact discrete-transform check of the prime-sum identity
    #[command(name = "dft-check")]
    DftCheck(CommonArgs),
    /// Distance of the smooth k-free approximation from the exact indicator
    Approx(CommonArgs),
}

impl Cmd {
    fn args(&self) -> &CommonArgs {
        match self {
            Cmd::Constant(a)
            | Cmd::Density(a)
            | Cmd::Local(a)
            | Cmd::Singular(a)
            | Cmd::Verify(a)
            | Cmd::Residue(a)
            | Cmd::Bdh(a)
            | Cmd::DftCheck(a)
            | Cmd::Approx(a) => a,
        }
    }
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Tuple pair "alpha:r" (repeatable); r must be at least 2
    #[arg(long = "pair", value_name = "A:R", value_parser = parse_pair)]
    pairs: Vec<(u64, u32)>,

    /// Sample limit for sieve experiments
    #[arg(short = 'x', long = "limit", value_name = "N")]
    x: Option<u64>,

    /// Modulus for residue-class commands
    #[arg(short = 'q', long = "modulus", value_name = "N")]
    modulus: Option<u64>,

    /// Series / quadratic-mean cutoff
    #[arg(short = 'Q', long = "series-cutoff", value_name = "N")]
    series_cutoff: Option<u64>,

    /// Euler-product truncation: primes up to P enter the products
    #[arg(short = 'P', long = "prime-cutoff", value_name = "N")]
    prime_cutoff: Option<u64>,

    /// Exponent k for the approx command
    #[arg(long, value_name = "K")]
    k: Option<u32>,

    /// Smoothness bound y for the approx command
    #[arg(long, value_name = "Y")]
    y: Option<u64>,

    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Output path; stdout when omitted
    #[arg(short = 'o', long = "output", value_name = "PATH")]
    output: Option<PathBuf>,

    /// Config file: key=value lines plus repeated pair=A:R lines
    #[arg(long = "config", value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn parse_pair(s: &str) -> Result<(u64, u32), String> {
    let (a, r) = s
        .split_once(':')
        .ok_or_else(|| format!("expected A:R, got {s:?}"))?;
    let alpha: u64 = a.trim().parse().map_err(|_| format!("bad shift {a:?}"))?;
    let r: u32 = r
        .trim()
        .parse()
        .map_err(|_| format!("bad exponent {r:?}"))?;
    if r < 2 {
        return Err(format!("exponent must be at least 2, got {r}"));
    }
    Ok((alpha, r))
}

/// Fully resolved run configuration: defaults, then config file, then flags.
struct RunConfig {
    tuple: Option<TupleConfig>,
    x: u64,
    modulus: u64,
    series_cutoff: u64,
    prime_cutoff: Option<u64>,
    k: u32,
    y: u64,
    format: FormatArg,
    output: Option<PathBuf>,
}

#[derive(Default)]
struct FilePrefs {
    pairs: Vec<(u64, u32)>,
    x: Option<u64>,
    modulus: Option<u64>,
    series_cutoff: Option<u64>,
    prime_cutoff: Option<u64>,
    k: Option<u32>,
    y: Option<u64>,
    format: Option<FormatArg>,
    output: Option<PathBuf>,
}

fn load_config_file(path: &PathBuf) -> Result<FilePrefs, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut prefs = FilePrefs::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got {raw:?}", idx + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| format!("line {}: bad {what} value {value:?}", idx + 1);
        match key {
            "pair" => prefs
                .pairs
                .push(parse_pair(value).map_err(|e| format!("line {}: {e}", idx + 1))?),
            "x" => prefs.x = Some(value.parse().map_err(|_| bad("x"))?),
            "q" => prefs.modulus = Some(value.parse().map_err(|_| bad("q"))?),
            "Q" => prefs.series_cutoff = Some(value.parse().map_err(|_| bad("Q"))?),
            "P" => prefs.prime_cutoff = Some(value.parse().map_err(|_| bad("P"))?),
            "k" => prefs.k = Some(value.parse().map_err(|_| bad("k"))?),
            "y" => prefs.y = Some(value.parse().map_err(|_| bad("y"))?),
            "format" => {
                prefs.format = Some(match value {
                    "csv" => FormatArg::Csv,
                    "json" => FormatArg::Json,
                    _ => return Err(bad("format")),
                })
            }
            "output" => prefs.output = Some(PathBuf::from(value)),
            _ => return Err(format!("line {}: unknown key {key:?}", idx + 1)),
        }
    }
    Ok(prefs)
}

fn resolve(args: &CommonArgs) -> Result<RunConfig, String> {
    let file = match &args.config {
        Some(path) => load_config_file(path)?,
        None => FilePrefs::default(),
    };
    let pairs = if !args.pairs.is_empty() {
        args.pairs.clone()
    } else {
        file.pairs
    };
    let tuple = if pairs.is_empty() {
        None
    } else {
        Some(TupleConfig::new(pairs).map_err(|e| e.to_string())?)
    };
    Ok(RunConfig {
        tuple,
        x: args.x.or(file.x).unwrap_or(1_000_000),
        modulus: args.modulus.or(file.modulus).unwrap_or(4),
        series_cutoff: args.series_cutoff.or(file.series_cutoff).unwrap_or(1000),
        prime_cutoff: args.prime_cutoff.or(file.prime_cutoff),
        k: args.k.or(file.k).unwrap_or(2),
        y: args.y.or(file.y).unwrap_or(3),
        format: args.format.or(file.format).unwrap_or(FormatArg::Csv),
        output: args.output.clone().or(file.output),
    })
}

fn tuple_of(rc: &RunConfig) -> Result<&TupleConfig, String> {
    rc.tuple
        .as_ref()
        .ok_or_else(|| "at least one --pair A:R (or a config-file pair= line) is required".into())
}

fn admissibility_note(config: &TupleConfig) -> Result<String, LibError> {
    let adm = admissibility(config)?;
    Ok(match (adm.covering_prime, adm.unit_covering_prime) {
        (Some(p), _) => format!("INADMISSIBLE: residues covered at p={p}, tuple set is empty"),
        (None, Some(p)) => {
            format!("constant vanishes: units covered at p={p}; tuple set still infinite")
        }
        (None, None) => "admissible".to_string(),
    })
}

/// Geometric grid 1, 3, 10, 30, ... capped at `limit`, always ending at it.
fn grid(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut base = 1u64;
    loop {
        for m in [1u64, 3] {
            let v = base.saturating_mul(m);
            if v < limit {
                out.push(v);
            }
        }
        match base.checked_mul(10) {
            Some(b) if b <= limit => base = b,
            _ => break,
        }
    }
    out.push(limit);
    out.dedup();
    out
}

fn run_command(cmd: &Cmd, rc: &RunConfig) -> Result<Vec<Row>, LibError> {
    let mut rows = Vec::new();
    match cmd {
        Cmd::Constant(_) => {
            let config = rc.tuple.as_ref().expect("validated");
            let p_limit = rc.prime_cutoff.unwrap_or(1_000_000);
            let adm = admissibility_note(config)?;
            let product = prime_constant(config, p_limit)?;
            let series = prime_constant_series(config, rc.series_cutoff, p_limit)?;
            rows.push(Row::new(
                p_limit,
                product.value,
                series.value,
                product.tail_bound,
                format!(
                    "prime-sum constant for {config}: Euler product (observed) vs series at Q={} \
                     (predicted, reported series tail {:.3e}); {adm}",
                    rc.series_cutoff, series.reported_tail
                ),
            ));
        }
        Cmd::Density(_) => {
            let config = rc.tuple.as_ref().expect("validated");
            let p_limit = rc.prime_cutoff.unwrap_or(1_000_000);
            let adm_text = admissibility_note(config)?;
            let density = natural_density(config, p_limit)?;
            let nonempty = admissibility(config)?.nonempty;
            let partial = if nonempty {
                singular_series_partial(config, rc.series_cutoff, p_limit)?.partial_sum
            } else {
                0.0
            };
            rows.push(Row::new(
                p_limit,
                density.value,
                partial,
                density.tail_bound,
                format!(
                    "tuple-set density for {config}: Euler product (observed) vs singular-series \
                     partial sum at Q={} (predicted); {adm_text}",
                    rc.series_cutoff
                ),
            ));
        }
        Cmd::Local(_) => {
            let config = rc.tuple.as_ref().expect("validated");
            let p_limit = rc.prime_cutoff.unwrap_or(50);
            for p in limitp::arith::primes_up_to(p_limit)? {
                let data = local_data(p, config)?;
                let correction = data
                    .correction
                    .as_ref()
                    .map(|z| z.to_string())
                    .unwrap_or_else(|| "none (covered)".into());
                let pair_corrs: Vec<String> = data
                    .pair_correlations
                    .iter()
                    .map(|h| h.to_string())
                    .collect();
                rows.push(Row::new(
                    p,
                    data.counts.covered as f64,
                    data.counts.covered_units as f64,
                    0.0,
                    format!(
                        "local data for {config} at p={p}: covered (observed) and covered units \
                         (predicted) out of p^{}; correction={correction}; pair_correlations=[{}]",
                        config.r_max(),
                        pair_corrs.join(", ")
                    ),
                ));
            }
        }
        Cmd::Singular(_) => {
            let config = rc.tuple.as_ref().expect("validated");
            let p_limit = rc.prime_cutoff.unwrap_or(1_000_000);
            for q_limit in grid(rc.series_cutoff) {
                let s = singular_series_partial(config, q_limit, p_limit)?;
                rows.push(Row::new(
                    q_limit,
                    s.partial_sum,
                    s.target,
                    0.0,
                    format!(
                        "singular-series partial sum for {config} at Q={q_limit} (observed) vs \
                         the density it converges to (predicted)"
                    ),
                ));
            }
        }
        Cmd::Verify(_) => {
            let config = rc.tuple.as_ref().expect("validated");
            let p_limit = rc.prime_cutoff.unwrap_or(1_000_000);
            let adm = admissibility_note(config)?;
            for r in prime_sum(config, rc.x, p_limit)? {
                let mut row = Row::from_report(&r);
                row.notes = format!("{}; {adm}", row.notes);
                rows.push(row);
            }
        }
        Cmd::Residue(_) => {
            let config = rc.tuple.as_ref().expect("validated");
            let p_limit = rc.prime_cutoff.unwrap_or(1_000_000);
            let density = natural_density(config, p_limit)?;
            for s in residue_class_errors(config, rc.x, rc.modulus, p_limit)? {
                let eta = (s.count as f64 - s.e) / s.x as f64;
                rows.push(Row::new(
                    s.x,
                    s.count as f64 / s.x as f64,
                    eta,
                    density.tail_bound,
                    format!(
                        "class density of {config} for n = {} mod {} (observed) vs predicted \
                         class mean; count={}, error_term={:.6e}",
                        s.b, s.q, s.count, s.e
                    ),
                ));
            }
        }
        Cmd::Bdh(_) => {
            let config = rc.tuple.as_ref().expect("validated");
            let p_limit = rc.prime_cutoff.unwrap_or(1_000_000);
            for q_limit in grid(rc.series_cutoff.min(rc.x)) {
                let b = bdh_quadratic_mean(config, rc.x, q_limit, p_limit)?;
                rows.push(Row::new(
                    b.x,
                    b.class_sum,
                    q_limit as f64 * b.x as f64,
                    0.0,
                    format!(
                        "quadratic mean of progression errors for {config}, Q={q_limit}, \
                         classes counted once; ratio column = sum/(Qx)"
                    ),
                ));
                rows.push(Row::new(
                    b.x,
                    b.weighted_sum,
                    q_limit as f64 * b.x as f64,
                    0.0,
                    format!(
                        "quadratic mean of progression errors for {config}, Q={q_limit}, \
                         classes weighted by representatives up to x; ratio column = sum/(Qx)"
                    ),
                ));
            }
        }
        Cmd::DftCheck(_) => {
            let config = rc.tuple.as_ref().expect("validated");
            rows.push(Row::from_report(&dft_identity_check(config, rc.x)?));
        }
        Cmd::Approx(_) => {
            let r = kfree_approx_distance(rc.k, rc.y, rc.x)?;
            rows.push(Row::from_report(&r.to_report()));
        }
    }
    // the density command optionally appends the empirical mean when -x given
    if let (Cmd::Density(args), Some(config)) = (cmd, rc.tuple.as_ref()) {
        if args.x.is_some() {
            let p_limit = rc.prime_cutoff.unwrap_or(1_000_000);
            rows.push(Row::from_report(&mean_sum(config, rc.x, p_limit)?));
        }
    }
    Ok(rows)
}

fn lib_exit_code(e: &LibError) -> u8 {
    match e {
        LibError::InvalidInput(_) | LibError::OutOfRange { .. } => 2,
        LibError::Capacity { .. } | LibError::Overflow { .. } => 3,
        LibError::Inadmissible { .. } => 4,
    }
}

fn main() -> ExitCode {
    if let Ok(value) = std::env::var("LIMITP_SEGMENT_SIZE") {
        match value.parse::<usize>() {
            Ok(len) if len >= 64 => set_default_segment_len(len),
            _ => {
                eprintln!("limitp: LIMITP_SEGMENT_SIZE must be an integer >= 64, got {value:?}");
                return ExitCode::from(2);
            }
        }
    }

    let cli = Cli::parse(); // clap exits with code 2 on usage errors
    let args = cli.command.args().clone();
    let rc = match resolve(&args) {
        Ok(rc) => rc,
        Err(msg) => {
            eprintln!("limitp: {msg}");
            return ExitCode::from(2);
        }
    };
    if !matches!(cli.command, Cmd::Approx(_)) {
        if let Err(msg) = tuple_of(&rc) {
            eprintln!("limitp: {msg}");
            return ExitCode::from(2);
        }
    }

    let rows = match run_command(&cli.command, &rc) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("limitp: {e}");
            return ExitCode::from(lib_exit_code(&e));
        }
    };
    if rows.is_empty() {
        eprintln!("limitp: no rows produced");
        return ExitCode::from(1);
    }
    // the schema carries plain decimal floats; a non-finite tail bound means
    // the truncation was too small for a rigorous bound
    for r in &rows {
        let vals = [r.observed, r.predicted, r.ratio, r.tail_bound];
        if vals.iter().any(|v| !v.is_finite()) {
            eprintln!("limitp: no rigorous tail bound at this truncation; increase -P");
            return ExitCode::from(2);
        }
    }

    let text = match rc.format {
        FormatArg::Csv => emit_csv(&rows),
        FormatArg::Json => emit_json(&rows),
    };
    match &rc.output {
        None => {
            print!("{text}");
            if std::io::stdout().flush().is_err() {
                return ExitCode::from(1);
            }
        }
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("limitp: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}
