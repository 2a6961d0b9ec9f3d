use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use lgl_core::lucas::LucasParams;
use lgl_core::sieve::{self, RankTable};
use lgl_core::{construct, moments, rank, smooth, torus, Error, Result};

use crate::args::{Cli, Command, Format, GlobalOpts, ModeArg, SmoothModeArg};
use crate::svg::{self, ColorClass, PlotSeries};

pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    if cli.global.workers >= 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.workers)
            .build_global()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    }
    let params = LucasParams::new(cli.global.a1, cli.global.a2)?;
    let report = dispatch(&cli.global, &params, &cli.command)?;
    write_output(cli.global.output.as_deref(), &report)
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Fixed six decimals; empty cell for NaN.
fn f6(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.6}")
    }
}

fn e6(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.6e}")
    }
}

fn csv_into_string(wtr: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::Internal(format!("csv flush: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(format!("csv utf8: {e}")))
}

/// Table acquisition: explicit snapshot file beats LGL_SNAPSHOT_DIR beats a
/// plain in-memory build.
fn table_for(
    global: &GlobalOpts,
    params: &LucasParams,
    n: u64,
    segment: Option<usize>,
) -> Result<RankTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("table size must satisfy N >= 1".into()));
    }
    let snapshot_path: Option<PathBuf> = match &global.snapshot {
        Some(p) => Some(p.clone()),
        None => std::env::var_os("LGL_SNAPSHOT_DIR").map(|dir| {
            Path::new(&dir).join(format!("lgl-{}-{}.snapshot", params.a1, params.a2))
        }),
    };
    match snapshot_path {
        Some(path) => RankTable::load_or_build(params, n, &path),
        None => match segment {
            Some(s) => RankTable::build_with_segment(params, n, s),
            None => RankTable::build(params, n),
        },
    }
}

fn dispatch(global: &GlobalOpts, params: &LucasParams, cmd: &Command) -> Result<String> {
    match cmd {
        Command::Rank { m } => run_rank(params, *m),
        Command::Sieve { n, dump, segment } => run_sieve(global, params, *n, *dump, *segment),
        Command::Moments { x, lambda, checkpoints } => {
            run_moments(global, params, *x, *lambda, checkpoints)
        }
        Command::BzEvidence { t_min, t_max, grey, black, points_per_decade, format } => {
            run_bz(global, params, *t_min, *t_max, grey, black, *points_per_decade, *format)
        }
        Command::Pseudoprimes { y, z, r, mode, v, budget, target_x } => {
            run_pseudoprimes(params, *y, *z, *r, *mode, *v, *budget, *target_x)
        }
        Command::Smooth { mode, x, y, beta, a } => run_smooth(params, *mode, *x, *y, *beta, *a),
        Command::Torus { b, x, y, prime_cap } => run_torus(*b, *x, *y, *prime_cap),
        Command::GcdLarge { x, t, list_self_dividing } => {
            run_gcd_large(global, params, *x, *t, *list_self_dividing)
        }
    }
}

#[derive(Serialize)]
struct RankOut {
    m: u64,
    z: u64,
    ell: u64,
}

fn run_rank(params: &LucasParams, m: u64) -> Result<String> {
    let z = rank::rank(params, m)?.z;
    let ell = rank::ell(params, m)?;
    let out = RankOut { m, z, ell };
    Ok(format!("{}\n", serde_json::to_string(&out).expect("plain struct")))
}

#[derive(Serialize)]
struct SieveSummary {
    n: u64,
    a1: i64,
    a2: i64,
    defined: u64,
    z_max: u64,
    g_max: u64,
    self_dividing: u64,
}

fn run_sieve(
    global: &GlobalOpts,
    params: &LucasParams,
    n: u64,
    dump: bool,
    segment: Option<usize>,
) -> Result<String> {
    let table = table_for(global, params, n, segment)?;
    if dump {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["n", "z", "g", "omega"]).map_err(csv_err)?;
        for i in 1..=n as usize {
            wtr.write_record([
                i.to_string(),
                table.z[i].to_string(),
                table.g[i].to_string(),
                table.omega[i].to_string(),
            ])
            .map_err(csv_err)?;
        }
        return csv_into_string(wtr);
    }
    // the table may come from a snapshot covering more than n; summarize
    // only the requested range
    let head = 1..=n as usize;
    let defined = table.z[head.clone()].iter().filter(|&&z| z != 0).count() as u64;
    let summary = SieveSummary {
        n,
        a1: params.a1,
        a2: params.a2,
        defined,
        z_max: table.z[head.clone()].iter().copied().max().unwrap_or(0),
        g_max: table.g[head].iter().copied().max().unwrap_or(0),
        self_dividing: table.enumerate_self_dividing(n)?.len() as u64,
    };
    Ok(format!("{}\n", serde_json::to_string(&summary).expect("plain struct")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Internal(format!("csv write: {e}"))
}

fn run_moments(
    global: &GlobalOpts,
    params: &LucasParams,
    x: u64,
    lambda: u32,
    checkpoints: &[u64],
) -> Result<String> {
    let points: Vec<u64> = if checkpoints.is_empty() {
        if x == 0 {
            return Err(Error::InvalidArgument(
                "moments needs --x >= 1 or a --checkpoints list".into(),
            ));
        }
        vec![x]
    } else {
        checkpoints.to_vec()
    };
    let top = *points.last().expect("nonempty");
    let table = table_for(global, params, top, None)?;
    let report = moments::moment_report(&table, &points, lambda)?;

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["x", "lambda", "moment_sum", "log_moment_sum", "implied_exponent", "mean_log_g"])
        .map_err(csv_err)?;
    for (i, &cx) in report.checkpoints.iter().enumerate() {
        wtr.write_record([
            cx.to_string(),
            report.lambda.to_string(),
            report.sums[i].to_string(),
            f6(report.log_sums[i]),
            f6(report.implied_exponents[i]),
            f6(report.mean_log_g[i]),
        ])
        .map_err(csv_err)?;
    }
    csv_into_string(wtr)
}

fn parse_z_range(text: &str) -> Result<(u64, u64)> {
    let err = || {
        Error::InvalidArgument(format!(
            "z range must look like lo-hi with 1 <= lo <= hi, got {text:?}"
        ))
    };
    let (lo, hi) = text.split_once('-').ok_or_else(err)?;
    let lo: u64 = lo.trim().parse().map_err(|_| err())?;
    let hi: u64 = hi.trim().parse().map_err(|_| err())?;
    if lo == 0 || lo > hi {
        return Err(err());
    }
    Ok((lo, hi))
}

#[derive(Serialize)]
struct BzPointOut {
    t: u64,
    count: u64,
    ordinate: Option<f64>,
}

#[derive(Serialize)]
struct BzSeriesOut {
    class: &'static str,
    z: u64,
    points: Vec<BzPointOut>,
}

#[allow(clippy::too_many_arguments)]
fn run_bz(
    global: &GlobalOpts,
    params: &LucasParams,
    t_min: u64,
    t_max: u64,
    grey: &str,
    black: &str,
    points_per_decade: u32,
    format: Format,
) -> Result<String> {
    let (glo, ghi) = parse_z_range(grey)?;
    let (blo, bhi) = parse_z_range(black)?;
    let zs: Vec<u64> = (glo..=ghi).chain(blo..=bhi).collect();
    let checkpoints = sieve::default_checkpoints(t_min, t_max, points_per_decade)?;
    let table = table_for(global, params, t_max, None)?;
    let series = sieve::bz_counts(&table, &zs, &checkpoints)?;
    let class_of = |z: u64| if (glo..=ghi).contains(&z) { "grey" } else { "black" };

    match format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["class", "z", "t", "count", "ordinate"]).map_err(csv_err)?;
            for s in &series {
                for (i, &t) in s.checkpoints.iter().enumerate() {
                    wtr.write_record([
                        class_of(s.z).to_string(),
                        s.z.to_string(),
                        t.to_string(),
                        s.counts[i].to_string(),
                        s.ordinates[i].map(f6).unwrap_or_default(),
                    ])
                    .map_err(csv_err)?;
                }
            }
            csv_into_string(wtr)
        }
        Format::Json => {
            let mut out = String::new();
            for s in &series {
                let line = BzSeriesOut {
                    class: class_of(s.z),
                    z: s.z,
                    points: s
                        .checkpoints
                        .iter()
                        .enumerate()
                        .map(|(i, &t)| BzPointOut {
                            t,
                            count: s.counts[i],
                            ordinate: s.ordinates[i],
                        })
                        .collect(),
                };
                out.push_str(&serde_json::to_string(&line).expect("plain struct"));
                out.push('\n');
            }
            Ok(out)
        }
        Format::Svg => {
            let plot: Vec<PlotSeries> = series
                .iter()
                .map(|s| PlotSeries {
                    label: format!("z={}", s.z),
                    class: if class_of(s.z) == "grey" { ColorClass::Grey } else { ColorClass::Black },
                    points: s
                        .checkpoints
                        .iter()
                        .enumerate()
                        .filter_map(|(i, &t)| s.ordinates[i].map(|v| (t, v)))
                        .collect(),
                })
                .collect();
            svg::render_bz_plot(&plot, t_min, t_max)
        }
    }
}

#[derive(Serialize)]
struct CertOut<'a> {
    n: String,
    y: f64,
    r: usize,
    mode: String,
    s_primes: &'a [u64],
    verified: bool,
}

#[allow(clippy::too_many_arguments)]
fn run_pseudoprimes(
    params: &LucasParams,
    y: Option<f64>,
    z: Option<f64>,
    r: usize,
    mode: ModeArg,
    v: f64,
    budget: usize,
    target_x: Option<f64>,
) -> Result<String> {
    let mode = match mode {
        ModeArg::Conditional => construct::HarvestMode::Conditional,
        ModeArg::Unconditional => construct::HarvestMode::Unconditional,
    };
    let cfg = match target_x {
        Some(tx) => construct::HarvestConfig::for_target(tx, mode, v)?,
        None => {
            let y = y.ok_or_else(|| {
                Error::InvalidArgument("--y is required unless --target-x derives it".into())
            })?;
            let z = z.ok_or_else(|| {
                Error::InvalidArgument("--z is required unless --target-x derives it".into())
            })?;
            construct::HarvestConfig::new(y, z, r, v, mode)?
        }
    };
    let primes = construct::harvest(params, &cfg)?;
    let certs = construct::assemble(params, &primes, cfg.r, cfg.y, budget, cfg.mode)?;
    let mut out = String::new();
    for c in &certs {
        let line = CertOut {
            n: c.n.to_string(),
            y: c.y,
            r: c.s_primes.len(),
            mode: c.mode.to_string(),
            s_primes: &c.s_primes,
            verified: c.verified,
        };
        out.push_str(&serde_json::to_string(&line).expect("plain struct"));
        out.push('\n');
    }
    Ok(out)
}

fn run_smooth(
    params: &LucasParams,
    mode: SmoothModeArg,
    x: u64,
    y: Option<u64>,
    beta: Option<f64>,
    a: u64,
) -> Result<String> {
    let need_y = || {
        y.ok_or_else(|| Error::InvalidArgument("this smooth mode needs a --y bound >= 1".into()))
    };
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "mode",
        "x",
        "y",
        "beta",
        "a",
        "count",
        "excluded",
        "u",
        "dickman_reference",
        "canonical_reference",
        "count_over_dickman",
        "near_u_regime",
    ])
    .map_err(csv_err)?;

    let blank = String::new();
    let record = match mode {
        SmoothModeArg::Psi => {
            let y = need_y()?;
            if x == 0 || y == 0 {
                return Err(Error::InvalidArgument("psi needs x >= 1 and y >= 1".into()));
            }
            let count = smooth::psi_count(x, y);
            let dickman = smooth::psi_dickman_reference(x, y);
            vec![
                "psi".into(),
                x.to_string(),
                y.to_string(),
                blank.clone(),
                blank.clone(),
                count.to_string(),
                blank.clone(),
                f6(smooth::smoothness_u(x, y)),
                e6(dickman),
                e6(smooth::psi_canonical_reference(x, y)),
                if dickman > 0.0 { f6(count as f64 / dickman) } else { blank.clone() },
                smooth::near_conjecture_regime(x, y).to_string(),
            ]
        }
        SmoothModeArg::Pi => {
            let y = need_y()?;
            let count = smooth::pi_smooth(x, y);
            vec![
                "pi".into(),
                x.to_string(),
                y.to_string(),
                blank.clone(),
                blank.clone(),
                count.to_string(),
                blank.clone(),
                f6(smooth::smoothness_u(x, y.max(2))),
                blank.clone(),
                blank.clone(),
                blank.clone(),
                blank.clone(),
            ]
        }
        SmoothModeArg::PiStar => {
            let y = need_y()?;
            let breakdown = smooth::pi_smooth_star_detailed(params, x, y);
            vec![
                "pi-star".into(),
                x.to_string(),
                y.to_string(),
                blank.clone(),
                blank.clone(),
                breakdown.count.to_string(),
                breakdown.excluded.to_string(),
                f6(smooth::smoothness_u(x, y.max(2))),
                blank.clone(),
                blank.clone(),
                blank.clone(),
                blank.clone(),
            ]
        }
        SmoothModeArg::Ap => {
            let beta = beta.ok_or_else(|| {
                Error::InvalidArgument("ap mode needs a --beta exponent > 0".into())
            })?;
            if beta <= 0.0 || !beta.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "ap mode needs a --beta exponent > 0, got {beta}"
                )));
            }
            if a == 0 {
                return Err(Error::InvalidArgument("ap mode needs --a >= 1".into()));
            }
            let count = smooth::smooth_ap_count(x, beta, a);
            vec![
                "ap".into(),
                x.to_string(),
                blank.clone(),
                f6(beta),
                a.to_string(),
                count.to_string(),
                blank.clone(),
                blank.clone(),
                blank.clone(),
                blank.clone(),
                blank.clone(),
                blank.clone(),
            ]
        }
    };
    wtr.write_record(&record).map_err(csv_err)?;
    csv_into_string(wtr)
}

fn run_torus(b: u64, x: u64, y: u64, prime_cap: Option<u64>) -> Result<String> {
    let report = match prime_cap {
        Some(cap) => torus::torus_average_sum_accelerated(b, x, y, cap)?,
        None => torus::torus_average_sum(b, x, y)?,
    };
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "b",
        "x",
        "y",
        "total",
        "x_log_x",
        "x_log_x_sq",
        "ratio_lower",
        "ratio_upper",
        "exact_path",
        "y_regime_ok",
    ])
    .map_err(csv_err)?;
    wtr.write_record([
        report.b.to_string(),
        report.x.to_string(),
        report.y.to_string(),
        f6(report.total),
        f6(report.lower_comparator),
        f6(report.upper_comparator),
        f6(report.ratio_lower),
        f6(report.ratio_upper),
        report.exact_path.to_string(),
        report.y_regime_ok.to_string(),
    ])
    .map_err(csv_err)?;
    csv_into_string(wtr)
}

#[derive(Serialize)]
struct GcdLargeOut {
    x: u64,
    t: f64,
    count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    self_dividing: Option<Vec<u64>>,
}

fn run_gcd_large(
    global: &GlobalOpts,
    params: &LucasParams,
    x: u64,
    t: f64,
    list_self_dividing: bool,
) -> Result<String> {
    let table = table_for(global, params, x, None)?;
    let out = GcdLargeOut {
        x,
        t,
        count: table.large_gcd_count(x, t)?,
        self_dividing: if list_self_dividing {
            Some(table.enumerate_self_dividing(x)?)
        } else {
            None
        },
    };
    Ok(format!("{}\n", serde_json::to_string(&out).expect("plain struct")))
}
