//! Command-line front end: configuration ingestion, subcommands, trace
//! emission. Numerical kernels stay in the library modules; this file only
//! orchestrates them and formats output.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::coefficients::{solve_coefficients_monitored, SlownessPoint};
use crate::config::ProblemConfig;
use crate::greens::{GreenBreakdown, GreenEvaluator, QuadSettings};
use crate::material::{derive_layer, project_source, DerivedLayer, ModalAmplitudes};
use crate::timeseries::{convolve_with_jumps, Trace};
use crate::validation::audit;
use crate::{Error, Incidence, Result};

#[derive(Parser)]
#[command(
    name = "porowave",
    version,
    about = "Exact transient waveforms for a bilayered poroelastic medium"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum IncidenceArg {
    Pf,
    Ps,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    /// Convolve the Green trace with the wavelet itself.
    Wavelet,
    /// Convolve with the wavelet time derivative.
    WaveletDerivative,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print derived model quantities and the six wave speeds.
    Material { config: PathBuf },
    /// Solve the interface system at one slowness point.
    Coeffs {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        qx_re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        qx_im: f64,
        #[arg(long, allow_hyphen_values = true)]
        qy: f64,
        #[arg(long, value_enum)]
        incidence: IncidenceArg,
    },
    /// Per-wave arrival-time table for every receiver.
    Times { config: PathBuf },
    /// Green-function traces, one file per receiver.
    Green {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Absolute quadrature tolerance per component.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Source-convolved seismograms, one file per receiver.
    Seismogram {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "wavelet")]
        kernel: KernelArg,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the oracle audit suite and report pass/fail per check.
    Validate {
        config: PathBuf,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Entry point used by the binary; returns the process exit status.
/// 0 ok, 1 validation failure, 2 config error, 3 numerical failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version through this path with status 0.
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. }
        | Error::UnphysicalMaterial(_)
        | Error::DegeneratePModes(_)
        | Error::Io(_) => 2,
        _ => 3,
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("PORO_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::Config {
            line: 0,
            msg: format!("PORO_THREADS must be a positive integer, got '{v}'"),
        })?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Material { config } => {
            let cfg = ProblemConfig::from_file(&config)?;
            print!("{}", material_report(&cfg)?);
            Ok(0)
        }
        Cmd::Coeffs { config, qx_re, qx_im, qy, incidence } => {
            let cfg = ProblemConfig::from_file(&config)?;
            let top = derive_layer(&cfg.top)?;
            let bottom = derive_layer(&cfg.bottom)?;
            let inc = match incidence {
                IncidenceArg::Pf => Incidence::Pf,
                IncidenceArg::Ps => Incidence::Ps,
            };
            let q = SlownessPoint::new(Complex64::new(qx_re, qx_im), qy);
            let (c, cond) = solve_coefficients_monitored(q, inc, &top, &bottom, 1e13)?;
            println!("# incidence {} at q_x = {} + {}i, q_y = {}", inc.label(), qx_re, qx_im, qy);
            println!("# condition estimate {cond:.3e}");
            for (name, v) in [
                ("R_Pf", c.r_pf),
                ("R_Ps", c.r_ps),
                ("R_S", c.r_s),
                ("T_Pf", c.t_pf),
                ("T_Ps", c.t_ps),
                ("T_S", c.t_s),
            ] {
                println!("{name} = {:+.17e} {:+.17e}i", v.re, v.im);
            }
            Ok(0)
        }
        Cmd::Times { config } => {
            let cfg = ProblemConfig::from_file(&config)?;
            print!("{}", times_report(&cfg)?);
            Ok(0)
        }
        Cmd::Green { config, output, tol } => {
            let cfg = ProblemConfig::from_file(&config)?;
            let pool = thread_pool()?;
            pool.install(|| write_traces(&cfg, &output, tol, None))?;
            Ok(0)
        }
        Cmd::Seismogram { config, output, kernel, tol } => {
            let cfg = ProblemConfig::from_file(&config)?;
            let pool = thread_pool()?;
            pool.install(|| write_traces(&cfg, &output, tol, Some(kernel)))?;
            Ok(0)
        }
        Cmd::Validate { config, csv } => {
            let cfg = ProblemConfig::from_file(&config)?;
            let pool = thread_pool()?;
            let reports = pool.install(|| audit(&cfg))?;
            let mut all_pass = true;
            println!(
                "{:<28} {:>12} {:>12} {:>6}  worst case",
                "check", "max error", "tolerance", "pass"
            );
            let mut csv_text = String::from("check,max_error,tolerance,pass,worst\n");
            for r in &reports {
                all_pass &= r.pass;
                println!(
                    "{:<28} {:>12.3e} {:>12.3e} {:>6}  {}",
                    r.name,
                    r.max_error,
                    r.tolerance,
                    if r.pass { "ok" } else { "FAIL" },
                    r.worst
                );
                csv_text.push_str(&format!(
                    "{},{:.6e},{:.6e},{},{}\n",
                    r.name,
                    r.max_error,
                    r.tolerance,
                    r.pass,
                    r.worst.replace(',', ";")
                ));
            }
            if let Some(path) = csv {
                std::fs::write(path, csv_text)?;
            }
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}

pub fn material_report(cfg: &ProblemConfig) -> Result<String> {
    let mut out = String::new();
    for (name, raw) in [("top", &cfg.top), ("bottom", &cfg.bottom)] {
        let d = derive_layer(raw)?;
        out.push_str(&format!("[{name}]\n"));
        out.push_str(&format!("rho      = {:.6} kg/m3\n", d.rho));
        out.push_str(&format!("rho_w    = {:.6} kg/m3\n", d.rho_w));
        out.push_str(&format!("beta     = {:.12}\n", d.beta));
        out.push_str(&format!("m        = {:.6e} Pa\n", d.m));
        out.push_str(&format!("lambda   = {:.6e} Pa\n", d.lambda));
        out.push_str(&format!("alpha    = {:.6e} Pa\n", d.alpha));
        out.push_str(&format!("V_Pf     = {:.3} m/s\n", d.v_pf));
        out.push_str(&format!("V_Ps     = {:.3} m/s\n", d.v_ps));
        out.push_str(&format!("V_S      = {:.3} m/s\n", d.v_s));
        out.push_str(&format!(
            "P        = [{:+.12} {:+.12}; {:+.12} {:+.12}]\n",
            d.p11(),
            d.p12(),
            d.p21(),
            d.p22()
        ));
    }
    Ok(out)
}

pub fn times_report(cfg: &ProblemConfig) -> Result<String> {
    let (evals, _) = build_evaluators(cfg, QuadSettings::default())?;
    let mut out = String::new();
    for (ri, (r, ev)) in cfg.receivers.iter().zip(&evals).enumerate() {
        out.push_str(&format!(
            "receiver {} at x = {} m, y = {} m, z = {} m\n",
            ri + 1,
            r.x,
            r.y,
            r.z
        ));
        out.push_str(&format!(
            "{:<8} {:>12} {:>12} {:>12} {:>6}\n",
            "wave", "t0", "t_h1", "t_h2", "head"
        ));
        for (id, ch) in &ev.channels {
            match ch {
                crate::greens::Channel::Incident(_) => {
                    let t0 = ev
                        .onsets()
                        .iter()
                        .find(|(i, _)| i == id)
                        .map(|(_, t)| *t)
                        .unwrap();
                    out.push_str(&format!(
                        "{:<8} {:>12.6} {:>12} {:>12} {:>6}\n",
                        id.label(),
                        t0,
                        "-",
                        "-",
                        "no"
                    ));
                }
                crate::greens::Channel::Scattered(s) => {
                    let w = &s.windows;
                    let fmt_opt = |v: Option<f64>| match v {
                        Some(x) => format!("{x:>12.6}"),
                        None => format!("{:>12}", "-"),
                    };
                    out.push_str(&format!(
                        "{:<8} {:>12.6} {} {} {:>6}\n",
                        id.label(),
                        w.t0,
                        fmt_opt(w.t_h1),
                        fmt_opt(w.t_h2),
                        if w.head_exists { "yes" } else { "no" }
                    ));
                }
            }
        }
    }
    Ok(out)
}

fn build_evaluators(
    cfg: &ProblemConfig,
    quad: QuadSettings,
) -> Result<(Vec<GreenEvaluator>, ModalAmplitudes)> {
    let top: DerivedLayer = derive_layer(&cfg.top)?;
    let bottom = derive_layer(&cfg.bottom)?;
    let modal = project_source(&top, &cfg.source)?;
    let evals = cfg
        .receivers
        .iter()
        .map(|r| {
            GreenEvaluator::new(&top, &bottom, modal, cfg.source_height, r.offset(), r.z, quad)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((evals, modal))
}

/// Time grid shifted off every jump time by dt/7 when a sample collides.
pub fn build_grid(cfg: &ProblemConfig, jumps: &[f64]) -> (f64, f64, usize) {
    let dt = cfg.resolved_dt();
    let n = ((cfg.time.t_end - cfg.time.t_start) / dt).floor() as usize + 1;
    let mut t_start = cfg.time.t_start;
    for _ in 0..7 {
        let collision = jumps.iter().any(|&tj| {
            if tj < t_start || tj > t_start + dt * (n as f64) {
                return false;
            }
            let k = ((tj - t_start) / dt).round();
            (t_start + k * dt - tj).abs() < 1e-6 * dt
        });
        if !collision {
            break;
        }
        t_start += dt / 7.0;
    }
    (t_start, dt, n)
}

/// Compute all receiver traces (per-wave and totals) and write one file per
/// receiver; `kernel = None` emits raw Green functions.
fn write_traces(
    cfg: &ProblemConfig,
    outdir: &Path,
    tol: Option<f64>,
    kernel: Option<KernelArg>,
) -> Result<()> {
    std::fs::create_dir_all(outdir)?;
    let mut quad = QuadSettings::default();
    if let Some(t) = tol {
        quad.abs_tol = t;
    }
    let (evals, _) = build_evaluators(cfg, quad)?;
    for (ri, (receiver, ev)) in cfg.receivers.iter().zip(&evals).enumerate() {
        let jumps = ev.jump_times();
        let (t_start, dt, n) = build_grid(cfg, &jumps);
        let rows: Vec<GreenBreakdown> = (0..n)
            .into_par_iter()
            .map(|k| ev.eval(t_start + k as f64 * dt))
            .collect::<Result<Vec<_>>>()?;
        // Column blocks: per wave then total, each rotated to (ux, uy, uz).
        let n_waves = ev.channels.len();
        let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n); 3 * (n_waves + 1)];
        for row in &rows {
            for (w, u) in row.waves.iter().enumerate() {
                let (ux, uy, uz) = crate::greens::rotate_to_3d(u.0, u.1, receiver.x, receiver.y);
                columns[3 * w].push(ux);
                columns[3 * w + 1].push(uy);
                columns[3 * w + 2].push(uz);
            }
            let (ux, uy, uz) =
                crate::greens::rotate_to_3d(row.total.0, row.total.1, receiver.x, receiver.y);
            columns[3 * n_waves].push(ux);
            columns[3 * n_waves + 1].push(uy);
            columns[3 * n_waves + 2].push(uz);
        }
        let columns = match kernel {
            None => columns,
            Some(k) => columns
                .into_par_iter()
                .map(|c| {
                    let tr = Trace::new(t_start, dt, c)?;
                    let conv = convolve_with_jumps(
                        &tr,
                        &cfg.wavelet,
                        &jumps,
                        matches!(k, KernelArg::WaveletDerivative),
                    )?;
                    Ok(conv.samples)
                })
                .collect::<Result<Vec<_>>>()?,
        };

        let stem = match kernel {
            None => "green",
            Some(_) => "seismogram",
        };
        let path = outdir.join(format!("{stem}_r{}.txt", ri + 1));
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        let labels: Vec<String> = ev.channels.iter().map(|(id, _)| id.label()).collect();
        writeln!(f, "# porowave {stem} traces")?;
        writeln!(f, "# version: {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(f, "# config-hash: fnv1a:{:016x}", cfg.content_hash())?;
        writeln!(
            f,
            "# receiver: {} = ({}, {}, {}) m",
            ri + 1,
            receiver.x,
            receiver.y,
            receiver.z
        )?;
        writeln!(f, "# waves: {} total", labels.join(" "))?;
        writeln!(f, "# arrivals:")?;
        for ((id, ch), onset) in ev.channels.iter().zip(ev.onsets()) {
            match ch {
                crate::greens::Channel::Incident(_) => {
                    writeln!(f, "#   {} t0={:.9}", id.label(), onset.1)?
                }
                crate::greens::Channel::Scattered(s) => {
                    let w = &s.windows;
                    let h1 = w.t_h1.map(|v| format!(" t_h1={v:.9}")).unwrap_or_default();
                    let h2 = w.t_h2.map(|v| format!(" t_h2={v:.9}")).unwrap_or_default();
                    writeln!(
                        f,
                        "#   {} t0={:.9}{h1}{h2} head={}",
                        id.label(),
                        w.t0,
                        if w.head_exists { "yes" } else { "no" }
                    )?;
                }
            }
        }
        let mut cols = vec!["t".to_string()];
        for l in labels.iter().chain(std::iter::once(&"total".to_string())) {
            for c in ["ux", "uy", "uz"] {
                cols.push(format!("{c}({l})"));
            }
        }
        writeln!(f, "# columns: {}", cols.join(" "))?;
        for line in cfg.emit().lines() {
            writeln!(f, "#> {line}")?;
        }
        for k in 0..n {
            let mut row = format!("{:.17e}", t_start + k as f64 * dt);
            for c in &columns {
                row.push_str(&format!(" {:.17e}", c[k]));
            }
            writeln!(f, "{row}")?;
        }
    }
    Ok(())
}
