use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use drill_core::chart_file::ChartDocument;
use drill_core::laminations::{average_bending_norm, bending_bound_check, FiniteLamination, SupOptions, Window};
use drill_core::model_deformation::{
    delta_omega_decay, delta_omega_energy_decay, end_energy, log_spaced, EnergyConfig,
};
use drill_core::report::{
    assemble_report_with, eta, ConeLocusSpec, InputSources, SpecDocument, DEFAULT_L0, REFERENCE_BANNER,
    REFERENCE_SMOOTH_NEHARI_K,
};
use drill_core::tube_trig::{
    base_radius, bending_length_constant, bending_length_constant_for, exact_sinh_rp_constant, f_packing, g_floor,
    g_floor_conservative,
};
use drill_core::{Error, Result};

#[derive(Parser)]
#[command(name = "drillbound", version, about = "L2 drilling bounds and their supporting numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the drilling-bound report for a cone-locus spec.
    DrillBound {
        spec: PathBuf,
        /// Nehari-type constant; overrides the spec file.
        #[arg(long = "K", allow_negative_numbers = true)]
        k: Option<f64>,
        /// Use K = 3/2, the smooth-case value, and mark the report accordingly.
        #[arg(long, conflicts_with = "k")]
        reference_smooth_nehari: bool,
        /// Length threshold; overrides the spec file. Defaults to 0.9.
        #[arg(long = "L0")]
        l0: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Energy of the model deformation over an end chart up to height t.
    EndEnergy {
        chart: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Power-law fit of the correction term over a range of heights.
    DecayFit {
        chart: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        t_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        t_max: f64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Quantity::Pointwise)]
        quantity: Quantity,
        /// Chart point for the pointwise fit, as `x,y`; defaults to the centre.
        #[arg(long, value_parser = parse_point)]
        point: Option<Complex64>,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Windowed average bending norm of a lamination file.
    BendingNorm {
        lamination: PathBuf,
        #[arg(long = "L")]
        length: f64,
        /// Window centre in the disk, as `x,y`.
        #[arg(long, value_parser = parse_point, default_value = "0,0")]
        center: Complex64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 64)]
        base_points: usize,
        #[arg(long, default_value_t = 64)]
        directions: usize,
        /// Also run the embeddedness heuristic at L = 2 asinh 1 (ignores --L).
        #[arg(long)]
        check_embedding: bool,
    },
    /// Print the tube constants and tables.
    Constants {
        #[arg(long = "L0", default_value_t = DEFAULT_L0)]
        l0: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Pointwise,
    Energy,
}

fn parse_point(s: &str) -> std::result::Result<Complex64, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Complex64::new(x, y))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(text: &str) {
    // a closed pipe downstream is not an error here
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json<T: Serialize>(v: &T) {
    emit(&serde_json::to_string_pretty(v).expect("output serializes"));
}

fn energy_config(tolerance: f64) -> Result<EnergyConfig> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(drill_core::error::invalid("tolerance", "must be positive"));
    }
    Ok(EnergyConfig { tolerance, ..EnergyConfig::default() })
}

#[derive(Serialize)]
struct ConstantsOutput {
    eta: f64,
    base_radius: f64,
    f_at_base_radius: f64,
    bending_length_constant: f64,
    bending_length_constant_at_l0: f64,
    l0: f64,
    sinh_constant_exact: f64,
    sinh_constant_rounded: f64,
    table: Vec<TableRow>,
}

#[derive(Serialize)]
struct TableRow {
    r: f64,
    f: f64,
    g: f64,
    g_conservative: f64,
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::DrillBound { spec, k, reference_smooth_nehari, l0, tolerance } => {
            let doc = SpecDocument::parse(&read(&spec)?)?;
            let (k, k_source) = match (k, reference_smooth_nehari, doc.k) {
                (Some(k), _, _) => (k, "command line"),
                (None, true, _) => (REFERENCE_SMOOTH_NEHARI_K, "smooth-case reference"),
                (None, false, Some(k)) => (k, "input"),
                (None, false, None) => {
                    return Err(drill_core::error::invalid("K", "give K in the spec, --K, or --reference-smooth-nehari"))
                }
            };
            let (l0, l0_source) = match (l0, doc.l0) {
                (Some(v), _) => (v, "command line"),
                (None, Some(v)) => (v, "input"),
                (None, None) => (DEFAULT_L0, "default"),
            };
            let spec = ConeLocusSpec::new(doc.components, k, l0)?;
            let src = InputSources { k: k_source, l0: l0_source, reference_k: reference_smooth_nehari, tolerance };
            let report = assemble_report_with(&spec, src)?;
            if reference_smooth_nehari {
                eprintln!("*** {REFERENCE_BANNER} ***");
            }
            emit(&report.to_json());
            if !report.hypotheses_hold {
                eprintln!("hypothesis check failed: bound printed but unverified");
                return Ok(ExitCode::from(2));
            }
        }
        Command::EndEnergy { chart, t, tolerance } => {
            let doc = ChartDocument::parse(&read(&chart)?)?;
            let r = end_energy(&doc.quad_diff(), &doc.frame()?, t, energy_config(tolerance)?)?;
            print_json(&r);
        }
        Command::DecayFit { chart, t_min, t_max, samples, quantity, point, tolerance } => {
            let doc = ChartDocument::parse(&read(&chart)?)?;
            let (phi, frame) = (doc.quad_diff(), doc.frame()?);
            if !(t_min > 0.0 && t_max > t_min) {
                return Err(drill_core::error::invalid("t range", "need 0 < t_min < t_max"));
            }
            let ts = log_spaced(t_min, t_max, samples);
            let fit = match quantity {
                Quantity::Pointwise => {
                    let d = doc.domain;
                    let z = point.unwrap_or(Complex64::new(0.5 * (d.x0 + d.x1), 0.5 * (d.y0 + d.y1)));
                    delta_omega_decay(&phi, &frame, z, &ts)?
                }
                Quantity::Energy => delta_omega_energy_decay(&phi, &frame, &ts, tolerance)?,
            };
            print_json(&fit);
        }
        Command::BendingNorm { lamination, length, center, radius, base_points, directions, check_embedding } => {
            let lam = FiniteLamination::parse(&read(&lamination)?)?;
            let win = Window::new(center, radius)?;
            let opts = SupOptions { base_points, directions, ..SupOptions::default() };
            if check_embedding {
                print_json(&bending_bound_check(&lam, &win, opts)?);
            } else {
                print_json(&average_bending_norm(&lam, length, &win, opts)?);
            }
        }
        Command::Constants { l0 } => {
            let r0 = base_radius();
            let table = (1..=12)
                .map(|k| {
                    let r = 0.1 * k as f64;
                    Ok(TableRow { r, f: f_packing(r)?, g: g_floor(r, l0)?, g_conservative: g_floor_conservative(r, l0)? })
                })
                .collect::<Result<Vec<_>>>()?;
            print_json(&ConstantsOutput {
                eta: eta(),
                base_radius: r0,
                f_at_base_radius: f_packing(r0)?,
                bending_length_constant: bending_length_constant(),
                bending_length_constant_at_l0: bending_length_constant_for(l0)?,
                l0,
                sinh_constant_exact: exact_sinh_rp_constant(),
                sinh_constant_rounded: 24.0,
                table,
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; exit code 2 is reserved for failed hypotheses
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
