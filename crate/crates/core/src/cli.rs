//! Command-line workflows. Exit codes: 0 converged, 1 invalid input,
//! 2 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::driver::run_point;
use crate::energy_scan::find_opening_angle;
use crate::error::Error;
use crate::tube::{solve_inverse_sf, solve_load_free, LayerStack, MaterialLayer, StressSample, TWO_PI};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

pub const THREADS_ENV: &str = "PRESTRESS_TUBE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Workflow {
    InverseSf,
    LoadFree,
    EnergyScan,
    PointTest,
}

impl Workflow {
    fn name(self) -> &'static str {
        match self {
            Workflow::InverseSf => "inverse-sf",
            Workflow::LoadFree => "load-free",
            Workflow::EnergyScan => "energy-scan",
            Workflow::PointTest => "point-test",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "prestress-tube", version, about = "Residual stresses in layered tubes from opening angles")]
pub struct Cli {
    #[arg(value_enum)]
    pub workflow: Workflow,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Main CSV output; stress profiles go next to it as `<stem>.profile.csv`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_name = "DEG")]
    pub grid_start: Option<f64>,
    #[arg(long, value_name = "DEG")]
    pub grid_end: Option<f64>,
    #[arg(long, value_name = "DEG")]
    pub grid_step: Option<f64>,
    /// Time step of the point driver, seconds.
    #[arg(long, value_name = "S")]
    pub dt: Option<f64>,
    /// Newton tolerance on the scaled residual norm.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
}

/// Failure of a workflow, carrying the exit code and what to report.
struct Failure {
    code: i32,
    message: String,
    summary: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL };
        let summary = match &e {
            Error::NoConvergence { iterations, residual, last, .. } => Some(json!({
                "converged": false,
                "residuals": { "norm": residual },
                "key_results": { "iterations": iterations, "last_iterate": last },
            })),
            _ => None,
        };
        Failure { code, message: e.to_string(), summary }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: EXIT_INPUT, message, summary: None }
}

/// Parse `args` (program name first), run the workflow and return the exit
/// code. The JSON summary goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let _ = write!(stderr, "{e}");
            return EXIT_INPUT;
        }
    };
    let workflow = cli.workflow.name();
    match execute(&cli) {
        Ok(summary) => {
            let _ = writeln!(stdout, "{summary}");
            EXIT_OK
        }
        Err(f) => {
            if let Some(mut s) = f.summary {
                s["workflow"] = json!(workflow);
                let _ = writeln!(stdout, "{s}");
            }
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| input_error(format!("cannot read config {}: {e}", cli.config.display())))?;
    let mut config = RunConfig::from_json(&text)?;
    if let Some(tol) = cli.tol {
        config.solver.tol = tol;
    }
    let header = format!(
        "# prestress-tube {} config-sha256={:x}\n",
        env!("CARGO_PKG_VERSION"),
        Sha256::digest(text.as_bytes())
    );
    let mut summary = match cli.workflow {
        Workflow::InverseSf => inverse_sf(&config, cli, &header)?,
        Workflow::LoadFree => load_free(&config, cli, &header)?,
        Workflow::EnergyScan => energy_scan(&config, cli, &header)?,
        Workflow::PointTest => point_test(&config, cli, &header)?,
    };
    summary["workflow"] = json!(cli.workflow.name());
    Ok(summary)
}

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

pub fn profile_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.profile.csv"))
}

fn write_profile(cli: &Cli, header: &str, samples: &[StressSample]) -> Result<(), Failure> {
    let mut body = String::from(header);
    body.push_str("r_mm,t_rr_kpa,t_tt_kpa,t_zz_kpa\n");
    for s in samples {
        let _ = writeln!(body, "{},{},{},{}", num(s.r), num(s.rr), num(s.tt), num(s.zz));
    }
    write_file(&profile_path(&cli.out), &body)
}

fn max_abs_hoop(samples: &[StressSample]) -> f64 {
    samples.iter().map(|s| s.tt.abs()).fold(0.0, f64::max)
}

fn inverse_sf(config: &RunConfig, cli: &Cli, header: &str) -> Result<Value, Failure> {
    let (tube, alpha) = config.tube()?;
    let materials = config.materials()?;
    let sol = solve_inverse_sf(&tube, alpha, &materials, &config.newton_options()?)?;

    let mut body = String::from(header);
    let _ = writeln!(
        body,
        "# net_pressure_kpa={} reduced_axial_force_un={} iterations={}",
        num(sol.pressure),
        num(sol.axial_force),
        sol.iterations
    );
    body.push_str("layer,r_i_mm,r_o_mm,l_mm,alpha_deg\n");
    for (i, s) in sol.sectors.iter().enumerate() {
        let _ = writeln!(
            body,
            "{i},{},{},{},{}",
            num(s.r_inner),
            num(s.r_outer),
            num(s.length),
            num(s.opening_angle.to_degrees())
        );
    }
    write_file(&cli.out, &body)?;

    let layers: Vec<MaterialLayer> = sol
        .sectors
        .iter()
        .zip(&materials)
        .map(|(s, m)| MaterialLayer { sector: *s, material: m.clone() })
        .collect();
    let anchor = tube.boundaries()[1];
    let stack = LayerStack::place(&layers, TWO_PI, anchor, tube.length)?;
    let profile = stack.stress_profile(config.solver.profile_points)?;
    write_profile(cli, header, &profile)?;

    Ok(json!({
        "converged": true,
        "residuals": { "net_pressure_kpa": sol.pressure, "reduced_axial_force_un": sol.axial_force },
        "key_results": {
            "iterations": sol.iterations,
            "R_i_mm": sol.r_inner(),
            "R_interface_mm": (sol.sectors.len() == 2).then(|| sol.sectors[0].r_outer),
            "R_o_mm": sol.r_outer(),
            "L_mm": sol.length(),
            "max_abs_t_tt_kpa": max_abs_hoop(&profile),
        },
    }))
}

fn load_free(config: &RunConfig, cli: &Cli, header: &str) -> Result<Value, Failure> {
    let layers = config.material_layers()?;
    let sol = solve_load_free(&layers, &config.newton_options()?)?;
    let t = sol.tube;

    let mut body = String::from(header);
    let _ = writeln!(
        body,
        "# net_pressure_kpa={} reduced_axial_force_un={} iterations={}",
        num(sol.pressure),
        num(sol.axial_force),
        sol.iterations
    );
    body.push_str("r_i_mm,r_interface_mm,r_o_mm,l_mm\n");
    let interface = t.r_interface.map(num).unwrap_or_default();
    let _ = writeln!(body, "{},{},{},{}", num(t.r_inner), interface, num(t.r_outer), num(t.length));
    write_file(&cli.out, &body)?;
    let profile = sol.stack.stress_profile(config.solver.profile_points)?;
    write_profile(cli, header, &profile)?;

    Ok(json!({
        "converged": true,
        "residuals": { "net_pressure_kpa": sol.pressure, "reduced_axial_force_un": sol.axial_force },
        "key_results": {
            "iterations": sol.iterations,
            "r_i_mm": t.r_inner,
            "r_interface_mm": t.r_interface,
            "r_o_mm": t.r_outer,
            "l_mm": t.length,
            "max_abs_t_tt_kpa": max_abs_hoop(&profile),
        },
    }))
}

fn thread_count() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(input_error(format!("{THREADS_ENV} must be a positive integer (got {v:?})"))),
        },
    }
}

fn energy_scan(config: &RunConfig, cli: &Cli, header: &str) -> Result<Value, Failure> {
    let layers = config.material_layers()?;
    let mut grid = config.scan_grid();
    grid.start_deg = cli.grid_start.unwrap_or(grid.start_deg);
    grid.end_deg = cli.grid_end.unwrap_or(grid.end_deg);
    grid.step_deg = cli.grid_step.unwrap_or(grid.step_deg);
    let curve = find_opening_angle(&layers, &grid, thread_count()?)?;

    let mut body = String::from(header);
    body.push_str("alpha_deg,energy_uj\n");
    for (a, e) in &curve.samples {
        let _ = writeln!(body, "{},{}", num(*a), num(*e));
    }
    write_file(&cli.out, &body)?;
    let state = &curve.argmin_state;
    let profile = state.candidate.stack(&layers)?.stress_profile(config.solver.profile_points)?;
    write_profile(cli, header, &profile)?;

    Ok(json!({
        "converged": true,
        "residuals": {
            "net_pressure_kpa": state.pressure,
            "reduced_axial_force_un": state.axial_force,
            "energy_gradient_uj_per_mm": state.gradient,
        },
        "key_results": {
            "argmin_deg": curve.argmin_deg,
            "energy_min_uj": curve.energy_min,
            "rho_interface_mm": state.candidate.rho_interface,
            "l_open_mm": state.candidate.l_open,
            "max_abs_t_tt_kpa": max_abs_hoop(&profile),
        },
    }))
}

fn point_test(config: &RunConfig, cli: &Cli, header: &str) -> Result<Value, Failure> {
    let (program, material, f0) = config.point_program(cli.dt)?;
    let trace = run_point(&program, &material, &f0)?;

    let n_fibres = material.maxwell.fibres.len();
    let mut body = String::from(header);
    body.push_str("t_s,t_rr_kpa,t_tt_kpa,t_zz_kpa,t_rt_kpa,t_rz_kpa,t_tz_kpa,det_ci");
    for i in 1..=n_fibres {
        let _ = write!(body, ",lambda_i_{i}");
    }
    body.push_str(",overstress_norm_kpa\n");
    for r in &trace.records {
        let c = &r.cauchy;
        let _ = write!(
            body,
            "{},{},{},{},{},{},{},{}",
            num(r.t),
            num(c[(0, 0)]),
            num(c[(1, 1)]),
            num(c[(2, 2)]),
            num(c[(0, 1)]),
            num(c[(0, 2)]),
            num(c[(1, 2)]),
            num(r.det_ci)
        );
        for l in &r.lambda_i {
            let _ = write!(body, ",{}", num(*l));
        }
        let _ = writeln!(body, ",{}", num(r.overstress_norm));
    }
    write_file(&cli.out, &body)?;

    let last = trace.records.last().expect("trace has the initial record");
    Ok(json!({
        "converged": true,
        "residuals": { "det_ci_drift": trace.records.iter().map(|r| (r.det_ci - 1.0).abs()).fold(0.0, f64::max) },
        "key_results": {
            "steps": trace.records.len() - 1,
            "peak_overstress_kpa": trace.peak_overstress(),
            "final_overstress_kpa": last.overstress_norm,
        },
    }))
}
