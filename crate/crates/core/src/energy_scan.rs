//! Stored energy of a layered tube cut open to a trial angle, and the angle
//! that minimises it.
//!
//! For every trial opening angle the composite keeps a circular form; the
//! interface radius and the length are free and are chosen to minimise the
//! energy, which is the same as leaving the opened body without net
//! pressure or axial force.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solve::{golden_section, nelder_mead, newton, NelderMeadOptions, NewtonOptions};
use crate::tube::{LayerStack, MaterialLayer, TWO_PI};

/// Largest admissible gradient norm (μJ/mm) at an equilibrated opened state.
pub const GRADIENT_TOL: f64 = 1e-8;
/// Central-difference step for the energy gradient, relative to the length
/// scale of the first layer.
const GRADIENT_STEP: f64 = 1e-5;
/// Forward-difference step for the Hessian in the Newton polish.
const HESSIAN_STEP: f64 = 1e-4;
/// Refined argmin bracket width, degrees.
const ARGMIN_TOL_DEG: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenedStateCandidate {
    /// Trial opening angle, radians.
    pub alpha_trial: f64,
    /// Outer radius of the first layer, mm.
    pub rho_interface: f64,
    /// Length of the opened body, mm.
    pub l_open: f64,
}

impl OpenedStateCandidate {
    pub fn stack(&self, layers: &[MaterialLayer]) -> Result<LayerStack> {
        if !(0.0..TWO_PI).contains(&self.alpha_trial) {
            return Err(Error::InvalidParameter(format!(
                "trial opening angle must lie in [0, 360) degrees (got {})",
                self.alpha_trial.to_degrees()
            )));
        }
        LayerStack::place(layers, TWO_PI - self.alpha_trial, self.rho_interface, self.l_open)
    }
}

/// Total stored equilibrium energy of `layers` mapped onto the opened
/// configuration `candidate`, μJ.
pub fn opened_energy(layers: &[MaterialLayer], candidate: &OpenedStateCandidate) -> Result<f64> {
    candidate.stack(layers)?.stored_energy()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpenedEquilibrium {
    pub candidate: OpenedStateCandidate,
    pub energy: f64,
    /// `(∂E/∂ρ, ∂E/∂l)`, μJ/mm.
    pub gradient: [f64; 2],
    pub pressure: f64,
    pub axial_force: f64,
}

fn energy_gradient(layers: &[MaterialLayer], alpha: f64, x: [f64; 2], h: f64) -> Result<[f64; 2]> {
    let e = |rho: f64, l: f64| {
        opened_energy(layers, &OpenedStateCandidate { alpha_trial: alpha, rho_interface: rho, l_open: l })
    };
    Ok([
        (e(x[0] + h, x[1])? - e(x[0] - h, x[1])?) / (2.0 * h),
        (e(x[0], x[1] + h)? - e(x[0], x[1] - h)?) / (2.0 * h),
    ])
}

/// Opened state of minimal energy at the trial angle `alpha_trial`: a
/// Nelder-Mead search over `(ρ, l)` polished by Newton on the
/// finite-difference gradient.
pub fn equilibrate_opened(layers: &[MaterialLayer], alpha_trial: f64) -> Result<OpenedEquilibrium> {
    if layers.is_empty() {
        return Err(Error::InvalidParameter("at least one layer is required".into()));
    }
    let first = &layers[0].sector;
    let scale = first.r_inner;
    let k0 = (TWO_PI - alpha_trial) / first.span();
    let mean_length = layers.iter().map(|l| l.sector.length).sum::<f64>() / layers.len() as f64;
    let x0 = [first.r_outer / k0.sqrt() / scale, mean_length / scale];

    let energy = |x: &[f64]| {
        opened_energy(
            layers,
            &OpenedStateCandidate { alpha_trial, rho_interface: x[0] * scale, l_open: x[1] * scale },
        )
    };
    let nm = nelder_mead(energy, &x0, &[0.05, 0.05], &NelderMeadOptions::default())?;

    let h = GRADIENT_STEP * scale;
    let gradient = |x: &[f64]| -> Result<Vec<f64>> {
        Ok(energy_gradient(layers, alpha_trial, [x[0] * scale, x[1] * scale], h)?.to_vec())
    };
    let mut x = [nm.x[0], nm.x[1]];
    let g = gradient(&x)?;
    if g[0].hypot(g[1]) >= GRADIENT_TOL {
        let opts = NewtonOptions { tol: 0.1 * GRADIENT_TOL, fd_step: HESSIAN_STEP, ..NewtonOptions::default() };
        match newton(gradient, &x, &opts) {
            Ok(rep) => x = [rep.x[0], rep.x[1]],
            // Stalled in the roundoff floor: keep the last iterate, the
            // gradient check below decides.
            Err(Error::NoConvergence { last, .. }) if last.len() == 2 => x = [last[0], last[1]],
            Err(e) => return Err(e),
        }
    }

    let candidate = OpenedStateCandidate { alpha_trial, rho_interface: x[0] * scale, l_open: x[1] * scale };
    let g = energy_gradient(layers, alpha_trial, [candidate.rho_interface, candidate.l_open], h)?;
    let norm = g[0].hypot(g[1]);
    if !(norm < GRADIENT_TOL) {
        return Err(Error::NoConvergence {
            context: format!("opened-state equilibrium at {:.4} degrees", alpha_trial.to_degrees()),
            iterations: nm.iterations,
            residual: norm,
            last: vec![candidate.rho_interface, candidate.l_open],
        });
    }
    let stack = candidate.stack(layers)?;
    Ok(OpenedEquilibrium {
        candidate,
        energy: stack.stored_energy()?,
        gradient: g,
        pressure: stack.net_pressure()?,
        axial_force: stack.reduced_axial_force()?,
    })
}

/// Scan grid in degrees, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub start_deg: f64,
    pub end_deg: f64,
    pub step_deg: f64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self { start_deg: 0.0, end_deg: 180.0, step_deg: 2.0 }
    }
}

impl ScanGrid {
    pub fn angles_deg(&self) -> Result<Vec<f64>> {
        let ok = self.start_deg >= 0.0
            && self.end_deg < 360.0
            && self.end_deg > self.start_deg
            && self.step_deg > 0.0
            && self.step_deg.is_finite();
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "invalid scan grid {}..{} step {} degrees",
                self.start_deg, self.end_deg, self.step_deg
            )));
        }
        let n = ((self.end_deg - self.start_deg) / self.step_deg + 1e-9).floor() as usize;
        let mut v: Vec<f64> = (0..=n).map(|i| self.start_deg + i as f64 * self.step_deg).collect();
        if self.end_deg - v[n] > 1e-9 * self.step_deg {
            v.push(self.end_deg);
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCurve {
    /// `(α̃ in degrees, E in μJ)`, sorted by angle.
    pub samples: Vec<(f64, f64)>,
    pub argmin_deg: f64,
    pub energy_min: f64,
    pub argmin_state: OpenedEquilibrium,
}

/// Energy against trial opening angle on `grid`, with the minimum refined
/// by golden-section search inside the neighbouring grid cells. Grid points
/// run on `threads` worker threads (all cores when `None`).
pub fn find_opening_angle(layers: &[MaterialLayer], grid: &ScanGrid, threads: Option<usize>) -> Result<EnergyCurve> {
    let angles = grid.angles_deg()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let states: Vec<OpenedEquilibrium> = pool.install(|| {
        angles
            .par_iter()
            .map(|a| equilibrate_opened(layers, a.to_radians()))
            .collect::<Result<Vec<_>>>()
    })?;
    let samples: Vec<(f64, f64)> = angles.iter().zip(&states).map(|(a, s)| (*a, s.energy)).collect();

    let i = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    let lo = angles[i.saturating_sub(1)];
    let hi = angles[(i + 1).min(angles.len() - 1)];
    let mut best = states[i].clone();
    let mut best_deg = angles[i];
    if hi > lo {
        let (a, _) = golden_section(
            |deg| Ok(equilibrate_opened(layers, deg.to_radians())?.energy),
            lo,
            hi,
            ARGMIN_TOL_DEG,
        )?;
        let refined = equilibrate_opened(layers, a.to_radians())?;
        if refined.energy <= best.energy {
            best = refined;
            best_deg = a;
        }
    }
    Ok(EnergyCurve { samples, argmin_deg: best_deg, energy_min: best.energy, argmin_state: best })
}
