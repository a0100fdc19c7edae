//! Material-point driver: one layer's full viscoelastic response to a
//! prescribed deformation history on top of a prestrain `F0`.

use crate::constitutive::{cauchy_from_pk2, pull_back_pk2, PreStress, StrainEnergy};
use crate::error::{Error, Result};
use crate::tensor::Tensor2;
use crate::tube::LayerMaterial;

/// Piecewise-linear history of the load-free deformation gradient, held
/// constant after the last keyframe.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProgram {
    pub keyframes: Vec<(f64, Tensor2)>,
    pub dt: f64,
}

impl LoadProgram {
    pub fn new(keyframes: Vec<(f64, Tensor2)>, dt: f64) -> Result<Self> {
        if keyframes.is_empty() {
            return Err(Error::InvalidParameter("load program needs at least one keyframe".into()));
        }
        if keyframes[0].0 != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "load program must start at t = 0 (got {})",
                keyframes[0].0
            )));
        }
        if keyframes.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParameter("keyframe times must be strictly increasing".into()));
        }
        if let Some((t, f)) = keyframes.iter().find(|(_, f)| !(f.det() > 0.0) || !f.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "deformation gradient at t = {t} has non-positive determinant {}",
                f.det()
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive (dt = {dt})")));
        }
        Ok(Self { keyframes, dt })
    }

    pub fn duration(&self) -> f64 {
        self.keyframes[self.keyframes.len() - 1].0
    }

    pub fn deformation_at(&self, t: f64) -> Tensor2 {
        let k = &self.keyframes;
        match k.iter().position(|(tk, _)| *tk > t) {
            None => k[k.len() - 1].1,
            Some(0) => k[0].1,
            Some(i) => {
                let (t0, f0) = k[i - 1];
                let (t1, f1) = k[i];
                let s = (t - t0) / (t1 - t0);
                f0 * (1.0 - s) + f1 * s
            }
        }
    }

    /// Step times `0, dt, 2dt, …`, with the last step shortened to end
    /// exactly at the final keyframe.
    pub fn times(&self) -> Vec<f64> {
        let end = self.duration();
        let n = (end / self.dt - 1e-9).ceil().max(0.0) as usize;
        (0..=n).map(|i| (i as f64 * self.dt).min(end)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub t: f64,
    pub cauchy: Tensor2,
    pub det_ci: f64,
    pub lambda_i: Vec<f64>,
    /// Frobenius norm of the summed Maxwell overstress (PK2 on the
    /// stress-free configuration), kPa.
    pub overstress_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointTrace {
    pub records: Vec<PointRecord>,
}

impl PointTrace {
    pub fn peak_overstress(&self) -> f64 {
        self.records.iter().map(|r| r.overstress_norm).fold(0.0, f64::max)
    }
}

/// Integrate the Maxwell branches of `material` through `program`, starting
/// relaxed in the load-free configuration.
pub fn run_point(program: &LoadProgram, material: &LayerMaterial, f0: &PreStress) -> Result<PointTrace> {
    let branches = &material.maxwell;
    let stress = |f_lf: &Tensor2, state: &crate::viscoelastic::ViscousState| -> Result<(Tensor2, f64)> {
        let f_sf = f0.sf_motion(f_lf);
        let c_sf = f_sf.right_cauchy_green();
        let over = branches.overstress(&c_sf, state)?;
        let t_sf = material.equilibrium.pk2(&c_sf)? + over;
        let cauchy = cauchy_from_pk2(&pull_back_pk2(&t_sf, f0), f_lf)?;
        Ok((cauchy.symmetric_part(), over.norm()))
    };

    let times = program.times();
    let f_start = program.deformation_at(0.0);
    let mut state = branches.initial_state(f0, &f_start.right_cauchy_green())?;
    let mut records = Vec::with_capacity(times.len());
    let mut record = |t: f64, f: &Tensor2, s: &crate::viscoelastic::ViscousState| -> Result<()> {
        let (cauchy, overstress_norm) = stress(f, s)?;
        records.push(PointRecord { t, cauchy, det_ci: s.ci.det(), lambda_i: s.lambda_i.clone(), overstress_norm });
        Ok(())
    };
    record(0.0, &f_start, &state)?;
    for w in times.windows(2) {
        let f = program.deformation_at(w[1]);
        let c_sf = f0.sf_motion(&f).right_cauchy_green();
        state = branches.evolve(&c_sf, &state, w[1] - w[0])?;
        record(w[1], &f, &state)?;
    }
    Ok(PointTrace { records })
}
