//! JSON run configuration. Keys carry their units (`_mm`, `_kpa`, `_deg`,
//! `_s`); unknown keys are rejected so typos do not silently fall back to
//! defaults.

use serde::Deserialize;

use crate::constitutive::PreStress;
use crate::driver::LoadProgram;
use crate::energy_scan::ScanGrid;
use crate::error::{Error, Result};
use crate::solve::NewtonOptions;
use crate::tensor::Tensor2;
use crate::tube::{LayerMaterial, LayerParams, MaterialLayer, SectorGeometry, TubeGeometry};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub geometry: Option<GeometryConfig>,
    pub layers: Vec<LayerConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub point: Option<PointConfig>,
}

/// Load-free tube for the inverse problem.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub r_i_mm: f64,
    #[serde(default)]
    pub r_interface_mm: Option<f64>,
    pub r_o_mm: f64,
    pub l_mm: f64,
    pub alpha_deg: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorConfig {
    pub r_i_mm: f64,
    pub r_o_mm: f64,
    pub l_mm: f64,
    pub alpha_deg: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub c1_kpa: f64,
    pub c2_kpa: f64,
    pub k1_kpa: f64,
    pub k2: f64,
    pub beta_deg: f64,
    pub mu_matrix_kpa: f64,
    pub eta_matrix_kpa_s: f64,
    pub k1_visc_kpa: f64,
    pub k2_visc: f64,
    pub eta_fibre_kpa_s: f64,
    /// Stress-free sector; required by the load-free and scan workflows.
    #[serde(default)]
    pub sector: Option<SectorConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
}

fn default_tol() -> f64 {
    NewtonOptions::default().tol
}

fn default_max_iter() -> usize {
    NewtonOptions::default().max_iter
}

fn default_profile_points() -> usize {
    41
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: default_tol(), max_iter: default_max_iter(), profile_points: default_profile_points() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub start_deg: f64,
    pub end_deg: f64,
    pub step_deg: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    /// Index into `layers`.
    #[serde(default)]
    pub layer: usize,
    pub dt_s: f64,
    /// Prestrain tensor, rows; identity when absent.
    #[serde(default)]
    pub f0: Option<[[f64; 3]; 3]>,
    pub keyframes: Vec<KeyframeConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyframeConfig {
    pub t_s: f64,
    /// Load-free deformation gradient, rows.
    pub f: [[f64; 3]; 3],
}

fn missing(what: &str) -> Error {
    Error::InvalidParameter(format!("missing field `{what}`"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn newton_options(&self) -> Result<NewtonOptions> {
        let s = &self.solver;
        if !(s.tol > 0.0) || s.max_iter == 0 {
            return Err(Error::InvalidParameter(format!(
                "solver tolerance and iteration limit must be positive (tol = {}, max_iter = {})",
                s.tol, s.max_iter
            )));
        }
        Ok(NewtonOptions { tol: s.tol, max_iter: s.max_iter, ..NewtonOptions::default() })
    }

    pub fn tube(&self) -> Result<(TubeGeometry, f64)> {
        let g = self.geometry.as_ref().ok_or_else(|| missing("geometry"))?;
        let tube = TubeGeometry::new(g.r_i_mm, g.r_interface_mm, g.r_o_mm, g.l_mm)?;
        Ok((tube, g.alpha_deg.to_radians()))
    }

    pub fn materials(&self) -> Result<Vec<LayerMaterial>> {
        if self.layers.is_empty() {
            return Err(Error::InvalidParameter("`layers` must not be empty".into()));
        }
        self.layers.iter().map(|l| LayerMaterial::new(l.params())).collect()
    }

    pub fn material_layers(&self) -> Result<Vec<MaterialLayer>> {
        let materials = self.materials()?;
        self.layers
            .iter()
            .zip(materials)
            .enumerate()
            .map(|(i, (l, material))| {
                let s = l.sector.as_ref().ok_or_else(|| missing(&format!("layers[{i}].sector")))?;
                let sector = SectorGeometry::new(s.r_i_mm, s.r_o_mm, s.l_mm, s.alpha_deg.to_radians())?;
                Ok(MaterialLayer { sector, material })
            })
            .collect()
    }

    pub fn scan_grid(&self) -> ScanGrid {
        self.scan
            .as_ref()
            .map(|s| ScanGrid { start_deg: s.start_deg, end_deg: s.end_deg, step_deg: s.step_deg })
            .unwrap_or_default()
    }

    pub fn point_program(&self, dt_override: Option<f64>) -> Result<(LoadProgram, LayerMaterial, PreStress)> {
        let p = self.point.as_ref().ok_or_else(|| missing("point"))?;
        let materials = self.materials()?;
        let material = materials.get(p.layer).cloned().ok_or_else(|| {
            Error::InvalidParameter(format!("point.layer = {} but only {} layers given", p.layer, materials.len()))
        })?;
        let f0 = match p.f0 {
            Some(rows) => PreStress::new(Tensor2::from_rows(rows))?,
            None => PreStress::identity(),
        };
        let keyframes = p.keyframes.iter().map(|k| (k.t_s, Tensor2::from_rows(k.f))).collect();
        let program = LoadProgram::new(keyframes, dt_override.unwrap_or(p.dt_s))?;
        Ok((program, material, f0))
    }
}

impl LayerConfig {
    pub fn params(&self) -> LayerParams {
        LayerParams {
            c1: self.c1_kpa,
            c2: self.c2_kpa,
            k1: self.k1_kpa,
            k2: self.k2,
            beta: self.beta_deg.to_radians(),
            mu: self.mu_matrix_kpa,
            eta_matrix: self.eta_matrix_kpa_s,
            k1_visc: self.k1_visc_kpa,
            k2_visc: self.k2_visc,
            eta_fibre: self.eta_fibre_kpa_s,
        }
    }
}
