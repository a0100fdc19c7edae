//! Opening-angle kinematics of thick-walled layered tubes and their
//! load-free equilibrium.
//!
//! Every layer is an incompressible circular sector in its stress-free
//! state (radii `R`, length `L`, opening angle `α`). Closing it into a tube,
//! or opening it to another angle, is the map
//! `r² = r_ref² + (R² − R_ref²)/(k c)`, `θ = kΘ`, `z = cZ` with
//! `k = (target span)/(2π − α)` and `c = l/L`. The map gradient is
//! `F = diag(R/(k c r), k r/R, c)` and `F0 = F⁻¹`.

use std::f64::consts::PI;

use crate::constitutive::{EquilibriumMaterial, MooneyRivlin, StrainEnergy};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, GaussLegendre};
use crate::solve::{newton, NewtonOptions};
use crate::tensor::Tensor2;
use crate::viscoelastic::{FibreMaxwell, IsoMaxwell, MaxwellBranches};

pub const TWO_PI: f64 = 2.0 * PI;

/// Gauss panels per layer for the stored energy. The energy is integrated
/// over the fixed stress-free sector with a fixed rule, so it is a smooth
/// function of the kinematic unknowns.
pub const ENERGY_PANELS: usize = 4;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive and finite (got {v})")));
    }
    Ok(())
}

/// Stress-free sector of one layer. Lengths in mm, angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGeometry {
    pub r_inner: f64,
    pub r_outer: f64,
    pub length: f64,
    pub opening_angle: f64,
}

impl SectorGeometry {
    pub fn new(r_inner: f64, r_outer: f64, length: f64, opening_angle: f64) -> Result<Self> {
        check_positive("sector inner radius", r_inner)?;
        check_positive("sector length", length)?;
        if !(r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sector outer radius {r_outer} must exceed inner radius {r_inner}"
            )));
        }
        if !(0.0..TWO_PI).contains(&opening_angle) {
            return Err(Error::InvalidParameter(format!(
                "opening angle must lie in [0, 360) degrees (got {})",
                opening_angle.to_degrees()
            )));
        }
        Ok(Self { r_inner, r_outer, length, opening_angle })
    }

    /// Angular span `2π − α`.
    pub fn span(&self) -> f64 {
        TWO_PI - self.opening_angle
    }

    /// Closing ratio `k = 2π/(2π − α)`.
    pub fn k(&self) -> f64 {
        TWO_PI / self.span()
    }

    pub fn volume(&self) -> f64 {
        0.5 * self.span() * (self.r_outer.powi(2) - self.r_inner.powi(2)) * self.length
    }
}

/// Closed load-free tube, optionally split into two layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeGeometry {
    pub r_inner: f64,
    pub r_interface: Option<f64>,
    pub r_outer: f64,
    pub length: f64,
}

impl TubeGeometry {
    pub fn new(r_inner: f64, r_interface: Option<f64>, r_outer: f64, length: f64) -> Result<Self> {
        check_positive("tube inner radius", r_inner)?;
        check_positive("tube length", length)?;
        if !(r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tube outer radius {r_outer} must exceed inner radius {r_inner}"
            )));
        }
        if let Some(ri) = r_interface {
            if !(ri > r_inner && ri < r_outer) {
                return Err(Error::InvalidParameter(format!(
                    "interface radius {ri} must lie strictly between {r_inner} and {r_outer}"
                )));
            }
        }
        Ok(Self { r_inner, r_interface, r_outer, length })
    }

    /// Layer boundaries from the inside out.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut b = vec![self.r_inner];
        b.extend(self.r_interface);
        b.push(self.r_outer);
        b
    }
}

/// Constants of one layer in the units of the config files: kPa, kPa·s,
/// radians for `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerParams {
    pub c1: f64,
    pub c2: f64,
    pub k1: f64,
    pub k2: f64,
    pub beta: f64,
    pub mu: f64,
    pub eta_matrix: f64,
    pub k1_visc: f64,
    pub k2_visc: f64,
    pub eta_fibre: f64,
}

/// Equilibrium and Maxwell parts of one layer's constitutive law.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerMaterial {
    pub params: LayerParams,
    pub equilibrium: EquilibriumMaterial,
    pub maxwell: MaxwellBranches,
}

impl LayerMaterial {
    pub fn new(p: LayerParams) -> Result<Self> {
        let equilibrium = EquilibriumMaterial::new(MooneyRivlin::new(p.c1, p.c2)?, p.k1, p.k2, p.beta)?;
        let fibres = equilibrium
            .fibres
            .iter()
            .map(|f| FibreMaxwell::new(p.k1_visc, p.k2_visc, p.eta_fibre, f.direction))
            .collect::<Result<Vec<_>>>()?;
        let maxwell = MaxwellBranches { iso: IsoMaxwell::new(p.mu, p.eta_matrix)?, fibres };
        Ok(Self { params: p, equilibrium, maxwell })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialLayer {
    pub sector: SectorGeometry,
    pub material: LayerMaterial,
}

/// Incompressible map between a stress-free sector and a circular
/// configuration, anchored at a matched pair of radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpeningMap {
    pub k: f64,
    pub c: f64,
    /// Radius in the circular configuration.
    pub r_ref: f64,
    /// Matching radius in the stress-free sector.
    pub sf_r_ref: f64,
}

impl OpeningMap {
    pub fn new(k: f64, c: f64, r_ref: f64, sf_r_ref: f64) -> Result<Self> {
        check_positive("k", k)?;
        check_positive("c", c)?;
        check_positive("anchor radius", r_ref)?;
        check_positive("stress-free anchor radius", sf_r_ref)?;
        Ok(Self { k, c, r_ref, sf_r_ref })
    }

    /// Map closing a sector of opening angle `alpha` into a full tube, with
    /// `ri ↔ Ri`.
    pub fn closing(alpha: f64, c: f64, ri: f64, sf_ri: f64) -> Result<Self> {
        if !(0.0..TWO_PI).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("opening angle {alpha} rad out of range")));
        }
        Self::new(TWO_PI / (TWO_PI - alpha), c, ri, sf_ri)
    }

    /// `R(r)`.
    pub fn sf_radius(&self, r: f64) -> Result<f64> {
        let rad = self.sf_r_ref.powi(2) + (r * r - self.r_ref.powi(2)) * self.k * self.c;
        if !(rad > 0.0) {
            return Err(Error::Domain(format!("no stress-free radius for r = {r} (radicand {rad:e})")));
        }
        Ok(rad.sqrt())
    }

    /// `r(R)`.
    pub fn lf_radius(&self, sf_r: f64) -> Result<f64> {
        let rad = self.r_ref.powi(2) + (sf_r * sf_r - self.sf_r_ref.powi(2)) / (self.k * self.c);
        if !(rad > 0.0) {
            return Err(Error::Domain(format!("no radius for R = {sf_r} (radicand {rad:e})")));
        }
        Ok(rad.sqrt())
    }

    /// `f = k r/R` as a function of the circular-configuration radius.
    pub fn f_lf(&self, r: f64) -> Result<f64> {
        Ok(self.k * r / self.sf_radius(r)?)
    }

    /// `f = k r/R` as a function of the stress-free radius.
    pub fn f_sf(&self, sf_r: f64) -> Result<f64> {
        Ok(self.k * self.lf_radius(sf_r)? / sf_r)
    }

    /// `F0 = diag(c f, 1/f, 1/c)` in `{e_r, e_θ, e_z}`.
    pub fn f0_at(&self, r: f64) -> Result<Tensor2> {
        let f = self.f_lf(r)?;
        Ok(Tensor2::diag(self.c * f, 1.0 / f, 1.0 / self.c))
    }

    /// Map gradient `F = F0⁻¹` at circular-configuration radius `r`.
    pub fn deformation_at(&self, r: f64) -> Result<Tensor2> {
        let f = self.f_lf(r)?;
        Ok(Tensor2::diag(1.0 / (self.c * f), f, self.c))
    }

    /// Map gradient at stress-free radius `R`.
    pub fn deformation_at_sf(&self, sf_r: f64) -> Result<Tensor2> {
        let f = self.f_sf(sf_r)?;
        Ok(Tensor2::diag(1.0 / (self.c * f), f, self.c))
    }

    /// `(λ_r, λ_θ, λ_z)` from the stress-free sector at radius `r`.
    pub fn stretches(&self, r: f64) -> Result<[f64; 3]> {
        Ok(self.deformation_at(r)?.diagonal())
    }
}

/// Gradient of the map closing `sector` into a tube with axial stretch
/// `lambda_z`, given the radius map `r(R)`:
/// `diag(R/(k λz r), k r/R, λz)`.
pub fn sector_to_tube_f<M>(sf_r: f64, sector: &SectorGeometry, r_of_sf_r: M, lambda_z: f64) -> Result<Tensor2>
where
    M: Fn(f64) -> Result<f64>,
{
    if !(sf_r >= sector.r_inner && sf_r <= sector.r_outer) {
        return Err(Error::Domain(format!(
            "R = {sf_r} outside the sector [{}, {}]",
            sector.r_inner, sector.r_outer
        )));
    }
    check_positive("axial stretch", lambda_z)?;
    let r = r_of_sf_r(sf_r)?;
    check_positive("mapped radius", r)?;
    let k = sector.k();
    Ok(Tensor2::diag(sf_r / (k * lambda_z * r), k * r / sf_r, lambda_z))
}

/// One layer mapped onto a circular configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedLayer {
    pub material: EquilibriumMaterial,
    pub sector: SectorGeometry,
    pub map: OpeningMap,
    pub r_lo: f64,
    pub r_hi: f64,
}

impl PlacedLayer {
    pub fn extra_cauchy_at(&self, r: f64) -> Result<Tensor2> {
        self.material.extra_cauchy(&self.map.deformation_at(r)?)
    }

    /// `∫ ρΨ dV` over the stress-free sector.
    pub fn energy(&self) -> Result<f64> {
        let s = &self.sector;
        let mut w = |sf_r: f64| -> Result<f64> {
            let f = self.map.deformation_at_sf(sf_r)?;
            Ok(self.material.energy(&f.right_cauchy_green())? * sf_r)
        };
        let (v, _) = GaussLegendre::standard().composite(&mut w, s.r_inner, s.r_outer, ENERGY_PANELS)?;
        Ok(v * s.span() * s.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressSample {
    pub r: f64,
    pub rr: f64,
    pub tt: f64,
    pub zz: f64,
}

/// Layers stacked into one circular body of common span and length.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub layers: Vec<PlacedLayer>,
    pub span: f64,
    pub length: f64,
}

impl LayerStack {
    /// Place `layers` (innermost first) on a circular body of angular span
    /// `span` and length `length`. The outer surface of the first layer sits
    /// at `r_anchor`; each further layer starts where the previous one ends.
    pub fn place(layers: &[MaterialLayer], span: f64, r_anchor: f64, length: f64) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("at least one layer is required".into()));
        }
        check_positive("span", span)?;
        check_positive("length", length)?;
        check_positive("anchor radius", r_anchor)?;
        let mut placed = Vec::with_capacity(layers.len());
        let mut r_prev = r_anchor;
        for (i, layer) in layers.iter().enumerate() {
            let s = layer.sector;
            let (k, c) = (span / s.span(), length / s.length);
            let map = if i == 0 {
                OpeningMap::new(k, c, r_anchor, s.r_outer)?
            } else {
                OpeningMap::new(k, c, r_prev, s.r_inner)?
            };
            let r_lo = if i == 0 { map.lf_radius(s.r_inner)? } else { r_prev };
            let r_hi = if i == 0 { r_anchor } else { map.lf_radius(s.r_outer)? };
            placed.push(PlacedLayer { material: layer.material.equilibrium, sector: s, map, r_lo, r_hi });
            r_prev = r_hi;
        }
        Ok(Self { layers: placed, span, length })
    }

    pub fn boundaries(&self) -> Vec<f64> {
        let mut b = vec![self.layers[0].r_lo];
        b.extend(self.layers.iter().map(|l| l.r_hi));
        b
    }

    /// `p_i − p_o = ∫ (T_θθ − T_rr)/r dr`, kPa.
    pub fn net_pressure(&self) -> Result<f64> {
        self.layers.iter().try_fold(0.0, |acc, l| {
            let v = integrate(
                |r| {
                    let t = l.extra_cauchy_at(r)?;
                    Ok((t[(1, 1)] - t[(0, 0)]) / r)
                },
                l.r_lo,
                l.r_hi,
            )?;
            Ok(acc + v)
        })
    }

    /// `π ∫ (2T_zz − T_θθ − T_rr) r dr`, μN.
    pub fn reduced_axial_force(&self) -> Result<f64> {
        let v = self.layers.iter().try_fold(0.0, |acc, l| {
            let v = integrate(
                |r| {
                    let t = l.extra_cauchy_at(r)?;
                    Ok((2.0 * t[(2, 2)] - t[(1, 1)] - t[(0, 0)]) * r)
                },
                l.r_lo,
                l.r_hi,
            )?;
            Ok::<f64, Error>(acc + v)
        })?;
        Ok(PI * v)
    }

    /// Total stored energy, μJ.
    pub fn stored_energy(&self) -> Result<f64> {
        self.layers.iter().try_fold(0.0, |acc, l| Ok(acc + l.energy()?))
    }

    /// Cauchy stress through the wall with a traction-free inner surface:
    /// `T_rr(r) = ∫_{ri}^{r} (T_θθ − T_rr)/r' dr'`, and the hoop and axial
    /// components shifted by the same pressure.
    pub fn stress_profile(&self, points_per_layer: usize) -> Result<Vec<StressSample>> {
        let n = points_per_layer.max(2);
        let mut out = Vec::with_capacity(n * self.layers.len());
        let mut t_rr = 0.0;
        let mut r_prev = self.layers[0].r_lo;
        for l in &self.layers {
            for j in 0..n {
                let r = l.r_lo + (l.r_hi - l.r_lo) * j as f64 / (n - 1) as f64;
                t_rr += integrate(
                    |x| {
                        let t = l.extra_cauchy_at(x)?;
                        Ok((t[(1, 1)] - t[(0, 0)]) / x)
                    },
                    r_prev,
                    r,
                )?;
                r_prev = r;
                let s = l.extra_cauchy_at(r)?;
                let p = s[(0, 0)] - t_rr;
                out.push(StressSample { r, rr: t_rr, tt: s[(1, 1)] - p, zz: s[(2, 2)] - p });
            }
        }
        Ok(out)
    }
}

fn stiffest_c1(materials: &[&LayerMaterial]) -> f64 {
    materials.iter().map(|m| m.params.c1).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseSolution {
    pub sectors: Vec<SectorGeometry>,
    pub pressure: f64,
    pub axial_force: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

impl InverseSolution {
    pub fn r_inner(&self) -> f64 {
        self.sectors[0].r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.sectors[self.sectors.len() - 1].r_outer
    }

    pub fn length(&self) -> f64 {
        self.sectors[0].length
    }
}

/// Stress-free sectors, with a shared opening angle `alpha` and length,
/// that close into `tube` with no load: the unknowns `(Ri, L)` solve
/// zero net pressure and zero reduced axial force, and every other radius
/// follows from incompressibility.
pub fn solve_inverse_sf(
    tube: &TubeGeometry,
    alpha: f64,
    materials: &[LayerMaterial],
    opts: &NewtonOptions,
) -> Result<InverseSolution> {
    let bounds = tube.boundaries();
    if materials.len() != bounds.len() - 1 {
        return Err(Error::InvalidParameter(format!(
            "{} materials given for a tube with {} layers",
            materials.len(),
            bounds.len() - 1
        )));
    }
    if !(0.0..TWO_PI).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "opening angle must lie in [0, 360) degrees (got {})",
            alpha.to_degrees()
        )));
    }
    let k = TWO_PI / (TWO_PI - alpha);
    let ri = tube.r_inner;
    let sectors_for = |x: &[f64]| -> Result<Vec<SectorGeometry>> {
        let (sf_ri, big_l) = (x[0] * ri, x[1] * ri);
        check_positive("stress-free inner radius", sf_ri)?;
        check_positive("stress-free length", big_l)?;
        let kc = k * tube.length / big_l;
        let mut radii = vec![sf_ri];
        for w in bounds.windows(2) {
            let prev = radii[radii.len() - 1];
            radii.push((prev * prev + (w[1] * w[1] - w[0] * w[0]) * kc).sqrt());
        }
        radii.windows(2).map(|w| SectorGeometry::new(w[0], w[1], big_l, alpha)).collect()
    };
    let layers_for = |x: &[f64]| -> Result<Vec<MaterialLayer>> {
        Ok(sectors_for(x)?
            .into_iter()
            .zip(materials)
            .map(|(sector, m)| MaterialLayer { sector, material: m.clone() })
            .collect())
    };
    let stress_scale = stiffest_c1(&materials.iter().collect::<Vec<_>>());
    let residual = |x: &[f64]| -> Result<Vec<f64>> {
        let stack = LayerStack::place(&layers_for(x)?, TWO_PI, bounds[1], tube.length)?;
        Ok(vec![
            stack.net_pressure()? / stress_scale,
            stack.reduced_axial_force()? / (stress_scale * ri * ri),
        ])
    };
    let report = newton(residual, &[k, tube.length / ri], opts)?;
    let layers = layers_for(&report.x)?;
    let stack = LayerStack::place(&layers, TWO_PI, bounds[1], tube.length)?;
    Ok(InverseSolution {
        sectors: layers.iter().map(|l| l.sector).collect(),
        pressure: stack.net_pressure()?,
        axial_force: stack.reduced_axial_force()?,
        iterations: report.iterations,
        history: report.history,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadFreeSolution {
    pub tube: TubeGeometry,
    pub stack: LayerStack,
    pub pressure: f64,
    pub axial_force: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

/// Solve a stack of circular body layers of span `span` for the anchor
/// radius (outer radius of the first layer) and common length that leave it
/// free of net pressure and reduced axial force.
pub fn equilibrate_stack(
    layers: &[MaterialLayer],
    span: f64,
    guess: [f64; 2],
    opts: &NewtonOptions,
) -> Result<(LayerStack, crate::solve::NewtonReport)> {
    if layers.is_empty() {
        return Err(Error::InvalidParameter("at least one layer is required".into()));
    }
    let scale = layers[0].sector.r_inner;
    let stress_scale = stiffest_c1(&layers.iter().map(|l| &l.material).collect::<Vec<_>>());
    let residual = |x: &[f64]| -> Result<Vec<f64>> {
        let stack = LayerStack::place(layers, span, x[0] * scale, x[1] * scale)?;
        Ok(vec![
            stack.net_pressure()? / stress_scale,
            stack.reduced_axial_force()? / (stress_scale * scale * scale),
        ])
    };
    let report = newton(residual, &[guess[0] / scale, guess[1] / scale], opts)?;
    let stack = LayerStack::place(layers, span, report.x[0] * scale, report.x[1] * scale)?;
    Ok((stack, report))
}

/// Geometry of the closed tube formed by gluing the stress-free `layers`
/// (innermost first) together with no external load.
pub fn solve_load_free(layers: &[MaterialLayer], opts: &NewtonOptions) -> Result<LoadFreeSolution> {
    if layers.is_empty() || layers.len() > 2 {
        return Err(Error::InvalidParameter(format!(
            "the load-free solver takes one or two layers (got {})",
            layers.len()
        )));
    }
    let first = &layers[0].sector;
    let mean_length = layers.iter().map(|l| l.sector.length).sum::<f64>() / layers.len() as f64;
    let guess = [first.r_outer / first.k().sqrt(), mean_length];
    let (stack, report) = equilibrate_stack(layers, TWO_PI, guess, opts)?;
    let b = stack.boundaries();
    let tube = TubeGeometry {
        r_inner: b[0],
        r_interface: (b.len() == 3).then(|| b[1]),
        r_outer: b[b.len() - 1],
        length: stack.length,
    };
    Ok(LoadFreeSolution {
        tube,
        pressure: stack.net_pressure()?,
        axial_force: stack.reduced_axial_force()?,
        stack,
        iterations: report.iterations,
        history: report.history,
    })
}
