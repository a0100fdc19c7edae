//! Equilibrium (hyperelastic) stresses on the stress-free configuration and
//! their transfer to the load-free configuration through `F0`.
//!
//! All energies are stored per unit reference volume (`ρ_R Ψ`, kPa), so the
//! mass density never appears on its own.

use crate::error::{Error, Result};
use crate::tensor::{Tensor2, Vector3};

/// Tolerance on `det F0 = 1`.
pub const PRESTRESS_DET_TOL: f64 = 1e-10;

/// Tolerance on `det F = 1` for the incompressible push-forward.
pub const INCOMPRESSIBLE_DET_TOL: f64 = 1e-10;

/// A strain energy `ρ_R Ψ(C)` together with its stress `2 ∂(ρ_R Ψ)/∂C`.
pub trait StrainEnergy {
    fn energy(&self, c: &Tensor2) -> Result<f64>;
    fn pk2(&self, c: &Tensor2) -> Result<Tensor2>;
}

/// Two-term Mooney-Rivlin matrix,
/// `ρΨ = c1/2 (tr C̄ − 3) + c2/2 (tr C̄⁻¹ − 3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MooneyRivlin {
    pub c1: f64,
    pub c2: f64,
}

impl MooneyRivlin {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1 >= 0.0 && c2 >= 0.0 && c1 + c2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Mooney-Rivlin moduli must satisfy c1 >= 0, c2 >= 0, c1 + c2 > 0 (got c1 = {c1}, c2 = {c2})"
            )));
        }
        Ok(Self { c1, c2 })
    }
}

impl StrainEnergy for MooneyRivlin {
    fn energy(&self, c: &Tensor2) -> Result<f64> {
        let c_bar = c.unimodular()?;
        let c_bar_inv = c_bar.inverse()?;
        Ok(0.5 * self.c1 * (c_bar.trace() - 3.0) + 0.5 * self.c2 * (c_bar_inv.trace() - 3.0))
    }

    /// `C⁻¹ (c1 C̄ − c2 C̄⁻¹)ᴰ`, expanded so the result is exactly symmetric.
    fn pk2(&self, c: &Tensor2) -> Result<Tensor2> {
        let det = c.det();
        if !(det > 0.0) {
            return Err(Error::NonPositiveDeterminant { det });
        }
        let c_inv = c.inverse()?;
        let j13 = det.cbrt();
        let c_bar = *c * (1.0 / j13);
        let c_bar_inv = c_inv * j13;
        let x = c_bar * self.c1 - c_bar_inv * self.c2;
        let third_tr = x.trace() / 3.0;
        Ok(Tensor2::identity() * (self.c1 / j13) - c_inv.dot(&c_inv) * (self.c2 * j13) - c_inv * third_tr)
    }
}

/// Unit fibre directions at `±β` to the hoop direction in the cylindrical
/// triad `{e_r, e_θ, e_z}`.
pub fn fibre_pair(beta: f64) -> [Vector3; 2] {
    let (s, c) = beta.sin_cos();
    [[0.0, c, s], [0.0, c, -s]]
}

/// `∂(C̄ : M)/∂C = (det C)^{-1/3} (M − ⅓ tr(C M) C⁻¹)`.
pub(crate) fn isochoric_projection(c: &Tensor2, m: &Tensor2) -> Result<Tensor2> {
    let det = c.det();
    if !(det > 0.0) {
        return Err(Error::NonPositiveDeterminant { det });
    }
    let c_inv = c.inverse()?;
    let tr_cm = c.ddot(m);
    Ok((*m - c_inv * (tr_cm / 3.0)) * det.powf(-1.0 / 3.0))
}

pub(crate) fn check_unit(a: &Vector3) -> Result<()> {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("fibre direction must be a unit vector (|a| = {n})")));
    }
    Ok(())
}

/// Exponential fibre family,
/// `ρΨ = k1/(2 k2) (exp(k2 (λ² − 1)²) − 1)` with `λ² = ã·C̄·ã`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolzapfelFibre {
    pub k1: f64,
    pub k2: f64,
    /// Fibre direction `ã` on the stress-free configuration.
    pub direction: Vector3,
    /// Drop the fibre contribution under compression (`λ² < 1`). Off by default.
    pub tension_only: bool,
}

impl HolzapfelFibre {
    pub fn new(k1: f64, k2: f64, direction: Vector3) -> Result<Self> {
        if !(k1 > 0.0 && k2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fibre constants must be positive (k1 = {k1}, k2 = {k2})"
            )));
        }
        check_unit(&direction)?;
        Ok(Self { k1, k2, direction, tension_only: false })
    }

    pub fn with_tension_only(mut self, on: bool) -> Self {
        self.tension_only = on;
        self
    }

    pub fn structural_tensor(&self) -> Tensor2 {
        Tensor2::dyad(&self.direction, &self.direction)
    }

    /// Squared isochoric fibre stretch `ã·C̄·ã`.
    pub fn stretch_sq(&self, c: &Tensor2) -> Result<f64> {
        Ok(c.unimodular()?.quadratic_form(&self.direction))
    }

    fn inactive(&self, l2: f64) -> bool {
        self.tension_only && l2 < 1.0
    }

    /// `f(λ²) = dΨ/d(λ²) = k1 (λ² − 1) exp(k2 (λ² − 1)²)`.
    pub fn f(&self, l2: f64) -> f64 {
        if self.inactive(l2) {
            return 0.0;
        }
        let e = l2 - 1.0;
        self.k1 * e * (self.k2 * e * e).exp()
    }
}

impl StrainEnergy for HolzapfelFibre {
    fn energy(&self, c: &Tensor2) -> Result<f64> {
        let l2 = self.stretch_sq(c)?;
        if self.inactive(l2) {
            return Ok(0.0);
        }
        let e = l2 - 1.0;
        Ok(self.k1 / (2.0 * self.k2) * ((self.k2 * e * e).exp() - 1.0))
    }

    fn pk2(&self, c: &Tensor2) -> Result<Tensor2> {
        let l2 = self.stretch_sq(c)?;
        let f = self.f(l2);
        if !f.is_finite() {
            return Err(Error::Domain(format!("fibre stress overflow at λ² = {l2}")));
        }
        if f == 0.0 {
            return Ok(Tensor2::zero());
        }
        Ok(isochoric_projection(c, &self.structural_tensor())? * (2.0 * f))
    }
}

/// Matrix plus two symmetric fibre families: the relaxed (equilibrium)
/// response of one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumMaterial {
    pub matrix: MooneyRivlin,
    pub fibres: [HolzapfelFibre; 2],
}

impl EquilibriumMaterial {
    pub fn new(matrix: MooneyRivlin, k1: f64, k2: f64, beta: f64) -> Result<Self> {
        let [a, b] = fibre_pair(beta);
        Ok(Self {
            matrix,
            fibres: [HolzapfelFibre::new(k1, k2, a)?, HolzapfelFibre::new(k1, k2, b)?],
        })
    }

    pub fn with_tension_only(mut self, on: bool) -> Self {
        for f in &mut self.fibres {
            *f = f.with_tension_only(on);
        }
        self
    }

    /// Pressure-indeterminate Cauchy stress for an incompressible motion
    /// `F_sf` from the stress-free configuration. Only differences of its
    /// normal components are meaningful.
    pub fn extra_cauchy(&self, f_sf: &Tensor2) -> Result<Tensor2> {
        let det = f_sf.det();
        if (det - 1.0).abs() > INCOMPRESSIBLE_DET_TOL {
            return Err(Error::Domain(format!("motion is not isochoric (det F = {det})")));
        }
        let c = f_sf.right_cauchy_green();
        cauchy_from_pk2(&self.pk2(&c)?, f_sf)
    }
}

impl StrainEnergy for EquilibriumMaterial {
    fn energy(&self, c: &Tensor2) -> Result<f64> {
        let mut w = self.matrix.energy(c)?;
        for f in &self.fibres {
            w += f.energy(c)?;
        }
        Ok(w)
    }

    fn pk2(&self, c: &Tensor2) -> Result<Tensor2> {
        let mut t = self.matrix.pk2(c)?;
        for f in &self.fibres {
            t += f.pk2(c)?;
        }
        Ok(t)
    }
}

/// The unimodular tensor `F0` carrying the load-free configuration to the
/// local stress-free configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreStress {
    f0: Tensor2,
    f0_inv: Tensor2,
}

impl PreStress {
    pub fn new(f0: Tensor2) -> Result<Self> {
        let det = f0.det();
        if !f0.is_finite() || (det - 1.0).abs() > PRESTRESS_DET_TOL {
            return Err(Error::InvalidParameter(format!("F0 must be unimodular (det F0 = {det})")));
        }
        let f0_inv = f0.inverse()?;
        Ok(Self { f0, f0_inv })
    }

    pub fn identity() -> Self {
        Self { f0: Tensor2::identity(), f0_inv: Tensor2::identity() }
    }

    pub fn f0(&self) -> &Tensor2 {
        &self.f0
    }

    pub fn f0_inv(&self) -> &Tensor2 {
        &self.f0_inv
    }

    /// `F_sf = F_lf F0⁻¹`.
    pub fn sf_motion(&self, f_lf: &Tensor2) -> Tensor2 {
        f_lf.dot(&self.f0_inv)
    }
}

/// `C_sf = F0⁻ᵀ C_lf F0⁻¹`.
pub fn csf_from_clf(c_lf: &Tensor2, f0: &PreStress) -> Tensor2 {
    f0.f0_inv.transpose().dot(c_lf).dot(&f0.f0_inv)
}

/// `C_lf = F0ᵀ C_sf F0`.
pub fn clf_from_csf(c_sf: &Tensor2, f0: &PreStress) -> Tensor2 {
    f0.f0.transpose().dot(c_sf).dot(&f0.f0)
}

/// Second Piola-Kirchhoff stress on the load-free configuration,
/// `F0⁻¹ T_sf F0⁻ᵀ`.
pub fn pull_back_pk2(t_sf: &Tensor2, f0: &PreStress) -> Tensor2 {
    f0.f0_inv.congruence(t_sf)
}

/// Cauchy stress `(det F)⁻¹ F T Fᵀ`.
pub fn cauchy_from_pk2(t_pk2: &Tensor2, f: &Tensor2) -> Result<Tensor2> {
    let det = f.det();
    if !(det > 0.0) {
        return Err(Error::NonPositiveDeterminant { det });
    }
    Ok(f.congruence(t_pk2) * (1.0 / det))
}
