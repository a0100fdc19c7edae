//! Isotropic and fibre-like Maxwell bodies on the stress-free configuration.
//!
//! The isotropic body carries the inelastic right Cauchy-Green tensor `Ci`;
//! each fibre body carries a scalar inelastic stretch `λi` along its fibre.
//! Neither the elastic nor the inelastic part of the deformation gradient
//! is stored.

use crate::constitutive::{check_unit, csf_from_clf, isochoric_projection, PreStress};
use crate::error::{Error, Result};
use crate::tensor::{Tensor2, Vector3};

/// Fibre steps refuse to start from an elastic stretch outside this range.
pub const ELASTIC_STRETCH_GUARD: (f64, f64) = (0.2, 5.0);

const FIBRE_NEWTON_TOL: f64 = 1e-12;
const FIBRE_NEWTON_MAX_ITER: usize = 50;

/// Neo-Hookean Maxwell branch, `ρΨ = μ/2 (tr(C̄ Ci⁻¹) − 3)`, relaxing with
/// viscosity `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoMaxwell {
    pub mu: f64,
    pub eta: f64,
}

impl IsoMaxwell {
    pub fn new(mu: f64, eta: f64) -> Result<Self> {
        if !(mu > 0.0 && eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "isotropic Maxwell constants must be positive (mu = {mu}, eta = {eta})"
            )));
        }
        Ok(Self { mu, eta })
    }

    pub fn relaxation_time(&self) -> f64 {
        self.eta / self.mu
    }

    pub fn energy(&self, c: &Tensor2, ci: &Tensor2) -> Result<f64> {
        let x = c.unimodular()?.dot(&ci.inverse()?);
        Ok(0.5 * self.mu * (x.trace() - 3.0))
    }

    /// `μ C⁻¹ (C̄ Ci⁻¹)ᴰ`.
    pub fn overstress(&self, c: &Tensor2, ci: &Tensor2) -> Result<Tensor2> {
        let det = c.det();
        if !(det > 0.0) {
            return Err(Error::NonPositiveDeterminant { det });
        }
        let c_inv = c.inverse()?;
        let ci_inv = ci.inverse()?;
        let j13 = det.cbrt();
        let tr = (*c * (1.0 / j13)).ddot(&ci_inv.transpose());
        // C⁻¹ C̄ Ci⁻¹ = (det C)^{-1/3} Ci⁻¹
        Ok((ci_inv * (1.0 / j13) - c_inv * (tr / 3.0)) * self.mu)
    }

    /// One implicit step of `Ċi = (μ/η)(C̄ Ci⁻¹)ᴰ Ci` at the new strain.
    ///
    /// The backward-Euler equations collapse to
    /// `Ci_new = unimodular(Ci_old + (Δt μ/η) C̄_new)`, so no local iteration
    /// is needed and `det Ci_new = 1` holds to roundoff.
    pub fn evolve(&self, c_new: &Tensor2, ci_old: &Tensor2, dt: f64) -> Result<Tensor2> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be positive (dt = {dt})")));
        }
        let c_bar = c_new.unimodular()?;
        let trial = *ci_old + c_bar * (dt * self.mu / self.eta);
        Ok(trial.unimodular()?.symmetric_part())
    }
}

/// Fibre-like Maxwell branch with energy
/// `ρΨ = k1/k2 (exp(k2 (λe² − 1)²) − 1)` in the elastic stretch
/// `λe = λ/λi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibreMaxwell {
    pub k1: f64,
    pub k2: f64,
    pub eta: f64,
    pub direction: Vector3,
}

impl FibreMaxwell {
    pub fn new(k1: f64, k2: f64, eta: f64, direction: Vector3) -> Result<Self> {
        if !(k1 > 0.0 && k2 > 0.0 && eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fibre Maxwell constants must be positive (k1 = {k1}, k2 = {k2}, eta = {eta})"
            )));
        }
        check_unit(&direction)?;
        Ok(Self { k1, k2, eta, direction })
    }

    /// `f(λe²) = dΨ/d(λe²) = 2 k1 (λe² − 1) exp(k2 (λe² − 1)²)`.
    pub fn f(&self, le2: f64) -> f64 {
        let e = le2 - 1.0;
        2.0 * self.k1 * e * (self.k2 * e * e).exp()
    }

    fn df(&self, le2: f64) -> f64 {
        let e = le2 - 1.0;
        2.0 * self.k1 * (self.k2 * e * e).exp() * (1.0 + 2.0 * self.k2 * e * e)
    }

    pub fn energy_of(&self, le2: f64) -> f64 {
        let e = le2 - 1.0;
        self.k1 / self.k2 * ((self.k2 * e * e).exp() - 1.0)
    }

    /// Total isochoric fibre stretch `λ = √(ã·C̄·ã)`.
    pub fn stretch(&self, c: &Tensor2) -> Result<f64> {
        Ok(c.unimodular()?.quadratic_form(&self.direction).sqrt())
    }

    pub fn energy(&self, c: &Tensor2, lambda_i: f64) -> Result<f64> {
        let l = self.stretch(c)?;
        let le = positive_ratio(l, lambda_i)?;
        Ok(self.energy_of(le * le))
    }

    /// Scalar factor `f(λe²)/λi²` multiplying `2 ∂(C̄:M)/∂C` in the overstress.
    pub fn prefactor(&self, lambda: f64, lambda_i: f64) -> Result<f64> {
        let le = positive_ratio(lambda, lambda_i)?;
        Ok(self.f(le * le) / (lambda_i * lambda_i))
    }

    pub fn overstress(&self, c: &Tensor2, lambda_i: f64) -> Result<FibreOverstress> {
        let lambda = self.stretch(c)?;
        let prefactor = self.prefactor(lambda, lambda_i)?;
        if !prefactor.is_finite() {
            return Err(Error::Domain(format!("fibre overstress overflow at λ = {lambda}, λi = {lambda_i}")));
        }
        let m = Tensor2::dyad(&self.direction, &self.direction);
        let stress = if prefactor == 0.0 {
            Tensor2::zero()
        } else {
            isochoric_projection(c, &m)? * (2.0 * prefactor)
        };
        Ok(FibreOverstress { prefactor, stress })
    }

    /// One backward-Euler step of `λ̇i/λi = (1/η) f(λe²) λe²` for the new
    /// total stretch, solved in `x = ln λi` by safeguarded Newton.
    pub fn evolve(&self, lambda_new: f64, lambda_i_old: f64, dt: f64) -> Result<f64> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be positive (dt = {dt})")));
        }
        let le_old = positive_ratio(lambda_new, lambda_i_old)?;
        let (lo, hi) = ELASTIC_STRETCH_GUARD;
        if !(lo..=hi).contains(&le_old) {
            return Err(Error::NoConvergence {
                context: format!("fibre elastic stretch {le_old} outside guard [{lo}, {hi}]"),
                iterations: 0,
                residual: f64::NAN,
                last: vec![lambda_i_old],
            });
        }

        let x_old = lambda_i_old.ln();
        let x_eq = lambda_new.ln();
        if x_old == x_eq {
            return Ok(lambda_i_old);
        }
        let l2 = lambda_new * lambda_new;
        let rate = dt / self.eta;
        let residual = |x: f64| {
            let y = l2 * (-2.0 * x).exp();
            let r = x - x_old - rate * self.f(y) * y;
            // d/dx [f(y) y] = −2y (f'(y) y + f(y))
            let dr = 1.0 + rate * 2.0 * y * (self.df(y) * y + self.f(y));
            (r, dr)
        };

        // The root lies between the old state and full relaxation.
        let (mut a, mut b) = if x_old < x_eq { (x_old, x_eq) } else { (x_eq, x_old) };
        let mut x = x_old;
        for it in 0..FIBRE_NEWTON_MAX_ITER {
            let (r, dr) = residual(x);
            if r.abs() < FIBRE_NEWTON_TOL {
                return Ok(x.exp());
            }
            // r is negative below the root and positive above it.
            if r < 0.0 {
                a = x;
            } else {
                b = x;
            }
            let newton = x - r / dr;
            let next = if dr > 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
            if (next - x).abs() < FIBRE_NEWTON_TOL {
                return Ok(next.exp());
            }
            x = next;
            if it + 1 == FIBRE_NEWTON_MAX_ITER {
                return Err(Error::NoConvergence {
                    context: "fibre Maxwell step".into(),
                    iterations: FIBRE_NEWTON_MAX_ITER,
                    residual: r.abs(),
                    last: vec![x.exp()],
                });
            }
        }
        unreachable!()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibreOverstress {
    pub prefactor: f64,
    pub stress: Tensor2,
}

fn positive_ratio(lambda: f64, lambda_i: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveStretch { what: "lambda", value: lambda });
    }
    if !(lambda_i > 0.0) {
        return Err(Error::NonPositiveStretch { what: "lambda_i", value: lambda_i });
    }
    Ok(lambda / lambda_i)
}

/// Internal variables of one material point.
#[derive(Debug, Clone, PartialEq)]
pub struct ViscousState {
    /// Inelastic right Cauchy-Green tensor on the stress-free configuration.
    pub ci: Tensor2,
    /// Inelastic stretch per fibre family.
    pub lambda_i: Vec<f64>,
}

/// All Maxwell branches of one layer: one isotropic body and one body per
/// fibre family.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxwellBranches {
    pub iso: IsoMaxwell,
    pub fibres: Vec<FibreMaxwell>,
}

impl MaxwellBranches {
    /// Relaxed state for the current strain `C_lf` (identity when the body
    /// sits in its load-free configuration): `Ci⁰ = C̄_sf`, `λi⁰ = λ`.
    pub fn initial_state(&self, f0: &PreStress, c_lf: &Tensor2) -> Result<ViscousState> {
        let c_sf = csf_from_clf(c_lf, f0);
        let ci = c_sf.unimodular()?.symmetric_part();
        let lambda_i = self.fibres.iter().map(|f| f.stretch(&c_sf)).collect::<Result<Vec<_>>>()?;
        Ok(ViscousState { ci, lambda_i })
    }

    fn check_state(&self, state: &ViscousState) -> Result<()> {
        if state.lambda_i.len() != self.fibres.len() {
            return Err(Error::InvalidParameter(format!(
                "state has {} fibre stretches for {} fibre families",
                state.lambda_i.len(),
                self.fibres.len()
            )));
        }
        Ok(())
    }

    /// Sum of all overstresses (PK2 on the stress-free configuration).
    pub fn overstress(&self, c_sf: &Tensor2, state: &ViscousState) -> Result<Tensor2> {
        self.check_state(state)?;
        let mut t = self.iso.overstress(c_sf, &state.ci)?;
        for (f, &li) in self.fibres.iter().zip(&state.lambda_i) {
            t += f.overstress(c_sf, li)?.stress;
        }
        Ok(t)
    }

    pub fn energy(&self, c_sf: &Tensor2, state: &ViscousState) -> Result<f64> {
        self.check_state(state)?;
        let mut w = self.iso.energy(c_sf, &state.ci)?;
        for (f, &li) in self.fibres.iter().zip(&state.lambda_i) {
            w += f.energy(c_sf, li)?;
        }
        Ok(w)
    }

    /// Advance every branch to the new strain `C_sf`.
    pub fn evolve(&self, c_sf: &Tensor2, state: &ViscousState, dt: f64) -> Result<ViscousState> {
        self.check_state(state)?;
        let ci = self.iso.evolve(c_sf, &state.ci, dt)?;
        let lambda_i = self
            .fibres
            .iter()
            .zip(&state.lambda_i)
            .map(|(f, &li)| f.evolve(f.stretch(c_sf)?, li, dt))
            .collect::<Result<Vec<_>>>()?;
        Ok(ViscousState { ci, lambda_i })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::fibre_pair;
    use crate::testutil::*;
    use rand::SeedableRng;

    fn iso() -> IsoMaxwell {
        IsoMaxwell::new(5.0, 5.0).unwrap()
    }

    fn fibre() -> FibreMaxwell {
        FibreMaxwell::new(5.3, 0.8393, 5.3, [0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn iso_overstress_examples() {
        let c = Tensor2::diag(1.21, 1.0 / 1.1, 1.0 / 1.1);
        let relaxed = c.unimodular().unwrap();
        assert!(iso().overstress(&c, &relaxed).unwrap().max_abs() < 1e-14);
        assert!(iso().overstress(&Tensor2::identity(), &Tensor2::identity()).unwrap().max_abs() < 1e-15);

        let t = iso().overstress(&c, &Tensor2::identity()).unwrap();
        let g = fd_stress_fn(|x| iso().energy(x, &Tensor2::identity()).unwrap(), &c, 1e-6);
        assert!((t - g).max_abs() < 1e-6 * t.max_abs());
        assert!(t.is_symmetric());
    }

    #[test]
    fn iso_overstress_vanishes_only_at_relaxation() {
        let c = Tensor2::diag(1.3, 0.9, 1.0 / 1.17);
        let ci = Tensor2::diag(1.1, 1.0, 1.0 / 1.1);
        assert!(iso().overstress(&c, &ci).unwrap().max_abs() > 1e-3);
    }

    #[test]
    fn iso_step_fixed_point() {
        let c = Tensor2::diag(1.44, 1.0 / 1.2, 1.0 / 1.2);
        let ci = c.unimodular().unwrap();
        let next = iso().evolve(&c, &ci, 0.1).unwrap();
        assert!((next - ci).max_abs() < 1e-15);
    }

    #[test]
    fn iso_step_is_first_order_consistent() {
        let c = Tensor2::diag(1.44, 1.0 / 1.2, 1.0 / 1.2);
        let ci = Tensor2::identity();
        let d1 = (iso().evolve(&c, &ci, 1e-3).unwrap() - ci).max_abs();
        let d2 = (iso().evolve(&c, &ci, 5e-4).unwrap() - ci).max_abs();
        assert!((d1 / d2 - 2.0).abs() < 1e-2);
    }

    #[test]
    fn iso_step_rejects_bad_dt() {
        let c = Tensor2::identity();
        assert!(iso().evolve(&c, &c, 0.0).is_err());
        assert!(iso().evolve(&c, &c, -1.0).is_err());
    }

    #[test]
    fn iso_step_keeps_unit_determinant() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        let mut ci = Tensor2::identity();
        let body = IsoMaxwell::new(5.0, 0.5).unwrap();
        for _ in 0..10_000 {
            let c = random_spd(&mut rng, 0.7, 1.4);
            ci = body.evolve(&c, &ci, 0.01).unwrap();
        }
        assert!((ci.det() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn fibre_overstress_examples() {
        let c = Tensor2::diag(0.8, 1.25, 1.0);
        let f = fibre();
        let l = f.stretch(&c).unwrap();
        assert!(f.overstress(&c, l).unwrap().stress.max_abs() < 1e-14);
        assert_eq!(f.prefactor(1.0, 1.0).unwrap(), 0.0);

        // f from its defining formula at λe² = (1.2/1.1)², divided by λi².
        let le2: f64 = (1.2f64 / 1.1).powi(2);
        let direct = 2.0 * 5.3 * (le2 - 1.0) * (0.8393 * (le2 - 1.0) * (le2 - 1.0)).exp() / (1.1 * 1.1);
        assert!((f.prefactor(1.2, 1.1).unwrap() - direct).abs() < 1e-14 * direct);
    }

    #[test]
    fn fibre_overstress_rejects_non_positive_stretch() {
        assert!(matches!(fibre().prefactor(0.0, 1.0), Err(Error::NonPositiveStretch { .. })));
        assert!(matches!(fibre().prefactor(1.0, -1.0), Err(Error::NonPositiveStretch { .. })));
    }

    #[test]
    fn fibre_overstress_gradient() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        let f = FibreMaxwell::new(5.3, 0.8393, 5.3, fibre_pair(0.5)[1]).unwrap();
        for _ in 0..20 {
            let c = random_spd(&mut rng, 0.7, 1.4);
            let t = f.overstress(&c, 1.05).unwrap().stress;
            let g = fd_stress_fn(|x| f.energy(x, 1.05).unwrap(), &c, 1e-6);
            assert!((t - g).max_abs() < 1e-5 * t.max_abs().max(1e-8));
        }
    }

    #[test]
    fn fibre_step_fixed_point_and_consistency() {
        let f = fibre();
        assert_eq!(f.evolve(1.3, 1.3, 0.1).unwrap(), 1.3);
        let d1 = f.evolve(1.3, 1.0, 1e-4).unwrap() - 1.0;
        let d2 = f.evolve(1.3, 1.0, 5e-5).unwrap() - 1.0;
        assert!(d1 > 0.0 && (d1 / d2 - 2.0).abs() < 1e-2);
    }

    #[test]
    fn fibre_step_relaxes_monotonically() {
        let f = fibre();
        let mut li = 1.0;
        for _ in 0..500 {
            let next = f.evolve(1.3, li, 0.01).unwrap();
            assert!(next >= li && next <= 1.3);
            li = next;
        }
        assert!((li - 1.3).abs() < 1e-6);

        // Unloading direction: relaxes down toward λ.
        let next = f.evolve(0.9, 1.2, 0.05).unwrap();
        assert!(next < 1.2 && next > 0.9);
    }

    #[test]
    fn fibre_step_is_stable_for_large_dt() {
        // Implicit steps never overshoot full relaxation.
        let li = fibre().evolve(1.3, 1.0, 1e3).unwrap();
        assert!(li < 1.3 && 1.3 - li < 1e-4);
    }

    #[test]
    fn fibre_step_guard() {
        assert!(matches!(fibre().evolve(6.0, 1.0, 0.01), Err(Error::NoConvergence { .. })));
        assert!(matches!(fibre().evolve(0.1, 1.0, 0.01), Err(Error::NoConvergence { .. })));
    }

    fn branches() -> MaxwellBranches {
        let [a, b] = fibre_pair(29f64.to_radians());
        MaxwellBranches {
            iso: iso(),
            fibres: vec![
                FibreMaxwell::new(5.3, 0.8393, 5.3, a).unwrap(),
                FibreMaxwell::new(5.3, 0.8393, 5.3, b).unwrap(),
            ],
        }
    }

    #[test]
    fn initial_state_examples() {
        let s = branches().initial_state(&PreStress::identity(), &Tensor2::identity()).unwrap();
        assert_eq!(s.ci, Tensor2::identity());
        assert!(s.lambda_i.iter().all(|&l| (l - 1.0).abs() < 1e-15));

        let (c, f) = (1.1, 0.9);
        let f0 = PreStress::new(Tensor2::diag(c * f, 1.0 / f, 1.0 / c)).unwrap();
        let s = branches().initial_state(&f0, &Tensor2::identity()).unwrap();
        let expected = Tensor2::diag((c * f as f64).powi(-2), f * f, c * c);
        assert!((s.ci - expected).max_abs() < 1e-14);
    }

    #[test]
    fn initial_state_has_no_overstress() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(29);
        let b = branches();
        for _ in 0..50 {
            let f0 = PreStress::new(random_unimodular(&mut rng)).unwrap();
            let s = b.initial_state(&f0, &Tensor2::identity()).unwrap();
            let c_sf = csf_from_clf(&Tensor2::identity(), &f0);
            assert!(b.overstress(&c_sf, &s).unwrap().max_abs() < 1e-12);
            assert!((s.ci.det() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn relaxation_dissipates_energy() {
        let b = branches();
        let c = Tensor2::diag(1.3, 1.0 / 1.2, 1.0 / 1.56 * 1.2);
        let c = c.unimodular().unwrap();
        let mut s = ViscousState { ci: Tensor2::identity(), lambda_i: vec![1.0, 1.0] };
        let mut w = b.energy(&c, &s).unwrap();
        let norm0 = b.overstress(&c, &s).unwrap().norm();
        let mut norm = norm0;
        for _ in 0..2000 {
            s = b.evolve(&c, &s, 0.02).unwrap();
            let w_next = b.energy(&c, &s).unwrap();
            let n_next = b.overstress(&c, &s).unwrap().norm();
            assert!(w_next <= w + 1e-14);
            assert!(n_next <= norm + 1e-12);
            w = w_next;
            norm = n_next;
        }
        assert!(norm < 1e-6 * norm0);
    }

    #[test]
    fn state_length_mismatch_is_rejected() {
        let s = ViscousState { ci: Tensor2::identity(), lambda_i: vec![1.0] };
        assert!(branches().overstress(&Tensor2::identity(), &s).is_err());
    }
}
