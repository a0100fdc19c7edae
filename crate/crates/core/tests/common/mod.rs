//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use prestress_tube::{LayerMaterial, LayerParams, MaterialLayer, SectorGeometry, Tensor2};
use rand::Rng;

pub fn media(eta_matrix: f64, eta_fibre: f64) -> LayerParams {
    LayerParams {
        c1: 3.0,
        c2: 2.0,
        k1: 2.3632,
        k2: 0.8393,
        beta: 29f64.to_radians(),
        mu: 5.0,
        eta_matrix,
        k1_visc: 5.3,
        k2_visc: 0.8393,
        eta_fibre,
    }
}

pub fn adventitia(eta_matrix: f64, eta_fibre: f64) -> LayerParams {
    LayerParams {
        c1: 0.3,
        c2: 0.2,
        k1: 0.562,
        k2: 0.7112,
        beta: 62f64.to_radians(),
        mu: 1.0,
        eta_matrix,
        k1_visc: 1.3,
        k2_visc: 0.7112,
        eta_fibre,
    }
}

/// Materials of the single-angle tube (faster viscosities).
pub fn table1_materials() -> Vec<LayerMaterial> {
    vec![
        LayerMaterial::new(media(0.5, 0.53)).unwrap(),
        LayerMaterial::new(adventitia(0.1, 0.13)).unwrap(),
    ]
}

/// Two sectors of different opening angles (slower viscosities).
pub fn table3_layers() -> Vec<MaterialLayer> {
    vec![
        MaterialLayer {
            sector: SectorGeometry::new(1.0, 1.4, 1.0, 160f64.to_radians()).unwrap(),
            material: LayerMaterial::new(media(5.0, 5.3)).unwrap(),
        },
        MaterialLayer {
            sector: SectorGeometry::new(1.5, 1.8, 1.0, 140f64.to_radians()).unwrap(),
            material: LayerMaterial::new(adventitia(1.0, 1.3)).unwrap(),
        },
    ]
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Orthogonal matrix from Gram-Schmidt on a random Gaussian-ish matrix.
pub fn random_orthogonal<R: Rng>(rng: &mut R) -> Tensor2 {
    loop {
        let mut v = [[0.0f64; 3]; 3];
        for row in &mut v {
            for x in row.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
        }
        let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let mut q = [[0.0f64; 3]; 3];
        let mut ok = true;
        for i in 0..3 {
            let mut w = v[i];
            for j in 0..i {
                let p = dot(&w, &q[j]);
                for k in 0..3 {
                    w[k] -= p * q[j][k];
                }
            }
            let n = dot(&w, &w).sqrt();
            if n < 1e-3 {
                ok = false;
                break;
            }
            q[i] = w.map(|x| x / n);
        }
        if ok {
            return Tensor2::from_rows(q);
        }
    }
}

/// SPD tensor with eigenvalues drawn from `[lo, hi]`.
pub fn random_spd<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Tensor2 {
    let q = random_orthogonal(rng);
    let d = Tensor2::diag(rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi));
    (q * d * q.transpose()).symmetric_part()
}

/// Unimodular tensor with positive determinant: `R · diag(a, b, 1/(ab))`
/// followed by a shear.
pub fn random_unimodular<R: Rng>(rng: &mut R) -> Tensor2 {
    let a = rng.gen_range(0.7..1.4);
    let b = rng.gen_range(0.7..1.4);
    let mut shear = Tensor2::identity();
    shear[(0, 1)] = rng.gen_range(-0.3..0.3);
    shear[(1, 2)] = rng.gen_range(-0.3..0.3);
    let mut q = random_orthogonal(rng);
    if q.det() < 0.0 {
        q = -q;
    }
    q * Tensor2::diag(a, b, 1.0 / (a * b)) * shear
}

/// `2 ∂W/∂C` by central differences over symmetric perturbations of `C`.
pub fn pk2_by_differences(w: impl Fn(&Tensor2) -> f64, c: &Tensor2, h: f64) -> Tensor2 {
    let mut s = Tensor2::zero();
    for i in 0..3 {
        for j in i..3 {
            let mut e = Tensor2::zero();
            e[(i, j)] = h;
            e[(j, i)] = h;
            let d = (w(&(*c + e)) - w(&(*c - e))) / (2.0 * h);
            // A diagonal bump moves one component by h, an off-diagonal one
            // moves two.
            let v = if i == j { 2.0 * d } else { d };
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Classical fourth-order Runge-Kutta for `y' = f(y)` with tensor state.
pub fn rk4_tensor(f: impl Fn(&Tensor2) -> Tensor2, y0: Tensor2, h: f64, steps: usize, every: usize) -> Vec<Tensor2> {
    let mut y = y0;
    let mut out = vec![y];
    for n in 1..=steps {
        let k1 = f(&y);
        let k2 = f(&(y + k1 * (0.5 * h)));
        let k3 = f(&(y + k2 * (0.5 * h)));
        let k4 = f(&(y + k3 * h));
        y = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if n % every == 0 {
            out.push(y);
        }
    }
    out
}

pub fn rk4_scalar(f: impl Fn(f64) -> f64, y0: f64, h: f64, steps: usize, every: usize) -> Vec<f64> {
    let mut y = y0;
    let mut out = vec![y];
    for n in 1..=steps {
        let k1 = f(y);
        let k2 = f(y + 0.5 * h * k1);
        let k3 = f(y + 0.5 * h * k2);
        let k4 = f(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if n % every == 0 {
            out.push(y);
        }
    }
    out
}

/// Right-hand side of the isotropic Maxwell flow
/// `Ċi = (μ/η)(C̄ Ci⁻¹ − ⅓ tr(C̄ Ci⁻¹) 1) Ci`.
pub fn iso_rate(c: &Tensor2, mu: f64, eta: f64) -> impl Fn(&Tensor2) -> Tensor2 {
    let c_bar = *c * c.det().powf(-1.0 / 3.0);
    move |ci: &Tensor2| {
        let x = c_bar * ci.inverse().unwrap();
        let dev = x - Tensor2::identity() * (x.trace() / 3.0);
        dev * *ci * (mu / eta)
    }
}

/// Right-hand side of the fibre Maxwell flow
/// `λ̇i = λi (1/η) f(λe²) λe²`, `f(y) = 2 k1 (y − 1) exp(k2 (y − 1)²)`.
pub fn fibre_rate(lambda: f64, k1: f64, k2: f64, eta: f64) -> impl Fn(f64) -> f64 {
    move |li: f64| {
        let y = (lambda / li).powi(2);
        let f = 2.0 * k1 * (y - 1.0) * (k2 * (y - 1.0).powi(2)).exp();
        li * f * y / eta
    }
}
