//! Random tensors and finite-difference oracles for unit tests.

use rand::Rng;

use crate::constitutive::StrainEnergy;
use crate::tensor::Tensor2;

pub fn random_rotation<R: Rng>(rng: &mut R) -> Tensor2 {
    // Unit quaternion → rotation matrix.
    let mut q = [0.0f64; 4];
    loop {
        for v in &mut q {
            *v = rng.gen_range(-1.0..1.0);
        }
        let n2: f64 = q.iter().map(|v| v * v).sum();
        if n2 > 1e-3 && n2 <= 1.0 {
            let n = n2.sqrt();
            q.iter_mut().for_each(|v| *v /= n);
            break;
        }
    }
    let [w, x, y, z] = q;
    Tensor2::from_rows([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])
}

/// Symmetric positive-definite tensor with eigenvalues in `[lo, hi]`.
pub fn random_spd<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Tensor2 {
    let q = random_rotation(rng);
    let d = Tensor2::diag(rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi));
    q.dot(&d).dot(&q.transpose()).symmetric_part()
}

/// Well-conditioned tensor with positive determinant.
pub fn random_deformation<R: Rng>(rng: &mut R) -> Tensor2 {
    let mut f = Tensor2::identity();
    for v in f.0.iter_mut().flatten() {
        *v += rng.gen_range(-0.3..0.3);
    }
    f
}

pub fn random_unimodular<R: Rng>(rng: &mut R) -> Tensor2 {
    random_deformation(rng).unimodular().unwrap()
}

/// `2 ∂W/∂C` by central differences with symmetric perturbations.
pub fn fd_stress_fn(w: impl Fn(&Tensor2) -> f64, c: &Tensor2, h: f64) -> Tensor2 {
    let mut s = Tensor2::zero();
    for i in 0..3 {
        for j in i..3 {
            let mut e = Tensor2::zero();
            if i == j {
                e[(i, i)] = h;
            } else {
                e[(i, j)] = 0.5 * h;
                e[(j, i)] = 0.5 * h;
            }
            let d = (w(&(*c + e)) - w(&(*c - e))) / h;
            s[(i, j)] = d;
            s[(j, i)] = d;
        }
    }
    s
}

pub fn fd_stress<E: StrainEnergy>(model: &E, c: &Tensor2, h: f64) -> Tensor2 {
    fd_stress_fn(|x| model.energy(x).unwrap(), c, h)
}

/// Inner ("media") layer constants with the slower set of viscosities.
pub fn media_params() -> crate::tube::LayerParams {
    crate::tube::LayerParams {
        c1: 3.0,
        c2: 2.0,
        k1: 2.3632,
        k2: 0.8393,
        beta: 29f64.to_radians(),
        mu: 5.0,
        eta_matrix: 5.0,
        k1_visc: 5.3,
        k2_visc: 0.8393,
        eta_fibre: 5.3,
    }
}

/// Outer ("adventitia") layer constants.
pub fn adventitia_params() -> crate::tube::LayerParams {
    crate::tube::LayerParams {
        c1: 0.3,
        c2: 0.2,
        k1: 0.562,
        k2: 0.7112,
        beta: 62f64.to_radians(),
        mu: 1.0,
        eta_matrix: 1.0,
        k1_visc: 1.3,
        k2_visc: 0.7112,
        eta_fibre: 1.3,
    }
}
