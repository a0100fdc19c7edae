//! Dense 3×3 tensors.
//!
//! Components are stored row-major in a fixed orthonormal basis. For tube
//! problems the basis is the local cylindrical triad {e_r, e_θ, e_z}; the
//! algebra itself does not care which basis is used.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub type Vector3 = [f64; 3];

/// Determinants with magnitude below this are treated as singular.
pub const SINGULAR_DET_TOL: f64 = 1e-14;

/// Relative tolerance of [`Tensor2::is_symmetric`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Second-order tensor in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor2(pub [[f64; 3]; 3]);

impl Tensor2 {
    pub const fn zero() -> Self {
        Tensor2([[0.0; 3]; 3])
    }

    pub const fn identity() -> Self {
        Tensor2([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub const fn diag(a: f64, b: f64, c: f64) -> Self {
        Tensor2([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub const fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Tensor2(rows)
    }

    /// Dyadic product `a ⊗ b`.
    pub fn dyad(a: &Vector3, b: &Vector3) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = a[i] * b[j];
            }
        }
        t
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        self.0
    }

    pub fn diagonal(&self) -> Vector3 {
        [self.0[0][0], self.0[1][1], self.0[2][2]]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if !(det.abs() > SINGULAR_DET_TOL) {
            return Err(Error::SingularTensor { det });
        }
        let a = &self.0;
        let inv_det = 1.0 / det;
        let adj = [
            [
                a[1][1] * a[2][2] - a[1][2] * a[2][1],
                a[0][2] * a[2][1] - a[0][1] * a[2][2],
                a[0][1] * a[1][2] - a[0][2] * a[1][1],
            ],
            [
                a[1][2] * a[2][0] - a[1][0] * a[2][2],
                a[0][0] * a[2][2] - a[0][2] * a[2][0],
                a[0][2] * a[1][0] - a[0][0] * a[1][2],
            ],
            [
                a[1][0] * a[2][1] - a[1][1] * a[2][0],
                a[0][1] * a[2][0] - a[0][0] * a[2][1],
                a[0][0] * a[1][1] - a[0][1] * a[1][0],
            ],
        ];
        Ok(Tensor2(adj) * inv_det)
    }

    /// Unimodular part `(det A)^{-1/3} A`.
    pub fn unimodular(&self) -> Result<Self> {
        let det = self.det();
        if !(det > 0.0) {
            return Err(Error::NonPositiveDeterminant { det });
        }
        Ok(*self * det.powf(-1.0 / 3.0))
    }

    /// Deviatoric part `A - (tr A / 3) 1`.
    pub fn deviator(&self) -> Self {
        let p = self.trace() / 3.0;
        let mut t = *self;
        for i in 0..3 {
            t.0[i][i] -= p;
        }
        t
    }

    /// Matrix product `A·B`.
    pub fn dot(&self, other: &Tensor2) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        t
    }

    pub fn dot_vec(&self, v: &Vector3) -> Vector3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| self.0[i][k] * v[k]).sum();
        }
        out
    }

    /// Double contraction `A : B = A_ij B_ij`.
    pub fn ddot(&self, other: &Tensor2) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[i][j];
            }
        }
        s
    }

    /// `v · A · v`.
    pub fn quadratic_form(&self, v: &Vector3) -> f64 {
        let av = self.dot_vec(v);
        av[0] * v[0] + av[1] * v[1] + av[2] * v[2]
    }

    /// `Aᵀ·A`, the right Cauchy-Green tensor when `A` is a deformation gradient.
    pub fn right_cauchy_green(&self) -> Self {
        self.transpose().dot(self)
    }

    /// `A·B·Aᵀ`.
    pub fn congruence(&self, b: &Tensor2) -> Self {
        self.dot(b).dot(&self.transpose())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    /// `|A - Aᵀ|_max ≤ tol·|A|_max`.
    pub fn is_symmetric_within(&self, tol: f64) -> bool {
        let scale = self.max_abs();
        let mut asym = 0.0_f64;
        for i in 0..3 {
            for j in (i + 1)..3 {
                asym = asym.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        asym <= tol * scale
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric_within(SYMMETRY_TOL)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetric_part(&self) -> Self {
        (*self + self.transpose()) * 0.5
    }

    /// Positive definiteness of the symmetric part (Sylvester's criterion).
    pub fn is_positive_definite(&self) -> bool {
        let s = self.symmetric_part().0;
        let m1 = s[0][0];
        let m2 = s[0][0] * s[1][1] - s[0][1] * s[1][0];
        m1 > 0.0 && m2 > 0.0 && self.symmetric_part().det() > 0.0
    }
}

impl Index<(usize, usize)> for Tensor2 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Tensor2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Tensor2 {
    type Output = Tensor2;
    fn add(mut self, rhs: Tensor2) -> Tensor2 {
        self += rhs;
        self
    }
}

impl AddAssign for Tensor2 {
    fn add_assign(&mut self, rhs: Tensor2) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Tensor2 {
    type Output = Tensor2;
    fn sub(self, rhs: Tensor2) -> Tensor2 {
        self + (-rhs)
    }
}

impl Neg for Tensor2 {
    type Output = Tensor2;
    fn neg(self) -> Tensor2 {
        self * -1.0
    }
}

impl Mul<f64> for Tensor2 {
    type Output = Tensor2;
    fn mul(mut self, s: f64) -> Tensor2 {
        for v in self.0.iter_mut().flatten() {
            *v *= s;
        }
        self
    }
}

impl Mul<Tensor2> for f64 {
    type Output = Tensor2;
    fn mul(self, t: Tensor2) -> Tensor2 {
        t * self
    }
}

impl Mul for Tensor2 {
    type Output = Tensor2;
    fn mul(self, rhs: Tensor2) -> Tensor2 {
        self.dot(&rhs)
    }
}
