//! Composite Gauss-Legendre quadrature with a panel-doubling check.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const GAUSS_POINTS: usize = 32;
pub const REL_TOL: f64 = 1e-10;
pub const ABS_FLOOR: f64 = 1e-14;
const MAX_PANELS: usize = 64;

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton from the Chebyshev-like
    /// initial guesses; weights `2 / ((1 − x²) P_n'(x)²)`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let dp = legendre(n, x).1;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(GAUSS_POINTS))
    }

    /// Sum over `panels` equal sub-intervals; also returns `∫|f|`.
    pub fn composite<F>(&self, f: &mut F, a: f64, b: f64, panels: usize) -> Result<(f64, f64)>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let h = (b - a) / panels as f64;
        let (mut sum, mut abs) = (0.0, 0.0);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let v = f(mid + 0.5 * h * x)?;
                if !v.is_finite() {
                    return Err(Error::Domain(format!("non-finite integrand at {}", mid + 0.5 * h * x)));
                }
                sum += w * v;
                abs += w * v.abs();
            }
        }
        Ok((0.5 * h * sum, 0.5 * h * abs))
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral of a smooth fallible integrand over `[a, b]`: one panel checked
/// against two, doubling until successive values agree to `REL_TOL` of
/// `∫|f|` (floored at `ABS_FLOOR`).
pub fn integrate<F>(mut f: F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussLegendre::standard();
    let mut panels = 1;
    let (mut coarse, _) = rule.composite(&mut f, a, b, panels)?;
    loop {
        panels *= 2;
        let (fine, abs) = rule.composite(&mut f, a, b, panels)?;
        let change = (fine - coarse).abs();
        if change <= (REL_TOL * abs).max(ABS_FLOOR) {
            return Ok(fine);
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureFailure { a, b, change });
        }
        coarse = fine;
    }
}

/// Integral over consecutive intervals `[b0, b1], [b1, b2], …`, so that
/// discontinuities at the breakpoints are never straddled.
pub fn integrate_piecewise<F>(mut f: F, breaks: &[f64]) -> Result<f64>
where
    F: FnMut(usize, f64) -> Result<f64>,
{
    let mut total = 0.0;
    for (i, w) in breaks.windows(2).enumerate() {
        total += integrate(|x| f(i, x), w[0], w[1])?;
    }
    Ok(total)
}
