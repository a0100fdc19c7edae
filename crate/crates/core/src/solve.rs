//! Small dense root finders and minimisers used by the tube solvers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on the residual ∞-norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Forward-difference step, relative to `max(|x_j|, 1)`.
    pub fd_step: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50, fd_step: 1e-7, max_halvings: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub x: Vec<f64>,
    pub residual: Vec<f64>,
    pub iterations: usize,
    /// Residual ∞-norm at the start and after every iteration.
    pub history: Vec<f64>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Newton-Raphson with a forward-difference Jacobian and step halving.
///
/// A failed residual evaluation inside the line search counts as "no
/// decrease", so the step is halved away from inadmissible regions.
pub fn newton<F>(mut f: F, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonReport>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let mut norm = inf_norm(&r);
    let mut history = vec![norm];
    for it in 0..opts.max_iter {
        if norm < opts.tol {
            return Ok(NewtonReport { x, residual: r, iterations: it, history });
        }
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let h = opts.fd_step * x[j].abs().max(1.0);
            let mut xp = x.clone();
            xp[j] += h;
            let rp = f(&xp)?;
            for i in 0..n {
                jac[i][j] = (rp[i] - r[i]) / h;
            }
        }
        let dx = solve_dense(jac, r.iter().map(|v| -v).collect())?;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + t * d).collect();
            if let Ok(rt) = f(&xt) {
                let nt = inf_norm(&rt);
                if nt.is_finite() && nt < norm {
                    accepted = Some((xt, rt, nt));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((xt, rt, nt)) => {
                x = xt;
                r = rt;
                norm = nt;
                history.push(norm);
            }
            None => {
                return Err(Error::NoConvergence {
                    context: "Newton line search found no decrease".into(),
                    iterations: it + 1,
                    residual: norm,
                    last: x,
                });
            }
        }
    }
    if norm < opts.tol {
        return Ok(NewtonReport { x, residual: r, iterations: opts.max_iter, history });
    }
    Err(Error::NoConvergence {
        context: "Newton iteration limit".into(),
        iterations: opts.max_iter,
        residual: norm,
        last: x,
    })
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        if !(a[p][k].abs() > 1e-14 * scale) {
            return Err(Error::SingularTensor { det: 0.0 });
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= m * a[k][j];
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop when every vertex lies within this distance of the best one.
    pub size_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { size_tol: 1e-10, max_iter: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Nelder-Mead simplex minimisation. Points where `f` fails are treated as
/// `+∞`, so the simplex steers back into the admissible region.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: &[f64], opts: &NelderMeadOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut eval = |x: &[f64]| f(x).ok().filter(|v| v.is_finite()).unwrap_or(f64::INFINITY);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    if !simplex[0].1.is_finite() {
        return Err(Error::Domain("Nelder-Mead start point is not admissible".into()));
    }
    for j in 0..n {
        let mut x = x0.to_vec();
        x[j] += step[j];
        let v = eval(&x);
        simplex.push((x, v));
    }

    let centroid = |s: &[(Vec<f64>, f64)]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        for (x, _) in &s[..n] {
            for j in 0..n {
                c[j] += x[j] / n as f64;
            }
        }
        c
    };
    let along = |c: &[f64], x: &[f64], t: f64| -> Vec<f64> { c.iter().zip(x).map(|(a, b)| a + t * (b - a)).collect() };

    for it in 0..opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&best).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
            .fold(0.0, f64::max);
        if size < opts.size_tol {
            return Ok(Minimum { x: best, value: simplex[0].1, iterations: it });
        }

        let c = centroid(&simplex);
        let worst = simplex[n].clone();
        let xr = along(&c, &worst.0, -1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(&c, &worst.0, -2.0);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(&c, &worst.0, -0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(&c, &worst.0, 0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        for k in 1..=n {
            let x = along(&best, &simplex[k].0, 0.5);
            let v = eval(&x);
            simplex[k] = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Err(Error::NoConvergence {
        context: "Nelder-Mead iteration limit".into(),
        iterations: opts.max_iter,
        residual: simplex[0].1,
        last: simplex[0].0.clone(),
    })
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`,
/// stopping when the bracket is shorter than `tol`.
pub fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_solve() {
        let a = vec![vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]];
        let x = solve_dense(a.clone(), vec![5.0, 3.0, 6.0]).unwrap();
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i][j] * x[j]).sum();
            assert!((r - [5.0, 3.0, 6.0][i]).abs() < 1e-14);
        }
        assert!(solve_dense(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn newton_on_intersecting_circles() {
        let f = |x: &[f64]| Ok(vec![x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1] * x[1] + 1.0]);
        let rep = newton(f, &[1.0, 1.0], &NewtonOptions::default()).unwrap();
        let x = (-1.0 + 13f64.sqrt()) / 2.0;
        assert!((rep.x[0] - x).abs() < 1e-10 && (rep.x[1] - (x + 1.0).sqrt()).abs() < 1e-10);
        assert!(rep.history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn newton_reports_last_iterate_on_failure() {
        let f = |x: &[f64]| Ok(vec![x[0] * x[0] + 1.0]);
        match newton(f, &[0.5], &NewtonOptions::default()) {
            Err(Error::NoConvergence { last, .. }) => assert_eq!(last.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let m = nelder_mead(f, &[-1.2, 1.0], &[0.1, 0.1], &NelderMeadOptions::default()).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nelder_mead_avoids_inadmissible_points() {
        let f = |x: &[f64]| {
            if x[0] <= 0.0 {
                Err(Error::Domain("negative".into()))
            } else {
                Ok(x[0] - x[0].ln() + (x[1] - 2.0).powi(2))
            }
        };
        let m = nelder_mead(f, &[0.05, 0.0], &[0.5, 0.5], &NelderMeadOptions::default()).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn golden_section_parabola() {
        let (x, v) = golden_section(|x| Ok((x - 0.3).powi(2) + 1.0), -1.0, 2.0, 1e-9).unwrap();
        // A quadratic minimum is only resolvable to about √ε.
        assert!((x - 0.3).abs() < 1e-7 && (v - 1.0).abs() < 1e-15);
    }
}
