//! Small derivative-free and least-squares local optimizers.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex minimizer.
#[derive(Clone, Copy, Debug)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Stop when the simplex diameter drops below this.
    pub xtol: f64,
    /// ... and the spread of simplex values drops below this.
    pub ftol: f64,
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            xtol: 1e-12,
            ftol: 1e-15,
            initial_step: 0.1,
        }
    }
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            simplex.push(x);
        }
        let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            iterations += 1;
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = values[n] - values[0];
            let diameter = simplex[1..]
                .iter()
                .map(|x| {
                    x.iter()
                        .zip(&simplex[0])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread <= self.ftol && diameter <= self.xtol {
                converged = true;
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|x| x[k]).sum::<f64>() / n as f64)
                .collect();
            let along =
                |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect() };
            let xr = along(1.0);
            let fr = f(&xr);
            if fr < values[0] {
                let xe = along(2.0);
                let fe = f(&xe);
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
            } else if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
            } else {
                let (xc, fc) = if fr < values[n] {
                    let xc = along(0.5);
                    let fc = f(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-0.5);
                    let fc = f(&xc);
                    (xc, fc)
                };
                if fc < values[n].min(fr) {
                    simplex[n] = xc;
                    values[n] = fc;
                } else {
                    // shrink toward the best vertex
                    for i in 1..=n {
                        let x: Vec<f64> = simplex[i]
                            .iter()
                            .zip(&simplex[0])
                            .map(|(a, b)| b + 0.5 * (a - b))
                            .collect();
                        values[i] = f(&x);
                        simplex[i] = x;
                    }
                }
            }
        }
        let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
        Minimum {
            x: simplex[best].clone(),
            value: values[best],
            iterations,
            converged,
        }
    }
}

/// Levenberg–Marquardt for small zero-residual least-squares problems, using
/// a central-difference Jacobian.
#[derive(Clone, Copy, Debug)]
pub struct LevenbergMarquardt {
    pub max_iter: usize,
    /// Stop when the parameter step drops below this.
    pub step_tol: f64,
    pub diff_step: f64,
}

impl Default for LevenbergMarquardt {
    fn default() -> Self {
        Self {
            max_iter: 200,
            step_tol: 1e-14,
            diff_step: 1e-7,
        }
    }
}

impl LevenbergMarquardt {
    /// Minimizes `Σ r_k(x)²`; `value` of the result is the residual norm.
    pub fn solve<F: FnMut(&[f64]) -> Vec<f64>>(&self, mut residuals: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut x = x0.to_vec();
        let mut r = DVector::from_vec(residuals(&x));
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            iterations += 1;
            let m = r.len();
            let mut jac = DMatrix::zeros(m, n);
            for k in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += self.diff_step;
                xm[k] -= self.diff_step;
                let rp = residuals(&xp);
                let rm = residuals(&xm);
                for i in 0..m {
                    jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * self.diff_step);
                }
            }
            let jt = jac.transpose();
            let jtj = &jt * &jac;
            let g = &jt * &r;
            let mut accepted = false;
            for _ in 0..30 {
                let mut a = jtj.clone();
                for k in 0..n {
                    a[(k, k)] += lambda * (1.0 + jtj[(k, k)]);
                }
                let Some(step) = a.lu().solve(&(-&g)) else {
                    lambda *= 10.0;
                    continue;
                };
                let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let rn = DVector::from_vec(residuals(&xn));
                let cn = rn.norm_squared();
                if cn <= cost {
                    let step_norm = step.amax();
                    x = xn;
                    r = rn;
                    cost = cn;
                    lambda = (lambda / 10.0).max(1e-15);
                    accepted = true;
                    if step_norm < self.step_tol {
                        converged = true;
                    }
                    break;
                }
                lambda *= 10.0;
            }
            if !accepted || converged || cost == 0.0 {
                converged = converged || cost == 0.0;
                break;
            }
        }
        Minimum {
            x,
            value: cost.sqrt(),
            iterations,
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_rosenbrock_minimum() {
        let nm = NelderMead {
            max_iter: 20_000,
            ..Default::default()
        };
        let m = nm.minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
        );
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn levenberg_marquardt_solves_zero_residual_system() {
        let lm = LevenbergMarquardt::default();
        let m = lm.solve(|x| vec![x[0] * x[0] - 2.0, x[0] * x[1] - 1.0], &[1.0, 1.0]);
        assert!(m.value < 1e-14);
        assert!((m.x[0] - 2f64.sqrt()).abs() < 1e-12);
    }
}
