//! Fixed-step RK4 and adaptive Dormand-Prince 5(4) for autonomous systems on `R^n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Rk45,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" => Ok(Method::Rk4),
            "rk45" | "dp45" => Ok(Method::Rk45),
            other => Err(Error::Input(format!("unknown integrator '{other}'"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::Rk45 => "rk45",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_steps: 10_000_000,
        }
    }
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn check_finite(t: f64, y: &[f64]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Integration {
            t,
            reason: "state became non-finite".into(),
        })
    }
}

/// One classical Runge-Kutta step.
pub fn rk4_step(f: &impl Fn(&[f64]) -> Vec<f64>, y: &[f64], h: f64) -> Vec<f64> {
    let k1 = f(y);
    let k2 = f(&axpy(y, h / 2.0, &k1));
    let k3 = f(&axpy(y, h / 2.0, &k2));
    let k4 = f(&axpy(y, h, &k3));
    y.iter()
        .enumerate()
        .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Uniform grid `t_k = k dt` up to `t_end`; the last interval is shortened if
/// `t_end` is not a multiple of `dt`.
pub fn uniform_grid(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Params(format!("need dt > 0 and t_end > 0, got dt={dt}, t_end={t_end}")));
    }
    let n = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    grid.push(t_end);
    Ok(grid)
}

/// RK4 over a uniform grid; returns one state per grid point.
pub fn integrate_rk4(f: impl Fn(&[f64]) -> Vec<f64>, y0: &[f64], grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_finite(0.0, y0)?;
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0.to_vec());
    for w in grid.windows(2) {
        let y = rk4_step(&f, out.last().expect("nonempty"), w[1] - w[0]);
        check_finite(w[1], &y)?;
        out.push(y);
    }
    Ok(out)
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince trial step: `(5th-order solution, error norm)`.
fn dp_step(f: &impl Fn(&[f64]) -> Vec<f64>, y: &[f64], h: f64, cfg: &AdaptiveConfig) -> (Vec<f64>, f64) {
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    for s in 0..7 {
        let mut ys = y.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..n {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k.push(f(&ys));
    }
    let mut y5 = y.to_vec();
    let mut err = 0.0f64;
    for i in 0..n {
        let mut s5 = 0.0;
        let mut s4 = 0.0;
        for s in 0..7 {
            s5 += B5[s] * k[s][i];
            s4 += B4[s] * k[s][i];
        }
        y5[i] += h * s5;
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y5[i].abs());
        let e = h * (s5 - s4) / sc;
        err += e * e;
    }
    (y5, (err / n.max(1) as f64).sqrt())
}

/// Adaptive Dormand-Prince, landing exactly on every grid point.
pub fn integrate_dp45(
    f: impl Fn(&[f64]) -> Vec<f64>,
    y0: &[f64],
    grid: &[f64],
    cfg: &AdaptiveConfig,
) -> Result<(Vec<Vec<f64>>, usize)> {
    check_finite(0.0, y0)?;
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0.to_vec());
    let mut y = y0.to_vec();
    let mut t = grid.first().copied().unwrap_or(0.0);
    let mut h = grid.get(1).map_or(1e-3, |g| (g - t).abs()).max(1e-8);
    let mut steps = 0usize;
    for &target in &grid[1..] {
        while t < target {
            if steps >= cfg.max_steps {
                return Err(Error::Integration {
                    t,
                    reason: "adaptive step budget exhausted".into(),
                });
            }
            let h_try = h.min(target - t);
            let (y_new, err) = dp_step(&f, &y, h_try, cfg);
            steps += 1;
            if !err.is_finite() {
                h = h_try / 10.0;
                if h < 1e-14 * target.abs().max(1.0) {
                    return Err(Error::Integration {
                        t,
                        reason: "step size underflow".into(),
                    });
                }
                continue;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if h_try == target - t { target } else { t + h_try };
                y = y_new;
                check_finite(t, &y)?;
                // only grow from full steps; a step clipped to hit the grid says little
                if h_try >= h {
                    h *= factor;
                }
            } else {
                h = h_try * factor;
                if h < 1e-14 * target.abs().max(1.0) {
                    return Err(Error::Integration {
                        t,
                        reason: "step size underflow".into(),
                    });
                }
            }
        }
        out.push(y.clone());
    }
    Ok((out, steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(y: &[f64]) -> Vec<f64> {
        vec![-y[0]]
    }

    #[test]
    fn grid_is_uniform_with_short_tail() {
        let g = uniform_grid(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[3] - 0.9).abs() < 1e-15);
        assert_eq!(*g.last().unwrap(), 1.0);
        let g = uniform_grid(1.0, 0.25).unwrap();
        assert_eq!(g.len(), 5);
        assert!(uniform_grid(1.0, 0.0).is_err());
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |dt: f64| {
            let g = uniform_grid(1.0, dt).unwrap();
            let y = integrate_rk4(decay, &[1.0], &g).unwrap();
            (y.last().unwrap()[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn dp45_meets_tolerance() {
        let g = vec![0.0, 0.5, 1.0, 2.0];
        let (y, steps) = integrate_dp45(decay, &[1.0], &g, &AdaptiveConfig::default()).unwrap();
        for (t, v) in g.iter().zip(&y) {
            assert!((v[0] - (-t).exp()).abs() < 1e-8);
        }
        assert!(steps > 3);
    }

    #[test]
    fn blow_up_is_reported() {
        let g = uniform_grid(10.0, 0.1).unwrap();
        let r = integrate_rk4(|y: &[f64]| vec![y[0] * y[0] * 1e10], &[1.0], &g);
        assert!(matches!(r, Err(Error::Integration { .. })));
    }
}
