//! Classical dynamics of the oscillator pair with hamiltonians `P^2 + Q^2`
//! and `A^2 + B^2`, its integrals of motion and the action-angle reduction.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::algebra::pair::IsotopicPair;
use crate::error::{Error, Result};
use crate::ode::{integrate_dp45, integrate_rk4, uniform_grid, AdaptiveConfig, Method};
use crate::oscillator::EpsilonParams;

/// `(P, Q, R, A, B, C)`: coordinates on `V1 = (p,q,r)` and `V2 = (a,b,c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassicalState {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ClassicalState {
    pub const ZERO: Self = Self::from_array([0.0; 6]);

    pub const fn from_array(v: [f64; 6]) -> Self {
        Self {
            p: v[0],
            q: v[1],
            r: v[2],
            a: v[3],
            b: v[4],
            c: v[5],
        }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let arr: [f64; 6] = v
            .try_into()
            .map_err(|_| Error::dimension("classical state", 6, v.len()))?;
        Ok(Self::from_array(arr))
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.p, self.q, self.r, self.a, self.b, self.c]
    }
}

/// The six displayed equations of motion.
pub fn rhs_full(s: &ClassicalState, e: &EpsilonParams<f64>) -> ClassicalState {
    let ClassicalState { p, q, r, a, b, c } = *s;
    ClassicalState {
        p: -4.0 * e.eps1 * (q * q * a + p * q * b) - 2.0 * e.eps3 * r * q * c,
        q: 4.0 * e.eps1 * (p * q * a + p * p * b) + 2.0 * e.eps3 * r * p * c,
        r: 2.0 * e.eps2 * (p * r * a - q * r * b),
        a: -4.0 * e.eps_t1 * (b * b * p + a * b * q) - 2.0 * e.eps_t3 * c * b * r,
        b: 4.0 * e.eps_t1 * (a * b * p + a * a * q) + 2.0 * e.eps_t3 * c * a * r,
        c: 2.0 * e.eps_t2 * (a * c * p - b * c * q),
    }
}

/// Dynamical equations of a pair for diagonal quadratic hamiltonians
/// `H1 = sum h1[i] x_i^2`, `H2 = sum h2[a] y_a^2`:
/// `x' = {H1, x}_y`, `y' = {H2, y}_x` with the linear Poisson brackets of the
/// isocommutators. Independent of [`rhs_full`]; used to cross-check it.
pub fn lie_poisson_rhs(pair: &IsotopicPair<f64>, h1: &[f64], h2: &[f64], x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let flow = |t: &crate::algebra::tensor::IsoTensor<f64>, h: &[f64], u: &[f64], iso: &[f64]| {
        let n = t.dim();
        (0..n)
            .map(|k| {
                let mut acc = 0.0;
                for (i, hi) in h.iter().enumerate() {
                    if *hi == 0.0 || u[i] == 0.0 {
                        continue;
                    }
                    for (aa, ia) in iso.iter().enumerate() {
                        for (out, uo) in u.iter().enumerate() {
                            acc += 2.0 * hi * u[i] * ia * t.get(aa, i, k, out) * uo;
                        }
                    }
                }
                acc
            })
            .collect::<Vec<f64>>()
    };
    (flow(pair.m1(), h1, x, y), flow(pair.m2(), h2, y, x))
}

/// Oscillator hamiltonian weights: `P^2 + Q^2` and `A^2 + B^2`.
pub const OSCILLATOR_WEIGHTS: [f64; 3] = [1.0, 1.0, 0.0];

/// The four integrals of motion, plus the mixed integral as printed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvariantSet {
    pub i1sq: f64,
    pub i2sq: f64,
    /// `RC - k (QA + PB)`, `k = (e2 + t2)/(e3 + t3)`; conserved by the flow.
    pub l: f64,
    /// `RC + k (QA + PB)` as printed; not conserved in general.
    pub l_printed: f64,
    /// `R^{t2/(e2+t2)} C^{-e2/(e2+t2)}`, absent unless `R, C > 0`.
    pub lambda: Option<f64>,
}

pub fn invariants(s: &ClassicalState, e: &EpsilonParams<f64>) -> Result<InvariantSet> {
    let k = e.kappa()?;
    let mixed = s.q * s.a + s.p * s.b;
    let sum2 = e.eps2 + e.eps_t2;
    let lambda = if s.r > 0.0 && s.c > 0.0 && sum2 != 0.0 {
        Some(((e.eps_t2 * s.r.ln() - e.eps2 * s.c.ln()) / sum2).exp())
    } else {
        None
    };
    Ok(InvariantSet {
        i1sq: s.p * s.p + s.q * s.q,
        i2sq: s.a * s.a + s.b * s.b,
        l: s.r * s.c - k * mixed,
        l_printed: s.r * s.c + k * mixed,
        lambda,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub method: Method,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<ClassicalState>,
    pub invariants: Vec<InvariantSet>,
    /// Accepted plus rejected steps for the adaptive method, grid steps for RK4.
    pub steps: usize,
}

/// Maximum relative drift of each integral over a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    pub i1sq: f64,
    pub i2sq: f64,
    pub l: f64,
    pub l_printed: f64,
    pub lambda: Option<f64>,
    pub r_sign_preserved: bool,
    pub c_sign_preserved: bool,
}

impl DriftReport {
    /// Largest drift among the four conserved quantities.
    pub fn max_conserved(&self) -> f64 {
        [self.i1sq, self.i2sq, self.l, self.lambda.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl Trajectory {
    /// Relative drift `max_t |I(t) - I(0)| / scale`. The scale is `|I(0)|`,
    /// except for the mixed integrals, whose initial value can vanish through
    /// cancellation; they are measured against `|RC| + |k (QA + PB)|` at t = 0.
    pub fn drift(&self, e: &EpsilonParams<f64>) -> Result<DriftReport> {
        let s0 = self.states[0];
        let i0 = self.invariants[0];
        let k = e.kappa()?;
        let mixed_scale = (s0.r * s0.c).abs() + (k * (s0.q * s0.a + s0.p * s0.b)).abs();
        let rel = |f: &dyn Fn(&InvariantSet) -> f64, scale: f64| {
            let scale = if scale > 0.0 { scale } else { 1.0 };
            self.invariants
                .iter()
                .map(|inv| (f(inv) - f(&i0)).abs() / scale)
                .fold(0.0, f64::max)
        };
        let lambda = match i0.lambda {
            Some(l0) => {
                let mut worst = 0.0f64;
                for inv in &self.invariants {
                    match inv.lambda {
                        Some(l) => worst = worst.max((l - l0).abs() / l0.abs()),
                        None => worst = f64::INFINITY,
                    }
                }
                Some(worst)
            }
            None => None,
        };
        let sign_kept = |f: fn(&ClassicalState) -> f64| {
            let s = f(&s0).signum();
            f(&s0) == 0.0 || self.states.iter().all(|st| f(st) == 0.0 || f(st).signum() == s)
        };
        Ok(DriftReport {
            i1sq: rel(&|i| i.i1sq, i0.i1sq.abs()),
            i2sq: rel(&|i| i.i2sq, i0.i2sq.abs()),
            l: rel(&|i| i.l, i0.l.abs().max(mixed_scale)),
            l_printed: rel(&|i| i.l_printed, i0.l_printed.abs().max(mixed_scale)),
            lambda,
            r_sign_preserved: sign_kept(|s| s.r),
            c_sign_preserved: sign_kept(|s| s.c),
        })
    }

    /// Continuous polar angles `(phi, psi)` of `(P, Q)` and `(A, B)`.
    pub fn angles(&self) -> Result<Vec<(f64, f64)>> {
        let phi = unwrap(self.states.iter().map(|s| (s.p, s.q)), &self.times)?;
        let psi = unwrap(self.states.iter().map(|s| (s.a, s.b)), &self.times)?;
        Ok(phi.into_iter().zip(psi).collect())
    }

    /// CSV with columns `t,P,Q,R,A,B,C,I1sq,I2sq,L,Lambda,theta,chi,xi`.
    /// Angle columns are blank when an amplitude vanishes. `stride` keeps every
    /// `stride`-th sample plus the last.
    pub fn write_csv<W: Write>(&self, e: &EpsilonParams<f64>, out: W, stride: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        let angles = self.angles().ok();
        let stride = stride.max(1);
        let last = self.times.len() - 1;
        for i in (0..self.times.len()).filter(|i| i % stride == 0 || *i == last) {
            let s = &self.states[i];
            let inv = &self.invariants[i];
            let mut row: Vec<String> = vec![fmt(self.times[i])];
            row.extend(s.to_array().iter().map(|v| fmt(*v)));
            row.push(fmt(inv.i1sq));
            row.push(fmt(inv.i2sq));
            row.push(fmt(inv.l));
            row.push(inv.lambda.map(fmt).unwrap_or_default());
            match &angles {
                Some(a) => {
                    let (phi, psi) = a[i];
                    let theta = phi + psi;
                    let chi = e.eps3 * psi - e.eps_t3 * phi;
                    row.push(fmt(theta));
                    row.push(fmt(chi));
                    row.push(fmt(XiForm::Printed.value(e, theta, chi)));
                }
                None => row.extend(std::iter::repeat(String::new()).take(3)),
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub const CSV_COLUMNS: [&str; 14] = [
    "t", "P", "Q", "R", "A", "B", "C", "I1sq", "I2sq", "L", "Lambda", "theta", "chi", "xi",
];

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// Nearest-branch continuation of `atan2`, refusing jumps of `pi/2` or more.
fn unwrap(points: impl Iterator<Item = (f64, f64)>, times: &[f64]) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::new();
    for (i, (x, y)) in points.enumerate() {
        if x == 0.0 && y == 0.0 {
            return Err(Error::Precondition("angle undefined at zero amplitude".into()));
        }
        let raw = y.atan2(x);
        match out.last() {
            None => out.push(raw),
            Some(&prev) => {
                let turns = ((prev - raw) / (2.0 * PI)).round();
                let next = raw + turns * 2.0 * PI;
                if (next - prev).abs() >= PI / 2.0 {
                    return Err(Error::Integration {
                        t: times[i],
                        reason: format!("angle jumped by {:.3} between samples", next - prev),
                    });
                }
                out.push(next);
            }
        }
    }
    Ok(out)
}

fn full_field(e: EpsilonParams<f64>) -> impl Fn(&[f64]) -> Vec<f64> {
    move |y: &[f64]| {
        let s = ClassicalState::from_slice(y).expect("six components");
        rhs_full(&s, &e).to_array().to_vec()
    }
}

/// Integrates the full system on a uniform grid.
pub fn integrate_full(
    s0: &ClassicalState,
    e: &EpsilonParams<f64>,
    t_end: f64,
    dt: f64,
    method: Method,
) -> Result<Trajectory> {
    integrate_full_with(s0, e, t_end, dt, method, &AdaptiveConfig::default())
}

pub fn integrate_full_with(
    s0: &ClassicalState,
    e: &EpsilonParams<f64>,
    t_end: f64,
    dt: f64,
    method: Method,
    adaptive: &AdaptiveConfig,
) -> Result<Trajectory> {
    let grid = uniform_grid(t_end, dt)?;
    let field = full_field(e.clone());
    let (raw, steps) = match method {
        Method::Rk4 => (integrate_rk4(field, &s0.to_array(), &grid)?, grid.len() - 1),
        Method::Rk45 => integrate_dp45(field, &s0.to_array(), &grid, adaptive)?,
    };
    let states: Vec<ClassicalState> = raw
        .iter()
        .map(|v| ClassicalState::from_slice(v))
        .collect::<Result<_>>()?;
    let invariants = states.iter().map(|s| invariants(s, e)).collect::<Result<_>>()?;
    Ok(Trajectory {
        method,
        dt,
        times: grid,
        states,
        invariants,
        steps,
    })
}

/// Reduced variables `theta = phi + psi`, `chi = e3 psi - t3 phi`, `R`, `C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReducedState {
    pub theta: f64,
    pub chi: f64,
    pub r: f64,
    pub c: f64,
}

/// Right-hand side of the reduced system at fixed amplitudes `i1`, `i2`:
/// `phi' = 4 e1 I1 I2 sin(theta) + 2 e3 RC`, `psi' = 4 t1 I1 I2 sin(theta) + 2 t3 RC`,
/// `R' = 2 e2 I1 I2 cos(theta) R`, `C' = 2 t2 I1 I2 cos(theta) C`.
pub fn rhs_reduced(s: &ReducedState, e: &EpsilonParams<f64>, i1: f64, i2: f64) -> ReducedState {
    let amp = i1 * i2;
    let (sin, cos) = s.theta.sin_cos();
    let rc = s.r * s.c;
    let phi_dot = 4.0 * e.eps1 * amp * sin + 2.0 * e.eps3 * rc;
    let psi_dot = 4.0 * e.eps_t1 * amp * sin + 2.0 * e.eps_t3 * rc;
    ReducedState {
        theta: phi_dot + psi_dot,
        chi: e.eps3 * psi_dot - e.eps_t3 * phi_dot,
        r: 2.0 * e.eps2 * amp * cos * s.r,
        c: 2.0 * e.eps_t2 * amp * cos * s.c,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
    pub i1: f64,
    pub i2: f64,
    /// Max-norm deviation of the reconstructed `(P,Q,R,A,B,C)` from the full integration.
    pub reconstruction_error: f64,
    pub full: Trajectory,
}

impl ReducedState {
    /// Angles `(phi, psi)` recovered from `theta` and `chi`.
    pub fn angles(&self, e: &EpsilonParams<f64>) -> (f64, f64) {
        let s = e.eps3 + e.eps_t3;
        ((e.eps3 * self.theta - self.chi) / s, (self.chi + e.eps_t3 * self.theta) / s)
    }

    pub fn reconstruct(&self, e: &EpsilonParams<f64>, i1: f64, i2: f64) -> ClassicalState {
        let (phi, psi) = self.angles(e);
        ClassicalState {
            p: i1 * phi.cos(),
            q: i1 * phi.sin(),
            r: self.r,
            a: i2 * psi.cos(),
            b: i2 * psi.sin(),
            c: self.c,
        }
    }
}

/// Integrates the reduced system with RK4 and compares the reconstruction
/// against an RK4 integration of the full system on the same grid.
pub fn reduce_and_integrate(s0: &ClassicalState, e: &EpsilonParams<f64>, t_end: f64, dt: f64) -> Result<ReducedTrajectory> {
    let i1 = s0.p.hypot(s0.q);
    let i2 = s0.a.hypot(s0.b);
    if i1 == 0.0 || i2 == 0.0 {
        return Err(Error::Precondition("reduction needs nonzero amplitudes I1, I2".into()));
    }
    if e.eps3 + e.eps_t3 == 0.0 {
        return Err(Error::Params("e3 + t3 = 0".into()));
    }
    let phi0 = s0.q.atan2(s0.p);
    let psi0 = s0.b.atan2(s0.a);
    let r0 = ReducedState {
        theta: phi0 + psi0,
        chi: e.eps3 * psi0 - e.eps_t3 * phi0,
        r: s0.r,
        c: s0.c,
    };
    let grid = uniform_grid(t_end, dt)?;
    let params = e.clone();
    let field = move |y: &[f64]| {
        let s = ReducedState {
            theta: y[0],
            chi: y[1],
            r: y[2],
            c: y[3],
        };
        let d = rhs_reduced(&s, &params, i1, i2);
        vec![d.theta, d.chi, d.r, d.c]
    };
    let raw = integrate_rk4(field, &[r0.theta, r0.chi, r0.r, r0.c], &grid)?;
    let states: Vec<ReducedState> = raw
        .iter()
        .map(|y| ReducedState {
            theta: y[0],
            chi: y[1],
            r: y[2],
            c: y[3],
        })
        .collect();
    let full = integrate_full(s0, e, t_end, dt, Method::Rk4)?;
    let reconstruction_error = states
        .iter()
        .zip(&full.states)
        .map(|(rs, fs)| {
            let rec = rs.reconstruct(e, i1, i2).to_array();
            rec.iter().zip(fs.to_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(ReducedTrajectory {
        times: grid,
        states,
        i1,
        i2,
        reconstruction_error,
        full,
    })
}

/// Which linear combination of `chi` and `theta` to fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum XiForm {
    /// `(e2 + t2) chi + 2 e1 (e3 - t3) theta`, predicted slope `4 L (t3^2 - e3^2) e1`
    /// with the printed `L`.
    Printed,
    /// `(e2 + t2) chi + 2 (e1 t3 - t1 e3) theta`, whose derivative is
    /// `4 (e1 t3 - t1 e3)(e3 + t3) L` exactly along the flow.
    Derived,
}

impl XiForm {
    pub fn value(self, e: &EpsilonParams<f64>, theta: f64, chi: f64) -> f64 {
        let w = match self {
            XiForm::Printed => 2.0 * e.eps1 * (e.eps3 - e.eps_t3),
            XiForm::Derived => 2.0 * (e.eps1 * e.eps_t3 - e.eps_t1 * e.eps3),
        };
        (e.eps2 + e.eps_t2) * chi + w * theta
    }

    pub fn predicted_slope(self, e: &EpsilonParams<f64>, inv: &InvariantSet) -> f64 {
        match self {
            XiForm::Printed => 4.0 * inv.l_printed * (e.eps_t3 * e.eps_t3 - e.eps3 * e.eps3) * e.eps1,
            XiForm::Derived => 4.0 * (e.eps1 * e.eps_t3 - e.eps_t1 * e.eps3) * (e.eps3 + e.eps_t3) * inv.l,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XiFit {
    pub form: XiForm,
    pub predicted_slope: f64,
    pub fitted_slope: f64,
    pub intercept: f64,
    /// `|fitted - predicted| / max(|predicted|, 1)`.
    pub slope_error: f64,
    /// Largest deviation of `xi(t)` from the fitted line.
    pub max_residual: f64,
}

/// Least-squares line through `xi(t)` computed from the unwrapped polar angles.
pub fn xi_check(traj: &Trajectory, e: &EpsilonParams<f64>, form: XiForm) -> Result<XiFit> {
    let angles = traj.angles()?;
    let xs = &traj.times;
    let ys: Vec<f64> = angles
        .iter()
        .map(|&(phi, psi)| form.value(e, phi + psi, e.eps3 * psi - e.eps_t3 * phi))
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("need at least two distinct sample times".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    let predicted = form.predicted_slope(e, &traj.invariants[0]);
    Ok(XiFit {
        form,
        predicted_slope: predicted,
        fitted_slope: slope,
        intercept,
        slope_error: (slope - predicted).abs() / predicted.abs().max(1.0),
        max_residual,
    })
}
