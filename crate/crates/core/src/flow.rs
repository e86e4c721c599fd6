//! The exact flow solver (inverting `Psi` or `Phi` along a trajectory), the
//! reference integrators RK4 and RKF45, and the error metrics comparing them.

use num_complex::Complex64;
use thiserror::Error;

use crate::newton::FieldSpec;
use crate::{is_singular, wrap_angle};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("field carries no first integrals; supply a rational form, psi or phi")]
    NoFirstIntegrals,
    #[error("initial point is singular for the field")]
    SingularStart,
    #[error("trajectory left the solvable region at tau = {reached_tau}")]
    SingularityReached { reached_tau: f64 },
}

/// How a trajectory was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectorySource {
    Exact,
    Rk4 { h: f64 },
    Rkf45 { tol: f64 },
}

/// Sampled trajectory `(tau, z(tau))` with strictly increasing `tau`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, Complex64)>,
    pub source: TrajectorySource,
    /// Set when integration stopped early (overflow or step underflow).
    pub truncated: bool,
}

/// Inner Newton solve: tolerance on the residual in `Psi`-space, relative to
/// the target magnitude. Much tighter than the contract (1e-12 * (1 + |tau|))
/// so that downstream relative-deviation metrics stay at rounding level.
const SOLVE_TOL: f64 = 1e-14;
const MAX_NEWTON_ITERS: usize = 40;
const MIN_SUBSTEP: f64 = 1e-6;

/// The point `z(tau)` of the exact trajectory through `z0`, found by solving
/// `Psi(z) = Psi(z0) + tau` (flow-box identity) with analytic-derivative
/// Newton steps `dz = -(Psi(z) - target) * f(z)`, continued in substeps from
/// the previous point. Fields carrying only `Phi` are solved on
/// `Phi(z) = Phi(z0) e^{-tau}` instead, which avoids logarithm branch cuts.
pub fn exact_point(spec: &FieldSpec, z0: Complex64, tau: f64) -> Result<Complex64, FlowError> {
    exact_continuation(spec, z0, tau, &mut |_, _| {})
}

/// Exact trajectory sampled at `n` equal steps of `tau_end/n`.
pub fn exact_trajectory(
    spec: &FieldSpec,
    z0: Complex64,
    tau_end: f64,
    n: usize,
) -> Result<Trajectory, FlowError> {
    let mut samples = vec![(0.0, z0)];
    let step = tau_end / n as f64;
    let mut truncated = false;
    // Continue from the previous point instead of re-solving from scratch.
    let mut z = z0;
    let mut psi_offset = 0.0;
    for k in 1..=n {
        match exact_continuation(spec, z, step, &mut |_, _| {}) {
            Ok(next) => {
                z = next;
                psi_offset += step;
                samples.push((psi_offset, z));
            }
            Err(_) => {
                truncated = true;
                break;
            }
        }
        let _ = k;
    }
    Ok(Trajectory {
        samples,
        source: TrajectorySource::Exact,
        truncated,
    })
}

fn exact_continuation(
    spec: &FieldSpec,
    z0: Complex64,
    tau: f64,
    observe: &mut dyn FnMut(f64, Complex64),
) -> Result<Complex64, FlowError> {
    if !spec.has_first_integrals() {
        return Err(FlowError::NoFirstIntegrals);
    }
    if tau == 0.0 {
        return Ok(z0);
    }
    let use_psi = spec.prefers_psi_route();
    let total = tau.abs();
    let dir = tau.signum();

    let psi0 = spec.psi(z0).ok_or(FlowError::NoFirstIntegrals)?;
    if is_singular(psi0) {
        return Err(FlowError::SingularStart);
    }
    let phi0 = spec.phi(z0).ok_or(FlowError::NoFirstIntegrals)?;
    if !use_psi && (is_singular(phi0) || phi0 == Complex64::new(0.0, 0.0)) {
        return Err(FlowError::SingularStart);
    }

    let mut z = z0;
    let mut reached = 0.0f64;
    let mut step = (0.1f64).min(total / 10.0).max(MIN_SUBSTEP.min(total));
    while reached < total * (1.0 - 1e-15) {
        let s = step.min(total - reached);
        let t_next = reached + s;
        let attempt = if use_psi {
            solve_psi_target(spec, z, psi0 + Complex64::new(dir * t_next, 0.0))
        } else {
            solve_phi_target(spec, z, phi0 * (-dir * t_next as f64).exp())
        };
        match attempt {
            Some(next) => {
                z = next;
                reached = t_next;
                observe(dir * reached, z);
                step = (step * 2.0).min(0.1);
            }
            None => {
                step *= 0.5;
                if step < MIN_SUBSTEP {
                    return Err(FlowError::SingularityReached {
                        reached_tau: dir * reached,
                    });
                }
            }
        }
    }
    Ok(z)
}

fn solve_psi_target(spec: &FieldSpec, start: Complex64, target: Complex64) -> Option<Complex64> {
    let mut z = start;
    let tol = SOLVE_TOL * (1.0 + target.norm());
    for _ in 0..MAX_NEWTON_ITERS {
        let psi = spec.psi(z)?;
        if is_singular(psi) {
            return None;
        }
        let g = psi - target;
        if g.norm() <= tol {
            return Some(z);
        }
        let f = spec.f(z);
        if is_singular(f) || f == Complex64::new(0.0, 0.0) {
            return None;
        }
        // g' = Psi' = 1/f, so the Newton update is dz = -g * f.
        let dz = -g * f;
        // A step far beyond the substep scale means the substep was too greedy.
        if dz.norm() > 1.0 + start.norm() {
            return None;
        }
        z += dz;
    }
    None
}

fn solve_phi_target(spec: &FieldSpec, start: Complex64, target: Complex64) -> Option<Complex64> {
    let mut z = start;
    let tol = SOLVE_TOL * target.norm().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_NEWTON_ITERS {
        let phi = spec.phi(z)?;
        if is_singular(phi) {
            return None;
        }
        let g = phi - target;
        if g.norm() <= tol {
            return Some(z);
        }
        let dphi = spec.phi_derivative(z)?;
        if is_singular(dphi) || dphi == Complex64::new(0.0, 0.0) {
            return None;
        }
        let dz = -g / dphi;
        if dz.norm() > 1.0 + start.norm() {
            return None;
        }
        z += dz;
    }
    None
}

/// Classical fixed-step fourth-order Runge-Kutta on `dz/dtau = f(z)`.
/// Overflow truncates the trajectory and sets the flag.
pub fn rk4(spec: &FieldSpec, z0: Complex64, h: f64, n: usize) -> Trajectory {
    assert!(h > 0.0, "rk4 step must be positive");
    let mut samples = Vec::with_capacity(n + 1);
    samples.push((0.0, z0));
    let mut z = z0;
    let mut truncated = false;
    for k in 1..=n {
        let k1 = spec.f(z);
        let k2 = spec.f(z + 0.5 * h * k1);
        let k3 = spec.f(z + 0.5 * h * k2);
        let k4 = spec.f(z + h * k3);
        let next = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if is_singular(next) {
            truncated = true;
            break;
        }
        z = next;
        samples.push((k as f64 * h, z));
    }
    Trajectory {
        samples,
        source: TrajectorySource::Rk4 { h },
        truncated,
    }
}

// Fehlberg 4(5) tableau.
const RKF_A: [[f64; 5]; 5] = [
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const RKF_B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];
const RKF_B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

/// Runge-Kutta-Fehlberg 4(5) with the standard controller: safety factor 0.9,
/// exponent 1/5, step clamped to `[1e-12, tau_end/4]`. Advances the
/// fourth-order solution; the fifth order only estimates the local error.
/// Step underflow near singularities truncates with the flag set.
pub fn rkf45(spec: &FieldSpec, z0: Complex64, tau_end: f64, tol: f64) -> Trajectory {
    assert!(tol > 0.0, "rkf45 tolerance must be positive");
    assert!(tau_end > 0.0, "rkf45 needs a positive end time");
    let h_min = 1e-12;
    let h_max = tau_end / 4.0;
    let mut h = (tau_end / 100.0).clamp(h_min, h_max);
    let mut samples = vec![(0.0, z0)];
    let mut z = z0;
    let mut tau = 0.0;
    let mut truncated = false;

    while tau < tau_end * (1.0 - 1e-14) {
        h = h.min(tau_end - tau);
        let mut k = [Complex64::new(0.0, 0.0); 6];
        k[0] = spec.f(z);
        let mut singular = is_singular(k[0]);
        for stage in 0..5 {
            if singular {
                break;
            }
            let mut arg = z;
            for (j, &a) in RKF_A[stage].iter().enumerate() {
                if a != 0.0 {
                    arg += h * a * k[j];
                }
            }
            k[stage + 1] = spec.f(arg);
            singular |= is_singular(k[stage + 1]);
        }
        if singular {
            truncated = true;
            break;
        }
        let mut z4 = z;
        let mut z5 = z;
        for j in 0..6 {
            z4 += h * RKF_B4[j] * k[j];
            z5 += h * RKF_B5[j] * k[j];
        }
        if is_singular(z4) || is_singular(z5) {
            truncated = true;
            break;
        }
        let err = (z5 - z4).norm();
        if err <= tol {
            tau += h;
            z = z4;
            samples.push((tau, z));
        }
        let scale = if err == 0.0 {
            4.0
        } else {
            0.9 * (tol / err).powf(0.2)
        };
        let next_h = (h * scale.clamp(0.1, 4.0)).clamp(h_min, h_max);
        if err > tol && next_h <= h_min {
            truncated = true;
            break;
        }
        h = next_h;
    }
    Trajectory {
        samples,
        source: TrajectorySource::Rkf45 { tol },
        truncated,
    }
}

/// One row of the integrator comparison. `None` marks an undefined value:
/// either `rho(z0) = 0` (relative metrics meaningless) or the exact solver
/// failed at this `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub tau: f64,
    pub abs_err: Option<f64>,
    pub rel_dev: Option<f64>,
    pub rel_error: Option<f64>,
}

/// Per-sample comparison of a trajectory against the exact solution:
/// `AbsErr = |z_tau - z~_tau|`, `RelDev = |rho(z_tau) - rho(z0)| / |rho(z0)|`
/// (exact method), `RelError` the same for the integrated point. Differences
/// of `rho` are wrapped to `(-pi, pi]` to stay branch-independent.
#[derive(Debug, Clone)]
pub struct ErrorSeries {
    pub rows: Vec<ErrorRow>,
}

pub fn error_series(spec: &FieldSpec, z0: Complex64, traj: &Trajectory) -> ErrorSeries {
    let rho0 = spec.rho(z0);
    let rho0_usable = rho0.is_finite() && rho0 != 0.0;
    let mut rows = Vec::with_capacity(traj.samples.len());
    let mut exact_prev = z0;
    let mut tau_prev = 0.0;
    for &(tau, z_tilde) in &traj.samples {
        // Continue the exact solve from the previous exact point.
        let exact = if tau == 0.0 {
            Ok(z0)
        } else {
            exact_continuation(spec, exact_prev, tau - tau_prev, &mut |_, _| {})
        };
        let (abs_err, rel_dev) = match exact {
            Ok(z_exact) => {
                exact_prev = z_exact;
                tau_prev = tau;
                let dev = if rho0_usable {
                    let r = spec.rho(z_exact);
                    r.is_finite()
                        .then(|| wrap_angle(r - rho0).abs() / rho0.abs())
                } else {
                    None
                };
                (Some((z_exact - z_tilde).norm()), dev)
            }
            Err(_) => (None, None),
        };
        let rel_error = if rho0_usable {
            let r = spec.rho(z_tilde);
            r.is_finite()
                .then(|| wrap_angle(r - rho0).abs() / rho0.abs())
        } else {
            None
        };
        rows.push(ErrorRow {
            tau,
            abs_err,
            rel_dev,
            rel_error,
        });
    }
    ErrorSeries { rows }
}

impl ErrorSeries {
    /// CSV with header `tau,abs_err,rel_dev,rel_error`, one row per sample,
    /// 17 significant digits, `nan` for undefined entries.
    pub fn write_csv(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        writeln!(out, "tau,abs_err,rel_dev,rel_error")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                fmt17(Some(row.tau)),
                fmt17(row.abs_err),
                fmt17(row.rel_dev),
                fmt17(row.rel_error)
            )?;
        }
        Ok(())
    }
}

fn fmt17(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.16e}"),
        _ => "nan".to_string(),
    }
}

/// Counts sign changes of the wrapped difference `rho(z) - level` around the
/// circle `|z - center| = radius`, ignoring flips across the branch cut
/// (where both neighbors sit near +/-pi rather than near zero).
///
/// Because the comparison wraps, values of `rho` congruent to `level` mod
/// 2 pi count as crossings too; pick the circle so the range of `rho` on it
/// stays within one branch when exact sector counts are wanted.
pub fn count_level_crossings(
    spec: &FieldSpec,
    center: Complex64,
    radius: f64,
    level: f64,
    samples: usize,
) -> usize {
    let diffs: Vec<f64> = (0..samples)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / samples as f64;
            let z = center + Complex64::from_polar(radius, angle);
            wrap_angle(spec.rho(z) - level)
        })
        .collect();
    let mut crossings = 0;
    for k in 0..samples {
        let a = diffs[k];
        let b = diffs[(k + 1) % samples];
        if a.is_nan() || b.is_nan() {
            continue;
        }
        let sign_change = (a > 0.0) != (b > 0.0);
        let near_zero = a.abs() + b.abs() < std::f64::consts::FRAC_PI_2;
        if sign_change && near_zero {
            crossings += 1;
        }
    }
    crossings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Polynomial, RationalFunction};
    use crate::expr::parse;
    use crate::newton::FieldSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constant_field() -> FieldSpec {
        FieldSpec::from_rational(
            RationalFunction::new(Polynomial::one(), Polynomial::one()).unwrap(),
            None,
        )
        .unwrap()
    }

    fn linear_decay_field() -> FieldSpec {
        // f = -z
        FieldSpec::from_rational(
            RationalFunction::new(
                Polynomial::new(vec![c(0.0, 0.0), c(-1.0, 0.0)]),
                Polynomial::one(),
            )
            .unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn exact_point_constant_field_translates() {
        let spec = constant_field();
        let z0 = c(0.3, -0.4);
        let z = exact_point(&spec, z0, 1.7).unwrap();
        assert!((z - (z0 + 1.7)).norm() < 1e-12);
        let back = exact_point(&spec, z0, -2.5).unwrap();
        assert!((back - (z0 - 2.5)).norm() < 1e-12);
    }

    #[test]
    fn exact_point_linear_field_exponential() {
        let spec = linear_decay_field();
        for tau in [0.1, 0.5, 1.0, 3.0] {
            let z = exact_point(&spec, c(1.0, 0.0), tau).unwrap();
            let expected = c((-tau).exp(), 0.0);
            assert!(
                (z - expected).norm() < 1e-11 * expected.norm().max(1e-3),
                "tau={tau}: {z} vs {expected}"
            );
        }
    }

    #[test]
    fn exact_point_exponential_field_closed_form() {
        // f = e^z, z0 = i pi/2: z(tau) = -log(-i - tau) for the principal
        // branch (hand-solved from -e^{-z} = -e^{-z0} + tau).
        let spec = FieldSpec::from_expr(parse("exp(z)").unwrap()).unwrap();
        let z0 = c(0.0, std::f64::consts::FRAC_PI_2);
        for tau in [0.05, 0.3, 1.0] {
            let z = exact_point(&spec, z0, tau).unwrap();
            let expected = -(c(0.0, -1.0) - tau).ln();
            assert!(
                (z - expected).norm() < 1e-10,
                "tau={tau}: {z} vs {expected}"
            );
        }
    }

    #[test]
    fn exact_point_satisfies_psi_contract() {
        let spec = linear_decay_field();
        let z0 = c(0.7, 1.1);
        let tau = 2.3;
        let z = exact_point(&spec, z0, tau).unwrap();
        let psi_diff = spec.psi(z).unwrap() - spec.psi(z0).unwrap() - tau;
        assert!(psi_diff.norm() < 1e-12 * (1.0 + tau.abs()));
    }

    #[test]
    fn exact_point_reports_singularity_time() {
        // f = 1/z from z0 = -1: Psi = z^2/2, trajectory reaches the pole at
        // tau = (0 - z0^2)/2 = -1/2... forward time: Psi target 1/2 + tau
        // hits 0 at tau = -1/2, so run backwards.
        let spec = FieldSpec::from_rational(
            RationalFunction::new(Polynomial::one(), Polynomial::monomial(c(1.0, 0.0), 1))
                .unwrap(),
            None,
        )
        .unwrap();
        let res = exact_point(&spec, c(-1.0, 0.0), -0.8);
        match res {
            Err(FlowError::SingularityReached { reached_tau }) => {
                assert!(reached_tau <= 0.0 && reached_tau > -0.8);
            }
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn rk4_exact_on_constant_field() {
        let spec = constant_field();
        let traj = rk4(&spec, c(0.0, 0.0), 0.25, 8);
        assert_eq!(traj.samples.len(), 9);
        for &(tau, z) in &traj.samples {
            assert!((z - c(tau, 0.0)).norm() < 1e-14);
        }
        assert!(!traj.truncated);
    }

    #[test]
    fn rk4_single_step_hand_oracle() {
        // f = -z, h = 0.1 from 1: hand-computed stages give 0.90483750.
        let spec = linear_decay_field();
        let traj = rk4(&spec, c(1.0, 0.0), 0.1, 1);
        let z1 = traj.samples[1].1;
        assert!((z1.re - 0.904_837_5).abs() < 1e-9, "{}", z1.re);
        assert!((z1.re - (-0.1f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        let spec = linear_decay_field();
        let exact = (-1.0f64).exp();
        let err = |h: f64| {
            let n = (1.0 / h).round() as usize;
            let traj = rk4(&spec, c(1.0, 0.0), h, n);
            (traj.samples.last().unwrap().1.re - exact).abs()
        };
        let e1 = err(0.1);
        let e2 = err(0.05);
        let e3 = err(0.025);
        let r1 = e1 / e2;
        let r2 = e2 / e3;
        assert!((13.0..19.0).contains(&r1), "ratio {r1}");
        assert!((13.0..19.0).contains(&r2), "ratio {r2}");
    }

    #[test]
    fn rkf45_meets_tolerance_on_linear_field() {
        let spec = linear_decay_field();
        let traj = rkf45(&spec, c(1.0, 0.0), 1.0, 1e-10);
        assert!(!traj.truncated);
        let (tau_end, z_end) = *traj.samples.last().unwrap();
        assert!((tau_end - 1.0).abs() < 1e-12);
        assert!((z_end.re - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn rkf45_constant_field_exact() {
        let spec = constant_field();
        let traj = rkf45(&spec, c(0.0, 0.0), 2.0, 1e-8);
        let (tau_end, z_end) = *traj.samples.last().unwrap();
        assert!((z_end - c(tau_end, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rkf45_survives_essential_singularity_neighborhood() {
        // f = -z^2 e^{1/z} near its essential singularity: must terminate or
        // truncate without crashing.
        let spec =
            FieldSpec::from_expr(parse("-1*z^2*exp(1/z)").unwrap()).unwrap();
        let traj = rkf45(&spec, c(0.1, -0.066), 1.0, 1e-8);
        assert!(!traj.samples.is_empty());
        for w in traj.samples.windows(2) {
            assert!(w[0].0 < w[1].0, "tau must increase");
        }
    }

    #[test]
    fn error_series_on_exact_samples_is_tiny() {
        let spec = linear_decay_field();
        let exact = exact_trajectory(&spec, c(1.0, 0.5), 1.0, 20).unwrap();
        let series = error_series(&spec, c(1.0, 0.5), &exact);
        assert_eq!(series.rows.len(), 21);
        for row in &series.rows {
            assert!(row.abs_err.unwrap() < 1e-10);
            assert!(row.rel_dev.unwrap() < 1e-12);
        }
    }

    #[test]
    fn error_series_rk4_on_exp_field_separates_dev_from_error() {
        // Regular-point benchmark: rel_error of RK4 exceeds rel_dev of the
        // exact method by orders of magnitude.
        let spec = FieldSpec::from_expr(parse("exp(z)").unwrap()).unwrap();
        let z0 = c(0.0, std::f64::consts::FRAC_PI_2);
        let traj = rk4(&spec, z0, 0.01, 100);
        let series = error_series(&spec, z0, &traj);
        let max_dev = series
            .rows
            .iter()
            .filter_map(|r| r.rel_dev)
            .fold(0.0, f64::max);
        let max_err = series
            .rows
            .iter()
            .filter_map(|r| r.rel_error)
            .fold(0.0, f64::max);
        assert!(max_dev < 1e-12, "exact drift {max_dev}");
        assert!(
            max_err > 100.0 * max_dev.max(1e-300),
            "rk4 {max_err} vs exact {max_dev}"
        );
    }

    #[test]
    fn error_series_pole_benchmark_spikes_near_zero_tau() {
        // f = 1/z, z0 = -1/2 - i/2: z0 is the closest point of the trajectory
        // to the pole, so per-step integration error is largest right at the
        // start and the error growth concentrates near tau = 0.
        let spec = FieldSpec::from_rational(
            RationalFunction::new(Polynomial::one(), Polynomial::monomial(c(1.0, 0.0), 1))
                .unwrap(),
            None,
        )
        .unwrap();
        let z0 = c(-0.5, -0.5);
        let traj = rk4(&spec, z0, 0.01, 100);
        let series = error_series(&spec, z0, &traj);
        let abs: Vec<f64> = series.rows.iter().map(|r| r.abs_err.unwrap()).collect();
        let increments: Vec<f64> = abs.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let first = increments[0];
        let later_max = increments[20..].iter().fold(0.0f64, |a, &b| a.max(b));
        assert!(
            first > 3.0 * later_max,
            "per-step error should peak at tau=0: first {first}, later max {later_max}"
        );
    }

    #[test]
    fn csv_format_and_undefined_marker() {
        let rows = vec![
            ErrorRow {
                tau: 0.5,
                abs_err: Some(1e-9),
                rel_dev: None,
                rel_error: Some(0.25),
            },
        ];
        let mut buf = Vec::new();
        ErrorSeries { rows }.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "tau,abs_err,rel_dev,rel_error");
        let row = lines.next().unwrap();
        assert!(row.starts_with("5.0000000000000000e-1,"));
        assert!(row.contains(",nan,"));
    }

    #[test]
    fn level_crossings_pole_separatrices() {
        // f = 1/z^2 (kappa = 2): 2(kappa+1) = 6 separatrix crossings of the
        // level through a point on a separatrix ray.
        let spec = FieldSpec::from_rational(
            RationalFunction::new(Polynomial::one(), Polynomial::monomial(c(1.0, 0.0), 2))
                .unwrap(),
            Some(c(1.0, 0.0)),
        )
        .unwrap();
        let level = spec.rho(c(0.5, 0.0)); // point on the real-axis separatrix
        let crossings = count_level_crossings(&spec, c(0.0, 0.0), 1.0, level, 4096);
        assert_eq!(crossings, 6);
    }

    #[test]
    fn level_crossings_none_for_unattained_level() {
        // f = 1: rho = -Im z is bounded on the circle; pick a level far away.
        let spec = constant_field();
        let crossings = count_level_crossings(&spec, c(0.0, 0.0), 1.0, 2.9, 2048);
        assert_eq!(crossings, 0);
    }

    #[test]
    fn level_crossings_multiple_zero_petals() {
        // f = z^4 (s = 4): 2(s-1) = 6 elliptic-sector boundaries. The circle
        // radius keeps |rho| below pi so the level is not aliased mod 2 pi.
        let spec = FieldSpec::from_rational(
            RationalFunction::new(Polynomial::monomial(c(1.0, 0.0), 4), Polynomial::one())
                .unwrap(),
            None,
        )
        .unwrap();
        let level = spec.rho(c(0.6, 0.0));
        let crossings = count_level_crossings(&spec, c(0.0, 0.0), 0.6, level, 4096);
        assert_eq!(crossings, 6);
    }

    #[test]
    fn exact_flow_through_phi_route_for_tan_field() {
        // Phi = sin z, f = -tan z: solve via Phi and verify the fundamental
        // observation sin(z(tau)) = sin(z0) e^{-tau}.
        let spec = FieldSpec::from_phi(parse("sin(z)").unwrap());
        let z0 = c(0.4, 0.3);
        let tau = 1.2;
        let z = exact_point(&spec, z0, tau).unwrap();
        let expected = z0.sin() * (-tau as f64).exp();
        assert!((z.sin() - expected).norm() < 1e-11 * expected.norm());
    }
}
