//! Numerical check that the homogenized sphere objective converges to the
//! Gaussian-weighted ball objective as the auxiliary width delta_0 grows.
//!
//! Everything runs in log domain: the product form carries exponents like
//! delta_0^2 and overflows immediately.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::num::{cnorm, C64};
use crate::poly::MultiPoly;

fn validate(polys: &[MultiPoly], deltas: &[f64], radius: f64) -> Result<()> {
    if polys.is_empty() || polys.len() != deltas.len() {
        return Err(Error::InvalidConfig(
            "need matching nonempty polynomial and delta lists".into(),
        ));
    }
    if !(radius > 0.0) {
        return Err(Error::OutOfRange {
            value: radius,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let dim = polys[0].dim();
    for p in polys {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
    }
    for &d in deltas {
        if !(d > 0.0) {
            return Err(Error::OutOfRange {
                value: d,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
    }
    Ok(())
}

/// log F_delta0(z) = delta_0^2 log(t/delta_0) + sum delta_k^2 log|Q_k(t, z)|
/// with t = sqrt(delta_0^2 + R^2 - |z|^2) and Q_k the homogenization of P_k.
/// -infinity when some Q_k vanishes at (t, z).
pub fn appendix_log_objective(
    polys: &[MultiPoly],
    deltas: &[f64],
    radius: f64,
    delta0: f64,
    z: &[C64],
) -> Result<f64> {
    validate(polys, deltas, radius)?;
    if !(delta0 > 0.0) {
        return Err(Error::OutOfRange {
            value: delta0,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let norm2 = cnorm(z) * cnorm(z);
    let limit = radius * radius + delta0 * delta0;
    if norm2 > limit + 1e-12 {
        return Err(Error::OutsideAdmissible { norm2, limit });
    }
    let t = (delta0 * delta0 + radius * radius - norm2).max(0.0).sqrt();
    let mut total = delta0 * delta0 * (t / delta0).ln();
    let mut point = Vec::with_capacity(z.len() + 1);
    point.push(C64::new(t, 0.0));
    point.extend_from_slice(z);
    for (p, &d) in polys.iter().zip(deltas) {
        let q = p.homogenize(delta0)?;
        let v = q.evaluate(&point)?.norm();
        if v == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += d * d * v.ln();
    }
    Ok(total)
}

/// log F(z) = (R^2 - |z|^2)/2 + sum delta_k^2 log|P_k(z)|, the pointwise
/// limit of the homogenized objective.
pub fn limit_log_objective(
    polys: &[MultiPoly],
    deltas: &[f64],
    radius: f64,
    z: &[C64],
) -> Result<f64> {
    validate(polys, deltas, radius)?;
    let norm2 = cnorm(z) * cnorm(z);
    let mut total = (radius * radius - norm2) / 2.0;
    for (p, &d) in polys.iter().zip(deltas) {
        let v = p.evaluate(z)?.norm();
        if v == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += d * d * v.ln();
    }
    Ok(total)
}

/// Sup-error of log F_delta0 against log F for one delta_0 value.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub delta0: f64,
    pub sup_error: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Sup-errors strictly decrease along the schedule.
    pub decreasing: bool,
    /// Last error below 10 * R^4 / delta_0^2 * max(1, sup |log F|).
    pub last_within_tolerance: bool,
}

/// Evaluate the sup-error over the grid for each delta_0 in the schedule.
pub fn convergence_report(
    polys: &[MultiPoly],
    deltas: &[f64],
    radius: f64,
    schedule: &[f64],
    grid: &[Vec<C64>],
) -> Result<ConvergenceReport> {
    validate(polys, deltas, radius)?;
    if schedule.is_empty() || grid.is_empty() {
        return Err(Error::InvalidConfig(
            "need a nonempty delta_0 schedule and grid".into(),
        ));
    }
    let limits: Vec<f64> = grid
        .iter()
        .map(|z| limit_log_objective(polys, deltas, radius, z))
        .collect::<Result<_>>()?;
    if limits.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(
            "grid touches a zero set; log-domain comparison impossible".into(),
        ));
    }
    let f_scale = limits.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut rows = Vec::with_capacity(schedule.len());
    for &d0 in schedule {
        let mut sup = 0.0f64;
        for (z, &lim) in grid.iter().zip(&limits) {
            let v = appendix_log_objective(polys, deltas, radius, d0, z)?;
            sup = sup.max((v - lim).abs());
        }
        rows.push(ConvergenceRow {
            delta0: d0,
            sup_error: sup,
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error);
    let last = rows.last().expect("nonempty schedule");
    let tol = 10.0 * radius.powi(4) / (last.delta0 * last.delta0) * f_scale;
    Ok(ConvergenceReport {
        last_within_tolerance: last.sup_error < tol,
        rows,
        decreasing,
    })
}

/// Random points in the ball of radius 0.9 R, rejecting any within 1e-6 of
/// vanishing for some P_k (uniform convergence is claimed on compacts that
/// avoid the zero sets when compared in log domain).
pub fn sample_grid(
    polys: &[MultiPoly],
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<C64>>> {
    if polys.is_empty() {
        return Err(Error::InvalidConfig("need at least one polynomial".into()));
    }
    let d = polys[0].dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x6772_6964);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::InvalidConfig(
                "grid sampling kept hitting zero sets".into(),
            ));
        }
        let mut z: Vec<C64> = (0..d)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let n = cnorm(&z).max(1e-300);
        let u: f64 = rng.gen_range(0.0..1.0);
        let r = 0.9 * radius * u.powf(1.0 / (2 * d) as f64);
        for zi in z.iter_mut() {
            *zi *= r / n;
        }
        if polys
            .iter()
            .all(|p| p.evaluate(&z).map(|v| v.norm() >= 1e-6).unwrap_or(false))
        {
            out.push(z);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Field;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn z1(dim: usize) -> MultiPoly {
        MultiPoly::variable(dim, Field::Complex, 0).unwrap()
    }

    #[test]
    fn homogeneous_on_boundary_matches_limit() {
        // Homogeneous P has no z0-mixing; at |z| = R the t-factor is exactly
        // delta_0^2 * log(1) = 0 and both objectives agree.
        let p = z1(2);
        let z = [c(1.0, 0.0), c(0.0, 0.0)];
        let v = appendix_log_objective(&[p.clone()], &[1.0], 1.0, 10.0, &z).unwrap();
        let lim = limit_log_objective(&[p], &[1.0], 1.0, &z).unwrap();
        assert_relative_eq!(v, lim, epsilon = 1e-12);
    }

    #[test]
    fn linear_example_within_inverse_square() {
        let p = z1(1);
        let z = [c(1.0, 0.0)];
        let v = appendix_log_objective(&[p.clone()], &[1.0], 1.0, 10.0, &z).unwrap();
        let lim = limit_log_objective(&[p], &[1.0], 1.0, &z).unwrap();
        assert_relative_eq!(lim, 0.0, epsilon = 1e-15);
        assert!((v - lim).abs() < 10.0 / 100.0);
    }

    #[test]
    fn value_at_origin_converges() {
        // P = z1 + 1, P(0) = 1: log F_d0(0) -> R^2/2.
        let one = MultiPoly::constant(1, Field::Complex, c(1.0, 0.0)).unwrap();
        let p = z1(1).add(&one).unwrap();
        let z = [c(0.0, 0.0)];
        let lim = limit_log_objective(&[p.clone()], &[0.5], 1.0, &z).unwrap();
        assert_relative_eq!(lim, 0.5, epsilon = 1e-15);
        let mut prev = f64::INFINITY;
        for d0 in [10.0, 100.0, 1000.0] {
            let v = appendix_log_objective(&[p.clone()], &[0.5], 1.0, d0, &z).unwrap();
            let err = (v - lim).abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn constant_poly_closed_form() {
        // P = c constant: the error is exactly
        // R^2/2 - (d0^2/2) log(1 + R^2/d0^2), independent of c.
        let p = MultiPoly::constant(1, Field::Complex, c(2.0, -1.0)).unwrap();
        let z = [c(0.0, 0.0)];
        let (r, d0, delta) = (1.0, 50.0, 0.7);
        let v = appendix_log_objective(&[p.clone()], &[delta], r, d0, &z).unwrap();
        let lim = limit_log_objective(&[p], &[delta], r, &z).unwrap();
        let expected_err = r * r / 2.0 - d0 * d0 / 2.0 * (1.0 + r * r / (d0 * d0)).ln();
        assert_relative_eq!((v - lim).abs(), expected_err.abs(), epsilon = 1e-10);
    }

    #[test]
    fn outside_admissible_ball_rejected() {
        let p = z1(1);
        let err = appendix_log_objective(&[p], &[1.0], 1.0, 2.0, &[c(3.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::OutsideAdmissible { .. }));
    }

    #[test]
    fn report_strictly_decreasing() {
        let one = MultiPoly::constant(1, Field::Complex, c(1.0, 0.0)).unwrap();
        let p = z1(1).add(&one).unwrap();
        let grid = sample_grid(&[p.clone()], 1.0, 100, 11).unwrap();
        assert_eq!(grid.len(), 100);
        let report =
            convergence_report(&[p], &[0.5], 1.0, &[10.0, 100.0, 1000.0], &grid).unwrap();
        assert!(report.decreasing, "{:?}", report.rows);
        assert!(report.last_within_tolerance);
    }

    #[test]
    fn error_decays_like_inverse_square() {
        let one = MultiPoly::constant(2, Field::Complex, c(1.0, 0.0)).unwrap();
        let p = z1(2).add(&one).unwrap();
        let grid = sample_grid(&[p.clone()], 1.0, 50, 3).unwrap();
        let report =
            convergence_report(&[p], &[0.6], 1.0, &[20.0, 200.0], &grid).unwrap();
        let ratio = report.rows[0].sup_error / report.rows[1].sup_error;
        assert!(
            (50.0..=200.0).contains(&ratio),
            "decay ratio {ratio} outside [50, 200]"
        );
    }

    #[test]
    fn grid_avoids_zero_sets() {
        let p = z1(2);
        let grid = sample_grid(&[p.clone()], 1.0, 64, 5).unwrap();
        for z in &grid {
            assert!(cnorm(z) <= 0.9 + 1e-12);
            assert!(p.evaluate(z).unwrap().norm() >= 1e-6);
        }
    }
}
