//! Lower bounds on where a trigonometric polynomial with a root of order k
//! at 0 attains its maximum modulus, plus the classical derivative-norm
//! inequality used in their proof.

use crate::error::{Error, Result};
use crate::trig::TrigPoly;

/// log(k!) without overflow; exact summation is fine at the sizes we handle.
fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// The two lower bounds for the position t0 of the maximum of |Q| on
/// [0, 2*pi], for degree n and root order k at 0:
/// (a) (k!)^(1/k) / n, (b) k / (e*n).
pub fn lemma_bounds(n: u32, k: u32) -> Result<(f64, f64)> {
    if k < 1 || k > n {
        return Err(Error::OutOfRange {
            value: k as f64,
            min: 1.0,
            max: n as f64,
        });
    }
    let bound_a = (ln_factorial(k as u64) / k as f64).exp() / n as f64;
    let bound_b = k as f64 / (std::f64::consts::E * n as f64);
    Ok((bound_a, bound_b))
}

/// Global maximum of |Q| on [0, 2*pi): dense scan followed by Newton
/// refinement on Q'. Value ties within 1e-10 resolve to the smallest t0.
pub fn locate_max(q: &TrigPoly) -> Result<(f64, f64)> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let tau = 2.0 * std::f64::consts::PI;
    let n = q.degree().max(1);
    let samples = 4096 * (n + 1);
    let dq = q.derivative();
    let ddq = dq.derivative();
    let step = tau / samples as f64;

    // Collect local maxima of |Q| over the scan, refine each, keep the best.
    let mut best_t = 0.0;
    let mut best_v = f64::NEG_INFINITY;
    let mut vals: Vec<f64> = Vec::with_capacity(samples);
    for i in 0..samples {
        vals.push(q.eval(i as f64 * step).abs());
    }
    for i in 0..samples {
        let prev = vals[(i + samples - 1) % samples];
        let next = vals[(i + 1) % samples];
        if vals[i] < prev || vals[i] < next {
            continue;
        }
        // Newton on Q' around the scan peak, confined to its neighborhood.
        let t_scan = i as f64 * step;
        let mut t = t_scan;
        for _ in 0..50 {
            let d1 = dq.eval(t);
            let d2 = ddq.eval(t);
            if d2 == 0.0 {
                break;
            }
            let nt = t - d1 / d2;
            if (nt - t_scan).abs() > 2.0 * step || !nt.is_finite() {
                break;
            }
            if (nt - t).abs() < 1e-15 {
                t = nt;
                break;
            }
            t = nt;
        }
        let t = t.rem_euclid(tau);
        let v = q.eval(t).abs();
        let (t, v) = if v >= vals[i] { (t, v) } else { (t_scan, vals[i]) };
        if v > best_v + 1e-10 || (v > best_v - 1e-10 && t < best_t) {
            best_t = t;
            best_v = v;
        }
    }
    Ok((best_t, best_v))
}

/// Outcome of checking the two bounds against the located maximum.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub n: u32,
    pub k: u32,
    pub t0: f64,
    pub max_value: f64,
    pub bound_a: f64,
    pub bound_b: f64,
    pub slack_a: f64,
    pub slack_b: f64,
    pub passes: bool,
}

/// Check that t0 >= both bounds for a polynomial with a root of order
/// `expected_k` at 0; errors if the detected root order disagrees.
pub fn verify_lemma(q: &TrigPoly, expected_k: u32, tol: f64) -> Result<LemmaReport> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let found = q.root_order(0.0, tol) as u32;
    if found != expected_k {
        return Err(Error::RootOrderMismatch {
            found: found as usize,
            expected: expected_k as usize,
        });
    }
    let n = q.degree() as u32;
    let (bound_a, bound_b) = lemma_bounds(n, expected_k)?;
    let (t0, max_value) = locate_max(q)?;
    let slack_a = t0 - bound_a;
    let slack_b = t0 - bound_b;
    Ok(LemmaReport {
        n,
        k: expected_k,
        t0,
        max_value,
        bound_a,
        bound_b,
        slack_a,
        slack_b,
        passes: slack_a >= -1e-9 && slack_b >= -1e-9,
    })
}

/// max|Q'| / (n * max|Q|); None for constants, where the inequality is
/// degenerate. Must never exceed 1 beyond rounding.
pub fn bernstein_inequality_check(q: &TrigPoly) -> Result<Option<f64>> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = q.degree();
    if n == 0 {
        return Ok(None);
    }
    let (_, norm_q) = locate_max(q)?;
    let (_, norm_dq) = locate_max(&q.derivative())?;
    Ok(Some(norm_dq / (n as f64 * norm_q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::ROOT_ORDER_TOL;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, FRAC_PI_2, PI};

    #[test]
    fn bounds_at_k_equals_n_equals_one() {
        let (a, b) = lemma_bounds(1, 1).unwrap();
        assert_relative_eq!(a, 1.0, epsilon = 1e-15);
        assert_relative_eq!(b, 1.0 / E, epsilon = 1e-15);
    }

    #[test]
    fn bounds_at_k_one() {
        for n in 1..=20 {
            let (a, b) = lemma_bounds(n, 1).unwrap();
            assert_relative_eq!(a, 1.0 / n as f64, epsilon = 1e-14);
            assert_relative_eq!(b, 1.0 / (E * n as f64), epsilon = 1e-14);
        }
    }

    #[test]
    fn bounds_n10_k5() {
        let (a, b) = lemma_bounds(10, 5).unwrap();
        assert_relative_eq!(a, 120f64.powf(0.2) / 10.0, epsilon = 1e-12);
        assert_relative_eq!(b, 0.5 / E, epsilon = 1e-15);
        assert!((a - 0.2605).abs() < 5e-4);
        assert!((b - 0.1839).abs() < 5e-4);
    }

    #[test]
    fn bounds_ordering_up_to_fifty() {
        // (k!)^(1/k) >= k/e, so bound (a) dominates (b).
        for n in 1..=50 {
            for k in 1..=n {
                let (a, b) = lemma_bounds(n, k).unwrap();
                assert!(a >= b - 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn out_of_range_k() {
        assert!(lemma_bounds(3, 0).is_err());
        assert!(lemma_bounds(3, 4).is_err());
    }

    #[test]
    fn locate_max_sin_and_cos() {
        let (t, m) = locate_max(&TrigPoly::sin_t()).unwrap();
        assert_relative_eq!(t, FRAC_PI_2, epsilon = 1e-10);
        assert_relative_eq!(m, 1.0, epsilon = 1e-12);
        let (t, m) = locate_max(&TrigPoly::cos_t()).unwrap();
        assert_relative_eq!(t, 0.0, epsilon = 1e-10);
        assert_relative_eq!(m, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn locate_max_matches_fine_scan() {
        // sin t + 0.5 sin 2t against a 10^7-point scan.
        let q = TrigPoly::new(vec![0.0, 0.0, 0.0], vec![1.0, 0.5]);
        let (t0, m) = locate_max(&q).unwrap();
        let n = 10_000_000;
        let mut bt = 0.0;
        let mut bv = f64::NEG_INFINITY;
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            let v = q.eval(t).abs();
            if v > bv {
                bv = v;
                bt = t;
            }
        }
        assert!((m - bv).abs() < 1e-8);
        assert!((t0 - bt).abs() < 1e-4);
        assert_relative_eq!(q.eval(bt).abs(), m, epsilon = 1e-8);
    }

    #[test]
    fn verify_sin() {
        let r = verify_lemma(&TrigPoly::sin_t(), 1, ROOT_ORDER_TOL).unwrap();
        assert!(r.passes);
        assert_relative_eq!(r.t0, FRAC_PI_2, epsilon = 1e-10);
        assert!((r.slack_a - (FRAC_PI_2 - 1.0)).abs() < 1e-9);
        assert!((r.slack_b - (FRAC_PI_2 - 1.0 / E)).abs() < 1e-9);
        assert!((r.slack_a - 0.5708).abs() < 1e-4);
        assert!((r.slack_b - 1.2029).abs() < 1e-4);
    }

    #[test]
    fn verify_sin_nt() {
        for n in 1..=8u32 {
            let q = TrigPoly::harmonic(n as usize, 0.0, 1.0);
            let r = verify_lemma(&q, 1, ROOT_ORDER_TOL).unwrap();
            assert!(r.passes);
            assert_relative_eq!(r.t0, PI / (2.0 * n as f64), epsilon = 1e-9);
            assert_relative_eq!(
                r.slack_a,
                (FRAC_PI_2 - 1.0) / n as f64,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn verify_sin_squared() {
        // sin^2 t = (1 - cos 2t)/2: n=2, k=2, t0 = pi/2.
        let q = TrigPoly::new(vec![0.5, 0.0, -0.5], vec![0.0, 0.0]);
        let r = verify_lemma(&q, 2, ROOT_ORDER_TOL).unwrap();
        assert!(r.passes);
        assert_relative_eq!(r.t0, FRAC_PI_2, epsilon = 1e-9);
        assert_relative_eq!(r.bound_a, 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(r.bound_b, 1.0 / E, epsilon = 1e-15);
    }

    #[test]
    fn verify_rejects_wrong_order() {
        let err = verify_lemma(&TrigPoly::sin_t(), 2, ROOT_ORDER_TOL).unwrap_err();
        assert!(matches!(
            err,
            crate::error::Error::RootOrderMismatch {
                found: 1,
                expected: 2
            }
        ));
    }

    #[test]
    fn verify_random_forced_roots() {
        // q = sin^k(t) * R(t) with random R of degree n-k, R(0) != 0.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..200 {
            let k = rng.gen_range(1..=3usize);
            let extra = rng.gen_range(0..=3usize);
            let mut r = TrigPoly::constant(rng.gen_range(0.5f64..2.0));
            for j in 1..=extra {
                r = r.add(&TrigPoly::harmonic(
                    j,
                    rng.gen_range(-0.2f64..0.2),
                    rng.gen_range(-0.2f64..0.2),
                ));
            }
            assert!(r.eval(0.0).abs() > 0.1, "trial {trial}");
            let mut q = r;
            for _ in 0..k {
                q = q.mul(&TrigPoly::sin_t());
            }
            let report = verify_lemma(&q, k as u32, ROOT_ORDER_TOL).unwrap();
            assert!(report.passes, "trial {trial}: {report:?}");
        }
    }

    #[test]
    fn locate_max_shift_invariance() {
        let q = TrigPoly::new(vec![0.2, 1.0, -0.3, 0.4], vec![0.5, 0.1, -0.7]);
        let (t0, m) = locate_max(&q).unwrap();
        for c in [0.3, 1.7, 4.0] {
            // Build Q(t + c) through the angle-addition formulas.
            let mut cos = vec![0.0; q.degree() + 1];
            let mut sin = vec![0.0; q.degree()];
            cos[0] = q.cos_coeffs()[0];
            for j in 1..=q.degree() {
                let (a, b) = (q.cos_coeffs()[j], q.sin_coeffs()[j - 1]);
                let (sj, cj) = (j as f64 * c).sin_cos();
                cos[j] = a * cj + b * sj;
                sin[j - 1] = b * cj - a * sj;
            }
            let qc = TrigPoly::new(cos, sin);
            assert_relative_eq!(qc.eval(1.1), q.eval(1.1 + c), epsilon = 1e-12);
            let (tc, mc) = locate_max(&qc).unwrap();
            assert_relative_eq!(mc, m, epsilon = 1e-8);
            // The shifted maximizer maps back to a maximizer of q.
            assert_relative_eq!(q.eval(tc + c).abs(), m, epsilon = 1e-8);
            let _ = t0;
        }
    }

    #[test]
    fn inequality_equality_case() {
        for n in 1..=6usize {
            let q = TrigPoly::harmonic(n, 0.0, 1.0);
            let r = bernstein_inequality_check(&q).unwrap().unwrap();
            assert_relative_eq!(r, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn inequality_degenerate_constant() {
        assert!(bernstein_inequality_check(&TrigPoly::constant(3.0))
            .unwrap()
            .is_none());
    }

    #[test]
    fn inequality_random_degree_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let mut q = TrigPoly::constant(rng.gen_range(-1.0f64..1.0));
            for j in 1..=5 {
                q = q.add(&TrigPoly::harmonic(
                    j,
                    rng.gen_range(-1.0f64..1.0),
                    rng.gen_range(-1.0f64..1.0),
                ));
            }
            if q.degree() < 5 {
                continue;
            }
            let r = bernstein_inequality_check(&q).unwrap().unwrap();
            assert!(r <= 1.0 + 1e-9, "ratio {r}");
        }
    }
}
