//! Cylinder coverings of complex balls: when the total squared width budget
//! falls short of R^2, the ball cannot be covered and a concrete uncovered
//! point is produced.

use crate::error::{Error, Result};
use crate::maximizer::{find_witness, MaximizerConfig, Status};
use crate::num::{hdot, C64};
use crate::objective::{Domain, PlankInstance, PlankItem};
use crate::poly::{Field, MultiPoly};

const UNIT_TOL: f64 = 1e-12;
const STRICT_SLACK: f64 = 1e-12;

/// The set {z : |<z - y, u>| <= delta} for a unit direction u.
#[derive(Clone, Debug)]
pub struct Cylinder {
    u: Vec<C64>,
    y: Vec<C64>,
    delta: f64,
}

impl Cylinder {
    pub fn new(u: Vec<C64>, y: Vec<C64>, delta: f64) -> Result<Self> {
        if u.len() != y.len() || u.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                got: y.len(),
            });
        }
        let n = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm: n });
        }
        if !(delta > 0.0) {
            return Err(Error::OutOfRange {
                value: delta,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        Ok(Cylinder { u, y, delta })
    }

    pub fn u(&self) -> &[C64] {
        &self.u
    }

    pub fn y(&self) -> &[C64] {
        &self.y
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// |<z - y, u>| - delta; negative means inside.
    pub fn margin(&self, z: &[C64]) -> Result<f64> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        let diff: Vec<C64> = z.iter().zip(&self.y).map(|(a, b)| a - b).collect();
        Ok(hdot(&diff, &self.u).norm() - self.delta)
    }

    pub fn contains(&self, z: &[C64]) -> Result<bool> {
        Ok(self.margin(z)? <= 0.0)
    }

    /// The degree-1 polynomial P(z) = <z - y, u>, complex-linear in z.
    fn poly(&self) -> Result<MultiPoly> {
        let coeffs: Vec<C64> = self.u.iter().map(|z| z.conj()).collect();
        let c0 = -hdot(&self.y, &self.u);
        MultiPoly::affine(Field::Complex, &coeffs, c0)
    }
}

/// Outcome of the covering check.
#[derive(Clone, Debug)]
pub enum CoveringOutcome {
    /// Sum of squared widths >= R^2: nothing is asserted.
    BudgetNotViolated { total: f64, limit: f64 },
    /// A point of the closed ball B(R) outside every cylinder.
    Witness {
        point: Vec<C64>,
        /// Positive membership margin per cylinder.
        margins: Vec<f64>,
    },
}

/// Produce a point of B(R) missed by all cylinders, provided the strict
/// budget sum delta_k^2 < R^2 holds. Widths are inflated to saturate the
/// budget exactly, which maximizes the certificate margins.
pub fn uncovered_witness(
    cylinders: &[Cylinder],
    radius: f64,
    cfg: &MaximizerConfig,
) -> Result<CoveringOutcome> {
    if cylinders.is_empty() {
        return Err(Error::InvalidConfig("need at least one cylinder".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::OutOfRange {
            value: radius,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let dim = cylinders[0].dim();
    for c in cylinders {
        if c.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: c.dim(),
            });
        }
    }
    let total: f64 = cylinders.iter().map(|c| c.delta * c.delta).sum();
    let limit = radius * radius;
    if total >= limit - STRICT_SLACK {
        return Ok(CoveringOutcome::BudgetNotViolated { total, limit });
    }

    // Inflate widths so the budget is saturated: delta_k' = delta_k * s with
    // s^2 * total = R^2. Degree-1 polynomials make the budget equal to the
    // sum of squared widths.
    let s = (limit / total).sqrt();
    let items: Vec<PlankItem> = cylinders
        .iter()
        .map(|c| {
            Ok(PlankItem {
                poly: c.poly()?,
                delta: c.delta * s,
            })
        })
        .collect::<Result<_>>()?;
    let instance = PlankInstance::new(Domain::ComplexBall { radius }, items, false)?;
    let report = find_witness(&instance, cfg)?;
    if report.status != Status::CertifiedMargins {
        return Err(Error::InvalidConfig(
            "optimization suspect: witness margins failed certification".into(),
        ));
    }
    let margins: Vec<f64> = cylinders
        .iter()
        .map(|c| c.margin(&report.witness))
        .collect::<Result<_>>()?;
    Ok(CoveringOutcome::Witness {
        point: report.witness,
        margins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::cnorm;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cfg(seed: u64) -> MaximizerConfig {
        MaximizerConfig {
            seed,
            starts: Some(32),
            ..MaximizerConfig::default()
        }
    }

    #[test]
    fn disk_membership_margins() {
        let disk = Cylinder::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0)], 1.0).unwrap();
        assert_relative_eq!(disk.margin(&[c(0.5, 0.0)]).unwrap(), -0.5, epsilon = 1e-12);
        assert!(disk.contains(&[c(0.5, 0.0)]).unwrap());
        assert!(disk.margin(&[c(0.0, 1.0)]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn random_cylinder_margin_recomputation() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let mut u: Vec<C64> = (0..2)
                .map(|_| c(rng.gen_range(-1.0f64..1.0), rng.gen_range(-1.0f64..1.0)))
                .collect();
            let n = cnorm(&u);
            for z in u.iter_mut() {
                *z /= n;
            }
            let y: Vec<C64> = (0..2)
                .map(|_| c(rng.gen_range(-1.0f64..1.0), rng.gen_range(-1.0f64..1.0)))
                .collect();
            let z: Vec<C64> = (0..2)
                .map(|_| c(rng.gen_range(-1.0f64..1.0), rng.gen_range(-1.0f64..1.0)))
                .collect();
            let delta = rng.gen_range(0.1f64..1.0);
            let cyl = Cylinder::new(u.clone(), y.clone(), delta).unwrap();
            // Independent recomputation of |<z - y, u>| - delta.
            let mut ip = c(0.0, 0.0);
            for i in 0..2 {
                ip += (z[i] - y[i]) * u[i].conj();
            }
            assert_relative_eq!(cyl.margin(&z).unwrap(), ip.norm() - delta, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_disks_leave_a_gap() {
        // C^1: disks of radius 0.6 at +-0.3; 0.72 < 1.
        let disks = vec![
            Cylinder::new(vec![c(1.0, 0.0)], vec![c(0.3, 0.0)], 0.6).unwrap(),
            Cylinder::new(vec![c(1.0, 0.0)], vec![c(-0.3, 0.0)], 0.6).unwrap(),
        ];
        let out = uncovered_witness(&disks, 1.0, &cfg(4)).unwrap();
        let CoveringOutcome::Witness { point, margins } = out else {
            panic!("budget 0.72 < 1 must produce a witness");
        };
        assert!(cnorm(&point) <= 1.0 + 1e-9);
        for m in &margins {
            assert!(*m > 0.0, "margins {margins:?}");
        }
        // Independent confirmation that an uncovered point exists: coarse
        // grid over B(1).
        let mut found = false;
        let n = 400;
        'outer: for i in 0..=n {
            for j in 0..=n {
                let z = [c(-1.0 + 2.0 * i as f64 / n as f64, -1.0 + 2.0 * j as f64 / n as f64)];
                if z[0].norm() > 1.0 {
                    continue;
                }
                if disks.iter().all(|d| d.margin(&z).unwrap() > 0.0) {
                    found = true;
                    break 'outer;
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn single_cylinder_saturates() {
        // One cylinder, delta < R: the inflated width is exactly R, so the
        // witness sits at distance >= R from the hyperplane.
        let cyl = Cylinder::new(
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            0.4,
        )
        .unwrap();
        let out = uncovered_witness(&[cyl.clone()], 1.0, &cfg(5)).unwrap();
        let CoveringOutcome::Witness { point, margins } = out else {
            panic!("0.16 < 1 must produce a witness")
        };
        assert!(margins[0] >= 1.0 - 0.4 - 1e-6);
        assert!(cnorm(&point) <= 1.0 + 1e-9);
    }

    #[test]
    fn orthogonal_cylinders_near_tight() {
        let eps = 0.05;
        let w = 1.0 / 2f64.sqrt() - eps;
        let cyls = vec![
            Cylinder::new(
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
                w,
            )
            .unwrap(),
            Cylinder::new(
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
                w,
            )
            .unwrap(),
        ];
        let out = uncovered_witness(&cyls, 1.0, &cfg(6)).unwrap();
        let CoveringOutcome::Witness { margins, .. } = out else {
            panic!("budget below R^2")
        };
        for m in &margins {
            assert!(*m > 0.0);
        }
    }

    #[test]
    fn budget_not_violated_marker() {
        let disk = Cylinder::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0)], 1.0).unwrap();
        let out = uncovered_witness(&[disk], 1.0, &cfg(1)).unwrap();
        assert!(matches!(
            out,
            CoveringOutcome::BudgetNotViolated { total, limit }
                if (total - 1.0).abs() < 1e-12 && (limit - 1.0).abs() < 1e-12
        ));
    }

    #[test]
    fn scaling_covariance() {
        let disks = vec![
            Cylinder::new(vec![c(1.0, 0.0)], vec![c(0.3, 0.0)], 0.6).unwrap(),
            Cylinder::new(vec![c(1.0, 0.0)], vec![c(-0.3, 0.0)], 0.6).unwrap(),
        ];
        let lam = 2.5;
        let scaled: Vec<Cylinder> = disks
            .iter()
            .map(|d| {
                Cylinder::new(
                    d.u().to_vec(),
                    d.y().iter().map(|z| z * lam).collect(),
                    d.delta() * lam,
                )
                .unwrap()
            })
            .collect();
        let a = uncovered_witness(&disks, 1.0, &cfg(4)).unwrap();
        let b = uncovered_witness(&scaled, lam, &cfg(4)).unwrap();
        let (CoveringOutcome::Witness { point: pa, .. }, CoveringOutcome::Witness { point: pb, .. }) =
            (a, b)
        else {
            panic!("both budgets violated")
        };
        for (x, y) in pa.iter().zip(&pb) {
            assert!((x * lam - y).norm() < 1e-6, "{pa:?} vs {pb:?}");
        }
    }
}
