//! Multistart projected gradient ascent over the ball / sphere domains.
//!
//! No global-optimality certificate is attempted: instances at the scales we
//! target have few basins and the margin check downstream makes optimizer
//! failures visible (status `OptimizationSuspect`) instead of silent.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::distance::{angular_distance_on_sphere, distance_to_zero_set, DistanceConfig};
use crate::error::{Error, Result};
use crate::num::{axpy, rdot, rnorm, unpack, C64};
use crate::objective::{Domain, PlankInstance};

/// Knobs for the multistart ascent.
#[derive(Clone, Debug)]
pub struct MaximizerConfig {
    /// Number of starts; defaults to 64 * d when unset.
    pub starts: Option<usize>,
    /// Iteration cap per start.
    pub max_iters: usize,
    /// Armijo sufficient-increase constant for the backtracking line search.
    pub armijo: f64,
    /// Stop when the projected gradient norm falls below this.
    pub grad_tol: f64,
    /// Stop when the accepted step length falls below this.
    pub step_tol: f64,
    /// RNG seed; identical seeds give identical reports.
    pub seed: u64,
    /// Keep ball-mode iterates inside the effective radius. Disabling this
    /// lets tests probe that the maxima land inside on their own.
    pub clip_to_effective_radius: bool,
    /// Margins below -margin_tol mark the report as suspect.
    pub margin_tol: f64,
    /// Settings forwarded to the distance estimators.
    pub distance: DistanceConfig,
}

impl Default for MaximizerConfig {
    fn default() -> Self {
        MaximizerConfig {
            starts: None,
            max_iters: 2000,
            armijo: 1e-4,
            grad_tol: 1e-10,
            step_tol: 1e-12,
            seed: 0,
            clip_to_effective_radius: true,
            margin_tol: 1e-6,
            distance: DistanceConfig::default(),
        }
    }
}

/// Certification outcome of a witness search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    CertifiedMargins,
    OptimizationSuspect,
}

/// Distance/margin bookkeeping for one instance item.
#[derive(Clone, Debug)]
pub struct ItemMargin {
    pub delta: f64,
    pub distance: f64,
    pub margin: f64,
}

/// The found maximizer together with checkable per-item margins.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub witness: Vec<C64>,
    pub value: f64,
    pub items: Vec<ItemMargin>,
    pub status: Status,
    pub seed: u64,
}

pub(crate) enum AscentDomain {
    Ball { radius: f64, clip: bool },
    Sphere,
}

impl AscentDomain {
    fn sample(&self, rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let n = rnorm(&v).max(1e-300);
        match self {
            AscentDomain::Ball { radius, .. } => {
                let u: f64 = rng.gen_range(0.0..1.0);
                let r = radius * u.powf(1.0 / m as f64);
                for x in v.iter_mut() {
                    *x *= r / n;
                }
            }
            AscentDomain::Sphere => {
                for x in v.iter_mut() {
                    *x /= n;
                }
            }
        }
        v
    }

    fn retract(&self, mut x: Vec<f64>) -> Vec<f64> {
        match self {
            AscentDomain::Ball { radius, clip } => {
                if *clip {
                    let n = rnorm(&x);
                    if n > *radius {
                        let s = *radius / n;
                        for v in x.iter_mut() {
                            *v *= s;
                        }
                    }
                }
                x
            }
            AscentDomain::Sphere => {
                let n = rnorm(&x).max(1e-300);
                for v in x.iter_mut() {
                    *v /= n;
                }
                x
            }
        }
    }

    /// Remove gradient components that lead out of the feasible set.
    fn project_gradient(&self, x: &[f64], mut g: Vec<f64>) -> Vec<f64> {
        match self {
            AscentDomain::Ball { radius, clip } => {
                if *clip {
                    let n = rnorm(x);
                    if n >= radius * (1.0 - 1e-12) && n > 0.0 {
                        let radial = rdot(&g, x) / (n * n);
                        if radial > 0.0 {
                            for (gi, xi) in g.iter_mut().zip(x) {
                                *gi -= radial * xi;
                            }
                        }
                    }
                }
                g
            }
            AscentDomain::Sphere => {
                let dot = rdot(&g, x);
                for (gi, xi) in g.iter_mut().zip(x) {
                    *gi -= dot * xi;
                }
                g
            }
        }
    }
}

/// One ascent run from a fixed start.
fn ascend<F, G>(
    domain: &AscentDomain,
    mut x: Vec<f64>,
    value: &F,
    grad: &G,
    cfg: &MaximizerConfig,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let mut fx = value(&x);
    for _ in 0..cfg.max_iters {
        let Some(raw) = grad(&x) else { break };
        let g = domain.project_gradient(&x, raw);
        let gn2 = rdot(&g, &g);
        if gn2.sqrt() < cfg.grad_tol {
            break;
        }
        let mut t = 1.0;
        let mut accepted = false;
        while t >= cfg.step_tol {
            let cand = domain.retract(axpy(&x, t, &g));
            let fc = value(&cand);
            if fc >= fx + cfg.armijo * t * gn2 {
                x = cand;
                fx = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, fx)
}

/// Gradient-norm polish with Barzilai-Borwein steps. Function comparisons
/// saturate at sqrt(eps) accuracy near a maximum; secant steps do not, so a
/// short gradient-only phase buys several extra digits in the maximizer.
fn bb_polish<F, G>(
    domain: &AscentDomain,
    x0: Vec<f64>,
    value: &F,
    grad: &G,
    iters: usize,
) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let f0 = value(&x0);
    let Some(g0) = grad(&x0) else { return x0 };
    let mut x = x0.clone();
    let mut g = domain.project_gradient(&x, g0);
    let mut best_x = x.clone();
    let mut best_gn = rnorm(&g);
    let mut t = 1e-3;
    for _ in 0..iters {
        if best_gn < 1e-15 {
            break;
        }
        let xn = domain.retract(axpy(&x, t, &g));
        let Some(graw) = grad(&xn) else { break };
        let gn = domain.project_gradient(&xn, graw);
        let gnorm = rnorm(&gn);
        if gnorm < best_gn && value(&xn) >= f0 - 1e-9 {
            best_gn = gnorm;
            best_x = xn.clone();
        }
        // Secant curvature estimate for the next step.
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&gn).map(|(a, b)| a - b).collect();
        let sy = rdot(&s, &y);
        let ss = rdot(&s, &s);
        t = if sy > 1e-300 && ss.is_finite() {
            (ss / sy).clamp(1e-12, 1e3)
        } else {
            1e-3
        };
        x = xn;
        g = gn;
    }
    best_x
}

/// Run `starts` independent ascents and keep the best endpoint.
/// Ties within 1e-12 in value break to the lexicographically smallest
/// coordinate vector so reports are reproducible.
pub(crate) fn multistart_ascent<F, G>(
    domain: &AscentDomain,
    m: usize,
    starts: usize,
    cfg: &MaximizerConfig,
    value: F,
    grad: G,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Option<Vec<f64>>,
{
    for attempt in 0..2u64 {
        let seed = cfg.seed.wrapping_add(attempt);
        let mut best: Option<(Vec<f64>, f64)> = None;
        for s in 0..starts {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64 + 1);
            // Starts that land on a zero set are resampled a few times.
            let mut x0 = None;
            for _ in 0..10 {
                let cand = domain.sample(&mut rng, m);
                if value(&cand).is_finite() {
                    x0 = Some(cand);
                    break;
                }
            }
            let Some(x0) = x0 else { continue };
            let (x, _) = ascend(domain, x0, &value, &grad, cfg);
            let x = bb_polish(domain, x, &value, &grad, 120);
            let fx = value(&x);
            if !fx.is_finite() {
                continue;
            }
            best = Some(match best {
                None => (x, fx),
                Some((bx, bf)) => {
                    if fx > bf + 1e-12 {
                        (x, fx)
                    } else if fx >= bf - 1e-12 && lex_less(&x, &bx) {
                        (x, fx)
                    } else {
                        (bx, bf)
                    }
                }
            });
        }
        if let Some(found) = best {
            return Ok(found);
        }
    }
    Err(Error::AllStartsOnVarieties)
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Maximize the instance objective; returns the packed maximizer and value.
pub(crate) fn maximize_packed(
    instance: &PlankInstance,
    cfg: &MaximizerConfig,
) -> Result<(Vec<f64>, f64)> {
    let m = instance.real_dim();
    let domain = match instance.domain() {
        Domain::ComplexBall { .. } => AscentDomain::Ball {
            radius: instance.effective_radius()?,
            clip: cfg.clip_to_effective_radius,
        },
        Domain::RealSphere => AscentDomain::Sphere,
    };
    let starts = cfg.starts.unwrap_or(64 * instance.dim()).max(1);
    multistart_ascent(
        &domain,
        m,
        starts,
        cfg,
        |x| instance.value_packed(x),
        |x| instance.grad_packed(x),
    )
}

/// Find the best witness over all starts and certify its margins with
/// per-item distance estimates.
pub fn find_witness(instance: &PlankInstance, cfg: &MaximizerConfig) -> Result<WitnessReport> {
    let (x, value) = maximize_packed(instance, cfg)?;
    let mut dcfg = cfg.distance.clone();
    dcfg.seed = cfg.seed;
    let mut items = Vec::with_capacity(instance.items().len());
    let mut suspect = false;
    let witness: Vec<C64> = match instance.domain() {
        Domain::ComplexBall { .. } => unpack(&x),
        Domain::RealSphere => x.iter().map(|&v| C64::new(v, 0.0)).collect(),
    };
    for item in instance.items() {
        let distance = match instance.domain() {
            Domain::ComplexBall { .. } => {
                distance_to_zero_set(&item.poly, &witness, &dcfg)?.distance
            }
            Domain::RealSphere => angular_distance_on_sphere(&item.poly, &x, &dcfg)?,
        };
        let margin = distance - item.delta;
        if margin < -cfg.margin_tol {
            suspect = true;
        }
        items.push(ItemMargin {
            delta: item.delta,
            distance,
            margin,
        });
    }
    Ok(WitnessReport {
        witness,
        value,
        items,
        status: if suspect {
            Status::OptimizationSuspect
        } else {
            Status::CertifiedMargins
        },
        seed: cfg.seed,
    })
}
