//! Distance estimation from a point to polynomial zero sets.
//!
//! The fast path minimizes |y - p|^2 + penalty * |P(y)|^2 with an increasing
//! penalty schedule, then projects onto {P = 0} with Newton steps and slides
//! tangentially toward p. Every reported distance comes from a feasible point
//! on the variety, so it is an upper bound that can be checked independently
//! by evaluating P there. A dense-grid oracle covers low dimensions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{min_norm_step, project_out_rows};
use crate::num::{pack, rdot, rnorm, unpack, C64};
use crate::poly::{Field, MultiPoly};
use nalgebra::DMatrix;

/// A point P(y) counts as "on the variety" when |P(y)| is below this times
/// the coefficient scale.
const ON_VARIETY_REL: f64 = 1e-12;

/// Residual threshold (relative to coefficient scale) for accepting a
/// projected point as feasible.
const FEASIBLE_REL: f64 = 1e-9;

/// Newton projection is skipped near singular points of the variety.
const SINGULAR_GRAD_REL: f64 = 1e-8;

/// Knobs for the penalized estimators.
#[derive(Clone, Debug)]
pub struct DistanceConfig {
    /// Multistart count.
    pub starts: usize,
    /// RNG seed; identical seeds give identical estimates.
    pub seed: u64,
    /// Exterior-penalty continuation schedule.
    pub penalties: Vec<f64>,
    /// Grid settings for the brute-force oracle.
    pub grid: GridSpec,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig {
            starts: 24,
            seed: 0,
            penalties: vec![1e2, 1e4, 1e6, 1e8],
            grid: GridSpec::default(),
        }
    }
}

/// Resolution spec for the brute-force grid oracle.
#[derive(Clone, Debug)]
pub struct GridSpec {
    /// Node spacing along every real axis.
    pub resolution: f64,
    /// Half-width of the search box centered at the query point.
    pub half_width: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: 1e-3,
            half_width: 2.0,
        }
    }
}

impl GridSpec {
    /// Cell diagonal for an m-real-dimensional grid.
    pub fn diameter(&self, real_dims: usize) -> f64 {
        self.resolution * (real_dims as f64).sqrt()
    }
}

/// Distance estimate together with the achieving point, so feasibility is
/// independently checkable. `zero` is None when no zero was found (empty or
/// unreachable zero set) and `distance` is then +infinity.
#[derive(Clone, Debug)]
pub struct DistanceEstimate {
    pub distance: f64,
    pub zero: Option<Vec<C64>>,
    pub residual: f64,
}

impl DistanceEstimate {
    fn empty() -> Self {
        DistanceEstimate {
            distance: f64::INFINITY,
            zero: None,
            residual: f64::INFINITY,
        }
    }
}

/// Strategy interface so callers can swap the fast path for the oracle.
pub trait DistanceEstimator {
    fn name(&self) -> &'static str;
    fn estimate(
        &self,
        poly: &MultiPoly,
        point: &[C64],
        cfg: &DistanceConfig,
    ) -> Result<DistanceEstimate>;
}

/// The default penalized multistart estimator.
pub struct PenalizedEstimator;

impl DistanceEstimator for PenalizedEstimator {
    fn name(&self) -> &'static str {
        "penalized"
    }

    fn estimate(
        &self,
        poly: &MultiPoly,
        point: &[C64],
        cfg: &DistanceConfig,
    ) -> Result<DistanceEstimate> {
        distance_to_zero_set(poly, point, cfg)
    }
}

/// The dense-grid oracle (low dimensions only).
pub struct GridEstimator;

impl DistanceEstimator for GridEstimator {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn estimate(
        &self,
        poly: &MultiPoly,
        point: &[C64],
        cfg: &DistanceConfig,
    ) -> Result<DistanceEstimate> {
        brute_force_distance(poly, point, &cfg.grid)
    }
}

/// Look up an estimator by name.
pub fn estimator(name: &str) -> Result<Box<dyn DistanceEstimator>> {
    match name {
        "penalized" => Ok(Box::new(PenalizedEstimator)),
        "grid" => Ok(Box::new(GridEstimator)),
        other => Err(Error::InvalidConfig(format!(
            "unknown distance estimator '{other}' (expected 'penalized' or 'grid')"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Shared local minimization helpers (real packed coordinates throughout).

enum MinDomain {
    /// |y - center| <= radius box truncation.
    Ball { center: Vec<f64>, radius: f64 },
    Sphere,
}

impl MinDomain {
    fn retract(&self, mut x: Vec<f64>) -> Vec<f64> {
        match self {
            MinDomain::Ball { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                let n = rnorm(&d);
                if n > *radius {
                    let s = *radius / n;
                    for (xi, (ci, di)) in x.iter_mut().zip(center.iter().zip(&d)) {
                        *xi = ci + s * di;
                    }
                }
                x
            }
            MinDomain::Sphere => {
                let n = rnorm(&x).max(1e-300);
                for v in x.iter_mut() {
                    *v /= n;
                }
                x
            }
        }
    }

    fn project_gradient(&self, x: &[f64], mut g: Vec<f64>) -> Vec<f64> {
        if let MinDomain::Sphere = self {
            let dot = rdot(&g, x);
            for (gi, xi) in g.iter_mut().zip(x) {
                *gi -= dot * xi;
            }
        }
        g
    }
}

/// Armijo backtracking descent.
fn descend<F, G>(domain: &MinDomain, mut x: Vec<f64>, value: F, grad: G) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut fx = value(&x);
    for _ in 0..400 {
        let g = domain.project_gradient(&x, grad(&x));
        let gn2 = rdot(&g, &g);
        if gn2.sqrt() < 1e-12 {
            break;
        }
        let mut t = 1.0;
        let mut moved = false;
        while t >= 1e-14 {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            let cand = domain.retract(cand);
            let fc = value(&cand);
            if fc <= fx - 1e-4 * t * gn2 {
                x = cand;
                fx = fc;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x
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

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    rnorm(&sub(a, b))
}

// ---------------------------------------------------------------------------
// A polynomial viewed through packed real coordinates.

struct PackedPoly<'a> {
    poly: &'a MultiPoly,
    complex: bool,
    scale: f64,
}

impl<'a> PackedPoly<'a> {
    fn new(poly: &'a MultiPoly) -> Self {
        PackedPoly {
            poly,
            complex: poly.field() == Field::Complex,
            scale: poly.coeff_scale().max(f64::MIN_POSITIVE),
        }
    }

    fn real_dims(&self) -> usize {
        if self.complex {
            2 * self.poly.dim()
        } else {
            self.poly.dim()
        }
    }

    fn to_complex(&self, x: &[f64]) -> Vec<C64> {
        if self.complex {
            unpack(x)
        } else {
            x.iter().map(|&v| C64::new(v, 0.0)).collect()
        }
    }

    fn value(&self, x: &[f64]) -> C64 {
        self.poly.evaluate(&self.to_complex(x)).expect("dims checked")
    }

    /// Packed-real gradient of |P|^2.
    fn grad_abs2(&self, x: &[f64]) -> Vec<f64> {
        let z = self.to_complex(x);
        let v = self.poly.evaluate(&z).expect("dims checked");
        let g = self.poly.gradient(&z).expect("dims checked");
        if self.complex {
            let mut out = Vec::with_capacity(2 * g.len());
            for gi in &g {
                let w = v.conj() * gi;
                out.push(2.0 * w.re);
                out.push(-2.0 * w.im);
            }
            out
        } else {
            g.iter().map(|gi| 2.0 * (v.conj() * gi).re).collect()
        }
    }

    /// Packed-real gradient of the (real) constraint pair (Re P, Im P) as
    /// matrix rows; one row for real-field polynomials.
    fn constraint_rows(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let z = self.to_complex(x);
        let g = self.poly.gradient(&z).expect("dims checked");
        if self.complex {
            let mut re_row = Vec::with_capacity(2 * g.len());
            let mut im_row = Vec::with_capacity(2 * g.len());
            for gi in &g {
                re_row.push(gi.re);
                re_row.push(-gi.im);
                im_row.push(gi.im);
                im_row.push(gi.re);
            }
            vec![re_row, im_row]
        } else {
            vec![g.iter().map(|gi| gi.re).collect()]
        }
    }

    fn residual(&self, x: &[f64]) -> f64 {
        self.value(x).norm() / self.scale
    }

    /// One Newton step toward {P = 0}; None near singular points.
    fn newton_step(&self, x: &[f64]) -> Option<Vec<f64>> {
        let z = self.to_complex(x);
        let v = self.poly.evaluate(&z).expect("dims checked");
        let g = self.poly.gradient(&z).expect("dims checked");
        let gn2: f64 = g.iter().map(|gi| gi.norm_sqr()).sum();
        if gn2.sqrt() < SINGULAR_GRAD_REL * self.scale {
            return None;
        }
        if self.complex {
            let dz: Vec<C64> = g.iter().map(|gi| -v * gi.conj() / gn2).collect();
            let mut out = x.to_vec();
            for (i, d) in dz.iter().enumerate() {
                out[2 * i] += d.re;
                out[2 * i + 1] += d.im;
            }
            Some(out)
        } else {
            let step: Vec<f64> = g.iter().map(|gi| v.re * gi.re / gn2).collect();
            Some(sub(x, &step))
        }
    }

    /// Iterated Newton projection onto {P = 0} (renormalized onto the sphere
    /// when asked); Some(point) only when the result is feasible.
    fn project_free(&self, mut x: Vec<f64>, sphere: bool) -> Option<Vec<f64>> {
        for _ in 0..60 {
            if self.residual(&x) <= FEASIBLE_REL {
                return Some(x);
            }
            let mut next = self.newton_step(&x)?;
            if sphere {
                next = MinDomain::Sphere.retract(next);
            }
            x = next;
        }
        if self.residual(&x) <= FEASIBLE_REL {
            Some(x)
        } else {
            None
        }
    }

    /// Project w onto the tangent space of {P = 0} at x (and of the sphere
    /// when applicable).
    fn tangent_project(&self, x: &[f64], w: &[f64], sphere: bool) -> Vec<f64> {
        let mut w = w.to_vec();
        if sphere {
            let dot = rdot(&w, x);
            for (wi, xi) in w.iter_mut().zip(x) {
                *wi -= dot * xi;
            }
        }
        for row in self.constraint_rows(x) {
            let mut row = row;
            if sphere {
                let dot = rdot(&row, x);
                for (ri, xi) in row.iter_mut().zip(x) {
                    *ri -= dot * xi;
                }
            }
            let n2 = rdot(&row, &row);
            if n2.sqrt() < SINGULAR_GRAD_REL * self.scale {
                continue;
            }
            let dot = rdot(&w, &row) / n2;
            for (wi, ri) in w.iter_mut().zip(&row) {
                *wi -= dot * ri;
            }
        }
        w
    }
}

// ---------------------------------------------------------------------------
// Public estimators.

/// Upper-bound estimate of the Euclidean distance from `point` to Z(poly).
pub fn distance_to_zero_set(
    poly: &MultiPoly,
    point: &[C64],
    cfg: &DistanceConfig,
) -> Result<DistanceEstimate> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let pp = PackedPoly::new(poly);
    let p = real_coords(&pp, point)?;

    if pp.residual(&p) < ON_VARIETY_REL {
        return Ok(DistanceEstimate {
            distance: 0.0,
            zero: Some(point.to_vec()),
            residual: pp.residual(&p),
        });
    }
    if poly.degree() == 0 {
        // Nonzero constant: empty zero set.
        return Ok(DistanceEstimate::empty());
    }
    if poly.degree() == 1 {
        return Ok(linear_distance(poly, &pp, &p));
    }

    let radius = 2.0 * rnorm(&p) + 2.0;
    let domain = MinDomain::Ball {
        center: p.clone(),
        radius,
    };
    let m = pp.real_dims();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in 0..cfg.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(0x6469_7374 + s as u64);
        let x0 = sample_near(&mut rng, &p, if s == 0 { 1e-2 } else { radius }, m);
        let mut x = x0;
        for &mu in &cfg.penalties {
            let w = mu / (pp.scale * pp.scale);
            x = descend(
                &domain,
                x,
                |y| {
                    let d = sub(y, &p);
                    rdot(&d, &d) + w * pp.value(y).norm_sqr()
                },
                |y| {
                    let mut g = pp.grad_abs2(y);
                    for (gi, (yi, pi)) in g.iter_mut().zip(y.iter().zip(&p)) {
                        *gi = w * *gi + 2.0 * (yi - pi);
                    }
                    g
                },
            );
        }
        let Some(mut y) = pp.project_free(x, false) else {
            continue;
        };
        slide_toward(&pp, &mut y, &p, false);
        consider(&mut best, dist(&y, &p), y);
    }
    Ok(finish(best, &pp))
}

/// Tangential descent of |y - p| along the variety (and sphere when asked).
fn slide_toward(pp: &PackedPoly, y: &mut Vec<f64>, p: &[f64], sphere: bool) {
    let mut t = 0.5;
    for _ in 0..300 {
        if t < 1e-13 {
            break;
        }
        let w = pp.tangent_project(y, &sub(p, y), sphere);
        if rnorm(&w) < 1e-14 {
            break;
        }
        let cand: Vec<f64> = y.iter().zip(&w).map(|(a, b)| a + t * b).collect();
        let cand = if sphere {
            MinDomain::Sphere.retract(cand)
        } else {
            cand
        };
        match pp.project_free(cand, sphere) {
            Some(c) if dist(&c, p) < dist(y, p) - 1e-15 => *y = c,
            _ => t *= 0.5,
        }
    }
}

fn consider(best: &mut Option<(f64, Vec<f64>)>, d: f64, y: Vec<f64>) {
    match best {
        None => *best = Some((d, y)),
        Some((bd, by)) => {
            if d < *bd - 1e-12 || (d < *bd + 1e-12 && lex_less(&y, by)) {
                *best = Some((d, y));
            }
        }
    }
}

fn finish(best: Option<(f64, Vec<f64>)>, pp: &PackedPoly) -> DistanceEstimate {
    match best {
        Some((d, y)) => DistanceEstimate {
            distance: d,
            residual: pp.residual(&y),
            zero: Some(pp.to_complex(&y)),
        },
        None => DistanceEstimate::empty(),
    }
}

fn real_coords(pp: &PackedPoly, point: &[C64]) -> Result<Vec<f64>> {
    if point.len() != pp.poly.dim() {
        return Err(Error::DimensionMismatch {
            expected: pp.poly.dim(),
            got: point.len(),
        });
    }
    if pp.complex {
        Ok(pack(point))
    } else {
        if point.iter().any(|z| z.im.abs() > 1e-9) {
            return Err(Error::FieldMismatch(
                "real polynomial requires a real point".into(),
            ));
        }
        Ok(point.iter().map(|z| z.re).collect())
    }
}

/// Exact hyperplane distance |L(p)| / |grad L| with the achieving point.
fn linear_distance(poly: &MultiPoly, pp: &PackedPoly, p: &[f64]) -> DistanceEstimate {
    let z = pp.to_complex(p);
    let v = poly.evaluate(&z).expect("dims checked");
    let g = poly.gradient(&z).expect("dims checked");
    let gn2: f64 = g.iter().map(|gi| gi.norm_sqr()).sum();
    if gn2 == 0.0 {
        return DistanceEstimate::empty();
    }
    let y: Vec<C64> = z
        .iter()
        .zip(&g)
        .map(|(zi, gi)| zi - v * gi.conj() / gn2)
        .collect();
    let residual = poly.evaluate(&y).expect("dims checked").norm() / pp.scale;
    DistanceEstimate {
        distance: v.norm() / gn2.sqrt(),
        zero: Some(y),
        residual,
    }
}

/// Angular distance arccos(max{point . y : y on the unit sphere, P(y) = 0});
/// pi when the zero set misses the sphere.
pub fn angular_distance_on_sphere(
    poly: &MultiPoly,
    point: &[f64],
    cfg: &DistanceConfig,
) -> Result<f64> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if poly.field() != Field::Real {
        return Err(Error::FieldMismatch(
            "angular distance needs a real polynomial".into(),
        ));
    }
    if point.len() != poly.dim() {
        return Err(Error::DimensionMismatch {
            expected: poly.dim(),
            got: point.len(),
        });
    }
    let n = rnorm(point);
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit { norm: n });
    }
    let pp = PackedPoly::new(poly);
    let m = poly.dim();
    let domain = MinDomain::Sphere;
    let mut best_dot: Option<(f64, Vec<f64>)> = None;
    for s in 0..cfg.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(0x616e_6700 + s as u64);
        let mut x: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        x = domain.retract(x);
        for &mu in &cfg.penalties {
            let w = mu / (pp.scale * pp.scale);
            x = descend(
                &domain,
                x,
                |y| -rdot(y, point) + w * pp.value(y).norm_sqr(),
                |y| {
                    let mut g = pp.grad_abs2(y);
                    for (gi, pi) in g.iter_mut().zip(point) {
                        *gi = w * *gi - pi;
                    }
                    g
                },
            );
        }
        let Some(mut y) = pp.project_free(x, true) else {
            continue;
        };
        // Slide along Z(P) on the sphere, maximizing the dot product.
        let mut t = 0.5;
        for _ in 0..300 {
            if t < 1e-13 {
                break;
            }
            let w = pp.tangent_project(&y, point, true);
            if rnorm(&w) < 1e-14 {
                break;
            }
            let cand: Vec<f64> = y.iter().zip(&w).map(|(a, b)| a + t * b).collect();
            let cand = MinDomain::Sphere.retract(cand);
            match pp.project_free(cand, true) {
                Some(c) if rdot(&c, point) > rdot(&y, point) + 1e-15 => y = c,
                _ => t *= 0.5,
            }
        }
        let dot = rdot(&y, point);
        match &best_dot {
            None => best_dot = Some((dot, y)),
            Some((bd, by)) => {
                if dot > bd + 1e-12 || (dot > bd - 1e-12 && lex_less(&y, by)) {
                    best_dot = Some((dot, y));
                }
            }
        }
    }
    Ok(match best_dot {
        Some((dot, _)) => dot.clamp(-1.0, 1.0).acos(),
        None => std::f64::consts::PI,
    })
}

/// Distance to the common zero set of several polynomials; +infinity when
/// no common zero is found.
pub fn distance_to_common_zero_set(
    polys: &[MultiPoly],
    point: &[C64],
    cfg: &DistanceConfig,
) -> Result<f64> {
    let Some(first) = polys.first() else {
        return Err(Error::InvalidConfig("need at least one polynomial".into()));
    };
    if polys.len() == 1 {
        return Ok(distance_to_zero_set(first, point, cfg)?.distance);
    }
    let packed: Vec<PackedPoly> = polys.iter().map(PackedPoly::new).collect();
    for pp in &packed {
        if pp.poly.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if pp.poly.dim() != first.dim() || pp.poly.field() != first.field() {
            return Err(Error::FieldMismatch(
                "common-zero polynomials must share dimension and field".into(),
            ));
        }
    }
    let p = real_coords(&packed[0], point)?;
    let radius = 2.0 * rnorm(&p) + 2.0;
    let domain = MinDomain::Ball {
        center: p.clone(),
        radius,
    };
    let m = packed[0].real_dims();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in 0..cfg.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(0x636f_6d00 + s as u64);
        let mut x = sample_near(&mut rng, &p, if s == 0 { 1e-2 } else { radius }, m);
        for &mu in &cfg.penalties {
            x = descend(
                &domain,
                x,
                |y| {
                    let d = sub(y, &p);
                    let pen: f64 = packed
                        .iter()
                        .map(|pp| pp.value(y).norm_sqr() / (pp.scale * pp.scale))
                        .sum();
                    rdot(&d, &d) + mu * pen
                },
                |y| {
                    let mut g = vec![0.0; m];
                    for pp in &packed {
                        let ga = pp.grad_abs2(y);
                        let w = mu / (pp.scale * pp.scale);
                        for (gi, gai) in g.iter_mut().zip(&ga) {
                            *gi += w * gai;
                        }
                    }
                    for (gi, (yi, pi)) in g.iter_mut().zip(y.iter().zip(&p)) {
                        *gi += 2.0 * (yi - pi);
                    }
                    g
                },
            );
        }
        let Some(mut y) = gauss_newton_project(&packed, x) else {
            continue;
        };
        // Tangential improvement via projection out of the joint Jacobian.
        let mut t = 0.5;
        for _ in 0..200 {
            if t < 1e-13 {
                break;
            }
            let j = joint_jacobian(&packed, &y);
            let Some(w) = project_out_rows(&j, &sub(&p, &y), 1e-14) else {
                break;
            };
            if rnorm(&w) < 1e-14 {
                break;
            }
            let cand: Vec<f64> = y.iter().zip(&w).map(|(a, b)| a + t * b).collect();
            match gauss_newton_project(&packed, cand) {
                Some(c) if dist(&c, &p) < dist(&y, &p) - 1e-15 => y = c,
                _ => t *= 0.5,
            }
        }
        consider(&mut best, dist(&y, &p), y);
    }
    Ok(best.map_or(f64::INFINITY, |(d, _)| d))
}

fn joint_jacobian(packed: &[PackedPoly], x: &[f64]) -> DMatrix<f64> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for pp in packed {
        for row in pp.constraint_rows(x) {
            rows.push(row.iter().map(|v| v / pp.scale).collect());
        }
    }
    let m = x.len();
    DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j])
}

fn joint_residual(packed: &[PackedPoly], x: &[f64]) -> Vec<f64> {
    let mut r = Vec::new();
    for pp in packed {
        let v = pp.value(x) / pp.scale;
        r.push(v.re);
        if pp.complex {
            r.push(v.im);
        }
    }
    r
}

fn gauss_newton_project(packed: &[PackedPoly], mut x: Vec<f64>) -> Option<Vec<f64>> {
    for _ in 0..80 {
        let r = joint_residual(packed, &x);
        if rnorm(&r) <= FEASIBLE_REL {
            return Some(x);
        }
        let j = joint_jacobian(packed, &x);
        let s = min_norm_step(&j, &r, 1e-14)?;
        let sn = rnorm(&s);
        if !sn.is_finite() || sn > 1e6 {
            return None;
        }
        for (xi, si) in x.iter_mut().zip(&s) {
            *xi -= si;
        }
    }
    if rnorm(&joint_residual(packed, &x)) <= FEASIBLE_REL {
        Some(x)
    } else {
        None
    }
}

fn sample_near(rng: &mut ChaCha8Rng, center: &[f64], radius: f64, m: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
    let n = rnorm(&v).max(1e-300);
    let u: f64 = rng.gen_range(0.0f64..1.0);
    let r = radius * u.powf(1.0 / m as f64);
    for (vi, ci) in v.iter_mut().zip(center) {
        *vi = ci + *vi * r / n;
    }
    v
}

// ---------------------------------------------------------------------------
// Brute-force grid oracle.

/// Dense-grid distance oracle, accurate to about one grid diameter.
/// Limited to at most 4 real search dimensions.
pub fn brute_force_distance(
    poly: &MultiPoly,
    point: &[C64],
    grid: &GridSpec,
) -> Result<DistanceEstimate> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let pp = PackedPoly::new(poly);
    let m = pp.real_dims();
    if m > 4 {
        return Err(Error::GridDimension { got: m, max: 4 });
    }
    let p = real_coords(&pp, point)?;
    let h = grid.resolution;
    if !(h > 0.0) {
        return Err(Error::InvalidConfig("grid resolution must be positive".into()));
    }
    let per_axis = (2.0 * grid.half_width / h).floor() as u64 + 1;
    let nodes = per_axis.checked_pow(m as u32).unwrap_or(u64::MAX);
    const NODE_LIMIT: u64 = 60_000_000;
    if nodes > NODE_LIMIT {
        return Err(Error::GridTooLarge {
            nodes: nodes as u128,
            limit: NODE_LIMIT as u128,
        });
    }

    // Lipschitz bound for |P| over the box, per real coordinate.
    let bound_coord = p
        .iter()
        .map(|c| c.abs() + grid.half_width)
        .fold(1.0f64, f64::max);
    let mut lip = 0.0f64;
    for i in 0..poly.dim() {
        let pi = poly.partial(i)?;
        let mut b = 0.0;
        for (exp, c) in pi.terms() {
            let deg: u32 = exp.iter().sum();
            b += c.norm() * bound_coord.powi(deg as i32);
        }
        lip += b * b * if pp.complex { 2.0 } else { 1.0 };
    }
    let lip = lip.sqrt();
    let diam = grid.diameter(m);
    let flag_tol = lip * diam; // |P| changes at most lip*diam/2 within a cell

    let eval = compile_eval(&pp);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut coords = vec![0u64; m];
    let lo: Vec<f64> = p.iter().map(|c| c - grid.half_width).collect();
    let mut x = lo.clone();
    // Previous value along the fastest-varying (last) axis, for sign changes.
    let mut prev: Option<C64> = None;
    loop {
        for (i, &c) in coords.iter().enumerate() {
            x[i] = lo[i] + c as f64 * h;
        }
        let v = eval(&x);
        let node_dist = dist(&x, &p);
        let worth = best.as_ref().map_or(true, |(bd, _)| node_dist - diam < *bd);

        if worth && v.norm() <= flag_tol {
            // Candidate cell: polish onto the variety with Newton. The
            // polished point is feasible, so its distance is a valid
            // candidate no matter how far the polish traveled; the node
            // itself is only used when the projection fails (singular
            // gradient), where the flag band still bounds the error.
            match pp.project_free(x.clone(), false) {
                Some(y) => consider(&mut best, dist(&y, &p), y),
                None => consider(&mut best, node_dist, x.clone()),
            }
        }
        if !pp.complex {
            if let Some(pv) = prev {
                if worth && pv.re * v.re < 0.0 {
                    // Sign change along the last axis: bisect the segment.
                    let mut a = x.clone();
                    a[m - 1] -= h;
                    let y = bisect_segment(&eval, a, x.clone());
                    consider(&mut best, dist(&y, &p), y);
                }
            }
        }
        prev = Some(v);

        // Odometer increment; reset sign tracking when the last axis wraps.
        let mut axis = m;
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            coords[axis] += 1;
            if coords[axis] < per_axis {
                break;
            }
            coords[axis] = 0;
            if axis == 0 {
                return Ok(finish(best, &pp));
            }
        }
        if coords[m - 1] == 0 {
            prev = None;
        }
    }
}

/// Secondary sign-change sweep is unnecessary for the oracle's guarantee:
/// the |P| <= lip*diam flag already catches every cell the variety meets.
fn bisect_segment<F>(eval: &F, mut a: Vec<f64>, mut b: Vec<f64>) -> Vec<f64>
where
    F: Fn(&[f64]) -> C64,
{
    let mut fa = eval(&a).re;
    for _ in 0..80 {
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let fm = eval(&mid).re;
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    a
}

/// Precompiled evaluator: dense Horner for univariate complex polynomials,
/// flattened term list otherwise. The grid loop dominates oracle runtime.
fn compile_eval<'a>(pp: &'a PackedPoly<'a>) -> Box<dyn Fn(&[f64]) -> C64 + 'a> {
    if pp.complex && pp.poly.dim() == 1 {
        let coeffs = pp
            .poly
            .restrict_to_complex_line(&[C64::new(0.0, 0.0)], &[C64::new(1.0, 0.0)])
            .expect("univariate restriction");
        return Box::new(move |x: &[f64]| {
            let z = C64::new(x[0], x[1]);
            let mut acc = C64::new(0.0, 0.0);
            for c in coeffs.iter().rev() {
                acc = acc * z + c;
            }
            acc
        });
    }
    let terms: Vec<(Vec<u32>, C64)> = pp
        .poly
        .terms()
        .map(|(e, c)| (e.clone(), *c))
        .collect();
    let complex = pp.complex;
    Box::new(move |x: &[f64]| {
        let mut acc = C64::new(0.0, 0.0);
        for (exp, c) in &terms {
            let mut t = *c;
            for (i, &e) in exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if complex {
                    t *= C64::new(x[2 * i], x[2 * i + 1]).powu(e);
                } else {
                    t *= x[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn z1z2() -> MultiPoly {
        MultiPoly::new(2, Field::Complex, [(vec![1, 1], c(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn linear_form_distance() {
        let p = MultiPoly::variable(2, Field::Complex, 0).unwrap();
        let cfg = DistanceConfig::default();
        let est = distance_to_zero_set(&p, &[c(0.8, 0.6), c(5.0, -2.0)], &cfg).unwrap();
        assert_relative_eq!(est.distance, 1.0, epsilon = 1e-12);
        assert!(est.residual < 1e-12);
    }

    #[test]
    fn product_of_hyperplanes() {
        let cfg = DistanceConfig::default();
        let est = distance_to_zero_set(&z1z2(), &[c(3.0, 0.0), c(4.0, 0.0)], &cfg).unwrap();
        assert_relative_eq!(est.distance, 3.0, epsilon = 1e-6);
        let zero = est.zero.unwrap();
        assert!(z1z2().evaluate(&zero).unwrap().norm() < 1e-8);
    }

    #[test]
    fn real_circle_distance_with_grid_oracle() {
        // x1^2 + x2^2 - 1, distance 1 from the origin.
        let p = MultiPoly::new(
            2,
            Field::Real,
            [
                (vec![2, 0], c(1.0, 0.0)),
                (vec![0, 2], c(1.0, 0.0)),
                (vec![0, 0], c(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let cfg = DistanceConfig::default();
        let origin = [c(0.0, 0.0), c(0.0, 0.0)];
        let est = distance_to_zero_set(&p, &origin, &cfg).unwrap();
        assert_relative_eq!(est.distance, 1.0, epsilon = 1e-8);
        let grid = GridSpec {
            resolution: 4e-3,
            half_width: 2.0,
        };
        let oracle = brute_force_distance(&p, &origin, &grid).unwrap();
        assert!((oracle.distance - est.distance).abs() <= 2.0 * grid.diameter(2));
    }

    #[test]
    fn zero_distance_on_variety() {
        let est = distance_to_zero_set(
            &z1z2(),
            &[c(0.0, 0.0), c(7.0, 1.0)],
            &DistanceConfig::default(),
        )
        .unwrap();
        assert_eq!(est.distance, 0.0);
    }

    #[test]
    fn angular_equator() {
        let p = MultiPoly::variable(3, Field::Real, 0).unwrap();
        let e1 = [1.0, 0.0, 0.0];
        let a = angular_distance_on_sphere(&p, &e1, &DistanceConfig::default()).unwrap();
        assert_relative_eq!(a, FRAC_PI_2, epsilon = 1e-8);
    }

    #[test]
    fn angular_shifted_hyperplane() {
        // x1 - 1/2 on the circle: nearest zero at angle pi/3 from e1.
        let x1 = MultiPoly::variable(2, Field::Real, 0).unwrap();
        let half = MultiPoly::constant(2, Field::Real, c(-0.5, 0.0)).unwrap();
        let p = x1.add(&half).unwrap();
        let a = angular_distance_on_sphere(&p, &[1.0, 0.0], &DistanceConfig::default()).unwrap();
        assert_relative_eq!(a, FRAC_PI_3, epsilon = 1e-8);
    }

    #[test]
    fn angular_two_lines_with_circle_scan() {
        // Product of two linear forms whose zero lines sit at angles +-pi/8;
        // e1 lies between them at angular distance pi/8 from each.
        let t = PI / 8.0;
        let l1 = MultiPoly::affine(
            Field::Real,
            &[c(t.sin(), 0.0), c(-t.cos(), 0.0)],
            c(0.0, 0.0),
        )
        .unwrap();
        let l2 = MultiPoly::affine(
            Field::Real,
            &[c(t.sin(), 0.0), c(t.cos(), 0.0)],
            c(0.0, 0.0),
        )
        .unwrap();
        let p = l1.mul(&l2).unwrap();
        let a = angular_distance_on_sphere(&p, &[1.0, 0.0], &DistanceConfig::default()).unwrap();
        assert_relative_eq!(a, PI / 8.0, epsilon = 1e-8);

        // Independent oracle: scan 100k circle points.
        let mut best = f64::INFINITY;
        let nscan = 100_000;
        for i in 0..nscan {
            let th = 2.0 * PI * i as f64 / nscan as f64;
            let y = [th.cos(), th.sin()];
            if p.evaluate_real(&y).unwrap().norm() < 1e-4 {
                best = best.min(y[0].clamp(-1.0, 1.0).acos());
            }
        }
        assert!((a - best).abs() < 1e-3);
    }

    #[test]
    fn angular_empty_zero_set_is_pi() {
        // x1^2 + x2^2 + 1 never vanishes.
        let p = MultiPoly::new(
            2,
            Field::Real,
            [
                (vec![2, 0], c(1.0, 0.0)),
                (vec![0, 2], c(1.0, 0.0)),
                (vec![0, 0], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        let a = angular_distance_on_sphere(&p, &[0.0, 1.0], &DistanceConfig::default()).unwrap();
        assert_eq!(a, PI);
    }

    #[test]
    fn common_zero_origin() {
        let polys = [
            MultiPoly::variable(2, Field::Complex, 0).unwrap(),
            MultiPoly::variable(2, Field::Complex, 1).unwrap(),
        ];
        let d = distance_to_common_zero_set(
            &polys,
            &[c(0.3, 0.4), c(0.0, 1.2)],
            &DistanceConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(d, (0.25f64 + 1.44).sqrt(), epsilon = 1e-7);
    }

    #[test]
    fn common_zero_single_reduction() {
        let polys = [z1z2()];
        let pt = [c(3.0, 0.0), c(4.0, 0.0)];
        let cfg = DistanceConfig::default();
        let d = distance_to_common_zero_set(&polys, &pt, &cfg).unwrap();
        let e = distance_to_zero_set(&z1z2(), &pt, &cfg).unwrap().distance;
        assert_eq!(d, e);
    }

    #[test]
    fn common_zero_hand_reduction() {
        // {z1, z1 z2}: the common zero set is {z1 = 0}, distance 1 from (1,1).
        let polys = [MultiPoly::variable(2, Field::Complex, 0).unwrap(), z1z2()];
        let d = distance_to_common_zero_set(
            &polys,
            &[c(1.0, 0.0), c(1.0, 0.0)],
            &DistanceConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(d, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn common_zero_monotonicity() {
        let polys = [
            MultiPoly::new(
                2,
                Field::Complex,
                [(vec![2, 0], c(1.0, 0.0)), (vec![0, 1], c(1.0, 0.0))],
            )
            .unwrap(),
            MultiPoly::new(
                2,
                Field::Complex,
                [(vec![1, 0], c(1.0, 0.0)), (vec![0, 0], c(-0.5, 0.3))],
            )
            .unwrap(),
        ];
        let pt = [c(0.9, -0.2), c(0.4, 0.7)];
        let cfg = DistanceConfig::default();
        let joint = distance_to_common_zero_set(&polys, &pt, &cfg).unwrap();
        for p in &polys {
            let single = distance_to_zero_set(p, &pt, &cfg).unwrap().distance;
            assert!(joint >= single - 1e-8);
        }
    }

    #[test]
    fn brute_force_hyperplane() {
        let p = MultiPoly::variable(2, Field::Real, 0).unwrap();
        let grid = GridSpec {
            resolution: 1e-3,
            half_width: 1.0,
        };
        let est = brute_force_distance(&p, &[c(0.7, 0.0), c(0.0, 0.0)], &grid).unwrap();
        assert!((est.distance - 0.7).abs() <= 2e-3);
    }

    #[test]
    fn brute_force_complex_roots() {
        // z^2 - 1 from 0: roots at +-1.
        let p = MultiPoly::new(
            1,
            Field::Complex,
            [(vec![2], c(1.0, 0.0)), (vec![0], c(-1.0, 0.0))],
        )
        .unwrap();
        let grid = GridSpec {
            resolution: 1e-3,
            half_width: 1.3,
        };
        let est = brute_force_distance(&p, &[c(0.0, 0.0)], &grid).unwrap();
        assert!((est.distance - 1.0).abs() <= 2e-3);
    }

    #[test]
    fn brute_force_agrees_with_fast_path_on_random_quadratics() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cfg = DistanceConfig::default();
        let grid = GridSpec {
            resolution: 2e-3,
            half_width: 2.0,
        };
        for _ in 0..3 {
            // Random real quadratic with a guaranteed real zero (difference
            // of shifted squares keeps the zero set nonempty).
            let a: f64 = rng.gen_range(0.5..1.5);
            let b: f64 = rng.gen_range(-0.8f64..0.8);
            let p = MultiPoly::new(
                2,
                Field::Real,
                [
                    (vec![2, 0], c(a, 0.0)),
                    (vec![0, 2], c(-1.0, 0.0)),
                    (vec![0, 0], c(b, 0.0)),
                ],
            )
            .unwrap();
            let pt = [c(rng.gen_range(-0.5f64..0.5), 0.0), c(rng.gen_range(-0.5f64..0.5), 0.0)];
            let fast = distance_to_zero_set(&p, &pt, &cfg).unwrap().distance;
            let oracle = brute_force_distance(&p, &pt, &grid).unwrap().distance;
            assert!(
                (fast - oracle).abs() <= 2.0 * grid.diameter(2),
                "fast {fast} oracle {oracle}"
            );
        }
    }

    #[test]
    fn grid_guards() {
        let p = MultiPoly::variable(3, Field::Complex, 0).unwrap();
        let err = brute_force_distance(
            &p,
            &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            &GridSpec::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::GridDimension { got: 6, max: 4 }));

        let q = MultiPoly::variable(2, Field::Complex, 0).unwrap();
        let err = brute_force_distance(
            &q,
            &[c(0.0, 0.0), c(0.0, 0.0)],
            &GridSpec {
                resolution: 1e-4,
                half_width: 2.0,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::GridTooLarge { .. }));
    }

    #[test]
    fn triangle_consistency() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = MultiPoly::new(
            2,
            Field::Complex,
            [
                (vec![2, 0], c(1.0, 0.0)),
                (vec![0, 1], c(0.5, -0.3)),
                (vec![0, 0], c(0.2, 0.1)),
            ],
        )
        .unwrap();
        let cfg = DistanceConfig::default();
        for _ in 0..5 {
            let a: Vec<C64> = (0..2)
                .map(|_| c(rng.gen_range(-1.0f64..1.0), rng.gen_range(-1.0f64..1.0)))
                .collect();
            let b: Vec<C64> = (0..2)
                .map(|_| c(rng.gen_range(-1.0f64..1.0), rng.gen_range(-1.0f64..1.0)))
                .collect();
            let da = distance_to_zero_set(&p, &a, &cfg).unwrap().distance;
            let db = distance_to_zero_set(&p, &b, &cfg).unwrap().distance;
            let ab: f64 = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!((da - db).abs() <= ab + 1e-6);
        }
    }

    #[test]
    fn estimator_registry() {
        assert_eq!(estimator("penalized").unwrap().name(), "penalized");
        assert_eq!(estimator("grid").unwrap().name(), "grid");
        assert!(estimator("magic").is_err());
    }
}
