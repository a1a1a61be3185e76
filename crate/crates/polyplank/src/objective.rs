//! The witness objectives in log domain.
//!
//! The product forms underflow at any useful scale, so everything is built on
//! log |P| sums; the monotone transform keeps the maximizers in place.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::num::{cnorm, unpack, C64};
use crate::poly::{Field, MultiPoly};

/// Slack absorbing float noise in user-supplied widths.
pub const BUDGET_SLACK: f64 = 1e-12;

/// Search domain of a plank instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// Ball of the given radius in C^d; exponent convention delta_k^2.
    ComplexBall { radius: f64 },
    /// Unit sphere S^{d-1} in R^d; exponent convention delta_k.
    RealSphere,
}

/// One (polynomial, width) pair.
#[derive(Clone, Debug)]
pub struct PlankItem {
    pub poly: MultiPoly,
    pub delta: f64,
}

/// Hypothesis data: polynomials with widths over a domain, budget-checked.
#[derive(Clone, Debug)]
pub struct PlankInstance {
    domain: Domain,
    items: Vec<PlankItem>,
    exploratory: bool,
}

impl PlankInstance {
    pub fn new(domain: Domain, items: Vec<PlankItem>, exploratory: bool) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidConfig("instance needs at least one item".into()));
        }
        if let Domain::ComplexBall { radius } = domain {
            if !(radius > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "ball radius must be positive, got {radius}"
                )));
            }
        }
        let dim = items[0].poly.dim();
        let want_field = match domain {
            Domain::ComplexBall { .. } => Field::Complex,
            Domain::RealSphere => Field::Real,
        };
        for item in &items {
            if item.poly.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: item.poly.dim(),
                });
            }
            if item.poly.field() != want_field {
                return Err(Error::FieldMismatch(format!(
                    "domain expects {want_field:?} polynomials"
                )));
            }
            if item.poly.is_zero() {
                return Err(Error::ZeroPolynomial);
            }
            if !(item.delta > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "width must be positive, got {}",
                    item.delta
                )));
            }
        }
        let instance = PlankInstance {
            domain,
            items,
            exploratory,
        };
        if !exploratory {
            let budget = instance.budget();
            let limit = instance.budget_limit();
            if budget > limit + BUDGET_SLACK {
                return Err(Error::BudgetViolation { budget, limit });
            }
        }
        if domain == Domain::RealSphere {
            instance.check_sphere_restrictions()?;
        }
        Ok(instance)
    }

    /// Sampling check that every polynomial has a nonzero restriction to the
    /// sphere. Fixed seed: the check is part of construction and must be
    /// reproducible.
    fn check_sphere_restrictions(&self) -> Result<()> {
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(0x706c_616e_6b00);
        let samples: Vec<Vec<f64>> = (0..64 * d).map(|_| random_sphere_point(&mut rng, d)).collect();
        for (index, item) in self.items.iter().enumerate() {
            let scale = item.poly.coeff_scale();
            let all_zero = samples.iter().all(|x| {
                item.poly.evaluate_real(x).map_or(true, |v| v.norm() <= 1e-12 * scale)
            });
            if all_zero {
                return Err(Error::ZeroOnSphere { index });
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn items(&self) -> &[PlankItem] {
        &self.items
    }

    pub fn exploratory(&self) -> bool {
        self.exploratory
    }

    /// Ambient dimension d.
    pub fn dim(&self) -> usize {
        self.items[0].poly.dim()
    }

    /// Number of real coordinates the optimizer works in.
    pub(crate) fn real_dim(&self) -> usize {
        match self.domain {
            Domain::ComplexBall { .. } => 2 * self.dim(),
            Domain::RealSphere => self.dim(),
        }
    }

    /// Sum delta_k^2 deg P_k (ball) or delta_k deg P_k (sphere).
    pub fn budget(&self) -> f64 {
        self.items
            .iter()
            .map(|it| match self.domain {
                Domain::ComplexBall { .. } => it.delta * it.delta * it.poly.degree() as f64,
                Domain::RealSphere => it.delta * it.poly.degree() as f64,
            })
            .sum()
    }

    pub fn budget_limit(&self) -> f64 {
        match self.domain {
            Domain::ComplexBall { radius } => radius * radius,
            Domain::RealSphere => 1.0 / std::f64::consts::E,
        }
    }

    /// sqrt(sum delta_k^2 deg P_k): the maximizers of the ball objective lie
    /// inside this radius.
    pub fn effective_radius(&self) -> Result<f64> {
        match self.domain {
            Domain::ComplexBall { .. } => Ok(self.budget().sqrt()),
            Domain::RealSphere => Err(Error::WrongDomain {
                expected: "complex ball",
            }),
        }
    }

    /// Log objective at a point of the ambient space.
    /// Ball: -|z|^2/2 + sum delta_k^2 log |P_k(z)|.
    /// Sphere: sum delta_k log |P_k(x)| with |x| = 1 required.
    /// Returns -inf when some P_k vanishes at the point.
    pub fn log_objective(&self, point: &[C64]) -> Result<f64> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        match self.domain {
            Domain::ComplexBall { .. } => {}
            Domain::RealSphere => {
                if point.iter().any(|z| z.im != 0.0) {
                    return Err(Error::FieldMismatch(
                        "sphere objective expects a real point".into(),
                    ));
                }
                let norm = cnorm(point);
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::NotUnit { norm });
                }
            }
        }
        let mut value = 0.0;
        if let Domain::ComplexBall { .. } = self.domain {
            value -= 0.5 * point.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        for item in &self.items {
            let v = item.poly.evaluate(point)?.norm();
            if v == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            let w = match self.domain {
                Domain::ComplexBall { .. } => item.delta * item.delta,
                Domain::RealSphere => item.delta,
            };
            value += w * v.ln();
        }
        Ok(value)
    }

    /// Gradient of the log objective. Ball mode returns the complex vector
    /// whose real/imaginary parts are the partials with respect to the real
    /// coordinates; sphere mode returns the tangentially projected real
    /// gradient (imaginary parts zero).
    pub fn log_objective_gradient(&self, point: &[C64]) -> Result<Vec<C64>> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        match self.domain {
            Domain::ComplexBall { .. } => {
                let mut grad: Vec<C64> = point.iter().map(|z| -z).collect();
                for (index, item) in self.items.iter().enumerate() {
                    let v = item.poly.evaluate(point)?;
                    if v.norm() == 0.0 {
                        return Err(Error::OnVariety { index });
                    }
                    let g = item.poly.gradient(point)?;
                    let w = item.delta * item.delta;
                    for (gi, pg) in grad.iter_mut().zip(g) {
                        // d log|P| / d(x_i, y_i) packs into conj(dP/dz_i / P)
                        *gi += w * (pg / v).conj();
                    }
                }
                Ok(grad)
            }
            Domain::RealSphere => {
                let x: Vec<f64> = point.iter().map(|z| z.re).collect();
                let g = self
                    .sphere_gradient(&x)
                    .ok_or_else(|| self.on_variety_error(&x))?;
                Ok(g.into_iter().map(|v| C64::new(v, 0.0)).collect())
            }
        }
    }

    fn on_variety_error(&self, x: &[f64]) -> Error {
        for (index, item) in self.items.iter().enumerate() {
            if let Ok(v) = item.poly.evaluate_real(x) {
                if v.norm() == 0.0 {
                    return Error::OnVariety { index };
                }
            }
        }
        Error::OnVariety { index: 0 }
    }

    fn sphere_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let d = self.dim();
        let mut grad = vec![0.0; d];
        let z: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
        for item in &self.items {
            let v = item.poly.evaluate(&z).ok()?;
            if v.norm() == 0.0 {
                return None;
            }
            let g = item.poly.gradient(&z).ok()?;
            for (gi, pg) in grad.iter_mut().zip(g) {
                *gi += item.delta * (pg / v).re;
            }
        }
        // Tangential projection (I - x x^T).
        let dot: f64 = grad.iter().zip(x).map(|(a, b)| a * b).sum();
        for (gi, xi) in grad.iter_mut().zip(x) {
            *gi -= dot * xi;
        }
        Some(grad)
    }

    /// Objective value in packed real coordinates (no validation; -inf on
    /// varieties). Ball mode packs z as (re, im) pairs.
    pub(crate) fn value_packed(&self, x: &[f64]) -> f64 {
        match self.domain {
            Domain::ComplexBall { .. } => {
                let z = unpack(x);
                self.log_objective(&z).unwrap_or(f64::NEG_INFINITY)
            }
            Domain::RealSphere => {
                let mut value = 0.0;
                for item in &self.items {
                    let v = match item.poly.evaluate_real(x) {
                        Ok(v) => v.norm(),
                        Err(_) => return f64::NEG_INFINITY,
                    };
                    if v == 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    value += item.delta * v.ln();
                }
                value
            }
        }
    }

    /// Packed-gradient companion of [`Self::value_packed`]; `None` on a zero set.
    pub(crate) fn grad_packed(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self.domain {
            Domain::ComplexBall { .. } => {
                let z = unpack(x);
                let mut grad = vec![0.0; x.len()];
                for (i, zi) in z.iter().enumerate() {
                    grad[2 * i] = -zi.re;
                    grad[2 * i + 1] = -zi.im;
                }
                for item in &self.items {
                    let v = item.poly.evaluate(&z).ok()?;
                    if v.norm() == 0.0 {
                        return None;
                    }
                    let g = item.poly.gradient(&z).ok()?;
                    let w = item.delta * item.delta;
                    for (i, pg) in g.iter().enumerate() {
                        let ratio = pg / v;
                        grad[2 * i] += w * ratio.re;
                        grad[2 * i + 1] -= w * ratio.im;
                    }
                }
                Some(grad)
            }
            Domain::RealSphere => self.sphere_gradient(x),
        }
    }
}

pub(crate) fn random_sphere_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
