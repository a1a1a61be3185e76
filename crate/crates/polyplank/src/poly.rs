//! Sparse multivariate polynomials with real or complex coefficients.
//!
//! Terms are stored in a `BTreeMap` keyed by the exponent vector, so the
//! representation is canonical: no duplicate exponent vectors, no explicit
//! zero coefficients, deterministic iteration order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{cnorm, C64};
use crate::trig::TrigPoly;

/// Coefficient field tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// Sparse multivariate polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    field: Field,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl MultiPoly {
    /// Build a polynomial from (exponent vector, coefficient) pairs.
    /// Zero coefficients are dropped; duplicate exponent vectors are summed.
    pub fn new(
        dim: usize,
        field: Field,
        terms: impl IntoIterator<Item = (Vec<u32>, C64)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (exp, coef) in terms {
            if exp.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: exp.len(),
                });
            }
            if field == Field::Real && coef.im != 0.0 {
                return Err(Error::FieldMismatch(format!(
                    "real polynomial given complex coefficient {coef}"
                )));
            }
            let entry = map.entry(exp).or_insert(C64::new(0.0, 0.0));
            *entry += coef;
        }
        map.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(MultiPoly {
            dim,
            field,
            terms: map,
        })
    }

    pub fn zero(dim: usize, field: Field) -> Self {
        MultiPoly {
            dim,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, field: Field, c: C64) -> Result<Self> {
        Self::new(dim, field, [(vec![0; dim], c)])
    }

    /// The i-th coordinate as a polynomial.
    pub fn variable(dim: usize, field: Field, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::OutOfRange {
                value: i as f64,
                min: 0.0,
                max: dim as f64 - 1.0,
            });
        }
        let mut exp = vec![0u32; dim];
        exp[i] = 1;
        Self::new(dim, field, [(exp, C64::new(1.0, 0.0))])
    }

    /// Affine form c0 + sum coeffs[i] * z_i.
    pub fn affine(field: Field, coeffs: &[C64], c0: C64) -> Result<Self> {
        let dim = coeffs.len();
        let mut terms = vec![(vec![0u32; dim], c0)];
        for (i, &c) in coeffs.iter().enumerate() {
            let mut exp = vec![0u32; dim];
            exp[i] = 1;
            terms.push((exp, c));
        }
        Self::new(dim, field, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn coeff_scale(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn evaluate(&self, point: &[C64]) -> Result<C64> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        let mut acc = C64::new(0.0, 0.0);
        for (exp, coef) in &self.terms {
            let mut m = *coef;
            for (e, z) in exp.iter().zip(point) {
                if *e > 0 {
                    m *= z.powu(*e);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Evaluate at a real point (valid for both fields; complex polynomials
    /// embed the reals).
    pub fn evaluate_real(&self, point: &[f64]) -> Result<C64> {
        let z: Vec<C64> = point.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.evaluate(&z)
    }

    /// Formal partial derivatives evaluated at `point`.
    pub fn gradient(&self, point: &[C64]) -> Result<Vec<C64>> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        let mut grad = vec![C64::new(0.0, 0.0); self.dim];
        for (exp, coef) in &self.terms {
            for i in 0..self.dim {
                let e = exp[i];
                if e == 0 {
                    continue;
                }
                let mut m = coef * e as f64;
                for (j, (&ej, z)) in exp.iter().zip(point).enumerate() {
                    let p = if j == i { ej - 1 } else { ej };
                    if p > 0 {
                        m *= z.powu(p);
                    }
                }
                grad[i] += m;
            }
        }
        Ok(grad)
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Result<MultiPoly> {
        if i >= self.dim {
            return Err(Error::OutOfRange {
                value: i as f64,
                min: 0.0,
                max: self.dim as f64 - 1.0,
            });
        }
        let terms = self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
            let mut exp = e.clone();
            exp[i] -= 1;
            (exp, c * e[i] as f64)
        });
        MultiPoly::new(self.dim, self.field, terms)
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let terms = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(e, c)| (e.clone(), *c));
        MultiPoly::new(self.dim, self.field, terms)
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut terms: Vec<(Vec<u32>, C64)> = Vec::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                terms.push((exp, ca * cb));
            }
        }
        MultiPoly::new(self.dim, self.field, terms)
    }

    pub fn scale(&self, c: C64) -> Result<MultiPoly> {
        MultiPoly::new(
            self.dim,
            self.field,
            self.terms.iter().map(|(e, v)| (e.clone(), v * c)),
        )
    }

    /// Substitute z_i = sum_j a[i][j] w_j (a linear change of variables).
    /// The matrix entries must lie in the polynomial's field.
    pub fn compose_linear(&self, a: &[Vec<C64>]) -> Result<MultiPoly> {
        if a.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: a.len(),
            });
        }
        let out_dim = a.first().map_or(self.dim, |row| row.len());
        let mut acc = MultiPoly::zero(out_dim, self.field);
        for (exp, coef) in &self.terms {
            let mut term = MultiPoly::constant(out_dim, self.field, *coef)?;
            for (i, &e) in exp.iter().enumerate() {
                let lin = MultiPoly::affine(self.field, &a[i], C64::new(0.0, 0.0))?;
                for _ in 0..e {
                    term = term.mul(&lin)?;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Homogenize by inserting an auxiliary variable in slot 0: every monomial
    /// gains a factor (z0/delta0)^(deg - |m|). Substituting z0 = delta0
    /// recovers the original polynomial.
    pub fn homogenize(&self, delta0: f64) -> Result<MultiPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !(delta0 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "delta0 must be positive, got {delta0}"
            )));
        }
        let deg = self.degree();
        let terms = self.terms.iter().map(|(e, c)| {
            let deficit = deg - e.iter().sum::<u32>();
            let mut exp = Vec::with_capacity(self.dim + 1);
            exp.push(deficit);
            exp.extend_from_slice(e);
            (exp, c / delta0.powi(deficit as i32))
        });
        MultiPoly::new(self.dim + 1, self.field, terms)
    }

    /// Restriction to the complex line base + w * direction, returned as dense
    /// univariate coefficients (index = power of w).
    pub fn restrict_to_complex_line(&self, base: &[C64], direction: &[C64]) -> Result<Vec<C64>> {
        if base.len() != self.dim || direction.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: if base.len() != self.dim {
                    base.len()
                } else {
                    direction.len()
                },
            });
        }
        if cnorm(direction) == 0.0 {
            return Err(Error::ZeroDirection);
        }
        let deg = self.degree() as usize;
        let mut out = vec![C64::new(0.0, 0.0); deg + 1];
        for (exp, coef) in &self.terms {
            let mut prod = vec![*coef];
            for (i, &e) in exp.iter().enumerate() {
                let factor = [base[i], direction[i]];
                for _ in 0..e {
                    prod = conv(&prod, &factor);
                }
            }
            for (k, c) in prod.iter().enumerate() {
                out[k] += c;
            }
        }
        while out.len() > 1 && out.last().map_or(false, |c| c.norm() == 0.0) {
            out.pop();
        }
        Ok(out)
    }

    /// Restriction of a real polynomial to the great circle
    /// t -> cos(t) p + sin(t) q, expanded in multi-angle form.
    pub fn restrict_to_great_circle(&self, p: &[f64], q: &[f64]) -> Result<TrigPoly> {
        if self.field != Field::Real {
            return Err(Error::FieldMismatch(
                "great-circle restriction requires a real polynomial".into(),
            ));
        }
        if p.len() != self.dim || q.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: if p.len() != self.dim { p.len() } else { q.len() },
            });
        }
        let pn: f64 = p.iter().map(|x| x * x).sum();
        let qn: f64 = q.iter().map(|x| x * x).sum();
        let dot: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
        if (pn - 1.0).abs() > 1e-12 || (qn - 1.0).abs() > 1e-12 || dot.abs() > 1e-12 {
            return Err(Error::NonOrthonormalFrame {
                p_norm_err: pn - 1.0,
                q_norm_err: qn - 1.0,
                dot,
            });
        }
        // Work in the basis u = e^{it}: cos(t) p_i + sin(t) q_i
        // = u (p_i - i q_i)/2 + u^{-1} (p_i + i q_i)/2.
        let n = self.degree() as usize;
        let mut total = vec![C64::new(0.0, 0.0); 2 * n + 1]; // exponents -n..n, center n
        for (exp, coef) in &self.terms {
            // Laurent coefficients of this monomial, centered.
            let mut cur = vec![*coef];
            let mut radius = 0usize;
            for (i, &e) in exp.iter().enumerate() {
                let hi = C64::new(p[i] / 2.0, -q[i] / 2.0); // u^{+1}
                let lo = C64::new(p[i] / 2.0, q[i] / 2.0); // u^{-1}
                let factor = [lo, C64::new(0.0, 0.0), hi]; // exponents -1, 0, +1
                for _ in 0..e {
                    cur = conv(&cur, &factor);
                    radius += 1;
                }
            }
            for (k, c) in cur.iter().enumerate() {
                let j = k as isize - radius as isize; // exponent
                total[(j + n as isize) as usize] += c;
            }
        }
        let mut cos = vec![0.0; n + 1];
        let mut sin = vec![0.0; n.max(1)];
        cos[0] = total[n].re;
        for j in 1..=n {
            let cj = total[n + j];
            cos[j] = 2.0 * cj.re;
            sin[j - 1] = -2.0 * cj.im;
        }
        Ok(TrigPoly::new(cos, sin))
    }
}

fn conv(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.re == 0.0 && x.im == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
