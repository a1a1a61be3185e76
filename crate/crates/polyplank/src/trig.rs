//! Univariate trigonometric polynomials
//! Q(t) = a_0 + sum_{j=1}^n a_j cos(jt) + b_j sin(jt).

/// Relative threshold used when trimming trailing coefficients.
const TRIM_REL: f64 = 1e-14;

/// Default relative tolerance for root-order detection.
pub const ROOT_ORDER_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    /// a_0..a_n
    cos: Vec<f64>,
    /// b_1..b_n
    sin: Vec<f64>,
}

impl TrigPoly {
    /// Build from cosine coefficients a_0..a_n and sine coefficients b_1..b_n.
    /// Trailing near-zero coefficients are trimmed so `degree` is meaningful.
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> TrigPoly {
        let n = cos.len().saturating_sub(1).max(sin.len());
        let mut a = cos;
        let mut b = sin;
        a.resize(n + 1, 0.0);
        b.resize(n, 0.0);
        let maxmag = a
            .iter()
            .chain(b.iter())
            .map(|c| c.abs())
            .fold(0.0, f64::max);
        let tol = TRIM_REL * maxmag.max(1e-300);
        let mut deg = 0;
        for j in (1..=n).rev() {
            if a[j].abs() > tol || b[j - 1].abs() > tol {
                deg = j;
                break;
            }
        }
        a.truncate(deg + 1);
        b.truncate(deg);
        if maxmag <= 0.0 || (deg == 0 && a[0].abs() <= tol) {
            a = vec![0.0];
            b = vec![];
        }
        TrigPoly { cos: a, sin: b }
    }

    pub fn constant(c: f64) -> TrigPoly {
        TrigPoly::new(vec![c], vec![])
    }

    /// a cos(jt) + b sin(jt)
    pub fn harmonic(j: usize, a: f64, b: f64) -> TrigPoly {
        let mut cos = vec![0.0; j + 1];
        let mut sin = vec![0.0; j];
        cos[j] = a;
        if j > 0 {
            sin[j - 1] = b;
        } else {
            cos[0] = a;
        }
        TrigPoly::new(cos, sin)
    }

    pub fn sin_t() -> TrigPoly {
        TrigPoly::harmonic(1, 0.0, 1.0)
    }

    pub fn cos_t() -> TrigPoly {
        TrigPoly::harmonic(1, 1.0, 0.0)
    }

    pub fn degree(&self) -> usize {
        self.cos.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.cos.len() == 1 && self.cos[0] == 0.0 && self.sin.is_empty()
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn max_coeff(&self) -> f64 {
        self.cos
            .iter()
            .chain(self.sin.iter())
            .map(|c| c.abs())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.cos[0];
        for j in 1..=self.degree() {
            let (s, c) = (j as f64 * t).sin_cos();
            v += self.cos[j] * c + self.sin[j - 1] * s;
        }
        v
    }

    /// Analytic derivative; stays a trigonometric polynomial.
    pub fn derivative(&self) -> TrigPoly {
        let n = self.degree();
        let mut cos = vec![0.0; n + 1];
        let mut sin = vec![0.0; n];
        for j in 1..=n {
            cos[j] = j as f64 * self.sin[j - 1];
            sin[j - 1] = -(j as f64) * self.cos[j];
        }
        TrigPoly::new(cos, sin)
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let n = self.degree().max(other.degree());
        let mut cos = vec![0.0; n + 1];
        let mut sin = vec![0.0; n];
        for (j, c) in self.cos.iter().enumerate() {
            cos[j] += c;
        }
        for (j, c) in other.cos.iter().enumerate() {
            cos[j] += c;
        }
        for (j, s) in self.sin.iter().enumerate() {
            sin[j] += s;
        }
        for (j, s) in other.sin.iter().enumerate() {
            sin[j] += s;
        }
        TrigPoly::new(cos, sin)
    }

    pub fn scale(&self, c: f64) -> TrigPoly {
        TrigPoly::new(
            self.cos.iter().map(|a| a * c).collect(),
            self.sin.iter().map(|b| b * c).collect(),
        )
    }

    /// Product, computed exactly in the exponential basis.
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let (ea, na) = self.to_exponential();
        let (eb, nb) = other.to_exponential();
        let n = na + nb;
        let mut out = vec![(0.0, 0.0); 2 * n + 1];
        for (i, &(ar, ai)) in ea.iter().enumerate() {
            if ar == 0.0 && ai == 0.0 {
                continue;
            }
            for (j, &(br, bi)) in eb.iter().enumerate() {
                let k = i + j;
                out[k].0 += ar * br - ai * bi;
                out[k].1 += ar * bi + ai * br;
            }
        }
        TrigPoly::from_exponential(&out, n)
    }

    /// Exponential coefficients c_{-n}..c_n as (re, im), center index n.
    fn to_exponential(&self) -> (Vec<(f64, f64)>, usize) {
        let n = self.degree();
        let mut c = vec![(0.0, 0.0); 2 * n + 1];
        c[n] = (self.cos[0], 0.0);
        for j in 1..=n {
            let a = self.cos[j];
            let b = self.sin[j - 1];
            c[n + j] = (a / 2.0, -b / 2.0);
            c[n - j] = (a / 2.0, b / 2.0);
        }
        (c, n)
    }

    fn from_exponential(c: &[(f64, f64)], center: usize) -> TrigPoly {
        let n = center;
        let mut cos = vec![0.0; n + 1];
        let mut sin = vec![0.0; n];
        cos[0] = c[n].0;
        for j in 1..=n {
            cos[j] = 2.0 * c[n + j].0;
            sin[j - 1] = -2.0 * c[n + j].1;
        }
        TrigPoly::new(cos, sin)
    }

    /// Largest k such that the value and the first k-1 derivatives vanish at
    /// `t`, each tested relative to that derivative's own coefficient scale.
    /// Returns 0 when Q(t) does not vanish within tolerance.
    pub fn root_order(&self, t: f64, tol: f64) -> usize {
        if self.is_zero() {
            return 0;
        }
        // A nonzero trig polynomial of degree n has at most 2n zeros counted
        // with multiplicity.
        let cap = 2 * self.degree();
        let mut cur = self.clone();
        let mut k = 0;
        while k <= cap {
            let scale = cur.max_coeff().max(f64::MIN_POSITIVE);
            if cur.eval(t).abs() > tol * scale {
                return k;
            }
            cur = cur.derivative();
            k += 1;
        }
        cap
    }
}
