//! Unit-vector configuration bounds: dual bases, Steinhaus phase witnesses,
//! span avoidance, many-vector avoidance, and the polarization product bound.
//!
//! All inner products are Hermitian and linear in the first argument, so
//! every avoidance problem reduces to maximizing a product of degree-1
//! complex-linear forms on the unit sphere of R^(2d).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{invert_complex, null_vector, singular_range};
use crate::maximizer::{multistart_ascent, AscentDomain, MaximizerConfig};
use crate::num::{hdot, unpack, C64};
use crate::poly::{Field, MultiPoly};

/// Default cap on the number of hyperplane forms in many_vectors_witness;
/// C(12, 3) = 220 covers n <= 12, d <= 4.
pub const MAX_FORMS: usize = 220;

const UNIT_TOL: f64 = 1e-12;
const COND_LIMIT: f64 = 1e12;

/// A family of unit vectors with optional shift points.
#[derive(Clone, Debug)]
pub struct VectorConfig {
    d: usize,
    vectors: Vec<Vec<C64>>,
    shifts: Option<Vec<Vec<C64>>>,
}

impl VectorConfig {
    pub fn new(
        d: usize,
        vectors: Vec<Vec<C64>>,
        shifts: Option<Vec<Vec<C64>>>,
    ) -> Result<Self> {
        if d == 0 || vectors.is_empty() {
            return Err(Error::InvalidConfig(
                "need d >= 1 and at least one vector".into(),
            ));
        }
        for v in &vectors {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotUnit { norm: n });
            }
        }
        if let Some(sh) = &shifts {
            if sh.len() != vectors.len() {
                return Err(Error::InvalidConfig(
                    "shifts must match the vector count".into(),
                ));
            }
            for y in sh {
                if y.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: y.len(),
                    });
                }
            }
        }
        Ok(VectorConfig { d, vectors, shifts })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn shifts(&self) -> Option<&[Vec<C64>]> {
        self.shifts.as_deref()
    }
}

fn check_basis(vs: &[Vec<C64>]) -> Result<()> {
    let d = vs[0].len();
    if vs.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: vs.len(),
        });
    }
    let (lo, hi) = singular_range(vs);
    if lo <= 0.0 || hi / lo > COND_LIMIT {
        return Err(Error::RankDeficient {
            rank: crate::linalg::numerical_rank(vs, 1e-12),
            expected: d,
        });
    }
    Ok(())
}

/// The unique family with <v_i, w_j> = delta_ij; each |w_i| >= 1 since
/// <v_i, w_i> = 1 and |v_i| = 1.
pub fn dual_basis(vs: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    check_basis(vs)?;
    let d = vs.len();
    let gram: Vec<Vec<C64>> = vs.iter().map(|vi| vs.iter().map(|vk| hdot(vi, vk)).collect()).collect();
    let inv = invert_complex(&gram).ok_or(Error::RankDeficient {
        rank: crate::linalg::numerical_rank(vs, 1e-12),
        expected: d,
    })?;
    // w_j = sum_k conj(inv[k][j]) v_k makes <v_i, w_j> = delta_ij.
    let mut ws = Vec::with_capacity(d);
    for j in 0..d {
        let mut w = vec![C64::new(0.0, 0.0); vs[0].len()];
        for (k, vk) in vs.iter().enumerate() {
            let c = inv[k][j].conj();
            for (wi, vki) in w.iter_mut().zip(vk) {
                *wi += c * vki;
            }
        }
        ws.push(w);
    }
    Ok(ws)
}

/// Result of the Steinhaus phase search.
#[derive(Clone, Debug)]
pub struct SteinhausReport {
    /// Unit vector with |<v_i, q>| = 1/|u_f| <= 1/sqrt(d) for every i.
    pub q: Vec<C64>,
    /// |u_f| of the best phase vector found; always >= sqrt(d).
    pub u_norm: f64,
    /// The unimodular phases f_1..f_d.
    pub phases: Vec<C64>,
}

/// Search unimodular phases f maximizing |sum f_i w_i| over the dual basis.
/// A greedy pass already guarantees |u_f|^2 >= sum |w_i|^2 >= d; coordinate
/// ascent (each phase update exactly optimal) plus random restarts improve
/// on it monotonically.
pub fn steinhaus_witness(vs: &[Vec<C64>], seed: u64, restarts: usize) -> Result<SteinhausReport> {
    let ws = dual_basis(vs)?;
    let d = ws.len();
    let dim = ws[0].len();

    let run = |init: Vec<C64>| -> (Vec<C64>, f64) {
        let mut f = init;
        let mut s = vec![C64::new(0.0, 0.0); dim];
        for (fi, wi) in f.iter().zip(&ws) {
            for (si, wij) in s.iter_mut().zip(wi) {
                *si += fi * wij;
            }
        }
        for _ in 0..100 {
            let mut improved = false;
            for i in 0..d {
                let mut s_rest = s.clone();
                for (sr, wij) in s_rest.iter_mut().zip(&ws[i]) {
                    *sr -= f[i] * wij;
                }
                let a = hdot(&s_rest, &ws[i]);
                let fi = if a.norm() > 0.0 {
                    a / a.norm()
                } else {
                    f[i]
                };
                if (fi - f[i]).norm() > 1e-15 {
                    improved = true;
                }
                f[i] = fi;
                s = s_rest;
                for (si, wij) in s.iter_mut().zip(&ws[i]) {
                    *si += f[i] * wij;
                }
            }
            if !improved {
                break;
            }
        }
        let norm = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (f, norm)
    };

    // Greedy initialization: align each w_i with the running sum.
    let mut greedy = vec![C64::new(1.0, 0.0); d];
    {
        let mut s = ws[0].clone();
        for i in 1..d {
            let a = hdot(&s, &ws[i]);
            greedy[i] = if a.norm() > 0.0 {
                a / a.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            for (si, wij) in s.iter_mut().zip(&ws[i]) {
                *si += greedy[i] * wij;
            }
        }
    }

    let mut best: Option<(Vec<C64>, f64)> = None;
    let mut consider = |cand: (Vec<C64>, f64)| match &best {
        None => best = Some(cand),
        Some((_, bn)) => {
            if cand.1 > *bn {
                best = Some(cand);
            }
        }
    };
    consider(run(greedy));
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0x7374_6e00 + r as u64);
        let init: Vec<C64> = (0..d)
            .map(|_| {
                let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                C64::new(t.cos(), t.sin())
            })
            .collect();
        consider(run(init));
    }
    let (phases, u_norm) = best.expect("at least the greedy run");
    // Reconstruct u_f and normalize.
    let mut u = vec![C64::new(0.0, 0.0); dim];
    for (fi, wi) in phases.iter().zip(&ws) {
        for (ui, wij) in u.iter_mut().zip(wi) {
            *ui += fi * wij;
        }
    }
    let q: Vec<C64> = u.iter().map(|z| z / u_norm).collect();
    Ok(SteinhausReport { q, u_norm, phases })
}

/// Maximize sum of log|L_i| over the unit sphere of C^d (packed as R^(2d)).
fn maximize_forms_on_sphere(
    forms: &[MultiPoly],
    d: usize,
    cfg: &MaximizerConfig,
) -> Result<(Vec<C64>, f64)> {
    let m = 2 * d;
    let starts = cfg.starts.unwrap_or(64 * d).max(1);
    let value = |x: &[f64]| -> f64 {
        let z = unpack(x);
        let mut total = 0.0;
        for f in forms {
            let v = f.evaluate(&z).expect("dims checked").norm();
            if v == 0.0 {
                return f64::NEG_INFINITY;
            }
            total += v.ln();
        }
        total
    };
    let grad = |x: &[f64]| -> Option<Vec<f64>> {
        let z = unpack(x);
        let mut g = vec![C64::new(0.0, 0.0); d];
        for f in forms {
            let v = f.evaluate(&z).expect("dims checked");
            if v.norm() == 0.0 {
                return None;
            }
            let gr = f.gradient(&z).expect("dims checked");
            for (gi, gri) in g.iter_mut().zip(&gr) {
                *gi += gri / v;
            }
        }
        let mut out = Vec::with_capacity(m);
        for gi in &g {
            out.push(gi.re);
            out.push(-gi.im);
        }
        Some(out)
    };
    let (x, v) = multistart_ascent(&AscentDomain::Sphere, m, starts, cfg, value, grad)?;
    Ok((unpack(&x), v))
}

fn form_from_normal(normal: &[C64]) -> Result<MultiPoly> {
    let coeffs: Vec<C64> = normal.iter().map(|w| w.conj()).collect();
    MultiPoly::affine(Field::Complex, &coeffs, C64::new(0.0, 0.0))
}

/// All k-element index subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Hermitian modified Gram-Schmidt; near-dependent vectors are dropped.
fn orthonormalize(vs: &[&Vec<C64>]) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vs {
        let mut u = (*v).clone();
        for b in &basis {
            let c = hdot(&u, b);
            for (ui, bi) in u.iter_mut().zip(b) {
                *ui -= c * bi;
            }
        }
        let n = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-10 {
            for ui in u.iter_mut() {
                *ui /= n;
            }
            basis.push(u);
        }
    }
    basis
}

/// Euclidean distance from unit q to the span of the given vectors.
fn distance_to_span(q: &[C64], span: &[&Vec<C64>]) -> f64 {
    let basis = orthonormalize(span);
    let proj: f64 = basis.iter().map(|b| hdot(q, b).norm_sqr()).sum();
    (1.0 - proj).max(0.0).sqrt()
}

#[derive(Clone, Debug)]
pub struct SpanAvoidReport {
    pub q: Vec<C64>,
    pub min_distance: f64,
    pub bound: f64,
}

/// A unit vector far from the span of any k of the d given vectors; the
/// minimum distance is at least sqrt((d-k)/d).
pub fn span_avoidance_witness(
    vs: &[Vec<C64>],
    k: usize,
    cfg: &MaximizerConfig,
) -> Result<SpanAvoidReport> {
    let d = vs[0].len();
    if d < 2 {
        return Err(Error::InvalidConfig("span avoidance needs d >= 2".into()));
    }
    if k < 1 || k > d - 1 {
        return Err(Error::OutOfRange {
            value: k as f64,
            min: 1.0,
            max: (d - 1) as f64,
        });
    }
    let bound = ((d - k) as f64 / d as f64).sqrt();
    let q = match dual_basis(vs) {
        Ok(ws) => {
            let forms: Vec<MultiPoly> = ws
                .iter()
                .map(|w| form_from_normal(w))
                .collect::<Result<_>>()?;
            maximize_forms_on_sphere(&forms, d, cfg)?.0
        }
        Err(Error::RankDeficient { .. }) => {
            // Dependent family: any unit vector Hermitian-orthogonal to all
            // of them has distance 1 to every span. null_vector solves
            // A q = 0, so conjugate to get <q, v_i> = 0.
            let q = null_vector(vs).ok_or(Error::RankDeficient {
                rank: 0,
                expected: d,
            })?;
            q.iter().map(|z| z.conj()).collect()
        }
        Err(e) => return Err(e),
    };
    let mut min_distance = f64::INFINITY;
    for subset in combinations(vs.len(), k) {
        let span: Vec<&Vec<C64>> = subset.iter().map(|&i| &vs[i]).collect();
        min_distance = min_distance.min(distance_to_span(&q, &span));
    }
    Ok(SpanAvoidReport {
        q,
        min_distance,
        bound,
    })
}

#[derive(Clone, Debug)]
pub struct ManyVectorsReport {
    pub q: Vec<C64>,
    pub min_distance: f64,
    pub bound: f64,
    /// True when the input violated general position and was perturbed.
    pub perturbed: bool,
}

/// A unit vector at distance >= sqrt((d-1)/n) from the complex line of each
/// of the n >= d vectors, found by maximizing the product of all
/// C(n, d-1) hyperplane forms on the sphere.
pub fn many_vectors_witness(
    vs: &[Vec<C64>],
    cfg: &MaximizerConfig,
    max_forms: usize,
) -> Result<ManyVectorsReport> {
    let d = vs[0].len();
    let n = vs.len();
    if n < d {
        return Err(Error::TooFewVectors { need: d, got: n });
    }
    let subsets = combinations(n, d - 1);
    if subsets.len() > max_forms {
        return Err(Error::InvalidConfig(format!(
            "C({n}, {}) = {} hyperplane forms exceed the cap {max_forms}",
            d - 1,
            subsets.len()
        )));
    }
    let bound = ((d - 1) as f64 / n as f64).sqrt();

    let mut work: Vec<Vec<C64>> = vs.to_vec();
    let mut perturbed = false;
    let mut forms: Vec<MultiPoly> = Vec::new();
    for attempt in 0..2 {
        forms.clear();
        let mut ok = true;
        for subset in &subsets {
            if d == 1 {
                break; // no hyperplane forms in C^1; handled below
            }
            let rows: Vec<Vec<C64>> = subset.iter().map(|&i| work[i].clone()).collect();
            let (lo, hi) = singular_range(&rows);
            if lo <= 1e-12 * hi.max(1.0) {
                ok = false;
                break;
            }
            // null_vector solves A q = 0; the Hermitian normal of the
            // hyperplane through the rows is its conjugate.
            match null_vector(&rows) {
                Some(nv) => {
                    let normal: Vec<C64> = nv.iter().map(|z| z.conj()).collect();
                    forms.push(form_from_normal(&normal)?);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            break;
        }
        if attempt == 1 {
            return Err(Error::RankDeficient {
                rank: 0,
                expected: d - 1,
            });
        }
        // General position violated: deterministic 1e-9 perturbation.
        perturbed = true;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7065_7274);
        for v in work.iter_mut() {
            for z in v.iter_mut() {
                *z += C64::new(rng.gen_range(-1e-9..1e-9), rng.gen_range(-1e-9..1e-9));
            }
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in v.iter_mut() {
                *z /= nrm;
            }
        }
    }

    let q = if d == 1 {
        vec![C64::new(1.0, 0.0)]
    } else {
        maximize_forms_on_sphere(&forms, d, cfg)?.0
    };
    let min_distance = vs
        .iter()
        .map(|v| (1.0 - hdot(&q, v).norm_sqr()).max(0.0).sqrt())
        .fold(f64::INFINITY, f64::min);
    Ok(ManyVectorsReport {
        q,
        min_distance,
        bound,
        perturbed,
    })
}

#[derive(Clone, Debug)]
pub struct PolarizationReport {
    pub x: Vec<C64>,
    pub value: f64,
    pub bound: f64,
}

/// Maximize prod |<x - y_k, u_k>| over the unit sphere; the maximum is at
/// least d^(-d/2).
pub fn polarization_witness(
    us: &[Vec<C64>],
    ys: &[Vec<C64>],
    cfg: &MaximizerConfig,
) -> Result<PolarizationReport> {
    if us.is_empty() || us.len() != ys.len() {
        return Err(Error::InvalidConfig(
            "polarization needs matching u and y lists".into(),
        ));
    }
    let d = us[0].len();
    if us.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: us.len(),
        });
    }
    let mut forms = Vec::with_capacity(d);
    for (u, y) in us.iter().zip(ys) {
        let coeffs: Vec<C64> = u.iter().map(|z| z.conj()).collect();
        let c0 = -hdot(y, u);
        forms.push(MultiPoly::affine(Field::Complex, &coeffs, c0)?);
    }
    let (x, logv) = maximize_forms_on_sphere(&forms, d, cfg)?;
    let bound = (d as f64).powf(-(d as f64) / 2.0);
    Ok(PolarizationReport {
        x,
        value: logv.exp(),
        bound,
    })
}
