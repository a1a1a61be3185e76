//! Small numeric helpers shared across modules.

pub use num_complex::Complex64 as C64;

/// Pack a complex vector into interleaved real coordinates (re, im, re, im, ...).
pub fn pack(z: &[C64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * z.len());
    for c in z {
        out.push(c.re);
        out.push(c.im);
    }
    out
}

/// Inverse of [`pack`].
pub fn unpack(x: &[f64]) -> Vec<C64> {
    debug_assert!(x.len() % 2 == 0);
    x.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect()
}

/// Hermitian inner product <a, b> = sum a_i * conj(b_i), linear in the first argument.
pub fn hdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn cnorm(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn rnorm(x: &[f64]) -> f64 {
    rdot(x, x).sqrt()
}

/// a + t*b, elementwise.
pub fn axpy(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}
