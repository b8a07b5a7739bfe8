//! Floating-point helpers: error-free transformations and compensated sums.

/// `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `a * b = p + e` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

/// Dot product evaluated as if in twice the working precision (Ogita, Rump, Oishi).
pub fn dot2<I>(terms: I) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut s = 0.0;
    let mut c = 0.0;
    for (a, b) in terms {
        let (p, ep) = two_prod(a, b);
        let (t, es) = two_sum(s, p);
        s = t;
        c += ep + es;
    }
    s + c
}

/// Largest absolute entry of a slice, 0 for an empty slice.
pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}
