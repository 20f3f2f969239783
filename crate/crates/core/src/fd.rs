//! Finite-difference and interpolation weights on arbitrary nodes.

/// Fornberg's algorithm: weights for derivatives `0..=m` at `z` using `x`.
///
/// Returns `w` with `w[d][j]` the weight of `f(x[j])` in the `d`-th derivative.
pub fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    if n == 0 {
        return c;
    }
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Lagrange interpolation weights at `z` (derivative order 0).
pub fn lagrange(z: f64, x: &[f64]) -> Vec<f64> {
    fornberg(z, x, 0).swap_remove(0)
}

/// `n` consecutive indices from `0..len` centred on the interval `[j, j+1]`.
pub(crate) fn window(j: usize, n: usize, len: usize) -> std::ops::Range<usize> {
    let start = (j + 1).saturating_sub(n / 2).min(len - n);
    start..start + n
}
