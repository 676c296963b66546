//! Small numerical kernels shared by the wave constructions and diagnostics.

/// Composite trapezoid rule for samples on a uniform grid of spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            h * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Cubic Hermite interpolation on one cell, parameter `s` in `[0, 1]`.
#[inline]
pub fn hermite(s: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Derivative in the physical variable of [`hermite`].
#[inline]
pub fn hermite_slope(s: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let g00 = 6.0 * s2 - 6.0 * s;
    let g10 = 3.0 * s2 - 4.0 * s + 1.0;
    let g01 = -6.0 * s2 + 6.0 * s;
    let g11 = 3.0 * s2 - 2.0 * s;
    (g00 * y0 + g01 * y1) / h + g10 * d0 + g11 * d1
}

/// Uniform sample axis `x0 + i*h`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAxis {
    pub x0: f64,
    pub h: f64,
    pub n: usize,
}

impl UniformAxis {
    pub fn new(x0: f64, x1: f64, n: usize) -> Self {
        assert!(n >= 2 && x1 > x0);
        Self {
            x0,
            h: (x1 - x0) / (n - 1) as f64,
            n,
        }
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.x0 + self.h * i as f64
    }

    #[inline]
    pub fn last(&self) -> f64 {
        self.at(self.n - 1)
    }

    /// Cell index and local parameter for `x` inside `[x0, last]`, `None` outside.
    #[inline]
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let r = (x - self.x0) / self.h;
        if !(r >= 0.0) || r > (self.n - 1) as f64 {
            return None;
        }
        let i = (r.floor() as usize).min(self.n - 2);
        Some((i, r - i as f64))
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.at(i)).collect()
    }
}

/// Monotone cubic slopes (Fritsch-Carlson) for data on a uniform axis.
///
/// Used when no analytic derivative is available.
pub fn monotone_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    assert!(n >= 2);
    let secant: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut d = vec![0.0; n];
    d[0] = secant[0];
    d[n - 1] = secant[n - 2];
    for i in 1..n - 1 {
        let (a, b) = (secant[i - 1], secant[i]);
        d[i] = if a * b <= 0.0 { 0.0 } else { 2.0 * a * b / (a + b) };
    }
    limit_slopes(&mut d, &secant);
    d
}

/// Clamp slopes so the Hermite interpolant is monotone on each cell.
pub fn limit_slopes(d: &mut [f64], secant: &[f64]) {
    for (i, &m) in secant.iter().enumerate() {
        if m == 0.0 {
            d[i] = 0.0;
            d[i + 1] = 0.0;
            continue;
        }
        let a = d[i] / m;
        let b = d[i + 1] / m;
        if a < 0.0 {
            d[i] = 0.0;
        }
        if b < 0.0 {
            d[i + 1] = 0.0;
        }
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            d[i] = tau * a * m;
            d[i + 1] = tau * b * m;
        }
    }
}

/// Root of a monotone scalar function inside a sign-changing bracket.
///
/// Newton steps are taken when they stay inside the bracket and shrink the
/// residual; otherwise the step falls back to bisection.
pub fn safeguarded_newton<F>(f: F, mut lo: f64, mut hi: f64, x0: f64, tol: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let increasing = fhi > 0.0;
    let mut x = x0.clamp(lo, hi);
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if (fx > 0.0) == increasing {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= tol * (1.0 + x.abs()) || hi - lo <= tol * (1.0 + x.abs()) {
            return Some(next);
        }
        x = next;
    }
    None
}

/// Solves a tridiagonal system in place (Thomas algorithm). `sub[0]` and
/// `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) -> bool {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return false;
    }
    rhs[0] /= beta;
    for i in 1..n {
        c[i] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i];
        if beta == 0.0 {
            return false;
        }
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i + 1] * rhs[i + 1];
    }
    true
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

/// Centered first differences; second-order one-sided at the two ends.
pub fn gradient(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            d[0] = (f[1] - f[0]) / h;
            d[1] = d[0];
        }
        return d;
    }
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}
