//! Shared numerical primitives: compensated summation, adaptive quadrature,
//! and the log-domain modified Bessel function used by the Rician PDF.

/// Neumaier-compensated sum. Returns the correctly rounded sum of the inputs
/// up to one final rounding, which is what makes exact identities like
/// `sum(b_t) == 0.5` hold for the uniform theta grid.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
///
/// Globally adaptive over a 128-panel composite base grid. Starting from a
/// fixed base grid matters for sharply peaked integrands (narrow fading
/// PDFs, Gaussian tails): a whole-interval stencil can miss the support
/// entirely and either terminate at ~0 or drive the tolerance to zero. The
/// tolerance is relative to the base-grid estimate of `int |f|`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let panels = 128usize;
    let h = (b - a) / panels as f64;
    // Nodes at panel endpoints and midpoints; midpoints fix the |f| scale.
    let node = |i: usize| a + i as f64 * 0.5 * h;
    let fs: Vec<f64> = (0..=2 * panels).map(|i| f(node(i))).collect();
    let scale: f64 = (0..panels).map(|i| fs[2 * i + 1].abs() * h).sum();
    let eps_panel = rel_tol * scale.max(f64::MIN_POSITIVE) / panels as f64;
    let mut total = 0.0f64;
    for i in 0..panels {
        let (pa, pb) = (node(2 * i), node(2 * i + 2));
        let (fa, fm, fb) = (fs[2 * i], fs[2 * i + 1], fs[2 * i + 2]);
        let whole = h / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_step(f, pa, pb, fa, fm, fb, whole, eps_panel, 40);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        // Richardson extrapolation term for the final refinement.
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }
}

/// ln I_0(x), the log of the zero-order modified Bessel function of the first
/// kind. Power series below the crossover, asymptotic expansion above; the
/// log form never overflows even for the large arguments produced by strong
/// Rician line-of-sight components.
pub fn ln_bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x < 40.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for j in 1..400u32 {
            term *= q / ((j as f64) * (j as f64));
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
        }
        sum.ln()
    } else {
        // I_0(x) ~ e^x / sqrt(2 pi x) * (1 + 1/(8x) + 9/(128 x^2) + ...)
        let mut coeff = 1.0f64;
        let mut series = 1.0f64;
        let mut xpow = 1.0f64;
        for k in 1..=8u32 {
            let kk = k as f64;
            coeff *= (2.0 * kk - 1.0) * (2.0 * kk - 1.0) / (8.0 * kk);
            xpow *= x;
            series += coeff / xpow;
        }
        x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_polynomial_is_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn simpson_gaussian_tail() {
        // int_0^inf exp(-x^2/2) dx = sqrt(pi/2); truncate at 12 sigma.
        let v = adaptive_simpson(&|x: f64| (-0.5 * x * x).exp(), 0.0, 12.0, 1e-12);
        assert_relative_eq!(v, (std::f64::consts::PI / 2.0).sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn neumaier_recovers_exact_half() {
        for n in [1usize, 5, 20, 100, 1000] {
            let w = 1.0 / (2.0 * n as f64);
            assert_eq!(neumaier_sum(std::iter::repeat_n(w, n)), 0.5, "n = {n}");
        }
    }

    #[test]
    fn ln_i0_matches_series_at_crossover() {
        // Both branches must agree where they meet.
        let series = |x: f64| {
            let q = 0.25 * x * x;
            let mut term = 1.0f64;
            let mut sum = 1.0f64;
            for j in 1..500u32 {
                term *= q / ((j as f64) * (j as f64));
                sum += term;
            }
            sum.ln()
        };
        for x in [35.0, 39.9, 40.1, 45.0, 60.0] {
            let direct = series(x);
            assert_relative_eq!(ln_bessel_i0(x), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn ln_i0_small_values() {
        // I_0(0) = 1, I_0(1) = 1.2660658777520083...
        assert_eq!(ln_bessel_i0(0.0), 0.0);
        assert_relative_eq!(
            ln_bessel_i0(1.0),
            1.2660658777520083f64.ln(),
            max_relative = 1e-14
        );
    }
}
