//! Independent oracles shared by the integration targets. Nothing here
//! calls into the library's quadrature or transforms.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson with Richardson correction.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

/// `int_0^1 t^p |T_t f|^4 dx dt` for the unit-mass `A0 exp(-x^2 / sigma0)`:
/// the space integral at time `t` is `sqrt(Re sigma0 / pi) / |sigma(t)|`.
pub fn gaussian_quartic(sigma0_re: f64, sigma0_im: f64, power: i32) -> f64 {
    let c = (sigma0_re / PI).sqrt();
    simpson(
        &|t: f64| c * t.powi(power) / (sigma0_re * sigma0_re + (sigma0_im + 4.0 * t).powi(2)).sqrt(),
        0.0,
        1.0,
        1e-15,
    )
}

/// `Q` of the unit `sigma0 = 1` Gaussian, from 50-digit quadrature.
pub const Q_GAUSSIAN: f64 = 0.2954537499228757;

/// `sqrt(erfc(1))`, the mass fraction outside `[-1, 1]` of `exp(-x^2/2)`.
pub const SQRT_ERFC_1: f64 = 0.396609640642137;
