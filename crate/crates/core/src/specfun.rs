//! Scalar special functions: cardinal sine and the integral sine
//! `si(x) = -∫ₓ^∞ sin ζ/ζ dζ = Si(x) - π/2`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::Quadrature;

/// Below this magnitude `sinc` uses its Taylor polynomial.
pub const SINC_TAYLOR_SWITCH: f64 = 1e-4;

/// `si` uses the power series up to here and the continued fraction beyond.
pub const SI_SWITCH: f64 = 4.0;

pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_TAYLOR_SWITCH {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

pub fn si(x: f64) -> Result<f64> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(Error::Domain {
            func: "si",
            value: x,
            expected: "finite x >= 0",
        });
    }
    Ok(if x <= SI_SWITCH {
        si_series(x)
    } else {
        si_continued_fraction(x)
    })
}

/// Maclaurin series of Si(x), shifted by -π/2.
pub(crate) fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    // term_n = (-1)^n x^(2n+1) / (2n+1)!
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        let k = f64::from(2 * n);
        term *= -x2 / (k * (k + 1.0));
        let contrib = term / (k + 1.0);
        sum += contrib;
        if contrib.abs() <= 1e-17 * sum.abs().max(1e-300) || n > 60 {
            break;
        }
    }
    sum - FRAC_PI_2
}

/// Lentz evaluation of the continued fraction for E₁(ix); its imaginary part,
/// after the phase factor, is exactly `si(x)`. Converges quickly for x ≳ 2.
pub(crate) fn si_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 10_000;

    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..MAX_ITER {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    (Complex64::new(x.cos(), -x.sin()) * h).im
}

/// Independent reference for `si`: adaptive quadrature of `-∫ₓᴸ sin ζ/ζ dζ`
/// plus the auxiliary-function asymptotic expansion of the tail beyond `L`.
///
/// `L` is at least 200, where the eight-term tail expansion is accurate far
/// below any tolerance worth asking for.
pub fn si_oracle(x: f64, tol: f64) -> Result<f64> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(Error::Domain {
            func: "si_oracle",
            value: x,
            expected: "finite x >= 0",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be > 0, got {tol}")));
    }
    let upper = x + 200.0;
    let body = Quadrature::new(0.5 * tol, 0.0)
        .with_max_evals(5_000_000)
        .integrate(|z: f64| z.sin() / z, x, upper)?;
    Ok(asymptotic_tail(upper) - body.value)
}

/// `si(L) = -f(L) cos L - g(L) sin L` with the first eight terms of each
/// auxiliary series.
fn asymptotic_tail(l: f64) -> f64 {
    let inv2 = 1.0 / (l * l);
    let (mut f, mut g) = (0.0, 0.0);
    let mut tf = 1.0; // (-1)^n (2n)! / L^(2n)
    let mut tg = 1.0; // (-1)^n (2n+1)! / L^(2n)
    for n in 0..8 {
        f += tf;
        g += tg;
        let k = 2.0 * f64::from(n);
        tf *= -(k + 1.0) * (k + 2.0) * inv2;
        tg *= -(k + 2.0) * (k + 3.0) * inv2;
    }
    -(f / l) * l.cos() - (g * inv2) * l.sin()
}
