//! Double-precision special functions plus the gamma-ratio prefactor.

mod bessel;
mod tables;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_j, bessel_k, bessel_k_scaled, bessel_y, ORDER_MAX, ORDER_MIN,
    X_MAX,
};

use rug::Float;
use serde::Serialize;

use crate::domain::Params;
use crate::error::{domain, Result};
use tables::{EULER_GAMMA, ZETA_MINUS_ONE};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// ln Gamma(2 + t) for |t| <= 1/2.
fn ln_gamma_2p(t: f64) -> f64 {
    let mut sum = 0.0;
    let mut pw = -t;
    for (i, z) in ZETA_MINUS_ONE.iter().enumerate() {
        pw *= -t;
        sum += z * pw / (i + 2) as f64;
    }
    (1.0 - EULER_GAMMA) * t + sum
}

fn stirling(x: f64) -> f64 {
    // B_{2k} / (2k (2k-1))
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let r = 1.0 / (x * x);
    let mut series = 0.0;
    for c in C.iter().rev() {
        series = series * r + c;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series / x
}

pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma needs x > 0, got {x}"));
    }
    if x >= 10.0 {
        return Ok(stirling(x));
    }
    if x >= 2.5 {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        return Ok(ln_gamma_2p(y - 2.0) + prod.ln());
    }
    if x >= 1.5 {
        return Ok(ln_gamma_2p(x - 2.0));
    }
    if x >= 0.5 {
        let t = x - 1.0;
        return Ok(ln_gamma_2p(t) - t.ln_1p());
    }
    // x in (0, 1/2): Gamma(x) = Gamma(x + 1) / x
    Ok(log_gamma(x + 1.0)? - x.ln())
}

/// Complete elliptic integral of the first kind, modulus k.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return domain(format!("elliptic_k needs 0 <= k < 1, got {k}"));
    }
    let mut a = 1.0;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::PI / (a + b))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrefactorSpec {
    pub params: Params,
    pub value: f64,
}

const PREC: u32 = 192;

fn lgam(x: &Float) -> Float {
    Float::with_val(PREC, x.ln_gamma_ref())
}

/// 2^{lambda-1} Gamma(u/2 + lambda/2) n! / (Gamma(u) Gamma(u/2 - lambda/2 + 1)).
pub fn prefactor(params: &Params) -> PrefactorSpec {
    let l = Float::with_val(PREC, params.lambda);
    let u = Float::with_val(PREC, params.u);
    let half_u = Float::with_val(PREC, &u / 2u32);
    let half_l = Float::with_val(PREC, &l / 2u32);
    let ln2 = Float::with_val(PREC, rug::float::Constant::Log2);
    let mut s = Float::with_val(PREC, &l - 1u32) * ln2;
    s += lgam(&Float::with_val(PREC, &half_u + &half_l));
    s += lgam(&Float::with_val(PREC, params.n + 1));
    s -= lgam(&u);
    s -= lgam(&(Float::with_val(PREC, &half_u - &half_l) + 1u32));
    PrefactorSpec {
        params: *params,
        value: s.exp().to_f64(),
    }
}

/// sqrt(u pi / 2) Gamma(u/2 + lambda/2) / (Gamma(u/2 - lambda/2 + 1) Gamma(lambda)).
pub fn interval_prefactor(params: &Params) -> f64 {
    let l = Float::with_val(PREC, params.lambda);
    let u = Float::with_val(PREC, params.u);
    let half_u = Float::with_val(PREC, &u / 2u32);
    let half_l = Float::with_val(PREC, &l / 2u32);
    let pi = Float::with_val(PREC, rug::float::Constant::Pi);
    let mut s = (Float::with_val(PREC, &u * &pi) / 2u32).ln() / 2u32;
    s += lgam(&Float::with_val(PREC, &half_u + &half_l));
    s -= lgam(&(Float::with_val(PREC, &half_u - &half_l) + 1u32));
    s -= lgam(&l);
    s.exp().to_f64()
}

/// ln k_n(nu), k_n = pi Gamma(2nu + n + 1) / (Gamma(nu + 1/2) Gamma(nu + n + 3/2)).
pub fn ln_kn(params: &Params) -> f64 {
    let nu = Float::with_val(PREC, params.nu);
    let n = params.n;
    let pi = Float::with_val(PREC, rug::float::Constant::Pi);
    let mut s = pi.ln();
    s += lgam(&(Float::with_val(PREC, &nu * 2u32) + (n + 1)));
    s -= lgam(&(Float::with_val(PREC, &nu + 0.5f64)));
    s -= lgam(&(Float::with_val(PREC, &nu + n) + 1.5f64));
    s.to_f64()
}
