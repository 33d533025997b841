//! Extended-precision reference values, independent of the asymptotic code.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::bigreal::{bits_for_digits, pochhammer, BigReal};
use crate::domain::Params;
use crate::error::{domain, Error, Result};

fn guard_bits(params: &Params) -> u32 {
    64 + params.n + (params.lambda.abs() as u32)
}

fn work_prec(params: &Params, digits: u32) -> u32 {
    bits_for_digits(digits) + guard_bits(params)
}

fn finish(x: BigReal, digits: u32) -> BigReal {
    Float::with_val(bits_for_digits(digits), x)
}

/// C_n^lambda(x) from the explicit finite sum.
pub fn oracle_c(params: &Params, x: f64, digits: u32) -> BigReal {
    let prec = work_prec(params, digits);
    oracle_c_big(params.lambda, params.n, &Float::with_val(prec, x), digits)
}

/// Explicit sum at a BigReal argument; the working precision follows `x`.
pub fn oracle_c_big(lambda: f64, n: u32, x: &BigReal, digits: u32) -> BigReal {
    let prec = x.prec().max(bits_for_digits(digits) + 64 + n);
    let l = Float::with_val(prec, lambda);
    let two_x = Float::with_val(prec, x * 2u32);
    let mut sum = Float::with_val(prec, 0);
    // (lambda)_{n-k} / (k! (n-2k)!) (2x)^{n-2k}
    for k in 0..=(n / 2) {
        let mut t = pochhammer(&l, (n - k) as u64);
        t /= crate::bigreal::factorial(prec, k as u64);
        t /= crate::bigreal::factorial(prec, (n - 2 * k) as u64);
        t *= Float::with_val(prec, (&two_x).pow(n - 2 * k));
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    finish(sum, digits)
}

/// C_n^lambda(x) from the three-term recurrence.
pub fn oracle_c_recurrence(params: &Params, x: f64, digits: u32) -> BigReal {
    let prec = work_prec(params, digits);
    let l = Float::with_val(prec, params.lambda);
    let x = Float::with_val(prec, x);
    let mut prev = Float::with_val(prec, 1);
    if params.n == 0 {
        return finish(prev, digits);
    }
    let mut cur = Float::with_val(prec, &l * &x) * 2u32;
    for k in 1..params.n {
        let a = Float::with_val(prec, &l + k) * &x * 2u32 * &cur;
        let b = (Float::with_val(prec, &l * 2u32) + (k - 1)) * &prev;
        let next = (a - b) / (k + 1);
        prev = cur;
        cur = next;
    }
    finish(cur, digits)
}

/// Sum of a Gauss hypergeometric series with terms t_{s+1} = t_s (a+s)(b+s) x / ((c+s)(s+1)),
/// starting from `t0`. Returns the sum and the largest term magnitude.
fn hyp_series(
    a: &BigReal,
    b: &BigReal,
    c: &BigReal,
    x: &BigReal,
    t0: BigReal,
    tol_bits: u32,
) -> Result<(BigReal, BigReal)> {
    let prec = t0.prec();
    let mut term = t0;
    let mut sum = Float::with_val(prec, &term);
    let mut biggest = Float::with_val(prec, term.abs_ref());
    let lim = a.to_f64().abs().max(b.to_f64().abs()).max(c.to_f64().abs()) as usize + 2;
    let tol = Float::with_val(prec, Float::i_exp(1, -(tol_bits as i32)));
    let mut quiet = 0;
    for s in 0..100_000u32 {
        let num = Float::with_val(prec, a + s) * Float::with_val(prec, b + s) * x;
        let den = Float::with_val(prec, c + s) * (s + 1);
        term *= num / den;
        sum += &term;
        let mag = Float::with_val(prec, term.abs_ref());
        if mag > biggest {
            biggest = mag.clone();
        }
        if term.is_zero() {
            return Ok((sum, biggest));
        }
        let rel = mag / Float::with_val(prec, sum.abs_ref());
        if s as usize > lim && rel < tol {
            quiet += 1;
            if quiet >= 3 {
                return Ok((sum, biggest));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Convergence("hypergeometric series: tail not below threshold in 1e5 terms".into()))
}

/// Re-run a series evaluation until the working precision covers its cancellation.
fn with_cancellation_guard<F>(base_bits: u32, mut eval: F) -> Result<BigReal>
where
    F: FnMut(u32) -> Result<(BigReal, BigReal)>,
{
    let mut guard = 64u32;
    for _ in 0..8 {
        let prec = base_bits + guard;
        let (sum, biggest) = eval(prec)?;
        let lost = if sum.is_zero() {
            prec
        } else {
            let r = biggest / Float::with_val(prec, sum.abs_ref());
            r.log2().to_f64().max(0.0).ceil() as u32
        };
        if lost + 32 <= guard {
            return Ok(sum);
        }
        guard = lost + 64;
    }
    Err(Error::Precision("series cancellation exceeds guard digits".into()))
}

/// k_n(nu) = pi Gamma(2nu+n+1) / (Gamma(nu+1/2) Gamma(nu+n+3/2)).
pub fn kn_big(params: &Params, prec: u32) -> BigReal {
    let nu = Float::with_val(prec, params.lambda) - 0.5f64;
    let n = params.n;
    let pi = Float::with_val(prec, Constant::Pi);
    let g1 = (Float::with_val(prec, &nu * 2u32) + (n + 1)).gamma();
    let g2 = Float::with_val(prec, params.lambda).gamma();
    let g3 = (Float::with_val(prec, &nu + n) + 1.5f64).gamma();
    pi * g1 / g2 / g3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DRoute {
    /// Series in 2/(1-z), valid for z > 3.
    Direct,
    /// Series in 2/(1+z), valid for z > 1.
    Pfaff,
}

pub fn oracle_d(params: &Params, z: f64, digits: u32) -> Result<BigReal> {
    let route = if z > 3.0 { DRoute::Direct } else { DRoute::Pfaff };
    oracle_d_route(params, z, digits, route)
}

pub fn oracle_d_route(params: &Params, z: f64, digits: u32, route: DRoute) -> Result<BigReal> {
    if !(z > 1.0) {
        return domain(format!("oracle_d needs real z > 1, got {z}"));
    }
    if route == DRoute::Direct && !(z > 3.0) {
        return domain(format!("direct D series needs z > 3, got {z}"));
    }
    let base = bits_for_digits(digits) + 16;
    let n = params.n;
    let sum = with_cancellation_guard(base, |prec| {
        let nu = Float::with_val(prec, params.lambda) - 0.5f64;
        let a = Float::with_val(prec, &nu * 2u32) + (n + 1);
        let b = Float::with_val(prec, &nu + (n + 1));
        let c = Float::with_val(prec, &nu * 2u32) + (2 * n + 2);
        let zb = Float::with_val(prec, z);
        let x = match route {
            DRoute::Direct => Float::with_val(prec, 2) / (Float::with_val(prec, 1) - &zb),
            DRoute::Pfaff => Float::with_val(prec, 2) / (Float::with_val(prec, 1) + &zb),
        };
        hyp_series(&a, &b, &c, &x, Float::with_val(prec, 1), base)
    })?;
    let prec = sum.prec();
    let nu = Float::with_val(prec, params.lambda) - 0.5f64;
    let a = Float::with_val(prec, &nu * 2u32) + (n + 1);
    let zb = Float::with_val(prec, z);
    let base_pt = match route {
        DRoute::Direct => (zb - 1u32) * 2u32,
        DRoute::Pfaff => (zb + 1u32) * 2u32,
    };
    let val = kn_big(params, prec) / base_pt.pow(&a) * sum;
    Ok(finish(val, digits))
}

/// hat-C = sqrt(pi)/Gamma(lambda) (z^2-1)^{-nu} F(-2nu-n, n+1; 1-nu; (1-z)/2) (scaled F), real z > 1.
pub fn oracle_hat_c(params: &Params, z: f64, digits: u32) -> Result<BigReal> {
    if params.nu > 0.0 && params.nu.fract() == 0.0 {
        return domain(format!("hat-C limit form for integer nu = {} not implemented", params.nu));
    }
    if !(z > 1.0) {
        return domain(format!("oracle_hat_c needs real z > 1, got {z}"));
    }
    let base = bits_for_digits(digits) + 16;
    let n = params.n;
    let sum = with_cancellation_guard(base, |prec| {
        let nu = Float::with_val(prec, params.lambda) - 0.5f64;
        let a = -(Float::with_val(prec, &nu * 2u32) + n);
        let c = Float::with_val(prec, 1) - &nu;
        // Pfaff: F(a,b;c;x) = (1-x)^{-a} F(a, c-b; c; x/(x-1)), x/(x-1) = (z-1)/(z+1)
        let b2 = Float::with_val(prec, &c - (n + 1));
        let zb = Float::with_val(prec, z);
        let x = Float::with_val(prec, &zb - 1u32) / (zb + 1u32);
        let t0 = c.clone().gamma().recip();
        hyp_series(&a, &b2, &c, &x, t0, base)
    })?;
    let prec = sum.prec();
    let nu = Float::with_val(prec, params.lambda) - 0.5f64;
    let a = -(Float::with_val(prec, &nu * 2u32) + n);
    let zb = Float::with_val(prec, z);
    let one_minus_x = Float::with_val(prec, &zb + 1u32) / 2u32;
    let pref = Float::with_val(prec, Constant::Pi).sqrt() / Float::with_val(prec, params.lambda).gamma();
    let z2m1 = Float::with_val(prec, &zb * &zb) - 1u32;
    let val = pref * z2m1.pow(-nu) * one_minus_x.pow(-a) * sum;
    Ok(finish(val, digits))
}

/// hat-C from its defining series in (1-z)/2, for 1 < z < 3.
pub fn oracle_hat_c_direct(params: &Params, z: f64, digits: u32) -> Result<BigReal> {
    if params.nu > 0.0 && params.nu.fract() == 0.0 {
        return domain("hat-C limit form for integer nu not implemented");
    }
    if !(z > 1.0 && z < 3.0) {
        return domain(format!("direct hat-C series needs 1 < z < 3, got {z}"));
    }
    let base = bits_for_digits(digits) + 16;
    let n = params.n;
    let sum = with_cancellation_guard(base, |prec| {
        let nu = Float::with_val(prec, params.lambda) - 0.5f64;
        let a = -(Float::with_val(prec, &nu * 2u32) + n);
        let b = Float::with_val(prec, n + 1);
        let c = Float::with_val(prec, 1) - &nu;
        let x = (Float::with_val(prec, 1) - z) / 2u32;
        let t0 = c.clone().gamma().recip();
        hyp_series(&a, &b, &c, &x, t0, base)
    })?;
    let prec = sum.prec();
    let nu = Float::with_val(prec, params.lambda) - 0.5f64;
    let zb = Float::with_val(prec, z);
    let pref = Float::with_val(prec, Constant::Pi).sqrt() / Float::with_val(prec, params.lambda).gamma();
    let z2m1 = Float::with_val(prec, &zb * &zb) - 1u32;
    Ok(finish(pref * z2m1.pow(-nu) * sum, digits))
}

/// I_nu(x) by its power series, nu > -1.
pub fn mp_bessel_i(nu: &BigReal, x: &BigReal, digits: u32) -> BigReal {
    let prec = bits_for_digits(digits) + 32;
    finish(bessel_series(nu, x, prec, false), digits)
}

/// J_nu(x) by its power series, nu > -1, with guard bits for the alternating sum.
pub fn mp_bessel_j(nu: &BigReal, x: &BigReal, digits: u32) -> BigReal {
    let guard = (x.to_f64().abs() * std::f64::consts::LOG2_E) as u32 + 64;
    let prec = bits_for_digits(digits) + guard;
    finish(bessel_series(nu, x, prec, true), digits)
}

fn bessel_series(nu: &BigReal, x: &BigReal, prec: u32, alternating: bool) -> BigReal {
    let nu = Float::with_val(prec, nu);
    let half = Float::with_val(prec, x) / 2u32;
    let q = Float::with_val(prec, &half * &half);
    let g = (Float::with_val(prec, &nu) + 1u32).gamma();
    let mut term = Float::with_val(prec, (&half).pow(&nu)) / g;
    let mut sum = term.clone();
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32)));
    for k in 1..1_000_000u32 {
        term *= &q;
        term /= Float::with_val(prec, &nu + k) * k;
        if alternating {
            term = -term;
        }
        sum += &term;
        if Float::with_val(prec, term.abs_ref()) < Float::with_val(prec, sum.abs_ref()) * &tol
            && Float::with_val(prec, k) > half.to_f64().abs()
        {
            break;
        }
    }
    sum
}

/// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by the trapezoid rule with step halving.
pub fn mp_bessel_k(nu: &BigReal, x: &BigReal, digits: u32) -> Result<BigReal> {
    let prec = bits_for_digits(digits) + 32;
    let xf = x.to_f64();
    let nuf = nu.to_f64().abs();
    if !(xf > 0.0) {
        return domain("mp_bessel_k needs x > 0");
    }
    // truncate where the integrand is below 2^-prec relative to e^{-x}
    let target = prec as f64 * std::f64::consts::LN_2 + 10.0;
    let mut t_max = 1.0f64;
    while xf * (t_max.cosh() - 1.0) - nuf * t_max < target {
        t_max *= 1.25;
    }
    let x = Float::with_val(prec, x);
    let nu = Float::with_val(prec, nu);
    let f = |t: &BigReal| -> BigReal {
        let e = Float::with_val(prec, -(Float::with_val(prec, t.cosh_ref()) * &x)).exp();
        e * Float::with_val(prec, (Float::with_val(prec, &nu * t)).cosh_ref())
    };
    let mut h = Float::with_val(prec, 0.5);
    let mut count = (t_max / 0.5).ceil() as u32;
    let mut sum = Float::with_val(prec, f(&Float::with_val(prec, 0))) / 2u32;
    for k in 1..=count {
        sum += f(&Float::with_val(prec, &h * k));
    }
    let mut est = Float::with_val(prec, &sum * &h);
    let tol = Float::with_val(prec, Float::i_exp(1, 16 - prec as i32));
    for _ in 0..20 {
        // add midpoints
        let mut mid = Float::with_val(prec, 0);
        for k in 0..count {
            let t = Float::with_val(prec, &h * k) + Float::with_val(prec, &h / 2u32);
            mid += f(&t);
        }
        sum += mid;
        h /= 2u32;
        count *= 2;
        let next = Float::with_val(prec, &sum * &h);
        let diff = Float::with_val(prec, &next - &est).abs();
        est = next;
        if diff < Float::with_val(prec, est.abs_ref()) * &tol {
            return Ok(finish(est, digits));
        }
    }
    Err(Error::Convergence("K integral trapezoid did not converge".into()))
}

/// Exact A and B at real z > 1 from C, D and modified Bessel functions at u xi.
pub fn oracle_ab(params: &Params, z: f64, digits: u32) -> Result<(BigReal, BigReal)> {
    if !(z > 1.0) {
        return domain(format!("oracle_ab needs real z > 1, got {z}"));
    }
    let d2 = digits + 20;
    let prec = bits_for_digits(d2);
    let c = oracle_c(params, z, d2);
    let d = oracle_d(params, z, d2)?;
    let zb = Float::with_val(prec, z);
    let root = (Float::with_val(prec, &zb * &zb) - 1u32).sqrt();
    let xi = Float::with_val(prec, &zb + &root).ln();
    let u = Float::with_val(prec, params.u);
    let nu = Float::with_val(prec, params.nu);
    let arg = Float::with_val(prec, &u * &xi);
    let nu1 = Float::with_val(prec, &nu + 1u32);
    let k0 = mp_bessel_k(&nu, &arg, d2)?;
    let k1 = mp_bessel_k(&nu1, &arg, d2)?;
    let i0 = mp_bessel_i(&nu, &arg, d2);
    let i1 = mp_bessel_i(&nu1, &arg, d2);
    let lam = Float::with_val(prec, params.lambda);
    let mut pref = Float::with_val(prec, 2).pow(&nu) * crate::bigreal::factorial(prec, params.n as u64)
        / pochhammer(&lam, params.n as u64);
    pref *= (Float::with_val(prec, &arg) / Float::with_val(prec, Constant::Pi)).sqrt();
    let expo = (Float::with_val(prec, &nu * 2u32) + 1u32) / 4u32;
    pref *= (Float::with_val(prec, &zb * &zb) - 1u32).pow(&expo);
    let a = Float::with_val(prec, &pref * (Float::with_val(prec, &c * &k1) + Float::with_val(prec, &d * &i1)));
    let b = pref * (Float::with_val(prec, &c * &k0) - Float::with_val(prec, &d * &i0));
    Ok((finish(a, digits), finish(b, digits)))
}

/// Envelope sqrt(C_n^lambda(cos theta)^2 + (2 lambda/n C_{n-1}^{lambda+1}(cos theta))^2).
pub fn oracle_envelope(params: &Params, theta: f64, digits: u32) -> BigReal {
    let prec = work_prec(params, digits);
    let x = Float::with_val(prec, theta).cos();
    let c = oracle_c_big(params.lambda, params.n, &x, digits + 10);
    let mut m2 = Float::with_val(prec, &c * &c);
    if params.n > 0 {
        let dc = oracle_c_big(params.lambda + 1.0, params.n - 1, &x, digits + 10);
        let s = Float::with_val(prec, params.lambda) * 2u32 / params.n * dc;
        m2 += Float::with_val(prec, &s * &s);
    }
    finish(m2.sqrt(), digits)
}

/// d^r T_n / dx^r via the Gegenbauer identity, checked against differentiating the
/// Chebyshev power-basis coefficients.
pub fn oracle_cheb_deriv(n: u32, r: u32, x: f64, digits: u32) -> Result<BigReal> {
    if r < 1 || r > n {
        return domain(format!("need 1 <= r <= n, got n={n}, r={r}"));
    }
    let prec = bits_for_digits(digits) + 64 + 2 * n;
    let xb = Float::with_val(prec, x);
    let gp = Params::new(r as f64, n - r)?;
    let g = oracle_c_big(gp.lambda, gp.n, &xb, digits + 20);
    let lhs = Float::with_val(prec, 2).pow(r - 1)
        * crate::bigreal::factorial(prec, (r - 1) as u64)
        * n
        * g;

    // T_k coefficients by T_{k+1} = 2x T_k - T_{k-1}
    let zero = || Float::with_val(prec, 0);
    let mut prev: Vec<BigReal> = vec![Float::with_val(prec, 1)];
    let mut cur: Vec<BigReal> = vec![zero(), Float::with_val(prec, 1)];
    for _ in 1..n {
        let mut next: Vec<BigReal> = (0..cur.len() + 1).map(|_| zero()).collect();
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += Float::with_val(prec, c * 2u32);
        }
        for (i, p) in prev.iter().enumerate() {
            next[i] -= p;
        }
        prev = cur;
        cur = next;
    }
    let mut coeffs = cur;
    for _ in 0..r {
        coeffs = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Float::with_val(prec, c * i as u32))
            .collect();
    }
    let mut rhs = zero();
    for c in coeffs.iter().rev() {
        rhs *= &xb;
        rhs += c;
    }
    let diff = Float::with_val(prec, &lhs - &rhs).abs();
    let scale = Float::with_val(prec, lhs.abs_ref()).max(&Float::with_val(prec, 1e-300));
    if diff > scale * Float::with_val(prec, 1e-40) {
        return Err(Error::Precision(format!(
            "Chebyshev derivative mismatch for n={n}, r={r}, x={x}"
        )));
    }
    Ok(finish(lhs, digits))
}
