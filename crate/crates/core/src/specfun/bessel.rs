//! Bessel functions of real order at positive real argument.
//!
//! J, Y: Steed/Temme scheme (continued fraction for J'/J, downward recurrence to
//! |mu| <= 1/2, Temme series or a second continued fraction for Y_mu, Wronskian for
//! J_mu), switching to Hankel's expansion plus upward recurrence once x >= max(25, nu).
//! K: Temme series or continued fraction at |mu| <= 1/2, then upward recurrence.
//! I: the I-K Wronskian at order nu with I_{nu+1}/I_nu from its continued fraction.

use std::f64::consts::PI;

use super::tables::RGAMMA_1P;
use crate::error::{domain, Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const BIG: f64 = 1e250;
const MAXIT: usize = 1_000_000;
const XMIN: f64 = 2.0;
const HANKEL_X: f64 = 25.0;

pub const ORDER_MIN: f64 = -0.5;
pub const ORDER_MAX: f64 = 120.0;
pub const X_MAX: f64 = 1e4;

/// Temme's auxiliary values (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)).
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut odd = 0.0;
    let mut even = 0.0;
    let m2 = mu * mu;
    for k in (0..RGAMMA_1P.len()).rev() {
        if k % 2 == 0 {
            even = even * m2 + RGAMMA_1P[k];
        } else {
            odd = odd * m2 + RGAMMA_1P[k];
        }
    }
    let gampl = even + mu * odd;
    let gammi = even - mu * odd;
    (-odd, even, gampl, gammi)
}

fn check(order: f64, x: f64, min_order: f64) -> Result<()> {
    if !(order >= min_order && order <= ORDER_MAX) {
        return domain(format!("Bessel order {order} outside [{min_order}, {ORDER_MAX}]"));
    }
    if !(x > 0.0 && x <= X_MAX) {
        return domain(format!("Bessel argument {x} outside (0, {X_MAX}]"));
    }
    Ok(())
}

fn no_convergence(what: &str, x: f64, nu: f64) -> Error {
    Error::Convergence(format!("{what} at x={x}, order={nu}"))
}

/// J_nu, Y_nu and their derivatives for nu >= 0.
pub(crate) fn bessjy(x: f64, xnu: f64) -> Result<(f64, f64, f64, f64)> {
    if x >= HANKEL_X && x >= xnu {
        return Ok(hankel_upward(x, xnu));
    }
    let nl = if x < XMIN {
        (xnu + 0.5) as usize
    } else {
        (xnu - x + 1.5).max(0.0) as usize
    };
    let xmu = xnu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    let mut isign = 1.0;
    let mut h = (xnu * xi).max(FPMIN);
    let mut b = xi2 * xnu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(no_convergence("J continued fraction", x, xnu));
    }
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let mut rjl1 = rjl;
    let mut rjp1 = rjpl;
    for k in 0..nl {
        let t = (xnu - k as f64) * xi * rjl + rjpl;
        let fact = (xnu - (k + 1) as f64) * xi;
        rjpl = fact * t - rjl;
        rjl = t;
        if rjl.abs() > BIG {
            rjl /= BIG;
            rjpl /= BIG;
            rjl1 /= BIG;
            rjp1 /= BIG;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(no_convergence("Y series", x, xnu));
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut converged = false;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(no_convergence("J/Y second continued fraction", x, xnu));
        }
        let gam = (p - f) / q;
        let mut r = (w / ((p - f) * gam + q)).sqrt();
        if rjl < 0.0 {
            r = -r;
        }
        rjmu = r;
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }
    let fact = rjmu / rjl;
    let rj = rjl1 * fact;
    let rjp = rjp1 * fact;
    for i in 1..=nl {
        let t = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = t;
    }
    let ry = rymu;
    let ryp = xnu * xi * rymu - ry1;
    Ok((rj, ry, rjp, ryp))
}

/// J, Y and derivatives from Hankel's expansion at the fractional order, then upward recurrence.
fn hankel_upward(x: f64, xnu: f64) -> (f64, f64, f64, f64) {
    let nl = xnu.floor() as usize;
    let mu = xnu - nl as f64;
    let (mut j0, mut y0) = hankel(mu, x);
    let (mut j1, mut y1) = hankel(mu + 1.0, x);
    for k in 1..=nl {
        let f = 2.0 * (mu + k as f64) / x;
        let (j2, y2) = (f * j1 - j0, f * y1 - y0);
        j0 = j1;
        y0 = y1;
        j1 = j2;
        y1 = y2;
    }
    let r = xnu / x;
    (j0, y0, r * j0 - j1, r * y0 - y1)
}

fn hankel(mu: f64, x: f64) -> (f64, f64) {
    let m = 4.0 * mu * mu;
    let (mut p, mut q, mut t) = (0.0, 0.0, 1.0);
    for k in 0..200 {
        if k > 0 {
            let kk = (2 * k - 1) as f64;
            let next = t * (m - kk * kk) / (k as f64 * 8.0 * x);
            if next.abs() > t.abs() {
                break;
            }
            t = next;
        }
        match k % 4 {
            0 => p += t,
            1 => q += t,
            2 => p -= t,
            _ => q -= t,
        }
        if t.abs() < 1e-18 {
            break;
        }
    }
    // cos/sin of x - phi without forming x - phi
    let phi = (0.5 * mu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let c = cx * cp + sx * sp;
    let s = sx * cp - cx * sp;
    let a = (2.0 / (PI * x)).sqrt();
    (a * (p * c - q * s), a * (p * s + q * c))
}

/// Exponentially scaled I_nu e^{-x}, K_nu e^{x} for nu >= 0.
pub(crate) fn bessik_scaled(x: f64, xnu: f64) -> Result<(f64, f64)> {
    let nl = (xnu + 0.5) as usize;
    let xmu = xnu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    // K_mu and K_{mu+1}, scaled by e^x
    let (mut rkmu, mut rk1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let e = e.exp();
        let mut p = 0.5 * e / gampl;
        let mut q = 0.5 / (e * gammi);
        let mut c = 1.0;
        let d = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(no_convergence("K series", x, xnu));
        }
        let ex = x.exp();
        rkmu = sum * ex;
        rk1 = sum1 * xi2 * ex;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(no_convergence("K continued fraction", x, xnu));
        }
        h *= a1;
        rkmu = (PI / (2.0 * x)).sqrt() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    for i in 1..=nl {
        let t = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = t;
    }
    // I_{nu+1}/I_nu = 1/(b_1 + 1/(b_2 + ...)), b_k = 2(nu+k)/x, all terms positive
    let mut r = FPMIN;
    let mut c = r;
    let mut d = 0.0;
    let mut converged = false;
    for k in 1..MAXIT {
        let b = 2.0 * (xnu + k as f64) * xi;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        r *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(no_convergence("I ratio continued fraction", x, xnu));
    }
    // Wronskian I_nu K_{nu+1} + I_{nu+1} K_nu = 1/x; scaled factors cancel
    let ri = xi / (rk1 + r * rkmu);
    Ok((ri, rkmu))
}

pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    check(order, x, ORDER_MIN)?;
    if order >= 0.0 {
        return Ok(bessjy(x, order)?.0);
    }
    let mu = -order;
    let (j, y, _, _) = bessjy(x, mu)?;
    Ok((mu * PI).cos() * j - (mu * PI).sin() * y)
}

pub fn bessel_y(order: f64, x: f64) -> Result<f64> {
    check(order, x, 0.0)?;
    Ok(bessjy(x, order)?.1)
}

/// e^{-x} I_nu(x).
pub fn bessel_i_scaled(order: f64, x: f64) -> Result<f64> {
    check(order, x, ORDER_MIN)?;
    if order >= 0.0 {
        return Ok(bessik_scaled(x, order)?.0);
    }
    let mu = -order;
    let (i, k) = bessik_scaled(x, mu)?;
    Ok(i + 2.0 / PI * (mu * PI).sin() * k * (-2.0 * x).exp())
}

/// e^{x} K_nu(x).
pub fn bessel_k_scaled(order: f64, x: f64) -> Result<f64> {
    check(order, x, ORDER_MIN)?;
    Ok(bessik_scaled(x, order.abs())?.1)
}

pub fn bessel_i(order: f64, x: f64) -> Result<f64> {
    Ok(bessel_i_scaled(order, x)? * x.exp())
}

pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(order, x)? * (-x).exp())
}
