//! Liouville-Green expansions for D, D_{+-1} away from z = 1, and their error bounds.

use num_complex::Complex64;
use rug::Float;
use serde::Serialize;

use crate::bigreal::TABLE_BITS;
use crate::coeff::{bessel_exponent_coeffs, build_coeff_table, CoeffTable};
use crate::domain::{PlanePoint, Params};
use crate::error::{domain, Error, Result};
use crate::quad::integrate_doubling;
use crate::specfun::ln_kn;

/// Relative tolerance for bound quadratures; bounds only need a few digits.
const BOUND_TOL: f64 = 1e-3;
const MONO_NODES: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathKind {
    StraightFromBetaOne,
    SegmentPlusLevelArc,
    HorizontalFromXiInfinity,
    CompositeXiPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSpec {
    pub kind: PathKind,
    /// Nodes at which monotonicity of Re xi was verified (0 where it holds by construction).
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LgResult {
    pub value: Complex64,
    /// ln of `value`, available even when `value` over- or underflows.
    pub ln_value: Complex64,
    pub truncation_n: usize,
    pub eta_bound: f64,
    pub path: PathSpec,
}

fn check_table(table: &CoeffTable, params: &Params, n: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("LG truncation needs N >= 2, got {n}"));
    }
    if n > table.order {
        return domain(format!("table built to order {}, N = {n} requested", table.order));
    }
    if table.nu != params.nu {
        return domain(format!("table nu {} does not match params nu {}", table.nu, params.nu));
    }
    Ok(())
}

fn check_outside_disk(point: &PlanePoint) -> Result<()> {
    if point.dist_to_one() < 1.0 {
        return Err(Error::Region(format!(
            "LG expansions need |z-1| >= 1, got z = {}",
            point.z
        )));
    }
    Ok(())
}

/// ln k_n - (2nu+1)/4 ln(4(z^2-1)).
fn ln_common(params: &Params, point: &PlanePoint) -> Complex64 {
    let e = (2.0 * params.nu + 1.0) / 4.0;
    Complex64::new(ln_kn(params), 0.0) - e * (point.ln_z2m1() + 4f64.ln())
}

pub fn lg_d(params: &Params, point: &PlanePoint, n: usize) -> Result<LgResult> {
    let table = build_coeff_table(params.nu, n)?;
    lg_d_table(&table, params, point, n)
}

pub fn lg_d_table(table: &CoeffTable, params: &Params, point: &PlanePoint, n: usize) -> Result<LgResult> {
    check_table(table, params, n)?;
    check_outside_disk(point)?;
    let beta = point.beta()?;
    let u = params.u;
    let mut expo = -u * point.xi;
    for s in 1..n {
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        expo += sign * (table.etilde_at(s, beta) - table.e_at_1_f64(s)) / u.powi(s as i32);
    }
    let ln_value = ln_common(params, point) + expo;
    let (eta_bound, path) = eta_and_path(table, u, beta, n, 0)?;
    Ok(LgResult {
        value: ln_value.exp(),
        ln_value,
        truncation_n: n,
        eta_bound,
        path,
    })
}

pub fn lg_d_pm(params: &Params, point: &PlanePoint, n: usize, sign: i32) -> Result<LgResult> {
    let table = build_coeff_table(params.nu, n)?;
    lg_d_pm_table(&table, params, point, n, sign)
}

/// D_{n,-1} on the closed first quadrant; D_{n,+1} via conj(D_{n,-1}(conj z)).
pub fn lg_d_pm_table(
    table: &CoeffTable,
    params: &Params,
    point: &PlanePoint,
    n: usize,
    sign: i32,
) -> Result<LgResult> {
    check_table(table, params, n)?;
    check_outside_disk(point)?;
    match sign {
        -1 => {
            if point.z.im < 0.0 {
                return Err(Error::Region(format!(
                    "D_(n,-1) expansion needs Im z >= 0, got z = {}",
                    point.z
                )));
            }
            lg_minus(table, params, point, n)
        }
        1 => {
            if point.z.im > 0.0 {
                return Err(Error::Region(format!(
                    "D_(n,+1) expansion needs Im z <= 0, got z = {}",
                    point.z
                )));
            }
            // real points of the cut are read on the lower side here
            let mirror = crate::domain::map_point(point.z.conj())?;
            let r = lg_minus(table, params, &mirror, n)?;
            Ok(LgResult {
                value: r.value.conj(),
                ln_value: r.ln_value.conj(),
                ..r
            })
        }
        _ => domain(format!("sign must be +1 or -1, got {sign}")),
    }
}

fn lg_minus(table: &CoeffTable, params: &Params, point: &PlanePoint, n: usize) -> Result<LgResult> {
    let beta = point.beta()?;
    let u = params.u;
    let minus_one = Complex64::new(-1.0, 0.0);
    let mut expo = u * point.xi;
    for s in 1..n {
        expo += (table.etilde_at(s, beta) - table.etilde_at(s, minus_one)) / u.powi(s as i32);
    }
    let ln_value = ln_common(params, point) + expo + Complex64::new(0.0, std::f64::consts::FRAC_PI_2);
    let (eta_bound, path) = eta_and_path(table, u, beta, n, -1)?;
    Ok(LgResult {
        value: ln_value.exp(),
        ln_value,
        truncation_n: n,
        eta_bound,
        path,
    })
}

/// |LHS - exp(sum_{s<N} (-1)^{s+1} E~_s(1)/u^s)| for the gamma-ratio identity.
pub fn gamma_ratio_check(params: &Params, n: usize) -> Result<f64> {
    if params.u < 5.0 {
        return domain(format!("gamma ratio check needs u >= 5, got {}", params.u));
    }
    let table = build_coeff_table(params.nu, n)?;
    let p = TABLE_BITS;
    let l = Float::with_val(p, params.lambda);
    let u = Float::with_val(p, params.u);
    let lg = |x: Float| Float::with_val(p, x.ln_gamma_ref());
    let half_u = Float::with_val(p, &u / 2u32);
    let half_l = Float::with_val(p, &l / 2u32);
    let mut lhs = Float::with_val(p, &l - 1u32) * Float::with_val(p, rug::float::Constant::Log2);
    lhs += lg(Float::with_val(p, &u + 1u32));
    lhs += lg(Float::with_val(p, &half_u + &half_l));
    lhs -= lg(Float::with_val(p, &u + &l));
    lhs -= lg(Float::with_val(p, &half_u - &half_l) + 1u32);
    let mut rhs = Float::with_val(p, 0);
    let mut upow = Float::with_val(p, 1);
    for s in 1..n {
        upow *= &u;
        let t = Float::with_val(p, &table.e_at_1[s - 1] / &upow);
        if s % 2 == 1 {
            rhs += t;
        } else {
            rhs -= t;
        }
    }
    Ok((lhs.exp() - rhs.exp()).abs().to_f64())
}

/// Polynomial Q_s with F~_s = (b^2 - 1) Q_s, i.e. Q_s = -E~_s'.
fn quotient_coeffs(table: &CoeffTable, s: usize) -> Vec<f64> {
    let e = table.etilde[s - 1].coeffs_f64();
    (1..e.len()).map(|k| -(k as f64) * e[k]).collect()
}

fn horner(c: &[f64], b: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * b + x)
}

/// A parametrized smooth piece t in [0,1] -> (b, b - 1, |b'(t)|); b - 1 is carried
/// separately so paths ending near b = 1 keep their relative accuracy.
struct Piece {
    at: Box<dyn Fn(f64) -> (Complex64, Complex64, f64)>,
}

fn beta_path(beta: Complex64, j: i32) -> Result<(PathKind, Vec<Piece>)> {
    let one = Complex64::new(1.0, 0.0);
    if j == 0 {
        let d = beta - one;
        if d.norm() == 0.0 {
            return Ok((PathKind::StraightFromBetaOne, Vec::new()));
        }
        let len = d.norm();
        let piece = Piece {
            at: Box::new(move |t| (one + t * d, t * d, len)),
        };
        return Ok((PathKind::StraightFromBetaOne, vec![piece]));
    }
    if beta.im == 0.0 && beta.re >= -1.0 && beta.re < 1.0 {
        let x1 = beta.re;
        let piece = Piece {
            at: Box::new(move |t| {
                let b = Complex64::new(-1.0 + t * (x1 + 1.0), 0.0);
                (b, b - 1.0, x1 + 1.0)
            }),
        };
        return Ok((PathKind::SegmentPlusLevelArc, vec![piece]));
    }
    if !(beta.re > 0.0) {
        return Err(Error::Path(format!("no level-curve path from beta = -1 to beta = {beta}")));
    }
    // level curve (Re b - c)^2 + (Im b)^2 = c^2 - 1 through beta
    let cm1 = (beta - 1.0).norm_sqr() / (2.0 * beta.re);
    let c = 1.0 + cm1;
    let r = (cm1 * (c + 1.0)).sqrt();
    let x0 = c - r;
    let phi_end = (beta - c).arg();
    let phi_start = if beta.im > 0.0 { std::f64::consts::PI } else { -std::f64::consts::PI };
    let seg = Piece {
        at: Box::new(move |t| {
            let b = Complex64::new(-1.0 + t * (x0 + 1.0), 0.0);
            (b, b - 1.0, x0 + 1.0)
        }),
    };
    let sweep = phi_end - phi_start;
    let arc = Piece {
        at: Box::new(move |t| {
            let phi = phi_start + t * sweep;
            let w = r * Complex64::from_polar(1.0, phi);
            (c + w, cm1 + w, r * sweep.abs())
        }),
    };
    Ok((PathKind::SegmentPlusLevelArc, vec![seg, arc]))
}

/// |(b+1)/(b-1)| must be monotone along the chained pieces.
fn check_monotone(pieces: &[Piece]) -> Result<()> {
    let mut vals = Vec::new();
    for p in pieces {
        for i in 1..=MONO_NODES {
            let (b, bm1, _) = (p.at)(i as f64 / (MONO_NODES + 1) as f64);
            vals.push(((b + 1.0) / bm1).norm());
        }
    }
    let tol = |a: f64, b: f64| 1e-9 * a.abs().max(b.abs());
    let up = vals.windows(2).all(|w| w[1] >= w[0] - tol(w[0], w[1]));
    let down = vals.windows(2).all(|w| w[1] <= w[0] + tol(w[0], w[1]));
    if up || down {
        Ok(())
    } else {
        Err(Error::Path("Re xi is not monotone along the integration path".into()))
    }
}

fn path_integral<F: Fn(Complex64) -> f64>(pieces: &[Piece], f: F) -> Result<f64> {
    let mut total = 0.0;
    for p in pieces {
        total += integrate_doubling(
            |t| {
                let (b, _, speed) = (p.at)(t);
                f(b) * speed
            },
            0.0,
            1.0,
            BOUND_TOL,
        )?;
    }
    Ok(total)
}

/// (omega, varpi) for the LG error bound at beta, path from beta^(j).
pub fn omega_varpi(table: &CoeffTable, u: f64, beta: Complex64, n: usize, j: i32) -> Result<(f64, f64, PathSpec)> {
    if j != 0 && j != -1 {
        return domain(format!("j must be 0 or -1, got {j}"));
    }
    if n < 2 || n > table.order {
        return domain(format!("N = {n} outside 2..={}", table.order));
    }
    let (kind, pieces) = beta_path(beta, j)?;
    check_monotone(&pieces)?;
    let q: Vec<Vec<f64>> = (1..=n).map(|s| quotient_coeffs(table, s)).collect();
    let qa = |s: usize, b: Complex64| horner(&q[s - 1], b).norm();

    let mut omega = 2.0 * path_integral(&pieces, |b| qa(n, b))?;
    for s in 1..n {
        let inner = path_integral(&pieces, |b| {
            let w = (b * b - 1.0).norm();
            (s..n).map(|k| qa(k, b) * qa(s + n - k - 1, b)).sum::<f64>() * w
        })?;
        omega += inner / u.powi(s as i32);
    }
    let mut varpi = 0.0;
    for s in 0..=n.saturating_sub(2) {
        varpi += 4.0 * path_integral(&pieces, |b| qa(s + 1, b))? / u.powi(s as i32);
    }
    let spec = PathSpec {
        kind,
        nodes: MONO_NODES * pieces.len(),
    };
    Ok((omega, varpi, spec))
}

fn combine(u: f64, n: usize, omega: f64, varpi: f64) -> f64 {
    let w = omega / u.powi(n as i32);
    w * (varpi / u + w).exp()
}

fn eta_and_path(table: &CoeffTable, u: f64, beta: Complex64, n: usize, j: i32) -> Result<(f64, PathSpec)> {
    let (omega, varpi, spec) = omega_varpi(table, u, beta, n, j)?;
    Ok((combine(u, n, omega, varpi), spec))
}

/// Bound on |eta_{N,j}(u, beta)| at the given point.
pub fn bound_eta(params: &Params, point: &PlanePoint, n: usize, j: i32) -> Result<f64> {
    let table = build_coeff_table(params.nu, n)?;
    bound_eta_table(&table, params.u, point.beta()?, n, j)
}

pub fn bound_eta_table(table: &CoeffTable, u: f64, beta: Complex64, n: usize, j: i32) -> Result<f64> {
    Ok(eta_and_path(table, u, beta, n, j)?.0)
}

/// int_x^inf (s^2 + y^2)^{-p/2} ds for p >= 2.
fn ray_integral(x: f64, y: f64, p: usize) -> Result<f64> {
    let pf = p as f64;
    if x > 0.0 && y.abs() <= 1e-3 * x {
        // (s^2+y^2) >= s^2 makes this an upper bound
        return Ok(x.powf(1.0 - pf) / (pf - 1.0));
    }
    if y == 0.0 {
        return Err(Error::Path("xi path runs through t = 0".into()));
    }
    let ay = y.abs();
    let phi0 = (x / ay).atan();
    let v = integrate_doubling(|phi| phi.cos().powf(pf - 2.0), phi0, std::f64::consts::FRAC_PI_2, BOUND_TOL)?;
    Ok(ay.powf(1.0 - pf) * v)
}

/// int over the path of |t|^{-p} |dt|.
fn xi_path_integral(xi: Complex64, j: i32, p: usize) -> Result<f64> {
    let pf = p as f64;
    match j {
        0 => ray_integral(xi.re, xi.im, p),
        _ => {
            let h = std::f64::consts::FRAC_PI_2;
            let ray = ray_integral(-xi.re, h, p)?;
            let (lo, hi) = (xi.im.min(h), xi.im.max(h));
            if xi.re == 0.0 && lo <= 0.0 {
                return Err(Error::Path("xi path runs through t = 0".into()));
            }
            let x = xi.re;
            let vert = if hi > lo {
                integrate_doubling(|tau| (x * x + tau * tau).powf(-pf / 2.0), lo, hi, BOUND_TOL)?
            } else {
                0.0
            };
            Ok(ray + vert)
        }
    }
}

/// (omega, varpi) for the modified-Bessel exponent expansion.
pub fn omega_varpi_k(nu_eff: f64, u: f64, xi: Complex64, n: usize, j: i32) -> Result<(f64, f64, PathSpec)> {
    if j != 0 && j != -1 {
        return domain(format!("j must be 0 or -1, got {j}"));
    }
    if n < 2 {
        return domain(format!("N must be >= 2, got {n}"));
    }
    if xi.norm() == 0.0 {
        return Err(Error::Pole("xi = 0".into()));
    }
    if j == 0 && xi.re <= 0.0 && xi.im == 0.0 {
        return Err(Error::Path(format!("no ray from +inf to xi = {xi} avoiding 0")));
    }
    let a: Vec<f64> = bessel_exponent_coeffs(&Float::with_val(TABLE_BITS, nu_eff), n)
        .iter()
        .map(|x| x.to_f64().abs())
        .collect();
    let ia = |p: usize| xi_path_integral(xi, j, p);
    let mut omega = 2.0 * a[n - 1] * ia(n + 1)?;
    for s in 1..n {
        let sum: f64 = (s..n).map(|k| a[k - 1] * a[s + n - k - 2]).sum();
        if sum != 0.0 {
            omega += sum * ia(s + n + 1)? / u.powi(s as i32);
        }
    }
    let mut varpi = 0.0;
    for s in 0..=n - 2 {
        if a[s] != 0.0 {
            varpi += 4.0 * a[s] * ia(s + 2)? / u.powi(s as i32);
        }
    }
    let kind = if j == 0 {
        PathKind::HorizontalFromXiInfinity
    } else {
        PathKind::CompositeXiPath
    };
    Ok((omega, varpi, PathSpec { kind, nodes: 0 }))
}

/// Bound on |eta^(K)_{N,j}(nu, u, xi)|.
pub fn bound_eta_k(nu_eff: f64, u: f64, xi: Complex64, n: usize, j: i32) -> Result<f64> {
    let (omega, varpi, _) = omega_varpi_k(nu_eff, u, xi, n, j)?;
    Ok(combine(u, n, omega, varpi))
}

/// Truncated K expansion exp{-u xi - sum (-1)^s a_s/(s (u xi)^s)} sqrt(pi/(2 u xi)) (j = 0),
/// or its continuation K(u xi e^{-pi i}) (j = -1), without the (1 + eta) factor.
pub fn k_expansion(nu_eff: f64, u: f64, xi: Complex64, n: usize, j: i32) -> Result<Complex64> {
    let a = bessel_exponent_coeffs(&Float::with_val(TABLE_BITS, nu_eff), n.max(1));
    let x = u * xi;
    let pre = (std::f64::consts::PI / (2.0 * x)).sqrt();
    let mut sum = Complex64::new(0.0, 0.0);
    for s in 1..n {
        let t = a[s - 1].to_f64() / (s as f64 * x.powi(s as i32));
        sum += match j {
            0 if s % 2 == 1 => -t,
            0 => t,
            _ => t,
        };
    }
    match j {
        0 => Ok(pre * (-x - sum).exp()),
        -1 => Ok(Complex64::new(0.0, 1.0) * pre * (x - sum).exp()),
        _ => domain(format!("j must be 0 or -1, got {j}")),
    }
}
