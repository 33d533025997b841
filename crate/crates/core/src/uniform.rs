//! The slowly varying coefficient functions A(u,z), B(u,z) and the solutions built from them.
//!
//! Away from z = 1 the exp/cosh and exp/sinh series are summed directly, with error bounds
//! assembled from the LG and modified-Bessel bounds at the point. Inside |z-1| < 1 the same
//! truncated functions are integrated around the circle |t-1| = 1. On the real interval the
//! re-expanded coefficients A_s(theta), B_s(theta) are used.

use num_complex::Complex64;
use rayon::prelude::*;
use rug::Float;
use serde::Serialize;
use std::f64::consts::PI;

use crate::bigreal::TABLE_BITS;
use crate::coeff::{ab_theta_big, build_coeff_table, eval_hat_e, eval_script_e, CoeffTable};
use crate::domain::{map_point, PlanePoint, Params};
use crate::error::{domain, Error, Result};
use crate::lg::{bound_eta_k, bound_eta_table};
use crate::specfun::{bessel_i_scaled, bessel_j, bessel_k_scaled, elliptic_k, interval_prefactor};

/// Default radius of the excluded disk around z = 1 for the direct series.
pub const DELTA_EVAL: f64 = 1.0;
const SUP_SAMPLES: usize = 64;
const SUP_SAFETY: f64 = 1.1;
const CAUCHY_START: usize = 64;
const CAUCHY_MAX: usize = 4096;
const CAUCHY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    DirectSeries,
    RealIntervalSeries,
    CauchyDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    /// Path integrals evaluated by quadrature at the point itself.
    Certified,
    /// Suprema over the contour replaced by sampled maxima times a safety factor.
    SampledSupremum,
    /// Size of the first omitted term.
    NextTerm,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AbValue {
    pub a: Complex64,
    pub b: Complex64,
    pub method: Method,
    pub bound_a: f64,
    pub bound_b: f64,
    pub bound_kind: BoundKind,
    /// Trapezoid nodes used (Cauchy disk only).
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundedValue {
    pub value: f64,
    pub bound: f64,
    pub kind: BoundKind,
}

fn check_odd(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return domain(format!("truncation N must be odd and >= 3, got {n}"));
    }
    Ok(())
}

fn check_table(table: &CoeffTable, params: &Params, n: usize) -> Result<()> {
    if table.nu != params.nu {
        return domain(format!("table built for nu = {}, params have nu = {}", table.nu, params.nu));
    }
    if n > table.order {
        return domain(format!("N = {n} exceeds table order {}", table.order));
    }
    Ok(())
}

fn lgam(x: Float) -> Float {
    Float::with_val(TABLE_BITS, x.ln_gamma_ref())
}

/// Gamma(u+lambda) n! / (Gamma(u) Gamma(u+1)) exp(sum_{s<N} (-1)^{s+1} E~_s(1)/u^s).
pub fn trunc_prefactor(table: &CoeffTable, params: &Params, n: usize) -> f64 {
    let p = TABLE_BITS;
    let u = Float::with_val(p, params.u);
    let mut s = lgam(Float::with_val(p, &u + params.lambda));
    s += lgam(Float::with_val(p, params.n + 1));
    s -= lgam(u.clone());
    s -= lgam(Float::with_val(p, &u + 1u32));
    let mut upow = Float::with_val(p, 1);
    for k in 1..n {
        upow *= &u;
        let t = Float::with_val(p, &table.e_at_1[k - 1] / &upow);
        if k % 2 == 1 {
            s += t;
        } else {
            s -= t;
        }
    }
    s.exp().to_f64()
}

/// ln( sqrt(u pi) (lambda)_n / (2^nu n!) ).
fn ln_solution_const(params: &Params) -> f64 {
    let p = TABLE_BITS;
    let l = Float::with_val(p, params.lambda);
    let mut s = Float::with_val(p, params.u * PI).ln() / 2u32;
    s += lgam(Float::with_val(p, &l + params.n));
    s -= lgam(l);
    s -= lgam(Float::with_val(p, params.n + 1));
    s -= Float::with_val(p, params.nu) * Float::with_val(p, rug::float::Constant::Log2);
    s.to_f64()
}

/// Partial sums of the combined coefficients at one point.
#[derive(Debug, Clone, Copy)]
struct Sums {
    even: Complex64,
    odd: Complex64,
}

impl Sums {
    fn at(table: &CoeffTable, point: &PlanePoint, u: f64, n: usize, shifted: bool) -> Result<Self> {
        let mut even = Complex64::new(0.0, 0.0);
        let mut odd = Complex64::new(0.0, 0.0);
        for s in 1..n {
            let t = eval_script_e(table, s, point, shifted)? / u.powi(s as i32);
            if s % 2 == 0 {
                even += t;
            } else {
                odd += t;
            }
        }
        Ok(Sums { even, odd })
    }

    fn plus(&self) -> Complex64 {
        self.even + self.odd
    }

    fn minus(&self) -> Complex64 {
        self.even - self.odd
    }

    fn cosh_form(&self) -> Complex64 {
        self.even.exp() * self.odd.cosh()
    }

    fn sinh_form(&self) -> Complex64 {
        self.even.exp() * self.odd.sinh()
    }
}

/// A_N and B_N at a point of the closed upper half-plane.
fn truncated_upper(table: &CoeffTable, point: &PlanePoint, u: f64, n: usize) -> Result<(Complex64, Complex64)> {
    let sa = Sums::at(table, point, u, n, true)?;
    let sb = Sums::at(table, point, u, n, false)?;
    Ok((sa.cosh_form(), sb.sinh_form()))
}

/// The exp/cosh factor of A without the prefactor.
pub fn a_series_factor(params: &Params, z: Complex64, n: usize) -> Result<Complex64> {
    check_odd(n)?;
    let table = build_coeff_table(params.nu, n)?;
    let pt = map_point(z)?;
    Ok(Sums::at(&table, &pt, params.u, n, true)?.cosh_form())
}

pub fn ab_series(params: &Params, point: &PlanePoint, n: usize) -> Result<AbValue> {
    check_odd(n)?;
    let table = build_coeff_table(params.nu, n)?;
    ab_series_table(&table, params, point, n, DELTA_EVAL)
}

/// Direct series with bounds; `delta_eval` is the radius of the excluded disk around z = 1.
pub fn ab_series_table(
    table: &CoeffTable,
    params: &Params,
    point: &PlanePoint,
    n: usize,
    delta_eval: f64,
) -> Result<AbValue> {
    check_odd(n)?;
    check_table(table, params, n)?;
    if point.z.re < 0.0 {
        return domain(format!("Re z < 0 at {}", point.z));
    }
    if point.dist_to_one() < delta_eval {
        return Err(Error::Region(format!(
            "|z-1| = {} < {delta_eval}; use ab_cauchy",
            point.dist_to_one()
        )));
    }
    if point.z.im < 0.0 {
        let mirror = map_point(point.z.conj())?;
        let r = ab_series_table(table, params, &mirror, n, delta_eval)?;
        return Ok(AbValue {
            a: r.a.conj(),
            b: r.b.conj(),
            ..r
        });
    }
    let u = params.u;
    let sa = Sums::at(table, point, u, n, true)?;
    let sb = Sums::at(table, point, u, n, false)?;
    let beta = point.beta()?;
    let eta0 = bound_eta_table(table, u, beta, n, 0)?;
    let eta1 = bound_eta_table(table, u, beta, n, -1)?;
    let eps = |s: &Sums, nu_eff: f64| -> Result<f64> {
        let k0 = bound_eta_k(nu_eff, u, point.xi, n, 0)?;
        let k1 = bound_eta_k(nu_eff, u, point.xi, n, -1)?;
        Ok(0.5 * s.plus().exp().norm() * (eta0 + k1 + eta0 * k1)
            + 0.5 * s.minus().exp().norm() * (eta1 + k0 + eta1 * k0))
    };
    let p = trunc_prefactor(table, params, n);
    Ok(AbValue {
        a: p * sa.cosh_form(),
        b: p * sb.sinh_form(),
        method: Method::DirectSeries,
        bound_a: p * eps(&sa, params.nu + 1.0)?,
        bound_b: p * eps(&sb, params.nu)?,
        bound_kind: BoundKind::Certified,
        nodes: 0,
    })
}

/// Re-expanded real-interval functions: hat A = sum_{s<=N} A_s/u^{2s}, hat B = sum_{s<N} B_s/u^{2s+1}.
pub fn ab_hat_series(params: &Params, theta: f64, n: usize) -> Result<AbValue> {
    let table = build_coeff_table(params.nu, n.max(1))?;
    ab_hat_series_table(&table, params, theta, n)
}

pub fn ab_hat_series_table(table: &CoeffTable, params: &Params, theta: f64, n: usize) -> Result<AbValue> {
    if table.nu != params.nu {
        return domain(format!("table built for nu = {}, params have nu = {}", table.nu, params.nu));
    }
    let (ca, cb) = ab_theta_big(table, theta, n + 1, n + 1)?;
    let u = params.u;
    let u2 = u * u;
    let mut a = 0.0;
    let mut b = 0.0;
    let mut w = 1.0;
    for s in 0..=n {
        a += ca[s].to_f64() * w;
        if s < n {
            b += cb[s].to_f64() * w / u;
        }
        w /= u2;
    }
    let next_a = ca[n + 1].to_f64().abs() * w;
    let next_b = cb[n].to_f64().abs() * w * u;
    Ok(AbValue {
        a: Complex64::new(a, 0.0),
        b: Complex64::new(b, 0.0),
        method: Method::RealIntervalSeries,
        bound_a: next_a,
        bound_b: next_b,
        bound_kind: BoundKind::NextTerm,
        nodes: 0,
    })
}

/// exp(sum hat E_{2s}(nu+1)/u^{2s}) cos(sum hat E_{2s+1}(nu+1)/u^{2s+1}) and the matching
/// exp/sin form with nu, truncated like the direct series (N odd).
pub fn hat_exp_trig(params: &Params, theta: f64, n: usize) -> Result<(f64, f64)> {
    check_odd(n)?;
    let table = build_coeff_table(params.nu, n)?;
    let u = params.u;
    let sums = |shifted: bool| -> Result<(f64, f64)> {
        let (mut even, mut odd) = (0.0, 0.0);
        for s in 1..n {
            let t = eval_hat_e(&table, s, theta, shifted)? / u.powi(s as i32);
            if s % 2 == 0 {
                even += t;
            } else {
                odd += t;
            }
        }
        Ok((even, odd))
    };
    let (ea, oa) = sums(true)?;
    let (eb, ob) = sums(false)?;
    Ok((ea.exp() * oa.cos(), eb.exp() * ob.sin()))
}

/// l(z) = 4 K(k) / (|z-1| + 1), k = 2 sqrt|z-1| / (|z-1| + 1).
pub fn contour_length_factor(z: Complex64) -> Result<f64> {
    let d = (z - 1.0).norm();
    if d >= 1.0 {
        return domain(format!("l(z) needs |z-1| < 1, got {d}"));
    }
    let k = 2.0 * d.sqrt() / (d + 1.0);
    Ok(4.0 * elliptic_k(k)? / (d + 1.0))
}

/// Sampled suprema over the upper semicircle |t-1| = 1 and the resulting Cauchy-disk bounds.
#[derive(Debug, Clone, Serialize)]
pub struct CauchyBounds {
    pub params: Params,
    pub n: usize,
    pub prefactor: f64,
    /// M_N(nu+1, u) and M_N(nu, u).
    pub m_a: f64,
    pub m_b: f64,
    pub eta: f64,
    /// eta^(K)_N(nu+1, u) and eta^(K)_N(nu, u).
    pub eta_k_a: f64,
    pub eta_k_b: f64,
    /// min |xi| on the semicircle, used for the bound on B/xi.
    pub xi_min: f64,
    pub samples: usize,
}

impl CauchyBounds {
    /// Bound on |delta^(A)(u,z)|, not yet multiplied by the prefactor.
    pub fn delta_a(&self, z: Complex64) -> Result<f64> {
        let e = self.eta + self.eta_k_a + self.eta * self.eta_k_a;
        Ok(self.m_a * e * contour_length_factor(z)? / (2.0 * PI))
    }

    /// Bound on the error of the contour integral of B_N/xi.
    pub fn delta_b_over_xi(&self, z: Complex64) -> Result<f64> {
        let e = self.eta + self.eta_k_b + self.eta * self.eta_k_b;
        Ok(self.m_b * e * contour_length_factor(z)? / (2.0 * PI * self.xi_min))
    }

    pub fn bound_a(&self, z: Complex64) -> Result<f64> {
        Ok(self.prefactor * self.delta_a(z)?)
    }

    pub fn bound_b(&self, z: Complex64) -> Result<f64> {
        let xi = map_point(z)?.xi.norm();
        Ok(self.prefactor * xi * self.delta_b_over_xi(z)?)
    }
}

pub fn error_bounds_ab(params: &Params, n: usize) -> Result<CauchyBounds> {
    check_odd(n)?;
    let table = build_coeff_table(params.nu, n)?;
    error_bounds_ab_table(&table, params, n)
}

pub fn error_bounds_ab_table(table: &CoeffTable, params: &Params, n: usize) -> Result<CauchyBounds> {
    check_odd(n)?;
    check_table(table, params, n)?;
    let u = params.u;
    let rows: Vec<[f64; 6]> = (0..SUP_SAMPLES)
        .into_par_iter()
        .map(|k| -> Result<[f64; 6]> {
            let phi = PI * k as f64 / (SUP_SAMPLES - 1) as f64;
            let t = Complex64::new(1.0 + phi.cos(), phi.sin());
            let pt = map_point(t)?;
            let sa = Sums::at(table, &pt, u, n, true)?;
            let sb = Sums::at(table, &pt, u, n, false)?;
            let ma = sa.plus().exp().norm().max(sa.minus().exp().norm());
            let mb = sb.plus().exp().norm().max(sb.minus().exp().norm());
            let beta = pt.beta()?;
            let eta = bound_eta_table(table, u, beta, n, 0)?.max(bound_eta_table(table, u, beta, n, -1)?);
            let ka = bound_eta_k(params.nu + 1.0, u, pt.xi, n, 0)?
                .max(bound_eta_k(params.nu + 1.0, u, pt.xi, n, -1)?);
            let kb = bound_eta_k(params.nu, u, pt.xi, n, 0)?.max(bound_eta_k(params.nu, u, pt.xi, n, -1)?);
            Ok([ma, mb, eta, ka, kb, pt.xi.norm()])
        })
        .collect::<Result<Vec<_>>>()?;
    let sup = |i: usize| SUP_SAFETY * rows.iter().map(|r| r[i]).fold(0.0, f64::max);
    Ok(CauchyBounds {
        params: *params,
        n,
        prefactor: trunc_prefactor(table, params, n),
        m_a: sup(0),
        m_b: sup(1),
        eta: sup(2),
        eta_k_a: sup(3),
        eta_k_b: sup(4),
        xi_min: rows.iter().map(|r| r[5]).fold(f64::INFINITY, f64::min),
        samples: SUP_SAMPLES,
    })
}

/// Trapezoid sums of A_N/(t-z) and B_N/(xi (t-z)) over m nodes of |t-1| = 1.
fn cauchy_sums(table: &CoeffTable, u: f64, n: usize, z: Complex64, m: usize) -> Result<(Complex64, Complex64)> {
    let vals: Vec<(Complex64, Complex64)> = (0..m)
        .into_par_iter()
        .map(|k| -> Result<(Complex64, Complex64)> {
            let phi = 2.0 * PI * k as f64 / m as f64;
            let e = Complex64::from_polar(1.0, phi);
            let t = 1.0 + e;
            // upper half evaluated directly, lower half by Schwarz symmetry
            let lower = k > m / 2;
            let pt = map_point(if lower { t.conj() } else { t })?;
            let (mut a, b) = truncated_upper(table, &pt, u, n)?;
            let mut bq = b / pt.xi;
            if lower {
                a = a.conj();
                bq = bq.conj();
            }
            let w = e / (t - z);
            Ok((a * w, bq * w))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sa = Complex64::new(0.0, 0.0);
    let mut sb = Complex64::new(0.0, 0.0);
    for (a, b) in vals {
        sa += a;
        sb += b;
    }
    Ok((sa / m as f64, sb / m as f64))
}

pub fn ab_cauchy(params: &Params, z: Complex64, n: usize) -> Result<AbValue> {
    check_odd(n)?;
    let table = build_coeff_table(params.nu, n)?;
    let bounds = error_bounds_ab_table(&table, params, n)?;
    ab_cauchy_with(&table, &bounds, params, z, n)
}

/// Cauchy-disk evaluation reusing a table and precomputed contour bounds.
pub fn ab_cauchy_with(
    table: &CoeffTable,
    bounds: &CauchyBounds,
    params: &Params,
    z: Complex64,
    n: usize,
) -> Result<AbValue> {
    check_odd(n)?;
    check_table(table, params, n)?;
    if bounds.n != n || bounds.params != *params {
        return domain("contour bounds were computed for different parameters");
    }
    if !((z - 1.0).norm() < 1.0) {
        return Err(Error::Region(format!("ab_cauchy needs |z-1| < 1, got z = {z}")));
    }
    let u = params.u;
    let mut m = CAUCHY_START;
    let mut prev = cauchy_sums(table, u, n, z, m)?;
    loop {
        if m >= CAUCHY_MAX {
            return Err(Error::Convergence(format!(
                "contour trapezoid not settled at {m} nodes for z = {z}"
            )));
        }
        m *= 2;
        let cur = cauchy_sums(table, u, n, z, m)?;
        let scale = cur.0.norm().max(cur.1.norm());
        let diff = (cur.0 - prev.0).norm().max((cur.1 - prev.1).norm());
        prev = cur;
        if diff <= CAUCHY_TOL * scale {
            break;
        }
    }
    let xi = map_point(z)?.xi;
    let p = bounds.prefactor;
    Ok(AbValue {
        a: p * prev.0,
        b: p * xi * prev.1,
        method: Method::CauchyDisk,
        bound_a: bounds.bound_a(z)?,
        bound_b: p * xi.norm() * bounds.delta_b_over_xi(z)?,
        bound_kind: BoundKind::SampledSupremum,
        nodes: m,
    })
}

/// (2 lambda)_n / n!
pub fn value_at_one(params: &Params) -> f64 {
    let p = TABLE_BITS;
    let l2 = Float::with_val(p, 2.0 * params.lambda);
    let mut s = lgam(Float::with_val(p, &l2 + params.n));
    s -= lgam(l2);
    s -= lgam(Float::with_val(p, params.n + 1));
    s.exp().to_f64()
}

/// C_n^(lambda)(cos theta) on [0, pi/2] from the re-expanded series, with a fixed table.
#[derive(Debug)]
pub struct IntervalEvaluator {
    pub params: Params,
    pub n_terms: usize,
    table: CoeffTable,
    prefactor: f64,
    at_one: f64,
}

impl IntervalEvaluator {
    pub fn new(params: &Params, n_terms: usize) -> Result<Self> {
        Ok(IntervalEvaluator {
            params: *params,
            n_terms,
            table: build_coeff_table(params.nu, n_terms.max(1))?,
            prefactor: interval_prefactor(params),
            at_one: value_at_one(params),
        })
    }

    pub fn eval(&self, theta: f64) -> Result<BoundedValue> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return domain(format!("theta must lie in [0, pi/2], got {theta}"));
        }
        if theta == 0.0 {
            return Ok(BoundedValue {
                value: self.at_one,
                bound: 0.0,
                kind: BoundKind::Certified,
            });
        }
        let p = &self.params;
        let ab = ab_hat_series_table(&self.table, p, theta, self.n_terms)?;
        let x = p.u * theta;
        let j0 = bessel_j(p.nu, x)?;
        let j1 = bessel_j(p.nu + 1.0, x)?;
        let f = self.prefactor * theta.sqrt() / theta.sin().powf(p.lambda);
        Ok(BoundedValue {
            value: f * (j0 * ab.a.re - j1 * ab.b.re),
            bound: f * (j0.abs() * ab.bound_a + j1.abs() * ab.bound_b),
            kind: BoundKind::NextTerm,
        })
    }
}

pub fn eval_c_real(params: &Params, theta: f64, n_terms: usize) -> Result<BoundedValue> {
    IntervalEvaluator::new(params, n_terms)?.eval(theta)
}

/// C, D and D_{n,+-1} at a real point; the D family is only available for x > 1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AllSolutions {
    pub x: f64,
    pub c: BoundedValue,
    pub d: Option<BoundedValue>,
    pub d_plus: Option<Complex64>,
    pub d_minus: Option<Complex64>,
    pub ab: Option<AbValue>,
}

/// All solutions at real x >= 0. For x > 1 the series or Cauchy form of (A, B) is combined with
/// I and K at u xi; n is the odd truncation there, and the number of A_s terms on [0, 1).
pub fn eval_all_solutions(params: &Params, x: f64, n: usize) -> Result<AllSolutions> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("need finite real x >= 0, got {x}"));
    }
    if x == 1.0 {
        let c = BoundedValue {
            value: value_at_one(params),
            bound: 0.0,
            kind: BoundKind::Certified,
        };
        return Ok(AllSolutions { x, c, d: None, d_plus: None, d_minus: None, ab: None });
    }
    if x < 1.0 {
        let c = eval_c_real(params, x.acos(), n)?;
        return Ok(AllSolutions { x, c, d: None, d_plus: None, d_minus: None, ab: None });
    }
    let z = Complex64::new(x, 0.0);
    let pt = map_point(z)?;
    let ab = if x - 1.0 >= DELTA_EVAL {
        ab_series(params, &pt, n)?
    } else {
        ab_cauchy(params, z, n)?
    };
    let (a, b) = (ab.a.re, ab.b.re);
    let xi = pt.xi.re;
    let arg = params.u * xi;
    let common = ln_solution_const(params) + 0.5 * xi.ln() - (2.0 * params.nu + 1.0) / 4.0 * (x * x - 1.0).ln();
    let i0 = bessel_i_scaled(params.nu, arg)?;
    let i1 = bessel_i_scaled(params.nu + 1.0, arg)?;
    let k0 = bessel_k_scaled(params.nu, arg)?;
    let k1 = bessel_k_scaled(params.nu + 1.0, arg)?;
    let fc = (common + arg).exp();
    let fd = (common - arg).exp();
    if !fc.is_finite() {
        return Err(Error::Overflow(format!("C overflows at x = {x}, n = {}", params.n)));
    }
    let kind = ab.bound_kind;
    let c = BoundedValue {
        value: fc * (i0 * a + i1 * b),
        bound: fc * (i0 * ab.bound_a + i1 * ab.bound_b),
        kind,
    };
    let d = BoundedValue {
        value: fd * (k0 * a - k1 * b),
        bound: fd * (k0 * ab.bound_a + k1 * ab.bound_b),
        kind,
    };
    let rot = Complex64::from_polar(1.0, -params.nu * PI);
    let ipc = Complex64::new(0.0, PI * c.value);
    Ok(AllSolutions {
        x,
        c,
        d: Some(d),
        d_plus: Some(rot * d.value - ipc),
        d_minus: Some(rot.conj() * d.value + ipc),
        ab: Some(ab),
    })
}
