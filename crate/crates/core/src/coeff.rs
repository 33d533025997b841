//! Expansion coefficients: the beta-polynomials F~_s, E~_s, the Bessel exponent
//! coefficients a_s, and the real-interval coefficients A_s(theta), B_s(theta).

use std::sync::OnceLock;

use num_complex::Complex64;
use rug::Float;
use serde::Serialize;

use crate::bigreal::{self, BigReal, TABLE_BITS};
use crate::domain::PlanePoint;
use crate::error::{domain, Error, Result};

/// Largest user-facing truncation order.
pub const N_MAX: usize = 12;

/// Below this theta the A_s, B_s are evaluated from their Maclaurin series.
pub const THETA_MIN: f64 = 0.05;

/// Highest power of theta kept in the small-theta series.
const SERIES_POWERS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

#[derive(Debug, Clone)]
pub struct BetaPolynomial {
    pub coeffs: Vec<BigReal>,
    pub parity: Parity,
    approx: Vec<f64>,
}

impl BetaPolynomial {
    fn new(coeffs: Vec<BigReal>) -> Self {
        let approx: Vec<f64> = coeffs.iter().map(|c| c.to_f64()).collect();
        let scale = approx.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tiny = |k: usize| approx[k].abs() <= 1e-40 * scale;
        let parity = if (1..approx.len()).step_by(2).all(tiny) {
            Parity::Even
        } else if (0..approx.len()).step_by(2).all(tiny) {
            Parity::Odd
        } else {
            Parity::Mixed
        };
        BetaPolynomial {
            coeffs,
            parity,
            approx,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, b: Complex64) -> Complex64 {
        self.approx
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * b + c)
    }

    pub fn eval_real(&self, b: f64) -> f64 {
        self.approx.iter().rev().fold(0.0, |acc, &c| acc * b + c)
    }

    pub fn eval_big(&self, b: &BigReal) -> BigReal {
        let mut acc = Float::with_val(b.prec(), 0);
        for c in self.coeffs.iter().rev() {
            acc *= b;
            acc += c;
        }
        acc
    }

    pub fn coeffs_f64(&self) -> &[f64] {
        &self.approx
    }
}

/// Small-theta Maclaurin coefficients of A_s and B_s (index = power of theta).
#[derive(Debug)]
struct SmallTheta {
    a: Vec<Vec<BigReal>>,
    b: Vec<Vec<BigReal>>,
}

#[derive(Debug)]
pub struct CoeffTable {
    pub nu: f64,
    /// User-facing truncation order.
    pub n_terms: usize,
    /// Number of coefficient orders built (s = 1..=order).
    pub order: usize,
    pub ftilde: Vec<BetaPolynomial>,
    pub etilde: Vec<BetaPolynomial>,
    pub e_at_1: Vec<BigReal>,
    pub a: Vec<BigReal>,
    pub a_shift: Vec<BigReal>,
    small: OnceLock<std::result::Result<SmallTheta, String>>,
}

fn poly_mul(a: &[BigReal], b: &[BigReal]) -> Vec<BigReal> {
    let mut r: Vec<BigReal> = (0..a.len() + b.len() - 1)
        .map(|_| Float::with_val(TABLE_BITS, 0))
        .collect();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += Float::with_val(TABLE_BITS, x * y);
        }
    }
    r
}

/// a_1 = a_2 = (4 nu^2 - 1)/8, a_{s+1} = (s+1) a_s / 2 - (1/2) sum_{j=1}^{s-1} a_j a_{s-j}.
pub fn bessel_exponent_coeffs(nu: &BigReal, order: usize) -> Vec<BigReal> {
    let prec = nu.prec();
    let c: BigReal = (Float::with_val(prec, nu * nu) * 4u32 - 1u32) / 8u32;
    let mut a = vec![c.clone()];
    if order >= 2 {
        a.push(c);
    }
    for s in 2..order {
        let mut next = Float::with_val(prec, &a[s - 1] * (s as u32 + 1)) / 2;
        for j in 1..s {
            next -= Float::with_val(prec, &a[j - 1] * &a[s - j - 1]) / 2;
        }
        a.push(next);
    }
    a.truncate(order);
    a
}

/// Coefficient tables for truncation order `n_terms`, built to order 2*n_terms + 2.
pub fn build_coeff_table(nu: f64, n_terms: usize) -> Result<CoeffTable> {
    if !(1..=N_MAX).contains(&n_terms) {
        return domain(format!("N must lie in 1..={N_MAX}, got {n_terms}"));
    }
    build_coeff_table_order(nu, n_terms, 2 * n_terms + 2)
}

pub fn build_coeff_table_order(nu: f64, n_terms: usize, order: usize) -> Result<CoeffTable> {
    if !nu.is_finite() {
        return domain("nu must be finite");
    }
    let p = TABLE_BITS;
    let nub = Float::with_val(p, nu);
    let c: BigReal = (Float::with_val(p, &nub * &nub) * 4u32 - 1u32) / 8u32;
    let zero = || Float::with_val(p, 0);
    let neg = |x: &BigReal| Float::with_val(p, -x);

    let mut f: Vec<Vec<BigReal>> = vec![
        vec![neg(&c), zero(), c.clone()],
        vec![zero(), neg(&c), zero(), c.clone()],
    ];
    for s in 2..order {
        let fs = &f[s - 1];
        let deriv: Vec<BigReal> = (1..fs.len())
            .map(|i| Float::with_val(p, &fs[i] * i as u32))
            .collect();
        let b2m1 = vec![Float::with_val(p, -1), zero(), Float::with_val(p, 1)];
        let mut next: Vec<BigReal> = poly_mul(&b2m1, &deriv)
            .into_iter()
            .map(|x| x / 2)
            .collect();
        for j in 1..s {
            let prod = poly_mul(&f[j - 1], &f[s - j - 1]);
            for (k, v) in prod.into_iter().enumerate() {
                next[k] -= v / 2;
            }
        }
        f.push(next);
    }
    f.truncate(order);

    let mut etilde = Vec::with_capacity(order);
    for (s, fs) in f.iter().enumerate() {
        let d = fs.len() - 1;
        let scale = fs
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(1e-300f64, f64::max);
        // synthetic division by b^2 - 1: f_k = q_{k-2} - q_k
        let mut q: Vec<BigReal> = (0..d - 1).map(|_| zero()).collect();
        for k in (0..d - 1).rev() {
            let above = if k + 2 < d - 1 { q[k + 2].clone() } else { zero() };
            q[k] = Float::with_val(p, &fs[k + 2] + &above);
        }
        let r0 = Float::with_val(p, &fs[0] + &q[0]).to_f64().abs();
        let r1 = if d >= 3 {
            Float::with_val(p, &fs[1] + &q[1]).to_f64().abs()
        } else {
            fs[1].to_f64().abs()
        };
        if r0.max(r1) > 1e-30 * scale {
            return Err(Error::Precision(format!(
                "F~_{} not divisible by b^2-1 (remainder {:e})",
                s + 1,
                r0.max(r1)
            )));
        }
        let mut e = vec![zero()];
        for (k, qk) in q.iter().enumerate() {
            e.push(Float::with_val(p, -qk) / (k as u32 + 1));
        }
        etilde.push(BetaPolynomial::new(e));
    }
    let ftilde: Vec<BetaPolynomial> = f.into_iter().map(BetaPolynomial::new).collect();
    let one = Float::with_val(p, 1);
    let e_at_1: Vec<BigReal> = etilde.iter().map(|e| e.eval_big(&one)).collect();
    let a = bessel_exponent_coeffs(&nub, order);
    let a_shift = bessel_exponent_coeffs(&Float::with_val(p, &nub + 1), order);

    let finite = ftilde
        .iter()
        .chain(etilde.iter())
        .flat_map(|b| b.approx.iter().copied())
        .chain(a.iter().chain(a_shift.iter()).map(|x| x.to_f64()))
        .all(f64::is_finite);
    if !finite {
        return Err(Error::Overflow(format!(
            "coefficients overflow double range at nu={nu}, order={order}"
        )));
    }
    Ok(CoeffTable {
        nu,
        n_terms,
        order,
        ftilde,
        etilde,
        e_at_1,
        a,
        a_shift,
        small: OnceLock::new(),
    })
}

impl CoeffTable {
    fn check_order(&self, s: usize) -> Result<()> {
        if s == 0 || s > self.order {
            return domain(format!("coefficient order {s} outside 1..={}", self.order));
        }
        Ok(())
    }

    pub fn a_coeff(&self, s: usize, shifted: bool) -> &BigReal {
        if shifted {
            &self.a_shift[s - 1]
        } else {
            &self.a[s - 1]
        }
    }

    pub fn etilde_at(&self, s: usize, beta: Complex64) -> Complex64 {
        self.etilde[s - 1].eval(beta)
    }

    pub fn e_at_1_f64(&self, s: usize) -> f64 {
        self.e_at_1[s - 1].to_f64()
    }

    /// Signed constant of the xi-power term in the real-interval coefficient of order m.
    fn hat_pole_coeff(&self, m: usize, shifted: bool) -> BigReal {
        let a = self.a_coeff(m, shifted);
        let r = Float::with_val(TABLE_BITS, a / m as u32);
        if (m / 2).is_multiple_of(2) {
            -r
        } else {
            r
        }
    }

    /// Sign applied to the beta^k coefficient after substituting beta = i cot(theta).
    fn hat_sign(m: usize, k: usize) -> i32 {
        let e = if m.is_multiple_of(2) { k / 2 } else { k.div_ceil(2) };
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Real-interval coefficient at theta, in table precision.
    pub fn hat_e_big(&self, m: usize, cot: &BigReal, theta: &BigReal, shifted: bool) -> BigReal {
        let prec = cot.prec();
        let mut acc = Float::with_val(prec, 0);
        let mut pw = Float::with_val(prec, 1);
        for (k, c) in self.etilde[m - 1].coeffs.iter().enumerate() {
            if k > 0 {
                pw *= cot;
            }
            if c.is_zero() {
                continue;
            }
            let t = Float::with_val(prec, c * &pw);
            if Self::hat_sign(m, k) > 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        let th = Float::with_val(prec, bigreal::powi(theta, m as i32));
        acc + self.hat_pole_coeff(m, shifted) / th
    }

    /// Maclaurin coefficients (powers 0..=40 of theta) of A_s, s >= 1, and B_s, s >= 0.
    pub fn maclaurin_ab(&self) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let st = self.small_theta()?;
        let conv = |v: &Vec<Vec<BigReal>>| {
            v.iter()
                .map(|c| c.iter().map(|x| x.to_f64()).collect())
                .collect()
        };
        Ok((conv(&st.a), conv(&st.b)))
    }

    fn small_theta(&self) -> Result<&SmallTheta> {
        self.small
            .get_or_init(|| build_small_theta(self))
            .as_ref()
            .map_err(|e| Error::Precision(e.clone()))
    }
}

/// Combined coefficient E~_s(beta) + (-1)^{s+1} a_s / (s xi^s).
pub fn eval_script_e(
    table: &CoeffTable,
    s: usize,
    point: &PlanePoint,
    shifted: bool,
) -> Result<Complex64> {
    table.check_order(s)?;
    if point.xi.norm() == 0.0 {
        return Err(Error::Pole("xi = 0 at z = 1".into()));
    }
    let beta = point.beta()?;
    let a = table.a_coeff(s, shifted).to_f64();
    let sign = if s % 2 == 1 { 1.0 } else { -1.0 };
    Ok(table.etilde_at(s, beta) + sign * a / (s as f64 * point.xi.powi(s as i32)))
}

/// Real-interval coefficient hat-E_s(nu, theta).
pub fn eval_hat_e(table: &CoeffTable, s: usize, theta: f64, shifted: bool) -> Result<f64> {
    table.check_order(s)?;
    if theta == 0.0 {
        return Err(Error::Pole("theta = 0".into()));
    }
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2 + 1e-15) {
        return domain(format!("theta must lie in (0, pi/2], got {theta}"));
    }
    let th = Float::with_val(TABLE_BITS, theta);
    let cot = Float::with_val(TABLE_BITS, th.tan_ref()).recip();
    Ok(table.hat_e_big(s, &cot, &th, shifted).to_f64())
}

fn iota_sign(m: usize, j: usize) -> bool {
    !(m.is_multiple_of(2) && j % 2 == 1)
}

/// Run the product recursion R_m = e_m + (1/m) sum_j iota j e_j R_{m-j} on plain values.
fn recurse_values(e: &[BigReal]) -> Vec<BigReal> {
    let prec = e[0].prec();
    let mut r: Vec<BigReal> = Vec::with_capacity(e.len());
    for m in 1..=e.len() {
        let mut sum = Float::with_val(prec, 0);
        for j in 1..m {
            let t = Float::with_val(prec, &e[j - 1] * &r[m - j - 1]) * j as u32;
            if iota_sign(m, j) {
                sum += t;
            } else {
                sum -= t;
            }
        }
        r.push(Float::with_val(prec, &e[m - 1] + sum / m as u32));
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMethod {
    /// Maclaurin series below `THETA_MIN`, direct recursion above.
    Auto,
    Direct,
    Series,
}

/// A_s(theta) for s = 0..=n_a and B_s(theta) for s = 0..n_b, in table precision.
pub fn ab_theta_big(
    table: &CoeffTable,
    theta: f64,
    n_a: usize,
    n_b: usize,
) -> Result<(Vec<BigReal>, Vec<BigReal>)> {
    ab_theta_with(table, theta, n_a, n_b, ThetaMethod::Auto)
}

pub fn ab_theta_with(
    table: &CoeffTable,
    theta: f64,
    n_a: usize,
    n_b: usize,
    method: ThetaMethod,
) -> Result<(Vec<BigReal>, Vec<BigReal>)> {
    let need = (2 * n_a).max(2 * n_b.saturating_sub(1) + 1).max(1);
    if need > table.order {
        return domain(format!(
            "table order {} too small for {n_a} A-terms and {n_b} B-terms",
            table.order
        ));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&theta) {
        return domain(format!("theta must lie in [0, pi/2], got {theta}"));
    }
    let use_series = match method {
        ThetaMethod::Auto => theta < THETA_MIN,
        ThetaMethod::Direct => false,
        ThetaMethod::Series => true,
    };
    if use_series {
        let st = table.small_theta()?;
        let th = Float::with_val(TABLE_BITS, theta);
        let horner = |c: &Vec<BigReal>| {
            let mut acc = Float::with_val(TABLE_BITS, 0);
            for x in c.iter().rev() {
                acc *= &th;
                acc += x;
            }
            acc
        };
        let mut a = vec![Float::with_val(TABLE_BITS, 1)];
        a.extend(st.a.iter().take(n_a).map(horner));
        let b = st.b.iter().take(n_b).map(horner).collect();
        return Ok((a, b));
    }
    if theta == 0.0 {
        return Err(Error::Pole("direct recursion at theta = 0".into()));
    }
    let th = Float::with_val(TABLE_BITS, theta);
    let cot = Float::with_val(TABLE_BITS, th.tan_ref()).recip();
    let ea: Vec<BigReal> = (1..=need).map(|m| table.hat_e_big(m, &cot, &th, true)).collect();
    let eb: Vec<BigReal> = (1..=need).map(|m| table.hat_e_big(m, &cot, &th, false)).collect();
    let ra = recurse_values(&ea);
    let rb = recurse_values(&eb);
    let mut a = vec![Float::with_val(TABLE_BITS, 1)];
    a.extend((1..=n_a).map(|s| ra[2 * s - 1].clone()));
    let b = (0..n_b).map(|s| rb[2 * s].clone()).collect();
    Ok((a, b))
}

/// A_s(theta), s = 0..=N, and B_s(theta), s = 0..N, rounded to double.
pub fn build_ab_theta(table: &CoeffTable, theta: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (a, b) = ab_theta_big(table, theta, n, n)?;
    Ok((
        a.iter().map(|x| x.to_f64()).collect(),
        b.iter().map(|x| x.to_f64()).collect(),
    ))
}

/// Truncated Laurent series in theta: coefficient of theta^(lo + i) at index i.
#[derive(Clone)]
struct Laurent {
    lo: i32,
    c: Vec<BigReal>,
}

impl Laurent {
    fn zero(lo: i32, hi: i32) -> Self {
        Laurent {
            lo,
            c: (lo..=hi).map(|_| Float::with_val(TABLE_BITS, 0)).collect(),
        }
    }

    fn hi(&self) -> i32 {
        self.lo + self.c.len() as i32 - 1
    }

    fn get(&self, p: i32) -> Option<&BigReal> {
        if p < self.lo || p > self.hi() {
            None
        } else {
            Some(&self.c[(p - self.lo) as usize])
        }
    }

    fn mul(&self, other: &Laurent, hi: i32) -> Laurent {
        let lo = self.lo + other.lo;
        let mut r = Laurent::zero(lo, hi.max(lo));
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let pi = self.lo + i as i32;
            for (j, y) in other.c.iter().enumerate() {
                let p = pi + other.lo + j as i32;
                if p > hi {
                    break;
                }
                r.c[(p - lo) as usize] += Float::with_val(TABLE_BITS, x * y);
            }
        }
        r
    }

    fn add_scaled(&mut self, other: &Laurent, scale: &BigReal) {
        for (j, y) in other.c.iter().enumerate() {
            let p = other.lo + j as i32;
            if p < self.lo || p > self.hi() {
                continue;
            }
            let idx = (p - self.lo) as usize;
            self.c[idx] += Float::with_val(TABLE_BITS, y * scale);
        }
    }
}

/// theta cot(theta) = cos(theta) / (sin(theta)/theta) as a power series up to theta^hi.
fn theta_cot_series(hi: usize) -> Vec<BigReal> {
    let p = TABLE_BITS;
    let half = hi / 2 + 1;
    let mut cosc = Vec::with_capacity(half);
    let mut sinc = Vec::with_capacity(half);
    let mut fact = Float::with_val(p, 1);
    for k in 0..half {
        if k > 0 {
            fact *= (2 * k - 1) as u32;
            fact *= (2 * k) as u32;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let cv = Float::with_val(p, sign) / &fact;
        let sv = Float::with_val(p, &cv) / (2 * k + 1) as u32;
        cosc.push(cv);
        sinc.push(sv);
    }
    let mut q: Vec<BigReal> = Vec::with_capacity(half);
    for k in 0..half {
        let mut v = cosc[k].clone();
        for j in 1..=k {
            v -= Float::with_val(p, &sinc[j] * &q[k - j]);
        }
        q.push(v);
    }
    let mut out: Vec<BigReal> = (0..=hi).map(|_| Float::with_val(p, 0)).collect();
    for (k, v) in q.into_iter().enumerate() {
        if 2 * k <= hi {
            out[2 * k] = v;
        }
    }
    out
}

fn build_small_theta(table: &CoeffTable) -> std::result::Result<SmallTheta, String> {
    let order = table.order;
    let t0 = (SERIES_POWERS + order) as i32;
    let p_hi = t0 as usize + order;
    let pser = Laurent {
        lo: 0,
        c: theta_cot_series(p_hi),
    };
    // cot^k = theta^{-k} (theta cot theta)^k
    let mut powers = vec![Laurent {
        lo: 0,
        c: {
            let mut v = vec![Float::with_val(TABLE_BITS, 1)];
            v.extend((1..=p_hi).map(|_| Float::with_val(TABLE_BITS, 0)));
            v
        },
    }];
    for k in 1..=order {
        let next = powers[k - 1].mul(&pser, p_hi as i32);
        powers.push(next);
    }
    let hat = |m: usize, shifted: bool| -> Laurent {
        let mut s = Laurent::zero(-(m as i32), t0);
        for (k, c) in table.etilde[m - 1].coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut scaled = c.clone();
            if CoeffTable::hat_sign(m, k) < 0 {
                scaled = -scaled;
            }
            let shifted_pow = Laurent {
                lo: -(k as i32),
                c: powers[k].c.clone(),
            };
            s.add_scaled(&shifted_pow, &scaled);
        }
        let pole = table.hat_pole_coeff(m, shifted);
        s.c[0] += pole;
        s
    };
    let recurse = |shifted: bool| -> Vec<Laurent> {
        let e: Vec<Laurent> = (1..=order).map(|m| hat(m, shifted)).collect();
        let mut r: Vec<Laurent> = Vec::with_capacity(order);
        for m in 1..=order {
            let mut acc = e[m - 1].clone();
            for j in 1..m {
                let prod = e[j - 1].mul(&r[m - j - 1], t0);
                let mut w = Float::with_val(TABLE_BITS, j as u32) / m as u32;
                if !iota_sign(m, j) {
                    w = -w;
                }
                acc.add_scaled(&prod, &w);
            }
            r.push(acc);
        }
        r
    };
    let extract = |r: &Laurent, label: &str| -> std::result::Result<Vec<BigReal>, String> {
        let scale = r
            .c
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(1.0f64, f64::max);
        for p in r.lo..0 {
            let v = r.get(p).map(|x| x.to_f64().abs()).unwrap_or(0.0);
            if v > 1e-40 * scale {
                return Err(format!(
                    "{label}: theta^{p} coefficient {v:e} did not cancel"
                ));
            }
        }
        Ok((0..=SERIES_POWERS as i32)
            .map(|p| {
                r.get(p)
                    .cloned()
                    .unwrap_or_else(|| Float::with_val(TABLE_BITS, 0))
            })
            .collect())
    };
    let ra = recurse(true);
    let rb = recurse(false);
    let mut a = Vec::new();
    let mut s = 1;
    while 2 * s <= order {
        a.push(extract(&ra[2 * s - 1], &format!("A_{s}"))?);
        s += 1;
    }
    let mut b = Vec::new();
    let mut s = 0;
    while 2 * s < order {
        b.push(extract(&rb[2 * s], &format!("B_{s}"))?);
        s += 1;
    }
    Ok(SmallTheta { a, b })
}

#[derive(Serialize)]
struct TableDump {
    nu: f64,
    order: usize,
    ftilde: Vec<Vec<String>>,
    etilde: Vec<Vec<String>>,
    e_at_1: Vec<String>,
    a: Vec<String>,
    a_shift: Vec<String>,
}

/// JSON dump of a table as arrays of decimal strings.
pub fn dump_json(table: &CoeffTable, digits: u32) -> String {
    let s = |x: &BigReal| bigreal::to_decimal(x, digits);
    let polys = |v: &[BetaPolynomial]| v.iter().map(|p| p.coeffs.iter().map(s).collect()).collect();
    let dump = TableDump {
        nu: table.nu,
        order: table.order,
        ftilde: polys(&table.ftilde),
        etilde: polys(&table.etilde),
        e_at_1: table.e_at_1.iter().map(s).collect(),
        a: table.a.iter().map(s).collect(),
        a_shift: table.a_shift.iter().map(s).collect(),
    };
    serde_json::to_string_pretty(&dump).expect("table dump serializes")
}
