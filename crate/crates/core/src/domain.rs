//! Parameters and the variable maps z -> beta, xi, theta.
//!
//! Branch conventions live here and nowhere else:
//! sqrt(z^2-1) = sqrt(z-1) sqrt(z+1) with principal roots (cut on [-1,1]),
//! and real x in [0,1) means the upper side x + i0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest lambda we document behavior for.
pub const LAMBDA_MAX: f64 = 100.0;

/// Below this |z-1| the xi map goes through the series for xi^2.
const NEAR_ONE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub lambda: f64,
    pub n: u32,
    pub nu: f64,
    pub u: f64,
}

impl Params {
    pub fn new(lambda: f64, n: u32) -> Result<Self> {
        make_params(lambda, n as i64)
    }
}

pub fn make_params(lambda: f64, n: i64) -> Result<Params> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    if lambda > LAMBDA_MAX {
        return domain(format!("lambda {lambda} exceeds supported maximum {LAMBDA_MAX}"));
    }
    if n < 0 || n > u32::MAX as i64 {
        return domain(format!("degree must be a nonnegative integer, got {n}"));
    }
    Ok(Params {
        lambda,
        n: n as u32,
        nu: lambda - 0.5,
        u: lambda + n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    RealInterval01,
    RightHalfPlane,
    DiskAroundOne,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub z: Complex64,
    pub region: Region,
    /// sqrt(z^2 - 1) on the principal branch.
    pub root: Complex64,
    pub xi: Complex64,
    /// `None` at z = +-1.
    pub beta: Option<Complex64>,
    pub theta: Option<f64>,
}

impl PlanePoint {
    pub fn zeta(&self) -> Complex64 {
        self.xi * self.xi
    }

    pub fn beta(&self) -> Result<Complex64> {
        self.beta
            .ok_or_else(|| Error::Branch(format!("beta has a pole at z = {}", self.z)))
    }

    pub fn dist_to_one(&self) -> f64 {
        (self.z - 1.0).norm()
    }

    /// ln(z^2 - 1) on the branch ln(z-1) + ln(z+1).
    pub fn ln_z2m1(&self) -> Complex64 {
        (self.z - 1.0).ln() + (self.z + 1.0).ln()
    }
}

/// xi^2 = 2 sum_{k>=1} (-1)^{k+1} (2w)^k / (k^2 binom(2k,k)), w = z - 1.
fn zeta_series(w: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut binom = 1.0_f64;
    for k in 1..200u32 {
        let kf = k as f64;
        pow *= 2.0 * w;
        binom *= (2.0 * kf) * (2.0 * kf - 1.0) / (kf * kf);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = pow * (sign * 2.0 / (kf * kf * binom));
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

fn classify(z: Complex64) -> Region {
    if z.im == 0.0 && z.re >= 0.0 && z.re < 1.0 {
        Region::RealInterval01
    } else if (z - 1.0).norm() < 1.0 {
        Region::DiskAroundOne
    } else {
        Region::RightHalfPlane
    }
}

/// Map a point of the closed right half-plane. Real x in (-1,1) is taken on the upper side.
pub fn map_point(z: Complex64) -> Result<PlanePoint> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain(format!("non-finite point {z}"));
    }
    if z.re < 0.0 {
        return domain(format!("Re z < 0 at {z}; use reflect_negative"));
    }
    let on_cut = z.im == 0.0 && z.re.abs() < 1.0;
    let root = if on_cut {
        Complex64::new(0.0, (1.0 - z.re * z.re).sqrt())
    } else {
        (z - 1.0).sqrt() * (z + 1.0).sqrt()
    };
    let w = z - 1.0;
    let xi = if on_cut {
        Complex64::new(0.0, z.re.acos())
    } else if w.norm() < NEAR_ONE {
        // principal sqrt of xi^2; sign fixed to agree with ln(z + root)
        let r = zeta_series(w).sqrt();
        let reference = (z + root).ln();
        if (r - reference).norm() <= (r + reference).norm() {
            r
        } else {
            -r
        }
    } else {
        (z + root).ln()
    };
    let beta = if root.norm() == 0.0 { None } else { Some(z / root) };
    let theta = if on_cut { Some(z.re.acos()) } else { None };
    Ok(PlanePoint {
        z,
        region: classify(z),
        root,
        xi,
        beta,
        theta,
    })
}

/// theta = arccos x for x in [0,1).
pub fn map_theta(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return domain(format!("map_theta needs 0 <= x < 1, got {x}"));
    }
    Ok(x.acos())
}

/// Point z = cos(theta) + i0 with exact beta = -i cot(theta) and xi = i theta.
pub fn point_from_theta(theta: f64) -> Result<PlanePoint> {
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return domain(format!("theta must lie in (0, pi/2], got {theta}"));
    }
    let z = Complex64::new(theta.cos(), 0.0);
    Ok(PlanePoint {
        z,
        region: Region::RealInterval01,
        root: Complex64::new(0.0, theta.sin()),
        xi: Complex64::new(0.0, theta),
        beta: Some(Complex64::new(0.0, -1.0 / theta.tan())),
        theta: Some(theta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    /// Multiplier applied to the value at the reflected point.
    pub factor: Complex64,
    /// The point -z in the right half-plane.
    pub reflected: Complex64,
}

/// Left half-plane values from right half-plane ones:
/// C(-z) = (-1)^n C(z) and D(z e^{+-pi i}) = (-1)^{n+1} e^{-+2 nu pi i} D(z) (upper sign for Im z >= 0
/// of the reflected point).
pub fn reflect_negative(params: &Params, z: Complex64, which: Which) -> Result<Reflection> {
    if z.re >= 0.0 {
        return domain(format!("reflect_negative needs Re z < 0, got {z}"));
    }
    let w = -z;
    let parity = if params.n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let factor = match which {
        Which::C => Complex64::new(parity, 0.0),
        Which::D => {
            // z = w e^{+pi i} when w lies in the lower half-plane (z upper), else w e^{-pi i}
            let upper = z.im >= 0.0;
            let phase = if upper { -2.0 } else { 2.0 } * params.nu * std::f64::consts::PI;
            Complex64::from_polar(-parity, phase)
        }
    };
    Ok(Reflection {
        factor,
        reflected: w,
    })
}
