//! Squared Wigner d-matrix elements, the quantum-mechanical baseline.
//!
//! `|d^j_{m',m}(θ)|²` is evaluated as the product of two single sums over the
//! summation index `q`. Each sum carries one of the two numerator pairs
//! `(j+m)!(j-m)!` and `(j+m')!(j-m')!`, so every combinatorial coefficient is
//! an exact integer: the same refinement ratio used for the event-space
//! cardinalities. Only the trigonometric powers are floating point.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::perm_ratio;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerQuery {
    pub two_j: u32,
    pub two_m: i32,
    pub two_mp: i32,
    /// Rotation angle in radians.
    pub theta: f64,
}

impl WignerQuery {
    pub fn new(two_j: u32, two_m: i32, two_mp: i32, theta: f64) -> Result<Self> {
        let q = WignerQuery {
            two_j,
            two_m,
            two_mp,
            theta,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        check_projections(self.two_j, self.two_m, self.two_mp)?;
        if !self.theta.is_finite() {
            return Err(Error::domain(format!(
                "theta must be finite, got {}",
                self.theta
            )));
        }
        Ok(())
    }
}

fn check_projections(two_j: u32, two_m: i32, two_mp: i32) -> Result<()> {
    let j = two_j as i32;
    for (name, m) in [("two_m", two_m), ("two_mp", two_mp)] {
        if m.abs() > j {
            return Err(Error::domain(format!(
                "|{name}| = {} exceeds two_j = {j}",
                m.abs()
            )));
        }
        if (j - m).rem_euclid(2) != 0 {
            return Err(Error::domain(format!(
                "{name} = {m} has the wrong parity for two_j = {j}"
            )));
        }
    }
    Ok(())
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// `|d^j_{m',m}(θ)|²`.
pub fn wigner_d_squared(query: &WignerQuery) -> Result<f64> {
    query.validate()?;
    let half = 0.5 * query.theta;
    d_squared(
        query.two_j,
        query.two_m,
        query.two_mp,
        half.cos(),
        half.sin(),
    )
}

/// `|d^j_{m',m}(θ)|²` at the grid angle `θ = π·b_map/n`. The endpoints
/// `b_map = 0` and `b_map = n` use exact half-angle cosines, so the result
/// there is exactly 0 or 1.
pub fn wigner_d_squared_on_grid(
    two_j: u32,
    two_m: i32,
    two_mp: i32,
    n: u32,
    b_map: u32,
) -> Result<f64> {
    check_projections(two_j, two_m, two_mp)?;
    if n == 0 || b_map > n {
        return Err(Error::domain(format!(
            "grid point b_map = {b_map} outside [0, {n}]"
        )));
    }
    let (c, s) = if b_map == 0 {
        (1.0, 0.0)
    } else if b_map == n {
        (0.0, 1.0)
    } else {
        let half = std::f64::consts::PI * f64::from(b_map) / (2.0 * f64::from(n));
        (half.cos(), half.sin())
    };
    d_squared(two_j, two_m, two_mp, c, s)
}

fn d_squared(two_j: u32, two_m: i32, two_mp: i32, cos_half: f64, sin_half: f64) -> Result<f64> {
    let j = i64::from(two_j);
    let (m, mp) = (i64::from(two_m), i64::from(two_mp));
    // Integer forms of j±m, j±m', m'-m.
    let jpm = (j + m) / 2;
    let jmm = (j - m) / 2;
    let jpmp = (j + mp) / 2;
    let jmmp = (j - mp) / 2;
    let dm = (mp - m) / 2;

    let q_lo = 0.max(-dm);
    let q_hi = jpm.min(jmmp);

    let mut alice = CompensatedSum::default();
    let mut bob = CompensatedSum::default();
    for q in q_lo..=q_hi {
        let den = [jpm - q, q, dm + q, jmmp - q].map(|x| x as usize);
        let sign = if (dm + q).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let cos_pow = (jpm + jmm - dm - 2 * q) as i32;
        let sin_pow = (dm + 2 * q) as i32;
        let trig = cos_half.powi(cos_pow) * sin_half.powi(sin_pow);

        let a = perm_ratio(&[jpm as usize, jmm as usize], &den)?;
        let b = perm_ratio(&[jpmp as usize, jmmp as usize], &den)?;
        alice.add(sign * a.to_f64().unwrap_or(f64::INFINITY) * trig);
        bob.add(sign * b.to_f64().unwrap_or(f64::INFINITY) * trig);
    }
    Ok(alice.value() * bob.value())
}
