//! Photon number states through a beam splitter.
//!
//! Port photon numbers map onto spin numbers as `two_j = c + d` and
//! `two_m = c - d`; the transmittance is `τ = cos²(θ/2)` with
//! `θ = π·b_map/n`. Everything internal stays on the `(n, b_map)` grid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sgmodel::{self, LCondition, Mode, ModelQuery, OutcomeRow, ProbabilityTable};
use crate::wignerqm::{wigner_d_squared, WignerQuery};

/// `cos²(b_map·π/(2n))`, exact at both ends of the grid.
pub fn tau_from_bmap(n: u32, b_map: u32) -> Result<f64> {
    if n == 0 || b_map > n {
        return Err(Error::domain(format!(
            "grid point b_map = {b_map} outside [0, {n}]"
        )));
    }
    if b_map == 0 {
        return Ok(1.0);
    }
    if b_map == n {
        return Ok(0.0);
    }
    let c = (std::f64::consts::PI * f64::from(b_map) / (2.0 * f64::from(n))).cos();
    Ok(c * c)
}

/// Nearest grid point to `tau`, provided it lies within `tolerance`. Ties go
/// to the smaller `b_map`.
pub fn bmap_from_tau(n: u32, tau: f64, tolerance: f64) -> Result<u32> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::domain(format!("tau = {tau} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let mut best = (0u32, f64::INFINITY);
    for b in 0..=n {
        let err = (tau_from_bmap(n, b)? - tau).abs();
        if err < best.1 {
            best = (b, err);
        }
    }
    if best.1 > tolerance {
        return Err(Error::NoGridPoint { n, tau, tolerance });
    }
    Ok(best.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PhotonQuery {
    pub n: u32,
    pub c_a1: u32,
    pub d_a1: u32,
    pub b_map: u32,
    pub mode: Mode,
    pub l_condition: LCondition,
}

impl PhotonQuery {
    /// Query with the default mode for `c_a1 + d_a1` photons.
    pub fn new(n: u32, c_a1: u32, d_a1: u32, b_map: u32) -> Result<Self> {
        let q = PhotonQuery {
            n,
            c_a1,
            d_a1,
            b_map,
            mode: Mode::default_for(c_a1 + d_a1),
            l_condition: LCondition::SumAll,
        };
        q.to_model_query()?;
        Ok(q)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_l_condition(mut self, l_condition: LCondition) -> Self {
        self.l_condition = l_condition;
        self
    }

    pub fn photons(&self) -> u32 {
        self.c_a1 + self.d_a1
    }

    pub fn to_model_query(&self) -> Result<ModelQuery> {
        if self.photons() > self.n {
            return Err(Error::domain(format!(
                "c_a1 + d_a1 = {} exceeds n = {}",
                self.photons(),
                self.n
            )));
        }
        let q = ModelQuery {
            n: self.n,
            two_j: self.photons(),
            two_m_a1: self.c_a1 as i32 - self.d_a1 as i32,
            b_map: self.b_map,
            mode: self.mode,
            l_condition: self.l_condition,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn tau(&self) -> Result<f64> {
        tau_from_bmap(self.n, self.b_map)
    }
}

/// Spin table re-keyed by output photon numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhotonTable {
    pub query: PhotonQuery,
    pub tau: f64,
    pub table: ProbabilityTable,
}

impl PhotonTable {
    /// `(c_b2, d_b2, row)` in ascending `c_b2`.
    pub fn rows(&self) -> impl Iterator<Item = (u32, u32, &OutcomeRow)> {
        let photons = self.query.photons() as i32;
        self.table.rows.iter().map(move |r| {
            let c = ((photons + r.two_m_b2) / 2) as u32;
            (c, photons as u32 - c, r)
        })
    }

    pub fn get(&self, c_b2: u32, d_b2: u32) -> Option<&OutcomeRow> {
        self.rows()
            .find(|&(c, d, _)| c == c_b2 && d == d_b2)
            .map(|(_, _, r)| r)
    }

    pub fn attach_qm_reference(&mut self) -> Result<()> {
        self.table.attach_qm_reference()
    }
}

/// Output-port probabilities from the counting model.
pub fn probability_bs(query: &PhotonQuery) -> Result<PhotonTable> {
    let table = sgmodel::probability(&query.to_model_query()?)?;
    Ok(PhotonTable {
        query: *query,
        tau: query.tau()?,
        table,
    })
}

/// QM probability of `(c_a1, d_a1) → (c_b2, ·)` at transmittance `tau`.
pub fn qm_reference_bs(c_a1: u32, d_a1: u32, c_b2: u32, tau: f64) -> Result<f64> {
    let photons = c_a1 + d_a1;
    if c_b2 > photons {
        return Err(Error::domain(format!(
            "c_b2 = {c_b2} exceeds the {photons} input photons"
        )));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::domain(format!("tau = {tau} outside [0, 1]")));
    }
    let d_b2 = photons - c_b2;
    let theta = 2.0 * tau.sqrt().acos();
    wigner_d_squared(&WignerQuery::new(
        photons,
        c_a1 as i32 - d_a1 as i32,
        c_b2 as i32 - d_b2 as i32,
        theta,
    )?)
}
