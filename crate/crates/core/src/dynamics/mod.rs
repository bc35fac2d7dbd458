//! Critical points, orbits, post-critical finiteness, critical-orbit
//! relations, factor counts of iterates and discriminants of iterates.

pub mod critical;
pub mod disc;
pub mod orbit;
pub mod stability;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{ExactError, ProjPoint, RatMap};
use crate::polyfactor::FactorError;

pub use critical::{critical_points, CriticalData};
pub use disc::{
    cubic_disc_identity, disc_iterate, disc_iterate_formula, disc_iterate_oracle, CubicIdentityCheck,
    DiscComparison, ORACLE_DEGREE_CAP,
};
pub use orbit::{orbit, orbit_with, EscapeBound, OrbitRecord, OrbitStatus};
pub use stability::{
    stability_report, LevelFactorization, StabilityLevel, StabilityReport, StabilityVerdict,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("map has degree {0}, need at least 2")]
    DegreeTooSmall(usize),
    #[error("critical points are not all rational (factor {factor})")]
    IrrationalCriticalPoints { factor: String },
    #[error("expected two distinct finite critical points, found {0}")]
    NotTwoCriticalPoints(usize),
    #[error("expected a polynomial map")]
    NotPolynomial,
    #[error("expected a monic cubic polynomial")]
    NotMonicCubic,
    #[error("level {0} is below the smallest admissible level")]
    LevelTooSmall(usize),
    #[error("degree of the iterate overflows")]
    TooLarge,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcfStatus {
    Pcf,
    NotPcf,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PcfReport {
    pub status: PcfStatus,
    pub orbits: Vec<OrbitRecord>,
}

/// Follow every critical point of P^1, including infinity when it is
/// critical, for at most `max_steps` steps.
pub fn is_pcf(f: &RatMap, max_steps: usize) -> Result<PcfReport, DynamicsError> {
    let crit = critical_points(f)?;
    let bound = EscapeBound::new(f);
    let orbits: Vec<OrbitRecord> = crit
        .all_points()
        .iter()
        .map(|c| orbit_with(f, &bound, c, max_steps))
        .collect();
    let status = if orbits.iter().any(|o| matches!(o.status, OrbitStatus::Escaping { .. })) {
        PcfStatus::NotPcf
    } else if orbits.iter().all(OrbitRecord::is_preperiodic) {
        PcfStatus::Pcf
    } else {
        PcfStatus::Unknown
    };
    Ok(PcfReport { status, orbits })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollisionReport {
    /// `[g1, g2]` in increasing order.
    pub critical_points: [ProjPoint; 2],
    /// Smallest `r >= 1` with `f^r(g1) = f^r(g2)`.
    pub aligned: Option<usize>,
    /// `f^i(g1) = f^j(g2)` with `i != j`, smallest `i + j` first, then smallest `i`.
    pub offset: Option<(usize, usize)>,
}

/// Relations between the two finite critical orbits up to step `r_max`.
pub fn collision(f: &RatMap, r_max: usize) -> Result<CollisionReport, DynamicsError> {
    let crit = critical_points(f)?;
    if crit.points.len() != 2 {
        return Err(DynamicsError::NotTwoCriticalPoints(crit.points.len()));
    }
    let g1 = ProjPoint::Finite(crit.points[0].clone());
    let g2 = ProjPoint::Finite(crit.points[1].clone());
    let a = orbit_values(f, &g1, r_max);
    let b = orbit_values(f, &g2, r_max);
    let aligned = (1..=r_max).find(|&r| a[r] == b[r]);
    let offset = (1..=2 * r_max)
        .flat_map(|s| (s.saturating_sub(r_max)..=s.min(r_max)).map(move |i| (i, s - i)))
        .find(|&(i, j)| i != j && a[i] == b[j]);
    Ok(CollisionReport {
        critical_points: [g1, g2],
        aligned,
        offset,
    })
}

fn orbit_values(f: &RatMap, x: &ProjPoint, n: usize) -> Vec<ProjPoint> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(x.clone());
    for k in 1..=n {
        let next = f.eval(&out[k - 1]);
        out.push(next);
    }
    out
}
