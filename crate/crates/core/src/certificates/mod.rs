//! Prime-valuation certificates of level maximality, obstructions to finite
//! index, and the assembled per-map verdict.
//!
//! Three certificate families are implemented:
//!
//! * monic quadratic polynomials: a prime dividing a factor of `f^L(g)` to
//!   exactly the first power and no earlier orbit value;
//! * monic cubic polynomials with two rational critical points: a prime of
//!   odd valuation in `f^n(g1)` that is a unit at `3`, `f^n(g2)` and all
//!   earlier critical-orbit values;
//! * quadratic rational maps: a prime of odd valuation in `P_n(g1) P_n(g2)`
//!   that avoids the leading coefficients, the resultant, the discriminant
//!   and the intermediate values `P_j(g_i)`.
//!
//! Each search first scans small primes with word-size modular orbits and
//! confirms candidates with exact p-adic valuations. When no small prime
//! works, a cofactor argument is tried on the exact value: after removing
//! every prime of the forbidden set, a cofactor that is not `±` a square has
//! a prime of odd valuation, and that prime satisfies all conditions.

mod cubic;
pub(crate) mod exact_route;
mod modp;
mod obstruction;
mod quad_poly;
pub(crate) mod ratmap;
mod report;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::number_theory::{FactorEffort, PadicConfig};
use crate::polyfactor::FactorConfig;

pub use cubic::certify_cubic_poly;
pub use obstruction::{detect_obstructions, Evidence, Obstruction, ObstructionKind, ObstructionScan};
pub use quad_poly::certify_quadratic_poly;
pub use ratmap::{certify_quadratic_ratmap, ratmap_forbidden_constants, RatmapHypotheses};
pub use report::{analyze, reverify, verdict, AnalysisReport, Conditionality, MapKind, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("expected a monic polynomial of degree {expected}, got {found}")]
    WrongShape { expected: usize, found: String },
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertConfig {
    pub n_max: usize,
    /// Largest prime tried by the modular scan.
    pub prime_bound: u64,
    pub factor: FactorConfig,
    pub padic: PadicConfig,
    /// Factoring effort for values whose certifying prime lies above the scan.
    pub effort: FactorEffort,
    /// Steps followed when classifying critical orbits and the orbit of 0.
    pub orbit_steps: usize,
    /// Exact values larger than this many bits are not built.
    pub value_bit_cap: u64,
    /// Iterates of larger degree are not tested for irreducibility.
    pub irreducibility_degree_cap: usize,
}

impl Default for CertConfig {
    fn default() -> Self {
        CertConfig {
            n_max: 6,
            prime_bound: 100_000,
            factor: FactorConfig::default(),
            padic: PadicConfig::default(),
            effort: FactorEffort::default(),
            orbit_steps: 64,
            value_bit_cap: 1 << 22,
            irreducibility_degree_cap: 1024,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Requirement {
    Zero,
    One,
    Odd,
    /// A property that must hold (irreducibility, non-squareness, coprimality).
    True,
    /// Recorded for information only.
    Report,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Observed {
    Valuation(i64),
    Flag(bool),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    pub required: Requirement,
    pub observed: Observed,
    pub holds: bool,
}

impl Condition {
    pub fn valuation(name: impl Into<String>, required: Requirement, v: i64) -> Condition {
        let holds = match required {
            Requirement::Zero => v == 0,
            Requirement::One => v == 1,
            Requirement::Odd => v % 2 != 0,
            Requirement::True => false,
            Requirement::Report => true,
        };
        Condition {
            name: name.into(),
            required,
            observed: Observed::Valuation(v),
            holds,
        }
    }

    pub fn flag(name: impl Into<String>, value: bool) -> Condition {
        Condition {
            name: name.into(),
            required: Requirement::True,
            observed: Observed::Flag(value),
            holds: value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMode {
    ExplicitPrime,
    NonSquareCofactor,
    /// Level 1 of a quadratic map: maximal exactly when the numerator is
    /// irreducible.
    Irreducibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    /// `[K_n : K_(n-1)] = 2^(2^(n-1))`.
    QuadPolyMax,
    /// `[K_n : K_(n-1)] = 6^(3^(n-1))`.
    CubicMax,
    /// `[K_n : K_(n-1)] = 2^(2^(n-1))`.
    QuadRatMax,
}

impl Conclusion {
    pub fn statement(self, n: usize) -> String {
        let (base, branch) = match self {
            Conclusion::QuadPolyMax | Conclusion::QuadRatMax => (2, 2),
            Conclusion::CubicMax => (6, 3),
        };
        format!("[K_{n}:K_{}] = {base}^({branch}^{})", n - 1, n - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub level: usize,
    pub mode: CertMode,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "crate::serde_util::opt_bigint")]
    pub prime: Option<BigInt>,
    /// The integer whose non-squareness yields the prime.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "crate::serde_util::opt_bigint")]
    pub cofactor: Option<BigInt>,
    /// Index into the sorted finite critical points of the map.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_point: Option<usize>,
    /// Index of the irreducible factor of `f^N` (quadratic polynomials).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<usize>,
    pub conditions: Vec<Condition>,
    pub conclusion: Conclusion,
    pub statement: String,
    /// Outcome of the exact-construction re-check, once run.
    pub reverified: Option<bool>,
}

impl Certificate {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelStatus {
    Certified,
    Gap,
    /// A certificate exists but a hypothesis (irreducibility of the iterate)
    /// could not be established.
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub n: usize,
    pub status: LevelStatus,
    pub certificates: Vec<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl LevelReport {
    pub fn gap(n: usize, note: impl Into<String>) -> LevelReport {
        LevelReport {
            n,
            status: LevelStatus::Gap,
            certificates: vec![],
            note: Some(note.into()),
        }
    }

    /// The prime of a single explicit certificate, if that is what this level holds.
    pub fn prime(&self) -> Option<&BigInt> {
        match self.certificates.as_slice() {
            [c] => c.prime.as_ref(),
            _ => None,
        }
    }
}
