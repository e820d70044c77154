//! Nonexistence criteria and the common outcome record they produce.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub mod field_conditions;
pub mod lambda;
pub mod orbit;
pub mod radius2;
pub mod radius3;

pub use field_conditions::{field_check, field_check_with, theta, ThetaMode};
pub use lambda::{lambda_check, lambda_check_with, lambda_of, lambda_work, lambda_params, lambda_value, orbit_exponents, LambdaCertificate, LambdaParams};
pub use orbit::{orbit_check, orbit_check_r3, Classification, OrbitCandidate, OrbitSearch, R3Candidate, R3Search};
pub use radius2::{four_power_check, quadratic_preconditions, small_divisor_check, QuadraticPreconditions};
pub use radius3::{seven_divisor_check, trivial_solution_gate, GateResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionId {
    /// Solvability of a(x+1) + by = n - l over the prime divisors above 2n+1.
    FourPower,
    /// Prime divisors 5, 13, 17 of the radius-2 order.
    SmallDivisor,
    /// Degenerate gcd invariant of the 2- and p-power orbits.
    Lambda,
    /// Coefficient conditions on theta(x, y) over roots of unity.
    FieldConditions,
    /// Exhaustive character-orbit search modulo p.
    Orbit,
    /// Radius-3 test for n = 1, 5 (mod 7).
    SevenDivisor,
    /// Radius-3 orbit search over F_125.
    OrbitR3,
}

impl CriterionId {
    pub const ALL: [CriterionId; 7] = [
        CriterionId::FourPower,
        CriterionId::SmallDivisor,
        CriterionId::Lambda,
        CriterionId::FieldConditions,
        CriterionId::Orbit,
        CriterionId::SevenDivisor,
        CriterionId::OrbitR3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionId::FourPower => "four_power",
            CriterionId::SmallDivisor => "small_divisor",
            CriterionId::Lambda => "lambda",
            CriterionId::FieldConditions => "field_conditions",
            CriterionId::Orbit => "orbit",
            CriterionId::SevenDivisor => "seven_divisor",
            CriterionId::OrbitR3 => "orbit_r3",
        }
    }

    /// Radius the criterion is stated for.
    pub fn radius(self) -> u64 {
        match self {
            CriterionId::SevenDivisor | CriterionId::OrbitR3 => 3,
            _ => 2,
        }
    }

    pub fn parse(s: &str) -> Option<CriterionId> {
        CriterionId::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Soundness tier of an exclusion. `Unconditional` rests only on the
/// arithmetic done here; `FactorArgument` additionally relies on the
/// characteristic-zero argument that disposes of the quadratic (or trivial
/// cubic) factor solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Unconditional,
    FactorArgument,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Unconditional => "unconditional",
            Tier::FactorArgument => "factor_argument",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Status {
    Excluded(Tier),
    NotApplicable(String),
    Undecided,
    /// A resource cap was hit; the criterion was not evaluated.
    Skipped(String),
}

impl Status {
    pub fn is_excluded(&self) -> bool {
        matches!(self, Status::Excluded(_))
    }

    pub fn tier(&self) -> Option<Tier> {
        match self {
            Status::Excluded(t) => Some(*t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub criterion: CriterionId,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    pub certificate: serde_json::Value,
}

impl CriterionOutcome {
    pub fn new(criterion: CriterionId, status: Status) -> Self {
        CriterionOutcome { criterion, params: BTreeMap::new(), status, certificate: serde_json::Value::Null }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_certificate(mut self, certificate: serde_json::Value) -> Self {
        self.certificate = certificate;
        self
    }
}
