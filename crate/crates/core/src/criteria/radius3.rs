//! Radius-3 arithmetic: when a constant projection onto C_v is possible, and
//! the divisor-7 test for n = 1, 5 (mod 7).

use serde_json::json;

use super::{CriterionId, CriterionOutcome, Status, Tier};
use crate::integer::square_root_u64;
use crate::lee::group_order_r3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateResult {
    Pass,
    NotApplicable(String),
}

/// The constant projection a + b G/H solves the projected cubic identity
/// when v | 2n+1, or when 24n+1 = c^2 with 12v | c^2 +- 6c + 29. In those
/// cases projecting onto C_v cannot rule anything out.
pub fn trivial_solution_gate(n: u64, v: u64) -> GateResult {
    if (2 * n + 1).is_multiple_of(v) {
        return GateResult::NotApplicable("v divides 2n+1".into());
    }
    if let Some(c) = square_root_u64(24 * n + 1) {
        let (plus, minus) = shifted_squares(c);
        if plus % (12 * v) == 0 || minus % (12 * v) == 0 {
            return GateResult::NotApplicable("square branch".into());
        }
    }
    GateResult::Pass
}

/// (c^2 + 6c + 29, c^2 - 6c + 29); the second is positive for every c.
fn shifted_squares(c: u64) -> (u64, u64) {
    (c * c + 6 * c + 29, c * c + 29 - 6 * c)
}

pub fn seven_divisor_check(n: u64) -> CriterionOutcome {
    let order = group_order_r3(n);
    let residue = n % 7;
    if residue != 1 && residue != 5 {
        return CriterionOutcome::new(CriterionId::SevenDivisor, Status::NotApplicable("n is not 1 or 5 mod 7".into()))
            .with_certificate(json!({ "order": order, "n_mod_7": residue }));
    }
    debug_assert_eq!(order % 7, 0);
    let Some(c) = square_root_u64(24 * n + 1) else {
        return CriterionOutcome::new(CriterionId::SevenDivisor, Status::Excluded(Tier::Unconditional))
            .param("v", 7)
            .with_certificate(json!({ "order": order, "v": 7, "c": null, "reading": "24n+1 is not a square" }));
    };
    let (plus, minus) = shifted_squares(c);
    let (plus_hit, minus_hit) = (plus % 84 == 0, minus % 84 == 0);
    let certificate = json!({
        "order": order,
        "v": 7,
        "c": c,
        "divides_c2_plus_6c_plus_29": plus_hit,
        "divides_c2_minus_6c_plus_29": minus_hit,
        "reading": "c^2 +- 6c + 29 with c = sqrt(24n+1)",
    });
    let status = if plus_hit || minus_hit { Status::Undecided } else { Status::Excluded(Tier::Unconditional) };
    CriterionOutcome::new(CriterionId::SevenDivisor, status).param("v", 7).param("c", c).with_certificate(certificate)
}
