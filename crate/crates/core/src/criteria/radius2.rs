//! Radius-2 arithmetic criteria: the four-power solvability test and the
//! small prime divisor tests.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{CriterionId, CriterionOutcome, Status, Tier};
use crate::integer::{discrete_log_u64, distinct_primes_u64, mult_order_u64, solvable_shifted, square_root_u64, MaybeInfinite};
use crate::lee::group_order_r2;

/// Least a in [1, ord_v(4)] with v | 4^a + 4n + 2, if any.
fn four_power_exponent(n: u64, v: u64, b: u64) -> MaybeInfinite {
    let target = (v - (4 * (n % v) + 2) % v) % v;
    match discrete_log_u64(4 % v, target, v, b) {
        Some(0) => MaybeInfinite::Finite(b),
        Some(a) => MaybeInfinite::Finite(a),
        None => MaybeInfinite::Infinity,
    }
}

/// For every prime v | 2n^2+2n+1 with v > 2n+1, a code forces some
/// l in 0..=m/4 with a(x+1) + by = n - l solvable in nonnegative integers.
pub fn four_power_check(n: u64) -> CriterionOutcome {
    let order = group_order_r2(n);
    let mut per_prime = Vec::new();
    let mut excluded_by = None;
    for v in distinct_primes_u64(order).into_iter().filter(|&v| v > 2 * n + 1) {
        let b = mult_order_u64(4, v).expect("v is odd");
        let a = four_power_exponent(n, v, b);
        let m = order / v;
        let witness = (0..=m / 4).find(|&l| solvable_shifted(&a, b, n as i64 - l as i64));
        per_prime.push(json!({
            "v": v, "a": a.to_string(), "b": b, "m": m,
            "solvable_at": witness,
            "unsolvable_range": witness.is_none().then(|| format!("0..={}", m / 4)),
        }));
        if witness.is_none() && excluded_by.is_none() {
            excluded_by = Some((v, a, b, m));
        }
    }
    let certificate = json!({ "order": order, "primes": per_prime });
    if per_prime.is_empty() {
        return CriterionOutcome::new(CriterionId::FourPower, Status::NotApplicable("no prime divisor above 2n+1".into()))
            .with_certificate(certificate);
    }
    match excluded_by {
        Some((v, a, b, m)) => CriterionOutcome::new(CriterionId::FourPower, Status::Excluded(Tier::Unconditional))
            .param("v", v)
            .param("a", a)
            .param("b", b)
            .param("m", m),
        None => CriterionOutcome::new(CriterionId::FourPower, Status::Undecided),
    }
    .with_certificate(certificate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticPreconditions {
    /// Square root of 8n+1 when it is a perfect square.
    pub square_8n1: Option<u64>,
    /// 8n - 3 = v k^2 for some integer k.
    pub vk2_hit: bool,
}

impl QuadraticPreconditions {
    /// Both arithmetic side conditions of the small-divisor tests pass.
    pub fn pass(&self) -> bool {
        self.square_8n1.is_none() && !self.vk2_hit
    }
}

pub fn quadratic_preconditions(n: u64, v: u64) -> QuadraticPreconditions {
    let square_8n1 = square_root_u64(8 * n + 1);
    let vk2_hit = match (8 * n).checked_sub(3) {
        Some(t) if v != 0 && t % v == 0 => square_root_u64(t / v).is_some(),
        _ => false,
    };
    QuadraticPreconditions { square_8n1, vk2_hit }
}

/// Which of 5, 13, 17 exclude n. The 17 case has no 8n-3 side condition.
pub fn small_divisor_hits(n: u64) -> Vec<u64> {
    let order = group_order_r2(n);
    [5u64, 13, 17]
        .into_iter()
        .filter(|&v| order.is_multiple_of(v))
        .filter(|&v| {
            let pre = quadratic_preconditions(n, v);
            pre.square_8n1.is_none() && (v == 17 || !pre.vk2_hit)
        })
        .collect()
}

pub fn small_divisor_check(n: u64) -> CriterionOutcome {
    let order = group_order_r2(n);
    let divisors: Vec<u64> = [5u64, 13, 17].into_iter().filter(|&v| order.is_multiple_of(v)).collect();
    let fired = small_divisor_hits(n);
    let square = square_root_u64(8 * n + 1);
    let certificate = json!({
        "order": order,
        "dividing": divisors,
        "square_8n_plus_1": square,
        "fired": fired,
        "vk2_blocked": divisors.iter().filter(|&&v| v != 17 && quadratic_preconditions(n, v).vk2_hit).collect::<Vec<_>>(),
    });
    let status = if divisors.is_empty() {
        Status::NotApplicable("none of 5, 13, 17 divides the order".into())
    } else if !fired.is_empty() {
        Status::Excluded(Tier::Unconditional)
    } else {
        Status::Undecided
    };
    let mut out = CriterionOutcome::new(CriterionId::SmallDivisor, status).with_certificate(certificate);
    if let Some(&v) = fired.first() {
        out = out.param("v", v);
    }
    out
}
