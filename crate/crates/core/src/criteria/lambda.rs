//! The gcd invariant of the 2-power and p-power orbits modulo v.
//!
//! With f = ord_v(p) and l the least exponent putting p^l at +-1 mod v, the
//! invariant is the largest divisor of p^l - 1 dividing every 2^i - p^j with
//! 2^i = p^j (mod v). The pairs (i, j) form a lattice generated by
//! (h2, 0), (0, hp) and (i0, j0), so three gcd steps suffice.

use dashu_int::ops::BitTest;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::caps::Caps;
use super::{CriterionId, CriterionOutcome, Status, Tier};
use crate::integer::{discrete_log_u64, gcd, gcd_u64, mod_pow, mult_order_u64, nat, pow_mod, Natural};
use crate::lee::group_order_r2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaParams {
    pub n: u64,
    pub v: u64,
    pub p: u64,
    /// ord_v(p).
    pub f: u64,
    /// Least l >= 1 with p^l = +-1 (mod v).
    pub l: u64,
    /// (v - 1) / f, the number of p-orbits on the units.
    pub d: u64,
    /// |G| / v.
    pub m: u64,
    pub m1: u64,
    pub m2: u64,
    /// ord_v(2).
    pub h2: u64,
    /// ord_v(p), kept under its own name for the generator bookkeeping.
    pub hp: u64,
    pub i0: u64,
    pub j0: u64,
    pub generates_units: bool,
    pub below_m1_v: bool,
    pub below_m2_v: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaCertificate {
    pub params: LambdaParams,
    pub lambda: Natural,
}

impl LambdaCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(&self.params).expect("plain struct");
        value["lambda"] = json!(self.lambda.to_string());
        value
    }

    pub fn hypotheses_ok(&self) -> bool {
        self.params.hypotheses_ok()
    }
}

impl LambdaParams {
    pub fn hypotheses_ok(&self) -> bool {
        self.generates_units && self.below_m1_v && self.below_m2_v
    }
}

/// Orbit exponents of 2 and p modulo v; none of them depends on n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitExponents {
    pub f: u64,
    pub l: u64,
    pub h2: u64,
    pub i0: u64,
    pub j0: u64,
    pub generates_units: bool,
}

/// v an odd prime, p a prime different from v.
pub fn orbit_exponents(v: u64, p: u64) -> OrbitExponents {
    let f = mult_order_u64(p, v).expect("p is a unit mod v");
    let l = if f.is_multiple_of(2) && pow_mod(p, f / 2, v) == v - 1 { f / 2 } else { f };
    let h2 = mult_order_u64(2, v).expect("v is odd");
    let g = gcd_u64(h2, f);
    let i0 = h2 / g;
    let j0 = discrete_log_u64(p, pow_mod(2, i0, v), v, f).expect("2^i0 lies in the subgroup generated by p");
    OrbitExponents { f, l, h2, i0, j0, generates_units: i0 * f == v - 1 }
}

/// All cheap quantities; v must be an odd prime dividing the radius-2 order
/// and p a prime different from v.
pub fn lambda_params(n: u64, v: u64, p: u64) -> LambdaParams {
    let e = orbit_exponents(v, p);
    let m = group_order_r2(n) / v;
    let (m1, m2) = (m % p, (2 * (m % p)) % p);
    let bound = 2 * n + 1;
    LambdaParams {
        n,
        v,
        p,
        f: e.f,
        l: e.l,
        d: (v - 1) / e.f,
        m,
        m1,
        m2,
        h2: e.h2,
        hp: e.f,
        i0: e.i0,
        j0: e.j0,
        generates_units: e.generates_units,
        below_m1_v: (bound as u128) < m1 as u128 * v as u128,
        below_m2_v: (bound as u128) < m2 as u128 * v as u128,
    }
}

/// 2^k mod modulus; a shift is cheaper than a ladder for small k.
fn two_power_mod(k: u64, modulus: &Natural) -> Natural {
    if k <= 2 * modulus.bit_len() as u64 {
        (Natural::ONE << k as usize) % modulus
    } else {
        mod_pow(&nat(2), &nat(k), modulus)
    }
}

fn minus_mod(a: Natural, b: Natural, modulus: &Natural) -> Natural {
    (a + modulus - b) % modulus
}

/// The invariant itself. Exponents of p are reduced mod l, valid because the
/// running gcd always divides p^l - 1.
pub fn lambda_of(v: u64, p: u64) -> Natural {
    lambda_from_exponents(p, &orbit_exponents(v, p))
}

fn lambda_from_exponents(p: u64, e: &OrbitExponents) -> Natural {
    let p = nat(p);
    let mut acc = p.pow(e.l as usize) - Natural::ONE;
    if acc.is_one() {
        return acc;
    }
    let step = two_power_mod(e.h2, &acc);
    acc = gcd(&acc, &minus_mod(step, Natural::ONE, &acc));
    let step = mod_pow(&p, &nat(e.f % e.l), &acc);
    acc = gcd(&acc, &minus_mod(step, Natural::ONE % &acc, &acc));
    if acc.is_one() {
        return acc;
    }
    let lhs = two_power_mod(e.i0, &acc);
    let rhs = mod_pow(&p, &nat(e.j0 % e.l), &acc);
    gcd(&acc, &minus_mod(lhs, rhs, &acc))
}

pub fn lambda_from(params: &LambdaParams) -> Natural {
    let e = OrbitExponents {
        f: params.f,
        l: params.l,
        h2: params.h2,
        i0: params.i0,
        j0: params.j0,
        generates_units: params.generates_units,
    };
    lambda_from_exponents(params.p, &e)
}

pub fn lambda_value(n: u64, v: u64, p: u64) -> LambdaCertificate {
    let params = lambda_params(n, v, p);
    let lambda = lambda_from(&params);
    LambdaCertificate { params, lambda }
}

/// Why the invariant is not usable for (n, v, p), if it is not.
fn gate(params: &LambdaParams) -> Option<String> {
    if params.p == 2 {
        Some("p = 2".into())
    } else if params.f == 1 {
        Some("p = 1 (mod v)".into())
    } else if !params.generates_units {
        Some("2 and p do not generate the units mod v".into())
    } else if !params.below_m1_v {
        Some("2n+1 >= m1 v".into())
    } else if !params.below_m2_v {
        Some("2n+1 >= m2 v".into())
    } else {
        None
    }
}

/// Excluded when the invariant degenerates to 1 or v. Returns the full
/// certificate when the hypotheses hold so the field conditions can reuse it.
/// Limb operations for the gcd chain on p^l - 1, quadratic in its size.
pub fn lambda_work(params: &LambdaParams) -> u128 {
    let limbs = (params.l as f64 * (params.p as f64).log2() / 64.0).ceil() as u128 + 1;
    limbs * limbs
}

pub fn lambda_check_with(params: LambdaParams, caps: &Caps) -> (CriterionOutcome, Option<LambdaCertificate>) {
    let base = |status| {
        CriterionOutcome::new(CriterionId::Lambda, status)
            .param("v", params.v)
            .param("p", params.p)
            .param("f", params.f)
            .param("l", params.l)
            .param("d", params.d)
            .param("m", params.m)
            .param("m1", params.m1)
            .param("m2", params.m2)
    };
    if let Some(reason) = gate(&params) {
        let json = serde_json::to_value(&params).expect("plain struct");
        return (base(Status::NotApplicable(reason)).with_certificate(json), None);
    }
    let work = lambda_work(&params);
    if work > caps.search_node_budget as u128 {
        let json = serde_json::to_value(&params).expect("plain struct");
        let reason = format!("search_node_budget: {work} limb operations for p^l - 1 > {}", caps.search_node_budget);
        return (base(Status::Skipped(reason)).with_certificate(json), None);
    }
    let lambda = lambda_from(&params);
    let degenerate = lambda.is_one() || lambda == nat(params.v);
    let status = if degenerate { Status::Excluded(Tier::Unconditional) } else { Status::Undecided };
    let cert = LambdaCertificate { params: params.clone(), lambda };
    let outcome = base(status).param("lambda", &cert.lambda).with_certificate(cert.to_json());
    (outcome, Some(cert))
}

pub fn lambda_check(n: u64, v: u64, p: u64, caps: &Caps) -> CriterionOutcome {
    lambda_check_with(lambda_params(n, v, p), caps).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let big = lambda_value(102, 21013, 3);
        assert_eq!(big.lambda, nat(1));
        assert!(big.hypotheses_ok());
        assert_eq!(lambda_check(102, 21013, 3, &Caps::default()).status, Status::Excluded(Tier::Unconditional));

        let small = lambda_value(14, 421, 7);
        assert_eq!(small.lambda, nat(3));
        assert_eq!((small.params.f, small.params.l, small.params.d, small.params.h2), (70, 35, 6, 420));
        assert_eq!(lambda_check(14, 421, 7, &Caps::default()).status, Status::Undecided);
    }

    #[test]
    fn gates() {
        let out = lambda_check(2, 13, 2, &Caps::default());
        assert_eq!(out.status, Status::NotApplicable("p = 2".into()));
    }
}
