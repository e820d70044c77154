//! Self-contained property suites run by the `selftest` command and the
//! acceptance target.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::criteria::{lambda_of, orbit_exponents};
use crate::groupring::{inversion_roundtrip, AbelianGroup, CharacterField, GroupRingElement};
use crate::integer::{discrete_log_u64, gcd, gcd_u64, is_prime_u64, nat, Natural};
use crate::lee::{enumerate_sphere, group_order_r2, group_order_r3, sphere_size};
use crate::survey::soundness_coupling;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

fn timed(name: &'static str, body: impl FnOnce() -> Result<String, String>) -> SuiteResult {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    SuiteResult { name, passed, detail, elapsed: start.elapsed() }
}

/// gcd of p^l - 1 and every 2^i - p^j with 2^i = p^j (mod v), over all
/// 0 <= i <= ord_v(2), 0 <= j <= ord_v(p), (i, j) != (0, 0), in exact integers.
pub fn brute_force_lambda(v: u64, p: u64) -> Natural {
    let e = orbit_exponents(v, p);
    let pn = nat(p);
    let mut acc = pn.pow(e.l as usize) - Natural::ONE;
    for i in 0..=e.h2 {
        let Some(j) = discrete_log_u64(p, crate::integer::pow_mod(2, i, v), v, e.f) else { continue };
        for j in [j, j + e.f].into_iter().filter(|&j| j <= e.f && (i, j) != (0, 0)) {
            let (a, b) = (Natural::ONE << i as usize, pn.pow(j as usize));
            let diff = if a >= b { a - b } else { b - a };
            acc = gcd(&acc, &diff);
        }
    }
    acc
}

pub fn lambda_suite(v_max: u64, p_max: u64) -> SuiteResult {
    timed("lambda generator formula equals brute-force pair gcd", || {
        let mut pairs = 0;
        for v in (5..v_max).filter(|&v| is_prime_u64(v)) {
            for p in (3..p_max).filter(|&p| is_prime_u64(p) && p != v) {
                let fast = lambda_of(v, p);
                let slow = brute_force_lambda(v, p);
                if fast != slow {
                    return Err(format!("v = {v}, p = {p}: generator chain {fast}, brute force {slow}"));
                }
                pairs += 1;
            }
        }
        Ok(format!("{pairs} (v, p) pairs with v < {v_max}, p < {p_max}"))
    })
}

fn random_element(group: &AbelianGroup, rng: &mut ChaCha8Rng, bound: i64) -> GroupRingElement {
    let coeffs = (0..group.order()).map(|_| rng.gen_range(-bound..=bound)).collect();
    GroupRingElement::from_coeffs(group, coeffs).expect("length matches")
}

pub fn inversion_suite(seed: u64) -> SuiteResult {
    timed("inversion formula round-trips over C13 and C25", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for w in [13u64, 25] {
            let group = AbelianGroup::cyclic(w);
            let field = CharacterField::for_order(w, 1000).map_err(|e| e.to_string())?;
            for trial in 0..50 {
                let a = random_element(&group, &mut rng, 40);
                if !inversion_roundtrip(&a, &field).map_err(|e| e.to_string())? {
                    return Err(format!("C{w} trial {trial}: coefficients not recovered"));
                }
            }
        }
        Ok("50 random elements per group".into())
    })
}

pub fn power_map_suite(seed: u64) -> SuiteResult {
    timed("power map is a ring homomorphism for units t", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        let groups = [vec![13], vec![25], vec![5, 5], vec![3, 21], vec![2, 4]];
        let mut checks = 0;
        for orders in groups {
            let group = AbelianGroup::new(orders).map_err(|e| e.to_string())?;
            let exp = group.exponent() as i64;
            for _ in 0..10 {
                let (a, b) = (random_element(&group, &mut rng, 5), random_element(&group, &mut rng, 5));
                for t in (-exp..=exp).filter(|&t| gcd_u64(t.unsigned_abs(), exp as u64) == 1) {
                    let lhs = a.ring_mul(&b).map_err(|e| e.to_string())?.power_map(t);
                    let rhs = a.power_map(t).ring_mul(&b.power_map(t)).map_err(|e| e.to_string())?;
                    let sum_l = a.ring_add(&b).map_err(|e| e.to_string())?.power_map(t);
                    let sum_r = a.power_map(t).ring_add(&b.power_map(t)).map_err(|e| e.to_string())?;
                    if lhs != rhs || sum_l != sum_r {
                        return Err(format!("{group}, t = {t}"));
                    }
                    checks += 1;
                }
            }
        }
        Ok(format!("{checks} (A, B, t) triples"))
    })
}

pub fn sphere_suite() -> SuiteResult {
    timed("sphere size equals enumeration for n, r <= 6", || {
        for n in 0..=6usize {
            for r in 0..=6u64 {
                let listed = enumerate_sphere(n, r, u64::MAX).map_err(|e| e.to_string())?.len();
                if nat(listed as u64) != sphere_size(n as u64, r) {
                    return Err(format!("n = {n}, r = {r}: {listed} listed"));
                }
            }
        }
        Ok("49 (n, r) pairs".into())
    })
}

pub fn order_polynomial_suite(upto: u64) -> SuiteResult {
    timed("radius-2 and radius-3 order polynomials", || {
        for n in 0..=upto {
            if sphere_size(n, 2) != nat(group_order_r2(n)) || sphere_size(n, 3) != nat(group_order_r3(n)) {
                return Err(format!("n = {n}"));
            }
        }
        Ok(format!("n <= {upto}"))
    })
}

pub fn soundness_suite(caps: &Caps) -> SuiteResult {
    timed("no criterion excludes a dimension with a known code", || {
        let log = soundness_coupling(caps).map_err(|e| e.to_string())?;
        Ok(log.iter().map(|(n, r, label)| format!("(n={n}, r={r}): {label}")).collect::<Vec<_>>().join(", "))
    })
}

pub fn run_all(caps: &Caps) -> Vec<SuiteResult> {
    vec![
        lambda_suite(500, 50),
        inversion_suite(caps.seed),
        power_map_suite(caps.seed),
        sphere_suite(),
        order_polynomial_suite(10_000),
        soundness_suite(caps),
    ]
}
