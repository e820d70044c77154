//! Exhaustive character-orbit searches modulo p.
//!
//! Project the code onto a cyclic quotient C_v. A nontrivial character sends
//! the projected sphere element to some tau in F_{p^l}; the values V(j) at the
//! other characters are then forced by the squaring relation
//! V(2j) = 2n - V(j)^2, by Frobenius V(pj) = V(j)^p, and by V(-j) = V(j).
//! Every tau whose forced table is inconsistent, or whose inverted
//! coefficients leave F_p, is impossible. Everything depends on n only
//! through n mod p, so searches are cached per residue class.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::radius2::quadratic_preconditions;
use super::radius3::{trivial_solution_gate, GateResult};
use super::{CriterionId, CriterionOutcome, Status, Tier};
use crate::caps::Caps;
use crate::field::{FieldCtx, FieldElement};
use crate::integer::{gcd_u64, inv_mod, is_prime_u64, mult_order_u64, pow_mod};
use crate::lee::{group_order_r2, group_order_r3};

/// Instances whose quotient structure has been checked by hand: v prime,
/// p primitive mod v.
pub const DEFAULT_INSTANCES: [(u64, u64); 2] = [(13, 11), (17, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Root of tau^2 - tau - (2n - 1).
    QuadraticFactor1,
    /// Root of tau^2 + tau - 2n.
    QuadraticFactor2,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCandidate {
    /// 0 is the zero element, k + 1 is w^k for the fixed generator w of F_{p^l}^*.
    pub index: u64,
    pub tau0: Vec<u64>,
    /// V(j) for j in 1..v.
    pub values: BTreeMap<u64, Vec<u64>>,
    /// Projected coefficients a_g mod p for g in 0..v.
    pub coefficients: Vec<u64>,
    /// Least k >= 1 with g^k(tau0) = tau0 for g(t) = 2n - t^2.
    pub period: u64,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSearch {
    pub v: u64,
    pub p: u64,
    pub n_mod_p: u64,
    pub field_degree: u64,
    pub subfield_degree: u64,
    pub modulus: Vec<u64>,
    pub candidates: u64,
    pub table_rejects: u64,
    pub inversion_rejects: u64,
    pub survivors: Vec<OrbitCandidate>,
}

impl OrbitSearch {
    pub fn unexplained(&self) -> usize {
        self.survivors.iter().filter(|c| c.classification == Classification::Other).count()
    }
}

/// Least l with p^l = +-1 (mod v).
fn real_degree(p: u64, v: u64, f: u64) -> u64 {
    if f.is_multiple_of(2) && pow_mod(p, f / 2, v) == v - 1 {
        f / 2
    } else {
        f
    }
}

type Table<'a> = Vec<Option<FieldElement<'a>>>;

/// Propagate tau0 through the three relations; None on the first conflict.
fn forced_table<'a>(ctx: &'a FieldCtx, tau0: FieldElement<'a>, two_n: &FieldElement<'a>, v: u64, p: u64) -> Option<Table<'a>> {
    let v_us = v as usize;
    let mut table: Table<'a> = vec![None; v_us];
    table[1] = Some(tau0.clone());
    table[v_us - 1] = Some(tau0);
    let mut queue = VecDeque::from([1usize]);
    while let Some(j) = queue.pop_front() {
        let val = table[j].clone().expect("queued entries are assigned");
        let derived = [(2 * j % v_us, two_n - &val.square()), ((p as usize % v_us) * j % v_us, ctx.frobenius(&val, 1))];
        for (k, x) in derived {
            for slot in [k, v_us - k] {
                match &table[slot] {
                    Some(existing) if *existing != x => return None,
                    Some(_) => {}
                    None => {
                        table[slot] = Some(x.clone());
                        if slot == k {
                            queue.push_back(k);
                        }
                    }
                }
            }
        }
    }
    table[1..].iter().all(Option::is_some).then_some(table)
}

/// a_g = v^{-1} (2n + 1 + sum_j V(j) beta^{-jg}) for g in 0..v, if all lie in F_p.
fn inverted_coefficients<'a>(ctx: &'a FieldCtx, values: &[FieldElement<'a>], beta_powers: &[FieldElement<'a>], size_mod_p: u64) -> Option<Vec<u64>> {
    let v = beta_powers.len();
    let p = ctx.p();
    let v_inv = inv_mod(v as u64 % p, p).expect("p does not divide v");
    (0..v)
        .map(|g| {
            let mut acc = ctx.constant(size_mod_p as i64);
            for (j, value) in values.iter().enumerate().skip(1) {
                acc = &acc + &(value * &beta_powers[(v - j * g % v) % v]);
            }
            ctx.in_prime_subfield(&acc).map(|a| a * v_inv % p)
        })
        .collect()
}

/// Enumerate F_{p^l} as 0 followed by powers of w; run `visit` on each in parallel.
fn enumerate_subfield<'a, T: Send>(
    ctx: &'a FieldCtx,
    w: &FieldElement<'a>,
    total: u64,
    visit: impl Fn(u64, FieldElement<'a>) -> T + Sync,
) -> Vec<T> {
    const CHUNK: u64 = 1 << 14;
    let chunks = total.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (start, end) = (c * CHUNK, ((c + 1) * CHUNK).min(total));
            let mut cur = w.pow_u64(start.max(1) - 1);
            (start..end)
                .map(|idx| {
                    let tau = if idx == 0 {
                        ctx.zero()
                    } else {
                        let t = cur.clone();
                        cur = &cur * w;
                        t
                    };
                    visit(idx, tau)
                })
                .collect()
        })
        .collect();
    per_chunk.into_iter().flatten().collect()
}

fn subfield_generator(ctx: &FieldCtx, size: u64) -> FieldElement<'_> {
    ctx.element_of_order(size - 1).expect("p^l - 1 divides p^f - 1")
}

fn classify(tau: &FieldElement<'_>, two_n: &FieldElement<'_>) -> Classification {
    let sq = tau.square();
    let q1 = &(&(&sq - tau) - two_n).add_constant(1);
    let q2 = &(&sq + tau) - two_n;
    if q2.is_zero() {
        Classification::QuadraticFactor2
    } else if q1.is_zero() {
        Classification::QuadraticFactor1
    } else {
        Classification::Other
    }
}

enum Visit {
    TableReject,
    InversionReject,
    Survivor(OrbitCandidate),
}

/// The radius-2 orbit search for residue class n mod p.
pub fn search_r2(v: u64, p: u64, n: u64, caps: &Caps) -> Result<OrbitSearch, String> {
    let f = mult_order_u64(p, v).map_err(|e| e.to_string())?;
    let l = real_degree(p, v, f);
    if f > caps.max_field_degree as u64 {
        return Err(format!("max_field_degree: f = {f} > {}", caps.max_field_degree));
    }
    let size = (p as u128).checked_pow(l as u32).filter(|&s| s <= caps.search_node_budget as u128);
    let Some(size) = size.map(|s| s as u64) else {
        return Err(format!("search_node_budget: {p}^{l} candidates > {}", caps.search_node_budget));
    };
    let ctx = FieldCtx::build(p, f as usize, caps.seed, caps.max_field_degree).map_err(|e| e.to_string())?;
    let n_mod_p = n % p;
    let two_n = ctx.constant((2 * n_mod_p) as i64);
    let beta = ctx.element_of_order(v).map_err(|e| e.to_string())?;
    let beta_powers: Vec<FieldElement<'_>> = (0..v).map(|e| beta.pow_u64(e)).collect();
    let size_mod_p = (2 * n_mod_p + 1) % p;
    let w = subfield_generator(&ctx, size);

    let visits = enumerate_subfield(&ctx, &w, size, |idx, tau| {
        let Some(table) = forced_table(&ctx, tau.clone(), &two_n, v, p) else {
            return Visit::TableReject;
        };
        let values: Vec<FieldElement<'_>> = table.into_iter().map(|e| e.unwrap_or_else(|| ctx.zero())).collect();
        let Some(coefficients) = inverted_coefficients(&ctx, &values, &beta_powers, size_mod_p) else {
            return Visit::InversionReject;
        };
        if coefficients.iter().fold(0, |acc, &a| (acc + a) % p) != size_mod_p {
            return Visit::InversionReject;
        }
        assert_table_relations(&ctx, &values, &two_n, v, p);
        Visit::Survivor(OrbitCandidate {
            index: idx,
            tau0: tau.coeffs().to_vec(),
            values: values.iter().enumerate().skip(1).map(|(j, e)| (j as u64, e.coeffs().to_vec())).collect(),
            coefficients,
            period: squaring_period(&tau, &two_n, v),
            classification: classify(&tau, &two_n),
        })
    });

    let mut search = OrbitSearch {
        v,
        p,
        n_mod_p,
        field_degree: f,
        subfield_degree: l,
        modulus: ctx.modulus().to_vec(),
        candidates: size,
        table_rejects: 0,
        inversion_rejects: 0,
        survivors: Vec::new(),
    };
    for visit in visits {
        match visit {
            Visit::TableReject => search.table_rejects += 1,
            Visit::InversionReject => search.inversion_rejects += 1,
            Visit::Survivor(c) => search.survivors.push(c),
        }
    }
    Ok(search)
}

fn squaring_period(tau: &FieldElement<'_>, two_n: &FieldElement<'_>, bound: u64) -> u64 {
    let mut t = tau.clone();
    for k in 1..=bound {
        t = two_n - &t.square();
        if t == *tau {
            return k;
        }
    }
    unreachable!("a consistent table closes its squaring chain within v steps")
}

fn assert_table_relations(ctx: &FieldCtx, values: &[FieldElement<'_>], two_n: &FieldElement<'_>, v: u64, p: u64) {
    let v_us = v as usize;
    for j in 1..v_us {
        assert_eq!(values[j], values[v_us - j], "V(-j) = V(j)");
        assert_eq!(values[(p as usize % v_us) * j % v_us], ctx.frobenius(&values[j], 1), "V(pj) = V(j)^p");
        assert!((&(&values[j].square() + &values[2 * j % v_us]) - two_n).is_zero(), "V(j)^2 + V(2j) = 2n");
    }
    if v == 13 {
        let mut t = values[1].clone();
        for _ in 0..6 {
            t = two_n - &t.square();
        }
        assert_eq!(t, values[1], "six squaring steps return to tau0");
    }
}

type SearchKey = (u64, u64, u64, u64, u64, usize);
type Cache<T> = OnceLock<Mutex<HashMap<SearchKey, Arc<T>>>>;

static R2_CACHE: Cache<OrbitSearch> = OnceLock::new();
static R3_CACHE: Cache<R3Search> = OnceLock::new();

fn cached<T>(cache: &'static Cache<T>, key: SearchKey, run: impl FnOnce() -> Result<T, String>) -> Result<Arc<T>, String> {
    let map = cache.get_or_init(Default::default);
    if let Some(hit) = map.lock().expect("cache lock").get(&key) {
        return Ok(hit.clone());
    }
    let fresh = Arc::new(run()?);
    Ok(map.lock().expect("cache lock").entry(key).or_insert(fresh).clone())
}

pub fn search_r2_cached(v: u64, p: u64, n: u64, caps: &Caps) -> Result<Arc<OrbitSearch>, String> {
    let key = (v, p, n % p, caps.seed, caps.search_node_budget, caps.max_field_degree);
    cached(&R2_CACHE, key, || search_r2(v, p, n, caps))
}

fn generates_units(v: u64, p: u64) -> bool {
    let h2 = mult_order_u64(2, v).unwrap_or(0);
    let hp = mult_order_u64(p, v).unwrap_or(0);
    h2 > 0 && hp > 0 && h2 / gcd_u64(h2, hp) * hp == v - 1
}

/// Radius-2 orbit criterion for the quotient C_v with characteristic p.
/// Instances outside the checked defaults need `experimental`.
pub fn orbit_check(n: u64, v: u64, p: u64, caps: &Caps, experimental: bool) -> CriterionOutcome {
    let base = |status| CriterionOutcome::new(CriterionId::Orbit, status).param("v", v).param("p", p);
    let default_instance = DEFAULT_INSTANCES.contains(&(v, p));
    if !default_instance {
        if !experimental {
            return base(Status::NotApplicable("instance not enabled; pass the experimental flag".into()));
        }
        if !is_prime_u64(v) || v < 5 || !is_prime_u64(p) || p == v || !generates_units(v, p) {
            return base(Status::NotApplicable("instance needs v prime, p prime and <2, p> = units mod v".into()));
        }
    }
    if !group_order_r2(n).is_multiple_of(v) {
        return base(Status::NotApplicable("v does not divide the order".into()));
    }
    let pre = quadratic_preconditions(n, v);
    if pre.square_8n1.is_some() {
        return base(Status::NotApplicable("8n+1 is a square".into()));
    }
    if v != 17 && pre.vk2_hit {
        return base(Status::NotApplicable("8n-3 = v k^2".into()));
    }
    let search = match search_r2_cached(v, p, n, caps) {
        Ok(s) => s,
        Err(reason) => return base(Status::Skipped(reason)),
    };
    let status = if search.survivors.is_empty() {
        Status::Excluded(Tier::Unconditional)
    } else if search.unexplained() == 0 {
        Status::Excluded(Tier::FactorArgument)
    } else {
        Status::Undecided
    };
    let certificate = json!({
        "experimental": !default_instance,
        "n_mod_p": search.n_mod_p,
        "field_degree": search.field_degree,
        "search_degree": search.subfield_degree,
        "modulus": search.modulus,
        "candidates": search.candidates,
        "table_rejects": search.table_rejects,
        "inversion_rejects": search.inversion_rejects,
        "survivors": search.survivors.iter().map(|c| json!({
            "index": c.index,
            "tau0": c.tau0,
            "classification": c.classification,
            "period": c.period,
            "coefficients": c.coefficients,
        })).collect::<Vec<_>>(),
    });
    base(status).param("survivors", search.survivors.len()).with_certificate(certificate)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct R3Candidate {
    pub index: u64,
    pub tau: [Vec<u64>; 3],
    pub coefficients: Vec<u64>,
    /// a_0, the coefficient at the identity of C_7.
    pub identity_coefficient: u64,
    pub coefficient_sum: u64,
    /// Root of tau (tau^2 + 3 tau - 6n + 2), the constant-solution factor.
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct R3Search {
    pub n_mod_p: u64,
    pub modulus: Vec<u64>,
    pub candidates: u64,
    pub cubic_rejects: u64,
    pub inversion_rejects: u64,
    pub survivors: Vec<R3Candidate>,
}

impl R3Search {
    pub fn nontrivial(&self) -> usize {
        self.survivors.iter().filter(|c| !c.trivial).count()
    }
}

const R3_V: u64 = 7;
const R3_P: u64 = 5;

/// Radius-3 search over C_7 with p = 5: tau_1 in F_125, tau_2 = tau_1^5,
/// tau_3 = tau_1^25, and the three cyclic cubic equations.
pub fn search_r3(n: u64, caps: &Caps) -> Result<R3Search, String> {
    let ctx = FieldCtx::build(R3_P, 6, caps.seed, caps.max_field_degree).map_err(|e| e.to_string())?;
    let n_mod_p = n % R3_P;
    let six_n = ctx.constant((6 * n_mod_p) as i64);
    let size_mod_p = (2 * n_mod_p + 1) % R3_P;
    let beta = ctx.element_of_order(R3_V).map_err(|e| e.to_string())?;
    let beta_powers: Vec<FieldElement<'_>> = (0..R3_V).map(|e| beta.pow_u64(e)).collect();
    let size = R3_P.pow(3);
    let w = subfield_generator(&ctx, size);
    let cubic = |a: &FieldElement<'_>, b: &FieldElement<'_>, c: &FieldElement<'_>| {
        // a^3 + 3ab + 2c - 6na
        let lhs = &(&(&a.square() * a) + (&(a * b).scale(3))) + &c.scale(2);
        (&lhs - &(&six_n * a)).is_zero()
    };
    let visits = enumerate_subfield(&ctx, &w, size, |idx, t1| {
        let t2 = ctx.frobenius(&t1, 1);
        let t3 = ctx.frobenius(&t1, 2);
        if !(cubic(&t1, &t2, &t3) && cubic(&t2, &t3, &t1) && cubic(&t3, &t1, &t2)) {
            return None;
        }
        let values = vec![ctx.zero(), t1.clone(), t2.clone(), t3.clone(), t3.clone(), t2.clone(), t1.clone()];
        let coefficients = inverted_coefficients(&ctx, &values, &beta_powers, size_mod_p);
        let trivial = {
            let factor = &(&t1.square() + &t1.scale(3)) - &six_n;
            (&t1 * &factor.add_constant(2)).is_zero()
        };
        Some(coefficients.map(|coefficients| R3Candidate {
            index: idx,
            tau: [t1.coeffs().to_vec(), t2.coeffs().to_vec(), t3.coeffs().to_vec()],
            identity_coefficient: coefficients[0],
            coefficient_sum: coefficients.iter().fold(0, |acc, &a| (acc + a) % R3_P),
            coefficients,
            trivial,
        }))
    });
    let mut search = R3Search {
        n_mod_p,
        modulus: ctx.modulus().to_vec(),
        candidates: size,
        cubic_rejects: 0,
        inversion_rejects: 0,
        survivors: Vec::new(),
    };
    for visit in visits {
        match visit {
            None => search.cubic_rejects += 1,
            Some(None) => search.inversion_rejects += 1,
            Some(Some(c)) if c.coefficient_sum != size_mod_p => search.inversion_rejects += 1,
            Some(Some(c)) => search.survivors.push(c),
        }
    }
    Ok(search)
}

pub fn search_r3_cached(n: u64, caps: &Caps) -> Result<Arc<R3Search>, String> {
    let key = (R3_V, R3_P, n % R3_P, caps.seed, 0, caps.max_field_degree);
    cached(&R3_CACHE, key, || search_r3(n, caps))
}

pub fn orbit_check_r3(n: u64, caps: &Caps) -> CriterionOutcome {
    let base = |status| CriterionOutcome::new(CriterionId::OrbitR3, status).param("v", R3_V).param("p", R3_P);
    if !group_order_r3(n).is_multiple_of(R3_V) {
        return base(Status::NotApplicable("7 does not divide the order".into()));
    }
    if let GateResult::NotApplicable(reason) = trivial_solution_gate(n, R3_V) {
        return base(Status::NotApplicable(reason));
    }
    let search = match search_r3_cached(n, caps) {
        Ok(s) => s,
        Err(reason) => return base(Status::Skipped(reason)),
    };
    let status = if search.survivors.is_empty() {
        Status::Excluded(Tier::Unconditional)
    } else if search.nontrivial() == 0 {
        Status::Excluded(Tier::FactorArgument)
    } else {
        Status::Undecided
    };
    let certificate = serde_json::to_value(&*search).expect("plain struct");
    base(status)
        .param("survivors", search.survivors.len())
        .param("nontrivial", search.nontrivial())
        .with_certificate(certificate)
}
