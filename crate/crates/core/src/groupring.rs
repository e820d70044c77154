//! The integral group ring of a finite abelian group, power maps, exact
//! characters over an auxiliary prime field, and the sphere identities.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integer::{distinct_primes_u64, inv_mod, is_prime_u64, mul_mod, pow_mod};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupRingError {
    #[error("elements live in different groups")]
    GroupMismatch,
    #[error("invariant factors {0:?} do not form a divisibility chain")]
    BadInvariantFactors(Vec<u64>),
    #[error("group order {got} does not match the required order {expected}")]
    OrderMismatch { expected: u64, got: u64 },
    #[error("character evaluation needs a cyclic group")]
    NotCyclic,
    #[error("no auxiliary prime q = 1 mod {order} found within {budget} candidates")]
    NoAuxiliaryPrime { order: u64, budget: u64 },
}

/// A finite abelian group C_{m_1} x ... x C_{m_k} with m_1 | m_2 | ... | m_k.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    cyclic_orders: Vec<u64>,
}

/// An element in mixed-radix coordinates.
pub type GroupElem = Vec<u64>;

impl AbelianGroup {
    pub fn new(cyclic_orders: Vec<u64>) -> Result<Self, GroupRingError> {
        let ok = cyclic_orders.iter().all(|&m| m >= 2)
            && cyclic_orders.windows(2).all(|w| w[1] % w[0] == 0);
        if !ok {
            return Err(GroupRingError::BadInvariantFactors(cyclic_orders));
        }
        Ok(AbelianGroup { cyclic_orders })
    }

    pub fn cyclic(m: u64) -> Self {
        if m == 1 {
            return AbelianGroup { cyclic_orders: vec![] };
        }
        AbelianGroup { cyclic_orders: vec![m] }
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic_orders
    }

    pub fn order(&self) -> u64 {
        self.cyclic_orders.iter().product()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic_orders.len() <= 1
    }

    /// Least common multiple of element orders.
    pub fn exponent(&self) -> u64 {
        self.cyclic_orders.last().copied().unwrap_or(1)
    }

    pub fn rank(&self) -> usize {
        self.cyclic_orders.len()
    }

    pub fn identity(&self) -> GroupElem {
        vec![0; self.rank()]
    }

    pub fn index_of(&self, g: &[u64]) -> usize {
        let mut idx = 0u64;
        for (&x, &m) in g.iter().zip(&self.cyclic_orders) {
            idx = idx * m + x % m;
        }
        idx as usize
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElem {
        let mut g = vec![0; self.rank()];
        for (slot, &m) in g.iter_mut().zip(&self.cyclic_orders).rev() {
            *slot = idx as u64 % m;
            idx /= m as usize;
        }
        g
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElem> + '_ {
        (0..self.order() as usize).map(|i| self.element_at(i))
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> GroupElem {
        a.iter().zip(b).zip(&self.cyclic_orders).map(|((&x, &y), &m)| (x + y) % m).collect()
    }

    pub fn neg(&self, a: &[u64]) -> GroupElem {
        a.iter().zip(&self.cyclic_orders).map(|(&x, &m)| (m - x % m) % m).collect()
    }

    /// t * g for any integer t.
    pub fn scale(&self, a: &[u64], t: i64) -> GroupElem {
        a.iter()
            .zip(&self.cyclic_orders)
            .map(|(&x, &m)| {
                let t = t.rem_euclid(m as i64) as u64;
                mul_mod(x, t, m)
            })
            .collect()
    }

    /// Index arithmetic shortcuts for dense loops.
    fn add_index(&self, i: usize, j: usize) -> usize {
        if self.is_cyclic() {
            let m = self.order() as usize;
            return (i + j) % m.max(1);
        }
        self.index_of(&self.add(&self.element_at(i), &self.element_at(j)))
    }

    fn scale_index(&self, i: usize, t: i64) -> usize {
        if self.is_cyclic() {
            let m = self.order().max(1);
            return mul_mod(i as u64, t.rem_euclid(m as i64) as u64, m) as usize;
        }
        self.index_of(&self.scale(&self.element_at(i), t))
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cyclic_orders.is_empty() {
            return write!(f, "C1");
        }
        let parts: Vec<String> = self.cyclic_orders.iter().map(|m| format!("C{m}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A formal integer combination of group elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRingElement {
    group: AbelianGroup,
    coeffs: Vec<i64>,
}

impl GroupRingElement {
    pub fn zero(group: &AbelianGroup) -> Self {
        GroupRingElement { group: group.clone(), coeffs: vec![0; group.order() as usize] }
    }

    /// The identity element 1_G.
    pub fn one(group: &AbelianGroup) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[0] = 1;
        e
    }

    /// The all-ones element, the sum of every group element.
    pub fn all_ones(group: &AbelianGroup) -> Self {
        GroupRingElement { group: group.clone(), coeffs: vec![1; group.order() as usize] }
    }

    pub fn from_coeffs(group: &AbelianGroup, coeffs: Vec<i64>) -> Result<Self, GroupRingError> {
        if coeffs.len() as u64 != group.order() {
            return Err(GroupRingError::OrderMismatch { expected: group.order(), got: coeffs.len() as u64 });
        }
        Ok(GroupRingElement { group: group.clone(), coeffs })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, g: &[u64]) -> i64 {
        self.coeffs[self.group.index_of(g)]
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn is_zero_one(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0 || c == 1)
    }

    pub fn scaled(&self, k: i64) -> Self {
        GroupRingElement { group: self.group.clone(), coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    pub fn add_identity(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += k;
        out
    }

    pub fn ring_add(&self, other: &Self) -> Result<Self, GroupRingError> {
        if self.group != other.group {
            return Err(GroupRingError::GroupMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(GroupRingElement { group: self.group.clone(), coeffs })
    }

    pub fn ring_sub(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.ring_add(&other.scaled(-1))
    }

    /// Convolution product.
    pub fn ring_mul(&self, other: &Self) -> Result<Self, GroupRingError> {
        if self.group != other.group {
            return Err(GroupRingError::GroupMismatch);
        }
        let n = self.coeffs.len();
        let mut out = vec![0i64; n];
        let lhs: Vec<(usize, i64)> = self.coeffs.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        let rhs: Vec<(usize, i64)> = other.coeffs.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        for &(i, a) in &lhs {
            for &(j, b) in &rhs {
                out[self.group.add_index(i, j)] += a * b;
            }
        }
        Ok(GroupRingElement { group: self.group.clone(), coeffs: out })
    }

    /// The substitution g -> g^t.
    pub fn power_map(&self, t: i64) -> Self {
        let mut out = vec![0i64; self.coeffs.len()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                out[self.group.scale_index(i, t)] += c;
            }
        }
        GroupRingElement { group: self.group.clone(), coeffs: out }
    }
}

/// T = 1 + sum (g_i + g_i^{-1}) as a multiset sum.
pub fn build_t(group: &AbelianGroup, generators: &[GroupElem]) -> GroupRingElement {
    let mut t = GroupRingElement::one(group);
    for g in generators {
        t.coeffs[group.index_of(g)] += 1;
        t.coeffs[group.index_of(&group.neg(g))] += 1;
    }
    t
}

/// Outcome of an identity check with the first disagreeing coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub holds: bool,
    pub first_failure: Option<IdentityFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityFailure {
    pub element: GroupElem,
    pub lhs: i64,
    pub rhs: i64,
}

fn compare(lhs: &GroupRingElement, rhs: &GroupRingElement) -> IdentityReport {
    let first_failure = lhs
        .coeffs
        .iter()
        .zip(&rhs.coeffs)
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(i, (&a, &b))| IdentityFailure { element: lhs.group.element_at(i), lhs: a, rhs: b });
    IdentityReport { holds: first_failure.is_none(), first_failure }
}

/// Checks T^2 = 2c*G - T^(2) + 2n where c = full_order / |group|; c = 1 is the
/// unprojected radius-2 identity.
pub fn verify_r2_projected(t: &GroupRingElement, n: i64, full_order: u64) -> IdentityReport {
    let group = t.group();
    let c = (full_order / group.order()) as i64;
    let lhs = t.ring_mul(t).expect("same group");
    let rhs = GroupRingElement::all_ones(group)
        .scaled(2 * c)
        .ring_sub(&t.power_map(2))
        .expect("same group")
        .add_identity(2 * n);
    compare(&lhs, &rhs)
}

pub fn verify_r2_identity(t: &GroupRingElement, n: u64) -> Result<IdentityReport, GroupRingError> {
    let expected = 2 * n * n + 2 * n + 1;
    if t.group().order() != expected {
        return Err(GroupRingError::OrderMismatch { expected, got: t.group().order() });
    }
    Ok(verify_r2_projected(t, n as i64, expected))
}

/// Checks T^3 = 6c*G - 3 T^(2) T - 2 T^(3) + 6n T with c = full_order / |group|.
pub fn verify_r3_projected(t: &GroupRingElement, n: i64, full_order: u64) -> IdentityReport {
    let group = t.group();
    let c = (full_order / group.order()) as i64;
    let lhs = t.ring_mul(t).and_then(|sq| sq.ring_mul(t)).expect("same group");
    let rhs = GroupRingElement::all_ones(group)
        .scaled(6 * c)
        .ring_sub(&t.power_map(2).ring_mul(t).expect("same group").scaled(3))
        .and_then(|x| x.ring_sub(&t.power_map(3).scaled(2)))
        .and_then(|x| x.ring_add(&t.scaled(6 * n)))
        .expect("same group");
    compare(&lhs, &rhs)
}

pub fn verify_r3_identity(t: &GroupRingElement, n: u64) -> Result<IdentityReport, GroupRingError> {
    let expected = r3_order(n);
    if t.group().order() != expected {
        return Err(GroupRingError::OrderMismatch { expected, got: t.group().order() });
    }
    Ok(verify_r3_projected(t, n as i64, expected))
}

fn r3_order(n: u64) -> u64 {
    1 + 6 * n * n + 4 * n * (n.saturating_sub(1)) * (n.saturating_sub(2)) / 3
}

/// A prime field F_q with q = 1 (mod w) and a fixed primitive w-th root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterField {
    pub q: u64,
    pub w: u64,
    pub zeta: u64,
}

impl CharacterField {
    pub fn for_order(w: u64, budget: u64) -> Result<Self, GroupRingError> {
        let w_primes = distinct_primes_u64(w.max(1));
        for k in 1..=budget {
            let q = 1 + k * w;
            if q < 3 || !is_prime_u64(q) {
                continue;
            }
            let cofactor = (q - 1) / w;
            let zeta = (2..q)
                .map(|g| pow_mod(g, cofactor, q))
                .find(|&z| w_primes.iter().all(|&r| pow_mod(z, w / r, q) != 1))
                .expect("F_q^* is cyclic");
            return Ok(CharacterField { q, w, zeta });
        }
        Err(GroupRingError::NoAuxiliaryPrime { order: w, budget })
    }
}

/// chi_c(A) = sum a_g zeta^{g c} for a cyclic group of order w.
pub fn char_eval(a: &GroupRingElement, character: u64, field: &CharacterField) -> Result<u64, GroupRingError> {
    let group = a.group();
    if !group.is_cyclic() {
        return Err(GroupRingError::NotCyclic);
    }
    let w = group.order();
    if field.w != w {
        return Err(GroupRingError::OrderMismatch { expected: w, got: field.w });
    }
    let q = field.q;
    let step = pow_mod(field.zeta, character % w.max(1), q);
    let mut root = 1u64;
    let mut acc = 0u64;
    for &c in a.coeffs() {
        let c = c.rem_euclid(q as i64) as u64;
        acc = (acc + mul_mod(c, root, q)) % q;
        root = mul_mod(root, step, q);
    }
    Ok(acc)
}

/// Reconstructs every coefficient mod q from all character values and
/// compares with the original.
pub fn inversion_roundtrip(a: &GroupRingElement, field: &CharacterField) -> Result<bool, GroupRingError> {
    let w = a.group().order();
    let q = field.q;
    let chars: Vec<u64> = (0..w).map(|c| char_eval(a, c, field)).collect::<Result<_, _>>()?;
    let w_inv = inv_mod(w % q, q).ok_or(GroupRingError::OrderMismatch { expected: w, got: q })?;
    let zeta_inv = inv_mod(field.zeta, q).expect("root of unity is a unit");
    for h in 0..w {
        let step = pow_mod(zeta_inv, h, q);
        let mut root = 1u64;
        let mut acc = 0u64;
        for &x in &chars {
            acc = (acc + mul_mod(x, root, q)) % q;
            root = mul_mod(root, step, q);
        }
        let rebuilt = mul_mod(acc, w_inv, q);
        if rebuilt != a.coeffs()[h as usize].rem_euclid(q as i64) as u64 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c13() -> AbelianGroup {
        AbelianGroup::cyclic(13)
    }

    #[test]
    fn ring_basics() {
        let g = c13();
        let mut a = GroupRingElement::zero(&g);
        a.coeffs[1] = 1;
        a.coeffs[12] = 1;
        let sq = a.ring_mul(&a).unwrap();
        let mut expected = [0i64; 13];
        expected[2] = 1;
        expected[11] = 1;
        expected[0] = 2;
        assert_eq!(sq.coeffs(), &expected[..]);
        assert_eq!(a.ring_mul(&GroupRingElement::one(&g)).unwrap(), a);
        let all = GroupRingElement::all_ones(&g);
        assert_eq!(all.ring_mul(&all).unwrap(), all.scaled(13));
        assert_eq!(all.power_map(2), all);
        assert_eq!(a.power_map(1), a);
        let other = GroupRingElement::zero(&AbelianGroup::cyclic(5));
        assert_eq!(a.ring_mul(&other), Err(GroupRingError::GroupMismatch));
    }

    #[test]
    fn sphere_element() {
        let g = c13();
        let t = build_t(&g, &[vec![1], vec![5]]);
        let support: Vec<usize> = (0..13).filter(|&i| t.coeffs()[i] == 1).collect();
        assert_eq!(support, vec![0, 1, 5, 8, 12]);
        assert_eq!(t.power_map(-1), t);
        assert_eq!(build_t(&g, &[]), GroupRingElement::one(&g));
        let dup = build_t(&g, &[vec![1], vec![1]]);
        assert_eq!(dup.coeffs()[1], 2);
        assert_eq!(dup.coefficient_sum(), 5);
    }

    #[test]
    fn radius_two_identity() {
        let g = c13();
        assert!(verify_r2_identity(&build_t(&g, &[vec![1], vec![5]]), 2).unwrap().holds);
        let report = verify_r2_identity(&GroupRingElement::one(&g), 2).unwrap();
        assert!(!report.holds);
        assert!(report.first_failure.is_some());
        assert!(!verify_r2_identity(&build_t(&g, &[vec![1], vec![2]]), 2).unwrap().holds);
        assert!(verify_r2_identity(&GroupRingElement::one(&AbelianGroup::cyclic(5)), 2).is_err());
    }

    #[test]
    fn radius_three_identity() {
        let g = AbelianGroup::cyclic(25);
        assert!(verify_r3_identity(&build_t(&g, &[vec![1], vec![7]]), 2).unwrap().holds);
        assert!(!verify_r3_identity(&GroupRingElement::one(&g), 2).unwrap().holds);
    }

    #[test]
    fn characters() {
        let g = c13();
        let field = CharacterField::for_order(13, 1000).unwrap();
        assert_eq!(field.q % 13, 1);
        let t = build_t(&g, &[vec![1], vec![5]]);
        assert_eq!(char_eval(&t, 0, &field).unwrap(), 5);
        let all = GroupRingElement::all_ones(&g);
        for c in 1..13 {
            assert_eq!(char_eval(&all, c, &field).unwrap(), 0);
        }
        assert_eq!(char_eval(&t.power_map(3), 2, &field).unwrap(), char_eval(&t, 6, &field).unwrap());
        assert!(inversion_roundtrip(&t, &field).unwrap());
        assert!(inversion_roundtrip(&GroupRingElement::one(&g), &field).unwrap());
        assert!(inversion_roundtrip(&all, &field).unwrap());
        let c5x5 = AbelianGroup::new(vec![5, 5]).unwrap();
        assert_eq!(char_eval(&GroupRingElement::one(&c5x5), 1, &field), Err(GroupRingError::NotCyclic));
    }

    #[test]
    fn invariant_factor_chain() {
        assert!(AbelianGroup::new(vec![3, 21]).is_ok());
        assert!(AbelianGroup::new(vec![21, 3]).is_err());
        assert_eq!(AbelianGroup::new(vec![5, 5]).unwrap().order(), 25);
        assert_eq!(AbelianGroup::new(vec![3, 21]).unwrap().to_string(), "C3xC21");
    }
}
