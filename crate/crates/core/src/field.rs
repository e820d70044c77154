//! Arithmetic in F_{p^f} realised as F_p[X]/(m(X)) for a seeded irreducible
//! monic m, with Frobenius, trace and roots of unity.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use dashu_int::ops::BitTest;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::integer::{distinct_primes_u64, inv_mod, is_prime_u64, mul_mod, nat, Natural};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("extension degree {f} exceeds the cap {cap}")]
    DegreeCap { f: usize, cap: usize },
    #[error("roots-of-unity group of size {k} exceeds the cap {cap}")]
    UnityCap { k: u64, cap: u64 },
    #[error("{k} does not divide p^f - 1")]
    NotADivisor { k: String },
    #[error("characteristic {p} is not a supported prime")]
    BadCharacteristic { p: u64 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    MixedOwners,
}

/// A concrete model of F_{p^f}.
pub struct FieldCtx {
    p: u64,
    f: usize,
    /// Monic modulus, lowest coefficient first, length f + 1.
    modulus: Vec<u64>,
    /// Row k holds X^{f+k} reduced, for k in 0..f-1.
    fold: Vec<Vec<u64>>,
    /// Column j holds X^{jp} reduced, stored row-major as frob[j].
    frob: Vec<Vec<u64>>,
    /// Tr(X^j) for j in 0..f.
    trace_basis: Vec<u64>,
    order_minus_one: Natural,
    seed: u64,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.f, self.modulus)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement<'a> {
    ctx: &'a FieldCtx,
    c: Vec<u64>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
    }
}
impl Eq for FieldCtx {}
impl std::hash::Hash for FieldCtx {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self as *const FieldCtx as usize).hash(state);
    }
}

impl fmt::Debug for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.c)
    }
}

/// Polynomial helpers over F_p, lowest coefficient first.
mod poly {
    use super::mul_mod;

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = super::inv_mod(b[db], p).expect("nonzero leading coefficient");
        while r.len() > db {
            let top = r.len() - 1;
            let q = mul_mod(r[top], lead_inv, p);
            let shift = top - db;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mul_mod(q, bi, p)) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }
}

fn fold_table(modulus: &[u64], p: u64) -> Vec<Vec<u64>> {
    let f = modulus.len() - 1;
    let mut rows = Vec::with_capacity(f.saturating_sub(1));
    // X^f = -(m_0 + ... + m_{f-1} X^{f-1})
    let mut cur: Vec<u64> = modulus[..f].iter().map(|&c| (p - c) % p).collect();
    for _ in 0..f.saturating_sub(1) {
        rows.push(cur.clone());
        let top = cur[f - 1];
        let mut next = vec![0u64; f];
        for j in (1..f).rev() {
            next[j] = cur[j - 1];
        }
        for j in 0..f {
            next[j] = (next[j] + mul_mod(top, (p - modulus[j]) % p, p)) % p;
        }
        cur = next;
    }
    rows
}

/// Lazy-reduction multiply of two reduced polynomials modulo the field modulus.
fn mul_raw(a: &[u64], b: &[u64], fold: &[Vec<u64>], p: u64) -> Vec<u64> {
    let f = a.len();
    let mut prod = vec![0u64; 2 * f - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] += ai * bj;
            if prod[i + j] >= 1 << 63 {
                prod[i + j] %= p;
            }
        }
    }
    for x in prod.iter_mut() {
        *x %= p;
    }
    let mut out: Vec<u64> = prod[..f].to_vec();
    for (k, row) in fold.iter().enumerate() {
        let h = prod[f + k];
        if h == 0 {
            continue;
        }
        for (j, &rj) in row.iter().enumerate() {
            out[j] += h * rj;
            if out[j] >= 1 << 63 {
                out[j] %= p;
            }
        }
    }
    for x in out.iter_mut() {
        *x %= p;
    }
    out
}

fn apply_matrix(cols: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    let f = v.len();
    let mut out = vec![0u64; f];
    for (j, &vj) in v.iter().enumerate() {
        if vj == 0 {
            continue;
        }
        for (i, &cij) in cols[j].iter().enumerate() {
            out[i] += vj * cij;
            if out[i] >= 1 << 63 {
                out[i] %= p;
            }
        }
    }
    for x in out.iter_mut() {
        *x %= p;
    }
    out
}

fn pow_raw(base: &[u64], exp: &Natural, fold: &[Vec<u64>], p: u64) -> Vec<u64> {
    let f = base.len();
    let mut acc = vec![0u64; f];
    acc[0] = 1 % p;
    let bits = exp.bit_len();
    for i in (0..bits).rev() {
        acc = mul_raw(&acc, &acc, fold, p);
        if exp.bit(i) {
            acc = mul_raw(&acc, base, fold, p);
        }
    }
    acc
}

fn frobenius_columns(modulus: &[u64], fold: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let f = modulus.len() - 1;
    let mut x = vec![0u64; f];
    if f == 1 {
        // X is the constant -m_0 in the prime field.
        x[0] = (p - modulus[0]) % p;
    } else {
        x[1] = 1;
    }
    let xp = pow_raw(&x, &nat(p), fold, p);
    let mut cols = Vec::with_capacity(f);
    let mut cur = vec![0u64; f];
    cur[0] = 1 % p;
    for _ in 0..f {
        cols.push(cur.clone());
        cur = mul_raw(&cur, &xp, fold, p);
    }
    cols
}

fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let f = modulus.len() - 1;
    if f == 1 {
        return true;
    }
    let fold = fold_table(modulus, p);
    let cols = frobenius_columns(modulus, &fold, p);
    let mut x = vec![0u64; f];
    x[1] = 1;
    let mut cur = x.clone();
    for _ in 1..=f / 2 {
        cur = apply_matrix(&cols, &cur, p);
        let mut diff = cur.clone();
        diff[1] = (diff[1] + p - 1) % p;
        poly::trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        let g = poly::gcd(modulus, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Arithmetic needs (f + 1) * (p - 1)^2 to fit in 63 bits.
fn supported(p: u64, f: usize) -> bool {
    let sq = (p as u128 - 1) * (p as u128 - 1);
    sq * (f as u128 + 1) < 1u128 << 63
}

impl FieldCtx {
    pub fn build(p: u64, f: usize, seed: u64, max_degree: usize) -> Result<FieldCtx, FieldError> {
        if f > max_degree {
            return Err(FieldError::DegreeCap { f, cap: max_degree });
        }
        if !is_prime_u64(p) || f == 0 || !supported(p, f) {
            return Err(FieldError::BadCharacteristic { p });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 20) ^ f as u64);
        let modulus = if f == 1 {
            vec![0, 1]
        } else {
            loop {
                let mut cand: Vec<u64> = (0..f).map(|_| rng.gen_range(0..p)).collect();
                cand.push(1);
                if cand[0] != 0 && is_irreducible(&cand, p) {
                    break cand;
                }
            }
        };
        let fold = fold_table(&modulus, p);
        let frob = frobenius_columns(&modulus, &fold, p);
        let mut ctx = FieldCtx {
            p,
            f,
            modulus,
            fold,
            frob,
            trace_basis: Vec::new(),
            order_minus_one: nat(p).pow(f) - Natural::ONE,
            seed,
        };
        let basis: Vec<u64> = (0..f)
            .map(|j| {
                let mut e = vec![0u64; f];
                e[j] = 1;
                ctx.trace_to_prime(&ctx.from_coeffs(e))
            })
            .collect();
        ctx.trace_basis = basis;
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// p^f - 1.
    pub fn unit_order(&self) -> &Natural {
        &self.order_minus_one
    }

    pub fn size(&self) -> Natural {
        &self.order_minus_one + Natural::ONE
    }

    pub fn zero(&self) -> FieldElement<'_> {
        FieldElement { ctx: self, c: vec![0; self.f] }
    }

    pub fn one(&self) -> FieldElement<'_> {
        self.constant(1)
    }

    pub fn constant(&self, a: i64) -> FieldElement<'_> {
        let mut c = vec![0; self.f];
        c[0] = a.rem_euclid(self.p as i64) as u64;
        FieldElement { ctx: self, c }
    }

    /// The class of X.
    pub fn generator_x(&self) -> FieldElement<'_> {
        if self.f == 1 {
            return self.constant(-(self.modulus[0] as i64));
        }
        let mut c = vec![0; self.f];
        c[1] = 1;
        FieldElement { ctx: self, c }
    }

    pub fn from_coeffs(&self, coeffs: Vec<u64>) -> FieldElement<'_> {
        assert_eq!(coeffs.len(), self.f, "coefficient vector has wrong length");
        FieldElement { ctx: self, c: coeffs.into_iter().map(|x| x % self.p).collect() }
    }

    /// Element number `idx` in base-p digit order; covers the field as idx runs over 0..p^f.
    pub fn element_by_index(&self, mut idx: u128) -> FieldElement<'_> {
        let mut c = vec![0; self.f];
        for slot in c.iter_mut() {
            *slot = (idx % self.p as u128) as u64;
            idx /= self.p as u128;
        }
        FieldElement { ctx: self, c }
    }

    pub fn random(&self, rng: &mut impl Rng) -> FieldElement<'_> {
        FieldElement { ctx: self, c: (0..self.f).map(|_| rng.gen_range(0..self.p)).collect() }
    }

    fn check<'a>(&'a self, e: &FieldElement<'a>) -> Result<(), FieldError> {
        if std::ptr::eq(self, e.ctx) {
            Ok(())
        } else {
            Err(FieldError::MixedOwners)
        }
    }

    /// e^{p^k}.
    pub fn frobenius<'a>(&'a self, e: &FieldElement<'a>, k: usize) -> FieldElement<'a> {
        let mut c = e.c.clone();
        for _ in 0..k % self.f {
            c = apply_matrix(&self.frob, &c, self.p);
        }
        FieldElement { ctx: self, c }
    }

    /// Sum of all Frobenius conjugates, which lies in F_p.
    pub fn trace_to_prime(&self, e: &FieldElement<'_>) -> u64 {
        let mut acc = self.zero();
        let mut cur = FieldElement { ctx: self, c: e.c.clone() };
        for _ in 0..self.f {
            acc = &acc + &cur;
            cur = self.frobenius(&cur, 1);
        }
        self.in_prime_subfield(&acc).expect("trace lies in the prime field")
    }

    /// Trace via the precomputed linear functional; agrees with `trace_to_prime`.
    pub fn trace_linear(&self, e: &FieldElement<'_>) -> u64 {
        let mut acc = 0u64;
        for (&a, &t) in e.c.iter().zip(&self.trace_basis) {
            acc = (acc + mul_mod(a, t, self.p)) % self.p;
        }
        acc
    }

    pub fn in_prime_subfield(&self, e: &FieldElement<'_>) -> Option<u64> {
        e.c[1..].iter().all(|&x| x == 0).then_some(e.c[0])
    }

    /// An element of exact multiplicative order k, from seeded random trials.
    pub fn element_of_order(&self, k: u64) -> Result<FieldElement<'_>, FieldError> {
        let k_nat = nat(k);
        if !(&self.order_minus_one % &k_nat).is_zero() {
            return Err(FieldError::NotADivisor { k: k.to_string() });
        }
        let cofactor = &self.order_minus_one / &k_nat;
        let primes = distinct_primes_u64(k);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ k.rotate_left(17) ^ 0x5851_f42d);
        loop {
            let g = self.random(&mut rng);
            if g.is_zero() {
                continue;
            }
            let z = g.pow(&cofactor);
            if primes.iter().all(|&q| !z.pow(&nat(k / q)).is_one()) {
                return Ok(z);
            }
        }
    }

    /// All k-th roots of unity, as powers of a generator.
    pub fn roots_of_unity(&self, k: u64, cap: u64) -> Result<Vec<FieldElement<'_>>, FieldError> {
        if k > cap {
            return Err(FieldError::UnityCap { k, cap });
        }
        let z = self.element_of_order(k)?;
        let mut out = Vec::with_capacity(k as usize);
        let mut cur = self.one();
        for _ in 0..k {
            out.push(cur.clone());
            cur = &cur * &z;
        }
        Ok(out)
    }

    pub fn checked_add<'a>(&'a self, a: &FieldElement<'a>, b: &FieldElement<'a>) -> Result<FieldElement<'a>, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a + b)
    }

    pub fn checked_mul<'a>(&'a self, a: &FieldElement<'a>, b: &FieldElement<'a>) -> Result<FieldElement<'a>, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a * b)
    }
}

impl<'a> FieldElement<'a> {
    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 % self.ctx.p && self.c[1..].iter().all(|&x| x == 0)
    }

    pub fn square(&self) -> FieldElement<'a> {
        self * self
    }

    pub fn pow(&self, k: &Natural) -> FieldElement<'a> {
        FieldElement { ctx: self.ctx, c: pow_raw(&self.c, k, &self.ctx.fold, self.ctx.p) }
    }

    pub fn pow_u64(&self, k: u64) -> FieldElement<'a> {
        self.pow(&nat(k))
    }

    pub fn inv(&self) -> Result<FieldElement<'a>, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(&(&self.ctx.order_minus_one - Natural::ONE)))
    }

    pub fn scale(&self, k: u64) -> FieldElement<'a> {
        let p = self.ctx.p;
        FieldElement { ctx: self.ctx, c: self.c.iter().map(|&x| mul_mod(x, k % p, p)).collect() }
    }

    pub fn add_constant(&self, k: i64) -> FieldElement<'a> {
        let mut c = self.c.clone();
        let p = self.ctx.p;
        c[0] = (c[0] + k.rem_euclid(p as i64) as u64) % p;
        FieldElement { ctx: self.ctx, c }
    }

    /// Base-p index of this element; inverse of `FieldCtx::element_by_index`.
    pub fn index(&self) -> u128 {
        self.c.iter().rev().fold(0u128, |acc, &x| acc * self.ctx.p as u128 + x as u128)
    }
}

fn same_owner(a: &FieldElement<'_>, b: &FieldElement<'_>) {
    assert!(std::ptr::eq(a.ctx, b.ctx), "{}", FieldError::MixedOwners);
}

impl<'a> Add for &FieldElement<'a> {
    type Output = FieldElement<'a>;
    fn add(self, rhs: Self) -> FieldElement<'a> {
        same_owner(self, rhs);
        let p = self.ctx.p;
        let c = self.c.iter().zip(&rhs.c).map(|(&x, &y)| (x + y) % p).collect();
        FieldElement { ctx: self.ctx, c }
    }
}

impl<'a> Sub for &FieldElement<'a> {
    type Output = FieldElement<'a>;
    fn sub(self, rhs: Self) -> FieldElement<'a> {
        same_owner(self, rhs);
        let p = self.ctx.p;
        let c = self.c.iter().zip(&rhs.c).map(|(&x, &y)| (x + p - y) % p).collect();
        FieldElement { ctx: self.ctx, c }
    }
}

impl<'a> Mul for &FieldElement<'a> {
    type Output = FieldElement<'a>;
    fn mul(self, rhs: Self) -> FieldElement<'a> {
        same_owner(self, rhs);
        FieldElement { ctx: self.ctx, c: mul_raw(&self.c, &rhs.c, &self.ctx.fold, self.ctx.p) }
    }
}

impl<'a> Neg for &FieldElement<'a> {
    type Output = FieldElement<'a>;
    fn neg(self) -> FieldElement<'a> {
        let p = self.ctx.p;
        FieldElement { ctx: self.ctx, c: self.c.iter().map(|&x| (p - x) % p).collect() }
    }
}

/// Inverse of `a` modulo the prime `p`.
pub fn prime_inverse(a: u64, p: u64) -> Option<u64> {
    inv_mod(a, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let f = FieldCtx::build(5, 3, 1, 80).unwrap();
        assert_eq!(f.size(), nat(125));
        let f = FieldCtx::build(11, 6, 1, 80).unwrap();
        assert_eq!(f.size(), nat(1_771_561));
        let f = FieldCtx::build(7, 1, 1, 80).unwrap();
        assert_eq!(f.modulus().len(), 2);
        assert!(matches!(FieldCtx::build(7, 81, 1, 80), Err(FieldError::DegreeCap { .. })));
    }

    #[test]
    fn axioms_and_frobenius() {
        let ctx = FieldCtx::build(7, 5, 3, 80).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let x = ctx.random(&mut rng);
            if x.is_zero() {
                continue;
            }
            assert!((&x * &x.inv().unwrap()).is_one());
            assert!(x.pow(ctx.unit_order()).is_one());
            assert_eq!(x.pow_u64(7), ctx.frobenius(&x, 1));
            assert_eq!(ctx.frobenius(&x, 5), x);
            assert_eq!(ctx.trace_to_prime(&x), ctx.trace_linear(&x));
        }
        assert_eq!(ctx.trace_to_prime(&ctx.one()), 5);
        assert!(ctx.zero().inv().is_err());
    }

    #[test]
    fn roots() {
        let ctx = FieldCtx::build(3, 3, 1, 80).unwrap();
        let roots = ctx.roots_of_unity(13, 1 << 16).unwrap();
        assert_eq!(roots.len(), 13);
        let set: std::collections::HashSet<_> = roots.iter().map(|r| r.coeffs().to_vec()).collect();
        assert_eq!(set.len(), 13);
        assert!(roots.iter().all(|r| r.pow_u64(13).is_one()));
        assert_eq!(ctx.roots_of_unity(1, 4).unwrap().len(), 1);
        assert!(matches!(ctx.roots_of_unity(13, 4), Err(FieldError::UnityCap { .. })));
        assert!(matches!(ctx.roots_of_unity(5, 100), Err(FieldError::NotADivisor { .. })));
    }

    #[test]
    fn mixed_owners_rejected() {
        let a = FieldCtx::build(5, 2, 1, 80).unwrap();
        let b = FieldCtx::build(5, 2, 1, 80).unwrap();
        assert_eq!(a.checked_mul(&a.one(), &b.one()), Err(FieldError::MixedOwners));
        assert!(a.checked_add(&a.one(), &a.one()).is_ok());
    }

    #[test]
    fn prime_subfield() {
        let ctx = FieldCtx::build(5, 3, 1, 80).unwrap();
        assert_eq!(ctx.in_prime_subfield(&ctx.constant(4)), Some(4));
        assert_eq!(ctx.in_prime_subfield(&ctx.generator_x()), None);
    }
}
