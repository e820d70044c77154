//! Integer number theory: primality, factorization, orders, square roots,
//! discrete logarithms and the shifted-solvability test.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use dashu_int::fast_div::ConstDivisor;
use dashu_int::ops::{BitTest, Gcd, SquareRoot};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dashu_int::UBig as Natural;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegerError {
    #[error("{a} is not a unit modulo {modulus}")]
    NotCoprime { a: String, modulus: String },
    #[error("modulus must be at least {min}, got {got}")]
    ModulusTooSmall { min: u32, got: String },
    #[error("factorization budget exhausted on cofactor {cofactor}")]
    BudgetExceeded { cofactor: String },
    #[error("cannot factor zero")]
    Zero,
}

/// Bases that make Miller-Rabin exact below 3.3 * 10^24.
const WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const DETERMINISTIC_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;
const RANDOM_ROUNDS: usize = 64;
const TRIAL_BOUND: u64 = 1 << 12;

pub fn nat(x: u64) -> Natural {
    Natural::from(x)
}

pub fn to_u64(x: &Natural) -> Option<u64> {
    u64::try_from(x).ok()
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub fn mod_pow(base: &Natural, exponent: &Natural, modulus: &Natural) -> Natural {
    if modulus.is_one() {
        return Natural::ZERO;
    }
    if let (Some(b), Some(e), Some(m)) = (to_u64(base), to_u64(exponent), to_u64(modulus)) {
        return nat(pow_mod(b, e, m));
    }
    let ring = ConstDivisor::new(modulus.clone());
    ring.reduce(base.clone()).pow(exponent).residue()
}

pub fn gcd(a: &Natural, b: &Natural) -> Natural {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    a.gcd(b)
}

fn miller_rabin_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    WITNESSES.iter().all(|&a| miller_rabin_u64(n, a))
}

fn miller_rabin_big(n: &Natural, a: &Natural) -> bool {
    let one = Natural::ONE;
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let ring = ConstDivisor::new(n.clone());
    let mut x = ring.reduce(a.clone()).pow(&d).residue();
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

/// Outcome of a primality test, separating proofs from probable answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Primality {
    Composite,
    Prime,
    ProbablePrime,
}

pub fn primality(n: &Natural, seed: u64) -> Primality {
    if let Some(small) = to_u64(n) {
        return if is_prime_u64(small) { Primality::Prime } else { Primality::Composite };
    }
    for &p in &WITNESSES {
        if (n % p) == 0 {
            return Primality::Composite;
        }
    }
    let deterministic = u128::try_from(n).is_ok_and(|v| v < DETERMINISTIC_LIMIT);
    if deterministic {
        let ok = WITNESSES.iter().all(|&a| miller_rabin_big(n, &nat(a)));
        return if ok { Primality::Prime } else { Primality::Composite };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let span = n - nat(3);
    for _ in 0..RANDOM_ROUNDS {
        let a = random_below(&mut rng, &span) + nat(2);
        if !miller_rabin_big(n, &a) {
            return Primality::Composite;
        }
    }
    Primality::ProbablePrime
}

pub fn is_prime(n: &Natural) -> bool {
    primality(n, 0) != Primality::Composite
}

fn random_below(rng: &mut ChaCha8Rng, bound: &Natural) -> Natural {
    let words = bound.bit_len() / 64 + 2;
    let mut acc = Natural::ZERO;
    for _ in 0..words {
        acc = (acc << 64) + nat(rng.gen::<u64>());
    }
    acc % bound
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: Natural,
    pub factors: Vec<(Natural, u32)>,
    /// Some prime factor was only shown to be a probable prime.
    pub probabilistic: bool,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &Natural> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn recompose(&self) -> Natural {
        self.factors.iter().fold(Natural::ONE, |acc, (p, e)| acc * p.pow(*e as usize))
    }

    pub fn from_u64(n: u64) -> Factorization {
        Factorization {
            n: nat(n),
            factors: factorize_u64(n).into_iter().map(|(p, e)| (nat(p), e)).collect(),
            probabilistic: false,
        }
    }

    pub fn small_primes(&self) -> Vec<u64> {
        self.primes().filter_map(to_u64).collect()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

fn pollard_brent_u64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += m;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let r = isqrt_u64(n);
    if r * r == n {
        split_u64(r, out);
        split_u64(r, out);
        return;
    }
    let d = (1..)
        .find_map(|c| pollard_brent_u64(n, c))
        .expect("rho always splits a composite u64 for some constant");
    split_u64(d, out);
    split_u64(n / d, out);
}

fn collect(mut primes: Vec<u64>) -> Vec<(u64, u32)> {
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Complete factorization of a machine integer. Always succeeds.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize_u64 requires n >= 1");
    let mut primes = Vec::new();
    for p in [2u64, 3, 5] {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    let mut d = 7u64;
    let steps = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut i = 0;
    while d <= TRIAL_BOUND && d * d <= n {
        while n.is_multiple_of(d) {
            primes.push(d);
            n /= d;
        }
        d += steps[i];
        i = (i + 1) % 8;
    }
    split_u64(n, &mut primes);
    collect(primes)
}

pub fn distinct_primes_u64(n: u64) -> Vec<u64> {
    factorize_u64(n).into_iter().map(|(p, _)| p).collect()
}

fn pollard_brent_big(n: &Natural, c: &Natural, budget: &mut u64) -> Option<Natural> {
    let f = |x: &Natural| (x * x + c) % n;
    let mut y = nat(2);
    let mut r = 1u64;
    let mut q = Natural::ONE;
    let mut g = Natural::ONE;
    let mut x = y.clone();
    let mut ys = y.clone();
    let m = 128u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = m.min(r - k);
            if *budget < steps {
                return None;
            }
            *budget -= steps;
            for _ in 0..steps {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = gcd(&q, n);
            k += m;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = gcd(&diff, n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Factorization of an arbitrary-precision integer. `budget` bounds the
/// total number of rho iterations; exhausting it is an error, never a
/// partial answer.
pub fn factorize(n: &Natural, budget: u64, seed: u64) -> Result<Factorization, IntegerError> {
    if n.is_zero() {
        return Err(IntegerError::Zero);
    }
    if let Some(small) = to_u64(n) {
        return Ok(Factorization::from_u64(small));
    }
    let mut rest = n.clone();
    let mut primes: Vec<Natural> = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_BOUND {
        while (&rest % d) == 0 {
            primes.push(nat(d));
            rest /= nat(d);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = budget;
    let mut probabilistic = false;
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = to_u64(&m) {
            primes.extend(factorize_u64(small).into_iter().flat_map(|(p, e)| std::iter::repeat_n(nat(p), e as usize)));
            continue;
        }
        match primality(&m, seed) {
            Primality::Prime => {
                primes.push(m);
                continue;
            }
            Primality::ProbablePrime => {
                probabilistic = true;
                primes.push(m);
                continue;
            }
            Primality::Composite => {}
        }
        let root = m.sqrt();
        if &root * &root == m {
            stack.push(root.clone());
            stack.push(root);
            continue;
        }
        let mut found = None;
        while found.is_none() {
            if remaining == 0 {
                return Err(IntegerError::BudgetExceeded { cofactor: m.to_string() });
            }
            let c = nat(rng.gen_range(1..u64::MAX));
            found = pollard_brent_big(&m, &c, &mut remaining);
        }
        let d = found.expect("loop exits with a divisor");
        stack.push(&m / &d);
        stack.push(d);
    }
    primes.sort();
    let mut factors: Vec<(Natural, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { n: n.clone(), factors, probabilistic })
}

pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn square_root_u64(n: u64) -> Option<u64> {
    let r = isqrt_u64(n);
    (r * r == n).then_some(r)
}

pub fn is_perfect_square(n: &Natural) -> Option<Natural> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Euler's totient together with its factorization, for a machine modulus.
fn totient_factored(m: u64) -> (u64, Vec<(u64, u32)>) {
    let mut primes = Vec::new();
    let mut phi = 1u64;
    for (p, e) in factorize_u64(m) {
        phi *= (p - 1) * p.pow(e - 1);
        primes.extend(distinct_primes_u64(p - 1));
        if e > 1 {
            primes.push(p);
        }
    }
    let phi_factors = factorize_u64(phi);
    (phi, phi_factors)
}

/// Order of `a` in a group of order `group_order` with known factorization.
pub fn order_from_factored(a: u64, modulus: u64, group_order: u64, factors: &[(u64, u32)]) -> u64 {
    let mut k = group_order;
    for &(q, _) in factors {
        while k.is_multiple_of(q) && pow_mod(a, k / q, modulus) == 1 {
            k /= q;
        }
    }
    k
}

pub fn mult_order_u64(a: u64, modulus: u64) -> Result<u64, IntegerError> {
    if modulus < 2 {
        return Err(IntegerError::ModulusTooSmall { min: 2, got: modulus.to_string() });
    }
    if gcd_u64(a % modulus, modulus) != 1 {
        return Err(IntegerError::NotCoprime { a: a.to_string(), modulus: modulus.to_string() });
    }
    let (phi, factors) = if is_prime_u64(modulus) {
        (modulus - 1, factorize_u64(modulus - 1))
    } else {
        totient_factored(modulus)
    };
    Ok(order_from_factored(a % modulus, modulus, phi, &factors))
}

pub fn mult_order(a: &Natural, modulus: &Natural) -> Result<Natural, IntegerError> {
    match (to_u64(a), to_u64(modulus)) {
        (_, Some(m)) => mult_order_u64(a % m, m).map(nat),
        _ => {
            if modulus < &nat(2) {
                return Err(IntegerError::ModulusTooSmall { min: 2, got: modulus.to_string() });
            }
            if !gcd(a, modulus).is_one() {
                return Err(IntegerError::NotCoprime { a: a.to_string(), modulus: modulus.to_string() });
            }
            let fac = factorize(modulus, u64::MAX, 0)?;
            let mut phi = Natural::ONE;
            let mut primes: Vec<Natural> = Vec::new();
            for (p, e) in &fac.factors {
                phi *= (p - Natural::ONE) * p.pow(*e as usize - 1);
            }
            for (q, _) in factorize(&phi, u64::MAX, 0)?.factors {
                primes.push(q);
            }
            let mut k = phi;
            for q in primes {
                while (&k % &q).is_zero() && mod_pow(a, &(&k / &q), modulus).is_one() {
                    k /= &q;
                }
            }
            Ok(k)
        }
    }
}

/// Least `j` in `[0, order)` with `base^j == target (mod modulus)`.
pub fn discrete_log_u64(base: u64, target: u64, modulus: u64, order: u64) -> Option<u64> {
    if order == 0 {
        return None;
    }
    let base = base % modulus;
    let target = target % modulus;
    let step = isqrt_u64(order - 1) + 1;
    let mut baby: HashMap<u64, u64> = HashMap::with_capacity(step as usize);
    let mut cur = 1 % modulus;
    for i in 0..step {
        baby.entry(cur).or_insert(i);
        cur = mul_mod(cur, base, modulus);
    }
    let giant = inv_mod(pow_mod(base, step, modulus), modulus)?;
    let mut gamma = target;
    for k in 0..step {
        if let Some(&i) = baby.get(&gamma) {
            let j = k * step + i;
            return (j < order).then_some(j);
        }
        gamma = mul_mod(gamma, giant, modulus);
    }
    None
}

pub fn discrete_log(base: &Natural, target: &Natural, modulus: &Natural, order: &Natural) -> Option<Natural> {
    let m = to_u64(modulus).expect("discrete_log supports machine-size moduli");
    let b = base % m;
    let t = target % m;
    let o = to_u64(order).expect("order below modulus");
    discrete_log_u64(b, t, m, o).map(nat)
}

/// A natural number or positive infinity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaybeInfinite {
    Finite(u64),
    Infinity,
}

impl PartialOrd for MaybeInfinite {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MaybeInfinite {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (MaybeInfinite::Finite(a), MaybeInfinite::Finite(b)) => a.cmp(b),
            (MaybeInfinite::Finite(_), MaybeInfinite::Infinity) => Ordering::Less,
            (MaybeInfinite::Infinity, MaybeInfinite::Finite(_)) => Ordering::Greater,
            (MaybeInfinite::Infinity, MaybeInfinite::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for MaybeInfinite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaybeInfinite::Finite(a) => write!(f, "{a}"),
            MaybeInfinite::Infinity => write!(f, "inf"),
        }
    }
}

/// Does `a(x+1) + b*y = t` have a solution with `x, y >= 0`?
pub fn solvable_shifted(a: &MaybeInfinite, b: u64, t: i64) -> bool {
    assert!(b >= 1, "solvable_shifted requires b >= 1");
    let a = match a {
        MaybeInfinite::Finite(a) if *a > 0 => *a,
        _ => return false,
    };
    if t < 0 {
        return false;
    }
    let t = t as u64;
    // k and k + b leave the same remainder, so k <= b suffices.
    let last = (t / a).min(b);
    (1..=last).any(|k| (t - a * k).is_multiple_of(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factorizations() {
        assert!(is_prime(&nat(21013)));
        assert!(!is_prime(&nat(1)));
        assert!(!is_prime(&nat(85)));
        assert_eq!(factorize_u64(85), vec![(5, 1), (17, 1)]);
        assert_eq!(factorize_u64(13), vec![(13, 1)]);
        assert_eq!(factorize_u64(4901), vec![(13, 2), (29, 1)]);
    }

    #[test]
    fn big_factorization() {
        let p = nat(1_000_000_007);
        let q = nat(998_244_353);
        let r = nat(18_446_744_073_709_551_557);
        let n = &p * &q * &r * &r;
        let f = factorize(&n, 1 << 30, 7).unwrap();
        assert_eq!(f.recompose(), n);
        assert_eq!(f.factors.len(), 3);
        assert!(!f.probabilistic);
        let big_prime = (nat(1) << 127) - nat(1);
        assert_eq!(primality(&big_prime, 1), Primality::ProbablePrime);
        assert_eq!(primality(&(&big_prime * nat(3)), 1), Primality::Composite);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let n = nat(1_000_000_007) * nat(998_244_353) * nat(1_000_000_009);
        assert!(matches!(factorize(&n, 1, 3), Err(IntegerError::BudgetExceeded { .. })));
    }

    #[test]
    fn squares() {
        assert_eq!(is_perfect_square(&nat(25)), Some(nat(5)));
        assert_eq!(is_perfect_square(&nat(65)), None);
        assert_eq!(is_perfect_square(&nat(0)), Some(nat(0)));
    }

    #[test]
    fn orders() {
        assert_eq!(mult_order_u64(2, 5).unwrap(), 4);
        assert_eq!(mult_order_u64(4, 13).unwrap(), 6);
        assert_eq!(mult_order_u64(7, 421).unwrap(), 70);
        assert_eq!(mult_order_u64(3, 8).unwrap(), 2);
        assert!(mult_order_u64(6, 9).is_err());
        assert_eq!(mult_order(&nat(7), &nat(421)).unwrap(), nat(70));
        let big = (nat(1) << 89) - nat(1);
        assert_eq!(mult_order(&nat(2), &big).unwrap(), nat(89));
    }

    #[test]
    fn modular_arithmetic() {
        assert_eq!(mod_pow(&nat(4), &nat(3), &nat(41)), nat(23));
        assert_eq!(gcd(&nat(0), &nat(7)), nat(7));
        assert_eq!(mod_pow(&nat(9), &nat(0), &nat(5)), nat(1));
        assert_eq!(mod_pow(&nat(9), &nat(0), &nat(1)), nat(0));
        let m = (nat(1) << 200) + nat(1);
        let e = nat(1) << 70;
        assert_eq!(mod_pow(&nat(3), &e, &m), {
            let mut x = nat(3);
            for _ in 0..70 {
                x = (&x * &x) % &m;
            }
            x
        });
    }

    #[test]
    fn discrete_logs() {
        assert_eq!(discrete_log_u64(2, 1, 13, 12), Some(0));
        assert_eq!(discrete_log_u64(2, 5, 13, 12), Some(9));
        assert_eq!(discrete_log_u64(4, 7, 13, 6), None);
    }

    #[test]
    fn shifted_solvability() {
        assert!(!solvable_shifted(&MaybeInfinite::Finite(3), 10, 4));
        assert!(solvable_shifted(&MaybeInfinite::Finite(2), 6, 2));
        assert!(!solvable_shifted(&MaybeInfinite::Infinity, 5, 100));
        assert!(!solvable_shifted(&MaybeInfinite::Finite(2), 6, -1));
        assert!(MaybeInfinite::Infinity > MaybeInfinite::Finite(u64::MAX));
    }
}
