//! Coefficient conditions on theta(x, y) = sum of (xy)^(2^i) (or its traces),
//! evaluated over every lambda-th root of unity x and v-th root of unity y.

use serde_json::json;

use super::lambda::{lambda_check_with, lambda_params, LambdaCertificate};
use super::{CriterionId, CriterionOutcome, Status, Tier};
use crate::caps::Caps;
use crate::field::{FieldCtx, FieldElement};
use crate::integer::{gcd_u64, to_u64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMode {
    /// 2 is primitive mod v: sum the v-1 successive squares.
    PowerSum,
    /// Sum the traces of the first d successive squares.
    Trace,
}

impl ThetaMode {
    pub fn terms(self, v: u64, d: u64) -> u64 {
        match self {
            ThetaMode::PowerSum => v - 1,
            ThetaMode::Trace => d,
        }
    }
}

/// theta(x, y) as a prime-field residue, or None when the power sum leaves
/// the prime field (such x cannot come from integer coefficients).
pub fn theta(ctx: &FieldCtx, x: &FieldElement<'_>, y: &FieldElement<'_>, v: u64, d: u64, mode: ThetaMode) -> Option<u64> {
    let mut t = x * y;
    match mode {
        ThetaMode::PowerSum => {
            let mut sum = ctx.zero();
            for _ in 0..mode.terms(v, d) {
                sum = &sum + &t;
                t = t.square();
            }
            ctx.in_prime_subfield(&sum)
        }
        ThetaMode::Trace => {
            let p = ctx.p();
            let mut sum = 0;
            for _ in 0..d {
                sum = (sum + ctx.trace_linear(&t)) % p;
                t = t.square();
            }
            Some(sum)
        }
    }
}

/// Above this many stored coefficients the power table is not built.
const TABLE_LIMIT: u64 = 1 << 23;

/// Powers of one generator of order lcm(lambda, v). Every product xy is one
/// of them, so each term of theta becomes a lookup instead of a product.
struct PowerTable {
    order: u64,
    degree: usize,
    p: u64,
    /// Coefficient vectors, stored only for power-sum mode.
    flat: Vec<u64>,
    traces: Vec<u64>,
}

impl PowerTable {
    fn build(ctx: &FieldCtx, order: u64, mode: ThetaMode) -> Option<PowerTable> {
        let degree = ctx.degree();
        let stored = if mode == ThetaMode::PowerSum { order * degree as u64 } else { order };
        if stored > TABLE_LIMIT {
            return None;
        }
        let w = ctx.element_of_order(order).ok()?;
        let mut flat = Vec::with_capacity(if mode == ThetaMode::PowerSum { stored as usize } else { 0 });
        let mut traces = Vec::with_capacity(order as usize);
        let mut cur = ctx.one();
        for _ in 0..order {
            match mode {
                ThetaMode::PowerSum => flat.extend_from_slice(cur.coeffs()),
                ThetaMode::Trace => traces.push(ctx.trace_linear(&cur)),
            }
            cur = &cur * &w;
        }
        Some(PowerTable { order, degree, p: ctx.p(), flat, traces })
    }

    /// theta at w^e; same contract as [`theta`].
    fn theta(&self, e: u64, v: u64, d: u64, mode: ThetaMode, acc: &mut [u128]) -> Option<u64> {
        let mut idx = e % self.order;
        match mode {
            ThetaMode::PowerSum => {
                acc.iter_mut().for_each(|a| *a = 0);
                for _ in 0..mode.terms(v, d) {
                    let row = &self.flat[idx as usize * self.degree..][..self.degree];
                    acc.iter_mut().zip(row).for_each(|(a, &c)| *a += c as u128);
                    idx = idx * 2 % self.order;
                }
                let p = self.p as u128;
                acc[1..].iter().all(|&a| a % p == 0).then(|| (acc[0] % p) as u64)
            }
            ThetaMode::Trace => {
                let mut sum = 0u128;
                for _ in 0..d {
                    sum += self.traces[idx as usize] as u128;
                    idx = idx * 2 % self.order;
                }
                Some((sum % self.p as u128) as u64)
            }
        }
    }
}

#[derive(Debug, Default)]
struct Tally {
    inadmissible: u64,
    sum_fails: u64,
    range_fails: u64,
    count_fails: u64,
    survivors: Vec<u64>,
}

/// Evaluate one candidate x (given as its exponent in the lambda-th roots).
fn judge(theta_values: Option<Vec<u64>>, m: u64, n: u64, p: u64, tally: &mut Tally, exponent: u64) {
    let Some(values) = theta_values else {
        tally.inadmissible += 1;
        return;
    };
    let ok = if m > 1 {
        let total = values.iter().fold(0u64, |acc, &t| (acc + t) % p);
        let sum_ok = ((m % p) * total).is_multiple_of(p);
        let range_ok = values.iter().all(|&t| (m % p) * ((1 + p - t) % p) % p <= m);
        tally.sum_fails += u64::from(!sum_ok);
        tally.range_fails += u64::from(sum_ok && !range_ok);
        sum_ok && range_ok
    } else {
        let ones = values.iter().filter(|&&t| t == 1).count() as u64;
        let zeros = values.iter().filter(|&&t| t == 0).count() as u64;
        let ok = ones == 2 * n * n && zeros == 2 * n + 1;
        tally.count_fails += u64::from(!ok);
        ok
    };
    if ok {
        tally.survivors.push(exponent);
    }
}

fn skipped(cert: &LambdaCertificate, reason: String) -> CriterionOutcome {
    CriterionOutcome::new(CriterionId::FieldConditions, Status::Skipped(reason))
        .param("v", cert.params.v)
        .param("p", cert.params.p)
        .with_certificate(cert.to_json())
}

/// Excluded when no lambda-th root of unity x satisfies the coefficient
/// conditions: m * sum_y theta = 0 and m(1 - theta) mod p in 0..=m when
/// m > 1, or the exact 0/1 counts when the group is cyclic of order v.
pub fn field_check_with(cert: &LambdaCertificate, caps: &Caps) -> CriterionOutcome {
    let prm = &cert.params;
    let (n, v, p, m) = (prm.n, prm.v, prm.p, prm.m);
    if !cert.hypotheses_ok() {
        return CriterionOutcome::new(CriterionId::FieldConditions, Status::NotApplicable("invariant hypotheses fail".into()))
            .param("v", v)
            .param("p", p);
    }
    if prm.f > caps.max_field_degree as u64 {
        return skipped(cert, format!("max_field_degree: f = {} > {}", prm.f, caps.max_field_degree));
    }
    let lambda = match to_u64(&cert.lambda) {
        Some(l) if l <= caps.max_unity_enum => l,
        _ => return skipped(cert, format!("max_unity_enum: lambda = {} > {}", cert.lambda, caps.max_unity_enum)),
    };
    if v > caps.max_unity_enum {
        return skipped(cert, format!("max_unity_enum: v = {v} > {}", caps.max_unity_enum));
    }
    let mode = if prm.h2 == v - 1 { ThetaMode::PowerSum } else { ThetaMode::Trace };
    let work = lambda as u128 * v as u128 * mode.terms(v, prm.d) as u128;
    if work > caps.search_node_budget as u128 {
        return skipped(cert, format!("search_node_budget: {work} field products > {}", caps.search_node_budget));
    }
    let ctx = match FieldCtx::build(p, prm.f as usize, caps.seed, caps.max_field_degree) {
        Ok(ctx) => ctx,
        Err(e) => return skipped(cert, e.to_string()),
    };
    let mut tally = Tally::default();
    let joint = lambda / gcd_u64(lambda, v) * v;
    if let Some(table) = PowerTable::build(&ctx, joint, mode) {
        let (x_step, y_step) = (joint / lambda, joint / v);
        let mut acc = vec![0u128; ctx.degree()];
        for k in 0..lambda {
            let values: Option<Vec<u64>> =
                (0..v).map(|j| table.theta(k * x_step + j * y_step, v, prm.d, mode, &mut acc)).collect();
            judge(values, m, n, p, &mut tally, k);
        }
    } else {
        let ys = ctx.roots_of_unity(v, caps.max_unity_enum).expect("v divides p^f - 1");
        let xs = ctx.roots_of_unity(lambda, caps.max_unity_enum).expect("lambda divides p^l - 1");
        for (k, x) in xs.iter().enumerate() {
            let values: Option<Vec<u64>> = ys.iter().map(|y| theta(&ctx, x, y, v, prm.d, mode)).collect();
            judge(values, m, n, p, &mut tally, k as u64);
        }
    }
    let status = if tally.survivors.is_empty() { Status::Excluded(Tier::Unconditional) } else { Status::Undecided };
    let mut certificate = cert.to_json();
    certificate["mode"] = json!(match mode {
        ThetaMode::PowerSum => "power_sum",
        ThetaMode::Trace => "trace",
    });
    certificate["candidates"] = json!(lambda);
    certificate["inadmissible"] = json!(tally.inadmissible);
    certificate["sum_condition_failures"] = json!(tally.sum_fails);
    certificate["range_condition_failures"] = json!(tally.range_fails);
    certificate["count_condition_failures"] = json!(tally.count_fails);
    certificate["surviving_exponents"] = json!(tally.survivors);
    certificate["range_condition_vacuous"] = json!(m > 1 && m + 1 >= p);
    CriterionOutcome::new(CriterionId::FieldConditions, status)
        .param("v", v)
        .param("p", p)
        .param("lambda", lambda)
        .param("d", prm.d)
        .with_certificate(certificate)
}

pub fn field_check(n: u64, v: u64, p: u64, caps: &Caps) -> CriterionOutcome {
    match lambda_check_with(lambda_params(n, v, p), caps) {
        (_, Some(cert)) => field_check_with(&cert, caps),
        (outcome, None) => CriterionOutcome::new(CriterionId::FieldConditions, outcome.status)
            .param("v", v)
            .param("p", p)
            .with_certificate(outcome.certificate),
    }
}
