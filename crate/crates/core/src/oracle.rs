//! Brute-force ground truth: search every abelian group of the sphere's
//! order for generator images that map the Lee sphere bijectively.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::caps::Caps;
use crate::groupring::{AbelianGroup, GroupElem};
use crate::integer::{factorize_u64, gcd_u64, to_u64};
use crate::lee::{sphere_size, CodeWitness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("sphere of size {0} is beyond the oracle's reach")]
    TooLarge(String),
    #[error("search_node_budget of {0} nodes exhausted")]
    Budget(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMenu {
    pub order: u64,
    pub groups: Vec<AbelianGroup>,
}

fn partitions(e: u32) -> Vec<Vec<u32>> {
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=left.min(max)).rev() {
            cur.push(part);
            rec(left - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(e, e, &mut Vec::new(), &mut out);
    out
}

/// One group per isomorphism class, in invariant-factor form, cyclic first.
pub fn enumerate_abelian_groups(order: u64) -> GroupMenu {
    let mut menus: Vec<Vec<u64>> = vec![Vec::new()];
    for (q, e) in factorize_u64(order) {
        let mut next = Vec::new();
        for base in &menus {
            for parts in partitions(e) {
                // parts are descending; the k-th largest part feeds the k-th largest factor.
                let len = base.len().max(parts.len());
                let mut factors: Vec<u64> = vec![1; len];
                for (k, slot) in factors.iter_mut().enumerate() {
                    let from_base = base.len().checked_sub(1 + k).map_or(1, |i| base[i]);
                    let from_q = parts.get(k).map_or(1, |&x| q.pow(x));
                    *slot = from_base * from_q;
                }
                factors.reverse();
                next.push(factors);
            }
        }
        menus = next;
    }
    let groups = menus
        .into_iter()
        .map(|f| if f.is_empty() { AbelianGroup::cyclic(1) } else { AbelianGroup::new(f).expect("chain by construction") })
        .collect();
    GroupMenu { order, groups }
}

struct Dfs<'a> {
    group: &'a AbelianGroup,
    elems: Vec<GroupElem>,
    /// Generators still to choose after the first.
    remaining: usize,
    r: u64,
    nodes: u64,
    budget: u64,
}

/// Sphere points seen so far, as (element index, l1 norm).
type Partial = Vec<(usize, u64)>;

impl Dfs<'_> {
    fn add(&self, a: usize, b: usize) -> usize {
        self.group.index_of(&self.group.add(&self.elems[a], &self.elems[b]))
    }

    fn multiple(&self, a: usize, t: i64) -> usize {
        self.group.index_of(&self.group.scale(&self.elems[a], t))
    }

    /// Add a new generator; None if some sphere point collides.
    fn extend(&self, partial: &Partial, a: usize) -> Option<Partial> {
        let mut seen = vec![false; self.elems.len()];
        for &(x, _) in partial {
            seen[x] = true;
        }
        let mut out = partial.clone();
        for t in 1..=self.r {
            for signed in [t as i64, -(t as i64)] {
                let step = self.multiple(a, signed);
                for &(x, norm) in partial.iter().filter(|(_, norm)| norm + t <= self.r) {
                    let y = self.add(x, step);
                    if std::mem::replace(&mut seen[y], true) {
                        return None;
                    }
                    out.push((y, norm + t));
                }
            }
        }
        Some(out)
    }

    fn run(&mut self, partial: &Partial, chosen: &mut Vec<usize>, pool: &[usize]) -> Result<bool, OracleError> {
        if chosen.len() == self.remaining {
            return Ok(partial.len() == self.elems.len());
        }
        let start = chosen.last().map_or(0, |&last| pool.iter().position(|&x| x == last).map_or(0, |i| i + 1));
        for &a in &pool[start..] {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(OracleError::Budget(self.budget));
            }
            if let Some(next) = self.extend(partial, a) {
                chosen.push(a);
                if self.run(&next, chosen, pool)? {
                    return Ok(true);
                }
                chosen.pop();
            }
        }
        Ok(false)
    }
}

/// Depth-first search for a witness in one group. Generators are taken in
/// increasing index order with one representative of each {a, -a}; in a
/// cyclic group of order m the generator of least gcd(a, m) is moved to that
/// divisor by a unit multiplication, which maps witnesses to witnesses.
pub fn search_code(n: usize, r: u64, group: &AbelianGroup, caps: &Caps) -> Result<Option<CodeWitness>, OracleError> {
    let size = sphere_size(n as u64, r);
    if to_u64(&size) != Some(group.order()) {
        return Ok(None);
    }
    let elems: Vec<GroupElem> = group.elements().collect();
    let order = elems.len();
    let canonical: Vec<usize> = (1..order)
        .filter(|&i| {
            let neg = group.index_of(&group.neg(&elems[i]));
            i <= neg
        })
        .collect();
    let mut dfs = Dfs { group, elems, remaining: n.saturating_sub(1), r, nodes: 0, budget: caps.search_node_budget };
    let origin: Partial = vec![(0, 0)];
    if n == 0 {
        return Ok((order == 1).then(|| CodeWitness { group: group.clone(), generators: Vec::new(), n, r }));
    }
    let firsts: Vec<(usize, Vec<usize>)> = if group.is_cyclic() {
        let m = order as u64;
        (1..m)
            .filter(|d| m.is_multiple_of(*d))
            .map(|d| {
                let rest = canonical.iter().copied().filter(|&b| b as u64 != d && gcd_u64(b as u64, m) >= d).collect();
                (d as usize, rest)
            })
            .collect()
    } else {
        canonical.iter().map(|&a| (a, canonical.iter().copied().filter(|&b| b > a).collect())).collect()
    };
    for (first, rest) in firsts {
        dfs.nodes += 1;
        let Some(partial) = dfs.extend(&origin, first) else { continue };
        let mut chosen = Vec::new();
        if dfs.run(&partial, &mut chosen, &rest)? {
            let mut generators = vec![dfs.elems[first].clone()];
            generators.extend(chosen.iter().map(|&i| dfs.elems[i].clone()));
            return Ok(Some(CodeWitness { group: group.clone(), generators, n, r }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleVerdict {
    Exists { witness: CodeWitness },
    NotExists { groups: Vec<String> },
    Skipped { reason: String },
}

/// Largest group the oracle will try to search.
pub const ORACLE_MAX_ORDER: u64 = 1 << 16;

pub fn oracle_verdict(n: usize, r: u64, caps: &Caps) -> OracleVerdict {
    let size = sphere_size(n as u64, r);
    let order = match to_u64(&size) {
        Some(o) if o <= ORACLE_MAX_ORDER => o,
        _ => return OracleVerdict::Skipped { reason: OracleError::TooLarge(size.to_string()).to_string() },
    };
    let menu = enumerate_abelian_groups(order);
    let mut skipped = None;
    for group in &menu.groups {
        match search_code(n, r, group, caps) {
            Ok(Some(witness)) => return OracleVerdict::Exists { witness },
            Ok(None) => {}
            Err(e) => skipped = Some(format!("{group}: {e}")),
        }
    }
    match skipped {
        Some(reason) => OracleVerdict::Skipped { reason },
        None => OracleVerdict::NotExists { groups: menu.groups.iter().map(|g| g.to_string()).collect() },
    }
}

/// Two generator sets of a cyclic group agree up to order, signs and a unit multiplier.
pub fn cyclic_equivalent(m: u64, a: &[u64], b: &[u64]) -> bool {
    let normalize = |set: Vec<u64>| {
        let mut s: Vec<u64> = set.into_iter().map(|x| (x % m).min((m - x % m) % m)).collect();
        s.sort_unstable();
        s
    };
    let target = normalize(b.to_vec());
    (1..m)
        .filter(|&u| gcd_u64(u, m) == 1)
        .any(|u| normalize(a.iter().map(|&x| x * u % m).collect()) == target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(order: u64) -> Vec<String> {
        enumerate_abelian_groups(order).groups.iter().map(|g| g.to_string()).collect()
    }

    #[test]
    fn menus() {
        assert_eq!(names(25), vec!["C25", "C5xC5"]);
        assert_eq!(names(13), vec!["C13"]);
        assert_eq!(names(63), vec!["C63", "C3xC21"]);
        assert_eq!(names(72).len(), 6);
    }

    #[test]
    fn small_witnesses() {
        let caps = Caps::default();
        let w = search_code(2, 2, &AbelianGroup::cyclic(13), &caps).unwrap().unwrap();
        let flat: Vec<u64> = w.generators.iter().map(|g| g[0]).collect();
        assert!(cyclic_equivalent(13, &flat, &[1, 5]));
        let line = search_code(1, 2, &AbelianGroup::cyclic(5), &caps).unwrap().unwrap();
        assert_eq!(line.generators, vec![vec![1]]);
        assert!(cyclic_equivalent(25, &[1, 7], &[7, 1]));
        assert!(!cyclic_equivalent(13, &[1, 2], &[1, 5]));
    }
}
