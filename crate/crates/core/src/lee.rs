//! Lee spheres, Lee distance, group-order formulas and direct verification
//! that generator images tile space by Lee spheres.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupring::{AbelianGroup, GroupElem};
use crate::integer::{nat, Natural};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LeeError {
    #[error("sphere of {count} points exceeds the enumeration cap {cap}")]
    EnumerationCap { count: String, cap: u64 },
    #[error("vectors live in different ambient spaces")]
    MixedAmbient,
    #[error("group order {group} differs from the sphere size {sphere}")]
    OrderMismatch { group: u64, sphere: String },
    #[error("expected {expected} generators, got {got}")]
    GeneratorCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeeVector {
    coords: Vec<i64>,
    modulus: Option<u64>,
}

impl LeeVector {
    pub fn integral(coords: Vec<i64>) -> Self {
        LeeVector { coords, modulus: None }
    }

    pub fn modular(coords: Vec<i64>, m: u64) -> Self {
        let coords = coords.into_iter().map(|c| c.rem_euclid(m as i64)).collect();
        LeeVector { coords, modulus: Some(m) }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }
}

fn binomial(n: u64, k: u64) -> Natural {
    if k > n {
        return Natural::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = Natural::ONE;
    for i in 0..k {
        acc = acc * nat(n - i) / nat(i + 1);
    }
    acc
}

/// |S(n, r)| = sum_i 2^i C(n, i) C(r, i).
pub fn sphere_size(n: u64, r: u64) -> Natural {
    (0..=n.min(r)).fold(Natural::ZERO, |acc, i| acc + (Natural::ONE << i as usize) * binomial(n, i) * binomial(r, i))
}

pub fn group_order_r2(n: u64) -> u64 {
    let order = 2 * n * n + 2 * n + 1;
    debug_assert_eq!(nat(order), sphere_size(n, 2));
    order
}

pub fn group_order_r3(n: u64) -> u64 {
    let cubic = 4 * n * n.saturating_sub(1) * n.saturating_sub(2) / 3;
    let order = 1 + 6 * n * n + cubic;
    debug_assert_eq!(nat(order), sphere_size(n, 3));
    order
}

pub fn moore_bound_abelian(d: u64, k: u64) -> Natural {
    sphere_size(d, k)
}

/// All integer vectors of l1-norm at most r, in lexicographic order.
pub fn enumerate_sphere(n: usize, r: u64, cap: u64) -> Result<Vec<LeeVector>, LeeError> {
    let count = sphere_size(n as u64, r);
    if count > nat(cap) {
        return Err(LeeError::EnumerationCap { count: count.to_string(), cap });
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    fill(n, r as i64, &mut prefix, &mut out);
    Ok(out)
}

fn fill(n: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<LeeVector>) {
    if prefix.len() == n {
        out.push(LeeVector::integral(prefix.clone()));
        return;
    }
    for x in -budget..=budget {
        prefix.push(x);
        fill(n, budget - x.abs(), prefix, out);
        prefix.pop();
    }
}

pub fn lee_distance(x: &LeeVector, y: &LeeVector) -> Result<u64, LeeError> {
    if x.modulus != y.modulus || x.coords.len() != y.coords.len() {
        return Err(LeeError::MixedAmbient);
    }
    let total = x
        .coords
        .iter()
        .zip(&y.coords)
        .map(|(&a, &b)| {
            let d = (a - b).unsigned_abs();
            match x.modulus {
                Some(m) => {
                    let d = d % m;
                    d.min(m - d)
                }
                None => d,
            }
        })
        .sum();
    Ok(total)
}

/// An abelian group with the images of the n unit vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeWitness {
    pub group: AbelianGroup,
    pub generators: Vec<GroupElem>,
    pub n: usize,
    pub r: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub bijective: bool,
    pub collision: Option<(LeeVector, LeeVector)>,
}

/// Image of a sphere vector, sum x_i * g_i.
pub fn image(group: &AbelianGroup, generators: &[GroupElem], x: &LeeVector) -> GroupElem {
    x.coords
        .iter()
        .zip(generators)
        .fold(group.identity(), |acc, (&c, g)| group.add(&acc, &group.scale(g, c)))
}

pub fn verify_witness(w: &CodeWitness) -> Result<WitnessReport, LeeError> {
    let sphere = sphere_size(w.n as u64, w.r);
    if nat(w.group.order()) != sphere {
        return Err(LeeError::OrderMismatch { group: w.group.order(), sphere: sphere.to_string() });
    }
    if w.generators.len() != w.n {
        return Err(LeeError::GeneratorCount { expected: w.n, got: w.generators.len() });
    }
    let points = enumerate_sphere(w.n, w.r, u64::MAX)?;
    let mut seen: HashMap<GroupElem, LeeVector> = HashMap::with_capacity(points.len());
    for x in points {
        let img = image(&w.group, &w.generators, &x);
        if let Some(prev) = seen.get(&img) {
            return Ok(WitnessReport { bijective: false, collision: Some((prev.clone(), x)) });
        }
        seen.insert(img, x);
    }
    Ok(WitnessReport { bijective: true, collision: None })
}

const GLYPHS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Text picture of a two-dimensional tiling: each lattice point shows the
/// glyph of its image in the group, so every tile centre shares glyph 0.
pub fn render_tiling(w: &CodeWitness, width: i64, height: i64) -> String {
    let mut out = String::new();
    for y in (0..height).rev() {
        for x in 0..width {
            let v = LeeVector::integral(vec![x, y]);
            let idx = w.group.index_of(&image(&w.group, &w.generators, &v));
            out.push(GLYPHS.get(idx).map_or('?', |&b| b as char));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(sphere_size(2, 2), nat(13));
        assert_eq!(sphere_size(7, 1), nat(15));
        assert_eq!(sphere_size(2, 3), nat(25));
        assert_eq!(group_order_r2(6), 85);
        assert_eq!(group_order_r2(102), 21013);
        assert_eq!(group_order_r3(3), 63);
        assert_eq!(moore_bound_abelian(2, 2), nat(13));
        assert_eq!(moore_bound_abelian(4, 1), nat(9));
    }

    #[test]
    fn enumeration() {
        let one = enumerate_sphere(1, 2, 100).unwrap();
        let coords: Vec<i64> = one.iter().map(|v| v.coords()[0]).collect();
        assert_eq!(coords, vec![-2, -1, 0, 1, 2]);
        assert_eq!(enumerate_sphere(2, 2, 100).unwrap().len(), 13);
        assert!(enumerate_sphere(6, 6, 100).is_err());
    }

    #[test]
    fn distances() {
        let a = LeeVector::modular(vec![0, 0], 13);
        let b = LeeVector::modular(vec![6, 8], 13);
        assert_eq!(lee_distance(&a, &b).unwrap(), 11);
        assert_eq!(lee_distance(&a, &a).unwrap(), 0);
        assert_eq!(lee_distance(&a, &LeeVector::integral(vec![0, 0])), Err(LeeError::MixedAmbient));
    }

    #[test]
    fn witnesses() {
        let w = CodeWitness { group: AbelianGroup::cyclic(13), generators: vec![vec![1], vec![5]], n: 2, r: 2 };
        assert!(verify_witness(&w).unwrap().bijective);
        let bad = CodeWitness { generators: vec![vec![1], vec![2]], ..w.clone() };
        let report = verify_witness(&bad).unwrap();
        assert!(!report.bijective);
        assert!(report.collision.is_some());
        let r3 = CodeWitness { group: AbelianGroup::cyclic(25), generators: vec![vec![1], vec![7]], n: 2, r: 3 };
        assert!(verify_witness(&r3).unwrap().bijective);
        let wrong = CodeWitness { group: AbelianGroup::cyclic(12), ..w.clone() };
        assert!(verify_witness(&wrong).is_err());
        let picture = render_tiling(&w, 13, 2);
        assert_eq!(picture.lines().count(), 2);
        assert_eq!(picture, render_tiling(&w, 13, 2));
    }
}
