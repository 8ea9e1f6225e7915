//! Ball-packing searches producing the radius sequences used by the
//! distance-constrained and not-universal ideals.
//!
//! Balls of equal radius have equal size everywhere, and the metric is
//! right-invariant, so every search fixes the outer ball at the identity.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{mul_unchecked, Element, Group};
use crate::radius::Radius;

pub const DEFAULT_RADIUS_BUDGET: u64 = 64;

/// Largest ball the searches are willing to materialize.
pub const MAX_SEARCH_BALL: u128 = 2_000_000;

/// A sequence of radii indexed by color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RadiusSeq(pub Vec<Radius>);

impl RadiusSeq {
    pub fn from_ints(v: &[u64]) -> Self {
        RadiusSeq(v.iter().map(|&x| Radius::int(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, c: usize) -> Option<Radius> {
        self.0.get(c).copied()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }
}

/// Two disjoint balls of radius `inner` inside `Ball(1, outer)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingWitness {
    pub inner: Radius,
    pub outer: Radius,
    pub centers: (Element, Element),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DSequence {
    pub values: RadiusSeq,
    /// `witnesses[c]` certifies `values[c + 1]`.
    pub witnesses: Vec<PackingWitness>,
}

fn translate(ball_at_identity: &[Element], center: &Element) -> Vec<Element> {
    ball_at_identity
        .iter()
        .map(|g| mul_unchecked(g, center))
        .collect()
}

fn guarded_ball(group: &Group, r: u64) -> Result<Vec<Element>> {
    if group.ball_size(r) > MAX_SEARCH_BALL {
        return Err(Error::Budget(format!(
            "ball of radius {r} in {group} exceeds {MAX_SEARCH_BALL} elements"
        )));
    }
    group.ball(&group.identity(), Radius::int(r))
}

/// Re-verify a packing certificate by direct set operations.
pub fn verify_packing(group: &Group, w: &PackingWitness) -> Result<bool> {
    let outer: HashSet<Element> = group
        .ball(&group.identity(), w.outer)?
        .into_iter()
        .collect();
    let a = group.ball(&w.centers.0, w.inner)?;
    let b: HashSet<Element> = group.ball(&w.centers.1, w.inner)?.into_iter().collect();
    let inside = a.iter().chain(b.iter()).all(|g| outer.contains(g));
    let disjoint = a.iter().all(|g| !b.contains(g));
    Ok(inside && disjoint)
}

/// Search for two disjoint balls of radius `inner` inside `Ball(1, outer)`.
fn find_packing(group: &Group, inner: u64, outer: u64) -> Result<Option<(Element, Element)>> {
    let big = guarded_ball(group, outer)?;
    let big_set: HashSet<&Element> = big.iter().collect();
    let small = group.ball(&group.identity(), Radius::int(inner))?;
    let fits: Vec<(&Element, HashSet<Element>)> = big
        .iter()
        .filter_map(|x| {
            let b = translate(&small, x);
            b.iter()
                .all(|g| big_set.contains(g))
                .then(|| (x, b.into_iter().collect()))
        })
        .collect();
    for (i, (x, bx)) in fits.iter().enumerate() {
        for (y, by) in &fits[i + 1..] {
            if bx.is_disjoint(by) {
                return Ok(Some(((*x).clone(), (*y).clone())));
            }
        }
    }
    Ok(None)
}

/// Minimal integers `d_0 < … < d_count` with `|Ball(1, d_0)| >= 2` and each
/// `Ball(1, d_{c+1})` containing two disjoint balls of radius `d_c`.
pub fn d_sequence(group: &Group, count: usize, budget: u64) -> Result<DSequence> {
    let d0 = (0..=budget)
        .find(|&r| group.ball_size(r) >= 2)
        .ok_or_else(|| Error::Budget(format!("no radius <= {budget} gives a 2-element ball")))?;
    let mut values = vec![d0];
    let mut witnesses = Vec::new();
    while values.len() <= count {
        let prev = *values.last().unwrap();
        let mut found = None;
        for d in prev + 1..=budget {
            if let Some(centers) = find_packing(group, prev, d)? {
                found = Some((d, centers));
                break;
            }
        }
        let (d, centers) = found.ok_or_else(|| {
            Error::Budget(format!(
                "no packing of two radius-{prev} balls within radius budget {budget} in {group}"
            ))
        })?;
        witnesses.push(PackingWitness {
            inner: Radius::int(prev),
            outer: Radius::int(d),
            centers,
        });
        values.push(d);
    }
    Ok(DSequence {
        values: RadiusSeq::from_ints(&values),
        witnesses,
    })
}

/// Minimal integer `D` such that `{γ : 2d < |γ| <= D}` contains a ball of
/// radius `d`. Returns `D` together with a witness center.
pub fn annulus_d(group: &Group, d: Radius, budget: u64) -> Result<(u64, Element)> {
    let twice = d.double();
    let small = group.ball(&group.identity(), Radius::int(d.floor()))?;
    for big_d in twice.floor() + 1..=budget {
        let candidates = guarded_ball(group, big_d)?;
        for x in candidates.iter().filter(|x| twice.exceeded_by(x.norm())) {
            let inside = small.iter().all(|g| {
                let n = mul_unchecked(g, x).norm();
                twice.exceeded_by(n) && n <= big_d
            });
            if inside {
                return Ok((big_d, x.clone()));
            }
        }
    }
    Err(Error::Budget(format!(
        "no annulus radius <= {budget} contains a radius-{d} ball in {group}"
    )))
}

/// `D_c` for every entry of a d-sequence.
pub fn annulus_sequence(group: &Group, d: &RadiusSeq, budget: u64) -> Result<RadiusSeq> {
    d.0.iter()
        .map(|&dc| annulus_d(group, dc, budget).map(|(v, _)| Radius::int(v)))
        .collect::<Result<Vec<_>>>()
        .map(RadiusSeq)
}
