//! Brute-force oracles: exhaustive searches over colorings of finite balls.
//!
//! All searches run a pairwise-constraint backtracker with forward checking
//! and a work budget. Running out of budget yields
//! [`Outcome::Inconclusive`], which is never treated as a refusal.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coloring::{Color, PartialColoring};
use crate::error::{Error, Result};
use crate::group::{dist_unchecked, Element, Group};
use crate::ideal::{col_window_check, Ideal, IdealKind, IdealSpec};
use crate::packing::RadiusSeq;
use crate::radius::{Bound, Radius};

pub const DEFAULT_WORK_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// The whole space was searched and nothing satisfies the constraints.
    Refuted,
    Witness,
    /// The budget ran out first.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustiveSearchReport {
    pub outcome: Outcome,
    pub variables: usize,
    /// Product of the domain sizes, saturating.
    pub search_space: u128,
    /// 1 when a witness was found (the search stops there), 0 otherwise.
    pub valid_found: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PartialColoring>,
    /// Whether the witness passed an independent membership check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_verified: Option<bool>,
    pub work_units: u64,
    pub budget: u64,
}

enum Search {
    Found(Vec<usize>),
    Exhausted,
    OutOfBudget,
}

/// Backtracking over `vars` in order; `conflict(i, a, j, b)` says variable
/// `i` with domain entry `a` excludes variable `j` with domain entry `b`.
struct Backtracker<'a> {
    domains: &'a [Vec<Color>],
    conflict: &'a dyn Fn(usize, usize, usize, usize) -> bool,
    live: Vec<Vec<bool>>,
    work: u64,
    budget: u64,
}

impl Backtracker<'_> {
    fn solve(&mut self, i: usize, chosen: &mut Vec<usize>) -> Search {
        let n = self.domains.len();
        if i == n {
            return Search::Found(chosen.clone());
        }
        for a in 0..self.domains[i].len() {
            if !self.live[i][a] {
                continue;
            }
            self.work += 1;
            if self.work > self.budget {
                return Search::OutOfBudget;
            }
            let mut trail = Vec::new();
            let mut wiped = false;
            for j in i + 1..n {
                for b in 0..self.domains[j].len() {
                    if self.live[j][b] && (self.conflict)(i, a, j, b) {
                        self.live[j][b] = false;
                        trail.push((j, b));
                    }
                }
                if !self.live[j].iter().any(|&x| x) {
                    wiped = true;
                    break;
                }
            }
            if !wiped {
                chosen.push(a);
                match self.solve(i + 1, chosen) {
                    Search::Exhausted => {}
                    other => return other,
                }
                chosen.pop();
            }
            for (j, b) in trail {
                self.live[j][b] = true;
            }
        }
        Search::Exhausted
    }
}

fn search(
    domains: &[Vec<Color>],
    conflict: &dyn Fn(usize, usize, usize, usize) -> bool,
    budget: u64,
) -> (Search, u64) {
    if domains.iter().any(Vec::is_empty) {
        return (Search::Exhausted, 0);
    }
    let mut bt = Backtracker {
        domains,
        conflict,
        live: domains.iter().map(|d| vec![true; d.len()]).collect(),
        work: 0,
        budget,
    };
    let out = bt.solve(0, &mut Vec::new());
    (out, bt.work)
}

fn space(domains: &[Vec<Color>]) -> u128 {
    domains
        .iter()
        .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
}

/// Search all colorings of `Ball(1, d_c)` with colors `0..=c` in which any
/// two points of the same color `c'` are more than `2d_{c'}` apart.
pub fn infty_check(
    group: &Group,
    d: &RadiusSeq,
    c: usize,
    budget: u64,
) -> Result<ExhaustiveSearchReport> {
    let dc = d.get(c).ok_or_else(|| Error::PaletteExhausted {
        color: c.to_string(),
        available: d.len(),
    })?;
    let ball = group.ball(&group.identity(), dc)?;
    let n = ball.len();
    let dist: Vec<Vec<u64>> = ball
        .iter()
        .map(|a| ball.iter().map(|b| dist_unchecked(a, b)).collect())
        .collect();
    let domains: Vec<Vec<Color>> = vec![(0..=c as u32).map(Color::Nat).collect(); n];
    let twice: Vec<Radius> = d.0[..=c].iter().map(Radius::double).collect();
    // color index a is color a here
    let conflict = |i: usize, a: usize, j: usize, b: usize| a == b && twice[a].admits(dist[i][j]);
    let (out, work) = search(&domains, &conflict, budget);
    let mut report = ExhaustiveSearchReport {
        outcome: Outcome::Refuted,
        variables: n,
        search_space: space(&domains),
        valid_found: 0,
        witness: None,
        witness_verified: None,
        work_units: work,
        budget,
    };
    match out {
        Search::Exhausted => {}
        Search::OutOfBudget => report.outcome = Outcome::Inconclusive,
        Search::Found(choice) => {
            let omega = PartialColoring::from_entries(
                *group,
                ball.iter()
                    .cloned()
                    .zip(choice.iter().map(|&a| Color::Nat(a as u32))),
            )?;
            let verified = (0..n).all(|i| {
                (i + 1..n).all(|j| !(choice[i] == choice[j] && twice[choice[i]].admits(dist[i][j])))
            });
            report.outcome = Outcome::Witness;
            report.valid_found = 1;
            report.witness = Some(omega);
            report.witness_verified = Some(verified);
        }
    }
    Ok(report)
}

/// The counting bound on `Z^1`: an interval of `2d_c + 1` integers holds at
/// most `floor(2d_c / (2d_{c'} + 1)) + 1` points pairwise more than `2d_{c'}`
/// apart. Returns `(capacity summed over c' <= c, 2d_c + 1)`; the search
/// space is empty whenever the first is smaller. Integer radii only.
pub fn z1_counting_bound(d: &RadiusSeq, c: usize) -> Option<(u64, u64)> {
    let ints: Vec<u64> =
        d.0.get(..=c)?
            .iter()
            .map(|r| r.is_integer().then(|| r.floor()))
            .collect::<Option<_>>()?;
    let len = 2 * ints[c];
    let capacity = ints.iter().map(|&dp| len / (2 * dp + 1) + 1).sum();
    Some((capacity, len + 1))
}

/// Points within `ρ` of `dom φ` and outside it, in canonical order.
fn neighborhood(group: &Group, phi: &PartialColoring, rho: Radius) -> Result<Vec<Element>> {
    let mut out: BTreeMap<Element, ()> = BTreeMap::new();
    for g in phi.domain() {
        for p in group.ball(g, rho)? {
            if !phi.contains_point(&p) {
                out.insert(p, ());
            }
        }
    }
    Ok(out.into_keys().collect())
}

/// Look for a coloring of `Ball(dom φ, ρ)` that extends `φ` and is a member
/// of the ideal, with colors up to `palette_max`. The ideal must have a
/// pairwise presentation.
pub fn extension_oracle<I: Ideal + ?Sized>(
    ideal: &I,
    phi: &PartialColoring,
    rho: Radius,
    palette_max: u32,
    budget: u64,
) -> Result<ExhaustiveSearchReport> {
    let pw = ideal
        .pairwise()
        .ok_or_else(|| Error::Precondition("the extension oracle needs a pairwise ideal".into()))?;
    let group = ideal.group();
    let vars = neighborhood(&group, phi, rho)?;
    let mut domains: Vec<Vec<Color>> = Vec::with_capacity(vars.len());
    for v in &vars {
        let mut dom = Vec::new();
        for c in ideal.extension_colors(palette_max) {
            if !pw.singleton_ok(v, c)? {
                continue;
            }
            let mut ok = true;
            for (g, cg) in phi.iter() {
                if !pw.compatible(v, c, g, cg)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                dom.push(c);
            }
        }
        domains.push(dom);
    }
    let mut report = ExhaustiveSearchReport {
        outcome: Outcome::Refuted,
        variables: vars.len(),
        search_space: space(&domains),
        valid_found: 0,
        witness: None,
        witness_verified: None,
        work_units: 0,
        budget,
    };
    if !ideal.contains(phi)? {
        return Ok(report);
    }
    // pairwise verdicts are cached up front so the search closure is infallible
    let mut table: Vec<Vec<Vec<Vec<bool>>>> = Vec::with_capacity(vars.len());
    for (i, vi) in vars.iter().enumerate() {
        let mut row = Vec::with_capacity(vars.len());
        for (j, vj) in vars.iter().enumerate() {
            if j <= i {
                row.push(Vec::new());
                continue;
            }
            let mut m = Vec::with_capacity(domains[i].len());
            for &a in &domains[i] {
                let mut line = Vec::with_capacity(domains[j].len());
                for &b in &domains[j] {
                    line.push(!pw.compatible(vi, a, vj, b)?);
                }
                m.push(line);
            }
            row.push(m);
        }
        table.push(row);
    }
    let conflict = |i: usize, a: usize, j: usize, b: usize| table[i][j][a][b];
    let (out, work) = search(&domains, &conflict, budget);
    report.work_units = work;
    match out {
        Search::Exhausted => {}
        Search::OutOfBudget => report.outcome = Outcome::Inconclusive,
        Search::Found(choice) => {
            let mut omega = phi.clone();
            for (i, &a) in choice.iter().enumerate() {
                omega.insert(vars[i].clone(), domains[i][a])?;
            }
            report.outcome = Outcome::Witness;
            report.valid_found = 1;
            report.witness_verified = Some(col_window_check(&omega, ideal)?);
            report.witness = Some(omega);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct RareColorReport {
    /// `(color, occurrences)` for every color present.
    pub counts: Vec<(u32, usize)>,
    /// Colors with an infinite `h` entry that occur more than once.
    pub violations: Vec<u32>,
}

impl RareColorReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every color whose `h` entry is infinite occurs at most once.
pub fn rare_color_check(spec: &IdealSpec, omega: &PartialColoring) -> Result<RareColorReport> {
    let IdealKind::DistanceConstrained { h, .. } = &spec.kind else {
        return Err(Error::Precondition(
            "rare-color check needs a distance-constrained ideal".into(),
        ));
    };
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for c in omega.colors() {
        *counts.entry(c.nat()?).or_default() += 1;
    }
    let violations = counts
        .iter()
        .filter(|(&c, &n)| n > 1 && h.get(c as usize) == Some(&Bound::Infinite))
        .map(|(&c, _)| c)
        .collect();
    Ok(RareColorReport {
        counts: counts.into_iter().collect(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> Group {
        Group::Lattice { dim: 1 }
    }

    #[test]
    fn infty_small_cases_are_refuted() {
        let d = RadiusSeq::from_ints(&[1, 3, 7]);
        for c in 0..3 {
            let r = infty_check(&z1(), &d, c, DEFAULT_WORK_BUDGET).unwrap();
            assert_eq!(r.outcome, Outcome::Refuted, "c = {c}");
            let (cap, size) = z1_counting_bound(&d, c).unwrap();
            assert!(cap < size);
        }
        assert_eq!(z1_counting_bound(&d, 1), Some((4, 7)));
        assert_eq!(z1_counting_bound(&d, 0), Some((1, 3)));
    }

    #[test]
    fn infty_finds_witness_when_radii_are_too_small() {
        // with d = (0, 0) the constraint is vacuous beyond coinciding points
        let d = RadiusSeq(vec![Radius::ZERO, Radius::new(1, 2).unwrap()]);
        let r = infty_check(&z1(), &d, 1, DEFAULT_WORK_BUDGET).unwrap();
        assert_eq!(r.outcome, Outcome::Witness);
        assert_eq!(r.witness_verified, Some(true));
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let d = RadiusSeq::from_ints(&[1, 3, 7]);
        let r = infty_check(&z1(), &d, 2, 5).unwrap();
        assert_eq!(r.outcome, Outcome::Inconclusive);
        assert_eq!(r.work_units, 6);
    }

    #[test]
    fn extension_oracle_examples() {
        let p2 = IdealSpec::proper(z1(), 2);
        let phi = PartialColoring::z1(&[(0, 0u32), (3, 0)]);
        let r = extension_oracle(&p2, &phi, Radius::int(3), 1, DEFAULT_WORK_BUDGET).unwrap();
        assert_eq!(r.outcome, Outcome::Refuted);

        let phi = PartialColoring::z1(&[(0, 0u32), (3, 1)]);
        let r = extension_oracle(&p2, &phi, Radius::int(3), 1, DEFAULT_WORK_BUDGET).unwrap();
        assert_eq!(r.outcome, Outcome::Witness);
        let w = r.witness.unwrap();
        for x in 0..4 {
            assert_eq!(w.get(&Element::int(x)), Some(Color::Nat((x % 2) as u32)));
        }
        assert_eq!(r.witness_verified, Some(true));

        let p3 = IdealSpec::proper(z1(), 3);
        let phi = PartialColoring::z1(&[(0, 0u32), (2, 1), (5, 2)]);
        let r = extension_oracle(&p3, &phi, Radius::int(5), 2, DEFAULT_WORK_BUDGET).unwrap();
        assert_eq!(r.outcome, Outcome::Witness);
    }

    #[test]
    fn rare_colors() {
        let spec = IdealSpec::distance_constrained(
            z1(),
            RadiusSeq::from_ints(&[1, 3]),
            vec![Bound::Finite(Radius::ZERO), Bound::Infinite],
        )
        .unwrap();
        let twice = PartialColoring::z1(&[(0, 1u32), (40, 1)]);
        assert_eq!(rare_color_check(&spec, &twice).unwrap().violations, vec![1]);
        let fine = PartialColoring::z1(&[(0, 0u32), (3, 0), (9, 1)]);
        let r = rare_color_check(&spec, &fine).unwrap();
        assert!(r.is_clean());
        assert_eq!(r.counts, vec![(0, 2), (1, 1)]);
    }
}
