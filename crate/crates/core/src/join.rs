//! The join property and locality: separation radii, sampled join checks,
//! and the search for patterns that are locally valid but not members.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::axioms::{grow_member, SampleShape};
use crate::coloring::{Color, PartialColoring};
use crate::error::{Error, Result};
use crate::group::Element;
use crate::ideal::{Ideal, RadiusFn};
use crate::radius::{Bound, Radius};

/// Largest domain for which a non-monotone radius is maximized over subsets.
pub const MAX_SUBSET_DOMAIN: usize = 14;

/// An invariant radius function on partial colorings.
pub trait JoinRadius {
    fn radius(&self, phi: &PartialColoring) -> Result<Radius>;

    /// Declared monotone: `φ ⊆ φ'` implies `R(φ) <= R(φ')`.
    fn is_monotone(&self) -> bool;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum JoinFn {
    /// `R(φ) = value` for nonempty `φ`, and 0 on the empty coloring.
    Constant { value: Radius },
    /// `R(φ) = sup{r(φ(γ)) : γ ∈ dom φ}`.
    SupOfRadii { r: RadiusFn },
}

impl JoinFn {
    pub fn constant(v: Radius) -> Self {
        JoinFn::Constant { value: v }
    }
}

impl JoinRadius for JoinFn {
    fn radius(&self, phi: &PartialColoring) -> Result<Radius> {
        if phi.is_empty() {
            return Ok(Radius::ZERO);
        }
        match self {
            JoinFn::Constant { value } => Ok(*value),
            JoinFn::SupOfRadii { r } => phi
                .colors()
                .try_fold(Radius::ZERO, |acc, c| Ok(acc.max(r.eval(c)?))),
        }
    }

    fn is_monotone(&self) -> bool {
        true
    }
}

/// `sup{R(φ') : φ' ⊆ φ}`, with the empty supremum equal to 0.
pub fn monotone_r<R: JoinRadius + ?Sized>(join: &R, phi: &PartialColoring) -> Result<Radius> {
    if phi.is_empty() {
        return Ok(Radius::ZERO);
    }
    if join.is_monotone() {
        return join.radius(phi);
    }
    let dom = phi.domain_vec();
    if dom.len() > MAX_SUBSET_DOMAIN {
        return Err(Error::Budget(format!(
            "subset supremum over {} points exceeds the limit of {MAX_SUBSET_DOMAIN}",
            dom.len()
        )));
    }
    let mut best = Radius::ZERO;
    for mask in 1u32..(1 << dom.len()) {
        let subset = phi.restrict(
            dom.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, g)| g),
        );
        best = best.max(join.radius(&subset)?);
    }
    Ok(best)
}

/// `dist(dom φ, dom ψ) > R(φ) + R(ψ)`.
pub fn separated<R: JoinRadius + ?Sized>(
    phi: &PartialColoring,
    psi: &PartialColoring,
    join: &R,
) -> Result<bool> {
    let d = phi.group().set_dist(&phi.domain_vec(), &psi.domain_vec())?;
    let need = join.radius(phi)? + join.radius(psi)?;
    Ok(match d {
        Bound::Infinite => true,
        Bound::Finite(d) => d > need,
    })
}

/// `R(φ) = sup{r(φ(γ))}` for a locality radius `r`.
pub fn derived_join_from_local(r: RadiusFn) -> JoinFn {
    JoinFn::SupOfRadii { r }
}

#[derive(Clone, Debug, Serialize)]
pub struct JoinViolation {
    pub pieces: Vec<PartialColoring>,
    pub union: PartialColoring,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct JoinReport {
    pub samples: usize,
    pub empty_in_ideal: bool,
    pub max_tuple: usize,
    pub violation_count: usize,
    pub violations: Vec<JoinViolation>,
}

impl JoinReport {
    pub fn is_clean(&self) -> bool {
        self.empty_in_ideal && self.violation_count == 0
    }
}

const KEPT_WITNESSES: usize = 10;

/// Check one explicit tuple: if the pieces are members and pairwise
/// separated, their union must be a member.
pub fn check_join_tuple<I, R>(
    ideal: &I,
    join: &R,
    pieces: &[PartialColoring],
) -> Result<Option<JoinViolation>>
where
    I: Ideal + ?Sized,
    R: JoinRadius + ?Sized,
{
    for (i, p) in pieces.iter().enumerate() {
        if !ideal.contains(p)? {
            return Ok(None);
        }
        for q in &pieces[i + 1..] {
            if !separated(p, q, join)? {
                return Ok(None);
            }
        }
    }
    let mut union = PartialColoring::empty(ideal.group());
    for p in pieces {
        union = union.union(p)?;
    }
    if ideal.contains(&union)? {
        Ok(None)
    } else {
        Ok(Some(JoinViolation {
            pieces: pieces.to_vec(),
            union,
        }))
    }
}

/// Shift `piece` by random elements of slowly growing norm until it is
/// separated from everything already placed.
fn place<R: JoinRadius + ?Sized>(
    piece: &PartialColoring,
    placed: &[PartialColoring],
    join: &R,
    rng: &mut ChaCha8Rng,
) -> Result<PartialColoring> {
    let group = *piece.group();
    let mut norm = 0u64;
    let mut tries = 0u32;
    loop {
        let gamma = group.random_of_norm(norm, rng);
        let cand = piece.shift(&gamma)?;
        let mut ok = true;
        for q in placed {
            if !separated(&cand, q, join)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(cand);
        }
        tries += 1;
        if tries.is_multiple_of(3) {
            norm += 1;
        }
    }
}

/// Sampled test of the join property with the default sample shape.
pub fn check_join<I, R>(
    ideal: &I,
    join: &R,
    tuple_max: usize,
    samples: usize,
    seed: u64,
) -> Result<JoinReport>
where
    I: Ideal + ?Sized,
    R: JoinRadius + ?Sized,
{
    check_join_with(
        ideal,
        join,
        tuple_max,
        samples,
        seed,
        SampleShape::default(),
    )
}

pub fn check_join_with<I, R>(
    ideal: &I,
    join: &R,
    tuple_max: usize,
    samples: usize,
    seed: u64,
    shape: SampleShape,
) -> Result<JoinReport>
where
    I: Ideal + ?Sized,
    R: JoinRadius + ?Sized,
{
    let group = ideal.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = group.ball(&group.identity(), Radius::int(shape.spread))?;
    let mut report = JoinReport {
        samples,
        empty_in_ideal: ideal.contains(&PartialColoring::empty(group))?,
        max_tuple: tuple_max,
        ..Default::default()
    };
    if tuple_max == 0 {
        return Ok(report);
    }
    for _ in 0..samples {
        let k = rng.gen_range(1..=tuple_max);
        let mut placed: Vec<PartialColoring> = Vec::with_capacity(k);
        for _ in 0..k {
            let member = grow_member(ideal, &points, shape.max_size, &mut rng)?;
            let piece = place(&member, &placed, join, &mut rng)?;
            placed.push(piece);
        }
        if let Some(v) = check_join_tuple(ideal, join, &placed)? {
            report.violation_count += 1;
            if report.violations.len() < KEPT_WITNESSES {
                report.violations.push(v);
            }
        }
    }
    Ok(report)
}

/// `φ ∈ Loc(P, r)`: every window `φ[γ, r(φ(γ))]` is a member.
pub fn in_loc<I: Ideal + ?Sized>(ideal: &I, r: &RadiusFn, phi: &PartialColoring) -> Result<bool> {
    for (g, c) in phi.iter() {
        if !ideal.contains(&phi.window(g, r.eval(c)?))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LocalReport {
    /// Members tested for `P ⊆ Loc(P, r)`.
    pub members_checked: usize,
    pub member_failures: Vec<PartialColoring>,
    /// Patterns tested for `Loc(P, r) ⊆ P`.
    pub patterns_checked: usize,
    pub counterexample_count: usize,
    pub counterexamples: Vec<PartialColoring>,
}

impl LocalReport {
    pub fn is_clean(&self) -> bool {
        self.member_failures.is_empty() && self.counterexample_count == 0
    }
}

/// Largest ball the locality search enumerates pairs in.
const LOCAL_SEARCH_BALL: u128 = 4000;

/// Search for members outside `Loc(P, r)` (there must be none) and for
/// elements of `Loc(P, r)` outside `P`. All two-point patterns through the
/// identity inside a ball covering the relevant radii are enumerated (every
/// two-point pattern is a shift of one of these); the rest of the budget goes
/// to random patterns of three to five points.
pub fn check_local<I: Ideal + ?Sized>(
    ideal: &I,
    r: &RadiusFn,
    budget: usize,
    seed: u64,
) -> Result<LocalReport> {
    let group = ideal.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let palette = ideal.sample_palette();
    let mut report = LocalReport::default();

    let shape = SampleShape::default();
    let spread_pts = group.ball(&group.identity(), Radius::int(shape.spread))?;
    for _ in 0..(budget / 4).clamp(1, 200) {
        let phi = grow_member(ideal, &spread_pts, shape.max_size, &mut rng)?;
        report.members_checked += 1;
        if !in_loc(ideal, r, &phi)? && report.member_failures.len() < KEPT_WITNESSES {
            report.member_failures.push(phi);
        }
    }

    let mut max_r = Radius::ZERO;
    for &c in &palette {
        max_r = max_r.max(r.eval(c)?);
    }
    let mut rho = max_r.double().floor() + 1;
    while rho > 1 && group.ball_size(rho) > LOCAL_SEARCH_BALL {
        rho -= 1;
    }
    let ball = group.ball(&group.identity(), Radius::int(rho))?;
    let id = group.identity();

    let record = |phi: PartialColoring, report: &mut LocalReport| -> Result<()> {
        report.patterns_checked += 1;
        if in_loc(ideal, r, &phi)? && !ideal.contains(&phi)? {
            report.counterexample_count += 1;
            if report.counterexamples.len() < KEPT_WITNESSES {
                report.counterexamples.push(phi);
            }
        }
        Ok(())
    };

    'pairs: for g in &ball[1..] {
        for &a in &palette {
            for &b in &palette {
                if report.patterns_checked >= budget {
                    break 'pairs;
                }
                let phi = PartialColoring::from_entries(group, [(id.clone(), a), (g.clone(), b)])?;
                record(phi, &mut report)?;
            }
        }
    }
    while report.patterns_checked < budget {
        let size = rng.gen_range(3..=5).min(ball.len());
        let pts: Vec<&Element> = ball.choose_multiple(&mut rng, size).collect();
        let entries: Vec<(Element, Color)> = pts
            .into_iter()
            .map(|g| {
                (
                    g.clone(),
                    *palette.choose(&mut rng).expect("nonempty palette"),
                )
            })
            .collect();
        record(PartialColoring::from_entries(group, entries)?, &mut report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use crate::ideal::IdealSpec;
    use crate::packing::RadiusSeq;

    fn z1() -> Group {
        Group::Lattice { dim: 1 }
    }

    fn half() -> JoinFn {
        JoinFn::constant(Radius::new(1, 2).unwrap())
    }

    /// `R(φ) = 1` when `|dom φ|` is odd and 0 otherwise; not monotone.
    struct Parity;

    impl JoinRadius for Parity {
        fn radius(&self, phi: &PartialColoring) -> Result<Radius> {
            Ok(Radius::int(phi.len() as u64 % 2))
        }
        fn is_monotone(&self) -> bool {
            false
        }
    }

    #[test]
    fn monotone_r_examples() {
        let phi = PartialColoring::z1(&[(0, 0u32), (5, 1)]);
        let empty = PartialColoring::empty(z1());
        assert_eq!(
            monotone_r(&JoinFn::constant(Radius::int(1)), &phi).unwrap(),
            Radius::int(1)
        );
        assert_eq!(
            monotone_r(&JoinFn::constant(Radius::int(1)), &empty).unwrap(),
            Radius::ZERO
        );
        assert_eq!(monotone_r(&Parity, &empty).unwrap(), Radius::ZERO);
        let sup = derived_join_from_local(RadiusFn::Table {
            values: RadiusSeq::from_ints(&[1, 2]),
        });
        assert_eq!(monotone_r(&sup, &phi).unwrap(), Radius::int(2));
        // even domain: R = 0, but a singleton subset has R = 1
        assert_eq!(Parity.radius(&phi).unwrap(), Radius::ZERO);
        assert_eq!(monotone_r(&Parity, &phi).unwrap(), Radius::int(1));
        let big = PartialColoring::z1(&(0..15).map(|x| (x * 3, 0u32)).collect::<Vec<_>>());
        assert!(matches!(monotone_r(&Parity, &big), Err(Error::Budget(_))));
    }

    #[test]
    fn separation_examples() {
        let a = PartialColoring::z1(&[(0, 0u32)]);
        assert!(separated(&a, &PartialColoring::z1(&[(2, 0u32)]), &half()).unwrap());
        assert!(!separated(&a, &PartialColoring::z1(&[(1, 0u32)]), &half()).unwrap());
        assert!(separated(&a, &PartialColoring::empty(z1()), &half()).unwrap());
    }

    #[test]
    fn derived_join_values() {
        let r1 = derived_join_from_local(RadiusFn::constant(1));
        assert_eq!(
            r1.radius(&PartialColoring::z1(&[(0, 0u32), (3, 2)]))
                .unwrap(),
            Radius::int(1)
        );
        assert_eq!(
            r1.radius(&PartialColoring::empty(z1())).unwrap(),
            Radius::ZERO
        );
        let nu = derived_join_from_local(RadiusFn::Table {
            values: RadiusSeq::from_ints(&[5, 13]),
        });
        assert_eq!(
            nu.radius(&PartialColoring::z1(&[(0, 1u32)])).unwrap(),
            Radius::int(13)
        );
    }

    #[test]
    fn join_check_proper_three() {
        let p3 = IdealSpec::proper(z1(), 3);
        let report = check_join(&p3, &half(), 4, 500, 11).unwrap();
        assert!(report.is_clean(), "{report:?}");
    }

    #[test]
    fn zero_radius_fails_for_two_colors() {
        let p2 = IdealSpec::proper(z1(), 2);
        let zero = JoinFn::constant(Radius::ZERO);
        let v = check_join_tuple(
            &p2,
            &zero,
            &[
                PartialColoring::z1(&[(0, 0u32)]),
                PartialColoring::z1(&[(1, 0u32)]),
            ],
        )
        .unwrap();
        assert!(v.is_some());
        let sampled = check_join(&p2, &zero, 3, 300, 5).unwrap();
        assert!(sampled.violation_count > 0);
    }

    #[test]
    fn empty_tuple_requires_empty_member() {
        let report = check_join(&IdealSpec::proper(z1(), 2), &half(), 0, 10, 0).unwrap();
        assert!(report.empty_in_ideal && report.is_clean());
    }

    #[test]
    fn locality_examples() {
        let p3 = IdealSpec::proper(z1(), 3);
        assert!(check_local(&p3, &RadiusFn::constant(1), 2000, 1)
            .unwrap()
            .is_clean());

        let nu = IdealSpec::not_universal(
            z1(),
            RadiusSeq::from_ints(&[1, 3]),
            RadiusSeq::from_ints(&[5, 13]),
        )
        .unwrap();
        let r = nu.locality_fn().unwrap();
        assert!(check_local(&nu, &r, 3000, 2).unwrap().is_clean());

        let dc = IdealSpec::distance_constrained(
            z1(),
            RadiusSeq::from_ints(&[1, 3]),
            vec![Bound::Finite(Radius::ZERO); 2],
        )
        .unwrap();
        let report = check_local(&dc, &RadiusFn::constant(1), 2000, 3).unwrap();
        assert!(report.counterexample_count > 0);
        let witness = &report.counterexamples[0];
        assert!(in_loc(&dc, &RadiusFn::constant(1), witness).unwrap());
        assert!(!dc.contains(witness).unwrap());
    }
}
