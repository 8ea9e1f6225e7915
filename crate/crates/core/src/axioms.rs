//! Sampling members of an ideal and checking the two Γ-ideal axioms
//! (closure under restriction and under shifts) on the samples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coloring::{Color, PartialColoring};
use crate::error::Result;
use crate::group::Element;
use crate::ideal::Ideal;
use crate::radius::Radius;

/// Where samples live and how large they get.
#[derive(Clone, Copy, Debug)]
pub struct SampleShape {
    /// Points are drawn from `Ball(1, spread)`.
    pub spread: u64,
    pub max_size: usize,
}

impl Default for SampleShape {
    fn default() -> Self {
        SampleShape {
            spread: 4,
            max_size: 6,
        }
    }
}

/// Randomized greedy growth: add random points one at a time, each with a
/// random palette color if that keeps the coloring a member and with the
/// ideal's own extension color otherwise. Every intermediate coloring is a
/// member, so the result is one too.
pub fn grow_member<I: Ideal + ?Sized>(
    ideal: &I,
    points: &[Element],
    max_size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PartialColoring> {
    let mut phi = PartialColoring::empty(ideal.group());
    let target = rng.gen_range(0..=max_size);
    let palette = ideal.sample_palette();
    let mut attempts = 0;
    while phi.len() < target && attempts < 4 * target + 4 {
        attempts += 1;
        let g = points.choose(rng).expect("nonempty point set");
        if phi.contains_point(g) {
            continue;
        }
        let c = *palette.choose(rng).expect("nonempty palette");
        if ideal.admits(&phi, g, c)? {
            phi.insert(g.clone(), c)?;
        } else if let Some(c) = ideal.extend(&phi, g)? {
            phi.insert(g.clone(), c)?;
        }
    }
    Ok(phi)
}

/// A uniformly random pattern on the point set, kept only if it is a member.
pub fn random_pattern<I: Ideal + ?Sized>(
    ideal: &I,
    points: &[Element],
    max_size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<PartialColoring>> {
    let size = rng.gen_range(1..=max_size.max(1)).min(points.len());
    let palette = ideal.sample_palette();
    let entries: Vec<(Element, Color)> = points
        .choose_multiple(rng, size)
        .map(|g| (g.clone(), *palette.choose(rng).expect("nonempty palette")))
        .collect();
    let phi = PartialColoring::from_entries(ideal.group(), entries)?;
    Ok(ideal.contains(&phi)?.then_some(phi))
}

/// Greedy growth three times out of four, rejection-sampled random patterns
/// otherwise. Growth alone never leaves an ideal that is not closed under
/// single-point extension, which is exactly the kind of defect the axiom
/// check should be able to see.
pub fn sample_member<I: Ideal + ?Sized>(
    ideal: &I,
    points: &[Element],
    max_size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PartialColoring> {
    if rng.gen_ratio(1, 4) {
        for _ in 0..16 {
            if let Some(phi) = random_pattern(ideal, points, max_size, rng)? {
                return Ok(phi);
            }
        }
    }
    grow_member(ideal, points, max_size, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomKind {
    Restriction,
    Shift,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomViolation {
    pub axiom: AxiomKind,
    pub sample: PartialColoring,
    /// The restriction or shifted coloring that left the ideal.
    pub witness: PartialColoring,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<Element>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub restriction_checks: usize,
    pub shift_checks: usize,
    pub violation_count: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }

    fn record(&mut self, v: AxiomViolation) {
        self.violation_count += 1;
        if self.violations.len() < 20 {
            self.violations.push(v);
        }
    }
}

/// Largest domain whose subsets are enumerated exhaustively.
pub const EXHAUSTIVE_SUBSETS: usize = 8;
/// Shifts range over `Ball(1, SHIFT_RADIUS)`.
pub const SHIFT_RADIUS: u64 = 5;

/// Check both axioms on one coloring that is claimed to be a member.
pub fn check_axioms_on<I: Ideal + ?Sized>(
    ideal: &I,
    phi: &PartialColoring,
    shifts: &[Element],
    rng: &mut ChaCha8Rng,
    report: &mut AxiomReport,
) -> Result<()> {
    let dom = phi.domain_vec();
    let masks: Vec<u64> = if dom.len() <= EXHAUSTIVE_SUBSETS {
        (0..1u64 << dom.len()).collect()
    } else {
        (0..256)
            .map(|_| rng.gen::<u64>() & ((1u64 << dom.len().min(63)) - 1))
            .collect()
    };
    for mask in masks {
        let sub = phi.restrict(
            dom.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, g)| g),
        );
        report.restriction_checks += 1;
        if !ideal.contains(&sub)? {
            report.record(AxiomViolation {
                axiom: AxiomKind::Restriction,
                sample: phi.clone(),
                witness: sub,
                shift: None,
            });
        }
    }
    for gamma in shifts {
        let shifted = phi.shift(gamma)?;
        report.shift_checks += 1;
        if !ideal.contains(&shifted)? {
            report.record(AxiomViolation {
                axiom: AxiomKind::Shift,
                sample: phi.clone(),
                witness: shifted,
                shift: Some(gamma.clone()),
            });
        }
    }
    Ok(())
}

/// Sample members and verify that all their restrictions and shifts by
/// elements of `Ball(1, 5)` are members as well.
pub fn ideal_axioms_check<I: Ideal + ?Sized>(
    ideal: &I,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let group = ideal.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = SampleShape::default();
    let points = group.ball(&group.identity(), Radius::int(shape.spread))?;
    let shifts = group.ball(&group.identity(), Radius::int(SHIFT_RADIUS))?;
    let mut report = AxiomReport {
        samples,
        ..Default::default()
    };
    for _ in 0..samples {
        let phi = sample_member(ideal, &points, shape.max_size, &mut rng)?;
        check_axioms_on(ideal, &phi, &shifts, &mut rng, &mut report)?;
    }
    Ok(report)
}
