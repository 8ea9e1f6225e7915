//! Shift-normalized patterns occurring in a window coloring.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coloring::{Color, PartialColoring};
use crate::error::Result;
use crate::group::{mul_unchecked, Element};
use crate::radius::Radius;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternCount {
    /// The pattern shifted so that its center is the identity.
    pub pattern: PartialColoring,
    pub occurrences: usize,
}

/// Every pattern `ω[γ, ρ]`, moved to the identity, at centers `γ` whose
/// `ρ`-ball lies entirely in `dom ω`, kept when it occurs at least
/// `min_occurrences` times. Output is in canonical pattern order.
pub fn extract_patterns(
    omega: &PartialColoring,
    rho: Radius,
    min_occurrences: usize,
) -> Result<Vec<PatternCount>> {
    let group = *omega.group();
    let offsets = group.ball(&group.identity(), rho)?;
    let mut counts: BTreeMap<Vec<(Element, Color)>, usize> = BTreeMap::new();
    for (gamma, _) in omega.iter() {
        let mut entries = Vec::with_capacity(offsets.len());
        let mut inside = true;
        for o in &offsets {
            // o·γ shifted by γ is o itself
            match omega.get(&mul_unchecked(o, gamma)) {
                Some(c) => entries.push((o.clone(), c)),
                None => {
                    inside = false;
                    break;
                }
            }
        }
        if inside {
            entries.sort();
            *counts.entry(entries).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|(_, n)| *n >= min_occurrences)
        .map(|(entries, occurrences)| {
            Ok(PatternCount {
                pattern: PartialColoring::from_entries(group, entries)?,
                occurrences,
            })
        })
        .collect()
}
