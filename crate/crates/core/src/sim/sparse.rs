//! The sparse coloring built from proper colorings of distance graphs.
//!
//! For each `c < m`, `η_c` is a greedy proper coloring of the graph on the
//! window joining points at distance at most `d_c`. With a threshold `s_c`
//! drawn for every `c`, a point gets the least `c` with `η_c = s_c`, if any.
//! Two points of color `c` share the `η_c` value `s_c`, so they are not
//! adjacent in the `c`-th graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coloring::{Color, PartialColoring};
use crate::error::{Error, Result};
use crate::group::{dist_unchecked, Element, Group};
use crate::packing::RadiusSeq;
use crate::radius::Radius;

#[derive(Clone, Debug, Serialize)]
pub struct SparseRun {
    pub group: Group,
    pub window_radius: u64,
    pub m: usize,
    pub seed: u64,
    /// Largest value of each `η_c`.
    pub eta_max: Vec<u32>,
    pub thresholds: Vec<u32>,
    pub window_size: usize,
    pub covered: usize,
    pub coverage: f64,
    pub coloring: PartialColoring,
}

/// Greedy proper coloring of the distance-`<= d` graph, visiting points in
/// the given order and using the least color free among earlier neighbors.
pub fn greedy_distance_coloring(points: &[Element], d: Radius) -> Vec<u32> {
    let mut eta: Vec<u32> = Vec::with_capacity(points.len());
    let mut used: Vec<bool> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        used.clear();
        used.resize(i + 1, false);
        for (j, q) in points[..i].iter().enumerate() {
            if d.admits(dist_unchecked(p, q)) {
                let v = eta[j] as usize;
                if v < used.len() {
                    used[v] = true;
                }
            }
        }
        eta.push(used.iter().position(|&u| !u).unwrap_or(i) as u32);
    }
    eta
}

pub fn sparse_run(
    group: &Group,
    d: &RadiusSeq,
    window_radius: u64,
    m: usize,
    seed: u64,
) -> Result<SparseRun> {
    if m > d.len() {
        return Err(Error::Precondition(format!(
            "m = {m} exceeds the {} available radii",
            d.len()
        )));
    }
    let points = group.ball(&group.identity(), Radius::int(window_radius))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assigned: Vec<Option<u32>> = vec![None; points.len()];
    let mut eta_max = Vec::with_capacity(m);
    let mut thresholds = Vec::with_capacity(m);
    for c in 0..m {
        let eta = greedy_distance_coloring(&points, d.0[c]);
        let top = eta.iter().copied().max().unwrap_or(0);
        let s = rng.gen_range(0..=top);
        for (k, &e) in eta.iter().enumerate() {
            if assigned[k].is_none() && e == s {
                assigned[k] = Some(c as u32);
            }
        }
        eta_max.push(top);
        thresholds.push(s);
    }
    let coloring = PartialColoring::from_entries(
        *group,
        points
            .iter()
            .zip(&assigned)
            .filter_map(|(g, c)| c.map(|c| (g.clone(), Color::Nat(c)))),
    )?;
    let covered = coloring.len();
    Ok(SparseRun {
        group: *group,
        window_radius,
        m,
        seed,
        eta_max,
        thresholds,
        window_size: points.len(),
        covered,
        coverage: if points.is_empty() {
            0.0
        } else {
            covered as f64 / points.len() as f64
        },
        coloring,
    })
}

/// Same-color pairs `(c, a, b)` with `dist(a, b) <= d_c`, by pairwise scan.
pub fn separation_violations(
    coloring: &PartialColoring,
    d: &RadiusSeq,
) -> Result<Vec<(u32, Element, Element)>> {
    let pts: Vec<(&Element, Color)> = coloring.iter().collect();
    let mut out = Vec::new();
    for (i, &(a, ca)) in pts.iter().enumerate() {
        let c = ca.nat()?;
        let dc = d.get(c as usize).ok_or_else(|| Error::PaletteExhausted {
            color: c.to_string(),
            available: d.len(),
        })?;
        for &(b, cb) in &pts[i + 1..] {
            if cb == ca && dc.admits(dist_unchecked(a, b)) {
                out.push((c, a.clone(), b.clone()));
            }
        }
    }
    Ok(out)
}
