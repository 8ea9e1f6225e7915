//! The product-coded local ideal `P'` built from an ideal `P` with the join
//! property.
//!
//! Colors of `P'` are pairs `(h, c)`. A coloring `φ` is in `P'` when at every
//! point `γ` with `φ(γ) = (h, c)` the pattern `ψ = π₂ ∘ φ[γ, 3h; h]` satisfies
//! `dom ψ ⊆ Ball(γ, h)`, `ψ ∈ P` and `R̃(ψ) <= h`, where `R̃` is the monotone
//! hull of the join radius. Membership is therefore decided by windows of
//! radius `3h`, and `π₂` carries `P'` into `P`.

use serde::{Deserialize, Serialize};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::axioms::{check_axioms_on, AxiomReport};
use crate::coloring::{for_each_pattern, Color, PartialColoring, ProductColor};
use crate::error::{Error, Result};
use crate::group::{dist_unchecked, Element};
use crate::ideal::{default_c_max, is_extendable_at, Ideal, IdealKind, IdealSpec};
use crate::join::{monotone_r, separated, JoinFn};
use crate::radius::Radius;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedIdeal {
    pub base: Box<IdealSpec>,
    /// Join radius of the base ideal. Serialized as `base_join` so that it
    /// does not collide with the spec-level `join` field.
    #[serde(rename = "base_join")]
    pub join: JoinFn,
}

/// `φ = φ₁ ∪ … ∪ φ_k` with the properties the peeling argument guarantees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub pieces: Vec<PartialColoring>,
    pub h_bound: u32,
}

/// `π₂ ∘ φ`.
pub fn project(phi: &PartialColoring) -> Result<PartialColoring> {
    phi.map_colors(|c| Ok(Color::Nat(c.product()?.c)))
}

impl ReducedIdeal {
    pub fn new(base: IdealSpec, join: JoinFn) -> Result<Self> {
        base.validate()?;
        Ok(ReducedIdeal {
            base: Box::new(base),
            join,
        })
    }

    /// The three window conditions at one point.
    fn holds_at(&self, phi: &PartialColoring, gamma: &Element, p: ProductColor) -> Result<bool> {
        let h = p.h;
        let psi = project(&phi.truncated_window(gamma, Radius::int(3 * h as u64), h))?;
        if psi.domain().any(|d| dist_unchecked(gamma, d) > h as u64) {
            return Ok(false);
        }
        if !self.base.contains(&psi)? {
            return Ok(false);
        }
        Ok(monotone_r(&self.join, &psi)? <= Radius::int(h as u64))
    }

    pub fn contains(&self, phi: &PartialColoring) -> Result<bool> {
        for (g, c) in phi.iter() {
            if !self.holds_at(phi, g, c.product()?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Assuming `φ ∈ P'`, only windows containing `γ` can change.
    pub fn admits(&self, phi: &PartialColoring, gamma: &Element, c: Color) -> Result<bool> {
        let p = c.product()?;
        let ext = phi.with(gamma, c)?;
        for (g, cg) in ext.iter() {
            let q = cg.product()?;
            let near = dist_unchecked(g, gamma) <= 3 * q.h as u64 && p.h <= q.h;
            if (g == gamma || near) && !self.holds_at(&ext, g, q)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sample_palette(&self) -> Vec<Color> {
        let base = self.base.sample_palette();
        (0..=2)
            .flat_map(|h| {
                base.iter()
                    .filter_map(move |c| c.nat().ok().map(|c| Color::pair(h, c)))
            })
            .collect()
    }

    /// Extend `φ ∈ P'` at `γ`: a base color `c` extending `π₂ ∘ φ`, and the
    /// least `h` with `h >= R̃(ψ')`, `h` above every height in `φ`, and
    /// `Ball(γ, h) ⊇ dom ψ'` for `ψ' = π₂ ∘ φ ∪ {(γ, c)}`.
    pub fn extend(&self, phi: &PartialColoring, gamma: &Element) -> Result<ProductColor> {
        if phi.contains_point(gamma) {
            return Err(Error::Precondition(format!("{gamma} is already colored")));
        }
        if !self.contains(phi)? {
            return Err(Error::Precondition(format!(
                "{phi:?} is not in the reduced ideal"
            )));
        }
        let psi = project(phi)?;
        let c_max = default_c_max(self.base.as_ref(), &psi, gamma)?;
        let c = is_extendable_at(self.base.as_ref(), &psi, gamma, c_max)?
            .ok_or_else(|| {
                Error::Budget(format!(
                    "no base color <= {c_max} extends the projection at {gamma}"
                ))
            })?
            .nat()?;
        let psi_ext = psi.with(gamma, Color::Nat(c))?;
        let mut h = monotone_r(&self.join, &psi_ext)?.ceil();
        for (g, col) in phi.iter() {
            h = h.max(col.product()?.h as u64 + 1);
            h = h.max(dist_unchecked(gamma, g));
        }
        let h = u32::try_from(h).map_err(|_| Error::Budget(format!("height {h} overflows")))?;
        let out = ProductColor { h, c };
        if !self.contains(&phi.with(gamma, Color::Pair(out))?)? {
            return Err(Error::Precondition(format!(
                "extension ({h}, {c}) at {gamma} left the reduced ideal"
            )));
        }
        Ok(out)
    }

    /// Peel off `φ[γ₀, 3h]` around a point of maximal height `h` (the least
    /// such point in canonical order) until nothing is left.
    pub fn decompose(&self, phi: &PartialColoring) -> Result<Decomposition> {
        if !self.contains(phi)? {
            return Err(Error::Precondition(format!(
                "{phi:?} is not in the reduced ideal"
            )));
        }
        let mut rest = phi.clone();
        let mut pieces = Vec::new();
        let mut h_bound = 0;
        while !rest.is_empty() {
            let mut top: Option<(&Element, u32)> = None;
            for (g, c) in rest.iter() {
                let h = c.product()?.h;
                if top.is_none_or(|(_, best)| h > best) {
                    top = Some((g, h));
                }
            }
            let (g0, h) = top.expect("nonempty");
            h_bound = h_bound.max(h);
            let piece = rest.window(g0, Radius::int(3 * h as u64));
            rest = rest.minus(&piece);
            pieces.push(piece);
        }
        Ok(Decomposition { pieces, h_bound })
    }

    /// Every way the decomposition of `φ` fails its guarantees, as messages.
    pub fn decomposition_defects(
        &self,
        phi: &PartialColoring,
        dec: &Decomposition,
    ) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let mut union = PartialColoring::empty(*phi.group());
        let mut total = 0;
        for p in &dec.pieces {
            total += p.len();
            union = union.union(p)?;
        }
        if union != *phi || total != phi.len() {
            out.push("pieces do not partition the coloring".to_string());
        }
        let psis: Vec<PartialColoring> = dec.pieces.iter().map(project).collect::<Result<_>>()?;
        let bound = Radius::int(dec.h_bound as u64);
        for (i, psi) in psis.iter().enumerate() {
            if !self.base.contains(psi)? {
                out.push(format!("piece {i} projects outside the base ideal"));
            }
            if monotone_r(&self.join, psi)? > bound {
                out.push(format!("piece {i} has join radius above {}", dec.h_bound));
            }
            for (j, other) in psis.iter().enumerate().skip(i + 1) {
                if !separated(psi, other, &self.join)? {
                    out.push(format!("pieces {i} and {j} are not separated"));
                }
            }
        }
        Ok(out)
    }
}

/// Bounds for [`soundness_check`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SoundnessBounds {
    /// Domains lie in `Ball(1, ball_radius)`.
    pub ball_radius: u64,
    pub max_size: usize,
    pub h_max: u32,
    pub c_max: u32,
    /// Shifts applied in the axiom check range over `Ball(1, shift_radius)`.
    pub shift_radius: u64,
}

impl Default for SoundnessBounds {
    fn default() -> Self {
        SoundnessBounds {
            ball_radius: 3,
            max_size: 3,
            h_max: 2,
            c_max: 2,
            shift_radius: 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessReport {
    pub bounds: SoundnessBounds,
    pub patterns: u64,
    pub members: u64,
    /// Members whose projection is outside the base ideal.
    pub projection_failures: Vec<PartialColoring>,
    pub decomposition_failures: Vec<(PartialColoring, Vec<String>)>,
    pub axioms: AxiomReport,
}

impl SoundnessReport {
    pub fn is_clean(&self) -> bool {
        self.projection_failures.is_empty()
            && self.decomposition_failures.is_empty()
            && self.axioms.is_clean()
    }
}

/// Enumerate every product-coded pattern within the bounds, and for each
/// member of the reduced ideal check that its projection is in the base
/// ideal, that its decomposition has no defects, and that its restrictions
/// and shifts are members.
pub fn soundness_check(reduced: &IdealSpec, bounds: SoundnessBounds) -> Result<SoundnessReport> {
    let IdealKind::Reduced(ri) = &reduced.kind else {
        return Err(Error::Precondition(
            "soundness check needs a reduced ideal".into(),
        ));
    };
    let group = reduced.group;
    let points = group.ball(&group.identity(), Radius::int(bounds.ball_radius))?;
    let shifts = group.ball(&group.identity(), Radius::int(bounds.shift_radius))?;
    let colors: Vec<Color> = (0..=bounds.h_max)
        .flat_map(|h| (0..=bounds.c_max).map(move |c| Color::pair(h, c)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut report = SoundnessReport {
        bounds,
        patterns: 0,
        members: 0,
        projection_failures: Vec::new(),
        decomposition_failures: Vec::new(),
        axioms: AxiomReport::default(),
    };
    for_each_pattern(group, &points, bounds.max_size, &colors, |phi| {
        report.patterns += 1;
        if !ri.contains(phi)? {
            return Ok(());
        }
        report.members += 1;
        if !ri.base.contains(&project(phi)?)? {
            report.projection_failures.push(phi.clone());
        }
        let dec = ri.decompose(phi)?;
        let defects = ri.decomposition_defects(phi, &dec)?;
        if !defects.is_empty() {
            report.decomposition_failures.push((phi.clone(), defects));
        }
        report.axioms.samples += 1;
        check_axioms_on(reduced, phi, &shifts, &mut rng, &mut report.axioms)
    })?;
    Ok(report)
}
