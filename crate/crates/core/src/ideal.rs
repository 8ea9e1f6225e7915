//! Declarative Γ-ideals: sets of finite partial colorings closed under
//! restriction and under the shift action.
//!
//! Three kinds are given by pairwise conditions (proper colorings,
//! distance-constrained colorings, and the not-universal family); the fourth
//! is the product-coded ideal built in [`crate::reduction`].

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, PartialColoring};
use crate::error::{Error, Result};
use crate::group::{dist_unchecked, mul_unchecked, Element, Group};
use crate::join::JoinFn;
use crate::packing::RadiusSeq;
use crate::radius::{Bound, Radius};
use crate::reduction::ReducedIdeal;

pub const SCHEMA_VERSION: u32 = 1;

/// A radius assigned to each color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum RadiusFn {
    Constant {
        value: Radius,
    },
    /// `r(c) = values[c]` for plain colors.
    Table {
        values: RadiusSeq,
    },
    /// `r(h, c) = factor · h` for product colors.
    HeightMultiple {
        factor: u64,
    },
}

impl RadiusFn {
    pub fn constant(v: u64) -> Self {
        RadiusFn::Constant {
            value: Radius::int(v),
        }
    }

    pub fn eval(&self, c: Color) -> Result<Radius> {
        match self {
            RadiusFn::Constant { value } => Ok(*value),
            RadiusFn::Table { values } => {
                let i = c.nat()? as usize;
                values.get(i).ok_or_else(|| Error::PaletteExhausted {
                    color: c.to_string(),
                    available: values.len(),
                })
            }
            RadiusFn::HeightMultiple { factor } => Ok(Radius::int(*factor * c.product()?.h as u64)),
        }
    }
}

/// Capability shared by every ideal the checkers work with. All membership
/// tests assume the ideal is hereditary and shift invariant; the axiom
/// checker exists to catch implementations that are not.
pub trait Ideal {
    fn group(&self) -> Group;

    fn contains(&self, phi: &PartialColoring) -> Result<bool>;

    /// `φ ∪ {(γ, c)} ∈ P`, assuming `φ ∈ P` and `γ ∉ dom φ`.
    fn admits(&self, phi: &PartialColoring, gamma: &Element, c: Color) -> Result<bool> {
        self.contains(&phi.with(gamma, c)?)
    }

    /// The locality radius `r(c)`, or `None` when no finite radius works.
    fn locality(&self, c: Color) -> Result<Option<Radius>>;

    /// Finite palette used when sampling members.
    fn sample_palette(&self) -> Vec<Color>;

    /// Colors an extension search tries, in increasing order.
    fn extension_colors(&self, c_max: u32) -> Vec<Color> {
        (0..=c_max).map(Color::Nat).collect()
    }

    /// Some color that extends `φ ∈ P` at `γ`; the least one unless the
    /// ideal has a better constructive rule.
    fn extend(&self, phi: &PartialColoring, gamma: &Element) -> Result<Option<Color>> {
        let c_max = default_c_max(self, phi, gamma)?;
        is_extendable_at(self, phi, gamma, c_max)
    }

    /// The pairwise presentation, when membership is decided by singletons
    /// and unordered pairs alone.
    fn pairwise(&self) -> Option<&dyn PairwiseIdeal> {
        None
    }
}

/// `φ ∈ P` iff every singleton is allowed and every pair is compatible.
pub trait PairwiseIdeal {
    fn singleton_ok(&self, g: &Element, c: Color) -> Result<bool>;
    fn compatible(&self, g: &Element, cg: Color, h: &Element, ch: Color) -> Result<bool>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IdealKind {
    /// Pairwise properness on the Cayley graph with colors `< k`.
    ProperColoring {
        k: u32,
    },
    /// Same-color pairs at distance at least `max(2d_c + 1, h_c)`.
    DistanceConstrained {
        d: RadiusSeq,
        h: Vec<Bound>,
    },
    NotUniversal {
        d: RadiusSeq,
        #[serde(rename = "D")]
        big_d: RadiusSeq,
    },
    Reduced(ReducedIdeal),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealSpec {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub group: Group,
    #[serde(flatten)]
    pub kind: IdealKind,
    /// Overrides the kind's default locality radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locality: Option<RadiusFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub join: Option<JoinFn>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

impl IdealSpec {
    pub fn new(group: Group, kind: IdealKind) -> Result<Self> {
        let spec = IdealSpec {
            schema_version: SCHEMA_VERSION,
            group,
            kind,
            locality: None,
            join: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn proper(group: Group, k: u32) -> Self {
        Self::new(group, IdealKind::ProperColoring { k }).expect("k >= 1")
    }

    pub fn distance_constrained(group: Group, d: RadiusSeq, h: Vec<Bound>) -> Result<Self> {
        Self::new(group, IdealKind::DistanceConstrained { d, h })
    }

    pub fn not_universal(group: Group, d: RadiusSeq, big_d: RadiusSeq) -> Result<Self> {
        Self::new(group, IdealKind::NotUniversal { d, big_d })
    }

    pub fn reduced(base: IdealSpec, join: JoinFn) -> Result<Self> {
        let group = base.group;
        Self::new(group, IdealKind::Reduced(ReducedIdeal::new(base, join)?))
    }

    pub fn with_locality(mut self, r: RadiusFn) -> Self {
        self.locality = Some(r);
        self
    }

    pub fn with_join(mut self, join: JoinFn) -> Self {
        self.join = Some(join);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        match &self.kind {
            IdealKind::ProperColoring { k } => {
                if *k == 0 {
                    return Err(Error::Config("proper coloring needs k >= 1".into()));
                }
            }
            IdealKind::DistanceConstrained { d, h } => {
                if !d.is_strictly_increasing() {
                    return Err(Error::Config("d must be strictly increasing".into()));
                }
                if h.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::Config("h must be nondecreasing".into()));
                }
                if h.iter()
                    .any(|b| b.finite().is_some_and(|r| !r.is_integer()))
                {
                    return Err(Error::Config("h entries must be integers or inf".into()));
                }
            }
            IdealKind::NotUniversal { d, big_d } => {
                if !d.is_strictly_increasing() {
                    return Err(Error::Config("d must be strictly increasing".into()));
                }
                if d.len() != big_d.len() {
                    return Err(Error::Config("d and D must have equal length".into()));
                }
                for (c, (dc, dd)) in d.0.iter().zip(&big_d.0).enumerate() {
                    if *dd < dc.double() + Radius::int(1) {
                        return Err(Error::Config(format!("D_{c} = {dd} < 2d_{c} + 1")));
                    }
                }
            }
            IdealKind::Reduced(ri) => {
                ri.base.validate()?;
                if ri.base.group != self.group {
                    return Err(Error::GroupMismatch(format!(
                        "reduced ideal over {} with base over {}",
                        self.group, ri.base.group
                    )));
                }
            }
        }
        Ok(())
    }

    /// The radius function used for locality, explicit or default.
    pub fn locality_fn(&self) -> Option<RadiusFn> {
        if let Some(r) = &self.locality {
            return Some(r.clone());
        }
        match &self.kind {
            IdealKind::ProperColoring { .. } => Some(RadiusFn::constant(1)),
            IdealKind::DistanceConstrained { d, h } => {
                let mut values = Vec::with_capacity(d.len().min(h.len()));
                for (dc, hc) in d.0.iter().zip(h) {
                    let floor_h = Radius::int(hc.finite()?.floor().saturating_sub(1));
                    values.push(dc.double().max(floor_h));
                }
                Some(RadiusFn::Table {
                    values: RadiusSeq(values),
                })
            }
            IdealKind::NotUniversal { big_d, .. } => Some(RadiusFn::Table {
                values: big_d.clone(),
            }),
            IdealKind::Reduced(_) => Some(RadiusFn::HeightMultiple { factor: 3 }),
        }
    }

    /// Number of plain colors with parameters, when that is finite.
    pub fn palette_len(&self) -> Option<usize> {
        match &self.kind {
            IdealKind::ProperColoring { k } => Some(*k as usize),
            IdealKind::DistanceConstrained { d, h } => Some(d.len().min(h.len())),
            IdealKind::NotUniversal { d, .. } => Some(d.len()),
            IdealKind::Reduced(_) => None,
        }
    }

    fn check_group(&self, phi: &PartialColoring) -> Result<()> {
        if *phi.group() != self.group {
            return Err(Error::GroupMismatch(format!(
                "coloring over {} tested against an ideal over {}",
                phi.group(),
                self.group
            )));
        }
        Ok(())
    }

    fn palette_color(&self, c: Color) -> Result<usize> {
        let i = c.nat()? as usize;
        let n = self.palette_len().unwrap_or(usize::MAX);
        if i >= n {
            return Err(Error::PaletteExhausted {
                color: c.to_string(),
                available: n,
            });
        }
        Ok(i)
    }
}

fn proper_contains(k: u32, group: &Group, phi: &PartialColoring) -> Result<bool> {
    let gens = group.generators();
    for (g, c) in phi.iter() {
        if c.nat()? >= k {
            return Ok(false);
        }
        for s in &gens {
            if phi.get(&mul_unchecked(s, g)) == Some(c) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn pairwise_contains(p: &dyn PairwiseIdeal, phi: &PartialColoring) -> Result<bool> {
    let pts: Vec<(&Element, Color)> = phi.iter().collect();
    for (i, &(g, cg)) in pts.iter().enumerate() {
        if !p.singleton_ok(g, cg)? {
            return Ok(false);
        }
        for &(h, ch) in &pts[i + 1..] {
            if !p.compatible(g, cg, h, ch)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Condition of the not-universal ideal seen from `γ` with color `c`.
fn not_universal_one_way(
    d: &RadiusSeq,
    big_d: &RadiusSeq,
    c: usize,
    dist: u64,
    other: usize,
) -> bool {
    if d.0[c].double().admits(dist) {
        other != c
    } else if big_d.0[c].admits(dist) {
        other > c
    } else {
        true
    }
}

impl PairwiseIdeal for IdealSpec {
    fn singleton_ok(&self, _g: &Element, c: Color) -> Result<bool> {
        match &self.kind {
            IdealKind::ProperColoring { k } => Ok(c.nat()? < *k),
            IdealKind::DistanceConstrained { .. } | IdealKind::NotUniversal { .. } => {
                self.palette_color(c).map(|_| true)
            }
            IdealKind::Reduced(_) => Err(Error::Precondition(
                "the reduced ideal has no pairwise presentation".into(),
            )),
        }
    }

    fn compatible(&self, g: &Element, cg: Color, h: &Element, ch: Color) -> Result<bool> {
        match &self.kind {
            IdealKind::ProperColoring { .. } => {
                Ok(cg.nat()? != ch.nat()? || dist_unchecked(g, h) != 1)
            }
            IdealKind::DistanceConstrained { d, h: hs } => {
                let (a, b) = (self.palette_color(cg)?, self.palette_color(ch)?);
                if a != b {
                    return Ok(true);
                }
                // dist >= 2d + 1 and dist >= h_c; an infinite h_c forbids any pair
                let dist = Radius::int(dist_unchecked(g, h));
                Ok(match hs[a] {
                    Bound::Infinite => false,
                    Bound::Finite(hc) => dist >= d.0[a].double() + Radius::int(1) && dist >= hc,
                })
            }
            IdealKind::NotUniversal { d, big_d } => {
                let (a, b) = (self.palette_color(cg)?, self.palette_color(ch)?);
                let dist = dist_unchecked(g, h);
                Ok(not_universal_one_way(d, big_d, a, dist, b)
                    && not_universal_one_way(d, big_d, b, dist, a))
            }
            IdealKind::Reduced(_) => Err(Error::Precondition(
                "the reduced ideal has no pairwise presentation".into(),
            )),
        }
    }
}

impl Ideal for IdealSpec {
    fn group(&self) -> Group {
        self.group
    }

    fn contains(&self, phi: &PartialColoring) -> Result<bool> {
        self.check_group(phi)?;
        match &self.kind {
            IdealKind::ProperColoring { k } => proper_contains(*k, &self.group, phi),
            IdealKind::Reduced(ri) => ri.contains(phi),
            _ => pairwise_contains(self, phi),
        }
    }

    fn admits(&self, phi: &PartialColoring, gamma: &Element, c: Color) -> Result<bool> {
        self.check_group(phi)?;
        self.group.check(gamma)?;
        if let IdealKind::Reduced(ri) = &self.kind {
            return ri.admits(phi, gamma, c);
        }
        if phi.contains_point(gamma) || !self.singleton_ok(gamma, c)? {
            return Ok(false);
        }
        for (h, ch) in phi.iter() {
            if !self.compatible(gamma, c, h, ch)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn locality(&self, c: Color) -> Result<Option<Radius>> {
        if let IdealKind::DistanceConstrained { d, h } = &self.kind {
            if self.locality.is_none() {
                // per color: a color with an infinite entry has no finite radius
                let i = self.palette_color(c)?;
                return Ok(h[i].finite().map(|hc| {
                    d.0[i]
                        .double()
                        .max(Radius::int(hc.floor().saturating_sub(1)))
                }));
            }
        }
        match self.locality_fn() {
            Some(r) => r.eval(c).map(Some),
            None => Ok(None),
        }
    }

    fn sample_palette(&self) -> Vec<Color> {
        match &self.kind {
            IdealKind::Reduced(ri) => ri.sample_palette(),
            _ => (0..self.palette_len().unwrap_or(1) as u32)
                .map(Color::Nat)
                .collect(),
        }
    }

    fn extension_colors(&self, c_max: u32) -> Vec<Color> {
        match &self.kind {
            IdealKind::Reduced(_) => (0..=c_max)
                .flat_map(|h| (0..=c_max).map(move |c| Color::pair(h, c)))
                .collect(),
            _ => {
                let cap = self
                    .palette_len()
                    .map_or(c_max, |n| c_max.min(n as u32 - 1));
                (0..=cap).map(Color::Nat).collect()
            }
        }
    }

    fn extend(&self, phi: &PartialColoring, gamma: &Element) -> Result<Option<Color>> {
        if let IdealKind::Reduced(ri) = &self.kind {
            return match ri.extend(phi, gamma) {
                Ok(p) => Ok(Some(Color::Pair(p))),
                Err(Error::Budget(_)) => Ok(None),
                Err(e) => Err(e),
            };
        }
        let c_max = default_c_max(self, phi, gamma)?;
        is_extendable_at(self, phi, gamma, c_max)
    }

    fn pairwise(&self) -> Option<&dyn PairwiseIdeal> {
        match self.kind {
            IdealKind::Reduced(_) => None,
            _ => Some(self),
        }
    }
}

/// The least `c <= c_max` with `φ ∪ {(γ, c)} ∈ P`.
pub fn is_extendable_at<I: Ideal + ?Sized>(
    ideal: &I,
    phi: &PartialColoring,
    gamma: &Element,
    c_max: u32,
) -> Result<Option<Color>> {
    ideal.group().check(gamma)?;
    if phi.contains_point(gamma) {
        return Err(Error::Precondition(format!("{gamma} is already colored")));
    }
    if !ideal.contains(phi)? {
        return Err(Error::Precondition(format!("{phi:?} is not in the ideal")));
    }
    for c in ideal.extension_colors(c_max) {
        if ideal.admits(phi, gamma, c)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// `(largest color in φ) + |Ball(γ, ρ)| + 1`, where `ρ` is the largest finite
/// locality radius among the colors of `φ` (at least 1).
pub fn default_c_max<I: Ideal + ?Sized>(
    ideal: &I,
    phi: &PartialColoring,
    _gamma: &Element,
) -> Result<u32> {
    let mut rho = 1u64;
    let mut top = 0u32;
    for c in phi.colors() {
        if let Some(r) = ideal.locality(c)? {
            rho = rho.max(r.floor());
        }
        top = top.max(match c {
            Color::Nat(v) => v,
            Color::Pair(p) => p.h.max(p.c),
        });
    }
    let ball = ideal.group().ball_size(rho).min(u32::MAX as u128) as u32;
    Ok(top.saturating_add(ball).saturating_add(1))
}

/// `ω ∈ P` for a coloring of a finite window, via the local criterion
/// `ω[γ, r(ω(γ))] ∈ P` at every point when the ideal is local and by direct
/// membership otherwise. Windows of points near the edge are clipped to the
/// window, which is exact because `ω` has no entries outside it.
pub fn col_window_check<I: Ideal + ?Sized>(omega: &PartialColoring, ideal: &I) -> Result<bool> {
    let mut radii = Vec::with_capacity(omega.len());
    for (_, c) in omega.iter() {
        match ideal.locality(c)? {
            Some(r) => radii.push(r),
            None => return ideal.contains(omega),
        }
    }
    for ((g, _), r) in omega.iter().zip(radii) {
        if !ideal.contains(&omega.window(g, r))? {
            return Ok(false);
        }
    }
    Ok(true)
}
