//! Finite partial colorings `φ : Γ ⇀ colors` and the shift action on them.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{dist_unchecked, inverse_unchecked, mul_unchecked, Element, Group};
use crate::radius::Radius;

/// Product-coded color `(h, c)`: `h` is the height/radius budget, `c` the
/// color it stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct ProductColor {
    pub h: u32,
    pub c: u32,
}

impl From<(u32, u32)> for ProductColor {
    fn from((h, c): (u32, u32)) -> Self {
        ProductColor { h, c }
    }
}

impl From<ProductColor> for (u32, u32) {
    fn from(p: ProductColor) -> Self {
        (p.h, p.c)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Color {
    Nat(u32),
    Pair(ProductColor),
}

impl Color {
    pub fn pair(h: u32, c: u32) -> Color {
        Color::Pair(ProductColor { h, c })
    }

    pub fn nat(self) -> Result<u32> {
        match self {
            Color::Nat(c) => Ok(c),
            Color::Pair(p) => Err(Error::ColorKind(format!(
                "expected a plain color, found ({}, {})",
                p.h, p.c
            ))),
        }
    }

    pub fn product(self) -> Result<ProductColor> {
        match self {
            Color::Pair(p) => Ok(p),
            Color::Nat(c) => Err(Error::ColorKind(format!(
                "expected a product color, found {c}"
            ))),
        }
    }
}

impl From<u32> for Color {
    fn from(c: u32) -> Self {
        Color::Nat(c)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Nat(c) => write!(f, "{c}"),
            Color::Pair(p) => write!(f, "({},{})", p.h, p.c),
        }
    }
}

impl fmt::Debug for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite partial map from group elements to colors. Entries are kept in
/// the canonical (shortlex) element order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialColoring {
    group: Group,
    entries: BTreeMap<Element, Color>,
}

impl PartialColoring {
    pub fn empty(group: Group) -> Self {
        PartialColoring {
            group,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<I, C>(group: Group, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Element, C)>,
        C: Into<Color>,
    {
        let mut phi = PartialColoring::empty(group);
        for (g, c) in entries {
            group.check(&g)?;
            let c = c.into();
            if let Some(prev) = phi.entries.insert(g.clone(), c) {
                if prev != c {
                    return Err(Error::Precondition(format!(
                        "{g} assigned both {prev} and {c}"
                    )));
                }
            }
        }
        Ok(phi)
    }

    /// `Z^1` shorthand used all over the tests.
    pub fn z1<C: Into<Color> + Copy>(pairs: &[(i64, C)]) -> Self {
        Self::from_entries(
            Group::Lattice { dim: 1 },
            pairs.iter().map(|&(x, c)| (Element::int(x), c)),
        )
        .expect("valid Z^1 coloring")
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, g: &Element) -> Option<Color> {
        self.entries.get(g).copied()
    }

    pub fn contains_point(&self, g: &Element) -> bool {
        self.entries.contains_key(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, Color)> + '_ {
        self.entries.iter().map(|(g, &c)| (g, c))
    }

    pub fn domain(&self) -> impl Iterator<Item = &Element> + '_ {
        self.entries.keys()
    }

    pub fn domain_vec(&self) -> Vec<Element> {
        self.entries.keys().cloned().collect()
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        self.entries.values().copied()
    }

    /// Insert a new point; fails if it is already colored.
    pub fn insert(&mut self, g: Element, c: Color) -> Result<()> {
        self.group.check(&g)?;
        if self.entries.contains_key(&g) {
            return Err(Error::Precondition(format!("{g} is already colored")));
        }
        self.entries.insert(g, c);
        Ok(())
    }

    pub fn with(&self, g: &Element, c: Color) -> Result<Self> {
        let mut out = self.clone();
        out.insert(g.clone(), c)?;
        Ok(out)
    }

    pub fn remove(&mut self, g: &Element) -> Option<Color> {
        self.entries.remove(g)
    }

    pub fn is_subset_of(&self, other: &PartialColoring) -> bool {
        self.group == other.group && self.iter().all(|(g, c)| other.get(g) == Some(c))
    }

    /// `φ|S` for the points of `S` that lie in the domain.
    pub fn restrict<'a, I>(&self, points: I) -> PartialColoring
    where
        I: IntoIterator<Item = &'a Element>,
    {
        let mut out = PartialColoring::empty(self.group);
        for g in points {
            if let Some(c) = self.get(g) {
                out.entries.insert(g.clone(), c);
            }
        }
        out
    }

    pub fn filter<F: FnMut(&Element, Color) -> bool>(&self, mut keep: F) -> PartialColoring {
        PartialColoring {
            group: self.group,
            entries: self
                .entries
                .iter()
                .filter(|(g, c)| keep(g, **c))
                .map(|(g, c)| (g.clone(), *c))
                .collect(),
        }
    }

    /// `φ[γ, r] = φ|(dom φ ∩ Ball(γ, r))`.
    pub fn window(&self, center: &Element, r: Radius) -> PartialColoring {
        self.filter(|g, _| r.admits(dist_unchecked(center, g)))
    }

    /// `φ[γ, r; h]`: the window further restricted to entries whose height is
    /// at most `h`. Non-product entries are dropped.
    pub fn truncated_window(&self, center: &Element, r: Radius, h: u32) -> PartialColoring {
        self.filter(|g, c| {
            matches!(c, Color::Pair(p) if p.h <= h) && r.admits(dist_unchecked(center, g))
        })
    }

    /// The shift action: `dom(γ·φ) = {δγ⁻¹}` and `(γ·φ)(δ) = φ(δγ)`.
    pub fn shift(&self, gamma: &Element) -> Result<PartialColoring> {
        self.group.check(gamma)?;
        let inv = inverse_unchecked(gamma);
        Ok(PartialColoring {
            group: self.group,
            entries: self
                .entries
                .iter()
                .map(|(d, &c)| (mul_unchecked(d, &inv), c))
                .collect(),
        })
    }

    /// Union of two colorings that agree on their common domain.
    pub fn union(&self, other: &PartialColoring) -> Result<PartialColoring> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(format!(
                "union of colorings over {} and {}",
                self.group, other.group
            )));
        }
        let mut out = self.clone();
        for (g, c) in other.iter() {
            match out.entries.insert(g.clone(), c) {
                Some(prev) if prev != c => {
                    return Err(Error::Precondition(format!(
                        "union conflict at {g}: {prev} vs {c}"
                    )))
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// `φ ∖ ψ` by domain.
    pub fn minus(&self, other: &PartialColoring) -> PartialColoring {
        self.filter(|g, _| !other.contains_point(g))
    }

    /// Apply a color map to every entry.
    pub fn map_colors<F: FnMut(Color) -> Result<Color>>(
        &self,
        mut f: F,
    ) -> Result<PartialColoring> {
        let mut entries = BTreeMap::new();
        for (g, c) in self.iter() {
            entries.insert(g.clone(), f(c)?);
        }
        Ok(PartialColoring {
            group: self.group,
            entries,
        })
    }

    /// Largest plain color, if any.
    pub fn max_nat(&self) -> Option<u32> {
        self.colors().filter_map(|c| c.nat().ok()).max()
    }
}

impl fmt::Debug for PartialColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (g, c)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}↦{c}")?;
        }
        f.write_str("}")
    }
}

struct Entries<'a>(&'a BTreeMap<Element, Color>);

impl Serialize for Entries<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (g, c) in self.0 {
            seq.serialize_element(&(g, c))?;
        }
        seq.end()
    }
}

impl Serialize for PartialColoring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PartialColoring", 2)?;
        st.serialize_field("group", &self.group)?;
        st.serialize_field("entries", &Entries(&self.entries))?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawColoring {
    group: Group,
    entries: Vec<(Element, Color)>,
}

impl<'de> Deserialize<'de> for PartialColoring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawColoring::deserialize(d)?;
        PartialColoring::from_entries(raw.group, raw.entries).map_err(de::Error::custom)
    }
}

/// Call `f` on every coloring with domain a subset of `points` of size at
/// most `max_size` and colors from `colors`. Subsets come in lexicographic
/// index order and colorings in palette order within each subset.
pub fn for_each_pattern<F>(
    group: Group,
    points: &[Element],
    max_size: usize,
    colors: &[Color],
    mut f: F,
) -> Result<()>
where
    F: FnMut(&PartialColoring) -> Result<()>,
{
    fn rec<F>(
        points: &[Element],
        start: usize,
        left: usize,
        colors: &[Color],
        phi: &mut PartialColoring,
        f: &mut F,
    ) -> Result<()>
    where
        F: FnMut(&PartialColoring) -> Result<()>,
    {
        f(phi)?;
        if left == 0 {
            return Ok(());
        }
        for i in start..points.len() {
            for &c in colors {
                phi.insert(points[i].clone(), c)?;
                rec(points, i + 1, left - 1, colors, phi, f)?;
                phi.remove(&points[i]);
            }
        }
        Ok(())
    }
    let mut phi = PartialColoring::empty(group);
    rec(points, 0, max_size, colors, &mut phi, &mut f)
}

/// Number of colorings [`for_each_pattern`] visits.
pub fn pattern_count(points: usize, max_size: usize, colors: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for k in 0..=max_size.min(points) {
        total += binom * (colors as u128).pow(k as u32);
        binom = binom * (points - k) as u128 / (k + 1) as u128;
    }
    total
}
