//! Finitely generated groups with their standard symmetric generating sets
//! and the induced right-invariant word metric.
//!
//! Two families are supported: the free abelian groups `Z^d` (generators
//! `±e_i`) and the free groups `F_k` (generators `a_i`, `a_i^{-1}`). Elements
//! are stored in canonical form: integer vectors and freely reduced words.
//!
//! The metric is `dist(g, h) = |h·g⁻¹|`, so `dist(g·x, h·x) = dist(g, h)`.
//! Balls are enumerated by breadth-first search in the Cayley graph whose
//! edges join `g` and `s·g` for each generator `s`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::radius::{Bound, Radius};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    /// `Z^d`, `d >= 1`.
    Lattice { dim: u32 },
    /// The free group of rank `k`, `1 <= k <= 26`.
    Free { rank: u32 },
}

/// A generator `a_i` or its inverse. Ordered `a < A < b < B < …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u8,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    fn to_char(self) -> char {
        let c = (b'a' + self.generator) as char;
        if self.inverse {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    fn from_char(c: char) -> Option<Letter> {
        if !c.is_ascii_alphabetic() {
            return None;
        }
        Some(Letter {
            generator: c.to_ascii_lowercase() as u8 - b'a',
            inverse: c.is_ascii_uppercase(),
        })
    }
}

/// A group element in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Lattice(Vec<i64>),
    Word(Vec<Letter>),
}

impl Element {
    /// Word length with respect to the standard generators.
    pub fn norm(&self) -> u64 {
        match self {
            Element::Lattice(v) => v.iter().map(|x| x.unsigned_abs()).sum(),
            Element::Word(w) => w.len() as u64,
        }
    }

    /// Plain lexicographic order on the canonical form.
    pub fn lex_cmp(&self, other: &Element) -> Ordering {
        match (self, other) {
            (Element::Lattice(a), Element::Lattice(b)) => a.cmp(b),
            (Element::Word(a), Element::Word(b)) => a.cmp(b),
            (Element::Lattice(_), Element::Word(_)) => Ordering::Less,
            (Element::Word(_), Element::Lattice(_)) => Ordering::Greater,
        }
    }

    /// Convenience constructor for `Z^1`.
    pub fn int(x: i64) -> Element {
        Element::Lattice(vec![x])
    }

    /// Parse a word over `abAB…` (capitals are inverses), freely reducing it.
    pub fn word(s: &str) -> Result<Element> {
        let mut out: Vec<Letter> = Vec::with_capacity(s.len());
        for c in s.chars() {
            let l = Letter::from_char(c)
                .ok_or_else(|| Error::Parse(format!("invalid letter {c:?} in word {s:?}")))?;
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(Element::Word(out))
    }

    /// Stable 64-bit digest of the canonical form. Independent of any region
    /// or iteration order; used to key counter-based randomness.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0x243F_6A88_85A3_08D3;
        match self {
            Element::Lattice(v) => {
                for &x in v {
                    h = crate::sim::field::mix64(h ^ (x as u64));
                }
            }
            Element::Word(w) => {
                h ^= 0x9E37_79B9;
                for l in w {
                    let code = ((l.generator as u64) << 1) | l.inverse as u64;
                    h = crate::sim::field::mix64(h ^ (code + 1));
                }
                h = crate::sim::field::mix64(h ^ w.len() as u64);
            }
        }
        h
    }
}

/// Shortlex: norm first, then lexicographic. Iterating an ordered map of
/// elements therefore visits them in breadth-first order from the identity.
impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm()
            .cmp(&other.norm())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Lattice(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Element::Lattice(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Element::Word(w) if w.is_empty() => f.write_str("1"),
            Element::Word(w) => w.iter().try_for_each(|l| write!(f, "{}", l.to_char())),
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Element::Lattice(v) => v.serialize(s),
            Element::Word(w) => s.serialize_str(&w.iter().map(|l| l.to_char()).collect::<String>()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawElement {
    Vector(Vec<i64>),
    Word(String),
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawElement::deserialize(d)? {
            RawElement::Vector(v) => Ok(Element::Lattice(v)),
            RawElement::Word(w) => Element::word(&w).map_err(de::Error::custom),
        }
    }
}

impl Group {
    pub fn identity(&self) -> Element {
        match *self {
            Group::Lattice { dim } => Element::Lattice(vec![0; dim as usize]),
            Group::Free { .. } => Element::Word(Vec::new()),
        }
    }

    /// The standard symmetric generating set, in enumeration order.
    pub fn generators(&self) -> Vec<Element> {
        match *self {
            Group::Lattice { dim } => {
                let mut out = Vec::with_capacity(2 * dim as usize);
                for i in 0..dim as usize {
                    for sign in [-1, 1] {
                        let mut v = vec![0; dim as usize];
                        v[i] = sign;
                        out.push(Element::Lattice(v));
                    }
                }
                out.sort_by(|a, b| a.lex_cmp(b));
                out
            }
            Group::Free { rank } => (0..rank as u8)
                .flat_map(|g| {
                    [false, true].map(|inverse| {
                        Element::Word(vec![Letter {
                            generator: g,
                            inverse,
                        }])
                    })
                })
                .collect(),
        }
    }

    /// Number of generators, `|S|`.
    pub fn degree(&self) -> usize {
        match *self {
            Group::Lattice { dim } => 2 * dim as usize,
            Group::Free { rank } => 2 * rank as usize,
        }
    }

    pub fn check(&self, g: &Element) -> Result<()> {
        match (*self, g) {
            (Group::Lattice { dim }, Element::Lattice(v)) if v.len() == dim as usize => Ok(()),
            (Group::Free { rank }, Element::Word(w))
                if w.iter().all(|l| (l.generator as u32) < rank) =>
            {
                Ok(())
            }
            _ => Err(Error::GroupMismatch(format!(
                "{g} is not an element of {self}"
            ))),
        }
    }

    pub fn mul(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(mul_unchecked(g, h))
    }

    pub fn inverse(&self, g: &Element) -> Result<Element> {
        self.check(g)?;
        Ok(inverse_unchecked(g))
    }

    /// `dist(g, h) = |h·g⁻¹|`.
    pub fn dist(&self, g: &Element, h: &Element) -> Result<u64> {
        self.check(g)?;
        self.check(h)?;
        Ok(dist_unchecked(g, h))
    }

    /// Closed ball, ordered by distance from `center` and then
    /// lexicographically within each layer.
    pub fn ball(&self, center: &Element, r: Radius) -> Result<Vec<Element>> {
        self.check(center)?;
        let depth = r.floor();
        let gens = self.generators();
        let mut seen: HashSet<Element> = HashSet::new();
        seen.insert(center.clone());
        let mut out = vec![center.clone()];
        let mut frontier = vec![center.clone()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for g in &frontier {
                for s in &gens {
                    let n = mul_unchecked(s, g);
                    if seen.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_by(|a, b| a.lex_cmp(b));
            out.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(out)
    }

    /// `|Ball(·, r)|`, which does not depend on the center.
    pub fn ball_size(&self, r: u64) -> u128 {
        match *self {
            Group::Lattice { dim } => {
                // Σ_k 2^k C(d,k) C(r,k)
                let (d, r) = (dim as u128, r as u128);
                let mut total = 0u128;
                let mut cd = 1u128;
                let mut cr = 1u128;
                let mut pow = 1u128;
                for k in 0..=d.min(r) {
                    total = total.saturating_add(pow.saturating_mul(cd).saturating_mul(cr));
                    cd = cd * (d - k) / (k + 1);
                    cr = cr.saturating_mul(r - k) / (k + 1);
                    pow = pow.saturating_mul(2);
                }
                total
            }
            Group::Free { rank } => {
                let k = rank as u128;
                let mut total = 1u128;
                let mut sphere = 2 * k;
                for _ in 0..r {
                    total = total.saturating_add(sphere);
                    sphere = sphere.saturating_mul(2 * k - 1);
                }
                total
            }
        }
    }

    /// `inf{dist(a, b)}` over pairs; `∞` when either set is empty.
    pub fn set_dist(&self, a: &[Element], b: &[Element]) -> Result<Bound> {
        let mut best: Option<u64> = None;
        for x in a {
            for y in b {
                let d = self.dist(x, y)?;
                best = Some(best.map_or(d, |m| m.min(d)));
            }
        }
        Ok(best.map_or(Bound::Infinite, |d| Bound::Finite(Radius::int(d))))
    }

    /// A uniformly-ish random element of norm exactly `n`.
    pub fn random_of_norm<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Element {
        match *self {
            Group::Lattice { dim } => {
                let mut v = vec![0i64; dim as usize];
                for _ in 0..n {
                    let i = rng.gen_range(0..dim as usize);
                    let step = match v[i].signum() {
                        0 => {
                            if rng.gen_bool(0.5) {
                                1
                            } else {
                                -1
                            }
                        }
                        s => s,
                    };
                    v[i] += step;
                }
                Element::Lattice(v)
            }
            Group::Free { rank } => {
                let mut w: Vec<Letter> = Vec::with_capacity(n as usize);
                while (w.len() as u64) < n {
                    let l = Letter {
                        generator: rng.gen_range(0..rank as u8),
                        inverse: rng.gen_bool(0.5),
                    };
                    if w.last() != Some(&l.inv()) {
                        w.push(l);
                    }
                }
                Element::Word(w)
            }
        }
    }
}

pub(crate) fn mul_unchecked(g: &Element, h: &Element) -> Element {
    match (g, h) {
        (Element::Lattice(a), Element::Lattice(b)) => {
            Element::Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect())
        }
        (Element::Word(a), Element::Word(b)) => {
            let mut cancel = 0;
            while cancel < a.len() && cancel < b.len() && a[a.len() - 1 - cancel] == b[cancel].inv()
            {
                cancel += 1;
            }
            let mut w = Vec::with_capacity(a.len() + b.len() - 2 * cancel);
            w.extend_from_slice(&a[..a.len() - cancel]);
            w.extend_from_slice(&b[cancel..]);
            Element::Word(w)
        }
        _ => panic!("mul_unchecked on elements of different groups"),
    }
}

pub(crate) fn inverse_unchecked(g: &Element) -> Element {
    match g {
        Element::Lattice(v) => Element::Lattice(v.iter().map(|x| -x).collect()),
        Element::Word(w) => Element::Word(w.iter().rev().map(|l| l.inv()).collect()),
    }
}

pub(crate) fn dist_unchecked(g: &Element, h: &Element) -> u64 {
    match (g, h) {
        (Element::Lattice(a), Element::Lattice(b)) => {
            a.iter().zip(b).map(|(x, y)| (y - x).unsigned_abs()).sum()
        }
        // h·g⁻¹ cancels exactly the common suffix of h and g
        (Element::Word(a), Element::Word(b)) => {
            let common = a
                .iter()
                .rev()
                .zip(b.iter().rev())
                .take_while(|(x, y)| x == y)
                .count();
            (a.len() + b.len() - 2 * common) as u64
        }
        _ => panic!("dist_unchecked on elements of different groups"),
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Lattice { dim } => write!(f, "Z^{dim}"),
            Group::Free { rank } => write!(f, "F_{rank}"),
        }
    }
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid group {s:?} (expected \"Z^d\" or \"F_k\")"));
        if let Some(d) = s.strip_prefix("Z^") {
            let dim: u32 = d.parse().map_err(|_| bad())?;
            if dim == 0 {
                return Err(bad());
            }
            Ok(Group::Lattice { dim })
        } else if let Some(k) = s.strip_prefix("F_") {
            let rank: u32 = k.parse().map_err(|_| bad())?;
            if rank == 0 || rank > 26 {
                return Err(bad());
            }
            Ok(Group::Free { rank })
        } else {
            Err(bad())
        }
    }
}

impl Serialize for Group {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> Group {
        "Z^1".parse().unwrap()
    }
    fn f2() -> Group {
        "F_2".parse().unwrap()
    }
    fn w(s: &str) -> Element {
        Element::word(s).unwrap()
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(
            z1().mul(&Element::int(3), &Element::int(5)).unwrap(),
            Element::int(8)
        );
        assert_eq!(f2().mul(&w("a"), &w("A")).unwrap(), w(""));
        assert_eq!(f2().mul(&w("ab"), &w("Ba")).unwrap(), w("aa"));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(z1().dist(&Element::int(3), &Element::int(5)).unwrap(), 2);
        let z2: Group = "Z^2".parse().unwrap();
        let o = Element::Lattice(vec![0, 0]);
        assert_eq!(z2.dist(&o, &Element::Lattice(vec![2, -1])).unwrap(), 3);
        assert_eq!(f2().dist(&w("a"), &w("ba")).unwrap(), 1);
        // right- vs left-invariance: (ba)(a)⁻¹ = b but a⁻¹(ba) has length 3
        assert_eq!(f2().dist(&w("a"), &w("ab")).unwrap(), 3);
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        assert!(matches!(
            f2().mul(&w("a"), &Element::int(1)),
            Err(Error::GroupMismatch(_))
        ));
        assert!(z1()
            .dist(&Element::Lattice(vec![0, 0]), &Element::int(0))
            .is_err());
        assert!("F_3".parse::<Group>().unwrap().check(&w("ab")).is_ok());
        assert!(f2().check(&w("c")).is_err());
    }

    #[test]
    fn ball_examples() {
        let b = z1().ball(&Element::int(0), Radius::int(2)).unwrap();
        assert_eq!(b, [0, -1, 1, -2, 2].map(Element::int).to_vec());
        let b = z1()
            .ball(&Element::int(0), Radius::new(3, 2).unwrap())
            .unwrap();
        assert_eq!(b.len(), 3);
        let b = f2().ball(&w(""), Radius::int(2)).unwrap();
        assert_eq!(b.len(), 17);
        assert_eq!(f2().ball_size(2), 17);
        assert_eq!(z1().ball_size(2), 5);
        let z2: Group = "Z^2".parse().unwrap();
        assert_eq!(
            z2.ball(&z2.identity(), Radius::int(3)).unwrap().len() as u128,
            z2.ball_size(3)
        );
    }

    #[test]
    fn ball_layers_are_sorted() {
        let b = f2().ball(&w("a"), Radius::int(1)).unwrap();
        assert_eq!(b[0], w("a"));
        let layer: Vec<String> = b[1..].iter().map(|e| e.to_string()).collect();
        assert_eq!(layer, ["1", "aa", "ba", "Ba"]);
    }

    #[test]
    fn set_distance() {
        let g = z1();
        let a = [Element::int(0)];
        assert_eq!(
            g.set_dist(&a, &[Element::int(5)]).unwrap(),
            Bound::Finite(Radius::int(5))
        );
        assert_eq!(g.set_dist(&a, &[]).unwrap(), Bound::Infinite);
        let a = [Element::int(0), Element::int(1)];
        let b = [Element::int(3), Element::int(10)];
        assert_eq!(g.set_dist(&a, &b).unwrap(), Bound::Finite(Radius::int(2)));
    }

    #[test]
    fn parse_and_display() {
        assert!("Z^0".parse::<Group>().is_err());
        assert!("G".parse::<Group>().is_err());
        assert_eq!(w("abBa").to_string(), "aa");
        assert_eq!(serde_json::to_string(&w("aB")).unwrap(), "\"aB\"");
        let e: Element = serde_json::from_str("[2,-1]").unwrap();
        assert_eq!(e, Element::Lattice(vec![2, -1]));
    }

    #[test]
    fn random_norm_is_exact() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for g in [z1(), f2(), "Z^3".parse().unwrap()] {
            for n in 0..10 {
                assert_eq!(g.random_of_norm(n, &mut rng).norm(), n);
            }
        }
    }
}
