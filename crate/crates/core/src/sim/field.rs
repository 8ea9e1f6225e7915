//! Per-step binary support fields `x_i : region → {0, 1}`.
//!
//! The Bernoulli field is counter based: the bit at `(seed, step, element)`
//! is a hash of those three values alone, so it does not depend on which
//! region is being simulated or in what order points are visited.

use std::collections::HashSet;

use crate::group::{mul_unchecked, Element};

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub trait SupportField {
    fn is_support(&self, step: usize, g: &Element) -> bool;

    /// Same as [`SupportField::is_support`] with a precomputed digest of `g`.
    fn is_support_digest(&self, step: usize, g: &Element, _digest: u64) -> bool {
        self.is_support(step, g)
    }
}

/// iid Bernoulli(`numer/denom`) bits.
#[derive(Clone, Debug)]
pub struct BernoulliField {
    seed: u64,
    numer: u64,
    denom: u64,
}

impl BernoulliField {
    pub fn new(seed: u64, numer: u64, denom: u64) -> Self {
        assert!(denom > 0 && numer <= denom, "density must lie in [0, 1]");
        BernoulliField { seed, numer, denom }
    }

    fn bit(&self, step: usize, digest: u64) -> bool {
        let key = mix64(mix64(self.seed ^ 0x5851_F42D_4C95_7F2D) ^ step as u64);
        let h = mix64(key ^ digest);
        // h / 2^64 < numer / denom
        ((h as u128 * self.denom as u128) >> 64) < self.numer as u128
    }
}

impl SupportField for BernoulliField {
    fn is_support(&self, step: usize, g: &Element) -> bool {
        self.bit(step, g.digest())
    }

    fn is_support_digest(&self, step: usize, _g: &Element, digest: u64) -> bool {
        self.bit(step, digest)
    }
}

/// Explicit supports per step; steps past the end have empty support.
#[derive(Clone, Debug, Default)]
pub struct ForcedField {
    pub supports: Vec<HashSet<Element>>,
}

impl ForcedField {
    pub fn new(supports: Vec<Vec<Element>>) -> Self {
        ForcedField {
            supports: supports
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
        }
    }
}

impl SupportField for ForcedField {
    fn is_support(&self, step: usize, g: &Element) -> bool {
        self.supports.get(step).is_some_and(|s| s.contains(g))
    }
}

/// `x'_i(δ) = x_i(δγ)`, the shift of a field by `γ`.
pub struct ShiftedField<F> {
    pub inner: F,
    pub gamma: Element,
}

impl<F: SupportField> SupportField for ShiftedField<F> {
    fn is_support(&self, step: usize, g: &Element) -> bool {
        self.inner.is_support(step, &mul_unchecked(g, &self.gamma))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_is_reproducible_and_roughly_calibrated() {
        let f = BernoulliField::new(7, 1, 4);
        let pts: Vec<Element> = (-2000..2000).map(Element::int).collect();
        let a: Vec<bool> = pts.iter().map(|g| f.is_support(3, g)).collect();
        let b: Vec<bool> = pts.iter().rev().map(|g| f.is_support(3, g)).collect();
        assert!(a.iter().eq(b.iter().rev()));
        let hits = a.iter().filter(|&&x| x).count() as f64 / pts.len() as f64;
        assert!((hits - 0.25).abs() < 0.03, "{hits}");
        let other_step = pts.iter().filter(|g| f.is_support(4, g)).count();
        assert_ne!(other_step, a.iter().filter(|&&x| x).count());
    }

    #[test]
    fn extreme_densities() {
        let never = BernoulliField::new(1, 0, 1);
        let always = BernoulliField::new(1, 1, 1);
        for x in -50..50 {
            assert!(!never.is_support(0, &Element::int(x)));
            assert!(always.is_support(0, &Element::int(x)));
        }
    }

    #[test]
    fn shifted_field_reads_translated_points() {
        let base = ForcedField::new(vec![vec![Element::int(5)]]);
        let shifted = ShiftedField {
            inner: base,
            gamma: Element::int(2),
        };
        assert!(shifted.is_support(0, &Element::int(3)));
        assert!(!shifted.is_support(0, &Element::int(5)));
        assert!(!shifted.is_support(1, &Element::int(3)));
    }
}
