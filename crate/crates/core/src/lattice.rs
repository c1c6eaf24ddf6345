//! Finite index sets with a fixed-point-free involution.
//!
//! A [`Lattice`] is stored in canonical form: the `+` side is a list of
//! labels `p_0, …, p_{m-1}` and the `−` side is its mirror, `minus[k] =
//! ϑ(plus[k])`. Every site gets a *bit position* in a global total order:
//!
//! ```text
//!   ϑ(p_{m-1})  …  ϑ(p_1)  ϑ(p_0) | p_0  p_1  …  p_{m-1}
//!   bit 0                 bit m-1 | bit m          bit 2m-1
//! ```
//!
//! With this order the involution is bit reversal, `b ↦ 2m-1-b`, every
//! canonical monomial factors as (minus part)(plus part) without a sign, and
//! the reflection of an ascending word is a descending word.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};

/// Maximum number of sites, i.e. of Majorana generators for the Clifford
/// algebra. Words are stored as `u64` bitmasks.
pub const MAX_SITES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Lattice {
    plus: Vec<String>,
    minus: Vec<String>,
}

impl Lattice {
    /// Builds a lattice from the `+` side labels and their mirror images.
    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, S)>) -> Result<Self> {
        let (plus, minus): (Vec<String>, Vec<String>) = pairs
            .into_iter()
            .map(|(p, q)| (p.into(), q.into()))
            .unzip();
        Self::validated(plus, minus)
    }

    /// Lattice whose `+` side is labelled `0, 1, …` and whose mirror sites
    /// carry a trailing prime.
    pub fn with_plus_sites(m: usize) -> Result<Self> {
        Self::from_pairs((0..m).map(|k| (format!("{k}"), format!("{k}'"))))
    }

    /// Builds a lattice from an unordered description: the full site list,
    /// the involution as a map, and the set of `+` sites. The `+` order of the
    /// result follows `plus`.
    pub fn from_involution(
        sites: &[String],
        involution: &BTreeMap<String, String>,
        plus: &[String],
    ) -> Result<Self> {
        let site_set: BTreeSet<&String> = sites.iter().collect();
        if site_set.len() != sites.len() {
            return Err(Error::Config("duplicate site label in lattice".into()));
        }
        for s in sites {
            let image = involution
                .get(s)
                .ok_or_else(|| Error::Config(format!("involution undefined on site {s:?}")))?;
            if image == s {
                return Err(Error::Config(format!(
                    "involution has a fixed point at site {s:?}"
                )));
            }
            if !site_set.contains(image) {
                return Err(Error::Config(format!(
                    "involution maps {s:?} to unknown site {image:?}"
                )));
            }
            if involution.get(image) != Some(s) {
                return Err(Error::Config(format!(
                    "involution is not its own inverse at site {s:?}"
                )));
            }
        }
        if let Some(extra) = involution.keys().find(|k| !site_set.contains(k)) {
            return Err(Error::Config(format!(
                "involution defined on unknown site {extra:?}"
            )));
        }
        let plus_set: BTreeSet<&String> = plus.iter().collect();
        if plus_set.len() != plus.len() {
            return Err(Error::Config("duplicate site in the + side".into()));
        }
        for p in plus {
            if !site_set.contains(p) {
                return Err(Error::Config(format!("+ side names unknown site {p:?}")));
            }
            if plus_set.contains(&involution[p]) {
                return Err(Error::Config(format!(
                    "sites {p:?} and {:?} are mirror images but both on the + side",
                    involution[p]
                )));
            }
        }
        if 2 * plus.len() != sites.len() {
            return Err(Error::Config(format!(
                "+ side has {} sites but the lattice has {}; |Λ+| must equal |Λ-|",
                plus.len(),
                sites.len()
            )));
        }
        let minus = plus.iter().map(|p| involution[p].clone()).collect();
        Self::validated(plus.to_vec(), minus)
    }

    fn validated(plus: Vec<String>, minus: Vec<String>) -> Result<Self> {
        if plus.is_empty() {
            return Err(Error::Config("lattice has no sites".into()));
        }
        let n = plus.len() + minus.len();
        if n > MAX_SITES {
            return Err(Error::SizeCap {
                what: "number of lattice sites",
                actual: n,
                limit: MAX_SITES,
            });
        }
        let mut seen = BTreeSet::new();
        for (p, q) in plus.iter().zip(&minus) {
            if p == q {
                return Err(Error::Config(format!(
                    "involution has a fixed point at site {p:?}"
                )));
            }
            for s in [p, q] {
                if !seen.insert(s.clone()) {
                    return Err(Error::Config(format!("duplicate site label {s:?}")));
                }
            }
        }
        Ok(Self { plus, minus })
    }

    /// Number of sites on the `+` side, `m = |Λ+|`.
    pub fn half(&self) -> usize {
        self.plus.len()
    }

    /// Total number of sites `|Λ| = 2m`.
    pub fn len(&self) -> usize {
        2 * self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn plus_labels(&self) -> &[String] {
        &self.plus
    }

    pub fn minus_labels(&self) -> &[String] {
        &self.minus
    }

    /// Bit position of the `k`-th `+` site.
    pub fn plus_bit(&self, k: usize) -> u32 {
        (self.half() + k) as u32
    }

    /// Bit position of the mirror of the `k`-th `+` site.
    pub fn minus_bit(&self, k: usize) -> u32 {
        (self.half() - 1 - k) as u32
    }

    /// Mirror of a bit position under the involution.
    pub fn mirror_bit(&self, bit: u32) -> u32 {
        self.len() as u32 - 1 - bit
    }

    pub fn side(&self, bit: u32) -> Side {
        if (bit as usize) < self.half() {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    pub fn label(&self, bit: u32) -> &str {
        let m = self.half();
        let b = bit as usize;
        if b < m {
            &self.minus[m - 1 - b]
        } else {
            &self.plus[b - m]
        }
    }

    pub fn bit_of(&self, label: &str) -> Option<u32> {
        if let Some(k) = self.plus.iter().position(|p| p == label) {
            return Some(self.plus_bit(k));
        }
        self.minus
            .iter()
            .position(|p| p == label)
            .map(|k| self.minus_bit(k))
    }

    /// Labels in global order.
    pub fn ordered_labels(&self) -> Vec<&str> {
        (0..self.len() as u32).map(|b| self.label(b)).collect()
    }

    /// Mask with every `−` bit set.
    pub fn minus_mask(&self) -> u64 {
        low_bits(self.half() as u32)
    }

    /// Mask with every `+` bit set.
    pub fn plus_mask(&self) -> u64 {
        low_bits(self.len() as u32) & !self.minus_mask()
    }

    /// Applies the involution to every bit of `mask`.
    pub fn mirror_mask(&self, mask: u64) -> u64 {
        let n = self.len() as u32;
        mask.reverse_bits() >> (64 - n)
    }
}

pub(crate) fn low_bits(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
