use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A map `σ: [n] → {−1, +1}` stored as a bit vector (bit set ⇔ `+1`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    n: usize,
    words: Vec<u64>,
}

impl Coloring {
    pub fn all_minus(n: usize) -> Self {
        Coloring {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn all_plus(n: usize) -> Self {
        Self::all_minus(n).complement()
    }

    /// Low `n` bits of `mask`, bit `v` giving the color of vertex `v`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        assert!(n <= 64);
        let mut c = Self::all_minus(n);
        if n > 0 {
            c.words[0] = if n == 64 {
                mask
            } else {
                mask & ((1u64 << n) - 1)
            };
        }
        c
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut c = Self::all_minus(bits.len());
        for (v, &b) in bits.iter().enumerate() {
            c.set(v, b);
        }
        c
    }

    /// The low word; only meaningful for `n ≤ 64`.
    pub fn mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `true` iff vertex `v` is colored `+1`.
    #[inline]
    pub fn is_plus(&self, v: usize) -> bool {
        debug_assert!(v < self.n);
        (self.words[v >> 6] >> (v & 63)) & 1 == 1
    }

    #[inline]
    pub fn sign(&self, v: usize) -> i8 {
        if self.is_plus(v) {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, v: usize, plus: bool) {
        assert!(v < self.n, "vertex {v} out of range for n = {}", self.n);
        let bit = 1u64 << (v & 63);
        if plus {
            self.words[v >> 6] |= bit;
        } else {
            self.words[v >> 6] &= !bit;
        }
    }

    pub fn flip(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} out of range for n = {}", self.n);
        self.words[v >> 6] ^= 1u64 << (v & 63);
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.n & 63;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// `|σ⁻¹(+1)|`.
    pub fn count_plus(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming(&self, other: &Coloring) -> usize {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Whether all vertices of `edge` share one color.
    #[inline]
    pub fn is_monochromatic(&self, edge: &[u32]) -> bool {
        let first = self.is_plus(edge[0] as usize);
        edge[1..].iter().all(|&v| self.is_plus(v as usize) == first)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.n).map(move |v| self.is_plus(v))
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '+' } else { '-' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coloring({self})")
    }
}

impl FromStr for Coloring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                '+' => Ok(true),
                '-' => Ok(false),
                other => Err(Error::parse(
                    1,
                    format!("unexpected character {other:?} at column {}", i + 1),
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(Coloring::from_bools(&bits))
    }
}
