use std::fmt;

/// A subset of an enumerated state space, stored as a bitmask.
///
/// Bit `i` stands for the `i`-th state in enumeration order. Bits at or
/// beyond `len` are always clear.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    len: usize,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(len: usize) -> StateSet {
        StateSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> StateSet {
        let mut s = StateSet {
            len,
            words: vec![u64::MAX; len.div_ceil(64)],
        };
        s.trim();
        s
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> StateSet {
        let mut s = StateSet::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Low `len` bits of `mask`; only meaningful for `len <= 64`.
    pub fn from_u64(len: usize, mask: u64) -> StateSet {
        assert!(len <= 64);
        let mut s = StateSet::empty(len);
        if len > 0 {
            s.words[0] = mask;
        }
        s.trim();
        s
    }

    /// Membership as a `u64`; only meaningful for `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "state index {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |i| self.contains(*i))
    }

    fn zip(&self, other: &StateSet, op: impl Fn(u64, u64) -> u64) -> StateSet {
        assert_eq!(self.len, other.len, "state sets over different spaces");
        let mut s = StateSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> StateSet {
        let mut s = StateSet {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        assert_eq!(self.len, other.len, "state sets over different spaces");
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Little-endian hex dump: byte `k` holds states `8k..8k+8`, least
    /// significant bit first, and bytes are written in increasing order.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8).max(1);
        let mut out = String::with_capacity(nbytes * 2);
        for k in 0..nbytes {
            let byte = (self.words.get(k / 8).copied().unwrap_or(0) >> (8 * (k % 8))) & 0xff;
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    pub fn from_hex(len: usize, hex: &str) -> Option<StateSet> {
        let hex = hex.trim();
        if !hex.len().is_multiple_of(2) || hex.len() / 2 != len.div_ceil(8).max(1) {
            return None;
        }
        let mut s = StateSet::empty(len);
        for k in 0..hex.len() / 2 {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16).ok()?;
            for j in 0..8 {
                if byte >> j & 1 == 1 {
                    let i = 8 * k + j;
                    if i >= len {
                        return None;
                    }
                    s.insert(i);
                }
            }
        }
        Some(s)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSet[{}]{{", self.len)?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra() {
        let a = StateSet::from_indices(10, [0, 3, 9]);
        let b = StateSet::from_indices(10, [3, 4]);
        assert_eq!(a.union(&b), StateSet::from_indices(10, [0, 3, 4, 9]));
        assert_eq!(a.intersection(&b), StateSet::from_indices(10, [3]));
        assert_eq!(a.complement().count(), 7);
        assert!(StateSet::empty(10).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert!(StateSet::full(10).is_full());
    }

    #[test]
    fn hex_is_little_endian() {
        let s = StateSet::from_indices(12, [0, 9]);
        assert_eq!(s.to_hex(), "0102");
        assert_eq!(StateSet::from_hex(12, "0102"), Some(s));
        assert_eq!(StateSet::full(3).to_hex(), "07");
        assert_eq!(StateSet::from_hex(3, "08"), None);
    }

    #[test]
    fn wide_sets() {
        let s = StateSet::full(130);
        assert_eq!(s.count(), 130);
        assert_eq!(s.complement(), StateSet::empty(130));
        assert_eq!(s.to_hex().len(), 2 * 17);
    }
}
