//! Fixed-size bit vector used by the integer fast paths.
//!
//! Bit `i` stands for the integer value `offset + i`. The two operations that
//! matter for sumset work are `or_shifted` (union with a translate) and the
//! doubling union over an arithmetic progression of shifts, which turns the
//! `|A|`-pass shift-or loop into a logarithmic number of passes when the
//! shift set is a progression.

#[derive(Clone)]
pub(crate) struct BitSet {
    words: Vec<u64>,
    nbits: usize,
}

impl BitSet {
    pub fn new(nbits: usize) -> Self {
        BitSet {
            words: vec![0u64; nbits.div_ceil(64)],
            nbits,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nbits
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    #[cfg(test)]
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some((wi << 6) | b)
                }
            })
        })
    }

    /// `self |= other << shift` (in bit positions, towards higher indices).
    /// Bits that would land beyond `self.nbits` are dropped; callers size the
    /// destination so this does not happen for in-range data.
    pub fn or_shifted(&mut self, other: &BitSet, shift: usize) {
        let word_shift = shift >> 6;
        let bit_shift = shift & 63;
        let n_dst = self.words.len();
        if bit_shift == 0 {
            for i in 0..other.words.len() {
                let dst = i + word_shift;
                if dst >= n_dst {
                    break;
                }
                self.words[dst] |= other.words[i];
            }
        } else {
            for i in 0..other.words.len() {
                let w = other.words[i];
                if w == 0 {
                    continue;
                }
                let lo = i + word_shift;
                if lo >= n_dst {
                    break;
                }
                self.words[lo] |= w << bit_shift;
                if lo + 1 < n_dst {
                    self.words[lo + 1] |= w >> (64 - bit_shift);
                }
            }
        }
        self.mask_tail();
    }

    fn mask_tail(&mut self) {
        let rem = self.nbits & 63;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Union of `count` translates of `base` at shifts `0, step, 2*step, ...`,
/// i.e. the indicator of `base + step*{0, ..., count-1}` in bit positions.
///
/// Square-and-multiply over the prefix unions: with P_k the union of the
/// first k translates, P_2k = P_k | (P_k << k*step) and
/// P_(k+1) = P_k | (base << k*step). O(log count) full passes.
pub(crate) fn union_of_ap_shifts(base: &BitSet, step: usize, count: usize) -> BitSet {
    assert!(count >= 1);
    let final_bits = base.len() + step * (count - 1);
    let mut acc = BitSet::new(final_bits);
    acc.or_shifted(base, 0);
    let mut covered = 1usize;
    let bits = usize::BITS - count.leading_zeros();
    for b in (0..bits - 1).rev() {
        let snapshot = acc.clone();
        acc.or_shifted(&snapshot, covered * step);
        covered *= 2;
        if count >> b & 1 == 1 {
            acc.or_shifted(base, covered * step);
            covered += 1;
        }
    }
    debug_assert_eq!(covered, count);
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_union(base: &BitSet, step: usize, count: usize) -> Vec<usize> {
        let mut out = std::collections::BTreeSet::new();
        for j in 0..count {
            for i in base.iter_ones() {
                out.insert(i + j * step);
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn shift_or_matches_naive() {
        let mut base = BitSet::new(130);
        for i in [0, 1, 63, 64, 65, 100, 129] {
            base.set(i);
        }
        for shift in [0, 1, 7, 63, 64, 65, 128] {
            let mut dst = BitSet::new(130 + shift);
            dst.or_shifted(&base, shift);
            let got: Vec<usize> = dst.iter_ones().collect();
            let want: Vec<usize> = base.iter_ones().map(|i| i + shift).collect();
            assert_eq!(got, want, "shift {shift}");
        }
    }

    #[test]
    fn ap_union_matches_naive() {
        let mut base = BitSet::new(200);
        for i in [0, 3, 64, 77, 130, 199] {
            base.set(i);
        }
        for step in [1, 5, 64, 67] {
            for count in [1, 2, 3, 7, 8, 13, 16, 31, 100] {
                let fast = union_of_ap_shifts(&base, step, count);
                let got: Vec<usize> = fast.iter_ones().collect();
                assert_eq!(got, naive_union(&base, step, count), "step {step} count {count}");
            }
        }
    }
}
