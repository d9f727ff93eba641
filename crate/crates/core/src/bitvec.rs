//! Bit sequences and a plain rank/select bitvector.
//!
//! Bits are packed into 64-bit words least-significant bit first: position
//! `i` lives in word `i / 64` at bit `i % 64`. The same layout is used by the
//! on-disk index format.
//!
//! [`RankSelect`] is the contract the index structures are written against.
//! [`BitVector`] is the plain backend: the raw words plus a rank directory of
//! 512-bit superblocks holding absolute counts and 64-bit blocks holding
//! 9-bit relative counts packed into one word per superblock, and a sparse
//! table of select samples.

/// Read-only access to a window of bits.
pub trait BitRead {
    /// Number of readable bits.
    fn bit_len(&self) -> usize;

    /// Returns `len <= 64` bits starting at `off`, position `off` in bit 0.
    /// Bits past the end read as zero.
    fn read_bits(&self, off: usize, len: usize) -> u64;
}

impl BitRead for [u64] {
    fn bit_len(&self) -> usize {
        self.len() * 64
    }

    #[inline]
    fn read_bits(&self, off: usize, len: usize) -> u64 {
        debug_assert!(len <= 64);
        if len == 0 {
            return 0;
        }
        let w = off / 64;
        let b = off % 64;
        let lo = self.get(w).copied().unwrap_or(0) >> b;
        let v = if b == 0 {
            lo
        } else {
            lo | self.get(w + 1).copied().unwrap_or(0) << (64 - b)
        };
        v & low_mask(len)
    }
}

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Growable packed bit sequence used to assemble bitvectors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitBuf {
    words: Vec<u64>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    /// Wraps raw words; bits at or beyond `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Option<Self> {
        if words.len() != len.div_ceil(64) {
            return None;
        }
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= low_mask(len % 64);
            }
        }
        Some(Self { words, len })
    }

    /// Parses a string of `0`/`1` characters; anything else is skipped, so
    /// displays with spaces or dashes can be pasted verbatim once the dashes
    /// are meaningful as separators only.
    pub fn from_bit_str(s: &str) -> Self {
        let mut buf = Self::new();
        for c in s.chars() {
            match c {
                '0' => buf.push(false),
                '1' => buf.push(true),
                _ => {}
            }
        }
        buf
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }
}

impl FromIterator<bool> for BitBuf {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut buf = Self::new();
        for b in iter {
            buf.push(b);
        }
        buf
    }
}

impl BitRead for BitBuf {
    fn bit_len(&self) -> usize {
        self.len
    }

    fn read_bits(&self, off: usize, len: usize) -> u64 {
        self.words.read_bits(off, len)
    }
}

/// Static bitvector with access, rank and select.
///
/// A compressed backend only has to implement this trait (plus
/// [`BitRead`] for path comparisons) to be usable under
/// [`HPIndex`](crate::HPIndex).
pub trait RankSelect: BitRead + Sized {
    fn build(bits: BitBuf) -> Self;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, i: usize) -> bool;

    /// Number of ones in positions `[0, i)`, `i <= len`.
    fn rank1(&self, i: usize) -> usize;

    /// Position of the `j`-th one, 1-based. `None` when `j` is 0 or exceeds
    /// the number of ones.
    fn select1(&self, j: usize) -> Option<usize>;

    fn count_ones(&self) -> usize;

    /// Size in bits of everything beyond the raw payload.
    fn aux_bits(&self) -> usize;

    /// The raw payload, for serialization.
    fn to_bit_buf(&self) -> BitBuf;
}

const WORDS_PER_SUPER: usize = 8;
const SELECT_SAMPLE: usize = 1024;

/// Plain (uncompressed) backend.
#[derive(Debug, Clone)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
    ones: usize,
    // Two words per superblock: absolute count, then packed 9-bit relative
    // counts for words 1..8 of the superblock.
    counts: Vec<u64>,
    // Superblock holding the (k * SELECT_SAMPLE)-th one (0-based).
    samples: Vec<u32>,
}

impl BitVector {
    pub fn from_bit_str(s: &str) -> Self {
        Self::build(BitBuf::from_bit_str(s))
    }

    #[inline]
    fn relative(&self, sb: usize, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            (self.counts[2 * sb + 1] >> (9 * (k - 1)) & 0x1ff) as usize
        }
    }

    fn superblocks(&self) -> usize {
        self.counts.len() / 2
    }
}

impl RankSelect for BitVector {
    fn build(bits: BitBuf) -> Self {
        let BitBuf { words, len } = bits;
        let n_super = words.len().div_ceil(WORDS_PER_SUPER);
        let mut counts = Vec::with_capacity(2 * n_super);
        let mut samples = Vec::new();
        let mut total = 0usize;
        for (sb, chunk) in words.chunks(WORDS_PER_SUPER).enumerate() {
            let mut packed = 0u64;
            let mut within = 0usize;
            for (k, w) in chunk.iter().enumerate() {
                if k > 0 {
                    packed |= (within as u64) << (9 * (k - 1));
                }
                within += w.count_ones() as usize;
            }
            // Samples for every multiple of SELECT_SAMPLE that falls here.
            while samples.len() * SELECT_SAMPLE < total + within {
                samples.push(sb as u32);
            }
            counts.push(total as u64);
            counts.push(packed);
            total += within;
        }
        Self {
            words,
            len,
            ones: total,
            counts,
            samples,
        }
    }

    fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn rank1(&self, i: usize) -> usize {
        assert!(
            i <= self.len,
            "rank position {i} out of range (len {})",
            self.len
        );
        if i == self.len {
            return self.ones;
        }
        let w = i / 64;
        let sb = w / WORDS_PER_SUPER;
        let base = self.counts[2 * sb] as usize + self.relative(sb, w % WORDS_PER_SUPER);
        base + (self.words[w] & low_mask(i % 64)).count_ones() as usize
    }

    fn select1(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.ones {
            return None;
        }
        let target = j - 1;
        let s = target / SELECT_SAMPLE;
        let lo = self.samples[s] as usize;
        let hi = self
            .samples
            .get(s + 1)
            .map_or(self.superblocks() - 1, |&h| h as usize);
        // Last superblock in [lo, hi] whose absolute count is <= target.
        let sb = lo
            + self.counts[2 * lo..2 * hi + 2]
                .chunks(2)
                .skip(1)
                .take_while(|c| c[0] as usize <= target)
                .count();
        let mut rem = target - self.counts[2 * sb] as usize;
        let first_word = sb * WORDS_PER_SUPER;
        let n_words = (self.words.len() - first_word).min(WORDS_PER_SUPER);
        let k = (1..n_words)
            .take_while(|&k| self.relative(sb, k) <= rem)
            .last()
            .unwrap_or(0);
        rem -= self.relative(sb, k);
        let mut w = self.words[first_word + k];
        for _ in 0..rem {
            w &= w - 1;
        }
        Some((first_word + k) * 64 + w.trailing_zeros() as usize)
    }

    fn count_ones(&self) -> usize {
        self.ones
    }

    fn aux_bits(&self) -> usize {
        self.counts.len() * 64 + self.samples.len() * 32
    }

    fn to_bit_buf(&self) -> BitBuf {
        BitBuf {
            words: self.words.clone(),
            len: self.len,
        }
    }
}

impl BitRead for BitVector {
    fn bit_len(&self) -> usize {
        self.len
    }

    #[inline]
    fn read_bits(&self, off: usize, len: usize) -> u64 {
        self.words.read_bits(off, len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_rank(bits: &[bool], i: usize) -> usize {
        bits[..i].iter().filter(|&&b| b).count()
    }

    fn linear_select(bits: &[bool], j: usize) -> Option<usize> {
        bits.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .nth(j.checked_sub(1)?)
            .map(|(i, _)| i)
    }

    #[test]
    fn empty() {
        let bv = BitVector::build(BitBuf::new());
        assert_eq!(bv.len(), 0);
        assert_eq!(bv.rank1(0), 0);
        assert_eq!(bv.select1(1), None);
    }

    #[test]
    fn small_rank() {
        let bv = BitVector::from_bit_str("101101");
        assert_eq!(bv.rank1(6), 4);
        assert_eq!(bv.rank1(0), 0);
        assert_eq!(bv.rank1(3), 2);
    }

    #[test]
    fn third_one_of_depth_four_vector() {
        let l4 = BitVector::from_bit_str("101101");
        assert_eq!(l4.select1(3), Some(3));
    }

    #[test]
    fn all_ones_identity() {
        let bv: BitVector = RankSelect::build((0..1000).map(|_| true).collect());
        for k in 1..=1000 {
            assert_eq!(bv.select1(k), Some(k - 1));
        }
        assert_eq!(bv.select1(1001), None);
    }

    #[test]
    fn random_against_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &density in &[0.001, 0.05, 0.5, 0.97] {
            let bits: Vec<bool> = (0..100_000).map(|_| rng.random_bool(density)).collect();
            let bv = BitVector::build(bits.iter().copied().collect());
            let ones = bits.iter().filter(|&&b| b).count();
            assert_eq!(bv.count_ones(), ones);
            assert_eq!(bv.rank1(bits.len()), ones);
            let mut r = 0;
            for (i, &b) in bits.iter().enumerate() {
                assert_eq!(bv.rank1(i), r);
                assert_eq!(bv.get(i), b);
                if b {
                    r += 1;
                    assert_eq!(bv.select1(r), Some(i));
                }
            }
            assert_eq!(bv.select1(ones + 1), None);
            // Spot-check the oracles themselves on a prefix.
            assert_eq!(linear_rank(&bits, 777), bv.rank1(777));
            assert_eq!(linear_select(&bits, 1), bv.select1(1));
        }
    }

    #[test]
    fn directory_overhead() {
        for len in [1 << 10, 3000, 1 << 16, 100_003] {
            let bv: BitVector = RankSelect::build((0..len).map(|_| true).collect());
            assert!(
                bv.aux_bits() * 2 <= len,
                "len {len}: aux {} bits",
                bv.aux_bits()
            );
        }
    }

    #[test]
    fn read_bits_straddles_words() {
        let buf: BitBuf = (0..130).map(|i| i % 3 == 0).collect();
        for off in [0, 1, 60, 63, 64, 100] {
            for len in [0, 1, 5, 40, 64] {
                let got = buf.read_bits(off, len);
                for k in 0..len {
                    let expect = off + k < 130 && (off + k) % 3 == 0;
                    assert_eq!(got >> k & 1 == 1, expect, "off {off} len {len} k {k}");
                }
            }
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn select_inverts_rank(bits in proptest::collection::vec(any::<bool>(), 0..3000)) {
                let bv = BitVector::build(bits.iter().copied().collect());
                let mut prev = 0;
                for i in 0..=bits.len() {
                    let r = bv.rank1(i);
                    prop_assert!(r >= prev);
                    prev = r;
                    if i < bits.len() && bits[i] {
                        prop_assert_eq!(bv.select1(r + 1), Some(i));
                    }
                }
                for j in 1..=bv.count_ones() {
                    prop_assert_eq!(bv.rank1(bv.select1(j).unwrap()), j - 1);
                }
            }
        }
    }
}
