//! Keyed pseudorandom codebooks. Nothing is stored: a codeword letter or a
//! bin index is a hash of its index tuple and the session key, so the same
//! key always yields the same codebook.

use crate::infotheory::Kernel;
use crate::network::Thm2Chain;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const LETTER: u64 = 0xA24B_AED4_963E_E407;

pub(crate) const TAG_X1: u64 = 1;
pub(crate) const TAG_X2: u64 = 2;
pub(crate) const TAG_X3: u64 = 3;
pub(crate) const TAG_F1: u64 = 4;
pub(crate) const TAG_F2: u64 = 5;

/// splitmix64 finalizer.
pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn derive(key: u64, tag: u64) -> u64 {
    mix(key ^ mix(tag))
}

pub(crate) fn hash_seq(key: u64, seq: impl IntoIterator<Item = usize>) -> u64 {
    let mut h = mix(key);
    let mut len = 0u64;
    for s in seq {
        h = mix(h ^ (s as u64 + 1).wrapping_mul(LETTER));
        len += 1;
    }
    mix(h ^ len)
}

/// Uniform in `[0, 1)` from the top 53 bits.
pub(crate) fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..n` by multiply-high.
pub(crate) fn bucket(h: u64, n: usize) -> usize {
    ((h as u128 * n as u128) >> 64) as usize
}

/// Inverse-CDF sampling from the rows of a kernel.
#[derive(Debug, Clone)]
pub(crate) struct RowSampler {
    cols: usize,
    cdf: Vec<f64>,
}

impl RowSampler {
    pub(crate) fn new(probs: &[f64], cols: usize) -> Self {
        let mut cdf = Vec::with_capacity(probs.len());
        for row in probs.chunks(cols) {
            let mut acc = 0.0;
            let start = cdf.len();
            for &p in row {
                acc += p;
                cdf.push(acc);
            }
            // pin the top so u < 1 always lands on a positive-probability column
            if let Some(last) = row.iter().rposition(|&p| p > 0.0) {
                for v in &mut cdf[start + last..start + cols] {
                    *v = 1.0;
                }
            }
        }
        RowSampler { cols, cdf }
    }

    pub(crate) fn from_kernel(k: &Kernel<f64>) -> Self {
        Self::new(k.probs(), k.cols())
    }

    pub(crate) fn sample(&self, row: usize, u: f64) -> usize {
        let r = &self.cdf[row * self.cols..(row + 1) * self.cols];
        r.iter().position(|&c| u < c).unwrap_or(self.cols - 1)
    }
}

/// Letter samplers for the three codebooks and the bin counts.
#[derive(Debug, Clone)]
pub struct Codebooks {
    x1: RowSampler,
    x2: RowSampler,
    x3: RowSampler,
    bins: [usize; 2],
    s2_size: usize,
}

impl Codebooks {
    pub fn new(chain: &Thm2Chain<f64>, bins: [usize; 2]) -> Self {
        Codebooks {
            x1: RowSampler::from_kernel(&chain.x1),
            x2: RowSampler::from_kernel(&chain.x2),
            x3: RowSampler::from_kernel(&chain.x3),
            bins,
            s2_size: chain.x2.rows(),
        }
    }

    pub fn bins(&self) -> [usize; 2] {
        self.bins
    }

    /// The codebook drawn for one key.
    pub fn keyed(&self, key: u64) -> KeyedCodebook<'_> {
        KeyedCodebook { key, x1: &self.x1, x2: &self.x2, x3: &self.x3, bins: self.bins, s2_size: self.s2_size }
    }
}

/// Codeword generators `x1(u, s1)`, `x2(u, s2)`, `x3(s1, s2)` and bin maps
/// of one session.
#[derive(Debug, Clone, Copy)]
pub struct KeyedCodebook<'a> {
    key: u64,
    x1: &'a RowSampler,
    x2: &'a RowSampler,
    x3: &'a RowSampler,
    bins: [usize; 2],
    s2_size: usize,
}

impl KeyedCodebook<'_> {
    pub(crate) fn seq_key(&self, tag: u64, seq: &[usize]) -> u64 {
        hash_seq(derive(self.key, tag), seq.iter().copied())
    }

    pub(crate) fn pair_key(&self, s1: &[usize], s2: &[usize]) -> u64 {
        let s2n = self.s2_size;
        hash_seq(derive(self.key, TAG_X3), s1.iter().zip(s2).map(|(a, b)| a * s2n + b))
    }

    fn letter(sampler: &RowSampler, base: u64, row: usize, k: usize) -> usize {
        sampler.sample(row, unit(mix(base ^ (k as u64 + 1).wrapping_mul(LETTER))))
    }

    /// Key of codeword `x_i(u, s_i)` given the sequence key of `s_i`.
    pub(crate) fn word_key(seq_key: u64, u: usize) -> u64 {
        mix(seq_key ^ mix(u as u64 ^ 0x5555_5555))
    }

    pub(crate) fn x1_letter(&self, word: u64, s1: usize, k: usize) -> usize {
        Self::letter(self.x1, word, s1, k)
    }

    pub(crate) fn x2_letter(&self, word: u64, s2: usize, k: usize) -> usize {
        Self::letter(self.x2, word, s2, k)
    }

    pub(crate) fn x3_letter(&self, pair: u64, s1: usize, s2: usize, k: usize) -> usize {
        Self::letter(self.x3, pair, s1 * self.s2_size + s2, k)
    }

    pub fn x1_word(&self, u: usize, s1: &[usize]) -> Vec<usize> {
        let w = Self::word_key(self.seq_key(TAG_X1, s1), u);
        s1.iter().enumerate().map(|(k, &s)| self.x1_letter(w, s, k)).collect()
    }

    pub fn x2_word(&self, u: usize, s2: &[usize]) -> Vec<usize> {
        let w = Self::word_key(self.seq_key(TAG_X2, s2), u);
        s2.iter().enumerate().map(|(k, &s)| self.x2_letter(w, s, k)).collect()
    }

    pub fn x3_word(&self, s1: &[usize], s2: &[usize]) -> Vec<usize> {
        let w = self.pair_key(s1, s2);
        (0..s1.len()).map(|k| self.x3_letter(w, s1[k], s2[k], k)).collect()
    }

    pub fn bin1(&self, s1: &[usize]) -> usize {
        bucket(self.seq_key(TAG_F1, s1), self.bins[0])
    }

    pub fn bin2(&self, s2: &[usize]) -> usize {
        bucket(self.seq_key(TAG_F2, s2), self.bins[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_skips_zero_columns() {
        let s = RowSampler::new(&[0.0, 0.5, 0.5, 0.0], 4);
        assert_eq!(s.sample(0, 0.0), 1);
        assert_eq!(s.sample(0, 0.49), 1);
        assert_eq!(s.sample(0, 0.5), 2);
        assert_eq!(s.sample(0, 0.999_999_999), 2);
    }

    #[test]
    fn bucket_in_range() {
        for i in 0..1000u64 {
            assert!(bucket(mix(i), 7) < 7);
        }
        assert_eq!(bucket(u64::MAX, 1), 0);
    }

    #[test]
    fn hash_depends_on_length_and_order() {
        assert_ne!(hash_seq(1, [0, 1]), hash_seq(1, [1, 0]));
        assert_ne!(hash_seq(1, [0]), hash_seq(1, [0, 0]));
    }
}
