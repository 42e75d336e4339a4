//! Row-major index arithmetic shared by the pmf and kernel code.

use crate::Real;

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for ax in (0..shape.len().saturating_sub(1)).rev() {
        s[ax] = s[ax + 1] * shape[ax + 1];
    }
    s
}

/// Per-axis strides into the tensor formed by the axes where `keep` is true
/// (in their original order); dropped axes get stride 0. Also returns the
/// length of that tensor.
pub(crate) fn projection(shape: &[usize], keep: &[bool]) -> (Vec<usize>, usize) {
    let mut proj = vec![0usize; shape.len()];
    let mut len = 1usize;
    for ax in (0..shape.len()).rev() {
        if keep[ax] {
            proj[ax] = len;
            len *= shape[ax];
        }
    }
    (proj, len)
}

/// Walks every flat index of `shape` in order, passing the matching index in
/// each projected tensor.
pub(crate) fn for_each_projected<const K: usize>(
    shape: &[usize],
    proj: [&[usize]; K],
    mut f: impl FnMut(usize, [usize; K]),
) {
    let total: usize = shape.iter().product();
    let mut digits = vec![0usize; shape.len()];
    let mut tgt = [0usize; K];
    for flat in 0..total {
        f(flat, tgt);
        let mut ax = shape.len();
        while ax > 0 {
            ax -= 1;
            digits[ax] += 1;
            for k in 0..K {
                tgt[k] += proj[k][ax];
            }
            if digits[ax] < shape[ax] {
                break;
            }
            for k in 0..K {
                tgt[k] -= proj[k][ax] * shape[ax];
            }
            digits[ax] = 0;
        }
    }
}

pub(crate) fn accumulate<T: Real>(probs: &[T], shape: &[usize], proj: &[usize], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for_each_projected(shape, [proj], |flat, [t]| out[t] += probs[flat]);
    out
}

pub(crate) fn unflatten(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut digits = vec![0usize; shape.len()];
    for ax in (0..shape.len()).rev() {
        digits[ax] = flat % shape[ax];
        flat /= shape[ax];
    }
    digits
}

pub(crate) fn flatten(shape: &[usize], digits: &[usize]) -> usize {
    digits.iter().zip(shape).fold(0, |acc, (&d, &s)| acc * s + d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_walk_matches_unflatten() {
        let shape = [2, 3, 2];
        let (proj, len) = projection(&shape, &[true, false, true]);
        assert_eq!(len, 4);
        for_each_projected(&shape, [&proj], |flat, [t]| {
            let d = unflatten(&shape, flat);
            assert_eq!(t, d[0] * 2 + d[2]);
        });
    }

    #[test]
    fn flatten_roundtrip() {
        let shape = [3, 1, 4];
        for i in 0..12 {
            assert_eq!(flatten(&shape, &unflatten(&shape, i)), i);
        }
    }
}
