//! Entropy and mutual information, in bits.

use super::tensor::{for_each_projected, projection};
use super::JointPmf;
use crate::{Error, Real, Result};

fn log2<T: Real>(x: T) -> T {
    x.log2()
}

impl<T: Real> JointPmf<T> {
    /// Resolves disjoint named sets to axes of the marginal over their union.
    /// Returns that marginal and, per set, a keep-mask over its axes.
    fn union_marginal(&self, sets: &[&[&str]]) -> Result<(JointPmf<T>, Vec<Vec<bool>>)> {
        let mut all: Vec<usize> = Vec::new();
        let mut per_set: Vec<Vec<usize>> = Vec::with_capacity(sets.len());
        for names in sets {
            let axes = self.axes_of(names)?;
            for &a in &axes {
                if all.contains(&a) {
                    return Err(Error::OverlappingSets(self.variables()[a].name.clone()));
                }
            }
            all.extend(&axes);
            per_set.push(axes);
        }
        all.sort_unstable();
        let m = self.project_axes(&all);
        let masks = per_set.iter().map(|axes| all.iter().map(|a| axes.contains(a)).collect()).collect();
        Ok((m, masks))
    }

    /// `H(vars)` in bits.
    pub fn entropy(&self, vars: &[&str]) -> Result<T> {
        self.conditional_entropy(vars, &[])
    }

    /// `H(targets | given)` in bits. Never negative.
    pub fn conditional_entropy(&self, targets: &[&str], given: &[&str]) -> Result<T> {
        let (m, masks) = self.union_marginal(&[targets, given])?;
        let shape = m.shape();
        let (proj_g, len_g) = projection(&shape, &masks[1]);
        let (proj_all, _) = projection(&shape, &vec![true; shape.len()]);
        let pg = super::tensor::accumulate(m.probs(), &shape, &proj_g, len_g);
        let mut h = T::zero();
        for_each_projected(&shape, [&proj_all, &proj_g], |_, [i, g]| {
            let p = m.probs()[i];
            if p > T::zero() {
                // pg >= p because pg is a sum of nonnegative terms including p
                h += p * log2(pg[g] / p);
            }
        });
        Ok(h.max(T::zero()))
    }

    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<T> {
        self.conditional_mutual_information(a, b, &[])
    }

    /// `I(a; b | c)` in bits, evaluated as the divergence
    /// `sum p(abc) log p(abc) p(c) / (p(ac) p(bc))`.
    ///
    /// Values in `[-mi_clamp, 0)` are reported as zero; anything more negative
    /// is an [`Error::Inconsistent`].
    pub fn conditional_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<T> {
        if a.is_empty() || b.is_empty() {
            // still validate names
            self.union_marginal(&[a, b, c])?;
            return Ok(T::zero());
        }
        let (m, masks) = self.union_marginal(&[a, b, c])?;
        let shape = m.shape();
        let ac: Vec<bool> = masks[0].iter().zip(&masks[2]).map(|(x, y)| *x || *y).collect();
        let bc: Vec<bool> = masks[1].iter().zip(&masks[2]).map(|(x, y)| *x || *y).collect();
        let (proj_ac, len_ac) = projection(&shape, &ac);
        let (proj_bc, len_bc) = projection(&shape, &bc);
        let (proj_c, len_c) = projection(&shape, &masks[2]);
        let (proj_all, _) = projection(&shape, &vec![true; shape.len()]);
        let probs = m.probs();
        let p_ac = super::tensor::accumulate(probs, &shape, &proj_ac, len_ac);
        let p_bc = super::tensor::accumulate(probs, &shape, &proj_bc, len_bc);
        let p_c = super::tensor::accumulate(probs, &shape, &proj_c, len_c);
        let mut info = T::zero();
        for_each_projected(&shape, [&proj_all, &proj_ac, &proj_bc, &proj_c], |_, [i, iac, ibc, ic]| {
            let p = probs[i];
            if p > T::zero() {
                debug_assert!(p_ac[iac] > T::zero() && p_bc[ibc] > T::zero());
                info += p * log2((p / p_ac[iac]) * (p_c[ic] / p_bc[ibc]));
            }
        });
        if info < T::zero() {
            if info >= -T::mi_clamp() {
                return Ok(T::zero());
            }
            return Err(Error::Inconsistent(format!("mutual information evaluated to {info}")));
        }
        Ok(info)
    }
}
