//! Random pmfs and kernels, used by property tests and optimizer restarts.

use rand::Rng;

use super::{JointPmf, Kernel, Variable};
use crate::{simplex, Real};

/// Flat Dirichlet(1) draw over the full product alphabet.
pub fn random_pmf<T: Real, R: Rng + ?Sized>(vars: Vec<Variable>, rng: &mut R) -> JointPmf<T> {
    let n: usize = vars.iter().map(|v| v.size).product();
    let probs = simplex::dirichlet_ones(n, rng).into_iter().map(T::lit).collect();
    JointPmf::new(vars, probs).expect("dirichlet draw is a valid pmf")
}

/// Like [`random_pmf`] but each entry is zeroed with probability
/// `zero_fraction` (at least one entry always survives).
pub fn random_sparse_pmf<T: Real, R: Rng + ?Sized>(
    vars: Vec<Variable>,
    zero_fraction: f64,
    rng: &mut R,
) -> JointPmf<T> {
    let n: usize = vars.iter().map(|v| v.size).product();
    let mut w = simplex::dirichlet_ones(n, rng);
    let keep = rng.gen_range(0..n);
    for (i, x) in w.iter_mut().enumerate() {
        if i != keep && rng.gen_bool(zero_fraction) {
            *x = 0.0;
        }
    }
    let s: f64 = w.iter().sum();
    let probs = w.into_iter().map(|x| T::lit(x / s)).collect();
    JointPmf::new(vars, probs).expect("renormalized draw is a valid pmf")
}

/// Independent Dirichlet(1) rows.
pub fn random_kernel<T: Real, R: Rng + ?Sized>(given: Vec<Variable>, output: Vec<Variable>, rng: &mut R) -> Kernel<T> {
    let rows: usize = given.iter().map(|v| v.size).product();
    let cols: usize = output.iter().map(|v| v.size).product();
    let probs = (0..rows).flat_map(|_| simplex::dirichlet_ones(cols, rng)).map(T::lit).collect();
    Kernel::new(given, output, probs).expect("dirichlet rows are valid")
}
