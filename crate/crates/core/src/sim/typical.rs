use crate::infotheory::JointPmf;
use crate::{Error, Result};

/// How the typicality slack is spread over the joint cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Slack {
    /// Per-cell tolerance `epsilon / |alphabet product|`.
    Strong,
    /// Per-cell tolerance `epsilon`. Usable at block lengths where the strong
    /// rule admits no sequence at all.
    #[default]
    Absolute,
}

/// Strong typicality: every joint tuple's empirical frequency is within
/// `epsilon / |alphabet product|` of its probability, and tuples of
/// probability zero never occur. `sequences` holds one symbol sequence per
/// variable of `reference`, in its variable order.
pub fn is_jointly_typical(sequences: &[&[usize]], reference: &JointPmf, epsilon: f64) -> Result<bool> {
    if sequences.len() != reference.variables().len() {
        return Err(Error::LengthMismatch { expected: reference.variables().len(), got: sequences.len() });
    }
    let n = sequences.first().map_or(0, |s| s.len());
    for (seq, var) in sequences.iter().zip(reference.variables()) {
        if seq.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: seq.len() });
        }
        if let Some(&bad) = seq.iter().find(|&&s| s >= var.size) {
            return Err(Error::SymbolOutOfRange { name: var.name.clone(), symbol: bad, size: var.size });
        }
    }
    let checker = TypicalityChecker::new(reference, Slack::Strong, epsilon);
    let mut cells: Vec<usize> = (0..n)
        .map(|k| {
            let tuple: Vec<usize> = sequences.iter().map(|s| s[k]).collect();
            reference.flat_index(&tuple)
        })
        .collect();
    Ok(checker.check(&mut cells))
}

/// Typicality test against a fixed reference pmf, on sequences given as flat
/// cell indices. Only cells that occur, plus a count of cells that must
/// occur, are inspected, so the cost does not grow with the alphabet product.
#[derive(Debug, Clone)]
pub struct TypicalityChecker {
    probs: Vec<f64>,
    strides: Vec<usize>,
    tol: f64,
    required: usize,
}

impl TypicalityChecker {
    pub fn new(reference: &JointPmf, slack: Slack, epsilon: f64) -> Self {
        let probs = reference.probs().to_vec();
        let tol = match slack {
            Slack::Strong => epsilon / probs.len() as f64,
            Slack::Absolute => epsilon,
        };
        let shape = reference.shape();
        let mut strides = vec![1; shape.len()];
        for i in (0..shape.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * shape[i + 1];
        }
        let required = probs.iter().filter(|&&p| p > tol).count();
        TypicalityChecker { probs, strides, tol, required }
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn cell(&self, symbols: &[usize]) -> usize {
        symbols.iter().zip(&self.strides).map(|(s, k)| s * k).sum()
    }

    pub fn prob(&self, cell: usize) -> f64 {
        self.probs[cell]
    }

    /// `cells` is reordered in place.
    pub fn check(&self, cells: &mut [usize]) -> bool {
        let n = cells.len();
        if n == 0 {
            return self.required == 0;
        }
        cells.sort_unstable();
        let nf = n as f64;
        let mut present_required = 0;
        let mut i = 0;
        while i < n {
            let c = cells[i];
            let mut j = i;
            while j < n && cells[j] == c {
                j += 1;
            }
            let p = self.probs[c];
            if p == 0.0 || ((j - i) as f64 / nf - p).abs() > self.tol {
                return false;
            }
            if p > self.tol {
                present_required += 1;
            }
            i = j;
        }
        present_required == self.required
    }
}
