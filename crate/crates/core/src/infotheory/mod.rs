//! Exact discrete probability algebra over finite-alphabet variables.
//!
//! A [`JointPmf`] is a dense row-major tensor with one axis per [`Variable`]
//! (the last variable varies fastest). A [`Kernel`] is a conditional pmf,
//! stored as one row per conditioning tuple. All information measures are in
//! bits and computed exactly from the tensor, with `0 log 0 = 0`.

mod kernel;
mod measures;
mod pmf;
pub mod random;
mod tensor;

pub use kernel::Kernel;
pub use pmf::JointPmf;

/// A named finite-alphabet random variable.
///
/// An alphabet of size one encodes an absent variable: it contributes nothing
/// to any entropy or mutual information it appears in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub size: usize,
    pub labels: Option<Vec<String>>,
    /// Component variables when this variable is a product alphabet,
    /// outermost first. Empty for atomic variables.
    pub parts: Vec<(String, usize)>,
}

impl Variable {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Variable { name: name.into(), size, labels: None, parts: Vec::new() }
    }

    pub fn singleton(name: impl Into<String>) -> Self {
        Self::new(name, 1)
    }

    /// A product-alphabet variable `(first, second)` with symbol
    /// `a * second.1 + b`.
    pub fn pair(name: impl Into<String>, first: (&str, usize), second: (&str, usize)) -> Self {
        Variable {
            name: name.into(),
            size: first.1 * second.1,
            labels: None,
            parts: vec![(first.0.to_string(), first.1), (second.0.to_string(), second.1)],
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn is_singleton(&self) -> bool {
        self.size == 1
    }

    pub fn label(&self, symbol: usize) -> String {
        match &self.labels {
            Some(l) if symbol < l.len() => l[symbol].clone(),
            _ => symbol.to_string(),
        }
    }
}

pub(crate) fn check_variables<'a>(vars: impl IntoIterator<Item = &'a Variable>) -> crate::Result<()> {
    let mut seen = std::collections::HashSet::new();
    for v in vars {
        if v.size == 0 {
            return Err(crate::Error::EmptyAlphabet(v.name.clone()));
        }
        if !v.parts.is_empty() && v.parts.iter().map(|p| p.1).product::<usize>() != v.size {
            return Err(crate::Error::SizeMismatch {
                name: v.name.clone(),
                expected: v.parts.iter().map(|p| p.1).product(),
                got: v.size,
            });
        }
        if let Some(labels) = &v.labels {
            if labels.len() != v.size {
                return Err(crate::Error::SizeMismatch { name: v.name.clone(), expected: v.size, got: labels.len() });
            }
        }
        if !seen.insert(v.name.as_str()) {
            return Err(crate::Error::DuplicateVariable(v.name.clone()));
        }
    }
    Ok(())
}
