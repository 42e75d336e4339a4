use super::pmf::validate_simplex;
use super::tensor::{flatten, unflatten};
use super::{check_variables, JointPmf, Variable};
use crate::{Error, Real, Result};

/// Conditional pmf `p(output | given)`, one row per conditioning tuple.
///
/// Rows are indexed row-major over `given` and each row is a pmf over the
/// row-major product of `output`. With no conditioning variables there is a
/// single row, i.e. a plain pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel<T: Real = f64> {
    given: Vec<Variable>,
    output: Vec<Variable>,
    probs: Vec<T>,
}

impl<T: Real> Kernel<T> {
    pub fn new(given: Vec<Variable>, output: Vec<Variable>, probs: Vec<T>) -> Result<Self> {
        check_variables(given.iter().chain(&output))?;
        let rows: usize = given.iter().map(|v| v.size).product();
        let cols: usize = output.iter().map(|v| v.size).product();
        if probs.len() != rows * cols {
            return Err(Error::ShapeMismatch { expected: rows * cols, got: probs.len() });
        }
        let mut checked = Vec::with_capacity(probs.len());
        for r in 0..rows {
            let row = probs[r * cols..(r + 1) * cols].to_vec();
            checked.extend(validate_simplex(row, r * cols)?);
        }
        Ok(Kernel { given, output, probs: checked })
    }

    pub fn from_rows(given: Vec<Variable>, output: Vec<Variable>, rows: Vec<Vec<T>>) -> Result<Self> {
        let cols: usize = output.iter().map(|v| v.size).product();
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch { expected: cols, got: bad.len() });
        }
        Self::new(given, output, rows.into_iter().flatten().collect())
    }

    /// Point-mass rows: `map` receives the conditioning symbols and returns
    /// one output symbol per output variable.
    pub fn deterministic(
        given: Vec<Variable>,
        output: Vec<Variable>,
        map: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        check_variables(given.iter().chain(&output))?;
        let gshape: Vec<usize> = given.iter().map(|v| v.size).collect();
        let oshape: Vec<usize> = output.iter().map(|v| v.size).collect();
        let rows: usize = gshape.iter().product();
        let cols: usize = oshape.iter().product();
        let mut probs = vec![T::zero(); rows * cols];
        for r in 0..rows {
            let g = unflatten(&gshape, r);
            let out = map(&g);
            if out.len() != output.len() {
                return Err(Error::LengthMismatch { expected: output.len(), got: out.len() });
            }
            for (v, &s) in output.iter().zip(&out) {
                if s >= v.size {
                    return Err(Error::SymbolOutOfRange { name: v.name.clone(), symbol: s, size: v.size });
                }
            }
            probs[r * cols + flatten(&oshape, &out)] = T::one();
        }
        Ok(Kernel { given, output, probs })
    }

    /// Same row for every conditioning tuple (the output ignores `given`).
    pub fn constant_rows(given: Vec<Variable>, output: Vec<Variable>, row: Vec<T>) -> Result<Self> {
        let rows: usize = given.iter().map(|v| v.size).product();
        Self::from_rows(given, output, vec![row; rows])
    }

    /// A pmf viewed as a kernel without conditioning variables.
    pub fn from_pmf(pmf: &JointPmf<T>) -> Self {
        Kernel { given: Vec::new(), output: pmf.variables().to_vec(), probs: pmf.probs().to_vec() }
    }

    pub fn given(&self) -> &[Variable] {
        &self.given
    }

    pub fn output(&self) -> &[Variable] {
        &self.output
    }

    pub fn given_shape(&self) -> Vec<usize> {
        self.given.iter().map(|v| v.size).collect()
    }

    pub fn output_shape(&self) -> Vec<usize> {
        self.output.iter().map(|v| v.size).collect()
    }

    pub fn rows(&self) -> usize {
        self.given.iter().map(|v| v.size).product()
    }

    pub fn cols(&self) -> usize {
        self.output.iter().map(|v| v.size).product()
    }

    pub fn row(&self, r: usize) -> &[T] {
        let c = self.cols();
        &self.probs[r * c..(r + 1) * c]
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Row for the conditioning tuple `given` (one symbol per given variable).
    pub fn row_for(&self, given: &[usize]) -> &[T] {
        self.row(flatten(&self.given_shape(), given))
    }

    pub fn is_deterministic(&self) -> bool {
        self.probs.iter().all(|&p| p == T::zero() || p == T::one())
    }

    /// Keeps only the rows with `name = symbol`; `name` stays as a singleton
    /// conditioning variable.
    pub fn restrict_given(&self, name: &str, symbol: usize) -> Result<Self> {
        let ax =
            self.given.iter().position(|v| v.name == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        if symbol >= self.given[ax].size {
            return Err(Error::SymbolOutOfRange { name: name.to_string(), symbol, size: self.given[ax].size });
        }
        let gshape = self.given_shape();
        let mut given = self.given.clone();
        given[ax] = Variable::singleton(name);
        let mut probs = Vec::new();
        for r in 0..self.rows() {
            if unflatten(&gshape, r)[ax] == symbol {
                probs.extend_from_slice(self.row(r));
            }
        }
        Ok(Kernel { given, output: self.output.clone(), probs })
    }

    /// Largest absolute entrywise difference between two kernels of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::ShapeMismatch { expected: self.probs.len(), got: other.probs.len() });
        }
        Ok(self.probs.iter().zip(&other.probs).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_must_normalize() {
        let r = Kernel::<f64>::from_rows(
            vec![Variable::new("S", 2)],
            vec![Variable::new("X", 2)],
            vec![vec![0.5, 0.5], vec![0.7, 0.2]],
        );
        assert!(matches!(r, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn deterministic_out_of_range() {
        let r =
            Kernel::<f64>::deterministic(vec![Variable::new("S", 2)], vec![Variable::new("X", 2)], |g| vec![g[0] + 1]);
        assert!(matches!(r, Err(Error::SymbolOutOfRange { .. })));
    }

    #[test]
    fn restrict_keeps_matching_rows() {
        let k = Kernel::<f64>::deterministic(
            vec![Variable::new("A", 2), Variable::new("B", 2)],
            vec![Variable::new("Y", 4)],
            |g| vec![g[0] * 2 + g[1]],
        )
        .unwrap();
        let r = k.restrict_given("B", 1).unwrap();
        assert_eq!(r.rows(), 2);
        assert_eq!(r.row(0), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(r.row(1), &[0.0, 0.0, 0.0, 1.0]);
        assert!(r.is_deterministic());
    }
}
