use super::tensor::{accumulate, flatten, for_each_projected, projection, strides, unflatten};
use super::{check_variables, Kernel, Variable};
use crate::{Error, Real, Result};

/// Dense joint probability tensor over named finite-alphabet variables.
///
/// Entries are nonnegative and sum to one within [`Real::norm_tol`]. The
/// value is immutable once built; every operation returns a new pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf<T: Real = f64> {
    vars: Vec<Variable>,
    probs: Vec<T>,
}

/// Checks entries and normalizes. Returns the (possibly renormalized) vector.
pub(crate) fn validate_simplex<T: Real>(mut probs: Vec<T>, offset: usize) -> Result<Vec<T>> {
    let mut sum = T::zero();
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFinite(offset + i));
        }
        if p < T::zero() {
            return Err(Error::NegativeProbability { index: offset + i, value: p.as_f64() });
        }
        sum += p;
    }
    let drift = (sum - T::one()).abs();
    if drift <= T::norm_tol() {
        Ok(probs)
    } else if drift <= T::renorm_tol() {
        probs.iter_mut().for_each(|p| *p /= sum);
        Ok(probs)
    } else {
        Err(Error::NotNormalized { sum: sum.as_f64() })
    }
}

impl<T: Real> JointPmf<T> {
    pub fn new(vars: Vec<Variable>, probs: Vec<T>) -> Result<Self> {
        check_variables(&vars)?;
        let expected: usize = vars.iter().map(|v| v.size).product();
        if probs.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: probs.len() });
        }
        let probs = validate_simplex(probs, 0)?;
        Ok(JointPmf { vars, probs })
    }

    /// Builds from a flat list of `(symbol tuple, probability)` pairs; tuples
    /// not listed get probability zero. Repeated tuples accumulate.
    pub fn from_entries(vars: Vec<Variable>, entries: &[(Vec<usize>, T)]) -> Result<Self> {
        check_variables(&vars)?;
        let shape: Vec<usize> = vars.iter().map(|v| v.size).collect();
        let mut probs = vec![T::zero(); shape.iter().product()];
        for (at, p) in entries {
            if at.len() != vars.len() {
                return Err(Error::LengthMismatch { expected: vars.len(), got: at.len() });
            }
            for (v, &s) in vars.iter().zip(at) {
                if s >= v.size {
                    return Err(Error::SymbolOutOfRange { name: v.name.clone(), symbol: s, size: v.size });
                }
            }
            probs[flatten(&shape, at)] += *p;
        }
        Self::new(vars, probs)
    }

    pub fn uniform(vars: Vec<Variable>) -> Result<Self> {
        let n: usize = vars.iter().map(|v| v.size).product();
        let p = T::one() / T::lit(n.max(1) as f64);
        Self::new(vars, vec![p; n])
    }

    pub fn point_mass(vars: Vec<Variable>, at: &[usize]) -> Result<Self> {
        Self::from_entries(vars, &[(at.to_vec(), T::one())])
    }

    /// Internal constructor for tensors that are normalized by construction.
    pub(crate) fn from_parts(vars: Vec<Variable>, probs: Vec<T>) -> Self {
        debug_assert_eq!(probs.len(), vars.iter().map(|v| v.size).product::<usize>());
        JointPmf { vars, probs }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn shape(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.size).collect()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn has(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v.name == name)
    }

    pub fn axis(&self, name: &str) -> Result<usize> {
        self.vars.iter().position(|v| v.name == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        Ok(&self.vars[self.axis(name)?])
    }

    pub fn size_of(&self, name: &str) -> Result<usize> {
        Ok(self.variable(name)?.size)
    }

    pub fn flat_index(&self, symbols: &[usize]) -> usize {
        flatten(&self.shape(), symbols)
    }

    pub fn symbols_at(&self, flat: usize) -> Vec<usize> {
        unflatten(&self.shape(), flat)
    }

    pub fn prob(&self, symbols: &[usize]) -> T {
        self.probs[self.flat_index(symbols)]
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    /// Axes named in `names`, sorted by position. Unknown names and repeats
    /// are errors.
    pub(crate) fn axes_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut axes = Vec::with_capacity(names.len());
        for n in names {
            let ax = self.axis(n)?;
            if axes.contains(&ax) {
                return Err(Error::OverlappingSets(n.to_string()));
            }
            axes.push(ax);
        }
        axes.sort_unstable();
        Ok(axes)
    }

    pub(crate) fn project_axes(&self, axes: &[usize]) -> Self {
        let shape = self.shape();
        let mut keep = vec![false; shape.len()];
        axes.iter().for_each(|&a| keep[a] = true);
        let (proj, len) = projection(&shape, &keep);
        let probs = accumulate(&self.probs, &shape, &proj, len);
        let vars = axes.iter().map(|&a| self.vars[a].clone()).collect();
        JointPmf::from_parts(vars, probs)
    }

    /// Sums out every variable not in `keep`. Kept variables stay in their
    /// original order regardless of the order of `keep`.
    pub fn marginalize(&self, keep: &[&str]) -> Result<Self> {
        let axes = self.axes_of(keep)?;
        Ok(self.project_axes(&axes))
    }

    /// Appends the kernel's output variables, weighting each base entry by the
    /// kernel row selected by its conditioning variables.
    pub fn compose(&self, kernel: &Kernel<T>) -> Result<Self> {
        let shape = self.shape();
        let mut proj = vec![0usize; shape.len()];
        let given_strides = strides(&kernel.given_shape());
        for (gv, &gs) in kernel.given().iter().zip(&given_strides) {
            let ax = self.axis(&gv.name)?;
            if self.vars[ax].size != gv.size {
                return Err(Error::SizeMismatch { name: gv.name.clone(), expected: self.vars[ax].size, got: gv.size });
            }
            proj[ax] = gs;
        }
        for ov in kernel.output() {
            if self.has(&ov.name) {
                return Err(Error::VariableCollision(ov.name.clone()));
            }
        }
        let cols = kernel.cols();
        let mut probs = vec![T::zero(); self.probs.len() * cols];
        for_each_projected(&shape, [&proj], |flat, [g]| {
            let p = self.probs[flat];
            if p > T::zero() {
                let row = kernel.row(g);
                let out = &mut probs[flat * cols..(flat + 1) * cols];
                for (o, &k) in out.iter_mut().zip(row) {
                    *o = p * k;
                }
            }
        });
        let mut vars = self.vars.clone();
        vars.extend(kernel.output().iter().cloned());
        Ok(JointPmf::from_parts(vars, probs))
    }

    /// Restricts to the event `name = symbol` for every assignment and
    /// renormalizes over the remaining variables.
    pub fn condition_on_event(&self, assignments: &[(&str, usize)]) -> Result<Self> {
        let shape = self.shape();
        let mut in_event = vec![false; shape.len()];
        let mut target = vec![0usize; shape.len()];
        for &(name, sym) in assignments {
            let ax = self.axis(name)?;
            if in_event[ax] {
                return Err(Error::OverlappingSets(name.to_string()));
            }
            if sym >= shape[ax] {
                return Err(Error::SymbolOutOfRange { name: name.to_string(), symbol: sym, size: shape[ax] });
            }
            in_event[ax] = true;
            target[ax] = sym;
        }
        let keep: Vec<bool> = in_event.iter().map(|e| !e).collect();
        let (proj_keep, len) = projection(&shape, &keep);
        let (proj_event, _) = projection(&shape, &in_event);
        let event_index = target.iter().zip(&proj_event).map(|(t, s)| t * s).sum::<usize>();
        let mut probs = vec![T::zero(); len];
        for_each_projected(&shape, [&proj_keep, &proj_event], |flat, [k, e]| {
            if e == event_index {
                probs[k] += self.probs[flat];
            }
        });
        let mass: T = probs.iter().copied().sum();
        if mass <= T::zero() {
            return Err(Error::ZeroProbabilityEvent);
        }
        probs.iter_mut().for_each(|p| *p /= mass);
        let vars = self.vars.iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| v.clone()).collect();
        Ok(JointPmf::from_parts(vars, probs))
    }

    /// Reorders the axes to `order`, which must name every variable once.
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.vars.len() {
            return Err(Error::ShapeMismatch { expected: self.vars.len(), got: order.len() });
        }
        let mut new_pos = vec![usize::MAX; self.vars.len()];
        for (i, name) in order.iter().enumerate() {
            let ax = self.axis(name)?;
            if new_pos[ax] != usize::MAX {
                return Err(Error::OverlappingSets(name.to_string()));
            }
            new_pos[ax] = i;
        }
        let vars: Vec<Variable> = order.iter().map(|n| self.vars[self.axis(n).unwrap()].clone()).collect();
        let new_shape: Vec<usize> = vars.iter().map(|v| v.size).collect();
        let new_strides = strides(&new_shape);
        let proj: Vec<usize> = new_pos.iter().map(|&p| new_strides[p]).collect();
        let mut probs = vec![T::zero(); self.probs.len()];
        for_each_projected(&self.shape(), [&proj], |flat, [t]| probs[t] = self.probs[flat]);
        Ok(JointPmf::from_parts(vars, probs))
    }

    /// Inserts an absent (singleton) variable at `position`.
    pub fn insert_singleton(&self, name: &str, position: usize) -> Result<Self> {
        if self.has(name) {
            return Err(Error::VariableCollision(name.to_string()));
        }
        let mut vars = self.vars.clone();
        vars.insert(position.min(vars.len()), Variable::singleton(name));
        Ok(JointPmf::from_parts(vars, self.probs.clone()))
    }

    /// Replaces a product-alphabet variable by its component variables.
    /// Row-major layout makes this a pure relabelling of the tensor.
    pub fn split_variable(&self, name: &str) -> Result<Self> {
        let ax = self.axis(name)?;
        let parts = &self.vars[ax].parts;
        if parts.is_empty() {
            return Err(Error::Inconsistent(format!("variable `{name}` has no components")));
        }
        let mut vars = self.vars.clone();
        let replacement: Vec<Variable> = parts.iter().map(|(n, s)| Variable::new(n.clone(), *s)).collect();
        vars.splice(ax..=ax, replacement);
        check_variables(&vars)?;
        Ok(JointPmf::from_parts(vars, self.probs.clone()))
    }

    /// Support of the pmf as a list of flat indices.
    pub fn support(&self) -> Vec<usize> {
        self.probs.iter().enumerate().filter(|(_, p)| **p > T::zero()).map(|(i, _)| i).collect()
    }

    /// Largest absolute entrywise difference to another pmf over the same
    /// variables in the same order.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.names() != other.names() || self.shape() != other.shape() {
            return Err(Error::ShapeMismatch { expected: self.len(), got: other.len() });
        }
        Ok(self.probs.iter().zip(&other.probs).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max))
    }
}
