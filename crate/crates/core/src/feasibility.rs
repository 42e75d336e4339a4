//! Sufficient conditions and outer bounds evaluated on an assembled joint.
//!
//! Every condition has the form `H(...) < I(...)`. Expressions are evaluated
//! exactly as written, redundant conditioning included, so identities between
//! them are checked by tests instead of being baked into the formulas.

use std::fmt;

use crate::infotheory::JointPmf;
use crate::network::{S1, S2, V1, V2, W, W3, X1, X2, X3, Y, Y3, YR, YS};
use crate::{Error, Real, Result};

/// Tolerance used when a chain's structural independence is verified from
/// the joint.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Thm1,
    Thm2,
    Separation,
    MacCover,
    Crbc9,
    Crbc10,
    Prop1,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::Thm1,
        Scheme::Thm2,
        Scheme::Separation,
        Scheme::MacCover,
        Scheme::Crbc9,
        Scheme::Crbc10,
        Scheme::Prop1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Thm1 => "thm1",
            Scheme::Thm2 => "thm2",
            Scheme::Separation => "separation",
            Scheme::MacCover => "mac",
            Scheme::Crbc9 => "crbc9",
            Scheme::Crbc10 => "crbc10",
            Scheme::Prop1 => "prop1",
        }
    }

    pub fn from_name(s: &str) -> Option<Scheme> {
        Scheme::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition<T: Real = f64> {
    pub id: String,
    pub lhs: T,
    pub rhs: T,
    pub margin: T,
    pub satisfied: bool,
    /// `|margin|` is within the numerical tolerance; never satisfied.
    pub boundary: bool,
}

impl<T: Real> Condition<T> {
    pub fn new(id: impl Into<String>, lhs: T, rhs: T) -> Self {
        let margin = rhs - lhs;
        let boundary = margin.abs() <= T::norm_tol();
        Condition { id: id.into(), lhs, rhs, margin, satisfied: margin > T::zero() && !boundary, boundary }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport<T: Real = f64> {
    pub scheme: Scheme,
    pub conditions: Vec<Condition<T>>,
    pub overall: bool,
    pub min_margin: T,
    pub notes: Vec<String>,
}

impl<T: Real> ConditionReport<T> {
    pub fn new(scheme: Scheme, conditions: Vec<Condition<T>>) -> Self {
        let overall = conditions.iter().all(|c| c.satisfied);
        let min_margin = conditions.iter().map(|c| c.margin).fold(T::infinity(), T::min);
        ConditionReport { scheme, conditions, overall, min_margin, notes: Vec::new() }
    }

    pub fn get(&self, id: &str) -> Option<&Condition<T>> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

/// `H(lhs.0 | lhs.1) < I(rhs.0 ; rhs.1 | rhs.2)`.
struct Spec {
    id: &'static str,
    lhs: (&'static [&'static str], &'static [&'static str]),
    rhs: (&'static [&'static str], &'static [&'static str], &'static [&'static str]),
}

const THM1: [Spec; 6] = [
    Spec { id: "2a", lhs: (&[S1], &[S2, W3]), rhs: (&[X1], &[Y3], &[S2, X2, V1, X3, W3]) },
    Spec { id: "2b", lhs: (&[S2], &[S1, W3]), rhs: (&[X2], &[Y3], &[S1, X1, V2, X3, W3]) },
    Spec { id: "2c", lhs: (&[S1, S2], &[W3]), rhs: (&[X1, X2], &[Y3], &[V1, V2, X3, W3]) },
    Spec { id: "2d", lhs: (&[S1], &[S2, W]), rhs: (&[X1, X3], &[Y], &[S1, X2, V2]) },
    Spec { id: "2e", lhs: (&[S2], &[S1, W]), rhs: (&[X2, X3], &[Y], &[S2, X1, V1]) },
    Spec { id: "2f", lhs: (&[S1, S2], &[W]), rhs: (&[X1, X2, X3], &[Y], &[S1, S2]) },
];

const THM2: [Spec; 6] = [
    Spec { id: "5a", lhs: (&[S1], &[S2, W3]), rhs: (&[X1], &[Y3], &[S1, X2, X3]) },
    Spec { id: "5b", lhs: (&[S2], &[S1, W3]), rhs: (&[X2], &[Y3], &[S2, X1, X3]) },
    Spec { id: "5c", lhs: (&[S1, S2], &[W3]), rhs: (&[X1, X2], &[Y3], &[S1, S2, X3]) },
    Spec { id: "5d", lhs: (&[S1], &[S2, W]), rhs: (&[X1, X3], &[Y], &[S2, X2, W]) },
    Spec { id: "5e", lhs: (&[S2], &[S1, W]), rhs: (&[X2, X3], &[Y], &[S1, X1, W]) },
    Spec { id: "5f", lhs: (&[S1, S2], &[W]), rhs: (&[X1, X2, X3], &[Y], &[W]) },
];

const MAC: [Spec; 3] = [
    Spec { id: "mac1", lhs: (&[S1], &[S2]), rhs: (&[X1], &[Y3], &[S2, X2]) },
    Spec { id: "mac2", lhs: (&[S2], &[S1]), rhs: (&[X2], &[Y3], &[S1, X1]) },
    Spec { id: "mac3", lhs: (&[S1, S2], &[]), rhs: (&[X1, X2], &[Y3], &[]) },
];

const CRBC9: [Spec; 2] = [
    Spec { id: "9a", lhs: (&[S1], &[W3]), rhs: (&[X1], &[Y3], &[X3]) },
    Spec { id: "9b", lhs: (&[S1], &[W]), rhs: (&[X1, X3], &[Y], &[]) },
];

const CRBC10: [Spec; 2] = [
    Spec { id: "10a", lhs: (&[S1], &[W3]), rhs: (&[X1], &[Y3], &[X3, S1]) },
    Spec { id: "10b", lhs: (&[S1], &[W]), rhs: (&[X1, X3], &[Y], &[W]) },
];

fn require<T: Real>(joint: &JointPmf<T>, names: &[&str]) -> Result<()> {
    for n in names {
        if !joint.has(n) {
            return Err(Error::MissingVariable(n.to_string()));
        }
    }
    Ok(())
}

/// Absent variables count as singletons.
fn require_singleton<T: Real>(joint: &JointPmf<T>, names: &[&str]) -> Result<()> {
    for n in names {
        if joint.has(n) && joint.size_of(n)? != 1 {
            return Err(Error::NotSingleton(n.to_string()));
        }
    }
    Ok(())
}

fn evaluate<T: Real>(joint: &JointPmf<T>, specs: &[Spec]) -> Result<Vec<Condition<T>>> {
    specs
        .iter()
        .map(|s| {
            let lhs = joint.conditional_entropy(s.lhs.0, s.lhs.1)?;
            let rhs = joint.conditional_mutual_information(s.rhs.0, s.rhs.1, s.rhs.2)?;
            Ok(Condition::new(s.id, lhs, rhs))
        })
        .collect()
}

fn rhs_only<T: Real>(joint: &JointPmf<T>, specs: &[Spec]) -> Result<Vec<T>> {
    specs.iter().map(|s| joint.conditional_mutual_information(s.rhs.0, s.rhs.1, s.rhs.2)).collect()
}

fn thm1_report<T: Real>(joint: &JointPmf<T>, scheme: Scheme) -> Result<ConditionReport<T>> {
    require(joint, &[S1, S2, W, W3, V1, V2, X1, X2, X3, Y, Y3])?;
    Ok(ConditionReport::new(scheme, evaluate(joint, &THM1)?))
}

/// Conditions 2a to 2f: relay set first, destination set second.
pub fn check_thm1<T: Real>(joint: &JointPmf<T>) -> Result<ConditionReport<T>> {
    thm1_report(joint, Scheme::Thm1)
}

/// Conditions 5a to 5f.
pub fn check_thm2<T: Real>(joint: &JointPmf<T>) -> Result<ConditionReport<T>> {
    require(joint, &[S1, S2, W, W3, X1, X2, X3, Y, Y3])?;
    Ok(ConditionReport::new(Scheme::Thm2, evaluate(joint, &THM2)?))
}

/// The thm1 expressions on a joint whose inputs depend on the sources only
/// through the auxiliaries.
pub fn check_separation<T: Real>(joint: &JointPmf<T>) -> Result<ConditionReport<T>> {
    require(joint, &[S1, S2, V1, V2, X1, X2])?;
    let tol = T::lit(STRUCTURE_TOL);
    let leak1 = joint.conditional_mutual_information(&[X1], &[S1, S2, W, W3], &[V1])?;
    let leak2 = joint.conditional_mutual_information(&[X2], &[S1, S2, W, W3], &[V2])?;
    let leak_aux = joint.mutual_information(&[V1, V2], &[S1, S2, W, W3])?;
    if leak1 > tol || leak2 > tol || leak_aux > tol {
        return Err(Error::WrongChain(format!(
            "channel inputs depend on the sources (I(X1;S|V1) = {leak1}, I(X2;S|V2) = {leak2}, I(V;S) = {leak_aux})"
        )));
    }
    thm1_report(joint, Scheme::Separation)
}

/// The multiple-access conditions: the thm1 relay set once `V1`, `V2`,
/// `X3` and `W3` are absent.
pub fn check_mac_cover<T: Real>(joint: &JointPmf<T>) -> Result<ConditionReport<T>> {
    require_singleton(joint, &[V1, V2, X3, W3])?;
    require(joint, &[S1, S2, X1, X2, Y3])?;
    Ok(ConditionReport::new(Scheme::MacCover, evaluate(joint, &MAC)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrbcStyle {
    /// Inputs `p(x1, x3)` independent of the source.
    IndependentInputs,
    /// Inputs `p(x1|s1) p(x3|s1)`.
    SourceAwareInputs,
}

impl CrbcStyle {
    fn specs(self) -> &'static [Spec] {
        match self {
            CrbcStyle::IndependentInputs => &CRBC9,
            CrbcStyle::SourceAwareInputs => &CRBC10,
        }
    }
}

/// The two right-hand sides of the requested style, without checking that the
/// joint came from the matching chain.
pub fn crbc_rhs<T: Real>(joint: &JointPmf<T>, style: CrbcStyle) -> Result<[T; 2]> {
    require(joint, &[S1, X1, X3, Y, Y3])?;
    let r = rhs_only(joint, style.specs())?;
    Ok([r[0], r[1]])
}

/// Single-source relay broadcast conditions.
pub fn check_crbc<T: Real>(joint: &JointPmf<T>, style: CrbcStyle) -> Result<ConditionReport<T>> {
    require_singleton(joint, &[S2, X2])?;
    require(joint, &[S1, W, W3, X1, X3, Y, Y3])?;
    let tol = T::lit(STRUCTURE_TOL);
    match style {
        CrbcStyle::IndependentInputs => {
            let dep = joint.mutual_information(&[X1, X3], &[S1, W, W3])?;
            if dep > tol {
                return Err(Error::WrongChain(format!(
                    "inputs must be independent of the source, I(X1,X3;S1,W,W3) = {dep}"
                )));
            }
        }
        CrbcStyle::SourceAwareInputs => {
            let cross = joint.conditional_mutual_information(&[X1], &[X3], &[S1])?;
            let side = joint.conditional_mutual_information(&[X1, X3], &[W, W3], &[S1])?;
            if cross > tol || side > tol {
                return Err(Error::WrongChain(format!(
                    "inputs must follow p(x1|s1)p(x3|s1), I(X1;X3|S1) = {cross}, I(X1,X3;W,W3|S1) = {side}"
                )));
            }
        }
    }
    let scheme = match style {
        CrbcStyle::IndependentInputs => Scheme::Crbc9,
        CrbcStyle::SourceAwareInputs => Scheme::Crbc10,
    };
    Ok(ConditionReport::new(scheme, evaluate(joint, style.specs())?))
}

fn check_somarc_joint<T: Real>(joint: &JointPmf<T>) -> Result<JointPmf<T>> {
    require(joint, &[X1, X2, X3, Y, Y3])?;
    let y = joint.variable(Y)?;
    let parts: Vec<&str> = y.parts.iter().map(|p| p.0.as_str()).collect();
    if parts != [YR, YS] {
        return Err(Error::NotSomarc("destination output is not the pair (YR, YS)".into()));
    }
    let split = joint.split_variable(Y)?;
    let tol = T::lit(STRUCTURE_TOL);
    let relay_link = split.conditional_mutual_information(&[YR], &[X1, X2, YS, Y3], &[X3])?;
    let source_link = split.conditional_mutual_information(&[YS, Y3], &[X3], &[X1, X2])?;
    if relay_link > tol || source_link > tol {
        return Err(Error::NotSomarc(format!(
            "outputs do not factor as p(yR|x3)p(yS,y3|x1,x2) (residuals {relay_link}, {source_link})"
        )));
    }
    let dep = split.mutual_information(&[X1], &[X2])? + split.mutual_information(&[X1, X2], &[X3])?;
    if dep > tol {
        return Err(Error::WrongChain(format!("inputs are not independent, dependence {dep}")));
    }
    Ok(split)
}

/// The two cut values `I(X1,X2;Y3,YS)` and `I(X3;YR) + I(X1,X2;YS)`.
pub fn somarc_cuts<T: Real>(joint: &JointPmf<T>) -> Result<[T; 2]> {
    let split = check_somarc_joint(joint)?;
    let broadcast = split.mutual_information(&[X1, X2], &[Y3, YS])?;
    let relay = split.mutual_information(&[X3], &[YR])? + split.mutual_information(&[X1, X2], &[YS])?;
    Ok([broadcast, relay])
}

/// Sum-rate outer bound for the semi-orthogonal channel at the joint's
/// (independent) input distribution.
pub fn somarc_sum_bound<T: Real>(joint: &JointPmf<T>) -> Result<T> {
    let [a, b] = somarc_cuts(joint)?;
    Ok(a.min(b))
}

/// Compares `H(S1,S2)` with the sum bound at the joint's inputs. When the
/// entropy is not below the bound, no separation-based scheme can succeed
/// at these inputs.
pub fn check_prop1<T: Real>(joint: &JointPmf<T>) -> Result<ConditionReport<T>> {
    require(joint, &[S1, S2])?;
    let h = joint.entropy(&[S1, S2])?;
    let bound = somarc_sum_bound(joint)?;
    Ok(ConditionReport::new(Scheme::Prop1, vec![Condition::new("sum", h, bound)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::*;

    fn somarc_cpm_joint() -> JointPmf {
        let (source, channel) = somarc_example::<f64>();
        let chain = InputChain::Thm2(Thm2Chain::cpm_identity([2, 2], 2).unwrap());
        assemble_joint(&source, &chain, &channel).unwrap()
    }

    #[test]
    fn strict_inequality_and_boundary() {
        let c = Condition::new("x", 1.0, 1.0 + 1e-13);
        assert!(!c.satisfied && c.boundary);
        let c = Condition::new("x", 1.0, 1.5);
        assert!(c.satisfied && !c.boundary);
        assert_eq!(c.margin, 0.5);
    }

    #[test]
    fn cpm_on_somarc_thm2() {
        let r = check_thm2(&somarc_cpm_joint()).unwrap();
        let ids: Vec<&str> = r.conditions.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["5a", "5b", "5c", "5d", "5e", "5f"]);
        let f = r.get("5f").unwrap();
        assert!((f.lhs - 3f64.log2()).abs() < 1e-12);
        assert!((f.rhs - 3f64.log2()).abs() < 1e-12);
        assert!(f.margin.abs() <= 1e-12 && f.boundary && !f.satisfied);
        let a = r.get("5a").unwrap();
        assert!((a.lhs - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(a.rhs, 0.0);
        assert!(!r.overall);
    }

    #[test]
    fn uniform_inputs_reach_one_and_a_half_bits() {
        let (source, channel) = somarc_example::<f64>();
        let chain = InputChain::Product(ProductChain::uniform([2, 2, 2]).unwrap());
        let joint = assemble_joint(&source, &chain, &channel).unwrap();
        let [a, b] = somarc_cuts(&joint).unwrap();
        assert!((a - 1.5).abs() < 1e-12);
        assert!((b - 2.5).abs() < 1e-12);
        let p = check_prop1(&joint).unwrap();
        assert!(!p.overall);
        assert!((p.min_margin - (1.5 - 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn sum_bound_with_constant_first_input() {
        let (source, channel) = somarc_example::<f64>();
        let chain = InputChain::Product(ProductChain::new(vec![1.0, 0.0], vec![0.5, 0.5], vec![0.5, 0.5]).unwrap());
        let joint = assemble_joint(&source, &chain, &channel).unwrap();
        assert!((somarc_sum_bound(&joint).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sum_bound_rejects_correlated_inputs() {
        assert!(matches!(somarc_sum_bound(&somarc_cpm_joint()), Err(Error::WrongChain(_))));
    }

    #[test]
    fn mac_cover_on_adder() {
        let (source, _) = somarc_example::<f64>();
        let inputs = [2, 2, 1];
        let channel = deterministic_channel(
            inputs,
            &SymbolMap::from_fn(inputs, 1, |_, _, _| 0),
            &SymbolMap::from_fn(inputs, 3, |x1, x2, _| x1 + x2),
        )
        .unwrap();
        let chain = InputChain::Thm2(Thm2Chain::cpm_identity([2, 2], 1).unwrap());
        let joint = assemble_joint(&source, &chain, &channel).unwrap();
        let r = check_mac_cover(&joint).unwrap();
        let c = r.get("mac3").unwrap();
        assert!(c.margin.abs() <= 1e-12 && c.boundary);
    }

    #[test]
    fn mac_cover_needs_singletons() {
        assert!(matches!(check_mac_cover(&somarc_cpm_joint()), Err(Error::NotSingleton(_))));
    }

    #[test]
    fn thm1_needs_auxiliaries() {
        assert!(matches!(check_thm1(&somarc_cpm_joint()), Err(Error::MissingVariable(_))));
    }
}
