//! Search over factorized input distributions.
//!
//! A chain family is flattened into simplex blocks, one per conditional-pmf
//! row. [`optimize`] runs multi-start projected ascent with finite-difference
//! gradients, [`grid_scan`] enumerates a regular grid and serves as the
//! brute-force reference.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::feasibility::{check_separation, check_thm1, check_thm2, somarc_cuts};
use crate::network::{
    assemble_joint, ChannelModel, InputChain, ProductChain, SeparationChain, SourceModel, Thm1Chain, Thm2Chain,
    DEFAULT_V_SIZE,
};
use crate::{simplex, Error, Result};

mod minnorm;

pub const FD_STEP: f64 = 1e-5;
pub const MIN_STEP: f64 = 1e-8;
pub const INITIAL_STEP: f64 = 0.25;
pub const DEFAULT_GRID_CAP: f64 = 1e7;
/// Largest number of candidate combinations screened for the second restart.
pub const SCREEN_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    MinMarginThm1,
    MinMarginThm2,
    SomarcBound,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::MinMarginThm1 => "min_margin_thm1",
            Objective::MinMarginThm2 => "min_margin_thm2",
            Objective::SomarcBound => "somarc_bound",
        }
    }

    pub fn accepts(self, family: Family) -> bool {
        matches!(
            (self, family),
            (Objective::MinMarginThm1, Family::Thm1)
                | (Objective::MinMarginThm1, Family::Separation)
                | (Objective::MinMarginThm2, Family::Thm2)
                | (Objective::SomarcBound, Family::ProductInputs)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Thm1,
    Thm2,
    Separation,
    ProductInputs,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Thm1 => "thm1",
            Family::Thm2 => "thm2",
            Family::Separation => "separation",
            Family::ProductInputs => "product",
        }
    }
}

/// Source and channel to optimize over, plus auxiliary alphabet sizes for the
/// families that use `V1`, `V2`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub source: SourceModel,
    pub channel: ChannelModel,
    pub v_sizes: [usize; 2],
}

impl Scenario {
    pub fn new(source: SourceModel, channel: ChannelModel) -> Self {
        Scenario { source, channel, v_sizes: [DEFAULT_V_SIZE; 2] }
    }

    pub fn with_v_sizes(mut self, v_sizes: [usize; 2]) -> Self {
        self.v_sizes = v_sizes;
        self
    }

    /// Dimension of every simplex block of `family`, in chain order.
    pub fn layout(&self, family: Family) -> Vec<usize> {
        let [s1, s2, _, _] = self.source.sizes();
        let [a1, a2, a3] = self.channel.input_sizes();
        let [v1, v2] = self.v_sizes;
        let mut dims = Vec::new();
        let mut push = |dim: usize, count: usize| dims.extend(std::iter::repeat_n(dim, count));
        match family {
            Family::Thm1 => {
                push(v1, 1);
                push(a1, s1 * v1);
                push(v2, 1);
                push(a2, s2 * v2);
                push(a3, v1 * v2);
            }
            Family::Separation => {
                push(v1, 1);
                push(a1, v1);
                push(v2, 1);
                push(a2, v2);
                push(a3, v1 * v2);
            }
            Family::Thm2 => {
                push(a1, s1);
                push(a2, s2);
                push(a3, s1 * s2);
            }
            Family::ProductInputs => {
                push(a1, 1);
                push(a2, 1);
                push(a3, 1);
            }
        }
        dims
    }
}

/// One probability vector per conditional-pmf row of a chain family.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamChain {
    pub family: Family,
    pub blocks: Vec<Vec<f64>>,
}

impl ParamChain {
    pub fn uniform(family: Family, scenario: &Scenario) -> Self {
        let blocks = scenario.layout(family).into_iter().map(|d| vec![1.0 / d as f64; d]).collect();
        ParamChain { family, blocks }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn to_chain(&self, scenario: &Scenario) -> Result<InputChain> {
        let layout = scenario.layout(self.family);
        if layout != self.dims() {
            return Err(Error::InvalidConfig(format!(
                "parameter blocks {:?} do not match the {} layout {:?}",
                self.dims(),
                self.family.name(),
                layout
            )));
        }
        let [s1, s2, _, _] = scenario.source.sizes();
        let x_sizes = scenario.channel.input_sizes();
        let v = scenario.v_sizes;
        let mut it = self.blocks.iter().cloned();
        let mut take = |k: usize| -> Vec<Vec<f64>> { it.by_ref().take(k).collect() };
        let single = |mut rows: Vec<Vec<f64>>| rows.remove(0);
        Ok(match self.family {
            Family::Thm1 => {
                let pv1 = single(take(1));
                let x1 = take(s1 * v[0]);
                let pv2 = single(take(1));
                let x2 = take(s2 * v[1]);
                let x3 = take(v[0] * v[1]);
                InputChain::Thm1(Thm1Chain::from_tables([s1, s2], v, x_sizes, pv1, x1, pv2, x2, x3)?)
            }
            Family::Separation => {
                let pv1 = single(take(1));
                let x1 = take(v[0]);
                let pv2 = single(take(1));
                let x2 = take(v[1]);
                let x3 = take(v[0] * v[1]);
                InputChain::Separation(SeparationChain::from_tables(v, x_sizes, pv1, x1, pv2, x2, x3)?)
            }
            Family::Thm2 => {
                let x1 = take(s1);
                let x2 = take(s2);
                let x3 = take(s1 * s2);
                InputChain::Thm2(Thm2Chain::from_tables([s1, s2], x_sizes, x1, x2, x3)?)
            }
            Family::ProductInputs => {
                let mut b = take(3);
                let x3 = b.pop().unwrap_or_default();
                let x2 = b.pop().unwrap_or_default();
                let x1 = b.pop().unwrap_or_default();
                InputChain::Product(ProductChain::new(x1, x2, x3)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { restarts: 8, iterations: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best: ParamChain,
    pub best_value: f64,
    /// Best value reached by each restart, in restart order.
    pub trace: Vec<f64>,
    pub evaluations: u64,
}

impl OptResult {
    /// Running maximum of `trace`.
    pub fn envelope(&self) -> Vec<f64> {
        let mut best = f64::NEG_INFINITY;
        self.trace
            .iter()
            .map(|&v| {
                best = best.max(v);
                best
            })
            .collect()
    }
}

fn check_compat(objective: Objective, family: Family) -> Result<()> {
    if objective.accepts(family) {
        Ok(())
    } else {
        Err(Error::IncompatibleFamily { objective: objective.name().to_string(), family: family.name().to_string() })
    }
}

/// The smooth pieces whose minimum is the objective: condition margins, or
/// the two cut values of the sum bound.
pub fn objective_terms(objective: Objective, chain: &ParamChain, scenario: &Scenario) -> Result<Vec<f64>> {
    check_compat(objective, chain.family)?;
    let ic = chain.to_chain(scenario)?;
    let joint = assemble_joint(&scenario.source, &ic, &scenario.channel)?;
    let terms = match objective {
        Objective::MinMarginThm1 if chain.family == Family::Separation => {
            check_separation(&joint)?.conditions.iter().map(|c| c.margin).collect()
        }
        Objective::MinMarginThm1 => check_thm1(&joint)?.conditions.iter().map(|c| c.margin).collect(),
        Objective::MinMarginThm2 => check_thm2(&joint)?.conditions.iter().map(|c| c.margin).collect(),
        Objective::SomarcBound => somarc_cuts(&joint)?.to_vec(),
    };
    let terms: Vec<f64> = terms;
    if terms.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFiniteObjective);
    }
    Ok(terms)
}

pub fn evaluate_objective(objective: Objective, chain: &ParamChain, scenario: &Scenario) -> Result<f64> {
    Ok(objective_terms(objective, chain, scenario)?.into_iter().fold(f64::INFINITY, f64::min))
}

struct Ascent<'a> {
    objective: Objective,
    scenario: &'a Scenario,
    evaluations: u64,
}

impl Ascent<'_> {
    fn terms(&mut self, chain: &ParamChain) -> Result<Vec<f64>> {
        self.evaluations += 1;
        objective_terms(self.objective, chain, self.scenario)
    }

    /// Finite-difference gradient of every term, evaluated on the block-wise
    /// normalization of the perturbed point so each probe stays a valid chain.
    /// Rows are projected onto the tangent space of the simplex.
    fn gradients(&mut self, x: &ParamChain, base: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut grads = vec![Vec::new(); base.len()];
        for b in 0..x.blocks.len() {
            let dim = x.blocks[b].len();
            let mut block_grad = vec![vec![0.0; dim]; base.len()];
            if dim > 1 {
                for i in 0..dim {
                    let probe = |delta: f64| {
                        let mut p = x.clone();
                        p.blocks[b][i] += delta;
                        let s: f64 = p.blocks[b].iter().sum();
                        p.blocks[b].iter_mut().for_each(|v| *v /= s);
                        p
                    };
                    let plus = self.terms(&probe(FD_STEP))?;
                    if x.blocks[b][i] >= FD_STEP {
                        let minus = self.terms(&probe(-FD_STEP))?;
                        for k in 0..base.len() {
                            block_grad[k][i] = (plus[k] - minus[k]) / (2.0 * FD_STEP);
                        }
                    } else {
                        for k in 0..base.len() {
                            block_grad[k][i] = (plus[k] - base[k]) / FD_STEP;
                        }
                    }
                }
                for g in block_grad.iter_mut() {
                    let mean = g.iter().sum::<f64>() / dim as f64;
                    g.iter_mut().for_each(|v| *v -= mean);
                }
            }
            for (k, g) in block_grad.into_iter().enumerate() {
                grads[k].extend(g);
            }
        }
        Ok(grads)
    }

    fn run(&mut self, start: ParamChain, iterations: usize) -> Result<(ParamChain, f64)> {
        let mut x = start;
        let mut terms = self.terms(&x)?;
        let mut fx = min_of(&terms);
        let mut step = INITIAL_STEP;
        for _ in 0..iterations {
            let grads = self.gradients(&x, &terms)?;
            let mut moved = false;
            while step >= MIN_STEP {
                // terms within `step` of the minimum may become the minimum
                // after the move, so the direction must not decrease them
                let active: Vec<&[f64]> = terms
                    .iter()
                    .zip(&grads)
                    .filter(|(t, _)| **t - fx <= step.max(1e-9))
                    .map(|(_, g)| g.as_slice())
                    .collect();
                let d = minnorm::min_norm_combination(&active);
                let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    let cand = moved_point(&x, &d, step / norm);
                    let cand_terms = self.terms(&cand)?;
                    let fc = min_of(&cand_terms);
                    if fc > fx {
                        x = cand;
                        terms = cand_terms;
                        fx = fc;
                        step = (step * 2.0).min(1.0);
                        moved = true;
                        break;
                    }
                }
                step /= 2.0;
            }
            if !moved {
                break;
            }
        }
        Ok((x, fx))
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn moved_point(x: &ParamChain, d: &[f64], scale: f64) -> ParamChain {
    let mut out = x.clone();
    let mut off = 0;
    for block in out.blocks.iter_mut() {
        let dim = block.len();
        let shifted: Vec<f64> = block.iter().zip(&d[off..off + dim]).map(|(v, g)| v + scale * g).collect();
        *block = simplex::project(&shifted);
        off += dim;
    }
    out
}

fn screened_start(
    objective: Objective,
    family: Family,
    scenario: &Scenario,
    evals: &mut u64,
) -> Result<Option<ParamChain>> {
    let dims = scenario.layout(family);
    let fine: Vec<Vec<Vec<f64>>> = dims.iter().map(|&d| simplex::grid_points(d, 2)).collect();
    let coarse: Vec<Vec<Vec<f64>>> = dims.iter().map(|&d| (0..d).map(|i| simplex::vertex(d, i)).collect()).collect();
    let count = |c: &[Vec<Vec<f64>>]| c.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
    let cands = match (count(&fine), count(&coarse)) {
        (Some(n), _) if n <= SCREEN_CAP => fine,
        (_, Some(n)) if n <= SCREEN_CAP => coarse,
        _ => return Ok(None),
    };
    let total = count(&cands).unwrap_or(0);
    let mut best: Option<(f64, ParamChain)> = None;
    for idx in 0..total {
        let chain = ParamChain { family, blocks: pick(&cands, idx) };
        *evals += 1;
        let v = evaluate_objective(objective, &chain, scenario)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, chain));
        }
    }
    Ok(best.map(|b| b.1))
}

/// Mixed-radix decoding of `idx` into one candidate per block (last block
/// fastest).
fn pick(cands: &[Vec<Vec<f64>>], mut idx: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new(); cands.len()];
    for b in (0..cands.len()).rev() {
        let n = cands[b].len();
        out[b] = cands[b][idx % n].clone();
        idx /= n;
    }
    out
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Multi-start projected ascent. Restart 0 starts from the uniform point,
/// restart 1 from the best screened grid or vertex combination, later
/// restarts from Dirichlet(1) draws. Restarts run in parallel and are merged
/// by value, ties going to the lower restart index.
pub fn optimize(
    objective: Objective,
    scenario: &Scenario,
    family: Family,
    budget: Budget,
    seed: u64,
) -> Result<OptResult> {
    check_compat(objective, family)?;
    if budget.restarts == 0 || budget.iterations == 0 {
        return Err(Error::InvalidConfig("optimizer budget must be at least one restart and one iteration".into()));
    }
    let runs: Vec<Result<(ParamChain, f64, u64)>> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            let mut ascent = Ascent { objective, scenario, evaluations: 0 };
            let start = match r {
                0 => ParamChain::uniform(family, scenario),
                1 => match screened_start(objective, family, scenario, &mut ascent.evaluations)? {
                    Some(c) => c,
                    None => dirichlet_start(family, scenario, &mut restart_rng(seed, r)),
                },
                _ => dirichlet_start(family, scenario, &mut restart_rng(seed, r)),
            };
            let (x, fx) = ascent.run(start, budget.iterations)?;
            Ok((x, fx, ascent.evaluations))
        })
        .collect();
    let mut trace = Vec::with_capacity(runs.len());
    let mut best: Option<(ParamChain, f64)> = None;
    let mut evaluations = 0;
    for run in runs {
        let (x, fx, ev) = run?;
        evaluations += ev;
        trace.push(fx);
        if best.as_ref().is_none_or(|(_, b)| fx > *b) {
            best = Some((x, fx));
        }
    }
    let (best, _) = best.expect("at least one restart");
    let best_value = evaluate_objective(objective, &best, scenario)?;
    Ok(OptResult { best, best_value, trace, evaluations: evaluations + 1 })
}

fn dirichlet_start(family: Family, scenario: &Scenario, rng: &mut ChaCha8Rng) -> ParamChain {
    let blocks = scenario.layout(family).into_iter().map(|d| simplex::dirichlet_ones(d, rng)).collect();
    ParamChain { family, blocks }
}

/// Exhaustive evaluation over the grid with spacing `step` on every block.
/// `step` must divide 1 into a whole number of parts (within 1e-9).
pub fn grid_scan(objective: Objective, scenario: &Scenario, family: Family, step: f64, cap: f64) -> Result<OptResult> {
    check_compat(objective, family)?;
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidConfig(format!("grid step {step} must lie in (0, 1]")));
    }
    let parts = (1.0 / step).round();
    if (parts * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!("grid step {step} does not divide 1")));
    }
    let parts = parts as usize;
    let dims = scenario.layout(family);
    let points: f64 = dims.iter().map(|&d| simplex::grid_size(d, parts)).product();
    if points > cap {
        return Err(Error::GridTooLarge { points, cap });
    }
    let cands: Vec<Vec<Vec<f64>>> = dims.iter().map(|&d| simplex::grid_points(d, parts)).collect();
    let total = points as usize;
    let best = (0..total)
        .into_par_iter()
        .map(|idx| {
            let chain = ParamChain { family, blocks: pick(&cands, idx) };
            evaluate_objective(objective, &chain, scenario).map(|v| (v, idx))
        })
        .try_reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                let better = b.0 > a.0 || (b.0 == a.0 && b.1 < a.1);
                Ok(if better { b } else { a })
            },
        )?;
    let chain = ParamChain { family, blocks: pick(&cands, best.1) };
    Ok(OptResult { best: chain, best_value: best.0, trace: vec![best.0], evaluations: total as u64 })
}
