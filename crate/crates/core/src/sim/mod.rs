//! Monte Carlo simulation of the block-Markov decode-and-forward scheme with
//! source-dependent codebooks and random binning, plus the uncoded scheme on
//! the semi-orthogonal example.
//!
//! A session sends `B` source blocks of `n` letters over `B + 1` channel
//! blocks. In block `b` source `i` sends `x_i(u_{i,b}, s_{i,b-1})`, where
//! `u_{i,b}` is the bin of the current block and `s_{i,0}` is a fixed sequence
//! shared by all nodes. The relay sends `x3` of its estimates of the previous
//! block. The relay decodes the bin pair and then the source pair of every
//! block as it arrives; the destination decodes backwards from the last
//! block. Only the decode-and-forward scheme with source-dependent codewords
//! is simulated; the auxiliary-variable scheme is evaluated analytically in
//! [`crate::feasibility`] only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::network::{
    assemble_joint, somarc_example, ChannelModel, InputChain, SourceModel, Thm2Chain, S1, S2, W, W3, X1, X2, X3, Y, Y3,
};
use crate::{Error, Result};

mod codebook;
mod typical;

pub use codebook::{Codebooks, KeyedCodebook};
pub use typical::{is_jointly_typical, Slack, TypicalityChecker};

use codebook::{derive, mix, RowSampler, TAG_X1, TAG_X2};

pub const DEFAULT_EPSILON: f64 = 0.25;
pub const DEFAULT_SEED: u64 = 20_240_917;
pub const MAX_BIN_PAIRS: f64 = 1e6;
pub const MAX_SOURCE_CANDIDATES: f64 = 1e8;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub blocks: usize,
    pub rate1: f64,
    pub rate2: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub slack: Slack,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 8,
            blocks: 2,
            rate1: 1.0,
            rate2: 1.0,
            epsilon: DEFAULT_EPSILON,
            trials: 200,
            seed: DEFAULT_SEED,
            slack: Slack::Absolute,
        }
    }
}

impl SimConfig {
    /// `round(2^(n R))`, at least one.
    pub fn bin_counts(&self) -> [usize; 2] {
        let count = |r: f64| ((self.n as f64 * r).exp2().round() as usize).max(1);
        [count(self.rate1), count(self.rate2)]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n == 0 {
            return bad("block length n must be at least 1");
        }
        if self.blocks == 0 {
            return bad("number of source blocks must be at least 1");
        }
        if !(self.rate1 >= 0.0 && self.rate2 >= 0.0) || !self.rate1.is_finite() || !self.rate2.is_finite() {
            return bad("binning rates must be finite and nonnegative");
        }
        if self.epsilon <= 0.0 || !self.epsilon.is_finite() {
            return bad("epsilon must be positive");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        let pairs = (self.n as f64 * (self.rate1 + self.rate2)).exp2();
        if pairs > 2.0 * MAX_BIN_PAIRS {
            return Err(Error::BudgetExceeded(format!("about {pairs:.3e} bin pairs per relay decode")));
        }
        let [b1, b2] = self.bin_counts();
        if (b1 as f64) * (b2 as f64) > MAX_BIN_PAIRS {
            return Err(Error::BudgetExceeded(format!(
                "{b1} x {b2} bin pairs per relay decode exceeds {MAX_BIN_PAIRS:e}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub trials: usize,
    pub blocks: usize,
    pub relay_block_errors: u64,
    pub dest_block_errors: u64,
    pub session_errors: u64,
    pub dest_session_errors: u64,
}

impl SimReport {
    fn rate(k: u64, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            k as f64 / n as f64
        }
    }

    pub fn relay_block_error_rate(&self) -> f64 {
        Self::rate(self.relay_block_errors, self.trials * self.blocks)
    }

    pub fn dest_block_error_rate(&self) -> f64 {
        Self::rate(self.dest_block_errors, self.trials * self.blocks)
    }

    /// Fraction of sessions where the relay or the destination got any block
    /// wrong.
    pub fn session_error_rate(&self) -> f64 {
        Self::rate(self.session_errors, self.trials)
    }

    /// Fraction of sessions where the destination got any block wrong.
    pub fn dest_session_error_rate(&self) -> f64 {
        Self::rate(self.dest_session_errors, self.trials)
    }

    /// 95% Wilson score interval for the session error rate.
    pub fn wilson_interval(&self) -> (f64, f64) {
        wilson(self.session_errors, self.trials as u64, Z95)
    }
}

pub fn wilson(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    RelayBins,
    RelaySource,
    Destination,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::RelayBins => "relay_bins",
            Stage::RelaySource => "relay_source",
            Stage::Destination => "destination",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Correct,
    /// A unique candidate that is not the transmitted one.
    Wrong,
    /// More than one candidate passed.
    Ambiguous,
    /// No candidate passed.
    Absent,
    /// Not attempted because a block it depends on already failed.
    Skipped,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Correct => "ok",
            Verdict::Wrong => "wrong",
            Verdict::Ambiguous => "ambiguous",
            Verdict::Absent => "absent",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRow {
    pub trial: usize,
    pub block: usize,
    pub stage: Stage,
    pub verdict: Verdict,
}

/// Thresholds for the `R1`, `R2` needed by the relay's source decoder with
/// `delta` bits of headroom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateHint {
    pub rate1: f64,
    pub rate2: f64,
    /// `H(S1,S2|W3) + 2 delta`.
    pub sum_required: f64,
    /// Whether `rate1 + rate2` already covers `sum_required`.
    pub sum_ok: bool,
}

pub fn sw_rate_hint(source: &SourceModel, delta: f64) -> Result<RateHint> {
    let p = source.pmf();
    let rate1 = p.conditional_entropy(&[S1], &[S2, W3])? + delta;
    let rate2 = p.conditional_entropy(&[S2], &[S1, W3])? + delta;
    let sum_required = p.conditional_entropy(&[S1, S2], &[W3])? + 2.0 * delta;
    Ok(RateHint { rate1, rate2, sum_required, sum_ok: rate1 + rate2 >= sum_required - 1e-12 })
}

struct Context<'a> {
    cfg: SimConfig,
    codebooks: Codebooks,
    source: RowSampler,
    /// `p(s1, s2)` for the fixed first-block sequences.
    pair: RowSampler,
    channel: RowSampler,
    sizes: [usize; 4],
    x_sizes: [usize; 3],
    y3_size: usize,
    relay_pair: TypicalityChecker,
    relay_source: TypicalityChecker,
    destination: TypicalityChecker,
    /// Allowed `(s1, s2)` given `w3` and given `w`.
    allowed_w3: Vec<Vec<(usize, usize)>>,
    allowed_w: Vec<Vec<(usize, usize)>>,
    _chain: &'a Thm2Chain,
}

fn allowed_pairs(source: &SourceModel, side: &str) -> Result<Vec<Vec<(usize, usize)>>> {
    let m = source.pmf().marginalize(&[S1, S2, side])?.permute(&[S1, S2, side])?;
    let [n1, n2, nw] = [m.shape()[0], m.shape()[1], m.shape()[2]];
    Ok((0..nw)
        .map(|w| {
            let mut v = Vec::new();
            for a in 0..n1 {
                for b in 0..n2 {
                    if m.prob(&[a, b, w]) > 0.0 {
                        v.push((a, b));
                    }
                }
            }
            v
        })
        .collect())
}

impl<'a> Context<'a> {
    fn new(source: &SourceModel, channel: &ChannelModel, chain: &'a Thm2Chain, cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let support = source.pmf().marginalize(&[S1, S2])?.probs().iter().filter(|&&p| p > 0.0).count();
        let candidates = (support as f64).powi(cfg.n as i32);
        if candidates > MAX_SOURCE_CANDIDATES {
            return Err(Error::BudgetExceeded(format!(
                "{support}^{} = {candidates:.3e} source candidates per decode exceeds {MAX_SOURCE_CANDIDATES:e}",
                cfg.n
            )));
        }
        let joint = assemble_joint(source, &InputChain::Thm2(chain.clone()), channel)?;
        let reference = |names: &[&str]| -> Result<TypicalityChecker> {
            let m = joint.marginalize(names)?.permute(names)?;
            Ok(TypicalityChecker::new(&m, cfg.slack, cfg.epsilon))
        };
        let pair = source.pmf().marginalize(&[S1, S2])?;
        Ok(Context {
            cfg,
            codebooks: Codebooks::new(chain, cfg.bin_counts()),
            source: RowSampler::new(source.pmf().probs(), source.pmf().len()),
            pair: RowSampler::new(pair.probs(), pair.len()),
            channel: RowSampler::from_kernel(channel.kernel()),
            sizes: source.sizes(),
            x_sizes: channel.input_sizes(),
            y3_size: channel.output_sizes()[1],
            relay_pair: reference(&[S1, S2, X1, X2, X3, Y3])?,
            relay_source: reference(&[S1, S2, W3])?,
            destination: reference(&[S1, S2, W, X1, X2, X3, Y])?,
            allowed_w3: allowed_pairs(source, W3)?,
            allowed_w: allowed_pairs(source, W)?,
            _chain: chain,
        })
    }
}

/// Source pair sequence of one block.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Pair {
    s1: Vec<usize>,
    s2: Vec<usize>,
}

/// Calls `visit` on every pair sequence whose letter `k` lies in
/// `allowed[side[k]]`, in lexicographic order, until it returns `false`.
fn enumerate_pairs(allowed: &[Vec<(usize, usize)>], side: &[usize], mut visit: impl FnMut(&[usize], &[usize]) -> bool) {
    let n = side.len();
    let choices: Vec<&[(usize, usize)]> = side.iter().map(|&w| allowed[w].as_slice()).collect();
    if choices.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; n];
    let mut s1: Vec<usize> = choices.iter().map(|c| c[0].0).collect();
    let mut s2: Vec<usize> = choices.iter().map(|c| c[0].1).collect();
    loop {
        if !visit(&s1, &s2) {
            return;
        }
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                let (a, b) = choices[k][idx[k]];
                s1[k] = a;
                s2[k] = b;
                break;
            }
            idx[k] = 0;
            let (a, b) = choices[k][0];
            s1[k] = a;
            s2[k] = b;
        }
    }
}

/// Outcome of a unique-candidate search: the first passing candidate and
/// whether another one passed.
enum Search<T> {
    Unique(T),
    Ambiguous(T),
    Absent,
}

struct Session<'c, 'a> {
    ctx: &'c Context<'a>,
    book: KeyedCodebook<'c>,
}

impl Session<'_, '_> {
    fn decode_bins(&self, prev: &Pair, y3: &[usize]) -> Search<(usize, usize)> {
        let ctx = self.ctx;
        let book = &self.book;
        let n = y3.len();
        let [b1, b2] = book_bins(ctx);
        let x3 = book.x3_word(&prev.s1, &prev.s2);
        let seq1 = book.seq_key(TAG_X1, &prev.s1);
        let seq2 = book.seq_key(TAG_X2, &prev.s2);
        let keys2: Vec<u64> = (0..b2).map(|u| KeyedCodebook::word_key(seq2, u)).collect();
        let chk = &ctx.relay_pair;
        let mut found: Option<(usize, usize)> = None;
        let mut cells = vec![0usize; n];
        let mut x1 = vec![0usize; n];
        for u1 in 0..b1 {
            let k1 = KeyedCodebook::word_key(seq1, u1);
            for k in 0..n {
                x1[k] = book.x1_letter(k1, prev.s1[k], k);
            }
            for (u2, &k2) in keys2.iter().enumerate() {
                // letters are generated only until the first impossible tuple
                let mut ok = true;
                for k in 0..n {
                    let x2 = book.x2_letter(k2, prev.s2[k], k);
                    let c = chk.cell(&[prev.s1[k], prev.s2[k], x1[k], x2, x3[k], y3[k]]);
                    if chk.prob(c) == 0.0 {
                        ok = false;
                        break;
                    }
                    cells[k] = c;
                }
                if ok && chk.check(&mut cells) {
                    match found {
                        None => found = Some((u1, u2)),
                        Some(first) => return Search::Ambiguous(first),
                    }
                }
            }
        }
        found.map_or(Search::Absent, Search::Unique)
    }

    fn decode_source(&self, bins: (usize, usize), w3: &[usize]) -> Search<Pair> {
        let ctx = self.ctx;
        let chk = &ctx.relay_source;
        let mut found: Option<Pair> = None;
        let mut ambiguous = false;
        let mut cells = vec![0usize; w3.len()];
        enumerate_pairs(&ctx.allowed_w3, w3, |s1, s2| {
            if self.book.bin1(s1) != bins.0 || self.book.bin2(s2) != bins.1 {
                return true;
            }
            for k in 0..w3.len() {
                cells[k] = chk.cell(&[s1[k], s2[k], w3[k]]);
            }
            if !chk.check(&mut cells) {
                return true;
            }
            if found.is_some() {
                ambiguous = true;
                return false;
            }
            found = Some(Pair { s1: s1.to_vec(), s2: s2.to_vec() });
            true
        });
        match (found, ambiguous) {
            (Some(p), false) => Search::Unique(p),
            (Some(p), true) => Search::Ambiguous(p),
            (None, _) => Search::Absent,
        }
    }

    fn decode_destination(&self, bins: (usize, usize), w: &[usize], y: &[usize]) -> Search<Pair> {
        let ctx = self.ctx;
        let chk = &ctx.destination;
        let book = &self.book;
        let n = w.len();
        let mut found: Option<Pair> = None;
        let mut ambiguous = false;
        let mut cells = vec![0usize; n];
        enumerate_pairs(&ctx.allowed_w, w, |s1, s2| {
            let k1 = KeyedCodebook::word_key(book.seq_key(TAG_X1, s1), bins.0);
            let k2 = KeyedCodebook::word_key(book.seq_key(TAG_X2, s2), bins.1);
            let k3 = book.pair_key(s1, s2);
            for k in 0..n {
                let x1 = book.x1_letter(k1, s1[k], k);
                let x2 = book.x2_letter(k2, s2[k], k);
                let x3 = book.x3_letter(k3, s1[k], s2[k], k);
                let c = chk.cell(&[s1[k], s2[k], w[k], x1, x2, x3, y[k]]);
                if chk.prob(c) == 0.0 {
                    return true;
                }
                cells[k] = c;
            }
            if !chk.check(&mut cells) {
                return true;
            }
            if found.is_some() {
                ambiguous = true;
                return false;
            }
            found = Some(Pair { s1: s1.to_vec(), s2: s2.to_vec() });
            true
        });
        match (found, ambiguous) {
            (Some(p), false) => Search::Unique(p),
            (Some(p), true) => Search::Ambiguous(p),
            (None, _) => Search::Absent,
        }
    }
}

fn book_bins(ctx: &Context) -> [usize; 2] {
    ctx.codebooks.bins()
}

struct SessionOutcome {
    relay_errors: u64,
    dest_errors: u64,
    trace: Vec<TraceRow>,
}

fn verdict<T: PartialEq>(search: &Search<T>, truth: &T) -> Verdict {
    match search {
        Search::Unique(x) if x == truth => Verdict::Correct,
        Search::Unique(_) => Verdict::Wrong,
        Search::Ambiguous(_) => Verdict::Ambiguous,
        Search::Absent => Verdict::Absent,
    }
}

fn run_session(ctx: &Context, trial: usize, traced: bool) -> SessionOutcome {
    let cfg = ctx.cfg;
    let n = cfg.n;
    let nb = cfg.blocks;
    let key = derive(cfg.seed, trial as u64 + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let session = Session { ctx, book: ctx.codebooks.keyed(mix(key)) };
    let book = &session.book;
    let [_, n2, nw, nw3] = ctx.sizes;
    let mut trace = Vec::new();
    let mut record = |block: usize, stage: Stage, v: Verdict| {
        if traced {
            trace.push(TraceRow { trial, block, stage, verdict: v });
        }
    };

    // a_1, a_2 and the source blocks; index 0 holds the fixed sequences
    let mut pairs = Vec::with_capacity(nb + 1);
    let mut w = vec![Vec::new()];
    let mut w3 = vec![Vec::new()];
    let mut a = Pair { s1: Vec::with_capacity(n), s2: Vec::with_capacity(n) };
    for _ in 0..n {
        let c = ctx.pair.sample(0, rng.gen::<f64>());
        a.s1.push(c / n2);
        a.s2.push(c % n2);
    }
    pairs.push(a);
    for _ in 0..nb {
        let mut p = Pair { s1: Vec::with_capacity(n), s2: Vec::with_capacity(n) };
        let (mut wb, mut w3b) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            let c = ctx.source.sample(0, rng.gen::<f64>());
            let (rest, v3) = (c / nw3, c % nw3);
            let (rest, v) = (rest / nw, rest % nw);
            p.s1.push(rest / n2);
            p.s2.push(rest % n2);
            wb.push(v);
            w3b.push(v3);
        }
        pairs.push(p);
        w.push(wb);
        w3.push(w3b);
    }
    let bins: Vec<(usize, usize)> = (0..=nb + 1)
        .map(|b| if b == 0 || b == nb + 1 { (0, 0) } else { (book.bin1(&pairs[b].s1), book.bin2(&pairs[b].s2)) })
        .collect();

    // channel blocks 1..=B+1 with relay decoding of blocks 1..=B
    let [_, a2, a3] = ctx.x_sizes;
    let mut relay_est = vec![pairs[0].clone()];
    let mut ys = vec![Vec::new()];
    let mut relay_failed_at: Option<usize> = None;
    for b in 1..=nb + 1 {
        let prev_true = &pairs[b - 1];
        let prev_est = &relay_est[b - 1];
        let x1 = book.x1_word(bins[b].0, &prev_true.s1);
        let x2 = book.x2_word(bins[b].1, &prev_true.s2);
        let x3 = book.x3_word(&prev_est.s1, &prev_est.s2);
        let mut y = Vec::with_capacity(n);
        let mut y3 = Vec::with_capacity(n);
        for k in 0..n {
            let row = (x1[k] * a2 + x2[k]) * a3 + x3[k];
            let c = ctx.channel.sample(row, rng.gen::<f64>());
            y.push(c / ctx.y3_size);
            y3.push(c % ctx.y3_size);
        }
        ys.push(y);
        if b > nb {
            break;
        }
        let bin_search = session.decode_bins(prev_est, &y3);
        let bin_verdict = verdict(&bin_search, &bins[b]);
        let est_bins = match bin_search {
            Search::Unique(u) | Search::Ambiguous(u) => u,
            Search::Absent => (0, 0),
        };
        let src_search = session.decode_source(est_bins, &w3[b]);
        let src_verdict = verdict(&src_search, &pairs[b]);
        let est = match src_search {
            Search::Unique(p) | Search::Ambiguous(p) => p,
            Search::Absent => pairs[0].clone(),
        };
        if relay_failed_at.is_some() {
            record(b, Stage::RelayBins, Verdict::Skipped);
            record(b, Stage::RelaySource, Verdict::Skipped);
        } else {
            record(b, Stage::RelayBins, bin_verdict);
            record(b, Stage::RelaySource, src_verdict);
            if src_verdict != Verdict::Correct || est != pairs[b] {
                relay_failed_at = Some(b);
            }
        }
        relay_est.push(est);
    }
    let relay_errors = relay_failed_at.map_or(0, |b| (nb + 1 - b) as u64);

    // backward decoding at the destination
    let mut dest_errors = 0;
    let mut next_bins = (0, 0);
    for b in (1..=nb).rev() {
        let search = session.decode_destination(next_bins, &w[b], &ys[b + 1]);
        let v = verdict(&search, &pairs[b]);
        record(b, Stage::Destination, v);
        match search {
            Search::Unique(p) if v == Verdict::Correct => {
                next_bins = (book.bin1(&p.s1), book.bin2(&p.s2));
            }
            _ => {
                dest_errors = b as u64;
                for earlier in (1..b).rev() {
                    record(earlier, Stage::Destination, Verdict::Skipped);
                }
                break;
            }
        }
    }
    SessionOutcome { relay_errors, dest_errors, trace }
}

fn run(
    source: &SourceModel,
    channel: &ChannelModel,
    chain: &Thm2Chain,
    cfg: SimConfig,
    traced: bool,
) -> Result<(SimReport, Vec<TraceRow>)> {
    let ctx = Context::new(source, channel, chain, cfg)?;
    let outcomes: Vec<SessionOutcome> = (0..cfg.trials).into_par_iter().map(|t| run_session(&ctx, t, traced)).collect();
    let mut report = SimReport {
        trials: cfg.trials,
        blocks: cfg.blocks,
        relay_block_errors: 0,
        dest_block_errors: 0,
        session_errors: 0,
        dest_session_errors: 0,
    };
    let mut trace = Vec::new();
    for o in outcomes {
        report.relay_block_errors += o.relay_errors;
        report.dest_block_errors += o.dest_errors;
        report.session_errors += u64::from(o.relay_errors > 0 || o.dest_errors > 0);
        report.dest_session_errors += u64::from(o.dest_errors > 0);
        trace.extend(o.trace);
    }
    Ok((report, trace))
}

/// Simulates `cfg.trials` independent sessions. Each session draws its own
/// codebook and sources from a key derived from `cfg.seed` and the session
/// index, so the report does not depend on the thread count.
pub fn run_thm2_sim(
    source: &SourceModel,
    channel: &ChannelModel,
    chain: &Thm2Chain,
    cfg: SimConfig,
) -> Result<SimReport> {
    run(source, channel, chain, cfg, false).map(|r| r.0)
}

/// As [`run_thm2_sim`], also returning one row per decoding step.
pub fn run_thm2_sim_traced(
    source: &SourceModel,
    channel: &ChannelModel,
    chain: &Thm2Chain,
    cfg: SimConfig,
) -> Result<(SimReport, Vec<TraceRow>)> {
    run(source, channel, chain, cfg, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UncodedReport {
    pub samples: u64,
    pub errors: u64,
}

impl UncodedReport {
    pub fn error_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.errors as f64 / self.samples as f64
        }
    }

    pub fn wilson_interval(&self) -> (f64, f64) {
        wilson(self.errors, self.samples, Z95)
    }
}

/// Destination rule for the uncoded scheme: `YS = s1 + s2` identifies the
/// pair because `(1, 0)` never occurs.
pub fn cpm_decode(ys: usize) -> (usize, usize) {
    match ys {
        0 => (0, 0),
        1 => (0, 1),
        _ => (1, 1),
    }
}

const CPM_CHUNK: u64 = 1 << 16;

/// Sends `X1 = S1`, `X2 = S2` over the semi-orthogonal example channel and
/// decodes each letter from `YS` alone.
pub fn run_uncoded_cpm_somarc(trials: u64, seed: u64) -> UncodedReport {
    let (source, channel) = somarc_example::<f64>();
    let pair = source.pmf().marginalize(&[S1, S2]).expect("example source has S1, S2");
    let src = RowSampler::new(pair.probs(), pair.len());
    let ch = RowSampler::from_kernel(channel.kernel());
    let [ns, n3] = [3, channel.output_sizes()[1]];
    let chunks = trials.div_ceil(CPM_CHUNK);
    let errors: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CPM_CHUNK.min(trials - c * CPM_CHUNK);
            let mut errors = 0;
            for _ in 0..len {
                let s = src.sample(0, rng.gen::<f64>());
                let (s1, s2) = (s / 2, s % 2);
                let row = (s1 * 2 + s2) * 2;
                let out = ch.sample(row, rng.gen::<f64>());
                let ys = (out / n3) % ns;
                if cpm_decode(ys) != (s1, s2) {
                    errors += 1;
                }
            }
            errors
        })
        .sum();
    UncodedReport { samples: trials, errors }
}
