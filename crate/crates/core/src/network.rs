//! Sources, channels and input-distribution chains for multiple-access relay
//! networks, and assembly of the full joint distribution.
//!
//! Every role has a fixed variable name (`S1`, `S2`, `W`, `W3`, `V1`, `V2`,
//! `X1`, `X2`, `X3`, `Y`, `Y3`). Absent roles are singleton alphabets, so the
//! same code path serves the MARC, MABRC, relay broadcast and plain MAC cases.
//! For a semi-orthogonal channel the destination output `Y` is the product
//! variable `(YR, YS)`.

use crate::infotheory::{JointPmf, Kernel, Variable};
use crate::{Error, Real, Result};

pub const S1: &str = "S1";
pub const S2: &str = "S2";
pub const W: &str = "W";
pub const W3: &str = "W3";
pub const V1: &str = "V1";
pub const V2: &str = "V2";
pub const X1: &str = "X1";
pub const X2: &str = "X2";
pub const X3: &str = "X3";
pub const Y: &str = "Y";
pub const Y3: &str = "Y3";
pub const YR: &str = "YR";
pub const YS: &str = "YS";

pub const SOURCE_VARS: [&str; 4] = [S1, S2, W, W3];
/// Axis order of every assembled joint (variables a chain does not use are
/// simply missing).
pub const CANONICAL_ORDER: [&str; 11] = [S1, S2, W, W3, V1, V2, X1, X2, X3, Y, Y3];

/// Default alphabet size of the auxiliary variables `V1`, `V2`.
pub const DEFAULT_V_SIZE: usize = 2;

fn expect_names(what: &str, vars: &[Variable], names: &[&str]) -> Result<()> {
    let got: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
    if got != names {
        return Err(Error::InvalidConfig(format!("{what}: expected variables {names:?}, got {got:?}")));
    }
    Ok(())
}

fn expect_kernel<T: Real>(what: &str, k: &Kernel<T>, given: &[&str], output: &[&str]) -> Result<()> {
    expect_names(&format!("{what} conditioning"), k.given(), given)?;
    expect_names(&format!("{what} output"), k.output(), output)
}

/// Joint law `p(s1, s2, w, w3)` of the sources and side information.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel<T: Real = f64> {
    pmf: JointPmf<T>,
}

impl<T: Real> SourceModel<T> {
    pub fn new(pmf: JointPmf<T>) -> Result<Self> {
        expect_names("source", pmf.variables(), &SOURCE_VARS)?;
        Ok(SourceModel { pmf })
    }

    /// `sizes` are the alphabet sizes of `(S1, S2, W, W3)`.
    pub fn from_entries(sizes: [usize; 4], entries: &[([usize; 4], T)]) -> Result<Self> {
        let vars = SOURCE_VARS.iter().zip(sizes).map(|(n, s)| Variable::new(*n, s)).collect();
        let entries: Vec<(Vec<usize>, T)> = entries.iter().map(|(a, p)| (a.to_vec(), *p)).collect();
        Self::new(JointPmf::from_entries(vars, &entries)?)
    }

    /// Deterministic sources: every variable is the symbol in `at`.
    pub fn point_mass(sizes: [usize; 4], at: [usize; 4]) -> Result<Self> {
        Self::from_entries(sizes, &[(at, T::one())])
    }

    pub fn pmf(&self) -> &JointPmf<T> {
        &self.pmf
    }

    pub fn sizes(&self) -> [usize; 4] {
        let s = self.pmf.shape();
        [s[0], s[1], s[2], s[3]]
    }
}

/// Memoryless one-letter channel `p(y, y3 | x1, x2, x3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel<T: Real = f64> {
    kernel: Kernel<T>,
    somarc: bool,
}

impl<T: Real> ChannelModel<T> {
    pub fn new(kernel: Kernel<T>) -> Result<Self> {
        expect_kernel("channel", &kernel, &[X1, X2, X3], &[Y, Y3])?;
        Ok(ChannelModel { kernel, somarc: false })
    }

    /// Semi-orthogonal channel: `Y` must be the pair `(YR, YS)` and the law must
    /// factor as `p(yR | x3) p(yS, y3 | x1, x2)`.
    pub fn somarc(kernel: Kernel<T>) -> Result<Self> {
        let mut ch = Self::new(kernel)?;
        ch.check_somarc_factorization()?;
        ch.somarc = true;
        Ok(ch)
    }

    fn check_somarc_factorization(&self) -> Result<()> {
        let y = &self.kernel.output()[0];
        let parts: Vec<&str> = y.parts.iter().map(|p| p.0.as_str()).collect();
        if parts != [YR, YS] {
            return Err(Error::NotSomarc("destination output is not the pair (YR, YS)".into()));
        }
        let (nr, ns) = (y.parts[0].1, y.parts[1].1);
        let n3 = self.kernel.output()[1].size;
        let [a1, a2, a3] = self.input_sizes();
        let tol = T::norm_tol();
        let split = |row: &[T]| {
            let mut pr = vec![T::zero(); nr];
            let mut psy = vec![T::zero(); ns * n3];
            for r in 0..nr {
                for j in 0..ns * n3 {
                    let p = row[r * ns * n3 + j];
                    pr[r] += p;
                    psy[j] += p;
                }
            }
            (pr, psy)
        };
        let close = |a: &[T], b: &[T]| a.iter().zip(b).all(|(x, y)| (*x - *y).abs() <= tol);
        for x1 in 0..a1 {
            for x2 in 0..a2 {
                for x3 in 0..a3 {
                    let row = self.kernel.row_for(&[x1, x2, x3]);
                    let (pr, psy) = split(row);
                    for r in 0..nr {
                        for j in 0..ns * n3 {
                            if (row[r * ns * n3 + j] - pr[r] * psy[j]).abs() > tol {
                                return Err(Error::NotSomarc(format!(
                                    "output does not factor at input ({x1},{x2},{x3})"
                                )));
                            }
                        }
                    }
                    let (pr0, _) = split(self.kernel.row_for(&[0, 0, x3]));
                    let (_, psy0) = split(self.kernel.row_for(&[x1, x2, 0]));
                    if !close(&pr, &pr0) {
                        return Err(Error::NotSomarc(format!("p(yR | x) depends on (x1, x2) at x3 = {x3}")));
                    }
                    if !close(&psy, &psy0) {
                        return Err(Error::NotSomarc(format!(
                            "p(yS, y3 | x) depends on x3 at (x1, x2) = ({x1}, {x2})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    pub fn is_somarc(&self) -> bool {
        self.somarc
    }

    pub fn input_sizes(&self) -> [usize; 3] {
        let g = self.kernel.given_shape();
        [g[0], g[1], g[2]]
    }

    pub fn output_sizes(&self) -> [usize; 2] {
        let o = self.kernel.output_shape();
        [o[0], o[1]]
    }
}

/// Output symbol per input tuple, indexed row-major by `(x1, x2, x3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolMap {
    pub size: usize,
    pub table: Vec<usize>,
}

impl SymbolMap {
    pub fn from_fn(inputs: [usize; 3], size: usize, f: impl Fn(usize, usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(inputs.iter().product());
        for x1 in 0..inputs[0] {
            for x2 in 0..inputs[1] {
                for x3 in 0..inputs[2] {
                    table.push(f(x1, x2, x3));
                }
            }
        }
        SymbolMap { size, table }
    }

    fn check(&self, name: &str, rows: usize) -> Result<()> {
        if self.table.len() != rows {
            return Err(Error::LengthMismatch { expected: rows, got: self.table.len() });
        }
        if let Some(&bad) = self.table.iter().find(|&&s| s >= self.size) {
            return Err(Error::SymbolOutOfRange { name: name.to_string(), symbol: bad, size: self.size });
        }
        Ok(())
    }
}

fn input_vars(inputs: [usize; 3]) -> Vec<Variable> {
    vec![Variable::new(X1, inputs[0]), Variable::new(X2, inputs[1]), Variable::new(X3, inputs[2])]
}

/// Channel whose outputs are fixed functions of the inputs.
pub fn deterministic_channel<T: Real>(inputs: [usize; 3], y: &SymbolMap, y3: &SymbolMap) -> Result<ChannelModel<T>> {
    let rows: usize = inputs.iter().product();
    y.check(Y, rows)?;
    y3.check(Y3, rows)?;
    let shape = inputs;
    let kernel =
        Kernel::deterministic(input_vars(inputs), vec![Variable::new(Y, y.size), Variable::new(Y3, y3.size)], |g| {
            let r = (g[0] * shape[1] + g[1]) * shape[2] + g[2];
            vec![y.table[r], y3.table[r]]
        })?;
    ChannelModel::new(kernel)
}

/// Deterministic semi-orthogonal channel with destination output `(YR, YS)`.
pub fn deterministic_somarc_channel<T: Real>(
    inputs: [usize; 3],
    yr: &SymbolMap,
    ys: &SymbolMap,
    y3: &SymbolMap,
) -> Result<ChannelModel<T>> {
    let rows: usize = inputs.iter().product();
    yr.check(YR, rows)?;
    ys.check(YS, rows)?;
    y3.check(Y3, rows)?;
    let shape = inputs;
    let kernel = Kernel::deterministic(
        input_vars(inputs),
        vec![Variable::pair(Y, (YR, yr.size), (YS, ys.size)), Variable::new(Y3, y3.size)],
        |g| {
            let r = (g[0] * shape[1] + g[1]) * shape[2] + g[2];
            vec![yr.table[r] * ys.size + ys.table[r], y3.table[r]]
        },
    )?;
    ChannelModel::somarc(kernel)
}

/// The binary semi-orthogonal example: `YR = X3`, `Y3 = X1 xor X2`,
/// `YS = X1 + X2`, with sources uniform on `{(0,0), (0,1), (1,1)}` and no side
/// information.
pub fn somarc_example<T: Real>() -> (SourceModel<T>, ChannelModel<T>) {
    let third = T::one() / T::lit(3.0);
    let source =
        SourceModel::from_entries([2, 2, 1, 1], &[([0, 0, 0, 0], third), ([0, 1, 0, 0], third), ([1, 1, 0, 0], third)])
            .expect("example source is valid");
    let inputs = [2, 2, 2];
    let channel = deterministic_somarc_channel(
        inputs,
        &SymbolMap::from_fn(inputs, 2, |_, _, x3| x3),
        &SymbolMap::from_fn(inputs, 3, |x1, x2, _| x1 + x2),
        &SymbolMap::from_fn(inputs, 2, |x1, x2, _| x1 ^ x2),
    )
    .expect("example channel is valid");
    (source, channel)
}

/// Single-source relay broadcast special case: `S2` and `X2` become absent.
/// The second source is summed out and the channel is restricted to `x2 = 0`.
pub fn crbc_specialize<T: Real>(
    source: &SourceModel<T>,
    channel: &ChannelModel<T>,
) -> Result<(SourceModel<T>, ChannelModel<T>)> {
    let pmf = source.pmf().marginalize(&[S1, W, W3])?.insert_singleton(S2, 1)?;
    let kernel = channel.kernel().restrict_given(X2, 0)?;
    let channel = if channel.is_somarc() { ChannelModel::somarc(kernel)? } else { ChannelModel::new(kernel)? };
    Ok((SourceModel::new(pmf)?, channel))
}

fn pmf_kernel<T: Real>(name: &str, probs: Vec<T>) -> Result<Kernel<T>> {
    let n = probs.len();
    Kernel::new(Vec::new(), vec![Variable::new(name, n)], probs)
}

fn cond_kernel<T: Real>(given: &[(&str, usize)], out: (&str, usize), rows: Vec<Vec<T>>) -> Result<Kernel<T>> {
    Kernel::from_rows(
        given.iter().map(|(n, s)| Variable::new(*n, *s)).collect(),
        vec![Variable::new(out.0, out.1)],
        rows,
    )
}

/// Chain `p(v1) p(x1|s1,v1) p(v2) p(x2|s2,v2) p(x3|v1,v2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Thm1Chain<T: Real = f64> {
    pub v1: Kernel<T>,
    pub x1: Kernel<T>,
    pub v2: Kernel<T>,
    pub x2: Kernel<T>,
    pub x3: Kernel<T>,
}

impl<T: Real> Thm1Chain<T> {
    pub fn new(v1: Kernel<T>, x1: Kernel<T>, v2: Kernel<T>, x2: Kernel<T>, x3: Kernel<T>) -> Result<Self> {
        expect_kernel("p(v1)", &v1, &[], &[V1])?;
        expect_kernel("p(x1|s1,v1)", &x1, &[S1, V1], &[X1])?;
        expect_kernel("p(v2)", &v2, &[], &[V2])?;
        expect_kernel("p(x2|s2,v2)", &x2, &[S2, V2], &[X2])?;
        expect_kernel("p(x3|v1,v2)", &x3, &[V1, V2], &[X3])?;
        Ok(Thm1Chain { v1, x1, v2, x2, x3 })
    }

    /// Rows are listed row-major over the conditioning variables.
    #[allow(clippy::too_many_arguments)]
    pub fn from_tables(
        s_sizes: [usize; 2],
        v_sizes: [usize; 2],
        x_sizes: [usize; 3],
        v1: Vec<T>,
        x1: Vec<Vec<T>>,
        v2: Vec<T>,
        x2: Vec<Vec<T>>,
        x3: Vec<Vec<T>>,
    ) -> Result<Self> {
        Self::new(
            pmf_kernel(V1, v1)?,
            cond_kernel(&[(S1, s_sizes[0]), (V1, v_sizes[0])], (X1, x_sizes[0]), x1)?,
            pmf_kernel(V2, v2)?,
            cond_kernel(&[(S2, s_sizes[1]), (V2, v_sizes[1])], (X2, x_sizes[1]), x2)?,
            cond_kernel(&[(V1, v_sizes[0]), (V2, v_sizes[1])], (X3, x_sizes[2]), x3)?,
        )
    }

    pub fn v_sizes(&self) -> [usize; 2] {
        [self.v1.cols(), self.v2.cols()]
    }
}

/// Chain `p(x1|s1) p(x2|s2) p(x3|s1,s2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Thm2Chain<T: Real = f64> {
    pub x1: Kernel<T>,
    pub x2: Kernel<T>,
    pub x3: Kernel<T>,
}

impl<T: Real> Thm2Chain<T> {
    pub fn new(x1: Kernel<T>, x2: Kernel<T>, x3: Kernel<T>) -> Result<Self> {
        expect_kernel("p(x1|s1)", &x1, &[S1], &[X1])?;
        expect_kernel("p(x2|s2)", &x2, &[S2], &[X2])?;
        expect_kernel("p(x3|s1,s2)", &x3, &[S1, S2], &[X3])?;
        Ok(Thm2Chain { x1, x2, x3 })
    }

    pub fn from_tables(
        s_sizes: [usize; 2],
        x_sizes: [usize; 3],
        x1: Vec<Vec<T>>,
        x2: Vec<Vec<T>>,
        x3: Vec<Vec<T>>,
    ) -> Result<Self> {
        Self::new(
            cond_kernel(&[(S1, s_sizes[0])], (X1, x_sizes[0]), x1)?,
            cond_kernel(&[(S2, s_sizes[1])], (X2, x_sizes[1]), x2)?,
            cond_kernel(&[(S1, s_sizes[0]), (S2, s_sizes[1])], (X3, x_sizes[2]), x3)?,
        )
    }

    /// Uncoded mapping `X1 = S1`, `X2 = S2`, `X3 = 0`.
    pub fn cpm_identity(s_sizes: [usize; 2], x3_size: usize) -> Result<Self> {
        let v = |n: &str, s: usize| Variable::new(n, s);
        Self::new(
            Kernel::deterministic(vec![v(S1, s_sizes[0])], vec![v(X1, s_sizes[0])], |g| vec![g[0]])?,
            Kernel::deterministic(vec![v(S2, s_sizes[1])], vec![v(X2, s_sizes[1])], |g| vec![g[0]])?,
            Kernel::deterministic(vec![v(S1, s_sizes[0]), v(S2, s_sizes[1])], vec![v(X3, x3_size)], |_| vec![0])?,
        )
    }
}

/// Chain `p(v1) p(x1|v1) p(v2) p(x2|v2) p(x3|v1,v2)`: inputs carry no source
/// information beyond the auxiliaries.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationChain<T: Real = f64> {
    pub v1: Kernel<T>,
    pub x1: Kernel<T>,
    pub v2: Kernel<T>,
    pub x2: Kernel<T>,
    pub x3: Kernel<T>,
}

impl<T: Real> SeparationChain<T> {
    pub fn new(v1: Kernel<T>, x1: Kernel<T>, v2: Kernel<T>, x2: Kernel<T>, x3: Kernel<T>) -> Result<Self> {
        expect_kernel("p(v1)", &v1, &[], &[V1])?;
        expect_kernel("p(x1|v1)", &x1, &[V1], &[X1])?;
        expect_kernel("p(v2)", &v2, &[], &[V2])?;
        expect_kernel("p(x2|v2)", &x2, &[V2], &[X2])?;
        expect_kernel("p(x3|v1,v2)", &x3, &[V1, V2], &[X3])?;
        Ok(SeparationChain { v1, x1, v2, x2, x3 })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_tables(
        v_sizes: [usize; 2],
        x_sizes: [usize; 3],
        v1: Vec<T>,
        x1: Vec<Vec<T>>,
        v2: Vec<T>,
        x2: Vec<Vec<T>>,
        x3: Vec<Vec<T>>,
    ) -> Result<Self> {
        Self::new(
            pmf_kernel(V1, v1)?,
            cond_kernel(&[(V1, v_sizes[0])], (X1, x_sizes[0]), x1)?,
            pmf_kernel(V2, v2)?,
            cond_kernel(&[(V2, v_sizes[1])], (X2, x_sizes[1]), x2)?,
            cond_kernel(&[(V1, v_sizes[0]), (V2, v_sizes[1])], (X3, x_sizes[2]), x3)?,
        )
    }
}

/// Independent inputs `p(x1) p(x2) p(x3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductChain<T: Real = f64> {
    pub x1: Kernel<T>,
    pub x2: Kernel<T>,
    pub x3: Kernel<T>,
}

impl<T: Real> ProductChain<T> {
    pub fn new(x1: Vec<T>, x2: Vec<T>, x3: Vec<T>) -> Result<Self> {
        Ok(ProductChain { x1: pmf_kernel(X1, x1)?, x2: pmf_kernel(X2, x2)?, x3: pmf_kernel(X3, x3)? })
    }

    pub fn uniform(x_sizes: [usize; 3]) -> Result<Self> {
        let u = |n: usize| vec![T::one() / T::lit(n as f64); n];
        Self::new(u(x_sizes[0]), u(x_sizes[1]), u(x_sizes[2]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputChain<T: Real = f64> {
    Thm1(Thm1Chain<T>),
    Thm2(Thm2Chain<T>),
    Separation(SeparationChain<T>),
    Product(ProductChain<T>),
}

impl<T: Real> InputChain<T> {
    pub fn family_name(&self) -> &'static str {
        match self {
            InputChain::Thm1(_) => "thm1",
            InputChain::Thm2(_) => "thm2",
            InputChain::Separation(_) => "separation",
            InputChain::Product(_) => "product",
        }
    }

    /// Factors in the order they are composed onto the source.
    pub fn factors(&self) -> Vec<&Kernel<T>> {
        match self {
            InputChain::Thm1(c) => vec![&c.v1, &c.v2, &c.x1, &c.x2, &c.x3],
            InputChain::Separation(c) => vec![&c.v1, &c.v2, &c.x1, &c.x2, &c.x3],
            InputChain::Thm2(c) => vec![&c.x1, &c.x2, &c.x3],
            InputChain::Product(c) => vec![&c.x1, &c.x2, &c.x3],
        }
    }
}

/// Full joint `p(s1,s2,w,w3) * chain * p(y,y3|x1,x2,x3)` in canonical axis order.
pub fn assemble_joint<T: Real>(
    source: &SourceModel<T>,
    chain: &InputChain<T>,
    channel: &ChannelModel<T>,
) -> Result<JointPmf<T>> {
    let mut joint = source.pmf().clone();
    for k in chain.factors() {
        joint = joint.compose(k)?;
    }
    joint = joint.compose(channel.kernel())?;
    let order: Vec<&str> = CANONICAL_ORDER.iter().copied().filter(|n| joint.has(n)).collect();
    joint.permute(&order)
}
