//! Scenario files: TOML documents describing a source, a channel, an
//! optional input chain and optional simulation settings.
//!
//! ```toml
//! preset = "somarc-eq3"          # or explicit [source] and [channel]
//!
//! [chain]
//! family = "thm2"                # thm1 | thm2 | separation | product
//! preset = "cpm-identity"        # or "uniform", "optimize", or explicit rows
//!
//! [sim]
//! n = 8
//! blocks = 2
//! ```

use std::path::Path;

use marc_core::distopt::{Family, ParamChain, Scenario};
use marc_core::infotheory::{Kernel, Variable};
use marc_core::network::{
    crbc_specialize, deterministic_channel, deterministic_somarc_channel, somarc_example, ChannelModel, InputChain,
    SourceModel, SymbolMap, Thm2Chain, X1, X2, X3, Y, Y3, YR, YS,
};
use marc_core::sim::{SimConfig, Slack, DEFAULT_SEED};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exit::{CliError, ExitCode};

pub const SOMARC_PRESET: &str = "somarc-eq3";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Alphabet sizes of `(S1, S2, W, W3)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub at: Vec<usize>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Alphabet sizes of `(X1, X2, X3)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<[usize; 3]>,
    /// Deterministic destination output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<MapSpec>,
    /// Deterministic semi-orthogonal destination outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yr: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ys: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y3: Option<MapSpec>,
    /// Explicit kernel: one row per input tuple over `(y, y3)` row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y3_size: Option<usize>,
    /// `[|YR|, |YS|]` when the explicit kernel is semi-orthogonal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub somarc: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub size: usize,
    pub table: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_sizes: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v2: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x3: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `absolute` or `strong`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<String>,
}

/// How the input distribution is chosen.
#[derive(Debug, Clone)]
pub enum ChainChoice {
    Fixed(InputChain),
    Optimize(Family),
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub file: ScenarioFile,
    pub digest: String,
    pub source: SourceModel,
    pub channel: ChannelModel,
    pub chain: Option<ChainChoice>,
    pub v_sizes: [usize; 2],
    pub sim: SimConfig,
}

impl Loaded {
    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.source.clone(), self.channel.clone()).with_v_sizes(self.v_sizes)
    }
}

fn malformed(msg: impl Into<String>) -> CliError {
    CliError::new(ExitCode::Malformed, msg)
}

fn unknown_preset(field: &str, name: &str) -> CliError {
    CliError::new(ExitCode::UnknownPreset, format!("{field}: unknown preset \"{name}\""))
}

/// Errors raised while building models from the file. Probability-table
/// problems get their own exit code, everything else is a schema error.
fn model_error(field: &str, e: marc_core::Error) -> CliError {
    use marc_core::Error as E;
    let code = match e {
        E::NotNormalized { .. } | E::NegativeProbability { .. } | E::NonFinite(_) => ExitCode::Normalization,
        _ => ExitCode::Malformed,
    };
    CliError::new(code, format!("{field}: {e}"))
}

pub fn parse_str(text: &str) -> Result<ScenarioFile, CliError> {
    toml::from_str(text).map_err(|e| malformed(format!("scenario: {e}")))
}

pub fn read_file(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(ExitCode::Io, format!("cannot read {}: {e}", path.display())))?;
    parse_str(&text)
}

/// SHA-256 of the scenario as canonical JSON (object keys sorted), so the
/// order of fields in the file does not matter.
pub fn digest(file: &ScenarioFile) -> String {
    let value = serde_json::to_value(file).expect("scenario serializes");
    let canonical = serde_json::to_string(&value).expect("json value serializes");
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// Scenario consisting of a single top-level preset.
pub fn preset_file(name: &str) -> ScenarioFile {
    ScenarioFile { preset: Some(name.to_string()), ..ScenarioFile::default() }
}

pub fn load(file: ScenarioFile) -> Result<Loaded, CliError> {
    let (preset_source, preset_channel) = match file.preset.as_deref() {
        None => (None, None),
        Some(SOMARC_PRESET) => {
            let (s, c) = somarc_example::<f64>();
            (Some(s), Some(c))
        }
        Some(other) => return Err(unknown_preset("preset", other)),
    };
    let source = match (&file.source, preset_source) {
        (Some(spec), None) => build_source(spec)?,
        (None, Some(s)) => s,
        (Some(_), Some(_)) => return Err(malformed("source: given both by the top-level preset and a [source] table")),
        (None, None) => return Err(malformed("source: missing [source] table")),
    };
    let channel = match (&file.channel, preset_channel) {
        (Some(spec), None) => build_channel(spec)?,
        (None, Some(c)) => c,
        (Some(_), Some(_)) => {
            return Err(malformed("channel: given both by the top-level preset and a [channel] table"))
        }
        (None, None) => return Err(malformed("channel: missing [channel] table")),
    };
    let v_sizes = file.chain.as_ref().and_then(|c| c.v_sizes).unwrap_or([marc_core::network::DEFAULT_V_SIZE; 2]);
    if v_sizes.contains(&0) {
        return Err(malformed("chain.v_sizes: alphabet sizes must be at least 1"));
    }
    let chain = match &file.chain {
        None => None,
        Some(spec) => Some(build_chain(spec, &source, &channel, v_sizes)?),
    };
    let sim = build_sim(file.sim.as_ref().cloned().unwrap_or_default())?;
    Ok(Loaded { digest: digest(&file), file, source, channel, chain, v_sizes, sim })
}

fn build_source(spec: &SourceSpec) -> Result<SourceModel, CliError> {
    if let Some(p) = &spec.preset {
        if spec.sizes.is_some() || spec.entries.is_some() {
            return Err(malformed("source: preset cannot be combined with sizes or entries"));
        }
        return match p.as_str() {
            SOMARC_PRESET => Ok(somarc_example::<f64>().0),
            other => Err(unknown_preset("source.preset", other)),
        };
    }
    let sizes = spec.sizes.ok_or_else(|| malformed("source.sizes: missing"))?;
    let entries = spec.entries.as_ref().ok_or_else(|| malformed("source.entries: missing"))?;
    let mut flat = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let at: [usize; 4] =
            e.at.as_slice()
                .try_into()
                .map_err(|_| malformed(format!("source.entries[{i}].at: expected 4 symbols (S1, S2, W, W3)")))?;
        flat.push((at, e.p));
    }
    SourceModel::from_entries(sizes, &flat).map_err(|e| model_error("source", e))
}

fn build_channel(spec: &ChannelSpec) -> Result<ChannelModel, CliError> {
    if let Some(p) = &spec.preset {
        return match p.as_str() {
            SOMARC_PRESET => Ok(somarc_example::<f64>().1),
            other => Err(unknown_preset("channel.preset", other)),
        };
    }
    let inputs = spec.inputs.ok_or_else(|| malformed("channel.inputs: missing"))?;
    let map = |m: &MapSpec| SymbolMap { size: m.size, table: m.table.clone() };
    if let Some(rows) = &spec.rows {
        let y3 = spec.y3_size.ok_or_else(|| malformed("channel.y3_size: missing"))?;
        let xs = vec![Variable::new(X1, inputs[0]), Variable::new(X2, inputs[1]), Variable::new(X3, inputs[2])];
        let (yvar, somarc) = match (spec.somarc, spec.y_size) {
            (Some([r, s]), None) => (Variable::pair(Y, (YR, r), (YS, s)), true),
            (None, Some(n)) => (Variable::new(Y, n), false),
            (Some(_), Some(_)) => return Err(malformed("channel: give either y_size or somarc, not both")),
            (None, None) => return Err(malformed("channel.y_size: missing")),
        };
        let kernel = Kernel::from_rows(xs, vec![yvar, Variable::new(Y3, y3)], rows.clone())
            .map_err(|e| model_error("channel.rows", e))?;
        let ch = if somarc { ChannelModel::somarc(kernel) } else { ChannelModel::new(kernel) };
        return ch.map_err(|e| model_error("channel", e));
    }
    let y3 = spec.y3.as_ref().ok_or_else(|| malformed("channel.y3: missing"))?;
    match (&spec.y, &spec.yr, &spec.ys) {
        (Some(y), None, None) => deterministic_channel(inputs, &map(y), &map(y3)),
        (None, Some(yr), Some(ys)) => deterministic_somarc_channel(inputs, &map(yr), &map(ys), &map(y3)),
        _ => return Err(malformed("channel: give either y, or both yr and ys")),
    }
    .map_err(|e| model_error("channel", e))
}

fn parse_family(name: &str) -> Result<Family, CliError> {
    match name {
        "thm1" => Ok(Family::Thm1),
        "thm2" => Ok(Family::Thm2),
        "separation" => Ok(Family::Separation),
        "product" => Ok(Family::ProductInputs),
        other => Err(malformed(format!(
            "chain.family: unknown family \"{other}\" (expected thm1, thm2, separation or product)"
        ))),
    }
}

fn build_chain(
    spec: &ChainSpec,
    source: &SourceModel,
    channel: &ChannelModel,
    v_sizes: [usize; 2],
) -> Result<ChainChoice, CliError> {
    let family = parse_family(&spec.family)?;
    let has_tables =
        spec.v1.is_some() || spec.v2.is_some() || spec.x1.is_some() || spec.x2.is_some() || spec.x3.is_some();
    let scenario = Scenario::new(source.clone(), channel.clone()).with_v_sizes(v_sizes);
    if let Some(p) = &spec.preset {
        if has_tables {
            return Err(malformed("chain: preset cannot be combined with explicit tables"));
        }
        return match p.as_str() {
            "optimize" => Ok(ChainChoice::Optimize(family)),
            "uniform" => ParamChain::uniform(family, &scenario)
                .to_chain(&scenario)
                .map(ChainChoice::Fixed)
                .map_err(|e| model_error("chain", e)),
            "cpm-identity" => {
                if family != Family::Thm2 {
                    return Err(malformed("chain.preset: cpm-identity needs family = \"thm2\""));
                }
                let [s1, s2, _, _] = source.sizes();
                let [a1, a2, a3] = channel.input_sizes();
                if a1 != s1 || a2 != s2 {
                    return Err(malformed(format!(
                        "chain.preset: cpm-identity needs |X1| = |S1| and |X2| = |S2| (got {a1}, {a2} for {s1}, {s2})"
                    )));
                }
                Thm2Chain::cpm_identity([s1, s2], a3)
                    .map(|c| ChainChoice::Fixed(InputChain::Thm2(c)))
                    .map_err(|e| model_error("chain", e))
            }
            other => Err(unknown_preset("chain.preset", other)),
        };
    }
    // explicit tables, flattened into parameter blocks in chain order
    let rows =
        |name: &str, v: &Option<Vec<Vec<f64>>>| v.clone().ok_or_else(|| malformed(format!("chain.{name}: missing")));
    let single =
        |name: &str, v: &Option<Vec<f64>>| v.clone().ok_or_else(|| malformed(format!("chain.{name}: missing")));
    let mut blocks: Vec<Vec<f64>> = Vec::new();
    match family {
        Family::Thm1 | Family::Separation => {
            blocks.push(single("v1", &spec.v1)?);
            blocks.extend(rows("x1", &spec.x1)?);
            blocks.push(single("v2", &spec.v2)?);
            blocks.extend(rows("x2", &spec.x2)?);
            blocks.extend(rows("x3", &spec.x3)?);
        }
        Family::Thm2 => {
            blocks.extend(rows("x1", &spec.x1)?);
            blocks.extend(rows("x2", &spec.x2)?);
            blocks.extend(rows("x3", &spec.x3)?);
        }
        Family::ProductInputs => {
            for (name, v) in [("x1", &spec.x1), ("x2", &spec.x2), ("x3", &spec.x3)] {
                let mut r = rows(name, v)?;
                if r.len() != 1 {
                    return Err(malformed(format!("chain.{name}: product inputs take exactly one row")));
                }
                blocks.push(r.remove(0));
            }
        }
    }
    let param = ParamChain { family, blocks };
    let layout = scenario.layout(family);
    if param.dims() != layout {
        return Err(malformed(format!(
            "chain: row lengths {:?} do not match the {} layout {:?} for these alphabets",
            param.dims(),
            spec.family,
            layout
        )));
    }
    param.to_chain(&scenario).map(ChainChoice::Fixed).map_err(|e| model_error("chain", e))
}

fn build_sim(spec: SimSpec) -> Result<SimConfig, CliError> {
    let d = SimConfig::default();
    let slack = match spec.slack.as_deref() {
        None | Some("absolute") => Slack::Absolute,
        Some("strong") => Slack::Strong,
        Some(other) => return Err(malformed(format!("sim.slack: expected absolute or strong, got \"{other}\""))),
    };
    Ok(SimConfig {
        n: spec.n.unwrap_or(d.n),
        blocks: spec.blocks.unwrap_or(d.blocks),
        rate1: spec.rate1.unwrap_or(d.rate1),
        rate2: spec.rate2.unwrap_or(d.rate2),
        epsilon: spec.epsilon.unwrap_or(d.epsilon),
        trials: spec.trials.unwrap_or(d.trials),
        seed: spec.seed.unwrap_or(DEFAULT_SEED),
        slack,
    })
}

/// The single-source special case of a loaded scenario.
pub fn crbc_view(loaded: &Loaded) -> Result<(SourceModel, ChannelModel), CliError> {
    crbc_specialize(&loaded.source, &loaded.channel)
        .map_err(|e| CliError::new(ExitCode::Mismatch, format!("crbc: {e}")))
}
