//! One function per subcommand. Each returns a [`Report`]; `dispatch` times
//! it and renders the requested format.

use std::path::Path;
use std::time::{Duration, Instant};

use marc_core::distopt::{self, Budget, Family, Objective, OptResult, Scenario};
use marc_core::feasibility::{self, ConditionReport, CrbcStyle, Scheme};
use marc_core::network::{assemble_joint, InputChain, ProductChain, Thm2Chain, S1, S2, W, W3, X1, X2, X3, Y, Y3};
use marc_core::sim::{self, SimConfig, Slack, TraceRow, DEFAULT_SEED};
use marc_core::Pmf;
use serde_json::{json, Value};

use crate::exit::{command_error, CliError, ExitCode};
use crate::report::{self, emit, fixed, num, short, Report};
use crate::scenario::{self, ChainChoice, Loaded, SOMARC_PRESET};
use crate::{BoundArgs, CheckArgs, Command, Common, InfoArgs, OptimizeArgs, SearchArgs, SimulateArgs};

/// Trials of the uncoded simulation when `--trials` is not given.
pub const DEFAULT_UNCODED_TRIALS: u64 = 1_000_000;

/// Same tolerance as condition boundaries.
const BOUND_TOL: f64 = 1e-12;

pub fn dispatch(cmd: &Command) -> Result<String, CliError> {
    let start = Instant::now();
    let mut report = match cmd {
        Command::Info(a) => info(a)?,
        Command::Check(a) => check(a)?,
        Command::Bound(a) => bound(a)?,
        Command::Optimize(a) => optimize(a)?,
        Command::Simulate(a) => simulate(a)?,
    };
    report.elapsed = start.elapsed();
    Ok(emit(&report, cmd.common().format))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::new(ExitCode::Usage, msg)
}

fn mismatch(msg: impl Into<String>) -> CliError {
    CliError::new(ExitCode::Mismatch, msg)
}

fn load(common: &Common) -> Result<Loaded, CliError> {
    let file = match (&common.scenario, &common.preset) {
        (Some(path), _) => scenario::read_file(path)?,
        (None, Some(name)) => scenario::preset_file(name),
        (None, None) => return Err(usage("give --scenario PATH or --preset NAME")),
    };
    scenario::load(file)
}

fn parse_scheme(name: &str) -> Result<Scheme, CliError> {
    Scheme::from_name(name).ok_or_else(|| {
        let known: Vec<&str> = Scheme::ALL.iter().map(|s| s.name()).collect();
        usage(format!("unknown scheme \"{name}\" (expected one of {})", known.join(", ")))
    })
}

fn parse_family(name: &str) -> Result<Family, CliError> {
    match name {
        "thm1" => Ok(Family::Thm1),
        "thm2" => Ok(Family::Thm2),
        "separation" => Ok(Family::Separation),
        "product" => Ok(Family::ProductInputs),
        _ => Err(usage(format!("unknown family \"{name}\" (expected thm1, thm2, separation or product)"))),
    }
}

fn parse_objective(name: &str) -> Result<Objective, CliError> {
    match name {
        "min_margin_thm1" => Ok(Objective::MinMarginThm1),
        "min_margin_thm2" => Ok(Objective::MinMarginThm2),
        "somarc_bound" => Ok(Objective::SomarcBound),
        _ => Err(usage(format!(
            "unknown objective \"{name}\" (expected min_margin_thm1, min_margin_thm2 or somarc_bound)"
        ))),
    }
}

/// Objective and family that optimize a scheme's conditions.
fn scheme_target(scheme: Scheme) -> Option<(Objective, Family)> {
    match scheme {
        Scheme::Thm1 => Some((Objective::MinMarginThm1, Family::Thm1)),
        Scheme::Separation => Some((Objective::MinMarginThm1, Family::Separation)),
        Scheme::Thm2 => Some((Objective::MinMarginThm2, Family::Thm2)),
        Scheme::Prop1 => Some((Objective::SomarcBound, Family::ProductInputs)),
        Scheme::MacCover | Scheme::Crbc9 | Scheme::Crbc10 => None,
    }
}

fn family_objective(family: Family) -> Objective {
    match family {
        Family::Thm1 | Family::Separation => Objective::MinMarginThm1,
        Family::Thm2 => Objective::MinMarginThm2,
        Family::ProductInputs => Objective::SomarcBound,
    }
}

fn objective_family(objective: Objective) -> Family {
    match objective {
        Objective::MinMarginThm1 => Family::Thm1,
        Objective::MinMarginThm2 => Family::Thm2,
        Objective::SomarcBound => Family::ProductInputs,
    }
}

fn chain_family(chain: &InputChain) -> Family {
    match chain {
        InputChain::Thm1(_) => Family::Thm1,
        InputChain::Thm2(_) => Family::Thm2,
        InputChain::Separation(_) => Family::Separation,
        InputChain::Product(_) => Family::ProductInputs,
    }
}

fn search_json(search: &SearchArgs) -> Value {
    match search.grid_step {
        Some(step) => json!({ "method": "grid", "grid_step": num(step) }),
        None => json!({ "method": "ascent", "restarts": search.restarts, "iterations": search.iters }),
    }
}

struct Searched {
    result: OptResult,
    chain: InputChain,
    method: &'static str,
}

fn run_search(
    objective: Objective,
    family: Family,
    scn: &Scenario,
    search: &SearchArgs,
    seed: u64,
) -> Result<Searched, CliError> {
    let (result, method) = match search.grid_step {
        Some(step) => {
            if !(step > 0.0 && step <= 1.0) {
                return Err(CliError::new(ExitCode::Budget, format!("--grid-step must be in (0, 1], got {step}")));
            }
            let r = distopt::grid_scan(objective, scn, family, step, distopt::DEFAULT_GRID_CAP)
                .map_err(|e| command_error("grid search", e))?;
            (r, "grid")
        }
        None => {
            if search.restarts == 0 {
                return Err(CliError::new(ExitCode::Budget, "--restarts must be at least 1"));
            }
            let budget = Budget { restarts: search.restarts, iterations: search.iters };
            let r =
                distopt::optimize(objective, scn, family, budget, seed).map_err(|e| command_error("optimize", e))?;
            (r, "ascent")
        }
    };
    let chain = result.best.to_chain(scn).map_err(|e| command_error("optimize", e))?;
    Ok(Searched { result, chain, method })
}

fn seed_of(common: &Common, loaded: Option<&Loaded>) -> u64 {
    common.seed.or(loaded.map(|l| l.sim.seed)).unwrap_or(DEFAULT_SEED)
}

fn v_size_note(v: [usize; 2]) -> String {
    format!(
        "auxiliary alphabets |V1| = {}, |V2| = {} are set by configuration; no cardinality bound is known",
        v[0], v[1]
    )
}

fn joint_of(source: &marc_core::Source, chain: &InputChain, channel: &marc_core::Channel) -> Result<Pmf, CliError> {
    assemble_joint(source, chain, channel).map_err(|e| command_error("chain", e))
}

fn evaluate(scheme: Scheme, joint: &Pmf) -> Result<ConditionReport, CliError> {
    let r = match scheme {
        Scheme::Thm1 => feasibility::check_thm1(joint),
        Scheme::Thm2 => feasibility::check_thm2(joint),
        Scheme::Separation => feasibility::check_separation(joint),
        Scheme::MacCover => feasibility::check_mac_cover(joint),
        Scheme::Crbc9 => feasibility::check_crbc(joint, CrbcStyle::IndependentInputs),
        Scheme::Crbc10 => feasibility::check_crbc(joint, CrbcStyle::SourceAwareInputs),
        Scheme::Prop1 => feasibility::check_prop1(joint),
    };
    r.map_err(|e| command_error(scheme.name(), e))
}

fn base_report(name: &str, options: Value, digest: String) -> Report {
    Report {
        command: json!({ "name": name, "options": options }),
        digest,
        result: Value::Null,
        text: String::new(),
        csv: String::new(),
        elapsed: Duration::ZERO,
    }
}

fn source_quantities(p: &Pmf) -> Result<Vec<(String, f64)>, CliError> {
    let e = |r: marc_core::Result<f64>| r.map_err(|e| command_error("source", e));
    Ok(vec![
        ("H(S1,S2)".into(), e(p.entropy(&[S1, S2]))?),
        ("H(S1)".into(), e(p.entropy(&[S1]))?),
        ("H(S2)".into(), e(p.entropy(&[S2]))?),
        ("H(S1|S2)".into(), e(p.conditional_entropy(&[S1], &[S2]))?),
        ("H(S2|S1)".into(), e(p.conditional_entropy(&[S2], &[S1]))?),
        ("I(S1;S2)".into(), e(p.mutual_information(&[S1], &[S2]))?),
        ("H(W)".into(), e(p.entropy(&[W]))?),
        ("H(W3)".into(), e(p.entropy(&[W3]))?),
        ("H(S1,S2|W)".into(), e(p.conditional_entropy(&[S1, S2], &[W]))?),
        ("H(S1,S2|W3)".into(), e(p.conditional_entropy(&[S1, S2], &[W3]))?),
    ])
}

fn info(a: &InfoArgs) -> Result<Report, CliError> {
    let loaded = load(&a.common)?;
    let mut report = base_report("info", json!({}), loaded.digest.clone());
    let mut quantities = source_quantities(loaded.source.pmf())?;
    let mut chain_value = Value::Null;
    let mut text = String::new();
    if let Some(ChainChoice::Fixed(chain)) = &loaded.chain {
        let joint = joint_of(&loaded.source, chain, &loaded.channel)?;
        let e = |r: marc_core::Result<f64>| r.map_err(|e| command_error("chain", e));
        let mut cq = vec![
            ("I(X1,X2,X3;Y)".to_string(), e(joint.mutual_information(&[X1, X2, X3], &[Y]))?),
            ("I(X1,X2;Y3|X3)".to_string(), e(joint.conditional_mutual_information(&[X1, X2], &[Y3], &[X3]))?),
            ("I(X1;X2)".to_string(), e(joint.mutual_information(&[X1], &[X2]))?),
        ];
        if loaded.channel.is_somarc() && matches!(chain, InputChain::Product(_)) {
            let [broadcast, relay] = feasibility::somarc_cuts(&joint).map_err(|e| command_error("bound", e))?;
            cq.push(("cut_relay_broadcast".into(), broadcast));
            cq.push(("cut_destination".into(), relay));
        }
        chain_value = json!({ "family": chain.family_name(), "quantities": report::quantities_json(&cq) });
        text.push_str(&format!("chain {}\n", chain.family_name()));
        text.push_str(&report::quantities_text(&cq));
        quantities.extend(cq);
    } else if let Some(ChainChoice::Optimize(f)) = &loaded.chain {
        chain_value = json!({ "family": f.name(), "optimize": true });
        text.push_str(&format!("chain {} (optimized on demand)\n", f.name()));
    }
    let source_q = &quantities[..10];
    let [s1, s2, w, w3] = loaded.source.sizes();
    let channel = json!({
        "somarc": loaded.channel.is_somarc(),
        "input_sizes": loaded.channel.input_sizes(),
        "output_sizes": loaded.channel.output_sizes(),
    });
    report.result = json!({
        "source": {
            "sizes": { "S1": s1, "S2": s2, "W": w, "W3": w3 },
            "quantities": report::quantities_json(source_q),
        },
        "channel": channel,
        "chain": chain_value,
        "v_sizes": loaded.v_sizes,
    });
    let mut t = format!("source |S1|={s1} |S2|={s2} |W|={w} |W3|={w3}\n");
    t.push_str(&report::quantities_text(source_q));
    let [x1, x2, x3] = loaded.channel.input_sizes();
    let [y, y3] = loaded.channel.output_sizes();
    t.push_str(&format!(
        "channel |X1|={x1} |X2|={x2} |X3|={x3} |Y|={y} |Y3|={y3} semi-orthogonal {}\n",
        loaded.channel.is_somarc()
    ));
    t.push_str(&text);
    report.text = t;
    report.csv = report::quantities_csv(&quantities);
    Ok(report)
}

fn default_scheme(loaded: &Loaded) -> Result<Scheme, CliError> {
    let family = match &loaded.chain {
        Some(ChainChoice::Fixed(c)) => chain_family(c),
        Some(ChainChoice::Optimize(f)) => *f,
        None => return Err(usage("the scenario has no [chain]; give --scheme")),
    };
    Ok(match family {
        Family::Thm1 => Scheme::Thm1,
        Family::Thm2 => Scheme::Thm2,
        Family::Separation => Scheme::Separation,
        Family::ProductInputs if loaded.channel.is_somarc() => Scheme::Prop1,
        Family::ProductInputs => Scheme::MacCover,
    })
}

fn check(a: &CheckArgs) -> Result<Report, CliError> {
    let loaded = load(&a.common)?;
    let scheme = match &a.scheme {
        Some(s) => parse_scheme(s)?,
        None => default_scheme(&loaded)?,
    };
    let seed = seed_of(&a.common, Some(&loaded));
    let crbc = matches!(scheme, Scheme::Crbc9 | Scheme::Crbc10);
    let (source, channel) =
        if crbc { scenario::crbc_view(&loaded)? } else { (loaded.source.clone(), loaded.channel.clone()) };

    let optimize_family = match (&loaded.chain, a.optimize) {
        (_, true) | (Some(ChainChoice::Optimize(_)), false) => {
            let (_, family) = scheme_target(scheme).ok_or_else(|| {
                mismatch(format!("scheme {} has no optimizable objective; give a fixed [chain]", scheme.name()))
            })?;
            Some(family)
        }
        _ => None,
    };
    let mut options = json!({ "scheme": scheme.name(), "optimize": optimize_family.is_some() });
    let (chain, searched) = match optimize_family {
        Some(family) => {
            let (objective, _) = scheme_target(scheme).expect("checked above");
            let scn = Scenario::new(source.clone(), channel.clone()).with_v_sizes(loaded.v_sizes);
            let s = run_search(objective, family, &scn, &a.search, seed)?;
            options["search"] = search_json(&a.search);
            options["seed"] = json!(seed);
            (s.chain.clone(), Some(s))
        }
        None => match &loaded.chain {
            Some(ChainChoice::Fixed(c)) => (c.clone(), None),
            _ => return Err(mismatch("the scenario has no [chain]; add one or pass --optimize")),
        },
    };
    let family = chain_family(&chain);
    let compatible = match scheme {
        Scheme::Thm1 => family == Family::Thm1,
        Scheme::Separation => matches!(family, Family::Separation | Family::Thm1),
        Scheme::Thm2 => family == Family::Thm2,
        Scheme::Prop1 => family == Family::ProductInputs,
        Scheme::MacCover | Scheme::Crbc9 | Scheme::Crbc10 => true,
    };
    if !compatible {
        return Err(mismatch(format!("scheme {} cannot be evaluated on a {} chain", scheme.name(), family.name())));
    }
    let joint = joint_of(&source, &chain, &channel)?;
    let mut cr = evaluate(scheme, &joint)?;
    if matches!(family, Family::Thm1 | Family::Separation) {
        cr.notes.push(v_size_note(loaded.v_sizes));
    }

    let mut report = base_report("check", options, loaded.digest.clone());
    let mut result = report::conditions_json(&cr);
    result["chain_family"] = json!(family.name());
    let mut text = report::conditions_text(&cr);
    if let Some(s) = &searched {
        result["optimizer"] = report::opt_json(&s.result, s.method);
        text.push_str(&format!(
            "chain optimized by {} search, objective {} = {} bits\n",
            s.method,
            family_objective(family).name(),
            fixed(s.result.best_value)
        ));
    }
    report.result = result;
    report.text = text;
    report.csv = report::conditions_csv(&[&cr]);
    Ok(report)
}

fn bound(a: &BoundArgs) -> Result<Report, CliError> {
    let loaded = load(&a.common)?;
    if !loaded.channel.is_somarc() {
        return Err(mismatch("the sum-rate bound needs a semi-orthogonal channel"));
    }
    let seed = seed_of(&a.common, Some(&loaded));
    let mut options = json!({ "optimize": a.optimize });
    let mut notes = Vec::new();
    let optimize_requested = a.optimize || matches!(loaded.chain, Some(ChainChoice::Optimize(_)));
    let (chain, searched) = if optimize_requested {
        if let Some(ChainChoice::Optimize(f)) = &loaded.chain {
            if *f != Family::ProductInputs {
                return Err(mismatch(format!(
                    "the sum-rate bound is over independent inputs, not a {} chain",
                    f.name()
                )));
            }
        }
        options["search"] = search_json(&a.search);
        options["seed"] = json!(seed);
        let s = run_search(Objective::SomarcBound, Family::ProductInputs, &loaded.scenario(), &a.search, seed)?;
        (s.chain.clone(), Some(s))
    } else {
        match &loaded.chain {
            Some(ChainChoice::Fixed(c @ InputChain::Product(_))) => (c.clone(), None),
            Some(ChainChoice::Fixed(c)) => {
                return Err(mismatch(format!(
                    "the sum-rate bound is over independent inputs, not a {} chain",
                    c.family_name()
                )))
            }
            _ => {
                notes.push("inputs are uniform; pass --optimize to maximize the bound".to_string());
                let c = ProductChain::uniform(loaded.channel.input_sizes()).map_err(|e| command_error("chain", e))?;
                (InputChain::Product(c), None)
            }
        }
    };
    let joint = joint_of(&loaded.source, &chain, &loaded.channel)?;
    let [broadcast, relay] = feasibility::somarc_cuts(&joint).map_err(|e| command_error("bound", e))?;
    let bound = broadcast.min(relay);
    let h = loaded.source.pmf().entropy(&[S1, S2]).map_err(|e| command_error("source", e))?;
    let gap = h - bound;
    let violated = gap > BOUND_TOL;
    let verdict = match (violated, searched.is_some()) {
        (true, true) => format!("separation infeasible: H = {} > {}", short(h), short(bound)),
        (true, false) => format!("H = {} > {} at these inputs; maximize with --optimize", short(h), short(bound)),
        (false, _) => format!("sum bound not violated: H = {} <= {}", short(h), short(bound)),
    };
    let quantities = vec![
        ("H(S1,S2)".to_string(), h),
        ("cut_relay_broadcast".to_string(), broadcast),
        ("cut_destination".to_string(), relay),
        ("sum_bound".to_string(), bound),
        ("gap".to_string(), gap),
    ];
    let inputs = match &chain {
        InputChain::Product(p) => json!({
            "x1": p.x1.probs().iter().map(|&v| num(v)).collect::<Vec<_>>(),
            "x2": p.x2.probs().iter().map(|&v| num(v)).collect::<Vec<_>>(),
            "x3": p.x3.probs().iter().map(|&v| num(v)).collect::<Vec<_>>(),
        }),
        _ => Value::Null,
    };
    let mut report = base_report("bound", options, loaded.digest.clone());
    let mut result = json!({
        "entropy_bits": num(h),
        "cut_relay_broadcast_bits": num(broadcast),
        "cut_destination_bits": num(relay),
        "sum_bound_bits": num(bound),
        "gap_bits": num(gap),
        "separation_infeasible": violated && searched.is_some(),
        "verdict": verdict,
        "inputs": inputs,
        "notes": notes,
    });
    if let Some(s) = &searched {
        result["optimizer"] = report::opt_json(&s.result, s.method);
    }
    report.result = result;
    let mut text = report::quantities_text(&quantities);
    text.push_str(&verdict);
    text.push('\n');
    for n in &notes {
        text.push_str(&format!("note: {n}\n"));
    }
    report.text = text;
    report.csv = report::quantities_csv(&quantities);
    Ok(report)
}

fn optimize(a: &OptimizeArgs) -> Result<Report, CliError> {
    let loaded = load(&a.common)?;
    let seed = seed_of(&a.common, Some(&loaded));
    let scheme = a.scheme.as_deref().map(parse_scheme).transpose()?;
    let mut objective = a.objective.as_deref().map(parse_objective).transpose()?;
    let mut family = a.family.as_deref().map(parse_family).transpose()?;
    if let Some(s) = scheme {
        let (o, f) =
            scheme_target(s).ok_or_else(|| mismatch(format!("scheme {} has no optimizable objective", s.name())))?;
        objective.get_or_insert(o);
        family.get_or_insert(f);
    }
    if family.is_none() && objective.is_none() {
        family = match &loaded.chain {
            Some(ChainChoice::Fixed(c)) => Some(chain_family(c)),
            Some(ChainChoice::Optimize(f)) => Some(*f),
            None => None,
        };
    }
    let (objective, family) = match (objective, family) {
        (Some(o), Some(f)) => (o, f),
        (Some(o), None) => (o, objective_family(o)),
        (None, Some(f)) => (family_objective(f), f),
        (None, None) => return Err(usage("nothing to optimize: give --scheme, --objective or --family")),
    };
    let scn = loaded.scenario();
    let s = run_search(objective, family, &scn, &a.search, seed)?;

    let mut options = json!({
        "objective": objective.name(),
        "family": family.name(),
        "search": search_json(&a.search),
    });
    if a.search.grid_step.is_none() {
        options["seed"] = json!(seed);
    }
    let mut report = base_report("optimize", options, loaded.digest.clone());
    let mut result = report::opt_json(&s.result, s.method);
    result["objective"] = json!(objective.name());
    let mut text = format!(
        "objective {}  family {}  {} search\nbest value {} bits after {} evaluations\n",
        objective.name(),
        family.name(),
        s.method,
        fixed(s.result.best_value),
        s.result.evaluations
    );
    for (i, v) in s.result.trace.iter().enumerate() {
        text.push_str(&format!("restart {i:>3}  {}\n", fixed(*v)));
    }
    text.push_str("best chain blocks:\n");
    for b in &s.result.best.blocks {
        let row: Vec<String> = b.iter().map(|v| format!("{v:.6}")).collect();
        text.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    let scheme_at_best = match objective {
        Objective::MinMarginThm1 if family == Family::Separation => Some(Scheme::Separation),
        Objective::MinMarginThm1 => Some(Scheme::Thm1),
        Objective::MinMarginThm2 => Some(Scheme::Thm2),
        Objective::SomarcBound => Some(Scheme::Prop1),
    };
    if let Some(sc) = scheme_at_best {
        let joint = joint_of(&loaded.source, &s.chain, &loaded.channel)?;
        let mut cr = evaluate(sc, &joint)?;
        if matches!(family, Family::Thm1 | Family::Separation) {
            cr.notes.push(v_size_note(loaded.v_sizes));
        }
        result["conditions"] = report::conditions_json(&cr);
        text.push('\n');
        text.push_str(&report::conditions_text(&cr));
    }
    report.result = result;
    report.text = text;
    let rows: Vec<Vec<String>> =
        s.result.trace.iter().enumerate().map(|(i, v)| vec![i.to_string(), report::exact(*v)]).collect();
    report.csv = report::table_csv(&["restart", "value_bits"], &rows);
    Ok(report)
}

fn simulate(a: &SimulateArgs) -> Result<Report, CliError> {
    if a.uncoded_cpm {
        simulate_uncoded(a)
    } else {
        simulate_coded(a)
    }
}

fn simulate_uncoded(a: &SimulateArgs) -> Result<Report, CliError> {
    let builtin = scenario::preset_file(SOMARC_PRESET);
    let digest = scenario::digest(&builtin);
    if a.common.scenario.is_some() || a.common.preset.is_some() {
        let loaded = load(&a.common)?;
        if loaded.digest != digest {
            return Err(mismatch(format!("--uncoded-cpm runs on the built-in {SOMARC_PRESET} scenario only")));
        }
    }
    let trials = a.trials.unwrap_or(DEFAULT_UNCODED_TRIALS);
    if trials == 0 {
        return Err(CliError::new(ExitCode::Budget, "--trials must be at least 1"));
    }
    let seed = a.common.seed.unwrap_or(DEFAULT_SEED);
    let r = sim::run_uncoded_cpm_somarc(trials, seed);
    let (lo, hi) = r.wilson_interval();
    let mut report =
        base_report("simulate", json!({ "scheme": "uncoded_cpm", "trials": trials, "seed": seed }), digest);
    report.result = json!({
        "scheme": "uncoded_cpm",
        "samples": r.samples,
        "errors": r.errors,
        "error_rate": num(r.error_rate()),
        "wilson_low": num(lo),
        "wilson_high": num(hi),
    });
    report.text = format!(
        "uncoded transmission, {} samples\nerrors {}  rate {:.6e}  95% interval [{:.6e}, {:.6e}]\n",
        r.samples,
        r.errors,
        r.error_rate(),
        lo,
        hi
    );
    report.csv = report::table_csv(
        &["samples", "errors", "error_rate", "wilson_low", "wilson_high", "seed"],
        &[vec![
            r.samples.to_string(),
            r.errors.to_string(),
            report::exact(r.error_rate()),
            report::exact(lo),
            report::exact(hi),
            seed.to_string(),
        ]],
    );
    Ok(report)
}

fn slack_name(s: Slack) -> &'static str {
    match s {
        Slack::Absolute => "absolute",
        Slack::Strong => "strong",
    }
}

fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::new(ExitCode::Io, format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["trial", "block", "stage", "verdict"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.block.to_string(),
            r.stage.name().to_string(),
            r.verdict.name().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::new(ExitCode::Io, format!("cannot write {}: {e}", path.display())))
}

fn simulate_coded(a: &SimulateArgs) -> Result<Report, CliError> {
    let loaded = load(&a.common)?;
    let mut cfg: SimConfig = loaded.sim;
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if let Some(v) = a.blocks {
        cfg.blocks = v;
    }
    if let Some(v) = a.rate1 {
        cfg.rate1 = v;
    }
    if let Some(v) = a.rate2 {
        cfg.rate2 = v;
    }
    if let Some(v) = a.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = usize::try_from(v).map_err(|_| CliError::new(ExitCode::Budget, "--trials is too large"))?;
    }
    if let Some(v) = a.common.seed {
        cfg.seed = v;
    }
    if let Some(s) = &a.slack {
        cfg.slack = match s.as_str() {
            "absolute" => Slack::Absolute,
            "strong" => Slack::Strong,
            other => return Err(usage(format!("--slack: expected absolute or strong, got \"{other}\""))),
        };
    }
    cfg.validate().map_err(|e| command_error("simulate", e))?;

    let wants_search = a.optimize || matches!(loaded.chain, Some(ChainChoice::Optimize(_)));
    let mut options = json!({
        "scheme": "thm2",
        "n": cfg.n,
        "blocks": cfg.blocks,
        "rate1": num(cfg.rate1),
        "rate2": num(cfg.rate2),
        "epsilon": num(cfg.epsilon),
        "slack": slack_name(cfg.slack),
        "trials": cfg.trials,
        "seed": cfg.seed,
        "optimize": wants_search,
    });
    let chain: Thm2Chain = if wants_search {
        if let Some(ChainChoice::Optimize(f)) = &loaded.chain {
            if *f != Family::Thm2 {
                return Err(mismatch(format!("the simulated scheme needs a thm2 chain, not {}", f.name())));
            }
        }
        options["search"] = search_json(&a.search);
        let s = run_search(Objective::MinMarginThm2, Family::Thm2, &loaded.scenario(), &a.search, cfg.seed)?;
        match s.chain {
            InputChain::Thm2(c) => c,
            _ => unreachable!("thm2 family yields a thm2 chain"),
        }
    } else {
        match &loaded.chain {
            Some(ChainChoice::Fixed(InputChain::Thm2(c))) => c.clone(),
            Some(ChainChoice::Fixed(c)) => {
                return Err(mismatch(format!("the simulated scheme needs a thm2 chain, not {}", c.family_name())))
            }
            _ => return Err(mismatch("the scenario has no [chain]; add a thm2 chain or pass --optimize")),
        }
    };
    let ic = InputChain::Thm2(chain.clone());
    let joint = joint_of(&loaded.source, &ic, &loaded.channel)?;
    let cr = evaluate(Scheme::Thm2, &joint)?;

    let (r, trace) = if a.trace.is_some() {
        sim::run_thm2_sim_traced(&loaded.source, &loaded.channel, &chain, cfg)
            .map_err(|e| command_error("simulate", e))?
    } else {
        (
            sim::run_thm2_sim(&loaded.source, &loaded.channel, &chain, cfg)
                .map_err(|e| command_error("simulate", e))?,
            Vec::new(),
        )
    };
    if let Some(path) = &a.trace {
        write_trace(path, &trace)?;
    }
    let (lo, hi) = r.wilson_interval();
    let [b1, b2] = cfg.bin_counts();
    let mut report = base_report("simulate", options, loaded.digest.clone());
    report.result = json!({
        "scheme": "thm2",
        "bins": [b1, b2],
        "trials": r.trials,
        "blocks": r.blocks,
        "relay_block_errors": r.relay_block_errors,
        "dest_block_errors": r.dest_block_errors,
        "session_errors": r.session_errors,
        "dest_session_errors": r.dest_session_errors,
        "relay_block_error_rate": num(r.relay_block_error_rate()),
        "dest_block_error_rate": num(r.dest_block_error_rate()),
        "session_error_rate": num(r.session_error_rate()),
        "dest_session_error_rate": num(r.dest_session_error_rate()),
        "session_wilson_low": num(lo),
        "session_wilson_high": num(hi),
        "conditions": report::conditions_json(&cr),
    });
    report.text = format!(
        "block-Markov decode-and-forward, n = {}, {} blocks, R1 = {}, R2 = {} ({} x {} bins), epsilon = {} ({} slack)\n\
         {} sessions, seed {}\n\
         relay block error rate        {:.6}\n\
         destination block error rate  {:.6}\n\
         destination session errors    {:.6}\n\
         session error rate            {:.6}  95% interval [{:.6}, {:.6}]\n\n{}",
        cfg.n,
        cfg.blocks,
        cfg.rate1,
        cfg.rate2,
        b1,
        b2,
        cfg.epsilon,
        slack_name(cfg.slack),
        r.trials,
        cfg.seed,
        r.relay_block_error_rate(),
        r.dest_block_error_rate(),
        r.dest_session_error_rate(),
        r.session_error_rate(),
        lo,
        hi,
        report::conditions_text(&cr)
    );
    report.csv = report::table_csv(
        &[
            "n",
            "blocks",
            "rate1",
            "rate2",
            "epsilon",
            "slack",
            "trials",
            "seed",
            "relay_block_error_rate",
            "dest_block_error_rate",
            "session_error_rate",
            "dest_session_error_rate",
            "session_wilson_low",
            "session_wilson_high",
        ],
        &[vec![
            cfg.n.to_string(),
            cfg.blocks.to_string(),
            report::exact(cfg.rate1),
            report::exact(cfg.rate2),
            report::exact(cfg.epsilon),
            slack_name(cfg.slack).to_string(),
            cfg.trials.to_string(),
            cfg.seed.to_string(),
            report::exact(r.relay_block_error_rate()),
            report::exact(r.dest_block_error_rate()),
            report::exact(r.session_error_rate()),
            report::exact(r.dest_session_error_rate()),
            report::exact(lo),
            report::exact(hi),
        ]],
    );
    Ok(report)
}
