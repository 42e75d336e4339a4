use marc_core::feasibility::*;
use marc_core::infotheory::JointPmf;
use marc_core::network::*;
use marc_core::simplex::dirichlet_ones;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn h(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

fn uniform_bits() -> SourceModel {
    SourceModel::from_entries(
        [2, 2, 1, 1],
        &[([0, 0, 0, 0], 0.25), ([0, 1, 0, 0], 0.25), ([1, 0, 0, 0], 0.25), ([1, 1, 0, 0], 0.25)],
    )
    .unwrap()
}

/// `Y` carries all three inputs, `Y3` carries `X1` and `X2`.
fn perfect_channel() -> ChannelModel {
    let inputs = [2, 2, 2];
    deterministic_channel(
        inputs,
        &SymbolMap::from_fn(inputs, 8, |a, b, c| a * 4 + b * 2 + c),
        &SymbolMap::from_fn(inputs, 4, |a, b, _| a * 2 + b),
    )
    .unwrap()
}

fn uniform_thm1(s: [usize; 2]) -> InputChain {
    let half = vec![0.5, 0.5];
    InputChain::Thm1(
        Thm1Chain::from_tables(
            s,
            [2, 2],
            [2, 2, 2],
            half.clone(),
            vec![half.clone(); s[0] * 2],
            half.clone(),
            vec![half.clone(); s[1] * 2],
            vec![half; 4],
        )
        .unwrap(),
    )
}

fn uniform_thm2(s: [usize; 2]) -> InputChain {
    let half = vec![0.5, 0.5];
    InputChain::Thm2(
        Thm2Chain::from_tables(
            s,
            [2, 2, 2],
            vec![half.clone(); s[0]],
            vec![half.clone(); s[1]],
            vec![half; s[0] * s[1]],
        )
        .unwrap(),
    )
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

#[test]
fn thm1_with_perfect_channels() {
    let joint = assemble_joint(&uniform_bits(), &uniform_thm1([2, 2]), &perfect_channel()).unwrap();
    let r = check_thm1(&joint).unwrap();
    let ids: Vec<&str> = r.conditions.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["2a", "2b", "2c", "2d", "2e", "2f"]);
    let f = r.get("2f").unwrap();
    assert!(close(f.lhs, 2.0) && close(f.rhs, 3.0) && f.satisfied);
    let c = r.get("2c").unwrap();
    assert!(close(c.rhs, 2.0) && c.boundary && !c.satisfied);
    assert!(!r.overall);
    assert!(close(r.min_margin, 0.0));
}

#[test]
fn point_mass_sources_satisfy_everything() {
    let source = SourceModel::point_mass([2, 2, 1, 1], [1, 0, 0, 0]).unwrap();
    let joint = assemble_joint(&source, &uniform_thm1([2, 2]), &perfect_channel()).unwrap();
    let r = check_thm1(&joint).unwrap();
    assert!(r.overall, "{r:?}");
    assert!(r.conditions.iter().all(|c| c.lhs == 0.0));

    let joint = assemble_joint(&source, &uniform_thm2([2, 2]), &perfect_channel()).unwrap();
    let r = check_thm2(&joint).unwrap();
    assert!(r.overall, "{r:?}");
    assert!(close(r.get("5f").unwrap().rhs, 3.0));
}

#[test]
fn constant_relay_output_fails_first_condition() {
    let inputs = [2, 2, 2];
    let channel = deterministic_channel(
        inputs,
        &SymbolMap::from_fn(inputs, 8, |a, b, c| a * 4 + b * 2 + c),
        &SymbolMap::from_fn(inputs, 1, |_, _, _| 0),
    )
    .unwrap();
    let joint = assemble_joint(&uniform_bits(), &uniform_thm1([2, 2]), &channel).unwrap();
    let a = check_thm1(&joint).unwrap().get("2a").unwrap().clone();
    assert!(close(a.lhs, 1.0) && a.rhs == 0.0 && !a.satisfied);
}

#[test]
fn crbc_noiseless_pipes() {
    let source = SourceModel::from_entries([2, 1, 1, 1], &[([0, 0, 0, 0], 0.5), ([1, 0, 0, 0], 0.5)]).unwrap();
    let inputs = [2, 1, 2];
    let channel = deterministic_channel(
        inputs,
        &SymbolMap::from_fn(inputs, 4, |a, _, c| a * 2 + c),
        &SymbolMap::from_fn(inputs, 2, |a, _, _| a),
    )
    .unwrap();
    let joint =
        assemble_joint(&source, &InputChain::Product(ProductChain::uniform(inputs).unwrap()), &channel).unwrap();
    let r = check_crbc(&joint, CrbcStyle::IndependentInputs).unwrap();
    let (a, b) = (r.get("9a").unwrap(), r.get("9b").unwrap());
    assert!(close(a.rhs, 1.0) && a.boundary);
    assert!(close(b.rhs, 2.0) && b.satisfied);
    assert_eq!(crbc_rhs(&joint, CrbcStyle::IndependentInputs).unwrap(), [a.rhs, b.rhs]);

    let fixed_relay = ProductChain::new(vec![0.5, 0.5], vec![1.0], vec![1.0, 0.0]).unwrap();
    let joint = assemble_joint(&source, &InputChain::Product(fixed_relay), &channel).unwrap();
    let r = check_crbc(&joint, CrbcStyle::SourceAwareInputs).unwrap();
    assert!(close(r.get("10a").unwrap().rhs, 1.0));
    assert!(close(r.get("10b").unwrap().rhs, 1.0));
}

#[test]
fn crbc_independent_style_rejects_source_dependent_inputs() {
    let source = SourceModel::from_entries([2, 1, 1, 1], &[([0, 0, 0, 0], 0.5), ([1, 0, 0, 0], 0.5)]).unwrap();
    let inputs = [2, 1, 2];
    let channel = deterministic_channel(
        inputs,
        &SymbolMap::from_fn(inputs, 4, |a, _, c| a * 2 + c),
        &SymbolMap::from_fn(inputs, 2, |a, _, _| a),
    )
    .unwrap();
    let chain = Thm2Chain::from_tables(
        [2, 1],
        inputs,
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![vec![1.0]],
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
    )
    .unwrap();
    let joint = assemble_joint(&source, &InputChain::Thm2(chain), &channel).unwrap();
    assert!(matches!(check_crbc(&joint, CrbcStyle::IndependentInputs), Err(marc_core::Error::WrongChain(_))));
    let r = check_crbc(&joint, CrbcStyle::SourceAwareInputs).unwrap();
    // X1 is a function of S1, so nothing is left to convey once S1 is given
    assert_eq!(r.get("10a").unwrap().rhs, 0.0);
}

fn mac_joint(source: &SourceModel, y3: impl Fn(usize, usize, usize) -> usize, y3_size: usize) -> JointPmf {
    let inputs = [2, 2, 1];
    let channel = deterministic_channel(
        inputs,
        &SymbolMap::from_fn(inputs, 1, |_, _, _| 0),
        &SymbolMap::from_fn(inputs, y3_size, y3),
    )
    .unwrap();
    assemble_joint(source, &InputChain::Product(ProductChain::uniform(inputs).unwrap()), &channel).unwrap()
}

#[test]
fn xor_mac_cannot_carry_two_independent_bits() {
    let r = check_mac_cover(&mac_joint(&uniform_bits(), |a, b, _| a ^ b, 2)).unwrap();
    let c = r.get("mac3").unwrap();
    assert!(close(c.lhs, 2.0) && close(c.rhs, 1.0) && !c.satisfied);
    assert_eq!(r.get("mac1").unwrap().rhs, 1.0);
}

#[test]
fn biased_sources_fit_a_two_bit_mac() {
    let p = 0.1;
    let source = SourceModel::from_entries(
        [2, 2, 1, 1],
        &[
            ([0, 0, 0, 0], (1.0 - p) * (1.0 - p)),
            ([0, 1, 0, 0], (1.0 - p) * p),
            ([1, 0, 0, 0], p * (1.0 - p)),
            ([1, 1, 0, 0], p * p),
        ],
    )
    .unwrap();
    let r = check_mac_cover(&mac_joint(&source, |a, b, _| a * 2 + b, 4)).unwrap();
    assert!(r.overall);
    let hb = h(&[p, 1.0 - p]);
    assert!(close(r.get("mac1").unwrap().lhs, hb));
    assert!(close(r.get("mac3").unwrap().lhs, 2.0 * hb));
    assert!(close(r.get("mac3").unwrap().rhs, 2.0));
}

#[test]
fn separation_matches_thm1_expressions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let rows = |n: usize, rng: &mut ChaCha8Rng| (0..n).map(|_| dirichlet_ones(2, rng)).collect::<Vec<_>>();
    for _ in 0..10 {
        let chain = SeparationChain::from_tables(
            [2, 2],
            [2, 2, 2],
            dirichlet_ones(2, &mut rng),
            rows(2, &mut rng),
            dirichlet_ones(2, &mut rng),
            rows(2, &mut rng),
            rows(4, &mut rng),
        )
        .unwrap();
        let joint = assemble_joint(&uniform_bits(), &InputChain::Separation(chain), &perfect_channel()).unwrap();
        let sep = check_separation(&joint).unwrap();
        let thm1 = check_thm1(&joint).unwrap();
        assert_eq!(sep.scheme, Scheme::Separation);
        assert_eq!(sep.conditions, thm1.conditions);
    }
    let joint = assemble_joint(&uniform_bits(), &uniform_thm2([2, 2]), &perfect_channel()).unwrap();
    assert!(check_separation(&joint).is_err());
}

#[test]
fn sum_bound_matches_closed_form() {
    // with product inputs both cuts reduce to H(X1 + X2), and the relay cut
    // adds H(X3) on top
    let (source, channel) = somarc_example::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut best: f64 = 0.0;
    for _ in 0..500 {
        let (p, q, r): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
        let chain = ProductChain::new(vec![1.0 - p, p], vec![1.0 - q, q], vec![1.0 - r, r]).unwrap();
        let joint = assemble_joint(&source, &InputChain::Product(chain), &channel).unwrap();
        let ys = h(&[(1.0 - p) * (1.0 - q), p * (1.0 - q) + q * (1.0 - p), p * q]);
        let [a, b] = somarc_cuts(&joint).unwrap();
        assert!((a - ys).abs() <= 1e-10);
        assert!((b - ys - h(&[r, 1.0 - r])).abs() <= 1e-10);
        let bound = somarc_sum_bound(&joint).unwrap();
        assert!(bound <= 1.5 + 1e-9);
        best = best.max(bound);
        assert!(!check_prop1(&joint).unwrap().overall);
    }
    assert!(best > 1.45);

    let chain = ProductChain::new(vec![1.0, 0.0], vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
    let joint = assemble_joint(&source, &InputChain::Product(chain), &channel).unwrap();
    assert!(close(somarc_sum_bound(&joint).unwrap(), 1.0));
}

#[test]
fn single_precision_reports_agree() {
    let (source, channel) = somarc_example::<f32>();
    let joint =
        assemble_joint(&source, &InputChain::Thm2(Thm2Chain::cpm_identity([2, 2], 2).unwrap()), &channel).unwrap();
    let r32 = check_thm2(&joint).unwrap();
    let (source, channel) = somarc_example::<f64>();
    let joint =
        assemble_joint(&source, &InputChain::Thm2(Thm2Chain::cpm_identity([2, 2], 2).unwrap()), &channel).unwrap();
    let r64 = check_thm2(&joint).unwrap();
    for (a, b) in r32.conditions.iter().zip(&r64.conditions) {
        assert!((a.lhs as f64 - b.lhs).abs() < 1e-5);
        assert!((a.rhs as f64 - b.rhs).abs() < 1e-5);
    }
}
