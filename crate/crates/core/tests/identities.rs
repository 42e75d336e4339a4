use marc_core::infotheory::random::{random_pmf, random_sparse_pmf};
use marc_core::infotheory::{JointPmf, Kernel, Variable};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;
const NAMES: [&str; 5] = ["A", "B", "C", "D", "E"];

/// A random pmf over 3..=5 variables with alphabets 1..=4, sometimes sparse.
fn pmf_strategy() -> impl Strategy<Value = JointPmf<f64>> {
    (prop::collection::vec(1usize..=4, 3..=5), any::<u64>(), prop::bool::ANY).prop_map(|(sizes, seed, sparse)| {
        let vars: Vec<Variable> = sizes.iter().zip(NAMES).map(|(&s, n)| Variable::new(n, s)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if sparse {
            random_sparse_pmf(vars, 0.5, &mut rng)
        } else {
            random_pmf(vars, &mut rng)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_is_nonnegative(p in pmf_strategy()) {
        let k = p.variables().len();
        for &name in &NAMES[..k] {
            let rest: Vec<&str> = NAMES[..k].iter().copied().filter(|&n| n != name).collect();
            let h = p.conditional_entropy(&[name], &rest).unwrap();
            prop_assert!(h >= 0.0);
        }
        prop_assert!(p.entropy(&NAMES[..k]).unwrap() >= 0.0);
    }

    #[test]
    fn conditioning_reduces_entropy(p in pmf_strategy()) {
        let h_a_b = p.conditional_entropy(&["A"], &["B"]).unwrap();
        let h_a_bc = p.conditional_entropy(&["A"], &["B", "C"]).unwrap();
        prop_assert!(h_a_bc <= h_a_b + TOL);
        prop_assert!(h_a_b <= p.entropy(&["A"]).unwrap() + TOL);
    }

    #[test]
    fn chain_rule(p in pmf_strategy()) {
        let joint = p.conditional_entropy(&["A", "B"], &["C"]).unwrap();
        let split = p.conditional_entropy(&["A"], &["C"]).unwrap() + p.conditional_entropy(&["B"], &["A", "C"]).unwrap();
        prop_assert!((joint - split).abs() <= TOL);
        let mi = p.mutual_information(&["A"], &["B", "C"]).unwrap();
        let parts = p.mutual_information(&["A"], &["B"]).unwrap()
            + p.conditional_mutual_information(&["A"], &["C"], &["B"]).unwrap();
        prop_assert!((mi - parts).abs() <= TOL);
    }

    #[test]
    fn mutual_information_is_symmetric(p in pmf_strategy()) {
        let ab = p.conditional_mutual_information(&["A"], &["B"], &["C"]).unwrap();
        let ba = p.conditional_mutual_information(&["B"], &["A"], &["C"]).unwrap();
        prop_assert!((ab - ba).abs() <= TOL);
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn deterministic_maps_lose_information(p in pmf_strategy(), table in prop::collection::vec(0usize..3, 4)) {
        let b = p.size_of("B").unwrap();
        let g = Kernel::deterministic(vec![Variable::new("B", b)], vec![Variable::new("G", 3)], |x| vec![table[x[0]]]).unwrap();
        let q = p.compose(&g).unwrap();
        let through = q.conditional_mutual_information(&["A"], &["G"], &["C"]).unwrap();
        let direct = q.conditional_mutual_information(&["A"], &["B"], &["C"]).unwrap();
        prop_assert!(through <= direct + TOL);
    }

    #[test]
    fn singleton_contributes_nothing(p in pmf_strategy()) {
        let q = p.insert_singleton("Z", 0).unwrap();
        prop_assert_eq!(q.entropy(&["Z"]).unwrap(), 0.0);
        prop_assert!(q.mutual_information(&["Z"], &["A", "B"]).unwrap().abs() <= 1e-15);
        let h = p.entropy(&["A", "B"]).unwrap();
        prop_assert!((q.entropy(&["A", "B", "Z"]).unwrap() - h).abs() <= 1e-15);
    }

    #[test]
    fn compose_then_marginalize_recovers_base(p in pmf_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = p.size_of("A").unwrap();
        let k: Kernel<f64> = marc_core::infotheory::random::random_kernel(vec![Variable::new("A", a)], vec![Variable::new("N", 3)], &mut rng);
        let q = p.compose(&k).unwrap();
        prop_assert!((q.total() - 1.0).abs() <= 1e-12);
        let names = p.names();
        let back = q.marginalize(&names).unwrap();
        prop_assert!(back.max_abs_diff(&p).unwrap() <= 1e-12);
    }

    #[test]
    fn permutation_preserves_measures(p in pmf_strategy()) {
        let mut order = p.names();
        order.reverse();
        let q = p.permute(&order).unwrap();
        let d = (p.conditional_mutual_information(&["A"], &["C"], &["B"]).unwrap()
            - q.conditional_mutual_information(&["A"], &["C"], &["B"]).unwrap())
            .abs();
        prop_assert!(d <= 1e-12);
    }

    #[test]
    fn single_precision_agrees(p in pmf_strategy()) {
        let vars = p.variables().to_vec();
        let q = JointPmf::<f32>::new(vars, p.probs().iter().map(|&x| x as f32).collect()).unwrap();
        let d = p.entropy(&["A", "B"]).unwrap() - q.entropy(&["A", "B"]).unwrap() as f64;
        prop_assert!(d.abs() <= 1e-4);
    }
}

#[test]
fn conditional_mutual_information_examples() {
    let vars = vec![Variable::new("A", 2), Variable::new("B", 2)];
    let independent = JointPmf::<f64>::uniform(vars).unwrap();
    assert_eq!(independent.mutual_information(&["A"], &["B"]).unwrap(), 0.0);
}

#[test]
fn condition_on_event_examples() {
    let t = 1.0 / 3.0;
    let vars = vec![Variable::new("S1", 2), Variable::new("S2", 2)];
    let p = JointPmf::<f64>::from_entries(vars, &[(vec![0, 0], t), (vec![0, 1], t), (vec![1, 1], t)]).unwrap();
    let given = p.condition_on_event(&[("S2", 0)]).unwrap();
    let s1 = given.marginalize(&["S1"]).unwrap();
    assert!((s1.probs()[0] - 1.0).abs() < 1e-15);
    assert!(p.condition_on_event(&[("S1", 1), ("S2", 0)]).is_err());

    let point = JointPmf::<f64>::from_entries(
        vec![Variable::new("A", 2), Variable::new("B", 3)],
        &[(vec![1, 0], 0.2), (vec![1, 1], 0.3), (vec![1, 2], 0.5)],
    )
    .unwrap();
    let b = point.condition_on_event(&[("A", 1)]).unwrap().marginalize(&["B"]).unwrap();
    assert!(b.max_abs_diff(&point.marginalize(&["B"]).unwrap()).unwrap() < 1e-15);
}
