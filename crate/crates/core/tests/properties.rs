//! Property tests across modules, each checked against a brute-force or algebraic oracle.

use proptest::prelude::*;

use pitkit::algebra::{all_exponents, ExponentVector, Field, ScalarPoly};
use pitkit::depth3::{compute_distance, decompose_base_sets, Partition};
use pitkit::io::CircuitFile;
use pitkit::kron::{naive_kronecker, prime_weights};
use pitkit::roabp::weighted_substitute;
use pitkit::verify::{generate_instance, random_partition, rng_for, ClassTag, InstanceSpec, Target};
use pitkit::Limits;

const P: u64 = 10007;

fn field() -> Field {
    Field::new(P).unwrap()
}

fn poly_strategy(n: usize) -> impl Strategy<Value = Vec<(Vec<u32>, u64)>> {
    prop::collection::vec((prop::collection::vec(0u32..3, n), 0u64..P), 0..6)
}

fn build(n: usize, terms: Vec<(Vec<u32>, u64)>) -> ScalarPoly {
    ScalarPoly::from_terms(field(), n, terms.into_iter().map(|(e, c)| (ExponentVector::new(e), c))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_inverse_and_fermat(a in 1u64..P, b in 0u64..P) {
        let f = field();
        prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        prop_assert_eq!(f.add(f.sub(b, a), a), b);
        prop_assert_eq!(f.pow(a, P - 1), 1);
    }

    #[test]
    fn product_evaluates_pointwise(a in poly_strategy(3), b in poly_strategy(3), pt in prop::collection::vec(0u64..P, 3)) {
        let f = field();
        let (a, b) = (build(3, a), build(3, b));
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.eval(&pt).unwrap(), f.mul(a.eval(&pt).unwrap(), b.eval(&pt).unwrap()));
        let sum = a.add(&b).unwrap();
        prop_assert_eq!(sum.eval(&pt).unwrap(), f.add(a.eval(&pt).unwrap(), b.eval(&pt).unwrap()));
    }

    #[test]
    fn shift_is_translation(a in poly_strategy(3), c in prop::collection::vec(0u64..P, 3), pt in prop::collection::vec(0u64..P, 3)) {
        let f = field();
        let a = build(3, a);
        let moved: Vec<u64> = pt.iter().zip(&c).map(|(&x, &y)| f.add(x, y)).collect();
        prop_assert_eq!(a.shift(&c).unwrap().eval(&pt).unwrap(), a.eval(&moved).unwrap());
    }

    #[test]
    fn naive_kronecker_is_injective(n in 1usize..4, delta in 1u32..4) {
        let w = naive_kronecker(n, delta).unwrap();
        let vars: Vec<usize> = (0..n).collect();
        let mut seen: Vec<u128> = all_exponents(n, &vars, delta).iter().map(|e| w.weight(e)).collect();
        let total = seen.len();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), total);
    }

    #[test]
    fn prime_weights_are_positive_residues(n in 1usize..9, delta in 1u32..4, p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101])) {
        let w = prime_weights(n, delta, p);
        prop_assert!(w.weights().iter().all(|&a| (1..=p).contains(&a)));
    }

    #[test]
    fn weighted_substitution_matches_evaluation(seed in 0u64..1000, t in 1u64..50) {
        let spec = InstanceSpec { n: 4, d: 2, w: 2, delta: 2, ..InstanceSpec::new(ClassTag::Roabp, seed) };
        let inst = generate_instance(&spec, &Limits::default()).unwrap();
        let r = inst.as_roabp().unwrap();
        let f = r.field();
        let wfn = prime_weights(r.n(), 2, 5);
        let u = weighted_substitute(r, &wfn).unwrap();
        let pt: Vec<u64> = wfn.weights().iter().map(|&a| f.pow(t, a)).collect();
        prop_assert_eq!(u.eval(t), r.evaluate(&pt).unwrap());
    }

    #[test]
    fn refinement_chains_have_distance_one(seed in 0u64..1000, n in 1usize..12, len in 1usize..5) {
        // coarsen step by step: each partition merges colors of the one before it
        let mut rng = rng_for(seed, 0);
        let mut seq = vec![Partition::singletons(n)];
        for _ in 1..len {
            let prev = seq.last().unwrap().colors().to_vec();
            let merged = random_partition(&mut rng, prev.len(), prev.len());
            let colors: Vec<Vec<usize>> =
                merged.colors().iter().map(|grp| grp.iter().flat_map(|&g| prev[g].clone()).collect()).collect();
            seq.push(Partition::new(colors).unwrap());
        }
        prop_assert_eq!(compute_distance(&seq).unwrap(), 1);
    }

    #[test]
    fn base_sets_partition_the_variables(seed in 0u64..1000, n in 1usize..30, c in 1usize..4) {
        let mut rng = rng_for(seed, 1);
        let parts: Vec<Partition> = (0..c).map(|_| random_partition(&mut rng, n, n)).collect();
        let d = decompose_base_sets(&parts).unwrap();
        prop_assert!(d.within_cap());
        let mut all: Vec<usize> = d.sets.iter().flat_map(|s| s.vars.clone()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        for s in &d.sets {
            let seq: Vec<Partition> = s.order.iter().map(|&k| parts[k].restrict(&s.vars)).collect();
            prop_assert_eq!(compute_distance(&seq).unwrap(), 1);
        }
    }

    #[test]
    fn circuit_files_round_trip(seed in 0u64..500, class in prop::sample::select(ClassTag::ALL.to_vec())) {
        let spec = InstanceSpec { n: 5, d: 2, target: Target::Any, boundaries: seed % 2 == 0, ..InstanceSpec::new(class, seed) };
        let inst = generate_instance(&spec, &Limits::default()).unwrap();
        let text = CircuitFile::from_instance(&inst, None).unwrap().to_json();
        let back = CircuitFile::parse(&text).unwrap().to_instance(None).unwrap();
        prop_assert_eq!(back, inst);
    }
}
