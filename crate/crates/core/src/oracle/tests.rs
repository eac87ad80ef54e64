use super::*;
use crate::motivic::totally_nonsplit;
use crate::extmod::ExtSpace;
use crate::repcat::RepMorphism;

fn small(p: u32, levels: usize) -> CensusConfig {
    CensusConfig::new(p, vec![-2, -1, 0], vec![-1, -2], levels)
}

#[test]
fn binary_three_piece_census() {
    let r = census(&small(2, 2)).unwrap();
    assert!(r.ok, "{:?}", r.violations);
    assert_eq!(r.levels[0].strict_classes, 4);
    assert_eq!(r.levels[0].raw, 8);
    assert_eq!(r.levels[1].fiber_sizes, vec![2; 4]);
    assert_eq!(r.levels[1].strict_classes, 8);
    assert!(r.levels.iter().all(|l| l.surjective));
}

#[test]
fn scaling_merges_classes_over_f3() {
    let r = census(&small(3, 2)).unwrap();
    assert!(r.ok, "{:?}", r.violations);
    assert_eq!(r.levels[0].strict_classes, 9);
    assert!(r.levels[0].aut_a_orbits < 9);
    assert_eq!(r.levels[0].aut_a_orbits, r.levels[0].iso_classes);
}

#[test]
fn no_generators_means_one_class_per_level() {
    let r = census(&CensusConfig::new(2, vec![-3, -1, 0], vec![], 2)).unwrap();
    assert!(r.ok);
    assert!(r.levels.iter().all(|l| l.strict_classes == 1 && l.iso_classes == 1));
}

#[test]
fn census_is_deterministic() {
    let a = serde_json::to_string(&census(&small(2, 2)).unwrap()).unwrap();
    let b = serde_json::to_string(&census(&small(2, 2)).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn oversized_and_invalid_configs_are_refused() {
    let mut big = CensusConfig::new(3, vec![-3, -2, -1, 0], vec![-1, -1, -1, -1, -2, -2, -2, -3, -3], 3);
    big.copies = 4;
    assert!(matches!(census(&big), Err(Error::Bound(_))));
    assert!(census(&CensusConfig::new(5, vec![-1, 0], vec![-1], 1)).is_err());
    assert!(census(&CensusConfig::new(2, vec![0, -1], vec![-1], 1)).is_err());
    assert!(census(&CensusConfig::new(2, vec![-1, 0], vec![-1], 1 + 1)).is_err());
}

#[test]
fn subspace_counts_match_gaussian_binomials() {
    assert_eq!(enumerate_subspaces(Field::Fp(3), 2).len(), 1 + 4 + 1);
    assert_eq!(enumerate_subspaces(Field::Fp(2), 3).len(), 1 + 7 + 7 + 1);
}

#[test]
fn quantified_definition_agrees_with_the_criterion() {
    let r = subobject_quantifier_check(&default_quantifier_objects().unwrap()).unwrap();
    assert!(r.ok, "{:?}", r.cases);
    assert!(r.cases.iter().all(|c| c.classes == 81));
    assert!(r.cases.iter().any(|c| c.totally_nonsplit > 0));
}

#[test]
fn split_and_one_dimensional_cases() {
    let f = Field::Fp(3);
    let sig = ModelSignature::new(f, vec![("x1", -1)]).unwrap();
    let h = WeightedRep::pure(sig.clone(), -1, 1);
    let subs = vec![RepMorphism::zero(&WeightedRep::zero(sig.clone()), &h), RepMorphism::identity(&h)];
    let sp = ExtSpace::new(&WeightedRep::unit(sig), &h).unwrap();
    for e in sp.all_classes() {
        let q = quantified_nonsplit(&e, &subs).unwrap();
        assert_eq!(q, !e.is_split());
        assert_eq!(q, totally_nonsplit(&e).unwrap());
    }
}
