use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::exactla::{Field, Scalar};
use crate::extmod::{pullback, ExtSpace};
use crate::random::{self, Rng64};
use crate::repcat::{hom_space, ModelSignature};

fn sig(field: Field) -> Arc<ModelSignature> {
    ModelSignature::new(field, vec![("u", -1), ("v", -2)]).unwrap()
}

struct Frame {
    a1: WeightedRep,
    a2: WeightedRep,
    a3: WeightedRep,
}

fn frame(field: Field, r: &mut Rng64, overlap: bool) -> Frame {
    let s = sig(field);
    let (d1, d2, d3): (&[i64], &[i64], &[i64]) =
        if overlap { (&[-2, -1], &[-1, 0], &[-1, 0]) } else { (&[-4, -3], &[-2, -1], &[0]) };
    let mut pick = |d: &[i64]| loop {
        let x = random::rep(&s, d, 2, r, 2);
        if !x.is_zero() {
            return x;
        }
    };
    Frame { a1: pick(d1), a2: pick(d2), a3: pick(d3) }
}

fn class(space: &Arc<ExtSpace>, r: &mut Rng64) -> ExtClass {
    let c: Vec<Scalar> = (0..space.dim()).map(|_| random::scalar(space.field(), r, 3)).collect();
    space.from_coords(&c)
}

fn blend(f: &Frame, r: &mut Rng64) -> (Blend, Arc<ExtSpace>) {
    let l = class(&ExtSpace::new(&f.a2, &f.a1).unwrap(), r);
    let n = class(&ExtSpace::new(&f.a3, &f.a2).unwrap(), r);
    let b = make_blend(&realize(&l), &realize(&n)).unwrap();
    (b, ExtSpace::new(&f.a3, &f.a1).unwrap())
}

fn equiv(a: &Blend, b: &Blend) -> bool {
    blend_equiv(a, b).unwrap().is_some()
}

#[test]
fn kummer_chain_blend() {
    let s = sig(Field::Q);
    let a1 = WeightedRep::pure(s.clone(), -2, 1);
    let a2 = WeightedRep::pure(s.clone(), -1, 1);
    let a3 = WeightedRep::unit(s.clone());
    let l = ExtSpace::new(&a2, &a1).unwrap().basis()[0].clone();
    let n = ExtSpace::new(&a3, &a2).unwrap().basis()[0].clone();
    let b = make_blend(&realize(&l), &realize(&n)).unwrap();
    assert_eq!(b.mid.dim(), 3);
    assert_eq!(second_row(&b).unwrap().by(), &a1);
    let e = ExtSpace::new(&a3, &a1).unwrap();
    assert_eq!(e.dim(), 1);
    let t = translate(&e.basis()[0], &b, Construction::Row).unwrap();
    assert!(!equiv(&b, &t));
    assert!(equiv(&t, &translate_in_place(&e.basis()[0], &b).unwrap()));
}

#[test]
fn mismatched_frames_are_rejected() {
    let s = sig(Field::Q);
    let a1 = WeightedRep::pure(s.clone(), -2, 1);
    let a2 = WeightedRep::pure(s.clone(), -1, 1);
    let a3 = WeightedRep::unit(s.clone());
    let l = realize(&ExtSpace::new(&a2, &a1).unwrap().zero());
    let bad = realize(&ExtSpace::new(&a3, &a1).unwrap().zero());
    assert!(matches!(make_blend(&l, &bad), Err(Error::Endpoint(_))));
    let n = realize(&ExtSpace::new(&a3, &a2).unwrap().zero());
    let b = make_blend(&l, &n).unwrap();
    let wrong = ExtSpace::new(&a2, &a1).unwrap().zero();
    assert!(matches!(translate(&wrong, &b, Construction::Row), Err(Error::Endpoint(_))));
}

/// Over F2 with one-dimensional pieces, every operator choice compatible
/// with the frame is one of two classes.
#[test]
fn two_classes_over_f2_by_enumeration() {
    let f = Field::Fp(2);
    let s = sig(f);
    let a1 = WeightedRep::pure(s.clone(), -2, 1);
    let a2 = WeightedRep::pure(s.clone(), -1, 1);
    let a3 = WeightedRep::unit(s.clone());
    let l = ExtSpace::new(&a2, &a1).unwrap().basis()[0].clone();
    let n = ExtSpace::new(&a3, &a2).unwrap().basis()[0].clone();
    let base = make_blend(&realize(&l), &realize(&n)).unwrap();
    // The only free block is v: degree 0 -> degree -2.
    let mut reps: Vec<Blend> = Vec::new();
    for x in 0..2 {
        let mut v = base.mid.op(1).clone();
        let (i, j) = (base.mid.offset(-2), base.mid.offset(0));
        v.set(i, j, f.from_i64(x));
        let mid = base.mid.with_ops(vec![base.mid.op(0).clone(), v]).unwrap();
        let cand = Blend {
            mid: mid.clone(),
            iota: RepMorphism::new(base.l.mid.clone(), mid.clone(), base.iota.matrix.clone()).unwrap(),
            pi: RepMorphism::new(mid, base.n.mid.clone(), base.pi.matrix.clone()).unwrap(),
            ..base.clone()
        };
        cand.validate().unwrap();
        if !reps.iter().any(|r| equiv(r, &cand)) {
            reps.push(cand);
        }
    }
    assert_eq!(reps.len(), 2);
    assert_eq!(ExtSpace::new(&a3, &a1).unwrap().all_classes().len(), 2);
}

#[test]
fn automorphisms_same_weight_variant() {
    let s = sig(Field::Q);
    let a1 = WeightedRep::pure(s.clone(), 0, 2);
    let a2 = WeightedRep::pure(s.clone(), 0, 1);
    let a3 = WeightedRep::pure(s.clone(), 0, 3);
    let l = realize(&ExtSpace::new(&a2, &a1).unwrap().zero());
    let n = realize(&ExtSpace::new(&a3, &a2).unwrap().zero());
    let b = make_blend(&l, &n).unwrap();
    assert_eq!(aut_blend(&b).unwrap().1.dim(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn row_and_column_constructions_agree(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let field = if seed % 2 == 0 { Field::Q } else { Field::Fp(3) };
        let f = frame(field, &mut r, false);
        let (b, sp) = blend(&f, &mut r);
        let e = class(&sp, &mut r);
        let row = translate(&e, &b, Construction::Row).unwrap();
        let col = translate(&e, &b, Construction::Column).unwrap();
        let inplace = translate_in_place(&e, &b).unwrap();
        prop_assert!(equiv(&row, &col));
        prop_assert!(equiv(&row, &inplace));
    }

    #[test]
    fn translation_is_a_free_action(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let f = frame(Field::Fp(3), &mut r, false);
        let (b, sp) = blend(&f, &mut r);
        let e1 = class(&sp, &mut r);
        let e2 = class(&sp, &mut r);
        let t0 = translate(&sp.zero(), &b, Construction::Row).unwrap();
        prop_assert!(equiv(&t0, &b));
        let sum = translate(&e1.add(&e2).unwrap(), &b, Construction::Row).unwrap();
        let twice = translate(&e1, &translate(&e2, &b, Construction::Column).unwrap(), Construction::Row).unwrap();
        prop_assert!(equiv(&sum, &twice));
        let t1 = translate(&e1, &b, Construction::Row).unwrap();
        prop_assert_eq!(equiv(&t1, &b), e1.is_split());
    }

    #[test]
    fn second_row_shifts_by_pullback(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let f = frame(Field::Q, &mut r, false);
        let (b, sp) = blend(&f, &mut r);
        let e = class(&sp, &mut r);
        let t = translate(&e, &b, Construction::Column).unwrap();
        let expect = second_row(&b).unwrap().add(&pullback(&e, &b.n.proj).unwrap()).unwrap();
        prop_assert_eq!(second_row(&t).unwrap(), expect);
    }

    #[test]
    fn blend_automorphisms_match_hom_a3_a1(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let f = frame(Field::Fp(3), &mut r, true);
        let (b, _) = blend(&f, &mut r);
        let (_, aut) = aut_blend(&b).unwrap();
        prop_assert_eq!(aut.dim(), hom_space(&f.a3, &f.a1).unwrap().dim());
    }
}
