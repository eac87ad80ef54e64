use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::exactla::{Field, Matrix, Scalar};
use crate::extmod::{class_of, ExtClass, ExtSpace};
use crate::random::{self, Rng64};
use crate::repcat::{direct_sum, ModelSignature, RepMorphism, WeightedRep};

fn sig(field: Field, gens: &[i64]) -> Arc<ModelSignature> {
    let names: Vec<String> = (0..gens.len()).map(|i| format!("e{}", i + 1)).collect();
    ModelSignature::new(field, names.iter().zip(gens).map(|(n, &d)| (n.as_str(), d)).collect()).unwrap()
}

fn frame(field: Field, weights: &[i64], gens: &[i64], rng: &mut Rng64, max_dim: usize) -> Arc<Frame> {
    use rand::Rng;
    let s = sig(field, gens);
    Frame::new(weights.iter().map(|&w| WeightedRep::pure(s.clone(), w, rng.gen_range(1..=max_dim))).collect()).unwrap()
}

fn four(field: Field, rng: &mut Rng64) -> Arc<Frame> {
    frame(field, &[-3, -2, -1, 0], &[-1, -2, -3], rng, 2)
}

fn random_blocks(frame: &Arc<Frame>, level: usize, rng: &mut Rng64) -> BlockForm {
    let mut bf = BlockForm::zero(frame.clone(), level).unwrap();
    for (i, j, t) in BlockForm::slots(frame, level) {
        bf.blocks.get_mut(&(i, j)).unwrap()[t] = random::matrix(frame.field(), frame.dim(i), frame.dim(j), rng, 3);
    }
    bf
}

fn degree_zero_aut(x: &WeightedRep, rng: &mut Rng64) -> Matrix {
    x.support().values().fold(Matrix::zeros(x.field(), 0, 0), |acc, &d| acc.direct_sum(&random::invertible(x.field(), d, rng, 3)))
}

/// Replace every non-frame entry by an isomorphic copy; returns the new
/// diagram and the family from `g` to it.
fn scramble(g: &GenExt, rng: &mut Rng64) -> (GenExt, GenMorphism) {
    let mut fs = BTreeMap::new();
    for (&(m, n), x) in g.objects() {
        if n - m >= 2 {
            let p = degree_zero_aut(x, rng);
            let pi = p.inverse().unwrap();
            let y = x.with_ops(x.ops().iter().map(|o| p.mul(o).mul(&pi)).collect()).unwrap();
            fs.insert((m, n), RepMorphism::new(x.clone(), y, p).unwrap());
        }
    }
    let out = transport_entries(g, &fs).unwrap();
    let mut fam = GenMorphism::identity(g);
    for (e, f) in fs {
        fam.maps.insert(e, f);
    }
    is_morphism(g, &out, &fam).unwrap();
    (out, fam)
}

fn random_genext(field: Field, level: usize, seed: u64) -> GenExt {
    let mut rng = random::rng(seed);
    let fr = four(field, &mut rng);
    let g = random_blocks(&fr, level, &mut rng).denormalize().unwrap();
    scramble(&g, &mut rng).0
}

/// Diagonal family `denormalize(bf) -> denormalize(σ·bf)`, and the target.
fn diagonal_twist(bf: &BlockForm, sigma: &[Matrix]) -> (GenExt, GenExt, GenMorphism) {
    let mut tw = bf.clone();
    for ((i, j), bs) in tw.blocks.iter_mut() {
        let inv = sigma[*j - 1].inverse().unwrap();
        for b in bs.iter_mut() {
            *b = sigma[*i - 1].mul(b).mul(&inv);
        }
    }
    let (g1, g2) = (bf.denormalize().unwrap(), tw.denormalize().unwrap());
    let maps = g1
        .entries()
        .into_iter()
        .map(|(m, n)| {
            let d = (m + 2..=n).fold(sigma[m].clone(), |acc, r| acc.direct_sum(&sigma[r - 1]));
            ((m, n), RepMorphism::new(g1.obj(m, n).clone(), g2.obj(m, n).clone(), d).unwrap())
        })
        .collect();
    let fam = GenMorphism { maps };
    is_morphism(&g1, &g2, &fam).unwrap();
    (g1, g2, fam)
}

fn random_sigma(frame: &Frame, rng: &mut Rng64) -> Vec<Matrix> {
    (1..=frame.k()).map(|r| random::invertible(frame.field(), frame.dim(r), rng, 3)).collect()
}

fn random_element(fiber: &Fiber, rng: &mut Rng64) -> Vec<ExtClass> {
    let c: Vec<Scalar> = (0..fiber.group_dim()).map(|_| random::scalar(fiber.base().frame().field(), rng, 3)).collect();
    fiber.element(&c)
}

fn strict(g1: &GenExt, g2: &GenExt) -> bool {
    equiv(g1, g2, EquivMode::Strict, &mut random::rng(0)).unwrap().is_some()
}

#[test]
fn frame_rejects_bad_pieces() {
    let s = sig(Field::Q, &[-1]);
    assert!(Frame::new(vec![WeightedRep::pure(s.clone(), 0, 1)]).is_err());
    assert!(Frame::new(vec![WeightedRep::pure(s.clone(), 0, 1), WeightedRep::pure(s.clone(), -1, 1)]).is_err());
    assert!(Frame::new(vec![WeightedRep::pure(s.clone(), 0, 1), WeightedRep::pure(s.clone(), 1, 0)]).is_err());
    let mixed = direct_sum(&[WeightedRep::pure(s.clone(), 1, 1), WeightedRep::pure(s.clone(), 2, 1)]).unwrap();
    assert!(Frame::new(vec![WeightedRep::pure(s.clone(), 0, 1), mixed]).is_err());
    let f = Frame::new(vec![WeightedRep::pure(s.clone(), 0, 1), WeightedRep::pure(s, 1, 2)]).unwrap();
    assert_eq!((f.k(), f.weight(2), f.dim(2)), (2, 1, 2));
}

#[test]
fn level_one_data_is_a_chain_of_extensions() {
    let mut rng = random::rng(3);
    let fr = four(Field::Q, &mut rng);
    let bf = random_blocks(&fr, 1, &mut rng);
    let g = bf.denormalize().unwrap();
    assert_eq!(g.entries().len(), 4 + 3);
    for r in 1..=3 {
        let e = class_of(&g.vext(r - 1, r + 1)).unwrap();
        assert_eq!(e.cocycle(), &bf.blocks[&(r, r + 1)][..]);
    }
}

#[test]
fn zero_blocks_give_a_split_diagram() {
    let mut rng = random::rng(4);
    let fr = four(Field::Q, &mut rng);
    let g = BlockForm::zero(fr, 3).unwrap().denormalize().unwrap();
    for (m, n) in g.entries().into_iter().filter(|e| e.1 - e.0 >= 2) {
        assert!(class_of(&g.vext(m, n)).unwrap().is_split());
        assert!(class_of(&g.hext(m, n)).unwrap().is_split());
    }
}

#[test]
fn non_exact_column_names_the_entry() {
    let g = random_genext(Field::Q, 2, 5);
    let mut vert = g.verticals().clone();
    let v = vert.get_mut(&(0, 3)).unwrap();
    v.matrix = v.matrix.scale(&Field::Q.zero());
    let err = GenExt::new(g.frame().clone(), 2, g.objects().clone(), vert, g.horizontals().clone()).unwrap_err();
    assert!(err.to_string().contains("entry (0,3)"), "{err}");

    let mut objects = g.objects().clone();
    objects.remove(&(1, 4));
    let err = GenExt::new(g.frame().clone(), 2, objects, g.verticals().clone(), g.horizontals().clone()).unwrap_err();
    assert!(err.to_string().contains("entry (1,4)"), "{err}");
}

#[test]
fn squares_must_commute() {
    let g = random_genext(Field::Q, 3, 6);
    let mut horiz = g.horizontals().clone();
    let h = horiz.get_mut(&(1, 4)).unwrap();
    h.matrix = h.matrix.scale(&Field::Q.from_i64(2));
    let err = GenExt::new(g.frame().clone(), 3, g.objects().clone(), g.verticals().clone(), horiz).unwrap_err();
    assert!(err.to_string().contains("entry (1,4)"), "{err}");
}

#[test]
fn truncation_and_cropping() {
    let mut rng = random::rng(7);
    let fr = four(Field::Q, &mut rng);
    let bf = random_blocks(&fr, 3, &mut rng);
    let g = bf.denormalize().unwrap();
    assert_eq!(g.truncate().unwrap(), bf.truncate().unwrap().denormalize().unwrap());
    assert_eq!(g.truncate().unwrap().truncate().unwrap().level(), 1);
    assert!(g.truncate().unwrap().truncate().unwrap().truncate().is_err());
    let c = g.crop(1, 4).unwrap();
    assert_eq!((c.k(), c.level()), (3, 2));
    c.validate().unwrap();
    assert_eq!(c.obj(0, 3), g.obj(1, 4));
    let c = g.truncate().unwrap().crop(0, 3).unwrap();
    assert_eq!((c.k(), c.level()), (3, 2));
    assert!(g.crop(2, 3).is_err());
    assert!(g.crop(1, 5).is_err());
}

#[test]
fn normal_form_round_trip() {
    let mut rng = random::rng(8);
    for field in [Field::Q, Field::Fp(3)] {
        let fr = four(field, &mut rng);
        let bf = random_blocks(&fr, 3, &mut rng);
        let g = bf.denormalize().unwrap();
        let (s, _) = scramble(&g, &mut rng);
        assert_ne!(s, g);
        let (bf2, fam) = s.normalize().unwrap();
        assert_eq!(bf2, bf);
        assert!(fam.is_identity_on_a());
        is_morphism(&s, &g, &fam).unwrap();
    }
}

#[test]
fn gr_iso_is_compatible_with_arrows() {
    let g = random_genext(Field::Q, 3, 9);
    for (m, n) in g.entries().into_iter().filter(|e| e.1 - e.0 >= 2) {
        let c = g.gr_iso(m, n).unwrap();
        let up = g.gr_iso(m, n - 1).unwrap();
        let right = g.gr_iso(m + 1, n).unwrap();
        let span = g.frame().span(m, n);
        let top = g.frame().span(m, n - 1).dim();
        let mut incl = Matrix::zeros(Field::Q, span.dim(), top);
        incl.set_block(0, 0, &Matrix::identity(Field::Q, top));
        assert_eq!(c.matrix.mul(&g.v(m, n).matrix), incl.mul(&up.matrix));
        let rest = g.frame().span(m + 1, n).dim();
        let proj = Matrix::identity(Field::Q, span.dim()).submatrix(span.dim() - rest, rest, 0, span.dim());
        assert_eq!(right.matrix.mul(&g.h(m, n).matrix), proj.mul(&c.matrix));
    }
}

#[test]
fn aut_a_action_laws() {
    let mut rng = random::rng(10);
    let g = random_genext(Field::Q, 2, 11);
    let id: Vec<Matrix> = (1..=4).map(|r| Matrix::identity(Field::Q, g.frame().dim(r))).collect();
    assert_eq!(g.act_aut_a(&id).unwrap(), g);
    let s = random_sigma(g.frame(), &mut rng);
    let t = random_sigma(g.frame(), &mut rng);
    let st: Vec<Matrix> = s.iter().zip(&t).map(|(a, b)| a.mul(b)).collect();
    assert_eq!(g.act_aut_a(&st).unwrap(), g.act_aut_a(&t).unwrap().act_aut_a(&s).unwrap());
    assert_eq!(g.act_aut_a(&s).unwrap().truncate().unwrap(), g.truncate().unwrap().act_aut_a(&s).unwrap());
    let mut bad = s.clone();
    bad[2] = Matrix::zeros(Field::Q, g.frame().dim(3), g.frame().dim(3));
    assert!(g.act_aut_a(&bad).is_err());
}

#[test]
fn level_one_action_is_pushforward_then_pullback() {
    let mut rng = random::rng(12);
    let g = random_genext(Field::Q, 1, 13);
    let s = random_sigma(g.frame(), &mut rng);
    let h = g.act_aut_a(&s).unwrap();
    for r in 1..=3 {
        let e = class_of(&g.vext(r - 1, r + 1)).unwrap();
        let moved = act_on_group(&s[r - 1..], &[e], 1).unwrap();
        assert_eq!(class_of(&h.vext(r - 1, r + 1)).unwrap(), moved[0]);
    }
}

#[test]
fn split_object_gives_split_diagram() {
    let mut rng = random::rng(14);
    let fr = four(Field::Q, &mut rng);
    let x = direct_sum(fr.parts()).unwrap();
    let phi = RepMorphism::identity(&x);
    let g = from_object(&fr, &x, &phi).unwrap();
    assert_eq!(g.level(), 3);
    assert_eq!(g, BlockForm::zero(fr, 3).unwrap().denormalize().unwrap());
}

#[test]
fn from_object_recovers_phi_and_intertwines_aut_a() {
    let mut rng = random::rng(15);
    let fr = four(Field::Q, &mut rng);
    let x = random_blocks(&fr, 3, &mut rng).object(0, 4);
    let p = degree_zero_aut(&x, &mut rng);
    let pi = p.inverse().unwrap();
    let y = x.with_ops(x.ops().iter().map(|o| p.mul(o).mul(&pi)).collect()).unwrap();
    let a = fr.span(0, 4);
    let phi = RepMorphism::new(crate::repcat::gr(&y), a.clone(), pi.clone()).unwrap();
    let g = from_object(&fr, &y, &phi).unwrap();
    assert_eq!(g.gr_iso(0, 4).unwrap().matrix, phi.matrix);
    let s = random_sigma(&fr, &mut rng);
    let sd = s.iter().skip(1).fold(s[0].clone(), |acc, m| acc.direct_sum(m));
    let sphi = RepMorphism::new(phi.source.clone(), a, sd.mul(&phi.matrix)).unwrap();
    let lhs = from_object(&fr, &y, &sphi).unwrap();
    assert!(strict(&lhs, &g.act_aut_a(&s).unwrap()));
    assert_eq!(lhs.gr_iso(0, 4).unwrap().matrix, sphi.matrix);
    let sing = RepMorphism::zero(&phi.source, &phi.target);
    assert!(from_object(&fr, &y, &sing).is_err());
}

#[test]
fn three_weight_object_gives_a_blend() {
    let mut rng = random::rng(16);
    let fr = frame(Field::Q, &[-2, -1, 0], &[-1, -2], &mut rng, 2);
    let x = random_blocks(&fr, 2, &mut rng).object(0, 3);
    let phi = RepMorphism::new(crate::repcat::gr(&x), fr.span(0, 3), Matrix::identity(Field::Q, x.dim())).unwrap();
    let g = from_object(&fr, &x, &phi).unwrap();
    let fiber = Fiber::new(&g.truncate().unwrap()).unwrap();
    let b = fiber.blend(&g, 1);
    b.validate().unwrap();
    assert_eq!(b.mid, x);
}

#[test]
fn strict_and_iso_equivalence() {
    let mut rng = random::rng(17);
    let fr = four(Field::Q, &mut rng);
    let bf = random_blocks(&fr, 2, &mut rng);
    let g = bf.denormalize().unwrap();
    let f = equiv(&g, &g, EquivMode::Strict, &mut rng).unwrap().unwrap();
    assert_eq!(f, GenMorphism::identity(&g));
    let (s, _) = scramble(&g, &mut rng);
    let f = equiv(&g, &s, EquivMode::Strict, &mut rng).unwrap().unwrap();
    is_morphism(&g, &s, &f).unwrap();
    assert!(f.is_identity_on_a() && f.is_iso());

    let lam = |c: i64| (1..=4).map(|r| Matrix::scalar(Field::Q, fr.dim(r), &Field::Q.from_i64(c))).collect::<Vec<_>>();
    assert!(strict(&g, &g.act_aut_a(&lam(5)).unwrap()));
    let distinct: Vec<Matrix> = (1..=4).map(|r| Matrix::scalar(Field::Q, fr.dim(r), &Field::Q.from_i64(r as i64 + 1))).collect();
    let h = g.act_aut_a(&distinct).unwrap();
    let moved = equiv(&g, &h, EquivMode::Iso, &mut rng).unwrap().unwrap();
    is_morphism(&g, &h, &moved).unwrap();
    assert!(moved.is_iso());
    let nontrivial = bf.blocks.values().any(|bs| bs.iter().any(|b| !b.is_zero()));
    assert_eq!(strict(&g, &h), !nontrivial);
}

#[test]
fn equiv_rejects_different_frames() {
    let g1 = random_genext(Field::Q, 2, 18);
    let g2 = random_genext(Field::Q, 2, 19);
    let g3 = random_genext(Field::Q, 1, 18);
    if g1.frame() != g2.frame() {
        assert!(matches!(equiv(&g1, &g2, EquivMode::Strict, &mut random::rng(0)), Err(crate::Error::Endpoint(_))));
    }
    assert!(matches!(equiv(&g1, &g3, EquivMode::Iso, &mut random::rng(0)), Err(crate::Error::Endpoint(_))));
}

#[test]
fn spreading_and_gluing() {
    let mut rng = random::rng(20);
    let fr = four(Field::Q, &mut rng);
    let g = random_blocks(&fr, 2, &mut rng).denormalize().unwrap();
    let id = spread_morphism(&g, &g, (1, 4), &RepMorphism::identity(g.obj(1, 4))).unwrap();
    assert_eq!(id.maps.len(), 6);
    assert!(id.maps.values().all(|f| f.matrix == Matrix::identity(Field::Q, f.matrix.rows())));

    let (s1, f1) = scramble(&g, &mut rng);
    let (s2, f12) = scramble(&s1, &mut rng);
    let a = spread_morphism(&g, &s1, (0, 3), f1.at(0, 3)).unwrap();
    let b = spread_morphism(&s1, &s2, (0, 3), f12.at(0, 3)).unwrap();
    let ab = spread_morphism(&g, &s2, (0, 3), &f1.at(0, 3).then(f12.at(0, 3))).unwrap();
    assert_eq!(a.then(&b), ab);
    for (e, h) in &a.maps {
        assert_eq!(h, f1.at(e.0, e.1));
    }

    let lowest = [f1.at(0, 3).clone(), f1.at(1, 4).clone()];
    assert_eq!(glue_lowest(&g, &s1, &lowest).unwrap(), Glued::Morphism(f1.clone()));
    let two = Field::Q.from_i64(2);
    let clash = [f1.at(0, 3).clone(), f1.at(1, 4).scale(&two)];
    assert_eq!(glue_lowest(&g, &s1, &clash).unwrap(), Glued::Incompatible((1, 2)));
    assert!(spread_morphism(&g, &s1, (0, 4), &RepMorphism::identity(g.obj(0, 3))).is_err());
}

#[test]
fn fiber_section_and_coordinates() {
    let mut rng = random::rng(21);
    for (field, level) in [(Field::Q, 2), (Field::Q, 3), (Field::Fp(5), 2)] {
        let fr = four(field, &mut rng);
        let g = random_blocks(&fr, level, &mut rng).denormalize().unwrap();
        let (base, _) = scramble(&g.truncate().unwrap(), &mut rng);
        let fiber = Fiber::new(&base).unwrap();
        assert_eq!(fiber.groups().len(), 4 - level);
        let zero = fiber.lift(&fiber.zero()).unwrap();
        assert_eq!(zero.truncate().unwrap(), base);
        assert!(strict(&zero, fiber.base_point()));
        for _ in 0..3 {
            let c = random_element(&fiber, &mut rng);
            let x = fiber.lift(&c).unwrap();
            assert_eq!(fiber.coords(&x).unwrap(), c);
            assert_eq!(fiber.block_coords(&x).unwrap(), c);
            assert!(strict(&fiber.from_blocks(&c).unwrap(), &x));
            let e = random_element(&fiber, &mut rng);
            let sum: Vec<ExtClass> = e.iter().zip(&c).map(|(a, b)| a.add(b).unwrap()).collect();
            assert_eq!(fiber.coords(&fiber.act(&e, &x).unwrap()).unwrap(), sum);
        }
    }
}

#[test]
fn torsor_group_for_three_pieces() {
    let mut rng = random::rng(22);
    let fr = frame(Field::Q, &[-2, -1, 0], &[-1, -2], &mut rng, 2);
    let base = random_blocks(&fr, 1, &mut rng).denormalize().unwrap();
    let fiber = Fiber::new(&base).unwrap();
    assert_eq!(fiber.groups().len(), 1);
    let ext = ExtSpace::new(fr.part(3), fr.part(1)).unwrap();
    assert_eq!(fiber.groups()[0].dim(), ext.dim());
    assert_eq!(ext.dim(), fr.dim(1) * fr.dim(3));
    let g2 = random_blocks(&fr, 2, &mut rng).denormalize().unwrap();
    assert!(Fiber::new(&g2).is_err());
}

#[test]
fn f2_fibers_have_two_elements() {
    let s = sig(Field::Fp(2), &[-1, -2]);
    let fr = Frame::new([-2, -1, 0].iter().map(|&w| WeightedRep::pure(s.clone(), w, 1)).collect()).unwrap();
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let mut bf = BlockForm::zero(fr.clone(), 1).unwrap();
        bf.blocks.get_mut(&(1, 2)).unwrap()[0] = Matrix::scalar(Field::Fp(2), 1, &Field::Fp(2).from_i64(a));
        bf.blocks.get_mut(&(2, 3)).unwrap()[0] = Matrix::scalar(Field::Fp(2), 1, &Field::Fp(2).from_i64(b));
        let fiber = Fiber::new(&bf.denormalize().unwrap()).unwrap();
        let members: Vec<GenExt> = fiber.all_elements().iter().map(|e| fiber.lift(e).unwrap()).collect();
        assert_eq!(members.len(), 2);
        assert!(!strict(&members[0], &members[1]));
    }
}

#[test]
fn translation_is_free_over_q() {
    let mut rng = random::rng(23);
    let fr = four(Field::Q, &mut rng);
    let base = random_blocks(&fr, 1, &mut rng).denormalize().unwrap();
    let fiber = Fiber::new(&base).unwrap();
    let x = fiber.lift(&random_element(&fiber, &mut rng)).unwrap();
    for _ in 0..4 {
        let e = random_element(&fiber, &mut rng);
        let moved = fiber.act(&e, &x).unwrap();
        assert_eq!(strict(&moved, &x), e.iter().all(ExtClass::is_split));
    }
}

#[test]
fn transport_laws() {
    let mut rng = random::rng(24);
    let fr = four(Field::Q, &mut rng);
    let bf = random_blocks(&fr, 2, &mut rng);
    let g = bf.denormalize().unwrap();
    let base = g.truncate().unwrap();
    assert_eq!(transport(&g, &GenMorphism::identity(&base), &base).unwrap(), g);

    let sigma = random_sigma(&fr, &mut rng);
    let (b0, b1, f) = diagonal_twist(&bf.truncate().unwrap(), &sigma);
    assert_eq!(b0, base);
    let (b2, h) = scramble(&b1, &mut rng);
    let once = transport(&transport(&g, &f, &b1).unwrap(), &h, &b2).unwrap();
    assert_eq!(once, transport(&g, &f.then(&h), &b2).unwrap());
    assert!(transport(&g, &h, &b2).is_err());
}

#[test]
fn transport_formula_with_distinct_scalars() {
    let mut rng = random::rng(25);
    let fr = four(Field::Q, &mut rng);
    let bf = random_blocks(&fr, 2, &mut rng);
    let g = bf.denormalize().unwrap();
    let sigma: Vec<Matrix> = (1..=4).map(|r| Matrix::scalar(Field::Q, fr.dim(r), &Field::Q.from_i64(r as i64 + 1))).collect();
    let (_, target, f) = diagonal_twist(&bf.truncate().unwrap(), &sigma);
    let fiber = Fiber::new(&g.truncate().unwrap()).unwrap();
    let e = fiber.element(&vec![Field::Q.one(); fiber.group_dim()]);
    let moved = act_on_group(&sigma, &e, 2).unwrap();
    assert_ne!(moved, e);
    let (lhs, rhs, ok) = transport_formula_check(&g, &e, &f, &target, &mut rng).unwrap();
    assert!(ok);
    let naive = Fiber::new(&target).unwrap().act(&e, &transport(&g, &f, &target).unwrap()).unwrap();
    assert!(!strict(&lhs, &naive));
    assert!(strict(&lhs, &rhs));
}

#[test]
fn scalar_transport_is_translation_equivariant() {
    let mut rng = random::rng(26);
    let fr = four(Field::Q, &mut rng);
    let bf = random_blocks(&fr, 3, &mut rng);
    let g = bf.denormalize().unwrap();
    let lam: Vec<Matrix> = (1..=4).map(|r| Matrix::scalar(Field::Q, fr.dim(r), &Field::Q.from_i64(-7))).collect();
    let (_, t1, f) = diagonal_twist(&bf.truncate().unwrap(), &lam);
    let (target, h) = scramble(&t1, &mut rng);
    let f = f.then(&h);
    let src = Fiber::new(&g.truncate().unwrap()).unwrap();
    let dst = Fiber::new(&target).unwrap();
    let e = random_element(&src, &mut rng);
    let lhs = transport(&src.act(&e, &g).unwrap(), &f, &target).unwrap();
    let rhs = dst.act(&e, &transport(&g, &f, &target).unwrap()).unwrap();
    assert!(strict(&lhs, &rhs));
}

#[test]
fn stabilizer_of_split_member_is_everything() {
    let mut rng = random::rng(27);
    let fr = four(Field::Q, &mut rng);
    let g = BlockForm::zero(fr.clone(), 2).unwrap().denormalize().unwrap();
    let st = gamma_stabilizer(&g.truncate().unwrap(), &g).unwrap();
    let full: usize = (1..=4).map(|r| fr.dim(r).pow(2)).sum();
    assert_eq!(st.aut_base_a.dim(), full);
    assert_eq!(st.stabilizer.dim(), full);
    assert!(gamma_stabilizer(&g, &g).is_err());
}

#[test]
fn stabilizer_predicts_gamma_fixed_points() {
    let mut rng = random::rng(28);
    let field = Field::Fp(3);
    let s = sig(field, &[-1, -2]);
    let fr = Frame::new([-2, -1, 0].iter().map(|&w| WeightedRep::pure(s.clone(), w, 1)).collect()).unwrap();
    let mut bf = BlockForm::zero(fr.clone(), 1).unwrap();
    bf.blocks.get_mut(&(1, 2)).unwrap()[0] = Matrix::scalar(field, 1, &field.one());
    let (base, _) = scramble(&bf.denormalize().unwrap(), &mut rng);
    let fiber = Fiber::new(&base).unwrap();
    let st0 = gamma_stabilizer(&base, fiber.base_point()).unwrap();
    let auts: Vec<GenMorphism> = {
        let els = field.elements();
        let dim = st0.aut_base.dim();
        let mut out = vec![vec![]];
        for _ in 0..dim {
            out = out.into_iter().flat_map(|c: Vec<Scalar>| els.iter().map(move |e| [c.clone(), vec![e.clone()]].concat())).collect();
        }
        out.iter().map(|c| st0.aut_base.family(c)).filter(GenMorphism::is_iso).collect()
    };
    assert_eq!(auts.len(), 4);
    let members: Vec<GenExt> = fiber.all_elements().iter().map(|e| fiber.lift(e).unwrap()).collect();
    let mut orbit_total = 0;
    let mut seen: Vec<GenExt> = Vec::new();
    for y in &members {
        let st = gamma_stabilizer(&base, y).unwrap();
        let mut orbit: Vec<GenExt> = Vec::new();
        for a in &auts {
            let moved = fiber.gamma_act(a, y).unwrap();
            assert_eq!(strict(&moved, y), st.fixes(a));
            if !orbit.iter().any(|o| strict(o, &moved)) {
                orbit.push(moved);
            }
        }
        let fixed = auts.iter().filter(|a| st.fixes(a)).count();
        assert_eq!(orbit.len() * fixed, auts.len());
        if !seen.iter().any(|s| orbit.iter().any(|o| strict(o, s))) {
            seen.push(y.clone());
            orbit_total += orbit.len();
        }
    }
    assert_eq!(orbit_total, members.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn normal_form_is_a_strict_invariant(seed in 0u64..10_000, level in 1usize..=3) {
        let mut rng = random::rng(seed);
        let fr = four(Field::Q, &mut rng);
        let bf = random_blocks(&fr, level, &mut rng);
        let g = bf.denormalize().unwrap();
        let (s, _) = scramble(&g, &mut rng);
        prop_assert_eq!(s.block_form().unwrap(), bf.clone());
        prop_assert!(strict(&g, &s));
        let other = random_blocks(&fr, level, &mut rng);
        prop_assert_eq!(strict(&g, &other.denormalize().unwrap()), other == bf);
    }

    #[test]
    fn torsor_action_is_additive(seed in 0u64..10_000) {
        let mut rng = random::rng(seed);
        let fr = four(Field::Q, &mut rng);
        let base = scramble(&random_blocks(&fr, 1, &mut rng).denormalize().unwrap(), &mut rng).0;
        let fiber = Fiber::new(&base).unwrap();
        let x = fiber.lift(&random_element(&fiber, &mut rng)).unwrap();
        let e1 = random_element(&fiber, &mut rng);
        let e2 = random_element(&fiber, &mut rng);
        let sum: Vec<ExtClass> = e1.iter().zip(&e2).map(|(a, b)| a.add(b).unwrap()).collect();
        let twice = fiber.act(&e1, &fiber.act(&e2, &x).unwrap()).unwrap();
        prop_assert!(strict(&twice, &fiber.act(&sum, &x).unwrap()));
        prop_assert!(strict(&fiber.act(&fiber.zero(), &x).unwrap(), &x));
    }

    #[test]
    fn aut_a_action_descends_to_strict_classes(seed in 0u64..10_000) {
        let mut rng = random::rng(seed);
        let fr = four(Field::Q, &mut rng);
        let g = random_blocks(&fr, 2, &mut rng).denormalize().unwrap();
        let (s, _) = scramble(&g, &mut rng);
        let sigma = random_sigma(&fr, &mut rng);
        prop_assert!(strict(&g.act_aut_a(&sigma).unwrap(), &s.act_aut_a(&sigma).unwrap()));
        prop_assert!(equiv(&g, &s.act_aut_a(&sigma).unwrap(), EquivMode::Iso, &mut rng).unwrap().is_some());
    }

    #[test]
    fn transport_formula_holds(seed in 0u64..10_000) {
        let mut rng = random::rng(seed);
        let fr = four(Field::Q, &mut rng);
        let bf = random_blocks(&fr, 2, &mut rng);
        let g = scramble(&bf.denormalize().unwrap(), &mut rng).0;
        let sigma = random_sigma(&fr, &mut rng);
        let (b0, t1, f0) = diagonal_twist(&g.block_form().unwrap().truncate().unwrap(), &sigma);
        let to_b0 = equiv(&g.truncate().unwrap(), &b0, EquivMode::Strict, &mut rng).unwrap().unwrap();
        let (target, h) = scramble(&t1, &mut rng);
        let f = to_b0.then(&f0).then(&h);
        let fiber = Fiber::new(&g.truncate().unwrap()).unwrap();
        let e = random_element(&fiber, &mut rng);
        let (_, _, ok) = transport_formula_check(&g, &e, &f, &target, &mut rng).unwrap();
        prop_assert!(ok);
    }
}
