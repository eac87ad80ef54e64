//! Seeded random instances used by tests, the acceptance suite and the CLI.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exactla::{Field, Matrix, Scalar};
use crate::genext::{transport_entries, BlockForm, Frame, GenExt, GenMorphism};
use crate::repcat::{ModelSignature, RepMorphism, WeightedRep};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly drawn scalar: residues for prime fields, small integers for Q.
pub fn scalar(field: Field, rng: &mut impl Rng, bound: i64) -> Scalar {
    match field {
        Field::Q => field.from_i64(rng.gen_range(-bound..=bound)),
        Field::Fp(p) => field.from_i64(rng.gen_range(0..p as i64)),
    }
}

pub fn nonzero_scalar(field: Field, rng: &mut impl Rng, bound: i64) -> Scalar {
    loop {
        let s = scalar(field, rng, bound);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn matrix(field: Field, rows: usize, cols: usize, rng: &mut impl Rng, bound: i64) -> Matrix {
    Matrix::from_fn(field, rows, cols, |_, _| scalar(field, rng, bound))
}

pub fn invertible(field: Field, n: usize, rng: &mut impl Rng, bound: i64) -> Matrix {
    loop {
        let m = matrix(field, n, n, rng, bound);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Random object with the given support and random homogeneous operators.
pub fn rep_with_support(sig: &Arc<ModelSignature>, support: &BTreeMap<i64, usize>, rng: &mut impl Rng, bound: i64) -> WeightedRep {
    let shell = WeightedRep::zero_ops(sig.clone(), support.clone());
    let n = shell.dim();
    let ops = (0..sig.len())
        .map(|t| {
            let mut op = Matrix::zeros(sig.field, n, n);
            for (&p, &dp) in support {
                let q = p + sig.degree(t);
                let dq = shell.dim_at(q);
                if dq > 0 {
                    op.set_block(shell.offset(q), shell.offset(p), &matrix(sig.field, dq, dp, rng, bound));
                }
            }
            op
        })
        .collect();
    WeightedRep::new(sig.clone(), support.clone(), ops).expect("homogeneous by construction")
}

/// Random object whose degrees lie in `degrees`, each of dimension `0..=max_dim`.
pub fn rep(sig: &Arc<ModelSignature>, degrees: &[i64], max_dim: usize, rng: &mut impl Rng, bound: i64) -> WeightedRep {
    let support = degrees.iter().map(|&d| (d, rng.gen_range(0..=max_dim))).collect();
    rep_with_support(sig, &support, rng, bound)
}

/// Random block form: every degree-compatible block filled.
pub fn block_form(frame: &Arc<Frame>, level: usize, rng: &mut impl Rng, bound: i64) -> BlockForm {
    let mut bf = BlockForm::zero(frame.clone(), level).expect("level in range");
    for (i, j, t) in BlockForm::slots(frame, level) {
        bf.blocks.get_mut(&(i, j)).expect("slot")[t] = matrix(frame.field(), frame.dim(i), frame.dim(j), rng, bound);
    }
    bf
}

/// Random invertible degree-0 endomorphism of the graded space of `x`.
pub fn degree_zero_aut(x: &WeightedRep, rng: &mut impl Rng, bound: i64) -> Matrix {
    x.support().values().fold(Matrix::zeros(x.field(), 0, 0), |acc, &d| acc.direct_sum(&invertible(x.field(), d, rng, bound)))
}

/// Replace every non-frame entry of `g` by a randomly conjugated copy.
/// Returns the new diagram and the isomorphism family onto it.
pub fn scramble(g: &GenExt, rng: &mut impl Rng, bound: i64) -> (GenExt, GenMorphism) {
    let mut fs = BTreeMap::new();
    for (&(m, n), x) in g.objects() {
        if n - m >= 2 {
            let p = degree_zero_aut(x, rng, bound);
            let pi = p.inverse().expect("invertible");
            let y = x.with_ops(x.ops().iter().map(|o| p.mul(o).mul(&pi)).collect()).expect("conjugate is homogeneous");
            fs.insert((m, n), RepMorphism::new_unchecked(x.clone(), y, p));
        }
    }
    let out = transport_entries(g, &fs).expect("conjugation preserves the axioms");
    let mut fam = GenMorphism::identity(g);
    fam.maps.extend(fs);
    (out, fam)
}
