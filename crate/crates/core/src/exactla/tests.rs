use proptest::prelude::*;

use super::*;

fn q(rows: &[&[i64]]) -> Matrix {
    Matrix::from_i64(Field::Q, rows)
}

#[test]
fn zero_matrix_kernel_is_everything() {
    let (_, k, im) = rref_kernel_image(&Matrix::zeros(Field::Q, 2, 3));
    assert_eq!(k, Subspace::full(Field::Q, 3));
    assert_eq!(im.dim(), 0);
}

#[test]
fn identity_has_trivial_kernel() {
    let (r, k, im) = rref_kernel_image(&Matrix::identity(Field::Q, 3));
    assert_eq!(r, Matrix::identity(Field::Q, 3));
    assert_eq!(k.dim(), 0);
    assert_eq!(im, Subspace::full(Field::Q, 3));
}

#[test]
fn rank_one_example() {
    let (r, k, im) = rref_kernel_image(&q(&[&[1, 2], &[2, 4]]));
    assert_eq!(r, q(&[&[1, 2], &[0, 0]]));
    // Kernel spanned by (-2, 1); canonical form scales the pivot to 1.
    assert_eq!(k, Subspace::from_rows(2, &q(&[&[-2, 1]])));
    assert_eq!(k.basis(), &Matrix::from_rows(Field::Q, vec![vec![Field::Q.one(), Field::Q.from_ratio(-1, 2)]]).unwrap());
    assert_eq!(im, Subspace::from_rows(2, &q(&[&[1, 2]])));
}

#[test]
fn solve_examples() {
    let b = q(&[&[4, 5], &[6, 7]]);
    assert_eq!(solve(&Matrix::identity(Field::Q, 2), &b).unwrap().unwrap(), b);
    let z = Matrix::zeros(Field::Q, 2, 1);
    assert_eq!(solve(&Matrix::zeros(Field::Q, 2, 2), &z).unwrap().unwrap(), z);
    let x = solve(&q(&[&[2]]), &q(&[&[3]])).unwrap().unwrap();
    assert_eq!(x.get(0, 0), &Field::Q.from_ratio(3, 2));
    assert!(solve(&q(&[&[0]]), &q(&[&[1]])).unwrap().is_none());
    assert!(solve(&q(&[&[1]]), &q(&[&[1], &[2]])).is_err());
}

#[test]
fn solve_sets_free_variables_to_zero() {
    let x = solve(&q(&[&[1, 1]]), &q(&[&[5]])).unwrap().unwrap();
    assert_eq!(x, q(&[&[5], &[0]]));
}

#[test]
fn subspace_examples() {
    let u = Subspace::from_rows(2, &q(&[&[1, 0]]));
    let v = Subspace::from_rows(2, &q(&[&[0, 1]]));
    let (s, i, c) = subspace_ops(&u, &v).unwrap();
    assert_eq!(s.dim(), 2);
    assert_eq!(i.dim(), 0);
    assert!(!c);
    let (s, i, c) = subspace_ops(&u, &u).unwrap();
    assert_eq!((s, i, c), (u.clone(), u.clone(), true));
    let a = Subspace::from_rows(3, &q(&[&[1, 1, 0]]));
    let b = Subspace::from_rows(3, &q(&[&[1, 1, 0], &[0, 0, 1]]));
    assert!(b.contains(&a).unwrap());
    assert!(!a.contains(&b).unwrap());
    assert!(a.sum(&Subspace::zero(Field::Q, 2)).is_err());
}

#[test]
fn prime_field_rank() {
    let f = Field::Fp(2);
    let m = Matrix::from_i64(f, &[&[1, 1], &[1, 1]]);
    assert_eq!(m.rank(), 1);
    let m = Matrix::from_i64(f, &[&[1, 1], &[1, 3]]);
    assert_eq!(m.rank(), 1);
    assert_eq!(Matrix::from_i64(Field::Fp(3), &[&[1, 1], &[1, 3]]).rank(), 2);
}

#[test]
fn inverse_round_trip() {
    let m = q(&[&[2, 1], &[1, 1]]);
    let inv = m.inverse().unwrap();
    assert_eq!(m.mul(&inv), Matrix::identity(Field::Q, 2));
    assert!(q(&[&[1, 2], &[2, 4]]).inverse().is_none());
}

#[test]
fn mixed_field_product_is_rejected() {
    let a = Matrix::identity(Field::Q, 2);
    let b = Matrix::identity(Field::Fp(3), 2);
    assert_eq!(a.try_mul(&b), Err(LaError::MixedField));
    assert!(solve(&a, &b).is_err());
}

#[test]
fn text_round_trip() {
    let m = Matrix::from_rows(Field::Q, vec![vec![Field::Q.from_ratio(-3, 6), Field::Q.from_i64(7)]]).unwrap();
    let t = m.to_text_rows();
    assert_eq!(t, vec![vec!["-1/2".to_string(), "7".to_string()]]);
    assert_eq!(Matrix::from_text_rows(Field::Q, &t, Some((1, 2))).unwrap(), m);
}

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Q), Just(Field::Fp(2)), Just(Field::Fp(3)), Just(Field::Fp(7))]
}

fn matrix_strategy() -> impl Strategy<Value = Matrix> {
    (field_strategy(), 0usize..6, 0usize..6).prop_flat_map(|(f, r, c)| {
        proptest::collection::vec(-4i64..=4, r * c).prop_map(move |v| {
            Matrix::from_vec(f, r, c, v.into_iter().map(|x| f.from_i64(x)).collect())
        })
    })
}

fn pair_strategy() -> impl Strategy<Value = (Matrix, Matrix)> {
    (field_strategy(), 0usize..5, 0usize..5, 1usize..6).prop_flat_map(|(f, r1, r2, c)| {
        let e = proptest::collection::vec(-3i64..=3, (r1 + r2) * c);
        e.prop_map(move |v| {
            let s: Vec<Scalar> = v.into_iter().map(|x| f.from_i64(x)).collect();
            (Matrix::from_vec(f, r1, c, s[..r1 * c].to_vec()), Matrix::from_vec(f, r2, c, s[r1 * c..].to_vec()))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rref_is_idempotent(m in matrix_strategy()) {
        let (r, _) = m.rref();
        prop_assert_eq!(r.rref().0, r);
    }

    #[test]
    fn rank_nullity(m in matrix_strategy()) {
        let (_, k, im) = rref_kernel_image(&m);
        prop_assert_eq!(k.dim() + im.dim(), m.cols());
        for v in k.basis_vectors() {
            prop_assert!(m.mul(&Matrix::column(m.field(), &v)).is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_is_unique(m in matrix_strategy(), mix in proptest::collection::vec(-3i64..=3, 36)) {
        // An invertible recombination of the rows spans the same subspace.
        let f = m.field();
        let n = m.rows();
        let mut g = Matrix::from_fn(f, n, n, |i, j| f.from_i64(mix[(i * 6 + j) % mix.len()]));
        if !g.is_invertible() {
            g = Matrix::identity(f, n);
        }
        let a = Subspace::from_rows(m.cols(), &m);
        let b = Subspace::from_rows(m.cols(), &g.mul(&m));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sum_intersection_dimension((m1, m2) in pair_strategy()) {
        let u = m1.row_space();
        let v = m2.row_space();
        let (s, i, _) = subspace_ops(&u, &v).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), u.dim() + v.dim());
        prop_assert!(u.contains(&i).unwrap() && v.contains(&i).unwrap());
        prop_assert!(s.contains(&u).unwrap() && s.contains(&v).unwrap());
    }

    #[test]
    fn solve_returns_solutions(m in matrix_strategy(), seed in 0i64..50) {
        let f = m.field();
        let x0 = Matrix::from_fn(f, m.cols(), 1, |i, _| f.from_i64(seed + i as i64));
        let b = m.mul(&x0);
        let x = solve(&m, &b).unwrap().expect("consistent by construction");
        prop_assert_eq!(m.mul(&x), b);
    }
}
