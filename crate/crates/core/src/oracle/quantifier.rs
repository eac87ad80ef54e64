//! The definition of total nonsplitting, quantified over every proper
//! subobject, against the generated-subobject criterion.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{Field, Matrix, Scalar, Subspace};
use crate::extmod::{pushforward, ExtClass, ExtSpace};
use crate::motivic::totally_nonsplit;
use crate::repcat::{cokernel, subobject_from_parts, ModelSignature, RepMorphism, WeightedRep};

/// Every subspace of `F_p^n`, one per reduced echelon pattern.
pub fn enumerate_subspaces(field: Field, n: usize) -> Vec<Subspace> {
    let el = field.elements();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let pivots: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        // Free positions: right of the pivot, not in a pivot column.
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| (c + 1..n).filter(|j| !pivots.contains(j)).map(move |j| (r, j)))
            .collect();
        let mut fills: Vec<Vec<Scalar>> = vec![vec![]];
        for _ in &free {
            fills = fills.into_iter().flat_map(|pre| el.iter().map(move |e| [pre.clone(), vec![e.clone()]].concat())).collect();
        }
        for fill in fills {
            let mut rows = vec![vec![field.zero(); n]; pivots.len()];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = field.one();
            }
            for (&(r, j), v) in free.iter().zip(&fill) {
                rows[r][j] = v.clone();
            }
            out.push(Subspace::from_vectors(field, n, &rows));
        }
    }
    out
}

/// All subobjects of `h`, as inclusions.
fn all_subobjects(h: &WeightedRep) -> Result<Vec<RepMorphism>> {
    let f = h.field();
    let mut combos: Vec<BTreeMap<i64, Subspace>> = vec![BTreeMap::new()];
    for (&d, &n) in h.support() {
        let subs = enumerate_subspaces(f, n);
        combos = combos
            .into_iter()
            .flat_map(|pre| {
                subs.iter().map(move |s| {
                    let mut m = pre.clone();
                    m.insert(d, s.clone());
                    m
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for parts in combos {
        if let Ok((_, incl)) = subobject_from_parts(h, &parts) {
            out.push(incl);
        }
    }
    Ok(out)
}

/// Nonsplit pushforward to `H / H'` for every proper subobject `H' ⊂ H`,
/// where `e ∈ Ext¹(𝟙, H)`.
pub fn quantified_nonsplit(e: &ExtClass, subobjects: &[RepMorphism]) -> Result<bool> {
    let h = e.by();
    for incl in subobjects {
        if incl.source.dim() == h.dim() {
            continue;
        }
        if pushforward(e, &cokernel(incl)?.proj)?.is_split() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantifierCase {
    pub target_support: Vec<(i64, usize)>,
    pub subobjects: usize,
    pub classes: usize,
    pub agreements: usize,
    pub totally_nonsplit: usize,
    pub disagreements: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantifierReport {
    pub cases: Vec<QuantifierCase>,
    pub ok: bool,
}

/// Targets over `F_3` with weights `-1, -2` (dims 2, 2) and two degree
/// `-1` generators, whose operators `H_{-1} -> H_{-2}` have combined rank 0,
/// 1 and 2.
pub fn default_quantifier_objects() -> Result<Vec<WeightedRep>> {
    let f = Field::Fp(3);
    let sig = ModelSignature::new(f, vec![("x1", -1), ("x2", -1)])?;
    let support: BTreeMap<i64, usize> = [(-2, 2), (-1, 2)].into_iter().collect();
    let ops: [([[i64; 2]; 2], [[i64; 2]; 2]); 3] =
        [([[0, 0], [0, 0]], [[0, 0], [0, 0]]), ([[1, 0], [0, 0]], [[0, 0], [0, 0]]), ([[1, 0], [0, 1]], [[0, 1], [0, 0]])];
    ops.iter()
        .map(|(m1, m2)| {
            let b1 = Matrix::from_i64(f, &[&m1[0], &m1[1]]);
            let b2 = Matrix::from_i64(f, &[&m2[0], &m2[1]]);
            WeightedRep::from_blocks(sig.clone(), support.clone(), &[(0, -1, b1), (1, -1, b2)])
        })
        .collect()
}

/// Compare both tests on every class of `Ext¹(𝟙, H)` for each target `H`.
pub fn subobject_quantifier_check(targets: &[WeightedRep]) -> Result<QuantifierReport> {
    let mut cases = Vec::new();
    for h in targets {
        if !matches!(h.field(), Field::Fp(_)) {
            return Err(Error::Precondition("the exhaustive check needs a prime field".into()));
        }
        if h.dim() + 1 > 5 {
            return Err(Error::Bound(format!("ambient dimension {} exceeds 5", h.dim() + 1)));
        }
        let subs = all_subobjects(h)?;
        let sp = ExtSpace::new(&WeightedRep::unit(h.sig().clone()), h)?;
        let classes = sp.all_classes();
        let mut agreements = 0;
        let mut tns = 0;
        let mut disagreements = Vec::new();
        for e in &classes {
            let a = quantified_nonsplit(e, &subs)?;
            let b = totally_nonsplit(e)?;
            tns += usize::from(b);
            if a == b {
                agreements += 1;
            } else {
                disagreements.push(e.coords().iter().map(Scalar::to_text).collect());
            }
        }
        cases.push(QuantifierCase {
            target_support: h.support().iter().map(|(&d, &n)| (d, n)).collect(),
            subobjects: subs.len(),
            classes: classes.len(),
            agreements,
            totally_nonsplit: tns,
            disagreements,
        });
    }
    let ok = cases.iter().all(|c| c.disagreements.is_empty());
    Ok(QuantifierReport { cases, ok })
}
