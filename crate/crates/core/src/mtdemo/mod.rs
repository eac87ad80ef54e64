//! A finite mixed-Tate-style model and the four-weight example built on it.
//!
//! `Q(n)` is the pure object of weight `-2n`. The signature carries one
//! degree `-2` generator per Kummer label and one degree `-2n` generator for
//! each odd `3 <= n <= cutoff`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::blended::make_blend;
use crate::error::{Error, Result};
use crate::exactla::{Field, Matrix, Scalar};
use crate::extmod::{realize, ExtClass, ExtSpace, ExtensionSeq};
use crate::genext::{Fiber, Frame, GenExt};
use crate::motivic::{
    block_genext, classify_star, graded_independent_frame, is_maximal, maximality_criterion, realize_top, u_radical,
    MaximalityReport, StarDescriptor,
};
use crate::repcat::{is_isomorphic, ModelSignature, RepMorphism, WeightedRep};

pub const DEFAULT_LABELS: [&str; 3] = ["2", "3", "5"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtRow {
    pub n: i64,
    pub dim: usize,
    pub expected: usize,
}

#[derive(Clone, Debug)]
pub struct MtModel {
    sig: Arc<ModelSignature>,
    labels: Vec<String>,
    cutoff: i64,
    ext_table: Vec<ExtRow>,
}

/// Expected `dim Ext¹(𝟙, Q(n))` for the model.
pub fn expected_ext_dim(n: i64, labels: usize) -> usize {
    match n {
        1 => labels,
        n if n > 1 && n % 2 == 1 => 1,
        _ => 0,
    }
}

pub fn build_mt(labels: &[String], cutoff: i64) -> Result<MtModel> {
    if cutoff < 3 || cutoff % 2 == 0 {
        return Err(Error::Precondition(format!("cutoff must be odd and at least 3, got {cutoff}")));
    }
    if labels.is_empty() {
        return Err(Error::Precondition("at least one Kummer label is required".into()));
    }
    let distinct: BTreeSet<&String> = labels.iter().collect();
    if distinct.len() != labels.len() {
        return Err(Error::Precondition("Kummer labels must be distinct".into()));
    }
    let names: Vec<(String, i64)> = labels
        .iter()
        .map(|r| (format!("log{r}"), -2))
        .chain((3..=cutoff).step_by(2).map(|n| (format!("zeta{n}"), -2 * n)))
        .collect();
    let sig = ModelSignature::new(Field::Q, names.iter().map(|(n, d)| (n.as_str(), *d)).collect())?;
    let mut model = MtModel { sig, labels: labels.to_vec(), cutoff, ext_table: Vec::new() };
    let one = WeightedRep::unit(model.sig.clone());
    for n in -1..=cutoff {
        let dim = ExtSpace::new(&one, &model.tate(n))?.dim();
        let expected = expected_ext_dim(n, labels.len());
        if dim != expected {
            return Err(Error::Object(format!("Ext¹(1, Q({n})) has dimension {dim}, expected {expected}")));
        }
        model.ext_table.push(ExtRow { n, dim, expected });
    }
    Ok(model)
}

/// Labels `{2, 3, 5}` together with `extra`.
pub fn default_labels(extra: &str) -> Vec<String> {
    let mut l: Vec<String> = DEFAULT_LABELS.iter().map(|s| s.to_string()).collect();
    if !l.iter().any(|s| s == extra) {
        l.push(extra.to_string());
    }
    l
}

/// The sequence tensored with `Q(a)`.
pub fn twist_seq(s: &ExtensionSeq, a: i64) -> Result<ExtensionSeq> {
    let sh = |x: &WeightedRep| x.shift(-2 * a);
    ExtensionSeq::new(
        RepMorphism::new(sh(&s.sub), sh(&s.mid), s.incl.matrix.clone())?,
        RepMorphism::new(sh(&s.mid), sh(&s.quot), s.proj.matrix.clone())?,
    )
}

impl MtModel {
    pub fn sig(&self) -> &Arc<ModelSignature> {
        &self.sig
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Rows for `n = -1..=cutoff`.
    pub fn ext_table(&self) -> &[ExtRow] {
        &self.ext_table
    }

    pub fn tate(&self, n: i64) -> WeightedRep {
        WeightedRep::pure(self.sig.clone(), -2 * n, 1)
    }

    pub fn unit(&self) -> WeightedRep {
        WeightedRep::unit(self.sig.clone())
    }

    pub fn log_index(&self, r: &str) -> Result<usize> {
        self.sig.index_of(&format!("log{r}")).ok_or_else(|| Error::Precondition(format!("unknown Kummer label {r}")))
    }

    pub fn zeta_index(&self, n: i64) -> Result<usize> {
        self.sig.index_of(&format!("zeta{n}")).ok_or_else(|| Error::Precondition(format!("no generator for Q({n}); need odd 3 <= n <= {}", self.cutoff)))
    }

    fn unit_class(&self, n: i64, t: usize, s: &Scalar) -> Result<ExtClass> {
        let one = self.unit();
        let by = self.tate(n);
        let cocycle = (0..self.sig.len()).map(|u| if u == t { Matrix::scalar(Field::Q, 1, s) } else { Matrix::zeros(Field::Q, 1, 1) }).collect();
        ExtClass::new(&one, &by, cocycle)
    }

    /// The extension of `𝟙` by `Q(n)` with class `s` on the `ζ(n)` generator.
    pub fn zeta_ext(&self, n: i64, s: &Scalar) -> Result<ExtensionSeq> {
        Ok(realize(&self.unit_class(n, self.zeta_index(n)?, s)?))
    }

    /// The Kummer extension of `𝟙` by `Q(1)` for label `r`, scaled by `s`.
    pub fn kummer_ext(&self, r: &str, s: &Scalar) -> Result<ExtensionSeq> {
        Ok(realize(&self.unit_class(1, self.log_index(r)?, s)?))
    }

    /// Blend of `Z_a` by `L_r(a)`.
    pub fn m_blend(&self, a: i64, r: &str, s: &[Scalar; 2]) -> Result<WeightedRep> {
        Ok(make_blend(&twist_seq(&self.kummer_ext(r, &s[0])?, a)?, &self.zeta_ext(a, &s[1])?)?.mid)
    }

    /// Blend of `L_r` by `Z_c(1)`.
    pub fn m_prime_blend(&self, c: i64, r: &str, s: &[Scalar; 2]) -> Result<WeightedRep> {
        Ok(make_blend(&twist_seq(&self.zeta_ext(c, &s[0])?, 1)?, &self.kummer_ext(r, &s[1])?)?.mid)
    }
}

fn q(n: i64) -> Scalar {
    Field::Q.from_i64(n)
}

fn iso(x: &WeightedRep, y: &WeightedRep, rng: &mut impl Rng) -> Result<bool> {
    Ok(is_isomorphic(x, y, rng)?.iso.is_some())
}

/// Support of an object as `(weight, dim)` pairs.
pub fn support_of(x: &WeightedRep) -> Vec<(i64, usize)> {
    x.support().iter().map(|(&w, &d)| (w, d)).collect()
}

#[derive(Clone, Debug)]
pub struct NamedObjects {
    pub z_a: WeightedRep,
    pub z_c: WeightedRep,
    pub l_r: WeightedRep,
    pub m_ar: WeightedRep,
    pub m_prime_cr: WeightedRep,
    pub checks: NamedChecks,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedChecks {
    /// Middle objects for two different nonzero scalars are isomorphic.
    pub z_a_unique: bool,
    pub z_c_unique: bool,
    pub l_r_unique: bool,
    pub m_ar_unique: bool,
    pub m_prime_cr_unique: bool,
    /// `L_r` is not isomorphic to `L_{r'}` for every other label.
    pub l_r_distinct: bool,
}

impl NamedChecks {
    pub fn all(&self) -> bool {
        self.z_a_unique && self.z_c_unique && self.l_r_unique && self.m_ar_unique && self.m_prime_cr_unique && self.l_r_distinct
    }
}

fn check_zeta_index(model: &MtModel, n: i64) -> Result<()> {
    if n <= 1 || n % 2 == 0 {
        return Err(Error::Precondition(format!("{n} is not an odd integer above 1")));
    }
    model.zeta_index(n).map(|_| ())
}

pub fn named_objects(model: &MtModel, a: i64, c: i64, r: &str, rng: &mut impl Rng) -> Result<NamedObjects> {
    check_zeta_index(model, a)?;
    check_zeta_index(model, c)?;
    if a == c {
        return Err(Error::Precondition("a and c must be distinct".into()));
    }
    model.log_index(r)?;
    let (one, s, t) = (q(1), q(-2), q(5));
    let z_a = model.zeta_ext(a, &one)?.mid;
    let z_c = model.zeta_ext(c, &one)?.mid;
    let l_r = model.kummer_ext(r, &one)?.mid;
    let m_ar = model.m_blend(a, r, &[one.clone(), one.clone()])?;
    let m_prime_cr = model.m_prime_blend(c, r, &[one.clone(), one.clone()])?;
    let mut l_r_distinct = true;
    for other in model.labels.iter().filter(|o| o.as_str() != r) {
        let s = is_isomorphic(&l_r, &model.kummer_ext(other, &one)?.mid, rng)?;
        l_r_distinct &= s.iso.is_none() && s.deterministic;
    }
    let checks = NamedChecks {
        z_a_unique: iso(&z_a, &model.zeta_ext(a, &s)?.mid, rng)?,
        z_c_unique: iso(&z_c, &model.zeta_ext(c, &t)?.mid, rng)?,
        l_r_unique: iso(&l_r, &model.kummer_ext(r, &s)?.mid, rng)?,
        m_ar_unique: iso(&m_ar, &model.m_blend(a, r, &[s.clone(), t.clone()])?, rng)?,
        m_prime_cr_unique: iso(&m_prime_cr, &model.m_prime_blend(c, r, &[t, s])?, rng)?,
        l_r_distinct,
    };
    Ok(NamedObjects { z_a, z_c, l_r, m_ar, m_prime_cr, checks })
}

/// One entry of the symbolic period matrix: `(2πi)^twist · symbol`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodEntry {
    pub twist: Option<i64>,
    pub symbol: Option<String>,
}

impl PeriodEntry {
    fn zero() -> Self {
        PeriodEntry { twist: None, symbol: None }
    }

    fn new(twist: Option<i64>, symbol: Option<&str>) -> Self {
        PeriodEntry { twist, symbol: symbol.map(String::from) }
    }

    pub fn is_zero(&self) -> bool {
        self.twist.is_none() && self.symbol.is_none()
    }

    pub fn render(&self) -> String {
        match (&self.twist, &self.symbol) {
            (None, None) => "0".into(),
            (Some(t), None) => format!("(2πi)^{t}"),
            (None, Some(s)) => s.clone(),
            (Some(t), Some(s)) => format!("(2πi)^{t}·{s}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodScaffold {
    pub entries: Vec<Vec<PeriodEntry>>,
    pub rendered: Vec<Vec<String>>,
    pub upper_triangular: bool,
    /// Diagonal entries are bare Tate twists `(2πi)^{-n}`.
    pub unit_diagonal_after_twist: bool,
    /// Off-diagonal entries of each row carry the row's twist, except the
    /// corner period.
    pub row_twists_factor: bool,
}

/// The period matrix shape for the four-weight example with `b = 1`.
pub fn period_scaffold(a: i64, c: i64, r: &str) -> PeriodScaffold {
    let twists = [-(a + 1 + c), -(a + 1), -a, 0];
    let t = |i: usize| if twists[i] == 0 { None } else { Some(twists[i]) };
    let zc = format!("ζ({c})");
    let za = format!("ζ({a})");
    let log = format!("log({r})");
    let pp = format!("p'_{{{c},{r}}}");
    let pa = format!("p_{{{a},{r}}}");
    let pall = format!("p_{{{a},{r},{c}}}(X)");
    let z = PeriodEntry::zero;
    let entries = vec![
        vec![PeriodEntry::new(t(0), None), PeriodEntry::new(t(0), Some(&zc)), PeriodEntry::new(t(0), Some(&pp)), PeriodEntry::new(None, Some(&pall))],
        vec![z(), PeriodEntry::new(t(1), None), PeriodEntry::new(t(1), Some(&log)), PeriodEntry::new(t(1), Some(&pa))],
        vec![z(), z(), PeriodEntry::new(t(2), None), PeriodEntry::new(t(2), Some(&za))],
        vec![z(), z(), z(), PeriodEntry::new(None, Some("1"))],
    ];
    let upper_triangular = (0..4).all(|i| (0..i).all(|j| entries[i][j].is_zero()));
    let unit_diagonal_after_twist = (0..4).all(|i| {
        let e = &entries[i][i];
        if twists[i] == 0 {
            e.symbol.as_deref() == Some("1") && e.twist.is_none()
        } else {
            e.twist == Some(twists[i]) && e.symbol.is_none()
        }
    });
    let row_twists_factor = (0..4).all(|i| (i + 1..4).all(|j| (i, j) == (0, 3) || entries[i][j].twist == t(i)));
    let rendered = entries.iter().map(|row| row.iter().map(PeriodEntry::render).collect()).collect();
    PeriodScaffold { entries, rendered, upper_triangular, unit_diagonal_after_twist, row_twists_factor }
}

#[derive(Clone, Debug, Serialize)]
pub struct Identification {
    pub entry: (usize, usize),
    pub name: String,
    pub isomorphic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub label: String,
    pub labels: Vec<String>,
    pub cutoff: i64,
    pub ext_table: Vec<ExtRow>,
    /// Tate twists of the frame pieces, top to bottom.
    pub frame_twists: Vec<i64>,
    pub frame_weights: Vec<i64>,
    pub conditions_hold: bool,
    pub graded_independent: bool,
    pub level1: StarDescriptor,
    pub level2: StarDescriptor,
    pub level3: StarDescriptor,
    pub level2_fiber_dims: Vec<usize>,
    pub unique_level2_lift: bool,
    pub level3_fiber_dims: Vec<usize>,
    pub level3_fiber_dim: usize,
    pub identifications: Vec<Identification>,
    pub named_checks: NamedChecks,
    pub realized_support: Vec<(i64, usize)>,
    pub u_radical_dim: usize,
    pub galois_dimension: usize,
    pub is_maximal: bool,
    pub maximality: MaximalityReport,
    pub period_matrix: PeriodScaffold,
    pub unramified_note: String,
}

/// Level-1 diagram with the three adjacent classes `ζ(c)`, `log(r)`, `ζ(a)`.
fn level_one(model: &MtModel, frame: &Arc<Frame>, a: i64, c: i64, r: &str) -> Result<GenExt> {
    let one = Matrix::scalar(Field::Q, 1, &q(1));
    block_genext(
        frame,
        1,
        &[((1, 2), model.zeta_index(c)?, one.clone()), ((2, 3), model.log_index(r)?, one.clone()), ((3, 4), model.zeta_index(a)?, one)],
    )
}

/// Build the four-weight example `A = Q(a+1+c) ⊕ Q(a+1) ⊕ Q(a) ⊕ 𝟙` level by
/// level and check every claim along the way. `top` is the coordinate of the
/// level-3 lift in `Ext¹(𝟙, Q(a+1+c))`.
pub fn four_weight_pipeline(a: i64, c: i64, label: &str, cutoff: i64, top: i64, rng: &mut impl Rng) -> Result<PipelineReport> {
    if a <= 0 || c <= 0 {
        return Err(Error::Precondition("a and c must be positive".into()));
    }
    if a == c {
        return Err(Error::Precondition(format!("a and c must be distinct, both are {a}")));
    }
    if a == 1 || c == 1 {
        return Err(Error::Precondition("a, b = 1 and c must be distinct".into()));
    }
    if a % 2 == 0 || c % 2 == 0 {
        return Err(Error::Precondition("a and c must be odd for a totally nonsplit member to exist".into()));
    }
    if cutoff < a + 1 + c {
        return Err(Error::Precondition(format!("cutoff {cutoff} is below a + 1 + c = {}", a + 1 + c)));
    }
    let b = 1;
    let conditions_hold = a != b && b != c && a != c && a + b != c && b + c != a;
    let labels = default_labels(label);
    let model = build_mt(&labels, cutoff)?;
    let twists = vec![a + b + c, a + b, a, 0];
    let frame = Frame::new(twists.iter().map(|&n| model.tate(n)).collect())?;
    let graded_independent = graded_independent_frame(&frame)?;

    let g1 = level_one(&model, &frame, a, c, label)?;
    let level1 = classify_star(&frame, 1, None)?;
    let level2 = classify_star(&frame, 2, Some(&g1))?;
    let f2 = Fiber::new(&g1)?;
    let g2 = f2.base_point().clone();
    let level3 = classify_star(&frame, 3, Some(&g2))?;
    let f3 = Fiber::new(&g2)?;
    let g3 = f3.lift(&f3.element(&vec![q(top); f3.group_dim()]))?;
    let x = realize_top(&g3)?;

    let named = named_objects(&model, a, c, label, rng)?;
    let one = q(1);
    let ids = [
        ((0, 2), "Z_c(a+1)", twist_seq(&model.zeta_ext(c, &one)?, a + 1)?.mid),
        ((1, 3), "L_r(a)", twist_seq(&model.kummer_ext(label, &one)?, a)?.mid),
        ((2, 4), "Z_a", named.z_a.clone()),
        ((0, 3), "M'_{c,r}(a)", named.m_prime_cr.shift(-2 * a)),
        ((1, 4), "M_{a,r}", named.m_ar.clone()),
    ];
    let mut identifications = Vec::new();
    for ((m, n), name, obj) in ids {
        identifications.push(Identification { entry: (m, n), name: name.into(), isomorphic: iso(g2.obj(m, n), &obj, rng)? });
    }

    let u = u_radical(&x);
    let maximality = maximality_criterion(&x)?;
    let level2_fiber_dims: Vec<usize> = f2.groups().iter().map(|g| g.dim()).collect();
    let level3_fiber_dims: Vec<usize> = f3.groups().iter().map(|g| g.dim()).collect();
    Ok(PipelineReport {
        a,
        b,
        c,
        label: label.into(),
        labels,
        cutoff,
        ext_table: model.ext_table().to_vec(),
        frame_weights: (1..=4).map(|r| frame.weight(r)).collect(),
        frame_twists: twists,
        conditions_hold,
        graded_independent,
        level1,
        level2,
        level3,
        unique_level2_lift: level2_fiber_dims.iter().all(|&d| d == 0),
        level2_fiber_dims,
        level3_fiber_dim: level3_fiber_dims.iter().sum(),
        level3_fiber_dims,
        identifications,
        named_checks: named.checks,
        realized_support: support_of(&x),
        u_radical_dim: u.dim(),
        galois_dimension: 1 + u.dim(),
        is_maximal: is_maximal(&x),
        maximality,
        period_matrix: period_scaffold(a, c, label),
        unramified_note: "the Kummer piece L_r is ramified at r; with 1 among a, b, c the example leaves the unramified subcategory".into(),
    })
}
