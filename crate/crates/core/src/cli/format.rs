//! JSON file formats: objects, extension classes, morphisms, frames and
//! generalized extensions. Parsing is two-phase: a typed read that reports
//! the JSON path of any structural problem, then domain construction.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::exactla::{Field, Matrix, Scalar};
use crate::extmod::ExtClass;
use crate::genext::{BlockForm, Entry, Frame, GenExt, GenMorphism};
use crate::repcat::{Generator, ModelSignature, RepMorphism, WeightedRep};

pub type TextMatrix = Vec<Vec<String>>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or schema-violating input.
    #[error("{file}: {path}: {message}")]
    Input { file: String, path: String, message: String },
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Input { .. } | CliError::Output(_) => 2,
        }
    }

    pub fn diagnostic(&self) -> Value {
        match self {
            CliError::Input { file, path, message } => serde_json::json!({
                "status": "error", "kind": "input", "file": file, "path": path, "message": message,
            }),
            CliError::Domain(e) => serde_json::json!({ "status": "error", "kind": "domain", "message": e.to_string() }),
            CliError::Output(m) => serde_json::json!({ "status": "error", "kind": "output", "message": m }),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Where a value sits: the file it came from and the JSON path inside it.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub file: PathBuf,
    pub path: String,
}

impl Ctx {
    pub fn root(file: &Path) -> Ctx {
        Ctx { file: file.to_path_buf(), path: "$".into() }
    }

    pub fn at(&self, seg: &str) -> Ctx {
        Ctx { file: self.file.clone(), path: format!("{}.{seg}", self.path) }
    }

    pub fn err(&self, message: impl ToString) -> CliError {
        CliError::Input { file: self.file.display().to_string(), path: self.path.clone(), message: message.to_string() }
    }

    fn dir(&self) -> PathBuf {
        self.file.parent().map(Path::to_path_buf).unwrap_or_default()
    }
}

pub fn read_json(file: &Path) -> CliResult<Value> {
    let ctx = Ctx::root(file);
    let text = fs::read_to_string(file).map_err(|e| ctx.err(format!("cannot read: {e}")))?;
    serde_json::from_str(&text).map_err(|e| ctx.err(format!("invalid JSON: {e}")))
}

/// Typed read of `v`, reporting the failing path relative to `ctx`.
pub fn typed<T: DeserializeOwned>(v: Value, ctx: &Ctx) -> CliResult<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." { ctx.path.clone() } else { format!("{}.{inner}", ctx.path) };
        CliError::Input { file: ctx.file.display().to_string(), path, message: e.into_inner().to_string() }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureFile {
    pub field: Field,
    pub generators: Vec<GeneratorFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectFile {
    pub signature: SignatureFile,
    pub support: BTreeMap<i64, usize>,
    #[serde(default)]
    pub operators: BTreeMap<String, TextMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtFile {
    pub of: ObjectFile,
    pub by: ObjectFile,
    pub cocycle: BTreeMap<String, TextMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapFile {
    pub source: ObjectFile,
    pub target: ObjectFile,
    pub matrix: TextMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowsFile {
    /// Keyed by target `"m,n"`: `X_{m,n-1} -> X_{m,n}`.
    pub vertical: BTreeMap<String, TextMatrix>,
    /// Keyed by source `"m,n"`: `X_{m,n} -> X_{m+1,n}`.
    pub horizontal: BTreeMap<String, TextMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramFile {
    pub objects: BTreeMap<String, ObjectFile>,
    pub arrows: ArrowsFile,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenExtFile {
    pub frame: Vec<ObjectFile>,
    pub level: usize,
    pub form: String,
    pub diagram: DiagramFile,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExt {
    of: Value,
    by: Value,
    #[serde(default)]
    cocycle: BTreeMap<String, TextMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    source: Value,
    target: Value,
    matrix: TextMatrix,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Form {
    Blocks,
    Diagram,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenExt {
    frame: Vec<Value>,
    level: usize,
    form: Form,
    #[serde(default)]
    blocks: Option<BTreeMap<String, BTreeMap<String, TextMatrix>>>,
    #[serde(default)]
    diagram: Option<RawDiagram>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagram {
    #[serde(default)]
    objects: BTreeMap<String, Value>,
    arrows: ArrowsFile,
}

pub fn matrix_text(m: &Matrix) -> TextMatrix {
    m.to_text_rows()
}

pub fn parse_matrix(field: Field, rows: &TextMatrix, shape: (usize, usize), ctx: &Ctx) -> CliResult<Matrix> {
    Matrix::from_text_rows(field, rows, Some(shape)).map_err(|e| ctx.err(e))
}

pub fn parse_scalars(field: Field, text: &str, ctx: &Ctx) -> CliResult<Vec<Scalar>> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| field.parse(s).map_err(|e| ctx.err(e))).collect()
}

/// `"m,n"` entry keys.
pub fn entry_key(e: Entry) -> String {
    format!("{},{}", e.0, e.1)
}

fn parse_entry(key: &str, ctx: &Ctx) -> CliResult<Entry> {
    let bad = || ctx.err(format!("expected a key of the form \"m,n\", got {key:?}"));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn generator_index(sig: &ModelSignature, name: &str, ctx: &Ctx) -> CliResult<usize> {
    sig.index_of(name).ok_or_else(|| ctx.err(format!("unknown generator {name:?}")))
}

/// One matrix per generator; absent generators read as zero.
fn parse_per_generator(
    sig: &ModelSignature,
    mats: &BTreeMap<String, TextMatrix>,
    shape: (usize, usize),
    ctx: &Ctx,
) -> CliResult<Vec<Matrix>> {
    let mut out = vec![Matrix::zeros(sig.field, shape.0, shape.1); sig.len()];
    for (name, rows) in mats {
        let c = ctx.at(name);
        out[generator_index(sig, name, &c)?] = parse_matrix(sig.field, rows, shape, &c)?;
    }
    Ok(out)
}

fn per_generator_text(sig: &ModelSignature, mats: &[Matrix]) -> BTreeMap<String, TextMatrix> {
    sig.generators.iter().zip(mats).map(|(g, m)| (g.name.clone(), matrix_text(m))).collect()
}

impl ObjectFile {
    pub fn from_rep(x: &WeightedRep) -> ObjectFile {
        let sig = x.sig();
        ObjectFile {
            signature: SignatureFile {
                field: sig.field,
                generators: sig.generators.iter().map(|g| GeneratorFile { name: g.name.clone(), degree: g.degree }).collect(),
            },
            support: x.support().clone(),
            operators: per_generator_text(sig, x.ops()),
        }
    }

    pub fn to_rep(&self, ctx: &Ctx) -> CliResult<WeightedRep> {
        let sig = ModelSignature {
            field: self.signature.field,
            generators: self.signature.generators.iter().map(|g| Generator { name: g.name.clone(), degree: g.degree }).collect(),
        };
        sig.validate().map_err(|e| ctx.at("signature").err(e))?;
        let sig = Arc::new(sig);
        let n: usize = self.support.values().sum();
        let ops = parse_per_generator(&sig, &self.operators, (n, n), &ctx.at("operators"))?;
        Ok(WeightedRep::new(sig, self.support.clone(), ops)?)
    }
}

/// An object given inline or as a path relative to the referring file.
fn object_ref(v: Value, ctx: &Ctx) -> CliResult<WeightedRep> {
    match v {
        Value::String(p) => load_object(&ctx.dir().join(p)),
        v => typed::<ObjectFile>(v, ctx)?.to_rep(ctx),
    }
}

pub fn load_object(file: &Path) -> CliResult<WeightedRep> {
    let ctx = Ctx::root(file);
    typed::<ObjectFile>(read_json(file)?, &ctx)?.to_rep(&ctx)
}

impl ExtFile {
    pub fn from_class(e: &ExtClass) -> ExtFile {
        ExtFile {
            of: ObjectFile::from_rep(e.of()),
            by: ObjectFile::from_rep(e.by()),
            cocycle: per_generator_text(e.of().sig(), e.cocycle()),
        }
    }
}

pub fn ext_from_value(v: Value, ctx: &Ctx) -> CliResult<ExtClass> {
    let raw: RawExt = typed(v, ctx)?;
    let of = object_ref(raw.of, &ctx.at("of"))?;
    let by = object_ref(raw.by, &ctx.at("by"))?;
    of.same_sig(&by)?;
    let cocycle = parse_per_generator(of.sig(), &raw.cocycle, (by.dim(), of.dim()), &ctx.at("cocycle"))?;
    Ok(ExtClass::new(&of, &by, cocycle)?)
}

pub fn load_ext(file: &Path) -> CliResult<ExtClass> {
    ext_from_value(read_json(file)?, &Ctx::root(file))
}

impl MapFile {
    pub fn from_morphism(f: &RepMorphism) -> MapFile {
        MapFile { source: ObjectFile::from_rep(&f.source), target: ObjectFile::from_rep(&f.target), matrix: matrix_text(&f.matrix) }
    }
}

pub fn map_from_value(v: Value, ctx: &Ctx) -> CliResult<RepMorphism> {
    let raw: RawMap = typed(v, ctx)?;
    let source = object_ref(raw.source, &ctx.at("source"))?;
    let target = object_ref(raw.target, &ctx.at("target"))?;
    source.same_sig(&target)?;
    let m = parse_matrix(source.field(), &raw.matrix, (target.dim(), source.dim()), &ctx.at("matrix"))?;
    Ok(RepMorphism::new(source, target, m)?)
}

pub fn load_map(file: &Path) -> CliResult<RepMorphism> {
    map_from_value(read_json(file)?, &Ctx::root(file))
}

fn frame_from_values(vs: Vec<Value>, ctx: &Ctx) -> CliResult<Arc<Frame>> {
    let parts = vs.into_iter().enumerate().map(|(i, v)| object_ref(v, &ctx.at(&format!("[{i}]")))).collect::<CliResult<Vec<_>>>()?;
    Ok(Frame::new(parts)?)
}

/// A frame file: an array of objects, or `{"frame": [...]}`.
pub fn frame_from_value(v: Value, ctx: &Ctx) -> CliResult<Arc<Frame>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Wrapped {
        frame: Vec<Value>,
    }
    match v {
        Value::Array(vs) => frame_from_values(vs, ctx),
        v => frame_from_values(typed::<Wrapped>(v, ctx)?.frame, &ctx.at("frame")),
    }
}

pub fn load_frame(file: &Path) -> CliResult<Arc<Frame>> {
    frame_from_value(read_json(file)?, &Ctx::root(file))
}

impl GenExtFile {
    pub fn from_genext(g: &GenExt) -> GenExtFile {
        let objects = g.objects().iter().map(|(e, x)| (entry_key(*e), ObjectFile::from_rep(x))).collect();
        let vertical = g.verticals().iter().map(|(e, f)| (entry_key(*e), matrix_text(&f.matrix))).collect();
        let horizontal = g.horizontals().iter().map(|(e, f)| (entry_key(*e), matrix_text(&f.matrix))).collect();
        GenExtFile {
            frame: g.frame().parts().iter().map(ObjectFile::from_rep).collect(),
            level: g.level(),
            form: "diagram".into(),
            diagram: DiagramFile { objects, arrows: ArrowsFile { vertical, horizontal } },
        }
    }
}

pub fn genext_from_value(v: Value, ctx: &Ctx) -> CliResult<GenExt> {
    let raw: RawGenExt = typed(v, ctx)?;
    let frame = frame_from_values(raw.frame, &ctx.at("frame"))?;
    let sig = frame.sig().clone();
    match (raw.form, raw.blocks, raw.diagram) {
        (Form::Blocks, Some(blocks), None) => {
            let c = ctx.at("blocks");
            let mut bf = BlockForm::zero(frame.clone(), raw.level)?;
            for (key, mats) in &blocks {
                let kc = c.at(key);
                let (i, j) = parse_entry(key, &kc)?;
                if !bf.blocks.contains_key(&(i, j)) {
                    return Err(kc.err(format!("no block ({i},{j}) at level {}", raw.level)));
                }
                let shape = (frame.dim(i), frame.dim(j));
                bf.blocks.insert((i, j), parse_per_generator(&sig, mats, shape, &kc)?);
            }
            bf.validate()?;
            Ok(bf.denormalize()?)
        }
        (Form::Diagram, None, Some(d)) => {
            let c = ctx.at("diagram");
            let mut objects = BTreeMap::new();
            for r in 1..=frame.k() {
                objects.insert((r - 1, r), frame.part(r).clone());
            }
            for (key, v) in d.objects {
                let kc = c.at("objects").at(&key);
                let e = parse_entry(&key, &kc)?;
                objects.insert(e, object_ref(v, &kc)?);
            }
            let arrow = |key: &str, rows: &TextMatrix, kind: &str, ends: fn(Entry) -> (Entry, Entry)| -> CliResult<(Entry, RepMorphism)> {
                let kc = c.at("arrows").at(kind).at(key);
                let e = parse_entry(key, &kc)?;
                let (s, t) = ends(e);
                let (Some(src), Some(dst)) = (objects.get(&s), objects.get(&t)) else {
                    return Err(kc.err(format!("arrow endpoints ({},{}) -> ({},{}) are not diagram entries", s.0, s.1, t.0, t.1)));
                };
                let m = parse_matrix(sig.field, rows, (dst.dim(), src.dim()), &kc)?;
                Ok((e, RepMorphism::new_unchecked(src.clone(), dst.clone(), m)))
            };
            let vert = d
                .arrows
                .vertical
                .iter()
                .map(|(k, m)| arrow(k, m, "vertical", |(m, n)| ((m, n.saturating_sub(1)), (m, n))))
                .collect::<CliResult<_>>()?;
            let horiz = d
                .arrows
                .horizontal
                .iter()
                .map(|(k, m)| arrow(k, m, "horizontal", |(m, n)| ((m, n), (m + 1, n))))
                .collect::<CliResult<_>>()?;
            Ok(GenExt::new(frame, raw.level, objects, vert, horiz)?)
        }
        (Form::Blocks, _, _) => Err(ctx.err("form \"blocks\" needs a \"blocks\" member and no \"diagram\"")),
        (Form::Diagram, _, _) => Err(ctx.err("form \"diagram\" needs a \"diagram\" member and no \"blocks\"")),
    }
}

pub fn load_genext(file: &Path) -> CliResult<GenExt> {
    genext_from_value(read_json(file)?, &Ctx::root(file))
}

/// Family maps keyed by `"m,n"`, each from the entry of `source` to the
/// matching entry of `target`.
pub fn family_from_value(v: Value, source: &GenExt, target: &GenExt, ctx: &Ctx) -> CliResult<GenMorphism> {
    let raw: BTreeMap<String, TextMatrix> = typed(v, ctx)?;
    let mut maps = BTreeMap::new();
    for (key, rows) in &raw {
        let kc = ctx.at(key);
        let e = parse_entry(key, &kc)?;
        let (Some(s), Some(t)) = (source.objects().get(&e), target.objects().get(&e)) else {
            return Err(kc.err(format!("({},{}) is not an entry of both diagrams", e.0, e.1)));
        };
        let m = parse_matrix(s.field(), rows, (t.dim(), s.dim()), &kc)?;
        maps.insert(e, RepMorphism::new(s.clone(), t.clone(), m)?);
    }
    if maps.len() != source.objects().len() {
        return Err(ctx.err(format!("expected a map at each of the {} entries", source.objects().len())));
    }
    Ok(GenMorphism { maps })
}

pub fn family_text(f: &GenMorphism) -> BTreeMap<String, TextMatrix> {
    f.maps.iter().map(|(e, m)| (entry_key(*e), matrix_text(&m.matrix))).collect()
}

/// One square matrix per frame piece.
pub fn sigma_from_value(v: Value, frame: &Frame, ctx: &Ctx) -> CliResult<Vec<Matrix>> {
    let raw: Vec<TextMatrix> = typed(v, ctx)?;
    if raw.len() != frame.k() {
        return Err(ctx.err(format!("expected {} matrices, one per frame piece", frame.k())));
    }
    raw.iter()
        .enumerate()
        .map(|(i, rows)| {
            let d = frame.dim(i + 1);
            parse_matrix(frame.field(), rows, (d, d), &ctx.at(&format!("[{i}]")))
        })
        .collect()
}
