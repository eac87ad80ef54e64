//! Command-line front end. [`run`] parses arguments, executes one command and
//! returns the exit status; reports go to `--out` or stdout, diagnostics to
//! stderr.

pub mod format;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::blended::{blend_equiv, make_blend, translate, translate_in_place, Blend, Construction};
use crate::exactla::Scalar;
use crate::extmod::{baer_sum, class_of, ext1_space, pullback, pushforward, realize, transfer_unit, ExtClass};
use crate::genext::{equiv, transport, EquivMode, Fiber, GenExt};
use crate::motivic::{
    classify_star, end_scalar_check, graded_independent, maximality_criterion, tns_genext, totally_nonsplit, u_radical,
    w_minus_one_end_dim,
};
use crate::mtdemo::four_weight_pipeline;
use crate::oracle::{census, CensusConfig};
use crate::random;
use crate::repcat::WeightedRep;
use format::*;

#[derive(Parser, Debug)]
#[command(name = "panache", version, about = "Blended and generalized extensions of graded representations")]
pub struct Cli {
    /// Seed for every randomized step; always echoed in the report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Progress notes on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate an object file.
    Validate { object: PathBuf },
    /// Ext¹(of, by) with a basis of cocycles.
    Ext1 {
        #[arg(long)]
        of: PathBuf,
        #[arg(long)]
        by: PathBuf,
    },
    /// Baer sum of two classes.
    Baer { first: PathBuf, second: PathBuf },
    /// Pushforward along a map out of the sub object.
    Push(ExtMap),
    /// Pullback along a map into the quotient.
    Pull(ExtMap),
    IsSplit { ext: PathBuf },
    /// Move a class of Ext¹(M, N) to Ext¹(𝟙, Hom(M, N)).
    Transfer { ext: PathBuf },
    /// Blend two extensions, optionally translated by a class of Ext¹(A3, A1).
    Blend(BlendArgs),
    #[command(subcommand)]
    Genext(GenextCommand),
    Nonsplit { ext: PathBuf },
    Uradical { object: PathBuf },
    Maximal { object: PathBuf },
    GradedIndependent { object: PathBuf },
    ClassifyStar {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        pick: Option<PathBuf>,
    },
    /// The four-weight mixed Tate example.
    MtDemo(MtArgs),
    /// Exhaustive census over a small prime field.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
pub struct ExtMap {
    #[arg(long)]
    pub ext: PathBuf,
    #[arg(long)]
    pub map: PathBuf,
}

#[derive(Args, Debug)]
pub struct BlendArgs {
    #[arg(long = "L")]
    pub l: PathBuf,
    #[arg(long = "N")]
    pub n: PathBuf,
    #[arg(long)]
    pub translate: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ConstructionArg::Row)]
    pub construction: ConstructionArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConstructionArg {
    Row,
    Column,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Strict,
    Iso,
}

#[derive(Subcommand, Debug)]
pub enum GenextCommand {
    Validate { genext: PathBuf },
    Truncate { genext: PathBuf },
    /// Sub-diagram on pieces `from+1..=to`.
    Crop {
        genext: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
    },
    /// Act by an automorphism of the frame (one matrix per piece).
    Act {
        genext: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
    },
    /// The fiber of lifts over a diagram one level below.
    Fiber {
        base: PathBuf,
        /// Comma-separated coordinates of a group element to lift.
        #[arg(long, allow_hyphen_values = true)]
        coords: Option<String>,
        /// A lift whose coordinates should be computed.
        #[arg(long)]
        member: Option<PathBuf>,
    },
    /// Rebuild along an isomorphism family from the truncation onto a target.
    Transport {
        genext: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct MtArgs {
    #[arg(long)]
    pub a: i64,
    #[arg(long)]
    pub c: i64,
    #[arg(long)]
    pub label: String,
    #[arg(long)]
    pub cutoff: Option<i64>,
    /// Coordinate of the level-three lift.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub top: i64,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub weights: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gens: Vec<i64>,
    /// Level range `1..L`.
    #[arg(long, default_value = "1..1")]
    pub levels: String,
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
}

#[derive(Serialize)]
struct Report {
    command: String,
    seed: u64,
    inputs: BTreeMap<String, Value>,
    result: Value,
}

struct Run {
    seed: u64,
    verbose: u8,
    inputs: BTreeMap<String, Value>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn scalars_text(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_text).collect()
}

fn class_summary(e: &ExtClass) -> Value {
    json!({ "class": ExtFile::from_class(e), "coords": scalars_text(&e.coords()), "is_split": e.is_split() })
}

fn blend_value(b: &Blend) -> crate::Result<Value> {
    Ok(json!({
        "L": ExtFile::from_class(&class_of(&b.l)?),
        "N": ExtFile::from_class(&class_of(&b.n)?),
        "middle": ObjectFile::from_rep(&b.mid),
        "iota": matrix_text(&b.iota.matrix),
        "pi": matrix_text(&b.pi.matrix),
    }))
}

fn genext_value(g: &GenExt) -> Value {
    to_value(&GenExtFile::from_genext(g))
}

fn object_summary(x: &WeightedRep) -> Value {
    json!({ "dim": x.dim(), "support": x.support(), "pure": x.is_pure(), "weight": x.weight() })
}

fn parse_levels(text: &str) -> CliResult<usize> {
    let bad = || Ctx { file: PathBuf::from("<args>"), path: "$.levels".into() }.err(format!("expected 1..L, got {text:?}"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let (lo, hi): (usize, usize) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if lo != 1 || hi < 1 {
        return Err(bad());
    }
    Ok(hi)
}

impl Run {
    fn note(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("panache: {}", msg.as_ref());
        }
    }

    fn input<T: Serialize>(&mut self, name: &str, v: &T) {
        self.inputs.insert(name.into(), to_value(v));
    }

    fn object(&mut self, name: &str, p: &Path) -> CliResult<WeightedRep> {
        self.note(format!("reading object {}", p.display()));
        let x = load_object(p)?;
        self.input(name, &ObjectFile::from_rep(&x));
        Ok(x)
    }

    fn ext(&mut self, name: &str, p: &Path) -> CliResult<ExtClass> {
        self.note(format!("reading class {}", p.display()));
        let e = load_ext(p)?;
        self.input(name, &ExtFile::from_class(&e));
        Ok(e)
    }

    fn map(&mut self, name: &str, p: &Path) -> CliResult<crate::repcat::RepMorphism> {
        let f = load_map(p)?;
        self.input(name, &MapFile::from_morphism(&f));
        Ok(f)
    }

    fn genext(&mut self, name: &str, p: &Path) -> CliResult<GenExt> {
        self.note(format!("reading generalized extension {}", p.display()));
        let g = load_genext(p)?;
        self.input(name, &GenExtFile::from_genext(&g));
        Ok(g)
    }

    fn execute(&mut self, cmd: &Command) -> CliResult<Value> {
        Ok(match cmd {
            Command::Validate { object } => {
                let x = self.object("object", object)?;
                let mut v = object_summary(&x);
                v["valid"] = json!(true);
                v
            }
            Command::Ext1 { of, by } => {
                let m = self.object("of", of)?;
                let n = self.object("by", by)?;
                let (dim, basis) = ext1_space(&m, &n)?;
                let basis: Vec<_> = basis.iter().map(|b| ExtFile::from_class(b).cocycle).collect();
                json!({ "dim": dim, "basis": basis })
            }
            Command::Baer { first, second } => {
                let e1 = self.ext("first", first)?;
                let e2 = self.ext("second", second)?;
                class_summary(&baer_sum(&e1, &e2)?)
            }
            Command::Push(a) => {
                let e = self.ext("ext", &a.ext)?;
                let f = self.map("map", &a.map)?;
                class_summary(&pushforward(&e, &f)?)
            }
            Command::Pull(a) => {
                let e = self.ext("ext", &a.ext)?;
                let g = self.map("map", &a.map)?;
                class_summary(&pullback(&e, &g)?)
            }
            Command::IsSplit { ext } => {
                let e = self.ext("ext", ext)?;
                json!({ "is_split": e.is_split(), "coords": scalars_text(&e.coords()) })
            }
            Command::Transfer { ext } => {
                let e = self.ext("ext", ext)?;
                class_summary(&transfer_unit(&e)?)
            }
            Command::Blend(a) => self.blend(a)?,
            Command::Genext(g) => self.genext_command(g)?,
            Command::Nonsplit { ext } => {
                let e = self.ext("ext", ext)?;
                json!({
                    "is_split": e.is_split(),
                    "totally_nonsplit": totally_nonsplit(&e)?,
                    "end_scalar": end_scalar_check(&e)?,
                })
            }
            Command::Uradical { object } => {
                let x = self.object("object", object)?;
                let u = u_radical(&x);
                let basis: Vec<_> = u.elements().iter().map(matrix_text).collect();
                json!({
                    "dim": u.dim(),
                    "w_minus_one_end_dim": w_minus_one_end_dim(&x),
                    "bracket_closed": u.is_bracket_closed(),
                    "basis": basis,
                })
            }
            Command::Maximal { object } => {
                let x = self.object("object", object)?;
                to_value(&maximality_criterion(&x)?)
            }
            Command::GradedIndependent { object } => {
                let x = self.object("object", object)?;
                json!({ "graded_independent": graded_independent(&x)?, "weights": x.degrees() })
            }
            Command::ClassifyStar { frame, level, pick } => {
                let fr = load_frame(frame)?;
                self.input("frame", &fr.parts().iter().map(ObjectFile::from_rep).collect::<Vec<_>>());
                self.input("level", level);
                let pick = pick.as_deref().map(|p| self.genext("pick", p)).transpose()?;
                to_value(&classify_star(&fr, *level, pick.as_ref())?)
            }
            Command::MtDemo(a) => {
                let cutoff = a.cutoff.unwrap_or(11.max(a.a + 1 + a.c));
                self.input("params", &json!({ "a": a.a, "c": a.c, "label": a.label, "cutoff": cutoff, "top": a.top }));
                let mut rng = random::rng(self.seed);
                to_value(&four_weight_pipeline(a.a, a.c, &a.label, cutoff, a.top, &mut rng)?)
            }
            Command::Oracle(a) => {
                let max_level = parse_levels(&a.levels)?;
                if a.weights.len() != a.k {
                    let ctx = Ctx { file: PathBuf::from("<args>"), path: "$.weights".into() };
                    return Err(ctx.err(format!("expected {} weights for k = {}", a.k, a.k)));
                }
                let mut cfg = CensusConfig::new(a.p, a.weights.clone(), a.gens.clone(), max_level);
                cfg.copies = a.copies;
                cfg.seed = self.seed;
                self.input("params", &json!({ "p": a.p, "k": a.k, "weights": a.weights, "gens": a.gens, "levels": a.levels, "copies": a.copies }));
                to_value(&census(&cfg)?)
            }
        })
    }

    fn blend(&mut self, a: &BlendArgs) -> CliResult<Value> {
        let l = self.ext("L", &a.l)?;
        let n = self.ext("N", &a.n)?;
        let b = make_blend(&realize(&l), &realize(&n))?;
        let mut out = json!({ "blend": blend_value(&b)? });
        if let Some(t) = &a.translate {
            let e = self.ext("translate", t)?;
            let c = match a.construction {
                ConstructionArg::Row => Construction::Row,
                ConstructionArg::Column => Construction::Column,
            };
            let moved = translate(&e, &b, c)?;
            let in_place = translate_in_place(&e, &b)?;
            out["translated"] = blend_value(&moved)?;
            out["agrees_with_in_place"] = json!(blend_equiv(&moved, &in_place)?.is_some());
            out["equivalent_to_input"] = json!(blend_equiv(&moved, &b)?.is_some());
        }
        Ok(out)
    }

    fn genext_command(&mut self, cmd: &GenextCommand) -> CliResult<Value> {
        Ok(match cmd {
            GenextCommand::Validate { genext } => {
                let g = self.genext("genext", genext)?;
                let bf = g.block_form()?;
                let sig = g.frame().sig().clone();
                let blocks: BTreeMap<String, BTreeMap<String, TextMatrix>> = bf
                    .blocks
                    .iter()
                    .map(|(e, ms)| (entry_key(*e), sig.generators.iter().zip(ms).map(|(gn, m)| (gn.name.clone(), matrix_text(m))).collect()))
                    .collect();
                json!({
                    "valid": true,
                    "k": g.k(),
                    "level": g.level(),
                    "frame_weights": (1..=g.k()).map(|r| g.frame().weight(r)).collect::<Vec<_>>(),
                    "blocks": blocks,
                    "totally_nonsplit": tns_genext(&g).ok(),
                })
            }
            GenextCommand::Truncate { genext } => {
                let g = self.genext("genext", genext)?;
                json!({ "genext": genext_value(&g.truncate()?) })
            }
            GenextCommand::Crop { genext, from, to } => {
                let g = self.genext("genext", genext)?;
                self.input("crop", &json!({ "from": from, "to": to }));
                json!({ "genext": genext_value(&g.crop(*from, *to)?) })
            }
            GenextCommand::Equiv { first, second, mode } => {
                let g1 = self.genext("first", first)?;
                let g2 = self.genext("second", second)?;
                let m = match mode {
                    ModeArg::Strict => EquivMode::Strict,
                    ModeArg::Iso => EquivMode::Iso,
                };
                let mut rng = random::rng(self.seed);
                let f = equiv(&g1, &g2, m, &mut rng)?;
                json!({
                    "mode": format!("{mode:?}").to_lowercase(),
                    "equivalent": f.is_some(),
                    "family": f.as_ref().map(family_text),
                })
            }
            GenextCommand::Act { genext, sigma } => {
                let g = self.genext("genext", genext)?;
                let s = sigma_from_value(read_json(sigma)?, g.frame(), &Ctx::root(sigma))?;
                self.input("sigma", &s.iter().map(matrix_text).collect::<Vec<_>>());
                json!({ "genext": genext_value(&g.act_aut_a(&s)?) })
            }
            GenextCommand::Fiber { base, coords, member } => {
                let g = self.genext("base", base)?;
                let fiber = Fiber::new(&g)?;
                let dims: Vec<usize> = fiber.groups().iter().map(|s| s.dim()).collect();
                let mut out = json!({
                    "level": fiber.level(),
                    "group_dims": dims,
                    "group_dim": fiber.group_dim(),
                    "base_point": genext_value(fiber.base_point()),
                });
                if let Some(text) = coords {
                    let ctx = Ctx { file: PathBuf::from("<args>"), path: "$.coords".into() };
                    let c = parse_scalars(g.frame().field(), text, &ctx)?;
                    if c.len() != fiber.group_dim() {
                        return Err(ctx.err(format!("expected {} coordinates", fiber.group_dim())));
                    }
                    self.input("coords", &scalars_text(&c));
                    out["lift"] = genext_value(&fiber.lift(&fiber.element(&c))?);
                }
                if let Some(p) = member {
                    let m = self.genext("member", p)?;
                    out["member_coords"] = json!(scalars_text(&Fiber::flat(&fiber.coords(&m)?)));
                }
                out
            }
            GenextCommand::Transport { genext, family, target } => {
                let g = self.genext("genext", genext)?;
                let t = self.genext("target", target)?;
                let base = g.truncate()?;
                let f = family_from_value(read_json(family)?, &base, &t, &Ctx::root(family))?;
                self.input("family", &family_text(&f));
                json!({ "genext": genext_value(&transport(&g, &f, &t)?) })
            }
        })
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn command_name(cmd: &Command) -> String {
    let name = |s: &str| s.to_string();
    match cmd {
        Command::Validate { .. } => name("validate"),
        Command::Ext1 { .. } => name("ext1"),
        Command::Baer { .. } => name("baer"),
        Command::Push(_) => name("push"),
        Command::Pull(_) => name("pull"),
        Command::IsSplit { .. } => name("is-split"),
        Command::Transfer { .. } => name("transfer"),
        Command::Blend(_) => name("blend"),
        Command::Genext(g) => format!(
            "genext {}",
            match g {
                GenextCommand::Validate { .. } => "validate",
                GenextCommand::Truncate { .. } => "truncate",
                GenextCommand::Crop { .. } => "crop",
                GenextCommand::Equiv { .. } => "equiv",
                GenextCommand::Act { .. } => "act",
                GenextCommand::Fiber { .. } => "fiber",
                GenextCommand::Transport { .. } => "transport",
            }
        ),
        Command::Nonsplit { .. } => name("nonsplit"),
        Command::Uradical { .. } => name("uradical"),
        Command::Maximal { .. } => name("maximal"),
        Command::GradedIndependent { .. } => name("graded-independent"),
        Command::ClassifyStar { .. } => name("classify-star"),
        Command::MtDemo(_) => name("mt-demo"),
        Command::Oracle(_) => name("oracle"),
    }
}

/// Execute a parsed command line; returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let mut r = Run { seed: cli.seed, verbose: cli.verbose, inputs: BTreeMap::new() };
    let outcome = r.execute(&cli.command).and_then(|result| {
        let report = Report { command: command_name(&cli.command), seed: cli.seed, inputs: std::mem::take(&mut r.inputs), result };
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        emit(cli.out.as_deref(), &text)
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
