use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mukai_core::arith::gcd_list;
use mukai_core::lattice::{in_coset, Lattice, Sublattice};
use mukai_core::moduli::{self, AmpleChamber};
use mukai_core::mukai::{self, MukaiLattice, MukaiVector};
use mukai_core::transforms::{self, ChamberStep, ChamberWalk, Generator, RootSet, Transform};
use mukai_core::zeta::{self, FrobeniusData, GaloisField, Hypersurface};
use mukai_core::{Error, IntMatrix, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Value};

use crate::document::{as_int_vec, as_matrix, int_value, matrix_value, parse_rows, parse_vector, vec_value, Document};

pub const MAX_STEPS_ENV: &str = "MUKAI_MAX_STEPS";

#[derive(Parser, Debug)]
#[command(name = "mukai", version, about = "Exact Mukai-lattice calculus for K3 surfaces")]
pub struct Cli {
    /// Re-check postconditions and fail with exit code 2 on any violation.
    #[arg(long, global = true)]
    pub verify: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct LatticeArg {
    /// Lattice document `{"gram": [[...]]}`.
    #[arg(long)]
    pub lattice: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct RootArgs {
    /// Root set document `{"roots": [[...]]}`.
    #[arg(long, conflicts_with = "root_bound")]
    pub roots: Option<PathBuf>,
    /// Enumerate roots with coordinates in `[-B, B]` and orient them towards the reference class.
    #[arg(long)]
    pub root_bound: Option<u32>,
    /// Step budget; defaults to $MUKAI_MAX_STEPS, then to 10 * bound * rank.
    #[arg(long)]
    pub max_steps: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mukai pairing <u, v>.
    Pair {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Mukai vector (r, c1, r + c1^2/2 - c2).
    Vector {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        rank: String,
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        #[arg(long, allow_hyphen_values = true)]
        c2: String,
    },
    /// Euler pairing chi(u, v) = -<u, v>.
    Euler {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Tensoring with a line bundle of class c1.
    Twist {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        #[arg(long, allow_hyphen_values = true)]
        apply: Option<String>,
    },
    /// Spherical twist along a vector of square +-2.
    Spherical {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        apply: Option<String>,
    },
    /// The shift [1], acting as -1.
    Shift {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        apply: Option<String>,
    },
    /// Identity on the outer summands and -1 on NS.
    MinusOnePic {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        apply: Option<String>,
    },
    /// (a, b, c) -> (c, -b, a).
    SwapOuter {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        apply: Option<String>,
    },
    /// Normalise an isometry fixing (0,0,1) so it also fixes (1,0,0) and preserves the chamber of h.
    Normalize {
        #[command(flatten)]
        lattice: LatticeArg,
        /// Isometry document or transform report.
        #[arg(long)]
        isometry: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[command(flatten)]
        roots: RootArgs,
    },
    /// Walk a positive class into the chamber of a root set.
    Chamber {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[command(flatten)]
        roots: RootArgs,
    },
    /// Roots (square -2) with coordinates in [-bound, bound].
    Roots {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        bound: u32,
        /// Orient every root positively against this class.
        #[arg(long, allow_hyphen_values = true)]
        orient: Option<String>,
    },
    /// Whether an isometry maps (0,0,1) to +-(0,0,1).
    Filtered {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        isometry: PathBuf,
    },
    /// Discriminant group N^vee / N.
    Disc {
        #[command(flatten)]
        lattice: LatticeArg,
    },
    /// Artin invariant sigma_0 of a p-elementary lattice.
    Artin {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        p: String,
    },
    /// Saturation of the span of the given rows.
    Saturate {
        #[command(flatten)]
        lattice: LatticeArg,
        /// Rows "a,b;c,d".
        #[arg(long, allow_hyphen_values = true)]
        basis: String,
    },
    /// Whether l lies in pN + Gamma.
    Coset {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        p: String,
        /// Rows spanning Gamma; empty for Gamma = 0.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        gamma: String,
    },
    /// Saturation E of F + Zl with its discriminant group.
    Section7 {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        p: String,
    },
    /// Whether v is primitive and isotropic.
    Moduli {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Whether some Mukai vector pairs to 1 with v.
    Fine {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Make the rank positive and prime to p.
    Changerank {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        ample: String,
    },
    /// Twist v so that its NS component is in the chamber and outside pN + Gamma.
    Improve {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        p: String,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        gamma: String,
        /// Candidate classes "a,b;c,d".
        #[arg(long, allow_hyphen_values = true)]
        amples: String,
        /// Reference class of the chamber.
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long)]
        roots: Option<PathBuf>,
        #[arg(long, conflicts_with = "roots")]
        root_bound: Option<u32>,
        /// Coefficient box radius; defaults to 2p.
        #[arg(long)]
        radius: Option<u32>,
    },
    /// Which unique-partner criteria apply.
    Partners {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        p: String,
    },
    /// E saturated, of rank at most 9, containing the ample witness.
    LiftHypotheses {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, allow_hyphen_values = true)]
        e: String,
        #[arg(long, allow_hyphen_values = true)]
        ample: String,
    },
    /// Frobenius characteristic polynomials.
    Zeta {
        #[command(subcommand)]
        op: ZetaOp,
    },
    /// Count points of a projective hypersurface over F_q.
    EnumeratePoints {
        /// Homogeneous polynomial, e.g. "x0^4 + x1^4 + x2^4 + x3^4".
        #[arg(long, allow_hyphen_values = true)]
        equation: String,
        #[arg(long)]
        q: u64,
        /// Monic irreducible modulus for F_q over F_p, ascending coefficients.
        #[arg(long)]
        modulus: Option<String>,
        /// Number of homogeneous variables; defaults to the largest index + 1.
        #[arg(long)]
        vars: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ZetaOp {
    /// Functional equation and root moduli.
    Validate {
        #[arg(long)]
        frobenius: PathBuf,
        #[arg(long, default_value_t = zeta::DEFAULT_ROOT_TOLERANCE)]
        tol: f64,
    },
    /// #X(F_{q^n}).
    Count {
        #[arg(long)]
        frobenius: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Trace of F^n on the Mukai crystal; with --h2, on H^2 only.
    Trace {
        #[arg(long)]
        frobenius: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h2: bool,
    },
    /// Whether two surfaces have the same zeta function.
    Equal {
        #[arg(long)]
        frobenius: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    /// Newton polygon slopes and height.
    Slopes {
        #[arg(long)]
        frobenius: PathBuf,
    },
}

fn read_doc(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    Document::parse(&text)
}

fn load_lattice(arg: &LatticeArg) -> Result<Lattice> {
    match read_doc(&arg.lattice)? {
        Document::Lattice { gram } => Lattice::new(gram),
        _ => Err(Error::Malformed(format!("{}: expected a lattice document", arg.lattice.display()))),
    }
}

fn load_mukai(arg: &LatticeArg) -> Result<MukaiLattice> {
    let ns = load_lattice(arg)?;
    ns.require_even()?;
    Ok(MukaiLattice::new(ns))
}

fn load_frobenius(path: &Path) -> Result<FrobeniusData> {
    match read_doc(path)? {
        Document::Frobenius { p, q, charpoly } => FrobeniusData::from_either_order(p, q, charpoly),
        _ => Err(Error::Malformed(format!("{}: expected a frobenius document", path.display()))),
    }
}

/// `"r,b1,..,s"` or `@file` holding a Mukai vector document.
fn mukai_arg(l: &MukaiLattice, s: &str) -> Result<MukaiVector> {
    let v = if let Some(path) = s.strip_prefix('@') {
        match read_doc(Path::new(path))? {
            Document::MukaiVector(v) => v,
            _ => return Err(Error::Malformed(format!("{path}: expected a mukai vector document"))),
        }
    } else {
        MukaiVector::from_coords(&parse_vector(s)?)?
    };
    l.check(&v)?;
    Ok(v)
}

fn ns_vector(ns: &Lattice, s: &str) -> Result<Vec<BigInt>> {
    let v = parse_vector(s)?;
    if v.len() != ns.rank() {
        return Err(Error::DimensionMismatch { expected: ns.rank(), got: v.len() });
    }
    Ok(v)
}

fn int_arg(s: &str, what: &str) -> Result<BigInt> {
    match parse_vector(s)?.as_slice() {
        [x] => Ok(x.clone()),
        _ => Err(Error::Malformed(format!("{what}: expected a single integer"))),
    }
}

fn sublattice_arg(ns: &Lattice, s: &str) -> Result<Sublattice> {
    let rows = parse_rows(s)?;
    if rows.is_empty() {
        return Ok(Sublattice::zero(ns.clone()));
    }
    Sublattice::from_rows(ns.clone(), rows)
}

fn generator_value(g: &Generator) -> Value {
    let mut obj = Map::new();
    obj.insert("generator".into(), Value::String(g.label().into()));
    match g {
        Generator::Twist(c) => {
            obj.insert("c1".into(), vec_value(c));
        }
        Generator::Spherical(v) => {
            obj.insert("v".into(), vec_value(&v.to_coords()));
        }
        Generator::ModuliIdentification(m) | Generator::User(m) => {
            obj.insert("matrix".into(), matrix_value(m));
        }
        _ => {}
    }
    Value::Object(obj)
}

pub fn word_value(t: &Transform) -> Value {
    Value::Array(t.word().iter().map(generator_value).collect())
}

pub fn parse_generator(v: &Value) -> Result<Generator> {
    let bad = |m: &str| Error::Malformed(format!("generator record: {m}"));
    let Value::Object(obj) = v else { return Err(bad("expected an object")) };
    let Some(Value::String(label)) = obj.get("generator") else { return Err(bad("missing \"generator\"")) };
    let field = |k: &str| obj.get(k).ok_or_else(|| bad(&format!("missing {k:?}")));
    Ok(match label.as_str() {
        "twist" => Generator::Twist(as_int_vec(field("c1")?, "c1")?),
        "spherical" => Generator::Spherical(MukaiVector::from_coords(&as_int_vec(field("v")?, "v")?)?),
        "minus_one_pic" => Generator::MinusOnePic,
        "shift" => Generator::Shift,
        "swap_outer" => Generator::SwapOuter,
        "moduli_identification" => Generator::ModuliIdentification(as_matrix(field("matrix")?, "matrix")?),
        "user" => Generator::User(as_matrix(field("matrix")?, "matrix")?),
        other => return Err(bad(&format!("unknown generator {other:?}"))),
    })
}

fn load_transform(l: &MukaiLattice, path: &Path) -> Result<Transform> {
    match read_doc(path)? {
        Document::Isometry { matrix } => Transform::user(l, matrix),
        Document::Report { fields, .. } => {
            let Some(Value::Array(word)) = fields.get("word") else {
                return Err(Error::Malformed(format!("{}: report has no word", path.display())));
            };
            let gens = word.iter().map(parse_generator).collect::<Result<Vec<_>>>()?;
            let t = Transform::from_word(l, gens)?;
            if let Some(m) = fields.get("matrix") {
                if &as_matrix(m, "matrix")? != t.matrix() {
                    return Err(Error::Malformed(format!("{}: word does not replay to matrix", path.display())));
                }
            }
            Ok(t)
        }
        _ => Err(Error::Malformed(format!("{}: expected an isometry document or transform report", path.display()))),
    }
}

fn mukai_value(v: &MukaiVector) -> Value {
    Document::MukaiVector(v.clone()).to_value()
}

fn report(kind: &str, fields: Vec<(&str, Value)>) -> String {
    let mut map = Map::new();
    for (k, v) in fields {
        map.insert(k.into(), v);
    }
    Document::Report { kind: kind.into(), fields: map }.print()
}

fn check(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Assertion(format!("verification failed: {what}")))
    }
}

fn verify_transform(l: &MukaiLattice, t: &Transform) -> Result<()> {
    check(mukai::is_isometry(t.matrix(), l)?, "matrix preserves the Mukai pairing")?;
    check(t.replays_exactly(l)?, "word replays to the matrix")
}

fn transform_output(l: &MukaiLattice, t: &Transform, apply: Option<&str>, verify: bool) -> Result<String> {
    if verify {
        verify_transform(l, t)?;
    }
    let mut fields = vec![("matrix", matrix_value(t.matrix())), ("word", word_value(t))];
    if let Some(a) = apply {
        let v = mukai_arg(l, a)?;
        let image = t.apply(&v)?;
        if verify {
            check(l.pairing(&image, &image)? == l.pairing(&v, &v)?, "image has the same square")?;
        }
        fields.push(("image", mukai_value(&image)));
    }
    Ok(report("transform", fields))
}

fn step_budget(explicit: Option<usize>, bound: u32, rho: usize) -> Result<usize> {
    if let Some(n) = explicit {
        return Ok(n);
    }
    match std::env::var(MAX_STEPS_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| Error::Malformed(format!("{MAX_STEPS_ENV}={s:?} is not a step count"))),
        Err(_) => Ok(transforms::default_max_steps(bound, rho)),
    }
}

fn load_roots(ns: &Lattice, path: Option<&PathBuf>, bound: Option<u32>, h: &[BigInt]) -> Result<(RootSet, u32)> {
    match (path, bound) {
        (Some(p), _) => match read_doc(p)? {
            Document::RootSet { roots } => {
                let b = roots.iter().flatten().map(|x| u32::try_from(x.abs()).unwrap_or(u32::MAX)).max().unwrap_or(1);
                Ok((RootSet::new(ns, roots)?, b.max(1)))
            }
            _ => Err(Error::Malformed(format!("{}: expected a rootset document", p.display()))),
        },
        (None, Some(b)) => Ok((transforms::enumerate_roots(ns, b).oriented_towards(ns, h)?, b)),
        (None, None) => Err(Error::Malformed("one of --roots or --root-bound is required".into())),
    }
}

fn walk_value(w: &ChamberWalk) -> Value {
    Value::Array(
        w.steps
            .iter()
            .map(|s| {
                let mut obj = Map::new();
                match s {
                    ChamberStep::MinusOne => {
                        obj.insert("step".into(), Value::String("minus_one".into()));
                    }
                    ChamberStep::Reflect(d) => {
                        obj.insert("step".into(), Value::String("reflect".into()));
                        obj.insert("root".into(), vec_value(d));
                    }
                }
                Value::Object(obj)
            })
            .collect(),
    )
}

fn verify_chamber(ns: &Lattice, roots: &RootSet, y: &[BigInt], h: &[BigInt]) -> Result<()> {
    check(ns.pair(y, h)?.is_positive(), "image pairs positively with h")?;
    for r in roots.roots() {
        check(!ns.pair(y, r)?.is_negative(), "image is on the nonnegative side of every root")?;
    }
    Ok(())
}

fn bool_out(b: bool) -> String {
    format!("{b}\n")
}

fn int_out(n: &BigInt) -> String {
    format!("{n}\n")
}

pub fn execute(cli: &Cli) -> Result<(String, Vec<String>)> {
    let verify = cli.verify;
    let mut warnings = Vec::new();
    let out = match &cli.command {
        Command::Pair { lattice, u, v } | Command::Euler { lattice, u, v } => {
            let l = load_mukai(lattice)?;
            let (u, v) = (mukai_arg(&l, u)?, mukai_arg(&l, v)?);
            let pairing = mukai::mukai_pairing(&l, &u, &v)?;
            if verify {
                check(pairing == mukai::mukai_pairing(&l, &v, &u)?, "pairing is symmetric")?;
                let direct = l.ns().pair(&u.c1, &v.c1)? - &u.r * &v.s - &v.r * &u.s;
                check(pairing == direct, "pairing matches bb' - rs' - r's")?;
            }
            match &cli.command {
                Command::Euler { .. } => int_out(&mukai::euler_pairing(&l, &u, &v)?),
                _ => int_out(&pairing),
            }
        }
        Command::Vector { lattice, rank, c1, c2 } => {
            let l = load_mukai(lattice)?;
            let r = int_arg(rank, "rank")?;
            let c1 = ns_vector(l.ns(), c1)?;
            let c2 = int_arg(c2, "c2")?;
            let v = mukai::mukai_vector(&l, r.clone(), c1.clone(), c2.clone())?;
            if verify {
                let sq = l.ns().norm(&c1)?;
                check(v.r == r && v.c1 == c1, "rank and c1 are copied")?;
                check(&v.s * 2 == &r * 2 + &sq - &c2 * 2, "s = r + c1^2/2 - c2")?;
            }
            Document::MukaiVector(v).print()
        }
        Command::Twist { lattice, c1, apply } => {
            let l = load_mukai(lattice)?;
            let c = ns_vector(l.ns(), c1)?;
            transform_output(&l, &transforms::line_bundle_twist(&l, &c)?, apply.as_deref(), verify)?
        }
        Command::Spherical { lattice, v, apply } => {
            let l = load_mukai(lattice)?;
            let v = mukai_arg(&l, v)?;
            transform_output(&l, &transforms::spherical_twist(&l, &v)?, apply.as_deref(), verify)?
        }
        Command::Shift { lattice, apply } => {
            let l = load_mukai(lattice)?;
            transform_output(&l, &transforms::shift(&l), apply.as_deref(), verify)?
        }
        Command::MinusOnePic { lattice, apply } => {
            let l = load_mukai(lattice)?;
            transform_output(&l, &transforms::minus_one_pic(&l), apply.as_deref(), verify)?
        }
        Command::SwapOuter { lattice, apply } => {
            let l = load_mukai(lattice)?;
            transform_output(&l, &transforms::swap_outer(&l), apply.as_deref(), verify)?
        }
        Command::Normalize { lattice, isometry, h, roots } => {
            let l = load_mukai(lattice)?;
            let phi = load_transform(&l, isometry)?;
            let h = ns_vector(l.ns(), h)?;
            let (rs, bound) = load_roots(l.ns(), roots.roots.as_ref(), roots.root_bound, &h)?;
            let budget = step_budget(roots.max_steps, bound, l.rho())?;
            let n = transforms::normalize(&l, &phi, &rs, &h, budget)?;
            if verify {
                verify_transform(&l, &n.word)?;
                verify_transform(&l, &n.normalized)?;
                check(n.normalized.apply(&l.unit())? == l.unit(), "normalized fixes (1,0,0)")?;
                check(n.normalized.apply(&l.point())? == l.point(), "normalized fixes (0,0,1)")?;
                verify_chamber(l.ns(), &rs, &n.walk.image, &h)?;
                check(
                    n.normalized.isometry().ns_block().mul_vec(&h)? == n.walk.image,
                    "NS block sends h to the walk image",
                )?;
            }
            report(
                "normalize",
                vec![
                    ("word", word_value(&n.word)),
                    ("matrix", matrix_value(n.word.matrix())),
                    ("normalized", matrix_value(n.normalized.matrix())),
                    ("walk", walk_value(&n.walk)),
                    ("image", vec_value(&n.walk.image)),
                ],
            )
        }
        Command::Chamber { lattice, x, h, roots } => {
            let ns = load_lattice(lattice)?;
            let (x, h) = (ns_vector(&ns, x)?, ns_vector(&ns, h)?);
            let (rs, bound) = load_roots(&ns, roots.roots.as_ref(), roots.root_bound, &h)?;
            let budget = step_budget(roots.max_steps, bound, ns.rank())?;
            let w = transforms::chamber_walk(&ns, &rs, &x, &h, budget)?;
            if verify {
                verify_chamber(&ns, &rs, &w.image, &h)?;
                check(w.replay(&ns, &x)? == w.image, "steps replay to the image")?;
            }
            report("chamber", vec![("image", vec_value(&w.image)), ("steps", walk_value(&w))])
        }
        Command::Roots { lattice, bound, orient } => {
            let ns = load_lattice(lattice)?;
            let mut rs = transforms::enumerate_roots(&ns, *bound);
            if let Some(h) = orient {
                rs = rs.oriented_towards(&ns, &ns_vector(&ns, h)?)?;
            }
            if verify {
                for r in rs.roots() {
                    check(ns.norm(r)? == BigInt::from(-2), "every root has square -2")?;
                }
            }
            Document::RootSet { roots: rs.roots().to_vec() }.print()
        }
        Command::Filtered { lattice, isometry } => {
            let l = load_mukai(lattice)?;
            let t = load_transform(&l, isometry)?;
            let f = transforms::is_filtered(&t);
            if verify {
                let img = t.apply(&l.point())?;
                check(f == (img == l.point() || img == l.point().neg()), "point class maps to +-itself")?;
            }
            bool_out(f)
        }
        Command::Disc { lattice } => {
            let ns = load_lattice(lattice)?;
            let d = ns.discriminant_group();
            if verify {
                check(d.order() == ns.determinant().abs(), "|N^vee/N| = |det|")?;
            }
            report(
                "disc",
                vec![
                    ("invariant_factors", vec_value(&d.invariant_factors)),
                    ("order", int_value(&d.order())),
                    ("determinant", int_value(ns.determinant())),
                ],
            )
        }
        Command::Artin { lattice, p } => {
            let ns = load_lattice(lattice)?;
            let p = int_arg(p, "p")?;
            mukai_core::arith::require_odd_prime(&p)?;
            let a = ns.artin_invariant(&p)?;
            if let Some(w) = a.warning {
                warnings.push(w);
            }
            if verify {
                let d = ns.discriminant_group();
                check(d.length() == 2 * a.sigma0 as usize, "discriminant group has length 2 sigma_0")?;
                check(d.invariant_factors.iter().all(|f| f == &p), "discriminant group is p-elementary")?;
            }
            int_out(&BigInt::from(a.sigma0))
        }
        Command::Saturate { lattice, basis } => {
            let ns = load_lattice(lattice)?;
            let rows = parse_rows(basis)?;
            let gens = IntMatrix::from_rows_with_cols(rows, ns.rank())?;
            let sub = Sublattice::span(ns.clone(), &gens)?;
            let sat = sub.saturate();
            let index = sub.saturation_index();
            if verify {
                check(sat.is_primitive(), "saturation is primitive")?;
                for r in gens.to_rows() {
                    check(sat.contains(&r)?, "saturation contains the generators")?;
                }
                check(sat.rank() == sub.rank(), "saturation has the same rank")?;
            }
            report("saturate", vec![("basis", matrix_value(sat.basis())), ("index", int_value(&index))])
        }
        Command::Coset { lattice, l, p, gamma } => {
            let ns = load_lattice(lattice)?;
            let lv = ns_vector(&ns, l)?;
            let p = int_arg(p, "p")?;
            let g = sublattice_arg(&ns, gamma)?;
            let w = g.coset_witness(&lv, &p)?;
            if verify {
                check(w.is_some() == in_coset(&ns, &lv, &p, &g)?, "witness agrees with membership")?;
                if let Some(w) = &w {
                    let mut acc: Vec<BigInt> = w.x.iter().map(|x| x * &p).collect();
                    for (c, row) in w.gamma_coeffs.iter().zip(g.basis().to_rows()) {
                        for (a, b) in acc.iter_mut().zip(row) {
                            *a += c * b;
                        }
                    }
                    check(acc == lv, "l = sum c_i gamma_i + p x")?;
                }
            }
            match w {
                Some(w) => report(
                    "coset",
                    vec![
                        ("in_coset", Value::Bool(true)),
                        ("gamma_coeffs", vec_value(&w.gamma_coeffs)),
                        ("x", vec_value(&w.x)),
                    ],
                ),
                None => report("coset", vec![("in_coset", Value::Bool(false))]),
            }
        }
        Command::Section7 { lattice, f, l, p } => {
            let ns = load_lattice(lattice)?;
            let fs = Sublattice::from_rows(ns.clone(), parse_rows(f)?)?;
            let lv = ns_vector(&ns, l)?;
            let p = int_arg(p, "p")?;
            let span = moduli::section7_pipeline(&ns, &fs, &lv, &p)?;
            if verify {
                check(span.e.is_primitive() && span.e.rank() == 3, "E is saturated of rank 3")?;
                check(span.e.contains(&lv)?, "E contains l")?;
                for r in fs.basis().to_rows() {
                    check(span.e.contains(&r)?, "E contains F")?;
                }
            }
            report(
                "section7",
                vec![
                    ("basis", matrix_value(span.e.basis())),
                    ("gram", matrix_value(&span.e.gram())),
                    ("determinant", int_value(&span.determinant)),
                    ("invariant_factors", vec_value(&span.disc.invariant_factors)),
                ],
            )
        }
        Command::Moduli { lattice, v } => {
            let l = load_mukai(lattice)?;
            let v = mukai_arg(&l, v)?;
            let b = moduli::moduli_nonempty(&l, &v)?;
            if verify {
                let g = gcd_list(&v.to_coords());
                check(b == (g.is_one() && l.norm(&v)?.is_zero()), "primitive and isotropic")?;
            }
            bool_out(b)
        }
        Command::Fine { lattice, v } => {
            let l = load_mukai(lattice)?;
            let v = mukai_arg(&l, v)?;
            let f = moduli::fine_moduli(&l, &v)?;
            if verify {
                if let Some(w) = &f.witness {
                    check(l.pairing(&v, w)?.is_one(), "<v, w> = 1")?;
                }
            }
            let mut fields = vec![("fine", Value::Bool(f.fine))];
            if let Some(w) = &f.witness {
                fields.push(("witness", mukai_value(w)));
            }
            report("fine", fields)
        }
        Command::Changerank { lattice, v, p, ample } => {
            let l = load_mukai(lattice)?;
            let v = mukai_arg(&l, v)?;
            let p = int_arg(p, "p")?;
            let a = ns_vector(l.ns(), ample)?;
            let res = moduli::change_rank(&l, &v, &p, &a)?;
            if verify {
                verify_transform(&l, &res.word)?;
                check(res.word.apply(&v)? == res.vector, "word sends v to the output")?;
                check(moduli::rank_is_good(&res.vector, &p), "r' > 0 and gcd(r', p) = 1")?;
                check(BigInt::from(res.candidates_tried) <= p, "at most p twist candidates")?;
            }
            report(
                "changerank",
                vec![
                    ("vector", mukai_value(&res.vector)),
                    ("word", word_value(&res.word)),
                    ("matrix", matrix_value(res.word.matrix())),
                    ("candidates_tried", Value::from(res.candidates_tried)),
                ],
            )
        }
        Command::Improve { lattice, v, p, gamma, amples, h, roots, root_bound, radius } => {
            let l = load_mukai(lattice)?;
            let ns = l.ns();
            let v = mukai_arg(&l, v)?;
            let p = int_arg(p, "p")?;
            let g = sublattice_arg(ns, gamma)?;
            let cands = parse_rows(amples)?;
            let h = ns_vector(ns, h)?;
            let (rs, _) = match (roots, root_bound) {
                (None, None) => (RootSet::empty(), 0),
                (r, b) => load_roots(ns, r.as_ref(), *b, &h)?,
            };
            let chamber = AmpleChamber::new(ns, rs, h)?;
            let rad = radius.unwrap_or_else(|| moduli::default_improve_radius(&p));
            let res = moduli::improve_vector(&l, &v, &g, &cands, &chamber, &p, rad)?;
            if verify {
                verify_transform(&l, &res.word)?;
                check(chamber.contains(ns, &res.vector.c1)?, "new class is in the chamber")?;
                check(!in_coset(ns, &res.vector.c1, &p, &g)?, "new class is outside pN + Gamma")?;
                check(res.word.apply(&v)? == res.vector, "word sends v to the output")?;
            }
            report(
                "improve",
                vec![
                    ("vector", mukai_value(&res.vector)),
                    ("coefficients", vec_value(&res.coefficients)),
                    ("word", word_value(&res.word)),
                ],
            )
        }
        Command::Partners { lattice, p } => {
            let ns = load_lattice(lattice)?;
            let p = int_arg(p, "p")?;
            let verdict = moduli::partner_uniqueness(&ns, &p)?;
            if verify {
                check(verdict.unique() || ns.rank() < 11, "rank >= 11 forces uniqueness")?;
            }
            report(
                "partners",
                vec![
                    ("unique", Value::Bool(verdict.unique())),
                    ("criteria", Value::Array(verdict.fired.iter().map(|c| Value::String(c.describe())).collect())),
                    ("verdict", Value::String(verdict.summary())),
                ],
            )
        }
        Command::LiftHypotheses { lattice, e, ample } => {
            let ns = load_lattice(lattice)?;
            let es = Sublattice::from_rows(ns.clone(), parse_rows(e)?)?;
            let a = ns_vector(&ns, ample)?;
            let h = moduli::char0_lift_hypotheses(&ns, &es, &a)?;
            if verify {
                check(h.saturated == (es.saturation_index().is_one()), "saturation index is 1")?;
            }
            bool_out(h.holds())
        }
        Command::Zeta { op } => zeta_command(op, verify)?,
        Command::EnumeratePoints { equation, q, modulus, vars } => {
            let h = Hypersurface::parse(equation, *vars)?;
            let m = match modulus {
                Some(s) => Some(
                    parse_vector(s)?
                        .iter()
                        .map(|c| {
                            u64::try_from(c)
                                .map_err(|_| Error::Malformed("modulus coefficients must be nonnegative".into()))
                        })
                        .collect::<Result<Vec<u64>>>()?,
                ),
                None => None,
            };
            let field = GaloisField::new(*q, m)?;
            let n = h.count_points(&field)?;
            if verify {
                let total = (0..h.nvars() as u32).map(|i| q.pow(i)).sum::<u64>();
                check(n <= total, "count does not exceed the size of projective space")?;
            }
            format!("{n}\n")
        }
    };
    Ok((out, warnings))
}

fn zeta_command(op: &ZetaOp, verify: bool) -> Result<String> {
    Ok(match op {
        ZetaOp::Validate { frobenius, tol } => {
            let f = load_frobenius(frobenius)?;
            let r = f.weil_validate(*tol);
            let mut fields = vec![
                ("duality", Value::Bool(r.duality)),
                ("root_modulus", Value::Bool(r.root_modulus)),
                ("max_root_deviation", serde_json::json!(r.max_root_deviation)),
                ("tolerance", serde_json::json!(r.tolerance)),
                ("passes", Value::Bool(r.passes())),
            ];
            if let Some(i) = r.duality_failure {
                fields.insert(1, ("duality_failure_index", Value::from(i)));
            }
            report("weil", fields)
        }
        ZetaOp::Count { frobenius, n } => {
            let f = load_frobenius(frobenius)?;
            let c = f.point_count(*n)?;
            if verify {
                let t = f.trace(*n)?;
                let q2n = num_traits::Pow::pow(f.q(), 2 * *n as u32);
                check(c == BigInt::one() + q2n + &t, "count = 1 + q^2n + Tr")?;
                let bound = BigInt::from(22) * num_traits::Pow::pow(f.q(), *n as u32);
                if f.weil_validate(zeta::DEFAULT_ROOT_TOLERANCE).root_modulus {
                    check(t.abs() <= bound, "|Tr| <= 22 q^n")?;
                }
            }
            int_out(&c)
        }
        ZetaOp::Trace { frobenius, n, h2 } => {
            let f = load_frobenius(frobenius)?;
            let m = f.mukai_trace(*n)?;
            let t = f.trace(*n)?;
            if verify {
                check(
                    &m - &t == BigInt::from(2) * num_traits::Pow::pow(f.q(), *n as u32),
                    "Mukai trace exceeds H^2 trace by 2q^n",
                )?;
            }
            int_out(if *h2 { &t } else { &m })
        }
        ZetaOp::Equal { frobenius, other } => {
            let (a, b) = (load_frobenius(frobenius)?, load_frobenius(other)?);
            let c = zeta::zeta_equal(&a, &b)?;
            if verify {
                let (sa, sb) = (a.power_sums(22), b.power_sums(22));
                match c.witness {
                    Some(n) => {
                        check(sa[n - 1] != sb[n - 1], "counts differ at the witness")?;
                        check(sa[..n - 1] == sb[..n - 1], "counts agree below the witness")?;
                    }
                    None => check(sa == sb, "all counts agree")?,
                }
            }
            let mut fields = vec![("equal", Value::Bool(c.equal))];
            if let Some(n) = c.witness {
                fields.push(("witness", Value::from(n)));
            }
            report("zeta_equal", fields)
        }
        ZetaOp::Slopes { frobenius } => {
            let f = load_frobenius(frobenius)?;
            let np = f.newton_polygon();
            if verify {
                let total: num_rational::BigRational = np.slopes.iter().cloned().sum();
                check(total == num_rational::BigRational::from_integer(BigInt::from(22)), "slopes sum to 22")?;
            }
            report(
                "slopes",
                vec![
                    ("slopes", Value::Array(np.slopes.iter().map(|s| Value::String(s.to_string())).collect())),
                    ("classification", Value::String(np.class.to_string())),
                ],
            )
        }
    })
}

/// Parses `argv`, runs the command and returns the exit code: 0 on success,
/// 1 for invalid input, 2 for failed computations or verification.
pub fn run<I, S>(argv: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, warnings)) => {
            for w in warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_input_error() {
                1
            } else {
                2
            }
        }
    }
}
