//! The `uop` batch front end. Each verb reads its inputs, runs one pipeline
//! and emits a JSON object holding its results and every exact check
//! performed; the process exits 0 iff all checks pass.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::amalgam::{correction_sum, pushout, square_sum};
use crate::banach::{
    classify_embedding, is_isometric, map_distance, norm_eval, operator_norm_witness, LinMap, SpaceRef,
};
use crate::error::{Error, Result};
use crate::exactlin::{parse_rat, rat, Rat};
use crate::fraisse::{
    back_and_forth, build_chain, embed_operator, g_witness, kernel_witness, surjectivity_witness, verify_chain,
    BnfSeed, Chain, EpsSchedule, WitnessSeed,
};
use crate::io::{self, chain_json, rat_json, vec_json, Document};
use crate::polytope::{complete_representations, symmetric_hull, Ball};
use crate::rationalize::{equivalence_delta, repair_operator};
use crate::report::Report;

fn rat_arg(s: &str) -> std::result::Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "uop", version, about = "Exact polyhedral Banach spaces, amalgams and universal-operator chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ChainOpts {
    /// Read the chain from a chain file (or `chain-build` output) instead of building it.
    #[arg(long)]
    pub chain: Option<PathBuf>,
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long = "dim-cap")]
    pub dim_cap: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ChainOpts {
    fn load(&self, stages: usize, dim_cap: usize) -> Result<Chain> {
        match &self.chain {
            Some(p) => {
                let v = io::read_json(p)?;
                io::parse_chain(v.get("chain").unwrap_or(&v))
            }
            None => build_chain(self.stages.unwrap_or(stages), self.dim_cap.unwrap_or(dim_cap), self.seed.unwrap_or(0)),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Complete and cross-check every space of a file.
    SpaceCheck { input: PathBuf },
    /// Operator norm of a map.
    OpNorm {
        input: PathBuf,
        #[arg(long, default_value = "T")]
        map: String,
    },
    /// Pushout of maps `i` and `f`.
    AmalgamPushout { input: PathBuf },
    /// Correction amalgam of map `f`.
    AmalgamCorrect {
        input: PathBuf,
        #[arg(long, value_parser = rat_arg)]
        eps: Rat,
    },
    /// `T0 ⊕ T1` for maps `T0`, `T1`, `f0`, `f1`.
    SquareSum {
        input: PathBuf,
        #[arg(long, value_parser = rat_arg)]
        eps: Rat,
        #[arg(long, value_parser = rat_arg)]
        delta: Rat,
    },
    /// Renorm the domain of `T` keeping `i0`, `j0` isometric.
    Repair {
        input: PathBuf,
        #[arg(long, value_parser = rat_arg)]
        delta: Rat,
    },
    /// Build and verify a chain.
    ChainBuild {
        #[arg(long, default_value_t = 20)]
        stages: usize,
        #[arg(long = "dim-cap", default_value_t = 6)]
        dim_cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// (G*) witness for `T` with `x0`, `y0` and seed maps `i`, `j` (param `stage`).
    GWitness {
        input: PathBuf,
        #[command(flatten)]
        chain: ChainOpts,
        #[arg(long, value_parser = rat_arg, default_value = "1/2")]
        eps: Rat,
    },
    /// Embed map `T` into the chain with `ε_n = eps·2^{−n}`.
    Embed {
        input: PathBuf,
        #[command(flatten)]
        chain: ChainOpts,
        #[arg(long, value_parser = rat_arg, default_value = "1")]
        eps: Rat,
        #[arg(long, default_value_t = 5)]
        depth: usize,
    },
    /// Back-and-forth transcript between chains built with seeds `seed` and `seed + 1`.
    Bnf {
        #[command(flatten)]
        chain: ChainOpts,
        #[arg(long, value_parser = rat_arg, default_value = "1/2")]
        eps: Rat,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Kernel witness for `x0: X0 → X` with seed `i` (param `stage`).
    Kernel {
        input: PathBuf,
        #[command(flatten)]
        chain: ChainOpts,
        #[arg(long, value_parser = rat_arg, default_value = "1/2")]
        eps: Rat,
    },
    /// Preimage of param `v` in stage param `stage`.
    Surject {
        input: PathBuf,
        #[command(flatten)]
        chain: ChainOpts,
    },
}

/// Result of one verb: extra output fields and the report.
pub struct Outcome {
    pub fields: Map<String, Value>,
    pub report: Report,
}

impl Outcome {
    fn new(report: Report) -> Self {
        Outcome {
            fields: Map::new(),
            report,
        }
    }

    fn set(&mut self, key: &str, v: Value) -> &mut Self {
        self.fields.insert(key.into(), v);
        self
    }

    pub fn pass(&self) -> bool {
        self.report.all_pass()
    }

    pub fn to_json(&self) -> Value {
        let mut m = self.fields.clone();
        m.insert("checks".into(), serde_json::to_value(&self.report.checks).expect("plain data"));
        if !self.report.notes.is_empty() {
            m.insert("notes".into(), json!(self.report.notes));
        }
        m.insert("pass".into(), json!(self.pass()));
        Value::Object(m)
    }
}

fn iso_check(r: &mut Report, name: &str, t: &LinMap) -> Result<bool> {
    let iso = is_isometric(t)?;
    r.verdict(format!("{name} isometric"), "isometric", if iso { "isometric" } else { "not isometric" }, iso);
    Ok(iso)
}

fn stage_param(doc: &Document, chain: &Chain) -> Result<usize> {
    let n = doc.param_usize("stage")?.unwrap_or(chain.last_index());
    if n >= chain.len() {
        return Err(Error::bound("stage exists", chain.last_index(), n));
    }
    Ok(n)
}

/// Rebinds a map's spaces to the chain's stage spaces when they are equal.
fn into_stage(m: &LinMap, u: &SpaceRef) -> Result<LinMap> {
    if **m.codomain() != **u {
        return Err(Error::NotANorm("seed map does not land in the chosen stage".into()));
    }
    m.with_spaces(m.domain().clone(), u.clone())
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::SpaceCheck { input } => space_check(&io::load_document(input)?),
        Command::OpNorm { input, map } => op_norm(&io::load_document(input)?, map),
        Command::AmalgamPushout { input } => amalgam_pushout(&io::load_document(input)?),
        Command::AmalgamCorrect { input, eps } => amalgam_correct(&io::load_document(input)?, eps),
        Command::SquareSum { input, eps, delta } => square_sum_cmd(&io::load_document(input)?, eps, delta),
        Command::Repair { input, delta } => repair_cmd(&io::load_document(input)?, delta),
        Command::ChainBuild { stages, dim_cap, seed } => chain_build(*stages, *dim_cap, *seed),
        Command::GWitness { input, chain, eps } => g_witness_cmd(&io::load_document(input)?, &chain.load(20, 6)?, eps),
        Command::Embed { input, chain, eps, depth } => embed_cmd(&io::load_document(input)?, &chain.load(10, 3)?, eps, *depth),
        Command::Bnf { chain, eps, depth } => bnf_cmd(chain, eps, *depth),
        Command::Kernel { input, chain, eps } => kernel_cmd(&io::load_document(input)?, &chain.load(20, 6)?, eps),
        Command::Surject { input, chain } => surject_cmd(&io::load_document(input)?, &chain.load(20, 6)?),
    }
}

pub fn space_check(doc: &Document) -> Result<Outcome> {
    let mut r = Report::new();
    let mut out = Document::new();
    for (name, s) in &doc.spaces {
        if s.dim() == 0 {
            r.identity(format!("{name}: zero space"), true);
            out.add_space(name, s.clone());
            continue;
        }
        let from_v = complete_representations(&Ball::from_vrep(s.dim(), s.vertices().to_vec())?)?;
        let from_h = complete_representations(&Ball::from_hrep(s.dim(), s.facets().to_vec())?)?;
        r.identity(format!("{name}: hull of vrep = ball"), from_v == *s.ball());
        r.identity(format!("{name}: intersection of hrep = ball"), from_h == *s.ball());
        out.add_space(name, s.clone());
    }
    let mut o = Outcome::new(r);
    o.set("spaces", out.to_json()["spaces"].clone());
    Ok(o)
}

pub fn op_norm(doc: &Document, name: &str) -> Result<Outcome> {
    let t = doc.map(name)?;
    let (norm, witness) = operator_norm_witness(t);
    let mut r = Report::new();
    let mut brute = Rat::zero();
    for v in t.domain().vertices() {
        brute = brute.max(norm_eval(t.codomain(), &t.apply(v)?)?);
    }
    r.eq_rat("‖T‖ = max over vertices v of ‖Tv‖", &norm, &brute);
    let mut o = Outcome::new(r);
    o.set("norm", rat_json(&norm));
    if let Some(w) = witness {
        o.set("witness", vec_json(&w));
    }
    Ok(o)
}

pub fn amalgam_pushout(doc: &Document) -> Result<Outcome> {
    let (i, f) = (doc.map("i")?, doc.map("f")?);
    let p = pushout(i, f)?;
    let mut r = Report::new();
    r.identity("g∘i = j∘f", p.g.compose(i)?.matrix() == p.j.compose(f)?.matrix());
    if is_isometric(i)? {
        iso_check(&mut r, "j", &p.j)?;
    }
    let images: Vec<Ball> = [&p.g, &p.j]
        .iter()
        .filter(|m| m.domain().dim() > 0)
        .map(|m| {
            let v = m.domain().vertices().iter().map(|v| m.apply(v)).collect::<Result<Vec<_>>>()?;
            Ball::from_vrep(p.w.dim(), v)
        })
        .collect::<Result<Vec<_>>>()?;
    if p.w.dim() > 0 {
        r.identity("ball W = hull of g(ball X) ∪ j(ball Y)", symmetric_hull(&images)? == *p.w.ball());
    }
    let mut d = Document::new();
    d.add_space("W", p.w.clone());
    d.add_map("g", p.g.clone());
    d.add_map("j", p.j.clone());
    let mut o = Outcome::new(r);
    o.set("result", d.to_json());
    o.set("delta_basis", io::rows_json(&p.delta_basis));
    Ok(o)
}

pub fn amalgam_correct(doc: &Document, eps: &Rat) -> Result<Outcome> {
    let f = doc.map("f")?;
    let c = correction_sum(f, eps)?;
    let mut r = Report::new();
    for (leg, name) in [(&c.ix, "i_X"), (&c.jy, "j_Y")] {
        let k = classify_embedding(leg, eps)?;
        r.verdict(format!("{name} isometric"), "Isometric", &format!("{:?}", k.verdict), k.verdict == crate::banach::Verdict::Isometric);
    }
    r.le("‖i_X − j_Y∘f‖ ≤ ε", &map_distance(&c.ix, &c.jy.compose(f)?)?, eps);
    let mut d = Document::new();
    d.add_space("Z", c.z0.clone());
    d.add_map("iX", c.ix.clone());
    d.add_map("jY", c.jy.clone());
    let mut o = Outcome::new(r);
    o.set("result", d.to_json());
    Ok(o)
}

pub fn square_sum_cmd(doc: &Document, eps: &Rat, delta: &Rat) -> Result<Outcome> {
    let (t0, t1, f0, f1) = (doc.map("T0")?, doc.map("T1")?, doc.map("f0")?, doc.map("f1")?);
    let s = square_sum(t0, t1, f0, f1, eps, delta)?;
    let mut r = Report::new();
    let (n, _) = operator_norm_witness(&s.map);
    r.le("‖T0 ⊕ T1‖ ≤ 1", &n, &Rat::one());
    r.identity("(T0⊕T1)∘i_X0 = i_X1∘T0", s.map.compose(&s.domain.ix)?.equals(&s.codomain.ix.compose(t0)?));
    r.identity("(T0⊕T1)∘j_Y0 = j_Y1∘T1", s.map.compose(&s.domain.jy)?.equals(&s.codomain.jy.compose(t1)?));
    let mut d = Document::new();
    d.add_space("Z0", s.domain.z0.clone());
    d.add_space("Z1", s.codomain.z0.clone());
    d.add_map("T", s.map.clone());
    let mut o = Outcome::new(r);
    o.set("result", d.to_json());
    Ok(o)
}

pub fn repair_cmd(doc: &Document, delta: &Rat) -> Result<Outcome> {
    let (t, i0, j0) = (doc.map("T")?, doc.map("i0")?, doc.map("j0")?);
    let rep = repair_operator(t, i0, j0, delta)?;
    let mut r = Report::new();
    let (n, _) = operator_norm_witness(&rep.t);
    r.le("‖T′‖ ≤ 1", &n, &Rat::one());
    r.le("‖·‖′_X is (1+δ)²−1 equivalent to ‖·‖_X", &equivalence_delta(&rep.x.repaired, &rep.x.original)?, &rep.eps);
    iso_check(&mut r, "X0 ⊆ X′", &rep.x.pinned)?;
    r.note(format!("mode {:?}", rep.mode));
    let mut d = Document::new();
    d.add_space("X", rep.x.repaired.clone());
    d.add_space("Y", rep.t.codomain().clone());
    d.add_map("T", rep.t.clone());
    let mut o = Outcome::new(r);
    o.set("result", d.to_json());
    o.set("eps", rat_json(&rep.eps));
    Ok(o)
}

pub fn chain_build(stages: usize, dim_cap: usize, seed: u64) -> Result<Outcome> {
    let c = build_chain(stages, dim_cap, seed)?;
    let r = verify_chain(&c)?;
    let mut o = Outcome::new(r);
    o.set("chain", chain_json(&c));
    o.set("realized", json!(c.realized_count()));
    Ok(o)
}

pub fn g_witness_cmd(doc: &Document, chain: &Chain, eps: &Rat) -> Result<Outcome> {
    let n = stage_param(doc, chain)?;
    let st = &chain.stages[n];
    let seed = WitnessSeed {
        stage: n,
        i: into_stage(doc.map("i")?, &st.u)?,
        j: into_stage(doc.map("j")?, &st.v)?,
    };
    let w = g_witness(chain, doc.map("T")?, doc.map("x0")?, doc.map("y0")?, &seed, eps)?;
    let mut d = Document::new();
    d.add_map("i'", w.i_prime.clone());
    d.add_map("j'", w.j_prime.clone());
    let mut o = Outcome::new(w.report);
    o.set("m", json!(w.m));
    o.set("result", d.to_json());
    Ok(o)
}

pub fn embed_cmd(doc: &Document, chain: &Chain, eps: &Rat, depth: usize) -> Result<Outcome> {
    let tr = embed_operator(chain, doc.map("T")?, &EpsSchedule::dyadic(eps.clone()), depth)?;
    let squares: Vec<Value> = tr
        .squares
        .iter()
        .zip(&tr.stages)
        .map(|(s, m)| json!({"stage": m, "quality": rat_json(&s.eps), "defect": rat_json(&s.defect)}))
        .collect();
    let mut o = Outcome::new(tr.report);
    o.set("squares", Value::Array(squares));
    Ok(o)
}

pub fn bnf_cmd(opts: &ChainOpts, eps: &Rat, depth: usize) -> Result<Outcome> {
    let (stages, cap, seed) = (opts.stages.unwrap_or(8), opts.dim_cap.unwrap_or(2), opts.seed.unwrap_or(1));
    let a = build_chain(stages, cap, seed)?;
    let b = build_chain(stages, cap, seed + 1)?;
    let (bseed, b) = match (1..a.len()).find(|&k| a.stages[k].u.dim() >= 1) {
        Some(s) => BnfSeed::by_witness(&a, s, &b, &rat(63, 64))?,
        None => (BnfSeed::zero(&a, &b)?, b),
    };
    let t = back_and_forth(&a, &b, &bseed, eps, depth)?;
    let mut o = Outcome::new(t.report);
    o.set("etas", Value::Array(t.etas.iter().map(rat_json).collect()));
    o.set("eps0", rat_json(&t.schedule.eps0));
    o.set("seed_quality", rat_json(&bseed.square.eps));
    Ok(o)
}

pub fn kernel_cmd(doc: &Document, chain: &Chain, eps: &Rat) -> Result<Outcome> {
    let x0 = doc.map("x0")?;
    let n = stage_param(doc, chain)?;
    let st = &chain.stages[n];
    let i = match doc.maps.get("i") {
        Some(i) => into_stage(i, &st.u)?,
        None => LinMap::zero(x0.domain().clone(), st.u.clone()),
    };
    let (ip, w) = kernel_witness(chain, x0, n, &i, eps)?;
    let mut d = Document::new();
    d.add_map("i'", ip);
    let mut o = Outcome::new(w.report);
    o.set("m", json!(w.m));
    o.set("result", d.to_json());
    Ok(o)
}

pub fn surject_cmd(doc: &Document, chain: &Chain) -> Result<Outcome> {
    let n = stage_param(doc, chain)?;
    let v = doc.param_vec("v")?.ok_or_else(|| Error::UnknownReference("params.v".into()))?;
    let (m, u, _, r) = surjectivity_witness(chain, n, &v)?;
    let mut o = Outcome::new(r);
    o.set("m", json!(m));
    o.set("u", vec_json(&u));
    Ok(o)
}

/// Parses arguments, runs the verb, writes the output and returns the exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(o) => {
            let v = o.to_json();
            let written = match &cli.out {
                Some(p) => io::write_json(p, &v),
                None => {
                    print!("{}", io::to_canonical_string(&v));
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 2;
            }
            if o.pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
