//! Finite prefixes of the chain `F₀ ⊆ F₁ ⊆ ⋯` of rational operators whose
//! completion is the universal operator, and the witness procedures that run
//! against such a prefix.
//!
//! Stage carriers are `ℚ^d` with the previous stage occupying the leading
//! coordinates, so every inclusion between stages is a leading inclusion.

mod tasks;
mod universal;
mod witness;

pub use tasks::{cantor_unpair, enumerate_tasks, instantiate, size_class, task_at, template_at, template_index, TaskTemplate};
pub use universal::{
    back_and_forth, embed_operator, truncations, BnfSeed, BnfTranscript, EpsSchedule, EpsTerms, Restriction, Truncation,
    UniversalTranscript,
};
pub use witness::{
    g_witness, kernel_witness, space_witness, surjectivity_witness, GWitness, OperatorSquare, Side, WitnessSeed,
};

use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::amalgam::{induced_map, pushout};
use crate::banach::{is_isometric, operator_norm, LinMap, Space, SpaceRef};
use crate::error::{Error, Result};
use crate::exactlin::Rat;
use crate::polytope::DIM_CAP;
use crate::report::{Check, Report};

#[derive(Clone, Debug)]
pub struct ChainStage {
    pub u: SpaceRef,
    pub v: SpaceRef,
    pub f: LinMap,
}

impl ChainStage {
    pub fn zero() -> Self {
        let z = Arc::new(Space::zero());
        ChainStage {
            u: z.clone(),
            v: z.clone(),
            f: LinMap::zero(z.clone(), z),
        }
    }
}

/// `⟨T, (i, j), k⟩`: an operator `T: X → Y` extending `F_k` along `i: U_k → X`
/// and `j: V_k → Y`.
#[derive(Clone, Debug)]
pub struct Task {
    pub t: LinMap,
    pub i: LinMap,
    pub j: LinMap,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskSource {
    Stream { position: usize },
    Demand(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "reason")]
pub enum StepVerdict {
    Realized,
    StarFailed(String),
    CapExceeded(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub stage: usize,
    pub source: TaskSource,
    pub k: usize,
    pub x_dim: usize,
    pub y_dim: usize,
    pub verdict: StepVerdict,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub stages: Vec<ChainStage>,
    pub log: Vec<LogEntry>,
    pub dim_cap: usize,
    pub seed: u64,
}

/// The outcome of realizing one task: the new stage and the embeddings
/// `i′: X → U_n`, `j′: Y → V_n` with `F_n∘i′ = j′∘T`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub stage: ChainStage,
    pub i_prime: LinMap,
    pub j_prime: LinMap,
    pub report: Report,
}

impl Chain {
    pub fn zero(dim_cap: usize, seed: u64) -> Self {
        Chain {
            stages: vec![ChainStage::zero()],
            log: Vec::new(),
            dim_cap,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn last(&self) -> &ChainStage {
        self.stages.last().expect("chains start with stage 0")
    }

    pub fn last_index(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn incl_u(&self, from: usize, to: usize) -> Result<LinMap> {
        LinMap::leading_inclusion(self.stages[from].u.clone(), self.stages[to].u.clone())
    }

    pub fn incl_v(&self, from: usize, to: usize) -> Result<LinMap> {
        LinMap::leading_inclusion(self.stages[from].v.clone(), self.stages[to].v.clone())
    }

    /// Number of stream tasks that passed condition (*).
    pub fn realized_count(&self) -> usize {
        self.log.iter().filter(|e| e.verdict == StepVerdict::Realized).count()
    }
}

/// Condition (*): `k < n`, the task starts at `U_k`, `V_k`, and
/// `T∘i = j∘F_k`. Returns the reason it fails, if it does.
pub fn star_condition(chain: &Chain, task: &Task) -> Option<String> {
    let n = chain.len();
    if task.k >= n {
        return Some(format!("k = {} is not below n = {n}", task.k));
    }
    let st = &chain.stages[task.k];
    if **task.i.domain() != *st.u || **task.j.domain() != *st.v {
        return Some(format!("embedding domains are not U_{0}, V_{0}", task.k));
    }
    let (Ok(lhs), Ok(rhs)) = (task.t.compose(&task.i), task.j.compose(&st.f)) else {
        return Some("task maps do not compose".into());
    };
    if lhs.matrix() != rhs.matrix() {
        return Some(format!("T∘i ≠ j∘F_{}", task.k));
    }
    if !matches!(is_isometric(&task.i), Ok(true)) || !matches!(is_isometric(&task.j), Ok(true)) {
        return Some("task embeddings are not isometric".into());
    }
    None
}

/// Realizes a task satisfying (*) on top of the last stage by two pushouts,
/// within the dimension cap.
pub fn realize(chain: &Chain, task: &Task, cap: usize) -> Result<Realization> {
    let last = chain.last_index();
    let k = task.k;
    let prev = chain.last();
    let nu = prev.u.dim() + task.i.codomain().dim() - task.i.domain().dim();
    let nv = prev.v.dim() + task.j.codomain().dim() - task.j.domain().dim();
    if nu.max(nv) > cap {
        return Err(Error::CapExceeded {
            cap,
            needed: nu.max(nv),
            what: "stage dimension".into(),
        });
    }
    let iu = chain.incl_u(k, last)?;
    let iv = chain.incl_v(k, last)?;
    let pu = pushout(&iu, &task.i)?;
    let pv = pushout(&iv, &task.j)?;
    let f = induced_map(&pu, &pv, &prev.f, &task.t)?;
    let stage = ChainStage {
        u: pu.w.clone(),
        v: pv.w.clone(),
        f,
    };

    let mut r = Report::new();
    let gu = LinMap::leading_inclusion(prev.u.clone(), stage.u.clone())?;
    let gv = LinMap::leading_inclusion(prev.v.clone(), stage.v.clone())?;
    r.identity("U_{n−1} ⊆ U_n leading", pu.g.matrix() == gu.matrix());
    r.identity("V_{n−1} ⊆ V_n leading", pv.g.matrix() == gv.matrix());
    r.identity(
        "F_n∘incl = incl∘F_{n−1}",
        stage.f.compose(&gu)?.matrix() == gv.compose(&prev.f)?.matrix(),
    );
    r.identity(
        "j′∘T = F_n∘i′",
        pv.j.compose(&task.t)?.matrix() == stage.f.compose(&pu.j)?.matrix(),
    );
    let uk_n = LinMap::leading_inclusion(chain.stages[k].u.clone(), stage.u.clone())?;
    let vk_n = LinMap::leading_inclusion(chain.stages[k].v.clone(), stage.v.clone())?;
    r.identity("i′∘i = incl U_k → U_n", pu.j.compose(&task.i)?.matrix() == uk_n.matrix());
    r.identity("j′∘j = incl V_k → V_n", pv.j.compose(&task.j)?.matrix() == vk_n.matrix());
    r.le("‖F_n‖ ≤ 1", &operator_norm(&stage.f), &Rat::one());
    Ok(Realization {
        stage,
        i_prime: pu.j,
        j_prime: pv.j,
        report: r,
    })
}

/// Appends one stage: the realization of `task` when (*) holds and it fits
/// under the cap, a copy of the last stage otherwise.
pub fn step_chain(chain: &Chain, task: &Task, source: TaskSource) -> Result<Chain> {
    let mut out = chain.clone();
    let (stage, verdict, checks) = match star_condition(chain, task) {
        Some(reason) => (chain.last().clone(), StepVerdict::StarFailed(reason), Vec::new()),
        None => match realize(chain, task, chain.dim_cap) {
            Ok(real) => {
                if !real.report.all_pass() {
                    return Err(Error::bound("condition (c)", "all checks pass", "failure"));
                }
                (real.stage, StepVerdict::Realized, real.report.checks)
            }
            Err(Error::CapExceeded { cap, needed, .. }) => (
                chain.last().clone(),
                StepVerdict::CapExceeded(format!("needs dimension {needed} > {cap}")),
                Vec::new(),
            ),
            Err(e) => return Err(e),
        },
    };
    out.log.push(LogEntry {
        stage: chain.len(),
        source,
        k: task.k,
        x_dim: task.t.domain().dim(),
        y_dim: task.t.codomain().dim(),
        verdict,
        checks,
    });
    out.stages.push(stage);
    Ok(out)
}

/// Realizes a task immediately, outside the stream, up to the hard dimension
/// cap of the polytope layer. Fails when (*) does not hold.
pub fn realize_on_demand(chain: &Chain, task: &Task, why: &str) -> Result<(Chain, Realization)> {
    if let Some(reason) = star_condition(chain, task) {
        return Err(Error::bound("condition (*)", "holds", reason));
    }
    let real = realize(chain, task, DIM_CAP)?;
    if !real.report.all_pass() {
        return Err(Error::bound("condition (c)", "all checks pass", "failure"));
    }
    let mut out = chain.clone();
    out.log.push(LogEntry {
        stage: chain.len(),
        source: TaskSource::Demand(why.into()),
        k: task.k,
        x_dim: task.t.domain().dim(),
        y_dim: task.t.codomain().dim(),
        verdict: StepVerdict::Realized,
        checks: real.report.checks.clone(),
    });
    out.stages.push(real.stage.clone());
    Ok((out, real))
}

/// Folds `step_chain` over the task stream: stage `n` processes stream
/// position `n − 1`.
pub fn build_chain(stages: usize, dim_cap: usize, seed: u64) -> Result<Chain> {
    let mut chain = Chain::zero(dim_cap, seed);
    for p in 0..stages {
        let (_, task) = task_at(&chain, p);
        chain = step_chain(&chain, &task, TaskSource::Stream { position: p })?;
    }
    Ok(chain)
}

/// Re-verifies conditions (a) and (b) at every stage and collects the logged
/// (c) checks.
pub fn verify_chain(chain: &Chain) -> Result<Report> {
    let mut r = Report::new();
    let s0 = &chain.stages[0];
    r.identity("U₀ = 0, V₀ = 0", s0.u.dim() == 0 && s0.v.dim() == 0);
    for n in 1..chain.len() {
        let (a, b) = (&chain.stages[n - 1], &chain.stages[n]);
        r.le(format!("‖F_{n}‖ ≤ 1"), &operator_norm(&b.f), &Rat::one());
        if a.u.dim() > b.u.dim() || a.v.dim() > b.v.dim() {
            r.identity(format!("stage {n} extends stage {}", n - 1), false);
            continue;
        }
        let iu = chain.incl_u(n - 1, n)?;
        let iv = chain.incl_v(n - 1, n)?;
        let iso_u = is_isometric(&iu)?;
        let iso_v = is_isometric(&iv)?;
        r.verdict(format!("U_{} ⊆ U_{n} isometric", n - 1), "isometric", if iso_u { "isometric" } else { "not isometric" }, iso_u);
        r.verdict(format!("V_{} ⊆ V_{n} isometric", n - 1), "isometric", if iso_v { "isometric" } else { "not isometric" }, iso_v);
        r.identity(
            format!("F_{n}∘incl = incl∘F_{}", n - 1),
            b.f.compose(&iu)?.matrix() == iv.compose(&a.f)?.matrix(),
        );
    }
    for e in &chain.log {
        if e.verdict == StepVerdict::Realized {
            for c in &e.checks {
                let mut c = c.clone();
                c.bound = format!("stage {}: {}", e.stage, c.bound);
                r.checks.push(c);
            }
        }
    }
    Ok(r)
}
