//! JSON exchange formats. Rationals are strings `"p/q"` (`"p"` when `q = 1`),
//! objects are written with sorted keys, and balls are always written with
//! both representations in canonical order, so `save ∘ load` is the identity
//! on files produced by `save`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::banach::{LinMap, Space, SpaceRef};
use crate::error::{Error, Result};
use crate::exactlin::{fmt_rat, parse_rat, QMat, QVec, Rat};
use crate::fraisse::{Chain, ChainStage, LogEntry};
use crate::polytope::Ball;

fn perr(at: &str, msg: impl Into<String>) -> Error {
    Error::Parse {
        at: at.to_string(),
        msg: msg.into(),
    }
}

pub fn rat_json(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

pub fn vec_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

pub fn rows_json(rows: &[QVec]) -> Value {
    Value::Array(rows.iter().map(|r| vec_json(r)).collect())
}

pub fn mat_json(m: &QMat) -> Value {
    rows_json(&m.row_vecs())
}

pub fn parse_rat_at(v: &Value, at: &str) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s).map_err(|e| match e {
            Error::Parse { msg, .. } => perr(at, msg),
            e => e,
        }),
        Value::Number(n) if n.is_i64() => Ok(Rat::from_integer(n.as_i64().expect("checked").into())),
        _ => Err(perr(at, "expected a rational string \"p/q\"")),
    }
}

pub fn parse_vec_at(v: &Value, at: &str) -> Result<QVec> {
    let arr = v.as_array().ok_or_else(|| perr(at, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(k, x)| parse_rat_at(x, &format!("{at}[{k}]")))
        .collect()
}

fn parse_rows_at(v: &Value, at: &str, dim: Option<usize>, what: &'static str) -> Result<Vec<QVec>> {
    let arr = v.as_array().ok_or_else(|| perr(at, "expected an array of vectors"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (k, row) in arr.iter().enumerate() {
        let r = parse_vec_at(row, &format!("{at}[{k}]"))?;
        if let Some(d) = dim {
            if r.len() != d {
                return Err(Error::dim(what, d, r.len()));
            }
        }
        out.push(r);
    }
    Ok(out)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(at, format!("missing field \"{key}\"")))
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| perr(at, "expected an object"))
}

fn usize_at(v: &Value, at: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| perr(at, "expected a nonnegative integer"))
}

pub fn ball_json(b: &Ball) -> Value {
    let mut m = Map::new();
    m.insert("dim".into(), json!(b.dim()));
    if let Some(v) = b.vrep() {
        m.insert("vrep".into(), rows_json(v));
    }
    if let Some(h) = b.hrep() {
        m.insert("hrep".into(), rows_json(h));
    }
    Value::Object(m)
}

pub fn parse_ball_at(v: &Value, at: &str) -> Result<Ball> {
    let o = object(v, at)?;
    let dim = usize_at(field(o, "dim", at)?, &format!("{at}.dim"))?;
    let vrep = match o.get("vrep") {
        Some(x) => Some(parse_rows_at(x, &format!("{at}.vrep"), Some(dim), "ball vrep entry")?),
        None => None,
    };
    let hrep = match o.get("hrep") {
        Some(x) => Some(parse_rows_at(x, &format!("{at}.hrep"), Some(dim), "ball hrep entry")?),
        None => None,
    };
    if vrep.is_none() && hrep.is_none() && dim > 0 {
        return Err(perr(at, "a ball needs \"vrep\" or \"hrep\""));
    }
    if dim == 0 {
        return Ok(Ball::zero_space());
    }
    Ball::from_parts(dim, vrep, hrep)
}

pub fn space_json(s: &Space) -> Value {
    json!({ "dim": s.dim(), "ball": ball_json(s.ball()) })
}

pub fn parse_space_at(v: &Value, at: &str) -> Result<Space> {
    let o = object(v, at)?;
    let dim = usize_at(field(o, "dim", at)?, &format!("{at}.dim"))?;
    let ball = parse_ball_at(field(o, "ball", at)?, &format!("{at}.ball"))?;
    if ball.dim() != dim {
        return Err(Error::dim("space ball", dim, ball.dim()));
    }
    Space::new(ball)
}

/// Named spaces and maps. Maps may refer to spaces by name.
#[derive(Clone, Debug, Default)]
pub struct Document {
    pub spaces: BTreeMap<String, SpaceRef>,
    pub maps: BTreeMap<String, LinMap>,
    pub params: BTreeMap<String, Value>,
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn space(&self, name: &str) -> Result<&SpaceRef> {
        self.spaces.get(name).ok_or_else(|| Error::UnknownReference(name.into()))
    }

    pub fn map(&self, name: &str) -> Result<&LinMap> {
        self.maps.get(name).ok_or_else(|| Error::UnknownReference(name.into()))
    }

    pub fn add_space(&mut self, name: &str, s: SpaceRef) {
        self.spaces.insert(name.into(), s);
    }

    pub fn add_map(&mut self, name: &str, m: LinMap) {
        self.maps.insert(name.into(), m);
    }

    fn space_ref_json(&self, s: &SpaceRef) -> Value {
        let by_ptr = self.spaces.iter().find(|(_, t)| Arc::ptr_eq(s, t));
        match by_ptr.or_else(|| self.spaces.iter().find(|(_, t)| s == *t)) {
            Some((name, _)) => Value::String(name.clone()),
            None => space_json(s),
        }
    }

    pub fn to_json(&self) -> Value {
        let spaces: Map<String, Value> = self.spaces.iter().map(|(k, s)| (k.clone(), space_json(s))).collect();
        let maps: Map<String, Value> = self
            .maps
            .iter()
            .map(|(k, m)| {
                (
                    k.clone(),
                    json!({
                        "matrix": mat_json(m.matrix()),
                        "domain": self.space_ref_json(m.domain()),
                        "codomain": self.space_ref_json(m.codomain()),
                    }),
                )
            })
            .collect();
        let mut out = Map::new();
        out.insert("spaces".into(), Value::Object(spaces));
        out.insert("maps".into(), Value::Object(maps));
        if !self.params.is_empty() {
            out.insert("params".into(), Value::Object(self.params.clone().into_iter().collect()));
        }
        Value::Object(out)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let o = object(v, "$")?;
        let mut doc = Document::new();
        if let Some(sp) = o.get("spaces") {
            for (name, s) in object(sp, "$.spaces")? {
                let space = parse_space_at(s, &format!("$.spaces.{name}"))?;
                doc.spaces.insert(name.clone(), Arc::new(space));
            }
        }
        if let Some(mp) = o.get("maps") {
            for (name, m) in object(mp, "$.maps")? {
                let at = format!("$.maps.{name}");
                let mo = object(m, &at)?;
                let domain = doc.resolve(field(mo, "domain", &at)?, &format!("{at}.domain"))?;
                let codomain = doc.resolve(field(mo, "codomain", &at)?, &format!("{at}.codomain"))?;
                let rows = parse_rows_at(field(mo, "matrix", &at)?, &format!("{at}.matrix"), Some(domain.dim()), "map matrix row")?;
                if rows.len() != codomain.dim() {
                    return Err(Error::dim("map matrix rows", codomain.dim(), rows.len()));
                }
                let mat = QMat::from_rows(rows, domain.dim())?;
                doc.maps.insert(name.clone(), LinMap::new(mat, domain, codomain)?);
            }
        }
        if let Some(p) = o.get("params") {
            for (k, v) in object(p, "$.params")? {
                doc.params.insert(k.clone(), v.clone());
            }
        }
        Ok(doc)
    }

    fn resolve(&self, v: &Value, at: &str) -> Result<SpaceRef> {
        match v {
            Value::String(name) => self.space(name).cloned(),
            _ => Ok(Arc::new(parse_space_at(v, at)?)),
        }
    }

    pub fn param_rat(&self, key: &str) -> Result<Option<Rat>> {
        self.params.get(key).map(|v| parse_rat_at(v, &format!("$.params.{key}"))).transpose()
    }

    pub fn param_usize(&self, key: &str) -> Result<Option<usize>> {
        self.params.get(key).map(|v| usize_at(v, &format!("$.params.{key}"))).transpose()
    }

    pub fn param_vec(&self, key: &str) -> Result<Option<QVec>> {
        self.params.get(key).map(|v| parse_vec_at(v, &format!("$.params.{key}"))).transpose()
    }
}

pub fn chain_json(chain: &Chain) -> Value {
    let mut by_stage: BTreeMap<usize, &LogEntry> = BTreeMap::new();
    for e in &chain.log {
        by_stage.insert(e.stage, e);
    }
    let stages: Vec<Value> = chain
        .stages
        .iter()
        .enumerate()
        .map(|(n, st)| {
            json!({
                "index": n,
                "U": space_json(&st.u),
                "V": space_json(&st.v),
                "F": mat_json(st.f.matrix()),
                "log": by_stage.get(&n).map(|e| serde_json::to_value(e).expect("plain data")).unwrap_or(Value::Null),
            })
        })
        .collect();
    json!({ "dim_cap": chain.dim_cap, "seed": chain.seed, "stages": stages })
}

/// Reads a chain file. Consecutive equal spaces share one allocation.
pub fn parse_chain(v: &Value) -> Result<Chain> {
    let o = object(v, "$")?;
    let dim_cap = usize_at(field(o, "dim_cap", "$")?, "$.dim_cap")?;
    let seed = field(o, "seed", "$")?.as_u64().ok_or_else(|| perr("$.seed", "expected an integer"))?;
    let arr = field(o, "stages", "$")?.as_array().ok_or_else(|| perr("$.stages", "expected an array"))?;
    let mut stages: Vec<ChainStage> = Vec::with_capacity(arr.len());
    let mut log = Vec::new();
    for (n, s) in arr.iter().enumerate() {
        let at = format!("$.stages[{n}]");
        let so = object(s, &at)?;
        let mut u = Arc::new(parse_space_at(field(so, "U", &at)?, &format!("{at}.U"))?);
        let mut v = Arc::new(parse_space_at(field(so, "V", &at)?, &format!("{at}.V"))?);
        if let Some(prev) = stages.last() {
            if prev.u == u {
                u = prev.u.clone();
            }
            if prev.v == v {
                v = prev.v.clone();
            }
        }
        let rows = parse_rows_at(field(so, "F", &at)?, &format!("{at}.F"), Some(u.dim()), "stage map row")?;
        if rows.len() != v.dim() {
            return Err(Error::dim("stage map rows", v.dim(), rows.len()));
        }
        let f = LinMap::new(QMat::from_rows(rows, u.dim())?, u.clone(), v.clone())?;
        if let Some(e) = so.get("log").filter(|e| !e.is_null()) {
            let entry: LogEntry =
                serde_json::from_value(e.clone()).map_err(|err| perr(&format!("{at}.log"), err.to_string()))?;
            log.push(entry);
        }
        stages.push(ChainStage { u, v, f });
    }
    if stages.is_empty() {
        return Err(perr("$.stages", "a chain has at least stage 0"));
    }
    Ok(Chain {
        stages,
        log,
        dim_cap,
        seed,
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        at: format!("{}:{}:{}", path.display(), e.line(), e.column()),
        msg: e.to_string(),
    })
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(path, to_canonical_string(v)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_document(path: &Path) -> Result<Document> {
    Document::from_json(&read_json(path)?)
}

pub fn save_document(path: &Path, doc: &Document) -> Result<()> {
    write_json(path, &doc.to_json())
}
