//! JSON documents for maps, Markov decision processes and max-plus
//! matrices.
//!
//! The arithmetic mode comes from the optional `"mode"` field, or else
//! from the scalars themselves: strings are exact, numbers are floats. A
//! document mixing the two is rejected.

use cmh_core::maxplus::{Entry, MaxPlusMatrix};
use cmh_core::mdp::{Action, MdpModel};
use cmh_core::model::{Coordinate, Generator, MapModel};
use cmh_core::scalar::{parse_rational, Mode, Rational, Scalar};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::scalar_json::{vec_json, JsonScalar};

#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Exact(MapModel<Rational>),
    Float(MapModel<f64>),
}

impl AnyModel {
    pub fn mode(&self) -> Mode {
        match self {
            AnyModel::Exact(_) => Mode::Exact,
            AnyModel::Float(_) => Mode::Float,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyModel::Exact(m) => m.dim(),
            AnyModel::Float(m) => m.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyMdp {
    Exact(MdpModel<Rational>),
    Float(MdpModel<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Exact(Vec<Vec<Rational>>),
    Float(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyMaxPlus {
    Exact(MaxPlusMatrix<Rational>),
    Float(MaxPlusMatrix<f64>),
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

pub fn parse_json(text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Io(format!("malformed JSON: {e}")))
}

/// A scalar as written in the document, before the mode is settled.
#[derive(Debug, Clone)]
enum Raw {
    Text(String),
    Number(f64),
    NegInf,
}

fn raw(v: &Value, at: &str, allow_neg_inf: bool) -> CliResult<Raw> {
    match v {
        Value::String(s) if allow_neg_inf && s.trim() == "-inf" => Ok(Raw::NegInf),
        Value::String(s) => Ok(Raw::Text(s.clone())),
        Value::Number(n) => n
            .as_f64()
            .map(Raw::Number)
            .ok_or_else(|| invalid(format!("{at}: number out of range"))),
        _ => Err(invalid(format!("{at}: expected a scalar"))),
    }
}

fn raw_vec(v: &Value, at: &str, allow_neg_inf: bool) -> CliResult<Vec<Raw>> {
    v.as_array()
        .ok_or_else(|| invalid(format!("{at}: expected an array")))?
        .iter()
        .enumerate()
        .map(|(j, x)| raw(x, &format!("{at}[{}]", j + 1), allow_neg_inf))
        .collect()
}

fn declared_mode(doc: &Value) -> CliResult<Option<Mode>> {
    match doc.get("mode") {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) if s == "exact" => Ok(Some(Mode::Exact)),
        Some(Value::String(s)) if s == "float" => Ok(Some(Mode::Float)),
        Some(other) => Err(invalid(format!("mode: expected \"exact\" or \"float\", found {other}"))),
    }
}

/// Settles the document mode from the declaration and the scalars seen.
fn settle_mode(declared: Option<Mode>, scalars: &[&Raw]) -> CliResult<Mode> {
    let has_text = scalars.iter().any(|r| matches!(r, Raw::Text(_)));
    let has_number = scalars.iter().any(|r| matches!(r, Raw::Number(_)));
    match (declared, has_text, has_number) {
        (_, true, true) => Err(CliError::Invalid(
            cmh_core::Error::ModeMixing("document mixes string and number scalars".into()).to_string(),
        )),
        (Some(Mode::Exact), _, true) => Err(CliError::Invalid(
            cmh_core::Error::ModeMixing("exact document contains a JSON number".into()).to_string(),
        )),
        (Some(Mode::Float), true, _) => Err(CliError::Invalid(
            cmh_core::Error::ModeMixing("float document contains a string scalar".into()).to_string(),
        )),
        (Some(m), _, _) => Ok(m),
        (None, true, _) => Ok(Mode::Exact),
        (None, _, _) => Ok(Mode::Float),
    }
}

fn exact(r: &Raw, at: &str) -> CliResult<Option<Rational>> {
    match r {
        Raw::Text(s) => parse_rational(s)
            .map(Some)
            .ok_or_else(|| invalid(format!("{at}: cannot parse {s:?} as a rational"))),
        Raw::NegInf => Ok(None),
        Raw::Number(_) => unreachable!("mode settled"),
    }
}

fn float(r: &Raw, at: &str) -> CliResult<Option<f64>> {
    match r {
        Raw::Number(x) if x.is_finite() => Ok(Some(*x)),
        Raw::Number(_) => Err(invalid(format!("{at}: non-finite number"))),
        Raw::NegInf => Ok(None),
        Raw::Text(_) => unreachable!("mode settled"),
    }
}

fn finite<S>(v: Option<S>, at: &str) -> CliResult<S> {
    v.ok_or_else(|| invalid(format!("{at}: -inf is not allowed here")))
}

fn convert<S: Scalar>(r: &Raw, at: &str) -> CliResult<Option<S>> {
    match S::MODE {
        Mode::Exact => Ok(exact(r, at)?.map(|q| S::from_rational(&q))),
        Mode::Float => Ok(float(r, at)?.map(|x| S::from_f64(x).expect("float mode"))),
    }
}

fn convert_vec<S: Scalar>(rs: &[Raw], at: &str) -> CliResult<Vec<S>> {
    rs.iter()
        .enumerate()
        .map(|(j, r)| {
            let at = format!("{at}[{}]", j + 1);
            finite(convert(r, &at)?, &at)
        })
        .collect()
}

enum RawCoordinate {
    MaxAffine(Vec<(Vec<Raw>, Raw)>),
    LogSumExp(Vec<Raw>),
}

fn field<'a>(v: &'a Value, key: &str, at: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| invalid(format!("{at}: missing field {key:?}")))
}

/// Reads a map document. `mode` overrides the document's own mode; an
/// exact document may be read as float, not the other way round.
pub fn parse_model(text: &str, mode: Option<Mode>) -> CliResult<AnyModel> {
    let doc = parse_json(text)?;
    let coords = field(&doc, "coordinates", "model")?
        .as_array()
        .ok_or_else(|| invalid("coordinates: expected an array"))?;
    let n = match doc.get("n") {
        Some(v) => v.as_u64().ok_or_else(|| invalid("n: expected a positive integer"))? as usize,
        None => coords.len(),
    };
    if n == 0 {
        return Err(invalid("n: must be positive"));
    }
    if coords.len() != n {
        return Err(invalid(format!("n = {n} but {} coordinates given", coords.len())));
    }
    let mut raws = Vec::with_capacity(n);
    for (i, c) in coords.iter().enumerate() {
        let at = format!("coordinate {}", i + 1);
        let kind = field(c, "kind", &at)?.as_str().unwrap_or_default();
        raws.push(match kind {
            "max_affine" => {
                let gens = field(c, "generators", &at)?
                    .as_array()
                    .ok_or_else(|| invalid(format!("{at}: generators must be an array")))?;
                let list = gens
                    .iter()
                    .enumerate()
                    .map(|(k, g)| {
                        let at = format!("{at}, generator {}", k + 1);
                        Ok((raw_vec(field(g, "p", &at)?, &format!("{at}: p"), false)?, raw(field(g, "r", &at)?, &format!("{at}: r"), false)?))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                RawCoordinate::MaxAffine(list)
            }
            "log_sum_exp" => RawCoordinate::LogSumExp(raw_vec(field(c, "weights", &at)?, &format!("{at}: weights"), false)?),
            other => return Err(invalid(format!("{at}: unknown kind {other:?}"))),
        });
    }
    let scalars: Vec<&Raw> = raws
        .iter()
        .flat_map(|c| -> Vec<&Raw> {
            match c {
                RawCoordinate::MaxAffine(gs) => gs.iter().flat_map(|(p, r)| p.iter().chain([r])).collect(),
                RawCoordinate::LogSumExp(w) => w.iter().collect(),
            }
        })
        .collect();
    let file_mode = settle_mode(declared_mode(&doc)?, &scalars)?;
    match (file_mode, mode.unwrap_or(file_mode)) {
        (Mode::Exact, Mode::Exact) => Ok(AnyModel::Exact(build_model(&raws)?)),
        (Mode::Exact, Mode::Float) => Ok(AnyModel::Float(build_model::<Rational>(&raws)?.to_float())),
        (Mode::Float, Mode::Float) => Ok(AnyModel::Float(build_model(&raws)?)),
        (Mode::Float, Mode::Exact) => Err(invalid("a float document cannot be analysed in exact mode")),
    }
}

fn build_model<S: Scalar>(raws: &[RawCoordinate]) -> CliResult<MapModel<S>> {
    let coords = raws
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let at = format!("coordinate {}", i + 1);
            Ok(match c {
                RawCoordinate::MaxAffine(gs) => Coordinate::MaxAffine(
                    gs.iter()
                        .enumerate()
                        .map(|(k, (p, r))| {
                            let at = format!("{at}, generator {}", k + 1);
                            Ok(Generator::new(convert_vec(p, &format!("{at}: p"))?, finite(convert(r, &at)?, &at)?))
                        })
                        .collect::<CliResult<Vec<_>>>()?,
                ),
                RawCoordinate::LogSumExp(w) => Coordinate::LogSumExp(convert_vec(w, &format!("{at}: weights"))?),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(MapModel::new(coords)?)
}

pub fn coordinate_to_json<S: JsonScalar>(c: &Coordinate<S>) -> Value {
    match c {
        Coordinate::MaxAffine(gs) => json!({
            "kind": "max_affine",
            "generators": gs.iter().map(|g| json!({"p": vec_json(&g.p), "r": g.r.to_json()})).collect::<Vec<_>>(),
        }),
        Coordinate::LogSumExp(w) => json!({"kind": "log_sum_exp", "weights": vec_json(w)}),
    }
}

pub fn model_to_json<S: JsonScalar>(m: &MapModel<S>) -> Value {
    let coordinates: Vec<Value> = m.coordinates().iter().map(coordinate_to_json).collect();
    json!({"n": m.dim(), "mode": S::MODE.to_string(), "coordinates": coordinates})
}

struct RawAction {
    name: String,
    reward: Raw,
    transition: Vec<Raw>,
}

pub fn parse_mdp(text: &str, mode: Option<Mode>) -> CliResult<AnyMdp> {
    let doc = parse_json(text)?;
    let states: Vec<String> = field(&doc, "states", "mdp")?
        .as_array()
        .ok_or_else(|| invalid("states: expected an array"))?
        .iter()
        .map(|s| match s {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(invalid("states: names must be strings")),
        })
        .collect::<CliResult<_>>()?;
    let table: &Map<String, Value> = field(&doc, "actions", "mdp")?
        .as_object()
        .ok_or_else(|| invalid("actions: expected an object keyed by state"))?;
    if let Some(extra) = table.keys().find(|k| !states.contains(k)) {
        return Err(invalid(format!("actions: unknown state {extra:?}")));
    }
    let mut raws: Vec<Vec<RawAction>> = Vec::with_capacity(states.len());
    for s in &states {
        let list = table
            .get(s)
            .ok_or_else(|| invalid(format!("actions: state {s:?} has no entry")))?
            .as_array()
            .ok_or_else(|| invalid(format!("actions[{s:?}]: expected an array")))?;
        raws.push(
            list.iter()
                .enumerate()
                .map(|(k, a)| {
                    let at = format!("state {s:?}, action {}", k + 1);
                    Ok(RawAction {
                        name: a.get("name").and_then(Value::as_str).map_or_else(|| format!("a{}", k + 1), str::to_owned),
                        reward: raw(field(a, "reward", &at)?, &format!("{at}: reward"), false)?,
                        transition: raw_vec(field(a, "transition", &at)?, &format!("{at}: transition"), false)?,
                    })
                })
                .collect::<CliResult<_>>()?,
        );
    }
    let scalars: Vec<&Raw> = raws
        .iter()
        .flatten()
        .flat_map(|a| a.transition.iter().chain([&a.reward]))
        .collect();
    let file_mode = settle_mode(declared_mode(&doc)?, &scalars)?;
    match (file_mode, mode.unwrap_or(file_mode)) {
        (Mode::Exact, Mode::Exact) => Ok(AnyMdp::Exact(build_mdp(states, &raws)?)),
        (Mode::Exact, Mode::Float) => {
            let q = build_mdp::<Rational>(states.clone(), &raws)?;
            let actions = q
                .actions()
                .iter()
                .map(|list| {
                    list.iter()
                        .map(|a| Action {
                            name: a.name.clone(),
                            reward: a.reward.to_f64(),
                            transition: a.transition.iter().map(Scalar::to_f64).collect(),
                        })
                        .collect()
                })
                .collect();
            Ok(AnyMdp::Float(MdpModel::new(states, actions)?))
        }
        (Mode::Float, Mode::Float) => Ok(AnyMdp::Float(build_mdp(states, &raws)?)),
        (Mode::Float, Mode::Exact) => Err(invalid("a float document cannot be analysed in exact mode")),
    }
}

fn build_mdp<S: Scalar>(states: Vec<String>, raws: &[Vec<RawAction>]) -> CliResult<MdpModel<S>> {
    let actions = raws
        .iter()
        .enumerate()
        .map(|(i, list)| {
            list.iter()
                .enumerate()
                .map(|(k, a)| {
                    let at = format!("state {}, action {}", i + 1, k + 1);
                    Ok(Action {
                        name: a.name.clone(),
                        reward: finite(convert(&a.reward, &at)?, &at)?,
                        transition: convert_vec(&a.transition, &at)?,
                    })
                })
                .collect::<CliResult<Vec<_>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(MdpModel::new(states, actions)?)
}

pub fn parse_maxplus(text: &str, mode: Option<Mode>) -> CliResult<AnyMaxPlus> {
    let doc = parse_json(text)?;
    let rows = field(&doc, "entries", "max-plus matrix")?
        .as_array()
        .ok_or_else(|| invalid("entries: expected an array of rows"))?;
    let raws: Vec<Vec<Raw>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| raw_vec(r, &format!("entries row {}", i + 1), true))
        .collect::<CliResult<_>>()?;
    let scalars: Vec<&Raw> = raws.iter().flatten().collect();
    let file_mode = settle_mode(declared_mode(&doc)?, &scalars)?;
    match (file_mode, mode.unwrap_or(file_mode)) {
        (Mode::Exact, Mode::Exact) => Ok(AnyMaxPlus::Exact(build_maxplus(&raws)?)),
        (Mode::Exact, Mode::Float) => {
            let q = build_maxplus::<Rational>(&raws)?;
            let entries = q
                .entries()
                .iter()
                .map(|row| row.iter().map(|x| x.as_ref().map(Scalar::to_f64)).collect())
                .collect();
            Ok(AnyMaxPlus::Float(MaxPlusMatrix::new(entries)?))
        }
        (Mode::Float, Mode::Float) => Ok(AnyMaxPlus::Float(build_maxplus(&raws)?)),
        (Mode::Float, Mode::Exact) => Err(invalid("a float document cannot be analysed in exact mode")),
    }
}

fn build_maxplus<S: Scalar>(raws: &[Vec<Raw>]) -> CliResult<MaxPlusMatrix<S>> {
    let entries: Vec<Vec<Entry<S>>> = raws
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, r)| convert(r, &format!("entry ({}, {})", i + 1, j + 1)))
                .collect::<CliResult<Vec<_>>>()
        })
        .collect::<CliResult<_>>()?;
    Ok(MaxPlusMatrix::new(entries)?)
}

/// A stochastic matrix document: `{"matrix": [[scalar, ...], ...]}`.
pub fn parse_matrix(text: &str, mode: Option<Mode>) -> CliResult<AnyMatrix> {
    let doc = parse_json(text)?;
    let rows = field(&doc, "matrix", "matrix document")?
        .as_array()
        .ok_or_else(|| invalid("matrix: expected an array of rows"))?;
    let raws: Vec<Vec<Raw>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| raw_vec(r, &format!("matrix row {}", i + 1), false))
        .collect::<CliResult<_>>()?;
    let scalars: Vec<&Raw> = raws.iter().flatten().collect();
    let file_mode = settle_mode(declared_mode(&doc)?, &scalars)?;
    let build = |raws: &[Vec<Raw>]| -> CliResult<Vec<Vec<Rational>>> {
        raws.iter()
            .enumerate()
            .map(|(i, r)| convert_vec::<Rational>(r, &format!("matrix row {}", i + 1)))
            .collect()
    };
    let out = match (file_mode, mode.unwrap_or(file_mode)) {
        (Mode::Exact, Mode::Exact) => AnyMatrix::Exact(build(&raws)?),
        (Mode::Exact, Mode::Float) => AnyMatrix::Float(
            build(&raws)?
                .iter()
                .map(|row| row.iter().map(Scalar::to_f64).collect())
                .collect(),
        ),
        (Mode::Float, Mode::Float) => AnyMatrix::Float(
            raws.iter()
                .enumerate()
                .map(|(i, r)| convert_vec::<f64>(r, &format!("matrix row {}", i + 1)))
                .collect::<CliResult<_>>()?,
        ),
        (Mode::Float, Mode::Exact) => return Err(invalid("a float document cannot be analysed in exact mode")),
    };
    match &out {
        AnyMatrix::Exact(p) => cmh_core::markov::check_stochastic(p)?,
        AnyMatrix::Float(p) => cmh_core::markov::check_stochastic(p)?,
    }
    Ok(out)
}
