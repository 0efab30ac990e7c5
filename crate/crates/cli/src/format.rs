//! JSON game files.
//!
//! Rationals are written as canonical strings (`"3"`, `"-1/2"`); anything
//! else is rejected. Annotated location ids are written as the compact JSON
//! text of `{"base": ..., "f": {...}}` or `{"base": ..., "g": {...}}`.

use std::collections::{BTreeMap, BTreeSet};

use hygame_core::rational::{self, parse_canonical, Rational};
use hygame_core::{
    Annotation, Edge, EdgeId, Flavor, Game, Guard, Interval, Location, LocationId, Owner, Reset,
};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        path: path.to_string(),
        message: message.into(),
    }
}

pub(crate) fn parse_json(text: &str) -> Result<Value, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub(crate) fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>, ParseError> {
    let m = v.as_object().ok_or_else(|| field(path, "expected an object"))?;
    for k in m.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(field(&format!("{path}.{k}"), "unknown field"));
        }
    }
    Ok(m)
}

pub(crate) fn required<'a>(m: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, ParseError> {
    m.get(key).ok_or_else(|| field(&format!("{path}.{key}"), "missing field"))
}

pub(crate) fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str, ParseError> {
    v.as_str().ok_or_else(|| field(path, "expected a string"))
}

pub(crate) fn rational_at(v: &Value, path: &str) -> Result<Rational, ParseError> {
    parse_canonical(string(v, path)?).map_err(|e| field(path, e.to_string()))
}

fn strings(v: &Value, path: &str) -> Result<Vec<String>, ParseError> {
    let a = v.as_array().ok_or_else(|| field(path, "expected an array"))?;
    a.iter()
        .enumerate()
        .map(|(i, s)| string(s, &format!("{path}[{i}]")).map(str::to_string))
        .collect()
}

fn var_index(vars: &[String], name: &str, path: &str) -> Result<usize, ParseError> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| field(path, format!("undeclared variable {name:?}")))
}

/// JSON value of a location id: a plain string, or an object for annotated
/// ids.
pub fn location_value(id: &LocationId, vars: &[String]) -> Value {
    match id {
        LocationId::Base(name) => Value::String(name.clone()),
        LocationId::Annotated(inner, a) => {
            let base = location_value(inner, vars);
            match a {
                Annotation::Frozen(f) => {
                    let m: Map<String, Value> = vars
                        .iter()
                        .zip(f)
                        .map(|(x, v)| {
                            let v = v.as_ref().map_or(Value::Null, |q| Value::String(rational::format(q)));
                            (x.clone(), v)
                        })
                        .collect();
                    json!({"base": base, "f": m})
                }
                Annotation::Offset(g) => {
                    let m: Map<String, Value> = vars
                        .iter()
                        .zip(g)
                        .map(|(x, v)| (x.clone(), Value::String(rational::format(v))))
                        .collect();
                    json!({"base": base, "g": m})
                }
            }
        }
    }
}

/// Text form of a location id as used for keys and references.
pub fn location_text(id: &LocationId, vars: &[String]) -> String {
    match location_value(id, vars) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

fn location_from_value(v: &Value, vars: &[String], path: &str) -> Result<LocationId, ParseError> {
    match v {
        Value::String(s) if s.starts_with('{') => {
            let inner = parse_json(s).map_err(|e| field(path, e.to_string()))?;
            location_from_value(&inner, vars, path)
        }
        Value::String(s) if s.is_empty() => Err(field(path, "empty location id")),
        Value::String(s) => Ok(LocationId::base(s.as_str())),
        Value::Object(m) => {
            let base = m.get("base").ok_or_else(|| field(path, "annotated id without base"))?;
            let base = location_from_value(base, vars, &format!("{path}.base"))?;
            match (m.get("f"), m.get("g"), m.len()) {
                (Some(f), None, 2) => {
                    let fm = f.as_object().ok_or_else(|| field(&format!("{path}.f"), "expected an object"))?;
                    let mut out = vec![None; vars.len()];
                    for (k, val) in fm {
                        let p = format!("{path}.f.{k}");
                        let x = var_index(vars, k, &p)?;
                        out[x] = match val {
                            Value::Null => None,
                            v => Some(rational_at(v, &p)?),
                        };
                    }
                    if fm.len() != vars.len() {
                        return Err(field(&format!("{path}.f"), "annotation must list every variable"));
                    }
                    Ok(LocationId::annotated(base, Annotation::Frozen(out)))
                }
                (None, Some(g), 2) => {
                    let gm = g.as_object().ok_or_else(|| field(&format!("{path}.g"), "expected an object"))?;
                    let mut out = vec![Rational::from_integer(0.into()); vars.len()];
                    for (k, val) in gm {
                        let p = format!("{path}.g.{k}");
                        out[var_index(vars, k, &p)?] = rational_at(val, &p)?;
                    }
                    if gm.len() != vars.len() {
                        return Err(field(&format!("{path}.g"), "annotation must list every variable"));
                    }
                    Ok(LocationId::annotated(base, Annotation::Offset(out)))
                }
                _ => Err(field(path, "annotated id needs base and exactly one of f, g")),
            }
        }
        _ => Err(field(path, "expected a location id")),
    }
}

pub fn parse_location(text: &str, vars: &[String], path: &str) -> Result<LocationId, ParseError> {
    location_from_value(&Value::String(text.to_string()), vars, path)
}

fn owner_value(o: Owner) -> Value {
    match o {
        Owner::Pl1 => json!(1),
        Owner::Pl2 => json!(2),
    }
}

/// The document of `g` as a JSON value with sorted keys.
pub fn game_value(g: &Game) -> Value {
    let vars = &g.vars;
    let q = |r: &Rational| Value::String(rational::format(r));
    let locations: Map<String, Value> = g
        .locations
        .values()
        .map(|l| {
            let flow: Map<String, Value> = vars.iter().cloned().zip(l.flow.iter().map(q)).collect();
            (
                location_text(&l.id, vars),
                json!({"owner": owner_value(l.owner), "obs": l.obs, "flow": flow}),
            )
        })
        .collect();
    let edges: Vec<Value> = g
        .edges
        .values()
        .map(|e| {
            let guard: Map<String, Value> = e
                .guard
                .conjuncts
                .iter()
                .map(|(&x, i)| (vars[x].clone(), json!([q(&i.lo), q(&i.hi)])))
                .collect();
            let reset: Map<String, Value> = e
                .reset
                .assignments
                .iter()
                .map(|(&x, v)| (vars[x].clone(), q(v)))
                .collect();
            let mut m = Map::new();
            m.insert("id".into(), json!(e.id.0));
            m.insert("src".into(), json!(location_text(&e.src, vars)));
            m.insert("action".into(), json!(e.action));
            m.insert("guard".into(), Value::Object(guard));
            m.insert("reset".into(), Value::Object(reset));
            m.insert("dst".into(), json!(location_text(&e.dst, vars)));
            if let Some(p) = &e.provenance {
                m.insert("provenance".into(), json!(p.0));
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "flavor": g.flavor.name(),
        "vars": vars,
        "actions": g.actions,
        "obs": g.observations,
        "init": location_text(&g.init, vars),
        "locations": locations,
        "edges": edges,
    })
}

/// Deterministic text of `g`: sorted keys, two-space indentation and a
/// trailing newline.
pub fn emit_game(g: &Game) -> String {
    let mut s = serde_json::to_string_pretty(&game_value(g)).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_game(text: &str) -> Result<Game, ParseError> {
    game_from_value(&parse_json(text)?)
}

pub fn game_from_value(v: &Value) -> Result<Game, ParseError> {
    let root = object(v, "$", &["flavor", "vars", "actions", "obs", "init", "locations", "edges"])?;
    let flavor_name = string(required(root, "$", "flavor")?, "$.flavor")?;
    let flavor = Flavor::from_name(flavor_name)
        .ok_or_else(|| field("$.flavor", format!("unknown flavor {flavor_name:?}")))?;
    let vars = strings(required(root, "$", "vars")?, "$.vars")?;
    let distinct: BTreeSet<&String> = vars.iter().collect();
    if distinct.len() != vars.len() {
        return Err(field("$.vars", "duplicate variable"));
    }
    let actions: BTreeSet<String> = strings(required(root, "$", "actions")?, "$.actions")?.into_iter().collect();
    let observations: BTreeSet<String> = strings(required(root, "$", "obs")?, "$.obs")?.into_iter().collect();
    let init = parse_location(string(required(root, "$", "init")?, "$.init")?, &vars, "$.init")?;

    let mut locations = BTreeMap::new();
    let locs = required(root, "$", "locations")?
        .as_object()
        .ok_or_else(|| field("$.locations", "expected an object"))?;
    for (key, lv) in locs {
        let path = format!("$.locations[{key:?}]");
        let id = parse_location(key, &vars, &path)?;
        let m = object(lv, &path, &["owner", "obs", "flow"])?;
        let owner = match required(m, &path, "owner")?.as_u64() {
            Some(1) => Owner::Pl1,
            Some(2) => Owner::Pl2,
            _ => return Err(field(&format!("{path}.owner"), "expected 1 or 2")),
        };
        let obs = string(required(m, &path, "obs")?, &format!("{path}.obs"))?.to_string();
        let fp = format!("{path}.flow");
        let fm = required(m, &path, "flow")?
            .as_object()
            .ok_or_else(|| field(&fp, "expected an object"))?;
        let mut flow: Vec<Option<Rational>> = vec![None; vars.len()];
        for (k, r) in fm {
            let p = format!("{fp}.{k}");
            flow[var_index(&vars, k, &p)?] = Some(rational_at(r, &p)?);
        }
        let flow = flow
            .into_iter()
            .enumerate()
            .map(|(x, r)| r.ok_or_else(|| field(&fp, format!("no slope for variable {:?}", vars[x]))))
            .collect::<Result<Vec<_>, _>>()?;
        if locations
            .insert(id.clone(), Location { id, owner, obs, flow })
            .is_some()
        {
            return Err(field(&path, "duplicate location"));
        }
    }

    let mut edges = BTreeMap::new();
    let es = required(root, "$", "edges")?
        .as_array()
        .ok_or_else(|| field("$.edges", "expected an array"))?;
    for (i, ev) in es.iter().enumerate() {
        let path = format!("$.edges[{i}]");
        let m = object(ev, &path, &["id", "src", "action", "guard", "reset", "dst", "provenance"])?;
        let text = |k: &str| -> Result<&str, ParseError> { string(required(m, &path, k)?, &format!("{path}.{k}")) };
        let id = EdgeId::new(text("id")?);
        let src = parse_location(text("src")?, &vars, &format!("{path}.src"))?;
        let dst = parse_location(text("dst")?, &vars, &format!("{path}.dst"))?;
        let action = text("action")?.to_string();
        let gp = format!("{path}.guard");
        let gm = required(m, &path, "guard")?
            .as_object()
            .ok_or_else(|| field(&gp, "expected an object"))?;
        let mut guard = Guard::new();
        for (k, iv) in gm {
            let p = format!("{gp}.{k}");
            let x = var_index(&vars, k, &p)?;
            let pair = iv.as_array().filter(|a| a.len() == 2).ok_or_else(|| field(&p, "expected [lo, hi]"))?;
            let lo = rational_at(&pair[0], &format!("{p}[0]"))?;
            let hi = rational_at(&pair[1], &format!("{p}[1]"))?;
            guard = guard.with(x, Interval::new(lo, hi));
        }
        let rp = format!("{path}.reset");
        let rm = required(m, &path, "reset")?
            .as_object()
            .ok_or_else(|| field(&rp, "expected an object"))?;
        let mut reset = Reset::new();
        for (k, v) in rm {
            let p = format!("{rp}.{k}");
            let x = var_index(&vars, k, &p)?;
            if !v.is_null() {
                reset = reset.with(x, rational_at(v, &p)?);
            }
        }
        let provenance = match m.get("provenance") {
            Some(p) => Some(EdgeId::new(string(p, &format!("{path}.provenance"))?)),
            None => None,
        };
        let edge = Edge {
            id: id.clone(),
            src,
            action,
            guard,
            reset,
            dst,
            provenance,
        };
        if edges.insert(id, edge).is_some() {
            return Err(field(&format!("{path}.id"), "duplicate edge id"));
        }
    }

    Ok(Game {
        flavor,
        vars,
        actions,
        observations,
        locations,
        edges,
        init,
    })
}
