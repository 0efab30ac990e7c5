//! Strategy files: positional region strategies of timed games, and
//! history tables of pulled-back strategies.

use std::collections::BTreeMap;

use hygame_core::rational::{self, Rational};
use hygame_core::solver::{concretize_delay, max_constants, Region, Synthesis};
use hygame_core::{Game, History, Move, Objective, Strategy};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::format::{emit_game, location_text, object, parse_json, parse_location, rational_at, required, string, ParseError};

/// Hex SHA-256 of the canonical text of `g`.
pub fn game_hash(g: &Game) -> String {
    hex::encode(Sha256::digest(emit_game(g).as_bytes()))
}

fn field(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        path: path.to_string(),
        message: message.into(),
    }
}

fn region_value(r: &Region, vars: &[String]) -> Value {
    let names = |xs: &[usize]| -> Vec<String> { xs.iter().map(|&x| vars[x].clone()).collect() };
    json!({
        "ints": r.ints.iter().map(|k| k.map_or(Value::Null, |k| json!(k))).collect::<Vec<_>>(),
        "zero": names(&r.zero),
        "classes": r.classes.iter().map(|c| names(c)).collect::<Vec<_>>(),
    })
}

fn region_from_value(v: &Value, vars: &[String], path: &str) -> Result<Region, ParseError> {
    let m = object(v, path, &["ints", "zero", "classes"])?;
    let var = |v: &Value, p: &str| -> Result<usize, ParseError> {
        let name = string(v, p)?;
        vars.iter().position(|x| x == name).ok_or_else(|| field(p, format!("undeclared variable {name:?}")))
    };
    let ints_path = format!("{path}.ints");
    let ints = required(m, path, "ints")?
        .as_array()
        .ok_or_else(|| field(&ints_path, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, k)| match k {
            Value::Null => Ok(None),
            k => k.as_u64().map(Some).ok_or_else(|| field(&format!("{ints_path}[{i}]"), "expected a natural number or null")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if ints.len() != vars.len() {
        return Err(field(&ints_path, "one entry per variable expected"));
    }
    let zp = format!("{path}.zero");
    let zero = required(m, path, "zero")?
        .as_array()
        .ok_or_else(|| field(&zp, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, x)| var(x, &format!("{zp}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let cp = format!("{path}.classes");
    let classes = required(m, path, "classes")?
        .as_array()
        .ok_or_else(|| field(&cp, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let p = format!("{cp}[{i}]");
            c.as_array()
                .ok_or_else(|| field(&p, "expected an array"))?
                .iter()
                .enumerate()
                .map(|(j, x)| var(x, &format!("{p}[{j}]")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Region { ints, zero, classes })
}

/// Positional strategy on the regions of a scaled timed game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionStrategyFile {
    pub game: String,
    pub objective: Objective,
    pub scale: Rational,
    /// `(location, region) -> (region to wait for, edge)`.
    pub entries: BTreeMap<(hygame_core::LocationId, Region), (Region, hygame_core::EdgeId)>,
    pub notes: BTreeMap<(hygame_core::LocationId, Region), String>,
}

impl RegionStrategyFile {
    pub fn from_synthesis(timed: &Game, syn: &Synthesis) -> Self {
        let mut entries = BTreeMap::new();
        let mut notes = BTreeMap::new();
        for (&i, (r, e)) in &syn.solution.strategy.entries {
            let node = &syn.graph.nodes[i];
            let key = (node.loc.clone(), node.region.clone());
            let note = match syn.solution.rank[i] {
                Some(k) => format!("rank {k}"),
                None => "stays winning".to_string(),
            };
            notes.insert(key.clone(), note);
            entries.insert(key, (r.clone(), e.clone()));
        }
        RegionStrategyFile {
            game: game_hash(timed),
            objective: syn.objective.clone(),
            scale: Rational::from_integer(syn.scale.clone()),
            entries,
            notes,
        }
    }

    pub fn to_value(&self, g: &Game) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|((l, r), (w, e))| {
                json!({
                    "location": location_text(l, &g.vars),
                    "region": region_value(r, &g.vars),
                    "delay_region": region_value(w, &g.vars),
                    "edge": e.0,
                    "note": self.notes.get(&(l.clone(), r.clone())).cloned().unwrap_or_default(),
                })
            })
            .collect();
        json!({
            "game": self.game,
            "kind": "region-positional",
            "objective": self.objective.to_string(),
            "scale": rational::format(&self.scale),
            "entries": entries,
        })
    }

    /// Parses entries against `g`, which must be the game the strategy was
    /// computed for.
    pub fn from_value(v: &Value, g: &Game) -> Result<Self, ParseError> {
        let m = object(v, "$", &["game", "kind", "objective", "scale", "entries"])?;
        let kind = string(required(m, "$", "kind")?, "$.kind")?;
        if kind != "region-positional" {
            return Err(field("$.kind", format!("expected region-positional, got {kind:?}")));
        }
        let game = string(required(m, "$", "game")?, "$.game")?.to_string();
        let obj_text = string(required(m, "$", "objective")?, "$.objective")?;
        let objective = Objective::parse(obj_text).ok_or_else(|| field("$.objective", "expected reach:OBS or safe:OBS"))?;
        let scale = rational_at(required(m, "$", "scale")?, "$.scale")?;
        let mut entries = BTreeMap::new();
        let mut notes = BTreeMap::new();
        let list = required(m, "$", "entries")?
            .as_array()
            .ok_or_else(|| field("$.entries", "expected an array"))?;
        for (i, ev) in list.iter().enumerate() {
            let p = format!("$.entries[{i}]");
            let em = object(ev, &p, &["location", "region", "delay_region", "edge", "note"])?;
            let loc = parse_location(string(required(em, &p, "location")?, &format!("{p}.location"))?, &g.vars, &format!("{p}.location"))?;
            if !g.locations.contains_key(&loc) {
                return Err(field(&format!("{p}.location"), "no such location in the game"));
            }
            let region = region_from_value(required(em, &p, "region")?, &g.vars, &format!("{p}.region"))?;
            let wait = region_from_value(required(em, &p, "delay_region")?, &g.vars, &format!("{p}.delay_region"))?;
            let edge = hygame_core::EdgeId::new(string(required(em, &p, "edge")?, &format!("{p}.edge"))?);
            match g.edges.get(&edge) {
                Some(e) if e.src == loc => {}
                _ => return Err(field(&format!("{p}.edge"), "no such edge out of the location")),
            }
            let note = match em.get("note") {
                Some(n) => string(n, &format!("{p}.note"))?.to_string(),
                None => String::new(),
            };
            notes.insert((loc.clone(), region.clone()), note);
            entries.insert((loc, region), (wait, edge));
        }
        Ok(RegionStrategyFile {
            game,
            objective,
            scale,
            entries,
            notes,
        })
    }

    /// Plays the table in the unscaled game `g`.
    pub fn player<'a>(&'a self, g: &Game) -> RegionTablePlayer<'a> {
        let scaled = hygame_core::scale::rescale_bounds(g, &self.scale);
        let max = max_constants(&scaled).unwrap_or_else(|_| vec![0; g.dim()]);
        RegionTablePlayer { file: self, max }
    }
}

pub struct RegionTablePlayer<'a> {
    file: &'a RegionStrategyFile,
    max: Vec<u64>,
}

impl Strategy for RegionTablePlayer<'_> {
    fn choose(&self, _g: &Game, h: &History) -> Option<Move> {
        let q = h.last();
        let scaled: Vec<Rational> = q.val.iter().map(|v| v * &self.file.scale).collect();
        let region = Region::of(&scaled, &self.max);
        let (wait, edge) = self.file.entries.get(&(q.loc.clone(), region))?;
        let t = concretize_delay(&scaled, wait, &self.max)?;
        Some(Move::new(edge.clone(), t / &self.file.scale))
    }
}

/// Moves of a strategy of the singular game recorded along explored
/// histories. Histories are keyed by their move sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryTable {
    pub game: String,
    pub source: String,
    pub objective: Objective,
    pub bound: usize,
    pub seed: u64,
    pub entries: BTreeMap<Vec<Move>, Option<Move>>,
}

fn move_value(m: &Move) -> Value {
    json!({"edge": m.edge.0, "delay": rational::format(&m.delay)})
}

fn move_from_value(v: &Value, path: &str) -> Result<Move, ParseError> {
    let m = object(v, path, &["edge", "delay"])?;
    let edge = string(required(m, path, "edge")?, &format!("{path}.edge"))?;
    let delay = rational_at(required(m, path, "delay")?, &format!("{path}.delay"))?;
    Ok(Move::new(hygame_core::EdgeId::new(edge), delay))
}

impl HistoryTable {
    pub fn to_value(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(h, m)| {
                json!({
                    "history": h.iter().map(move_value).collect::<Vec<_>>(),
                    "move": m.as_ref().map_or(Value::Null, move_value),
                })
            })
            .collect();
        let mut root = Map::new();
        root.insert("game".into(), json!(self.game));
        root.insert("kind".into(), json!("history-table"));
        root.insert("source".into(), json!(self.source));
        root.insert("objective".into(), json!(self.objective.to_string()));
        root.insert("bound".into(), json!(self.bound));
        root.insert("seed".into(), json!(self.seed));
        root.insert("entries".into(), Value::Array(entries));
        Value::Object(root)
    }

    pub fn from_value(v: &Value) -> Result<Self, ParseError> {
        let m = object(v, "$", &["game", "kind", "source", "objective", "bound", "seed", "entries"])?;
        let kind = string(required(m, "$", "kind")?, "$.kind")?;
        if kind != "history-table" {
            return Err(field("$.kind", format!("expected history-table, got {kind:?}")));
        }
        let num = |k: &str| -> Result<u64, ParseError> {
            required(m, "$", k)?.as_u64().ok_or_else(|| field(&format!("$.{k}"), "expected a natural number"))
        };
        let obj_text = string(required(m, "$", "objective")?, "$.objective")?;
        let mut entries = BTreeMap::new();
        let list = required(m, "$", "entries")?
            .as_array()
            .ok_or_else(|| field("$.entries", "expected an array"))?;
        for (i, ev) in list.iter().enumerate() {
            let p = format!("$.entries[{i}]");
            let em = object(ev, &p, &["history", "move"])?;
            let hp = format!("{p}.history");
            let h = required(em, &p, "history")?
                .as_array()
                .ok_or_else(|| field(&hp, "expected an array"))?
                .iter()
                .enumerate()
                .map(|(j, mv)| move_from_value(mv, &format!("{hp}[{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let mv = match required(em, &p, "move")? {
                Value::Null => None,
                mv => Some(move_from_value(mv, &format!("{p}.move"))?),
            };
            entries.insert(h, mv);
        }
        Ok(HistoryTable {
            game: string(required(m, "$", "game")?, "$.game")?.to_string(),
            source: string(required(m, "$", "source")?, "$.source")?.to_string(),
            objective: Objective::parse(obj_text).ok_or_else(|| field("$.objective", "expected reach:OBS or safe:OBS"))?,
            bound: num("bound")? as usize,
            seed: num("seed")?,
            entries,
        })
    }
}

impl Strategy for HistoryTable {
    fn choose(&self, _g: &Game, h: &History) -> Option<Move> {
        let key: Vec<Move> = h.moves().cloned().collect();
        self.entries.get(&key).cloned().flatten()
    }
}

/// Reads the `kind` of a strategy document.
pub fn strategy_kind(text: &str) -> Result<(Value, String), ParseError> {
    let v = parse_json(text)?;
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| field("$.kind", "missing field"))?
        .to_string();
    Ok((v, kind))
}
