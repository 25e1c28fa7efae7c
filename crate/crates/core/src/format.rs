//! JSON files for systems, patches and the derived zig-zag and square data.
//!
//! Numbers follow the stage: exact values are JSON integers when integral and
//! `"p/q"` strings otherwise; real values are decimal strings written back
//! exactly as they were read. Output is pretty-printed with a fixed key
//! order, so equal inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::exactmath::{Rat, RealScalar};
use crate::scalar::{Scalar, Vec2};
use crate::squaresys::{matching_rules, SquareConfiguration, SquareSymbol, SquareSystem};
use crate::tilemodel::{
    validate_system, EdgeType, ExactSystem, Letter, ModelError, Patch, Placement, Prototile,
    RealSystem, Report, Sign, Stage, TileSystem,
};
use crate::zigzag::{max_deviation, ZigzagSystem};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        path: path.into(),
        message: message.into(),
    }
}

/// Scalars with a stage-specific JSON representation.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, stage: Stage, path: &str) -> Result<Self, FormatError>;
}

impl JsonScalar for Rat {
    fn to_json(&self) -> Value {
        match self.to_i64() {
            Some(n) => Value::from(n),
            None => Value::from(self.to_string()),
        }
    }

    fn from_json(v: &Value, stage: Stage, path: &str) -> Result<Rat, FormatError> {
        let r = match v {
            Value::Number(n) => match n.as_i64() {
                Some(i) => Rat::from(i),
                None => {
                    return Err(field(
                        path,
                        format!("{n} is not an integer; write non-integral {stage} values as \"p/q\" strings"),
                    ))
                }
            },
            Value::String(s) => s
                .parse::<Rat>()
                .map_err(|e| field(path, format!("`{s}`: {e}")))?,
            other => return Err(field(path, format!("expected a number, found {other}"))),
        };
        if stage == Stage::Integral && !r.is_integer() {
            return Err(field(
                path,
                format!("{r} is not an integer at the integral stage"),
            ));
        }
        Ok(r)
    }
}

impl JsonScalar for RealScalar {
    fn to_json(&self) -> Value {
        Value::from(self.literal())
    }

    fn from_json(v: &Value, _stage: Stage, path: &str) -> Result<RealScalar, FormatError> {
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => return Err(field(path, format!("expected a decimal, found {other}"))),
        };
        RealScalar::parse_literal(&text).map_err(|e| field(path, e.to_string()))
    }
}

fn get<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value, FormatError> {
    obj.as_object()
        .ok_or_else(|| field(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| field(path, format!("missing field `{key}`")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, FormatError> {
    v.as_array().ok_or_else(|| field(path, "expected an array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, FormatError> {
    v.as_str().ok_or_else(|| field(path, "expected a string"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize, FormatError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| field(path, "expected a non-negative integer"))
}

fn parse_vec<S: JsonScalar>(v: &Value, stage: Stage, path: &str) -> Result<Vec2<S>, FormatError> {
    let arr = as_array(v, path)?;
    if arr.len() != 2 {
        return Err(field(
            path,
            format!("expected [x, y], found {} entries", arr.len()),
        ));
    }
    Ok(Vec2::new(
        S::from_json(&arr[0], stage, &format!("{path}[0]"))?,
        S::from_json(&arr[1], stage, &format!("{path}[1]"))?,
    ))
}

fn parse_stage(v: &Value) -> Result<Stage, FormatError> {
    match as_str(v, "stage")? {
        "real" => Ok(Stage::Real),
        "rational" => Ok(Stage::Rational),
        "integral" => Ok(Stage::Integral),
        other => Err(field("stage", format!("unknown stage `{other}`"))),
    }
}

fn parse_typed_system<S: JsonScalar>(
    doc: &Value,
    stage: Stage,
) -> Result<TileSystem<S>, FormatError> {
    let mut edges = Vec::new();
    for (i, e) in as_array(get(doc, "edge_types", "")?, "edge_types")?
        .iter()
        .enumerate()
    {
        let p = format!("edge_types[{i}]");
        let id = as_str(get(e, "id", &p)?, &format!("{p}.id"))?.to_string();
        let vector = parse_vec(get(e, "vector", &p)?, stage, &format!("{p}.vector"))?;
        edges.push(EdgeType { id, vector });
    }
    let mut tiles = Vec::new();
    for (i, t) in as_array(get(doc, "prototiles", "")?, "prototiles")?
        .iter()
        .enumerate()
    {
        let p = format!("prototiles[{i}]");
        let id = as_str(get(t, "id", &p)?, &format!("{p}.id"))?.to_string();
        let mut boundary = Vec::new();
        let bp = format!("{p}.boundary");
        for (j, l) in as_array(get(t, "boundary", &p)?, &bp)?.iter().enumerate() {
            let lp = format!("{bp}[{j}]");
            let name = as_str(get(l, "edge", &lp)?, &format!("{lp}.edge"))?;
            let edge = edges.iter().position(|e| e.id == name).ok_or_else(|| {
                field(format!("{lp}.edge"), format!("unknown edge type `{name}`"))
            })?;
            let sign = match get(l, "sign", &lp)?.as_i64() {
                Some(1) => Sign::Plus,
                Some(-1) => Sign::Minus,
                _ => return Err(field(format!("{lp}.sign"), "sign must be 1 or -1")),
            };
            boundary.push(Letter { edge, sign });
        }
        tiles.push(Prototile { id, boundary });
    }
    TileSystem::new(stage, edges, tiles).map_err(|source| FormatError::Model {
        path: "system".into(),
        source,
    })
}

/// A system at any stage.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySystem {
    Real(RealSystem),
    Exact(ExactSystem),
}

impl AnySystem {
    pub fn stage(&self) -> Stage {
        match self {
            AnySystem::Real(s) => s.stage(),
            AnySystem::Exact(s) => s.stage(),
        }
    }

    pub fn validate(&self) -> Report {
        match self {
            AnySystem::Real(s) => validate_system(s),
            AnySystem::Exact(s) => validate_system(s),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            AnySystem::Real(s) => system_to_json(s),
            AnySystem::Exact(s) => system_to_json(s),
        }
    }

    fn to_value(&self) -> Value {
        match self {
            AnySystem::Real(s) => system_value(s),
            AnySystem::Exact(s) => system_value(s),
        }
    }
}

fn parse_system_value(doc: &Value) -> Result<AnySystem, FormatError> {
    let stage = parse_stage(get(doc, "stage", "")?)?;
    Ok(match stage {
        Stage::Real => AnySystem::Real(parse_typed_system(doc, stage)?),
        _ => AnySystem::Exact(parse_typed_system(doc, stage)?),
    })
}

/// Parses a system file. Geometric validity is not checked here.
pub fn parse_system(text: &str) -> Result<AnySystem, FormatError> {
    parse_system_value(&serde_json::from_str(text)?)
}

#[derive(Serialize)]
struct EdgeOut {
    id: String,
    vector: [Value; 2],
}

#[derive(Serialize)]
struct LetterOut {
    edge: String,
    sign: i64,
}

#[derive(Serialize)]
struct TileOut {
    id: String,
    boundary: Vec<LetterOut>,
}

#[derive(Serialize)]
struct SystemOut {
    stage: &'static str,
    edge_types: Vec<EdgeOut>,
    prototiles: Vec<TileOut>,
}

fn vec_json<S: JsonScalar>(v: &Vec2<S>) -> [Value; 2] {
    [v.x.to_json(), v.y.to_json()]
}

fn system_value<S: JsonScalar>(s: &TileSystem<S>) -> Value {
    let out = SystemOut {
        stage: s.stage().as_str(),
        edge_types: s
            .edge_types()
            .iter()
            .map(|e| EdgeOut {
                id: e.id.clone(),
                vector: vec_json(&e.vector),
            })
            .collect(),
        prototiles: s
            .prototiles()
            .iter()
            .map(|p| TileOut {
                id: p.id.clone(),
                boundary: p
                    .boundary
                    .iter()
                    .map(|l| LetterOut {
                        edge: s.edge_types()[l.edge].id.clone(),
                        sign: l.sign.as_i64(),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_value(out).expect("plain data serializes")
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn system_to_json<S: JsonScalar>(s: &TileSystem<S>) -> String {
    pretty(&system_value(s))
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), FormatError> {
    fs::write(path, contents).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_system(path: &Path) -> Result<AnySystem, FormatError> {
    parse_system(&read(path)?)
}

pub fn save_system<S: JsonScalar>(s: &TileSystem<S>, path: &Path) -> Result<(), FormatError> {
    write_file(path, &system_to_json(s))
}

/// How a patch file names its system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemRef {
    Inline,
    /// Path relative to the patch file.
    Path(String),
}

/// A patch together with the system it lives in.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPatch {
    Real {
        patch: Patch<RealScalar>,
        system: RealSystem,
    },
    Exact {
        patch: Patch<Rat>,
        system: ExactSystem,
    },
}

impl AnyPatch {
    pub fn len(&self) -> usize {
        match self {
            AnyPatch::Real { patch, .. } => patch.len(),
            AnyPatch::Exact { patch, .. } => patch.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn system(&self) -> AnySystem {
        match self {
            AnyPatch::Real { system, .. } => AnySystem::Real(system.clone()),
            AnyPatch::Exact { system, .. } => AnySystem::Exact(system.clone()),
        }
    }
}

fn parse_typed_patch<S: JsonScalar>(
    doc: &Value,
    s: &TileSystem<S>,
) -> Result<Patch<S>, FormatError> {
    let stage = s.stage();
    let mut placed = Vec::new();
    for (i, pl) in as_array(get(doc, "placed", "")?, "placed")?
        .iter()
        .enumerate()
    {
        let p = format!("placed[{i}]");
        let tv = get(pl, "tile", &p)?;
        let tile = match tv {
            Value::String(id) => s
                .prototile_index(id)
                .ok_or_else(|| field(format!("{p}.tile"), format!("unknown prototile `{id}`")))?,
            _ => {
                let k = as_usize(tv, &format!("{p}.tile"))?;
                if k >= s.prototiles().len() {
                    return Err(field(
                        format!("{p}.tile"),
                        format!("prototile index {k} out of range"),
                    ));
                }
                k
            }
        };
        let translation = parse_vec(
            get(pl, "translation", &p)?,
            stage,
            &format!("{p}.translation"),
        )?;
        placed.push(Placement { tile, translation });
    }
    let seed = match doc.get("seed") {
        Some(v) => as_usize(v, "seed")?,
        None => 0,
    };
    let origin_offset = match doc.get("origin_offset") {
        Some(v) => parse_vec(v, stage, "origin_offset")?,
        None => Vec2::zero(),
    };
    if !placed.is_empty() && seed >= placed.len() {
        return Err(field(
            "seed",
            format!("seed {seed} out of range for {} tiles", placed.len()),
        ));
    }
    Ok(Patch {
        placed,
        seed,
        origin_offset,
    })
}

/// Parses a patch file. A system given by path is resolved against `base`.
pub fn parse_patch(text: &str, base: Option<&Path>) -> Result<AnyPatch, FormatError> {
    let doc: Value = serde_json::from_str(text)?;
    let system = match get(&doc, "system", "")? {
        Value::String(rel) => {
            let path = base.map_or_else(|| PathBuf::from(rel), |b| b.join(rel));
            load_system(&path)?
        }
        v => parse_system_value(v)?,
    };
    Ok(match system {
        AnySystem::Real(system) => AnyPatch::Real {
            patch: parse_typed_patch(&doc, &system)?,
            system,
        },
        AnySystem::Exact(system) => AnyPatch::Exact {
            patch: parse_typed_patch(&doc, &system)?,
            system,
        },
    })
}

pub fn load_patch(path: &Path) -> Result<AnyPatch, FormatError> {
    parse_patch(&read(path)?, path.parent())
}

#[derive(Serialize)]
struct PlacedOut {
    tile: String,
    translation: [Value; 2],
}

#[derive(Serialize)]
struct PatchOut {
    system: Value,
    placed: Vec<PlacedOut>,
    seed: usize,
    origin_offset: [Value; 2],
}

pub fn patch_to_json<S: JsonScalar>(p: &Patch<S>, s: &TileSystem<S>, sys: &SystemRef) -> String {
    let out = PatchOut {
        system: match sys {
            SystemRef::Inline => system_value(s),
            SystemRef::Path(p) => Value::from(p.clone()),
        },
        placed: p
            .placed
            .iter()
            .map(|pl| PlacedOut {
                tile: s.prototiles()[pl.tile].id.clone(),
                translation: vec_json(&pl.translation),
            })
            .collect(),
        seed: p.seed,
        origin_offset: vec_json(&p.origin_offset),
    };
    pretty(&out)
}

impl AnyPatch {
    pub fn to_json(&self, sys: &SystemRef) -> String {
        match self {
            AnyPatch::Real { patch, system } => patch_to_json(patch, system, sys),
            AnyPatch::Exact { patch, system } => patch_to_json(patch, system, sys),
        }
    }
}

#[derive(Serialize)]
struct ZigzagEdgeOut {
    id: String,
    vector: [Value; 2],
    path: String,
    max_deviation: f64,
}

#[derive(Serialize)]
struct ZigzagTileOut {
    id: String,
    anchor: [i64; 2],
    area: usize,
    cells: Vec<[i64; 2]>,
}

#[derive(Serialize)]
struct ZigzagOut {
    kind: &'static str,
    source: Value,
    edges: Vec<ZigzagEdgeOut>,
    tiles: Vec<ZigzagTileOut>,
}

fn zigzag_value(z: &ZigzagSystem) -> Value {
    let s = &z.source;
    let out = ZigzagOut {
        kind: "zigzag",
        source: system_value(s),
        edges: s
            .edge_types()
            .iter()
            .zip(&z.paths)
            .map(|(e, p)| {
                let v = (
                    e.vector.x.to_i64().expect("integral"),
                    e.vector.y.to_i64().expect("integral"),
                );
                ZigzagEdgeOut {
                    id: e.id.clone(),
                    vector: vec_json(&e.vector),
                    path: p.to_string(),
                    max_deviation: max_deviation(p, v).expect("path matches its vector"),
                }
            })
            .collect(),
        tiles: z
            .tiles
            .iter()
            .map(|t| ZigzagTileOut {
                id: t.id.clone(),
                anchor: [t.anchor.0, t.anchor.1],
                area: t.area(),
                cells: t.cells.iter().map(|c| [c.0, c.1]).collect(),
            })
            .collect(),
    };
    serde_json::to_value(out).expect("plain data serializes")
}

/// The zig-zag system with its source integral system, per-edge staircases
/// (as R/L/U/D strings) and per-tile cell lists.
pub fn zigzag_to_json(z: &ZigzagSystem) -> String {
    pretty(&zigzag_value(z))
}

#[derive(Serialize)]
struct SymbolOut {
    tile: String,
    offset: [i64; 2],
}

#[derive(Serialize)]
struct RuleOut {
    symbol: SymbolOut,
    requires: Vec<([i64; 2], SymbolOut)>,
}

#[derive(Serialize)]
struct SquaresOut {
    kind: &'static str,
    rule_radius: i64,
    alphabet: Vec<SymbolOut>,
    rules: Vec<RuleOut>,
    zigzag: Value,
}

fn symbol_out(sym: &SquareSymbol, names: &[String]) -> SymbolOut {
    SymbolOut {
        tile: names[sym.tile].clone(),
        offset: [sym.offset.0, sym.offset.1],
    }
}

fn tile_names(s: &ExactSystem) -> Vec<String> {
    s.prototiles().iter().map(|p| p.id.clone()).collect()
}

/// The square alphabet and its matching rules, plus the zig-zag system they
/// came from.
pub fn squares_to_json(sq: &SquareSystem) -> String {
    let names = tile_names(&sq.tiles.source);
    let out = SquaresOut {
        kind: "squares",
        rule_radius: sq.rule_radius,
        alphabet: sq.alphabet.iter().map(|s| symbol_out(s, &names)).collect(),
        rules: matching_rules(sq)
            .iter()
            .map(|r| RuleOut {
                symbol: symbol_out(&r.symbol, &names),
                requires: r
                    .requires
                    .iter()
                    .map(|(d, s)| ([d.0, d.1], symbol_out(s, &names)))
                    .collect(),
            })
            .collect(),
        zigzag: zigzag_value(&sq.tiles),
    };
    pretty(&out)
}

#[derive(Serialize)]
struct CellOut {
    at: [i64; 2],
    tile: String,
    offset: [i64; 2],
}

#[derive(Serialize)]
struct ConfigurationOut {
    kind: &'static str,
    cells: Vec<CellOut>,
}

/// A square configuration; symbols are named by prototile id.
pub fn configuration_to_json(c: &SquareConfiguration, s: &ExactSystem) -> String {
    let names = tile_names(s);
    let out = ConfigurationOut {
        kind: "configuration",
        cells: c
            .cells
            .iter()
            .map(|(at, sym)| CellOut {
                at: [at.0, at.1],
                tile: names[sym.tile].clone(),
                offset: [sym.offset.0, sym.offset.1],
            })
            .collect(),
    };
    pretty(&out)
}

fn int_pair(v: &Value, path: &str) -> Result<(i64, i64), FormatError> {
    let arr = as_array(v, path)?;
    match (
        arr.first().and_then(Value::as_i64),
        arr.get(1).and_then(Value::as_i64),
    ) {
        (Some(x), Some(y)) if arr.len() == 2 => Ok((x, y)),
        _ => Err(field(path, "expected [x, y] integers")),
    }
}

/// Reads a configuration, resolving tile ids against `s`.
pub fn parse_configuration(
    text: &str,
    s: &ExactSystem,
) -> Result<SquareConfiguration, FormatError> {
    let doc: Value = serde_json::from_str(text)?;
    let mut c = SquareConfiguration::default();
    for (i, cell) in as_array(get(&doc, "cells", "")?, "cells")?
        .iter()
        .enumerate()
    {
        let p = format!("cells[{i}]");
        let at = int_pair(get(cell, "at", &p)?, &format!("{p}.at"))?;
        let id = as_str(get(cell, "tile", &p)?, &format!("{p}.tile"))?;
        let tile = s
            .prototile_index(id)
            .ok_or_else(|| field(format!("{p}.tile"), format!("unknown prototile `{id}`")))?;
        let offset = int_pair(get(cell, "offset", &p)?, &format!("{p}.offset"))?;
        if c.cells.insert(at, SquareSymbol { tile, offset }).is_some() {
            return Err(field(p, format!("cell ({}, {}) listed twice", at.0, at.1)));
        }
    }
    Ok(c)
}

/// What a JSON document holds, judged by its top-level keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocumentKind {
    System,
    Patch,
    Zigzag,
    Squares,
    Configuration,
}

pub fn document_kind(text: &str) -> Result<DocumentKind, FormatError> {
    let doc: Value = serde_json::from_str(text)?;
    let kind = doc.get("kind").and_then(Value::as_str);
    Ok(match kind {
        Some("zigzag") => DocumentKind::Zigzag,
        Some("squares") => DocumentKind::Squares,
        Some("configuration") => DocumentKind::Configuration,
        _ if doc.get("placed").is_some() => DocumentKind::Patch,
        _ if doc.get("edge_types").is_some() => DocumentKind::System,
        _ => return Err(field("", "unrecognized document: expected a system, patch, zig-zag, squares or configuration file")),
    })
}

/// Reads the source system embedded in a zig-zag or squares document and
/// rebuilds the zig-zag system from it.
pub fn zigzag_source(text: &str) -> Result<ExactSystem, FormatError> {
    let doc: Value = serde_json::from_str(text)?;
    let src = match doc.get("zigzag") {
        Some(z) => get(z, "source", "zigzag")?,
        None => get(&doc, "source", "")?,
    };
    match parse_system_value(src)? {
        AnySystem::Exact(s) if s.stage() == Stage::Integral => Ok(s),
        other => Err(field(
            "source",
            format!("expected an integral system, found stage {}", other.stage()),
        )),
    }
}

/// Inline system JSON value, for embedding in other documents.
pub fn system_json_value(s: &AnySystem) -> Value {
    s.to_value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penrose;
    use crate::tilemodel::fixtures::unit_square;
    use crate::tilemodel::grow_patch;

    #[test]
    fn unit_square_round_trip() {
        let s = unit_square();
        let text = system_to_json(&s);
        assert_eq!(parse_system(&text).unwrap(), AnySystem::Exact(s));
        assert_eq!(parse_system(&text).unwrap().to_json(), text);
    }

    #[test]
    fn penrose_integral_round_trip() {
        let s = penrose::integral_system();
        let text = system_to_json(&s);
        let AnySystem::Exact(back) = parse_system(&text).unwrap() else {
            panic!()
        };
        assert_eq!(back.edge_types().len(), 40);
        assert_eq!(back, s);
        assert_eq!(system_to_json(&back), text);
    }

    #[test]
    fn real_literals_kept_verbatim() {
        let text = system_to_json(&penrose::real_system());
        let again = parse_system(&text).unwrap().to_json();
        assert_eq!(again, text);
        assert!(text.contains("\"-4\""));
    }

    #[test]
    fn rational_values_are_strings() {
        let s = unit_square();
        let half: Vec<Vec2<Rat>> = s
            .edge_types()
            .iter()
            .map(|e| e.vector.scale(&Rat::new(1, 2)))
            .collect();
        let r = s.with_vectors(Stage::Rational, half).unwrap();
        let text = system_to_json(&r);
        assert!(text.contains("\"1/2\""));
        assert_eq!(parse_system(&text).unwrap(), AnySystem::Exact(r));
    }

    #[test]
    fn bad_sign_is_rejected_with_context() {
        let text = system_to_json(&unit_square()).replacen("\"sign\": 1", "\"sign\": 2", 1);
        let err = parse_system(&text).unwrap_err().to_string();
        assert!(err.contains("prototiles[0].boundary[0].sign"), "{err}");
    }

    #[test]
    fn stage_number_mismatch_is_rejected() {
        let text = system_to_json(&unit_square()).replacen("1,", "\"1/2\",", 1);
        assert!(parse_system(&text)
            .unwrap_err()
            .to_string()
            .contains("integral"));
        let text = system_to_json(&unit_square()).replacen("1,", "1.5,", 1);
        assert!(parse_system(&text).is_err());
    }

    #[test]
    fn unknown_edge_and_bad_json() {
        let text = system_to_json(&unit_square()).replacen("\"edge\": \"x\"", "\"edge\": \"z\"", 1);
        assert!(parse_system(&text)
            .unwrap_err()
            .to_string()
            .contains("unknown edge type `z`"));
        let err = parse_system("{\n  \"stage\": ").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn patch_round_trip_inline() {
        let s = penrose::integral_system();
        let p = grow_patch(&s, &Patch::single(3), 12).patch;
        let text = patch_to_json(&p, &s, &SystemRef::Inline);
        let AnyPatch::Exact { patch, system } = parse_patch(&text, None).unwrap() else {
            panic!()
        };
        assert_eq!(patch, p);
        assert_eq!(system, s);
        assert_eq!(patch_to_json(&patch, &system, &SystemRef::Inline), text);
    }

    #[test]
    fn patch_with_system_reference() {
        let dir = std::env::temp_dir().join(format!("tilebundle-format-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        save_system(&unit_square(), &dir.join("square.json")).unwrap();
        let p: Patch<Rat> = Patch::single(0);
        let text = patch_to_json(&p, &unit_square(), &SystemRef::Path("square.json".into()));
        write_file(&dir.join("patch.json"), &text).unwrap();
        let loaded = load_patch(&dir.join("patch.json")).unwrap();
        assert_eq!(loaded.len(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn document_kinds() {
        let s = penrose::integral_system();
        let z = crate::zigzag::build_zigzag_system(&s).unwrap();
        let sq = crate::squaresys::build_square_system(&z);
        assert_eq!(
            document_kind(&system_to_json(&s)).unwrap(),
            DocumentKind::System
        );
        assert_eq!(
            document_kind(&zigzag_to_json(&z)).unwrap(),
            DocumentKind::Zigzag
        );
        let sqj = squares_to_json(&sq);
        assert_eq!(document_kind(&sqj).unwrap(), DocumentKind::Squares);
        assert_eq!(zigzag_source(&sqj).unwrap(), s);
        let p = grow_patch(&s, &Patch::single(0), 6).patch;
        let c = crate::squaresys::explode(&p, &z).unwrap();
        let cj = configuration_to_json(&c, &s);
        assert_eq!(document_kind(&cj).unwrap(), DocumentKind::Configuration);
        assert_eq!(parse_configuration(&cj, &s).unwrap(), c);
    }
}
