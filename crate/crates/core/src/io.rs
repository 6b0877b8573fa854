//! Input documents, session configuration and report types.
//!
//! Every document is parsed through `serde_path_to_error`, so schema
//! problems carry a JSON pointer. Domain validation runs afterwards and
//! reports domain errors.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{Functional, Temperature};
use crate::axb::IdealSemigroupData;
use crate::characters::CharacterTable;
use crate::crossed::{periodic_orbits, FiniteZSystem};
use crate::cyclotomic::{format_rational, Cyclotomic};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupSpec};
use crate::groupoid::{
    transformation_groupoid, validate_cocycle, validate_groupoid, Cocycle, FiniteGroupoid,
    RawGroupoid, TransformationGroupoid,
};
use crate::kms::{ExtremeState, KmsClassification, OracleSolution};
use crate::strategy::Engine;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Table,
}

pub const SEED_VAR: &str = "KMSLAB_SEED";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SessionConfig {
    pub mode: Mode,
    pub seed: u64,
    pub format: Format,
    /// Registry names; `None` picks the mode's default.
    pub positivity: Option<String>,
    pub characters: Option<String>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            mode: Mode::Exact,
            seed: Engine::DEFAULT_SEED,
            format: Format::Json,
            positivity: None,
            characters: None,
        }
    }
}

impl SessionConfig {
    /// Applies `KMSLAB_SEED` when set.
    pub fn with_env_seed(mut self) -> Result<Self> {
        if let Ok(s) = std::env::var(SEED_VAR) {
            self.seed = s.trim().parse().map_err(|_| Error::Schema {
                pointer: format!("${SEED_VAR}"),
                message: format!("not an unsigned integer: {s:?}"),
            })?;
        }
        Ok(self)
    }

    pub fn engine(&self) -> Result<Engine> {
        let base = match self.mode {
            Mode::Exact => Engine::exact(self.seed),
            Mode::Float => Engine::float(self.seed),
        };
        Engine::from_names(
            self.positivity.as_deref().unwrap_or(base.positivity.name()),
            self.characters.as_deref().unwrap_or(base.characters.name()),
            self.seed,
        )
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Deserializes `text`, reporting failures with a JSON pointer.
pub fn parse_document<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        pointer: pointer_of(e.path()),
        message: e.inner().to_string(),
    })
}

fn from_value<T: DeserializeOwned>(v: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| Error::Schema {
        pointer: pointer_of(e.path()),
        message: e.inner().to_string(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// `{"action": {"group": …, "space": […], "map": [["γ","x","γx"], …]}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub group: GroupSpec,
    pub space: Vec<String>,
    pub map: Vec<[String; 3]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionDocument {
    action: ActionSpec,
}

/// Builds the action table from triples; every pair must appear once.
pub fn action_from_spec(spec: &ActionSpec) -> Result<TransformationGroupoid> {
    let group = FiniteGroup::from_spec(&spec.group)?;
    let point = |x: &str| {
        spec.space
            .iter()
            .position(|p| p == x)
            .ok_or_else(|| Error::NotAnAction(format!("unknown point {x:?}")))
    };
    let mut action = vec![vec![None; spec.space.len()]; group.order()];
    for [g, x, y] in &spec.map {
        let gi = group
            .index_of(g)
            .ok_or_else(|| Error::NotAnAction(format!("unknown group element {g:?}")))?;
        let (xi, yi) = (point(x)?, point(y)?);
        match action[gi][xi] {
            Some(old) if old != yi => {
                return Err(Error::NotAnAction(format!(
                    "{g}·{x} given twice with different values"
                )));
            }
            _ => action[gi][xi] = Some(yi),
        }
    }
    let action = action
        .into_iter()
        .enumerate()
        .map(|(gi, row)| {
            row.into_iter()
                .enumerate()
                .map(|(xi, y)| {
                    y.ok_or_else(|| {
                        Error::NotAnAction(format!(
                            "missing pair ({}, {})",
                            group.label(gi),
                            spec.space[xi]
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    transformation_groupoid(&spec.space, &group, &action)
}

pub fn action_to_spec(t: &TransformationGroupoid) -> ActionSpec {
    let mut map = Vec::new();
    for g in t.group.elements() {
        for (x, p) in t.space.iter().enumerate() {
            map.push([
                t.group.label(g).to_string(),
                p.clone(),
                t.space[t.action[g][x]].clone(),
            ]);
        }
    }
    ActionSpec {
        group: t.group.to_spec(),
        space: t.space.clone(),
        map,
    }
}

/// A groupoid given directly or as an action.
#[derive(Clone, Debug)]
pub enum GroupoidInput {
    Plain(FiniteGroupoid),
    Action(TransformationGroupoid),
}

impl GroupoidInput {
    pub fn groupoid(&self) -> &FiniteGroupoid {
        match self {
            GroupoidInput::Plain(g) => g,
            GroupoidInput::Action(t) => &t.groupoid,
        }
    }

    pub fn into_arc(self) -> Arc<FiniteGroupoid> {
        Arc::new(match self {
            GroupoidInput::Plain(g) => g,
            GroupoidInput::Action(t) => t.groupoid,
        })
    }
}

pub fn parse_groupoid(text: &str) -> Result<GroupoidInput> {
    let v: serde_json::Value = parse_document(text)?;
    if v.get("action").is_some() {
        let doc: ActionDocument = from_value(v)?;
        return Ok(GroupoidInput::Action(action_from_spec(&doc.action)?));
    }
    let raw: RawGroupoid = from_value(v)?;
    Ok(GroupoidInput::Plain(validate_groupoid(&raw)?))
}

pub fn emit_groupoid(g: &FiniteGroupoid) -> String {
    to_json(&g.to_raw())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CocycleDocument {
    cocycle: BTreeMap<String, i64>,
}

/// `{"cocycle": {"arrowId": int, …}}`; unit arrows may be omitted.
pub fn parse_cocycle(g: &FiniteGroupoid, text: &str) -> Result<Cocycle> {
    let doc: CocycleDocument = parse_document(text)?;
    validate_cocycle(g, &doc.cocycle)
}

pub fn emit_cocycle(g: &FiniteGroupoid, c: &Cocycle) -> String {
    let cocycle = g
        .arrows()
        .iter()
        .zip(c.values())
        .map(|(a, &v)| (a.id.clone(), v))
        .collect();
    to_json(&CocycleDocument { cocycle })
}

pub fn parse_temperature(s: &str) -> Result<Temperature> {
    Temperature::parse(s)
}

/// `{"arrowId": [re, im], …}`; absent arrows carry 0.
pub fn parse_state(g: &Arc<FiniteGroupoid>, text: &str) -> Result<Functional<Cyclotomic>> {
    let doc: BTreeMap<String, Cyclotomic> = parse_document(text)?;
    let mut w = Functional::zero(g);
    for (id, v) in doc {
        w.set(g.arrow_index(&id)?, v);
    }
    Ok(w)
}

pub fn state_map(w: &Functional<Cyclotomic>) -> BTreeMap<String, Cyclotomic> {
    let g = w.groupoid();
    g.arrows()
        .iter()
        .zip(w.weights())
        .map(|(a, v)| (a.id.clone(), v.clone()))
        .collect()
}

pub fn emit_state(w: &Functional<Cyclotomic>) -> String {
    to_json(&state_map(w))
}

pub fn parse_group(text: &str) -> Result<FiniteGroup> {
    let spec: GroupSpec = parse_document(text)?;
    FiniteGroup::from_spec(&spec)
}

pub fn emit_group(g: &FiniteGroup) -> String {
    to_json(&g.to_spec())
}

/// `{"points": […], "map": [["x","Tx"], …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub points: Vec<String>,
    pub map: Vec<[String; 2]>,
}

pub fn system_from_spec(spec: &SystemSpec) -> Result<FiniteZSystem> {
    let index = |x: &str| {
        spec.points
            .iter()
            .position(|p| p == x)
            .ok_or_else(|| Error::Inconsistent(format!("unknown point {x:?}")))
    };
    let mut map = vec![None; spec.points.len()];
    for [x, y] in &spec.map {
        let (xi, yi) = (index(x)?, index(y)?);
        if map[xi].replace(yi).is_some_and(|old| old != yi) {
            return Err(Error::Inconsistent(format!("T({x}) given twice")));
        }
    }
    let map = map
        .into_iter()
        .enumerate()
        .map(|(i, y)| {
            y.ok_or_else(|| Error::Inconsistent(format!("T({}) missing", spec.points[i])))
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteZSystem::new(spec.points.clone(), map)
}

pub fn system_to_spec(sys: &FiniteZSystem) -> SystemSpec {
    SystemSpec {
        points: sys.points.clone(),
        map: sys
            .map
            .iter()
            .enumerate()
            .map(|(x, &y)| [sys.points[x].clone(), sys.points[y].clone()])
            .collect(),
    }
}

pub fn parse_system(text: &str) -> Result<FiniteZSystem> {
    system_from_spec(&parse_document(text)?)
}

/// Orbit values keyed by any point of the orbit: `{"x": [v_{-M}, …, v_M]}`.
/// Orbits without a key carry zeros.
pub fn parse_orbit_values(
    sys: &FiniteZSystem,
    text: &str,
    cutoff: usize,
) -> Result<Vec<Vec<Cyclotomic>>> {
    let doc: BTreeMap<String, Vec<Cyclotomic>> = parse_document(text)?;
    let orbits = periodic_orbits(sys);
    let mut out: Vec<Option<Vec<Cyclotomic>>> = vec![None; orbits.len()];
    for (x, row) in doc {
        let xi = sys
            .points
            .iter()
            .position(|p| *p == x)
            .ok_or_else(|| Error::Schema {
                pointer: format!("/{x}"),
                message: "unknown point".into(),
            })?;
        if row.len() != 2 * cutoff + 1 {
            return Err(Error::Schema {
                pointer: format!("/{x}"),
                message: format!("expected {} values for cutoff {cutoff}", 2 * cutoff + 1),
            });
        }
        let n = orbits
            .iter()
            .position(|o| o.contains(&xi))
            .expect("orbits cover");
        if out[n].replace(row).is_some() {
            return Err(Error::Inconsistent(format!("orbit of {x:?} given twice")));
        }
    }
    Ok(out
        .into_iter()
        .map(|r| r.unwrap_or_else(|| vec![Cyclotomic::zero(); 2 * cutoff + 1]))
        .collect())
}

/// Inverse of [`parse_orbit_values`], keyed by each orbit's first point.
pub fn orbit_values_map(
    sys: &FiniteZSystem,
    values: &[Vec<Cyclotomic>],
) -> BTreeMap<String, Vec<Cyclotomic>> {
    periodic_orbits(sys)
        .iter()
        .zip(values)
        .map(|(o, row)| (sys.points[o[0]].clone(), row.clone()))
        .collect()
}

pub fn parse_points(text: &str) -> Result<Vec<String>> {
    parse_document(text)
}

/// Action triples file for `traces extremal`.
pub fn parse_action_map(text: &str) -> Result<Vec<[String; 3]>> {
    parse_document(text)
}

pub fn parse_ideal_data(text: &str) -> Result<IdealSemigroupData> {
    let d: IdealSemigroupData = parse_document(text)?;
    d.validate()?;
    Ok(d)
}

// ---------------------------------------------------------------- reports

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterTableReport {
    pub elements: Vec<String>,
    pub classes: Vec<Vec<String>>,
    pub degrees: Vec<u64>,
    pub characters: Vec<Vec<Cyclotomic>>,
    pub method: String,
}

impl CharacterTableReport {
    pub fn new(group: &FiniteGroup, table: &CharacterTable) -> Self {
        CharacterTableReport {
            elements: group.labels().to_vec(),
            classes: table
                .classes
                .iter()
                .map(|c| c.iter().map(|&g| group.label(g).to_string()).collect())
                .collect(),
            degrees: table.degrees.clone(),
            characters: table.characters.clone(),
            method: table.method.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub units: Vec<String>,
    pub representative: String,
    pub isotropy_order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characters: Option<CharacterTableReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateReport {
    pub orbit: usize,
    pub representative: String,
    pub character: usize,
    pub degree: u64,
    pub state: BTreeMap<String, Cyclotomic>,
}

impl StateReport {
    pub fn new(g: &FiniteGroupoid, s: &ExtremeState) -> Self {
        StateReport {
            orbit: s.orbit,
            representative: g.units()[s.representative].clone(),
            character: s.character,
            degree: s.degree,
            state: state_map(&s.state),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub q: String,
    pub orbits: Vec<OrbitReport>,
    pub measure_vertices: Vec<BTreeMap<String, String>>,
    pub expected_count: usize,
    pub states: Vec<StateReport>,
}

impl ClassificationReport {
    pub fn new(cls: &KmsClassification) -> Self {
        let g = &cls.groupoid;
        let orbits = cls
            .orbits
            .iter()
            .map(|o| {
                let iso = g.isotropy_group(o.representative).ok();
                OrbitReport {
                    units: o.units.iter().map(|&x| g.units()[x].clone()).collect(),
                    representative: g.units()[o.representative].clone(),
                    isotropy_order: o.isotropy_order,
                    characters: o
                        .table
                        .as_ref()
                        .zip(iso)
                        .map(|(t, iso)| CharacterTableReport::new(&iso.group, t)),
                }
            })
            .collect();
        ClassificationReport {
            q: cls.q.to_string(),
            orbits,
            measure_vertices: measure_rows(g, &cls.polytope.vertices),
            expected_count: cls.expected_count(),
            states: cls.states.iter().map(|s| StateReport::new(g, s)).collect(),
        }
    }
}

pub fn measure_rows(
    g: &FiniteGroupoid,
    vertices: &[crate::measure::UnitMeasure],
) -> Vec<BTreeMap<String, String>> {
    vertices
        .iter()
        .map(|m| {
            m.weights
                .iter()
                .enumerate()
                .filter(|(_, w)| !num_traits::Zero::is_zero(*w))
                .map(|(x, w)| (g.units()[x].clone(), format_rational(w)))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub q: String,
    pub dimension: usize,
    pub point: BTreeMap<String, Cyclotomic>,
    pub directions: Vec<BTreeMap<String, Cyclotomic>>,
}

impl OracleReport {
    pub fn new(orc: &OracleSolution) -> Self {
        OracleReport {
            q: orc.q.to_string(),
            dimension: orc.dimension(),
            point: state_map(&orc.point),
            directions: orc.directions.iter().map(state_map).collect(),
        }
    }
}
