//! Finite groupoids: validation, isotropy, orbits and integer cocycles.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
    pub inv: usize,
}

/// A validated finite groupoid. Units and arrows are indexed in
/// lexicographic order of their identifiers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    units: Vec<String>,
    arrows: Vec<Arrow>,
    unit_arrow: Vec<usize>,
    compose: Vec<u32>,
    by_range: Vec<Vec<usize>>,
    by_source: Vec<Vec<usize>>,
}

/// Arrow as written in the JSON input.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub tgt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inv: Option<String>,
}

/// Unvalidated groupoid description. Unit arrows (identified by the unit's
/// own id), inverse compositions and unit compositions may be omitted.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct RawGroupoid {
    pub units: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowSpec>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
}

impl FiniteGroupoid {
    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, g: usize) -> &Arrow {
        &self.arrows[g]
    }

    pub fn src(&self, g: usize) -> usize {
        self.arrows[g].src
    }

    pub fn tgt(&self, g: usize) -> usize {
        self.arrows[g].tgt
    }

    pub fn inv(&self, g: usize) -> usize {
        self.arrows[g].inv
    }

    pub fn unit_arrow(&self, x: usize) -> usize {
        self.unit_arrow[x]
    }

    pub fn is_unit_arrow(&self, g: usize) -> bool {
        let a = &self.arrows[g];
        a.src == a.tgt && self.unit_arrow[a.src] == g
    }

    pub fn is_isotropy(&self, g: usize) -> bool {
        self.arrows[g].src == self.arrows[g].tgt
    }

    /// `a·b`, defined iff `s(a) = r(b)`.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        let v = self.compose[a * self.arrows.len() + b];
        (v != NONE).then_some(v as usize)
    }

    /// Arrows with range `x` (the fibre `G^x`).
    pub fn arrows_into(&self, x: usize) -> &[usize] {
        &self.by_range[x]
    }

    /// Arrows with source `x` (the fibre `G_x`).
    pub fn arrows_from(&self, x: usize) -> &[usize] {
        &self.by_source[x]
    }

    pub fn unit_index(&self, id: &str) -> Result<usize> {
        self.units
            .binary_search_by(|u| u.as_str().cmp(id))
            .map_err(|_| Error::UnknownUnit(id.to_string()))
    }

    pub fn arrow_index(&self, id: &str) -> Result<usize> {
        self.arrows
            .binary_search_by(|a| a.id.as_str().cmp(id))
            .map_err(|_| Error::UnknownArrow(id.to_string()))
    }

    pub fn is_principal(&self) -> bool {
        (0..self.num_units()).all(|x| self.isotropy_arrows(x).len() == 1)
    }

    /// Isotropy arrows at `x`: the unit arrow first, then arrow-index order.
    pub fn isotropy_arrows(&self, x: usize) -> Vec<usize> {
        let u = self.unit_arrow[x];
        std::iter::once(u)
            .chain(
                self.by_range[x]
                    .iter()
                    .copied()
                    .filter(|&g| g != u && self.arrows[g].src == x),
            )
            .collect()
    }

    /// Isotropy group `G^x_x` as an abstract group labelled by arrow ids.
    pub fn isotropy_group(&self, x: usize) -> Result<IsotropyGroup> {
        if x >= self.num_units() {
            return Err(Error::UnknownUnit(x.to_string()));
        }
        let arrows = self.isotropy_arrows(x);
        let pos: HashMap<usize, usize> = arrows.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let table = arrows
            .iter()
            .map(|&a| {
                arrows
                    .iter()
                    .map(|&b| pos[&self.compose(a, b).expect("isotropy arrows compose")])
                    .collect()
            })
            .collect();
        let labels = arrows.iter().map(|&g| self.arrows[g].id.clone()).collect();
        let group = FiniteGroup::from_table(labels, table)?;
        Ok(IsotropyGroup {
            unit: x,
            arrows,
            group,
        })
    }

    pub fn isotropy_group_by_id(&self, id: &str) -> Result<IsotropyGroup> {
        self.isotropy_group(self.unit_index(id)?)
    }

    /// Orbit partition of the units; blocks sorted, ordered by least unit.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut dsu = DisjointSet::new(self.num_units());
        for a in &self.arrows {
            dsu.union(a.src, a.tgt);
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.num_units() {
            blocks.entry(dsu.find(x)).or_default().push(x);
        }
        let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
        out.sort_by_key(|b| b[0]);
        out
    }

    /// Index of the orbit containing each unit.
    pub fn orbit_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_units()];
        for (k, block) in self.orbits().iter().enumerate() {
            for &x in block {
                out[x] = k;
            }
        }
        out
    }

    /// Some arrow `from → to`, if one exists.
    pub fn arrow_between(&self, from: usize, to: usize) -> Option<usize> {
        self.by_source[from]
            .iter()
            .copied()
            .find(|&g| self.arrows[g].tgt == to)
    }

    pub fn to_raw(&self) -> RawGroupoid {
        let mut compose = Vec::new();
        let n = self.num_arrows();
        for a in 0..n {
            for &b in &self.by_range[self.arrows[a].src] {
                let ab = self.compose(a, b).expect("closed");
                compose.push([
                    self.arrows[a].id.clone(),
                    self.arrows[b].id.clone(),
                    self.arrows[ab].id.clone(),
                ]);
            }
        }
        RawGroupoid {
            units: self.units.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowSpec {
                    id: a.id.clone(),
                    src: self.units[a.src].clone(),
                    tgt: self.units[a.tgt].clone(),
                    inv: Some(self.arrows[a.inv].id.clone()),
                })
                .collect(),
            compose,
        }
    }

    /// Disjoint union; ids of each side are prefixed with `left`/`right`.
    pub fn disjoint_union(
        &self,
        other: &FiniteGroupoid,
        left: &str,
        right: &str,
    ) -> Result<FiniteGroupoid> {
        let mut raw = RawGroupoid::default();
        for (g, prefix) in [(self, left), (other, right)] {
            let r = g.to_raw();
            let p = |s: &str| format!("{prefix}{s}");
            raw.units.extend(r.units.iter().map(|u| p(u)));
            raw.arrows.extend(r.arrows.iter().map(|a| ArrowSpec {
                id: p(&a.id),
                src: p(&a.src),
                tgt: p(&a.tgt),
                inv: a.inv.as_deref().map(p),
            }));
            raw.compose
                .extend(r.compose.iter().map(|[a, b, c]| [p(a), p(b), p(c)]));
        }
        validate_groupoid(&raw)
    }
}

/// The isotropy group at a unit together with its arrow embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropyGroup {
    pub unit: usize,
    /// `arrows[i]` is the groupoid arrow of group element `i`.
    pub arrows: Vec<usize>,
    pub group: FiniteGroup,
}

impl IsotropyGroup {
    pub fn element_of(&self, arrow: usize) -> Option<usize> {
        self.arrows.iter().position(|&g| g == arrow)
    }
}

/// Validates a raw description and completes implied units, inverses and
/// composites.
pub fn validate_groupoid(raw: &RawGroupoid) -> Result<FiniteGroupoid> {
    let mut units = raw.units.clone();
    units.sort();
    if units.is_empty() {
        return Err(Error::MalformedGroupoid("no units".into()));
    }
    if units.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::MalformedGroupoid("duplicate unit id".into()));
    }
    let unit_idx = |id: &str| -> Result<usize> {
        units
            .binary_search_by(|u| u.as_str().cmp(id))
            .map_err(|_| Error::UnknownUnit(id.to_string()))
    };

    // Collect arrows, adding missing unit arrows.
    let mut specs: BTreeMap<String, (usize, usize, Option<String>)> = BTreeMap::new();
    for a in &raw.arrows {
        let (s, t) = (unit_idx(&a.src)?, unit_idx(&a.tgt)?);
        if specs.insert(a.id.clone(), (s, t, a.inv.clone())).is_some() {
            return Err(Error::MalformedGroupoid(format!(
                "duplicate arrow id {:?}",
                a.id
            )));
        }
    }
    for (x, u) in units.iter().enumerate() {
        match specs.get_mut(u) {
            Some((s, t, inv)) => {
                if *s != x || *t != x {
                    return Err(Error::MalformedGroupoid(format!(
                        "arrow {u:?} shares a unit's id but is not that unit's identity"
                    )));
                }
                if inv.as_deref().is_some_and(|i| i != u) {
                    return Err(Error::MalformedGroupoid(format!(
                        "unit arrow {u:?} is not self-inverse"
                    )));
                }
                *inv = Some(u.clone());
            }
            None => {
                specs.insert(u.clone(), (x, x, Some(u.clone())));
            }
        }
    }
    let ids: Vec<String> = specs.keys().cloned().collect();
    let arrow_idx = |id: &str| -> Result<usize> {
        ids.binary_search_by(|a| a.as_str().cmp(id))
            .map_err(|_| Error::UnknownArrow(id.to_string()))
    };
    let n = ids.len();

    // Inverses: either side may declare the pair.
    let mut inv = vec![usize::MAX; n];
    for (i, (_, (_, _, decl))) in specs.iter().enumerate() {
        if let Some(j) = decl {
            let j = arrow_idx(j)?;
            for (p, q) in [(i, j), (j, i)] {
                if inv[p] != usize::MAX && inv[p] != q {
                    return Err(Error::MalformedGroupoid(format!(
                        "conflicting inverses for {:?}",
                        ids[p]
                    )));
                }
                inv[p] = q;
            }
        }
    }
    let arrows: Vec<Arrow> = specs
        .iter()
        .enumerate()
        .map(|(i, (id, (s, t, _)))| Arrow {
            id: id.clone(),
            src: *s,
            tgt: *t,
            inv: inv[i],
        })
        .collect();
    for a in &arrows {
        if a.inv == usize::MAX {
            return Err(Error::MalformedGroupoid(format!(
                "arrow {:?} has no inverse",
                a.id
            )));
        }
        let b = &arrows[a.inv];
        if b.src != a.tgt || b.tgt != a.src {
            return Err(Error::MalformedGroupoid(format!(
                "inverse of {:?} has wrong endpoints",
                a.id
            )));
        }
    }
    let unit_arrow: Vec<usize> = units.iter().map(|u| arrow_idx(u).expect("added")).collect();

    let mut compose = vec![NONE; n * n];
    let mut set = |a: usize, b: usize, c: usize| -> Result<()> {
        let (aa, bb, cc) = (&arrows[a], &arrows[b], &arrows[c]);
        if aa.src != bb.tgt {
            return Err(Error::MalformedGroupoid(format!(
                "({:?}, {:?}) is not composable",
                aa.id, bb.id
            )));
        }
        if cc.src != bb.src || cc.tgt != aa.tgt {
            return Err(Error::MalformedGroupoid(format!(
                "{:?}·{:?} = {:?} has wrong endpoints",
                aa.id, bb.id, cc.id
            )));
        }
        let slot = &mut compose[a * n + b];
        if *slot != NONE && *slot as usize != c {
            return Err(Error::MalformedGroupoid(format!(
                "conflicting composites for ({:?}, {:?})",
                aa.id, bb.id
            )));
        }
        *slot = c as u32;
        Ok(())
    };
    for a in 0..n {
        let (s, t) = (arrows[a].src, arrows[a].tgt);
        set(unit_arrow[t], a, a)?;
        set(a, unit_arrow[s], a)?;
        set(a, arrows[a].inv, unit_arrow[t])?;
        set(arrows[a].inv, a, unit_arrow[s])?;
    }
    for [a, b, c] in &raw.compose {
        set(arrow_idx(a)?, arrow_idx(b)?, arrow_idx(c)?)?;
    }

    let mut by_range = vec![Vec::new(); units.len()];
    let mut by_source = vec![Vec::new(); units.len()];
    for (g, a) in arrows.iter().enumerate() {
        by_range[a.tgt].push(g);
        by_source[a.src].push(g);
    }
    for a in 0..n {
        for &b in &by_range[arrows[a].src] {
            if compose[a * n + b] == NONE {
                return Err(Error::MissingComposite(
                    arrows[a].id.clone(),
                    arrows[b].id.clone(),
                ));
            }
        }
    }
    let at = |a: usize, b: usize| compose[a * n + b] as usize;
    for a in 0..n {
        for &b in &by_range[arrows[a].src] {
            let ab = at(a, b);
            for &c in &by_range[arrows[b].src] {
                if at(ab, c) != at(a, at(b, c)) {
                    return Err(Error::MalformedGroupoid(format!(
                        "associativity fails on ({:?}, {:?}, {:?})",
                        arrows[a].id, arrows[b].id, arrows[c].id
                    )));
                }
            }
        }
    }

    Ok(FiniteGroupoid {
        units,
        arrows,
        unit_arrow,
        compose,
        by_range,
        by_source,
    })
}

/// Union-find over unit indices.
struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut y = x;
        while self.parent[y] != root {
            let next = self.parent[y];
            self.parent[y] = root;
            y = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller index as root so roots are orbit minima
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

/// An integer-valued 1-cocycle `c(ab) = c(a) + c(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    values: Vec<i64>,
}

impl Cocycle {
    pub fn zero(g: &FiniteGroupoid) -> Cocycle {
        Cocycle {
            values: vec![0; g.num_arrows()],
        }
    }

    /// `c(g) = p(r(g)) − p(s(g))`.
    pub fn from_potential(g: &FiniteGroupoid, potential: &[i64]) -> Cocycle {
        Cocycle {
            values: g
                .arrows()
                .iter()
                .map(|a| potential[a.tgt] - potential[a.src])
                .collect(),
        }
    }

    pub fn value(&self, g: usize) -> i64 {
        self.values[g]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Scales every value by `k`.
    pub fn scaled(&self, k: i64) -> Cocycle {
        Cocycle {
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    /// Potential `p` with `c(g) = p(r(g)) − p(s(g))`, normalized to vanish at
    /// the least unit of every orbit. Built breadth-first; every arrow is then
    /// re-checked against the result.
    pub fn potential(&self, g: &FiniteGroupoid) -> Result<Vec<i64>> {
        let mut p: Vec<Option<i64>> = vec![None; g.num_units()];
        for block in g.orbits() {
            let root = block[0];
            p[root] = Some(0);
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                let px = p[x].expect("visited");
                for &h in g.arrows_from(x) {
                    let y = g.tgt(h);
                    if p[y].is_none() {
                        p[y] = Some(px + self.values[h]);
                        queue.push_back(y);
                    }
                }
            }
        }
        let p: Vec<i64> = p
            .into_iter()
            .map(|v| v.expect("every unit reached"))
            .collect();
        for (h, a) in g.arrows().iter().enumerate() {
            if p[a.tgt] - p[a.src] != self.values[h] {
                return Err(Error::Inconsistent(format!(
                    "arrow {:?} disagrees with the orbit potential",
                    a.id
                )));
            }
        }
        Ok(p)
    }
}

/// Checks additivity on every composable pair. Unit arrows may be omitted
/// from `values` (they default to zero).
pub fn validate_cocycle(g: &FiniteGroupoid, values: &BTreeMap<String, i64>) -> Result<Cocycle> {
    let mut out = vec![None; g.num_arrows()];
    for (id, &v) in values {
        out[g.arrow_index(id)?] = Some(v);
    }
    let mut vals = Vec::with_capacity(out.len());
    for (i, v) in out.into_iter().enumerate() {
        match v {
            Some(v) => vals.push(v),
            None if g.is_unit_arrow(i) => vals.push(0),
            None => {
                return Err(Error::Schema {
                    pointer: format!("/cocycle/{}", g.arrow(i).id),
                    message: "missing cocycle value".into(),
                })
            }
        }
    }
    validate_cocycle_values(g, vals)
}

pub fn validate_cocycle_values(g: &FiniteGroupoid, values: Vec<i64>) -> Result<Cocycle> {
    if values.len() != g.num_arrows() {
        return Err(Error::Inconsistent(
            "cocycle length differs from arrow count".into(),
        ));
    }
    for a in 0..g.num_arrows() {
        for &b in g.arrows_into(g.src(a)) {
            let ab = g.compose(a, b).expect("closed");
            if values[ab] != values[a] + values[b] {
                return Err(Error::NotACocycle(
                    g.arrow(a).id.clone(),
                    g.arrow(b).id.clone(),
                ));
            }
        }
    }
    // Additivity forces zero on torsion isotropy.
    for (h, a) in g.arrows().iter().enumerate() {
        if a.src == a.tgt && values[h] != 0 {
            return Err(Error::Inconsistent(format!(
                "cocycle nonzero on isotropy arrow {:?}",
                a.id
            )));
        }
    }
    Ok(Cocycle { values })
}

/// Transformation groupoid `X ⋊ Γ`: arrows `(γ, x): x → γx`.
///
/// The arrow `(e, x)` is the unit arrow and carries the id of `x`; other
/// arrows are named `"(γ,x)"`.
#[derive(Clone, Debug)]
pub struct TransformationGroupoid {
    pub groupoid: FiniteGroupoid,
    pub group: FiniteGroup,
    pub space: Vec<String>,
    /// `action[γ][x]` is the index of `γx` in `space`.
    pub action: Vec<Vec<usize>>,
    pair_arrow: Vec<Vec<usize>>,
    space_unit: Vec<usize>,
}

impl TransformationGroupoid {
    /// Arrow index of `(γ, x)` (both given by index).
    pub fn arrow_of(&self, gamma: usize, x: usize) -> usize {
        self.pair_arrow[gamma][x]
    }

    /// Unit index of the point `x` of the space.
    pub fn unit_of(&self, x: usize) -> usize {
        self.space_unit[x]
    }

    /// Stabilizer of point `x`, as sorted group elements.
    pub fn stabilizer(&self, x: usize) -> Vec<usize> {
        self.group
            .elements()
            .filter(|&g| self.action[g][x] == x)
            .collect()
    }
}

pub fn transformation_groupoid(
    space: &[String],
    group: &FiniteGroup,
    action: &[Vec<usize>],
) -> Result<TransformationGroupoid> {
    let nx = space.len();
    if action.len() != group.order()
        || action
            .iter()
            .any(|r| r.len() != nx || r.iter().any(|&y| y >= nx))
    {
        return Err(Error::NotAnAction(
            "action table has the wrong shape".into(),
        ));
    }
    let e = group.identity();
    for x in 0..nx {
        if action[e][x] != x {
            return Err(Error::NotAnAction(format!("identity moves {:?}", space[x])));
        }
    }
    for a in group.elements() {
        for b in group.elements() {
            for x in 0..nx {
                if action[group.mul(a, b)][x] != action[a][action[b][x]] {
                    return Err(Error::NotAnAction(format!(
                        "({}·{})·{} != {}·({}·{})",
                        group.label(a),
                        group.label(b),
                        space[x],
                        group.label(a),
                        group.label(b),
                        space[x]
                    )));
                }
            }
        }
    }
    let id = |g: usize, x: usize| -> String {
        if g == e {
            space[x].clone()
        } else {
            format!("({},{})", group.label(g), space[x])
        }
    };
    let mut raw = RawGroupoid {
        units: space.to_vec(),
        ..Default::default()
    };
    for g in group.elements() {
        for x in 0..nx {
            if g == e {
                continue;
            }
            raw.arrows.push(ArrowSpec {
                id: id(g, x),
                src: space[x].clone(),
                tgt: space[action[g][x]].clone(),
                inv: Some(id(group.inv(g), action[g][x])),
            });
        }
    }
    for g2 in group.elements() {
        for g1 in group.elements() {
            for x in 0..nx {
                // (g2, g1 x)(g1, x) = (g2 g1, x)
                raw.compose
                    .push([id(g2, action[g1][x]), id(g1, x), id(group.mul(g2, g1), x)]);
            }
        }
    }
    let groupoid = validate_groupoid(&raw)?;
    let pair_arrow = group
        .elements()
        .map(|g| {
            (0..nx)
                .map(|x| groupoid.arrow_index(&id(g, x)).expect("built"))
                .collect()
        })
        .collect();
    let space_unit = space
        .iter()
        .map(|x| groupoid.unit_index(x).expect("built"))
        .collect();
    Ok(TransformationGroupoid {
        groupoid,
        group: group.clone(),
        space: space.to_vec(),
        action: action.to_vec(),
        pair_arrow,
        space_unit,
    })
}

/// Pair groupoid on the given units: one arrow `x → y` for each ordered pair,
/// named `"x>y"` off the diagonal.
pub fn pair_groupoid(units: &[&str]) -> FiniteGroupoid {
    let mut raw = RawGroupoid {
        units: units.iter().map(|u| u.to_string()).collect(),
        ..Default::default()
    };
    let id = |x: &str, y: &str| {
        if x == y {
            x.to_string()
        } else {
            format!("{x}>{y}")
        }
    };
    for x in units {
        for y in units {
            if x != y {
                raw.arrows.push(ArrowSpec {
                    id: id(x, y),
                    src: x.to_string(),
                    tgt: y.to_string(),
                    inv: Some(id(y, x)),
                });
            }
            for z in units {
                // (y→z)(x→y) = x→z
                raw.compose.push([id(y, z), id(x, y), id(x, z)]);
            }
        }
    }
    validate_groupoid(&raw).expect("pair groupoid")
}

/// A group as a one-unit groupoid; the identity becomes the unit `unit`.
pub fn group_groupoid(group: &FiniteGroup, unit: &str) -> FiniteGroupoid {
    transformation_groupoid(&[unit.to_string()], group, &vec![vec![0]; group.order()])
        .expect("trivial action")
        .groupoid
}
