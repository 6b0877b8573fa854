//! KMS states: construction from measures and fields of traces, the exact
//! KMS check, classification of extreme states, and an independent linear
//! oracle.

use std::collections::HashSet;
use std::fmt::Display;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{Functional, Temperature};
use crate::characters::{CharacterTable, ClassFunction};
use crate::cyclotomic::{rat, Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::groupoid::{Cocycle, FiniteGroupoid};
use crate::linalg::{rank, solve_affine, EchelonBasis};
use crate::measure::{quasi_invariant_polytope, MeasurePolytope, UnitMeasure};
use crate::positivity::{PositivityMethod, PositivityReport};
use crate::scalar::Scalar;
use crate::strategy::Engine;

/// States `φ_y` on the isotropy groups, for every unit of every orbit that
/// was given a representative trace.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldOfTraces {
    /// `states[y]` lists `(isotropy arrow at y, φ_y(u_g))`.
    pub states: Vec<Option<Vec<(usize, Cyclotomic)>>>,
}

impl FieldOfTraces {
    pub fn value(&self, y: usize, g: usize) -> Option<&Cyclotomic> {
        self.states[y]
            .as_ref()?
            .iter()
            .find(|(h, _)| *h == g)
            .map(|(_, v)| v)
    }

    pub fn is_empty(&self) -> bool {
        self.states.iter().all(Option::is_none)
    }
}

/// Extends each representative trace along its orbit by
/// `φ_y(u_g) = φ_x(u_{h⁻¹gh})` for an arrow `h: x → y`, checking that every
/// connecting arrow gives the same answer.
pub fn propagate_traces(
    g: &FiniteGroupoid,
    reps: &[(usize, ClassFunction)],
) -> Result<FieldOfTraces> {
    let orbit_of = g.orbit_of();
    let mut states: Vec<Option<Vec<(usize, Cyclotomic)>>> = vec![None; g.num_units()];
    let mut used = HashSet::new();
    for (x, tau) in reps {
        let x = *x;
        if x >= g.num_units() {
            return Err(Error::UnknownUnit(x.to_string()));
        }
        if !used.insert(orbit_of[x]) {
            return Err(Error::Inconsistent(format!(
                "two representatives given for the orbit of {:?}",
                g.units()[x]
            )));
        }
        let iso = g.isotropy_group(x)?;
        if tau.values.len() != iso.group.order() {
            return Err(Error::TraceOnWrongGroup(format!(
                "trace has {} values but the isotropy group at {:?} has order {}",
                tau.values.len(),
                g.units()[x],
                iso.group.order()
            )));
        }
        let at_x = |arrow: usize| -> &Cyclotomic {
            &tau.values[iso.element_of(arrow).expect("isotropy arrow")]
        };
        for y in (0..g.num_units()).filter(|&y| orbit_of[y] == orbit_of[x]) {
            let connecting: Vec<usize> = g
                .arrows_from(x)
                .iter()
                .copied()
                .filter(|&h| g.tgt(h) == y)
                .collect();
            let h0 = connecting[0];
            let mut values = Vec::new();
            for k in g.isotropy_arrows(y) {
                let conj = |h: usize| {
                    let hk = g.compose(g.inv(h), k).expect("composable");
                    g.compose(hk, h).expect("composable")
                };
                let v = at_x(conj(h0)).clone();
                if let Some(&h) = connecting.iter().find(|&&h| *at_x(conj(h)) != v) {
                    return Err(Error::TraceOnWrongGroup(format!(
                        "trace at {:?} is not a class function: arrows {:?} and {:?} disagree",
                        g.units()[x],
                        g.arrow(h0).id,
                        g.arrow(h).id
                    )));
                }
                values.push((k, v));
            }
            states[y] = Some(values);
        }
    }
    Ok(FieldOfTraces { states })
}

/// `w(g) = μ(x) φ_x(u_g)` on isotropy at `x`, `w(x) = μ(x)`, 0 elsewhere.
pub fn construct_kms_state(
    g: &Arc<FiniteGroupoid>,
    mu: &UnitMeasure,
    field: &FieldOfTraces,
) -> Result<Functional<Cyclotomic>> {
    let orbit_of = g.orbit_of();
    let mut w = Functional::zero(g);
    for x in 0..g.num_units() {
        let m = &mu.weights[x];
        if m.is_zero() {
            continue;
        }
        let mass = Cyclotomic::from_rational(m.clone());
        w.set(g.unit_arrow(x), mass.clone());
        for k in g.isotropy_arrows(x) {
            if g.is_unit_arrow(k) {
                continue;
            }
            let v = field.value(x, k).ok_or(Error::MissingTrace(orbit_of[x]))?;
            w.set(k, mass.clone() * v.clone());
        }
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `[s(a)=r(b)] w(ab) ≠ q^{c(a)} [s(b)=r(a)] w(ba)`.
    Pair {
        a: String,
        b: String,
        lhs: String,
        rhs: String,
    },
    Arrow {
        arrow: String,
        value: String,
    },
    Mass {
        total: String,
    },
    Positivity {
        report: PositivityReport,
    },
    NotHermitian,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Condition {
    fn ok() -> Self {
        Condition {
            pass: true,
            witness: None,
        }
    }

    fn fail(w: Witness) -> Self {
        Condition {
            pass: false,
            witness: Some(w),
        }
    }
}

/// Per-condition verdicts of [`check_kms`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmsDiagnostic {
    pub linear: Condition,
    pub normalized: Condition,
    pub hermitian: Condition,
    pub positive: Condition,
    /// Vanishing on isotropy arrows with `c ≠ 0`; cocycles of a finite
    /// groupoid vanish on isotropy, so this never fails for valid input.
    pub isotropy: Condition,
}

impl KmsDiagnostic {
    pub fn passed(&self) -> bool {
        self.linear.pass
            && self.normalized.pass
            && self.hermitian.pass
            && self.positive.pass
            && self.isotropy.pass
    }
}

/// Checks (L) `[s(a)=r(b)] w(ab) = q^{c(a)} [s(b)=r(a)] w(ba)` on every pair
/// of arrows, normalization, hermitian symmetry, positivity and vanishing on
/// isotropy with nonzero cocycle.
pub fn check_kms<S: Scalar + Display>(
    w: &Functional<S>,
    c: &Cocycle,
    q: &Temperature,
    method: &dyn PositivityMethod,
) -> Result<KmsDiagnostic> {
    let g = w.groupoid();
    let n = g.num_arrows();
    if c.values().len() != n {
        return Err(Error::GroupoidMismatch);
    }
    let mut linear = Condition::ok();
    'pairs: for a in 0..n {
        let factor = S::from_rational(&q.pow(c.value(a)));
        for b in 0..n {
            let lhs = g
                .compose(a, b)
                .map_or_else(S::zero, |ab| w.weight(ab).clone());
            let rhs = g
                .compose(b, a)
                .map_or_else(S::zero, |ba| factor.clone() * w.weight(ba).clone());
            if !lhs.approx_eq(&rhs) {
                linear = Condition::fail(Witness::Pair {
                    a: g.arrow(a).id.clone(),
                    b: g.arrow(b).id.clone(),
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
                break 'pairs;
            }
        }
    }
    let total = w.unit_mass();
    let normalized = if total.approx_eq(&S::one()) {
        Condition::ok()
    } else {
        Condition::fail(Witness::Mass {
            total: total.to_string(),
        })
    };
    let hermitian = match w.hermitian_defect() {
        None => Condition::ok(),
        Some(h) => Condition::fail(Witness::Arrow {
            arrow: g.arrow(h).id.clone(),
            value: w.weight(h).to_string(),
        }),
    };
    let positive = if hermitian.pass {
        let report = w.is_positive(method)?;
        if report.positive {
            Condition::ok()
        } else {
            Condition::fail(Witness::Positivity { report })
        }
    } else {
        Condition::fail(Witness::NotHermitian)
    };
    let isotropy =
        match (0..n).find(|&h| g.is_isotropy(h) && c.value(h) != 0 && !w.weight(h).is_zero()) {
            None => Condition::ok(),
            Some(h) => Condition::fail(Witness::Arrow {
                arrow: g.arrow(h).id.clone(),
                value: w.weight(h).to_string(),
            }),
        };
    Ok(KmsDiagnostic {
        linear,
        normalized,
        hermitian,
        positive,
        isotropy,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitInfo {
    pub units: Vec<usize>,
    pub representative: usize,
    pub isotropy_order: usize,
    /// Character table of the representative's isotropy group, when it is
    /// nontrivial.
    pub table: Option<CharacterTable>,
}

impl OrbitInfo {
    pub fn num_extreme_traces(&self) -> usize {
        self.table
            .as_ref()
            .map_or(1, CharacterTable::num_characters)
    }
}

/// An extreme KMS state with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeState {
    pub orbit: usize,
    pub representative: usize,
    /// Index into the representative's character table (0 when the
    /// isotropy is trivial).
    pub character: usize,
    pub degree: u64,
    pub state: Functional<Cyclotomic>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KmsClassification {
    pub groupoid: Arc<FiniteGroupoid>,
    pub cocycle: Cocycle,
    pub q: Temperature,
    pub polytope: MeasurePolytope,
    pub orbits: Vec<OrbitInfo>,
    pub states: Vec<ExtremeState>,
}

/// Extreme states: for each orbit, the Gibbs vertex paired with each
/// normalized irreducible character of the representative's isotropy group.
/// Representatives are the least unit of each orbit.
pub fn classify(
    g: &Arc<FiniteGroupoid>,
    c: &Cocycle,
    q: &Temperature,
    engine: &Engine,
) -> Result<KmsClassification> {
    let reps: Vec<usize> = g.orbits().iter().map(|o| o[0]).collect();
    classify_with_representatives(g, c, q, engine, &reps)
}

/// As [`classify`], with one chosen representative per orbit (in orbit order).
pub fn classify_with_representatives(
    g: &Arc<FiniteGroupoid>,
    c: &Cocycle,
    q: &Temperature,
    engine: &Engine,
    reps: &[usize],
) -> Result<KmsClassification> {
    let polytope = quasi_invariant_polytope(g, c, q)?;
    if reps.len() != polytope.orbits.len() {
        return Err(Error::Inconsistent(
            "one representative per orbit is required".into(),
        ));
    }
    let mut orbits = Vec::new();
    let mut states = Vec::new();
    for (k, (block, &x)) in polytope.orbits.iter().zip(reps).enumerate() {
        if !block.contains(&x) {
            return Err(Error::Inconsistent(format!(
                "{:?} does not lie in orbit {k}",
                g.units().get(x).map_or("?", String::as_str)
            )));
        }
        let iso = g.isotropy_group(x)?;
        let mu = &polytope.vertices[k];
        let table = if iso.group.order() > 1 {
            Some(engine.characters.table(&iso.group, engine.seed)?)
        } else {
            None
        };
        match &table {
            None => states.push(ExtremeState {
                orbit: k,
                representative: x,
                character: 0,
                degree: 1,
                state: construct_kms_state(
                    g,
                    mu,
                    &FieldOfTraces {
                        states: vec![None; g.num_units()],
                    },
                )?,
            }),
            Some(t) => {
                for (i, tau) in t.tracial_extreme_points().into_iter().enumerate() {
                    let field = propagate_traces(g, &[(x, tau)])?;
                    states.push(ExtremeState {
                        orbit: k,
                        representative: x,
                        character: i,
                        degree: t.degrees[i],
                        state: construct_kms_state(g, mu, &field)?,
                    });
                }
            }
        }
        orbits.push(OrbitInfo {
            units: block.clone(),
            representative: x,
            isotropy_order: iso.group.order(),
            table,
        });
    }
    Ok(KmsClassification {
        groupoid: g.clone(),
        cocycle: c.clone(),
        q: q.clone(),
        polytope,
        orbits,
        states,
    })
}

impl KmsClassification {
    /// Σ over orbits of the number of irreducible characters.
    pub fn expected_count(&self) -> usize {
        self.orbits.iter().map(OrbitInfo::num_extreme_traces).sum()
    }
}

/// Real affine space of hermitian normalized functionals satisfying (L):
/// `point + Σ t_k directions[k]`, `t_k ∈ ℝ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub groupoid: Arc<FiniteGroupoid>,
    pub cocycle: Cocycle,
    pub q: Temperature,
    pub point: Functional<Cyclotomic>,
    pub directions: Vec<Functional<Cyclotomic>>,
}

impl OracleSolution {
    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    /// Rank of the directions restricted to the unit arrows.
    pub fn unit_restriction_rank(&self) -> usize {
        let g = &self.groupoid;
        let rows: Vec<Vec<Cyclotomic>> = self
            .directions
            .iter()
            .map(|d| {
                (0..g.num_units())
                    .map(|x| d.weight(g.unit_arrow(x)).clone())
                    .collect()
            })
            .collect();
        rank(&rows)
    }

    /// Exact membership in the affine space.
    pub fn contains(&self, w: &Functional<Cyclotomic>) -> bool {
        if w.groupoid() != &self.groupoid {
            return false;
        }
        let span = real_span(&self.directions);
        span.contains(&realify(&difference(w, &self.point)))
    }
}

/// Solves the linear KMS system directly on the arrow basis, independently
/// of the measure/trace parametrization. Real and imaginary parts separate
/// because every coefficient is rational.
pub fn oracle_solution_space(
    g: &Arc<FiniteGroupoid>,
    c: &Cocycle,
    q: &Temperature,
) -> Result<OracleSolution> {
    let n = g.num_arrows();
    if c.values().len() != n {
        return Err(Error::GroupoidMismatch);
    }
    let one = Rational::one();
    let mut linear = EchelonBasis::<Rational>::new(n + 1);
    let mut seen = HashSet::new();
    for a in 0..n {
        let k = c.value(a);
        for b in 0..n {
            let ab = g.compose(a, b);
            let ba = g.compose(b, a);
            if ab.is_none() && ba.is_none() {
                continue;
            }
            if !seen.insert((ab, ba, k)) {
                continue;
            }
            let mut row = vec![Rational::zero(); n + 1];
            if let Some(ab) = ab {
                row[ab] += &one;
            }
            if let Some(ba) = ba {
                row[ba] -= q.pow(k);
            }
            linear.insert(&row);
        }
    }
    let mut re = linear.clone();
    let mut im = linear;
    for h in 0..n {
        let hi = g.inv(h);
        if hi <= h {
            continue;
        }
        let mut row = vec![Rational::zero(); n + 1];
        row[h] = one.clone();
        row[hi] = -one.clone();
        re.insert(&row);
        row[hi] = one.clone();
        im.insert(&row);
    }
    // Hermitian diagonal entries g = g⁻¹ have real weights.
    for h in (0..n).filter(|&h| g.inv(h) == h) {
        let mut row = vec![Rational::zero(); n + 1];
        row[h] = one.clone();
        im.insert(&row);
    }
    let mut norm = vec![Rational::zero(); n + 1];
    for x in 0..g.num_units() {
        norm[g.unit_arrow(x)] = one.clone();
    }
    im.insert(&norm);
    norm[n] = one.clone();
    re.insert(&norm);

    let (re_point, re_dirs) = solve_affine(&re)
        .ok_or_else(|| Error::Inconsistent("no normalized hermitian solution".into()))?;
    let (_, im_dirs) = solve_affine(&im).expect("homogeneous system");
    let as_functional = |v: &[Rational], imaginary: bool| {
        let weights = v
            .iter()
            .map(|x| {
                if imaginary {
                    Cyclotomic::gaussian(Rational::zero(), x.clone())
                } else {
                    Cyclotomic::from_rational(x.clone())
                }
            })
            .collect();
        Functional::new(g, weights).expect("sized")
    };
    let mut directions: Vec<Functional<Cyclotomic>> =
        re_dirs.iter().map(|d| as_functional(d, false)).collect();
    directions.extend(im_dirs.iter().map(|d| as_functional(d, true)));
    Ok(OracleSolution {
        groupoid: g.clone(),
        cocycle: c.clone(),
        q: q.clone(),
        point: as_functional(&re_point, false),
        directions,
    })
}

fn difference(a: &Functional<Cyclotomic>, b: &Functional<Cyclotomic>) -> Functional<Cyclotomic> {
    let weights = a
        .weights()
        .iter()
        .zip(b.weights())
        .map(|(x, y)| x.clone() - y.clone())
        .collect();
    Functional::new(a.groupoid(), weights).expect("same groupoid")
}

/// Coordinates `(Re w(g))_g ++ (Im w(g))_g`.
fn realify(w: &Functional<Cyclotomic>) -> Vec<Cyclotomic> {
    w.weights()
        .iter()
        .map(Cyclotomic::re)
        .chain(w.weights().iter().map(Cyclotomic::im))
        .collect()
}

fn real_span(vs: &[Functional<Cyclotomic>]) -> EchelonBasis<Cyclotomic> {
    let n = vs.first().map_or(0, |v| 2 * v.weights().len());
    let mut basis = EchelonBasis::new(n);
    for v in vs {
        basis.insert(&realify(v));
    }
    basis
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Dimensions differ but the oracle's generic element is not PSD, so
    /// positivity may cut the dimension; not counted as a pass.
    Reported,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    /// Every classified extreme state lies in the oracle space.
    pub inclusion: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outside: Vec<usize>,
    pub hull_dimension: usize,
    pub oracle_dimension: usize,
    pub dimension: Verdict,
    /// Classified extremes are affinely independent.
    pub independence: Verdict,
}

impl OracleComparison {
    pub fn passed(&self) -> bool {
        self.inclusion == Verdict::Pass
            && self.dimension == Verdict::Pass
            && self.independence == Verdict::Pass
    }
}

/// Compares a classification with the oracle for the same instance.
pub fn compare_with_oracle(
    cls: &KmsClassification,
    orc: &OracleSolution,
    engine: &Engine,
) -> Result<OracleComparison> {
    if cls.groupoid != orc.groupoid || cls.cocycle != orc.cocycle || cls.q != orc.q {
        return Err(Error::InstanceMismatch);
    }
    let span = real_span(&orc.directions);
    let outside: Vec<usize> = cls
        .states
        .iter()
        .enumerate()
        .filter(|(_, s)| !span.contains(&realify(&difference(&s.state, &orc.point))))
        .map(|(i, _)| i)
        .collect();
    let inclusion = if outside.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };

    let base = &cls.states[0].state;
    let diffs: Vec<Functional<Cyclotomic>> = cls.states[1..]
        .iter()
        .map(|s| difference(&s.state, base))
        .collect();
    let hull = real_span(&diffs);
    let hull_dimension = if diffs.is_empty() { 0 } else { hull.rank() };
    let independence = if hull_dimension == cls.states.len() - 1 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let oracle_dimension = orc.dimension();
    let dimension = if hull_dimension == oracle_dimension {
        Verdict::Pass
    } else if generic_element_is_feasible(cls, orc, engine)? {
        Verdict::Fail
    } else {
        Verdict::Reported
    };
    Ok(OracleComparison {
        inclusion,
        outside,
        hull_dimension,
        oracle_dimension,
        dimension,
        independence,
    })
}

/// Probes whether the barycenter of the classified extremes, pushed a small
/// step along every oracle direction, is still positive.
fn generic_element_is_feasible(
    cls: &KmsClassification,
    orc: &OracleSolution,
    engine: &Engine,
) -> Result<bool> {
    let g = &cls.groupoid;
    let k = cls.states.len() as i64;
    let mut bary = vec![Cyclotomic::zero(); g.num_arrows()];
    for s in &cls.states {
        for (b, w) in bary.iter_mut().zip(s.state.weights()) {
            *b = b.clone() + w.clone() * Cyclotomic::from_rational(rat(1, k));
        }
    }
    let mut push = vec![Cyclotomic::zero(); g.num_arrows()];
    for (i, d) in orc.directions.iter().enumerate() {
        for (p, w) in push.iter_mut().zip(d.weights()) {
            *p = p.clone() + w.clone() * Cyclotomic::from_int(i as i64 + 1);
        }
    }
    for e in 2..=6 {
        let eps = Cyclotomic::from_rational(rat(1, 10i64.pow(e)));
        let weights = bary
            .iter()
            .zip(&push)
            .map(|(b, p)| b.clone() + eps.clone() * p.clone())
            .collect();
        let probe = Functional::new(g, weights)?;
        if probe.is_positive(engine.positivity.as_ref())?.positive {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Converts an exact functional to float weights.
pub fn to_float(w: &Functional<Cyclotomic>) -> Functional<crate::scalar::C64> {
    Functional::new(
        w.groupoid(),
        w.weights().iter().map(Scalar::to_c64).collect(),
    )
    .expect("same size")
}
