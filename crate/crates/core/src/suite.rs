//! The generator suite: every action (up to isomorphism) of the groups of
//! order at most 6 on at most 5 points, a few potential cocycles per action
//! and four temperatures, each run through classification, the KMS check,
//! the oracle and the comparison.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Temperature;
use crate::characters::conjugacy_classes;
use crate::crossed::extremal_traces_enumerate;
use crate::cyclotomic::Cyclotomic;
use crate::error::Result;
use crate::group::{small, FiniteGroup};
use crate::groupoid::{transformation_groupoid, Cocycle, TransformationGroupoid};
use crate::kms::{
    check_kms, classify, compare_with_oracle, oracle_solution_space, OracleComparison, Verdict,
};
use crate::strategy::Engine;

pub const MAX_POINTS: usize = 5;
pub const TEMPERATURES: [&str; 4] = ["1/3", "1/2", "1", "2"];
/// Potentials drawn per action besides the zero cocycle.
pub const RANDOM_POTENTIALS: usize = 2;

pub fn suite_groups() -> Vec<(&'static str, FiniteGroup)> {
    vec![
        ("1", small::trivial()),
        ("Z2", small::cyclic(2)),
        ("Z3", small::cyclic(3)),
        ("Z4", small::cyclic(4)),
        ("Z2xZ2", small::klein()),
        ("Z5", small::cyclic(5)),
        ("Z6", small::cyclic(6)),
        ("S3", small::symmetric(3)),
    ]
}

/// One subgroup per conjugacy class, in `subgroups()` order.
pub fn subgroups_up_to_conjugacy(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut out = Vec::new();
    for h in g.subgroups() {
        if seen.contains(&h) {
            continue;
        }
        for x in g.elements() {
            let mut c: Vec<usize> = h.iter().map(|&k| g.conjugate(x, k)).collect();
            c.sort_unstable();
            if !seen.contains(&c) {
                seen.push(c);
            }
        }
        out.push(h);
    }
    out
}

/// Left cosets `gH` as sorted element lists, ordered by least element.
fn cosets(g: &FiniteGroup, h: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for x in g.elements() {
        let mut c: Vec<usize> = h.iter().map(|&k| g.mul(x, k)).collect();
        c.sort_unstable();
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Disjoint union of coset actions `G/H_i`; points are named `"{i}.{j}"`.
pub fn coset_action(g: &FiniteGroup, parts: &[Vec<usize>]) -> Result<TransformationGroupoid> {
    let mut space = Vec::new();
    let mut blocks = Vec::new();
    for (i, h) in parts.iter().enumerate() {
        let cs = cosets(g, h);
        blocks.push((space.len(), cs.clone()));
        space.extend((0..cs.len()).map(|j| format!("{i}.{j}")));
    }
    let action: Vec<Vec<usize>> = g
        .elements()
        .map(|gamma| {
            let mut row = Vec::with_capacity(space.len());
            for (offset, cs) in &blocks {
                for c in cs {
                    let image = g.mul(gamma, c[0]);
                    let k = cs
                        .iter()
                        .position(|d| d.contains(&image))
                        .expect("cosets partition");
                    row.push(offset + k);
                }
            }
            row
        })
        .collect();
    transformation_groupoid(&space, g, &action)
}

/// Multisets of subgroup classes with total index at most `max_points`,
/// nonempty, as nondecreasing index sequences into `classes`.
fn action_shapes(g: &FiniteGroup, classes: &[Vec<usize>], max_points: usize) -> Vec<Vec<usize>> {
    fn go(
        g: &FiniteGroup,
        classes: &[Vec<usize>],
        start: usize,
        room: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for k in start..classes.len() {
            let index = g.order() / classes[k].len();
            if index <= room {
                cur.push(k);
                go(g, classes, k, room - index, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, classes, 0, max_points, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct SuiteInstance {
    pub group_name: &'static str,
    /// Stabilizer labels of each transitive component.
    pub components: Vec<Vec<String>>,
    pub action: Arc<TransformationGroupoid>,
    pub potential: Vec<i64>,
    pub cocycle: Cocycle,
    pub q: Temperature,
}

/// Every suite instance, in a fixed order. The random potentials take values
/// in `{0, 1, 2}`, so cocycle values lie in `[-2, 2]`.
pub fn generate_suite(seed: u64) -> Result<Vec<SuiteInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let temps: Vec<Temperature> = TEMPERATURES
        .iter()
        .map(|s| Temperature::parse(s))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (name, g) in suite_groups() {
        let classes = subgroups_up_to_conjugacy(&g);
        for shape in action_shapes(&g, &classes, MAX_POINTS) {
            let parts: Vec<Vec<usize>> = shape.iter().map(|&k| classes[k].clone()).collect();
            let t = Arc::new(coset_action(&g, &parts)?);
            let components: Vec<Vec<String>> = parts
                .iter()
                .map(|h| h.iter().map(|&x| g.label(x).to_string()).collect())
                .collect();
            let n = t.space.len();
            let mut potentials = vec![vec![0; n]];
            for _ in 0..RANDOM_POTENTIALS {
                potentials.push((0..n).map(|_| rng.gen_range(0..=2i64)).collect());
            }
            for p in potentials {
                let by_unit = unit_potential(&t, &p);
                let cocycle = Cocycle::from_potential(&t.groupoid, &by_unit);
                for q in &temps {
                    out.push(SuiteInstance {
                        group_name: name,
                        components: components.clone(),
                        action: t.clone(),
                        potential: p.clone(),
                        cocycle: cocycle.clone(),
                        q: q.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Reindexes a potential on space points to the groupoid's unit order.
fn unit_potential(t: &TransformationGroupoid, p: &[i64]) -> Vec<i64> {
    let mut out = vec![0; p.len()];
    for (x, &v) in p.iter().enumerate() {
        out[t.unit_of(x)] = v;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub group: String,
    pub components: Vec<Vec<String>>,
    pub points: usize,
    pub potential: Vec<i64>,
    pub q: String,
    pub orbits: usize,
    pub principal: bool,
    pub expected_count: usize,
    /// `Σ_orbits #conjugacy classes of the isotropy`, computed without
    /// character tables.
    pub class_count: usize,
    pub states: usize,
    /// Every classified state passes the KMS check.
    pub kms_pass: bool,
    pub oracle_dimension: usize,
    pub comparison: OracleComparison,
    /// Principal instances: oracle dimension equals `#orbits - 1` and the
    /// oracle directions restrict injectively to the units.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unique_extension: Option<bool>,
    /// Abelian group, zero cocycle, `q = 1`: extreme traces from the
    /// crossed-product enumeration coincide with the classification.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abelian_traces: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.kms_pass
            && self.states == self.expected_count
            && self.expected_count == self.class_count
            && self.comparison.inclusion == Verdict::Pass
            && self.comparison.independence == Verdict::Pass
            && self.comparison.dimension != Verdict::Fail
            && self.unique_extension != Some(false)
            && self.abelian_traces != Some(false)
    }
}

fn same_functionals(a: &[Vec<Cyclotomic>], b: &[Vec<Cyclotomic>]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x)) && b.iter().all(|x| a.contains(x))
}

pub fn run_instance(inst: &SuiteInstance, engine: &Engine) -> InstanceReport {
    let t = &inst.action;
    let g = Arc::new(t.groupoid.clone());
    let mut report = InstanceReport {
        group: inst.group_name.to_string(),
        components: inst.components.clone(),
        points: t.space.len(),
        potential: inst.potential.clone(),
        q: inst.q.to_string(),
        orbits: g.orbits().len(),
        principal: g.is_principal(),
        expected_count: 0,
        class_count: 0,
        states: 0,
        kms_pass: false,
        oracle_dimension: 0,
        comparison: OracleComparison {
            inclusion: Verdict::Fail,
            outside: Vec::new(),
            hull_dimension: 0,
            oracle_dimension: 0,
            dimension: Verdict::Fail,
            independence: Verdict::Fail,
        },
        unique_extension: None,
        abelian_traces: None,
        error: None,
    };
    if let Err(e) = fill(&mut report, inst, &g, engine) {
        report.error = Some(e.to_string());
    }
    report
}

fn fill(
    report: &mut InstanceReport,
    inst: &SuiteInstance,
    g: &Arc<crate::groupoid::FiniteGroupoid>,
    engine: &Engine,
) -> Result<()> {
    let cls = classify(g, &inst.cocycle, &inst.q, engine)?;
    report.expected_count = cls.expected_count();
    report.class_count = g
        .orbits()
        .iter()
        .map(|o| {
            g.isotropy_group(o[0])
                .map(|iso| conjugacy_classes(&iso.group).len())
        })
        .sum::<Result<usize>>()?;
    report.states = cls.states.len();
    let mut kms_pass = true;
    for s in &cls.states {
        kms_pass &=
            check_kms(&s.state, &inst.cocycle, &inst.q, engine.positivity.as_ref())?.passed();
    }
    report.kms_pass = kms_pass;
    let orc = oracle_solution_space(g, &inst.cocycle, &inst.q)?;
    report.oracle_dimension = orc.dimension();
    report.comparison = compare_with_oracle(&cls, &orc, engine)?;
    if report.principal {
        report.unique_extension = Some(
            orc.dimension() + 1 == report.orbits && orc.unit_restriction_rank() == orc.dimension(),
        );
    }
    if inst.action.group.is_abelian()
        && inst.cocycle.is_zero()
        && inst.q.q() == &crate::cyclotomic::int(1)
    {
        let traces: Vec<Vec<Cyclotomic>> = extremal_traces_enumerate(&inst.action)?
            .iter()
            .map(|e| e.state.weights().to_vec())
            .collect();
        let states: Vec<Vec<Cyclotomic>> = cls
            .states
            .iter()
            .map(|s| s.state.weights().to_vec())
            .collect();
        let count: usize = g
            .orbits()
            .iter()
            .map(|o| g.isotropy_group(o[0]).map_or(0, |i| i.group.order()))
            .sum();
        report.abelian_traces = Some(same_functionals(&traces, &states) && traces.len() == count);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub instances: usize,
    pub passed: usize,
    pub principal: usize,
    pub abelian_checks: usize,
    /// Instances whose dimension verdict is `reported` rather than `pass`.
    pub dimension_reported: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub positivity: String,
    pub characters: String,
    pub summary: SuiteSummary,
    pub instances: Vec<InstanceReport>,
}

/// Runs every instance in parallel; the report does not depend on scheduling.
pub fn run_suite(engine: &Engine) -> Result<SuiteReport> {
    let instances = generate_suite(engine.seed)?;
    let reports: Vec<InstanceReport> = instances
        .par_iter()
        .map(|i| run_instance(i, engine))
        .collect();
    let summary = SuiteSummary {
        instances: reports.len(),
        passed: reports.iter().filter(|r| r.passed()).count(),
        principal: reports.iter().filter(|r| r.principal).count(),
        abelian_checks: reports
            .iter()
            .filter(|r| r.abelian_traces.is_some())
            .count(),
        dimension_reported: reports
            .iter()
            .filter(|r| r.comparison.dimension == Verdict::Reported)
            .count(),
    };
    Ok(SuiteReport {
        seed: engine.seed,
        positivity: engine.positivity.name().to_string(),
        characters: engine.characters.name().to_string(),
        summary,
        instances: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_actions() {
        let s3 = small::symmetric(3);
        let classes = subgroups_up_to_conjugacy(&s3);
        // 1, C2, C3, S3
        assert_eq!(
            classes.iter().map(Vec::len).collect::<Vec<_>>(),
            vec![1, 2, 3, 6]
        );
        let shapes = action_shapes(&s3, &classes, 5);
        assert!(shapes
            .iter()
            .all(|s| s.iter().map(|&k| 6 / classes[k].len()).sum::<usize>() <= 5));
        let natural = coset_action(&s3, &[classes[1].clone()]).unwrap();
        assert_eq!(natural.space.len(), 3);
        assert_eq!(natural.groupoid.orbits().len(), 1);
        let z4 = small::cyclic(4);
        assert_eq!(subgroups_up_to_conjugacy(&z4).len(), 3);
    }

    #[test]
    fn small_slice_passes() {
        let engine = Engine::default();
        let all = generate_suite(engine.seed).unwrap();
        for inst in all.iter().filter(|i| {
            i.group_name == "S3" && i.action.space.len() == 3 && i.components.len() == 1
        }) {
            let r = run_instance(inst, &engine);
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.states, 2);
        }
    }
}
