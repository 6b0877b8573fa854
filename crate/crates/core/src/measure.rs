//! Probability measures on the units that are quasi-invariant with
//! Radon–Nikodym cocycle `q^c`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::Temperature;
use crate::cyclotomic::{format_rational, Rational};
use crate::error::Result;
use crate::groupoid::{Cocycle, FiniteGroupoid};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitMeasure {
    pub weights: Vec<Rational>,
}

impl UnitMeasure {
    pub fn total(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |a, w| a + w)
    }

    pub fn is_probability(&self) -> bool {
        self.total().is_one() && self.weights.iter().all(|w| *w >= Rational::zero())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&x| !self.weights[x].is_zero())
            .collect()
    }

    /// Convex combination `Σ λ_k μ_k`.
    pub fn mix(parts: &[(Rational, &UnitMeasure)]) -> UnitMeasure {
        let n = parts.first().map_or(0, |p| p.1.weights.len());
        let mut weights = vec![Rational::zero(); n];
        for (l, m) in parts {
            for (w, v) in weights.iter_mut().zip(&m.weights) {
                *w += l * v;
            }
        }
        UnitMeasure { weights }
    }
}

/// Vertex `k` is the unique quasi-invariant probability measure supported
/// on orbit `k`; the full solution set is their convex hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurePolytope {
    pub vertices: Vec<UnitMeasure>,
    pub orbits: Vec<Vec<usize>>,
}

pub fn quasi_invariant_polytope(
    g: &FiniteGroupoid,
    c: &Cocycle,
    q: &Temperature,
) -> Result<MeasurePolytope> {
    let potential = c.potential(g)?;
    let orbits = g.orbits();
    let vertices = orbits
        .iter()
        .map(|block| {
            let mut weights = vec![Rational::zero(); g.num_units()];
            for &y in block {
                weights[y] = q.pow(potential[y]);
            }
            let total: Rational = block.iter().map(|&y| weights[y].clone()).sum();
            for &y in block {
                weights[y] /= &total;
            }
            UnitMeasure { weights }
        })
        .collect();
    Ok(MeasurePolytope { vertices, orbits })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadonNikodymViolation {
    pub arrow: String,
    pub range_mass: String,
    pub expected: String,
}

/// Checks `μ(r(g)) = q^{c(g)} μ(s(g))` for every arrow.
pub fn check_radon_nikodym(
    g: &FiniteGroupoid,
    mu: &UnitMeasure,
    c: &Cocycle,
    q: &Temperature,
) -> std::result::Result<(), RadonNikodymViolation> {
    for (h, a) in g.arrows().iter().enumerate() {
        let expected = q.pow(c.value(h)) * &mu.weights[a.src];
        if mu.weights[a.tgt] != expected {
            return Err(RadonNikodymViolation {
                arrow: a.id.clone(),
                range_mass: format_rational(&mu.weights[a.tgt]),
                expected: format_rational(&expected),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::rat;
    use crate::group::small;
    use crate::groupoid::{group_groupoid, pair_groupoid, validate_cocycle, RawGroupoid};
    use std::collections::BTreeMap;

    fn pair_instance() -> (FiniteGroupoid, Cocycle) {
        let g = pair_groupoid(&["x", "y"]);
        let v: BTreeMap<String, i64> = [("x>y".into(), 1), ("y>x".into(), -1)].into();
        let c = validate_cocycle(&g, &v).unwrap();
        (g, c)
    }

    #[test]
    fn pair_groupoid_gibbs_vertex() {
        let (g, c) = pair_instance();
        let q = Temperature::parse("1/2").unwrap();
        let p = quasi_invariant_polytope(&g, &c, &q).unwrap();
        assert_eq!(p.vertices.len(), 1);
        // oracle: μ(y) = μ(x)/2 and μ(x) + μ(y) = 1
        assert_eq!(p.vertices[0].weights, vec![rat(2, 3), rat(1, 3)]);
        assert!(check_radon_nikodym(&g, &p.vertices[0], &c, &q).is_ok());
        let flat = UnitMeasure {
            weights: vec![rat(1, 2), rat(1, 2)],
        };
        let err = check_radon_nikodym(&g, &flat, &c, &q).unwrap_err();
        assert_eq!(err.arrow, "x>y");
    }

    #[test]
    fn uniform_at_q_one_and_orbit_count() {
        let (g, _) = pair_instance();
        let g = g
            .disjoint_union(&group_groupoid(&small::cyclic(2), "p"), "", "")
            .unwrap();
        let c = crate::groupoid::validate_cocycle_values(
            &g,
            g.arrows()
                .iter()
                .map(|a| match a.id.as_str() {
                    "x>y" => 1,
                    "y>x" => -1,
                    _ => 0,
                })
                .collect(),
        )
        .unwrap();
        let p = quasi_invariant_polytope(&g, &c, &Temperature::parse("1").unwrap()).unwrap();
        assert_eq!(p.vertices.len(), 2);
        for (v, block) in p.vertices.iter().zip(&p.orbits) {
            assert!(v.is_probability());
            for &x in block {
                assert_eq!(v.weights[x], rat(1, block.len() as i64));
            }
        }
    }

    #[test]
    fn units_only_is_vacuous() {
        let raw = RawGroupoid {
            units: vec!["a".into(), "b".into(), "c".into()],
            ..Default::default()
        };
        let g = crate::groupoid::validate_groupoid(&raw).unwrap();
        let mu = UnitMeasure {
            weights: vec![rat(1, 5), rat(3, 5), rat(1, 5)],
        };
        assert!(check_radon_nikodym(
            &g,
            &mu,
            &Cocycle::zero(&g),
            &Temperature::parse("2").unwrap()
        )
        .is_ok());
    }

    #[test]
    fn scaling_coherence() {
        let (g, c) = pair_instance();
        let q = Temperature::parse("1/4").unwrap();
        let r = Temperature::parse("1/2").unwrap();
        assert_eq!(
            quasi_invariant_polytope(&g, &c, &q).unwrap(),
            quasi_invariant_polytope(&g, &c.scaled(2), &r).unwrap()
        );
    }
}
