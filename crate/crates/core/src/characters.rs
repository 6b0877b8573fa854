//! Conjugacy classes, character tables and tracial states of finite groups.

use nalgebra::DMatrix;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclotomic::{rat, Cyclotomic};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{solve_affine, EchelonBasis};
use crate::positivity::{PositivityMethod, PositivityReport};
use crate::scalar::{MomentBlocks, C64};
use crate::snf::smith_normal_form;
use crate::strategy::Named;

/// Conjugacy classes; the identity's class comes first, the rest ordered by
/// least element.
pub fn conjugacy_classes(group: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut seen = vec![false; group.order()];
    let mut classes = Vec::new();
    let e = group.identity();
    for g in std::iter::once(e).chain(group.elements()) {
        if seen[g] {
            continue;
        }
        let mut class: Vec<usize> = group.elements().map(|h| group.conjugate(h, g)).collect();
        class.sort_unstable();
        class.dedup();
        for &x in &class {
            seen[x] = true;
        }
        classes.push(class);
    }
    classes
}

/// Class-constant function on a group, stored per element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassFunction {
    pub values: Vec<Cyclotomic>,
}

impl ClassFunction {
    pub fn value(&self, g: usize) -> &Cyclotomic {
        &self.values[g]
    }

    /// The canonical trace `δ_e`.
    pub fn canonical_trace(group: &FiniteGroup) -> Self {
        ClassFunction {
            values: group
                .elements()
                .map(|g| Cyclotomic::from_int(i64::from(g == group.identity())))
                .collect(),
        }
    }

    pub fn scale(&self, k: &Cyclotomic) -> Self {
        ClassFunction {
            values: self.values.iter().map(|v| k.clone() * v.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        ClassFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// `φ ∘ α` for a permutation `α` of the elements.
    pub fn precompose(&self, perm: &[usize]) -> Self {
        ClassFunction {
            values: perm.iter().map(|&g| self.values[g].clone()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterTable {
    pub classes: Vec<Vec<usize>>,
    #[serde(skip)]
    pub class_of: Vec<usize>,
    /// `characters[i][k]` is `χ_i` on class `k`.
    pub characters: Vec<Vec<Cyclotomic>>,
    pub degrees: Vec<u64>,
    pub method: &'static str,
    /// Largest deviation of the float stage from the exact table (0 when
    /// the method is exact throughout).
    pub float_residual: f64,
}

impl CharacterTable {
    fn assemble(
        group: &FiniteGroup,
        classes: Vec<Vec<usize>>,
        mut characters: Vec<Vec<Cyclotomic>>,
        method: &'static str,
        float_residual: f64,
    ) -> Result<Self> {
        let mut class_of = vec![0; group.order()];
        for (k, c) in classes.iter().enumerate() {
            for &g in c {
                class_of[g] = k;
            }
        }
        characters.sort_by_cached_key(|row| canonical_key(row));
        let degrees = characters
            .iter()
            .map(|row| {
                row[0]
                    .to_rational()
                    .and_then(|d| d.is_integer().then(|| d.to_integer()))
                    .and_then(|d| u64::try_from(d).ok())
                    .ok_or_else(|| Error::VerificationFailed("non-integral degree".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let table = CharacterTable {
            classes,
            class_of,
            characters,
            degrees,
            method,
            float_residual,
        };
        table.verify()?;
        Ok(table)
    }

    pub fn num_characters(&self) -> usize {
        self.characters.len()
    }

    pub fn value(&self, i: usize, g: usize) -> &Cyclotomic {
        &self.characters[i][self.class_of[g]]
    }

    pub fn group_order(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    /// Exact row and column orthogonality and `Σ d_i² = |Γ|`.
    pub fn verify(&self) -> Result<()> {
        let n = self.group_order();
        let r = self.classes.len();
        if self.characters.len() != r {
            return Err(Error::VerificationFailed(format!(
                "{} characters for {r} classes",
                self.characters.len()
            )));
        }
        let sum_sq: u64 = self.degrees.iter().map(|d| d * d).sum();
        if sum_sq as usize != n {
            return Err(Error::VerificationFailed(format!("Σd² = {sum_sq} ≠ {n}")));
        }
        for i in 0..r {
            for j in i..r {
                let mut acc = Cyclotomic::zero();
                for (k, c) in self.classes.iter().enumerate() {
                    acc = acc
                        + Cyclotomic::from_int(c.len() as i64)
                            * self.characters[i][k].clone()
                            * self.characters[j][k].conj();
                }
                let want = Cyclotomic::from_int(if i == j { n as i64 } else { 0 });
                if acc != want {
                    return Err(Error::VerificationFailed(format!(
                        "rows {i}, {j} not orthogonal"
                    )));
                }
            }
        }
        for k in 0..r {
            for l in k..r {
                let mut acc = Cyclotomic::zero();
                for row in &self.characters {
                    acc = acc + row[k].clone() * row[l].conj();
                }
                let want = if k == l {
                    Cyclotomic::from_rational(rat(n as i64, self.classes[k].len() as i64))
                } else {
                    Cyclotomic::zero()
                };
                if acc != want {
                    return Err(Error::VerificationFailed(format!(
                        "columns {k}, {l} not orthogonal"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest float residual of the orthogonality relations.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.group_order() as f64;
        let r = self.classes.len();
        let f: Vec<Vec<C64>> = self
            .characters
            .iter()
            .map(|row| row.iter().map(|v| v.to_c64()).collect())
            .collect();
        let mut worst: f64 = 0.0;
        for i in 0..r {
            for j in 0..r {
                let s: C64 = (0..r)
                    .map(|k| f[i][k] * f[j][k].conj() * self.classes[k].len() as f64)
                    .sum();
                let want = if i == j { n } else { 0.0 };
                worst = worst.max((s - want).norm() / n);
            }
        }
        worst
    }

    pub fn character(&self, i: usize) -> ClassFunction {
        ClassFunction {
            values: self
                .class_of
                .iter()
                .map(|&k| self.characters[i][k].clone())
                .collect(),
        }
    }

    /// Normalized irreducible characters `χ_i / d_i`.
    pub fn tracial_extreme_points(&self) -> Vec<ClassFunction> {
        (0..self.num_characters())
            .map(|i| {
                self.character(i)
                    .scale(&Cyclotomic::from_rational(rat(1, self.degrees[i] as i64)))
            })
            .collect()
    }

    /// Coefficients `c_i` with `φ = Σ c_i χ_i/d_i`, via `c_i = d_i ⟨φ, χ_i⟩`.
    pub fn decompose(&self, phi: &ClassFunction) -> Vec<Cyclotomic> {
        let n = self.group_order() as i64;
        (0..self.num_characters())
            .map(|i| {
                let mut acc = Cyclotomic::zero();
                for (g, v) in phi.values.iter().enumerate() {
                    acc = acc + v.clone() * self.value(i, g).conj();
                }
                acc * Cyclotomic::from_rational(rat(self.degrees[i] as i64, n))
            })
            .collect()
    }
}

/// Sort key: degree first, then values in decreasing order of their complex
/// embedding, so the trivial character leads.
fn canonical_key(row: &[Cyclotomic]) -> Vec<(i64, i64)> {
    let q = |x: f64| (x * 1e9).round() as i64;
    let d = row[0].to_c64();
    std::iter::once((q(d.re), 0))
        .chain(row.iter().map(|v| {
            let z = v.to_c64();
            (-q(z.re), -q(z.im))
        }))
        .collect()
}

/// Builds a character table.
pub trait CharacterMethod: Named + Send + Sync {
    fn table(&self, group: &FiniteGroup, seed: u64) -> Result<CharacterTable>;
}

/// Burnside's method: simultaneous eigenvectors of the class-sum matrices
/// (split by a seeded random combination), followed by exact reconstruction
/// of each value from its eigenvalue multiplicities.
pub struct BurnsideCharacters;

impl Named for BurnsideCharacters {
    fn name(&self) -> &'static str {
        "burnside"
    }
}

const ATTEMPTS: u64 = 8;

impl CharacterMethod for BurnsideCharacters {
    fn table(&self, group: &FiniteGroup, seed: u64) -> Result<CharacterTable> {
        let classes = conjugacy_classes(group);
        let mut class_of = vec![0; group.order()];
        for (k, c) in classes.iter().enumerate() {
            for &g in c {
                class_of[g] = k;
            }
        }
        let consts = structure_constants(group, &classes, &class_of);
        let mut last = Error::VerificationFailed("no attempt made".into());
        for attempt in 0..ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
            let Some(omegas) = burnside_eigenvectors(&consts, &mut rng) else {
                last = Error::VerificationFailed("degenerate eigenvalues".into());
                continue;
            };
            match reconstruct(group, &classes, &class_of, &omegas) {
                Ok((chars, residual)) => {
                    return CharacterTable::assemble(group, classes, chars, self.name(), residual)
                }
                Err(e) => last = e,
            }
        }
        Err(last)
    }
}

/// `a[j][k][l]`: number of `(x, y) ∈ C_j × C_k` with `xy = z` for fixed `z ∈ C_l`.
fn structure_constants(
    group: &FiniteGroup,
    classes: &[Vec<usize>],
    class_of: &[usize],
) -> Vec<DMatrix<f64>> {
    let r = classes.len();
    let mut a = vec![DMatrix::<f64>::zeros(r, r); r];
    for (l, cl) in classes.iter().enumerate() {
        let z = cl[0];
        for (j, cj) in classes.iter().enumerate() {
            for &x in cj {
                let y = group.mul(group.inv(x), z);
                a[j][(class_of[y], l)] += 1.0;
            }
        }
    }
    a
}

/// Central characters `ω_i(C_k)` as complex vectors with `ω_i(C_1) = 1`.
fn burnside_eigenvectors(consts: &[DMatrix<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<Vec<C64>>> {
    let r = consts.len();
    let mut m = DMatrix::<f64>::zeros(r, r);
    for a in consts {
        let w: i32 = rng.gen_range(1..=97);
        m += a * f64::from(w);
    }
    let eig: Vec<C64> = m.complex_eigenvalues().iter().copied().collect();
    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..r {
        for j in 0..i {
            if (eig[i] - eig[j]).norm() < 1e-6 * scale {
                return None;
            }
        }
    }
    let mc: DMatrix<C64> = m.map(|x| C64::new(x, 0.0));
    let mut out = Vec::with_capacity(r);
    for lambda in eig {
        let shifted = &mc - DMatrix::<C64>::identity(r, r) * lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t?;
        let (k, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        let v: Vec<C64> = v_t.row(k).iter().map(|z| z.conj()).collect();
        if v[0].norm() < 1e-9 {
            return None;
        }
        let v0 = v[0];
        out.push(v.into_iter().map(|z| z / v0).collect());
    }
    Some(out)
}

/// Float characters from central characters, then exact values from the
/// eigenvalue multiplicities of each element's representation matrix.
fn reconstruct(
    group: &FiniteGroup,
    classes: &[Vec<usize>],
    class_of: &[usize],
    omegas: &[Vec<C64>],
) -> Result<(Vec<Vec<Cyclotomic>>, f64)> {
    let n = group.order() as f64;
    let mut residual: f64 = 0.0;
    let mut out = Vec::with_capacity(omegas.len());
    for omega in omegas {
        let norm: f64 = omega
            .iter()
            .zip(classes)
            .map(|(w, c)| w.norm_sqr() / c.len() as f64)
            .sum();
        let d = (n / norm).sqrt();
        let dr = d.round();
        if (d - dr).abs() > 1e-6 || dr < 1.0 {
            return Err(Error::VerificationFailed(format!(
                "degree {d} is not an integer"
            )));
        }
        let chi: Vec<C64> = omega
            .iter()
            .zip(classes)
            .map(|(w, c)| w * dr / c.len() as f64)
            .collect();
        let mut exact = Vec::with_capacity(classes.len());
        for cl in classes {
            let g = cl[0];
            let o = group.element_order(g);
            let mut mult = vec![0i64; o];
            for (j, m) in mult.iter_mut().enumerate() {
                let s: C64 = (0..o)
                    .map(|k| {
                        let theta = -2.0 * std::f64::consts::PI * ((j * k) % o) as f64 / o as f64;
                        chi[class_of[group.pow(g, k)]] * C64::from_polar(1.0, theta)
                    })
                    .sum::<C64>()
                    / o as f64;
                let rounded = s.re.round();
                if (s - C64::new(rounded, 0.0)).norm() > 1e-6 || rounded < 0.0 {
                    return Err(Error::VerificationFailed(format!(
                        "eigenvalue multiplicity {s} is not a nonnegative integer"
                    )));
                }
                *m = rounded as i64;
            }
            let value = Cyclotomic::from_root_multiplicities(o as u32, &mult);
            residual = residual.max((value.to_c64() - chi[class_of[g]]).norm());
            exact.push(value);
        }
        out.push(exact);
    }
    Ok((out, residual))
}

/// Characters of an abelian group from its invariant-factor decomposition:
/// Smith normal form of the relations `e_g + e_h − e_{gh}`.
pub struct AbelianCharacters;

impl Named for AbelianCharacters {
    fn name(&self) -> &'static str {
        "abelian"
    }
}

/// Invariant factors and coordinates of every element in `⊕ ℤ/d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianDecomposition {
    pub factors: Vec<u32>,
    pub coords: Vec<Vec<u32>>,
}

impl AbelianDecomposition {
    pub fn new(group: &FiniteGroup) -> Result<Self> {
        if !group.is_abelian() {
            return Err(Error::NonAbelian);
        }
        let n = group.order();
        let mut rows = Vec::new();
        for g in group.elements() {
            for h in group.elements() {
                let mut row = vec![0i64; n];
                row[g] += 1;
                row[h] += 1;
                row[group.mul(g, h)] -= 1;
                rows.push(row);
            }
        }
        let snf = smith_normal_form(&rows, n);
        let keep: Vec<usize> = (0..n)
            .filter(|&i| snf.diag.get(i).copied().unwrap_or(0) != 1)
            .collect();
        let factors: Vec<u32> = keep
            .iter()
            .map(|&i| {
                u32::try_from(snf.diag[i]).expect("finite group has positive invariant factors")
            })
            .collect();
        let coords = group
            .elements()
            .map(|g| {
                keep.iter()
                    .zip(&factors)
                    .map(|(&i, &d)| snf.col[g][i].rem_euclid(d as i64) as u32)
                    .collect()
            })
            .collect();
        Ok(AbelianDecomposition { factors, coords })
    }

    /// Number of characters, `Π d_i`.
    pub fn dual_order(&self) -> usize {
        self.factors.iter().map(|&d| d as usize).product()
    }

    /// Index vectors `k` of the dual group in lexicographic order.
    pub fn dual_elements(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &d in &self.factors {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// `χ_k(g) = Π ζ_{d_i}^{k_i · coord_i(g)}`.
    pub fn character_value(&self, k: &[u32], g: usize) -> Cyclotomic {
        let l = self.factors.iter().fold(1u32, |a, &d| a.lcm(&d));
        let exp: u64 = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                u64::from(k[i]) * u64::from(self.coords[g][i]) % u64::from(d) * u64::from(l / d)
            })
            .sum();
        Cyclotomic::root_of_unity(l, (exp % u64::from(l)) as i64)
    }
}

impl CharacterMethod for AbelianCharacters {
    fn table(&self, group: &FiniteGroup, _seed: u64) -> Result<CharacterTable> {
        let dec = AbelianDecomposition::new(group)?;
        let classes = conjugacy_classes(group);
        let chars = dec
            .dual_elements()
            .iter()
            .map(|k| {
                classes
                    .iter()
                    .map(|c| dec.character_value(k, c[0]))
                    .collect()
            })
            .collect();
        CharacterTable::assemble(group, classes, chars, self.name(), 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceCheck {
    pub tracial: bool,
    pub normalized: bool,
    pub class_function: bool,
    pub positivity: PositivityReport,
}

/// `φ(e) = 1`, `φ` constant on classes, and `[φ(g⁻¹h)]` PSD.
pub fn is_tracial_state(
    group: &FiniteGroup,
    phi: &ClassFunction,
    method: &dyn PositivityMethod,
) -> Result<TraceCheck> {
    if phi.values.len() != group.order() {
        return Err(Error::TraceOnWrongGroup(format!(
            "{} values for a group of order {}",
            phi.values.len(),
            group.order()
        )));
    }
    let normalized = phi.values[group.identity()].is_one();
    let class_function = group.elements().all(|g| {
        group
            .elements()
            .all(|h| phi.values[group.conjugate(h, g)] == phi.values[g])
    });
    let m: Vec<Vec<Cyclotomic>> = group
        .elements()
        .map(|g| {
            group
                .elements()
                .map(|h| phi.values[group.mul(group.inv(g), h)].clone())
                .collect()
        })
        .collect();
    let positivity = method.check(&MomentBlocks::Exact(vec![m]))?;
    Ok(TraceCheck {
        tracial: normalized && class_function && positivity.positive,
        normalized,
        class_function,
        positivity,
    })
}

/// Barycentric coordinates of `point` in the affine span of `vertices`,
/// when it lies there; solved exactly.
pub fn barycentric(vertices: &[ClassFunction], point: &ClassFunction) -> Option<Vec<Cyclotomic>> {
    let n = vertices.len();
    let mut aug = EchelonBasis::<Cyclotomic>::new(n + 1);
    // one equation per element, plus Σ λ = 1
    let len = point.values.len();
    for g in 0..=len {
        let row: Vec<Cyclotomic> = if g < len {
            vertices
                .iter()
                .map(|v| v.values[g].clone())
                .chain(std::iter::once(point.values[g].clone()))
                .collect()
        } else {
            vec![Cyclotomic::one(); n + 1]
        };
        aug.insert(&row);
    }
    let (x, free) = solve_affine(&aug)?;
    free.is_empty().then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::small;
    use crate::positivity::LdlPositivity;

    fn ints(v: &[i64]) -> Vec<Cyclotomic> {
        v.iter().map(|&x| Cyclotomic::from_int(x)).collect()
    }

    #[test]
    fn class_sizes() {
        assert_eq!(conjugacy_classes(&small::cyclic(2)), vec![vec![0], vec![1]]);
        assert!(conjugacy_classes(&small::klein())
            .iter()
            .all(|c| c.len() == 1));
        let s3 = small::symmetric(3);
        let sizes: Vec<usize> = conjugacy_classes(&s3).iter().map(Vec::len).collect();
        let mut brute = Vec::new();
        // oracle: conjugate all pairs directly
        let mut seen = vec![false; 6];
        for g in 0..6 {
            if !seen[g] {
                let mut c: Vec<usize> = (0..6).map(|h| s3.mul(s3.mul(h, g), s3.inv(h))).collect();
                c.sort();
                c.dedup();
                c.iter().for_each(|&x| seen[x] = true);
                brute.push(c.len());
            }
        }
        let mut a = sizes.clone();
        a.sort();
        brute.sort();
        assert_eq!(a, brute);
        assert_eq!(a, vec![1, 2, 3]);
    }

    #[test]
    fn small_tables() {
        let t = BurnsideCharacters.table(&small::cyclic(2), 1).unwrap();
        assert_eq!(t.characters, vec![ints(&[1, 1]), ints(&[1, -1])]);

        let z4 = small::cyclic(4);
        let t = BurnsideCharacters.table(&z4, 1).unwrap();
        assert_eq!(t.num_characters(), 4);
        for i in 0..4 {
            // each row is m ↦ i^{km} for some k
            let k = (0..4)
                .find(|&k| {
                    (0..4).all(|m| *t.value(i, m) == Cyclotomic::root_of_unity(4, (k * m) as i64))
                })
                .is_some();
            assert!(k);
        }
    }

    /// Characters of S₃ from the explicit 2-dimensional representation on
    /// `{v ∈ Q³ : Σv = 0}`: trace of the permutation matrix minus one.
    #[test]
    fn s3_table_matches_representation() {
        let s3 = small::symmetric(3);
        let t = BurnsideCharacters.table(&s3, 7).unwrap();
        let fixed = |g: usize| -> i64 {
            let l = s3.label(g);
            l.trim_matches(|c| c == '[' || c == ']')
                .split(',')
                .enumerate()
                .filter(|(i, v)| v.parse::<usize>().unwrap() == *i)
                .count() as i64
        };
        let sign = |g: usize| if fixed(g) == 1 { -1 } else { 1 };
        let std_rep = t.degrees.iter().position(|&d| d == 2).unwrap();
        for g in s3.elements() {
            assert_eq!(*t.value(std_rep, g), Cyclotomic::from_int(fixed(g) - 1));
            assert_eq!(*t.value(1, g), Cyclotomic::from_int(sign(g)));
        }
        assert_eq!(t.degrees, vec![1, 1, 2]);
        let ext = t.tracial_extreme_points();
        assert_eq!(ext[2].values[s3.identity()], Cyclotomic::one());
    }

    #[test]
    fn burnside_handles_irrational_and_nonabelian() {
        for g in [
            small::cyclic(3),
            small::cyclic(5),
            small::product(&small::cyclic(2), &small::cyclic(3)),
            small::dihedral(4),
            small::quaternion(),
            small::symmetric(4),
        ] {
            let t = BurnsideCharacters.table(&g, 11).unwrap();
            t.verify().unwrap();
            assert!(t.float_residual < 1e-9);
            assert!(t.orthogonality_residual() < 1e-9);
        }
    }

    #[test]
    fn abelian_method_agrees_with_burnside() {
        for g in [
            small::cyclic(4),
            small::klein(),
            small::cyclic(6),
            small::product(&small::cyclic(2), &small::cyclic(4)),
        ] {
            let a = AbelianCharacters.table(&g, 0).unwrap();
            let b = BurnsideCharacters.table(&g, 3).unwrap();
            assert_eq!(a.characters, b.characters);
        }
        assert_eq!(
            AbelianCharacters.table(&small::symmetric(3), 0),
            Err(Error::NonAbelian)
        );
        let d = AbelianDecomposition::new(&small::product(&small::cyclic(2), &small::cyclic(2)))
            .unwrap();
        assert_eq!(d.factors, vec![2, 2]);
        let d = AbelianDecomposition::new(&small::cyclic(6)).unwrap();
        assert_eq!(d.factors, vec![6]);
    }

    #[test]
    fn tracial_state_checks() {
        let z2 = small::cyclic(2);
        let canon = ClassFunction::canonical_trace(&z2);
        assert!(
            is_tracial_state(&z2, &canon, &LdlPositivity)
                .unwrap()
                .tracial
        );
        let bad = ClassFunction {
            values: ints(&[1, 2]),
        };
        assert!(!is_tracial_state(&z2, &bad, &LdlPositivity).unwrap().tracial);

        let s3 = small::symmetric(3);
        let t = BurnsideCharacters.table(&s3, 0).unwrap();
        let mut mix = ClassFunction {
            values: vec![Cyclotomic::zero(); 6],
        };
        for (i, e) in t.tracial_extreme_points().iter().enumerate() {
            let d = t.degrees[i] as i64;
            mix = mix.add(&e.scale(&Cyclotomic::from_rational(rat(d * d, 6))));
        }
        assert!(is_tracial_state(&s3, &mix, &LdlPositivity).unwrap().tracial);
        assert_eq!(mix, ClassFunction::canonical_trace(&s3));
        let coeffs = barycentric(&t.tracial_extreme_points(), &mix).unwrap();
        assert_eq!(coeffs, t.decompose(&mix));
    }
}
