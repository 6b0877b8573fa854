//! Traces on crossed products: `C(X) ⋊ ℤ` for a permutation of a finite set,
//! through periodic orbits and truncated moment sequences, and `C(X) ⋊ Γ`
//! for finite abelian `Γ`, through measures on `X × Γ̂`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::algebra::Functional;
use crate::characters::AbelianDecomposition;
use crate::characters::{AbelianCharacters, CharacterMethod};
use crate::cyclotomic::{format_rational, rat, Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::groupoid::TransformationGroupoid;
use crate::linalg::{ldl_psd, NegativityWitness};

/// A finite set with a bijection `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteZSystem {
    pub points: Vec<String>,
    pub map: Vec<usize>,
}

impl FiniteZSystem {
    pub fn new(points: Vec<String>, map: Vec<usize>) -> Result<Self> {
        let n = points.len();
        let mut hit = vec![false; n];
        if map.len() != n {
            return Err(Error::Inconsistent(
                "map length differs from point count".into(),
            ));
        }
        for &y in &map {
            if y >= n || std::mem::replace(&mut hit[y], true) {
                return Err(Error::Inconsistent("T is not a bijection".into()));
            }
        }
        Ok(FiniteZSystem { points, map })
    }

    /// `T^k x` for any integer `k`.
    pub fn iterate(&self, x: usize, k: i64) -> usize {
        let period = self.orbit_of(x).len() as i64;
        let mut y = x;
        for _ in 0..k.rem_euclid(period) {
            y = self.map[y];
        }
        y
    }

    fn orbit_of(&self, x: usize) -> Vec<usize> {
        let mut orbit = vec![x];
        let mut y = self.map[x];
        while y != x {
            orbit.push(y);
            y = self.map[y];
        }
        orbit
    }
}

/// Cycles of `T`, each listed as `x, Tx, T²x, …` from its least point;
/// the period is the length.
pub fn periodic_orbits(sys: &FiniteZSystem) -> Vec<Vec<usize>> {
    let mut seen = vec![false; sys.points.len()];
    let mut out = Vec::new();
    for x in 0..sys.points.len() {
        if seen[x] {
            continue;
        }
        let orbit = sys.orbit_of(x);
        for &y in &orbit {
            seen[y] = true;
        }
        out.push(orbit);
    }
    out
}

/// `(1/n) Σ_{k<n} f(T^k x)` over an orbit of length `n`.
pub fn expectation_ex(f: &[Cyclotomic], orbit: &[usize]) -> Cyclotomic {
    let sum = orbit
        .iter()
        .fold(Cyclotomic::zero(), |acc, &y| acc + f[y].clone());
    sum * Cyclotomic::from_rational(rat(1, orbit.len() as i64))
}

/// Fourier coefficients `ĉ(m)`, `|m| ≤ cutoff`, of a circle measure invariant
/// under rotation by `2π/period`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSequence {
    pub period: usize,
    pub cutoff: usize,
    /// `moments[m + cutoff] = ĉ(m)`.
    pub moments: Vec<Cyclotomic>,
}

impl MomentSequence {
    pub fn from_fn(period: usize, cutoff: usize, f: impl Fn(i64) -> Cyclotomic) -> Self {
        let m = cutoff as i64;
        MomentSequence {
            period,
            cutoff,
            moments: (-m..=m).map(f).collect(),
        }
    }

    /// Haar measure: `ĉ(m) = δ_{m,0}`.
    pub fn haar(period: usize, cutoff: usize) -> Self {
        Self::from_fn(period, cutoff, |m| Cyclotomic::from_int(i64::from(m == 0)))
    }

    pub fn get(&self, m: i64) -> Result<&Cyclotomic> {
        if m.unsigned_abs() as usize > self.cutoff {
            return Err(Error::CutoffExceeded {
                m,
                cutoff: self.cutoff,
            });
        }
        Ok(&self.moments[(m + self.cutoff as i64) as usize])
    }

    /// `[ĉ(j − k)]_{0 ≤ j,k ≤ cutoff}`.
    pub fn toeplitz(&self) -> Vec<Vec<Cyclotomic>> {
        let m = self.cutoff as i64;
        (0..=m)
            .map(|j| {
                (0..=m)
                    .map(|k| self.get(j - k).expect("in range").clone())
                    .collect()
            })
            .collect()
    }

    /// Normalization, hermitian symmetry, support in `period·ℤ` and
    /// positivity of the order-`cutoff` Toeplitz matrix.
    pub fn validate(&self, orbit: usize) -> std::result::Result<(), TraceViolation> {
        let zero = self.get(0).expect("cutoff ≥ 0");
        if !zero.is_one() {
            return Err(TraceViolation::Normalization {
                orbit,
                value: zero.to_string(),
            });
        }
        let m = self.cutoff as i64;
        for k in 1..=m {
            let (a, b) = (
                self.get(k).expect("in range"),
                self.get(-k).expect("in range"),
            );
            if *b != a.conj() {
                return Err(TraceViolation::Hermitian { orbit, m: k });
            }
            if k % self.period as i64 != 0 && !a.is_zero() {
                return Err(TraceViolation::Support {
                    orbit,
                    m: k,
                    value: a.to_string(),
                });
            }
        }
        // With support in pℤ the Toeplitz matrix splits by residue mod p into
        // leading blocks of the residue-0 block, so that block decides.
        let p = self.period;
        let block: Vec<Vec<Cyclotomic>> = (0..=m / p as i64)
            .map(|j| {
                (0..=m / p as i64)
                    .map(|k| self.get(p as i64 * (j - k)).expect("in range").clone())
                    .collect()
            })
            .collect();
        ldl_psd(&block).map_err(|w| TraceViolation::Toeplitz {
            orbit,
            witness: match w {
                NegativityWitness::NegativePivot { index, pivot } => {
                    NegativityWitness::NegativePivot {
                        index: index * p,
                        pivot,
                    }
                }
                NegativityWitness::ZeroPivotCoupling { i, j } => {
                    NegativityWitness::ZeroPivotCoupling { i: i * p, j: j * p }
                }
                NegativityWitness::NotHermitian { i, j } => {
                    NegativityWitness::NotHermitian { i: i * p, j: j * p }
                }
            },
        })?;
        debug_assert!(self
            .moments
            .iter()
            .all(|c| (c.clone() * c.conj() - Cyclotomic::one())
                .real_sign()
                .is_le()));
        Ok(())
    }
}

/// Why values fail to define a trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceViolation {
    /// Orbit masses are not nonnegative reals summing to 1.
    Weights {
        detail: String,
    },
    /// An orbit of mass zero has a nonzero moment.
    Uncharged {
        orbit: usize,
        m: i64,
    },
    Normalization {
        orbit: usize,
        value: String,
    },
    Hermitian {
        orbit: usize,
        m: i64,
    },
    /// `ĉ(m) ≠ 0` with `m` outside `period·ℤ`.
    Support {
        orbit: usize,
        m: i64,
        value: String,
    },
    /// The Toeplitz matrix is not PSD; indices address `[ĉ(j−k)]`.
    Toeplitz {
        orbit: usize,
        witness: NegativityWitness,
    },
}

impl fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceViolation::Weights { detail } => write!(f, "orbit masses: {detail}"),
            TraceViolation::Uncharged { orbit, m } => {
                write!(f, "orbit {orbit} has mass 0 but a nonzero value at m = {m}")
            }
            TraceViolation::Normalization { orbit, value } => {
                write!(f, "orbit {orbit}: ĉ(0) = {value}")
            }
            TraceViolation::Hermitian { orbit, m } => {
                write!(f, "orbit {orbit}: ĉ(-{m}) ≠ conj ĉ({m})")
            }
            TraceViolation::Support { orbit, m, value } => {
                write!(f, "orbit {orbit}: ĉ({m}) = {value} off the period lattice")
            }
            TraceViolation::Toeplitz { orbit, witness } => {
                write!(f, "orbit {orbit}: Toeplitz matrix not PSD ({witness:?})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    /// Index into `periodic_orbits`.
    pub orbit: usize,
    #[serde(serialize_with = "ser_rational")]
    pub weight: Rational,
    pub moments: MomentSequence,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// `τ = Σ_n weight_n · λ_n^* ∘ E_{x_n}`, one entry per charged orbit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceData {
    pub entries: Vec<TraceEntry>,
}

/// `τ(f u^m) = Σ_n weight_n ĉ_n(m) E_{x_n}(f)`.
pub fn trace_from_data(
    sys: &FiniteZSystem,
    data: &TraceData,
    f: &[Cyclotomic],
    m: i64,
) -> Result<Cyclotomic> {
    let orbits = periodic_orbits(sys);
    let mut acc = Cyclotomic::zero();
    for e in &data.entries {
        let c = e.moments.get(m)?;
        if c.is_zero() || e.weight.is_zero() {
            continue;
        }
        acc = acc
            + Cyclotomic::from_rational(e.weight.clone())
                * c.clone()
                * expectation_ex(f, &orbits[e.orbit]);
    }
    Ok(acc)
}

/// Values `τ(1_{O_n} u^m)` for every orbit and `|m| ≤ cutoff`, laid out as
/// `values[n][m + cutoff]`.
pub fn orbit_values(
    sys: &FiniteZSystem,
    data: &TraceData,
    cutoff: usize,
) -> Result<Vec<Vec<Cyclotomic>>> {
    let orbits = periodic_orbits(sys);
    let m = cutoff as i64;
    orbits
        .iter()
        .map(|o| {
            let f: Vec<Cyclotomic> = (0..sys.points.len())
                .map(|x| Cyclotomic::from_int(i64::from(o.contains(&x))))
                .collect();
            (-m..=m)
                .map(|k| trace_from_data(sys, data, &f, k))
                .collect()
        })
        .collect()
}

/// Recovers the unique decomposition from `values[n][m + cutoff] =
/// τ(1_{O_n} u^m)` and validates every moment sequence.
pub fn decompose_trace(
    sys: &FiniteZSystem,
    values: &[Vec<Cyclotomic>],
    cutoff: usize,
) -> Result<TraceData> {
    let orbits = periodic_orbits(sys);
    if values.len() != orbits.len() || values.iter().any(|v| v.len() != 2 * cutoff + 1) {
        return Err(Error::Inconsistent(format!(
            "expected {} orbits × {} moments",
            orbits.len(),
            2 * cutoff + 1
        )));
    }
    let mut total = Rational::zero();
    let mut entries = Vec::new();
    for (n, row) in values.iter().enumerate() {
        let w = row[cutoff]
            .to_rational()
            .filter(|w| !w.is_negative())
            .ok_or_else(|| {
                Error::NotATrace(TraceViolation::Weights {
                    detail: format!("orbit {n} has mass {}", row[cutoff]),
                })
            })?;
        total += &w;
        if w.is_zero() {
            if let Some(k) = row.iter().position(|v| !v.is_zero()) {
                return Err(Error::NotATrace(TraceViolation::Uncharged {
                    orbit: n,
                    m: k as i64 - cutoff as i64,
                }));
            }
            continue;
        }
        let inv = Cyclotomic::from_rational(w.recip());
        let moments = MomentSequence {
            period: orbits[n].len(),
            cutoff,
            moments: row.iter().map(|v| v.clone() * inv.clone()).collect(),
        };
        moments.validate(n).map_err(Error::NotATrace)?;
        entries.push(TraceEntry {
            orbit: n,
            weight: w,
            moments,
        });
    }
    if !total.is_one() {
        return Err(Error::NotATrace(TraceViolation::Weights {
            detail: format!("masses sum to {}", format_rational(&total)),
        }));
    }
    Ok(TraceData { entries })
}

/// `u^m g u^{-m} = g ∘ T^{-m}`.
pub fn shift(sys: &FiniteZSystem, g: &[Cyclotomic], m: i64) -> Vec<Cyclotomic> {
    (0..g.len())
        .map(|x| g[sys.iterate(x, -m)].clone())
        .collect()
}

/// Compares `τ((f u^m)(g u^k))` with `τ((g u^k)(f u^m))`; both products
/// must stay inside the cutoff.
pub fn is_tracial_pair(
    sys: &FiniteZSystem,
    data: &TraceData,
    (f, m): (&[Cyclotomic], i64),
    (g, k): (&[Cyclotomic], i64),
) -> Result<bool> {
    let product = |a: &[Cyclotomic], b: &[Cyclotomic], shift_by: i64| -> Vec<Cyclotomic> {
        a.iter()
            .zip(shift(sys, b, shift_by))
            .map(|(x, y)| x.clone() * y)
            .collect()
    };
    let left = trace_from_data(sys, data, &product(f, g, m), m + k)?;
    let right = trace_from_data(sys, data, &product(g, f, k), m + k)?;
    Ok(left == right)
}

/// Point `((a² − b²) + 2abi) / (a² + b²)` of the unit circle.
fn pythagorean_point(a: i64, b: i64) -> Cyclotomic {
    let c = a * a + b * b;
    Cyclotomic::gaussian(rat(a * a - b * b, c), rat(2 * a * b, c))
}

/// Moments of a random `period`-rotation invariant measure: a rational
/// mixture of Haar measure and orbits of unit-circle atoms `z`, for which
/// `ĉ(m) = z^m` on `period·ℤ`.
pub fn random_moments<R: Rng>(rng: &mut R, period: usize, cutoff: usize) -> MomentSequence {
    let atoms: Vec<(Cyclotomic, Rational)> = (0..rng.gen_range(0..=3))
        .map(|_| {
            let z = match rng.gen_range(0..4) {
                // orders dividing 24 keep every moment inside ℚ(ζ_24)
                0 => Cyclotomic::root_of_unity(
                    [1, 2, 3, 4, 6, 8, 12][rng.gen_range(0..7)],
                    rng.gen_range(0..24),
                ),
                _ => pythagorean_point(rng.gen_range(-4..=4), rng.gen_range(1..=4)),
            };
            (z, rat(rng.gen_range(1..=5), 1))
        })
        .collect();
    let haar = rat(rng.gen_range(0..=2), 1);
    let total: Rational = atoms.iter().map(|(_, w)| w.clone()).sum::<Rational>() + &haar;
    if total.is_zero() {
        return MomentSequence::haar(period, cutoff);
    }
    MomentSequence::from_fn(period, cutoff, |m| {
        if m == 0 {
            return Cyclotomic::one();
        }
        if m % period as i64 != 0 {
            return Cyclotomic::zero();
        }
        atoms.iter().fold(Cyclotomic::zero(), |acc, (z, w)| {
            let zm = if m > 0 {
                pow(z, m as u64)
            } else {
                pow(&z.conj(), m.unsigned_abs())
            };
            acc + zm * Cyclotomic::from_rational(w / &total)
        })
    })
}

fn pow(z: &Cyclotomic, k: u64) -> Cyclotomic {
    (0..k).fold(Cyclotomic::one(), |acc, _| acc * z.clone())
}

/// Random valid data: every orbit is charged with probability 3/4 (at least
/// one always is), masses are random rationals summing to 1.
pub fn random_trace_data<R: Rng>(rng: &mut R, sys: &FiniteZSystem, cutoff: usize) -> TraceData {
    let orbits = periodic_orbits(sys);
    let mut raw: Vec<i64> = orbits
        .iter()
        .map(|_| {
            if rng.gen_bool(0.75) {
                rng.gen_range(1..=6)
            } else {
                0
            }
        })
        .collect();
    if raw.iter().all(|&w| w == 0) {
        let k = rng.gen_range(0..raw.len());
        raw[k] = 1;
    }
    let total: i64 = raw.iter().sum();
    let entries = orbits
        .iter()
        .enumerate()
        .filter(|(n, _)| raw[*n] > 0)
        .map(|(n, o)| TraceEntry {
            orbit: n,
            weight: rat(raw[n], total),
            moments: random_moments(rng, o.len(), cutoff),
        })
        .collect();
    TraceData { entries }
}

/// Random permutation of `1..=n` whose cycles have length at most `max_period`.
pub fn random_system<R: Rng>(rng: &mut R, n: usize, max_period: usize) -> FiniteZSystem {
    let mut map = vec![0; n];
    let mut x = 0;
    while x < n {
        let len = rng.gen_range(1..=max_period.min(n - x));
        for k in 0..len {
            map[x + k] = x + (k + 1) % len;
        }
        x += len;
    }
    FiniteZSystem::new((1..=n).map(|i| i.to_string()).collect(), map)
        .expect("cycles form a bijection")
}

/// Ways to break a valid set of orbit values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// A nonzero moment off the period lattice.
    Support,
    /// `ĉ(n) = 1` with `ĉ(2n) = 0`: a 3×3 Toeplitz minor has determinant −1.
    BrokenRotation,
    /// `|ĉ(n)| = 2`.
    Overshoot,
}

/// Applies `kind` to the row of a charged orbit, keeping hermitian symmetry.
/// Returns `None` when the data offers no place for this mutation (a
/// support violation needs period ≥ 2; the others need `2·period ≤ cutoff`).
pub fn mutate_values(
    values: &mut [Vec<Cyclotomic>],
    data: &TraceData,
    cutoff: usize,
    kind: Mutation,
    entry: usize,
) -> Option<usize> {
    let e = &data.entries[entry % data.entries.len()];
    let n = e.moments.period as i64;
    let w = Cyclotomic::from_rational(e.weight.clone());
    let row = &mut values[e.orbit];
    let c = cutoff as i64;
    let mut put = |m: i64, v: Cyclotomic| {
        row[(c - m) as usize] = v.conj();
        row[(c + m) as usize] = v;
    };
    match kind {
        Mutation::Support if n >= 2 => put(1, w * Cyclotomic::gaussian(rat(1, 3), rat(1, 5))),
        Mutation::BrokenRotation if 2 * n <= c => {
            put(n, w);
            put(2 * n, Cyclotomic::zero());
        }
        Mutation::Overshoot if n <= c => put(n, w * Cyclotomic::from_int(2)),
        _ => return None,
    }
    Some(e.orbit)
}

/// Probability measure on `X × Γ̂`, `nu[x][k]` for the `k`-th dual element
/// in [`AbelianDecomposition::dual_elements`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelianTraceMeasure {
    pub nu: Vec<Vec<Rational>>,
}

/// `w(γ, x) = Σ_χ χ(γ) ν(x, χ)`, after checking that `ν` is a Γ-invariant
/// probability measure whose fibres are `Γ_x^⊥`-invariant. The Fourier sums
/// off the isotropy are asserted to vanish.
pub fn abelian_trace_measure(
    t: &TransformationGroupoid,
    nu: &AbelianTraceMeasure,
) -> Result<Functional<Cyclotomic>> {
    let dec = AbelianDecomposition::new(&t.group)?;
    let dual = dec.dual_elements();
    let nx = t.space.len();
    if nu.nu.len() != nx || nu.nu.iter().any(|r| r.len() != dual.len()) {
        return Err(Error::Inconsistent(format!(
            "ν must be {nx} × {}",
            dual.len()
        )));
    }
    let total: Rational = nu.nu.iter().flatten().sum();
    if !total.is_one() || nu.nu.iter().flatten().any(Signed::is_negative) {
        return Err(Error::InvariantViolated(
            "ν is not a probability measure".into(),
        ));
    }
    for gamma in t.group.elements() {
        for x in 0..nx {
            if nu.nu[t.action[gamma][x]] != nu.nu[x] {
                return Err(Error::InvariantViolated(format!(
                    "ν is not invariant under {} at {:?}",
                    t.group.label(gamma),
                    t.space[x]
                )));
            }
        }
    }
    let index_of = |k: &[u32]| dual.iter().position(|d| d == k).expect("dual element");
    for x in 0..nx {
        let stab = t.stabilizer(x);
        for psi in dual
            .iter()
            .filter(|psi| stab.iter().all(|&h| dec.character_value(psi, h).is_one()))
        {
            for (k, chi) in dual.iter().enumerate() {
                let moved: Vec<u32> = chi
                    .iter()
                    .zip(psi)
                    .zip(&dec.factors)
                    .map(|((a, b), d)| (a + b) % d)
                    .collect();
                if nu.nu[x][index_of(&moved)] != nu.nu[x][k] {
                    return Err(Error::InvariantViolated(format!(
                        "fibre at {:?} is not invariant under the annihilator of its stabilizer",
                        t.space[x]
                    )));
                }
            }
        }
    }
    let g = Arc::new(t.groupoid.clone());
    let mut w = Functional::zero(&g);
    for gamma in t.group.elements() {
        for x in 0..nx {
            let sum = dual
                .iter()
                .enumerate()
                .fold(Cyclotomic::zero(), |acc, (k, chi)| {
                    if nu.nu[x][k].is_zero() {
                        acc
                    } else {
                        acc + dec.character_value(chi, gamma)
                            * Cyclotomic::from_rational(nu.nu[x][k].clone())
                    }
                });
            if t.action[gamma][x] == x {
                w.set(t.arrow_of(gamma, x), sum);
            } else if !sum.is_zero() {
                return Err(Error::InvariantViolated(format!(
                    "Fourier sum at ({}, {:?}) off the isotropy is {sum}",
                    t.group.label(gamma),
                    t.space[x]
                )));
            }
        }
    }
    Ok(w)
}

/// Extreme trace labelled by an orbit, its stabilizer `H` and `χ ∈ Ĥ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalTrace {
    pub orbit: Vec<usize>,
    pub stabilizer: Vec<usize>,
    /// `χ` on the stabilizer, aligned with `stabilizer`.
    pub character: Vec<Cyclotomic>,
    /// `w(x) = 1/|O|` on the orbit and `w(γ, x) = χ(γ)/|O|` for `γ ∈ H`.
    pub state: Functional<Cyclotomic>,
}

/// One extreme trace per orbit and character of its stabilizer; the count is
/// `Σ_orbits |Γ_x|`.
pub fn extremal_traces_enumerate(t: &TransformationGroupoid) -> Result<Vec<ExtremalTrace>> {
    if !t.group.is_abelian() {
        return Err(Error::NonAbelian);
    }
    let g = Arc::new(t.groupoid.clone());
    let nx = t.space.len();
    let mut seen = vec![false; nx];
    let mut out = Vec::new();
    for x0 in 0..nx {
        if seen[x0] {
            continue;
        }
        let mut orbit: Vec<usize> = t
            .group
            .elements()
            .map(|gamma| t.action[gamma][x0])
            .collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &y in &orbit {
            seen[y] = true;
        }
        let stab = t.stabilizer(x0);
        let h = t.group.subgroup(&stab)?;
        let table = AbelianCharacters.table(&h, 0)?;
        let size = Cyclotomic::from_rational(rat(1, orbit.len() as i64));
        for i in 0..table.num_characters() {
            let chi: Vec<Cyclotomic> = (0..stab.len()).map(|k| table.value(i, k).clone()).collect();
            let mut w = Functional::zero(&g);
            for &y in &orbit {
                for (k, &gamma) in stab.iter().enumerate() {
                    w.set(t.arrow_of(gamma, y), chi[k].clone() * size.clone());
                }
            }
            out.push(ExtremalTrace {
                orbit: orbit.clone(),
                stabilizer: stab.clone(),
                character: chi,
                state: w,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::small;
    use crate::groupoid::transformation_groupoid;

    fn sys(map: &[usize]) -> FiniteZSystem {
        FiniteZSystem::new(
            (1..=map.len()).map(|i| i.to_string()).collect(),
            map.to_vec(),
        )
        .unwrap()
    }

    fn cy(p: i64, q: i64) -> Cyclotomic {
        Cyclotomic::from_rational(rat(p, q))
    }

    fn two_point_measure(cutoff: usize) -> MomentSequence {
        MomentSequence::from_fn(2, cutoff, |m| cy(i64::from(m % 2 == 0), 1))
    }

    #[test]
    fn cycle_decomposition() {
        assert_eq!(periodic_orbits(&sys(&[0, 1])), vec![vec![0], vec![1]]);
        assert_eq!(periodic_orbits(&sys(&[1, 0])), vec![vec![0, 1]]);
        let periods: Vec<usize> = periodic_orbits(&sys(&[1, 2, 0, 3]))
            .iter()
            .map(Vec::len)
            .collect();
        assert_eq!(periods, vec![3, 1]);
        assert!(FiniteZSystem::new(vec!["a".into(), "b".into()], vec![0, 0]).is_err());
    }

    #[test]
    fn expectation_examples() {
        let s = sys(&[1, 0]);
        let orbit = &periodic_orbits(&s)[0];
        assert_eq!(expectation_ex(&[cy(1, 1), cy(0, 1)], orbit), cy(1, 2));
        assert_eq!(expectation_ex(&[cy(1, 1), cy(1, 1)], orbit), cy(1, 1));
        let fixed = sys(&[0]);
        assert_eq!(
            expectation_ex(&[cy(1, 1)], &periodic_orbits(&fixed)[0]),
            cy(1, 1)
        );
    }

    #[test]
    fn trace_examples() {
        let s = sys(&[1, 0]);
        let data = TraceData {
            entries: vec![TraceEntry {
                orbit: 0,
                weight: rat(1, 1),
                moments: two_point_measure(4),
            }],
        };
        let one = [cy(1, 1), cy(1, 1)];
        assert_eq!(trace_from_data(&s, &data, &one, 2).unwrap(), cy(1, 1));
        assert_eq!(trace_from_data(&s, &data, &one, 1).unwrap(), cy(0, 1));
        assert!(matches!(
            trace_from_data(&s, &data, &one, 5),
            Err(Error::CutoffExceeded { m: 5, cutoff: 4 })
        ));
        let haar = TraceData {
            entries: vec![TraceEntry {
                orbit: 0,
                weight: rat(1, 1),
                moments: MomentSequence::haar(2, 4),
            }],
        };
        assert!(trace_from_data(&s, &haar, &[cy(3, 1), cy(-1, 7)], 2)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn decomposition_examples() {
        let s = sys(&[1, 0]);
        let data = TraceData {
            entries: vec![TraceEntry {
                orbit: 0,
                weight: rat(1, 1),
                moments: two_point_measure(4),
            }],
        };
        let values = orbit_values(&s, &data, 4).unwrap();
        assert_eq!(decompose_trace(&s, &values, 4).unwrap(), data);

        let mut odd = values.clone();
        odd[0][4 + 1] = cy(1, 3);
        odd[0][4 - 1] = cy(1, 3);
        assert!(matches!(
            decompose_trace(&s, &odd, 4),
            Err(Error::NotATrace(TraceViolation::Support { m: 1, .. }))
        ));
        let mut big = values;
        big[0][4 + 2] = cy(2, 1);
        big[0][4 - 2] = cy(2, 1);
        assert!(matches!(
            decompose_trace(&s, &big, 4),
            Err(Error::NotATrace(TraceViolation::Toeplitz { .. }))
        ));
    }

    fn t_of(
        group: crate::group::FiniteGroup,
        n: usize,
        action: Vec<Vec<usize>>,
    ) -> TransformationGroupoid {
        let space: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        transformation_groupoid(&space, &group, &action).unwrap()
    }

    #[test]
    fn abelian_fourier_sums() {
        let t = t_of(small::cyclic(2), 1, vec![vec![0], vec![0]]);
        let w = abelian_trace_measure(
            &t,
            &AbelianTraceMeasure {
                nu: vec![vec![rat(1, 2), rat(1, 2)]],
            },
        )
        .unwrap();
        assert_eq!(*w.weight(t.arrow_of(0, 0)), cy(1, 1));
        assert!(w.weight(t.arrow_of(1, 0)).is_zero());
        let sign = abelian_trace_measure(
            &t,
            &AbelianTraceMeasure {
                nu: vec![vec![rat(0, 1), rat(1, 1)]],
            },
        )
        .unwrap();
        assert_eq!(*sign.weight(t.arrow_of(1, 0)), cy(-1, 1));

        // free swap: the uniform measure gives the unique trace
        let swap = t_of(small::cyclic(2), 2, vec![vec![0, 1], vec![1, 0]]);
        let quarter = vec![rat(1, 4), rat(1, 4)];
        let w = abelian_trace_measure(
            &swap,
            &AbelianTraceMeasure {
                nu: vec![quarter.clone(), quarter],
            },
        )
        .unwrap();
        let g = Arc::new(swap.groupoid.clone());
        let zero = crate::groupoid::Cocycle::zero(&g);
        let one = crate::algebra::Temperature::parse("1").unwrap();
        let orc = crate::kms::oracle_solution_space(&g, &zero, &one).unwrap();
        assert_eq!(orc.dimension(), 0);
        assert!(orc.contains(&w));

        // a fibre that is not invariant under Γ_x^⊥ = Γ̂
        let bad = abelian_trace_measure(
            &swap,
            &AbelianTraceMeasure {
                nu: vec![vec![rat(1, 2), rat(0, 1)], vec![rat(1, 2), rat(0, 1)]],
            },
        );
        assert!(matches!(bad, Err(Error::InvariantViolated(_))));
    }

    #[test]
    fn extremal_counts() {
        let t = t_of(small::cyclic(2), 1, vec![vec![0], vec![0]]);
        assert_eq!(extremal_traces_enumerate(&t).unwrap().len(), 2);
        let swap = t_of(small::cyclic(2), 2, vec![vec![0, 1], vec![1, 0]]);
        let e = extremal_traces_enumerate(&swap).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].stabilizer.len(), 1);
        // ℤ/4 acting through its quotient ℤ/2
        let z4 = small::cyclic(4);
        let action: Vec<Vec<usize>> = z4
            .elements()
            .map(|g| if g % 2 == 0 { vec![0, 1] } else { vec![1, 0] })
            .collect();
        let t = t_of(z4, 2, action);
        let e = extremal_traces_enumerate(&t).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].stabilizer, vec![0, 2]);
        let s3 = small::symmetric(3);
        let triv = t_of(s3.clone(), 1, vec![vec![0]; 6]);
        assert_eq!(extremal_traces_enumerate(&triv), Err(Error::NonAbelian));
    }

    #[test]
    fn random_round_trip_and_mutations() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = random_system(&mut rng, 6, 4);
            let data = random_trace_data(&mut rng, &s, 8);
            let values = orbit_values(&s, &data, 8).unwrap();
            assert_eq!(decompose_trace(&s, &values, 8).unwrap(), data);
            for e in &data.entries {
                assert!(e
                    .moments
                    .moments
                    .iter()
                    .all(|c| (c.clone() * c.conj() - Cyclotomic::one())
                        .real_sign()
                        .is_le()));
            }
            let f: Vec<Cyclotomic> = (0..6).map(|x| cy(x as i64 + 1, 1)).collect();
            let g: Vec<Cyclotomic> = (0..6).map(|x| cy(1, x as i64 + 2)).collect();
            assert!(is_tracial_pair(&s, &data, (&f, 3), (&g, -1)).unwrap());
            for kind in [Mutation::BrokenRotation, Mutation::Overshoot] {
                let mut bad = values.clone();
                mutate_values(&mut bad, &data, 8, kind, 0).unwrap();
                assert!(matches!(
                    decompose_trace(&s, &bad, 8),
                    Err(Error::NotATrace(TraceViolation::Toeplitz { .. }))
                ));
            }
        }
    }
}
