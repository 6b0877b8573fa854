//! Measures on truncated semigroups of integral ideals, described through
//! user-supplied prime data: norms and ideal classes, no field arithmetic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{format_rational, rational_to_f64, Rational};
use crate::error::{Error, Result};

/// Relative tolerance for comparisons once a value has left exact arithmetic.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// A nonnegative real: exact when every exponent involved is integral.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(Rational),
    Approx(f64),
}

impl Real {
    pub fn zero() -> Real {
        Real::Exact(Rational::zero())
    }

    pub fn one() -> Real {
        Real::Exact(Rational::one())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => rational_to_f64(r),
            Real::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(r) => r.is_zero(),
            Real::Approx(x) => *x == 0.0,
        }
    }

    /// Exact equality for two exact values, relative tolerance otherwise.
    pub fn matches(&self, other: &Real) -> bool {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= FLOAT_TOLERANCE * a.abs().max(b.abs())
            }
        }
    }

    /// `n^{-s}`, exact when `s` is an integer.
    pub fn norm_power(n: &BigInt, s: &Rational) -> Real {
        if s.is_integer() {
            let k = s.to_integer();
            let k = k.abs().to_usize().expect("exponent fits usize");
            let p = Rational::from_integer(num_traits::pow(n.clone(), k));
            return Real::Exact(if s.is_negative() { p } else { p.recip() });
        }
        Real::Approx((-rational_to_f64(s) * ln_big(n)).exp())
    }

    fn binop(
        self,
        other: Real,
        exact: impl Fn(Rational, Rational) -> Rational,
        approx: impl Fn(f64, f64) -> f64,
    ) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(exact(a, b)),
            (a, b) => Real::Approx(approx(a.to_f64(), b.to_f64())),
        }
    }
}

fn ln_big(n: &BigInt) -> f64 {
    match n.to_f64() {
        Some(x) if x.is_finite() => x.ln(),
        _ => {
            let bits = n.bits();
            let shifted: BigInt = n >> (bits - 60);
            shifted.to_f64().expect("60 bits").ln() + (bits - 60) as f64 * std::f64::consts::LN_2
        }
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, o: Real) -> Real {
        self.binop(o, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, o: Real) -> Real {
        self.binop(o, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, o: Real) -> Real {
        self.binop(o, |a, b| a * b, |a, b| a * b)
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, o: Real) -> Real {
        self.binop(o, |a, b| a / b, |a, b| a / b)
    }
}

impl std::iter::Sum for Real {
    /// Pairwise reduction keeps exact operands of similar size, which
    /// matters for long sums of unrelated denominators.
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        let mut level: Vec<Real> = iter.collect();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            let mut it = level.into_iter();
            while let Some(a) = it.next() {
                next.push(match it.next() {
                    Some(b) => a + b,
                    None => a,
                });
            }
            level = next;
        }
        level.pop().unwrap_or_else(Real::zero)
    }
}

impl std::iter::Product for Real {
    fn product<I: Iterator<Item = Real>>(iter: I) -> Real {
        let mut level: Vec<Real> = iter.collect();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            let mut it = level.into_iter();
            while let Some(a) = it.next() {
                next.push(match it.next() {
                    Some(b) => a * b,
                    None => a,
                });
            }
            level = next;
        }
        level.pop().unwrap_or_else(Real::one)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) => f.write_str(&format_rational(r)),
            Real::Approx(x) => write!(f, "{x:e}"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Exact(r) => s.serialize_str(&format_rational(r)),
            Real::Approx(x) => s.serialize_f64(*x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSpec {
    pub label: String,
    pub norm: u64,
    /// Coordinates of `[𝔭]` in the class group; empty for a trivial group.
    #[serde(default)]
    pub class: Vec<u32>,
}

/// Class group `ℤ/d_1 × … × ℤ/d_k` and a finite list of primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealSemigroupData {
    /// Invariant factors; empty for the trivial group.
    #[serde(default)]
    pub class_group: Vec<u32>,
    pub primes: Vec<PrimeSpec>,
}

pub type Class = Vec<u32>;

impl IdealSemigroupData {
    pub fn new(class_group: Vec<u32>, primes: Vec<PrimeSpec>) -> Result<Self> {
        let data = IdealSemigroupData {
            class_group,
            primes,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.class_group.iter().any(|&d| d < 2) {
            return Err(Error::Inconsistent(
                "class group factors must be >= 2".into(),
            ));
        }
        let mut labels = std::collections::BTreeSet::new();
        for p in &self.primes {
            if p.norm < 2 {
                return Err(Error::Inconsistent(format!(
                    "prime {} has norm {} < 2",
                    p.label, p.norm
                )));
            }
            if !labels.insert(&p.label) {
                return Err(Error::Inconsistent(format!(
                    "prime label {} repeated",
                    p.label
                )));
            }
            if p.class.len() != self.class_group.len()
                || p.class.iter().zip(&self.class_group).any(|(c, d)| c >= d)
            {
                return Err(Error::Inconsistent(format!(
                    "prime {} has a malformed class",
                    p.label
                )));
            }
        }
        Ok(())
    }

    /// `K = ℚ`: rational primes up to `bound`, trivial class group.
    pub fn rationals(bound: u64) -> Self {
        let primes = primes_up_to(bound)
            .into_iter()
            .map(|p| PrimeSpec {
                label: p.to_string(),
                norm: p,
                class: Vec::new(),
            })
            .collect();
        IdealSemigroupData {
            class_group: Vec::new(),
            primes,
        }
    }

    pub fn class_number(&self) -> usize {
        self.class_group.iter().map(|&d| d as usize).product()
    }

    /// All classes in lexicographic order, the trivial class first.
    pub fn classes(&self) -> Vec<Class> {
        let mut out = vec![Vec::new()];
        for &d in &self.class_group {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..d).map(move |k| {
                        let mut c = c.clone();
                        c.push(k);
                        c
                    })
                })
                .collect();
        }
        out
    }

    pub fn trivial_class(&self) -> Class {
        vec![0; self.class_group.len()]
    }

    pub fn class_label(&self, c: &[u32]) -> String {
        if c.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = c.iter().map(u32::to_string).collect();
        format!("({})", parts.join(","))
    }
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if sieve[p] {
            out.push(p as u64);
            for m in (p * p..=n).step_by(p) {
                sieve[m] = false;
            }
        }
    }
    out
}

/// Integral ideal `Π 𝔭_v^{e_v}`, stored sparsely as `(v, e_v)` pairs with
/// `e_v > 0` in increasing `v`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ideal(Vec<(usize, u32)>);

impl Ideal {
    pub fn unit() -> Ideal {
        Ideal(Vec::new())
    }

    pub fn prime(v: usize) -> Ideal {
        Ideal(vec![(v, 1)])
    }

    pub fn from_exponents(e: &[u32]) -> Ideal {
        Ideal(
            e.iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| (v, k))
                .collect(),
        )
    }

    /// Dense exponent vector over the first `n` primes.
    pub fn exponents(&self, n: usize) -> Vec<u32> {
        let mut e = vec![0; n];
        for &(v, k) in &self.0 {
            e[v] = k;
        }
        e
    }

    pub fn exponent(&self, v: usize) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |&(_, k)| k)
    }

    pub fn norm(&self, data: &IdealSemigroupData) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &(v, e)| {
            acc * num_traits::pow(BigInt::from(data.primes[v].norm), e as usize)
        })
    }

    /// The norm if it fits in `u64`.
    pub fn norm_u64(&self, data: &IdealSemigroupData) -> Option<u64> {
        self.0.iter().try_fold(1u64, |acc, &(v, e)| {
            data.primes[v]
                .norm
                .checked_pow(e)
                .and_then(|x| acc.checked_mul(x))
        })
    }

    pub fn class(&self, data: &IdealSemigroupData) -> Class {
        let mut c = data.trivial_class();
        for &(v, e) in &self.0 {
            for ((ci, pi), d) in c
                .iter_mut()
                .zip(&data.primes[v].class)
                .zip(&data.class_group)
            {
                *ci = ((*ci as u64 + e as u64 * *pi as u64) % *d as u64) as u32;
            }
        }
        c
    }

    pub fn mul(&self, other: &Ideal) -> Ideal {
        let mut out = BTreeMap::new();
        for &(v, e) in self.0.iter().chain(&other.0) {
            *out.entry(v).or_insert(0) += e;
        }
        Ideal(out.into_iter().collect())
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn label(&self, data: &IdealSemigroupData) -> String {
        if self.0.is_empty() {
            return "(1)".into();
        }
        self.0
            .iter()
            .map(|&(v, e)| {
                let p = &data.primes[v].label;
                if e == 1 {
                    format!("({p})")
                } else {
                    format!("({p})^{e}")
                }
            })
            .collect()
    }
}

/// All integral ideals of norm at most `bound`, sorted by norm and then by
/// their sparse exponent lists.
pub fn enumerate_ideals(data: &IdealSemigroupData, bound: u64) -> Vec<Ideal> {
    let mut order: Vec<usize> = (0..data.primes.len()).collect();
    order.sort_by_key(|&v| (data.primes[v].norm, v));
    // Each ideal is reached once: primes are appended in `order`, never
    // before the last one used.
    fn extend(
        data: &IdealSemigroupData,
        order: &[usize],
        bound: u64,
        start: usize,
        norm: u64,
        e: &mut Vec<usize>,
        out: &mut Vec<(u64, Ideal)>,
    ) {
        out.push((norm, ideal_of(e)));
        for (i, &v) in order.iter().enumerate().skip(start) {
            match norm.checked_mul(data.primes[v].norm) {
                Some(n) if n <= bound => {
                    e.push(v);
                    extend(data, order, bound, i, n, e, out);
                    e.pop();
                }
                _ => break,
            }
        }
    }
    fn ideal_of(e: &[usize]) -> Ideal {
        let mut m = BTreeMap::new();
        for &v in e {
            *m.entry(v).or_insert(0) += 1;
        }
        Ideal(m.into_iter().collect())
    }
    if bound == 0 {
        return Vec::new();
    }
    let firsts: Vec<(usize, u64)> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| (i, data.primes[v].norm))
        .take_while(|&(_, n)| n <= bound)
        .collect();
    let mut all: Vec<(u64, Ideal)> = firsts
        .par_iter()
        .flat_map_iter(|&(i, n)| {
            let mut out = Vec::new();
            let mut e = vec![order[i]];
            extend(data, &order, bound, i, n, &mut e, &mut out);
            out
        })
        .collect();
    all.push((1, Ideal::unit()));
    all.sort();
    all.into_iter().map(|(_, i)| i).collect()
}

/// Every exponent vector below `caps` (inclusive), in lexicographic order.
pub fn enumerate_capped(caps: &[u32]) -> Vec<Ideal> {
    let mut out = vec![Vec::new()];
    for &c in caps {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                (0..=c).map(move |k| {
                    let mut e = e.clone();
                    e.push(k);
                    e
                })
            })
            .collect();
    }
    out.iter().map(|e| Ideal::from_exponents(e)).collect()
}

/// `Σ N(𝔟)^{-s}` over ideals of class `cls` with norm at most `bound`.
pub fn partial_zeta(data: &IdealSemigroupData, s: &Rational, cls: &[u32], bound: u64) -> Real {
    enumerate_ideals(data, bound)
        .iter()
        .filter(|b| b.class(data) == cls)
        .map(|b| Real::norm_power(&b.norm(data), s))
        .sum()
}

/// `Σ N(𝔟)^{-s}` over all ideals with norm at most `bound`.
pub fn dedekind_zeta(data: &IdealSemigroupData, s: &Rational, bound: u64) -> Real {
    enumerate_ideals(data, bound)
        .iter()
        .map(|b| Real::norm_power(&b.norm(data), s))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    NormBound(u64),
    ExponentCaps(Vec<u32>),
}

impl Truncation {
    pub fn contains(&self, data: &IdealSemigroupData, b: &Ideal) -> bool {
        match self {
            Truncation::NormBound(bound) => b.norm_u64(data).is_some_and(|n| n <= *bound),
            Truncation::ExponentCaps(caps) => b.0.iter().all(|&(v, e)| e <= caps[v]),
        }
    }
}

/// Finitely supported weights on integral ideals, held as a common
/// `prefactor` times relative weights so that ratio checks never touch the
/// normalizer.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedIdealMeasure {
    pub prefactor: Real,
    pub relative: BTreeMap<Ideal, Real>,
    pub truncation: Truncation,
    /// Mass of the untruncated measure lying outside, when known.
    pub missing_mass: Option<Real>,
    pub warnings: Vec<String>,
}

impl TruncatedIdealMeasure {
    pub fn weight(&self, b: &Ideal) -> Real {
        self.relative
            .get(b)
            .map_or_else(Real::zero, |w| self.prefactor.clone() * w.clone())
    }

    pub fn weights(&self) -> impl Iterator<Item = (&Ideal, Real)> {
        self.relative
            .iter()
            .map(|(b, w)| (b, self.prefactor.clone() * w.clone()))
    }

    pub fn support_size(&self) -> usize {
        self.relative.len()
    }

    pub fn total(&self) -> Real {
        self.prefactor.clone() * self.relative.values().cloned().sum()
    }

    /// Overwrites one weight, keeping the prefactor.
    pub fn set_weight(&mut self, b: Ideal, w: Real) {
        let rel = w / self.prefactor.clone();
        self.relative.insert(b, rel);
    }

    /// Rescales to total mass 1.
    pub fn renormalized(&self) -> TruncatedIdealMeasure {
        let sum: Real = self.relative.values().cloned().sum();
        TruncatedIdealMeasure {
            prefactor: Real::one() / sum,
            missing_mass: None,
            ..self.clone()
        }
    }

    /// Restriction to the ideals accepted by `keep`.
    pub fn restricted(
        &self,
        keep: impl Fn(&Ideal) -> bool,
        truncation: Truncation,
    ) -> TruncatedIdealMeasure {
        TruncatedIdealMeasure {
            prefactor: self.prefactor.clone(),
            relative: self
                .relative
                .iter()
                .filter(|(b, _)| keep(b))
                .map(|(b, w)| (b.clone(), w.clone()))
                .collect(),
            truncation,
            missing_mass: None,
            warnings: self.warnings.clone(),
        }
    }
}

fn exponent(beta: &Rational) -> Rational {
    beta - Rational::one()
}

/// `ν_{𝔞,β}` on the class of `𝔞`, truncated at norm `bound` and
/// renormalized over the truncation.
pub fn nu_class_beta(
    data: &IdealSemigroupData,
    cls: &[u32],
    beta: &Rational,
    bound: u64,
) -> Result<TruncatedIdealMeasure> {
    let s = exponent(beta);
    let mut warnings = Vec::new();
    if s <= Rational::one() {
        warnings.push(format!(
            "beta - 1 = {} <= 1: the normalizer diverges and only the truncation is normalized",
            format_rational(&s)
        ));
    }
    let relative: BTreeMap<Ideal, Real> = enumerate_ideals(data, bound)
        .into_iter()
        .filter(|b| b.class(data) == cls)
        .map(|b| {
            let w = Real::norm_power(&b.norm(data), &s);
            (b, w)
        })
        .collect();
    if relative.is_empty() {
        return Err(Error::EmptyClassInTruncation(data.class_label(cls), bound));
    }
    let z: Real = relative.values().cloned().sum();
    Ok(TruncatedIdealMeasure {
        prefactor: Real::one() / z,
        relative,
        truncation: Truncation::NormBound(bound),
        missing_mass: None,
        warnings,
    })
}

/// `Π_v (1 - N_v^{-(β-1)})` over the listed primes.
pub fn product_prefactor(data: &IdealSemigroupData, beta: &Rational) -> Real {
    let s = exponent(beta);
    data.primes
        .iter()
        .map(|p| Real::one() - Real::norm_power(&BigInt::from(p.norm), &s))
        .product()
}

fn product_measure(
    data: &IdealSemigroupData,
    beta: &Rational,
    support: Vec<Ideal>,
    truncation: Truncation,
) -> Result<TruncatedIdealMeasure> {
    let s = exponent(beta);
    if !s.is_positive() {
        return Err(Error::Inconsistent("beta must exceed 1".into()));
    }
    let relative: BTreeMap<Ideal, Real> = support
        .into_iter()
        .map(|e| {
            let w = Real::norm_power(&e.norm(data), &s);
            (e, w)
        })
        .collect();
    let prefactor = product_prefactor(data, beta);
    let total = prefactor.clone() * relative.values().cloned().sum();
    Ok(TruncatedIdealMeasure {
        prefactor,
        relative,
        truncation,
        missing_mass: Some(Real::one() - total),
        warnings: Vec::new(),
    })
}

/// `Π_v ν_{β,v}` over the listed primes, each factor truncated at its cap.
pub fn nu_beta_product(
    data: &IdealSemigroupData,
    caps: &[u32],
    beta: &Rational,
) -> Result<TruncatedIdealMeasure> {
    if caps.len() != data.primes.len() {
        return Err(Error::Inconsistent("one cap per prime is required".into()));
    }
    product_measure(
        data,
        beta,
        enumerate_capped(caps),
        Truncation::ExponentCaps(caps.to_vec()),
    )
}

/// `Π_v ν_{β,v}` over the listed primes, restricted to ideals of norm at
/// most `bound`.
pub fn nu_beta_bounded(
    data: &IdealSemigroupData,
    beta: &Rational,
    bound: u64,
) -> Result<TruncatedIdealMeasure> {
    product_measure(
        data,
        beta,
        enumerate_ideals(data, bound),
        Truncation::NormBound(bound),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingWitness {
    pub ideal: Ideal,
    pub product: Ideal,
    pub expected: Real,
    pub found: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingCheck {
    pub factor: Ideal,
    pub pass: bool,
    /// Number of pairs `(𝔟, k𝔟)` compared.
    pub checked: usize,
    pub witness: Option<ScalingWitness>,
}

/// `weight(k𝔟) = N(k)^{-(β-1)} weight(𝔟)` for every `𝔟` in the support
/// with `k𝔟` inside the truncation.
pub fn check_scaling(
    data: &IdealSemigroupData,
    m: &TruncatedIdealMeasure,
    k: &Ideal,
    beta: &Rational,
) -> ScalingCheck {
    check_ratio(
        data,
        &m.relative,
        &m.truncation,
        k,
        &Real::norm_power(&k.norm(data), &exponent(beta)),
    )
}

fn check_ratio(
    data: &IdealSemigroupData,
    weights: &BTreeMap<Ideal, Real>,
    truncation: &Truncation,
    k: &Ideal,
    ratio: &Real,
) -> ScalingCheck {
    let mut checked = 0;
    for (b, w) in weights {
        let kb = k.mul(b);
        if !truncation.contains(data, &kb) {
            continue;
        }
        checked += 1;
        let expected = ratio.clone() * w.clone();
        let found = weights.get(&kb).cloned().unwrap_or_else(Real::zero);
        if !found.matches(&expected) {
            return ScalingCheck {
                factor: k.clone(),
                pass: false,
                checked,
                witness: Some(ScalingWitness {
                    ideal: b.clone(),
                    product: kb,
                    expected,
                    found,
                }),
            };
        }
    }
    ScalingCheck {
        factor: k.clone(),
        pass: true,
        checked,
        witness: None,
    }
}

/// The measure `μ` on pairs `(r, 𝔟)`, `r ∈ 𝒪/𝔟`, stored one block per ideal:
/// each of the `N(𝔟)` residues carries `ν(𝔟)/N(𝔟)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedMeasure {
    pub prefactor: Real,
    /// `(N(𝔟), relative per-residue weight)`.
    pub blocks: BTreeMap<Ideal, (BigInt, Real)>,
    pub truncation: Truncation,
}

impl LiftedMeasure {
    /// Weight of the pair `(r, 𝔟)`.
    pub fn weight(&self, r: &BigInt, b: &Ideal) -> Real {
        match self.blocks.get(b) {
            Some((n, w)) if !r.is_negative() && r < n => self.prefactor.clone() * w.clone(),
            _ => Real::zero(),
        }
    }

    pub fn total(&self) -> Real {
        self.prefactor.clone()
            * self
                .blocks
                .values()
                .map(|(n, w)| Real::Exact(Rational::from_integer(n.clone())) * w.clone())
                .sum()
    }

    /// Every pair with its weight; intended for small truncations.
    pub fn pairs(&self) -> impl Iterator<Item = (BigInt, &Ideal, Real)> {
        self.blocks.iter().flat_map(move |(b, (n, w))| {
            let w = self.prefactor.clone() * w.clone();
            num_iter(n.clone()).map(move |r| (r, b, w.clone()))
        })
    }
}

fn num_iter(n: BigInt) -> impl Iterator<Item = BigInt> {
    let mut r = BigInt::zero();
    std::iter::from_fn(move || {
        if r < n {
            let out = r.clone();
            r += 1;
            Some(out)
        } else {
            None
        }
    })
}

pub fn lift_mu_weights(data: &IdealSemigroupData, m: &TruncatedIdealMeasure) -> LiftedMeasure {
    LiftedMeasure {
        prefactor: m.prefactor.clone(),
        blocks: m
            .relative
            .iter()
            .map(|(b, w)| {
                let n = b.norm(data);
                let per = w.clone() / Real::Exact(Rational::from_integer(n.clone()));
                (b.clone(), (n, per))
            })
            .collect(),
        truncation: m.truncation.clone(),
    }
}

/// Per-pair weights scale by `N(k)^{-β}` from block `𝔟` to block `k𝔟`.
pub fn check_lifted_scaling(
    data: &IdealSemigroupData,
    lift: &LiftedMeasure,
    k: &Ideal,
    beta: &Rational,
) -> ScalingCheck {
    let per_pair: BTreeMap<Ideal, Real> = lift
        .blocks
        .iter()
        .map(|(b, (_, w))| (b.clone(), w.clone()))
        .collect();
    check_ratio(
        data,
        &per_pair,
        &lift.truncation,
        k,
        &Real::norm_power(&k.norm(data), beta),
    )
}

/// Partial products `Π_{v<P}(1 - N_v^{-(β-1)})` for each prefix size `P`.
pub fn product_mass_decay(
    data: &IdealSemigroupData,
    beta: &Rational,
    prefixes: &[usize],
) -> Vec<Real> {
    let s = exponent(beta);
    let mut out = Vec::with_capacity(prefixes.len());
    let mut acc = Real::one();
    let mut done = 0;
    for &p in prefixes {
        let p = p.min(data.primes.len());
        for prime in &data.primes[done.min(p)..p] {
            acc = acc * (Real::one() - Real::norm_power(&BigInt::from(prime.norm), &s));
        }
        done = done.max(p);
        out.push(acc.clone());
    }
    out
}

/// Comparison of `ν_β` with `Σ_n ζ(β-1,[𝔞_n])/ζ_K(β-1) ν_{𝔞_n,β}` on the
/// ideals of norm at most some bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexCombinationCheck {
    pub holds: bool,
    pub compared: usize,
    pub mismatch: Option<Ideal>,
    /// Mass of the product measure on the shared truncation before
    /// renormalization.
    pub product_mass: Real,
}

/// Both sides are restricted to the ideals of norm at most `bound` and
/// renormalized before comparison: the product measure carries the factor
/// `Π(1 - N_v^{-(β-1)})` where the combination carries `1/ζ_{K,B}(β-1)`.
pub fn convex_combination_identity(
    data: &IdealSemigroupData,
    beta: &Rational,
    bound: u64,
) -> Result<ConvexCombinationCheck> {
    let s = exponent(beta);
    let restricted = nu_beta_bounded(data, beta, bound)?;
    let product_mass = restricted.total();
    let lhs = restricted.renormalized();
    let zeta_k = dedekind_zeta(data, &s, bound);
    let mut rhs: BTreeMap<Ideal, Real> = BTreeMap::new();
    for cls in data.classes() {
        let coeff = partial_zeta(data, &s, &cls, bound) / zeta_k.clone();
        if coeff.is_zero() {
            continue;
        }
        for (b, w) in nu_class_beta(data, &cls, beta, bound)?.weights() {
            let e = rhs.entry(b.clone()).or_insert_with(Real::zero);
            *e = e.clone() + coeff.clone() * w;
        }
    }
    let mut compared = 0;
    let support: BTreeSet<&Ideal> = lhs.relative.keys().chain(rhs.keys()).collect();
    for b in support {
        compared += 1;
        let l = lhs.weight(b);
        let r = rhs.get(b).cloned().unwrap_or_else(Real::zero);
        if !l.matches(&r) {
            return Ok(ConvexCombinationCheck {
                holds: false,
                compared,
                mismatch: Some(b.clone()),
                product_mass,
            });
        }
    }
    Ok(ConvexCombinationCheck {
        holds: true,
        compared,
        mismatch: None,
        product_mass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightRow {
    pub ideal: String,
    pub norm: String,
    pub weight: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub class: String,
    pub partial_zeta: Real,
    pub measure: Option<Vec<WeightRow>>,
    pub scaling: Vec<ScalingCheck>,
    pub lifted_scaling: Vec<ScalingCheck>,
    pub lifted_mass: Option<Real>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductReport {
    pub measure: Vec<WeightRow>,
    pub missing_mass: Option<Real>,
    pub scaling: Vec<ScalingCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxbReport {
    pub beta: String,
    pub bound: u64,
    pub class_number: usize,
    pub exact: bool,
    pub classes: Vec<ClassReport>,
    pub product: ProductReport,
    pub convex_combination: Option<ConvexCombinationCheck>,
    pub decay: Vec<Real>,
    pub warnings: Vec<String>,
}

impl AxbReport {
    /// Every scaling check and the convex_combination identity hold.
    pub fn passed(&self) -> bool {
        self.classes
            .iter()
            .all(|c| c.scaling.iter().chain(&c.lifted_scaling).all(|s| s.pass))
            && self.product.scaling.iter().all(|s| s.pass)
            && self.convex_combination.as_ref().is_none_or(|f| f.holds)
    }
}

fn rows(data: &IdealSemigroupData, m: &TruncatedIdealMeasure) -> Vec<WeightRow> {
    let mut rows: Vec<(BigInt, WeightRow)> = m
        .weights()
        .map(|(b, w)| {
            let n = b.norm(data);
            let row = WeightRow {
                ideal: b.label(data),
                norm: n.to_string(),
                weight: w,
            };
            (n, row)
        })
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.ideal.cmp(&b.1.ideal)));
    rows.into_iter().map(|(_, r)| r).collect()
}

/// Zeta values, measure tables, scaling checks, the convex_combination identity (for
/// `β > 2`) and the decay sequence. Scaling is tested against every listed
/// prime for the product measure and against the first principal ideals for
/// the class measures.
pub fn axb_report(data: &IdealSemigroupData, beta: &Rational, bound: u64) -> Result<AxbReport> {
    data.validate()?;
    if *beta <= Rational::one() {
        return Err(Error::Inconsistent("beta must exceed 1".into()));
    }
    let s = exponent(beta);
    let trivial = data.trivial_class();
    let ideals = enumerate_ideals(data, bound);
    let factors: Vec<Ideal> = ideals
        .iter()
        .filter(|k| !k.is_unit() && k.class(data) == trivial)
        .take(16)
        .cloned()
        .collect();
    let mut warnings = Vec::new();
    let classes = data
        .classes()
        .into_iter()
        .map(|cls| {
            let zeta = partial_zeta(data, &s, &cls, bound);
            match nu_class_beta(data, &cls, beta, bound) {
                Ok(m) => {
                    for w in &m.warnings {
                        if !warnings.contains(w) {
                            warnings.push(w.clone());
                        }
                    }
                    let lift = lift_mu_weights(data, &m);
                    ClassReport {
                        class: data.class_label(&cls),
                        partial_zeta: zeta,
                        measure: Some(rows(data, &m)),
                        scaling: factors
                            .iter()
                            .map(|k| check_scaling(data, &m, k, beta))
                            .collect(),
                        lifted_scaling: factors
                            .iter()
                            .map(|k| check_lifted_scaling(data, &lift, k, beta))
                            .collect(),
                        lifted_mass: Some(lift.total()),
                        error: None,
                    }
                }
                Err(e) => ClassReport {
                    class: data.class_label(&cls),
                    partial_zeta: zeta,
                    measure: None,
                    scaling: Vec::new(),
                    lifted_scaling: Vec::new(),
                    lifted_mass: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let product = nu_beta_bounded(data, beta, bound)?;
    let product = ProductReport {
        measure: rows(data, &product),
        missing_mass: product.missing_mass.clone(),
        scaling: (0..data.primes.len())
            .filter(|&v| data.primes[v].norm <= bound)
            .map(|v| check_scaling(data, &product, &Ideal::prime(v), beta))
            .collect(),
    };
    let convex_combination = if s > Rational::one() {
        Some(convex_combination_identity(data, beta, bound)?)
    } else {
        None
    };
    let prefixes: Vec<usize> = (1..=data.primes.len()).collect();
    Ok(AxbReport {
        beta: format_rational(beta),
        bound,
        class_number: data.class_number(),
        exact: s.is_integer(),
        classes,
        product,
        convex_combination,
        decay: product_mass_decay(data, beta, &prefixes),
        warnings,
    })
}
