//! The convolution `*`-algebra of a finite groupoid and linear functionals on it.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::cyclotomic::{format_rational, parse_rational, rat_pow, Rational};
use crate::error::{Error, Result};
use crate::groupoid::{Cocycle, FiniteGroupoid};
use crate::positivity::{PositivityMethod, PositivityReport};
use crate::scalar::{Scalar, C64};

/// `q = e^{-β}`, a positive rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Temperature(Rational);

impl Temperature {
    pub fn new(q: Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidTemperature(format_rational(&q)));
        }
        Ok(Temperature(q))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let q = parse_rational(s).ok_or_else(|| Error::InvalidTemperature(s.to_string()))?;
        Self::new(q)
    }

    pub fn q(&self) -> &Rational {
        &self.0
    }

    /// `q^k`.
    pub fn pow(&self, k: i64) -> Rational {
        rat_pow(&self.0, k)
    }

    pub fn inverse(&self) -> Temperature {
        Temperature(self.0.recip())
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// Finitely supported function on the arrows, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<S> {
    groupoid: Arc<FiniteGroupoid>,
    coeffs: Vec<S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero(groupoid: &Arc<FiniteGroupoid>) -> Self {
        AlgebraElement {
            groupoid: groupoid.clone(),
            coeffs: vec![S::zero(); groupoid.num_arrows()],
        }
    }

    /// The basis element `δ_g`.
    pub fn delta(groupoid: &Arc<FiniteGroupoid>, g: usize) -> Self {
        let mut out = Self::zero(groupoid);
        out.coeffs[g] = S::one();
        out
    }

    pub fn from_coeffs(groupoid: &Arc<FiniteGroupoid>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != groupoid.num_arrows() {
            return Err(Error::GroupoidMismatch);
        }
        Ok(AlgebraElement {
            groupoid: groupoid.clone(),
            coeffs,
        })
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn coeff(&self, g: usize) -> &S {
        &self.coeffs[g]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn set(&mut self, g: usize, v: S) {
        self.coeffs[g] = v;
    }

    /// Nonzero coefficients in arrow order.
    pub fn support(&self) -> impl Iterator<Item = (usize, &S)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.groupoid, &other.groupoid) || self.groupoid == other.groupoid {
            Ok(())
        } else {
            Err(Error::GroupoidMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a.clone() + b.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a.clone() - b.clone()))
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|_, c| k.clone() * c.clone())
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        AlgebraElement {
            groupoid: self.groupoid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    fn map(&self, f: impl Fn(usize, &S) -> S) -> Self {
        AlgebraElement {
            groupoid: self.groupoid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(g, c)| f(g, c))
                .collect(),
        }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.approx_eq(b))
    }
}

/// `(f₁*f₂)(g) = Σ_{h ∈ G^{r(g)}} f₁(h) f₂(h⁻¹g)`.
pub fn convolve<S: Scalar>(
    f1: &AlgebraElement<S>,
    f2: &AlgebraElement<S>,
) -> Result<AlgebraElement<S>> {
    f1.check_same(f2)?;
    let g = &f1.groupoid;
    let mut out = AlgebraElement::<S>::zero(g);
    // Every (h, h⁻¹g) pair is a composable (a, b) with ab = g.
    for (a, x) in f1.support() {
        for &b in g.arrows_into(g.src(a)) {
            let y = &f2.coeffs[b];
            if y.is_zero() {
                continue;
            }
            let ab = g.compose(a, b).expect("composable");
            out.coeffs[ab] = out.coeffs[ab].clone() + x.clone() * y.clone();
        }
    }
    Ok(out)
}

/// `f*(g) = conj f(g⁻¹)`.
pub fn star<S: Scalar>(f: &AlgebraElement<S>) -> AlgebraElement<S> {
    let g = &f.groupoid;
    f.map(|h, _| f.coeffs[g.inv(h)].conj())
}

/// `σ_{iβ}`: multiplies the coefficient at `g` by `q^{c(g)}`.
pub fn gibbs_twist<S: Scalar>(
    f: &AlgebraElement<S>,
    c: &Cocycle,
    q: &Temperature,
) -> AlgebraElement<S> {
    f.map(|g, x| {
        let k = c.value(g);
        if k == 0 || x.is_zero() {
            x.clone()
        } else {
            S::from_rational(&q.pow(k)) * x.clone()
        }
    })
}

/// `σ_t`: multiplies the coefficient at `g` by `e^{itc(g)}`. Float mode only.
pub fn time_action<S: Scalar>(
    f: &AlgebraElement<S>,
    c: &Cocycle,
    t: f64,
) -> Result<AlgebraElement<C64>> {
    if S::EXACT {
        return Err(Error::ExactModeUnsupported);
    }
    Ok(AlgebraElement {
        groupoid: f.groupoid.clone(),
        coeffs: f
            .coeffs
            .iter()
            .enumerate()
            .map(|(g, x)| x.to_c64() * C64::from_polar(1.0, t * c.value(g) as f64))
            .collect(),
    })
}

/// Restriction to the unit arrows.
pub fn conditional_expectation<S: Scalar>(f: &AlgebraElement<S>) -> AlgebraElement<S> {
    let g = f.groupoid.clone();
    f.map(|h, x| {
        if g.is_unit_arrow(h) {
            x.clone()
        } else {
            S::zero()
        }
    })
}

/// Linear functional `φ(δ_g) = w(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional<S> {
    groupoid: Arc<FiniteGroupoid>,
    weights: Vec<S>,
}

impl<S: Scalar> Functional<S> {
    pub fn new(groupoid: &Arc<FiniteGroupoid>, weights: Vec<S>) -> Result<Self> {
        if weights.len() != groupoid.num_arrows() {
            return Err(Error::GroupoidMismatch);
        }
        Ok(Functional {
            groupoid: groupoid.clone(),
            weights,
        })
    }

    pub fn zero(groupoid: &Arc<FiniteGroupoid>) -> Self {
        Functional {
            groupoid: groupoid.clone(),
            weights: vec![S::zero(); groupoid.num_arrows()],
        }
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn weight(&self, g: usize) -> &S {
        &self.weights[g]
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn set(&mut self, g: usize, v: S) {
        self.weights[g] = v;
    }

    /// `φ(f) = Σ_g f(g) w(g)`.
    pub fn apply(&self, f: &AlgebraElement<S>) -> Result<S> {
        if f.coeffs.len() != self.weights.len() || *f.groupoid != *self.groupoid {
            return Err(Error::GroupoidMismatch);
        }
        Ok(f.support().fold(S::zero(), |acc, (g, x)| {
            acc + x.clone() * self.weights[g].clone()
        }))
    }

    /// First arrow with `w(g⁻¹) ≠ conj w(g)`.
    pub fn hermitian_defect(&self) -> Option<usize> {
        (0..self.weights.len())
            .find(|&g| !self.weights[self.groupoid.inv(g)].approx_eq(&self.weights[g].conj()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect().is_none()
    }

    /// `Σ_{units x} w(x)`.
    pub fn unit_mass(&self) -> S {
        (0..self.groupoid.num_units()).fold(S::zero(), |acc, x| {
            acc + self.weights[self.groupoid.unit_arrow(x)].clone()
        })
    }

    pub fn is_normalized(&self) -> bool {
        self.unit_mass().approx_eq(&S::one())
    }

    fn require_hermitian(&self) -> Result<()> {
        match self.hermitian_defect() {
            Some(g) => Err(Error::NotHermitian(self.groupoid.arrow(g).id.clone())),
            None => Ok(()),
        }
    }

    /// `M[g,h] = w(g⁻¹h)` if `r(g) = r(h)`, else 0.
    pub fn moment_matrix(&self) -> Result<Vec<Vec<S>>> {
        self.require_hermitian()?;
        let g = &self.groupoid;
        let n = g.num_arrows();
        let mut m = vec![vec![S::zero(); n]; n];
        for x in 0..g.num_units() {
            let fibre = g.arrows_into(x);
            for &a in fibre {
                for &b in fibre {
                    m[a][b] = self.moment(a, b);
                }
            }
        }
        Ok(m)
    }

    fn moment(&self, a: usize, b: usize) -> S {
        let g = &self.groupoid;
        self.weights[g.compose(g.inv(a), b).expect("same range")].clone()
    }

    /// The moment matrix is block diagonal with one block per range unit;
    /// block `x` is indexed by `arrows_into(x)`.
    pub fn moment_blocks(&self) -> Result<Vec<Vec<Vec<S>>>> {
        self.require_hermitian()?;
        let g = &self.groupoid;
        Ok((0..g.num_units())
            .map(|x| {
                let fibre = g.arrows_into(x);
                fibre
                    .iter()
                    .map(|&a| fibre.iter().map(|&b| self.moment(a, b)).collect())
                    .collect()
            })
            .collect())
    }

    /// Positivity of `f ↦ φ(f^* * f)` via the moment-matrix blocks.
    pub fn is_positive(&self, method: &dyn PositivityMethod) -> Result<PositivityReport> {
        method.check(&S::into_blocks(self.moment_blocks()?))
    }

    /// `w ∘ σ_{iβ}`.
    pub fn twisted(&self, c: &Cocycle, q: &Temperature) -> Self {
        let f = AlgebraElement {
            groupoid: self.groupoid.clone(),
            coeffs: self.weights.clone(),
        };
        Functional {
            groupoid: self.groupoid.clone(),
            weights: gibbs_twist(&f, c, q).coeffs,
        }
    }
}

/// Parses expressions such as `3*d(g1) + (1+2i)*d(g2) - 1/2 d(x)`.
///
/// Coefficients are gaussian rationals: integers, fractions, decimals,
/// `i`, `2i`, or a parenthesized sum like `(1-3/2i)`. Arrow ids inside
/// `d(…)` may themselves contain balanced parentheses.
pub fn parse_element<S: Scalar>(
    groupoid: &Arc<FiniteGroupoid>,
    text: &str,
) -> Result<AlgebraElement<S>> {
    let mut p = ExprParser {
        src: text.as_bytes(),
        text,
        pos: 0,
    };
    let mut out = AlgebraElement::<S>::zero(groupoid);
    p.skip_ws();
    let mut first = true;
    while p.pos < p.src.len() {
        let sign = match p.peek() {
            Some(b'+') => {
                p.pos += 1;
                Rational::from_integer(1.into())
            }
            Some(b'-') => {
                p.pos += 1;
                Rational::from_integer((-1).into())
            }
            _ if first => Rational::from_integer(1.into()),
            _ => return Err(p.error("expected '+' or '-'")),
        };
        first = false;
        p.skip_ws();
        let (re, im) = if p.starts_with("d(") {
            (Rational::from_integer(1.into()), Rational::zero())
        } else {
            let c = p.coefficient()?;
            p.skip_ws();
            if p.peek() == Some(b'*') {
                p.pos += 1;
                p.skip_ws();
            }
            c
        };
        if !p.starts_with("d(") {
            return Err(p.error("expected d(<arrow>)"));
        }
        p.pos += 2;
        let id = p.balanced()?;
        let g = groupoid.arrow_index(id.trim())?;
        let k = S::from_gaussian(&(&sign * re), &(&sign * im));
        out.coeffs[g] = out.coeffs[g].clone() + k;
        p.skip_ws();
    }
    if first {
        return Err(p.error("empty expression"));
    }
    Ok(out)
}

struct ExprParser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl ExprParser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Schema {
            pointer: format!("expression@{}", self.pos),
            message: format!("{message} in {:?}", self.text),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    /// Reads up to the parenthesis closing an already consumed `(`.
    fn balanced(&mut self) -> Result<&str> {
        let start = self.pos;
        let mut depth = 1;
        while let Some(c) = self.peek() {
            self.pos += 1;
            match c {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(&self.text[start..self.pos - 1]);
                    }
                }
                _ => {}
            }
        }
        Err(self.error("unbalanced parentheses"))
    }

    fn coefficient(&mut self) -> Result<(Rational, Rational)> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let inner = self.balanced()?.to_string();
            return parse_gaussian(&inner).ok_or_else(|| self.error("bad complex coefficient"));
        }
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_digit() || c == b'/' || c == b'.')
        {
            self.pos += 1;
        }
        if self.peek() == Some(b'i') {
            self.pos += 1;
        }
        let tok = &self.text[start..self.pos];
        parse_gaussian(tok).ok_or_else(|| self.error("bad coefficient"))
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` with rational or decimal parts.
pub fn parse_gaussian(s: &str) -> Option<(Rational, Rational)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let mut re = Rational::zero();
    let mut im = Rational::zero();
    let bytes = s.as_bytes();
    let mut start = 0;
    for k in 1..=bytes.len() {
        if k == bytes.len() || ((bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'/') {
            let part = &s[start..k];
            let (neg, body) = match part.as_bytes().first()? {
                b'+' => (false, &part[1..]),
                b'-' => (true, &part[1..]),
                _ => (false, part),
            };
            let (imag, num) = match body.strip_suffix('i') {
                Some(n) => (true, n.strip_suffix('*').unwrap_or(n)),
                None => (false, body),
            };
            let mut v = if imag && num.is_empty() {
                Rational::from_integer(1.into())
            } else {
                parse_decimal(num)?
            };
            if neg {
                v = -v;
            }
            if imag {
                im += v;
            } else {
                re += v;
            }
            start = k;
        }
    }
    Some((re, im))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    if let Some((a, b)) = s.split_once('.') {
        if b.contains('/') || (a.is_empty() && b.is_empty()) {
            return None;
        }
        let digits = format!("{a}{b}");
        let num = parse_rational(&digits)?;
        let den = rat_pow(&Rational::from_integer(10.into()), b.len() as i64);
        return Some(num / den);
    }
    parse_rational(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{rat, Cyclotomic};
    use crate::group::small;
    use crate::groupoid::{group_groupoid, pair_groupoid, validate_cocycle};
    use crate::positivity::{EigenPositivity, LdlPositivity};
    use std::collections::BTreeMap;

    type E = AlgebraElement<Cyclotomic>;

    fn pair() -> Arc<FiniteGroupoid> {
        Arc::new(pair_groupoid(&["x", "y"]))
    }

    fn c(re: i64, im: i64) -> Cyclotomic {
        Cyclotomic::gaussian(rat(re, 1), rat(im, 1))
    }

    fn el(g: &Arc<FiniteGroupoid>, s: &str) -> E {
        parse_element(g, s).unwrap()
    }

    fn pair_cocycle(g: &FiniteGroupoid, k: i64) -> Cocycle {
        let v: BTreeMap<String, i64> = [("x>y".to_string(), k), ("y>x".to_string(), -k)].into();
        validate_cocycle(g, &v).unwrap()
    }

    #[test]
    fn basis_products() {
        let g = pair();
        let a = g.arrow_index("x>y").unwrap();
        let b = g.arrow_index("y>x").unwrap();
        let y = g.arrow_index("y").unwrap();
        let ab = convolve(&E::delta(&g, a), &E::delta(&g, b)).unwrap();
        assert_eq!(ab, E::delta(&g, g.arrow_index("y").unwrap()));
        // s(x>y) = x but r(x>y) = y
        assert!(convolve(&E::delta(&g, a), &E::delta(&g, a))
            .unwrap()
            .is_zero());
        assert!(convolve(&E::delta(&g, y), &E::delta(&g, b))
            .unwrap()
            .is_zero());
        assert_eq!(
            convolve(&E::delta(&g, y), &E::delta(&g, a)).unwrap(),
            E::delta(&g, a)
        );
    }

    #[test]
    fn square_of_symmetric_element() {
        let g = pair();
        let f = el(&g, "d(x>y) + d(y>x)");
        assert_eq!(convolve(&f, &f).unwrap(), el(&g, "d(x) + d(y)"));
    }

    #[test]
    fn involution() {
        let g = pair();
        assert_eq!(star(&el(&g, "d(x>y)")), el(&g, "d(y>x)"));
        assert_eq!(star(&el(&g, "i*d(x)")), el(&g, "-i*d(x)"));
        assert_eq!(
            star(&el(&g, "(1+i)*d(x>y) + 2*d(y)")),
            el(&g, "(1-i)*d(y>x) + 2*d(y)")
        );
    }

    #[test]
    fn gibbs_twist_examples() {
        let g = pair();
        let c1 = pair_cocycle(&g, 1);
        let half = Temperature::parse("1/2").unwrap();
        assert_eq!(
            gibbs_twist(&el(&g, "d(x>y)"), &c1, &half),
            el(&g, "1/2*d(x>y)")
        );
        let c2 = pair_cocycle(&g, 2);
        let third = Temperature::parse("1/3").unwrap();
        assert_eq!(
            gibbs_twist(&el(&g, "d(x>y) + d(y>x)"), &c2, &third),
            el(&g, "1/9*d(x>y) + 9*d(y>x)")
        );
        let f = el(&g, "(2+i)*d(x>y) - d(x)");
        assert_eq!(gibbs_twist(&f, &Cocycle::zero(&g), &half), f);
    }

    #[test]
    fn time_action_examples() {
        let g = pair();
        let f: AlgebraElement<C64> = parse_element(&g, "d(x>y)").unwrap();
        let pi = std::f64::consts::PI;
        let r = time_action(&f, &pair_cocycle(&g, 1), pi).unwrap();
        assert!(r.approx_eq(&parse_element(&g, "-1*d(x>y)").unwrap()));
        let r = time_action(&f, &pair_cocycle(&g, 2), pi / 2.0).unwrap();
        assert!(r.approx_eq(&parse_element(&g, "-1*d(x>y)").unwrap()));
        assert!(time_action(&f, &pair_cocycle(&g, 2), 0.0)
            .unwrap()
            .approx_eq(&f));
        let exact = el(&g, "d(x>y)");
        assert_eq!(
            time_action(&exact, &pair_cocycle(&g, 1), 1.0),
            Err(Error::ExactModeUnsupported)
        );
    }

    #[test]
    fn expectation() {
        let g = pair();
        assert_eq!(conditional_expectation(&el(&g, "d(x)")), el(&g, "d(x)"));
        assert!(conditional_expectation(&el(&g, "d(x>y)")).is_zero());
        assert_eq!(
            conditional_expectation(&el(&g, "3*d(x) + (1+i)*d(x>y)")),
            el(&g, "3*d(x)")
        );
    }

    fn z2_functional(e: i64, s: i64) -> Functional<Cyclotomic> {
        let g = Arc::new(group_groupoid(&small::cyclic(2), "e"));
        let sigma = g.arrow_index("(1,e)").unwrap();
        let mut w = Functional::zero(&g);
        w.set(g.unit_arrow(0), Cyclotomic::from_int(e));
        w.set(sigma, Cyclotomic::from_int(s));
        w
    }

    #[test]
    fn moment_matrices() {
        let ones = z2_functional(1, 1).moment_matrix().unwrap();
        assert!(ones.iter().flatten().all(|v| v.is_one()));
        let m = z2_functional(1, -1).moment_matrix().unwrap();
        assert_eq!(m[0][0], c(1, 0));
        assert_eq!(m[0][1], c(-1, 0));

        let g = pair();
        let mut w = Functional::zero(&g);
        for x in 0..2 {
            w.set(g.unit_arrow(x), Cyclotomic::from_rational(rat(1, 2)));
        }
        let m = w.moment_matrix().unwrap();
        for a in 0..4 {
            for b in 0..4 {
                // oracle: δ_a^* * δ_b computed through the algebra
                let prod = convolve(&star(&E::delta(&g, a)), &E::delta(&g, b)).unwrap();
                assert_eq!(m[a][b], w.apply(&prod).unwrap());
            }
        }
        let blocks = w.moment_blocks().unwrap();
        assert_eq!(blocks.len(), 2);
        let half = Cyclotomic::from_rational(rat(1, 2));
        assert_eq!(
            blocks[0],
            vec![vec![half.clone(), c(0, 0)], vec![c(0, 0), half]]
        );
    }

    #[test]
    fn non_hermitian_moment_matrix() {
        let g = pair();
        let mut w = Functional::zero(&g);
        w.set(g.arrow_index("x>y").unwrap(), c(1, 0));
        assert!(matches!(w.moment_matrix(), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn positivity_examples() {
        assert!(
            z2_functional(1, 0)
                .is_positive(&LdlPositivity)
                .unwrap()
                .positive
        );
        assert!(
            !z2_functional(1, 2)
                .is_positive(&LdlPositivity)
                .unwrap()
                .positive
        );
        let r = z2_functional(1, 2).is_positive(&EigenPositivity).unwrap();
        assert!(!r.positive);
        let crate::positivity::Certificate::Eigen { min_eigenvalue, .. } = r.certificate else {
            panic!()
        };
        assert!((min_eigenvalue + 1.0).abs() < 1e-12);

        // Gibbs state (2/3, 1/3) on the pair groupoid
        let g = pair();
        let mut w = Functional::zero(&g);
        w.set(g.unit_arrow(0), Cyclotomic::from_rational(rat(2, 3)));
        w.set(g.unit_arrow(1), Cyclotomic::from_rational(rat(1, 3)));
        let r = w.is_positive(&LdlPositivity).unwrap();
        assert!(r.positive);
        let crate::positivity::Certificate::Ldl { factors } = r.certificate else {
            panic!()
        };
        for (f, block) in factors.iter().zip(w.moment_blocks().unwrap()) {
            let permuted: Vec<Vec<Cyclotomic>> = f
                .order
                .iter()
                .map(|&i| f.order.iter().map(|&j| block[i][j].clone()).collect())
                .collect();
            assert_eq!(f.reconstruct(), permuted);
        }
    }

    #[test]
    fn parser_forms() {
        let g = pair();
        let f = el(&g, "3*d(x) + (1+2i)*d(x>y) - 1/2 d(y) + 0.25*d(y>x)");
        assert_eq!(f.coeff(0), &c(3, 0));
        assert_eq!(*f.coeff(g.arrow_index("x>y").unwrap()), c(1, 2));
        assert_eq!(
            *f.coeff(g.arrow_index("y").unwrap()),
            Cyclotomic::from_rational(rat(-1, 2))
        );
        assert_eq!(
            *f.coeff(g.arrow_index("y>x").unwrap()),
            Cyclotomic::from_rational(rat(1, 4))
        );
        assert_eq!(*el(&g, "2i*d(x)").coeff(0), c(0, 2));
        assert!(parse_element::<Cyclotomic>(&g, "d(zz)").is_err());
        assert!(parse_element::<Cyclotomic>(&g, "3*").is_err());
        assert!(parse_element::<Cyclotomic>(&g, "").is_err());

        let z2 = Arc::new(group_groupoid(&small::cyclic(2), "e"));
        let f: E = parse_element(&z2, "d((1,e)) - d(e)").unwrap();
        assert_eq!(*f.coeff(z2.arrow_index("(1,e)").unwrap()), c(1, 0));
    }

    #[test]
    fn temperature_must_be_positive() {
        assert!(Temperature::parse("0").is_err());
        assert!(Temperature::parse("-1/2").is_err());
        assert!(Temperature::parse("x").is_err());
        assert_eq!(Temperature::parse("2/4").unwrap().to_string(), "1/2");
    }
}
