//! Exact arithmetic in cyclotomic fields.
//!
//! A [`Cyclotomic`] is an element of `Q(ζ_n)` stored in the power basis
//! `1, ζ, …, ζ^{φ(n)-1}` modulo the cyclotomic polynomial `Φ_n`. Values of
//! different conductors are lifted to the least common multiple before any
//! binary operation, so equality is exact across fields.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Shorthand for the rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// `q^k` for a rational base and integer exponent.
pub fn rat_pow(q: &Rational, k: i64) -> Rational {
    let base = if k < 0 { q.recip() } else { q.clone() };
    num_traits::pow(base, k.unsigned_abs() as usize)
}

/// Parses `"p/q"`, `"p"` or a decimal-free integer into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: scale through logarithms.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn euler_phi(n: u32) -> usize {
    let mut result = n as usize;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p as usize;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m as usize;
    }
    result
}

/// Integer coefficients of `Φ_n`, lowest degree first.
fn cyclotomic_poly(n: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let div = cyclotomic_poly(d);
            num = exact_poly_div(&num, &div);
        }
    }
    let arc = Arc::new(num);
    cache.lock().unwrap().insert(n, arc.clone());
    arc
}

/// Division of integer polynomials by a monic divisor, remainder must vanish.
fn exact_poly_div(num: &[BigInt], div: &[BigInt]) -> Vec<BigInt> {
    let dn = div.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dn];
    for k in (dn..num.len()).rev() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        quot[k - dn] = c.clone();
        for (j, dj) in div.iter().enumerate() {
            rem[k - dn + j] -= &c * dj;
        }
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Element of the cyclotomic field `Q(ζ_order)`, `ζ = e^{2πi/order}`.
#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn from_rational(r: Rational) -> Self {
        Cyclotomic {
            order: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(i: i64) -> Self {
        Self::from_rational(int(i))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit, as `ζ_4`.
    pub fn i() -> Self {
        Self::root_of_unity(4, 1)
    }

    /// `re + i·im` in `Q(i)`.
    pub fn gaussian(re: Rational, im: Rational) -> Self {
        if im.is_zero() {
            return Self::from_rational(re);
        }
        Cyclotomic {
            order: 4,
            coeffs: vec![re, im],
        }
    }

    /// `ζ_n^k`.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        assert!(n >= 1);
        let k = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![Rational::zero(); k + 1];
        poly[k] = Rational::one();
        Self::reduce(n, poly)
    }

    /// `Σ_j mult[j]·ζ_n^j`.
    pub fn from_root_multiplicities(n: u32, mult: &[i64]) -> Self {
        let poly = mult.iter().map(|&m| int(m)).collect();
        Self::reduce(n, poly)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn reduce(n: u32, mut poly: Vec<Rational>) -> Self {
        let phi = euler_phi(n);
        if n == 1 || n == 2 {
            // Q(ζ_1) = Q(ζ_2) = Q; ζ_2 = -1.
            let mut acc = Rational::zero();
            for (k, c) in poly.into_iter().enumerate() {
                if n == 2 && k % 2 == 1 {
                    acc -= c;
                } else {
                    acc += c;
                }
            }
            return Self::from_rational(acc);
        }
        let phi_poly = cyclotomic_poly(n);
        // Reduce x^k for k >= n using x^n = 1 first; keeps the division short.
        if poly.len() > n as usize {
            let mut folded = vec![Rational::zero(); n as usize];
            for (k, c) in poly.into_iter().enumerate() {
                if !c.is_zero() {
                    folded[k % n as usize] += c;
                }
            }
            poly = folded;
        }
        for k in (phi..poly.len()).rev() {
            if poly[k].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut poly[k], Rational::zero());
            for (j, pj) in phi_poly.iter().enumerate().take(phi) {
                if !pj.is_zero() {
                    poly[k - phi + j] -= &c * Rational::from_integer(pj.clone());
                }
            }
        }
        poly.resize(phi, Rational::zero());
        let mut out = Cyclotomic {
            order: n,
            coeffs: poly,
        };
        out.demote();
        out
    }

    /// Rationals are always stored at order 1, which keeps the hot paths cheap.
    fn demote(&mut self) {
        if self.order > 1 && self.coeffs[1..].iter().all(Zero::is_zero) {
            let c = self.coeffs[0].clone();
            self.order = 1;
            self.coeffs = vec![c];
        }
    }

    /// Re-expresses `self` in `Q(ζ_m)`; `self.order` must divide `m`.
    fn lift(&self, m: u32) -> Cyclotomic {
        if self.order == m {
            return self.clone();
        }
        debug_assert_eq!(m % self.order, 0);
        if self.order == 1 {
            return Cyclotomic {
                order: m,
                coeffs: {
                    let mut v = vec![Rational::zero(); euler_phi(m)];
                    v[0] = self.coeffs[0].clone();
                    v
                },
            };
        }
        let step = (m / self.order) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[k * step] = c.clone();
        }
        let mut out = Self::reduce(m, poly);
        if out.order != m {
            // reduce() demoted a rational; re-expand for uniform length
            out = out.lift(m);
        }
        out
    }

    fn common(a: &Cyclotomic, b: &Cyclotomic) -> (Cyclotomic, Cyclotomic, u32) {
        if a.order == b.order {
            return (a.clone(), b.clone(), a.order);
        }
        let m = a.order.lcm(&b.order);
        (a.lift(m), b.lift(m), m)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    /// The value as a rational, if it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.order == 1 {
            Some(self.coeffs[0].clone())
        } else if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Complex conjugation, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Cyclotomic {
        if self.order <= 2 {
            return self.clone();
        }
        let n = self.order as usize;
        let mut poly = vec![Rational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[(n - k) % n] += c;
            }
        }
        Self::reduce(self.order, poly)
    }

    /// Real and imaginary parts, when both are rational.
    pub fn to_gaussian(&self) -> Option<(Rational, Rational)> {
        if let Some(r) = self.to_rational() {
            return Some((r, Rational::zero()));
        }
        let two = Cyclotomic::from_int(2);
        let c = self.conj();
        let re = (self.clone() + c.clone()) / two.clone();
        let im = (self.clone() - c) / (two * Cyclotomic::i());
        Some((re.to_rational()?, im.to_rational()?))
    }

    /// Real part `(a + ā)/2`, an element of the same field.
    pub fn re(&self) -> Cyclotomic {
        (self.clone() + self.conj()) * Cyclotomic::from_rational(rat(1, 2))
    }

    /// Imaginary part `(a − ā)/(2i)`; lives in `Q(ζ_lcm(n,4))`.
    pub fn im(&self) -> Cyclotomic {
        (self.clone() - self.conj()) / (Cyclotomic::from_int(2) * Cyclotomic::i())
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2 || *self == self.conj()
    }

    pub fn to_c64(&self) -> num_complex::Complex<f64> {
        let n = self.order as f64;
        let mut acc = num_complex::Complex::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n;
            acc += num_complex::Complex::from_polar(rational_to_f64(c), theta);
        }
        acc
    }

    /// Sign of a real element. Zero is decided exactly; the sign of a nonzero
    /// value comes from the canonical complex embedding.
    pub fn real_sign(&self) -> std::cmp::Ordering {
        debug_assert!(self.is_real(), "sign of a non-real cyclotomic");
        if let Some(r) = self.to_rational() {
            return r.cmp(&Rational::zero());
        }
        if self.is_zero() {
            return std::cmp::Ordering::Equal;
        }
        let v = self.to_c64().re;
        v.partial_cmp(&0.0).unwrap_or(std::cmp::Ordering::Equal)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Cyclotomic> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.to_rational() {
            return Some(Cyclotomic::from_rational(r.recip()));
        }
        let n = self.order;
        let modulus: Vec<Rational> = cyclotomic_poly(n)
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let u = poly_inverse_mod(&self.coeffs, &modulus)?;
        Some(Self::reduce(n, u))
    }
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_is_zero(p: &[Rational]) -> bool {
    p.iter().all(Zero::is_zero)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    trim(&mut out);
    out
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() < b.len() {
        return (vec![Rational::zero()], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for k in (db..rem.len()).rev() {
        let c = &rem[k] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[k - db + j] -= &c * bj;
        }
        quot[k - db] = c;
    }
    rem.truncate(db.max(1));
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

/// Extended Euclid over `Q[x]`: `u` with `u·a ≡ 1 (mod m)`.
fn poly_inverse_mod(a: &[Rational], m: &[Rational]) -> Option<Vec<Rational>> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    trim(&mut r1);
    let (mut s0, mut s1) = (vec![Rational::zero()], vec![Rational::one()]);
    while !poly_is_zero(&r1) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r0 is the gcd; a unit constant when a is invertible mod m.
    if r0.len() != 1 || r0[0].is_zero() {
        return None;
    }
    let c = r0[0].recip();
    Some(s0.into_iter().map(|x| x * &c).collect())
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b, _) = Cyclotomic::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Cyclotomic) -> Cyclotomic {
        if self.order == 1 && rhs.order == 1 {
            return Cyclotomic::from_rational(&self.coeffs[0] + &rhs.coeffs[0]);
        }
        let (a, b, m) = Cyclotomic::common(&self, &rhs);
        let coeffs = a
            .coeffs
            .into_iter()
            .zip(b.coeffs)
            .map(|(x, y)| x + y)
            .collect();
        let mut out = Cyclotomic { order: m, coeffs };
        out.demote();
        out
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        self + (-rhs)
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        if self.order == 1 && rhs.order == 1 {
            return Cyclotomic::from_rational(&self.coeffs[0] * &rhs.coeffs[0]);
        }
        if self.order == 1 || rhs.order == 1 {
            let (s, v) = if self.order == 1 {
                (self, rhs)
            } else {
                (rhs, self)
            };
            let k = &s.coeffs[0];
            let mut out = Cyclotomic {
                order: v.order,
                coeffs: v.coeffs.into_iter().map(|c| c * k).collect(),
            };
            out.demote();
            return out;
        }
        let (a, b, m) = Cyclotomic::common(&self, &rhs);
        Cyclotomic::reduce(m, poly_mul(&a.coeffs, &b.coeffs))
    }
}

impl Div for Cyclotomic {
    type Output = Cyclotomic;
    fn div(self, rhs: Cyclotomic) -> Cyclotomic {
        self * rhs.inv().expect("division by zero in cyclotomic field")
    }
}

impl From<Rational> for Cyclotomic {
    fn from(r: Rational) -> Self {
        Cyclotomic::from_rational(r)
    }
}

impl From<i64> for Cyclotomic {
    fn from(i: i64) -> Self {
        Cyclotomic::from_int(i)
    }
}

/// Gaussian values serialize as `["re", "im"]`; other values as
/// `{"cyclotomic": n, "coeffs": [...], "approx": [re, im]}`.
impl serde::Serialize for Cyclotomic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        if let Some((re, im)) = self.to_gaussian() {
            return [format_rational(&re), format_rational(&im)].serialize(s);
        }
        let z = self.to_c64();
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("cyclotomic", &self.order)?;
        m.serialize_entry(
            "coeffs",
            &self.coeffs.iter().map(format_rational).collect::<Vec<_>>(),
        )?;
        m.serialize_entry("approx", &[z.re, z.im])?;
        m.end()
    }
}

impl<'de> serde::Deserialize<'de> for Cyclotomic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([String; 2]),
            Field {
                cyclotomic: u32,
                coeffs: Vec<String>,
            },
        }
        let parse = |t: &str| {
            parse_rational(t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}")))
        };
        match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => Ok(Cyclotomic::gaussian(parse(&re)?, parse(&im)?)),
            Repr::Field { cyclotomic, coeffs } => {
                if cyclotomic == 0 {
                    return Err(D::Error::custom("cyclotomic order must be positive"));
                }
                let poly = coeffs
                    .iter()
                    .map(|c| parse(c))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Cyclotomic::reduce(cyclotomic, poly))
            }
        }
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((re, im)) = self.to_gaussian() {
            if im.is_zero() {
                return write!(f, "{}", format_rational(&re));
            }
            if re.is_zero() {
                return write!(f, "{}i", format_rational(&im));
            }
            let sign = if im.is_negative() { "-" } else { "+" };
            return write!(
                f,
                "{}{}{}i",
                format_rational(&re),
                sign,
                format_rational(&im.abs())
            );
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", format_rational(c))?;
            } else {
                write!(f, "({})z{}^{}", format_rational(c), self.order, k)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        let p = |n| {
            cyclotomic_poly(n)
                .iter()
                .map(|c| c.to_i64().unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(p(1), vec![-1, 1]);
        assert_eq!(p(3), vec![1, 1, 1]);
        assert_eq!(p(4), vec![1, 0, 1]);
        assert_eq!(p(6), vec![1, -1, 1]);
        assert_eq!(p(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for n in 2..13u32 {
            let mut acc = Cyclotomic::zero();
            for k in 0..n {
                acc = acc + Cyclotomic::root_of_unity(n, k as i64);
            }
            assert!(acc.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn cross_field_equality() {
        // ζ_3 = ζ_6^2 = ζ_12^4
        let a = Cyclotomic::root_of_unity(3, 1);
        assert_eq!(a, Cyclotomic::root_of_unity(6, 2));
        assert_eq!(a, Cyclotomic::root_of_unity(12, 4));
        assert_eq!(Cyclotomic::root_of_unity(4, 2), Cyclotomic::from_int(-1));
        assert_ne!(a, Cyclotomic::root_of_unity(12, 1));
    }

    #[test]
    fn inverse_and_conjugate() {
        let w = Cyclotomic::root_of_unity(5, 1) + Cyclotomic::from_int(2);
        let inv = w.inv().unwrap();
        assert!((w.clone() * inv).is_one());
        let z = Cyclotomic::root_of_unity(5, 2);
        assert_eq!(z.conj(), Cyclotomic::root_of_unity(5, 3));
        assert!((z.clone() * z.conj()).is_one());
        let mixed = Cyclotomic::root_of_unity(3, 1) * Cyclotomic::i();
        assert!((mixed.clone() / mixed).is_one());
    }

    #[test]
    fn gaussian_parts() {
        let a = Cyclotomic::gaussian(rat(1, 2), rat(-3, 4));
        assert_eq!(a.to_gaussian(), Some((rat(1, 2), rat(-3, 4))));
        assert_eq!(a.conj().to_gaussian(), Some((rat(1, 2), rat(3, 4))));
        // ω = -1/2 + (√3/2) i is not Gaussian-rational
        assert_eq!(Cyclotomic::root_of_unity(3, 1).to_gaussian(), None);
        let re = Cyclotomic::root_of_unity(3, 1).re();
        assert_eq!(re, Cyclotomic::from_rational(rat(-1, 2)));
    }

    #[test]
    fn real_sign_of_irrational() {
        // ζ_5 + ζ_5^{-1} = 2cos(72°) > 0, ζ_5^2 + ζ_5^{-2} < 0
        let a = Cyclotomic::root_of_unity(5, 1) + Cyclotomic::root_of_unity(5, 4);
        assert_eq!(a.real_sign(), std::cmp::Ordering::Greater);
        let b = Cyclotomic::root_of_unity(5, 2) + Cyclotomic::root_of_unity(5, 3);
        assert_eq!(b.real_sign(), std::cmp::Ordering::Less);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-7"), Some(int(-7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(rat_pow(&rat(1, 3), -2), int(9));
    }
}
