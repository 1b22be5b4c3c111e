//! Finite fields GF(p) and GF(p^m).
//!
//! Elements are encoded as integers in `[0, q)`: the element
//! `c_0 + c_1 α + … + c_{m-1} α^{m-1}` is stored as `Σ c_i p^i`. Arithmetic
//! uses log/exp tables, so every operation is a table lookup.
//!
//! The coordinate convention is row vectors with the least significant
//! coefficient first. The companion matrix `[β]` acts by right
//! multiplication: `v · [β]` is the coordinate vector of `sym(v) · β`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::matgf::Matrix;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;

const PRIMITIVE_TABLE: &str = include_str!("../data/primitive_polynomials.txt");

/// Errors raised while building fields or converting elements.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    /// The characteristic is not a prime.
    #[error("{0} is not prime")]
    NotPrime(u64),
    /// The requested field is larger than [`MAX_ORDER`].
    #[error("field order {0} exceeds the supported maximum 2^20")]
    TooLarge(u64),
    /// The extension degree is invalid.
    #[error("invalid extension degree {0}")]
    BadDegree(u32),
    /// The base of an extension must be a prime field.
    #[error("extensions must be built over a prime field")]
    BaseNotPrime,
    /// The supplied modulus is not monic of the requested degree.
    #[error("modulus must be monic of degree {expected}, got {got:?}")]
    BadModulus { expected: u32, got: Vec<u32> },
    /// The modulus has a nontrivial factor.
    #[error("modulus is reducible: divisible by {factor:?}")]
    NotIrreducible { factor: Vec<u32> },
    /// The modulus is irreducible but x does not generate the multiplicative group.
    #[error("modulus is not primitive: x has order {order}, a proper divisor of {group}")]
    NotPrimitive { order: u64, group: u64 },
    /// An element or vector does not belong to the field.
    #[error("value {0} is not an element of this field")]
    OutOfRange(u64),
    /// A coordinate vector has the wrong length.
    #[error("expected a vector of length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    /// Elements of different fields were mixed.
    #[error("element belongs to a different field")]
    FieldMismatch,
}

/// Identifies a field by characteristic and modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldId {
    p: u32,
    modulus: u64,
}

/// An element tagged with the field it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: FieldId,
    value: u32,
}

impl FieldElement {
    /// Integer encoding of the element.
    pub fn value(&self) -> u32 {
        self.value
    }

    /// Identifier of the owning field.
    pub fn field_id(&self) -> FieldId {
        self.field
    }
}

/// A finite field with a designated primitive element.
pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    alpha: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    base: Option<Arc<Field>>,
    id: FieldId,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{}) mod {:?}", self.p, self.m, self.modulus)
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Field {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `b` over GF(p).
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bi) in b.iter().enumerate() {
                let t = (lead as u64 * bi as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    r
}

/// Digits of `v` in base `p`, `len` of them.
fn digits(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((v % p as u64) as u32);
        v /= p as u64;
    }
    out
}

fn encode(coeffs: &[u32], p: u32) -> u64 {
    coeffs.iter().rev().fold(0u64, |acc, &c| acc * p as u64 + c as u64)
}

/// Returns a nontrivial monic factor of `g` of degree at most deg(g)/2, if any.
fn find_factor(g: &[u32], p: u32) -> Option<Vec<u32>> {
    let m = g.len() - 1;
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut f = digits(low, p, d);
            f.push(1);
            if poly_rem(g, &f, p).iter().all(|&c| c == 0) {
                return Some(f);
            }
        }
    }
    None
}

fn default_modulus(p: u32, m: u32) -> Option<Vec<u32>> {
    PRIMITIVE_TABLE
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<u32>().expect("malformed primitive polynomial table"))
                .collect::<Vec<_>>()
        })
        .find(|row| row[0] == p && row[1] == m)
        .map(|row| row[2..].to_vec())
}

impl Field {
    /// Builds the prime field GF(p) with the smallest primitive root as `alpha`.
    pub fn prime(p: u32) -> Result<Arc<Field>, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if p as u64 > 1 << 16 {
            return Err(FieldError::TooLarge(p as u64));
        }
        let factors = prime_factors(p as u64 - 1);
        let pow = |mut b: u64, mut e: u64| {
            let mut r = 1u64;
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % p as u64;
                }
                b = b * b % p as u64;
                e >>= 1;
            }
            r
        };
        let alpha = (1..p as u64)
            .find(|&g| factors.iter().all(|&l| pow(g, (p as u64 - 1) / l) != 1))
            .unwrap() as u32;
        let mut exp = Vec::with_capacity(2 * (p as usize - 1));
        let mut x = 1u64;
        for _ in 0..p - 1 {
            exp.push(x as u32);
            x = x * alpha as u64 % p as u64;
        }
        Ok(Arc::new(Self::from_tables(p, 1, vec![0, 1], alpha, exp, None)))
    }

    /// Builds GF(p^m) over the prime field `base`.
    ///
    /// Without an explicit modulus, the bundled table supplies one for p = 2,
    /// m ≤ 16; other cases use the first primitive polynomial in
    /// lexicographic coefficient order.
    pub fn extension(base: &Arc<Field>, m: u32, modulus: Option<&[u32]>) -> Result<Arc<Field>, FieldError> {
        if base.m != 1 {
            return Err(FieldError::BaseNotPrime);
        }
        if m < 2 {
            return Err(FieldError::BadDegree(m));
        }
        let p = base.p;
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(FieldError::TooLarge(q));
        }
        let g = match modulus {
            Some(g) => g.to_vec(),
            None => match default_modulus(p, m) {
                Some(g) => g,
                None => Self::search_primitive(p, m),
            },
        };
        if g.len() != m as usize + 1 || g[m as usize] != 1 || g.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus { expected: m, got: g });
        }
        if let Some(factor) = find_factor(&g, p) {
            return Err(FieldError::NotIrreducible { factor });
        }
        let exp = Self::power_sequence(&g, p, q)?;
        Ok(Arc::new(Self::from_tables(p, m, g, p, exp, Some(Arc::clone(base)))))
    }

    /// Shorthand for GF(2^m) with the default modulus.
    pub fn binary_extension(m: u32) -> Result<Arc<Field>, FieldError> {
        let base = Field::prime(2)?;
        if m == 1 {
            return Ok(base);
        }
        Field::extension(&base, m, None)
    }

    fn search_primitive(p: u32, m: u32) -> Vec<u32> {
        let q = (p as u64).pow(m);
        (0..q)
            .map(|low| {
                let mut g = digits(low, p, m as usize);
                g.push(1);
                g
            })
            .find(|g| g[0] != 0 && find_factor(g, p).is_none() && Self::power_sequence(g, p, q).is_ok())
            .expect("a primitive polynomial exists for every degree")
    }

    /// Powers of x modulo g, checking that x has order q − 1.
    fn power_sequence(g: &[u32], p: u32, q: u64) -> Result<Vec<u32>, FieldError> {
        let m = g.len() - 1;
        let mut cur = vec![0u32; m];
        cur[0] = 1;
        let mut exp = Vec::with_capacity(2 * (q as usize - 1));
        for i in 0..q - 1 {
            let v = encode(&cur, p) as u32;
            if i > 0 && v == 1 {
                return Err(FieldError::NotPrimitive { order: i, group: q - 1 });
            }
            exp.push(v);
            let top = cur[m - 1];
            for j in (1..m).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            for j in 0..m {
                let t = (top as u64 * g[j] as u64 % p as u64) as u32;
                cur[j] = (cur[j] + p - t) % p;
            }
        }
        Ok(exp)
    }

    fn from_tables(
        p: u32,
        m: u32,
        modulus: Vec<u32>,
        alpha: u32,
        mut exp: Vec<u32>,
        base: Option<Arc<Field>>,
    ) -> Field {
        let q = exp.len() as u32 + 1;
        let mut log = vec![0u32; q as usize];
        for (i, &v) in exp.iter().enumerate() {
            log[v as usize] = i as u32;
        }
        exp.extend_from_within(..);
        let id = FieldId {
            p,
            modulus: encode(&modulus, p),
        };
        Field {
            p,
            m,
            q,
            modulus,
            alpha,
            exp,
            log,
            base,
            id,
        }
    }

    /// Characteristic.
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of elements.
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Monic modulus, coefficients low-to-high.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The designated primitive element.
    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// Identifier used to detect mixed-field operations.
    pub fn id(&self) -> FieldId {
        self.id
    }

    /// True for GF(2).
    pub fn is_binary(&self) -> bool {
        self.q == 2
    }

    /// The prime subfield, or `None` for a prime field.
    pub fn base(&self) -> Option<&Arc<Field>> {
        self.base.as_ref()
    }

    /// Wraps an integer as an element of this field.
    pub fn element(&self, value: u32) -> Result<FieldElement, FieldError> {
        if value >= self.q {
            return Err(FieldError::OutOfRange(value as u64));
        }
        Ok(FieldElement { field: self.id, value })
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.m == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..self.m {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        if self.m == 1 {
            return (self.p - a) % self.p;
        }
        let (mut a, mut out, mut place) = (a, 0, 1);
        for _ in 0..self.m {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let l = self.log[a as usize];
        self.exp[((self.q - 1 - l) % (self.q - 1)) as usize]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    /// `a^e` with `0^0 = 1`.
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64 * (e % (self.q as u64 - 1));
        self.exp[(l % (self.q as u64 - 1)) as usize]
    }

    /// `alpha^i`.
    pub fn alpha_pow(&self, i: u64) -> u32 {
        self.exp[(i % (self.q as u64 - 1)) as usize]
    }

    /// Discrete logarithm to base `alpha`. Panics on zero.
    pub fn log(&self, a: u32) -> u32 {
        assert!(a != 0, "log of zero");
        self.log[a as usize]
    }

    /// Coordinates of `beta` over the prime field, least significant first.
    pub fn symbol_to_vector(&self, beta: u32) -> Vec<u32> {
        digits(beta as u64, self.p, self.m as usize)
    }

    /// Inverse of [`Field::symbol_to_vector`].
    pub fn vector_to_symbol(&self, v: &[u32]) -> Result<u32, FieldError> {
        if v.len() != self.m as usize {
            return Err(FieldError::WrongLength {
                expected: self.m as usize,
                got: v.len(),
            });
        }
        if let Some(&c) = v.iter().find(|&&c| c >= self.p) {
            return Err(FieldError::OutOfRange(c as u64));
        }
        Ok(encode(v, self.p) as u32)
    }

    /// The prime field as a shared handle.
    fn prime_subfield(self: &Arc<Self>) -> Arc<Field> {
        match &self.base {
            Some(b) => Arc::clone(b),
            None => Arc::clone(self),
        }
    }

    /// Companion matrix `[beta]` over the prime field.
    ///
    /// Row `r` holds the coordinates of `alpha^r · beta`, which equals
    /// `M^i` for `beta = alpha^i`. Zero maps to the zero matrix.
    pub fn companion(self: &Arc<Self>, beta: u32) -> Matrix {
        let m = self.m as usize;
        let mut out = Matrix::zeros(&self.prime_subfield(), m, m);
        if beta == 0 {
            return out;
        }
        for r in 0..m {
            let row = self.symbol_to_vector(self.mul(self.alpha_pow(r as u64), beta));
            out.row_mut(r).copy_from_slice(&row);
        }
        out
    }

    /// Checked form of [`Field::companion`].
    pub fn companion_of_element(self: &Arc<Self>, beta: FieldElement) -> Result<Matrix, FieldError> {
        if beta.field != self.id {
            return Err(FieldError::FieldMismatch);
        }
        Ok(self.companion(beta.value))
    }

    /// The companion matrix of the modulus, `[alpha]`.
    pub fn companion_of_modulus(self: &Arc<Self>) -> Matrix {
        let m = self.m as usize;
        let mut out = Matrix::zeros(&self.prime_subfield(), m, m);
        for r in 0..m - 1 {
            out.set(r, r + 1, 1);
        }
        for c in 0..m {
            out.set(m - 1, c, self.neg(self.modulus[c] % self.p));
        }
        out
    }

    /// Iterator over all elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    /// Square root in characteristic 2.
    pub fn sqrt_char2(&self, a: u32) -> u32 {
        assert_eq!(self.p, 2, "square roots implemented for characteristic 2 only");
        self.pow(a, self.q as u64 / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf4() -> Arc<Field> {
        Field::extension(&Field::prime(2).unwrap(), 2, Some(&[1, 1, 1])).unwrap()
    }

    #[test]
    fn prime_fields() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(f2.alpha(), 1);
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.alpha(), 2);
        assert_eq!(Field::prime(4).unwrap_err(), FieldError::NotPrime(4));
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.alpha(), 3);
        for a in 1..7 {
            assert_eq!(f7.mul(a, f7.inv(a)), 1);
        }
    }

    #[test]
    fn gf4_relation() {
        let f = gf4();
        let w = f.alpha();
        assert_eq!(f.mul(w, w), f.add(w, 1));
        assert_eq!(f.symbol_to_vector(w), vec![0, 1]);
        assert_eq!(f.vector_to_symbol(&[1, 1]).unwrap(), f.mul(w, w));
    }

    #[test]
    fn default_gf8_modulus_is_primitive() {
        let f = Field::binary_extension(3).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
        let order = (1..8u64).find(|&i| f.pow(f.alpha(), i) == 1).unwrap();
        assert_eq!(order, 7);
    }

    #[test]
    fn rejections() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(
            Field::extension(&f2, 2, Some(&[1, 0, 1])).unwrap_err(),
            FieldError::NotIrreducible { factor: vec![1, 1] }
        );
        // x^4+x^3+x^2+x+1 is irreducible but x has order 5.
        assert_eq!(
            Field::extension(&f2, 4, Some(&[1, 1, 1, 1, 1])).unwrap_err(),
            FieldError::NotPrimitive { order: 5, group: 15 }
        );
        assert!(matches!(Field::binary_extension(21), Err(FieldError::TooLarge(_))));
        assert!(gf4().vector_to_symbol(&[1]).is_err());
    }

    #[test]
    fn every_table_entry_is_primitive() {
        for m in 2..=16 {
            let f = Field::binary_extension(m).unwrap();
            assert_eq!(f.order(), 1 << m);
        }
    }

    #[test]
    fn odd_characteristic_extension() {
        let f3 = Field::prime(3).unwrap();
        let f9 = Field::extension(&f3, 2, None).unwrap();
        assert_eq!(f9.order(), 9);
        for a in 1..9 {
            assert_eq!(f9.mul(a, f9.inv(a)), 1);
            assert_eq!(f9.add(a, f9.neg(a)), 0);
        }
    }

    #[test]
    fn companion_examples() {
        let f = gf4();
        let id = f.companion(1);
        assert_eq!(id.row(0), &[1, 0]);
        assert_eq!(id.row(1), &[0, 1]);
        let m = f.companion(f.alpha());
        assert_eq!(m.row(0), &[0, 1]);
        assert_eq!(m.row(1), &[1, 1]);
        assert_eq!(m, f.companion_of_modulus());
        assert!(f.companion(0).data().iter().all(|&x| x == 0));
        // M^2 = M + I
        assert_eq!(m.mul(&m).unwrap(), m.add(&id).unwrap());
        let other = Field::binary_extension(3).unwrap();
        let foreign = other.element(3).unwrap();
        assert_eq!(f.companion_of_element(foreign).unwrap_err(), FieldError::FieldMismatch);
    }

    #[test]
    fn companion_homomorphism_exhaustive() {
        for m in [2, 3] {
            let f = Field::binary_extension(m).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    let (ca, cb) = (f.companion(a), f.companion(b));
                    assert_eq!(f.companion(f.mul(a, b)), ca.mul(&cb).unwrap());
                    assert_eq!(f.companion(f.add(a, b)), ca.add(&cb).unwrap());
                }
            }
        }
    }

    #[test]
    fn companion_acts_as_multiplication_gf4() {
        let f = gf4();
        for beta in f.elements() {
            let c = f.companion(beta);
            for s in f.elements() {
                let v = f.symbol_to_vector(s);
                let image = c.vec_mul(&v).unwrap();
                assert_eq!(f.vector_to_symbol(&image).unwrap(), f.mul(s, beta));
            }
        }
    }

    fn gf256() -> Arc<Field> {
        Field::binary_extension(8).unwrap()
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0u32..256, b in 0u32..256, c in 0u32..256) {
            let f = gf256();
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a)), 1);
            }
        }

        #[test]
        fn odd_field_axioms(a in 0u32..125, b in 0u32..125, c in 0u32..125) {
            let f = Field::extension(&Field::prime(5).unwrap(), 3, None).unwrap();
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
        }

        #[test]
        fn symbol_roundtrip(a in 0u32..256) {
            let f = gf256();
            prop_assert_eq!(f.vector_to_symbol(&f.symbol_to_vector(a)).unwrap(), a);
        }

        #[test]
        fn companion_homomorphism_gf256(a in 0u32..256, b in 0u32..256) {
            let f = gf256();
            let (ca, cb) = (f.companion(a), f.companion(b));
            prop_assert_eq!(f.companion(f.mul(a, b)), ca.mul(&cb).unwrap());
            prop_assert_eq!(f.companion(f.add(a, b)), ca.add(&cb).unwrap());
        }
    }
}
