//! Finite-field contexts.
//!
//! A [`FieldCtx`] pins down one concrete field `F_{p^m}`: the prime
//! characteristic, the extension degree, and a monic irreducible modulus
//! polynomial over `F_p`. Elements are integer encodings in `[0, p^m)`,
//! interpreted in the polynomial basis: digit `i` of the encoding in base
//! `p` is the coefficient of `x^i`.
//!
//! When no modulus is supplied, the context picks the monic primitive
//! polynomial of the requested degree with the lowest integer encoding, so
//! every construction downstream is reproducible bit for bit.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Largest field order for which log/antilog tables are materialized.
const TABLE_CAP: u64 = 1 << 16;
/// Largest field order for which primitivity is certified by factoring
/// `p^m - 1`.
const ORDER_CHECK_CAP: u64 = 1 << 40;

/// An element of a finite field, stored as its integer encoding.
///
/// Encoding 0 is the additive identity and encoding 1 the multiplicative
/// identity regardless of the field.
#[derive(
    Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(pub u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A concrete finite field `F_{p^m}` with exact arithmetic.
///
/// Immutable after construction; shared via `Arc` by matrices and codes.
pub struct FieldCtx {
    p: u64,
    m: usize,
    /// Monic modulus, `modulus[i]` = coefficient of `x^i`, length `m + 1`.
    modulus: Vec<u64>,
    order: u64,
    /// A generator of the multiplicative group, when certified.
    primitive: Option<FieldElement>,
    /// Whether `x` itself generates the multiplicative group, i.e. the
    /// modulus is a primitive polynomial.
    modulus_primitive: bool,
    log_table: Option<Vec<u32>>,
    exp_table: Option<Vec<u64>>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl std::hash::Hash for FieldCtx {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.m.hash(state);
        self.modulus.hash(state);
    }
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.order)?;
        if self.m > 1 {
            write!(f, " = F_{}[x]/({})", self.p, poly_string(&self.modulus))?;
        }
        Ok(())
    }
}

fn poly_string(coeffs: &[u64]) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let t = match (i, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "x".to_string(),
            (1, c) => format!("{c}x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}x^{i}"),
        };
        terms.push(t);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

impl FieldCtx {
    /// Builds `F_{p^m}` with the lowest-encoding monic primitive modulus of
    /// degree `m`, found by exhaustive search.
    pub fn new(p: u64, m: usize) -> Result<Arc<FieldCtx>, AlgebraError> {
        check_prime(p)?;
        if m == 0 {
            return Err(AlgebraError::ZeroDegree);
        }
        let order = checked_pow(p, m).ok_or(AlgebraError::OrderOverflow { p, m })?;
        if order > ORDER_CHECK_CAP {
            return Err(AlgebraError::OrderOverflow { p, m });
        }
        let modulus = find_primitive_polynomial(p, m)?;
        Self::with_modulus(p, m, &modulus)
    }

    /// Builds `F_{p^m}` with a caller-supplied monic modulus, which must be
    /// irreducible over `F_p`.
    pub fn with_modulus(p: u64, m: usize, modulus: &[u64]) -> Result<Arc<FieldCtx>, AlgebraError> {
        check_prime(p)?;
        if m == 0 {
            return Err(AlgebraError::ZeroDegree);
        }
        let order = checked_pow(p, m).ok_or(AlgebraError::OrderOverflow { p, m })?;
        if modulus.len() != m + 1 {
            return Err(AlgebraError::BadModulusDegree {
                expected: m,
                got: modulus.len().saturating_sub(1),
            });
        }
        if modulus[m] != 1 {
            return Err(AlgebraError::NonMonicModulus);
        }
        for &c in modulus {
            if c >= p {
                return Err(AlgebraError::BadCoefficient(c, p));
            }
        }
        if !poly_is_irreducible(p, modulus) {
            return Err(AlgebraError::ReducibleModulus(p));
        }

        let mut ctx = FieldCtx {
            p,
            m,
            modulus: modulus.to_vec(),
            order,
            primitive: None,
            modulus_primitive: false,
            log_table: None,
            exp_table: None,
        };

        if order <= ORDER_CHECK_CAP {
            let factors = prime_factors(order - 1);
            let x = ctx.x_element();
            ctx.modulus_primitive = ctx.has_full_order(x, &factors);
            ctx.primitive = if ctx.modulus_primitive {
                Some(x)
            } else {
                ctx.find_generator(&factors)
            };
        }

        if order <= TABLE_CAP {
            ctx.build_tables()?;
        }

        Ok(Arc::new(ctx))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<FieldCtx>, AlgebraError> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Field order `q = p^m`.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Modulus coefficients, constant term first, length `m + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Whether the modulus is a primitive polynomial (so `x` generates the
    /// multiplicative group).
    pub fn modulus_is_primitive(&self) -> bool {
        self.modulus_primitive
    }

    /// A certified generator of the multiplicative group.
    pub fn primitive_element(&self) -> Result<FieldElement, AlgebraError> {
        self.primitive.ok_or(AlgebraError::NoPrimitiveElement)
    }

    /// The residue of `x` in the field: the polynomial-basis element of
    /// degree one (for `m = 1`, the constant `-c_0`).
    pub fn x_element(&self) -> FieldElement {
        if self.m == 1 {
            FieldElement((self.p - self.modulus[0]) % self.p)
        } else {
            FieldElement(self.p)
        }
    }

    /// Validates an encoding and wraps it.
    pub fn element(&self, encoding: u64) -> Result<FieldElement, AlgebraError> {
        if encoding < self.order {
            Ok(FieldElement(encoding))
        } else {
            Err(AlgebraError::ElementOutOfRange(encoding, self.order))
        }
    }

    /// All field elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    pub fn same_field(&self, other: &FieldCtx) -> bool {
        self == other
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.order && b.0 < self.order);
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.m == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let mut out = 0u64;
        let mut scale = 1u64;
        let (mut ea, mut eb) = (a.0, b.0);
        for _ in 0..self.m {
            let d = (ea % self.p + eb % self.p) % self.p;
            out += d * scale;
            scale *= self.p;
            ea /= self.p;
            eb /= self.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        if self.m == 1 {
            return FieldElement((self.p - a.0) % self.p);
        }
        let mut out = 0u64;
        let mut scale = 1u64;
        let mut ea = a.0;
        for _ in 0..self.m {
            let d = (self.p - ea % self.p) % self.p;
            out += d * scale;
            scale *= self.p;
            ea /= self.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.order && b.0 < self.order);
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        if let (Some(log), Some(exp)) = (&self.log_table, &self.exp_table) {
            let n = self.order - 1;
            let s = (log[a.0 as usize] as u64 + log[b.0 as usize] as u64) % n;
            return FieldElement(exp[s as usize]);
        }
        FieldElement(self.mul_generic(a.0, b.0))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, AlgebraError> {
        if a.0 == 0 {
            return Err(AlgebraError::ZeroInverse);
        }
        if let (Some(log), Some(exp)) = (&self.log_table, &self.exp_table) {
            let n = self.order - 1;
            let s = (n - log[a.0 as usize] as u64) % n;
            return Ok(FieldElement(exp[s as usize]));
        }
        // a^(q-2) = a^{-1}
        Ok(self.pow(a, self.order - 2))
    }

    /// `a^e`; for nonzero `a` the exponent reduces modulo `p^m - 1`.
    /// `pow(0, 0) = 1` by convention.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let n = self.order - 1;
        let mut e = if n == 0 { 0 } else { e % n };
        if e == 0 {
            return FieldElement::ONE;
        }
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Discrete log with respect to the certified primitive element.
    pub fn dlog(&self, a: FieldElement) -> Result<u64, AlgebraError> {
        if a.0 == 0 {
            return Err(AlgebraError::ZeroDlog);
        }
        if let Some(log) = &self.log_table {
            return Ok(log[a.0 as usize] as u64);
        }
        let g = self.primitive_element()?;
        let mut acc = FieldElement::ONE;
        for s in 0..self.order - 1 {
            if acc == a {
                return Ok(s);
            }
            acc = self.mul(acc, g);
        }
        unreachable!("primitive element generates the whole group");
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: FieldElement) -> Result<u64, AlgebraError> {
        if a.0 == 0 {
            return Err(AlgebraError::ZeroDlog);
        }
        let mut ord = 1u64;
        let mut acc = a;
        while acc != FieldElement::ONE {
            acc = self.mul(acc, a);
            ord += 1;
        }
        Ok(ord)
    }

    fn mul_generic(&self, a: u64, b: u64) -> u64 {
        if self.m == 1 {
            return ((a as u128 * b as u128) % self.p as u128) as u64;
        }
        let m = self.m;
        let p = self.p as u128;
        let mut da = vec![0u128; m];
        let mut db = vec![0u128; m];
        decompose(a, self.p, &mut da);
        decompose(b, self.p, &mut db);
        let mut prod = vec![0u128; 2 * m - 1];
        for i in 0..m {
            if da[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        // reduce modulo the monic modulus
        for i in (m..2 * m - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..m {
                let mj = self.modulus[j] as u128;
                if mj != 0 {
                    let k = i - m + j;
                    prod[k] = (prod[k] + c * (p - mj)) % p;
                }
            }
        }
        let mut out = 0u64;
        let mut scale = 1u64;
        for &d in prod.iter().take(m) {
            out += d as u64 * scale;
            scale *= self.p;
        }
        out
    }

    fn has_full_order(&self, a: FieldElement, factors: &[u64]) -> bool {
        if a.0 == 0 {
            return false;
        }
        let n = self.order - 1;
        if n == 0 {
            return true;
        }
        if self.pow_generic(a, n) != FieldElement::ONE {
            return false;
        }
        factors
            .iter()
            .all(|&f| self.pow_generic(a, n / f) != FieldElement::ONE)
    }

    // pow that never consults the (possibly unbuilt) tables
    fn pow_generic(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.0;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_generic(acc, base);
            }
            base = self.mul_generic(base, base);
            e >>= 1;
        }
        FieldElement(acc)
    }

    fn find_generator(&self, factors: &[u64]) -> Option<FieldElement> {
        if self.order == 2 {
            return Some(FieldElement::ONE);
        }
        (2..self.order)
            .map(FieldElement)
            .find(|&a| self.has_full_order(a, factors))
    }

    fn build_tables(&mut self) -> Result<(), AlgebraError> {
        let g = self.primitive.ok_or(AlgebraError::NoPrimitiveElement)?;
        let n = (self.order - 1) as usize;
        let mut exp = vec![0u64; n.max(1)];
        let mut log = vec![0u32; self.order as usize];
        let mut acc = 1u64;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = acc;
            log[acc as usize] = k as u32;
            acc = self.mul_generic(acc, g.0);
        }
        if acc != 1 {
            return Err(AlgebraError::NoPrimitiveElement);
        }
        self.exp_table = Some(exp);
        self.log_table = Some(log);
        Ok(())
    }
}

/// Serializable description of a field: enough to rebuild the context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub q: u64,
    pub p: u64,
    pub m: usize,
    pub modulus: Vec<u64>,
}

impl From<&FieldCtx> for FieldJson {
    fn from(f: &FieldCtx) -> Self {
        FieldJson {
            q: f.order(),
            p: f.p(),
            m: f.m(),
            modulus: f.modulus().to_vec(),
        }
    }
}

impl FieldJson {
    pub fn build(&self) -> Result<Arc<FieldCtx>, AlgebraError> {
        FieldCtx::with_modulus(self.p, self.m, &self.modulus)
    }
}

fn decompose(mut e: u64, p: u64, out: &mut [u128]) {
    for d in out.iter_mut() {
        *d = (e % p) as u128;
        e /= p;
    }
}

fn checked_pow(p: u64, m: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

fn check_prime(p: u64) -> Result<(), AlgebraError> {
    if p < 2 {
        return Err(AlgebraError::NonPrime(p));
    }
    if p % 2 == 0 {
        return if p == 2 { Ok(()) } else { Err(AlgebraError::NonPrime(p)) };
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return Err(AlgebraError::NonPrime(p));
        }
        d += 2;
    }
    Ok(())
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------------------
// polynomial arithmetic over F_p on raw coefficient vectors
// ---------------------------------------------------------------------------

fn poly_degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Remainder of `a` modulo monic-after-normalization `b` over `F_p`.
fn poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let db = poly_degree(b).expect("divisor must be nonzero");
    let lead_inv = mod_inv(b[db], p);
    let mut r = a.to_vec();
    while let Some(dr) = poly_degree(&r) {
        if dr < db {
            break;
        }
        let c = (r[dr] as u128 * lead_inv as u128 % p as u128) as u64;
        let shift = dr - db;
        for i in 0..=db {
            let sub = (c as u128 * b[i] as u128 % p as u128) as u64;
            r[i + shift] = (r[i + shift] + p - sub) % p;
        }
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is prime
    mod_pow(a, p - 2, p)
}

fn mod_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * a as u128 % p as u128) as u64;
        }
        a = (a as u128 * a as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Trial-factor irreducibility test: try every monic divisor of degree up to
/// `deg/2`. Intended for desk-scale degrees.
fn poly_is_irreducible(p: u64, f: &[u64]) -> bool {
    let deg = match poly_degree(f) {
        Some(d) => d,
        None => return false,
    };
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = checked_pow(p, d).expect("desk-scale divisor space");
        for enc in 0..count {
            // monic divisor of degree d
            let mut div = vec![0u64; d + 1];
            let mut e = enc;
            for c in div.iter_mut().take(d) {
                *c = e % p;
                e /= p;
            }
            div[d] = 1;
            let r = poly_rem(p, f, &div);
            if poly_degree(&r).is_none() {
                return false;
            }
        }
    }
    true
}

/// `x^e mod f` over `F_p`.
fn poly_x_pow_mod(p: u64, mut e: u64, f: &[u64]) -> Vec<u64> {
    let deg = poly_degree(f).expect("modulus nonzero");
    let mut base = vec![0u64; deg + 1];
    if deg == 0 {
        return base;
    }
    if deg == 1 {
        base[0] = (p - f[0]) % p; // x = -c0
    } else {
        base[1] = 1;
    }
    let mut acc = vec![0u64; deg + 1];
    acc[0] = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(p, &acc, &base, f);
        }
        base = poly_mul_mod(p, &base, &base, f);
        e >>= 1;
    }
    acc
}

fn poly_mul_mod(p: u64, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u128 + ai as u128 * bj as u128) % p as u128) as u64;
        }
    }
    let mut r = poly_rem(p, &prod, f);
    r.truncate(poly_degree(f).unwrap() + 1);
    r.resize(poly_degree(f).unwrap() + 1, 0);
    r
}

fn poly_is_one(a: &[u64]) -> bool {
    poly_degree(a) == Some(0) && a[0] == 1
}

/// `x` has multiplicative order `p^deg(f) - 1` modulo `f`.
fn poly_is_primitive(p: u64, f: &[u64]) -> bool {
    let deg = poly_degree(f).expect("modulus nonzero");
    let order = match checked_pow(p, deg) {
        Some(o) => o,
        None => return false,
    };
    let n = order - 1;
    if n == 0 {
        return true;
    }
    if !poly_is_one(&poly_x_pow_mod(p, n, f)) {
        return false;
    }
    prime_factors(n)
        .iter()
        .all(|&q| !poly_is_one(&poly_x_pow_mod(p, n / q, f)))
}

/// Lowest-encoding monic primitive polynomial of degree `m` over `F_p`.
/// The encoding of a polynomial is `sum c_i p^i`.
pub fn find_primitive_polynomial(p: u64, m: usize) -> Result<Vec<u64>, AlgebraError> {
    check_prime(p)?;
    if m == 0 {
        return Err(AlgebraError::ZeroDegree);
    }
    let base = checked_pow(p, m).ok_or(AlgebraError::OrderOverflow { p, m })?;
    for enc in base..base.saturating_mul(2) {
        let mut coeffs = vec![0u64; m + 1];
        let mut e = enc;
        for c in coeffs.iter_mut() {
            *c = e % p;
            e /= p;
        }
        if coeffs[m] != 1 {
            continue;
        }
        if poly_is_irreducible(p, &coeffs) && poly_is_primitive(p, &coeffs) {
            return Ok(coeffs);
        }
    }
    unreachable!("a primitive polynomial of every degree exists over F_p")
}
