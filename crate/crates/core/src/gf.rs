//! Finite fields `F_{p^m}` with `p^m <= 2^16`.
//!
//! Elements are stored as integers in `[0, q)`: the base-`p` digits of the
//! integer are the coefficients of the element as a polynomial in the
//! generator `X` modulo a fixed primitive modulus. Multiplication goes through
//! log/antilog tables; addition in odd characteristic goes through a Zech
//! logarithm table, in characteristic 2 it is XOR.

use std::fmt;

use thiserror::Error;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

const ZECH_NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("field {p}^{m} exceeds the supported size 2^16")]
    FieldTooLarge { p: u32, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    ContextMismatch,
    #[error("{value} is not an element of a field of size {q}")]
    InvalidElement { value: u64, q: u32 },
    #[error("malformed field descriptor {0:?}")]
    BadDescriptor(String),
}

/// A field element in integer encoding. Arithmetic is done through a
/// [`FieldCtx`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gf(pub(crate) u32);

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);

    /// Integer encoding in `[0, q)`.
    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
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

/// Splits `q` as `p^m` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let (mut rest, mut m) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p as u32, m))
}

/// Immutable description of `F_{p^m}` together with its arithmetic tables.
pub struct FieldCtx {
    p: u32,
    m: u32,
    q: u32,
    /// Monic primitive modulus, coefficients from low to high degree.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx({})", self.descriptor())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// Builds `F_{p^m}` using the smallest (in integer encoding) monic
    /// primitive polynomial of degree `m` as modulus.
    pub fn new(p: u32, m: u32) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NonPrimeCharacteristic(p));
        }
        if m == 0 {
            return Err(FieldError::FieldTooLarge { p, m });
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= MAX_FIELD_SIZE);
        let q = q.ok_or(FieldError::FieldTooLarge { p, m })? as u32;
        for low in 1..q {
            let mut modulus = digits(low, p, m);
            modulus.push(1);
            if let Some(exp) = primitive_powers(&modulus, p, q) {
                return Ok(Self::from_tables(p, m, q, modulus, exp));
            }
        }
        unreachable!("every finite field has a primitive polynomial")
    }

    /// Builds the field with an explicit modulus integer (as produced by
    /// [`FieldCtx::modulus_int`]). The modulus must be primitive.
    pub fn with_modulus(p: u32, m: u32, modulus_int: u64) -> Result<Self, FieldError> {
        let default = Self::new(p, m)?;
        if default.modulus_int() == modulus_int {
            return Ok(default);
        }
        let q = default.q;
        let bad = || FieldError::BadDescriptor(format!("{p}^{m}/{modulus_int}"));
        if modulus_int < q as u64 || modulus_int >= 2 * q as u64 {
            return Err(bad());
        }
        let mut modulus = digits((modulus_int - q as u64) as u32, p, m);
        modulus.push(1);
        let exp = primitive_powers(&modulus, p, q).ok_or_else(bad)?;
        Ok(Self::from_tables(p, m, q, modulus, exp))
    }

    /// Parses the `"p^m/modulus"` text form.
    pub fn from_descriptor(text: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::BadDescriptor(text.to_string());
        let (pm, modulus) = text.trim().split_once('/').ok_or_else(bad)?;
        let (p, m) = pm.split_once('^').ok_or_else(bad)?;
        let p = p.trim().parse().map_err(|_| bad())?;
        let m = m.trim().parse().map_err(|_| bad())?;
        let modulus = modulus.trim().parse().map_err(|_| bad())?;
        Self::with_modulus(p, m, modulus)
    }

    fn from_tables(p: u32, m: u32, q: u32, modulus: Vec<u32>, exp_once: Vec<u32>) -> Self {
        let order = (q - 1) as usize;
        let mut log = vec![0u32; q as usize];
        for (i, &v) in exp_once.iter().enumerate() {
            log[v as usize] = i as u32;
        }
        let mut exp = exp_once.clone();
        exp.extend_from_slice(&exp_once);
        let zech = if p == 2 {
            Vec::new()
        } else {
            (0..order)
                .map(|d| {
                    let s = digit_add(1, exp[d], p, m);
                    if s == 0 {
                        ZECH_NONE
                    } else {
                        log[s as usize]
                    }
                })
                .collect()
        };
        FieldCtx { p, m, q, modulus, exp, log, zech }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The modulus encoded as `sum c_i p^i`, leading term included.
    pub fn modulus_int(&self) -> u64 {
        self.modulus
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    /// Text form `"p^m/modulus-integer"`.
    pub fn descriptor(&self) -> String {
        format!("{}^{}/{}", self.p, self.m, self.modulus_int())
    }

    pub fn zero(&self) -> Gf {
        Gf::ZERO
    }

    pub fn one(&self) -> Gf {
        Gf::ONE
    }

    /// The primitive element `X`.
    pub fn generator(&self) -> Gf {
        Gf(self.exp[1 % (self.q as usize - 1).max(1)])
    }

    pub fn elem(&self, value: u64) -> Result<Gf, FieldError> {
        if value < self.q as u64 {
            Ok(Gf(value as u32))
        } else {
            Err(FieldError::InvalidElement { value, q: self.q })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Gf {
        Gf(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = Gf> + '_ {
        (0..self.q).map(Gf)
    }

    /// Base-`p` coefficients of `a`, lowest degree first.
    pub fn coefficients(&self, a: Gf) -> Vec<u32> {
        digits(a.0, self.p, self.m)
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        if self.p == 2 {
            return Gf(a.0 ^ b.0);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let order = self.q - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let d = if lb >= la { lb - la } else { lb + order - la };
        let z = self.zech[d as usize];
        if z == ZECH_NONE {
            Gf::ZERO
        } else {
            Gf(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Gf) -> Gf {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        let half = (self.q - 1) / 2;
        Gf(self.exp[(self.log[a.0 as usize] + half) as usize])
    }

    #[inline]
    pub fn sub(&self, a: Gf, b: Gf) -> Gf {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a.0 == 0 || b.0 == 0 {
            return Gf::ZERO;
        }
        Gf(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    /// `a + b * c`.
    #[inline]
    pub fn mul_add(&self, a: Gf, b: Gf, c: Gf) -> Gf {
        self.add(a, self.mul(b, c))
    }

    pub fn inv(&self, a: Gf) -> Option<Gf> {
        if a.0 == 0 {
            return None;
        }
        let order = self.q - 1;
        Some(Gf(self.exp[((order - self.log[a.0 as usize]) % order) as usize]))
    }

    pub fn div(&self, a: Gf, b: Gf) -> Result<Gf, FieldError> {
        let inv = self.inv(b).ok_or(FieldError::DivisionByZero)?;
        Ok(self.mul(a, inv))
    }

    pub fn pow(&self, a: Gf, k: u64) -> Gf {
        if k == 0 {
            return Gf::ONE;
        }
        if a.0 == 0 {
            return Gf::ZERO;
        }
        let order = (self.q - 1) as u64;
        let e = (self.log[a.0 as usize] as u64 * (k % order)) % order;
        Gf(self.exp[e as usize])
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Gf, k: u32) -> Gf {
        if a.0 == 0 {
            return a;
        }
        let order = (self.q - 1) as u64;
        let mut shift = 1u64;
        for _ in 0..(k % self.m) {
            shift = shift * self.p as u64 % order.max(1);
        }
        let e = self.log[a.0 as usize] as u64 * shift % order.max(1);
        Gf(self.exp[e as usize])
    }

    /// The unique `b` with `b^(p^e) = a`.
    pub fn p_root(&self, a: Gf, e: u32) -> Gf {
        self.frobenius(a, (self.m - e % self.m) % self.m)
    }

    /// Checked wrapper bound to this context.
    pub fn wrap(&self, a: Gf) -> FieldElem<'_> {
        FieldElem { ctx: self, value: a }
    }
}

/// Base-`p` digits of `v`, exactly `m` of them.
fn digits(mut v: u32, p: u32, m: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn digit_add(a: u32, b: u32, p: u32, m: u32) -> u32 {
    let sum: Vec<u32> = digits(a, p, m)
        .into_iter()
        .zip(digits(b, p, m))
        .map(|(x, y)| (x + y) % p)
        .collect();
    undigits(&sum, p)
}

/// Powers `X^0..X^(q-2)` modulo `modulus` if `X` has order exactly `q - 1`.
fn primitive_powers(modulus: &[u32], p: u32, q: u32) -> Option<Vec<u32>> {
    let m = modulus.len() - 1;
    let mut cur = vec![0u32; m];
    cur[0] = 1;
    let mut out = Vec::with_capacity(q as usize - 1);
    for k in 0..(q - 1) {
        let v = undigits(&cur, p);
        if k > 0 && v == 1 {
            return None;
        }
        out.push(v);
        // multiply by X and reduce by the monic modulus
        let top = cur[m - 1];
        for i in (1..m).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..m {
                cur[i] = (cur[i] + (p - top) * modulus[i]) % p;
            }
        }
    }
    (undigits(&cur, p) == 1).then_some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element paired with its context; arithmetic on these checks that
/// both operands live in the same field.
#[derive(Clone, Copy, Debug)]
pub struct FieldElem<'a> {
    ctx: &'a FieldCtx,
    value: Gf,
}

impl PartialEq for FieldElem<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.value == other.value
    }
}

impl<'a> FieldElem<'a> {
    pub fn new(ctx: &'a FieldCtx, value: u64) -> Result<Self, FieldError> {
        Ok(FieldElem { ctx, value: ctx.elem(value)? })
    }

    pub fn value(&self) -> Gf {
        self.value
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn arith(self, other: FieldElem<'a>, op: ArithOp) -> Result<FieldElem<'a>, FieldError> {
        if !std::ptr::eq(self.ctx, other.ctx) && self.ctx != other.ctx {
            return Err(FieldError::ContextMismatch);
        }
        let f = self.ctx;
        let value = match op {
            ArithOp::Add => f.add(self.value, other.value),
            ArithOp::Sub => f.sub(self.value, other.value),
            ArithOp::Mul => f.mul(self.value, other.value),
            ArithOp::Div => f.div(self.value, other.value)?,
        };
        Ok(FieldElem { ctx: f, value })
    }
}

/// Binomial coefficient `C(n, k)` reduced mod `p` (Lucas).
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u32) -> u32 {
    let p = p as u64;
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..kd {
            c = c * (nd - i) / (i + 1);
        }
        acc = acc * (c % p) % p;
        n /= p;
        k /= p;
    }
    acc as u32
}
