//! Arithmetic in GF(2^s) with log/antilog tables, trace, square and seventh roots.

use std::fmt;

use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_S: u32 = 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported extension degree s={0} (need 1 <= s <= {MAX_S})")]
    UnsupportedDegree(u32),
    #[error("modulus {modulus:#x} is not an irreducible polynomial of degree {s}")]
    Reducible { s: u32, modulus: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {bits:#x} out of range for s={s}")]
    OutOfRange { s: u32, bits: u32 },
    #[error("seventh roots are not unique in GF(2^{0}) since 7 divides q-1")]
    NoSeventhRoots(u32),
    #[error("in-field trace of {0:#x} is not 0 or 1")]
    TraceInconsistent(u32),
    #[error("bad hex element {0:?}")]
    BadHex(String),
}

/// Field element as a coefficient mask: bit i is the coefficient of alpha^i.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::ops::Add for Fe {
    type Output = Fe;
    #[inline]
    fn add(self, rhs: Fe) -> Fe {
        Fe(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for Fe {
    #[inline]
    fn add_assign(&mut self, rhs: Fe) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// Degree s and irreducible modulus defining GF(2^s).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    s: u32,
    modulus: u32,
}

impl FieldSpec {
    pub fn new(s: u32, modulus: u32) -> Result<Self, FieldError> {
        if s == 0 || s > MAX_S {
            return Err(FieldError::UnsupportedDegree(s));
        }
        if modulus >> s != 1 || modulus & 1 == 0 || !is_irreducible(modulus as u64, s) {
            return Err(FieldError::Reducible { s, modulus });
        }
        Ok(FieldSpec { s, modulus })
    }

    /// Default modulus: fixed choices for s = 5, 8, 10, else the smallest irreducible.
    pub fn default_for(s: u32) -> Result<Self, FieldError> {
        let fixed = match s {
            5 => Some(0b100101),
            8 => Some(0x11d),
            10 => Some(0x409),
            _ => None,
        };
        if let Some(m) = fixed {
            return FieldSpec::new(s, m);
        }
        if s == 0 || s > MAX_S {
            return Err(FieldError::UnsupportedDegree(s));
        }
        let lo = (1u32 << s) | 1;
        (lo..1u32 << (s + 1))
            .step_by(2)
            .find(|&m| is_irreducible(m as u64, s))
            .map(|m| FieldSpec { s, modulus: m })
            .ok_or(FieldError::UnsupportedDegree(s))
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn q(&self) -> usize {
        1usize << self.s
    }

    /// Hex width of a serialized element.
    pub fn hex_width(&self) -> usize {
        self.s.div_ceil(4) as usize
    }
}

fn deg(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mulmod(mut a: u64, mut b: u64, m: u64, s: u32) -> u64 {
    let mut r = 0u64;
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> s & 1 != 0 {
            a ^= m;
        }
    }
    r
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let mut r = a;
        while r != 0 && deg(r) >= deg(b) {
            r ^= b << (deg(r) - deg(b));
        }
        a = b;
        b = r;
    }
    a
}

/// Rabin test: x^(2^s) = x mod m and gcd(x^(2^(s/r)) - x, m) = 1 for prime r | s.
fn is_irreducible(m: u64, s: u32) -> bool {
    if s == 1 {
        return true;
    }
    let frob = |k: u32| {
        let mut x = 2u64;
        for _ in 0..k {
            x = poly_mulmod(x, x, m, s);
        }
        x
    };
    if frob(s) != 2 {
        return false;
    }
    prime_factors(s as u64)
        .into_iter()
        .all(|r| poly_gcd(m, frob(s / r as u32) ^ 2) == 1)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// GF(2^s) with precomputed tables.
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    tables: bool,
    // exp has length 2(q-1) so log a + log b never needs a reduction.
    exp: Vec<u16>,
    log: Vec<u16>,
    trace: Vec<u8>,
    root7_exp: Option<u64>,
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self, FieldError> {
        Self::build(spec, true)
    }

    /// Field using carry-less multiplication instead of log tables.
    pub fn without_tables(spec: FieldSpec) -> Result<Self, FieldError> {
        Self::build(spec, false)
    }

    pub fn with_default(s: u32) -> Result<Self, FieldError> {
        Self::new(FieldSpec::default_for(s)?)
    }

    fn build(spec: FieldSpec, tables: bool) -> Result<Self, FieldError> {
        let q = spec.q();
        let mut f = Field {
            spec,
            tables: false,
            exp: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
            root7_exp: inverse_mod(7, q as u64 - 1),
        };
        if tables {
            let g = f.find_generator();
            let mut exp = vec![0u16; 2 * (q - 1)];
            let mut log = vec![0u16; q];
            let mut x = Fe::ONE;
            for (i, e) in exp.iter_mut().enumerate().take(q - 1) {
                *e = x.0;
                log[x.0 as usize] = i as u16;
                x = f.clmul(x, g);
            }
            for i in q - 1..2 * (q - 1) {
                exp[i] = exp[i - (q - 1)];
            }
            f.exp = exp;
            f.log = log;
            f.tables = true;
        }
        let mut tr = vec![0u8; q];
        for (b, t) in tr.iter_mut().enumerate() {
            let mut acc = Fe(b as u16);
            let mut x = acc;
            for _ in 1..spec.s {
                x = f.mul(x, x);
                acc += x;
            }
            if acc.0 > 1 {
                return Err(FieldError::TraceInconsistent(b as u32));
            }
            *t = acc.0 as u8;
        }
        f.trace = tr;
        Ok(f)
    }

    fn find_generator(&self) -> Fe {
        let order = self.spec.q() as u64 - 1;
        let ps = prime_factors(order);
        (1..self.spec.q() as u16)
            .map(Fe)
            .find(|&g| ps.iter().all(|&p| self.pow_clmul(g, order / p) != Fe::ONE))
            .expect("multiplicative group is cyclic")
    }

    fn pow_clmul(&self, mut a: Fe, mut e: u64) -> Fe {
        let mut r = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                r = self.clmul(r, a);
            }
            a = self.clmul(a, a);
            e >>= 1;
        }
        r
    }

    #[inline]
    fn clmul(&self, a: Fe, b: Fe) -> Fe {
        Fe(poly_mulmod(a.0 as u64, b.0 as u64, self.spec.modulus as u64, self.spec.s) as u16)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn s(&self) -> u32 {
        self.spec.s
    }

    pub fn q(&self) -> usize {
        self.spec.q()
    }

    /// Checked constructor from a raw mask.
    pub fn elem(&self, bits: u32) -> Result<Fe, FieldError> {
        if (bits as usize) < self.q() {
            Ok(Fe(bits as u16))
        } else {
            Err(FieldError::OutOfRange { s: self.spec.s, bits })
        }
    }

    /// alpha^i in the polynomial basis.
    pub fn alpha_pow(&self, i: u64) -> Fe {
        self.pow(Fe(2.min(self.q() as u16 - 1)), i)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q() as u32).map(|b| Fe(b as u16))
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if !self.tables {
            return self.clmul(a, b);
        }
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        Fe(self.exp[self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.q() as u64 - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        if self.tables {
            let n = self.q() as u64 - 1;
            let l = (self.log[a.0 as usize] as u64 * (e % n)) % n;
            return Fe(self.exp[l as usize]);
        }
        self.pow_clmul(a, e)
    }

    /// Square root, a^(q/2).
    pub fn sqrt(&self, a: Fe) -> Fe {
        self.pow(a, self.q() as u64 / 2)
    }

    /// Exponent u with 7u = 1 mod q-1, if it exists.
    pub fn root7_exponent(&self) -> Result<u64, FieldError> {
        self.root7_exp.ok_or(FieldError::NoSeventhRoots(self.spec.s))
    }

    pub fn root7(&self, a: Fe) -> Result<Fe, FieldError> {
        Ok(self.pow(a, self.root7_exponent()?))
    }

    #[inline]
    pub fn trace(&self, a: Fe) -> u8 {
        self.trace[a.0 as usize]
    }

    /// log_g(a) for the internal generator, or None for zero / table-less fields.
    #[inline]
    pub fn log(&self, a: Fe) -> Option<usize> {
        if self.tables && !a.is_zero() {
            Some(self.log[a.0 as usize] as usize)
        } else {
            None
        }
    }

    /// sum_i a[i] b[i] c[i].
    pub fn triple_dot(&self, a: &[Fe], b: &[Fe], c: &[Fe]) -> Fe {
        let mut acc = Fe::ZERO;
        for ((&x, &y), &z) in a.iter().zip(b).zip(c) {
            acc += self.mul(self.mul(x, y), z);
        }
        acc
    }

    /// dst[i] += c * src[i].
    pub fn axpy(&self, c: Fe, src: &[Fe], dst: &mut [Fe]) {
        debug_assert_eq!(src.len(), dst.len());
        if c.is_zero() {
            return;
        }
        if c == Fe::ONE {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += *s;
            }
            return;
        }
        if !self.tables {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += self.clmul(c, *s);
            }
            return;
        }
        let lc = self.log[c.0 as usize] as usize;
        let exp = &self.exp[lc..];
        for (d, s) in dst.iter_mut().zip(src) {
            if s.0 != 0 {
                d.0 ^= exp[self.log[s.0 as usize] as usize];
            }
        }
    }

    /// v[i] *= c.
    pub fn scale(&self, c: Fe, v: &mut [Fe]) {
        for x in v.iter_mut() {
            *x = self.mul(c, *x);
        }
    }

    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        a.iter().zip(b).fold(Fe::ZERO, |acc, (&x, &y)| acc + self.mul(x, y))
    }

    /// Checks (sum y)^7 against its multinomial expansion.
    pub fn multinomial7_check(&self, y: &[Fe]) -> bool {
        let lhs = self.pow(y.iter().fold(Fe::ZERO, |a, &b| a + b), 7);
        let p = |a: Fe, e: u64| self.pow(a, e);
        let mut rhs = Fe::ZERO;
        for (a, &ya) in y.iter().enumerate() {
            rhs += p(ya, 7);
            for (b, &yb) in y.iter().enumerate() {
                if a == b {
                    continue;
                }
                rhs += self.mul(p(ya, 6), yb);
                rhs += self.mul(p(ya, 5), p(yb, 2));
                rhs += self.mul(p(ya, 4), p(yb, 3));
                for (c, &yc) in y.iter().enumerate() {
                    if c != a && c != b {
                        rhs += self.mul(self.mul(p(ya, 4), p(yb, 2)), yc);
                    }
                }
            }
        }
        lhs == rhs
    }

    pub fn to_hex(&self, a: Fe) -> String {
        format!("{:0w$x}", a.0, w = self.spec.hex_width())
    }

    pub fn from_hex(&self, s: &str) -> Result<Fe, FieldError> {
        if s.len() != self.spec.hex_width() || s.bytes().any(|c| c.is_ascii_uppercase()) {
            return Err(FieldError::BadHex(s.to_string()));
        }
        let v = u32::from_str_radix(s, 16).map_err(|_| FieldError::BadHex(s.to_string()))?;
        self.elem(v).map_err(|_| FieldError::BadHex(s.to_string()))
    }

    /// Concatenated fixed-width hex of a vector.
    pub fn vec_to_hex(&self, v: &[Fe]) -> String {
        v.iter().map(|&a| self.to_hex(a)).collect()
    }

    pub fn vec_from_hex(&self, s: &str) -> Result<Vec<Fe>, FieldError> {
        let w = self.spec.hex_width();
        if !s.len().is_multiple_of(w) || !s.is_ascii() {
            return Err(FieldError::BadHex(s.chars().take(16).collect()));
        }
        (0..s.len() / w).map(|i| self.from_hex(&s[i * w..(i + 1) * w])).collect()
    }
}

/// Inverse of a modulo n, if gcd(a, n) = 1.
pub fn inverse_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(n as i128) as u64)
}
