//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! An element is stored as its residue modulo the `N`-th cyclotomic
//! polynomial: a vector of `phi(N)` rationals, lowest power first. The
//! residue is always fully reduced, so structural equality is field equality.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor mismatch: Q(zeta_{0}) vs Q(zeta_{1})")]
    ConductorMismatch(u32, u32),
    #[error("cannot embed Q(zeta_{from}) into Q(zeta_{to}): {from} does not divide {to}")]
    NotDivisible { from: u32, to: u32 },
    #[error("conductor must be positive")]
    ZeroConductor,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("scalar parse error at column {column}: {message}")]
pub struct ScalarParseError {
    pub column: usize,
    pub message: String,
}

/// The `n`-th cyclotomic polynomial, lowest coefficient first.
///
/// Computed by dividing `x^n - 1` by `Phi_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigRational> {
    integer_cyclotomic(n)
        .into_iter()
        .map(BigRational::from_integer)
        .collect()
}

fn integer_cyclotomic(n: u32) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic polynomial needs n >= 1");
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            num = exact_div_monic(&num, &integer_cyclotomic(d));
        }
    }
    num
}

/// Quotient of `num` by the monic `den`; panics if the division is not exact.
fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quot
}

/// Reduction data shared by all elements of one field.
#[derive(Debug)]
pub(crate) struct FieldData {
    conductor: u32,
    degree: usize,
    /// `powers[k]` is the reduced residue of `x^k`, for `k < conductor`.
    powers: Vec<Vec<BigRational>>,
}

impl FieldData {
    fn build(conductor: u32) -> FieldData {
        let phi = integer_cyclotomic(conductor);
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(conductor as usize);
        let mut cur = vec![BigRational::zero(); degree];
        cur[0] = BigRational::one();
        for _ in 0..conductor {
            powers.push(cur.clone());
            // multiply by x, then fold x^degree back using the monic relation
            let top = cur[degree - 1].clone();
            for j in (1..degree).rev() {
                cur[j] = cur[j - 1].clone();
            }
            cur[0] = BigRational::zero();
            if !top.is_zero() {
                for j in 0..degree {
                    if !phi[j].is_zero() {
                        cur[j] -= &top * BigRational::from_integer(phi[j].clone());
                    }
                }
            }
        }
        FieldData {
            conductor,
            degree,
            powers,
        }
    }
}

fn field(conductor: u32) -> Arc<FieldData> {
    static FIELDS: OnceLock<Mutex<HashMap<u32, Arc<FieldData>>>> = OnceLock::new();
    let mut map = FIELDS
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .expect("field cache poisoned");
    map.entry(conductor)
        .or_insert_with(|| Arc::new(FieldData::build(conductor)))
        .clone()
}

/// Euler's totient, equal to the degree of `Q(zeta_n)` over `Q`.
pub fn euler_phi(n: u32) -> usize {
    let mut result = n as u64;
    let mut m = n as u64;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result as usize
}

/// An element of `Q(zeta_N)`.
#[derive(Clone)]
pub struct CycScalar {
    field: Arc<FieldData>,
    coeffs: Vec<BigRational>,
}

impl CycScalar {
    pub fn zero(conductor: u32) -> CycScalar {
        let field = field(conductor.max(1));
        let coeffs = vec![BigRational::zero(); field.degree];
        CycScalar { field, coeffs }
    }

    pub fn one(conductor: u32) -> CycScalar {
        CycScalar::from_rational(conductor, BigRational::one())
    }

    pub fn from_int(conductor: u32, value: i64) -> CycScalar {
        CycScalar::from_rational(conductor, BigRational::from_integer(value.into()))
    }

    pub fn from_rational(conductor: u32, value: BigRational) -> CycScalar {
        let mut s = CycScalar::zero(conductor);
        s.coeffs[0] = value;
        s
    }

    /// `zeta_N^k`; negative `k` is allowed.
    pub fn root_of_unity(conductor: u32, k: i64) -> CycScalar {
        let field = field(conductor.max(1));
        let e = k.rem_euclid(field.conductor as i64) as usize;
        let coeffs = field.powers[e].clone();
        CycScalar { field, coeffs }
    }

    /// Reduces an arbitrary polynomial in `zeta_N` (lowest power first).
    pub fn from_poly(conductor: u32, poly: &[BigRational]) -> CycScalar {
        let mut s = CycScalar::zero(conductor);
        s.accumulate_poly(poly.iter().enumerate());
        s
    }

    fn accumulate_poly<'a>(&mut self, terms: impl Iterator<Item = (usize, &'a BigRational)>) {
        let d = self.field.degree;
        let n = self.field.conductor as usize;
        for (k, c) in terms {
            if c.is_zero() {
                continue;
            }
            if k < d {
                self.coeffs[k] += c;
            } else {
                let field = self.field.clone();
                for (j, p) in field.powers[k % n].iter().enumerate() {
                    if !p.is_zero() {
                        self.coeffs[j] += c * p;
                    }
                }
            }
        }
    }

    pub fn conductor(&self) -> u32 {
        self.field.conductor
    }

    /// Residue coefficients, lowest power of `zeta_N` first.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if this element lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check(&self, other: &CycScalar) -> Result<(), CycError> {
        if self.field.conductor == other.field.conductor {
            Ok(())
        } else {
            Err(CycError::ConductorMismatch(
                self.field.conductor,
                other.field.conductor,
            ))
        }
    }

    pub fn checked_add(&self, other: &CycScalar) -> Result<CycScalar, CycError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycScalar {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &CycScalar) -> Result<CycScalar, CycError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycScalar {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &CycScalar) -> Result<CycScalar, CycError> {
        self.check(other)?;
        if let Some(r) = other.rational_fast() {
            return Ok(self.scale(r));
        }
        if let Some(r) = self.rational_fast() {
            return Ok(other.scale(r));
        }
        let d = self.field.degree;
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut out = CycScalar {
            field: self.field.clone(),
            coeffs: prod[..d].to_vec(),
        };
        out.accumulate_poly(prod.iter().enumerate().skip(d));
        Ok(out)
    }

    fn rational_fast(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Multiplies by a rational number.
    pub fn scale(&self, r: &BigRational) -> CycScalar {
        CycScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplies by `zeta_N^k` without a general product.
    pub fn mul_root(&self, k: i64) -> CycScalar {
        let n = self.field.conductor as i64;
        let shift = k.rem_euclid(n) as usize;
        if shift == 0 {
            return self.clone();
        }
        let mut out = CycScalar::zero(self.field.conductor);
        out.accumulate_poly(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| (j + shift, c)),
        );
        out
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<CycScalar, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        if let Some(r) = self.rational_fast() {
            return Ok(CycScalar::from_rational(self.field.conductor, r.recip()));
        }
        // Solve (multiplication-by-self) * x = 1 over Q.
        let d = self.field.degree;
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(d);
        for j in 0..d {
            cols.push(self.mul_root(j as i64).coeffs);
        }
        // augmented matrix rows: a[i][j] = cols[j][i]
        let mut a: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..d).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d)
                .find(|&r| !a[r][col].is_zero())
                .expect("nonzero element of a field is invertible");
            a.swap(col, piv);
            let p = a[col][col].recip();
            for x in a[col].iter_mut() {
                *x *= &p;
            }
            for r in 0..d {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    let (src, dst) = if r < col {
                        let (lo, hi) = a.split_at_mut(col);
                        (&hi[0], &mut lo[r])
                    } else {
                        let (lo, hi) = a.split_at_mut(r);
                        (&lo[col], &mut hi[0])
                    };
                    for (x, y) in dst.iter_mut().zip(src.iter()) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
        }
        let coeffs = a.into_iter().map(|row| row[d].clone()).collect();
        Ok(CycScalar {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn checked_div(&self, other: &CycScalar) -> Result<CycScalar, CycError> {
        self.check(other)?;
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<CycScalar, CycError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut result = CycScalar::one(self.field.conductor);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(result)
    }

    /// Image under `Q(zeta_N) -> Q(zeta_M)`, `zeta_N -> zeta_M^(M/N)`.
    pub fn embed(&self, target: u32) -> Result<CycScalar, CycError> {
        if target == 0 {
            return Err(CycError::ZeroConductor);
        }
        let n = self.field.conductor;
        if target % n != 0 {
            return Err(CycError::NotDivisible {
                from: n,
                to: target,
            });
        }
        let step = (target / n) as usize;
        let mut out = CycScalar::zero(target);
        out.accumulate_poly(self.coeffs.iter().enumerate().map(|(k, c)| (k * step, c)));
        Ok(out)
    }

    /// If this element equals `zeta_N^k`, returns the least such `k`.
    pub fn root_exponent(&self) -> Option<u32> {
        let field = &self.field;
        (0..field.conductor).find(|&k| field.powers[k as usize] == self.coeffs)
    }

    /// Multiplicative order, if this element is a root of unity in the field.
    ///
    /// `Q(zeta_N)` contains the `2N`-th roots of unity when `N` is odd, so
    /// `-zeta_N^k` is also recognized.
    pub fn root_order(&self) -> Option<u32> {
        let n = self.field.conductor;
        let exp = self
            .root_exponent()
            .map(|k| (k * 2 % (2 * n), 2 * n))
            .or_else(|| {
                (-self)
                    .root_exponent()
                    .map(|k| ((2 * k + n) % (2 * n), 2 * n))
            })?;
        let (k, m) = exp;
        Some(m / (k as u64).gcd(&(m as u64)).max(1) as u32)
    }

    /// Parses the scalar grammar: `term (('+'|'-') term)*` with
    /// `term := rat | rat '*' 'z^' int | 'z^' int` and `rat := int ('/' uint)?`.
    pub fn parse(text: &str, conductor: u32) -> Result<CycScalar, ScalarParseError> {
        ScalarParser::new(text, conductor).parse_all()
    }
}

struct ScalarParser {
    chars: Vec<(usize, char)>,
    pos: usize,
    conductor: u32,
    end_col: usize,
}

impl ScalarParser {
    fn new(text: &str, conductor: u32) -> ScalarParser {
        let chars: Vec<(usize, char)> = text
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .map(|(i, c)| (i + 1, c))
            .collect();
        ScalarParser {
            chars,
            pos: 0,
            conductor,
            end_col: text.len() + 1,
        }
    }

    fn err(&self, message: impl Into<String>) -> ScalarParseError {
        let column = self
            .chars
            .get(self.pos)
            .map(|(i, _)| *i)
            .unwrap_or(self.end_col);
        ScalarParseError {
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<CycScalar, ScalarParseError> {
        if self.chars.is_empty() {
            return Err(self.err("empty scalar"));
        }
        let mut total = CycScalar::zero(self.conductor);
        let mut negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            let term = self.parse_term()?;
            if negative {
                total -= &term;
            } else {
                total += &term;
            }
            match self.peek() {
                None => break,
                Some('+') => {
                    self.pos += 1;
                    negative = false;
                }
                Some('-') => {
                    self.pos += 1;
                    negative = true;
                }
                Some(c) => return Err(self.err(format!("unexpected character '{c}'"))),
            }
        }
        Ok(total)
    }

    fn parse_uint(&mut self) -> Result<BigInt, ScalarParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let digits: String = self.chars[start..self.pos].iter().map(|(_, c)| *c).collect();
        Ok(digits.parse().expect("digits parse as integer"))
    }

    fn parse_int(&mut self) -> Result<BigInt, ScalarParseError> {
        let neg = self.eat('-');
        let v = self.parse_uint()?;
        Ok(if neg { -v } else { v })
    }

    fn parse_root(&mut self) -> Result<CycScalar, ScalarParseError> {
        if !(self.eat('z') && self.eat('^')) {
            return Err(self.err("expected 'z^'"));
        }
        let e = self.parse_int()?;
        let n = self.conductor as i64;
        let k = (e % BigInt::from(n))
            .to_i64()
            .expect("reduced exponent fits");
        Ok(CycScalar::root_of_unity(self.conductor, k))
    }

    fn parse_term(&mut self) -> Result<CycScalar, ScalarParseError> {
        if self.peek() == Some('z') {
            return self.parse_root();
        }
        let num = self.parse_uint()?;
        let den = if self.eat('/') {
            let d = self.parse_uint()?;
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            d
        } else {
            BigInt::one()
        };
        let rat = CycScalar::from_rational(self.conductor, BigRational::new(num, den));
        if self.eat('*') {
            let root = self.parse_root()?;
            Ok(&rat * &root)
        } else {
            Ok(rat)
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CycScalar {
    /// Renders in the input grammar, e.g. `1/2 - z^1 + 3*z^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if k == 0 {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "z^{k}")?;
            } else {
                write!(f, "{}*z^{k}", fmt_rational(&mag))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc{}({})", self.field.conductor, self)
    }
}

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        self.field.conductor == other.field.conductor && self.coeffs == other.coeffs
    }
}

impl Eq for CycScalar {}

impl Hash for CycScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.conductor.hash(state);
        self.coeffs.hash(state);
    }
}

// Operator impls panic on conductor mismatch; the `checked_*` methods report it.
macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&CycScalar> for &CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar {
                self.$checked(rhs).expect("cyclotomic operands")
            }
        }
        impl $tr<CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar {
                (&self).$checked(&rhs).expect("cyclotomic operands")
            }
        }
        impl $tr<&CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar {
                (&self).$checked(rhs).expect("cyclotomic operands")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl AddAssign<&CycScalar> for CycScalar {
    fn add_assign(&mut self, rhs: &CycScalar) {
        self.check(rhs).expect("cyclotomic operands");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }
}

impl SubAssign<&CycScalar> for CycScalar {
    fn sub_assign(&mut self, rhs: &CycScalar) {
        self.check(rhs).expect("cyclotomic operands");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a -= b;
            }
        }
    }
}

impl MulAssign<&CycScalar> for CycScalar {
    fn mul_assign(&mut self, rhs: &CycScalar) {
        *self = &*self * rhs;
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        CycScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(mut self) -> CycScalar {
        for c in self.coeffs.iter_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}
