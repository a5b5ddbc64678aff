//! Polynomials and rational functions in the indeterminate `N` with exact
//! rational coefficients.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * N^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Lowest power of `N` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiply by `N^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Divide by `N^k`; the caller guarantees the low coefficients vanish.
    fn unshift(&self, k: usize) -> Self {
        Self::from_coeffs(self.coeffs[k.min(self.coeffs.len())..].to_vec())
    }

    pub fn make_monic(&self) -> Self {
        match self.leading() {
            Some(lc) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Euclidean division: `(q, r)` with `self = q * divisor + r`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let t = &c * dc;
                rem[k + j] -= t;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.make_monic();
        }
        a.make_monic()
    }

    pub fn eval(&self, n: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * n + c)
    }

    /// Least common multiple of coefficient denominators.
    fn denominator_lcm(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    fn integer_content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::from_coeffs(coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

/// Rational function `num(N) / den(N)` in lowest terms with a monic
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalInN {
    num: Poly,
    den: Poly,
}

impl RationalInN {
    pub fn zero() -> Self {
        Self { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(c: i64) -> Self {
        Self::from_rational(BigRational::from_integer(c.into()))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self { num: Poly::constant(c), den: Poly::one() }
    }

    /// `c * N^k` for any integer `k`.
    pub fn monomial(c: i64, k: i32) -> Self {
        let c = BigRational::from_integer(c.into());
        if k >= 0 {
            Self { num: Poly::monomial(c, k as usize), den: Poly::one() }
        } else {
            Self::new(Poly::constant(c), Poly::monomial(BigRational::one(), (-k) as usize))
        }
    }

    /// Reduce `num / den`.
    ///
    /// # Panics
    /// If `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = strip_common_power(num, den);
        let g = num.gcd(&den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lc_inv = den.leading().expect("nonzero").recip();
        Self { num: num.scale(&lc_inv), den: den.scale(&lc_inv) }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The constant value when the function does not depend on `N`.
    pub fn as_constant(&self) -> Option<BigRational> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(BigRational::zero()),
            (Some(0), Some(0)) => Some(&self.num.coeffs()[0] / &self.den.coeffs()[0]),
            _ => None,
        }
    }

    pub fn recip(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Exact value at `N = n`; `None` at a pole.
    pub fn eval(&self, n: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(n);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(n) / d)
    }

    /// Value at integer `N`, rounded once from the exact rational value.
    pub fn eval_f64(&self, n: u64) -> f64 {
        let n = BigRational::from_integer(BigInt::from(n));
        self.eval(&n).and_then(|v| v.to_f64()).unwrap_or(f64::NAN)
    }

    /// Canonical text `p(N)/q(N)` with integer coefficients, the numerator
    /// and denominator sharing no integer factor and the denominator having
    /// a positive leading coefficient.
    pub fn to_canonical_string(&self) -> String {
        let scale = self.num.denominator_lcm().lcm(&self.den.denominator_lcm());
        let scale = BigRational::from_integer(scale);
        let num = self.num.scale(&scale);
        let den = self.den.scale(&scale);
        let content = num.integer_content().gcd(&den.integer_content());
        let content = BigRational::from_integer(content).recip();
        let num = num.scale(&content);
        let den = den.scale(&content);
        alloc::format!("{}/{}", PolyText(&num), PolyText(&den))
    }
}

fn strip_common_power(num: Poly, den: Poly) -> (Poly, Poly) {
    let k = num.valuation().unwrap_or(0).min(den.valuation().unwrap_or(0));
    if k == 0 {
        (num, den)
    } else {
        (num.unshift(k), den.unshift(k))
    }
}

impl Add for &RationalInN {
    type Output = RationalInN;
    fn add(self, rhs: &RationalInN) -> RationalInN {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalInN::new(&self.num + &rhs.num, self.den.clone());
        }
        RationalInN::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Neg for &RationalInN {
    type Output = RationalInN;
    fn neg(self) -> RationalInN {
        RationalInN { num: -&self.num, den: self.den.clone() }
    }
}

impl Sub for &RationalInN {
    type Output = RationalInN;
    fn sub(self, rhs: &RationalInN) -> RationalInN {
        self + &(-rhs)
    }
}

impl Mul for &RationalInN {
    type Output = RationalInN;
    fn mul(self, rhs: &RationalInN) -> RationalInN {
        if self.is_zero() || rhs.is_zero() {
            return RationalInN::zero();
        }
        RationalInN::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalInN {
    type Output = RationalInN;
    fn div(self, rhs: &RationalInN) -> RationalInN {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RationalInN::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl fmt::Display for RationalInN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

/// Integer-coefficient polynomial in descending powers, e.g. `(2*N^2 - N + 3)`;
/// parenthesized when it has more than one term.
struct PolyText<'a>(&'a Poly);

impl fmt::Display for PolyText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs = self.0.coeffs();
        if coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms = coeffs.iter().filter(|c| !c.is_zero()).count();
        if terms > 1 {
            f.write_str("(")?;
        }
        let mut first = true;
        for (k, c) in coeffs.iter().enumerate().rev() {
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
            let unit = mag.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{}", mag)?,
                (_, true) => {}
                (_, false) => write!(f, "{}*", mag)?,
            }
            match k {
                0 => {}
                1 => f.write_str("N")?,
                _ => write!(f, "N^{}", k)?,
            }
        }
        if terms > 1 {
            f.write_str(")")?;
        }
        Ok(())
    }
}
