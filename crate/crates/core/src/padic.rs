//! Residues of `Z_p` modulo `p^N`.
//!
//! Every value in the crate is a residue in `[0, p^N)` for a fixed odd prime `p`
//! and a fixed precision exponent `N`. The context carries the modulus and all
//! scalar arithmetic; [`PadicInt`] is a thin checked wrapper used at API
//! boundaries while matrix and polynomial kernels work on raw `u128` residues.
//!
//! Residues are stored in `u128`, so contexts are limited to `p^N < 2^127`.
//! Products are taken directly when the modulus fits in 64 bits and through a
//! shift-and-add reduction otherwise.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

const WIDE_LIMIT: u128 = 1 << 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
    precision_exp: u32,
    modulus: u128,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PadicContext {
    pub fn new(p: u64, precision_exp: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidContext(format!(
                "p = {p} is not an odd prime"
            )));
        }
        if precision_exp == 0 {
            return Err(Error::InvalidContext(
                "precision exponent must be >= 1".into(),
            ));
        }
        let mut modulus: u128 = 1;
        for _ in 0..precision_exp {
            modulus = modulus
                .checked_mul(p as u128)
                .filter(|m| *m < (1u128 << 127))
                .ok_or_else(|| {
                    Error::InvalidContext(format!("{p}^{precision_exp} exceeds 2^127"))
                })?;
        }
        Ok(PadicContext {
            p,
            precision_exp,
            modulus,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn precision_exp(&self) -> u32 {
        self.precision_exp
    }

    /// The modulus `p^N`.
    #[inline]
    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// `p^e` for `e <= N`; `p^N` itself is returned as the modulus, not as 0.
    pub fn p_pow(&self, e: u32) -> u128 {
        assert!(e <= self.precision_exp, "p^{e} beyond precision");
        (self.p as u128).pow(e)
    }

    /// `p^e` reduced modulo `p^N`, so `p^N` maps to 0.
    pub fn p_pow_res(&self, e: u32) -> u128 {
        if e >= self.precision_exp {
            0
        } else {
            (self.p as u128).pow(e)
        }
    }

    #[inline]
    pub fn reduce(&self, x: u128) -> u128 {
        x % self.modulus
    }

    pub fn from_i128(&self, x: i128) -> u128 {
        let m = self.modulus as i128;
        let r = x % m;
        (if r < 0 { r + m } else { r }) as u128
    }

    pub fn from_i64(&self, x: i64) -> u128 {
        self.from_i128(x as i128)
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        if self.modulus <= WIDE_LIMIT {
            (a * b) % self.modulus
        } else {
            self.mul_wide(a, b)
        }
    }

    fn mul_wide(&self, mut a: u128, mut b: u128) -> u128 {
        let mut acc = 0u128;
        while b > 0 {
            if b & 1 == 1 {
                acc = self.add(acc, a);
            }
            a = self.add(a, a);
            b >>= 1;
        }
        acc
    }

    pub fn pow(&self, base: u128, mut exp: u64) -> u128 {
        let mut acc = self.reduce(1);
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Largest `v <= N` with `p^v | x`; the zero residue has valuation `N`.
    pub fn valuation(&self, x: u128) -> u32 {
        if x == 0 {
            return self.precision_exp;
        }
        let p = self.p as u128;
        let mut v = 0;
        let mut y = x;
        while y.is_multiple_of(p) {
            y /= p;
            v += 1;
        }
        v
    }

    /// `x / p^v` for a residue divisible by `p^v`, as a residue mod `p^N`.
    ///
    /// The top `v` digits of the quotient are not determined by `x`; this
    /// returns the representative obtained by dividing the stored integer.
    pub fn div_p_pow(&self, x: u128, v: u32) -> u128 {
        let pv = (self.p as u128).pow(v);
        debug_assert_eq!(x % pv, 0, "residue not divisible by p^{v}");
        x / pv
    }

    /// Splits a nonzero residue as `p^v * u` with `u` a unit.
    pub fn split_unit(&self, x: u128) -> (u32, u128) {
        let v = self.valuation(x);
        (v, self.div_p_pow(x, v))
    }

    pub fn inv_unit(&self, x: u128) -> Result<u128> {
        let v = self.valuation(x);
        if v > 0 {
            return Err(Error::NotAUnit(v));
        }
        // extended Euclid over i128 is safe for moduli below 2^127
        let (mut r0, mut r1) = (self.modulus as i128, x as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.from_i128(t0))
    }

    /// Centered representative in `(-p^N/2, p^N/2]`, used for display.
    pub fn centered(&self, x: u128) -> i128 {
        if x > self.modulus / 2 {
            x as i128 - self.modulus as i128
        } else {
            x as i128
        }
    }

    pub fn int(&self, residue: i128) -> PadicInt {
        PadicInt {
            residue: self.from_i128(residue),
            ctx: *self,
        }
    }
}

impl fmt::Display for PadicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.precision_exp)
    }
}

/// A `p`-adic integer known modulo `p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    residue: u128,
    ctx: PadicContext,
}

impl PadicInt {
    pub fn new(ctx: PadicContext, residue: u128) -> Self {
        PadicInt {
            residue: ctx.reduce(residue),
            ctx,
        }
    }

    pub fn zero(ctx: PadicContext) -> Self {
        PadicInt { residue: 0, ctx }
    }

    pub fn one(ctx: PadicContext) -> Self {
        PadicInt::new(ctx, 1)
    }

    pub fn residue(&self) -> u128 {
        self.residue
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    fn check(&self, other: &PadicInt) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        Ok(PadicInt {
            residue: self.ctx.add(self.residue, other.residue),
            ctx: self.ctx,
        })
    }

    pub fn try_sub(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        Ok(PadicInt {
            residue: self.ctx.sub(self.residue, other.residue),
            ctx: self.ctx,
        })
    }

    pub fn try_mul(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        Ok(PadicInt {
            residue: self.ctx.mul(self.residue, other.residue),
            ctx: self.ctx,
        })
    }

    pub fn valuation(&self) -> u32 {
        self.ctx.valuation(self.residue)
    }

    /// True when the residue is zero, i.e. the value sits at the precision floor.
    pub fn at_precision_floor(&self) -> bool {
        self.residue == 0
    }

    pub fn invert_unit(&self) -> Result<PadicInt> {
        Ok(PadicInt {
            residue: self.ctx.inv_unit(self.residue)?,
            ctx: self.ctx,
        })
    }
}

// Operator impls panic on context mismatch; use the `try_*` methods to recover.
impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: PadicInt) -> PadicInt {
        self.try_add(&rhs).expect("p-adic context mismatch")
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: PadicInt) -> PadicInt {
        self.try_sub(&rhs).expect("p-adic context mismatch")
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: PadicInt) -> PadicInt {
        self.try_mul(&rhs).expect("p-adic context mismatch")
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        PadicInt {
            residue: self.ctx.neg(self.residue),
            ctx: self.ctx,
        }
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}
