//! Elements of `Λ = Z_p[[T]]` modulo `p^N`, as polynomials or as power series
//! truncated at a degree cap.
//!
//! Polynomials ([`LambdaPoly`]) carry exact inputs such as distinguished
//! polynomials, `ω_n` and `ν_{m,n}`. Truncations ([`LambdaTrunc`]) carry
//! general power series, units, and anything produced by series inversion.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::padic::PadicContext;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaPoly {
    coeffs: Vec<u128>,
    ctx: PadicContext,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaTrunc {
    coeffs: Vec<u128>,
    ctx: PadicContext,
}

/// The level offset `k` of a tower: `ω_n` is flattened to `ω_k` below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TowerParams {
    pub p: u64,
    pub k: u32,
}

/// Output of [`weierstrass_prepare`]: `f = p^mu · distinguished · unit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassData {
    pub mu: u32,
    pub lambda: usize,
    pub distinguished: LambdaPoly,
    pub unit: LambdaTrunc,
}

fn trim(mut v: Vec<u128>) -> Vec<u128> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn check_ctx(a: &PadicContext, b: &PadicContext) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ContextMismatch)
    }
}

/// Product of coefficient lists, keeping only degrees below `cap`.
fn mul_coeffs(ctx: &PadicContext, a: &[u128], b: &[u128], cap: usize) -> Vec<u128> {
    if a.is_empty() || b.is_empty() || cap == 0 {
        return Vec::new();
    }
    let len = (a.len() + b.len() - 1).min(cap);
    let mut out = vec![0u128; len];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 || i >= len {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            if y != 0 {
                out[i + j] = ctx.add(out[i + j], ctx.mul(x, y));
            }
        }
    }
    out
}

fn add_coeffs(ctx: &PadicContext, a: &[u128], b: &[u128]) -> Vec<u128> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            ctx.add(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
            )
        })
        .collect()
}

fn sub_coeffs(ctx: &PadicContext, a: &[u128], b: &[u128]) -> Vec<u128> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            ctx.sub(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
            )
        })
        .collect()
}

fn write_coeffs(f: &mut fmt::Formatter<'_>, ctx: &PadicContext, coeffs: &[u128]) -> fmt::Result {
    let mut first = true;
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let v = ctx.centered(c);
        let (neg, mag) = (v < 0, v.unsigned_abs());
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        match (i, mag) {
            (0, m) => write!(f, "{m}")?,
            (1, 1) => write!(f, "T")?,
            (1, m) => write!(f, "{m}T")?,
            (e, 1) => write!(f, "T^{e}")?,
            (e, m) => write!(f, "{m}T^{e}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl LambdaPoly {
    /// Builds a polynomial from residues in ascending degree; they are reduced
    /// and trailing zeros trimmed.
    pub fn new(ctx: PadicContext, coeffs: Vec<u128>) -> Self {
        let coeffs = trim(coeffs.into_iter().map(|c| ctx.reduce(c)).collect());
        LambdaPoly { coeffs, ctx }
    }

    pub fn from_i64s(ctx: PadicContext, coeffs: &[i64]) -> Self {
        LambdaPoly::new(ctx, coeffs.iter().map(|&c| ctx.from_i64(c)).collect())
    }

    pub fn zero(ctx: PadicContext) -> Self {
        LambdaPoly {
            coeffs: Vec::new(),
            ctx,
        }
    }

    pub fn one(ctx: PadicContext) -> Self {
        LambdaPoly::new(ctx, vec![1])
    }

    pub fn constant(ctx: PadicContext, c: u128) -> Self {
        LambdaPoly::new(ctx, vec![c])
    }

    /// The variable `T`.
    pub fn t(ctx: PadicContext) -> Self {
        LambdaPoly::new(ctx, vec![0, 1])
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u128] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u128 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, other: &LambdaPoly) -> Result<LambdaPoly> {
        check_ctx(&self.ctx, &other.ctx)?;
        let cap = self.coeffs.len() + other.coeffs.len();
        Ok(LambdaPoly::new(
            self.ctx,
            mul_coeffs(&self.ctx, &self.coeffs, &other.coeffs, cap),
        ))
    }

    pub fn add(&self, other: &LambdaPoly) -> Result<LambdaPoly> {
        check_ctx(&self.ctx, &other.ctx)?;
        Ok(LambdaPoly::new(
            self.ctx,
            add_coeffs(&self.ctx, &self.coeffs, &other.coeffs),
        ))
    }

    pub fn sub(&self, other: &LambdaPoly) -> Result<LambdaPoly> {
        check_ctx(&self.ctx, &other.ctx)?;
        Ok(LambdaPoly::new(
            self.ctx,
            sub_coeffs(&self.ctx, &self.coeffs, &other.coeffs),
        ))
    }

    pub fn scale(&self, c: u128) -> LambdaPoly {
        LambdaPoly::new(
            self.ctx,
            self.coeffs.iter().map(|&x| self.ctx.mul(x, c)).collect(),
        )
    }

    pub fn pow(&self, mut e: u32) -> LambdaPoly {
        let mut acc = LambdaPoly::one(self.ctx);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same context");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same context");
            }
        }
        acc
    }

    /// Division by a monic polynomial: `self = q·g + r` with `deg r < deg g`.
    pub fn div_rem_monic(&self, g: &LambdaPoly) -> Result<(LambdaPoly, LambdaPoly)> {
        check_ctx(&self.ctx, &g.ctx)?;
        let d = g.degree().ok_or(Error::ZeroPolynomial)?;
        if g.coeff(d) != 1 {
            return Err(Error::NotDistinguished);
        }
        let ctx = self.ctx;
        let mut r = self.coeffs.clone();
        if r.len() <= d {
            return Ok((LambdaPoly::zero(ctx), self.clone()));
        }
        let mut q = vec![0u128; r.len() - d];
        for i in (d..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            q[i - d] = c;
            for (j, &gj) in g.coeffs.iter().enumerate() {
                r[i - d + j] = ctx.sub(r[i - d + j], ctx.mul(c, gj));
            }
        }
        r.truncate(d);
        Ok((LambdaPoly::new(ctx, q), LambdaPoly::new(ctx, r)))
    }

    pub fn rem_monic(&self, g: &LambdaPoly) -> Result<LambdaPoly> {
        Ok(self.div_rem_monic(g)?.1)
    }

    /// Monic with every lower coefficient divisible by `p`.
    pub fn is_distinguished(&self) -> Result<bool> {
        let d = self.degree().ok_or(Error::ZeroPolynomial)?;
        Ok(self.coeff(d) == 1 && self.coeffs[..d].iter().all(|&c| self.ctx.valuation(c) >= 1))
    }

    /// Minimum coefficient valuation; `N` for the zero polynomial.
    pub fn content_valuation(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|&c| self.ctx.valuation(c))
            .min()
            .unwrap_or(self.ctx.precision_exp())
    }

    pub fn to_trunc(&self, cap: usize) -> LambdaTrunc {
        LambdaTrunc::new(self.ctx, self.coeffs.clone(), cap)
    }

    /// `self(m)` for a square matrix `m`.
    pub fn eval_matrix(&self, m: &Mat) -> Mat {
        m.eval_poly(&self.coeffs, &self.ctx)
    }

    /// Coefficients as centered integers, for reports.
    pub fn centered_coeffs(&self) -> Vec<i128> {
        self.coeffs.iter().map(|&c| self.ctx.centered(c)).collect()
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_coeffs(f, &self.ctx, &self.coeffs)
    }
}

impl LambdaTrunc {
    /// Series with the given low coefficients, padded or cut to `cap` terms.
    pub fn new(ctx: PadicContext, coeffs: Vec<u128>, cap: usize) -> Self {
        let mut c: Vec<u128> = coeffs
            .into_iter()
            .take(cap)
            .map(|x| ctx.reduce(x))
            .collect();
        c.resize(cap, 0);
        LambdaTrunc { coeffs: c, ctx }
    }

    pub fn from_i64s(ctx: PadicContext, coeffs: &[i64], cap: usize) -> Self {
        LambdaTrunc::new(ctx, coeffs.iter().map(|&c| ctx.from_i64(c)).collect(), cap)
    }

    pub fn zero(ctx: PadicContext, cap: usize) -> Self {
        LambdaTrunc::new(ctx, Vec::new(), cap)
    }

    pub fn one(ctx: PadicContext, cap: usize) -> Self {
        LambdaTrunc::new(ctx, vec![1], cap)
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn degree_cap(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u128] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u128 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.coeff(0) != 0 && self.ctx.valuation(self.coeff(0)) == 0
    }

    fn check(&self, other: &LambdaTrunc) -> Result<()> {
        check_ctx(&self.ctx, &other.ctx)?;
        if self.degree_cap() != other.degree_cap() {
            return Err(Error::DimensionMismatch(format!(
                "degree caps {} and {}",
                self.degree_cap(),
                other.degree_cap()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &LambdaTrunc) -> Result<LambdaTrunc> {
        self.check(other)?;
        let cap = self.degree_cap();
        Ok(LambdaTrunc::new(
            self.ctx,
            mul_coeffs(&self.ctx, &self.coeffs, &other.coeffs, cap),
            cap,
        ))
    }

    pub fn add(&self, other: &LambdaTrunc) -> Result<LambdaTrunc> {
        self.check(other)?;
        Ok(LambdaTrunc::new(
            self.ctx,
            add_coeffs(&self.ctx, &self.coeffs, &other.coeffs),
            self.degree_cap(),
        ))
    }

    pub fn sub(&self, other: &LambdaTrunc) -> Result<LambdaTrunc> {
        self.check(other)?;
        Ok(LambdaTrunc::new(
            self.ctx,
            sub_coeffs(&self.ctx, &self.coeffs, &other.coeffs),
            self.degree_cap(),
        ))
    }

    pub fn scale(&self, c: u128) -> LambdaTrunc {
        let coeffs = self.coeffs.iter().map(|&x| self.ctx.mul(x, c)).collect();
        LambdaTrunc {
            coeffs,
            ctx: self.ctx,
        }
    }

    /// Series inverse of a unit.
    pub fn inverse(&self) -> Result<LambdaTrunc> {
        let cap = self.degree_cap();
        let ctx = self.ctx;
        let c0inv = ctx.inv_unit(self.coeff(0))?;
        let mut inv = vec![0u128; cap];
        if cap == 0 {
            return Ok(self.clone());
        }
        inv[0] = c0inv;
        for i in 1..cap {
            let mut s = 0u128;
            for j in 1..=i {
                s = ctx.add(s, ctx.mul(self.coeffs[j], inv[i - j]));
            }
            inv[i] = ctx.neg(ctx.mul(s, c0inv));
        }
        Ok(LambdaTrunc { coeffs: inv, ctx })
    }

    /// Minimum coefficient valuation; `N` when every coefficient vanishes.
    pub fn content_valuation(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|&c| self.ctx.valuation(c))
            .min()
            .unwrap_or(self.ctx.precision_exp())
    }

    pub fn to_poly(&self) -> LambdaPoly {
        LambdaPoly::new(self.ctx, self.coeffs.clone())
    }

    /// Re-truncates to a different cap (padding with zeros when growing).
    pub fn with_cap(&self, cap: usize) -> LambdaTrunc {
        LambdaTrunc::new(self.ctx, self.coeffs.clone(), cap)
    }

    pub fn eval_matrix(&self, m: &Mat) -> Mat {
        m.eval_poly(&self.coeffs, &self.ctx)
    }
}

impl fmt::Display for LambdaTrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_coeffs(f, &self.ctx, &self.coeffs)?;
        write!(f, " + O(T^{})", self.degree_cap())
    }
}

/// Divides `h` by a series `f1` whose Weierstrass degree is `lambda`
/// (coefficients below `lambda` divisible by `p`, coefficient `lambda` a unit).
/// Returns `(q, r)` with `h ≡ q·f1 + r mod (p^N, T^D)` and `deg r < lambda`.
fn divide_by_series(
    h: &LambdaTrunc,
    f1: &LambdaTrunc,
    lambda: usize,
) -> Result<(LambdaTrunc, LambdaPoly)> {
    let ctx = *h.ctx();
    let cap = h.degree_cap();
    let top = cap - lambda;
    let u = LambdaTrunc::new(ctx, f1.coeffs()[lambda..].to_vec(), top);
    let uinv = u.inverse()?;
    let mut q = LambdaTrunc::zero(ctx, cap);
    let mut cur = h.clone();
    // each round multiplies the part of degree >= lambda by at least p
    for _ in 0..ctx.precision_exp() + 2 {
        let high = LambdaTrunc::new(ctx, cur.coeffs()[lambda..].to_vec(), top);
        if high.is_zero() {
            let r = LambdaPoly::new(ctx, cur.coeffs()[..lambda].to_vec());
            return Ok((q, r));
        }
        let step = high.mul(&uinv)?.with_cap(cap);
        q = q.add(&step)?;
        cur = cur.sub(&step.mul(f1)?)?;
    }
    Err(Error::PrecisionExhausted(
        "division did not converge".into(),
    ))
}

/// Weierstrass division of `f` by a distinguished `g` in `Λ/(p^N, T^D)`.
pub fn weierstrass_divide(f: &LambdaTrunc, g: &LambdaPoly) -> Result<(LambdaTrunc, LambdaPoly)> {
    check_ctx(f.ctx(), g.ctx())?;
    if !g.is_distinguished()? {
        return Err(Error::NotDistinguished);
    }
    let d = g.degree().expect("nonzero");
    if f.degree_cap() < d.max(1) {
        return Err(Error::InsufficientDegreeCap {
            cap: f.degree_cap(),
            needed: d.max(1),
        });
    }
    let cap = f.degree_cap();
    let work = working_cap(f.ctx(), cap, d);
    let (q, r) = divide_by_series(&f.with_cap(work), &g.to_trunc(work), d)?;
    Ok((q.with_cap(cap), r))
}

/// Internal cap used when a truncated input is read as the polynomial it
/// stores. Truncation error in the quotient moves down `lambda` degrees for
/// every factor of `p` it loses, so this much headroom makes the returned
/// low-degree part exact.
fn working_cap(ctx: &PadicContext, cap: usize, lambda: usize) -> usize {
    cap + lambda * (ctx.precision_exp() as usize + 1)
}

/// Weierstrass preparation `f = p^μ · P · u` in `Λ/(p^N, T^D)`.
///
/// The stored coefficients are read as an exact polynomial, so `P` and the
/// low-degree part of `u` are those of that polynomial rather than depending
/// on how the tail beyond the cap is filled in.
pub fn weierstrass_prepare(f: &LambdaTrunc) -> Result<WeierstrassData> {
    let ctx = *f.ctx();
    let cap = f.degree_cap();
    let mu = f.content_valuation();
    if mu >= ctx.precision_exp() {
        return Err(Error::PrecisionExhausted(
            "every coefficient vanishes at the working precision".into(),
        ));
    }
    let f1 = LambdaTrunc::new(
        ctx,
        f.coeffs().iter().map(|&c| ctx.div_p_pow(c, mu)).collect(),
        cap,
    );
    let lambda = f1
        .coeffs()
        .iter()
        .position(|&c| c != 0 && ctx.valuation(c) == 0)
        .expect("content valuation is attained");
    if lambda >= cap {
        return Err(Error::InsufficientDegreeCap {
            cap,
            needed: lambda + 1,
        });
    }
    let work = working_cap(&ctx, cap, lambda);
    let mut t_lambda = vec![0u128; lambda + 1];
    t_lambda[lambda] = 1;
    let (q, r) = divide_by_series(
        &LambdaTrunc::new(ctx, t_lambda.clone(), work),
        &f1.with_cap(work),
        lambda,
    )?;
    let distinguished = LambdaPoly::new(ctx, t_lambda).sub(&r)?;
    let unit = q.inverse()?.with_cap(cap);
    Ok(WeierstrassData {
        mu,
        lambda,
        distinguished,
        unit,
    })
}

impl WeierstrassData {
    /// `p^μ · P · u` in the truncated ring.
    pub fn recombine(&self) -> LambdaTrunc {
        let ctx = *self.unit.ctx();
        let cap = self.unit.degree_cap();
        self.distinguished
            .to_trunc(cap)
            .mul(&self.unit)
            .expect("same context and cap")
            .scale(ctx.p_pow_res(self.mu))
    }
}

impl TowerParams {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidContext("tower offset k must be >= 1".into()));
        }
        Ok(TowerParams { p, k })
    }

    /// Exponent `p^{max(n,k) - k}` with `ω_n = (1+T)^{that} - 1`.
    pub fn omega_exponent(&self, n: u32) -> u64 {
        self.p.pow(n.max(self.k) - self.k)
    }

    /// `deg ω_n`.
    pub fn omega_degree(&self, n: u32) -> usize {
        self.omega_exponent(n) as usize
    }
}

/// `ω_n = (1+T)^{p^{n-k}} - 1`, flattened to `ω_k` for `n < k`.
pub fn omega(ctx: PadicContext, n: u32, params: &TowerParams) -> LambdaPoly {
    let one = LambdaPoly::one(ctx);
    let mut w = LambdaPoly::t(ctx);
    for _ in 0..n.max(params.k) - params.k {
        w = w
            .add(&one)
            .expect("same context")
            .pow(params.p as u32)
            .sub(&one)
            .expect("same context");
    }
    w
}

/// `ν_{m,n} = ω_m / ω_n`, an exact quotient.
pub fn nu(ctx: PadicContext, m: u32, n: u32, params: &TowerParams) -> Result<LambdaPoly> {
    if m <= n {
        return Err(Error::BadLevels(format!(
            "need m > n, got m = {m}, n = {n}"
        )));
    }
    let (q, r) = omega(ctx, m, params).div_rem_monic(&omega(ctx, n, params))?;
    debug_assert!(r.is_zero(), "omega_n divides omega_m");
    Ok(q)
}

/// The involution of `Λ` sending `1+T` to `κ(1+T)^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Involution {
    kappa: u128,
}

impl Involution {
    /// `κ` must be a unit congruent to 1 modulo `p`.
    pub fn new(ctx: &PadicContext, kappa: u128) -> Result<Self> {
        let kappa = ctx.reduce(kappa);
        if ctx.valuation(ctx.sub(kappa, 1)) == 0 {
            return Err(Error::InvalidContext(format!(
                "kappa = {kappa} is not 1 mod p"
            )));
        }
        Ok(Involution { kappa })
    }

    /// `κ = 1 + p^k`.
    pub fn standard(ctx: &PadicContext, params: &TowerParams) -> Self {
        Involution {
            kappa: ctx.add(1, ctx.p_pow_res(params.k.min(ctx.precision_exp()))),
        }
    }

    pub fn kappa(&self) -> u128 {
        self.kappa
    }

    /// The image `T* = κ(1+T)^{-1} - 1` truncated at `cap`.
    pub fn t_star(&self, ctx: &PadicContext, cap: usize) -> LambdaTrunc {
        let inv = LambdaTrunc::new(*ctx, vec![1, 1], cap)
            .inverse()
            .expect("1+T is a unit");
        inv.scale(self.kappa)
            .sub(&LambdaTrunc::one(*ctx, cap))
            .expect("same cap")
    }

    /// `T* (m) = κ(I+m)^{-1} - I` for a matrix with `I + m` invertible.
    pub fn t_star_matrix(&self, ctx: &PadicContext, m: &Mat) -> Option<Mat> {
        let n = m.rows();
        let inv = m.add(&Mat::identity(n), ctx).inverse(ctx)?;
        Some(inv.scale(self.kappa, ctx).sub(&Mat::identity(n), ctx))
    }

    /// Whether applying the involution twice is the identity on `Λ/(p^N, T^cap)`.
    ///
    /// `T*` has constant term `κ - 1`, so substituting it into a truncated
    /// series drops contributions from the discarded tail. That loss vanishes
    /// exactly when `(T*)^cap ≡ 0 mod (p^N, T^cap)`, which this checks.
    pub fn truncation_commutes(&self, ctx: &PadicContext, cap: usize) -> bool {
        if cap == 0 {
            return true;
        }
        let ts = self.t_star(ctx, cap);
        let mut pw = LambdaTrunc::one(*ctx, cap);
        for _ in 0..cap {
            pw = pw.mul(&ts).expect("same cap");
        }
        pw.is_zero()
    }
}

/// `f(T*)` modulo `(p^N, T^D)`.
pub fn iwasawa_involution(f: &LambdaTrunc, inv: &Involution) -> LambdaTrunc {
    let ctx = *f.ctx();
    let cap = f.degree_cap();
    let ts = inv.t_star(&ctx, cap);
    let mut acc = LambdaTrunc::zero(ctx, cap);
    for &c in f.coeffs().iter().rev() {
        acc = acc.mul(&ts).expect("same cap");
        if cap > 0 {
            acc.coeffs[0] = ctx.add(acc.coeffs[0], c);
        }
    }
    acc
}

/// `v_p` of the resultant of `f` and `g`, capped at `N`.
///
/// For coprime polynomials the ideal `(f, g)` contains `p^c` with `c` at most
/// this valuation, so it bounds how far the two primary parts can interact.
pub fn resultant_valuation(f: &LambdaPoly, g: &LambdaPoly) -> Result<u32> {
    check_ctx(f.ctx(), g.ctx())?;
    let ctx = *f.ctx();
    let a = f.degree().ok_or(Error::ZeroPolynomial)?;
    let b = g.degree().ok_or(Error::ZeroPolynomial)?;
    let n = a + b;
    if n == 0 {
        return Ok(0);
    }
    // Sylvester matrix: b shifted copies of f, a shifted copies of g
    let mut syl = Mat::zeros(n, n);
    for i in 0..b {
        for (j, &c) in f.coeffs().iter().enumerate() {
            syl[(i, i + j)] = c;
        }
    }
    for i in 0..a {
        for (j, &c) in g.coeffs().iter().enumerate() {
            syl[(b + i, i + j)] = c;
        }
    }
    let snf = syl.snf(&ctx);
    Ok(snf.vals.iter().sum::<u32>().min(ctx.precision_exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32) -> PadicContext {
        PadicContext::new(p, n).unwrap()
    }

    #[test]
    fn poly_products() {
        let c = ctx(3, 2);
        let f = LambdaPoly::from_i64s(c, &[1, 3]);
        assert_eq!(f.mul(&f).unwrap(), LambdaPoly::from_i64s(c, &[1, 6]));
        let t = LambdaPoly::t(c);
        let g = LambdaPoly::from_i64s(c, &[3, 1]);
        assert_eq!(t.mul(&g).unwrap(), LambdaPoly::from_i64s(c, &[0, 3, 1]));
        assert_eq!(g.mul(&LambdaPoly::one(c)).unwrap(), g);
        assert!(LambdaPoly::from_i64s(c, &[0, 0, 0]).is_zero());
    }

    #[test]
    fn distinguished_examples() {
        let c = ctx(3, 4);
        assert!(LambdaPoly::from_i64s(c, &[3, 3, 1])
            .is_distinguished()
            .unwrap());
        assert!(!LambdaPoly::from_i64s(c, &[1, 1])
            .is_distinguished()
            .unwrap());
        assert!(!LambdaPoly::from_i64s(c, &[0, 2])
            .is_distinguished()
            .unwrap());
        assert_eq!(
            LambdaPoly::zero(c).is_distinguished(),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn division_examples() {
        let c = ctx(3, 4);
        let f = LambdaTrunc::from_i64s(c, &[3, 4, 1], 8);
        let g = LambdaPoly::from_i64s(c, &[3, 1]);
        let (q, r) = weierstrass_divide(&f, &g).unwrap();
        assert_eq!(q.to_poly(), LambdaPoly::from_i64s(c, &[1, 1]));
        assert!(r.is_zero());

        let (q, r) = weierstrass_divide(&g.to_trunc(8), &g).unwrap();
        assert_eq!(q.to_poly(), LambdaPoly::one(c));
        assert!(r.is_zero());

        let one = LambdaTrunc::one(c, 12);
        let (q, r) = weierstrass_divide(&one, &g).unwrap();
        assert!(r.degree().is_none_or(|d| d < 1));
        let back = q
            .mul(&g.to_trunc(12))
            .unwrap()
            .add(&r.to_trunc(12))
            .unwrap();
        assert_eq!(back, one);
        // 1 mod (T + 3) evaluates 1 at T = -3
        assert_eq!(r, LambdaPoly::one(c));
    }

    #[test]
    fn division_rejects_bad_divisors() {
        let c = ctx(3, 4);
        let f = LambdaTrunc::one(c, 4);
        assert_eq!(
            weierstrass_divide(&f, &LambdaPoly::from_i64s(c, &[1, 1])),
            Err(Error::NotDistinguished)
        );
        let g = LambdaPoly::from_i64s(c, &[3, 0, 0, 0, 0, 1]);
        assert!(matches!(
            weierstrass_divide(&f, &g),
            Err(Error::InsufficientDegreeCap { .. })
        ));
    }

    #[test]
    fn preparation_examples() {
        let c = ctx(3, 6);
        let f = LambdaTrunc::from_i64s(c, &[3, 4, 1], 10);
        let w = weierstrass_prepare(&f).unwrap();
        assert_eq!(w.mu, 0);
        assert_eq!(w.distinguished, LambdaPoly::from_i64s(c, &[3, 1]));
        assert_eq!(w.unit, LambdaTrunc::from_i64s(c, &[1, 1], 10));
        assert_eq!(w.recombine(), f);

        let f = LambdaTrunc::from_i64s(c, &[9, 3], 10);
        let w = weierstrass_prepare(&f).unwrap();
        assert_eq!((w.mu, w.lambda), (1, 1));
        assert_eq!(w.distinguished, LambdaPoly::from_i64s(c, &[3, 1]));
        assert_eq!(w.unit, LambdaTrunc::one(c, 10));

        let w = weierstrass_prepare(&LambdaTrunc::from_i64s(c, &[5], 10)).unwrap();
        assert_eq!((w.mu, w.lambda), (0, 0));
        assert_eq!(w.distinguished, LambdaPoly::one(c));
        assert_eq!(w.unit, LambdaTrunc::from_i64s(c, &[5], 10));

        assert!(matches!(
            weierstrass_prepare(&LambdaTrunc::zero(c, 10)),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn omega_and_nu() {
        let c = ctx(3, 8);
        let tp = TowerParams::new(3, 1).unwrap();
        assert_eq!(omega(c, 1, &tp), LambdaPoly::t(c));
        assert_eq!(omega(c, 0, &tp), LambdaPoly::t(c));
        assert_eq!(omega(c, 2, &tp), LambdaPoly::from_i64s(c, &[0, 3, 3, 1]));
        assert_eq!(
            nu(c, 2, 1, &tp).unwrap(),
            LambdaPoly::from_i64s(c, &[3, 3, 1])
        );
        let n31 = nu(c, 3, 1, &tp).unwrap();
        let prod = nu(c, 3, 2, &tp)
            .unwrap()
            .mul(&nu(c, 2, 1, &tp).unwrap())
            .unwrap();
        assert_eq!(n31, prod);
        for n in 1..4 {
            let r = nu(c, n + 1, n, &tp)
                .unwrap()
                .rem_monic(&omega(c, n, &tp))
                .unwrap();
            assert_eq!(r, LambdaPoly::constant(c, 3));
        }
        assert!(matches!(nu(c, 1, 1, &tp), Err(Error::BadLevels(_))));
    }

    #[test]
    fn involution_of_t() {
        let c = ctx(3, 2);
        let tp = TowerParams::new(3, 1).unwrap();
        let inv = Involution::standard(&c, &tp);
        assert_eq!(inv.kappa(), 4);
        let t = LambdaTrunc::from_i64s(c, &[0, 1], 3);
        let img = iwasawa_involution(&t, &inv);
        assert_eq!(img, LambdaTrunc::from_i64s(c, &[3, 5, 4], 3));
        let k = LambdaTrunc::from_i64s(c, &[7], 3);
        assert_eq!(iwasawa_involution(&k, &inv), k);
    }

    #[test]
    fn involution_squares_to_identity_when_truncation_commutes() {
        let c = ctx(3, 3);
        let tp = TowerParams::new(3, 1).unwrap();
        let inv = Involution::standard(&c, &tp);
        assert!(!inv.truncation_commutes(&c, 4));
        let cap = (1..30)
            .find(|&d| d > 3 && inv.truncation_commutes(&c, d))
            .unwrap();
        let f = LambdaTrunc::from_i64s(c, &[2, 5, -1, 7], cap);
        assert_eq!(iwasawa_involution(&iwasawa_involution(&f, &inv), &inv), f);
    }

    #[test]
    fn resultant_of_linear_factors() {
        let c = ctx(3, 6);
        let f = LambdaPoly::from_i64s(c, &[-3, 1]);
        let g = LambdaPoly::from_i64s(c, &[3, 1]);
        // Res(T-3, T+3) = -6
        assert_eq!(resultant_valuation(&f, &g).unwrap(), 1);
    }

    #[test]
    fn display_uses_signed_coefficients() {
        let c = ctx(3, 3);
        assert_eq!(LambdaPoly::from_i64s(c, &[-3, 1]).to_string(), "T - 3");
        assert_eq!(
            LambdaPoly::from_i64s(c, &[3, 3, 1]).to_string(),
            "T^2 + 3T + 3"
        );
        assert_eq!(LambdaPoly::zero(c).to_string(), "0");
    }
}
