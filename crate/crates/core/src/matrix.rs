//! Dense matrices over `Z/p^N` and Smith normal form.
//!
//! `Z/p^N` is a local principal ideal ring, so every matrix is equivalent to a
//! diagonal one with entries `p^{v_1} | p^{v_2} | ...`. The elimination below
//! always pivots on an entry of minimal valuation, which makes every other
//! entry of the active block divisible by the pivot and keeps the transforms
//! unimodular.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::padic::PadicContext;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<u128>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = u128;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &u128 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of [`Mat::snf`]: `u * a * v = diag(p^{vals[i]})`, with `vals[i] = N`
/// standing for a zero pivot.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
    pub vals: Vec<u32>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn scalar(n: usize, c: u128) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u128) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Mat::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_columns(rows: usize, cols: &[Vec<u128>]) -> Self {
        Mat::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u128> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u128>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)])
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn mul(&self, other: &Mat, ctx: &PadicContext) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    if b != 0 {
                        out[(i, j)] = ctx.add(out[(i, j)], ctx.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[u128], ctx: &PadicContext) -> Vec<u128> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| ctx.add(acc, ctx.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, other: &Mat, ctx: &PadicContext) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            ctx.add(self[(i, j)], other[(i, j)])
        })
    }

    pub fn sub(&self, other: &Mat, ctx: &PadicContext) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            ctx.sub(self[(i, j)], other[(i, j)])
        })
    }

    pub fn scale(&self, c: u128, ctx: &PadicContext) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| ctx.mul(self[(i, j)], c))
    }

    pub fn pow(&self, mut e: u64, ctx: &PadicContext) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.rows);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b, ctx);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b, ctx);
            }
        }
        acc
    }

    /// Evaluates the polynomial with ascending coefficients `coeffs` at `self`.
    pub fn eval_poly(&self, coeffs: &[u128], ctx: &PadicContext) -> Mat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut acc = Mat::zeros(n, n);
        for &c in coeffs.iter().rev() {
            acc = acc.mul(self, ctx);
            for i in 0..n {
                acc[(i, i)] = ctx.add(acc[(i, i)], c);
            }
        }
        acc
    }

    /// Smith normal form with unimodular transforms.
    pub fn snf(&self, ctx: &PadicContext) -> Snf {
        let (r, c) = (self.rows, self.cols);
        let nprec = ctx.precision_exp();
        let mut a = self.clone();
        let mut u = Mat::identity(r);
        let mut u_inv = Mat::identity(r);
        let mut v = Mat::identity(c);
        let mut vals = Vec::with_capacity(r.min(c));

        for k in 0..r.min(c) {
            let mut best: Option<(u32, usize, usize)> = None;
            'search: for i in k..r {
                for j in k..c {
                    let x = a[(i, j)];
                    if x != 0 {
                        let val = ctx.valuation(x);
                        if best.is_none_or(|(b, _, _)| val < b) {
                            best = Some((val, i, j));
                            if val == 0 {
                                break 'search;
                            }
                        }
                    }
                }
            }
            let Some((val, pi, pj)) = best else {
                vals.extend(std::iter::repeat_n(nprec, r.min(c) - k));
                break;
            };
            if pi != k {
                a.swap_rows(k, pi);
                u.swap_rows(k, pi);
                u_inv.swap_cols(k, pi);
            }
            if pj != k {
                a.swap_cols(k, pj);
                v.swap_cols(k, pj);
            }
            let (_, unit) = ctx.split_unit(a[(k, k)]);
            if unit != 1 {
                let unit_inv = ctx.inv_unit(unit).expect("unit part is invertible");
                a.scale_row(k, unit_inv, ctx);
                u.scale_row(k, unit_inv, ctx);
                u_inv.scale_col(k, unit, ctx);
            }
            for i in k + 1..r {
                let x = a[(i, k)];
                if x != 0 {
                    let f = ctx.div_p_pow(x, val);
                    a.row_axpy(i, k, ctx.neg(f), ctx);
                    u.row_axpy(i, k, ctx.neg(f), ctx);
                    u_inv.col_axpy(k, i, f, ctx);
                }
            }
            for j in k + 1..c {
                let x = a[(k, j)];
                if x != 0 {
                    let f = ctx.div_p_pow(x, val);
                    a.col_axpy(j, k, ctx.neg(f), ctx);
                    v.col_axpy(j, k, ctx.neg(f), ctx);
                }
            }
            vals.push(val);
        }
        Snf { u, u_inv, v, vals }
    }

    /// Generators of `{x : self * x = 0 mod p^N}`.
    pub fn kernel(&self, ctx: &PadicContext) -> Mat {
        let snf = self.snf(ctx);
        let nprec = ctx.precision_exp();
        let mut gens = Vec::new();
        for i in 0..self.cols {
            let scale = match snf.vals.get(i) {
                Some(&0) => continue,
                Some(&val) => ctx.p_pow_res(nprec - val),
                None => 1,
            };
            let col: Vec<u128> = snf.v.column(i).iter().map(|&x| ctx.mul(x, scale)).collect();
            gens.push(col);
        }
        Mat::from_columns(self.cols, &gens)
    }

    /// Generators of the `Z_p`-kernel: the directions killed exactly, not only
    /// modulo `p^N`. Pivots that vanish at precision count as exact zeros.
    pub fn saturated_kernel(&self, ctx: &PadicContext) -> Mat {
        let snf = self.snf(ctx);
        let nprec = ctx.precision_exp();
        let gens: Vec<Vec<u128>> = (0..self.cols)
            .filter(|&i| snf.vals.get(i).is_none_or(|&v| v == nprec))
            .map(|i| snf.v.column(i))
            .collect();
        Mat::from_columns(self.cols, &gens)
    }

    /// Some solution of `self * x = b mod p^N`, if one exists.
    pub fn solve(&self, b: &[u128], ctx: &PadicContext) -> Option<Vec<u128>> {
        assert_eq!(b.len(), self.rows);
        let snf = self.snf(ctx);
        let nprec = ctx.precision_exp();
        let ub = snf.u.mul_vec(b, ctx);
        let mut y = vec![0u128; self.cols];
        for (i, &x) in ub.iter().enumerate() {
            match snf.vals.get(i) {
                Some(&val) if val < nprec => {
                    if ctx.valuation(x) < val {
                        return None;
                    }
                    y[i] = ctx.div_p_pow(x, val);
                }
                _ => {
                    if x != 0 {
                        return None;
                    }
                }
            }
        }
        Some(snf.v.mul_vec(&y, ctx))
    }

    /// Inverse over `Z/p^N`, if the determinant is a unit.
    pub fn inverse(&self, ctx: &PadicContext) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for k in 0..n {
            let pivot = (k..n).find(|&i| ctx.valuation(a[(i, k)]) == 0 && a[(i, k)] != 0)?;
            a.swap_rows(k, pivot);
            inv.swap_rows(k, pivot);
            let s = ctx.inv_unit(a[(k, k)]).ok()?;
            a.scale_row(k, s, ctx);
            inv.scale_row(k, s, ctx);
            for i in 0..n {
                if i != k && a[(i, k)] != 0 {
                    let f = ctx.neg(a[(i, k)]);
                    a.row_axpy(i, k, f, ctx);
                    inv.row_axpy(i, k, f, ctx);
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, s: u128, ctx: &PadicContext) {
        for c in 0..self.cols {
            self[(i, c)] = ctx.mul(self[(i, c)], s);
        }
    }

    fn scale_col(&mut self, j: usize, s: u128, ctx: &PadicContext) {
        for r in 0..self.rows {
            self[(r, j)] = ctx.mul(self[(r, j)], s);
        }
    }

    /// row[dst] += f * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, f: u128, ctx: &PadicContext) {
        for c in 0..self.cols {
            let s = self[(src, c)];
            if s != 0 {
                self[(dst, c)] = ctx.add(self[(dst, c)], ctx.mul(f, s));
            }
        }
    }

    /// col[dst] += f * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, f: u128, ctx: &PadicContext) {
        for r in 0..self.rows {
            let s = self[(r, src)];
            if s != 0 {
                self[(r, dst)] = ctx.add(self[(r, dst)], ctx.mul(f, s));
            }
        }
    }
}
