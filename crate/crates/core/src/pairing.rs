//! A finite-level model of the Kummer pairing between a level `M_n` and its
//! character group, on which `Λ` acts through the involution `T ↦ T*`.
//!
//! Roots of unity are modelled additively: the pairing takes values in
//! `Z/p^e` with `p^e` the exponent of `M_n`. In group coordinates
//! `M_n = ⊕ Z/p^{a_i}` and a character is a vector `c` with `c_i` read
//! modulo `p^{a_i}`, paired as `⟨y, c⟩ = Σ p^{e-a_i} y_i c_i`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::lambda::{iwasawa_involution, Involution, LambdaPoly, LambdaTrunc};
use crate::matrix::Mat;
use crate::module::{lift_map, norm_map, ElementaryModule, FiniteLevel};
use crate::padic::PadicContext;

/// The character group of a level with the twisted `Λ`-action.
#[derive(Clone, Debug)]
pub struct TwistedDual {
    base: Arc<FiniteLevel>,
    involution: Involution,
    t_dual: Mat,
}

/// Values of the pairing on the group-coordinate bases of `M_n` and its dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingTable {
    ctx: PadicContext,
    exponent: u32,
    matrix: Mat,
}

/// Moves an endomorphism `a` of `⊕ Z/p^{a_i}` to the dual coordinates, so
/// that `⟨a y, c⟩ = ⟨y, a^∨ c⟩`.
fn dual_transpose(g: &AbelianGroup, a: &Mat) -> Mat {
    let ctx = g.ctx();
    let ex = g.exps();
    let r = g.rank();
    Mat::from_fn(r, r, |j, i| {
        let v = a[(i, j)] % ctx.p_pow(ex[i]);
        let v = if ex[j] >= ex[i] {
            ctx.mul(v, ctx.p_pow_res(ex[j] - ex[i]))
        } else {
            // well-definedness of `a` makes this division exact
            v / ctx.p_pow(ex[i] - ex[j])
        };
        v % ctx.p_pow(ex[j])
    })
}

fn reduce_rows(g: &AbelianGroup, m: &Mat) -> Mat {
    let ctx = g.ctx();
    Mat::from_fn(m.rows(), m.cols(), |i, j| {
        m[(i, j)] % ctx.p_pow(g.exps()[i])
    })
}

impl TwistedDual {
    pub fn base(&self) -> &Arc<FiniteLevel> {
        &self.base
    }

    pub fn involution(&self) -> &Involution {
        &self.involution
    }

    /// Same invariants as the base.
    pub fn group(&self) -> &AbelianGroup {
        self.base.group()
    }

    /// `T` acting on characters.
    pub fn t_dual(&self) -> &Mat {
        &self.t_dual
    }

    fn length_cap(&self) -> usize {
        (self.base.size_exp() as usize).max(1)
    }

    /// `λ` acting on the base in group coordinates.
    pub fn base_action(&self, lambda: &LambdaTrunc) -> Mat {
        reduce_rows(self.group(), &lambda.eval_matrix(self.base.t_group()))
    }

    /// `λ*` acting on characters, where `λ*` substitutes `T*` for `T`.
    ///
    /// The twisted `T` lies in the maximal ideal, so on a group of length `L`
    /// its `L`-th power vanishes and truncating `λ*` at `T^L` is exact.
    pub fn dual_action(&self, lambda: &LambdaTrunc) -> Mat {
        let cap = self.length_cap().max(lambda.degree_cap());
        let star = iwasawa_involution(&lambda.with_cap(cap), &self.involution);
        reduce_rows(self.group(), &star.eval_matrix(&self.t_dual))
    }
}

impl PairingTable {
    /// Values live in `Z/p^exponent`.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn modulus(&self) -> u128 {
        self.ctx.p_pow(self.exponent)
    }

    /// `⟨y, c⟩` for `y` in the base and `c` in the dual, both in group coordinates.
    pub fn pair(&self, y: &[u128], c: &[u128]) -> u128 {
        let ctx = &self.ctx;
        let mc = self.matrix.mul_vec(c, ctx);
        let s = y
            .iter()
            .zip(&mc)
            .fold(0, |acc, (&a, &b)| ctx.add(acc, ctx.mul(a, b)));
        s % self.modulus()
    }

    /// Invariant factor exponents of the map `y ↦ ⟨y, ·⟩`, read as orders.
    pub fn induced_invariants(&self) -> Vec<u32> {
        let snf = self.matrix.snf(&self.ctx);
        let mut out: Vec<u32> = (0..self.matrix.rows())
            .map(|i| {
                self.exponent
                    .saturating_sub(snf.vals.get(i).copied().unwrap_or(self.exponent))
            })
            .filter(|&a| a > 0)
            .collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

/// Builds the twisted dual of a level and the evaluation pairing.
pub fn build_pairing(
    level: &Arc<FiniteLevel>,
    involution: Involution,
) -> Result<(TwistedDual, PairingTable)> {
    level.require_resolved()?;
    let ctx = *level.ctx();
    let g = level.group();
    let star = involution
        .t_star_matrix(&ctx, level.t_action())
        .ok_or_else(|| Error::InvalidContext("1 + T is not invertible on this level".into()))?;
    let star_g = level.hom_to_group(&star, level);
    let t_dual = dual_transpose(g, &star_g);
    let exponent = level.exponent();
    let matrix = Mat::from_fn(g.rank(), g.rank(), |i, j| {
        if i == j {
            ctx.p_pow_res(exponent - g.exps()[i])
        } else {
            0
        }
    });
    Ok((
        TwistedDual {
            base: level.clone(),
            involution,
            t_dual,
        },
        PairingTable {
            ctx,
            exponent,
            matrix,
        },
    ))
}

/// Elements `y` with `⟨y, c⟩ = 0` for every `c`; empty iff non-degenerate on
/// the left. Exhaustive, so only for small groups.
pub fn left_radical(dual: &TwistedDual, table: &PairingTable) -> Vec<Vec<u128>> {
    let g = dual.group();
    let basis: Vec<Vec<u128>> = g.full().columns();
    g.elements()
        .into_iter()
        .filter(|y| !g.is_zero(y) && basis.iter().all(|c| table.pair(y, c) == 0))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionReport {
    pub checked: usize,
    pub violations: usize,
    /// `(a, r)` in group coordinates with `⟨λa, r⟩ ≠ ⟨a, λ*r⟩`.
    pub witness: Option<(Vec<u128>, Vec<u128>)>,
}

impl ReflectionReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `⟨λa, r⟩ = ⟨a, λ*r⟩` on all basis pairs and on random pairs.
pub fn check_reflection<R: Rng>(
    dual: &TwistedDual,
    table: &PairingTable,
    lambda: &LambdaTrunc,
    samples: usize,
    rng: &mut R,
) -> ReflectionReport {
    let g = dual.group();
    let ctx = g.ctx();
    let la = dual.base_action(lambda);
    let ls = dual.dual_action(lambda);
    let mut pairs: Vec<(Vec<u128>, Vec<u128>)> = Vec::new();
    let basis = g.full().columns();
    for a in &basis {
        for r in &basis {
            pairs.push((a.clone(), r.clone()));
        }
    }
    for _ in 0..samples {
        pairs.push((g.random_element(rng), g.random_element(rng)));
    }
    let mut report = ReflectionReport {
        checked: pairs.len(),
        violations: 0,
        witness: None,
    };
    for (a, r) in pairs {
        let lhs = table.pair(&la.mul_vec(&a, ctx), &r);
        let rhs = table.pair(&a, &ls.mul_vec(&r, ctx));
        if lhs != rhs {
            report.violations += 1;
            report.witness.get_or_insert((a, r));
        }
    }
    report
}

/// Dual base: characters `β_i` with `⟨a_j, β_i⟩ = δ_ij·q/ord(a_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBaseCertificate {
    pub base: Vec<Vec<u128>>,
    pub dual: Vec<Vec<u128>>,
    /// `log_p q`.
    pub q_exp: u32,
    /// `values[i][j] = ⟨a_j, β_i⟩`.
    pub values: Vec<Vec<u128>>,
}

impl DualBaseCertificate {
    /// Whether `values` has the expected diagonal shape for the given orders.
    pub fn is_valid(&self, ctx: &PadicContext, orders: &[u32]) -> bool {
        self.values.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, &v)| {
                let want = if i == j {
                    ctx.p_pow(self.q_exp - orders[i])
                } else {
                    0
                };
                v == want % ctx.p_pow(self.q_exp)
            })
        })
    }
}

/// Solves for the dual base of an independent family (group coordinates).
pub fn dual_base(
    dual: &TwistedDual,
    table: &PairingTable,
    base: &[Vec<u128>],
) -> Result<DualBaseCertificate> {
    let g = dual.group();
    let ctx = *g.ctx();
    let n = ctx.precision_exp();
    let r = g.rank();
    if base.iter().any(|a| a.len() != r) {
        return Err(Error::DimensionMismatch(format!(
            "base elements must have length {r}"
        )));
    }
    let orders: Vec<u32> = base.iter().map(|a| g.order_exp(a)).collect();
    let gens = Mat::from_columns(r, base);
    if orders.contains(&0) || g.subgroup_size_exp(&gens) != orders.iter().sum::<u32>() {
        return Err(Error::NotAPBase);
    }
    let e = table.exponent();
    // ⟨a_j, c⟩ ≡ t mod p^e, scaled by p^{N-e} to a congruence mod p^N
    let a = Mat::from_fn(base.len(), r, |j, k| {
        ctx.mul(base[j][k], ctx.p_pow_res(n - g.exps()[k]))
    });
    let mut duals = Vec::new();
    for (i, &oi) in orders.iter().enumerate() {
        let rhs: Vec<u128> = (0..base.len())
            .map(|j| if i == j { ctx.p_pow_res(n - oi) } else { 0 })
            .collect();
        let c = a.solve(&rhs, &ctx).ok_or(Error::NotAPBase)?;
        duals.push(g.normalize(&c));
    }
    let values = duals
        .iter()
        .map(|b| base.iter().map(|a| table.pair(a, b)).collect())
        .collect();
    Ok(DualBaseCertificate {
        base: base.to_vec(),
        dual: duals,
        q_exp: e,
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatReport {
    pub n: u32,
    pub m: u32,
    pub checked: usize,
    pub violations: usize,
    /// `(x, r)` in group coordinates of level `m` with
    /// `⟨ι N x, r⟩ ≠ p^{m-n}⟨x, r⟩`.
    pub witness: Option<(Vec<u128>, Vec<u128>)>,
}

impl CompatReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `⟨ι_{n,m}(N_{m,n} x), r⟩ = p^{m-n}⟨x, r⟩` on level `m`.
///
/// `r` runs over the dual basis, which covers every character by
/// linearity. `x` runs over the whole level when it has at most
/// `exhaustive_limit` elements and over `samples` random elements otherwise.
pub fn check_projective_compat<R: Rng>(
    m: &ElementaryModule,
    n: u32,
    dual: &TwistedDual,
    table: &PairingTable,
    exhaustive_limit: u128,
    samples: usize,
    rng: &mut R,
) -> Result<CompatReport> {
    let upper = dual.base();
    let top = upper.level();
    if top <= n {
        return Err(Error::BadLevels(format!(
            "need m > n, got m = {top}, n = {n}"
        )));
    }
    let ctx = *m.ctx();
    let g = upper.group();
    let comp = lift_map(m, n, top)?
        .matrix
        .mul(&norm_map(m, top, n)?.matrix, &ctx);
    let h = upper.hom_to_group(&comp, upper);
    let scale = ctx.p_pow_res((top - n).min(ctx.precision_exp()));
    let xs: Vec<Vec<u128>> = if u128::from(ctx.p())
        .checked_pow(g.size_exp())
        .is_some_and(|s| s <= exhaustive_limit)
    {
        g.elements()
    } else {
        (0..samples).map(|_| g.random_element(rng)).collect()
    };
    let basis = g.full().columns();
    let mut report = CompatReport {
        n,
        m: top,
        checked: 0,
        violations: 0,
        witness: None,
    };
    for x in &xs {
        let y = h.mul_vec(x, &ctx);
        for r in &basis {
            report.checked += 1;
            let lhs = table.pair(&y, r);
            let rhs = ctx.mul(scale, table.pair(x, r)) % table.modulus();
            if lhs != rhs {
                report.violations += 1;
                report.witness.get_or_insert((x.clone(), r.clone()));
            }
        }
    }
    Ok(report)
}

/// Which pairs `(A_j, R_l)` pair to zero, for `1 ≤ j, l ≤ max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingTable {
    pub max: u32,
    /// `vanishes[j-1][l-1]`.
    pub vanishes: Vec<Vec<bool>>,
}

impl VanishingTable {
    pub fn get(&self, j: u32, l: u32) -> bool {
        self.vanishes[(j - 1) as usize][(l - 1) as usize]
    }

    fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (1..=self.max).flat_map(move |j| (1..=self.max).map(move |l| (j, l)))
    }

    /// Largest `s` with every pair of sum at most `s` vanishing.
    pub fn vanishing_up_to(&self) -> u32 {
        (1..=2 * self.max)
            .take_while(|&s| {
                self.pairs()
                    .filter(|&(j, l)| j + l <= s)
                    .all(|(j, l)| self.get(j, l))
            })
            .last()
            .unwrap_or(1)
    }

    /// Smallest `s` with every pair of sum at least `s` vanishing, if any.
    pub fn vanishing_from(&self) -> Option<u32> {
        (2..=2 * self.max).find(|&s| {
            self.pairs()
                .filter(|&(j, l)| j + l >= s)
                .all(|(j, l)| self.get(j, l))
        })
    }

    /// The claimed pattern: zero above `k + 1`, nonzero somewhere at `k + 1`.
    pub fn matches_claim(&self, k: u32) -> bool {
        let above = self
            .pairs()
            .filter(|&(j, l)| j + l > k + 1)
            .all(|(j, l)| self.get(j, l));
        let at = self
            .pairs()
            .filter(|&(j, l)| j + l == k + 1)
            .any(|(j, l)| !self.get(j, l));
        above && at
    }
}

/// A pair `(y, c)` of group coordinates with `⟨y, c⟩ ≠ 0`.
pub type WitnessPair = (Vec<u128>, Vec<u128>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReversalReport {
    pub power: u32,
    /// True when `power < 2`: nothing to check.
    pub vacuous: bool,
    /// `A_j = ker f^j`, `R_l = ker f*^l`.
    pub kernel_reading: VanishingTable,
    /// `A_j = f^{k-j} A`, `R_l = f*^{k-l} R` (clamped at zero exponents).
    pub image_reading: VanishingTable,
    /// A nonzero pairing `(a, r)` with `a ∈ A_j`, `r ∈ R_l`, `j + l = k + 1`
    /// in the kernel reading.
    pub boundary_witness: Option<WitnessPair>,
    /// `(i, |A|/|f^i A|, |f*^{k-i} R|)` for `0 ≤ i ≤ k`.
    pub order_checks: Vec<(u32, u32, u32)>,
}

impl ReversalReport {
    /// Whether the kernel reading vanishes exactly above `k + 1`.
    pub fn claim_holds(&self) -> bool {
        self.vacuous || self.kernel_reading.matches_claim(self.power)
    }

    pub fn orders_match(&self) -> bool {
        self.order_checks.iter().all(|&(_, a, b)| a == b)
    }
}

/// Scans the pairing between the `f`-filtration of `M_n = (Λ/(f^k))_n` and
/// the `f*`-filtration of its dual. Exhaustive on the base side.
pub fn check_order_reversal(
    dual: &TwistedDual,
    table: &PairingTable,
    f: &LambdaPoly,
    k: u32,
) -> Result<ReversalReport> {
    let level = dual.base();
    level.require_resolved()?;
    let g = dual.group();
    let ctx = *g.ctx();
    let fa = reduce_rows(g, &f.eval_matrix(level.t_group()));
    let fs = dual.dual_action(&f.to_trunc(f.degree().unwrap_or(0) + 1));
    let max = k + 1;
    let powers = |m: &Mat| -> Vec<Mat> {
        let mut out = vec![Mat::identity(g.rank())];
        for _ in 0..=max {
            let next = reduce_rows(g, &m.mul(out.last().expect("nonempty"), &ctx));
            out.push(next);
        }
        out
    };
    let fa_pow = powers(&fa);
    let fs_pow = powers(&fs);
    let all = g.elements();

    let scan = |a_side: &dyn Fn(u32) -> Mat,
                r_side: &dyn Fn(u32) -> Mat|
     -> (VanishingTable, Option<WitnessPair>) {
        let mut vanishes = vec![vec![true; max as usize]; max as usize];
        let mut witness = None;
        for j in 1..=max {
            let a_gens = a_side(j);
            let a_elems: Vec<&Vec<u128>> = all.iter().filter(|y| g.contains(&a_gens, y)).collect();
            for l in 1..=max {
                let r_gens = r_side(l).columns();
                let hit = a_elems.iter().find_map(|a| {
                    r_gens
                        .iter()
                        .find(|r| table.pair(a, r) != 0)
                        .map(|r| ((*a).clone(), r.clone()))
                });
                if let Some(w) = hit {
                    vanishes[(j - 1) as usize][(l - 1) as usize] = false;
                    if j + l == k + 1 && witness.is_none() {
                        witness = Some(w);
                    }
                }
            }
        }
        (VanishingTable { max, vanishes }, witness)
    };

    let kernel_a = |j: u32| g.kernel_of(&fa_pow[j as usize], g);
    let kernel_r = |l: u32| g.kernel_of(&fs_pow[l as usize], g);
    let image_a = |j: u32| fa_pow[k.saturating_sub(j) as usize].clone();
    let image_r = |l: u32| fs_pow[k.saturating_sub(l) as usize].clone();
    let (kernel_reading, boundary_witness) = scan(&kernel_a, &kernel_r);
    let (image_reading, _) = scan(&image_a, &image_r);

    let total = g.size_exp();
    let order_checks = (0..=k)
        .map(|i| {
            let quotient = total - g.subgroup_size_exp(&fa_pow[i as usize]);
            let dual_part = g.subgroup_size_exp(&fs_pow[(k - i) as usize]);
            (i, quotient, dual_part)
        })
        .collect();

    Ok(ReversalReport {
        power: k,
        vacuous: k < 2,
        kernel_reading,
        image_reading,
        boundary_witness,
        order_checks,
    })
}
