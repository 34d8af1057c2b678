use std::sync::Arc;

use rand::Rng;

use super::{block_diag, companion, Block, ElementaryModule};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::lambda::{nu, omega, LambdaPoly, TowerParams};
use crate::matrix::Mat;
use crate::padic::PadicContext;

/// A finite level `M_n` as the cokernel of a relation matrix on the generator
/// basis, with its Smith normal form recorded.
///
/// Elements are passed around in *generator coordinates* (a lift to
/// `Z^dim`). The group structure lives in *group coordinates*: `y = U·x`
/// restricted to the rows whose invariant factor is nontrivial, row `i` read
/// modulo `p^{a_i}`.
#[derive(Clone, Debug)]
pub struct FiniteLevel {
    level: u32,
    ctx: PadicContext,
    blocks: Vec<Block>,
    relations: Mat,
    t_action: Mat,
    u_rows: Mat,
    u_inv_cols: Mat,
    group: AbelianGroup,
    t_group: Mat,
    unresolved: bool,
}

impl FiniteLevel {
    /// Level presented by a block-diagonal relation matrix; each block is
    /// reduced to Smith form on its own.
    fn from_blocks(
        ctx: PadicContext,
        level: u32,
        blocks: Vec<Block>,
        rel_blocks: Vec<Mat>,
        t_blocks: Vec<Mat>,
    ) -> Self {
        let mut us = Vec::new();
        let mut uinvs = Vec::new();
        let mut exps = Vec::new();
        for r in &rel_blocks {
            let snf = r.snf(&ctx);
            us.push(snf.u);
            uinvs.push(snf.u_inv);
            exps.extend(snf.vals);
        }
        FiniteLevel::assemble(
            ctx,
            level,
            blocks,
            block_diag(&rel_blocks),
            block_diag(&t_blocks),
            block_diag(&us),
            block_diag(&uinvs),
            exps,
        )
    }

    /// Level given directly by a square relation matrix and a `T`-action that
    /// preserves the relations. Mostly useful for small hand-built groups.
    pub fn from_relations(ctx: PadicContext, level: u32, relations: Mat, t_action: Mat) -> Self {
        assert_eq!(
            relations.rows(),
            relations.cols(),
            "relations must be square"
        );
        assert_eq!(t_action.rows(), relations.rows());
        let snf = relations.snf(&ctx);
        FiniteLevel::assemble(
            ctx,
            level,
            Vec::new(),
            relations,
            t_action,
            snf.u,
            snf.u_inv,
            snf.vals,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        ctx: PadicContext,
        level: u32,
        blocks: Vec<Block>,
        relations: Mat,
        t_action: Mat,
        u: Mat,
        u_inv: Mat,
        row_exps: Vec<u32>,
    ) -> Self {
        let nontrivial: Vec<usize> = (0..row_exps.len()).filter(|&i| row_exps[i] > 0).collect();
        let exps: Vec<u32> = nontrivial.iter().map(|&i| row_exps[i]).collect();
        let unresolved = exps.iter().any(|&a| a >= ctx.precision_exp());
        let group = AbelianGroup::new(ctx, exps);
        let u_rows = u.select_rows(&nontrivial);
        let u_inv_cols = u_inv.select_cols(&nontrivial);
        let t_group = reduce_rows(&group, &u_rows.mul(&t_action, &ctx).mul(&u_inv_cols, &ctx));
        FiniteLevel {
            level,
            ctx,
            blocks,
            relations,
            t_action,
            u_rows,
            u_inv_cols,
            group,
            t_group,
            unresolved,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Number of generators.
    pub fn dim(&self) -> usize {
        self.relations.rows()
    }

    pub fn relation_matrix(&self) -> &Mat {
        &self.relations
    }

    /// `T` on generator coordinates.
    pub fn t_action(&self) -> &Mat {
        &self.t_action
    }

    /// The underlying abelian group in group coordinates.
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// `T` on group coordinates.
    pub fn t_group(&self) -> &Mat {
        &self.t_group
    }

    /// Set when some invariant factor reached `p^N`, so the true order is
    /// not resolved at the working precision.
    pub fn unresolved(&self) -> bool {
        self.unresolved
    }

    pub fn require_resolved(&self) -> Result<()> {
        if self.unresolved {
            Err(Error::PrecisionExhausted(format!(
                "level {} has an invariant factor p^{}",
                self.level,
                self.ctx.precision_exp()
            )))
        } else {
            Ok(())
        }
    }

    /// Exponents `a_i` of the invariant factors `p^{a_i}`, descending.
    pub fn invariant_factors(&self) -> Vec<u32> {
        let mut v = self.group.exps().to_vec();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// `e_n = log_p |M_n|`.
    pub fn size_exp(&self) -> u32 {
        self.group.size_exp()
    }

    pub fn p_rank(&self) -> usize {
        self.group.rank()
    }

    /// `log_p` of the exponent of the group.
    pub fn exponent(&self) -> u32 {
        self.group.exps().iter().copied().max().unwrap_or(0)
    }

    /// `log_p` of the subexponent (smallest order of an element outside `pM`).
    pub fn subexponent(&self) -> u32 {
        self.group.exps().iter().copied().min().unwrap_or(0)
    }

    pub fn to_group(&self, x: &[u128]) -> Vec<u128> {
        self.group.normalize(&self.u_rows.mul_vec(x, &self.ctx))
    }

    pub fn from_group(&self, y: &[u128]) -> Vec<u128> {
        self.u_inv_cols.mul_vec(y, &self.ctx)
    }

    /// Columns in generator coordinates to columns in group coordinates.
    pub fn to_group_cols(&self, gens: &Mat) -> Mat {
        reduce_rows(&self.group, &self.u_rows.mul(gens, &self.ctx))
    }

    pub fn from_group_cols(&self, gens: &Mat) -> Mat {
        self.u_inv_cols.mul(gens, &self.ctx)
    }

    /// A map `from -> self` given in generator coordinates, rewritten as a
    /// homomorphism between the groups in group coordinates.
    pub fn hom_to_group(&self, f: &Mat, from: &FiniteLevel) -> Mat {
        assert_eq!((f.rows(), f.cols()), (self.dim(), from.dim()));
        reduce_rows(
            &self.group,
            &self
                .u_rows
                .mul(f, &self.ctx)
                .mul(&from.u_inv_cols, &self.ctx),
        )
    }

    pub fn is_zero(&self, x: &[u128]) -> bool {
        self.group.is_zero(&self.u_rows.mul_vec(x, &self.ctx))
    }

    pub fn elements_equal(&self, x: &[u128], y: &[u128]) -> bool {
        let d: Vec<u128> = x.iter().zip(y).map(|(&a, &b)| self.ctx.sub(a, b)).collect();
        self.is_zero(&d)
    }

    /// `log_p` of the order of `x`.
    pub fn order_exp(&self, x: &[u128]) -> u32 {
        self.group.order_exp(&self.to_group(x))
    }

    pub fn apply(&self, f: &Mat, x: &[u128]) -> Vec<u128> {
        f.mul_vec(x, &self.ctx)
    }

    /// Applies a blockwise computation to the `T`-action; falls back to the
    /// whole matrix for levels built from raw relations.
    fn on_t_blocks(&self, f: impl Fn(&Mat) -> Mat) -> Mat {
        if self.blocks.is_empty() {
            return f(&self.t_action);
        }
        let parts: Vec<Mat> = self
            .blocks
            .iter()
            .map(|b| {
                let r: Vec<usize> = b.range().collect();
                f(&self.t_action.select_rows(&r).select_cols(&r))
            })
            .collect();
        block_diag(&parts)
    }

    /// `f(T)` on generator coordinates.
    pub fn poly_action(&self, f: &LambdaPoly) -> Mat {
        self.on_t_blocks(|t| f.eval_matrix(t))
    }

    /// `ω_j(T)` on generator coordinates, by repeated `p`-th powers.
    pub fn omega_action(&self, j: u32, params: &TowerParams) -> Mat {
        let ctx = self.ctx;
        let steps = j.max(params.k) - params.k;
        self.on_t_blocks(|t| {
            let id = Mat::identity(t.rows());
            let mut x = t.add(&id, &ctx);
            for _ in 0..steps {
                x = x.pow(params.p, &ctx);
            }
            x.sub(&id, &ctx)
        })
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Vec<u128> {
        self.from_group(&self.group.random_element(rng))
    }

    /// Every element in generator coordinates. Only for tiny groups.
    pub fn elements(&self) -> Vec<Vec<u128>> {
        self.group
            .elements()
            .iter()
            .map(|y| self.from_group(y))
            .collect()
    }
}

fn reduce_rows(g: &AbelianGroup, m: &Mat) -> Mat {
    let ctx = g.ctx();
    Mat::from_fn(m.rows(), m.cols(), |i, j| {
        m[(i, j)] % ctx.p_pow(g.exps()[i])
    })
}

/// `M_n` for an elementary module.
pub fn finite_level(m: &ElementaryModule, n: u32) -> FiniteLevel {
    let ctx = *m.ctx();
    let params = m.params();
    let steps = n.max(params.k) - params.k;
    let mut rels = Vec::new();
    let mut ts = Vec::new();
    for g in m.summand_polys() {
        let c = companion(g);
        let id = Mat::identity(c.rows());
        let mut x = c.add(&id, &ctx);
        for _ in 0..steps {
            x = x.pow(params.p, &ctx);
        }
        rels.push(x.sub(&id, &ctx));
        ts.push(c);
    }
    if !m.mu_summands().is_empty() {
        let w = omega(ctx, n, params);
        let cw = companion(&w);
        for &mu in m.mu_summands() {
            rels.push(Mat::scalar(cw.rows(), ctx.p_pow_res(mu)));
            ts.push(cw.clone());
        }
    }
    FiniteLevel::from_blocks(ctx, n, m.blocks(n), rels, ts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    Norm,
    Lift,
}

/// A norm or lift between two levels, in generator coordinates.
#[derive(Clone, Debug)]
pub struct LevelMap {
    pub kind: MapKind,
    pub from_level: u32,
    pub to_level: u32,
    pub matrix: Mat,
}

/// Coefficients of `T^j mod w` for `j < count`, as columns.
fn powers_mod(ctx: &PadicContext, w: &LambdaPoly, count: usize) -> Mat {
    let d = w.degree().unwrap_or(0);
    let mut out = Mat::zeros(d, count);
    let mut v = vec![0u128; d];
    if d > 0 {
        v[0] = 1;
    }
    for j in 0..count {
        for i in 0..d {
            out[(i, j)] = v[i];
        }
        // multiply by T modulo the monic w
        let top = v[d - 1];
        for i in (1..d).rev() {
            v[i] = v[i - 1];
        }
        v[0] = 0;
        if top != 0 {
            for (i, vi) in v.iter_mut().enumerate().take(d) {
                *vi = ctx.sub(*vi, ctx.mul(top, w.coeff(i)));
            }
        }
    }
    out
}

/// The norm `N_{m,n} : M_m -> M_n`, reduction modulo `ω_n`.
pub fn norm_map(m: &ElementaryModule, from: u32, to: u32) -> Result<LevelMap> {
    if from <= to {
        return Err(Error::BadLevels(format!(
            "norm needs from > to, got {from} -> {to}"
        )));
    }
    let ctx = *m.ctx();
    let mut parts: Vec<Mat> = m
        .summand_polys()
        .iter()
        .map(|g| Mat::identity(g.degree().unwrap_or(0)))
        .collect();
    if !m.mu_summands().is_empty() {
        let w = omega(ctx, to, m.params());
        let block = powers_mod(&ctx, &w, m.params().omega_degree(from));
        parts.extend(m.mu_summands().iter().map(|_| block.clone()));
    }
    Ok(LevelMap {
        kind: MapKind::Norm,
        from_level: from,
        to_level: to,
        matrix: block_diag(&parts),
    })
}

/// The lift `ι_{n,m} : M_n -> M_m`, multiplication by `ν_{m,n}`.
pub fn lift_map(m: &ElementaryModule, from: u32, to: u32) -> Result<LevelMap> {
    if to <= from {
        return Err(Error::BadLevels(format!(
            "lift needs to > from, got {from} -> {to}"
        )));
    }
    let ctx = *m.ctx();
    let v = nu(ctx, to, from, m.params())?;
    let mut parts: Vec<Mat> = m
        .summand_polys()
        .iter()
        .map(|g| v.eval_matrix(&companion(g)))
        .collect();
    if !m.mu_summands().is_empty() {
        let dn = m.params().omega_degree(from);
        let dm = m.params().omega_degree(to);
        let block = Mat::from_fn(dm, dn, |i, j| if i >= j { v.coeff(i - j) } else { 0 });
        parts.extend(m.mu_summands().iter().map(|_| block.clone()));
    }
    Ok(LevelMap {
        kind: MapKind::Lift,
        from_level: from,
        to_level: to,
        matrix: block_diag(&parts),
    })
}

/// Outcome of checking `N∘ι = p^{m-n}` on `M_n` and `ι∘N = ν_{m,n}` on `M_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircReport {
    pub n: u32,
    pub m: u32,
    pub norm_after_lift: bool,
    pub lift_after_norm: bool,
}

impl CircReport {
    pub fn passed(&self) -> bool {
        self.norm_after_lift && self.lift_after_norm
    }
}

pub fn verify_circ(m: &ElementaryModule, n: u32, upper: u32) -> Result<CircReport> {
    let lower_level = finite_level(m, n);
    let upper_level = finite_level(m, upper);
    verify_circ_levels(m, &lower_level, &upper_level)
}

/// [`verify_circ`] on levels that are already built.
pub fn verify_circ_levels(
    m: &ElementaryModule,
    lower: &FiniteLevel,
    upper: &FiniteLevel,
) -> Result<CircReport> {
    let ctx = *m.ctx();
    let (n, up) = (lower.level(), upper.level());
    let norm = norm_map(m, up, n)?.matrix;
    let lift = lift_map(m, n, up)?.matrix;

    let nl = lower.hom_to_group(&norm.mul(&lift, &ctx), lower);
    let pk = ctx.p_pow_res((up - n).min(ctx.precision_exp()));
    let expect_low = lower.hom_to_group(&Mat::scalar(lower.dim(), pk), lower);
    let norm_after_lift = lower.group().homs_equal(&nl, &expect_low, lower.group());

    let ln = upper.hom_to_group(&lift.mul(&norm, &ctx), upper);
    let nu_t = upper.poly_action(&nu(ctx, up, n, m.params())?);
    let expect_up = upper.hom_to_group(&nu_t, upper);
    let lift_after_norm = upper.group().homs_equal(&ln, &expect_up, upper.group());

    Ok(CircReport {
        n,
        m: up,
        norm_after_lift,
        lift_after_norm,
    })
}

/// A subgroup of a finite level, spanned by columns in generator coordinates.
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: Arc<FiniteLevel>,
    gens: Mat,
}

impl Subgroup {
    pub fn new(ambient: Arc<FiniteLevel>, gens: Mat) -> Self {
        assert_eq!(
            gens.rows(),
            ambient.dim(),
            "generator columns have the wrong length"
        );
        Subgroup { ambient, gens }
    }

    pub fn full(ambient: Arc<FiniteLevel>) -> Self {
        let gens = Mat::identity(ambient.dim());
        Subgroup { ambient, gens }
    }

    pub fn trivial(ambient: Arc<FiniteLevel>) -> Self {
        let gens = Mat::zeros(ambient.dim(), 0);
        Subgroup { ambient, gens }
    }

    pub fn ambient(&self) -> &Arc<FiniteLevel> {
        &self.ambient
    }

    pub fn gens(&self) -> &Mat {
        &self.gens
    }

    fn with_group_gens(&self, g: &Mat) -> Subgroup {
        Subgroup::from_group_gens(self.ambient.clone(), g)
    }

    /// Subgroup spanned by columns given in group coordinates.
    pub fn from_group_gens(ambient: Arc<FiniteLevel>, g: &Mat) -> Self {
        let gens = ambient.from_group_cols(g);
        Subgroup { ambient, gens }
    }

    /// The generators in group coordinates.
    pub fn group_gens(&self) -> Mat {
        self.ambient.to_group_cols(&self.gens)
    }

    /// `log_p |A|`.
    pub fn order_exp(&self) -> u32 {
        self.ambient.group().subgroup_size_exp(&self.group_gens())
    }

    /// Invariant factor exponents, descending.
    pub fn invariants(&self) -> Vec<u32> {
        self.ambient.group().subgroup_invariants(&self.group_gens())
    }

    pub fn p_rank(&self) -> usize {
        self.invariants().len()
    }

    pub fn is_trivial(&self) -> bool {
        self.ambient.group().is_trivial(&self.group_gens())
    }

    pub fn contains(&self, x: &[u128]) -> bool {
        self.ambient
            .group()
            .contains(&self.group_gens(), &self.ambient.to_group(x))
    }

    /// A generator of `self` outside `other`, in generator coordinates.
    pub fn witness_not_in(&self, other: &Subgroup) -> Option<Vec<u128>> {
        let q = self.ambient.group().quotient(&other.group_gens());
        let ctx = self.ambient.ctx();
        self.gens
            .columns()
            .into_iter()
            .find(|x| !q.contains(ctx, &self.ambient.to_group(x)))
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.witness_not_in(other).is_none()
    }

    pub fn same_as(&self, other: &Subgroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let g = self
            .ambient
            .group()
            .intersect(&self.group_gens(), &other.group_gens());
        self.with_group_gens(&g)
    }

    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        Subgroup::new(self.ambient.clone(), self.gens.hcat(&other.gens))
    }

    /// Image under an endomorphism given in generator coordinates.
    pub fn image(&self, f: &Mat) -> Subgroup {
        Subgroup::new(self.ambient.clone(), f.mul(&self.gens, self.ambient.ctx()))
    }

    pub fn scaled(&self, c: u128) -> Subgroup {
        Subgroup::new(self.ambient.clone(), self.gens.scale(c, self.ambient.ctx()))
    }

    pub fn is_t_stable(&self) -> bool {
        self.image(self.ambient.t_action()).is_subgroup_of(self)
    }

    /// Smallest `T`-stable subgroup containing `self`, and whether it is
    /// strictly larger.
    pub fn t_closure(&self) -> (Subgroup, bool) {
        let mut cur = self.clone();
        let mut enlarged = false;
        loop {
            let next = cur.image(self.ambient.t_action());
            if next.is_subgroup_of(&cur) {
                return (cur, enlarged);
            }
            enlarged = true;
            cur = cur.sum(&next);
        }
    }

    /// Every element, in generator coordinates. Only for tiny groups.
    pub fn elements(&self) -> Vec<Vec<u128>> {
        self.ambient
            .elements()
            .into_iter()
            .filter(|x| self.contains(x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::PolySummand;

    fn setup(p: u64, n: u32) -> (PadicContext, TowerParams) {
        (
            PadicContext::new(p, n).unwrap(),
            TowerParams::new(p, 1).unwrap(),
        )
    }

    fn lin(ctx: PadicContext, params: TowerParams, c: i64) -> ElementaryModule {
        ElementaryModule::cyclic(ctx, params, LambdaPoly::from_i64s(ctx, &[c, 1])).unwrap()
    }

    #[test]
    fn cyclic_levels_of_t_minus_3() {
        let (ctx, tp) = setup(3, 10);
        let m = lin(ctx, tp, -3);
        for n in 1..=3 {
            let lv = finite_level(&m, n);
            assert_eq!(lv.invariant_factors(), vec![n]);
            assert!(!lv.unresolved());
            // ω_n(t) annihilates the level
            let w = lv.hom_to_group(&lv.omega_action(n, &tp), &lv);
            assert!(lv.group().hom_is_zero(&w, lv.group()));
        }
    }

    #[test]
    fn mu_levels_are_elementary() {
        let (ctx, tp) = setup(3, 6);
        let m = ElementaryModule::new(ctx, tp, Vec::new(), vec![1]).unwrap();
        for n in 1..=3 {
            let lv = finite_level(&m, n);
            let r = 3usize.pow(n - 1);
            assert_eq!(lv.invariant_factors(), vec![1; r]);
            assert_eq!(lv.size_exp() as usize, r);
        }
    }

    #[test]
    fn t_summand_is_flagged() {
        let (ctx, tp) = setup(3, 5);
        let m = ElementaryModule::cyclic(ctx, tp, LambdaPoly::t(ctx)).unwrap();
        let lv = finite_level(&m, 2);
        assert!(lv.unresolved());
        assert_eq!(lv.invariant_factors(), vec![5]);
        assert!(matches!(
            lv.require_resolved(),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn circ_identities_hold() {
        let (ctx, tp) = setup(3, 10);
        let a = lin(ctx, tp, -3);
        let b = ElementaryModule::new(ctx, tp, Vec::new(), vec![1]).unwrap();
        let f = LambdaPoly::from_i64s(ctx, &[-3, 1])
            .mul(&LambdaPoly::from_i64s(ctx, &[-12, 1]))
            .unwrap();
        let c = ElementaryModule::new(ctx, tp, vec![PolySummand { f, e: 1 }], Vec::new()).unwrap();
        for m in [&a, &b, &c] {
            for n in 1..3 {
                assert!(verify_circ(m, n, n + 1).unwrap().passed(), "{m} at {n}");
            }
            assert!(verify_circ(m, 1, 3).unwrap().passed());
        }
    }

    #[test]
    fn lift_is_injective_and_norm_lift_kills_order_p() {
        let (ctx, tp) = setup(3, 10);
        let m = lin(ctx, tp, -3);
        let l1 = finite_level(&m, 1);
        let l2 = finite_level(&m, 2);
        let lift = l2.hom_to_group(&lift_map(&m, 1, 2).unwrap().matrix, &l1);
        let ker = l1.group().kernel_of(&lift, l2.group());
        assert!(l1.group().is_trivial(&ker));
        let norm = norm_map(&m, 2, 1).unwrap().matrix;
        let comp = norm.mul(&lift_map(&m, 1, 2).unwrap().matrix, &ctx);
        for x in l1.elements() {
            if l1.order_exp(&x) == 1 {
                assert!(l1.is_zero(&comp.mul_vec(&x, &ctx)));
            }
        }
    }

    #[test]
    fn bad_levels_rejected() {
        let (ctx, tp) = setup(3, 6);
        let m = lin(ctx, tp, -3);
        assert!(matches!(norm_map(&m, 1, 2), Err(Error::BadLevels(_))));
        assert!(matches!(lift_map(&m, 2, 2), Err(Error::BadLevels(_))));
    }

    #[test]
    fn subgroup_basics() {
        let (ctx, tp) = setup(3, 10);
        let m = lin(ctx, tp, -3);
        let lv = Arc::new(finite_level(&m, 3));
        let full = Subgroup::full(lv.clone());
        let p_full = full.scaled(3);
        assert_eq!(full.order_exp(), 3);
        assert_eq!(p_full.order_exp(), 2);
        assert!(p_full.is_subgroup_of(&full));
        assert!(!full.is_subgroup_of(&p_full));
        assert!(p_full.is_t_stable());
        let w = full.witness_not_in(&p_full).unwrap();
        assert_eq!(lv.order_exp(&w), 3);
        assert!(full.intersect(&p_full).same_as(&p_full));
    }
}
