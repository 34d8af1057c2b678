//! Transitions between consecutive levels and the structural checks built on
//! top of norms and lifts.

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::Rng;

use super::level::{finite_level, lift_map, norm_map, FiniteLevel, Subgroup};
use super::ElementaryModule;
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::matrix::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Stable,
    Semistable,
    Tame,
    Wild,
}

impl Classification {
    /// Thresholds on the growth factor `k(n)` relative to `p - 1`.
    pub fn from_growth_factor(k: u32, p: u64) -> Self {
        let k = u64::from(k);
        if k == 1 {
            Classification::Stable
        } else if k < p - 1 {
            Classification::Semistable
        } else if k == p - 1 {
            Classification::Tame
        } else {
            Classification::Wild
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Semistable => "semistable",
            Classification::Tame => "tame",
            Classification::Wild => "wild",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The transition `C_n = M_{n+1}/ι(M_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionReport {
    pub level: u32,
    /// Least `k ≥ 1` with `ω_n^k M_{n+1} ⊆ ι(M_n)`.
    pub growth_factor: u32,
    /// Least `j ≥ 0` with `T^j M_{n+1} ⊆ ι(M_n)`, for comparison.
    pub t_exponent: u32,
    pub classification: Classification,
    /// Invariant factor exponents of `C_n`, descending.
    pub quotient_invariant_factors: Vec<u32>,
    pub unresolved: bool,
}

/// Endomorphism `f` of `level` (generator coordinates) as a hom on its group.
fn endo(level: &FiniteLevel, f: &Mat) -> Mat {
    level.hom_to_group(f, level)
}

/// Least `j ≥ start` with `f^j(G) ⊆ H`, searching up to `bound`.
fn nilpotency(g: &AbelianGroup, f: &Mat, h: &Mat, start: u32, bound: u32) -> u32 {
    let ctx = g.ctx();
    let mut img = g.full();
    for _ in 0..start {
        img = f.mul(&img, ctx);
    }
    let mut j = start;
    while j < bound && !g.is_subgroup_of(&img, h) {
        img = f.mul(&img, ctx);
        j += 1;
    }
    j
}

pub fn transition(m: &ElementaryModule, n: u32) -> Result<TransitionReport> {
    let lower = finite_level(m, n);
    let upper = finite_level(m, n + 1);
    transition_levels(m, &lower, &upper)
}

/// [`transition`] on consecutive levels that are already built.
pub fn transition_levels(
    m: &ElementaryModule,
    lower: &FiniteLevel,
    upper: &FiniteLevel,
) -> Result<TransitionReport> {
    let n = lower.level();
    if upper.level() != n + 1 {
        return Err(Error::BadLevels(format!(
            "transition needs consecutive levels, got {n} and {}",
            upper.level()
        )));
    }
    let g = upper.group();
    let image = upper.hom_to_group(&lift_map(m, n, n + 1)?.matrix, lower);
    let q = g.quotient(&image);
    let mut quotient_invariant_factors: Vec<u32> =
        q.vals.iter().copied().filter(|&v| v > 0).collect();
    quotient_invariant_factors.sort_unstable_by(|a, b| b.cmp(a));
    let length: u32 = quotient_invariant_factors.iter().sum();

    // ω_n and T lie in the maximal ideal, so their powers kill C_n after at
    // most length(C_n) steps.
    let omega = endo(upper, &upper.omega_action(n, m.params()));
    let growth_factor = nilpotency(g, &omega, &image, 1, length.max(1));
    let t = upper.t_group().clone();
    let t_exponent = nilpotency(g, &t, &image, 0, length);
    Ok(TransitionReport {
        level: n,
        growth_factor,
        t_exponent,
        classification: Classification::from_growth_factor(growth_factor, m.params().p),
        quotient_invariant_factors,
        unresolved: lower.unresolved() || upper.unresolved(),
    })
}

/// `ker(N_{H,n})` inside the level `H` given by `upper`.
pub fn y_kernel(m: &ElementaryModule, n: u32, upper: &Arc<FiniteLevel>) -> Result<Subgroup> {
    let h = upper.level();
    if h <= n {
        return Err(Error::BadLevels(format!("horizon {h} must exceed n = {n}")));
    }
    let lower = finite_level(m, n);
    let norm = lower.hom_to_group(&norm_map(m, h, n)?.matrix, upper);
    let ker = upper.group().kernel_of(&norm, lower.group());
    Ok(Subgroup::from_group_gens(upper.clone(), &ker))
}

#[derive(Clone, Debug)]
pub struct PropertyFReport {
    pub n: u32,
    pub horizon: u32,
    pub passed: bool,
    /// Invariants of `ker(N_{H,n}) ∩ A`.
    pub kernel_part: Vec<u32>,
    /// Invariants of `ω_n A`.
    pub omega_part: Vec<u32>,
    /// An element in one side but not the other, in generator coordinates.
    pub witness: Option<Vec<u128>>,
}

/// Checks `ker(N_{H,n}) ∩ A = ω_n A` for a `T`-stable `A` at level `H`.
pub fn property_f_check(m: &ElementaryModule, a: &Subgroup, n: u32) -> Result<PropertyFReport> {
    let upper = a.ambient();
    if !a.is_t_stable() {
        return Err(Error::NotTStable);
    }
    let y = y_kernel(m, n, upper)?.intersect(a);
    let wa = a.image(&upper.omega_action(n, m.params()));
    let witness = y.witness_not_in(&wa).or_else(|| wa.witness_not_in(&y));
    Ok(PropertyFReport {
        n,
        horizon: upper.level(),
        passed: witness.is_none(),
        kernel_part: y.invariants(),
        omega_part: wa.invariants(),
        witness,
    })
}

/// How the order sequence of an element along the levels fits
/// `ord(x_n) = p^{max(0, n+1+z)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZFit {
    Finite(i64),
    /// The element is zero.
    NegInfinity,
    /// Orders constant and nonzero, as for elements of `μ`-type summands.
    MuType,
    Irregular,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderProfile {
    /// `(n, log_p ord(x_n))`.
    pub orders: Vec<(u32, u32)>,
    pub fit: ZFit,
}

/// Orders of the norms `x_n = N_{H,n} x` of an element `x` of the level `top`.
pub fn order_profile(
    m: &ElementaryModule,
    top: &FiniteLevel,
    x: &[u128],
    levels: RangeInclusive<u32>,
) -> Result<OrderProfile> {
    let h = top.level();
    if *levels.end() > h || levels.is_empty() {
        return Err(Error::BadLevels(format!(
            "levels {levels:?} must lie at or below {h}"
        )));
    }
    let mut orders = Vec::new();
    for n in levels {
        let e = if n == h {
            top.order_exp(x)
        } else {
            let lower = finite_level(m, n);
            let xn = norm_map(m, h, n)?.matrix.mul_vec(x, m.ctx());
            lower.order_exp(&xn)
        };
        orders.push((n, e));
    }
    let fit = fit_z(&orders);
    Ok(OrderProfile { orders, fit })
}

fn fit_z(orders: &[(u32, u32)]) -> ZFit {
    if orders.iter().all(|&(_, e)| e == 0) {
        return ZFit::NegInfinity;
    }
    let &(top, e_top) = orders.last().expect("nonempty");
    let z = i64::from(e_top) - i64::from(top) - 1;
    if orders
        .iter()
        .all(|&(n, e)| i64::from(e) == (i64::from(n) + 1 + z).max(0))
    {
        return ZFit::Finite(z);
    }
    if orders.iter().all(|&(_, e)| e == orders[0].1) {
        ZFit::MuType
    } else {
        ZFit::Irregular
    }
}

/// Which hypotheses of the lemma on a pair `(ι, N)` hold, and whether its
/// conclusions follow.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbReport {
    pub n: u32,
    /// Failed hypotheses, empty when the lemma applies.
    pub unmet: Vec<&'static str>,
    pub lift_injective: bool,
    pub image_is_p_multiple: bool,
    pub samples: usize,
    pub order_violations: usize,
    pub witness: Option<Vec<u128>>,
}

impl AbReport {
    pub fn applies(&self) -> bool {
        self.unmet.is_empty()
    }

    /// Vacuously true when the hypotheses fail.
    pub fn passed(&self) -> bool {
        !self.applies()
            || (self.lift_injective && self.image_is_p_multiple && self.order_violations == 0)
    }
}

/// Runs the lemma on `A = M_n`, `B = M_{n+1}`. The conclusions are computed
/// whether or not the hypotheses hold; `passed` only judges them when they do.
pub fn check_lemma_ab<R: Rng>(
    m: &ElementaryModule,
    lower: &FiniteLevel,
    upper: &FiniteLevel,
    samples: usize,
    rng: &mut R,
) -> Result<AbReport> {
    let ctx = *m.ctx();
    let n = lower.level();
    let (ga, gb) = (lower.group(), upper.group());
    let lift = lift_map(m, n, upper.level())?.matrix;
    let norm = norm_map(m, upper.level(), n)?.matrix;
    let iota = upper.hom_to_group(&lift, lower);
    let nm = lower.hom_to_group(&norm, upper);

    let mut unmet = Vec::new();
    if lower.subexponent() < 2 || upper.subexponent() < 2 {
        unmet.push("subexponents at least p^2");
    }
    if !ga.same_subgroup(&nm, &ga.full()) {
        unmet.push("norm surjective");
    }
    let r = lower.p_rank();
    if upper.p_rank() != r || upper.size_exp() != lower.size_exp() + r as u32 {
        unmet.push("equal p-ranks r and |B|/|A| = p^r");
    }
    let p = ctx.p_pow_res(1);
    let composite = nm.mul(&iota, &ctx);
    if !ga.homs_equal(&composite, &Mat::scalar(r, p), ga) {
        unmet.push("N∘ι = p");
    }
    if gb.subgroup_invariants(&iota).len() != r {
        unmet.push("ι rank preserving");
    }

    let lift_injective = ga.is_trivial(&ga.kernel_of(&iota, gb));
    let image_is_p_multiple = gb.same_subgroup(&iota, &gb.full().scale(p, &ctx));
    let mut order_violations = 0;
    let mut witness = None;
    let mut taken = 0;
    if gb.size_exp() > 0 {
        while taken < samples {
            let y = gb.random_element(rng);
            if gb.is_zero(&y) {
                continue;
            }
            taken += 1;
            let ny = ga.normalize(&nm.mul_vec(&y, &ctx));
            if gb.order_exp(&y) != ga.order_exp(&ny) + 1 {
                order_violations += 1;
                witness.get_or_insert_with(|| upper.from_group(&y));
            }
        }
    }
    Ok(AbReport {
        n,
        unmet,
        lift_injective,
        image_is_p_multiple,
        samples: taken,
        order_violations,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfReport {
    pub n: u32,
    pub lift_injective: bool,
    /// `ω_n M_{n+1} ⊆ ι(M_n[p])`.
    pub omega_in_lifted_torsion: bool,
    pub witness: Option<Vec<u128>>,
}

impl SfReport {
    pub fn passed(&self) -> bool {
        self.lift_injective && self.omega_in_lifted_torsion
    }
}

pub fn check_prop_sf(
    m: &ElementaryModule,
    lower: &FiniteLevel,
    upper: &FiniteLevel,
) -> Result<SfReport> {
    let ctx = *m.ctx();
    let n = lower.level();
    let (ga, gb) = (lower.group(), upper.group());
    let iota = upper.hom_to_group(&lift_map(m, n, upper.level())?.matrix, lower);
    let lift_injective = ga.is_trivial(&ga.kernel_of(&iota, gb));
    let lifted_torsion = iota.mul(&ga.p_torsion(1), &ctx);
    let omega_img = endo(upper, &upper.omega_action(n, m.params()));
    let witness = gb
        .witness_not_contained(&omega_img, &lifted_torsion)
        .map(|y| upper.from_group(&y));
    Ok(SfReport {
        n,
        lift_injective,
        omega_in_lifted_torsion: witness.is_none(),
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemistabReport {
    pub n: u32,
    pub classification: Classification,
    /// `p M_{n+1} = ι(M_n)`; only meaningful when semistable.
    pub p_multiple_is_lift: bool,
}

impl SemistabReport {
    pub fn applies(&self) -> bool {
        self.classification == Classification::Semistable
    }

    pub fn passed(&self) -> bool {
        !self.applies() || self.p_multiple_is_lift
    }
}

pub fn check_semistab(
    m: &ElementaryModule,
    lower: &FiniteLevel,
    upper: &FiniteLevel,
) -> Result<SemistabReport> {
    let ctx = *m.ctx();
    let t = transition_levels(m, lower, upper)?;
    let gb = upper.group();
    let iota = upper.hom_to_group(&lift_map(m, lower.level(), upper.level())?.matrix, lower);
    let pb = gb.full().scale(ctx.p_pow_res(1), &ctx);
    Ok(SemistabReport {
        n: lower.level(),
        classification: t.classification,
        p_multiple_is_lift: gb.same_subgroup(&iota, &pb),
    })
}
