//! Submodules computed on the lattice `W = ⊕ Z_p[T]/(f_i^{e_i})` and pushed
//! down to a finite level.
//!
//! Working on `W` keeps saturation meaningful: inside a finite group every
//! element is killed by some power of `p`, so "`p^j x ∈ A` implies `x ∈ A`"
//! only has content for lifts.

use std::sync::Arc;

use rand::Rng;

use super::level::{FiniteLevel, Subgroup};
use super::{Block, ElementaryModule};
use crate::error::{Error, Result};
use crate::lambda::{resultant_valuation, LambdaPoly};
use crate::matrix::Mat;
use crate::padic::PadicContext;

/// Image of lattice vectors (columns of length `λ`) in a level of `m`.
pub fn project_lattice(m: &ElementaryModule, level: &Arc<FiniteLevel>, lat: &Mat) -> Subgroup {
    assert_eq!(
        lat.rows(),
        m.lattice_dim(),
        "lattice vectors have the wrong length"
    );
    let gens = Mat::from_fn(level.dim(), lat.cols(), |i, j| {
        if i < lat.rows() {
            lat[(i, j)]
        } else {
            0
        }
    });
    Subgroup::new(level.clone(), gens)
}

/// Smallest saturated sublattice containing the columns of `lat`.
pub fn lattice_saturate(ctx: &PadicContext, lat: &Mat) -> Mat {
    let snf = lat.snf(ctx);
    let n = ctx.precision_exp();
    let keep: Vec<usize> = (0..snf.vals.len()).filter(|&i| snf.vals[i] < n).collect();
    snf.u_inv.select_cols(&keep)
}

/// Span of `T^j v` for the columns `v` of `lat` and `j < λ`; by
/// Cayley-Hamilton higher powers add nothing.
pub fn lattice_t_closure(m: &ElementaryModule, lat: &Mat) -> Mat {
    let ctx = m.ctx();
    let t = m.lattice_t();
    let mut out = lat.clone();
    let mut cur = lat.clone();
    for _ in 1..m.lattice_dim() {
        cur = t.mul(&cur, ctx);
        out = out.hcat(&cur);
    }
    out
}

/// The socle `M[f] = {x : f x = 0}`, taken in `M` and pushed to the level.
pub fn socle(m: &ElementaryModule, level: &Arc<FiniteLevel>, f: &LambdaPoly) -> Result<Subgroup> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if m.lattice_dim() == 0 {
        return Ok(Subgroup::trivial(level.clone()));
    }
    let k = f.eval_matrix(&m.lattice_t()).saturated_kernel(m.ctx());
    Ok(project_lattice(m, level, &k))
}

#[derive(Clone, Debug)]
pub struct PrimaryPart {
    pub subgroup: Subgroup,
    /// Largest resultant valuation between `f` and a summand polynomial
    /// coprime to it: `(f, g)` contains `p^c` for `c` at most this value.
    pub c_estimate: u32,
    /// False when `c_estimate` reached the precision, so the coprime parts
    /// cannot be told apart.
    pub reliable: bool,
}

/// The `f`-primary part `M(f) = ⋃ M[f^j]`, pushed to the level.
pub fn primary_part(
    m: &ElementaryModule,
    level: &Arc<FiniteLevel>,
    f: &LambdaPoly,
) -> Result<PrimaryPart> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let ctx = m.ctx();
    let mut c_estimate = 0;
    for g in m.poly_summands() {
        if !f.rem_monic(&g.f)?.is_zero() {
            c_estimate = c_estimate.max(resultant_valuation(f, &g.f)?);
        }
    }
    let subgroup = if m.lattice_dim() == 0 {
        Subgroup::trivial(level.clone())
    } else {
        let fm = f.eval_matrix(&m.lattice_t());
        let k = fm.pow(m.lattice_dim() as u64, ctx).saturated_kernel(ctx);
        project_lattice(m, level, &k)
    };
    Ok(PrimaryPart {
        subgroup,
        c_estimate,
        reliable: c_estimate < ctx.precision_exp(),
    })
}

/// `Z_p`-saturation of the span of the given generator lifts.
///
/// The answer depends on the lifts, not only on the subgroup: it is the
/// image of the saturation of their span in `Z_p^dim`. Generators built
/// from lattice vectors or from `p`-multiples of such vectors behave as
/// expected.
pub fn saturate(a: &Subgroup) -> Subgroup {
    let ctx = a.ambient().ctx();
    Subgroup::new(a.ambient().clone(), lattice_saturate(ctx, a.gens()))
}

/// Whether a `T`-stable subgroup equals its saturation.
pub fn is_coalescence_closed(a: &Subgroup) -> Result<bool> {
    if !a.is_t_stable() {
        return Err(Error::NotTStable);
    }
    Ok(saturate(a).same_as(a))
}

#[derive(Clone, Debug)]
pub struct TPartSplit {
    /// `M[T]`.
    pub socle_t: Subgroup,
    /// Saturation of `T·M`, together with the `μ`-summands.
    pub complement: Subgroup,
    /// Intersection trivial and sum equal to the whole level.
    pub verified: bool,
}

/// Splits a level as `W' ⊕ M[T]`.
pub fn split_t_part(m: &ElementaryModule, level: &Arc<FiniteLevel>) -> TPartSplit {
    let ctx = m.ctx();
    let dim = m.lattice_dim();
    let (socle_t, lattice_part) = if dim == 0 {
        (
            Subgroup::trivial(level.clone()),
            Subgroup::trivial(level.clone()),
        )
    } else {
        let t = m.lattice_t();
        let k = t.saturated_kernel(ctx);
        (
            project_lattice(m, level, &k),
            project_lattice(m, level, &lattice_saturate(ctx, &t)),
        )
    };
    let mu_cols: Vec<Vec<u128>> = level
        .blocks()
        .iter()
        .filter(|b| matches!(b, Block::Mu { .. }))
        .flat_map(|b| b.range())
        .map(|i| {
            let mut v = vec![0u128; level.dim()];
            v[i] = 1;
            v
        })
        .collect();
    let complement = lattice_part.sum(&Subgroup::new(
        level.clone(),
        Mat::from_columns(level.dim(), &mu_cols),
    ));
    let verified = socle_t.intersect(&complement).is_trivial()
        && Subgroup::full(level.clone()).is_subgroup_of(&socle_t.sum(&complement));
    TPartSplit {
        socle_t,
        complement,
        verified,
    }
}

/// A random saturated `T`-stable submodule of `M`, pushed to the level.
///
/// A few random lattice vectors are closed under `T` and saturated; the
/// result is a `Λ`-submodule of the lattice that is a `Z_p`-direct summand.
pub fn random_saturated_submodule<R: Rng>(
    m: &ElementaryModule,
    level: &Arc<FiniteLevel>,
    rng: &mut R,
) -> Subgroup {
    let dim = m.lattice_dim();
    if dim == 0 {
        return Subgroup::trivial(level.clone());
    }
    let ctx = m.ctx();
    let count = rng.gen_range(1..=dim);
    let cols: Vec<Vec<u128>> = (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(0..ctx.modulus())).collect())
        .collect();
    let lat = Mat::from_columns(dim, &cols);
    let closed = lattice_t_closure(m, &lat);
    project_lattice(m, level, &lattice_saturate(ctx, &closed))
}
