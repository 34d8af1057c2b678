//! Torsion `Λ`-modules given as direct sums of cyclic pieces, together with
//! their finite levels `M_n = M/ω_n M`.
//!
//! A summand `Λ/(f^e)` with `f` distinguished is realized as the free
//! `Z_p`-module `Z_p[T]/(f^e)` on the basis `1, T, …, T^{d-1}` (`d = e·deg f`).
//! At level `n` the same basis is kept and `ω_n` acts as a relation, so norm
//! maps are the identity on coordinates and lift maps are multiplication by
//! `ν_{m,n}`. A summand `Λ/(p^m)` has no such finite basis and is realized at
//! each level on `1, T, …, T^{deg ω_n - 1}`.
//!
//! The coordinates of all polynomial summands together form the *lattice*
//! `W = ⊕ Z_p[T]/(f_i^{e_i})`, on which socles, primary parts and saturations
//! are computed before being pushed down to a level.

mod checks;
mod lattice;
mod level;

pub use checks::{
    check_lemma_ab, check_prop_sf, check_semistab, order_profile, property_f_check, transition,
    transition_levels, y_kernel, AbReport, Classification, OrderProfile, PropertyFReport,
    SemistabReport, SfReport, TransitionReport, ZFit,
};
pub use lattice::{
    is_coalescence_closed, lattice_saturate, lattice_t_closure, primary_part, project_lattice,
    random_saturated_submodule, saturate, socle, split_t_part, PrimaryPart, TPartSplit,
};
pub use level::{
    finite_level, lift_map, norm_map, verify_circ, verify_circ_levels, CircReport, FiniteLevel,
    LevelMap, MapKind, Subgroup,
};

use crate::error::{Error, Result};
use crate::lambda::{LambdaPoly, TowerParams};
use crate::matrix::Mat;
use crate::padic::PadicContext;

/// One summand `Λ/(f^e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySummand {
    pub f: LambdaPoly,
    pub e: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryModule {
    ctx: PadicContext,
    params: TowerParams,
    poly: Vec<PolySummand>,
    mu: Vec<u32>,
    powers: Vec<LambdaPoly>,
}

/// Position of one summand inside the generator basis of a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Poly {
        index: usize,
        offset: usize,
        size: usize,
    },
    Mu {
        index: usize,
        offset: usize,
        size: usize,
        m: u32,
    },
}

impl Block {
    pub fn offset(&self) -> usize {
        match *self {
            Block::Poly { offset, .. } | Block::Mu { offset, .. } => offset,
        }
    }

    pub fn size(&self) -> usize {
        match *self {
            Block::Poly { size, .. } | Block::Mu { size, .. } => size,
        }
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset()..self.offset() + self.size()
    }
}

/// Multiplication by `T` on `Z_p[T]/(g)` for monic `g`.
pub fn companion(g: &LambdaPoly) -> Mat {
    let ctx = g.ctx();
    let d = g.degree().unwrap_or(0);
    let mut c = Mat::zeros(d, d);
    for j in 0..d {
        if j + 1 < d {
            c[(j + 1, j)] = 1;
        } else {
            for i in 0..d {
                c[(i, j)] = ctx.neg(g.coeff(i));
            }
        }
    }
    c
}

/// Block-diagonal matrix from square blocks.
pub(crate) fn block_diag(blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(Mat::rows).sum();
    let m: usize = blocks.iter().map(Mat::cols).sum();
    let mut out = Mat::zeros(n, m);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    out
}

impl ElementaryModule {
    pub fn new(
        ctx: PadicContext,
        params: TowerParams,
        poly: Vec<PolySummand>,
        mu: Vec<u32>,
    ) -> Result<Self> {
        if params.p != ctx.p() {
            return Err(Error::InvalidContext(format!(
                "tower prime {} differs from context prime {}",
                params.p,
                ctx.p()
            )));
        }
        for (i, s) in poly.iter().enumerate() {
            if s.f.ctx() != &ctx {
                return Err(Error::ContextMismatch);
            }
            if !s.f.is_distinguished()? {
                return Err(Error::InvalidSummand(format!(
                    "summand {i}: {} is not distinguished",
                    s.f
                )));
            }
            if s.f.degree() == Some(0) {
                return Err(Error::InvalidSummand(format!(
                    "summand {i}: constant polynomial"
                )));
            }
            if s.e == 0 {
                return Err(Error::InvalidSummand(format!(
                    "summand {i}: exponent must be >= 1"
                )));
            }
        }
        if let Some(&m) = mu.iter().find(|&&m| m == 0) {
            return Err(Error::InvalidSummand(format!(
                "mu summand exponent {m} must be >= 1"
            )));
        }
        let powers = poly.iter().map(|s| s.f.pow(s.e)).collect();
        Ok(ElementaryModule {
            ctx,
            params,
            poly,
            mu,
            powers,
        })
    }

    /// `Λ/(f)` for a single distinguished `f`.
    pub fn cyclic(ctx: PadicContext, params: TowerParams, f: LambdaPoly) -> Result<Self> {
        ElementaryModule::new(ctx, params, vec![PolySummand { f, e: 1 }], Vec::new())
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn params(&self) -> &TowerParams {
        &self.params
    }

    pub fn poly_summands(&self) -> &[PolySummand] {
        &self.poly
    }

    pub fn mu_summands(&self) -> &[u32] {
        &self.mu
    }

    /// `f_i^{e_i}` for each polynomial summand.
    pub fn summand_polys(&self) -> &[LambdaPoly] {
        &self.powers
    }

    /// `Σ e·deg f`.
    pub fn lambda_invariant(&self) -> usize {
        self.powers.iter().map(|g| g.degree().unwrap_or(0)).sum()
    }

    /// `Σ m`.
    pub fn mu_invariant(&self) -> u32 {
        self.mu.iter().sum()
    }

    /// Rank of the lattice `W`; equals the λ-invariant.
    pub fn lattice_dim(&self) -> usize {
        self.lambda_invariant()
    }

    /// The action of `T` on the lattice.
    pub fn lattice_t(&self) -> Mat {
        block_diag(&self.powers.iter().map(companion).collect::<Vec<_>>())
    }

    pub fn blocks(&self, n: u32) -> Vec<Block> {
        let mut out = Vec::new();
        let mut offset = 0;
        for (index, g) in self.powers.iter().enumerate() {
            let size = g.degree().unwrap_or(0);
            out.push(Block::Poly {
                index,
                offset,
                size,
            });
            offset += size;
        }
        let dn = self.params.omega_degree(n);
        for (index, &m) in self.mu.iter().enumerate() {
            out.push(Block::Mu {
                index,
                offset,
                size: dn,
                m,
            });
            offset += dn;
        }
        out
    }

    /// Number of generators of `M_n`.
    pub fn level_dim(&self, n: u32) -> usize {
        self.lattice_dim() + self.mu.len() * self.params.omega_degree(n)
    }

    /// Whether `T` divides some summand polynomial at the working precision,
    /// which makes that summand infinite at every level.
    pub fn has_t_summand(&self) -> bool {
        self.powers.iter().any(|g| g.coeff(0) == 0)
    }
}

impl std::fmt::Display for ElementaryModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self
            .poly
            .iter()
            .map(|s| {
                if s.e == 1 {
                    format!("Λ/({})", s.f)
                } else {
                    format!("Λ/(({})^{})", s.f, s.e)
                }
            })
            .collect();
        parts.extend(self.mu.iter().map(|m| format!("Λ/(p^{m})")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}
