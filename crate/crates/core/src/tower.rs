//! Growth of `|M_n|` along the tower and extraction of the Iwasawa
//! invariants from it.
//!
//! Sizes are tracked as exponents `e_n = log_p |M_n|`, so the growth law
//! reads `e_n = μ·p^{n-k} + λ·n + ν` for `n ≥ n0`, and consecutive sizes
//! differ by `λ` (plus the `μ` term) rather than by a product.

use crate::error::{Error, Result};
use crate::lambda::TowerParams;
use crate::module::{finite_level, ElementaryModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthEntry {
    pub level: u32,
    pub size_exp: u32,
    pub p_rank: u32,
    pub unresolved: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrowthSeries {
    entries: Vec<GrowthEntry>,
}

impl GrowthSeries {
    pub fn new(entries: Vec<GrowthEntry>) -> Result<Self> {
        for w in entries.windows(2) {
            if w[1].level <= w[0].level {
                return Err(Error::InconsistentSeries(format!(
                    "levels must increase, got {} after {}",
                    w[1].level, w[0].level
                )));
            }
        }
        if let Some(e) = entries.iter().find(|e| e.p_rank > e.size_exp) {
            return Err(Error::InconsistentSeries(format!(
                "level {}: p-rank {} exceeds size exponent {}",
                e.level, e.p_rank, e.size_exp
            )));
        }
        Ok(GrowthSeries { entries })
    }

    /// Series of a module over `levels`.
    pub fn of_module(m: &ElementaryModule, levels: impl IntoIterator<Item = u32>) -> Result<Self> {
        let entries = levels
            .into_iter()
            .map(|n| {
                let lv = finite_level(m, n);
                GrowthEntry {
                    level: n,
                    size_exp: lv.size_exp(),
                    p_rank: lv.p_rank() as u32,
                    unresolved: lv.unresolved(),
                }
            })
            .collect();
        GrowthSeries::new(entries)
    }

    pub fn entries(&self) -> &[GrowthEntry] {
        &self.entries
    }

    fn resolved(&self) -> Vec<GrowthEntry> {
        self.entries
            .iter()
            .copied()
            .filter(|e| !e.unresolved)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilizationStatus {
    /// The growth law holds exactly from `n0` on.
    Stabilized,
    /// Two consecutive levels have the same size, and so do all later ones.
    SizeFrozen,
    /// No integral growth law fits the last three points.
    Undetermined,
}

/// Fitted invariants. `lambda`, `mu` and `nu` are meaningful only when the
/// status is not `Undetermined`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvariantEstimate {
    pub n0: u32,
    pub lambda: i64,
    pub mu: i64,
    pub nu: i64,
    pub status: StabilizationStatus,
}

fn mu_basis(params: &TowerParams, n: u32) -> i128 {
    i128::from(params.p).pow(n.saturating_sub(params.k))
}

fn det3(m: &[[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Integral solution of a 3×3 system by Cramer's rule.
fn solve3(a: &[[i128; 3]; 3], b: &[i128; 3]) -> Option<[i128; 3]> {
    let d = det3(a);
    if d == 0 {
        return None;
    }
    let mut out = [0i128; 3];
    for (c, slot) in out.iter_mut().enumerate() {
        let mut m = *a;
        for r in 0..3 {
            m[r][c] = b[r];
        }
        let num = det3(&m);
        if num % d != 0 {
            return None;
        }
        *slot = num / d;
    }
    Some(out)
}

/// Detects where the growth law takes hold and fits `(λ, μ, ν)` exactly.
///
/// The fit uses the last three resolved points; `n0` is then the smallest
/// level from which every resolved point satisfies it.
pub fn detect_stabilization(
    series: &GrowthSeries,
    params: &TowerParams,
) -> Result<InvariantEstimate> {
    let pts = series.resolved();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 resolved levels, have {}",
            pts.len()
        )));
    }

    if let Some(i) = (0..pts.len() - 1)
        .find(|&i| pts[i + 1].level == pts[i].level + 1 && pts[i + 1].size_exp == pts[i].size_exp)
    {
        let frozen = pts[i];
        if let Some(later) = pts[i + 1..].iter().find(|e| e.size_exp != frozen.size_exp) {
            return Err(Error::InconsistentSeries(format!(
                "size frozen at level {} but level {} has e = {} instead of {}",
                frozen.level, later.level, later.size_exp, frozen.size_exp
            )));
        }
        return Ok(InvariantEstimate {
            n0: frozen.level,
            lambda: 0,
            mu: 0,
            nu: i64::from(frozen.size_exp),
            status: StabilizationStatus::SizeFrozen,
        });
    }

    let last = &pts[pts.len() - 3..];
    let mut a = [[0i128; 3]; 3];
    let mut b = [0i128; 3];
    for (r, e) in last.iter().enumerate() {
        a[r] = [mu_basis(params, e.level), i128::from(e.level), 1];
        b[r] = i128::from(e.size_exp);
    }
    let undetermined = InvariantEstimate {
        n0: last[2].level,
        lambda: 0,
        mu: 0,
        nu: 0,
        status: StabilizationStatus::Undetermined,
    };
    let Some([mu, lambda, nu]) = solve3(&a, &b) else {
        return Ok(undetermined);
    };
    if mu < 0 || lambda < 0 {
        return Ok(undetermined);
    }
    let fits = |e: &GrowthEntry| {
        mu * mu_basis(params, e.level) + lambda * i128::from(e.level) + nu == i128::from(e.size_exp)
    };
    let mut start = pts.len() - 3;
    while start > 0 && fits(&pts[start - 1]) {
        start -= 1;
    }
    Ok(InvariantEstimate {
        n0: pts[start].level,
        lambda: lambda as i64,
        mu: mu as i64,
        nu: nu as i64,
        status: StabilizationStatus::Stabilized,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankFreeze {
    /// Ranks agree from `from` on.
    Frozen { from: u32, rank: u32 },
    /// No two consecutive ranks agree.
    NoFreezeObserved,
    /// Ranks agreed at `from` but changed again at `at`.
    Violated { from: u32, at: u32 },
}

impl RankFreeze {
    pub fn holds(&self) -> bool {
        !matches!(self, RankFreeze::Violated { .. })
    }
}

/// Once two consecutive p-ranks agree, all later ones must agree too.
pub fn rank_freeze_check(series: &GrowthSeries) -> Result<RankFreeze> {
    let e = series.entries();
    if e.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 levels, have {}",
            e.len()
        )));
    }
    let Some(i) = (0..e.len() - 1).find(|&i| e[i].p_rank == e[i + 1].p_rank) else {
        return Ok(RankFreeze::NoFreezeObserved);
    };
    let rank = e[i].p_rank;
    match e[i + 1..].iter().find(|x| x.p_rank != rank) {
        Some(bad) => Ok(RankFreeze::Violated {
            from: e[i].level,
            at: bad.level,
        }),
        None => Ok(RankFreeze::Frozen {
            from: e[i].level,
            rank,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::LambdaPoly;
    use crate::padic::PadicContext;

    fn series(sizes: &[u32], ranks: &[u32]) -> GrowthSeries {
        GrowthSeries::new(
            sizes
                .iter()
                .zip(ranks)
                .enumerate()
                .map(|(i, (&s, &r))| GrowthEntry {
                    level: i as u32 + 1,
                    size_exp: s,
                    p_rank: r,
                    unresolved: false,
                })
                .collect(),
        )
        .unwrap()
    }

    fn params() -> TowerParams {
        TowerParams::new(3, 1).unwrap()
    }

    #[test]
    fn linear_growth() {
        let est = detect_stabilization(&series(&[1, 2, 3, 4], &[1, 1, 1, 1]), &params()).unwrap();
        assert_eq!(est.status, StabilizationStatus::Stabilized);
        assert_eq!((est.lambda, est.mu, est.nu, est.n0), (1, 0, 0, 1));
    }

    #[test]
    fn mu_growth() {
        let est = detect_stabilization(&series(&[1, 3, 9, 27], &[1, 3, 9, 27]), &params()).unwrap();
        assert_eq!((est.lambda, est.mu, est.nu), (0, 1, 0));
        assert_eq!(
            rank_freeze_check(&series(&[1, 3, 9], &[1, 3, 9])).unwrap(),
            RankFreeze::NoFreezeObserved
        );
    }

    #[test]
    fn frozen_and_inconsistent() {
        let est = detect_stabilization(&series(&[5, 5, 5], &[2, 2, 2]), &params()).unwrap();
        assert_eq!(est.status, StabilizationStatus::SizeFrozen);
        assert_eq!(est.nu, 5);
        assert!(matches!(
            detect_stabilization(&series(&[1, 1, 2], &[1, 1, 1]), &params()),
            Err(Error::InconsistentSeries(_))
        ));
        assert!(matches!(
            detect_stabilization(&series(&[1, 2], &[1, 1]), &params()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn rank_freeze() {
        assert_eq!(
            rank_freeze_check(&series(&[1, 2, 3], &[1, 1, 1])).unwrap(),
            RankFreeze::Frozen { from: 1, rank: 1 }
        );
        assert!(!rank_freeze_check(&series(&[1, 2, 3], &[1, 1, 2]))
            .unwrap()
            .holds());
    }

    #[test]
    fn late_stabilization_finds_n0() {
        // e_n = 2n - 1 from level 2 on, with a deviating first level
        let est =
            detect_stabilization(&series(&[2, 3, 5, 7, 9], &[1, 2, 2, 2, 2]), &params()).unwrap();
        assert_eq!((est.lambda, est.mu, est.nu, est.n0), (2, 0, -1, 2));
    }

    #[test]
    fn series_from_module() {
        let ctx = PadicContext::new(3, 10).unwrap();
        let m =
            ElementaryModule::cyclic(ctx, params(), LambdaPoly::from_i64s(ctx, &[-3, 1])).unwrap();
        let s = GrowthSeries::of_module(&m, 1..=4).unwrap();
        let sizes: Vec<u32> = s.entries().iter().map(|e| e.size_exp).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4]);
    }
}
