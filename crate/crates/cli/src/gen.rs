//! Seeded generator of random elementary modules.
//!
//! All randomness comes from a ChaCha8 stream seeded with a single `u64`,
//! so a seed reproduces the same descriptions on every platform.

use iwalab_core::padic::PadicContext;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::spec::{ModuleSpecFile, SummandSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub p: u64,
    pub k: u32,
    pub precision_exp: u32,
    /// Largest degree of a single summand polynomial.
    pub max_deg: usize,
    /// Most polynomial summands per module.
    pub max_summands: usize,
    /// Bound on `Σ e·deg f` per module.
    pub max_lambda: usize,
    /// Whether a `Λ/(p)` summand may be added.
    pub allow_mu: bool,
}

impl GenConfig {
    /// One polynomial summand of degree at most `max_deg`.
    pub fn simple(p: u64, k: u32, precision_exp: u32, max_deg: usize, allow_mu: bool) -> Self {
        GenConfig {
            p,
            k,
            precision_exp,
            max_deg,
            max_summands: 1,
            max_lambda: max_deg,
            allow_mu,
        }
    }

    /// The campaign corpus: `λ ≤ 3`, `μ ≤ 1`, up to two polynomial summands.
    pub fn campaign() -> Self {
        GenConfig {
            p: 3,
            k: 1,
            precision_exp: 10,
            max_deg: 3,
            max_summands: 2,
            max_lambda: 3,
            allow_mu: true,
        }
    }
}

/// Monic polynomial of degree `d` whose lower coefficients are divisible by
/// `p` and whose constant term has valuation exactly one.
///
/// The constant term keeps every root at valuation at least `1/d`, which is
/// what makes the level sizes settle into the growth law after a level or
/// two.
fn random_distinguished(ctx: &PadicContext, d: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let p = ctx.p() as u128;
    let bound = ctx.p_pow(ctx.precision_exp() - 1);
    let unit = loop {
        let u = rng.gen_range(1..bound);
        if u % p != 0 {
            break u;
        }
    };
    let mut coeffs = vec![ctx.centered(ctx.reduce(p * unit)) as i64];
    for _ in 1..d {
        let c = p * rng.gen_range(0..bound);
        coeffs.push(ctx.centered(ctx.reduce(c)) as i64);
    }
    coeffs.push(1);
    coeffs
}

pub fn generate(cfg: &GenConfig, seed: u64, count: usize) -> CliResult<Vec<ModuleSpecFile>> {
    if cfg.max_deg == 0 || cfg.max_lambda == 0 || cfg.max_summands == 0 {
        return Err(CliError::Usage(
            "degree, λ and summand bounds must be at least 1".into(),
        ));
    }
    let ctx = PadicContext::new(cfg.p, cfg.precision_exp)?;
    if ctx.p_pow(ctx.precision_exp() - 1) > i64::MAX as u128 {
        return Err(CliError::Usage(
            "p^N is too large for integer coefficients in description files".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut summands = Vec::new();
        let wanted = rng.gen_range(1..=cfg.max_summands);
        let mut budget = cfg.max_lambda;
        while summands.len() < wanted && budget > 0 {
            let d = rng.gen_range(1..=cfg.max_deg.min(budget));
            let e = if 2 * d <= budget && rng.gen_bool(0.25) {
                2
            } else {
                1
            };
            budget -= d * e as usize;
            summands.push(SummandSpec::Poly {
                coeffs: random_distinguished(&ctx, d, &mut rng),
                e,
            });
        }
        if cfg.allow_mu && rng.gen_bool(0.5) {
            summands.push(SummandSpec::Mu { m: 1 });
        }
        out.push(ModuleSpecFile {
            p: cfg.p,
            k: cfg.k,
            precision_exp: cfg.precision_exp,
            degree_cap: None,
            summands,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_modules() {
        let cfg = GenConfig::campaign();
        assert_eq!(
            generate(&cfg, 9, 10).unwrap(),
            generate(&cfg, 9, 10).unwrap()
        );
        assert_ne!(
            generate(&cfg, 9, 10).unwrap(),
            generate(&cfg, 10, 10).unwrap()
        );
    }

    #[test]
    fn degree_one_gives_linear_summands() {
        let cfg = GenConfig::simple(3, 1, 10, 1, false);
        for m in generate(&cfg, 1, 5).unwrap() {
            assert_eq!(m.summands.len(), 1);
            let SummandSpec::Poly { coeffs, e } = &m.summands[0] else {
                panic!("expected a polynomial summand");
            };
            assert_eq!((coeffs.len(), *e), (2, 1));
            assert_eq!(coeffs[0] % 3, 0);
            assert_ne!(coeffs[0] % 9, 0);
        }
    }

    #[test]
    fn campaign_respects_bounds() {
        for m in generate(&GenConfig::campaign(), 3, 50).unwrap() {
            let (lambda, mu) = m.expected_invariants();
            assert!((1..=3).contains(&lambda) && mu <= 1, "{}", m.summary());
        }
    }
}
