//! The subcommands, as functions from parsed options to reports.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use iwalab_core::lambda::{weierstrass_prepare, Involution, LambdaTrunc, TowerParams};
use iwalab_core::module::{
    check_lemma_ab, check_prop_sf, check_semistab, finite_level, order_profile, property_f_check,
    random_saturated_submodule, split_t_part, transition_levels, verify_circ_levels,
    ElementaryModule, FiniteLevel, Subgroup, ZFit,
};
use iwalab_core::padic::PadicContext;
use iwalab_core::pairing::{
    build_pairing, check_order_reversal, check_projective_compat, check_reflection, dual_base,
    left_radical,
};
use iwalab_core::tower::{
    detect_stabilization, rank_freeze_check, GrowthEntry, GrowthSeries, InvariantEstimate,
    RankFreeze, StabilizationStatus,
};
use iwalab_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::gen::{generate, GenConfig};
use crate::report::{sha256_hex, RunReport, Verdict};
use crate::spec::{parse_specs, render_batch, LocatedSpec};

/// A file's contents and the name used in messages.
#[derive(Clone, Debug)]
pub struct Input {
    pub origin: String,
    pub text: String,
}

impl Input {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Input {
            origin: path.display().to_string(),
            text,
        })
    }

    pub fn from_text(origin: &str, text: &str) -> Self {
        Input {
            origin: origin.to_string(),
            text: text.to_string(),
        }
    }

    fn digest(&self) -> String {
        sha256_hex(self.text.as_bytes())
    }

    fn specs(&self) -> CliResult<Vec<LocatedSpec>> {
        let specs = parse_specs(&self.text, &self.origin)?;
        if specs.is_empty() {
            return Err(CliError::parse(&self.origin, "no modules in file"));
        }
        Ok(specs)
    }
}

/// An inclusive range of levels written `a..b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelRange {
    pub from: u32,
    pub to: u32,
}

impl LevelRange {
    pub fn new(from: u32, to: u32) -> CliResult<Self> {
        if from > to {
            return Err(CliError::Usage(format!(
                "level range {from}..{to} is empty"
            )));
        }
        Ok(LevelRange { from, to })
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u32> {
        self.from..=self.to
    }

    fn len(&self) -> usize {
        (self.to - self.from + 1) as usize
    }
}

impl FromStr for LevelRange {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || CliError::Usage(format!("expected a level range like 1..4, got {s:?}"));
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let b = b.strip_prefix('=').unwrap_or(b);
        LevelRange::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.from, self.to)
    }
}

/// Coefficients written `3,4,1` or `[3, 4, 1]`.
pub fn parse_coeff_list(s: &str) -> CliResult<Vec<i64>> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let coeffs: Result<Vec<i64>, _> = inner
        .split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(str::parse)
        .collect();
    match coeffs {
        Ok(c) if !c.is_empty() => Ok(c),
        _ => Err(CliError::Usage(format!(
            "expected comma-separated integer coefficients, got {s:?}"
        ))),
    }
}

fn fmt_vec(ctx: &PadicContext, v: &[u128]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| ctx.centered(x).to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn fmt_factors(ctx: &PadicContext, exps: &[u32]) -> String {
    if exps.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = exps.iter().map(|&a| ctx.p_pow(a).to_string()).collect();
    parts.join(",")
}

fn fmt_exps(exps: &[u32]) -> String {
    let parts: Vec<String> = exps.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn context_meta(report: &mut RunReport, ctx: &PadicContext, params: &TowerParams) {
    report.meta.push(("p".into(), ctx.p().to_string()));
    report.meta.push(("k".into(), params.k.to_string()));
    report
        .meta
        .push(("precision_exp".into(), ctx.precision_exp().to_string()));
}

pub fn prepare(input: &Input, poly: &str) -> CliResult<RunReport> {
    let specs = input.specs()?;
    let spec = &specs[0];
    let (ctx, params) = spec.context()?;
    let coeffs = parse_coeff_list(poly)?;
    let cap = spec.spec.degree_cap.unwrap_or(coeffs.len()).max(1);
    let f = LambdaTrunc::from_i64s(ctx, &coeffs, cap);
    let w = weierstrass_prepare(&f)?;
    let residual = f.sub(&w.recombine())?;
    let distinguished = w.distinguished.is_distinguished()?;

    let mut report = RunReport::new(
        format!("prepare --poly {}", fmt_coeffs(&coeffs)),
        &["mu", "lambda", "distinguished", "unit", "residual"],
    );
    report.input_digest = Some(input.digest());
    context_meta(&mut report, &ctx, &params);
    report.meta.push(("degree_cap".into(), cap.to_string()));
    report.push(
        vec![
            w.mu.to_string(),
            w.lambda.to_string(),
            w.distinguished.to_string(),
            w.unit.to_string(),
            residual.to_string(),
        ],
        Verdict::judge(residual.is_zero() && distinguished, false),
    );
    Ok(report)
}

fn fmt_coeffs(c: &[i64]) -> String {
    let parts: Vec<String> = c.iter().map(i64::to_string).collect();
    parts.join(",")
}

pub fn levels(input: &Input, range: LevelRange) -> CliResult<RunReport> {
    let specs = input.specs()?;
    let mut report = RunReport::new(
        format!("levels --from {} --to {}", range.from, range.to),
        &[
            "module",
            "level",
            "invariant_factors",
            "size_exp",
            "p_rank",
            "flags",
        ],
    );
    report.input_digest = Some(input.digest());
    for (idx, spec) in specs.iter().enumerate() {
        let m = spec.build()?;
        if idx == 0 {
            context_meta(&mut report, m.ctx(), m.params());
        }
        for n in range.iter() {
            let lv = finite_level(&m, n);
            report.push(
                vec![
                    idx.to_string(),
                    n.to_string(),
                    fmt_factors(m.ctx(), &lv.invariant_factors()),
                    lv.size_exp().to_string(),
                    lv.p_rank().to_string(),
                    if lv.unresolved() { "unresolved" } else { "ok" }.into(),
                ],
                Verdict::judge(true, lv.unresolved()),
            );
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Norm and lift identities between levels.
    Circ,
    /// Growth law and rank freeze along the levels.
    Fukuda,
    /// Lifts and norms between consecutive levels of equal p-rank.
    Ab,
    /// Transitions, stable-regime lifts and order profiles.
    Sf,
    /// Splitting off the T-socle.
    Tpart,
    /// Property F on saturated T-stable subgroups.
    Propf,
    /// Kummer pairing with the twisted dual.
    Pairing,
    /// Order reversal on a single summand Λ/(f^k).
    Reversal,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Circ => "circ",
            Suite::Fukuda => "fukuda",
            Suite::Ab => "ab",
            Suite::Sf => "sf",
            Suite::Tpart => "tpart",
            Suite::Propf => "propf",
            Suite::Pairing => "pairing",
            Suite::Reversal => "reversal",
        }
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        <Suite as clap::ValueEnum>::from_str(s, false)
            .map_err(|_| CliError::Usage(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub levels: LevelRange,
    pub seed: u64,
    /// For `propf`: also test `A = p^c·M`, which violates property F.
    pub inject_counterexample: bool,
}

/// Per-module state shared by the suites.
struct Run<'a> {
    idx: usize,
    m: &'a ElementaryModule,
    levels: Vec<Arc<FiniteLevel>>,
    range: LevelRange,
    rng: ChaCha8Rng,
    report: &'a mut RunReport,
}

impl Run<'_> {
    fn level(&self, n: u32) -> &Arc<FiniteLevel> {
        &self.levels[(n - self.range.from) as usize]
    }

    fn row(&mut self, level: String, check: &str, detail: String, verdict: Verdict) {
        self.report.push(
            vec![self.idx.to_string(), level, check.to_string(), detail],
            verdict,
        );
    }

    fn ctx(&self) -> PadicContext {
        *self.m.ctx()
    }

    fn unresolved(&self, ns: &[u32]) -> bool {
        ns.iter().any(|&n| self.level(n).unresolved())
    }

    fn need_levels(&self, suite: Suite, count: usize) -> CliResult<()> {
        if self.range.len() < count {
            return Err(CliError::Usage(format!(
                "suite {} needs at least {count} levels",
                suite.name()
            )));
        }
        Ok(())
    }

    fn estimate(&self) -> Result<InvariantEstimate, Error> {
        let series = GrowthSeries::new(
            self.levels
                .iter()
                .map(|lv| GrowthEntry {
                    level: lv.level(),
                    size_exp: lv.size_exp(),
                    p_rank: lv.p_rank() as u32,
                    unresolved: lv.unresolved(),
                })
                .collect(),
        )?;
        detect_stabilization(&series, self.m.params())
    }
}

pub fn verify(input: &Input, opts: &VerifyOptions) -> CliResult<RunReport> {
    let specs = input.specs()?;
    let mut command = format!(
        "verify --suite {} --levels {} --seed {}",
        opts.suite.name(),
        opts.levels,
        opts.seed
    );
    if opts.inject_counterexample {
        command.push_str(" --inject-counterexample");
    }
    let mut report = RunReport::new(command, &["module", "level", "check", "detail"]);
    report.input_digest = Some(input.digest());
    report.seed = Some(opts.seed);
    for (idx, spec) in specs.iter().enumerate() {
        let m = spec.build()?;
        if idx == 0 {
            context_meta(&mut report, m.ctx(), m.params());
        }
        let levels = opts
            .levels
            .iter()
            .map(|n| Arc::new(finite_level(&m, n)))
            .collect();
        let mut run = Run {
            idx,
            m: &m,
            levels,
            range: opts.levels,
            rng: ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(idx as u64)),
            report: &mut report,
        };
        match opts.suite {
            Suite::Circ => suite_circ(&mut run)?,
            Suite::Fukuda => suite_fukuda(&mut run)?,
            Suite::Ab => suite_ab(&mut run)?,
            Suite::Sf => suite_sf(&mut run)?,
            Suite::Tpart => suite_tpart(&mut run),
            Suite::Propf => suite_propf(&mut run, opts.inject_counterexample)?,
            Suite::Pairing => suite_pairing(&mut run)?,
            Suite::Reversal => suite_reversal(&mut run)?,
        }
    }
    Ok(report)
}

fn suite_circ(run: &mut Run) -> CliResult<()> {
    run.need_levels(Suite::Circ, 2)?;
    let (a, b) = (run.range.from, run.range.to);
    let mut pairs: Vec<(u32, u32)> = (a..b).map(|n| (n, n + 1)).collect();
    if b > a + 1 {
        pairs.push((a, b));
    }
    for (n, up) in pairs {
        let r = verify_circ_levels(run.m, run.level(n), run.level(up))?;
        let detail = format!(
            "N∘ι = p^{}: {}; ι∘N = ν: {}",
            up - n,
            ok(r.norm_after_lift),
            ok(r.lift_after_norm)
        );
        let v = Verdict::judge(r.passed(), run.unresolved(&[n, up]));
        run.row(format!("{n}->{up}"), "circ", detail, v);
    }
    Ok(())
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

fn fmt_estimate(est: &InvariantEstimate) -> String {
    format!(
        "n0={} lambda={} mu={} nu={} status={}",
        est.n0,
        est.lambda,
        est.mu,
        est.nu,
        status_name(est.status)
    )
}

fn status_name(s: StabilizationStatus) -> &'static str {
    match s {
        StabilizationStatus::Stabilized => "stabilized",
        StabilizationStatus::SizeFrozen => "size-frozen",
        StabilizationStatus::Undetermined => "undetermined",
    }
}

fn suite_fukuda(run: &mut Run) -> CliResult<()> {
    run.need_levels(Suite::Fukuda, 3)?;
    let all: Vec<u32> = run.range.iter().collect();
    let unresolved = run.unresolved(&all);
    let expected = (
        run.m.lambda_invariant() as i64,
        i64::from(run.m.mu_invariant()),
    );
    let label = run.range.to_string();
    match run.estimate() {
        Ok(est) => {
            let matches =
                est.status != StabilizationStatus::Undetermined && (est.lambda, est.mu) == expected;
            let detail = format!(
                "{}; expected lambda={} mu={}",
                fmt_estimate(&est),
                expected.0,
                expected.1
            );
            run.row(
                label.clone(),
                "growth-law",
                detail,
                Verdict::judge(matches, unresolved),
            );
        }
        Err(Error::InconsistentSeries(msg)) => {
            run.row(label.clone(), "growth-law", msg, Verdict::Fail);
        }
        Err(e) => return Err(e.into()),
    }
    let series = GrowthSeries::of_module(run.m, run.range.iter())?;
    let freeze = rank_freeze_check(&series)?;
    let detail = match freeze {
        RankFreeze::Frozen { from, rank } => format!("p-rank {rank} from level {from} on"),
        RankFreeze::NoFreezeObserved => "no two consecutive p-ranks agree".into(),
        RankFreeze::Violated { from, at } => {
            format!("p-ranks agreed at level {from} but changed at {at}")
        }
    };
    run.row(
        label,
        "rank-freeze",
        detail,
        Verdict::judge(freeze.holds(), unresolved),
    );
    Ok(())
}

fn suite_ab(run: &mut Run) -> CliResult<()> {
    run.need_levels(Suite::Ab, 2)?;
    let ctx = run.ctx();
    for n in run.range.from..run.range.to {
        let (lower, upper) = (run.level(n).clone(), run.level(n + 1).clone());
        let r = check_lemma_ab(run.m, &lower, &upper, 100, &mut run.rng)?;
        let detail = if r.applies() {
            let mut d = format!(
                "lift injective: {}; lift image = p·M: {}; order violations {}/{}",
                ok(r.lift_injective),
                ok(r.image_is_p_multiple),
                r.order_violations,
                r.samples
            );
            if let Some(w) = &r.witness {
                d.push_str(&format!("; witness {}", fmt_vec(&ctx, w)));
            }
            d
        } else {
            format!("hypotheses unmet: {}", r.unmet.join(", "))
        };
        let v = Verdict::judge(r.passed(), run.unresolved(&[n, n + 1]));
        run.row(format!("{n}->{}", n + 1), "lemma-ab", detail, v);
    }
    Ok(())
}

/// Levels after the stabilization index of a `μ = 0` module; empty when
/// the growth law could not be fitted.
fn stable_from(run: &Run) -> Option<u32> {
    if run.m.mu_invariant() != 0 || run.range.len() < 3 {
        return None;
    }
    match run.estimate() {
        Ok(est) if est.status != StabilizationStatus::Undetermined => Some(est.n0 + 1),
        _ => None,
    }
}

fn suite_sf(run: &mut Run) -> CliResult<()> {
    run.need_levels(Suite::Sf, 2)?;
    let ctx = run.ctx();
    let stable = stable_from(run);
    for n in run.range.from..run.range.to {
        let (lower, upper) = (run.level(n).clone(), run.level(n + 1).clone());
        let unresolved = run.unresolved(&[n, n + 1]);
        let t = transition_levels(run.m, &lower, &upper)?;
        let sf = check_prop_sf(run.m, &lower, &upper)?;
        let mut detail = format!(
            "k(n)={} T-exponent={} class={} C_n={}",
            t.growth_factor,
            t.t_exponent,
            t.classification,
            fmt_exps(&t.quotient_invariant_factors)
        );
        let applies = stable.is_some_and(|s| n >= s);
        let passed = if applies {
            detail.push_str(&format!(
                "; stable regime: lift injective {}, ω_n M ⊆ ι(M_n[p]) {}",
                ok(sf.lift_injective),
                ok(sf.omega_in_lifted_torsion)
            ));
            if let Some(w) = &sf.witness {
                detail.push_str(&format!("; witness {}", fmt_vec(&ctx, w)));
            }
            t.growth_factor == 1 && sf.passed()
        } else {
            detail.push_str("; outside the stable regime");
            true
        };
        let label = format!("{n}->{}", n + 1);
        run.row(
            label.clone(),
            "transition",
            detail,
            Verdict::judge(passed, unresolved),
        );

        let s = check_semistab(run.m, &lower, &upper)?;
        if s.applies() {
            run.row(
                label,
                "semistable",
                format!("p·M_(n+1) = ι(M_n): {}", ok(s.p_multiple_is_lift)),
                Verdict::judge(s.passed(), unresolved),
            );
        }
    }

    if let Some(s) = stable.filter(|&s| s <= run.range.to) {
        let top = run.level(run.range.to).clone();
        let mut fitted = 0;
        let mut witness = None;
        let samples = 20;
        for _ in 0..samples {
            let x = top.random_element(&mut run.rng);
            let prof = order_profile(run.m, &top, &x, s..=run.range.to)?;
            if matches!(prof.fit, ZFit::Finite(_) | ZFit::NegInfinity) {
                fitted += 1;
            } else if witness.is_none() {
                witness = Some(x);
            }
        }
        let mut detail = format!(
            "{fitted}/{samples} sampled elements fit ord(x_n) = p^(n+1+z) on levels {s}..{}",
            run.range.to
        );
        if let Some(w) = &witness {
            detail.push_str(&format!("; witness {}", fmt_vec(&ctx, w)));
        }
        let all: Vec<u32> = (s..=run.range.to).collect();
        let v = Verdict::judge(fitted == samples, run.unresolved(&all));
        run.row(format!("{s}..{}", run.range.to), "order-profile", detail, v);
    }
    Ok(())
}

fn suite_tpart(run: &mut Run) {
    for n in run.range.iter() {
        let lv = run.level(n).clone();
        let s = split_t_part(run.m, &lv);
        let detail = format!(
            "M[T]={} complement={} direct sum: {}",
            fmt_exps(&s.socle_t.invariants()),
            fmt_exps(&s.complement.invariants()),
            ok(s.verified)
        );
        run.row(
            n.to_string(),
            "t-split",
            detail,
            Verdict::judge(s.verified, lv.unresolved()),
        );
    }
}

fn suite_propf(run: &mut Run, inject: bool) -> CliResult<()> {
    run.need_levels(Suite::Propf, 2)?;
    let ctx = run.ctx();
    let h = run.range.to;
    let top = run.level(h).clone();
    for n in run.range.from..h {
        let unresolved = run.unresolved(&[n, h]);
        let samples = 5;
        let mut failures = 0;
        let mut witness = None;
        for _ in 0..samples {
            let a = random_saturated_submodule(run.m, &top, &mut run.rng);
            let r = property_f_check(run.m, &a, n)?;
            if !r.passed {
                failures += 1;
                witness = witness.or(r.witness);
            }
        }
        let mut detail = format!(
            "horizon {h}: {}/{samples} saturated T-stable subgroups satisfy ker N ∩ A = ω_n A",
            samples - failures
        );
        if let Some(w) = &witness {
            detail.push_str(&format!("; witness {}", fmt_vec(&ctx, w)));
        }
        run.row(
            n.to_string(),
            "propf-saturated",
            detail,
            Verdict::judge(failures == 0, unresolved),
        );

        if inject {
            let c = run.level(n).exponent();
            let a = Subgroup::full(top.clone()).scaled(ctx.p_pow_res(c));
            let r = property_f_check(run.m, &a, n)?;
            let mut detail = format!(
                "A = p^{c}·M_{h}: ker N ∩ A = {} vs ω_n A = {}",
                fmt_exps(&r.kernel_part),
                fmt_exps(&r.omega_part)
            );
            if let Some(w) = &r.witness {
                detail.push_str(&format!("; witness {}", fmt_vec(&ctx, w)));
            }
            run.row(
                n.to_string(),
                "propf-injected",
                detail,
                Verdict::judge(r.passed, unresolved),
            );
        }
    }
    Ok(())
}

/// Largest level size that is scanned element by element.
const EXHAUSTIVE_LIMIT: u128 = 1 << 20;

fn small(ctx: &PadicContext, size_exp: u32, limit: u128) -> bool {
    u128::from(ctx.p())
        .checked_pow(size_exp)
        .is_some_and(|s| s <= limit)
}

fn random_lambda<R: Rng>(ctx: &PadicContext, rng: &mut R) -> LambdaTrunc {
    let coeffs = (0..4).map(|_| rng.gen_range(0..ctx.modulus())).collect();
    LambdaTrunc::new(*ctx, coeffs, 4)
}

fn suite_pairing(run: &mut Run) -> CliResult<()> {
    let ctx = run.ctx();
    let inv = Involution::standard(&ctx, run.m.params());
    let mut built = Vec::new();
    for n in run.range.iter() {
        let lv = run.level(n).clone();
        if lv.unresolved() {
            run.row(
                n.to_string(),
                "pairing",
                "level has an unresolved invariant factor".into(),
                Verdict::Flagged,
            );
            built.push(None);
            continue;
        }
        let (dual, table) = build_pairing(&lv, inv)?;
        let exps = lv.invariant_factors();
        let induced = table.induced_invariants();
        let mut nondeg = induced == exps;
        let mut how = "invariant factors of the pairing matrix";
        if small(&ctx, lv.size_exp(), ctx.p_pow(6).min(EXHAUSTIVE_LIMIT)) {
            nondeg &= left_radical(&dual, &table).is_empty();
            how = "invariant factors and exhaustive radical scan";
        }
        run.row(
            n.to_string(),
            "nondegenerate",
            format!("{how}: {} vs {}", fmt_exps(&induced), fmt_exps(&exps)),
            Verdict::judge(nondeg, false),
        );

        let basis = dual.group().full().columns();
        let cert = dual_base(&dual, &table, &basis)?;
        let orders: Vec<u32> = dual.group().exps().to_vec();
        run.row(
            n.to_string(),
            "dual-base",
            format!("q = p^{}", cert.q_exp),
            Verdict::judge(cert.is_valid(&ctx, &orders), false),
        );

        let mut violations = 0;
        let mut witness = None;
        let count = 100;
        for _ in 0..count {
            let lambda = random_lambda(&ctx, &mut run.rng);
            let r = check_reflection(&dual, &table, &lambda, 4, &mut run.rng);
            if !r.passed() {
                violations += 1;
                witness = witness.or(r.witness.map(|(a, b)| (lambda.to_string(), a, b)));
            }
        }
        let mut detail = format!(
            "⟨λa, r⟩ = ⟨a, λ*r⟩ for {}/{count} random λ",
            count - violations
        );
        if let Some((l, a, r)) = &witness {
            detail.push_str(&format!(
                "; witness λ = {l}, a = {}, r = {}",
                fmt_vec(&ctx, &lv.from_group(a)),
                fmt_vec(&ctx, r)
            ));
        }
        run.row(
            n.to_string(),
            "reflection",
            detail,
            Verdict::judge(violations == 0, false),
        );
        built.push(Some((dual, table)));
    }

    for n in run.range.from..run.range.to {
        let Some((dual, table)) = &built[(n + 1 - run.range.from) as usize] else {
            continue;
        };
        let r =
            check_projective_compat(run.m, n, dual, table, EXHAUSTIVE_LIMIT, 200, &mut run.rng)?;
        let mut detail = format!(
            "⟨ιN x, r⟩ = p^{}⟨x, r⟩ on {} pairs, {} violations",
            r.m - r.n,
            r.checked,
            r.violations
        );
        if let Some((x, c)) = &r.witness {
            detail.push_str(&format!(
                "; witness x = {}, r = {}",
                fmt_vec(&ctx, &dual.base().from_group(x)),
                fmt_vec(&ctx, c)
            ));
        }
        run.row(
            format!("{n}->{}", n + 1),
            "projective-compat",
            detail,
            Verdict::judge(r.passed(), false),
        );
    }
    Ok(())
}

fn suite_reversal(run: &mut Run) -> CliResult<()> {
    let m = run.m;
    let ([s], []) = (m.poly_summands(), m.mu_summands()) else {
        return Err(CliError::Usage(
            "suite reversal needs a module with exactly one polynomial summand".into(),
        ));
    };
    let ctx = run.ctx();
    let inv = Involution::standard(&ctx, m.params());
    for n in run.range.iter() {
        let lv = run.level(n).clone();
        if lv.unresolved() {
            run.row(
                n.to_string(),
                "order-reversal",
                "level has an unresolved invariant factor".into(),
                Verdict::Flagged,
            );
            continue;
        }
        if !small(&ctx, lv.size_exp(), EXHAUSTIVE_LIMIT) {
            return Err(CliError::Usage(format!(
                "level {n} has p^{} elements, too many for an exhaustive scan",
                lv.size_exp()
            )));
        }
        let (dual, table) = build_pairing(&lv, inv)?;
        let r = check_order_reversal(&dual, &table, &s.f, s.e)?;
        let from = r
            .kernel_reading
            .vanishing_from()
            .map_or("none".to_string(), |v| v.to_string());
        let mut detail = format!(
            "k={}: kernels pair to zero for j+l <= {}, from j+l >= {from}; claimed threshold j+l > {}: {}; image reading: {}; orders |A/f^i A| = |f*^(k-i) R|: {}",
            r.power,
            r.kernel_reading.vanishing_up_to(),
            r.power + 1,
            ok(r.claim_holds()),
            ok(r.vacuous || r.image_reading.matches_claim(r.power)),
            ok(r.orders_match())
        );
        if let Some((a, c)) = &r.boundary_witness {
            detail.push_str(&format!(
                "; nonzero at j+l = k+1: a = {}, r = {}",
                fmt_vec(&ctx, &lv.from_group(a)),
                fmt_vec(&ctx, c)
            ));
        }
        run.row(
            n.to_string(),
            "order-reversal",
            detail,
            Verdict::judge(r.claim_holds() && r.orders_match(), false),
        );
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenOptions {
    pub seed: u64,
    pub count: usize,
    pub config: GenConfig,
}

/// A `[[modules]]` batch, preceded by a comment recording the options.
pub fn gen(opts: &GenOptions) -> CliResult<String> {
    let specs = generate(&opts.config, opts.seed, opts.count)?;
    let c = &opts.config;
    Ok(format!(
        "# iwalab gen --seed {} --count {} --max-deg {}{} (p = {}, k = {}, N = {})\n{}",
        opts.seed,
        opts.count,
        c.max_deg,
        if c.allow_mu { " --allow-mu" } else { "" },
        c.p,
        c.k,
        c.precision_exp,
        render_batch(&specs)
    ))
}

/// Reads a growth series from TSV with columns `level`, `size_exp`,
/// `p_rank` and optionally `flags`, as written by `levels`.
pub fn parse_series(input: &Input) -> CliResult<(GrowthSeries, Option<u64>, Option<u32>)> {
    let origin = &input.origin;
    let mut p = None;
    let mut k = None;
    let mut header: Option<Vec<&str>> = None;
    let mut entries = Vec::new();
    let mut module: Option<String> = None;
    for (i, line) in input.text.lines().enumerate() {
        let at = |msg: String| CliError::parse(&format!("{origin}:{}", i + 1), msg);
        if let Some(comment) = line.strip_prefix('#') {
            let mut parts = comment.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some("p"), Some(v)) => {
                    p = Some(v.parse().map_err(|_| at(format!("bad prime {v:?}")))?)
                }
                (Some("k"), Some(v)) => {
                    k = Some(v.parse().map_err(|_| at(format!("bad offset {v:?}")))?)
                }
                _ => {}
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
        let Some(cols) = &header else {
            header = Some(cells);
            continue;
        };
        if cells.len() != cols.len() {
            return Err(at(format!(
                "expected {} fields, found {}",
                cols.len(),
                cells.len()
            )));
        }
        let get = |name: &str| cols.iter().position(|c| *c == name).map(|j| cells[j]);
        let num = |name: &str| -> CliResult<u32> {
            let v = get(name).ok_or_else(|| at(format!("missing column {name}")))?;
            v.parse().map_err(|_| {
                at(format!(
                    "{name}: expected a non-negative integer, got {v:?}"
                ))
            })
        };
        if let Some(mcell) = get("module") {
            match &module {
                Some(prev) if prev != mcell => {
                    return Err(at("the series holds more than one module".into()))
                }
                _ => module = Some(mcell.to_string()),
            }
        }
        let unresolved = get("flags").is_some_and(|f| f.contains("unresolved"))
            || get("verdict") == Some("flagged");
        entries.push(GrowthEntry {
            level: num("level")?,
            size_exp: num("size_exp")?,
            p_rank: num("p_rank")?,
            unresolved,
        });
    }
    if header.is_none() {
        return Err(CliError::parse(origin, "empty series"));
    }
    let series = GrowthSeries::new(entries).map_err(|e| CliError::parse(origin, e.to_string()))?;
    Ok((series, p, k))
}

pub fn fukuda(input: &Input, p: Option<u64>, k: Option<u32>) -> CliResult<RunReport> {
    let (series, file_p, file_k) = parse_series(input)?;
    let p = p.or(file_p).ok_or_else(|| {
        CliError::Usage("the prime is neither in the series header nor given with --p".into())
    })?;
    let params = TowerParams::new(p, k.or(file_k).unwrap_or(1))?;
    let mut report = RunReport::new(
        "fukuda",
        &["n0", "lambda", "mu", "nu", "status", "rank_freeze"],
    );
    report.input_digest = Some(input.digest());
    report.meta.push(("p".into(), p.to_string()));
    report.meta.push(("k".into(), params.k.to_string()));
    let unresolved = series.entries().iter().any(|e| e.unresolved);
    let freeze = rank_freeze_check(&series)?;
    let freeze_cell = match freeze {
        RankFreeze::Frozen { from, rank } => format!("frozen rank={rank} from={from}"),
        RankFreeze::NoFreezeObserved => "none".into(),
        RankFreeze::Violated { from, at } => format!("violated from={from} at={at}"),
    };
    match detect_stabilization(&series, &params) {
        Ok(est) => {
            let v = if !freeze.holds() {
                Verdict::Fail
            } else {
                Verdict::judge(
                    true,
                    unresolved || est.status == StabilizationStatus::Undetermined,
                )
            };
            report.push(
                vec![
                    est.n0.to_string(),
                    est.lambda.to_string(),
                    est.mu.to_string(),
                    est.nu.to_string(),
                    status_name(est.status).into(),
                    freeze_cell,
                ],
                v,
            );
        }
        Err(Error::InconsistentSeries(msg)) => {
            report.meta.push(("error".into(), msg));
            report.push(
                vec![
                    "-".into(),
                    "-".into(),
                    "-".into(),
                    "-".into(),
                    "inconsistent".into(),
                    freeze_cell,
                ],
                Verdict::Fail,
            );
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CampaignOptions {
    pub seed: u64,
    pub count: usize,
    pub levels: LevelRange,
}

/// Generates a corpus and fits the growth law of every module in it.
pub fn campaign(opts: &CampaignOptions) -> CliResult<RunReport> {
    let cfg = GenConfig::campaign();
    let specs = generate(&cfg, opts.seed, opts.count)?;
    let mut report = RunReport::new(
        format!(
            "campaign --seed {} --count {} --levels {}",
            opts.seed, opts.count, opts.levels
        ),
        &[
            "module",
            "summands",
            "expected_lambda",
            "expected_mu",
            "sizes",
            "p_ranks",
            "n0",
            "lambda",
            "mu",
            "nu",
            "status",
        ],
    );
    report.seed = Some(opts.seed);
    report.meta.push(("p".into(), cfg.p.to_string()));
    report.meta.push(("k".into(), cfg.k.to_string()));
    report
        .meta
        .push(("precision_exp".into(), cfg.precision_exp.to_string()));
    report.meta.push((
        "corpus-sha256".into(),
        sha256_hex(render_batch(&specs).as_bytes()),
    ));
    for (idx, spec) in specs.iter().enumerate() {
        let m = spec.build()?;
        let series = GrowthSeries::of_module(&m, opts.levels.iter())?;
        let join = |f: &dyn Fn(&GrowthEntry) -> u32| {
            let v: Vec<String> = series.entries().iter().map(|e| f(e).to_string()).collect();
            v.join(",")
        };
        let (el, em) = spec.expected_invariants();
        let unresolved = series.entries().iter().any(|e| e.unresolved);
        let mut cells = vec![
            idx.to_string(),
            spec.summary(),
            el.to_string(),
            em.to_string(),
            join(&|e| e.size_exp),
            join(&|e| e.p_rank),
        ];
        let verdict = match detect_stabilization(&series, m.params()) {
            Ok(est) => {
                cells.extend([
                    est.n0.to_string(),
                    est.lambda.to_string(),
                    est.mu.to_string(),
                    est.nu.to_string(),
                    status_name(est.status).to_string(),
                ]);
                Verdict::judge(
                    est.status != StabilizationStatus::Undetermined
                        && (est.lambda, est.mu) == (el, em),
                    unresolved,
                )
            }
            Err(e) => {
                cells.extend(["-", "-", "-", "-"].map(String::from));
                cells.push(e.to_string());
                Verdict::judge(false, unresolved)
            }
        };
        report.push(cells, verdict);
    }
    Ok(report)
}
