//! Module description files.
//!
//! A file describes one module:
//!
//! ```toml
//! p = 3
//! k = 1
//! precision_exp = 10
//!
//! [[summands]]
//! kind = "poly"
//! coeffs = [-3, 1]   # ascending, read mod p^N
//! e = 2
//!
//! [[summands]]
//! kind = "mu"
//! m = 1
//! ```
//!
//! or a batch of them as a `[[modules]]` array of such tables.

use std::fmt;
use std::ops::Range;

use iwalab_core::lambda::{LambdaPoly, TowerParams};
use iwalab_core::module::{ElementaryModule, PolySummand};
use iwalab_core::padic::PadicContext;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{CliError, CliResult};

fn one() -> u32 {
    1
}

fn is_one(e: &u32) -> bool {
    *e == 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SummandSpec {
    /// `Λ/(f^e)` with `f` given by ascending coefficients.
    Poly {
        coeffs: Vec<i64>,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        e: u32,
    },
    /// `Λ/(p^m)`.
    Mu { m: u32 },
}

impl fmt::Display for SummandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SummandSpec::Poly { coeffs, e } => {
                let c: Vec<String> = coeffs.iter().map(i64::to_string).collect();
                write!(f, "poly[{}]^{e}", c.join(","))
            }
            SummandSpec::Mu { m } => write!(f, "p^{m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpecFile {
    pub p: u64,
    pub k: u32,
    pub precision_exp: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<usize>,
    #[serde(default)]
    pub summands: Vec<SummandSpec>,
}

#[derive(Serialize)]
struct Batch<'a> {
    modules: &'a [ModuleSpecFile],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    p: u64,
    k: u32,
    precision_exp: u32,
    #[serde(default)]
    degree_cap: Option<usize>,
    #[serde(default)]
    summands: Vec<Spanned<SummandSpec>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBatch {
    modules: Vec<Spanned<RawSpec>>,
}

/// A parsed description together with where its parts sit in the source.
#[derive(Clone, Debug)]
pub struct LocatedSpec {
    pub spec: ModuleSpecFile,
    origin: String,
    line: usize,
    summand_lines: Vec<usize>,
}

fn line_of(text: &str, span: &Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

impl LocatedSpec {
    fn from_raw(raw: RawSpec, text: &str, origin: &str, line: usize) -> Self {
        let summand_lines = raw
            .summands
            .iter()
            .map(|s| line_of(text, &s.span()))
            .collect();
        LocatedSpec {
            spec: ModuleSpecFile {
                p: raw.p,
                k: raw.k,
                precision_exp: raw.precision_exp,
                degree_cap: raw.degree_cap,
                summands: raw.summands.into_iter().map(Spanned::into_inner).collect(),
            },
            origin: origin.to_string(),
            line,
            summand_lines,
        }
    }

    fn error_at(&self, line: usize, message: impl fmt::Display) -> CliError {
        CliError::parse(&format!("{}:{line}", self.origin), message.to_string())
    }

    /// Context and tower parameters, with errors pointing at the module.
    pub fn context(&self) -> CliResult<(PadicContext, TowerParams)> {
        let ctx = PadicContext::new(self.spec.p, self.spec.precision_exp)
            .map_err(|e| self.error_at(self.line, e))?;
        let params =
            TowerParams::new(self.spec.p, self.spec.k).map_err(|e| self.error_at(self.line, e))?;
        Ok((ctx, params))
    }

    /// The module, with errors pointing at the offending summand.
    pub fn build(&self) -> CliResult<ElementaryModule> {
        let (ctx, params) = self.context()?;
        let mut poly = Vec::new();
        let mut mu = Vec::new();
        for (s, &line) in self.spec.summands.iter().zip(&self.summand_lines) {
            match s {
                SummandSpec::Poly { coeffs, e } => {
                    let f = LambdaPoly::from_i64s(ctx, coeffs);
                    if f.degree().unwrap_or(0) == 0 {
                        return Err(self.error_at(line, "summand polynomial must have degree >= 1"));
                    }
                    if !f.is_distinguished().map_err(|e| self.error_at(line, e))? {
                        return Err(self.error_at(
                            line,
                            format!("{f} is not distinguished (monic, lower coefficients divisible by p)"),
                        ));
                    }
                    poly.push(PolySummand { f, e: *e });
                }
                SummandSpec::Mu { m } => mu.push(*m),
            }
        }
        ElementaryModule::new(ctx, params, poly, mu).map_err(|e| self.error_at(self.line, e))
    }
}

/// Parses a single description or a `[[modules]]` batch.
pub fn parse_specs(text: &str, origin: &str) -> CliResult<Vec<LocatedSpec>> {
    let table: toml::Table =
        toml::from_str(text).map_err(|e| CliError::parse(origin, e.to_string().trim_end()))?;
    if table.contains_key("modules") {
        let batch: RawBatch =
            toml::from_str(text).map_err(|e| CliError::parse(origin, e.to_string().trim_end()))?;
        Ok(batch
            .modules
            .into_iter()
            .map(|m| {
                let line = line_of(text, &m.span());
                LocatedSpec::from_raw(m.into_inner(), text, origin, line)
            })
            .collect())
    } else {
        let raw: RawSpec =
            toml::from_str(text).map_err(|e| CliError::parse(origin, e.to_string().trim_end()))?;
        Ok(vec![LocatedSpec::from_raw(raw, text, origin, 1)])
    }
}

/// Renders a batch in the format [`parse_specs`] reads.
pub fn render_batch(specs: &[ModuleSpecFile]) -> String {
    toml::to_string(&Batch { modules: specs }).expect("module descriptions serialize")
}

impl ModuleSpecFile {
    /// The module, for descriptions that did not come from a file.
    pub fn build(&self) -> CliResult<ElementaryModule> {
        LocatedSpec {
            spec: self.clone(),
            origin: "<module>".into(),
            line: 1,
            summand_lines: vec![1; self.summands.len()],
        }
        .build()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("module descriptions serialize")
    }

    /// Short one-line form for table cells.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self.summands.iter().map(ToString::to_string).collect();
        parts.join(" + ")
    }

    /// `(λ, μ)` read off the summands.
    pub fn expected_invariants(&self) -> (i64, i64) {
        let mut lambda = 0i64;
        let mut mu = 0i64;
        for s in &self.summands {
            match s {
                SummandSpec::Poly { coeffs, e } => {
                    lambda += (coeffs.len() as i64 - 1) * i64::from(*e);
                }
                SummandSpec::Mu { m } => mu += i64::from(*m),
            }
        }
        (lambda, mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE: &str = "p = 3\nk = 1\nprecision_exp = 10\n\n[[summands]]\nkind = \"poly\"\ncoeffs = [-3, 1]\n\n[[summands]]\nkind = \"mu\"\nm = 1\n";

    #[test]
    fn single_module_round_trip() {
        let specs = parse_specs(SINGLE, "x.toml").unwrap();
        assert_eq!(specs.len(), 1);
        let m = specs[0].build().unwrap();
        assert_eq!((m.lambda_invariant(), m.mu_invariant()), (1, 1));
        let again = parse_specs(&specs[0].spec.to_toml(), "y").unwrap();
        assert_eq!(again[0].spec, specs[0].spec);
    }

    #[test]
    fn batch_round_trip() {
        let spec = parse_specs(SINGLE, "x").unwrap().remove(0).spec;
        let text = render_batch(&[spec.clone(), spec.clone()]);
        let back = parse_specs(&text, "b").unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].spec, spec);
    }

    #[test]
    fn errors_carry_positions() {
        let bad = SINGLE.replace("[-3, 1]", "[-2, 1]");
        let err = parse_specs(&bad, "x.toml").unwrap()[0].build().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().starts_with("x.toml:5:"), "{err}");

        let err = parse_specs("p = 3\nk = \"one\"\n", "y.toml").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");

        let err = parse_specs(&SINGLE.replace("m = 1", "m = 1\nextra = 2"), "z").unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }
}
