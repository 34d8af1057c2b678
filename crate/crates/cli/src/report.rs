//! Tab-separated reports with a verdict column.

use std::fmt;

use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    /// The computation ran into the precision limit, so the row proves
    /// nothing either way.
    Flagged,
    Fail,
}

impl Verdict {
    /// `Pass` or `Fail`, downgraded to `Flagged` on unresolved levels.
    pub fn judge(passed: bool, unresolved: bool) -> Self {
        match (passed, unresolved) {
            (_, true) => Verdict::Flagged,
            (true, false) => Verdict::Pass,
            (false, false) => Verdict::Fail,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Flagged => "flagged",
            Verdict::Fail => "fail",
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub command: String,
    pub input_digest: Option<String>,
    pub seed: Option<u64>,
    /// Extra `# key value` lines.
    pub meta: Vec<(String, String)>,
    /// Column names, without the verdict column.
    pub columns: Vec<String>,
    pub rows: Vec<(Vec<String>, Verdict)>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, columns: &[&str]) -> Self {
        RunReport {
            command: command.into(),
            input_digest: None,
            seed: None,
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<String>, verdict: Verdict) {
        assert_eq!(cells.len(), self.columns.len(), "row width");
        self.rows.push((cells, verdict));
    }

    /// Worst verdict over all rows; an empty report passes.
    pub fn overall(&self) -> Verdict {
        self.rows
            .iter()
            .map(|(_, v)| *v)
            .max()
            .unwrap_or(Verdict::Pass)
    }

    /// 1 on any failure, 3 on flagged rows under `strict`, 0 otherwise.
    pub fn exit_code(&self, strict: bool) -> i32 {
        match self.overall() {
            Verdict::Fail => 1,
            Verdict::Flagged if strict => 3,
            _ => 0,
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("# command\t{}\n", self.command);
        if let Some(d) = &self.input_digest {
            out.push_str(&format!("# input-sha256\t{d}\n"));
        }
        if let Some(s) = self.seed {
            out.push_str(&format!("# seed\t{s}\n"));
        }
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}\t{v}\n"));
        }
        out.push_str(&self.columns.join("\t"));
        out.push_str("\tverdict\n");
        for (cells, v) in &self.rows {
            for c in cells {
                out.push_str(&c.replace(['\t', '\n'], " "));
                out.push('\t');
            }
            out.push_str(&format!("{v}\n"));
        }
        out.push_str(&format!("# overall\t{}\n", self.overall()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_and_exit_codes() {
        let mut r = RunReport::new("t", &["a"]);
        assert_eq!(r.exit_code(true), 0);
        r.push(vec!["x".into()], Verdict::Flagged);
        assert_eq!((r.exit_code(false), r.exit_code(true)), (0, 3));
        r.push(vec!["y".into()], Verdict::Fail);
        assert_eq!(r.exit_code(false), 1);
        let text = r.render();
        assert!(text.contains("a\tverdict\nx\tflagged\ny\tfail\n"), "{text}");
    }

    #[test]
    fn digest_is_hex() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
