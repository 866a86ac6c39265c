//! Pass/fail bookkeeping shared by every verification suite.

use serde::Serialize;

/// How many violation descriptions a check keeps.
pub const MAX_EXAMPLES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Every candidate failed a precondition; nothing was asserted.
    Inconclusive,
    /// A negative control that failed the way it is supposed to.
    ExpectedFail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::ExpectedFail => "expected-fail",
        }
    }

    pub fn is_ok(self) -> bool {
        self != Status::Fail
    }
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub id: String,
    pub status: Status,
    pub checked: u64,
    pub violations: u64,
    pub inconclusive: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<String>,
}

impl LemmaCheck {
    /// A single boolean outcome with an optional explanation.
    pub fn single(id: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) -> Self {
        let mut tally = Tally::default();
        tally.record(ok, detail);
        tally.finish(id)
    }

    /// Re-labels a failing check as a negative control that failed on purpose,
    /// and a passing one as a control that did not fire.
    pub fn expect_failure(mut self) -> Self {
        self.status = if self.status == Status::Fail {
            Status::ExpectedFail
        } else {
            Status::Fail
        };
        self
    }
}

/// Mergeable accumulator for one check; merge order is deterministic when
/// used with indexed parallel iterators.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub checked: u64,
    pub violations: u64,
    pub inconclusive: u64,
    pub examples: Vec<String>,
}

impl Tally {
    pub fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(detail());
            }
        }
    }

    pub fn skip(&mut self) {
        self.inconclusive += 1;
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.violations += other.violations;
        self.inconclusive += other.inconclusive;
        let room = MAX_EXAMPLES.saturating_sub(self.examples.len());
        self.examples.extend(other.examples.into_iter().take(room));
        self
    }

    pub fn finish(self, id: impl Into<String>) -> LemmaCheck {
        let status = if self.violations > 0 {
            Status::Fail
        } else if self.checked == 0 && self.inconclusive > 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        LemmaCheck {
            id: id.into(),
            status,
            checked: self.checked,
            violations: self.violations,
            inconclusive: self.inconclusive,
            examples: self.examples,
        }
    }
}

/// Checks of one suite, in a fixed order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<LemmaCheck>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self { suite: suite.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: LemmaCheck) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status.is_ok())
    }

    pub fn get(&self, id: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_counts() {
        let mut t = Tally::default();
        t.skip();
        assert_eq!(t.clone().finish("x").status, Status::Inconclusive);
        t.record(true, String::new);
        assert_eq!(t.clone().finish("x").status, Status::Pass);
        t.record(false, || "bad".into());
        let check = t.finish("x");
        assert_eq!(check.status, Status::Fail);
        assert_eq!(check.examples, vec!["bad".to_string()]);
        assert_eq!(check.expect_failure().status, Status::ExpectedFail);
    }

    #[test]
    fn merge_keeps_first_examples() {
        let mut a = Tally::default();
        let mut b = Tally::default();
        for i in 0..4 {
            a.record(false, || format!("a{i}"));
            b.record(false, || format!("b{i}"));
        }
        let merged = a.merge(b);
        assert_eq!(merged.violations, 8);
        assert_eq!(merged.examples, vec!["a0", "a1", "a2", "a3", "b0"]);
    }
}
