//! Check and suite records shared by every verification routine. Iteration
//! orders are fixed so that serialized reports are byte-stable.

use std::fmt;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Witnesses kept per check; the total failure count is always exact.
pub const MAX_WITNESSES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Truncated,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Truncated => "truncated",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub location: String,
    pub expected: String,
    pub found: String,
}

impl Witness {
    pub fn new(location: impl Into<String>, expected: impl fmt::Display, found: impl fmt::Display) -> Self {
        Witness { location: location.into(), expected: expected.to_string(), found: found.to_string() }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, found {}", self.location, self.expected, self.found)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    /// The identity being verified, as a formula.
    pub anchor: String,
    pub status: Status,
    /// Instances evaluated exactly.
    pub checked: usize,
    /// Instances skipped because they need data beyond the truncation.
    pub truncated: usize,
    pub failures: usize,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            status: Status::Truncated,
            checked: 0,
            truncated: 0,
            failures: 0,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn pass(&mut self) {
        self.checked += 1;
    }

    pub fn skip(&mut self) {
        self.truncated += 1;
    }

    pub fn fail(&mut self, w: Witness) {
        self.checked += 1;
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    /// Records one instance: passes if `ok`, otherwise fails with the
    /// witness produced lazily.
    pub fn record(&mut self, ok: bool, w: impl FnOnce() -> Witness) {
        if ok {
            self.pass();
        } else {
            self.fail(w());
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Fixes the status: any failure fails; nothing evaluated is truncated.
    pub fn finish(mut self) -> Self {
        self.status = if self.failures > 0 {
            Status::Fail
        } else if self.checked == 0 {
            Status::Truncated
        } else {
            Status::Pass
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub model: String,
    pub depth: usize,
    pub status: Status,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, model: impl Into<String>, depth: usize, checks: Vec<Check>) -> Self {
        let status = checks.iter().map(|c| c.status).max().unwrap_or(Status::Truncated);
        SuiteReport { schema_version: SCHEMA_VERSION, suite: suite.into(), model: model.into(), depth, status, checks }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<(&Check, Option<&Witness>)> {
        self.checks.iter().find(|c| c.status == Status::Fail).map(|c| (c, c.witnesses.first()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_rolls_up() {
        let mut a = Check::new("a", "x = x");
        a.pass();
        let a = a.finish();
        let b = Check::new("b", "y = y").finish();
        assert_eq!(b.status, Status::Truncated);
        let r = SuiteReport::new("s", "m", 1, vec![a.clone(), b]);
        assert_eq!(r.status, Status::Truncated);
        let mut c = Check::new("c", "z = z");
        for i in 0..20 {
            c.fail(Witness::new(format!("i={i}"), 0, 1));
        }
        let c = c.finish();
        assert_eq!((c.failures, c.witnesses.len()), (20, MAX_WITNESSES));
        assert_eq!(SuiteReport::new("s", "m", 1, vec![a, c]).status, Status::Fail);
    }
}
