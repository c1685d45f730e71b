//! Check outcomes and suite reports.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Unknown => "unknown",
        })
    }
}

/// One named check. `detail` holds counts or the skip reason and is
/// only shown in text output; `counterexample` is what the JSON carries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub counterexample: Option<String>,
    #[serde(skip)]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Check {
        Check { name: name.into(), status: Status::Pass, counterexample: None, detail: None }
    }

    pub fn fail(name: impl Into<String>, counterexample: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: Status::Fail,
            counterexample: Some(counterexample.into()),
            detail: None,
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Check {
        Check { name: name.into(), status: Status::Skipped, counterexample: None, detail: Some(reason.into()) }
    }

    pub fn unknown(name: impl Into<String>, reason: impl Into<String>) -> Check {
        Check { name: name.into(), status: Status::Unknown, counterexample: None, detail: Some(reason.into()) }
    }

    /// Pass when `witness` is `None`, otherwise fail with it.
    pub fn from_witness(name: impl Into<String>, witness: Option<String>) -> Check {
        match witness {
            None => Check::pass(name),
            Some(w) => Check::fail(name, w),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        let detail = detail.into();
        self.detail = Some(match self.detail.take() {
            Some(old) => format!("{old}; {detail}"),
            None => detail,
        });
        self
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> CheckReport {
        CheckReport { name: name.into(), checks: Vec::new(), elapsed_ms: 0 }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn failures(&self) -> usize {
        self.count(Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Status of the named check, `None` if absent.
    pub fn status_of(&self, name: &str) -> Option<Status> {
        self.find(name).map(|c| c.status)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.name)?;
        for c in &self.checks {
            write!(f, "  [{:<7}] {}", c.status.to_string(), c.name)?;
            if let Some(d) = &c.detail {
                write!(f, " ({d})")?;
            }
            writeln!(f)?;
            if let Some(cx) = &c.counterexample {
                for line in cx.lines() {
                    writeln!(f, "            {line}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fail_carries_counterexample() {
        let c = Check::fail("x", "L[1]");
        assert_eq!(c.counterexample.as_deref(), Some("L[1]"));
        assert!(c.is_fail());
    }

    #[test]
    fn json_shape() {
        let mut r = CheckReport::new("s");
        r.push(Check::pass("a").with_detail("within bound 2"));
        r.push(Check::fail("b", "w"));
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "name": "s",
                "checks": [
                    {"name": "a", "status": "pass", "counterexample": null},
                    {"name": "b", "status": "fail", "counterexample": "w"}
                ],
                "elapsed_ms": 0
            })
        );
    }
}
