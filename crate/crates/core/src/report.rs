use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

/// One named check, rendered as `name: PASS (detail)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub detail: String,
    pub status: Status,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.detail.is_empty() {
            write!(f, "{}: {}", self.name, self.status)
        } else {
            write!(f, "{}: {} ({})", self.name, self.status, self.detail)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<CheckLine>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, detail: impl Into<String>, pass: bool) {
        let status = if pass { Status::Pass } else { Status::Fail };
        self.lines.push(CheckLine { name: name.into(), detail: detail.into(), status });
    }

    pub fn skip(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.lines.push(CheckLine { name: name.into(), detail: detail.into(), status: Status::Skipped });
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    /// True when nothing failed (skipped lines do not count as failures).
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| l.status == Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.lines.iter().filter(|l| l.status == status).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
