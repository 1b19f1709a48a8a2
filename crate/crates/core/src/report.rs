use std::fmt;

/// A failed identity with both sides rendered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub check: String,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} failed on {}\n  lhs = {}\n  rhs = {}",
            self.check, self.input, self.lhs, self.rhs
        )
    }
}

/// Outcome of a verification sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<Counterexample>,
    /// Set when the sweep stopped before covering its whole domain.
    pub incomplete: Option<String>,
}

const MAX_RECORDED: usize = 8;

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.incomplete.is_none()
    }

    /// Records one check; `describe` is only called on failure.
    pub fn check<L, R>(&mut self, ok: bool, describe: impl FnOnce() -> (String, String, L, R))
    where
        L: fmt::Display,
        R: fmt::Display,
    {
        self.checks += 1;
        if !ok && self.failures.len() < MAX_RECORDED {
            let (check, input, lhs, rhs) = describe();
            self.failures.push(Counterexample {
                check,
                input,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checks += other.checks;
        for f in other.failures {
            if self.failures.len() < MAX_RECORDED {
                self.failures.push(f);
            }
        }
        if self.incomplete.is_none() {
            self.incomplete = other.incomplete;
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} checks)", self.name, self.checks)?;
        if let Some(why) = &self.incomplete {
            write!(f, "\n  incomplete: {why}")?;
        }
        if let Some(first) = self.failures.first() {
            write!(f, "\n{first}")?;
        }
        Ok(())
    }
}
