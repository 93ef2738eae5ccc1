use std::fmt;

/// A three-valued answer carrying a certificate, a witness, or a reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes(String),
    No(String),
    Unknown(String),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No(_) => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            Verdict::Yes(s) | Verdict::No(s) | Verdict::Unknown(s) => s,
        }
    }

    pub fn from_bool(b: bool, yes: impl Into<String>, no: impl Into<String>) -> Self {
        if b {
            Verdict::Yes(yes.into())
        } else {
            Verdict::No(no.into())
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self {
            Verdict::Yes(_) => "Yes",
            Verdict::No(_) => "No",
            Verdict::Unknown(_) => "Unknown",
        };
        if self.detail().is_empty() {
            f.write_str(head)
        } else {
            write!(f, "{head} ({})", self.detail())
        }
    }
}

/// Limits for semidecision procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_states: 100_000, max_depth: 16 }
    }
}

impl SearchBudget {
    pub fn new(max_states: usize, max_depth: usize) -> Self {
        SearchBudget { max_states, max_depth }
    }

    pub fn with_depth(self, max_depth: usize) -> Self {
        SearchBudget { max_depth, ..self }
    }
}
