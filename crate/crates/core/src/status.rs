use serde::{Deserialize, Serialize};

/// How far a computed number can be trusted.
///
/// Ordered from strongest to weakest; [`Status::and`] keeps the weaker one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    Exact,
    /// Exact provided the listed assumptions hold.
    Conditional {
        assumptions: Vec<String>,
    },
    /// Only degrees up to `cutoff` were examined.
    WindowLimited {
        cutoff: u32,
    },
    /// Computed on a presentation whose generators above `truncated_above`
    /// were omitted.
    ModuloTruncation {
        truncated_above: u32,
    },
}

impl Status {
    pub fn conditional<S: Into<String>>(assumptions: impl IntoIterator<Item = S>) -> Self {
        let mut a: Vec<String> = assumptions.into_iter().map(Into::into).collect();
        a.sort();
        a.dedup();
        if a.is_empty() {
            Status::Exact
        } else {
            Status::Conditional { assumptions: a }
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Status::Exact => 0,
            Status::Conditional { .. } => 1,
            Status::WindowLimited { .. } => 2,
            Status::ModuloTruncation { .. } => 3,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Status::Exact)
    }

    /// Exact or conditional: the value is pinned down, possibly under
    /// stated assumptions.
    pub fn is_certified(&self) -> bool {
        self.rank() <= 1
    }

    /// Combination of two statuses: the weaker wins, assumptions are merged.
    pub fn and(&self, other: &Status) -> Status {
        match (self, other) {
            (Status::Conditional { assumptions: a }, Status::Conditional { assumptions: b }) => {
                Status::conditional(a.iter().chain(b).cloned())
            }
            (Status::WindowLimited { cutoff: a }, Status::WindowLimited { cutoff: b }) => {
                Status::WindowLimited { cutoff: *a.min(b) }
            }
            _ if self.rank() >= other.rank() => self.clone(),
            _ => other.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Status::Exact => "exact".into(),
            Status::Conditional { assumptions } => {
                format!("conditional on [{}]", assumptions.join("; "))
            }
            Status::WindowLimited { cutoff } => format!("window-limited (degrees <= {cutoff})"),
            Status::ModuloTruncation { truncated_above } => {
                format!("modulo truncation (generators above degree {truncated_above} omitted)")
            }
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}
