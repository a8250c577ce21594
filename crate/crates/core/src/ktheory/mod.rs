//! K-theory of Cuntz-Pimsner algebras from the six-term Pimsner sequence,
//! the two-stage computation for `O_{E_2 ⊗ O_{E_1}}`, and the 3x3 ideal
//! diagram used as an independent cross-check.

mod diagram;
mod iterated;
mod oracle;
mod pimsner;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abelian::FgAbGroup;
use crate::error::{Error, Result};
use crate::exactseq::{NodeSolution, SolveStatus};

pub use diagram::{diagram_report, Corner, DiagramReport, SequenceCheck};
pub use iterated::{iterated_ktheory, iterated_report, IteratedReport};
pub use oracle::kunneth_flip_oracle;
pub use pimsner::{
    coefficient_ktheory, cuntz_pimsner_ktheory, cuntz_pimsner_stage, pimsner_class_maps,
    PimsnerProblem, PimsnerStage,
};

/// Where a determined or ambiguous group came from: the short exact
/// sequence `0 -> sub -> G -> quotient -> 0` it was solved from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub sub: FgAbGroup,
    pub quotient: FgAbGroup,
    #[serde(default)]
    pub assumed_split: bool,
}

/// One K-group as far as it could be pinned down.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KGroup {
    Determined {
        group: FgAbGroup,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        certificate: Option<Certificate>,
    },
    AmbiguousExtension {
        candidates: Vec<FgAbGroup>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        certificate: Option<Certificate>,
    },
    Underdetermined {
        reason: String,
    },
}

impl KGroup {
    pub fn known(group: FgAbGroup) -> Self {
        KGroup::Determined {
            group,
            certificate: None,
        }
    }

    pub(crate) fn from_solution(n: &NodeSolution) -> Self {
        let certificate = Some(Certificate {
            sub: n.sub.clone(),
            quotient: n.quotient.clone(),
            assumed_split: n.assumed_split,
        });
        match (&n.status, &n.group) {
            (SolveStatus::Determined, Some(g)) => KGroup::Determined {
                group: g.clone(),
                certificate,
            },
            _ => KGroup::AmbiguousExtension {
                candidates: n.candidates.clone(),
                certificate,
            },
        }
    }

    pub fn status(&self) -> SolveStatus {
        match self {
            KGroup::Determined { .. } => SolveStatus::Determined,
            KGroup::AmbiguousExtension { .. } => SolveStatus::AmbiguousExtension,
            KGroup::Underdetermined { .. } => SolveStatus::Underdetermined,
        }
    }

    pub fn group(&self) -> Option<&FgAbGroup> {
        match self {
            KGroup::Determined { group, .. } => Some(group),
            _ => None,
        }
    }

    /// The possible groups; empty when nothing is known.
    pub fn candidates(&self) -> Vec<FgAbGroup> {
        match self {
            KGroup::Determined { group, .. } => vec![group.clone()],
            KGroup::AmbiguousExtension { candidates, .. } => candidates.clone(),
            KGroup::Underdetermined { .. } => Vec::new(),
        }
    }

    fn certificate(&self) -> Option<&Certificate> {
        match self {
            KGroup::Determined { certificate, .. } | KGroup::AmbiguousExtension { certificate, .. } => {
                certificate.as_ref()
            }
            KGroup::Underdetermined { .. } => None,
        }
    }
}

impl fmt::Display for KGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KGroup::Determined { group, .. } => write!(f, "{group}"),
            KGroup::AmbiguousExtension { candidates, .. } => {
                let names: Vec<String> = candidates.iter().map(ToString::to_string).collect();
                write!(f, "one of {{{}}}", names.join(", "))
            }
            KGroup::Underdetermined { .. } => write!(f, "?"),
        }
    }
}

/// `(K_0, K_1)` of some algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KPair {
    pub k0: KGroup,
    pub k1: KGroup,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub watermarks: Vec<String>,
}

impl KPair {
    pub fn known(k0: FgAbGroup, k1: FgAbGroup) -> Self {
        KPair {
            k0: KGroup::known(k0),
            k1: KGroup::known(k1),
            watermarks: Vec::new(),
        }
    }

    pub fn underdetermined(reason: &str) -> Self {
        let u = KGroup::Underdetermined {
            reason: reason.to_string(),
        };
        KPair {
            k0: u.clone(),
            k1: u,
            watermarks: Vec::new(),
        }
    }

    /// The worse of the two statuses.
    pub fn status(&self) -> SolveStatus {
        use SolveStatus::*;
        match (self.k0.status(), self.k1.status()) {
            (Underdetermined, _) | (_, Underdetermined) => Underdetermined,
            (AmbiguousExtension, _) | (_, AmbiguousExtension) => AmbiguousExtension,
            _ => Determined,
        }
    }

    pub fn is_determined(&self) -> bool {
        self.status() == SolveStatus::Determined
    }

    pub fn groups(&self) -> Option<(&FgAbGroup, &FgAbGroup)> {
        Some((self.k0.group()?, self.k1.group()?))
    }

    pub fn degree(&self, d: usize) -> &KGroup {
        if d == 0 {
            &self.k0
        } else {
            &self.k1
        }
    }
}

impl fmt::Display for KPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k0, self.k1)
    }
}

/// Merges two computations of the same group. The true group lies in
/// both candidate lists, so the intersection is still sound; an empty
/// intersection means one of the routes is wrong.
pub fn reconcile(a: &KGroup, b: &KGroup) -> Result<KGroup> {
    use KGroup::*;
    match (a, b) {
        (Underdetermined { .. }, other) | (other, Underdetermined { .. }) => Ok(other.clone()),
        (Determined { group: g, .. }, Determined { group: h, .. }) => {
            if g == h {
                Ok(a.clone())
            } else {
                Err(Error::Inconsistent(format!("{g} versus {h}")))
            }
        }
        (Determined { group: g, .. }, AmbiguousExtension { candidates, .. })
        | (AmbiguousExtension { candidates, .. }, Determined { group: g, .. }) => {
            if candidates.contains(g) {
                Ok(if a.group().is_some() { a.clone() } else { b.clone() })
            } else {
                Err(Error::Inconsistent(format!("{g} is not among {b}")))
            }
        }
        (AmbiguousExtension { candidates: l, .. }, AmbiguousExtension { candidates: m, .. }) => {
            let both: Vec<FgAbGroup> = l.iter().filter(|g| m.contains(g)).cloned().collect();
            match both.len() {
                0 => Err(Error::Inconsistent(format!("{a} and {b} have nothing in common"))),
                1 => Ok(KGroup::Determined {
                    group: both[0].clone(),
                    certificate: a.certificate().cloned(),
                }),
                _ => Ok(KGroup::AmbiguousExtension {
                    candidates: both,
                    certificate: a.certificate().cloned(),
                }),
            }
        }
    }
}
