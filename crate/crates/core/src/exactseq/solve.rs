//! Solving the two unknown corners of a six-term sequence.
//!
//! In the layout `x0 -f0-> x1 -> U2 -> x3 -f3-> x4 -> U5 -> x0`, exactness
//! cuts each unknown into a short exact sequence
//! `0 -> coker(f0) -> U2 -> ker(f3) -> 0` and
//! `0 -> coker(f3) -> U5 -> ker(f0) -> 0`, which leaves only an extension
//! problem.

use serde::{Deserialize, Serialize};

use super::extension::{default_bound, extensions, Extension};
use super::ExactSequence;
use crate::abelian::{FgAbGroup, GroupHom, Subquotient};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Determined,
    AmbiguousExtension,
    Underdetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSolution {
    pub position: usize,
    pub status: SolveStatus,
    /// The cokernel side of the extension.
    pub sub: FgAbGroup,
    /// The kernel side of the extension.
    pub quotient: FgAbGroup,
    pub group: Option<FgAbGroup>,
    pub candidates: Vec<FgAbGroup>,
    /// One extension per candidate, in the same order.
    pub certificate: Vec<Extension>,
    pub assumed_split: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub nodes: Vec<NodeSolution>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub watermarks: Vec<String>,
}

impl SolveOutcome {
    fn underdetermined(reason: String) -> Self {
        SolveOutcome {
            status: SolveStatus::Underdetermined,
            nodes: Vec::new(),
            reason: Some(reason),
            watermarks: Vec::new(),
        }
    }

    pub fn node(&self, position: usize) -> Option<&NodeSolution> {
        self.nodes.iter().find(|n| n.position == position)
    }
}

/// Knobs for [`solve_six_term_with`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub assume_split: bool,
    pub bound: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            assume_split: false,
            bound: default_bound(),
        }
    }
}

fn layout_problem(seq: &ExactSequence) -> Option<String> {
    if seq.len() != 6 {
        return Some(format!(
            "expected a six-term cycle, got {} nodes",
            seq.len()
        ));
    }
    for i in [0, 1, 3, 4] {
        if seq.node(i).is_none() {
            return Some(format!("node {i} must be known"));
        }
    }
    for i in [0, 3] {
        if seq.arrow(i).is_none() {
            return Some(format!("arrow {i} must be known"));
        }
    }
    for i in [2, 5] {
        if seq.node(i).is_some() {
            return Some(format!("node {i} is already known; nothing to solve there"));
        }
    }
    None
}

/// `(coker(incoming), ker(outgoing))` for the unknown at `position`.
fn flanks(seq: &ExactSequence, position: usize) -> (Subquotient, Subquotient) {
    let (before, after) = if position == 2 { (0, 3) } else { (3, 0) };
    let incoming = seq.arrow(before).expect("layout checked");
    let outgoing = seq.arrow(after).expect("layout checked");
    (
        Subquotient::cokernel_of_hom(incoming),
        Subquotient::kernel_of_hom(outgoing),
    )
}

pub fn solve_six_term(seq: &ExactSequence) -> Result<SolveOutcome> {
    solve_six_term_with(seq, SolveOptions::default())
}

/// Resolves the unknowns at positions 2 and 5. Layout problems come back
/// as `Underdetermined`; an oversized extension search is a resource error
/// unless `assume_split` is set.
pub fn solve_six_term_with(seq: &ExactSequence, opts: SolveOptions) -> Result<SolveOutcome> {
    if let Some(reason) = layout_problem(seq) {
        return Ok(SolveOutcome::underdetermined(reason));
    }
    let mut nodes = Vec::new();
    let mut watermarks = Vec::new();
    for position in [2, 5] {
        let (n, q) = flanks(seq, position);
        let (sub, quotient) = (n.group().clone(), q.group().clone());
        let found = extensions(&sub, &quotient, opts.bound);
        let certificate = match (found, opts.assume_split) {
            (Ok(list), false) => list,
            (Ok(list), true) if list.len() == 1 => list,
            (Err(e), false) => return Err(e),
            (found, true) => {
                let note = match found {
                    Ok(list) => format!("{} candidates", list.len()),
                    Err(_) => "an unsearched candidate list".to_string(),
                };
                watermarks.push(format!(
                    "assumed split extension at node {position}: {sub} ⊕ {quotient} chosen over {note}"
                ));
                let split = Extension::split(&sub, &quotient);
                nodes.push(NodeSolution {
                    position,
                    status: SolveStatus::Determined,
                    sub,
                    quotient,
                    group: Some(split.middle.clone()),
                    candidates: vec![split.middle.clone()],
                    certificate: vec![split],
                    assumed_split: true,
                });
                continue;
            }
        };
        let candidates: Vec<FgAbGroup> = certificate.iter().map(|e| e.middle.clone()).collect();
        let (status, group) = if candidates.len() == 1 {
            (SolveStatus::Determined, Some(candidates[0].clone()))
        } else {
            (SolveStatus::AmbiguousExtension, None)
        };
        nodes.push(NodeSolution {
            position,
            status,
            sub,
            quotient,
            group,
            candidates,
            certificate,
            assumed_split: false,
        });
    }
    let status = if nodes.iter().all(|n| n.status == SolveStatus::Determined) {
        SolveStatus::Determined
    } else {
        SolveStatus::AmbiguousExtension
    };
    Ok(SolveOutcome {
        status,
        nodes,
        reason: None,
        watermarks,
    })
}

/// Fills in the unknowns with the chosen candidates (`choices[k]` indexes
/// the candidate list of the `k`-th solved node) and the canonical maps
/// `x1 -> coker(f0) -> U2 -> ker(f3) -> x3` (and likewise around `U5`).
pub fn realize(seq: &ExactSequence, outcome: &SolveOutcome, choices: &[usize]) -> Result<ExactSequence> {
    if let Some(reason) = layout_problem(seq) {
        return Err(Error::Precondition(reason));
    }
    if outcome.nodes.len() != 2 || choices.len() != 2 {
        return Err(Error::Precondition(
            "need a solution and a choice for both unknown nodes".into(),
        ));
    }
    let mut nodes: Vec<Option<FgAbGroup>> = seq.nodes().to_vec();
    let mut arrows: Vec<Option<GroupHom>> = seq.arrows().to_vec();
    for (solution, &choice) in outcome.nodes.iter().zip(choices) {
        let p = solution.position;
        let ext = solution.certificate.get(choice).ok_or_else(|| {
            Error::Precondition(format!(
                "choice {choice} out of range for node {p} ({} candidates)",
                solution.certificate.len()
            ))
        })?;
        let (n, q) = flanks(seq, p);
        if n.group() != &ext.sub || q.group() != &ext.quotient {
            return Err(Error::Precondition(format!(
                "solution for node {p} does not match the sequence"
            )));
        }
        let prev = seq.node(p - 1).expect("layout checked");
        let next = seq.node((p + 1) % 6).expect("layout checked");
        let into = n.projection_from(prev)?.then(&ext.inclusion)?;
        let out = ext.projection.then(&q.inclusion_into(next)?)?;
        nodes[p] = Some(ext.middle.clone());
        arrows[p - 1] = Some(into);
        arrows[p] = Some(out);
    }
    ExactSequence::new(nodes, arrows)
}
