//! One Pimsner stage: `K(A)`, the class `[E]` and the six-term sequence
//!
//! `K0(A) -(1-[E])-> K0(A) -> K0(O_E) -> K1(A) -(1-[E])-> K1(A) -> K1(O_E) -> K0(A)`.

use serde::{Deserialize, Serialize};

use super::{KGroup, KPair};
use crate::abelian::{hom_well_defined, FgAbGroup, GroupHom, IntMatrix, Subquotient};
use crate::error::{Error, Result};
use crate::exactseq::{solve_six_term_with, ExactSequence, SolveOptions, SolveOutcome, SolveStatus};
use crate::model::{validate_graph, vertex_matrix, BimoduleModel, FiniteGraph, Layer, ValidationReport};

/// Coefficient K-theory together with the class of one bimodule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PimsnerProblem {
    pub k0: FgAbGroup,
    pub k1: FgAbGroup,
    pub class0: GroupHom,
    pub class1: GroupHom,
}

impl PimsnerProblem {
    /// Checks that both classes are well-defined endomorphisms.
    pub fn new(class0: GroupHom, class1: GroupHom) -> Result<Self> {
        for (deg, f) in [(0, &class0), (1, &class1)] {
            if !f.is_endomorphism() {
                return Err(Error::Malformed(format!(
                    "class on K{deg} must be an endomorphism, got {} -> {}",
                    f.dom(),
                    f.cod()
                )));
            }
            if !hom_well_defined(f)? {
                return Err(Error::Invalid(format!(
                    "class on K{deg} does not respect the relations of {}",
                    f.dom()
                )));
            }
        }
        Ok(PimsnerProblem {
            k0: class0.dom().clone(),
            k1: class1.dom().clone(),
            class0,
            class1,
        })
    }

    /// The six-term sequence with `K(O_E)` unknown at positions 2 and 5.
    pub fn sequence(&self) -> Result<ExactSequence> {
        ExactSequence::six_term(self.class0.one_minus()?, self.class1.one_minus()?)
    }
}

/// A solved stage. When an unknown is pinned to the split extension it is
/// also presented as `coker ⊕ ker` inside the coefficient generators,
/// which is what lets a second bimodule act on it.
#[derive(Clone, Debug)]
pub struct PimsnerStage {
    pub problem: PimsnerProblem,
    pub outcome: SolveOutcome,
    pub pair: KPair,
    /// Ambient order: `K0(A)` generators, then `K1(A)` generators.
    k0_presentation: Option<Subquotient>,
    /// Ambient order: `K1(A)` generators, then `K0(A)` generators.
    k1_presentation: Option<Subquotient>,
}

impl PimsnerStage {
    pub fn k0_presentation(&self) -> Option<&Subquotient> {
        self.k0_presentation.as_ref()
    }

    pub fn k1_presentation(&self) -> Option<&Subquotient> {
        self.k1_presentation.as_ref()
    }

    pub fn presentation(&self, degree: usize) -> Option<&Subquotient> {
        if degree == 0 {
            self.k0_presentation()
        } else {
            self.k1_presentation()
        }
    }
}

pub fn coefficient_ktheory(model: &BimoduleModel) -> KPair {
    match model {
        BimoduleModel::Graph(g) => KPair::known(FgAbGroup::free(g.vertex_count()), FgAbGroup::trivial()),
        BimoduleModel::TwoGraph(s) => {
            KPair::known(FgAbGroup::free(s.vertices.len()), FgAbGroup::trivial())
        }
        BimoduleModel::Abstract(d) => KPair::known(d.k0.clone(), d.k1.clone()),
    }
}

pub(crate) fn ensure_valid(report: &ValidationReport, what: &str) -> Result<()> {
    if report.valid {
        return Ok(());
    }
    let msgs: Vec<String> = report
        .violations
        .iter()
        .map(|v| format!("{} ({}): {}", v.code, v.subject, v.message))
        .collect();
    Err(Error::Invalid(format!("{what} is not valid: {}", msgs.join("; "))))
}

fn graph_problem(g: &FiniteGraph) -> Result<PimsnerProblem> {
    ensure_valid(&validate_graph(g, true)?, "graph")?;
    let v = FgAbGroup::free(g.vertex_count());
    let class0 = GroupHom::new(v.clone(), v, vertex_matrix(g)?.transpose())?;
    let zero = FgAbGroup::trivial();
    PimsnerProblem::new(class0, GroupHom::zero(&zero, &zero))
}

/// The class of the chosen bimodule. Graph layers act by `M^t` on `Z^V` and
/// by zero on `K1 = 0`; abstract data uses its stored actions. A plain
/// graph has only one layer and ignores `layer`.
pub fn pimsner_class_maps(model: &BimoduleModel, layer: Layer) -> Result<PimsnerProblem> {
    match model {
        BimoduleModel::Graph(g) => graph_problem(g),
        BimoduleModel::TwoGraph(s) => graph_problem(&s.layer(layer)),
        BimoduleModel::Abstract(d) => {
            let action = match layer {
                Layer::First => &d.action1,
                Layer::Second => d.action2.as_ref().ok_or_else(|| {
                    Error::Precondition("abstract data has no second action".into())
                })?,
            };
            PimsnerProblem::new(action.k0.clone(), action.k1.clone())
        }
    }
}

pub fn cuntz_pimsner_ktheory(problem: &PimsnerProblem, opts: SolveOptions) -> Result<KPair> {
    Ok(cuntz_pimsner_stage(problem, opts)?.pair)
}

pub fn cuntz_pimsner_stage(problem: &PimsnerProblem, opts: SolveOptions) -> Result<PimsnerStage> {
    let seq = problem.sequence()?;
    let outcome = solve_six_term_with(&seq, opts)?;
    if outcome.status == SolveStatus::Underdetermined {
        return Err(Error::Precondition(format!(
            "Pimsner sequence did not fit the solver: {}",
            outcome.reason.clone().unwrap_or_default()
        )));
    }
    let f0 = problem.class0.one_minus()?;
    let f1 = problem.class1.one_minus()?;
    let node2 = outcome.node(2).expect("solved");
    let node5 = outcome.node(5).expect("solved");
    let split = |n: &crate::exactseq::NodeSolution| n.status == SolveStatus::Determined;
    let k0_presentation = split(node2)
        .then(|| Subquotient::cokernel_of_hom(&f0).direct_sum(&Subquotient::kernel_of_hom(&f1)));
    let k1_presentation = split(node5)
        .then(|| Subquotient::cokernel_of_hom(&f1).direct_sum(&Subquotient::kernel_of_hom(&f0)));
    for (p, n) in [(&k0_presentation, node2), (&k1_presentation, node5)] {
        if let Some(p) = p {
            debug_assert_eq!(Some(p.group()), n.group.as_ref());
        }
    }
    let pair = KPair {
        k0: KGroup::from_solution(node2),
        k1: KGroup::from_solution(node5),
        watermarks: outcome.watermarks.clone(),
    };
    Ok(PimsnerStage {
        problem: problem.clone(),
        outcome,
        pair,
        k0_presentation,
        k1_presentation,
    })
}

/// `[I; 0]`: the first `n` of `n + m` ambient coordinates.
pub(crate) fn top_block(n: usize, m: usize) -> IntMatrix {
    IntMatrix::block_diagonal(&IntMatrix::identity(n), &IntMatrix::zeros(m, 0))
}

/// The map `K_d(A) -> K_d(O_E)` induced by the inclusion `A -> O_E`.
pub(crate) fn unit_map(stage: &PimsnerStage, degree: usize) -> Result<Option<GroupHom>> {
    let Some(target) = stage.presentation(degree) else {
        return Ok(None);
    };
    let (own, other) = if degree == 0 {
        (&stage.problem.k0, &stage.problem.k1)
    } else {
        (&stage.problem.k1, &stage.problem.k0)
    };
    let b = top_block(own.generator_count(), other.generator_count());
    Subquotient::canonical(own).induced_hom(&b, target).map(Some)
}
