//! `K(O_{E_2 ⊗ O_{E_1}})` in two Pimsner stages: first `B = O_{E_1}`, then
//! the second bimodule acting on `K(B)`. Both orders are run and must agree.

use serde::{Deserialize, Serialize};

use super::pimsner::{cuntz_pimsner_stage, ensure_valid, pimsner_class_maps, PimsnerProblem, PimsnerStage};
use super::{reconcile, KPair};
use crate::abelian::IntMatrix;
use crate::error::{Error, Result};
use crate::exactseq::SolveOptions;
use crate::model::{BimoduleModel, KAction, Layer};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IteratedReport {
    /// `K(O_{E_1})`.
    pub first_stage: KPair,
    /// `K(O_{E_2})`.
    pub second_stage: KPair,
    /// `E_1` first, then `E_2`.
    pub forward: KPair,
    /// `E_2` first, then `E_1`.
    pub reverse: KPair,
    /// Both orders reconciled.
    pub result: KPair,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub watermarks: Vec<String>,
}

/// One order of the computation, with the intermediate stages kept for
/// the diagram route.
#[derive(Clone, Debug)]
pub(crate) struct OrderRun {
    pub stage1: PimsnerStage,
    pub stage2: Option<PimsnerStage>,
    pub result: KPair,
}

fn check_model(model: &BimoduleModel) -> Result<()> {
    match model {
        BimoduleModel::Graph(_) => Err(Error::Precondition(
            "the iterated computation needs two bimodules".into(),
        )),
        BimoduleModel::TwoGraph(s) => ensure_valid(&s.validate(true)?, "two-graph"),
        BimoduleModel::Abstract(d) => {
            if d.action2.is_none() {
                return Err(Error::Precondition(
                    "abstract data has no second action".into(),
                ));
            }
            ensure_valid(&d.validate()?, "abstract K-data")
        }
    }
}

/// Second action on the coefficient K-groups, as a class pair.
fn coefficient_action(model: &BimoduleModel, layer: Layer) -> Result<KAction> {
    let p = pimsner_class_maps(model, layer)?;
    Ok(KAction {
        k0: p.class0,
        k1: p.class1,
    })
}

/// Pushes the second action down to the stage-1 groups. On
/// `K0(B) = coker(1-[E1]_0) ⊕ ker(1-[E1]_1)` it acts block-diagonally,
/// and likewise on `K1(B)`.
fn descend(stage: &PimsnerStage, action: &KAction) -> Result<Option<(PimsnerProblem, Vec<String>)>> {
    let (Some(p0), Some(p1)) = (stage.k0_presentation(), stage.k1_presentation()) else {
        return Ok(None);
    };
    let b0 = action.k0.matrix();
    let b1 = action.k1.matrix();
    let induced = |p: &crate::abelian::Subquotient, m: IntMatrix, deg: usize| {
        p.induced_hom(&m, p).map_err(|e| {
            Error::Invalid(format!(
                "second action does not descend to K{deg} of the first stage: {e}"
            ))
        })
    };
    let class0 = induced(p0, IntMatrix::block_diagonal(b0, b1), 0)?;
    let class1 = induced(p1, IntMatrix::block_diagonal(b1, b0), 1)?;
    let mut notes = Vec::new();
    for (deg, k) in [(0, &stage.pair.k0), (1, &stage.pair.k1)] {
        if let Some(c) = k.certificate() {
            if !c.sub.is_trivial() && !c.quotient.is_trivial() {
                notes.push(format!(
                    "block-diagonal lift of the second action on K{deg} = {} ⊕ {} of the first stage",
                    c.sub, c.quotient
                ));
            }
        }
    }
    Ok(Some((PimsnerProblem::new(class0, class1)?, notes)))
}

pub(crate) fn run_order(model: &BimoduleModel, first: Layer, opts: SolveOptions) -> Result<OrderRun> {
    let stage1 = cuntz_pimsner_stage(&pimsner_class_maps(model, first)?, opts)?;
    let action = coefficient_action(model, first.other())?;
    let Some((problem, notes)) = descend(&stage1, &action)? else {
        let mut result = KPair::underdetermined(
            "the first stage is an ambiguous extension, so the second action is unknown; \
             --assume-split picks the split one",
        );
        result.watermarks = stage1.pair.watermarks.clone();
        return Ok(OrderRun {
            stage1,
            stage2: None,
            result,
        });
    };
    let stage2 = cuntz_pimsner_stage(&problem, opts)?;
    let mut result = stage2.pair.clone();
    let mut watermarks = stage1.pair.watermarks.clone();
    watermarks.extend(notes);
    watermarks.append(&mut result.watermarks);
    result.watermarks = watermarks;
    Ok(OrderRun {
        stage1,
        stage2: Some(stage2),
        result,
    })
}

fn label(first: Layer) -> &'static str {
    match first {
        Layer::First => "E1 first",
        Layer::Second => "E2 first",
    }
}

pub(crate) fn both_orders(model: &BimoduleModel, opts: SolveOptions) -> Result<(OrderRun, OrderRun, IteratedReport)> {
    check_model(model)?;
    let fwd = run_order(model, Layer::First, opts)?;
    let rev = run_order(model, Layer::Second, opts)?;
    let mut k = Vec::with_capacity(2);
    for d in 0..2 {
        let merged = reconcile(fwd.result.degree(d), rev.result.degree(d)).map_err(|e| {
            Error::Inconsistent(format!(
                "K{d} differs between orders ({}: {}, {}: {}): {e}",
                label(Layer::First),
                fwd.result.degree(d),
                label(Layer::Second),
                rev.result.degree(d)
            ))
        })?;
        k.push(merged);
    }
    let mut watermarks = Vec::new();
    for (first, run) in [(Layer::First, &fwd), (Layer::Second, &rev)] {
        for w in &run.result.watermarks {
            let w = format!("{}: {w}", label(first));
            if !watermarks.contains(&w) {
                watermarks.push(w);
            }
        }
    }
    let k1 = k.pop().expect("two degrees");
    let k0 = k.pop().expect("two degrees");
    let report = IteratedReport {
        first_stage: fwd.stage1.pair.clone(),
        second_stage: rev.stage1.pair.clone(),
        forward: fwd.result.clone(),
        reverse: rev.result.clone(),
        result: KPair {
            k0,
            k1,
            watermarks: watermarks.clone(),
        },
        watermarks,
    };
    Ok((fwd, rev, report))
}

/// Both orders with their intermediate stages. Disagreement outside the
/// candidate lists is an [`Error::Inconsistent`].
pub fn iterated_report(model: &BimoduleModel, opts: SolveOptions) -> Result<IteratedReport> {
    Ok(both_orders(model, opts)?.2)
}

pub fn iterated_ktheory(model: &BimoduleModel, opts: SolveOptions) -> Result<KPair> {
    Ok(iterated_report(model, opts)?.result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FgAbGroup;
    use crate::exactseq::SolveStatus;
    use crate::model::{commuting_permutations_spec, flip_spec, AbstractKData};

    fn two(spec: crate::model::TwoGraphSpec) -> KPair {
        iterated_ktheory(&BimoduleModel::TwoGraph(spec), SolveOptions::default()).unwrap()
    }

    #[test]
    fn flips_match_the_tensor_product() {
        let z = |n: i64| FgAbGroup::cyclic(n);
        assert_eq!(two(flip_spec(2, 2)).groups().unwrap(), (&z(1), &z(1)));
        let p = two(flip_spec(3, 3));
        assert_eq!(p.groups().unwrap(), (&z(2), &z(2)));
        let p = two(flip_spec(4, 7));
        assert_eq!(p.groups().unwrap(), (&z(3), &z(3)));
    }

    #[test]
    fn single_loops_give_the_torus() {
        let p = two(flip_spec(1, 1));
        assert_eq!(p.groups().unwrap(), (&FgAbGroup::free(2), &FgAbGroup::free(2)));
    }

    #[test]
    fn commuting_swaps() {
        let s = commuting_permutations_spec(2, &[vec![1, 0]], &[vec![1, 0]]).unwrap();
        let p = two(s);
        assert_eq!(p.groups().unwrap(), (&FgAbGroup::free(2), &FgAbGroup::free(2)));
    }

    #[test]
    fn abstract_coprime_circle_maps() {
        let z = FgAbGroup::free(1);
        let d = AbstractKData::scalar(z.clone(), z, (2, 1), Some((3, 1)));
        let r = iterated_report(&BimoduleModel::Abstract(d), SolveOptions::default()).unwrap();
        assert_eq!(
            r.first_stage.groups().unwrap(),
            (&FgAbGroup::free(1), &FgAbGroup::free(1))
        );
        assert_eq!(
            r.second_stage.groups().unwrap(),
            (&FgAbGroup::new(1, [2]), &FgAbGroup::free(1))
        );
        assert_ne!(r.result.status(), SolveStatus::Underdetermined);
    }

    #[test]
    fn plain_graph_is_rejected() {
        let m = BimoduleModel::Graph(crate::model::FiniteGraph::rose(2));
        assert!(matches!(
            iterated_ktheory(&m, SolveOptions::default()),
            Err(Error::Precondition(_))
        ));
    }
}
