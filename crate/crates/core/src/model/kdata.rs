//! K-theory supplied directly: the coefficient K-groups together with the
//! classes of the bimodules acting on them. Used where the coefficient
//! algebra is not a finite vertex set.

use serde::{Deserialize, Serialize};

use super::graph::{ValidationReport, Violation};
use crate::abelian::{hom_well_defined, FgAbGroup, GroupHom, IntMatrix};
use crate::error::{Error, Result};

/// The induced class of one bimodule on `K_0` and `K_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KAction {
    pub k0: GroupHom,
    pub k1: GroupHom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractKData {
    pub k0: FgAbGroup,
    pub k1: FgAbGroup,
    pub action1: KAction,
    pub action2: Option<KAction>,
}

fn endo(g: &FgAbGroup, m: IntMatrix, what: &str) -> Result<GroupHom> {
    GroupHom::new(g.clone(), g.clone(), m)
        .map_err(|e| Error::Malformed(format!("{what}: {e}")))
}

impl AbstractKData {
    /// Builds the data from matrices on canonical generators. Shapes are
    /// checked here; well-definedness and commutation by [`Self::validate`].
    pub fn from_matrices(
        k0: FgAbGroup,
        k1: FgAbGroup,
        action1: (IntMatrix, IntMatrix),
        action2: Option<(IntMatrix, IntMatrix)>,
    ) -> Result<Self> {
        let a1 = KAction {
            k0: endo(&k0, action1.0, "action1.K0")?,
            k1: endo(&k1, action1.1, "action1.K1")?,
        };
        let a2 = match action2 {
            Some((m0, m1)) => Some(KAction {
                k0: endo(&k0, m0, "action2.K0")?,
                k1: endo(&k1, m1, "action2.K1")?,
            }),
            None => None,
        };
        Ok(AbstractKData {
            k0,
            k1,
            action1: a1,
            action2: a2,
        })
    }

    /// Multiplication by integers: `x k0_scale` on `K_0`, `x k1_scale` on
    /// `K_1`, for each bimodule.
    pub fn scalar(
        k0: FgAbGroup,
        k1: FgAbGroup,
        action1: (i64, i64),
        action2: Option<(i64, i64)>,
    ) -> Self {
        let act = |(a, b): (i64, i64)| KAction {
            k0: GroupHom::scalar(&k0, a),
            k1: GroupHom::scalar(&k1, b),
        };
        AbstractKData {
            action1: act(action1),
            action2: action2.map(act),
            k0: k0.clone(),
            k1: k1.clone(),
        }
    }

    pub fn actions(&self) -> Vec<(&str, &KAction)> {
        let mut out = vec![("action1", &self.action1)];
        if let Some(a) = &self.action2 {
            out.push(("action2", a));
        }
        out
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        let mut violations = Vec::new();
        for (name, action) in self.actions() {
            for (deg, f, g) in [("K0", &action.k0, &self.k0), ("K1", &action.k1, &self.k1)] {
                if f.dom() != g || f.cod() != g {
                    return Err(Error::Malformed(format!(
                        "{name}.{deg} acts on {} -> {}, expected {g}",
                        f.dom(),
                        f.cod()
                    )));
                }
                if !hom_well_defined(f)? {
                    violations.push(Violation::new(
                        "ill_defined",
                        format!("{name}.{deg}"),
                        "matrix does not respect the torsion relations",
                    ));
                }
            }
        }
        if let Some(a2) = &self.action2 {
            let a1 = &self.action1;
            for (deg, f, g) in [("K0", &a1.k0, &a2.k0), ("K1", &a1.k1, &a2.k1)] {
                if f.then(g)? != g.then(f)? {
                    violations.push(Violation::new(
                        "actions_do_not_commute",
                        deg,
                        "action1 and action2 do not commute",
                    ));
                }
            }
        }
        Ok(ValidationReport::from_violations(violations))
    }

    /// The data with the two bimodules exchanged, if there are two.
    pub fn swapped(&self) -> Option<AbstractKData> {
        let a2 = self.action2.clone()?;
        Some(AbstractKData {
            k0: self.k0.clone(),
            k1: self.k1.clone(),
            action1: a2,
            action2: Some(self.action1.clone()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_actions_on_the_circle_are_valid() {
        let z = FgAbGroup::free(1);
        let d = AbstractKData::scalar(z.clone(), z, (2, 1), Some((3, 1)));
        assert!(d.validate().unwrap().valid);
        assert!(d.swapped().unwrap().validate().unwrap().valid);
    }

    #[test]
    fn ill_defined_action_is_reported() {
        // on Z ⊕ Z_2 the torsion generator cannot go to an element of
        // infinite order
        let g = FgAbGroup::new(1, [2]);
        let bad = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let d = AbstractKData::from_matrices(
            g.clone(),
            FgAbGroup::trivial(),
            (bad, IntMatrix::zeros(0, 0)),
            None,
        )
        .unwrap();
        let r = d.validate().unwrap();
        assert!(r.violations.iter().any(|v| v.subject == "action1.K0"));
    }

    #[test]
    fn non_commuting_actions_are_reported() {
        let z2 = FgAbGroup::free(2);
        let a = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let b = IntMatrix::from_i64(&[&[1, 0], &[1, 1]]);
        let d = AbstractKData::from_matrices(
            z2,
            FgAbGroup::trivial(),
            (a, IntMatrix::zeros(0, 0)),
            Some((b, IntMatrix::zeros(0, 0))),
        )
        .unwrap();
        let r = d.validate().unwrap();
        assert!(r.violations.iter().any(|v| v.code == "actions_do_not_commute"));
    }

    #[test]
    fn wrong_shape_is_malformed() {
        let err = AbstractKData::from_matrices(
            FgAbGroup::free(1),
            FgAbGroup::free(1),
            (IntMatrix::identity(2), IntMatrix::identity(1)),
            None,
        );
        assert!(matches!(err, Err(Error::Malformed(_))));
    }
}
