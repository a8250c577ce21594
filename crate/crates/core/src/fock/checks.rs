//! Relation defects on the truncated Fock space. Each check compares two
//! operators on the basis vectors of low enough degree that the cutoff at
//! `N` cannot interfere, and reports a Schur bound on the difference.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FockRep, Letter, SparseOp, Vector, Word};
use crate::model::Layer;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub relation: String,
    pub defect: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl DefectReport {
    fn new(relation: impl Into<String>, defect: f64, tol: f64) -> Self {
        DefectReport {
            relation: relation.into(),
            defect,
            tol,
            pass: defect.is_finite() && defect <= tol,
            detail: None,
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Largest defect over a family, naming the worst member.
struct Worst {
    defect: f64,
    at: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Worst { defect: 0.0, at: None }
    }

    fn see(&mut self, d: f64, at: impl FnOnce() -> String) {
        if d > self.defect || (d.is_nan() && !self.defect.is_nan()) {
            self.defect = d;
            self.at = Some(at());
        }
    }

    fn report(self, relation: &str, tol: f64, count: usize) -> DefectReport {
        let r = DefectReport::new(relation, self.defect, tol);
        match self.at {
            Some(at) if !r.pass => r.with_detail(format!("worst at {at}")),
            _ => r.with_detail(format!("{count} operator identities checked")),
        }
    }
}

fn name(rep: &FockRep, l: Letter) -> String {
    rep.model.letter_name(l).to_string()
}

fn degree_below(rep: &FockRep, k: usize) -> Option<Vec<bool>> {
    (rep.degree >= k).then(|| rep.degree_mask(rep.degree - k))
}

/// `T_e^* T_f = δ_{ef} P_{rng(e)}` within each layer and
/// `P_{src(e)} T_e = T_e`, on degrees `<= N-1`.
pub fn check_toeplitz(rep: &FockRep, tol: f64) -> Vec<DefectReport> {
    let Some(cols) = degree_below(rep, 1) else {
        return vec![DefectReport::new("toeplitz", 0.0, tol).with_detail("degree 0: nothing to check")];
    };
    let mut iso = Worst::new();
    let mut vert = Worst::new();
    let (mut n_iso, mut n_vert) = (0, 0);
    for layer in [Layer::First, Layer::Second] {
        for e in rep.letters(layer) {
            let te = rep.creation(e);
            let adj = te.adjoint();
            for f in rep.letters(layer) {
                let lhs = adj.mul(rep.creation(f));
                let rhs = if e == f {
                    rep.vertex_projection(rep.model.rng(e))
                } else {
                    SparseOp::zero(rep.dim())
                };
                iso.see(lhs.sub(&rhs).block_norm_bound(&cols, None), || {
                    format!("({})* {}", name(rep, e), name(rep, f))
                });
                n_iso += 1;
            }
            let p = rep.vertex_projection(rep.model.src(e));
            vert.see(p.mul(te).sub(te).block_norm_bound(&cols, None), || name(rep, e));
            n_vert += 1;
        }
    }
    vec![
        iso.report("isometric_relations", tol, n_iso),
        vert.report("source_projection", tol, n_vert),
    ]
}

/// `Σ_e T_e T_e^* = 1 - P_vacuum` on the Fock space of one layer alone
/// (words with no letter of the other layer), degrees `<= N-1`.
pub fn check_covariance_defect(rep: &FockRep, layer: Layer, tol: f64) -> DefectReport {
    let relation = match layer {
        Layer::First => "covariance_layer1",
        Layer::Second => "covariance_layer2",
    };
    let Some(low) = degree_below(rep, 1) else {
        return DefectReport::new(relation, 0.0, tol).with_detail("degree 0: nothing to check");
    };
    let own: Vec<bool> = rep
        .basis
        .iter()
        .map(|w| w.letters.iter().all(|l| l.0 == layer))
        .collect();
    let cols: Vec<bool> = own.iter().zip(&low).map(|(a, b)| *a && *b).collect();
    let mut sum = SparseOp::zero(rep.dim());
    for e in rep.letters(layer) {
        let t = rep.creation(e);
        sum = sum.add_scaled(&t.mul(&t.adjoint()), Complex64::new(1.0, 0.0));
    }
    let target = SparseOp::identity(rep.dim()).sub(&rep.vacuum_projection());
    let defect = sum.sub(&target).block_norm_bound(&cols, Some(&own));
    DefectReport::new(relation, defect, tol).with_detail(format!(
        "{} edges, {} vacuum vectors",
        rep.model.edges(layer).len(),
        rep.model.vertices.len()
    ))
}

/// `T_e T_f = Σ chi(e ⊗ f)_{f' e'} T_{f'} T_{e'}` for composable `e, f`,
/// on degrees `<= N-2`.
pub fn check_chi_commutation(rep: &FockRep, tol: f64) -> DefectReport {
    let Some(cols) = degree_below(rep, 2) else {
        return DefectReport::new("chi_commutation", 0.0, tol).with_detail("degree below 2: nothing to check");
    };
    let mut worst = Worst::new();
    let mut count = 0;
    for e in rep.letters(Layer::First) {
        for f in rep.letters(Layer::Second) {
            if rep.model.rng(e) != rep.model.src(f) {
                continue;
            }
            let lhs = rep.creation(e).mul(rep.creation(f));
            let mut rhs = SparseOp::zero(rep.dim());
            for &((f2, e2), c) in rep.model.chi_terms(e.1, f.1) {
                let t = rep.creation((Layer::Second, f2)).mul(rep.creation((Layer::First, e2)));
                rhs = rhs.add_scaled(&t, c);
            }
            worst.see(lhs.sub(&rhs).block_norm_bound(&cols, None), || {
                format!("{} {}", name(rep, e), name(rep, f))
            });
            count += 1;
        }
    }
    worst.report("chi_commutation", tol, count)
}

/// Annihilation of the leading letter `x`, computed algebraically: the word
/// is rewritten with `x`'s layer in front (using `chi` for second-layer
/// letters) and the leading `x` is stripped. For unitary `chi` this is the
/// Hilbert-space adjoint of `T_x`.
fn annihilator(rep: &FockRep, x: Letter) -> SparseOp {
    let model = &rep.model;
    let cols = rep
        .basis
        .iter()
        .map(|w| {
            let mut v = Vector::new();
            match x.0 {
                Layer::First => {
                    if w.letters.first() == Some(&x) {
                        v.insert(strip(model, w), Complex64::new(1.0, 0.0));
                    }
                }
                Layer::Second => {
                    for (u, c) in second_first(rep, w) {
                        if u.letters.first() == Some(&x) {
                            *v.entry(strip(model, &u)).or_default() += c;
                        }
                    }
                }
            }
            rep.to_column(&v)
        })
        .collect();
    SparseOp::from_columns(rep.dim(), cols)
}

fn strip(model: &super::FockModel, w: &Word) -> Word {
    let letters = w.letters[1..].to_vec();
    let vertex = letters.first().map_or_else(|| model.rng(w.letters[0]), |&l| model.src(l));
    Word { vertex, letters }
}

/// Moves the first second-layer letter of a normal word to the front with
/// `chi`. The result has that letter first and the rest in normal form.
fn second_first(rep: &FockRep, w: &Word) -> Vec<(Word, Complex64)> {
    let Some(pos) = w.letters.iter().position(|l| l.0 == Layer::Second) else {
        return Vec::new();
    };
    let mut cur = vec![(w.clone(), Complex64::new(1.0, 0.0))];
    for i in (0..pos).rev() {
        let mut next = Vec::new();
        for (u, c) in cur {
            let (e, f) = (u.letters[i].1, u.letters[i + 1].1);
            for &((f2, e2), x) in rep.model.chi_terms(e, f) {
                let mut letters = u.letters.clone();
                letters[i] = (Layer::Second, f2);
                letters[i + 1] = (Layer::First, e2);
                next.push((
                    Word {
                        vertex: u.vertex,
                        letters,
                    },
                    c * x,
                ));
            }
        }
        cur = next;
    }
    cur
}

/// `<T_x ξ, η> = <ξ, A_x η>` for every generator `x` and basis vectors of
/// degree `<= N-2`, where `A_x` is the algebraic annihilator. Creation of
/// second-layer letters uses `chi^{-1}` and annihilation uses `chi`, so the
/// two are adjoint exactly when `chi` is unitary.
pub fn check_left_action_adjoint(rep: &FockRep, tol: f64) -> DefectReport {
    let Some(low) = degree_below(rep, 2) else {
        return DefectReport::new("left_action_adjoint", 0.0, tol).with_detail("degree below 2: nothing to check");
    };
    let mut worst = Worst::new();
    let mut count = 0;
    for layer in [Layer::First, Layer::Second] {
        for x in rep.letters(layer) {
            let diff = rep.creation(x).adjoint().sub(&annihilator(rep, x));
            worst.see(diff.block_norm_bound(&low, Some(&low)), || name(rep, x));
            count += 1;
        }
    }
    worst.report("left_action_adjoint", tol, count)
}

/// Every composable word of length 3 applied to the vacuum, three ways:
/// as a product of creation operators, and normal-ordered by swapping at
/// the leftmost or at the rightmost out-of-order pair.
pub fn check_associativity(rep: &FockRep, tol: f64) -> DefectReport {
    if rep.degree < 3 {
        return DefectReport::new("associativity", 0.0, tol).with_detail("degree below 3: nothing to check");
    }
    let model = &rep.model;
    let letters: Vec<Letter> = rep.letters(Layer::First).chain(rep.letters(Layer::Second)).collect();
    let mut worst = Worst::new();
    let mut count = 0;
    for &a in &letters {
        for &b in &letters {
            if model.rng(a) != model.src(b) {
                continue;
            }
            for &c in &letters {
                if model.rng(b) != model.src(c) {
                    continue;
                }
                let vac = Word {
                    vertex: model.rng(c),
                    letters: Vec::new(),
                };
                let start = rep.index_of(&vac).expect("vacuum is a basis vector");
                let mut v = vec![(start, Complex64::new(1.0, 0.0))];
                for x in [c, b, a] {
                    let t = rep.creation(x);
                    let mut next = Vec::new();
                    for (j, y) in v {
                        next.extend(t.column(j).iter().map(|&(i, z)| (i, z * y)));
                    }
                    v = next;
                }
                let by_ops = SparseOp::from_columns(1, vec![v.into_iter().collect()])
                    .column(0)
                    .to_vec();
                let word = Word {
                    vertex: model.src(a),
                    letters: vec![a, b, c],
                };
                let left = rep.to_column(&model.normal_order(word.clone(), true));
                let right = rep.to_column(&model.normal_order(word, false));
                let d = distance(&by_ops, &left).max(distance(&left, &right));
                worst.see(d, || format!("{} {} {}", name(rep, a), name(rep, b), name(rep, c)));
                count += 1;
            }
        }
    }
    worst.report("associativity", tol, count)
}

/// Euclidean distance of two sparse vectors.
fn distance(a: &[(usize, Complex64)], b: &[(usize, Complex64)]) -> f64 {
    let mut m = std::collections::BTreeMap::<usize, Complex64>::new();
    for &(i, x) in a {
        *m.entry(i).or_default() += x;
    }
    for &(i, x) in b {
        *m.entry(i).or_default() -= x;
    }
    m.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// All checks that apply to the representation.
pub fn check_all(rep: &FockRep, tol: f64) -> Vec<DefectReport> {
    let mut out = check_toeplitz(rep, tol);
    for layer in [Layer::First, Layer::Second] {
        if !rep.model.edges(layer).is_empty() {
            out.push(check_covariance_defect(rep, layer, tol));
        }
    }
    if !rep.model.edges(Layer::Second).is_empty() {
        out.push(check_chi_commutation(rep, tol));
        out.push(check_left_action_adjoint(rep, tol));
        out.push(check_associativity(rep, tol));
    }
    out
}
