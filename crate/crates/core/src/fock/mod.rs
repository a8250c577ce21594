//! Creation operators on the truncated Fock space of two commuting
//! bimodules and numerical checks of the relations they satisfy.
//!
//! Basis vectors are paths in normal form: all first-layer letters, then
//! all second-layer letters, of total length at most `N`, plus one vacuum
//! vector per vertex. A second-layer creation operator is moved into
//! place with `chi^{-1}`. Everything above degree `N` is cut off, so the
//! checks only look at degrees where the truncation cannot interfere.

mod checks;
mod sparse;

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{validate_chi, validate_graph, FiniteGraph, Layer, TwoGraphSpec, UnitaryChi};

pub use checks::{
    check_all, check_associativity, check_chi_commutation, check_covariance_defect,
    check_left_action_adjoint, check_toeplitz, DefectReport, DEFAULT_TOLERANCE,
};
pub use sparse::SparseOp;

/// Default cap on the number of basis vectors.
pub const DEFAULT_BASIS_CAP: usize = 200_000;

/// A letter: layer and edge position in that layer.
pub type Letter = (Layer, usize);

/// Linear combination of words.
pub(crate) type Vector = BTreeMap<Word, Complex64>;

/// A path, or the vacuum at `vertex` when `letters` is empty. `vertex` is
/// always the source of the path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub vertex: usize,
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    /// `(first-layer letters, second-layer letters)`.
    pub fn bidegree(&self) -> (usize, usize) {
        let a = self.letters.iter().filter(|l| l.0 == Layer::First).count();
        (a, self.letters.len() - a)
    }

    fn is_normal(&self) -> bool {
        self.letters
            .windows(2)
            .all(|w| !(w[0].0 == Layer::Second && w[1].0 == Layer::First))
    }
}

type Terms = Vec<((usize, usize), Complex64)>;

/// Vertices, the two edge sets as `(src, rng)` and `chi` with its inverse
/// as sparse coefficient tables.
#[derive(Clone, Debug)]
pub struct FockModel {
    pub vertices: Vec<String>,
    pub edges1: Vec<(usize, usize)>,
    pub edges2: Vec<(usize, usize)>,
    pub names1: Vec<String>,
    pub names2: Vec<String>,
    /// `(e, f) -> Σ c (f', e')`.
    chi: HashMap<(usize, usize), Terms>,
    /// `(f, e) -> Σ c (e', f')`.
    chi_inv: HashMap<(usize, usize), Terms>,
}

fn indexed(g: &FiniteGraph) -> Result<(Vec<(usize, usize)>, Vec<String>)> {
    Ok((g.indexed_edges()?, g.edges.iter().map(|e| e.id.clone()).collect()))
}

impl FockModel {
    /// One layer only; the second is empty.
    pub fn from_graph(g: &FiniteGraph) -> Result<Self> {
        validate_graph(g, false)?;
        let (edges1, names1) = indexed(g)?;
        Ok(FockModel {
            vertices: g.vertices.clone(),
            edges1,
            edges2: Vec::new(),
            names1,
            names2: Vec::new(),
            chi: HashMap::new(),
            chi_inv: HashMap::new(),
        })
    }

    pub fn from_two_graph(spec: &TwoGraphSpec) -> Result<Self> {
        let report = validate_chi(spec)?;
        if !report.valid {
            let codes: Vec<String> = report
                .violations
                .iter()
                .map(|v| format!("{} {}", v.code, v.subject))
                .collect();
            return Err(Error::Invalid(format!("chi is not valid: {}", codes.join("; "))));
        }
        let (edges1, names1) = indexed(&spec.layer(Layer::First))?;
        let (edges2, names2) = indexed(&spec.layer(Layer::Second))?;
        let one = Complex64::new(1.0, 0.0);
        let mut chi = HashMap::new();
        let mut chi_inv = HashMap::new();
        for ((e1, e2), (f2, f1)) in spec.indexed_chi()? {
            chi.insert((e1, e2), vec![((f2, f1), one)]);
            chi_inv.insert((f2, f1), vec![((e1, e2), one)]);
        }
        Ok(FockModel {
            vertices: spec.vertices.clone(),
            edges1,
            edges2,
            names1,
            names2,
            chi,
            chi_inv,
        })
    }

    /// Single vertex, `E_1 = C^m`, `E_2 = C^n`, `chi` given by the matrix.
    /// The inverse is the true matrix inverse, not the adjoint, so a
    /// non-unitary matrix shows up in the adjoint check.
    pub fn from_unitary(u: &UnitaryChi) -> Result<Self> {
        let (m, n) = (u.m(), u.n());
        let inv: DMatrix<Complex64> = u
            .matrix()
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Invalid("chi matrix is singular".into()))?;
        let mut chi = HashMap::new();
        let mut chi_inv = HashMap::new();
        let zero = Complex64::new(0.0, 0.0);
        for i in 0..m {
            for j in 0..n {
                let col = u.source_index(i, j);
                let mut terms = Vec::new();
                for k in 0..n {
                    for l in 0..m {
                        let x = u.matrix()[(u.target_index(k, l), col)];
                        if x != zero {
                            terms.push(((k, l), x));
                        }
                    }
                }
                chi.insert((i, j), terms);
            }
        }
        for k in 0..n {
            for l in 0..m {
                let col = u.target_index(k, l);
                let mut terms = Vec::new();
                for i in 0..m {
                    for j in 0..n {
                        let x = inv[(u.source_index(i, j), col)];
                        if x != zero {
                            terms.push(((i, j), x));
                        }
                    }
                }
                chi_inv.insert((k, l), terms);
            }
        }
        Ok(FockModel {
            vertices: vec!["v".into()],
            edges1: vec![(0, 0); m],
            edges2: vec![(0, 0); n],
            names1: (0..m).map(|i| format!("e{i}")).collect(),
            names2: (0..n).map(|j| format!("f{j}")).collect(),
            chi,
            chi_inv,
        })
    }

    pub fn edges(&self, layer: Layer) -> &[(usize, usize)] {
        match layer {
            Layer::First => &self.edges1,
            Layer::Second => &self.edges2,
        }
    }

    pub fn letter_name(&self, l: Letter) -> &str {
        match l.0 {
            Layer::First => &self.names1[l.1],
            Layer::Second => &self.names2[l.1],
        }
    }

    pub(crate) fn src(&self, l: Letter) -> usize {
        self.edges(l.0)[l.1].0
    }

    pub(crate) fn rng(&self, l: Letter) -> usize {
        self.edges(l.0)[l.1].1
    }

    /// `chi(e ⊗ f)` as `(f', e')` terms.
    pub fn chi_terms(&self, e: usize, f: usize) -> &[((usize, usize), Complex64)] {
        self.chi.get(&(e, f)).map_or(&[], Vec::as_slice)
    }

    /// `chi^{-1}(f ⊗ e)` as `(e', f')` terms.
    pub fn chi_inv_terms(&self, f: usize, e: usize) -> &[((usize, usize), Complex64)] {
        self.chi_inv.get(&(f, e)).map_or(&[], Vec::as_slice)
    }

    /// `x · w` if the path composes.
    pub(crate) fn prepend(&self, x: Letter, w: &Word) -> Option<Word> {
        if self.rng(x) != w.vertex {
            return None;
        }
        let mut letters = Vec::with_capacity(w.letters.len() + 1);
        letters.push(x);
        letters.extend_from_slice(&w.letters);
        Some(Word {
            vertex: self.src(x),
            letters,
        })
    }

    /// Brings a word to normal form by swapping `(second, first)` pairs with
    /// `chi^{-1}`, at the leftmost or the rightmost available position.
    pub fn normal_order(&self, word: Word, leftmost: bool) -> Vector {
        let mut done = Vector::new();
        let mut todo: Vec<(Word, Complex64)> = vec![(word, Complex64::new(1.0, 0.0))];
        while let Some((w, c)) = todo.pop() {
            let spots = w
                .letters
                .windows(2)
                .enumerate()
                .filter(|(_, p)| p[0].0 == Layer::Second && p[1].0 == Layer::First)
                .map(|(i, _)| i);
            let spot = if leftmost { spots.min() } else { spots.max() };
            let Some(i) = spot else {
                *done.entry(w).or_default() += c;
                continue;
            };
            let (f, e) = (w.letters[i].1, w.letters[i + 1].1);
            for &((e2, f2), x) in self.chi_inv_terms(f, e) {
                let mut letters = w.letters.clone();
                letters[i] = (Layer::First, e2);
                letters[i + 1] = (Layer::Second, f2);
                todo.push((
                    Word {
                        vertex: w.vertex,
                        letters,
                    },
                    c * x,
                ));
            }
        }
        done.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        done
    }
}

/// The truncated Fock space with its creation operators.
#[derive(Clone, Debug)]
pub struct FockRep {
    pub model: FockModel,
    pub degree: usize,
    pub basis: Vec<Word>,
    index: HashMap<Word, usize>,
    creation1: Vec<SparseOp>,
    creation2: Vec<SparseOp>,
}

impl FockRep {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn creation(&self, l: Letter) -> &SparseOp {
        match l.0 {
            Layer::First => &self.creation1[l.1],
            Layer::Second => &self.creation2[l.1],
        }
    }

    pub fn letters(&self, layer: Layer) -> impl Iterator<Item = Letter> + '_ {
        (0..self.model.edges(layer).len()).map(move |i| (layer, i))
    }

    /// Projection onto paths starting at vertex `v`.
    pub fn vertex_projection(&self, v: usize) -> SparseOp {
        let mask: Vec<bool> = self.basis.iter().map(|w| w.vertex == v).collect();
        SparseOp::diagonal(&mask)
    }

    pub fn vacuum_projection(&self) -> SparseOp {
        let mask: Vec<bool> = self.basis.iter().map(|w| w.letters.is_empty()).collect();
        SparseOp::diagonal(&mask)
    }

    /// Basis vectors of degree at most `d`.
    pub fn degree_mask(&self, d: usize) -> Vec<bool> {
        self.basis.iter().map(|w| w.degree() <= d).collect()
    }

    pub(crate) fn to_column(&self, v: &Vector) -> Vec<(usize, Complex64)> {
        v.iter()
            .filter_map(|(w, &c)| self.index_of(w).map(|i| (i, c)))
            .collect()
    }

    #[cfg(test)]
    pub(crate) fn creation_mut(&mut self, l: Letter) -> &mut SparseOp {
        match l.0 {
            Layer::First => &mut self.creation1[l.1],
            Layer::Second => &mut self.creation2[l.1],
        }
    }
}

/// Normal-form paths: a first-layer path followed by a second-layer path.
fn enumerate_basis(model: &FockModel, degree: usize, cap: usize) -> Result<Vec<Word>> {
    let mut all: Vec<Word> = (0..model.vertices.len())
        .map(|v| Word {
            vertex: v,
            letters: Vec::new(),
        })
        .collect();
    // paths are grown at the front: second-layer words first, then first-layer
    // letters prepended, which keeps every word in normal form
    let mut frontier = all.clone();
    for _ in 0..degree {
        let mut next = Vec::new();
        for w in &frontier {
            let only_second = w.letters.iter().all(|l| l.0 == Layer::Second);
            let layers: &[Layer] = if only_second {
                &[Layer::First, Layer::Second]
            } else {
                &[Layer::First]
            };
            for &layer in layers {
                for i in 0..model.edges(layer).len() {
                    if let Some(x) = model.prepend((layer, i), w) {
                        next.push(x);
                    }
                }
            }
        }
        if all.len() + next.len() > cap {
            return Err(Error::Resource(format!(
                "Fock basis up to degree {degree} has more than {cap} vectors \
                 (already {} at degree {})",
                all.len() + next.len(),
                next.first().map_or(0, Word::degree)
            )));
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.sort_by(|a, b| {
        (a.degree(), a.bidegree().1, &a.letters, a.vertex).cmp(&(
            b.degree(),
            b.bidegree().1,
            &b.letters,
            b.vertex,
        ))
    });
    Ok(all)
}

pub fn build_fock(model: &FockModel, degree: usize) -> Result<FockRep> {
    build_fock_with_cap(model, degree, DEFAULT_BASIS_CAP)
}

pub fn build_fock_with_cap(model: &FockModel, degree: usize, cap: usize) -> Result<FockRep> {
    let basis = enumerate_basis(model, degree, cap)?;
    debug_assert!(basis.iter().all(Word::is_normal));
    let index: HashMap<Word, usize> = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut rep = FockRep {
        model: model.clone(),
        degree,
        basis,
        index,
        creation1: Vec::new(),
        creation2: Vec::new(),
    };
    let dim = rep.dim();
    for layer in [Layer::First, Layer::Second] {
        let mut ops = Vec::new();
        for i in 0..model.edges(layer).len() {
            let mut cols = Vec::with_capacity(dim);
            for w in &rep.basis {
                let col = match model.prepend((layer, i), w) {
                    Some(x) if x.degree() <= degree => {
                        let v = match layer {
                            Layer::First => Vector::from([(x, Complex64::new(1.0, 0.0))]),
                            Layer::Second => model.normal_order(x, true),
                        };
                        rep.to_column(&v)
                    }
                    _ => Vec::new(),
                };
                cols.push(col);
            }
            ops.push(SparseOp::from_columns(dim, cols));
        }
        match layer {
            Layer::First => rep.creation1 = ops,
            Layer::Second => rep.creation2 = ops,
        }
    }
    Ok(rep)
}
