//! Planar rooted trees and the tree expansion of cumulant derivatives.
//!
//! An admissible tree with marks 1..n is a planar rooted tree whose internal
//! vertices all have >= 2 children; the root boundary edge carries mark 1 and
//! the n-1 leaves carry marks 2..n in left-to-right order. Such trees are
//! counted by the little Schroeder numbers (1, 1, 3, 11, 45 for n = 2..6).
//!
//! The characteristic path is the unique path from the root mark to the
//! highest mark n (always the rightmost leaf). The evaluation rules turn a
//! tree into one signed product per dummy assignment:
//!   - every edge on the path contributes a second-derivative function
//!     K_{ab} of the cumulant series (root-closest end first);
//!   - every edge off the path contributes the scalar covariance entry;
//!   - every vertex on the path contributes L_w composed with the conjugate
//!     field (w = the vertex's half-edge word, parent half first, children
//!     left to right); off the path it contributes the scalar coefficient
//!     of L at w;
//!   - the sign is (-1)^(number of internal vertices);
//!   - dummies run over the whole alphabet and are summed.
//!
//! Factors multiply in reverse-anticlockwise order: children right to left,
//! then the vertex, then the parent edge, with the root edge last. Dummy
//! indices are assigned in preorder, parent half before children.
//!
//! Invariants:
//!   - enumeration is duplicate-free and complete (tested against an
//!     independent brute-force construction), in canonical structural order;
//!   - summing the evaluation over all trees with marks 1..n decorated by a
//!     word w of length n reproduces the iterated left derivative of the
//!     cumulant series along w.

use std::collections::BTreeMap;

use crate::action::EffectiveAction;
use crate::error::CoreError;
use crate::field::Field;
use crate::report::VerifyReport;
use crate::scalar::Scalar;
use crate::series::Series;
use crate::word::{words_of_degree, Letter, Word};

/// Planar rooted tree; internal nodes keep their children in planar order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum TreeNode {
    Leaf,
    Node(Vec<TreeNode>),
}

impl TreeNode {
    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf => 1,
            TreeNode::Node(children) => children.iter().map(TreeNode::leaf_count).sum(),
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            TreeNode::Leaf => 0,
            TreeNode::Node(children) => {
                1 + children.iter().map(TreeNode::internal_count).sum::<usize>()
            }
        }
    }

    /// Number of edges joining two internal vertices.
    pub fn internal_edge_count(&self) -> usize {
        match self {
            TreeNode::Leaf => 0,
            TreeNode::Node(children) => children
                .iter()
                .map(|c| match c {
                    TreeNode::Leaf => 0,
                    TreeNode::Node(_) => 1 + c.internal_edge_count(),
                })
                .sum(),
        }
    }

    /// Arities (half-edge counts, children plus the parent edge) of all
    /// internal vertices, sorted descending.
    pub fn arities(&self) -> Vec<usize> {
        fn walk(t: &TreeNode, out: &mut Vec<usize>) {
            if let TreeNode::Node(children) = t {
                out.push(children.len() + 1);
                for c in children {
                    walk(c, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

/// Admissible tree with marks 1..n: root mark 1 on the root edge, leaf marks
/// 2..n left to right. The root itself is a Leaf exactly when n = 2.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct AdmissibleTree {
    pub marks: usize,
    pub root: TreeNode,
}

/// An admissible tree whose marks 1..n are replaced by the letters of a word.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DecoratedTree {
    pub tree: AdmissibleTree,
    pub word: Word,
}

impl DecoratedTree {
    pub fn new(tree: AdmissibleTree, word: Word) -> Result<Self, CoreError> {
        if word.degree() != tree.marks {
            return Err(CoreError::InvalidTreeMarks { n: word.degree() });
        }
        Ok(DecoratedTree { tree, word })
    }
}

/// All successors of a tree under the two growth moves along the
/// characteristic path: append a new last child at a path vertex, or
/// subdivide a path edge (including the root edge) with a new vertex whose
/// second child is the new leaf.
fn successors(t: &TreeNode) -> Vec<TreeNode> {
    let mut out = Vec::new();
    // subdivide the edge above `t`
    out.push(TreeNode::Node(vec![t.clone(), TreeNode::Leaf]));
    if let TreeNode::Node(children) = t {
        // append a new last child here
        let mut grown = children.clone();
        grown.push(TreeNode::Leaf);
        out.push(TreeNode::Node(grown));
        // continue down the path through the last child
        let last = children.len() - 1;
        for s in successors(&children[last]) {
            let mut next = children.clone();
            next[last] = s;
            out.push(TreeNode::Node(next));
        }
    }
    out
}

/// All admissible trees with marks 1..n, in canonical structural order.
pub fn enumerate_admissible(n: usize) -> Result<Vec<AdmissibleTree>, CoreError> {
    if n < 2 {
        return Err(CoreError::InvalidTreeMarks { n });
    }
    let mut layer = vec![TreeNode::Leaf];
    for _ in 2..n {
        let mut next = std::collections::BTreeSet::new();
        let mut produced = 0usize;
        for t in &layer {
            for s in successors(t) {
                produced += 1;
                next.insert(s);
            }
        }
        debug_assert_eq!(produced, next.len(), "growth moves must be injective");
        layer = next.into_iter().collect();
    }
    Ok(layer
        .into_iter()
        .map(|root| AdmissibleTree { marks: n, root })
        .collect())
}

/// Independent check: all planar rooted trees with the given number of
/// leaves whose internal vertices have >= 2 children each.
pub fn brute_force_trees(leaves: usize) -> Vec<TreeNode> {
    fn build(leaves: usize, memo: &mut BTreeMap<usize, Vec<TreeNode>>) -> Vec<TreeNode> {
        if let Some(v) = memo.get(&leaves) {
            return v.clone();
        }
        let mut out = Vec::new();
        if leaves == 1 {
            out.push(TreeNode::Leaf);
        } else {
            // split the leaves over k >= 2 ordered children
            fn compositions(
                total: usize,
                slot_min: usize,
                acc: &mut Vec<usize>,
                sink: &mut Vec<Vec<usize>>,
            ) {
                if total == 0 {
                    if acc.len() >= slot_min {
                        sink.push(acc.clone());
                    }
                    return;
                }
                for first in 1..=total {
                    acc.push(first);
                    compositions(total - first, slot_min, acc, sink);
                    acc.pop();
                }
            }
            let mut splits = Vec::new();
            compositions(leaves, 2, &mut Vec::new(), &mut splits);
            for split in splits {
                let choices: Vec<Vec<TreeNode>> = split.iter().map(|&l| build(l, memo)).collect();
                let mut stack: Vec<Vec<TreeNode>> = vec![Vec::new()];
                for options in &choices {
                    let mut grown = Vec::new();
                    for partial in &stack {
                        for opt in options {
                            let mut p = partial.clone();
                            p.push(opt.clone());
                            grown.push(p);
                        }
                    }
                    stack = grown;
                }
                for children in stack {
                    out.push(TreeNode::Node(children));
                }
            }
        }
        out.sort();
        memo.insert(leaves, out.clone());
        out
    }
    build(leaves, &mut BTreeMap::new())
}

/// The characteristic path from mark 1 to mark n: the root edge followed by
/// every last-child edge. Vertices are given by child-index addresses.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharacteristicPath {
    /// Addresses of the internal vertices on the path, root first; the root
    /// vertex has the empty address.
    pub vertices: Vec<Vec<usize>>,
    /// Edges on the path: the root edge plus one edge per listed vertex.
    pub edge_count: usize,
}

pub fn characteristic_path(t: &AdmissibleTree) -> CharacteristicPath {
    let mut vertices = Vec::new();
    let mut addr = Vec::new();
    let mut cur = &t.root;
    while let TreeNode::Node(children) = cur {
        vertices.push(addr.clone());
        let last = children.len() - 1;
        addr.push(last);
        cur = &children[last];
    }
    CharacteristicPath {
        edge_count: vertices.len() + 1,
        vertices,
    }
}

/// One end of an edge or vertex half-edge in a symbolic term.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum End {
    /// A boundary mark 1..n.
    External(usize),
    /// A summed index e1, e2, ...
    Dummy(usize),
}

/// One factor of a symbolic tree term, in multiplication order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FactorSym {
    /// Second-derivative function K_{ab} of the cumulant series (on path).
    EdgeFun { from: End, to: End },
    /// Scalar covariance entry (off path).
    EdgeScalar { from: End, to: End },
    /// L_w composed with the conjugate field (vertex on path).
    VertexFun { ends: Vec<End> },
    /// Scalar coefficient of L at w (vertex off path).
    VertexScalar { ends: Vec<End> },
}

/// A symbolic evaluation term: sign, ordered factors, number of dummies.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeTerm {
    pub sign: i64,
    pub factors: Vec<FactorSym>,
    pub dummy_count: usize,
}

enum Ann {
    Leaf {
        mark: usize,
    },
    Node {
        dummies: Vec<usize>,
        children: Vec<Ann>,
    },
}

fn annotate(node: &TreeNode, next_dummy: &mut usize, next_mark: &mut usize) -> Ann {
    match node {
        TreeNode::Leaf => {
            let mark = *next_mark;
            *next_mark += 1;
            Ann::Leaf { mark }
        }
        TreeNode::Node(children) => {
            let dummies: Vec<usize> = (0..=children.len()).map(|i| *next_dummy + i).collect();
            *next_dummy += children.len() + 1;
            let children = children
                .iter()
                .map(|c| annotate(c, next_dummy, next_mark))
                .collect();
            Ann::Node { dummies, children }
        }
    }
}

fn emit(ann: &Ann, on_path: bool, factors: &mut Vec<FactorSym>) {
    if let Ann::Node { dummies, children } = ann {
        let last = children.len() - 1;
        for (idx, child) in children.iter().enumerate().rev() {
            let slot = End::Dummy(dummies[idx + 1]);
            let child_on_path = on_path && idx == last;
            match child {
                Ann::Leaf { mark } => {
                    let (from, to) = (slot, End::External(*mark));
                    factors.push(if child_on_path {
                        FactorSym::EdgeFun { from, to }
                    } else {
                        FactorSym::EdgeScalar { from, to }
                    });
                }
                Ann::Node { dummies: cd, .. } => {
                    emit(child, child_on_path, factors);
                    let (from, to) = (slot, End::Dummy(cd[0]));
                    factors.push(if child_on_path {
                        FactorSym::EdgeFun { from, to }
                    } else {
                        FactorSym::EdgeScalar { from, to }
                    });
                }
            }
        }
        let ends: Vec<End> = dummies.iter().map(|&d| End::Dummy(d)).collect();
        factors.push(if on_path {
            FactorSym::VertexFun { ends }
        } else {
            FactorSym::VertexScalar { ends }
        });
    }
}

/// The symbolic evaluation term of a tree, with dummies numbered in preorder
/// and factors in reverse-anticlockwise order ending at the root edge.
pub fn symbolic_term(t: &AdmissibleTree) -> TreeTerm {
    let mut next_dummy = 1usize;
    let mut next_mark = 2usize;
    let ann = annotate(&t.root, &mut next_dummy, &mut next_mark);
    let mut factors = Vec::new();
    emit(&ann, true, &mut factors);
    let root_end = match &ann {
        Ann::Leaf { mark } => End::External(*mark),
        Ann::Node { dummies, .. } => End::Dummy(dummies[0]),
    };
    factors.push(FactorSym::EdgeFun {
        from: End::External(1),
        to: root_end,
    });
    TreeTerm {
        sign: if t.root.internal_count().is_multiple_of(2) {
            1
        } else {
            -1
        },
        factors,
        dummy_count: next_dummy - 1,
    }
}

fn render_end(e: &End) -> String {
    match e {
        End::External(m) => m.to_string(),
        End::Dummy(d) => format!("e{d}"),
    }
}

fn render_ends(ends: &[End]) -> String {
    ends.iter().map(render_end).collect::<Vec<_>>().join(",")
}

/// Renders a term like "-K[e3,3] K0[e2,2] L[e1,e2,e3] K[1,e1]".
pub fn render_term(term: &TreeTerm) -> String {
    let mut parts = Vec::new();
    for f in &term.factors {
        parts.push(match f {
            FactorSym::EdgeFun { from, to } => {
                format!("K[{},{}]", render_end(from), render_end(to))
            }
            FactorSym::EdgeScalar { from, to } => {
                format!("K0[{},{}]", render_end(from), render_end(to))
            }
            FactorSym::VertexFun { ends } => format!("L[{}]", render_ends(ends)),
            FactorSym::VertexScalar { ends } => format!("L0[{}]", render_ends(ends)),
        });
    }
    let body = parts.join(" ");
    if term.sign < 0 {
        format!("-{body}")
    } else {
        body
    }
}

/// Evaluator with caches for the second-derivative functions K_{ab} and the
/// composed derivatives L_w(conjugate field). An output-degree cap truncates
/// every cached factor; truncation commutes with Cauchy products and with
/// composition along a constant-free field, so capped results agree with the
/// uncapped ones up to the cap.
pub struct FeynmanEvaluator<'a, S: Scalar> {
    action: &'a EffectiveAction<S>,
    conjugate: Field<S>,
    cap: usize,
    kfun: BTreeMap<(Letter, Letter), Series<S>>,
    lfun: BTreeMap<Word, Series<S>>,
}

impl<'a, S: Scalar> FeynmanEvaluator<'a, S> {
    pub fn new(action: &'a EffectiveAction<S>) -> Self {
        Self::with_cap(action, action.cumulants.max_degree())
    }

    /// Evaluator whose outputs are only needed up to degree `cap`.
    pub fn with_cap(action: &'a EffectiveAction<S>, cap: usize) -> Self {
        let n = action.cumulants.alphabet();
        let mut kfun = BTreeMap::new();
        for a in 1..=n {
            for b in 1..=n {
                kfun.insert(
                    (a, b),
                    action
                        .cumulants
                        .iterated_derivative(&Word::from_letters(vec![a, b]))
                        .truncate(cap),
                );
            }
        }
        FeynmanEvaluator {
            action,
            conjugate: action.conjugate.truncate(cap),
            cap,
            kfun,
            lfun: BTreeMap::new(),
        }
    }

    fn ensure_l(&mut self, w: &Word) -> Result<(), CoreError> {
        if !self.lfun.contains_key(w) {
            let composed = self
                .action
                .ell
                .iterated_derivative(w)
                .truncate(self.cap)
                .compose(&self.conjugate)?;
            self.lfun.insert(w.clone(), composed);
        }
        Ok(())
    }

    /// Output precision of a single tree's value.
    fn tree_precision(&self, term: &TreeTerm) -> usize {
        let d = self.action.cumulants.max_degree();
        let mut prec = d.saturating_sub(2).min(self.cap); // the root edge at least
        for f in &term.factors {
            if let FactorSym::VertexFun { ends } = f {
                prec = prec.min(d.saturating_sub(ends.len()));
            }
        }
        prec
    }

    /// Fills the L cache with every key the given vertex can request once
    /// its dummy ends range over the whole alphabet.
    fn warm_vertex(&mut self, ends: &[End], word: &Word) -> Result<(), CoreError> {
        let n = self.action.cumulants.alphabet();
        let dummy_positions: Vec<usize> = ends
            .iter()
            .enumerate()
            .filter_map(|(i, e)| matches!(e, End::Dummy(_)).then_some(i))
            .collect();
        let mut key: Vec<Letter> = ends
            .iter()
            .map(|e| match e {
                End::External(m) => word.letters()[*m - 1],
                End::Dummy(_) => 1,
            })
            .collect();
        let mut choice: Vec<Letter> = vec![1; dummy_positions.len()];
        loop {
            for (c, &pos) in choice.iter().zip(&dummy_positions) {
                key[pos] = *c;
            }
            self.ensure_l(&Word::from_letters(key.clone()))?;
            let mut pos = 0;
            loop {
                if pos == choice.len() {
                    return Ok(());
                }
                if choice[pos] < n {
                    choice[pos] += 1;
                    break;
                }
                choice[pos] = 1;
                pos += 1;
            }
        }
    }

    /// Walks the factor list left to right, binding each dummy the first time
    /// a factor needs it and folding every factor whose ends are all bound.
    /// The walk visits exactly the assignments of the plain nested loop while
    /// sharing the scalar and series prefixes common to a binding; folds are
    /// strictly in factor order, so the non-commutative product is untouched.
    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        term: &TreeTerm,
        word: &Word,
        from: usize,
        assignment: &mut [Letter],
        scal: &S,
        prefix: Option<&Series<S>>,
        acc: &mut Series<S>,
    ) {
        let n = self.action.cumulants.alphabet();
        let resolve = |assignment: &[Letter], e: &End| -> Option<Letter> {
            match e {
                End::External(m) => Some(word.letters()[*m - 1]),
                End::Dummy(d) => (assignment[*d - 1] != 0).then(|| assignment[*d - 1]),
            }
        };

        let mut scal = scal.clone();
        let mut local: Option<Series<S>> = None;
        for (k, factor) in term.factors.iter().enumerate().skip(from) {
            let ends: Vec<&End> = match factor {
                FactorSym::EdgeFun { from, to } | FactorSym::EdgeScalar { from, to } => {
                    vec![from, to]
                }
                FactorSym::VertexFun { ends } | FactorSym::VertexScalar { ends } => {
                    ends.iter().collect()
                }
            };
            if let Some(&unbound) = ends.iter().find_map(|e| match e {
                End::Dummy(d) if assignment[*d - 1] == 0 => Some(d),
                _ => None,
            }) {
                // bind the blocking dummy and recurse over the alphabet
                for letter in 1..=n {
                    assignment[unbound - 1] = letter;
                    self.walk(
                        term,
                        word,
                        k,
                        assignment,
                        &scal,
                        local.as_ref().or(prefix),
                        acc,
                    );
                }
                assignment[unbound - 1] = 0;
                return;
            }
            let letters = |assignment: &[Letter]| -> Vec<Letter> {
                ends.iter()
                    .map(|e| resolve(assignment, e).unwrap())
                    .collect()
            };
            match factor {
                FactorSym::EdgeScalar { .. } => {
                    let ab = letters(assignment);
                    scal = scal.times(
                        self.action
                            .covariance
                            .get((ab[0] - 1) as usize, (ab[1] - 1) as usize),
                    );
                }
                FactorSym::VertexScalar { .. } => {
                    let w = Word::from_letters(letters(assignment));
                    scal = scal.times(&self.action.ell.coefficient(&w));
                }
                FactorSym::EdgeFun { .. } => {
                    let ab = letters(assignment);
                    let f = &self.kfun[&(ab[0], ab[1])];
                    local = Some(match local.as_ref().or(prefix) {
                        None => f.clone(),
                        Some(p) => p.cauchy(f),
                    });
                }
                FactorSym::VertexFun { .. } => {
                    let w = Word::from_letters(letters(assignment));
                    let f = &self.lfun[&w];
                    local = Some(match local.as_ref().or(prefix) {
                        None => f.clone(),
                        Some(p) => p.cauchy(f),
                    });
                }
            }
            if scal.is_zero() {
                return; // every deeper assignment shares this zero factor
            }
            if let Some(p) = &local {
                if p.is_zero() {
                    return;
                }
            }
        }

        let prod = local
            .or_else(|| prefix.cloned())
            .expect("every term has a root edge");
        let mut value = prod.scale(&scal);
        if term.sign < 0 {
            value = value.neg();
        }
        *acc = acc.add(&value);
    }

    /// Sum of the term's signed products over all dummy assignments.
    pub fn evaluate(&mut self, decorated: &DecoratedTree) -> Result<Series<S>, CoreError> {
        let n = self.action.cumulants.alphabet();
        let word = &decorated.word;
        for &l in word.letters() {
            if l == 0 || l > n {
                return Err(CoreError::LetterOutOfRange {
                    letter: l,
                    alphabet: n,
                });
            }
        }
        let term = symbolic_term(&decorated.tree);
        let prec = self.tree_precision(&term);
        for factor in &term.factors {
            if let FactorSym::VertexFun { ends } = factor {
                self.warm_vertex(ends, word)?;
            }
        }
        let mut acc = Series::zero(n, prec);
        let mut assignment: Vec<Letter> = vec![0; term.dummy_count];
        self.walk(&term, word, 0, &mut assignment, &S::one(), None, &mut acc);
        Ok(acc)
    }
}

/// Evaluates one decorated tree against an effective-action bundle.
pub fn feynman_evaluate<S: Scalar>(
    action: &EffectiveAction<S>,
    decorated: &DecoratedTree,
) -> Result<Series<S>, CoreError> {
    FeynmanEvaluator::new(action).evaluate(decorated)
}

/// Sum of the evaluations of all trees with marks 1..|w| decorated by w.
pub fn tree_expansion<S: Scalar>(
    action: &EffectiveAction<S>,
    w: &Word,
) -> Result<Series<S>, CoreError> {
    tree_expansion_to(action, w, action.cumulants.max_degree())
}

/// Tree expansion computed only up to output degree `degree`.
pub fn tree_expansion_to<S: Scalar>(
    action: &EffectiveAction<S>,
    w: &Word,
    degree: usize,
) -> Result<Series<S>, CoreError> {
    let trees = enumerate_admissible(w.degree())?;
    let mut evaluator = FeynmanEvaluator::with_cap(action, degree);
    let mut acc: Option<Series<S>> = None;
    for tree in trees {
        let value = evaluator.evaluate(&DecoratedTree::new(tree, w.clone())?)?;
        acc = Some(match acc {
            None => value,
            Some(a) => a.add(&value),
        });
    }
    Ok(acc.expect("at least one tree for every n >= 2"))
}

/// For every word of length 2..=n_max, checks that the tree expansion equals
/// the iterated left derivative of the cumulant series, to `degree`.
pub fn verify_theorem<S: Scalar>(
    action: &EffectiveAction<S>,
    n_max: usize,
    degree: usize,
    tol: f64,
) -> Result<Vec<VerifyReport>, CoreError> {
    let n = action.cumulants.alphabet();
    let d = action.cumulants.max_degree();
    if d < n_max + degree {
        return Err(CoreError::PrecisionTooLow {
            needed: n_max + degree,
            have: d,
        });
    }
    let mut evaluator = FeynmanEvaluator::with_cap(action, degree);
    let mut reports = Vec::new();
    for len in 2..=n_max {
        let trees = enumerate_admissible(len)?;
        for w in words_of_degree(n, len) {
            let mut lhs = Series::zero(n, degree);
            for tree in &trees {
                let value = evaluator.evaluate(&DecoratedTree::new(tree.clone(), w.clone())?)?;
                lhs = lhs.add(&value);
            }
            let rhs = action.cumulants.iterated_derivative(&w).truncate(degree);
            reports.push(VerifyReport::compare_series(
                format!("tree_expansion[w={w}]"),
                &lhs,
                &rhs,
                tol,
            ));
        }
    }
    Ok(reports)
}

/// One aggregated row of the single-letter tree table: all trees of the same
/// order sharing a monomial pattern, keyed by the number of internal edges
/// (the power of the covariance after normalization) and the sorted vertex
/// arities; multiplicity carries the sign (-1)^(vertex count).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeTableRow {
    pub order: usize,
    pub internal_edges: usize,
    pub arities: Vec<usize>,
    pub multiplicity: i64,
}

/// Groups all trees of orders 2..=max_order by monomial pattern. For a
/// single letter, the order-n relation reads
///   k_n * k_2^{-n} = sum over rows of
///       multiplicity * k_2^{internal_edges} * product of l_{arity}.
pub fn univariate_tree_table(max_order: usize) -> Result<Vec<TreeTableRow>, CoreError> {
    if max_order < 2 {
        return Err(CoreError::UnsupportedOrder { order: max_order });
    }
    let mut rows = Vec::new();
    for order in 2..=max_order {
        let mut groups: BTreeMap<(usize, Vec<usize>), (usize, usize)> = BTreeMap::new();
        for tree in enumerate_admissible(order)? {
            let key = (tree.root.internal_edge_count(), tree.root.arities());
            let entry = groups.entry(key).or_insert((0, tree.root.internal_count()));
            entry.0 += 1;
        }
        for ((internal_edges, arities), (count, vertices)) in groups {
            let sign = if vertices % 2 == 0 { 1 } else { -1 };
            rows.push(TreeTableRow {
                order,
                internal_edges,
                arities,
                multiplicity: sign * count as i64,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::effective_action;
    use num::rational::BigRational;

    type Q = BigRational;

    fn qi(v: i64) -> Q {
        <Q as Scalar>::from_int(v)
    }

    fn univariate_k(pairs: &[(usize, i64)], d: usize) -> Series<Q> {
        Series::from_entries(
            1,
            d,
            pairs
                .iter()
                .map(|&(deg, v)| (Word::repeated(1, deg), qi(v)))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn counts_match_brute_force() {
        let expected = [1usize, 1, 3, 11, 45];
        for (i, n) in (2..=6).enumerate() {
            let ours = enumerate_admissible(n).unwrap();
            assert_eq!(ours.len(), expected[i], "n = {n}");
            let brute = brute_force_trees(n - 1);
            let our_roots: Vec<&TreeNode> = ours.iter().map(|t| &t.root).collect();
            assert_eq!(brute.len(), ours.len(), "n = {n}");
            for (a, b) in our_roots.iter().zip(brute.iter()) {
                assert_eq!(**a, *b, "n = {n}: canonical orders must agree");
            }
        }
        assert!(matches!(
            enumerate_admissible(1),
            Err(CoreError::InvalidTreeMarks { n: 1 })
        ));
    }

    #[test]
    fn characteristic_path_shapes() {
        let edge = &enumerate_admissible(2).unwrap()[0];
        let p = characteristic_path(edge);
        assert!(p.vertices.is_empty());
        assert_eq!(p.edge_count, 1);

        let corolla = &enumerate_admissible(3).unwrap()[0];
        let p = characteristic_path(corolla);
        assert_eq!(p.vertices, vec![Vec::<usize>::new()]);
        assert_eq!(p.edge_count, 2);

        // Node([Node([L,L]), L]): path is root edge then the last-child edge.
        let t = AdmissibleTree {
            marks: 4,
            root: TreeNode::Node(vec![
                TreeNode::Node(vec![TreeNode::Leaf, TreeNode::Leaf]),
                TreeNode::Leaf,
            ]),
        };
        let p = characteristic_path(&t);
        assert_eq!(p.vertices, vec![Vec::<usize>::new()]);
        assert_eq!(p.edge_count, 2);
    }

    #[test]
    fn symbolic_terms_match_frozen_strings() {
        let n2 = &enumerate_admissible(2).unwrap()[0];
        assert_eq!(render_term(&symbolic_term(n2)), "K[1,2]");

        let n3 = &enumerate_admissible(3).unwrap()[0];
        assert_eq!(
            render_term(&symbolic_term(n3)),
            "-K[e3,3] K0[e2,2] L[e1,e2,e3] K[1,e1]"
        );

        let n4 = enumerate_admissible(4).unwrap();
        let rendered: Vec<String> = n4.iter().map(|t| render_term(&symbolic_term(t))).collect();
        assert_eq!(
            rendered,
            vec![
                "-K[e4,4] K0[e3,3] K0[e2,2] L[e1,e2,e3,e4] K[1,e1]".to_string(),
                "K[e6,4] K0[e5,3] L[e4,e5,e6] K[e3,e4] K0[e2,2] L[e1,e2,e3] K[1,e1]".to_string(),
                "K[e3,4] K0[e6,3] K0[e5,2] L0[e4,e5,e6] K0[e2,e4] L[e1,e2,e3] K[1,e1]".to_string(),
            ]
        );
    }

    #[test]
    fn two_point_tree_is_the_second_derivative() {
        let k = Series::from_entries(
            2,
            4,
            vec![
                (Word::from_slice(&[1, 1]), qi(2)),
                (Word::from_slice(&[2, 2]), qi(1)),
                (Word::from_slice(&[1, 2, 1]), qi(3)),
            ],
        )
        .unwrap();
        let a = effective_action(&k).unwrap();
        let tree = enumerate_admissible(2).unwrap().remove(0);
        for w in words_of_degree(2, 2) {
            let value = feynman_evaluate(&a, &DecoratedTree::new(tree.clone(), w.clone()).unwrap())
                .unwrap();
            let expect = a.cumulants.iterated_derivative(&w);
            let (_, bad) = value.agree_up_to(&expect, 0.0);
            assert!(bad.is_empty(), "w = {w}: {bad:?}");
        }
    }

    #[test]
    fn three_point_value_at_zero_is_k3() {
        let k = univariate_k(&[(2, 1), (3, 5), (4, -2)], 5);
        let a = effective_action(&k).unwrap();
        let expansion = tree_expansion(&a, &Word::repeated(1, 3)).unwrap();
        assert_eq!(expansion.constant_term(), qi(5));
        // single tree: -k2^3 * l3 with k2 = 1, l3 = -5
        assert_eq!(a.ell.coefficient(&Word::repeated(1, 3)), qi(-5));
    }

    #[test]
    fn theorem_holds_univariate() {
        let k = univariate_k(&[(2, 2), (3, 1), (4, -1), (5, 2), (6, 3)], 6);
        let a = effective_action(&k).unwrap();
        for r in verify_theorem(&a, 4, 2, 0.0).unwrap() {
            assert!(r.passed(), "{}: {:?}", r.identity, r.violations);
        }
    }

    #[test]
    fn theorem_holds_two_letters() {
        let k = Series::from_entries(
            2,
            5,
            vec![
                (Word::from_slice(&[1, 1]), qi(1)),
                (Word::from_slice(&[1, 2]), qi(1)),
                (Word::from_slice(&[2, 1]), qi(-1)),
                (Word::from_slice(&[2, 2]), qi(2)),
                (Word::from_slice(&[1, 2, 1]), qi(3)),
                (Word::from_slice(&[2, 1, 1, 2]), qi(1)),
                (Word::from_slice(&[1, 1, 1, 1, 2]), qi(-2)),
            ],
        )
        .unwrap();
        let a = effective_action(&k).unwrap();
        for r in verify_theorem(&a, 3, 2, 0.0).unwrap() {
            assert!(r.passed(), "{}: {:?}", r.identity, r.violations);
        }
    }

    #[test]
    fn theorem_needs_enough_precision() {
        let k = univariate_k(&[(2, 1)], 4);
        let a = effective_action(&k).unwrap();
        assert!(matches!(
            verify_theorem(&a, 4, 2, 0.0),
            Err(CoreError::PrecisionTooLow { needed: 6, have: 4 })
        ));
    }

    #[test]
    fn table_rows_are_frozen() {
        let rows = univariate_tree_table(6).unwrap();
        let shape: Vec<(usize, usize, Vec<usize>, i64)> = rows
            .iter()
            .map(|r| (r.order, r.internal_edges, r.arities.clone(), r.multiplicity))
            .collect();
        assert_eq!(
            shape,
            vec![
                (2, 0, vec![], 1),
                (3, 0, vec![3], -1),
                (4, 0, vec![4], -1),
                (4, 1, vec![3, 3], 2),
                (5, 0, vec![5], -1),
                (5, 1, vec![4, 3], 5),
                (5, 2, vec![3, 3, 3], -5),
                (6, 0, vec![6], -1),
                (6, 1, vec![4, 4], 3),
                (6, 1, vec![5, 3], 6),
                (6, 2, vec![4, 3, 3], -21),
                (6, 3, vec![3, 3, 3, 3], 14),
            ]
        );
        let totals: Vec<i64> = (2..=6)
            .map(|n| {
                rows.iter()
                    .filter(|r| r.order == n)
                    .map(|r| r.multiplicity.abs())
                    .sum()
            })
            .collect();
        assert_eq!(totals, vec![1, 1, 3, 11, 45]);
    }

    #[test]
    fn table_reproduces_normalized_cumulants() {
        // k2 != 1 exercises the covariance powers in the table weights.
        let k = univariate_k(&[(2, 2), (3, 3), (4, -1), (5, 2), (6, 5)], 6);
        let a = effective_action(&k).unwrap();
        let k2 = qi(2);
        let k2_inv = <Q as Scalar>::recip(&k2).unwrap();
        let ll = |d: usize| a.ell.coefficient(&Word::repeated(1, d));
        let rows = univariate_tree_table(6).unwrap();
        for n in 3..=6 {
            let mut rhs = <Q as Scalar>::zero();
            for row in rows.iter().filter(|r| r.order == n) {
                let mut term = <Q as Scalar>::from_int(row.multiplicity);
                for _ in 0..row.internal_edges {
                    term = term.times(&k2);
                }
                for &ar in &row.arities {
                    term = term.times(&ll(ar));
                }
                rhs = rhs.plus(&term);
            }
            let mut lhs = a.cumulants.coefficient(&Word::repeated(1, n));
            for _ in 0..n {
                lhs = lhs.times(&k2_inv);
            }
            assert_eq!(lhs, rhs, "order {n}");
        }
    }
}
