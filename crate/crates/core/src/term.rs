//! De Bruijn λ-terms.
//!
//! Terms produced by the Boltzmann samplers can be very large, so every
//! traversal in this module (including `Drop`) uses an explicit stack
//! instead of recursion.

use std::fmt;

use crate::format::{self, Format};

/// A λ-term in De Bruijn notation: `n | (N M) | λN`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Index(u64),
    App(Box<Term>, Box<Term>),
    Abs(Box<Term>),
}

/// One constructor of a term in preorder. Samplers emit these and build the
/// tree once a run is accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Index(u64),
    App,
    Abs,
}

/// Structural counts of a term, gathered in a single pass.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Shape {
    pub abstractions: usize,
    pub applications: usize,
    /// `indices[k]` is the number of occurrences of index `k`.
    pub indices: Vec<usize>,
}

impl Term {
    pub fn var(k: u64) -> Term {
        Term::Index(k)
    }

    pub fn app(left: Term, right: Term) -> Term {
        Term::App(Box::new(left), Box::new(right))
    }

    pub fn abs(body: Term) -> Term {
        Term::Abs(Box::new(body))
    }

    /// `λ^k.body`
    pub fn abs_n(k: usize, body: Term) -> Term {
        (0..k).fold(body, |t, _| Term::abs(t))
    }

    /// Rebuilds a term from its preorder constructor sequence.
    ///
    /// Returns `None` when the sequence is not exactly one well-formed term.
    pub fn from_preorder(ops: &[Op]) -> Option<Term> {
        let mut stack: Vec<Term> = Vec::new();
        for op in ops.iter().rev() {
            match *op {
                Op::Index(k) => stack.push(Term::Index(k)),
                Op::Abs => {
                    let body = stack.pop()?;
                    stack.push(Term::abs(body));
                }
                Op::App => {
                    let left = stack.pop()?;
                    let right = stack.pop()?;
                    stack.push(Term::app(left, right));
                }
            }
        }
        if stack.len() == 1 {
            stack.pop()
        } else {
            None
        }
    }

    /// Preorder constructor sequence of the term.
    pub fn preorder(&self) -> Vec<Op> {
        let mut ops = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Index(k) => ops.push(Op::Index(*k)),
                Term::Abs(body) => {
                    ops.push(Op::Abs);
                    stack.push(body);
                }
                Term::App(l, r) => {
                    ops.push(Op::App);
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        ops
    }

    pub fn shape(&self) -> Shape {
        let mut shape = Shape::default();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Index(k) => {
                    let k = *k as usize;
                    if shape.indices.len() <= k {
                        shape.indices.resize(k + 1, 0);
                    }
                    shape.indices[k] += 1;
                }
                Term::Abs(body) => {
                    shape.abstractions += 1;
                    stack.push(body);
                }
                Term::App(l, r) => {
                    shape.applications += 1;
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        shape
    }

    /// Smallest `m` such that the term is `m`-open.
    pub fn openness(&self) -> usize {
        let mut needed = 0usize;
        let mut stack = vec![(self, 0usize)];
        while let Some((t, depth)) = stack.pop() {
            match t {
                Term::Index(k) => {
                    let k = *k as usize;
                    if k >= depth {
                        needed = needed.max(k - depth + 1);
                    }
                }
                Term::Abs(body) => stack.push((body, depth + 1)),
                Term::App(l, r) => {
                    stack.push((r, depth));
                    stack.push((l, depth));
                }
            }
        }
        needed
    }

    /// True iff prepending `m` abstractions closes the term, i.e. every
    /// index `k` under `d` binders satisfies `k < d + m`.
    pub fn is_m_open(&self, m: usize) -> bool {
        self.openness() <= m
    }

    pub fn is_closed(&self) -> bool {
        self.is_m_open(0)
    }

    /// Number of constructors (indices count as one regardless of value).
    pub fn node_count(&self) -> usize {
        self.preorder().len()
    }

    pub fn render(&self, format: Format) -> String {
        format::render(self, format)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::render(self, Format::DeBruijn))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({})", format::render(self, Format::DeBruijn))
    }
}

impl Drop for Term {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        detach_children(self, &mut stack);
        while let Some(mut t) = stack.pop() {
            detach_children(&mut t, &mut stack);
        }
    }
}

fn detach_children(t: &mut Term, stack: &mut Vec<Term>) {
    match t {
        Term::Index(_) => {}
        Term::Abs(body) => {
            if !matches!(**body, Term::Index(_)) {
                stack.push(std::mem::replace(&mut **body, Term::Index(0)));
            }
        }
        Term::App(l, r) => {
            for child in [l, r] {
                if !matches!(**child, Term::Index(_)) {
                    stack.push(std::mem::replace(&mut **child, Term::Index(0)));
                }
            }
        }
    }
}
