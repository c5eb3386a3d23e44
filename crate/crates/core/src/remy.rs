//! Rémy's grafting sampler for plane binary trees, and SK-combinators built
//! on top of it.
//!
//! The tree with `k` internal nodes lives in a flat link array
//! `L[0..=2k]`: `L[0]` is the root, an odd label `j` is an internal node
//! with children `L[j]` and `L[j + 1]`, and even labels are leaves.

use std::fmt;

use rand::Rng;

use crate::tree::{BinaryTree, Combinator};

/// A binary tree grown one uniform graft at a time.
#[derive(Clone, Debug)]
pub struct GrowableTree {
    links: Vec<usize>,
    ops: u64,
}

impl Default for GrowableTree {
    fn default() -> Self {
        GrowableTree::new()
    }
}

impl GrowableTree {
    /// A single leaf.
    pub fn new() -> GrowableTree {
        GrowableTree { links: vec![0], ops: 0 }
    }

    pub fn with_capacity(n: usize) -> GrowableTree {
        let mut links = Vec::with_capacity(2 * n + 1);
        links.push(0);
        GrowableTree { links, ops: 0 }
    }

    pub fn internal_nodes(&self) -> usize {
        self.links.len() / 2
    }

    pub fn leaves(&self) -> usize {
        self.internal_nodes() + 1
    }

    /// Link writes performed so far.
    pub fn node_ops(&self) -> u64 {
        self.ops
    }

    /// Picks one of the `2k + 1` nodes and a side uniformly, and replaces
    /// the node by a new internal node whose other child is a new leaf.
    pub fn graft<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let k = self.internal_nodes();
        let x = rng.gen_range(0..=4 * k + 1);
        let (side, node) = (x & 1, x >> 1);
        let (internal, leaf) = (2 * k + 1, 2 * k + 2);
        self.links.resize(2 * k + 3, 0);
        self.links[leaf - side] = leaf;
        self.links[internal + side] = self.links[node];
        self.links[node] = internal;
        self.ops += 3;
    }

    pub fn grow<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) {
        self.links.reserve(2 * n);
        for _ in 0..n {
            self.graft(rng);
        }
    }

    pub fn to_tree(&self) -> BinaryTree {
        enum Step {
            Visit(usize),
            Join,
        }
        let mut steps = vec![Step::Visit(self.links[0])];
        let mut built: Vec<BinaryTree> = Vec::new();
        while let Some(step) = steps.pop() {
            match step {
                Step::Visit(j) if j % 2 == 0 => built.push(BinaryTree::Leaf),
                Step::Visit(j) => {
                    steps.push(Step::Join);
                    steps.push(Step::Visit(self.links[j + 1]));
                    steps.push(Step::Visit(self.links[j]));
                }
                Step::Join => {
                    let right = built.pop().unwrap();
                    let left = built.pop().unwrap();
                    built.push(BinaryTree::node(left, right));
                }
            }
        }
        built.pop().unwrap()
    }

    /// Walks the tree in order, calling `leaf` for every leaf from left to
    /// right and `open`/`sep`/`close` around every internal node.
    fn walk<E>(
        &self,
        mut leaf: impl FnMut() -> Result<(), E>,
        mut token: impl FnMut(&'static str) -> Result<(), E>,
    ) -> Result<(), E> {
        enum Step {
            Visit(usize),
            Token(&'static str),
        }
        let mut steps = vec![Step::Visit(self.links[0])];
        while let Some(step) = steps.pop() {
            match step {
                Step::Visit(j) if j % 2 == 0 => leaf()?,
                Step::Visit(j) => {
                    token("(")?;
                    steps.push(Step::Token(")"));
                    steps.push(Step::Visit(self.links[j + 1]));
                    steps.push(Step::Token(" "));
                    steps.push(Step::Visit(self.links[j]));
                }
                Step::Token(t) => token(t)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for GrowableTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = std::cell::RefCell::new(f);
        self.walk(|| f.borrow_mut().write_str("."), |t| f.borrow_mut().write_str(t))
    }
}

/// A uniformly random plane binary tree with `n` internal nodes.
pub fn remy_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BinaryTree {
    let mut tree = GrowableTree::with_capacity(n);
    tree.grow(n, rng);
    tree.to_tree()
}

/// An SK-combinator kept as its scaffold and in-order leaf labels
/// (`true` for `S`), so that very large samples need no per-node boxes.
#[derive(Clone, Debug)]
pub struct FlatCombinator {
    pub scaffold: GrowableTree,
    pub leaves: Vec<bool>,
}

impl FlatCombinator {
    pub fn applications(&self) -> usize {
        self.scaffold.internal_nodes()
    }

    pub fn to_combinator(&self) -> Combinator {
        self.scaffold.to_tree().decorate(&self.leaves)
    }
}

impl fmt::Display for FlatCombinator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = std::cell::RefCell::new(f);
        let mut labels = self.leaves.iter();
        self.scaffold.walk(
            || f.borrow_mut().write_str(if *labels.next().unwrap() { "S" } else { "K" }),
            |t| f.borrow_mut().write_str(t),
        )
    }
}

/// Uniform SK-combinator with `n` applications: a Rémy scaffold with `n`
/// internal nodes and `n + 1` fair S/K leaves.
pub fn sk_combinator_flat<R: Rng + ?Sized>(n: usize, rng: &mut R) -> FlatCombinator {
    let mut scaffold = GrowableTree::with_capacity(n);
    scaffold.grow(n, rng);
    let leaves = (0..=n).map(|_| rng.gen::<bool>()).collect();
    FlatCombinator { scaffold, leaves }
}

pub fn sk_combinator<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Combinator {
    sk_combinator_flat(n, rng).to_combinator()
}
