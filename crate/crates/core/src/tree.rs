//! Plane binary trees and SK-combinators.

use std::fmt;

/// A plane binary tree; its size is the number of internal nodes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BinaryTree {
    Leaf,
    Node(Box<BinaryTree>, Box<BinaryTree>),
}

/// `C := S | K | (C C)`, sized by the number of applications.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Combinator {
    S,
    K,
    App(Box<Combinator>, Box<Combinator>),
}

impl BinaryTree {
    pub fn node(left: BinaryTree, right: BinaryTree) -> BinaryTree {
        BinaryTree::Node(Box::new(left), Box::new(right))
    }

    pub fn internal_nodes(&self) -> usize {
        self.counts().0
    }

    pub fn leaves(&self) -> usize {
        self.counts().1
    }

    /// (internal nodes, leaves)
    pub fn counts(&self) -> (usize, usize) {
        let (mut internal, mut leaves) = (0, 0);
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                BinaryTree::Leaf => leaves += 1,
                BinaryTree::Node(l, r) => {
                    internal += 1;
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        (internal, leaves)
    }

    pub fn height(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self, 0usize)];
        while let Some((t, d)) = stack.pop() {
            best = best.max(d);
            if let BinaryTree::Node(l, r) = t {
                stack.push((r, d + 1));
                stack.push((l, d + 1));
            }
        }
        best
    }

    /// Replaces the leaves, in in-order (left to right), by `S` / `K`
    /// according to `leaves` (`true` = `S`). `leaves` must have exactly
    /// `self.leaves()` entries.
    pub fn decorate(&self, leaves: &[bool]) -> Combinator {
        enum Frame<'a> {
            Visit(&'a BinaryTree),
            Join,
        }
        let mut next = leaves.iter();
        let mut out: Vec<Combinator> = Vec::new();
        let mut stack = vec![Frame::Visit(self)];
        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Visit(BinaryTree::Leaf) => {
                    let s = *next.next().expect("fewer leaf labels than leaves");
                    out.push(if s { Combinator::S } else { Combinator::K });
                }
                Frame::Visit(BinaryTree::Node(l, r)) => {
                    stack.push(Frame::Join);
                    stack.push(Frame::Visit(r));
                    stack.push(Frame::Visit(l));
                }
                Frame::Join => {
                    let r = out.pop().unwrap();
                    let l = out.pop().unwrap();
                    out.push(Combinator::app(l, r));
                }
            }
        }
        assert!(next.next().is_none(), "more leaf labels than leaves");
        out.pop().unwrap()
    }
}

impl Combinator {
    pub fn app(left: Combinator, right: Combinator) -> Combinator {
        Combinator::App(Box::new(left), Box::new(right))
    }

    /// Number of applications.
    pub fn size(&self) -> usize {
        self.split().0.internal_nodes()
    }

    /// Scaffold decomposition: application tree plus in-order leaf sequence
    /// (`true` = `S`).
    pub fn split(&self) -> (BinaryTree, Vec<bool>) {
        enum Frame<'a> {
            Visit(&'a Combinator),
            Join,
        }
        let mut leaves = Vec::new();
        let mut out: Vec<BinaryTree> = Vec::new();
        let mut stack = vec![Frame::Visit(self)];
        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Visit(Combinator::S) => {
                    leaves.push(true);
                    out.push(BinaryTree::Leaf);
                }
                Frame::Visit(Combinator::K) => {
                    leaves.push(false);
                    out.push(BinaryTree::Leaf);
                }
                Frame::Visit(Combinator::App(l, r)) => {
                    stack.push(Frame::Join);
                    stack.push(Frame::Visit(r));
                    stack.push(Frame::Visit(l));
                }
                Frame::Join => {
                    let r = out.pop().unwrap();
                    let l = out.pop().unwrap();
                    out.push(BinaryTree::node(l, r));
                }
            }
        }
        (out.pop().unwrap(), leaves)
    }
}

/// Renders `.` for a leaf and `(l r)` for a node.
impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Frame<'a> {
            Visit(&'a BinaryTree),
            Text(&'static str),
        }
        let mut stack = vec![Frame::Visit(self)];
        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Text(s) => f.write_str(s)?,
                Frame::Visit(BinaryTree::Leaf) => f.write_str(".")?,
                Frame::Visit(BinaryTree::Node(l, r)) => {
                    f.write_str("(")?;
                    stack.push(Frame::Text(")"));
                    stack.push(Frame::Visit(r));
                    stack.push(Frame::Text(" "));
                    stack.push(Frame::Visit(l));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryTree({self})")
    }
}

impl fmt::Display for Combinator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::render_combinator(self))
    }
}

impl fmt::Debug for Combinator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Combinator({self})")
    }
}

impl Drop for BinaryTree {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        let take = |t: &mut BinaryTree, stack: &mut Vec<BinaryTree>| {
            if let BinaryTree::Node(l, r) = t {
                for child in [l, r] {
                    if matches!(**child, BinaryTree::Node(..)) {
                        stack.push(std::mem::replace(&mut **child, BinaryTree::Leaf));
                    }
                }
            }
        };
        take(self, &mut stack);
        while let Some(mut t) = stack.pop() {
            take(&mut t, &mut stack);
        }
    }
}

impl Drop for Combinator {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        let take = |t: &mut Combinator, stack: &mut Vec<Combinator>| {
            if let Combinator::App(l, r) = t {
                for child in [l, r] {
                    if matches!(**child, Combinator::App(..)) {
                        stack.push(std::mem::replace(&mut **child, Combinator::S));
                    }
                }
            }
        };
        take(self, &mut stack);
        while let Some(mut t) = stack.pop() {
            take(&mut t, &mut stack);
        }
    }
}
