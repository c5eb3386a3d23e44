//! Principal simple types of closed terms and rejection sampling of
//! simply-typed terms.
//!
//! Inference runs on a union-find graph of type nodes. Unification merges
//! classes without looking inside them; the occurs check is then a single
//! acyclicity test of the class graph, which fails exactly when some
//! variable would have to contain itself.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boltzmann::{ClosedSampler, SamplerConfig};
use crate::counting::build_count_table;
use crate::error::{Error, Result};
use crate::model::SizeModel;
use crate::recursive::RecursiveSampler;
use crate::term::Term;

/// Sizes past which typed rejection sampling is unlikely to finish.
pub const PRACTICAL_TYPED_SIZE: usize = 60;

/// A simple type: `a | σ -> τ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum SimpleType {
    Var(u32),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(from: SimpleType, to: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(from), Box::new(to))
    }

    /// Renames variables to `0, 1, …` in order of first occurrence, left to
    /// right.
    pub fn canonical(&self) -> SimpleType {
        let mut names: Vec<(u32, u32)> = Vec::new();
        self.map_vars(|v| match names.iter().find(|(old, _)| *old == v) {
            Some(&(_, new)) => new,
            None => {
                let new = names.len() as u32;
                names.push((v, new));
                new
            }
        })
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                SimpleType::Var(v) if !out.contains(v) => out.push(*v),
                SimpleType::Var(_) => {}
                SimpleType::Arrow(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    /// Number of arrows and variables.
    pub fn size(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            count += 1;
            if let SimpleType::Arrow(a, b) = t {
                stack.push(a);
                stack.push(b);
            }
        }
        count
    }

    /// Rebuilds the type with every variable replaced through `f`, visiting
    /// variables left to right.
    pub fn map_vars(&self, mut f: impl FnMut(u32) -> u32) -> SimpleType {
        self.substitute(|v| SimpleType::Var(f(v)))
    }

    /// Replaces every variable `v` by `f(v)`, visiting variables left to
    /// right.
    pub fn substitute(&self, mut f: impl FnMut(u32) -> SimpleType) -> SimpleType {
        enum Step<'a> {
            Visit(&'a SimpleType),
            Join,
        }
        let mut steps = vec![Step::Visit(self)];
        let mut built: Vec<SimpleType> = Vec::new();
        while let Some(step) = steps.pop() {
            match step {
                Step::Visit(SimpleType::Var(v)) => built.push(f(*v)),
                Step::Visit(SimpleType::Arrow(a, b)) => {
                    steps.push(Step::Join);
                    steps.push(Step::Visit(b));
                    steps.push(Step::Visit(a));
                }
                Step::Join => {
                    let to = built.pop().unwrap();
                    let from = built.pop().unwrap();
                    built.push(SimpleType::arrow(from, to));
                }
            }
        }
        built.pop().unwrap()
    }

    /// Whether `other` is `self` under some substitution of the variables
    /// of `self`.
    pub fn is_instance(&self, other: &SimpleType) -> bool {
        let mut binding: Vec<(u32, &SimpleType)> = Vec::new();
        let mut pairs = vec![(self, other)];
        while let Some(pair) = pairs.pop() {
            match pair {
                (SimpleType::Var(v), t) => match binding.iter().find(|(w, _)| w == v) {
                    Some((_, bound)) if *bound != t => return false,
                    Some(_) => {}
                    None => binding.push((*v, t)),
                },
                (SimpleType::Arrow(a, b), SimpleType::Arrow(c, d)) => {
                    pairs.push((a, c));
                    pairs.push((b, d));
                }
                (SimpleType::Arrow(..), SimpleType::Var(_)) => return false,
            }
        }
        true
    }
}

/// `a, b, …, z, a1, b1, …`
fn var_name(v: u32) -> String {
    let letter = (b'a' + (v % 26) as u8) as char;
    match v / 26 {
        0 => letter.to_string(),
        round => format!("{letter}{round}"),
    }
}

impl fmt::Display for SimpleType {
    /// Arrows associate to the right; only a left operand that is itself an
    /// arrow gets parentheses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Step<'a> {
            Visit(&'a SimpleType, bool),
            Text(&'static str),
        }
        let mut steps = vec![Step::Visit(self, false)];
        while let Some(step) = steps.pop() {
            match step {
                Step::Text(s) => f.write_str(s)?,
                Step::Visit(SimpleType::Var(v), _) => f.write_str(&var_name(*v))?,
                Step::Visit(SimpleType::Arrow(a, b), parens) => {
                    if parens {
                        f.write_str("(")?;
                        steps.push(Step::Text(")"));
                    }
                    steps.push(Step::Visit(b, false));
                    steps.push(Step::Text(" -> "));
                    steps.push(Step::Visit(a, matches!(**a, SimpleType::Arrow(..))));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimpleType({self})")
    }
}

impl Drop for SimpleType {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        let detach = |t: &mut SimpleType, stack: &mut Vec<SimpleType>| {
            if let SimpleType::Arrow(a, b) = t {
                for child in [a, b] {
                    if matches!(**child, SimpleType::Arrow(..)) {
                        stack.push(std::mem::replace(&mut **child, SimpleType::Var(0)));
                    }
                }
            }
        };
        detach(self, &mut stack);
        while let Some(mut t) = stack.pop() {
            detach(&mut t, &mut stack);
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Var,
    Arrow(usize, usize),
}

/// Type nodes with union-find classes; a class holds at most one arrow.
#[derive(Default)]
struct Unifier {
    nodes: Vec<Node>,
    parent: Vec<usize>,
}

impl Unifier {
    fn fresh(&mut self) -> usize {
        self.push(Node::Var)
    }

    fn push(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.parent.push(self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn find(&mut self, mut i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[i] != root {
            let next = self.parent[i];
            self.parent[i] = root;
            i = next;
        }
        root
    }

    fn unify(&mut self, a: usize, b: usize) {
        let mut pending = vec![(a, b)];
        while let Some((a, b)) = pending.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            match (self.nodes[ra], self.nodes[rb]) {
                (Node::Var, _) => self.parent[ra] = rb,
                (_, Node::Var) => self.parent[rb] = ra,
                (Node::Arrow(a1, a2), Node::Arrow(b1, b2)) => {
                    self.parent[ra] = rb;
                    pending.push((a1, b1));
                    pending.push((a2, b2));
                }
            }
        }
    }

    /// Whether the graph of classes has no cycle through arrows.
    fn acyclic(&mut self) -> bool {
        const NEW: u8 = 0;
        const OPEN: u8 = 1;
        const DONE: u8 = 2;
        let n = self.nodes.len();
        let mut state = vec![NEW; n];
        for start in 0..n {
            let start = self.find(start);
            if state[start] != NEW {
                continue;
            }
            // (class, children already pushed)
            let mut stack = vec![(start, false)];
            while let Some((c, expanded)) = stack.pop() {
                if expanded {
                    state[c] = DONE;
                    continue;
                }
                match state[c] {
                    DONE => continue,
                    OPEN => return false,
                    _ => {}
                }
                state[c] = OPEN;
                stack.push((c, true));
                if let Node::Arrow(x, y) = self.nodes[c] {
                    for child in [x, y] {
                        let r = self.find(child);
                        match state[r] {
                            OPEN => return false,
                            NEW => stack.push((r, false)),
                            _ => {}
                        }
                    }
                }
            }
        }
        true
    }

    /// Reads a class back as a type, naming variable classes by first
    /// occurrence across all calls.
    fn resolve(&mut self, node: usize, names: &mut Vec<(usize, u32)>) -> SimpleType {
        enum Step {
            Visit(usize),
            Join,
        }
        let mut steps = vec![Step::Visit(node)];
        let mut built: Vec<SimpleType> = Vec::new();
        while let Some(step) = steps.pop() {
            match step {
                Step::Visit(i) => {
                    let r = self.find(i);
                    match self.nodes[r] {
                        Node::Var => {
                            let name = match names.iter().find(|(c, _)| *c == r) {
                                Some(&(_, name)) => name,
                                None => {
                                    names.push((r, names.len() as u32));
                                    names.len() as u32 - 1
                                }
                            };
                            built.push(SimpleType::Var(name));
                        }
                        Node::Arrow(a, b) => {
                            steps.push(Step::Join);
                            steps.push(Step::Visit(b));
                            steps.push(Step::Visit(a));
                        }
                    }
                }
                Step::Join => {
                    let to = built.pop().unwrap();
                    let from = built.pop().unwrap();
                    built.push(SimpleType::arrow(from, to));
                }
            }
        }
        built.pop().unwrap()
    }
}

/// Runs unification over the whole term; returns the unifier and the type
/// node of every subterm in preorder.
fn constrain(t: &Term) -> Result<(Unifier, Vec<usize>)> {
    if !t.is_closed() {
        return Err(Error::OpenTermRejected);
    }
    enum Step<'a> {
        Visit(&'a Term),
        LeaveAbs { slot: usize, binder: usize },
        LeaveApp { slot: usize },
    }
    let mut u = Unifier::default();
    let mut types = Vec::new();
    let mut binders: Vec<usize> = Vec::new();
    // (preorder slot of each finished subterm's type)
    let mut done: Vec<usize> = Vec::new();
    let mut steps = vec![Step::Visit(t)];
    while let Some(step) = steps.pop() {
        match step {
            Step::Visit(Term::Index(k)) => {
                let node = binders[binders.len() - 1 - *k as usize];
                types.push(node);
                done.push(types.len() - 1);
            }
            Step::Visit(Term::Abs(body)) => {
                let binder = u.fresh();
                binders.push(binder);
                types.push(usize::MAX);
                steps.push(Step::LeaveAbs { slot: types.len() - 1, binder });
                steps.push(Step::Visit(body));
            }
            Step::Visit(Term::App(f, a)) => {
                types.push(usize::MAX);
                steps.push(Step::LeaveApp { slot: types.len() - 1 });
                steps.push(Step::Visit(a));
                steps.push(Step::Visit(f));
            }
            Step::LeaveAbs { slot, binder } => {
                binders.pop();
                let body = types[done.pop().unwrap()];
                types[slot] = u.push(Node::Arrow(binder, body));
                done.push(slot);
            }
            Step::LeaveApp { slot } => {
                let arg = types[done.pop().unwrap()];
                let fun = types[done.pop().unwrap()];
                let result = u.fresh();
                let expected = u.push(Node::Arrow(arg, result));
                u.unify(fun, expected);
                types[slot] = result;
                done.push(slot);
            }
        }
    }
    if !u.acyclic() {
        return Err(Error::NotTypeable);
    }
    Ok((u, types))
}

/// The principal simple type of a closed term, with canonically named
/// variables.
pub fn infer(t: &Term) -> Result<SimpleType> {
    let (mut u, types) = constrain(t)?;
    Ok(u.resolve(types[0], &mut Vec::new()))
}

pub fn is_typeable(t: &Term) -> bool {
    infer(t).is_ok()
}

/// The principal typing derivation: the type of every subterm, in
/// preorder, with variables shared across subterms.
pub fn derivation(t: &Term) -> Result<Vec<SimpleType>> {
    let (mut u, types) = constrain(t)?;
    let mut names = Vec::new();
    Ok(types.iter().map(|&node| u.resolve(node, &mut names)).collect())
}

/// Verifies a typing derivation rule by rule: an index has the type of its
/// binder, `λ.M : σ -> τ` when the binder has `σ` and `M : τ`, and
/// `M N : τ` when `M : σ -> τ` and `N : σ`.
pub fn check_derivation(t: &Term, types: &[SimpleType]) -> bool {
    enum Step<'a> {
        Visit(&'a Term),
        LeaveAbs(usize),
        LeaveApp(usize),
    }
    let mut next = 0;
    let mut binders: Vec<&SimpleType> = Vec::new();
    let mut done: Vec<usize> = Vec::new();
    let mut steps = vec![Step::Visit(t)];
    while let Some(step) = steps.pop() {
        match step {
            Step::Visit(node) => {
                let Some(ty) = types.get(next) else { return false };
                let slot = next;
                next += 1;
                match node {
                    Term::Index(k) => {
                        let Some(bound) = binders.len().checked_sub(1 + *k as usize) else { return false };
                        if binders[bound] != ty {
                            return false;
                        }
                        done.push(slot);
                    }
                    Term::Abs(body) => {
                        let SimpleType::Arrow(from, _) = ty else { return false };
                        binders.push(from);
                        steps.push(Step::LeaveAbs(slot));
                        steps.push(Step::Visit(body));
                    }
                    Term::App(f, a) => {
                        steps.push(Step::LeaveApp(slot));
                        steps.push(Step::Visit(a));
                        steps.push(Step::Visit(f));
                    }
                }
            }
            Step::LeaveAbs(slot) => {
                binders.pop();
                let body = done.pop().unwrap();
                let SimpleType::Arrow(_, to) = &types[slot] else { return false };
                if **to != types[body] {
                    return false;
                }
                done.push(slot);
            }
            Step::LeaveApp(slot) => {
                let arg = done.pop().unwrap();
                let fun = done.pop().unwrap();
                match &types[fun] {
                    SimpleType::Arrow(from, to) if **from == types[arg] && **to == types[slot] => {}
                    _ => return false,
                }
                done.push(slot);
            }
        }
    }
    next == types.len()
}

/// Whether `t : ty` holds: `ty` must be an instance of the principal type,
/// and the principal derivation instantiated accordingly must check.
pub fn check(t: &Term, ty: &SimpleType) -> bool {
    let Ok(types) = derivation(t) else { return false };
    let mut binding: Vec<(u32, &SimpleType)> = Vec::new();
    let mut pairs = vec![(&types[0], ty)];
    while let Some(pair) = pairs.pop() {
        match pair {
            (SimpleType::Var(v), s) => match binding.iter().find(|(w, _)| w == v) {
                Some((_, bound)) if *bound != s => return false,
                Some(_) => {}
                None => binding.push((*v, s)),
            },
            (SimpleType::Arrow(a, b), SimpleType::Arrow(c, d)) => {
                pairs.push((a, c));
                pairs.push((b, d));
            }
            _ => return false,
        }
    }
    // variables not reached from the root type stay as fresh ones
    let fresh = ty.vars().into_iter().max().map_or(0, |v| v + 1);
    let instantiated: Vec<SimpleType> = types
        .iter()
        .map(|s| {
            s.substitute(|v| match binding.iter().find(|(w, _)| *w == v) {
                Some((_, bound)) => (*bound).clone(),
                None => SimpleType::Var(fresh + v),
            })
        })
        .collect();
    check_derivation(t, &instantiated)
}

/// Base sampler feeding the typed rejection loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypedMethod {
    /// Closed terms of size exactly `n`.
    Recursive,
    /// Closed terms in the Boltzmann size window around `n`.
    Boltzmann,
}

enum Base {
    Recursive(Arc<crate::counting::CountTable>),
    Boltzmann(Box<ClosedSampler>),
}

/// Draws closed terms from a uniform base sampler until one is typeable.
pub struct TypedSampler {
    size: usize,
    base: Base,
    max_attempts: u64,
    attempts: u64,
}

impl TypedSampler {
    pub fn new(n: usize, model: SizeModel, method: TypedMethod, max_attempts: u64) -> Result<TypedSampler> {
        match method {
            TypedMethod::Recursive => TypedSampler::recursive(n, model, max_attempts),
            TypedMethod::Boltzmann => TypedSampler::boltzmann(model, SamplerConfig::new(n), max_attempts),
        }
    }

    pub fn recursive(n: usize, model: SizeModel, max_attempts: u64) -> Result<TypedSampler> {
        warn_if_large(n);
        // a closed term of size n has fewer than n nested binders
        let table = build_count_table(model, n.max(1), n);
        if table.count(0, n).bits() == 0 {
            return Err(Error::EmptySizeClass { openness: 0, size: n });
        }
        Ok(TypedSampler { size: n, base: Base::Recursive(Arc::new(table)), max_attempts, attempts: 0 })
    }

    pub fn boltzmann(model: SizeModel, config: SamplerConfig, max_attempts: u64) -> Result<TypedSampler> {
        warn_if_large(config.size);
        let sampler = ClosedSampler::new(model, config)?;
        Ok(TypedSampler {
            size: config.size,
            base: Base::Boltzmann(Box::new(sampler)),
            max_attempts,
            attempts: 0,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Base samples drawn so far, typeable or not.
    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(Term, SimpleType)> {
        for _ in 0..self.max_attempts {
            self.attempts += 1;
            let t = match &mut self.base {
                Base::Recursive(table) => RecursiveSampler::new(table.clone(), &mut *rng).gen(0, self.size)?,
                Base::Boltzmann(sampler) => sampler.sample(rng)?,
            };
            // a truncated class may still hold open terms
            if !t.is_closed() {
                continue;
            }
            if let Ok(ty) = infer(&t) {
                return Ok((t, ty));
            }
        }
        Err(Error::AttemptsExhausted(self.max_attempts))
    }
}

fn warn_if_large(n: usize) {
    if n > PRACTICAL_TYPED_SIZE {
        log::warn!("typeable terms of size {n} are very rare; rejection sampling may not finish");
    }
}

/// A closed simply-typeable term of size `n` (recursive) or near `n`
/// (Boltzmann) with its principal type, uniform among typeable terms of
/// its size.
pub fn sample_typed<R: Rng + ?Sized>(
    n: usize,
    model: SizeModel,
    method: TypedMethod,
    rng: &mut R,
    max_attempts: u64,
) -> Result<(Term, SimpleType)> {
    TypedSampler::new(n, model, method, max_attempts)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_debruijn;
    use crate::recursive::enumerate;
    use crate::rng::seeded;
    use crate::testing::chi_square_uniform;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn term(s: &str) -> Term {
        parse_debruijn(s).unwrap()
    }

    /// Textbook inference with an explicit substitution and a recursive
    /// occurs check.
    mod oracle {
        use super::*;

        #[derive(Clone, Debug, PartialEq)]
        pub enum Ty {
            V(u32),
            F(Box<Ty>, Box<Ty>),
        }

        fn walk(t: &Ty, s: &HashMap<u32, Ty>) -> Ty {
            match t {
                Ty::V(v) => match s.get(v) {
                    Some(b) => walk(b, s),
                    None => t.clone(),
                },
                Ty::F(a, b) => Ty::F(Box::new(walk(a, s)), Box::new(walk(b, s))),
            }
        }

        fn occurs(v: u32, t: &Ty) -> bool {
            match t {
                Ty::V(w) => *w == v,
                Ty::F(a, b) => occurs(v, a) || occurs(v, b),
            }
        }

        fn unify(a: &Ty, b: &Ty, s: &mut HashMap<u32, Ty>) -> bool {
            let (a, b) = (walk(a, s), walk(b, s));
            match (&a, &b) {
                (Ty::V(x), Ty::V(y)) if x == y => true,
                (Ty::V(x), t) | (t, Ty::V(x)) => {
                    if occurs(*x, t) {
                        return false;
                    }
                    s.insert(*x, t.clone());
                    true
                }
                (Ty::F(a1, a2), Ty::F(b1, b2)) => unify(a1, b1, s) && unify(a2, b2, s),
            }
        }

        fn go(t: &Term, env: &mut Vec<Ty>, next: &mut u32, s: &mut HashMap<u32, Ty>) -> Option<Ty> {
            match t {
                Term::Index(k) => Some(env[env.len() - 1 - *k as usize].clone()),
                Term::Abs(body) => {
                    let v = Ty::V(*next);
                    *next += 1;
                    env.push(v.clone());
                    let b = go(body, env, next, s);
                    env.pop();
                    Some(Ty::F(Box::new(v), Box::new(b?)))
                }
                Term::App(f, a) => {
                    let tf = go(f, env, next, s)?;
                    let ta = go(a, env, next, s)?;
                    let r = Ty::V(*next);
                    *next += 1;
                    unify(&tf, &Ty::F(Box::new(ta), Box::new(r.clone())), s).then_some(r)
                }
            }
        }

        pub fn to_simple(t: &Ty) -> SimpleType {
            match t {
                Ty::V(v) => SimpleType::Var(*v),
                Ty::F(a, b) => SimpleType::arrow(to_simple(a), to_simple(b)),
            }
        }

        pub fn infer(t: &Term) -> Option<SimpleType> {
            let mut s = HashMap::new();
            let ty = go(t, &mut Vec::new(), &mut 0, &mut s)?;
            Some(to_simple(&walk(&ty, &s)).canonical())
        }
    }

    #[test]
    fn identity_and_k() {
        assert_eq!(infer(&term("λ0")).unwrap().to_string(), "a -> a");
        assert_eq!(infer(&term("λλ1")).unwrap().to_string(), "a -> b -> a");
        assert_eq!(infer(&term("λ(0 0)")), Err(Error::NotTypeable));
        assert_eq!(infer(&term("λ1")), Err(Error::OpenTermRejected));
    }

    #[test]
    fn s_combinator_and_composition() {
        let s = infer(&term("λλλ((2 0) (1 0))")).unwrap();
        assert_eq!(s.to_string(), "(a -> b -> c) -> (a -> b) -> a -> c");
        let b = infer(&term("λλλ(2 (1 0))")).unwrap();
        assert_eq!(b.to_string(), "(a -> b) -> (c -> a) -> c -> b");
        let flip_apply = infer(&term("λλ(0 1)")).unwrap();
        assert_eq!(flip_apply.to_string(), "a -> (a -> b) -> b");
    }

    #[test]
    fn rendering() {
        let (a, b) = (SimpleType::Var(0), SimpleType::Var(1));
        let left = SimpleType::arrow(SimpleType::arrow(a.clone(), b.clone()), a.clone());
        assert_eq!(left.to_string(), "(a -> b) -> a");
        let right = SimpleType::arrow(a.clone(), SimpleType::arrow(b, a));
        assert_eq!(right.to_string(), "a -> b -> a");
        assert_eq!(SimpleType::Var(27).to_string(), "b1");
    }

    #[test]
    fn instances() {
        let id = infer(&term("λ0")).unwrap();
        let k = infer(&term("λλ1")).unwrap();
        let a = || SimpleType::Var(0);
        let endo = SimpleType::arrow(SimpleType::arrow(a(), a()), SimpleType::arrow(a(), a()));
        assert!(id.is_instance(&endo));
        assert!(!endo.is_instance(&id));
        assert!(k.is_instance(&SimpleType::arrow(a(), SimpleType::arrow(a(), a()))));
        assert!(!k.is_instance(&id));
        assert!(check(&term("λ0"), &endo));
        assert!(!check(&term("λλ1"), &SimpleType::arrow(a(), SimpleType::arrow(SimpleType::Var(1), SimpleType::Var(1)))));
    }

    #[test]
    fn agrees_with_textbook_inference_up_to_size_ten() {
        let model = SizeModel::natural();
        let mut typeable = 0;
        for n in 1..=10 {
            for t in enumerate(&model, 0, n).unwrap() {
                let ours = infer(&t).ok();
                assert_eq!(ours, oracle::infer(&t), "{t}");
                if let Some(ty) = ours {
                    typeable += 1;
                    let types = derivation(&t).unwrap();
                    assert_eq!(types[0], ty);
                    assert!(check_derivation(&t, &types), "{t}");
                    assert!(check(&t, &ty));
                    // instances stay valid, and the type is no instance of a
                    // strictly more special one
                    let special = ty.substitute(|v| match v {
                        0 => SimpleType::arrow(SimpleType::Var(100), SimpleType::Var(100)),
                        v => SimpleType::Var(v),
                    });
                    assert!(check(&t, &special), "{t}: {special}");
                    if special != ty {
                        assert!(!special.is_instance(&ty));
                    }
                }
            }
        }
        assert!(typeable > 0);
    }

    #[test]
    fn broken_derivations_are_rejected() {
        let t = term("λλλ((2 0) (1 0))");
        let mut types = derivation(&t).unwrap();
        assert!(check_derivation(&t, &types));
        let last = types.len() - 1;
        types[last] = SimpleType::Var(42);
        assert!(!check_derivation(&t, &types));
        assert!(!check_derivation(&t, &derivation(&t).unwrap()[1..]));
    }

    #[test]
    fn deep_terms_do_not_overflow() {
        let depth = 200_000;
        let t = Term::abs_n(depth, Term::var(0));
        let ty = infer(&t).unwrap();
        assert_eq!(ty.size(), 2 * depth + 1);
        let mut chain = Term::var(0);
        for _ in 0..depth {
            chain = Term::app(Term::var(0), chain);
        }
        assert_eq!(infer(&Term::abs(chain)), Err(Error::NotTypeable));
    }

    fn typeable_class(n: usize) -> Vec<Term> {
        enumerate(&SizeModel::natural(), 0, n).unwrap().into_iter().filter(is_typeable).collect()
    }

    #[test]
    fn typed_sampling_is_uniform_at_six() {
        let class = typeable_class(6);
        assert!(class.len() >= 5);
        let index: HashMap<&Term, usize> = class.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut sampler = TypedSampler::new(6, SizeModel::natural(), TypedMethod::Recursive, 1000).unwrap();
        let mut rng = seeded(11);
        let mut hits = vec![0u64; class.len()];
        for _ in 0..20_000 * class.len() / 10 {
            let (t, ty) = sampler.sample(&mut rng).unwrap();
            assert!(check(&t, &ty));
            hits[index[&t]] += 1;
        }
        let test = chi_square_uniform(&hits, 0.001);
        assert!(test.passes, "{test:?}");
    }

    #[test]
    fn typeable_fraction_decreases_from_size_five() {
        let model = SizeModel::natural();
        let fractions: Vec<(usize, usize)> = (4..=14)
            .map(|n| {
                let closed = enumerate(&model, 0, n).unwrap();
                let typeable = closed.iter().filter(|t| oracle::infer(t).is_some()).count();
                (typeable, closed.len())
            })
            .collect();
        // λ(0 0) is one of three closed terms of size 4 and λλ(0 0) one of six
        // of size 5
        assert_eq!(&fractions[..2], &[(2, 3), (5, 6)]);
        let ratio = |&(a, b): &(usize, usize)| a as f64 / b as f64;
        assert!(fractions[1..].windows(2).all(|w| ratio(&w[1]) < ratio(&w[0])), "{fractions:?}");
    }

    #[test]
    fn boltzmann_typed_samples() {
        let mut rng = seeded(12);
        let config = SamplerConfig { tolerance: 0.2, ..SamplerConfig::new(20) };
        let mut sampler = TypedSampler::boltzmann(SizeModel::natural(), config, 100_000).unwrap();
        for _ in 0..20 {
            let (t, ty) = sampler.sample(&mut rng).unwrap();
            let size = SizeModel::natural().size(&t);
            assert!((16..=24).contains(&size));
            assert!(check(&t, &ty));
        }
        let (t, _) = sample_typed(8, SizeModel::natural(), TypedMethod::Recursive, &mut rng, 1000).unwrap();
        assert_eq!(SizeModel::natural().size(&t), 8);
    }

    #[test]
    fn exhausted_attempts() {
        let mut rng = seeded(13);
        let r = sample_typed(4, SizeModel::natural(), TypedMethod::Recursive, &mut rng, 0);
        assert_eq!(r.unwrap_err(), Error::AttemptsExhausted(0));
        let r = sample_typed(1, SizeModel::natural(), TypedMethod::Recursive, &mut rng, 10);
        assert_eq!(r.unwrap_err(), Error::EmptySizeClass { openness: 0, size: 1 });
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent_and_preserves_shape(seed in any::<u64>(), n in 2usize..40) {
            let mut rng = seeded(seed);
            let table = Arc::new(build_count_table(SizeModel::natural(), n, n));
            prop_assume!(table.count(0, n).bits() > 0);
            let t = RecursiveSampler::new(table, &mut rng).gen(0, n).unwrap();
            if let Ok(ty) = infer(&t) {
                prop_assert_eq!(ty.canonical(), ty.clone());
                let shifted = ty.map_vars(|v| v + 7);
                prop_assert!(ty.is_instance(&shifted) && shifted.is_instance(&ty));
                prop_assert!(check(&t, &shifted));
                prop_assert_eq!(Some(ty), oracle::infer(&t));
            } else {
                prop_assert_eq!(oracle::infer(&t), None);
            }
        }
    }
}
