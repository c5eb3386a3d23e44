use rand::Rng;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::jet::div;
use crate::tree::BinaryTree;

/// The parameter at which Boltzmann binary trees have on average `n`
/// internal nodes, `x = n(n+1)/(2n+1)²`, in double-double precision.
pub fn calibrate_binary_tree(n: usize) -> Result<TwoFloat> {
    if n == 0 {
        return Err(Error::DegenerateTarget(0));
    }
    let n = TwoFloat::from(n as u64);
    let d = n * 2.0 + 1.0;
    Ok(div(n * (n + 1.0), d * d))
}

/// Expected number of internal nodes at `x ∈ (0, 1/4]`:
/// `(1 - s) / 2s` with `s = √(1 - 4x)`.
pub fn binary_tree_mean(x: TwoFloat) -> TwoFloat {
    let s = (1.0 - x * 4.0).sqrt();
    div(1.0 - s, s * 2.0)
}

/// Boltzmann sampler for plane binary trees counted by internal nodes,
/// with rejection outside `[(1-ε)n, (1+ε)n]`.
#[derive(Clone, Debug)]
pub struct BinaryTreeSampler {
    size: usize,
    tolerance: f64,
    node_probability: f64,
    max_attempts: u64,
}

impl BinaryTreeSampler {
    pub fn new(size: usize, tolerance: f64, max_attempts: u64) -> Result<Self> {
        let x = calibrate_binary_tree(size)?;
        // P(node) = x C(x) = (1 - s) / 2
        let s = (1.0 - x * 4.0).sqrt();
        let node_probability = f64::from((1.0 - s) / 2.0);
        Ok(BinaryTreeSampler { size, tolerance, node_probability, max_attempts })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BinaryTree> {
        let lower = ((1.0 - self.tolerance) * self.size as f64).ceil() as usize;
        let ceiling = ((1.0 + self.tolerance) * self.size as f64).floor() as usize;
        for _ in 0..self.max_attempts {
            let Some(shape) = self.draw_shape(ceiling, rng) else {
                continue;
            };
            let nodes = shape.iter().filter(|&&b| b).count();
            if nodes >= lower {
                return Ok(tree_from_preorder(&shape));
            }
        }
        Err(Error::AttemptsExhausted(self.max_attempts))
    }

    /// Preorder node/leaf flags, or `None` once more than `ceiling` nodes
    /// have been drawn.
    fn draw_shape<R: Rng + ?Sized>(&self, ceiling: usize, rng: &mut R) -> Option<Vec<bool>> {
        let mut shape = Vec::new();
        let (mut open, mut nodes) = (1usize, 0usize);
        while open > 0 {
            let node = rng.gen::<f64>() < self.node_probability;
            shape.push(node);
            if node {
                nodes += 1;
                if nodes > ceiling {
                    return None;
                }
                open += 1;
            } else {
                open -= 1;
            }
        }
        Some(shape)
    }
}

fn tree_from_preorder(shape: &[bool]) -> BinaryTree {
    let mut built: Vec<BinaryTree> = Vec::new();
    for &node in shape.iter().rev() {
        if node {
            let left = built.pop().unwrap();
            let right = built.pop().unwrap();
            built.push(BinaryTree::node(left, right));
        } else {
            built.push(BinaryTree::Leaf);
        }
    }
    built.pop().unwrap()
}
