use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `n`-th Catalan number via `(k+2) c_{k+1} = 2(2k+1) c_k`, `c_0 = 1`.
pub fn catalan(n: usize) -> BigUint {
    catalan_counted(n).0
}

/// Like [`catalan`], also returning the number of big-integer
/// multiplications and divisions performed.
pub fn catalan_counted(n: usize) -> (BigUint, u64) {
    let mut c = BigUint::one();
    let mut ops = 0;
    for k in 0..n as u64 {
        c *= 2 * (2 * k + 1);
        c /= k + 2;
        ops += 2;
    }
    (c, ops)
}

/// `c_0 ..= c_n` from `c_{k+1} = Σ c_i c_{k-i}`; quadratic, used as an oracle.
pub fn catalan_convolution_table(n: usize) -> Vec<BigUint> {
    let mut c: Vec<BigUint> = Vec::with_capacity(n + 1);
    c.push(BigUint::one());
    for k in 0..n {
        let next = (0..=k).fold(BigUint::zero(), |acc, i| acc + &c[i] * &c[k - i]);
        c.push(next);
    }
    c
}

pub fn catalan_convolution(n: usize) -> BigUint {
    catalan_convolution_table(n).pop().unwrap()
}

/// A truncated formal power series with natural coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series(pub Vec<BigUint>);

impl Series {
    /// `d/dz`
    pub fn derivative(&self) -> Series {
        Series(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigUint::from(k))
                .collect(),
        )
    }

    /// Multiplication by `z`.
    pub fn shift(&self) -> Series {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(BigUint::zero());
        v.extend(self.0.iter().cloned());
        Series(v)
    }

    pub fn coeff(&self, n: usize) -> BigUint {
        self.0.get(n).cloned().unwrap_or_default()
    }
}

/// Checks `[z^n] z C'(z) = n · c_n`, with `C` truncated at degree `n` and
/// differentiated formally, against the recurrence value of `c_n`.
pub fn pointing_check(n: usize) -> bool {
    let series = Series(catalan_convolution_table(n));
    let pointed = series.derivative().shift();
    pointed.coeff(n) == catalan(n) * BigUint::from(n)
}
