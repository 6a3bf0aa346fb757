//! The lower-bound construction for thresholds on `[0, 1]`.
//!
//! Streams are built block by block. Each block is a dyadic ordering of
//! `B` evenly spaced points inside the gap of the previous block that the
//! index `j_i` selects, so a predictor that knows the first block can
//! reconstruct every later block from its first example.

mod nature;
mod zn;

pub use nature::{nature_offline_step, nature_peeks_game, PeeksOutcome};
pub use zn::ZnPredictor;

use crate::error::{structural, Error, Result};
use crate::example::{ratio, Example, Rational};

/// `m` evenly spaced points strictly between `a` and `b`.
pub fn f_even(a: &Rational, b: &Rational, m: usize) -> Vec<Rational> {
    let step = (b - a) / Rational::from_integer((m as i64 + 1).into());
    (1..=m)
        .map(|i| a + &step * Rational::from_integer((i as i64).into()))
        .collect()
}

/// Midpoint-first reordering of a sequence of length `2^k − 1`: level `l`
/// lists the 1-based positions `i(N+1)/2^l` for odd `i`.
pub fn dyadic_order<T: Clone>(s: &[T]) -> Result<Vec<T>> {
    let n1 = s.len() + 1;
    if !n1.is_power_of_two() || s.is_empty() {
        return Err(structural(format!(
            "dyadic order needs 2^k - 1 elements, got {}",
            s.len()
        )));
    }
    let mut out = Vec::with_capacity(s.len());
    let mut denom = 2;
    while denom <= n1 {
        let stride = n1 / denom;
        for i in (1..denom).step_by(2) {
            out.push(s[i * stride - 1].clone());
        }
        denom *= 2;
    }
    Ok(out)
}

/// Shape of the stream class: horizon `T = (n+1)B` with `B + 1` a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZnParams {
    horizon: usize,
    n: usize,
    block: usize,
}

impl ZnParams {
    pub fn new(horizon: usize, n: usize) -> Result<Self> {
        if horizon == 0 || horizon % (n + 1) != 0 {
            return Err(Error::Config(format!(
                "horizon {horizon} is not a positive multiple of n + 1 = {}",
                n + 1
            )));
        }
        let block = horizon / (n + 1);
        if !(block + 1).is_power_of_two() {
            return Err(Error::Config(format!(
                "block length {block} is not of the form 2^k - 1"
            )));
        }
        Ok(Self { horizon, n, block })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `B = T/(n+1)`.
    pub fn block(&self) -> usize {
        self.block
    }

    /// `S^0 = f(0, 1)`.
    pub fn s0(&self) -> Vec<Rational> {
        f_even(&ratio(0, 1), &ratio(1, 1), self.block)
    }

    /// Rounds at which the block predictor is wrong: `B+1, 2B+1, …, nB+1`.
    pub fn mistake_rounds(&self) -> Vec<usize> {
        (1..=self.n).map(|i| i * self.block + 1).collect()
    }

    /// Last round whose example is known at round `t`: the end of `t`'s block.
    pub fn peek_end(&self, t: usize) -> usize {
        t.div_ceil(self.block) * self.block
    }
}

/// Output of the stream generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    /// `Dyd(S^0) ∘ … ∘ Dyd(S^m)`.
    pub examples: Vec<Example>,
    /// `S^0, …, S^m`, each increasing.
    pub sets: Vec<Vec<Rational>>,
    /// `(a_i, b_i)`: every later set lies strictly inside.
    pub gaps: Vec<(Rational, Rational)>,
}

/// Builds the stream for indices `j_{1:m}`, `m ≤ n`, each in `1..=B+1`.
pub fn stream_gen(params: &ZnParams, js: &[usize]) -> Result<Generated> {
    let b = params.block;
    if js.len() > params.n {
        return Err(Error::Config(format!(
            "{} indices for n = {}",
            js.len(),
            params.n
        )));
    }
    let mut sets = vec![params.s0()];
    let mut gaps = vec![(ratio(0, 1), ratio(1, 1))];
    for &j in js {
        if !(1..=b + 1).contains(&j) {
            return Err(Error::Config(format!("index {j} outside 1..={}", b + 1)));
        }
        let prev = &sets[sets.len() - 1];
        let (a, hi) = &gaps[gaps.len() - 1];
        let lo = if j == 1 { a.clone() } else { prev[j - 2].clone() };
        let up = if j == b + 1 { hi.clone() } else { prev[j - 1].clone() };
        sets.push(f_even(&lo, &up, b));
        gaps.push((lo, up));
    }
    let mut examples = Vec::with_capacity(sets.len() * b);
    for s in &sets {
        examples.extend(dyadic_order(s)?.into_iter().map(Example::Point));
    }
    Ok(Generated {
        examples,
        sets,
        gaps,
    })
}

/// The smallest `j` with `x < S_j` over the sorted previous block, else `B+1`.
/// Non-point examples map to `B+1`.
pub fn recover_index(prev_block: &[Example], x: &Example) -> usize {
    let mut s: Vec<&Rational> = prev_block.iter().filter_map(Example::as_point).collect();
    s.sort();
    match x.as_point() {
        Some(v) => s.iter().position(|p| v < *p).map_or(s.len() + 1, |i| i + 1),
        None => s.len() + 1,
    }
}

/// `((n+1)/2) · log2(T/(n+1))`.
pub fn lower_bound_value(horizon: usize, n: usize) -> Result<f64> {
    if horizon < n + 1 {
        return Err(Error::Config(format!(
            "horizon {horizon} shorter than n + 1 = {}",
            n + 1
        )));
    }
    let b = horizon as f64 / (n + 1) as f64;
    Ok((n + 1) as f64 / 2.0 * b.log2())
}
