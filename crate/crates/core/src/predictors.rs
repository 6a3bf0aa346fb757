//! Forecasters of the example stream and the wrappers that make them
//! consistent and lazy.
//!
//! A [`Forecaster`] sees the observed prefix `x_{1:t}` and returns a full
//! length-`T` sequence. [`Predictor`] always runs it as
//! `Lazy(Consistent(inner))` and keeps the mistake bookkeeping: round `t ≥ 2`
//! is a predictor mistake when the forecast made at round `t − 1` had the
//! wrong example in position `t`.

use std::any::Any;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, structural, Error, Result};
use crate::example::Example;

/// An immutable window of a shared predicted sequence.
///
/// Windows are cheap to clone and to narrow, so learners that split the
/// horizon into blocks never copy the underlying sequence.
#[derive(Clone)]
pub struct Forecast {
    seq: Arc<Vec<Example>>,
    start: usize,
    len: usize,
}

impl Forecast {
    pub fn new(seq: Vec<Example>) -> Self {
        Self::from_arc(Arc::new(seq))
    }

    pub fn from_arc(seq: Arc<Vec<Example>>) -> Self {
        let len = seq.len();
        Self { seq, start: 0, len }
    }

    /// Entries `start .. start + len` (0-based) of this window.
    pub fn window(&self, start: usize, len: usize) -> Result<Forecast> {
        if start + len > self.len {
            return Err(structural(format!(
                "window {start}..{} outside a forecast of length {}",
                start + len,
                self.len
            )));
        }
        Ok(Forecast {
            seq: self.seq.clone(),
            start: self.start + start,
            len,
        })
    }

    /// Whether both views share storage and bounds.
    pub fn same_as(&self, other: &Forecast) -> bool {
        Arc::ptr_eq(&self.seq, &other.seq) && self.start == other.start && self.len == other.len
    }
}

impl Deref for Forecast {
    type Target = [Example];

    fn deref(&self) -> &[Example] {
        &self.seq[self.start..self.start + self.len]
    }
}

impl PartialEq for Forecast {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other) || **self == **other
    }
}

impl fmt::Debug for Forecast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

/// Opaque per-round payload handed to forecasters.
pub type SideInfo<'a> = Option<&'a dyn Any>;

/// Produces a full forecast of the stream from the observed prefix.
pub trait Forecaster: Send {
    fn horizon(&self) -> usize;

    /// Forecast after observing `observed = x_{1:t}`, `1 ≤ t ≤ T`.
    fn forecast(&mut self, observed: &[Example], side: SideInfo<'_>) -> Result<Forecast>;

    fn name(&self) -> String;
}

impl<F: Forecaster + ?Sized> Forecaster for Box<F> {
    fn horizon(&self) -> usize {
        (**self).horizon()
    }

    fn forecast(&mut self, observed: &[Example], side: SideInfo<'_>) -> Result<Forecast> {
        (**self).forecast(observed, side)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

/// Overwrites the forecast's prefix with the observed examples.
pub struct Consistent<F>(pub F);

impl<F: Forecaster> Forecaster for Consistent<F> {
    fn horizon(&self) -> usize {
        self.0.horizon()
    }

    fn forecast(&mut self, observed: &[Example], side: SideInfo<'_>) -> Result<Forecast> {
        let raw = self.0.forecast(observed, side)?;
        if raw.len() != self.horizon() {
            return Err(contract(format!(
                "{} forecast {} entries for horizon {}",
                self.0.name(),
                raw.len(),
                self.horizon()
            )));
        }
        if raw[..observed.len()] == *observed {
            return Ok(raw);
        }
        let mut fixed = raw.to_vec();
        fixed[..observed.len()].clone_from_slice(observed);
        Ok(Forecast::new(fixed))
    }

    fn name(&self) -> String {
        self.0.name()
    }
}

/// Repeats the previous forecast whenever it was right about the newly
/// observed example. The inner forecaster is still queried every round.
pub struct Lazy<F> {
    inner: F,
    last: Option<Forecast>,
}

impl<F> Lazy<F> {
    pub fn new(inner: F) -> Self {
        Self { inner, last: None }
    }
}

impl<F: Forecaster> Forecaster for Lazy<F> {
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    fn forecast(&mut self, observed: &[Example], side: SideInfo<'_>) -> Result<Forecast> {
        let fresh = self.inner.forecast(observed, side)?;
        let t = observed.len();
        if let Some(last) = &self.last {
            if t >= 2 && last.get(t - 1) == observed.last() {
                return Ok(last.clone());
            }
        }
        self.last = Some(fresh.clone());
        Ok(fresh)
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}

/// `Lazy(Consistent(f))`.
pub fn wrap<F: Forecaster>(f: F) -> Lazy<Consistent<F>> {
    Lazy::new(Consistent(f))
}

/// Knows the true stream.
#[derive(Debug, Clone)]
pub struct Perfect {
    stream: Forecast,
}

impl Perfect {
    pub fn new(stream: Vec<Example>) -> Result<Self> {
        if stream.is_empty() {
            return Err(structural("empty stream"));
        }
        Ok(Self {
            stream: Forecast::new(stream),
        })
    }
}

impl Forecaster for Perfect {
    fn horizon(&self) -> usize {
        self.stream.len()
    }

    fn forecast(&mut self, _: &[Example], _: SideInfo<'_>) -> Result<Forecast> {
        Ok(self.stream.clone())
    }

    fn name(&self) -> String {
        "perfect".into()
    }
}

/// Always forecasts the same fixed sequence `z_{1:T}`.
#[derive(Debug, Clone)]
pub struct Static {
    z: Forecast,
}

impl Static {
    pub fn new(z: Vec<Example>) -> Result<Self> {
        if z.is_empty() {
            return Err(structural("empty sequence"));
        }
        Ok(Self { z: Forecast::new(z) })
    }
}

impl Forecaster for Static {
    fn horizon(&self) -> usize {
        self.z.len()
    }

    fn forecast(&mut self, _: &[Example], _: SideInfo<'_>) -> Result<Forecast> {
        Ok(self.z.clone())
    }

    fn name(&self) -> String {
        "static".into()
    }
}

/// A wrong example for slot value `x`: the last entry of `domain` that
/// differs from `x`, or `⋆` (for points) / the point 0 (for `⋆`) when no
/// domain is given.
pub fn sentinel(x: &Example, domain: &[Example]) -> Example {
    if let Some(d) = domain.iter().rev().find(|d| *d != x) {
        return d.clone();
    }
    match x {
        Example::Star => Example::Point(crate::example::ratio(0, 1)),
        Example::Point(_) => Example::Star,
        Example::Atom(k) => Example::Atom(k.wrapping_add(1)),
    }
}

/// Knows a base stream but garbles its forecast of `k` rounds.
///
/// A random set `R ⊆ {2..T}` with `|R| = k` is drawn at construction. At
/// round `t` the forecast is the base stream with every position `s > t`,
/// `s ∈ R` replaced by a sentinel; run against its own base stream it makes
/// exactly `k` mistakes, at the rounds in `R`.
#[derive(Debug, Clone)]
pub struct Corrupting {
    base: Vec<Example>,
    rounds: BTreeSet<usize>,
    sentinels: Vec<Example>,
}

impl Corrupting {
    /// `domain` supplies sentinel candidates; pass `&[]` for thresholds.
    pub fn new(base: Vec<Example>, k: usize, seed: u64, domain: &[Example]) -> Result<Self> {
        let t = base.len();
        if t == 0 {
            return Err(structural("empty base stream"));
        }
        if k > t - 1 {
            return Err(Error::Config(format!(
                "corruption count {k} outside 0..={}",
                t - 1
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rounds = sample(&mut rng, t - 1, k).into_iter().map(|i| i + 2).collect();
        Self::with_rounds(base, rounds, domain)
    }

    /// Uses an explicit set of 1-based mistake rounds in `2..=T`.
    pub fn with_rounds(base: Vec<Example>, rounds: BTreeSet<usize>, domain: &[Example]) -> Result<Self> {
        if let Some(r) = rounds.iter().find(|&&r| r < 2 || r > base.len()) {
            return Err(Error::Config(format!("corruption round {r} outside 2..={}", base.len())));
        }
        let sentinels = base.iter().map(|x| sentinel(x, domain)).collect();
        Ok(Self {
            base,
            rounds,
            sentinels,
        })
    }

    /// 1-based rounds at which the forecast is wrong.
    pub fn rounds(&self) -> &BTreeSet<usize> {
        &self.rounds
    }
}

impl Forecaster for Corrupting {
    fn horizon(&self) -> usize {
        self.base.len()
    }

    fn forecast(&mut self, observed: &[Example], _: SideInfo<'_>) -> Result<Forecast> {
        let t = observed.len();
        let mut out = self.base.clone();
        for &s in self.rounds.range(t + 1..) {
            out[s - 1] = self.sentinels[s - 1].clone();
        }
        Ok(Forecast::new(out))
    }

    fn name(&self) -> String {
        format!("corrupting:{}", self.rounds.len())
    }
}

/// A forecaster defined by a closure over the observed prefix and the
/// round's side information.
pub struct Custom<F> {
    horizon: usize,
    name: String,
    f: F,
}

impl<F> Custom<F>
where
    F: FnMut(&[Example], SideInfo<'_>) -> Vec<Example> + Send,
{
    pub fn new(name: impl Into<String>, horizon: usize, f: F) -> Self {
        Self {
            horizon,
            name: name.into(),
            f,
        }
    }
}

impl<F> Forecaster for Custom<F>
where
    F: FnMut(&[Example], SideInfo<'_>) -> Vec<Example> + Send,
{
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn forecast(&mut self, observed: &[Example], side: SideInfo<'_>) -> Result<Forecast> {
        Ok(Forecast::new((self.f)(observed, side)))
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

/// A wrapped forecaster plus the observed prefix and mistake bookkeeping.
pub struct Predictor {
    inner: Lazy<Consistent<Box<dyn Forecaster>>>,
    observed: Vec<Example>,
    last: Option<Forecast>,
    mistakes: u64,
    last_mistake: bool,
}

impl Predictor {
    pub fn new(f: impl Forecaster + 'static) -> Self {
        Self::from_box(Box::new(f))
    }

    pub fn from_box(f: Box<dyn Forecaster>) -> Self {
        Self {
            inner: wrap(f),
            observed: Vec::new(),
            last: None,
            mistakes: 0,
            last_mistake: false,
        }
    }

    pub fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    pub fn name(&self) -> String {
        self.inner.name()
    }

    pub fn observe(&mut self, x: Example) -> Result<Forecast> {
        self.observe_with(x, None)
    }

    /// Observes `x_t` and returns the forecast `x̂^t_{1:T}`.
    pub fn observe_with(&mut self, x: Example, side: SideInfo<'_>) -> Result<Forecast> {
        let t = self.observed.len() + 1;
        if t > self.horizon() {
            return Err(structural(format!(
                "observation {t} past the horizon {}",
                self.horizon()
            )));
        }
        self.last_mistake = match &self.last {
            Some(prev) => prev[t - 1] != x,
            None => false,
        };
        self.mistakes += u64::from(self.last_mistake);
        self.observed.push(x);
        let out = self.inner.forecast(&self.observed, side)?;
        self.last = Some(out.clone());
        Ok(out)
    }

    /// Whether the latest observation was mispredicted.
    pub fn last_mistake(&self) -> bool {
        self.last_mistake
    }

    /// Mistakes so far, counted from round 2.
    pub fn mistakes(&self) -> u64 {
        self.mistakes
    }

    pub fn observed(&self) -> &[Example] {
        &self.observed
    }

    pub fn last_output(&self) -> Option<&Forecast> {
        self.last.as_ref()
    }
}
