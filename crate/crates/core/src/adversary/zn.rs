use crate::error::{structural, Result};
use crate::example::Example;
use crate::predictors::{Forecast, Forecaster, SideInfo};

use super::{recover_index, stream_gen, ZnParams};

/// Forecasts the current block exactly and `⋆` beyond it. At each block
/// start it reads the new index off the first example and regenerates.
pub struct ZnPredictor {
    params: ZnParams,
    js: Vec<usize>,
    last: Option<Forecast>,
}

impl ZnPredictor {
    pub fn new(params: ZnParams) -> Self {
        Self {
            params,
            js: Vec::new(),
            last: None,
        }
    }

    /// Indices recovered so far.
    pub fn indices(&self) -> &[usize] {
        &self.js
    }

    fn generate(&self) -> Result<Forecast> {
        let mut seq = stream_gen(&self.params, &self.js)?.examples;
        seq.resize(self.params.horizon(), Example::Star);
        Ok(Forecast::new(seq))
    }
}

impl Forecaster for ZnPredictor {
    fn horizon(&self) -> usize {
        self.params.horizon()
    }

    fn forecast(&mut self, observed: &[Example], _side: SideInfo<'_>) -> Result<Forecast> {
        let t = observed.len();
        let b = self.params.block();
        let out = if t == 1 {
            self.js.clear();
            self.generate()?
        } else if (t - 1) % b == 0 && (t - 1) / b <= self.params.n() {
            let j = recover_index(&observed[t - 1 - b..t - 1], &observed[t - 1]);
            self.js.push(j);
            self.generate()?
        } else {
            self.last
                .clone()
                .ok_or_else(|| structural("block predictor called mid-block first"))?
        };
        self.last = Some(out.clone());
        Ok(out)
    }

    fn name(&self) -> String {
        format!("zn:{}", self.params.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictors::Predictor;

    #[test]
    fn mistakes_only_at_block_starts() {
        let p = ZnParams::new(21, 2).unwrap();
        let xs = stream_gen(&p, &[3, 8]).unwrap().examples;
        let mut pred = Predictor::new(ZnPredictor::new(p));
        let mut rounds = Vec::new();
        for (t, x) in xs.iter().enumerate() {
            let f = pred.observe(x.clone()).unwrap();
            if pred.last_mistake() {
                rounds.push(t + 1);
            }
            // the current block is forecast exactly, the rest is ⋆
            let end = p.peek_end(t + 1);
            assert_eq!(&f[..end], &xs[..end]);
            assert!(f[end..].iter().all(Example::is_star));
        }
        assert_eq!(rounds, p.mistake_rounds());
    }
}
