//! Exhaustive enumeration of input patterns with block-parallel evaluation.
//!
//! Inputs are visited in ascending lexicographic code. Each block of codes is
//! evaluated in parallel into a buffer, then handed to the visitor in order,
//! so results never depend on scheduling.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::caps::within_cap;
use crate::engine::OutputPlan;
use crate::error::Result;
use crate::rules::Symbol;

const BLOCK: usize = 1 << 16;
const CHUNK: usize = 1 << 10;

pub(crate) struct Enumerator {
    q: u8,
    template: Vec<Symbol>,
    /// Enumerated buffer positions, most significant first.
    free: Vec<usize>,
    outputs: Vec<OutputPlan>,
    weights: Vec<u64>,
    total: u64,
}

impl Enumerator {
    pub(crate) fn new(
        q: u8,
        template: Vec<Symbol>,
        free: Vec<usize>,
        outputs: Vec<OutputPlan>,
        weights: Vec<u64>,
        cap: u64,
        what: &str,
    ) -> Result<Self> {
        debug_assert_eq!(outputs.len(), weights.len());
        let total = within_cap(q as u64, free.len(), cap, what)?;
        Ok(Enumerator {
            q,
            template,
            free,
            outputs,
            weights,
            total,
        })
    }

    /// Free-position digits of an input code.
    pub(crate) fn digits(&self, code: u64) -> Vec<Symbol> {
        let mut out = vec![0; self.free.len()];
        crate::codes::decode_lex(code, self.q, &mut out);
        out
    }

    /// The full input buffer for a code.
    pub(crate) fn buffer(&self, code: u64) -> Vec<Symbol> {
        let mut buf = self.template.clone();
        for (p, d) in self.free.iter().zip(self.digits(code)) {
            buf[*p] = d;
        }
        buf
    }

    #[inline]
    fn image(&self, buf: &[Symbol]) -> u64 {
        self.outputs
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| p.eval(buf) as u64 * w)
            .sum()
    }

    fn fill(&self, start: u64, out: &mut [u64]) {
        let mut buf = self.buffer(start);
        for slot in out.iter_mut() {
            *slot = self.image(&buf);
            for &p in self.free.iter().rev() {
                buf[p] += 1;
                if buf[p] < self.q {
                    break;
                }
                buf[p] = 0;
            }
        }
    }

    /// Visits `(input code, image code)` in ascending input code until the
    /// visitor breaks.
    pub(crate) fn scan<B>(&self, mut visit: impl FnMut(u64, u64) -> ControlFlow<B>) -> Option<B> {
        let mut images = vec![0u64; (self.total as usize).min(BLOCK)];
        let mut start = 0u64;
        while start < self.total {
            let len = ((self.total - start) as usize).min(BLOCK);
            let block = &mut images[..len];
            if len <= CHUNK {
                self.fill(start, block);
            } else {
                block
                    .par_chunks_mut(CHUNK)
                    .enumerate()
                    .for_each(|(ci, out)| self.fill(start + (ci * CHUNK) as u64, out));
            }
            for (i, &img) in block.iter().enumerate() {
                if let ControlFlow::Break(b) = visit(start + i as u64, img) {
                    return Some(b);
                }
            }
            start += len as u64;
        }
        None
    }
}
