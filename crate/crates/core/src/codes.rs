//! Integer encodings of patterns.
//!
//! Search order uses the *lexicographic* code: the first cell in canonical
//! order is the most significant digit, so numeric order equals the order of
//! packed strings. Rule tables use the opposite convention (see `LocalRule`).

use crate::rules::Symbol;

pub fn lex_code(symbols: &[Symbol], q: u8) -> u64 {
    symbols
        .iter()
        .fold(0u64, |acc, &s| acc * q as u64 + s as u64)
}

pub fn decode_lex(code: u64, q: u8, out: &mut [Symbol]) {
    let mut rest = code;
    for slot in out.iter_mut().rev() {
        *slot = (rest % q as u64) as Symbol;
        rest /= q as u64;
    }
}

pub(crate) fn lex_weights(q: u8, n: usize) -> Vec<u64> {
    let mut w = vec![1u64; n];
    for i in (0..n.saturating_sub(1)).rev() {
        w[i] = w[i + 1] * q as u64;
    }
    w
}
