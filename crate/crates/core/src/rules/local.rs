use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::caps::checked_pow;
use crate::error::{Error, Result};
use crate::universe::CellSet;

pub type Symbol = u8;

pub const MAX_ALPHABET: u8 = 36;

/// A total lookup table `A^M -> A`.
///
/// Entry `i` is the image of the pattern whose symbol at the `j`-th memory
/// offset (canonical order) is the `j`-th base-q digit of `i`, least
/// significant digit first.
#[derive(Clone)]
pub struct LocalRule {
    alphabet: u8,
    memory: Arc<CellSet>,
    table: Arc<[Symbol]>,
}

impl LocalRule {
    pub fn new(alphabet: u8, memory: Arc<CellSet>, table: Vec<Symbol>) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&alphabet) {
            return Err(Error::InvalidRule(format!(
                "alphabet size {alphabet} outside 2..={MAX_ALPHABET}"
            )));
        }
        let expected = checked_pow(alphabet as u64, memory.len())
            .filter(|n| *n <= usize::MAX as u64)
            .ok_or_else(|| Error::InvalidRule("table size overflows".into()))?;
        if table.len() as u64 != expected {
            return Err(Error::InvalidRule(format!(
                "table has {} entries, expected {alphabet}^{} = {expected}",
                table.len(),
                memory.len()
            )));
        }
        if let Some(bad) = table.iter().find(|s| **s >= alphabet) {
            return Err(Error::InvalidRule(format!(
                "table entry {bad} outside alphabet of size {alphabet}"
            )));
        }
        Ok(LocalRule {
            alphabet,
            memory,
            table: table.into(),
        })
    }

    /// Builds the table from a function of the neighbourhood, given in memory order.
    pub fn from_fn(
        alphabet: u8,
        memory: Arc<CellSet>,
        mut f: impl FnMut(&[Symbol]) -> Symbol,
    ) -> Result<Self> {
        let n = checked_pow(alphabet as u64, memory.len())
            .ok_or_else(|| Error::InvalidRule("table size overflows".into()))?;
        let mut digits = vec![0 as Symbol; memory.len()];
        let mut table = Vec::with_capacity(n as usize);
        for i in 0..n {
            let mut rest = i;
            for d in digits.iter_mut() {
                *d = (rest % alphabet as u64) as Symbol;
                rest /= alphabet as u64;
            }
            table.push(f(&digits));
        }
        LocalRule::new(alphabet, memory, table)
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn memory(&self) -> &Arc<CellSet> {
        &self.memory
    }

    pub fn table(&self) -> &[Symbol] {
        &self.table
    }

    pub(crate) fn shared_table(&self) -> Arc<[Symbol]> {
        self.table.clone()
    }

    pub fn index_of(&self, neighbourhood: &[Symbol]) -> usize {
        let q = self.alphabet as usize;
        neighbourhood.iter().rev().fold(0usize, |acc, &d| acc * q + d as usize)
    }

    pub fn apply(&self, neighbourhood: &[Symbol]) -> Symbol {
        debug_assert_eq!(neighbourhood.len(), self.memory.len());
        self.table[self.index_of(neighbourhood)]
    }

    /// Table as a digit string (digits `0-9a-z`).
    pub fn digit_string(&self) -> String {
        self.table
            .iter()
            .map(|&s| std::char::from_digit(s as u32, 36).expect("symbol below 36"))
            .collect()
    }

    pub fn from_digit_string(alphabet: u8, memory: Arc<CellSet>, digits: &str) -> Result<Self> {
        let table = digits
            .chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as Symbol)
                    .ok_or_else(|| Error::InvalidRule(format!("bad digit `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        LocalRule::new(alphabet, memory, table)
    }

    /// Memory positions the table actually reads.
    pub fn dependent_positions(&self) -> Vec<usize> {
        let q = self.alphabet as usize;
        let mut weight = 1usize;
        let mut out = Vec::new();
        for pos in 0..self.memory.len() {
            let mut depends = false;
            'scan: for i in 0..self.table.len() {
                let digit = (i / weight) % q;
                if digit != 0 {
                    continue;
                }
                for d in 1..q {
                    if self.table[i] != self.table[i + d * weight] {
                        depends = true;
                        break 'scan;
                    }
                }
            }
            if depends {
                out.push(pos);
            }
            weight *= q;
        }
        out
    }

    /// Re-expresses the rule over a smaller memory `keep` (positions into the
    /// current memory). The rule must not depend on the dropped positions.
    pub fn restrict(&self, keep: &[usize], memory: Arc<CellSet>) -> Result<Self> {
        if keep.len() != memory.len() {
            return Err(Error::InvalidRule("restricted memory size mismatch".into()));
        }
        let dependent = self.dependent_positions();
        if dependent.iter().any(|p| !keep.contains(p)) {
            return Err(Error::InvalidRule(
                "cannot drop a memory offset the rule depends on".into(),
            ));
        }
        let n = self.memory.len();
        LocalRule::from_fn(self.alphabet, memory, |small| {
            let mut full = vec![0 as Symbol; n];
            for (k, &p) in keep.iter().enumerate() {
                full[p] = small[k];
            }
            self.apply(&full)
        })
    }
}

impl PartialEq for LocalRule {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && (Arc::ptr_eq(&self.table, &other.table) || self.table == other.table)
            && (Arc::ptr_eq(&self.memory, &other.memory) || self.memory == other.memory)
    }
}

impl Eq for LocalRule {}

impl Hash for LocalRule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.alphabet.hash(state);
        self.table.hash(state);
    }
}

impl fmt::Debug for LocalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalRule(q={}, {})", self.alphabet, self.digit_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3() -> Arc<CellSet> {
        Arc::new(CellSet::interval(-1, 1))
    }

    #[test]
    fn table_indexing_least_significant_first() {
        // f(u,v,w) = w reads the last memory offset
        let f = LocalRule::from_fn(2, m3(), |n| n[2]).unwrap();
        assert_eq!(f.digit_string(), "00001111");
        let g = LocalRule::from_fn(2, m3(), |n| n[0]).unwrap();
        assert_eq!(g.digit_string(), "01010101");
        assert_eq!(f.apply(&[0, 0, 1]), 1);
        assert_eq!(g.apply(&[1, 0, 0]), 1);
    }

    #[test]
    fn validation() {
        assert!(LocalRule::new(2, m3(), vec![0; 7]).is_err());
        assert!(LocalRule::new(2, m3(), vec![2; 8]).is_err());
        assert!(LocalRule::new(1, m3(), vec![0; 1]).is_err());
        assert!(LocalRule::from_digit_string(2, m3(), "0101010x").is_err());
    }

    #[test]
    fn dependent_positions_and_restrict() {
        let f = LocalRule::from_fn(3, m3(), |n| (n[0] + 2 * n[2]) % 3).unwrap();
        assert_eq!(f.dependent_positions(), vec![0, 2]);
        let mem = Arc::new(CellSet::from_ints([-1, 1]));
        let r = f.restrict(&[0, 2], mem).unwrap();
        for u in 0..3 {
            for w in 0..3 {
                assert_eq!(r.apply(&[u, w]), f.apply(&[u, 1, w]));
            }
        }
        assert!(f.restrict(&[0, 1], Arc::new(CellSet::from_ints([-1, 0]))).is_err());
    }
}
