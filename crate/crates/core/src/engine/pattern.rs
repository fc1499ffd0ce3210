use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::Symbol;
use crate::universe::{same_dim, translate, Cell, CellSet, Cuboid};

/// A symbol assignment `x|_E` over a finite support.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub struct Pattern {
    support: CellSet,
    symbols: Vec<Symbol>,
}

/// JSON form: canonical cells plus the packed symbol string aligned with them.
#[derive(Serialize, Deserialize)]
struct PatternRepr {
    cells: Vec<Cell>,
    symbols: String,
}

impl TryFrom<PatternRepr> for Pattern {
    type Error = Error;
    fn try_from(r: PatternRepr) -> Result<Self> {
        let dim = r
            .cells
            .first()
            .map(Cell::dim)
            .ok_or_else(|| Error::InvalidPattern("empty pattern".into()))?;
        let sorted = CellSet::new(dim, r.cells.clone())?;
        if sorted.cells() != r.cells.as_slice() {
            return Err(Error::InvalidPattern("cells not in canonical order".into()));
        }
        Pattern::new(sorted, parse_digits(&r.symbols)?)
    }
}

impl From<Pattern> for PatternRepr {
    fn from(p: Pattern) -> Self {
        PatternRepr {
            symbols: p.packed(),
            cells: p.support.cells().to_vec(),
        }
    }
}

fn parse_digits(text: &str) -> Result<Vec<Symbol>> {
    text.trim()
        .chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as Symbol)
                .ok_or_else(|| Error::InvalidPattern(format!("bad symbol `{c}`")))
        })
        .collect()
}

impl Pattern {
    pub fn new(support: CellSet, symbols: Vec<Symbol>) -> Result<Self> {
        if support.len() != symbols.len() {
            return Err(Error::InvalidPattern(format!(
                "{} symbols for {} cells",
                symbols.len(),
                support.len()
            )));
        }
        Ok(Pattern { support, symbols })
    }

    pub fn constant(support: CellSet, symbol: Symbol) -> Self {
        let n = support.len();
        Pattern {
            support,
            symbols: vec![symbol; n],
        }
    }

    pub fn from_fn(support: CellSet, mut f: impl FnMut(&Cell) -> Symbol) -> Self {
        let symbols = support.iter().map(&mut f).collect();
        Pattern { support, symbols }
    }

    pub fn support(&self) -> &CellSet {
        &self.support
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, cell: &Cell) -> Option<Symbol> {
        self.support.index_of(cell).map(|i| self.symbols[i])
    }

    pub fn check_alphabet(&self, q: u8) -> Result<()> {
        match self.symbols.iter().find(|s| **s >= q) {
            Some(s) => Err(Error::InvalidPattern(format!(
                "symbol {s} outside alphabet of size {q}"
            ))),
            None => Ok(()),
        }
    }

    /// `g x`, supported on `g + E`.
    pub fn translate(&self, g: &Cell) -> Result<Pattern> {
        Ok(Pattern {
            support: translate(&self.support, g)?,
            symbols: self.symbols.clone(),
        })
    }

    pub fn restrict(&self, cells: &CellSet) -> Result<Pattern> {
        same_dim(self.support.dim(), cells.dim())?;
        let symbols = cells
            .iter()
            .map(|c| {
                self.get(c).ok_or_else(|| {
                    Error::SupportMismatch(format!("cell {c} outside the pattern support"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Pattern {
            support: cells.clone(),
            symbols,
        })
    }

    /// Symbols as a base-36 digit string in canonical cell order.
    pub fn packed(&self) -> String {
        self.symbols
            .iter()
            .map(|&s| std::char::from_digit(s as u32, 36).expect("symbol below 36"))
            .collect()
    }

    /// Reads a packed digit string over the cells of `cuboid`.
    pub fn from_packed(cuboid: &Cuboid, text: &str) -> Result<Pattern> {
        let symbols = parse_digits(text)?;
        Pattern::new(cuboid.cells(), symbols)
    }

    /// `cell=symbol` pairs separated by whitespace or `;`, cells written as
    /// `3` or `1,-2`.
    pub fn to_text(&self) -> String {
        self.support
            .iter()
            .zip(&self.symbols)
            .map(|(c, s)| {
                let coords: Vec<String> = c.coords().iter().map(|v| v.to_string()).collect();
                format!("{}={}", coords.join(","), s)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_text(dim: usize, text: &str) -> Result<Pattern> {
        let mut pairs = Vec::new();
        for item in text.split(|c: char| c.is_whitespace() || c == ';') {
            if item.is_empty() {
                continue;
            }
            let (cell, sym) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidPattern(format!("expected cell=symbol, got `{item}`")))?;
            let cell = Cell::parse(cell)?;
            same_dim(dim, cell.dim())?;
            let sym = parse_digits(sym)?;
            if sym.len() != 1 {
                return Err(Error::InvalidPattern(format!("bad symbol in `{item}`")));
            }
            pairs.push((cell, sym[0]));
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidPattern("duplicate cell".into()));
        }
        let support = CellSet::new(dim, pairs.iter().map(|p| p.0.clone()).collect())?;
        Pattern::new(support, pairs.into_iter().map(|p| p.1).collect())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern[{}]", self.to_text())
    }
}
