//! Geometry of the universe Z^d: cells, finite cell sets, boxes and the
//! operations between them.
//!
//! Cell sets are kept in lexicographic order. Every pattern encoding in the
//! crate relies on that order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Coord = i64;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cell(Vec<Coord>);

impl Cell {
    pub fn new(coords: Vec<Coord>) -> Self {
        assert!(!coords.is_empty(), "cells have dimension at least 1");
        Cell(coords)
    }

    pub fn zero(dim: usize) -> Self {
        Cell::new(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.0
    }

    pub fn checked_add(&self, other: &Cell) -> Result<Cell> {
        same_dim(self.dim(), other.dim())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(Cell)
    }

    pub fn checked_sub(&self, other: &Cell) -> Result<Cell> {
        self.checked_add(&other.checked_neg()?)
    }

    pub fn checked_neg(&self) -> Result<Cell> {
        self.0
            .iter()
            .map(|a| a.checked_neg().ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(Cell)
    }

    /// L-infinity norm.
    pub fn norm(&self) -> Coord {
        self.0.iter().map(|c| c.saturating_abs()).max().unwrap_or(0)
    }

    /// Parses `3` or `1,-2`.
    pub fn parse(text: &str) -> Result<Cell> {
        let coords = text
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<Coord>()
                    .map_err(|_| Error::InvalidParameter(format!("bad cell `{text}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() {
            return Err(Error::InvalidParameter(format!("bad cell `{text}`")));
        }
        Ok(Cell(coords))
    }
}

impl From<Coord> for Cell {
    fn from(c: Coord) -> Self {
        Cell(vec![c])
    }
}

impl<const N: usize> From<[Coord; N]> for Cell {
    fn from(c: [Coord; N]) -> Self {
        Cell::new(c.to_vec())
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

pub(crate) fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A finite, duplicate-free, lexicographically sorted set of cells.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "CellSetRepr", into = "CellSetRepr")]
pub struct CellSet {
    dim: usize,
    cells: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
struct CellSetRepr {
    dim: usize,
    cells: Vec<Cell>,
}

impl TryFrom<CellSetRepr> for CellSet {
    type Error = Error;
    fn try_from(r: CellSetRepr) -> Result<Self> {
        CellSet::new(r.dim, r.cells)
    }
}

impl From<CellSet> for CellSetRepr {
    fn from(s: CellSet) -> Self {
        CellSetRepr {
            dim: s.dim,
            cells: s.cells,
        }
    }
}

impl CellSet {
    pub fn new(dim: usize, mut cells: Vec<Cell>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        for c in &cells {
            same_dim(dim, c.dim())?;
        }
        cells.sort();
        cells.dedup();
        Ok(CellSet { dim, cells })
    }

    pub fn empty(dim: usize) -> Self {
        CellSet {
            dim,
            cells: Vec::new(),
        }
    }

    pub fn singleton(cell: Cell) -> Self {
        CellSet {
            dim: cell.dim(),
            cells: vec![cell],
        }
    }

    /// One-dimensional set from integers.
    pub fn from_ints(values: impl IntoIterator<Item = Coord>) -> Self {
        CellSet::new(1, values.into_iter().map(Cell::from).collect()).expect("1-d cells")
    }

    /// The 1-d interval `lo..=hi`.
    pub fn interval(lo: Coord, hi: Coord) -> Self {
        CellSet::from_ints(lo..=hi)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Cell> {
        self.cells.iter()
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.cells.binary_search(cell).is_ok()
    }

    /// Position of `cell` in canonical order.
    pub fn index_of(&self, cell: &Cell) -> Option<usize> {
        self.cells.binary_search(cell).ok()
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.cells.iter().all(|c| other.contains(c))
    }

    pub fn union(&self, other: &CellSet) -> Result<CellSet> {
        same_dim(self.dim, other.dim)?;
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        CellSet::new(self.dim, cells)
    }

    pub fn difference(&self, other: &CellSet) -> Result<CellSet> {
        same_dim(self.dim, other.dim)?;
        Ok(CellSet {
            dim: self.dim,
            cells: self
                .cells
                .iter()
                .filter(|c| !other.contains(c))
                .cloned()
                .collect(),
        })
    }

    pub fn intersection(&self, other: &CellSet) -> Result<CellSet> {
        same_dim(self.dim, other.dim)?;
        Ok(CellSet {
            dim: self.dim,
            cells: self
                .cells
                .iter()
                .filter(|c| other.contains(c))
                .cloned()
                .collect(),
        })
    }

    /// `{-e : e ∈ E}`.
    pub fn negated(&self) -> Result<CellSet> {
        let cells = self
            .cells
            .iter()
            .map(Cell::checked_neg)
            .collect::<Result<Vec<_>>>()?;
        CellSet::new(self.dim, cells)
    }

    /// Largest L-infinity norm of a member, 0 for the empty set.
    pub fn radius(&self) -> Coord {
        self.cells.iter().map(Cell::norm).max().unwrap_or(0)
    }

    /// Componentwise bounds `(lo, hi)`, `None` when empty.
    pub fn bounds(&self) -> Option<(Cell, Cell)> {
        let first = self.cells.first()?;
        let mut lo = first.0.clone();
        let mut hi = first.0.clone();
        for c in &self.cells {
            for j in 0..self.dim {
                lo[j] = lo[j].min(c.0[j]);
                hi[j] = hi[j].max(c.0[j]);
            }
        }
        Some((Cell(lo), Cell(hi)))
    }
}

impl<'a> IntoIterator for &'a CellSet {
    type Item = &'a Cell;
    type IntoIter = std::slice::Iter<'a, Cell>;
    fn into_iter(self) -> Self::IntoIter {
        self.cells.iter()
    }
}

/// Box `∏ [lo_j, hi_j]` with inclusive bounds.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "CuboidRepr", into = "CuboidRepr")]
pub struct Cuboid {
    lo: Cell,
    hi: Cell,
}

#[derive(Serialize, Deserialize)]
struct CuboidRepr {
    lo: Cell,
    hi: Cell,
}

impl TryFrom<CuboidRepr> for Cuboid {
    type Error = Error;
    fn try_from(r: CuboidRepr) -> Result<Self> {
        Cuboid::new(r.lo, r.hi)
    }
}

impl From<Cuboid> for CuboidRepr {
    fn from(b: Cuboid) -> Self {
        CuboidRepr { lo: b.lo, hi: b.hi }
    }
}

impl Cuboid {
    pub fn new(lo: Cell, hi: Cell) -> Result<Self> {
        same_dim(lo.dim(), hi.dim())?;
        if lo.0.iter().zip(&hi.0).any(|(a, b)| a > b) {
            return Err(Error::InvalidBox(format!("lo {lo} exceeds hi {hi}")));
        }
        // side lengths must fit
        for (a, b) in lo.0.iter().zip(&hi.0) {
            b.checked_sub(*a)
                .and_then(|d| d.checked_add(1))
                .ok_or(Error::Overflow)?;
        }
        Ok(Cuboid { lo, hi })
    }

    /// `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: Coord, hi: Coord) -> Result<Self> {
        Cuboid::new(Cell::new(vec![lo; dim]), Cell::new(vec![hi; dim]))
    }

    /// `[-r, r]^d`.
    pub fn centered(dim: usize, r: Coord) -> Result<Self> {
        Cuboid::cube(dim, -r, r)
    }

    pub fn interval(lo: Coord, hi: Coord) -> Result<Self> {
        Cuboid::new(Cell::from(lo), Cell::from(hi))
    }

    /// Parses `lo..hi` per dimension, comma separated (`-4..4` or `0..2,0..3`).
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad box `{text}`, expected lo..hi[,lo..hi]"));
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for part in text.split(',') {
            let (a, b) = part.trim().split_once("..").ok_or_else(bad)?;
            lo.push(a.trim().parse::<Coord>().map_err(|_| bad())?);
            hi.push(b.trim().parse::<Coord>().map_err(|_| bad())?);
        }
        if lo.is_empty() {
            return Err(bad());
        }
        Cuboid::new(Cell(lo), Cell(hi))
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn lo(&self) -> &Cell {
        &self.lo
    }

    pub fn hi(&self) -> &Cell {
        &self.hi
    }

    pub fn side(&self, j: usize) -> Coord {
        self.hi.0[j] - self.lo.0[j] + 1
    }

    /// Number of cells, `None` on overflow.
    pub fn volume(&self) -> Option<usize> {
        (0..self.dim()).try_fold(1usize, |acc, j| {
            usize::try_from(self.side(j)).ok().and_then(|s| acc.checked_mul(s))
        })
    }

    pub fn contains(&self, g: &Cell) -> bool {
        g.dim() == self.dim()
            && (0..self.dim()).all(|j| self.lo.0[j] <= g.0[j] && g.0[j] <= self.hi.0[j])
    }

    /// Position of a member cell in canonical (lexicographic) order.
    pub fn index_of(&self, g: &Cell) -> Option<usize> {
        if !self.contains(g) {
            return None;
        }
        let mut idx = 0usize;
        for j in 0..self.dim() {
            idx = idx * self.side(j) as usize + (g.0[j] - self.lo.0[j]) as usize;
        }
        Some(idx)
    }

    pub fn cells(&self) -> CellSet {
        let d = self.dim();
        let mut out = Vec::with_capacity(self.volume().unwrap_or(0));
        let mut cur = self.lo.0.clone();
        loop {
            out.push(Cell(cur.clone()));
            let mut j = d;
            loop {
                if j == 0 {
                    return CellSet { dim: d, cells: out };
                }
                j -= 1;
                if cur[j] < self.hi.0[j] {
                    cur[j] += 1;
                    break;
                }
                cur[j] = self.lo.0[j];
            }
        }
    }

    pub fn translate(&self, g: &Cell) -> Result<Cuboid> {
        Cuboid::new(self.lo.checked_add(g)?, self.hi.checked_add(g)?)
    }
}

impl fmt::Display for Cuboid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.dim())
            .map(|j| format!("{}..{}", self.lo.0[j], self.hi.0[j]))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `g + E`.
pub fn translate(set: &CellSet, g: &Cell) -> Result<CellSet> {
    same_dim(set.dim, g.dim())?;
    let cells = set
        .cells
        .iter()
        .map(|e| e.checked_add(g))
        .collect::<Result<Vec<_>>>()?;
    // translation preserves lexicographic order
    Ok(CellSet {
        dim: set.dim,
        cells,
    })
}

/// The sumset `E + M`.
pub fn minkowski(set: &CellSet, memory: &CellSet) -> Result<CellSet> {
    same_dim(set.dim, memory.dim)?;
    let mut cells = Vec::with_capacity(set.len() * memory.len());
    for e in &set.cells {
        for m in &memory.cells {
            cells.push(e.checked_add(m)?);
        }
    }
    CellSet::new(set.dim, cells)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySets {
    pub interior: CellSet,
    pub exterior: CellSet,
    pub boundary: CellSet,
}

/// M-interior, M-exterior and M-boundary of `K`.
pub fn boundary_sets(k: &CellSet, memory: &CellSet) -> Result<BoundarySets> {
    same_dim(k.dim, memory.dim)?;
    let mut interior = Vec::new();
    for g in &k.cells {
        let mut inside = true;
        for m in &memory.cells {
            if !k.contains(&g.checked_add(m)?) {
                inside = false;
                break;
            }
        }
        if inside {
            interior.push(g.clone());
        }
    }
    let interior = CellSet::new(k.dim, interior)?;
    let exterior = minkowski(k, memory)?.difference(k)?;
    let boundary = exterior.union(&k.difference(&interior)?)?;
    Ok(BoundarySets {
        interior,
        exterior,
        boundary,
    })
}

/// The unique cell of `K` congruent to `g` modulo the side lengths.
pub fn box_reduce(g: &Cell, k: &Cuboid) -> Result<Cell> {
    same_dim(k.dim(), g.dim())?;
    let coords = (0..g.dim())
        .map(|j| {
            let side = k.side(j);
            let off = g.0[j].checked_sub(k.lo.0[j]).ok_or(Error::Overflow)?;
            Ok(k.lo.0[j] + off.rem_euclid(side))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cell(coords))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2(a: Coord, b: Coord) -> Cell {
        Cell::from([a, b])
    }

    #[test]
    fn translate_examples() {
        let e = CellSet::from_ints([0]);
        assert_eq!(translate(&e, &Cell::from(0)).unwrap(), e);
        let e = CellSet::interval(-1, 1);
        assert_eq!(translate(&e, &Cell::from(3)).unwrap(), CellSet::interval(2, 4));
        let e = CellSet::new(2, vec![c2(0, 0), c2(1, 0)]).unwrap();
        assert_eq!(
            translate(&e, &c2(0, 1)).unwrap(),
            CellSet::new(2, vec![c2(0, 1), c2(1, 1)]).unwrap()
        );
    }

    #[test]
    fn translate_dimension_mismatch() {
        let e = CellSet::interval(0, 2);
        assert!(matches!(
            translate(&e, &c2(0, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn minkowski_examples() {
        let m = CellSet::interval(-1, 1);
        assert_eq!(minkowski(&CellSet::from_ints([0]), &m).unwrap(), m);
        assert_eq!(minkowski(&m, &m).unwrap(), CellSet::interval(-2, 2));
        assert_eq!(
            minkowski(&CellSet::from_ints([0, 5]), &CellSet::from_ints([0, 1])).unwrap(),
            CellSet::from_ints([0, 1, 5, 6])
        );
    }

    // Oracle: membership by definition over a bounding interval.
    fn boundary_oracle(k: &[Coord], m: &[Coord]) -> (Vec<Coord>, Vec<Coord>, Vec<Coord>) {
        let in_k = |x: Coord| k.contains(&x);
        let km: Vec<Coord> = (-20..=20)
            .filter(|x| k.iter().any(|a| m.iter().any(|b| a + b == *x)))
            .collect();
        let interior: Vec<Coord> = k
            .iter()
            .copied()
            .filter(|g| m.iter().all(|b| in_k(g + b)))
            .collect();
        let exterior: Vec<Coord> = km.iter().copied().filter(|x| !in_k(*x)).collect();
        let mut boundary: Vec<Coord> = exterior
            .iter()
            .copied()
            .chain(k.iter().copied().filter(|g| !interior.contains(g)))
            .collect();
        boundary.sort();
        boundary.dedup();
        (interior, exterior, boundary)
    }

    #[test]
    fn boundary_sets_examples() {
        let (i, e, b) = boundary_oracle(&[0, 1, 2, 3, 4], &[-1, 0, 1]);
        assert_eq!((i.clone(), e.clone(), b.clone()), (vec![1, 2, 3], vec![-1, 5], vec![-1, 0, 4, 5]));
        let got = boundary_sets(&CellSet::interval(0, 4), &CellSet::interval(-1, 1)).unwrap();
        assert_eq!(got.interior, CellSet::from_ints(i));
        assert_eq!(got.exterior, CellSet::from_ints(e));
        assert_eq!(got.boundary, CellSet::from_ints(b));

        let (i, e, b) = boundary_oracle(&[0], &[-1, 0, 1]);
        let got = boundary_sets(&CellSet::from_ints([0]), &CellSet::interval(-1, 1)).unwrap();
        assert!(i.is_empty());
        assert_eq!(got.interior, CellSet::empty(1));
        assert_eq!(got.exterior, CellSet::from_ints(e));
        assert_eq!(got.boundary, CellSet::from_ints(b));
        assert_eq!(got.boundary, CellSet::interval(-1, 1));
    }

    #[test]
    fn boundary_sets_trivial_memory() {
        let k = CellSet::from_ints([-3, 0, 2, 7]);
        let got = boundary_sets(&k, &CellSet::from_ints([0])).unwrap();
        assert_eq!(got.interior, k);
        assert!(got.exterior.is_empty());
        assert!(got.boundary.is_empty());
    }

    #[test]
    fn box_reduce_examples() {
        let k = Cuboid::interval(0, 4).unwrap();
        assert_eq!(box_reduce(&Cell::from(7), &k).unwrap(), Cell::from(2));
        for g in 0..=4 {
            assert_eq!(box_reduce(&Cell::from(g), &k).unwrap(), Cell::from(g));
        }
        let k = Cuboid::cube(2, 0, 2).unwrap();
        assert_eq!(box_reduce(&c2(-1, 6), &k).unwrap(), c2(2, 0));
    }

    #[test]
    fn cuboid_cells_are_canonical() {
        let k = Cuboid::new(c2(0, -1), c2(1, 1)).unwrap();
        let cells = k.cells();
        assert_eq!(cells.len(), 6);
        for (i, c) in cells.iter().enumerate() {
            assert_eq!(k.index_of(c), Some(i));
        }
        assert!(Cuboid::interval(3, 2).is_err());
        assert_eq!(Cuboid::parse("0..2,-1..1").unwrap(), Cuboid::new(c2(0, -1), c2(2, 1)).unwrap());
    }

    #[test]
    fn overflow_is_checked() {
        let e = CellSet::from_ints([1]);
        assert!(matches!(translate(&e, &Cell::from(Coord::MAX)), Err(Error::Overflow)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_set() -> impl Strategy<Value = Vec<Coord>> {
            prop::collection::vec(-6i64..6, 0..6)
        }

        proptest! {
            #[test]
            fn translate_composes(e in small_set(), g in -50i64..50, h in -50i64..50) {
                let e = CellSet::from_ints(e);
                let a = translate(&translate(&e, &Cell::from(g)).unwrap(), &Cell::from(h)).unwrap();
                prop_assert_eq!(a, translate(&e, &Cell::from(g + h)).unwrap());
            }

            #[test]
            fn minkowski_monotone(e in small_set(), extra in small_set(), m in small_set()) {
                let small = CellSet::from_ints(e.clone());
                let big = CellSet::from_ints(e.into_iter().chain(extra));
                let m = CellSet::from_ints(m);
                let a = minkowski(&small, &m).unwrap();
                let b = minkowski(&big, &m).unwrap();
                prop_assert!(a.is_subset(&b));
            }

            #[test]
            fn box_reduce_periodic(g0 in -40i64..40, g1 in -40i64..40, v0 in -5i64..5, v1 in -5i64..5,
                                   lo0 in -4i64..4, lo1 in -4i64..4, s0 in 1i64..5, s1 in 1i64..5) {
                let k = Cuboid::new(Cell::from([lo0, lo1]), Cell::from([lo0 + s0 - 1, lo1 + s1 - 1])).unwrap();
                let g = Cell::from([g0, g1]);
                let r = box_reduce(&g, &k).unwrap();
                prop_assert!(k.contains(&r));
                prop_assert_eq!(box_reduce(&r, &k).unwrap(), r.clone());
                let shifted = Cell::from([g0 + s0 * v0, g1 + s1 * v1]);
                prop_assert_eq!(box_reduce(&shifted, &k).unwrap(), r);
            }

            #[test]
            fn boundary_partition(k in small_set(), m in small_set()) {
                let k = CellSet::from_ints(k);
                let m = CellSet::from_ints(m);
                let b = boundary_sets(&k, &m).unwrap();
                prop_assert!(b.interior.is_subset(&k));
                prop_assert!(b.exterior.intersection(&k).unwrap().is_empty());
                let rebuilt = b.interior.union(&k.intersection(&b.boundary).unwrap()).unwrap();
                prop_assert_eq!(rebuilt, k);
            }
        }
    }
}
