//! Exact injectivity test for constant one-dimensional automata on the pair
//! graph of the de Bruijn graph.

use std::collections::{HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::Direction;
use serde::{Deserialize, Serialize};

use crate::caps::{within_cap, DEFAULT_CAP};
use crate::codes::decode_lex;
use crate::engine::Pattern;
use crate::error::{Error, Result};
use crate::rules::{LocalRule, Symbol};
use crate::universe::{CellSet, Coord};

/// `...LLL C RRR...` with `C[0]` at cell `origin`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventuallyPeriodic {
    pub left: Vec<Symbol>,
    pub center: Vec<Symbol>,
    pub right: Vec<Symbol>,
    pub origin: Coord,
}

impl EventuallyPeriodic {
    pub fn at(&self, n: Coord) -> Symbol {
        let i = n - self.origin;
        if i < 0 {
            let l = self.left.len() as Coord;
            self.left[i.rem_euclid(l) as usize]
        } else if (i as usize) < self.center.len() {
            self.center[i as usize]
        } else {
            let j = i as usize - self.center.len();
            self.right[j % self.right.len()]
        }
    }

    pub fn window(&self, lo: Coord, hi: Coord) -> Pattern {
        Pattern::from_fn(CellSet::interval(lo, hi), |c| self.at(c.coords()[0]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Injectivity1D {
    Injective,
    /// `σ(x) = σ(y)` with `x(differ_at) != y(differ_at)`.
    NonInjective {
        x: EventuallyPeriodic,
        y: EventuallyPeriodic,
        differ_at: Coord,
    },
}

impl Injectivity1D {
    pub fn is_injective(&self) -> bool {
        matches!(self, Injectivity1D::Injective)
    }
}

struct PairGraph {
    q: u64,
    w: usize,
    graph: DiGraph<(u64, u64), ()>,
}

impl PairGraph {
    fn build(rule: &LocalRule) -> Result<Self> {
        let memory = rule.memory();
        let (lo, hi) = memory.bounds().ok_or_else(|| Error::InvalidRule("empty memory".into()))?;
        let (lo, hi) = (lo.coords()[0], hi.coords()[0]);
        let w = (hi - lo + 1) as usize;
        let q = rule.alphabet() as u64;
        let words = within_cap(q, w, DEFAULT_CAP, "de Bruijn words")?;
        within_cap(q, 2 * w, DEFAULT_CAP, "pair graph states")?;
        let offsets: Vec<usize> = memory.iter().map(|m| (m.coords()[0] - lo) as usize).collect();
        let mut buf = vec![0; w];
        let mut nb = vec![0; offsets.len()];
        let image: Vec<Symbol> = (0..words)
            .map(|u| {
                decode_lex(u, q as u8, &mut buf);
                for (slot, &o) in nb.iter_mut().zip(&offsets) {
                    *slot = buf[o];
                }
                rule.apply(&nb)
            })
            .collect();
        let mut graph = DiGraph::new();
        let mut index = HashMap::new();
        for u in 0..words {
            for v in 0..words {
                if image[u as usize] == image[v as usize] {
                    index.insert((u, v), graph.add_node((u, v)));
                }
            }
        }
        for u in 0..words {
            for v in 0..words {
                let Some(&from) = index.get(&(u, v)) else { continue };
                for c in 0..q {
                    for d in 0..q {
                        let to = ((u * q) % words + c, (v * q) % words + d);
                        if let Some(&t) = index.get(&to) {
                            graph.add_edge(from, t, ());
                        }
                    }
                }
            }
        }
        Ok(PairGraph { q, w, graph })
    }

    fn diagonal(&self, n: NodeIndex) -> bool {
        let (u, v) = self.graph[n];
        u == v
    }

    fn first_symbols(&self, path: &[NodeIndex]) -> (Vec<Symbol>, Vec<Symbol>) {
        let top = self.q.pow(self.w as u32 - 1);
        path.iter()
            .map(|&n| {
                let (u, v) = self.graph[n];
                ((u / top) as Symbol, (v / top) as Symbol)
            })
            .unzip()
    }

    fn neighbors(&self, n: NodeIndex, dir: Direction) -> Vec<NodeIndex> {
        let mut out: Vec<NodeIndex> = self.graph.neighbors_directed(n, dir).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn closure(&self, seeds: &[NodeIndex], dir: Direction) -> Vec<bool> {
        let mut seen = vec![false; self.graph.node_count()];
        let mut queue: VecDeque<NodeIndex> = seeds.iter().copied().collect();
        for &s in seeds {
            seen[s.index()] = true;
        }
        while let Some(n) = queue.pop_front() {
            for m in self.neighbors(n, dir) {
                if !seen[m.index()] {
                    seen[m.index()] = true;
                    queue.push_back(m);
                }
            }
        }
        seen
    }

    /// Shortest path from `start` (following `dir`) to the first node
    /// satisfying `goal`, listed from `start`.
    fn bfs(
        &self,
        start: NodeIndex,
        dir: Direction,
        allowed: impl Fn(NodeIndex) -> bool,
        goal: impl Fn(NodeIndex) -> bool,
    ) -> Option<Vec<NodeIndex>> {
        let mut parent: HashMap<NodeIndex, NodeIndex> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        let mut seen = vec![false; self.graph.node_count()];
        seen[start.index()] = true;
        while let Some(n) = queue.pop_front() {
            if goal(n) {
                let mut path = vec![n];
                let mut cur = n;
                while let Some(&p) = parent.get(&cur) {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for m in self.neighbors(n, dir) {
                if !seen[m.index()] && allowed(m) {
                    seen[m.index()] = true;
                    parent.insert(m, n);
                    queue.push_back(m);
                }
            }
        }
        None
    }

    /// A shortest cycle through `c`, starting at `c`, staying in `allowed`.
    fn cycle(&self, c: NodeIndex, allowed: impl Fn(NodeIndex) -> bool) -> Vec<NodeIndex> {
        let mut best: Option<Vec<NodeIndex>> = None;
        for m in self.neighbors(c, Direction::Outgoing) {
            if !allowed(m) {
                continue;
            }
            let path = if m == c {
                Some(vec![c])
            } else {
                self.bfs(m, Direction::Outgoing, &allowed, |n| n == c).map(|p| {
                    let mut cyc = vec![c];
                    cyc.extend(&p[..p.len() - 1]);
                    cyc
                })
            };
            if let Some(p) = path {
                if best.as_ref().map_or(true, |b| p.len() < b.len()) {
                    best = Some(p);
                }
            }
        }
        best.expect("node lies on a cycle")
    }
}

/// Decides injectivity of the constant configuration of a one-dimensional
/// rule. A non-injective verdict comes with an eventually periodic pair,
/// asymptotic whenever the differing part can be reached from and return to
/// the diagonal.
pub fn constant_injectivity_1d(rule: &LocalRule) -> Result<Injectivity1D> {
    if rule.memory().dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: rule.memory().dim(),
        });
    }
    let pg = PairGraph::build(rule)?;
    let g = &pg.graph;
    let mut cyclic = vec![false; g.node_count()];
    for scc in tarjan_scc(g) {
        let looped = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
        for n in scc {
            cyclic[n.index()] = looped;
        }
    }
    let seeds: Vec<NodeIndex> = g.node_indices().filter(|n| cyclic[n.index()]).collect();
    let forward = pg.closure(&seeds, Direction::Outgoing);
    let backward = pg.closure(&seeds, Direction::Incoming);
    let Some(t) = g
        .node_indices()
        .find(|&n| !pg.diagonal(n) && forward[n.index()] && backward[n.index()])
    else {
        return Ok(Injectivity1D::Injective);
    };

    let diag = |n: NodeIndex| pg.diagonal(n);
    let cyc = |n: NodeIndex| cyclic[n.index()];
    let back = |n: NodeIndex| backward[n.index()];
    let fwd = |n: NodeIndex| forward[n.index()];
    let mut path_in = pg
        .bfs(t, Direction::Incoming, fwd, diag)
        .or_else(|| pg.bfs(t, Direction::Incoming, fwd, cyc))
        .expect("t has an infinite past");
    path_in.reverse();
    let path_out = pg
        .bfs(t, Direction::Outgoing, back, diag)
        .or_else(|| pg.bfs(t, Direction::Outgoing, back, cyc))
        .expect("t has an infinite future");
    let cycle_for = |c: NodeIndex| {
        if pg.diagonal(c) {
            pg.cycle(c, diag)
        } else {
            let comp = scc_members(g, c);
            pg.cycle(c, |n| comp.contains(&n))
        }
    };
    let c1 = path_in[0];
    let c2 = *path_out.last().expect("path is non-empty");
    let left = cycle_for(c1);
    let right = cycle_for(c2);
    let t_at = path_in.len() - 1;
    let mut center = path_in;
    center.extend(&path_out[1..]);
    center.pop();

    let (lx, ly) = pg.first_symbols(&left);
    let (cx, cy) = pg.first_symbols(&center);
    let (rx, ry) = pg.first_symbols(&right);
    let origin = -(t_at as Coord);
    let (u, v) = g[t];
    let top = pg.q.pow(pg.w as u32 - 1);
    let differ_at = (0..pg.w)
        .find(|&j| (u / (top / pg.q.pow(j as u32))) % pg.q != (v / (top / pg.q.pow(j as u32))) % pg.q)
        .expect("non-diagonal state") as Coord;
    Ok(Injectivity1D::NonInjective {
        x: EventuallyPeriodic { left: lx, center: cx, right: rx, origin },
        y: EventuallyPeriodic { left: ly, center: cy, right: ry, origin },
        differ_at,
    })
}

fn scc_members(g: &DiGraph<(u64, u64), ()>, c: NodeIndex) -> Vec<NodeIndex> {
    tarjan_scc(g)
        .into_iter()
        .find(|scc| scc.contains(&c))
        .expect("every node has a component")
}
