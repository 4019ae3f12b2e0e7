//! m-step competition graphs `C^m(D)` and related graph utilities.

use serde::{Deserialize, Serialize};

use crate::spectra::{self, PowerSequence};
use crate::{BoolMatrix, Error, Result, ToeplitzSpec};

/// Undirected loop-free graph on `[n]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimpleGraph {
    adjacency: BoolMatrix,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl SimpleGraph {
    /// Off-diagonal part of a symmetric matrix.
    pub fn from_symmetric(m: &BoolMatrix) -> SimpleGraph {
        debug_assert!(m.is_symmetric());
        let n = m.n();
        let adjacency = BoolMatrix::from_fn(n, |u, v| u != v && m.get(u, v)).expect("n >= 1");
        SimpleGraph { adjacency }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<SimpleGraph> {
        let mut adjacency = BoolMatrix::zeros(n)?;
        for &(u, v) in edges {
            for w in [u, v] {
                if !(1..=n).contains(&w) {
                    return Err(Error::VertexOutOfRange {
                        vertex: w as i64,
                        n,
                    });
                }
            }
            if u != v {
                adjacency.set(u, v, true);
                adjacency.set(v, u, true);
            }
        }
        Ok(SimpleGraph { adjacency })
    }

    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u, v)
    }

    pub fn adjacency(&self) -> &BoolMatrix {
        &self.adjacency
    }

    /// Edges `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (1..=n)
            .flat_map(|u| {
                (u + 1..=n)
                    .filter(move |&v| self.adjacent(u, v))
                    .map(move |v| (u, v))
            })
            .collect()
    }

    pub fn is_well_formed(&self) -> bool {
        self.adjacency.is_symmetric() && (1..=self.n()).all(|v| !self.adjacent(v, v))
    }

    /// Connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n + 1];
        let mut out = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for v in self.adjacency.row_support(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// True iff the graph is a disjoint union of cliques.
    pub fn is_clique_union(&self) -> bool {
        self.components().iter().all(|c| {
            c.iter()
                .all(|&u| c.iter().all(|&v| u == v || self.adjacent(u, v)))
        })
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph \"{name}\" {{\n");
        for v in 1..=self.n() {
            out.push_str(&format!("  {v};\n"));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

impl Serialize for SimpleGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            n: self.n(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimpleGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        let edges: Vec<_> = raw.edges.iter().map(|e| (e[0], e[1])).collect();
        SimpleGraph::from_edges(raw.n, &edges).map_err(serde::de::Error::custom)
    }
}

/// `C^m(D)`: `u ~ v` iff some `w` is reachable from both by walks of length `m`.
pub fn m_step_graph(a: &BoolMatrix, m: u64) -> Result<SimpleGraph> {
    spectra::competition_matrix(a, m).map(|b| SimpleGraph::from_symmetric(&b))
}

/// `C(D)` from the closed-form adjacency rule on `v - u`.
pub fn competition_graph_formula(spec: &ToeplitzSpec) -> SimpleGraph {
    let n = spec.n();
    let (s, t) = (spec.s(), spec.t());
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            let delta = v - u;
            // v - u = s_i - s_j with s_i <= n - u and s_j <= n - v
            let diff_s = s.iter().filter(|&&si| si <= n - u).any(|&si| {
                si > delta
                    && s.binary_search(&(si - delta))
                        .is_ok_and(|_| si - delta <= n - v)
            });
            // v - u = t_i - t_j with t_i <= v - 1 and t_j <= u - 1
            let diff_t = t.iter().filter(|&&ti| ti < v).any(|&ti| {
                ti > delta && t.binary_search(&(ti - delta)).is_ok_and(|_| ti - delta < u)
            });
            // v - u = s_i + t_j
            let sum = s
                .iter()
                .any(|&si| si < delta && t.binary_search(&(delta - si)).is_ok());
            if diff_s || diff_t || sum {
                edges.push((u, v));
            }
        }
    }
    SimpleGraph::from_edges(n, &edges).expect("vertices in range")
}

/// Limit of `{C^m(D)}` and the least `m` from which it is constant.
pub fn limit_graph(a: &BoolMatrix) -> Result<(SimpleGraph, usize)> {
    let seq = spectra::power_sequence(a, spectra::DEFAULT_BUDGET)?;
    limit_graph_from(&seq)
}

pub fn limit_graph_from(seq: &PowerSequence) -> Result<(SimpleGraph, usize)> {
    let tail = spectra::competition_tail_from(seq);
    let limit = spectra::limit_of(&tail)?;
    let graph = SimpleGraph::from_symmetric(&limit);
    let mut first = tail.index;
    while first > 1 && SimpleGraph::from_symmetric(&seq.power(first - 1).gram()) == graph {
        first -= 1;
    }
    Ok((graph, first))
}

/// Every edge of `C^m(D)`, `m <= horizon`, joins vertices congruent mod `d`.
pub fn adjacency_necessity_check(spec: &ToeplitzSpec, horizon: usize) -> bool {
    let d = spec.gcd_sum() as usize;
    let a = spec.build_matrix();
    let mut power = a.clone();
    for m in 1..=horizon {
        if m > 1 {
            power = power.multiply(&a).expect("same dimension");
        }
        let g = SimpleGraph::from_symmetric(&power.gram());
        if g.edges().iter().any(|&(u, v)| (v - u) % d != 0) {
            return false;
        }
    }
    true
}

/// Strongly connected components (Tarjan), each sorted, ordered by least vertex.
pub fn strong_components(a: &BoolMatrix) -> Vec<Vec<usize>> {
    struct State<'a> {
        a: &'a BoolMatrix,
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        counter: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(st: &mut State<'_>, v: usize) {
        st.index[v] = Some(st.counter);
        st.low[v] = st.counter;
        st.counter += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for w in st.a.row_support(v) {
            match st.index[w] {
                None => {
                    visit(st, w);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                _ => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("nonempty");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            st.out.push(comp);
        }
    }
    let n = a.n();
    let mut st = State {
        a,
        index: vec![None; n + 1],
        low: vec![0; n + 1],
        on_stack: vec![false; n + 1],
        stack: Vec::new(),
        counter: 0,
        out: Vec::new(),
    };
    for v in 1..=n {
        if st.index[v].is_none() {
            visit(&mut st, v);
        }
    }
    st.out.sort();
    st.out
}

/// A square matrix is irreducible iff its digraph is strongly connected;
/// 1x1 matrices count as irreducible.
pub fn is_irreducible(a: &BoolMatrix) -> bool {
    a.n() == 1 || strong_components(a).len() == 1
}

/// DOT rendering of the digraph of `T_n<S;T>`: solid `s=k` arcs, dashed `t=k` arcs.
pub fn digraph_dot(spec: &ToeplitzSpec) -> String {
    let n = spec.n();
    let mut out = format!("digraph \"{spec}\" {{\n");
    for v in 1..=n {
        out.push_str(&format!("  {v};\n"));
    }
    for u in 1..=n {
        for &s in spec.s() {
            if u + s <= n {
                out.push_str(&format!(
                    "  {u} -> {} [label=\"s={s}\", style=solid];\n",
                    u + s
                ));
            }
        }
        for &t in spec.t() {
            if u > t {
                out.push_str(&format!(
                    "  {u} -> {} [label=\"t={t}\", style=dashed];\n",
                    u - t
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}
