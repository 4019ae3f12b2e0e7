//! Worked examples with their expected outputs embedded as text.
//!
//! Each check recomputes its value from scratch and renders it to a string;
//! a check passes iff that string equals the embedded one byte for byte.

use crate::compgraph::{self, strong_components};
use crate::spectra;
use crate::walks::{self, format_offsets, ArcKind, Walk};
use crate::{Error, ToeplitzSpec};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GoldenResult {
    pub name: &'static str,
    pub expected: String,
    pub actual: String,
}

impl GoldenResult {
    pub fn matches(&self) -> bool {
        self.expected == self.actual
    }
}

type Check = fn() -> String;

const T5_A3K_MINUS_1: &str = "5\n00001\n00000\n10000\n00000\n00100\n";
const T5_A3K: &str = "5\n10000\n00000\n00100\n00000\n00001\n";
const T5_A3K_PLUS_1: &str = "5\n00100\n00000\n00001\n00000\n10000\n";

const T8_MATRIX: &str = "8
01001000
00100100
10010010
01001001
00100100
10010010
01001001
00100100
";

fn spec(lit: &str) -> ToeplitzSpec {
    lit.parse().expect("embedded literal is valid")
}

fn fmt_classes(classes: &[Vec<usize>]) -> String {
    classes
        .iter()
        .map(|c| {
            let v: Vec<String> = c.iter().map(usize::to_string).collect();
            format!("{{{}}}", v.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn t5_power(m: u64) -> String {
    spec("T5<2;4>").build_matrix().power(m).to_text()
}

const CHECKS: &[(&str, &str, Check)] = &[
    ("t5-power-2", T5_A3K_MINUS_1, || t5_power(2)),
    ("t5-power-3", T5_A3K, || t5_power(3)),
    ("t5-power-4", T5_A3K_PLUS_1, || t5_power(4)),
    ("t5-power-5", T5_A3K_MINUS_1, || t5_power(5)),
    ("t5-power-6", T5_A3K, || t5_power(6)),
    ("t5-power-7", T5_A3K_PLUS_1, || t5_power(7)),
    ("t5-period", "3", || {
        spectra::matrix_period(&spec("T5<2;4>").build_matrix())
            .map_or_else(|e| e.to_string(), |p| p.to_string())
    }),
    (
        "t5-non-toeplitz-2..7",
        "false false false false false false",
        || {
            let a = spec("T5<2;4>").build_matrix();
            (2..=7)
                .map(|m| a.power(m).is_toeplitz().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        },
    ),
    ("t8-matrix", T8_MATRIX, || {
        spec("T8<1,4;2,5>").build_matrix().to_text()
    }),
    ("t8-gcd", "d=3 d'=1", || {
        let sp = spec("T8<1,4;2,5>");
        format!("d={} d'={}", sp.gcd_sum(), sp.d_prime())
    }),
    (
        "t8-sets-3",
        "P={-6,-3,0,3,6} Q={-6,-3,0,3,6} R={-6,-3,0,3,6}",
        || {
            let s = walks::step_sets(&spec("T8<1,4;2,5>"), 3);
            format!(
                "P={} Q={} R={}",
                format_offsets(&s.p),
                format_offsets(&s.q),
                format_offsets(&s.r)
            )
        },
    ),
    ("t8-sets-1", "P={-5,-2,1,4,7} R={-5,-2,1,4}", || {
        let s = walks::step_sets(&spec("T8<1,4;2,5>"), 1);
        format!("P={} R={}", format_offsets(&s.p), format_offsets(&s.r))
    }),
    (
        "t8-offset-walk",
        "a=[1,0] b=[2,0] length=3 offset=-3",
        || {
            let sp = spec("T8<1,4;2,5>");
            let walk = Walk::from_vertices(&sp, &[4, 5, 3, 1]);
            match walk.and_then(|w| walks::walk_offset_decomposition(&sp, &w)) {
                Ok(w) => format!(
                    "a={:?} b={:?} length={} offset={}",
                    w.a, w.b, w.length, w.offset
                )
                .replace(", ", ","),
                Err(e) => e.to_string(),
            }
        },
    ),
    ("t8-narrative-walk", "valid s2-arcs=2", || {
        // 7 -> 5 -> 3 -> 1 -> 5 -> 3 -> 1 -> 5, two arcs of step 4.
        let sp = spec("T8<1,4;2,5>");
        let walk = Walk::from_vertices(&sp, &[7, 5, 3, 1, 5, 3, 1, 5]);
        match walk.and_then(|w| walks::walk_offset_decomposition(&sp, &w)) {
            Ok(w) => format!("valid s2-arcs={}", w.a[1]),
            Err(e) => e.to_string(),
        }
    }),
    ("t8-periods", "matrix=3 competition=1", || {
        let a = spec("T8<1,4;2,5>").build_matrix();
        match (spectra::matrix_period(&a), spectra::competition_tail(&a)) {
            (Ok(p), Ok(c)) => format!("matrix={p} competition={}", c.period),
            (Err(e), _) | (_, Err(e)) => e.to_string(),
        }
    }),
    (
        "t8-limit-cliques",
        "{1,4,7} {2,5,8} {3,6}",
        || match compgraph::limit_graph(&spec("T8<1,4;2,5>").build_matrix()) {
            Ok((g, _)) if g.is_clique_union() => fmt_classes(&g.components()),
            Ok(_) => "not a clique union".into(),
            Err(e) => e.to_string(),
        },
    ),
    ("t8-bound", "30", || {
        walks::competition_index_bound(&spec("T8<1,4;2,5>")).to_string()
    }),
    ("t6-strong-components", "{1,3,5} {2,4,6}", || {
        fmt_classes(&strong_components(&spec("T6<2,4;4,5>").build_matrix()))
    }),
    ("t6-arcs", "1-3 1-5 2-4 2-6 3-5 4-6 5-1 6-1 6-2", || {
        let a = spec("T6<2,4;4,5>").build_matrix();
        let mut arcs = Vec::new();
        for u in 1..=6 {
            for v in a.row_support(u) {
                arcs.push(format!("{u}-{v}"));
            }
        }
        arcs.join(" ")
    }),
    (
        "t6-no-t5-arc-from-1",
        "reachable={1,3,5} t5-arcs-out=0 builder=conditions unmet",
        || {
            let sp = spec("T6<2,4;4,5>");
            let a = sp.build_matrix();
            let mut seen = [false; 7];
            let mut stack = vec![1usize];
            seen[1] = true;
            while let Some(u) = stack.pop() {
                for v in a.row_support(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            let reach: Vec<usize> = (1..=6).filter(|&v| seen[v]).collect();
            let t5_out = reach.iter().filter(|&&u| u > 5).count();
            let builder = match walks::build_walk_with_counts(&sp, 1, &[0], &[1]) {
                Err(Error::ConditionsUnmet) => "conditions unmet".to_string(),
                Err(e) => e.to_string(),
                Ok(w) if w.count(ArcKind::T, 2) > 0 => "built".into(),
                Ok(_) => "built without t5".into(),
            };
            format!(
                "reachable={} t5-arcs-out={t5_out} builder={builder}",
                fmt_classes(&[reach]).trim()
            )
        },
    ),
];

/// Runs every embedded check in a fixed order.
pub fn run_all() -> Vec<GoldenResult> {
    CHECKS
        .iter()
        .map(|&(name, expected, check)| GoldenResult {
            name,
            expected: expected.to_string(),
            actual: check(),
        })
        .collect()
}
