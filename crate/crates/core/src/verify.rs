//! Exhaustive checker: every instance up to a size, every predicate.
//!
//! Each predicate resolves to [`Outcome::Holds`], [`Outcome::Fails`] or
//! [`Outcome::NotApplicable`] (hypothesis unmet). Instances that exhaust the
//! multiplication budget are marked incomplete and their tail-dependent
//! predicates report [`Outcome::Incomplete`] instead of a verdict.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::compgraph::{self, SimpleGraph};
use crate::spectra::{self, residue_block_matrix, residue_classes, PowerSequence};
use crate::walks::{self, Stabilization};
use crate::{Execution, ToeplitzSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    NotApplicable,
    Incomplete,
}

impl Outcome {
    fn check(applicable: bool, holds: impl FnOnce() -> bool) -> Outcome {
        if !applicable {
            Outcome::NotApplicable
        } else if holds() {
            Outcome::Holds
        } else {
            Outcome::Fails
        }
    }
}

/// Predicate names in report order.
pub const PREDICATES: [&str; 12] = [
    "gcd_equality",
    "period_match",
    "competition_period_is_1",
    "limit_block_match",
    "limit_clique_match",
    "eventually_toeplitz",
    "pqr_stabilized",
    "adjacency_necessity",
    "bound_holds",
    "p_recurrence",
    "containment_chain",
    "formula_equivalence",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Predicates {
    pub gcd_equality: Outcome,
    pub period_match: Outcome,
    pub competition_period_is_1: Outcome,
    pub limit_block_match: Outcome,
    pub limit_clique_match: Outcome,
    pub eventually_toeplitz: Outcome,
    pub pqr_stabilized: Outcome,
    pub adjacency_necessity: Outcome,
    pub bound_holds: Outcome,
    pub p_recurrence: Outcome,
    pub containment_chain: Outcome,
    pub formula_equivalence: Outcome,
}

impl Predicates {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Outcome)> {
        [
            self.gcd_equality,
            self.period_match,
            self.competition_period_is_1,
            self.limit_block_match,
            self.limit_clique_match,
            self.eventually_toeplitz,
            self.pqr_stabilized,
            self.adjacency_necessity,
            self.bound_holds,
            self.p_recurrence,
            self.containment_chain,
            self.formula_equivalence,
        ]
        .into_iter()
        .enumerate()
        .map(|(k, o)| (PREDICATES[k], o))
    }

    pub fn get(&self, name: &str) -> Option<Outcome> {
        self.iter().find(|(n, _)| *n == name).map(|(_, o)| o)
    }
}

/// Measured tails; absent when the budget ran out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Measured {
    pub matrix_index: usize,
    pub matrix_period: usize,
    pub competition_index: usize,
    pub competition_period: usize,
    /// Least `m` after which every power is Toeplitz.
    pub toeplitz_from: Option<usize>,
    pub stabilization: Stabilization,
    /// Least `m` from which `C^m(D)` is constant, when the limit exists.
    pub graph_stabilization: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    /// Position in the enumeration order.
    pub ordinal: usize,
    pub spec: ToeplitzSpec,
    pub literal: String,
    pub d: u64,
    pub d_prime: u64,
    pub cond1: bool,
    pub cond2: bool,
    pub predicted_period: u64,
    pub measured: Option<Measured>,
    pub bound: u64,
    pub bound_hypothesis: bool,
    pub bound_hypothesis_strict: bool,
    pub predicates: Predicates,
    pub incomplete: bool,
}

impl InstanceReport {
    pub fn violations(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.predicates
            .iter()
            .filter(|(_, o)| *o == Outcome::Fails)
            .map(|(n, _)| n)
    }
}

/// Tunables for [`verify_instance_with`] and the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Cap on products spent finding the power cycle.
    pub budget: usize,
    pub execution: Execution,
    /// Worker count for parallel sweeps; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: spectra::DEFAULT_BUDGET,
            execution: Execution::Parallel,
            jobs: None,
        }
    }
}

/// All `(n, S, T)` with `2 <= n <= n_max`, ordered by `n`, then the `S`
/// bitmask, then the `T` bitmask.
pub fn enumerate_specs(
    n_max: usize,
    require_conditions: bool,
) -> impl Iterator<Item = ToeplitzSpec> {
    assert!(n_max < 64, "bitmask enumeration limited to n < 64");
    (2..=n_max)
        .flat_map(|n| {
            let full = 1u64 << (n - 1);
            (1..full).flat_map(move |sm| {
                (1..full).map(move |tm| ToeplitzSpec::from_masks(n, sm, tm).expect("valid masks"))
            })
        })
        .filter(move |sp| !require_conditions || sp.conditions_hold())
}

pub fn verify_instance(spec: &ToeplitzSpec) -> InstanceReport {
    verify_instance_with(spec, 0, &VerifyOptions::default())
}

pub fn verify_instance_with(
    spec: &ToeplitzSpec,
    ordinal: usize,
    opts: &VerifyOptions,
) -> InstanceReport {
    let conds = spec.conditions_hold();
    let inv = spec.gcd_invariants();
    let d = inv.d as usize;
    let n = spec.n();
    let a = spec.build_matrix();
    let readings = walks::bound_hypothesis_readings(spec);
    let bound = walks::competition_index_bound(spec);

    let gcd_equality = Outcome::check(true, || inv.gcd_u == inv.d);
    let formula_equivalence = Outcome::check(true, || {
        compgraph::competition_graph_formula(spec) == SimpleGraph::from_symmetric(&a.gram())
    });
    let p_recurrence = Outcome::check(conds, || {
        let k = spec.predicted_period() as usize;
        (2..=2 * k + 2).all(|i| walks::p_recurrence_check(spec, i))
            && (1..=k + 1)
                .all(|i| walks::p_periodic_check(spec, i) && walks::p_disjoint_check(spec, i))
    });

    let seq = match spectra::power_sequence(&a, opts.budget) {
        Ok(seq) => seq,
        Err(_) => {
            let pending = |applicable: bool| {
                if applicable {
                    Outcome::Incomplete
                } else {
                    Outcome::NotApplicable
                }
            };
            return InstanceReport {
                ordinal,
                spec: spec.clone(),
                literal: spec.to_string(),
                d: inv.d,
                d_prime: inv.d_prime,
                cond1: spec.cond1(),
                cond2: spec.cond2(),
                predicted_period: spec.predicted_period(),
                measured: None,
                bound,
                bound_hypothesis: readings.vacuous,
                bound_hypothesis_strict: readings.strict,
                predicates: Predicates {
                    gcd_equality,
                    period_match: pending(conds),
                    competition_period_is_1: pending(conds),
                    limit_block_match: pending(conds),
                    limit_clique_match: pending(conds),
                    eventually_toeplitz: pending(conds),
                    pqr_stabilized: pending(conds),
                    adjacency_necessity: Outcome::Incomplete,
                    bound_holds: pending(conds && readings.vacuous),
                    p_recurrence,
                    containment_chain: Outcome::Incomplete,
                    formula_equivalence,
                },
                incomplete: true,
            };
        }
    };

    let comp = spectra::competition_tail_from(&seq);
    let toeplitz_from = spectra::power_is_eventually_toeplitz(&a, &seq.tail);
    let (qa, pa) = (seq.tail.index, seq.tail.period);
    let pqr_horizon = qa + 2 * pa * spec.predicted_period() as usize;
    let sets = walks::scan_step_sets(spec, &seq, pqr_horizon);
    let stabilization = walks::stabilization_from(spec, &seq, &sets);
    let limit_graph = compgraph::limit_graph_from(&seq).ok();

    let classes: Vec<Vec<usize>> = residue_classes(n, d)
        .into_iter()
        .filter(|c| !c.is_empty())
        .collect();

    let period_match = Outcome::check(conds, || pa as u64 == spec.predicted_period());
    let competition_period_is_1 = Outcome::check(conds, || comp.period == 1);
    let limit_block_match = Outcome::check(conds, || {
        comp.period == 1
            && residue_block_matrix(n, d).is_ok_and(|blocks| {
                let limit = &comp.cycle[0];
                *limit == blocks.expected
                    && limit.permute(&blocks.order).ok()
                        == spectra::block_diagonal_ones(&blocks.block_sizes).ok()
            })
    });
    let limit_clique_match = Outcome::check(conds, || {
        limit_graph
            .as_ref()
            .is_some_and(|(g, _)| g.is_clique_union() && g.components() == classes)
    });
    let eventually_toeplitz = Outcome::check(conds, || toeplitz_from.is_some());
    let pqr_stabilized = Outcome::check(conds, || {
        matches!(stabilization, Stabilization::Certified { .. })
    });
    let adjacency_necessity = Outcome::check(true, || adjacency_within_classes(&seq, d, qa + pa));
    let bound_holds = Outcome::check(conds && readings.vacuous, || comp.index as u64 <= bound);
    let containment_chain = Outcome::check(true, || sets.iter().all(|s| s.chain_holds()));

    InstanceReport {
        ordinal,
        spec: spec.clone(),
        literal: spec.to_string(),
        d: inv.d,
        d_prime: inv.d_prime,
        cond1: spec.cond1(),
        cond2: spec.cond2(),
        predicted_period: spec.predicted_period(),
        measured: Some(Measured {
            matrix_index: qa,
            matrix_period: pa,
            competition_index: comp.index,
            competition_period: comp.period,
            toeplitz_from,
            stabilization,
            graph_stabilization: limit_graph.map(|(_, m)| m),
        }),
        bound,
        bound_hypothesis: readings.vacuous,
        bound_hypothesis_strict: readings.strict,
        predicates: Predicates {
            gcd_equality,
            period_match,
            competition_period_is_1,
            limit_block_match,
            limit_clique_match,
            eventually_toeplitz,
            pqr_stabilized,
            adjacency_necessity,
            bound_holds,
            p_recurrence,
            containment_chain,
            formula_equivalence,
        },
        incomplete: false,
    }
}

/// `C^m(D)` edges join congruent vertices for all `m <= horizon`; beyond the
/// power tail the graphs repeat, so `index + period` covers every `m`.
fn adjacency_within_classes(seq: &PowerSequence, d: usize, horizon: usize) -> bool {
    (1..=horizon).all(|m| {
        SimpleGraph::from_symmetric(&seq.power(m).gram())
            .edges()
            .iter()
            .all(|&(u, v)| (v - u) % d == 0)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub ordinal: usize,
    pub literal: String,
    pub predicate: &'static str,
}

/// Per-predicate outcome counts plus the violation list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub instances: usize,
    pub incomplete: usize,
    pub counts: BTreeMap<&'static str, BTreeMap<Outcome, usize>>,
    pub violations: Vec<Violation>,
    /// Instances where the two 1x1 irreducibility readings disagree.
    pub hypothesis_reading_splits: usize,
}

impl SweepSummary {
    pub fn add(&mut self, report: &InstanceReport) {
        self.instances += 1;
        self.incomplete += report.incomplete as usize;
        self.hypothesis_reading_splits +=
            (report.bound_hypothesis != report.bound_hypothesis_strict) as usize;
        for (name, outcome) in report.predicates.iter() {
            *self
                .counts
                .entry(name)
                .or_default()
                .entry(outcome)
                .or_default() += 1;
            if outcome == Outcome::Fails {
                self.violations.push(Violation {
                    ordinal: report.ordinal,
                    literal: report.literal.clone(),
                    predicate: name,
                });
            }
        }
    }

    /// Commutative merge; violations are kept sorted by ordinal.
    pub fn merge(mut self, other: SweepSummary) -> SweepSummary {
        self.instances += other.instances;
        self.incomplete += other.incomplete;
        self.hypothesis_reading_splits += other.hypothesis_reading_splits;
        for (name, by_outcome) in other.counts {
            let slot = self.counts.entry(name).or_default();
            for (o, c) in by_outcome {
                *slot.entry(o).or_default() += c;
            }
        }
        self.violations.extend(other.violations);
        self.violations
            .sort_by(|a, b| (a.ordinal, a.predicate).cmp(&(b.ordinal, b.predicate)));
        self
    }

    pub fn count(&self, predicate: &str, outcome: Outcome) -> usize {
        self.counts
            .get(predicate)
            .and_then(|m| m.get(&outcome))
            .copied()
            .unwrap_or(0)
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<26} {:>9} {:>9} {:>9} {:>11}",
            "predicate", "holds", "fails", "n/a", "incomplete"
        );
        for name in PREDICATES {
            let _ = writeln!(
                out,
                "{:<26} {:>9} {:>9} {:>9} {:>11}",
                name,
                self.count(name, Outcome::Holds),
                self.count(name, Outcome::Fails),
                self.count(name, Outcome::NotApplicable),
                self.count(name, Outcome::Incomplete),
            );
        }
        let _ = writeln!(
            out,
            "instances={} incomplete={} violations={}",
            self.instances,
            self.incomplete,
            self.violations.len()
        );
        if self.hypothesis_reading_splits > 0 {
            let _ = writeln!(
                out,
                "irreducibility readings differ on {} instances",
                self.hypothesis_reading_splits
            );
        }
        for v in self.violations.iter().take(50) {
            let _ = writeln!(
                out,
                "VIOLATION #{} {} {}",
                v.ordinal, v.literal, v.predicate
            );
        }
        out
    }
}

fn with_pool<R: Send>(opts: &VerifyOptions, work: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let (true, Some(jobs)) = (opts.execution.is_parallel(), opts.jobs) {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
        {
            return pool.install(work);
        }
    }
    let _ = opts;
    work()
}

/// Aggregate verification over the enumeration.
pub fn sweep(n_max: usize, require_conditions: bool, opts: &VerifyOptions) -> SweepSummary {
    let specs: Vec<ToeplitzSpec> = enumerate_specs(n_max, require_conditions).collect();
    with_pool(opts, || {
        let one = |(k, sp): (usize, &ToeplitzSpec)| {
            let mut s = SweepSummary::default();
            s.add(&verify_instance_with(sp, k, opts));
            s
        };
        if opts.execution.is_parallel() {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                return specs
                    .par_iter()
                    .enumerate()
                    .map(one)
                    .reduce(SweepSummary::default, SweepSummary::merge);
            }
        }
        specs
            .iter()
            .enumerate()
            .map(one)
            .fold(SweepSummary::default(), SweepSummary::merge)
    })
}

/// Every instance report, in enumeration order.
pub fn sweep_reports(
    n_max: usize,
    require_conditions: bool,
    opts: &VerifyOptions,
) -> Vec<InstanceReport> {
    let specs: Vec<ToeplitzSpec> = enumerate_specs(n_max, require_conditions).collect();
    with_pool(opts, || {
        if opts.execution.is_parallel() {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                return specs
                    .par_iter()
                    .enumerate()
                    .map(|(k, sp)| verify_instance_with(sp, k, opts))
                    .collect();
            }
        }
        specs
            .iter()
            .enumerate()
            .map(|(k, sp)| verify_instance_with(sp, k, opts))
            .collect()
    })
}

pub fn summarize(reports: &[InstanceReport]) -> SweepSummary {
    let mut s = SweepSummary::default();
    for r in reports {
        s.add(r);
    }
    s
}
