//! Graphical multiple testing: nodes carry local significance levels and a
//! transition matrix redistributes the level of every rejected node.
//!
//! The update is generic over any valid `(G, alpha)`. Both weighted Holm
//! variants start from [`initial_graph`] and differ only in which active node
//! is examined next: the smallest weighted p-value (WHP) or the smallest raw
//! p-value (WAP).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::problem::{weighted_pvalues, OrderKey, RejectionSet, TestingProblem};

/// Rows whose sum is this close to 1 are treated as exactly stochastic.
const STOCHASTIC_TOL: f64 = 1e-12;

/// Local levels and transition coefficients over the active hypotheses.
///
/// Entries for inactive hypotheses are kept at zero and never read.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionGraph {
    active: Vec<bool>,
    local_alpha: Vec<f64>,
    g: Vec<Vec<f64>>,
}

impl TransitionGraph {
    /// Builds a graph with every node active.
    ///
    /// Requires `0 <= g_ij <= 1`, `g_ii = 0`, row sums at most 1, nonnegative
    /// local levels summing to less than 1.
    pub fn new(local_alpha: Vec<f64>, g: Vec<Vec<f64>>) -> Result<Self> {
        let m = local_alpha.len();
        if m == 0 {
            return Err(Error::InvalidGraph("no nodes".into()));
        }
        if g.len() != m || g.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidGraph(format!("transition matrix must be {m}x{m}")));
        }
        if local_alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidGraph("local levels must be nonnegative".into()));
        }
        if local_alpha.iter().sum::<f64>() >= 1.0 {
            return Err(Error::InvalidGraph("local levels must sum to less than 1".into()));
        }
        for (i, row) in g.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(Error::InvalidGraph(format!("g[{i}][{i}] must be 0")));
            }
            if row.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::InvalidGraph(format!("row {i} has a coefficient outside [0, 1]")));
            }
            // rows built from exact fractions may round slightly above 1
            if row.iter().sum::<f64>() > 1.0 + 1e-12 {
                return Err(Error::InvalidGraph(format!("row {i} sums to more than 1")));
            }
        }
        Ok(Self {
            active: vec![true; m],
            local_alpha,
            g,
        })
    }

    /// Number of nodes, active or not.
    pub fn m(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active.get(i).copied().unwrap_or(false)
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.m()).filter(|&i| self.active[i])
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn local_alpha(&self, i: usize) -> Option<f64> {
        self.is_active(i).then(|| self.local_alpha[i])
    }

    /// `g_ij` for distinct active `i`, `j`.
    pub fn transition(&self, i: usize, j: usize) -> Option<f64> {
        (i != j && self.is_active(i) && self.is_active(j)).then(|| self.g[i][j])
    }

    /// Sum of local levels over active nodes.
    pub fn total_alpha(&self) -> f64 {
        self.active().map(|i| self.local_alpha[i]).sum()
    }

    /// Row sum of `g` over active targets.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.active().filter(|&k| k != i).map(|k| self.g[i][k]).sum()
    }

    /// `1 - g_lj`. When row `l` sums to 1 this is the row's mass outside
    /// `j`, summed directly so that `g_lj` close to 1 does not cancel.
    fn complement(&self, l: usize, j: usize) -> f64 {
        let rest: f64 = self
            .active()
            .filter(|&k| k != l && k != j)
            .map(|k| self.g[l][k])
            .sum();
        if (rest + self.g[l][j] - 1.0).abs() <= STOCHASTIC_TOL {
            rest
        } else {
            1.0 - self.g[l][j]
        }
    }

    /// Rejects node `j` and returns the updated graph; `self` is unchanged.
    ///
    /// `alpha_l += alpha_j g_jl` and
    /// `g_lk = (g_lk + g_lj g_jk) / (1 - g_lj g_jl)` over the remaining nodes,
    /// with the denominator evaluated as `(1 - g_lj) + g_lj (1 - g_jl)`.
    pub fn reject_and_update(&self, j: usize) -> Result<TransitionGraph> {
        if !self.is_active(j) {
            return Err(Error::InactiveNode(j));
        }
        let m = self.m();
        let mut next = self.clone();
        next.active[j] = false;
        next.local_alpha[j] = 0.0;
        let remaining: Vec<usize> = next.active().collect();

        for &l in &remaining {
            next.local_alpha[l] = self.local_alpha[l] + self.local_alpha[j] * self.g[j][l];
        }
        for &l in &remaining {
            let denom = self.complement(l, j) + self.g[l][j] * self.complement(j, l);
            for &k in &remaining {
                if k == l {
                    continue;
                }
                if denom == 0.0 {
                    return Err(Error::DegenerateTransition { l, j });
                }
                next.g[l][k] = (self.g[l][k] + self.g[l][j] * self.g[j][k]) / denom;
            }
        }
        for row in 0..m {
            next.g[row][j] = 0.0;
            next.g[j][row] = 0.0;
        }
        Ok(next)
    }
}

/// The weight-proportional graph: `alpha_i = w_i alpha / sum w` and
/// `g_ij = w_j / sum_{k != i} w_k`.
pub fn initial_graph(w: &[f64], alpha: f64) -> TransitionGraph {
    let m = w.len();
    let total: f64 = w.iter().sum();
    let local_alpha = w.iter().map(|wi| wi * alpha / total).collect();
    let g = (0..m)
        .map(|i| {
            let others: f64 = (0..m).filter(|&k| k != i).map(|k| w[k]).sum();
            (0..m)
                .map(|j| if i == j { 0.0 } else { w[j] / others })
                .collect()
        })
        .collect();
    TransitionGraph {
        active: vec![true; m],
        local_alpha,
        g,
    }
}

/// One rejection with the graph before and after the update.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStep {
    pub rejected: usize,
    pub before: TransitionGraph,
    pub after: TransitionGraph,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GraphTrace {
    steps: Vec<GraphStep>,
}

impl GraphTrace {
    pub fn steps(&self) -> &[GraphStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Runs the graphical procedure from [`initial_graph`].
///
/// `OrderKey::Weighted` examines the active node with the smallest weighted
/// p-value (WHP), `OrderKey::Raw` the smallest raw p-value (WAP). Ties go to
/// the smaller index.
///
/// Fails only when the weights are so lopsided that a transition product
/// rounds to exactly 1.
pub fn run_graphical(
    problem: &TestingProblem,
    ordering: OrderKey,
) -> Result<(RejectionSet, GraphTrace)> {
    let graph = initial_graph(problem.weights(), problem.alpha());
    run_graphical_from(problem, graph, ordering)
}

/// Runs the graphical procedure from an arbitrary starting graph.
pub fn run_graphical_from(
    problem: &TestingProblem,
    mut graph: TransitionGraph,
    ordering: OrderKey,
) -> Result<(RejectionSet, GraphTrace)> {
    if graph.m() != problem.m() {
        return Err(Error::InvalidGraph(format!(
            "graph has {} nodes for {} hypotheses",
            graph.m(),
            problem.m()
        )));
    }
    let p = problem.p_values();
    let keys = match ordering {
        OrderKey::Raw => p.to_vec(),
        OrderKey::Weighted => weighted_pvalues(problem).into_vec(),
    };

    let mut rejections = RejectionSet::new();
    let mut trace = GraphTrace::default();
    while let Some(j) = graph
        .active()
        .reduce(|best, i| if keys[i] < keys[best] { i } else { best })
    {
        let level = graph.local_alpha[j];
        if p[j] > level {
            break;
        }
        let next = graph.reject_and_update(j)?;
        rejections.push(j, Some(level));
        trace.steps.push(GraphStep {
            rejected: j,
            before: graph,
            after: next.clone(),
        });
        graph = next;
    }
    Ok((rejections, trace))
}

/// Renders a coefficient as a reduced fraction when one with denominator at
/// most 10^6 reproduces it, otherwise as a 6-decimal float.
pub fn format_coefficient(x: f64) -> String {
    const MAX_DEN: i64 = 1_000_000;
    let tol = 1e-12 * x.abs().max(1.0);
    if x.fract() == 0.0 {
        return format!("{}", x as i64);
    }
    // continued fraction convergents
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > MAX_DEN as f64 * 1e3 {
            break;
        }
        let a = a as i64;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > MAX_DEN {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= tol {
            return if k1 == 1 {
                format!("{h1}")
            } else {
                format!("{h1}/{k1}")
            };
        }
        let frac = rest - a as f64;
        if frac == 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    format!("{x:.6}")
}

fn write_stage(
    out: &mut String,
    stage: usize,
    graph: &TransitionGraph,
    labels: &[String],
    rejected: &[usize],
) {
    let _ = writeln!(out, "digraph stage_{stage} {{");
    for i in 0..graph.m() {
        if let Some(a) = graph.local_alpha(i) {
            let _ = writeln!(out, "  n{i} [label=\"{}\\n{a:.4}\"];", labels[i]);
        } else if rejected.contains(&i) {
            let _ = writeln!(
                out,
                "  n{i} [label=\"{}\", rejected=true, style=filled, fillcolor=yellow];",
                labels[i]
            );
        }
    }
    for i in graph.active() {
        for j in graph.active() {
            if let Some(c) = graph.transition(i, j) {
                if c > 0.0 {
                    let _ = writeln!(out, "  n{i} -> n{j} [label=\"{}\"];", format_coefficient(c));
                }
            }
        }
    }
    out.push_str("}\n");
}

/// One DOT digraph per stage: the initial graph, then the graph after each
/// rejection in `trace`.
pub fn export_dot_stages(
    trace: &GraphTrace,
    initial: &TransitionGraph,
    labels: &[String],
) -> Vec<String> {
    let mut stages = Vec::with_capacity(trace.len() + 1);
    let mut rejected = Vec::new();
    let mut out = String::new();
    write_stage(&mut out, 0, initial, labels, &rejected);
    stages.push(out);
    for (k, step) in trace.steps().iter().enumerate() {
        rejected.push(step.rejected);
        let mut out = String::new();
        write_stage(&mut out, k + 1, &step.after, labels, &rejected);
        stages.push(out);
    }
    stages
}

/// All stages of [`export_dot_stages`] concatenated.
pub fn export_dot(trace: &GraphTrace, initial: &TransitionGraph, labels: &[String]) -> String {
    export_dot_stages(trace, initial, labels).concat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::default_labels;

    fn reordering() -> TestingProblem {
        TestingProblem::unlabeled(vec![0.01, 0.014, 0.3], vec![1.0, 2.0, 3.0], 0.05).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15
    }

    #[test]
    fn near_one_coefficients_do_not_cancel() {
        // g_20 g_02 is about 0.985 here; 1 - g_20 g_02 computed directly is off by ~30 ulps
        let g = initial_graph(&[13.469559265137493, 0.1, 12.775956064951224], 0.05);
        let g = g.reject_and_update(0).unwrap();
        assert!((g.transition(2, 1).unwrap() - 1.0).abs() <= 2.0 * f64::EPSILON);
        assert!((g.transition(1, 2).unwrap() - 1.0).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn initial_graph_one_two_three() {
        let g = initial_graph(&[1.0, 2.0, 3.0], 0.05);
        assert!(close(g.local_alpha(0).unwrap(), 0.05 / 6.0));
        assert!(close(g.local_alpha(1).unwrap(), 0.05 / 3.0));
        assert!(close(g.local_alpha(2).unwrap(), 0.025));
        let want = [[0.0, 0.4, 0.6], [0.25, 0.0, 0.75], [1.0 / 3.0, 2.0 / 3.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(close(g.transition(i, j).unwrap(), want[i][j]));
                }
            }
            assert!(g.transition(i, i).is_none());
            assert!(close(g.row_sum(i), 1.0));
        }
        assert!(close(g.total_alpha(), 0.05));
    }

    #[test]
    fn initial_graph_trivial_cases() {
        let g = initial_graph(&[2.0, 2.0, 2.0], 0.06);
        for i in 0..3 {
            assert!(close(g.local_alpha(i).unwrap(), 0.02));
            for j in 0..3 {
                if i != j {
                    assert_eq!(g.transition(i, j), Some(0.5));
                }
            }
        }
        let single = initial_graph(&[4.0], 0.05);
        assert_eq!(single.local_alpha(0), Some(0.05));
        assert_eq!(single.row_sum(0), 0.0);
    }

    #[test]
    fn update_after_rejecting_h2() {
        let g = initial_graph(&[1.0, 2.0, 3.0], 0.05);
        let next = g.reject_and_update(1).unwrap();
        assert!(close(next.local_alpha(0).unwrap(), 0.0125));
        assert!(close(next.local_alpha(2).unwrap(), 0.0375));
        assert!(next.local_alpha(1).is_none());
        assert!(close(next.transition(0, 2).unwrap(), 1.0));
        assert!(close(next.transition(2, 0).unwrap(), 1.0));
        // the original is untouched
        assert!(g.is_active(1));
    }

    #[test]
    fn update_trivial_cases() {
        let g = initial_graph(&[1.0, 1.0, 1.0], 0.05);
        let next = g.reject_and_update(0).unwrap();
        assert!(close(next.local_alpha(1).unwrap(), 0.025));
        assert!(close(next.local_alpha(2).unwrap(), 0.025));
        assert_eq!(next.transition(1, 2), Some(1.0));
        assert_eq!(next.transition(2, 1), Some(1.0));

        let two = initial_graph(&[1.0, 3.0], 0.05);
        let next = two.reject_and_update(1).unwrap();
        assert!(close(next.local_alpha(0).unwrap(), 0.05));
        let empty = next.reject_and_update(0).unwrap();
        assert_eq!(empty.active_count(), 0);
    }

    #[test]
    fn update_rejects_inactive_node() {
        let g = initial_graph(&[1.0, 2.0, 3.0], 0.05);
        let next = g.reject_and_update(1).unwrap();
        assert_eq!(next.reject_and_update(1), Err(Error::InactiveNode(1)));
        assert_eq!(g.reject_and_update(7), Err(Error::InactiveNode(7)));
    }

    #[test]
    fn degenerate_transition_is_reported() {
        // nodes 0 and 1 pass everything to each other, node 2 remains
        let g = TransitionGraph::new(
            vec![0.01, 0.01, 0.01],
            vec![
                vec![0.0, 1.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.5, 0.5, 0.0],
            ],
        )
        .unwrap();
        assert_eq!(
            g.reject_and_update(1),
            Err(Error::DegenerateTransition { l: 0, j: 1 })
        );
    }

    #[test]
    fn graph_validation() {
        assert!(TransitionGraph::new(vec![], vec![]).is_err());
        assert!(TransitionGraph::new(vec![0.1, 0.1], vec![vec![0.0, 1.0]]).is_err());
        assert!(TransitionGraph::new(vec![0.1, 0.1], vec![vec![0.5, 0.5], vec![1.0, 0.0]]).is_err());
        assert!(TransitionGraph::new(vec![0.6, 0.6], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(TransitionGraph::new(vec![-0.1, 0.1], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn run_on_reordering_example() {
        let (whp, trace) = run_graphical(&reordering(), OrderKey::Weighted).unwrap();
        assert_eq!(whp.rejected().iter().copied().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.steps()[0].rejected, 1);
        assert_eq!(trace.steps()[1].rejected, 0);

        let (wap, trace) = run_graphical(&reordering(), OrderKey::Raw).unwrap();
        assert!(wap.is_empty());
        assert!(trace.is_empty());
    }

    #[test]
    fn run_with_no_signal() {
        let p = TestingProblem::unlabeled(vec![1.0; 4], vec![1.0, 2.0, 3.0, 4.0], 0.05).unwrap();
        assert!(run_graphical(&p, OrderKey::Weighted).unwrap().0.is_empty());
        assert!(run_graphical(&p, OrderKey::Raw).unwrap().0.is_empty());
    }

    #[test]
    fn coefficient_formatting() {
        assert_eq!(format_coefficient(0.4), "2/5");
        assert_eq!(format_coefficient(2.0 / 3.0), "2/3");
        assert_eq!(format_coefficient(1.0), "1");
        assert_eq!(format_coefficient(0.75), "3/4");
        assert_eq!(format_coefficient(1.0 / 999_983.0), "1/999983");
        // best Pell convergent under the cap still misses by ~1.6e-12
        assert_eq!(format_coefficient(std::f64::consts::SQRT_2 - 1.0), "0.414214");
    }

    #[test]
    fn dot_export() {
        let problem = reordering();
        let initial = initial_graph(problem.weights(), problem.alpha());
        let labels = default_labels(3);

        let only_initial = export_dot_stages(&GraphTrace::default(), &initial, &labels);
        assert_eq!(only_initial.len(), 1);
        assert!(only_initial[0].contains("n0 -> n1 [label=\"2/5\"]"));
        assert!(only_initial[0].contains("H1\\n0.0083"));
        assert!(only_initial[0].contains("H2\\n0.0167"));

        let (_, trace) = run_graphical(&problem, OrderKey::Weighted).unwrap();
        let stages = export_dot_stages(&trace, &initial, &labels);
        assert_eq!(stages.len(), 3);
        assert!(stages[1].contains("n1 [label=\"H2\", rejected=true"));
        assert!(stages[1].contains("n0 -> n2 [label=\"1\"]"));
        assert!(stages[2].contains("n0 [label=\"H1\", rejected=true"));
        assert!(stages[2].contains("H3\\n0.0500"));
        let joined = export_dot(&trace, &initial, &labels);
        assert_eq!(joined.matches("digraph").count(), 3);
    }
}
