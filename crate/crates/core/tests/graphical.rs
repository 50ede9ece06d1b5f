use proptest::prelude::*;

use weighted_holm::corpus::mixed_corpus;
use weighted_holm::graphical::{initial_graph, run_graphical, TransitionGraph};
use weighted_holm::{wap_stepdown, whp_stepdown, OrderKey};

/// `|a - b|` in units of the last place of the larger magnitude.
fn ulps(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        return 0.0;
    }
    (a - b).abs() / (scale * f64::EPSILON)
}

fn check_closed_form(graph: &TransitionGraph, w: &[f64], alpha: f64) -> Result<(), TestCaseError> {
    let active: Vec<usize> = graph.active().collect();
    let total: f64 = active.iter().map(|&i| w[i]).sum();
    for &l in &active {
        let want = w[l] * alpha / total;
        let got = graph.local_alpha(l).unwrap();
        prop_assert!(ulps(got, want) <= 8.0, "alpha_{} = {} vs {}", l, got, want);
        let others: f64 = active.iter().filter(|&&k| k != l).map(|&k| w[k]).sum();
        for &k in active.iter().filter(|&&k| k != l) {
            let want = w[k] / others;
            let got = graph.transition(l, k).unwrap();
            prop_assert!(ulps(got, want) <= 8.0, "g_{}{} = {} vs {}", l, k, got, want);
        }
    }
    // conservation and row sums
    prop_assert!((graph.total_alpha() - alpha).abs() <= 1e-14 * alpha);
    if active.len() >= 2 {
        for &l in &active {
            prop_assert!((graph.row_sum(l) - 1.0).abs() <= 1e-14, "row {} sums to {}", l, graph.row_sum(l));
        }
    }
    Ok(())
}

fn weights_and_order() -> impl Strategy<Value = (Vec<f64>, Vec<usize>)> {
    (2usize..=10).prop_flat_map(|m| {
        (
            prop::collection::vec(0.1f64..20.0, m),
            Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn updates_match_closed_form((w, order) in weights_and_order(), alpha in 0.001f64..0.5) {
        let mut graph = initial_graph(&w, alpha);
        check_closed_form(&graph, &w, alpha)?;
        // reject every node but the last
        for &j in &order[..order.len() - 1] {
            let next = graph.reject_and_update(j).unwrap();
            // snapshots are never mutated
            prop_assert!(graph.is_active(j));
            graph = next;
            prop_assert!(!graph.is_active(j));
            check_closed_form(&graph, &w, alpha)?;
        }
        let last = order[order.len() - 1];
        prop_assert!(ulps(graph.local_alpha(last).unwrap(), alpha) <= 8.0);
    }
}

#[test]
fn graphical_matches_stepdown_up_to_ten_hypotheses() {
    for p in mixed_corpus(41, 10_000, 10) {
        let (weighted, wt) = run_graphical(&p, OrderKey::Weighted).unwrap();
        assert!(weighted.same_rejections(&whp_stepdown(&p)), "{p:?}");
        let (raw, rt) = run_graphical(&p, OrderKey::Raw).unwrap();
        assert!(raw.same_rejections(&wap_stepdown(&p)), "{p:?}");
        assert_eq!(wt.len(), weighted.len());
        assert_eq!(rt.len(), raw.len());
    }
}

#[test]
fn rejecting_inactive_node_is_an_error() {
    let g = initial_graph(&[1.0, 2.0, 3.0], 0.05);
    let g = g.reject_and_update(1).unwrap();
    assert!(g.reject_and_update(1).is_err());
    assert!(g.reject_and_update(7).is_err());
}
