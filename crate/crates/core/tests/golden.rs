//! Worked examples on the shipped fixtures, checked exactly.

mod common;

use std::collections::BTreeSet;

use common::{agent, by_label};
use roommates::checks::{blocking_pairs, is_2ps_blocking, is_4ps_blocking, pareto_dominates, StabilityKind};
use roommates::dmls::{double_matching, local_search, max_weight_one_two_matching, max_weight_perfect_matching};
use roommates::fixtures::{self, instance};
use roommates::gen::gen_cttcr_2ps_family;
use roommates::oracle::{all_stable, is_pareto_optimal, max_social_welfare, pareto_front};
use roommates::probe::{manipulation_search, verify_manipulation, Misreport, SearchSpace, DEFAULT_BUDGET};
use roommates::sd::serial_dictatorship;
use roommates::swapping::{swapping, PairSelection};
use roommates::ttc::{apply_cycle, build_graph, cttc, cttcr, naive_ttc, select_cycle, ArcRule, CycleSelection, NaiveOutcome};
use roommates::{Assignment, Error, Mechanism, BIG};

const TWO: StabilityKind = StabilityKind::TwoPerson;
const FOUR: StabilityKind = StabilityKind::FourPerson;

fn initial(name: &str) -> Assignment {
    fixtures::get(name).unwrap().initial().unwrap()
}

#[test]
fn big_entry_is_accepted() {
    let inst = instance("table3");
    assert_eq!(inst.agent_value(agent(&inst, "b"), agent(&inst, "c")), BIG);
}

#[test]
fn utilities_and_welfare() {
    let sp = instance("sp_example");
    assert_eq!(sp.utility(&initial("sp_example"), 0), 10);
    let t10 = instance("table10");
    let mu = initial("table10");
    assert_eq!(t10.social_welfare(&mu), 40);
    let better = by_label(&t10, &[("a3", "a4", "r1"), ("a1", "a2", "r2")]);
    assert_eq!(t10.social_welfare(&better), 48);
    assert!(pareto_dominates(&t10, &better, &mu));
    let t11 = instance("table11");
    assert_eq!(t11.utility(&initial("table11"), 0), 5);
    assert!(!t11.is_binary_symmetric());
}

#[test]
fn blocking_examples() {
    let t11 = instance("table11");
    assert!(is_2ps_blocking(&t11, &initial("table11"), 0, 2).unwrap());

    let t4 = instance("table4");
    assert!(blocking_pairs(&t4, &Assignment::identity(2), TWO).is_empty());

    let t9 = instance("table9");
    assert!(is_4ps_blocking(&t9, &initial("table9"), 2, 4).unwrap());

    let t3 = instance("table3");
    assert!(blocking_pairs(&t3, &initial("table3"), FOUR).is_empty());
    let mu2 = by_label(&t3, &[("c", "d", "r1"), ("a", "b", "r2")]);
    assert!(pareto_dominates(&t3, &mu2, &initial("table3")));
}

#[test]
fn table8_blocking_pairs_are_exactly_six() {
    let inst = instance("table8");
    let mu = Assignment::identity(3);
    let report = blocking_pairs(&inst, &mu, TWO);
    assert_eq!(report.pair_indices(), vec![(1, 2), (1, 3), (1, 4), (1, 5), (3, 4), (3, 5)]);
    assert!(blocking_pairs(&inst, &mu, FOUR).is_empty());
}

#[test]
fn family_blocking_counts() {
    for n in 2..=6 {
        let (inst, mu) = gen_cttcr_2ps_family(n).unwrap();
        assert_eq!(blocking_pairs(&inst, &mu, TWO).len(), 2 * n * n - 2 * n);
        assert!(blocking_pairs(&inst, &mu, FOUR).is_empty());
    }
}

#[test]
fn table4_has_two_stable_pairings() {
    let inst = instance("table4");
    let pairings: BTreeSet<Vec<(usize, usize)>> = all_stable(&inst, TWO)
        .unwrap()
        .iter()
        .map(|mu| {
            let mut p: Vec<(usize, usize)> = mu.triples().iter().map(|t| (t.agent_a, t.agent_b)).collect();
            p.sort();
            p
        })
        .collect();
    assert_eq!(pairings, BTreeSet::from([vec![(0, 1), (2, 3)], vec![(0, 3), (1, 2)]]));
}

#[test]
fn four_person_stable_assignments_exist_for_every_fixture() {
    for f in fixtures::ALL {
        let inst = f.instance();
        if inst.agent_count() <= 8 {
            assert!(!all_stable(&inst, FOUR).unwrap().is_empty(), "{}", f.name);
        }
    }
}

#[test]
fn pareto_examples() {
    let t3 = instance("table3");
    let front = pareto_front(&t3).unwrap();
    assert!(!front.contains(&initial("table3")));
    assert!(front.contains(&by_label(&t3, &[("c", "d", "r1"), ("a", "b", "r2")])));
    assert!(!is_pareto_optimal(&instance("table10"), &initial("table10")).unwrap());
}

#[test]
fn max_welfare_examples() {
    let (best, witness) = max_social_welfare(&instance("table10")).unwrap();
    assert_eq!(best, 48);
    assert_eq!(witness, by_label(&instance("table10"), &[("a3", "a4", "r1"), ("a1", "a2", "r2")]));

    let t3 = instance("table3");
    let mu3 = by_label(&t3, &[("b", "c", "r1"), ("a", "d", "r2")]);
    let (best, witness) = max_social_welfare(&t3).unwrap();
    assert_eq!(best, t3.social_welfare(&mu3));
    assert_eq!(best, BIG + 2);
    assert_eq!(t3.social_welfare(&witness), best);
}

#[test]
fn serial_dictatorship_goldens() {
    let inst = instance("sd_example");
    let (mu, trace) = serial_dictatorship(&inst, &[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!(mu, by_label(&inst, &[("a", "c", "i"), ("b", "f", "j"), ("d", "e", "k")]));
    assert_eq!(trace.steps.last().unwrap().sw_after, inst.social_welfare(&mu));

    let t8 = instance("table8");
    let (mu, _) = serial_dictatorship(&t8, &[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!(mu, Assignment::identity(3));
}

#[test]
fn table9_arcs_by_rule() {
    let inst = instance("table9");
    let mu = initial("table9");
    let all = [true; 6];
    // d's best place is a's, but b would not take d for a
    assert!(build_graph(&inst, &mu, ArcRule::StrictConsent, &all).arcs().is_empty());
    let best = build_graph(&inst, &mu, ArcRule::BestConsenting, &all);
    assert_eq!(best.arcs(), vec![(2, 4), (3, 5), (4, 2), (5, 3)]);
    assert_eq!(select_cycle(&best, CycleSelection::LexSmallest), Some(vec![2, 4]));
    assert_eq!(select_cycle(&best, CycleSelection::LexLargest), Some(vec![3, 5]));
    let traded = apply_cycle(&mu, &[2, 4]).unwrap();
    assert_eq!(traded, by_label(&inst, &[("a", "b", "r1"), ("e", "d", "r2"), ("c", "f", "r3")]));
}

#[test]
fn table5_trade_and_state_cycle() {
    let inst = instance("table5");
    let mu0 = initial("table5");
    assert_eq!(
        apply_cycle(&mu0, &[0, 2]).unwrap(),
        by_label(&inst, &[("a3", "a2", "r1"), ("a1", "a4", "r2")])
    );
    match naive_ttc(&inst, &mu0, CycleSelection::LexSmallest, 100) {
        NaiveOutcome::NonTerminating { length, states, trace } => {
            assert_eq!(length, 4);
            assert_eq!(states[0], mu0);
            assert_eq!(trace.steps.len(), 4);
        }
        other => panic!("expected a state cycle, got {other:?}"),
    }
}

#[test]
fn naive_ttc_converges_without_improvements() {
    let inst = instance("table10");
    let mu0 = initial("table10");
    match naive_ttc(&inst, &mu0, CycleSelection::LexSmallest, 100) {
        NaiveOutcome::Converged { assignment, trace } => {
            assert_eq!(assignment, mu0);
            assert!(trace.steps.is_empty());
        }
        other => panic!("expected convergence, got {other:?}"),
    }
}

#[test]
fn cttc_failures() {
    let t9 = instance("table9");
    let (out, trace) = cttc(&t9, &initial("table9"), ArcRule::StrictConsent, CycleSelection::LexSmallest).unwrap();
    assert_eq!(out, initial("table9"));
    assert_eq!(trace.moves(), 0);
    assert!(blocking_pairs(&t9, &out, FOUR).contains(2, 4));

    let t10 = instance("table10");
    let (out, _) = cttc(&t10, &initial("table10"), ArcRule::StrictConsent, CycleSelection::LexSmallest).unwrap();
    assert_eq!(out, initial("table10"));
}

#[test]
fn cttcr_results() {
    let t9 = instance("table9");
    let (out, trace) = cttcr(&t9, &initial("table9"), ArcRule::BestConsenting, CycleSelection::LexSmallest).unwrap();
    assert!(blocking_pairs(&t9, &out, FOUR).is_empty());
    assert_eq!(trace.moves(), 1);
    assert_eq!(out, by_label(&t9, &[("a", "b", "r1"), ("d", "e", "r2"), ("c", "f", "r3")]));

    for n in 2..=5 {
        let (inst, mu) = gen_cttcr_2ps_family(n).unwrap();
        let (out, trace) = cttcr(&inst, &mu, ArcRule::BestConsenting, CycleSelection::LexSmallest).unwrap();
        assert_eq!(out, mu);
        assert_eq!(trace.moves(), 0);
    }
}

#[test]
fn swapping_examples() {
    let inst = instance("swap_non_po");
    let mu0 = initial("swap_non_po");
    let (out, trace) = swapping(&inst, &mu0, &PairSelection::Lex).unwrap();
    assert_eq!(out, mu0);
    assert!(trace.steps.is_empty());
    assert!(!is_pareto_optimal(&inst, &out).unwrap());

    let t11 = instance("table11");
    let mu = initial("table11");
    assert!(matches!(swapping(&t11, &mu, &PairSelection::Lex), Err(Error::NotBinarySymmetric)));
    let after = mu.swap(0, 2).unwrap();
    assert_eq!(t11.social_welfare(&after) as i64 - t11.social_welfare(&mu) as i64, -2);
}

#[test]
fn reconstructed_swapping_instance_has_the_narrated_blocking_pairs() {
    let inst = instance("swap_non_sp");
    assert!(inst.is_binary_symmetric());
    let report = blocking_pairs(&inst, &initial("swap_non_sp"), TWO);
    assert_eq!(report.pair_indices(), vec![(0, 2), (0, 3), (1, 2), (1, 3), (3, 4), (3, 5)]);
}

#[test]
fn matchings_on_table6() {
    let inst = instance("table6");
    let w: Vec<Vec<u64>> = (0..6)
        .map(|i| (0..6).map(|j| if i == j { 0 } else { inst.agent_value(i, j) + inst.agent_value(j, i) }).collect())
        .collect();
    assert_eq!(max_weight_perfect_matching(&w).unwrap(), (vec![(0, 1), (2, 3), (4, 5)], 9));
    assert_eq!(max_weight_one_two_matching(inst.room_values()).unwrap(), (vec![0, 1, 0, 2, 2, 1], 13));
}

#[test]
fn double_matching_on_table6() {
    let inst = instance("table6");
    let (mu, report) = double_matching(&inst).unwrap();
    assert_eq!(report.cycles.len(), 1);
    let cut = &report.cycles[0];
    let mut w = cut.weights.to_vec();
    w.sort();
    assert_eq!(w, vec![6, 7, 9]);
    assert_eq!(cut.removed_weight, 6);
    assert_eq!(mu, by_label(&inst, &[("a3", "a4", "r1"), ("a1", "a2", "r2"), ("a5", "a6", "r3")]));

    let lied = inst.with_report(0, &inst.agent_values()[0].clone(), &[6, 0, 0]).unwrap();
    let (mu, report) = double_matching(&lied).unwrap();
    assert_eq!(report.cycles[0].removed_weight, 7);
    assert_eq!(mu, by_label(&inst, &[("a1", "a2", "r1"), ("a5", "a6", "r2"), ("a3", "a4", "r3")]));
}

#[test]
fn local_search_resolves_table9() {
    let inst = instance("table9");
    let (out, trace) = local_search(&inst, &initial("table9"));
    assert!(blocking_pairs(&inst, &out, FOUR).is_empty());
    assert_eq!(trace.steps[0].participants, vec![2, 4]);
}

#[test]
fn probe_examples() {
    let t6 = instance("table6");
    let lie = Misreport {
        agent_values: t6.agent_values()[0].clone(),
        room_values: vec![6, 0, 0],
    };
    for m in [Mechanism::DoubleMatching, Mechanism::DoubleMatchingLocalSearch] {
        let check = verify_manipulation(&t6, &m, None, 0, &lie).unwrap();
        assert!(check.improved);
        assert_eq!((check.truthful, check.manipulated), (2, Some(6)));
    }

    let sp = instance("sp_example");
    let mut lie = Misreport::truthful(&sp, 0);
    lie.agent_values[2] = 1;
    let check = verify_manipulation(&sp, &Mechanism::cttcr(), Some(&initial("sp_example")), 0, &lie).unwrap();
    assert_eq!((check.truthful, check.manipulated), (20, Some(22)));

    let honest = verify_manipulation(&sp, &Mechanism::cttcr(), None, 3, &Misreport::truthful(&sp, 3)).unwrap();
    assert!(!honest.improved);
}

#[test]
fn table4_agent_b_gains_by_lying() {
    let inst = instance("table4");
    let oracle = Mechanism::StableOracle { kind: TWO };
    let b = agent(&inst, "b");
    let truthful = oracle.run(&inst, None).unwrap().assignment;
    assert_eq!(truthful, Assignment::identity(2));
    let (lie, check) = manipulation_search(&inst, &oracle, None, b, SearchSpace::Grid { max: 3 }, DEFAULT_BUDGET)
        .unwrap()
        .expect("b has a profitable lie");
    assert_eq!((check.truthful, check.manipulated), (2, Some(3)));
    // under the lie the only stable pairing is {(a,d),(b,c)}
    let lied = inst.with_report(b, &lie.agent_values, &lie.room_values).unwrap();
    let stable = all_stable(&lied, TWO).unwrap();
    assert!(!stable.is_empty());
    assert!(stable.iter().all(|mu| mu.roommate(b) == agent(&inst, "c")));
}
