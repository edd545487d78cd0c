//! Invariants over generated instances.

use proptest::prelude::*;
use roommates::checks::{blocking_pairs, is_2ps_blocking, is_4ps_blocking, StabilityKind};
use roommates::dmls::{double_matching, local_search};
use roommates::gen::{gen_binary_symmetric, gen_random};
use roommates::io::{assignment_to_json, instance_to_json, parse_assignment, parse_instance};
use roommates::oracle::enumerate_assignments;
use roommates::sd::serial_dictatorship;
use roommates::swapping::{swapping, PairSelection};
use roommates::ttc::{cttc, cttcr, trade_bound, ArcRule, CycleSelection};
use roommates::{Assignment, Instance, MechanismTrace, StepKind};

fn instance_and_assignment() -> impl Strategy<Value = (Instance, Assignment)> {
    (prop_oneof![Just(4usize), Just(6), Just(8)], any::<u64>(), 0u64..8, any::<prop::sample::Index>()).prop_map(
        |(agents, seed, max, pick)| {
            let inst = gen_random(agents, max, max, seed, false).unwrap();
            let all: Vec<Assignment> = enumerate_assignments(&inst).unwrap().collect();
            let mu = all[pick.index(all.len())].clone();
            (inst, mu)
        },
    )
}

/// Checks that the recorded welfare matches a replay of the moves.
fn trace_replays(inst: &Instance, mu0: &Assignment, trace: &MechanismTrace) -> Assignment {
    let mut mu = mu0.clone();
    for step in &trace.steps {
        assert_eq!(step.sw_before, inst.social_welfare(&mu));
        match step.kind {
            StepKind::Swap => mu = mu.swap(step.participants[0], step.participants[1]).unwrap(),
            StepKind::TradeCycle => mu = roommates::ttc::apply_cycle(&mu, &step.participants).unwrap(),
            _ => {}
        }
        assert_eq!(step.sw_after, inst.social_welfare(&mu));
    }
    mu
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn swap_is_an_involution_touching_four_agents((inst, mu) in instance_and_assignment(), i in 0usize..8, j in 0usize..8) {
        let n = inst.agent_count();
        let (i, j) = (i % n, j % n);
        prop_assume!(mu.room(i) != mu.room(j));
        let after = mu.swap(i, j).unwrap();
        prop_assert_eq!(after.swap(i, j).unwrap(), mu.clone());
        let touched = [i, j, mu.roommate(i), mu.roommate(j)];
        for k in (0..n).filter(|k| !touched.contains(k)) {
            prop_assert_eq!(inst.utility(&after, k), inst.utility(&mu, k));
        }
    }

    #[test]
    fn four_person_blocking_implies_two_person((inst, mu) in instance_and_assignment()) {
        let n = inst.agent_count();
        for i in 0..n {
            for j in i + 1..n {
                if mu.room(i) != mu.room(j) && is_4ps_blocking(&inst, &mu, i, j).unwrap() {
                    prop_assert!(is_2ps_blocking(&inst, &mu, i, j).unwrap());
                }
            }
        }
        if blocking_pairs(&inst, &mu, StabilityKind::TwoPerson).is_empty() {
            prop_assert!(blocking_pairs(&inst, &mu, StabilityKind::FourPerson).is_empty());
        }
    }

    #[test]
    fn io_round_trips((inst, mu) in instance_and_assignment()) {
        let json = instance_to_json(&inst);
        let back = parse_instance(&json).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(instance_to_json(&back), json);
        let text = assignment_to_json(&inst, &mu);
        prop_assert_eq!(parse_assignment(&inst, &text).unwrap(), mu);
    }

    #[test]
    fn serial_dictatorship_is_four_person_stable((inst, _) in instance_and_assignment(), order_seed in any::<u64>()) {
        let n = inst.agent_count();
        let mut order: Vec<usize> = (0..n).collect();
        // cheap deterministic shuffle
        let mut s = order_seed;
        for k in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(k, (s >> 33) as usize % (k + 1));
        }
        let (mu, trace) = serial_dictatorship(&inst, &order).unwrap();
        prop_assert!(blocking_pairs(&inst, &mu, StabilityKind::FourPerson).is_empty());
        let rooms = n / 2;
        prop_assert!(blocking_pairs(&inst, &mu, StabilityKind::TwoPerson).len() <= rooms * rooms - rooms);
        prop_assert_eq!(trace.steps.last().unwrap().sw_after, inst.social_welfare(&mu));
    }

    #[test]
    fn contractual_trades_help_traders_and_hurt_nobody((inst, mu0) in instance_and_assignment(), best in any::<bool>()) {
        let rule = if best { ArcRule::BestConsenting } else { ArcRule::StrictConsent };
        for (out, trace) in [
            cttc(&inst, &mu0, rule, CycleSelection::LexSmallest).unwrap(),
            cttcr(&inst, &mu0, rule, CycleSelection::LexLargest).unwrap(),
        ] {
            prop_assert!(trace.moves() <= trade_bound(&inst));
            let mut mu = mu0.clone();
            for step in &trace.steps {
                let next = match step.kind {
                    StepKind::TradeCycle => roommates::ttc::apply_cycle(&mu, &step.participants).unwrap(),
                    StepKind::Swap => mu.swap(step.participants[0], step.participants[1]).unwrap(),
                    _ => continue,
                };
                prop_assert!(step.sw_after > step.sw_before);
                for i in 0..inst.agent_count() {
                    let (before, after) = (inst.utility(&mu, i), inst.utility(&next, i));
                    if step.participants.contains(&i) {
                        prop_assert!(after > before);
                    } else {
                        prop_assert!(after >= before);
                    }
                }
                mu = next;
            }
            prop_assert_eq!(trace_replays(&inst, &mu0, &trace), out);
        }
    }

    #[test]
    fn cttcr_best_consenting_is_four_person_stable((inst, mu0) in instance_and_assignment(), largest in any::<bool>()) {
        let sel = if largest { CycleSelection::LexLargest } else { CycleSelection::LexSmallest };
        let (out, _) = cttcr(&inst, &mu0, ArcRule::BestConsenting, sel).unwrap();
        prop_assert!(blocking_pairs(&inst, &out, StabilityKind::FourPerson).is_empty());
    }

    #[test]
    fn local_search_reaches_four_person_stability((inst, mu0) in instance_and_assignment()) {
        let (out, trace) = local_search(&inst, &mu0);
        prop_assert!(blocking_pairs(&inst, &out, StabilityKind::FourPerson).is_empty());
        prop_assert!(trace.steps.iter().all(|s| s.sw_after > s.sw_before));
        prop_assert_eq!(trace_replays(&inst, &mu0, &trace), out);
    }

    #[test]
    fn double_matching_cuts_the_lightest_class((inst, _) in instance_and_assignment()) {
        let (mu, report) = double_matching(&inst).unwrap();
        prop_assert_eq!(mu.agent_count(), inst.agent_count());
        for cut in &report.cycles {
            prop_assert_eq!(cut.agents.len() % 2, 0);
            prop_assert!(cut.agents.len() >= 4);
            prop_assert_eq!(cut.removed_weight, *cut.weights.iter().min().unwrap());
            prop_assert_eq!(cut.weights[cut.removed_class], cut.removed_weight);
        }
        let total: u64 = report.agent_matching_weight + report.room_matching_weight;
        let cut: u64 = report.cycles.iter().map(|c| c.removed_weight).sum();
        // every surviving edge still contributes its weight to welfare
        prop_assert!(inst.social_welfare(&mu) >= total - cut);
    }

    #[test]
    fn swapping_steps_gain_at_least_two(agents in prop_oneof![Just(4usize), Just(6), Just(8), Just(10)], seed in any::<u64>(), dh in 0.0f64..1.0, dv in 0.0f64..1.0) {
        let inst = gen_binary_symmetric(agents, dh, dv, seed).unwrap();
        let mu0 = Assignment::identity(agents / 2);
        let (out, trace) = swapping(&inst, &mu0, &PairSelection::Lex).unwrap();
        prop_assert!(trace.steps.len() <= agents);
        for s in &trace.steps {
            prop_assert!(s.sw_after >= s.sw_before + 2);
            prop_assert!(s.slack.unwrap() >= 2);
        }
        prop_assert!(blocking_pairs(&inst, &out, StabilityKind::TwoPerson).is_empty());
        prop_assert_eq!(trace_replays(&inst, &mu0, &trace), out);
    }
}
