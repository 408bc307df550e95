//! Acceptance criteria, one pass/fail line each. Runs without the libtest harness.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::oracles::{path_oracle, random_dag, random_lp, vertex_optimum};
use common::*;
use maidkit_core::correlation::{
    add_mediator, conditional_action_value, solve_ce, solve_maid_ce, verify_maid_ce, MaidCeCheck, MediatorMode, Objective,
};
use maidkit_core::equilibria::{
    best_response, find_mixed_ne_two_agent, find_pure_ne_sufficient_info, is_nash, mixed_nash_gaps, non_emptiness, normal_form,
    NeMode, NonEmptiness, SolverConfig,
};
use maidkit_core::graphs::{build_mechanised_graph, classify_recall, d_separated};
use maidkit_core::inference::{expected_utility, expected_utility_bruteforce};
use maidkit_core::lp::{solve_lp, LpStatus};
use maidkit_core::policies::{
    enumerate_pure_policies, enumerate_pure_profiles, mixed_expected_utility, BehaviouralProfile, MixedPolicy, MixtureProfile,
};
use maidkit_core::{AgentId, Maid, Rational, DEFAULT_CAP};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn best_pure(m: &Maid, a: AgentId, opponents: &BehaviouralProfile) -> Rational {
    enumerate_pure_policies(m, a, DEFAULT_CAP)
        .unwrap()
        .iter()
        .map(|p| expected_utility_bruteforce(m, &opponents.merged(&p.to_behavioural(m)), a, DEFAULT_CAP).unwrap())
        .max()
        .unwrap()
}

fn taxi_classification() {
    let m = game("taxi");
    let r = classify_recall(&m);
    for a in &r.agents {
        assert!(a.perfect_recall, "agent {} lacks perfect recall", a.agent.0);
    }
    assert!(!r.perfect_information);
    assert!(r.sufficient_information);
    let edges: BTreeSet<(String, String)> =
        build_mechanised_graph(&m).named_mech_edges(&m).into_iter().filter(|(a, b)| a != b || a.starts_with("Pi")).collect();
    let expected: BTreeSet<(String, String)> = [("Pi_A", "Pi_T"), ("Theta_U_T", "Pi_T"), ("Theta_U_A", "Pi_A")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    assert_eq!(edges, expected);
}

fn taxi_pure_equilibrium() {
    let m = game("taxi");
    let p = find_pure_ne_sufficient_info(&m, &cfg()).unwrap();
    let b = p.to_behavioural(&m);
    let cert = is_nash(&m, &b, &Rational::zero(), &cfg()).unwrap();
    assert!(cert.is_nash && cert.exact);
    let profiles = enumerate_pure_profiles(&m, DEFAULT_CAP).unwrap();
    assert_eq!(profiles.len(), 16);
    // brute force: no agent gains by switching to any of its pure policies
    for a in m.agent_ids() {
        let here = expected_utility_bruteforce(&m, &b, a, DEFAULT_CAP).unwrap();
        assert!(best_pure(&m, a, &b.without(&m, a)) <= here);
    }
}

fn driver_values() {
    let m = game("driver");
    let d = AgentId(0);
    let third = behavioural(&m, &[("Pi_D", &[&["1/3", "2/3"]])]);
    assert_eq!(expected_utility(&m, &third, d).unwrap(), q("4/3"));
    let pols = enumerate_pure_policies(&m, d, DEFAULT_CAP).unwrap();
    let mut best_mixed: Option<Rational> = None;
    for k in 0..=12 {
        let w = Rational::new(k.into(), 12.into());
        let mp = MixedPolicy { agent: d, support: vec![(pols[0].clone(), w.clone()), (pols[1].clone(), Rational::from_integer(1.into()) - w)] };
        let v = mixed_expected_utility(&m, &MixtureProfile::from_mixed(&m, &[mp]), d, DEFAULT_CAP).unwrap();
        best_mixed = Some(best_mixed.map_or(v.clone(), |b| b.max(v)));
    }
    // linear in the weights, so the optimum sits at a pure policy
    assert_eq!(best_mixed.unwrap(), q("1"));
    assert_eq!(best_pure(&m, d, &BehaviouralProfile::empty(&m)), q("1"));
    let br = best_response(&m, d, &BehaviouralProfile::empty(&m), &cfg()).unwrap();
    let p = br.rules(&m).rule(unit(&m, "Pi_D")).unwrap()[0][0].clone();
    assert!((&p - q("1/3")).abs() < q("1/1000"));
}

fn forgetful_pennies() {
    let m = game("forgetful_pennies");
    assert_eq!(non_emptiness(&m, NeMode::Pure, &cfg()).unwrap(), NonEmptiness::No);
    let uniform = behavioural(&m, &[("A", &[&["1/2", "1/2"]]), ("B1", &[&["1/2", "1/2"]]), ("B2", &[&["1/2", "1/2"]])]);
    let cert = is_nash(&m, &uniform, &Rational::zero(), &cfg()).unwrap();
    assert!(!cert.is_nash && cert.exact);
    assert_eq!(cert.gaps[agent(&m, "bob").0], q("1/2"));
    let ne = find_mixed_ne_two_agent(&m, &cfg()).unwrap();
    assert_eq!(ne.values, vec![q("0"), q("0")]);
    // indifference: every supported pure policy earns the agent's best reply value
    let mix = ne.profile(&m);
    assert!(mixed_nash_gaps(&m, &mix, &cfg()).unwrap().iter().all(Zero::is_zero));
    for (who, pol) in ne.policies.iter().enumerate() {
        for (p, w) in &pol.support {
            if w.is_positive() {
                let mut dev = ne.policies.clone();
                dev[who] = MixedPolicy { agent: pol.agent, support: vec![(p.clone(), q("1"))] };
                let v = mixed_expected_utility(&m, &MixtureProfile::from_mixed(&m, &dev), pol.agent, DEFAULT_CAP).unwrap();
                assert_eq!(v, ne.values[who]);
            }
        }
    }
}

fn absentminded_pennies() {
    let m = game("absentminded_pennies");
    assert_eq!(non_emptiness(&m, NeMode::Pure, &cfg()).unwrap(), NonEmptiness::No);
    assert!(matches!(non_emptiness(&m, NeMode::Behavioural, &cfg()).unwrap(), NonEmptiness::Unknown(_)));
}

fn signaling_ce() {
    let m = game("signaling");
    let bob = agent(&m, "bob");
    let a = solve_ce(&m, Objective::Agent(agent(&m, "alice")), &cfg()).unwrap();
    let b = solve_ce(&m, Objective::Agent(bob), &cfg()).unwrap();
    assert_eq!(a.value, q("0"));
    assert_eq!(b.value, q("6"));
    let nf = normal_form(&m, DEFAULT_CAP).unwrap();
    let rejecting = &nf.policies[bob.0][3];
    assert_eq!(rejecting.label(&m), "bbar_a bbar_abar");
    for sol in [a, b] {
        for (p, w) in &sol.kappa.support {
            if w.is_positive() {
                assert_eq!(&p.policy_of(&m, bob), rejecting);
            }
        }
    }
}

fn signaling_maid_ce() {
    let m = game("signaling");
    let k = signaling_construction(&m);
    assert_eq!(verify_maid_ce(&m, &k, &cfg()).unwrap(), MaidCeCheck::Ok);
    assert_eq!(k.values(&m).unwrap(), vec![q("7/2"), q("13/2")]);
    let mg = add_mediator(&m, MediatorMode::Private, DEFAULT_CAP).unwrap();
    let b = v(&m, "B");
    let hire = m.var(b).domain.iter().position(|x| x == "b").unwrap();
    let value = conditional_action_value(&mg, &m, &k, b, &[(mg.channel_of(b).unwrap(), hire)], hire).unwrap();
    assert_eq!(value, q("20/3"));
    let sol = solve_maid_ce(&m, Objective::Agent(agent(&m, "alice")), &cfg()).unwrap();
    assert!(sol.value >= q("7/2"));
}

fn oracle_equivalence() {
    let mut r = rng(800);
    for name in GAMES {
        let m = game(name);
        for _ in 0..200 {
            let p = random_profile(&mut r, &m);
            for a in m.agent_ids() {
                assert_eq!(expected_utility(&m, &p, a).unwrap(), expected_utility_bruteforce(&m, &p, a, DEFAULT_CAP).unwrap(), "{name}");
            }
        }
    }
    for _ in 0..500 {
        let n = r.gen_range(2..=7);
        let density = r.gen_range(0.2..0.7);
        let g = random_dag(&mut r, n, density);
        let mut nodes: Vec<usize> = (0..n).collect();
        nodes.shuffle(&mut r);
        let (x, y) = (nodes[0], nodes[1]);
        let z: Vec<usize> = nodes[2..].iter().copied().filter(|_| r.gen_bool(0.4)).collect();
        assert_eq!(d_separated(&g, &[x], &[y], &z), path_oracle(&g, x, y, &z));
    }
    for _ in 0..200 {
        let (lp, maximize) = random_lp(&mut r, true);
        let res = solve_lp(&lp);
        match vertex_optimum(&lp, maximize) {
            Some(best) => {
                assert_eq!(res.status, LpStatus::Optimal);
                assert_eq!(res.value, best);
            }
            None => assert_eq!(res.status, LpStatus::Infeasible),
        }
    }
}

fn pure_policies_suffice() {
    let mut r = rng(900);
    for name in GAMES {
        let m = game(name);
        for a in m.agent_ids().filter(|&a| !m.is_absent_minded(a)) {
            let own: Vec<_> = m.units_of(a).map(|u| u.id).collect();
            let others: Vec<_> = m.units().iter().filter(|u| u.owner != a).map(|u| u.id).collect();
            for _ in 0..50 {
                let o = randomize(&mut r, &m, &BehaviouralProfile::empty(&m), others.clone());
                let best = best_pure(&m, a, &o);
                let b = randomize(&mut r, &m, &o, own.clone());
                assert!(expected_utility(&m, &b, a).unwrap() <= best, "{name}");
            }
        }
    }
    let m = game("driver");
    let third = behavioural(&m, &[("Pi_D", &[&["1/3", "2/3"]])]);
    assert!(expected_utility(&m, &third, AgentId(0)).unwrap() > best_pure(&m, AgentId(0), &BehaviouralProfile::empty(&m)));
}

fn main() {
    let criteria: [(&str, fn()); 9] = [
        ("taxi recall classes and mechanised graph", taxi_classification),
        ("taxi backward induction yields an exact pure NE", taxi_pure_equilibrium),
        ("absent-minded driver values and grid search", driver_values),
        ("forgetful pennies: no pure NE, uniform rejected, mixed NE", forgetful_pennies),
        ("absent-minded pennies: no pure NE, behavioural search inconclusive", absentminded_pennies),
        ("signaling CE values and support", signaling_ce),
        ("signaling MAID-CE construction and optimum", signaling_maid_ce),
        ("oracle equivalence: inference, d-separation, LP", oracle_equivalence),
        ("pure policies suffice without absent-mindedness", pure_policies_suffice),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {}: PASS ({secs:.2}s) {name}", k + 1),
            Err(e) => {
                failed += 1;
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                println!("criterion {}: FAIL ({secs:.2}s) {name}: {}", k + 1, msg.unwrap_or_default());
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
