mod common;

use common::*;
use maidkit_core::correlation::{add_mediator, MediatorMode};
use maidkit_core::inference::*;
use maidkit_core::policies::BehaviouralProfile;
use maidkit_core::rational::{int, ratio};
use maidkit_core::text::parse_maid;
use maidkit_core::{Error, Rational, DEFAULT_CAP};
use num_traits::One;

#[test]
fn taxi_pure_profile_accepts_surely() {
    let m = game("taxi");
    let p = pure(&m, &[("T", &["1", "1"]), ("A", &["1", "1"])]).to_behavioural(&m);
    let f = marginal(&m, &p, &[v(&m, "A")], &[]).unwrap();
    assert_eq!(f.table, vec![int(0), int(1)]);
    assert_eq!(expected_utility(&m, &p, agent(&m, "taxi")).unwrap(), int(1));
    assert_eq!(expected_utility(&m, &p, agent(&m, "alice")).unwrap(), int(2));
    // exhaustive outcome sum over Q, T, A
    let a = v(&m, "A");
    let pa: Rational = outcome_distribution(&m, &p, DEFAULT_CAP).unwrap().into_iter().filter(|(o, _)| o[a.0] == 1).map(|(_, w)| w).sum();
    assert!(pa.is_one());
}

#[test]
fn uniform_rules_have_uniform_rows() {
    for g in GAMES {
        let m = game(g);
        let bn = induced_bn(&m, &BehaviouralProfile::uniform(&m)).unwrap();
        for d in m.decisions() {
            let card = m.card(d);
            assert!(bn.nodes[d.0].cpt.iter().all(|x| *x == ratio(1, card as i64)), "{g}");
        }
    }
}

#[test]
fn driver_shared_rule_values() {
    let m = game("driver");
    let p = behavioural(&m, &[("Pi_D", &[&["1/3", "2/3"]])]);
    let bn = induced_bn(&m, &p).unwrap();
    assert_eq!(bn.nodes[v(&m, "D1").0].cpt, vec![ratio(1, 3), ratio(2, 3)]);
    assert_eq!(bn.nodes[v(&m, "D2").0].cpt, bn.nodes[v(&m, "D1").0].cpt);
    assert_eq!(expected_utility(&m, &p, agent(&m, "driver")).unwrap(), ratio(4, 3));
    assert_eq!(expected_utility_bruteforce(&m, &p, agent(&m, "driver"), DEFAULT_CAP).unwrap(), ratio(4, 3));
}

#[test]
fn fair_coin_marginal() {
    let m = parse_maid("agent a\nchance C domain=h,t\ndecision D agent=a domain=x,y\nutility U agent=a parents=D\ncpd C : 1/2 1/2\nutil U | D=x : 0\nutil U | D=y : 1\n").unwrap();
    let f = marginal(&m, &BehaviouralProfile::uniform(&m), &[v(&m, "C")], &[]).unwrap();
    assert_eq!(f.table, vec![ratio(1, 2), ratio(1, 2)]);
}

#[test]
fn hardworking_is_twice_as_likely_on_a_match() {
    let m = game("signaling");
    let mg = add_mediator(&m, MediatorMode::Private, DEFAULT_CAP).unwrap();
    let g = mg.with_kappa(&m, &signaling_construction(&m)).unwrap();
    let cb = mg.channel_of(v(&m, "B")).unwrap();
    // Bob is told to hire exactly when Alice's signal matches s
    let f = marginal(&g, &mg.obedient_profile(), &[v(&m, "X")], &[(cb, 0)]).unwrap();
    assert_eq!(f.table, vec![ratio(2, 3), ratio(1, 3)]);
}

#[test]
fn zero_utilities_give_zero() {
    let m = parse_maid("agent a\ndecision D agent=a domain=x,y\nutility U agent=a parents=D\nutil U | D=x : 0\nutil U | D=y : 0\n").unwrap();
    let mut r = rng(3);
    for _ in 0..10 {
        assert_eq!(expected_utility(&m, &random_profile(&mut r, &m), maidkit_core::AgentId(0)).unwrap(), int(0));
    }
}

#[test]
fn uniform_matching_pennies_is_fair() {
    let m = game("matching_pennies");
    let p = BehaviouralProfile::uniform(&m);
    for a in m.agent_ids() {
        assert_eq!(expected_utility_bruteforce(&m, &p, a, DEFAULT_CAP).unwrap(), int(0));
    }
}

#[test]
fn zero_probability_evidence_is_reported() {
    let m = game("taxi");
    let p = pure(&m, &[("T", &["1", "1"]), ("A", &["1", "1"])]).to_behavioural(&m);
    let e = marginal(&m, &p, &[v(&m, "Q")], &[(v(&m, "A"), 0)]).unwrap_err();
    assert_eq!(e, Error::ZeroProbabilityEvidence);
}

#[test]
fn taxi_matches_brute_force_on_random_profiles() {
    let m = game("taxi");
    let mut r = rng(100);
    for _ in 0..100 {
        let p = random_profile(&mut r, &m);
        for a in m.agent_ids() {
            assert_eq!(expected_utility(&m, &p, a).unwrap(), expected_utility_bruteforce(&m, &p, a, DEFAULT_CAP).unwrap());
        }
    }
}

#[test]
fn marginals_are_normalized_and_order_independent() {
    let mut r = rng(5);
    for g in GAMES {
        let m = game(g);
        for _ in 0..10 {
            let p = random_profile(&mut r, &m);
            let bn = induced_bn(&m, &p).unwrap();
            let reversed = Elimination::Given((0..bn.len()).rev().collect());
            for v in m.var_ids() {
                let a = bn.marginal(&[v.0], &[]).unwrap();
                let b = bn.marginal_with(&[v.0], &[], &reversed).unwrap();
                assert!(a.total().is_one(), "{g}");
                assert_eq!(a, b, "{g}");
            }
            // with evidence on the first decision's first value when it is possible
            let d = m.decisions().next().unwrap();
            if let (Ok(a), Ok(b)) = (bn.marginal(&[0], &[(d.0, 0)]), bn.marginal_with(&[0], &[(d.0, 0)], &reversed)) {
                assert_eq!(a, b, "{g}");
                assert!(a.total().is_one());
            }
        }
    }
}
