// Copyright 2026 The vote-elicit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Property tests over randomly drawn small elections.

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use vote_elicit::elicit::{
    is_nondivulging, materialize_fine_tree, min_deciding_subset, simulate_coarse_standard, simulate_fine,
    ElicitationInstance, FinePolicy, FixedOrderFinePolicy, StandardPolicy, TieRule, DEFAULT_NODE_GUARD,
};
use vote_elicit::strategy::outcome_distribution;
use vote_elicit::termination::{can_prevent_win, decided, DEFAULT_STV_BUDGET};
use vote_elicit::{
    all_ballots, pairwise_tallies, parse_election, score, serialize_election, stv_run, winner, Ballot,
    Candidate, PartialProfile, Protocol,
};

fn protocol() -> impl Strategy<Value = Protocol> {
    prop::sample::select(Protocol::ALL.to_vec())
}

fn ranking_protocol() -> impl Strategy<Value = Protocol> {
    prop::sample::select(vec![
        Protocol::Plurality,
        Protocol::Borda,
        Protocol::Copeland,
        Protocol::Maximin,
        Protocol::Stv,
    ])
}

fn ballot(protocol: Protocol, m: usize) -> BoxedStrategy<Ballot> {
    if protocol.uses_approval() {
        (0u64..(1 << m)).prop_map(move |mask| Ballot::approval((0..m).filter(|c| mask >> c & 1 == 1), m).unwrap()).boxed()
    } else {
        Just((0..m).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(move |order| Ballot::ranking(order, m).unwrap())
            .boxed()
    }
}

/// `(protocol, m, ballots)` with `m` in `1..=max_m` and up to `max_n` voters.
fn election_with(protos: BoxedStrategy<Protocol>, max_m: usize, max_n: usize) -> impl Strategy<Value = (Protocol, usize, Vec<Ballot>)> {
    (protos, 1..=max_m).prop_flat_map(move |(p, m)| {
        (Just(p), Just(m), prop::collection::vec(ballot(p, m), 0..=max_n))
    })
}

fn election(max_m: usize, max_n: usize) -> impl Strategy<Value = (Protocol, usize, Vec<Ballot>)> {
    election_with(protocol().boxed(), max_m, max_n)
}

fn rankings(max_m: usize, max_n: usize) -> impl Strategy<Value = (Protocol, usize, Vec<Ballot>)> {
    election_with(ranking_protocol().boxed(), max_m, max_n)
}

/// Plain recursive STV: drop the last-placed candidate, highest index on ties.
fn stv_oracle(ballots: &[Ballot], alive: Vec<Candidate>) -> Candidate {
    if alive.len() == 1 {
        return alive[0];
    }
    let mut tally = vec![0i64; alive.len()];
    for b in ballots {
        let top = b.as_ranking().unwrap().order().iter().find(|c| alive.contains(c)).unwrap();
        tally[alive.iter().position(|c| c == top).unwrap()] += 1;
    }
    let low = *tally.iter().min().unwrap();
    let out = (0..alive.len()).rev().find(|&i| tally[i] == low).unwrap();
    let mut rest = alive;
    rest.remove(out);
    stv_oracle(ballots, rest)
}

/// Winner sets reachable by completing `p`, over every ordered completion.
fn reachable(p: &PartialProfile) -> Vec<Vec<Candidate>> {
    let space = all_ballots(p.protocol, p.m);
    let outcomes = |extra: Vec<Ballot>| winner(p.protocol, &p.completed_with(&extra), p.m).unwrap().winner_set;
    if p.unknown_count == 0 {
        return vec![outcomes(vec![])];
    }
    (0..p.unknown_count)
        .map(|_| space.iter().cloned())
        .multi_cartesian_product()
        .map(outcomes)
        .sorted()
        .dedup()
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn borda_total_is_fixed((_, m, ballots) in rankings(5, 8)) {
        let s = score(Protocol::Borda, &ballots, m).unwrap();
        let total: i64 = s.scores.iter().sum();
        prop_assert_eq!(total, (ballots.len() * m * (m - 1) / 2) as i64);
    }

    #[test]
    fn copeland_is_zero_sum_and_bounded((_, m, ballots) in rankings(5, 8)) {
        let s = score(Protocol::Copeland, &ballots, m).unwrap();
        prop_assert_eq!(s.scores.iter().sum::<i64>(), 0);
        let bound = m as i64 - 1;
        prop_assert!(s.scores.iter().all(|&x| -bound <= x && x <= bound));
    }

    #[test]
    fn pairwise_counts_complement((_, m, ballots) in rankings(5, 8)) {
        let n = pairwise_tallies(&ballots, m).unwrap();
        for x in 0..m {
            prop_assert_eq!(n[x][x], 0);
            for y in (0..m).filter(|&y| y != x) {
                prop_assert_eq!(n[x][y] + n[y][x], ballots.len() as i64);
            }
        }
    }

    #[test]
    fn raising_a_candidate_never_hurts_it(
        (_, m, ballots) in rankings(5, 8),
        pick in any::<prop::sample::Index>(),
        slot in any::<prop::sample::Index>(),
    ) {
        prop_assume!(m >= 2 && !ballots.is_empty());
        let v = pick.index(ballots.len());
        let pos = 1 + slot.index(m - 1);
        let mut order = ballots[v].as_ranking().unwrap().order().to_vec();
        let c = order[pos];
        order.swap(pos - 1, pos);
        let mut raised = ballots.clone();
        raised[v] = Ballot::ranking(order, m).unwrap();
        for p in [Protocol::Maximin, Protocol::Borda, Protocol::Copeland, Protocol::Plurality] {
            let before = score(p, &ballots, m).unwrap().scores[c];
            let after = score(p, &raised, m).unwrap().scores[c];
            prop_assert!(after >= before, "{} lost score under {}", c, p);
        }
    }

    #[test]
    fn voter_order_is_irrelevant((p, m, ballots) in election(5, 8), seed in any::<u64>()) {
        let mut shuffled = ballots.clone();
        let len = shuffled.len();
        if len > 1 {
            shuffled.rotate_left((seed as usize) % len);
            shuffled.swap(0, (seed as usize >> 8) % len);
        }
        let a = winner(p, &ballots, m).unwrap();
        let b = winner(p, &shuffled, m).unwrap();
        prop_assert_eq!(&a.winner_set, &b.winner_set);
        prop_assert_eq!(a.tiebreak_winner, a.winner_set[0]);
        prop_assert_eq!(winner(p, &ballots, m).unwrap(), a);
    }

    #[test]
    fn stv_matches_recursive_oracle((_, m, ballots) in election_with(Just(Protocol::Stv).boxed(), 5, 9)) {
        let out = stv_run(&ballots, m).unwrap();
        prop_assert_eq!(out.tiebreak_winner, stv_oracle(&ballots, (0..m).collect()));
        prop_assert_eq!(out.stv_trace.unwrap().rounds.len(), m - 1);
    }

    #[test]
    fn election_files_round_trip((p, m, ballots) in election(5, 6), unknown in 0usize..3) {
        let partial = PartialProfile::new(p, m, ballots, unknown).unwrap();
        let text = serialize_election(&partial);
        let back = parse_election(&text).unwrap();
        prop_assert_eq!(&back, &partial);
        prop_assert_eq!(serialize_election(&back), text);
    }

    #[test]
    fn outcome_distribution_sums_to_one((p, m, ballots) in election(4, 6)) {
        let dist = outcome_distribution(p, &ballots, m).unwrap();
        let total = dist.iter().fold(BigRational::zero(), |acc, (_, q)| acc + q);
        prop_assert!(total.is_one());
    }

    #[test]
    fn fixed_order_trees_are_nondivulging(p in protocol(), n in 1usize..=2, m in 1usize..=3) {
        let policy = FixedOrderFinePolicy::interleaved(p, n, m);
        let tree = materialize_fine_tree(&policy as &dyn FinePolicy, p, m, n, TieRule::Lexicographic, DEFAULT_NODE_GUARD, DEFAULT_STV_BUDGET).unwrap();
        prop_assert!(is_nondivulging(&tree, DEFAULT_NODE_GUARD).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn prevention_agrees_with_enumeration((p, m, known) in election(3, 3), unknown in 0usize..=2, h in 0usize..3) {
        prop_assume!(h < m);
        let partial = PartialProfile::new(p, m, known, unknown).unwrap();
        let res = can_prevent_win(&partial, h).unwrap();
        let oracle = reachable(&partial).iter().any(|set| set[0] != h);
        prop_assert_eq!(res.preventable, oracle);
        if let Some(witness) = res.witness {
            prop_assert_eq!(witness.len(), unknown);
            let out = winner(p, &partial.completed_with(&witness), m).unwrap();
            prop_assert_ne!(out.tiebreak_winner, h);
        }
        let d = decided(&partial).unwrap();
        let sets = reachable(&partial);
        let firsts: Vec<Candidate> = sets.iter().map(|s| s[0]).sorted().dedup().collect();
        prop_assert_eq!(d, if firsts.len() == 1 { Some(firsts[0]) } else { None });
    }

    #[test]
    fn deciding_subsets_decide((p, m, ballots) in election(3, 4), k in 0usize..=4) {
        prop_assume!(!ballots.is_empty());
        let n = ballots.len();
        let inst = ElicitationInstance::new(p, m, ballots, k.min(n)).unwrap();
        let w = inst.predicted_winner().unwrap();
        let deciding = |s: &[usize]| reachable(&inst.partial(s)).iter().all(|set| set[0] == w);
        let found = min_deciding_subset(&inst).unwrap();
        let smallest = (0..=n).find(|&size| (0..n).combinations(size).any(|s| deciding(&s)));
        match found {
            Some(s) => {
                prop_assert!(deciding(&s));
                prop_assert_eq!(Some(s.len()), smallest);
            }
            None => prop_assert!(smallest.is_none_or(|x| x > inst.k)),
        }
    }

    #[test]
    fn elicitation_ends_at_the_true_winner(
        (p, m, truth) in election(4, 5),
        seed in any::<u64>(),
    ) {
        prop_assume!(!truth.is_empty());
        let expected = winner(p, &truth, m).unwrap();
        let mut predicted = truth.clone();
        predicted.reverse();
        for policy in [StandardPolicy::FixedOrder, StandardPolicy::RoundRobin, StandardPolicy::PredictedWinnerFirst, StandardPolicy::Random(seed)] {
            let t = simulate_coarse_standard(policy, p, m, &truth, &predicted).unwrap();
            prop_assert_eq!(&t.outcome, &expected);
            prop_assert!(t.queries_used <= truth.len());
            prop_assert_eq!(t.steps.len(), t.queries_used);
        }
        let fine = FixedOrderFinePolicy::interleaved(p, truth.len(), m);
        let t = simulate_fine(&fine, p, m, &truth, TieRule::Lexicographic, DEFAULT_STV_BUDGET).unwrap();
        prop_assert_eq!(t.outcome.tiebreak_winner, expected.tiebreak_winner);
    }
}
