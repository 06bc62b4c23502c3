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

//! Explicit elicitation trees for tiny elections.
//!
//! Policies normally stay intensional; these trees are materialized only to
//! check validity and the nondivulging property, under a node-count guard.

use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::ballot::{all_ballots, Ballot, Protocol};
use crate::elicit::coarse::determination;
use crate::elicit::{CoarsePolicy, FineKnowledge, FinePolicy, FineQuery, FineResponse, TieRule};
use crate::error::{check_budget, Error, Result};
use crate::profile::PartialProfile;
use crate::scoring::winner;
use crate::termination::decided;

/// Default cap on materialized tree nodes.
pub const DEFAULT_NODE_GUARD: usize = 1_000_000;

/// Coarse tree: each internal node queries one agent's whole ballot and has
/// one child per possible ballot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoarseTree {
    Leaf,
    Query {
        agent: usize,
        children: Vec<(Ballot, CoarseTree)>,
    },
}

impl CoarseTree {
    pub fn node_count(&self) -> usize {
        match self {
            CoarseTree::Leaf => 1,
            CoarseTree::Query { children, .. } => {
                1 + children.iter().map(|(_, c)| c.node_count()).sum::<usize>()
            }
        }
    }
}

/// Fine tree: each internal node partitions the agent's consistent ballots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FineTree {
    Leaf,
    Node {
        agent: usize,
        /// Ballots of `agent` consistent with its answers so far.
        consistent: Vec<Ballot>,
        /// The query, as a partition of `consistent`.
        partition: Vec<Vec<Ballot>>,
        /// Human-readable form of the query, when it has one.
        query: Option<FineQuery>,
        children: Vec<FineTree>,
    },
}

impl FineTree {
    pub fn node_count(&self) -> usize {
        match self {
            FineTree::Leaf => 1,
            FineTree::Node { children, .. } => 1 + children.iter().map(FineTree::node_count).sum::<usize>(),
        }
    }
}

fn check_guard(count: usize, guard: usize) -> Result<()> {
    check_budget(count as u128, guard as u128)
}

/// True iff no agent repeats on a path, every internal node has exactly
/// one child per possible ballot, and every leaf fixes the tie-break winner.
pub fn validate_coarse_tree(
    tree: &CoarseTree,
    protocol: Protocol,
    m: usize,
    n: usize,
    guard: usize,
) -> Result<bool> {
    check_guard(tree.node_count(), guard)?;
    let space = all_ballots(protocol, m);
    let mut path = Vec::new();
    coarse_valid(tree, protocol, m, n, &space, &mut path)
}

fn coarse_valid(
    tree: &CoarseTree,
    protocol: Protocol,
    m: usize,
    n: usize,
    space: &[Ballot],
    path: &mut Vec<(usize, Ballot)>,
) -> Result<bool> {
    match tree {
        CoarseTree::Leaf => {
            let known = path.iter().map(|(_, b)| b.clone()).collect();
            let partial = PartialProfile::new(protocol, m, known, n - path.len())?;
            Ok(decided(&partial)?.is_some())
        }
        CoarseTree::Query { agent, children } => {
            if *agent >= n || path.iter().any(|(a, _)| a == agent) {
                return Ok(false);
            }
            let mut labels: Vec<&Ballot> = children.iter().map(|(b, _)| b).collect();
            labels.sort();
            if labels.len() != space.len() || labels.iter().zip(space.iter().sorted()).any(|(a, b)| *a != b) {
                return Ok(false);
            }
            for (ballot, child) in children {
                path.push((*agent, ballot.clone()));
                let ok = coarse_valid(child, protocol, m, n, space, path)?;
                path.pop();
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Expands a coarse policy into its explicit tree.
pub fn materialize_coarse_tree(
    policy: &dyn CoarsePolicy,
    protocol: Protocol,
    m: usize,
    n: usize,
    tie_rule: TieRule,
    guard: usize,
) -> Result<CoarseTree> {
    let space = all_ballots(protocol, m);
    let mut count = 0;
    let mut asked = Vec::new();
    expand_coarse(policy, protocol, m, n, tie_rule, guard, &space, &mut asked, &mut count)
}

#[allow(clippy::too_many_arguments)]
fn expand_coarse(
    policy: &dyn CoarsePolicy,
    protocol: Protocol,
    m: usize,
    n: usize,
    tie_rule: TieRule,
    guard: usize,
    space: &[Ballot],
    asked: &mut Vec<(usize, Ballot)>,
    count: &mut usize,
) -> Result<CoarseTree> {
    *count += 1;
    check_guard(*count, guard)?;
    let known = asked.iter().map(|(_, b)| b.clone()).collect();
    let partial = PartialProfile::new(protocol, m, known, n - asked.len())?;
    if determination(&partial, tie_rule, crate::termination::DEFAULT_STV_BUDGET)?.is_some() {
        return Ok(CoarseTree::Leaf);
    }
    let Some(agent) = policy.next_voter(asked, n) else {
        return Ok(CoarseTree::Leaf);
    };
    let mut children = Vec::with_capacity(space.len());
    for b in space {
        asked.push((agent, b.clone()));
        let child = expand_coarse(policy, protocol, m, n, tie_rule, guard, space, asked, count)?;
        asked.pop();
        children.push((b.clone(), child));
    }
    Ok(CoarseTree::Query { agent, children })
}

/// Structural rules of a fine tree plus validity: at every leaf the
/// consistent ballots fix the outcome under `tie_rule`. `budget` caps the
/// completions enumerated per leaf.
pub fn validate_fine_tree(
    tree: &FineTree,
    protocol: Protocol,
    m: usize,
    n: usize,
    tie_rule: TieRule,
    guard: usize,
    budget: u128,
) -> Result<bool> {
    check_guard(tree.node_count(), guard)?;
    let mut sets: Vec<Vec<Ballot>> = vec![all_ballots(protocol, m); n];
    fine_valid(tree, protocol, m, tie_rule, budget, &mut sets)
}

fn sorted(v: &[Ballot]) -> Vec<Ballot> {
    let mut s = v.to_vec();
    s.sort();
    s
}

fn fine_valid(
    tree: &FineTree,
    protocol: Protocol,
    m: usize,
    tie_rule: TieRule,
    budget: u128,
    sets: &mut Vec<Vec<Ballot>>,
) -> Result<bool> {
    match tree {
        FineTree::Leaf => {
            let count = sets
                .iter()
                .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
                .unwrap_or(u128::MAX);
            check_budget(count, budget)?;
            let profiles: Box<dyn Iterator<Item = Vec<Ballot>>> = if sets.is_empty() {
                Box::new(std::iter::once(Vec::new()))
            } else {
                Box::new(sets.iter().cloned().multi_cartesian_product())
            };
            let mut seen = None;
            for profile in profiles {
                let o = winner(protocol, &profile, m)?;
                let key = match tie_rule {
                    TieRule::Lexicographic => vec![o.tiebreak_winner],
                    TieRule::Random => o.winner_set,
                };
                match &seen {
                    None => seen = Some(key),
                    Some(k) if *k != key => return Ok(false),
                    Some(_) => {}
                }
            }
            Ok(true)
        }
        FineTree::Node {
            agent,
            consistent,
            partition,
            children,
            ..
        } => {
            if *agent >= sets.len() || sorted(consistent) != sorted(&sets[*agent]) {
                return Ok(false);
            }
            if partition.len() < 2 || partition.len() != children.len() || partition.iter().any(Vec::is_empty) {
                return Ok(false);
            }
            let union: Vec<Ballot> = partition.iter().flatten().cloned().collect();
            if union.len() != consistent.len() || sorted(&union) != sorted(consistent) {
                return Ok(false);
            }
            let saved = std::mem::take(&mut sets[*agent]);
            for (block, child) in partition.iter().zip(children) {
                sets[*agent] = block.clone();
                if !fine_valid(child, protocol, m, tie_rule, budget, sets)? {
                    sets[*agent] = saved;
                    return Ok(false);
                }
            }
            sets[*agent] = saved;
            Ok(true)
        }
    }
}

/// Expands a fine policy into its explicit tree. A query that cannot split
/// the agent's consistent ballots is an error.
pub fn materialize_fine_tree(
    policy: &dyn FinePolicy,
    protocol: Protocol,
    m: usize,
    n: usize,
    tie_rule: TieRule,
    guard: usize,
    budget: u128,
) -> Result<FineTree> {
    let mut count = 0;
    let knowledge = FineKnowledge::new(protocol, m, n);
    let mut history = Vec::new();
    expand_fine(policy, &knowledge, &mut history, tie_rule, guard, budget, &mut count)
}

fn expand_fine(
    policy: &dyn FinePolicy,
    knowledge: &FineKnowledge,
    history: &mut Vec<(FineQuery, FineResponse)>,
    tie_rule: TieRule,
    guard: usize,
    budget: u128,
    count: &mut usize,
) -> Result<FineTree> {
    *count += 1;
    check_guard(*count, guard)?;
    if knowledge.determined(tie_rule, budget).is_some() {
        return Ok(FineTree::Leaf);
    }
    let Some(q) = policy.next_query(knowledge, history) else {
        return Ok(FineTree::Leaf);
    };
    let agent = q.voter();
    let consistent = knowledge.consistent_ballots(agent);
    let mut responses: Vec<FineResponse> = Vec::new();
    let mut partition: Vec<Vec<Ballot>> = Vec::new();
    for b in &consistent {
        let r = knowledge.answer(b, &q)?;
        match responses.iter().position(|x| *x == r) {
            Some(i) => partition[i].push(b.clone()),
            None => {
                responses.push(r);
                partition.push(vec![b.clone()]);
            }
        }
    }
    if partition.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "query {q:?} does not split the consistent ballots"
        )));
    }
    let mut children = Vec::with_capacity(partition.len());
    for &r in &responses {
        let mut next = knowledge.clone();
        next.apply(&q, r)?;
        history.push((q, r));
        let child = expand_fine(policy, &next, history, tie_rule, guard, budget, count)?;
        history.pop();
        children.push(child);
    }
    Ok(FineTree::Node {
        agent,
        consistent,
        partition,
        query: Some(q),
        children,
    })
}

fn canonical(partition: &[Vec<Ballot>]) -> Vec<Vec<Ballot>> {
    let mut blocks: Vec<Vec<Ballot>> = partition.iter().map(|b| sorted(b)).collect();
    blocks.sort();
    blocks
}

type OwnHistory = Vec<(Vec<Vec<Ballot>>, Vec<Ballot>)>;

/// True iff, for every agent, the next query put to it is a function of
/// its own earlier queries and answers only.
pub fn is_nondivulging(tree: &FineTree, guard: usize) -> Result<bool> {
    check_guard(tree.node_count(), guard)?;
    let mut seen: HashMap<(usize, OwnHistory), Vec<Vec<Ballot>>> = HashMap::new();
    let mut histories: HashMap<usize, OwnHistory> = HashMap::new();
    Ok(walk_nondivulging(tree, &mut histories, &mut seen))
}

fn walk_nondivulging(
    tree: &FineTree,
    histories: &mut HashMap<usize, OwnHistory>,
    seen: &mut HashMap<(usize, OwnHistory), Vec<Vec<Ballot>>>,
) -> bool {
    let FineTree::Node {
        agent,
        partition,
        children,
        ..
    } = tree
    else {
        return true;
    };
    let query = canonical(partition);
    let own = histories.get(agent).cloned().unwrap_or_default();
    match seen.get(&(*agent, own.clone())) {
        Some(previous) if *previous != query => return false,
        Some(_) => {}
        None => {
            seen.insert((*agent, own), query.clone());
        }
    }
    for (block, child) in partition.iter().zip(children) {
        histories
            .entry(*agent)
            .or_default()
            .push((query.clone(), sorted(block)));
        let ok = walk_nondivulging(child, histories, seen);
        histories.get_mut(agent).expect("pushed above").pop();
        if !ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elicit::{FixedOrderFinePolicy, OrderPolicy};

    fn two_of_three_tree() -> CoarseTree {
        // query voter 0, then 1; stop if they agree, otherwise ask voter 2
        let space = all_ballots(Protocol::Plurality, 2);
        let third = || CoarseTree::Query {
            agent: 2,
            children: space.iter().map(|b| (b.clone(), CoarseTree::Leaf)).collect(),
        };
        CoarseTree::Query {
            agent: 0,
            children: space
                .iter()
                .map(|first| {
                    let second = CoarseTree::Query {
                        agent: 1,
                        children: space
                            .iter()
                            .map(|b| (b.clone(), if b == first { CoarseTree::Leaf } else { third() }))
                            .collect(),
                    };
                    (first.clone(), second)
                })
                .collect(),
        }
    }

    #[test]
    fn majority_tree_is_valid() {
        assert!(validate_coarse_tree(&two_of_three_tree(), Protocol::Plurality, 2, 3, 1000).unwrap());
    }

    #[test]
    fn empty_tree_is_invalid() {
        assert!(!validate_coarse_tree(&CoarseTree::Leaf, Protocol::Plurality, 2, 2, 10).unwrap());
        assert!(validate_coarse_tree(&CoarseTree::Leaf, Protocol::Plurality, 1, 2, 10).unwrap());
    }

    #[test]
    fn repeated_agent_is_invalid() {
        let space = all_ballots(Protocol::Plurality, 2);
        let inner = CoarseTree::Query {
            agent: 0,
            children: space.iter().map(|b| (b.clone(), CoarseTree::Leaf)).collect(),
        };
        let tree = CoarseTree::Query {
            agent: 0,
            children: space.iter().map(|b| (b.clone(), inner.clone())).collect(),
        };
        assert!(!validate_coarse_tree(&tree, Protocol::Plurality, 2, 1, 100).unwrap());
    }

    #[test]
    fn missing_child_is_invalid() {
        let b = all_ballots(Protocol::Plurality, 2)[0].clone();
        let tree = CoarseTree::Query {
            agent: 0,
            children: vec![(b, CoarseTree::Leaf)],
        };
        assert!(!validate_coarse_tree(&tree, Protocol::Plurality, 2, 1, 100).unwrap());
    }

    #[test]
    fn guard_trips() {
        let err = validate_coarse_tree(&two_of_three_tree(), Protocol::Plurality, 2, 3, 3).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn materialized_order_policy_is_valid() {
        for proto in [Protocol::Plurality, Protocol::Borda, Protocol::Approval] {
            let policy = OrderPolicy { order: vec![2, 0, 1] };
            let tree =
                materialize_coarse_tree(&policy, proto, 2, 3, TieRule::Lexicographic, 10_000).unwrap();
            assert!(validate_coarse_tree(&tree, proto, 2, 3, 10_000).unwrap());
        }
    }

    #[test]
    fn fixed_order_fine_tree_is_valid_and_nondivulging() {
        for proto in [Protocol::Approval, Protocol::Borda] {
            let policy = FixedOrderFinePolicy::interleaved(proto, 2, 3);
            let tree = materialize_fine_tree(&policy, proto, 3, 2, TieRule::Random, 100_000, 1 << 20)
                .unwrap();
            assert!(validate_fine_tree(&tree, proto, 3, 2, TieRule::Random, 100_000, 1 << 20).unwrap());
            assert!(is_nondivulging(&tree, 100_000).unwrap());
        }
    }

    #[test]
    fn single_voter_tree_is_nondivulging() {
        let policy = FixedOrderFinePolicy::random(Protocol::Approval, 1, 3, 9);
        let tree =
            materialize_fine_tree(&policy, Protocol::Approval, 3, 1, TieRule::Random, 10_000, 1 << 10)
                .unwrap();
        assert!(is_nondivulging(&tree, 10_000).unwrap());
    }

    #[test]
    fn broken_partition_is_invalid() {
        let all = all_ballots(Protocol::Approval, 1);
        let tree = FineTree::Node {
            agent: 0,
            consistent: all.clone(),
            partition: vec![all.clone()],
            query: None,
            children: vec![FineTree::Leaf],
        };
        assert!(!validate_fine_tree(&tree, Protocol::Approval, 1, 1, TieRule::Random, 10, 10).unwrap());
    }
}
