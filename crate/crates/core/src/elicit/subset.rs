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

//! Smallest subset of predicted ballots that already decides the election.

use itertools::Itertools;

use crate::ballot::Protocol;
use crate::elicit::ElicitationInstance;
use crate::error::{check_budget, Result};
use crate::termination::{brute_force_decided, decided_with_budget, Tally, DEFAULT_STV_BUDGET};

/// Smallest deciding subset of size at most `k`, as ascending voter indices.
/// Sizes are tried in increasing order and subsets of one size in
/// lexicographic order, so the lexicographically least minimum is returned.
pub fn min_deciding_subset(inst: &ElicitationInstance) -> Result<Option<Vec<usize>>> {
    min_deciding_subset_with_budget(inst, DEFAULT_STV_BUDGET)
}

pub fn min_deciding_subset_with_budget(
    inst: &ElicitationInstance,
    stv_budget: u128,
) -> Result<Option<Vec<usize>>> {
    inst.profile()?;
    let n = inst.n();
    if inst.protocol == Protocol::Stv {
        for size in 0..=inst.k {
            for subset in (0..n).combinations(size) {
                if decided_with_budget(&inst.partial(&subset), stv_budget)?.is_some() {
                    return Ok(Some(subset));
                }
            }
        }
        return Ok(None);
    }
    let mut search = Search {
        inst,
        tally: Tally::new(inst.protocol, inst.m),
        chosen: Vec::with_capacity(inst.k),
    };
    for size in 0..=inst.k {
        if search.descend(0, size) {
            return Ok(Some(search.chosen));
        }
    }
    Ok(None)
}

/// Depth-first enumeration of combinations with an incrementally maintained tally.
struct Search<'a> {
    inst: &'a ElicitationInstance,
    tally: Tally,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn descend(&mut self, start: usize, size: usize) -> bool {
        let n = self.inst.n();
        if self.chosen.len() == size {
            return self.tally.decided(n - size).is_some();
        }
        let needed = size - self.chosen.len();
        for v in start..=n - needed {
            let b = &self.inst.predicted[v];
            self.tally.add(b, 1);
            self.chosen.push(v);
            if self.descend(v + 1, size) {
                return true;
            }
            self.chosen.pop();
            self.tally.add(b, -1);
        }
        false
    }
}

/// Exhaustive oracle: checks every subset of size `<= k` with the
/// brute-force decided check. `budget` bounds both the number of subsets
/// and the completions enumerated per subset.
pub fn brute_force_min_deciding_subset(
    inst: &ElicitationInstance,
    budget: u128,
) -> Result<Option<Vec<usize>>> {
    let n = inst.n();
    check_budget(1u128 << n.min(127), budget)?;
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u64..(1u64 << n) {
        let subset: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if subset.len() > inst.k {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => subset.len() < b.len() || (subset.len() == b.len() && subset < *b),
        };
        if better && brute_force_decided(&inst.partial(&subset), budget)?.is_some() {
            best = Some(subset);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballot::Ballot;

    fn approve(c: &[usize], m: usize) -> Ballot {
        Ballot::approval(c.iter().copied(), m).unwrap()
    }

    #[test]
    fn unanimous_plurality_needs_majority() {
        let b = Ballot::ranking(vec![0, 1, 2], 3).unwrap();
        let inst = ElicitationInstance::new(Protocol::Plurality, 3, vec![b; 5], 5).unwrap();
        let s = min_deciding_subset(&inst).unwrap().unwrap();
        assert_eq!(s, vec![0, 1, 2]);
        assert_eq!(brute_force_min_deciding_subset(&inst, 10_000).unwrap(), Some(s));
    }

    #[test]
    fn small_cover_instance() {
        // universe {u1,u2,u3} covered twice, plus two w-only ballots
        let votes = vec![
            approve(&[0, 1, 2, 3], 4),
            approve(&[0, 1, 2, 3], 4),
            approve(&[3], 4),
            approve(&[3], 4),
        ];
        let inst = ElicitationInstance::new(Protocol::Approval, 4, votes, 3).unwrap();
        let s = min_deciding_subset(&inst).unwrap().unwrap();
        assert_eq!(s.len(), 3);
        let oracle = brute_force_min_deciding_subset(&inst, 100_000).unwrap().unwrap();
        assert_eq!(oracle.len(), 3);
        let tight = ElicitationInstance { k: 2, ..inst };
        assert_eq!(min_deciding_subset(&tight).unwrap(), None);
    }

    #[test]
    fn k_larger_than_n_rejected() {
        assert!(ElicitationInstance::new(Protocol::Borda, 2, vec![], 1).is_err());
    }

    #[test]
    fn stv_subsets() {
        let b = Ballot::ranking(vec![0, 1, 2], 3).unwrap();
        let inst = ElicitationInstance::new(Protocol::Stv, 3, vec![b; 3], 3).unwrap();
        assert_eq!(min_deciding_subset(&inst).unwrap(), Some(vec![0, 1]));
    }
}
