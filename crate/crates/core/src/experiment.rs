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

//! Query-count experiments on random profiles with perfect predictions.

use num_rational::BigRational;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ballot::{ApprovalBallot, Ballot, Protocol, RankingBallot};
use crate::elicit::{order_for, simulate_coarse, OrderPolicy, StandardPolicy, TieRule};
use crate::error::{Error, Result};

/// One ballot drawn uniformly from the ballot space.
pub fn random_ballot<R: Rng + ?Sized>(protocol: Protocol, m: usize, rng: &mut R) -> Ballot {
    if protocol.uses_approval() {
        let approved = (0..m).filter(|_| rng.gen_bool(0.5));
        Ballot::Approval(ApprovalBallot::new(approved, m).expect("indices below m"))
    } else {
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        Ballot::Ranking(RankingBallot::new(order, m).expect("a permutation"))
    }
}

/// `n` i.i.d. uniform ballots.
pub fn random_profile<R: Rng + ?Sized>(protocol: Protocol, m: usize, n: usize, rng: &mut R) -> Vec<Ballot> {
    (0..n).map(|_| random_ballot(protocol, m, rng)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyStats {
    pub policy: String,
    pub trials: u64,
    pub total_queries: u64,
    pub min_queries: usize,
    pub max_queries: usize,
}

impl PolicyStats {
    pub fn mean(&self) -> BigRational {
        BigRational::new(BigInt::from(self.total_queries), BigInt::from(self.trials.max(1)))
    }

    /// Mean queries rounded half-up to three decimals, computed exactly.
    pub fn mean_decimal(&self) -> String {
        fixed3(self.total_queries, self.trials.max(1))
    }

    /// Mean fraction of the electorate left unqueried, three decimals.
    pub fn savings_decimal(&self, n: usize) -> String {
        let denom = self.trials.max(1) * n.max(1) as u64;
        let saved = (self.trials * n as u64).saturating_sub(self.total_queries);
        fixed3(saved, denom)
    }
}

fn fixed3(num: u64, den: u64) -> String {
    let scaled = (u128::from(num) * 1000 * 2 + u128::from(den)) / (2 * u128::from(den));
    format!("{}.{:03}", scaled / 1000, scaled % 1000)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavingsReport {
    pub protocol: Protocol,
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub policies: Vec<PolicyStats>,
}

/// The policies compared by [`experiment_savings`]; `random` is reseeded
/// per trial from the experiment seed.
pub fn savings_policies(seed: u64, trial: u64) -> [StandardPolicy; 4] {
    [
        StandardPolicy::PredictedWinnerFirst,
        StandardPolicy::RoundRobin,
        StandardPolicy::FixedOrder,
        StandardPolicy::Random(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(trial)),
    ]
}

/// Draws `trials` uniform profiles and elicits each under every standard
/// policy, with the prediction equal to the true profile.
pub fn experiment_savings(
    protocol: Protocol,
    n: usize,
    m: usize,
    trials: u64,
    seed: u64,
    budget: u128,
) -> Result<SavingsReport> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("need at least one voter and one candidate".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats: Vec<PolicyStats> = savings_policies(seed, 0)
        .iter()
        .map(|p| PolicyStats {
            policy: p.name().to_string(),
            trials: 0,
            total_queries: 0,
            min_queries: usize::MAX,
            max_queries: 0,
        })
        .collect();
    for trial in 0..trials {
        let profile = random_profile(protocol, m, n, &mut rng);
        for (s, policy) in stats.iter_mut().zip(savings_policies(seed, trial)) {
            let order = order_for(policy, protocol, m, &profile)?;
            let t = simulate_coarse(
                &OrderPolicy { order },
                protocol,
                m,
                &profile,
                TieRule::Lexicographic,
                budget,
            )?;
            s.trials += 1;
            s.total_queries += t.queries_used as u64;
            s.min_queries = s.min_queries.min(t.queries_used);
            s.max_queries = s.max_queries.max(t.queries_used);
        }
    }
    if trials == 0 {
        stats.iter_mut().for_each(|s| s.min_queries = 0);
    }
    Ok(SavingsReport {
        protocol,
        n,
        m,
        trials,
        seed,
        policies: stats,
    })
}
