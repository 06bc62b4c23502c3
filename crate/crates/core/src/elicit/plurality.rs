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

//! Polynomial elicitation order for Plurality under perfect suspicions.

use serde::{Deserialize, Serialize};

use crate::ballot::Protocol;
use crate::elicit::{order_for, ElicitationInstance, StandardPolicy};
use crate::error::{Error, Result};
use crate::termination::Tally;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PluralityPlan {
    /// Every voter, in elicitation order.
    pub order: Vec<usize>,
    /// Length of the shortest prefix of `order` that decides the election.
    pub stop_index: usize,
}

impl PluralityPlan {
    pub fn deciding_prefix(&self) -> &[usize] {
        &self.order[..self.stop_index]
    }
}

/// Predicted winner's supporters first, then one supporter per non-winning
/// candidate in ascending index, cycling while any remain.
pub fn plurality_elicit_order(inst: &ElicitationInstance) -> Result<PluralityPlan> {
    if inst.protocol != Protocol::Plurality {
        return Err(Error::UnsupportedProtocol(inst.protocol.to_string()));
    }
    let order = order_for(
        StandardPolicy::PredictedWinnerFirst,
        inst.protocol,
        inst.m,
        &inst.predicted,
    )?;
    let n = inst.n();
    let mut tally = Tally::new(inst.protocol, inst.m);
    let mut stop_index = n;
    for p in 0..=n {
        if p > 0 {
            tally.add(&inst.predicted[order[p - 1]], 1);
        }
        if tally.decided(n - p).is_some() {
            stop_index = p;
            break;
        }
    }
    Ok(PluralityPlan { order, stop_index })
}
