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

//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A ballot does not fit the election it was submitted to.
    #[error("malformed ballot: {0}")]
    MalformedBallot(String),
    /// A ranking ballot was given to Approval, or the reverse.
    #[error("ballot kind does not match protocol {0}")]
    ProtocolMismatch(String),
    /// STV has no single score vector.
    #[error("STV has no score vector; run the elimination rounds instead")]
    StvNotScorable,
    /// The operation is not defined for this protocol.
    #[error("operation not supported for protocol {0}")]
    UnsupportedProtocol(String),
    /// Bad argument combination.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Malformed instance for a reduction or a game.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    /// Election or instance file could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// An exhaustive search would exceed its work budget.
    #[error("search budget exceeded: {required} units needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    /// A strategy has no entry for a reachable (type, observation) pair.
    #[error("strategy of agent {agent} has no ballot for type {ty} at observation {observation}")]
    MissingStrategy {
        agent: usize,
        ty: usize,
        observation: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fails with [`Error::BudgetExceeded`] when `required > budget`.
pub(crate) fn check_budget(required: u128, budget: u128) -> Result<()> {
    if required > budget {
        Err(Error::BudgetExceeded { required, budget })
    } else {
        Ok(())
    }
}
