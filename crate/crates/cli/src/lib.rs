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

//! Command-line front end for the `vote_elicit` library.
//!
//! [`run`] parses arguments, dispatches to one library operation and
//! returns the exit code together with everything to print. Exit code 0
//! means success, 2 an input error, 3 an exceeded work budget.

mod commands;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use vote_elicit::termination::DEFAULT_STV_BUDGET;
use vote_elicit::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "vote-elicit", version, about = "Vote elicitation toolkit")]
struct Cli {
    /// Cap on brute-force work (completions, subsets, deviations).
    #[arg(long, global = true, default_value_t = DEFAULT_STV_BUDGET)]
    budget: u128,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized drivers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Winner of the known ballots.
    Winner {
        #[arg(long)]
        file: PathBuf,
    },
    /// Whether the known ballots already fix the winner.
    Decided {
        #[arg(long)]
        file: PathBuf,
    },
    /// Whether the unknown ballots can stop a candidate from winning.
    Prevent {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        h: String,
    },
    /// Smallest subset of a predicted profile that decides the election.
    MinElicit {
        #[arg(long)]
        file: PathBuf,
        /// Largest subset size to accept (default: all voters).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Plurality elicitation order with its stopping point.
    PolicyPlurality {
        #[arg(long)]
        file: PathBuf,
    },
    /// Elicit whole ballots under a standard policy.
    Simulate {
        /// Predicted profile; also the true profile unless --true-file is given.
        #[arg(long)]
        file: PathBuf,
        /// predicted-winner-first, round-robin, fixed-order or random.
        #[arg(long)]
        policy: String,
        #[arg(long)]
        true_file: Option<PathBuf>,
    },
    /// Approval elicitation instance from a 3-cover file.
    #[command(name = "gen-3cover-approval")]
    Gen3CoverApproval {
        #[arg(long)]
        file: PathBuf,
    },
    /// Borda elicitation instance from a 3-cover file.
    #[command(name = "gen-3cover-borda")]
    Gen3CoverBorda {
        #[arg(long)]
        file: PathBuf,
    },
    /// STV termination instance from an effective-preference file.
    GenStvEp {
        #[arg(long)]
        file: PathBuf,
    },
    /// Check truthful voting for equilibrium in an example game.
    VerifyBne {
        /// theorem7 or theorem9.
        #[arg(long)]
        game: String,
        /// full, coarse-position or fine.
        #[arg(long, default_value = "full")]
        mechanism: String,
    },
    /// Whether a fine policy's queries to a voter depend only on that voter.
    CheckNondivulging {
        /// theorem9, interleaved or random.
        #[arg(long, default_value = "theorem9")]
        policy: String,
        #[arg(long, default_value = "approval")]
        protocol: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
    },
    /// Exhaustive reference solvers.
    Oracle {
        /// prevent, min-elicit, 3cover or effective-preference.
        #[arg(long)]
        problem: String,
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Queries needed on random profiles under each standard policy.
    ExperimentSavings {
        #[arg(long, default_value = "plurality")]
        protocol: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: u64,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A command failure: either a library error or a problem with the input files.
#[derive(Debug)]
pub(crate) enum CliError {
    Lib(Error),
    Input(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

/// Text and JSON renderings of one report.
pub(crate) struct Report {
    pub text: String,
    pub json: serde_json::Value,
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if code == EXIT_OK {
                Output { code, stdout: rendered, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: rendered }
            };
        }
    };
    match commands::dispatch(&cli) {
        Ok(report) => {
            let stdout = if cli.json {
                let mut s = serde_json::to_string_pretty(&report.json).expect("JSON values serialize");
                s.push('\n');
                s
            } else {
                report.text
            };
            Output { code: EXIT_OK, stdout, stderr: String::new() }
        }
        Err(CliError::Lib(e)) => {
            let code = if e.is_budget() { EXIT_BUDGET } else { EXIT_INPUT };
            Output { code, stdout: String::new(), stderr: format!("error: {e}\n") }
        }
        Err(CliError::Input(msg)) => Output {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}
