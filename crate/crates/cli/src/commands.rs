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

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use vote_elicit::elicit::{
    is_nondivulging, materialize_fine_tree, min_deciding_subset_with_budget, order_for,
    plurality_elicit_order, simulate_coarse, brute_force_min_deciding_subset,
    ElicitationInstance, FinePolicy, FineQuery, FixedOrderFinePolicy, OrderPolicy,
    StandardPolicy, TieRule, DEFAULT_NODE_GUARD,
};
use vote_elicit::experiment::experiment_savings;
use vote_elicit::format::{parse_election, parse_ep, parse_three_cover, serialize_election};
use vote_elicit::reductions::{
    effective_preference_witness, gen_approval_elicitation, gen_borda_elicitation,
    gen_stv_not_done, solve_3cover,
};
use vote_elicit::strategy::{
    example_game, example_payoff_table, is_bne_with_budget, theorem9_game, truthful_profile,
    Deviation, ExampleGame, Mechanism, MechanismKind, Observation, VotingGame,
};
use vote_elicit::termination::{brute_force_prevent, can_prevent_win_with_budget, decided_with_budget, PreventionResult};
use vote_elicit::{winner, Ballot, Candidate, PartialProfile, Protocol};

use crate::{Cli, CliError, Command, Report};

type CmdResult = Result<Report, CliError>;

pub(crate) fn dispatch(cli: &Cli) -> CmdResult {
    let budget = cli.budget;
    match &cli.command {
        Command::Winner { file } => cmd_winner(&load_election(file)?),
        Command::Decided { file } => cmd_decided(&load_election(file)?, budget),
        Command::Prevent { file, h } => {
            let p = load_election(file)?;
            let h = candidate(&p, h)?;
            let r = can_prevent_win_with_budget(&p, h, budget)?;
            Ok(prevention_report(&p, h, &r))
        }
        Command::MinElicit { file, k } => {
            let (p, inst) = load_instance(file, *k)?;
            let subset = min_deciding_subset_with_budget(&inst, budget)?;
            subset_report(&p, &inst, subset)
        }
        Command::PolicyPlurality { file } => cmd_policy_plurality(file),
        Command::Simulate { file, policy, true_file } => {
            cmd_simulate(file, policy, true_file.as_deref(), cli.seed, budget)
        }
        Command::Gen3CoverApproval { file } => {
            let tc = parse_three_cover(&read(file)?).map_err(|e| in_file(file, e))?;
            generated_instance(gen_approval_elicitation(&tc)?, tc.q(), tc.r())
        }
        Command::Gen3CoverBorda { file } => {
            let tc = parse_three_cover(&read(file)?).map_err(|e| in_file(file, e))?;
            generated_instance(gen_borda_elicitation(&tc)?, tc.q(), tc.r())
        }
        Command::GenStvEp { file } => {
            let ep = parse_ep(&read(file)?).map_err(|e| in_file(file, e))?;
            let (p, h) = gen_stv_not_done(&ep)?;
            let mut text = format!("# protected candidate: {}\n", p.name(h));
            text.push_str(&serialize_election(&p));
            Ok(Report {
                json: json!({ "h": p.name(h), "election": text.clone() }),
                text,
            })
        }
        Command::VerifyBne { game, mechanism } => cmd_verify_bne(game, mechanism, budget),
        Command::CheckNondivulging { policy, protocol, n, m } => {
            cmd_nondivulging(policy, protocol, *n, *m, cli.seed, budget)
        }
        Command::Oracle { problem, file, h, k } => cmd_oracle(problem, file, h.as_deref(), *k, budget),
        Command::ExperimentSavings { protocol, n, m, trials } => {
            let protocol: Protocol = protocol.parse()?;
            let r = experiment_savings(protocol, *n, *m, *trials, cli.seed, budget)?;
            let mut text = format!(
                "protocol: {}\nvoters: {}\ncandidates: {}\ntrials: {}\nseed: {}\n",
                r.protocol, r.n, r.m, r.trials, r.seed
            );
            writeln!(text, "{:<24}{:>10}{:>6}{:>6}{:>8}", "policy", "mean", "min", "max", "saved").unwrap();
            let mut rows = Vec::new();
            for s in &r.policies {
                writeln!(
                    text,
                    "{:<24}{:>10}{:>6}{:>6}{:>8}",
                    s.policy,
                    s.mean_decimal(),
                    s.min_queries,
                    s.max_queries,
                    s.savings_decimal(r.n)
                )
                .unwrap();
                rows.push(json!({
                    "policy": s.policy,
                    "mean": s.mean().to_string(),
                    "mean_decimal": s.mean_decimal(),
                    "min": s.min_queries,
                    "max": s.max_queries,
                    "saved_fraction": s.savings_decimal(r.n),
                }));
            }
            Ok(Report {
                text,
                json: json!({
                    "protocol": r.protocol.name(),
                    "n": r.n,
                    "m": r.m,
                    "trials": r.trials,
                    "seed": r.seed,
                    "policies": rows,
                }),
            })
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn in_file(path: &Path, e: vote_elicit::Error) -> CliError {
    if e.is_budget() {
        CliError::Lib(e)
    } else {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

fn load_election(path: &Path) -> Result<PartialProfile, CliError> {
    parse_election(&read(path)?).map_err(|e| in_file(path, e))
}

/// A complete predicted profile as an elicitation instance with budget `k`.
fn load_instance(path: &Path, k: Option<usize>) -> Result<(PartialProfile, ElicitationInstance), CliError> {
    let p = load_election(path)?;
    if p.unknown_count != 0 {
        return Err(CliError::Input(format!(
            "{}: expected a complete predicted profile, found `unknown: {}`",
            path.display(),
            p.unknown_count
        )));
    }
    let k = k.unwrap_or(p.known.len());
    let inst = ElicitationInstance::with_names(p.protocol, p.names.clone(), p.known.clone(), k)?;
    Ok((p, inst))
}

fn candidate(p: &PartialProfile, name: &str) -> Result<Candidate, CliError> {
    p.candidate_index(name)
        .ok_or_else(|| CliError::Input(format!("unknown candidate `{name}`")))
}

fn voter(p: &PartialProfile, i: usize) -> String {
    p.voter_ids
        .as_ref()
        .map(|ids| ids[i].clone())
        .unwrap_or_else(|| format!("v{}", i + 1))
}

fn voters(p: &PartialProfile, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| voter(p, v)).collect()
}

fn names(p: &PartialProfile, cs: &[Candidate]) -> Vec<String> {
    cs.iter().map(|&c| p.name(c).to_string()).collect()
}

fn cmd_winner(p: &PartialProfile) -> CmdResult {
    let out = winner(p.protocol, &p.known, p.m)?;
    let mut text = format!(
        "winner: {} (set: {})\n",
        p.name(out.tiebreak_winner),
        p.format_set(&out.winner_set)
    );
    let mut scores = Value::Null;
    let mut eliminated = Value::Null;
    if let Some(s) = &out.scores {
        let parts: Vec<String> = s
            .scores
            .iter()
            .enumerate()
            .map(|(c, v)| format!("{}={v}", p.name(c)))
            .collect();
        writeln!(text, "scores: {}", parts.join(" ")).unwrap();
        scores = Value::Array(
            s.scores
                .iter()
                .enumerate()
                .map(|(c, v)| json!({ "candidate": p.name(c), "score": v }))
                .collect(),
        );
    }
    if let Some(trace) = &out.stv_trace {
        let order = names(p, &trace.elimination_order());
        writeln!(text, "eliminated: {}", order.join(" ")).unwrap();
        eliminated = json!(order);
    }
    if p.unknown_count > 0 {
        writeln!(text, "unknown ballots not counted: {}", p.unknown_count).unwrap();
    }
    Ok(Report {
        text,
        json: json!({
            "protocol": p.protocol.name(),
            "winner": p.name(out.tiebreak_winner),
            "winner_set": names(p, &out.winner_set),
            "scores": scores,
            "eliminated": eliminated,
            "known": p.known.len(),
            "unknown": p.unknown_count,
        }),
    })
}

fn cmd_decided(p: &PartialProfile, budget: u128) -> CmdResult {
    let d = decided_with_budget(p, budget)?;
    let text = match d {
        Some(w) => format!("decided: {}\n", p.name(w)),
        None => "decided: no\n".to_string(),
    };
    Ok(Report {
        text,
        json: json!({
            "decided": d.is_some(),
            "winner": d.map(|w| p.name(w).to_string()),
            "known": p.known.len(),
            "unknown": p.unknown_count,
        }),
    })
}

fn prevention_report(p: &PartialProfile, h: Candidate, r: &PreventionResult) -> Report {
    let mut text = format!("candidate: {}\npreventable: {}\n", p.name(h), r.preventable);
    let witness: Option<Vec<String>> = r
        .witness
        .as_ref()
        .map(|w| w.iter().map(|b| p.format_ballot(b)).collect());
    if let Some(c) = r.challenger {
        writeln!(text, "challenger: {}", p.name(c)).unwrap();
    }
    if let Some(w) = &witness {
        writeln!(text, "witness: {}", if w.is_empty() { "(none needed)".to_string() } else { w.join(" | ") }).unwrap();
    }
    Report {
        text,
        json: json!({
            "candidate": p.name(h),
            "preventable": r.preventable,
            "challenger": r.challenger.map(|c| p.name(c).to_string()),
            "witness": witness,
        }),
    }
}

fn subset_report(p: &PartialProfile, inst: &ElicitationInstance, subset: Option<Vec<usize>>) -> CmdResult {
    let w = inst.predicted_winner()?;
    let mut text = format!("winner: {}\n", p.name(w));
    match &subset {
        Some(s) => writeln!(
            text,
            "deciding subset: {} (size {})",
            voters(p, s).join(" "),
            s.len()
        )
        .unwrap(),
        None => writeln!(text, "no deciding subset of size <= {}", inst.k).unwrap(),
    }
    Ok(Report {
        text,
        json: json!({
            "winner": p.name(w),
            "k": inst.k,
            "subset": subset.as_ref().map(|s| voters(p, s)),
            "size": subset.as_ref().map(Vec::len),
        }),
    })
}

fn cmd_policy_plurality(file: &Path) -> CmdResult {
    let (p, inst) = load_instance(file, None)?;
    let plan = plurality_elicit_order(&inst)?;
    let order = voters(&p, &plan.order);
    let prefix = &order[..plan.stop_index];
    let text = format!(
        "order: {}\nstop index: {}\ndeciding prefix: {}\n",
        order.join(" "),
        plan.stop_index,
        prefix.join(" ")
    );
    Ok(Report {
        text,
        json: json!({ "order": order, "stop_index": plan.stop_index, "prefix": prefix }),
    })
}

fn cmd_simulate(file: &Path, policy: &str, true_file: Option<&Path>, seed: u64, budget: u128) -> CmdResult {
    let predicted = load_election(file)?;
    let truth = match true_file {
        Some(f) => load_election(f)?,
        None => predicted.clone(),
    };
    if predicted.unknown_count != 0 || truth.unknown_count != 0 {
        return Err(CliError::Input("simulate expects complete profiles".into()));
    }
    if truth.protocol != predicted.protocol || truth.names != predicted.names || truth.n() != predicted.n() {
        return Err(CliError::Input(
            "true and predicted profiles differ in protocol, candidates or size".into(),
        ));
    }
    let policy = StandardPolicy::parse(policy, seed)?;
    let (protocol, m) = (predicted.protocol, predicted.m);
    let order = order_for(policy, protocol, m, &predicted.known)?;
    let t = simulate_coarse(&OrderPolicy { order }, protocol, m, &truth.known, TieRule::Lexicographic, budget)?;
    let mut text = format!("policy: {policy}\n");
    let mut steps = Vec::new();
    for (i, s) in t.steps.iter().enumerate() {
        let ballot = truth.format_ballot(&truth.known[s.voter]);
        writeln!(text, "query {}: {} -> {}", i + 1, voter(&truth, s.voter), ballot).unwrap();
        steps.push(json!({ "voter": voter(&truth, s.voter), "ballot": ballot }));
    }
    writeln!(text, "queries used: {} of {}", t.queries_used, truth.n()).unwrap();
    writeln!(
        text,
        "winner: {} (set: {})",
        truth.name(t.outcome.tiebreak_winner),
        truth.format_set(&t.outcome.winner_set)
    )
    .unwrap();
    Ok(Report {
        text,
        json: json!({
            "policy": policy.name(),
            "steps": steps,
            "queries_used": t.queries_used,
            "n": truth.n(),
            "terminated_early": t.terminated_early,
            "winner": truth.name(t.outcome.tiebreak_winner),
            "winner_set": names(&truth, &t.outcome.winner_set),
        }),
    })
}

fn generated_instance(inst: ElicitationInstance, q: usize, r: usize) -> CmdResult {
    let p = inst.profile()?;
    let tagged = inst.tagged_candidate.map(|w| p.name(w).to_string());
    let mut text = format!("# generated from a 3-cover instance with q = {q}, r = {r}\n# k: {}\n", inst.k);
    if let Some(w) = &tagged {
        writeln!(text, "# tagged candidate: {w}").unwrap();
    }
    text.push_str(&serialize_election(&p));
    Ok(Report {
        json: json!({ "q": q, "r": r, "k": inst.k, "tagged": tagged, "n": p.n(), "m": p.m, "election": text.clone() }),
        text,
    })
}

fn format_set(game: &VotingGame, b: &Ballot) -> String {
    match b {
        Ballot::Approval(a) => {
            let set: Vec<&str> = a.approved().iter().map(|&c| game.candidates[c].as_str()).collect();
            format!("{{{}}}", set.join(","))
        }
        Ballot::Ranking(r) => r
            .order()
            .iter()
            .map(|&c| game.candidates[c].as_str())
            .collect::<Vec<_>>()
            .join(">"),
    }
}

fn query_label(game: &VotingGame, q: &FineQuery) -> String {
    match q {
        FineQuery::ApproveCandidate { voter, candidate } => {
            format!("Q({},{})", game.agents[*voter], game.candidates[*candidate])
        }
        FineQuery::NextPreferred { voter } => format!("Q({},next)", game.agents[*voter]),
    }
}

fn ordinal(k: usize) -> String {
    match k {
        1 => "first".into(),
        2 => "second".into(),
        3 => "third".into(),
        4 => "fourth".into(),
        5 => "fifth".into(),
        _ => format!("{k}th"),
    }
}

/// Plain-words description of a deviation at its first departure.
fn describe_deviation(game: &VotingGame, d: &Deviation) -> String {
    let agent = &game.agents[d.agent];
    let ty = if game.types[d.agent].len() > 1 {
        format!(" (type {})", game.types[d.agent][d.ty].name)
    } else {
        String::new()
    };
    let act = |b: &Ballot| match b {
        Ballot::Approval(_) => format!("approves {}", format_set(game, b)),
        Ballot::Ranking(_) => format!("votes {}", format_set(game, b)),
    };
    match &d.observation {
        Observation::Full => format!("{agent}{ty} {}", act(&d.ballot)),
        Observation::Position(k) => format!("{agent}{ty} {} when queried {}", act(&d.ballot), ordinal(k + 1)),
        Observation::Queries(qs) => {
            let current = qs.last().expect("nonempty query history");
            let answer = match current {
                FineQuery::ApproveCandidate { candidate, .. } => {
                    let c = &game.candidates[*candidate];
                    if d.ballot.supports(*candidate) {
                        format!("approves {c}")
                    } else {
                        format!("does not approve {c}")
                    }
                }
                FineQuery::NextPreferred { .. } => act(&d.ballot),
            };
            let earlier: Vec<String> = qs[..qs.len() - 1].iter().map(|q| query_label(game, q)).collect();
            let when = match earlier.len() {
                0 => format!("when first asked {}", query_label(game, current)),
                1 => format!("when asked {} after first query {}", query_label(game, current), earlier[0]),
                _ => format!("when asked {} after queries {}", query_label(game, current), earlier.join(", ")),
            };
            format!("{agent}{ty} {answer} {when}")
        }
    }
}

fn cmd_verify_bne(game: &str, mechanism: &str, budget: u128) -> CmdResult {
    let which: ExampleGame = game.parse()?;
    let kind: MechanismKind = mechanism.parse()?;
    let g = example_game(which, kind)?;
    let truthful = truthful_profile(&g)?;
    let report = is_bne_with_budget(&g, &truthful, budget)?;
    let table = example_payoff_table(which)?;

    let mut text = format!("game: {which}\nmechanism: {}\npayoffs under full reporting:\n", kind.name());
    let mut rows = Vec::new();
    for row in &table {
        let given = if row.given.is_empty() { String::new() } else { format!(" given {}", row.given) };
        writeln!(text, "  {} approves {}{given}: {}", row.agent, row.ballot, row.value).unwrap();
        rows.push(json!({
            "agent": row.agent,
            "ballot": row.ballot,
            "given": row.given,
            "value": row.value.to_string(),
        }));
    }
    writeln!(text, "BNE: {}", report.is_bne).unwrap();
    let mut deviation = Value::Null;
    if let Some(d) = &report.counterexample {
        let words = describe_deviation(&g, d);
        writeln!(text, "deviation: {words}").unwrap();
        writeln!(text, "expected utility: {} -> {} (gain {})", d.baseline, d.deviated, d.gain).unwrap();
        deviation = json!({
            "agent": g.agents[d.agent],
            "type": g.types[d.agent][d.ty].name,
            "description": words,
            "ballot": format_set(&g, &d.ballot),
            "baseline": d.baseline.to_string(),
            "deviated": d.deviated.to_string(),
            "gain": d.gain.to_string(),
        });
    }
    writeln!(text, "deviations checked: {}", report.deviations_checked).unwrap();
    Ok(Report {
        text,
        json: json!({
            "game": which.name(),
            "mechanism": kind.name(),
            "payoffs": rows,
            "bne": report.is_bne,
            "deviation": deviation,
            "deviations_checked": report.deviations_checked.to_string(),
        }),
    })
}

fn cmd_nondivulging(policy: &str, protocol: &str, n: usize, m: usize, seed: u64, budget: u128) -> CmdResult {
    let game;
    let fixed;
    let (policy_ref, protocol, n, m): (&dyn FinePolicy, Protocol, usize, usize) = match policy {
        "theorem9" => {
            game = theorem9_game();
            match &game.mechanism {
                Mechanism::FineTree(p) => (p.as_ref(), game.protocol, game.n(), game.m()),
                _ => unreachable!("the example game elicits with fine queries"),
            }
        }
        "interleaved" | "random" => {
            let protocol: Protocol = protocol.parse()?;
            if protocol == Protocol::Stv {
                return Err(CliError::Input("fine elicitation trees are not built for STV".into()));
            }
            fixed = if policy == "random" {
                FixedOrderFinePolicy::random(protocol, n, m, seed)
            } else {
                FixedOrderFinePolicy::interleaved(protocol, n, m)
            };
            (&fixed, protocol, n, m)
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown fine policy `{other}` (expected theorem9, interleaved or random)"
            )))
        }
    };
    let tree = materialize_fine_tree(policy_ref, protocol, m, n, TieRule::Random, DEFAULT_NODE_GUARD, budget)?;
    let verdict = is_nondivulging(&tree, DEFAULT_NODE_GUARD)?;
    let text = format!(
        "policy: {policy}\nprotocol: {protocol}\nvoters: {n}\ncandidates: {m}\ntree nodes: {}\nnondivulging: {verdict}\n",
        tree.node_count()
    );
    Ok(Report {
        text,
        json: json!({
            "policy": policy,
            "protocol": protocol.name(),
            "n": n,
            "m": m,
            "nodes": tree.node_count(),
            "nondivulging": verdict,
        }),
    })
}

fn cmd_oracle(problem: &str, file: &Path, h: Option<&str>, k: Option<usize>, budget: u128) -> CmdResult {
    match problem {
        "prevent" => {
            let p = load_election(file)?;
            let h = h.ok_or_else(|| CliError::Input("oracle --problem prevent needs --h".into()))?;
            let h = candidate(&p, h)?;
            let r = brute_force_prevent(&p, h, budget)?;
            Ok(prevention_report(&p, h, &r))
        }
        "min-elicit" => {
            let (p, inst) = load_instance(file, k)?;
            let subset = brute_force_min_deciding_subset(&inst, budget)?;
            subset_report(&p, &inst, subset)
        }
        "3cover" => {
            let tc = parse_three_cover(&read(file)?).map_err(|e| in_file(file, e))?;
            let found = solve_3cover(&tc, budget)?;
            Ok(Report {
                text: format!("q: {}\nsubsets: {}\ncover exists: {found}\n", tc.q(), tc.r()),
                json: json!({ "q": tc.q(), "r": tc.r(), "cover": found }),
            })
        }
        "effective-preference" => {
            let ep = parse_ep(&read(file)?).map_err(|e| in_file(file, e))?;
            let w = effective_preference_witness(&ep, budget)?;
            let target = &ep.names[ep.target];
            let last = w.map(|b| {
                b.order()
                    .iter()
                    .map(|&c| ep.names[c].as_str())
                    .collect::<Vec<_>>()
                    .join(">")
            });
            let mut text = format!("target: {target}\ncan win: {}\n", last.is_some());
            if let Some(l) = &last {
                writeln!(text, "last ballot: {l}").unwrap();
            }
            Ok(Report {
                text,
                json: json!({ "target": target, "can_win": last.is_some(), "last_ballot": last }),
            })
        }
        other => Err(CliError::Input(format!(
            "unknown problem `{other}` (expected prevent, min-elicit, 3cover or effective-preference)"
        ))),
    }
}
