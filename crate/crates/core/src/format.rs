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

//! Line-oriented text formats for elections, 3-cover instances and
//! single-vote STV manipulation instances.
//!
//! Election files:
//!
//! ```text
//! # comment
//! protocol: borda
//! candidates: a b c
//! ranking: a b c
//! ranking@alice: c a b
//! unknown: 2
//! ```
//!
//! Approval elections use `approval:` lines, which may be empty. A voter
//! label may follow the keyword after `@`.

use std::fmt::Write as _;

use crate::ballot::{ApprovalBallot, Ballot, Candidate, Protocol, RankingBallot};
use crate::error::{Error, Result};
use crate::profile::PartialProfile;
use crate::reductions::{EpInstance, ThreeCoverInstance};

struct Directive<'a> {
    line: usize,
    key: &'a str,
    label: Option<&'a str>,
    value: &'a str,
}

fn directives(text: &str) -> Result<Vec<Directive<'_>>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (head, value) = content
            .split_once(':')
            .ok_or_else(|| Error::parse(line, format!("expected `key: value`, found `{content}`")))?;
        let head = head.trim();
        let (key, label) = match head.split_once('@') {
            Some((k, l)) => {
                let l = l.trim();
                if l.is_empty() || l.contains(char::is_whitespace) {
                    return Err(Error::parse(line, "voter label must be a single non-empty word"));
                }
                (k.trim(), Some(l))
            }
            None => (head, None),
        };
        out.push(Directive {
            line,
            key,
            label,
            value: value.trim(),
        });
    }
    Ok(out)
}

fn parse_count(d: &Directive<'_>) -> Result<usize> {
    d.value
        .parse()
        .map_err(|_| Error::parse(d.line, format!("`{}` is not a nonnegative integer", d.value)))
}

fn no_label(d: &Directive<'_>) -> Result<()> {
    match d.label {
        Some(_) => Err(Error::parse(d.line, format!("`{}` does not take a voter label", d.key))),
        None => Ok(()),
    }
}

fn lookup(names: &[String], name: &str, line: usize) -> Result<Candidate> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::parse(line, format!("unknown candidate `{name}`")))
}

fn parse_ranking(names: &[String], d: &Directive<'_>) -> Result<Ballot> {
    let m = names.len();
    let mut order = Vec::with_capacity(m);
    let mut seen = vec![false; m];
    for tok in d.value.split_whitespace() {
        let c = lookup(names, tok, d.line)?;
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::parse(
                d.line,
                format!("candidate `{tok}` ranked twice; a ranking must be a permutation"),
            ));
        }
        order.push(c);
    }
    if order.len() != m {
        return Err(Error::parse(
            d.line,
            format!("ranking lists {} of {m} candidates; a ranking must be a permutation", order.len()),
        ));
    }
    Ok(Ballot::Ranking(RankingBallot::new(order, m)?))
}

fn parse_approval(names: &[String], d: &Directive<'_>) -> Result<Ballot> {
    let mut approved = Vec::new();
    for tok in d.value.split_whitespace() {
        let c = lookup(names, tok, d.line)?;
        if approved.contains(&c) {
            return Err(Error::parse(d.line, format!("candidate `{tok}` approved twice")));
        }
        approved.push(c);
    }
    Ok(Ballot::Approval(ApprovalBallot::new(approved, names.len())?))
}

/// Parses an election; `target:` is accepted only when `allow_target`.
fn parse_with_target(text: &str, allow_target: bool) -> Result<(PartialProfile, Option<(usize, Candidate)>)> {
    let ds = directives(text)?;
    let mut it = ds.iter();
    let first = it.next().ok_or_else(|| Error::parse(1, "empty election file"))?;
    if first.key != "protocol" {
        return Err(Error::parse(first.line, "the first line must be `protocol: <name>`"));
    }
    no_label(first)?;
    let protocol: Protocol = first
        .value
        .parse()
        .map_err(|e: Error| Error::parse(first.line, e.to_string()))?;
    let second = it
        .next()
        .ok_or_else(|| Error::parse(first.line + 1, "missing `candidates:` line"))?;
    if second.key != "candidates" {
        return Err(Error::parse(second.line, "the second line must be `candidates: <names>`"));
    }
    no_label(second)?;
    let names: Vec<String> = second.value.split_whitespace().map(str::to_string).collect();
    if names.is_empty() {
        return Err(Error::parse(second.line, "an election needs at least one candidate"));
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::parse(second.line, format!("candidate `{n}` listed twice")));
        }
    }

    let mut known = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut unknown: Option<usize> = None;
    let mut target = None;
    for d in it {
        if unknown.is_some() && d.key != "target" {
            return Err(Error::parse(d.line, "`unknown:` must be the last ballot-related line"));
        }
        match d.key {
            "ranking" | "approval" => {
                let want = if protocol.uses_approval() { "approval" } else { "ranking" };
                if d.key != want {
                    return Err(Error::parse(
                        d.line,
                        format!("protocol {protocol} takes `{want}:` lines, not `{}:`", d.key),
                    ));
                }
                let b = if protocol.uses_approval() {
                    parse_approval(&names, d)?
                } else {
                    parse_ranking(&names, d)?
                };
                known.push(b);
                labels.push(d.label.map(str::to_string));
            }
            "unknown" => {
                no_label(d)?;
                unknown = Some(parse_count(d)?);
            }
            "target" if allow_target => {
                no_label(d)?;
                if target.is_some() {
                    return Err(Error::parse(d.line, "duplicate `target:` line"));
                }
                target = Some((d.line, lookup(&names, d.value, d.line)?));
            }
            other => return Err(Error::parse(d.line, format!("unexpected directive `{other}`"))),
        }
    }

    let voter_ids = if labels.iter().any(Option::is_some) {
        Some(
            labels
                .into_iter()
                .enumerate()
                .map(|(i, l)| l.unwrap_or_else(|| format!("v{}", i + 1)))
                .collect(),
        )
    } else {
        None
    };
    let mut profile = PartialProfile::with_names(protocol, names, known, unknown.unwrap_or(0))?;
    profile.voter_ids = voter_ids;
    Ok((profile, target))
}

/// Parses the election file format.
pub fn parse_election(text: &str) -> Result<PartialProfile> {
    parse_with_target(text, false).map(|(p, _)| p)
}

/// Inverse of [`parse_election`].
pub fn serialize_election(p: &PartialProfile) -> String {
    let mut out = String::new();
    writeln!(out, "protocol: {}", p.protocol).unwrap();
    writeln!(out, "candidates: {}", p.names.join(" ")).unwrap();
    let kind = if p.protocol.uses_approval() { "approval" } else { "ranking" };
    for (i, b) in p.known.iter().enumerate() {
        let label = p
            .voter_ids
            .as_ref()
            .map(|ids| format!("@{}", ids[i]))
            .unwrap_or_default();
        let body: Vec<&str> = match b {
            Ballot::Ranking(r) => r.order().iter().map(|&c| p.name(c)).collect(),
            Ballot::Approval(a) => a.approved().iter().map(|&c| p.name(c)).collect(),
        };
        if body.is_empty() {
            writeln!(out, "{kind}{label}:").unwrap();
        } else {
            writeln!(out, "{kind}{label}: {}", body.join(" ")).unwrap();
        }
    }
    if p.unknown_count > 0 {
        writeln!(out, "unknown: {}", p.unknown_count).unwrap();
    }
    out
}

/// Parses `universe: 3q` followed by `subset: i j k` lines (1-based).
pub fn parse_three_cover(text: &str) -> Result<ThreeCoverInstance> {
    let ds = directives(text)?;
    let mut it = ds.iter();
    let first = it.next().ok_or_else(|| Error::parse(1, "empty 3-cover file"))?;
    if first.key != "universe" {
        return Err(Error::parse(first.line, "the first line must be `universe: <3q>`"));
    }
    let size = parse_count(first)?;
    if size % 3 != 0 {
        return Err(Error::parse(first.line, format!("universe size {size} is not a multiple of 3")));
    }
    let mut subsets = Vec::new();
    for d in it {
        if d.key != "subset" {
            return Err(Error::parse(d.line, format!("unexpected directive `{}`", d.key)));
        }
        let elems = d
            .value
            .split_whitespace()
            .map(|tok| match tok.parse::<usize>() {
                Ok(e) if (1..=size).contains(&e) => Ok(e - 1),
                _ => Err(Error::parse(d.line, format!("`{tok}` is not an element of 1..={size}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let set = <[usize; 3]>::try_from(elems.as_slice()).map_err(|_| {
            Error::parse(d.line, format!("subset has {} elements; expected 3", elems.len()))
        })?;
        if set[0] == set[1] || set[0] == set[2] || set[1] == set[2] {
            return Err(Error::parse(d.line, "subset repeats an element"));
        }
        subsets.push(set);
    }
    ThreeCoverInstance::new(size / 3, subsets)
}

pub fn serialize_three_cover(tc: &ThreeCoverInstance) -> String {
    let mut out = format!("universe: {}\n", tc.universe_size());
    for s in tc.subsets() {
        writeln!(out, "subset: {} {} {}", s[0] + 1, s[1] + 1, s[2] + 1).unwrap();
    }
    out
}

/// Parses an STV election file with no unknown ballots plus `target: <cand>`.
pub fn parse_ep(text: &str) -> Result<EpInstance> {
    let (p, target) = parse_with_target(text, true)?;
    let last = text.lines().count().max(1);
    if p.protocol != Protocol::Stv {
        return Err(Error::parse(1, "effective-preference instances must use protocol stv"));
    }
    if p.unknown_count != 0 {
        return Err(Error::parse(last, "effective-preference instances have no `unknown:` ballots"));
    }
    let (line, target) = target.ok_or_else(|| Error::parse(last, "missing `target:` line"))?;
    let votes = p
        .known
        .iter()
        .filter_map(|b| b.as_ranking().cloned())
        .collect();
    EpInstance::new(p.names, votes, target).map_err(|e| Error::parse(line, e.to_string()))
}

pub fn serialize_ep(ep: &EpInstance) -> String {
    let known = ep.votes.iter().cloned().map(Ballot::Ranking).collect();
    let p = PartialProfile::with_names(Protocol::Stv, ep.names.clone(), known, 0)
        .expect("EP instance holds valid rankings");
    let mut out = serialize_election(&p);
    writeln!(out, "target: {}", ep.names[ep.target]).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_example() {
        let p = parse_election("protocol: plurality\ncandidates: a b\nranking: a b\nunknown: 1\n").unwrap();
        assert_eq!(p.m, 2);
        assert_eq!(p.known, vec![Ballot::ranking(vec![0, 1], 2).unwrap()]);
        assert_eq!(p.unknown_count, 1);
        assert_eq!(parse_election(&serialize_election(&p)).unwrap(), p);
    }

    #[test]
    fn duplicate_in_ranking() {
        let err = parse_election("protocol: borda\ncandidates: a b\nranking: a a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(err.to_string().contains("permutation"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("# c\nprotocol: nope\ncandidates: a\n", 2),
            ("protocol: approval\ncandidates: a b\nranking: a b\n", 3),
            ("protocol: approval\ncandidates: a b\napproval: a\napproval: z\n", 4),
            ("protocol: borda\ncandidates: a b\nunknown: 1\nranking: a b\n", 4),
            ("protocol: borda\ncandidates: a b\nranking a b\n", 3),
            ("candidates: a b\nprotocol: borda\n", 1),
            ("protocol: borda\ncandidates: a b\ntarget: a\n", 3),
        ];
        for (text, line) in cases {
            match parse_election(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn empty_approval_and_labels() {
        let text = "protocol: approval\ncandidates: x y z\napproval:\napproval@k: y x\n";
        let p = parse_election(text).unwrap();
        assert_eq!(p.known[0], Ballot::approval([], 3).unwrap());
        assert_eq!(p.known[1], Ballot::approval([0, 1], 3).unwrap());
        assert_eq!(p.voter_ids, Some(vec!["v1".to_string(), "k".to_string()]));
        assert_eq!(parse_election(&serialize_election(&p)).unwrap(), p);
    }

    #[test]
    fn three_cover_round_trip() {
        let tc = parse_three_cover("universe: 6\nsubset: 1 2 3\nsubset: 4 5 6 # last\n").unwrap();
        assert_eq!(tc.q(), 2);
        assert_eq!(tc.subsets(), &[[0, 1, 2], [3, 4, 5]]);
        assert_eq!(parse_three_cover(&serialize_three_cover(&tc)).unwrap(), tc);
        assert!(parse_three_cover("universe: 6\nsubset: 1 2\n").is_err());
        assert!(parse_three_cover("universe: 6\nsubset: 1 2 7\n").is_err());
        assert!(parse_three_cover("universe: 5\n").is_err());
    }

    #[test]
    fn ep_round_trip() {
        let text = "protocol: stv\ncandidates: c d\nranking: c d\ntarget: c\n";
        let ep = parse_ep(text).unwrap();
        assert_eq!(ep.target, 0);
        assert_eq!(serialize_ep(&ep), text);
        assert!(parse_ep("protocol: stv\ncandidates: c d\nranking: d c\ntarget: c\n").is_err());
        assert!(parse_ep("protocol: stv\ncandidates: c d\nranking: c d\n").is_err());
    }
}
