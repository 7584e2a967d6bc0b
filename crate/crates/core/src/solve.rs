//! End-to-end solving of parsed game documents: translate, compute
//! equilibria by the compositional method and/or the brute-force oracle, and
//! report them with human-readable move labels.

use crate::arena::Context;
use crate::error::{Error, Result};
use crate::exform::{
    iet_profile_to_strategies, iet_strategies_to_profile, nash_oracle_iet_capped, paths_iet,
    play_iet, profiles_iet, strategies_iet, IETree, InfoSetTable,
};
use crate::gamefile::{ExtensiveDoc, GameBody, GameDoc, NormalFormDoc};
use crate::rational::Rat;
use crate::space::{FinSpace, PlayerId, Value};
use crate::translate::{
    iet_payoff_context, iet_to_game, nash_oracle_nf_capped, normal_form_context,
    normal_form_to_game,
};
use std::time::Instant;

/// A labelled play outcome: the realized path's move labels and the
/// per-player payoffs.
pub type PlayedOutcome = (Vec<String>, Vec<(String, Rat)>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Compositional,
    Oracle,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Compositional => "compositional",
            Method::Oracle => "oracle",
        }
    }
}

/// One equilibrium, reported per player as labelled moves (one label per
/// decision point or information set, in first-occurrence order).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Equilibrium {
    pub moves: Vec<(String, Vec<String>)>,
    pub payoffs: Vec<(String, Rat)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    pub profiles: u128,
    pub paths: u128,
    pub strategy_counts: Vec<(String, u128)>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    pub players: Vec<String>,
    pub equilibria: Vec<Equilibrium>,
    pub counts: Counts,
    pub elapsed_ms: u128,
}

/// Per-infoset move labels owned by each player, in the order used by the
/// strategy spaces.
fn player_set_labels<'d>(
    ext: &'d ExtensiveDoc,
    player: &PlayerId,
) -> Vec<(&'d str, &'d [String])> {
    crate::exform::occurring_sets(&ext.tree)
        .into_iter()
        .filter(|&s| ext.table.owner(s) == player)
        .map(|s| (ext.table.get(s).label.as_str(), ext.move_labels[s].as_slice()))
        .collect()
}

fn counts_of(doc: &GameDoc) -> Result<Counts> {
    match &doc.body {
        GameBody::Extensive(ext) => {
            let players = doc.player_ids();
            let profiles = profiles_iet(&ext.tree, &ext.table).cardinality()?;
            let paths = paths_iet(&ext.tree).cardinality()?;
            let strategy_counts = doc
                .players
                .iter()
                .zip(&players)
                .map(|(name, id)| {
                    Ok((
                        name.clone(),
                        strategies_iet(&ext.tree, &ext.table, id).cardinality()?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Counts { profiles, paths, strategy_counts })
        }
        GameBody::NormalForm(nf) => {
            let profiles: u128 = nf.action_labels.iter().map(|a| a.len() as u128).product();
            let strategy_counts = doc
                .players
                .iter()
                .zip(&nf.action_labels)
                .map(|(name, a)| (name.clone(), a.len() as u128))
                .collect();
            Ok(Counts { profiles, paths: profiles, strategy_counts })
        }
    }
}

pub fn info(doc: &GameDoc) -> Result<Counts> {
    counts_of(doc)
}

/// Solves by the requested method. Equilibria are sorted by their labelled
/// moves so both methods report identical sets identically.
pub fn solve(doc: &GameDoc, method: Method, cap: u64) -> Result<SolveReport> {
    let start = Instant::now();
    let mut equilibria = match &doc.body {
        GameBody::Extensive(ext) => solve_ext(doc, ext, method, cap)?,
        GameBody::NormalForm(nf) => solve_nf(doc, nf, method, cap)?,
    };
    equilibria.sort();
    Ok(SolveReport {
        method,
        players: doc.players.clone(),
        equilibria,
        counts: counts_of(doc)?,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn solve_ext(
    doc: &GameDoc,
    ext: &ExtensiveDoc,
    method: Method,
    cap: u64,
) -> Result<Vec<Equilibrium>> {
    let players = doc.player_ids();
    let grouped_profiles: Vec<Value> = match method {
        Method::Compositional => {
            let game = iet_to_game(&ext.tree, &ext.table, &players)?;
            let ctx = iet_payoff_context(&ext.tree, &players);
            game.equilibria_capped(&ctx, cap)?
        }
        Method::Oracle => nash_oracle_iet_capped(&ext.tree, &ext.table, &players, cap)?
            .iter()
            .map(|w| iet_profile_to_strategies(&ext.tree, &ext.table, &players, w))
            .collect::<Result<Vec<_>>>()?,
    };
    grouped_profiles
        .iter()
        .map(|grouped| labelled_ext_equilibrium(doc, ext, &players, grouped))
        .collect()
}

fn labelled_ext_equilibrium(
    doc: &GameDoc,
    ext: &ExtensiveDoc,
    players: &[PlayerId],
    grouped: &Value,
) -> Result<Equilibrium> {
    let moves = doc
        .players
        .iter()
        .zip(players)
        .map(|(name, id)| {
            let labels = player_set_labels(ext, id);
            let strategy = grouped.player_component(id).as_tuple();
            let labelled = strategy
                .iter()
                .zip(&labels)
                .map(|(v, (_, set_labels))| set_labels[v.as_index() as usize].clone())
                .collect();
            (name.clone(), labelled)
        })
        .collect();
    let profile = iet_strategies_to_profile(&ext.tree, &ext.table, grouped)?;
    let payoff = crate::exform::payoff_iet(&ext.tree, &play_iet(&ext.tree, &profile)?)?;
    let payoffs = doc.players.iter().cloned().zip(payoff).collect();
    Ok(Equilibrium { moves, payoffs })
}

fn solve_nf(
    doc: &GameDoc,
    nf: &NormalFormDoc,
    method: Method,
    cap: u64,
) -> Result<Vec<Equilibrium>> {
    let players = doc.player_ids();
    let game = nf.to_game(&players);
    let profiles: Vec<Value> = match method {
        Method::Compositional => {
            let open_game = normal_form_to_game(&game)?;
            let ctx = normal_form_context(&game);
            open_game.equilibria_capped(&ctx, cap)?
        }
        Method::Oracle => nash_oracle_nf_capped(&game, cap)?,
    };
    profiles
        .iter()
        .map(|profile| {
            let moves = doc
                .players
                .iter()
                .zip(&players)
                .zip(&nf.action_labels)
                .map(|((name, id), labels)| {
                    let idx = profile.player_component(id).as_index() as usize;
                    (name.clone(), vec![labels[idx].clone()])
                })
                .collect();
            let payoff = game.utility(profile);
            let payoffs = doc.players.iter().cloned().zip(payoff).collect();
            Ok(Equilibrium { moves, payoffs })
        })
        .collect()
}

/// Differences between two reports' equilibrium sets, as printable lines;
/// empty when the sets agree exactly.
pub fn diff_reports(a: &SolveReport, b: &SolveReport) -> Vec<String> {
    let mut lines = Vec::new();
    for e in &a.equilibria {
        if !b.equilibria.contains(e) {
            lines.push(format!("only {}: {}", a.method.name(), format_equilibrium_moves(e)));
        }
    }
    for e in &b.equilibria {
        if !a.equilibria.contains(e) {
            lines.push(format!("only {}: {}", b.method.name(), format_equilibrium_moves(e)));
        }
    }
    lines
}

pub fn format_equilibrium_moves(e: &Equilibrium) -> String {
    let parts: Vec<String> = e
        .moves
        .iter()
        .map(|(player, moves)| format!("{player}={}", moves.join(",")))
        .collect();
    parts.join("; ")
}

pub fn format_payoffs(e: &Equilibrium) -> String {
    let parts: Vec<String> = e
        .payoffs
        .iter()
        .map(|(player, value)| format!("{player}:{value}"))
        .collect();
    format!("({})", parts.join(", "))
}

/// Resolves a labelled profile assignment ("p1=L,R; p2=L" parsed into pairs)
/// and plays it: returns the labelled move sequence along the realized path
/// and the payoff vector.
pub fn play_labelled(
    doc: &GameDoc,
    assignment: &[(String, Vec<String>)],
) -> Result<PlayedOutcome> {
    for (name, _) in assignment {
        if !doc.players.contains(name) {
            return Err(Error::UnknownPlayer(name.clone()));
        }
    }
    match &doc.body {
        GameBody::Extensive(ext) => play_labelled_ext(doc, ext, assignment),
        GameBody::NormalForm(nf) => play_labelled_nf(doc, nf, assignment),
    }
}

fn play_labelled_ext(
    doc: &GameDoc,
    ext: &ExtensiveDoc,
    assignment: &[(String, Vec<String>)],
) -> Result<PlayedOutcome> {
    let players = doc.player_ids();
    let mut per_player = Vec::new();
    for (name, id) in doc.players.iter().zip(&players) {
        let sets = player_set_labels(ext, id);
        let given = assignment
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, moves)| moves.as_slice())
            .unwrap_or(&[]);
        if given.len() != sets.len() {
            return Err(Error::IncompleteProfile(format!(
                "player `{name}` needs {} moves, got {}",
                sets.len(),
                given.len()
            )));
        }
        let moves = given
            .iter()
            .zip(&sets)
            .map(|(label, (_, set_labels))| {
                set_labels
                    .iter()
                    .position(|l| l == label)
                    .map(|i| Value::Index(i as u64))
                    .ok_or_else(|| Error::UnknownLabel(label.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        per_player.push((id.clone(), Value::Tuple(moves)));
    }
    let grouped = Value::ByPlayer(per_player);
    let profile = iet_strategies_to_profile(&ext.tree, &ext.table, &grouped)?;
    let path = play_iet(&ext.tree, &profile)?;
    let labels = path_labels(&ext.tree, ext, &path);
    let payoff = crate::exform::payoff_iet(&ext.tree, &path)?;
    Ok((labels, doc.players.iter().cloned().zip(payoff).collect()))
}

fn path_labels(tree: &IETree, ext: &ExtensiveDoc, path: &Value) -> Vec<String> {
    let mut out = Vec::new();
    let mut tree = tree;
    let mut path = path;
    while let (IETree::Node { set, children }, Value::Tagged(m, rest)) = (tree, path) {
        out.push(ext.move_labels[*set][*m as usize].clone());
        tree = &children[*m as usize];
        path = rest;
    }
    out
}

fn play_labelled_nf(
    doc: &GameDoc,
    nf: &NormalFormDoc,
    assignment: &[(String, Vec<String>)],
) -> Result<PlayedOutcome> {
    let players = doc.player_ids();
    let mut entries = Vec::new();
    let mut labels = Vec::new();
    for ((name, id), actions) in doc.players.iter().zip(&players).zip(&nf.action_labels) {
        let given = assignment
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, moves)| moves.as_slice())
            .unwrap_or(&[]);
        if given.len() != 1 {
            return Err(Error::IncompleteProfile(format!(
                "player `{name}` needs exactly one action, got {}",
                given.len()
            )));
        }
        let idx = actions
            .iter()
            .position(|l| l == &given[0])
            .ok_or_else(|| Error::UnknownLabel(given[0].clone()))?;
        labels.push(given[0].clone());
        entries.push((id.clone(), Value::Index(idx as u64)));
    }
    let profile = Value::ByPlayer(entries);
    let payoff = nf.to_game(&players).utility(&profile);
    Ok((labels, doc.players.iter().cloned().zip(payoff).collect()))
}

/// Re-verifies a reported equilibrium with the reporting method; used to
/// check that machine-readable output stays honest after serialization.
pub fn verify_equilibrium(
    doc: &GameDoc,
    method: Method,
    e: &Equilibrium,
    cap: u64,
) -> Result<bool> {
    let report = solve(doc, method, cap)?;
    Ok(report.equilibria.contains(e))
}

/// Expands a parsed document into the `(tree, table, players)` triple for
/// direct library use.
pub fn ext_parts(doc: &GameDoc) -> Option<(&IETree, &InfoSetTable, Vec<PlayerId>)> {
    match &doc.body {
        GameBody::Extensive(ext) => Some((&ext.tree, &ext.table, doc.player_ids())),
        GameBody::NormalForm(_) => None,
    }
}

/// The profile space of a document as a finite space (for cap reporting).
pub fn profile_space(doc: &GameDoc) -> FinSpace {
    match &doc.body {
        GameBody::Extensive(ext) => profiles_iet(&ext.tree, &ext.table),
        GameBody::NormalForm(nf) => FinSpace::Product(
            nf.action_labels
                .iter()
                .map(|a| FinSpace::Range(a.len() as u64))
                .collect(),
        ),
    }
}

/// Parses the CLI profile argument syntax `player=move[,move...];...`.
pub fn parse_assignment(text: &str) -> Result<Vec<(String, Vec<String>)>> {
    let mut out = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (player, moves) = part.split_once('=').ok_or_else(|| {
            Error::IncompleteProfile(format!("`{part}` is not of the form player=moves"))
        })?;
        let moves: Vec<String> = moves
            .split(',')
            .map(|m| m.trim().to_string())
            .filter(|m| !m.is_empty())
            .collect();
        out.push((player.trim().to_string(), moves));
    }
    Ok(out)
}

/// A closing context for an extensive document's translated game.
pub fn ext_context(ext: &ExtensiveDoc, players: &[PlayerId]) -> Context {
    iet_payoff_context(&ext.tree, players)
}
