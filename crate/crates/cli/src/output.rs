//! Text and JSON rendering of solve reports.

use ogk::gamefile::GameDoc;
use ogk::solve::{format_payoffs, Counts, SolveReport};
use serde_json::{json, Map, Value};

pub fn print_report_text(report: &SolveReport) {
    println!(
        "method: {} ({} profiles, {} paths, {} ms)",
        report.method.name(),
        report.counts.profiles,
        report.counts.paths,
        report.elapsed_ms
    );
    if report.equilibria.is_empty() {
        println!("no pure equilibria");
        return;
    }
    println!("equilibria: {}", report.equilibria.len());
    for e in &report.equilibria {
        let moves: Vec<String> = e
            .moves
            .iter()
            .map(|(player, labels)| {
                if labels.is_empty() {
                    format!("{player}=-")
                } else {
                    format!("{player}={}", labels.join(","))
                }
            })
            .collect();
        println!("  {}  payoff {}", moves.join("; "), format_payoffs(e));
    }
}

pub fn report_json(report: &SolveReport) -> Value {
    let equilibria: Vec<Value> = report
        .equilibria
        .iter()
        .map(|e| {
            let mut profile = Map::new();
            for (player, labels) in &e.moves {
                profile.insert(
                    player.clone(),
                    Value::Array(labels.iter().map(|l| json!(l)).collect()),
                );
            }
            let mut payoff = Map::new();
            for (player, value) in &e.payoffs {
                payoff.insert(player.clone(), json!(value.to_string()));
            }
            json!({ "profile": profile, "payoff": payoff })
        })
        .collect();
    json!({
        "method": report.method.name(),
        "players": report.players,
        "equilibria": equilibria,
        "counts": counts_json(&report.counts),
        "elapsed_ms": report.elapsed_ms,
    })
}

fn counts_json(counts: &Counts) -> Value {
    let mut strategies = Map::new();
    for (player, n) in &counts.strategy_counts {
        strategies.insert(player.clone(), json!(n.to_string()));
    }
    json!({
        "profiles": counts.profiles.to_string(),
        "paths": counts.paths.to_string(),
        "strategies": strategies,
    })
}

pub fn print_info_text(doc: &GameDoc, counts: &Counts) {
    println!("players: {}", doc.players.join(", "));
    for (player, n) in &counts.strategy_counts {
        println!("  {player}: {n} strategies");
    }
    println!("profiles: {}", counts.profiles);
    println!("paths: {}", counts.paths);
    if let ogk::gamefile::GameBody::Extensive(ext) = &doc.body {
        println!("information sets:");
        for (idx, set) in ext.table.sets().iter().enumerate() {
            println!(
                "  {} owner={} moves=({})",
                set.label,
                set.owner,
                ext.move_labels[idx].join(" ")
            );
        }
    }
}

pub fn info_json(doc: &GameDoc, counts: &Counts) -> Value {
    let mut value = Map::new();
    value.insert("players".into(), json!(doc.players));
    value.insert("counts".into(), counts_json(counts));
    if let ogk::gamefile::GameBody::Extensive(ext) = &doc.body {
        let sets: Vec<Value> = ext
            .table
            .sets()
            .iter()
            .enumerate()
            .map(|(idx, set)| {
                json!({
                    "label": set.label,
                    "owner": set.owner.to_string(),
                    "moves": ext.move_labels[idx],
                })
            })
            .collect();
        value.insert("infosets".into(), Value::Array(sets));
    }
    Value::Object(value)
}
