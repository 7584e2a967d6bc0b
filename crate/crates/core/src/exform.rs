//! Extensive-form game trees and their brute-force Nash oracle.
//!
//! Trees come in two flavours: perfect information ([`PETree`], every node
//! owned directly by a player) and imperfect information ([`IETree`], nodes
//! labelled by information sets from an [`InfoSetTable`]). The oracle checks
//! every profile against every unilateral deviation; it shares nothing with
//! the lens/arena pipeline and is used as independent ground truth.
//!
//! Reward vectors in leaves are ordered by the ambient player list, which is
//! passed explicitly to the operations that need it.

use crate::error::{Error, Result, DEFAULT_ENUM_CAP};
use crate::exec::filter_candidates;
use crate::rational::Rat;
use crate::space::{FinSpace, PlayerId, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PETree {
    Leaf(Vec<Rat>),
    Node { player: PlayerId, children: Vec<PETree> },
}

impl PETree {
    pub fn node(player: PlayerId, children: Vec<PETree>) -> PETree {
        assert!(!children.is_empty(), "node arity must be positive");
        PETree::Node { player, children }
    }

    pub fn leaf_count(&self) -> u128 {
        match self {
            PETree::Leaf(_) => 1,
            PETree::Node { children, .. } => children.iter().map(|c| c.leaf_count()).sum(),
        }
    }
}

/// Information-set declarations: an ordered list of labels, each with the
/// owning player and the arity shared by every node carrying the label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InfoSetTable {
    sets: Vec<InfoSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoSet {
    pub label: String,
    pub owner: PlayerId,
    pub arity: u64,
}

impl InfoSetTable {
    pub fn new(sets: Vec<InfoSet>) -> InfoSetTable {
        InfoSetTable { sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, idx: usize) -> &InfoSet {
        &self.sets[idx]
    }

    pub fn sets(&self) -> &[InfoSet] {
        &self.sets
    }

    pub fn owner(&self, idx: usize) -> &PlayerId {
        &self.sets[idx].owner
    }

    pub fn arity(&self, idx: usize) -> u64 {
        self.sets[idx].arity
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IETree {
    Leaf(Vec<Rat>),
    Node { set: usize, children: Vec<IETree> },
}

impl IETree {
    pub fn node(set: usize, children: Vec<IETree>) -> IETree {
        assert!(!children.is_empty(), "node arity must be positive");
        IETree::Node { set, children }
    }
}

// ---------------------------------------------------------------------------
// Perfect information
// ---------------------------------------------------------------------------

/// The strategy space of one player: at every node the owner picks among the
/// arity, everyone else contributes a unit factor, and choices at unreachable
/// nodes still count.
pub fn strategies_pet(tree: &PETree, player: &PlayerId) -> FinSpace {
    match tree {
        PETree::Leaf(_) => FinSpace::Unit,
        PETree::Node { player: owner, children } => {
            let here = if owner == player {
                FinSpace::Range(children.len() as u64)
            } else {
                FinSpace::Unit
            };
            let below =
                FinSpace::Product(children.iter().map(|c| strategies_pet(c, player)).collect());
            FinSpace::pair(here, below)
        }
    }
}

/// The profile space defined by the tree shape directly: a move at the root
/// and a profile for every subtree.
pub fn profiles_pet(tree: &PETree) -> FinSpace {
    match tree {
        PETree::Leaf(_) => FinSpace::Unit,
        PETree::Node { children, .. } => {
            let below = FinSpace::Product(children.iter().map(profiles_pet).collect());
            FinSpace::pair(FinSpace::Range(children.len() as u64), below)
        }
    }
}

pub fn paths_pet(tree: &PETree) -> FinSpace {
    match tree {
        PETree::Leaf(_) => FinSpace::Unit,
        PETree::Node { children, .. } => {
            FinSpace::Sum(children.iter().map(paths_pet).collect())
        }
    }
}

/// Reward vector at the end of a path, ordered by the ambient player list.
pub fn payoff_pet(tree: &PETree, path: &Value) -> Result<Vec<Rat>> {
    match (tree, path) {
        (PETree::Leaf(rewards), Value::Point) => Ok(rewards.clone()),
        (PETree::Node { children, .. }, Value::Tagged(m, rest)) => {
            let child = children
                .get(*m as usize)
                .ok_or_else(|| Error::TypeMismatch(format!("path branch {m} out of range")))?;
            payoff_pet(child, rest)
        }
        _ => Err(Error::TypeMismatch(format!("path {path:?} does not fit the tree"))),
    }
}

/// The unique path a profile induces.
pub fn play_pet(tree: &PETree, profile: &Value) -> Result<Value> {
    match (tree, profile) {
        (PETree::Leaf(_), Value::Point) => Ok(Value::Point),
        (PETree::Node { children, .. }, Value::Tuple(parts)) if parts.len() == 2 => {
            let m = parts[0].as_index();
            let child = children
                .get(m as usize)
                .ok_or_else(|| Error::TypeMismatch(format!("move {m} out of range")))?;
            let sub = parts[1].as_tuple();
            Ok(Value::tagged(m, play_pet(child, &sub[m as usize])?))
        }
        _ => Err(Error::TypeMismatch(format!(
            "profile {profile:?} does not fit the tree"
        ))),
    }
}

/// Repackages a tree-shaped profile as one strategy per player.
pub fn pet_profile_to_strategies(
    tree: &PETree,
    players: &[PlayerId],
    profile: &Value,
) -> Result<Value> {
    let per_player = players
        .iter()
        .map(|p| Ok((p.clone(), pet_profile_strategy(tree, p, profile)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Value::ByPlayer(per_player))
}

fn pet_profile_strategy(tree: &PETree, player: &PlayerId, profile: &Value) -> Result<Value> {
    match (tree, profile) {
        (PETree::Leaf(_), Value::Point) => Ok(Value::Point),
        (PETree::Node { player: owner, children }, Value::Tuple(parts)) if parts.len() == 2 => {
            let here = if owner == player { parts[0].clone() } else { Value::Point };
            let subs = parts[1].as_tuple();
            let below = children
                .iter()
                .zip(subs)
                .map(|(c, s)| pet_profile_strategy(c, player, s))
                .collect::<Result<Vec<_>>>()?;
            Ok(Value::pair(here, Value::Tuple(below)))
        }
        _ => Err(Error::TypeMismatch(format!(
            "profile {profile:?} does not fit the tree"
        ))),
    }
}

/// Inverse of [`pet_profile_to_strategies`].
pub fn pet_strategies_to_profile(
    tree: &PETree,
    players: &[PlayerId],
    strategies: &Value,
) -> Result<Value> {
    let entries = strategies.as_by_player();
    if entries.len() != players.len() {
        return Err(Error::TypeMismatch("player count mismatch".into()));
    }
    let per_player: Vec<(&PlayerId, &Value)> =
        entries.iter().map(|(p, v)| (p, v)).collect();
    pet_assemble_profile(tree, &per_player)
}

fn pet_assemble_profile(tree: &PETree, strategies: &[(&PlayerId, &Value)]) -> Result<Value> {
    match tree {
        PETree::Leaf(_) => Ok(Value::Point),
        PETree::Node { player: owner, children } => {
            let mut move_at_root = None;
            let mut below: Vec<Vec<(&PlayerId, &Value)>> =
                vec![Vec::new(); children.len()];
            for (p, v) in strategies {
                let (here, subs) = v.split_pair();
                if *p == owner {
                    move_at_root = Some(here.as_index());
                }
                for (m, sub) in subs.as_tuple().iter().enumerate() {
                    below[m].push((p, sub));
                }
            }
            let m = move_at_root
                .ok_or_else(|| Error::TypeMismatch(format!("owner {owner} has no strategy")))?;
            let subs = children
                .iter()
                .zip(below)
                .map(|(c, s)| pet_assemble_profile(c, &s))
                .collect::<Result<Vec<_>>>()?;
            Ok(Value::pair(Value::Index(m), Value::Tuple(subs)))
        }
    }
}

/// Exhaustive Nash search: a profile survives iff no player can improve
/// their own payoff by deviating to any alternative strategy.
pub fn nash_oracle_pet(tree: &PETree, players: &[PlayerId]) -> Result<Vec<Value>> {
    nash_oracle_pet_capped(tree, players, DEFAULT_ENUM_CAP)
}

pub fn nash_oracle_pet_capped(
    tree: &PETree,
    players: &[PlayerId],
    cap: u64,
) -> Result<Vec<Value>> {
    let profiles = profiles_pet(tree).enumerate_capped(cap)?;
    let deviations: Vec<(usize, Vec<Value>)> = players
        .iter()
        .enumerate()
        .map(|(i, p)| Ok((i, strategies_pet(tree, p).enumerate_capped(cap)?)))
        .collect::<Result<Vec<_>>>()?;
    let survivors = filter_candidates(profiles, |profile| {
        pet_is_nash(tree, players, &deviations, profile).unwrap_or(false)
    });
    Ok(survivors)
}

fn pet_is_nash(
    tree: &PETree,
    players: &[PlayerId],
    deviations: &[(usize, Vec<Value>)],
    profile: &Value,
) -> Result<bool> {
    let base = payoff_pet(tree, &play_pet(tree, profile)?)?;
    let strategies = pet_profile_to_strategies(tree, players, profile)?;
    let entries = strategies.as_by_player().to_vec();
    for (i, alternatives) in deviations {
        for alt in alternatives {
            let mut deviated = entries.clone();
            deviated[*i] = (deviated[*i].0.clone(), alt.clone());
            let deviated =
                pet_strategies_to_profile(tree, players, &Value::ByPlayer(deviated))?;
            let reward = payoff_pet(tree, &play_pet(tree, &deviated)?)?;
            if reward[*i] > base[*i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Imperfect information
// ---------------------------------------------------------------------------

/// Information sets occurring in the tree, deduplicated in depth-first
/// left-to-right first-occurrence order. This order fixes the factor order of
/// the profile space.
pub fn occurring_sets(tree: &IETree) -> Vec<usize> {
    let mut order = Vec::new();
    let mut seen = std::collections::HashSet::new();
    collect_sets(tree, &mut order, &mut seen);
    order
}

fn collect_sets(tree: &IETree, order: &mut Vec<usize>, seen: &mut std::collections::HashSet<usize>) {
    if let IETree::Node { set, children } = tree {
        if seen.insert(*set) {
            order.push(*set);
        }
        for child in children {
            collect_sets(child, order, seen);
        }
    }
}

/// One move per occurring information set owned by the player.
pub fn strategies_iet(tree: &IETree, table: &InfoSetTable, player: &PlayerId) -> FinSpace {
    FinSpace::Product(
        occurring_sets(tree)
            .into_iter()
            .filter(|&s| table.owner(s) == player)
            .map(|s| FinSpace::Range(table.arity(s)))
            .collect(),
    )
}

/// One move per occurring information set, in first-occurrence order.
pub fn profiles_iet(tree: &IETree, table: &InfoSetTable) -> FinSpace {
    FinSpace::Product(
        occurring_sets(tree)
            .into_iter()
            .map(|s| FinSpace::Range(table.arity(s)))
            .collect(),
    )
}

pub fn paths_iet(tree: &IETree) -> FinSpace {
    match tree {
        IETree::Leaf(_) => FinSpace::Unit,
        IETree::Node { children, .. } => FinSpace::Sum(children.iter().map(paths_iet).collect()),
    }
}

pub fn payoff_iet(tree: &IETree, path: &Value) -> Result<Vec<Rat>> {
    match (tree, path) {
        (IETree::Leaf(rewards), Value::Point) => Ok(rewards.clone()),
        (IETree::Node { children, .. }, Value::Tagged(m, rest)) => {
            let child = children
                .get(*m as usize)
                .ok_or_else(|| Error::TypeMismatch(format!("path branch {m} out of range")))?;
            payoff_iet(child, rest)
        }
        _ => Err(Error::TypeMismatch(format!("path {path:?} does not fit the tree"))),
    }
}

/// Follows the move assigned to each node's information set.
pub fn play_iet(tree: &IETree, profile: &Value) -> Result<Value> {
    let order = occurring_sets(tree);
    let parts = profile.as_tuple();
    if parts.len() != order.len() {
        return Err(Error::TypeMismatch("profile length mismatch".into()));
    }
    let assignment: std::collections::HashMap<usize, u64> = order
        .iter()
        .zip(parts)
        .map(|(&s, v)| (s, v.as_index()))
        .collect();
    follow_iet(tree, &assignment)
}

fn follow_iet(
    tree: &IETree,
    assignment: &std::collections::HashMap<usize, u64>,
) -> Result<Value> {
    match tree {
        IETree::Leaf(_) => Ok(Value::Point),
        IETree::Node { set, children } => {
            let m = *assignment
                .get(set)
                .ok_or_else(|| Error::TypeMismatch(format!("no move for set {set}")))?;
            let child = children
                .get(m as usize)
                .ok_or_else(|| Error::TypeMismatch(format!("move {m} out of range")))?;
            Ok(Value::tagged(m, follow_iet(child, assignment)?))
        }
    }
}

/// Groups an occurrence-ordered profile into one strategy per player.
pub fn iet_profile_to_strategies(
    tree: &IETree,
    table: &InfoSetTable,
    players: &[PlayerId],
    profile: &Value,
) -> Result<Value> {
    let order = occurring_sets(tree);
    let parts = profile.as_tuple();
    if parts.len() != order.len() {
        return Err(Error::TypeMismatch("profile length mismatch".into()));
    }
    let per_player = players
        .iter()
        .map(|p| {
            let moves: Vec<Value> = order
                .iter()
                .zip(parts)
                .filter(|(&s, _)| table.owner(s) == p)
                .map(|(_, v)| v.clone())
                .collect();
            (p.clone(), Value::Tuple(moves))
        })
        .collect();
    Ok(Value::ByPlayer(per_player))
}

/// Inverse of [`iet_profile_to_strategies`].
pub fn iet_strategies_to_profile(
    tree: &IETree,
    table: &InfoSetTable,
    strategies: &Value,
) -> Result<Value> {
    let order = occurring_sets(tree);
    let mut cursors: std::collections::HashMap<&PlayerId, std::slice::Iter<Value>> =
        std::collections::HashMap::new();
    for (p, v) in strategies.as_by_player() {
        cursors.insert(p, v.as_tuple().iter());
    }
    let mut out = Vec::with_capacity(order.len());
    for s in order {
        let owner = table.owner(s);
        let cursor = cursors
            .get_mut(owner)
            .ok_or_else(|| Error::TypeMismatch(format!("no strategy for {owner}")))?;
        let v = cursor
            .next()
            .ok_or_else(|| Error::TypeMismatch(format!("strategy of {owner} too short")))?;
        out.push(v.clone());
    }
    Ok(Value::Tuple(out))
}

pub fn nash_oracle_iet(
    tree: &IETree,
    table: &InfoSetTable,
    players: &[PlayerId],
) -> Result<Vec<Value>> {
    nash_oracle_iet_capped(tree, table, players, DEFAULT_ENUM_CAP)
}

pub fn nash_oracle_iet_capped(
    tree: &IETree,
    table: &InfoSetTable,
    players: &[PlayerId],
    cap: u64,
) -> Result<Vec<Value>> {
    let profiles = profiles_iet(tree, table).enumerate_capped(cap)?;
    let deviations: Vec<(usize, Vec<Value>)> = players
        .iter()
        .enumerate()
        .map(|(i, p)| Ok((i, strategies_iet(tree, table, p).enumerate_capped(cap)?)))
        .collect::<Result<Vec<_>>>()?;
    let survivors = filter_candidates(profiles, |profile| {
        iet_is_nash(tree, table, players, &deviations, profile).unwrap_or(false)
    });
    Ok(survivors)
}

fn iet_is_nash(
    tree: &IETree,
    table: &InfoSetTable,
    players: &[PlayerId],
    deviations: &[(usize, Vec<Value>)],
    profile: &Value,
) -> Result<bool> {
    let base = payoff_iet(tree, &play_iet(tree, profile)?)?;
    let strategies = iet_profile_to_strategies(tree, table, players, profile)?;
    let entries = strategies.as_by_player().to_vec();
    for (i, alternatives) in deviations {
        for alt in alternatives {
            let mut deviated = entries.clone();
            deviated[*i] = (deviated[*i].0.clone(), alt.clone());
            let deviated =
                iet_strategies_to_profile(tree, table, &Value::ByPlayer(deviated))?;
            let reward = payoff_iet(tree, &play_iet(tree, &deviated)?)?;
            if reward[*i] > base[*i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Between the two
// ---------------------------------------------------------------------------

/// Forgets information sets: every node becomes owned by the set's player.
pub fn iet_to_pet(tree: &IETree, table: &InfoSetTable) -> PETree {
    match tree {
        IETree::Leaf(rewards) => PETree::Leaf(rewards.clone()),
        IETree::Node { set, children } => PETree::Node {
            player: table.owner(*set).clone(),
            children: children.iter().map(|c| iet_to_pet(c, table)).collect(),
        },
    }
}

/// Embeds a perfect-information tree as an imperfect-information one by
/// giving every node its own fresh singleton information set.
pub fn pet_to_singleton_iet(tree: &PETree) -> (IETree, InfoSetTable) {
    let mut sets = Vec::new();
    let iet = singleton_walk(tree, &mut sets);
    (iet, InfoSetTable::new(sets))
}

fn singleton_walk(tree: &PETree, sets: &mut Vec<InfoSet>) -> IETree {
    match tree {
        PETree::Leaf(rewards) => IETree::Leaf(rewards.clone()),
        PETree::Node { player, children } => {
            let idx = sets.len();
            sets.push(InfoSet {
                label: format!("n{idx}"),
                owner: player.clone(),
                arity: children.len() as u64,
            });
            let children = children.iter().map(|c| singleton_walk(c, sets)).collect();
            IETree::Node { set: idx, children }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str) -> PlayerId {
        PlayerId::name(name)
    }

    fn rv(values: &[i64]) -> Vec<Rat> {
        values.iter().map(|&v| Rat::from_int(v)).collect()
    }

    /// Three players, one decision each; both subtrees binary.
    pub(crate) fn left_pet_example() -> (PETree, Vec<PlayerId>) {
        let players = vec![p("p1"), p("p2"), p("p3")];
        let tree = PETree::node(
            p("p1"),
            vec![
                PETree::node(
                    p("p2"),
                    vec![PETree::Leaf(rv(&[1, 3, 1])), PETree::Leaf(rv(&[4, 0, 4]))],
                ),
                PETree::node(
                    p("p3"),
                    vec![PETree::Leaf(rv(&[0, 0, 0])), PETree::Leaf(rv(&[8, 5, 8]))],
                ),
            ],
        );
        (tree, players)
    }

    /// Two players, the first deciding at the root and again on the right.
    pub(crate) fn right_pet_example() -> (PETree, Vec<PlayerId>) {
        let players = vec![p("p1"), p("p2")];
        let tree = PETree::node(
            p("p1"),
            vec![
                PETree::node(
                    p("p2"),
                    vec![PETree::Leaf(rv(&[1, 3])), PETree::Leaf(rv(&[4, 0]))],
                ),
                PETree::node(
                    p("p1"),
                    vec![PETree::Leaf(rv(&[0, 0])), PETree::Leaf(rv(&[8, 5]))],
                ),
            ],
        );
        (tree, players)
    }

    /// Two players; the second observes the first's move (two singleton sets).
    pub(crate) fn left_iet_example() -> (IETree, InfoSetTable, Vec<PlayerId>) {
        let players = vec![p("p1"), p("p2")];
        let table = InfoSetTable::new(vec![
            InfoSet { label: "root".into(), owner: p("p1"), arity: 2 },
            InfoSet { label: "a".into(), owner: p("p2"), arity: 2 },
            InfoSet { label: "b".into(), owner: p("p2"), arity: 2 },
        ]);
        let tree = IETree::node(
            0,
            vec![
                IETree::node(1, vec![IETree::Leaf(rv(&[1, 4])), IETree::Leaf(rv(&[0, 0]))]),
                IETree::node(2, vec![IETree::Leaf(rv(&[5, 2])), IETree::Leaf(rv(&[0, 2]))]),
            ],
        );
        (tree, table, players)
    }

    /// Same shape, but both second-player nodes share one information set.
    pub(crate) fn right_iet_example() -> (IETree, InfoSetTable, Vec<PlayerId>) {
        let players = vec![p("p1"), p("p2")];
        let table = InfoSetTable::new(vec![
            InfoSet { label: "root".into(), owner: p("p1"), arity: 2 },
            InfoSet { label: "h".into(), owner: p("p2"), arity: 2 },
        ]);
        let tree = IETree::node(
            0,
            vec![
                IETree::node(1, vec![IETree::Leaf(rv(&[1, 4])), IETree::Leaf(rv(&[0, 0]))]),
                IETree::node(1, vec![IETree::Leaf(rv(&[5, 2])), IETree::Leaf(rv(&[0, 2]))]),
            ],
        );
        (tree, table, players)
    }

    fn pet_profile(root: u64, left: u64, right: u64) -> Value {
        // shape of the two example trees: binary root, two binary children
        Value::pair(
            Value::Index(root),
            Value::Tuple(vec![
                Value::pair(Value::Index(left), Value::Tuple(vec![Value::Point, Value::Point])),
                Value::pair(Value::Index(right), Value::Tuple(vec![Value::Point, Value::Point])),
            ]),
        )
    }

    #[test]
    fn strategy_spaces_of_the_examples() {
        let (left, _) = left_pet_example();
        assert_eq!(strategies_pet(&left, &p("p1")).cardinality().unwrap(), 2);
        assert_eq!(strategies_pet(&left, &p("p2")).cardinality().unwrap(), 2);

        let (right, _) = right_pet_example();
        assert_eq!(strategies_pet(&right, &p("p1")).cardinality().unwrap(), 4);
        assert_eq!(strategies_pet(&right, &p("p2")).cardinality().unwrap(), 2);

        assert_eq!(
            strategies_pet(&PETree::Leaf(rv(&[0])), &p("p1"))
                .cardinality()
                .unwrap(),
            1
        );
    }

    #[test]
    fn profile_space_cardinalities() {
        let (left, _) = left_pet_example();
        assert_eq!(profiles_pet(&left).cardinality().unwrap(), 8);
        assert_eq!(profiles_pet(&PETree::Leaf(rv(&[0]))).cardinality().unwrap(), 1);
    }

    #[test]
    fn path_space_cardinalities() {
        let (left, _) = left_pet_example();
        assert_eq!(paths_pet(&left).cardinality().unwrap(), 4);
        assert_eq!(paths_pet(&PETree::Leaf(rv(&[0]))).cardinality().unwrap(), 1);
        let shallow = PETree::node(p("p1"), vec![PETree::Leaf(rv(&[0])), PETree::Leaf(rv(&[1]))]);
        assert_eq!(paths_pet(&shallow).cardinality().unwrap(), 2);
    }

    #[test]
    fn payoffs_along_paths() {
        let (left, _) = left_pet_example();
        let path_ll = Value::tagged(0, Value::tagged(0, Value::Point));
        assert_eq!(payoff_pet(&left, &path_ll).unwrap(), rv(&[1, 3, 1]));
        let path_rr = Value::tagged(1, Value::tagged(1, Value::Point));
        assert_eq!(payoff_pet(&left, &path_rr).unwrap(), rv(&[8, 5, 8]));
        assert_eq!(
            payoff_pet(&PETree::Leaf(rv(&[2, 2, 2])), &Value::Point).unwrap(),
            rv(&[2, 2, 2])
        );
    }

    #[test]
    fn play_follows_the_profile() {
        let (left, _) = left_pet_example();
        // everyone plays L
        let profile = pet_profile(0, 0, 0);
        assert_eq!(
            play_pet(&left, &profile).unwrap(),
            Value::tagged(0, Value::tagged(0, Value::Point))
        );

        let (right, players) = right_pet_example();
        // p1 plays (R, R), p2 plays L
        let strategies = Value::ByPlayer(vec![
            (
                p("p1"),
                Value::pair(
                    Value::Index(1),
                    Value::Tuple(vec![
                        Value::pair(Value::Point, Value::Tuple(vec![Value::Point, Value::Point])),
                        Value::pair(Value::Index(1), Value::Tuple(vec![Value::Point, Value::Point])),
                    ]),
                ),
            ),
            (
                p("p2"),
                Value::pair(
                    Value::Point,
                    Value::Tuple(vec![
                        Value::pair(Value::Index(0), Value::Tuple(vec![Value::Point, Value::Point])),
                        Value::pair(Value::Point, Value::Tuple(vec![Value::Point, Value::Point])),
                    ]),
                ),
            ),
        ]);
        let profile = pet_strategies_to_profile(&right, &players, &strategies).unwrap();
        let path = play_pet(&right, &profile).unwrap();
        assert_eq!(payoff_pet(&right, &path).unwrap(), rv(&[8, 5]));

        assert_eq!(
            play_pet(&PETree::Leaf(rv(&[0])), &Value::Point).unwrap(),
            Value::Point
        );
    }

    #[test]
    fn profile_strategy_bijection_round_trips() {
        let (tree, players) = right_pet_example();
        for profile in profiles_pet(&tree).enumerate().unwrap() {
            let strategies = pet_profile_to_strategies(&tree, &players, &profile).unwrap();
            let back = pet_strategies_to_profile(&tree, &players, &strategies).unwrap();
            assert_eq!(back, profile);
        }
    }

    #[test]
    fn oracle_on_the_left_example() {
        let (tree, players) = left_pet_example();
        let nash = nash_oracle_pet(&tree, &players).unwrap();
        assert!(nash.contains(&pet_profile(0, 0, 0)), "L,L,L must be a Nash equilibrium");
    }

    #[test]
    fn oracle_on_the_right_example() {
        let (tree, players) = right_pet_example();
        let nash = nash_oracle_pet(&tree, &players).unwrap();
        // p1 = (L, L), p2 = L
        assert!(!nash.contains(&pet_profile(0, 0, 0)));
    }

    #[test]
    fn oracle_on_a_single_leaf() {
        let tree = PETree::Leaf(rv(&[0, 0]));
        let players = vec![p("p1"), p("p2")];
        assert_eq!(nash_oracle_pet(&tree, &players).unwrap(), vec![Value::Point]);
    }

    #[test]
    fn iet_strategy_spaces() {
        let (right, table, _) = right_iet_example();
        assert_eq!(
            strategies_iet(&right, &table, &p("p2")).cardinality().unwrap(),
            2
        );
        let (left, table, _) = left_iet_example();
        assert_eq!(
            strategies_iet(&left, &table, &p("p2")).cardinality().unwrap(),
            4
        );
        assert_eq!(profiles_iet(&left, &table).cardinality().unwrap(), 8);

        // a declared but unused information set contributes no factor
        let table = InfoSetTable::new(vec![
            InfoSet { label: "used".into(), owner: p("p1"), arity: 2 },
            InfoSet { label: "unused".into(), owner: p("p1"), arity: 3 },
        ]);
        let tree = IETree::node(0, vec![IETree::Leaf(rv(&[0])), IETree::Leaf(rv(&[1]))]);
        assert_eq!(profiles_iet(&tree, &table).cardinality().unwrap(), 2);
    }

    #[test]
    fn iet_oracle_right_example() {
        let (tree, table, players) = right_iet_example();
        let nash = nash_oracle_iet(&tree, &table, &players).unwrap();
        let rl = Value::Tuple(vec![Value::Index(1), Value::Index(0)]);
        let rr = Value::Tuple(vec![Value::Index(1), Value::Index(1)]);
        assert_eq!(nash, vec![rl.clone(), rr]);
        let payoff = payoff_iet(&tree, &play_iet(&tree, &rl).unwrap()).unwrap();
        assert_eq!(payoff, rv(&[5, 2]));
    }

    #[test]
    fn iet_oracle_left_example() {
        let (tree, table, players) = left_iet_example();
        let nash = nash_oracle_iet(&tree, &table, &players).unwrap();
        // p1 plays L; p2 plays L after L and R after R
        let profile = Value::Tuple(vec![Value::Index(0), Value::Index(0), Value::Index(1)]);
        assert!(nash.contains(&profile));
        let payoff = payoff_iet(&tree, &play_iet(&tree, &profile).unwrap()).unwrap();
        assert_eq!(payoff, rv(&[1, 4]));
    }

    #[test]
    fn iet_to_pet_preserves_shape() {
        let (tree, table, _) = right_iet_example();
        let pet = iet_to_pet(&tree, &table);
        match &pet {
            PETree::Node { player, children } => {
                assert_eq!(player, &p("p1"));
                assert_eq!(children.len(), 2);
                for child in children {
                    match child {
                        PETree::Node { player, children } => {
                            assert_eq!(player, &p("p2"));
                            assert_eq!(children.len(), 2);
                        }
                        _ => panic!("expected inner nodes"),
                    }
                }
            }
            _ => panic!("expected a root node"),
        }
        assert_eq!(iet_to_pet(&IETree::Leaf(rv(&[7])), &table), PETree::Leaf(rv(&[7])));
    }

    #[test]
    fn singleton_embedding_preserves_nash_sets() {
        let (tree, players) = right_pet_example();
        let (iet, table) = pet_to_singleton_iet(&tree);
        let pet_nash = nash_oracle_pet(&tree, &players).unwrap();
        let iet_nash = nash_oracle_iet(&iet, &table, &players).unwrap();
        assert_eq!(pet_nash.len(), iet_nash.len());
        // compare under the per-player strategy bijection
        let pet_set: std::collections::HashSet<Value> = pet_nash
            .iter()
            .map(|w| pet_profile_to_strategies(&tree, &players, w).unwrap())
            .collect();
        // for singleton sets, a player's information sets appear in the same
        // DFS order as their decision nodes, so the flat move tuples match
        for w in &iet_nash {
            let grouped = iet_profile_to_strategies(&iet, &table, &players, w).unwrap();
            let matching = pet_set.iter().any(|pet_strats| {
                players.iter().all(|pl| {
                    flatten_moves(pet_strats.player_component(pl))
                        == grouped.player_component(pl).as_tuple().to_vec()
                })
            });
            assert!(matching, "no matching profile for {w:?}");
        }
    }

    fn flatten_moves(strategy: &Value) -> Vec<Value> {
        let mut moves = Vec::new();
        collect_moves(strategy, &mut moves);
        moves
    }

    fn collect_moves(v: &Value, out: &mut Vec<Value>) {
        match v {
            Value::Point => {}
            Value::Index(_) => out.push(v.clone()),
            Value::Tuple(items) => items.iter().for_each(|i| collect_moves(i, out)),
            _ => panic!("unexpected strategy shape"),
        }
    }
}
