//! Translations into open games: extensive-form trees (perfect and imperfect
//! information) and normal-form games.
//!
//! A perfect-information tree translates node by node: each node becomes a
//! single-player decision composed with the external choice of the translated
//! subtrees, and a reparametrisation immediately regroups the decision's
//! owner with the subtree players so every intermediate arena carries the
//! full player set. Utility flows down from the context continuation and is
//! copied back to every player unchanged.
//!
//! An imperfect-information tree first forgets its information sets, then
//! reparametrises the resulting arena along a cloning lens that copies each
//! information set's single move to every node carrying the set.

use crate::arena::{
    costate_of, decision, external_choice, externalize_players, Arena, Context, Factorization,
    OpenGame,
};
use crate::error::{Error, Result};
use crate::exform::{
    iet_strategies_to_profile, iet_to_pet, occurring_sets, payoff_iet, payoff_pet,
    profiles_iet, strategies_iet, strategies_pet, IETree, InfoSetTable, PETree,
};
use crate::lens::{Lens, ParamLens};
use crate::rational::Rat;
use crate::selection::{argmax, SelectionFn};
use crate::space::{FinSpace, PlayerId, Value};
use std::collections::HashMap;
use std::sync::Arc;

type UtilityFn = Arc<dyn Fn(&Value) -> Vec<Rat> + Send + Sync>;

fn reward_space(players: &[PlayerId]) -> FinSpace {
    FinSpace::RewardSpace(players.to_vec())
}

fn rewards_value(players: &[PlayerId], values: &[Rat]) -> Value {
    Value::Rewards(players.iter().cloned().zip(values.iter().cloned()).collect())
}

/// Per-player argmax over the player's own coordinate of the reward vector.
fn own_coordinate_argmax(
    player: &PlayerId,
    options: FinSpace,
    all_players: &[PlayerId],
) -> Result<SelectionFn> {
    let who = player.clone();
    argmax(options, reward_space(all_players), move |w| w.reward_of(&who).clone())
}

// ---------------------------------------------------------------------------
// Perfect information trees
// ---------------------------------------------------------------------------

/// Translates a tree into an arena with the given players: strategy profiles
/// are one strategy per player, the state is trivial, moves are paths, and
/// utility/coutility/rewards are all reward vectors.
pub fn pet_to_arena(tree: &PETree, players: &[PlayerId]) -> Result<Arena> {
    match tree {
        PETree::Leaf(_) => Ok(leaf_arena(players)),
        PETree::Node { player, children } => {
            let subs = children
                .iter()
                .map(|c| pet_to_arena(c, players))
                .collect::<Result<Vec<_>>>()?;
            let ext = externalize_players(&external_choice(&subs)?, players)?;
            let arity = children.len();
            let dec = decision(
                FinSpace::Range(arity as u64),
                reward_space(players),
                player.clone(),
            );
            let erase = Arena::of_lens(tag_erasure_lens(arity, players));
            let fit = Arena::of_lens(branch_iso_lens(arity, players));
            let staged = crate::arena::arena_seq(
                &crate::arena::arena_seq(&crate::arena::arena_seq(&dec, &erase)?, &fit)?,
                &ext,
            )?;
            let routing = node_routing_lens(tree, players, &staged)?;
            let fact = Factorization::new(
                players.to_vec(),
                players.iter().map(|p| strategies_pet(tree, p)).collect(),
                vec![reward_space(players); players.len()],
            );
            Ok(Arena::with_players(staged.plens().reparametrise(&routing)?, fact))
        }
    }
}

/// The leaf case: the unique path is played and the utility is copied to
/// every player and back out as coutility.
fn leaf_arena(players: &[PlayerId]) -> Arena {
    let fact = Factorization::new(
        players.to_vec(),
        vec![FinSpace::Unit; players.len()],
        vec![reward_space(players); players.len()],
    );
    let (pp, pq) = fact.params();
    let ids = players.to_vec();
    let lens = Lens::new(
        (
            FinSpace::pair(pp.clone(), FinSpace::Unit),
            FinSpace::pair(pq.clone(), reward_space(players)),
        ),
        (FinSpace::Unit, reward_space(players)),
        |_| Value::Point,
        move |_, r| {
            Value::pair(
                Value::ByPlayer(ids.iter().map(|p| (p.clone(), r.clone())).collect()),
                r.clone(),
            )
        },
    );
    Arena::with_players(
        ParamLens::new((pp, pq), (FinSpace::Unit, reward_space(players)), lens),
        fact,
    )
}

/// Codiagonal on reward vectors: the branch-tagged vector coming back from
/// the external choice loses its tag.
fn tag_erasure_lens(arity: usize, players: &[PlayerId]) -> Lens {
    let moves = FinSpace::Range(arity as u64);
    let vector = reward_space(players);
    Lens::new(
        (moves.clone(), vector.clone()),
        (moves, FinSpace::Sum(vec![vector; arity])),
        |x| x.clone(),
        |_, r| {
            let Value::Tagged(_, inner) = r else { panic!("utility must be tagged") };
            (**inner).clone()
        },
    )
}

/// Canonical isomorphism between a move index and the sum of unit states the
/// external choice expects; rewards pass through.
fn branch_iso_lens(arity: usize, players: &[PlayerId]) -> Lens {
    let moves = FinSpace::Range(arity as u64);
    let tagged_units = FinSpace::Sum(vec![FinSpace::Unit; arity]);
    let summed = FinSpace::Sum(vec![reward_space(players); arity]);
    Lens::new(
        (moves, summed.clone()),
        (tagged_units, summed),
        |x| Value::tagged(x.as_index(), Value::Point),
        |_, r| r.clone(),
    )
}

/// Regroups the decision's owner with the subtree players and discards the
/// redundant branch-tagged rewards: each player's strategy for the whole
/// tree splits into the node move (for the owner) plus one strategy per
/// subtree, and every player receives the single reward vector the decision
/// stage saw.
fn node_routing_lens(tree: &PETree, players: &[PlayerId], staged: &Arena) -> Result<Lens> {
    let PETree::Node { player: owner, .. } = tree else {
        return Err(Error::TypeMismatch("routing lens needs a node".into()));
    };
    let staged_fact = staged.factorization()?;
    let staged_players = staged_fact.players().to_vec();
    let (staged_p, staged_q) = staged_fact.params();

    let source = (
        FinSpace::PlayerIndexed(
            players.iter().map(|p| (p.clone(), strategies_pet(tree, p))).collect(),
        ),
        FinSpace::PlayerIndexed(
            players.iter().map(|p| (p.clone(), reward_space(players))).collect(),
        ),
    );

    // regroup: route each player's (move, subtree strategies) pair onto the
    // staged player list; the reward vector is copied to every player
    let mid_pair = (staged_p.clone(), reward_space(players));
    let regroup_owner = owner.clone();
    let regroup_players = players.to_vec();
    let regroup_staged = staged_players.clone();
    let regroup = Lens::new(
        source,
        mid_pair.clone(),
        move |profile| {
            let entries = profile.as_by_player();
            let own = profile.player_component(&regroup_owner);
            let node_move = own.split_pair().0.clone();
            let values = regroup_staged.iter().enumerate().map(|(i, staged_id)| {
                if i == 0 {
                    (staged_id.clone(), node_move.clone())
                } else {
                    let (_, strategy) = &entries[i - 1];
                    (staged_id.clone(), strategy.split_pair().1.clone())
                }
            });
            Value::ByPlayer(values.collect())
        },
        move |_, r| {
            Value::ByPlayer(
                regroup_players.iter().map(|p| (p.clone(), r.clone())).collect(),
            )
        },
    );

    // discard: identity on strategies, first projection on rewards
    let discard = Lens::new(
        mid_pair,
        (staged_p, staged_q),
        |x| x.clone(),
        |_, r| r.as_by_player()[0].1.clone(),
    );
    regroup.compose(&discard)
}

/// The closing context of a tree game: trivial state, payoff continuation.
pub fn payoff_context(tree: &PETree, players: &[PlayerId]) -> Context {
    let tree = tree.clone();
    let ids = players.to_vec();
    Context::new(Value::Point, move |path| {
        let payoff = payoff_pet(&tree, path).expect("continuation is total on paths");
        rewards_value(&ids, &payoff)
    })
}

/// The tree's open game: translated arena plus one reward-maximising
/// selection per player.
pub fn pet_to_game(tree: &PETree, players: &[PlayerId]) -> Result<OpenGame> {
    let arena = pet_to_arena(tree, players)?;
    let selections = players
        .iter()
        .map(|p| Ok((p.clone(), own_coordinate_argmax(p, strategies_pet(tree, p), players)?)))
        .collect::<Result<Vec<_>>>()?;
    OpenGame::new(arena, selections)
}

// ---------------------------------------------------------------------------
// Imperfect information trees
// ---------------------------------------------------------------------------

/// Expands a profile of per-information-set moves into the per-player
/// strategies of the underlying perfect-information tree, copying each set's
/// move to every node carrying the set. Rewards pass through.
pub fn clone_lens(tree: &IETree, table: &InfoSetTable, players: &[PlayerId]) -> Lens {
    let pet = iet_to_pet(tree, table);
    let source = (
        profiles_iet(tree, table),
        FinSpace::PlayerIndexed(
            players.iter().map(|p| (p.clone(), reward_space(players))).collect(),
        ),
    );
    let target = (
        FinSpace::PlayerIndexed(
            players.iter().map(|p| (p.clone(), strategies_pet(&pet, p))).collect(),
        ),
        source.1.clone(),
    );
    let order = occurring_sets(tree);
    let tree = tree.clone();
    let table = table.clone();
    let ids = players.to_vec();
    Lens::new(
        source,
        target,
        move |profile| {
            let parts = profile.as_tuple();
            let assignment: HashMap<usize, Value> =
                order.iter().cloned().zip(parts.iter().cloned()).collect();
            Value::ByPlayer(
                ids.iter()
                    .map(|p| (p.clone(), clone_strategy(&tree, &table, p, &assignment)))
                    .collect(),
            )
        },
        |_, r| r.clone(),
    )
}

fn clone_strategy(
    tree: &IETree,
    table: &InfoSetTable,
    player: &PlayerId,
    assignment: &HashMap<usize, Value>,
) -> Value {
    match tree {
        IETree::Leaf(_) => Value::Point,
        IETree::Node { set, children } => {
            let here = if table.owner(*set) == player {
                assignment[set].clone()
            } else {
                Value::Point
            };
            let below = Value::Tuple(
                children
                    .iter()
                    .map(|c| clone_strategy(c, table, player, assignment))
                    .collect(),
            );
            Value::pair(here, below)
        }
    }
}

/// Groups the per-information-set profile by owning player, in occurrence
/// order; rewards pass through.
fn iet_grouping_lens(tree: &IETree, table: &InfoSetTable, players: &[PlayerId]) -> Lens {
    let rewards = FinSpace::PlayerIndexed(
        players.iter().map(|p| (p.clone(), reward_space(players))).collect(),
    );
    let source = (
        FinSpace::PlayerIndexed(
            players
                .iter()
                .map(|p| (p.clone(), strategies_iet(tree, table, p)))
                .collect(),
        ),
        rewards.clone(),
    );
    let target = (profiles_iet(tree, table), rewards);
    let tree = tree.clone();
    let table = table.clone();
    Lens::new(
        source,
        target,
        move |strategies| {
            iet_strategies_to_profile(&tree, &table, strategies)
                .expect("strategies fit the tree")
        },
        |_, r| r.clone(),
    )
}

/// Translates an imperfect-information tree: translate the underlying
/// perfect-information tree, reparametrise along the cloning lens, and
/// regroup the information-set moves by player.
pub fn iet_to_arena(tree: &IETree, table: &InfoSetTable, players: &[PlayerId]) -> Result<Arena> {
    let pet = iet_to_pet(tree, table);
    let base = pet_to_arena(&pet, players)?;
    let cloned = base.plens().reparametrise(&clone_lens(tree, table, players))?;
    let grouped = cloned.reparametrise(&iet_grouping_lens(tree, table, players))?;
    let fact = Factorization::new(
        players.to_vec(),
        players.iter().map(|p| strategies_iet(tree, table, p)).collect(),
        vec![reward_space(players); players.len()],
    );
    Ok(Arena::with_players(grouped, fact))
}

pub fn iet_to_game(tree: &IETree, table: &InfoSetTable, players: &[PlayerId]) -> Result<OpenGame> {
    let arena = iet_to_arena(tree, table, players)?;
    let selections = players
        .iter()
        .map(|p| {
            Ok((
                p.clone(),
                own_coordinate_argmax(p, strategies_iet(tree, table, p), players)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    OpenGame::new(arena, selections)
}

/// Context for a translated imperfect-information tree; paths of the tree
/// and of its perfect-information image coincide by construction.
pub fn iet_payoff_context(tree: &IETree, players: &[PlayerId]) -> Context {
    let tree = tree.clone();
    let ids = players.to_vec();
    Context::new(Value::Point, move |path| {
        let payoff = payoff_iet(&tree, path).expect("continuation is total on paths");
        rewards_value(&ids, &payoff)
    })
}

// ---------------------------------------------------------------------------
// Normal-form games
// ---------------------------------------------------------------------------

/// A finite normal-form game: per-player action spaces and a total utility
/// function on action profiles.
#[derive(Clone)]
pub struct NormalFormGame {
    players: Vec<PlayerId>,
    actions: Vec<FinSpace>,
    utilities: UtilityFn,
}

impl NormalFormGame {
    pub fn new(
        players: Vec<PlayerId>,
        actions: Vec<FinSpace>,
        utilities: impl Fn(&Value) -> Vec<Rat> + Send + Sync + 'static,
    ) -> NormalFormGame {
        assert_eq!(players.len(), actions.len());
        NormalFormGame { players, actions, utilities: Arc::new(utilities) }
    }

    pub fn players(&self) -> &[PlayerId] {
        &self.players
    }

    pub fn actions(&self) -> &[FinSpace] {
        &self.actions
    }

    /// The player-indexed space of action profiles.
    pub fn profile_space(&self) -> FinSpace {
        FinSpace::PlayerIndexed(
            self.players.iter().cloned().zip(self.actions.iter().cloned()).collect(),
        )
    }

    /// Utility vector of a profile, ordered like the player list.
    pub fn utility(&self, profile: &Value) -> Vec<Rat> {
        (self.utilities)(profile)
    }
}

/// The open game whose arena forwards the action profile unchanged and copies
/// the utility vector to every player.
pub fn normal_form_to_game(nf: &NormalFormGame) -> Result<OpenGame> {
    let players = nf.players.clone();
    let fact = Factorization::new(
        players.clone(),
        nf.actions.clone(),
        vec![reward_space(&players); players.len()],
    );
    let (pp, pq) = fact.params();
    let ids = players.clone();
    let lens = Lens::new(
        (
            FinSpace::pair(pp.clone(), FinSpace::Unit),
            FinSpace::pair(pq.clone(), FinSpace::Unit),
        ),
        (nf.profile_space(), reward_space(&players)),
        |px| px.split_pair().0.clone(),
        move |_, r| {
            Value::pair(
                Value::ByPlayer(ids.iter().map(|p| (p.clone(), r.clone())).collect()),
                Value::Point,
            )
        },
    );
    let arena = Arena::with_players(
        ParamLens::new((pp, pq), (FinSpace::Unit, FinSpace::Unit), lens),
        fact,
    );
    let selections = players
        .iter()
        .zip(&nf.actions)
        .map(|(p, a)| Ok((p.clone(), own_coordinate_argmax(p, a.clone(), &players)?)))
        .collect::<Result<Vec<_>>>()?;
    OpenGame::new(arena, selections)
}

/// The closing context of a normal-form game: trivial state, utility
/// continuation.
pub fn normal_form_context(nf: &NormalFormGame) -> Context {
    let nf = nf.clone();
    Context::new(Value::Point, move |profile| {
        rewards_value(&nf.players, &nf.utility(profile))
    })
}

/// Direct matrix Nash search, independent of the lens pipeline.
pub fn nash_oracle_nf(nf: &NormalFormGame) -> Result<Vec<Value>> {
    nash_oracle_nf_capped(nf, crate::error::DEFAULT_ENUM_CAP)
}

pub fn nash_oracle_nf_capped(nf: &NormalFormGame, cap: u64) -> Result<Vec<Value>> {
    let profiles = nf.profile_space().enumerate_capped(cap)?;
    let alternatives: Vec<Vec<Value>> = nf
        .actions
        .iter()
        .map(|a| a.enumerate_capped(cap))
        .collect::<Result<_>>()?;
    let survivors = crate::exec::filter_candidates(profiles, |profile| {
        let base = nf.utility(profile);
        let entries = profile.as_by_player();
        for (i, alts) in alternatives.iter().enumerate() {
            for alt in alts {
                let mut deviated = entries.to_vec();
                deviated[i] = (deviated[i].0.clone(), alt.clone());
                let reward = nf.utility(&Value::ByPlayer(deviated));
                if reward[i] > base[i] {
                    return false;
                }
            }
        }
        true
    });
    Ok(survivors)
}

/// Reward vector reached by a profile of a translated game, read off the
/// induced costate.
pub fn profile_payoff(game: &OpenGame, ctx: &Context, profile: &Value) -> Result<Vec<Rat>> {
    let costate = costate_of(game.arena(), ctx)?;
    let rewards = costate.value(profile);
    let entries = rewards.as_by_player();
    // every player's reward is the full vector; read the first
    let vector = entries
        .first()
        .map(|(_, v)| v.clone())
        .ok_or_else(|| Error::TypeMismatch("game has no players".into()))?;
    Ok(vector.as_rewards().iter().map(|(_, r)| r.clone()).collect())
}
