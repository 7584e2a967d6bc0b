//! Arenas, open games, equilibria, and the operator calculus.
//!
//! An arena is a parametrised lens whose parameters are read as strategy
//! profiles (forward) and reward vectors (backward). When the parameter pair
//! factors as player-indexed products the arena carries that factorization;
//! the raw external/internal choice operators destroy it (their reward side
//! is a sum), and regrouping or the canonical reparametrisations restore it.
//!
//! An open game adds one selection function per player; its equilibria in a
//! context are the Nash product's selections against the induced costate.

use crate::error::{Error, Result, DEFAULT_ENUM_CAP};
use crate::lens::{Lens, ParamLens};
use crate::rational::Rat;
use crate::selection::{nash_product, Costate, SelectionFn};
use crate::space::{FinSpace, PlayerId, Value};
use std::sync::Arc;

/// Player-indexed factorization of an arena's parameter pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    players: Vec<PlayerId>,
    strategies: Vec<FinSpace>,
    rewards: Vec<FinSpace>,
}

impl Factorization {
    pub fn new(
        players: Vec<PlayerId>,
        strategies: Vec<FinSpace>,
        rewards: Vec<FinSpace>,
    ) -> Factorization {
        assert_eq!(players.len(), strategies.len());
        assert_eq!(players.len(), rewards.len());
        Factorization { players, strategies, rewards }
    }

    pub fn players(&self) -> &[PlayerId] {
        &self.players
    }

    pub fn strategy_space(&self, player: &PlayerId) -> Option<&FinSpace> {
        self.index_of(player).map(|i| &self.strategies[i])
    }

    pub fn reward_space(&self, player: &PlayerId) -> Option<&FinSpace> {
        self.index_of(player).map(|i| &self.rewards[i])
    }

    fn index_of(&self, player: &PlayerId) -> Option<usize> {
        self.players.iter().position(|p| p == player)
    }

    /// The parameter pair this factorization denotes.
    pub fn params(&self) -> (FinSpace, FinSpace) {
        (
            FinSpace::PlayerIndexed(
                self.players.iter().cloned().zip(self.strategies.iter().cloned()).collect(),
            ),
            FinSpace::PlayerIndexed(
                self.players.iter().cloned().zip(self.rewards.iter().cloned()).collect(),
            ),
        )
    }
}

#[derive(Debug, Clone)]
pub struct Arena {
    plens: ParamLens,
    factorization: Option<Factorization>,
}

impl Arena {
    /// Wraps a parametrised lens whose parameters factor as recorded.
    pub fn with_players(plens: ParamLens, factorization: Factorization) -> Arena {
        assert_eq!(
            plens.params(),
            &factorization.params(),
            "parameters must factor exactly as the recorded player-indexed products"
        );
        Arena { plens, factorization: Some(factorization) }
    }

    /// Wraps a parametrised lens without player structure.
    pub fn unfactored(plens: ParamLens) -> Arena {
        Arena { plens, factorization: None }
    }

    /// A zero-player arena carrying a plain lens.
    pub fn of_lens(lens: Lens) -> Arena {
        let fact = Factorization::new(vec![], vec![], vec![]);
        let (params_p, params_q) = fact.params();
        let inner = lens.source().clone();
        let wrapped = Lens::new(
            (
                FinSpace::pair(params_p.clone(), inner.0.clone()),
                FinSpace::pair(params_q.clone(), inner.1.clone()),
            ),
            lens.target().clone(),
            {
                let lens = lens.clone();
                move |px| lens.get(px.split_pair().1)
            },
            {
                let lens = lens.clone();
                move |px, r| {
                    Value::pair(Value::ByPlayer(vec![]), lens.put(px.split_pair().1, r))
                }
            },
        );
        Arena {
            plens: ParamLens::new((params_p, params_q), inner, wrapped),
            factorization: Some(fact),
        }
    }

    pub fn plens(&self) -> &ParamLens {
        &self.plens
    }

    pub fn factorization(&self) -> Result<&Factorization> {
        self.factorization
            .as_ref()
            .ok_or_else(|| Error::TypeMismatch("arena has no player factorization".into()))
    }

    pub fn players(&self) -> Result<&[PlayerId]> {
        Ok(self.factorization()?.players())
    }

    /// `(X, S)`: the state/coutility boundary.
    pub fn inner(&self) -> &(FinSpace, FinSpace) {
        self.plens.inner()
    }

    /// `(Y, R)`: the move/utility boundary.
    pub fn target(&self) -> &(FinSpace, FinSpace) {
        self.plens.target()
    }

    /// Forward pass: strategy profile and state to move.
    pub fn play(&self, profile: &Value, state: &Value) -> Result<Value> {
        if !self.plens.params().0.contains(profile) {
            return Err(Error::TypeMismatch(format!("profile {profile:?} ill-typed")));
        }
        if !self.inner().0.contains(state) {
            return Err(Error::TypeMismatch(format!("state {state:?} ill-typed")));
        }
        Ok(self.plens.play(profile, state))
    }

    /// Backward pass, split into `(coutility, rewards)`.
    pub fn coplay(&self, profile: &Value, state: &Value, utility: &Value) -> Result<(Value, Value)> {
        if !self.plens.params().0.contains(profile) {
            return Err(Error::TypeMismatch(format!("profile {profile:?} ill-typed")));
        }
        if !self.inner().0.contains(state) {
            return Err(Error::TypeMismatch(format!("state {state:?} ill-typed")));
        }
        if !self.target().1.contains(utility) {
            return Err(Error::TypeMismatch(format!("utility {utility:?} ill-typed")));
        }
        let (rewards, coutility) = self.plens.coplay(profile, state, utility);
        Ok((coutility, rewards))
    }

    /// Extensional comparison of behaviour, for arenas of identical shape.
    pub fn extensionally_equal(&self, other: &Arena, probe: &[Rat]) -> Result<bool> {
        self.plens.equal(&other.plens, probe)
    }
}

/// A single-player decision: the player picks a move, the state is trivial,
/// and the incoming utility is duplicated as the player's reward and the
/// outgoing coutility.
pub fn decision(moves: FinSpace, rewards: FinSpace, player: PlayerId) -> Arena {
    let fact = Factorization::new(vec![player], vec![moves.clone()], vec![rewards.clone()]);
    let (params_p, params_q) = fact.params();
    let owner = fact.players[0].clone();
    let lens = Lens::new(
        (
            FinSpace::pair(params_p.clone(), FinSpace::Unit),
            FinSpace::pair(params_q.clone(), rewards.clone()),
        ),
        (moves, rewards.clone()),
        |px| px.split_pair().0.as_by_player()[0].1.clone(),
        move |_, r| {
            Value::pair(
                Value::ByPlayer(vec![(owner.clone(), r.clone())]),
                r.clone(),
            )
        },
    );
    Arena {
        plens: ParamLens::new((params_p, params_q), (FinSpace::Unit, rewards), lens),
        factorization: Some(fact),
    }
}

/// Packaging lens from a player-indexed view of two concatenated player
/// lists onto the nested parameter product a composition produces.
fn concat_packaging(a: &Factorization, b: &Factorization) -> (Factorization, Lens) {
    let players: Vec<PlayerId> = a
        .players
        .iter()
        .cloned()
        .map(PlayerId::left)
        .chain(b.players.iter().cloned().map(PlayerId::right))
        .collect();
    let strategies: Vec<FinSpace> =
        a.strategies.iter().cloned().chain(b.strategies.iter().cloned()).collect();
    let rewards: Vec<FinSpace> =
        a.rewards.iter().cloned().chain(b.rewards.iter().cloned()).collect();
    let fact = Factorization::new(players, strategies, rewards);

    let (a_p, a_q) = a.params();
    let (b_p, b_q) = b.params();
    let (new_p, new_q) = fact.params();
    let na = a.players.len();
    let (a_ids, b_ids) = (a.players.clone(), b.players.clone());
    let split = move |v: &Value| -> Value {
        let entries = v.as_by_player();
        let left = Value::ByPlayer(
            a_ids
                .iter()
                .cloned()
                .zip(entries[..na].iter().map(|(_, v)| v.clone()))
                .collect(),
        );
        let right = Value::ByPlayer(
            b_ids
                .iter()
                .cloned()
                .zip(entries[na..].iter().map(|(_, v)| v.clone()))
                .collect(),
        );
        Value::pair(left, right)
    };
    let merge_ids = fact.players.clone();
    let merge = move |pair: &Value| -> Value {
        let (qa, qb) = pair.split_pair();
        let values = qa
            .as_by_player()
            .iter()
            .chain(qb.as_by_player())
            .map(|(_, v)| v.clone());
        Value::ByPlayer(merge_ids.iter().cloned().zip(values).collect())
    };
    let lens = Lens::new(
        (new_p, new_q),
        (FinSpace::pair(a_p, b_p), FinSpace::pair(a_q, b_q)),
        move |x| split(x),
        move |_, r| merge(r),
    );
    (fact, lens)
}

/// Sequential composition. Players of the operands are kept distinct by
/// `Left`/`Right` tags; identify them afterwards with [`regroup`].
pub fn arena_seq(a: &Arena, b: &Arena) -> Result<Arena> {
    let composed = a.plens.compose(&b.plens)?;
    match (&a.factorization, &b.factorization) {
        (Some(fa), Some(fb)) => {
            let (fact, packaging) = concat_packaging(fa, fb);
            Ok(Arena {
                plens: composed.reparametrise(&packaging)?,
                factorization: Some(fact),
            })
        }
        _ => Ok(Arena { plens: composed, factorization: None }),
    }
}

/// Parallel composition; same player tagging as [`arena_seq`].
pub fn arena_tensor(a: &Arena, b: &Arena) -> Result<Arena> {
    let tensored = a.plens.tensor(&b.plens);
    match (&a.factorization, &b.factorization) {
        (Some(fa), Some(fb)) => {
            let (fact, packaging) = concat_packaging(fa, fb);
            Ok(Arena {
                plens: tensored.reparametrise(&packaging)?,
                factorization: Some(fact),
            })
        }
        _ => Ok(Arena { plens: tensored, factorization: None }),
    }
}

/// The regrouping reparametrisation lens for `assign : players -> new set`.
/// Each new player's strategy space is the product of its preimage's spaces
/// (the lone space itself for singleton preimages, an empty product for
/// players outside the image).
pub fn regroup_lens(
    fact: &Factorization,
    new_players: &[PlayerId],
    assign: &dyn Fn(&PlayerId) -> PlayerId,
) -> Result<(Factorization, Lens)> {
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); new_players.len()];
    for (i, p) in fact.players.iter().enumerate() {
        let q = assign(p);
        let slot = new_players
            .iter()
            .position(|cand| cand == &q)
            .ok_or_else(|| Error::UnknownPlayer(q.to_string()))?;
        preimages[slot].push(i);
    }
    let group = |spaces: &[FinSpace]| -> Vec<FinSpace> {
        preimages
            .iter()
            .map(|pre| {
                if pre.len() == 1 {
                    spaces[pre[0]].clone()
                } else {
                    FinSpace::Product(pre.iter().map(|&i| spaces[i].clone()).collect())
                }
            })
            .collect()
    };
    let new_fact = Factorization::new(
        new_players.to_vec(),
        group(&fact.strategies),
        group(&fact.rewards),
    );

    let old_ids = fact.players.clone();
    let pre_for_get = preimages.clone();
    let get = move |v: &Value| -> Value {
        let entries = v.as_by_player();
        let mut old_values: Vec<Option<Value>> = vec![None; old_ids.len()];
        for (slot, pre) in pre_for_get.iter().enumerate() {
            let value = &entries[slot].1;
            if pre.len() == 1 {
                old_values[pre[0]] = Some(value.clone());
            } else {
                let parts = value.as_tuple();
                for (k, &i) in pre.iter().enumerate() {
                    old_values[i] = Some(parts[k].clone());
                }
            }
        }
        Value::ByPlayer(
            old_ids
                .iter()
                .cloned()
                .zip(old_values.into_iter().map(|v| v.expect("assign is total")))
                .collect(),
        )
    };
    let pre_for_put = preimages;
    let put_ids = new_players.to_vec();
    let put = move |_: &Value, r: &Value| -> Value {
        let entries = r.as_by_player();
        Value::ByPlayer(
            put_ids
                .iter()
                .cloned()
                .zip(pre_for_put.iter().map(|pre| {
                    if pre.len() == 1 {
                        entries[pre[0]].1.clone()
                    } else {
                        Value::Tuple(pre.iter().map(|&i| entries[i].1.clone()).collect())
                    }
                }))
                .collect(),
        )
    };
    let lens = Lens::new(new_fact.params(), fact.params(), get, put);
    Ok((new_fact, lens))
}

/// Reindexes an arena's players along `assign`; behaviour is unchanged up to
/// the canonical repackaging of profiles. `assign` need not be injective
/// (players merge) or surjective (dummy players appear).
pub fn regroup(
    a: &Arena,
    new_players: Vec<PlayerId>,
    assign: impl Fn(&PlayerId) -> PlayerId,
) -> Result<Arena> {
    let fact = a.factorization()?;
    let (new_fact, lens) = regroup_lens(fact, &new_players, &assign)?;
    Ok(Arena {
        plens: a.plens.reparametrise(&lens)?,
        factorization: Some(new_fact),
    })
}

/// The environment picks which arena of the family is played: strategies
/// multiply (one per branch), everything else sums. Utility must be shared.
/// The result has no player factorization; see [`externalize_players`].
pub fn external_choice(family: &[Arena]) -> Result<Arena> {
    if family.is_empty() {
        return Err(Error::TypeMismatch("empty external choice".into()));
    }
    let utility = family[0].target().1.clone();
    if family.iter().any(|a| a.target().1 != utility) {
        return Err(Error::RewardSpaceMismatch);
    }
    let params = (
        FinSpace::Product(family.iter().map(|a| a.plens.params().0.clone()).collect()),
        FinSpace::Sum(family.iter().map(|a| a.plens.params().1.clone()).collect()),
    );
    let inner = (
        FinSpace::Sum(family.iter().map(|a| a.inner().0.clone()).collect()),
        FinSpace::Sum(family.iter().map(|a| a.inner().1.clone()).collect()),
    );
    let target = (
        FinSpace::Sum(family.iter().map(|a| a.target().0.clone()).collect()),
        utility,
    );
    let members: Arc<Vec<ParamLens>> =
        Arc::new(family.iter().map(|a| a.plens.clone()).collect());
    let get_members = members.clone();
    let lens = Lens::new(
        (
            FinSpace::pair(params.0.clone(), inner.0.clone()),
            FinSpace::pair(params.1.clone(), inner.1.clone()),
        ),
        target,
        move |px| {
            let (phi, x) = px.split_pair();
            let Value::Tagged(i, inner_x) = x else { panic!("state must be tagged") };
            let branch = &get_members[*i as usize];
            Value::tagged(*i, branch.play(&phi.as_tuple()[*i as usize], inner_x))
        },
        move |px, r| {
            let (phi, x) = px.split_pair();
            let Value::Tagged(i, inner_x) = x else { panic!("state must be tagged") };
            let branch = &members[*i as usize];
            let (u, s) = branch.coplay(&phi.as_tuple()[*i as usize], inner_x, r);
            Value::pair(Value::tagged(*i, u), Value::tagged(*i, s))
        },
    );
    Ok(Arena::unfactored(ParamLens::new(params, inner, lens)))
}

/// Restores player structure on an external choice whose members all had the
/// given players: strategies transpose into per-player tuples and the tagged
/// reward vector distributes into each player's slot.
pub fn externalize_players(a: &Arena, players: &[PlayerId]) -> Result<Arena> {
    let (params_p, params_q) = a.plens.params();
    let FinSpace::Product(branches) = params_p else {
        return Err(Error::TypeMismatch("expected an external-choice arena".into()));
    };
    let FinSpace::Sum(branch_rewards) = params_q else {
        return Err(Error::TypeMismatch("expected an external-choice arena".into()));
    };
    let member_entries = |space: &FinSpace| -> Result<Vec<(PlayerId, FinSpace)>> {
        let FinSpace::PlayerIndexed(entries) = space else {
            return Err(Error::TypeMismatch("family member is not player-indexed".into()));
        };
        if entries.len() != players.len()
            || !entries.iter().zip(players).all(|((a, _), b)| a == b)
        {
            return Err(Error::TypeMismatch("family members have different players".into()));
        }
        Ok(entries.clone())
    };
    let strat_cols: Vec<Vec<(PlayerId, FinSpace)>> =
        branches.iter().map(member_entries).collect::<Result<_>>()?;
    let reward_cols: Vec<Vec<(PlayerId, FinSpace)>> =
        branch_rewards.iter().map(member_entries).collect::<Result<_>>()?;

    let strategies: Vec<FinSpace> = (0..players.len())
        .map(|pi| FinSpace::Product(strat_cols.iter().map(|col| col[pi].1.clone()).collect()))
        .collect();
    let rewards: Vec<FinSpace> = (0..players.len())
        .map(|pi| FinSpace::Sum(reward_cols.iter().map(|col| col[pi].1.clone()).collect()))
        .collect();
    let fact = Factorization::new(players.to_vec(), strategies, rewards);

    let branch_count = branches.len();
    let get_ids = players.to_vec();
    let get = move |v: &Value| -> Value {
        let entries = v.as_by_player();
        Value::Tuple(
            (0..branch_count)
                .map(|i| {
                    Value::ByPlayer(
                        get_ids
                            .iter()
                            .cloned()
                            .zip(entries.iter().map(|(_, t)| t.as_tuple()[i].clone()))
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    let put = move |_: &Value, r: &Value| -> Value {
        let Value::Tagged(i, inner) = r else { panic!("reward must be tagged") };
        Value::ByPlayer(
            inner
                .as_by_player()
                .iter()
                .map(|(p, u)| (p.clone(), Value::tagged(*i, u.clone())))
                .collect(),
        )
    };
    let lens = Lens::new(fact.params(), (params_p.clone(), params_q.clone()), get, put);
    Ok(Arena {
        plens: a.plens.reparametrise(&lens)?,
        factorization: Some(fact),
    })
}

/// The players pick which arena of the family is played: strategies sum, the
/// environment supplies a state for every branch. Utility must be shared.
pub fn internal_choice(family: &[Arena]) -> Result<Arena> {
    if family.is_empty() {
        return Err(Error::TypeMismatch("empty internal choice".into()));
    }
    let utility = family[0].target().1.clone();
    if family.iter().any(|a| a.target().1 != utility) {
        return Err(Error::RewardSpaceMismatch);
    }
    let params = (
        FinSpace::Sum(family.iter().map(|a| a.plens.params().0.clone()).collect()),
        FinSpace::Sum(family.iter().map(|a| a.plens.params().1.clone()).collect()),
    );
    let inner = (
        FinSpace::Product(family.iter().map(|a| a.inner().0.clone()).collect()),
        FinSpace::Sum(family.iter().map(|a| a.inner().1.clone()).collect()),
    );
    let target = (
        FinSpace::Sum(family.iter().map(|a| a.target().0.clone()).collect()),
        utility,
    );
    let members: Arc<Vec<ParamLens>> =
        Arc::new(family.iter().map(|a| a.plens.clone()).collect());
    let get_members = members.clone();
    let lens = Lens::new(
        (
            FinSpace::pair(params.0.clone(), inner.0.clone()),
            FinSpace::pair(params.1.clone(), inner.1.clone()),
        ),
        target,
        move |px| {
            let (omega, xs) = px.split_pair();
            let Value::Tagged(i, strategy) = omega else { panic!("strategy must be tagged") };
            let branch = &get_members[*i as usize];
            Value::tagged(*i, branch.play(strategy, &xs.as_tuple()[*i as usize]))
        },
        move |px, r| {
            let (omega, xs) = px.split_pair();
            let Value::Tagged(i, strategy) = omega else { panic!("strategy must be tagged") };
            let branch = &members[*i as usize];
            let (u, s) = branch.coplay(strategy, &xs.as_tuple()[*i as usize], r);
            Value::pair(Value::tagged(*i, u), Value::tagged(*i, s))
        },
    );
    Ok(Arena::unfactored(ParamLens::new(params, inner, lens)))
}

/// A zero-player arena that turns utility into coutility by the stored map.
pub fn stop_arena(
    utility: FinSpace,
    coutility: FinSpace,
    to_coutility: impl Fn(&Value) -> Value + Send + Sync + 'static,
) -> Arena {
    Arena::of_lens(Lens::new(
        (FinSpace::Unit, coutility),
        (FinSpace::Unit, utility),
        |_| Value::Point,
        move |_, r| to_coutility(r),
    ))
}

/// Index of the continue branch in a switch strategy.
pub const SWITCH_GO: u64 = 0;
/// Index of the stop branch in a switch strategy.
pub const SWITCH_STOP: u64 = 1;

/// A one-player arena deciding whether the interaction continues: `go`
/// forwards the state into branch 0, `stop` routes to branch 1. Coplay
/// erases the branch tag.
pub fn switch_arena(player: PlayerId, state: FinSpace, coutility: FinSpace) -> Arena {
    let fact = Factorization::new(
        vec![player.clone()],
        vec![FinSpace::Range(2)],
        vec![coutility.clone()],
    );
    let (params_p, params_q) = fact.params();
    let inner = (state.clone(), coutility.clone());
    let target = (
        FinSpace::Sum(vec![state, FinSpace::Unit]),
        FinSpace::Sum(vec![coutility.clone(), coutility]),
    );
    let lens = Lens::new(
        (
            FinSpace::pair(params_p.clone(), inner.0.clone()),
            FinSpace::pair(params_q.clone(), inner.1.clone()),
        ),
        target,
        |px| {
            let (omega, x) = px.split_pair();
            match omega.as_by_player()[0].1.as_index() {
                SWITCH_GO => Value::tagged(0, x.clone()),
                _ => Value::tagged(1, Value::Point),
            }
        },
        move |_, r| {
            let Value::Tagged(_, s) = r else { panic!("feedback must be tagged") };
            Value::pair(
                Value::ByPlayer(vec![(player.clone(), (**s).clone())]),
                (**s).clone(),
            )
        },
    );
    Arena {
        plens: ParamLens::new((params_p, params_q), inner, lens),
        factorization: Some(fact),
    }
}

/// The voting reparametrisation: every player votes for a branch and carries
/// a strategy for each branch; a branch with a strict absolute majority wins,
/// otherwise the default is played. Rewards pass through with the tag dropped.
///
/// `strategies[i][p]` is player `p`'s strategy space in branch `i`.
pub fn vote_lens(
    players: &[PlayerId],
    strategies: &[Vec<FinSpace>],
    default_branch: usize,
    shared_rewards: FinSpace,
) -> Lens {
    let branch_count = strategies.len();
    assert!(default_branch < branch_count, "default branch out of range");
    assert!(strategies.iter().all(|row| row.len() == players.len()));

    let per_player: Vec<FinSpace> = (0..players.len())
        .map(|pi| {
            FinSpace::pair(
                FinSpace::Range(branch_count as u64),
                FinSpace::Product((0..branch_count).map(|i| strategies[i][pi].clone()).collect()),
            )
        })
        .collect();
    let source = (
        FinSpace::PlayerIndexed(players.iter().cloned().zip(per_player).collect()),
        shared_rewards.clone(),
    );
    let target = (
        FinSpace::Sum(
            (0..branch_count)
                .map(|i| {
                    FinSpace::PlayerIndexed(
                        players.iter().cloned().zip(strategies[i].iter().cloned()).collect(),
                    )
                })
                .collect(),
        ),
        FinSpace::Sum(vec![shared_rewards; branch_count]),
    );
    let voter_count = players.len();
    Lens::new(
        source,
        target,
        move |omega| {
            let entries = omega.as_by_player();
            let mut tally = vec![0usize; branch_count];
            for (_, v) in entries {
                tally[v.split_pair().0.as_index() as usize] += 1;
            }
            let winner = tally
                .iter()
                .position(|&n| 2 * n > voter_count)
                .unwrap_or(default_branch);
            Value::tagged(
                winner as u64,
                Value::ByPlayer(
                    entries
                        .iter()
                        .map(|(p, v)| (p.clone(), v.split_pair().1.as_tuple()[winner].clone()))
                        .collect(),
                ),
            )
        },
        |_, r| {
            let Value::Tagged(_, inner) = r else { panic!("reward must be tagged") };
            (**inner).clone()
        },
    )
}

/// Identity on strategies; the backward pass sums `rounds` reward vectors
/// componentwise into one.
pub fn resum_lens(strategies: FinSpace, players: &[PlayerId], rounds: usize) -> Lens {
    let vector = FinSpace::RewardSpace(players.to_vec());
    let source = (strategies.clone(), vector.clone());
    let target = (strategies, FinSpace::Product(vec![vector; rounds]));
    let ids = players.to_vec();
    Lens::new(source, target, |x| x.clone(), move |_, r| {
        let parts = r.as_tuple();
        let totals: Vec<(PlayerId, Rat)> = ids
            .iter()
            .map(|p| {
                let total = parts
                    .iter()
                    .fold(Rat::zero(), |acc, part| &acc + part.reward_of(p));
                (p.clone(), total)
            })
            .collect();
        Value::Rewards(totals)
    })
}

/// Duplicates a single move into a pair of moves; rewards pass through.
pub fn clone_lens_simple(moves: FinSpace, rewards: FinSpace) -> Lens {
    let source = (moves.clone(), rewards.clone());
    let target = (FinSpace::pair(moves.clone(), moves), rewards);
    Lens::new(
        source,
        target,
        |m| Value::pair(m.clone(), m.clone()),
        |_, r| r.clone(),
    )
}

/// A closing pair for an arena: an initial state and a utility continuation.
#[derive(Clone)]
pub struct Context {
    state: Value,
    continuation: Arc<dyn Fn(&Value) -> Value + Send + Sync>,
}

impl Context {
    pub fn new(
        state: Value,
        continuation: impl Fn(&Value) -> Value + Send + Sync + 'static,
    ) -> Context {
        Context { state, continuation: Arc::new(continuation) }
    }

    pub fn state(&self) -> &Value {
        &self.state
    }

    pub fn utility(&self, y: &Value) -> Value {
        (self.continuation)(y)
    }
}

/// The costate a context induces on an arena's parameters: play forward,
/// value the move, and read back the reward vector from coplay.
pub fn costate_of(arena: &Arena, ctx: &Context) -> Result<Costate> {
    if !arena.inner().0.contains(ctx.state()) {
        return Err(Error::TypeMismatch(format!(
            "context state {:?} does not fit boundary {:?}",
            ctx.state(),
            arena.inner().0
        )));
    }
    let plens = arena.plens.clone();
    let state = ctx.state.clone();
    let continuation = ctx.continuation.clone();
    Ok(Costate::new(arena.plens.params().clone(), move |omega| {
        let y = plens.play(omega, &state);
        let utility = continuation(&y);
        let (rewards, _coutility) = plens.coplay(omega, &state, &utility);
        rewards
    }))
}

/// An arena with players together with one selection function per player.
/// The game's joint selection is the Nash product, built on demand.
pub struct OpenGame {
    arena: Arena,
    selections: Vec<(PlayerId, SelectionFn)>,
}

impl OpenGame {
    pub fn new(arena: Arena, selections: Vec<(PlayerId, SelectionFn)>) -> Result<OpenGame> {
        let fact = arena.factorization()?;
        if fact.players().len() != selections.len() {
            return Err(Error::TypeMismatch(
                "one selection function per player required".into(),
            ));
        }
        for ((p, eps), player) in selections.iter().zip(fact.players()) {
            if p != player {
                return Err(Error::TypeMismatch(format!(
                    "selection order mismatch: {p} vs {player}"
                )));
            }
            let expected = (
                fact.strategy_space(p).unwrap().clone(),
                fact.reward_space(p).unwrap().clone(),
            );
            if eps.domain() != &expected {
                return Err(Error::TypeMismatch(format!(
                    "selection domain for {p} does not match the arena"
                )));
            }
        }
        Ok(OpenGame { arena, selections })
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn selections(&self) -> &[(PlayerId, SelectionFn)] {
        &self.selections
    }

    pub fn joint_selection(&self) -> Result<SelectionFn> {
        nash_product(self.selections.clone())
    }

    pub fn equilibria(&self, ctx: &Context) -> Result<Vec<Value>> {
        self.equilibria_capped(ctx, DEFAULT_ENUM_CAP)
    }

    /// Strategy profiles selected by the Nash product against the context's
    /// costate, in canonical order.
    pub fn equilibria_capped(&self, ctx: &Context, cap: u64) -> Result<Vec<Value>> {
        let costate = costate_of(&self.arena, ctx)?;
        self.joint_selection()?.select_capped(&costate, cap)
    }

    pub fn is_equilibrium(&self, ctx: &Context, profile: &Value) -> Result<bool> {
        let costate = costate_of(&self.arena, ctx)?;
        self.joint_selection()?.member(&costate, profile)
    }
}
