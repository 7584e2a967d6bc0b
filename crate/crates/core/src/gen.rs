//! Seeded random game generators, shared by the randomized test suites, the
//! benchmarks, and the `gen` CLI command. All generation is deterministic in
//! the seed.

use crate::exform::{IETree, InfoSet, InfoSetTable, PETree};
use crate::gamefile::{ExtensiveDoc, GameBody, GameDoc, NormalFormDoc};
use crate::rational::Rat;
use crate::space::PlayerId;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone)]
pub struct TreeGenConfig {
    pub players: usize,
    pub max_depth: u32,
    pub max_arity: u64,
    pub reward_range: (i64, i64),
    /// Trees whose profile space exceeds this are resampled.
    pub max_profiles: u128,
}

impl Default for TreeGenConfig {
    fn default() -> TreeGenConfig {
        TreeGenConfig {
            players: 3,
            max_depth: 3,
            max_arity: 3,
            reward_range: (0, 4),
            max_profiles: 500,
        }
    }
}

pub fn rng_for(seed: u64) -> SmallRng {
    SmallRng::seed_from_u64(seed)
}

pub fn player_names(count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("p{i}")).collect()
}

fn random_rewards(rng: &mut SmallRng, cfg: &TreeGenConfig) -> Vec<Rat> {
    (0..cfg.players)
        .map(|_| Rat::from_int(rng.random_range(cfg.reward_range.0..=cfg.reward_range.1)))
        .collect()
}

/// A random perfect-information tree over players `p1..pk`, with its profile
/// space kept within the configured bound.
pub fn gen_petree(rng: &mut SmallRng, cfg: &TreeGenConfig) -> (PETree, Vec<PlayerId>) {
    let players: Vec<PlayerId> =
        player_names(cfg.players).into_iter().map(PlayerId::Name).collect();
    loop {
        let tree = grow_pet(rng, cfg, &players, cfg.max_depth);
        let profiles = crate::exform::profiles_pet(&tree)
            .cardinality()
            .expect("profile spaces of generated trees are finite");
        if profiles <= cfg.max_profiles {
            return (tree, players);
        }
    }
}

fn grow_pet(rng: &mut SmallRng, cfg: &TreeGenConfig, players: &[PlayerId], depth: u32) -> PETree {
    // bias towards leaves as the depth budget runs out
    let leaf_chance = if depth == 0 { 1.0 } else { 0.3 };
    if rng.random::<f64>() < leaf_chance {
        return PETree::Leaf(random_rewards(rng, cfg));
    }
    let player = players[rng.random_range(0..players.len())].clone();
    let arity = rng.random_range(1..=cfg.max_arity);
    let children = (0..arity).map(|_| grow_pet(rng, cfg, players, depth - 1)).collect();
    PETree::Node { player, children }
}

/// A random imperfect-information tree: a perfect-information tree whose
/// singleton information sets are randomly merged within same-player,
/// same-arity groups.
pub fn gen_ietree(
    rng: &mut SmallRng,
    cfg: &TreeGenConfig,
) -> (IETree, InfoSetTable, Vec<PlayerId>) {
    let (pet, players) = gen_petree(rng, cfg);
    let (iet, table) = crate::exform::pet_to_singleton_iet(&pet);
    let (iet, table) = merge_random_sets(rng, iet, table);
    (iet, table, players)
}

/// Randomly merges information sets that share an owner and arity.
pub fn merge_random_sets(
    rng: &mut SmallRng,
    tree: IETree,
    table: InfoSetTable,
) -> (IETree, InfoSetTable) {
    let mut groups: std::collections::HashMap<(PlayerId, u64), Vec<usize>> =
        std::collections::HashMap::new();
    for (idx, set) in table.sets().iter().enumerate() {
        groups.entry((set.owner.clone(), set.arity)).or_default().push(idx);
    }
    // old set index -> representative old index
    let mut representative: Vec<usize> = (0..table.len()).collect();
    for members in groups.values() {
        let mut open: Vec<usize> = Vec::new();
        for &idx in members {
            if !open.is_empty() && rng.random::<f64>() < 0.5 {
                let target = open[rng.random_range(0..open.len())];
                representative[idx] = target;
            } else {
                open.push(idx);
            }
        }
    }
    // compact representatives into a fresh table, keeping first-seen order
    let mut new_index: std::collections::HashMap<usize, usize> =
        std::collections::HashMap::new();
    let mut sets = Vec::new();
    for &rep in &representative {
        if let std::collections::hash_map::Entry::Vacant(slot) = new_index.entry(rep) {
            let set = table.get(rep);
            slot.insert(sets.len());
            sets.push(InfoSet {
                label: format!("h{}", sets.len()),
                owner: set.owner.clone(),
                arity: set.arity,
            });
        }
    }
    let tree = relabel(tree, &|old| new_index[&representative[old]]);
    (tree, InfoSetTable::new(sets))
}

fn relabel(tree: IETree, map: &impl Fn(usize) -> usize) -> IETree {
    match tree {
        IETree::Leaf(r) => IETree::Leaf(r),
        IETree::Node { set, children } => IETree::Node {
            set: map(set),
            children: children.into_iter().map(|c| relabel(c, map)).collect(),
        },
    }
}

/// Move label alphabets used by generated documents.
fn move_labels(arity: u64) -> Vec<String> {
    const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
    (0..arity as usize).map(|i| NAMES[i].to_string()).collect()
}

/// A random extensive-form document (possibly with shared information sets).
/// The table is laid out the way the parser builds it, so printing and
/// reparsing reproduces the document exactly.
pub fn gen_ext_doc(rng: &mut SmallRng, cfg: &TreeGenConfig) -> GameDoc {
    let (tree, table, _) = gen_ietree(rng, cfg);
    let players = player_names(cfg.players);
    // sets occurring exactly once print as :owner singletons; shared sets
    // are declared up front
    let mut occurrences: std::collections::HashMap<usize, usize> =
        std::collections::HashMap::new();
    count_occurrences(&tree, &mut occurrences);
    let singleton: Vec<bool> = (0..table.len())
        .map(|idx| occurrences.get(&idx).copied().unwrap_or(0) == 1)
        .collect();
    // parser layout: declared sets first (declaration order), then generated
    // singletons in depth-first first-occurrence order with `_nK` labels
    let declared: Vec<usize> = (0..table.len()).filter(|&i| !singleton[i]).collect();
    let mut dfs_generated = Vec::new();
    collect_generated_order(&tree, &singleton, &mut dfs_generated);
    let mut old_to_new = vec![usize::MAX; table.len()];
    let mut sets = Vec::new();
    let mut generated = Vec::new();
    for &old in &declared {
        old_to_new[old] = sets.len();
        let set = table.get(old);
        sets.push(InfoSet {
            label: format!("h{}", sets.len()),
            owner: set.owner.clone(),
            arity: set.arity,
        });
        generated.push(false);
    }
    for (k, &old) in dfs_generated.iter().enumerate() {
        old_to_new[old] = sets.len();
        let set = table.get(old);
        sets.push(InfoSet {
            label: format!("_n{k}"),
            owner: set.owner.clone(),
            arity: set.arity,
        });
        generated.push(true);
    }
    let tree = relabel(tree, &|old| old_to_new[old]);
    let table = InfoSetTable::new(sets);
    let labels: Vec<Vec<String>> = table.sets().iter().map(|s| move_labels(s.arity)).collect();
    GameDoc {
        players,
        body: GameBody::Extensive(ExtensiveDoc {
            table,
            move_labels: labels,
            generated,
            tree,
        }),
    }
}

fn collect_generated_order(tree: &IETree, singleton: &[bool], out: &mut Vec<usize>) {
    if let IETree::Node { set, children } = tree {
        if singleton[*set] && !out.contains(set) {
            out.push(*set);
        }
        for child in children {
            collect_generated_order(child, singleton, out);
        }
    }
}

fn count_occurrences(tree: &IETree, out: &mut std::collections::HashMap<usize, usize>) {
    if let IETree::Node { set, children } = tree {
        *out.entry(*set).or_default() += 1;
        for child in children {
            count_occurrences(child, out);
        }
    }
}

/// A random normal-form document.
pub fn gen_nf_doc(rng: &mut SmallRng, players: usize, max_actions: u64) -> GameDoc {
    let names = player_names(players);
    let action_labels: Vec<Vec<String>> = (0..players)
        .map(|_| move_labels(rng.random_range(1..=max_actions)))
        .collect();
    let rows: usize = action_labels.iter().map(|a| a.len()).product();
    let payoffs: Vec<Vec<Rat>> = (0..rows)
        .map(|_| (0..players).map(|_| Rat::from_int(rng.random_range(0..=4))).collect())
        .collect();
    GameDoc {
        players: names,
        body: GameBody::NormalForm(NormalFormDoc { action_labels, payoffs }),
    }
}

/// A random document of either kind, deterministic in the seed.
pub fn gen_doc(seed: u64, cfg: &TreeGenConfig) -> GameDoc {
    let mut rng = rng_for(seed);
    if rng.random::<f64>() < 0.7 {
        gen_ext_doc(&mut rng, cfg)
    } else {
        gen_nf_doc(&mut rng, cfg.players.max(1), cfg.max_arity.max(2))
    }
}

// ---------------------------------------------------------------------------
// Random lenses over small spaces, for the algebraic law suites
// ---------------------------------------------------------------------------

use crate::lens::{Lens, ParamLens};
use crate::space::{FinSpace, Value};

/// A random fully enumerable space of at most `max_size` elements.
pub fn small_space(rng: &mut SmallRng, max_size: u64) -> FinSpace {
    match rng.random_range(0..6u8) {
        0 => FinSpace::Unit,
        1 | 2 => FinSpace::Range(rng.random_range(1..=max_size)),
        3 => FinSpace::pair(
            FinSpace::Range(rng.random_range(1..=2)),
            FinSpace::Range(rng.random_range(1..=2)),
        ),
        4 => FinSpace::Sum(vec![
            FinSpace::Unit,
            FinSpace::Range(rng.random_range(1..=max_size.saturating_sub(1).max(1))),
        ]),
        _ => FinSpace::Product(vec![]),
    }
}

/// A random total map between enumerable spaces, as a frozen table.
pub fn table_fn(
    rng: &mut SmallRng,
    source: &FinSpace,
    target: &FinSpace,
) -> impl Fn(&Value) -> Value + Send + Sync + 'static {
    let outputs = target.enumerate().expect("target must be enumerable");
    let table: std::collections::HashMap<Value, Value> = source
        .enumerate()
        .expect("source must be enumerable")
        .into_iter()
        .map(|x| (x, outputs[rng.random_range(0..outputs.len())].clone()))
        .collect();
    move |x: &Value| table[x].clone()
}

/// A random lens between enumerable boundary pairs: an arbitrary total `get`
/// table and an arbitrary total `put` table.
pub fn table_lens(
    rng: &mut SmallRng,
    source: (FinSpace, FinSpace),
    target: (FinSpace, FinSpace),
) -> Lens {
    let get_table = table_fn(rng, &source.0, &target.0);
    let put_source = FinSpace::pair(source.0.clone(), target.1.clone());
    let put_table = table_fn(rng, &put_source, &source.1);
    Lens::new(
        source,
        target,
        get_table,
        move |x, r| put_table(&Value::pair(x.clone(), r.clone())),
    )
}

/// A random parametrised lens with enumerable parameters and boundaries.
pub fn table_plens(
    rng: &mut SmallRng,
    params: (FinSpace, FinSpace),
    inner: (FinSpace, FinSpace),
    target: (FinSpace, FinSpace),
) -> ParamLens {
    let source = (
        FinSpace::pair(params.0.clone(), inner.0.clone()),
        FinSpace::pair(params.1.clone(), inner.1.clone()),
    );
    ParamLens::new(params, inner, table_lens(rng, source, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exform::{profiles_iet, profiles_pet};
    use crate::gamefile;

    #[test]
    fn generated_trees_respect_the_profile_bound() {
        let cfg = TreeGenConfig::default();
        let mut rng = rng_for(7);
        for _ in 0..50 {
            let (tree, _) = gen_petree(&mut rng, &cfg);
            assert!(profiles_pet(&tree).cardinality().unwrap() <= cfg.max_profiles);
        }
    }

    #[test]
    fn merged_sets_stay_well_formed() {
        let cfg = TreeGenConfig::default();
        let mut rng = rng_for(11);
        for _ in 0..50 {
            let (tree, table, _) = gen_ietree(&mut rng, &cfg);
            fn check(tree: &IETree, table: &InfoSetTable) {
                if let IETree::Node { set, children } = tree {
                    assert_eq!(table.arity(*set) as usize, children.len());
                    for child in children {
                        check(child, table);
                    }
                }
            }
            check(&tree, &table);
            assert!(
                profiles_iet(&tree, &table).cardinality().unwrap()
                    <= profiles_pet(&crate::exform::iet_to_pet(&tree, &table))
                        .cardinality()
                        .unwrap()
            );
        }
    }

    #[test]
    fn generated_documents_parse_and_validate() {
        let cfg = TreeGenConfig::default();
        for seed in 0..100 {
            let doc = gen_doc(seed, &cfg);
            let printed = gamefile::print(&doc);
            let (reparsed, _) = gamefile::parse(&printed)
                .unwrap_or_else(|e| panic!("seed {seed}: {e:?}\n{printed}"));
            assert_eq!(doc, reparsed, "seed {seed} failed to round trip");
        }
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let cfg = TreeGenConfig::default();
        assert_eq!(gen_doc(42, &cfg), gen_doc(42, &cfg));
    }
}

