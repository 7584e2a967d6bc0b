//! Randomized law suites for the lens calculus and the selection machinery,
//! over exhaustively comparable small spaces.

use ogk::arena::{regroup_lens, Arena, Factorization};
use ogk::gen::{rng_for, small_space, table_fn, table_lens, table_plens};
use ogk::lens::{assoc_left, Lens, ParamLens};
use ogk::rational::Rat;
use ogk::selection::{argmax, nash_product, pushforward, Costate, SelectionFn};
use ogk::space::{default_probe, FinSpace, PlayerId, Value};
use rand::rngs::SmallRng;
use rand::Rng;

fn pair(rng: &mut SmallRng) -> (FinSpace, FinSpace) {
    (small_space(rng, 4), small_space(rng, 4))
}

#[test]
fn lens_composition_is_associative_and_unital() {
    let mut rng = rng_for(0x1a55);
    let probe = default_probe();
    for _ in 0..100 {
        let (a, b, c, d) = (pair(&mut rng), pair(&mut rng), pair(&mut rng), pair(&mut rng));
        let l1 = table_lens(&mut rng, a.clone(), b.clone());
        let l2 = table_lens(&mut rng, b.clone(), c.clone());
        let l3 = table_lens(&mut rng, c.clone(), d.clone());

        let left = l1.compose(&l2).unwrap().compose(&l3).unwrap();
        let right = l1.compose(&l2.compose(&l3).unwrap()).unwrap();
        assert!(left.equal(&right, &probe).unwrap(), "associativity failed");

        let lhs = Lens::identity(a.clone()).compose(&l1).unwrap();
        let rhs = l1.compose(&Lens::identity(b.clone())).unwrap();
        assert!(lhs.equal(&l1, &probe).unwrap(), "left identity failed");
        assert!(rhs.equal(&l1, &probe).unwrap(), "right identity failed");
    }
}

#[test]
fn plens_composition_is_associative_up_to_reassociation() {
    let mut rng = rng_for(0x9d2c);
    let probe = default_probe();
    for _ in 0..50 {
        let (pa, pb, pc) = (pair(&mut rng), pair(&mut rng), pair(&mut rng));
        let (a, b, c, d) = (pair(&mut rng), pair(&mut rng), pair(&mut rng), pair(&mut rng));
        let k = table_plens(&mut rng, pa.clone(), a.clone(), b.clone());
        let l = table_plens(&mut rng, pb.clone(), b.clone(), c.clone());
        let m = table_plens(&mut rng, pc.clone(), c.clone(), d.clone());

        let left = k.compose(&l).unwrap().compose(&m).unwrap();
        let right = k.compose(&l.compose(&m).unwrap()).unwrap();
        // ((P x P') x P'') vs (P x (P' x P'')): align along the associator
        let alpha = assoc_left(pa.clone(), pb.clone(), pc.clone());
        let aligned = left.reparametrise(&alpha).unwrap();
        assert!(aligned.equal(&right, &probe).unwrap(), "plens associativity failed");
    }
}

#[test]
fn reparametrisation_is_functorial() {
    let mut rng = rng_for(0x7e1f);
    let probe = default_probe();
    for _ in 0..50 {
        let (pn, pm, pp) = (pair(&mut rng), pair(&mut rng), pair(&mut rng));
        let (x, y) = (pair(&mut rng), pair(&mut rng));
        let l = table_plens(&mut rng, pp.clone(), x.clone(), y.clone());
        let w2 = table_lens(&mut rng, pm.clone(), pp.clone());
        let w1 = table_lens(&mut rng, pn.clone(), pm.clone());

        let fused = l.reparametrise(&w1.compose(&w2).unwrap()).unwrap();
        let staged = l.reparametrise(&w2).unwrap().reparametrise(&w1).unwrap();
        assert!(fused.equal(&staged, &probe).unwrap(), "reparametrisation functoriality failed");
    }
}

/// An extensional wrapper over a selection function's action on costates,
/// used to compare pushed-forward selections.
fn select_on(eps: &SelectionFn, k: &Costate) -> Vec<Value> {
    eps.select(k).unwrap()
}

fn random_costate(rng: &mut SmallRng, domain: (FinSpace, FinSpace)) -> Costate {
    let map = table_fn(rng, &domain.0, &domain.1);
    Costate::new(domain, map)
}

/// Argmax over an enumerable reward space, scored by enumeration rank.
fn rank_argmax(options: FinSpace, rewards: FinSpace) -> SelectionFn {
    let score_space = rewards.clone();
    argmax(options, rewards, move |w| {
        Rat::from_int(score_space.position_of(w).unwrap() as i64)
    })
    .unwrap()
}

#[test]
fn pushforward_is_functorial() {
    let mut rng = rng_for(0x51ab);
    for _ in 0..50 {
        let a = (small_space(&mut rng, 3), small_space(&mut rng, 3));
        let b = (small_space(&mut rng, 3), small_space(&mut rng, 3));
        let c = (small_space(&mut rng, 3), small_space(&mut rng, 3));
        let eps = rank_argmax(a.0.clone(), a.1.clone());

        // identity law
        let pushed_id = pushforward(&Lens::identity(a.clone()), &eps).unwrap();
        for _ in 0..10 {
            let k = random_costate(&mut rng, a.clone());
            assert_eq!(select_on(&pushed_id, &k), select_on(&eps, &k));
        }

        // composition law
        let l1 = table_lens(&mut rng, a.clone(), b.clone());
        let l2 = table_lens(&mut rng, b.clone(), c.clone());
        let fused = pushforward(&l1.compose(&l2).unwrap(), &eps).unwrap();
        let staged = pushforward(&l2, &pushforward(&l1, &eps).unwrap()).unwrap();
        for _ in 0..10 {
            let k = random_costate(&mut rng, c.clone());
            assert_eq!(select_on(&fused, &k), select_on(&staged, &k));
        }
    }
}

fn scalar_rewards(owner: &PlayerId) -> FinSpace {
    FinSpace::RewardSpace(vec![owner.clone()])
}

fn scalar_argmax(owner: &PlayerId, options: FinSpace) -> SelectionFn {
    let who = owner.clone();
    argmax(options, scalar_rewards(owner), move |w| w.reward_of(&who).clone()).unwrap()
}

/// The displayed binary combination: pairs where each side maximises its own
/// coordinate against the other's fixed choice.
fn binary_formula(
    parts: (&SelectionFn, &SelectionFn),
    players: (&PlayerId, &PlayerId),
    k: &Costate,
) -> Vec<Value> {
    let (alice, bob) = players;
    let mut out = Vec::new();
    let xs = parts.0.domain().0.enumerate().unwrap();
    let ys = parts.1.domain().0.enumerate().unwrap();
    for x in &xs {
        for y in &ys {
            let k1 = {
                let k = k.clone();
                let y = y.clone();
                let (alice, bob) = (alice.clone(), bob.clone());
                Costate::new(parts.0.domain().clone(), move |x2| {
                    let profile = Value::ByPlayer(vec![
                        (alice.clone(), x2.clone()),
                        (bob.clone(), y.clone()),
                    ]);
                    k.value(&profile).player_component(&alice).clone()
                })
            };
            let k2 = {
                let k = k.clone();
                let x = x.clone();
                let (alice, bob) = (alice.clone(), bob.clone());
                Costate::new(parts.1.domain().clone(), move |y2| {
                    let profile = Value::ByPlayer(vec![
                        (alice.clone(), x.clone()),
                        (bob.clone(), y2.clone()),
                    ]);
                    k.value(&profile).player_component(&bob).clone()
                })
            };
            if parts.0.member(&k1, x).unwrap() && parts.1.member(&k2, y).unwrap() {
                out.push(Value::ByPlayer(vec![
                    (alice.clone(), x.clone()),
                    (bob.clone(), y.clone()),
                ]));
            }
        }
    }
    out
}

#[test]
fn nash_product_matches_the_binary_formula_exhaustively() {
    // every costate over a 2x2 profile space with rewards drawn from {0,1,2}
    let alice = PlayerId::name("alice");
    let bob = PlayerId::name("bob");
    let eps_a = scalar_argmax(&alice, FinSpace::Range(2));
    let eps_b = scalar_argmax(&bob, FinSpace::Range(2));
    let joint = nash_product(vec![
        (alice.clone(), eps_a.clone()),
        (bob.clone(), eps_b.clone()),
    ])
    .unwrap();
    let domain = joint.domain().clone();
    let profiles = domain.0.enumerate().unwrap();
    let grid = [0i64, 1, 2];
    let cells = profiles.len();
    let combos = 9usize.pow(cells as u32);
    for combo in 0..combos {
        let mut digits = combo;
        let mut table = std::collections::HashMap::new();
        for profile in &profiles {
            let pay_a = grid[digits % 3];
            digits /= 3;
            let pay_b = grid[digits % 3];
            digits /= 3;
            table.insert(profile.clone(), (pay_a, pay_b));
        }
        let k = {
            let table = table.clone();
            let (alice, bob) = (alice.clone(), bob.clone());
            Costate::new(domain.clone(), move |profile| {
                let (a, b) = table[profile];
                Value::ByPlayer(vec![
                    (alice.clone(), Value::Rewards(vec![(alice.clone(), Rat::from_int(a))])),
                    (bob.clone(), Value::Rewards(vec![(bob.clone(), Rat::from_int(b))])),
                ])
            })
        };
        assert_eq!(
            joint.select(&k).unwrap(),
            binary_formula((&eps_a, &eps_b), (&alice, &bob), &k),
            "binary formula mismatch"
        );
    }
}

#[test]
fn nash_product_matches_the_binary_formula_on_random_larger_spaces() {
    let mut rng = rng_for(0xb07);
    let alice = PlayerId::name("alice");
    let bob = PlayerId::name("bob");
    for _ in 0..50 {
        let na = rng.random_range(1..=4u64);
        let nb = rng.random_range(1..=4u64);
        let eps_a = scalar_argmax(&alice, FinSpace::Range(na));
        let eps_b = scalar_argmax(&bob, FinSpace::Range(nb));
        let joint = nash_product(vec![
            (alice.clone(), eps_a.clone()),
            (bob.clone(), eps_b.clone()),
        ])
        .unwrap();
        let domain = joint.domain().clone();
        let profiles = domain.0.enumerate().unwrap();
        let table: std::collections::HashMap<Value, (i64, i64)> = profiles
            .iter()
            .map(|p| (p.clone(), (rng.random_range(0..3), rng.random_range(0..3))))
            .collect();
        let k = {
            let table = table.clone();
            let (alice, bob) = (alice.clone(), bob.clone());
            Costate::new(domain.clone(), move |profile| {
                let (a, b) = table[profile];
                Value::ByPlayer(vec![
                    (alice.clone(), Value::Rewards(vec![(alice.clone(), Rat::from_int(a))])),
                    (bob.clone(), Value::Rewards(vec![(bob.clone(), Rat::from_int(b))])),
                ])
            })
        };
        assert_eq!(
            joint.select(&k).unwrap(),
            binary_formula((&eps_a, &eps_b), (&alice, &bob), &k)
        );
    }
}

#[test]
fn member_and_select_cohere() {
    let mut rng = rng_for(0xc0de);
    let alice = PlayerId::name("alice");
    let bob = PlayerId::name("bob");
    for _ in 0..50 {
        let na = rng.random_range(1..=3u64);
        let nb = rng.random_range(1..=3u64);
        let joint = nash_product(vec![
            (alice.clone(), scalar_argmax(&alice, FinSpace::Range(na))),
            (bob.clone(), scalar_argmax(&bob, FinSpace::Range(nb))),
        ])
        .unwrap();
        let domain = joint.domain().clone();
        let profiles = domain.0.enumerate().unwrap();
        let table: std::collections::HashMap<Value, (i64, i64)> = profiles
            .iter()
            .map(|p| (p.clone(), (rng.random_range(0..3), rng.random_range(0..3))))
            .collect();
        let k = {
            let table = table.clone();
            let (alice, bob) = (alice.clone(), bob.clone());
            Costate::new(domain.clone(), move |profile| {
                let (a, b) = table[profile];
                Value::ByPlayer(vec![
                    (alice.clone(), Value::Rewards(vec![(alice.clone(), Rat::from_int(a))])),
                    (bob.clone(), Value::Rewards(vec![(bob.clone(), Rat::from_int(b))])),
                ])
            })
        };
        let selected = joint.select(&k).unwrap();
        for profile in &profiles {
            assert_eq!(
                joint.member(&k, profile).unwrap(),
                selected.contains(profile),
                "member/select disagree on {profile:?}"
            );
        }
    }
}

#[test]
fn argmax_selection_is_invariant_under_monotone_rescaling() {
    let mut rng = rng_for(0x5ca1e);
    let alice = PlayerId::name("alice");
    for _ in 0..50 {
        let n = rng.random_range(1..=4u64);
        let eps = scalar_argmax(&alice, FinSpace::Range(n));
        let table: Vec<i64> = (0..n).map(|_| rng.random_range(-3..4)).collect();
        let base = {
            let table = table.clone();
            let alice = alice.clone();
            Costate::new(eps.domain().clone(), move |o| {
                Value::Rewards(vec![(alice.clone(), Rat::from_int(table[o.as_index() as usize]))])
            })
        };
        // r -> 2r + 1, strictly monotone
        let rescaled = {
            let table = table.clone();
            let alice = alice.clone();
            Costate::new(eps.domain().clone(), move |o| {
                let r = Rat::from_int(table[o.as_index() as usize]);
                let two_r = &r + &r;
                Value::Rewards(vec![(alice.clone(), &two_r + &Rat::one())])
            })
        };
        assert_eq!(eps.select(&base).unwrap(), eps.select(&rescaled).unwrap());
    }
}

/// A random arena with the given players over trivial boundaries, built from
/// a random table lens on player-indexed parameters.
fn random_factored_arena(rng: &mut SmallRng, players: &[PlayerId]) -> Arena {
    let strategies: Vec<FinSpace> = players.iter().map(|_| small_space(rng, 3)).collect();
    let rewards: Vec<FinSpace> = players.iter().map(|_| small_space(rng, 3)).collect();
    let fact = Factorization::new(players.to_vec(), strategies, rewards);
    let (pp, pq) = fact.params();
    let inner = (small_space(rng, 2), small_space(rng, 2));
    let target = (small_space(rng, 3), small_space(rng, 3));
    let plens = table_plens(rng, (pp, pq), inner, target);
    Arena::with_players(plens, fact)
}

#[test]
fn regroup_preserves_behaviour_under_the_reindexing_bijection() {
    let mut rng = rng_for(0xface);
    for trial in 0..50 {
        let players: Vec<PlayerId> =
            (0..rng.random_range(1..=3)).map(|i| PlayerId::name(format!("p{i}"))).collect();
        let arena = random_factored_arena(&mut rng, &players);
        // a random assignment onto a set that may add dummies and merge
        let new_players: Vec<PlayerId> =
            (0..rng.random_range(1..=3)).map(|i| PlayerId::name(format!("q{i}"))).collect();
        let targets: Vec<PlayerId> = players
            .iter()
            .map(|_| new_players[rng.random_range(0..new_players.len())].clone())
            .collect();
        let assign = {
            let players = players.clone();
            let targets = targets.clone();
            move |p: &PlayerId| {
                let i = players.iter().position(|q| q == p).unwrap();
                targets[i].clone()
            }
        };
        let (new_fact, w) =
            regroup_lens(arena.factorization().unwrap(), &new_players, &assign).unwrap();
        let regrouped = ogk::arena::regroup(&arena, new_players.clone(), assign).unwrap();
        assert_eq!(regrouped.factorization().unwrap(), &new_fact);

        let (new_profiles, _) = new_fact.params();
        for profile in new_profiles.enumerate().unwrap() {
            let original_profile = w.get(&profile);
            for state in arena.inner().0.enumerate().unwrap() {
                assert_eq!(
                    regrouped.play(&profile, &state).unwrap(),
                    arena.play(&original_profile, &state).unwrap(),
                    "trial {trial}: play changed under regrouping"
                );
                for utility in arena.target().1.enumerate().unwrap() {
                    let (s_new, q_new) =
                        regrouped.coplay(&profile, &state, &utility).unwrap();
                    let (s_old, q_old) = arena.coplay(&original_profile, &state, &utility).unwrap();
                    assert_eq!(s_new, s_old);
                    assert_eq!(q_new, w.put(&profile, &q_old));
                }
            }
        }
    }
}

#[test]
fn tensor_of_identity_plenses_is_an_identity() {
    let mut rng = rng_for(0x1d);
    let probe = default_probe();
    for _ in 0..50 {
        let a = pair(&mut rng);
        let b = pair(&mut rng);
        let t = ParamLens::from_lens(Lens::identity(a.clone()))
            .tensor(&ParamLens::from_lens(Lens::identity(b.clone())));
        // behaviourally the identity on the product pair
        let product = (
            FinSpace::pair(a.0.clone(), b.0.clone()),
            FinSpace::pair(a.1.clone(), b.1.clone()),
        );
        for x in product.0.probe_values(&probe) {
            let padded = Value::pair(Value::pair(Value::Point, Value::Point), x.clone());
            assert_eq!(t.underlying().get(&padded), x);
        }
    }
}
