//! Multivalued selection functions over an option/reward pair.
//!
//! A selection function over `(O, W)` takes a costate (a total valuation
//! `O -> W`) to a subset of `O`. Argmax returns all maximisers and never
//! breaks ties; the Nash product combines per-player selection functions so
//! that its joint selections are exactly the profiles with no profitable
//! unilateral deviation.

use crate::error::{Error, Result, DEFAULT_ENUM_CAP};
use crate::exec::filter_candidates;
use crate::lens::Lens;
use crate::rational::Rat;
use crate::space::{FinSpace, PlayerId, Value};
use std::sync::Arc;

pub type CostateFn = Arc<dyn Fn(&Value) -> Value + Send + Sync>;
pub type SelectAction = Arc<dyn Fn(&Costate) -> Vec<Value> + Send + Sync>;
pub type ExtractFn = Arc<dyn Fn(&Value) -> Rat + Send + Sync>;

/// A total valuation of the options of `(O, W)`; equivalently a lens from
/// `(O, W)` to the unit pair.
#[derive(Clone)]
pub struct Costate {
    domain: (FinSpace, FinSpace),
    map: CostateFn,
}

impl Costate {
    pub fn new(
        domain: (FinSpace, FinSpace),
        map: impl Fn(&Value) -> Value + Send + Sync + 'static,
    ) -> Costate {
        Costate { domain, map: Arc::new(map) }
    }

    pub fn domain(&self) -> &(FinSpace, FinSpace) {
        &self.domain
    }

    pub fn value(&self, option: &Value) -> Value {
        (self.map)(option)
    }

    /// Pre-composes with a lens into this costate's domain:
    /// `(l ; k)(x) = put_l(x, k(get_l(x)))`.
    pub fn after(&self, l: &Lens) -> Result<Costate> {
        if l.target() != &self.domain {
            return Err(Error::TypeMismatch(format!(
                "costate domain {:?} does not match lens target {:?}",
                self.domain,
                l.target()
            )));
        }
        let l = l.clone();
        let k = self.map.clone();
        Ok(Costate {
            domain: l.source().clone(),
            map: Arc::new(move |x| l.put(x, &k(&l.get(x)))),
        })
    }
}

#[derive(Clone)]
pub struct SelectionFn {
    domain: (FinSpace, FinSpace),
    form: SelForm,
}

#[derive(Clone)]
enum SelForm {
    Argmax(ExtractFn),
    NashProduct(Vec<(PlayerId, SelectionFn)>),
    Pushforward { lens: Lens, inner: Box<SelectionFn> },
    Extensional(SelectAction),
}

/// All options on which the extracted valuation is maximal.
pub fn argmax(
    options: FinSpace,
    rewards: FinSpace,
    extract: impl Fn(&Value) -> Rat + Send + Sync + 'static,
) -> Result<SelectionFn> {
    if options.cardinality()? == 0 {
        return Err(Error::EmptySpace);
    }
    Ok(SelectionFn {
        domain: (options, rewards),
        form: SelForm::Argmax(Arc::new(extract)),
    })
}

/// Transports a selection function along a lens out of its domain.
pub fn pushforward(l: &Lens, eps: &SelectionFn) -> Result<SelectionFn> {
    if l.source() != &eps.domain {
        return Err(Error::TypeMismatch(format!(
            "pushforward lens source {:?} does not match selection domain {:?}",
            l.source(),
            eps.domain
        )));
    }
    Ok(SelectionFn {
        domain: l.target().clone(),
        form: SelForm::Pushforward { lens: l.clone(), inner: Box::new(eps.clone()) },
    })
}

/// Combines per-player selection functions over the player-indexed product
/// of their domains. Membership is the per-player no-profitable-deviation
/// condition.
pub fn nash_product(parts: Vec<(PlayerId, SelectionFn)>) -> Result<SelectionFn> {
    let mut ids = std::collections::HashSet::new();
    for (p, _) in &parts {
        if !ids.insert(p.clone()) {
            return Err(Error::TypeMismatch(format!("duplicate player {p}")));
        }
    }
    let options = FinSpace::PlayerIndexed(
        parts.iter().map(|(p, e)| (p.clone(), e.domain.0.clone())).collect(),
    );
    let rewards = FinSpace::PlayerIndexed(
        parts.iter().map(|(p, e)| (p.clone(), e.domain.1.clone())).collect(),
    );
    Ok(SelectionFn { domain: (options, rewards), form: SelForm::NashProduct(parts) })
}

/// A selection function given directly by its action on costates.
pub fn extensional(
    domain: (FinSpace, FinSpace),
    select: impl Fn(&Costate) -> Vec<Value> + Send + Sync + 'static,
) -> SelectionFn {
    SelectionFn { domain, form: SelForm::Extensional(Arc::new(select)) }
}

impl SelectionFn {
    pub fn domain(&self) -> &(FinSpace, FinSpace) {
        &self.domain
    }

    pub fn select(&self, k: &Costate) -> Result<Vec<Value>> {
        self.select_capped(k, DEFAULT_ENUM_CAP)
    }

    /// The selected subset of the options, in canonical enumeration order.
    pub fn select_capped(&self, k: &Costate, cap: u64) -> Result<Vec<Value>> {
        match &self.form {
            SelForm::Argmax(extract) => {
                let options = self.domain.0.enumerate_capped(cap)?;
                let scored: Vec<(Value, Rat)> = options
                    .into_iter()
                    .map(|o| {
                        let score = extract(&k.value(&o));
                        (o, score)
                    })
                    .collect();
                let best = scored
                    .iter()
                    .map(|(_, s)| s.clone())
                    .max()
                    .ok_or(Error::EmptySpace)?;
                Ok(scored
                    .into_iter()
                    .filter(|(_, s)| *s == best)
                    .map(|(o, _)| o)
                    .collect())
            }
            SelForm::NashProduct(_) => {
                let candidates = self.domain.0.enumerate_capped(cap)?;
                let survivors = filter_candidates(candidates, |omega| {
                    self.member(k, omega).unwrap_or(false)
                });
                Ok(survivors)
            }
            SelForm::Pushforward { lens, inner } => {
                let pulled = k.after(lens)?;
                let chosen = inner.select_capped(&pulled, cap)?;
                let mut image: Vec<Value> = chosen.iter().map(|x| lens.get(x)).collect();
                let target = &lens.target().0;
                image.sort_by_key(|y| target.position_of(y).expect("image is well-typed"));
                image.dedup();
                Ok(image)
            }
            SelForm::Extensional(f) => Ok(f(k)),
        }
    }

    /// Decision form of [`SelectionFn::select`]; for a Nash product this only
    /// runs the per-player deviation scans instead of enumerating the whole
    /// product.
    pub fn member(&self, k: &Costate, candidate: &Value) -> Result<bool> {
        if !self.domain.0.contains(candidate) {
            return Err(Error::TypeMismatch(format!(
                "candidate {candidate:?} does not inhabit {:?}",
                self.domain.0
            )));
        }
        match &self.form {
            SelForm::Argmax(extract) => {
                let mine = extract(&k.value(candidate));
                for other in self.domain.0.enumerate()? {
                    if extract(&k.value(&other)) > mine {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            SelForm::NashProduct(parts) => {
                let entries = candidate.as_by_player();
                for (idx, (player, part)) in parts.iter().enumerate() {
                    let deviation_costate = {
                        let k = k.clone();
                        let base = entries.to_vec();
                        let player = player.clone();
                        Costate::new(part.domain.clone(), move |option| {
                            let mut profile = base.clone();
                            profile[idx] = (profile[idx].0.clone(), option.clone());
                            k.value(&Value::ByPlayer(profile))
                                .player_component(&player)
                                .clone()
                        })
                    };
                    if !part.member(&deviation_costate, &entries[idx].1)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            SelForm::Pushforward { .. } | SelForm::Extensional(_) => {
                Ok(self.select(k)?.contains(candidate))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str) -> PlayerId {
        PlayerId::name(name)
    }

    fn scalar_rewards(owner: &PlayerId) -> FinSpace {
        FinSpace::RewardSpace(vec![owner.clone()])
    }

    fn scalar(owner: &PlayerId, n: i64) -> Value {
        Value::Rewards(vec![(owner.clone(), Rat::from_int(n))])
    }

    fn scalar_argmax(owner: &PlayerId, options: FinSpace) -> SelectionFn {
        let who = owner.clone();
        argmax(options, scalar_rewards(owner), move |w| w.reward_of(&who).clone()).unwrap()
    }

    #[test]
    fn argmax_returns_all_maximisers() {
        let owner = p("p");
        let eps = scalar_argmax(&owner, FinSpace::Range(3));
        let table = [5i64, 2, 5];
        let k = {
            let owner = owner.clone();
            Costate::new(eps.domain().clone(), move |o| {
                scalar(&owner, table[o.as_index() as usize])
            })
        };
        assert_eq!(
            eps.select(&k).unwrap(),
            vec![Value::Index(0), Value::Index(2)]
        );
    }

    #[test]
    fn argmax_constant_selects_everything() {
        let owner = p("p");
        let eps = scalar_argmax(&owner, FinSpace::Range(3));
        let k = {
            let owner = owner.clone();
            Costate::new(eps.domain().clone(), move |_| scalar(&owner, 7))
        };
        assert_eq!(eps.select(&k).unwrap().len(), 3);
        assert!(eps.member(&k, &Value::Index(1)).unwrap());
    }

    #[test]
    fn argmax_on_unit_selects_the_point() {
        let owner = p("p");
        let eps = scalar_argmax(&owner, FinSpace::Unit);
        let k = {
            let owner = owner.clone();
            Costate::new(eps.domain().clone(), move |_| scalar(&owner, 0))
        };
        assert_eq!(eps.select(&k).unwrap(), vec![Value::Point]);
    }

    #[test]
    fn argmax_rejects_empty_options() {
        let owner = p("p");
        let res = argmax(FinSpace::Range(0), scalar_rewards(&owner), |_| Rat::zero());
        assert!(matches!(res, Err(Error::EmptySpace)));
    }

    #[test]
    fn select_picks_larger_value() {
        let owner = p("p");
        let eps = scalar_argmax(&owner, FinSpace::Range(2));
        let k = {
            let owner = owner.clone();
            Costate::new(eps.domain().clone(), move |o| {
                scalar(&owner, o.as_index() as i64)
            })
        };
        assert_eq!(eps.select(&k).unwrap(), vec![Value::Index(1)]);
    }

    #[test]
    fn pushforward_along_identity_is_noop() {
        let owner = p("p");
        let eps = scalar_argmax(&owner, FinSpace::Range(3));
        let id = Lens::identity(eps.domain().clone());
        let pushed = pushforward(&id, &eps).unwrap();
        let table = [1i64, 3, 3];
        let k = {
            let owner = owner.clone();
            Costate::new(eps.domain().clone(), move |o| {
                scalar(&owner, table[o.as_index() as usize])
            })
        };
        assert_eq!(pushed.select(&k).unwrap(), eps.select(&k).unwrap());
    }

    #[test]
    fn pushforward_along_reward_swap_flips_selection() {
        // Options valued in Range(2); the lens swaps the rewards on the way
        // back, so the pushed-forward argmax picks the other option.
        let domain = (FinSpace::Range(2), FinSpace::Range(2));
        let eps = argmax(domain.0.clone(), domain.1.clone(), |w| {
            Rat::from_int(w.as_index() as i64)
        })
        .unwrap();
        let swap = Lens::new(
            domain.clone(),
            domain.clone(),
            |x| x.clone(),
            |_, w| Value::Index(1 - w.as_index()),
        );
        let pushed = pushforward(&swap, &eps).unwrap();
        let k = Costate::new(domain, |o| Value::Index(1 - o.as_index())); // k = (1, 0)
        assert_eq!(eps.select(&k).unwrap(), vec![Value::Index(0)]);
        assert_eq!(pushed.select(&k).unwrap(), vec![Value::Index(1)]);
    }

    /// Two-player game given by a 2x2 payoff table.
    fn two_player_costate(
        alice: &PlayerId,
        bob: &PlayerId,
        domain: (FinSpace, FinSpace),
        table: [[(i64, i64); 2]; 2],
    ) -> Costate {
        let alice = alice.clone();
        let bob = bob.clone();
        Costate::new(domain, move |omega| {
            let a = omega.player_component(&alice).as_index() as usize;
            let b = omega.player_component(&bob).as_index() as usize;
            let (ua, ub) = table[a][b];
            Value::ByPlayer(vec![
                (alice.clone(), scalar(&alice, ua)),
                (bob.clone(), scalar(&bob, ub)),
            ])
        })
    }

    fn profile(alice: &PlayerId, bob: &PlayerId, a: u64, b: u64) -> Value {
        Value::ByPlayer(vec![
            (alice.clone(), Value::Index(a)),
            (bob.clone(), Value::Index(b)),
        ])
    }

    #[test]
    fn nash_product_on_prisoners_dilemma() {
        let alice = p("alice");
        let bob = p("bob");
        let eps = nash_product(vec![
            (alice.clone(), scalar_argmax(&alice, FinSpace::Range(2))),
            (bob.clone(), scalar_argmax(&bob, FinSpace::Range(2))),
        ])
        .unwrap();
        // action 0 = cooperate, 1 = defect
        let k = two_player_costate(
            &alice,
            &bob,
            eps.domain().clone(),
            [[(-1, -1), (-3, 0)], [(0, -3), (-2, -2)]],
        );
        assert_eq!(eps.select(&k).unwrap(), vec![profile(&alice, &bob, 1, 1)]);
        assert!(eps.member(&k, &profile(&alice, &bob, 1, 1)).unwrap());
        assert!(!eps.member(&k, &profile(&alice, &bob, 0, 0)).unwrap());
    }

    #[test]
    fn nash_product_on_matching_pennies_is_empty() {
        let alice = p("alice");
        let bob = p("bob");
        let eps = nash_product(vec![
            (alice.clone(), scalar_argmax(&alice, FinSpace::Range(2))),
            (bob.clone(), scalar_argmax(&bob, FinSpace::Range(2))),
        ])
        .unwrap();
        let k = two_player_costate(
            &alice,
            &bob,
            eps.domain().clone(),
            [[(1, -1), (-1, 1)], [(-1, 1), (1, -1)]],
        );
        assert_eq!(eps.select(&k).unwrap(), Vec::<Value>::new());
    }

    #[test]
    fn unary_nash_product_behaves_as_its_part() {
        let alice = p("alice");
        let eps = nash_product(vec![(
            alice.clone(),
            scalar_argmax(&alice, FinSpace::Range(3)),
        )])
        .unwrap();
        let table = [2i64, 5, 5];
        let k = {
            let alice = alice.clone();
            Costate::new(eps.domain().clone(), move |omega| {
                let a = omega.player_component(&alice).as_index() as usize;
                Value::ByPlayer(vec![(alice.clone(), scalar(&alice, table[a]))])
            })
        };
        let selected = eps.select(&k).unwrap();
        let expect: Vec<Value> = [1u64, 2]
            .into_iter()
            .map(|i| Value::ByPlayer(vec![(alice.clone(), Value::Index(i))]))
            .collect();
        assert_eq!(selected, expect);
    }

    #[test]
    fn member_rejects_ill_typed_candidates() {
        let owner = p("p");
        let eps = scalar_argmax(&owner, FinSpace::Range(2));
        let k = {
            let owner = owner.clone();
            Costate::new(eps.domain().clone(), move |_| scalar(&owner, 0))
        };
        assert!(matches!(
            eps.member(&k, &Value::Index(5)),
            Err(Error::TypeMismatch(_))
        ));
    }

    #[test]
    fn constant_costate_admits_every_candidate() {
        let alice = p("alice");
        let bob = p("bob");
        let eps = nash_product(vec![
            (alice.clone(), scalar_argmax(&alice, FinSpace::Range(2))),
            (bob.clone(), scalar_argmax(&bob, FinSpace::Range(2))),
        ])
        .unwrap();
        let k = two_player_costate(
            &alice,
            &bob,
            eps.domain().clone(),
            [[(3, 3), (3, 3)], [(3, 3), (3, 3)]],
        );
        for omega in eps.domain().0.enumerate().unwrap() {
            assert!(eps.member(&k, &omega).unwrap());
        }
        assert_eq!(eps.select(&k).unwrap().len(), 4);
    }
}
