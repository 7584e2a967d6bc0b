//! Lenses and parametrised lenses over pairs of spaces.
//!
//! A lens from `(X, S)` to `(Y, R)` is a forward map `get : X -> Y` together
//! with a backward map `put : X x R -> S`. A parametrised lens additionally
//! carries a parameter pair `(P, Q)`; it is stored as a plain lens from
//! `(P x X, Q x S)` to `(Y, R)`. Parameter products are kept nested exactly
//! as composition builds them; canonical reassociation lenses are inserted
//! explicitly rather than flattening tuples.

use crate::error::{Error, Result, DEFAULT_ENUM_CAP};
use crate::rational::Rat;
use crate::space::{FinSpace, Value};
use std::sync::Arc;

pub type GetFn = Arc<dyn Fn(&Value) -> Value + Send + Sync>;
pub type PutFn = Arc<dyn Fn(&Value, &Value) -> Value + Send + Sync>;

#[derive(Clone)]
pub struct Lens {
    source: (FinSpace, FinSpace),
    target: (FinSpace, FinSpace),
    get: GetFn,
    put: PutFn,
}

impl std::fmt::Debug for Lens {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lens")
            .field("source", &self.source)
            .field("target", &self.target)
            .finish_non_exhaustive()
    }
}

impl Lens {
    pub fn new(
        source: (FinSpace, FinSpace),
        target: (FinSpace, FinSpace),
        get: impl Fn(&Value) -> Value + Send + Sync + 'static,
        put: impl Fn(&Value, &Value) -> Value + Send + Sync + 'static,
    ) -> Lens {
        Lens { source, target, get: Arc::new(get), put: Arc::new(put) }
    }

    pub fn source(&self) -> &(FinSpace, FinSpace) {
        &self.source
    }

    pub fn target(&self) -> &(FinSpace, FinSpace) {
        &self.target
    }

    pub fn get(&self, x: &Value) -> Value {
        debug_assert!(self.source.0.contains(x), "get input ill-typed: {x:?}");
        (self.get)(x)
    }

    pub fn put(&self, x: &Value, r: &Value) -> Value {
        debug_assert!(self.source.0.contains(x), "put input ill-typed: {x:?}");
        debug_assert!(self.target.1.contains(r), "put feedback ill-typed: {r:?}");
        (self.put)(x, r)
    }

    pub fn identity(pair: (FinSpace, FinSpace)) -> Lens {
        Lens::new(
            pair.clone(),
            pair,
            |x| x.clone(),
            |_, s| s.clone(),
        )
    }

    /// Diagrammatic composition `self ; second`.
    pub fn compose(&self, second: &Lens) -> Result<Lens> {
        if self.target != second.source {
            return Err(Error::TypeMismatch(format!(
                "lens boundary mismatch: {:?} vs {:?}",
                self.target, second.source
            )));
        }
        let first = self.clone();
        let second = second.clone();
        let get1 = first.get.clone();
        let get2 = second.get.clone();
        let put1 = first.put.clone();
        let put2 = second.put.clone();
        Ok(Lens {
            source: first.source.clone(),
            target: second.target.clone(),
            get: Arc::new(move |x| get2(&get1(x))),
            put: Arc::new({
                let get1 = first.get.clone();
                move |x, t| put1(x, &put2(&get1(x), t))
            }),
        })
    }

    /// Parallel composition acting componentwise on pairs.
    pub fn tensor(&self, other: &Lens) -> Lens {
        let source = (
            FinSpace::pair(self.source.0.clone(), other.source.0.clone()),
            FinSpace::pair(self.source.1.clone(), other.source.1.clone()),
        );
        let target = (
            FinSpace::pair(self.target.0.clone(), other.target.0.clone()),
            FinSpace::pair(self.target.1.clone(), other.target.1.clone()),
        );
        let (get_a, get_b) = (self.get.clone(), other.get.clone());
        let (put_a, put_b) = (self.put.clone(), other.put.clone());
        Lens {
            source,
            target,
            get: Arc::new(move |x| {
                let (xa, xb) = x.split_pair();
                Value::pair(get_a(xa), get_b(xb))
            }),
            put: Arc::new(move |x, r| {
                let (xa, xb) = x.split_pair();
                let (ra, rb) = r.split_pair();
                Value::pair(put_a(xa, ra), put_b(xb, rb))
            }),
        }
    }

    /// Extensional equality over enumerable forward positions; maps out of
    /// reward positions are compared on the probe grid only.
    pub fn equal(&self, other: &Lens, probe: &[Rat]) -> Result<bool> {
        self.equal_capped(other, probe, DEFAULT_ENUM_CAP)
    }

    pub fn equal_capped(&self, other: &Lens, probe: &[Rat], cap: u64) -> Result<bool> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::NotComparable);
        }
        let xs = self.source.0.probe_values(probe);
        let rs = self.target.1.probe_values(probe);
        let needed = (xs.len() as u128) * (1 + rs.len() as u128);
        if needed > u128::from(cap) {
            return Err(Error::CapExceeded { needed, cap });
        }
        for x in &xs {
            if self.get(x) != other.get(x) {
                return Ok(false);
            }
            for r in &rs {
                if self.put(x, r) != other.put(x, r) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Reassociator `(A x B) x C -> A x (B x C)` on both sides of a lens boundary.
pub fn assoc_right(a: (FinSpace, FinSpace), b: (FinSpace, FinSpace), c: (FinSpace, FinSpace)) -> Lens {
    let source = (
        FinSpace::pair(FinSpace::pair(a.0.clone(), b.0.clone()), c.0.clone()),
        FinSpace::pair(FinSpace::pair(a.1.clone(), b.1.clone()), c.1.clone()),
    );
    let target = (
        FinSpace::pair(a.0, FinSpace::pair(b.0, c.0)),
        FinSpace::pair(a.1, FinSpace::pair(b.1, c.1)),
    );
    Lens::new(
        source,
        target,
        |x| {
            let (ab, c) = x.split_pair();
            let (a, b) = ab.split_pair();
            Value::pair(a.clone(), Value::pair(b.clone(), c.clone()))
        },
        |_, r| {
            let (a, bc) = r.split_pair();
            let (b, c) = bc.split_pair();
            Value::pair(Value::pair(a.clone(), b.clone()), c.clone())
        },
    )
}

/// Reassociator `A x (B x C) -> (A x B) x C` on both sides.
pub fn assoc_left(a: (FinSpace, FinSpace), b: (FinSpace, FinSpace), c: (FinSpace, FinSpace)) -> Lens {
    let source = (
        FinSpace::pair(a.0.clone(), FinSpace::pair(b.0.clone(), c.0.clone())),
        FinSpace::pair(a.1.clone(), FinSpace::pair(b.1.clone(), c.1.clone())),
    );
    let target = (
        FinSpace::pair(FinSpace::pair(a.0, b.0), c.0),
        FinSpace::pair(FinSpace::pair(a.1, b.1), c.1),
    );
    Lens::new(
        source,
        target,
        |x| {
            let (a, bc) = x.split_pair();
            let (b, c) = bc.split_pair();
            Value::pair(Value::pair(a.clone(), b.clone()), c.clone())
        },
        |_, r| {
            let (ab, c) = r.split_pair();
            let (a, b) = ab.split_pair();
            Value::pair(a.clone(), Value::pair(b.clone(), c.clone()))
        },
    )
}

/// A lens from `(P x X, Q x S)` to `(Y, R)` together with the split of its
/// source into parameters `(P, Q)` and inner boundary `(X, S)`.
#[derive(Clone, Debug)]
pub struct ParamLens {
    params: (FinSpace, FinSpace),
    inner: (FinSpace, FinSpace),
    lens: Lens,
}

impl ParamLens {
    pub fn new(params: (FinSpace, FinSpace), inner: (FinSpace, FinSpace), lens: Lens) -> ParamLens {
        let expected = (
            FinSpace::pair(params.0.clone(), inner.0.clone()),
            FinSpace::pair(params.1.clone(), inner.1.clone()),
        );
        assert_eq!(
            lens.source, expected,
            "underlying lens source must split as parameters times inner boundary"
        );
        ParamLens { params, inner, lens }
    }

    /// A plain lens viewed as a `(Unit, Unit)`-parametrised lens.
    pub fn from_lens(lens: Lens) -> ParamLens {
        let inner = lens.source.clone();
        let params = (FinSpace::Unit, FinSpace::Unit);
        let unwrap = Lens::new(
            (
                FinSpace::pair(FinSpace::Unit, inner.0.clone()),
                FinSpace::pair(FinSpace::Unit, inner.1.clone()),
            ),
            inner.clone(),
            |px| px.split_pair().1.clone(),
            |_, s| Value::pair(Value::Point, s.clone()),
        );
        let lens = unwrap.compose(&lens).expect("unit wrapper composes");
        ParamLens { params, inner, lens }
    }

    pub fn params(&self) -> &(FinSpace, FinSpace) {
        &self.params
    }

    pub fn inner(&self) -> &(FinSpace, FinSpace) {
        &self.inner
    }

    pub fn target(&self) -> &(FinSpace, FinSpace) {
        &self.lens.target
    }

    pub fn underlying(&self) -> &Lens {
        &self.lens
    }

    /// Forward pass `P x X -> Y`.
    pub fn play(&self, param: &Value, x: &Value) -> Value {
        self.lens.get(&Value::pair(param.clone(), x.clone()))
    }

    /// Backward pass `P x X x R -> Q x S`, returned as `(q, s)`.
    pub fn coplay(&self, param: &Value, x: &Value, r: &Value) -> (Value, Value) {
        let out = self.lens.put(&Value::pair(param.clone(), x.clone()), r);
        let (q, s) = out.split_pair();
        (q.clone(), s.clone())
    }

    /// Sequential composition; parameters accumulate as `(P x P', Q x Q')`.
    pub fn compose(&self, second: &ParamLens) -> Result<ParamLens> {
        if self.target() != &second.inner {
            return Err(Error::TypeMismatch(format!(
                "parametrised boundary mismatch: {:?} vs {:?}",
                self.target(),
                second.inner
            )));
        }
        let params = (
            FinSpace::pair(self.params.0.clone(), second.params.0.clone()),
            FinSpace::pair(self.params.1.clone(), second.params.1.clone()),
        );
        // ((P x P') x X, (Q x Q') x S) -> (P' x (P x X), Q' x (Q x S))
        let shuffle = {
            let source = (
                FinSpace::pair(params.0.clone(), self.inner.0.clone()),
                FinSpace::pair(params.1.clone(), self.inner.1.clone()),
            );
            let target = (
                FinSpace::pair(
                    second.params.0.clone(),
                    FinSpace::pair(self.params.0.clone(), self.inner.0.clone()),
                ),
                FinSpace::pair(
                    second.params.1.clone(),
                    FinSpace::pair(self.params.1.clone(), self.inner.1.clone()),
                ),
            );
            Lens::new(
                source,
                target,
                |x| {
                    let (pp, x) = x.split_pair();
                    let (p, p2) = pp.split_pair();
                    Value::pair(p2.clone(), Value::pair(p.clone(), x.clone()))
                },
                |_, r| {
                    let (q2, qs) = r.split_pair();
                    let (q, s) = qs.split_pair();
                    Value::pair(Value::pair(q.clone(), q2.clone()), s.clone())
                },
            )
        };
        let id_second_params = Lens::identity((second.params.0.clone(), second.params.1.clone()));
        let mid = id_second_params.tensor(&self.lens);
        let lens = shuffle.compose(&mid)?.compose(&second.lens)?;
        Ok(ParamLens { params, inner: self.inner.clone(), lens })
    }

    /// Pre-composes the parameter boundary with `w`, whose target must be the
    /// current parameter pair.
    pub fn reparametrise(&self, w: &Lens) -> Result<ParamLens> {
        if w.target != self.params {
            return Err(Error::TypeMismatch(format!(
                "reparametrisation target {:?} does not match parameters {:?}",
                w.target, self.params
            )));
        }
        let id_inner = Lens::identity(self.inner.clone());
        let lens = w.tensor(&id_inner).compose(&self.lens)?;
        Ok(ParamLens { params: w.source.clone(), inner: self.inner.clone(), lens })
    }

    /// Parallel composition; parameters and boundaries multiply pairwise.
    pub fn tensor(&self, other: &ParamLens) -> ParamLens {
        let params = (
            FinSpace::pair(self.params.0.clone(), other.params.0.clone()),
            FinSpace::pair(self.params.1.clone(), other.params.1.clone()),
        );
        let inner = (
            FinSpace::pair(self.inner.0.clone(), other.inner.0.clone()),
            FinSpace::pair(self.inner.1.clone(), other.inner.1.clone()),
        );
        // ((P x P') x (X x X'), ..) -> ((P x X) x (P' x X'), ..)
        let interchange = {
            let source = (
                FinSpace::pair(params.0.clone(), inner.0.clone()),
                FinSpace::pair(params.1.clone(), inner.1.clone()),
            );
            let target = (
                FinSpace::pair(
                    FinSpace::pair(self.params.0.clone(), self.inner.0.clone()),
                    FinSpace::pair(other.params.0.clone(), other.inner.0.clone()),
                ),
                FinSpace::pair(
                    FinSpace::pair(self.params.1.clone(), self.inner.1.clone()),
                    FinSpace::pair(other.params.1.clone(), other.inner.1.clone()),
                ),
            );
            Lens::new(
                source,
                target,
                |x| {
                    let (ps, xs) = x.split_pair();
                    let (p, p2) = ps.split_pair();
                    let (x1, x2) = xs.split_pair();
                    Value::pair(
                        Value::pair(p.clone(), x1.clone()),
                        Value::pair(p2.clone(), x2.clone()),
                    )
                },
                |_, r| {
                    let (qs1, qs2) = r.split_pair();
                    let (q1, s1) = qs1.split_pair();
                    let (q2, s2) = qs2.split_pair();
                    Value::pair(
                        Value::pair(q1.clone(), q2.clone()),
                        Value::pair(s1.clone(), s2.clone()),
                    )
                },
            )
        };
        let lens = interchange
            .compose(&self.lens.tensor(&other.lens))
            .expect("interchange composes");
        ParamLens { params, inner, lens }
    }

    /// Extensional equality of parametrised lenses with matching shapes.
    pub fn equal(&self, other: &ParamLens, probe: &[Rat]) -> Result<bool> {
        if self.params != other.params || self.inner != other.inner {
            return Err(Error::NotComparable);
        }
        self.lens.equal(&other.lens, probe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::default_probe;

    fn r2 () -> FinSpace {
        FinSpace::Range(2)
    }

    fn pair_r2() -> (FinSpace, FinSpace) {
        (r2(), r2())
    }

    fn swap01() -> Lens {
        Lens::new(
            pair_r2(),
            pair_r2(),
            |x| Value::Index(1 - x.as_index()),
            |_, r| Value::Index(1 - r.as_index()),
        )
    }

    fn const_zero() -> Lens {
        Lens::new(
            pair_r2(),
            pair_r2(),
            |_| Value::Index(0),
            |_, r| r.clone(),
        )
    }

    #[test]
    fn identity_acts_trivially() {
        let id = Lens::identity(pair_r2());
        assert_eq!(id.get(&Value::Index(1)), Value::Index(1));
        assert_eq!(id.put(&Value::Index(0), &Value::Index(1)), Value::Index(1));
        let id_unit = Lens::identity((FinSpace::Unit, FinSpace::Unit));
        assert_eq!(id_unit.get(&Value::Point), Value::Point);
    }

    #[test]
    fn compose_identity_is_identity() {
        let l = swap01();
        let composed = l.compose(&Lens::identity(pair_r2())).unwrap();
        assert!(composed.equal(&l, &default_probe()).unwrap());
        let composed = Lens::identity(pair_r2()).compose(&l).unwrap();
        assert!(composed.equal(&l, &default_probe()).unwrap());
    }

    #[test]
    fn compose_gets_chain() {
        // const-0 then swap maps everything to 1.
        let chain = const_zero().compose(&swap01()).unwrap();
        assert_eq!(chain.get(&Value::Index(1)), Value::Index(1));
        assert_eq!(chain.get(&Value::Index(0)), Value::Index(1));
    }

    #[test]
    fn compose_put_matches_nested_formula() {
        let first = swap01();
        let second = const_zero();
        let chain = first.compose(&second).unwrap();
        for x in r2().enumerate().unwrap() {
            for t in r2().enumerate().unwrap() {
                let direct = chain.put(&x, &t);
                let nested = first.put(&x, &second.put(&first.get(&x), &t));
                assert_eq!(direct, nested);
            }
        }
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id2 = Lens::identity(pair_r2());
        let product = id2.tensor(&id2);
        let id4 = Lens::identity((
            FinSpace::pair(r2(), r2()),
            FinSpace::pair(r2(), r2()),
        ));
        assert!(product.equal(&id4, &default_probe()).unwrap());
    }

    #[test]
    fn tensor_acts_componentwise() {
        let t = swap01().tensor(&Lens::identity(pair_r2()));
        let x = Value::pair(Value::Index(0), Value::Index(1));
        assert_eq!(t.get(&x), Value::pair(Value::Index(1), Value::Index(1)));
        for x in FinSpace::pair(r2(), r2()).enumerate().unwrap() {
            for r in FinSpace::pair(r2(), r2()).enumerate().unwrap() {
                let (xa, xb) = x.split_pair();
                let (ra, rb) = r.split_pair();
                assert_eq!(
                    t.put(&x, &r),
                    Value::pair(swap01().put(xa, ra), Lens::identity(pair_r2()).put(xb, rb))
                );
            }
        }
    }

    #[test]
    fn equality_distinguishes() {
        let probe = default_probe();
        let id = Lens::identity((r2(), FinSpace::Unit));
        let sw = Lens::new(
            (r2(), FinSpace::Unit),
            (r2(), FinSpace::Unit),
            |x| Value::Index(1 - x.as_index()),
            |_, _| Value::Point,
        );
        assert!(id.equal(&id, &probe).unwrap());
        assert!(!id.equal(&sw, &probe).unwrap());
        assert!(matches!(
            id.equal(&swap01(), &probe),
            Err(Error::NotComparable)
        ));
    }

    /// A decision-shaped parametrised lens: a move in `moves`, an ignored
    /// state in `state`, and utility duplicated back to the parameter side.
    fn dec_plens(moves: FinSpace, rewards: FinSpace, state: FinSpace) -> ParamLens {
        let params = (moves.clone(), rewards.clone());
        let inner = (state.clone(), rewards.clone());
        let lens = Lens::new(
            (
                FinSpace::pair(moves.clone(), state),
                FinSpace::pair(rewards.clone(), rewards.clone()),
            ),
            (moves, rewards),
            |px| px.split_pair().0.clone(),
            |_, r| Value::pair(r.clone(), r.clone()),
        );
        ParamLens::new(params, inner, lens)
    }

    #[test]
    fn plens_compose_accumulates_params() {
        let rewards = FinSpace::RewardSpace(vec![crate::space::PlayerId::name("p")]);
        let a = dec_plens(r2(), rewards.clone(), FinSpace::Unit);
        let b = dec_plens(r2(), rewards.clone(), r2());
        let ab = a.compose(&b).unwrap();
        assert_eq!(
            ab.params(),
            &(
                FinSpace::pair(r2(), r2()),
                FinSpace::pair(rewards.clone(), rewards)
            )
        );
    }

    #[test]
    fn plens_compose_with_unit_params_preserves_behavior() {
        let l = dec_plens(r2(), r2(), FinSpace::Unit); // enumerable rewards, exhaustive check
        let id_stage = ParamLens::from_lens(Lens::identity((r2(), r2())));
        let composed = l.compose(&id_stage).unwrap();
        for omega in r2().enumerate().unwrap() {
            let padded = Value::pair(omega.clone(), Value::Point);
            assert_eq!(composed.play(&padded, &Value::Point), l.play(&omega, &Value::Point));
            for r in r2().enumerate().unwrap() {
                let (q, s) = l.coplay(&omega, &Value::Point, &r);
                let (q2, s2) = composed.coplay(&padded, &Value::Point, &r);
                assert_eq!(q2, Value::pair(q, Value::Point));
                assert_eq!(s2, s);
            }
        }
    }

    #[test]
    fn two_stage_decision_composite_full_table() {
        // Two binary decisions in sequence over enumerable rewards; check the
        // whole play/coplay table against the staged evaluation.
        let a = dec_plens(r2(), r2(), FinSpace::Unit);
        let b = dec_plens(r2(), r2(), r2());
        let ab = a.compose(&b).unwrap();
        for pa in r2().enumerate().unwrap() {
            for pb in r2().enumerate().unwrap() {
                let param = Value::pair(pa.clone(), pb.clone());
                assert_eq!(ab.play(&param, &Value::Point), pb);
                for r in r2().enumerate().unwrap() {
                    let y1 = a.play(&pa, &Value::Point);
                    let (qb, sb) = b.coplay(&pb, &y1, &r);
                    let (qa, sa) = a.coplay(&pa, &Value::Point, &sb);
                    let (q, s) = ab.coplay(&param, &Value::Point, &r);
                    assert_eq!(q, Value::pair(qa, qb));
                    assert_eq!(s, sa);
                }
            }
        }
    }

    #[test]
    fn reparametrise_along_identity_is_noop() {
        let l = dec_plens(r2(), r2(), FinSpace::Unit);
        let w = Lens::identity((r2(), r2()));
        let reparam = l.reparametrise(&w).unwrap();
        assert!(reparam.equal(&l, &default_probe()).unwrap());
    }

    #[test]
    fn plens_tensor_shapes_and_componentwise_get() {
        let a = dec_plens(r2(), r2(), FinSpace::Unit);
        let b = dec_plens(FinSpace::Range(3), r2(), FinSpace::Unit);
        let t = a.tensor(&b);
        assert_eq!(t.params().0, FinSpace::pair(r2(), FinSpace::Range(3)));
        for pa in r2().enumerate().unwrap() {
            for pb in FinSpace::Range(3).enumerate().unwrap() {
                let param = Value::pair(pa.clone(), pb.clone());
                let x = Value::pair(Value::Point, Value::Point);
                assert_eq!(t.play(&param, &x), Value::pair(pa.clone(), pb.clone()));
            }
        }
        let unit = ParamLens::from_lens(Lens::identity((FinSpace::Unit, FinSpace::Unit)));
        let uu = unit.tensor(&unit);
        assert_eq!(
            uu.params(),
            &(
                FinSpace::pair(FinSpace::Unit, FinSpace::Unit),
                FinSpace::pair(FinSpace::Unit, FinSpace::Unit)
            )
        );
    }
}
