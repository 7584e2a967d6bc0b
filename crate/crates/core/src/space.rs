//! Finite space descriptors and their elements.
//!
//! A [`FinSpace`] describes a set with a canonical enumeration order:
//! products enumerate lexicographically in declaration order, sums enumerate
//! summand 0 fully before summand 1, and player-indexed products follow the
//! player list. [`FinSpace::RewardSpace`] (vectors of exact rationals) is the
//! one non-enumerable space and may only appear in reward/coutility positions.

use crate::error::{Error, Result, DEFAULT_ENUM_CAP};
use crate::rational::Rat;
use std::fmt;

/// A player identity. Sequential and parallel composition of arenas tag the
/// two operands' players `Left`/`Right`, to be merged back by regrouping.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlayerId {
    Name(String),
    Left(Box<PlayerId>),
    Right(Box<PlayerId>),
}

impl PlayerId {
    pub fn name(s: impl Into<String>) -> PlayerId {
        PlayerId::Name(s.into())
    }

    pub fn left(self) -> PlayerId {
        PlayerId::Left(Box::new(self))
    }

    pub fn right(self) -> PlayerId {
        PlayerId::Right(Box::new(self))
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerId::Name(s) => write!(f, "{s}"),
            PlayerId::Left(p) => write!(f, "l.{p}"),
            PlayerId::Right(p) => write!(f, "r.{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FinSpace {
    /// The one-element set.
    Unit,
    /// `{0, .., n-1}`.
    Range(u64),
    /// Cartesian product of the factors, in declaration order.
    Product(Vec<FinSpace>),
    /// Disjoint union of the summands, in declaration order.
    Sum(Vec<FinSpace>),
    /// Product indexed by an ordered list of players.
    PlayerIndexed(Vec<(PlayerId, FinSpace)>),
    /// Vectors of exact rationals indexed by the given players. Infinite, so
    /// never enumerable; legal only in reward and coutility positions.
    RewardSpace(Vec<PlayerId>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Point,
    Index(u64),
    Tuple(Vec<Value>),
    Tagged(u64, Box<Value>),
    ByPlayer(Vec<(PlayerId, Value)>),
    Rewards(Vec<(PlayerId, Rat)>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Tuple(vec![a, b])
    }

    pub fn tagged(tag: u64, inner: Value) -> Value {
        Value::Tagged(tag, Box::new(inner))
    }

    /// The two components of a binary tuple. Panics on any other shape.
    pub fn split_pair(&self) -> (&Value, &Value) {
        match self {
            Value::Tuple(items) if items.len() == 2 => (&items[0], &items[1]),
            other => panic!("expected a pair, got {other:?}"),
        }
    }

    pub fn as_tuple(&self) -> &[Value] {
        match self {
            Value::Tuple(items) => items,
            other => panic!("expected a tuple, got {other:?}"),
        }
    }

    pub fn as_index(&self) -> u64 {
        match self {
            Value::Index(k) => *k,
            other => panic!("expected an index, got {other:?}"),
        }
    }

    pub fn as_by_player(&self) -> &[(PlayerId, Value)] {
        match self {
            Value::ByPlayer(entries) => entries,
            other => panic!("expected a player-indexed value, got {other:?}"),
        }
    }

    pub fn player_component(&self, player: &PlayerId) -> &Value {
        self.as_by_player()
            .iter()
            .find(|(p, _)| p == player)
            .map(|(_, v)| v)
            .unwrap_or_else(|| panic!("no component for player {player}"))
    }

    pub fn as_rewards(&self) -> &[(PlayerId, Rat)] {
        match self {
            Value::Rewards(entries) => entries,
            other => panic!("expected a reward vector, got {other:?}"),
        }
    }

    pub fn reward_of(&self, player: &PlayerId) -> &Rat {
        self.as_rewards()
            .iter()
            .find(|(p, _)| p == player)
            .map(|(_, r)| r)
            .unwrap_or_else(|| panic!("no reward for player {player}"))
    }
}

impl FinSpace {
    pub fn pair(a: FinSpace, b: FinSpace) -> FinSpace {
        FinSpace::Product(vec![a, b])
    }

    /// Number of elements. Errors on [`FinSpace::RewardSpace`].
    pub fn cardinality(&self) -> Result<u128> {
        match self {
            FinSpace::Unit => Ok(1),
            FinSpace::Range(n) => Ok(u128::from(*n)),
            FinSpace::Product(factors) => factors.iter().try_fold(1u128, |acc, f| {
                acc.checked_mul(f.cardinality()?)
                    .ok_or(Error::CapExceeded { needed: u128::MAX, cap: DEFAULT_ENUM_CAP })
            }),
            FinSpace::Sum(summands) => summands.iter().try_fold(0u128, |acc, s| {
                acc.checked_add(s.cardinality()?)
                    .ok_or(Error::CapExceeded { needed: u128::MAX, cap: DEFAULT_ENUM_CAP })
            }),
            FinSpace::PlayerIndexed(entries) => entries.iter().try_fold(1u128, |acc, (_, f)| {
                acc.checked_mul(f.cardinality()?)
                    .ok_or(Error::CapExceeded { needed: u128::MAX, cap: DEFAULT_ENUM_CAP })
            }),
            FinSpace::RewardSpace(_) => Err(Error::NotEnumerable(format!("{self:?}"))),
        }
    }

    /// All elements in canonical order, bounded by [`DEFAULT_ENUM_CAP`].
    pub fn enumerate(&self) -> Result<Vec<Value>> {
        self.enumerate_capped(DEFAULT_ENUM_CAP)
    }

    pub fn enumerate_capped(&self, cap: u64) -> Result<Vec<Value>> {
        let needed = self.cardinality()?;
        if needed > u128::from(cap) {
            return Err(Error::CapExceeded { needed, cap });
        }
        Ok(self.enumerate_unchecked())
    }

    fn enumerate_unchecked(&self) -> Vec<Value> {
        match self {
            FinSpace::Unit => vec![Value::Point],
            FinSpace::Range(n) => (0..*n).map(Value::Index).collect(),
            FinSpace::Product(factors) => {
                let columns: Vec<Vec<Value>> =
                    factors.iter().map(|f| f.enumerate_unchecked()).collect();
                cartesian(&columns).into_iter().map(Value::Tuple).collect()
            }
            FinSpace::Sum(summands) => summands
                .iter()
                .enumerate()
                .flat_map(|(tag, s)| {
                    s.enumerate_unchecked()
                        .into_iter()
                        .map(move |v| Value::tagged(tag as u64, v))
                })
                .collect(),
            FinSpace::PlayerIndexed(entries) => {
                let columns: Vec<Vec<Value>> =
                    entries.iter().map(|(_, f)| f.enumerate_unchecked()).collect();
                cartesian(&columns)
                    .into_iter()
                    .map(|row| {
                        Value::ByPlayer(
                            entries.iter().map(|(p, _)| p.clone()).zip(row).collect(),
                        )
                    })
                    .collect()
            }
            FinSpace::RewardSpace(_) => unreachable!("cardinality rejects reward spaces"),
        }
    }

    /// True iff `value` inhabits this space.
    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (FinSpace::Unit, Value::Point) => true,
            (FinSpace::Range(n), Value::Index(k)) => k < n,
            (FinSpace::Product(factors), Value::Tuple(items)) => {
                factors.len() == items.len()
                    && factors.iter().zip(items).all(|(f, v)| f.contains(v))
            }
            (FinSpace::Sum(summands), Value::Tagged(tag, inner)) => summands
                .get(*tag as usize)
                .is_some_and(|s| s.contains(inner)),
            (FinSpace::PlayerIndexed(entries), Value::ByPlayer(items)) => {
                entries.len() == items.len()
                    && entries
                        .iter()
                        .zip(items)
                        .all(|((p, f), (q, v))| p == q && f.contains(v))
            }
            (FinSpace::RewardSpace(players), Value::Rewards(items)) => {
                players.len() == items.len()
                    && players.iter().zip(items).all(|(p, (q, _))| p == q)
            }
            _ => false,
        }
    }

    /// Rank of `value` in canonical enumeration order.
    pub fn position_of(&self, value: &Value) -> Result<u128> {
        match (self, value) {
            (FinSpace::Unit, Value::Point) => Ok(0),
            (FinSpace::Range(n), Value::Index(k)) if k < n => Ok(u128::from(*k)),
            (FinSpace::Product(factors), Value::Tuple(items)) if factors.len() == items.len() => {
                let mut rank = 0u128;
                for (f, v) in factors.iter().zip(items) {
                    rank = rank * f.cardinality()? + f.position_of(v)?;
                }
                Ok(rank)
            }
            (FinSpace::Sum(summands), Value::Tagged(tag, inner)) => {
                let tag = *tag as usize;
                let summand = summands
                    .get(tag)
                    .ok_or_else(|| Error::TypeMismatch(format!("tag {tag} out of range")))?;
                let mut rank = summand.position_of(inner)?;
                for s in &summands[..tag] {
                    rank += s.cardinality()?;
                }
                Ok(rank)
            }
            (FinSpace::PlayerIndexed(entries), Value::ByPlayer(items))
                if entries.len() == items.len() =>
            {
                let mut rank = 0u128;
                for ((p, f), (q, v)) in entries.iter().zip(items) {
                    if p != q {
                        return Err(Error::TypeMismatch(format!(
                            "player order mismatch: {p} vs {q}"
                        )));
                    }
                    rank = rank * f.cardinality()? + f.position_of(v)?;
                }
                Ok(rank)
            }
            _ => Err(Error::TypeMismatch(format!(
                "{value:?} does not inhabit {self:?}"
            ))),
        }
    }

    /// Elements used for extensional comparisons: like enumeration, except
    /// reward coordinates range over the supplied probe rationals.
    pub fn probe_values(&self, probe: &[Rat]) -> Vec<Value> {
        match self {
            FinSpace::RewardSpace(players) => {
                let columns: Vec<Vec<Rat>> = players.iter().map(|_| probe.to_vec()).collect();
                rat_cartesian(&columns)
                    .into_iter()
                    .map(|row| Value::Rewards(players.iter().cloned().zip(row).collect()))
                    .collect()
            }
            FinSpace::Product(factors) => {
                let columns: Vec<Vec<Value>> =
                    factors.iter().map(|f| f.probe_values(probe)).collect();
                cartesian(&columns).into_iter().map(Value::Tuple).collect()
            }
            FinSpace::Sum(summands) => summands
                .iter()
                .enumerate()
                .flat_map(|(tag, s)| {
                    s.probe_values(probe)
                        .into_iter()
                        .map(move |v| Value::tagged(tag as u64, v))
                })
                .collect(),
            FinSpace::PlayerIndexed(entries) => {
                let columns: Vec<Vec<Value>> =
                    entries.iter().map(|(_, f)| f.probe_values(probe)).collect();
                cartesian(&columns)
                    .into_iter()
                    .map(|row| {
                        Value::ByPlayer(
                            entries.iter().map(|(p, _)| p.clone()).zip(row).collect(),
                        )
                    })
                    .collect()
            }
            _ => self.enumerate_unchecked(),
        }
    }
}

fn cartesian(columns: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let mut rows = vec![Vec::new()];
    for column in columns {
        let mut next = Vec::with_capacity(rows.len() * column.len());
        for row in &rows {
            for v in column {
                let mut row = row.clone();
                row.push(v.clone());
                next.push(row);
            }
        }
        rows = next;
    }
    rows
}

fn rat_cartesian(columns: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut rows = vec![Vec::new()];
    for column in columns {
        let mut next = Vec::with_capacity(rows.len() * column.len());
        for row in &rows {
            for v in column {
                let mut row = row.clone();
                row.push(v.clone());
                next.push(row);
            }
        }
        rows = next;
    }
    rows
}

/// Default probe rationals for comparing maps out of reward spaces.
pub fn default_probe() -> Vec<Rat> {
    [-1, 0, 1, 2].into_iter().map(Rat::from_int).collect()
}
