//! Open game kit: a compositional game engine.
//!
//! The crate models games as *arenas* (parametrised lenses whose parameters
//! are strategy profiles and reward vectors, optionally factored by a player
//! set) paired with per-player *selection functions*. Extensive-form game
//! trees, with or without information sets, translate into such games, and
//! their equilibria can be cross-checked against an independent brute-force
//! Nash search.
//!
//! Modules, roughly bottom-up:
//!
//! - [`rational`], [`space`]: exact rewards and the finite value universe.
//! - [`lens`]: lenses and parametrised lenses with composition, tensor,
//!   reparametrisation and extensional equality.
//! - [`selection`]: multivalued selection functions (argmax, pushforward,
//!   Nash product).
//! - [`arena`]: arenas, open games, equilibria and the operator calculus
//!   (regrouping, external/internal choice, stop/switch, voting).
//! - [`exform`]: extensive-form trees, their strategy/path/payoff semantics
//!   and the brute-force Nash oracles.
//! - [`translate`]: tree and normal-form translations into open games.
//! - [`gamefile`]: the textual game format (parser, printer, validation).
//! - [`solve`]: end-to-end solving and method comparison used by the CLI.

pub mod arena;
pub mod error;
pub mod exec;
pub mod exform;
pub mod gamefile;
pub mod gen;
pub mod lens;
pub mod rational;
pub mod selection;
pub mod solve;
pub mod space;
pub mod translate;

pub use error::{Error, Result, DEFAULT_ENUM_CAP};
pub use rational::Rat;
pub use space::{FinSpace, PlayerId, Value};
