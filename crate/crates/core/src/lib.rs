//! Games on finite arenas whose payoff is a finite union of generalized-Büchi
//! conditions, solved through a monotone inductive definition of Player II's
//! winning region.

pub mod arena;
pub mod cli;
pub mod davis;
pub mod fixpoint;
pub mod harness;
pub mod mullersolve;
pub mod payoff;
pub mod verify;
