//! Relators: liftings of relations `R ⊆ X × Y` to `ΓR ⊆ T X × T Y`.
//!
//! Base relators for each effect layer are combined with converse,
//! intersection and composition. Base names in the expression grammar:
//!
//! | name | lifting |
//! |------|---------|
//! | `gbot`, `dbot` | partiality, simulation / bisimulation |
//! | `gpow`, `dpow` | finite powerset |
//! | `gdist`, `ddist` | subdistributions, decided by max-flow |
//! | `gexc`, `dexc` | exceptions |
//! | `dstate` | partial global state |
//! | `gout`, `dout` | output |

pub mod axioms;
mod flow;
mod lift;
mod spec;

pub use axioms::{
    carrier_values, check_inductive_sigma, check_lax_axioms, check_lax_axioms_with,
    check_relator_axioms, check_relator_axioms_with, AxiomConfig, BrokenPowerLifting, Kleisli,
    Lifting, NonStrictPartialBind,
};
pub use flow::flow_check;
pub use lift::{lift_holds, lift_holds_by, Relation};
pub use spec::{monad_layers, shipped, Effect, Mode, RelatorSpec};

pub(crate) use lift::holds_indexed;
