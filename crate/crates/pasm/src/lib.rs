//! Executable synchronous parallel abstract state machines over meta-finite
//! states, with bounded-exploration witnesses and rule synthesis from
//! critical structures.

pub mod gallery;
pub mod machine;
pub mod rules;
pub mod sample;
pub mod state;
pub mod surface;
pub mod synthesis;
pub mod terms;
pub mod witness;
pub mod values;
