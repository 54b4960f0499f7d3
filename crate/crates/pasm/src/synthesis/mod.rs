//! Critical structures, equality-free types, isolating formulas and terms,
//! and synthesis of rules and machines from observed steps.

pub mod fowo;
pub mod structure;

pub use fowo::{
    fo_woeq_partition, holds, holds_at, isolating_formula, level_partition, EqFree, Partition, ScaleError,
    Separator, TypeOracle,
};
pub use translate::{isolating_term, isolating_term_with, Fresh};
pub use structure::{critical_structure, CriticalStructure, Element, MultTag, RelStructure, Relation};
pub mod translate;
pub mod synth;
pub use synth::{
    check_type_update_transfer, machine_oracle, observed_updates, synthesize_machine, synthesize_rule,
    synthesize_rule_machine, Oracle, SynthesisError, SynthesizedMachine, TransferReport,
};
