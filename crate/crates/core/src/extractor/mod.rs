//! The knowledge extractor: oracle access to a strategy, the swap gadget,
//! exact extraction of the output state and rigidity diagnostics.

mod circuit;
mod extract;
mod oracle;
mod rigidity;

pub use circuit::{ideal_swap, operator_distance, swap_gadget, Circuit, Gate};
pub use extract::{
    check_knowledge_bound, extract, extract_coherent, extract_sampled, extract_state, BoundCheck, ExtractConfig,
    Extraction, ExtractionReport, StepOrder, AUX, MSG, OUT,
};
pub use oracle::{OracleAccess, OracleCall, Query};
pub use rigidity::{rigidity_deviation, QuestionDeviation, RigidityReport};
