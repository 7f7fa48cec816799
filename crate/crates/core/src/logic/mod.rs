//! First-order logic: syntax, evaluation and locality constructions.

mod eval;
mod formula;
mod locality;
mod parse;
mod transform;

pub use eval::{evaluate, evaluate_at, Assignment, Compiled, Evaluator};
pub use formula::{quantifier_rank, Formula, FreshVars, Var};
pub use locality::{is_local, LocalityVerdict, LocalityWitness};
pub use parse::{parse_formula, parse_sentence};
pub use transform::{ball_axiom, basic_local_sentence, relativize_to_ball};
