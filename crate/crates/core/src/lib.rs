//! Gradual System F with existential types.
//!
//! Source programs are parsed, type checked, elaborated to an evidence-based
//! intermediate language and run by a small-step interpreter. A separate
//! module embeds the language into a dynamically sealed lambda calculus.

pub mod elaborate;
pub mod eval;
pub mod evidence;
pub mod gen;
pub mod lexer;
pub mod oracle;
pub mod parser;
pub mod precision;
pub mod print;
pub mod seal;
pub mod statics;
pub mod syntax;
pub mod types;

pub use elaborate::{elaborate, elaborate_with, initial_evidence, Mode};
pub use eval::{
    eval, lockstep_check, run, step, trace, Configuration, EvalOptions, LockstepVerdict, Outcome, Run,
    StepResult,
};
pub use evidence::{dip, ev_inst, ev_inst_exists, ev_invert, ev_pair, out_evidence, trans, TransCall};
pub use lexer::ParseError;
pub use parser::{parse_gsf, parse_type};
pub use precision::{
    config_precision, strict_term_precision_eps, strict_term_precision_gsf, term_precision,
};
pub use statics::{consistent, typecheck_eps, typecheck_gsf, typecheck_sf, wf_type, TypeEnv, TypeError};
pub use syntax::{Const, Op, Term, TermEps, TermKind};
pub use types::{
    join, lift, matching, meet, partial_type_fn, precision, strict_type_precision, subst_type, unlift,
    Evidence, Store, Ty, TyVar, TypeName,
};
pub use seal::{
    differential_check, embed_dyn, embed_seal, eval_seal, parse_dyn, parse_seal, SealOutcome,
    SealTerm, Verdict,
};
pub use oracle::{bounded_oracle, OracleKind};
