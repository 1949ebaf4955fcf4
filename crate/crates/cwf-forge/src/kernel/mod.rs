//! The dependently typed kernel: four partial-equivalence judgment
//! families over the raw combinator language, a rule-by-rule derivation
//! checker, a decision procedure for the plain fragment, and a
//! fuel-bounded certifying semi-decision procedure for the fragments
//! with unit, Σ, Π, and extensional identity types.
//!
//! Everything trusted goes through [`apply_rule`]: a [`Derivation`] is
//! re-validated node by node, so derivations produced anywhere in the
//! crate (equation schemes, the combinatory-logic pipeline, the
//! certifying normalizer) are evidence, not claims.

mod democracy;
mod derivation;
mod engine;
mod judgment;
mod plain;
mod rules;
mod schemes;
mod wf;

pub use democracy::{build_inv_type, chosen_dependent_product, democratize_ctx, CwfDemocracy,
    DepProductDiagram, InvTypeResult};
pub use derivation::{check_derivation, parse_derivation, print_derivation, Derivation};
pub use engine::{check_judgment_semi, SemiOutcome};
pub use judgment::{parse_judgment, Judgment};
pub use plain::{decide_equal_plain, plain_canonical_node};
pub use rules::{apply_rule, RuleId, ALL_RULES};
pub use schemes::{derive_equation_scheme, EquationScheme};
pub use wf::{check_tm, infer_tm, wf_ctx, wf_sub, wf_ty};

use thiserror::Error;

use crate::syntax::{Node, Sort};

/// Which slice of the language an equality question lives in.
///
/// The fragments are cumulative: `Plain ⊂ PlainWithUnit ⊂ Intensional ⊂
/// Extensional`. Equality is decided by canonical forms in the first
/// two; in the last two the kernel only semi-decides, with an explicit
/// fuel bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    Plain,
    PlainWithUnit,
    Intensional,
    Extensional,
}

impl Fragment {
    pub fn includes(self, other: Fragment) -> bool {
        self >= other
    }

    /// Smallest fragment whose rule set mentions every constructor of `node`.
    pub fn of_node(node: &Node) -> Fragment {
        use crate::syntax::{RawCtx, RawSub, RawTm, RawTy};
        fn ctx(c: &RawCtx) -> Fragment {
            match c {
                RawCtx::Empty => Fragment::Plain,
                RawCtx::Ext(g, a) => ctx(g).max(ty(a)),
            }
        }
        fn sub(s: &RawSub) -> Fragment {
            match s {
                RawSub::Comp(a, b) => sub(a).max(sub(b)),
                RawSub::Id(g) | RawSub::Terminal(g) => ctx(g),
                RawSub::P(a) => ty(a),
                RawSub::Pair(g, t, a) => sub(g).max(tm(t)).max(ty(a)),
            }
        }
        fn ty(t: &RawTy) -> Fragment {
            match t {
                RawTy::Base => Fragment::Plain,
                RawTy::Subst(a, g) => ty(a).max(sub(g)),
                RawTy::Unit => Fragment::PlainWithUnit,
                RawTy::Sigma(a, b) | RawTy::Pi(a, b) => {
                    Fragment::Intensional.max(ty(a)).max(ty(b))
                }
                RawTy::IExt(a, l, r) => Fragment::Extensional.max(ty(a)).max(tm(l)).max(tm(r)),
            }
        }
        fn tm(t: &RawTm) -> Fragment {
            match t {
                RawTm::Q(a) => ty(a),
                RawTm::Subst(t, g) => tm(t).max(sub(g)),
                RawTm::Star => Fragment::PlainWithUnit,
                RawTm::Refl(a, t) => Fragment::Extensional.max(ty(a)).max(tm(t)),
                RawTm::SigPair(a, b) | RawTm::App(a, b) => {
                    Fragment::Intensional.max(tm(a)).max(tm(b))
                }
                RawTm::SigFst(c) | RawTm::SigSnd(c) | RawTm::Lam(c) => {
                    Fragment::Intensional.max(tm(c))
                }
            }
        }
        match node {
            Node::Ctx(c) => ctx(c),
            Node::Sub(s) => sub(s),
            Node::Ty(a) => ty(a),
            Node::Tm(t) => tm(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("rule {rule}: expected {expected} premise(s), got {got}")]
    ArityMismatch {
        rule: RuleId,
        expected: usize,
        got: usize,
    },
    #[error("rule {rule}, premise {slot}: {detail}")]
    ShapeMismatch {
        rule: RuleId,
        slot: usize,
        detail: String,
    },
    #[error("invalid derivation node at path {path:?}: {cause}")]
    InvalidNode {
        path: Vec<usize>,
        cause: Box<KernelError>,
    },
    #[error("derivation node at path {path:?} caches {cached}, rules give {actual}")]
    ConclusionMismatch {
        path: Vec<usize>,
        cached: Box<Judgment>,
        actual: Box<Judgment>,
    },
    #[error("unknown rule keyword `{0}`")]
    UnknownRule(String),
    #[error("{side} side is not in the {fragment:?} fragment")]
    NotInFragment { side: Sort, fragment: Fragment },
    #[error("ill-formed {side}: {detail}")]
    IllFormed { side: Sort, detail: String },
    #[error("unknown equation scheme `{0}`")]
    UnknownScheme(String),
    #[error("democracy data missing for the target context")]
    MissingDemocracy,
    #[error("fuel exhausted")]
    FuelExhausted,
}

impl KernelError {
    pub(crate) fn ill_formed(side: Sort, detail: impl Into<String>) -> Self {
        KernelError::IllFormed {
            side,
            detail: detail.into(),
        }
    }
}
