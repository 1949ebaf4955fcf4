//! The four equality judgment forms.
//!
//! The plain judgments `Γ ⊢`, `Γ ⊢ A`, `Δ ⊢ γ : Γ`, `Γ ⊢ a : A` are the
//! reflexive instances of the corresponding equality forms; there is no
//! separate representation for them.

use std::fmt;
use std::rc::Rc;

use crate::sexpr::{self, ParseError, Spanned, SpannedKind};
use crate::syntax::{self, RawCtx, RawSub, RawTm, RawTy, SyntaxError};

/// `Γ = Γ′ ⊢` | `Δ ⊢ γ = γ′ : Γ` | `Γ ⊢ A = A′` | `Γ ⊢ a = a′ : A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Judgment {
    CtxEq(Rc<RawCtx>, Rc<RawCtx>),
    /// `SubEq(Δ, γ, γ′, Γ)` is `Δ ⊢ γ = γ′ : Γ` (source first, target last).
    SubEq(Rc<RawCtx>, Rc<RawSub>, Rc<RawSub>, Rc<RawCtx>),
    TyEq(Rc<RawCtx>, Rc<RawTy>, Rc<RawTy>),
    TmEq(Rc<RawCtx>, Rc<RawTm>, Rc<RawTm>, Rc<RawTy>),
}

impl Judgment {
    pub fn ctx_eq(g: impl Into<Rc<RawCtx>>, g2: impl Into<Rc<RawCtx>>) -> Judgment {
        Judgment::CtxEq(g.into(), g2.into())
    }

    pub fn sub_eq(
        src: impl Into<Rc<RawCtx>>,
        s1: impl Into<Rc<RawSub>>,
        s2: impl Into<Rc<RawSub>>,
        tgt: impl Into<Rc<RawCtx>>,
    ) -> Judgment {
        Judgment::SubEq(src.into(), s1.into(), s2.into(), tgt.into())
    }

    pub fn ty_eq(
        g: impl Into<Rc<RawCtx>>,
        a: impl Into<Rc<RawTy>>,
        b: impl Into<Rc<RawTy>>,
    ) -> Judgment {
        Judgment::TyEq(g.into(), a.into(), b.into())
    }

    pub fn tm_eq(
        g: impl Into<Rc<RawCtx>>,
        t1: impl Into<Rc<RawTm>>,
        t2: impl Into<Rc<RawTm>>,
        a: impl Into<Rc<RawTy>>,
    ) -> Judgment {
        Judgment::TmEq(g.into(), t1.into(), t2.into(), a.into())
    }

    /// `Γ ⊢` as the reflexive instance `Γ = Γ ⊢`.
    pub fn ctx_wf(g: impl Into<Rc<RawCtx>>) -> Judgment {
        let g = g.into();
        Judgment::CtxEq(g.clone(), g)
    }

    /// `Γ ⊢ A` as `Γ ⊢ A = A`.
    pub fn ty_wf(g: impl Into<Rc<RawCtx>>, a: impl Into<Rc<RawTy>>) -> Judgment {
        let a = a.into();
        Judgment::TyEq(g.into(), a.clone(), a)
    }

    /// `Δ ⊢ γ : Γ` as `Δ ⊢ γ = γ : Γ`.
    pub fn sub_wf(
        src: impl Into<Rc<RawCtx>>,
        s: impl Into<Rc<RawSub>>,
        tgt: impl Into<Rc<RawCtx>>,
    ) -> Judgment {
        let s = s.into();
        Judgment::SubEq(src.into(), s.clone(), s, tgt.into())
    }

    /// `Γ ⊢ a : A` as `Γ ⊢ a = a : A`.
    pub fn tm_wf(
        g: impl Into<Rc<RawCtx>>,
        t: impl Into<Rc<RawTm>>,
        a: impl Into<Rc<RawTy>>,
    ) -> Judgment {
        let t = t.into();
        Judgment::TmEq(g.into(), t.clone(), t, a.into())
    }

    /// Both sides syntactically identical, i.e. one of the basic
    /// (non-equality) judgment forms.
    pub fn is_reflexive(&self) -> bool {
        match self {
            Judgment::CtxEq(g, g2) => g == g2,
            Judgment::SubEq(_, s1, s2, _) => s1 == s2,
            Judgment::TyEq(_, a, b) => a == b,
            Judgment::TmEq(_, t1, t2, _) => t1 == t2,
        }
    }

    /// Swap the two equated components.
    pub fn flipped(&self) -> Judgment {
        match self {
            Judgment::CtxEq(g, g2) => Judgment::CtxEq(g2.clone(), g.clone()),
            Judgment::SubEq(s, a, b, t) => {
                Judgment::SubEq(s.clone(), b.clone(), a.clone(), t.clone())
            }
            Judgment::TyEq(g, a, b) => Judgment::TyEq(g.clone(), b.clone(), a.clone()),
            Judgment::TmEq(g, a, b, ty) => {
                Judgment::TmEq(g.clone(), b.clone(), a.clone(), ty.clone())
            }
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::CtxEq(g, g2) => write!(f, "(ctx-eq {g} {g2})"),
            Judgment::SubEq(s, a, b, t) => write!(f, "(sub-eq {s} {a} {b} {t})"),
            Judgment::TyEq(g, a, b) => write!(f, "(ty-eq {g} {a} {b})"),
            Judgment::TmEq(g, a, b, ty) => write!(f, "(tm-eq {g} {a} {b} {ty})"),
        }
    }
}

fn args<'a>(e: &'a Spanned, kw: &str, arity: usize) -> Result<&'a [Spanned], SyntaxError> {
    match &e.kind {
        SpannedKind::List(items) if items.len() == arity + 1 => Ok(&items[1..]),
        _ => Err(ParseError::new(e.start, format!("({kw} …) with {arity} argument(s)")).into()),
    }
}

pub(crate) fn judgment_from_spanned(e: &Spanned) -> Result<Judgment, SyntaxError> {
    match e.head() {
        Some("ctx-eq") => {
            let a = args(e, "ctx-eq", 2)?;
            Ok(Judgment::ctx_eq(
                syntax::ctx_spanned(&a[0])?,
                syntax::ctx_spanned(&a[1])?,
            ))
        }
        Some("sub-eq") => {
            let a = args(e, "sub-eq", 4)?;
            Ok(Judgment::sub_eq(
                syntax::ctx_spanned(&a[0])?,
                syntax::sub_spanned(&a[1])?,
                syntax::sub_spanned(&a[2])?,
                syntax::ctx_spanned(&a[3])?,
            ))
        }
        Some("ty-eq") => {
            let a = args(e, "ty-eq", 3)?;
            Ok(Judgment::ty_eq(
                syntax::ctx_spanned(&a[0])?,
                syntax::ty_spanned(&a[1])?,
                syntax::ty_spanned(&a[2])?,
            ))
        }
        Some("tm-eq") => {
            let a = args(e, "tm-eq", 4)?;
            Ok(Judgment::tm_eq(
                syntax::ctx_spanned(&a[0])?,
                syntax::tm_spanned(&a[1])?,
                syntax::tm_spanned(&a[2])?,
                syntax::ty_spanned(&a[3])?,
            ))
        }
        _ => Err(ParseError::new(
            e.start,
            "one of ctx-eq, sub-eq, ty-eq, tm-eq",
        )
        .into()),
    }
}

/// Parse a judgment in the `(ctx-eq …)`/`(sub-eq …)`/`(ty-eq …)`/`(tm-eq …)` format.
pub fn parse_judgment(text: &str) -> Result<Judgment, SyntaxError> {
    judgment_from_spanned(&sexpr::read_spanned(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn judgment_text_round_trips() {
        let j = Judgment::tm_wf(
            RawCtx::Empty.ext(RawTy::Base),
            RawTm::q(RawTy::Base),
            RawTy::subst(RawTy::Base, RawSub::p(RawTy::Base)),
        );
        let text = j.to_string();
        assert_eq!(parse_judgment(&text).unwrap(), j);
    }

    #[test]
    fn reflexivity_detection() {
        let refl = Judgment::ctx_wf(RawCtx::Empty);
        assert!(refl.is_reflexive());
        let j = Judgment::ctx_eq(RawCtx::Empty, RawCtx::Empty.ext(RawTy::Unit));
        assert!(!j.is_reflexive());
        assert_eq!(j.flipped().flipped(), j);
    }
}
