//! The inference rules of the kernel, one identifier per rule schema,
//! and [`apply_rule`], the single trusted operation: given a rule and
//! premise judgments that match its hypothesis shapes, it produces the
//! instantiated conclusion. Purely structural, no search.
//!
//! The rule set has four groups for the plain language — per-rules (8),
//! preservation rules (3), congruence rules for the operators and the
//! base type (11), conversion rules (11) — plus the rule schemas for
//! the unit, extensional identity, Σ, and Π structures.

use std::fmt;
use std::rc::Rc;

use crate::syntax::{Node, RawCtx, RawSub, RawTm, RawTy};

use super::judgment::Judgment;
use super::{Fragment, KernelError};

macro_rules! rule_ids {
    ($(($variant:ident, $kw:literal, $arity:expr, $frag:ident)),* $(,)?) => {
        /// Closed enumeration of every rule of the kernel.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum RuleId {
            $($variant),*
        }

        /// All rules, in presentation order.
        pub const ALL_RULES: &[RuleId] = &[$(RuleId::$variant),*];

        impl RuleId {
            /// Stable keyword used in derivation files.
            pub fn keyword(self) -> &'static str {
                match self {
                    $(RuleId::$variant => $kw),*
                }
            }

            pub fn from_keyword(kw: &str) -> Result<RuleId, KernelError> {
                match kw {
                    $($kw => Ok(RuleId::$variant),)*
                    _ => Err(KernelError::UnknownRule(kw.to_string())),
                }
            }

            /// Number of premise judgments the schema takes.
            pub fn premise_count(self) -> usize {
                match self {
                    $(RuleId::$variant => $arity),*
                }
            }

            /// Smallest fragment whose theory contains this rule.
            pub fn fragment(self) -> Fragment {
                match self {
                    $(RuleId::$variant => Fragment::$frag),*
                }
            }
        }
    };
}

rule_ids! {
    // Per-rules: symmetry and transitivity for the four judgment families.
    (PerSymCtx, "per-sym-ctx", 1, Plain),
    (PerTransCtx, "per-trans-ctx", 2, Plain),
    (PerSymSub, "per-sym-sub", 1, Plain),
    (PerTransSub, "per-trans-sub", 2, Plain),
    (PerSymTy, "per-sym-ty", 1, Plain),
    (PerTransTy, "per-trans-ty", 2, Plain),
    (PerSymTm, "per-sym-tm", 1, Plain),
    (PerTransTm, "per-trans-tm", 2, Plain),
    // Preservation rules: judgments transport along equal contexts and types.
    (PresvSub, "presv-sub", 3, Plain),
    (PresvTy, "presv-ty", 2, Plain),
    (PresvTm, "presv-tm", 3, Plain),
    // Congruence rules for the operators and the base type.
    (CongCtxEmpty, "cong-ctx-empty", 0, Plain),
    (CongCtxExt, "cong-ctx-ext", 2, Plain),
    (CongTyBase, "cong-ty-base", 0, Plain),
    (CongTySubst, "cong-ty-subst", 2, Plain),
    (CongSubId, "cong-sub-id", 1, Plain),
    (CongSubTerminal, "cong-sub-terminal", 1, Plain),
    (CongSubComp, "cong-sub-comp", 2, Plain),
    (CongSubP, "cong-sub-p", 1, Plain),
    (CongSubPair, "cong-sub-pair", 3, Plain),
    (CongTmSubst, "cong-tm-subst", 2, Plain),
    (CongTmQ, "cong-tm-q", 1, Plain),
    // Conversion rules.
    (ConvCompAssoc, "conv-comp-assoc", 3, Plain),
    (ConvIdLeft, "conv-id-left", 1, Plain),
    (ConvIdRight, "conv-id-right", 1, Plain),
    (ConvTySubstComp, "conv-ty-subst-comp", 3, Plain),
    (ConvTySubstId, "conv-ty-subst-id", 1, Plain),
    (ConvTmSubstComp, "conv-tm-subst-comp", 3, Plain),
    (ConvTmSubstId, "conv-tm-subst-id", 1, Plain),
    (ConvTerminalUnique, "conv-terminal-unique", 1, Plain),
    (ConvPBeta, "conv-p-beta", 3, Plain),
    (ConvQBeta, "conv-q-beta", 3, Plain),
    (ConvPairEta, "conv-pair-eta", 1, Plain),
    // Unit type.
    (UnitForm, "unit-form", 1, PlainWithUnit),
    (UnitSubst, "unit-subst", 1, PlainWithUnit),
    (UnitIntro, "unit-intro", 1, PlainWithUnit),
    (UnitEta, "unit-eta", 1, PlainWithUnit),
    // Σ-types.
    (SigmaForm, "sigma-form", 2, Intensional),
    (SigmaSubst, "sigma-subst", 3, Intensional),
    (SigmaPairCong, "sigma-pair-cong", 4, Intensional),
    (SigmaFstCong, "sigma-fst-cong", 3, Intensional),
    (SigmaSndCong, "sigma-snd-cong", 3, Intensional),
    (SigmaFstBeta, "sigma-fst-beta", 4, Intensional),
    (SigmaSndBeta, "sigma-snd-beta", 4, Intensional),
    (SigmaEta, "sigma-eta", 3, Intensional),
    (SigmaPairSubst, "sigma-pair-subst", 5, Intensional),
    // Π-types.
    (PiForm, "pi-form", 2, Intensional),
    (PiSubst, "pi-subst", 3, Intensional),
    (PiLamCong, "pi-lam-cong", 3, Intensional),
    (PiApCong, "pi-ap-cong", 4, Intensional),
    (PiBeta, "pi-beta", 4, Intensional),
    (PiEta, "pi-eta", 3, Intensional),
    (PiLamSubst, "pi-lam-subst", 4, Intensional),
    (PiApSubst, "pi-ap-subst", 5, Intensional),
    // Extensional identity types.
    (IForm, "i-form", 3, Extensional),
    (IIntro, "i-intro", 2, Extensional),
    (ISubst, "i-subst", 4, Extensional),
    (IReflect, "i-reflect", 1, Extensional),
    (IUnique, "i-unique", 1, Extensional),
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.keyword())
    }
}

/// `⟨γ ∘ p_{A[γ]}, q_{A[γ]}⟩_A : Δ·A[γ] → Γ·A`, the weakening of `γ : Δ → Γ` by `A`.
pub(crate) fn weaken_sub(gamma: &Rc<RawSub>, a: &Rc<RawTy>) -> RawSub {
    let a_gamma = Rc::new(RawTy::Subst(a.clone(), gamma.clone()));
    RawSub::Pair(
        Rc::new(RawSub::Comp(
            gamma.clone(),
            Rc::new(RawSub::P(a_gamma.clone())),
        )),
        Rc::new(RawTm::Q(a_gamma)),
        a.clone(),
    )
}

/// `⟨id_Γ, a⟩_A : Γ → Γ·A`, the section extending the identity by a term.
pub(crate) fn id_ext(g: &Rc<RawCtx>, a: &Rc<RawTm>, ty: &Rc<RawTy>) -> RawSub {
    RawSub::Pair(Rc::new(RawSub::Id(g.clone())), a.clone(), ty.clone())
}

struct Premises<'a> {
    rule: RuleId,
    items: &'a [Judgment],
}

impl<'a> Premises<'a> {
    fn shape_err(&self, slot: usize, detail: impl Into<String>) -> KernelError {
        KernelError::ShapeMismatch {
            rule: self.rule,
            slot,
            detail: detail.into(),
        }
    }

    fn ctx_eq(&self, slot: usize) -> Result<(&'a Rc<RawCtx>, &'a Rc<RawCtx>), KernelError> {
        match &self.items[slot] {
            Judgment::CtxEq(g, g2) => Ok((g, g2)),
            other => Err(self.shape_err(slot, format!("expected a context equality, got {other}"))),
        }
    }

    fn sub_eq(
        &self,
        slot: usize,
    ) -> Result<(&'a Rc<RawCtx>, &'a Rc<RawSub>, &'a Rc<RawSub>, &'a Rc<RawCtx>), KernelError>
    {
        match &self.items[slot] {
            Judgment::SubEq(s, a, b, t) => Ok((s, a, b, t)),
            other => {
                Err(self.shape_err(slot, format!("expected a substitution equality, got {other}")))
            }
        }
    }

    fn ty_eq(
        &self,
        slot: usize,
    ) -> Result<(&'a Rc<RawCtx>, &'a Rc<RawTy>, &'a Rc<RawTy>), KernelError> {
        match &self.items[slot] {
            Judgment::TyEq(g, a, b) => Ok((g, a, b)),
            other => Err(self.shape_err(slot, format!("expected a type equality, got {other}"))),
        }
    }

    fn tm_eq(
        &self,
        slot: usize,
    ) -> Result<(&'a Rc<RawCtx>, &'a Rc<RawTm>, &'a Rc<RawTm>, &'a Rc<RawTy>), KernelError> {
        match &self.items[slot] {
            Judgment::TmEq(g, a, b, ty) => Ok((g, a, b, ty)),
            other => Err(self.shape_err(slot, format!("expected a term equality, got {other}"))),
        }
    }

    /// `Γ ⊢ A` (a reflexive type equality).
    fn ty_wf(&self, slot: usize) -> Result<(&'a Rc<RawCtx>, &'a Rc<RawTy>), KernelError> {
        let (g, a, b) = self.ty_eq(slot)?;
        if a != b {
            return Err(self.shape_err(slot, "expected a reflexive instance Γ ⊢ A"));
        }
        Ok((g, a))
    }

    /// `Δ ⊢ γ : Γ` (a reflexive substitution equality).
    fn sub_wf(
        &self,
        slot: usize,
    ) -> Result<(&'a Rc<RawCtx>, &'a Rc<RawSub>, &'a Rc<RawCtx>), KernelError> {
        let (s, a, b, t) = self.sub_eq(slot)?;
        if a != b {
            return Err(self.shape_err(slot, "expected a reflexive instance Δ ⊢ γ : Γ"));
        }
        Ok((s, a, t))
    }

    /// `Γ ⊢ a : A` (a reflexive term equality).
    fn tm_wf(
        &self,
        slot: usize,
    ) -> Result<(&'a Rc<RawCtx>, &'a Rc<RawTm>, &'a Rc<RawTy>), KernelError> {
        let (g, a, b, ty) = self.tm_eq(slot)?;
        if a != b {
            return Err(self.shape_err(slot, "expected a reflexive instance Γ ⊢ a : A"));
        }
        Ok((g, a, ty))
    }

    fn same_ctx(&self, slot: usize, found: &Rc<RawCtx>, wanted: &Rc<RawCtx>) -> Result<(), KernelError> {
        if found == wanted {
            Ok(())
        } else {
            Err(self.shape_err(
                slot,
                format!("context {found} does not match {wanted} from an earlier premise"),
            ))
        }
    }

    fn same_ty(&self, slot: usize, found: &Rc<RawTy>, wanted: &RawTy) -> Result<(), KernelError> {
        if found.as_ref() == wanted {
            Ok(())
        } else {
            Err(self.shape_err(
                slot,
                format!("type {found} does not match the required instance {wanted}"),
            ))
        }
    }
}

/// Instantiate `rule` at the given premises, returning the conclusion.
///
/// `side` is reserved for rule schemas whose conclusion is not
/// determined by the premises; every rule in the current set is fully
/// determined, so a non-empty `side` is rejected.
pub fn apply_rule(
    rule: RuleId,
    premises: &[Judgment],
    side: &[Node],
) -> Result<Judgment, KernelError> {
    if premises.len() != rule.premise_count() {
        return Err(KernelError::ArityMismatch {
            rule,
            expected: rule.premise_count(),
            got: premises.len(),
        });
    }
    if !side.is_empty() {
        return Err(KernelError::ShapeMismatch {
            rule,
            slot: 0,
            detail: format!("rule takes no side arguments, got {}", side.len()),
        });
    }
    let p = Premises {
        rule,
        items: premises,
    };
    use RuleId::*;
    match rule {
        // ---- per-rules ----
        PerSymCtx => Ok(premises[0].clone().flipped()),
        PerSymSub => {
            p.sub_eq(0)?;
            Ok(premises[0].flipped())
        }
        PerSymTy => {
            p.ty_eq(0)?;
            Ok(premises[0].flipped())
        }
        PerSymTm => {
            p.tm_eq(0)?;
            Ok(premises[0].flipped())
        }
        PerTransCtx => {
            let (g1, g2) = p.ctx_eq(0)?;
            let (g2b, g3) = p.ctx_eq(1)?;
            p.same_ctx(1, g2b, g2)?;
            Ok(Judgment::CtxEq(g1.clone(), g3.clone()))
        }
        PerTransSub => {
            let (s, a, b, t) = p.sub_eq(0)?;
            let (s2, b2, c, t2) = p.sub_eq(1)?;
            p.same_ctx(1, s2, s)?;
            p.same_ctx(1, t2, t)?;
            if b2 != b {
                return Err(p.shape_err(1, "middle substitutions differ"));
            }
            Ok(Judgment::SubEq(s.clone(), a.clone(), c.clone(), t.clone()))
        }
        PerTransTy => {
            let (g, a, b) = p.ty_eq(0)?;
            let (g2, b2, c) = p.ty_eq(1)?;
            p.same_ctx(1, g2, g)?;
            if b2 != b {
                return Err(p.shape_err(1, "middle types differ"));
            }
            Ok(Judgment::TyEq(g.clone(), a.clone(), c.clone()))
        }
        PerTransTm => {
            let (g, a, b, ty) = p.tm_eq(0)?;
            let (g2, b2, c, ty2) = p.tm_eq(1)?;
            p.same_ctx(1, g2, g)?;
            if b2 != b {
                return Err(p.shape_err(1, "middle terms differ"));
            }
            if ty2 != ty {
                return Err(p.shape_err(1, "types of the two equalities differ"));
            }
            Ok(Judgment::TmEq(g.clone(), a.clone(), c.clone(), ty.clone()))
        }
        // ---- preservation rules ----
        PresvSub => {
            let (g, g2) = p.ctx_eq(0)?;
            let (d, d2) = p.ctx_eq(1)?;
            let (s, a, b, t) = p.sub_eq(2)?;
            p.same_ctx(2, s, g)?;
            p.same_ctx(2, t, d)?;
            Ok(Judgment::SubEq(g2.clone(), a.clone(), b.clone(), d2.clone()))
        }
        PresvTy => {
            let (g, g2) = p.ctx_eq(0)?;
            let (gt, a, b) = p.ty_eq(1)?;
            p.same_ctx(1, gt, g)?;
            Ok(Judgment::TyEq(g2.clone(), a.clone(), b.clone()))
        }
        PresvTm => {
            let (g, g2) = p.ctx_eq(0)?;
            let (gt, ty1, ty2) = p.ty_eq(1)?;
            p.same_ctx(1, gt, g)?;
            let (gm, a, b, ty) = p.tm_eq(2)?;
            p.same_ctx(2, gm, g)?;
            if ty != ty1 {
                return Err(p.shape_err(2, "term equality is not at the type being converted"));
            }
            Ok(Judgment::TmEq(g2.clone(), a.clone(), b.clone(), ty2.clone()))
        }
        // ---- congruence rules ----
        CongCtxEmpty => Ok(Judgment::ctx_wf(RawCtx::Empty)),
        CongCtxExt => {
            let (g, g2) = p.ctx_eq(0)?;
            let (gt, a, a2) = p.ty_eq(1)?;
            p.same_ctx(1, gt, g)?;
            Ok(Judgment::CtxEq(
                Rc::new(RawCtx::Ext(g.clone(), a.clone())),
                Rc::new(RawCtx::Ext(g2.clone(), a2.clone())),
            ))
        }
        CongTyBase => Ok(Judgment::ty_wf(RawCtx::Empty, RawTy::Base)),
        CongTySubst => {
            let (g, a, a2) = p.ty_eq(0)?;
            let (d, s, s2, gt) = p.sub_eq(1)?;
            p.same_ctx(1, gt, g)?;
            Ok(Judgment::TyEq(
                d.clone(),
                Rc::new(RawTy::Subst(a.clone(), s.clone())),
                Rc::new(RawTy::Subst(a2.clone(), s2.clone())),
            ))
        }
        CongSubId => {
            let (g, g2) = p.ctx_eq(0)?;
            Ok(Judgment::SubEq(
                g.clone(),
                Rc::new(RawSub::Id(g.clone())),
                Rc::new(RawSub::Id(g2.clone())),
                g.clone(),
            ))
        }
        CongSubTerminal => {
            let (g, g2) = p.ctx_eq(0)?;
            Ok(Judgment::SubEq(
                g.clone(),
                Rc::new(RawSub::Terminal(g.clone())),
                Rc::new(RawSub::Terminal(g2.clone())),
                Rc::new(RawCtx::Empty),
            ))
        }
        CongSubComp => {
            let (g, d1, d2, d) = p.sub_eq(0)?;
            let (dm, s1, s2, th) = p.sub_eq(1)?;
            p.same_ctx(1, dm, d)?;
            Ok(Judgment::SubEq(
                g.clone(),
                Rc::new(RawSub::Comp(s1.clone(), d1.clone())),
                Rc::new(RawSub::Comp(s2.clone(), d2.clone())),
                th.clone(),
            ))
        }
        CongSubP => {
            let (g, a, a2) = p.ty_eq(0)?;
            Ok(Judgment::SubEq(
                Rc::new(RawCtx::Ext(g.clone(), a.clone())),
                Rc::new(RawSub::P(a.clone())),
                Rc::new(RawSub::P(a2.clone())),
                g.clone(),
            ))
        }
        CongSubPair => {
            let (g, a, a2) = p.ty_eq(0)?;
            let (d, s, s2, gt) = p.sub_eq(1)?;
            p.same_ctx(1, gt, g)?;
            let (dm, t, t2, ty) = p.tm_eq(2)?;
            p.same_ctx(2, dm, d)?;
            p.same_ty(2, ty, &RawTy::Subst(a.clone(), s.clone()))?;
            Ok(Judgment::SubEq(
                d.clone(),
                Rc::new(RawSub::Pair(s.clone(), t.clone(), a.clone())),
                Rc::new(RawSub::Pair(s2.clone(), t2.clone(), a2.clone())),
                Rc::new(RawCtx::Ext(g.clone(), a.clone())),
            ))
        }
        CongTmSubst => {
            let (g, t, t2, a) = p.tm_eq(0)?;
            let (d, s, s2, gt) = p.sub_eq(1)?;
            p.same_ctx(1, gt, g)?;
            Ok(Judgment::TmEq(
                d.clone(),
                Rc::new(RawTm::Subst(t.clone(), s.clone())),
                Rc::new(RawTm::Subst(t2.clone(), s2.clone())),
                Rc::new(RawTy::Subst(a.clone(), s.clone())),
            ))
        }
        CongTmQ => {
            let (g, a, a2) = p.ty_eq(0)?;
            Ok(Judgment::TmEq(
                Rc::new(RawCtx::Ext(g.clone(), a.clone())),
                Rc::new(RawTm::Q(a.clone())),
                Rc::new(RawTm::Q(a2.clone())),
                Rc::new(RawTy::Subst(a.clone(), Rc::new(RawSub::P(a.clone())))),
            ))
        }
        // ---- conversion rules ----
        ConvCompAssoc => {
            let (d, th, big_th) = p.sub_wf(0)?;
            let (g, de, d2) = p.sub_wf(1)?;
            p.same_ctx(1, d2, d)?;
            let (xi, ga, g2) = p.sub_wf(2)?;
            p.same_ctx(2, g2, g)?;
            Ok(Judgment::SubEq(
                xi.clone(),
                Rc::new(RawSub::Comp(
                    Rc::new(RawSub::Comp(th.clone(), de.clone())),
                    ga.clone(),
                )),
                Rc::new(RawSub::Comp(
                    th.clone(),
                    Rc::new(RawSub::Comp(de.clone(), ga.clone())),
                )),
                big_th.clone(),
            ))
        }
        ConvIdLeft => {
            let (g, s, d) = p.sub_wf(0)?;
            Ok(Judgment::SubEq(
                g.clone(),
                s.clone(),
                Rc::new(RawSub::Comp(Rc::new(RawSub::Id(d.clone())), s.clone())),
                d.clone(),
            ))
        }
        ConvIdRight => {
            let (g, s, d) = p.sub_wf(0)?;
            Ok(Judgment::SubEq(
                g.clone(),
                s.clone(),
                Rc::new(RawSub::Comp(s.clone(), Rc::new(RawSub::Id(g.clone())))),
                d.clone(),
            ))
        }
        ConvTySubstComp => {
            let (g, a) = p.ty_wf(0)?;
            let (d, s, g2) = p.sub_wf(1)?;
            p.same_ctx(1, g2, g)?;
            let (th, de, d2) = p.sub_wf(2)?;
            p.same_ctx(2, d2, d)?;
            Ok(Judgment::TyEq(
                th.clone(),
                Rc::new(RawTy::Subst(
                    a.clone(),
                    Rc::new(RawSub::Comp(s.clone(), de.clone())),
                )),
                Rc::new(RawTy::Subst(
                    Rc::new(RawTy::Subst(a.clone(), s.clone())),
                    de.clone(),
                )),
            ))
        }
        ConvTySubstId => {
            let (g, a) = p.ty_wf(0)?;
            Ok(Judgment::TyEq(
                g.clone(),
                Rc::new(RawTy::Subst(a.clone(), Rc::new(RawSub::Id(g.clone())))),
                a.clone(),
            ))
        }
        ConvTmSubstComp => {
            let (g, t, a) = p.tm_wf(0)?;
            let (d, s, g2) = p.sub_wf(1)?;
            p.same_ctx(1, g2, g)?;
            let (th, de, d2) = p.sub_wf(2)?;
            p.same_ctx(2, d2, d)?;
            Ok(Judgment::TmEq(
                th.clone(),
                Rc::new(RawTm::Subst(
                    t.clone(),
                    Rc::new(RawSub::Comp(s.clone(), de.clone())),
                )),
                Rc::new(RawTm::Subst(
                    Rc::new(RawTm::Subst(t.clone(), s.clone())),
                    de.clone(),
                )),
                Rc::new(RawTy::Subst(
                    Rc::new(RawTy::Subst(a.clone(), s.clone())),
                    de.clone(),
                )),
            ))
        }
        ConvTmSubstId => {
            let (g, t, a) = p.tm_wf(0)?;
            Ok(Judgment::TmEq(
                g.clone(),
                Rc::new(RawTm::Subst(t.clone(), Rc::new(RawSub::Id(g.clone())))),
                t.clone(),
                a.clone(),
            ))
        }
        ConvTerminalUnique => {
            let (g, s, t) = p.sub_wf(0)?;
            if !t.is_empty() {
                return Err(p.shape_err(0, "target must be the empty context"));
            }
            Ok(Judgment::SubEq(
                g.clone(),
                s.clone(),
                Rc::new(RawSub::Terminal(g.clone())),
                t.clone(),
            ))
        }
        ConvPBeta => {
            let (g, a) = p.ty_wf(0)?;
            let (d, s, g2) = p.sub_wf(1)?;
            p.same_ctx(1, g2, g)?;
            let (dm, t, ty) = p.tm_wf(2)?;
            p.same_ctx(2, dm, d)?;
            p.same_ty(2, ty, &RawTy::Subst(a.clone(), s.clone()))?;
            Ok(Judgment::SubEq(
                d.clone(),
                Rc::new(RawSub::Comp(
                    Rc::new(RawSub::P(a.clone())),
                    Rc::new(RawSub::Pair(s.clone(), t.clone(), a.clone())),
                )),
                s.clone(),
                g.clone(),
            ))
        }
        ConvQBeta => {
            let (g, a) = p.ty_wf(0)?;
            let (d, s, g2) = p.sub_wf(1)?;
            p.same_ctx(1, g2, g)?;
            let (dm, t, ty) = p.tm_wf(2)?;
            p.same_ctx(2, dm, d)?;
            p.same_ty(2, ty, &RawTy::Subst(a.clone(), s.clone()))?;
            Ok(Judgment::TmEq(
                d.clone(),
                Rc::new(RawTm::Subst(
                    Rc::new(RawTm::Q(a.clone())),
                    Rc::new(RawSub::Pair(s.clone(), t.clone(), a.clone())),
                )),
                t.clone(),
                Rc::new(RawTy::Subst(a.clone(), s.clone())),
            ))
        }
        ConvPairEta => {
            let (d, s, t) = p.sub_wf(0)?;
            let RawCtx::Ext(g, a) = t.as_ref() else {
                return Err(p.shape_err(0, "target must be an extended context Γ·A"));
            };
            let _ = g;
            Ok(Judgment::SubEq(
                d.clone(),
                s.clone(),
                Rc::new(RawSub::Pair(
                    Rc::new(RawSub::Comp(Rc::new(RawSub::P(a.clone())), s.clone())),
                    Rc::new(RawTm::Subst(Rc::new(RawTm::Q(a.clone())), s.clone())),
                    a.clone(),
                )),
                t.clone(),
            ))
        }
        // ---- unit ----
        UnitForm => {
            let (g, _) = p.ctx_eq(0)?;
            Ok(Judgment::ty_wf(g.clone(), RawTy::Unit))
        }
        UnitSubst => {
            let (d, s, _) = p.sub_wf(0)?;
            Ok(Judgment::TyEq(
                d.clone(),
                Rc::new(RawTy::Subst(Rc::new(RawTy::Unit), s.clone())),
                Rc::new(RawTy::Unit),
            ))
        }
        UnitIntro => {
            let (g, _) = p.ctx_eq(0)?;
            Ok(Judgment::tm_wf(g.clone(), RawTm::Star, RawTy::Unit))
        }
        UnitEta => {
            let (g, c, ty) = p.tm_wf(0)?;
            p.same_ty(0, ty, &RawTy::Unit)?;
            Ok(Judgment::TmEq(
                g.clone(),
                Rc::new(RawTm::Star),
                c.clone(),
                Rc::new(RawTy::Unit),
            ))
        }
        // ---- Σ ----
        SigmaForm => {
            let (g, a, a2) = p.ty_eq(0)?;
            let (ga, b, b2) = p.ty_eq(1)?;
            p.same_ctx(1, ga, &Rc::new(RawCtx::Ext(g.clone(), a.clone())))?;
            Ok(Judgment::TyEq(
                g.clone(),
                Rc::new(RawTy::Sigma(a.clone(), b.clone())),
                Rc::new(RawTy::Sigma(a2.clone(), b2.clone())),
            ))
        }
        SigmaSubst => {
            let (g, a) = p.ty_wf(0)?;
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &Rc::new(RawCtx::Ext(g.clone(), a.clone())))?;
            let (d, s, g2) = p.sub_wf(2)?;
            p.same_ctx(2, g2, g)?;
            Ok(Judgment::TyEq(
                d.clone(),
                Rc::new(RawTy::Subst(
                    Rc::new(RawTy::Sigma(a.clone(), b.clone())),
                    s.clone(),
                )),
                Rc::new(RawTy::Sigma(
                    Rc::new(RawTy::Subst(a.clone(), s.clone())),
                    Rc::new(RawTy::Subst(b.clone(), Rc::new(weaken_sub(s, a)))),
                )),
            ))
        }
        SigmaPairCong => {
            let (g, a) = p.ty_wf(0)?;
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &Rc::new(RawCtx::Ext(g.clone(), a.clone())))?;
            let (gm, t1, t1b, ty1) = p.tm_eq(2)?;
            p.same_ctx(2, gm, g)?;
            if ty1 != a {
                return Err(p.shape_err(2, "first component must have the Σ domain type"));
            }
            let (gm2, t2, t2b, ty2) = p.tm_eq(3)?;
            p.same_ctx(3, gm2, g)?;
            p.same_ty(
                3,
                ty2,
                &RawTy::Subst(b.clone(), Rc::new(id_ext(g, t1, a))),
            )?;
            Ok(Judgment::TmEq(
                g.clone(),
                Rc::new(RawTm::SigPair(t1.clone(), t2.clone())),
                Rc::new(RawTm::SigPair(t1b.clone(), t2b.clone())),
                Rc::new(RawTy::Sigma(a.clone(), b.clone())),
            ))
        }
        SigmaFstCong | SigmaSndCong | SigmaEta => {
            let (g, a) = p.ty_wf(0)?;
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &Rc::new(RawCtx::Ext(g.clone(), a.clone())))?;
            let (gm, c, c2, ty) = p.tm_eq(2)?;
            p.same_ctx(2, gm, g)?;
            p.same_ty(2, ty, &RawTy::Sigma(a.clone(), b.clone()))?;
            match rule {
                SigmaFstCong => Ok(Judgment::TmEq(
                    g.clone(),
                    Rc::new(RawTm::SigFst(c.clone())),
                    Rc::new(RawTm::SigFst(c2.clone())),
                    a.clone(),
                )),
                SigmaSndCong => Ok(Judgment::TmEq(
                    g.clone(),
                    Rc::new(RawTm::SigSnd(c.clone())),
                    Rc::new(RawTm::SigSnd(c2.clone())),
                    Rc::new(RawTy::Subst(
                        b.clone(),
                        Rc::new(id_ext(g, &Rc::new(RawTm::SigFst(c.clone())), a)),
                    )),
                )),
                SigmaEta => {
                    if c != c2 {
                        return Err(p.shape_err(2, "expected a reflexive instance Γ ⊢ c : Σ(A,B)"));
                    }
                    Ok(Judgment::TmEq(
                        g.clone(),
                        Rc::new(RawTm::SigPair(
                            Rc::new(RawTm::SigFst(c.clone())),
                            Rc::new(RawTm::SigSnd(c.clone())),
                        )),
                        c.clone(),
                        Rc::new(RawTy::Sigma(a.clone(), b.clone())),
                    ))
                }
                _ => unreachable!(),
            }
        }
        SigmaFstBeta | SigmaSndBeta => {
            let (g, a) = p.ty_wf(0)?;
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &Rc::new(RawCtx::Ext(g.clone(), a.clone())))?;
            let (gm, t1, ty1) = p.tm_wf(2)?;
            p.same_ctx(2, gm, g)?;
            if ty1 != a {
                return Err(p.shape_err(2, "first component must have the Σ domain type"));
            }
            let snd_ty = Rc::new(RawTy::Subst(b.clone(), Rc::new(id_ext(g, t1, a))));
            let (gm2, t2, ty2) = p.tm_wf(3)?;
            p.same_ctx(3, gm2, g)?;
            if ty2 != &snd_ty {
                return Err(p.shape_err(3, "second component type must be B[⟨id,a⟩]"));
            }
            let pair = Rc::new(RawTm::SigPair(t1.clone(), t2.clone()));
            match rule {
                SigmaFstBeta => Ok(Judgment::TmEq(
                    g.clone(),
                    Rc::new(RawTm::SigFst(pair)),
                    t1.clone(),
                    a.clone(),
                )),
                SigmaSndBeta => Ok(Judgment::TmEq(
                    g.clone(),
                    Rc::new(RawTm::SigSnd(pair)),
                    t2.clone(),
                    snd_ty,
                )),
                _ => unreachable!(),
            }
        }
        SigmaPairSubst => {
            let (g, a) = p.ty_wf(0)?;
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &Rc::new(RawCtx::Ext(g.clone(), a.clone())))?;
            let (gm, t1, ty1) = p.tm_wf(2)?;
            p.same_ctx(2, gm, g)?;
            if ty1 != a {
                return Err(p.shape_err(2, "first component must have the Σ domain type"));
            }
            let (gm2, t2, ty2) = p.tm_wf(3)?;
            p.same_ctx(3, gm2, g)?;
            p.same_ty(
                3,
                ty2,
                &RawTy::Subst(b.clone(), Rc::new(id_ext(g, t1, a))),
            )?;
            let (d, s, g2) = p.sub_wf(4)?;
            p.same_ctx(4, g2, g)?;
            let sigma = Rc::new(RawTy::Sigma(a.clone(), b.clone()));
            Ok(Judgment::TmEq(
                d.clone(),
                Rc::new(RawTm::Subst(
                    Rc::new(RawTm::SigPair(t1.clone(), t2.clone())),
                    s.clone(),
                )),
                Rc::new(RawTm::SigPair(
                    Rc::new(RawTm::Subst(t1.clone(), s.clone())),
                    Rc::new(RawTm::Subst(t2.clone(), s.clone())),
                )),
                Rc::new(RawTy::Subst(sigma, s.clone())),
            ))
        }
        // ---- Π ----
        PiForm => {
            let (g, a, a2) = p.ty_eq(0)?;
            let (ga, b, b2) = p.ty_eq(1)?;
            p.same_ctx(1, ga, &Rc::new(RawCtx::Ext(g.clone(), a.clone())))?;
            Ok(Judgment::TyEq(
                g.clone(),
                Rc::new(RawTy::Pi(a.clone(), b.clone())),
                Rc::new(RawTy::Pi(a2.clone(), b2.clone())),
            ))
        }
        PiSubst => {
            let (g, a) = p.ty_wf(0)?;
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &Rc::new(RawCtx::Ext(g.clone(), a.clone())))?;
            let (d, s, g2) = p.sub_wf(2)?;
            p.same_ctx(2, g2, g)?;
            Ok(Judgment::TyEq(
                d.clone(),
                Rc::new(RawTy::Subst(
                    Rc::new(RawTy::Pi(a.clone(), b.clone())),
                    s.clone(),
                )),
                Rc::new(RawTy::Pi(
                    Rc::new(RawTy::Subst(a.clone(), s.clone())),
                    Rc::new(RawTy::Subst(b.clone(), Rc::new(weaken_sub(s, a)))),
                )),
            ))
        }
        PiLamCong => {
            let (g, a) = p.ty_wf(0)?;
            let ext = Rc::new(RawCtx::Ext(g.clone(), a.clone()));
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &ext)?;
            let (gm, t, t2, ty) = p.tm_eq(2)?;
            p.same_ctx(2, gm, &ext)?;
            if ty != b {
                return Err(p.shape_err(2, "body must have the Π codomain type"));
            }
            Ok(Judgment::TmEq(
                g.clone(),
                Rc::new(RawTm::Lam(t.clone())),
                Rc::new(RawTm::Lam(t2.clone())),
                Rc::new(RawTy::Pi(a.clone(), b.clone())),
            ))
        }
        PiApCong => {
            let (g, a) = p.ty_wf(0)?;
            let ext = Rc::new(RawCtx::Ext(g.clone(), a.clone()));
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &ext)?;
            let (gm, c, c2, ty) = p.tm_eq(2)?;
            p.same_ctx(2, gm, g)?;
            p.same_ty(2, ty, &RawTy::Pi(a.clone(), b.clone()))?;
            let (gm2, t, t2, ty2) = p.tm_eq(3)?;
            p.same_ctx(3, gm2, g)?;
            if ty2 != a {
                return Err(p.shape_err(3, "argument must have the Π domain type"));
            }
            Ok(Judgment::TmEq(
                g.clone(),
                Rc::new(RawTm::App(c.clone(), t.clone())),
                Rc::new(RawTm::App(c2.clone(), t2.clone())),
                Rc::new(RawTy::Subst(b.clone(), Rc::new(id_ext(g, t, a)))),
            ))
        }
        PiBeta => {
            let (g, a) = p.ty_wf(0)?;
            let ext = Rc::new(RawCtx::Ext(g.clone(), a.clone()));
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &ext)?;
            let (gm, body, ty) = p.tm_wf(2)?;
            p.same_ctx(2, gm, &ext)?;
            if ty != b {
                return Err(p.shape_err(2, "body must have the Π codomain type"));
            }
            let (gm2, arg, ty2) = p.tm_wf(3)?;
            p.same_ctx(3, gm2, g)?;
            if ty2 != a {
                return Err(p.shape_err(3, "argument must have the Π domain type"));
            }
            let section = Rc::new(id_ext(g, arg, a));
            Ok(Judgment::TmEq(
                g.clone(),
                Rc::new(RawTm::App(
                    Rc::new(RawTm::Lam(body.clone())),
                    arg.clone(),
                )),
                Rc::new(RawTm::Subst(body.clone(), section.clone())),
                Rc::new(RawTy::Subst(b.clone(), section)),
            ))
        }
        PiEta => {
            let (g, a) = p.ty_wf(0)?;
            let ext = Rc::new(RawCtx::Ext(g.clone(), a.clone()));
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &ext)?;
            let (gm, c, ty) = p.tm_wf(2)?;
            p.same_ctx(2, gm, g)?;
            p.same_ty(2, ty, &RawTy::Pi(a.clone(), b.clone()))?;
            Ok(Judgment::TmEq(
                g.clone(),
                Rc::new(RawTm::Lam(Rc::new(RawTm::App(
                    Rc::new(RawTm::Subst(c.clone(), Rc::new(RawSub::P(a.clone())))),
                    Rc::new(RawTm::Q(a.clone())),
                )))),
                c.clone(),
                Rc::new(RawTy::Pi(a.clone(), b.clone())),
            ))
        }
        PiLamSubst => {
            let (g, a) = p.ty_wf(0)?;
            let ext = Rc::new(RawCtx::Ext(g.clone(), a.clone()));
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &ext)?;
            let (gm, body, ty) = p.tm_wf(2)?;
            p.same_ctx(2, gm, &ext)?;
            if ty != b {
                return Err(p.shape_err(2, "body must have the Π codomain type"));
            }
            let (d, s, g2) = p.sub_wf(3)?;
            p.same_ctx(3, g2, g)?;
            Ok(Judgment::TmEq(
                d.clone(),
                Rc::new(RawTm::Subst(
                    Rc::new(RawTm::Lam(body.clone())),
                    s.clone(),
                )),
                Rc::new(RawTm::Lam(Rc::new(RawTm::Subst(
                    body.clone(),
                    Rc::new(weaken_sub(s, a)),
                )))),
                Rc::new(RawTy::Subst(
                    Rc::new(RawTy::Pi(a.clone(), b.clone())),
                    s.clone(),
                )),
            ))
        }
        PiApSubst => {
            let (g, a) = p.ty_wf(0)?;
            let ext = Rc::new(RawCtx::Ext(g.clone(), a.clone()));
            let (ga, b) = p.ty_wf(1)?;
            p.same_ctx(1, ga, &ext)?;
            let (gm, c, ty) = p.tm_wf(2)?;
            p.same_ctx(2, gm, g)?;
            p.same_ty(2, ty, &RawTy::Pi(a.clone(), b.clone()))?;
            let (gm2, arg, ty2) = p.tm_wf(3)?;
            p.same_ctx(3, gm2, g)?;
            if ty2 != a {
                return Err(p.shape_err(3, "argument must have the Π domain type"));
            }
            let (d, s, g3) = p.sub_wf(4)?;
            p.same_ctx(4, g3, g)?;
            let section = Rc::new(id_ext(g, arg, a));
            Ok(Judgment::TmEq(
                d.clone(),
                Rc::new(RawTm::Subst(
                    Rc::new(RawTm::App(c.clone(), arg.clone())),
                    s.clone(),
                )),
                Rc::new(RawTm::App(
                    Rc::new(RawTm::Subst(c.clone(), s.clone())),
                    Rc::new(RawTm::Subst(arg.clone(), s.clone())),
                )),
                Rc::new(RawTy::Subst(
                    Rc::new(RawTy::Subst(b.clone(), section)),
                    s.clone(),
                )),
            ))
        }
        // ---- I_ext ----
        IForm => {
            let (g, a, a2) = p.ty_eq(0)?;
            let (gm, l, l2, ty) = p.tm_eq(1)?;
            p.same_ctx(1, gm, g)?;
            if ty != a {
                return Err(p.shape_err(1, "left endpoint must have the identity's type"));
            }
            let (gm2, r, r2, ty2) = p.tm_eq(2)?;
            p.same_ctx(2, gm2, g)?;
            if ty2 != a {
                return Err(p.shape_err(2, "right endpoint must have the identity's type"));
            }
            Ok(Judgment::TyEq(
                g.clone(),
                Rc::new(RawTy::IExt(a.clone(), l.clone(), r.clone())),
                Rc::new(RawTy::IExt(a2.clone(), l2.clone(), r2.clone())),
            ))
        }
        IIntro => {
            let (g, a, a2) = p.ty_eq(0)?;
            let (gm, t, t2, ty) = p.tm_eq(1)?;
            p.same_ctx(1, gm, g)?;
            if ty != a {
                return Err(p.shape_err(1, "reflexivity endpoint must have the annotated type"));
            }
            Ok(Judgment::TmEq(
                g.clone(),
                Rc::new(RawTm::Refl(a.clone(), t.clone())),
                Rc::new(RawTm::Refl(a2.clone(), t2.clone())),
                Rc::new(RawTy::IExt(a.clone(), t.clone(), t.clone())),
            ))
        }
        ISubst => {
            let (g, a) = p.ty_wf(0)?;
            let (gm, l, ty) = p.tm_wf(1)?;
            p.same_ctx(1, gm, g)?;
            if ty != a {
                return Err(p.shape_err(1, "left endpoint must have the identity's type"));
            }
            let (gm2, r, ty2) = p.tm_wf(2)?;
            p.same_ctx(2, gm2, g)?;
            if ty2 != a {
                return Err(p.shape_err(2, "right endpoint must have the identity's type"));
            }
            let (d, s, g2) = p.sub_wf(3)?;
            p.same_ctx(3, g2, g)?;
            Ok(Judgment::TyEq(
                d.clone(),
                Rc::new(RawTy::Subst(
                    Rc::new(RawTy::IExt(a.clone(), l.clone(), r.clone())),
                    s.clone(),
                )),
                Rc::new(RawTy::IExt(
                    Rc::new(RawTy::Subst(a.clone(), s.clone())),
                    Rc::new(RawTm::Subst(l.clone(), s.clone())),
                    Rc::new(RawTm::Subst(r.clone(), s.clone())),
                )),
            ))
        }
        IReflect => {
            let (g, _c, ty) = p.tm_wf(0)?;
            let RawTy::IExt(a, l, r) = ty.as_ref() else {
                return Err(p.shape_err(0, "premise type must be an identity type I_A(a,a′)"));
            };
            Ok(Judgment::TmEq(g.clone(), l.clone(), r.clone(), a.clone()))
        }
        IUnique => {
            let (g, c, ty) = p.tm_wf(0)?;
            let RawTy::IExt(a, l, _r) = ty.as_ref() else {
                return Err(p.shape_err(0, "premise type must be an identity type I_A(a,a′)"));
            };
            Ok(Judgment::TmEq(
                g.clone(),
                c.clone(),
                Rc::new(RawTm::Refl(a.clone(), l.clone())),
                Rc::new(RawTy::IExt(a.clone(), l.clone(), l.clone())),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_ty;

    fn base_over_empty() -> Judgment {
        apply_rule(RuleId::CongTyBase, &[], &[]).unwrap()
    }

    #[test]
    fn empty_context_axiom() {
        let j = apply_rule(RuleId::CongCtxEmpty, &[], &[]).unwrap();
        assert_eq!(j, Judgment::ctx_wf(RawCtx::Empty));
        assert!(j.is_reflexive());
    }

    #[test]
    fn conv_p_beta_conclusion_shape() {
        // Γ = 1, A = o, γ = id_1, a arbitrary well-typed — use q over 1·o? Simplest:
        // premises Γ⊢A; Δ⊢γ:Γ; Δ⊢a:A[γ] with Δ = 1·o, γ = ⟨⟩, a = q_o needs A[γ]
        // to match; instead take Δ = Γ = 1 and check the printed conclusion.
        let a = parse_ty("(ty-base)").unwrap();
        let ty_wf = base_over_empty();
        let id = Judgment::sub_wf(RawCtx::Empty, RawSub::id(RawCtx::Empty), RawCtx::Empty);
        // no closed term of type o[id] exists syntactically, so fabricate the
        // reflexive premise directly; apply_rule checks shapes, not typing.
        let tm = Judgment::tm_wf(
            RawCtx::Empty,
            RawTm::Star,
            RawTy::subst(a.clone(), RawSub::id(RawCtx::Empty)),
        );
        let j = apply_rule(RuleId::ConvPBeta, &[ty_wf, id, tm], &[]).unwrap();
        assert_eq!(
            j.to_string(),
            "(sub-eq (ctx-empty) (sub-comp (sub-p (ty-base)) (sub-pair (sub-id (ctx-empty)) \
             (tm-star) (ty-base))) (sub-id (ctx-empty)) (ctx-empty))"
        );
    }

    #[test]
    fn per_sym_on_wrong_sort_is_shape_mismatch() {
        let j = base_over_empty();
        let err = apply_rule(RuleId::PerSymSub, &[j], &[]).unwrap_err();
        assert!(matches!(err, KernelError::ShapeMismatch { slot: 0, .. }));
    }

    #[test]
    fn arity_is_checked() {
        let err = apply_rule(RuleId::PerTransCtx, &[], &[]).unwrap_err();
        assert!(matches!(
            err,
            KernelError::ArityMismatch {
                expected: 2,
                got: 0,
                ..
            }
        ));
    }

    #[test]
    fn conversion_rules_reject_non_reflexive_premises() {
        let one = Rc::new(RawCtx::Empty);
        let non_refl = Judgment::sub_eq(
            one.clone(),
            RawSub::id(RawCtx::Empty),
            RawSub::terminal(RawCtx::Empty),
            one.clone(),
        );
        let err = apply_rule(RuleId::ConvIdLeft, &[non_refl], &[]).unwrap_err();
        assert!(matches!(err, KernelError::ShapeMismatch { .. }));
    }

    #[test]
    fn keywords_round_trip() {
        for rule in ALL_RULES {
            assert_eq!(RuleId::from_keyword(rule.keyword()).unwrap(), *rule);
        }
        assert!(RuleId::from_keyword("no-such-rule").is_err());
        assert_eq!(ALL_RULES.len(), 59);
    }

    #[test]
    fn boxed_rule_count_is_thirty_three() {
        let boxed = ALL_RULES
            .iter()
            .filter(|r| r.fragment() == Fragment::Plain)
            .count();
        assert_eq!(boxed, 33);
    }
}
