//! The four-sorted raw combinator language of the free cwf, extended with
//! unit, extensional identity, Σ, and Π type formers.
//!
//! Every annotation that the informal notation writes as a subscript
//! (`id_Γ`, `⟨⟩_Γ`, `p_A`, `⟨γ,a⟩_A`, `q_A`, `r_{A,a}`) is a mandatory
//! field, so checking stays syntax-directed. Trees are immutable with
//! shared (`Rc`) children; parsing and printing are pure.
//!
//! Concrete surface syntax is S-expressions with fixed head keywords:
//!
//! ```text
//! ctx ::= (ctx-empty) | (ctx-ext ctx ty)
//! sub ::= (sub-comp sub sub) | (sub-id ctx) | (sub-terminal ctx)
//!       | (sub-p ty) | (sub-pair sub tm ty)
//! ty  ::= (ty-base) | (ty-subst ty sub) | (ty-unit) | (ty-i ty tm tm)
//!       | (ty-sigma ty ty) | (ty-pi ty ty)
//! tm  ::= (tm-q ty) | (tm-subst tm sub) | (tm-star) | (tm-refl ty tm)
//!       | (tm-pair tm tm) | (tm-fst tm) | (tm-snd tm) | (tm-lam tm)
//!       | (tm-ap tm tm)
//! ```

use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::sexpr::{self, ParseError, Spanned, SpannedKind};

/// Raw contexts: `1` and `Γ·A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawCtx {
    Empty,
    Ext(Rc<RawCtx>, Rc<RawTy>),
}

/// Raw substitutions: `γ∘δ`, `id_Γ`, `⟨⟩_Γ`, `p_A`, `⟨γ,a⟩_A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawSub {
    Comp(Rc<RawSub>, Rc<RawSub>),
    Id(Rc<RawCtx>),
    Terminal(Rc<RawCtx>),
    P(Rc<RawTy>),
    Pair(Rc<RawSub>, Rc<RawTm>, Rc<RawTy>),
}

/// Raw types: `o`, `A[γ]`, `N₁`, `I_A(a,a′)`, `Σ(A,B)`, `Π(A,B)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawTy {
    Base,
    Subst(Rc<RawTy>, Rc<RawSub>),
    Unit,
    IExt(Rc<RawTy>, Rc<RawTm>, Rc<RawTm>),
    Sigma(Rc<RawTy>, Rc<RawTy>),
    Pi(Rc<RawTy>, Rc<RawTy>),
}

/// Raw terms: `q_A`, `a[γ]`, `0₁`, `r_{A,a}`, pairs, projections, `λ`, `ap`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawTm {
    Q(Rc<RawTy>),
    Subst(Rc<RawTm>, Rc<RawSub>),
    Star,
    Refl(Rc<RawTy>, Rc<RawTm>),
    SigPair(Rc<RawTm>, Rc<RawTm>),
    SigFst(Rc<RawTm>),
    SigSnd(Rc<RawTm>),
    Lam(Rc<RawTm>),
    App(Rc<RawTm>, Rc<RawTm>),
}

/// A tree of any of the four sorts, as returned by [`parse`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Ctx(RawCtx),
    Sub(RawSub),
    Ty(RawTy),
    Tm(RawTm),
}

/// The four syntactic sorts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Ctx,
    Sub,
    Ty,
    Tm,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sort::Ctx => "ctx",
            Sort::Sub => "sub",
            Sort::Ty => "ty",
            Sort::Tm => "tm",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("sort error at byte {position}: slot requires a {expected}, found `{found}`")]
    Sort {
        position: usize,
        expected: Sort,
        found: String,
    },
}

impl RawCtx {
    pub fn ext(self, a: RawTy) -> RawCtx {
        RawCtx::Ext(Rc::new(self), Rc::new(a))
    }

    /// Number of `Ext` nodes along the spine.
    pub fn len(&self) -> usize {
        match self {
            RawCtx::Empty => 0,
            RawCtx::Ext(g, _) => g.len() + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, RawCtx::Empty)
    }

    /// Entry types from the outside in: `1·A₁·…·Aₙ` yields `[A₁, …, Aₙ]`.
    pub fn entries(&self) -> Vec<Rc<RawTy>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                RawCtx::Empty => break,
                RawCtx::Ext(g, a) => {
                    out.push(a.clone());
                    cur = g;
                }
            }
        }
        out.reverse();
        out
    }

    pub fn size(&self) -> usize {
        match self {
            RawCtx::Empty => 1,
            RawCtx::Ext(g, a) => 1 + g.size() + a.size(),
        }
    }
}

impl RawSub {
    pub fn comp(outer: impl Into<Rc<RawSub>>, inner: impl Into<Rc<RawSub>>) -> RawSub {
        RawSub::Comp(outer.into(), inner.into())
    }

    pub fn id(g: impl Into<Rc<RawCtx>>) -> RawSub {
        RawSub::Id(g.into())
    }

    pub fn terminal(g: impl Into<Rc<RawCtx>>) -> RawSub {
        RawSub::Terminal(g.into())
    }

    pub fn p(a: impl Into<Rc<RawTy>>) -> RawSub {
        RawSub::P(a.into())
    }

    pub fn pair(
        sub: impl Into<Rc<RawSub>>,
        tm: impl Into<Rc<RawTm>>,
        ty: impl Into<Rc<RawTy>>,
    ) -> RawSub {
        RawSub::Pair(sub.into(), tm.into(), ty.into())
    }

    pub fn size(&self) -> usize {
        match self {
            RawSub::Comp(g, d) => 1 + g.size() + d.size(),
            RawSub::Id(g) | RawSub::Terminal(g) => 1 + g.size(),
            RawSub::P(a) => 1 + a.size(),
            RawSub::Pair(g, t, a) => 1 + g.size() + t.size() + a.size(),
        }
    }
}

impl RawTy {
    pub fn subst(ty: impl Into<Rc<RawTy>>, sub: impl Into<Rc<RawSub>>) -> RawTy {
        RawTy::Subst(ty.into(), sub.into())
    }

    pub fn i_ext(
        ty: impl Into<Rc<RawTy>>,
        lhs: impl Into<Rc<RawTm>>,
        rhs: impl Into<Rc<RawTm>>,
    ) -> RawTy {
        RawTy::IExt(ty.into(), lhs.into(), rhs.into())
    }

    pub fn sigma(dom: impl Into<Rc<RawTy>>, cod: impl Into<Rc<RawTy>>) -> RawTy {
        RawTy::Sigma(dom.into(), cod.into())
    }

    pub fn pi(dom: impl Into<Rc<RawTy>>, cod: impl Into<Rc<RawTy>>) -> RawTy {
        RawTy::Pi(dom.into(), cod.into())
    }

    pub fn size(&self) -> usize {
        match self {
            RawTy::Base | RawTy::Unit => 1,
            RawTy::Subst(a, g) => 1 + a.size() + g.size(),
            RawTy::IExt(a, l, r) => 1 + a.size() + l.size() + r.size(),
            RawTy::Sigma(a, b) | RawTy::Pi(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl RawTm {
    pub fn q(ty: impl Into<Rc<RawTy>>) -> RawTm {
        RawTm::Q(ty.into())
    }

    pub fn subst(tm: impl Into<Rc<RawTm>>, sub: impl Into<Rc<RawSub>>) -> RawTm {
        RawTm::Subst(tm.into(), sub.into())
    }

    pub fn refl(ty: impl Into<Rc<RawTy>>, tm: impl Into<Rc<RawTm>>) -> RawTm {
        RawTm::Refl(ty.into(), tm.into())
    }

    pub fn sig_pair(a: impl Into<Rc<RawTm>>, b: impl Into<Rc<RawTm>>) -> RawTm {
        RawTm::SigPair(a.into(), b.into())
    }

    pub fn sig_fst(c: impl Into<Rc<RawTm>>) -> RawTm {
        RawTm::SigFst(c.into())
    }

    pub fn sig_snd(c: impl Into<Rc<RawTm>>) -> RawTm {
        RawTm::SigSnd(c.into())
    }

    pub fn lam(body: impl Into<Rc<RawTm>>) -> RawTm {
        RawTm::Lam(body.into())
    }

    pub fn ap(fun: impl Into<Rc<RawTm>>, arg: impl Into<Rc<RawTm>>) -> RawTm {
        RawTm::App(fun.into(), arg.into())
    }

    pub fn size(&self) -> usize {
        match self {
            RawTm::Star => 1,
            RawTm::Q(a) => 1 + a.size(),
            RawTm::Subst(t, g) => 1 + t.size() + g.size(),
            RawTm::Refl(a, t) => 1 + a.size() + t.size(),
            RawTm::SigPair(a, b) | RawTm::App(a, b) => 1 + a.size() + b.size(),
            RawTm::SigFst(c) | RawTm::SigSnd(c) => 1 + c.size(),
            RawTm::Lam(b) => 1 + b.size(),
        }
    }
}

impl Node {
    pub fn sort(&self) -> Sort {
        match self {
            Node::Ctx(_) => Sort::Ctx,
            Node::Sub(_) => Sort::Sub,
            Node::Ty(_) => Sort::Ty,
            Node::Tm(_) => Sort::Tm,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Ctx(c) => c.size(),
            Node::Sub(s) => s.size(),
            Node::Ty(a) => a.size(),
            Node::Tm(t) => t.size(),
        }
    }
}

/// Every head keyword of the grammar, used by the coverage test and docs.
pub const KEYWORDS: &[(&str, Sort)] = &[
    ("ctx-empty", Sort::Ctx),
    ("ctx-ext", Sort::Ctx),
    ("sub-comp", Sort::Sub),
    ("sub-id", Sort::Sub),
    ("sub-terminal", Sort::Sub),
    ("sub-p", Sort::Sub),
    ("sub-pair", Sort::Sub),
    ("ty-base", Sort::Ty),
    ("ty-subst", Sort::Ty),
    ("ty-unit", Sort::Ty),
    ("ty-i", Sort::Ty),
    ("ty-sigma", Sort::Ty),
    ("ty-pi", Sort::Ty),
    ("tm-q", Sort::Tm),
    ("tm-subst", Sort::Tm),
    ("tm-star", Sort::Tm),
    ("tm-refl", Sort::Tm),
    ("tm-pair", Sort::Tm),
    ("tm-fst", Sort::Tm),
    ("tm-snd", Sort::Tm),
    ("tm-lam", Sort::Tm),
    ("tm-ap", Sort::Tm),
];

fn keyword_sort(kw: &str) -> Option<Sort> {
    KEYWORDS.iter().find(|(k, _)| *k == kw).map(|(_, s)| *s)
}

struct TreeReader;

impl TreeReader {
    fn items<'a>(
        e: &'a Spanned,
        kw: &str,
        arity: usize,
    ) -> Result<&'a [Spanned], SyntaxError> {
        match &e.kind {
            SpannedKind::List(items) if items.len() == arity + 1 => Ok(&items[1..]),
            _ => Err(ParseError::new(e.start, format!("({kw} …) with {arity} argument(s)")).into()),
        }
    }

    fn sort_error(e: &Spanned, expected: Sort) -> SyntaxError {
        SyntaxError::Sort {
            position: e.start,
            expected,
            found: e.head().unwrap_or("<atom>").to_string(),
        }
    }

    fn head<'a>(e: &'a Spanned) -> Result<&'a str, SyntaxError> {
        e.head()
            .ok_or_else(|| ParseError::new(e.start, "a (keyword …) form").into())
    }

    fn ctx(e: &Spanned) -> Result<RawCtx, SyntaxError> {
        let kw = Self::head(e)?;
        match kw {
            "ctx-empty" => {
                Self::items(e, kw, 0)?;
                Ok(RawCtx::Empty)
            }
            "ctx-ext" => {
                let args = Self::items(e, kw, 2)?;
                Ok(RawCtx::Ext(
                    Rc::new(Self::ctx(&args[0])?),
                    Rc::new(Self::ty(&args[1])?),
                ))
            }
            _ if keyword_sort(kw).is_some() => Err(Self::sort_error(e, Sort::Ctx)),
            _ => Err(ParseError::new(e.start, "a ctx keyword").into()),
        }
    }

    fn sub(e: &Spanned) -> Result<RawSub, SyntaxError> {
        let kw = Self::head(e)?;
        match kw {
            "sub-comp" => {
                let args = Self::items(e, kw, 2)?;
                Ok(RawSub::comp(Self::sub(&args[0])?, Self::sub(&args[1])?))
            }
            "sub-id" => {
                let args = Self::items(e, kw, 1)?;
                Ok(RawSub::id(Self::ctx(&args[0])?))
            }
            "sub-terminal" => {
                let args = Self::items(e, kw, 1)?;
                Ok(RawSub::terminal(Self::ctx(&args[0])?))
            }
            "sub-p" => {
                let args = Self::items(e, kw, 1)?;
                Ok(RawSub::p(Self::ty(&args[0])?))
            }
            "sub-pair" => {
                let args = Self::items(e, kw, 3)?;
                Ok(RawSub::pair(
                    Self::sub(&args[0])?,
                    Self::tm(&args[1])?,
                    Self::ty(&args[2])?,
                ))
            }
            _ if keyword_sort(kw).is_some() => Err(Self::sort_error(e, Sort::Sub)),
            _ => Err(ParseError::new(e.start, "a sub keyword").into()),
        }
    }

    fn ty(e: &Spanned) -> Result<RawTy, SyntaxError> {
        let kw = Self::head(e)?;
        match kw {
            "ty-base" => {
                Self::items(e, kw, 0)?;
                Ok(RawTy::Base)
            }
            "ty-subst" => {
                let args = Self::items(e, kw, 2)?;
                Ok(RawTy::subst(Self::ty(&args[0])?, Self::sub(&args[1])?))
            }
            "ty-unit" => {
                Self::items(e, kw, 0)?;
                Ok(RawTy::Unit)
            }
            "ty-i" => {
                let args = Self::items(e, kw, 3)?;
                Ok(RawTy::i_ext(
                    Self::ty(&args[0])?,
                    Self::tm(&args[1])?,
                    Self::tm(&args[2])?,
                ))
            }
            "ty-sigma" => {
                let args = Self::items(e, kw, 2)?;
                Ok(RawTy::sigma(Self::ty(&args[0])?, Self::ty(&args[1])?))
            }
            "ty-pi" => {
                let args = Self::items(e, kw, 2)?;
                Ok(RawTy::pi(Self::ty(&args[0])?, Self::ty(&args[1])?))
            }
            _ if keyword_sort(kw).is_some() => Err(Self::sort_error(e, Sort::Ty)),
            _ => Err(ParseError::new(e.start, "a ty keyword").into()),
        }
    }

    fn tm(e: &Spanned) -> Result<RawTm, SyntaxError> {
        let kw = Self::head(e)?;
        match kw {
            "tm-q" => {
                let args = Self::items(e, kw, 1)?;
                Ok(RawTm::q(Self::ty(&args[0])?))
            }
            "tm-subst" => {
                let args = Self::items(e, kw, 2)?;
                Ok(RawTm::subst(Self::tm(&args[0])?, Self::sub(&args[1])?))
            }
            "tm-star" => {
                Self::items(e, kw, 0)?;
                Ok(RawTm::Star)
            }
            "tm-refl" => {
                let args = Self::items(e, kw, 2)?;
                Ok(RawTm::refl(Self::ty(&args[0])?, Self::tm(&args[1])?))
            }
            "tm-pair" => {
                let args = Self::items(e, kw, 2)?;
                Ok(RawTm::sig_pair(Self::tm(&args[0])?, Self::tm(&args[1])?))
            }
            "tm-fst" => {
                let args = Self::items(e, kw, 1)?;
                Ok(RawTm::sig_fst(Self::tm(&args[0])?))
            }
            "tm-snd" => {
                let args = Self::items(e, kw, 1)?;
                Ok(RawTm::sig_snd(Self::tm(&args[0])?))
            }
            "tm-lam" => {
                let args = Self::items(e, kw, 1)?;
                Ok(RawTm::lam(Self::tm(&args[0])?))
            }
            "tm-ap" => {
                let args = Self::items(e, kw, 2)?;
                Ok(RawTm::ap(Self::tm(&args[0])?, Self::tm(&args[1])?))
            }
            _ if keyword_sort(kw).is_some() => Err(Self::sort_error(e, Sort::Tm)),
            _ => Err(ParseError::new(e.start, "a tm keyword").into()),
        }
    }
}

/// Parse a tree of any sort; the sort is determined by the head keyword.
pub fn parse(text: &str) -> Result<Node, SyntaxError> {
    let spanned = sexpr::read_spanned(text)?;
    parse_spanned(&spanned)
}

pub(crate) fn parse_spanned(spanned: &Spanned) -> Result<Node, SyntaxError> {
    let kw = TreeReader::head(spanned)?;
    match keyword_sort(kw) {
        Some(Sort::Ctx) => Ok(Node::Ctx(TreeReader::ctx(spanned)?)),
        Some(Sort::Sub) => Ok(Node::Sub(TreeReader::sub(spanned)?)),
        Some(Sort::Ty) => Ok(Node::Ty(TreeReader::ty(spanned)?)),
        Some(Sort::Tm) => Ok(Node::Tm(TreeReader::tm(spanned)?)),
        None => Err(ParseError::new(spanned.start, "a grammar keyword").into()),
    }
}

pub fn parse_ctx(text: &str) -> Result<RawCtx, SyntaxError> {
    TreeReader::ctx(&sexpr::read_spanned(text)?)
}

pub fn parse_sub(text: &str) -> Result<RawSub, SyntaxError> {
    TreeReader::sub(&sexpr::read_spanned(text)?)
}

pub fn parse_ty(text: &str) -> Result<RawTy, SyntaxError> {
    TreeReader::ty(&sexpr::read_spanned(text)?)
}

pub fn parse_tm(text: &str) -> Result<RawTm, SyntaxError> {
    TreeReader::tm(&sexpr::read_spanned(text)?)
}

pub(crate) fn ctx_spanned(e: &Spanned) -> Result<RawCtx, SyntaxError> {
    TreeReader::ctx(e)
}

pub(crate) fn sub_spanned(e: &Spanned) -> Result<RawSub, SyntaxError> {
    TreeReader::sub(e)
}

pub(crate) fn ty_spanned(e: &Spanned) -> Result<RawTy, SyntaxError> {
    TreeReader::ty(e)
}

pub(crate) fn tm_spanned(e: &Spanned) -> Result<RawTm, SyntaxError> {
    TreeReader::tm(e)
}

impl fmt::Display for RawCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawCtx::Empty => write!(f, "(ctx-empty)"),
            RawCtx::Ext(g, a) => write!(f, "(ctx-ext {g} {a})"),
        }
    }
}

impl fmt::Display for RawSub {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawSub::Comp(g, d) => write!(f, "(sub-comp {g} {d})"),
            RawSub::Id(g) => write!(f, "(sub-id {g})"),
            RawSub::Terminal(g) => write!(f, "(sub-terminal {g})"),
            RawSub::P(a) => write!(f, "(sub-p {a})"),
            RawSub::Pair(g, t, a) => write!(f, "(sub-pair {g} {t} {a})"),
        }
    }
}

impl fmt::Display for RawTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawTy::Base => write!(f, "(ty-base)"),
            RawTy::Subst(a, g) => write!(f, "(ty-subst {a} {g})"),
            RawTy::Unit => write!(f, "(ty-unit)"),
            RawTy::IExt(a, l, r) => write!(f, "(ty-i {a} {l} {r})"),
            RawTy::Sigma(a, b) => write!(f, "(ty-sigma {a} {b})"),
            RawTy::Pi(a, b) => write!(f, "(ty-pi {a} {b})"),
        }
    }
}

impl fmt::Display for RawTm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawTm::Q(a) => write!(f, "(tm-q {a})"),
            RawTm::Subst(t, g) => write!(f, "(tm-subst {t} {g})"),
            RawTm::Star => write!(f, "(tm-star)"),
            RawTm::Refl(a, t) => write!(f, "(tm-refl {a} {t})"),
            RawTm::SigPair(a, b) => write!(f, "(tm-pair {a} {b})"),
            RawTm::SigFst(c) => write!(f, "(tm-fst {c})"),
            RawTm::SigSnd(c) => write!(f, "(tm-snd {c})"),
            RawTm::Lam(b) => write!(f, "(tm-lam {b})"),
            RawTm::App(c, a) => write!(f, "(tm-ap {c} {a})"),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Ctx(c) => write!(f, "{c}"),
            Node::Sub(s) => write!(f, "{s}"),
            Node::Ty(a) => write!(f, "{a}"),
            Node::Tm(t) => write!(f, "{t}"),
        }
    }
}

/// Canonical text of a tree: `parse(print(n))` returns `n` structurally.
pub fn print(node: &Node) -> String {
    node.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_base_constructors() {
        assert_eq!(parse("(ctx-empty)").unwrap(), Node::Ctx(RawCtx::Empty));
        assert_eq!(
            parse("(sub-pair (sub-id (ctx-empty)) (tm-star) (ty-unit))").unwrap(),
            Node::Sub(RawSub::pair(
                RawSub::id(RawCtx::Empty),
                RawTm::Star,
                RawTy::Unit
            ))
        );
        assert_eq!(
            parse("(ty-subst (ty-base) (sub-p (ty-base)))").unwrap(),
            Node::Ty(RawTy::subst(RawTy::Base, RawSub::p(RawTy::Base)))
        );
    }

    #[test]
    fn prints_canonically() {
        assert_eq!(Node::Ctx(RawCtx::Empty).to_string(), "(ctx-empty)");
        let pair = RawSub::pair(RawSub::id(RawCtx::Empty), RawTm::Star, RawTy::Unit);
        assert_eq!(
            pair.to_string(),
            "(sub-pair (sub-id (ctx-empty)) (tm-star) (ty-unit))"
        );
    }

    #[test]
    fn print_parse_idempotent_on_messy_text() {
        let messy = "  ( sub-pair\n  (sub-id (ctx-empty))\t(tm-star)   (ty-unit) ) ";
        let node = parse(messy).unwrap();
        let printed = print(&node);
        assert_eq!(parse(&printed).unwrap(), node);
        assert_eq!(print(&parse(&printed).unwrap()), printed);
    }

    #[test]
    fn wrong_sort_in_slot_is_a_sort_error() {
        // ctx slot of sub-id holds a type
        let err = parse("(sub-id (ty-base))").unwrap_err();
        match err {
            SyntaxError::Sort { expected, .. } => assert_eq!(expected, Sort::Ctx),
            other => panic!("expected sort error, got {other:?}"),
        }
    }

    #[test]
    fn arity_mismatch_is_a_parse_error() {
        assert!(matches!(
            parse("(ctx-ext (ctx-empty))"),
            Err(SyntaxError::Parse(_))
        ));
    }

    #[test]
    fn every_keyword_is_reachable_from_the_parser() {
        // One witness per head keyword.
        let witnesses: &[&str] = &[
            "(ctx-empty)",
            "(ctx-ext (ctx-empty) (ty-base))",
            "(sub-comp (sub-id (ctx-empty)) (sub-id (ctx-empty)))",
            "(sub-id (ctx-empty))",
            "(sub-terminal (ctx-empty))",
            "(sub-p (ty-base))",
            "(sub-pair (sub-id (ctx-empty)) (tm-star) (ty-unit))",
            "(ty-base)",
            "(ty-subst (ty-base) (sub-id (ctx-empty)))",
            "(ty-unit)",
            "(ty-i (ty-unit) (tm-star) (tm-star))",
            "(ty-sigma (ty-unit) (ty-unit))",
            "(ty-pi (ty-unit) (ty-unit))",
            "(tm-q (ty-base))",
            "(tm-subst (tm-star) (sub-id (ctx-empty)))",
            "(tm-star)",
            "(tm-refl (ty-unit) (tm-star))",
            "(tm-pair (tm-star) (tm-star))",
            "(tm-fst (tm-star))",
            "(tm-snd (tm-star))",
            "(tm-lam (tm-star))",
            "(tm-ap (tm-star) (tm-star))",
        ];
        assert_eq!(witnesses.len(), KEYWORDS.len());
        for (text, (kw, sort)) in witnesses.iter().zip(KEYWORDS) {
            let node = parse(text).unwrap_or_else(|e| panic!("{kw}: {e}"));
            assert_eq!(node.sort(), *sort, "{kw}");
            assert!(text.starts_with(&format!("({kw}")), "{kw}");
            // round trip
            assert_eq!(print(&node), *text);
        }
    }
}
