//! Rule-labeled proof trees and their validation.
//!
//! The cached conclusion on each node is untrusted: [`check_derivation`]
//! recomputes every node with [`apply_rule`] from the leaves up and
//! compares. Premises are shared (`Rc`), so large derivations with
//! common subproofs stay compact in memory.

use std::fmt::Write as _;
use std::rc::Rc;

use crate::sexpr::{self, ParseError, Spanned, SpannedKind};
use crate::syntax::{self, Node, SyntaxError};

use super::judgment::Judgment;
use super::rules::{apply_rule, RuleId};
use super::KernelError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: RuleId,
    /// Extra raw-syntax arguments instantiating the schema. Every rule in
    /// the current set is determined by its premises, so this is empty in
    /// practice; the slot is kept because the file format carries it.
    pub side: Vec<Node>,
    pub premises: Vec<Rc<Derivation>>,
    /// Cached conclusion; `None` for freshly parsed trees. Never trusted.
    pub conclusion: Option<Judgment>,
}

impl Derivation {
    /// Build a node by actually applying the rule; the only way the crate
    /// itself constructs derivations.
    pub fn by_rule(rule: RuleId, premises: Vec<Rc<Derivation>>) -> Result<Derivation, KernelError> {
        let premise_judgments: Vec<Judgment> = premises
            .iter()
            .map(|d| {
                d.conclusion.clone().ok_or_else(|| KernelError::ShapeMismatch {
                    rule,
                    slot: 0,
                    detail: "premise has no computed conclusion".to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        let conclusion = apply_rule(rule, &premise_judgments, &[])?;
        Ok(Derivation {
            rule,
            side: Vec::new(),
            premises,
            conclusion: Some(conclusion),
        })
    }

    pub fn leaf(rule: RuleId) -> Result<Derivation, KernelError> {
        Derivation::by_rule(rule, Vec::new())
    }

    /// Total number of nodes.
    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(|p| p.node_count()).sum::<usize>()
    }
}

/// Recompute every node in preorder; returns the root conclusion iff all
/// nodes validate and every cached conclusion matches the recomputed one.
pub fn check_derivation(d: &Derivation) -> Result<Judgment, KernelError> {
    let mut path = Vec::new();
    check_at(d, &mut path)
}

fn check_at(d: &Derivation, path: &mut Vec<usize>) -> Result<Judgment, KernelError> {
    let mut premise_judgments = Vec::with_capacity(d.premises.len());
    for (i, premise) in d.premises.iter().enumerate() {
        path.push(i);
        premise_judgments.push(check_at(premise, path)?);
        path.pop();
    }
    let actual = apply_rule(d.rule, &premise_judgments, &d.side).map_err(|cause| {
        KernelError::InvalidNode {
            path: path.clone(),
            cause: Box::new(cause),
        }
    })?;
    if let Some(cached) = &d.conclusion {
        if cached != &actual {
            return Err(KernelError::ConclusionMismatch {
                path: path.clone(),
                cached: Box::new(cached.clone()),
                actual: Box::new(actual),
            });
        }
    }
    Ok(actual)
}

/// Serialize in the `(derivation <rule> (side …) (premises …))` format.
pub fn print_derivation(d: &Derivation) -> String {
    let mut out = String::new();
    write_derivation(d, &mut out);
    out
}

fn write_derivation(d: &Derivation, out: &mut String) {
    write!(out, "(derivation {} (side", d.rule.keyword()).unwrap();
    for node in &d.side {
        write!(out, " {node}").unwrap();
    }
    out.push_str(") (premises");
    for premise in &d.premises {
        out.push(' ');
        write_derivation(premise, out);
    }
    out.push_str("))");
}

/// Parse the `(derivation …)` format. Conclusions are left uncached;
/// run [`check_derivation`] to validate and obtain the root judgment.
pub fn parse_derivation(text: &str) -> Result<Derivation, SyntaxError> {
    let spanned = sexpr::read_spanned(text)?;
    derivation_from_spanned(&spanned)
}

fn derivation_from_spanned(e: &Spanned) -> Result<Derivation, SyntaxError> {
    let SpannedKind::List(items) = &e.kind else {
        return Err(ParseError::new(e.start, "(derivation …)").into());
    };
    match items.as_slice() {
        [head, rule, side, premises] => {
            if head.head().is_some() || !matches!(&head.kind, SpannedKind::Atom(s) if s == "derivation")
            {
                return Err(ParseError::new(e.start, "(derivation …)").into());
            }
            let SpannedKind::Atom(rule_kw) = &rule.kind else {
                return Err(ParseError::new(rule.start, "a rule keyword").into());
            };
            let rule = RuleId::from_keyword(rule_kw)
                .map_err(|_| ParseError::new(rule.start, "a known rule keyword"))?;
            let side_items = expect_section(side, "side")?;
            let side = side_items
                .iter()
                .map(syntax::parse_spanned)
                .collect::<Result<Vec<_>, _>>()?;
            let premise_items = expect_section(premises, "premises")?;
            let premises = premise_items
                .iter()
                .map(|p| derivation_from_spanned(p).map(Rc::new))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Derivation {
                rule,
                side,
                premises,
                conclusion: None,
            })
        }
        _ => Err(ParseError::new(e.start, "(derivation <rule> (side …) (premises …))").into()),
    }
}

fn expect_section<'a>(e: &'a Spanned, name: &str) -> Result<&'a [Spanned], SyntaxError> {
    match &e.kind {
        SpannedKind::List(items)
            if items
                .first()
                .and_then(|h| match &h.kind {
                    SpannedKind::Atom(s) => Some(s.as_str()),
                    _ => None,
                })
                == Some(name) =>
        {
            Ok(&items[1..])
        }
        _ => Err(ParseError::new(e.start, format!("({name} …)")).into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{RawCtx, RawTm, RawTy};

    /// 1·o ⊢ q_o = q_o : o[p_o], chained through four congruence rules.
    fn q_over_base() -> Derivation {
        let empty = Derivation::leaf(RuleId::CongCtxEmpty).unwrap();
        let base = Derivation::leaf(RuleId::CongTyBase).unwrap();
        let _ext = Derivation::by_rule(
            RuleId::CongCtxExt,
            vec![Rc::new(empty), Rc::new(base.clone())],
        )
        .unwrap();
        Derivation::by_rule(RuleId::CongTmQ, vec![Rc::new(base)]).unwrap()
    }

    #[test]
    fn leaf_derivation_checks() {
        let d = Derivation::leaf(RuleId::CongCtxEmpty).unwrap();
        let j = check_derivation(&d).unwrap();
        assert_eq!(j, Judgment::ctx_wf(RawCtx::Empty));
    }

    #[test]
    fn congruence_chain_derives_q() {
        let d = q_over_base();
        let j = check_derivation(&d).unwrap();
        assert_eq!(
            j,
            Judgment::tm_wf(
                RawCtx::Empty.ext(RawTy::Base),
                RawTm::q(RawTy::Base),
                RawTy::subst(RawTy::Base, crate::syntax::RawSub::p(RawTy::Base)),
            )
        );
    }

    #[test]
    fn tampered_cache_is_rejected() {
        let mut d = q_over_base();
        d.conclusion = Some(Judgment::tm_wf(
            RawCtx::Empty.ext(RawTy::Base),
            RawTm::q(RawTy::Base),
            RawTy::Base,
        ));
        let err = check_derivation(&d).unwrap_err();
        assert!(matches!(err, KernelError::ConclusionMismatch { .. }));
    }

    #[test]
    fn invalid_inner_node_is_located() {
        // PerSymSub applied to a context equality premise: invalid at path [0].
        let empty = Rc::new(Derivation::leaf(RuleId::CongCtxEmpty).unwrap());
        let bad = Derivation {
            rule: RuleId::PerSymSub,
            side: Vec::new(),
            premises: vec![empty],
            conclusion: None,
        };
        let outer = Derivation {
            rule: RuleId::PerSymCtx,
            side: Vec::new(),
            premises: vec![Rc::new(bad)],
            conclusion: None,
        };
        let err = check_derivation(&outer).unwrap_err();
        match err {
            KernelError::InvalidNode { path, .. } => assert_eq!(path, vec![0]),
            other => panic!("expected InvalidNode, got {other}"),
        }
    }

    #[test]
    fn derivation_text_round_trips() {
        let d = q_over_base();
        let text = print_derivation(&d);
        let parsed = parse_derivation(&text).unwrap();
        assert_eq!(check_derivation(&parsed).unwrap(), check_derivation(&d).unwrap());
        assert_eq!(print_derivation(&parsed), text);
    }
}
