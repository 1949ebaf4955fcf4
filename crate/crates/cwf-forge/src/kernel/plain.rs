//! Decision procedure for the plain fragment (and its extension with the
//! unit type), by evaluation into the variable model.
//!
//! Over one base type, every plain type over `Γ` is equal to `o[γ]` for
//! the unique `γ : Γ → 1`, every term rewrites to a projection, and
//! every substitution to a tuple of projections. Evaluation computes
//! those canonical values directly; two trees are judgmentally equal iff
//! their values coincide. [`plain_canonical_node`] reads the value back
//! as the canonical raw tree: substitutions as `⟨…⟨⟨⟩, a₁⟩…, aₙ⟩` over
//! the target, terms in π-form (`q` under iterated `p`-weakenings),
//! types as `o[⟨⟩]`, with unit-typed positions collapsed to `0₁`.

use std::rc::Rc;

use crate::syntax::{Node, RawCtx, RawSub, RawTm, RawTy, Sort};

use super::{Fragment, KernelError};

/// Semantic type: everything in the fragment is the base type or unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    O,
    Unit,
}

/// Semantic term: a context projection or the unit element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Val {
    /// 1-based position in the ambient context.
    Var(usize),
    Star,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SubVal {
    pub target: Vec<Kind>,
    pub tuple: Vec<Val>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum NodeVal {
    Ctx(Vec<Kind>),
    Sub(SubVal),
    Ty(Kind),
    Tm(Val, Kind),
}

fn not_in_fragment(side: Sort) -> KernelError {
    KernelError::NotInFragment {
        side,
        fragment: Fragment::PlainWithUnit,
    }
}

pub(crate) struct PlainEval {
    pub allow_unit: bool,
}

impl PlainEval {
    fn unit_ok(&self, side: Sort) -> Result<(), KernelError> {
        if self.allow_unit {
            Ok(())
        } else {
            Err(KernelError::NotInFragment {
                side,
                fragment: Fragment::Plain,
            })
        }
    }

    pub fn ctx(&self, c: &RawCtx) -> Result<Vec<Kind>, KernelError> {
        match c {
            RawCtx::Empty => Ok(Vec::new()),
            RawCtx::Ext(g, a) => {
                let mut env = self.ctx(g)?;
                let k = self.ty(&env, a)?;
                env.push(k);
                Ok(env)
            }
        }
    }

    pub fn ty(&self, env: &[Kind], a: &RawTy) -> Result<Kind, KernelError> {
        match a {
            RawTy::Base => {
                if env.is_empty() {
                    Ok(Kind::O)
                } else {
                    Err(KernelError::ill_formed(
                        Sort::Ty,
                        "the base type lives over the empty context",
                    ))
                }
            }
            RawTy::Unit => {
                self.unit_ok(Sort::Ty)?;
                Ok(Kind::Unit)
            }
            RawTy::Subst(b, s) => {
                let sv = self.sub(env, s)?;
                self.ty(&sv.target, b)
            }
            RawTy::IExt(..) | RawTy::Sigma(..) | RawTy::Pi(..) => Err(not_in_fragment(Sort::Ty)),
        }
    }

    pub fn sub(&self, env: &[Kind], s: &RawSub) -> Result<SubVal, KernelError> {
        match s {
            RawSub::Id(g) => {
                let kinds = self.ctx(g)?;
                if kinds != env {
                    return Err(KernelError::ill_formed(
                        Sort::Sub,
                        "identity annotation does not match the ambient context",
                    ));
                }
                Ok(SubVal {
                    target: env.to_vec(),
                    tuple: identity_tuple(env),
                })
            }
            RawSub::Terminal(g) => {
                let kinds = self.ctx(g)?;
                if kinds != env {
                    return Err(KernelError::ill_formed(
                        Sort::Sub,
                        "terminal annotation does not match the ambient context",
                    ));
                }
                Ok(SubVal {
                    target: Vec::new(),
                    tuple: Vec::new(),
                })
            }
            RawSub::P(a) => {
                let Some((last, init)) = env.split_last() else {
                    return Err(KernelError::ill_formed(
                        Sort::Sub,
                        "p needs a non-empty ambient context",
                    ));
                };
                let k = self.ty(init, a)?;
                if k != *last {
                    return Err(KernelError::ill_formed(
                        Sort::Sub,
                        "p annotation does not match the last context entry",
                    ));
                }
                Ok(SubVal {
                    target: init.to_vec(),
                    tuple: identity_tuple(init),
                })
            }
            RawSub::Comp(f, g) => {
                let gv = self.sub(env, g)?;
                let fv = self.sub(&gv.target, f)?;
                let tuple = fv
                    .tuple
                    .iter()
                    .map(|v| substitute(*v, &gv.tuple))
                    .collect();
                Ok(SubVal {
                    target: fv.target,
                    tuple,
                })
            }
            RawSub::Pair(g, t, a) => {
                let gv = self.sub(env, g)?;
                let k = self.ty(&gv.target, a)?;
                let (tv, tk) = self.tm(env, t)?;
                if tk != k {
                    return Err(KernelError::ill_formed(
                        Sort::Sub,
                        "pair component type does not match the annotation",
                    ));
                }
                let mut target = gv.target;
                target.push(k);
                let mut tuple = gv.tuple;
                tuple.push(canonical_val(tv, k));
                Ok(SubVal { target, tuple })
            }
        }
    }

    pub fn tm(&self, env: &[Kind], t: &RawTm) -> Result<(Val, Kind), KernelError> {
        match t {
            RawTm::Q(a) => {
                let Some((last, init)) = env.split_last() else {
                    return Err(KernelError::ill_formed(
                        Sort::Tm,
                        "q needs a non-empty ambient context",
                    ));
                };
                let k = self.ty(init, a)?;
                if k != *last {
                    return Err(KernelError::ill_formed(
                        Sort::Tm,
                        "q annotation does not match the last context entry",
                    ));
                }
                Ok((canonical_val(Val::Var(env.len()), k), k))
            }
            RawTm::Subst(t0, s) => {
                let sv = self.sub(env, s)?;
                let (v, k) = self.tm(&sv.target, t0)?;
                Ok((substitute(v, &sv.tuple), k))
            }
            RawTm::Star => {
                self.unit_ok(Sort::Tm)?;
                Ok((Val::Star, Kind::Unit))
            }
            _ => Err(not_in_fragment(Sort::Tm)),
        }
    }

    pub fn node(&self, env: &[Kind], node: &Node) -> Result<NodeVal, KernelError> {
        match node {
            Node::Ctx(c) => Ok(NodeVal::Ctx(self.ctx(c)?)),
            Node::Sub(s) => Ok(NodeVal::Sub(self.sub(env, s)?)),
            Node::Ty(a) => Ok(NodeVal::Ty(self.ty(env, a)?)),
            Node::Tm(t) => {
                let (v, k) = self.tm(env, t)?;
                Ok(NodeVal::Tm(v, k))
            }
        }
    }
}

fn identity_tuple(env: &[Kind]) -> Vec<Val> {
    env.iter()
        .enumerate()
        .map(|(i, k)| canonical_val(Val::Var(i + 1), *k))
        .collect()
}

/// Unit-typed values collapse to `0₁`.
fn canonical_val(v: Val, k: Kind) -> Val {
    match k {
        Kind::Unit => Val::Star,
        Kind::O => v,
    }
}

fn substitute(v: Val, tuple: &[Val]) -> Val {
    match v {
        Val::Star => Val::Star,
        Val::Var(i) => tuple[i - 1],
    }
}

/// Decide judgmental equality of two same-sort trees in the plain
/// fragment, well-formed over `Γ`; sound and complete there.
pub fn decide_equal_plain(ctx: &RawCtx, x: &Node, y: &Node) -> Result<bool, KernelError> {
    decide_equal_in(ctx, x, y, false)
}

/// Shared implementation, optionally admitting the unit type.
pub(crate) fn decide_equal_in(
    ctx: &RawCtx,
    x: &Node,
    y: &Node,
    allow_unit: bool,
) -> Result<bool, KernelError> {
    if x.sort() != y.sort() {
        return Err(KernelError::ill_formed(
            x.sort(),
            "the two sides have different sorts",
        ));
    }
    let eval = PlainEval { allow_unit };
    let env = eval.ctx(ctx)?;
    let xv = eval.node(&env, x)?;
    let yv = eval.node(&env, y)?;
    Ok(xv == yv)
}

// ---- read-back of canonical raw trees ----

fn reify_ty(prefix: &[Kind], k: Kind) -> RawTy {
    match k {
        Kind::Unit => RawTy::Unit,
        Kind::O => {
            if prefix.is_empty() {
                RawTy::Base
            } else {
                RawTy::Subst(
                    Rc::new(RawTy::Base),
                    Rc::new(RawSub::Terminal(Rc::new(reify_ctx(prefix)))),
                )
            }
        }
    }
}

fn reify_ctx(env: &[Kind]) -> RawCtx {
    let mut c = RawCtx::Empty;
    for (i, k) in env.iter().enumerate() {
        let ty = reify_ty(&env[..i], *k);
        c = c.ext(ty);
    }
    c
}

/// π-form of variable `i` over `env`: `q` weakened by one `p` per later entry.
fn reify_var(env: &[Kind], i: usize) -> RawTm {
    let n = env.len();
    assert!(i >= 1 && i <= n);
    let last_ty = Rc::new(reify_ty(&env[..n - 1], env[n - 1]));
    if i == n {
        RawTm::Q(last_ty)
    } else {
        RawTm::Subst(
            Rc::new(reify_var(&env[..n - 1], i)),
            Rc::new(RawSub::P(last_ty)),
        )
    }
}

fn reify_val(env: &[Kind], v: Val) -> RawTm {
    match v {
        Val::Star => RawTm::Star,
        Val::Var(i) => reify_var(env, i),
    }
}

fn reify_sub(env: &[Kind], sv: &SubVal) -> RawSub {
    let mut s = RawSub::Terminal(Rc::new(reify_ctx(env)));
    for (i, v) in sv.tuple.iter().enumerate() {
        let entry_ty = reify_ty(&sv.target[..i], sv.target[i]);
        s = RawSub::Pair(Rc::new(s), Rc::new(reify_val(env, *v)), Rc::new(entry_ty));
    }
    s
}

/// Canonical raw tree of a plain (or plain-with-unit) node over `Γ`.
pub fn plain_canonical_node(ctx: &RawCtx, node: &Node) -> Result<Node, KernelError> {
    let eval = PlainEval { allow_unit: true };
    let env = eval.ctx(ctx)?;
    Ok(match eval.node(&env, node)? {
        NodeVal::Ctx(kinds) => Node::Ctx(reify_ctx(&kinds)),
        NodeVal::Ty(k) => Node::Ty(reify_ty(&env, k)),
        NodeVal::Tm(v, _) => Node::Tm(reify_val(&env, v)),
        NodeVal::Sub(sv) => Node::Sub(reify_sub(&env, &sv)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_ctx, parse_sub, parse_tm};

    fn base_over(prefix: &RawCtx) -> RawTy {
        if prefix.is_empty() {
            RawTy::Base
        } else {
            RawTy::subst(RawTy::Base, RawSub::terminal(prefix.clone()))
        }
    }

    /// 1·o·o[p_o], the context with two base-type entries.
    fn two_vars() -> RawCtx {
        let one_o = RawCtx::Empty.ext(RawTy::Base);
        let second = RawTy::subst(RawTy::Base, RawSub::p(RawTy::Base));
        one_o.ext(second)
    }

    #[test]
    fn a_subst_id_equals_a() {
        let g = RawCtx::Empty.ext(RawTy::Base);
        let a = RawTm::q(RawTy::Base);
        let a_id = RawTm::subst(a.clone(), RawSub::id(g.clone()));
        assert!(decide_equal_plain(&g, &Node::Tm(a_id), &Node::Tm(a)).unwrap());
    }

    #[test]
    fn q_beta_collapses() {
        // q_A[⟨γ,a⟩_A] = a over 1·o with γ = ⟨⟩, A = o, a = q_o
        let g = RawCtx::Empty.ext(RawTy::Base);
        let a = RawTm::q(RawTy::Base);
        let pair = RawSub::pair(RawSub::terminal(g.clone()), a.clone(), RawTy::Base);
        let lhs = RawTm::subst(RawTm::q(RawTy::Base), pair);
        assert!(decide_equal_plain(&g, &Node::Tm(lhs), &Node::Tm(a)).unwrap());
    }

    #[test]
    fn distinct_projections_differ() {
        let g = two_vars();
        let v2 = RawTm::q(RawTy::subst(RawTy::Base, RawSub::p(RawTy::Base)));
        let v1 = RawTm::subst(
            RawTm::q(RawTy::Base),
            RawSub::p(RawTy::subst(RawTy::Base, RawSub::p(RawTy::Base))),
        );
        assert!(!decide_equal_plain(&g, &Node::Tm(v1), &Node::Tm(v2)).unwrap());
    }

    #[test]
    fn surjective_pairing_holds() {
        // γ = ⟨p∘γ, q[γ]⟩ for γ = id over 1·o
        let g = RawCtx::Empty.ext(RawTy::Base);
        let gamma = RawSub::id(g.clone());
        let expanded = RawSub::pair(
            RawSub::comp(RawSub::p(RawTy::Base), gamma.clone()),
            RawTm::subst(RawTm::q(RawTy::Base), gamma.clone()),
            RawTy::Base,
        );
        assert!(decide_equal_plain(&g, &Node::Sub(gamma), &Node::Sub(expanded)).unwrap());
    }

    #[test]
    fn ill_formed_base_over_nonempty_context() {
        let g = RawCtx::Empty.ext(RawTy::Base);
        let err =
            decide_equal_plain(&g, &Node::Ty(RawTy::Base), &Node::Ty(RawTy::Base)).unwrap_err();
        assert!(matches!(err, KernelError::IllFormed { .. }));
    }

    #[test]
    fn sigma_is_not_in_the_plain_fragment() {
        let g = RawCtx::Empty;
        let sigma = RawTy::sigma(RawTy::Unit, RawTy::Unit);
        let err = decide_equal_plain(&g, &Node::Ty(sigma.clone()), &Node::Ty(sigma)).unwrap_err();
        assert!(matches!(err, KernelError::NotInFragment { .. }));
    }

    #[test]
    fn canonical_forms_are_fixed_points() {
        let g = two_vars();
        let messy = parse_tm(
            "(tm-subst (tm-q (ty-base)) (sub-comp (sub-p (ty-subst (ty-base) (sub-p (ty-base)))) \
             (sub-id (ctx-ext (ctx-ext (ctx-empty) (ty-base)) (ty-subst (ty-base) (sub-p (ty-base)))))))",
        )
        .unwrap();
        let canon = plain_canonical_node(&g, &Node::Tm(messy)).unwrap();
        let again = plain_canonical_node(&g, &canon).unwrap();
        assert_eq!(canon, again);
        // canonical form of variable 1 over a 2-entry context is q[p]
        let Node::Tm(t) = &canon else { panic!() };
        assert!(matches!(t, RawTm::Subst(q, p)
            if matches!(q.as_ref(), RawTm::Q(_)) && matches!(p.as_ref(), RawSub::P(_))));
    }

    #[test]
    fn unit_entries_collapse_to_star() {
        let g = RawCtx::Empty.ext(RawTy::Unit);
        let q_unit = RawTm::q(RawTy::Unit);
        let canon =
            plain_canonical_node(&g, &Node::Tm(q_unit)).unwrap();
        assert_eq!(canon, Node::Tm(RawTm::Star));
        let _ = base_over(&g);
    }
}
