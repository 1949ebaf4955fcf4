//! cwf-forge: categories with families as executable combinator calculi.
//!
//! The crate implements cwf-based equational reasoning at three levels:
//!
//! * [`ucwf`] — unityped cwfs: the renaming model, well-scoped nameless
//!   lambda terms, explicit (λσ-style) terms, and the translations
//!   between them.
//! * [`scwf`] — simply typed cwfs: the free scwf over a basis, unit,
//!   product, and function type structures with a typed normalizer, and
//!   democracy.
//! * [`kernel`] — the dependently typed kernel: the four equality
//!   judgment families over the raw combinator language of [`syntax`],
//!   rule-by-rule derivation checking, decision of the plain fragment,
//!   and fuel-bounded semi-decision for the fragments with type formers.
//!
//! Around the kernels sit [`cat`] (finite categories as composition
//! tables with exhaustive universal-property checkers), [`bridges`]
//! (translations between cwf notions and cartesian operads, Lawvere
//! theories, and cartesian (closed) categories), and [`cl`] (an
//! SK-combinator engine compiling reductions into checkable kernel
//! derivations).
//!
//! Each major capability has a runnable example under `examples/`; see
//! the README for the tour. The `cwf-forge` binary exposes the batch
//! commands of [`cli`].

pub mod bridges;
pub mod cat;
pub mod cl;
pub mod cli;
pub mod kernel;
pub mod scwf;
pub mod sexpr;
pub mod syntax;
pub mod ucwf;
