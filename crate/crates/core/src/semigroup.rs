//! The inverse semigroup `S_{G,E}` of triples `(α, g, β)` with `d(α) = g·d(β)`.

use std::fmt;

use thiserror::Error;

use crate::graph::Path;
use crate::group::Elem;
use crate::system::System;
use crate::verdict::{SearchBudget, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SgeError {
    #[error("d(α) ≠ g·d(β) in ({0})")]
    NotMember(String),
    #[error("not an idempotent of the form (γ, 1, γ): {0}")]
    NotIdempotent(String),
    #[error("malformed expression: {0}")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub alpha: Path,
    pub g: Elem,
    pub beta: Path,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sge {
    Zero,
    T(Triple),
}

impl Triple {
    pub fn new(sys: &System, alpha: Path, g: Elem, beta: Path) -> Result<Self, SgeError> {
        let t = Triple { alpha, g, beta };
        if sys.check_elem(&t.g).is_err() || t.alpha.source(sys.graph()) != sys.act_vertex(&t.g, t.beta.source(sys.graph())) {
            return Err(SgeError::NotMember(t.display(sys)));
        }
        Ok(t)
    }

    pub fn display(&self, sys: &System) -> String {
        format!("{}, {}, {}", sys.show_path(&self.alpha), sys.show(&self.g), sys.show_path(&self.beta))
    }
}

impl Sge {
    pub fn triple(sys: &System, alpha: Path, g: Elem, beta: Path) -> Result<Self, SgeError> {
        Ok(Sge::T(Triple::new(sys, alpha, g, beta)?))
    }

    /// The idempotent `f_α = (α, 1, α)`.
    pub fn idempotent(sys: &System, alpha: Path) -> Self {
        Sge::T(Triple { alpha: alpha.clone(), g: sys.identity(), beta: alpha })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Sge::Zero)
    }

    pub fn as_triple(&self) -> Option<&Triple> {
        match self {
            Sge::Zero => None,
            Sge::T(t) => Some(t),
        }
    }

    pub fn display(&self, sys: &System) -> String {
        match self {
            Sge::Zero => "0".into(),
            Sge::T(t) => format!("({})", t.display(sys)),
        }
    }
}

pub struct SgeDisplay<'a>(pub &'a System, pub &'a Sge);

impl fmt::Display for SgeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.1.display(self.0))
    }
}

/// The product in `S_{G,E}`:
/// `(α,g,β)(γ,h,δ)` is `(α·gε, φ(g,ε)h, δ)` when `γ = βε`,
/// `(α, g·φ(h⁻¹,ε)⁻¹, δ·h⁻¹ε)` when `β = γε`, and `0` otherwise.
pub fn sge_mul(sys: &System, s: &Sge, t: &Sge) -> Sge {
    let (Sge::T(x), Sge::T(y)) = (s, t) else { return Sge::Zero };
    let graph = sys.graph();
    if let Some(eps) = y.alpha.strip_prefix(graph, &x.beta) {
        let (geps, r) = sys.act(&x.g, &eps);
        let alpha = graph.compose(&x.alpha, &geps).expect("membership makes this composable");
        return Sge::T(Triple { alpha, g: sys.mul(&r, &y.g), beta: y.beta.clone() });
    }
    if let Some(eps) = x.beta.strip_prefix(graph, &y.alpha) {
        let hinv = sys.inv(&y.g);
        let (heps, r) = sys.act(&hinv, &eps);
        let beta = graph.compose(&y.beta, &heps).expect("membership makes this composable");
        return Sge::T(Triple { alpha: x.alpha.clone(), g: sys.mul(&x.g, &sys.inv(&r)), beta });
    }
    Sge::Zero
}

/// `(α, g, β)* = (β, g⁻¹, α)`.
pub fn sge_adjoint(sys: &System, s: &Sge) -> Sge {
    match s {
        Sge::Zero => Sge::Zero,
        Sge::T(t) => Sge::T(Triple { alpha: t.beta.clone(), g: sys.inv(&t.g), beta: t.alpha.clone() }),
    }
}

/// Componentwise equality, comparing group parts with the backend's verdict.
pub fn sge_equal(sys: &System, s: &Sge, t: &Sge, budget: SearchBudget) -> Verdict {
    match (s, t) {
        (Sge::Zero, Sge::Zero) => Verdict::Yes("both zero".into()),
        (Sge::T(x), Sge::T(y)) => {
            if x.alpha != y.alpha || x.beta != y.beta {
                return Verdict::No("paths differ".into());
            }
            sys.equal(&x.g, &y.g, budget)
        }
        _ => Verdict::No("exactly one is zero".into()),
    }
}

/// For `e = (γ, 1, γ)` and `s = (α, g, β)`: `e ≤ s` iff `α = β`, `γ = ατ`, and
/// `τ` is strongly fixed by `g`.
pub fn leq_idempotent_under(sys: &System, e: &Sge, s: &Sge, budget: SearchBudget) -> Result<Verdict, SgeError> {
    let Sge::T(et) = e else { return Ok(Verdict::Yes("0 is below everything".into())) };
    if et.alpha != et.beta || !sys.group().is_syntactic_identity(&et.g) {
        return Err(SgeError::NotIdempotent(e.display(sys)));
    }
    let Sge::T(st) = s else { return Ok(Verdict::No("s is zero".into())) };
    if st.alpha != st.beta {
        return Ok(Verdict::No("α ≠ β".into()));
    }
    let Some(tau) = et.alpha.strip_prefix(sys.graph(), &st.alpha) else {
        return Ok(Verdict::No(format!("{} does not extend {}", sys.show_path(&et.alpha), sys.show_path(&st.alpha))));
    };
    let (img, r) = sys.act(&st.g, &tau);
    if img != tau {
        return Ok(Verdict::No(format!("{} moves {}", sys.show(&st.g), sys.show_path(&tau))));
    }
    Ok(match sys.is_identity(&r, budget) {
        Verdict::Yes(_) => Verdict::Yes(format!("τ = {} is strongly fixed", sys.show_path(&tau))),
        Verdict::No(_) => Verdict::No(format!("φ({}, {}) = {} ≠ 1", sys.show(&st.g), sys.show_path(&tau), sys.show(&r))),
        Verdict::Unknown(why) => Verdict::Unknown(why),
    })
}

/// Parses `(alpha, g, beta)`, or `0`.
pub fn parse_sge(sys: &System, text: &str) -> Result<Sge, SgeError> {
    let text = text.trim();
    if text == "0" {
        return Ok(Sge::Zero);
    }
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .or_else(|| text.strip_prefix('[').and_then(|t| t.strip_suffix(']')))
        .ok_or_else(|| SgeError::Syntax(format!("expected (alpha, g, beta), got `{text}`")))?;
    let parts: Vec<&str> = inner.split([',', ';']).map(str::trim).collect();
    let [a, g, b] = parts.as_slice() else {
        return Err(SgeError::Syntax(format!("expected three components in `{text}`")));
    };
    let alpha = sys.parse_path(a).map_err(|e| SgeError::Syntax(e.to_string()))?;
    let beta = sys.parse_path(b).map_err(|e| SgeError::Syntax(e.to_string()))?;
    let g = sys.parse_elem(g).map_err(|e| SgeError::Syntax(e.to_string()))?;
    Sge::triple(sys, alpha, g, beta)
}

/// Evaluates a product of semigroup terms: `term { "*" term }` where a term is
/// a triple, `0`, or a term followed by `^*` for the adjoint.
pub fn eval_expression(sys: &System, text: &str) -> Result<Sge, SgeError> {
    let mut acc: Option<Sge> = None;
    for raw in split_product(text) {
        let raw = raw.trim();
        let (body, adj) = match raw.strip_suffix("^*") {
            Some(b) => (b.trim(), true),
            None => (raw, false),
        };
        let mut term = parse_sge(sys, body)?;
        if adj {
            term = sge_adjoint(sys, &term);
        }
        acc = Some(match acc {
            None => term,
            Some(a) => sge_mul(sys, &a, &term),
        });
    }
    acc.ok_or_else(|| SgeError::Syntax("empty expression".into()))
}

fn split_product(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = text.as_bytes();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b'*' if depth == 0 && !(i > 0 && bytes[i - 1] == b'^') => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}
