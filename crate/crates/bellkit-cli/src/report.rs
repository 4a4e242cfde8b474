//! Report rendering. JSON is the structured format; every real number is
//! rounded to 12 significant digits before serialization so reports are
//! identical across platforms. Text is a compact human-readable summary of
//! the same fields at the same precision.

use bellkit::chsh::ChshReport;
use bellkit::jointness::{assignment_outcomes, FeasibilityResult};
use bellkit::qlogic::{DistributivityWitness, Subspace};
use bellkit::sim::EstimateReport;
use serde_json::{json, Value};

/// Rounds to 12 significant digits through a decimal round trip.
pub fn sig12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("rendered float reparses")
}

pub fn fmt12(x: f64) -> String {
    let rounded = sig12(x);
    if rounded == 0.0 || (rounded.abs() >= 1e-4 && rounded.abs() < 1e15) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn real(x: f64) -> Value {
    serde_json::Number::from_f64(sig12(x)).map_or(Value::Null, Value::Number)
}

fn opt_real(x: Option<f64>) -> Value {
    x.map_or(Value::Null, real)
}

fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

fn pass_fail(ok: bool) -> Value {
    Value::String(if ok { "PASS" } else { "FAIL" }.into())
}

fn opt_text(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".into(), fmt12)
}

const CELL_ORDER: [&str; 4] = ["(1,1)", "(1,2)", "(2,1)", "(2,2)"];

fn cell_order() -> Value {
    json!(CELL_ORDER)
}

pub fn chsh_report_json(r: &ChshReport) -> Value {
    json!({
        "cell_order": cell_order(),
        "setting_probs": reals(&r.setting_probs),
        "unconditional_correlations": reals(&r.unconditional),
        "conditional_correlations":
            Value::Array(r.conditional.iter().map(|&c| opt_real(c)).collect()),
        "s_classical": real(r.s_classical),
        "s_conditional": opt_real(r.s_conditional),
        "identity_residual": real(r.identity_residual),
        "s_classical_bound": pass_fail(r.s_classical_within_bound),
        "s_conditional_bound": r.s_conditional_within_bound.map_or(Value::Null, pass_fail),
    })
}

pub fn chsh_report_text(r: &ChshReport) -> String {
    let mut out = String::new();
    for (label, values) in [
        ("setting probabilities", &r.setting_probs),
        ("unconditional <A,B> ", &r.unconditional),
    ] {
        out.push_str(label);
        for (cell, value) in CELL_ORDER.iter().zip(values) {
            out.push_str(&format!("  {cell}={}", fmt12(*value)));
        }
        out.push('\n');
    }
    out.push_str("conditional C       ");
    for (cell, value) in CELL_ORDER.iter().zip(&r.conditional) {
        out.push_str(&format!("  {cell}={}", opt_text(*value)));
    }
    out.push('\n');
    out.push_str(&format!(
        "S   (stationary)      {}   bound |S| <= 1: {}\n",
        fmt12(r.s_classical),
        if r.s_classical_within_bound { "PASS" } else { "FAIL" },
    ));
    let conditional_bound = match r.s_conditional_within_bound {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "undefined",
    };
    out.push_str(&format!(
        "S_C (conditional)     {}   bound |S_C| <= 4: {}\n",
        opt_text(r.s_conditional),
        conditional_bound,
    ));
    out.push_str(&format!("identity residual     {}\n", fmt12(r.identity_residual)));
    out
}

pub fn estimate_report_json(r: &EstimateReport) -> Value {
    json!({
        "cell_order": cell_order(),
        "trials": r.trials,
        "counts": r.counts,
        "chat": Value::Array(r.chat.iter().map(|&c| opt_real(c)).collect()),
        "stderr": Value::Array(r.stderr.iter().map(|&c| opt_real(c)).collect()),
        "shat": opt_real(r.shat),
        "schat": opt_real(r.schat),
        "exact": r.exact.as_ref().map_or(Value::Null, chsh_report_json),
    })
}

pub fn estimate_report_text(r: &EstimateReport) -> String {
    let mut out = format!("trials  {}\n", r.trials);
    out.push_str("cell    count      Chat            stderr\n");
    for (cell, label) in CELL_ORDER.iter().enumerate() {
        out.push_str(&format!(
            "{label}   {:<10} {:<15} {}\n",
            r.counts[cell],
            opt_text(r.chat[cell]),
            opt_text(r.stderr[cell]),
        ));
    }
    out.push_str(&format!("Shat    {}\n", opt_text(r.shat)));
    out.push_str(&format!("SChat   {}\n", opt_text(r.schat)));
    if let Some(exact) = &r.exact {
        out.push_str("exact:\n");
        out.push_str(&chsh_report_text(exact));
    }
    out
}

fn witness_json(weights: &[f64; 16]) -> Value {
    Value::Array(
        weights
            .iter()
            .enumerate()
            .map(|(index, &weight)| {
                let [a1, a2, b1, b2] = assignment_outcomes(index);
                json!({
                    "a1": a1.value(),
                    "a2": a2.value(),
                    "b1": b1.value(),
                    "b2": b2.value(),
                    "weight": real(weight),
                })
            })
            .collect(),
    )
}

pub fn feasibility_json(r: &FeasibilityResult) -> Value {
    json!({
        "feasible": r.feasible,
        "max_chsh_variant": real(r.max_chsh_variant),
        "violating_variant": r.violating_variant.as_ref().map_or(Value::Null, |v| {
            json!({
                "label": v.label(),
                "signs": v.signs,
                "value": real(v.value),
            })
        }),
        "witness": r.witness.as_ref().map_or(Value::Null, |w| witness_json(w.weights())),
        "farkas": r.farkas.as_ref().map_or(Value::Null, |y| reals(y)),
    })
}

pub fn feasibility_text(r: &FeasibilityResult) -> String {
    let mut out = format!(
        "feasible            {}\nmax CHSH variant    {}\n",
        if r.feasible { "yes" } else { "no" },
        fmt12(r.max_chsh_variant),
    );
    if let Some(variant) = &r.violating_variant {
        out.push_str(&format!(
            "violating variant   {} = {}\n",
            variant.label(),
            fmt12(variant.value),
        ));
    }
    if let Some(witness) = &r.witness {
        out.push_str("witness (zero-weight assignments omitted):\n");
        for (index, &weight) in witness.weights().iter().enumerate() {
            if weight > 0.0 {
                let [a1, a2, b1, b2] = assignment_outcomes(index);
                out.push_str(&format!(
                    "  a1={:+} a2={:+} b1={:+} b2={:+}  weight={}\n",
                    a1.value(),
                    a2.value(),
                    b1.value(),
                    b2.value(),
                    fmt12(weight),
                ));
            }
        }
    }
    if let Some(farkas) = &r.farkas {
        out.push_str("farkas certificate  ");
        out.push_str(&farkas.iter().map(|&y| fmt12(y)).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

pub fn subspace_json(s: &Subspace) -> Value {
    json!({
        "ambient_dim": s.ambient_dim(),
        "dim": s.dim(),
        "basis": Value::Array(
            s.basis()
                .iter()
                .map(|v| {
                    Value::Array(
                        v.iter().map(|c| json!({"re": real(c.re), "im": real(c.im)})).collect(),
                    )
                })
                .collect(),
        ),
    })
}

fn subspace_text(s: &Subspace) -> String {
    if s.dim() == 0 {
        return "{0}".into();
    }
    s.basis()
        .iter()
        .map(|v| {
            let components: Vec<String> = v
                .iter()
                .map(|c| {
                    if c.im == 0.0 {
                        fmt12(c.re)
                    } else {
                        let sign = if c.im < 0.0 { '-' } else { '+' };
                        format!("{}{}{}i", fmt12(c.re), sign, fmt12(c.im.abs()))
                    }
                })
                .collect();
            format!("span({})", components.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub struct DemoReport {
    pub p: Subspace,
    pub p1: Subspace,
    pub p2: Subspace,
    pub meet_p_p1: Subspace,
    pub meet_p_p2: Subspace,
    pub join_p1_p2: Subspace,
    pub witness: DistributivityWitness,
}

pub fn demo_json(demo: &DemoReport) -> Value {
    json!({
        "p": subspace_json(&demo.p),
        "p1": subspace_json(&demo.p1),
        "p2": subspace_json(&demo.p2),
        "meet_p_p1": subspace_json(&demo.meet_p_p1),
        "meet_p_p2": subspace_json(&demo.meet_p_p2),
        "join_p1_p2": subspace_json(&demo.join_p1_p2),
        "lhs": subspace_json(&demo.witness.lhs),
        "rhs": subspace_json(&demo.witness.rhs),
        "distributive": !demo.witness.violated,
    })
}

pub fn demo_text(demo: &DemoReport) -> String {
    format!(
        "distributivity counterexample in the projector lattice of C^2\n\
         P   = {}\n\
         P1  = {}\n\
         P2  = {}\n\
         P meet P1              = {}\n\
         P meet P2              = {}\n\
         P1 join P2             = {}\n\
         P meet (P1 join P2)    = {}\n\
         (P meet P1) join (P meet P2) = {}\n\
         distributive: {}\n",
        subspace_text(&demo.p),
        subspace_text(&demo.p1),
        subspace_text(&demo.p2),
        subspace_text(&demo.meet_p_p1),
        subspace_text(&demo.meet_p_p2),
        subspace_text(&demo.join_p1_p2),
        subspace_text(&demo.witness.lhs),
        subspace_text(&demo.witness.rhs),
        if demo.witness.violated { "no" } else { "yes" },
    )
}
