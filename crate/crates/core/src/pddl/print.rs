use std::fmt::Write;

use super::model::*;

fn typed(params: &[Typed]) -> String {
    params
        .iter()
        .map(|p| format!("{} - {}", p.name, p.type_name))
        .collect::<Vec<_>>()
        .join(" ")
}

fn predicate_decl(p: &PredicateSchema) -> String {
    if p.params.is_empty() {
        format!("({})", p.name)
    } else {
        format!("({} {})", p.name, typed(&p.params))
    }
}

fn conjunction(out: &mut String, indent: &str, lits: &[Literal]) {
    if lits.is_empty() {
        out.push_str("(and)\n");
        return;
    }
    out.push_str("(and\n");
    for l in lits {
        let _ = writeln!(out, "{indent}  {l}");
    }
    let _ = writeln!(out, "{indent})");
}

/// Canonical domain text: declaration order, one clause per line.
pub fn print_domain(d: &Domain) -> String {
    let mut out = String::new();
    let _ = write!(out, "(define (domain {})", d.name);
    if d.types.is_empty() && d.predicates.is_empty() && d.actions.is_empty() {
        out.push_str(")\n");
        return out;
    }
    out.push('\n');
    out.push_str("  (:requirements :strips :typing");
    if d.uses_negative_preconditions() {
        out.push_str(" :negative-preconditions");
    }
    out.push_str(")\n");
    if !d.types.is_empty() {
        out.push_str("  (:types\n");
        for t in &d.types {
            let _ = writeln!(out, "    {} - {}", t.name, t.parent);
        }
        out.push_str("  )\n");
    }
    if !d.predicates.is_empty() {
        out.push_str("  (:predicates\n");
        for p in &d.predicates {
            let _ = writeln!(out, "    {}", predicate_decl(p));
        }
        out.push_str("  )\n");
    }
    for a in &d.actions {
        let _ = writeln!(out, "  (:action {}", a.name);
        let _ = writeln!(out, "    :parameters ({})", typed(&a.params));
        out.push_str("    :precondition ");
        conjunction(&mut out, "    ", &a.precondition);
        out.push_str("    :effect ");
        conjunction(&mut out, "    ", &a.effect);
        out.push_str("  )\n");
    }
    out.push_str(")\n");
    out
}

/// Canonical problem text.
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", p.name);
    let _ = writeln!(out, "  (:domain {})", p.domain_name);
    if !p.objects.is_empty() {
        out.push_str("  (:objects\n");
        for o in &p.objects {
            let _ = writeln!(out, "    {} - {}", o.name, o.type_name);
        }
        out.push_str("  )\n");
    }
    if p.init.is_empty() {
        out.push_str("  (:init)\n");
    } else {
        out.push_str("  (:init\n");
        for a in &p.init {
            let _ = writeln!(out, "    {a}");
        }
        out.push_str("  )\n");
    }
    out.push_str("  (:goal ");
    if p.goal.is_empty() {
        out.push_str("(and))\n");
    } else {
        out.push_str("(and\n");
        for l in &p.goal {
            let _ = writeln!(out, "    {l}");
        }
        out.push_str("  ))\n");
    }
    out.push_str(")\n");
    out
}
