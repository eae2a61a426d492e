use std::collections::{BTreeSet, HashSet};

use super::model::*;
use super::sexpr::{read_all, read_one, SExpr};
use super::PddlError;

const SUPPORTED_REQUIREMENTS: &[&str] = &[":strips", ":typing", ":negative-preconditions"];

/// Heads that belong to richer PDDL fragments.
const UNSUPPORTED_HEADS: &[&str] = &[
    "forall", "exists", "when", "or", "imply", "either", "=", "increase", "decrease", "assign",
    "scale-up", "scale-down", "preference",
];

const UNSUPPORTED_SECTIONS: &[&str] = &[
    ":constants",
    ":functions",
    ":derived",
    ":durative-action",
    ":process",
    ":event",
    ":constraints",
    ":metric",
];

fn syntax(e: &SExpr, expected: &str) -> PddlError {
    let p = e.pos();
    PddlError::Syntax {
        line: p.line,
        col: p.col,
        expected: expected.to_string(),
    }
}

fn list<'a>(e: &'a SExpr, expected: &str) -> Result<&'a [SExpr], PddlError> {
    e.as_list().ok_or_else(|| syntax(e, expected))
}

fn symbol<'a>(e: &'a SExpr, expected: &str) -> Result<&'a str, PddlError> {
    e.as_symbol().ok_or_else(|| syntax(e, expected))
}

fn is_variable(s: &str) -> bool {
    s.len() > 1 && s.starts_with('?')
}

fn check_identifier(e: &SExpr, s: &str) -> Result<(), PddlError> {
    let ok = !s.is_empty()
        && !s.starts_with('?')
        && !s.starts_with(':')
        && s.chars()
            .all(|c| c.is_alphanumeric() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(syntax(e, "identifier"))
    }
}

/// `(define (<kind> name) ...)` header; returns name and remaining sections.
fn header<'a>(top: &'a SExpr, kind: &str) -> Result<(String, &'a [SExpr]), PddlError> {
    let items = list(top, "'(define'")?;
    match items.first() {
        Some(SExpr::Symbol(s, _)) if s == "define" => {}
        Some(e) => return Err(syntax(e, "define")),
        None => return Err(syntax(top, "define")),
    }
    let head = items.get(1).ok_or_else(|| syntax(top, &format!("({kind} <name>)")))?;
    let h = list(head, &format!("({kind} <name>)"))?;
    match h {
        [SExpr::Symbol(k, _), name @ SExpr::Symbol(n, _)] if k == kind => {
            check_identifier(name, n)?;
            Ok((n.clone(), &items[2..]))
        }
        _ => Err(syntax(head, &format!("({kind} <name>)"))),
    }
}

/// Parse `a b - t c - u d` style lists. Untyped trailing names get `object`.
fn typed_list(items: &[SExpr], variables: bool) -> Result<Vec<Typed>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let e = &items[i];
        if let Some(head) = e.head() {
            if head == "either" {
                return Err(PddlError::UnsupportedFeature("either".into()));
            }
        }
        let s = symbol(e, if variables { "variable" } else { "name" })?;
        if s == "-" {
            let t = items
                .get(i + 1)
                .ok_or_else(|| syntax(e, "type name after '-'"))?;
            if t.head() == Some("either") {
                return Err(PddlError::UnsupportedFeature("either".into()));
            }
            let tn = symbol(t, "type name")?;
            check_identifier(t, tn)?;
            if pending.is_empty() {
                return Err(syntax(e, if variables { "variable" } else { "name" }));
            }
            out.extend(pending.drain(..).map(|n| Typed::new(n, tn)));
            i += 2;
            continue;
        }
        if variables {
            if !is_variable(s) {
                return Err(syntax(e, "variable"));
            }
        } else {
            check_identifier(e, s)?;
        }
        pending.push(s.to_string());
        i += 1;
    }
    out.extend(pending.into_iter().map(|n| Typed::new(n, ROOT_TYPE)));
    Ok(out)
}

fn atom(e: &SExpr) -> Result<Atom, PddlError> {
    let items = list(e, "atom")?;
    let head = items.first().ok_or_else(|| syntax(e, "predicate name"))?;
    let name = symbol(head, "predicate name")?;
    if UNSUPPORTED_HEADS.contains(&name) {
        return Err(PddlError::UnsupportedFeature(name.to_string()));
    }
    check_identifier(head, name)?;
    let mut args = Vec::with_capacity(items.len() - 1);
    for a in &items[1..] {
        if a.as_list().is_some() {
            return Err(syntax(a, "term"));
        }
        args.push(symbol(a, "term")?.to_string());
    }
    Ok(Atom {
        predicate: name.to_string(),
        args,
    })
}

fn literal(e: &SExpr) -> Result<Literal, PddlError> {
    if e.head() == Some("not") {
        let items = e.as_list().unwrap_or_default();
        if items.len() != 2 {
            return Err(syntax(e, "(not <atom>)"));
        }
        if items[1].head() == Some("not") {
            return Err(syntax(&items[1], "atom"));
        }
        return Ok(Literal::neg(atom(&items[1])?));
    }
    Ok(Literal::pos(atom(e)?))
}

/// `()`, a single literal, or `(and lit...)`.
fn conjunction(e: &SExpr) -> Result<Vec<Literal>, PddlError> {
    let items = list(e, "condition")?;
    if items.is_empty() {
        return Ok(Vec::new());
    }
    if e.head() == Some("and") {
        let mut out = Vec::new();
        for item in &items[1..] {
            if item.head() == Some("and") {
                out.extend(conjunction(item)?);
            } else {
                out.push(literal(item)?);
            }
        }
        return Ok(out);
    }
    Ok(vec![literal(e)?])
}

fn dedup<T: Clone + Eq + std::hash::Hash>(items: Vec<T>) -> Vec<T> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|x| seen.insert(x.clone())).collect()
}

fn check_requirements(items: &[SExpr]) -> Result<(), PddlError> {
    for r in items {
        let name = symbol(r, "requirement flag")?;
        if !SUPPORTED_REQUIREMENTS.contains(&name) {
            return Err(PddlError::UnsupportedFeature(name.to_string()));
        }
    }
    Ok(())
}

/// Parse a domain in the `:strips` + `:typing` + `:negative-preconditions` subset.
pub fn parse_domain(text: &str) -> Result<Domain, PddlError> {
    let top = read_one(text)?;
    let (name, sections) = header(&top, "domain")?;
    let mut domain = Domain {
        name,
        ..Domain::default()
    };
    for section in sections {
        let items = list(section, "domain section")?;
        let key = items
            .first()
            .and_then(SExpr::as_symbol)
            .ok_or_else(|| syntax(section, "section keyword"))?;
        match key {
            ":requirements" => check_requirements(&items[1..])?,
            ":types" => {
                for t in typed_list(&items[1..], false)? {
                    if t.name == ROOT_TYPE {
                        continue;
                    }
                    domain.types.push(TypeDecl {
                        name: t.name,
                        parent: t.type_name,
                    });
                }
            }
            ":predicates" => {
                for p in &items[1..] {
                    let pi = list(p, "predicate declaration")?;
                    let head = pi.first().ok_or_else(|| syntax(p, "predicate name"))?;
                    let pname = symbol(head, "predicate name")?;
                    check_identifier(head, pname)?;
                    domain.predicates.push(PredicateSchema {
                        name: pname.to_string(),
                        params: typed_list(&pi[1..], true)?,
                    });
                }
            }
            ":action" => domain.actions.push(action(section, items)?),
            k if UNSUPPORTED_SECTIONS.contains(&k) => {
                return Err(PddlError::UnsupportedFeature(k.to_string()))
            }
            _ => return Err(syntax(section, "domain section keyword")),
        }
    }
    validate_domain(&domain)?;
    Ok(domain)
}

fn action(section: &SExpr, items: &[SExpr]) -> Result<ActionSchema, PddlError> {
    let name_e = items.get(1).ok_or_else(|| syntax(section, "action name"))?;
    let name = symbol(name_e, "action name")?;
    check_identifier(name_e, name)?;
    let mut schema = ActionSchema {
        name: name.to_string(),
        params: Vec::new(),
        precondition: Vec::new(),
        effect: Vec::new(),
    };
    let mut i = 2;
    while i < items.len() {
        let key = symbol(&items[i], "action keyword")?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| syntax(&items[i], "value after keyword"))?;
        match key {
            ":parameters" => schema.params = typed_list(list(value, "parameter list")?, true)?,
            ":precondition" => schema.precondition = dedup(conjunction(value)?),
            ":effect" => schema.effect = dedup(conjunction(value)?),
            _ => return Err(syntax(&items[i], ":parameters, :precondition or :effect")),
        }
        i += 2;
    }
    Ok(schema)
}

/// Check the structural invariants of a domain.
pub fn validate_domain(d: &Domain) -> Result<(), PddlError> {
    let mut seen = BTreeSet::new();
    for t in &d.types {
        if !seen.insert(t.name.as_str()) {
            return Err(PddlError::DuplicateName(t.name.clone()));
        }
    }
    for t in &d.types {
        if !d.has_type(&t.parent) {
            return Err(PddlError::UndeclaredSymbol(t.parent.clone()));
        }
        if !d.is_subtype(&t.name, ROOT_TYPE) {
            return Err(PddlError::TypeCycle(t.name.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for p in &d.predicates {
        if !seen.insert(p.name.as_str()) {
            return Err(PddlError::DuplicateName(p.name.clone()));
        }
        for param in &p.params {
            if !d.has_type(&param.type_name) {
                return Err(PddlError::UndeclaredSymbol(param.type_name.clone()));
            }
        }
    }
    let mut seen = BTreeSet::new();
    for a in &d.actions {
        if !seen.insert(a.name.as_str()) {
            return Err(PddlError::DuplicateName(a.name.clone()));
        }
        let mut vars = BTreeSet::new();
        for p in &a.params {
            if !vars.insert(p.name.as_str()) {
                return Err(PddlError::DuplicateName(p.name.clone()));
            }
            if !d.has_type(&p.type_name) {
                return Err(PddlError::UndeclaredSymbol(p.type_name.clone()));
            }
        }
        for lit in a.precondition.iter().chain(&a.effect) {
            check_atom_against(d, &lit.atom, |arg| {
                if !is_variable(arg) {
                    // constants in schemas need :constants, which is outside the subset
                    Err(PddlError::UndeclaredSymbol(arg.to_string()))
                } else if !vars.contains(arg) {
                    Err(PddlError::UnboundVariable {
                        action: a.name.clone(),
                        variable: arg.to_string(),
                    })
                } else {
                    Ok(())
                }
            })?;
        }
        for add in a.add_effects() {
            if a.del_effects().any(|del| del == add) {
                return Err(PddlError::ContradictoryEffect {
                    action: a.name.clone(),
                    atom: add.to_string(),
                });
            }
        }
    }
    Ok(())
}

fn check_atom_against(
    d: &Domain,
    atom: &Atom,
    mut check_arg: impl FnMut(&str) -> Result<(), PddlError>,
) -> Result<(), PddlError> {
    let schema = d
        .predicate(&atom.predicate)
        .ok_or_else(|| PddlError::UndeclaredSymbol(atom.predicate.clone()))?;
    if schema.params.len() != atom.args.len() {
        return Err(PddlError::ArityMismatch {
            predicate: atom.predicate.clone(),
            expected: schema.params.len(),
            found: atom.args.len(),
        });
    }
    atom.args.iter().try_for_each(|a| check_arg(a))
}

/// Parse a problem and cross-check it against `domain`.
pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, PddlError> {
    let top = read_one(text)?;
    let (name, sections) = header(&top, "problem")?;
    let mut problem = Problem {
        name,
        ..Problem::default()
    };
    let mut saw_domain = false;
    for section in sections {
        let items = list(section, "problem section")?;
        let key = items
            .first()
            .and_then(SExpr::as_symbol)
            .ok_or_else(|| syntax(section, "section keyword"))?;
        match key {
            ":domain" => {
                let n = items.get(1).ok_or_else(|| syntax(section, "domain name"))?;
                problem.domain_name = symbol(n, "domain name")?.to_string();
                saw_domain = true;
            }
            ":requirements" => check_requirements(&items[1..])?,
            ":objects" => problem.objects = typed_list(&items[1..], false)?,
            ":init" => {
                let mut init = Vec::new();
                for a in &items[1..] {
                    let lit = literal(a)?;
                    if !lit.positive {
                        return Err(PddlError::NegativeInit(lit.atom.to_string()));
                    }
                    init.push(lit.atom);
                }
                problem.init = dedup(init);
            }
            ":goal" => {
                let g = items.get(1).ok_or_else(|| syntax(section, "goal condition"))?;
                if items.len() > 2 {
                    return Err(syntax(&items[2], "')'"));
                }
                problem.goal = dedup(conjunction(g)?);
            }
            k if UNSUPPORTED_SECTIONS.contains(&k) => {
                return Err(PddlError::UnsupportedFeature(k.to_string()))
            }
            _ => return Err(syntax(section, "problem section keyword")),
        }
    }
    if !saw_domain {
        return Err(syntax(&top, "(:domain <name>)"));
    }
    validate_problem(&problem, domain)?;
    Ok(problem)
}

/// Check problem invariants against its domain.
pub fn validate_problem(p: &Problem, d: &Domain) -> Result<(), PddlError> {
    if p.domain_name != d.name {
        return Err(PddlError::DomainMismatch {
            expected: d.name.clone(),
            found: p.domain_name.clone(),
        });
    }
    let mut names = BTreeSet::new();
    for o in &p.objects {
        if !names.insert(o.name.as_str()) {
            return Err(PddlError::DuplicateName(o.name.clone()));
        }
        if !d.has_type(&o.type_name) {
            return Err(PddlError::UndeclaredSymbol(o.type_name.clone()));
        }
    }
    let check_const = |c: &str| {
        if names.contains(c) {
            Ok(())
        } else {
            Err(PddlError::UndeclaredSymbol(c.to_string()))
        }
    };
    for a in &p.init {
        check_atom_against(d, a, check_const)?;
    }
    for l in &p.goal {
        check_atom_against(d, &l.atom, check_const)?;
    }
    Ok(())
}

/// Parse a plan file: one `(action arg...)` per line or expression.
/// Steps are instantiated against the domain and problem.
pub fn parse_plan(text: &str, domain: &Domain, problem: &Problem) -> Result<Plan, PddlError> {
    let mut steps = Vec::new();
    for e in read_all(text)? {
        let a = atom(&e)?;
        steps.push(super::ground::instantiate(domain, problem, &a.predicate, &a.args)?);
    }
    Ok(Plan::new(steps))
}
