use super::model::*;
use super::PddlError;

fn substitute(atom: &Atom, binding: &[(String, String)]) -> Atom {
    Atom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|a| {
                binding
                    .iter()
                    .find(|(v, _)| v == a)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(|| a.clone())
            })
            .collect(),
    }
}

fn build(schema: &ActionSchema, args: Vec<String>) -> GroundAction {
    let binding: Vec<(String, String)> = schema
        .params
        .iter()
        .zip(&args)
        .map(|(p, c)| (p.name.clone(), c.clone()))
        .collect();
    let pre = schema
        .precondition
        .iter()
        .map(|l| Literal {
            atom: substitute(&l.atom, &binding),
            positive: l.positive,
        })
        .collect();
    let add = schema.add_effects().map(|a| substitute(a, &binding)).collect();
    let del = schema.del_effects().map(|a| substitute(a, &binding)).collect();
    GroundAction {
        schema: schema.name.clone(),
        args,
        binding,
        pre,
        add,
        del,
    }
}

/// Instantiate one action by name with explicit arguments, checking arity
/// and parameter types.
pub fn instantiate(
    d: &Domain,
    p: &Problem,
    action: &str,
    args: &[String],
) -> Result<GroundAction, PddlError> {
    let schema = d
        .action(action)
        .ok_or_else(|| PddlError::UndeclaredSymbol(action.to_string()))?;
    if schema.params.len() != args.len() {
        return Err(PddlError::ArityMismatch {
            predicate: action.to_string(),
            expected: schema.params.len(),
            found: args.len(),
        });
    }
    for (param, arg) in schema.params.iter().zip(args) {
        let ty = p
            .object_type(arg)
            .ok_or_else(|| PddlError::UndeclaredSymbol(arg.clone()))?;
        if !d.is_subtype(ty, &param.type_name) {
            return Err(PddlError::TypeMismatch {
                constant: arg.clone(),
                expected: param.type_name.clone(),
                found: ty.to_string(),
            });
        }
    }
    Ok(build(schema, args.to_vec()))
}

/// All type-correct instantiations of every action schema over the problem's
/// objects, ordered by action name and then argument names.
pub fn ground(d: &Domain, p: &Problem) -> Vec<GroundAction> {
    let mut objects: Vec<&Typed> = p.objects.iter().collect();
    objects.sort_by(|a, b| a.name.cmp(&b.name));

    let mut schemas: Vec<&ActionSchema> = d.actions.iter().collect();
    schemas.sort_by(|a, b| a.name.cmp(&b.name));

    let mut out = Vec::new();
    for schema in schemas {
        let candidates: Vec<Vec<&str>> = schema
            .params
            .iter()
            .map(|param| {
                objects
                    .iter()
                    .filter(|o| d.is_subtype(&o.type_name, &param.type_name))
                    .map(|o| o.name.as_str())
                    .collect()
            })
            .collect();
        if candidates.iter().any(Vec::is_empty) {
            continue;
        }
        // odometer over candidate lists; last position varies fastest
        let mut idx = vec![0usize; candidates.len()];
        loop {
            let args = idx
                .iter()
                .zip(&candidates)
                .map(|(&i, c)| c[i].to_string())
                .collect();
            out.push(build(schema, args));
            let mut pos = idx.len();
            let exhausted = loop {
                if pos == 0 {
                    break true;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < candidates[pos].len() {
                    break false;
                }
                idx[pos] = 0;
            };
            if exhausted {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem};

    const DOMAIN: &str = "(define (domain d) (:types item tool - object)
        (:predicates (p ?x - item) (q ?x - object ?y - tool))
        (:action mark :parameters (?x - item) :effect (p ?x))
        (:action use :parameters (?x - object ?t - tool) :precondition (p ?x) :effect (q ?x ?t)))";

    #[test]
    fn unary_action_over_two_objects() {
        let d = parse_domain(
            "(define (domain d) (:types item) (:predicates (p ?x - item))
             (:action mark :parameters (?x - item) :effect (p ?x)))",
        )
        .unwrap();
        let p = parse_problem("(define (problem p) (:domain d) (:objects b a - item))", &d).unwrap();
        let g = ground(&d, &p);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].name(), "mark a");
        assert_eq!(g[1].add, vec![Atom::new("p", ["b"])]);
    }

    #[test]
    fn no_objects_no_actions() {
        let d = parse_domain(DOMAIN).unwrap();
        let p = parse_problem("(define (problem p) (:domain d))", &d).unwrap();
        assert!(ground(&d, &p).is_empty());
    }

    #[test]
    fn nullary_action_grounds_once() {
        let d = parse_domain(
            "(define (domain d) (:predicates (q)) (:action go :parameters () :effect (q)))",
        )
        .unwrap();
        let p = parse_problem("(define (problem p) (:domain d))", &d).unwrap();
        assert_eq!(ground(&d, &p).len(), 1);
    }

    #[test]
    fn respects_types_and_ordering() {
        let d = parse_domain(DOMAIN).unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain d) (:objects z - item k - tool a - item))",
            &d,
        )
        .unwrap();
        let names: Vec<String> = ground(&d, &p).iter().map(GroundAction::name).collect();
        assert_eq!(
            names,
            vec!["mark a", "mark z", "use a k", "use k k", "use z k"]
        );
    }

    #[test]
    fn instantiate_checks_types() {
        let d = parse_domain(DOMAIN).unwrap();
        let p = parse_problem("(define (problem p) (:domain d) (:objects a - item k - tool))", &d)
            .unwrap();
        assert!(instantiate(&d, &p, "use", &["a".into(), "k".into()]).is_ok());
        assert!(matches!(
            instantiate(&d, &p, "use", &["k".into(), "a".into()]),
            Err(PddlError::TypeMismatch { .. })
        ));
        assert!(matches!(
            instantiate(&d, &p, "fly", &[]),
            Err(PddlError::UndeclaredSymbol(_))
        ));
    }
}
