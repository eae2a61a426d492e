use std::collections::BTreeMap;
use std::fmt;

/// Root of every type hierarchy. Never stored in [`Domain::types`].
pub const ROOT_TYPE: &str = "object";

/// A declared type and its single parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

/// A typed variable (`?x - item`) or typed constant (`knife-1 - item`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Typed {
    pub name: String,
    pub type_name: String,
}

impl Typed {
    pub fn new(name: impl Into<String>, type_name: impl Into<String>) -> Self {
        Typed {
            name: name.into(),
            type_name: type_name.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredicateSchema {
    pub name: String,
    pub params: Vec<Typed>,
}

/// `(pred arg...)`. Arguments are variables (`?x`) inside schemas and
/// constants inside problems and ground actions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new<S: Into<String>>(predicate: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        Atom {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Typed>,
    pub precondition: Vec<Literal>,
    /// Positive literals are add effects, negative ones delete effects.
    pub effect: Vec<Literal>,
}

impl ActionSchema {
    pub fn add_effects(&self) -> impl Iterator<Item = &Atom> {
        self.effect.iter().filter(|l| l.positive).map(|l| &l.atom)
    }

    pub fn del_effects(&self) -> impl Iterator<Item = &Atom> {
        self.effect.iter().filter(|l| !l.positive).map(|l| &l.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Domain {
    pub name: String,
    pub types: Vec<TypeDecl>,
    pub predicates: Vec<PredicateSchema>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn has_type(&self, name: &str) -> bool {
        name == ROOT_TYPE || self.types.iter().any(|t| t.name == name)
    }

    /// True when `sub` equals `sup` or descends from it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut current = sub;
        // bounded walk; parse rejects cycles but hand-built domains may not
        for _ in 0..=self.types.len() + 1 {
            if current == sup {
                return true;
            }
            if current == ROOT_TYPE {
                return false;
            }
            match self.types.iter().find(|t| t.name == current) {
                Some(t) => current = &t.parent,
                None => return false,
            }
        }
        false
    }

    /// Whether any action precondition is negative. Drives the printed
    /// `:requirements` clause.
    pub fn uses_negative_preconditions(&self) -> bool {
        self.actions
            .iter()
            .any(|a| a.precondition.iter().any(|l| !l.positive))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Problem {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<Typed>,
    pub init: Vec<Atom>,
    pub goal: Vec<Literal>,
}

impl Problem {
    pub fn object_type(&self, name: &str) -> Option<&str> {
        self.objects
            .iter()
            .find(|o| o.name == name)
            .map(|o| o.type_name.as_str())
    }
}

/// An action schema instantiated with constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundAction {
    pub schema: String,
    pub args: Vec<String>,
    /// Variable to constant, in parameter order.
    pub binding: Vec<(String, String)>,
    pub pre: Vec<Literal>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
}

impl GroundAction {
    /// Canonical `name arg1 arg2` form; also the planner's tie-break key.
    pub fn name(&self) -> String {
        let mut s = self.schema.clone();
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Plan {
    pub steps: Vec<GroundAction>,
}

impl Plan {
    pub fn new(steps: Vec<GroundAction>) -> Self {
        Plan { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Numbered human-readable listing, one step per line.
    pub fn to_numbered(&self) -> String {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{}. {}\n", i + 1, s.name()))
            .collect()
    }

    /// Standard plan-file form: one `(action args)` per line.
    pub fn to_pddl(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }

    /// Rename constants in every step.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Plan {
        let r = |c: &String| map.get(c).cloned().unwrap_or_else(|| c.clone());
        let ra = |a: &Atom| Atom {
            predicate: a.predicate.clone(),
            args: a.args.iter().map(r).collect(),
        };
        Plan {
            steps: self
                .steps
                .iter()
                .map(|s| GroundAction {
                    schema: s.schema.clone(),
                    args: s.args.iter().map(r).collect(),
                    binding: s.binding.iter().map(|(v, c)| (v.clone(), r(c))).collect(),
                    pre: s
                        .pre
                        .iter()
                        .map(|l| Literal {
                            atom: ra(&l.atom),
                            positive: l.positive,
                        })
                        .collect(),
                    add: s.add.iter().map(ra).collect(),
                    del: s.del.iter().map(ra).collect(),
                })
                .collect(),
        }
    }
}
