use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::pddl::{Atom, Domain, GroundAction, Literal, Problem, Typed};
use crate::scene::{
    Affordance, Attribute, AttributeTuple, BoundingBox, Category, ImageSize, KnowledgeBase, Label,
    Relation, Relationship, SceneGraph, SceneObject, SegmentMask,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum Location {
    Table,
    Held,
    /// Resting on or in a receptacle.
    On(String),
    /// Handed to a recipient.
    With(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldObject {
    pub category: Category,
    pub bbox: BoundingBox,
    /// Static labels; the `dirty` state lives in [`WorldObject::dirty`].
    pub attrs: AttributeTuple,
    pub location: Location,
    pub sliced: bool,
    pub cooked: bool,
    pub clean: bool,
    pub dirty: bool,
    pub delivered: bool,
}

impl WorldObject {
    /// Fresh object on the table with the given static labels.
    pub fn new(attrs: AttributeTuple, bbox: BoundingBox) -> Self {
        WorldObject {
            category: attrs.category,
            bbox,
            attrs: AttributeTuple {
                category: attrs.category,
                affordances: attrs.affordances,
                attributes: attrs.attributes.into_iter().filter(|a| !a.is_state()).collect(),
            },
            location: Location::Table,
            sliced: false,
            cooked: false,
            clean: false,
            dirty: false,
            delivered: false,
        }
    }

    /// Labels as perceived: static labels plus `dirty` when set.
    pub fn observed(&self) -> AttributeTuple {
        let mut t = self.attrs.clone();
        if self.dirty {
            t.attributes.insert(Attribute::Dirty);
        }
        t
    }

    pub fn has(&self, label: Label) -> bool {
        self.observed().has(label)
    }
}

/// Ground-truth state of the simulated kitchen. Object ids double as PDDL
/// constant names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    image: ImageSize,
    objects: BTreeMap<String, WorldObject>,
    gripper: Option<String>,
    relations: Vec<(String, Relation, String)>,
}

impl WorldState {
    pub fn new(
        image: ImageSize,
        objects: BTreeMap<String, WorldObject>,
        relations: Vec<(String, Relation, String)>,
    ) -> Result<Self, SimError> {
        let w = WorldState {
            image,
            objects,
            gripper: None,
            relations,
        };
        w.check()?;
        Ok(w)
    }

    /// A world whose state is exactly what `scene` shows: every object on
    /// the table, `dirty` taken from the detected labels.
    pub fn from_scene(scene: &SceneGraph) -> Result<Self, SimError> {
        let objects = scene
            .objects()
            .iter()
            .map(|o| {
                let mut w = WorldObject::new(o.attrs.clone(), o.bbox);
                w.dirty = o.attrs.attributes.contains(&Attribute::Dirty);
                (o.id.clone(), w)
            })
            .collect();
        let relations = scene
            .relationships()
            .iter()
            .map(|r| {
                let id = |i: usize| scene.objects()[i].id.clone();
                (id(r.subject), r.relation, id(r.object))
            })
            .collect();
        WorldState::new(scene.image(), objects, relations)
    }

    /// State invariants: at most one held object, consistent with the
    /// gripper; receptacles exist; never both dirty and clean.
    pub fn check(&self) -> Result<(), SimError> {
        let held: Vec<&String> = self
            .objects
            .iter()
            .filter(|(_, o)| o.location == Location::Held)
            .map(|(id, _)| id)
            .collect();
        if held.len() > 1 || held.first().copied() != self.gripper.as_ref() {
            return Err(SimError::Inconsistent("gripper and held objects disagree".into()));
        }
        for (id, o) in &self.objects {
            if o.dirty && o.clean {
                return Err(SimError::Inconsistent(format!("{id} is both dirty and clean")));
            }
            if let Location::On(r) | Location::With(r) = &o.location {
                if !self.objects.contains_key(r) || r == id {
                    return Err(SimError::UnknownObject(r.clone()));
                }
            }
        }
        for (a, _, b) in &self.relations {
            for id in [a, b] {
                if !self.objects.contains_key(id) {
                    return Err(SimError::UnknownObject(id.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn image(&self) -> ImageSize {
        self.image
    }

    pub fn objects(&self) -> &BTreeMap<String, WorldObject> {
        &self.objects
    }

    pub fn object(&self, id: &str) -> Option<&WorldObject> {
        self.objects.get(id)
    }

    pub fn gripper(&self) -> Option<&str> {
        self.gripper.as_deref()
    }

    pub fn relations(&self) -> &[(String, Relation, String)] {
        &self.relations
    }

    /// Ground-truth mask of an object.
    pub fn mask(&self, id: &str) -> Option<SegmentMask> {
        self.objects
            .get(id)
            .map(|o| SegmentMask::from_box(self.image, &o.bbox))
    }

    pub fn true_masks(&self) -> BTreeMap<String, SegmentMask> {
        self.objects
            .keys()
            .map(|id| (id.clone(), self.mask(id).expect("own id")))
            .collect()
    }

    /// Perfect perception of the current state. Scene object ids are world ids.
    pub fn scene(&self) -> SceneGraph {
        let ids: Vec<&String> = self.objects.keys().collect();
        let index = |id: &String| ids.iter().position(|x| *x == id).expect("checked id");
        let objects = self
            .objects
            .iter()
            .map(|(id, o)| SceneObject {
                id: id.clone(),
                bbox: o.bbox,
                attrs: o.observed(),
                mask: None,
            })
            .collect();
        let relationships = self
            .relations
            .iter()
            .map(|(a, r, b)| Relationship {
                subject: index(a),
                relation: *r,
                object: index(b),
            })
            .collect();
        SceneGraph::new(self.image, objects, relationships).expect("world boxes lie inside the image")
    }

    /// Symbolic projection onto the kitchen domain's predicates.
    pub fn projection(&self, kb: &KnowledgeBase) -> BTreeSet<Atom> {
        let mut atoms = BTreeSet::new();
        for (id, o) in &self.objects {
            let observed = o.observed();
            if let Some(e) = kb.entry(o.category) {
                for t in &e.templates {
                    if observed.has(t.label) {
                        atoms.insert(Atom::new(t.predicate.clone(), [id.clone()]));
                    }
                }
            }
            for (flag, pred) in [
                (o.sliced, "sliced"),
                (o.cooked, "cooked"),
                (o.clean, "clean"),
                (o.delivered, "delivered"),
            ] {
                if flag {
                    atoms.insert(Atom::new(pred, [id.clone()]));
                }
            }
            match &o.location {
                Location::Table => {}
                Location::Held => {
                    atoms.insert(Atom::new("holding", [id.clone()]));
                    atoms.insert(Atom::new("hand-full", Vec::<String>::new()));
                }
                Location::On(r) => {
                    atoms.insert(Atom::new("on", [id.clone(), r.clone()]));
                    atoms.insert(Atom::new("placed", [id.clone()]));
                }
                Location::With(_) => {
                    atoms.insert(Atom::new("placed", [id.clone()]));
                }
            }
        }
        for (a, r, b) in &self.relations {
            atoms.insert(Atom::new(r.as_str(), [a.clone(), b.clone()]));
        }
        atoms
    }

    /// PDDL problem for the current state.
    pub fn problem(&self, kb: &KnowledgeBase, d: &Domain, name: &str, goal: Vec<Literal>) -> Problem {
        Problem {
            name: name.to_string(),
            domain_name: d.name.clone(),
            objects: self
                .objects
                .iter()
                .map(|(id, o)| {
                    let t = kb.entry(o.category).map_or("object", |e| e.type_name.as_str());
                    Typed::new(id.clone(), t)
                })
                .collect(),
            init: self.projection(kb).into_iter().collect(),
            goal,
        }
    }

    fn get(&self, id: &str) -> Result<&WorldObject, SimError> {
        self.objects
            .get(id)
            .ok_or_else(|| SimError::UnknownObject(id.to_string()))
    }

    /// Apply one primitive. Pure: the receiver is left untouched.
    pub fn step(&self, a: &GroundAction) -> Result<WorldState, SimError> {
        let unmet = |lit: String| SimError::PreconditionUnmet {
            action: a.name(),
            literal: lit,
        };
        let arity = match a.schema.as_str() {
            "grasp" => 1,
            "put" | "cut" | "cook" | "clean" | "deliver" => 2,
            other => return Err(SimError::UnknownAction(other.to_string())),
        };
        if a.args.len() != arity {
            return Err(SimError::UnknownAction(a.name()));
        }
        let x = &a.args[0];
        let ox = self.get(x)?;
        let holding = |id: &str| self.gripper.as_deref() == Some(id);
        let need = |ok: bool, lit: String| if ok { Ok(()) } else { Err(unmet(lit)) };
        let mut next = self.clone();

        if a.schema == "grasp" {
            need(ox.has(Label::Attribute(Attribute::Graspable)), format!("(graspable {x})"))?;
            need(self.gripper.is_none(), "(not (hand-full))".into())?;
            need(ox.location == Location::Table, format!("(not (placed {x}))"))?;
            next.objects.get_mut(x).expect("checked").location = Location::Held;
            next.gripper = Some(x.clone());
            return Ok(next);
        }

        let y = &a.args[1];
        let oy = self.get(y)?;
        match a.schema.as_str() {
            "put" => {
                need(holding(x), format!("(holding {x})"))?;
                need(!holding(y), format!("(not (holding {y}))"))?;
                need(oy.has(Label::Affordance(Affordance::Contain)), format!("(container {y})"))?;
                next.objects.get_mut(x).expect("checked").location = Location::On(y.clone());
                next.gripper = None;
            }
            "cut" => {
                need(holding(y), format!("(holding {y})"))?;
                need(!holding(x), format!("(not (holding {x}))"))?;
                need(oy.has(Label::Affordance(Affordance::Cut)), format!("(cuts {y})"))?;
                need(ox.has(Label::Affordance(Affordance::Cuttable)), format!("(cuttable {x})"))?;
                need(!ox.sliced, format!("(not (sliced {x}))"))?;
                next.objects.get_mut(x).expect("checked").sliced = true;
            }
            "cook" => {
                need(holding(x), format!("(holding {x})"))?;
                need(ox.has(Label::Attribute(Attribute::Cookable)), format!("(cookable {x})"))?;
                need(oy.has(Label::Affordance(Affordance::Heat)), format!("(heats {y})"))?;
                need(!ox.cooked, format!("(not (cooked {x}))"))?;
                next.objects.get_mut(x).expect("checked").cooked = true;
            }
            "clean" => {
                need(holding(x), format!("(holding {x})"))?;
                need(ox.dirty, format!("(dirty {x})"))?;
                need(oy.has(Label::Attribute(Attribute::Cleaner)), format!("(washes {y})"))?;
                let o = next.objects.get_mut(x).expect("checked");
                o.clean = true;
                o.dirty = false;
            }
            "deliver" => {
                need(holding(x), format!("(holding {x})"))?;
                need(oy.has(Label::Attribute(Attribute::Receiver)), format!("(recipient {y})"))?;
                let o = next.objects.get_mut(x).expect("checked");
                o.location = Location::With(y.clone());
                o.delivered = true;
                next.gripper = None;
            }
            _ => unreachable!("arity table covers every schema"),
        }
        Ok(next)
    }
}
