use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::mask::{RleMask, SegmentMask};
use super::vocab::{Affordance, Attribute, Category, Label, Relation};
use super::SceneError;

/// Default frame size of the simulated camera.
pub const DEFAULT_IMAGE_SIZE: ImageSize = ImageSize {
    width: 300,
    height: 300,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl ImageSize {
    pub fn pixels(self) -> usize {
        self.width as usize * self.height as usize
    }
}

impl Default for ImageSize {
    fn default() -> Self {
        DEFAULT_IMAGE_SIZE
    }
}

/// Axis-aligned box in pixel coordinates, `x1 < x2` and `y1 < y2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BoundingBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self, SceneError> {
        let finite = [x1, y1, x2, y2].iter().all(|v| v.is_finite());
        if !finite || x1 >= x2 || y1 >= y2 {
            return Err(SceneError::InvalidBox([x1, y1, x2, y2]));
        }
        Ok(BoundingBox { x1, y1, x2, y2 })
    }

    pub fn center_x(&self) -> f64 {
        (self.x1 + self.x2) / 2.0
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    fn within(&self, size: ImageSize) -> bool {
        self.x1 >= 0.0 && self.y1 >= 0.0 && self.x2 <= size.width as f64 && self.y2 <= size.height as f64
    }
}

impl TryFrom<[f64; 4]> for BoundingBox {
    type Error = SceneError;

    fn try_from(v: [f64; 4]) -> Result<Self, Self::Error> {
        BoundingBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.x1, b.y1, b.x2, b.y2]
    }
}

/// Per-box attribute tuple: category, affordances and general attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeTuple {
    pub category: Category,
    pub affordances: BTreeSet<Affordance>,
    pub attributes: BTreeSet<Attribute>,
}

impl AttributeTuple {
    pub fn has(&self, label: Label) -> bool {
        match label {
            Label::Affordance(a) => self.affordances.contains(&a),
            Label::Attribute(a) => self.attributes.contains(&a),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    /// Stable identifier, unique within the scene.
    pub id: String,
    pub bbox: BoundingBox,
    pub attrs: AttributeTuple,
    pub mask: Option<SegmentMask>,
}

impl SceneObject {
    /// The detected mask, or the box raster when none was supplied.
    pub fn mask_or_box(&self, size: ImageSize) -> SegmentMask {
        self.mask
            .clone()
            .unwrap_or_else(|| SegmentMask::from_box(size, &self.bbox))
    }
}

/// `subject --relation--> object`, as indices into [`SceneGraph::objects`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relationship {
    pub subject: usize,
    pub relation: Relation,
    pub object: usize,
}

/// Boxes with their attribute tuples, plus pairwise relationships.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    image: ImageSize,
    objects: Vec<SceneObject>,
    relationships: Vec<Relationship>,
}

impl SceneGraph {
    pub fn new(
        image: ImageSize,
        objects: Vec<SceneObject>,
        relationships: Vec<Relationship>,
    ) -> Result<Self, SceneError> {
        let mut ids = BTreeSet::new();
        for o in &objects {
            if !ids.insert(o.id.as_str()) {
                return Err(SceneError::DuplicateId(o.id.clone()));
            }
            if !o.bbox.within(image) {
                return Err(SceneError::OutOfImage(o.id.clone()));
            }
            if let Some(m) = &o.mask {
                if m.size() != image {
                    return Err(SceneError::DimensionMismatch);
                }
            }
        }
        for r in &relationships {
            if r.subject >= objects.len() || r.object >= objects.len() {
                return Err(SceneError::RelationIndex(r.subject.max(r.object)));
            }
        }
        Ok(SceneGraph {
            image,
            objects,
            relationships,
        })
    }

    pub fn empty() -> Self {
        SceneGraph {
            image: DEFAULT_IMAGE_SIZE,
            objects: Vec::new(),
            relationships: Vec::new(),
        }
    }

    pub fn image(&self) -> ImageSize {
        self.image
    }

    pub fn objects(&self) -> &[SceneObject] {
        &self.objects
    }

    pub fn relationships(&self) -> &[Relationship] {
        &self.relationships
    }

    pub fn boxes(&self) -> impl Iterator<Item = &BoundingBox> {
        self.objects.iter().map(|o| &o.bbox)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Object indices sorted left to right by box center, ties by index.
    pub fn left_to_right(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.objects.len()).collect();
        order.sort_by(|&a, &b| {
            self.objects[a]
                .bbox
                .center_x()
                .total_cmp(&self.objects[b].bbox.center_x())
                .then(a.cmp(&b))
        });
        order
    }

    /// Distinct categories present, in left-to-right order of first appearance.
    pub fn categories(&self) -> Vec<Category> {
        let mut out = Vec::new();
        for i in self.left_to_right() {
            let c = self.objects[i].attrs.category;
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    pub fn contains_category(&self, c: Category) -> bool {
        self.objects.iter().any(|o| o.attrs.category == c)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.id == id)
    }

    /// Parse and validate the scene JSON format.
    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let file: SceneFile = serde_json::from_str(text).map_err(|e| SceneError::Json(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SceneFile::from(self)).expect("scene serializes")
    }
}

/// On-disk scene layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneFile {
    #[serde(default)]
    pub image: ImageSize,
    pub objects: Vec<SceneObjectFile>,
    #[serde(default)]
    pub relations: Vec<RelationFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneObjectFile {
    pub id: String,
    pub category: Category,
    #[serde(default)]
    pub affordances: Vec<Affordance>,
    #[serde(default)]
    pub attributes: Vec<Attribute>,
    pub bbox: BoundingBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<RleMask>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationFile {
    pub subj: String,
    pub rel: Relation,
    pub obj: String,
}

impl TryFrom<SceneFile> for SceneGraph {
    type Error = SceneError;

    fn try_from(f: SceneFile) -> Result<Self, Self::Error> {
        let index: HashMap<&str, usize> = f
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.id.as_str(), i))
            .collect();
        let mut relationships = Vec::with_capacity(f.relations.len());
        for r in &f.relations {
            let lookup = |id: &str| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| SceneError::UnknownObject(id.to_string()))
            };
            relationships.push(Relationship {
                subject: lookup(&r.subj)?,
                relation: r.rel,
                object: lookup(&r.obj)?,
            });
        }
        let mut objects = Vec::with_capacity(f.objects.len());
        for o in f.objects {
            let mask = o
                .mask
                .as_ref()
                .map(|rle| SegmentMask::from_rle(f.image, rle))
                .transpose()?;
            objects.push(SceneObject {
                id: o.id,
                bbox: o.bbox,
                attrs: AttributeTuple {
                    category: o.category,
                    affordances: o.affordances.into_iter().collect(),
                    attributes: o.attributes.into_iter().collect(),
                },
                mask,
            });
        }
        SceneGraph::new(f.image, objects, relationships)
    }
}

impl From<&SceneGraph> for SceneFile {
    fn from(g: &SceneGraph) -> Self {
        SceneFile {
            image: g.image,
            objects: g
                .objects
                .iter()
                .map(|o| SceneObjectFile {
                    id: o.id.clone(),
                    category: o.attrs.category,
                    affordances: o.attrs.affordances.iter().copied().collect(),
                    attributes: o.attrs.attributes.iter().copied().collect(),
                    bbox: o.bbox,
                    mask: o.mask.as_ref().map(SegmentMask::to_rle),
                })
                .collect(),
            relations: g
                .relationships
                .iter()
                .map(|r| RelationFile {
                    subj: g.objects[r.subject].id.clone(),
                    rel: r.relation,
                    obj: g.objects[r.object].id.clone(),
                })
                .collect(),
        }
    }
}
