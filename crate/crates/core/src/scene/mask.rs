use serde::{Deserialize, Serialize};

use super::{BoundingBox, ImageSize, SceneError};

/// Binary segmentation mask over the full image raster (row-major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentMask {
    size: ImageSize,
    bits: Vec<bool>,
}

/// Uncompressed run-length encoding: alternating runs of 0s and 1s over the
/// row-major raster, starting with a (possibly empty) run of 0s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleMask {
    pub counts: Vec<u32>,
}

impl SegmentMask {
    pub fn empty(size: ImageSize) -> Self {
        SegmentMask {
            size,
            bits: vec![false; size.pixels()],
        }
    }

    /// Rasterize a box: a pixel is set when its center lies inside the box.
    pub fn from_box(size: ImageSize, b: &BoundingBox) -> Self {
        let mut m = Self::empty(size);
        for y in 0..size.height {
            let cy = y as f64 + 0.5;
            if cy < b.y1 || cy >= b.y2 {
                continue;
            }
            for x in 0..size.width {
                let cx = x as f64 + 0.5;
                if cx >= b.x1 && cx < b.x2 {
                    m.bits[(y * size.width + x) as usize] = true;
                }
            }
        }
        m
    }

    pub fn from_bits(size: ImageSize, bits: Vec<bool>) -> Result<Self, SceneError> {
        if bits.len() != size.pixels() {
            return Err(SceneError::DimensionMismatch);
        }
        Ok(SegmentMask { size, bits })
    }

    pub fn size(&self) -> ImageSize {
        self.size
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        x < self.size.width && y < self.size.height && self.bits[(y * self.size.width + x) as usize]
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn to_rle(&self) -> RleMask {
        let mut counts = Vec::new();
        let mut current = false;
        let mut run = 0u32;
        for &b in &self.bits {
            if b == current {
                run += 1;
            } else {
                counts.push(run);
                current = b;
                run = 1;
            }
        }
        counts.push(run);
        RleMask { counts }
    }

    pub fn from_rle(size: ImageSize, rle: &RleMask) -> Result<Self, SceneError> {
        let total: u64 = rle.counts.iter().map(|&c| c as u64).sum();
        if total != size.pixels() as u64 {
            return Err(SceneError::DimensionMismatch);
        }
        let mut bits = Vec::with_capacity(size.pixels());
        for (i, &c) in rle.counts.iter().enumerate() {
            bits.extend(std::iter::repeat_n(i % 2 == 1, c as usize));
        }
        Ok(SegmentMask { size, bits })
    }
}

/// Intersection over union; 0 when both masks are empty.
pub fn iou(a: &SegmentMask, b: &SegmentMask) -> Result<f64, SceneError> {
    if a.size != b.size {
        return Err(SceneError::DimensionMismatch);
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.bits.iter().zip(&b.bits) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    if union == 0 {
        return Ok(0.0);
    }
    Ok(inter as f64 / union as f64)
}
