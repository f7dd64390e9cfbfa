use super::{GatewaySet, PlacementError, PlacementInput, PlacementStrategy, Provenance};
use crate::inp::BoundingBox;

/// Gateways at the centres of an r × c grid laid over the bounding box.
#[derive(Debug, Clone, Copy, Default)]
pub struct RegularGrid;

/// Rows and columns for `k` cells over a `width` × `height` box.
///
/// Candidates are `c = ceil(k / r)` for every `r` that leaves no row empty.
/// The winner has the aspect ratio `r / c` closest (in log scale) to
/// `height / width`, then the fewest unused cells, then the fewest rows. A
/// box that is flat on one axis becomes a single line of `k` cells.
pub fn grid_dims(k: usize, width: f64, height: f64) -> Result<(usize, usize), PlacementError> {
    if k == 0 {
        return Err(PlacementError::InvalidK(k));
    }
    match (width > 0.0, height > 0.0) {
        (false, false) => return Err(PlacementError::DegenerateBBox),
        (true, false) => return Ok((1, k)),
        (false, true) => return Ok((k, 1)),
        (true, true) => {}
    }
    let target = (height / width).ln();
    let mut best: Option<((f64, usize, usize), (usize, usize))> = None;
    for r in 1..=k {
        let c = k.div_ceil(r);
        if (r - 1) * c >= k {
            continue;
        }
        let key = (((r as f64) / (c as f64)).ln() - target).abs();
        let key = (key, r * c - k, r);
        let better = match &best {
            None => true,
            Some((b, _)) => key.0 < b.0 || (key.0 == b.0 && (key.1, key.2) < (b.1, b.2)),
        };
        if better {
            best = Some((key, (r, c)));
        }
    }
    Ok(best.expect("r = 1 is always a candidate").1)
}

/// First `k` cell centres in row-major order from the bottom-left corner.
pub fn grid_positions(k: usize, bbox: &BoundingBox) -> Result<(Vec<(f64, f64)>, (usize, usize)), PlacementError> {
    let (w, h) = (bbox.width(), bbox.height());
    let (rows, cols) = grid_dims(k, w, h)?;
    let positions = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .take(k)
        .map(|(i, j)| {
            (
                bbox.x_min + (j as f64 + 0.5) * w / cols as f64,
                bbox.y_min + (i as f64 + 0.5) * h / rows as f64,
            )
        })
        .collect();
    Ok((positions, (rows, cols)))
}

impl PlacementStrategy for RegularGrid {
    fn name(&self) -> &'static str {
        "regular_grid"
    }

    fn place(&self, input: &PlacementInput<'_>, k: usize, seed: u64) -> Result<GatewaySet, PlacementError> {
        let (positions, dims) = grid_positions(k, &input.bbox)?;
        Ok(GatewaySet {
            strategy: self.name().into(),
            k,
            positions,
            provenance: Provenance { seed, grid: Some(dims), ..Default::default() },
        })
    }
}
