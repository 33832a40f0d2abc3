//! Dense prediction rasters: how loud the robot sounds everywhere.
//!
//! A fixed-robot raster keeps the robot (and its single panorama scan) in
//! place and varies the listener cell; a fixed-listener raster scans a
//! panorama at every candidate robot cell and predicts toward the one
//! listener — the per-state noise cost the planner consumes.
//!
//! Cells farther than 10 m from the anchor lie outside the training support
//! and stay absent rather than extrapolated, as does the anchor's own cell
//! (zero distance).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustics::{histogram_to_label, trace_impulse, AcousticConfig};
use crate::gridmap::{GridMap, MaterialTable, Pose2};
use crate::predictor::{PredictorError, PredictorModel};
use crate::sensing::{build_features, scan_panorama, DEFAULT_SCAN_BINS, MAX_PAIR_DISTANCE};

#[derive(Debug, Error)]
pub enum AcousticMapError {
    #[error("anchor pose ({x}, {y}) is not traversable")]
    AnchorNotTraversable { x: f64, y: f64 },
    #[error(transparent)]
    Map(#[from] crate::gridmap::MapError),
    #[error(transparent)]
    Sensing(#[from] crate::sensing::SensingError),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
    #[error(transparent)]
    Acoustics(#[from] crate::acoustics::AcousticsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RasterMode {
    FixedRobot,
    FixedListener,
}

/// Per-cell predicted loudness around an anchor pose. `values[iy][ix]` is
/// `None` on walls and outside the 10 m support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcousticRaster {
    pub map_id: String,
    pub mode: RasterMode,
    pub anchor: Pose2,
    pub cell_size: f64,
    pub model_kind: String,
    pub values: Vec<Vec<Option<f64>>>,
}

impl AcousticRaster {
    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        self.values[iy][ix]
    }

    /// CSV rows `cell_x,cell_y,x_m,y_m,y_hat` for present cells.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("cell_x,cell_y,x_m,y_m,y_hat\n");
        for (iy, row) in self.values.iter().enumerate() {
            for (ix, v) in row.iter().enumerate() {
                if let Some(y) = v {
                    let x_m = (ix as f64 + 0.5) * self.cell_size;
                    let y_m = (iy as f64 + 0.5) * self.cell_size;
                    out.push_str(&format!("{ix},{iy},{x_m},{y_m},{y}\n"));
                }
            }
        }
        out
    }
}

fn check_anchor(map: &GridMap, anchor: &Pose2) -> Result<(), AcousticMapError> {
    if !map.is_traversable(anchor)? {
        return Err(AcousticMapError::AnchorNotTraversable { x: anchor.x, y: anchor.y });
    }
    Ok(())
}

/// Cells eligible for prediction around `anchor`: traversable, within the
/// 10 m support, and not at zero distance.
fn support_cells(map: &GridMap, anchor: &Pose2) -> Vec<(usize, usize, f64)> {
    map.traversable_cells()
        .into_iter()
        .filter_map(|(ix, iy)| {
            let c = map.cell_center(ix, iy);
            let r = anchor.distance(&c);
            if r > 0.0 && r <= MAX_PAIR_DISTANCE {
                Some((ix, iy, r))
            } else {
                None
            }
        })
        .collect()
}

fn blank(map: &GridMap) -> Vec<Vec<Option<f64>>> {
    vec![vec![None; map.width]; map.height]
}

/// Predict loudness at every listener cell around a fixed robot: one scan at
/// the robot, per-cell distance and direction.
pub fn fixed_robot_map(
    map: &GridMap,
    materials: &MaterialTable,
    robot: &Pose2,
    model: &PredictorModel,
) -> Result<AcousticRaster, AcousticMapError> {
    check_anchor(map, robot)?;
    let scan = scan_panorama(map, materials, robot, DEFAULT_SCAN_BINS)?;
    let mut values = blank(map);
    for (ix, iy, r) in support_cells(map, robot) {
        let listener = map.cell_center(ix, iy);
        let theta = robot.direction_to(&listener);
        let f = build_features(&scan, r, theta, model.layout())?;
        values[iy][ix] = Some(model.predict(&f)?);
    }
    Ok(AcousticRaster {
        map_id: map.id.clone(),
        mode: RasterMode::FixedRobot,
        anchor: *robot,
        cell_size: map.cell_size,
        model_kind: model.kind().tag(),
        values,
    })
}

/// Predict what a fixed listener hears from every robot cell: a fresh scan
/// per cell, polar coordinates of the listener in that cell's frame.
pub fn fixed_listener_map(
    map: &GridMap,
    materials: &MaterialTable,
    listener: &Pose2,
    model: &PredictorModel,
) -> Result<AcousticRaster, AcousticMapError> {
    check_anchor(map, listener)?;
    let cells = support_cells(map, listener);
    let predictions: Vec<Result<(usize, usize, f64), AcousticMapError>> = cells
        .par_iter()
        .map(|&(ix, iy, r)| {
            let robot = map.cell_center(ix, iy);
            let scan = scan_panorama(map, materials, &robot, DEFAULT_SCAN_BINS)?;
            let theta = robot.direction_to(listener);
            let f = build_features(&scan, r, theta, model.layout())?;
            Ok((ix, iy, model.predict(&f)?))
        })
        .collect();
    let mut values = blank(map);
    for p in predictions {
        let (ix, iy, y) = p?;
        values[iy][ix] = Some(y);
    }
    Ok(AcousticRaster {
        map_id: map.id.clone(),
        mode: RasterMode::FixedListener,
        anchor: *listener,
        cell_size: map.cell_size,
        model_kind: model.kind().tag(),
        values,
    })
}

/// Ground-truth raster from exhaustive tracing instead of a model: the label
/// each cell would receive in a generated dataset. Feasible on the small
/// bundled fixtures.
pub fn oracle_map(
    map: &GridMap,
    materials: &MaterialTable,
    anchor: &Pose2,
    mode: RasterMode,
    cfg: &AcousticConfig,
    seed: u64,
) -> Result<AcousticRaster, AcousticMapError> {
    check_anchor(map, anchor)?;
    let cells = support_cells(map, anchor);
    let traces: Vec<Result<(usize, usize, f64), AcousticMapError>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(ix, iy, _))| {
            let cell = map.cell_center(ix, iy);
            let (source, listener) = match mode {
                RasterMode::FixedRobot => (*anchor, cell),
                RasterMode::FixedListener => (cell, *anchor),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(seed, 0x0AC1E, i as u64));
            let hist = trace_impulse(map, materials, &source, &listener, cfg, &mut rng)?;
            Ok((ix, iy, histogram_to_label(&hist).y))
        })
        .collect();
    let mut values = blank(map);
    for t in traces {
        let (ix, iy, y) = t?;
        values[iy][ix] = Some(y);
    }
    Ok(AcousticRaster {
        map_id: map.id.clone(),
        mode,
        anchor: *anchor,
        cell_size: map.cell_size,
        model_kind: "oracle".into(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn heuristic_raster_is_radially_symmetric() {
        let (map, materials) = fixtures::free_field();
        let robot = map.cell_center(48, 48);
        let raster =
            fixed_robot_map(&map, &materials, &robot, &PredictorModel::Heuristic).unwrap();
        // Cells at mirrored offsets share a distance, hence a value.
        let a = raster.get(48 + 10, 48).unwrap();
        let b = raster.get(48 - 10, 48).unwrap();
        let c = raster.get(48, 48 + 10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        // Anchor cell is absent; far cells are absent.
        assert!(raster.get(48, 48).is_none());
        assert!(raster.get(2, 2).is_none());
        // Values decrease with distance.
        let near = raster.get(48 + 2, 48).unwrap();
        assert!(near > a);
    }

    #[test]
    fn heuristic_rasters_agree_under_anchor_swap() {
        let (map, materials) = fixtures::two_room("tworoom", 2, (4, 5), Some((14, 15)));
        let anchor = map.cell_center(10, 10);
        let fr = fixed_robot_map(&map, &materials, &anchor, &PredictorModel::Heuristic).unwrap();
        let fl =
            fixed_listener_map(&map, &materials, &anchor, &PredictorModel::Heuristic).unwrap();
        assert_eq!(fr.values, fl.values);
    }

    #[test]
    fn raster_values_stay_in_unit_interval() {
        let (map, materials) = fixtures::apartment("apartment", 0);
        let anchor = map.cell_center(24, 16);
        let raster =
            fixed_listener_map(&map, &materials, &anchor, &PredictorModel::Heuristic).unwrap();
        for row in &raster.values {
            for v in row.iter().flatten() {
                assert!((0.0..=1.0).contains(v));
            }
        }
    }

    #[test]
    fn single_free_cell_raster_is_empty() {
        use crate::gridmap::{GridMap, Material, MaterialTable};
        let t = MaterialTable::new(vec![
            Material { code: 0, name: "air".into(), absorption: 0.0 },
            Material { code: 1, name: "wall".into(), absorption: 0.5 },
        ])
        .unwrap();
        let mut cells = vec![1u8; 9];
        cells[4] = 0;
        let map = GridMap::new("one", 3, 3, 0.25, cells, &t).unwrap();
        let anchor = map.cell_center(1, 1);
        let raster = fixed_robot_map(&map, &t, &anchor, &PredictorModel::Heuristic).unwrap();
        // The only traversable cell is the anchor itself (r = 0): absent.
        assert!(raster.values.iter().flatten().all(|v| v.is_none()));
    }

    #[test]
    fn cross_intersection_spreads_along_arms() {
        let (map, materials) = fixtures::cross_intersection("cross", 1, 6);
        let center = map.cell_center(20, 20);
        let cfg = AcousticConfig { n_rays: 512, ..AcousticConfig::default() };
        let raster =
            oracle_map(&map, &materials, &center, RasterMode::FixedListener, &cfg, 3).unwrap();
        // Median loudness along an arm, 4+ meters out, should beat any
        // leakage into the solid block (which is simply absent here).
        let mut arm = Vec::new();
        for k in 4..19 {
            if let Some(v) = raster.get(20 + k, 20) {
                arm.push(v);
            }
            if let Some(v) = raster.get(20, 20 + k) {
                arm.push(v);
            }
        }
        assert!(!arm.is_empty());
        assert!(arm.iter().all(|&v| v > 0.0), "arms carry sound: {arm:?}");
    }
}
