//! Material-annotated occupancy grids: navigability, line-of-sight, and the
//! source/listener sampling geometry used for data generation.
//!
//! A [`GridMap`] is a dense 2D array of material codes. Code 0 is free air;
//! any positive code is a solid cell whose acoustic absorption comes from the
//! accompanying [`MaterialTable`]. Positions are continuous [`Pose2`] points
//! in meters; the pose-to-cell mapping uses `floor(coord / cell_size)` with
//! poses on the extreme max edge clamping to the last cell.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while loading, validating, or sampling from maps.
#[derive(Debug, Error)]
pub enum MapError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("unknown material code {code} at cell ({x}, {y})")]
    UnknownMaterial { code: u8, x: usize, y: usize },
    #[error("duplicate material code {code}")]
    DuplicateMaterial { code: u8 },
    #[error("material {code} absorption {absorption} outside [0, 1]")]
    AbsorptionOutOfRange { code: u8, absorption: f64 },
    #[error("material code 0 must be air with absorption 0, got {absorption}")]
    AirNotFree { absorption: f64 },
    #[error("map has no traversable cells")]
    NoTraversableCells,
    #[error("map dimensions {width}x{height} do not match {cells} cells")]
    DimensionMismatch {
        width: usize,
        height: usize,
        cells: usize,
    },
    #[error("pose ({x}, {y}) outside map bounds {w}m x {h}m")]
    OutOfBounds { x: f64, y: f64, w: f64, h: f64 },
    #[error("sampling exhausted after {retries} retries")]
    SamplingExhausted { retries: usize },
}

/// One surface material: a small integer code and the fraction of incident
/// acoustic energy it absorbs on reflection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub code: u8,
    pub name: String,
    pub absorption: f64,
}

/// Lookup table from material code to acoustic absorption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialTable {
    entries: Vec<Material>,
}

impl MaterialTable {
    /// Build a validated table. Code 0 must be present, named or not, with
    /// absorption exactly 0; codes must be unique; absorptions in [0, 1].
    pub fn new(entries: Vec<Material>) -> Result<Self, MapError> {
        let mut seen = [false; 256];
        for m in &entries {
            if seen[m.code as usize] {
                return Err(MapError::DuplicateMaterial { code: m.code });
            }
            seen[m.code as usize] = true;
            if !(0.0..=1.0).contains(&m.absorption) || !m.absorption.is_finite() {
                return Err(MapError::AbsorptionOutOfRange {
                    code: m.code,
                    absorption: m.absorption,
                });
            }
            if m.code == 0 && m.absorption != 0.0 {
                return Err(MapError::AirNotFree {
                    absorption: m.absorption,
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn contains(&self, code: u8) -> bool {
        self.entries.iter().any(|m| m.code == code)
    }

    /// Absorption coefficient for `code`, or `None` if the code is unknown.
    pub fn absorption(&self, code: u8) -> Option<f64> {
        self.entries.iter().find(|m| m.code == code).map(|m| m.absorption)
    }

    pub fn entries(&self) -> &[Material] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A continuous position in the map frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Pose2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Direction of `other` as seen from `self`, counterclockwise from +x,
    /// normalized to [0, 2pi).
    pub fn direction_to(&self, other: &Pose2) -> f64 {
        let theta = (other.y - self.y).atan2(other.x - self.x);
        if theta < 0.0 {
            theta + std::f64::consts::TAU
        } else {
            theta
        }
    }
}

/// Dense occupancy grid with per-cell material codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMap {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    cells: Vec<u8>,
}

/// On-disk JSON layout. `rows` holds single-digit codes; maps with codes > 9
/// use the `cells` 2D-array variant instead. Exactly one of the two must be
/// present.
#[derive(Serialize, Deserialize)]
struct MapFile {
    id: String,
    cell_size: f64,
    width: usize,
    height: usize,
    materials: Vec<Material>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cells: Option<Vec<Vec<u8>>>,
}

impl GridMap {
    /// Build a validated map from row-major cells (`cells[y * width + x]`).
    pub fn new(
        id: impl Into<String>,
        width: usize,
        height: usize,
        cell_size: f64,
        cells: Vec<u8>,
        materials: &MaterialTable,
    ) -> Result<Self, MapError> {
        if width * height != cells.len() || width == 0 || height == 0 {
            return Err(MapError::DimensionMismatch {
                width,
                height,
                cells: cells.len(),
            });
        }
        for (i, &code) in cells.iter().enumerate() {
            if !materials.contains(code) {
                return Err(MapError::UnknownMaterial {
                    code,
                    x: i % width,
                    y: i / width,
                });
            }
        }
        if !cells.iter().any(|&c| c == 0) {
            return Err(MapError::NoTraversableCells);
        }
        Ok(Self {
            id: id.into(),
            width,
            height,
            cell_size,
            cells,
        })
    }

    /// Map width in meters.
    pub fn width_m(&self) -> f64 {
        self.width as f64 * self.cell_size
    }

    /// Map height in meters.
    pub fn height_m(&self) -> f64 {
        self.height as f64 * self.cell_size
    }

    pub fn code_at(&self, ix: usize, iy: usize) -> u8 {
        self.cells[iy * self.width + ix]
    }

    pub fn in_bounds(&self, p: &Pose2) -> bool {
        p.x >= 0.0 && p.x <= self.width_m() && p.y >= 0.0 && p.y <= self.height_m()
    }

    /// Cell indices owning `p`. Boundaries belong to the cell whose index
    /// equals `floor(coord / cell_size)`; the extreme max edge clamps to the
    /// last cell so ownership is total.
    pub fn cell_of(&self, p: &Pose2) -> Result<(usize, usize), MapError> {
        if !self.in_bounds(p) {
            return Err(MapError::OutOfBounds {
                x: p.x,
                y: p.y,
                w: self.width_m(),
                h: self.height_m(),
            });
        }
        let ix = ((p.x / self.cell_size) as usize).min(self.width - 1);
        let iy = ((p.y / self.cell_size) as usize).min(self.height - 1);
        Ok((ix, iy))
    }

    /// Center of cell (ix, iy) in meters.
    pub fn cell_center(&self, ix: usize, iy: usize) -> Pose2 {
        Pose2::new(
            (ix as f64 + 0.5) * self.cell_size,
            (iy as f64 + 0.5) * self.cell_size,
        )
    }

    /// True iff the cell containing `p` is free air.
    pub fn is_traversable(&self, p: &Pose2) -> Result<bool, MapError> {
        let (ix, iy) = self.cell_of(p)?;
        Ok(self.code_at(ix, iy) == 0)
    }

    pub fn is_cell_traversable(&self, ix: usize, iy: usize) -> bool {
        ix < self.width && iy < self.height && self.code_at(ix, iy) == 0
    }

    /// Indices of all traversable cells, row-major order.
    pub fn traversable_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for iy in 0..self.height {
            for ix in 0..self.width {
                if self.code_at(ix, iy) == 0 {
                    out.push((ix, iy));
                }
            }
        }
        out
    }

    /// True iff the open segment a->b crosses only free-air cells.
    ///
    /// Uses incremental grid traversal; when the segment passes exactly
    /// through a lattice corner it steps diagonally, matching what a dense
    /// point-sampling of the segment would see.
    pub fn line_of_sight(&self, a: &Pose2, b: &Pose2) -> Result<bool, MapError> {
        let (mut ix, mut iy) = self.cell_of(a)?;
        let (bx, by) = self.cell_of(b)?;
        if self.code_at(ix, iy) != 0 || self.code_at(bx, by) != 0 {
            return Ok(false);
        }
        if (ix, iy) == (bx, by) {
            return Ok(true);
        }

        let dx = b.x - a.x;
        let dy = b.y - a.y;
        let len = dx.hypot(dy);
        let (ux, uy) = (dx / len, dy / len);
        let step_x: isize = if ux > 0.0 { 1 } else { -1 };
        let step_y: isize = if uy > 0.0 { 1 } else { -1 };
        // Parametric distance to the next x/y gridline crossing.
        let mut t_max_x = if ux == 0.0 {
            f64::INFINITY
        } else {
            let next = if ux > 0.0 {
                (ix as f64 + 1.0) * self.cell_size
            } else {
                ix as f64 * self.cell_size
            };
            (next - a.x) / ux
        };
        let mut t_max_y = if uy == 0.0 {
            f64::INFINITY
        } else {
            let next = if uy > 0.0 {
                (iy as f64 + 1.0) * self.cell_size
            } else {
                iy as f64 * self.cell_size
            };
            (next - a.y) / uy
        };
        let t_delta_x = if ux == 0.0 {
            f64::INFINITY
        } else {
            self.cell_size / ux.abs()
        };
        let t_delta_y = if uy == 0.0 {
            f64::INFINITY
        } else {
            self.cell_size / uy.abs()
        };

        loop {
            if t_max_x < t_max_y {
                if t_max_x > len {
                    return Ok(true);
                }
                ix = (ix as isize + step_x) as usize;
                t_max_x += t_delta_x;
            } else if t_max_y < t_max_x {
                if t_max_y > len {
                    return Ok(true);
                }
                iy = (iy as isize + step_y) as usize;
                t_max_y += t_delta_y;
            } else {
                // Exact corner crossing: step both axes at once.
                if t_max_x > len {
                    return Ok(true);
                }
                ix = (ix as isize + step_x) as usize;
                iy = (iy as isize + step_y) as usize;
                t_max_x += t_delta_x;
                t_max_y += t_delta_y;
            }
            if ix >= self.width || iy >= self.height {
                // Segment endpoints are in bounds, so running off the grid
                // can only happen via boundary arithmetic on the final cell.
                return Ok(true);
            }
            if self.code_at(ix, iy) != 0 {
                return Ok(false);
            }
            if (ix, iy) == (bx, by) {
                return Ok(true);
            }
        }
    }

    fn to_file(&self, materials: &MaterialTable) -> MapFile {
        let max_code = self.cells.iter().copied().max().unwrap_or(0);
        let (rows, cells) = if max_code <= 9 {
            let rows = (0..self.height)
                .map(|iy| {
                    (0..self.width)
                        .map(|ix| char::from(b'0' + self.code_at(ix, iy)))
                        .collect()
                })
                .collect();
            (Some(rows), None)
        } else {
            let grid = (0..self.height)
                .map(|iy| (0..self.width).map(|ix| self.code_at(ix, iy)).collect())
                .collect();
            (None, Some(grid))
        };
        MapFile {
            id: self.id.clone(),
            cell_size: self.cell_size,
            width: self.width,
            height: self.height,
            materials: materials.entries().to_vec(),
            rows,
            cells,
        }
    }
}

/// Serialize a map and its material table to the JSON map format.
pub fn save_map(map: &GridMap, materials: &MaterialTable, path: &Path) -> Result<(), MapError> {
    let file = map.to_file(materials);
    let json = serde_json::to_string_pretty(&file).expect("map serialization cannot fail");
    fs::write(path, json).map_err(|source| MapError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Load and validate a map file.
pub fn load_map(path: &Path) -> Result<(GridMap, MaterialTable), MapError> {
    let text = fs::read_to_string(path).map_err(|source| MapError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_map(&text, &path.display().to_string())
}

/// Parse the JSON map format from a string. `origin` names the source in
/// error messages.
pub fn parse_map(text: &str, origin: &str) -> Result<(GridMap, MaterialTable), MapError> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| MapError::Parse {
        path: origin.to_string(),
        detail: e.to_string(),
    })?;
    let materials = MaterialTable::new(file.materials)?;
    let cells = match (&file.rows, &file.cells) {
        (Some(rows), None) => {
            if rows.len() != file.height {
                return Err(MapError::Parse {
                    path: origin.to_string(),
                    detail: format!("expected {} rows, found {}", file.height, rows.len()),
                });
            }
            let mut cells = Vec::with_capacity(file.width * file.height);
            for (iy, row) in rows.iter().enumerate() {
                if row.chars().count() != file.width {
                    return Err(MapError::Parse {
                        path: origin.to_string(),
                        detail: format!(
                            "row {} has {} cells, expected {}",
                            iy,
                            row.chars().count(),
                            file.width
                        ),
                    });
                }
                for (ix, ch) in row.chars().enumerate() {
                    let code = ch.to_digit(10).ok_or_else(|| MapError::Parse {
                        path: origin.to_string(),
                        detail: format!("row {iy} col {ix}: '{ch}' is not a digit"),
                    })? as u8;
                    cells.push(code);
                }
            }
            cells
        }
        (None, Some(grid)) => {
            if grid.len() != file.height {
                return Err(MapError::Parse {
                    path: origin.to_string(),
                    detail: format!("expected {} cell rows, found {}", file.height, grid.len()),
                });
            }
            let mut cells = Vec::with_capacity(file.width * file.height);
            for (iy, row) in grid.iter().enumerate() {
                if row.len() != file.width {
                    return Err(MapError::Parse {
                        path: origin.to_string(),
                        detail: format!(
                            "cell row {} has {} entries, expected {}",
                            iy,
                            row.len(),
                            file.width
                        ),
                    });
                }
                cells.extend_from_slice(row);
            }
            cells
        }
        _ => {
            return Err(MapError::Parse {
                path: origin.to_string(),
                detail: "exactly one of `rows` or `cells` must be present".to_string(),
            })
        }
    };
    let map = GridMap::new(file.id, file.width, file.height, file.cell_size, cells, &materials)?;
    Ok((map, materials))
}

/// Controls for [`sample_pair`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Number of lattice circle centers along each axis (~100 total).
    pub lattice_side: usize,
    /// Max source distance from its lattice center, meters.
    pub source_radius: f64,
    /// Max listener distance from the source, meters.
    pub listener_radius: f64,
    /// Rejection-sampling retry budget per draw.
    pub max_retries: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            lattice_side: 10,
            source_radius: 20.0,
            listener_radius: 10.0,
            max_retries: 1000,
        }
    }
}

/// Evenly spaced circle-center lattice (snapped to cell centers) used to
/// spread source sampling across the whole map.
pub fn sampling_centers(map: &GridMap, side: usize) -> Vec<Pose2> {
    let mut centers = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            let p = Pose2::new(
                (i as f64 + 0.5) * map.width_m() / side as f64,
                (j as f64 + 0.5) * map.height_m() / side as f64,
            );
            let (ix, iy) = map.cell_of(&p).expect("lattice point in bounds");
            centers.push(map.cell_center(ix, iy));
        }
    }
    centers
}

/// Draw one (source, listener) pair of traversable cell centers.
///
/// The source lies within `source_radius` of a randomly chosen lattice
/// center; the listener lies within `listener_radius` of the source. Both
/// draws are rejection-sampled over traversable cells with a bounded retry
/// budget. On a map with a single traversable cell the pair degenerates to
/// (center, center); otherwise listener == source is rejected so the pair
/// distance is always positive.
pub fn sample_pair<R: Rng>(
    map: &GridMap,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<(Pose2, Pose2), MapError> {
    let traversable = map.traversable_cells();
    if traversable.is_empty() {
        return Err(MapError::NoTraversableCells);
    }
    if traversable.len() == 1 {
        let c = map.cell_center(traversable[0].0, traversable[0].1);
        return Ok((c, c));
    }

    let centers = sampling_centers(map, cfg.lattice_side);
    let circle = centers[rng.gen_range(0..centers.len())];

    let mut source = None;
    for _ in 0..cfg.max_retries {
        let (ix, iy) = traversable[rng.gen_range(0..traversable.len())];
        let p = map.cell_center(ix, iy);
        if p.distance(&circle) <= cfg.source_radius {
            source = Some((p, (ix, iy)));
            break;
        }
    }
    let (source, source_cell) =
        source.ok_or(MapError::SamplingExhausted { retries: cfg.max_retries })?;

    for _ in 0..cfg.max_retries {
        let (ix, iy) = traversable[rng.gen_range(0..traversable.len())];
        if (ix, iy) == source_cell {
            continue;
        }
        let p = map.cell_center(ix, iy);
        if p.distance(&source) <= cfg.listener_radius {
            return Ok((source, p));
        }
    }
    Err(MapError::SamplingExhausted { retries: cfg.max_retries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn air_table() -> MaterialTable {
        MaterialTable::new(vec![Material {
            code: 0,
            name: "air".into(),
            absorption: 0.0,
        }])
        .unwrap()
    }

    fn two_mat_table() -> MaterialTable {
        MaterialTable::new(vec![
            Material { code: 0, name: "air".into(), absorption: 0.0 },
            Material { code: 1, name: "drywall".into(), absorption: 0.3 },
        ])
        .unwrap()
    }

    #[test]
    fn load_all_air_3x3() {
        let json = r#"{
            "id": "tiny", "cell_size": 0.25, "width": 3, "height": 3,
            "materials": [{"code": 0, "name": "air", "absorption": 0.0}],
            "rows": ["000", "000", "000"]
        }"#;
        let (map, table) = parse_map(json, "inline").unwrap();
        assert_eq!(map.traversable_cells().len(), 9);
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn unknown_material_rejected() {
        let json = r#"{
            "id": "bad", "cell_size": 0.25, "width": 2, "height": 1,
            "materials": [{"code": 0, "name": "air", "absorption": 0.0}],
            "rows": ["07"]
        }"#;
        let err = parse_map(json, "inline").unwrap_err();
        assert!(matches!(err, MapError::UnknownMaterial { code: 7, .. }));
    }

    #[test]
    fn parse_error_reports_row() {
        let json = r#"{
            "id": "bad", "cell_size": 0.25, "width": 2, "height": 2,
            "materials": [{"code": 0, "name": "air", "absorption": 0.0}],
            "rows": ["00", "0x"]
        }"#;
        let err = parse_map(json, "inline").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1"), "got: {msg}");
    }

    #[test]
    fn all_wall_map_rejected() {
        let table = two_mat_table();
        let err = GridMap::new("solid", 2, 2, 0.25, vec![1, 1, 1, 1], &table).unwrap_err();
        assert!(matches!(err, MapError::NoTraversableCells));
    }

    #[test]
    fn traversability_air_and_wall() {
        let table = two_mat_table();
        let map = GridMap::new("m", 2, 1, 0.25, vec![0, 1], &table).unwrap();
        assert!(map.is_traversable(&map.cell_center(0, 0)).unwrap());
        assert!(!map.is_traversable(&map.cell_center(1, 0)).unwrap());
    }

    #[test]
    fn boundary_pose_owned_by_floor_cell() {
        let table = air_table();
        let map = GridMap::new("m", 4, 4, 0.25, vec![0; 16], &table).unwrap();
        // x = 0.25 sits exactly on the boundary between cells 0 and 1.
        assert_eq!(map.cell_of(&Pose2::new(0.25, 0.1)).unwrap(), (1, 0));
        // The extreme max edge clamps to the last cell.
        assert_eq!(map.cell_of(&Pose2::new(1.0, 1.0)).unwrap(), (3, 3));
        let err = map.cell_of(&Pose2::new(1.01, 0.0)).unwrap_err();
        assert!(matches!(err, MapError::OutOfBounds { .. }));
    }

    #[test]
    fn los_identity_and_wall() {
        let table = two_mat_table();
        // 3x3 with a solid middle row.
        let cells = vec![0, 0, 0, 1, 1, 1, 0, 0, 0];
        let map = GridMap::new("m", 3, 3, 0.25, cells, &table).unwrap();
        let a = map.cell_center(1, 0);
        let b = map.cell_center(1, 2);
        assert!(map.line_of_sight(&a, &a).unwrap());
        assert!(!map.line_of_sight(&a, &b).unwrap());
        let c = map.cell_center(0, 0);
        let d = map.cell_center(2, 0);
        assert!(map.line_of_sight(&c, &d).unwrap());
    }

    /// Dense point-sampling oracle for line_of_sight.
    fn los_supersampled(map: &GridMap, a: &Pose2, b: &Pose2) -> bool {
        let n = 20_000;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let p = Pose2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
            let (ix, iy) = map.cell_of(&p).unwrap();
            if map.code_at(ix, iy) != 0 {
                return false;
            }
        }
        true
    }

    #[test]
    fn los_matches_supersampling_on_corridor() {
        let table = two_mat_table();
        // Corridor: walls above and below a 1-cell-high free row.
        let mut cells = vec![1u8; 8 * 3];
        for ix in 0..8 {
            cells[8 + ix] = 0;
        }
        let map = GridMap::new("corr", 8, 3, 0.25, cells, &table).unwrap();
        let a = map.cell_center(0, 1);
        let b = map.cell_center(7, 1);
        assert!(map.line_of_sight(&a, &b).unwrap());
        assert_eq!(map.line_of_sight(&a, &b).unwrap(), los_supersampled(&map, &a, &b));
    }

    #[test]
    fn single_cell_pair_is_center() {
        let table = air_table();
        let map = GridMap::new("one", 1, 1, 0.25, vec![0], &table).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (s, l) = sample_pair(&map, &SamplingConfig::default(), &mut rng).unwrap();
        assert_eq!(s, l);
        assert_eq!(s, Pose2::new(0.125, 0.125));
    }

    #[test]
    fn sample_pair_deterministic_for_seed() {
        let table = air_table();
        let map = GridMap::new("open", 40, 20, 0.25, vec![0; 800], &table).unwrap();
        let cfg = SamplingConfig::default();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..32)
                .map(|_| sample_pair(&map, &cfg, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn sample_pair_respects_distance_and_navigability() {
        let table = two_mat_table();
        // Open map with a few wall cells scattered in.
        let mut cells = vec![0u8; 60 * 60];
        for i in (0..cells.len()).step_by(17) {
            cells[i] = 1;
        }
        cells[0] = 0;
        let map = GridMap::new("speckle", 60, 60, 0.25, cells, &table).unwrap();
        let cfg = SamplingConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let (s, l) = sample_pair(&map, &cfg, &mut rng).unwrap();
            assert!(map.is_traversable(&s).unwrap());
            assert!(map.is_traversable(&l).unwrap());
            let d = s.distance(&l);
            assert!(d > 0.0 && d <= cfg.listener_radius);
        }
    }

    proptest::proptest! {
        /// line_of_sight is symmetric in its endpoints.
        #[test]
        fn los_symmetric(ax in 0.01f64..1.99, ay in 0.01f64..0.99,
                         bx in 0.01f64..1.99, by in 0.01f64..0.99) {
            let table = two_mat_table();
            let mut cells = vec![0u8; 8 * 4];
            cells[8 + 3] = 1;
            cells[16 + 5] = 1;
            let map = GridMap::new("p", 8, 4, 0.25, cells, &table).unwrap();
            let a = Pose2::new(ax, ay);
            let b = Pose2::new(bx, by);
            proptest::prop_assert_eq!(
                map.line_of_sight(&a, &b).unwrap(),
                map.line_of_sight(&b, &a).unwrap()
            );
        }
    }
}
