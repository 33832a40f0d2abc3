//! Geometric 360-degree panorama at a pose — per-angular-bin range and
//! material absorption — plus feature-vector assembly for the predictors.
//!
//! The scan stands in for a visual observation: range and absorption per bin
//! carry the architectural-geometry and material signal a camera view would.
//! Bin `i` covers angles `[i, i+1) * 2pi / n_bins` counterclockwise from +x,
//! and its ray is cast at the bin center, `(i + 0.5) * 2pi / n_bins`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{GridMap, MaterialTable, Pose2};
use crate::raycast::{RayState, WalkEvent};

/// Default angular resolution of a panorama.
pub const DEFAULT_SCAN_BINS: usize = 64;
/// Range clip, meters; chosen beyond the 10 m listener cap so open space
/// saturates instead of aliasing.
pub const MAX_SCAN_RANGE: f64 = 12.0;
/// Distances are normalized by the 10 m listener sampling radius.
pub const MAX_PAIR_DISTANCE: f64 = 10.0;

#[derive(Debug, Error)]
pub enum SensingError {
    #[error("scan origin ({x}, {y}) is not traversable")]
    OriginNotTraversable { x: f64, y: f64 },
    #[error("distance {0} outside (0, 10] m")]
    DistanceOutOfRange(f64),
    #[error("unknown feature layout '{0}'")]
    UnknownLayout(String),
    #[error("ego window needs n_bins divisible by 4, got {0}")]
    BadBinCount(usize),
    #[error(transparent)]
    Map(#[from] crate::gridmap::MapError),
}

/// 360-degree range/absorption scan at a pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanoramaScan {
    pub n_bins: usize,
    pub max_range: f64,
    /// Distance to the first obstacle per bin, clipped to `max_range`.
    pub ranges: Vec<f64>,
    /// Absorption of the hit material per bin; 0 when nothing is hit.
    pub absorptions: Vec<f64>,
    pub origin: Pose2,
    /// Angle of the start of bin 0, radians; fixed at 0 (+x axis).
    pub bin0_angle: f64,
}

impl PanoramaScan {
    /// Center angle of bin `i`.
    pub fn bin_angle(&self, i: usize) -> f64 {
        self.bin0_angle + (i as f64 + 0.5) * std::f64::consts::TAU / self.n_bins as f64
    }
}

/// Which features a vector carries; must match the consuming model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureLayout {
    /// `[r, theta]` only.
    DirDist,
    /// `[r, theta]` plus all scan bins: `2 + 2 * n_bins` values.
    Pano,
    /// `[r, theta]` plus the quarter of the scan facing the listener.
    Ego,
}

impl FeatureLayout {
    pub fn parse(tag: &str) -> Result<Self, SensingError> {
        match tag {
            "dirdist" => Ok(Self::DirDist),
            "pano" => Ok(Self::Pano),
            "ego" => Ok(Self::Ego),
            other => Err(SensingError::UnknownLayout(other.to_string())),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::DirDist => "dirdist",
            Self::Pano => "pano",
            Self::Ego => "ego",
        }
    }

    /// Feature count for a scan with `n_bins` bins.
    pub fn len(&self, n_bins: usize) -> usize {
        match self {
            Self::DirDist => 2,
            Self::Pano => 2 + 2 * n_bins,
            Self::Ego => 2 + 2 * (n_bins / 4),
        }
    }
}

/// Normalized model input, all values in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub layout: FeatureLayout,
    pub values: Vec<f64>,
}

/// Cast one ray per bin and record first-hit range and material absorption.
pub fn scan_panorama(
    map: &GridMap,
    materials: &MaterialTable,
    origin: &Pose2,
    n_bins: usize,
) -> Result<PanoramaScan, SensingError> {
    if !map.is_traversable(origin)? {
        return Err(SensingError::OriginNotTraversable { x: origin.x, y: origin.y });
    }
    let (ix, iy) = map.cell_of(origin)?;
    let mut ranges = Vec::with_capacity(n_bins);
    let mut absorptions = Vec::with_capacity(n_bins);
    for i in 0..n_bins {
        let angle = (i as f64 + 0.5) * std::f64::consts::TAU / n_bins as f64;
        let mut ray = RayState {
            x: origin.x,
            y: origin.y,
            ux: angle.cos(),
            uy: angle.sin(),
            ix: ix as isize,
            iy: iy as isize,
        };
        let (dist, event) = ray.walk(map, materials);
        match event {
            WalkEvent::Hit { absorption, .. } if dist <= MAX_SCAN_RANGE => {
                ranges.push(dist);
                absorptions.push(absorption);
            }
            _ => {
                ranges.push(MAX_SCAN_RANGE);
                absorptions.push(0.0);
            }
        }
    }
    Ok(PanoramaScan {
        n_bins,
        max_range: MAX_SCAN_RANGE,
        ranges,
        absorptions,
        origin: *origin,
        bin0_angle: 0.0,
    })
}

/// Indices of the `n_bins / 4` consecutive scan bins (cyclic) whose centers
/// lie within the 90-degree window facing `theta`.
pub fn ego_window(n_bins: usize, theta: f64) -> Result<Vec<usize>, SensingError> {
    if n_bins % 4 != 0 {
        return Err(SensingError::BadBinCount(n_bins));
    }
    let quarter = n_bins / 4;
    let tau = std::f64::consts::TAU;
    let delta = tau / n_bins as f64;
    // First bin whose center angle (i + 0.5) * delta reaches theta - 45deg;
    // the quarter window then covers centers in [theta - 45deg, theta + 45deg).
    let start_f = ((theta - tau / 8.0) / delta - 0.5).ceil();
    let start = (start_f as i64).rem_euclid(n_bins as i64) as usize;
    Ok((0..quarter).map(|k| (start + k) % n_bins).collect())
}

/// Assemble the normalized model input from a scan and the listener's polar
/// coordinates in the scan frame.
pub fn build_features(
    scan: &PanoramaScan,
    r: f64,
    theta: f64,
    layout: FeatureLayout,
) -> Result<FeatureVector, SensingError> {
    if !(r > 0.0 && r <= MAX_PAIR_DISTANCE) || !r.is_finite() {
        return Err(SensingError::DistanceOutOfRange(r));
    }
    let tau = std::f64::consts::TAU;
    let theta = theta.rem_euclid(tau);
    let mut values = vec![r / MAX_PAIR_DISTANCE, theta / tau];
    match layout {
        FeatureLayout::DirDist => {}
        FeatureLayout::Pano => {
            values.extend(scan.ranges.iter().map(|d| d / scan.max_range));
            values.extend_from_slice(&scan.absorptions);
        }
        FeatureLayout::Ego => {
            let window = ego_window(scan.n_bins, theta)?;
            values.extend(window.iter().map(|&i| scan.ranges[i] / scan.max_range));
            values.extend(window.iter().map(|&i| scan.absorptions[i]));
        }
    }
    Ok(FeatureVector { layout, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{GridMap, Material, MaterialTable};

    fn table(absorption: f64) -> MaterialTable {
        MaterialTable::new(vec![
            Material { code: 0, name: "air".into(), absorption: 0.0 },
            Material { code: 1, name: "wall".into(), absorption },
        ])
        .unwrap()
    }

    #[test]
    fn open_map_saturates_every_bin() {
        let t = table(0.3);
        let map = GridMap::new("open", 32, 32, 0.25, vec![0; 32 * 32], &t).unwrap();
        let scan = scan_panorama(&map, &t, &map.cell_center(16, 16), 64).unwrap();
        assert!(scan.ranges.iter().all(|&d| d == MAX_SCAN_RANGE));
        assert!(scan.absorptions.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn circular_room_ranges_match_radius() {
        let t = table(0.3);
        let n = 48;
        let center = Pose2::new(n as f64 * 0.25 / 2.0, n as f64 * 0.25 / 2.0);
        let cells: Vec<u8> = (0..n * n)
            .map(|i| {
                let c = Pose2::new(
                    ((i % n) as f64 + 0.5) * 0.25,
                    ((i / n) as f64 + 0.5) * 0.25,
                );
                if c.distance(&center) >= 3.0 {
                    1
                } else {
                    0
                }
            })
            .collect();
        let map = GridMap::new("disc", n, n, 0.25, cells, &t).unwrap();
        let (cx, cy) = map.cell_of(&center).unwrap();
        let origin = map.cell_center(cx, cy);
        let scan = scan_panorama(&map, &t, &origin, 64).unwrap();
        for (i, &d) in scan.ranges.iter().enumerate() {
            assert!((d - 3.0).abs() < 0.45, "bin {i}: range {d}");
            assert_eq!(scan.absorptions[i], 0.3);
        }
    }

    #[test]
    fn corridor_scan_is_bimodal() {
        let t = table(0.3);
        // 1 m wide corridor along x, 12 m long.
        let (w, h) = (48usize, 12usize);
        let mut cells = vec![1u8; w * h];
        for iy in 4..8 {
            for ix in 0..w {
                cells[iy * w + ix] = 0;
            }
        }
        let map = GridMap::new("corr", w, h, 0.25, cells, &t).unwrap();
        let scan = scan_panorama(&map, &t, &map.cell_center(24, 6), 64).unwrap();
        // Bin centers nearest the axis vs nearest the cross direction.
        let axis = scan.ranges[0].min(scan.ranges[31]);
        let cross = scan.ranges[15].max(scan.ranges[47]);
        assert!(axis > 2.0 * cross, "axis {axis} cross {cross}");
    }

    #[test]
    fn dirdist_feature_anchors() {
        let t = table(0.3);
        let map = GridMap::new("m", 8, 8, 0.25, vec![0; 64], &t).unwrap();
        let scan = scan_panorama(&map, &t, &map.cell_center(4, 4), 64).unwrap();
        let f = build_features(&scan, 10.0, 0.0, FeatureLayout::DirDist).unwrap();
        assert_eq!(f.values, vec![1.0, 0.0]);
        let f = build_features(&scan, 5.0, std::f64::consts::PI, FeatureLayout::DirDist).unwrap();
        assert_eq!(f.values, vec![0.5, 0.5]);
        assert!(build_features(&scan, 0.0, 0.0, FeatureLayout::DirDist).is_err());
        assert!(build_features(&scan, 10.5, 0.0, FeatureLayout::DirDist).is_err());
    }

    #[test]
    fn pano_layout_length() {
        let t = table(0.3);
        let map = GridMap::new("m", 8, 8, 0.25, vec![0; 64], &t).unwrap();
        let scan = scan_panorama(&map, &t, &map.cell_center(4, 4), 64).unwrap();
        let f = build_features(&scan, 1.0, 0.0, FeatureLayout::Pano).unwrap();
        assert_eq!(f.values.len(), 130);
        let f = build_features(&scan, 1.0, 0.0, FeatureLayout::Ego).unwrap();
        assert_eq!(f.values.len(), 34);
    }

    #[test]
    fn ego_window_is_contiguous_quarter() {
        let w = ego_window(64, 0.0).unwrap();
        assert_eq!(w.len(), 16);
        assert_eq!(w[0], 56);
        assert_eq!(w[15], 7);
        for pair in w.windows(2) {
            assert_eq!((pair[0] + 1) % 64, pair[1]);
        }
        // Every window bin center lies within 45 degrees of theta.
        let tau = std::f64::consts::TAU;
        for &theta in &[0.0, 0.4, 1.9, 3.14, 5.5] {
            for &i in ego_window(64, theta).unwrap().iter() {
                let center = (i as f64 + 0.5) * tau / 64.0;
                let mut diff = (center - theta).rem_euclid(tau);
                if diff > tau / 2.0 {
                    diff -= tau;
                }
                assert!(diff.abs() <= tau / 8.0 + 1e-12, "theta {theta} bin {i}");
            }
        }
    }

    /// Rotate a map 90 degrees counterclockwise: old cell (a, b) lands at
    /// (h - 1 - b, a) in the rotated grid.
    fn rotate_ccw(map: &GridMap, t: &MaterialTable) -> GridMap {
        let (w, h) = (map.width, map.height);
        let mut cells = vec![0u8; w * h];
        for b in 0..h {
            for a in 0..w {
                let code = map.code_at(a, b);
                let (nx, ny) = (h - 1 - b, a);
                cells[ny * h + nx] = code;
            }
        }
        GridMap::new("rot", h, w, map.cell_size, cells, t).unwrap()
    }

    #[test]
    fn rotation_shifts_scan_by_quarter() {
        let t = table(0.4);
        let (w, h) = (24usize, 16usize);
        let mut cells = vec![0u8; w * h];
        for ix in 0..w {
            cells[ix] = 1;
            cells[(h - 1) * w + ix] = 1;
        }
        for iy in 0..h {
            cells[iy * w] = 1;
            cells[iy * w + w - 1] = 1;
        }
        cells[5 * w + 8] = 1;
        cells[9 * w + 15] = 1;
        let map = GridMap::new("room", w, h, 0.25, cells, &t).unwrap();
        let rotated = rotate_ccw(&map, &t);

        let origin = map.cell_center(10, 6);
        let rot_origin = rotated.cell_center(h - 1 - 6, 10);
        let scan = scan_panorama(&map, &t, &origin, 64).unwrap();
        let rot_scan = scan_panorama(&rotated, &t, &rot_origin, 64).unwrap();
        for i in 0..64 {
            let j = (i + 16) % 64;
            assert!(
                (scan.ranges[i] - rot_scan.ranges[j]).abs() < 1e-9,
                "bin {i}: {} vs {}",
                scan.ranges[i],
                rot_scan.ranges[j]
            );
            assert_eq!(scan.absorptions[i], rot_scan.absorptions[j]);
        }
    }

    proptest::proptest! {
        #[test]
        fn features_stay_in_unit_range(r in 0.01f64..10.0, theta in 0.0f64..6.28) {
            let t = table(0.6);
            let mut cells = vec![0u8; 16 * 16];
            cells[3 * 16 + 7] = 1;
            cells[12 * 16 + 2] = 1;
            let map = GridMap::new("m", 16, 16, 0.25, cells, &t).unwrap();
            let scan = scan_panorama(&map, &t, &map.cell_center(8, 8), 64).unwrap();
            for layout in [FeatureLayout::DirDist, FeatureLayout::Pano, FeatureLayout::Ego] {
                let f = build_features(&scan, r, theta, layout).unwrap();
                proptest::prop_assert_eq!(f.values.len(), layout.len(64));
                for &v in &f.values {
                    proptest::prop_assert!((0.0..=1.0).contains(&v) && v.is_finite());
                }
            }
        }
    }
}
