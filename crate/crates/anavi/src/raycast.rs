//! Incremental grid traversal shared by the impulse tracer and the panorama
//! scanner.

use crate::gridmap::{GridMap, MaterialTable};

/// One ray-walk event: either the ray leaves the grid or reaches a solid
/// cell face.
pub(crate) enum WalkEvent {
    Exit,
    Hit {
        flip_x: bool,
        flip_y: bool,
        absorption: f64,
    },
}

/// Traversal state for one ray. Cell indices are tracked explicitly so
/// reflection points sitting exactly on cell faces never get misattributed
/// to the solid side of the face.
pub(crate) struct RayState {
    pub x: f64,
    pub y: f64,
    pub ux: f64,
    pub uy: f64,
    pub ix: isize,
    pub iy: isize,
}

impl RayState {
    /// Advance through free cells until the next wall or the map edge.
    /// Returns the distance traveled and the event; `self` is left at the
    /// event point, still inside the last free cell.
    pub(crate) fn walk(&mut self, map: &GridMap, materials: &MaterialTable) -> (f64, WalkEvent) {
        let cs = map.cell_size;
        let step_x: isize = if self.ux > 0.0 { 1 } else { -1 };
        let step_y: isize = if self.uy > 0.0 { 1 } else { -1 };
        let mut t_max_x = if self.ux == 0.0 {
            f64::INFINITY
        } else {
            let next = if self.ux > 0.0 {
                (self.ix + 1) as f64 * cs
            } else {
                self.ix as f64 * cs
            };
            (next - self.x) / self.ux
        };
        let mut t_max_y = if self.uy == 0.0 {
            f64::INFINITY
        } else {
            let next = if self.uy > 0.0 {
                (self.iy + 1) as f64 * cs
            } else {
                self.iy as f64 * cs
            };
            (next - self.y) / self.uy
        };
        let t_delta_x = if self.ux == 0.0 { f64::INFINITY } else { cs / self.ux.abs() };
        let t_delta_y = if self.uy == 0.0 { f64::INFINITY } else { cs / self.uy.abs() };

        let solid = |ix: isize, iy: isize| -> Option<f64> {
            if ix < 0 || iy < 0 || ix >= map.width as isize || iy >= map.height as isize {
                return None;
            }
            let code = map.code_at(ix as usize, iy as usize);
            if code == 0 {
                None
            } else {
                Some(materials.absorption(code).unwrap_or(1.0))
            }
        };
        let inside = |ix: isize, iy: isize| {
            ix >= 0 && iy >= 0 && ix < map.width as isize && iy < map.height as isize
        };

        loop {
            let (t, cross_x, cross_y) = if t_max_x < t_max_y {
                (t_max_x, true, false)
            } else if t_max_y < t_max_x {
                (t_max_y, false, true)
            } else {
                (t_max_x, true, true)
            };

            if cross_x && cross_y {
                // Exact corner crossing. Reflect off whichever orthogonal
                // neighbors are solid; a bare solid diagonal retro-reflects.
                let nx = solid(self.ix + step_x, self.iy);
                let ny = solid(self.ix, self.iy + step_y);
                let nd = solid(self.ix + step_x, self.iy + step_y);
                if nx.is_some() || ny.is_some() {
                    self.advance(t);
                    let a = nx.unwrap_or(0.0).max(ny.unwrap_or(0.0));
                    return (
                        t,
                        WalkEvent::Hit {
                            flip_x: nx.is_some(),
                            flip_y: ny.is_some(),
                            absorption: a,
                        },
                    );
                }
                if let Some(a) = nd {
                    self.advance(t);
                    return (t, WalkEvent::Hit { flip_x: true, flip_y: true, absorption: a });
                }
                if !inside(self.ix + step_x, self.iy + step_y) {
                    self.advance(t);
                    return (t, WalkEvent::Exit);
                }
                self.ix += step_x;
                self.iy += step_y;
                t_max_x += t_delta_x;
                t_max_y += t_delta_y;
            } else if cross_x {
                if let Some(a) = solid(self.ix + step_x, self.iy) {
                    self.advance(t);
                    return (t, WalkEvent::Hit { flip_x: true, flip_y: false, absorption: a });
                }
                if !inside(self.ix + step_x, self.iy) {
                    self.advance(t);
                    return (t, WalkEvent::Exit);
                }
                self.ix += step_x;
                t_max_x += t_delta_x;
            } else {
                if let Some(a) = solid(self.ix, self.iy + step_y) {
                    self.advance(t);
                    return (t, WalkEvent::Hit { flip_x: false, flip_y: true, absorption: a });
                }
                if !inside(self.ix, self.iy + step_y) {
                    self.advance(t);
                    return (t, WalkEvent::Exit);
                }
                self.iy += step_y;
                t_max_y += t_delta_y;
            }
        }
    }

    fn advance(&mut self, t: f64) {
        self.x += self.ux * t;
        self.y += self.uy * t;
    }
}
