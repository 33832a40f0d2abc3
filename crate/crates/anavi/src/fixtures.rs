//! Bundled benchmark maps: a free field, a single wall, two rooms joined by
//! door gaps, a corridor, a cross intersection, and apartment layouts, plus
//! size/material variants that form the default train/val/test split.
//!
//! All builders are deterministic; `anavi gen-maps` serializes them to disk.
//! Each map ships with a material table pruned to the codes it actually
//! uses.

use crate::gridmap::{GridMap, Material, MaterialTable};

/// Full material palette the fixtures draw from. Code 0 is always air.
pub fn palette() -> Vec<Material> {
    vec![
        Material { code: 0, name: "air".into(), absorption: 0.0 },
        Material { code: 1, name: "brick".into(), absorption: 0.1 },
        Material { code: 2, name: "drywall".into(), absorption: 0.3 },
        Material { code: 3, name: "wood".into(), absorption: 0.2 },
        Material { code: 4, name: "carpet".into(), absorption: 0.6 },
        Material { code: 5, name: "curtain".into(), absorption: 0.75 },
        Material { code: 6, name: "foam".into(), absorption: 0.9 },
        Material { code: 7, name: "glass".into(), absorption: 0.05 },
    ]
}

/// Mutable cell canvas with the drawing helpers the builders need.
struct Canvas {
    w: usize,
    h: usize,
    cells: Vec<u8>,
}

impl Canvas {
    fn open(w: usize, h: usize) -> Self {
        Self { w, h, cells: vec![0; w * h] }
    }

    fn set(&mut self, ix: usize, iy: usize, code: u8) {
        self.cells[iy * self.w + ix] = code;
    }

    fn rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, code: u8) {
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                self.set(ix, iy, code);
            }
        }
    }

    fn perimeter(&mut self, code: u8) {
        self.rect(0, 0, self.w - 1, 0, code);
        self.rect(0, self.h - 1, self.w - 1, self.h - 1, code);
        self.rect(0, 0, 0, self.h - 1, code);
        self.rect(self.w - 1, 0, self.w - 1, self.h - 1, code);
    }

    fn vline(&mut self, ix: usize, y0: usize, y1: usize, code: u8) {
        self.rect(ix, y0, ix, y1, code);
    }

    fn hline(&mut self, iy: usize, x0: usize, x1: usize, code: u8) {
        self.rect(x0, iy, x1, iy, code);
    }

    /// Finish: prune the palette to used codes and validate.
    fn build(self, id: &str) -> (GridMap, MaterialTable) {
        let mut used = [false; 256];
        for &c in &self.cells {
            used[c as usize] = true;
        }
        used[0] = true;
        let materials = MaterialTable::new(
            palette().into_iter().filter(|m| used[m.code as usize]).collect(),
        )
        .expect("palette is valid");
        let map = GridMap::new(id, self.w, self.h, 0.25, self.cells, &materials)
            .expect("fixture construction is static and always valid");
        (map, materials)
    }
}

/// 24 m x 24 m of open air: nothing reflects, rays leave the map.
pub fn free_field() -> (GridMap, MaterialTable) {
    Canvas::open(96, 96).build("freefield")
}

/// Open area with a free-standing wall segment between two halves.
pub fn single_wall(id: &str, code: u8, gap: bool) -> (GridMap, MaterialTable) {
    let mut c = Canvas::open(48, 32);
    c.vline(24, 4, 27, code);
    if gap {
        c.set(24, 14, 0);
        c.set(24, 15, 0);
    }
    c.build(id)
}

/// Two 5 m x 4.5 m rooms joined by door gaps in a dividing wall.
///
/// `door_a` is the low door on the direct route; `door_b`, when present,
/// opens a detour behind the separator. Door positions are inclusive cell
/// rows in the divider column.
pub fn two_room(
    id: &str,
    code: u8,
    door_a: (usize, usize),
    door_b: Option<(usize, usize)>,
) -> (GridMap, MaterialTable) {
    let mut c = Canvas::open(40, 20);
    c.perimeter(code);
    c.vline(20, 1, 18, code);
    for iy in door_a.0..=door_a.1 {
        c.set(20, iy, 0);
    }
    if let Some((y0, y1)) = door_b {
        for iy in y0..=y1 {
            c.set(20, iy, 0);
        }
    }
    c.build(id)
}

/// Walled corridor, echoey by construction.
pub fn corridor(id: &str, length: usize, free_width: usize, code: u8) -> (GridMap, MaterialTable) {
    let h = free_width + 2;
    let mut c = Canvas::open(length, h);
    c.perimeter(code);
    c.build(id)
}

/// Two corridors crossing in the middle of a solid block.
pub fn cross_intersection(id: &str, code: u8, arm_width: usize) -> (GridMap, MaterialTable) {
    let n = 40;
    let mut c = Canvas::open(n, n);
    c.rect(0, 0, n - 1, n - 1, code);
    let lo = (n - arm_width) / 2;
    let hi = lo + arm_width - 1;
    c.rect(1, lo, n - 2, hi, 0);
    c.rect(lo, 1, hi, n - 2, 0);
    c.build(id)
}

/// Apartment layouts: brick perimeter, interior walls with doors, and a few
/// furniture blocks in varied materials. `variant` selects one of four
/// hand-placed arrangements; all free space stays connected.
pub fn apartment(id: &str, variant: u8) -> (GridMap, MaterialTable) {
    let mut c = Canvas::open(48, 32);
    c.perimeter(1);
    match variant % 4 {
        0 => {
            // Hallway along the south edge, three rooms above it.
            c.hline(8, 1, 46, 2);
            c.set(8, 8, 0);
            c.set(9, 8, 0);
            c.set(28, 8, 0);
            c.set(29, 8, 0);
            c.vline(16, 9, 30, 2);
            c.set(16, 18, 0);
            c.set(16, 19, 0);
            c.vline(32, 9, 30, 2);
            c.set(32, 24, 0);
            c.set(32, 25, 0);
            c.rect(4, 24, 6, 26, 4);
            c.rect(36, 26, 38, 28, 3);
            c.rect(44, 10, 45, 11, 5);
        }
        1 => {
            // Central vertical divider, annex wall east of it.
            c.vline(24, 1, 30, 2);
            c.set(24, 6, 0);
            c.set(24, 7, 0);
            c.set(24, 22, 0);
            c.set(24, 23, 0);
            c.hline(16, 25, 46, 3);
            c.set(34, 16, 0);
            c.set(35, 16, 0);
            c.rect(10, 20, 12, 22, 3);
            c.rect(30, 4, 33, 6, 4);
            c.rect(2, 2, 3, 8, 7);
        }
        2 => {
            // L-shaped partition with soft furnishings.
            c.hline(20, 1, 30, 2);
            c.set(12, 20, 0);
            c.set(13, 20, 0);
            c.vline(30, 1, 20, 2);
            c.set(30, 8, 0);
            c.set(30, 9, 0);
            c.rect(36, 24, 40, 27, 6);
            c.rect(20, 26, 22, 28, 5);
            c.rect(6, 4, 8, 6, 3);
        }
        _ => {
            // Four rooms around an inner junction.
            c.vline(16, 1, 30, 3);
            c.set(16, 10, 0);
            c.set(16, 11, 0);
            c.vline(32, 1, 30, 2);
            c.set(32, 20, 0);
            c.set(32, 21, 0);
            c.hline(16, 17, 31, 2);
            c.set(23, 16, 0);
            c.set(24, 16, 0);
            c.rect(4, 4, 8, 6, 4);
            c.rect(40, 8, 43, 10, 6);
        }
    }
    c.build(id)
}

/// The canonical six fixture kinds by id.
pub fn canonical(id: &str) -> Option<(GridMap, MaterialTable)> {
    match id {
        "freefield" => Some(free_field()),
        "singlewall" => Some(single_wall("singlewall", 2, false)),
        "tworoom" => Some(two_room("tworoom", 2, (4, 5), Some((14, 15)))),
        "corridor" => Some(corridor("corridor", 48, 8, 1)),
        "cross" => Some(cross_intersection("cross", 1, 6)),
        "apartment" => Some(apartment("apartment", 0)),
        _ => None,
    }
}

/// The default desk-scale benchmark: 10 train, 2 val, 3 test maps.
pub struct FixtureSet {
    pub train: Vec<(GridMap, MaterialTable)>,
    pub val: Vec<(GridMap, MaterialTable)>,
    pub test: Vec<(GridMap, MaterialTable)>,
}

pub fn default_split() -> FixtureSet {
    FixtureSet {
        train: vec![
            free_field(),
            single_wall("singlewall", 2, false),
            two_room("tworoom", 2, (4, 5), Some((14, 15))),
            corridor("corridor", 48, 8, 1),
            cross_intersection("cross", 1, 6),
            apartment("apartment", 0),
            single_wall("singlewall_b", 6, true),
            two_room("tworoom_b", 1, (9, 10), Some((16, 17))),
            corridor("corridor_b", 40, 4, 2),
            apartment("apartment_b", 1),
        ],
        val: vec![cross_intersection("cross_b", 2, 4), apartment("apartment_c", 2)],
        test: vec![
            two_room("tworoom_c", 3, (3, 4), Some((12, 13))),
            corridor("corridor_c", 48, 6, 3),
            apartment("apartment_d", 3),
        ],
    }
}

/// Every bundled map, in split order.
pub fn all_maps() -> Vec<(GridMap, MaterialTable)> {
    let s = default_split();
    s.train.into_iter().chain(s.val).chain(s.test).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_tworoom_shape() {
        let (map, table) = canonical("tworoom").unwrap();
        assert_eq!((map.width, map.height), (40, 20));
        assert_eq!(table.len(), 2);
    }

    #[test]
    fn split_sizes_and_unique_ids() {
        let s = default_split();
        assert_eq!(s.train.len(), 10);
        assert_eq!(s.val.len(), 2);
        assert_eq!(s.test.len(), 3);
        let mut ids: Vec<String> = all_maps().iter().map(|(m, _)| m.id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 15);
    }

    /// Free space of every fixture is one connected component, so planning
    /// and sampling behave the same anywhere on the map.
    #[test]
    fn free_space_is_connected() {
        for (map, _) in all_maps() {
            let cells = map.traversable_cells();
            let mut seen = vec![false; map.width * map.height];
            let start = cells[0];
            let mut stack = vec![start];
            seen[start.1 * map.width + start.0] = true;
            let mut count = 0usize;
            while let Some((ix, iy)) = stack.pop() {
                count += 1;
                let neighbors = [
                    (ix.wrapping_sub(1), iy),
                    (ix + 1, iy),
                    (ix, iy.wrapping_sub(1)),
                    (ix, iy + 1),
                ];
                for (nx, ny) in neighbors {
                    if nx < map.width
                        && ny < map.height
                        && !seen[ny * map.width + nx]
                        && map.is_cell_traversable(nx, ny)
                    {
                        seen[ny * map.width + nx] = true;
                        stack.push((nx, ny));
                    }
                }
            }
            assert_eq!(count, cells.len(), "map {} free space is disconnected", map.id);
        }
    }

    #[test]
    fn round_trip_through_map_files() {
        let dir = tempfile::tempdir().unwrap();
        for (map, table) in all_maps() {
            let path = dir.path().join(format!("{}.json", map.id));
            crate::gridmap::save_map(&map, &table, &path).unwrap();
            let (loaded, loaded_table) = crate::gridmap::load_map(&path).unwrap();
            assert_eq!(loaded, map);
            assert_eq!(loaded_table, table);
        }
    }
}
