//! Noise-aware path planning: A* over the grid with discrete action
//! profiles, trading travel time against predicted noise exposure at
//! listeners.
//!
//! Each edge is taken with one of the configured actions (slow/normal/fast
//! profiles with a speed and a source loudness). The edge cost is
//!
//! ```text
//! dt + lambda * noise * dt      where noise = sum_j w_j * max(0, dB_j - threshold_j)
//! ```
//!
//! so noise exposure accrues per unit time spent, and listeners below their
//! comfort threshold cost nothing. Predicted dB at a cell comes from the
//! loudness model (panorama scan at the cell, listener polar coordinates,
//! action source level); listeners beyond the 10 m model support contribute
//! zero rather than extrapolating.

use std::collections::{BinaryHeap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustics::{histogram_to_label, scale_action_db, trace_impulse, AcousticConfig};
use crate::gridmap::{GridMap, MaterialTable, Pose2};
use crate::predictor::PredictorModel;
use crate::sensing::{build_features, scan_panorama, PanoramaScan, DEFAULT_SCAN_BINS, MAX_PAIR_DISTANCE};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("{who} pose ({x}, {y}) is not traversable")]
    NotTraversable { who: &'static str, x: f64, y: f64 },
    #[error("no path from start to goal")]
    NoPath,
    #[error("cells ({0}, {1}) and ({2}, {3}) are not adjacent")]
    NonAdjacent(usize, usize, usize, usize),
    #[error("at least one action profile is required")]
    EmptyActions,
    #[error("lambda must be non-negative, got {0}")]
    NegativeLambda(f64),
    #[error(transparent)]
    Map(#[from] crate::gridmap::MapError),
    #[error(transparent)]
    Sensing(#[from] crate::sensing::SensingError),
    #[error(transparent)]
    Predictor(#[from] crate::predictor::PredictorError),
    #[error(transparent)]
    Acoustics(#[from] crate::acoustics::AcousticsError),
}

/// A discrete motion profile: how fast the robot moves and how loud it is at
/// the source while doing so.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionProfile {
    pub name: String,
    /// Meters per second.
    pub speed: f64,
    /// Loudness of this action at the robot, dB.
    pub source_db: f64,
}

/// Default action set: a quiet crawl, a wheeled robot's fast drive, and a
/// quadruped's running gait.
pub fn default_actions() -> Vec<ActionProfile> {
    vec![
        ActionProfile { name: "slow".into(), speed: 0.25, source_db: 60.0 },
        ActionProfile { name: "fast".into(), speed: 1.0, source_db: 76.0 },
        ActionProfile { name: "run".into(), speed: 1.5, source_db: 98.0 },
    ]
}

/// A noise-sensitive party: position, sensitivity weight, and the level
/// below which noise does not bother them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Listener {
    pub pose: Pose2,
    pub weight: f64,
    pub threshold_db: f64,
}

/// Everything one planning query needs.
pub struct PlanProblem<'a> {
    pub map: &'a GridMap,
    pub materials: &'a MaterialTable,
    pub model: &'a PredictorModel,
    pub start: Pose2,
    pub goal: Pose2,
    pub listeners: Vec<Listener>,
    pub actions: Vec<ActionProfile>,
    pub lambda: f64,
}

/// One committed move: the cell entered and the action used to enter it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub cell: (usize, usize),
    pub action: String,
}

/// A complete plan. `steps` excludes the start cell; start == goal yields an
/// empty step list with zero cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub start_cell: (usize, usize),
    pub steps: Vec<PlanStep>,
    /// Seconds.
    pub total_time: f64,
    /// Accumulated weighted hinge-dB exposure (noise * dt summed over steps),
    /// before the lambda weighting.
    pub total_noise_cost: f64,
    /// total_time + lambda * total_noise_cost.
    pub total_cost: f64,
    /// Predicted dB per listener per step.
    pub per_listener_trace: Vec<Vec<f64>>,
}

impl Plan {
    /// Cell sequence including the start.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        std::iter::once(self.start_cell)
            .chain(self.steps.iter().map(|s| s.cell))
            .collect()
    }

    pub fn visits(&self, cell: (usize, usize)) -> bool {
        self.cells().contains(&cell)
    }
}

/// Predicted dB per listener for the robot standing at `cell` performing
/// `action`. Listeners beyond the 10 m support hear 0.
pub fn node_noise(
    problem: &PlanProblem,
    cell: (usize, usize),
    action: &ActionProfile,
) -> Result<Vec<f64>, PlanError> {
    let mut oracle = NoiseOracle::new(problem);
    let action_index = problem
        .actions
        .iter()
        .position(|a| a == action)
        .unwrap_or(usize::MAX);
    oracle.listener_dbs(cell, action, action_index)
}

/// Memoizes panorama scans and per-(cell, action) noise within one query.
struct NoiseOracle<'a, 'p> {
    problem: &'a PlanProblem<'p>,
    scans: HashMap<(usize, usize), PanoramaScan>,
    noise: HashMap<((usize, usize), usize), (f64, Vec<f64>)>,
}

impl<'a, 'p> NoiseOracle<'a, 'p> {
    fn new(problem: &'a PlanProblem<'p>) -> Self {
        Self { problem, scans: HashMap::new(), noise: HashMap::new() }
    }

    fn listener_dbs(
        &mut self,
        cell: (usize, usize),
        action: &ActionProfile,
        action_index: usize,
    ) -> Result<Vec<f64>, PlanError> {
        Ok(self.noise_at(cell, action, action_index)?.1)
    }

    /// Returns (weighted hinge sum, raw dB per listener).
    fn noise_at(
        &mut self,
        cell: (usize, usize),
        action: &ActionProfile,
        action_index: usize,
    ) -> Result<(f64, Vec<f64>), PlanError> {
        if let Some(hit) = self.noise.get(&(cell, action_index)) {
            return Ok(hit.clone());
        }
        let p = self.problem;
        let center = p.map.cell_center(cell.0, cell.1);
        let mut dbs = Vec::with_capacity(p.listeners.len());
        let mut weighted = 0.0;
        for listener in &p.listeners {
            let r = center.distance(&listener.pose);
            let db = if r > MAX_PAIR_DISTANCE {
                0.0
            } else {
                if !self.scans.contains_key(&cell) {
                    let scan =
                        scan_panorama(p.map, p.materials, &center, DEFAULT_SCAN_BINS)?;
                    self.scans.insert(cell, scan);
                }
                let scan = &self.scans[&cell];
                // A listener in this very cell still gets a prediction: the
                // distance clamps up to a hair above zero.
                let r_eff = r.max(1e-9);
                let theta = center.direction_to(&listener.pose);
                let f = build_features(scan, r_eff, theta, p.model.layout())?;
                let y = p.model.predict(&f)?;
                scale_action_db(y, action.source_db)?
            };
            weighted += listener.weight * (db - listener.threshold_db).max(0.0);
            dbs.push(db);
        }
        let out = (weighted, dbs);
        if action_index != usize::MAX {
            self.noise.insert((cell, action_index), out.clone());
        }
        Ok(out)
    }
}

fn adjacency(
    map: &GridMap,
    from: (usize, usize),
    to: (usize, usize),
) -> Result<f64, PlanError> {
    let dx = to.0 as isize - from.0 as isize;
    let dy = to.1 as isize - from.1 as isize;
    if dx.abs() > 1 || dy.abs() > 1 || (dx == 0 && dy == 0) {
        return Err(PlanError::NonAdjacent(from.0, from.1, to.0, to.1));
    }
    if !map.is_cell_traversable(from.0, from.1) || !map.is_cell_traversable(to.0, to.1) {
        return Err(PlanError::NonAdjacent(from.0, from.1, to.0, to.1));
    }
    if dx != 0 && dy != 0 {
        // Diagonal moves may brush one blocked corner but not thread a gap
        // between two blocked orthogonal neighbors.
        let a = map.is_cell_traversable((from.0 as isize + dx) as usize, from.1);
        let b = map.is_cell_traversable(from.0, (from.1 as isize + dy) as usize);
        if !a && !b {
            return Err(PlanError::NonAdjacent(from.0, from.1, to.0, to.1));
        }
        Ok(map.cell_size * std::f64::consts::SQRT_2)
    } else {
        Ok(map.cell_size)
    }
}

/// Cost of one move: time plus lambda-weighted noise exposure over that
/// time. Noise is evaluated at the destination cell.
pub fn edge_cost(
    problem: &PlanProblem,
    from: (usize, usize),
    to: (usize, usize),
    action: &ActionProfile,
) -> Result<f64, PlanError> {
    let step_len = adjacency(problem.map, from, to)?;
    let dt = step_len / action.speed;
    let mut oracle = NoiseOracle::new(problem);
    let (noise, _) = oracle.noise_at(to, action, usize::MAX)?;
    Ok(dt * (1.0 + problem.lambda * noise))
}

#[derive(PartialEq)]
struct QueueEntry {
    f: f64,
    cell_index: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Min-heap on f, then lowest cell index: BinaryHeap is a max-heap,
        // so reverse both comparisons.
        other
            .f
            .total_cmp(&self.f)
            .then(other.cell_index.cmp(&self.cell_index))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A* over cells. The heuristic — straight-line distance at the fastest
/// action speed — never overestimates because noise cost is non-negative,
/// so returned plans are cost-minimal. Ties break deterministically on
/// lowest cell index, then action list order.
pub fn plan(problem: &PlanProblem) -> Result<Plan, PlanError> {
    if problem.actions.is_empty() {
        return Err(PlanError::EmptyActions);
    }
    if problem.lambda < 0.0 {
        return Err(PlanError::NegativeLambda(problem.lambda));
    }
    let map = problem.map;
    if !map.is_traversable(&problem.start)? {
        return Err(PlanError::NotTraversable {
            who: "start",
            x: problem.start.x,
            y: problem.start.y,
        });
    }
    if !map.is_traversable(&problem.goal)? {
        return Err(PlanError::NotTraversable { who: "goal", x: problem.goal.x, y: problem.goal.y });
    }
    let start = map.cell_of(&problem.start)?;
    let goal = map.cell_of(&problem.goal)?;
    let goal_center = map.cell_center(goal.0, goal.1);
    let max_speed = problem
        .actions
        .iter()
        .map(|a| a.speed)
        .fold(f64::NEG_INFINITY, f64::max);

    let idx = |c: (usize, usize)| c.1 * map.width + c.0;
    let n_cells = map.width * map.height;
    let mut g = vec![f64::INFINITY; n_cells];
    let mut came: Vec<Option<(usize, usize, usize)>> = vec![None; n_cells]; // (px, py, action)
    let mut closed = vec![false; n_cells];
    let mut heap = BinaryHeap::new();
    let mut oracle = NoiseOracle::new(problem);

    let h = |c: (usize, usize)| map.cell_center(c.0, c.1).distance(&goal_center) / max_speed;

    g[idx(start)] = 0.0;
    heap.push(QueueEntry { f: h(start), cell_index: idx(start) });

    const DIRS: [(isize, isize); 8] = [
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    ];

    while let Some(QueueEntry { cell_index, .. }) = heap.pop() {
        if closed[cell_index] {
            continue;
        }
        closed[cell_index] = true;
        let cell = (cell_index % map.width, cell_index / map.width);
        if cell == goal {
            break;
        }
        for (dx, dy) in DIRS {
            let nx = cell.0 as isize + dx;
            let ny = cell.1 as isize + dy;
            if nx < 0 || ny < 0 || nx >= map.width as isize || ny >= map.height as isize {
                continue;
            }
            let next = (nx as usize, ny as usize);
            if closed[idx(next)] || !map.is_cell_traversable(next.0, next.1) {
                continue;
            }
            let step_len = match adjacency(map, cell, next) {
                Ok(len) => len,
                Err(_) => continue,
            };
            // Cheapest action for this edge; earlier actions win ties.
            let mut best: Option<(f64, usize)> = None;
            for (ai, action) in problem.actions.iter().enumerate() {
                let (noise, _) = oracle.noise_at(next, action, ai)?;
                let dt = step_len / action.speed;
                let cost = dt * (1.0 + problem.lambda * noise);
                if best.map_or(true, |(c, _)| cost < c) {
                    best = Some((cost, ai));
                }
            }
            let (cost, ai) = best.expect("actions are non-empty");
            let tentative = g[idx(cell)] + cost;
            if tentative < g[idx(next)] {
                g[idx(next)] = tentative;
                came[idx(next)] = Some((cell.0, cell.1, ai));
                heap.push(QueueEntry { f: tentative + h(next), cell_index: idx(next) });
            }
        }
    }

    if start != goal && came[idx(goal)].is_none() {
        return Err(PlanError::NoPath);
    }

    // Reconstruct, then re-walk forward to accumulate costs and traces.
    let mut rev: Vec<((usize, usize), usize)> = Vec::new();
    let mut cursor = goal;
    while cursor != start {
        let (px, py, ai) = came[idx(cursor)].expect("reconstruction follows parents");
        rev.push((cursor, ai));
        cursor = (px, py);
    }
    rev.reverse();

    let mut steps = Vec::with_capacity(rev.len());
    let mut total_time = 0.0;
    let mut total_noise_cost = 0.0;
    let mut per_listener_trace = vec![Vec::with_capacity(rev.len()); problem.listeners.len()];
    let mut prev = start;
    for (cell, ai) in rev {
        let action = &problem.actions[ai];
        let step_len = adjacency(map, prev, cell)?;
        let dt = step_len / action.speed;
        let (noise, dbs) = oracle.noise_at(cell, action, ai)?;
        total_time += dt;
        total_noise_cost += noise * dt;
        for (j, db) in dbs.into_iter().enumerate() {
            per_listener_trace[j].push(db);
        }
        steps.push(PlanStep { cell, action: action.name.clone() });
        prev = cell;
    }

    Ok(Plan {
        start_cell: start,
        steps,
        total_time,
        total_noise_cost,
        total_cost: total_time + problem.lambda * total_noise_cost,
        per_listener_trace,
    })
}

/// Ground-truth loudness trace for a committed plan: trace the impulse from
/// every step cell to every listener and scale by the action's source level.
/// This is the "measured" counterpart to the model-predicted
/// `per_listener_trace`.
pub fn simulate_plan_audio(
    problem: &PlanProblem,
    plan: &Plan,
    cfg: &AcousticConfig,
    seed: u64,
) -> Result<Vec<Vec<f64>>, PlanError> {
    let mut traces = vec![Vec::with_capacity(plan.steps.len()); problem.listeners.len()];
    for (si, step) in plan.steps.iter().enumerate() {
        let action = problem
            .actions
            .iter()
            .find(|a| a.name == step.action)
            .ok_or(PlanError::EmptyActions)?;
        let robot = problem.map.cell_center(step.cell.0, step.cell.1);
        for (li, listener) in problem.listeners.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(
                seed,
                si as u64,
                li as u64,
            ));
            let hist = trace_impulse(
                problem.map,
                problem.materials,
                &robot,
                &listener.pose,
                cfg,
                &mut rng,
            )?;
            let y = histogram_to_label(&hist).y;
            traces[li].push(scale_action_db(y, action.source_db)?);
        }
    }
    Ok(traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn single_action(speed: f64, source_db: f64) -> Vec<ActionProfile> {
        vec![ActionProfile { name: "move".into(), speed, source_db }]
    }

    fn problem<'a>(
        map: &'a GridMap,
        materials: &'a MaterialTable,
        model: &'a PredictorModel,
        start: (usize, usize),
        goal: (usize, usize),
    ) -> PlanProblem<'a> {
        PlanProblem {
            map,
            materials,
            model,
            start: map.cell_center(start.0, start.1),
            goal: map.cell_center(goal.0, goal.1),
            listeners: Vec::new(),
            actions: single_action(1.0, 76.0),
            lambda: 0.0,
        }
    }

    #[test]
    fn zero_listeners_cost_is_pure_time() {
        let (map, materials) = fixtures::two_room("tworoom", 2, (4, 5), Some((14, 15)));
        let model = PredictorModel::Heuristic;
        let p = problem(&map, &materials, &model, (2, 2), (6, 2));
        let plan = plan(&p).unwrap();
        assert_eq!(plan.steps.len(), 4);
        assert!((plan.total_time - 4.0 * 0.25).abs() < 1e-12);
        assert_eq!(plan.total_noise_cost, 0.0);
        assert!(plan.per_listener_trace.is_empty());
    }

    #[test]
    fn start_equals_goal_is_empty_plan() {
        let (map, materials) = fixtures::two_room("tworoom", 2, (4, 5), Some((14, 15)));
        let model = PredictorModel::Heuristic;
        let p = problem(&map, &materials, &model, (5, 5), (5, 5));
        let plan = plan(&p).unwrap();
        assert!(plan.steps.is_empty());
        assert_eq!(plan.total_cost, 0.0);
    }

    #[test]
    fn unreachable_goal_errors() {
        use crate::gridmap::{GridMap, Material, MaterialTable};
        let t = MaterialTable::new(vec![
            Material { code: 0, name: "air".into(), absorption: 0.0 },
            Material { code: 1, name: "wall".into(), absorption: 0.5 },
        ])
        .unwrap();
        // Two free cells separated by a full wall column.
        let cells = vec![0, 1, 0, 0, 1, 0, 0, 1, 0];
        let map = GridMap::new("split", 3, 3, 0.25, cells, &t).unwrap();
        let model = PredictorModel::Heuristic;
        let p = problem(&map, &t, &model, (0, 0), (2, 2));
        assert!(matches!(plan(&p), Err(PlanError::NoPath)));
    }

    #[test]
    fn node_noise_heuristic_anchor() {
        let (map, materials) = fixtures::free_field();
        let model = PredictorModel::Heuristic;
        let mut p = problem(&map, &materials, &model, (48, 48), (50, 48));
        // Listener exactly 1 m (4 cells) east of the queried cell.
        p.listeners = vec![Listener {
            pose: map.cell_center(52, 48),
            weight: 1.0,
            threshold_db: 0.0,
        }];
        let dbs = node_noise(&p, (48, 48), &p.actions[0]).unwrap();
        assert_eq!(dbs.len(), 1);
        assert!((dbs[0] - (120.0 / 128.0) * 76.0).abs() < 1e-9, "db {}", dbs[0]);
        assert!((dbs[0] - 71.25).abs() < 1e-9);
        // Beyond the 10 m support the listener hears nothing.
        let far = node_noise(&p, (2, 2), &p.actions[0]).unwrap();
        assert_eq!(far[0], 0.0);
    }

    #[test]
    fn edge_cost_formula_anchor() {
        let (map, materials) = fixtures::free_field();
        let model = PredictorModel::Heuristic;
        let mut p = problem(&map, &materials, &model, (48, 48), (49, 48));
        p.lambda = 0.1;
        p.listeners = vec![Listener {
            pose: map.cell_center(53, 48),
            weight: 1.0,
            threshold_db: 0.0,
        }];
        // Listener 1 m east of the destination cell (49, 48).
        let cost = edge_cost(&p, (48, 48), (49, 48), &p.actions[0]).unwrap();
        let dt = 0.25;
        let noise = 71.25;
        assert!((cost - dt * (1.0 + 0.1 * noise)).abs() < 1e-9, "cost {cost}");

        // Below-threshold listeners cost nothing.
        p.listeners[0].threshold_db = 90.0;
        let cost = edge_cost(&p, (48, 48), (49, 48), &p.actions[0]).unwrap();
        assert!((cost - dt).abs() < 1e-12);

        // Lambda zero reduces to pure time.
        p.listeners[0].threshold_db = 0.0;
        p.lambda = 0.0;
        let cost = edge_cost(&p, (48, 48), (49, 48), &p.actions[0]).unwrap();
        assert!((cost - dt).abs() < 1e-12);
    }

    #[test]
    fn corner_cutting_needs_one_open_orthogonal() {
        use crate::gridmap::{GridMap, Material, MaterialTable};
        let t = MaterialTable::new(vec![
            Material { code: 0, name: "air".into(), absorption: 0.0 },
            Material { code: 1, name: "wall".into(), absorption: 0.5 },
        ])
        .unwrap();
        // 2x2: free diagonal, both orthogonal neighbors blocked.
        let map = GridMap::new("pinch", 2, 2, 0.25, vec![0, 1, 1, 0], &t).unwrap();
        assert!(adjacency(&map, (0, 0), (1, 1)).is_err());
        // Opening one orthogonal neighbor permits the diagonal.
        let map = GridMap::new("brush", 2, 2, 0.25, vec![0, 0, 1, 0], &t).unwrap();
        assert!(adjacency(&map, (0, 0), (1, 1)).is_ok());
    }

    #[test]
    fn lambda_zero_plans_take_fastest_action() {
        let (map, materials) = fixtures::two_room("tworoom", 2, (4, 5), Some((14, 15)));
        let model = PredictorModel::Heuristic;
        let mut p = problem(&map, &materials, &model, (2, 2), (35, 4));
        p.actions = default_actions();
        p.listeners = vec![Listener {
            pose: map.cell_center(24, 4),
            weight: 1.0,
            threshold_db: 0.0,
        }];
        let plan = plan(&p).unwrap();
        assert!(plan.steps.iter().all(|s| s.action == "run"));
    }

    #[test]
    fn weight_and_lambda_rescaling_preserves_the_argmin() {
        let (map, materials) = fixtures::two_room("tworoom", 2, (4, 5), Some((14, 15)));
        let model = PredictorModel::Heuristic;
        let make = |weight: f64, lambda: f64| {
            let mut p = problem(&map, &materials, &model, (2, 2), (35, 4));
            p.actions = default_actions();
            p.lambda = lambda;
            p.listeners = vec![Listener {
                pose: map.cell_center(24, 4),
                weight,
                threshold_db: 0.0,
            }];
            p
        };
        let a = plan(&make(1.0, 0.08)).unwrap();
        let b = plan(&make(4.0, 0.02)).unwrap();
        assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn monotone_lambda_sweep() {
        let (map, materials) = fixtures::two_room("tworoom", 2, (4, 5), Some((14, 15)));
        let model = PredictorModel::Heuristic;
        let mut prev_time = 0.0;
        let mut prev_noise = f64::INFINITY;
        for lambda in [0.0, 0.002, 0.01, 0.05, 0.2, 1.0] {
            let mut p = problem(&map, &materials, &model, (2, 4), (35, 4));
            p.actions = default_actions();
            p.lambda = lambda;
            p.listeners = vec![Listener {
                pose: map.cell_center(24, 4),
                weight: 1.0,
                threshold_db: 0.0,
            }];
            let plan = plan(&p).unwrap();
            assert!(
                plan.total_time >= prev_time - 1e-9,
                "time decreased at lambda {lambda}"
            );
            assert!(
                plan.total_noise_cost <= prev_noise + 1e-9,
                "noise increased at lambda {lambda}"
            );
            prev_time = plan.total_time;
            prev_noise = plan.total_noise_cost;
        }
    }

    #[test]
    fn simulated_trace_is_zero_for_enclosed_listener() {
        use crate::gridmap::{GridMap, Material, MaterialTable};
        let t = MaterialTable::new(vec![
            Material { code: 0, name: "air".into(), absorption: 0.0 },
            Material { code: 1, name: "dead".into(), absorption: 1.0 },
        ])
        .unwrap();
        let mut cells = vec![0u8; 16 * 16];
        for ix in 4..9 {
            for iy in 4..9 {
                if ix == 4 || ix == 8 || iy == 4 || iy == 8 {
                    cells[iy * 16 + ix] = 1;
                }
            }
        }
        let map = GridMap::new("boxed", 16, 16, 0.25, cells, &t).unwrap();
        let model = PredictorModel::Heuristic;
        let mut p = problem(&map, &t, &model, (1, 1), (3, 1));
        p.listeners = vec![Listener {
            pose: map.cell_center(6, 6),
            weight: 1.0,
            threshold_db: 0.0,
        }];
        let the_plan = plan(&p).unwrap();
        let cfg = AcousticConfig { n_rays: 256, ..AcousticConfig::default() };
        let traces = simulate_plan_audio(&p, &the_plan, &cfg, 5).unwrap();
        assert!(traces[0].iter().all(|&db| db == 0.0));
    }
}
