//! Freight-station scheduling model.
//!
//! A solution is a vector of real keys, one per task. Sorting the keys
//! ascending gives the execution order (sort mapping coding). The ETV then
//! works through the sequence; for each task it picks a gate according to a
//! [`GateRule`] (by default the one minimizing both travel legs from where
//! the ETV currently is). Inbound tasks run gate → cell, outbound tasks
//! cell → gate.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::colony::{Bounds, Objective};
use crate::error::{Error, Result};
use crate::kinematics::{KinematicParams, Position, TimeMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Inbound,
    Outbound,
}

impl Direction {
    pub fn code(&self) -> &'static str {
        match self {
            Direction::Inbound => "I",
            Direction::Outbound => "O",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Entrance,
    Exit,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Entrance => "entrance",
            GateKind::Exit => "exit",
        }
    }

}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub id: String,
    pub kind: GateKind,
    pub position: Position,
}

/// Storage grid plus entrance and exit gates. Gate order within each list
/// is the tie-break order.
#[derive(Debug, Clone, PartialEq)]
pub struct WarehouseLayout {
    pub entrances: Vec<Gate>,
    pub exits: Vec<Gate>,
}

const DEFAULT_ENTRANCES: [(u32, u32, u32); 9] = [
    (1, 1, 5),
    (2, 1, 15),
    (1, 1, 20),
    (1, 1, 25),
    (1, 1, 30),
    (1, 1, 35),
    (1, 1, 40),
    (1, 1, 50),
    (1, 1, 60),
];

const DEFAULT_EXITS: [(u32, u32, u32); 7] = [
    (1, 1, 8),
    (1, 1, 18),
    (1, 1, 28),
    (1, 1, 38),
    (1, 1, 48),
    (2, 1, 53),
    (1, 1, 58),
];

impl Default for WarehouseLayout {
    fn default() -> Self {
        let gates = |prefix: &str, kind, coords: &[(u32, u32, u32)]| {
            coords
                .iter()
                .enumerate()
                .map(|(i, &(r, l, c))| Gate {
                    id: format!("{prefix}{}", i + 1),
                    kind,
                    position: Position { row: r, layer: l, column: c },
                })
                .collect()
        };
        WarehouseLayout {
            entrances: gates("R", GateKind::Entrance, &DEFAULT_ENTRANCES),
            exits: gates("C", GateKind::Exit, &DEFAULT_EXITS),
        }
    }
}

impl WarehouseLayout {
    pub fn validate(&self) -> Result<()> {
        if self.entrances.is_empty() || self.exits.is_empty() {
            return Err(Error::Layout("at least one entrance and one exit are required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (gate, kind) in self
            .entrances
            .iter()
            .map(|g| (g, GateKind::Entrance))
            .chain(self.exits.iter().map(|g| (g, GateKind::Exit)))
        {
            if gate.kind != kind {
                return Err(Error::Layout(format!("gate {} listed under the wrong kind", gate.id)));
            }
            gate.position
                .validate()
                .map_err(|e| Error::Layout(format!("gate {}: {e}", gate.id)))?;
            if !seen.insert(gate.id.as_str()) {
                return Err(Error::Layout(format!("duplicate gate id {}", gate.id)));
            }
        }
        Ok(())
    }

    pub fn gates_for(&self, direction: Direction) -> &[Gate] {
        match direction {
            Direction::Inbound => &self.entrances,
            Direction::Outbound => &self.exits,
        }
    }

    pub fn gate(&self, id: &str) -> Option<&Gate> {
        self.entrances.iter().chain(&self.exits).find(|g| g.id == id)
    }

    /// Reads a `id,kind,row,layer,column` CSV.
    pub fn from_csv<R: Read>(input: R, origin: &str) -> Result<Self> {
        let mut entrances = Vec::new();
        let mut exits = Vec::new();
        for (line, rec) in csv_records(input, origin, &["id", "kind", "row", "layer", "column"])? {
            let kind = match rec[1].to_ascii_lowercase().as_str() {
                "entrance" => GateKind::Entrance,
                "exit" => GateKind::Exit,
                other => {
                    return Err(parse_err(origin, line, format!("unknown gate kind `{other}`")));
                }
            };
            let position = parse_position(&rec[2..5], origin, line)?;
            let gate = Gate {
                id: rec[0].to_string(),
                kind,
                position,
            };
            match kind {
                GateKind::Entrance => entrances.push(gate),
                GateKind::Exit => exits.push(gate),
            }
        }
        let layout = WarehouseLayout { entrances, exits };
        layout.validate()?;
        Ok(layout)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(file, &path.display().to_string())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["id", "kind", "row", "layer", "column"])?;
        for g in self.entrances.iter().chain(&self.exits) {
            let p = g.position;
            w.write_record([
                g.id.clone(),
                g.kind.name().to_string(),
                p.row.to_string(),
                p.layer.to_string(),
                p.column.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<layout csv>", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Task {
    pub id: u32,
    pub direction: Direction,
    pub cell: Position,
}

/// Built-in 60-task instance as `(id, direction, row, layer, column)`.
/// Tasks 15, 30, 45 and 60 are missing from the reference data; their
/// cells are reconstructed (see [`RECONSTRUCTED_TASKS`]).
const DEFAULT_TASKS: [(u32, char, u32, u32, u32); 60] = [
    (1, 'I', 1, 5, 34),
    (2, 'I', 2, 3, 14),
    (3, 'I', 1, 3, 58),
    (4, 'I', 1, 5, 26),
    (5, 'I', 1, 5, 30),
    (6, 'I', 1, 2, 55),
    (7, 'I', 1, 5, 24),
    (8, 'I', 1, 4, 40),
    (9, 'I', 1, 5, 40),
    (10, 'I', 1, 5, 35),
    (11, 'I', 2, 5, 23),
    (12, 'I', 1, 7, 43),
    (13, 'I', 1, 3, 48),
    (14, 'I', 1, 8, 50),
    (15, 'I', 1, 6, 6),
    (16, 'I', 1, 8, 44),
    (17, 'I', 2, 8, 32),
    (18, 'I', 2, 3, 54),
    (19, 'I', 1, 3, 40),
    (20, 'I', 1, 4, 60),
    (21, 'I', 1, 3, 20),
    (22, 'I', 2, 2, 43),
    (23, 'I', 2, 4, 50),
    (24, 'I', 1, 6, 10),
    (25, 'I', 2, 7, 20),
    (26, 'I', 1, 6, 15),
    (27, 'I', 2, 8, 30),
    (28, 'I', 2, 2, 45),
    (29, 'I', 1, 7, 58),
    (30, 'I', 2, 7, 12),
    (31, 'O', 1, 3, 10),
    (32, 'O', 1, 5, 55),
    (33, 'O', 1, 5, 25),
    (34, 'O', 2, 4, 8),
    (35, 'O', 2, 2, 18),
    (36, 'O', 2, 1, 16),
    (37, 'O', 2, 3, 51),
    (38, 'O', 1, 5, 6),
    (39, 'O', 2, 5, 3),
    (40, 'O', 1, 6, 12),
    (41, 'O', 2, 6, 13),
    (42, 'O', 2, 7, 49),
    (43, 'O', 1, 7, 57),
    (44, 'O', 1, 5, 25),
    (45, 'O', 1, 4, 11),
    (46, 'O', 2, 8, 10),
    (47, 'O', 1, 3, 32),
    (48, 'O', 1, 4, 50),
    (49, 'O', 2, 3, 38),
    (50, 'O', 2, 1, 58),
    (51, 'O', 1, 5, 24),
    (52, 'O', 1, 4, 30),
    (53, 'O', 2, 6, 40),
    (54, 'O', 2, 4, 35),
    (55, 'O', 2, 8, 51),
    (56, 'O', 2, 2, 30),
    (57, 'O', 1, 2, 60),
    (58, 'O', 1, 3, 26),
    (59, 'O', 1, 6, 35),
    (60, 'O', 2, 5, 9),
];

/// Ids in the built-in instance whose cells are placeholders.
pub const RECONSTRUCTED_TASKS: [u32; 4] = [15, 30, 45, 60];

/// The built-in 60-task instance: tasks 1–30 inbound, 31–60 outbound.
pub fn default_tasks() -> Vec<Task> {
    DEFAULT_TASKS
        .iter()
        .map(|&(id, d, row, layer, column)| Task {
            id,
            direction: if d == 'I' { Direction::Inbound } else { Direction::Outbound },
            cell: Position { row, layer, column },
        })
        .collect()
}

fn parse_err(origin: &str, line: usize, reason: String) -> Error {
    Error::Parse {
        path: origin.to_string(),
        line,
        reason,
    }
}

fn parse_position(fields: &[String], origin: &str, line: usize) -> Result<Position> {
    let mut v = [0u32; 3];
    for (slot, (field, name)) in v.iter_mut().zip(fields.iter().zip(["row", "layer", "column"])) {
        *slot = field
            .trim()
            .parse()
            .map_err(|_| parse_err(origin, line, format!("invalid {name} `{field}`")))?;
    }
    Position::new(v[0], v[1], v[2]).map_err(|e| parse_err(origin, line, e.to_string()))
}

/// Records of a headed CSV, with 1-based file line numbers. The header must
/// match `columns` exactly.
fn csv_records<R: Read>(input: R, origin: &str, columns: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(origin, 1, e.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    if header != columns {
        return Err(parse_err(
            origin,
            1,
            format!("expected header `{}`, got `{}`", columns.join(","), header.join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(origin, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != columns.len() {
            return Err(parse_err(
                origin,
                line,
                format!("expected {} fields, got {}", columns.len(), rec.len()),
            ));
        }
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

/// Reads an `id,direction,row,layer,column` CSV (direction `I` or `O`).
pub fn tasks_from_csv<R: Read>(input: R, origin: &str) -> Result<Vec<Task>> {
    let mut tasks = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for (line, rec) in csv_records(input, origin, &["id", "direction", "row", "layer", "column"])? {
        let id: u32 = rec[0]
            .parse()
            .map_err(|_| parse_err(origin, line, format!("invalid task id `{}`", rec[0])))?;
        if !ids.insert(id) {
            return Err(parse_err(origin, line, format!("duplicate task id {id}")));
        }
        let direction = match rec[1].to_ascii_uppercase().as_str() {
            "I" => Direction::Inbound,
            "O" => Direction::Outbound,
            other => {
                return Err(parse_err(origin, line, format!("direction must be I or O, got `{other}`")));
            }
        };
        let cell = parse_position(&rec[2..5], origin, line)?;
        tasks.push(Task { id, direction, cell });
    }
    if tasks.is_empty() {
        return Err(parse_err(origin, 1, "no tasks".into()));
    }
    Ok(tasks)
}

pub fn load_tasks(path: &Path) -> Result<Vec<Task>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    tasks_from_csv(file, &path.display().to_string())
}

pub fn write_tasks_csv<W: Write>(tasks: &[Task], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "direction", "row", "layer", "column"])?;
    for t in tasks {
        w.write_record([
            t.id.to_string(),
            t.direction.code().to_string(),
            t.cell.row.to_string(),
            t.cell.layer.to_string(),
            t.cell.column.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<tasks csv>", e))?;
    Ok(())
}

/// Ascending argsort of `keys`; equal keys keep index order.
pub fn smc_decode(keys: &[f64]) -> Result<Vec<usize>> {
    if let Some(i) = keys.iter().position(|k| k.is_nan()) {
        return Err(Error::Decode(format!("key {i} is NaN")));
    }
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    Ok(order)
}

/// How a gate is chosen for each executed task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GateRule {
    /// Minimize `leg0 + leg1` from the ETV's current position.
    #[default]
    MinTotalLegs,
    /// Use the gate closest in travel time to the task's cell, regardless of
    /// where the ETV is. Reproduces the reference allocation tables for the
    /// built-in instance.
    NearestToCell,
}

impl std::str::FromStr for GateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-total" | "min_total" => Ok(GateRule::MinTotalLegs),
            "nearest-cell" | "nearest_cell" => Ok(GateRule::NearestToCell),
            other => Err(Error::Usage(format!(
                "unknown gate rule `{other}` (expected min-total or nearest-cell)"
            ))),
        }
    }
}

/// A gate picked for one task, with its two travel legs in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateChoice {
    /// Index into [`WarehouseLayout::gates_for`] for the task's direction.
    pub gate: usize,
    pub leg0: f64,
    pub leg1: f64,
}

/// Cheapest gate for `task` with the ETV standing at `etv_at`. Ties go to
/// the gate listed first.
pub fn assign_gate(task: &Task, etv_at: &Position, layout: &WarehouseLayout, matrix: &TimeMatrix) -> Result<GateChoice> {
    assign_gate_with(GateRule::MinTotalLegs, task, etv_at, layout, matrix)
}

/// [`assign_gate`] under an explicit [`GateRule`].
pub fn assign_gate_with(
    rule: GateRule,
    task: &Task,
    etv_at: &Position,
    layout: &WarehouseLayout,
    matrix: &TimeMatrix,
) -> Result<GateChoice> {
    let gates = layout.gates_for(task.direction);
    if gates.is_empty() {
        return Err(Error::Layout(format!(
            "no gate serves {:?} task {}",
            task.direction, task.id
        )));
    }
    let mut best: Option<GateChoice> = None;
    for (g, gate) in gates.iter().enumerate() {
        let (leg0, leg1) = match task.direction {
            Direction::Inbound => (
                matrix.between(etv_at, &gate.position),
                matrix.between(&gate.position, &task.cell),
            ),
            Direction::Outbound => (
                matrix.between(etv_at, &task.cell),
                matrix.between(&task.cell, &gate.position),
            ),
        };
        let score = |c: &GateChoice| match (rule, task.direction) {
            (GateRule::NearestToCell, Direction::Inbound) => c.leg1,
            _ => c.leg0 + c.leg1,
        };
        let candidate = GateChoice { gate: g, leg0, leg1 };
        if best.is_none_or(|b| score(&candidate) < score(&b)) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("non-empty gate list"))
}

/// Executed schedule with per-task costs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleReport {
    /// Task ids in execution order.
    pub sequence: Vec<u32>,
    pub gate_assignment: BTreeMap<u32, String>,
    /// Cost of each task, in sequence order.
    pub per_task_time: Vec<f64>,
    pub total_time: f64,
}

/// Everything needed to score a key vector.
#[derive(Debug, Clone)]
pub struct ScheduleModel {
    pub layout: WarehouseLayout,
    pub tasks: Vec<Task>,
    pub params: KinematicParams,
    pub matrix: TimeMatrix,
    /// ETV position before the first task.
    pub start: Position,
    pub gate_rule: GateRule,
}

impl ScheduleModel {
    pub fn new(layout: WarehouseLayout, tasks: Vec<Task>, params: KinematicParams) -> Result<Self> {
        layout.validate()?;
        params.validate()?;
        if tasks.is_empty() {
            return Err(Error::Domain("empty task set".into()));
        }
        for t in &tasks {
            t.cell.validate()?;
            if layout.gates_for(t.direction).is_empty() {
                return Err(Error::Layout(format!("no gate for task {}", t.id)));
            }
        }
        let matrix = TimeMatrix::build(&params)?;
        Ok(ScheduleModel {
            layout,
            tasks,
            params,
            matrix,
            start: Position { row: 1, layer: 1, column: 1 },
            gate_rule: GateRule::default(),
        })
    }

    /// Built-in layout and 60-task instance with calibrated kinematics.
    pub fn default_instance() -> Self {
        Self::new(WarehouseLayout::default(), default_tasks(), KinematicParams::default())
            .expect("built-in instance is valid")
    }

    pub fn with_start(mut self, start: Position) -> Result<Self> {
        start.validate()?;
        self.start = start;
        Ok(self)
    }

    pub fn with_gate_rule(mut self, rule: GateRule) -> Self {
        self.gate_rule = rule;
        self
    }

    pub fn dims(&self) -> usize {
        self.tasks.len()
    }

    fn check_keys(&self, keys: &[f64]) -> Result<()> {
        if keys.len() != self.tasks.len() {
            return Err(Error::Decode(format!(
                "expected {} keys, got {}",
                self.tasks.len(),
                keys.len()
            )));
        }
        Ok(())
    }

    /// Runs the decoded sequence, calling `visit(task, choice, cost)` per task.
    fn replay<F: FnMut(&Task, &GateChoice, f64)>(&self, order: &[usize], mut visit: F) -> Result<f64> {
        let mut at = self.start;
        let mut total = 0.0;
        let handling = 2.0 * self.params.handling_time;
        for &idx in order {
            let task = &self.tasks[idx];
            let choice = assign_gate_with(self.gate_rule, task, &at, &self.layout, &self.matrix)?;
            let cost = choice.leg0 + choice.leg1 + handling;
            total += cost;
            visit(task, &choice, cost);
            at = match task.direction {
                Direction::Inbound => task.cell,
                Direction::Outbound => self.layout.exits[choice.gate].position,
            };
        }
        Ok(total)
    }

    pub fn evaluate(&self, keys: &[f64]) -> Result<ScheduleReport> {
        self.check_keys(keys)?;
        let order = smc_decode(keys)?;
        let mut sequence = Vec::with_capacity(order.len());
        let mut gate_assignment = BTreeMap::new();
        let mut per_task_time = Vec::with_capacity(order.len());
        let total_time = self.replay(&order, |task, choice, cost| {
            sequence.push(task.id);
            gate_assignment.insert(task.id, self.layout.gates_for(task.direction)[choice.gate].id.clone());
            per_task_time.push(cost);
        })?;
        Ok(ScheduleReport {
            sequence,
            gate_assignment,
            per_task_time,
            total_time,
        })
    }

    /// Total schedule time for `keys`.
    pub fn total_time(&self, keys: &[f64]) -> Result<f64> {
        self.check_keys(keys)?;
        let order = smc_decode(keys)?;
        self.replay(&order, |_, _, _| {})
    }

    /// Key box used by the optimizer.
    pub fn key_bounds(&self, half_width: f64) -> Result<Bounds> {
        Bounds::uniform(self.dims(), -half_width, half_width)
    }
}

pub const DEFAULT_KEY_RANGE: f64 = 10.0;

/// Minimization objective over key vectors: total schedule time.
/// Invalid key vectors (wrong length, NaN) evaluate to NaN.
#[derive(Debug, Clone)]
pub struct ScheduleObjective {
    model: ScheduleModel,
}

impl ScheduleObjective {
    pub fn model(&self) -> &ScheduleModel {
        &self.model
    }

    pub fn bounds(&self) -> Bounds {
        self.model
            .key_bounds(DEFAULT_KEY_RANGE)
            .expect("non-empty task set")
    }
}

impl Objective for ScheduleObjective {
    fn evaluate(&self, keys: &[f64]) -> f64 {
        self.model.total_time(keys).unwrap_or(f64::NAN)
    }
}

pub fn make_objective(layout: WarehouseLayout, tasks: Vec<Task>, params: KinematicParams) -> Result<ScheduleObjective> {
    Ok(ScheduleObjective {
        model: ScheduleModel::new(layout, tasks, params)?,
    })
}

impl From<ScheduleModel> for ScheduleObjective {
    fn from(model: ScheduleModel) -> Self {
        ScheduleObjective { model }
    }
}

const ROUTE_PREFIX: &str = "Optimal scheduling route:";
const TOTAL_PREFIX: &str = "Total time (s):";
const INBOUND_HEADER: &str = "Inbound tasks";
const OUTBOUND_HEADER: &str = "Outbound tasks";

/// Route line, total, then one row per gate listing its tasks in execution
/// order, e.g. `R1: 15,16,24`. Lines carry no trailing whitespace.
pub fn format_report(report: &ScheduleReport, layout: &WarehouseLayout) -> String {
    let ids: Vec<String> = report.sequence.iter().map(u32::to_string).collect();
    let mut out = String::new();
    let _ = writeln!(out, "{}", format!("{ROUTE_PREFIX} {}", ids.join(" ")).trim_end());
    let _ = writeln!(out, "{TOTAL_PREFIX} {:.6}", report.total_time);
    for (header, gates) in [(INBOUND_HEADER, &layout.entrances), (OUTBOUND_HEADER, &layout.exits)] {
        let _ = writeln!(out, "{header}");
        for gate in gates {
            let served: Vec<String> = report
                .sequence
                .iter()
                .filter(|id| report.gate_assignment.get(id) == Some(&gate.id))
                .map(u32::to_string)
                .collect();
            let _ = writeln!(out, "{}", format!("{}: {}", gate.id, served.join(",")).trim_end());
        }
    }
    out
}

/// Sequence and gate assignment recovered from [`format_report`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReport {
    pub sequence: Vec<u32>,
    pub gate_assignment: BTreeMap<u32, String>,
    pub total_time: f64,
}

pub fn parse_report(text: &str) -> Result<ParsedReport> {
    let bad = |line: usize, reason: &str| parse_err("<report>", line, reason.to_string());
    let mut sequence = None;
    let mut total_time = None;
    let mut gate_assignment = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line == INBOUND_HEADER || line == OUTBOUND_HEADER {
            continue;
        }
        if let Some(rest) = line.strip_prefix(ROUTE_PREFIX) {
            let ids = rest
                .split_whitespace()
                .map(|s| s.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(idx + 1, "invalid task id in route"))?;
            sequence = Some(ids);
        } else if let Some(rest) = line.strip_prefix(TOTAL_PREFIX) {
            total_time = Some(rest.trim().parse().map_err(|_| bad(idx + 1, "invalid total"))?);
        } else if let Some((gate, list)) = line.split_once(':') {
            for id in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let id: u32 = id.parse().map_err(|_| bad(idx + 1, "invalid task id in gate row"))?;
                gate_assignment.insert(id, gate.trim().to_string());
            }
        } else {
            return Err(bad(idx + 1, "unrecognized line"));
        }
    }
    Ok(ParsedReport {
        sequence: sequence.ok_or_else(|| bad(0, "missing route line"))?,
        gate_assignment,
        total_time: total_time.ok_or_else(|| bad(0, "missing total line"))?,
    })
}

/// `task_id,position,gate_id,task_time_s` with 1-based positions and
/// 6-decimal times.
pub fn write_report_csv<W: Write>(report: &ScheduleReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["task_id", "position", "gate_id", "task_time_s"])?;
    for (pos, (id, cost)) in report.sequence.iter().zip(&report.per_task_time).enumerate() {
        w.write_record([
            id.to_string(),
            (pos + 1).to_string(),
            report.gate_assignment.get(id).cloned().unwrap_or_default(),
            format!("{cost:.6}"),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<report csv>", e))?;
    Ok(())
}
