//! ETV motion model.
//!
//! Each axis follows a trapezoidal (or triangular, for short hops) velocity
//! profile. Horizontal and vertical motion run simultaneously, so a move
//! takes as long as the slower axis. Moving between the two shelf rows
//! costs nothing: both rows face the same aisle.

use std::io::Write;
use std::path::Path;

use crate::config::KeyValues;
use crate::error::{Error, Result};

pub const ROWS: u32 = 2;
pub const LAYERS: u32 = 8;
pub const COLUMNS: u32 = 60;

/// Accelerations, top speeds and cell geometry of the ETV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicParams {
    /// Horizontal acceleration, m/s².
    pub accel_x: f64,
    /// Vertical acceleration, m/s².
    pub accel_y: f64,
    /// Horizontal top speed, m/s.
    pub vmax_x: f64,
    /// Vertical top speed, m/s.
    pub vmax_y: f64,
    /// Width of one storage cell, m.
    pub cell_width: f64,
    /// Height of one storage cell, m.
    pub cell_height: f64,
    /// Time to load or unload one unit of cargo, s.
    pub handling_time: f64,
}

impl KinematicParams {
    /// Parameters fitted to the reference time-cost matrix with unit cells.
    ///
    /// The horizontal pair is the minimax fit over the first matrix row
    /// (worst residual 0.0033 s); the vertical pair is exact: a 11.25 s
    /// per-layer slope and a 0.37 s intercept.
    pub const CALIBRATED: KinematicParams = KinematicParams {
        accel_x: 0.13353,
        accel_y: (1.0 / 11.25) / 0.37,
        vmax_x: 0.532925,
        vmax_y: 1.0 / 11.25,
        cell_width: 1.0,
        cell_height: 1.0,
        handling_time: 2.0,
    };

    pub const KEYS: [&'static str; 7] = [
        "accel_x",
        "accel_y",
        "vmax_x",
        "vmax_y",
        "cell_width",
        "cell_height",
        "handling_time",
    ];

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("accel_x", self.accel_x),
            ("accel_y", self.accel_y),
            ("vmax_x", self.vmax_x),
            ("vmax_y", self.vmax_y),
            ("cell_width", self.cell_width),
            ("cell_height", self.cell_height),
            ("handling_time", self.handling_time),
        ];
        for (name, value) in checks {
            let ok = if name == "handling_time" {
                value.is_finite() && value >= 0.0
            } else {
                value.is_finite() && value > 0.0
            };
            if !ok {
                return Err(Error::param(name, format!("got {value}")));
            }
        }
        Ok(())
    }

    /// Overrides the calibrated defaults with any keys present in `kv`.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let mut p = Self::default();
        for (key, value, line) in kv.entries() {
            let slot = match key {
                "accel_x" => &mut p.accel_x,
                "accel_y" => &mut p.accel_y,
                "vmax_x" => &mut p.vmax_x,
                "vmax_y" => &mut p.vmax_y,
                "cell_width" => &mut p.cell_width,
                "cell_height" => &mut p.cell_height,
                "handling_time" => &mut p.handling_time,
                _ => continue,
            };
            *slot = kv.parse_f64(key, value, line)?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let kv = KeyValues::load(path)?;
        kv.reject_unknown(&Self::KEYS)?;
        Self::from_key_values(&kv)
    }
}

impl Default for KinematicParams {
    fn default() -> Self {
        Self::CALIBRATED
    }
}

/// A storage slot or gate: 1-based row, layer and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Position {
    pub row: u32,
    pub layer: u32,
    pub column: u32,
}

impl Position {
    pub fn new(row: u32, layer: u32, column: u32) -> Result<Self> {
        let p = Position { row, layer, column };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=ROWS).contains(&self.row)
            || !(1..=LAYERS).contains(&self.layer)
            || !(1..=COLUMNS).contains(&self.column)
        {
            return Err(Error::Domain(format!(
                "position {self} outside {ROWS}x{LAYERS}x{COLUMNS} warehouse"
            )));
        }
        Ok(())
    }

    pub fn layer_diff(&self, other: &Position) -> u32 {
        self.layer.abs_diff(other.layer)
    }

    pub fn column_diff(&self, other: &Position) -> u32 {
        self.column.abs_diff(other.column)
    }
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}-{}-{})", self.row, self.layer, self.column)
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive, got {value}")))
    }
}

/// Time to reach top speed and brake straight back to rest: `2·vmax/accel`.
pub fn peak_time(accel: f64, vmax: f64) -> Result<f64> {
    check_positive("accel", accel)?;
    check_positive("vmax", vmax)?;
    Ok(2.0 * vmax / accel)
}

/// Distance covered during a full accelerate-then-brake cycle,
/// `¼·accel·peak²`, which equals `vmax²/accel`.
pub fn critical_distance(accel: f64, vmax: f64) -> Result<f64> {
    let t = peak_time(accel, vmax)?;
    Ok(0.25 * accel * t * t)
}

/// Single-axis travel time over `cells` cells.
///
/// Distances up to the critical distance use the triangular profile
/// `2·sqrt(d/accel)`; longer ones add a cruise segment at `vmax`.
pub fn axis_time(cells: u32, cell_size: f64, accel: f64, vmax: f64) -> Result<f64> {
    check_positive("cell_size", cell_size)?;
    let critical = critical_distance(accel, vmax)?;
    let d = f64::from(cells) * cell_size;
    if d <= critical {
        Ok(2.0 * (d / accel).sqrt())
    } else {
        Ok(2.0 * vmax / accel + (d - critical) / vmax)
    }
}

fn horizontal_time(cells: u32, p: &KinematicParams) -> Result<f64> {
    axis_time(cells, p.cell_width, p.accel_x, p.vmax_x)
}

fn vertical_time(cells: u32, p: &KinematicParams) -> Result<f64> {
    axis_time(cells, p.cell_height, p.accel_y, p.vmax_y)
}

/// Time between two positions: the slower of the horizontal and vertical
/// moves. Row changes are free.
pub fn travel_time(from: &Position, to: &Position, params: &KinematicParams) -> Result<f64> {
    from.validate()?;
    to.validate()?;
    let tx = horizontal_time(from.column_diff(to), params)?;
    let ty = vertical_time(from.layer_diff(to), params)?;
    Ok(tx.max(ty))
}

/// Cost of one task: both legs plus one pick and one release.
pub fn task_time(leg0: f64, leg1: f64, params: &KinematicParams) -> Result<f64> {
    if leg0.is_nan() || leg1.is_nan() || leg0 < 0.0 || leg1 < 0.0 {
        return Err(Error::Domain(format!(
            "task legs must be non-negative, got {leg0} and {leg1}"
        )));
    }
    Ok(leg0 + leg1 + 2.0 * params.handling_time)
}

pub fn schedule_time(task_times: &[f64]) -> f64 {
    task_times.iter().sum()
}

/// Precomputed travel times indexed by (layer difference, column difference).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMatrix {
    entries: Vec<[f64; COLUMNS as usize]>,
}

impl TimeMatrix {
    pub fn build(params: &KinematicParams) -> Result<Self> {
        params.validate()?;
        let horizontal = (0..COLUMNS)
            .map(|u| horizontal_time(u, params))
            .collect::<Result<Vec<_>>>()?;
        let mut entries = Vec::with_capacity(LAYERS as usize);
        for e in 0..LAYERS {
            let ty = vertical_time(e, params)?;
            let mut row = [0.0; COLUMNS as usize];
            for (slot, tx) in row.iter_mut().zip(&horizontal) {
                *slot = tx.max(ty);
            }
            entries.push(row);
        }
        Ok(TimeMatrix { entries })
    }

    /// Entry for a displacement of `layer_diff` layers and `column_diff` columns.
    ///
    /// Panics if either difference exceeds the warehouse extent.
    #[inline]
    pub fn get(&self, layer_diff: u32, column_diff: u32) -> f64 {
        self.entries[layer_diff as usize][column_diff as usize]
    }

    #[inline]
    pub fn between(&self, from: &Position, to: &Position) -> f64 {
        self.get(from.layer_diff(to), from.column_diff(to))
    }

    pub fn layers(&self) -> usize {
        self.entries.len()
    }

    pub fn columns(&self) -> usize {
        COLUMNS as usize
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.iter().map(|r| r.as_slice())
    }

    /// CSV with one row per layer difference; values in seconds, 6 decimals.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["layer_diff".to_string()];
        header.extend((0..COLUMNS).map(|u| u.to_string()));
        w.write_record(&header)?;
        for (e, row) in self.entries.iter().enumerate() {
            let mut rec = vec![e.to_string()];
            rec.extend(row.iter().map(|t| format!("{t:.6}")));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<matrix csv>", e))?;
        Ok(())
    }
}
