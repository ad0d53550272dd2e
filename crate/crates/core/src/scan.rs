//! Ordered scan samples and their CSV form.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit of a scan abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "kHz")]
    KHz,
    #[serde(rename = "um")]
    Micrometre,
    #[serde(rename = "1/ms")]
    PerMs,
    #[serde(rename = "ms")]
    Ms,
    #[serde(rename = "rad/s")]
    RadPerS,
}

impl Unit {
    /// Inverse of the `Display` form.
    pub fn parse(s: &str) -> Option<Unit> {
        [Unit::KHz, Unit::Micrometre, Unit::PerMs, Unit::Ms, Unit::RadPerS].into_iter().find(|u| u.to_string() == s)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::KHz => "kHz",
            Unit::Micrometre => "um",
            Unit::PerMs => "1/ms",
            Unit::Ms => "ms",
            Unit::RadPerS => "rad/s",
        })
    }
}

/// What the sample values represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    #[default]
    Transfer,
    Adiabaticity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub abscissa: f64,
    /// Transfer probability, or the adiabaticity parameter for profiles.
    pub value: f64,
    pub stderr: Option<f64>,
}

/// Samples in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub unit: Unit,
    #[serde(default)]
    pub quantity: Quantity,
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    pub fn new(unit: Unit, points: Vec<ScanPoint>) -> Self {
        ScanResult { unit, quantity: Quantity::Transfer, points }
    }

    /// Build from parallel abscissa and value slices without errors.
    pub fn from_values(unit: Unit, abscissas: &[f64], values: &[f64]) -> Self {
        let points = abscissas
            .iter()
            .zip(values)
            .map(|(&abscissa, &value)| ScanPoint { abscissa, value, stderr: None })
            .collect();
        ScanResult::new(unit, points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn abscissas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.abscissa).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Same samples with the abscissa mapped through `f` and relabelled.
    pub fn map_abscissa(&self, unit: Unit, f: impl Fn(f64) -> f64) -> Self {
        let points = self.points.iter().map(|p| ScanPoint { abscissa: f(p.abscissa), ..*p }).collect();
        ScanResult { unit, quantity: self.quantity, points }
    }

    pub fn max_value(&self) -> Option<f64> {
        self.points.iter().map(|p| p.value).reduce(f64::max)
    }

    /// CSV with a header row and `.` decimals.
    ///
    /// Transfer scans over `1/ms` use `inv_tau_per_ms,p1,stderr`; adiabaticity
    /// profiles use `t_ms,adiabaticity`; every other scan uses
    /// `abscissa,<unit>,p1,stderr` with the unit repeated on each row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let se = |p: &ScanPoint| p.stderr.map(|s| s.to_string()).unwrap_or_default();
        match (self.quantity, self.unit) {
            (Quantity::Adiabaticity, _) => {
                out.push_str("t_ms,adiabaticity\n");
                for p in &self.points {
                    let _ = writeln!(out, "{},{}", p.abscissa, p.value);
                }
            }
            (Quantity::Transfer, Unit::PerMs) => {
                out.push_str("inv_tau_per_ms,p1,stderr\n");
                for p in &self.points {
                    let _ = writeln!(out, "{},{},{}", p.abscissa, p.value, se(p));
                }
            }
            (Quantity::Transfer, unit) => {
                let _ = writeln!(out, "abscissa,{unit},p1,stderr");
                for p in &self.points {
                    let _ = writeln!(out, "{},{unit},{},{}", p.abscissa, p.value, se(p));
                }
            }
        }
        out
    }

    /// Parse the CSV written by [`ScanResult::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::config("empty CSV"))?.trim();
        let (unit, quantity) = match header {
            "inv_tau_per_ms,p1,stderr" => (Unit::PerMs, Quantity::Transfer),
            "t_ms,adiabaticity" => (Unit::Ms, Quantity::Adiabaticity),
            h => {
                let unit = h
                    .strip_prefix("abscissa,")
                    .and_then(|r| r.strip_suffix(",p1,stderr"))
                    .and_then(Unit::parse)
                    .ok_or_else(|| Error::config(format!("unrecognised CSV header `{h}`")))?;
                (unit, Quantity::Transfer)
            }
        };
        let num = |s: &str, line: usize| {
            s.trim().parse::<f64>().map_err(|_| Error::config(format!("line {line}: `{s}` is not a number")))
        };
        let mut points = Vec::new();
        for (k, line) in lines.enumerate() {
            let n = k + 2;
            let cols: Vec<&str> = line.split(',').collect();
            let (x, v, se) = match (quantity, unit, cols.as_slice()) {
                (Quantity::Adiabaticity, _, [x, v]) => (x, v, ""),
                (Quantity::Transfer, Unit::PerMs, [x, v, se]) => (x, v, *se),
                (Quantity::Transfer, _, [x, u, v, se]) if Unit::parse(u.trim()) == Some(unit) => (x, v, *se),
                _ => return Err(Error::config(format!("line {n}: unexpected columns `{line}`"))),
            };
            let stderr = if se.trim().is_empty() { None } else { Some(num(se, n)?) };
            points.push(ScanPoint { abscissa: num(x, n)?, value: num(v, n)?, stderr });
        }
        Ok(ScanResult { unit, quantity, points })
    }

    fn longest_run(&self, level: f64) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        let mut start = None;
        for (i, p) in self.points.iter().enumerate() {
            if p.value >= level {
                let s = *start.get_or_insert(i);
                if best.is_none_or(|(a, b)| i - s > b - a) {
                    best = Some((s, i));
                }
            } else {
                start = None;
            }
        }
        best
    }

    fn crossing(&self, inside: usize, outside: usize, level: f64) -> f64 {
        let (a, b) = (&self.points[inside], &self.points[outside]);
        let f = (a.value - level) / (a.value - b.value);
        a.abscissa + f * (b.abscissa - a.abscissa)
    }

    // Walk outward from `from` in direction `dir` until the value drops below
    // `level`; interpolated crossing, or the grid end when it never does.
    fn walk_out(&self, from: usize, dir: isize, level: f64) -> f64 {
        let mut i = from;
        loop {
            let j = i as isize + dir;
            if j < 0 || j as usize >= self.points.len() {
                return self.points[i].abscissa;
            }
            let j = j as usize;
            if self.points[j].value < level {
                return self.crossing(i, j, level);
            }
            i = j;
        }
    }

    /// Interpolated bounds of the longest contiguous run with values ≥ `level`.
    pub fn crossings(&self, level: f64) -> Option<(f64, f64)> {
        let (a, b) = self.longest_run(level)?;
        Some((self.walk_out(a, -1, level), self.walk_out(b, 1, level)))
    }

    /// Width of the longest run at or above `level`.
    pub fn plateau_width(&self, level: f64) -> Option<f64> {
        self.crossings(level).map(|(lo, hi)| hi - lo)
    }

    /// Distance over which each edge of the `upper` plateau falls to `lower`:
    /// `(left, right)`.
    pub fn edge_widths(&self, upper: f64, lower: f64) -> Option<(f64, f64)> {
        let (a, b) = self.longest_run(upper)?;
        let (lo_u, hi_u) = (self.walk_out(a, -1, upper), self.walk_out(b, 1, upper));
        let (lo_l, hi_l) = (self.walk_out(a, -1, lower), self.walk_out(b, 1, lower));
        Some((lo_u - lo_l, hi_l - hi_u))
    }
}
