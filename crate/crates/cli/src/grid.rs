//! Grid specifications of the form `start:stop:points[:log|lin]`.

use std::fmt;

use modspec::optimizer::log_spaced;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Lin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn parse(text: &str, default_spacing: Spacing) -> CliResult<Self> {
        let bad = |msg: &str| CliError::Usage(format!("grid {text:?}: {msg}"));
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(bad("expected start:stop:points[:log|lin]"));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
        let stop: f64 = parts[1].parse().map_err(|_| bad("bad stop"))?;
        let points: usize = parts[2].parse().map_err(|_| bad("bad point count"))?;
        let spacing = match parts.get(3) {
            None => default_spacing,
            Some(&"log") => Spacing::Log,
            Some(&"lin") => Spacing::Lin,
            Some(other) => return Err(bad(&format!("unknown spacing {other:?}"))),
        };
        if !(start.is_finite() && stop.is_finite()) || stop <= start || points < 2 {
            return Err(bad("need finite start < stop and at least two points"));
        }
        if spacing == Spacing::Log && start <= 0.0 {
            return Err(bad("log spacing needs a positive start"));
        }
        Ok(Self {
            start,
            stop,
            points,
            spacing,
        })
    }

    pub fn build(&self) -> CliResult<Vec<f64>> {
        match self.spacing {
            Spacing::Log => Ok(log_spaced(self.start, self.stop, self.points)?),
            Spacing::Lin => {
                let n = self.points;
                let step = (self.stop - self.start) / (n - 1) as f64;
                let mut grid: Vec<f64> = (0..n).map(|i| self.start + i as f64 * step).collect();
                grid[n - 1] = self.stop;
                Ok(grid)
            }
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spacing = match self.spacing {
            Spacing::Log => "log",
            Spacing::Lin => "lin",
        };
        write!(
            f,
            "{}:{}:{}:{}",
            crate::output::fmt_float(self.start),
            crate::output::fmt_float(self.stop),
            self.points,
            spacing
        )
    }
}
