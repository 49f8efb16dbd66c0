//! Time grids.

use crate::error::{Error, Result};

/// Finite, non-negative and strictly ascending.
pub fn validate_time_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty time grid".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("non-finite time".into()));
    }
    if grid[0] < 0.0 {
        return Err(Error::InvalidGrid("times must be >= 0".into()));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "times must be strictly ascending (index {} -> {})",
            i,
            i + 1
        )));
    }
    Ok(())
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (points - 1) as f64;
            (0..points)
                .map(|i| if i == points - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// `points` log-spaced values from `start` to `stop` inclusive.
pub fn geomspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    linspace(start.ln(), stop.ln(), points)
        .into_iter()
        .enumerate()
        .map(|(i, x)| match i {
            0 => start,
            _ if i == points - 1 => stop,
            _ => x.exp(),
        })
        .collect()
}
