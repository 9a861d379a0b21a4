//! Sampled time series and their CSV form.
//!
//! CSV layout: a header `time,<species...>` in declaration order, then one row
//! per grid time. Times are written as the shortest decimal that round-trips.

use std::fmt::{self, Display, Write as _};

use crate::species::SpeciesName;

/// Values of every species on a uniform time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub species: Vec<SpeciesName>,
    pub times: Vec<f64>,
    /// One row per grid time, one column per species.
    pub states: Vec<Vec<T>>,
}

impl<T: Copy> Trajectory<T> {
    pub fn column(&self, species: &str) -> Option<Vec<T>> {
        let i = self.species.iter().position(|s| s.as_str() == species)?;
        Some(self.states.iter().map(|row| row[i]).collect())
    }

    pub fn last(&self) -> Option<&[T]> {
        self.states.last().map(Vec::as_slice)
    }
}

impl<T: Display> Trajectory<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for s in &self.species {
            write!(out, ",{s}").unwrap();
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.states) {
            write!(out, "{t}").unwrap();
            for v in row {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Per-sample mean and sample standard deviation across independent runs.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub species: Vec<SpeciesName>,
    pub times: Vec<f64>,
    pub mean: Vec<Vec<f64>>,
    pub std: Vec<Vec<f64>>,
    pub runs: usize,
}

impl EnsembleStats {
    /// Aggregates integer trajectories that share a grid and species order.
    pub fn from_runs(runs: &[Trajectory<u64>]) -> Option<Self> {
        let first = runs.first()?;
        let (rows, cols) = (first.times.len(), first.species.len());
        let n = runs.len() as f64;
        let mut mean = vec![vec![0.0; cols]; rows];
        let mut std = vec![vec![0.0; cols]; rows];
        for r in 0..rows {
            for c in 0..cols {
                let m = runs.iter().map(|t| t.states[r][c] as f64).sum::<f64>() / n;
                mean[r][c] = m;
                if runs.len() > 1 {
                    let ss: f64 = runs
                        .iter()
                        .map(|t| {
                            let d = t.states[r][c] as f64 - m;
                            d * d
                        })
                        .sum();
                    std[r][c] = (ss / (n - 1.0)).sqrt();
                }
            }
        }
        Some(Self {
            species: first.species.clone(),
            times: first.times.clone(),
            mean,
            std,
            runs: runs.len(),
        })
    }

    pub fn mean_of(&self, species: &str) -> Option<Vec<f64>> {
        let i = self.species.iter().position(|s| s.as_str() == species)?;
        Some(self.mean.iter().map(|row| row[i]).collect())
    }

    /// CSV with `<species>_mean,<species>_std` column pairs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for s in &self.species {
            write!(out, ",{s}_mean,{s}_std").unwrap();
        }
        out.push('\n');
        for (r, t) in self.times.iter().enumerate() {
            write!(out, "{t}").unwrap();
            for c in 0..self.species.len() {
                write!(out, ",{},{}", self.mean[r][c], self.std[r][c]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for EnsembleStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

/// `n` evenly spaced times from 0 to `t_end` inclusive.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                t_end
            } else {
                t_end * i as f64 / last
            }
        })
        .collect()
}
