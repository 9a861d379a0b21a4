//! Deterministic mass-action ODEs over molecule counts.
//!
//! For each species `i`, `dx_i/dt = Σ_r ν_ir · v_r(x)`, where `ν_ir` is the
//! net stoichiometry and `v_r` the continuum mass-action rate
//! `k · Π x_j^m / m!` (so a homodimer contributes `k x²/2`); zeroth-order
//! reactions contribute their constant. Rates are the same discrete rates
//! used by the stochastic simulator, so the two outputs are directly
//! comparable.
//!
//! Integration uses the Dormand–Prince 5(4) embedded pair with local error
//! control. Steps are shortened to land exactly on grid times.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hln::format_rate;
use crate::reaction::{RateLaw, ReactionNetwork};
use crate::species::SpeciesName;
use crate::trajectory::{uniform_grid, Trajectory};

#[derive(Clone, Debug)]
struct RateTerm {
    factors: Vec<(usize, u32)>,
    rate: f64,
    kind: RateLaw,
    delta: Vec<(usize, i64)>,
}

impl RateTerm {
    fn flux(&self, x: &[f64]) -> f64 {
        match self.kind {
            RateLaw::ZerothOrder => self.rate,
            RateLaw::MassAction => self.factors.iter().fold(self.rate, |acc, &(i, m)| {
                let xi = x[i];
                acc * match m {
                    1 => xi,
                    2 => xi * xi / 2.0,
                    _ => xi.powi(m as i32) / (1..=m).product::<u32>() as f64,
                }
            }),
        }
    }
}

/// One additive term of a species' right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeTerm {
    /// Net stoichiometric coefficient of the species in the reaction.
    pub coefficient: i64,
    pub rate: f64,
    pub kind: RateLaw,
    /// `(species index, exponent)` pairs.
    pub factors: Vec<(usize, u32)>,
}

/// The autonomous vector field of a reaction network.
#[derive(Clone, Debug)]
pub struct OdeSystem {
    species: Vec<SpeciesName>,
    terms: Vec<RateTerm>,
}

pub fn build_ode(net: &ReactionNetwork) -> OdeSystem {
    let terms = net
        .indexed()
        .into_iter()
        .zip(net.reactions())
        .map(|(ir, r)| RateTerm {
            factors: ir.reactants.clone(),
            rate: ir.rate,
            kind: ir.kind,
            delta: net
                .species()
                .iter()
                .enumerate()
                .filter_map(|(i, s)| {
                    let d = r.net_change(s);
                    (d != 0).then_some((i, d))
                })
                .collect(),
        })
        .collect();
    OdeSystem {
        species: net.species().to_vec(),
        terms,
    }
}

impl OdeSystem {
    pub fn species(&self) -> &[SpeciesName] {
        &self.species
    }

    pub fn dimension(&self) -> usize {
        self.species.len()
    }

    /// Writes `f(x)` into `dx`.
    pub fn eval(&self, x: &[f64], dx: &mut [f64]) {
        dx.iter_mut().for_each(|v| *v = 0.0);
        for t in &self.terms {
            let v = t.flux(x);
            for &(i, d) in &t.delta {
                dx[i] += d as f64 * v;
            }
        }
    }

    pub fn derivative(&self, x: &[f64]) -> Vec<f64> {
        let mut dx = vec![0.0; self.dimension()];
        self.eval(x, &mut dx);
        dx
    }

    /// Right-hand-side terms of the equation for species `i`.
    pub fn terms_for(&self, i: usize) -> Vec<OdeTerm> {
        self.terms
            .iter()
            .filter_map(|t| {
                let (_, d) = t.delta.iter().find(|&&(j, _)| j == i)?;
                Some(OdeTerm {
                    coefficient: *d,
                    rate: t.rate,
                    kind: t.kind,
                    factors: t.factors.clone(),
                })
            })
            .collect()
    }

    /// Human-readable listing, one equation per species, e.g.
    /// `d[G]/dt = -1e-5*[G]*[RL] + 1.0*[Gbg]*[Gd]`.
    pub fn equations(&self) -> Vec<String> {
        (0..self.dimension())
            .map(|i| {
                let mut line = format!("d[{}]/dt =", self.species[i]);
                let terms = self.terms_for(i);
                if terms.is_empty() {
                    line.push_str(" 0");
                }
                for (n, t) in terms.iter().enumerate() {
                    let mut coef = t.rate * t.coefficient.unsigned_abs() as f64;
                    let mut factors = String::new();
                    for &(j, m) in &t.factors {
                        if m == 2 {
                            coef /= 2.0;
                        }
                        for _ in 0..m {
                            write!(factors, "*[{}]", self.species[j]).unwrap();
                        }
                    }
                    let sign = match (n, t.coefficient < 0) {
                        (0, true) => " -",
                        (0, false) => "",
                        (_, true) => " -",
                        (_, false) => " +",
                    };
                    write!(line, "{sign} {}{factors}", format_rate(coef)).unwrap();
                }
                line
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeConfig {
    pub t_end: f64,
    pub sample_count: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            t_end: 600.0,
            sample_count: 601,
            rel_tol: 1e-6,
            abs_tol: 1e-8,
        }
    }
}

impl OdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::Config(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.sample_count < 2 {
            return Err(Error::Config(format!(
                "sample_count must be at least 2, got {}",
                self.sample_count
            )));
        }
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// The fifth-order weights equal the last row of `A`, so the final stage is
// f at the new solution and is reused as the next step's first stage.
/// Difference between fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 50_000_000;

struct Dopri<'a> {
    sys: &'a OdeSystem,
    rtol: f64,
    atol: f64,
    k: [Vec<f64>; 7],
    scratch: Vec<f64>,
}

impl<'a> Dopri<'a> {
    fn new(sys: &'a OdeSystem, cfg: &OdeConfig) -> Self {
        let n = sys.dimension();
        Self {
            sys,
            rtol: cfg.rel_tol,
            atol: cfg.abs_tol,
            k: std::array::from_fn(|_| vec![0.0; n]),
            scratch: vec![0.0; n],
        }
    }

    fn error_norm(&self, y: &[f64], y_new: &[f64], err: &[f64]) -> f64 {
        if y.is_empty() {
            return 0.0;
        }
        let sum: f64 = (0..y.len())
            .map(|i| {
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                (err[i] / sc).powi(2)
            })
            .sum();
        (sum / y.len() as f64).sqrt()
    }

    fn initial_step(&mut self, y: &[f64], span: f64) -> f64 {
        let n = y.len();
        if n == 0 {
            return span;
        }
        let f0 = self.k[0].clone();
        let sc: Vec<f64> = y.iter().map(|v| self.atol + self.rtol * v.abs()).collect();
        let rms = |v: &[f64]| {
            (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n as f64).sqrt()
        };
        let d0 = rms(y);
        let d1 = rms(&f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let y1: Vec<f64> = y.iter().zip(&f0).map(|(a, b)| a + h0 * b).collect();
        let mut f1 = vec![0.0; n];
        self.sys.eval(&y1, &mut f1);
        let diff: Vec<f64> = f1.iter().zip(&f0).map(|(a, b)| a - b).collect();
        let d2 = rms(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 5.0)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// One trial step of size `h` from `y`; `k[0]` must hold `f(y)`. Writes
    /// the fifth-order solution to `y_new` and returns the scaled error norm.
    #[allow(clippy::needless_range_loop)]
    fn try_step(&mut self, y: &[f64], h: f64, y_new: &mut [f64], err: &mut [f64]) -> f64 {
        let n = y.len();
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().enumerate().take(s) {
                    acc += a * self.k[j][i];
                }
                self.scratch[i] = y[i] + h * acc;
            }
            let (_, tail) = self.k.split_at_mut(s);
            self.sys.eval(&self.scratch, &mut tail[0]);
        }
        // Stage 6 was evaluated at the fifth-order solution.
        y_new.copy_from_slice(&self.scratch);
        for i in 0..n {
            let mut e = 0.0;
            for (s, w) in E.iter().enumerate() {
                e += w * self.k[s][i];
            }
            err[i] = h * e;
        }
        self.error_norm(y, y_new, err)
    }
}

/// Integrates `sys` from `x0` and samples the solution on a uniform grid of
/// `cfg.sample_count` points over `[0, cfg.t_end]`.
pub fn integrate(sys: &OdeSystem, x0: &[f64], cfg: &OdeConfig) -> Result<Trajectory<f64>> {
    cfg.validate()?;
    if x0.len() != sys.dimension() {
        return Err(Error::StateLength {
            expected: sys.dimension(),
            found: x0.len(),
        });
    }
    if let Some(v) = x0.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Domain(format!(
            "initial values must be finite and nonnegative, got {v}"
        )));
    }

    let grid = uniform_grid(cfg.t_end, cfg.sample_count);
    let n = sys.dimension();
    let mut states = Vec::with_capacity(grid.len());
    states.push(x0.to_vec());

    let mut dp = Dopri::new(sys, cfg);
    let mut y = x0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut t = 0.0;
    sys.eval(&y, &mut dp.k[0]);
    let mut h = dp.initial_step(&y, cfg.t_end);
    let mut steps = 0usize;
    let mut last_rejected = false;

    for &target in &grid[1..] {
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Domain(format!(
                    "step budget of {MAX_STEPS} exhausted at t = {t}"
                )));
            }
            let remaining = target - t;
            let landing = h >= remaining;
            let h_try = if landing { remaining } else { h };
            if h_try <= 16.0 * f64::EPSILON * t.abs().max(1.0) && !landing {
                return Err(Error::StepUnderflow { t, h: h_try });
            }
            let e = dp.try_step(&y, h_try, &mut y_new, &mut err);
            if e.is_finite() && e <= 1.0 {
                t = if landing { target } else { t + h_try };
                std::mem::swap(&mut y, &mut y_new);
                let (first, rest) = dp.k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
                let mut factor = if e == 0.0 { 5.0 } else { 0.9 * e.powf(-0.2) };
                factor = factor.clamp(0.2, 5.0);
                if last_rejected {
                    factor = factor.min(1.0);
                }
                last_rejected = false;
                // A landing step may be artificially short; do not let it
                // shrink the working step size.
                h = if landing {
                    h.max(h_try * factor)
                } else {
                    h_try * factor
                };
            } else {
                last_rejected = true;
                let factor = if e.is_finite() {
                    (0.9 * e.powf(-0.2)).clamp(0.2, 1.0)
                } else {
                    0.2
                };
                h = h_try * factor;
                if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        states.push(y.clone());
    }

    Ok(Trajectory {
        species: sys.species.clone(),
        times: grid,
        states,
    })
}
