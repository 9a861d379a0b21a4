//! Exact stochastic simulation (Gillespie direct method).
//!
//! Reaction networks and process systems are driven by the same scheduler.
//! Both backends present their transitions in a canonical order (sorted by
//! the reaction each transition performs), so a network and a process system
//! that generate the same reactions produce bit-identical trajectories for a
//! given seed.
//!
//! Random numbers come from ChaCha8 seeded with `seed_from_u64`, whose output
//! is specified and platform independent. Ensemble run `i` uses seed
//! `base_seed + i` (wrapping).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pi::{PiEvent, ProcessSystem};
use crate::reaction::{IndexedReaction, ReactionNetwork, State};
use crate::species::SpeciesName;
use crate::trajectory::{uniform_grid, EnsembleStats, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsaConfig {
    /// Final time in seconds.
    pub t_end: f64,
    /// Number of points on the uniform sampling grid, including 0 and `t_end`.
    pub sample_count: usize,
    pub seed: u64,
    pub runs: usize,
}

impl Default for SsaConfig {
    fn default() -> Self {
        Self {
            t_end: 600.0,
            sample_count: 601,
            seed: 0,
            runs: 1,
        }
    }
}

impl SsaConfig {
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
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.t_end, self.sample_count)
    }
}

/// A finite set of transitions over integer copy numbers.
pub trait StochasticModel: Sync {
    fn species(&self) -> Vec<SpeciesName>;

    fn transition_count(&self) -> usize;

    fn propensity(&self, transition: usize, counts: &[u64]) -> f64;

    /// Fires one transition in place; on failure returns the index of the
    /// species that would go negative.
    fn fire(&self, transition: usize, counts: &mut [u64]) -> std::result::Result<(), usize>;
}

/// A reaction network with reactions resolved to indices and put in
/// canonical order.
#[derive(Clone, Debug)]
pub struct CompiledNetwork {
    species: Vec<SpeciesName>,
    reactions: Vec<IndexedReaction>,
}

impl CompiledNetwork {
    pub fn new(net: &ReactionNetwork) -> Self {
        let mut order: Vec<usize> = (0..net.reactions().len()).collect();
        order.sort_by(|&a, &b| {
            net.reactions()[a]
                .sort_key()
                .cmp(&net.reactions()[b].sort_key())
        });
        let indexed = net.indexed();
        Self {
            species: net.species().to_vec(),
            reactions: order.into_iter().map(|i| indexed[i].clone()).collect(),
        }
    }
}

impl StochasticModel for CompiledNetwork {
    fn species(&self) -> Vec<SpeciesName> {
        self.species.clone()
    }

    fn transition_count(&self) -> usize {
        self.reactions.len()
    }

    fn propensity(&self, transition: usize, counts: &[u64]) -> f64 {
        self.reactions[transition].propensity(counts)
    }

    fn fire(&self, transition: usize, counts: &mut [u64]) -> std::result::Result<(), usize> {
        self.reactions[transition].fire(counts)
    }
}

/// A process system's delay and handshake templates in canonical order.
#[derive(Clone, Debug)]
pub struct CompiledPi {
    species: Vec<SpeciesName>,
    events: Vec<PiEvent>,
}

impl CompiledPi {
    pub fn new(sys: &ProcessSystem) -> Self {
        Self {
            species: sys.species(),
            events: sys.events(),
        }
    }
}

impl StochasticModel for CompiledPi {
    fn species(&self) -> Vec<SpeciesName> {
        self.species.clone()
    }

    fn transition_count(&self) -> usize {
        self.events.len()
    }

    fn propensity(&self, transition: usize, counts: &[u64]) -> f64 {
        self.events[transition].propensity(counts)
    }

    fn fire(&self, transition: usize, counts: &mut [u64]) -> std::result::Result<(), usize> {
        self.events[transition].fire(counts)
    }
}

/// Event-by-event direct-method simulation.
pub struct Stepper<'m, M: StochasticModel> {
    model: &'m M,
    counts: Vec<u64>,
    time: f64,
    rng: ChaCha8Rng,
    propensities: Vec<f64>,
}

/// Outcome of drawing the next event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Draw {
    /// The next event fires at `time` (not yet applied).
    Fire { time: f64, transition: usize },
    /// Total propensity is zero; the state is absorbing.
    Absorbed,
}

impl<'m, M: StochasticModel> Stepper<'m, M> {
    pub fn new(model: &'m M, initial: &State, seed: u64) -> Self {
        Self {
            model,
            counts: initial.to_vec(),
            time: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            propensities: vec![0.0; model.transition_count()],
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Samples the waiting time and the next transition without applying it.
    pub fn draw(&mut self) -> Draw {
        let mut total = 0.0;
        for (i, a) in self.propensities.iter_mut().enumerate() {
            *a = self.model.propensity(i, &self.counts);
            total += *a;
        }
        if total <= 0.0 {
            return Draw::Absorbed;
        }
        // 1 - U lies in (0, 1], so the logarithm is finite.
        let u: f64 = self.rng.gen();
        let wait = -(1.0 - u).ln() / total;
        let target = self.rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &a) in self.propensities.iter().enumerate() {
            if a > 0.0 {
                acc += a;
                chosen = Some(i);
                if target < acc {
                    break;
                }
            }
        }
        Draw::Fire {
            time: self.time + wait,
            transition: chosen.expect("positive total propensity"),
        }
    }

    pub fn apply(&mut self, time: f64, transition: usize) -> Result<()> {
        let model = self.model;
        model
            .fire(transition, &mut self.counts)
            .map_err(|i| Error::Underflow(model.species()[i].to_string()))?;
        self.time = time;
        Ok(())
    }

    /// Runs to the end of `grid`, recording the state in force just before
    /// each grid time.
    pub fn sample(&mut self, grid: &[f64]) -> Result<Vec<Vec<u64>>> {
        let mut rows = Vec::with_capacity(grid.len());
        let mut next = 0;
        while next < grid.len() {
            let draw = self.draw();
            let fire_at = match draw {
                Draw::Fire { time, .. } => time,
                Draw::Absorbed => f64::INFINITY,
            };
            while next < grid.len() && grid[next] <= fire_at {
                rows.push(self.counts.clone());
                next += 1;
            }
            if let Draw::Fire { time, transition } = draw {
                if next < grid.len() {
                    self.apply(time, transition)?;
                }
            }
        }
        Ok(rows)
    }
}

fn check_len(model: &impl StochasticModel, s0: &State) -> Result<()> {
    let expected = model.species().len();
    if s0.len() == expected {
        Ok(())
    } else {
        Err(Error::StateLength {
            expected,
            found: s0.len(),
        })
    }
}

fn run_model<M: StochasticModel>(
    model: &M,
    s0: &State,
    cfg: &SsaConfig,
    seed: u64,
) -> Result<Trajectory<u64>> {
    let grid = cfg.grid();
    let states = Stepper::new(model, s0, seed).sample(&grid)?;
    Ok(Trajectory {
        species: model.species(),
        times: grid,
        states,
    })
}

/// Simulates one run of a reaction network from `s0` with `cfg.seed`.
pub fn simulate(net: &ReactionNetwork, s0: &State, cfg: &SsaConfig) -> Result<Trajectory<u64>> {
    cfg.validate()?;
    let model = CompiledNetwork::new(net);
    check_len(&model, s0)?;
    run_model(&model, s0, cfg, cfg.seed)
}

/// Simulates one run of a process system from its initial population.
pub fn simulate_pi(sys: &ProcessSystem, cfg: &SsaConfig) -> Result<Trajectory<u64>> {
    cfg.validate()?;
    let model = CompiledPi::new(sys);
    run_model(&model, sys.initial(), cfg, cfg.seed)
}

/// `cfg.runs` independent runs of any model, executed in parallel.
pub fn ensemble_runs<M: StochasticModel>(
    model: &M,
    s0: &State,
    cfg: &SsaConfig,
) -> Result<Vec<Trajectory<u64>>> {
    cfg.validate()?;
    check_len(model, s0)?;
    (0..cfg.runs)
        .into_par_iter()
        .map(|i| run_model(model, s0, cfg, cfg.seed.wrapping_add(i as u64)))
        .collect()
}

pub fn ensemble(net: &ReactionNetwork, s0: &State, cfg: &SsaConfig) -> Result<EnsembleStats> {
    let runs = ensemble_runs(&CompiledNetwork::new(net), s0, cfg)?;
    Ok(EnsembleStats::from_runs(&runs).expect("at least one run"))
}

pub fn ensemble_pi(sys: &ProcessSystem, cfg: &SsaConfig) -> Result<EnsembleStats> {
    let runs = ensemble_runs(&CompiledPi::new(sys), sys.initial(), cfg)?;
    Ok(EnsembleStats::from_runs(&runs).expect("at least one run"))
}
