//! Random programs and small populations for property tests and benchmarks.

use rand::Rng;

use crate::hln::{Action, ActionKind, Process};
use crate::reaction::State;
use crate::species::SpeciesName;

/// A program of `0..=max_actions` actions over species `S0..S{max_species-1}`
/// with log-uniform rates in `[1e-3, 1e2)`.
pub fn random_program<R: Rng + ?Sized>(
    rng: &mut R,
    max_actions: usize,
    max_species: usize,
) -> Process {
    assert!(max_species > 0, "need at least one species name");
    let n = rng.gen_range(0..=max_actions);
    let actions = (0..n)
        .map(|_| {
            let kind = ActionKind::ALL[rng.gen_range(0..ActionKind::ALL.len())];
            let ops = (0..kind.arity())
                .map(|_| {
                    SpeciesName::new(&format!("S{}", rng.gen_range(0..max_species)))
                        .expect("generated names are identifiers")
                })
                .collect();
            let rate = 10f64.powf(rng.gen_range(-3.0..2.0));
            Action::new(kind, ops, rate).expect("generated actions are valid")
        })
        .collect();
    Process::new(actions)
}

/// A population over `len` species holding at most `max_total` molecules.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, len: usize, max_total: u64) -> State {
    let mut counts = vec![0u64; len];
    if len > 0 {
        for _ in 0..rng.gen_range(0..=max_total) {
            counts[rng.gen_range(0..len)] += 1;
        }
    }
    State::new(counts)
}
