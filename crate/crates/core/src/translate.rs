//! Compilation of notation programs into reaction networks and into process
//! systems.
//!
//! Both translations are homomorphic: each action maps independently and a
//! program maps to the union of its actions' images. Duplicate images are
//! collapsed (set union). An action is skipped by both translations when an
//! earlier action already produced the same reaction, which keeps
//! `to_pi(p).reachable_reactions()` equal to `to_reactions(p)`.

use crate::hln::{Action, ActionKind, Process};
use crate::pi::{Branch, Channel, ProcessSystem, SpeciesAutomaton};
use crate::reaction::{Reaction, ReactionNetwork};
use crate::species::SpeciesName;

/// Deterministic fresh channel names: `ch<k>` for the action at index `k`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ChannelNamer {
    counter: usize,
}

impl ChannelNamer {
    pub fn fresh(&mut self, action_index: usize) -> String {
        self.counter += 1;
        format!("ch{action_index}")
    }

    pub fn issued(&self) -> usize {
        self.counter
    }
}

/// The reaction denoted by a single action.
pub fn reaction_of(action: &Action) -> Reaction {
    let ops = action.operands();
    let s = |i: usize| ops[i].clone();
    let (reactants, products) = match action.kind() {
        ActionKind::Bind | ActionKind::Dimerize => (vec![s(0), s(1)], vec![s(2)]),
        ActionKind::Activate | ActionKind::Phosphorylate => (vec![s(0), s(1)], vec![s(2), s(1)]),
        ActionKind::ActivateAndDissociate => (vec![s(0), s(1)], vec![s(2), s(3), s(1)]),
        ActionKind::Dissociate => (vec![s(0)], vec![s(1), s(2)]),
        ActionKind::Hydrolyze => (vec![s(0)], vec![s(1)]),
        ActionKind::Degrade => (vec![s(0)], vec![]),
    };
    Reaction::mass_action(reactants, products, action.rate()).expect("actions carry valid rates")
}

/// Indices of actions whose reaction was not already produced earlier.
fn distinct_actions(p: &Process) -> Vec<(usize, &Action, Reaction)> {
    let mut seen: Vec<Reaction> = Vec::new();
    let mut out = Vec::new();
    for (i, a) in p.actions().iter().enumerate() {
        let r = reaction_of(a);
        if !seen.contains(&r) {
            seen.push(r.clone());
            out.push((i, a, r));
        }
    }
    out
}

/// Translates a program into a chemical reaction network. The species list is
/// in first-mention order.
pub fn to_reactions(p: &Process) -> ReactionNetwork {
    let reactions = distinct_actions(p).into_iter().map(|(_, _, r)| r).collect();
    ReactionNetwork::new(p.species(), reactions).expect("actions mention every species")
}

/// Translates a program into a process system with one automaton per species
/// (first-mention order) and one fresh channel per binding-type action.
pub fn to_pi(p: &Process) -> ProcessSystem {
    let species = p.species();
    let mut automata: Vec<SpeciesAutomaton> = species
        .iter()
        .cloned()
        .map(SpeciesAutomaton::inert)
        .collect();
    let slot = |name: &SpeciesName| species.iter().position(|s| s == name).expect("known");
    let mut channels = Vec::new();
    let mut namer = ChannelNamer::default();

    for (k, action, _) in distinct_actions(p) {
        let ops = action.operands();
        let rate = action.rate();
        let mut add = |who: &SpeciesName, b: Branch| automata[slot(who)].branches.push(b);
        match action.kind() {
            ActionKind::Bind | ActionKind::Dimerize => {
                let ch = namer.fresh(k);
                add(&ops[0], Branch::send(&ch, vec![ops[2].clone()]));
                add(&ops[1], Branch::recv(&ch, vec![]));
                channels.push(Channel { name: ch, rate });
            }
            ActionKind::Activate | ActionKind::Phosphorylate => {
                let ch = namer.fresh(k);
                add(&ops[0], Branch::send(&ch, vec![ops[2].clone()]));
                add(&ops[1], Branch::recv(&ch, vec![ops[1].clone()]));
                channels.push(Channel { name: ch, rate });
            }
            ActionKind::ActivateAndDissociate => {
                // The substrate receives; the activator sends and persists.
                let ch = namer.fresh(k);
                add(
                    &ops[0],
                    Branch::recv(&ch, vec![ops[2].clone(), ops[3].clone()]),
                );
                add(&ops[1], Branch::send(&ch, vec![ops[1].clone()]));
                channels.push(Channel { name: ch, rate });
            }
            ActionKind::Dissociate => {
                add(
                    &ops[0],
                    Branch::delay(rate, vec![ops[1].clone(), ops[2].clone()]),
                );
            }
            ActionKind::Hydrolyze => {
                add(&ops[0], Branch::delay(rate, vec![ops[1].clone()]));
            }
            ActionKind::Degrade => {
                add(&ops[0], Branch::delay(rate, vec![]));
            }
        }
    }
    ProcessSystem::new(channels, automata).expect("translation yields a closed system")
}
