//! Built-in G-protein cycle models.
//!
//! `gprotein` is the full reaction network including receptor synthesis.
//! `gprotein-hln` is the notation program, which cannot express synthesis.
//! Both start from the same amounts (molecule counts in a 1e-12 L volume).

use crate::error::{Error, Result};
use crate::hln::{parse_program, Process};
use crate::pi::ProcessSystem;
use crate::reaction::{Reaction, ReactionNetwork, State};
use crate::species::sp;
use crate::translate::{to_pi, to_reactions};

pub const GPROTEIN_HLN: &str = "\
bind(Gd, Gbg, G, 1.0);
bind(R, L, RL, 3.32e-6);
activateAnddissociate(G, RL, Ga, Gbg, 1.0e-5);
dissociate(RL, R, L, 0.01);
hydrolyze(Ga, Gd, 0.11);
degrade(R, 4e-4);
degrade(RL, 4e-3)
";

const INITIAL: [(&str, u64); 7] = [
    ("L", 602_200),
    ("R", 10_000),
    ("RL", 0),
    ("G", 7_000),
    ("Gd", 3_000),
    ("Gbg", 3_000),
    ("Ga", 0),
];

#[derive(Clone, Debug, PartialEq)]
pub struct BuiltinModel {
    pub name: String,
    pub network: ReactionNetwork,
    pub initial: State,
    pub hln_source: Option<String>,
    pub t_end: f64,
}

impl BuiltinModel {
    pub fn process(&self) -> Option<Result<Process>> {
        self.hln_source
            .as_deref()
            .map(|src| parse_program(src).map_err(Error::from))
    }

    /// The translated process system, started from `initial`.
    pub fn process_system(&self) -> Result<ProcessSystem> {
        let p = self.process().ok_or_else(|| {
            Error::Config(format!("model {} has no notation source", self.name))
        })??;
        let sys = to_pi(&p);
        let initial = sys.state_from(
            self.network
                .species()
                .iter()
                .zip(self.initial.iter())
                .map(|(s, &n)| (s.as_str(), n)),
        )?;
        sys.with_initial(initial)
    }
}

pub fn gprotein_network() -> BuiltinModel {
    let ma = |r: &[&str], p: &[&str], k: f64| {
        Reaction::mass_action(r.iter().map(|x| sp(x)), p.iter().map(|x| sp(x)), k)
            .expect("valid builtin reaction")
    };
    let reactions = vec![
        ma(&["L", "R"], &["RL"], 3.32e-6),
        ma(&["RL"], &["L", "R"], 0.01),
        ma(&["Gd", "Gbg"], &["G"], 1.0),
        ma(&["G", "RL"], &["Ga", "Gbg", "RL"], 1e-5),
        ma(&["R"], &[], 4e-4),
        Reaction::zeroth_order([sp("R")], 4.0).expect("valid builtin reaction"),
        ma(&["RL"], &[], 4e-3),
        ma(&["Ga"], &["Gd"], 0.11),
    ];
    let species = INITIAL.iter().map(|(n, _)| sp(n)).collect();
    let network = ReactionNetwork::new(species, reactions).expect("valid builtin network");
    let initial = network.state_from(INITIAL).expect("known species");
    BuiltinModel {
        name: "gprotein".into(),
        network,
        initial,
        hln_source: None,
        t_end: 600.0,
    }
}

pub fn gprotein_hln() -> BuiltinModel {
    let process = parse_program(GPROTEIN_HLN).expect("builtin program parses");
    let network = to_reactions(&process);
    let initial = network.state_from(INITIAL).expect("known species");
    BuiltinModel {
        name: "gprotein-hln".into(),
        network,
        initial,
        hln_source: Some(GPROTEIN_HLN.into()),
        t_end: 600.0,
    }
}

pub const BUILTIN_NAMES: [&str; 2] = ["gprotein", "gprotein-hln"];

pub fn builtin(name: &str) -> Option<BuiltinModel> {
    match name {
        "gprotein" => Some(gprotein_network()),
        "gprotein-hln" => Some(gprotein_hln()),
        _ => None,
    }
}
