//! Channel-based stochastic process systems.
//!
//! Each species is an automaton whose behaviour is a stochastic choice of
//! prefixed branches: a spontaneous `delay@r`, a send `!ch` or a receive
//! `?ch`. A send and a receive on the same channel synchronise as one
//! interaction at the channel rate. Messages carry no payload; after a
//! transition the participating molecules are replaced by the species
//! listed in their branch continuations.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hln::format_rate;
use crate::reaction::{multiset, Reaction, ReactionNetwork, State};
use crate::species::{is_identifier, SpeciesName};

/// A rated synchronisation point. The rate is per sender/receiver pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prefix {
    Delay { rate: f64 },
    Send { channel: String },
    Recv { channel: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub prefix: Prefix,
    /// Species that replace this molecule after the transition; empty means
    /// the molecule disappears.
    pub continuation: Vec<SpeciesName>,
}

impl Branch {
    pub fn delay(rate: f64, continuation: Vec<SpeciesName>) -> Self {
        Self {
            prefix: Prefix::Delay { rate },
            continuation,
        }
    }

    pub fn send(channel: &str, continuation: Vec<SpeciesName>) -> Self {
        Self {
            prefix: Prefix::Send {
                channel: channel.to_owned(),
            },
            continuation,
        }
    }

    pub fn recv(channel: &str, continuation: Vec<SpeciesName>) -> Self {
        Self {
            prefix: Prefix::Recv {
                channel: channel.to_owned(),
            },
            continuation,
        }
    }
}

/// A species and its choice of branches. No branches means inert.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeciesAutomaton {
    pub name: SpeciesName,
    #[serde(default)]
    pub branches: Vec<Branch>,
}

impl SpeciesAutomaton {
    pub fn inert(name: SpeciesName) -> Self {
        Self {
            name,
            branches: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProcessSystem {
    channels: Vec<Channel>,
    automata: Vec<SpeciesAutomaton>,
    initial: State,
    index: HashMap<SpeciesName, usize>,
}

#[derive(Deserialize)]
struct RawSystem {
    #[serde(default)]
    channels: Vec<Channel>,
    #[serde(default)]
    automata: Vec<SpeciesAutomaton>,
    #[serde(default)]
    initial: HashMap<SpeciesName, u64>,
}

impl<'de> Deserialize<'de> for ProcessSystem {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = RawSystem::deserialize(deserializer)?;
        let mut sys =
            ProcessSystem::new(raw.channels, raw.automata).map_err(serde::de::Error::custom)?;
        let mut initial = State::zeros(sys.automata.len());
        for (name, n) in raw.initial {
            let i = sys
                .species_index(&name)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown species {name}")))?;
            initial.counts_mut()[i] = n;
        }
        sys.initial = initial;
        Ok(sys)
    }
}

struct InitialCounts<'a>(&'a ProcessSystem);

impl Serialize for InitialCounts<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let sys = self.0;
        let mut map = serializer.serialize_map(Some(sys.automata.len()))?;
        for (a, n) in sys.automata.iter().zip(sys.initial.iter()) {
            map.serialize_entry(a.name.as_str(), n)?;
        }
        map.end()
    }
}

impl Serialize for ProcessSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("channels", &self.channels)?;
        map.serialize_entry("automata", &self.automata)?;
        map.serialize_entry("initial", &InitialCounts(self))?;
        map.end()
    }
}

/// One enabled transition of a process system in a given state.
#[derive(Clone, Debug, PartialEq)]
pub struct PiTransition {
    pub label: String,
    pub propensity: f64,
    pub next: State,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Trigger {
    Delay { species: usize },
    Handshake { sender: usize, receiver: usize },
}

/// A state-independent transition template: one delay branch, or one
/// sender/receiver branch pair on a channel.
#[derive(Clone, Debug)]
pub(crate) struct PiEvent {
    label: String,
    trigger: Trigger,
    rate: f64,
    produced: Vec<(usize, u32)>,
    reaction: Reaction,
}

impl PiEvent {
    pub(crate) fn propensity(&self, counts: &[u64]) -> f64 {
        let pairs: u128 = match self.trigger {
            Trigger::Delay { species } => counts[species] as u128,
            Trigger::Handshake { sender, receiver } if sender == receiver => {
                // A molecule cannot synchronise with itself.
                let n = counts[sender] as u128;
                n * n.saturating_sub(1) / 2
            }
            Trigger::Handshake { sender, receiver } => {
                counts[sender] as u128 * counts[receiver] as u128
            }
        };
        if pairs == 0 {
            0.0
        } else {
            self.rate * pairs as f64
        }
    }

    pub(crate) fn fire(&self, counts: &mut [u64]) -> std::result::Result<(), usize> {
        match self.trigger {
            Trigger::Delay { species } => {
                if counts[species] == 0 {
                    return Err(species);
                }
                counts[species] -= 1;
            }
            Trigger::Handshake { sender, receiver } => {
                let need_sender = if sender == receiver { 2 } else { 1 };
                if counts[sender] < need_sender {
                    return Err(sender);
                }
                if counts[receiver] == 0 {
                    return Err(receiver);
                }
                counts[sender] -= 1;
                counts[receiver] -= 1;
            }
        }
        for &(i, m) in &self.produced {
            counts[i] += m as u64;
        }
        Ok(())
    }
}

impl ProcessSystem {
    /// Builds a system with an all-zero initial population.
    pub fn new(channels: Vec<Channel>, automata: Vec<SpeciesAutomaton>) -> Result<Self> {
        let mut chan_names = HashSet::new();
        for c in &channels {
            if !is_identifier(&c.name) {
                return Err(Error::InvalidSystem(format!(
                    "malformed channel name {:?}",
                    c.name
                )));
            }
            if !chan_names.insert(c.name.as_str()) {
                return Err(Error::InvalidSystem(format!(
                    "channel {} declared twice",
                    c.name
                )));
            }
            if !(c.rate.is_finite() && c.rate > 0.0) {
                return Err(Error::InvalidSystem(format!(
                    "channel {} has non-positive rate {}",
                    c.name, c.rate
                )));
            }
        }
        let mut index = HashMap::with_capacity(automata.len());
        for (i, a) in automata.iter().enumerate() {
            if index.insert(a.name.clone(), i).is_some() {
                return Err(Error::InvalidSystem(format!(
                    "species {} declared twice",
                    a.name
                )));
            }
        }
        for a in &automata {
            for b in &a.branches {
                match &b.prefix {
                    Prefix::Delay { rate } if !(rate.is_finite() && *rate > 0.0) => {
                        return Err(Error::InvalidSystem(format!(
                            "{} has a delay with non-positive rate {rate}",
                            a.name
                        )));
                    }
                    Prefix::Send { channel } | Prefix::Recv { channel }
                        if !chan_names.contains(channel.as_str()) =>
                    {
                        return Err(Error::InvalidSystem(format!(
                            "{} uses undeclared channel {channel}",
                            a.name
                        )));
                    }
                    _ => {}
                }
                if let Some(s) = b.continuation.iter().find(|s| !index.contains_key(*s)) {
                    return Err(Error::InvalidSystem(format!(
                        "{} continues as undeclared species {s}",
                        a.name
                    )));
                }
            }
        }
        let initial = State::zeros(automata.len());
        Ok(Self {
            channels,
            automata,
            initial,
            index,
        })
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("empty system is valid")
    }

    pub fn with_initial(mut self, initial: State) -> Result<Self> {
        self.check_state(&initial)?;
        self.initial = initial;
        Ok(self)
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn automata(&self) -> &[SpeciesAutomaton] {
        &self.automata
    }

    pub fn automaton(&self, name: &str) -> Option<&SpeciesAutomaton> {
        SpeciesName::new(name)
            .ok()
            .and_then(|n| self.species_index(&n))
            .map(|i| &self.automata[i])
    }

    pub fn channel(&self, name: &str) -> Option<&Channel> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn initial(&self) -> &State {
        &self.initial
    }

    pub fn species(&self) -> Vec<SpeciesName> {
        self.automata.iter().map(|a| a.name.clone()).collect()
    }

    pub fn species_index(&self, name: &SpeciesName) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn check_state(&self, s: &State) -> Result<()> {
        if s.len() == self.automata.len() {
            Ok(())
        } else {
            Err(Error::StateLength {
                expected: self.automata.len(),
                found: s.len(),
            })
        }
    }

    pub fn state_from<'a, I>(&self, pairs: I) -> Result<State>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let mut s = State::zeros(self.automata.len());
        for (name, n) in pairs {
            let i = SpeciesName::new(name)
                .ok()
                .and_then(|n| self.species_index(&n))
                .ok_or_else(|| Error::UnknownSpecies(name.to_owned()))?;
            s.counts_mut()[i] = n;
        }
        Ok(s)
    }

    fn produced(&self, continuations: &[&[SpeciesName]]) -> Vec<(usize, u32)> {
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for s in continuations.iter().flat_map(|c| c.iter()) {
            *acc.entry(self.index[s]).or_insert(0) += 1;
        }
        acc.into_iter().collect()
    }

    /// All transition templates, in canonical order: sorted by the reaction
    /// each one generates, so that the order agrees with any reaction network
    /// holding the same reactions.
    pub(crate) fn events(&self) -> Vec<PiEvent> {
        let mut out = Vec::new();
        for (x, a) in self.automata.iter().enumerate() {
            for b in &a.branches {
                if let Prefix::Delay { rate } = b.prefix {
                    let reaction = Reaction::mass_action(
                        [a.name.clone()],
                        b.continuation.iter().cloned(),
                        rate,
                    )
                    .expect("validated delay");
                    out.push(PiEvent {
                        label: format!("{} delay@{}", a.name, format_rate(rate)),
                        trigger: Trigger::Delay { species: x },
                        rate,
                        produced: self.produced(&[&b.continuation]),
                        reaction,
                    });
                }
            }
        }
        for ch in &self.channels {
            let ends = |want_send: bool| {
                self.automata.iter().enumerate().flat_map(move |(i, a)| {
                    a.branches.iter().filter_map(move |b| match &b.prefix {
                        Prefix::Send { channel } if want_send && *channel == ch.name => {
                            Some((i, b))
                        }
                        Prefix::Recv { channel } if !want_send && *channel == ch.name => {
                            Some((i, b))
                        }
                        _ => None,
                    })
                })
            };
            for (x, sb) in ends(true) {
                for (y, rb) in ends(false) {
                    let (xn, yn) = (&self.automata[x].name, &self.automata[y].name);
                    let reaction = Reaction::new(
                        crate::reaction::RateLaw::MassAction,
                        multiset([xn.clone(), yn.clone()]),
                        multiset(sb.continuation.iter().chain(&rb.continuation).cloned()),
                        ch.rate,
                    )
                    .expect("validated channel");
                    out.push(PiEvent {
                        label: format!("{xn} !{} | {yn} ?{}", ch.name, ch.name),
                        trigger: Trigger::Handshake {
                            sender: x,
                            receiver: y,
                        },
                        rate: ch.rate,
                        produced: self.produced(&[&sb.continuation, &rb.continuation]),
                        reaction,
                    });
                }
            }
        }
        out.sort_by(|a, b| a.reaction.sort_key().cmp(&b.reaction.sort_key()));
        out
    }

    /// Enabled transitions in state `s`, in canonical order. Transitions with
    /// zero propensity are omitted.
    pub fn pi_transitions(&self, s: &State) -> Result<Vec<PiTransition>> {
        self.check_state(s)?;
        let mut out = Vec::new();
        for e in self.events() {
            let propensity = e.propensity(s);
            if propensity > 0.0 {
                let mut next = s.clone();
                e.fire(next.counts_mut())
                    .map_err(|i| Error::Underflow(self.automata[i].name.to_string()))?;
                out.push(PiTransition {
                    label: e.label,
                    propensity,
                    next,
                });
            }
        }
        Ok(out)
    }

    /// The reaction network generating the same continuous-time Markov
    /// chain: one reaction per delay branch and one per sender/receiver
    /// branch pair on each channel.
    pub fn reachable_reactions(&self) -> ReactionNetwork {
        let reactions = self.events().into_iter().map(|e| e.reaction).collect();
        ReactionNetwork::new(self.species(), reactions).expect("species are the automata")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn write_continuation(f: &mut fmt::Formatter<'_>, c: &[SpeciesName]) -> fmt::Result {
    match c {
        [] => f.write_str("()"),
        [one] => write!(f, "{one}()"),
        many => {
            f.write_str("( ")?;
            for (i, s) in many.iter().enumerate() {
                if i > 0 {
                    f.write_str(" | ")?;
                }
                write!(f, "{s}()")?;
            }
            f.write_str(" )")
        }
    }
}

fn write_branch(f: &mut fmt::Formatter<'_>, b: &Branch) -> fmt::Result {
    match &b.prefix {
        Prefix::Delay { rate } => write!(f, "delay@{}; ", format_rate(*rate))?,
        Prefix::Send { channel } => write!(f, "!{channel}(); ")?,
        Prefix::Recv { channel } => write!(f, "?{channel}(); ")?,
    }
    write_continuation(f, &b.continuation)
}

/// Process-calculus style listing, for documentation only.
impl fmt::Display for ProcessSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.channels {
            writeln!(f, "new {}@{}:chan", c.name, format_rate(c.rate))?;
        }
        if !self.channels.is_empty() {
            writeln!(f)?;
        }
        for (i, a) in self.automata.iter().enumerate() {
            let kw = if i == 0 { "let" } else { "and" };
            write!(f, "{kw} {}() = ", a.name)?;
            match a.branches.as_slice() {
                [] => writeln!(f, "()")?,
                [one] => {
                    f.write_str("( ")?;
                    write_branch(f, one)?;
                    writeln!(f, " )")?;
                }
                many => {
                    writeln!(f, "(")?;
                    for (j, b) in many.iter().enumerate() {
                        f.write_str(if j == 0 { "    do " } else { "    or " })?;
                        write_branch(f, b)?;
                        writeln!(f)?;
                    }
                    writeln!(f, ")")?;
                }
            }
        }
        if self.initial.total() > 0 {
            writeln!(f)?;
            for (a, &n) in self.automata.iter().zip(self.initial.iter()) {
                if n > 0 {
                    writeln!(f, "run {n} of {}()", a.name)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::sp;

    fn names(xs: &[&str]) -> Vec<SpeciesName> {
        xs.iter().map(|x| sp(x)).collect()
    }

    /// The hand-written G-protein process system with the original channel
    /// names.
    pub(crate) fn table2_system() -> ProcessSystem {
        let chans = vec![
            Channel {
                name: "bindR".into(),
                rate: 3.32e-6,
            },
            Channel {
                name: "switch".into(),
                rate: 1.0e-5,
            },
            Channel {
                name: "bindb".into(),
                rate: 1.0,
            },
        ];
        let auto = |n: &str, bs: Vec<Branch>| SpeciesAutomaton {
            name: sp(n),
            branches: bs,
        };
        let automata = vec![
            auto(
                "R",
                vec![
                    Branch::recv("bindR", names(&["RL"])),
                    Branch::delay(4.0e-4, vec![]),
                ],
            ),
            auto(
                "RL",
                vec![
                    Branch::delay(0.01, names(&["R", "L"])),
                    Branch::delay(4.0e-3, vec![]),
                    Branch::send("switch", names(&["RL"])),
                ],
            ),
            auto("L", vec![Branch::send("bindR", vec![])]),
            auto("Gd", vec![Branch::send("bindb", names(&["G"]))]),
            auto("G", vec![Branch::recv("switch", names(&["Ga", "Gbg"]))]),
            auto("Ga", vec![Branch::delay(0.11, names(&["Gd"]))]),
            auto("Gbg", vec![Branch::recv("bindb", vec![])]),
        ];
        let sys = ProcessSystem::new(chans, automata).unwrap();
        let s0 = sys
            .state_from([
                ("L", 602_200),
                ("R", 10_000),
                ("G", 7000),
                ("Gd", 3000),
                ("Gbg", 3000),
            ])
            .unwrap();
        sys.with_initial(s0).unwrap()
    }

    #[test]
    fn binding_transition_at_initials() {
        let sys = table2_system();
        let ts = sys.pi_transitions(sys.initial()).unwrap();
        let bind = ts.iter().find(|t| t.label.contains("bindR")).unwrap();
        assert!((bind.propensity - 19_993.04).abs() < 1e-6);
        let i = |n: &str| sys.species_index(&sp(n)).unwrap();
        assert_eq!(bind.next[i("L")], 602_199);
        assert_eq!(bind.next[i("R")], 9_999);
        assert_eq!(bind.next[i("RL")], 1);
        // Nothing involving RL or Ga is enabled yet.
        assert!(ts
            .iter()
            .all(|t| !t.label.contains("switch") && !t.label.starts_with("Ga")));
        assert_eq!(ts.len(), 3, "{ts:?}"); // bindR, bindb, R delay
    }

    #[test]
    fn switch_channel_net_effect() {
        let sys = table2_system();
        let s = sys.state_from([("G", 2), ("RL", 1)]).unwrap();
        let ts = sys.pi_transitions(&s).unwrap();
        let sw = ts.iter().find(|t| t.label.contains("switch")).unwrap();
        assert_eq!(sw.propensity, 1.0e-5 * 2.0);
        let expect = sys
            .state_from([("G", 1), ("RL", 1), ("Ga", 1), ("Gbg", 1)])
            .unwrap();
        assert_eq!(sw.next, expect);
    }

    #[test]
    fn reachable_reactions_of_table2() {
        let net = table2_system().reachable_reactions();
        let r = |a: &[&str], b: &[&str], k| Reaction::mass_action(names(a), names(b), k).unwrap();
        let expected = ReactionNetwork::from_reactions(vec![
            r(&["Gd", "Gbg"], &["G"], 1.0),
            r(&["R", "L"], &["RL"], 3.32e-6),
            r(&["G", "RL"], &["Ga", "Gbg", "RL"], 1e-5),
            r(&["RL"], &["R", "L"], 0.01),
            r(&["Ga"], &["Gd"], 0.11),
            r(&["R"], &[], 4e-4),
            r(&["RL"], &[], 4e-3),
        ]);
        assert_eq!(net.reactions().len(), 7);
        assert!(net.same_reactions(&expected));
    }

    #[test]
    fn inert_and_unmatched() {
        let sys = ProcessSystem::new(vec![], vec![SpeciesAutomaton::inert(sp("X"))]).unwrap();
        assert!(sys.reachable_reactions().reactions().is_empty());
        assert!(sys
            .pi_transitions(&State::new(vec![10]))
            .unwrap()
            .is_empty());

        let lonely = ProcessSystem::new(
            vec![Channel {
                name: "c".into(),
                rate: 1.0,
            }],
            vec![
                SpeciesAutomaton {
                    name: sp("A"),
                    branches: vec![Branch::send("c", vec![])],
                },
                SpeciesAutomaton {
                    name: sp("B"),
                    branches: vec![Branch::send("c", vec![])],
                },
            ],
        )
        .unwrap();
        assert!(lonely.reachable_reactions().reactions().is_empty());
    }

    #[test]
    fn empty_population_emits_nothing() {
        let sys = ProcessSystem::new(
            vec![],
            vec![
                SpeciesAutomaton {
                    name: sp("Ga"),
                    branches: vec![Branch::delay(0.11, names(&["Gd"]))],
                },
                SpeciesAutomaton::inert(sp("Gd")),
            ],
        )
        .unwrap();
        assert!(sys
            .pi_transitions(&State::new(vec![0, 4]))
            .unwrap()
            .is_empty());
        assert_eq!(
            sys.pi_transitions(&State::new(vec![3, 0])).unwrap()[0].propensity,
            0.11 * 3.0
        );
    }

    #[test]
    fn self_interaction_counts_pairs() {
        let sys = ProcessSystem::new(
            vec![Channel {
                name: "d".into(),
                rate: 2.0,
            }],
            vec![
                SpeciesAutomaton {
                    name: sp("A"),
                    branches: vec![Branch::send("d", names(&["B"])), Branch::recv("d", vec![])],
                },
                SpeciesAutomaton::inert(sp("B")),
            ],
        )
        .unwrap();
        assert!(sys
            .pi_transitions(&State::new(vec![1, 0]))
            .unwrap()
            .is_empty());
        let ts = sys.pi_transitions(&State::new(vec![4, 0])).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].propensity, 2.0 * 6.0);
        assert_eq!(ts[0].next, State::new(vec![2, 1]));
    }

    #[test]
    fn validation() {
        let a = |bs| SpeciesAutomaton {
            name: sp("A"),
            branches: bs,
        };
        assert!(ProcessSystem::new(vec![], vec![a(vec![Branch::send("c", vec![])])]).is_err());
        assert!(ProcessSystem::new(vec![], vec![a(vec![Branch::delay(0.0, vec![])])]).is_err());
        assert!(
            ProcessSystem::new(vec![], vec![a(vec![Branch::delay(1.0, names(&["B"]))])]).is_err()
        );
        let c = Channel {
            name: "c".into(),
            rate: 1.0,
        };
        assert!(ProcessSystem::new(vec![c.clone(), c], vec![]).is_err());
        assert!(ProcessSystem::new(vec![], vec![a(vec![]), a(vec![])]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let sys = table2_system();
        let text = sys.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(
            v["channels"][0],
            serde_json::json!({"name": "bindR", "rate": 3.32e-6})
        );
        assert_eq!(
            v["automata"][3]["branches"][0]["prefix"],
            serde_json::json!({"kind": "send", "channel": "bindb"})
        );
        assert_eq!(v["initial"]["L"], 602_200);
        assert_eq!(ProcessSystem::from_json(&text).unwrap(), sys);
    }

    #[test]
    fn pretty_listing() {
        let text = table2_system().to_string();
        assert!(text.contains("new bindR@3.32e-6:chan"));
        assert!(text.contains("and Gd() = ( !bindb(); G() )"));
        assert!(text.contains("and G() = ( ?switch(); ( Ga() | Gbg() ) )"));
        assert!(text.contains("    or !switch(); RL()"));
        assert!(text.contains("run 602200 of L()"));
    }
}
