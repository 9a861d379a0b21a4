//! Chemical reaction networks: species, irreversible mass-action reactions,
//! propensities and copy-number states.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::species::SpeciesName;

/// Avogadro's number, mol⁻¹.
pub const AVOGADRO: f64 = 6.022e23;

/// Species multiset: name to multiplicity.
pub type Multiset = BTreeMap<SpeciesName, u32>;

pub(crate) type SortKey<'a> = (
    RateLaw,
    Vec<(&'a SpeciesName, u32)>,
    Vec<(&'a SpeciesName, u32)>,
    u64,
);

pub fn multiset<I>(names: I) -> Multiset
where
    I: IntoIterator<Item = SpeciesName>,
{
    let mut m = Multiset::new();
    for n in names {
        *m.entry(n).or_insert(0) += 1;
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateLaw {
    /// Propensity proportional to the number of distinct reactant combinations.
    MassAction,
    /// Constant propensity in molecules·s⁻¹; no reactants.
    ZerothOrder,
}

/// One irreversible reaction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawReaction")]
pub struct Reaction {
    reactants: Multiset,
    products: Multiset,
    rate: f64,
    kind: RateLaw,
}

#[derive(Deserialize)]
struct RawReaction {
    #[serde(default)]
    reactants: Multiset,
    #[serde(default)]
    products: Multiset,
    rate: f64,
    kind: RateLaw,
}

impl TryFrom<RawReaction> for Reaction {
    type Error = Error;

    fn try_from(raw: RawReaction) -> Result<Self> {
        Reaction::new(raw.kind, raw.reactants, raw.products, raw.rate)
    }
}

impl Reaction {
    pub fn new(kind: RateLaw, reactants: Multiset, products: Multiset, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidReaction(format!(
                "rate constant must be positive and finite, got {rate}"
            )));
        }
        if reactants.values().chain(products.values()).any(|&m| m == 0) {
            return Err(Error::InvalidReaction("zero multiplicity".into()));
        }
        let order: u32 = reactants.values().sum();
        match kind {
            RateLaw::MassAction if order == 0 => {
                return Err(Error::InvalidReaction(
                    "mass-action reaction needs at least one reactant".into(),
                ))
            }
            RateLaw::ZerothOrder if order != 0 => {
                return Err(Error::InvalidReaction(
                    "zeroth-order reaction cannot have reactants".into(),
                ))
            }
            _ => {}
        }
        if order > 2 {
            return Err(Error::InvalidReaction(format!(
                "at most two reactant molecules are supported, got {order}"
            )));
        }
        Ok(Self {
            reactants,
            products,
            rate,
            kind,
        })
    }

    pub fn mass_action<I, J>(reactants: I, products: J, rate: f64) -> Result<Self>
    where
        I: IntoIterator<Item = SpeciesName>,
        J: IntoIterator<Item = SpeciesName>,
    {
        Self::new(
            RateLaw::MassAction,
            multiset(reactants),
            multiset(products),
            rate,
        )
    }

    pub fn zeroth_order<J>(products: J, rate: f64) -> Result<Self>
    where
        J: IntoIterator<Item = SpeciesName>,
    {
        Self::new(
            RateLaw::ZerothOrder,
            Multiset::new(),
            multiset(products),
            rate,
        )
    }

    pub fn reactants(&self) -> &Multiset {
        &self.reactants
    }

    pub fn products(&self) -> &Multiset {
        &self.products
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn kind(&self) -> RateLaw {
        self.kind
    }

    /// Total reactant molecules consumed by one firing.
    pub fn order(&self) -> u32 {
        self.reactants.values().sum()
    }

    /// Net change of `species` per firing.
    pub fn net_change(&self, species: &SpeciesName) -> i64 {
        let produced = self.products.get(species).copied().unwrap_or(0) as i64;
        let consumed = self.reactants.get(species).copied().unwrap_or(0) as i64;
        produced - consumed
    }

    pub fn species(&self) -> impl Iterator<Item = &SpeciesName> {
        self.reactants.keys().chain(self.products.keys())
    }

    /// Total order used to put reaction lists in a canonical sequence.
    pub(crate) fn sort_key(&self) -> SortKey<'_> {
        (
            self.kind,
            self.reactants.iter().map(|(s, &m)| (s, m)).collect(),
            self.products.iter().map(|(s, &m)| (s, m)).collect(),
            self.rate.to_bits(),
        )
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, side: &Multiset) -> fmt::Result {
    if side.is_empty() {
        return f.write_str("null");
    }
    let mut first = true;
    for (s, &m) in side {
        for _ in 0..m {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "{s}")?;
            first = false;
        }
    }
    Ok(())
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_side(f, &self.reactants)?;
        f.write_str(" -> ")?;
        write_side(f, &self.products)?;
        write!(f, " @ {}", crate::hln::format_rate(self.rate))
    }
}

/// Molecule copy numbers, one per species in network declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(Vec<u64>);

impl State {
    pub fn new(counts: Vec<u64>) -> Self {
        Self(counts)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn counts_mut(&mut self) -> &mut [u64] {
        &mut self.0
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl Deref for State {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl From<Vec<u64>> for State {
    fn from(v: Vec<u64>) -> Self {
        Self(v)
    }
}

/// Number of distinct reactant combinations: Π C(n_i, m_i).
///
/// Exact in integers, so the product does not depend on factor order.
pub(crate) fn combinations(factors: impl IntoIterator<Item = (u64, u32)>) -> u128 {
    let mut total: u128 = 1;
    for (n, m) in factors {
        let n = n as u128;
        let m = m as u128;
        if n < m {
            return 0;
        }
        let mut c: u128 = 1;
        for j in 0..m {
            c = c * (n - j) / (j + 1);
        }
        total = total.saturating_mul(c);
    }
    total
}

/// A reaction with species resolved to state indices.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedReaction {
    pub reactants: Vec<(usize, u32)>,
    pub products: Vec<(usize, u32)>,
    pub rate: f64,
    pub kind: RateLaw,
}

impl IndexedReaction {
    pub fn propensity(&self, counts: &[u64]) -> f64 {
        match self.kind {
            RateLaw::ZerothOrder => self.rate,
            RateLaw::MassAction => {
                let c = combinations(self.reactants.iter().map(|&(i, m)| (counts[i], m)));
                if c == 0 {
                    0.0
                } else {
                    self.rate * c as f64
                }
            }
        }
    }

    /// Applies one firing in place. On underflow the state is left untouched
    /// and the offending index is returned.
    pub fn fire(&self, counts: &mut [u64]) -> std::result::Result<(), usize> {
        if let Some(&(i, _)) = self.reactants.iter().find(|&&(i, m)| counts[i] < m as u64) {
            return Err(i);
        }
        for &(i, m) in &self.reactants {
            counts[i] -= m as u64;
        }
        for &(i, m) in &self.products {
            counts[i] += m as u64;
        }
        Ok(())
    }
}

/// Species table plus an ordered list of irreversible reactions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork")]
pub struct ReactionNetwork {
    species: Vec<SpeciesName>,
    reactions: Vec<Reaction>,
    #[serde(skip)]
    index: HashMap<SpeciesName, usize>,
}

#[derive(Deserialize)]
struct RawNetwork {
    species: Vec<SpeciesName>,
    reactions: Vec<Reaction>,
}

impl TryFrom<RawNetwork> for ReactionNetwork {
    type Error = Error;

    fn try_from(raw: RawNetwork) -> Result<Self> {
        ReactionNetwork::new(raw.species, raw.reactions)
    }
}

impl ReactionNetwork {
    pub fn new(species: Vec<SpeciesName>, reactions: Vec<Reaction>) -> Result<Self> {
        let mut index = HashMap::with_capacity(species.len());
        for (i, s) in species.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidNetwork(format!("species {s} declared twice")));
            }
        }
        for r in &reactions {
            if let Some(s) = r.species().find(|s| !index.contains_key(*s)) {
                return Err(Error::InvalidNetwork(format!(
                    "reaction `{r}` mentions undeclared species {s}"
                )));
            }
        }
        Ok(Self {
            species,
            reactions,
            index,
        })
    }

    /// Builds a network whose species list is the first-mention order of the
    /// reactions (reactants before products).
    pub fn from_reactions(reactions: Vec<Reaction>) -> Self {
        let mut species: Vec<SpeciesName> = Vec::new();
        for s in reactions.iter().flat_map(Reaction::species) {
            if !species.contains(s) {
                species.push(s.clone());
            }
        }
        Self::new(species, reactions).expect("species collected from reactions")
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("empty network is valid")
    }

    pub fn species(&self) -> &[SpeciesName] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn species_index(&self, name: &SpeciesName) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        SpeciesName::new(name)
            .ok()
            .and_then(|n| self.species_index(&n))
            .ok_or_else(|| Error::UnknownSpecies(name.to_owned()))
    }

    pub fn index_reaction(&self, r: &Reaction) -> Result<IndexedReaction> {
        let resolve = |m: &Multiset| -> Result<Vec<(usize, u32)>> {
            m.iter()
                .map(|(s, &k)| {
                    self.species_index(s)
                        .map(|i| (i, k))
                        .ok_or_else(|| Error::UnknownSpecies(s.to_string()))
                })
                .collect()
        };
        Ok(IndexedReaction {
            reactants: resolve(&r.reactants)?,
            products: resolve(&r.products)?,
            rate: r.rate,
            kind: r.kind,
        })
    }

    pub fn indexed(&self) -> Vec<IndexedReaction> {
        self.reactions
            .iter()
            .map(|r| self.index_reaction(r).expect("validated on construction"))
            .collect()
    }

    pub fn check_state(&self, s: &State) -> Result<()> {
        if s.len() == self.species.len() {
            Ok(())
        } else {
            Err(Error::StateLength {
                expected: self.species.len(),
                found: s.len(),
            })
        }
    }

    /// Builds a state from `(name, count)` pairs; species not listed start at 0.
    pub fn state_from<'a, I>(&self, pairs: I) -> Result<State>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let mut s = State::zeros(self.species.len());
        for (name, n) in pairs {
            s.0[self.index_of(name)?] = n;
        }
        Ok(s)
    }

    /// Propensity of `r` in state `s`.
    ///
    /// Mass action counts distinct reactant combinations, so a homodimer
    /// `A + A` contributes `n_A (n_A - 1) / 2` pairs.
    pub fn propensity(&self, r: &Reaction, s: &State) -> Result<f64> {
        self.check_state(s)?;
        Ok(self.index_reaction(r)?.propensity(s))
    }

    /// The state after one firing of `r`.
    pub fn apply(&self, r: &Reaction, s: &State) -> Result<State> {
        self.check_state(s)?;
        let mut next = s.clone();
        self.index_reaction(r)?
            .fire(&mut next.0)
            .map_err(|i| Error::Underflow(self.species[i].to_string()))?;
        Ok(next)
    }

    /// `weights · s0 == weights · s1`, in exact integer arithmetic.
    pub fn conserved_check(&self, weights: &[i64], s0: &State, s1: &State) -> Result<bool> {
        if weights.len() != self.species.len() {
            return Err(Error::StateLength {
                expected: self.species.len(),
                found: weights.len(),
            });
        }
        self.check_state(s0)?;
        self.check_state(s1)?;
        Ok(weighted_sum(weights, s0) == weighted_sum(weights, s1))
    }

    /// Net stoichiometry, species × reactions.
    pub fn stoichiometry(&self) -> Vec<Vec<i64>> {
        self.species
            .iter()
            .map(|s| self.reactions.iter().map(|r| r.net_change(s)).collect())
            .collect()
    }

    /// Equality of reaction multisets, ignoring list order and species order.
    pub fn same_reactions(&self, other: &ReactionNetwork) -> bool {
        let mut a: Vec<_> = self.reactions.iter().map(Reaction::sort_key).collect();
        let mut b: Vec<_> = other.reactions.iter().map(Reaction::sort_key).collect();
        a.sort();
        b.sort();
        a == b
    }

    /// A copy of the network without reactions matching `drop`.
    pub fn without<F>(&self, mut drop: F) -> Self
    where
        F: FnMut(&Reaction) -> bool,
    {
        let reactions = self
            .reactions
            .iter()
            .filter(|r| !drop(r))
            .cloned()
            .collect();
        Self::new(self.species.clone(), reactions).expect("subset of a valid network")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl fmt::Display for ReactionNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reactions {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

pub(crate) fn weighted_sum(weights: &[i64], s: &[u64]) -> i128 {
    weights
        .iter()
        .zip(s)
        .map(|(&w, &n)| w as i128 * n as i128)
        .sum()
}

/// Converts a bimolecular rate constant in M⁻¹·s⁻¹ into a per-pair discrete
/// rate in s⁻¹ for a reaction volume in litres: `k / (N_A · V)`.
pub fn scale_rate_to_discrete(k_cont: f64, volume: f64) -> Result<f64> {
    if !(k_cont.is_finite() && k_cont > 0.0) {
        return Err(Error::Domain(format!(
            "rate constant must be positive, got {k_cont}"
        )));
    }
    if !(volume.is_finite() && volume > 0.0) {
        return Err(Error::Domain(format!(
            "volume must be positive, got {volume}"
        )));
    }
    Ok(k_cont / (AVOGADRO * volume))
}

/// Discrete rate for a reaction of the given molecular order. Zeroth- and
/// first-order rates are volume independent and pass through unchanged.
pub fn scale_rate_for_order(order: u32, k_cont: f64, volume: f64) -> Result<f64> {
    match order {
        0 | 1 => {
            scale_rate_to_discrete(k_cont, volume)?;
            Ok(k_cont)
        }
        2 => scale_rate_to_discrete(k_cont, volume),
        n => Err(Error::Domain(format!("unsupported reaction order {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::sp;
    use proptest::prelude::*;

    fn names(xs: &[&str]) -> Vec<SpeciesName> {
        xs.iter().map(|x| sp(x)).collect()
    }

    fn rx(r: &[&str], p: &[&str], k: f64) -> Reaction {
        Reaction::mass_action(names(r), names(p), k).unwrap()
    }

    #[test]
    fn bimolecular_propensity() {
        let lr = rx(&["L", "R"], &["RL"], 3.32e-6);
        let net = ReactionNetwork::from_reactions(vec![lr.clone()]);
        let s = net.state_from([("L", 602_200), ("R", 10_000)]).unwrap();
        // 3.32e-6 · 602200 · 10000
        let a = net.propensity(&lr, &s).unwrap();
        assert!((a - 19_993.04).abs() < 1e-6, "{a}");
    }

    #[test]
    fn empty_population_has_zero_propensity() {
        let r = rx(&["Ga"], &["Gd"], 0.11);
        let net = ReactionNetwork::from_reactions(vec![r.clone()]);
        assert_eq!(net.propensity(&r, &State::new(vec![0, 5])).unwrap(), 0.0);
    }

    #[test]
    fn zeroth_order_propensity_is_constant() {
        let syn = Reaction::zeroth_order(names(&["R"]), 4.0).unwrap();
        let net = ReactionNetwork::from_reactions(vec![syn.clone()]);
        for n in [0, 1, 1000] {
            assert_eq!(net.propensity(&syn, &State::new(vec![n])).unwrap(), 4.0);
        }
    }

    #[test]
    fn homodimer_counts_unordered_pairs() {
        let r = rx(&["A", "A"], &["B"], 2.0);
        let net = ReactionNetwork::from_reactions(vec![r.clone()]);
        assert_eq!(net.propensity(&r, &State::new(vec![1, 0])).unwrap(), 0.0);
        assert_eq!(net.propensity(&r, &State::new(vec![2, 0])).unwrap(), 2.0);
        assert_eq!(net.propensity(&r, &State::new(vec![5, 0])).unwrap(), 20.0);
    }

    #[test]
    fn apply_examples() {
        let bind = rx(&["Gd", "Gbg"], &["G"], 1.0);
        let net = ReactionNetwork::new(names(&["Gd", "Gbg", "G"]), vec![bind.clone()]).unwrap();
        let s = State::new(vec![3000, 3000, 7000]);
        assert_eq!(
            net.apply(&bind, &s).unwrap(),
            State::new(vec![2999, 2999, 7001])
        );

        let deg = rx(&["RL"], &[], 4e-3);
        let net = ReactionNetwork::from_reactions(vec![deg.clone()]);
        assert_eq!(
            net.apply(&deg, &State::new(vec![1])).unwrap(),
            State::new(vec![0])
        );

        let act = rx(&["G", "RL"], &["Ga", "Gbg", "RL"], 1e-5);
        let net =
            ReactionNetwork::new(names(&["G", "RL", "Ga", "Gbg"]), vec![act.clone()]).unwrap();
        let s = State::new(vec![7000, 5, 0, 3000]);
        assert_eq!(
            net.apply(&act, &s).unwrap(),
            State::new(vec![6999, 5, 1, 3001])
        );
    }

    #[test]
    fn apply_underflow() {
        let deg = rx(&["RL"], &[], 4e-3);
        let net = ReactionNetwork::from_reactions(vec![deg.clone()]);
        assert!(matches!(
            net.apply(&deg, &State::new(vec![0])),
            Err(Error::Underflow(s)) if s == "RL"
        ));
        let dimer = rx(&["A", "A"], &["B"], 1.0);
        let net = ReactionNetwork::from_reactions(vec![dimer.clone()]);
        assert!(net.apply(&dimer, &State::new(vec![1, 0])).is_err());
    }

    #[test]
    fn rate_scaling() {
        let k = scale_rate_to_discrete(2e6, 1e-12).unwrap();
        assert!((k - 3.3212e-6).abs() / 3.3212e-6 < 1e-4, "{k}");
        assert!((k - 3.32e-6).abs() / 3.32e-6 < 5e-3);
        let k1 = scale_rate_to_discrete(2e6, 1.0).unwrap();
        assert!((k1 - 3.32e-18).abs() / 3.32e-18 < 5e-3);
        let half = scale_rate_to_discrete(2e6, 0.5e-12).unwrap();
        assert!((half / k - 2.0).abs() < 1e-12);
        assert!(scale_rate_to_discrete(0.0, 1.0).is_err());
        assert!(scale_rate_to_discrete(1.0, -1.0).is_err());
        assert_eq!(scale_rate_for_order(1, 0.01, 1e-12).unwrap(), 0.01);
        assert_eq!(scale_rate_for_order(0, 4.0, 1e-12).unwrap(), 4.0);
    }

    #[test]
    fn conserved_check_examples() {
        let net = crate::models::gprotein_network().network;
        let idx = |n: &str| net.index_of(n).unwrap();
        let mut alpha = vec![0i64; net.species().len()];
        for n in ["G", "Ga", "Gd"] {
            alpha[idx(n)] = 1;
        }
        let s0 = State::new(vec![5; net.species().len()]);
        for r in net.reactions() {
            let s1 = net.apply(r, &s0).unwrap();
            assert!(net.conserved_check(&alpha, &s0, &s1).unwrap(), "{r}");
            let zeros = vec![0; net.species().len()];
            assert!(net.conserved_check(&zeros, &s0, &s1).unwrap());
        }
        let deg_r = net
            .reactions()
            .iter()
            .find(|r| r.to_string().starts_with("R -> null"))
            .unwrap();
        let mut only_r = vec![0; net.species().len()];
        only_r[idx("R")] = 1;
        let s1 = net.apply(deg_r, &s0).unwrap();
        assert!(!net.conserved_check(&only_r, &s0, &s1).unwrap());
    }

    #[test]
    fn validation() {
        assert!(Reaction::mass_action(names(&["A", "B", "C"]), names(&[]), 1.0).is_err());
        assert!(Reaction::mass_action(names(&[]), names(&["A"]), 1.0).is_err());
        assert!(Reaction::mass_action(names(&["A"]), names(&[]), 0.0).is_err());
        assert!(Reaction::new(
            RateLaw::ZerothOrder,
            multiset(names(&["A"])),
            Multiset::new(),
            1.0
        )
        .is_err());
        let r = rx(&["A"], &["B"], 1.0);
        assert!(ReactionNetwork::new(names(&["A"]), vec![r.clone()]).is_err());
        assert!(ReactionNetwork::new(names(&["A", "B", "A"]), vec![r]).is_err());
    }

    #[test]
    fn json_shape() {
        let net = ReactionNetwork::from_reactions(vec![
            rx(&["L", "R"], &["RL"], 3.32e-6),
            Reaction::zeroth_order(names(&["R"]), 4.0).unwrap(),
        ]);
        let v: serde_json::Value = serde_json::from_str(&net.to_json()).unwrap();
        assert_eq!(v["species"], serde_json::json!(["L", "R", "RL"]));
        assert_eq!(
            v["reactions"][0]["reactants"],
            serde_json::json!({"L": 1, "R": 1})
        );
        assert_eq!(v["reactions"][0]["products"], serde_json::json!({"RL": 1}));
        assert_eq!(v["reactions"][0]["rate"], serde_json::json!(3.32e-6));
        assert_eq!(v["reactions"][0]["kind"], "mass_action");
        assert_eq!(v["reactions"][1]["kind"], "zeroth_order");
        assert_eq!(ReactionNetwork::from_json(&net.to_json()).unwrap(), net);
    }

    #[test]
    fn json_rejects_invalid() {
        let undeclared = r#"{"species":["A"],"reactions":[{"reactants":{"A":1},"products":{"B":1},"rate":1.0,"kind":"mass_action"}]}"#;
        assert!(ReactionNetwork::from_json(undeclared).is_err());
        let bad_rate = r#"{"species":["A"],"reactions":[{"reactants":{"A":1},"products":{},"rate":-1.0,"kind":"mass_action"}]}"#;
        assert!(ReactionNetwork::from_json(bad_rate).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(
            rx(&["G", "RL"], &["Ga", "Gbg", "RL"], 1e-5).to_string(),
            "G + RL -> Ga + Gbg + RL @ 1e-5"
        );
        assert_eq!(rx(&["R"], &[], 4e-4).to_string(), "R -> null @ 4e-4");
    }

    proptest! {
        #[test]
        fn propensity_monotone(
            a in 0u64..5000, b in 0u64..5000, da in 0u64..100, db in 0u64..100,
            homo in any::<bool>(),
        ) {
            let r = if homo { rx(&["A", "A"], &["C"], 0.5) } else { rx(&["A", "B"], &["C"], 0.5) };
            let net = ReactionNetwork::new(names(&["A", "B", "C"]), vec![r.clone()]).unwrap();
            let lo = net.propensity(&r, &State::new(vec![a, b, 0])).unwrap();
            let hi = net.propensity(&r, &State::new(vec![a + da, b + db, 0])).unwrap();
            prop_assert!(lo >= 0.0 && hi >= lo);
        }

        #[test]
        fn apply_preserves_nonnegativity(counts in prop::collection::vec(0u64..4, 7)) {
            let net = crate::models::gprotein_network().network;
            let s = State::new(counts);
            for r in net.reactions() {
                let positive = net.propensity(r, &s).unwrap() > 0.0;
                // Enabled exactly when the propensity is positive.
                prop_assert_eq!(net.apply(r, &s).is_ok(), positive);
            }
        }
    }
}
