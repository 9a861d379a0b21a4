//! Cross-backend validation: state-space enumeration, ensemble-vs-ODE
//! comparison and conservation-law discovery.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::pi::ProcessSystem;
use crate::reaction::{ReactionNetwork, State};
use crate::species::SpeciesName;
use crate::trajectory::{EnsembleStats, Trajectory};

/// Reachable states of a continuous-time Markov chain and its transition
/// rates. Parallel transitions between the same pair of states are merged
/// by summing their rates; transitions that leave the state unchanged are
/// dropped since they do not affect the chain.
///
/// Equality compares states by content, independent of discovery order.
#[derive(Clone, Debug)]
pub struct CtmcGraph {
    pub states: Vec<State>,
    /// `(from, to, rate)` with indices into `states`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl CtmcGraph {
    pub fn edge_map(&self) -> BTreeMap<(&State, &State), f64> {
        self.edges
            .iter()
            .map(|&(a, b, r)| ((&self.states[a], &self.states[b]), r))
            .collect()
    }

    pub fn state_set(&self) -> BTreeSet<&State> {
        self.states.iter().collect()
    }

    /// Total exit rate of every state, keyed by content.
    pub fn exit_rates(&self) -> BTreeMap<&State, f64> {
        let mut out: BTreeMap<&State, Vec<f64>> =
            self.states.iter().map(|s| (s, Vec::new())).collect();
        for &(a, _, r) in &self.edges {
            out.get_mut(&self.states[a]).expect("state").push(r);
        }
        out.into_iter().map(|(s, rs)| (s, sorted_sum(rs))).collect()
    }
}

impl PartialEq for CtmcGraph {
    fn eq(&self, other: &Self) -> bool {
        self.state_set() == other.state_set() && self.edge_map() == other.edge_map()
    }
}

fn sorted_sum(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs.into_iter().sum()
}

/// Breadth-first closure of `s0` under a successor function returning
/// `(rate, next)` pairs.
pub fn explore<F>(s0: &State, max_states: usize, mut successors: F) -> Result<CtmcGraph>
where
    F: FnMut(&State) -> Result<Vec<(f64, State)>>,
{
    let mut index: HashMap<State, usize> = HashMap::new();
    let mut states = vec![s0.clone()];
    index.insert(s0.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut edges = Vec::new();
    if max_states == 0 {
        return Err(Error::Explosion(0));
    }

    while let Some(from) = queue.pop_front() {
        let current = states[from].clone();
        let mut outgoing: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (rate, next) in successors(&current)? {
            if rate <= 0.0 || next == current {
                continue;
            }
            let to = match index.get(&next) {
                Some(&i) => i,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::Explosion(max_states));
                    }
                    let i = states.len();
                    index.insert(next.clone(), i);
                    states.push(next);
                    queue.push_back(i);
                    i
                }
            };
            outgoing.entry(to).or_default().push(rate);
        }
        for (to, rates) in outgoing {
            edges.push((from, to, sorted_sum(rates)));
        }
    }
    Ok(CtmcGraph { states, edges })
}

/// The chain generated by a reaction network from `s0`.
pub fn enumerate_ctmc(net: &ReactionNetwork, s0: &State, max_states: usize) -> Result<CtmcGraph> {
    net.check_state(s0)?;
    let reactions = net.indexed();
    explore(s0, max_states, |s| {
        let mut out = Vec::new();
        for r in &reactions {
            let a = r.propensity(s);
            if a > 0.0 {
                let mut next = s.clone();
                r.fire(next.counts_mut())
                    .map_err(|i| Error::Underflow(net.species()[i].to_string()))?;
                out.push((a, next));
            }
        }
        Ok(out)
    })
}

/// The chain generated by a process system's transitions from `s0`.
pub fn enumerate_ctmc_pi(sys: &ProcessSystem, s0: &State, max_states: usize) -> Result<CtmcGraph> {
    sys.check_state(s0)?;
    explore(s0, max_states, |s| {
        Ok(sys
            .pi_transitions(s)?
            .into_iter()
            .map(|t| (t.propensity, t.next))
            .collect())
    })
}

/// Per-cell relative deviation between an SSA ensemble mean and an ODE
/// solution on the same grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub species: Vec<SpeciesName>,
    pub times: Vec<f64>,
    pub ssa_mean: Vec<Vec<f64>>,
    pub ode: Vec<Vec<f64>>,
    /// `|mean - ode| / max(ode, threshold)`.
    pub deviation: Vec<Vec<f64>>,
    /// Whether the cell counts toward the summary (`ode >= threshold`).
    pub included: Vec<Vec<bool>>,
    pub threshold: f64,
}

/// Location and size of the largest included deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct Worst {
    pub species: SpeciesName,
    pub time: f64,
    pub deviation: f64,
}

impl ComparisonReport {
    pub fn worst(&self) -> Option<Worst> {
        let mut best: Option<Worst> = None;
        for (r, row) in self.deviation.iter().enumerate() {
            for (c, &d) in row.iter().enumerate() {
                if self.included[r][c] && best.as_ref().is_none_or(|w| d > w.deviation) {
                    best = Some(Worst {
                        species: self.species[c].clone(),
                        time: self.times[r],
                        deviation: d,
                    });
                }
            }
        }
        best
    }

    pub fn max_deviation(&self) -> f64 {
        self.worst().map_or(0.0, |w| w.deviation)
    }

    pub fn passes(&self, bound: f64) -> bool {
        self.max_deviation() <= bound
    }

    /// Long-format CSV: one row per (time, species) cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,species,ssa_mean,ode,deviation,included\n");
        for (r, t) in self.times.iter().enumerate() {
            for (c, s) in self.species.iter().enumerate() {
                writeln!(
                    out,
                    "{t},{s},{},{},{},{}",
                    self.ssa_mean[r][c], self.ode[r][c], self.deviation[r][c], self.included[r][c]
                )
                .unwrap();
            }
        }
        out
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "compared {} species at {} times (cells with ODE value < {} excluded)",
            self.species.len(),
            self.times.len(),
            self.threshold
        )?;
        for (c, s) in self.species.iter().enumerate() {
            let included: Vec<f64> = (0..self.times.len())
                .filter(|&r| self.included[r][c])
                .map(|r| self.deviation[r][c])
                .collect();
            if included.is_empty() {
                writeln!(f, "  {s:<8} excluded")?;
            } else {
                let max = included.iter().copied().fold(0.0, f64::max);
                writeln!(
                    f,
                    "  {s:<8} max relative deviation {:.4} over {} cells",
                    max,
                    included.len()
                )?;
            }
        }
        match self.worst() {
            Some(w) => write!(
                f,
                "worst: {} at t = {} ({:.4})",
                w.species, w.time, w.deviation
            ),
            None => write!(f, "worst: no included cells"),
        }
    }
}

pub fn compare(
    ssa: &EnsembleStats,
    ode: &Trajectory<f64>,
    threshold_count: f64,
) -> Result<ComparisonReport> {
    if ssa.species != ode.species {
        return Err(Error::GridMismatch(format!(
            "species differ: {:?} vs {:?}",
            ssa.species, ode.species
        )));
    }
    if ssa.times.len() != ode.times.len()
        || ssa
            .times
            .iter()
            .zip(&ode.times)
            .any(|(a, b)| (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0))
    {
        return Err(Error::GridMismatch("sample times differ".into()));
    }
    let mut deviation = Vec::with_capacity(ssa.times.len());
    let mut included = Vec::with_capacity(ssa.times.len());
    for (m_row, o_row) in ssa.mean.iter().zip(&ode.states) {
        deviation.push(
            m_row
                .iter()
                .zip(o_row)
                .map(|(m, o)| (m - o).abs() / o.max(threshold_count))
                .collect(),
        );
        included.push(o_row.iter().map(|&o| o >= threshold_count).collect());
    }
    Ok(ComparisonReport {
        species: ssa.species.clone(),
        times: ssa.times.clone(),
        ssa_mean: ssa.mean.clone(),
        ode: ode.states.clone(),
        deviation,
        included,
        threshold: threshold_count,
    })
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = &*v / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (v, p) in m[i].iter_mut().zip(&pivot_row) {
                    *v = &*v - &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn to_rational_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|&v| BigRational::from_integer(BigInt::from(v)))
                .collect()
        })
        .collect()
}

/// An integer basis of the weight vectors `w` with `w · ν_r = 0` for every
/// reaction `r`, i.e. the left null space of the stoichiometry matrix.
///
/// Each vector is primitive (coprime entries) with a positive leading entry.
/// Species fed by zeroth-order reactions drop out automatically.
pub fn find_conservation(net: &ReactionNetwork) -> Vec<Vec<i64>> {
    let n = net.species().len();
    // Rows are reactions, columns species: solve A w = 0.
    let stoich = net.stoichiometry();
    let transposed: Vec<Vec<i64>> = (0..net.reactions().len())
        .map(|r| (0..n).map(|s| stoich[s][r]).collect())
        .collect();
    let mut a = to_rational_rows(&transposed);
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();

    free.iter()
        .map(|&f| {
            let mut w = vec![BigRational::zero(); n];
            w[f] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                w[p] = -a[row][f].clone();
            }
            primitive_integer(&w)
        })
        .collect()
}

fn primitive_integer(w: &[BigRational]) -> Vec<i64> {
    let lcm = w.iter().fold(BigInt::one(), |acc, v| {
        num::integer::lcm(acc, v.denom().clone())
    });
    let ints: Vec<BigInt> = w.iter().map(|v| (v * &lcm).to_integer()).collect();
    let gcd = ints
        .iter()
        .fold(BigInt::zero(), |acc, v| num::integer::gcd(acc, v.clone()));
    let sign = match ints.iter().find(|v| !v.is_zero()) {
        Some(v) if v.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.iter()
        .map(|v| {
            (v / &gcd * &sign)
                .to_i64()
                .expect("conservation weights fit in i64")
        })
        .collect()
}

/// Whether `v` lies in the rational span of `basis`.
pub fn in_span(basis: &[Vec<i64>], v: &[i64]) -> bool {
    let rank = |rows: &[Vec<i64>]| {
        if rows.is_empty() {
            return 0;
        }
        rref(&mut to_rational_rows(rows)).len()
    };
    let mut with = basis.to_vec();
    with.push(v.to_vec());
    rank(basis) == rank(&with)
}

/// Renders a weight vector as a linear form, e.g. `G + Gd + Ga` or `2 A - B`.
pub fn describe_weights(species: &[SpeciesName], w: &[i64]) -> String {
    let mut out = String::new();
    for (s, &k) in species.iter().zip(w) {
        if k == 0 {
            continue;
        }
        let sign = if k < 0 { "-" } else { "+" };
        if out.is_empty() {
            if k < 0 {
                out.push('-');
            }
        } else {
            write!(out, " {sign} ").unwrap();
        }
        if k.abs() != 1 {
            write!(out, "{} ", k.abs()).unwrap();
        }
        write!(out, "{s}").unwrap();
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
