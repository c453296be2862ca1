//! Switching signals and the average dwell-time constraint
//!
//! ```text
//! N_σ(k, k̲) ≤ N₀ + (k − k̲) / Nₐ     for all k ≥ k̲ ≥ 0
//! ```
//!
//! `N_σ(k, k̲)` counts switches in `[k̲, k)`, with a switch attributed to the
//! step at which the new primitive first acts: index `j ≥ 1` is a switch
//! when `σ(j) ≠ σ(j − 1)`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::primitives::PrimitiveLibrary;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchingSignal {
    assignments: Vec<usize>,
    /// `prefix[j]` = number of switches at indices `< j`.
    prefix: Vec<u32>,
}

impl SwitchingSignal {
    pub fn new(assignments: Vec<usize>) -> Result<Self> {
        if assignments.is_empty() {
            return Err(invalid("a switching signal needs at least one step"));
        }
        let mut prefix = Vec::with_capacity(assignments.len() + 1);
        prefix.push(0);
        let mut count = 0u32;
        for j in 0..assignments.len() {
            if j >= 1 && assignments[j] != assignments[j - 1] {
                count += 1;
            }
            // prefix[j + 1] counts switches at indices <= j
            prefix.push(count);
        }
        Ok(Self {
            assignments,
            prefix,
        })
    }

    pub fn constant(id: usize, len: usize) -> Result<Self> {
        Self::new(vec![id; len])
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn at(&self, k: usize) -> usize {
        self.assignments[k]
    }

    pub fn switch_times(&self) -> Vec<usize> {
        (1..self.len())
            .filter(|&j| self.assignments[j] != self.assignments[j - 1])
            .collect()
    }

    pub fn check_ids(&self, lib: &PrimitiveLibrary) -> Result<()> {
        for &id in &self.assignments {
            lib.position(id)?;
        }
        Ok(())
    }

    fn switches_in(&self, lower: usize, upper: usize) -> u32 {
        self.prefix[upper] - self.prefix[lower]
    }

    /// Reads `k,id` rows. Rows must be in order with `k = 0, 1, 2, …`.
    pub fn read_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut ids = Vec::new();
        for (row, rec) in rdr.deserialize::<(usize, usize)>().enumerate() {
            let (k, id) = rec?;
            if k != row {
                return Err(invalid(format!("expected step {row}, found {k}")));
            }
            ids.push(id);
        }
        Self::new(ids)
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "id"])?;
        for (k, id) in self.assignments.iter().enumerate() {
            w.write_record([k.to_string(), id.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `(N₀, Nₐ)` of the average dwell-time inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwellTimeBudget {
    pub n0: f64,
    pub na: f64,
}

impl DwellTimeBudget {
    pub fn new(n0: f64, na: f64) -> Result<Self> {
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(invalid(format!("N0 must be positive, got {n0}")));
        }
        if !(na > 0.0 && na.is_finite()) {
            return Err(invalid(format!("Na must be positive, got {na}")));
        }
        Ok(Self { n0, na })
    }

    /// `N₀ + span/Nₐ − count`.
    #[inline]
    pub fn slack(&self, span: usize, count: u32) -> f64 {
        self.n0 + span as f64 / self.na - count as f64
    }
}

/// Switches in `[lower, upper)`.
pub fn count_switches(sigma: &SwitchingSignal, lower: usize, upper: usize) -> Result<u32> {
    if lower > upper || upper > sigma.len() {
        return Err(invalid(format!(
            "interval [{lower}, {upper}) outside signal of length {}",
            sigma.len()
        )));
    }
    Ok(sigma.switches_in(lower, upper))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwellTimeReport {
    pub valid: bool,
    /// `(k̲, k)` minimizing the slack.
    pub worst_interval: (usize, usize),
    pub slack: f64,
}

/// Exhaustive check of the inequality over every interval `[k̲, k)` with
/// `0 ≤ k̲ ≤ k ≤ len`.
pub fn validate_dwell_time(sigma: &SwitchingSignal, budget: &DwellTimeBudget) -> DwellTimeReport {
    let len = sigma.len();
    let mut worst = (0, 0);
    let mut worst_slack = budget.n0;
    for lower in 0..=len {
        for upper in lower..=len {
            let s = budget.slack(upper - lower, sigma.switches_in(lower, upper));
            if s < worst_slack {
                worst_slack = s;
                worst = (lower, upper);
            }
        }
    }
    DwellTimeReport {
        valid: worst_slack >= 0.0,
        worst_interval: worst,
        slack: worst_slack,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Admit,
    Defer,
}

/// Would appending `requested` at step `k = history.len()` keep every
/// interval ending at `k + 1` within budget?
pub fn admit_switch(history: &[usize], requested: usize, budget: &DwellTimeBudget) -> Decision {
    let Some(&current) = history.last() else {
        return Decision::Admit;
    };
    if current == requested {
        return Decision::Admit;
    }
    let k = history.len();
    // switches at indices < j, for j = 0..=k
    let mut prefix = Vec::with_capacity(k + 1);
    prefix.push(0u32);
    for j in 0..k {
        let s = u32::from(j >= 1 && history[j] != history[j - 1]);
        prefix.push(prefix[j] + s);
    }
    let total = prefix[k] + 1;
    if (0..=k).all(|lower| budget.slack(k + 1 - lower, total - prefix[lower]) >= 0.0) {
        Decision::Admit
    } else {
        Decision::Defer
    }
}

/// Causal single-writer supervisor: appends one primitive per step,
/// deferring switches the budget cannot afford. Past admissions are never
/// retracted.
#[derive(Debug, Clone)]
pub struct Supervisor {
    budget: DwellTimeBudget,
    history: Vec<usize>,
    prefix: Vec<u32>,
    deferrals: usize,
}

impl Supervisor {
    pub fn new(budget: DwellTimeBudget) -> Self {
        Self {
            budget,
            history: Vec::new(),
            prefix: vec![0],
            deferrals: 0,
        }
    }

    pub fn budget(&self) -> &DwellTimeBudget {
        &self.budget
    }

    pub fn history(&self) -> &[usize] {
        &self.history
    }

    pub fn current(&self) -> Option<usize> {
        self.history.last().copied()
    }

    pub fn deferrals(&self) -> usize {
        self.deferrals
    }

    /// Same decision as [`admit_switch`] on the current history, in O(k)
    /// without rebuilding prefix counts.
    pub fn decide(&self, requested: usize) -> Decision {
        match self.current() {
            None => Decision::Admit,
            Some(c) if c == requested => Decision::Admit,
            Some(_) => {
                let k = self.history.len();
                let total = self.prefix[k] + 1;
                let ok = (0..=k).all(|lower| {
                    self.budget.slack(k + 1 - lower, total - self.prefix[lower]) >= 0.0
                });
                if ok {
                    Decision::Admit
                } else {
                    Decision::Defer
                }
            }
        }
    }

    /// Appends the next step and returns the primitive actually in force.
    pub fn step(&mut self, requested: usize) -> (Decision, usize) {
        let decision = self.decide(requested);
        let chosen = match (decision, self.current()) {
            (Decision::Defer, Some(c)) => {
                self.deferrals += 1;
                c
            }
            _ => requested,
        };
        let k = self.history.len();
        let switched = k >= 1 && self.history[k - 1] != chosen;
        self.prefix.push(self.prefix[k] + u32::from(switched));
        self.history.push(chosen);
        (decision, chosen)
    }

    pub fn signal(&self) -> Result<SwitchingSignal> {
        SwitchingSignal::new(self.history.clone())
    }
}

/// `σ(k+1) = sign(Φ_k) + 1` with a symmetric dead zone: 0 turns clockwise,
/// 1 walks straight, 2 turns counter-clockwise.
pub fn heading_policy(phi: f64, dead_zone: f64) -> Result<usize> {
    if !phi.is_finite() {
        return Err(Error::InvalidInput(format!(
            "heading must be finite, got {phi}"
        )));
    }
    if !(dead_zone >= 0.0) {
        return Err(invalid("dead zone must be nonnegative"));
    }
    Ok(if phi < -dead_zone {
        0
    } else if phi > dead_zone {
        2
    } else {
        1
    })
}
