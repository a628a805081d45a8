//! Exact feasibility of outcome constraints for local deterministic models.
//!
//! A local model assigns predetermined values `(f_A, g_A, f_B, g_B) ∈ {−1,+1}⁴`
//! to the four measurements; a hidden-variable model is a probability
//! distribution over those 16 strategies. The null outcome is not modelled
//! because it has probability zero on the states considered here.
//!
//! Feasibility is decided with a phase-one simplex over exact rationals. An
//! infeasible answer comes with Farkas multipliers `λ` such that
//! `Σ_k λ_k [s ∈ E_k] ≥ 0` for every strategy `s` while `Σ_k λ_k p_k < 0`,
//! which is checked exactly before it is returned.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variable {
    FA,
    GA,
    FB,
    GB,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::FA => "f_A",
            Variable::GA => "g_A",
            Variable::FB => "f_B",
            Variable::GB => "g_B",
        })
    }
}

/// One deterministic assignment of the four outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    pub f_a: i8,
    pub g_a: i8,
    pub f_b: i8,
    pub g_b: i8,
}

impl Strategy {
    /// All 16 strategies in a fixed order.
    pub fn all() -> Vec<Strategy> {
        let v = |bit: usize, k: usize| if k >> bit & 1 == 1 { 1 } else { -1 };
        (0..16)
            .map(|k| Strategy {
                f_a: v(3, k),
                g_a: v(2, k),
                f_b: v(1, k),
                g_b: v(0, k),
            })
            .collect()
    }

    pub fn value(&self, var: Variable) -> i8 {
        match var {
            Variable::FA => self.f_a,
            Variable::GA => self.g_a,
            Variable::FB => self.f_b,
            Variable::GB => self.g_b,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(f_A={:+}, g_A={:+}, f_B={:+}, g_B={:+})",
            self.f_a, self.g_a, self.f_b, self.g_b
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: Variable,
    pub value: i8,
}

/// Conjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event(pub Vec<Literal>);

impl Event {
    pub fn both(a: (Variable, i8), b: (Variable, i8)) -> Self {
        Event(vec![Literal { var: a.0, value: a.1 }, Literal { var: b.0, value: b.1 }])
    }

    pub fn holds(&self, s: &Strategy) -> bool {
        self.0.iter().all(|l| s.value(l.var) == l.value)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("⊤");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            write!(f, "{}={}", l.var, l.value)?;
        }
        Ok(())
    }
}

/// `P(event) = probability`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub event: Event,
    pub probability: BigRational,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({}) = {}", self.event, self.probability)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LhvScenario {
    pub constraints: Vec<Constraint>,
}

impl LhvScenario {
    pub fn new(constraints: Vec<Constraint>) -> Result<Self> {
        for c in &constraints {
            if c.probability.is_negative() || c.probability > BigRational::one() {
                return Err(argument(format!("probability {} outside [0, 1]", c.probability)));
            }
        }
        Ok(Self { constraints })
    }

    /// The four constraints of the argument with coincidence probability `p`:
    /// `P(f_A=1 ∧ f_B=1) = 0`, `P(f_A=−1 ∧ g_B=1) = 0`,
    /// `P(f_B=−1 ∧ g_A=1) = 0`, `P(g_A=1 ∧ g_B=1) = p`.
    pub fn hardy(p: BigRational) -> Result<Self> {
        let zero = BigRational::zero();
        Self::new(vec![
            Constraint {
                event: Event::both((Variable::FA, 1), (Variable::FB, 1)),
                probability: zero.clone(),
            },
            Constraint {
                event: Event::both((Variable::FA, -1), (Variable::GB, 1)),
                probability: zero.clone(),
            },
            Constraint {
                event: Event::both((Variable::FB, -1), (Variable::GA, 1)),
                probability: zero,
            },
            Constraint {
                event: Event::both((Variable::GA, 1), (Variable::GB, 1)),
                probability: p,
            },
        ])
    }
}

/// Infeasibility proof.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// One multiplier per constraint.
    pub multipliers: Vec<BigRational>,
    /// Multiplier of the normalization `Σ_s w_s = 1`.
    pub normalization: BigRational,
    /// `Σ_k λ_k p_k + λ_0`, strictly negative.
    pub bound: BigRational,
    pub narrative: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    /// A distribution over strategies meeting every constraint exactly.
    Feasible(Vec<(Strategy, BigRational)>),
    Infeasible(Certificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides whether some distribution over the 16 strategies satisfies every
/// constraint of `scenario`.
pub fn lhv_feasibility(scenario: &LhvScenario) -> Result<Feasibility> {
    // re-validate in case the scenario was built field by field
    let scenario = LhvScenario::new(scenario.constraints.clone())?;
    let strategies = Strategy::all();
    let one = BigRational::one();
    // rows: constraints then normalization
    let mut a: Vec<Vec<BigRational>> = scenario
        .constraints
        .iter()
        .map(|c| {
            strategies
                .iter()
                .map(|s| {
                    if c.event.holds(s) {
                        one.clone()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    a.push(vec![one.clone(); strategies.len()]);
    let mut b: Vec<BigRational> = scenario.constraints.iter().map(|c| c.probability.clone()).collect();
    b.push(one.clone());

    let (value, x, y) = phase_one(&a, &b);
    if value.is_zero() {
        let weights: Vec<(Strategy, BigRational)> = strategies
            .iter()
            .zip(x)
            .filter(|(_, w)| !w.is_zero())
            .map(|(s, w)| (*s, w))
            .collect();
        debug_assert!(verify_witness(&scenario, &weights));
        return Ok(Feasibility::Feasible(weights));
    }

    // λ = −y gives Σ λ_k A_kj ≥ 0 and λ·b = −value < 0.
    let lambda: Vec<BigRational> = y.iter().map(|v| -v.clone()).collect();
    let m = scenario.constraints.len();
    let bound: BigRational = lambda.iter().zip(&b).map(|(l, p)| l * p).sum();
    for j in 0..strategies.len() {
        let s: BigRational = (0..=m).map(|k| &lambda[k] * &a[k][j]).sum();
        assert!(
            !s.is_negative(),
            "Farkas multipliers fail on strategy {}",
            strategies[j]
        );
    }
    assert!(bound.is_negative(), "Farkas bound is not negative");
    let narrative = narrate(&scenario, &strategies, &lambda, &bound);
    Ok(Feasibility::Infeasible(Certificate {
        multipliers: lambda[..m].to_vec(),
        normalization: lambda[m].clone(),
        bound,
        narrative,
    }))
}

impl Certificate {
    /// Re-checks the certificate against `scenario` from scratch: every
    /// strategy gets a nonnegative weighted sum and the bound is negative.
    pub fn verify(&self, scenario: &LhvScenario) -> bool {
        if self.multipliers.len() != scenario.constraints.len() {
            return false;
        }
        let bound: BigRational = self
            .multipliers
            .iter()
            .zip(&scenario.constraints)
            .map(|(l, c)| l * &c.probability)
            .sum::<BigRational>()
            + &self.normalization;
        bound == self.bound
            && bound.is_negative()
            && Strategy::all().iter().all(|s| {
                let v: BigRational = self
                    .multipliers
                    .iter()
                    .zip(&scenario.constraints)
                    .filter(|(_, c)| c.event.holds(s))
                    .map(|(l, _)| l.clone())
                    .sum::<BigRational>()
                    + &self.normalization;
                !v.is_negative()
            })
    }
}

/// Checks that `weights` is a distribution over strategies meeting every constraint exactly.
pub fn verify_witness(scenario: &LhvScenario, weights: &[(Strategy, BigRational)]) -> bool {
    let total: BigRational = weights.iter().map(|(_, w)| w.clone()).sum();
    total.is_one()
        && weights.iter().all(|(_, w)| !w.is_negative())
        && scenario.constraints.iter().all(|c| {
            let p: BigRational = weights
                .iter()
                .filter(|(s, _)| c.event.holds(s))
                .map(|(_, w)| w.clone())
                .sum();
            p == c.probability
        })
}

fn narrate(
    scenario: &LhvScenario,
    strategies: &[Strategy],
    lambda: &[BigRational],
    bound: &BigRational,
) -> Vec<String> {
    let mut lines = Vec::new();
    let zero_events: Vec<&Constraint> = scenario
        .constraints
        .iter()
        .filter(|c| c.probability.is_zero())
        .collect();
    for c in scenario.constraints.iter().filter(|c| c.probability.is_positive()) {
        let supporting: Vec<&Strategy> = strategies.iter().filter(|s| c.event.holds(s)).collect();
        let blocked: Vec<Option<&Constraint>> = supporting
            .iter()
            .map(|s| zero_events.iter().copied().find(|z| z.event.holds(s)))
            .collect();
        if blocked.iter().all(Option::is_some) {
            lines.push(format!(
                "Every strategy with {} also satisfies an event of probability zero:",
                c.event
            ));
            for (s, z) in supporting.iter().zip(&blocked) {
                lines.push(format!("  {s} lies in {}", z.unwrap().event));
            }
            lines.push(format!(
                "Hence P({}) ≤ 0 in any local model, contradicting P({}) = {}.",
                c.event, c.event, c.probability
            ));
        }
    }
    let terms: Vec<String> = scenario
        .constraints
        .iter()
        .zip(lambda)
        .filter(|(_, l)| !l.is_zero())
        .map(|(c, l)| format!("({l})·[{}]", c.event))
        .collect();
    let norm = &lambda[scenario.constraints.len()];
    let mut combo = terms.join(" + ");
    if !norm.is_zero() {
        combo.push_str(&format!(" + ({norm})"));
    }
    lines.push(format!(
        "Farkas combination {combo} is ≥ 0 on all 16 strategies but evaluates to {bound} < 0 on the constraints."
    ));
    lines
}

/// Phase-one simplex for `A x = b, x ≥ 0` with `b ≥ 0`, Bland's rule.
/// Returns the minimum total artificial weight, the primal `x` and the dual `y`.
fn phase_one(a: &[Vec<BigRational>], b: &[BigRational]) -> (BigRational, Vec<BigRational>, Vec<BigRational>) {
    let m = a.len();
    let n = a[0].len();
    let width = n + m + 1;
    let zero = BigRational::zero();
    let one = BigRational::one();
    let mut t: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|k| if k == i { one.clone() } else { zero.clone() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs for minimizing Σ artificials
    let mut cost: Vec<BigRational> = (0..width)
        .map(|j| {
            let base = if (n..n + m).contains(&j) {
                one.clone()
            } else {
                zero.clone()
            };
            base - (0..m).map(|i| t[i][j].clone()).sum::<BigRational>()
        })
        .collect();
    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            unreachable!("phase one is bounded below by zero");
        };
        let piv = t[r][enter].clone();
        t[r].iter_mut().for_each(|v| *v = &*v / &piv);
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v = &*v - &f * p);
            }
        }
        let f = cost[enter].clone();
        cost.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v = &*v - &f * p);
        basis[r] = enter;
    }
    let mut x = vec![zero.clone(); n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = t[i][width - 1].clone();
        }
    }
    // reduced cost of artificial k is 1 − y_k
    let y: Vec<BigRational> = (0..m).map(|k| &one - &cost[n + k]).collect();
    let value = -cost[width - 1].clone();
    (value, x, y)
}

/// `num/den` as a rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardy_constraints_with_positive_probability_are_infeasible() {
        let s = LhvScenario::hardy(ratio(9, 112)).unwrap();
        match lhv_feasibility(&s).unwrap() {
            Feasibility::Infeasible(c) => {
                assert!(c.bound.is_negative());
                assert!(c.verify(&s));
                assert!(!c.verify(&LhvScenario::hardy(ratio(0, 1)).unwrap()));
                assert!(c.narrative.iter().any(|l| l.contains("g_A=1 ∧ g_B=1")));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn zero_coincidence_is_feasible() {
        let s = LhvScenario::hardy(ratio(0, 1)).unwrap();
        let f = lhv_feasibility(&s).unwrap();
        let Feasibility::Feasible(w) = f else {
            panic!("expected feasible")
        };
        assert!(verify_witness(&s, &w));
    }

    #[test]
    fn single_coincidence_constraint_is_feasible() {
        let s = LhvScenario::new(vec![Constraint {
            event: Event::both((Variable::GA, 1), (Variable::GB, 1)),
            probability: ratio(1, 4),
        }])
        .unwrap();
        let Feasibility::Feasible(w) = lhv_feasibility(&s).unwrap() else {
            panic!("expected feasible")
        };
        assert!(verify_witness(&s, &w));
    }

    #[test]
    fn rejects_probability_outside_unit_interval() {
        assert!(LhvScenario::hardy(ratio(9, 8)).is_err());
        assert!(LhvScenario::hardy(ratio(-1, 8)).is_err());
    }

    #[test]
    fn contradictory_point_masses_are_infeasible() {
        let s = LhvScenario::new(vec![
            Constraint {
                event: Event::both((Variable::FA, 1), (Variable::FB, 1)),
                probability: ratio(1, 1),
            },
            Constraint {
                event: Event::both((Variable::FA, -1), (Variable::GB, 1)),
                probability: ratio(1, 2),
            },
        ])
        .unwrap();
        assert!(!lhv_feasibility(&s).unwrap().is_feasible());
    }

    #[test]
    fn strategies_are_distinct() {
        let all = Strategy::all();
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 16);
    }
}
