//! Analog beam selection: exhaustive search, projected-power per-user
//! selection, and the two-step over-select-then-prune scheme.
//!
//! Every candidate is scored with the closed-form rate of the configured
//! scheme. Candidates are scored from the cached beam projections `U·H̄`
//! (see [`SelectionContext::projections`]), so no beamformer is formed
//! until the final selection is returned.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::approx::{approx_rate_from_los, EffectiveLos};
use crate::channel::RiceanParams;
use crate::codebook::{BeamSelection, DftCodebook};
use crate::linkrates::LinkPowers;
use crate::{CMatrix, Error, Result, Scheme};

/// Default cap on exhaustive-search candidates.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionScheme {
    Exhaustive,
    PerUser,
    TwoStep,
}

impl SelectionScheme {
    pub fn label(self) -> &'static str {
        match self {
            SelectionScheme::Exhaustive => "exhaustive",
            SelectionScheme::PerUser => "per_user",
            SelectionScheme::TwoStep => "two_step",
        }
    }
}

/// Everything a selector needs; all long-term quantities.
#[derive(Debug, Clone)]
pub struct SelectionContext {
    params: RiceanParams,
    codebook: DftCodebook,
    objective: Scheme,
    powers: LinkPowers,
    chains: usize,
    margin: usize,
    budget: u64,
    projections: CMatrix,
}

impl SelectionContext {
    pub fn new(
        params: RiceanParams,
        codebook: DftCodebook,
        objective: Scheme,
        powers: LinkPowers,
        chains: usize,
        margin: usize,
    ) -> Result<Self> {
        let m = codebook.order();
        let nu = params.users();
        if params.antennas() != m {
            return Err(Error::Dimension(format!(
                "codebook of order {m} for {} antennas",
                params.antennas()
            )));
        }
        if !(nu <= chains && chains <= m) {
            return Err(Error::Dimension(format!(
                "need N_u <= N_s <= M, got N_u={nu}, N_s={chains}, M={m}"
            )));
        }
        if objective == Scheme::DlZfLt && chains == nu {
            return Err(Error::Dimension(format!("{objective} objective needs N_s > N_u")));
        }
        if margin == 0 {
            return Err(Error::Parameter("two-step margin n must be at least 1".into()));
        }
        let projections = codebook.matrix() * params.los();
        Ok(SelectionContext {
            params,
            codebook,
            objective,
            powers,
            chains,
            margin,
            budget: DEFAULT_BUDGET,
            projections,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_margin(mut self, margin: usize) -> Result<Self> {
        if margin == 0 {
            return Err(Error::Parameter("two-step margin n must be at least 1".into()));
        }
        self.margin = margin;
        Ok(self)
    }

    pub fn params(&self) -> &RiceanParams {
        &self.params
    }

    pub fn codebook(&self) -> &DftCodebook {
        &self.codebook
    }

    pub fn objective(&self) -> Scheme {
        self.objective
    }

    pub fn chains(&self) -> usize {
        self.chains
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    /// Beams per user, `C = ⌊N_s/N_u⌋`.
    pub fn per_user_share(&self) -> usize {
        self.chains / self.params.users()
    }

    /// `U·H̄`: entry `(n, k)` is the projection of `h̄_k` onto beam `n`.
    pub fn projections(&self) -> &CMatrix {
        &self.projections
    }

    /// Approximate sum rate of the beams at `indices`.
    pub fn objective_of(&self, indices: &[usize]) -> Result<f64> {
        let los = EffectiveLos::from_beamformed(&self.projections.select_rows(indices));
        let report = approx_rate_from_los(
            self.objective,
            self.params.betas(),
            self.params.kappas(),
            &los,
            self.powers,
        )?;
        Ok(report.sum)
    }

    /// Beams sorted by projected LoS power of user `k`, strongest first;
    /// ties go to the lower index.
    fn ranking(&self, k: usize) -> Vec<usize> {
        let power: Vec<f64> = self.projections.column(k).iter().map(|z| z.norm_sqr()).collect();
        let mut order: Vec<usize> = (0..power.len()).collect();
        order.sort_by(|&a, &b| power[b].total_cmp(&power[a]).then(a.cmp(&b)));
        order
    }

    /// Assigns `quota[k]` beams to each user in turn by projected power,
    /// skipping beams already claimed. Returns the beams and the number of
    /// power comparisons (`M` per user).
    fn assign_by_power(&self, quota: &[usize]) -> (Vec<usize>, u64) {
        let m = self.codebook.order();
        let mut taken = vec![false; m];
        let mut beams = Vec::with_capacity(quota.iter().sum());
        let mut comparisons = 0u64;
        for (k, &q) in quota.iter().enumerate() {
            comparisons += m as u64;
            let mut got = 0;
            for n in self.ranking(k) {
                if got == q {
                    break;
                }
                if !taken[n] {
                    taken[n] = true;
                    beams.push(n);
                    got += 1;
                }
            }
        }
        (beams, comparisons)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub selection: BeamSelection,
    /// Candidate evaluations or power comparisons actually performed.
    pub comparisons: u64,
    /// Table-formula count for the scheme.
    pub theoretical_comparisons: BigUint,
    /// Approximate sum rate of the chosen beams.
    pub objective: f64,
    pub scheme: SelectionScheme,
    pub margin: Option<usize>,
}

/// Number of comparisons each scheme needs.
///
/// Exhaustive: `M^{N_s}`. Per-user: `M·N_u`. Two-step:
/// `M·N_u + ½[N_u²(C+n)² + N_u(C+n) − N_s² − N_s]` with `C = ⌊N_s/N_u⌋`.
pub fn comparison_count(scheme: SelectionScheme, m: usize, ns: usize, nu: usize, n: usize) -> BigUint {
    match scheme {
        SelectionScheme::Exhaustive => BigUint::from(m).pow(ns as u32),
        SelectionScheme::PerUser => BigUint::from(m) * BigUint::from(nu),
        SelectionScheme::TwoStep => {
            let c = ns.checked_div(nu).unwrap_or(0);
            let l = BigUint::from(nu * (c + n));
            let first = BigUint::from(m) * BigUint::from(nu);
            let top = &l * &l + &l;
            let bottom = BigUint::from(ns * ns + ns);
            if top < bottom {
                first
            } else {
                first + (top - bottom) / 2u32
            }
        }
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Best subset among those whose first index is `first`, in lexicographic
/// order. Returns `(objective, indices, evaluated)`; ties keep the earlier subset.
fn best_with_prefix(ctx: &SelectionContext, first: usize) -> Result<(f64, Vec<usize>, u64)> {
    let m = ctx.codebook.order();
    let ns = ctx.chains;
    let mut combo: Vec<usize> = (0..ns).map(|i| first + i).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut evaluated = 0u64;
    loop {
        let value = ctx.objective_of(&combo)?;
        evaluated += 1;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, combo.clone()));
        }
        // advance positions 1.., keeping combo[0] = first
        let Some(i) = (1..ns).rev().find(|&i| combo[i] < m - ns + i) else {
            break;
        };
        combo[i] += 1;
        for j in i + 1..ns {
            combo[j] = combo[j - 1] + 1;
        }
    }
    let (value, indices) = best.expect("at least one candidate");
    Ok((value, indices, evaluated))
}

/// Scores every distinct `N_s`-subset and keeps the best; ties go to the
/// lexicographically smallest sorted index list.
pub fn exhaustive_search(ctx: &SelectionContext) -> Result<SelectionResult> {
    let m = ctx.codebook.order();
    let ns = ctx.chains;
    let candidates = binomial(m, ns);
    if candidates > ctx.budget as u128 {
        let shown = if candidates == u128::MAX {
            format!("more than {}", u128::MAX)
        } else {
            candidates.to_string()
        };
        return Err(Error::BudgetExceeded {
            candidates: shown,
            budget: ctx.budget,
        });
    }
    let per_prefix: Vec<(f64, Vec<usize>, u64)> = (0..=m - ns)
        .into_par_iter()
        .map(|first| best_with_prefix(ctx, first))
        .collect::<Result<_>>()?;
    let mut evaluated = 0u64;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (value, combo, count) in per_prefix {
        evaluated += count;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, combo));
        }
    }
    let (objective, indices) = best.expect("at least one prefix");
    Ok(SelectionResult {
        selection: BeamSelection::new(indices)?,
        comparisons: evaluated,
        theoretical_comparisons: comparison_count(SelectionScheme::Exhaustive, m, ns, ctx.params.users(), 0),
        objective,
        scheme: SelectionScheme::Exhaustive,
        margin: None,
    })
}

/// Each of the first `N_u − 1` users takes its `C` strongest beams; the last
/// user takes the remaining `N_s − C(N_u − 1)`.
pub fn per_user_selection(ctx: &SelectionContext) -> Result<SelectionResult> {
    let nu = ctx.params.users();
    let c = ctx.per_user_share();
    let mut quota = vec![c; nu];
    quota[nu - 1] = ctx.chains - c * (nu - 1);
    let (beams, comparisons) = ctx.assign_by_power(&quota);
    let objective = ctx.objective_of(&beams)?;
    Ok(SelectionResult {
        selection: BeamSelection::new(beams)?,
        comparisons,
        theoretical_comparisons: comparison_count(SelectionScheme::PerUser, ctx.codebook.order(), ctx.chains, nu, 0),
        objective,
        scheme: SelectionScheme::PerUser,
        margin: None,
    })
}

/// Step 1 picks `C + n` beams per user by projected power. Step 2 removes
/// `N_u(C+n) − N_s` beams one per round, each time dropping the beam whose
/// removal leaves the highest objective (lowest position on ties). Survivors
/// keep their Step-1 order.
pub fn two_step_selection(ctx: &SelectionContext) -> Result<SelectionResult> {
    let m = ctx.codebook.order();
    let nu = ctx.params.users();
    let per_user = ctx.per_user_share() + ctx.margin;
    if nu * per_user > m {
        return Err(Error::Parameter(format!(
            "two-step needs N_u(C+n) = {} <= M = {m}; reduce the margin n",
            nu * per_user
        )));
    }
    let (mut beams, mut comparisons) = ctx.assign_by_power(&vec![per_user; nu]);

    while beams.len() > ctx.chains {
        let scores: Vec<f64> = (0..beams.len())
            .into_par_iter()
            .map(|pos| {
                let mut rest = beams.clone();
                rest.remove(pos);
                ctx.objective_of(&rest)
            })
            .collect::<Result<_>>()?;
        comparisons += scores.len() as u64;
        let mut drop_at = 0;
        for (pos, &s) in scores.iter().enumerate() {
            if s > scores[drop_at] {
                drop_at = pos;
            }
        }
        beams.remove(drop_at);
    }
    let objective = ctx.objective_of(&beams)?;
    Ok(SelectionResult {
        selection: BeamSelection::new(beams)?,
        comparisons,
        theoretical_comparisons: comparison_count(SelectionScheme::TwoStep, m, ctx.chains, nu, ctx.margin),
        objective,
        scheme: SelectionScheme::TwoStep,
        margin: Some(ctx.margin),
    })
}

pub fn select(scheme: SelectionScheme, ctx: &SelectionContext) -> Result<SelectionResult> {
    match scheme {
        SelectionScheme::Exhaustive => exhaustive_search(ctx),
        SelectionScheme::PerUser => per_user_selection(ctx),
        SelectionScheme::TwoStep => two_step_selection(ctx),
    }
}

#[cfg(test)]
mod tests;
