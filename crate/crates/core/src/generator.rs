//! Seeded synthesis of consistent states with a chosen number of variables
//! and relational density.
//!
//! Every state is built around a witness point: unary bounds and relational
//! constraints are the witness's own values plus a non-negative slack, so the
//! witness satisfies everything and closure can never report bottom.

use crate::bound::Bound;
use crate::constraint::{Constraint, ConstraintKind};
use crate::domain::{AbstractDomain, DomainError, DomainKind};
use crate::rng::{mix, Rng};

/// Retries before [`sample_tightening_constraint`] gives up and returns a
/// no-op constraint.
pub const TIGHTENING_RETRIES: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratorError {
    #[error("density {0} outside [0, 1]")]
    InvalidDensity(f64),
    #[error("invalid range [{0}, {1}]")]
    InvalidRange(i64, i64),
    #[error("slack range must be non-negative, got [{0}, {1}]")]
    NegativeSlack(i64, i64),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub n: usize,
    pub density: f64,
    pub seed: u64,
    pub witness_range: (i64, i64),
    pub slack_range: (i64, i64),
    pub domain: DomainKind,
}

impl GeneratorParams {
    pub fn new(n: usize, density: f64, seed: u64) -> GeneratorParams {
        GeneratorParams {
            n,
            density,
            seed,
            witness_range: (-100, 100),
            slack_range: (0, 50),
            domain: DomainKind::Octagon,
        }
    }

    pub fn with_seed(&self, seed: u64) -> GeneratorParams {
        GeneratorParams { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n == 0 {
            return Err(DomainError::InvalidDimension(0).into());
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(GeneratorError::InvalidDensity(self.density));
        }
        let (wl, wh) = self.witness_range;
        if wl > wh {
            return Err(GeneratorError::InvalidRange(wl, wh));
        }
        let (sl, sh) = self.slack_range;
        if sl > sh {
            return Err(GeneratorError::InvalidRange(sl, sh));
        }
        if sl < 0 {
            return Err(GeneratorError::NegativeSlack(sl, sh));
        }
        Ok(())
    }

    /// Midpoint of the slack range, used when tightening an unbounded form.
    pub fn median_slack(&self) -> i64 {
        (self.slack_range.0 + self.slack_range.1) / 2
    }
}

/// A generated state together with the point that proves it consistent.
#[derive(Clone, Debug, PartialEq)]
pub struct Generated<D> {
    pub state: D,
    pub witness: Vec<i64>,
    /// Related pairs `(i, j)`, `i < j`, in selection order.
    pub pairs: Vec<(usize, usize)>,
}

pub fn pair_count(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

/// `floor(density * n(n-1)/2)`. A tiny epsilon absorbs binary-fraction
/// error so that e.g. `0.7 * 10` selects 7 pairs, not 6.
pub fn selected_pair_count(n: usize, density: f64) -> usize {
    let total = pair_count(n);
    ((density * total as f64) + 1e-9).floor().min(total as f64) as usize
}

/// Density the generator achieves exactly for `(n, density)`.
pub fn expected_density(n: usize, density: f64) -> f64 {
    let total = pair_count(n);
    if total == 0 {
        0.0
    } else {
        selected_pair_count(n, density) as f64 / total as f64
    }
}

/// Seed of one grid cell: `base ^ mix((n << 32) | density_index)`.
pub fn cell_seed(base_seed: u64, n: usize, density_index: usize) -> u64 {
    base_seed ^ mix(((n as u64) << 32) | density_index as u64)
}

/// Draw order: witness, unary slacks (upper then lower per variable), pair
/// selection, then one slack per relational constraint.
pub fn generate<D: AbstractDomain>(p: &GeneratorParams) -> Result<Generated<D>, GeneratorError> {
    p.validate()?;
    let mut rng = Rng::new(p.seed);
    let n = p.n;
    let (wl, wh) = p.witness_range;
    let (sl, sh) = p.slack_range;

    let witness: Vec<i64> = (0..n).map(|_| rng.range_inclusive(wl, wh)).collect();
    let mut ks = Vec::with_capacity(2 * n);
    for (k, &w) in witness.iter().enumerate() {
        let up = rng.range_inclusive(sl, sh);
        let down = rng.range_inclusive(sl, sh);
        ks.push(Constraint::upper(k, w + up));
        ks.push(Constraint::lower(k, w - down));
    }

    let mut all_pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let chosen = selected_pair_count(n, p.density);
    rng.partial_shuffle(&mut all_pairs, chosen);
    all_pairs.truncate(chosen);

    for &(i, j) in &all_pairs {
        for &kind in D::RELATIONAL_KINDS {
            let v = Constraint::form_value(kind, i, j, &witness);
            ks.push(Constraint::from_le_form(kind, i, j, v + rng.range_inclusive(sl, sh)));
        }
    }

    let state = D::from_constraints(n, &ks)?;
    Ok(Generated {
        state,
        witness,
        pairs: all_pairs,
    })
}

/// Two independent states with the same shape, from `p.seed` and `seed2`.
pub fn generate_pair<D: AbstractDomain>(
    p: &GeneratorParams,
    seed2: u64,
) -> Result<(Generated<D>, Generated<D>), GeneratorError> {
    Ok((generate(p)?, generate(&p.with_seed(seed2))?))
}

/// Picks a constraint that strictly tightens the closed `state` while the
/// witness still satisfies it: halfway between the witness's value and the
/// current bound, or witness value plus `median_slack` when unbounded.
/// After [`TIGHTENING_RETRIES`] misses it returns a constraint equal to the
/// current bound of the last form tried.
pub fn sample_tightening_constraint<D: AbstractDomain>(
    state: &D,
    rng: &mut Rng,
    witness: &[i64],
    median_slack: i64,
) -> Constraint {
    let n = state.num_vars();
    let kinds: Vec<ConstraintKind> = D::KINDS
        .iter()
        .copied()
        .filter(|k| n > 1 || k.is_unary())
        .collect();
    let mut last = None;
    for _ in 0..TIGHTENING_RETRIES {
        let i = rng.index(n);
        let j = if n > 1 {
            let j = rng.index(n - 1);
            if j >= i {
                j + 1
            } else {
                j
            }
        } else {
            i
        };
        let kind = kinds[rng.index(kinds.len())];
        let value = Constraint::form_value(kind, i, j, witness);
        match state.form_bound(kind, i, j) {
            Some(Bound::Infinite) => return Constraint::from_le_form(kind, i, j, value + median_slack),
            Some(Bound::Finite(cur)) => {
                if cur > value {
                    return Constraint::from_le_form(kind, i, j, value + (cur - value) / 2);
                }
                last = Some(Constraint::from_le_form(kind, i, j, cur));
            }
            None => continue,
        }
    }
    last.expect("at least one representable form was sampled")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octagon::Octagon;
    use crate::zone::Zone;

    #[test]
    fn density_zero_is_interval_only() {
        let g = generate::<Octagon>(&GeneratorParams::new(10, 0.0, 3)).unwrap();
        assert_eq!(g.state.achieved_density(), 0.0);
        assert!(g.pairs.is_empty());
        assert_eq!(g.state.constraints().len(), 20);
    }

    #[test]
    fn ten_variables_half_density() {
        let g = generate::<Octagon>(&GeneratorParams::new(10, 0.5, 42)).unwrap();
        assert_eq!(selected_pair_count(10, 0.5), 22);
        assert_eq!(g.pairs.len(), 22);
        assert_eq!(g.state.achieved_density(), 22.0 / 45.0);
        assert!(!g.state.close_full().is_bottom());
        for k in g.state.constraints() {
            assert!(k.is_satisfied_by(&g.witness), "{k}");
        }
    }

    #[test]
    fn float_products_round_as_decimals() {
        assert_eq!(selected_pair_count(5, 0.7), 7);
        assert_eq!(selected_pair_count(25, 0.3), 90);
        assert_eq!(selected_pair_count(1, 0.9), 0);
        assert_eq!(selected_pair_count(4, 1.0), 6);
    }

    #[test]
    fn default_grid_yields_distinct_states() {
        let mut seen = Vec::new();
        for (ni, n) in [25usize, 50, 100].into_iter().enumerate() {
            for di in 0..9 {
                let d = (di + 1) as f64 / 10.0;
                let g = generate::<Octagon>(&GeneratorParams::new(n, d, cell_seed(42, n, di))).unwrap();
                assert!(!seen.contains(&g.state), "duplicate at {ni}/{di}");
                seen.push(g.state);
            }
        }
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn pairs_are_deterministic_and_seed_sensitive() {
        let p = GeneratorParams::new(10, 0.5, 1);
        let (a, b) = generate_pair::<Octagon>(&p, 1).unwrap();
        assert_eq!(a, b);
        let (a, b) = generate_pair::<Octagon>(&p, 2).unwrap();
        assert_ne!(a.state, b.state);
        let (ca, cb) = (a.state.close_full(), b.state.close_full());
        let j = ca.join(&cb).unwrap();
        assert!(j.includes(&ca).unwrap() && j.includes(&cb).unwrap());
    }

    #[test]
    fn invalid_params() {
        assert!(generate::<Octagon>(&GeneratorParams::new(0, 0.5, 1)).is_err());
        assert!(generate::<Octagon>(&GeneratorParams::new(3, 1.5, 1)).is_err());
        let mut p = GeneratorParams::new(3, 0.5, 1);
        p.slack_range = (-1, 4);
        assert!(matches!(generate::<Octagon>(&p), Err(GeneratorError::NegativeSlack(..))));
    }

    #[test]
    fn tightening_on_top_is_finite_and_tightening() {
        let top = Octagon::top(4).unwrap();
        let mut rng = Rng::new(9);
        let w = [1, -2, 3, 0];
        for _ in 0..50 {
            let k = sample_tightening_constraint(&top, &mut rng, &w, 25);
            assert!(k.is_satisfied_by(&w));
            assert_eq!(k.le_bound(), Constraint::form_value(k.kind, k.i, k.j, &w) + 25);
        }
    }

    #[test]
    fn tightening_keeps_witness_and_state_consistent() {
        for seed in 0..100 {
            let g = generate::<Octagon>(&GeneratorParams::new(10, 0.5, seed)).unwrap();
            let closed = g.state.close_full();
            let mut rng = Rng::new(seed ^ 0xABCD);
            let k = sample_tightening_constraint(&closed, &mut rng, &g.witness, 25);
            assert!(k.is_satisfied_by(&g.witness));
            let cur = closed.form_bound(k.kind, k.i, k.j);
            assert!(Bound::finite(k.le_bound()) < cur, "seed {seed}: {k} does not tighten");
            let next = closed.close_incremental_chawdhary(&k).unwrap();
            assert!(!next.is_bottom());
            assert!(next.contains_point(&g.witness));
        }
    }

    #[test]
    fn exhausted_retries_fall_back_to_noop() {
        // a single point: nothing can be tightened without losing the witness
        let o = Octagon::from_constraints(1, &[Constraint::upper(0, 4), Constraint::lower(0, 4)])
            .unwrap()
            .close_full();
        let k = sample_tightening_constraint(&o, &mut Rng::new(0), &[4], 25);
        assert_eq!(o.add_constraint(&k).unwrap().dbm(), o.dbm());
    }

    #[test]
    fn zone_generation() {
        let g = generate::<Zone>(&GeneratorParams::new(10, 0.5, 42)).unwrap();
        assert_eq!(g.state.achieved_density(), 22.0 / 45.0);
        assert!(g.state.contains_point(&g.witness));
        assert!(!g.state.close().is_bottom());
    }
}
