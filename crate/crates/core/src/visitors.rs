//! Visitor agents, their context tuple, and the two-population dwell model.
//!
//! Visitors fall into two populations split at a 20-minute mean viewing time
//! per art-work: `Quick` viewers below the cutoff, `Slow` viewers above it.
//! Dwell times are log-normal around the population median, then scaled by
//! how well the painting matches the visitor's interests.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, LogNormal};
use thiserror::Error;

use crate::gallery::{NodeId, Painting};

pub type VisitorId = usize;

/// Mean per-art-work viewing time separating the two populations, in minutes.
pub const DWELL_CUTOFF: f64 = 20.0;

/// Dwell draws never go below this many minutes.
pub const MIN_DWELL: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VisitorError {
    #[error("invalid population field `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("interest vector has {interests} dimensions but style vector has {style}")]
    DimensionMismatch { interests: usize, style: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VisitorType {
    Quick,
    Slow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Visitor {
    pub id: VisitorId,
    pub interests: Vec<f64>,
    pub vtype: VisitorType,
    pub arrival_time: f64,
    pub time_budget: f64,
    pub seen: BTreeSet<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Node(NodeId),
    InTransit,
    Exited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    Viewing,
    ReadingInfo,
    Moving,
    Queued,
    Done,
}

/// Snapshot of a visitor's situation: where, who, doing what, and when.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Context {
    pub location: Location,
    pub identity: VisitorId,
    pub activity: Activity,
    pub time: u32,
}

/// Log-normal dwell parameters: `median` minutes, `dispersion` is the sigma of
/// the underlying normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwellParams {
    pub median: f64,
    pub dispersion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwellModel {
    pub quick: DwellParams,
    pub slow: DwellParams,
}

impl Default for DwellModel {
    fn default() -> Self {
        DwellModel {
            quick: DwellParams {
                median: 8.0,
                dispersion: 0.4,
            },
            slow: DwellParams {
                median: 28.0,
                dispersion: 0.4,
            },
        }
    }
}

impl DwellModel {
    pub fn params(&self, vtype: VisitorType) -> DwellParams {
        match vtype {
            VisitorType::Quick => self.quick,
            VisitorType::Slow => self.slow,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpec {
    pub visitor_count: usize,
    pub quick_fraction: f64,
    /// Visitors per minute.
    pub arrival_rate: f64,
    pub dwell: DwellModel,
    pub quick_budget: f64,
    pub slow_budget: f64,
    /// Number of style categories `K`.
    pub style_dims: usize,
    /// Zipf exponent for which category dominates a visitor's interests;
    /// zero makes every category equally likely.
    pub interest_skew: f64,
}

impl Default for PopulationSpec {
    fn default() -> Self {
        PopulationSpec {
            visitor_count: 50,
            quick_fraction: 0.5,
            arrival_rate: 0.5,
            dwell: DwellModel::default(),
            quick_budget: 90.0,
            slow_budget: 240.0,
            style_dims: 6,
            interest_skew: 1.0,
        }
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> VisitorError {
    VisitorError::InvalidSpec {
        field,
        reason: reason.into(),
    }
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<(), VisitorError> {
        if !(0.0..=1.0).contains(&self.quick_fraction) {
            return Err(invalid("quick_fraction", format!("{} is outside [0, 1]", self.quick_fraction)));
        }
        if !(self.arrival_rate.is_finite() && self.arrival_rate > 0.0) {
            return Err(invalid("arrival_rate", "must be positive"));
        }
        let q = self.dwell.quick;
        let s = self.dwell.slow;
        if !(q.median > 0.0 && q.median < DWELL_CUTOFF) {
            return Err(invalid("quick_median", format!("must lie in (0, {DWELL_CUTOFF})")));
        }
        if !(s.median >= DWELL_CUTOFF && s.median.is_finite()) {
            return Err(invalid("slow_median", format!("must be at least {DWELL_CUTOFF}")));
        }
        if !(q.dispersion >= 0.0 && q.dispersion.is_finite()) {
            return Err(invalid("quick_dispersion", "must be non-negative"));
        }
        if !(s.dispersion >= 0.0 && s.dispersion.is_finite()) {
            return Err(invalid("slow_dispersion", "must be non-negative"));
        }
        if !(self.quick_budget > 0.0 && self.quick_budget.is_finite()) {
            return Err(invalid("quick_budget", "must be positive"));
        }
        if !(self.slow_budget > 0.0 && self.slow_budget.is_finite()) {
            return Err(invalid("slow_budget", "must be positive"));
        }
        if self.style_dims == 0 {
            return Err(invalid("style_dims", "must be at least 1"));
        }
        if !(self.interest_skew >= 0.0 && self.interest_skew.is_finite()) {
            return Err(invalid("interest_skew", "must be non-negative"));
        }
        Ok(())
    }

    pub fn budget(&self, vtype: VisitorType) -> f64 {
        match vtype {
            VisitorType::Quick => self.quick_budget,
            VisitorType::Slow => self.slow_budget,
        }
    }
}

/// Draws a population. Ids follow arrival order; the first visitor arrives at
/// minute zero and later gaps are exponential with the configured rate.
pub fn sample_population(spec: &PopulationSpec, seed: u64) -> Result<Vec<Visitor>, VisitorError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaps = Exp::new(spec.arrival_rate).map_err(|e| invalid("arrival_rate", e.to_string()))?;
    let weights: Vec<f64> = (1..=spec.style_dims)
        .map(|rank| (rank as f64).powf(-spec.interest_skew))
        .collect();
    let dominant = WeightedIndex::new(&weights).map_err(|e| invalid("interest_skew", e.to_string()))?;

    let mut clock = 0.0;
    let mut out = Vec::with_capacity(spec.visitor_count);
    for id in 0..spec.visitor_count {
        if id > 0 {
            clock += gaps.sample(&mut rng);
        }
        let vtype = if rng.random_bool(spec.quick_fraction) {
            VisitorType::Quick
        } else {
            VisitorType::Slow
        };
        let mut interests: Vec<f64> = (0..spec.style_dims).map(|_| rng.random::<f64>()).collect();
        interests[dominant.sample(&mut rng)] = 1.0;
        out.push(Visitor {
            id,
            interests,
            vtype,
            arrival_time: clock,
            time_budget: spec.budget(vtype),
            seen: BTreeSet::new(),
        });
    }
    Ok(out)
}

/// Cosine similarity of two weight vectors, zero if either is all zeros.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, VisitorError> {
    if a.len() != b.len() {
        return Err(VisitorError::DimensionMismatch {
            interests: a.len(),
            style: b.len(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na * nb)).clamp(0.0, 1.0))
}

/// How well painting `p` matches visitor `v`'s interests, in `[0, 1]`.
pub fn interest_score(v: &Visitor, p: &Painting) -> Result<f64, VisitorError> {
    cosine(&v.interests, &p.style)
}

/// Minutes `v` spends in front of `p`: a log-normal draw scaled by
/// `0.5 + interest_score`, floored at [`MIN_DWELL`].
pub fn sample_dwell_time<R: RngCore + ?Sized>(
    v: &Visitor,
    p: &Painting,
    model: &DwellModel,
    rng: &mut R,
) -> Result<f64, VisitorError> {
    let params = model.params(v.vtype);
    let base = if params.dispersion == 0.0 {
        params.median
    } else {
        LogNormal::new(params.median.ln(), params.dispersion)
            .map_err(|e| invalid("dispersion", e.to_string()))?
            .sample(rng)
    };
    let scale = 0.5 + interest_score(v, p)?;
    Ok((base * scale).max(MIN_DWELL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn visitor(interests: Vec<f64>, vtype: VisitorType) -> Visitor {
        Visitor {
            id: 0,
            interests,
            vtype,
            arrival_time: 0.0,
            time_budget: 60.0,
            seen: BTreeSet::new(),
        }
    }

    fn painting(style: Vec<f64>) -> Painting {
        Painting {
            id: 0,
            style,
            capacity: 1,
        }
    }

    fn degenerate(quick: f64, slow: f64) -> DwellModel {
        DwellModel {
            quick: DwellParams {
                median: quick,
                dispersion: 0.0,
            },
            slow: DwellParams {
                median: slow,
                dispersion: 0.0,
            },
        }
    }

    #[test]
    fn cosine_examples() {
        let v = visitor(vec![1.0, 1.0, 0.0], VisitorType::Quick);
        let score = interest_score(&v, &painting(vec![1.0, 0.0, 0.0])).unwrap();
        assert!((score - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(cosine(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine(&[0.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(cosine(&[1.0], &[1.0, 0.0]), Err(VisitorError::DimensionMismatch { .. })));
    }

    #[test]
    fn degenerate_dwell() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model = degenerate(5.0, 30.0);
        // cos 60° = 0.5
        let v = visitor(vec![1.0, 0.0], VisitorType::Quick);
        let p = painting(vec![0.5, 0.75f64.sqrt()]);
        let d = sample_dwell_time(&v, &p, &model, &mut rng).unwrap();
        assert!((d - 5.0).abs() < 1e-12);

        let v = visitor(vec![1.0, 0.0], VisitorType::Slow);
        let p = painting(vec![0.0, 1.0]);
        assert_eq!(sample_dwell_time(&v, &p, &model, &mut rng).unwrap(), 15.0);
    }

    #[test]
    fn dwell_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model = degenerate(0.6, 30.0);
        let v = visitor(vec![1.0, 0.0], VisitorType::Quick);
        let p = painting(vec![0.0, 1.0]);
        assert_eq!(sample_dwell_time(&v, &p, &model, &mut rng).unwrap(), MIN_DWELL);
    }

    #[test]
    fn population_edge_cases() {
        let spec = PopulationSpec {
            visitor_count: 0,
            ..Default::default()
        };
        assert!(sample_population(&spec, 1).unwrap().is_empty());

        let spec = PopulationSpec {
            quick_fraction: 1.0,
            ..Default::default()
        };
        let pop = sample_population(&spec, 1).unwrap();
        assert!(pop.iter().all(|v| v.vtype == VisitorType::Quick));
    }

    #[test]
    fn default_population_shape() {
        let pop = sample_population(&PopulationSpec::default(), 42).unwrap();
        assert_eq!(pop.len(), 50);
        assert_eq!(pop[0].arrival_time, 0.0);
        assert!(pop.windows(2).all(|w| w[0].arrival_time <= w[1].arrival_time));
        for v in &pop {
            assert_eq!(v.interests.len(), 6);
            assert!(v.interests.iter().all(|x| (0.0..=1.0).contains(x)));
            assert!(v.interests.contains(&1.0));
            assert!(v.time_budget > 0.0);
        }
    }

    #[test]
    fn spec_validation() {
        let bad = |f: fn(&mut PopulationSpec)| {
            let mut s = PopulationSpec::default();
            f(&mut s);
            s.validate().unwrap_err()
        };
        assert!(matches!(bad(|s| s.quick_fraction = 1.5), VisitorError::InvalidSpec { field: "quick_fraction", .. }));
        assert!(matches!(bad(|s| s.dwell.quick.median = 20.0), VisitorError::InvalidSpec { field: "quick_median", .. }));
        assert!(matches!(bad(|s| s.dwell.slow.median = 19.0), VisitorError::InvalidSpec { field: "slow_median", .. }));
        assert!(matches!(bad(|s| s.arrival_rate = 0.0), VisitorError::InvalidSpec { field: "arrival_rate", .. }));
        assert!(matches!(bad(|s| s.style_dims = 0), VisitorError::InvalidSpec { field: "style_dims", .. }));
    }
}
