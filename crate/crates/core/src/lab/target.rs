use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::kernels::Point;

/// Axis-aligned box `[lo₁, hi₁] × … × [lo_d, hi_d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::input("domain bounds must be nonempty and of equal length"));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::input(format!("invalid domain side [{a}, {b}]")));
            }
        }
        Ok(Domain { lo, hi })
    }

    /// `[0, 1]`.
    pub fn unit_interval() -> Self {
        Domain {
            lo: vec![0.0],
            hi: vec![1.0],
        }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Domain::new(vec![a], vec![b])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.dim() == self.dim()
            && x
                .coords()
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(c, (a, b))| *a <= *c && *c <= *b)
    }

    pub(crate) fn midpoint(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

/// Closed interval `[a, b]` with a level, one piece of a step function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub a: f64,
    pub b: f64,
    pub level: f64,
}

/// Catalog of real-valued targets. All variants act on the first coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetKind {
    /// `1` on `[a, b]`, `0` elsewhere.
    IndicatorInterval { a: f64, b: f64 },
    /// `Σ levelᵢ · 1_{[aᵢ, bᵢ]}` over pairwise disjoint closed intervals.
    StepCombination(Vec<Step>),
    /// `+1` for `x >= offset`, `-1` below.
    Sign { offset: f64 },
    /// `sin(2π · frequency · x)`.
    ContinuousSine { frequency: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetFunction {
    pub kind: TargetKind,
    pub domain: Domain,
}

impl TargetFunction {
    pub fn new(kind: TargetKind, domain: Domain) -> Result<Self> {
        let t = TargetFunction { kind, domain };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.domain.lo[0], self.domain.hi[0]);
        let inside = |v: f64| v.is_finite() && lo <= v && v <= hi;
        match &self.kind {
            TargetKind::IndicatorInterval { a, b } => {
                if !(inside(*a) && inside(*b) && a <= b) {
                    return Err(Error::input(format!(
                        "indicator interval [{a}, {b}] must lie within [{lo}, {hi}]"
                    )));
                }
            }
            TargetKind::StepCombination(steps) => {
                if steps.is_empty() {
                    return Err(Error::input("step combination needs at least one step"));
                }
                for s in steps {
                    if !(inside(s.a) && inside(s.b) && s.a <= s.b && s.level.is_finite()) {
                        return Err(Error::input(format!(
                            "step [{}, {}] with level {} is invalid for domain [{lo}, {hi}]",
                            s.a, s.b, s.level
                        )));
                    }
                }
                let mut sorted = steps.clone();
                sorted.sort_by(|x, y| x.a.total_cmp(&y.a));
                if let Some(w) = sorted.windows(2).find(|w| w[1].a <= w[0].b) {
                    return Err(Error::input(format!(
                        "step intervals [{}, {}] and [{}, {}] overlap",
                        w[0].a, w[0].b, w[1].a, w[1].b
                    )));
                }
            }
            TargetKind::Sign { offset } => {
                if !offset.is_finite() {
                    return Err(Error::input("sign offset must be finite"));
                }
            }
            TargetKind::ContinuousSine { frequency } => {
                if !frequency.is_finite() {
                    return Err(Error::input("sine frequency must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn is_continuous(&self) -> bool {
        self.jumps().is_empty()
    }

    /// Discontinuities inside the domain along the first coordinate, as
    /// `(location, jump magnitude)`.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let (lo, hi) = (self.domain.lo[0], self.domain.hi[0]);
        let interior = |v: f64| lo < v && v < hi;
        let mut out = Vec::new();
        match &self.kind {
            TargetKind::IndicatorInterval { a, b } => {
                for v in [*a, *b] {
                    if interior(v) {
                        out.push((v, 1.0));
                    }
                }
            }
            TargetKind::StepCombination(steps) => {
                for s in steps.iter().filter(|s| s.level != 0.0) {
                    for v in [s.a, s.b] {
                        if interior(v) {
                            out.push((v, s.level.abs()));
                        }
                    }
                }
            }
            TargetKind::Sign { offset } => {
                if interior(*offset) {
                    out.push((*offset, 2.0));
                }
            }
            TargetKind::ContinuousSine { .. } => {}
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out.dedup_by(|x, y| x.0 == y.0);
        out
    }

    pub fn smallest_jump(&self) -> Option<f64> {
        self.jumps().into_iter().map(|j| j.1).reduce(f64::min)
    }

    #[inline]
    fn value_at(&self, x: f64) -> f64 {
        match &self.kind {
            TargetKind::IndicatorInterval { a, b } => {
                if *a <= x && x <= *b {
                    1.0
                } else {
                    0.0
                }
            }
            TargetKind::StepCombination(steps) => steps
                .iter()
                .find(|s| s.a <= x && x <= s.b)
                .map_or(0.0, |s| s.level),
            TargetKind::Sign { offset } => {
                if x >= *offset {
                    1.0
                } else {
                    -1.0
                }
            }
            TargetKind::ContinuousSine { frequency } => (2.0 * PI * frequency * x).sin(),
        }
    }
}

impl RealFunction for TargetFunction {
    fn eval(&self, x: &Point) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::input(format!(
                "point {:?} lies outside the target domain",
                x.coords()
            )));
        }
        Ok(self.value_at(x.coords()[0]))
    }
}

/// Validate a target and hand it back as an evaluable function.
pub fn make_target(t: TargetFunction) -> Result<TargetFunction> {
    t.validate()?;
    Ok(t)
}
