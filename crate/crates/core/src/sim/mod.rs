//! Finite-window runs of the randomized greedy coloring procedure.
//!
//! Step `i` looks at every uncolored point `γ` of the region. The point gets
//! color `c_i` when it is the only support point of `x_i` in `Ball(γ, 2R_i)`
//! and `π_i[γ, 2R_i] ∪ {(γ, c_i)}` is a member of the ideal, where `R_i` is
//! the largest locality radius among `c_0, …, c_{i-1}` (0 for `i = 0`).
//! Points whose `2R_i`-ball leaves the region are never eligible, so every
//! condition is evaluated exactly.

pub mod field;
pub mod patterns;
pub mod sparse;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, PartialColoring};
use crate::error::{Error, Result};
use crate::group::{dist_unchecked, mul_unchecked, Element, Group};
use crate::ideal::{Ideal, IdealSpec, RadiusFn, SCHEMA_VERSION};
use crate::radius::Radius;

use field::{BernoulliField, ShiftedField, SupportField};

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_density() -> Radius {
    Radius::new(1, 2).expect("nonzero denominator")
}

fn default_true() -> bool {
    true
}

/// Cyclic color schedule `c_i = palette[i mod len]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    /// Defaults to the ideal's own palette.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palette: Option<Vec<Color>>,
    /// Run steps as no-ops until `R_i` reaches the largest palette radius.
    #[serde(default = "default_true")]
    pub warm_up: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub ideal: IdealSpec,
    pub window_radius: u64,
    pub margin: u64,
    pub steps: usize,
    #[serde(default)]
    pub schedule: Schedule,
    /// Bernoulli density of each support field, an exact rational in (0, 1).
    #[serde(default = "default_density")]
    pub density: Radius,
    #[serde(default)]
    pub seed: u64,
}

impl SimulationConfig {
    pub fn new(ideal: IdealSpec, window_radius: u64, margin: u64, steps: usize, seed: u64) -> Self {
        SimulationConfig {
            schema_version: SCHEMA_VERSION,
            ideal,
            window_radius,
            margin,
            steps,
            schedule: Schedule {
                palette: None,
                warm_up: true,
            },
            density: default_density(),
            seed,
        }
    }

    pub fn palette(&self) -> Vec<Color> {
        self.schedule
            .palette
            .clone()
            .unwrap_or_else(|| self.ideal.sample_palette())
    }

    pub fn region_radius(&self) -> u64 {
        self.window_radius + self.margin
    }

    /// Locality radius of every palette color, and their maximum.
    fn radii(&self) -> Result<(Vec<Radius>, Radius)> {
        let mut out = Vec::new();
        for c in self.palette() {
            let r = self
                .ideal
                .locality(c)?
                .ok_or_else(|| Error::Config(format!("color {c} has no finite locality radius")))?;
            out.push(r);
        }
        let max = out.iter().copied().fold(Radius::ZERO, Radius::max);
        Ok((out, max))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        self.ideal.validate()?;
        if self.palette().is_empty() {
            return Err(Error::Config("empty schedule palette".into()));
        }
        let (_, max_r) = self.radii()?;
        if self.margin < max_r.double().ceil() {
            return Err(Error::Config(format!(
                "margin {} is below 2·max r = {}",
                self.margin,
                max_r.double()
            )));
        }
        if self.density == Radius::ZERO || self.density >= Radius::int(1) {
            return Err(Error::Config(format!(
                "density {} is not in (0, 1)",
                self.density
            )));
        }
        Ok(())
    }

    pub fn field(&self) -> BernoulliField {
        BernoulliField::new(self.seed, self.density.numer(), self.density.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub index: usize,
    pub color: Color,
    /// `R_i`.
    pub radius: Radius,
    /// False for warm-up steps, which assign nothing.
    pub active: bool,
    /// `S_i` in canonical order.
    pub assigned: Vec<Element>,
    /// Colored points of `Ball(1, W)` after the step.
    pub colored_interior: usize,
    pub fill: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationTrace {
    pub group: Group,
    pub window_radius: u64,
    pub margin: u64,
    pub region_size: usize,
    pub interior_size: usize,
    pub steps: Vec<StepRecord>,
    pub final_coloring: PartialColoring,
}

impl SimulationTrace {
    pub fn region_radius(&self) -> u64 {
        self.window_radius + self.margin
    }

    /// `π_i`.
    pub fn coloring_at(&self, i: usize) -> PartialColoring {
        let mut phi = PartialColoring::empty(self.group);
        for s in &self.steps[..i.min(self.steps.len())] {
            for g in &s.assigned {
                phi.insert(g.clone(), s.color)
                    .expect("each point is assigned once");
            }
        }
        phi
    }

    /// Interior fill after each step, starting with `π_0`.
    pub fn fill_fractions(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.steps.iter().map(|s| s.fill))
            .collect()
    }

    pub fn final_fill(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.fill)
    }

    /// No point is assigned twice and fill never decreases.
    pub fn is_monotone(&self) -> bool {
        let mut seen = HashSet::new();
        let all_new = self
            .steps
            .iter()
            .flat_map(|s| s.assigned.iter())
            .all(|g| seen.insert(g.clone()));
        all_new && self.fill_fractions().windows(2).all(|w| w[0] <= w[1])
    }

    /// Pairs in one `S_i` at distance at most `2R_i`.
    pub fn same_step_conflicts(&self) -> Vec<(usize, Element, Element)> {
        let mut out = Vec::new();
        for s in &self.steps {
            let twice = s.radius.double();
            for (i, a) in s.assigned.iter().enumerate() {
                for b in &s.assigned[i + 1..] {
                    if twice.admits(dist_unchecked(a, b)) {
                        out.push((s.index, a.clone(), b.clone()));
                    }
                }
            }
        }
        out
    }
}

/// The simulation region `Ball(1, W + M)` with lookup tables.
struct Region {
    points: Vec<Element>,
    index: HashMap<Element, usize>,
    digests: Vec<u64>,
    norms: Vec<u64>,
    radius: u64,
    offsets: HashMap<u64, Vec<Element>>,
}

impl Region {
    fn new(group: &Group, radius: u64) -> Result<Self> {
        let points = group.ball(&group.identity(), Radius::int(radius))?;
        let index = points
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        let digests = points.iter().map(Element::digest).collect();
        let norms = points.iter().map(Element::norm).collect();
        Ok(Region {
            points,
            index,
            digests,
            norms,
            radius,
            offsets: HashMap::new(),
        })
    }

    fn offsets(&mut self, group: &Group, r: u64) -> &[Element] {
        self.offsets.entry(r).or_insert_with(|| {
            group
                .ball(&group.identity(), Radius::int(r))
                .expect("identity is valid")
        })
    }
}

/// Run with the configured Bernoulli field.
pub fn run(config: &SimulationConfig) -> Result<SimulationTrace> {
    run_with_field(config, &config.field())
}

pub fn run_with_field<F: SupportField + ?Sized>(
    config: &SimulationConfig,
    field: &F,
) -> Result<SimulationTrace> {
    config.validate()?;
    let group = config.ideal.group;
    let palette = config.palette();
    let (radii, max_r) = config.radii()?;
    let mut region = Region::new(&group, config.region_radius())?;
    let n = region.points.len();
    let interior_size = region
        .norms
        .iter()
        .filter(|&&x| x <= config.window_radius)
        .count();

    let mut colors: Vec<Option<Color>> = vec![None; n];
    let mut colored_interior = 0usize;
    let mut steps = Vec::with_capacity(config.steps);
    let mut r_i = Radius::ZERO;

    for i in 0..config.steps {
        let slot = i % palette.len();
        let c = palette[slot];
        let active = !config.schedule.warm_up || r_i >= max_r;
        let mut assigned_idx = Vec::new();
        if active {
            let reach = r_i.double().floor();
            let support: Vec<bool> = (0..n)
                .map(|k| field.is_support_digest(i, &region.points[k], region.digests[k]))
                .collect();
            let offsets = region.offsets(&group, reach).to_vec();
            for k in 0..n {
                if !support[k] || colors[k].is_some() || region.norms[k] + reach > region.radius {
                    continue;
                }
                let gamma = &region.points[k];
                let ball: Vec<usize> = offsets
                    .iter()
                    .map(|o| region.index[&mul_unchecked(o, gamma)])
                    .collect();
                if ball.iter().any(|&j| j != k && support[j]) {
                    continue;
                }
                let window = PartialColoring::from_entries(
                    group,
                    ball.iter()
                        .filter_map(|&j| colors[j].map(|col| (region.points[j].clone(), col))),
                )?;
                if config.ideal.contains(&window.with(gamma, c)?)? {
                    assigned_idx.push(k);
                }
            }
        }
        for &k in &assigned_idx {
            colors[k] = Some(c);
            if region.norms[k] <= config.window_radius {
                colored_interior += 1;
            }
        }
        let mut assigned: Vec<Element> = assigned_idx
            .iter()
            .map(|&k| region.points[k].clone())
            .collect();
        assigned.sort();
        steps.push(StepRecord {
            index: i,
            color: c,
            radius: r_i,
            active,
            assigned,
            colored_interior,
            fill: colored_interior as f64 / interior_size as f64,
        });
        r_i = r_i.max(radii[slot]);
    }

    let final_coloring = PartialColoring::from_entries(
        group,
        colors
            .iter()
            .enumerate()
            .filter_map(|(k, c)| c.map(|c| (region.points[k].clone(), c))),
    )?;
    Ok(SimulationTrace {
        group,
        window_radius: config.window_radius,
        margin: config.margin,
        region_size: n,
        interior_size,
        steps,
        final_coloring,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationFailure {
    /// The failing coloring is `π_step`.
    pub step: usize,
    pub point: Element,
    pub color: Color,
    pub window: PartialColoring,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub windows_checked: usize,
    pub failure_count: usize,
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.failure_count == 0
    }

    fn record(&mut self, f: ValidationFailure) {
        self.failure_count += 1;
        if self.failures.len() < 20 {
            self.failures.push(f);
        }
    }
}

/// `π_i[γ, r(π_i(γ))] ∈ P` for every step `i` and every colored `γ` whose
/// `r`-ball lies in the region. A window only changes when a point inside it
/// is assigned, so at each step only the windows touching the newly
/// assigned points are re-examined; earlier verdicts carry over unchanged.
pub fn trace_validate<I: Ideal + ?Sized>(
    trace: &SimulationTrace,
    ideal: &I,
    r: &RadiusFn,
) -> Result<ValidationReport> {
    let group = trace.group;
    let limit = trace.region_radius();
    let mut report = ValidationReport::default();
    let mut current: HashMap<Element, Color> = HashMap::new();
    let mut offsets: HashMap<u64, Vec<Element>> = HashMap::new();
    let mut max_r = 0u64;
    for s in &trace.steps {
        max_r = max_r.max(r.eval(s.color)?.floor());
    }

    for (i, s) in trace.steps.iter().enumerate() {
        for g in &s.assigned {
            current.insert(g.clone(), s.color);
        }
        let mut touched: HashSet<Element> = HashSet::new();
        let reach = offsets
            .entry(max_r)
            .or_insert_with(|| {
                group
                    .ball(&group.identity(), Radius::int(max_r))
                    .expect("identity")
            })
            .clone();
        for a in &s.assigned {
            for o in &reach {
                let p = mul_unchecked(o, a);
                if current.contains_key(&p) {
                    touched.insert(p);
                }
            }
        }
        let mut touched: Vec<Element> = touched.into_iter().collect();
        touched.sort();
        for p in touched {
            let c = current[&p];
            let rp = r.eval(c)?;
            if p.norm() + rp.floor() > limit {
                continue;
            }
            if !s.assigned.contains(&p)
                && !s.assigned.iter().any(|a| rp.admits(dist_unchecked(&p, a)))
            {
                continue;
            }
            let ball = offsets
                .entry(rp.floor())
                .or_insert_with(|| group.ball(&group.identity(), rp).expect("identity"));
            let window = PartialColoring::from_entries(
                group,
                ball.iter().filter_map(|o| {
                    let q = mul_unchecked(o, &p);
                    current.get(&q).map(|&cq| (q, cq))
                }),
            )?;
            report.windows_checked += 1;
            if !ideal.contains(&window)? {
                report.record(ValidationFailure {
                    step: i + 1,
                    point: p,
                    color: c,
                    window,
                });
            }
        }
    }
    Ok(report)
}

/// The same condition as [`trace_validate`], re-checked from scratch at every
/// step. Quadratic; meant as a cross-check on small traces.
pub fn trace_validate_full<I: Ideal + ?Sized>(
    trace: &SimulationTrace,
    ideal: &I,
    r: &RadiusFn,
) -> Result<ValidationReport> {
    let limit = trace.region_radius();
    let mut report = ValidationReport::default();
    for i in 1..=trace.steps.len() {
        let pi = trace.coloring_at(i);
        for (g, c) in pi.iter() {
            let rg = r.eval(c)?;
            if g.norm() + rg.floor() > limit {
                continue;
            }
            let window = pi.window(g, rg);
            report.windows_checked += 1;
            if !ideal.contains(&window)? {
                report.record(ValidationFailure {
                    step: i,
                    point: g.clone(),
                    color: c,
                    window,
                });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub point: Element,
    pub shifted_run: Option<Color>,
    pub base_run: Option<Color>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceReport {
    pub gamma: Element,
    /// `Σ_{j<n} 2R_j`, the dependency radius of the final coloring.
    pub dependency_radius: Radius,
    pub safe_points: usize,
    pub mismatches: Vec<Mismatch>,
}

impl EquivarianceReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Run once on the configured field `x` and once on its shift `x'_i(δ) =
/// x_i(δγ)`, and compare `π'_n(δ)` with `π_n(δγ)` at every `δ` for which the
/// dependency balls around both `δ` and `δγ` lie in the region.
pub fn equivariance_check(
    config: &SimulationConfig,
    gamma: &Element,
) -> Result<EquivarianceReport> {
    let group = config.ideal.group;
    group.check(gamma)?;
    let base_field = config.field();
    let base = run_with_field(config, &base_field)?;
    let shifted = run_with_field(
        config,
        &ShiftedField {
            inner: base_field.clone(),
            gamma: gamma.clone(),
        },
    )?;
    let dep = base
        .steps
        .iter()
        .fold(Radius::ZERO, |acc, s| acc + s.radius.double());
    let limit = config.region_radius();
    let fits = |g: &Element| g.norm() <= limit && Radius::int(limit - g.norm()) >= dep;
    let mut safe_points = 0;
    let mut mismatches = Vec::new();
    for delta in group.ball(&group.identity(), Radius::int(limit))? {
        let moved = mul_unchecked(&delta, gamma);
        if !fits(&delta) || !fits(&moved) {
            continue;
        }
        safe_points += 1;
        let a = shifted.final_coloring.get(&delta);
        let b = base.final_coloring.get(&moved);
        if a != b {
            mismatches.push(Mismatch {
                point: delta,
                shifted_run: a,
                base_run: b,
            });
        }
    }
    Ok(EquivarianceReport {
        gamma: gamma.clone(),
        dependency_radius: dep,
        safe_points,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::field::ForcedField;
    use super::*;

    fn z1() -> Group {
        Group::Lattice { dim: 1 }
    }

    fn forced_config(warm_up: bool, steps: usize) -> SimulationConfig {
        let mut cfg = SimulationConfig::new(IdealSpec::proper(z1(), 3), 3, 2, steps, 0);
        cfg.schedule = Schedule {
            palette: Some(vec![Color::Nat(0), Color::Nat(1), Color::Nat(2)]),
            warm_up,
        };
        cfg
    }

    #[test]
    fn first_step_colors_isolated_support() {
        let field = ForcedField::new(vec![vec![Element::int(0)]]);
        let trace = run_with_field(&forced_config(false, 1), &field).unwrap();
        assert_eq!(trace.coloring_at(1), PartialColoring::z1(&[(0, 0u32)]));
        assert_eq!(trace.steps[0].radius, Radius::ZERO);
    }

    #[test]
    fn zero_radius_step_can_break_validity() {
        let field = ForcedField::new(vec![vec![Element::int(0), Element::int(1)]]);
        let cfg = forced_config(false, 1);
        let trace = run_with_field(&cfg, &field).unwrap();
        assert_eq!(
            trace.coloring_at(1),
            PartialColoring::z1(&[(0, 0u32), (1, 0)])
        );
        assert!(trace.same_step_conflicts().is_empty());
        let r = RadiusFn::constant(1);
        let report = trace_validate(&trace, &cfg.ideal, &r).unwrap();
        assert!(report.failure_count > 0);
        assert_eq!(report.failures[0].step, 1);
        assert_eq!(
            trace_validate_full(&trace, &cfg.ideal, &r)
                .unwrap()
                .failure_count,
            report.failure_count
        );

        // the warm-up turns step 0 into a no-op
        let trace = run_with_field(&forced_config(true, 1), &field).unwrap();
        assert!(trace.final_coloring.is_empty());
    }

    #[test]
    fn zero_steps() {
        let cfg = forced_config(true, 0);
        let trace = run(&cfg).unwrap();
        assert_eq!(trace.fill_fractions(), vec![0.0]);
        assert!(trace.coloring_at(0).is_empty());
        assert!(trace_validate(&trace, &cfg.ideal, &RadiusFn::constant(1))
            .unwrap()
            .is_clean());
    }

    #[test]
    fn config_is_checked_before_running() {
        let mut cfg = forced_config(true, 3);
        cfg.margin = 1;
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
        let mut cfg = forced_config(true, 3);
        cfg.density = Radius::int(1);
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn proper_runs_are_valid_and_monotone() {
        for seed in 0..5 {
            let mut cfg = SimulationConfig::new(IdealSpec::proper(z1(), 3), 30, 4, 40, seed);
            cfg.density = Radius::new(1, 3).unwrap();
            let trace = run(&cfg).unwrap();
            assert!(trace.is_monotone());
            assert!(trace.same_step_conflicts().is_empty());
            let r = RadiusFn::constant(1);
            let fast = trace_validate(&trace, &cfg.ideal, &r).unwrap();
            assert!(fast.is_clean());
            assert!(trace_validate_full(&trace, &cfg.ideal, &r)
                .unwrap()
                .is_clean());
            assert!(trace.final_fill() > 0.5);
        }
    }

    #[test]
    fn identity_shift_is_exact() {
        let cfg = SimulationConfig::new(IdealSpec::proper(z1(), 3), 20, 10, 8, 3);
        let report = equivariance_check(&cfg, &Element::int(0)).unwrap();
        assert!(report.is_clean() && report.safe_points > 0);
        let report = equivariance_check(&cfg, &Element::int(2)).unwrap();
        assert!(report.is_clean() && report.safe_points > 0);
    }
}
