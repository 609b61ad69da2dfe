//! Relevance-weighted effective coverage and the penalized fitness.
//!
//! Every clipped start and end point of a unit's coverage rectangle, plus the
//! two road ends, becomes a point of interest. Consecutive points bound a
//! cell; each cell is credited with the widest on-road depth among placed
//! units whose extent contains it, weighted by the length-averaged relevance
//! of the sectors it crosses. Overlapping coverage is therefore counted once.

use crate::config::{Limits, PenaltyWeights, ScenarioConfig};
use crate::datamodel::{self, DataEnergyProfile};
use crate::error::Result;
use crate::geometry::{footprint_with, CoverageFootprint, Placement, RoadGeometry};

/// One cell of the point-of-interest partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionCell {
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
    pub gamma: f64,
    pub area: f64,
}

impl PartitionCell {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sorted multiset `{0, d_road} ∪ {x_start, x_end}` over all candidates,
/// placed or not. Length is always `2 * footprints.len() + 2`.
pub fn points_of_interest(footprints: &[CoverageFootprint], d_road: f64) -> Vec<f64> {
    let mut points = Vec::with_capacity(2 * footprints.len() + 2);
    points.push(0.0);
    points.push(d_road);
    for fp in footprints {
        points.push(fp.x_start);
        points.push(fp.x_end);
    }
    points.sort_by(f64::total_cmp);
    points
}

/// Widest capped depth among placed units whose extent contains `[lo, hi]`.
pub fn cell_width(
    lo: f64,
    hi: f64,
    footprints: &[CoverageFootprint],
    placements: &[Placement],
    road: &RoadGeometry,
) -> f64 {
    footprints
        .iter()
        .zip(placements)
        .filter(|(fp, p)| p.placed && fp.contains(lo, hi))
        .map(|(fp, _)| fp.capped_width(road))
        .fold(0.0, f64::max)
}

/// Length-weighted mean relevance over `[lo, hi]`. Zero for empty cells.
pub fn cell_relevance(lo: f64, hi: f64, road: &RoadGeometry) -> f64 {
    let length = hi - lo;
    if length <= 0.0 {
        return 0.0;
    }
    let mut weighted = 0.0;
    for (a, (&end, &score)) in road.sector_ends.iter().zip(&road.sector_scores).enumerate() {
        let start = road.sector_start(a);
        if start < hi && end > lo {
            weighted += score * (hi.min(end) - lo.max(start));
        }
    }
    weighted / length
}

pub fn partition(
    footprints: &[CoverageFootprint],
    placements: &[Placement],
    road: &RoadGeometry,
) -> Vec<PartitionCell> {
    points_of_interest(footprints, road.length)
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let width = cell_width(lo, hi, footprints, placements, road);
            PartitionCell {
                lo,
                hi,
                width,
                gamma: cell_relevance(lo, hi, road),
                area: (hi - lo) * width,
            }
        })
        .collect()
}

/// Effective coverage ratio. Divides by `eta` without clamping.
pub fn effective_coverage(
    footprints: &[CoverageFootprint],
    placements: &[Placement],
    road: &RoadGeometry,
    eta: f64,
) -> f64 {
    let weighted: f64 = partition(footprints, placements, road)
        .iter()
        .map(|c| c.gamma * c.area)
        .sum();
    weighted / (eta * road.width() * road.length)
}

/// Constraint value `h` (feasible when `h <= 0`) and its exterior penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintValue {
    pub h: f64,
    pub penalty: f64,
}

impl ConstraintValue {
    fn new(h: f64, weight: f64) -> Self {
        ConstraintValue {
            h,
            penalty: exterior_penalty(h, weight),
        }
    }

    pub fn satisfied(&self) -> bool {
        self.h <= 0.0
    }
}

/// `weight * max(h, 0)^2`
pub fn exterior_penalty(h: f64, weight: f64) -> f64 {
    let violation = h.max(0.0);
    if violation == 0.0 {
        0.0
    } else {
        weight * violation * violation
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyReport {
    /// Aggregate throughput against the network cap.
    pub throughput: ConstraintValue,
    /// Per-unit energy against the safety cap.
    pub energy: Vec<ConstraintValue>,
    pub total: f64,
}

impl PenaltyReport {
    pub fn feasible(&self) -> bool {
        self.throughput.satisfied() && self.energy.iter().all(ConstraintValue::satisfied)
    }
}

/// `usage / limit - 1`. Zero usage is always `-1`; against a zero limit any
/// usage is a violation of size `usage`, which stays finite and shrinks as
/// units are removed.
fn ratio_slack(usage: f64, limit: f64) -> f64 {
    if usage == 0.0 {
        -1.0
    } else if limit == 0.0 {
        usage
    } else {
        usage / limit - 1.0
    }
}

pub fn constraint_penalties(
    placements: &[Placement],
    profiles: &[DataEnergyProfile],
    limits: &Limits,
    weights: &PenaltyWeights,
) -> PenaltyReport {
    let total_data: f64 = placements
        .iter()
        .zip(profiles)
        .filter(|(p, _)| p.placed)
        .map(|(_, prof)| prof.data)
        .sum();
    let throughput = ConstraintValue::new(ratio_slack(total_data, limits.bandwidth), weights.throughput);
    let energy: Vec<ConstraintValue> = placements
        .iter()
        .zip(profiles)
        .map(|(p, prof)| {
            let used = if p.placed { prof.energy } else { 0.0 };
            ConstraintValue::new(ratio_slack(used, limits.energy), weights.energy)
        })
        .collect();
    let total = throughput.penalty + energy.iter().map(|c| c.penalty).sum::<f64>();
    PenaltyReport {
        throughput,
        energy,
        total,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessBreakdown {
    pub coverage: f64,
    pub lamp_count_penalty: f64,
    pub constraint_penalty: f64,
    pub fitness: f64,
    pub feasible: bool,
}

impl FitnessBreakdown {
    /// Coverage as reported for a finished plan: zero when any constraint is
    /// violated.
    pub fn reported_coverage(&self) -> f64 {
        if self.feasible {
            self.coverage
        } else {
            0.0
        }
    }
}

/// Everything derived from one set of placements.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub placements: Vec<Placement>,
    pub footprints: Vec<CoverageFootprint>,
    pub profiles: Vec<DataEnergyProfile>,
    pub penalties: PenaltyReport,
    pub breakdown: FitnessBreakdown,
}

impl Evaluation {
    pub fn cells(&self, road: &RoadGeometry) -> Vec<PartitionCell> {
        partition(&self.footprints, &self.placements, road)
    }

    pub fn lamps_placed(&self) -> usize {
        self.placements.iter().filter(|p| p.placed).count()
    }
}

/// Evaluates placements that must already satisfy the box bounds.
pub fn evaluate(placements: &[Placement], config: &ScenarioConfig) -> Result<Evaluation> {
    for (i, p) in placements.iter().enumerate() {
        p.check_bounds(i, &config.road)?;
    }
    let footprints = placements
        .iter()
        .map(|p| footprint_with(&config.lidar, &config.road, p, config.width_rule))
        .collect::<Result<Vec<_>>>()?;
    let profiles = footprints
        .iter()
        .map(|fp| datamodel::profile(&config.lidar, fp))
        .collect::<Result<Vec<_>>>()?;

    let coverage = effective_coverage(&footprints, placements, &config.road, config.eta);
    let penalties = constraint_penalties(placements, &profiles, &config.limits, &config.penalty);
    let lamps = placements.iter().filter(|p| p.placed).count();
    let lamp_count_penalty = config.lambda * lamps as f64;
    let breakdown = FitnessBreakdown {
        coverage,
        lamp_count_penalty,
        constraint_penalty: penalties.total,
        fitness: -coverage + lamp_count_penalty + penalties.total,
        feasible: penalties.feasible(),
    };
    Ok(Evaluation {
        placements: placements.to_vec(),
        footprints,
        profiles,
        penalties,
        breakdown,
    })
}

pub fn fitness(placements: &[Placement], config: &ScenarioConfig) -> Result<FitnessBreakdown> {
    evaluate(placements, config).map(|e| e.breakdown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn extent(x_start: f64, x_end: f64, l_width: f64) -> CoverageFootprint {
        CoverageFootprint {
            omega: 0.1,
            l_near: (x_end - x_start) / 2.0,
            l_far: (x_end - x_start) / 2.0,
            l_width,
            a_total: 0.0,
            a_rect: 0.0,
            x_start,
            x_end,
        }
    }

    fn placed(n: usize) -> Vec<Placement> {
        vec![Placement::new(0.0, 20.0, true); n]
    }

    fn table1_road() -> RoadGeometry {
        ScenarioConfig::table1().road
    }

    #[test]
    fn poi_boundary_only() {
        assert_eq!(points_of_interest(&[], 1000.0), vec![0.0, 1000.0]);
    }

    #[test]
    fn poi_single_and_overlapping() {
        let one = [extent(100.0, 300.0, 10.0)];
        assert_eq!(points_of_interest(&one, 1000.0), vec![0.0, 100.0, 300.0, 1000.0]);
        let two = [extent(100.0, 300.0, 10.0), extent(250.0, 500.0, 10.0)];
        assert_eq!(
            points_of_interest(&two, 1000.0),
            vec![0.0, 100.0, 250.0, 300.0, 500.0, 1000.0]
        );
    }

    #[test]
    fn poi_keeps_duplicates() {
        let clipped = [extent(0.0, 1000.0, 10.0)];
        assert_eq!(points_of_interest(&clipped, 1000.0), vec![0.0, 0.0, 1000.0, 1000.0]);
    }

    #[test]
    fn width_examples() {
        let road = table1_road();
        assert_eq!(cell_width(400.0, 500.0, &[extent(0.0, 100.0, 41.2)], &placed(1), &road), 0.0);
        assert_eq!(cell_width(10.0, 50.0, &[extent(0.0, 100.0, 41.2)], &placed(1), &road), 15.0);
        let two = [extent(0.0, 100.0, 12.0), extent(0.0, 100.0, 30.0)];
        assert_eq!(cell_width(10.0, 50.0, &two, &placed(2), &road), 15.0);
        let mut unplaced = placed(2);
        unplaced[1].placed = false;
        assert_eq!(cell_width(10.0, 50.0, &two, &unplaced, &road), 12.0);
    }

    #[test]
    fn width_closed_containment() {
        let road = table1_road();
        let fp = [extent(100.0, 300.0, 10.0)];
        assert_eq!(cell_width(100.0, 300.0, &fp, &placed(1), &road), 10.0);
        assert_eq!(cell_width(99.0, 300.0, &fp, &placed(1), &road), 0.0);
    }

    #[test]
    fn relevance_examples() {
        let road = table1_road();
        assert_relative_eq!(cell_relevance(310.0, 690.0, &road), 0.77);
        assert_relative_eq!(cell_relevance(0.0, 100.0, &road), 0.96, epsilon = 1e-12);
        assert_eq!(cell_relevance(42.0, 42.0, &road), 0.0);
    }

    #[test]
    fn coverage_examples() {
        let road = table1_road();
        assert_eq!(effective_coverage(&[], &[], &road, 1.0), 0.0);
        let full = [extent(0.0, 1000.0, 20.0)];
        // sum of score * sector length / 1000
        let mean = (60.0 * 1.0 + 90.0 * 0.9 + 150.0 * 0.8 + 400.0 * 0.77 + 160.0 * 0.8 + 80.0 * 0.9 + 60.0 * 1.0)
            / 1000.0;
        assert_relative_eq!(mean, 0.829, epsilon = 1e-12);
        assert_relative_eq!(effective_coverage(&full, &placed(1), &road, 1.0), 0.829, epsilon = 1e-12);
    }

    #[test]
    fn full_uniform_coverage_is_one() {
        let road = RoadGeometry::uniform(500.0, 5.0, 20.0, 15.0, 50.0, 1.0);
        let fp = [extent(0.0, 250.0, 15.0), extent(250.0, 500.0, 16.0)];
        assert_eq!(effective_coverage(&fp, &placed(2), &road, 1.0), 1.0);
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(exterior_penalty(-0.3, 1.0), 0.0);
        assert_eq!(exterior_penalty(0.0, 1.0), 0.0);
        assert_eq!(exterior_penalty(0.5, 1.0), 0.25);
        assert_eq!(exterior_penalty(0.5, f64::INFINITY), f64::INFINITY);

        let limits = Limits {
            bandwidth: 1e9,
            energy: 20.0,
        };
        let prof = |data, energy| DataEnergyProfile {
            g_cov: 13,
            data,
            energy,
        };
        let report = constraint_penalties(
            &placed(2),
            &[prof(1e9, 5.0), prof(1e9, 5.0)],
            &limits,
            &PenaltyWeights::default(),
        );
        assert_eq!(report.throughput.h, 1.0);
        assert_eq!(report.throughput.penalty, 1.0);
        assert_eq!(report.total, 1.0);
        assert!(!report.feasible());

        let report = constraint_penalties(
            &placed(1),
            &[prof(1e3, 30.0)],
            &limits,
            &PenaltyWeights::default(),
        );
        assert_eq!(report.energy[0].h, 0.5);
        assert_eq!(report.total, 0.25);

        let feasible = constraint_penalties(&placed(1), &[prof(1e3, 5.0)], &limits, &PenaltyWeights::default());
        assert_eq!(feasible.total, 0.0);
        assert!(feasible.feasible());
    }

    #[test]
    fn zero_bandwidth_only_admits_empty_plan() {
        let limits = Limits {
            bandwidth: 0.0,
            energy: 20.0,
        };
        let prof = DataEnergyProfile {
            g_cov: 13,
            data: 10.0,
            energy: 1.0,
        };
        let mut ps = placed(1);
        let r = constraint_penalties(&ps, &[prof], &limits, &PenaltyWeights::default());
        assert!(!r.feasible());
        assert_eq!(r.throughput.h, 10.0);
        assert_eq!(r.total, 100.0);
        ps[0].placed = false;
        let r = constraint_penalties(&ps, &[prof], &limits, &PenaltyWeights::default());
        assert!(r.feasible());
        assert_eq!(r.total, 0.0);
    }

    #[test]
    fn fitness_examples() {
        let config = ScenarioConfig::table1();
        let empty = vec![Placement::new(500.0, 30.0, false); 3];
        let b = fitness(&empty, &config).unwrap();
        assert_eq!(b.fitness, 0.0);
        assert!(b.feasible);

        let one = [Placement::new(500.0, 15.0, true)];
        let b = fitness(&one, &config).unwrap();
        assert!(b.feasible);
        assert_eq!(b.lamp_count_penalty, 0.25);
        assert_relative_eq!(b.fitness, -b.coverage + 0.25);
    }

    #[test]
    fn fitness_rejects_out_of_bounds() {
        let config = ScenarioConfig::table1();
        assert!(fitness(&[Placement::new(1000.5, 20.0, true)], &config).is_err());
        assert!(fitness(&[Placement::new(10.0, 14.0, true)], &config).is_err());
    }

    #[test]
    fn reported_coverage_zeroed_when_infeasible() {
        let b = FitnessBreakdown {
            coverage: 0.8,
            lamp_count_penalty: 0.0,
            constraint_penalty: 0.1,
            fitness: -0.7,
            feasible: false,
        };
        assert_eq!(b.reported_coverage(), 0.0);
    }

    fn arb_placements(max: usize) -> impl Strategy<Value = Vec<Placement>> {
        prop::collection::vec(
            (0.0..=1000.0f64, 15.0..=50.0f64, any::<bool>()).prop_map(|(x, z, e)| Placement::new(x, z, e)),
            0..=max,
        )
    }

    proptest! {
        #[test]
        fn partition_is_complete(ps in arb_placements(20)) {
            let config = ScenarioConfig::table1();
            let eval = evaluate(&ps, &config).unwrap();
            let cells = eval.cells(&config.road);
            prop_assert_eq!(cells.len(), 2 * ps.len() + 1);
            let total: f64 = cells.iter().map(PartitionCell::length).sum();
            prop_assert!((total - config.road.length).abs() < 1e-9);
            for c in &cells {
                prop_assert!(c.lo <= c.hi);
                prop_assert!(c.width >= 0.0 && c.width <= config.road.width());
                prop_assert!((0.0..=1.0).contains(&c.gamma));
            }
        }

        #[test]
        fn coverage_bounded(ps in arb_placements(20)) {
            let config = ScenarioConfig::table1();
            let cov = fitness(&ps, &config).unwrap().coverage;
            let max_score = config.road.sector_scores.iter().cloned().fold(0.0, f64::max);
            prop_assert!(cov >= 0.0);
            prop_assert!(cov <= max_score / config.eta + 1e-12);
        }

        #[test]
        fn nested_unit_adds_nothing(ps in arb_placements(6), pick in 0usize..6, shrink in 0.0..1.0f64) {
            let config = ScenarioConfig::table1();
            prop_assume!(!ps.is_empty());
            let base = evaluate(&ps, &config).unwrap();
            let i = pick % ps.len();
            prop_assume!(ps[i].placed);
            // Same position, lower mount: narrower extent and no wider depth.
            let z = config.road.z_min + shrink * (ps[i].z - config.road.z_min);
            let mut more = ps.clone();
            more.push(Placement::new(ps[i].x, z, true));
            let after = evaluate(&more, &config).unwrap();
            let (a, b) = (base.footprints[i], after.footprints[ps.len()]);
            prop_assume!(b.x_start >= a.x_start && b.x_end <= a.x_end);
            prop_assume!(b.capped_width(&config.road) <= a.capped_width(&config.road));
            prop_assert!((after.breakdown.coverage - base.breakdown.coverage).abs() < 1e-12);
        }

        #[test]
        fn placing_never_hurts_coverage(ps in arb_placements(20), pick in 0usize..20) {
            let config = ScenarioConfig::table1();
            prop_assume!(!ps.is_empty());
            let i = pick % ps.len();
            let mut off = ps.clone();
            off[i].placed = false;
            let mut on = ps.clone();
            on[i].placed = true;
            let c_off = fitness(&off, &config).unwrap().coverage;
            let c_on = fitness(&on, &config).unwrap().coverage;
            prop_assert!(c_on >= c_off);
        }

        #[test]
        fn permutation_invariant(ps in arb_placements(12), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let config = ScenarioConfig::table1();
            let mut shuffled = ps.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = fitness(&ps, &config).unwrap();
            let b = fitness(&shuffled, &config).unwrap();
            prop_assert!((a.fitness - b.fitness).abs() < 1e-12);
            prop_assert_eq!(a.feasible, b.feasible);
        }
    }
}
