//! Parameter sweeps over one scenario axis, keeping everything else fixed.

use super::{run_scenario_with, Scenario, SimError, SimOptions, SimResult};

/// One sweep sample: the swept value, the throughput it achieved, and the
/// full run behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub x: u64,
    pub tps: f64,
    pub result: SimResult,
}

/// committed transactions per second of wall span, from first submission to
/// the last commit on any node
fn throughput_tps(result: &SimResult) -> f64 {
    let last_commit = result
        .blocks
        .iter()
        .flat_map(|b| b.commit_micros.iter().copied())
        .max();
    let first_submit = result.blocks.iter().map(|b| b.submit_micros).min();
    match (first_submit, last_commit) {
        (Some(start), Some(end)) if end > start => {
            result.committed_tx() as f64 / ((end - start) as f64 / 1e6)
        }
        _ => 0.0,
    }
}

/// Run the base scenario once per block size.
pub fn sweep_blocksize(base: &Scenario, sizes: &[u64]) -> Result<Vec<CurvePoint>, SimError> {
    sweep_blocksize_with(base, sizes, SimOptions::default())
}

pub fn sweep_blocksize_with(
    base: &Scenario,
    sizes: &[u64],
    opts: SimOptions,
) -> Result<Vec<CurvePoint>, SimError> {
    if sizes.is_empty() {
        return Err(SimError::EmptySweep);
    }
    let mut points = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if !(1..=1000).contains(&size) {
            return Err(SimError::SweepPointOutOfRange(size, "tx_per_block"));
        }
        let scenario = Scenario { tx_per_block: size, ..base.clone() };
        let result = run_scenario_with(&scenario, opts)?;
        points.push(CurvePoint { x: size, tps: throughput_tps(&result), result });
    }
    Ok(points)
}

/// Run the base scenario once per endorser count.
pub fn sweep_endorsers(base: &Scenario, counts: &[usize]) -> Result<Vec<CurvePoint>, SimError> {
    sweep_endorsers_with(base, counts, SimOptions::default())
}

pub fn sweep_endorsers_with(
    base: &Scenario,
    counts: &[usize],
    opts: SimOptions,
) -> Result<Vec<CurvePoint>, SimError> {
    if counts.is_empty() {
        return Err(SimError::EmptySweep);
    }
    let mut points = Vec::with_capacity(counts.len());
    for &count in counts {
        if count < 1 || count >= base.node_count {
            return Err(SimError::SweepPointOutOfRange(count as u64, "endorser_count"));
        }
        let scenario = Scenario { endorser_count: count, ..base.clone() };
        let result = run_scenario_with(&scenario, opts)?;
        points.push(CurvePoint { x: count as u64, tps: throughput_tps(&result), result });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::{DEFAULT_LINK_RATE_BPS, TX_MEAN_BYTES};

    #[test]
    fn blocksize_curve_is_unimodal_with_interior_peak() {
        let sizes = [1u64, 10, 100, 250, 600, 800, 1000];
        let points = sweep_blocksize(&Scenario::default_scenario(), &sizes).unwrap();
        let tps: Vec<f64> = points.iter().map(|p| p.tps).collect();
        let peak = tps.iter().cloned().fold(f64::MIN, f64::max);
        let peak_at = points[tps.iter().position(|&t| t == peak).unwrap()].x;
        assert_eq!(peak_at, 600);
        for pair in tps[..5].windows(2) {
            assert!(pair[0] < pair[1], "rising flank: {tps:?}");
        }
        for pair in tps[4..].windows(2) {
            assert!(pair[0] > pair[1], "falling flank: {tps:?}");
        }
        let at_1000 = tps[6];
        assert!(at_1000 <= 0.9 * peak, "knee penalty: {at_1000} vs peak {peak}");
        // no point beats the raw link capacity
        let capacity = DEFAULT_LINK_RATE_BPS as f64 / (8 * TX_MEAN_BYTES) as f64;
        for &t in &tps {
            assert!(t < capacity, "{t} exceeds link capacity {capacity}");
        }
    }

    #[test]
    fn endorser_curve_declines_gently() {
        let counts: Vec<usize> = (1..=19).collect();
        let points = sweep_endorsers(&Scenario::default_scenario(), &counts).unwrap();
        let tps: Vec<f64> = points.iter().map(|p| p.tps).collect();
        for pair in tps.windows(2) {
            assert!(pair[0] >= pair[1], "adding endorsers never speeds things up");
        }
        let decline = 1.0 - tps[18] / tps[0];
        assert!(decline > 0.0 && decline <= 0.03, "decline {decline}");
    }

    #[test]
    fn zero_contention_flattens_the_endorser_curve() {
        let counts: Vec<usize> = (1..=19).collect();
        let opts = SimOptions { jitter_fraction: None, contention_micros: Some(0) };
        let points =
            sweep_endorsers_with(&Scenario::default_scenario(), &counts, opts).unwrap();
        for pair in points.windows(2) {
            assert_eq!(pair[0].tps, pair[1].tps, "contention was the only endorser cost");
        }
    }

    #[test]
    fn sweep_points_carry_their_runs() {
        let points = sweep_blocksize(&Scenario::default_scenario(), &[5, 50]).unwrap();
        assert_eq!(points.len(), 2);
        for p in &points {
            assert_eq!(p.result.tx_per_block, p.x);
            assert_eq!(p.result.committed_blocks(), 10);
        }
    }

    #[test]
    fn out_of_range_points_are_rejected() {
        let base = Scenario::default_scenario();
        assert!(matches!(
            sweep_blocksize(&base, &[0]),
            Err(SimError::SweepPointOutOfRange(0, "tx_per_block"))
        ));
        assert!(matches!(
            sweep_blocksize(&base, &[100, 1001]),
            Err(SimError::SweepPointOutOfRange(1001, _))
        ));
        assert!(matches!(sweep_blocksize(&base, &[]), Err(SimError::EmptySweep)));
        assert!(matches!(
            sweep_endorsers(&base, &[0]),
            Err(SimError::SweepPointOutOfRange(0, "endorser_count"))
        ));
        assert!(matches!(
            sweep_endorsers(&base, &[20]),
            Err(SimError::SweepPointOutOfRange(20, _))
        ));
        assert!(matches!(sweep_endorsers(&base, &[]), Err(SimError::EmptySweep)));
    }
}
