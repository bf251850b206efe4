//! Scenario definition and the flat key=value file format.

use super::SimError;

/// measured per-node commit delays in microseconds, node 1 first
pub const MEASURED_COMMIT_DELAYS_MICROS: [u64; 20] = [
    6_430_000, 7_330_000, 4_660_000, 4_000_000, 6_000_000, 5_330_000, 3_670_000, 5_330_000,
    9_880_000, 11_010_000, 6_670_000, 7_010_000, 6_500_000, 7_000_000, 10_330_000, 10_330_000,
    9_800_000, 7_660_000, 5_330_000, 5_000_000,
];

/// modeled network speed in bits per second
pub const DEFAULT_LINK_RATE_BPS: u64 = 120_000;

/// One simulation configuration. Probabilities are per block; delays are
/// microseconds of simulated time.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub node_count: usize,
    pub endorser_count: usize,
    pub tx_per_block: u64,
    pub block_count: usize,
    pub commit_delays_micros: Vec<u64>,
    /// fraction of nodes whose commit confirms a block
    pub network_threshold: f64,
    /// per-block probabilities of (consensus, syntax, version) failures
    pub error_rates: [f64; 3],
    pub rng_seed: u64,
    /// bits per second; zero models free serialization
    pub link_rate: u64,
}

impl Scenario {
    pub fn default_scenario() -> Self {
        Self {
            node_count: 20,
            endorser_count: 6,
            tx_per_block: 100,
            block_count: 10,
            commit_delays_micros: MEASURED_COMMIT_DELAYS_MICROS.to_vec(),
            network_threshold: 1.0,
            error_rates: [0.0; 3],
            rng_seed: 0,
            link_rate: DEFAULT_LINK_RATE_BPS,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |field, reason| Err(SimError::InvalidField { field, reason });
        if self.node_count < 2 {
            return fail("node_count", "must be at least 2");
        }
        if self.endorser_count < 1 || self.endorser_count > self.node_count - 1 {
            return fail("endorser_count", "must lie in 1..=node_count-1");
        }
        if self.tx_per_block < 1 || self.tx_per_block > 1000 {
            return fail("tx_per_block", "must lie in 1..=1000");
        }
        if self.block_count < 1 {
            return fail("block_count", "must be at least 1");
        }
        if self.commit_delays_micros.len() != self.node_count {
            return fail("commit_delays", "length must equal node_count");
        }
        if !(self.network_threshold > 0.0 && self.network_threshold <= 1.0) {
            return fail("network_threshold", "must lie in (0, 1]");
        }
        for rate in self.error_rates {
            if !(0.0..=1.0).contains(&rate) || !rate.is_finite() {
                return fail("error_rates", "each probability must lie in [0, 1]");
            }
        }
        if self.error_rates.iter().sum::<f64>() > 1.0 {
            return fail("error_rates", "probabilities must sum to at most 1");
        }
        Ok(())
    }

    /// Parse the flat key = value scenario format. Keys are exactly the
    /// scenario fields; unknown or repeated keys are rejected. Lines that
    /// are empty or start with '#' are skipped. Times are given in seconds
    /// and stored as microseconds.
    pub fn from_kv_text(text: &str) -> Result<Self, SimError> {
        let mut scenario = Self::default_scenario();
        let mut seen: Vec<String> = Vec::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SimError::MalformedLine(line.to_string()))?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|s| s == key) {
                return Err(SimError::DuplicateKey(key.to_string()));
            }
            seen.push(key.to_string());
            let invalid = |reason: String| SimError::InvalidValue { key: key.to_string(), reason };
            match key {
                "node_count" => {
                    scenario.node_count = value.parse().map_err(|e| invalid(format!("{e}")))?
                }
                "endorser_count" => {
                    scenario.endorser_count = value.parse().map_err(|e| invalid(format!("{e}")))?
                }
                "tx_per_block" => {
                    scenario.tx_per_block = value.parse().map_err(|e| invalid(format!("{e}")))?
                }
                "block_count" => {
                    scenario.block_count = value.parse().map_err(|e| invalid(format!("{e}")))?
                }
                "commit_delays" => {
                    scenario.commit_delays_micros = value
                        .split(',')
                        .map(|part| parse_seconds_as_micros(part.trim()))
                        .collect::<Result<Vec<u64>, String>>()
                        .map_err(invalid)?;
                }
                "network_threshold" => {
                    scenario.network_threshold =
                        value.parse().map_err(|e| invalid(format!("{e}")))?
                }
                "error_rates" => {
                    let rates: Vec<f64> = value
                        .split(',')
                        .map(|part| part.trim().parse::<f64>().map_err(|e| invalid(format!("{e}"))))
                        .collect::<Result<_, _>>()?;
                    if rates.len() != 3 {
                        return Err(invalid("expected three comma-separated probabilities".into()));
                    }
                    scenario.error_rates = [rates[0], rates[1], rates[2]];
                }
                "rng_seed" => {
                    scenario.rng_seed = value.parse().map_err(|e| invalid(format!("{e}")))?
                }
                "link_rate" => {
                    scenario.link_rate = value.parse().map_err(|e| invalid(format!("{e}")))?
                }
                other => return Err(SimError::UnknownKey(other.to_string())),
            }
        }
        scenario.validate()?;
        Ok(scenario)
    }
}

fn parse_seconds_as_micros(text: &str) -> Result<u64, String> {
    let seconds: f64 = text.parse().map_err(|e| format!("{e}"))?;
    if !seconds.is_finite() || seconds < 0.0 {
        return Err("delay seconds must be finite and nonnegative".into());
    }
    Ok((seconds * 1e6).round() as u64)
}
