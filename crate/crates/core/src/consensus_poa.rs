//! Proof-of-Accomplishment: a 5-point service rating gates publish access,
//! and endorsers vote on block proposals under a quorum fraction.
//!
//! Ratings are memoryless per service event, with one exception: an actor
//! whose rating hit zero is flagged for severity monitoring and holds rating
//! zero until a configured number of consecutive on-time services clears the
//! flag. That keeps the access gate equivalent to `rating > 0` in every
//! reachable state.

use std::str::FromStr;

pub const MAX_RATING: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoAConfig {
    /// allowed lateness in days before penalties start
    pub upper_threshold: f64,
    /// rating decrement per late day; strictly negative
    pub delta_r: i64,
    /// fraction of endorser views that must pass for acceptance
    pub endorsement_quorum: f64,
    /// consecutive on-time services required to clear a severity flag
    pub flag_clear_count: u32,
}

impl PoAConfig {
    pub fn default_config() -> Self {
        Self { upper_threshold: 0.0, delta_r: -1, endorsement_quorum: 0.5, flag_clear_count: 1 }
    }

    pub fn validate(&self) -> Result<(), PoAError> {
        if !self.upper_threshold.is_finite() || self.upper_threshold < 0.0 {
            return Err(PoAError::InvalidConfig("upper_threshold must be finite and nonnegative"));
        }
        if self.delta_r >= 0 {
            return Err(PoAError::InvalidConfig("delta_r must be negative"));
        }
        if !(self.endorsement_quorum > 0.0 && self.endorsement_quorum <= 1.0) {
            return Err(PoAError::InvalidConfig("endorsement_quorum must lie in (0, 1]"));
        }
        if self.flag_clear_count == 0 {
            return Err(PoAError::InvalidConfig("flag_clear_count must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ServiceType {
    Production,
    Warehouse,
    Shipment,
    Transport,
    Delivery,
}

impl ServiceType {
    pub fn as_str(&self) -> &'static str {
        match self {
            ServiceType::Production => "production",
            ServiceType::Warehouse => "warehouse",
            ServiceType::Shipment => "shipment",
            ServiceType::Transport => "transport",
            ServiceType::Delivery => "delivery",
        }
    }
}

impl FromStr for ServiceType {
    type Err = PoAError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "production" => Ok(ServiceType::Production),
            "warehouse" => Ok(ServiceType::Warehouse),
            "shipment" => Ok(ServiceType::Shipment),
            "transport" => Ok(ServiceType::Transport),
            "delivery" => Ok(ServiceType::Delivery),
            other => Err(PoAError::UnknownServiceType(other.to_string())),
        }
    }
}

impl std::fmt::Display for ServiceType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One completed service: what was promised and what happened, in days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceRecord {
    pub service_type: ServiceType,
    pub scheduled_time: f64,
    pub actual_time: f64,
}

impl ServiceRecord {
    pub fn new(service_type: ServiceType, scheduled_time: f64, actual_time: f64) -> Result<Self, PoAError> {
        if !scheduled_time.is_finite() || scheduled_time < 0.0 {
            return Err(PoAError::InvalidRecord("scheduled_time must be finite and nonnegative"));
        }
        if !actual_time.is_finite() || actual_time < 0.0 {
            return Err(PoAError::InvalidRecord("actual_time must be finite and nonnegative"));
        }
        Ok(Self { service_type, scheduled_time, actual_time })
    }

    fn lateness(&self) -> f64 {
        self.actual_time - self.scheduled_time
    }

    pub fn on_time(&self, cfg: &PoAConfig) -> bool {
        self.lateness() <= cfg.upper_threshold
    }
}

/// Rating for one service event: 5 when on time, otherwise 5 plus delta_r
/// per whole late day past the threshold, floored at 0.
pub fn evaluate_service(record: &ServiceRecord, cfg: &PoAConfig) -> u8 {
    if record.on_time(cfg) {
        return MAX_RATING;
    }
    let late_days = (record.lateness() - cfg.upper_threshold).ceil() as i64;
    (MAX_RATING as i64 + cfg.delta_r * late_days).clamp(0, MAX_RATING as i64) as u8
}

/// Per-stakeholder rating state.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingState {
    rating: u8,
    history: Vec<(ServiceRecord, u8)>,
    flagged: bool,
    consecutive_on_time: u32,
}

impl Default for RatingState {
    fn default() -> Self {
        Self::new()
    }
}

impl RatingState {
    /// fresh stakeholders start at full rating
    pub fn new() -> Self {
        Self { rating: MAX_RATING, history: Vec::new(), flagged: false, consecutive_on_time: 0 }
    }

    pub fn rating(&self) -> u8 {
        self.rating
    }

    pub fn history(&self) -> &[(ServiceRecord, u8)] {
        &self.history
    }

    pub fn flagged(&self) -> bool {
        self.flagged
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessDecision {
    Allow,
    SeverityConcern,
}

/// Publish gate: open exactly when the rating is positive.
pub fn access_decision(state: &RatingState) -> AccessDecision {
    if state.rating > 0 && !state.flagged {
        AccessDecision::Allow
    } else {
        AccessDecision::SeverityConcern
    }
}

/// Fold one service event into the state. Unflagged actors take the event's
/// rating directly; flagged actors stay at zero until enough consecutive
/// on-time services clear the flag.
pub fn update_rating(state: &RatingState, record: ServiceRecord, cfg: &PoAConfig) -> RatingState {
    let mut next = state.clone();
    let eval = evaluate_service(&record, cfg);
    if next.flagged {
        if record.on_time(cfg) {
            next.consecutive_on_time += 1;
            if next.consecutive_on_time >= cfg.flag_clear_count {
                next.flagged = false;
                next.rating = eval;
            }
        } else {
            next.consecutive_on_time = 0;
        }
    } else {
        next.rating = eval;
        if next.rating == 0 {
            next.flagged = true;
            next.consecutive_on_time = 0;
        }
    }
    next.history.push((record, next.rating));
    next
}

/// What one endorser saw when handed a proposal: the signature check result
/// and the proposer's access gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndorserView {
    pub signature_valid: bool,
    pub access_allowed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    Signature,
    Rating,
    Quorum,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RejectReason::Signature => "signature",
            RejectReason::Rating => "rating",
            RejectReason::Quorum => "quorum",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndorseOutcome {
    Accept,
    Reject(RejectReason),
}

/// Aggregate endorser views: accept when the passing fraction reaches the
/// quorum, otherwise name the dominant failure.
pub fn endorse_proposal(views: &[EndorserView], cfg: &PoAConfig) -> Result<EndorseOutcome, PoAError> {
    if views.is_empty() {
        return Err(PoAError::EmptyViews);
    }
    cfg.validate()?;
    let passing = views.iter().filter(|v| v.signature_valid && v.access_allowed).count();
    if passing as f64 / views.len() as f64 >= cfg.endorsement_quorum {
        return Ok(EndorseOutcome::Accept);
    }
    let reason = if views.iter().all(|v| !v.signature_valid) {
        RejectReason::Signature
    } else if views.iter().all(|v| !v.signature_valid || !v.access_allowed) {
        RejectReason::Rating
    } else {
        RejectReason::Quorum
    };
    Ok(EndorseOutcome::Reject(reason))
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PoAError {
    #[error("invalid rating config: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid service record: {0}")]
    InvalidRecord(&'static str),
    #[error("unknown value for field service_type: {0:?}")]
    UnknownServiceType(String),
    #[error("endorsement requires at least one view")]
    EmptyViews,
}
