use crate::auction::Action;

/// Bids the true valuation unless a primary user was sensed.
pub fn myopic_act(valuation: f64, pu_detected: bool) -> Action {
    if pu_detected {
        Action::StayOut
    } else {
        Action::Bid(valuation)
    }
}

/// Index of the highest valuation; ties go to the lowest index.
pub fn bcb_act(valuations: &[f64]) -> usize {
    assert!(!valuations.is_empty(), "at least one channel required");
    let mut best = 0;
    for (k, &v) in valuations.iter().enumerate().skip(1) {
        if v > valuations[best] {
            best = k;
        }
    }
    best
}
