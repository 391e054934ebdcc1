use std::collections::HashMap;

use super::{Bits, CodecError, DeliveryPlan, Library, PlacementState, RequestVector, Segment, Transmission};
use crate::subset::{delivery_order, UserSet};

/// Plans enumerate all `2^K - 1` subsets; past this the plan itself stops
/// fitting in memory.
pub const MAX_PLAN_USERS: usize = 20;

/// Exact-pattern partition of one content, keyed by holder set.
fn partition(placement: &PlacementState, content: usize) -> HashMap<UserSet, Vec<u32>> {
    let mut parts: HashMap<UserSet, Vec<u32>> = HashMap::new();
    for (i, holders) in placement.holder_sets(content).into_iter().enumerate() {
        parts.entry(holders).or_default().push(i as u32);
    }
    parts
}

/// Builds the coded delivery plan for `requests`.
///
/// For each nonempty subset `U` the payload is the XOR of the requested
/// bits `V[d_k, U \ {k}]` for `k` in `U`, each zero-padded to the longest.
/// Transmissions are ordered by decreasing `|U|`, then lexicographically.
pub fn build_delivery_plan(
    library: &Library,
    placement: &PlacementState,
    requests: &RequestVector,
) -> Result<DeliveryPlan, CodecError> {
    let k = placement.num_users();
    if k > MAX_PLAN_USERS {
        return Err(CodecError::TooManyUsers {
            users: k,
            max: MAX_PLAN_USERS,
        });
    }
    if requests.len() != k {
        return Err(CodecError::RequestLength {
            expected: k,
            got: requests.len(),
        });
    }
    if let Some((user, &content)) = requests
        .as_slice()
        .iter()
        .enumerate()
        .find(|(_, &c)| c >= placement.num_contents() || c >= library.len())
    {
        return Err(CodecError::UnknownContent {
            user,
            content,
            contents: placement.num_contents().min(library.len()),
        });
    }

    let mut partitions: HashMap<usize, HashMap<UserSet, Vec<u32>>> = HashMap::new();
    for &c in requests.as_slice() {
        partitions
            .entry(c)
            .or_insert_with(|| partition(placement, c));
    }

    let transmissions = delivery_order(k)
        .into_iter()
        .map(|receivers| {
            let segments: Vec<Segment> = receivers
                .iter()
                .map(|user| {
                    let content = requests.get(user);
                    let holders = receivers.without(user);
                    let indices = partitions[&content]
                        .get(&holders)
                        .cloned()
                        .unwrap_or_default();
                    Segment {
                        user,
                        content,
                        holders,
                        indices,
                    }
                })
                .collect();
            let width = segments.iter().map(|s| s.indices.len()).max().unwrap_or(0);
            let mut payload = Bits::repeat(false, width);
            for seg in &segments {
                let bits = &library.content(seg.content).bits;
                for (slot, &i) in seg.indices.iter().enumerate() {
                    if bits[i as usize] {
                        let cur = payload[slot];
                        payload.set(slot, !cur);
                    }
                }
            }
            Transmission {
                receivers,
                segments,
                payload,
            }
        })
        .collect();

    Ok(DeliveryPlan {
        num_users: k,
        transmissions,
    })
}
