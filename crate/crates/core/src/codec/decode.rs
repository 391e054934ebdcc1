use super::{Bits, CodecError, DeliveryPlan, Library, PlacementState, RequestVector};

/// What one user physically holds after placement: for every content, which
/// positions are cached and their values. Decoding only sees this view and
/// the plan, never the library.
#[derive(Debug, Clone)]
pub struct UserCache {
    user: usize,
    present: Vec<Bits>,
    values: Vec<Bits>,
}

impl UserCache {
    pub fn load(library: &Library, placement: &PlacementState, user: usize) -> Result<Self, CodecError> {
        if user >= placement.num_users() {
            return Err(CodecError::UnknownUser(user));
        }
        let f = placement.content_size();
        let mut present = Vec::with_capacity(placement.num_contents());
        let mut values = Vec::with_capacity(placement.num_contents());
        for c in 0..placement.num_contents() {
            let mut have = Bits::repeat(false, f);
            let mut val = Bits::repeat(false, f);
            let source = &library.content(c).bits;
            for &i in placement.cached(user, c) {
                have.set(i as usize, true);
                val.set(i as usize, source[i as usize]);
            }
            present.push(have);
            values.push(val);
        }
        Ok(UserCache {
            user,
            present,
            values,
        })
    }

    pub fn user(&self) -> usize {
        self.user
    }

    pub fn bit(&self, content: usize, index: usize) -> Option<bool> {
        self.present[content][index].then(|| self.values[content][index])
    }
}

/// Reconstructs the content requested by `user` from its cache and the plan.
pub fn decode_user(
    plan: &DeliveryPlan,
    library: &Library,
    placement: &PlacementState,
    requests: &RequestVector,
    user: usize,
) -> Result<Bits, CodecError> {
    let cache = UserCache::load(library, placement, user)?;
    decode_with_cache(plan, &cache, requests, placement.content_size())
}

pub(crate) fn decode_with_cache(
    plan: &DeliveryPlan,
    cache: &UserCache,
    requests: &RequestVector,
    content_size: usize,
) -> Result<Bits, CodecError> {
    let user = cache.user();
    let wanted = requests.get(user);
    let mut out = Bits::repeat(false, content_size);
    let mut known = Bits::repeat(false, content_size);

    for i in 0..content_size {
        if let Some(b) = cache.bit(wanted, i) {
            out.set(i, b);
            known.set(i, true);
        }
    }

    let failure = |missing| CodecError::DecodeFailure {
        user,
        content: wanted,
        missing,
    };

    for tx in plan.transmissions.iter().filter(|t| t.receivers.contains(user)) {
        let Some(own) = tx.segment_for(user) else {
            continue;
        };
        if own.indices.len() > tx.payload.len() {
            return Err(failure(own.indices.len() - tx.payload.len()));
        }
        let mut residue = tx.payload.clone();
        for other in tx.segments.iter().filter(|s| s.user != user) {
            for (slot, &i) in other.indices.iter().enumerate() {
                match cache.bit(other.content, i as usize) {
                    Some(true) => {
                        let cur = residue[slot];
                        residue.set(slot, !cur);
                    }
                    Some(false) => {}
                    None => return Err(failure(other.indices.len())),
                }
            }
        }
        for (slot, &i) in own.indices.iter().enumerate() {
            out.set(i as usize, residue[slot]);
            known.set(i as usize, true);
        }
    }

    match known.count_zeros() {
        0 => Ok(out),
        missing => Err(failure(missing)),
    }
}
