use rand::seq::index;

use super::{CodecError, PlacementState};
use crate::config::SystemConfig;
use crate::rng::{stream_rng, Stream};
use crate::subset::{UserSet, MAX_USERS};

/// Random decentralized placement: every user independently caches
/// `round(M F / N)` distinct, uniformly chosen bits of every content.
pub fn make_placement(cfg: &SystemConfig, seed: u64) -> Result<PlacementState, CodecError> {
    cfg.validate()?;
    if cfg.num_users > MAX_USERS {
        return Err(CodecError::TooManyUsers {
            users: cfg.num_users,
            max: MAX_USERS,
        });
    }
    if cfg.content_size > u32::MAX as usize {
        return Err(CodecError::ContentTooLarge(cfg.content_size));
    }
    let quota = cfg.per_content_quota();
    if quota == 0 && cfg.cache_contents > 0.0 {
        return Err(CodecError::DegenerateQuota(
            cfg.cache_contents * cfg.content_size as f64 / cfg.num_contents as f64,
        ));
    }

    let mut rng = stream_rng(seed, Stream::Placement);
    let cached = (0..cfg.num_users)
        .map(|_| {
            (0..cfg.num_contents)
                .map(|_| {
                    let mut picked: Vec<u32> = index::sample(&mut rng, cfg.content_size, quota)
                        .into_iter()
                        .map(|i| i as u32)
                        .collect();
                    picked.sort_unstable();
                    picked
                })
                .collect()
        })
        .collect();

    Ok(PlacementState {
        num_users: cfg.num_users,
        num_contents: cfg.num_contents,
        content_size: cfg.content_size,
        quota,
        cached,
    })
}

/// Bits of `content` cached by every user in `holders` and by nobody else.
///
/// Over all `2^K` holder sets these segments partition `0..F`.
pub fn segment(placement: &PlacementState, content: usize, holders: UserSet) -> Vec<u32> {
    placement
        .holder_sets(content)
        .into_iter()
        .enumerate()
        .filter(|&(_, h)| h == holders)
        .map(|(i, _)| i as u32)
        .collect()
}
