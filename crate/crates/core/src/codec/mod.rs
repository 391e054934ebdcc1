//! Bit-exact coded caching: random placement, XOR-coded delivery and per-user
//! decoding.
//!
//! Placement stores, for every (user, content) pair, a uniformly random set of
//! `round(M F / N)` bit positions. Delivery walks every nonempty user subset
//! `U` (largest first) and sends the XOR of the segments `V[d_k, U \ {k}]` for
//! `k` in `U`, where `V[c, S]` is the set of bits of content `c` cached by
//! exactly the users in `S`. Every user can cancel all foreign terms of an XOR
//! from its own cache, so each transmission delivers one fresh segment to each
//! of its receivers.

mod decode;
mod delivery;
mod dump;
mod placement;

use bitvec::prelude::*;
use rand::Rng;
use thiserror::Error;

use crate::config::{ConfigError, SystemConfig};
use crate::rng::{stream_rng, Stream};
use crate::subset::UserSet;

pub use decode::{decode_user, UserCache};
pub use delivery::{build_delivery_plan, MAX_PLAN_USERS};
pub use dump::{dump_placement, dump_plan};
pub use placement::{make_placement, segment};

/// Packed bit sequence used for content and payload bits.
pub type Bits = BitVec<u64, Lsb0>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cache quota rounds to zero bits per content (M F / N = {0}) while M > 0")]
    DegenerateQuota(f64),
    #[error("{users} users exceed the supported maximum of {max}")]
    TooManyUsers { users: usize, max: usize },
    #[error("content size {0} does not fit 32-bit bit indices")]
    ContentTooLarge(usize),
    #[error("request vector has {got} entries for {expected} users")]
    RequestLength { expected: usize, got: usize },
    #[error("user {user} requests content {content}, library has {contents}")]
    UnknownContent {
        user: usize,
        content: usize,
        contents: usize,
    },
    #[error("user {0} is not part of this system")]
    UnknownUser(usize),
    #[error("user {user} cannot recover {missing} bits of content {content}")]
    DecodeFailure {
        user: usize,
        content: usize,
        missing: usize,
    },
}

/// One content of the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Content {
    pub id: usize,
    pub bits: Bits,
}

/// The server's `N` contents, each `F` synthetic bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    contents: Vec<Content>,
}

impl Library {
    /// Draws `N` contents of `F` uniform random bits from `seed`.
    pub fn generate(cfg: &SystemConfig, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::Library);
        let contents = (0..cfg.num_contents)
            .map(|id| {
                let mut bits = Bits::with_capacity(cfg.content_size);
                bits.extend((0..cfg.content_size).map(|_| rng.random::<bool>()));
                Content { id, bits }
            })
            .collect();
        Library { contents }
    }

    pub fn from_contents(contents: Vec<Bits>) -> Self {
        Library {
            contents: contents
                .into_iter()
                .enumerate()
                .map(|(id, bits)| Content { id, bits })
                .collect(),
        }
    }

    pub fn content(&self, id: usize) -> &Content {
        &self.contents[id]
    }

    pub fn len(&self) -> usize {
        self.contents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contents.is_empty()
    }
}

/// Which bit positions of which content every user holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementState {
    num_users: usize,
    num_contents: usize,
    content_size: usize,
    quota: usize,
    /// `cached[user][content]`, sorted ascending.
    cached: Vec<Vec<Vec<u32>>>,
}

impl PlacementState {
    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_contents(&self) -> usize {
        self.num_contents
    }

    pub fn content_size(&self) -> usize {
        self.content_size
    }

    /// Bits of each content every user holds.
    pub fn quota(&self) -> usize {
        self.quota
    }

    /// Sorted bit positions of `content` cached at `user`.
    pub fn cached(&self, user: usize, content: usize) -> &[u32] {
        &self.cached[user][content]
    }

    /// Total bits cached at `user` across the library.
    pub fn cache_load(&self, user: usize) -> usize {
        self.cached[user].iter().map(Vec::len).sum()
    }

    /// For every bit of `content`, the set of users caching it.
    pub fn holder_sets(&self, content: usize) -> Vec<UserSet> {
        let mut holders = vec![UserSet::EMPTY; self.content_size];
        for (user, per_content) in self.cached.iter().enumerate() {
            for &i in &per_content[content] {
                holders[i as usize] = holders[i as usize].with(user);
            }
        }
        holders
    }
}

/// `d[k]`: the content requested by user `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestVector(Vec<usize>);

impl RequestVector {
    pub fn new(requests: Vec<usize>, cfg: &SystemConfig) -> Result<Self, CodecError> {
        if requests.len() != cfg.num_users {
            return Err(CodecError::RequestLength {
                expected: cfg.num_users,
                got: requests.len(),
            });
        }
        if let Some((user, &content)) = requests
            .iter()
            .enumerate()
            .find(|(_, &c)| c >= cfg.num_contents)
        {
            return Err(CodecError::UnknownContent {
                user,
                content,
                contents: cfg.num_contents,
            });
        }
        Ok(RequestVector(requests))
    }

    /// Independent uniform requests over the `N` contents.
    pub fn uniform(cfg: &SystemConfig, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::Requests);
        RequestVector(
            (0..cfg.num_users)
                .map(|_| rng.random_range(0..cfg.num_contents))
                .collect(),
        )
    }

    pub fn get(&self, user: usize) -> usize {
        self.0[user]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The part of one user's request carried by a transmission: the bits of
/// `content` cached by exactly `holders`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub user: usize,
    pub content: usize,
    pub holders: UserSet,
    pub indices: Vec<u32>,
}

/// One coded (or, for a single receiver, plain) transmission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub receivers: UserSet,
    /// One per receiver, in increasing user order.
    pub segments: Vec<Segment>,
    pub payload: Bits,
}

impl Transmission {
    /// Realized signal size in bits.
    pub fn realized_size(&self) -> usize {
        self.payload.len()
    }

    pub fn segment_for(&self, user: usize) -> Option<&Segment> {
        self.segments.iter().find(|s| s.user == user)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryPlan {
    pub num_users: usize,
    pub transmissions: Vec<Transmission>,
}

impl DeliveryPlan {
    /// Sum of realized sizes: the bits the server puts on the channel.
    pub fn total_bits(&self) -> usize {
        self.transmissions.iter().map(Transmission::realized_size).sum()
    }

    pub fn multicasts(&self) -> impl Iterator<Item = &Transmission> {
        self.transmissions.iter().filter(|t| t.receivers.len() >= 2)
    }

    pub fn unicasts(&self) -> impl Iterator<Item = &Transmission> {
        self.transmissions.iter().filter(|t| t.receivers.len() == 1)
    }
}
