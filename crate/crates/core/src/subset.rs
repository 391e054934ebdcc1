//! Sets of users packed into a 64-bit mask.

use std::fmt;

use itertools::Itertools;

/// Largest user population a [`UserSet`] can address.
pub const MAX_USERS: usize = 64;

/// A subset of users `0..K`, bit `k` set when user `k` is a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UserSet(u64);

impl UserSet {
    pub const EMPTY: UserSet = UserSet(0);

    pub fn from_mask(mask: u64) -> Self {
        UserSet(mask)
    }

    pub fn singleton(user: usize) -> Self {
        debug_assert!(user < MAX_USERS);
        UserSet(1 << user)
    }

    /// All of `0..k`.
    pub fn full(k: usize) -> Self {
        debug_assert!(k <= MAX_USERS);
        if k == MAX_USERS {
            UserSet(u64::MAX)
        } else {
            UserSet((1u64 << k) - 1)
        }
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, user: usize) -> bool {
        user < MAX_USERS && self.0 & (1 << user) != 0
    }

    pub fn with(self, user: usize) -> Self {
        UserSet(self.0 | (1 << user))
    }

    pub fn without(self, user: usize) -> Self {
        UserSet(self.0 & !(1 << user))
    }

    pub fn is_subset_of(self, other: UserSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k)
            }
        })
    }
}

impl FromIterator<usize> for UserSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(UserSet::EMPTY, UserSet::with)
    }
}

impl fmt::Display for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.iter().join(","))
    }
}

/// Every nonempty subset of `0..k`, ordered by decreasing size and then
/// lexicographically by sorted member list. This is the transmission order of
/// the delivery phase.
pub fn delivery_order(k: usize) -> Vec<UserSet> {
    (1..=k)
        .rev()
        .flat_map(|size| (0..k).combinations(size).map(UserSet::from_iter))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_for_three_users() {
        let order: Vec<String> = delivery_order(3).iter().map(|u| u.to_string()).collect();
        assert_eq!(
            order,
            ["{0,1,2}", "{0,1}", "{0,2}", "{1,2}", "{0}", "{1}", "{2}"]
        );
    }

    #[test]
    fn order_counts() {
        for k in 1..=10 {
            assert_eq!(delivery_order(k).len(), (1 << k) - 1);
        }
    }

    #[test]
    fn membership() {
        let s: UserSet = [0, 3, 5].into_iter().collect();
        assert_eq!(s.len(), 3);
        assert!(s.contains(3) && !s.contains(4));
        assert_eq!(s.without(3).iter().collect::<Vec<_>>(), vec![0, 5]);
        assert!(UserSet::singleton(5).is_subset_of(s));
        assert_eq!(UserSet::full(64).len(), 64);
    }
}
