//! Line-oriented text dumps of placements and plans, used by golden-file
//! tests. Every segment line reads `user content holders indices`, with
//! holders written as `{a,b}` and indices comma-separated (`-` when empty).

use std::fmt::Write;

use itertools::Itertools;

use super::{DeliveryPlan, PlacementState};

fn indices(list: &[u32]) -> String {
    if list.is_empty() {
        "-".to_string()
    } else {
        list.iter().join(",")
    }
}

/// Each user's cache, split into exact-pattern segments.
pub fn dump_placement(placement: &PlacementState) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# placement K={} N={} F={} quota={}",
        placement.num_users(),
        placement.num_contents(),
        placement.content_size(),
        placement.quota()
    )
    .unwrap();
    for content in 0..placement.num_contents() {
        let holders = placement.holder_sets(content);
        for user in 0..placement.num_users() {
            let groups = placement
                .cached(user, content)
                .iter()
                .map(|&i| (holders[i as usize], i))
                .into_group_map();
            for (set, list) in groups.into_iter().sorted_by_key(|(s, _)| s.mask()) {
                writeln!(out, "{user} {content} {set} {}", indices(&list)).unwrap();
            }
        }
    }
    out
}

/// Transmission headers followed by one line per carried segment.
pub fn dump_plan(plan: &DeliveryPlan) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# plan K={} transmissions={} bits={}",
        plan.num_users,
        plan.transmissions.len(),
        plan.total_bits()
    )
    .unwrap();
    for (i, tx) in plan.transmissions.iter().enumerate() {
        let payload: String = tx.payload.iter().map(|b| if *b { '1' } else { '0' }).collect();
        writeln!(
            out,
            "tx {i} receivers={} size={} payload={}",
            tx.receivers,
            tx.realized_size(),
            if payload.is_empty() { "-" } else { &payload }
        )
        .unwrap();
        for seg in &tx.segments {
            writeln!(
                out,
                "{} {} {} {}",
                seg.user,
                seg.content,
                seg.holders,
                indices(&seg.indices)
            )
            .unwrap();
        }
    }
    out
}
