use std::collections::BTreeSet;

use platoon::netmodel::VehicleId;

/// Ordered pairs `(u, v)` with `u > v` over vehicles `1..=n`: `u` ascending,
/// then `v` ascending. This is the coordinate order of the f-vectors below.
pub fn pair_list(n: usize) -> Vec<(VehicleId, VehicleId)> {
    let mut out = Vec::new();
    for u in 2..=n {
        for v in 1..u {
            out.push((u, v));
        }
    }
    out
}

/// All ways to split `vehicles` into platoons of at most `cap` members.
/// Each block is listed ascending; its first member leads.
pub fn partitions_of(vehicles: &[VehicleId], cap: Option<usize>) -> Vec<Vec<Vec<VehicleId>>> {
    fn grow(
        rest: &[VehicleId],
        cap: Option<usize>,
        blocks: &mut Vec<Vec<VehicleId>>,
        out: &mut Vec<Vec<Vec<VehicleId>>>,
    ) {
        let Some((&v, tail)) = rest.split_first() else {
            out.push(blocks.clone());
            return;
        };
        for b in 0..blocks.len() {
            if cap.is_none_or(|c| blocks[b].len() < c) {
                blocks[b].push(v);
                grow(tail, cap, blocks, out);
                blocks[b].pop();
            }
        }
        blocks.push(vec![v]);
        grow(tail, cap, blocks, out);
        blocks.pop();
    }
    let mut sorted = vehicles.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    grow(&sorted, cap, &mut Vec::new(), &mut out);
    out
}

/// Every 0/1 follow vector over [`pair_list`]`(n)` whose pairs form
/// disjoint stars, each follower pointing at a lower-numbered leader, with
/// at most `lambda` vehicles per star when given.
pub fn enum_star_partitions(n: usize, lambda: Option<usize>) -> BTreeSet<Vec<u8>> {
    let pairs = pair_list(n);
    let vehicles: Vec<VehicleId> = (1..=n).collect();
    partitions_of(&vehicles, lambda)
        .into_iter()
        .map(|blocks| {
            let mut x = vec![0u8; pairs.len()];
            for b in &blocks {
                for &u in &b[1..] {
                    let k = pairs.iter().position(|&p| p == (u, b[0])).expect("pair listed");
                    x[k] = 1;
                }
            }
            x
        })
        .collect()
}
