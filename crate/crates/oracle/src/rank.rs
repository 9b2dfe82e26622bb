/// Affine rank of integer points: one plus the rank of their differences
/// from the first point, computed exactly by fraction-free elimination.
/// Returns 0 for an empty set.
pub fn affine_rank(points: &[Vec<i64>]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let mut rows: Vec<Vec<i128>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(&a, &b)| (a - b) as i128).collect())
        .collect();
    1 + bareiss_rank(&mut rows)
}

fn bareiss_rank(m: &mut [Vec<i128>]) -> usize {
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for col in 0..n_cols {
        let Some(pivot) = (rank..n_rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..n_rows {
            for c in col + 1..n_cols {
                m[r][c] = (m[rank][col] * m[r][c] - m[r][col] * m[rank][c]) / prev;
            }
            m[r][col] = 0;
        }
        prev = m[rank][col];
        rank += 1;
        if rank == n_rows {
            break;
        }
    }
    rank
}
