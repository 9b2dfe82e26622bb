/// Integer point `(x, y, y', w)` of the single-edge routing system.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RdpEdgePoint {
    pub x: Vec<u8>,
    pub y: u8,
    pub y_multi: u8,
    pub w: u8,
}

impl RdpEdgePoint {
    /// Coordinates in the order `x_1..x_n, y, y', w`.
    pub fn coords(&self) -> Vec<i64> {
        let mut c: Vec<i64> = self.x.iter().map(|&v| v as i64).collect();
        c.extend([self.y as i64, self.y_multi as i64, self.w as i64]);
        c
    }
}

fn admissible(x: &[u8], y: u8, y_multi: u8, w: u8) -> bool {
    let s: u32 = x.iter().map(|&v| v as u32).sum();
    s >= 2 * y_multi as u32 && w as u32 + y as u32 <= s && x.iter().all(|&v| v <= y) && y_multi <= y
}

/// All integer points with binary `x`, `y`, `y'` and `w` in `0..=n_v`
/// satisfying: at least two users when `y' = 1`, `w + y <= sum x`,
/// `x_v <= y` and `y' <= y`.
pub fn enum_rdp_edge_points(n_v: usize) -> Vec<RdpEdgePoint> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n_v) {
        let x: Vec<u8> = (0..n_v).map(|k| ((mask >> k) & 1) as u8).collect();
        for y in 0..=1 {
            for y_multi in 0..=1 {
                for w in 0..=n_v as u8 {
                    if admissible(&x, y, y_multi, w) {
                        out.push(RdpEdgePoint {
                            x: x.clone(),
                            y,
                            y_multi,
                            w,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Point count by formula: `1` for the origin, then for each user count
/// `s >= 1`, `C(n, s)` choices of users times `s` values of `w`, doubled
/// when `s >= 2` for the two values of `y'`.
pub fn recount_rdp_edge_points(n_v: usize) -> usize {
    let mut total = 1;
    let mut binom = 1usize;
    for s in 1..=n_v {
        binom = binom * (n_v - s + 1) / s;
        let multi = if s >= 2 { 2 } else { 1 };
        total += binom * s * multi;
    }
    total
}
