use crate::netmodel::SavingsParams;

/// Fuel burned by a platoon of `l` vehicles on an edge of base cost `c`:
/// one leader saving `sigma_l` and `l - 1` followers saving `sigma_f`.
pub fn c_plat(l: usize, c: f64, p: &SavingsParams) -> f64 {
    match l {
        0 | 1 => l as f64 * c,
        _ => (1.0 - p.sigma_l) * c + (1.0 - p.sigma_f) * (l as f64 - 1.0) * c,
    }
}

/// Like [`c_plat`], but a lone vehicle is charged as if it led a platoon.
pub fn c_plat_tilde(l: usize, c: f64, p: &SavingsParams) -> f64 {
    if l == 1 {
        (1.0 - p.sigma_l) * c
    } else {
        c_plat(l, c, p)
    }
}
