use nalgebra::DVector;

use super::chain::PolyhedralChain;
use crate::error::{invalid, Result};

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, sign) in permutations(n - 1) {
        // insert n-1 at every position; each shift to the left is one transposition
        for pos in (0..=p.len()).rev() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let moves = (p.len() - pos) as i64;
            out.push((q, if moves % 2 == 0 { sign } else { -sign }));
        }
    }
    out
}

/// Positively oriented Kuhn triangulation of the box `[lo, hi]` split into
/// `cells` intervals per axis (`D!` simplices per cell).
pub fn kuhn_box(lo: &[f64], hi: &[f64], cells: usize, time_flag: bool) -> Result<PolyhedralChain> {
    let d = lo.len();
    if d == 0 || hi.len() != d || cells == 0 {
        return Err(invalid(
            "box",
            "need matching nonempty corners and cells >= 1",
        ));
    }
    if lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
        return Err(invalid("box", "upper corner must exceed lower corner"));
    }
    let m = cells + 1;
    let mut chain = PolyhedralChain::new(d, d, time_flag);
    let total = m.pow(d as u32);
    for idx in 0..total {
        let mut rest = idx;
        let coords: Vec<f64> = (0..d)
            .map(|a| {
                let i = rest % m;
                rest /= m;
                lo[a] + (hi[a] - lo[a]) * i as f64 / cells as f64
            })
            .collect();
        chain.add_vertex(DVector::from_vec(coords))?;
    }
    let stride: Vec<usize> = (0..d).map(|a| m.pow(a as u32)).collect();
    let perms = permutations(d);
    for cell in 0..cells.pow(d as u32) {
        let mut rest = cell;
        let base: usize = (0..d)
            .map(|a| {
                let i = rest % cells;
                rest /= cells;
                i * stride[a]
            })
            .sum();
        for (p, sign) in &perms {
            let mut v = base;
            let mut verts = vec![v];
            for &axis in p {
                v += stride[axis];
                verts.push(v);
            }
            chain.push_simplex(verts, *sign)?;
        }
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kuhn_box_volume_and_boundary() {
        let c = kuhn_box(&[0.0, 0.0, 0.0], &[1.0, 2.0, 0.5], 2, true).unwrap();
        assert_eq!(c.len(), 8 * 6);
        assert!((c.mass() - 1.0).abs() < 1e-12);
        // interior faces cancel: boundary area equals the box surface
        let b = c.boundary().unwrap();
        assert!((b.mass() - 2.0 * (2.0 + 0.5 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|x| x.1).sum::<i64>(), 0);
    }
}
