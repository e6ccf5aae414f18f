use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CheckReport;
use crate::error::{invalid, Error, Result};
use crate::geometry::{kuhn_box, PolyhedralChain};
use crate::measure::{par_content, par_content_weighted, WeightFn};

type Eval = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// Map `R^{1,k} -> R^{1,n}` preserving time, defined on a box.
#[derive(Clone)]
pub struct VerticalMap {
    pub name: String,
    pub k: usize,
    pub n: usize,
    /// Domain box corners in `(t, x)` coordinates.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Tessellation intervals per axis.
    pub cells: usize,
    pub lipschitz_full: f64,
    pub lipschitz_horizontal: f64,
    eval: Eval,
}

impl fmt::Debug for VerticalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VerticalMap")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("n", &self.n)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("lipschitz_full", &self.lipschitz_full)
            .field("lipschitz_horizontal", &self.lipschitz_horizontal)
            .finish()
    }
}

/// Sampled horizontal Jacobians.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalJacobianField {
    pub samples: Vec<(Vec<f64>, f64)>,
}

impl VerticalMap {
    /// `eval(t, x)` returns the full image point `(t', y)`.
    #[allow(clippy::too_many_arguments)]
    pub fn new<F>(
        name: &str,
        k: usize,
        n: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
        lipschitz_full: f64,
        lipschitz_horizontal: f64,
        eval: F,
    ) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if lo.len() != k + 1 || hi.len() != k + 1 {
            return Err(Error::DimensionMismatch {
                expected: k + 1,
                got: lo.len().max(hi.len()),
            });
        }
        if k == 0 || n == 0 || lo.iter().zip(&hi).any(|(a, b)| !(b > a)) {
            return Err(invalid("domain", "need k, n >= 1 and a nondegenerate box"));
        }
        Ok(Self {
            name: name.to_string(),
            k,
            n,
            lo,
            hi,
            cells: 4,
            lipschitz_full,
            lipschitz_horizontal,
            eval: Arc::new(eval),
        })
    }

    pub fn with_cells(mut self, cells: usize) -> Self {
        self.cells = cells.max(1);
        self
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        (self.eval)(p[0], &p[1..])
    }

    pub fn domain(&self) -> Result<PolyhedralChain> {
        kuhn_box(&self.lo, &self.hi, self.cells, true)
    }

    /// The domain tessellation with every vertex pushed through the map.
    pub fn image(&self) -> Result<PolyhedralChain> {
        let n = self.n;
        let dom = self.domain()?;
        dom.map_vertices(n + 1, true, |v| DVector::from_vec(self.apply(v.as_slice())))
    }

    fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let d = self.k + 1;
        let total = per_axis.pow(d as u32);
        (0..total)
            .map(|idx| {
                let mut rest = idx;
                (0..d)
                    .map(|a| {
                        let i = rest % per_axis;
                        rest /= per_axis;
                        self.lo[a] + (self.hi[a] - self.lo[a]) * i as f64 / (per_axis - 1) as f64
                    })
                    .collect()
            })
            .collect()
    }

    /// Checks time preservation and the Lipschitz constants (within 5%) on
    /// `samples` random pairs.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(a, b)| rng.gen_range(*a..*b))
                .collect()
        };
        for _ in 0..samples {
            let p = draw(&mut rng);
            let mut q = draw(&mut rng);
            let (fp, fq) = (self.apply(&p), self.apply(&q));
            if fp.len() != self.n + 1 {
                return Err(Error::DimensionMismatch {
                    expected: self.n + 1,
                    got: fp.len(),
                });
            }
            if (fp[0] - p[0]).abs() > 1e-12 {
                return Err(invalid(
                    "map",
                    format!("{}: map does not preserve time", self.name),
                ));
            }
            if dist(&fp, &fq) > 1.05 * self.lipschitz_full * dist(&p, &q) {
                return Err(invalid(
                    "map",
                    format!("{}: full Lipschitz constant exceeded", self.name),
                ));
            }
            q[0] = p[0];
            let fq = self.apply(&q);
            if dist(&fp, &fq) > 1.05 * self.lipschitz_horizontal * dist(&p, &q) {
                return Err(invalid(
                    "map",
                    format!("{}: horizontal Lipschitz constant exceeded", self.name),
                ));
            }
        }
        Ok(())
    }

    /// Sampled collision test: distinct grid points with images closer than
    /// `1e-9` make the map non-injective.
    pub fn check_injective(&self) -> Result<()> {
        let per_axis = if self.k == 1 { 41 } else { 13 };
        let pts = self.grid(per_axis);
        let imgs: Vec<Vec<f64>> = pts.iter().map(|p| self.apply(p)).collect();
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by(|&a, &b| imgs[a].partial_cmp(&imgs[b]).expect("finite image"));
        for (w, &i) in order.iter().enumerate() {
            for &j in &order[w + 1..] {
                if imgs[j][0] - imgs[i][0] > 1e-9 {
                    break;
                }
                if dist(&imgs[i], &imgs[j]) < 1e-9 && dist(&pts[i], &pts[j]) > 1e-12 {
                    return Err(Error::NotInjective(format!(
                        "{}: {:?} and {:?} share an image",
                        self.name, pts[i], pts[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn jacobian_field(&self, per_axis: usize) -> Result<HorizontalJacobianField> {
        let h = 1e-4 * self.diameter();
        let pts: Vec<Vec<f64>> = self
            .grid(per_axis.max(2))
            .into_iter()
            .filter(|p| (1..=self.k).all(|a| p[a] - h >= self.lo[a] && p[a] + h <= self.hi[a]))
            .collect();
        let samples = pts
            .into_iter()
            .map(|p| {
                let j = horizontal_jacobian(self, &p)?;
                Ok((p, j))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HorizontalJacobianField { samples })
    }

    fn jacobian_unchecked(&self, p: &[f64], h: f64) -> f64 {
        let mut d = DMatrix::zeros(self.n, self.k);
        let mut q = p.to_vec();
        for a in 0..self.k {
            q[a + 1] = p[a + 1] + h;
            let fp = self.apply(&q);
            q[a + 1] = p[a + 1] - h;
            let fm = self.apply(&q);
            q[a + 1] = p[a + 1];
            for i in 0..self.n {
                d[(i, a)] = (fp[i + 1] - fm[i + 1]) / (2.0 * h);
            }
        }
        (d.transpose() * &d).determinant().max(0.0).sqrt()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `sqrt(det(D^T D))` for the spatial differential `D` at fixed time, by
/// central differences with step `1e-4` times the domain diameter.
pub fn horizontal_jacobian(map: &VerticalMap, p: &[f64]) -> Result<f64> {
    if p.len() != map.k + 1 {
        return Err(Error::DimensionMismatch {
            expected: map.k + 1,
            got: p.len(),
        });
    }
    let h = 1e-4 * map.diameter();
    let inside = p[0] >= map.lo[0]
        && p[0] <= map.hi[0]
        && (1..=map.k).all(|a| p[a] - h >= map.lo[a] && p[a] + h <= map.hi[a]);
    if !inside {
        return Err(Error::StencilOutsideDomain(p.to_vec()));
    }
    Ok(map.jacobian_unchecked(p, h))
}

/// `content(F(A)) <= max(m^k, m^{k+2}) content(A)` up to a 2% tolerance.
pub fn volume_estimate_check(map: &VerticalMap, ladder: &[f64]) -> Result<CheckReport> {
    let s = (map.k + 2) as f64;
    let image = par_content(&map.image()?, s, ladder)?;
    let domain = par_content(&map.domain()?, s, ladder)?;
    let m = map.lipschitz_horizontal;
    let factor = m.powi(map.k as i32).max(m.powi(map.k as i32 + 2));
    let lhs = image.extrapolated;
    let rhs = factor * domain.extrapolated;
    Ok(CheckReport {
        check: format!("volume_estimate[{}]", map.name),
        lhs,
        rhs,
        ratio: lhs / rhs,
        ladder: image.ladder,
        verdict: lhs <= rhs * 1.02,
    })
}

/// Area formula for an injective map: domain content weighted by
/// `J^h F * g(F)` against image content weighted by `g`.
pub fn area_formula_check(map: &VerticalMap, g: WeightFn, ladder: &[f64]) -> Result<CheckReport> {
    map.check_injective()?;
    let s = (map.k + 2) as f64;
    let h = 1e-4 * map.diameter();
    let w = |p: &[f64]| map.jacobian_unchecked(p, h) * g(&map.apply(p));
    let lhs = par_content_weighted(&map.domain()?, s, ladder, &w)?;
    let rhs = par_content_weighted(&map.image()?, s, ladder, g)?;
    let ratio = lhs.extrapolated / rhs.extrapolated;
    Ok(CheckReport {
        check: format!("area_formula[{}]", map.name),
        lhs: lhs.extrapolated,
        rhs: rhs.extrapolated,
        ratio,
        ladder: rhs.ladder,
        verdict: (0.95..=1.05).contains(&ratio),
    })
}

pub fn registry_names() -> Vec<&'static str> {
    vec![
        "identity",
        "rotation",
        "dilation",
        "contraction",
        "shear",
        "graph",
        "diag",
        "rotating",
        "fold",
    ]
}

/// Test maps by name; `fold` is deliberately non-injective.
pub fn map_registry(name: &str) -> Result<VerticalMap> {
    let unit1 = (vec![0.0, 0.0], vec![1.0, 1.0]);
    let unit2 = (vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]);
    let map = match name {
        "identity" => {
            VerticalMap::new(name, 1, 1, unit1.0, unit1.1, 1.0, 1.0, |t, x| vec![t, x[0]])
        }
        "rotation" => {
            let (c, s) = (0.6f64.cos(), 0.6f64.sin());
            VerticalMap::new(name, 2, 2, unit2.0, unit2.1, 1.0, 1.0, move |t, x| {
                vec![t, c * x[0] - s * x[1], s * x[0] + c * x[1]]
            })
        }
        "dilation" => VerticalMap::new(name, 1, 1, unit1.0, unit1.1, 2.0, 2.0, |t, x| {
            vec![t, 2.0 * x[0]]
        }),
        "contraction" => VerticalMap::new(name, 1, 1, unit1.0, unit1.1, 1.0, 0.5, |t, x| {
            vec![t, 0.5 * x[0]]
        }),
        "shear" => VerticalMap::new(name, 1, 1, unit1.0, unit1.1, 1.5, 1.0, |t, x| {
            vec![t, x[0] + 0.5 * t]
        }),
        "graph" => VerticalMap::new(
            name,
            1,
            2,
            unit1.0,
            unit1.1,
            3f64.sqrt(),
            2f64.sqrt(),
            |t, x| vec![t, x[0], t * x[0]],
        )
        .map(|m| m.with_cells(8)),
        "diag" => VerticalMap::new(name, 2, 2, unit2.0, unit2.1, 2.0, 2.0, |t, x| {
            vec![t, 2.0 * x[0], 2.0 * x[1]]
        }),
        "rotating" => VerticalMap::new(name, 2, 2, unit2.0, unit2.1, 2.0, 1.0, |t, x| {
            let (c, s) = ((0.5 * t).cos(), (0.5 * t).sin());
            vec![t, c * x[0] - s * x[1], s * x[0] + c * x[1]]
        }),
        "fold" => VerticalMap::new(
            name,
            1,
            1,
            vec![0.0, -1.0],
            vec![1.0, 1.0],
            2.0,
            2.0,
            |t, x| vec![t, x[0] * x[0]],
        ),
        other => Err(Error::UnknownEntry(other.to_string())),
    }?;
    Ok(map)
}
