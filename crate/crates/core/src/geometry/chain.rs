use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::point::ScalingMap;
use crate::error::{invalid, Error, Result};

/// Relative volume threshold below which a simplex counts as degenerate.
const DEGENERACY_TOL: f64 = 1e-13;

/// One oriented simplex of a chain. `mult` is positive; the orientation
/// relative to the listed vertex order is carried by `sign`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simplex {
    pub verts: Vec<usize>,
    pub mult: i64,
    pub sign: i8,
}

impl Simplex {
    /// Signed integer coefficient `sign * mult`.
    pub fn coefficient(&self) -> i64 {
        self.sign as i64 * self.mult
    }
}

/// Finite oriented simplicial `k`-chain with integer multiplicities.
///
/// Space-time chains set `time_flag`; coordinate 0 of every vertex is then
/// the time coordinate and the remaining `ambient - 1` are spatial.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralChain {
    dim: usize,
    ambient: usize,
    time_flag: bool,
    vertices: Vec<DVector<f64>>,
    simplices: Vec<Simplex>,
}

/// Euclidean `k`-volume of the simplex spanned by `points` (Gram determinant).
pub fn simplex_volume(points: &[&DVector<f64>]) -> f64 {
    let k = points.len().saturating_sub(1);
    if k == 0 {
        return 1.0;
    }
    let p0 = points[0];
    let n = p0.len();
    let mut edges = DMatrix::zeros(n, k);
    for (j, p) in points[1..].iter().enumerate() {
        edges.set_column(j, &(*p - p0));
    }
    if k == 1 {
        return edges.column(0).norm();
    }
    let gram = edges.transpose() * &edges;
    let det = gram.determinant().max(0.0);
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    det.sqrt() / fact
}

fn max_edge(points: &[&DVector<f64>]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            m = m.max((points[i] - points[j]).norm());
        }
    }
    m
}

/// Sorts `verts` in place and returns the parity of the permutation (+1/-1).
fn has_repeat(sorted: &[usize]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1])
}

fn sort_with_parity(verts: &mut [usize]) -> i64 {
    let mut parity = 1;
    for i in 1..verts.len() {
        let mut j = i;
        while j > 0 && verts[j - 1] > verts[j] {
            verts.swap(j - 1, j);
            parity = -parity;
            j -= 1;
        }
    }
    parity
}

impl PolyhedralChain {
    pub fn new(dim: usize, ambient: usize, time_flag: bool) -> Self {
        Self {
            dim,
            ambient,
            time_flag,
            vertices: Vec::new(),
            simplices: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn time_flag(&self) -> bool {
        self.time_flag
    }

    /// Number of spatial coordinates.
    pub fn spatial_dim(&self) -> usize {
        if self.time_flag {
            self.ambient - 1
        } else {
            self.ambient
        }
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn add_vertex(&mut self, coords: impl Into<DVector<f64>>) -> Result<usize> {
        let v: DVector<f64> = coords.into();
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(invalid("vertex", "coordinates must be finite"));
        }
        self.vertices.push(v);
        Ok(self.vertices.len() - 1)
    }

    pub fn add_vertex_slice(&mut self, coords: &[f64]) -> Result<usize> {
        self.add_vertex(DVector::from_column_slice(coords))
    }

    /// Adds an oriented simplex with signed coefficient `coef`.
    /// Rejects zero coefficients and degenerate simplices.
    pub fn push_simplex(&mut self, verts: Vec<usize>, coef: i64) -> Result<()> {
        let pts: Vec<DVector<f64>> = verts
            .iter()
            .filter_map(|&i| self.vertices.get(i).cloned())
            .collect();
        if !self.try_push_simplex(verts, coef)? {
            let refs: Vec<&DVector<f64>> = pts.iter().collect();
            return Err(Error::DegenerateSimplex {
                volume: simplex_volume(&refs),
            });
        }
        Ok(())
    }

    /// Like [`push_simplex`](Self::push_simplex) but silently skips
    /// degenerate simplices, returning whether one was added.
    pub fn try_push_simplex(&mut self, verts: Vec<usize>, coef: i64) -> Result<bool> {
        if verts.len() != self.dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.dim + 1,
                got: verts.len(),
            });
        }
        if coef == 0 {
            return Err(invalid("mult", "multiplicity must be nonzero"));
        }
        if let Some(&bad) = verts.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(invalid("verts", format!("vertex index {bad} out of range")));
        }
        if self.dim > 0 {
            let pts: Vec<&DVector<f64>> = verts.iter().map(|&i| &self.vertices[i]).collect();
            let scale = max_edge(&pts);
            let vol = simplex_volume(&pts);
            if scale == 0.0 || vol <= DEGENERACY_TOL * scale.powi(self.dim as i32) {
                return Ok(false);
            }
        }
        self.simplices.push(Simplex {
            verts,
            mult: coef.abs(),
            sign: if coef > 0 { 1 } else { -1 },
        });
        Ok(true)
    }

    pub fn simplex_points(&self, s: &Simplex) -> Vec<&DVector<f64>> {
        s.verts.iter().map(|&i| &self.vertices[i]).collect()
    }

    /// Mass: sum of `|mult|` times Euclidean `k`-volume.
    pub fn mass(&self) -> f64 {
        self.simplices
            .iter()
            .map(|s| s.mult as f64 * simplex_volume(&self.simplex_points(s)))
            .sum()
    }

    /// Simplicial boundary with cancellation of opposite faces.
    ///
    /// Simplices with a repeated vertex index are zero and are dropped.
    /// Faces are matched on sorted vertex-index tuples, so chains whose
    /// coincident vertices carry different indices should be passed through
    /// [`dedup_vertices`](Self::dedup_vertices) first.
    pub fn boundary(&self) -> Result<Self> {
        if self.dim == 0 {
            return Err(invalid("dim", "boundary needs dim >= 1"));
        }
        let mut terms: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for s in &self.simplices {
            let c = s.coefficient();
            for skip in 0..s.verts.len() {
                let mut face: Vec<usize> = s
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let parity = sort_with_parity(&mut face);
                let sign = if skip % 2 == 0 { 1 } else { -1 };
                *terms.entry(face).or_insert(0) += sign * parity * c;
            }
        }
        let mut out = Self {
            dim: self.dim - 1,
            ambient: self.ambient,
            time_flag: self.time_flag,
            vertices: self.vertices.clone(),
            simplices: Vec::new(),
        };
        for (verts, c) in terms {
            if c != 0 && !has_repeat(&verts) {
                out.simplices.push(Simplex {
                    verts,
                    mult: c.abs(),
                    sign: c.signum() as i8,
                });
            }
        }
        Ok(out)
    }

    /// Merges vertices with bit-identical coordinates.
    pub fn dedup_vertices(&self) -> Self {
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut remap = Vec::with_capacity(self.vertices.len());
        let mut vertices = Vec::new();
        for v in &self.vertices {
            let key: Vec<u64> = v.iter().map(|c| (c + 0.0).to_bits()).collect();
            let id = *index.entry(key).or_insert_with(|| {
                vertices.push(v.clone());
                vertices.len() - 1
            });
            remap.push(id);
        }
        let simplices = self
            .simplices
            .iter()
            .map(|s| Simplex {
                verts: s.verts.iter().map(|&i| remap[i]).collect(),
                mult: s.mult,
                sign: s.sign,
            })
            .collect();
        Self {
            vertices,
            simplices,
            ..self.clone_shape()
        }
    }

    fn clone_shape(&self) -> Self {
        Self::new(self.dim, self.ambient, self.time_flag)
    }

    /// Canonical signed coefficients keyed by sorted vertex coordinates.
    fn terms_by_coords(&self) -> BTreeMap<Vec<Vec<u64>>, i64> {
        let mut terms: BTreeMap<Vec<Vec<u64>>, i64> = BTreeMap::new();
        for s in &self.simplices {
            let keys: Vec<Vec<u64>> = s
                .verts
                .iter()
                .map(|&i| {
                    self.vertices[i]
                        .iter()
                        .map(|c| (c + 0.0).to_bits())
                        .collect()
                })
                .collect();
            let mut order: Vec<usize> = (0..keys.len()).collect();
            order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
            let mut perm = order.clone();
            let parity = sort_with_parity(&mut perm);
            let sorted: Vec<Vec<u64>> = order.iter().map(|&i| keys[i].clone()).collect();
            *terms.entry(sorted).or_insert(0) += parity * s.coefficient();
        }
        terms.retain(|_, c| *c != 0);
        terms
    }

    /// Equality as chains: same simplices with the same signed
    /// multiplicities, vertices compared by exact coordinates.
    pub fn same_chain(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.ambient == other.ambient
            && self.terms_by_coords() == other.terms_by_coords()
    }

    /// `self - other` as a chain (vertices concatenated, terms cancelled).
    pub fn minus(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        let offset = out.vertices.len();
        out.vertices.extend(other.vertices.iter().cloned());
        for s in &other.simplices {
            out.simplices.push(Simplex {
                verts: s.verts.iter().map(|&i| i + offset).collect(),
                mult: s.mult,
                sign: -s.sign,
            });
        }
        Ok(out.dedup_vertices().cancelled())
    }

    /// Combines simplices on identical vertex sets, dropping zero terms and
    /// simplices with a repeated vertex index.
    pub fn cancelled(&self) -> Self {
        let mut terms: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for s in &self.simplices {
            let mut v = s.verts.clone();
            let parity = sort_with_parity(&mut v);
            *terms.entry(v).or_insert(0) += parity * s.coefficient();
        }
        let mut out = Self {
            vertices: self.vertices.clone(),
            ..self.clone_shape()
        };
        for (verts, c) in terms {
            if c != 0 && !has_repeat(&verts) {
                out.simplices.push(Simplex {
                    verts,
                    mult: c.abs(),
                    sign: c.signum() as i8,
                });
            }
        }
        out
    }

    /// Pushes the chain forward under a vertex map, keeping simplices whose
    /// image stays non-degenerate.
    pub fn map_vertices<F>(&self, ambient: usize, time_flag: bool, f: F) -> Result<Self>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let mut out = Self::new(self.dim, ambient, time_flag);
        for v in &self.vertices {
            out.add_vertex(f(v))?;
        }
        for s in &self.simplices {
            out.try_push_simplex(s.verts.clone(), s.coefficient())?;
        }
        Ok(out)
    }

    /// Pushforward under a vertex map that keeps degenerate images, so the
    /// boundary of the result is the image of the boundary.
    pub fn pushforward<F>(&self, ambient: usize, time_flag: bool, f: F) -> Result<Self>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let mut out = Self::new(self.dim, ambient, time_flag);
        for v in &self.vertices {
            out.add_vertex(f(v))?;
        }
        out.simplices = self.simplices.clone();
        Ok(out)
    }

    /// Applies a scaling map; for spatial chains only the spatial factor acts.
    pub fn scaled(&self, map: &ScalingMap) -> Self {
        let (ft, fx) = map.factors();
        let time_flag = self.time_flag;
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let mut w = v * fx;
                if time_flag {
                    w[0] = v[0] * ft;
                }
                w
            })
            .collect();
        Self {
            vertices,
            simplices: self.simplices.clone(),
            ..self.clone_shape()
        }
    }

    /// Closed time range spanned by the vertices used by some simplex.
    pub fn time_extent(&self) -> Option<(f64, f64)> {
        if !self.time_flag {
            return None;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.simplices {
            for &i in &s.verts {
                lo = lo.min(self.vertices[i][0]);
                hi = hi.max(self.vertices[i][0]);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Euclidean diameter of the vertex set (bounding-box diagonal is an upper bound).
    pub fn bounding_box(&self) -> Option<(DVector<f64>, DVector<f64>)> {
        let first = self.vertices.first()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for v in &self.vertices {
            for i in 0..v.len() {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        Some((lo, hi))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ChainDto::from(self)).expect("chain serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let dto: ChainDto = serde_json::from_value(value.clone())?;
        dto.try_into()
    }
}

/// Wire format `{dim, ambient, time_flag, vertices, simplices: [{verts, mult, sign}]}`.
#[derive(Serialize, Deserialize)]
struct ChainDto {
    dim: usize,
    ambient: usize,
    time_flag: bool,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Simplex>,
}

impl From<&PolyhedralChain> for ChainDto {
    fn from(c: &PolyhedralChain) -> Self {
        Self {
            dim: c.dim,
            ambient: c.ambient,
            time_flag: c.time_flag,
            vertices: c
                .vertices
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect(),
            simplices: c.simplices.clone(),
        }
    }
}

impl TryFrom<ChainDto> for PolyhedralChain {
    type Error = Error;

    fn try_from(dto: ChainDto) -> Result<Self> {
        if dto.time_flag && dto.ambient == 0 {
            return Err(invalid("ambient", "time-flagged chain needs ambient >= 1"));
        }
        let mut c = PolyhedralChain::new(dto.dim, dto.ambient, dto.time_flag);
        for v in dto.vertices {
            c.add_vertex(DVector::from_vec(v))?;
        }
        for s in dto.simplices {
            if s.sign != 1 && s.sign != -1 {
                return Err(invalid("sign", "must be +1 or -1"));
            }
            c.push_simplex(s.verts, s.sign as i64 * s.mult)?;
        }
        Ok(c)
    }
}
