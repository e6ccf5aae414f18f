//! Space-time tracks of flow histories and the projected-mass checks.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::coarea::{coarea_rhs, CheckReport};
use crate::error::{Error, Result};
use crate::flow::FlowHistory;
use crate::geometry::{PolyhedralChain, ScalingMap};
use crate::measure::{par_content, restrict_to_slab, MeasureEstimate};

const REL_TOL: f64 = 1e-6;

/// Ruled surface swept by a flow history in `R^{1,n}`, closed off by a cone
/// to the extinction point. Its boundary is the initial curve.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeTrack {
    pub chain: PolyhedralChain,
    pub time_extent: (f64, f64),
    /// Initial curve as a 1-chain in `R^n`.
    pub initial: PolyhedralChain,
    pub mass0: f64,
}

impl SpaceTimeTrack {
    /// Slice dimension.
    pub fn k(&self) -> usize {
        self.initial.dim()
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let l2 = lambda * lambda;
        Ok(Self {
            chain: self.chain.scaled(&ScalingMap::parabolic(lambda)?),
            time_extent: (self.time_extent.0 * l2, self.time_extent.1 * l2),
            initial: self.initial.scaled(&ScalingMap::euclidean(lambda)?),
            mass0: self.mass0 * lambda,
        })
    }
}

/// Two triangles per corresponding edge pair of consecutive snapshots,
/// plus a cone from the last snapshot to its centroid at the extinction
/// time. A single snapshot gives an empty track.
pub fn build_track(history: &FlowHistory) -> Result<SpaceTimeTrack> {
    let first = &history.initial().curve;
    let n = first.dim();
    let initial = first.to_chain()?;
    let mut chain = PolyhedralChain::new(2, n + 1, true);
    let snaps = &history.snapshots;
    let mut end = snaps[0].t;
    if snaps.len() >= 2 {
        let m = first.len();
        let edges = first.num_edges();
        for (j, s) in snaps.iter().enumerate() {
            if s.curve.len() != m || s.curve.dim() != n {
                return Err(Error::CorrespondenceBroken(j.saturating_sub(1), j));
            }
            for i in 0..m {
                let mut p = Vec::with_capacity(n + 1);
                p.push(s.t);
                p.extend_from_slice(s.curve.point(i));
                chain.add_vertex(DVector::from_vec(p))?;
            }
        }
        for j in 0..snaps.len() - 1 {
            let (a, b) = (j * m, (j + 1) * m);
            for i in 0..edges {
                let i1 = (i + 1) % m;
                chain.try_push_simplex(vec![a + i, a + i1, b + i1], 1)?;
                chain.try_push_simplex(vec![a + i, b + i1, b + i], 1)?;
            }
        }
        let last = history.last();
        end = last.t;
        if history.tau > last.t && last.curve.is_closed() {
            let mut apex = vec![history.tau];
            apex.extend(last.curve.centroid());
            let c = chain.add_vertex(DVector::from_vec(apex))?;
            let b = (snaps.len() - 1) * m;
            for i in 0..edges {
                chain.try_push_simplex(vec![b + i, b + (i + 1) % m, c], 1)?;
            }
            end = history.tau;
        }
    } else {
        chain = PolyhedralChain::new(2, n + 1, true);
    }
    Ok(SpaceTimeTrack {
        chain,
        time_extent: (snaps[0].t, end),
        initial,
        mass0: history.mass0(),
    })
}

/// Spatial projection of the track over a time interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    /// Projected chain after exact cancellation of identical simplices.
    /// Simplices flattened by the projection are kept, with zero mass.
    pub chain: PolyhedralChain,
    pub chain_mass: f64,
    /// Mass without cancellation.
    pub swept_mass: f64,
    /// Euclidean mass of the restricted track.
    pub track_mass: f64,
}

pub fn project_spatial(track: &SpaceTimeTrack, a: f64, b: f64) -> Result<Projection> {
    let n = track.chain.ambient() - 1;
    let empty = PolyhedralChain::new(track.chain.dim(), n, false);
    if !(b > a) || track.chain.is_empty() {
        return Ok(Projection {
            chain: empty,
            chain_mass: 0.0,
            swept_mass: 0.0,
            track_mass: 0.0,
        });
    }
    let slab = restrict_to_slab(&track.chain, a, b)?;
    let projected = slab.pushforward(n, false, |v| v.rows(1, n).into_owned())?;
    let chain = projected.dedup_vertices().cancelled();
    Ok(Projection {
        chain_mass: chain.mass(),
        swept_mass: projected.mass(),
        track_mass: slab.mass(),
        chain,
    })
}

/// Projected mass `<= sqrt|B| M0` and track mass `<= (|B| + sqrt|B|) M0`
/// over `B = [a, b]`.
pub fn check_projection_bounds(track: &SpaceTimeTrack, a: f64, b: f64) -> Result<Vec<CheckReport>> {
    let p = project_spatial(track, a, b)?;
    let len = (b - a).max(0.0);
    let rhs3 = len.sqrt() * track.mass0;
    let rhs4 = (len + len.sqrt()) * track.mass0;
    let report = |check: &str, lhs: f64, rhs: f64| CheckReport {
        check: check.to_string(),
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        ladder: Vec::new(),
        verdict: lhs <= rhs * (1.0 + REL_TOL) + 1e-12,
    };
    Ok(vec![
        report("projected_mass", p.swept_mass, rhs3),
        report("track_mass", p.track_mass, rhs4),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricReport {
    pub mass: CheckReport,
    pub chain_mass: f64,
    /// Whether the boundary of the projection equals the initial curve.
    pub boundary_matches: bool,
    pub verdict: bool,
}

/// Swept mass `<= M0^{(k+1)/k} / sqrt(4 pi)` and boundary of the projection
/// equal to the initial curve.
pub fn check_isoperimetric(history: &FlowHistory) -> Result<IsoperimetricReport> {
    let track = build_track(history)?;
    let (a, b) = track.time_extent;
    let p = project_spatial(&track, a, b)?;
    let k = track.k() as f64;
    let rhs = track.mass0.powf((k + 1.0) / k) / (4.0 * PI).sqrt();
    let lhs = p.swept_mass;
    let holds = lhs <= rhs * (1.0 + REL_TOL);
    let boundary_matches = p
        .chain
        .boundary()?
        .dedup_vertices()
        .same_chain(&track.initial.dedup_vertices());
    Ok(IsoperimetricReport {
        mass: CheckReport {
            check: "isoperimetric".into(),
            lhs,
            rhs,
            ratio: lhs / rhs,
            ladder: Vec::new(),
            verdict: holds,
        },
        chain_mass: p.chain_mass,
        boundary_matches,
        verdict: holds && boundary_matches,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackMeasureReport {
    pub mu: MeasureEstimate,
    /// `mu / M0^{(k+2)/k}`
    pub empirical_constant: f64,
    /// `c1 / 16`
    pub bound_constant: f64,
    pub bound_holds: bool,
    /// `c1 (pi/4) int mass(T_t) dt`
    pub route_mu: f64,
    /// `mu / route_mu`
    pub route_ratio: f64,
    pub verdict: bool,
}

/// Parabolic measure of the track against the bound `c1/16 M0^{(k+2)/k}`
/// and against the co-area route `c1 (pi/4) int mass(T_t) dt`, which must
/// agree within 10%.
pub fn check_track_measure(
    track: &SpaceTimeTrack,
    c1: f64,
    ladder: &[f64],
    n_t: usize,
) -> Result<TrackMeasureReport> {
    let k = track.k() as f64;
    let mu = par_content(&track.chain, k + 2.0, ladder)?;
    let scale = track.mass0.powf((k + 2.0) / k);
    let empirical_constant = if scale > 0.0 {
        mu.extrapolated / scale
    } else {
        0.0
    };
    let bound_constant = c1 / 16.0;
    let bound_holds = mu.extrapolated <= bound_constant * scale * (1.0 + REL_TOL);
    let one = |_: &[f64]| 1.0;
    let route_mu = c1 * coarea_rhs(&track.chain, &one, n_t)?;
    let route_ratio = if route_mu > 0.0 {
        mu.extrapolated / route_mu
    } else if mu.extrapolated == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(TrackMeasureReport {
        empirical_constant,
        bound_constant,
        bound_holds,
        route_mu,
        route_ratio,
        verdict: bound_holds && (route_ratio - 1.0).abs() <= 0.1,
        mu,
    })
}

/// Measured exponent `log(mu(eta_lambda T) / mu(T)) / log(lambda)`, with the
/// ladder scaled by `lambda` for the rescaled track.
pub fn scaling_exponent(track: &SpaceTimeTrack, lambda: f64, ladder: &[f64]) -> Result<f64> {
    let s = track.k() as f64 + 2.0;
    let base = par_content(&track.chain, s, ladder)?;
    let scaled_ladder: Vec<f64> = ladder.iter().map(|d| d * lambda).collect();
    let scaled = par_content(&track.scaled(lambda)?.chain, s, &scaled_ladder)?;
    Ok((scaled.extrapolated / base.extrapolated).ln() / lambda.ln())
}
