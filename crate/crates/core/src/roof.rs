//! Edge-pair means as volumes under a lower envelope of planes.
//!
//! For `p` at distance `x` from the first endpoint of `e` and `q` at distance
//! `y` from the first endpoint of `f`, `d(p, q)` is the minimum of four affine
//! functions, one per pair of endpoints. The rectangle `[0,|e|] × [0,|f|]` is
//! cut into the convex regions where each plane is lowest, and each region's
//! volume is integrated exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Endpoint, WeightedGraph};
use crate::paths::DistanceMatrix;
use crate::sum::NeumaierSum;

/// `z = slope_x·x + slope_y·y + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plane {
    pub slope_x: f64,
    pub slope_y: f64,
    pub offset: f64,
    /// Endpoints of `e` and `f` the plane routes through; `None` for the
    /// same-edge roof.
    pub corner: Option<(Endpoint, Endpoint)>,
}

impl Plane {
    #[inline]
    pub fn at(&self, x: f64, y: f64) -> f64 {
        self.slope_x * x + self.slope_y * y + self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    /// Index into [`RoofDiagram::planes`].
    pub plane: usize,
    /// Counter-clockwise vertices in physical coordinates.
    pub polygon: Vec<[f64; 2]>,
    pub area: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoofDiagram {
    pub first: EdgeId,
    pub second: EdgeId,
    pub width: f64,
    pub height: f64,
    pub planes: Vec<Plane>,
    pub regions: Vec<Region>,
}

impl RoofDiagram {
    pub fn area(&self) -> f64 {
        self.regions.iter().map(|r| r.area).sum()
    }

    /// Plane index minimal at `(x, y)`, lowest index on ties.
    pub fn lowest_plane(&self, x: f64, y: f64) -> usize {
        let mut best = 0;
        for (i, p) in self.planes.iter().enumerate().skip(1) {
            if p.at(x, y) < self.planes[best].at(x, y) {
                best = i;
            }
        }
        best
    }
}

const AREA_EPS: f64 = 1e-12;

fn corner_planes(g: &WeightedGraph, dm: &DistanceMatrix, e: EdgeId, f: EdgeId) -> Vec<Plane> {
    let (ee, ff) = (g.edge(e), g.edge(f));
    let (w, h) = (ee.length, ff.length);
    let mut planes = Vec::with_capacity(4);
    for pe in [Endpoint::First, Endpoint::Second] {
        for pf in [Endpoint::First, Endpoint::Second] {
            let weight = dm.get(pe.of(ee), pf.of(ff));
            let (slope_x, off_x) = match pe {
                Endpoint::First => (1.0, 0.0),
                Endpoint::Second => (-1.0, w),
            };
            let (slope_y, off_y) = match pf {
                Endpoint::First => (1.0, 0.0),
                Endpoint::Second => (-1.0, h),
            };
            planes.push(Plane {
                slope_x,
                slope_y,
                offset: off_x + off_y + weight,
                corner: Some((pe, pf)),
            });
        }
    }
    planes
}

/// Drops planes that are nowhere strictly lowest. Affine functions on a
/// rectangle are compared at its corners; among coincident planes the first
/// one is kept.
fn prune_dominated(planes: Vec<Plane>, w: f64, h: f64) -> Vec<Plane> {
    let corners = [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)];
    let scale = planes
        .iter()
        .flat_map(|p| corners.map(|(x, y)| p.at(x, y).abs()))
        .fold(w.max(h), f64::max);
    let slack = 1e-12 * scale;
    let dominates = |j: &Plane, i: &Plane| corners.iter().all(|&(x, y)| j.at(x, y) <= i.at(x, y) + slack);
    let strictly = |j: &Plane, i: &Plane| corners.iter().any(|&(x, y)| j.at(x, y) < i.at(x, y) - slack);
    planes
        .iter()
        .enumerate()
        .filter(|&(i, pi)| {
            !planes.iter().enumerate().any(|(j, pj)| {
                j != i && dominates(pj, pi) && (j < i || strictly(pj, pi))
            })
        })
        .map(|(_, p)| *p)
        .collect()
}

/// Keeps the part of a convex polygon where `a·x + b·y + c ≤ 0`.
fn clip(polygon: &[[f64; 2]], a: f64, b: f64, c: f64) -> Vec<[f64; 2]> {
    let side = |p: &[f64; 2]| a * p[0] + b * p[1] + c;
    let mut out = Vec::with_capacity(polygon.len() + 1);
    for (i, cur) in polygon.iter().enumerate() {
        let next = &polygon[(i + 1) % polygon.len()];
        let (sc, sn) = (side(cur), side(next));
        if sc <= 0.0 {
            out.push(*cur);
        }
        if (sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0) {
            let t = sc / (sc - sn);
            out.push([cur[0] + t * (next[0] - cur[0]), cur[1] + t * (next[1] - cur[1])]);
        }
    }
    out
}

/// Signed area and centroid by the shoelace formula.
fn area_centroid(polygon: &[[f64; 2]]) -> (f64, [f64; 2]) {
    if polygon.len() < 3 {
        return (0.0, [0.0, 0.0]);
    }
    let origin = polygon[0];
    let (mut area2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for w in polygon[1..].windows(2) {
        let (p, q) = (
            [w[0][0] - origin[0], w[0][1] - origin[1]],
            [w[1][0] - origin[0], w[1][1] - origin[1]],
        );
        let cross = p[0] * q[1] - q[0] * p[1];
        area2 += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    if area2 == 0.0 {
        return (0.0, origin);
    }
    let area = area2 / 2.0;
    (
        area,
        [origin[0] + cx / (3.0 * area2), origin[1] + cy / (3.0 * area2)],
    )
}

fn regions(planes: &[Plane], w: f64, h: f64) -> Vec<Region> {
    let rect = vec![[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]];
    let min_area = AREA_EPS * w * h;
    let mut out = Vec::new();
    for (i, pi) in planes.iter().enumerate() {
        let mut poly = rect.clone();
        for (j, pj) in planes.iter().enumerate() {
            if i == j || poly.is_empty() {
                continue;
            }
            poly = clip(
                &poly,
                pi.slope_x - pj.slope_x,
                pi.slope_y - pj.slope_y,
                pi.offset - pj.offset,
            );
        }
        let (area, centroid) = area_centroid(&poly);
        if area < min_area {
            continue;
        }
        out.push(Region {
            plane: i,
            volume: area * pi.at(centroid[0], centroid[1]),
            polygon: poly,
            area,
        });
    }
    out
}

/// `|x - y|` is an upper envelope, so its two triangles are laid out directly.
fn same_edge_roof(w: f64) -> (Vec<Plane>, Vec<Region>) {
    let plane = |slope_x: f64| Plane {
        slope_x,
        slope_y: -slope_x,
        offset: 0.0,
        corner: None,
    };
    let planes = vec![plane(-1.0), plane(1.0)];
    let triangles = [
        vec![[0.0, 0.0], [w, w], [0.0, w]],
        vec![[0.0, 0.0], [w, 0.0], [w, w]],
    ];
    let regions = triangles
        .into_iter()
        .enumerate()
        .map(|(i, polygon)| {
            let (area, c) = area_centroid(&polygon);
            Region {
                plane: i,
                volume: area * planes[i].at(c[0], c[1]),
                polygon,
                area,
            }
        })
        .collect();
    (planes, regions)
}

/// Builds the roof diagram of `e` against `f`. For `e == f` the roof is
/// `|x - y|` over the square.
pub fn build_roof(g: &WeightedGraph, dm: &DistanceMatrix, e: EdgeId, f: EdgeId) -> RoofDiagram {
    let (w, h) = (g.edge(e).length, g.edge(f).length);
    let (planes, regions) = if e == f {
        same_edge_roof(w)
    } else {
        let planes = prune_dominated(corner_planes(g, dm, e, f), w, h);
        let regions = regions(&planes, w, h);
        (planes, regions)
    };
    RoofDiagram {
        first: e,
        second: f,
        width: w,
        height: h,
        planes,
        regions,
    }
}

/// Total volume over base area.
pub fn roof_mean(roof: &RoofDiagram) -> f64 {
    let volume: NeumaierSum = roof.regions.iter().map(|r| r.volume).collect();
    volume.value() / (roof.width * roof.height)
}

/// The same mean computed by fanning each region into triangles and summing
/// truncated-prism volumes (base area times mean corner height).
pub fn roof_mean_prisms(roof: &RoofDiagram) -> f64 {
    let mut volume = NeumaierSum::new();
    for r in &roof.regions {
        let plane = &roof.planes[r.plane];
        let p0 = r.polygon[0];
        for w in r.polygon[1..].windows(2) {
            let (p1, p2) = (w[0], w[1]);
            let area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
            let height = (plane.at(p0[0], p0[1]) + plane.at(p1[0], p1[1]) + plane.at(p2[0], p2[1])) / 3.0;
            volume.add(area * height);
        }
    }
    volume.value() / (roof.width * roof.height)
}

pub fn roof_pair_mean(g: &WeightedGraph, dm: &DistanceMatrix, e: EdgeId, f: EdgeId) -> f64 {
    let (a, b) = (e.min(f), e.max(f));
    roof_mean(&build_roof(g, dm, a, b))
}

/// Mean of `|x - y|` over `[0, length]²`.
pub fn same_edge_mean(length: f64) -> Result<f64> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "edge length must be positive, got {length}"
        )));
    }
    Ok(length / 3.0)
}
