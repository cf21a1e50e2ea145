//! Marching-squares level curves over a rectangular sweep grid.

use std::collections::BTreeMap;

/// A grid of cell values, `values[ix][iy]` at `(xs[ix], ys[iy])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// A grid square the level curve passes through, by lower-left index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CrossedCell {
    pub ix: usize,
    pub iy: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Contour {
    pub level: f64,
    pub cells: Vec<CrossedCell>,
    /// Each polyline is a list of `(x, y)` vertices on grid edges.
    pub polylines: Vec<Vec<(f64, f64)>>,
}

// Grid edges: horizontal (ix, iy) -> (ix + 1, iy), vertical (ix, iy) -> (ix, iy + 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

impl Grid {
    fn point(&self, edge: Edge, level: f64) -> (f64, f64) {
        let (a, b) = match edge {
            Edge::H(ix, iy) => ((ix, iy), (ix + 1, iy)),
            Edge::V(ix, iy) => ((ix, iy), (ix, iy + 1)),
        };
        let va = self.values[a.0][a.1];
        let vb = self.values[b.0][b.1];
        let t = if vb == va { 0.5 } else { ((level - va) / (vb - va)).clamp(0.0, 1.0) };
        let lerp = |p: f64, q: f64| p + t * (q - p);
        (lerp(self.xs[a.0], self.xs[b.0]), lerp(self.ys[a.1], self.ys[b.1]))
    }
}

/// Traces the `level` curve. Corners at or above `level` count as inside;
/// saddle squares are resolved by the mean of their four corners.
pub fn marching_squares(grid: &Grid, level: f64) -> Contour {
    let nx = grid.xs.len();
    let ny = grid.ys.len();
    let mut contour = Contour {
        level,
        ..Contour::default()
    };
    if nx < 2 || ny < 2 {
        return contour;
    }
    let inside = |ix: usize, iy: usize| grid.values[ix][iy] >= level;
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for ix in 0..nx - 1 {
        for iy in 0..ny - 1 {
            let bl = inside(ix, iy);
            let br = inside(ix + 1, iy);
            let tr = inside(ix + 1, iy + 1);
            let tl = inside(ix, iy + 1);
            let code = (bl as u8) | (br as u8) << 1 | (tr as u8) << 2 | (tl as u8) << 3;
            let bottom = Edge::H(ix, iy);
            let top = Edge::H(ix, iy + 1);
            let left = Edge::V(ix, iy);
            let right = Edge::V(ix + 1, iy);
            let centre_inside = || {
                let v = &grid.values;
                (v[ix][iy] + v[ix + 1][iy] + v[ix + 1][iy + 1] + v[ix][iy + 1]) / 4.0 >= level
            };
            let segs: Vec<(Edge, Edge)> = match code {
                0 | 15 => vec![],
                1 | 14 => vec![(left, bottom)],
                2 | 13 => vec![(bottom, right)],
                3 | 12 => vec![(left, right)],
                4 | 11 => vec![(right, top)],
                6 | 9 => vec![(bottom, top)],
                7 | 8 => vec![(left, top)],
                5 => {
                    if centre_inside() {
                        vec![(left, top), (bottom, right)]
                    } else {
                        vec![(left, bottom), (right, top)]
                    }
                }
                10 => {
                    if centre_inside() {
                        vec![(left, bottom), (right, top)]
                    } else {
                        vec![(left, top), (bottom, right)]
                    }
                }
                _ => unreachable!(),
            };
            if !segs.is_empty() {
                contour.cells.push(CrossedCell { ix, iy });
            }
            segments.extend(segs);
        }
    }
    contour.polylines = join_segments(&segments)
        .into_iter()
        .map(|path| path.into_iter().map(|e| grid.point(e, level)).collect())
        .collect();
    contour
}

fn join_segments(segments: &[(Edge, Edge)]) -> Vec<Vec<Edge>> {
    let mut adjacency: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(k);
        adjacency.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut paths = Vec::new();
    let walk = |start: Edge, used: &mut Vec<bool>| {
        let mut path = vec![start];
        let mut at = start;
        while let Some(&k) = adjacency[&at].iter().find(|&&k| !used[k]) {
            used[k] = true;
            let (a, b) = segments[k];
            at = if a == at { b } else { a };
            path.push(at);
        }
        path
    };
    // open curves start at an end point, so walk those first
    for (edge, segs) in &adjacency {
        if segs.len() == 1 && !used[segs[0]] {
            paths.push(walk(*edge, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            paths.push(walk(segments[k].0, &mut used));
        }
    }
    paths
}
