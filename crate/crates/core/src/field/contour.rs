//! Marching-squares level curves with chain connectivity.
//!
//! A node is "above" when its value is strictly greater than the level. Each
//! cell contributes up to two segments whose vertices sit on cell edges at
//! linearly interpolated positions; saddle cells are split according to the
//! mean of their four corners. Segments sharing an edge crossing are chained
//! into polylines, one polyline per connected component.

use super::grid::GridField;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

impl Polyline {
    /// Total length, including the closing segment of closed curves.
    pub fn length(&self) -> f64 {
        let mut len: f64 = self.points.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum();
        if self.closed && self.points.len() > 1 {
            let (p, q) = (self.points[0], self.points[self.points.len() - 1]);
            len += (p[0] - q[0]).hypot(p[1] - q[1]);
        }
        len
    }

    /// Segments of the polyline, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n.saturating_sub(1) };
        (0..count).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourSet {
    pub level: f64,
    pub polylines: Vec<Polyline>,
    pub connected_component_count: usize,
}

impl ContourSet {
    pub fn all_closed(&self) -> bool {
        self.polylines.iter().all(|p| p.closed)
    }

    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }
}

/// Edge identifiers: horizontal edges `(i,j)-(i+1,j)` first, then vertical
/// edges `(i,j)-(i,j+1)`.
struct EdgeIndex {
    n: usize,
}

impl EdgeIndex {
    fn horizontal(&self, i: usize, j: usize) -> usize {
        j * (self.n - 1) + i
    }

    fn vertical(&self, i: usize, j: usize) -> usize {
        self.n * (self.n - 1) + i * (self.n - 1) + j
    }

    fn count(&self) -> usize {
        2 * self.n * (self.n - 1)
    }

    fn endpoints(&self, id: usize) -> ((usize, usize), (usize, usize)) {
        let h = self.n * (self.n - 1);
        if id < h {
            let (j, i) = (id / (self.n - 1), id % (self.n - 1));
            ((i, j), (i + 1, j))
        } else {
            let id = id - h;
            let (i, j) = (id / (self.n - 1), id % (self.n - 1));
            ((i, j), (i, j + 1))
        }
    }
}

pub fn extract_contours(f: &GridField, level: f64) -> ContourSet {
    let n = f.n();
    let edges = EdgeIndex { n };
    let above = |i: usize, j: usize| f.get(i, j) > level;

    // Each edge crossing joins at most two segments.
    let mut links: Vec<[usize; 2]> = vec![[usize::MAX; 2]; edges.count()];
    let mut segments: Vec<[usize; 2]> = Vec::new();
    let mut push = |a: usize, b: usize, links: &mut Vec<[usize; 2]>| {
        let s = segments.len();
        segments.push([a, b]);
        for e in [a, b] {
            let slot = &mut links[e];
            if slot[0] == usize::MAX {
                slot[0] = s;
            } else {
                slot[1] = s;
            }
        }
    };

    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let code = (above(i, j) as u8) | (above(i + 1, j) as u8) << 1 | (above(i + 1, j + 1) as u8) << 2 | (above(i, j + 1) as u8) << 3;
            if code == 0 || code == 15 {
                continue;
            }
            let bottom = edges.horizontal(i, j);
            let right = edges.vertical(i + 1, j);
            let top = edges.horizontal(i, j + 1);
            let left = edges.vertical(i, j);
            let center_above = 0.25 * (f.get(i, j) + f.get(i + 1, j) + f.get(i + 1, j + 1) + f.get(i, j + 1)) > level;
            match code {
                1 | 14 => push(left, bottom, &mut links),
                2 | 13 => push(bottom, right, &mut links),
                3 | 12 => push(left, right, &mut links),
                4 | 11 => push(right, top, &mut links),
                6 | 9 => push(bottom, top, &mut links),
                7 | 8 => push(left, top, &mut links),
                5 => {
                    // corners 0 and 2 above
                    if center_above {
                        push(bottom, right, &mut links);
                        push(top, left, &mut links);
                    } else {
                        push(left, bottom, &mut links);
                        push(right, top, &mut links);
                    }
                }
                10 => {
                    // corners 1 and 3 above
                    if center_above {
                        push(left, bottom, &mut links);
                        push(right, top, &mut links);
                    } else {
                        push(bottom, right, &mut links);
                        push(top, left, &mut links);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    let vertex = |e: usize| -> [f64; 2] {
        let ((i0, j0), (i1, j1)) = edges.endpoints(e);
        let (v0, v1) = (f.get(i0, j0), f.get(i1, j1));
        let s = (level - v0) / (v1 - v0);
        let (x0, y0) = (f.coord(i0), f.coord(j0));
        let (x1, y1) = (f.coord(i1), f.coord(j1));
        [x0 + s * (x1 - x0), y0 + s * (y1 - y0)]
    };

    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();

    let walk = |start_seg: usize, start_edge: usize, used: &mut Vec<bool>| -> Polyline {
        let mut points = vec![vertex(start_edge)];
        let mut seg = start_seg;
        let mut from = start_edge;
        loop {
            used[seg] = true;
            let [a, b] = segments[seg];
            let to = if a == from { b } else { a };
            let [s0, s1] = links[to];
            let next = if s0 == seg { s1 } else { s0 };
            if to == start_edge {
                return Polyline { points, closed: true };
            }
            points.push(vertex(to));
            if next == usize::MAX || used[next] {
                return Polyline { points, closed: false };
            }
            seg = next;
            from = to;
        }
    };

    // Open chains start at edges with a single segment (the grid boundary).
    for (e, slot) in links.iter().enumerate() {
        if slot[0] != usize::MAX && slot[1] == usize::MAX && !used[slot[0]] {
            polylines.push(walk(slot[0], e, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            let start = segments[s][0];
            polylines.push(walk(s, start, &mut used));
        }
    }

    ContourSet { level, connected_component_count: polylines.len(), polylines }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paraboloid_level_is_one_circle() {
        let f = GridField::from_fn(1.0, 65, |x, y| 1.0 - x * x - y * y).unwrap();
        let c = extract_contours(&f, 0.75);
        assert_eq!(c.connected_component_count, 1);
        assert!(c.all_closed());
        let h = f.h();
        for p in &c.polylines[0].points {
            assert!((p[0].hypot(p[1]) - 0.5).abs() <= h);
        }
        let len = c.polylines[0].length();
        assert!((len - std::f64::consts::PI).abs() < 0.01, "{len}");
    }

    #[test]
    fn above_max_is_empty() {
        let f = GridField::from_fn(1.0, 33, |x, y| 1.0 - x * x - y * y).unwrap();
        assert!(extract_contours(&f, 2.0).is_empty());
    }

    #[test]
    fn two_bumps_two_components() {
        let f = GridField::from_fn(4.0, 129, |x, y| (-((x - 2.0).powi(2) + y * y)).exp() + (-((x + 2.0).powi(2) + y * y)).exp()).unwrap();
        let c = extract_contours(&f, 0.5);
        assert_eq!(c.connected_component_count, 2);
        assert!(c.all_closed());
    }

    #[test]
    fn boundary_crossing_level_is_open() {
        let f = GridField::from_fn(1.0, 33, |x, _| x).unwrap();
        let c = extract_contours(&f, 0.1);
        assert_eq!(c.connected_component_count, 1);
        assert!(!c.polylines[0].closed);
        assert_eq!(c.polylines[0].points.len(), 33);
    }

    #[test]
    fn monotone_radial_field_gives_one_curve_per_level() {
        let f = GridField::from_fn(3.0, 97, |x, y| (-(x * x + y * y) / 2.0).exp()).unwrap();
        for k in 1..20 {
            let c = extract_contours(&f, k as f64 * 0.05);
            assert_eq!(c.connected_component_count, 1, "level {}", k as f64 * 0.05);
            assert!(c.all_closed());
        }
    }
}
