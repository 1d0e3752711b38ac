//! The average lifting surface over a lattice window.
//!
//! Node N(a, b) sits at Cartesian (a·√3/2, b/2). The oriented edges used for
//! heights leave each node in the polar directions π/2, −π/6 and −5π/6; the
//! height rises by (1 − 3p)/√2 along an edge whose crossing lozenge has
//! occupation probability p.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use hashbrown::{HashMap, HashSet};

use crate::continuum::{fiber_distance, helicoid_fiber, HelicoidSpec, HelicoidVariant};
use crate::correlation::hole_triangles;
use crate::lattice::{HoleKind, HoleSystem, LozengeDir, LozengeLocation, Monomer, Node, ObliqueCoord, TriHole};
use crate::Error;

const FRAC_1_SQRT2: f64 = core::f64::consts::FRAC_1_SQRT_2;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Vertical spacing of the sheets of a lifting surface.
pub const SHEET_SPACING: f64 = 3.0 * FRAC_1_SQRT2;

/// The three oriented edge directions leaving a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeDir {
    /// Polar π/2.
    Up,
    /// Polar −π/6.
    SouthEast,
    /// Polar −5π/6.
    SouthWest,
}

impl EdgeDir {
    pub const ALL: [EdgeDir; 3] = [EdgeDir::Up, EdgeDir::SouthEast, EdgeDir::SouthWest];

    pub fn target(self, n: Node) -> Node {
        match self {
            EdgeDir::Up => Node::new(n.a, n.b + 2),
            EdgeDir::SouthEast => Node::new(n.a + 1, n.b - 1),
            EdgeDir::SouthWest => Node::new(n.a - 1, n.b - 1),
        }
    }

    /// The lozenge made of the two unit triangles sharing the edge.
    pub fn lozenge(self, n: Node) -> LozengeLocation {
        let (a, b) = (n.a, n.b);
        match self {
            EdgeDir::Up => LozengeLocation::new((a - b) / 2, (a + b) / 2, LozengeDir::D0),
            EdgeDir::SouthEast => LozengeLocation::new((a - b + 2) / 2, (a + b) / 2, LozengeDir::D240),
            EdgeDir::SouthWest => LozengeLocation::new((a - b + 2) / 2, (a + b - 2) / 2, LozengeDir::D120),
        }
    }
}

/// Height change along an edge whose lozenge has probability `p`.
pub fn edge_increment(p: f64) -> f64 {
    FRAC_1_SQRT2 * (1.0 - 3.0 * p)
}

/// The node at the lower end of the vertical side of monomer (x, y).
pub fn node_of(x: i64, y: i64) -> Node {
    Node::new(x + y, y - x)
}

/// Oblique parallelogram of nodes {node_of(x, y) : x0 ≤ x ≤ x1, y0 ≤ y ≤ y1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Window {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Window { x0: x0.min(x1), y0: y0.min(y1), x1: x0.max(x1), y1: y0.max(y1) }
    }

    pub fn contains(&self, n: Node) -> bool {
        let (x, y) = ((n.a - n.b) / 2, (n.a + n.b) / 2);
        (n.a + n.b) % 2 == 0 && x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    /// Nodes ordered by oblique (y, x).
    pub fn nodes(&self) -> Vec<Node> {
        let mut v = Vec::new();
        for y in self.y0..=self.y1 {
            for x in self.x0..=self.x1 {
                v.push(node_of(x, y));
            }
        }
        v
    }

    pub fn southwest(&self) -> Node {
        node_of(self.x0, self.y0)
    }
}

/// An eastward horizontal cut from a point inside a hole, possibly ending inside another hole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut {
    pub start: (f64, f64),
    pub end_x: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CutFamily {
    pub cuts: Vec<Cut>,
}

fn triangle_span_at(m: Monomer, y: f64) -> Option<(f64, f64)> {
    let v = m.vertices().map(|n| n.cartesian());
    let mut xs: Vec<f64> = Vec::new();
    for i in 0..3 {
        let (p, q) = (v[i], v[(i + 1) % 3]);
        if (p.1 - y) * (q.1 - y) < 0.0 {
            xs.push(p.0 + (y - p.1) * (q.0 - p.0) / (q.1 - p.1));
        }
    }
    if xs.len() < 2 {
        return None;
    }
    Some((xs[0].min(xs[1]), xs[0].max(xs[1])))
}

impl CutFamily {
    /// One eastward ray per constituent hole, staggered by less than half a row so
    /// that no ray passes through a node. A ray stops where it first enters another hole.
    pub fn eastward(hs: &HoleSystem) -> Result<Self, Error> {
        let holes = hs.holes()?;
        let n = holes.len().max(1) as f64;
        let mut cuts = Vec::with_capacity(holes.len());
        for (k, h) in holes.iter().enumerate() {
            let (cx, cy) = h.centroid_cartesian();
            let y = cy + 0.05 + 0.4 * (k as f64 + 0.5) / n;
            let mut end_x = f64::INFINITY;
            for (j, o) in holes.iter().enumerate() {
                if j == k {
                    continue;
                }
                for t in o.triangles() {
                    if let Some((lo, hi)) = triangle_span_at(t, y) {
                        if hi > cx {
                            end_x = end_x.min(lo.max(cx));
                        }
                    }
                }
            }
            cuts.push(Cut { start: (cx, y), end_x });
        }
        Ok(CutFamily { cuts })
    }

    /// Whether the segment between two nodes crosses any cut.
    pub fn crosses(&self, u: Node, v: Node) -> bool {
        let (p, q) = (u.cartesian(), v.cartesian());
        self.cuts.iter().any(|c| {
            let y = c.start.1;
            if (p.1 - y) * (q.1 - y) >= 0.0 {
                return false;
            }
            let x = p.0 + (y - p.1) * (q.0 - p.0) / (q.1 - p.1);
            x >= c.start.0 && x <= c.end_x
        })
    }
}

/// Whether an edge lies inside a hole (both adjacent triangles removed).
fn edge_inside_hole(lz: LozengeLocation, tris: &HashSet<Monomer>) -> bool {
    let [r, l] = lz.monomers();
    tris.contains(&r) && tris.contains(&l)
}

fn edge_touches_hole(lz: LozengeLocation, tris: &HashSet<Monomer>) -> bool {
    let [r, l] = lz.monomers();
    tris.contains(&r) || tris.contains(&l)
}

/// The lozenges whose probabilities are needed for the window, in deterministic order.
pub fn surface_lozenges(hs: &HoleSystem, window: &Window) -> Result<Vec<LozengeLocation>, Error> {
    let tris = hole_triangles(hs)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for u in window.nodes() {
        for d in EdgeDir::ALL {
            let v = d.target(u);
            if !window.contains(v) {
                continue;
            }
            let lz = d.lozenge(u);
            if edge_touches_hole(lz, &tris) {
                continue;
            }
            if seen.insert(lz) {
                out.push(lz);
            }
        }
    }
    Ok(out)
}

/// Heights of one sheet, with the basepoint at height zero.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightSheet {
    pub window: Window,
    pub basepoint: Node,
    pub heights: BTreeMap<Node, f64>,
    /// Largest mismatch of the edge rule over non-tree, non-cut edges.
    pub residual: f64,
}

/// Lozenge probabilities with the hole rule applied: lozenges touching a hole have probability 0.
pub struct EdgeModel<'a, P: Fn(LozengeLocation) -> f64> {
    pub prob: P,
    pub tris: &'a HashSet<Monomer>,
}

impl<'a, P: Fn(LozengeLocation) -> f64> EdgeModel<'a, P> {
    pub fn new(prob: P, tris: &'a HashSet<Monomer>) -> Self {
        EdgeModel { prob, tris }
    }

    /// Height change from `u` along `d`, or `None` for edges inside a hole.
    pub fn increment(&self, u: Node, d: EdgeDir) -> Option<f64> {
        let lz = d.lozenge(u);
        if edge_inside_hole(lz, self.tris) {
            return None;
        }
        let p = if edge_touches_hole(lz, self.tris) { 0.0 } else { (self.prob)(lz) };
        Some(edge_increment(p))
    }

    /// Height change between two adjacent nodes in either orientation.
    pub fn step(&self, u: Node, v: Node) -> Option<f64> {
        for d in EdgeDir::ALL {
            if d.target(u) == v {
                return self.increment(u, d);
            }
            if d.target(v) == u {
                return self.increment(v, d).map(|x| -x);
            }
        }
        None
    }
}

fn neighbors(u: Node) -> [Node; 6] {
    [
        EdgeDir::Up.target(u),
        EdgeDir::SouthEast.target(u),
        EdgeDir::SouthWest.target(u),
        Node::new(u.a, u.b - 2),
        Node::new(u.a - 1, u.b + 1),
        Node::new(u.a + 1, u.b + 1),
    ]
}

/// Integrates the edge rule over a breadth-first spanning tree of the non-cut edges.
pub fn average_surface<P: Fn(LozengeLocation) -> f64>(
    hs: &HoleSystem,
    window: &Window,
    cuts: &CutFamily,
    prob: P,
) -> Result<HeightSheet, Error> {
    let tris = hole_triangles(hs)?;
    for t in &tris {
        if !t.vertices().iter().all(|v| window.contains(*v)) {
            return Err(Error::WindowTooSmall);
        }
    }
    let model = EdgeModel::new(prob, &tris);
    let base = window.southwest();
    let mut heights: BTreeMap<Node, f64> = BTreeMap::new();
    let mut tree: HashSet<(Node, Node)> = HashSet::new();
    heights.insert(base, 0.0);
    let mut queue = VecDeque::from([base]);
    while let Some(u) = queue.pop_front() {
        let hu = heights[&u];
        for v in neighbors(u) {
            if !window.contains(v) || heights.contains_key(&v) || cuts.crosses(u, v) {
                continue;
            }
            if let Some(dh) = model.step(u, v) {
                heights.insert(v, hu + dh);
                tree.insert((u.min(v), u.max(v)));
                queue.push_back(v);
            }
        }
    }
    if heights.len() != window.nodes().len() {
        return Err(Error::CutsIntersect);
    }
    let mut residual = 0.0f64;
    for (&u, &hu) in &heights {
        for d in EdgeDir::ALL {
            let v = d.target(u);
            if !window.contains(v) || cuts.crosses(u, v) || tree.contains(&(u.min(v), u.max(v))) {
                continue;
            }
            if let Some(dh) = model.increment(u, d) {
                residual = residual.max(libm::fabs(heights[&v] - hu - dh));
            }
        }
    }
    Ok(HeightSheet { window: *window, basepoint: base, heights, residual })
}

/// Nodes of the counterclockwise boundary of an oblique parallelogram, closed (last = first).
pub fn parallelogram_loop(x0: i64, y0: i64, x1: i64, y1: i64) -> Vec<Node> {
    let mut v = Vec::new();
    for x in x0..x1 {
        v.push(node_of(x, y0));
    }
    for y in y0..y1 {
        v.push(node_of(x1, y));
    }
    for x in (x0 + 1..=x1).rev() {
        v.push(node_of(x, y1));
    }
    for y in (y0 + 1..=y1).rev() {
        v.push(node_of(x0, y));
    }
    v.push(node_of(x0, y0));
    v
}

/// Sum of height increments along a closed node path; `None` if a step is not an admissible edge.
pub fn loop_circulation<P: Fn(LozengeLocation) -> f64>(path: &[Node], model: &EdgeModel<'_, P>) -> Option<f64> {
    path.windows(2).map(|w| model.step(w[0], w[1])).sum()
}

/// Total charge of the holes whose triangles lie inside the parallelogram spanned by node_of(x0..x1, y0..y1).
pub fn enclosed_charge(hs: &HoleSystem, x0: i64, y0: i64, x1: i64, y1: i64) -> Result<i64, Error> {
    let w = Window::new(x0, y0, x1, y1);
    let mut q = 0;
    for h in hs.holes()? {
        let inside = h.triangles().iter().all(|t| t.vertices().iter().all(|v| strictly_inside(&w, *v)));
        if inside {
            q += h.charge();
        }
    }
    Ok(q)
}

/// Whether every hole lies strictly inside or strictly outside the parallelogram, so its boundary touches none.
pub fn loop_clear_of_holes(hs: &HoleSystem, x0: i64, y0: i64, x1: i64, y1: i64) -> Result<bool, Error> {
    let w = Window::new(x0, y0, x1, y1);
    for h in hs.holes()? {
        let vs: Vec<Node> = h.triangles().iter().flat_map(|t| t.vertices()).collect();
        let inside = vs.iter().all(|v| strictly_inside(&w, *v));
        let outside = vs.iter().all(|v| strictly_outside(&w, *v));
        if !inside && !outside {
            return Ok(false);
        }
    }
    Ok(true)
}

fn strictly_outside(w: &Window, n: Node) -> bool {
    let (x, y) = ((n.a - n.b) / 2, (n.a + n.b) / 2);
    x < w.x0 || x > w.x1 || y < w.y0 || y > w.y1
}

fn strictly_inside(w: &Window, n: Node) -> bool {
    let (x, y) = ((n.a - n.b) / 2, (n.a + n.b) / 2);
    x > w.x0 && x < w.x1 && y > w.y0 && y < w.y1
}

/// Refined half helicoids at the hole centers, one per constituent hole.
pub fn hole_helicoids(hs: &HoleSystem) -> Result<Vec<HelicoidSpec>, Error> {
    let k = 3.0 / (core::f64::consts::SQRT_2 * core::f64::consts::PI);
    Ok(hs
        .holes()?
        .into_iter()
        .map(|h: TriHole| HelicoidSpec {
            center: h.centroid_cartesian(),
            pitch: match h.kind {
                HoleKind::E => -k,
                HoleKind::W => k,
            },
            refinement: 2,
            variant: HelicoidVariant::HalfRefined,
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ComparisonReport {
    pub max_abs: f64,
    pub mean_abs: f64,
    /// max |∇h − ∇H| / max |∇H| over the compared nodes.
    pub grad_max_rel: f64,
    /// ‖∇h − ∇H‖₂ / ‖∇H‖₂ over the compared nodes.
    pub grad_rms_rel: f64,
    pub samples: usize,
}

/// Compares a sheet with a helicoid sum outside disks of radius `exclusion` around the centers.
///
/// The sheet is shifted so that it agrees with the helicoid representative at its
/// basepoint; after that every comparison is between fibers modulo 3/√2.
pub fn compare_to_helicoids<P: Fn(LozengeLocation) -> f64>(
    sheet: &HeightSheet,
    helicoids: &[HelicoidSpec],
    exclusion: f64,
    model: &EdgeModel<'_, P>,
) -> Result<ComparisonReport, Error> {
    let (anchor, _) = helicoid_fiber(helicoids, sheet.basepoint.cartesian())?;
    let modulus = SHEET_SPACING;
    let far = |p: (f64, f64)| {
        helicoids.iter().all(|h| {
            let (dx, dy) = (p.0 - h.center.0, p.1 - h.center.1);
            dx * dx + dy * dy >= exclusion * exclusion
        })
    };
    let mut rep = ComparisonReport::default();
    let mut sum = 0.0;
    let (mut gmax_err, mut gmax_ref, mut gerr2, mut gref2) = (0.0f64, 0.0f64, 0.0, 0.0);
    for (&u, &h) in &sheet.heights {
        let p = u.cartesian();
        if !far(p) {
            continue;
        }
        let (target, _) = helicoid_fiber(helicoids, p)?;
        let d = fiber_distance(h + anchor, target, modulus);
        rep.max_abs = rep.max_abs.max(d);
        sum += d;
        rep.samples += 1;
        if let Some(g) = discrete_gradient(u, &sheet.window, model) {
            let mut r = (0.0, 0.0);
            for hel in helicoids {
                let gh = hel.gradient(p)?;
                r.0 += gh.0;
                r.1 += gh.1;
            }
            let e2 = (g.0 - r.0) * (g.0 - r.0) + (g.1 - r.1) * (g.1 - r.1);
            let r2 = r.0 * r.0 + r.1 * r.1;
            gmax_err = gmax_err.max(libm::sqrt(e2));
            gmax_ref = gmax_ref.max(libm::sqrt(r2));
            gerr2 += e2;
            gref2 += r2;
        }
    }
    if rep.samples > 0 {
        rep.mean_abs = sum / rep.samples as f64;
    }
    if gmax_ref > 0.0 {
        rep.grad_max_rel = gmax_err / gmax_ref;
        rep.grad_rms_rel = libm::sqrt(gerr2 / gref2);
    }
    Ok(rep)
}

/// Central-difference gradient at a node from edge increments alone, so cuts do not matter.
pub fn discrete_gradient<P: Fn(LozengeLocation) -> f64>(
    u: Node,
    window: &Window,
    model: &EdgeModel<'_, P>,
) -> Option<(f64, f64)> {
    let down = Node::new(u.a, u.b - 2);
    let east = Node::new(u.a + 2, u.b);
    let west = Node::new(u.a - 2, u.b);
    for n in [down, east, west, EdgeDir::Up.target(u)] {
        if !window.contains(n) {
            return None;
        }
    }
    let dy = (model.increment(u, EdgeDir::Up)? + model.increment(down, EdgeDir::Up)?) / 2.0;
    let fwd = model.increment(u, EdgeDir::SouthEast)? - model.increment(east, EdgeDir::SouthWest)?;
    let bwd = model.increment(west, EdgeDir::SouthEast)? - model.increment(u, EdgeDir::SouthWest)?;
    Some(((fwd + bwd) / (2.0 * SQRT3), dy))
}

/// A sheet together with the fiber rule h + (3/√2)ℤ.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSheetSurface {
    pub sheet: HeightSheet,
    pub modulus: f64,
}

impl MultiSheetSurface {
    pub fn new(sheet: HeightSheet) -> Self {
        MultiSheetSurface { sheet, modulus: SHEET_SPACING }
    }
}

/// Triangle mesh in OBJ format with `sheets` vertically stacked copies.
///
/// Faces are the unit triangles with all three nodes in the window that are
/// neither holes nor crossed by a cut. Output is fully deterministic.
pub fn obj_mesh(surface: &MultiSheetSurface, sheets: usize, holes: &HashSet<Monomer>, cuts: &CutFamily) -> String {
    let nodes: Vec<(&Node, &f64)> = surface.sheet.heights.iter().collect();
    let index: HashMap<Node, usize> = nodes.iter().enumerate().map(|(i, (n, _))| (**n, i + 1)).collect();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let w = &surface.sheet.window;
    for (n, _) in &nodes {
        let n = **n;
        // Unit triangles whose vertical side starts at n: left and right of it.
        let x = (n.a - n.b) / 2;
        let y = (n.a + n.b) / 2;
        for m in [crate::lattice::l(x, y), crate::lattice::r(x, y)] {
            let v = m.vertices();
            if holes.contains(&m) || !v.iter().all(|p| w.contains(*p)) {
                continue;
            }
            if cuts.crosses(v[0], v[1]) || cuts.crosses(v[1], v[2]) || cuts.crosses(v[2], v[0]) {
                continue;
            }
            let mut f = [index[&v[0]], index[&v[1]], index[&v[2]]];
            if m.is_left() {
                // Keep counterclockwise orientation seen from above.
                f.swap(1, 2);
            }
            faces.push(f);
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "# lozenge average surface, {} sheet(s), spacing {:.17e}", sheets, surface.modulus);
    for k in 0..sheets {
        let dz = k as f64 * surface.modulus;
        for (n, h) in &nodes {
            let (x, y) = n.cartesian();
            let _ = writeln!(s, "v {:.17e} {:.17e} {:.17e}", x, y, **h + dz);
        }
    }
    for k in 0..sheets {
        let off = k * nodes.len();
        let _ = writeln!(s, "g sheet{}", k);
        for f in &faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + off, f[1] + off, f[2] + off);
        }
    }
    s
}

/// Oblique coordinates of the monomer whose vertical side starts at `n`.
pub fn node_monomer_pos(n: Node) -> ObliqueCoord {
    ObliqueCoord::new((n.a - n.b) / 2, (n.a + n.b) / 2)
}
