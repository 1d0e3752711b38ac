//! Oblique coordinates, monomers, holes and lozenge locations.
//!
//! A unit triangle is named by the midpoint of its vertical side in the 60°
//! oblique frame. Lattice nodes use a second integer frame `(a, b)` with
//! `a + b` even, at Cartesian `(a·√3/2, b/2)`; the monomer with oblique
//! coordinates `(x, y)` has its vertical side on the nodes `(x+y, y−x)` and
//! `(x+y, y−x+2)`.

use alloc::vec::Vec;
use core::ops::{Add, Neg, Sub};

use hashbrown::{HashMap, HashSet};
use num_integer::Integer;
use num_rational::Ratio;

use crate::Error;

pub const SQRT3_2: f64 = 0.866_025_403_784_438_6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ObliqueCoord {
    pub x: i64,
    pub y: i64,
}

impl ObliqueCoord {
    pub const fn new(x: i64, y: i64) -> Self {
        ObliqueCoord { x, y }
    }

    /// Cartesian image of the vector `x·X + y·Y`, with unit axes at polar ∓π/6.
    pub fn to_cartesian(self) -> (f64, f64) {
        ((self.x + self.y) as f64 * SQRT3_2, (self.y - self.x) as f64 * 0.5)
    }

    pub fn norm2(self) -> i64 {
        self.x * self.x + self.x * self.y + self.y * self.y
    }

    pub fn distance(self, o: ObliqueCoord) -> f64 {
        libm::sqrt((self - o).norm2() as f64)
    }
}

impl Add for ObliqueCoord {
    type Output = ObliqueCoord;
    fn add(self, o: ObliqueCoord) -> ObliqueCoord {
        ObliqueCoord::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for ObliqueCoord {
    type Output = ObliqueCoord;
    fn sub(self, o: ObliqueCoord) -> ObliqueCoord {
        ObliqueCoord::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for ObliqueCoord {
    type Output = ObliqueCoord;
    fn neg(self) -> ObliqueCoord {
        ObliqueCoord::new(-self.x, -self.y)
    }
}

/// Euclidean distance between oblique points.
pub fn distance(c: ObliqueCoord, d: ObliqueCoord) -> f64 {
    c.distance(d)
}

/// Cartesian image of an oblique point (pure linear map, no origin shift).
pub fn to_cartesian(c: ObliqueCoord) -> (f64, f64) {
    c.to_cartesian()
}

/// A lattice node in the `(a, b)` frame, `a + b` even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub a: i64,
    pub b: i64,
}

impl Node {
    pub const fn new(a: i64, b: i64) -> Self {
        Node { a, b }
    }

    pub fn cartesian(self) -> (f64, f64) {
        (self.a as f64 * SQRT3_2, self.b as f64 * 0.5)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomer {
    pub orientation: Orientation,
    pub pos: ObliqueCoord,
}

/// Left-pointing monomer at `(x, y)`.
pub const fn l(x: i64, y: i64) -> Monomer {
    Monomer { orientation: Orientation::Left, pos: ObliqueCoord::new(x, y) }
}

/// Right-pointing monomer at `(x, y)`.
pub const fn r(x: i64, y: i64) -> Monomer {
    Monomer { orientation: Orientation::Right, pos: ObliqueCoord::new(x, y) }
}

impl Monomer {
    pub fn is_left(self) -> bool {
        self.orientation == Orientation::Left
    }

    /// Lower end of the vertical side.
    pub fn base_node(self) -> Node {
        Node::new(self.pos.x + self.pos.y, self.pos.y - self.pos.x)
    }

    pub fn vertices(self) -> [Node; 3] {
        let n = self.base_node();
        let apex = match self.orientation {
            Orientation::Left => Node::new(n.a - 1, n.b + 1),
            Orientation::Right => Node::new(n.a + 1, n.b + 1),
        };
        [n, Node::new(n.a, n.b + 2), apex]
    }

    /// Centroid in the node frame, multiplied by 3 to stay integral.
    pub fn centroid3(self) -> (i64, i64) {
        let v = self.vertices();
        (v[0].a + v[1].a + v[2].a, v[0].b + v[1].b + v[2].b)
    }

    pub fn centroid_cartesian(self) -> (f64, f64) {
        let (a3, b3) = self.centroid3();
        (a3 as f64 / 3.0 * SQRT3_2, b3 as f64 / 6.0)
    }

    pub fn shares_vertex(self, o: Monomer) -> bool {
        let a = self.vertices();
        o.vertices().iter().any(|v| a.contains(v))
    }

    /// The three edge-adjacent monomers of opposite orientation.
    pub fn neighbors(self) -> [Monomer; 3] {
        let ObliqueCoord { x, y } = self.pos;
        match self.orientation {
            Orientation::Left => [r(x, y), r(x - 1, y), r(x, y - 1)],
            Orientation::Right => [l(x, y), l(x + 1, y), l(x, y + 1)],
        }
    }

    pub fn translate(self, v: ObliqueCoord) -> Monomer {
        Monomer { orientation: self.orientation, pos: self.pos + v }
    }

    /// Mirror image across the vertical lattice line through the origin.
    pub fn reflect(self) -> Monomer {
        let ObliqueCoord { x, y } = self.pos;
        match self.orientation {
            Orientation::Left => r(-y, -x),
            Orientation::Right => l(-y, -x),
        }
    }
}

/// Lozenge directions: long diagonal at polar 0, 2π/3, 4π/3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LozengeDir {
    D0,
    D120,
    D240,
}

impl LozengeDir {
    pub const ALL: [LozengeDir; 3] = [LozengeDir::D0, LozengeDir::D120, LozengeDir::D240];

    pub fn index(self) -> usize {
        match self {
            LozengeDir::D0 => 0,
            LozengeDir::D120 => 1,
            LozengeDir::D240 => 2,
        }
    }

    /// Unit vector of the long diagonal, pointing from the left monomer to its partner's far side.
    pub fn unit(self) -> (f64, f64) {
        match self {
            LozengeDir::D0 => (1.0, 0.0),
            LozengeDir::D120 => (-0.5, SQRT3_2),
            LozengeDir::D240 => (-0.5, -SQRT3_2),
        }
    }
}

/// The lozenge formed by the left monomer `left` and one of its three right neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LozengeLocation {
    pub left: ObliqueCoord,
    pub dir: LozengeDir,
}

impl LozengeLocation {
    pub const fn new(x: i64, y: i64, dir: LozengeDir) -> Self {
        LozengeLocation { left: ObliqueCoord::new(x, y), dir }
    }

    pub fn left_monomer(self) -> Monomer {
        l(self.left.x, self.left.y)
    }

    pub fn right_monomer(self) -> Monomer {
        let ObliqueCoord { x, y } = self.left;
        match self.dir {
            LozengeDir::D0 => r(x, y),
            LozengeDir::D120 => r(x - 1, y),
            LozengeDir::D240 => r(x, y - 1),
        }
    }

    pub fn monomers(self) -> [Monomer; 2] {
        [self.right_monomer(), self.left_monomer()]
    }

    /// Builds the lozenge covering an edge-adjacent (right, left) pair.
    pub fn from_pair(right: Monomer, left: Monomer) -> Option<Self> {
        if right.is_left() || !left.is_left() {
            return None;
        }
        LozengeDir::ALL
            .into_iter()
            .map(|d| LozengeLocation { left: left.pos, dir: d })
            .find(|lz| lz.right_monomer() == right)
    }

    pub fn translate(self, v: ObliqueCoord) -> Self {
        LozengeLocation { left: self.left + v, dir: self.dir }
    }

    pub fn reflect(self) -> Self {
        let [rm, lm] = self.monomers();
        LozengeLocation::from_pair(lm.reflect(), rm.reflect()).expect("reflection preserves adjacency")
    }
}

/// The three lozenges containing a monomer, in the order of directions 0, 2π/3, 4π/3
/// relative to the vector from the monomer to its partner's far side.
pub fn lozenges_covering(e: Monomer) -> [LozengeLocation; 3] {
    let ObliqueCoord { x, y } = e.pos;
    match e.orientation {
        Orientation::Left => [
            LozengeLocation::new(x, y, LozengeDir::D0),
            LozengeLocation::new(x, y, LozengeDir::D120),
            LozengeLocation::new(x, y, LozengeDir::D240),
        ],
        // For a right monomer the partner sits on the opposite side, so the
        // horizontal lozenge has its partner to the west, and so on.
        Orientation::Right => [
            LozengeLocation::new(x, y, LozengeDir::D0),
            LozengeLocation::new(x + 1, y, LozengeDir::D120),
            LozengeLocation::new(x, y + 1, LozengeDir::D240),
        ],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HoleKind {
    E,
    W,
}

/// A side-2 triangular hole named by its central monomer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriHole {
    pub kind: HoleKind,
    pub pos: ObliqueCoord,
}

impl TriHole {
    pub const fn e(x: i64, y: i64) -> Self {
        TriHole { kind: HoleKind::E, pos: ObliqueCoord::new(x, y) }
    }

    pub const fn w(x: i64, y: i64) -> Self {
        TriHole { kind: HoleKind::W, pos: ObliqueCoord::new(x, y) }
    }

    /// The central monomer followed by its three neighbors.
    pub fn triangles(self) -> [Monomer; 4] {
        let c = match self.kind {
            HoleKind::E => l(self.pos.x, self.pos.y),
            HoleKind::W => r(self.pos.x, self.pos.y),
        };
        let [a, b, d] = c.neighbors();
        [c, a, b, d]
    }

    pub fn charge(self) -> i64 {
        match self.kind {
            HoleKind::E => 2,
            HoleKind::W => -2,
        }
    }

    pub fn reflect(self) -> TriHole {
        let p = self.pos;
        match self.kind {
            HoleKind::E => TriHole::w(-p.y, -p.x),
            HoleKind::W => TriHole::e(-p.y, -p.x),
        }
    }

    /// Centroid of the side-2 triangle (equal to the centroid of its central monomer).
    pub fn centroid_cartesian(self) -> (f64, f64) {
        self.triangles()[0].centroid_cartesian()
    }
}

/// Replaces a side-2 hole by the two monomers that carry its correlation.
pub fn decompose_hole(h: TriHole) -> [Monomer; 2] {
    let ObliqueCoord { x, y } = h.pos;
    match h.kind {
        HoleKind::E => [r(x - 1, y), r(x, y - 1)],
        HoleKind::W => [l(x + 1, y), l(x, y + 1)],
    }
}

/// Right minus left unit triangles.
pub fn charge<I: IntoIterator<Item = Monomer>>(region: I) -> i64 {
    region.into_iter().map(|m| if m.is_left() { -1 } else { 1 }).sum()
}

/// Union of side-2 holes along a line of slope `q`, translated by `anchor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiHole {
    pub kind: HoleKind,
    pub q: Ratio<i64>,
    pub indices: Vec<i64>,
    pub anchor: ObliqueCoord,
}

impl MultiHole {
    pub fn single(h: TriHole) -> Self {
        MultiHole { kind: h.kind, q: Ratio::from_integer(1), indices: alloc::vec![0], anchor: h.pos }
    }

    /// Checks slope divisibility and index well-formedness, then lists the constituents.
    pub fn constituents(&self) -> Result<Vec<TriHole>, Error> {
        let one_minus_q = Ratio::from_integer(1) - self.q;
        if one_minus_q.numer() % 3 != 0 {
            return Err(Error::BadSlope);
        }
        if self.indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonIncreasingIndices);
        }
        let mut out = Vec::with_capacity(self.indices.len());
        for &a in &self.indices {
            let qa = self.q * Ratio::from_integer(a);
            if !qa.is_integer() {
                return Err(Error::NonIntegerIndex);
            }
            let pos = ObliqueCoord::new(a, qa.to_integer()) + self.anchor;
            out.push(TriHole { kind: self.kind, pos });
        }
        let mut seen = HashSet::new();
        for h in &out {
            for t in h.triangles() {
                if !seen.insert(t) {
                    return Err(Error::OverlappingHoles);
                }
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn charge(&self) -> i64 {
        let per = match self.kind {
            HoleKind::E => 2,
            HoleKind::W => -2,
        };
        per * self.indices.len() as i64
    }

    /// Mirror image across the vertical line through the origin; the slope becomes 1/q.
    pub fn reflect(&self) -> Result<MultiHole, Error> {
        let hs = self.constituents()?;
        if self.q == Ratio::from_integer(0) {
            return Err(Error::BadSlope);
        }
        let q = Ratio::from_integer(1) / self.q;
        let kind = match self.kind {
            HoleKind::E => HoleKind::W,
            HoleKind::W => HoleKind::E,
        };
        let anchor = -ObliqueCoord::new(self.anchor.y, self.anchor.x);
        let mut idx: Vec<i64> = self.indices.iter().map(|&a| -(self.q * Ratio::from_integer(a)).to_integer()).collect();
        idx.sort_unstable();
        let m = MultiHole { kind, q, indices: idx, anchor };
        debug_assert_eq!(m.constituents().map(|v| v.len()), Ok(hs.len()));
        Ok(m)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HoleSystem {
    pub multiholes: Vec<MultiHole>,
}

impl HoleSystem {
    pub fn new(multiholes: Vec<MultiHole>) -> Self {
        HoleSystem { multiholes }
    }

    pub fn from_holes<I: IntoIterator<Item = TriHole>>(holes: I) -> Self {
        HoleSystem { multiholes: holes.into_iter().map(MultiHole::single).collect() }
    }

    pub fn total_charge(&self) -> i64 {
        self.multiholes.iter().map(|m| m.charge()).sum()
    }

    pub fn holes(&self) -> Result<Vec<TriHole>, Error> {
        let mut out = Vec::new();
        for m in &self.multiholes {
            out.extend(m.constituents()?);
        }
        Ok(out)
    }

    /// The two-monomer replacements of every constituent hole.
    pub fn monomers(&self) -> Result<Vec<Monomer>, Error> {
        Ok(self.holes()?.into_iter().flat_map(decompose_hole).collect())
    }

    pub fn reflect(&self) -> Result<HoleSystem, Error> {
        Ok(HoleSystem { multiholes: self.multiholes.iter().map(|m| m.reflect()).collect::<Result<_, _>>()? })
    }

    pub fn translate(&self, v: ObliqueCoord) -> HoleSystem {
        HoleSystem {
            multiholes: self.multiholes.iter().map(|m| MultiHole { anchor: m.anchor + v, ..m.clone() }).collect(),
        }
    }
}

/// An extra object whose joint correlation with the holes is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Probe {
    Monomer(Monomer),
    Lozenge(LozengeLocation),
}

impl Probe {
    pub fn monomers(self) -> Vec<Monomer> {
        match self {
            Probe::Monomer(m) => alloc::vec![m],
            Probe::Lozenge(lz) => lz.monomers().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub total_charge: i64,
    pub rights: usize,
    pub lefts: usize,
    pub pairable: bool,
}

/// Checks disjointness, slopes, indices and the vertex-sharing pairing hypothesis.
pub fn validate_system(hs: &HoleSystem, probes: &[Probe]) -> Result<ValidationReport, Error> {
    let holes = hs.holes()?;
    let mut owner: HashMap<Monomer, bool> = HashMap::new();
    for h in &holes {
        for t in h.triangles() {
            if owner.insert(t, false).is_some() {
                return Err(Error::OverlappingHoles);
            }
        }
    }
    for p in probes {
        for t in p.monomers() {
            if owner.insert(t, true).is_some() {
                return Err(Error::ProbeOverlapsHole);
            }
        }
    }
    let mut mons: Vec<Monomer> = holes.iter().flat_map(|&h| decompose_hole(h)).collect();
    let mut loose = false;
    for p in probes {
        if let Probe::Monomer(_) = p {
            loose = true;
        }
        mons.extend(p.monomers());
    }
    let pairable = !loose || pairable(&mons);
    if !pairable {
        return Err(Error::UnpairableConfiguration);
    }
    let lefts = mons.iter().filter(|m| m.is_left()).count();
    Ok(ValidationReport {
        total_charge: hs.total_charge() + charge(probes.iter().flat_map(|p| p.monomers())),
        rights: mons.len() - lefts,
        lefts,
        pairable,
    })
}

/// Whether the monomers split into vertex-sharing pairs (a perfect matching).
pub fn pairable(mons: &[Monomer]) -> bool {
    let n = mons.len();
    if n % 2 == 1 {
        return false;
    }
    if n > 128 {
        // Fall back to greedy pairing of consecutive items; exact search is exponential.
        return greedy_pairable(mons);
    }
    let adj: Vec<u128> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && mons[i].shares_vertex(mons[j])).fold(0u128, |acc, j| acc | (1u128 << j)))
        .collect();
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut memo: HashMap<u128, bool> = HashMap::new();
    fn go(used: u128, full: u128, adj: &[u128], memo: &mut HashMap<u128, bool>) -> bool {
        if used == full {
            return true;
        }
        if let Some(&v) = memo.get(&used) {
            return v;
        }
        let i = (!used).trailing_zeros() as usize;
        let mut cand = adj[i] & !used;
        let mut ok = false;
        while cand != 0 {
            let j = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if go(used | (1 << i) | (1 << j), full, adj, memo) {
                ok = true;
                break;
            }
        }
        memo.insert(used, ok);
        ok
    }
    go(0, full, &adj, &mut memo)
}

fn greedy_pairable(mons: &[Monomer]) -> bool {
    mons.chunks(2).all(|c| c[0].shares_vertex(c[1]))
}

/// Signed area test helper: twice the oblique cross product.
pub fn cross(u: ObliqueCoord, v: ObliqueCoord) -> i64 {
    u.x * v.y - u.y * v.x
}

/// Residue of an integer modulo 3 in `0..3`.
pub fn mod3(v: i64) -> i64 {
    v.mod_floor(&3)
}
