//! Independent tiling counts used only for validation.
//!
//! Counts come from memoized matching enumeration for small regions and from
//! Kasteleyn determinants otherwise. Determinants are exact: they are taken
//! modulo enough 31-bit primes to exceed the Hadamard bound and recombined by
//! the Chinese remainder theorem.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::lattice::{charge, l, r, HoleSystem, LozengeLocation, Monomer, Node, ObliqueCoord, SQRT3_2};
use crate::Error;

/// Largest region handled by the enumeration path.
pub const BRUTE_FORCE_LIMIT: usize = 40;

/// A finite set of unit triangles.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Region {
    tris: BTreeSet<Monomer>,
}

fn neighbors_in(m: Monomer) -> [Monomer; 3] {
    m.neighbors()
}

impl Region {
    pub fn from_triangles<I: IntoIterator<Item = Monomer>>(it: I) -> Self {
        Region { tris: it.into_iter().collect() }
    }

    /// The semiregular hexagon with sides a, b, c, a, b, c starting at node N(0, 0)
    /// and running south-east, north-east, north, north-west, south-west, south.
    pub fn hexagon(a: i64, b: i64, c: i64) -> Self {
        let steps = [(a, (1, -1)), (b, (1, 1)), (c, (0, 2)), (a, (-1, 1)), (b, (-1, -1)), (c, (0, -2))];
        let mut poly = Vec::with_capacity(6);
        let (mut pa, mut pb) = (0i64, 0i64);
        for (len, (da, db)) in steps {
            poly.push(Node::new(pa, pb).cartesian());
            pa += len * da;
            pb += len * db;
        }
        let inside = |p: (f64, f64)| {
            (0..6).all(|i| {
                let (u, v) = (poly[i], poly[(i + 1) % 6]);
                (v.0 - u.0) * (p.1 - u.1) - (v.1 - u.1) * (p.0 - u.0) > 1e-9
            })
        };
        let span = 2 * (a + b + c) + 2;
        let mut tris = BTreeSet::new();
        for x in -span..=span {
            for y in -span..=span {
                for m in [l(x, y), r(x, y)] {
                    if inside(m.centroid_cartesian()) {
                        tris.insert(m);
                    }
                }
            }
        }
        Region { tris }
    }

    /// The hexagon translated by a lattice vector so that its center is as close as possible to `center`.
    pub fn hexagon_centered(a: i64, b: i64, c: i64, center: (f64, f64)) -> Self {
        let h = Region::hexagon(a, b, c);
        let n = h.tris.len() as f64;
        let (mut cx, mut cy) = (0.0, 0.0);
        for t in &h.tris {
            let p = t.centroid_cartesian();
            cx += p.0 / n;
            cy += p.1 / n;
        }
        let (dx, dy) = (center.0 - cx, center.1 - cy);
        // Cartesian (dx, dy) = ((u+v)·√3/2, (v−u)/2) in oblique (u, v).
        let s = dx / SQRT3_2;
        let (u0, v0) = ((s - 2.0 * dy) / 2.0, (s + 2.0 * dy) / 2.0);
        let mut best = (f64::INFINITY, ObliqueCoord::new(0, 0));
        for du in -1..=1 {
            for dv in -1..=1 {
                let t = ObliqueCoord::new(libm::floor(u0) as i64 + du, libm::floor(v0) as i64 + dv);
                let (px, py) = t.to_cartesian();
                let d = (px - dx) * (px - dx) + (py - dy) * (py - dy);
                if d < best.0 {
                    best = (d, t);
                }
            }
        }
        h.translate(best.1)
    }

    pub fn translate(&self, v: ObliqueCoord) -> Self {
        Region::from_triangles(self.tris.iter().map(|t| t.translate(v)))
    }

    pub fn len(&self) -> usize {
        self.tris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tris.is_empty()
    }

    pub fn contains(&self, m: Monomer) -> bool {
        self.tris.contains(&m)
    }

    pub fn triangles(&self) -> impl Iterator<Item = Monomer> + '_ {
        self.tris.iter().copied()
    }

    /// Removes the given triangles; every one must belong to the region.
    pub fn remove(&self, ms: &[Monomer]) -> Result<Region, Error> {
        let mut tris = self.tris.clone();
        for m in ms {
            if !tris.remove(m) {
                return Err(Error::ProbeOverlapsHole);
            }
        }
        Ok(Region { tris })
    }

    /// Removes the holes of a system; they must lie inside the region.
    pub fn remove_holes(&self, hs: &HoleSystem) -> Result<Region, Error> {
        self.remove(&hs.monomers()?).map_err(|_| Error::WindowTooSmall)
    }

    /// Number of left triangles minus number of right triangles.
    pub fn imbalance(&self) -> i64 {
        self.tris.iter().map(|t| if t.is_left() { 1 } else { -1 }).sum()
    }

    /// Rights and lefts, each sorted along the x axis so the adjacency matrix is banded.
    fn sorted_parts(&self) -> (Vec<Monomer>, Vec<Monomer>) {
        let key = |m: &Monomer| {
            let c = m.centroid3();
            (c.0, c.1)
        };
        let mut rights: Vec<Monomer> = self.tris.iter().copied().filter(|t| !t.is_left()).collect();
        let mut lefts: Vec<Monomer> = self.tris.iter().copied().filter(|t| t.is_left()).collect();
        rights.sort_by_key(key);
        lefts.sort_by_key(key);
        (rights, lefts)
    }

    /// Lozenge sign flips that make unit weights a Kasteleyn weighting.
    ///
    /// Hexagonal faces and faces around even-charge holes need no negative
    /// edges. Each bounded hole component of odd charge gets a lattice path to
    /// the exterior along which every crossed lozenge is negated.
    fn sign_flips(&self) -> HashSet<LozengeLocation> {
        let mut flips = HashSet::new();
        if self.tris.is_empty() {
            return flips;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
        for t in &self.tris {
            x0 = x0.min(t.pos.x);
            y0 = y0.min(t.pos.y);
            x1 = x1.max(t.pos.x);
            y1 = y1.max(t.pos.y);
        }
        let (x0, y0, x1, y1) = (x0 - 2, y0 - 2, x1 + 2, y1 + 2);
        let in_box = |m: Monomer| m.pos.x >= x0 && m.pos.x <= x1 && m.pos.y >= y0 && m.pos.y <= y1;
        let mut by_node: HashMap<Node, Vec<Monomer>> = HashMap::new();
        let mut missing = Vec::new();
        for x in x0..=x1 {
            for y in y0..=y1 {
                for m in [l(x, y), r(x, y)] {
                    if !self.tris.contains(&m) {
                        missing.push(m);
                        for v in m.vertices() {
                            by_node.entry(v).or_default().push(m);
                        }
                    }
                }
            }
        }
        let mut seen: HashSet<Monomer> = HashSet::new();
        let cartesian_max_x = (x1 + y1) as f64 * SQRT3_2 + 2.0;
        for &start in &missing {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = vec![start];
            seen.insert(start);
            let mut i = 0;
            let mut exterior = false;
            while i < comp.len() {
                let m = comp[i];
                i += 1;
                let p = m.pos;
                if p.x == x0 || p.x == x1 || p.y == y0 || p.y == y1 {
                    exterior = true;
                }
                for v in m.vertices() {
                    for &o in &by_node[&v] {
                        if in_box(o) && seen.insert(o) {
                            comp.push(o);
                        }
                    }
                }
            }
            if exterior || charge(comp.iter().copied()).rem_euclid(2) == 0 {
                continue;
            }
            // Zigzag east from a vertex of the component: south-east then north-east.
            let mut u = comp[0].vertices()[0];
            let mut step = 0;
            while u.cartesian().0 <= cartesian_max_x {
                let v = if step % 2 == 0 { Node::new(u.a + 1, u.b - 1) } else { Node::new(u.a + 1, u.b + 1) };
                if let Some(lz) = edge_lozenge(u, v) {
                    if !flips.remove(&lz) {
                        flips.insert(lz);
                    }
                }
                u = v;
                step += 1;
            }
        }
        flips
    }
}

/// The lozenge whose two triangles share the lattice edge uv.
pub fn edge_lozenge(u: Node, v: Node) -> Option<LozengeLocation> {
    let mut shared = Vec::new();
    for x in [u, v] {
        let (px, py) = ((x.a - x.b).div_euclid(2), (x.a + x.b).div_euclid(2));
        for dx in -1..=1 {
            for dy in -1..=1 {
                for m in [l(px + dx, py + dy), r(px + dx, py + dy)] {
                    let vs = m.vertices();
                    if vs.contains(&u) && vs.contains(&v) && !shared.contains(&m) {
                        shared.push(m);
                    }
                }
            }
        }
    }
    if shared.len() != 2 {
        return None;
    }
    let (rm, lm) = if shared[0].is_left() { (shared[1], shared[0]) } else { (shared[0], shared[1]) };
    LozengeLocation::from_pair(rm, lm)
}

/// Memoized enumeration of perfect matchings on at most 128 triangles.
fn enumerate(order: &[Monomer], adj: &[Vec<usize>]) -> u128 {
    fn go(mask: u128, n: usize, adj: &[Vec<usize>], memo: &mut HashMap<u128, u128>) -> u128 {
        let free = !mask & if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
        if free == 0 {
            return 1;
        }
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let i = free.trailing_zeros() as usize;
        let mut total = 0u128;
        for &j in &adj[i] {
            if mask & (1u128 << j) == 0 {
                total += go(mask | (1u128 << i) | (1u128 << j), n, adj, memo);
            }
        }
        memo.insert(mask, total);
        total
    }
    let mut memo = HashMap::new();
    go(0, order.len(), adj, &mut memo)
}

/// Exact count by matching enumeration.
pub fn brute_force_count(region: &Region) -> Result<BigUint, Error> {
    if region.len() > 128 {
        return Err(Error::RegionTooLarge);
    }
    if region.imbalance() != 0 {
        return Ok(BigUint::zero());
    }
    let mut order: Vec<Monomer> = region.triangles().collect();
    order.sort_by_key(|m| m.centroid3());
    let index: HashMap<Monomer, usize> = order.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let adj: Vec<Vec<usize>> =
        order.iter().map(|m| neighbors_in(*m).iter().filter_map(|o| index.get(o).copied()).collect()).collect();
    Ok(BigUint::from(enumerate(&order, &adj)))
}

/// Exact count as |det| of the signed right-by-left adjacency matrix.
pub fn kasteleyn_count(region: &Region) -> BigUint {
    if region.imbalance() != 0 {
        return BigUint::zero();
    }
    let (rights, lefts) = region.sorted_parts();
    let flips = region.sign_flips();
    let col: HashMap<Monomer, usize> = lefts.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let rows: Vec<Vec<(usize, i64)>> = rights
        .iter()
        .map(|rm| {
            crate::lattice::lozenges_covering(*rm)
                .iter()
                .filter_map(|lz| {
                    let lm = lz.left_monomer();
                    col.get(&lm).map(|&j| (j, if flips.contains(lz) { -1 } else { 1 }))
                })
                .collect()
        })
        .collect();
    integer_det(&rows, lefts.len()).magnitude().clone()
}

/// Brute force up to the enumeration limit, Kasteleyn beyond it.
pub fn count_tilings(region: &Region) -> BigUint {
    if region.len() <= BRUTE_FORCE_LIMIT {
        if let Ok(c) = brute_force_count(region) {
            return c;
        }
    }
    kasteleyn_count(region)
}

/// Probability that a lozenge is present in a uniform tiling of the region.
pub fn oracle_probability(lz: LozengeLocation, region: &Region) -> Result<BigRational, Error> {
    let total = count_tilings(region);
    if total.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let [rm, lm] = lz.monomers();
    let rest = region.remove(&[rm, lm])?;
    let part = count_tilings(&rest);
    Ok(BigRational::new(BigInt::from_biguint(Sign::Plus, part), BigInt::from_biguint(Sign::Plus, total)))
}

/// Rights, lefts, and for each right its (left index, x seam crossings, y seam crossings).
type TorusGraph = (Vec<Monomer>, Vec<Monomer>, Vec<Vec<(usize, i64, i64)>>);

/// A rhombic torus of N×N monomer positions with holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusSpec {
    pub n: i64,
    pub holes: HoleSystem,
}

impl TorusSpec {
    fn wrap(&self, m: Monomer) -> Monomer {
        let mut w = m;
        w.pos = ObliqueCoord::new(m.pos.x.rem_euclid(self.n), m.pos.y.rem_euclid(self.n));
        w
    }

    /// The surviving triangles, with each lozenge tagged by how often it crosses the x and y seams.
    fn graph(&self) -> Result<TorusGraph, Error> {
        if self.n < 1 {
            return Err(Error::HoleTooLarge);
        }
        let mut removed = HashSet::new();
        for m in self.holes.monomers()? {
            if !removed.insert(self.wrap(m)) {
                return Err(Error::HoleTooLarge);
            }
        }
        let mut rights = Vec::new();
        let mut lefts = Vec::new();
        for y in 0..self.n {
            for x in 0..self.n {
                if !removed.contains(&r(x, y)) {
                    rights.push(r(x, y));
                }
                if !removed.contains(&l(x, y)) {
                    lefts.push(l(x, y));
                }
            }
        }
        let col: HashMap<Monomer, usize> = lefts.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let rows = rights
            .iter()
            .map(|rm| {
                crate::lattice::lozenges_covering(*rm)
                    .iter()
                    .filter_map(|lz| {
                        let lm = lz.left_monomer();
                        let w = self.wrap(lm);
                        let sx = (lm.pos.x - w.pos.x) / self.n;
                        let sy = (lm.pos.y - w.pos.y) / self.n;
                        col.get(&w).map(|&j| (j, sx, sy))
                    })
                    .collect()
            })
            .collect();
        Ok((rights, lefts, rows))
    }
}

/// Exact number of tilings of the torus minus its holes.
///
/// Each twisted determinant D_θτ negates lozenges crossing the x seam (θ = 1)
/// or the y seam (τ = 1). After normalizing every D by the sign it assigns to
/// a fixed reference matching, the count is the one combination
/// ½(D₀₀ + D₀₁ + D₁₀ + D₁₁ − 2D_θτ) that weights every homology class positively,
/// which is also the largest of the four.
pub fn torus_count(ts: &TorusSpec) -> Result<BigUint, Error> {
    let (rights, lefts, rows) = ts.graph()?;
    if rights.len() != lefts.len() {
        return Ok(BigUint::zero());
    }
    if rights.is_empty() {
        return Ok(BigUint::one());
    }
    let n = lefts.len();
    let reference = reference_matching(&rows, n).ok_or(Error::ZeroDenominator);
    let reference = match reference {
        Ok(m) => m,
        Err(_) => return Ok(BigUint::zero()),
    };
    let mut d = Vec::with_capacity(4);
    for (th, ta) in [(0i64, 0i64), (0, 1), (1, 0), (1, 1)] {
        let weight = |sx: i64, sy: i64| if (th * sx + ta * sy).rem_euclid(2) == 1 { -1 } else { 1 };
        let m: Vec<Vec<(usize, i64)>> =
            rows.iter().map(|row| row.iter().map(|&(j, sx, sy)| (j, weight(sx, sy))).collect()).collect();
        let det = integer_det(&m, n);
        let mut sign = permutation_sign(&reference);
        for (i, &j) in reference.iter().enumerate() {
            sign *= m[i].iter().find(|e| e.0 == j).map_or(1, |e| e.1);
        }
        d.push(if sign < 0 { -det } else { det });
    }
    let total: BigInt = d.iter().sum();
    let best = d.iter().map(|di| (&total - di * BigInt::from(2)) / BigInt::from(2)).max().unwrap_or_default();
    Ok(best.magnitude().clone())
}

/// Torus count by enumeration, for cross-checks.
pub fn torus_brute_count(ts: &TorusSpec) -> Result<BigUint, Error> {
    let (rights, lefts, rows) = ts.graph()?;
    if rights.len() != lefts.len() {
        return Ok(BigUint::zero());
    }
    if rights.len() + lefts.len() > 128 {
        return Err(Error::RegionTooLarge);
    }
    let nr = rights.len();
    let order: Vec<Monomer> = rights.iter().chain(lefts.iter()).copied().collect();
    let mut adj = vec![Vec::new(); order.len()];
    for (i, row) in rows.iter().enumerate() {
        // Parallel edges on tiny tori are distinct lozenges and are kept.
        for &(j, _, _) in row {
            adj[i].push(nr + j);
            adj[nr + j].push(i);
        }
    }
    Ok(BigUint::from(enumerate(&order, &adj)))
}

/// Finite-size ratio M(T_N ∖ holes) / M(T_N).
pub fn torus_ratio(n: i64, holes: &HoleSystem) -> Result<BigRational, Error> {
    let full = torus_count(&TorusSpec { n, holes: HoleSystem::default() })?;
    let part = torus_count(&TorusSpec { n, holes: holes.clone() })?;
    if full.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRational::new(BigInt::from(part), BigInt::from(full)))
}

/// Any perfect matching of rows to columns (Hopcroft-Karp is unnecessary at oracle sizes).
fn reference_matching(rows: &[Vec<(usize, i64, i64)>], n: usize) -> Option<Vec<usize>> {
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, rows: &[Vec<(usize, i64, i64)>], seen: &mut [bool], match_col: &mut [Option<usize>]) -> bool {
        for &(j, _, _) in &rows[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if match_col[j].is_none() || augment(match_col[j].unwrap_or(0), rows, seen, match_col) {
                match_col[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..rows.len() {
        let mut seen = vec![false; n];
        if !augment(i, rows, &mut seen, &mut match_col) {
            return None;
        }
    }
    let mut row_to_col = vec![0; rows.len()];
    for (j, m) in match_col.iter().enumerate() {
        row_to_col[(*m)?] = j;
    }
    Some(row_to_col)
}

fn permutation_sign(p: &[usize]) -> i64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13] {
        if n % q == 0 {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // Deterministic for n < 3.2e9.
    'witness: for a in [2u64, 7, 61] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Determinant modulo p of a sparse integer matrix, by elimination that only touches nonzero spans.
fn det_mod(rows: &[Vec<(usize, i64)>], n: usize, p: u64) -> u64 {
    let mut a: Vec<Vec<u64>> = vec![vec![0; n]; n];
    let mut hi = vec![0usize; n];
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            a[i][j] = (a[i][j] + v.rem_euclid(p as i64) as u64) % p;
            hi[i] = hi[i].max(j + 1);
        }
    }
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else {
            return 0;
        };
        if piv != k {
            a.swap(piv, k);
            hi.swap(piv, k);
            det = (p - det) % p;
        }
        det = mul_mod(det, a[k][k], p);
        let inv = pow_mod(a[k][k], p - 2, p);
        let end = hi[k];
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for (off, row) in bottom.iter_mut().enumerate() {
            let f = row[k];
            if f == 0 {
                continue;
            }
            let f = mul_mod(f, inv, p);
            for j in k..end {
                let t = mul_mod(f, pivot_row[j], p);
                row[j] = if row[j] >= t { row[j] - t } else { row[j] + p - t };
            }
            let i = k + 1 + off;
            hi[i] = hi[i].max(end);
        }
    }
    det
}

/// Exact determinant of a sparse integer matrix via CRT over 31-bit primes.
fn integer_det(rows: &[Vec<(usize, i64)>], n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let log2_bound: f64 = rows
        .iter()
        .map(|row| {
            let s: f64 = row.iter().map(|&(_, v)| (v * v) as f64).sum();
            if s > 0.0 {
                0.5 * libm::log2(s)
            } else {
                0.0
            }
        })
        .sum();
    let need = log2_bound as u64 + 3;
    let mut modulus = BigInt::one();
    let mut value = BigInt::zero();
    let mut bits = 0u64;
    let mut q = (1u64 << 31) - 1;
    while bits < need {
        while !is_prime(q) {
            q -= 2;
        }
        let p = q;
        q -= 2;
        let rmod = det_mod(rows, n, p);
        // value += modulus · ((r − value)·modulus⁻¹ mod p)
        let pb = BigInt::from(p);
        let cur = (&value % &pb + &pb) % &pb;
        let cur = u64::try_from(cur).unwrap_or(0);
        let mmod = u64::try_from((&modulus % &pb + &pb) % &pb).unwrap_or(0);
        let delta = mul_mod((rmod + p - cur) % p, pow_mod(mmod, p - 2, p), p);
        value += &modulus * BigInt::from(delta);
        modulus *= pb;
        bits += 30;
    }
    let half = &modulus >> 1;
    if value > half {
        value -= &modulus;
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_dets() {
        let rows = vec![vec![(0, 2), (1, 1)], vec![(0, 1), (1, 3)]];
        assert_eq!(integer_det(&rows, 2), BigInt::from(5));
        let rows = vec![vec![(1, 1)], vec![(0, 1)]];
        assert_eq!(integer_det(&rows, 2), BigInt::from(-1));
    }

    #[test]
    fn unit_hexagon() {
        let h = Region::hexagon(1, 1, 1);
        assert_eq!(h.len(), 6);
        assert_eq!(brute_force_count(&h).unwrap(), BigUint::from(2u32));
        assert_eq!(kasteleyn_count(&h), BigUint::from(2u32));
    }
}
