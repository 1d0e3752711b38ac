//! Scaling-limit closed forms.
//!
//! Every ζ-matrix entry is a bracket ⟨g(ζ)⟩ = g(ζ) − g(ζ⁻¹) of a function with
//! real coefficients, hence equal to 2i·Im g(ζ). Determinants are taken of the
//! real imaginary-part matrices in double-double and the powers of 2i are
//! restored analytically.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::ddouble::{det_dd, CDD, DD, PI};
use crate::eisenstein::Eis;
use crate::lattice::SQRT3_2;
use crate::Error;

const SQRT2: f64 = core::f64::consts::SQRT_2;

/// A positive charge: the scaled position of an E multihole with s constituents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositiveCharge {
    pub x: f64,
    pub y: f64,
    pub s: u32,
    pub alpha: i64,
    pub beta: i64,
}

/// A negative charge: a W multihole with t constituents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativeCharge {
    pub z: f64,
    pub w: f64,
    pub t: u32,
    pub gamma: i64,
    pub delta: i64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitProbe {
    pub x: f64,
    pub y: f64,
    pub alpha: i64,
    pub beta: i64,
}

/// Scaled hole data, slope and probe, in oblique coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitConfig {
    pub positives: Vec<PositiveCharge>,
    pub negatives: Vec<NegativeCharge>,
    pub q: Ratio<i64>,
    pub probe: LimitProbe,
}

fn obl_norm2(dx: f64, dy: f64) -> f64 {
    dx * dx + dx * dy + dy * dy
}

/// Cartesian image of an oblique point.
pub fn oblique_to_cartesian(x: f64, y: f64) -> (f64, f64) {
    ((x + y) * SQRT3_2, (y - x) * 0.5)
}

impl LimitConfig {
    pub fn total_positive(&self) -> u32 {
        self.positives.iter().map(|p| p.s).sum()
    }

    pub fn total_negative(&self) -> u32 {
        self.negatives.iter().map(|n| n.t).sum()
    }

    /// (position, signed multiplicity) of every charge, positives first.
    pub fn charges(&self) -> Vec<(f64, f64, f64)> {
        self.positives
            .iter()
            .map(|p| (p.x, p.y, p.s as f64))
            .chain(self.negatives.iter().map(|n| (n.z, n.w, -(n.t as f64))))
            .collect()
    }

    fn check_points(&self) -> Result<(), Error> {
        let mut pts: Vec<(f64, f64)> = vec![(self.probe.x, self.probe.y)];
        pts.extend(self.charges().iter().map(|c| (c.0, c.1)));
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i] == pts[j] {
                    return Err(Error::CoincidentPoints);
                }
            }
        }
        Ok(())
    }

    /// Full validation for the matrix construction: slope, multiplicities, distinct points, S > T.
    pub fn validate(&self) -> Result<(), Error> {
        if (Ratio::from_integer(1) - self.q).numer() % 3 != 0 {
            return Err(Error::BadSlope);
        }
        if self.positives.iter().any(|p| p.s == 0) || self.negatives.iter().any(|n| n.t == 0) {
            return Err(Error::ChargeNotPositive);
        }
        self.check_points()?;
        if self.total_positive() <= self.total_negative() {
            return Err(Error::ChargeNotPositive);
        }
        Ok(())
    }

    /// ν = S − T − 1.
    pub fn nu(&self) -> Result<usize, Error> {
        let (s, t) = (self.total_positive(), self.total_negative());
        if s <= t {
            return Err(Error::ChargeNotPositive);
        }
        Ok((s - t - 1) as usize)
    }

    /// The same configuration with every residue set to zero.
    pub fn without_residues(&self) -> LimitConfig {
        let mut c = self.clone();
        c.probe.alpha = 0;
        c.probe.beta = 0;
        for p in &mut c.positives {
            p.alpha = 0;
            p.beta = 0;
        }
        for n in &mut c.negatives {
            n.gamma = 0;
            n.delta = 0;
        }
        c
    }
}

/// The limit matrices M″ (2S×2S), M₁″ and M₂″ (both (2S+1)×(2S+1)).
///
/// Entries are purely imaginary; they are stored as complex values.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaMatrixSet {
    pub m: Vec<Vec<CDD>>,
    pub m1: Vec<Vec<CDD>>,
    pub m2: Vec<Vec<CDD>>,
}

impl ZetaMatrixSet {
    pub fn to_c64(m: &[Vec<CDD>]) -> Vec<Vec<Complex64>> {
        m.iter().map(|r| r.iter().map(|v| v.to_c64()).collect()).collect()
    }
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

struct Ctx {
    zeta: CDD,
    q: DD,
}

impl Ctx {
    fn dd(v: f64) -> DD {
        DD::from_f64(v)
    }

    /// a − bζ.
    fn lin(&self, a: f64, b: f64) -> CDD {
        CDD::real(Ctx::dd(a)) - self.zeta.scale(Ctx::dd(b))
    }

    /// 1 − qζ.
    fn one_minus_q_zeta(&self) -> CDD {
        CDD::ONE - self.zeta.scale(self.q)
    }

    /// ⟨ζ^e g⟩ given g(ζ).
    fn br(&self, e: i64, g: CDD) -> CDD {
        let w = self.zeta.powi(e) * g;
        CDD::new(DD::ZERO, w.im + w.im)
    }
}

fn build_first_row(cfg: &LimitConfig, ctx: &Ctx, nu: usize, shift: i64) -> Vec<CDD> {
    let p = cfg.probe;
    let r0 = p.alpha - p.beta;
    let mut row = vec![CDD::default()];
    for n in &cfg.negatives {
        let rho = r0 - (n.gamma - n.delta);
        for j in 1..=n.t {
            let f = ctx.one_minus_q_zeta().powi(j as i64 - 1) * ctx.lin(n.z - p.x, n.w - p.y).powi(-(j as i64));
            row.push(ctx.br(rho + shift, f));
            row.push(ctx.br(rho - 2 + shift, f));
        }
    }
    for v in 0..=nu {
        let f = ctx.lin(p.x, p.y).powi(v as i64);
        row.push(ctx.br(r0 + shift, f));
        row.push(ctx.br(r0 - 2 + shift, f));
    }
    row
}

fn build_body(cfg: &LimitConfig, ctx: &Ctx, nu: usize) -> Vec<Vec<CDD>> {
    let p = cfg.probe;
    let mut rows = Vec::new();
    for c in &cfg.positives {
        for u in 0..c.s {
            let mut r1 = Vec::new();
            let mut r2 = Vec::new();
            let rho = (c.alpha - c.beta) - (p.alpha - p.beta);
            let f = ctx.one_minus_q_zeta().powi(u as i64) * ctx.lin(p.x - c.x, p.y - c.y).powi(-(u as i64 + 1));
            r1.push(ctx.br(rho - 2, f));
            r2.push(ctx.br(rho, f));
            for n in &cfg.negatives {
                let rho = (c.alpha - c.beta) - (n.gamma - n.delta);
                for j in 1..=n.t {
                    let f =
                        ctx.one_minus_q_zeta().powi((u + j - 1) as i64).scale(DD::from_f64(binom(u + j - 1, j - 1)))
                            * ctx.lin(n.z - c.x, n.w - c.y).powi(-((u + j) as i64));
                    r1.push(ctx.br(rho - 1, f));
                    r1.push(ctx.br(rho - 3, f));
                    r2.push(ctx.br(rho + 1, f));
                    r2.push(ctx.br(rho - 1, f));
                }
            }
            let rho = c.alpha - c.beta;
            for v in 0..=nu as u32 {
                let f = if v < u {
                    CDD::default()
                } else {
                    ctx.one_minus_q_zeta().powi(u as i64).scale(DD::from_f64(binom(v, u)))
                        * ctx.lin(c.x, c.y).powi((v - u) as i64)
                };
                r1.push(ctx.br(rho - 1, f));
                r1.push(ctx.br(rho - 3, f));
                r2.push(ctx.br(rho + 1, f));
                r2.push(ctx.br(rho - 1, f));
            }
            rows.push(r1);
            rows.push(r2);
        }
    }
    rows
}

fn ctx_for(cfg: &LimitConfig) -> Ctx {
    Ctx { zeta: CDD::zeta(), q: DD::from_f64(*cfg.q.numer() as f64) / DD::from_f64(*cfg.q.denom() as f64) }
}

/// Builds M″, M₁″ and M₂″ from the block patterns.
pub fn build_limit_matrices(cfg: &LimitConfig) -> Result<ZetaMatrixSet, Error> {
    cfg.validate()?;
    let nu = cfg.nu()?;
    let ctx = ctx_for(cfg);
    let body = build_body(cfg, &ctx, nu);
    let mut m1 = vec![build_first_row(cfg, &ctx, nu, 0)];
    let mut m2 = vec![build_first_row(cfg, &ctx, nu, -1)];
    // The leading column below the corner is the same for both.
    m1.extend(body.iter().cloned());
    m2.extend(body.iter().cloned());
    let m = body.iter().map(|r| r[1..].to_vec()).collect();
    Ok(ZetaMatrixSet { m, m1, m2 })
}

fn imag_det(m: &[Vec<CDD>]) -> DD {
    det_dd(m.iter().map(|r| r.iter().map(|v| v.im).collect()).collect())
}

/// Real determinants d, d₁, d₂ of the imaginary parts; det M = (i)^n·d etc.
struct ImagDets {
    d: DD,
    d1: DD,
    d2: DD,
}

fn imag_dets(cfg: &LimitConfig) -> Result<ImagDets, Error> {
    let set = build_limit_matrices(cfg)?;
    let d = imag_det(&set.m);
    if d.hi == 0.0 {
        return Err(Error::SingularDenominator);
    }
    Ok(ImagDets { d, d1: imag_det(&set.m1), d2: imag_det(&set.m2) })
}

/// (det M₁″ − det M₂″)/det M″.
pub fn field_ratio(cfg: &LimitConfig) -> Result<Complex64, Error> {
    let ds = imag_dets(cfg)?;
    // One extra row and column contributes a single factor of i.
    Ok(Complex64::new(0.0, ((ds.d1 - ds.d2) / ds.d).to_f64()))
}

/// The closed form i√3·{Σ s_k(2Δx+Δy)/|Δ|² − Σ t_l(2Δx+Δy)/|Δ|²}, Δ = probe − charge.
pub fn proposition31_rhs(cfg: &LimitConfig) -> Result<Complex64, Error> {
    cfg.check_points()?;
    let s = oblique_sum(cfg, |dx, dy| 2.0 * dx + dy);
    Ok(Complex64::new(0.0, libm::sqrt(3.0) * s))
}

/// Σ ±mult·k(Δ)/|Δ|² over all charges, Δ = probe − charge.
fn oblique_sum<K: Fn(f64, f64) -> f64>(cfg: &LimitConfig, k: K) -> f64 {
    cfg.charges()
        .iter()
        .map(|&(x, y, m)| {
            let (dx, dy) = (cfg.probe.x - x, cfg.probe.y - y);
            m * k(dx, dy) / obl_norm2(dx, dy)
        })
        .sum()
}

/// Oblique projections (Fx, Fy) of the limiting field at scale R.
pub fn coulomb_field(cfg: &LimitConfig, r: f64) -> Result<(f64, f64), Error> {
    cfg.check_points()?;
    let c = 3.0 / (4.0 * core::f64::consts::PI * r);
    Ok((c * oblique_sum(cfg, |dx, dy| 2.0 * dx + dy), c * oblique_sum(cfg, |dx, dy| dx + 2.0 * dy)))
}

/// The same field as a Cartesian vector, (3/4πR)·Σ ch_i·r̂_i/|z₀ − z_i| with ch = ±2s.
pub fn coulomb_field_polar(cfg: &LimitConfig, r: f64) -> Result<(f64, f64), Error> {
    cfg.check_points()?;
    let c = 3.0 / (4.0 * core::f64::consts::PI * r);
    let (px, py) = oblique_to_cartesian(cfg.probe.x, cfg.probe.y);
    let mut v = (0.0, 0.0);
    for (x, y, m) in cfg.charges() {
        let (cx, cy) = oblique_to_cartesian(x, y);
        let (dx, dy) = (px - cx, py - cy);
        let d2 = dx * dx + dy * dy;
        v.0 += c * 2.0 * m * dx / d2;
        v.1 += c * 2.0 * m * dy / d2;
    }
    Ok(v)
}

/// Oblique projections of a Cartesian vector on the unit axes at polar ∓π/6.
pub fn project_oblique(v: (f64, f64)) -> (f64, f64) {
    (SQRT3_2 * v.0 - 0.5 * v.1, SQRT3_2 * v.0 + 0.5 * v.1)
}

/// (p1, p2, p3) to first order in 1/R from the determinant ratios; p3 = 1 − p1 − p2.
pub fn p1_asymptotic(cfg: &LimitConfig, r: f64) -> Result<(f64, f64, f64), Error> {
    let ds = imag_dets(cfg)?;
    // Entries store 2·Im, so det M₁″/det M″ = i·d₁/d and p_k = 1/3 + d_k/(2πR·d).
    let piv = PI * DD::from_f64(2.0 * r);
    let p1 = (DD::from_f64(1.0) / DD::from_f64(3.0) + ds.d1 / (ds.d * piv)).to_f64();
    let p2 = (DD::from_f64(1.0) / DD::from_f64(3.0) + ds.d2 / (ds.d * piv)).to_f64();
    Ok((p1, p2, 1.0 - p1 - p2))
}

/// The closed form for 1 − 3p1 to first order in 1/R.
pub fn one_minus_3p1(cfg: &LimitConfig, r: f64) -> Result<f64, Error> {
    cfg.check_points()?;
    let s = oblique_sum(cfg, |dx, dy| dx + dy);
    Ok(-3.0 * libm::sqrt(3.0) / (2.0 * core::f64::consts::PI) * s / r)
}

/// Cartesian gradient of the limit surface at a Cartesian point.
pub fn surface_gradient_limit(cfg: &LimitConfig, point: (f64, f64)) -> Result<(f64, f64), Error> {
    let k = 3.0 / (SQRT2 * core::f64::consts::PI);
    let mut g = (0.0, 0.0);
    for (x, y, m) in cfg.charges() {
        let (cx, cy) = oblique_to_cartesian(x, y);
        let (dx, dy) = (point.0 - cx, point.1 - cy);
        let d2 = dx * dx + dy * dy;
        if d2 == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        g.0 += k * m * dy / d2;
        g.1 -= k * m * dx / d2;
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HelicoidVariant {
    /// s-refined half helicoid: copies shifted by 2πc·j/s.
    HalfRefined,
    /// s-refined dotted helicoid: copies shifted by πc·j/s.
    DottedRefined,
}

/// A refined helicoid centered at a Cartesian point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelicoidSpec {
    pub center: (f64, f64),
    pub pitch: f64,
    pub refinement: u32,
    pub variant: HelicoidVariant,
}

impl HelicoidSpec {
    /// Spacing of the fiber above any point off the axis.
    pub fn modulus(&self) -> f64 {
        let base = match self.variant {
            HelicoidVariant::HalfRefined => 2.0 * core::f64::consts::PI,
            HelicoidVariant::DottedRefined => core::f64::consts::PI,
        };
        libm::fabs(base * self.pitch) / self.refinement as f64
    }

    /// c·θ with θ = atan2 ∈ (−π, π], cut along the ray pointing west of the center.
    pub fn representative(&self, p: (f64, f64)) -> Result<f64, Error> {
        let (dx, dy) = (p.0 - self.center.0, p.1 - self.center.1);
        if dx == 0.0 && dy == 0.0 {
            return Err(Error::CenterSingularity);
        }
        Ok(self.pitch * libm::atan2(dy, dx))
    }

    pub fn gradient(&self, p: (f64, f64)) -> Result<(f64, f64), Error> {
        let (dx, dy) = (p.0 - self.center.0, p.1 - self.center.1);
        let d2 = dx * dx + dy * dy;
        if d2 == 0.0 {
            return Err(Error::CenterSingularity);
        }
        Ok((-self.pitch * dy / d2, self.pitch * dx / d2))
    }
}

/// Fiber of a sum of refined helicoids above `p`: (representative, modulus).
///
/// The moduli must be integer multiples of the smallest one, which is returned.
pub fn helicoid_fiber(specs: &[HelicoidSpec], p: (f64, f64)) -> Result<(f64, f64), Error> {
    let mut rep = 0.0;
    let mut modulus = f64::INFINITY;
    for s in specs {
        rep += s.representative(p)?;
        modulus = modulus.min(s.modulus());
    }
    Ok((rep, if specs.is_empty() { 0.0 } else { modulus }))
}

/// Distance between two fibers a + Mℤ and b + Mℤ.
pub fn fiber_distance(a: f64, b: f64, modulus: f64) -> f64 {
    if modulus == 0.0 {
        return libm::fabs(a - b);
    }
    let mut d = libm::fmod(a - b, modulus);
    if d < 0.0 {
        d += modulus;
    }
    d.min(modulus - d)
}

/// The helicoid sum that the scaled average surface converges to.
pub fn limit_helicoids(cfg: &LimitConfig) -> Vec<HelicoidSpec> {
    let k = 3.0 / (SQRT2 * core::f64::consts::PI);
    cfg.charges()
        .into_iter()
        .map(|(x, y, m)| {
            let mult = libm::fabs(m) as u32;
            HelicoidSpec {
                center: oblique_to_cartesian(x, y),
                pitch: -k * m,
                refinement: 2 * mult,
                variant: HelicoidVariant::HalfRefined,
            }
        })
        .collect()
}

/// det M″ for all residues zero from the closed product formula.
pub fn product_formula_det(cfg: &LimitConfig) -> Result<f64, Error> {
    cfg.validate()?;
    let q = *cfg.q.numer() as f64 / *cfg.q.denom() as f64;
    let pairs: u32 = cfg.positives.iter().map(|p| p.s * p.s.saturating_sub(1) / 2).sum::<u32>()
        + cfg.negatives.iter().map(|n| n.t * n.t.saturating_sub(1) / 2).sum::<u32>();
    let mut v = libm::pow(-3.0, cfg.total_positive() as f64) * libm::pow(q * q + q + 1.0, pairs as f64);
    for (i, a) in cfg.positives.iter().enumerate() {
        for b in &cfg.positives[i + 1..] {
            v *= libm::pow(obl_norm2(a.x - b.x, a.y - b.y), (a.s * b.s) as f64);
        }
        for n in &cfg.negatives {
            v /= libm::pow(obl_norm2(a.x - n.z, a.y - n.w), (a.s * n.t) as f64);
        }
    }
    for (i, a) in cfg.negatives.iter().enumerate() {
        for b in &cfg.negatives[i + 1..] {
            v *= libm::pow(obl_norm2(a.z - b.z, a.w - b.w), (a.t * b.t) as f64);
        }
    }
    Ok(v)
}

/// det M″ as a complex number.
pub fn limit_det(cfg: &LimitConfig) -> Result<f64, Error> {
    let set = build_limit_matrices(cfg)?;
    // (2i)^{2S}·d with the 2 already inside the entries: i^{2S} = (−1)^S.
    let d = imag_det(&set.m).to_f64();
    Ok(if cfg.total_positive() % 2 == 0 { d } else { -d })
}

/// Draws a random configuration: 1–2 positive and 0–2 negative charges with
/// multiplicities 1–2, S > T, points in [−3, 3]² at least 0.5 apart, random residues.
pub fn sample_limit_config<R: rand::Rng + ?Sized>(rng: &mut R) -> LimitConfig {
    const SLOPES: [(i64, i64); 4] = [(1, 1), (-2, 1), (4, 1), (-1, 2)];
    loop {
        let m = rng.gen_range(1..=2usize);
        let n = rng.gen_range(0..=2usize);
        let mut pts: Vec<(f64, f64)> = Vec::new();
        while pts.len() < m + n + 1 {
            let p = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if pts.iter().all(|o| libm::sqrt(obl_norm2(o.0 - p.0, o.1 - p.1)) >= 0.5) {
                pts.push(p);
            }
        }
        let mut res = || rng.gen_range(0..3i64);
        let probe = LimitProbe { x: pts[0].0, y: pts[0].1, alpha: res(), beta: res() };
        let positives: Vec<PositiveCharge> =
            pts[1..=m].iter().map(|&(x, y)| PositiveCharge { x, y, s: 0, alpha: res(), beta: res() }).collect();
        let negatives: Vec<NegativeCharge> =
            pts[m + 1..].iter().map(|&(z, w)| NegativeCharge { z, w, t: 0, gamma: res(), delta: res() }).collect();
        let mut cfg = LimitConfig { positives, negatives, q: Ratio::from_integer(1), probe };
        for p in &mut cfg.positives {
            p.s = rng.gen_range(1..=2);
        }
        for n in &mut cfg.negatives {
            n.t = rng.gen_range(1..=2);
        }
        let (qn, qd) = SLOPES[rng.gen_range(0..SLOPES.len())];
        cfg.q = Ratio::new(qn, qd);
        if cfg.total_positive() > cfg.total_negative() {
            return cfg;
        }
    }
}

/// A function known by its values at ζ and ζ⁻¹.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaPair {
    pub at_zeta: Eis,
    pub at_inv: Eis,
}

impl ZetaPair {
    /// A function with rational coefficients, whose value at ζ⁻¹ is the conjugate.
    pub fn real(at_zeta: Eis) -> Self {
        ZetaPair { at_inv: at_zeta.conj(), at_zeta }
    }

    /// ⟨ζ^k f(ζ)⟩.
    pub fn bracket(&self, k: i64) -> Eis {
        &(&Eis::zeta_pow(k) * &self.at_zeta) - &(&Eis::zeta_pow(-k) * &self.at_inv)
    }
}

pub type Mat2 = [[Eis; 2]; 2];
pub type Mat3 = [[Eis; 3]; 3];

/// A(a) = [[⟨ζ^{a−1}f⟩, ⟨ζ^{a−3}f⟩], [⟨ζ^{a+1}f⟩, ⟨ζ^{a−1}f⟩]].
pub fn bracket_block2(a: i64, f: &ZetaPair) -> Mat2 {
    [[f.bracket(a - 1), f.bracket(a - 3)], [f.bracket(a + 1), f.bracket(a - 1)]]
}

/// {R1 ← R2, R2 ← −R1 − R2}.
pub fn lower_by_rows(m: &Mat2) -> Mat2 {
    let r2: [Eis; 2] = core::array::from_fn(|j| -&(&m[0][j] + &m[1][j]));
    [m[1].clone(), r2]
}

/// {C2 ← C1, C1 ← −C1 − C2}. Exact arithmetic shows this lowers a by one, like the row operations.
pub fn lower_by_columns(m: &Mat2) -> Mat2 {
    core::array::from_fn(|i| [-&(&m[i][0] + &m[i][1]), m[i][0].clone()])
}

/// {C1 ← C2, C2 ← −C1 − C2}, the inverse of [`lower_by_columns`]; turns A(a) into A(a+1).
pub fn raise_by_columns(m: &Mat2) -> Mat2 {
    core::array::from_fn(|i| [m[i][1].clone(), -&(&m[i][0] + &m[i][1])])
}

/// The 3×3 starting matrix with parameters α, β, γ.
pub fn bracket_block3(alpha: i64, beta: i64, gamma: i64, f: &ZetaPair) -> Mat3 {
    [
        [Eis::zero(), f.bracket(1 + alpha), f.bracket(-1 + alpha)],
        [f.bracket(-3 + beta), f.bracket(-1 + gamma), f.bracket(-3 + gamma)],
        [f.bracket(-1 + beta), f.bracket(1 + gamma), f.bracket(-1 + gamma)],
    ]
}

/// {C2 ← −C2 − C3, C3 ← C2}, then {R2 ← −R2 − R3, R3 ← R2}.
pub fn shift_block3(m: &Mat3) -> Mat3 {
    let c: Mat3 = core::array::from_fn(|i| [m[i][0].clone(), -&(&m[i][1] + &m[i][2]), m[i][1].clone()]);
    let r2: [Eis; 3] = core::array::from_fn(|j| -&(&c[1][j] + &c[2][j]));
    [c[0].clone(), r2, c[1].clone()]
}

/// The matrix the operations are claimed to produce.
pub fn shifted_block3(alpha: i64, beta: i64, gamma: i64, f: &ZetaPair) -> Mat3 {
    [
        [Eis::zero(), f.bracket(alpha), f.bracket(-2 + alpha)],
        [f.bracket(-2 + beta), f.bracket(-1 + gamma), f.bracket(-3 + gamma)],
        [f.bracket(beta), f.bracket(1 + gamma), f.bracket(-1 + gamma)],
    ]
}
