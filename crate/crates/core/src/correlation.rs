//! Joint correlations, lozenge placement probabilities and the discrete field.
//!
//! Rights index the rows and lefts the columns of [M_P | M_U]. The s = 0
//! U-columns are exact multiples of κ, so configurations with m − n ≤ 2 are
//! evaluated in ℚ[κ]; larger charge imbalances use extrapolated U_s.

use alloc::vec;
use alloc::vec::Vec;

use crate::coupling::{u0_exact, u_coefficient, CouplingSource, UFitConfig};
use crate::ddouble::LuF64;
use crate::exact::{det_kratio, kappa_f64, KRatio, KappaFixed};
use crate::lattice::{
    lozenges_covering, pairable, validate_system, HoleSystem, LozengeDir, LozengeLocation, Monomer, Probe, TriHole,
    SQRT3_2,
};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exactness {
    /// Computed in ℚ[κ] with no approximation.
    Exact,
    /// Uses U_s with s ≥ 1, which are only known through extrapolation.
    Extrapolated,
}

impl Exactness {
    pub fn and(self, o: Exactness) -> Exactness {
        if self == Exactness::Exact && o == Exactness::Exact {
            Exactness::Exact
        } else {
            Exactness::Extrapolated
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Exactness::Exact => "exact",
            Exactness::Extrapolated => "extrapolated",
        }
    }
}

/// Rights and lefts in the order that fixes the rows and columns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonomerConfig {
    pub rights: Vec<Monomer>,
    pub lefts: Vec<Monomer>,
}

impl MonomerConfig {
    pub fn from_monomers<I: IntoIterator<Item = Monomer>>(mons: I) -> Self {
        let (lefts, rights) = mons.into_iter().partition(|m| m.is_left());
        MonomerConfig { rights, lefts }
    }

    pub fn charge(&self) -> i64 {
        self.rights.len() as i64 - self.lefts.len() as i64
    }

    /// Mirror image across the vertical lattice line through the origin.
    pub fn reflect(&self) -> MonomerConfig {
        MonomerConfig {
            rights: self.lefts.iter().map(|m| m.reflect()).collect(),
            lefts: self.rights.iter().map(|m| m.reflect()).collect(),
        }
    }

    /// The configuration itself, or its mirror image when it has more lefts than rights.
    pub fn canonical(&self) -> MonomerConfig {
        if self.rights.len() >= self.lefts.len() {
            self.clone()
        } else {
            self.reflect()
        }
    }

    pub fn all(&self) -> Vec<Monomer> {
        self.rights.iter().chain(self.lefts.iter()).copied().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationOptions {
    pub u_fit: UFitConfig,
    /// Largest accepted relative error of an extrapolated determinant.
    pub tolerance: f64,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        CorrelationOptions { u_fit: UFitConfig::default(), tolerance: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationValue {
    /// |det|.
    pub value: f64,
    /// The determinant before taking the absolute value.
    pub signed: f64,
    /// The exact signed determinant when available.
    pub exact: Option<KRatio>,
    pub exactness: Exactness,
    /// Absolute error estimate (zero when exact).
    pub error: f64,
}

pub(crate) fn kappa_fixed() -> KappaFixed {
    KappaFixed::new(192)
}

fn exact_matrix<S: CouplingSource>(src: &S, cfg: &MonomerConfig) -> Vec<Vec<KRatio>> {
    let blocks = (cfg.rights.len() - cfg.lefts.len()) / 2;
    debug_assert!(blocks <= 1);
    cfg.rights
        .iter()
        .map(|r| {
            let (a, b) = (r.pos.x, r.pos.y);
            let mut row: Vec<KRatio> =
                cfg.lefts.iter().map(|l| src.coupling(a - l.pos.x, b - l.pos.y).to_kratio()).collect();
            if blocks == 1 {
                row.push(u0_exact(a, b + 1).to_kratio());
                row.push(u0_exact(a + 1, b).to_kratio());
            }
            row
        })
        .collect()
}

/// U_s(a, b) as a float with its error estimate.
fn u_value(s: usize, a: i64, b: i64, fit: &UFitConfig) -> Result<(f64, f64), Error> {
    if s == 0 {
        return Ok((crate::coupling::chi(a - b - 1) as f64 * kappa_f64() / 2.0, 0.0));
    }
    match u_coefficient(s, a, b, fit) {
        Ok(u) => Ok((u.value, u.error)),
        Err(Error::IllConditioned { estimate }) => Err(Error::ExtrapolationTolerance { estimate }),
        Err(e) => Err(e),
    }
}

/// The U part of one row: U_s(a, b+1), U_s(a+1, b) for s < blocks.
fn u_row(r: Monomer, blocks: usize, fit: &UFitConfig) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let (a, b) = (r.pos.x, r.pos.y);
    let mut vals = Vec::with_capacity(2 * blocks);
    let mut errs = Vec::with_capacity(2 * blocks);
    for s in 0..blocks {
        for (x, y) in [(a, b + 1), (a + 1, b)] {
            let (v, e) = u_value(s, x, y, fit)?;
            vals.push(v);
            errs.push(e);
        }
    }
    Ok((vals, errs))
}

fn float_det<S: CouplingSource>(src: &S, cfg: &MonomerConfig, opts: &CorrelationOptions) -> Result<(f64, f64), Error> {
    let blocks = (cfg.rights.len() - cfg.lefts.len()) / 2;
    let mut m = Vec::with_capacity(cfg.rights.len());
    let mut err = Vec::with_capacity(cfg.rights.len());
    for r in &cfg.rights {
        let mut row: Vec<f64> =
            cfg.lefts.iter().map(|l| src.coupling(r.pos.x - l.pos.x, r.pos.y - l.pos.y).to_f64_auto()).collect();
        let mut erow = vec![0.0; row.len()];
        let (uv, ue) = u_row(*r, blocks, &opts.u_fit)?;
        row.extend(uv);
        erow.extend(ue);
        m.push(row);
        err.push(erow);
    }
    let Some(lu) = LuF64::factor(m) else {
        return Ok((0.0, f64::INFINITY));
    };
    let det = lu.det();
    // First-order propagation: ∂det/∂A_ij = det·(A⁻¹)_ji.
    let n = err.len();
    let mut sens = 0.0;
    for j in 0..n {
        if err.iter().all(|row| row[j] == 0.0) {
            continue;
        }
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let inv_row = lu.solve_transpose(&e);
        for i in 0..n {
            sens += libm::fabs(inv_row[i]) * err[i][j];
        }
    }
    Ok((det, libm::fabs(det) * sens))
}

/// |det [M_P | M_U]| for the given rights and lefts.
pub fn correlation_det<S: CouplingSource>(
    src: &S,
    cfg: &MonomerConfig,
    opts: &CorrelationOptions,
) -> Result<CorrelationValue, Error> {
    if !pairable(&cfg.all()) {
        return Err(Error::UnpairableConfiguration);
    }
    correlation_det_unchecked(src, cfg, opts)
}

fn correlation_det_unchecked<S: CouplingSource>(
    src: &S,
    cfg: &MonomerConfig,
    opts: &CorrelationOptions,
) -> Result<CorrelationValue, Error> {
    let cfg = cfg.canonical();
    if (cfg.rights.len() - cfg.lefts.len()) % 2 == 1 {
        return Err(Error::UnpairableConfiguration);
    }
    if cfg.rights.len() - cfg.lefts.len() <= 2 {
        let d = det_kratio(&exact_matrix(src, &cfg));
        let signed = d.to_f64(&kappa_fixed());
        return Ok(CorrelationValue {
            value: libm::fabs(signed),
            signed,
            exact: Some(d),
            exactness: Exactness::Exact,
            error: 0.0,
        });
    }
    let (signed, error) = float_det(src, &cfg, opts)?;
    let rel = if signed == 0.0 { f64::INFINITY } else { error / libm::fabs(signed) };
    if !(rel <= opts.tolerance) {
        return Err(Error::ExtrapolationTolerance { estimate: rel });
    }
    Ok(CorrelationValue { value: libm::fabs(signed), signed, exact: None, exactness: Exactness::Extrapolated, error })
}

/// Probes first (a lozenge contributes its right then its left monomer), then hole monomers.
fn system_config(hs: &HoleSystem, probes: &[Probe]) -> Result<MonomerConfig, Error> {
    let mut mons: Vec<Monomer> = probes.iter().flat_map(|p| p.monomers()).collect();
    mons.extend(hs.monomers()?);
    Ok(MonomerConfig::from_monomers(mons))
}

/// ω̂ of the holes together with extra probes.
pub fn omega<S: CouplingSource>(
    src: &S,
    hs: &HoleSystem,
    probes: &[Probe],
    opts: &CorrelationOptions,
) -> Result<CorrelationValue, Error> {
    validate_system(hs, probes)?;
    correlation_det_unchecked(src, &system_config(hs, probes)?, opts)
}

/// Occupation probability of a lozenge as a signed determinant ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct Probability {
    /// Raw ratio; not clamped, so violations of [0, 1] stay visible.
    pub value: f64,
    pub numer: Option<KRatio>,
    pub denom: Option<KRatio>,
    pub exactness: Exactness,
    pub error: f64,
}

impl Probability {
    pub fn clamped(&self) -> f64 {
        self.value.clamp(0.0, 1.0)
    }
}

fn ratio(num: CorrelationValue, den: &CorrelationValue) -> Result<Probability, Error> {
    if den.exact.as_ref().map_or(den.signed == 0.0, |d| d.is_zero()) {
        return Err(Error::ZeroDenominator);
    }
    let value = match (&num.exact, &den.exact) {
        (Some(n), Some(d)) => {
            let kf = kappa_fixed();
            n.to_f64(&kf) / d.to_f64(&kf)
        }
        _ => num.signed / den.signed,
    };
    let error = libm::fabs(value)
        * (num.error / libm::fabs(num.signed).max(f64::MIN_POSITIVE) + den.error / libm::fabs(den.signed));
    Ok(Probability {
        value,
        numer: num.exact,
        denom: den.exact.clone(),
        exactness: num.exactness.and(den.exactness),
        error: if error.is_finite() { error } else { 0.0 },
    })
}

/// ω̂(L, Q…)/ω̂(Q…), with L in the first row and column so the sign is fixed.
pub fn placement_probability<S: CouplingSource>(
    src: &S,
    lz: LozengeLocation,
    hs: &HoleSystem,
    opts: &CorrelationOptions,
) -> Result<Probability, Error> {
    validate_system(hs, &[Probe::Lozenge(lz)])?;
    let den = correlation_det_unchecked(src, &system_config(hs, &[])?, opts)?;
    let num = correlation_det_unchecked(src, &system_config(hs, &[Probe::Lozenge(lz)])?, opts)?;
    ratio(num, &den)
}

/// The three probabilities of the lozenges covering `e`, sharing one denominator.
pub fn covering_probabilities<S: CouplingSource>(
    src: &S,
    e: Monomer,
    hs: &HoleSystem,
    opts: &CorrelationOptions,
) -> Result<[Probability; 3], Error> {
    let lz = lozenges_covering(e);
    validate_system(hs, &[])?;
    if hole_triangles(hs)?.contains(&e) {
        return Err(Error::ProbeOverlapsHole);
    }
    let den = correlation_det_unchecked(src, &system_config(hs, &[])?, opts)?;
    let mut out: Vec<Probability> = Vec::with_capacity(3);
    for l in lz {
        let partner_free = validate_system(hs, &[Probe::Lozenge(l)]);
        match partner_free {
            // A lozenge whose partner triangle lies in a hole can never be placed.
            Err(Error::ProbeOverlapsHole) => out.push(Probability {
                value: 0.0,
                numer: den.exact.as_ref().map(|_| KRatio::zero()),
                denom: den.exact.clone(),
                exactness: den.exactness,
                error: 0.0,
            }),
            Err(e) => return Err(e),
            Ok(_) => {
                let num = correlation_det_unchecked(src, &system_config(hs, &[Probe::Lozenge(l)])?, opts)?;
                out.push(ratio(num, &den)?);
            }
        }
    }
    let mut it = out.into_iter();
    Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

/// Unit vectors e₁, e₂, e₃ at polar angles 0, 2π/3, 4π/3.
pub fn unit_vectors() -> [(f64, f64); 3] {
    LozengeDir::ALL.map(|d| d.unit())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample {
    pub probe: Monomer,
    /// Projection on the x axis, (√3/2)(p1 − p2) for a left probe.
    pub fx: f64,
    /// Projection on the y axis, (√3/2)(p1 − p3) for a left probe.
    pub fy: f64,
    pub p: [f64; 3],
    pub exactness: Exactness,
    /// Whether p1 + p2 + p3 = 1 holds as an identity in ℚ[κ]; `None` if not exact.
    pub exact_sum_is_one: Option<bool>,
}

impl FieldSample {
    /// The field as a Cartesian vector, Σ ±p_k e_k.
    pub fn cartesian(&self) -> (f64, f64) {
        let sign = if self.probe.is_left() { 1.0 } else { -1.0 };
        let e = unit_vectors();
        (0..3).fold((0.0, 0.0), |(x, y), k| (x + sign * self.p[k] * e[k].0, y + sign * self.p[k] * e[k].1))
    }
}

fn sample_from(e: Monomer, ps: &[Probability; 3]) -> FieldSample {
    let p = [ps[0].value, ps[1].value, ps[2].value];
    let sign = if e.is_left() { 1.0 } else { -1.0 };
    let exactness = ps.iter().fold(Exactness::Exact, |acc, q| acc.and(q.exactness));
    let exact_sum_is_one = match (&ps[0].numer, &ps[1].numer, &ps[2].numer, &ps[0].denom) {
        (Some(a), Some(b), Some(c), Some(d)) => Some(&(a + b) + c == *d),
        _ => None,
    };
    FieldSample {
        probe: e,
        fx: sign * SQRT3_2 * (p[0] - p[1]),
        fy: sign * SQRT3_2 * (p[0] - p[2]),
        p,
        exactness,
        exact_sum_is_one,
    }
}

/// The discrete field at `e`; for a right-pointing `e` this is the mirror field built from −e_k.
pub fn discrete_field<S: CouplingSource>(
    src: &S,
    e: Monomer,
    hs: &HoleSystem,
    opts: &CorrelationOptions,
) -> Result<FieldSample, Error> {
    let ps = covering_probabilities(src, e, hs, opts)?;
    Ok(sample_from(e, &ps))
}

/// T_{α,β}(x, y): relative change of ω̂ when a test E hole moves by (α, β), per unit length.
pub fn test_charge_field<S: CouplingSource>(
    src: &S,
    x: i64,
    y: i64,
    alpha: i64,
    beta: i64,
    hs: &HoleSystem,
    opts: &CorrelationOptions,
) -> Result<f64, Error> {
    if alpha == 0 && beta == 0 {
        return Err(Error::DegenerateDirection);
    }
    let with = |h: TriHole| {
        let mut sys = hs.clone();
        sys.multiholes.push(crate::lattice::MultiHole::single(h));
        omega(src, &sys, &[], opts)
    };
    let base = with(TriHole::e(x, y))?;
    let moved = with(TriHole::e(x + alpha, y + beta))?;
    let p = ratio(moved, &base)?;
    let len = libm::sqrt((alpha * alpha + alpha * beta + beta * beta) as f64);
    Ok((libm::fabs(p.value) - 1.0) / len)
}

/// Fast float probabilities for many lozenges against one fixed hole system.
///
/// Bordering the hole matrix M by one row b and column c gives
/// det/det M = a − bᵀM⁻¹c, so each probe costs one triangular solve.
pub struct FloatCorrelator<F: Fn(i64, i64) -> f64> {
    coupling: F,
    rights: Vec<Monomer>,
    lefts: Vec<Monomer>,
    reflected: bool,
    blocks: usize,
    fit: UFitConfig,
    lu: Option<LuF64>,
}

impl<F: Fn(i64, i64) -> f64> FloatCorrelator<F> {
    pub fn new(coupling: F, hs: &HoleSystem, fit: UFitConfig) -> Result<Self, Error> {
        validate_system(hs, &[])?;
        let raw = system_config(hs, &[])?;
        let reflected = raw.rights.len() < raw.lefts.len();
        let cfg = raw.canonical();
        let blocks = (cfg.rights.len() - cfg.lefts.len()) / 2;
        let mut m = Vec::with_capacity(cfg.rights.len());
        for r in &cfg.rights {
            let mut row: Vec<f64> = cfg.lefts.iter().map(|l| coupling(r.pos.x - l.pos.x, r.pos.y - l.pos.y)).collect();
            row.extend(u_row(*r, blocks, &fit)?.0);
            m.push(row);
        }
        let lu = if m.is_empty() { None } else { Some(LuF64::factor(m).ok_or(Error::ZeroDenominator)?) };
        Ok(FloatCorrelator { coupling, rights: cfg.rights, lefts: cfg.lefts, reflected, blocks, fit, lu })
    }

    pub fn denominator(&self) -> f64 {
        self.lu.as_ref().map_or(1.0, |lu| lu.det())
    }

    /// Raw probability of a lozenge; the caller is responsible for disjointness from the holes.
    pub fn probability(&self, lz: LozengeLocation) -> Result<f64, Error> {
        let [rm, lm] = lz.monomers();
        let (rm, lm) = if self.reflected { (lm.reflect(), rm.reflect()) } else { (rm, lm) };
        let p = |r: Monomer, l: Monomer| (self.coupling)(r.pos.x - l.pos.x, r.pos.y - l.pos.y);
        let a = p(rm, lm);
        let Some(lu) = &self.lu else {
            return Ok(a);
        };
        let mut b: Vec<f64> = self.lefts.iter().map(|&l| p(rm, l)).collect();
        b.extend(u_row(rm, self.blocks, &self.fit)?.0);
        let c: Vec<f64> = self.rights.iter().map(|&r| p(r, lm)).collect();
        let x = lu.solve(&c);
        Ok(a - b.iter().zip(x.iter()).map(|(u, v)| u * v).sum::<f64>())
    }

    /// The three covering probabilities and the resulting field sample.
    pub fn field(&self, e: Monomer, hs_triangles: &hashbrown::HashSet<Monomer>) -> Result<FieldSample, Error> {
        let mut p = [0.0; 3];
        for (k, lz) in lozenges_covering(e).into_iter().enumerate() {
            let [rm, lm] = lz.monomers();
            p[k] = if hs_triangles.contains(&rm) || hs_triangles.contains(&lm) { 0.0 } else { self.probability(lz)? };
        }
        let sign = if e.is_left() { 1.0 } else { -1.0 };
        Ok(FieldSample {
            probe: e,
            fx: sign * SQRT3_2 * (p[0] - p[1]),
            fy: sign * SQRT3_2 * (p[0] - p[2]),
            p,
            exactness: if self.blocks <= 1 { Exactness::Exact } else { Exactness::Extrapolated },
            exact_sum_is_one: None,
        })
    }
}

/// Every unit triangle covered by the holes of a system.
pub fn hole_triangles(hs: &HoleSystem) -> Result<hashbrown::HashSet<Monomer>, Error> {
    Ok(hs.holes()?.into_iter().flat_map(|h| h.triangles()).collect())
}
