//! Thurston measure on the boundary circle.
//!
//! The Thurston measure on torus foliation space is half of Lebesgue
//! measure in the canonical half-plane chart. Cone volumes below the unit
//! extremal-length ball push it to a probability measure on the boundary
//! circle, whose density against the round measure is the extremal-length
//! ratio Poisson kernel. Boundary sets are finite unions of half-open
//! angle intervals in `[0, π)` with `t = −cot θ`.

use crate::mapping_class::MappingClass;
use crate::quad::{integrate_segments, QuadOptions, QuadResult};
use crate::teich::{BoundaryPoint, Foliation, Modulus};
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

/// Errors from boundary arc-set construction.
#[derive(Debug, Clone, PartialEq)]
pub enum ArcError {
    /// Interval endpoints must satisfy `0 ≤ a < b ≤ π` and be finite.
    InvalidInterval(f64, f64),
}

impl std::fmt::Display for ArcError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArcError::InvalidInterval(a, b) => {
                write!(f, "invalid arc [{a}, {b}): need 0 <= a < b <= pi")
            }
        }
    }
}

impl std::error::Error for ArcError {}

/// A Borel subset of the boundary circle: a finite union of disjoint,
/// sorted, half-open intervals `[a, b) ⊂ [0, π)` in the angle chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet {
    segments: Vec<(f64, f64)>,
}

impl ArcSet {
    /// Builds an arc set from (possibly overlapping, unsorted) intervals.
    pub fn new(intervals: &[(f64, f64)]) -> Result<Self, ArcError> {
        let mut segs: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for &(a, b) in intervals {
            if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= PI) {
                return Err(ArcError::InvalidInterval(a, b));
            }
            segs.push((a, b));
        }
        segs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(segs.len());
        for (a, b) in segs {
            match merged.last_mut() {
                Some((_, last_b)) if a <= *last_b => *last_b = last_b.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(ArcSet { segments: merged })
    }

    pub fn empty() -> Self {
        ArcSet {
            segments: Vec::new(),
        }
    }

    /// The full circle `[0, π)`.
    pub fn full() -> Self {
        ArcSet {
            segments: vec![(0.0, PI)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.segments == [(0.0, PI)]
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.segments.iter().any(|&(a, b)| a <= theta && theta < b)
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut all = self.segments.clone();
        all.extend_from_slice(&other.segments);
        ArcSet::new(&all).expect("members are valid")
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let mut out = Vec::new();
        for &(a, b) in &self.segments {
            for &(c, d) in &other.segments {
                let (lo, hi) = (a.max(c), b.min(d));
                if lo < hi {
                    out.push((lo, hi));
                }
            }
        }
        ArcSet { segments: out }
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for &(a, b) in &self.segments {
            if cursor < a {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < PI {
            out.push((cursor, PI));
        }
        ArcSet { segments: out }
    }

    /// Image under the boundary Möbius action, split at the `θ = 0` seam
    /// when an interval wraps.
    pub fn mobius_image(&self, g: &MappingClass) -> ArcSet {
        if self.is_full() {
            return ArcSet::full();
        }
        let mut out: Vec<(f64, f64)> = Vec::new();
        for &(a, b) in &self.segments {
            let ia = g.act_on_boundary(BoundaryPoint::from_angle(a)).angle();
            // b = π is the seam approached from below
            let ib = if b >= PI {
                g.act_on_boundary(BoundaryPoint::Infinity).angle()
            } else {
                g.act_on_boundary(BoundaryPoint::from_angle(b)).angle()
            };
            if ia < ib {
                out.push((ia, ib));
            } else {
                // wraps through the seam
                if ia < PI {
                    out.push((ia, PI));
                }
                if 0.0 < ib {
                    out.push((0.0, ib));
                }
            }
        }
        ArcSet::new(&out).expect("Möbius images stay in range")
    }
}

/// How a measure value was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Quadrature,
    MonteCarlo { seed: u64 },
}

/// A measure value with its error estimate and provenance.
#[derive(Debug, Clone, Copy)]
pub struct MeasureReport {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: Method,
    pub evaluations: usize,
    /// Set when the quadrature budget was exhausted before convergence.
    pub degraded: bool,
}

impl MeasureReport {
    fn from_quad(r: QuadResult<f64>) -> Self {
        MeasureReport {
            value: r.value,
            abs_error_estimate: r.abs_error,
            method: Method::Quadrature,
            evaluations: r.evaluations,
            degraded: r.degraded,
        }
    }
}

/// Thurston volume of the cone over `A` below the unit extremal-length
/// ball at `m`: `(1/4) ∫_A dθ / Ext_m([cos θ, sin θ])`.
pub fn cone_area(m: &Modulus, arcs: &ArcSet, opts: QuadOptions) -> MeasureReport {
    let mut f = |theta: f64| 0.25 / m.extremal_length(&Foliation::from_angle(theta));
    MeasureReport::from_quad(integrate_segments(&mut f, arcs.segments(), opts))
}

/// Independent Monte Carlo estimate of the cone volume: uniform rejection
/// sampling of the half-plane cone, area halved by the measure convention.
pub fn cone_area_montecarlo(
    m: &Modulus,
    arcs: &ArcSet,
    samples: usize,
    seed: u64,
) -> MeasureReport {
    if arcs.is_empty() || samples == 0 {
        return MeasureReport {
            value: 0.0,
            abs_error_estimate: 0.0,
            method: Method::MonteCarlo { seed },
            evaluations: 0,
            degraded: false,
        };
    }
    // bounding radius: dense scan of the boundary of the unit-Ext ball
    let mut radius: f64 = 0.0;
    for &(a, b) in arcs.segments() {
        for k in 0..=512 {
            let theta = a + (b - a) * k as f64 / 512.0;
            let r = 1.0 / m.extremal_length(&Foliation::from_angle(theta)).sqrt();
            radius = radius.max(r);
        }
    }
    radius *= 1.01;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = rng.gen_range(-radius..radius);
        let y = rng.gen_range(0.0..radius);
        let mut theta = y.atan2(x);
        if theta >= PI {
            theta = 0.0;
        }
        if arcs.contains(theta) && m.extremal_length(&Foliation::new(x, y)) <= 1.0 {
            hits += 1;
        }
    }
    let box_area = 2.0 * radius * radius;
    let p = hits as f64 / samples as f64;
    MeasureReport {
        value: 0.5 * box_area * p,
        abs_error_estimate: 0.5 * box_area * (p * (1.0 - p) / samples as f64).sqrt(),
        method: Method::MonteCarlo { seed },
        evaluations: samples,
        degraded: false,
    }
}

/// Normalized Thurston measure of `A` at `m`: cone volume over the total
/// cone mass.
pub fn thurston_prob(m: &Modulus, arcs: &ArcSet, opts: QuadOptions) -> MeasureReport {
    let part = cone_area(m, arcs, opts);
    let total = cone_area(m, &ArcSet::full(), opts);
    let value = part.value / total.value;
    MeasureReport {
        value,
        abs_error_estimate: (part.abs_error_estimate + value.abs() * total.abs_error_estimate)
            / total.value,
        method: Method::Quadrature,
        evaluations: part.evaluations + total.evaluations,
        degraded: part.degraded || total.degraded,
    }
}

/// The extremal-length ratio Poisson kernel `Im τ (1 + t²) / |τ − t|²`,
/// with value `Im τ` at `t = ∞`.
pub fn poisson_kernel(m: &Modulus, t: BoundaryPoint) -> f64 {
    match t {
        BoundaryPoint::Infinity => m.im(),
        BoundaryPoint::Finite(t) => {
            let dx = m.re() - t;
            m.im() * (1.0 + t * t) / (dx * dx + m.im() * m.im())
        }
    }
}

/// Residual of the harmonic-measure identity: the normalized cone measure
/// of `A` against the Poisson kernel integral over `A`, computed by
/// independent code paths (cone geometry vs kernel quadrature).
pub fn measure_identity_residual(m: &Modulus, arcs: &ArcSet, opts: QuadOptions) -> f64 {
    let cone_path = thurston_prob(m, arcs, opts).value;
    let mut f = |theta: f64| poisson_kernel(m, BoundaryPoint::from_angle(theta)) / PI;
    let kernel_path = integrate_segments(&mut f, arcs.segments(), opts).value;
    (cone_path - kernel_path).abs()
}

/// Residual of the push-forward identity: the measure of `g·A` at `g·m`
/// against the measure of `A` at `m`.
pub fn equivariance_residual(
    g: &MappingClass,
    m: &Modulus,
    arcs: &ArcSet,
    opts: QuadOptions,
) -> f64 {
    let lhs = thurston_prob(&g.act_on_modulus(m), &arcs.mobius_image(g), opts).value;
    let rhs = thurston_prob(m, arcs, opts).value;
    (lhs - rhs).abs()
}

/// Residual of the change-of-basepoint formula: the measure at `y` against
/// the extremal-length ratio integrated in the measure at `x`.
pub fn radon_nikodym_residual(
    x: &Modulus,
    y: &Modulus,
    arcs: &ArcSet,
    opts: QuadOptions,
) -> f64 {
    let lhs = thurston_prob(y, arcs, opts).value;
    let base = Modulus::square();
    let mut f = |theta: f64| {
        let lam = Foliation::from_angle(theta);
        let ratio = x.extremal_length(&lam) / y.extremal_length(&lam);
        let density_x = base.extremal_length(&lam) / x.extremal_length(&lam);
        ratio * density_x / PI
    };
    let rhs = integrate_segments(&mut f, arcs.segments(), opts).value;
    (lhs - rhs).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::teich::Slope;

    fn tau(re: f64, im: f64) -> Modulus {
        Modulus::from_parts(re, im).unwrap()
    }

    fn opts() -> QuadOptions {
        QuadOptions::default()
    }

    #[test]
    fn arcset_normalization() {
        let a = ArcSet::new(&[(1.0, 2.0), (0.5, 1.5)]).unwrap();
        assert_eq!(a.segments(), &[(0.5, 2.0)]);
        let b = ArcSet::new(&[(2.0, 2.5), (0.0, 1.0)]).unwrap();
        assert_eq!(b.segments(), &[(0.0, 1.0), (2.0, 2.5)]);
        assert!(ArcSet::new(&[(1.0, 0.5)]).is_err());
        assert!(ArcSet::new(&[(-0.1, 0.5)]).is_err());
        assert!(ArcSet::new(&[(0.0, 3.2)]).is_err());
    }

    #[test]
    fn arcset_boolean_ops() {
        let a = ArcSet::new(&[(0.2, 1.0)]).unwrap();
        let b = ArcSet::new(&[(0.8, 1.4)]).unwrap();
        assert_eq!(a.intersect(&b).segments(), &[(0.8, 1.0)]);
        assert_eq!(a.union(&b).segments(), &[(0.2, 1.4)]);
        let c = a.complement();
        assert_eq!(c.segments(), &[(0.0, 0.2), (1.0, PI)]);
        assert!((a.total_length() - 0.8).abs() < 1e-15);
        assert!(ArcSet::full().complement().is_empty());
        assert!(a.contains(0.5) && !a.contains(1.0));
    }

    #[test]
    fn mobius_image_wraps_at_seam() {
        // the arc contains t = 0, which S sends to the seam, so the image
        // wraps and splits in two
        let arc = ArcSet::new(&[(1.0, 2.0)]).unwrap();
        let s = MappingClass::s();
        let img = arc.mobius_image(&s);
        assert_eq!(img.segments().len(), 2);
        assert!((img.segments()[0].0 - 0.0).abs() < 1e-15);
        assert!((img.segments()[1].1 - PI).abs() < 1e-15);
        // an interior point maps into the image
        let t_mid = BoundaryPoint::from_angle(1.3);
        assert!(img.contains(s.act_on_boundary(t_mid).angle()));
        // S is an involution in the projective group
        let back = img.mobius_image(&s);
        assert_eq!(back.segments().len(), 1);
        assert!((back.segments()[0].0 - 1.0).abs() < 1e-12);
        assert!((back.segments()[0].1 - 2.0).abs() < 1e-12);
        // identity leaves arcs alone, full circle maps to itself
        let same = arc.mobius_image(&MappingClass::identity());
        assert!((same.segments()[0].0 - 1.0).abs() < 1e-12);
        assert!(ArcSet::full().mobius_image(&s).is_full());
    }

    #[test]
    fn cone_mass_quarter_pi() {
        let r = cone_area(&tau(0.0, 1.0), &ArcSet::full(), opts());
        assert!((r.value - PI / 4.0).abs() < 1e-9, "got {}", r.value);
        let r = cone_area(&tau(0.0, 2.0), &ArcSet::full(), opts());
        assert!((r.value - PI / 4.0).abs() < 1e-9);
        let half = ArcSet::new(&[(0.0, PI / 2.0)]).unwrap();
        let r = cone_area(&tau(0.0, 1.0), &half, opts());
        assert!((r.value - PI / 8.0).abs() < 1e-9);
        let r = cone_area(&tau(0.0, 1.0), &ArcSet::empty(), opts());
        assert_eq!(r.value, 0.0);
        assert_eq!(r.abs_error_estimate, 0.0);
    }

    #[test]
    fn cone_mass_is_tau_independent_on_grid() {
        for i in 0..5 {
            for j in 0..5 {
                let m = tau(-2.0 + i as f64, 0.25 + j as f64 * 0.9375);
                let r = cone_area(&m, &ArcSet::full(), opts());
                assert!((r.value - PI / 4.0).abs() < 1e-8, "tau {:?}", m.tau());
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        let m = tau(0.7, 1.3);
        let arcs = ArcSet::new(&[(0.3, 2.1)]).unwrap();
        let q = cone_area(&m, &arcs, opts());
        let mc = cone_area_montecarlo(&m, &arcs, 1_000_000, 0xC0FFEE);
        assert!(matches!(mc.method, Method::MonteCarlo { seed: 0xC0FFEE }));
        let gap = (q.value - mc.value).abs();
        assert!(
            gap < 4.0 * mc.abs_error_estimate,
            "gap {gap} vs 4 sigma {}",
            4.0 * mc.abs_error_estimate
        );
        // deterministic given the seed
        let mc2 = cone_area_montecarlo(&m, &arcs, 1_000_000, 0xC0FFEE);
        assert_eq!(mc.value, mc2.value);
    }

    #[test]
    fn thurston_prob_examples() {
        let full = thurston_prob(&tau(0.4, 0.9), &ArcSet::full(), opts());
        assert!((full.value - 1.0).abs() < 1e-10);
        let half = ArcSet::new(&[(0.0, PI / 2.0)]).unwrap();
        let r = thurston_prob(&tau(0.0, 1.0), &half, opts());
        assert!((r.value - 0.5).abs() < 1e-10);
        // t-image (-1, 1) is the middle quarter-turns arc
        let mid = ArcSet::new(&[(PI / 4.0, 3.0 * PI / 4.0)]).unwrap();
        let r = thurston_prob(&tau(0.0, 1.0), &mid, opts());
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn additivity_on_disjoint_arcs() {
        let m = tau(-0.8, 1.7);
        let a = ArcSet::new(&[(0.1, 0.7)]).unwrap();
        let b = ArcSet::new(&[(1.2, 2.9)]).unwrap();
        let ab = a.union(&b);
        let pa = thurston_prob(&m, &a, opts()).value;
        let pb = thurston_prob(&m, &b, opts()).value;
        let pab = thurston_prob(&m, &ab, opts()).value;
        assert!((pab - pa - pb).abs() < 1e-9);
    }

    #[test]
    fn kernel_examples_and_extremal_identity() {
        assert!((poisson_kernel(&tau(0.0, 1.0), BoundaryPoint::Finite(0.0)) - 1.0).abs() < 1e-15);
        assert!((poisson_kernel(&tau(0.0, 2.0), BoundaryPoint::Finite(0.0)) - 0.5).abs() < 1e-15);
        assert!((poisson_kernel(&tau(0.0, 1.0), BoundaryPoint::Infinity) - 1.0).abs() < 1e-15);
        let base = Modulus::square();
        for i in 0..20 {
            for j in 0..20 {
                let m = tau(-3.0 + 6.0 * i as f64 / 19.0, 0.2 + 3.0 * j as f64 / 19.0);
                // include infinity as the first grid point
                let t = if j == 0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(-5.0 + 10.0 * j as f64 / 19.0)
                };
                let lam = t.standard_foliation();
                let ratio = base.extremal_length(&lam) / m.extremal_length(&lam);
                assert!(
                    (poisson_kernel(&m, t) - ratio).abs() < 1e-12,
                    "m {:?} t {:?}",
                    m.tau(),
                    t
                );
            }
        }
    }

    #[test]
    fn measure_identity_residuals() {
        let any = ArcSet::new(&[(0.4, 1.9)]).unwrap();
        assert!(measure_identity_residual(&tau(0.0, 1.0), &any, opts()) < 1e-10);
        let half = ArcSet::new(&[(0.0, PI / 2.0)]).unwrap();
        assert!(measure_identity_residual(&tau(0.0, 2.0), &half, opts()) < 1e-8);
        assert!(measure_identity_residual(&tau(1.0, 1.0), &ArcSet::full(), opts()) < 1e-8);
    }

    #[test]
    fn equivariance_residuals() {
        let arc = ArcSet::new(&[(0.0, PI / 2.0)]).unwrap();
        let id = MappingClass::identity();
        assert_eq!(equivariance_residual(&id, &tau(0.3, 1.1), &arc, opts()), 0.0);
        let t = MappingClass::t();
        assert!(equivariance_residual(&t, &tau(0.0, 1.0), &arc, opts()) < 1e-7);
        let s = MappingClass::s();
        let random_arc = ArcSet::new(&[(0.37, 0.9), (1.4, 2.86)]).unwrap();
        assert!(equivariance_residual(&s, &tau(0.0, 2.0), &random_arc, opts()) < 1e-7);
    }

    #[test]
    fn radon_nikodym_residuals() {
        let full = ArcSet::full();
        let x = tau(0.0, 1.0);
        assert!(radon_nikodym_residual(&x, &x, &full, opts()) < 1e-10);
        assert!(radon_nikodym_residual(&x, &tau(0.0, 2.0), &full, opts()) < 1e-8);
        let arc = ArcSet::new(&[(PI / 4.0, PI / 2.0)]).unwrap();
        assert!(radon_nikodym_residual(&tau(1.0, 1.0), &x, &arc, opts()) < 1e-7);
    }

    // the slope chart sends p/q to the angle of [-p, q]
    #[test]
    fn slope_angles_land_in_expected_arcs() {
        let quarter = ArcSet::new(&[(0.0, PI / 2.0)]).unwrap();
        // 1/0 maps to the seam angle 0
        assert!(quarter.contains(Slope::infinity().foliation().angle()));
        // 0/1 maps to pi/2
        let a = Slope::new(0, 1).unwrap().foliation().angle();
        assert!((a - PI / 2.0).abs() < 1e-15);
        assert!(!quarter.contains(a));
    }
}

