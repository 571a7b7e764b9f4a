//! Core geometry of the torus Teichmüller space.
//!
//! A marked flat torus is the lattice `Z + τZ` for a point `τ` of the upper
//! half-plane ([`Modulus`]). Measured foliations are points of the plane
//! modulo the π-rotation ([`Foliation`]), simple closed curves are reduced
//! slopes ([`Slope`]), and the boundary circle is `R ∪ {∞}` via `t = −x/y`
//! ([`BoundaryPoint`]). Distances are Poincaré distances of curvature −4.

use num_complex::Complex64;
use num_integer::Integer;

/// Errors raised by constructors and operations on the core types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeomError {
    /// The modulus must lie strictly in the upper half-plane.
    NotInUpperHalfPlane,
    /// Slopes must be nonzero integer pairs.
    ZeroSlope,
    /// The operation is undefined on the zero foliation.
    ZeroFoliation,
    /// Matrix entries do not form a determinant-one integer matrix.
    NotUnimodular,
}

impl std::fmt::Display for GeomError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeomError::NotInUpperHalfPlane => write!(f, "Im(tau) must be strictly positive"),
            GeomError::ZeroSlope => write!(f, "slope (0, 0) does not label a curve"),
            GeomError::ZeroFoliation => write!(f, "operation undefined on the zero foliation"),
            GeomError::NotUnimodular => write!(f, "matrix must be integral with determinant one"),
        }
    }
}

impl std::error::Error for GeomError {}

/// A point of the torus Teichmüller space: the modulus `τ` with `Im τ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    tau: Complex64,
}

impl Modulus {
    pub fn new(tau: Complex64) -> Result<Self, GeomError> {
        if tau.im > 0.0 && tau.is_finite() {
            Ok(Modulus { tau })
        } else {
            Err(GeomError::NotInUpperHalfPlane)
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self, GeomError> {
        Self::new(Complex64::new(re, im))
    }

    /// The square torus `τ = i`, the base point used throughout.
    pub fn square() -> Self {
        Modulus {
            tau: Complex64::new(0.0, 1.0),
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn re(&self) -> f64 {
        self.tau.re
    }

    pub fn im(&self) -> f64 {
        self.tau.im
    }

    /// Extremal length `|x + yτ|² / Im τ` of a foliation on this torus.
    ///
    /// Zero exactly on the zero foliation, and homogeneous of degree 2.
    pub fn extremal_length(&self, f: &Foliation) -> f64 {
        let z = Complex64::new(f.x() + f.y() * self.tau.re, f.y() * self.tau.im);
        z.norm_sqr() / self.tau.im
    }

    /// Coefficient `c` of the Jenkins–Strebel differential `c·dz²` whose
    /// vertical foliation is `f`: `c = −((x + y·conj(τ)) / Im τ)²`.
    ///
    /// Its L¹-norm `|c|·Im τ` equals the extremal length of `f`.
    pub fn hm_differential(&self, f: &Foliation) -> Result<Complex64, GeomError> {
        if f.is_zero() {
            return Err(GeomError::ZeroFoliation);
        }
        let w = (Complex64::new(f.x(), 0.0) + self.tau.conj() * f.y()) / self.tau.im;
        Ok(-w * w)
    }

    /// Holomorphic partial derivative `∂ Ext_f / ∂τ` at this modulus.
    pub fn ext_gradient(&self, f: &Foliation) -> Result<Complex64, GeomError> {
        if f.is_zero() {
            return Err(GeomError::ZeroFoliation);
        }
        let im = self.tau.im;
        let a = Complex64::new(f.x(), 0.0) + self.tau * f.y();
        let b = Complex64::new(f.x(), 0.0) + self.tau.conj() * f.y();
        Ok(b * f.y() / im + Complex64::new(0.0, 0.5) * a * b / (im * im))
    }

    /// Teichmüller distance: the curvature −4 Poincaré distance on the
    /// upper half-plane.
    pub fn distance(&self, other: &Modulus) -> f64 {
        let sep = (self.tau - other.tau).norm();
        (sep / (2.0 * (self.tau.im * other.tau.im).sqrt())).asinh()
    }

    /// Point at arclength `s ≥ 0` along the geodesic ray from this modulus
    /// toward the boundary point `dir`.
    pub fn geodesic_ray(&self, dir: BoundaryPoint, s: f64) -> Modulus {
        RayFrame::new(self, dir).point(s)
    }
}

/// A reduced slope `p/q` labelling a simple closed curve; `1/0` is allowed
/// and stands for `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    /// Reduces and sign-normalizes so that `gcd(|p|,|q|) = 1`, `q ≥ 0`,
    /// and `p = 1` when `q = 0`.
    pub fn new(p: i64, q: i64) -> Result<Self, GeomError> {
        if p == 0 && q == 0 {
            return Err(GeomError::ZeroSlope);
        }
        let g = p.abs().gcd(&q.abs());
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    /// The slope `1/0` of the horizontal curve.
    pub fn infinity() -> Self {
        Slope { p: 1, q: 0 }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// The measured foliation `[−p, q]` of the weight-one `p/q`-curve.
    pub fn foliation(&self) -> Foliation {
        Foliation::new(-self.p as f64, self.q as f64)
    }

    /// Boundary coordinate of the curve: `p/q`, or `∞` when `q = 0`.
    pub fn boundary_point(&self) -> BoundaryPoint {
        if self.q == 0 {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(self.p as f64 / self.q as f64)
        }
    }

    /// Geometric intersection number `|p·s − r·q|` with the curve `r/s`.
    pub fn intersection(&self, other: &Slope) -> u64 {
        let d = self.p as i128 * other.q as i128 - other.p as i128 * self.q as i128;
        d.unsigned_abs() as u64
    }
}

impl std::fmt::Display for Slope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// A measured foliation on the torus: the class `[x, y]` in the plane
/// modulo the π-rotation, stored in canonical form (`y > 0`, or `y = 0`
/// and `x ≥ 0`). The zero foliation is permitted and flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Foliation {
    x: f64,
    y: f64,
}

impl Foliation {
    /// Canonical representative of the rotation orbit of `(x, y)`;
    /// idempotent.
    pub fn new(x: f64, y: f64) -> Self {
        let (mut x, mut y) = if y < 0.0 || (y == 0.0 && x < 0.0) {
            (-x, -y)
        } else {
            (x, y)
        };
        // collapse -0.0 so canonical forms are bitwise unique
        x += 0.0;
        y += 0.0;
        Foliation { x, y }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    pub fn scale(&self, c: f64) -> Foliation {
        Foliation::new(self.x * c, self.y * c)
    }

    /// Euclidean norm; equals `Ext` at the square torus, squared.
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn approx_eq(&self, other: &Foliation, tol: f64) -> bool {
        (self.x - other.x).abs() <= tol && (self.y - other.y).abs() <= tol
    }

    /// Transverse measure `|p·y + x·q|` deposited on the `p/q`-curve.
    pub fn pairing(&self, s: &Slope) -> f64 {
        (s.p as f64 * self.y + self.x * s.q as f64).abs()
    }

    /// Intersection number `|x₁y₂ − x₂y₁|`; the continuous bilinear
    /// extension of the curve formula to all foliations.
    pub fn intersection(&self, other: &Foliation) -> f64 {
        (self.x * other.y - other.x * self.y).abs()
    }

    /// Boundary coordinate `t = −x/y`; `∞` when `y = 0`.
    pub fn boundary_point(&self) -> BoundaryPoint {
        if self.y == 0.0 {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(-self.x / self.y)
        }
    }

    /// The unit-circle foliation `[cos θ, sin θ]`, `θ ∈ [0, π)`.
    pub fn from_angle(theta: f64) -> Foliation {
        Foliation::new(theta.cos(), theta.sin())
    }

    /// Angle `θ ∈ [0, π)` of the ray through this foliation.
    pub fn angle(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let t = self.y.atan2(self.x);
        if t < 0.0 {
            t + std::f64::consts::PI
        } else if t >= std::f64::consts::PI {
            t - std::f64::consts::PI
        } else {
            t
        }
    }
}

/// A point of the boundary circle `R ∪ {∞}` of the Teichmüller space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            BoundaryPoint::Finite(t) => Some(*t),
            BoundaryPoint::Infinity => None,
        }
    }

    /// The foliation `[−t, 1]` whose boundary coordinate is this point
    /// (`[1, 0]` at `∞`).
    pub fn standard_foliation(&self) -> Foliation {
        match self {
            BoundaryPoint::Finite(t) => Foliation::new(-t, 1.0),
            BoundaryPoint::Infinity => Foliation::new(1.0, 0.0),
        }
    }

    /// Angle `θ ∈ [0, π)` with `t = −cot θ`; the seam `θ = 0` is `∞`.
    pub fn angle(&self) -> f64 {
        match self {
            BoundaryPoint::Finite(t) => std::f64::consts::FRAC_PI_2 + t.atan(),
            BoundaryPoint::Infinity => 0.0,
        }
    }

    /// Boundary point at angle `θ ∈ [0, π)`.
    pub fn from_angle(theta: f64) -> BoundaryPoint {
        if theta == 0.0 {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite((theta - std::f64::consts::FRAC_PI_2).tan())
        }
    }

    pub fn approx_eq(&self, other: &BoundaryPoint, tol: f64) -> bool {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }
}

impl std::fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryPoint::Finite(t) => write!(f, "{t}"),
            BoundaryPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Real Möbius map `z ↦ (az + b)/(cz + d)` with `ad − bc > 0`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RealMobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RealMobius {
    pub fn identity() -> Self {
        RealMobius {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn compose(&self, rhs: &RealMobius) -> RealMobius {
        RealMobius {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> RealMobius {
        let det = self.a * self.d - self.b * self.c;
        RealMobius {
            a: self.d / det,
            b: -self.b / det,
            c: -self.c / det,
            d: self.a / det,
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    pub fn apply_boundary(&self, t: BoundaryPoint) -> BoundaryPoint {
        match t {
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(t) => {
                let den = self.c * t + self.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * t + self.b) / den)
                }
            }
        }
    }
}

/// Geodesic-ray frame: the Möbius change of coordinates sending the ray
/// from `start` toward `dir` onto the vertical ray from `i`.
#[derive(Debug, Clone, Copy)]
pub struct RayFrame {
    to_axis: RealMobius,
    from_axis: RealMobius,
}

impl RayFrame {
    pub fn new(start: &Modulus, dir: BoundaryPoint) -> Self {
        let pivot = match dir {
            BoundaryPoint::Infinity => RealMobius::identity(),
            // send dir to infinity first
            BoundaryPoint::Finite(t0) => RealMobius {
                a: 0.0,
                b: -1.0,
                c: 1.0,
                d: -t0,
            },
        };
        let w0 = pivot.apply(start.tau());
        let shift = RealMobius {
            a: 1.0,
            b: -w0.re,
            c: 0.0,
            d: w0.im,
        };
        let to_axis = shift.compose(&pivot);
        RayFrame {
            to_axis,
            from_axis: to_axis.inverse(),
        }
    }

    /// Ray point at curvature −4 arclength `s`.
    pub fn point(&self, s: f64) -> Modulus {
        let w = Complex64::new(0.0, (2.0 * s).exp());
        Modulus::new(self.from_axis.apply(w)).expect("ray stays in the half-plane")
    }

    /// Foot parameter along the ray and curvature −4 distance from `p` to
    /// the complete geodesic carrying the ray.
    pub fn foot_and_distance(&self, p: &Modulus) -> (f64, f64) {
        let w = self.to_axis.apply(p.tau());
        let s = 0.5 * w.norm().ln();
        let d = 0.5 * (w.re.abs() / w.im).asinh();
        (s, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn tau(re: f64, im: f64) -> Modulus {
        Modulus::from_parts(re, im).unwrap()
    }

    #[test]
    fn canonical_representatives() {
        let f = Foliation::new(1.0, -2.0);
        assert_eq!((f.x(), f.y()), (-1.0, 2.0));
        let f = Foliation::new(-3.0, 0.0);
        assert_eq!((f.x(), f.y()), (3.0, 0.0));
        let f = Foliation::new(0.0, 0.0);
        assert_eq!((f.x(), f.y()), (0.0, 0.0));
        assert!(f.is_zero());
        // idempotent
        let g = Foliation::new(f.x(), f.y());
        assert_eq!(f, g);
    }

    #[test]
    fn slope_normalization() {
        assert_eq!(Slope::new(4, -6).unwrap(), Slope::new(-2, 3).unwrap());
        assert_eq!(Slope::new(-3, 0).unwrap(), Slope::infinity());
        assert_eq!(Slope::new(0, 5).unwrap(), Slope::new(0, 1).unwrap());
        assert!(Slope::new(0, 0).is_err());
    }

    #[test]
    fn slope_foliations() {
        let f = Slope::new(0, 1).unwrap().foliation();
        assert_eq!((f.x(), f.y()), (0.0, 1.0));
        let f = Slope::infinity().foliation();
        assert_eq!((f.x(), f.y()), (1.0, 0.0));
        let f = Slope::new(3, 2).unwrap().foliation();
        assert_eq!((f.x(), f.y()), (-3.0, 2.0));
        // boundary coordinate of the p/q-curve is p/q
        match Slope::new(3, 2).unwrap().foliation().boundary_point() {
            BoundaryPoint::Finite(t) => assert!((t - 1.5).abs() < TOL),
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn intersection_numbers() {
        let inf = Slope::infinity();
        let zero = Slope::new(0, 1).unwrap();
        assert_eq!(inf.intersection(&zero), 1);
        let s = Slope::new(2, 3).unwrap();
        assert_eq!(s.intersection(&s), 0);
        let a = Slope::new(1, 2).unwrap();
        let b = Slope::new(3, 5).unwrap();
        assert_eq!(a.intersection(&b), 1);
        assert_eq!(b.intersection(&a), 1);
    }

    #[test]
    fn pairing_examples() {
        let f = Foliation::new(1.0, 1.0);
        assert!((f.pairing(&Slope::new(0, 1).unwrap()) - 1.0).abs() < TOL);
        let z = Foliation::new(0.0, 0.0);
        assert_eq!(z.pairing(&Slope::new(7, 3).unwrap()), 0.0);
        let f = Foliation::new(-3.0, 2.0);
        assert!((f.pairing(&Slope::infinity()) - 2.0).abs() < TOL);
    }

    #[test]
    fn pairing_matches_curve_intersections() {
        for p in -50i64..=50 {
            for q in 0i64..=50 {
                if p == 0 && q == 0 || p.abs().gcd(&q) != 1 {
                    continue;
                }
                let a = Slope::new(p, q).unwrap();
                for &(r, s) in &[(1, 0), (0, 1), (1, 1), (-3, 7), (5, 2)] {
                    let b = Slope::new(r, s).unwrap();
                    let want = a.intersection(&b) as f64;
                    assert!((a.foliation().pairing(&b) - want).abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn foliation_intersection_examples() {
        let a = Foliation::new(-1.0, 0.0);
        let b = Foliation::new(0.0, 1.0);
        assert!((a.intersection(&b) - 1.0).abs() < TOL);
        let f = Foliation::new(0.3, 0.7);
        assert_eq!(f.intersection(&f), 0.0);
        let a = Foliation::new(-1.0, 2f64.sqrt());
        let b = Foliation::new(-1.0, 1.0);
        assert!((a.intersection(&b) - (2f64.sqrt() - 1.0)).abs() < TOL);
    }

    // The determinant extension restricted to rational directions agrees
    // with the curve count: approximate [-1, √2] by [-qn, pn]/qn along the
    // continued-fraction convergents of √2.
    #[test]
    fn foliation_intersection_rational_oracle() {
        let target = Foliation::new(-1.0, 2f64.sqrt());
        let other = Foliation::new(-1.0, 1.0); // the 1/1-curve
        let one = Slope::new(1, 1).unwrap();
        let (mut p1, mut q1) = (3i64, 2i64);
        for _ in 0..15 {
            (p1, q1) = (p1 + 2 * q1, p1 + q1);
        }
        assert!((p1 as f64 / q1 as f64 - 2f64.sqrt()).abs() < 1e-10);
        // [-q1, p1] = foliation of the curve q1/p1, scaled by 1/q1
        let approx = Slope::new(q1, p1).unwrap();
        let scaled = approx.intersection(&one) as f64 / q1 as f64;
        assert!((scaled - target.intersection(&other)).abs() < 1e-10);
    }

    #[test]
    fn extremal_length_examples() {
        let f10 = Foliation::new(1.0, 0.0);
        assert!((tau(0.0, 1.0).extremal_length(&f10) - 1.0).abs() < TOL);
        let f01 = Foliation::new(0.0, 1.0);
        assert!((tau(0.0, 2.0).extremal_length(&f01) - 2.0).abs() < TOL);
        let f11 = Foliation::new(1.0, 1.0);
        assert!((tau(1.0, 1.0).extremal_length(&f11) - 5.0).abs() < TOL);
        // homogeneity of degree 2
        let m = tau(0.3, 0.9);
        assert!(
            (m.extremal_length(&f11.scale(3.0)) - 9.0 * m.extremal_length(&f11)).abs() < 1e-10
        );
        // zero iff zero foliation
        assert_eq!(m.extremal_length(&Foliation::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn hm_differential_norm_identity() {
        let m = tau(0.0, 1.0);
        let c = m.hm_differential(&Foliation::new(1.0, 0.0)).unwrap();
        assert!((c - Complex64::new(-1.0, 0.0)).norm() < TOL);
        let c = m.hm_differential(&Foliation::new(0.0, 1.0)).unwrap();
        assert!((c - Complex64::new(1.0, 0.0)).norm() < TOL);
        let m = tau(0.0, 2.0);
        let f = Foliation::new(1.0, 1.0);
        let c = m.hm_differential(&f).unwrap();
        assert!((c.norm() * 2.0 - 2.5).abs() < TOL);
        assert!((c.norm() * m.im() - m.extremal_length(&f)).abs() < TOL);
        assert!(m.hm_differential(&Foliation::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn distance_examples() {
        let i = tau(0.0, 1.0);
        assert_eq!(i.distance(&i), 0.0);
        let d = i.distance(&tau(0.0, 2.0));
        assert!((d - 0.5 * 2f64.ln()).abs() < TOL);
        // invariance under tau -> 2 tau
        let d1 = i.distance(&tau(1.0, 1.0));
        let d2 = tau(0.0, 2.0).distance(&tau(2.0, 2.0));
        assert!((d1 - d2).abs() < TOL);
    }

    // Independent oracle: integrate the curvature -4 length density
    // |dtau| / (2 Im tau) along the vertical segment from i to 2i.
    #[test]
    fn distance_matches_length_integral() {
        let n = 200_000;
        let mut len = 0.0;
        for k in 0..n {
            let y0 = 1.0 + k as f64 / n as f64;
            let y1 = 1.0 + (k + 1) as f64 / n as f64;
            let ym = 0.5 * (y0 + y1);
            len += (y1 - y0) / (2.0 * ym);
        }
        let d = tau(0.0, 1.0).distance(&tau(0.0, 2.0));
        assert!((d - len).abs() < 1e-9);
    }

    #[test]
    fn distance_is_a_metric_on_random_triples() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let a = tau(4.0 * next() - 2.0, 0.2 + 3.0 * next());
            let b = tau(4.0 * next() - 2.0, 0.2 + 3.0 * next());
            let c = tau(4.0 * next() - 2.0, 0.2 + 3.0 * next());
            let (ab, ba) = (a.distance(&b), b.distance(&a));
            assert_eq!(ab, ba);
            assert!(a.distance(&c) <= ab + b.distance(&c) + 1e-12);
        }
    }

    #[test]
    fn vertical_ray_closed_form() {
        let i = tau(0.0, 1.0);
        for &s in &[0.0, 0.1, 1.0, 2.5] {
            let p = i.geodesic_ray(BoundaryPoint::Infinity, s);
            assert!((p.tau() - Complex64::new(0.0, (2.0 * s).exp())).norm() < 1e-9);
        }
    }

    // Oracle: arclength along the vertical geodesic from i to i e^{2s}
    // equals s in the curvature -4 metric.
    #[test]
    fn vertical_ray_arclength_integral() {
        let s = 0.8f64;
        let n = 100_000;
        let top: f64 = (2.0 * s).exp();
        let mut len = 0.0;
        for k in 0..n {
            let y0 = top.powf(k as f64 / n as f64);
            let y1 = top.powf((k + 1) as f64 / n as f64);
            len += (y1 - y0) / (y0 + y1); // midpoint-ish of 1/(2y)
        }
        assert!((len - s).abs() < 1e-6);
    }

    #[test]
    fn ray_reaches_distance_s_and_converges_to_dir() {
        let m = tau(0.7, 1.3);
        for &t0 in &[-2.0, 0.0, 0.5, 3.0] {
            let dir = BoundaryPoint::Finite(t0);
            for &s in &[0.0, 0.4, 1.0, 3.0] {
                let p = m.geodesic_ray(dir, s);
                assert!((m.distance(&p) - s).abs() < 1e-9);
            }
            let far = m.geodesic_ray(dir, 12.0);
            assert!((far.tau().re - t0).abs() < 1e-6 && far.tau().im < 1e-6);
        }
        let back = m.geodesic_ray(BoundaryPoint::Infinity, 0.0);
        assert!((back.tau() - m.tau()).norm() < 1e-12);
    }

    #[test]
    fn ray_decay_is_exact() {
        let m = tau(-0.4, 2.2);
        for &(x, y) in &[(1.0, 0.0), (0.0, 1.0), (1.5, -0.7), (0.3, 2.0)] {
            let f = Foliation::new(x, y);
            let frame = RayFrame::new(&m, f.boundary_point());
            let e0 = m.extremal_length(&f);
            for &s in &[0.0, 0.5, 1.0, 2.0, 5.0] {
                let e = frame.point(s).extremal_length(&f);
                assert!((e - (-2.0 * s).exp() * e0).abs() < 1e-9 * e0.max(1.0));
            }
        }
    }

    #[test]
    fn quasiconformal_bound_on_samples() {
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let a = tau(4.0 * next() - 2.0, 0.3 + 2.0 * next());
            let b = tau(4.0 * next() - 2.0, 0.3 + 2.0 * next());
            let f = Foliation::new(2.0 * next() - 1.0, 2.0 * next() - 1.0);
            if f.is_zero() {
                continue;
            }
            let d = a.distance(&b);
            let (ea, eb) = (a.extremal_length(&f), b.extremal_length(&f));
            assert!((-2.0 * d).exp() * ea <= eb * (1.0 + 1e-12));
            assert!(eb <= (2.0 * d).exp() * ea * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gradient_examples() {
        let i = tau(0.0, 1.0);
        let f10 = Foliation::new(1.0, 0.0);
        // derivative of Ext along the ray toward t(f) at s = 0 is -2 Ext
        let frame = RayFrame::new(&i, f10.boundary_point());
        let h = 1e-6;
        let d = (frame.point(h).extremal_length(&f10) - frame.point(0.0).extremal_length(&f10)) / h;
        assert!((d + 2.0).abs() < 1e-5);
        // gradient of the scaled foliation picks up the square factor
        let m = tau(0.8, 1.7);
        let f = Foliation::new(0.4, 1.1);
        let g1 = m.ext_gradient(&f).unwrap();
        let g2 = m.ext_gradient(&f.scale(2.0)).unwrap();
        assert!((g2 - g1 * 4.0).norm() < 1e-10);
        assert!(m.ext_gradient(&Foliation::new(0.0, 0.0)).is_err());
    }

    // Central finite differences in Re tau and Im tau against the analytic
    // holomorphic partial: d/dtau = (d/da - i d/db)/2.
    #[test]
    fn gradient_matches_finite_differences() {
        let h = 1e-4;
        for &(re, im) in &[(0.0, 1.0), (0.7, 0.4), (-1.2, 2.5)] {
            for &(x, y) in &[(1.0, 0.0), (0.0, 1.0), (0.6, -1.7)] {
                let f = Foliation::new(x, y);
                let e = |re: f64, im: f64| tau(re, im).extremal_length(&f);
                let da = (e(re + h, im) - e(re - h, im)) / (2.0 * h);
                let db = (e(re, im + h) - e(re, im - h)) / (2.0 * h);
                let fd = Complex64::new(da, -db) * 0.5;
                let g = tau(re, im).ext_gradient(&f).unwrap();
                let tol = if (re, im) == (0.0, 1.0) {
                    1e-7
                } else {
                    1e-7 * (1.0 + g.norm())
                };
                assert!((g - fd).norm() < tol, "fd {fd} vs analytic {g}");
            }
        }
    }

    // Gardiner pairing on the torus: the holomorphic partial equals
    // -i/2 times the differential coefficient.
    #[test]
    fn gradient_is_proportional_to_differential()  {
        let m = tau(0.3, 1.9);
        let f = Foliation::new(1.2, 0.7);
        let g = m.ext_gradient(&f).unwrap();
        let c = m.hm_differential(&f).unwrap();
        assert!((g - Complex64::new(0.0, -0.5) * c).norm() < TOL);
    }

    #[test]
    fn boundary_angle_chart_round_trips() {
        for k in 1..64 {
            let theta = std::f64::consts::PI * k as f64 / 64.0;
            let t = BoundaryPoint::from_angle(theta);
            assert!((t.angle() - theta).abs() < 1e-12);
        }
        assert!(BoundaryPoint::from_angle(0.0).is_infinite());
        assert_eq!(BoundaryPoint::Infinity.angle(), 0.0);
        // standard foliation of the angle chart is the unit circle direction
        let theta = 1.1;
        let f = Foliation::from_angle(theta);
        assert!((f.angle() - theta).abs() < 1e-12);
        assert!(f
            .boundary_point()
            .approx_eq(&BoundaryPoint::from_angle(theta), 1e-12));
    }
}
