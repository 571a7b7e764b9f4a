//! The `SL2(Z)` mapping-class engine.
//!
//! Mapping classes of the torus are sign-normalized determinant-one integer
//! matrices acting on moduli by Möbius maps, on foliations linearly, and on
//! the boundary circle by the induced Möbius action. Thurston's trichotomy
//! becomes the trace classification, and finitely generated subgroups are
//! probed through bounded word balls.

use crate::teich::{BoundaryPoint, Foliation, GeomError, Modulus, Slope};
use crate::BudgetError;
use num_integer::Integer;
use std::collections::{BTreeMap, BTreeSet};

/// Default hard cap on word-ball enumeration.
pub const DEFAULT_BALL_CAP: usize = 2_000_000;

/// A torus mapping class: a matrix `[[a, b], [c, d]]` with `ad − bc = 1`,
/// stored with the first nonzero entry of `(a, b, c, d)` positive so that
/// `M` and `−M` share one representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MappingClass {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl MappingClass {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, GeomError> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(GeomError::NotUnimodular);
        }
        Ok(Self::normalized(a, b, c, d))
    }

    fn normalized(a: i64, b: i64, c: i64, d: i64) -> Self {
        let lead = if a != 0 {
            a
        } else if b != 0 {
            b
        } else if c != 0 {
            c
        } else {
            d
        };
        if lead < 0 {
            MappingClass {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            MappingClass { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        MappingClass {
            a: 1,
            b: 0,
            c: 0,
            d: 1,
        }
    }

    /// The standard parabolic `T: τ ↦ τ + 1`.
    pub fn t() -> Self {
        MappingClass {
            a: 1,
            b: 1,
            c: 0,
            d: 1,
        }
    }

    /// The standard elliptic `S: τ ↦ −1/τ`.
    pub fn s() -> Self {
        MappingClass::normalized(0, 1, -1, 0)
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn trace_abs(&self) -> i64 {
        (self.a + self.d).abs()
    }

    pub fn compose(&self, rhs: &MappingClass) -> MappingClass {
        Self::normalized(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    pub fn inverse(&self) -> MappingClass {
        Self::normalized(self.d, -self.b, -self.c, self.a)
    }

    /// Möbius action `τ ↦ (aτ + b)/(cτ + d)` on the Teichmüller space.
    pub fn act_on_modulus(&self, m: &Modulus) -> Modulus {
        let t = m.tau();
        let num = t * self.a as f64 + self.b as f64;
        let den = t * self.c as f64 + self.d as f64;
        Modulus::new(num / den).expect("unimodular maps preserve the half-plane")
    }

    /// Linear action `(x, y) ↦ (ax − by, −cx + dy)` on measured foliations.
    ///
    /// This is the unique linear lift of the boundary Möbius action that
    /// leaves extremal length invariant: `Ext_{g·τ}(g·f) = Ext_τ(f)`.
    pub fn act_on_foliation(&self, f: &Foliation) -> Foliation {
        Foliation::new(
            self.a as f64 * f.x() - self.b as f64 * f.y(),
            -self.c as f64 * f.x() + self.d as f64 * f.y(),
        )
    }

    /// Boundary Möbius action `t ↦ (at + b)/(ct + d)` with explicit `∞`
    /// handling.
    pub fn act_on_boundary(&self, t: BoundaryPoint) -> BoundaryPoint {
        match t {
            BoundaryPoint::Infinity => {
                if self.c == 0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a as f64 / self.c as f64)
                }
            }
            BoundaryPoint::Finite(t) => {
                let den = self.c as f64 * t + self.d as f64;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a as f64 * t + self.b as f64) / den)
                }
            }
        }
    }

    /// Exact boundary action on a rational slope: `p/q ↦ (ap + bq)/(cp + dq)`.
    pub fn act_on_slope(&self, s: &Slope) -> Slope {
        Slope::new(
            self.a * s.p() + self.b * s.q(),
            self.c * s.p() + self.d * s.q(),
        )
        .expect("unimodular maps preserve nonzero integer vectors")
    }

    /// Primitive integer quadratic `(A, B, C)` with `A > 0` whose roots
    /// `A t² + B t + C = 0` are the finite fixed boundary points. `None`
    /// for the identity and for maps fixing `∞` (`c = 0`).
    pub fn fixed_point_quadratic(&self) -> Option<(i64, i64, i64)> {
        if self.is_identity() || self.c == 0 {
            return None;
        }
        let (a, b, c) = (self.c, self.d - self.a, -self.b);
        let g = a.abs().gcd(&b.abs()).gcd(&c.abs());
        let (a, b, c) = (a / g, b / g, c / g);
        Some(if a < 0 { (-a, -b, -c) } else { (a, b, c) })
    }

    /// Thurston classification by trace.
    pub fn classify(&self) -> ClassificationResult {
        let tr = self.trace_abs();
        if self.is_identity() || tr < 2 {
            return ClassificationResult::FiniteOrder;
        }
        if tr == 2 {
            // parabolic: the unique fixed slope, exactly in integers
            let slope = if self.c == 0 {
                Slope::infinity()
            } else {
                Slope::new(self.a - self.d, 2 * self.c).expect("parabolic fixed slope is nonzero")
            };
            return ClassificationResult::Reducible(slope);
        }
        // hyperbolic: eigenvalues of the foliation action [[a, -b], [-c, d]]
        let trace = (self.a + self.d) as f64;
        let disc = (trace * trace - 4.0).sqrt();
        let k = (trace.abs() + disc) / 2.0;
        let unstable = self.eigen_foliation((trace + trace.signum() * disc) / 2.0);
        let stable = self.eigen_foliation((trace - trace.signum() * disc) / 2.0);
        ClassificationResult::PseudoAnosov {
            expansion: k,
            unstable,
            stable,
        }
    }

    /// Unit-extremal-length eigen-foliation for the eigenvalue `lambda` of
    /// the foliation action.
    fn eigen_foliation(&self, lambda: f64) -> Foliation {
        // rows of F - lambda I with F = [[a, -b], [-c, d]]
        let r1 = (self.a as f64 - lambda, -self.b as f64);
        let r2 = (-self.c as f64, self.d as f64 - lambda);
        let (rx, ry) = if r1.0.abs() + r1.1.abs() >= r2.0.abs() + r2.1.abs() {
            r1
        } else {
            r2
        };
        let (x, y) = (-ry, rx);
        let n = x.hypot(y);
        Foliation::new(x / n, y / n)
    }
}

impl std::fmt::Display for MappingClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Thurston type of a single mapping class.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassificationResult {
    FiniteOrder,
    /// Reducible (parabolic): the unique invariant slope.
    Reducible(Slope),
    /// Pseudo-Anosov with expansion `K > 1` and unit-extremal-length
    /// unstable/stable foliations at the square torus.
    PseudoAnosov {
        expansion: f64,
        unstable: Foliation,
        stable: Foliation,
    },
}

/// A finitely generated subgroup given by its generators.
#[derive(Debug, Clone)]
pub struct SubgroupSpec {
    generators: Vec<MappingClass>,
    labels: Vec<String>,
}

impl SubgroupSpec {
    pub fn new(generators: Vec<MappingClass>) -> Result<Self, GeomError> {
        let labels = (0..generators.len()).map(|i| format!("g{i}")).collect();
        Self::with_labels(generators, labels)
    }

    pub fn with_labels(
        generators: Vec<MappingClass>,
        labels: Vec<String>,
    ) -> Result<Self, GeomError> {
        if generators.is_empty() || generators.iter().any(MappingClass::is_identity) {
            return Err(GeomError::NotUnimodular);
        }
        assert_eq!(generators.len(), labels.len());
        Ok(SubgroupSpec { generators, labels })
    }

    pub fn generators(&self) -> &[MappingClass] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A word in the generators: letter `k > 0` is generator `k−1`, `k < 0` its
/// inverse.
pub type Word = Vec<i32>;

/// Renders a word like `g0*g1^-1` using the subgroup's labels.
pub fn word_to_string(h: &SubgroupSpec, w: &Word) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    w.iter()
        .map(|&k| {
            let idx = (k.abs() - 1) as usize;
            if k > 0 {
                h.labels()[idx].clone()
            } else {
                format!("{}^-1", h.labels()[idx])
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Evaluates a word to its group element.
pub fn word_element(h: &SubgroupSpec, w: &Word) -> MappingClass {
    let mut g = MappingClass::identity();
    for &k in w {
        let idx = (k.abs() - 1) as usize;
        let step = if k > 0 {
            h.generators()[idx]
        } else {
            h.generators()[idx].inverse()
        };
        g = g.compose(&step);
    }
    g
}

/// The word ball: every distinct element expressible as a product of at
/// most `radius` generators and inverses, each with a shortest witness word
/// found by the search, in deterministic order.
#[derive(Debug, Clone)]
pub struct WordBall {
    elements: BTreeMap<MappingClass, (Word, usize)>,
    radius: usize,
}

impl WordBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn contains(&self, g: &MappingClass) -> bool {
        self.elements.contains_key(g)
    }

    /// Elements with their witness word and word length, in matrix order.
    pub fn iter(&self) -> impl Iterator<Item = (&MappingClass, &Word, usize)> {
        self.elements.iter().map(|(g, (w, d))| (g, w, *d))
    }

    pub fn elements(&self) -> impl Iterator<Item = &MappingClass> {
        self.elements.keys()
    }
}

/// Enumerates the word ball of the given radius, deduplicated in the
/// projective group, stopping with an error once `cap` elements exist.
pub fn enumerate_ball(
    h: &SubgroupSpec,
    radius: usize,
    cap: usize,
) -> Result<WordBall, BudgetError> {
    let mut elements: BTreeMap<MappingClass, (Word, usize)> = BTreeMap::new();
    elements.insert(MappingClass::identity(), (Vec::new(), 0));
    let mut frontier: Vec<(MappingClass, Word)> = vec![(MappingClass::identity(), Vec::new())];
    let mut steps: Vec<(MappingClass, i32)> = Vec::new();
    for (i, g) in h.generators().iter().enumerate() {
        steps.push((*g, i as i32 + 1));
        steps.push((g.inverse(), -(i as i32 + 1)));
    }
    for depth in 1..=radius {
        let mut next: Vec<(MappingClass, Word)> = Vec::new();
        for (g, w) in &frontier {
            for (step, letter) in &steps {
                let ng = g.compose(step);
                if !elements.contains_key(&ng) {
                    if elements.len() >= cap {
                        return Err(BudgetError { cap });
                    }
                    let mut nw = w.clone();
                    nw.push(*letter);
                    elements.insert(ng, (nw.clone(), depth));
                    next.push((ng, nw));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(WordBall { elements, radius })
}

/// Outcome of a bounded-depth search: either verified evidence or an
/// explicit statement that depth `L` was not enough.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T> {
    Witness(T),
    Inconclusive(usize),
}

impl<T> Verdict<T> {
    pub fn is_witness(&self) -> bool {
        matches!(self, Verdict::Witness(_))
    }
}

/// A pair of independent pseudo-Anosov elements.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentPair {
    pub first: (MappingClass, Word),
    pub second: (MappingClass, Word),
}

/// Searches the word ball for two pseudo-Anosov elements with disjoint
/// fixed-point sets. A `Witness` is exact (integer quadratic comparison);
/// a negative answer is only `Inconclusive` at this depth.
pub fn is_sufficiently_large(
    h: &SubgroupSpec,
    radius: usize,
    cap: usize,
) -> Result<Verdict<IndependentPair>, BudgetError> {
    Ok(independent_pair(&enumerate_ball(h, radius, cap)?))
}

fn independent_pair(ball: &WordBall) -> Verdict<IndependentPair> {
    let mut first: Option<((i64, i64, i64), (MappingClass, Word))> = None;
    for (g, w, _) in ball.iter() {
        if g.trace_abs() > 2 {
            let quad = g
                .fixed_point_quadratic()
                .expect("hyperbolic classes have a finite fixed quadratic");
            match &first {
                None => first = Some((quad, (*g, w.clone()))),
                Some((quad0, witness0)) if *quad0 != quad => {
                    return Verdict::Witness(IndependentPair {
                        first: witness0.clone(),
                        second: (*g, w.clone()),
                    });
                }
                Some(_) => {}
            }
        }
    }
    Verdict::Inconclusive(ball.radius())
}

/// Bounded-depth McCarthy–Papadopoulos type of a subgroup.
#[derive(Debug, Clone, PartialEq)]
pub enum SubgroupType {
    /// The ball closed under multiplication: the whole group, listed.
    Finite { order: usize },
    /// A nonempty finite set of slopes invariant under every generator.
    ///
    /// `still_growing` records that the word ball had not stabilized at
    /// this depth; an infinite reducible subgroup of the torus group is
    /// nevertheless dynamically irreducible, so the caller must not read
    /// this verdict as dynamical reducibility.
    Reducible {
        invariant: Vec<Slope>,
        still_growing: bool,
    },
    /// Every hyperbolic element in the ball fixes the same boundary pair;
    /// symmetric when some element swaps the two fixed points.
    PseudoAnosovStabilizing {
        quadratic: (i64, i64, i64),
        symmetric: bool,
        swapper: Option<(MappingClass, Word)>,
    },
    /// Contains an independent pair of pseudo-Anosov elements.
    SufficientlyLarge(IndependentPair),
    Inconclusive,
}

/// Verdict plus the search depth and ball size that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupReport {
    pub verdict: SubgroupType,
    pub depth: usize,
    pub ball_size: usize,
}

/// Best bounded-depth determination of the subgroup type.
pub fn mcp_classify(
    h: &SubgroupSpec,
    radius: usize,
    cap: usize,
) -> Result<SubgroupReport, BudgetError> {
    let ball = enumerate_ball(h, radius, cap)?;
    let ball_size = ball.len();

    // finite: the ball is closed under multiplication by the generators
    let closed = ball.elements().all(|g| {
        h.generators()
            .iter()
            .all(|s| ball.contains(&g.compose(s)) && ball.contains(&g.compose(&s.inverse())))
    });
    if closed {
        return Ok(SubgroupReport {
            verdict: SubgroupType::Finite { order: ball_size },
            depth: radius,
            ball_size,
        });
    }

    if let Verdict::Witness(pair) = independent_pair(&ball) {
        return Ok(SubgroupReport {
            verdict: SubgroupType::SufficientlyLarge(pair),
            depth: radius,
            ball_size,
        });
    }

    // not sufficiently large at this depth: all hyperbolics (if any) share
    // one fixed quadratic
    let shared = ball.iter().find_map(|(g, _, _)| {
        if g.trace_abs() > 2 {
            g.fixed_point_quadratic()
        } else {
            None
        }
    });
    if let Some(quad) = shared {
        let swapper = find_swapper(&ball, quad);
        return Ok(SubgroupReport {
            verdict: SubgroupType::PseudoAnosovStabilizing {
                quadratic: quad,
                symmetric: swapper.is_some(),
                swapper,
            },
            depth: radius,
            ball_size,
        });
    }

    // reducible: orbit closure of parabolic fixed slopes under the generators
    let mut seeds: BTreeSet<Slope> = BTreeSet::new();
    for (g, _, _) in ball.iter() {
        if let ClassificationResult::Reducible(s) = g.classify() {
            seeds.insert(s);
        }
    }
    if !seeds.is_empty() {
        if let Some(invariant) = finite_slope_orbit(h, &seeds, 4096) {
            return Ok(SubgroupReport {
                verdict: SubgroupType::Reducible {
                    invariant,
                    still_growing: true,
                },
                depth: radius,
                ball_size,
            });
        }
    }

    Ok(SubgroupReport {
        verdict: SubgroupType::Inconclusive,
        depth: radius,
        ball_size,
    })
}

/// Exact orbit closure of a slope set under the generator action, or
/// `None` once it exceeds `cap`.
fn finite_slope_orbit(h: &SubgroupSpec, seeds: &BTreeSet<Slope>, cap: usize) -> Option<Vec<Slope>> {
    let mut orbit: BTreeSet<Slope> = seeds.clone();
    let mut frontier: Vec<Slope> = orbit.iter().copied().collect();
    while let Some(s) = frontier.pop() {
        for g in h.generators() {
            for image in [g.act_on_slope(&s), g.inverse().act_on_slope(&s)] {
                if orbit.insert(image) {
                    if orbit.len() > cap {
                        return None;
                    }
                    frontier.push(image);
                }
            }
        }
    }
    Some(orbit.into_iter().collect())
}

/// Finds a ball element exchanging the two roots of the fixed quadratic,
/// exactly in the field extension by the discriminant.
fn find_swapper(ball: &WordBall, quad: (i64, i64, i64)) -> Option<(MappingClass, Word)> {
    let (qa, qb, qc) = quad;
    let disc = qb as i128 * qb as i128 - 4 * qa as i128 * qc as i128;
    debug_assert!(disc > 0);
    // roots (-qb ± sqrt(disc)) / (2 qa)
    let r_plus = QuadExt::new(-(qb as i128), 1, 2 * qa as i128, disc);
    let r_minus = QuadExt::new(-(qb as i128), -1, 2 * qa as i128, disc);
    for (g, w, _) in ball.iter() {
        if g.is_identity() {
            continue;
        }
        let (a, b, c, d) = g.entries();
        let image = |t: &QuadExt| {
            let num = t.scale(a as i128).add_int(b as i128);
            let den = t.scale(c as i128).add_int(d as i128);
            num.divide(&den)
        };
        if let (Some(ip), Some(im)) = (image(&r_plus), image(&r_minus)) {
            if ip == r_minus && im == r_plus {
                return Some((*g, w.clone()));
            }
        }
    }
    None
}

/// Exact arithmetic on values `(u + v·√disc) / w` with `disc` a fixed
/// positive non-square, reduced with `w > 0` and content one.
#[derive(Debug, Clone, PartialEq, Eq)]
struct QuadExt {
    u: num_bigint::BigInt,
    v: num_bigint::BigInt,
    w: num_bigint::BigInt,
    disc: i128,
}

impl QuadExt {
    fn new(u: i128, v: i128, w: i128, disc: i128) -> Self {
        QuadExt {
            u: u.into(),
            v: v.into(),
            w: w.into(),
            disc,
        }
        .reduced()
    }

    fn reduced(mut self) -> Self {
        use num_traits::{Signed, Zero};
        let g = num_integer::gcd(
            num_integer::gcd(self.u.clone(), self.v.clone()),
            self.w.clone(),
        );
        if !g.is_zero() {
            self.u /= &g;
            self.v /= &g;
            self.w /= &g;
        }
        if self.w.is_negative() {
            self.u = -self.u;
            self.v = -self.v;
            self.w = -self.w;
        }
        self
    }

    fn scale(&self, k: i128) -> QuadExt {
        QuadExt {
            u: &self.u * k,
            v: &self.v * k,
            w: self.w.clone(),
            disc: self.disc,
        }
        .reduced()
    }

    fn add_int(&self, k: i128) -> QuadExt {
        QuadExt {
            u: &self.u + &self.w * k,
            v: self.v.clone(),
            w: self.w.clone(),
            disc: self.disc,
        }
        .reduced()
    }

    /// `self / rhs`, rationalizing by the conjugate; `None` when `rhs = 0`.
    fn divide(&self, rhs: &QuadExt) -> Option<QuadExt> {
        use num_traits::Zero;
        let norm: num_bigint::BigInt = &rhs.u * &rhs.u - &rhs.v * &rhs.v * rhs.disc;
        if norm.is_zero() {
            // disc is not a square, so zero norm means rhs = 0
            return None;
        }
        let u = (&self.u * &rhs.u - &self.v * &rhs.v * rhs.disc) * &rhs.w;
        let v = (&self.v * &rhs.u - &self.u * &rhs.v) * &rhs.w;
        let w = &self.w * norm;
        Some(
            QuadExt {
                u,
                v,
                w,
                disc: self.disc,
            }
            .reduced(),
        )
    }
}
