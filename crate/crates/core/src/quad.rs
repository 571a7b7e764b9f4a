//! Adaptive Gauss–Kronrod quadrature with an embedded error estimate.
//!
//! Intervals are bisected depth-first until the 7/15-point error estimate
//! meets the tolerance allocated to the interval (proportional to its
//! share of the original length) or the evaluation budget runs out, in
//! which case the result carries a degraded flag. Accepted pieces are
//! summed sorted by position, so results are deterministic.

use num_complex::Complex64;

// 15-point Kronrod abscissae (positive half) and weights, with the
// embedded 7-point Gauss weights on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// Tuning knobs shared by every integral in the crate.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Absolute error target for the whole integral; each subinterval gets
    /// a share proportional to its length.
    pub abs_tol: f64,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            max_evals: 1_000_000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            ..Default::default()
        }
    }
}

/// Integral value with its accumulated error estimate and cost.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<V> {
    pub value: V,
    pub abs_error: f64,
    pub evaluations: usize,
    /// Set when the budget ran out before every interval met its target.
    pub degraded: bool,
}

/// Scalar or complex integrand values.
pub trait Integrand: Copy {
    fn zero() -> Self;
    fn add(self, rhs: Self) -> Self;
    fn scale(self, k: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

// QUADPACK-style conservative rescaling of the raw |K15 - G7| difference.
fn rescale_error(raw: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = raw.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

struct Piece<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
    res_abs: f64,
}

fn gauss_kronrod<V: Integrand, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> Piece<V> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut samples = [V::zero(); 15];
    for (j, &x) in XGK.iter().enumerate() {
        if j < 7 {
            samples[j] = f(center - half * x);
            samples[14 - j] = f(center + half * x);
        } else {
            samples[7] = f(center);
        }
    }
    let mut kronrod = V::zero();
    let mut gauss = V::zero();
    let mut res_abs = 0.0;
    for j in 0..7 {
        let pair = samples[j].add(samples[14 - j]);
        kronrod = kronrod.add(pair.scale(WGK[j]));
        res_abs += WGK[j] * (samples[j].magnitude() + samples[14 - j].magnitude());
        if j % 2 == 1 {
            gauss = gauss.add(pair.scale(WG[j / 2]));
        }
    }
    kronrod = kronrod.add(samples[7].scale(WGK[7]));
    gauss = gauss.add(samples[7].scale(WG[3]));
    res_abs += WGK[7] * samples[7].magnitude();

    // deviation of the samples from the rule mean, for the error rescale
    let mean = kronrod.scale(0.5);
    let mut res_asc = 0.0;
    for (j, s) in samples.iter().enumerate() {
        let w = WGK[if j <= 7 { j } else { 14 - j }];
        res_asc += w * s.add(mean.scale(-1.0)).magnitude();
    }
    let raw = kronrod.add(gauss.scale(-1.0)).magnitude() * half.abs();
    let err = rescale_error(raw, res_abs * half.abs(), res_asc * half.abs());
    Piece {
        a,
        b,
        value: kronrod.scale(half),
        err,
        res_abs: res_abs * half.abs(),
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<V: Integrand, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> QuadResult<V> {
    integrate_segments(&mut f, &[(a, b)], opts)
}

struct HeapPiece<V>(Piece<V>);

impl<V> PartialEq for HeapPiece<V> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key(other) == std::cmp::Ordering::Equal
    }
}
impl<V> Eq for HeapPiece<V> {}
impl<V> PartialOrd for HeapPiece<V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp_key(other))
    }
}
impl<V> Ord for HeapPiece<V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cmp_key(other)
    }
}
impl<V> HeapPiece<V> {
    // max-heap: largest error first, leftmost first on ties
    fn cmp_key(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .err
            .total_cmp(&other.0.err)
            .then(other.0.a.total_cmp(&self.0.a))
    }
}

/// Integrates `f` over a union of disjoint segments, summing in order.
///
/// Globally adaptive: the piece with the largest error estimate is bisected
/// until the summed estimate meets the tolerance (or its rounding floor),
/// then pieces are summed sorted by position.
pub fn integrate_segments<V: Integrand, F: FnMut(f64) -> V>(
    f: &mut F,
    segments: &[(f64, f64)],
    opts: QuadOptions,
) -> QuadResult<V> {
    let mut heap: std::collections::BinaryHeap<HeapPiece<V>> = std::collections::BinaryHeap::new();
    let mut finalized: Vec<Piece<V>> = Vec::new();
    let mut evals = 0usize;
    let mut total_err = 0.0;
    let mut total_res_abs = 0.0;
    for &(a, b) in segments {
        if a != b {
            let p = gauss_kronrod(f, a, b);
            evals += 15;
            total_err += p.err;
            total_res_abs += p.res_abs;
            heap.push(HeapPiece(p));
        }
    }
    if heap.is_empty() {
        return QuadResult {
            value: V::zero(),
            abs_error: 0.0,
            evaluations: 0,
            degraded: false,
        };
    }
    let min_width = 1e-14
        * segments
            .iter()
            .map(|(a, b)| (b - a).abs())
            .sum::<f64>()
            .max(1.0);
    let mut degraded = false;
    loop {
        // rounding floor: below this no refinement can help
        if total_err <= opts.abs_tol.max(100.0 * f64::EPSILON * total_res_abs) {
            break;
        }
        let Some(HeapPiece(worst)) = heap.pop() else {
            break;
        };
        let at_floor = (worst.b - worst.a).abs() <= min_width
            || worst.err <= 100.0 * f64::EPSILON * worst.res_abs;
        if at_floor {
            finalized.push(worst);
            continue;
        }
        if evals + 30 > opts.max_evals {
            degraded = true;
            heap.push(HeapPiece(worst));
            break;
        }
        total_err -= worst.err;
        total_res_abs -= worst.res_abs;
        let mid = 0.5 * (worst.a + worst.b);
        for piece in [
            gauss_kronrod(f, worst.a, mid),
            gauss_kronrod(f, mid, worst.b),
        ] {
            total_err += piece.err;
            total_res_abs += piece.res_abs;
            heap.push(HeapPiece(piece));
        }
        evals += 30;
    }
    let mut pieces = finalized;
    pieces.extend(heap.into_iter().map(|h| h.0));
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = V::zero();
    let mut abs_error = 0.0;
    for p in &pieces {
        value = value.add(p.value);
        abs_error += p.err;
    }
    QuadResult {
        value,
        abs_error,
        evaluations: evals,
        degraded,
    }
}
