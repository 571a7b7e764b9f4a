//! Combinatorial train tracks over exact rationals.
//!
//! A track is a branched graph whose switches carry in/out tags on the
//! incident branch ends; weight vectors satisfying the per-switch
//! conservation law form the kernel of the switch matrix. The symplectic
//! pairing sums `(u(e₁)v(e₂) − u(e₂)v(e₁))/2` over trivalent switches
//! using each switch's ordered pair of merging ends, and its Pfaffian
//! density gives the volume normalization. All of this is computed in
//! exact rational arithmetic.

use crate::teich::Foliation;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// End `0` or `1` of a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BranchEnd {
    pub branch: usize,
    pub end: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Incoming,
    Outgoing,
}

/// A switch: its incident branch ends with tags, and (for trivalent
/// switches) the ordered pair of same-direction ends fixing the sign of
/// the symplectic pairing.
#[derive(Debug, Clone)]
pub struct Switch {
    pub name: String,
    pub ends: Vec<(BranchEnd, Direction)>,
    pub ordered_pair: Option<(BranchEnd, BranchEnd)>,
}

/// Structural errors in track construction and use.
#[derive(Debug, Clone, PartialEq)]
pub enum TrackError {
    DuplicateBranch(String),
    UnknownBranch(String),
    EndReused { branch: String, end: u8 },
    EndUnattached { branch: String, end: u8 },
    BadValence { switch: String, valence: usize },
    BadTrivalentPattern { switch: String },
    BadOrderedPair { switch: String },
    MissingOrderedPair { switch: String },
    WrongWeightCount { expected: usize, got: usize },
    SwitchConditionViolated { switch: String },
    OddDimension { dim: usize },
    DegenerateForm,
    OutOfCone,
    BadChartIndex(usize),
}

impl std::fmt::Display for TrackError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrackError::DuplicateBranch(n) => write!(f, "branch `{n}` declared twice"),
            TrackError::UnknownBranch(n) => write!(f, "unknown branch `{n}`"),
            TrackError::EndReused { branch, end } => {
                write!(f, "end {branch}.{end} attached to more than one switch")
            }
            TrackError::EndUnattached { branch, end } => {
                write!(f, "end {branch}.{end} is not attached to any switch")
            }
            TrackError::BadValence { switch, valence } => {
                write!(f, "switch `{switch}` has valence {valence}; tracks are generic (≤ 3)")
            }
            TrackError::BadTrivalentPattern { switch } => write!(
                f,
                "trivalent switch `{switch}` must have two incoming and one outgoing end or the reverse"
            ),
            TrackError::BadOrderedPair { switch } => write!(
                f,
                "ordered pair at switch `{switch}` must list its two merging ends"
            ),
            TrackError::MissingOrderedPair { switch } => {
                write!(f, "trivalent switch `{switch}` has no ordered pair")
            }
            TrackError::WrongWeightCount { expected, got } => {
                write!(f, "expected {expected} weights, got {got}")
            }
            TrackError::SwitchConditionViolated { switch } => {
                write!(f, "switch condition fails at `{switch}`")
            }
            TrackError::OddDimension { dim } => {
                write!(f, "weight space has odd dimension {dim}")
            }
            TrackError::DegenerateForm => write!(f, "symplectic form is degenerate"),
            TrackError::OutOfCone => write!(f, "foliation lies outside the chart cone"),
            TrackError::BadChartIndex(k) => write!(f, "chart index {k} out of range 1..=4"),
        }
    }
}

impl std::error::Error for TrackError {}

/// A generic train track.
#[derive(Debug, Clone)]
pub struct TrainTrack {
    branch_names: Vec<String>,
    switches: Vec<Switch>,
}

impl TrainTrack {
    /// Validates and builds a track: every branch end attached exactly
    /// once, all switches of valence 1–3, trivalent switches with the
    /// merging pattern and a consistent ordered pair when given.
    pub fn new(branch_names: Vec<String>, switches: Vec<Switch>) -> Result<Self, TrackError> {
        let nb = branch_names.len();
        for (i, n) in branch_names.iter().enumerate() {
            if branch_names[..i].contains(n) {
                return Err(TrackError::DuplicateBranch(n.clone()));
            }
        }
        let mut used = vec![[false; 2]; nb];
        for sw in &switches {
            if sw.ends.is_empty() || sw.ends.len() > 3 {
                return Err(TrackError::BadValence {
                    switch: sw.name.clone(),
                    valence: sw.ends.len(),
                });
            }
            for &(e, _) in &sw.ends {
                if e.branch >= nb || e.end > 1 {
                    return Err(TrackError::UnknownBranch(format!("{}.{}", e.branch, e.end)));
                }
                if used[e.branch][e.end as usize] {
                    return Err(TrackError::EndReused {
                        branch: branch_names[e.branch].clone(),
                        end: e.end,
                    });
                }
                used[e.branch][e.end as usize] = true;
            }
            if sw.ends.len() == 3 {
                let incoming = sw
                    .ends
                    .iter()
                    .filter(|(_, d)| *d == Direction::Incoming)
                    .count();
                if incoming != 1 && incoming != 2 {
                    return Err(TrackError::BadTrivalentPattern {
                        switch: sw.name.clone(),
                    });
                }
                if let Some((e1, e2)) = sw.ordered_pair {
                    let mut merging = merging_ends(sw);
                    merging.sort();
                    let mut given = [e1, e2];
                    given.sort();
                    if merging != given {
                        return Err(TrackError::BadOrderedPair {
                            switch: sw.name.clone(),
                        });
                    }
                }
            }
        }
        for (b, ends) in used.iter().enumerate() {
            for (e, attached) in ends.iter().enumerate() {
                if !attached {
                    return Err(TrackError::EndUnattached {
                        branch: branch_names[b].clone(),
                        end: e as u8,
                    });
                }
            }
        }
        Ok(TrainTrack {
            branch_names,
            switches,
        })
    }

    pub fn branch_count(&self) -> usize {
        self.branch_names.len()
    }

    pub fn branch_names(&self) -> &[String] {
        &self.branch_names
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn branch_index(&self, name: &str) -> Option<usize> {
        self.branch_names.iter().position(|n| n == name)
    }

    /// Switch matrix: rows are switches, columns branches; each entry is
    /// the number of incoming minus outgoing ends of the branch there.
    /// Weight vectors are its kernel.
    pub fn switch_matrix(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.branch_count()]; self.switches.len()];
        for (s, sw) in self.switches.iter().enumerate() {
            for &(e, d) in &sw.ends {
                m[s][e.branch] += match d {
                    Direction::Incoming => 1,
                    Direction::Outgoing => -1,
                };
            }
        }
        m
    }

    /// Exact rational basis of the weight space (kernel of the switch
    /// matrix), with one basis vector per free branch in branch order.
    pub fn weight_space_basis(&self) -> Vec<WeightVector> {
        let m: Vec<Vec<BigRational>> = self
            .switch_matrix()
            .into_iter()
            .map(|row| row.into_iter().map(rat_i64).collect())
            .collect();
        rational_kernel(&m, self.branch_count())
            .into_iter()
            .map(|weights| WeightVector { weights })
            .collect()
    }

    /// Whether some everywhere-positive weight vector exists, with an
    /// exact certificate or a branch forced to zero on the nonnegative
    /// cone.
    pub fn is_recurrent(&self) -> Recurrence {
        let matrix = self.switch_matrix();
        let nb = self.branch_count();
        let vertices = cone_simplex_vertices(&matrix, nb);
        if vertices.is_empty() {
            return Recurrence::No {
                forced_branch: 0,
            };
        }
        let mut certificate = vec![BigRational::zero(); nb];
        for b in 0..nb {
            let best = vertices
                .iter()
                .max_by(|u, v| u[b].cmp(&v[b]))
                .expect("nonempty");
            if best[b].is_zero() {
                return Recurrence::No { forced_branch: b };
            }
            for (c, w) in certificate.iter_mut().zip(best.iter()) {
                *c += w;
            }
        }
        Recurrence::Yes {
            certificate: WeightVector {
                weights: certificate,
            },
        }
    }

    /// Thurston symplectic pairing of two weight vectors.
    pub fn thurston_form(
        &self,
        u: &WeightVector,
        v: &WeightVector,
    ) -> Result<BigRational, TrackError> {
        self.check_weights(u)?;
        self.check_weights(v)?;
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let mut total = BigRational::zero();
        for sw in &self.switches {
            if sw.ends.len() != 3 {
                continue;
            }
            let (e1, e2) = sw.ordered_pair.ok_or(TrackError::MissingOrderedPair {
                switch: sw.name.clone(),
            })?;
            let term = &u.weights[e1.branch] * &v.weights[e2.branch]
                - &u.weights[e2.branch] * &v.weights[e1.branch];
            total += &half * term;
        }
        Ok(total)
    }

    /// Gram matrix of the form on the weight-space basis, and whether it
    /// is nondegenerate there.
    pub fn form_matrix(&self) -> Result<(Vec<Vec<BigRational>>, bool), TrackError> {
        let basis = self.weight_space_basis();
        let dim = basis.len();
        let mut gram = vec![vec![BigRational::zero(); dim]; dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = self.thurston_form(&basis[i], &basis[j])?;
                gram[j][i] = -&v;
                gram[i][j] = v;
            }
        }
        let nondegenerate = rational_rank(&gram, dim) == dim;
        Ok((gram, nondegenerate))
    }

    /// Volume density `|Pf(gram)| / n!` of the top power of the form in
    /// the kernel basis, where `2n` is the weight-space dimension.
    pub fn volume_density(&self) -> Result<BigRational, TrackError> {
        let (gram, nondegenerate) = self.form_matrix()?;
        let dim = gram.len();
        if dim % 2 != 0 {
            return Err(TrackError::OddDimension { dim });
        }
        if !nondegenerate {
            return Err(TrackError::DegenerateForm);
        }
        let pf = pfaffian(&gram);
        let mut fact = BigRational::one();
        for k in 2..=(dim / 2) {
            fact *= rat_i64(k as i64);
        }
        Ok(pf.abs() / fact)
    }

    fn check_weights(&self, w: &WeightVector) -> Result<(), TrackError> {
        if w.weights.len() != self.branch_count() {
            return Err(TrackError::WrongWeightCount {
                expected: self.branch_count(),
                got: w.weights.len(),
            });
        }
        let m = self.switch_matrix();
        for (s, row) in m.iter().enumerate() {
            let mut acc = BigRational::zero();
            for (coef, weight) in row.iter().zip(w.weights.iter()) {
                acc += rat_i64(*coef) * weight;
            }
            if !acc.is_zero() {
                return Err(TrackError::SwitchConditionViolated {
                    switch: self.switches[s].name.clone(),
                });
            }
        }
        Ok(())
    }
}

/// The two same-direction ends of a trivalent switch.
fn merging_ends(sw: &Switch) -> [BranchEnd; 2] {
    let incoming: Vec<BranchEnd> = sw
        .ends
        .iter()
        .filter(|(_, d)| *d == Direction::Incoming)
        .map(|(e, _)| *e)
        .collect();
    let outgoing: Vec<BranchEnd> = sw
        .ends
        .iter()
        .filter(|(_, d)| *d == Direction::Outgoing)
        .map(|(e, _)| *e)
        .collect();
    if incoming.len() == 2 {
        [incoming[0], incoming[1]]
    } else {
        [outgoing[0], outgoing[1]]
    }
}

/// A branch-indexed rational weight assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<BigRational>,
}

impl WeightVector {
    pub fn from_i64(weights: &[i64]) -> Self {
        WeightVector {
            weights: weights.iter().map(|&w| rat_i64(w)).collect(),
        }
    }

    pub fn from_rationals(weights: Vec<BigRational>) -> Self {
        WeightVector { weights }
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }
}

/// Recurrence answer with its exact evidence.
#[derive(Debug, Clone, PartialEq)]
pub enum Recurrence {
    Yes { certificate: WeightVector },
    No { forced_branch: usize },
}

impl Recurrence {
    pub fn is_recurrent(&self) -> bool {
        matches!(self, Recurrence::Yes { .. })
    }
}

pub(crate) fn rat_i64(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// Reduced-row-echelon kernel basis: one vector per free column, equal to
/// one there and zero at the other free columns.
fn rational_kernel(matrix: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut rows: Vec<Vec<BigRational>> = matrix.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..ncols {
                    let sub = &factor * &rows[r][j];
                    rows[i][j] -= sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for fc in 0..ncols {
        if pivot_cols.contains(&fc) {
            continue;
        }
        let mut v = vec![BigRational::zero(); ncols];
        v[fc] = BigRational::one();
        for &(pr, pc) in &pivots {
            v[pc] = -rows[pr][fc].clone();
        }
        basis.push(v);
    }
    basis
}

fn rational_rank(matrix: &[Vec<BigRational>], ncols: usize) -> usize {
    if matrix.is_empty() {
        return 0;
    }
    ncols - rational_kernel(matrix, ncols).len()
}

/// Vertices of `{x ≥ 0, Ax = 0, Σx = 1}` by basic-solution enumeration.
fn cone_simplex_vertices(matrix: &[Vec<i64>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut rows: Vec<Vec<BigRational>> = matrix
        .iter()
        .map(|row| row.iter().map(|&k| rat_i64(k)).collect())
        .collect();
    rows.push(vec![BigRational::one(); ncols]);
    let mut rhs = vec![BigRational::zero(); rows.len()];
    *rhs.last_mut().unwrap() = BigRational::one();

    let nrows = rows.len();
    let rank = ncols - rational_kernel(&rows, ncols).len();
    let mut vertices: Vec<Vec<BigRational>> = Vec::new();
    let mut subset: Vec<usize> = (0..rank).collect();
    loop {
        if let Some(x) = solve_on_columns(&rows, &rhs, &subset, nrows, ncols) {
            if x.iter().all(|v| !v.is_negative()) && !vertices.contains(&x) {
                vertices.push(x);
            }
        }
        // next size-`rank` combination of columns
        let mut i = rank;
        loop {
            if i == 0 {
                return vertices;
            }
            i -= 1;
            if subset[i] + (rank - i) <= ncols - 1 {
                subset[i] += 1;
                for j in (i + 1)..rank {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Solves the system restricted to the chosen columns (others zero);
/// `None` when the restricted system is singular or inconsistent.
fn solve_on_columns(
    rows: &[Vec<BigRational>],
    rhs: &[BigRational],
    cols: &[usize],
    nrows: usize,
    ncols: usize,
) -> Option<Vec<BigRational>> {
    let k = cols.len();
    let mut aug: Vec<Vec<BigRational>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|&c| rows[i][c].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..k {
        let Some(p) = (r..nrows).find(|&i| !aug[i][c].is_zero()) else {
            return None; // dependent columns: not a basic solution
        };
        aug.swap(r, p);
        let inv = aug[r][c].recip();
        for x in aug[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !aug[i][c].is_zero() {
                let factor = aug[i][c].clone();
                for j in 0..=k {
                    let sub = &factor * &aug[r][j];
                    aug[i][j] -= sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    // consistency of the zeroed-out remainder rows
    for row in aug.iter().skip(r) {
        if !row[k].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); ncols];
    for &(pr, pc) in &pivots {
        x[cols[pc]] = aug[pr][k].clone();
    }
    Some(x)
}

/// Pfaffian of a skew-symmetric rational matrix by cofactor expansion.
fn pfaffian(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::one();
    }
    debug_assert!(n % 2 == 0);
    if n == 2 {
        return m[0][1].clone();
    }
    let mut total = BigRational::zero();
    for j in 1..n {
        if m[0][j].is_zero() {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| i != 0 && i != j).collect();
        let minor: Vec<Vec<BigRational>> = keep
            .iter()
            .map(|&r| keep.iter().map(|&c| m[r][c].clone()).collect())
            .collect();
        let sign = if j % 2 == 1 {
            BigRational::one()
        } else {
            -BigRational::one()
        };
        total += sign * &m[0][j] * pfaffian(&minor);
    }
    total
}

// ---------------------------------------------------------------------
// The four torus charts.
// ---------------------------------------------------------------------

const CHART_LINEAR: [[[i64; 2]; 2]; 4] = [
    [[-1, -1], [1, 0]],
    [[0, -1], [1, 1]],
    [[1, 0], [1, 1]],
    [[1, 1], [0, 1]],
];

/// Foliation of the weight pair `(μ1, μ2)` in chart `k ∈ 1..=4`.
pub fn torus_chart(k: usize, mu1: f64, mu2: f64) -> Result<Foliation, TrackError> {
    if !(1..=4).contains(&k) {
        return Err(TrackError::BadChartIndex(k));
    }
    let m = CHART_LINEAR[k - 1];
    Ok(Foliation::new(
        m[0][0] as f64 * mu1 + m[0][1] as f64 * mu2,
        m[1][0] as f64 * mu1 + m[1][1] as f64 * mu2,
    ))
}

/// Weight pair of a foliation in chart `k`, when the foliation lies in
/// the chart's image cone.
pub fn torus_chart_inverse(k: usize, f: &Foliation) -> Result<(f64, f64), TrackError> {
    if !(1..=4).contains(&k) {
        return Err(TrackError::BadChartIndex(k));
    }
    let m = CHART_LINEAR[k - 1];
    // unimodular: inverse is the adjugate
    let inv = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
    for sign in [1.0, -1.0] {
        let (x, y) = (sign * f.x(), sign * f.y());
        let mu1 = inv[0][0] as f64 * x + inv[0][1] as f64 * y;
        let mu2 = inv[1][0] as f64 * x + inv[1][1] as f64 * y;
        if mu1 >= 0.0 && mu2 >= 0.0 {
            return Ok((mu1, mu2));
        }
    }
    Err(TrackError::OutOfCone)
}

/// Jacobian determinant of the chart's linear part, exactly.
pub fn chart_jacobian(k: usize) -> Result<i64, TrackError> {
    if !(1..=4).contains(&k) {
        return Err(TrackError::BadChartIndex(k));
    }
    let m = CHART_LINEAR[k - 1];
    Ok(m[0][0] * m[1][1] - m[0][1] * m[1][0])
}

// ---------------------------------------------------------------------
// Fixtures.
// ---------------------------------------------------------------------

/// One branch through one bivalent switch.
pub fn loop_track() -> TrainTrack {
    TrainTrack::new(
        vec!["e0".into()],
        vec![Switch {
            name: "v".into(),
            ends: vec![
                (BranchEnd { branch: 0, end: 0 }, Direction::Incoming),
                (BranchEnd { branch: 0, end: 1 }, Direction::Outgoing),
            ],
            ordered_pair: None,
        }],
    )
    .expect("fixture is valid")
}

/// Theta graph with both switches reading `e1` in, `e2`, `e3` out.
pub fn theta_track() -> TrainTrack {
    let e = |branch: usize, end: u8| BranchEnd { branch, end };
    TrainTrack::new(
        vec!["e1".into(), "e2".into(), "e3".into()],
        vec![
            Switch {
                name: "a".into(),
                ends: vec![
                    (e(0, 0), Direction::Incoming),
                    (e(1, 0), Direction::Outgoing),
                    (e(2, 0), Direction::Outgoing),
                ],
                ordered_pair: Some((e(1, 0), e(2, 0))),
            },
            Switch {
                name: "b".into(),
                ends: vec![
                    (e(0, 1), Direction::Incoming),
                    (e(1, 1), Direction::Outgoing),
                    (e(2, 1), Direction::Outgoing),
                ],
                ordered_pair: Some((e(1, 1), e(2, 1))),
            },
        ],
    )
    .expect("fixture is valid")
}

/// The torus chart track: free branches `e1`, `e2` merging into a third
/// branch at both switches, so the weight space is the free pair
/// `(μ(e1), μ(e2))` and both switches contribute equal form terms.
pub fn torus_chart_track() -> TrainTrack {
    let e = |branch: usize, end: u8| BranchEnd { branch, end };
    TrainTrack::new(
        vec!["m".into(), "e1".into(), "e2".into()],
        vec![
            Switch {
                name: "a".into(),
                ends: vec![
                    (e(1, 0), Direction::Incoming),
                    (e(2, 0), Direction::Incoming),
                    (e(0, 0), Direction::Outgoing),
                ],
                ordered_pair: Some((e(1, 0), e(2, 0))),
            },
            Switch {
                name: "b".into(),
                ends: vec![
                    (e(0, 1), Direction::Incoming),
                    (e(1, 1), Direction::Outgoing),
                    (e(2, 1), Direction::Outgoing),
                ],
                ordered_pair: Some((e(1, 1), e(2, 1))),
            },
        ],
    )
    .expect("fixture is valid")
}

/// Theta with one switch reversed so the conditions force a zero branch.
pub fn pinched_theta_track() -> TrainTrack {
    let e = |branch: usize, end: u8| BranchEnd { branch, end };
    TrainTrack::new(
        vec!["e1".into(), "e2".into(), "e3".into()],
        vec![
            Switch {
                name: "a".into(),
                ends: vec![
                    (e(0, 0), Direction::Incoming),
                    (e(1, 0), Direction::Outgoing),
                    (e(2, 0), Direction::Outgoing),
                ],
                ordered_pair: Some((e(1, 0), e(2, 0))),
            },
            Switch {
                name: "b".into(),
                ends: vec![
                    (e(1, 1), Direction::Incoming),
                    (e(0, 1), Direction::Outgoing),
                    (e(2, 1), Direction::Outgoing),
                ],
                ordered_pair: Some((e(0, 1), e(2, 1))),
            },
        ],
    )
    .expect("fixture is valid")
}

// ---------------------------------------------------------------------
// Track description files.
// ---------------------------------------------------------------------

/// Parse failure with its position in the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Parses the plain-text track description format:
///
/// ```text
/// # comment
/// branch e1
/// switch a in e1.0 e2.0 out m.0 ordered e1.0 e2.0
/// ```
///
/// Branch ends are `<name>.<0|1>`; `ordered` names the two merging ends
/// of a trivalent switch.
pub fn parse_track(text: &str) -> Result<TrainTrack, ParseError> {
    let mut branch_names: Vec<String> = Vec::new();
    let mut switches: Vec<Switch> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let mut tokens = tokenize(content, line);
        let Some((keyword, col)) = tokens.next() else {
            continue;
        };
        match keyword {
            "branch" => {
                let (name, ncol) = tokens.next().ok_or_else(|| ParseError {
                    line,
                    col,
                    message: "expected branch name".into(),
                })?;
                if branch_names.iter().any(|n| n == name) {
                    return Err(ParseError {
                        line,
                        col: ncol,
                        message: format!("branch `{name}` declared twice"),
                    });
                }
                branch_names.push(name.to_string());
            }
            "switch" => {
                let (name, _) = tokens.next().ok_or_else(|| ParseError {
                    line,
                    col,
                    message: "expected switch name".into(),
                })?;
                let mut ends: Vec<(BranchEnd, Direction)> = Vec::new();
                let mut ordered: Vec<BranchEnd> = Vec::new();
                let mut mode: Option<&str> = None;
                for (tok, tcol) in tokens {
                    match tok {
                        "in" | "out" | "ordered" => mode = Some(tok),
                        _ => {
                            let end = parse_end(tok, &branch_names, line, tcol)?;
                            match mode {
                                Some("in") => ends.push((end, Direction::Incoming)),
                                Some("out") => ends.push((end, Direction::Outgoing)),
                                Some("ordered") => ordered.push(end),
                                _ => {
                                    return Err(ParseError {
                                        line,
                                        col: tcol,
                                        message: format!(
                                            "expected `in`, `out` or `ordered` before `{tok}`"
                                        ),
                                    })
                                }
                            }
                        }
                    }
                }
                let ordered_pair = match ordered.len() {
                    0 => None,
                    2 => Some((ordered[0], ordered[1])),
                    n => {
                        return Err(ParseError {
                            line,
                            col,
                            message: format!("`ordered` takes exactly two ends, got {n}"),
                        })
                    }
                };
                switches.push(Switch {
                    name: name.to_string(),
                    ends,
                    ordered_pair,
                });
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    message: format!("unknown keyword `{other}`"),
                })
            }
        }
    }
    TrainTrack::new(branch_names, switches).map_err(|e| ParseError {
        line: 0,
        col: 0,
        message: e.to_string(),
    })
}

fn tokenize(content: &str, _line: usize) -> impl Iterator<Item = (&str, usize)> {
    content.split_whitespace().map(move |tok| {
        let col = tok.as_ptr() as usize - content.as_ptr() as usize + 1;
        (tok, col)
    })
}

fn parse_end(
    tok: &str,
    branch_names: &[String],
    line: usize,
    col: usize,
) -> Result<BranchEnd, ParseError> {
    let Some((name, end)) = tok.rsplit_once('.') else {
        return Err(ParseError {
            line,
            col,
            message: format!("expected `<branch>.<0|1>`, got `{tok}`"),
        });
    };
    let end: u8 = match end {
        "0" => 0,
        "1" => 1,
        _ => {
            return Err(ParseError {
                line,
                col,
                message: format!("branch end must be 0 or 1, got `{end}`"),
            })
        }
    };
    let branch = branch_names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| ParseError {
            line,
            col,
            message: format!("unknown branch `{name}`"),
        })?;
    Ok(BranchEnd { branch, end })
}
