//! Exact-rational Fourier-Motzkin elimination and the end-to-end facet
//! identity check.
//!
//! Repeated float elimination drifts; rationals keep every derived row
//! exact, so the projection of the corner-force system can be compared
//! against the closed-form rows by literal equality of canonical integer
//! vectors. Redundancy in the final homogeneous system is resolved
//! geometrically instead of by LP: a valid row is a facet of the
//! full-dimensional cone exactly when the rays it is tight on span a
//! hyperplane, and ray tightness is decidable exactly.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact rational scalar used throughout this module.
pub type Rat = num_rational::BigRational;

/// Shorthand for small rational constants.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Converts a float exactly (every finite f64 is rational).
pub fn rat_from_f64(v: f64) -> Option<Rat> {
    Rat::from_float(v)
}

/// One exact inequality `coeffs . x <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRow {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

impl ExactRow {
    pub fn homogeneous(coeffs: Vec<Rat>) -> Self {
        Self {
            coeffs,
            rhs: Rat::zero(),
        }
    }

    fn negated(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            rhs: -&self.rhs,
        }
    }

    fn is_tautology(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero) && !self.rhs.is_negative()
    }
}

/// Canonical integer form: denominators cleared, content divided out.
/// Two rows are positive multiples of each other exactly when their
/// canonical forms are equal.
pub fn canonical_integers(row: &ExactRow) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut scale = BigInt::one();
    for v in row.coeffs.iter().chain(std::iter::once(&row.rhs)) {
        scale = scale.lcm(v.denom());
    }
    let ints: Vec<BigInt> = row
        .coeffs
        .iter()
        .chain(std::iter::once(&row.rhs))
        .map(|v| (v * &scale).to_integer())
        .collect();
    let mut content = BigInt::zero();
    for i in &ints {
        content = content.gcd(i);
    }
    if content.is_zero() {
        return ints;
    }
    ints.into_iter().map(|i| i / &content).collect()
}

/// A system of exact inequalities over a fixed dimension.
#[derive(Debug, Clone)]
pub struct ExactSystem {
    dim: usize,
    rows: Vec<ExactRow>,
}

impl ExactSystem {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: ExactRow) {
        assert_eq!(row.coeffs.len(), self.dim);
        self.rows.push(row);
    }

    /// Pushes both `row <= rhs` and its negation, encoding an equality.
    pub fn push_equality(&mut self, row: ExactRow) {
        let neg = row.negated();
        self.push(row);
        self.push(neg);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[ExactRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn combine(lower: &ExactRow, upper: &ExactRow, var: usize) -> ExactRow {
    let a = upper.coeffs[var].clone();
    let b = -lower.coeffs[var].clone();
    let mut coeffs: Vec<Rat> = lower
        .coeffs
        .iter()
        .zip(&upper.coeffs)
        .map(|(l, u)| l * &a + u * &b)
        .collect();
    coeffs[var] = Rat::zero();
    ExactRow {
        rhs: &lower.rhs * &a + &upper.rhs * &b,
        coeffs,
    }
}

fn find_equality_pair(lower: &[ExactRow], upper: &[ExactRow]) -> Option<(usize, usize)> {
    let upper_keys: std::collections::HashMap<Vec<BigInt>, usize> = upper
        .iter()
        .enumerate()
        .map(|(i, r)| (canonical_integers(r), i))
        .collect();
    for (li, l) in lower.iter().enumerate() {
        if let Some(&ui) = upper_keys.get(&canonical_integers(&l.negated())) {
            return Some((li, ui));
        }
    }
    None
}

/// Row cap for exact elimination; the corner-force systems stay far
/// below it, so hitting it means a degenerate input.
const EXACT_ROW_CAP: usize = 50_000;

/// Eliminates one variable exactly. Equality pairs are substituted;
/// otherwise all lower/upper bounds are matched pairwise. Output rows
/// are deduplicated up to positive scaling and tautologies are dropped.
pub fn eliminate(sys: &ExactSystem, var: usize) -> Result<ExactSystem, Error> {
    if var >= sys.dim {
        return Err(Error::NumericalFailure(format!(
            "variable {var} out of range for dimension {}",
            sys.dim
        )));
    }
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut out = ExactSystem::new(sys.dim);
    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();

    for row in &sys.rows {
        let c = &row.coeffs[var];
        if c.is_positive() {
            upper.push(row.clone());
        } else if c.is_negative() {
            lower.push(row.clone());
        } else if !row.is_tautology() && seen.insert(canonical_integers(row)) {
            out.push(row.clone());
        }
    }

    let mut push_combined = |out: &mut ExactSystem, row: ExactRow| -> Result<(), Error> {
        if !row.is_tautology() && seen.insert(canonical_integers(&row)) {
            out.push(row);
        }
        if out.len() > EXACT_ROW_CAP {
            return Err(Error::ExpressionSwell {
                rows: out.len(),
                cap: EXACT_ROW_CAP,
            });
        }
        Ok(())
    };

    match find_equality_pair(&lower, &upper) {
        Some((li, ui)) => {
            for (i, u) in upper.iter().enumerate() {
                if i != ui {
                    push_combined(&mut out, combine(&lower[li], u, var))?;
                }
            }
            for (i, l) in lower.iter().enumerate() {
                if i != li {
                    push_combined(&mut out, combine(l, &upper[ui], var))?;
                }
            }
        }
        None => {
            for l in &lower {
                for u in &upper {
                    push_combined(&mut out, combine(l, u, var))?;
                }
            }
        }
    }
    Ok(out)
}

/// Eliminates a set of variables, cheapest first (same greedy order as
/// the float path).
pub fn eliminate_many(sys: &ExactSystem, vars: &[usize]) -> Result<ExactSystem, Error> {
    let mut remaining: Vec<usize> = vars.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let mut current = sys.clone();

    while !remaining.is_empty() {
        let mut best: Option<(i64, usize)> = None;
        for &v in &remaining {
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            for row in &current.rows {
                let c = &row.coeffs[v];
                if c.is_positive() {
                    upper.push(row.clone());
                } else if c.is_negative() {
                    lower.push(row.clone());
                }
            }
            let cost = if find_equality_pair(&lower, &upper).is_some() {
                (lower.len() + upper.len()) as i64 - 2
            } else {
                (lower.len() * upper.len()) as i64 - (lower.len() + upper.len()) as i64
            };
            if best.map_or(true, |(c, _)| cost < c) {
                best = Some((cost, v));
            }
        }
        let (_, var) = best.expect("remaining is nonempty");
        current = eliminate(&current, var)?;
        remaining.retain(|&v| v != var);
    }
    Ok(current)
}

/// Rank of a set of rational vectors by Gaussian elimination.
pub fn rank(vectors: &[Vec<Rat>]) -> usize {
    let mut rows: Vec<Vec<Rat>> = vectors.to_vec();
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = rows[r][col].clone();
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let factor = &rows[i][col] / &inv;
            for c in col..cols {
                let delta = &factor * &rows[r][c];
                rows[i][c] = &rows[i][c] - delta;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Rectangular patch with exact dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPatch {
    pub x: Rat,
    pub y: Rat,
    pub mu: Rat,
}

impl ExactPatch {
    pub fn new(x: Rat, y: Rat, mu: Rat) -> Result<Self, Error> {
        if !x.is_positive() || !y.is_positive() {
            return Err(Error::InvalidPatch(
                "half-dimensions must be positive".into(),
            ));
        }
        if mu.is_negative() {
            return Err(Error::InvalidPatch(
                "friction coefficient must be nonnegative".into(),
            ));
        }
        Ok(Self { x, y, mu })
    }

    /// Same fixed corner order as [`crate::contact::ContactPatch::corners`].
    fn corners(&self) -> [(Rat, Rat); 4] {
        [
            (self.x.clone(), self.y.clone()),
            (self.x.clone(), -self.y.clone()),
            (-self.x.clone(), -self.y.clone()),
            (-self.x.clone(), self.y.clone()),
        ]
    }
}

/// The 16 exact span rays: unnormalized generators `(+-mu, +-mu, 1)` at
/// each corner, mapped to wrench space.
pub fn exact_rays(patch: &ExactPatch) -> Vec<Vec<Rat>> {
    let signs = [Rat::one(), -Rat::one()];
    let mut rays = Vec::new();
    for (cx, cy) in patch.corners() {
        for sx in &signs {
            for sy in &signs {
                let gx = sx * &patch.mu;
                let gy = sy * &patch.mu;
                let gz = Rat::one();
                rays.push(vec![
                    gx.clone(),
                    gy.clone(),
                    gz.clone(),
                    &cy * &gz,
                    -(&cx * &gz),
                    &cx * &gy - &cy * &gx,
                ]);
            }
        }
    }
    rays
}

/// The existential corner-force system over 18 variables: the 12 force
/// components (f1x, f1y, f1z, ..., f4z) followed by the 6 wrench
/// components. Rows are the wrench-map equalities `G f = w` and the
/// linearized Coulomb bounds per corner.
pub fn corner_force_system(patch: &ExactPatch) -> ExactSystem {
    let dim = 18;
    let w0 = 12;
    let mut sys = ExactSystem::new(dim);
    let corners = patch.corners();

    let zeros = || vec![Rat::zero(); dim];

    // force sums: f^x, f^y, f^z
    for axis in 0..3 {
        let mut row = zeros();
        for corner in 0..4 {
            row[3 * corner + axis] = Rat::one();
        }
        row[w0 + axis] = -Rat::one();
        sys.push_equality(ExactRow::homogeneous(row));
    }
    // tau^x = sum y_i f_i^z, tau^y = -sum x_i f_i^z
    let mut taux = zeros();
    let mut tauy = zeros();
    for (corner, (cx, cy)) in corners.iter().enumerate() {
        taux[3 * corner + 2] = cy.clone();
        tauy[3 * corner + 2] = -cx.clone();
    }
    taux[w0 + 3] = -Rat::one();
    tauy[w0 + 4] = -Rat::one();
    sys.push_equality(ExactRow::homogeneous(taux));
    sys.push_equality(ExactRow::homogeneous(tauy));
    // tau^z = sum (x_i f_i^y - y_i f_i^x)
    let mut tauz = zeros();
    for (corner, (cx, cy)) in corners.iter().enumerate() {
        tauz[3 * corner] = -cy.clone();
        tauz[3 * corner + 1] = cx.clone();
    }
    tauz[w0 + 5] = -Rat::one();
    sys.push_equality(ExactRow::homogeneous(tauz));

    // Coulomb: +-f_i^x <= mu f_i^z, +-f_i^y <= mu f_i^z
    for corner in 0..4 {
        for axis in 0..2 {
            for sign in [Rat::one(), -Rat::one()] {
                let mut row = zeros();
                row[3 * corner + axis] = sign;
                row[3 * corner + 2] = -patch.mu.clone();
                sys.push(ExactRow::homogeneous(row));
            }
        }
    }
    sys
}

/// Facets of the projected cone.
///
/// Input rows must be valid for every exact ray (anything else means the
/// elimination was unsound and is reported as a failure). A row is kept
/// when its tight rays span one dimension less than the whole ray set;
/// for the full-dimensional contact cone that pins facets uniquely up to
/// positive scaling, so the survivors are canonical.
pub fn facet_filter(rows: &[ExactRow], rays: &[Vec<Rat>]) -> Result<Vec<ExactRow>, Error> {
    let rank_all = rank(rays);
    let mut kept = Vec::new();
    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
    for row in rows {
        let mut tight: Vec<Vec<Rat>> = Vec::new();
        for ray in rays {
            let value: Rat = row
                .coeffs
                .iter()
                .zip(ray)
                .map(|(c, r)| c * r)
                .fold(Rat::zero(), |acc, v| acc + v);
            if value.is_positive() {
                return Err(Error::NumericalFailure(
                    "projected row is violated by a ray of the span".into(),
                ));
            }
            if value.is_zero() {
                tight.push(ray.clone());
            }
        }
        if rank(&tight) + 1 >= rank_all && seen.insert(canonical_integers(row)) {
            kept.push(row.clone());
        }
    }
    Ok(kept)
}

/// Eliminates the 12 force variables from the corner-force system and
/// reduces the result to facets; rows come back over the 6 wrench
/// coordinates.
pub fn project_corner_forces(patch: &ExactPatch) -> Result<Vec<ExactRow>, Error> {
    let sys = corner_force_system(patch);
    let eliminated = eliminate_many(&sys, &(0..12).collect::<Vec<_>>())?;

    let mut wrench_rows = Vec::new();
    for row in eliminated.rows() {
        if row.coeffs[..12].iter().any(|c| !c.is_zero()) {
            return Err(Error::NumericalFailure(
                "force variable survived exact elimination".into(),
            ));
        }
        if !row.rhs.is_zero() {
            return Err(Error::NumericalFailure(
                "homogeneous system produced inhomogeneous row".into(),
            ));
        }
        wrench_rows.push(ExactRow::homogeneous(row.coeffs[12..].to_vec()));
    }
    facet_filter(&wrench_rows, &exact_rays(patch))
}

/// The 16 closed-form rows with exact coefficients, mirroring
/// `cone::raw_rows` term for term.
pub fn closed_form_rows(patch: &ExactPatch) -> Vec<ExactRow> {
    let signs = [Rat::one(), -Rat::one()];
    let (x, y, mu) = (&patch.x, &patch.y, &patch.mu);
    let perimeter = mu * (x + y);
    let mut rows = Vec::with_capacity(16);
    let mut push = |coeffs: [Rat; 6]| rows.push(ExactRow::homogeneous(coeffs.to_vec()));

    for s in &signs {
        push([
            s.clone(),
            Rat::zero(),
            -mu.clone(),
            Rat::zero(),
            Rat::zero(),
            Rat::zero(),
        ]);
    }
    for s in &signs {
        push([
            Rat::zero(),
            s.clone(),
            -mu.clone(),
            Rat::zero(),
            Rat::zero(),
            Rat::zero(),
        ]);
    }
    for s in &signs {
        push([
            Rat::zero(),
            Rat::zero(),
            -y.clone(),
            s.clone(),
            Rat::zero(),
            Rat::zero(),
        ]);
    }
    for s in &signs {
        push([
            Rat::zero(),
            Rat::zero(),
            -x.clone(),
            Rat::zero(),
            s.clone(),
            Rat::zero(),
        ]);
    }
    for sx in &signs {
        for sy in &signs {
            push([
                sx * y,
                sy * x,
                -perimeter.clone(),
                -(sx * mu),
                -(sy * mu),
                -Rat::one(),
            ]);
        }
    }
    for sx in &signs {
        for sy in &signs {
            push([
                sx * y,
                sy * x,
                -perimeter.clone(),
                sx * mu,
                sy * mu,
                Rat::one(),
            ]);
        }
    }
    rows
}

fn canonical_set(rows: &[ExactRow]) -> Vec<Vec<BigInt>> {
    let mut set: Vec<Vec<BigInt>> = rows.iter().map(canonical_integers).collect();
    set.sort();
    set
}

/// End-to-end facet identity: elimination of the corner forces yields,
/// up to positive scaling and row order, exactly the 16 closed-form
/// rows. Requires `mu > 0` (the 16-row form degenerates otherwise).
pub fn matches_closed_form(patch: &ExactPatch) -> Result<bool, Error> {
    if patch.mu.is_zero() {
        return Err(Error::ZeroFriction);
    }
    let projected = project_corner_forces(patch)?;
    Ok(canonical_set(&projected) == canonical_set(&closed_form_rows(patch)))
}
