//! Path-count matrices, their LU factors, the hole Schur complements and
//! the resulting tiling counts.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{
    binomial, frac, gamma_ratio, half_gamma_product, hyp_terminating, product_formula, rat, ArithError, Int,
    ProductKind, Rat,
};
use crate::regions::{lgv_points, LatticePoint, PathPicture, RegionSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("index ({0}, {1}) outside the range of this factor")]
    Index(usize, usize),
    #[error("count routes disagree for {spec}: {detail}")]
    Inconsistent { spec: String, detail: String },
    #[error("{0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PathVariant {
    Plain,
    AvoidDiagonal,
    WeightedBelow,
}

fn plain(a: LatticePoint, x: i64, y: i64) -> Int {
    let (dx, dy) = (x - a.x, y - a.y);
    if dx < 0 || dy < 0 {
        Int::zero()
    } else {
        binomial(dx + dy, dx)
    }
}

/// North/east lattice paths from `start` to `end`. The constrained variants
/// use the reflection principle: paths avoiding the diagonal y = x, and
/// paths staying weakly below it with weight 2 per diagonal touch.
pub fn path_count(start: LatticePoint, end: LatticePoint, variant: PathVariant) -> Int {
    match variant {
        PathVariant::Plain => plain(start, end.x, end.y),
        PathVariant::AvoidDiagonal => plain(start, end.x, end.y) - plain(start, end.y, end.x),
        PathVariant::WeightedBelow => plain(start, end.x, end.y) + plain(start, end.y, end.x),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Half {
    Lower,
    Upper,
}

impl Half {
    pub fn variant(self) -> PathVariant {
        match self {
            Half::Lower => PathVariant::AvoidDiagonal,
            Half::Upper => PathVariant::WeightedBelow,
        }
    }

    pub fn picture(self) -> PathPicture {
        match self {
            Half::Lower => PathPicture::Lower,
            Half::Upper => PathPicture::Upper,
        }
    }

    pub fn prefactor_kind(self) -> ProductKind {
        match self {
            Half::Lower => ProductKind::TransposeComplement,
            Half::Upper => ProductKind::VerticalSymmetric,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Half::Lower => "lower",
            Half::Upper => "upper",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    pub order: usize,
    entries: Vec<Rat>,
}

impl ExactMatrix {
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut entries = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                entries.push(f(i, j));
            }
        }
        ExactMatrix { order, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let order = rows.len();
        assert!(rows.iter().all(|r| r.len() == order), "matrix must be square");
        ExactMatrix { order, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.order + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }
}

/// Path matrix for the lower (diagonal-avoiding) or upper (weighted) half;
/// boundary rows/columns first, then holes by position.
pub fn build_q(spec: &RegionSpec, half: Half) -> ExactMatrix {
    let (starts, ends) = lgv_points(spec, half.picture());
    let variant = half.variant();
    ExactMatrix::from_fn(starts.len(), |i, j| Rat::from_integer(path_count(starts[i], ends[j], variant)))
}

/// Plain path matrix of the glued full-hexagon picture.
pub fn build_full_path_matrix(spec: &RegionSpec) -> ExactMatrix {
    let (starts, ends) = lgv_points(spec, PathPicture::Full);
    ExactMatrix::from_fn(starts.len(), |i, j| Rat::from_integer(path_count(starts[i], ends[j], PathVariant::Plain)))
}

/// Determinant by fraction-free (Bareiss) elimination after clearing row
/// denominators.
pub fn det_exact(m: &ExactMatrix) -> Rat {
    let k = m.order;
    if k == 0 {
        return Rat::one();
    }
    let mut scale = Int::one();
    let mut a: Vec<Vec<Int>> = Vec::with_capacity(k);
    for i in 0..k {
        let lcm = m.row(i).iter().fold(Int::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
        a.push(m.row(i).iter().map(|x| (x * Rat::from_integer(lcm.clone())).to_integer()).collect());
        scale *= lcm;
    }
    let mut negate = false;
    let mut prev = Int::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !a[r][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            negate = !negate;
        }
        for r in c + 1..k {
            for j in c + 1..k {
                let v = (&a[r][j] * &a[c][c] - &a[r][c] * &a[c][j]) / &prev;
                a[r][j] = v;
            }
            a[r][c] = Int::zero();
        }
        prev = a[c][c].clone();
    }
    let det = Rat::new(a[k - 1][k - 1].clone(), scale);
    if negate {
        -det
    } else {
        det
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LuFactor {
    A,
    B,
    C,
    D,
    APrime,
    BPrime,
    CPrime,
    DPrime,
}

impl LuFactor {
    pub fn for_half(half: Half) -> [LuFactor; 4] {
        match half {
            Half::Lower => [LuFactor::A, LuFactor::B, LuFactor::C, LuFactor::D],
            Half::Upper => [LuFactor::APrime, LuFactor::BPrime, LuFactor::CPrime, LuFactor::DPrime],
        }
    }
}

fn sign_pow(k: i64) -> Rat {
    if k % 2 == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

/// Lower-left block entry for a hole row at position `l` and boundary
/// column `j`.
pub fn b_entry(n: i64, l: i64, j: i64, half: Half) -> Result<Rat, ArithError> {
    let (h, l2) = (n / 2, l / 2);
    Ok(match half {
        Half::Lower => {
            sign_pow(j + 1)
                * gamma_ratio(&[j + n - 1, 2 * j + n, n - l + 1, j + l2 + h - 1], &[j, 2 * j + 2 * n - 2, h - l2 + 1, l2 + h, j - l2 + h + 1])?
                / rat(2)
        }
        Half::Upper => {
            sign_pow(j + 1)
                * gamma_ratio(&[j + n, 2 * j + n, n - l + 2, j + l2 + h - 1], &[j, 2 * j + 2 * n, h - l2 + 1, l2 + h, j - l2 + h + 1])?
        }
    })
}

/// Upper-right block entry for boundary row `i` and a hole column at `r`.
pub fn d_entry(n: i64, i: i64, r: i64, half: Half) -> Result<Rat, ArithError> {
    let (h, r2) = (n / 2, r / 2);
    Ok(match half {
        Half::Lower => {
            sign_pow(i + 1)
                * gamma_ratio(&[2 * i + 1, i + n, n + r + 1, i + h - r2 - 1], &[2 * i + n - 1, i + 1, h - r2, h + r2 + 1, i + h + r2 + 1])?
                / rat(2)
        }
        Half::Upper => {
            sign_pow(i + 1)
                * gamma_ratio(&[2 * i - 1, i + n, n + r + 2, i + h - r2 - 1], &[i, 2 * i + n - 1, h - r2, h + r2 + 1, i + h + r2 + 1])?
        }
    })
}

fn a_entry(n: i64, i: i64, j: i64, half: Half) -> Result<Rat, ArithError> {
    match half {
        Half::Lower => gamma_ratio(&[2 * i, n + 1, i + j - 1, 2 * j + n], &[2 * i - 1, 2 * j, i - j + 1, j - i + n + 1, i + j + n]),
        Half::Upper => gamma_ratio(&[n + 1, i + j - 1, 2 * j + n], &[2 * j - 1, i - j + 1, j - i + n + 1, i + j + n]),
    }
}

fn c_entry(n: i64, i: i64, j: i64, half: Half) -> Result<Rat, ArithError> {
    match half {
        Half::Lower => {
            gamma_ratio(&[2 * j, n + 1, i + j - 1, 2 * i + 2 * n - 1], &[2 * j - 1, j - i + 1, 2 * i + n - 1, i - j + n + 1, i + j + n])
        }
        Half::Upper => gamma_ratio(&[n + 1, i + j - 1, 2 * i + 2 * n], &[j - i + 1, 2 * i + n - 1, i - j + n + 1, i + j + n]),
    }
}

/// Entry (i, j) (1-based, in the indexing of the full path matrix) of the
/// named LU factor. B rows and D columns run over m+1..=m+p.
pub fn lu_entry(name: LuFactor, i: usize, j: usize, spec: &RegionSpec) -> Result<Rat, MatrixError> {
    let (n, m, p) = (spec.n, spec.m as usize, spec.p());
    let boundary = |k: usize| (1..=m).contains(&k);
    let hole = |k: usize| (m + 1..=m + p).contains(&k);
    let half = match name {
        LuFactor::A | LuFactor::B | LuFactor::C | LuFactor::D => Half::Lower,
        _ => Half::Upper,
    };
    let (ii, jj) = (i as i64, j as i64);
    let value = match name {
        LuFactor::A | LuFactor::APrime if boundary(i) && boundary(j) => a_entry(n, ii, jj, half)?,
        LuFactor::C | LuFactor::CPrime if boundary(i) && boundary(j) => c_entry(n, ii, jj, half)?,
        LuFactor::B | LuFactor::BPrime if hole(i) && boundary(j) => b_entry(n, spec.left[i - m - 1], jj, half)?,
        LuFactor::D | LuFactor::DPrime if boundary(i) && hole(j) => d_entry(n, ii, spec.right[j - m - 1], half)?,
        _ => return Err(MatrixError::Index(i, j)),
    };
    Ok(value)
}

/// p x p hole block left after eliminating the boundary rows:
/// `Q[m+i][m+j] - sum_s B(m+i, s) D(s, m+j)`. Never materialises Q.
pub fn build_e(spec: &RegionSpec, half: Half) -> Result<ExactMatrix, MatrixError> {
    let (n, m, p) = (spec.n, spec.m, spec.p());
    let variant = half.variant();
    let b: Vec<Vec<Rat>> = spec
        .left
        .iter()
        .map(|&l| (1..=m).map(|s| b_entry(n, l, s, half)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let d: Vec<Vec<Rat>> = spec
        .right
        .iter()
        .map(|&r| (1..=m).map(|s| d_entry(n, s, r, half)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(p);
    for (i, &l) in spec.left.iter().enumerate() {
        let start = LatticePoint::new(n / 2 + l / 2 + 1, n / 2 + l / 2);
        let mut row = Vec::with_capacity(p);
        for (j, &r) in spec.right.iter().enumerate() {
            let end = LatticePoint::new(n / 2 + r / 2 + 1, n / 2 + r / 2);
            let mut e = Rat::from_integer(path_count(start, end, variant));
            for s in 0..m as usize {
                e -= &b[i][s] * &d[j][s];
            }
            row.push(e);
        }
        rows.push(row);
    }
    Ok(ExactMatrix::from_rows(rows))
}

/// Which rendering of the closed-form hole entries to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClosedForm {
    /// exactly as displayed
    Printed,
    /// upper-half display with its branch labels swapped and the
    /// Gamma(l/2 + m/2 + n/2 + 1) factor read as Gamma(l/2 + m + n/2)
    Corrected,
}

fn half_of(x: i64) -> Rat {
    frac(x, 2)
}

fn lower_far(n: i64, m: i64, l: i64, r: i64) -> Result<Rat, ArithError> {
    let h = frac(1, 2);
    let (nh, lh, rh, mr) = (half_of(n), half_of(l), half_of(r), rat(m));
    let series = hyp_terminating(
        &[&rh - &nh + rat(1), rat(1), &rh - &lh + rat(2), &nh + &rh + &h],
        &[&mr + &nh + &rh + rat(2), &rh - &mr - &nh + rat(2), &rh - &lh + frac(3, 2)],
        &rat(1),
    )?;
    let pre = half_gamma_product(
        &[rat(m + n + 1), half_of(n + r + 1), &lh + &mr + &nh, &mr + &nh - &rh - rat(1), &mr + frac(3, 2), half_of(n - l + 1)],
        &[half_of(n - r), &mr - &lh + &nh + rat(1), &mr + &nh + &rh + rat(2), mr.clone(), half_of(l + n), &mr + rat(n) - &h],
        -1,
    )?;
    Ok(series * pre * pow2(r - l + 2) / rat(r - l + 1))
}

fn lower_near(n: i64, m: i64, l: i64, r: i64) -> Result<Rat, ArithError> {
    let (nh, lh, rh, mr) = (half_of(n), half_of(l), half_of(r), rat(m));
    let series = hyp_terminating(
        &[rat(2) - &lh + &rh, frac(3, 2), rat(m + n + 1), rat(1 - m)],
        &[&nh + rat(2) - &lh, half_of(n + r) + rat(2), frac(5, 2)],
        &rat(1),
    )?;
    let pre = half_gamma_product(
        &[&mr + frac(3, 2), half_of(n - l + 1), rat(m + n + 1), half_of(n + r + 1)],
        &[mr.clone(), half_of(n - l + 4), &mr + rat(n) - frac(1, 2), half_of(n + r + 4)],
        -1,
    )?;
    Ok(-series * pre * pow2(r - l + 2) / rat(3))
}

fn upper_far(n: i64, m: i64, l: i64, r: i64, printed_gamma: bool) -> Result<Rat, ArithError> {
    let h = frac(1, 2);
    let (nh, lh, rh, mr) = (half_of(n), half_of(l), half_of(r), rat(m));
    let series = hyp_terminating(
        &[&rh - &nh + rat(1), rat(1), &rh - &lh + rat(2), &nh + &rh + frac(3, 2)],
        &[&mr + &nh + &rh + rat(2), &rh - &mr - &nh + rat(2), &rh - &lh + frac(5, 2)],
        &rat(1),
    )?;
    let third = if printed_gamma { &lh + half_of(m) + &nh + rat(1) } else { &lh + &mr + &nh };
    let pre = half_gamma_product(
        &[rat(m + n + 1), half_of(n + r + 3), third, &mr + &nh - &rh - rat(1), &mr + &h, half_of(n - l + 3)],
        &[half_of(n - r), half_of(n - l) + &mr + rat(1), half_of(n + r) + &mr + rat(2), mr.clone(), half_of(l + n), &mr + rat(n) + &h],
        -1,
    )?;
    Ok(series * pre * pow2(r - l + 2) / rat(r - l + 3))
}

fn upper_near(n: i64, m: i64, l: i64, r: i64) -> Result<Rat, ArithError> {
    let h = frac(1, 2);
    let (rh, lh, mr) = (half_of(r), half_of(l), rat(m));
    let series = hyp_terminating(
        &[rat(2) + &rh - &lh, h.clone(), rat(m + n + 1), rat(1 - m)],
        &[half_of(n - l) + rat(2), half_of(n + r) + rat(2), frac(3, 2)],
        &rat(1),
    )?;
    let pre = half_gamma_product(
        &[&mr + &h, half_of(n - l + 3), rat(m + n + 1), half_of(n + r + 3)],
        &[mr.clone(), half_of(n - l) + rat(2), &mr + rat(n) + &h, half_of(n + r) + rat(2)],
        -1,
    )?;
    Ok(-series * pre * pow2(r - l + 2))
}

fn pow2(k: i64) -> Rat {
    if k >= 0 {
        Rat::from_integer(Int::one() << k as usize)
    } else {
        Rat::new(Int::one(), Int::one() << (-k) as usize)
    }
}

/// Hypergeometric closed form of hole entry (i, j) (0-based), pairing left
/// hole i with right hole j.
pub fn closed_form_entry(spec: &RegionSpec, half: Half, i: usize, j: usize, form: ClosedForm) -> Result<Rat, ArithError> {
    let (n, m, l, r) = (spec.n, spec.m, spec.left[i], spec.right[j]);
    match (half, form) {
        (Half::Lower, _) => {
            if r > l {
                lower_far(n, m, l, r)
            } else {
                lower_near(n, m, l, r)
            }
        }
        (Half::Upper, ClosedForm::Printed) => {
            if r < l {
                upper_far(n, m, l, r, true)
            } else {
                upper_near(n, m, l, r)
            }
        }
        (Half::Upper, ClosedForm::Corrected) => {
            if r > l {
                upper_far(n, m, l, r, false)
            } else {
                upper_near(n, m, l, r)
            }
        }
    }
}

/// One hole entry whose closed form disagrees with the subtraction form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub spec: String,
    pub half: Half,
    pub i: usize,
    pub j: usize,
    pub subtraction: String,
    pub closed_form: String,
}

/// Compares every closed-form hole entry with the Schur-complement entry.
pub fn closed_form_discrepancies(spec: &RegionSpec, half: Half, form: ClosedForm) -> Result<Vec<Discrepancy>, MatrixError> {
    let e = build_e(spec, half)?;
    let mut out = Vec::new();
    for i in 0..spec.p() {
        for j in 0..spec.p() {
            let cf = closed_form_entry(spec, half, i, j, form);
            let matches = matches!(&cf, Ok(v) if v == e.get(i, j));
            if !matches {
                out.push(Discrepancy {
                    spec: spec.canonical(),
                    half,
                    i,
                    j,
                    subtraction: e.get(i, j).to_string(),
                    closed_form: match cf {
                        Ok(v) => v.to_string(),
                        Err(err) => format!("error: {err}"),
                    },
                });
            }
        }
    }
    Ok(out)
}

/// The displayed binomial closed forms of the path-matrix blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PrintedBlock {
    /// matrix definition
    Definition,
    /// right-hand sides of the LU identities (i)-(iii)
    Identity,
}

/// Displayed value of path-matrix entry (i, j) (1-based).
pub fn printed_q_entry(spec: &RegionSpec, half: Half, i: usize, j: usize, which: PrintedBlock) -> Int {
    let (n, m) = (spec.n, spec.m as usize);
    let (ii, jj) = (i as i64, j as i64);
    let ratio = |num: i64, den: i64, b: Int| (Rat::from_integer(b) * frac(num, den)).to_integer();
    match (i <= m, j <= m) {
        (true, true) => {
            let second = match which {
                PrintedBlock::Definition => binomial(2 * n, n + 1 - ii - jj),
                PrintedBlock::Identity => match half {
                    Half::Lower => binomial(2 * n, n + ii - jj),
                    Half::Upper => binomial(2 * n, n + 1 - ii - jj),
                },
            };
            match half {
                Half::Lower => binomial(2 * n, n + jj - ii) - second,
                Half::Upper => binomial(2 * n, n + jj - ii) + second,
            }
        }
        (true, false) => {
            let r = spec.right[j - m - 1];
            match half {
                Half::Lower => ratio(2 * ii - 1, n + r + 1, binomial(n + r + 1, n / 2 + r / 2 + 1 - ii)),
                Half::Upper => binomial(n + r + 1, n / 2 + r / 2 + 1 - ii),
            }
        }
        (false, true) => {
            let l = spec.left[i - m - 1];
            match half {
                Half::Lower => {
                    let k = match which {
                        PrintedBlock::Definition => n / 2 - l / 2 - 1 + jj,
                        PrintedBlock::Identity => n / 2 - l / 2 + 1 - jj,
                    };
                    ratio(2 * jj - 1, n - l + 1, binomial(n - l + 1, k))
                }
                Half::Upper => binomial(n - l + 1, n / 2 - l / 2 + 1 - jj),
            }
        }
        (false, false) => {
            let (l, r) = (spec.left[i - m - 1], spec.right[j - m - 1]);
            match half {
                Half::Lower => ratio(1, r - l + 1, binomial(r - l + 1, r / 2 - l / 2)),
                Half::Upper => binomial(r - l + 1, r / 2 - l / 2),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuReport {
    pub spec: String,
    pub half: Half,
    pub checked: usize,
    /// first failing (block, i, j) with 1-based indices
    pub first_failure: Option<(String, usize, usize)>,
}

impl LuReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks Q = L U on the three boundary blocks using the displayed factor
/// entries.
pub fn verify_lu(spec: &RegionSpec, half: Half) -> Result<LuReport, MatrixError> {
    verify_lu_with(spec, half, |f, i, j| lu_entry(f, i, j, spec))
}

/// `verify_lu` with a caller-supplied factor table, for sensitivity tests.
pub fn verify_lu_with(
    spec: &RegionSpec,
    half: Half,
    mut entry: impl FnMut(LuFactor, usize, usize) -> Result<Rat, MatrixError>,
) -> Result<LuReport, MatrixError> {
    let q = build_q(spec, half);
    let [fa, fb, fc, fd] = LuFactor::for_half(half);
    let (m, p) = (spec.m as usize, spec.p());
    let mut checked = 0;
    let fail = |block: &str, i: usize, j: usize| Some((block.to_string(), i, j));
    let mut first_failure = None;
    'outer: for i in 1..=m {
        for j in 1..=m {
            let mut sum = Rat::zero();
            for s in 1..=i.min(j) {
                sum += entry(fa, i, s)? * entry(fc, s, j)?;
            }
            checked += 1;
            if &sum != q.get(i - 1, j - 1) {
                first_failure = fail("boundary", i, j);
                break 'outer;
            }
        }
    }
    if first_failure.is_none() {
        'outer2: for i in 1..=m {
            for j in m + 1..=m + p {
                let mut sum = Rat::zero();
                for s in 1..=i {
                    sum += entry(fa, i, s)? * entry(fd, s, j)?;
                }
                checked += 1;
                if &sum != q.get(i - 1, j - 1) {
                    first_failure = fail("boundary_hole", i, j);
                    break 'outer2;
                }
            }
        }
    }
    if first_failure.is_none() {
        'outer3: for i in m + 1..=m + p {
            for j in 1..=m {
                let mut sum = Rat::zero();
                for s in 1..=j {
                    sum += entry(fb, i, s)? * entry(fc, s, j)?;
                }
                checked += 1;
                if &sum != q.get(i - 1, j - 1) {
                    first_failure = fail("hole_boundary", i, j);
                    break 'outer3;
                }
            }
        }
    }
    Ok(LuReport { spec: spec.canonical(), half, checked, first_failure })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CountKind {
    Lower,
    UpperWeighted,
    Full,
    FreeHalf,
}

impl CountKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lower" => Some(Self::Lower),
            "upper" | "upper_weighted" => Some(Self::UpperWeighted),
            "full" => Some(Self::Full),
            "free_half" | "free" => Some(Self::FreeHalf),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Lower => "lower",
            Self::UpperWeighted => "upper_weighted",
            Self::Full => "full",
            Self::FreeHalf => "free_half",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub spec: RegionSpec,
    pub kind: CountKind,
    pub value: Int,
    /// named sub-results as exact decimal or fraction strings
    pub factors: BTreeMap<String, String>,
}

impl CountResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec.canonical(),
            "kind": self.kind.name(),
            "count": self.value.to_string(),
            "factors": self.factors,
        })
    }
}

/// Count of one half by both routes: |det Q| and prefactor * |det E|.
pub fn half_count(spec: &RegionSpec, half: Half) -> Result<(Int, Rat, Int), MatrixError> {
    if spec.n % 2 != 0 {
        return Err(MatrixError::Precondition(format!("{} half needs even n", half.name())));
    }
    let q = det_exact(&build_q(spec, half)).abs();
    let e = det_exact(&build_e(spec, half)?);
    let pre = product_formula(half.prefactor_kind(), spec.n, spec.m)?;
    if Rat::from_integer(pre.clone()) * e.abs() != q {
        return Err(MatrixError::Inconsistent {
            spec: spec.canonical(),
            detail: format!("{} |det Q| = {q} but prefactor {pre} * |det E| = {}", half.name(), e.abs()),
        });
    }
    Ok((q.to_integer(), e, pre))
}

pub fn count_region(spec: &RegionSpec, kind: CountKind) -> Result<CountResult, MatrixError> {
    let mut factors = BTreeMap::new();
    let value = match kind {
        CountKind::Lower | CountKind::UpperWeighted => {
            let half = if kind == CountKind::Lower { Half::Lower } else { Half::Upper };
            let (v, e, pre) = half_count(spec, half)?;
            factors.insert(half.prefactor_kind().name().to_string(), pre.to_string());
            factors.insert(format!("det_{}", half.name()), e.to_string());
            v
        }
        CountKind::FreeHalf => {
            if !spec.is_free_boundary_compatible() {
                return Err(MatrixError::Precondition("free_half needs R = -L with every l < 0".into()));
            }
            let (v, e, pre) = half_count(spec, Half::Upper)?;
            factors.insert(ProductKind::VerticalSymmetric.name().to_string(), pre.to_string());
            factors.insert("det_upper".into(), e.to_string());
            v
        }
        CountKind::Full => {
            let glued = det_exact(&build_full_path_matrix(spec)).abs();
            let boxed = product_formula(ProductKind::Box, spec.n, spec.m)?;
            factors.insert("box".into(), boxed.to_string());
            factors.insert("det_full_paths".into(), glued.to_string());
            if spec.n % 2 != 0 {
                if glued != Rat::from_integer(boxed.clone()) {
                    return Err(MatrixError::Inconsistent {
                        spec: spec.canonical(),
                        detail: format!("glued path determinant {glued} vs box {boxed}"),
                    });
                }
                boxed
            } else {
                let (lo, e_lo, _) = half_count(spec, Half::Lower)?;
                let (up, e_up, _) = half_count(spec, Half::Upper)?;
                let product = &lo * &up;
                let theorem = Rat::from_integer(boxed.clone()) * &e_lo * &e_up;
                factors.insert("lower".into(), lo.to_string());
                factors.insert("upper_weighted".into(), up.to_string());
                factors.insert("det_lower".into(), e_lo.to_string());
                factors.insert("det_upper".into(), e_up.to_string());
                if theorem.abs() != Rat::from_integer(product.clone()) || glued != Rat::from_integer(product.clone()) {
                    return Err(MatrixError::Inconsistent {
                        spec: spec.canonical(),
                        detail: format!("lower*upper = {product}, box*detE*detE = {theorem}, glued = {glued}"),
                    });
                }
                product
            }
        }
    };
    Ok(CountResult { spec: spec.clone(), kind, value, factors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn spec(n: i64, m: i64, l: &[i64], r: &[i64]) -> RegionSpec {
        RegionSpec::validate(n, m, l, r).unwrap()
    }

    #[test]
    fn path_count_examples() {
        let p = LatticePoint::new;
        assert_eq!(path_count(p(0, 0), p(2, 1), PathVariant::Plain), int(3));
        assert_eq!(path_count(p(1, 0), p(2, 1), PathVariant::AvoidDiagonal), int(1));
        assert_eq!(path_count(p(6, 5), p(7, 6), PathVariant::WeightedBelow), int(3));
        assert_eq!(path_count(p(3, 0), p(2, 5), PathVariant::Plain), int(0));
    }

    #[test]
    fn q_examples() {
        let q = build_q(&RegionSpec::unholed(2, 1), Half::Lower);
        assert_eq!(q.order, 1);
        assert_eq!(q.get(0, 0), &rat(2));
        assert_eq!(det_exact(&q), rat(2));
        // hole-hole entries: Catalan-type for the lower half, central
        // binomial for the upper half
        let s = spec(10, 1, &[-2], &[2]);
        assert_eq!(build_q(&s, Half::Lower).get(1, 1), &rat(2));
        let s = spec(10, 1, &[0], &[2]);
        assert_eq!(build_q(&s, Half::Upper).get(1, 1), &rat(3));
    }

    #[test]
    fn det_examples() {
        assert_eq!(det_exact(&ExactMatrix::from_rows(vec![])), rat(1));
        assert_eq!(det_exact(&ExactMatrix::from_integers(&[vec![1, 2], vec![3, 4]])), rat(-2));
        assert_eq!(det_exact(&ExactMatrix::from_integers(&[vec![0, 1], vec![1, 0]])), rat(-1));
        assert_eq!(det_exact(&ExactMatrix::from_integers(&[vec![1, 2], vec![2, 4]])), rat(0));
        let m = ExactMatrix::from_rows(vec![vec![frac(1, 2), frac(1, 3)], vec![frac(1, 4), frac(1, 5)]]);
        assert_eq!(det_exact(&m), frac(1, 10) - frac(1, 12));
    }

    #[test]
    fn lu_diagonals() {
        let s = spec(6, 4, &[], &[]);
        for i in 1..=4 {
            assert_eq!(lu_entry(LuFactor::A, i, i, &s).unwrap(), rat(1));
            assert_eq!(lu_entry(LuFactor::APrime, i, i, &s).unwrap(), rat(1));
        }
        let s = spec(2, 1, &[], &[]);
        assert_eq!(lu_entry(LuFactor::C, 1, 1, &s).unwrap(), rat(2));
        assert!(lu_entry(LuFactor::B, 1, 1, &s).is_err());
    }

    #[test]
    fn mixed_identity_reproduces_q() {
        let s = spec(8, 3, &[-2, 4], &[0, 2]);
        let q = build_q(&s, Half::Lower);
        for i in 4..=5 {
            for j in 1..=3 {
                let mut sum = Rat::zero();
                for t in 1..=j {
                    sum += lu_entry(LuFactor::B, i, t, &s).unwrap() * lu_entry(LuFactor::C, t, j, &s).unwrap();
                }
                assert_eq!(&sum, q.get(i - 1, j - 1));
            }
        }
    }

    #[test]
    fn lu_verification() {
        assert!(verify_lu(&spec(4, 3, &[], &[]), Half::Lower).unwrap().passed());
        assert!(verify_lu(&spec(4, 3, &[], &[]), Half::Upper).unwrap().passed());
        let s = spec(8, 3, &[-4, 2], &[-2, 4]);
        assert!(verify_lu(&s, Half::Lower).unwrap().passed());
        assert!(verify_lu(&s, Half::Upper).unwrap().passed());
        let perturbed = verify_lu_with(&s, Half::Lower, |f, i, j| {
            let v = lu_entry(f, i, j, &s)?;
            Ok(if f == LuFactor::B && i == 5 && j == 2 { v + rat(1) } else { v })
        })
        .unwrap();
        assert_eq!(perturbed.first_failure, Some(("hole_boundary".to_string(), 5, 2)));
    }

    #[test]
    fn schur_complement_matches_determinant_ratio() {
        for half in [Half::Lower, Half::Upper] {
            let s = spec(10, 2, &[-2, 6], &[-8, 0]);
            let q = det_exact(&build_q(&s, half));
            let e = det_exact(&build_e(&s, half).unwrap());
            let pre = product_formula(half.prefactor_kind(), 10, 2).unwrap();
            assert_eq!(q, e * Rat::from_integer(pre));
        }
        let s = spec(10, 2, &[-2, 6], &[-8, 0]);
        assert_eq!(det_exact(&build_e(&s, Half::Lower).unwrap()), Rat::new(int(22703), int(18987878)));
        assert_eq!(det_exact(&build_e(&RegionSpec::unholed(4, 2), Half::Lower).unwrap()), rat(1));
    }

    #[test]
    fn closed_forms_example() {
        let s = spec(8, 2, &[-2], &[2]);
        let e_lo = build_e(&s, Half::Lower).unwrap();
        assert_eq!(&closed_form_entry(&s, Half::Lower, 0, 0, ClosedForm::Printed).unwrap(), e_lo.get(0, 0));
        let e_up = build_e(&s, Half::Upper).unwrap();
        assert_eq!(&closed_form_entry(&s, Half::Upper, 0, 0, ClosedForm::Corrected).unwrap(), e_up.get(0, 0));
        // reversed holes land in the negative branch
        let s = spec(8, 2, &[2], &[-2]);
        assert!(closed_form_entry(&s, Half::Lower, 0, 0, ClosedForm::Printed).unwrap() < rat(0));
    }

    #[test]
    fn counts() {
        assert_eq!(count_region(&RegionSpec::unholed(1, 1), CountKind::Full).unwrap().value, int(3));
        assert_eq!(count_region(&RegionSpec::unholed(2, 1), CountKind::Lower).unwrap().value, int(2));
        assert_eq!(count_region(&RegionSpec::unholed(2, 1), CountKind::UpperWeighted).unwrap().value, int(10));
        assert_eq!(count_region(&RegionSpec::unholed(2, 1), CountKind::Full).unwrap().value, int(20));
        let r = count_region(&spec(10, 2, &[-2, 6], &[-8, 0]), CountKind::Full).unwrap();
        let j = r.to_json();
        assert_eq!(j["kind"], "full");
        assert!(j["count"].is_string());
        assert!(count_region(&spec(4, 1, &[2], &[-2]), CountKind::FreeHalf).is_err());
    }
}
