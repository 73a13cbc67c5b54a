//! Region specifications, hole geometry, lattice-path endpoints and explicit
//! triangular-lattice cell sets.
//!
//! Cells live on a lattice with vertical edges. A vertex is `(col, v)` where
//! `col` indexes vertical lattice lines and `v` is twice the height, with
//! `col + n - v` even. The horizontal symmetry axis is `v = 0`; the fold
//! cells `(c, -1)` straddle it.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("n must be positive, got {0}")]
    NonPositiveN(i64),
    #[error("m must be positive, got {0}")]
    NonPositiveM(i64),
    #[error("n must be even when holes are present, got {0}")]
    OddNWithHoles(i64),
    #[error("hole position {0} is odd")]
    Parity(i64),
    #[error("hole position {pos} outside [{lo}, {hi}]")]
    Bound { pos: i64, lo: i64, hi: i64 },
    #[error("duplicate hole position {0}")]
    Duplicate(i64),
    #[error("|L| = {left} differs from |R| = {right}")]
    Unbalanced { left: usize, right: usize },
    #[error("cannot parse spec: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("{0:?} region needs even n")]
    OddN(RegionKind),
    #[error("free-boundary region needs R = -L with every l < 0")]
    NotMirrored,
    #[error("hole cell {0:?} lies outside the hexagon")]
    HoleOutside(Cell),
}

/// A validated holey hexagon with sides n, 2m, n, n, 2m, n and unit-side
/// triangular holes centred on the horizontal axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RegionSpec {
    pub n: i64,
    pub m: i64,
    /// left-pointing hole positions, increasing
    pub left: Vec<i64>,
    /// right-pointing hole positions, increasing
    pub right: Vec<i64>,
}

impl RegionSpec {
    /// Checks every invariant and returns all violations at once. Odd `n`
    /// is accepted only without holes (plain hexagons such as 1,2,1).
    pub fn validate(n: i64, m: i64, left: &[i64], right: &[i64]) -> Result<Self, Vec<SpecError>> {
        let mut errors = Vec::new();
        if n <= 0 {
            errors.push(SpecError::NonPositiveN(n));
        }
        if m <= 0 {
            errors.push(SpecError::NonPositiveM(m));
        }
        let holes = !left.is_empty() || !right.is_empty();
        if holes && n % 2 != 0 {
            errors.push(SpecError::OddNWithHoles(n));
        }
        if left.len() != right.len() {
            errors.push(SpecError::Unbalanced { left: left.len(), right: right.len() });
        }
        let mut seen = BTreeSet::new();
        for &x in left.iter().chain(right) {
            if x % 2 != 0 {
                errors.push(SpecError::Parity(x));
            }
            if x < -n + 2 || x > n - 2 {
                errors.push(SpecError::Bound { pos: x, lo: -n + 2, hi: n - 2 });
            }
            if !seen.insert(x) {
                errors.push(SpecError::Duplicate(x));
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        let mut left = left.to_vec();
        let mut right = right.to_vec();
        left.sort_unstable();
        right.sort_unstable();
        Ok(RegionSpec { n, m, left, right })
    }

    pub fn unholed(n: i64, m: i64) -> Self {
        Self::validate(n, m, &[], &[]).expect("unholed hexagon needs n, m >= 1")
    }

    pub fn p(&self) -> usize {
        self.left.len()
    }

    pub fn without_holes(&self) -> Self {
        RegionSpec { n: self.n, m: self.m, left: vec![], right: vec![] }
    }

    /// True when the hole set is symmetric under the vertical mirror.
    pub fn is_mirrored(&self) -> bool {
        let mut neg: Vec<i64> = self.left.iter().map(|l| -l).collect();
        neg.sort_unstable();
        neg == self.right
    }

    /// Mirror-symmetric with every left hole on the negative side; the
    /// setting in which the free-boundary half matches the upper region.
    pub fn is_free_boundary_compatible(&self) -> bool {
        self.n % 2 == 0 && self.is_mirrored() && self.left.iter().all(|&l| l < 0)
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }

    /// Parses `n=<n> m=<m> L=<..> R=<..>`.
    pub fn parse(s: &str) -> Result<Self, Vec<SpecError>> {
        let mut n = None;
        let mut m = None;
        let mut left = None;
        let mut right = None;
        let bad = |msg: &str| vec![SpecError::Parse(msg.to_string())];
        for tok in s.split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or_else(|| bad(tok))?;
            match key {
                "n" => n = Some(val.parse::<i64>().map_err(|_| bad(tok))?),
                "m" => m = Some(val.parse::<i64>().map_err(|_| bad(tok))?),
                "L" => left = Some(parse_positions(val).ok_or_else(|| bad(tok))?),
                "R" => right = Some(parse_positions(val).ok_or_else(|| bad(tok))?),
                _ => return Err(bad(tok)),
            }
        }
        let n = n.ok_or_else(|| bad("missing n"))?;
        let m = m.ok_or_else(|| bad("missing m"))?;
        Self::validate(n, m, &left.unwrap_or_default(), &right.unwrap_or_default())
    }
}

/// Comma-separated signed integers; the empty string is the empty list.
pub fn parse_positions(s: &str) -> Option<Vec<i64>> {
    let s = s.trim();
    if s.is_empty() {
        return Some(vec![]);
    }
    s.split(',').map(|t| t.trim().parse().ok()).collect()
}

fn combinations(pool: &[i64], k: usize) -> Vec<Vec<i64>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in pool.iter().enumerate() {
        for mut rest in combinations(&pool[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Every valid spec with exactly p holes of each orientation, in a fixed
/// order.
pub fn enumerate_specs(n: i64, m: i64, p: usize) -> Vec<RegionSpec> {
    if p > 0 && n % 2 != 0 {
        return vec![];
    }
    let pool: Vec<i64> = (-n + 2..=n - 2).step_by(2).collect();
    let mut out = Vec::new();
    for left in combinations(&pool, p) {
        let rest: Vec<i64> = pool.iter().copied().filter(|x| !left.contains(x)).collect();
        for right in combinations(&rest, p) {
            if let Ok(s) = RegionSpec::validate(n, m, &left, &right) {
                out.push(s);
            }
        }
    }
    out
}

fn join(xs: &[i64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={} L={} R={}", self.n, self.m, join(&self.left), join(&self.right))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Orientation {
    Left,
    Right,
}

/// A merged run of same-orientation holes spaced exactly 2 apart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InducedHole {
    /// midpoint of the constituent positions
    pub center: f64,
    pub side: i64,
    pub orientation: Orientation,
    pub constituents: Vec<i64>,
}

impl InducedHole {
    pub fn charge(&self) -> i64 {
        charge(self)
    }
}

pub fn charge(h: &InducedHole) -> i64 {
    match h.orientation {
        Orientation::Right => h.side,
        Orientation::Left => -h.side,
    }
}

fn runs(positions: &[i64], orientation: Orientation) -> Vec<InducedHole> {
    let mut out: Vec<InducedHole> = Vec::new();
    for &x in positions {
        match out.last_mut() {
            Some(h) if x - h.constituents.last().unwrap() == 2 => h.constituents.push(x),
            _ => out.push(InducedHole { center: 0.0, side: 0, orientation, constituents: vec![x] }),
        }
    }
    for h in &mut out {
        let k = h.constituents.len() as i64;
        h.side = 2 * k;
        h.center = (h.constituents[0] + h.constituents[h.constituents.len() - 1]) as f64 / 2.0;
    }
    out
}

/// Induced holes ordered by centre.
pub fn induced_holes(spec: &RegionSpec) -> Vec<InducedHole> {
    let mut holes = runs(&spec.right, Orientation::Right);
    holes.extend(runs(&spec.left, Orientation::Left));
    holes.sort_by(|a, b| a.center.partial_cmp(&b.center).unwrap());
    holes
}

/// Euclidean distance between the midpoints of holes at positions x and y.
pub fn distance(x: f64, y: f64) -> f64 {
    3f64.sqrt() / 2.0 * (x - y).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub fn new(x: i64, y: i64) -> Self {
        LatticePoint { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PathPicture {
    Lower,
    Upper,
    Full,
}

/// Start and end points of the non-intersecting path families: boundary
/// points first, then hole points by increasing position.
pub fn lgv_points(spec: &RegionSpec, picture: PathPicture) -> (Vec<LatticePoint>, Vec<LatticePoint>) {
    let (n, m) = (spec.n, spec.m);
    let p = LatticePoint::new;
    match picture {
        PathPicture::Lower | PathPicture::Upper => {
            let mut starts: Vec<_> = (1..=m).map(|i| p(i, 1 - i)).collect();
            starts.extend(spec.left.iter().map(|&l| p(n / 2 + l / 2 + 1, n / 2 + l / 2)));
            let mut ends: Vec<_> = (1..=m).map(|j| p(n + j, n + 1 - j)).collect();
            ends.extend(spec.right.iter().map(|&r| p(n / 2 + r / 2 + 1, n / 2 + r / 2)));
            (starts, ends)
        }
        PathPicture::Full => {
            // each hole splits two paths, so it carries a point on each side
            // of the diagonal
            let mut starts: Vec<_> = (1 - m..=m).map(|i| p(i, 1 - i)).collect();
            for &l in &spec.left {
                let k = n / 2 + l / 2;
                starts.push(p(k + 1, k));
                starts.push(p(k, k + 1));
            }
            let mut ends: Vec<_> = (1 - m..=m).map(|j| p(n + j, n + 1 - j)).collect();
            for &r in &spec.right {
                let k = n / 2 + r / 2;
                ends.push(p(k + 1, k));
                ends.push(p(k, k + 1));
            }
            (starts, ends)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub col: i32,
    pub v: i32,
    pub orientation: Orientation,
}

impl Cell {
    pub fn right(col: i32, v: i32) -> Self {
        Cell { col, v, orientation: Orientation::Right }
    }

    pub fn left(col: i32, v: i32) -> Self {
        Cell { col, v, orientation: Orientation::Left }
    }

    pub fn is_right(&self) -> bool {
        self.orientation == Orientation::Right
    }

    /// Vertices as (col, v).
    pub fn vertices(&self) -> [(i32, i32); 3] {
        let apex = if self.is_right() { self.col + 1 } else { self.col - 1 };
        [(self.col, self.v), (self.col, self.v + 2), (apex, self.v + 1)]
    }

    /// Edge-adjacent cells: across the vertical edge, the upper slanted edge
    /// and the lower slanted edge, in that order.
    pub fn neighbours(&self) -> [Cell; 3] {
        let (c, v) = (self.col, self.v);
        if self.is_right() {
            [Cell::left(c, v), Cell::left(c + 1, v + 1), Cell::left(c + 1, v - 1)]
        } else {
            [Cell::right(c, v), Cell::right(c - 1, v + 1), Cell::right(c - 1, v - 1)]
        }
    }

    /// Reflection in the vertical axis `col = 0`.
    pub fn mirror_vertical(&self) -> Cell {
        match self.orientation {
            Orientation::Right => Cell::left(-self.col, self.v),
            Orientation::Left => Cell::right(-self.col, self.v),
        }
    }

    /// Reflection in the horizontal axis through the fold cells.
    pub fn mirror_horizontal(&self) -> Cell {
        Cell { col: self.col, v: -self.v - 2, orientation: self.orientation }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionKind {
    Full,
    Lower,
    Upper,
    FreeHalf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularRegion {
    pub kind: RegionKind,
    pub cells: BTreeSet<Cell>,
    /// cells allowed to remain uncovered (half rhombi protruding across a
    /// free boundary)
    pub free: BTreeSet<Cell>,
}

impl TriangularRegion {
    pub fn count(&self, orientation: Orientation) -> usize {
        self.cells.iter().filter(|c| c.orientation == orientation).count()
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.cells.contains(c)
    }
}

/// Cells of the unholed hexagon with sides n, 2m, n, n, 2m, n.
pub fn hexagon_cells(n: i64, m: i64) -> BTreeSet<Cell> {
    let (n, m) = (n as i32, m as i32);
    let inside = |c: i32, v: i32| c.abs() <= n && v.abs() <= 2 * m + n - c.abs();
    let mut cells = BTreeSet::new();
    for c in -n..=n {
        for v in (-2 * m - n - 2)..=(2 * m + n + 2) {
            if (c + n - v).rem_euclid(2) != 0 || !inside(c, v) || !inside(c, v + 2) {
                continue;
            }
            if inside(c + 1, v + 1) {
                cells.insert(Cell::right(c, v));
            }
            if inside(c - 1, v + 1) {
                cells.insert(Cell::left(c, v));
            }
        }
    }
    cells
}

/// The four cells removed by a right hole at r.
pub fn right_hole_cells(r: i64) -> [Cell; 4] {
    let r = r as i32;
    [Cell::right(r, -2), Cell::right(r, 0), Cell::right(r + 1, -1), Cell::left(r + 1, -1)]
}

/// The four cells removed by a left hole at l.
pub fn left_hole_cells(l: i64) -> [Cell; 4] {
    let l = l as i32;
    [Cell::left(l, -2), Cell::left(l, 0), Cell::left(l - 1, -1), Cell::right(l - 1, -1)]
}

pub fn hole_cells(spec: &RegionSpec) -> BTreeSet<Cell> {
    let mut out = BTreeSet::new();
    for &r in &spec.right {
        out.extend(right_hole_cells(r));
    }
    for &l in &spec.left {
        out.extend(left_hole_cells(l));
    }
    out
}

pub fn build_region(spec: &RegionSpec, kind: RegionKind) -> Result<TriangularRegion, RegionError> {
    if kind != RegionKind::Full && spec.n % 2 != 0 {
        return Err(RegionError::OddN(kind));
    }
    if kind == RegionKind::FreeHalf && !spec.is_free_boundary_compatible() {
        return Err(RegionError::NotMirrored);
    }
    let mut cells = hexagon_cells(spec.n, spec.m);
    for h in hole_cells(spec) {
        if !cells.remove(&h) {
            // overlapping footprints share their fold cells
            if !hexagon_cells(spec.n, spec.m).contains(&h) {
                return Err(RegionError::HoleOutside(h));
            }
        }
    }
    let mut free = BTreeSet::new();
    match kind {
        RegionKind::Full => {}
        RegionKind::Lower => cells.retain(|c| c.v <= -2),
        RegionKind::Upper => cells.retain(|c| c.v >= -1),
        RegionKind::FreeHalf => {
            cells.retain(|c| if c.is_right() { c.col <= -1 } else { c.col <= 0 });
            free = cells.iter().filter(|c| !c.is_right() && c.col == 0).copied().collect();
        }
    }
    Ok(TriangularRegion { kind, cells, free })
}

/// Cells on the horizontal axis whose pairing carries the weight 2 in the
/// upper region: complete folds `L(c,-1), R(c,-1)`.
pub fn fold_pairs(region: &TriangularRegion) -> Vec<(Cell, Cell)> {
    region
        .cells
        .iter()
        .filter(|c| c.v == -1 && !c.is_right())
        .filter_map(|c| {
            let r = Cell::right(c.col, -1);
            region.contains(&r).then_some((*c, r))
        })
        .collect()
}
