//! Brute-force counts that share nothing with the determinant code: path
//! families by depth-first search and tilings by exhaustive matching.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::Int;
use crate::regions::{build_region, fold_pairs, Cell, LatticePoint, RegionError, RegionKind, RegionSpec, TriangularRegion};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget of {budget} nodes exceeded ({found} found so far)")]
    Budget { budget: u64, found: String },
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("{0}")]
    Precondition(String),
    #[error("weights disagree: running {running}, recomputed {recomputed}")]
    WeightMismatch { running: String, recomputed: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Constraint {
    None,
    AvoidDiagonal,
    WeightedBelow,
}

impl Constraint {
    fn allows(self, x: i64, y: i64) -> bool {
        match self {
            Constraint::None => true,
            Constraint::AvoidDiagonal => x > y,
            Constraint::WeightedBelow => x >= y,
        }
    }
}

/// One monotone path per start, in start order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathFamily {
    pub paths: Vec<Vec<LatticePoint>>,
    pub weight: Int,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCount {
    pub families: u64,
    pub weighted: Int,
    pub nodes: u64,
}

/// Occupied lattice points inside the bounding box of the path endpoints.
struct Grid {
    x0: i64,
    y0: i64,
    width: i64,
    cells: Vec<bool>,
}

impl Grid {
    fn covering<'a>(points: impl Iterator<Item = &'a LatticePoint> + Clone) -> Self {
        let (x0, x1) = points.clone().fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
        let (y0, y1) = points.fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
        let (width, height) = ((x1 - x0 + 1).max(0), (y1 - y0 + 1).max(0));
        Grid { x0, y0, width, cells: vec![false; (width * height) as usize] }
    }

    fn index(&self, x: i64, y: i64) -> usize {
        ((y - self.y0) * self.width + (x - self.x0)) as usize
    }

    fn get(&self, x: i64, y: i64) -> bool {
        self.cells[self.index(x, y)]
    }

    fn set(&mut self, x: i64, y: i64, v: bool) {
        let i = self.index(x, y);
        self.cells[i] = v;
    }
}

struct FamilySearch<'a> {
    starts: &'a [LatticePoint],
    ends: &'a [LatticePoint],
    constraint: Constraint,
    budget: u64,
    nodes: u64,
    occupied: Grid,
    used: Vec<bool>,
    paths: Vec<Vec<LatticePoint>>,
    touches: u32,
    families: u64,
    weighted: Int,
    recomputed: Int,
    keep: Option<Vec<PathFamily>>,
}

impl FamilySearch<'_> {
    fn bump(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::Budget { budget: self.budget, found: self.families.to_string() });
        }
        Ok(())
    }

    fn family(&mut self, k: usize) -> Result<(), OracleError> {
        if k == self.starts.len() {
            let running = Int::one() << self.touches as usize;
            // recomputed from the stored vertices, independently of the
            // running tally
            let touches: usize = self.paths.iter().flatten().filter(|p| p.x == p.y).count();
            let recomputed = if self.constraint == Constraint::WeightedBelow { Int::one() << touches } else { Int::one() };
            let running = if self.constraint == Constraint::WeightedBelow { running } else { Int::one() };
            self.families += 1;
            self.recomputed += &recomputed;
            if let Some(keep) = self.keep.as_mut() {
                keep.push(PathFamily { paths: self.paths.clone(), weight: running.clone() });
            }
            self.weighted += running;
            return Ok(());
        }
        let s = self.starts[k];
        for e in 0..self.ends.len() {
            let end = self.ends[e];
            if self.used[e] || end.x < s.x || end.y < s.y {
                continue;
            }
            if !self.free(s.x, s.y) || !self.free(end.x, end.y) {
                continue;
            }
            self.used[e] = true;
            self.paths.push(Vec::new());
            self.walk(k, s.x, s.y, end)?;
            self.paths.pop();
            self.used[e] = false;
        }
        Ok(())
    }

    fn free(&self, x: i64, y: i64) -> bool {
        self.constraint.allows(x, y) && !self.occupied.get(x, y)
    }

    fn walk(&mut self, k: usize, x: i64, y: i64, end: LatticePoint) -> Result<(), OracleError> {
        self.bump()?;
        self.occupied.set(x, y, true);
        self.paths[k].push(LatticePoint::new(x, y));
        let touch = u32::from(x == y);
        self.touches += touch;
        let result = if (x, y) == (end.x, end.y) {
            self.family(k + 1)
        } else {
            let mut r = Ok(());
            for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                if nx <= end.x && ny <= end.y && self.free(nx, ny) {
                    r = self.walk(k, nx, ny, end);
                    if r.is_err() {
                        break;
                    }
                }
            }
            r
        };
        self.touches -= touch;
        self.paths[k].pop();
        self.occupied.set(x, y, false);
        result
    }
}

fn run_families(
    starts: &[LatticePoint],
    ends: &[LatticePoint],
    constraint: Constraint,
    budget: u64,
    keep: bool,
) -> Result<(FamilyCount, Vec<PathFamily>), OracleError> {
    if starts.len() != ends.len() {
        return Err(OracleError::Precondition(format!("{} starts but {} ends", starts.len(), ends.len())));
    }
    let mut search = FamilySearch {
        starts,
        ends,
        constraint,
        budget,
        nodes: 0,
        occupied: Grid::covering(starts.iter().chain(ends)),
        used: vec![false; ends.len()],
        paths: Vec::new(),
        touches: 0,
        families: 0,
        weighted: Int::zero(),
        recomputed: Int::zero(),
        keep: keep.then(Vec::new),
    };
    search.family(0)?;
    if search.weighted != search.recomputed {
        return Err(OracleError::WeightMismatch { running: search.weighted.to_string(), recomputed: search.recomputed.to_string() });
    }
    let count = FamilyCount { families: search.families, weighted: search.weighted, nodes: search.nodes };
    Ok((count, search.keep.unwrap_or_default()))
}

/// Weighted number of vertex-disjoint path families, summed over every
/// assignment of starts to ends (for these planar pictures only one
/// assignment admits disjoint families).
pub fn count_families(
    starts: &[LatticePoint],
    ends: &[LatticePoint],
    constraint: Constraint,
    budget: u64,
) -> Result<FamilyCount, OracleError> {
    run_families(starts, ends, constraint, budget, false).map(|(c, _)| c)
}

pub fn enumerate_families(
    starts: &[LatticePoint],
    ends: &[LatticePoint],
    constraint: Constraint,
    budget: u64,
) -> Result<Vec<PathFamily>, OracleError> {
    run_families(starts, ends, constraint, budget, true).map(|(_, f)| f)
}

/// A perfect matching of the region's cells into rhombi, each stored with
/// the smaller cell first, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Tiling {
    pub rhombi: Vec<(Cell, Cell)>,
}

impl Tiling {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Cell, Cell)>) -> Self {
        let mut rhombi: Vec<_> = pairs.into_iter().map(|(a, b)| if a <= b { (a, b) } else { (b, a) }).collect();
        rhombi.sort();
        rhombi.dedup();
        Tiling { rhombi }
    }

    pub fn partners(&self) -> BTreeMap<Cell, Cell> {
        self.rhombi.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect()
    }

    /// Checks exact cover of `region` (free cells may stay uncovered) by
    /// pairs of edge-adjacent cells.
    pub fn is_valid_for(&self, region: &TriangularRegion) -> bool {
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.rhombi {
            if !a.neighbours().contains(&b) || !region.contains(&a) || !region.contains(&b) {
                return false;
            }
            if !seen.insert(a) || !seen.insert(b) {
                return false;
            }
        }
        region.cells.iter().all(|c| seen.contains(c) || region.free.contains(c))
    }

    /// 2 for every complete axis fold whose two cells are not paired
    /// together.
    pub fn fold_weight(&self, region: &TriangularRegion) -> Int {
        let partner = self.partners();
        let broken = fold_pairs(region).iter().filter(|(l, r)| partner.get(l) != Some(r)).count();
        Int::one() << broken
    }
}

fn scan_key(c: &Cell) -> (i32, i32, bool) {
    (if c.is_right() { c.col } else { c.col - 1 }, c.v, c.is_right())
}

/// Cells in sweep order: column strips left to right, bottom to top, so that
/// every neighbour lies within a bounded window ahead.
fn sweep_order(region: &TriangularRegion) -> Vec<Cell> {
    let mut order: Vec<Cell> = region.cells.iter().copied().collect();
    order.sort_by_key(scan_key);
    order
}

struct TileCounter {
    order: Vec<Cell>,
    forward: Vec<Vec<(usize, bool)>>,
    free: Vec<bool>,
    memo: HashMap<(usize, u128), Int>,
    budget: u64,
    nodes: u64,
}

impl TileCounter {
    fn new(region: &TriangularRegion, weighted: bool, budget: u64) -> Result<Self, OracleError> {
        let order = sweep_order(region);
        let index: HashMap<Cell, usize> = order.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let folds: HashMap<Cell, Cell> = if weighted { fold_pairs(region).into_iter().collect() } else { HashMap::new() };
        let mut forward = Vec::with_capacity(order.len());
        for (i, c) in order.iter().enumerate() {
            let mut next = Vec::new();
            for nb in c.neighbours() {
                if let Some(&j) = index.get(&nb) {
                    if j > i {
                        if j - i >= 128 {
                            return Err(OracleError::Precondition("region too tall for the sweep window".into()));
                        }
                        // the factor 2 of a broken fold is charged to the
                        // tile that takes its left cell
                        let doubled = match (folds.get(c), folds.get(&nb)) {
                            (Some(r), _) => *r != nb,
                            (_, Some(r)) => *r != *c,
                            _ => false,
                        };
                        next.push((j - i, doubled));
                    }
                }
            }
            forward.push(next);
        }
        let free = order.iter().map(|c| region.free.contains(c)).collect();
        Ok(TileCounter { order, forward, free, memo: HashMap::new(), budget, nodes: 0 })
    }

    fn count(&mut self, mut i: usize, mut mask: u128) -> Result<Int, OracleError> {
        while i < self.order.len() && mask & 1 == 1 {
            i += 1;
            mask >>= 1;
        }
        if i == self.order.len() {
            return Ok(Int::one());
        }
        if let Some(v) = self.memo.get(&(i, mask)) {
            return Ok(v.clone());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::Budget { budget: self.budget, found: "partial".into() });
        }
        let mut total = Int::zero();
        if self.free[i] {
            total += self.count(i + 1, mask >> 1)?;
        }
        for k in 0..self.forward[i].len() {
            let (d, doubled) = self.forward[i][k];
            if mask >> d & 1 == 1 {
                continue;
            }
            let sub = self.count(i + 1, (mask | 1u128 << d) >> 1)?;
            total += if doubled { sub << 1 } else { sub };
        }
        self.memo.insert((i, mask), total.clone());
        Ok(total)
    }
}

/// Number of tilings of `region` (free cells may stay uncovered).
pub fn count_tilings(region: &TriangularRegion, budget: u64) -> Result<Int, OracleError> {
    TileCounter::new(region, false, budget)?.count(0, 0)
}

/// Tilings weighted by `Tiling::fold_weight`.
pub fn count_weighted_tilings(region: &TriangularRegion, budget: u64) -> Result<Int, OracleError> {
    TileCounter::new(region, true, budget)?.count(0, 0)
}

/// Every tiling, in the deterministic order of the backtracking search.
pub fn enumerate_tilings(region: &TriangularRegion, budget: u64) -> Result<Vec<Tiling>, OracleError> {
    let order = sweep_order(region);
    let mut out = Vec::new();
    let mut cover: BTreeMap<Cell, Cell> = BTreeMap::new();
    let mut nodes = 0u64;
    fn go(
        i: usize,
        order: &[Cell],
        region: &TriangularRegion,
        cover: &mut BTreeMap<Cell, Cell>,
        out: &mut Vec<Tiling>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<(), OracleError> {
        *nodes += 1;
        if *nodes > budget {
            return Err(OracleError::Budget { budget, found: out.len().to_string() });
        }
        let mut i = i;
        while i < order.len() && cover.contains_key(&order[i]) {
            i += 1;
        }
        if i == order.len() {
            out.push(Tiling::from_pairs(cover.iter().map(|(a, b)| (*a, *b))));
            return Ok(());
        }
        let c = order[i];
        if region.free.contains(&c) {
            go(i + 1, order, region, cover, out, nodes, budget)?;
        }
        for nb in c.neighbours() {
            if region.contains(&nb) && !cover.contains_key(&nb) && scan_key(&nb) > scan_key(&c) {
                cover.insert(c, nb);
                cover.insert(nb, c);
                go(i + 1, order, region, cover, out, nodes, budget)?;
                cover.remove(&c);
                cover.remove(&nb);
            }
        }
        Ok(())
    }
    go(0, &order, region, &mut cover, &mut out, &mut nodes, budget)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// Tilings of the full region invariant under the reflection in `axis`,
/// counted by placing each rhombus together with its mirror image.
pub fn count_symmetric(spec: &RegionSpec, axis: Axis, budget: u64) -> Result<Int, OracleError> {
    if axis == Axis::Vertical && !spec.is_mirrored() {
        return Err(OracleError::Precondition("vertical symmetry needs R = -L".into()));
    }
    let region = build_region(spec, RegionKind::Full)?;
    let mirror = |c: &Cell| match axis {
        Axis::Horizontal => c.mirror_horizontal(),
        Axis::Vertical => c.mirror_vertical(),
    };
    let order = sweep_order(&region);
    let mut covered: HashSet<Cell> = HashSet::new();
    let mut nodes = 0u64;
    let mut found = Int::zero();
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        order: &[Cell],
        region: &TriangularRegion,
        mirror: &dyn Fn(&Cell) -> Cell,
        covered: &mut HashSet<Cell>,
        found: &mut Int,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<(), OracleError> {
        *nodes += 1;
        if *nodes > budget {
            return Err(OracleError::Budget { budget, found: found.to_string() });
        }
        let mut i = i;
        while i < order.len() && covered.contains(&order[i]) {
            i += 1;
        }
        if i == order.len() {
            *found += 1;
            return Ok(());
        }
        let c = order[i];
        for nb in c.neighbours() {
            if !region.contains(&nb) || covered.contains(&nb) {
                continue;
            }
            let (mc, mnb) = (mirror(&c), mirror(&nb));
            let fixed = (mc == c && mnb == nb) || (mc == nb && mnb == c);
            let mut placed = vec![c, nb];
            if !fixed {
                if [mc, mnb].iter().any(|x| covered.contains(x) || placed.contains(x)) {
                    continue;
                }
                placed.extend([mc, mnb]);
            }
            placed.iter().for_each(|x| {
                covered.insert(*x);
            });
            let r = go(i + 1, order, region, mirror, covered, found, nodes, budget);
            placed.iter().for_each(|x| {
                covered.remove(x);
            });
            r?;
        }
        Ok(())
    }
    go(0, &order, &region, &mirror, &mut covered, &mut found, &mut nodes, budget)?;
    Ok(found)
}

/// Tilings of the half hexagon with a free vertical boundary and left holes
/// `left`, counted as vertically symmetric tilings of the mirrored region.
pub fn count_free_boundary(n: i64, m: i64, left: &[i64], budget: u64) -> Result<Int, OracleError> {
    let right: Vec<i64> = left.iter().map(|l| -l).collect();
    let spec = RegionSpec::validate(n, m, left, &right)
        .map_err(|e| OracleError::Precondition(format!("invalid free-boundary spec: {e:?}")))?;
    count_symmetric(&spec, Axis::Vertical, budget)
}

/// Direct count on the materialised half region, where rhombi may protrude
/// across the boundary.
pub fn count_free_half_direct(n: i64, m: i64, left: &[i64], budget: u64) -> Result<Int, OracleError> {
    let right: Vec<i64> = left.iter().map(|l| -l).collect();
    let spec = RegionSpec::validate(n, m, left, &right)
        .map_err(|e| OracleError::Precondition(format!("invalid free-boundary spec: {e:?}")))?;
    count_tilings(&build_region(&spec, RegionKind::FreeHalf)?, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::regions::{lgv_points, PathPicture};

    fn full(n: i64, m: i64) -> TriangularRegion {
        build_region(&RegionSpec::unholed(n, m), RegionKind::Full).unwrap()
    }

    #[test]
    fn family_examples() {
        let s = RegionSpec::unholed(1, 1);
        let (a, e) = lgv_points(&s, PathPicture::Full);
        assert_eq!(count_families(&a, &e, Constraint::None, DEFAULT_BUDGET).unwrap().weighted, int(3));
        let s = RegionSpec::unholed(2, 1);
        let (a, e) = lgv_points(&s, PathPicture::Lower);
        assert_eq!(count_families(&a, &e, Constraint::AvoidDiagonal, DEFAULT_BUDGET).unwrap().weighted, int(2));
        let (a, e) = lgv_points(&s, PathPicture::Upper);
        let c = count_families(&a, &e, Constraint::WeightedBelow, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.weighted, int(10));
        let fams = enumerate_families(&a, &e, Constraint::WeightedBelow, DEFAULT_BUDGET).unwrap();
        assert_eq!(fams.iter().map(|f| f.weight.clone()).sum::<Int>(), int(10));
        assert_eq!(fams.len() as u64, c.families);
    }

    #[test]
    fn budget_is_enforced() {
        let s = RegionSpec::unholed(4, 2);
        let (a, e) = lgv_points(&s, PathPicture::Full);
        assert!(matches!(count_families(&a, &e, Constraint::None, 10), Err(OracleError::Budget { .. })));
        assert!(matches!(count_tilings(&full(4, 2), 3), Err(OracleError::Budget { .. })));
    }

    #[test]
    fn tiling_examples() {
        assert_eq!(count_tilings(&full(1, 1), DEFAULT_BUDGET).unwrap(), int(3));
        assert_eq!(count_tilings(&full(2, 1), DEFAULT_BUDGET).unwrap(), int(20));
        let all = enumerate_tilings(&full(2, 1), DEFAULT_BUDGET).unwrap();
        assert_eq!(all.len(), 20);
        let region = full(2, 1);
        assert!(all.iter().all(|t| t.is_valid_for(&region)));
        let distinct: BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 20);
    }

    #[test]
    fn symmetric_examples() {
        let s = RegionSpec::unholed(2, 1);
        assert_eq!(count_symmetric(&s, Axis::Horizontal, DEFAULT_BUDGET).unwrap(), int(2));
        assert_eq!(count_symmetric(&s, Axis::Vertical, DEFAULT_BUDGET).unwrap(), int(10));
        assert_eq!(count_free_boundary(2, 1, &[], DEFAULT_BUDGET).unwrap(), int(10));
        assert_eq!(count_free_half_direct(2, 1, &[], DEFAULT_BUDGET).unwrap(), int(10));
    }

    #[test]
    fn weighted_upper_half() {
        let s = RegionSpec::unholed(2, 1);
        let up = build_region(&s, RegionKind::Upper).unwrap();
        assert_eq!(count_weighted_tilings(&up, DEFAULT_BUDGET).unwrap(), int(10));
        let by_hand: Int = enumerate_tilings(&up, DEFAULT_BUDGET).unwrap().iter().map(|t| t.fold_weight(&up)).sum();
        assert_eq!(by_hand, int(10));
    }
}
