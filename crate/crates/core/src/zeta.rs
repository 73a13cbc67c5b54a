//! The propagation-path map from tilings of a holey half region to tilings
//! of the unholed one, and exhaustive checks of its injectivity.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::oracle::{enumerate_tilings, OracleError, Tiling};
use crate::regions::{build_region, Cell, Orientation, RegionKind, RegionSpec, TriangularRegion};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error("propagation path from {from:?} ended at {ended:?} instead of {expected:?}")]
    WrongEnd { from: Cell, ended: Option<Cell>, expected: Cell },
    #[error("boundary paths share {0} rhombi instead of exactly one")]
    Intersection(usize),
    #[error("boundary path from {0:?} ran into another hole")]
    HitHole(Cell),
    #[error("ribbons of two pairs overlap")]
    RibbonsOverlap,
    #[error("holes at {0} and {1} overlap; the upper map is undefined")]
    OverlappingHoles(i64, i64),
    #[error("image is not a tiling of the unholed region")]
    InvalidImage,
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HoleRef {
    pub position: i64,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HolePairing {
    pub pairs: Vec<(HoleRef, HoleRef)>,
}

/// Repeatedly removes the first adjacent pair of differing orientation from
/// the sorted positions.
pub fn pair_holes(left: &[i64], right: &[i64]) -> HolePairing {
    let mut items: Vec<HoleRef> = left
        .iter()
        .map(|&x| HoleRef { position: x, orientation: Orientation::Left })
        .chain(right.iter().map(|&x| HoleRef { position: x, orientation: Orientation::Right }))
        .collect();
    items.sort();
    let mut pairs = Vec::new();
    while let Some(i) = (0..items.len().saturating_sub(1)).find(|&i| items[i].orientation != items[i + 1].orientation) {
        pairs.push((items[i], items[i + 1]));
        items.drain(i..=i + 1);
    }
    HolePairing { pairs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slant {
    Vertical,
    Rising,
    Falling,
}

/// Neighbour across the edge of `c` with the given direction.
fn across(c: &Cell, slant: Slant) -> Cell {
    let [vertical, upper, lower] = c.neighbours();
    match (slant, c.is_right()) {
        (Slant::Vertical, _) => vertical,
        (Slant::Rising, true) | (Slant::Falling, false) => lower,
        (Slant::Falling, true) | (Slant::Rising, false) => upper,
    }
}

/// A chain h1, a1, b1, ..., h2: consecutive cells after h1 form the rhombi
/// crossed by the path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ribbon {
    pub chain: Vec<Cell>,
}

impl Ribbon {
    pub fn rhombi(&self) -> Vec<(Cell, Cell)> {
        self.chain[1..self.chain.len() - 1].chunks(2).map(|w| (w[0], w[1])).collect()
    }
}

struct Board {
    cells: BTreeSet<Cell>,
    partner: BTreeMap<Cell, Cell>,
}

impl Board {
    /// Crosses rhombi through opposite sides, starting from the `slant` edge
    /// of `start`. Returns the rhombi and the uncovered cell reached, if any.
    fn walk(&self, start: Cell, slant: Slant) -> (Vec<(Cell, Cell)>, Option<Cell>) {
        let mut out = Vec::new();
        let mut cur = start;
        loop {
            let nb = across(&cur, slant);
            if !self.cells.contains(&nb) {
                return (out, None);
            }
            let Some(&b) = self.partner.get(&nb) else {
                return (out, Some(nb));
            };
            out.push((nb, b));
            cur = b;
        }
    }

    fn ribbon(&self, h1: Cell, h2: Cell) -> Result<Ribbon, ZetaError> {
        let mut chain = vec![h1];
        if !h1.is_right() {
            let (rh, end) = self.walk(h1, Slant::Vertical);
            if end != Some(h2) {
                return Err(ZetaError::WrongEnd { from: h1, ended: end, expected: h2 });
            }
            chain.extend(rh.iter().flat_map(|&(a, b)| [a, b]));
        } else {
            let (p1, e1) = self.walk(h1, Slant::Rising);
            let (p2, e2) = self.walk(h2, Slant::Falling);
            if let Some(hole) = e1.or(e2) {
                return Err(ZetaError::HitHole(hole));
            }
            let key = |&(a, b): &(Cell, Cell)| if a < b { (a, b) } else { (b, a) };
            let s2: Vec<_> = p2.iter().map(key).collect();
            let common: Vec<usize> = p1.iter().enumerate().filter(|(_, r)| s2.contains(&key(r))).map(|(i, _)| i).collect();
            if common.len() != 1 {
                return Err(ZetaError::Intersection(common.len()));
            }
            let k = common[0];
            let j = s2.iter().position(|r| *r == key(&p1[k])).unwrap();
            let (ak, cj) = (p1[k].0, p2[j].0);
            if ak == cj {
                return Err(ZetaError::Intersection(0));
            }
            chain.extend(p1[..k].iter().flat_map(|&(a, b)| [a, b]));
            chain.extend([ak, cj]);
            chain.extend(p2[..j].iter().rev().flat_map(|&(c, d)| [d, c]));
        }
        chain.push(h2);
        Ok(Ribbon { chain })
    }

    /// Re-pairs the chain as h1-a1, b1-a2, ...: the holes become covered.
    fn transmit(&mut self, ribbon: &Ribbon) {
        for w in ribbon.chain.chunks(2) {
            self.partner.insert(w[0], w[1]);
            self.partner.insert(w[1], w[0]);
        }
    }

    fn run(&mut self, holes: &[(Cell, Cell)]) -> Result<Vec<Ribbon>, ZetaError> {
        let mut ribbons: Vec<Ribbon> = Vec::new();
        for &(h1, h2) in holes {
            self.cells.insert(h1);
            self.cells.insert(h2);
            let rb = self.ribbon(h1, h2)?;
            let used: BTreeSet<&Cell> = rb.chain.iter().collect();
            if ribbons.iter().any(|o| o.chain.iter().any(|c| used.contains(c))) {
                return Err(ZetaError::RibbonsOverlap);
            }
            self.transmit(&rb);
            ribbons.push(rb);
        }
        Ok(ribbons)
    }
}

fn unit_lower(h: HoleRef) -> Cell {
    let x = h.position as i32;
    match h.orientation {
        Orientation::Right => Cell::right(x, -2),
        Orientation::Left => Cell::left(x, -2),
    }
}

/// Upper-half cells of a hole that are not its unit hole: these are
/// covered by one forced rhombus.
fn upper_parts(h: HoleRef) -> (Cell, (Cell, Cell)) {
    let x = h.position as i32;
    match h.orientation {
        Orientation::Right => (Cell::right(x + 1, -1), (Cell::left(x + 1, -1), Cell::right(x, 0))),
        Orientation::Left => (Cell::left(x - 1, -1), (Cell::right(x - 1, -1), Cell::left(x, 0))),
    }
}

/// The map prepared for one spec and one half.
#[derive(Debug, Clone)]
pub struct ZetaMap {
    half: RegionKind,
    /// source region and the unholed target region
    pub source: TriangularRegion,
    pub target: TriangularRegion,
    /// cells the ribbons run through, in the lower-half frame
    board_cells: BTreeSet<Cell>,
    forced: Vec<(Cell, Cell)>,
    holes: Vec<(Cell, Cell)>,
}

impl ZetaMap {
    pub fn lower(spec: &RegionSpec) -> Result<Self, ZetaError> {
        let source = build_region(spec, RegionKind::Lower).map_err(OracleError::from)?;
        let target = build_region(&spec.without_holes(), RegionKind::Lower).map_err(OracleError::from)?;
        let holes = pair_holes(&spec.left, &spec.right).pairs.iter().map(|&(a, b)| (unit_lower(a), unit_lower(b))).collect();
        Ok(ZetaMap { half: RegionKind::Lower, board_cells: source.cells.clone(), source, target, forced: Vec::new(), holes })
    }

    /// Upper variant: reflect onto the lower half, reduce each hole to a
    /// unit hole plus a forced rhombus, run the lower construction and
    /// reflect back.
    pub fn upper(spec: &RegionSpec) -> Result<Self, ZetaError> {
        let source = build_region(spec, RegionKind::Upper).map_err(OracleError::from)?;
        let target = build_region(&spec.without_holes(), RegionKind::Upper).map_err(OracleError::from)?;
        let pairing = pair_holes(&spec.left, &spec.right);
        let mut claimed: BTreeMap<Cell, i64> = BTreeMap::new();
        for h in pairing.pairs.iter().flat_map(|&(a, b)| [a, b]) {
            let (unit, (f1, f2)) = upper_parts(h);
            for c in [unit, f1, f2] {
                if let Some(other) = claimed.insert(c, h.position) {
                    return Err(ZetaError::OverlappingHoles(other, h.position));
                }
            }
        }
        let refl = |c: &Cell| c.mirror_horizontal();
        let mut forced = Vec::new();
        let mut units = BTreeSet::new();
        let mut holes = Vec::new();
        for &(a, b) in &pairing.pairs {
            for h in [a, b] {
                let (unit, (f1, f2)) = upper_parts(h);
                forced.push((refl(&f1), refl(&f2)));
                units.insert(refl(&unit));
            }
            holes.push((refl(&upper_parts(a).0), refl(&upper_parts(b).0)));
        }
        let board_cells = target.cells.iter().map(refl).filter(|c| !units.contains(c)).collect();
        Ok(ZetaMap { half: RegionKind::Upper, source, target, board_cells, forced, holes })
    }

    fn frame(&self, c: &Cell) -> Cell {
        if self.half == RegionKind::Upper {
            c.mirror_horizontal()
        } else {
            *c
        }
    }

    pub fn apply_with_ribbons(&self, tiling: &Tiling) -> Result<(Tiling, Vec<Ribbon>), ZetaError> {
        let mut partner: BTreeMap<Cell, Cell> = tiling.partners().iter().map(|(a, b)| (self.frame(a), self.frame(b))).collect();
        for &(a, b) in &self.forced {
            partner.insert(a, b);
            partner.insert(b, a);
        }
        let mut board = Board { cells: self.board_cells.clone(), partner };
        let ribbons = board.run(&self.holes)?;
        let image = Tiling::from_pairs(board.partner.iter().map(|(a, b)| (self.frame(a), self.frame(b))));
        if !image.is_valid_for(&self.target) {
            return Err(ZetaError::InvalidImage);
        }
        Ok((image, ribbons))
    }

    pub fn apply(&self, tiling: &Tiling) -> Result<Tiling, ZetaError> {
        self.apply_with_ribbons(tiling).map(|(t, _)| t)
    }
}

/// Image of a tiling of the holey lower region.
pub fn zeta(tiling: &Tiling, spec: &RegionSpec) -> Result<Tiling, ZetaError> {
    ZetaMap::lower(spec)?.apply(tiling)
}

/// Image of a tiling of the holey upper region.
pub fn zeta_upper(tiling: &Tiling, spec: &RegionSpec) -> Result<Tiling, ZetaError> {
    ZetaMap::upper(spec)?.apply(tiling)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjectionReport {
    pub spec: String,
    pub tilings: usize,
    pub distinct_images: usize,
    pub valid_images: bool,
    /// tilings whose weight drops under the map (upper variant only)
    pub weight_losses: usize,
    pub errors: BTreeMap<String, usize>,
    pub ok: bool,
}

fn tally(err: &ZetaError) -> String {
    match err {
        ZetaError::WrongEnd { .. } => "wrong_end".into(),
        ZetaError::Intersection(k) => format!("intersection_{k}"),
        other => other.to_string(),
    }
}

/// Exhaustive check of the lower map on every tiling of the region.
pub fn verify_injection(spec: &RegionSpec, budget: u64) -> Result<InjectionReport, ZetaError> {
    let map = ZetaMap::lower(spec)?;
    let tilings = enumerate_tilings(&map.source, budget)?;
    let mut images = BTreeSet::new();
    let mut errors = BTreeMap::new();
    for t in &tilings {
        match map.apply(t) {
            Ok(img) => {
                images.insert(img);
            }
            Err(e) => *errors.entry(tally(&e)).or_insert(0) += 1,
        }
    }
    let valid = errors.is_empty();
    Ok(InjectionReport {
        spec: spec.canonical(),
        tilings: tilings.len(),
        distinct_images: images.len(),
        valid_images: valid,
        weight_losses: 0,
        ok: valid && images.len() == tilings.len(),
        errors,
    })
}

/// Exhaustive check of the upper map: injectivity, validity and that no
/// tiling loses fold weight.
pub fn verify_upper(spec: &RegionSpec, budget: u64) -> Result<InjectionReport, ZetaError> {
    let map = ZetaMap::upper(spec)?;
    let tilings = enumerate_tilings(&map.source, budget)?;
    let mut images = BTreeSet::new();
    let mut errors = BTreeMap::new();
    let mut losses = 0;
    for t in &tilings {
        match map.apply(t) {
            Ok(img) => {
                if t.fold_weight(&map.source) > img.fold_weight(&map.target) {
                    losses += 1;
                }
                images.insert(img);
            }
            Err(e) => *errors.entry(tally(&e)).or_insert(0) += 1,
        }
    }
    let valid = errors.is_empty();
    Ok(InjectionReport {
        spec: spec.canonical(),
        tilings: tilings.len(),
        distinct_images: images.len(),
        valid_images: valid,
        weight_losses: losses,
        ok: valid && losses == 0 && images.len() == tilings.len(),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DEFAULT_BUDGET;

    fn positions(p: &HolePairing) -> Vec<(i64, i64)> {
        p.pairs.iter().map(|(a, b)| (a.position, b.position)).collect()
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(positions(&pair_holes(&[-6, 6], &[-2, 2])), vec![(-6, -2), (2, 6)]);
        assert_eq!(positions(&pair_holes(&[0], &[2])), vec![(0, 2)]);
        assert_eq!(positions(&pair_holes(&[4, 6], &[0, 2])), vec![(2, 4), (0, 6)]);
    }

    #[test]
    fn unholed_is_identity() {
        let s = RegionSpec::unholed(4, 1);
        let r = verify_injection(&s, DEFAULT_BUDGET).unwrap();
        assert!(r.ok);
        assert_eq!(r.tilings, r.distinct_images);
    }

    #[test]
    fn overlapping_upper_holes_are_rejected() {
        let s = RegionSpec::validate(4, 1, &[2], &[0]).unwrap();
        assert!(matches!(ZetaMap::upper(&s), Err(ZetaError::OverlappingHoles(..))));
        assert!(matches!(verify_upper(&s, DEFAULT_BUDGET), Err(ZetaError::OverlappingHoles(..))));
    }
}
