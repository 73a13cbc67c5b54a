//! Exact arithmetic: binomials, Pochhammer symbols, Gamma ratios at integer
//! (and half-integer) arguments, terminating hypergeometric sums and the
//! three classical product formulas.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("gamma pole in numerator at {0}")]
    NumeratorPole(i64),
    #[error("hypergeometric series does not terminate")]
    NonTerminating,
    #[error("denominator Pochhammer vanishes at index {0}")]
    DenominatorZero(usize),
    #[error("gamma argument {0} is not an integer or half-integer")]
    BadGammaArgument(String),
    #[error("powers of pi do not cancel (left with pi^{0}/2)")]
    PiMismatch(i64),
    #[error("gamma arguments {0} cannot be paired by integer shifts")]
    Unpaired(String),
    #[error("product is not integral: {0}")]
    NotIntegral(String),
}

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn is_nonpositive_integer(x: &Rat) -> bool {
    x.is_integer() && !x.is_positive()
}

/// Product of the integers in `lo..=hi` (1 for an empty range).
pub fn range_product(lo: i64, hi: i64) -> Int {
    if hi < lo {
        return Int::one();
    }
    // balanced splitting keeps operands similar in size
    if hi - lo < 16 {
        let mut acc = Int::one();
        for k in lo..=hi {
            acc *= k;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    range_product(lo, mid) * range_product(mid + 1, hi)
}

pub fn factorial(n: i64) -> Int {
    assert!(n >= 0, "factorial of negative {n}");
    range_product(2, n)
}

/// Binomial coefficient, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> Int {
    if n < 0 || k < 0 || k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    range_product(n - k + 1, n) / factorial(k)
}

pub fn pochhammer(a: &Rat, b: u32) -> Rat {
    let mut acc = Rat::one();
    let mut x = a.clone();
    for _ in 0..b {
        acc *= &x;
        x += Rat::one();
    }
    acc
}

/// Gamma(a)/Gamma(b) for positive integers a, b.
fn gamma_quotient(a: i64, b: i64) -> Rat {
    if a >= b {
        Rat::from_integer(range_product(b, a - 1))
    } else {
        Rat::new(Int::one(), range_product(a, b - 1))
    }
}

/// prod Gamma(num) / prod Gamma(den) at integer arguments.
///
/// A pole in the denominator makes the ratio vanish unless it is matched by
/// a numerator pole; matched poles are evaluated as a ratio of residues,
/// `Res Gamma(-k) = (-1)^k / k!`.
pub fn gamma_ratio(num: &[i64], den: &[i64]) -> Result<Rat, ArithError> {
    let num_poles: Vec<i64> = num.iter().copied().filter(|&a| a <= 0).collect();
    let den_poles: Vec<i64> = den.iter().copied().filter(|&a| a <= 0).collect();
    if den_poles.len() > num_poles.len() {
        return Ok(Rat::zero());
    }
    if num_poles.len() > den_poles.len() {
        return Err(ArithError::NumeratorPole(num_poles[0]));
    }
    let mut top: Vec<i64> = num.iter().copied().filter(|&a| a > 0).collect();
    let mut bottom: Vec<i64> = den.iter().copied().filter(|&a| a > 0).collect();
    let mut negative = false;
    for &p in &num_poles {
        negative ^= p % 2 != 0;
        bottom.push(1 - p);
    }
    for &p in &den_poles {
        negative ^= p % 2 != 0;
        top.push(1 - p);
    }
    top.sort_unstable();
    bottom.sort_unstable();
    let mut acc = Rat::one();
    let pairs = top.len().min(bottom.len());
    for i in 0..pairs {
        acc *= gamma_quotient(top[i], bottom[i]);
    }
    for &a in &top[pairs..] {
        acc *= Rat::from_integer(factorial(a - 1));
    }
    for &b in &bottom[pairs..] {
        acc /= Rat::from_integer(factorial(b - 1));
    }
    Ok(if negative { -acc } else { acc })
}

/// Gamma(x) for x a positive integer or any non-pole half-integer, as a
/// rational times sqrt(pi)^power (power 0 or 1).
pub fn half_gamma(x: &Rat) -> Result<(Rat, i64), ArithError> {
    let two = Int::from(2);
    if x.is_integer() {
        let k = x.to_integer().to_i64().ok_or_else(|| ArithError::BadGammaArgument(x.to_string()))?;
        if k <= 0 {
            return Err(ArithError::NumeratorPole(k));
        }
        return Ok((Rat::from_integer(factorial(k - 1)), 0));
    }
    if x.denom() != &two {
        return Err(ArithError::BadGammaArgument(x.to_string()));
    }
    let half = frac(1, 2);
    if x.is_positive() {
        let k = (x - &half).to_integer().to_u32().unwrap();
        Ok((pochhammer(&half, k), 1))
    } else {
        // Gamma(1/2 - k) = Gamma(1/2) / (1/2 - k)_k
        let k = (&half - x).to_integer().to_u32().unwrap();
        Ok((pochhammer(x, k).recip(), 1))
    }
}

/// prod Gamma(num) / prod Gamma(den) * pi^pi_power for integer and
/// half-integer arguments; the sqrt(pi) factors must cancel.
pub fn half_gamma_product(num: &[Rat], den: &[Rat], pi_power: i64) -> Result<Rat, ArithError> {
    let mut acc = Rat::one();
    let mut roots = 2 * pi_power;
    for a in num {
        let (g, p) = half_gamma(a)?;
        acc *= g;
        roots += p;
    }
    for b in den {
        let (g, p) = half_gamma(b)?;
        acc /= g;
        roots -= p;
    }
    if roots != 0 {
        return Err(ArithError::PiMismatch(roots));
    }
    Ok(acc)
}

/// prod Gamma(num) / prod Gamma(den) for rational arguments that can be
/// matched pairwise by integer shifts, via Pochhammer symbols.
pub fn gamma_ratio_shifted(num: &[Rat], den: &[Rat]) -> Result<Rat, ArithError> {
    if num.len() != den.len() {
        return Err(ArithError::Unpaired(format!("{} vs {} arguments", num.len(), den.len())));
    }
    let mut den: Vec<Rat> = den.to_vec();
    let mut acc = Rat::one();
    for a in num {
        let pos = den
            .iter()
            .position(|b| (a - b).is_integer())
            .ok_or_else(|| ArithError::Unpaired(a.to_string()))?;
        let b = den.swap_remove(pos);
        let shift = (a - &b).to_integer().to_i64().unwrap();
        if shift >= 0 {
            acc *= pochhammer(&b, shift as u32);
        } else {
            let p = pochhammer(a, (-shift) as u32);
            if p.is_zero() {
                return Err(ArithError::NumeratorPole(0));
            }
            acc /= p;
        }
    }
    Ok(acc)
}

/// Index after which every term of the series vanishes.
pub fn termination_index(num: &[Rat]) -> Option<usize> {
    num.iter()
        .filter(|a| is_nonpositive_integer(a))
        .map(|a| (-a.to_integer()).to_usize().unwrap())
        .min()
}

/// Terminating generalised hypergeometric series pFq[num; den; z].
pub fn hyp_terminating(num: &[Rat], den: &[Rat], z: &Rat) -> Result<Rat, ArithError> {
    let last = termination_index(num).ok_or(ArithError::NonTerminating)?;
    let mut sum = Rat::zero();
    let mut term = Rat::one();
    for k in 0..=last {
        sum += &term;
        if k == last || z.is_zero() {
            break;
        }
        let kk = rat(k as i64);
        for a in num {
            term *= a + &kk;
        }
        for b in den {
            let d = b + &kk;
            if d.is_zero() {
                return Err(ArithError::DenominatorZero(k + 1));
            }
            term /= d;
        }
        term *= z;
        term /= rat(k as i64 + 1);
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductKind {
    Box,
    TransposeComplement,
    VerticalSymmetric,
}

impl ProductKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "box" => Some(Self::Box),
            "transpose_complement" | "tc" => Some(Self::TransposeComplement),
            "vertical_symmetric" | "vs" => Some(Self::VerticalSymmetric),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Box => "box",
            Self::TransposeComplement => "transpose_complement",
            Self::VerticalSymmetric => "vertical_symmetric",
        }
    }
}

fn into_integer(acc: Rat) -> Result<Int, ArithError> {
    if acc.is_integer() {
        Ok(acc.to_integer())
    } else {
        Err(ArithError::NotIntegral(acc.to_string()))
    }
}

/// Tilings of the hexagon with sides n, 2m, n (box), the horizontally
/// symmetric ones (transpose complement) and the weighted upper half
/// (vertical symmetric), as closed products.
pub fn product_formula(kind: ProductKind, n: i64, m: i64) -> Result<Int, ArithError> {
    assert!(n >= 1 && m >= 1, "product formula needs n, m >= 1");
    let mut num = Int::one();
    let mut den = Int::one();
    match kind {
        ProductKind::Box => {
            for i in 1..=n {
                for j in 1..=2 * m {
                    for k in 1..=n {
                        num *= i + j + k - 1;
                        den *= i + j + k - 2;
                    }
                }
            }
        }
        ProductKind::TransposeComplement => {
            num = binomial(n + m - 1, n - 1);
            for i in 1..=n - 2 {
                for j in i..=n - 2 {
                    num *= 2 * m + i + j + 1;
                    den *= i + j + 1;
                }
            }
        }
        ProductKind::VerticalSymmetric => {
            for i in 1..=n {
                num *= 2 * i + 2 * m - 1;
                den *= 2 * i - 1;
                for j in i + 1..=n {
                    num *= i + j + 2 * m - 1;
                    den *= i + j - 1;
                }
            }
        }
    }
    into_integer(Rat::new(num, den))
}

pub fn sign(x: &Rat) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Parses "p", "-p" or "p/q".
pub fn parse_rational(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().ok()?;
            let q: Int = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

/// Round to the nearest integer, halves away from zero.
pub fn round_rational(x: &Rat) -> Int {
    let half = frac(1, 2);
    if x.is_negative() {
        -(-x + &half).floor().to_integer()
    } else {
        (x + &half).floor().to_integer()
    }
}

/// Classical summation and transformation formulas for terminating
/// very-well-poised and balanced series, used as spot checks of the series
/// evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesIdentity {
    /// very-well-poised 5F4 summation with d = -N
    WellPoised5F4,
    /// very-well-poised 7F6 with a - e + N + 1 as a parameter, reduced to a
    /// balanced 4F3; terminates through b = -K
    WellPoised7F6ToBalanced,
    /// balanced 4F3 transformation
    Balanced4F3,
    /// terminating very-well-poised 7F6 to balanced 4F3
    Terminating7F6ToBalanced,
}

impl SeriesIdentity {
    pub const ALL: [SeriesIdentity; 4] = [
        SeriesIdentity::WellPoised5F4,
        SeriesIdentity::WellPoised7F6ToBalanced,
        SeriesIdentity::Balanced4F3,
        SeriesIdentity::Terminating7F6ToBalanced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesIdentity::WellPoised5F4 => "5F4 summation",
            SeriesIdentity::WellPoised7F6ToBalanced => "7F6 to 4F3 (b = -K)",
            SeriesIdentity::Balanced4F3 => "4F3 transformation",
            SeriesIdentity::Terminating7F6ToBalanced => "terminating 7F6 to 4F3",
        }
    }
}

/// Parameters of one identity instance; which fields are read depends on
/// the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesParams {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
    pub e: Rat,
    pub f: Rat,
    pub n: u32,
    pub k: u32,
}

fn reject_poles(gammas: &[Rat], dens: &[&[Rat]]) -> Result<(), ArithError> {
    if let Some(g) = gammas.iter().find(|g| is_nonpositive_integer(g)) {
        return Err(ArithError::BadGammaArgument(g.to_string()));
    }
    for (i, den) in dens.iter().enumerate() {
        if den.iter().any(is_nonpositive_integer) {
            return Err(ArithError::DenominatorZero(i));
        }
    }
    Ok(())
}

/// Both sides of `identity` at `p`. Instances where a Gamma argument or a
/// lower parameter sits on a pole are outside the identity's hypotheses and
/// are rejected with an error.
pub fn series_identity_sides(identity: SeriesIdentity, p: &SeriesParams) -> Result<(Rat, Rat), ArithError> {
    let one = Rat::one();
    let neg_n = -rat(p.n as i64);
    let (a, b, c, d, e, f) = (&p.a, &p.b, &p.c, &p.d, &p.e, &p.f);
    if is_nonpositive_integer(a) {
        return Err(ArithError::BadGammaArgument(a.to_string()));
    }
    let half_a = a / rat(2);
    match identity {
        SeriesIdentity::WellPoised5F4 => {
            let d = &neg_n;
            let num = [a.clone(), &half_a + &one, b.clone(), c.clone(), d.clone()];
            let den = [half_a.clone(), a - b + &one, a - c + &one, a - d + &one];
            let g_num = [a - b + &one, a - c + &one, a - d + &one, a - b - c - d + &one];
            let g_den = [a + &one, a - b - c + &one, a - b - d + &one, a - c - d + &one];
            reject_poles(&[&g_num[..], &g_den[..]].concat(), &[&den])?;
            Ok((hyp_terminating(&num, &den, &one)?, gamma_ratio_shifted(&g_num, &g_den)?))
        }
        SeriesIdentity::WellPoised7F6ToBalanced => {
            let b = -rat(p.k as i64);
            let nn = rat(p.n as i64);
            let num = [a.clone(), &half_a + &one, b.clone(), c.clone(), d.clone(), e.clone(), a - e + &nn + &one];
            let den = [half_a.clone(), a - &b + &one, a - c + &one, a - d + &one, a - e + &one, e - &nn];
            let g_num = [a - d + &one, a - c + &one, a - &b + &one, a - &b - c - d + &one];
            let g_den = [a - c - d + &one, a - &b - d + &one, a - &b - c + &one, a + &one];
            let num4 = [b.clone(), c.clone(), d.clone(), neg_n.clone()];
            let den4 = [a - e + &one, -a + &b + c + d, e - &nn];
            reject_poles(&[&g_num[..], &g_den[..]].concat(), &[&den, &den4])?;
            let rhs = gamma_ratio_shifted(&g_num, &g_den)? * hyp_terminating(&num4, &den4, &one)?;
            Ok((hyp_terminating(&num, &den, &one)?, rhs))
        }
        SeriesIdentity::Balanced4F3 => {
            let nn = rat(p.n as i64);
            let top = a + b + c - e - f - &nn + &one;
            let num = [a.clone(), b.clone(), c.clone(), neg_n.clone()];
            let den = [e.clone(), f.clone(), top.clone()];
            let num2 = [neg_n.clone(), a.clone(), a + c - e - f - &nn + &one, a + b - e - f - &nn + &one];
            let den2 = [top, a - e - &nn + &one, a - f - &nn + &one];
            reject_poles(&[], &[&den, &den2])?;
            let factor = pochhammer(&(e - a), p.n) * pochhammer(&(f - a), p.n) / (pochhammer(e, p.n) * pochhammer(f, p.n));
            Ok((hyp_terminating(&num, &den, &one)?, factor * hyp_terminating(&num2, &den2, &one)?))
        }
        SeriesIdentity::Terminating7F6ToBalanced => {
            let nn = rat(p.n as i64);
            let num = [a.clone(), &half_a + &one, b.clone(), c.clone(), d.clone(), e.clone(), neg_n.clone()];
            let den = [half_a.clone(), a - b + &one, a - c + &one, a - d + &one, a - e + &one, a + &nn + &one];
            let num4 = [a - b - c + &one, d.clone(), e.clone(), neg_n.clone()];
            let den4 = [a - b + &one, a - c + &one, -a + d + e - &nn];
            let pochs = [a + &one, a - d - e + &one, a - d + &one, a - e + &one];
            reject_poles(&pochs, &[&den, &den4])?;
            let factor = pochhammer(&pochs[0], p.n) * pochhammer(&pochs[1], p.n) / (pochhammer(&pochs[2], p.n) * pochhammer(&pochs[3], p.n));
            Ok((hyp_terminating(&num, &den, &one)?, factor * hyp_terminating(&num4, &den4, &one)?))
        }
    }
}
