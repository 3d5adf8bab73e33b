//! Spherical / affine / other classification from the Gram matrix.
//!
//! For every connected component of the Coxeter diagram the Gram matrix
//! `B_st = -cos(pi / m_st)` is tested with leading principal minors. The
//! off-diagonal entries are non-positive and the component is connected, so
//! a positive semidefinite singular matrix has all proper principal minors
//! strictly positive. Hence: all leading minors positive means positive
//! definite; the first `n-1` positive and the determinant zero means
//! semidefinite with a kernel; anything else means indefinite.
//!
//! Labels in {2,3,4,5,6,inf} give entries in Q(sqrt2, sqrt3, sqrt5), where the
//! test is exact. Other labels go through rational interval arithmetic whose
//! precision doubles until every sign is decided.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use super::{CoxeterSystem, INFINITY};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoxeterType {
    Spherical,
    Affine,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentType {
    /// Generator indices of the component, ascending.
    pub generators: Vec<usize>,
    pub kind: CoxeterType,
    /// Decided in the exact field rather than by intervals.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeReport {
    pub components: Vec<ComponentType>,
    pub irreducible: bool,
}

impl TypeReport {
    /// The verdict for an irreducible system, `None` when reducible.
    pub fn single(&self) -> Option<CoxeterType> {
        if self.irreducible {
            Some(self.components[0].kind)
        } else {
            None
        }
    }
}

/// Largest working precision tried by the interval path, in bits.
pub const MAX_PRECISION_BITS: u32 = 4096;
const START_PRECISION_BITS: u32 = 64;

pub fn classify_type(sys: &CoxeterSystem) -> Result<TypeReport> {
    let comps = sys.diagram_components();
    let mut components = Vec::with_capacity(comps.len());
    for gens in comps {
        let labels: Vec<Vec<u32>> = gens
            .iter()
            .map(|&i| gens.iter().map(|&j| sys.m(i, j)).collect())
            .collect();
        let exact_ok = labels
            .iter()
            .flatten()
            .all(|&m| matches!(m, 1..=6 | INFINITY));
        let kind = if exact_ok {
            classify_exact(&labels)
        } else {
            classify_interval(&labels)?
        };
        components.push(ComponentType {
            generators: gens,
            kind,
            exact: exact_ok,
        });
    }
    let irreducible = components.len() == 1;
    Ok(TypeReport {
        components,
        irreducible,
    })
}

/// Verdict from the signs of the leading principal minors of a connected
/// component.
fn verdict(signs: &[Ordering]) -> CoxeterType {
    let n = signs.len();
    if signs[..n - 1].iter().any(|&s| s != Ordering::Greater) {
        return CoxeterType::Other;
    }
    match signs[n - 1] {
        Ordering::Greater => CoxeterType::Spherical,
        Ordering::Equal => CoxeterType::Affine,
        Ordering::Less => CoxeterType::Other,
    }
}

/// Commutative ring operations, supplied by a context so that interval
/// arithmetic can carry its precision.
trait Arith {
    type T: Clone;
    fn zero(&self) -> Self::T;
    fn one(&self) -> Self::T;
    fn add(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn sub(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T;
}

/// Determinant by Laplace expansion along rows, memoized over column subsets.
/// Uses only ring operations, which keeps interval widths honest.
fn determinant<A: Arith>(ar: &A, m: &[Vec<A::T>]) -> A::T {
    let n = m.len();
    if n == 0 {
        return ar.one();
    }
    let full = (1usize << n) - 1;
    let mut dp: Vec<Option<A::T>> = vec![None; 1 << n];
    dp[0] = Some(ar.one());
    for mask in 1..=full {
        let row = mask.count_ones() as usize - 1;
        let mut acc = ar.zero();
        let mut above = 0u32;
        for j in (0..n).rev() {
            if mask & (1 << j) == 0 {
                continue;
            }
            let minor = dp[mask & !(1 << j)].as_ref().unwrap();
            let term = ar.mul(&m[row][j], minor);
            acc = if above % 2 == 0 {
                ar.add(&acc, &term)
            } else {
                ar.sub(&acc, &term)
            };
            above += 1;
        }
        dp[mask] = Some(acc);
    }
    dp[full].take().unwrap()
}

fn leading_minors<A: Arith>(ar: &A, m: &[Vec<A::T>]) -> Vec<A::T> {
    (1..=m.len())
        .map(|k| {
            let sub: Vec<Vec<A::T>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
            determinant(ar, &sub)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Exact arithmetic in Q(sqrt2, sqrt3, sqrt5)

const PRIMES: [i64; 3] = [2, 3, 5];

/// Element of Q(sqrt2, sqrt3, sqrt5): coordinate `k` multiplies the square
/// root of the product of the primes whose bits are set in `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Quad(pub [BigRational; 8]);

impl Quad {
    fn rational(q: BigRational) -> Self {
        let mut c: [BigRational; 8] = std::array::from_fn(|_| BigRational::zero());
        c[0] = q;
        Quad(c)
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// `-cos(pi / m)` for the supported labels.
    pub(crate) fn gram_entry(m: u32) -> Self {
        let mut q = Quad::rational(BigRational::zero());
        match m {
            1 => q.0[0] = Quad::ratio(1, 1),
            2 => {}
            3 => q.0[0] = Quad::ratio(-1, 2),
            4 => q.0[1] = Quad::ratio(-1, 2),
            5 => {
                q.0[0] = Quad::ratio(-1, 4);
                q.0[4] = Quad::ratio(-1, 4);
            }
            6 => q.0[2] = Quad::ratio(-1, 2),
            INFINITY => q.0[0] = Quad::ratio(-1, 1),
            _ => unreachable!("label {m} has no exact Gram entry"),
        }
        q
    }

    /// Sign, deciding one square root at a time: writing the element as
    /// `p + q sqrt(r)` with `p, q` in the smaller field, mixed signs are
    /// settled by the sign of `p^2 - r q^2`.
    pub(crate) fn sign(&self) -> Ordering {
        sign_at(&self.0, 3)
    }
}

fn sign_at(c: &[BigRational], level: usize) -> Ordering {
    if level == 0 {
        return c[0].cmp(&BigRational::zero());
    }
    let half = 1 << (level - 1);
    let (p, q) = c.split_at(half);
    let sp = sign_at(p, level - 1);
    let sq = sign_at(q, level - 1);
    if sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    // p and q have opposite signs: compare p^2 with r q^2
    let r = BigRational::from_integer(BigInt::from(PRIMES[level - 1]));
    let p2 = sub_mul(p, p, level - 1);
    let q2 = sub_mul(q, q, level - 1);
    let diff: Vec<BigRational> = p2
        .iter()
        .zip(&q2)
        .map(|(a, b)| a - &r * b)
        .collect();
    let s = sign_at(&diff, level - 1);
    if sp == Ordering::Greater {
        s
    } else {
        s.reverse()
    }
}

/// Product in the subfield spanned by the first `level` square roots.
fn sub_mul(a: &[BigRational], b: &[BigRational], level: usize) -> Vec<BigRational> {
    let size = 1 << level;
    let mut out = vec![BigRational::zero(); size];
    for i in 0..size {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..size {
            if b[j].is_zero() {
                continue;
            }
            let shared = i & j;
            let mut f = 1i64;
            for (bit, p) in PRIMES.iter().enumerate() {
                if shared & (1 << bit) != 0 {
                    f *= p;
                }
            }
            out[i ^ j] += &a[i] * &b[j] * BigRational::from_integer(BigInt::from(f));
        }
    }
    out
}

struct Exact;

impl Arith for Exact {
    type T = Quad;
    fn zero(&self) -> Quad {
        Quad::rational(BigRational::zero())
    }
    fn one(&self) -> Quad {
        Quad::rational(BigRational::one())
    }
    fn add(&self, a: &Quad, b: &Quad) -> Quad {
        Quad(std::array::from_fn(|k| &a.0[k] + &b.0[k]))
    }
    fn sub(&self, a: &Quad, b: &Quad) -> Quad {
        Quad(std::array::from_fn(|k| &a.0[k] - &b.0[k]))
    }
    fn mul(&self, a: &Quad, b: &Quad) -> Quad {
        let v = sub_mul(&a.0, &b.0, 3);
        Quad(v.try_into().expect("eight coordinates"))
    }
}

fn classify_exact(labels: &[Vec<u32>]) -> CoxeterType {
    let gram: Vec<Vec<Quad>> = labels
        .iter()
        .map(|row| row.iter().map(|&m| Quad::gram_entry(m)).collect())
        .collect();
    let signs: Vec<Ordering> = leading_minors(&Exact, &gram)
        .iter()
        .map(Quad::sign)
        .collect();
    verdict(&signs)
}

// ---------------------------------------------------------------------------
// Certified interval arithmetic

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    fn point(q: BigRational) -> Self {
        Interval { lo: q.clone(), hi: q }
    }

    /// `Some(sign)` when the interval excludes zero or is exactly zero.
    fn sign(&self) -> Option<Ordering> {
        let z = BigRational::zero();
        if self.lo > z {
            Some(Ordering::Greater)
        } else if self.hi < z {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    #[cfg(test)]
    pub(crate) fn contains(&self, x: f64) -> bool {
        let lo = num_traits::ToPrimitive::to_f64(&self.lo).unwrap_or(f64::NEG_INFINITY);
        let hi = num_traits::ToPrimitive::to_f64(&self.hi).unwrap_or(f64::INFINITY);
        lo <= x && x <= hi
    }
}

/// Interval context; endpoints are rounded outward to multiples of `2^-bits`
/// after every multiplication so that sizes stay bounded.
struct Intervals {
    bits: u32,
}

impl Intervals {
    fn scale(&self) -> BigInt {
        BigInt::one() << self.bits as usize
    }

    fn round_down(&self, q: &BigRational) -> BigRational {
        let s = self.scale();
        let num = (q * BigRational::from_integer(s.clone())).floor().to_integer();
        BigRational::new(num, s)
    }

    fn round_up(&self, q: &BigRational) -> BigRational {
        let s = self.scale();
        let num = (q * BigRational::from_integer(s.clone())).ceil().to_integer();
        BigRational::new(num, s)
    }

    fn widen(&self, lo: BigRational, hi: BigRational) -> Interval {
        Interval {
            lo: self.round_down(&lo),
            hi: self.round_up(&hi),
        }
    }
}

impl Arith for Intervals {
    type T = Interval;
    fn zero(&self) -> Interval {
        Interval::point(BigRational::zero())
    }
    fn one(&self) -> Interval {
        Interval::point(BigRational::one())
    }
    fn add(&self, a: &Interval, b: &Interval) -> Interval {
        Interval {
            lo: &a.lo + &b.lo,
            hi: &a.hi + &b.hi,
        }
    }
    fn sub(&self, a: &Interval, b: &Interval) -> Interval {
        Interval {
            lo: &a.lo - &b.hi,
            hi: &a.hi - &b.lo,
        }
    }
    fn mul(&self, a: &Interval, b: &Interval) -> Interval {
        if a.lo == a.hi && b.lo == b.hi {
            // exact products of points stay exact so that zero survives
            return Interval::point(&a.lo * &b.lo);
        }
        let c = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        self.widen(lo, hi)
    }
}

/// Enclosure of `atan(1/k)` from its alternating series, accurate to
/// `2^-(bits+8)`.
fn atan_inverse(k: i64, bits: u32) -> Interval {
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (bits as usize + 8));
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let mut pow = k.clone();
    let mut sum = BigRational::zero();
    let mut n = 0i64;
    loop {
        let term = BigRational::new(BigInt::one(), &pow * BigInt::from(2 * n + 1));
        if term < tol {
            // the first omitted term bounds the tail of an alternating series
            let (lo, hi) = (&sum - &term, &sum + &term);
            return Interval { lo, hi };
        }
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pow *= &k2;
        n += 1;
    }
}

/// Enclosure of pi by Machin's formula.
pub(crate) fn pi_interval(bits: u32) -> Interval {
    let a = atan_inverse(5, bits);
    let b = atan_inverse(239, bits);
    let c16 = BigRational::from_integer(BigInt::from(16));
    let c4 = BigRational::from_integer(BigInt::from(4));
    Interval {
        lo: &c16 * &a.lo - &c4 * &b.hi,
        hi: &c16 * &a.hi - &c4 * &b.lo,
    }
}

/// Enclosure of `cos(x)` for a rational `0 <= x <= 4`, Taylor series with a
/// remainder bound.
fn cos_rational(x: &BigRational, bits: u32) -> Interval {
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (bits as usize + 8));
    let x2 = x * x;
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    let mut n = 0i64;
    loop {
        // once terms decrease below tol, the remainder is at most the next term
        if term.abs() < tol && n > 2 {
            let r = term.abs();
            return Interval {
                lo: &sum - &r,
                hi: &sum + &r,
            };
        }
        sum += &term;
        let denom = BigInt::from((2 * n + 1) * (2 * n + 2));
        term = -(&term * &x2) / BigRational::from_integer(denom);
        n += 1;
    }
}

/// Enclosure of `-cos(pi/m)`; infinity maps to exactly `-1`.
pub(crate) fn gram_interval(m: u32, bits: u32) -> Interval {
    match m {
        1 => return Interval::point(BigRational::one()),
        2 => return Interval::point(BigRational::zero()),
        3 => return Interval::point(BigRational::new((-1).into(), 2.into())),
        INFINITY => return Interval::point(-BigRational::one()),
        _ => {}
    }
    let pi = pi_interval(bits);
    let mm = BigRational::from_integer(BigInt::from(m));
    // cos is decreasing on [0, pi]
    let c_lo = cos_rational(&(&pi.hi / &mm), bits);
    let c_hi = cos_rational(&(&pi.lo / &mm), bits);
    Interval {
        lo: -c_hi.hi,
        hi: -c_lo.lo,
    }
}

fn classify_interval(labels: &[Vec<u32>]) -> Result<CoxeterType> {
    let mut bits = START_PRECISION_BITS;
    loop {
        let ctx = Intervals { bits };
        let gram: Vec<Vec<Interval>> = labels
            .iter()
            .map(|row| row.iter().map(|&m| gram_interval(m, bits)).collect())
            .collect();
        let minors = leading_minors(&ctx, &gram);
        let n = minors.len();
        let mut signs = Vec::with_capacity(n);
        let mut undecided = false;
        for (k, iv) in minors.iter().enumerate() {
            match iv.sign() {
                Some(s) => {
                    signs.push(s);
                    // a certified non-positive proper minor settles the verdict
                    if k + 1 < n && s != Ordering::Greater {
                        return Ok(CoxeterType::Other);
                    }
                }
                None => {
                    undecided = true;
                    break;
                }
            }
        }
        if !undecided {
            return Ok(verdict(&signs));
        }
        if bits >= MAX_PRECISION_BITS {
            return Err(Error::PrecisionExhausted { bits });
        }
        bits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn quad_signs() {
        // sqrt2 - 1 > 0, sqrt3 - sqrt2 > 0, 1 - sqrt5/2 < 0
        let mut a = Exact.zero();
        a.0[1] = BigRational::one();
        a.0[0] = -BigRational::one();
        assert_eq!(a.sign(), Ordering::Greater);
        let mut b = Exact.zero();
        b.0[2] = BigRational::one();
        b.0[1] = -BigRational::one();
        assert_eq!(b.sign(), Ordering::Greater);
        let mut c = Exact.zero();
        c.0[0] = BigRational::one();
        c.0[4] = Quad::ratio(-1, 2);
        assert_eq!(c.sign(), Ordering::Less);
        // (sqrt2 + sqrt3)^2 - 5 - 2 sqrt6 = 0
        let mut s = Exact.zero();
        s.0[1] = BigRational::one();
        s.0[2] = BigRational::one();
        let mut t = Exact.mul(&s, &s);
        t.0[0] -= BigRational::from_integer(5.into());
        t.0[3] -= BigRational::from_integer(2.into());
        assert_eq!(t.sign(), Ordering::Equal);
    }

    #[test]
    fn gram_entries_match_floats() {
        for m in [2u32, 3, 4, 5, 6] {
            let q = Quad::gram_entry(m);
            let approx: f64 = q
                .0
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let mut r = 1.0f64;
                    for (bit, p) in PRIMES.iter().enumerate() {
                        if k & (1 << bit) != 0 {
                            r *= (*p as f64).sqrt();
                        }
                    }
                    c.to_f64().unwrap() * r
                })
                .sum();
            let want = -(std::f64::consts::PI / m as f64).cos();
            assert!((approx - want).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn interval_enclosures() {
        assert!(pi_interval(64).contains(std::f64::consts::PI));
        for m in [4u32, 5, 7, 8, 11] {
            let iv = gram_interval(m, 64);
            let want = -(std::f64::consts::PI / m as f64).cos();
            assert!(iv.contains(want), "m = {m}");
            let width = (&iv.hi - &iv.lo).to_f64().unwrap();
            assert!(width < 1e-15);
        }
    }

    #[test]
    fn determinant_small() {
        let m = vec![
            vec![Interval::point(BigRational::from_integer(2.into())), Interval::point(BigRational::from_integer(1.into()))],
            vec![Interval::point(BigRational::from_integer(1.into())), Interval::point(BigRational::from_integer(3.into()))],
        ];
        let d = determinant(&Intervals { bits: 32 }, &m);
        assert_eq!(d, Interval::point(BigRational::from_integer(5.into())));
    }
}
