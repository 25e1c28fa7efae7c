//! Exact rational arithmetic and the small linear-algebra kernel used by the
//! rationalizer: reduced row echelon form, nullspace bases and best rational
//! approximation under a denominator bound.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(BigRational);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    BadInteger(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
}

impl Rat {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Rat {
        Rat(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Rat {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    /// Exact value of a finite double (every finite double is a dyadic rational).
    pub fn from_f64_exact(x: f64) -> Option<Rat> {
        BigRational::from_float(x).map(Rat)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn signum(&self) -> i8 {
        if self.0.is_zero() {
            0
        } else if self.0.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn floor(&self) -> Rat {
        Rat(self.0.floor())
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract_pos(&self) -> Rat {
        Rat(&self.0 - self.0.floor())
    }

    pub fn recip(&self) -> Rat {
        Rat(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Very large numerators/denominators: fall back to a scaled division.
            let n = self.0.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.0.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Rat {
        Rat(r)
    }
}

impl fmt::Display for Rat {
    /// `p` for integers, `p/q` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = RatParseError;

    fn from_str(s: &str) -> Result<Rat, RatParseError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(RatParseError::Empty);
        }
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| RatParseError::BadInteger(t.to_string()))
        };
        match s.split_once('/') {
            None => Ok(Rat::from_int(parse(s)?)),
            Some((p, q)) => {
                let (p, q) = (parse(p)?, parse(q)?);
                if q.is_zero() {
                    return Err(RatParseError::ZeroDenominator);
                }
                Ok(Rat::new(p, q))
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $int:expr) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                // Integer operands skip the gcd reduction.
                match $int {
                    Some(f) if self.0.is_integer() && o.0.is_integer() => {
                        let f: fn(&BigInt, &BigInt) -> BigInt = f;
                        Rat(BigRational::from_integer(f(self.0.numer(), o.0.numer())))
                    }
                    _ => Rat((&self.0).$m(&o.0)),
                }
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                (&self).$m(&o)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                (&self).$m(o)
            }
        }
    };
}

type IntOp = Option<fn(&BigInt, &BigInt) -> BigInt>;

forward_binop!(Add, add, IntOp::Some(|a, b| a + b));
forward_binop!(Sub, sub, IntOp::Some(|a, b| a - b));
forward_binop!(Mul, mul, IntOp::Some(|a, b| a * b));
forward_binop!(Div, div, IntOp::None);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

/// Least common multiple of the denominators of `values` (1 for an empty input).
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// A double-precision approximation of a real input coordinate.
///
/// The decimal literal it was parsed from is kept so that files can be
/// rewritten verbatim.
#[derive(Clone, Debug)]
pub struct RealScalar {
    value: f64,
    literal: Option<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RealScalarError {
    #[error("real scalar must be finite, got {0}")]
    NotFinite(f64),
    #[error("invalid decimal literal `{0}`")]
    BadLiteral(String),
}

impl RealScalar {
    pub fn new(value: f64) -> Result<RealScalar, RealScalarError> {
        if value.is_finite() {
            Ok(RealScalar {
                value,
                literal: None,
            })
        } else {
            Err(RealScalarError::NotFinite(value))
        }
    }

    /// Parse a decimal literal, remembering the exact text.
    pub fn parse_literal(text: &str) -> Result<RealScalar, RealScalarError> {
        let value: f64 = text
            .trim()
            .parse()
            .map_err(|_| RealScalarError::BadLiteral(text.to_string()))?;
        if !value.is_finite() {
            return Err(RealScalarError::NotFinite(value));
        }
        Ok(RealScalar {
            value,
            literal: Some(text.to_string()),
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// The original literal if there is one, otherwise the shortest
    /// round-tripping decimal form of the value.
    pub fn literal(&self) -> String {
        match &self.literal {
            Some(s) => s.clone(),
            None => format!("{:?}", self.value),
        }
    }
}

impl PartialEq for RealScalar {
    fn eq(&self, other: &RealScalar) -> bool {
        self.value == other.value
    }
}

/// Row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix has {rows}x{cols} shape but {len} entries")]
    Shape {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("matrix must be nonempty")]
    Empty,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rat>) -> Result<RatMatrix, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if entries.len() != rows * cols {
            return Err(MatrixError::Shape {
                rows,
                cols,
                len: entries.len(),
            });
        }
        Ok(RatMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<RatMatrix, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(MatrixError::Shape {
                    rows: rows.len(),
                    cols,
                    len: row.len(),
                });
            }
            entries.extend(row.iter().map(|&v| Rat::from(v)));
        }
        RatMatrix::new(rows.len(), cols, entries)
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut entries = vec![Rat::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = Rat::one();
        }
        RatMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rat::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Reduced row echelon form with the list of pivot columns (ascending).
///
/// The pivot row for each column is the first row (at or below the current
/// rank) with a nonzero entry in that column.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a.get(r, c).is_zero()) else {
            continue;
        };
        a.swap_rows(rank, p);
        let inv = a.get(rank, c).recip();
        for j in c..cols {
            let idx = rank * cols + j;
            if !a.entries[idx].is_zero() {
                a.entries[idx] = &a.entries[idx] * &inv;
            }
        }
        let pivot_row: Vec<Rat> = a.row(rank).to_vec();
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = a.get(r, c).clone();
            if factor.is_zero() {
                continue;
            }
            for (j, pv) in pivot_row.iter().enumerate().skip(c) {
                if pv.is_zero() {
                    continue;
                }
                let idx = r * cols + j;
                a.entries[idx] = &a.entries[idx] - &(&factor * pv);
            }
        }
        pivots.push(c);
        rank += 1;
    }
    (a, pivots)
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

/// A basis of the kernel of `m`, one vector per free column, in ascending
/// free-column order. Each vector has a 1 in its free column.
pub fn nullspace_basis(m: &RatMatrix) -> Vec<Vec<Rat>> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); m.cols];
            v[f] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, f);
            }
            v
        })
        .collect()
}

/// The rational `p/q` with `1 <= q <= qmax` closest to `x`.
///
/// Ties go to the smaller denominator, then to the smaller numerator.
pub fn best_rational_approx(x: f64, qmax: u64) -> Rat {
    let exact = Rat::from_f64_exact(x).expect("best_rational_approx needs a finite input");
    best_rational_approx_exact(&exact, qmax)
}

/// As [`best_rational_approx`] but for an exact target.
pub fn best_rational_approx_exact(x: &Rat, qmax: u64) -> Rat {
    assert!(qmax >= 1, "qmax must be at least 1");
    let qmax = BigInt::from(qmax);
    let (p, q) = (x.numer().clone(), x.denom().clone());
    if q <= qmax {
        return x.clone();
    }

    // Farey neighbours of x of order qmax, found by batched Stern-Brocot descent.
    // Invariant: lo = a/b <= x <= c/d = hi, b*c - a*d = 1.
    let fl = p.div_floor(&q);
    let (mut a, mut b) = (fl.clone(), BigInt::one());
    let (mut c, mut d) = (fl + 1, BigInt::one());
    loop {
        let (mn, md): (BigInt, BigInt) = (&a + &c, &b + &d);
        if md > qmax {
            break;
        }
        // Compare mediant with x: mn/md vs p/q.
        match (&mn * &q).cmp(&(&p * &md)) {
            Ordering::Equal => return Rat::new(mn, md),
            Ordering::Less => {
                // Advance lo toward hi as far as it stays <= x.
                let num: BigInt = &p * &b - &a * &q;
                let den: BigInt = &c * &q - &p * &d;
                let k_val = num.div_floor(&den);
                let k_den = (&qmax - &b).div_floor(&d);
                let k = k_val.min(k_den);
                a += &k * &c;
                b += &k * &d;
            }
            Ordering::Greater => {
                let num: BigInt = &c * &q - &p * &d;
                let den: BigInt = &p * &b - &a * &q;
                let k_val = num.div_floor(&den);
                let k_den = (&qmax - &d).div_floor(&b);
                let k = k_val.min(k_den);
                c += &k * &a;
                d += &k * &b;
            }
        }
        if (&a * &q) == (&p * &b) {
            return Rat::new(a, b);
        }
        if (&c * &q) == (&p * &d) {
            return Rat::new(c, d);
        }
    }

    let lo = Rat::new(a, b);
    let hi = Rat::new(c, d);
    let dl = (x - &lo).abs();
    let dh = (&hi - x).abs();
    match dl.cmp(&dh) {
        Ordering::Less => lo,
        Ordering::Greater => hi,
        Ordering::Equal => {
            let key = |r: &Rat| (r.denom().clone(), r.numer().clone());
            if key(&lo) <= key(&hi) {
                lo
            } else {
                hi
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(p, q)
    }

    /// Exhaustive oracle: scan every denominator and the two nearest numerators.
    fn brute_best(x: f64, qmax: u64) -> Rat {
        let xr = Rat::from_f64_exact(x).unwrap();
        let mut best: Option<(Rat, Rat)> = None;
        for q in 1..=qmax as i64 {
            let fl = (x * q as f64).floor() as i64;
            for p in (fl - 2)..=(fl + 2) {
                let cand = r(p, q);
                let err = (&xr - &cand).abs();
                let better = match &best {
                    None => true,
                    Some((b, e)) => {
                        err < *e
                            || (err == *e && (cand.denom(), cand.numer()) < (b.denom(), b.numer()))
                    }
                };
                if better {
                    best = Some((cand, err));
                }
            }
        }
        best.unwrap().0
    }

    #[test]
    fn approx_exact_half() {
        assert_eq!(best_rational_approx(0.5, 10), r(1, 2));
    }

    #[test]
    fn approx_golden_edge_coordinate_with_unit_denominator() {
        let x = 2.0 * ((1.0 + 5f64.sqrt()) / 2.0 - 1.0);
        assert_eq!(brute_best(x, 1), r(1, 1));
        assert_eq!(best_rational_approx(x, 1), r(1, 1));
    }

    #[test]
    fn approx_sqrt3_over_2_matches_scan() {
        // Frozen from the exhaustive scan over q <= 8.
        assert_eq!(brute_best(0.8660254, 8), r(6, 7));
        assert_eq!(best_rational_approx(0.8660254, 8), r(6, 7));
    }

    #[test]
    fn approx_negative_and_integer_inputs() {
        assert_eq!(best_rational_approx(-0.26, 4), r(-1, 4));
        assert_eq!(best_rational_approx(3.0, 1), r(3, 1));
        assert_eq!(best_rational_approx(-2.5, 1), r(-3, 1));
    }

    #[test]
    fn approx_tie_prefers_smaller_denominator() {
        // 1/4 is equidistant from 0/1 and 1/2; the smaller denominator wins.
        assert_eq!(best_rational_approx(0.25, 2), r(0, 1));
        // 0.5 between 0 and 1 with qmax 1: tie, smaller numerator wins.
        assert_eq!(best_rational_approx(0.5, 1), r(0, 1));
    }

    #[test]
    fn rref_identity_and_rank_one() {
        let id = RatMatrix::identity(2);
        let (rr, piv) = rref(&id);
        assert_eq!(rr, id);
        assert_eq!(piv, vec![0, 1]);

        let m = RatMatrix::from_i64_rows(&[vec![1, 1], vec![2, 2]]).unwrap();
        let (rr, piv) = rref(&m);
        assert_eq!(
            rr,
            RatMatrix::from_i64_rows(&[vec![1, 1], vec![0, 0]]).unwrap()
        );
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn nullspace_small_cases() {
        assert!(nullspace_basis(&RatMatrix::identity(2)).is_empty());
        let m = RatMatrix::from_i64_rows(&[vec![1, -1]]).unwrap();
        let ns = nullspace_basis(&m);
        assert_eq!(ns, vec![vec![Rat::one(), Rat::one()]]);
    }

    #[test]
    fn matrix_shape_errors() {
        assert!(matches!(
            RatMatrix::new(2, 2, vec![Rat::one()]),
            Err(MatrixError::Shape { .. })
        ));
        assert_eq!(RatMatrix::new(0, 2, vec![]), Err(MatrixError::Empty));
    }

    #[test]
    fn rat_parse_and_display() {
        assert_eq!("6/4".parse::<Rat>().unwrap(), r(3, 2));
        assert_eq!("-7".parse::<Rat>().unwrap(), r(-7, 1));
        assert_eq!(r(3, 2).to_string(), "3/2");
        assert_eq!(r(4, 2).to_string(), "2");
        assert_eq!("1/0".parse::<Rat>(), Err(RatParseError::ZeroDenominator));
        assert!("x".parse::<Rat>().is_err());
        assert_eq!(r(-1, 3).fract_pos(), r(2, 3));
    }

    #[test]
    fn lcm_of_denominators() {
        let v = [r(1, 2), r(1, 3), r(5, 4)];
        assert_eq!(lcm_denominators(v.iter()), BigInt::from(12));
    }

    #[test]
    fn approx_matches_brute_force_sweep() {
        let xs = [
            0.1,
            0.333,
            -1.7320508,
            std::f64::consts::PI,
            std::f64::consts::E,
            0.61803398875,
            7.0 / 13.0,
        ];
        for &x in &xs {
            for qmax in 1..=40 {
                assert_eq!(
                    best_rational_approx(x, qmax),
                    brute_best(x, qmax),
                    "x={x} qmax={qmax}"
                );
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = RatMatrix> {
            (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
                proptest::collection::vec((-4i64..5, 1i64..4), r * c).prop_map(move |v| {
                    RatMatrix::new(r, c, v.into_iter().map(|(p, q)| Rat::new(p, q)).collect())
                        .unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn rref_is_idempotent(m in small_matrix()) {
                let (once, p1) = rref(&m);
                let (twice, p2) = rref(&once);
                prop_assert_eq!(once, twice);
                prop_assert_eq!(p1, p2);
            }

            #[test]
            fn nullspace_vectors_are_exact_kernel_elements(m in small_matrix()) {
                let ns = nullspace_basis(&m);
                prop_assert_eq!(ns.len(), m.cols() - rank(&m));
                for v in &ns {
                    prop_assert!(m.apply(v).iter().all(Rat::is_zero));
                }
                if !ns.is_empty() {
                    let basis = RatMatrix::new(
                        ns.len(), m.cols(), ns.iter().flatten().cloned().collect()).unwrap();
                    prop_assert_eq!(rank(&basis), ns.len());
                }
            }

            #[test]
            fn approximation_error_non_increasing(x in -50.0f64..50.0, q in 1u64..200) {
                let xr = Rat::from_f64_exact(x).unwrap();
                let e1 = (&xr - &best_rational_approx(x, q)).abs();
                let e2 = (&xr - &best_rational_approx(x, q + 1)).abs();
                prop_assert!(e2 <= e1);
            }

            #[test]
            fn rat_arithmetic_laws(a in (-20i64..20, 1i64..9), b in (-20i64..20, 1i64..9), c in (-20i64..20, 1i64..9)) {
                let (a, b, c) = (Rat::new(a.0, a.1), Rat::new(b.0, b.1), Rat::new(c.0, c.1));
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                let s = &a + &b;
                let g = num_integer::Integer::gcd(s.numer(), s.denom());
                prop_assert!(g == BigInt::one());
                prop_assert!(s.denom() > &BigInt::zero());
            }
        }
    }
}
