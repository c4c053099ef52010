//! Arbitrary-precision counting primitives.
//!
//! Every cardinality in the model is a ratio of factorial products that is
//! integral by construction. Factorials and binomial rows are memoized once,
//! up to [`DEFAULT_N_MAX`], the first time any function here is called; the
//! tables are read-only afterwards and may be shared freely across threads.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Non-negative arbitrary-precision integer (cardinalities, factorials).
pub type Natural = BigUint;

/// Signed arbitrary-precision integer (interference-weighted counting sums).
pub type ExactWeight = BigInt;

/// Largest factorial argument held in the shared table.
pub const DEFAULT_N_MAX: usize = 512;

/// Memoized factorials `0!..=n_max!` and Pascal rows `C(k, ·)` for `k <= n_max`.
#[derive(Debug)]
pub struct CountingTable {
    factorials: Vec<Natural>,
    pascal: Vec<Vec<Natural>>,
}

impl CountingTable {
    pub fn new(n_max: usize) -> Self {
        let mut factorials = Vec::with_capacity(n_max + 1);
        let mut acc = Natural::one();
        factorials.push(acc.clone());
        for k in 1..=n_max {
            acc *= k;
            factorials.push(acc.clone());
        }

        let mut pascal: Vec<Vec<Natural>> = Vec::with_capacity(n_max + 1);
        pascal.push(vec![Natural::one()]);
        for k in 1..=n_max {
            let prev = &pascal[k - 1];
            let mut row = Vec::with_capacity(k + 1);
            row.push(Natural::one());
            for r in 1..k {
                row.push(&prev[r - 1] + &prev[r]);
            }
            row.push(Natural::one());
            pascal.push(row);
        }

        CountingTable { factorials, pascal }
    }

    pub fn n_max(&self) -> usize {
        self.factorials.len() - 1
    }

    pub fn factorial(&self, k: usize) -> Result<&Natural> {
        self.factorials.get(k).ok_or(Error::RangeViolation {
            k,
            limit: self.n_max(),
        })
    }

    /// `C(k, r)`; `r > k` is a range violation rather than zero, since every
    /// caller derives `r` from a refinement of `k`.
    pub fn binomial(&self, k: usize, r: usize) -> Result<&Natural> {
        let row = self.pascal.get(k).ok_or(Error::RangeViolation {
            k,
            limit: self.n_max(),
        })?;
        row.get(r).ok_or(Error::RangeViolation { k: r, limit: k })
    }
}

/// The process-wide table, built eagerly on first use.
pub fn table() -> &'static CountingTable {
    static TABLE: OnceLock<CountingTable> = OnceLock::new();
    TABLE.get_or_init(|| CountingTable::new(DEFAULT_N_MAX))
}

/// `k!` exactly.
pub fn factorial(k: usize) -> Result<Natural> {
    table().factorial(k).cloned()
}

/// `C(k, r)` exactly, borrowed from the shared table.
pub fn binomial(k: usize, r: usize) -> Result<&'static Natural> {
    table().binomial(k, r)
}

/// `(Σ parts)! / Π parts!`, accumulated as a product of binomials.
pub fn multinomial(parts: &[usize]) -> Result<Natural> {
    let mut total = 0usize;
    let mut acc = Natural::one();
    for &p in parts {
        total += p;
        acc *= binomial(total, p)?;
    }
    Ok(acc)
}

/// `Π numerator_counts! / Π denominator_counts!` as an exact integer.
///
/// Both lists must have the same total. The quotient is integral whenever the
/// denominator counts refine the numerator blocks; anything else is reported
/// as [`Error::NonIntegralRatio`].
pub fn perm_ratio(numerator_counts: &[usize], denominator_counts: &[usize]) -> Result<Natural> {
    let num_total: usize = numerator_counts.iter().sum();
    let den_total: usize = denominator_counts.iter().sum();
    if num_total != den_total {
        return Err(Error::domain(format!(
            "perm_ratio totals differ: {num_total} vs {den_total}"
        )));
    }
    let t = table();
    let mut num = Natural::one();
    for &k in numerator_counts {
        num *= t.factorial(k)?;
    }
    let mut den = Natural::one();
    for &k in denominator_counts {
        den *= t.factorial(k)?;
    }
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::NonIntegralRatio {
            numerator: num.to_string(),
            denominator: den.to_string(),
        });
    }
    Ok(q)
}

/// Exact rational in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactRatio(BigRational);

impl ExactRatio {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::DegenerateNormalization);
        }
        // Ratio::new reduces and moves the sign onto the numerator.
        Ok(ExactRatio(BigRational::new(numerator, denominator)))
    }

    pub fn zero() -> Self {
        ExactRatio(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRatio(BigRational::one())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Nearest `f64`; large numerators and denominators are handled without
    /// intermediate overflow.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl PartialOrd for ExactRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Add for ExactRatio {
    type Output = ExactRatio;
    fn add(self, rhs: ExactRatio) -> ExactRatio {
        ExactRatio(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a ExactRatio> for ExactRatio {
    type Output = ExactRatio;
    fn add(self, rhs: &'a ExactRatio) -> ExactRatio {
        ExactRatio(self.0 + &rhs.0)
    }
}

impl Sum for ExactRatio {
    fn sum<I: Iterator<Item = ExactRatio>>(iter: I) -> Self {
        iter.fold(ExactRatio::zero(), Add::add)
    }
}

impl<'a> Sum<&'a ExactRatio> for ExactRatio {
    fn sum<I: Iterator<Item = &'a ExactRatio>>(iter: I) -> Self {
        iter.fold(ExactRatio::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for ExactRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
