//! Elements of `E_p^(m)` and their arithmetic.
//!
//! An element is an `m x m` array whose row `i` (1-based) lives in
//! `Z_{p^i}` and whose sub-diagonal entries `(i, j)`, `i > j`, are multiples
//! of `p^(i-j)`. Addition is entrywise and multiplication is the ordinary
//! matrix product, with row `i` reduced modulo `p^i` in both cases.
//!
//! Internally rows and columns are 0-based; row `i` is reduced modulo
//! `p^(i+1)`. Entries are stored as canonical representatives, so derived
//! equality is ring equality.
//!
//! Nothing here is constant-time.

use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::params::RingParams;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    params: RingParams,
    // row-major, m * m entries
    entries: Vec<BigUint>,
}

impl RingElement {
    /// Builds an element from arbitrary integers, reducing row `i` modulo
    /// `p^(i+1)` and rejecting sub-diagonal entries that are not multiples of
    /// the required power of `p`.
    pub fn new<T>(params: &RingParams, raw: &[Vec<T>]) -> Result<Self>
    where
        T: Clone + Into<BigInt>,
    {
        let m = params.m();
        if raw.len() != m || raw.iter().any(|r| r.len() != m) {
            let cols = raw.iter().map(Vec::len).find(|&c| c != m).unwrap_or(m);
            return Err(Error::ShapeMismatch {
                rows: raw.len(),
                cols,
                m,
            });
        }
        let mut entries = Vec::with_capacity(m * m);
        for (i, row) in raw.iter().enumerate() {
            let modulus = BigInt::from(params.row_modulus(i).clone());
            for v in row {
                let v: BigInt = v.clone().into();
                let r = v.mod_floor(&modulus);
                entries.push(r.to_biguint().expect("mod_floor is nonnegative"));
            }
        }
        Self::check_divisibility(params, &entries)?;
        Ok(RingElement {
            params: params.clone(),
            entries,
        })
    }

    /// Accepts already-canonical entries (row-major), checking range and
    /// divisibility. Used by decoders, which must not silently reduce.
    pub fn from_canonical(params: &RingParams, entries: Vec<BigUint>) -> Result<Self> {
        let m = params.m();
        if entries.len() != m * m {
            return Err(Error::InvariantViolation(format!(
                "expected {} entries, found {}",
                m * m,
                entries.len()
            )));
        }
        for (idx, v) in entries.iter().enumerate() {
            let i = idx / m;
            if v >= params.row_modulus(i) {
                return Err(Error::InvariantViolation(format!(
                    "entry ({},{}) out of range for row modulus",
                    i + 1,
                    idx % m + 1
                )));
            }
        }
        Self::check_divisibility(params, &entries)
            .map_err(|e| Error::InvariantViolation(e.to_string()))?;
        Ok(RingElement {
            params: params.clone(),
            entries,
        })
    }

    fn check_divisibility(params: &RingParams, entries: &[BigUint]) -> Result<()> {
        let m = params.m();
        for i in 0..m {
            for j in 0..i {
                let v = &entries[i * m + j];
                if !(v % params.p_pow(i - j)).is_zero() {
                    return Err(Error::DivisibilityViolation {
                        row: i + 1,
                        col: j + 1,
                        power: i - j,
                    });
                }
            }
        }
        Ok(())
    }

    // Entries produced by ring operations; the invariants hold by
    // construction and are re-checked in debug builds.
    fn from_reduced(params: &RingParams, entries: Vec<BigUint>) -> Self {
        debug_assert!(Self::from_canonical(params, entries.clone()).is_ok());
        RingElement {
            params: params.clone(),
            entries,
        }
    }

    pub fn zero(params: &RingParams) -> Self {
        let m = params.m();
        Self::from_reduced(params, vec![BigUint::zero(); m * m])
    }

    pub fn identity(params: &RingParams) -> Self {
        let m = params.m();
        let mut entries = vec![BigUint::zero(); m * m];
        for i in 0..m {
            // p^(i+1) >= 2, so 1 is already reduced
            entries[i * m + i] = BigUint::one();
        }
        Self::from_reduced(params, entries)
    }

    /// Diagonal element with the given diagonal (reduced row by row).
    pub fn diag<T>(params: &RingParams, diagonal: &[T]) -> Result<Self>
    where
        T: Clone + Into<BigInt>,
    {
        let m = params.m();
        if diagonal.len() != m {
            return Err(Error::ShapeMismatch {
                rows: diagonal.len(),
                cols: diagonal.len(),
                m,
            });
        }
        let raw: Vec<Vec<BigInt>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            diagonal[i].clone().into()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(params, &raw)
    }

    /// Uniform sample: entry `(i, j)` uniform in `Z_{p^i}` on or above the
    /// diagonal, and `p^(i-j) u` with `u` uniform in `Z_{p^j}` below it
    /// (1-based indices).
    pub fn random<R: RngCore + ?Sized>(params: &RingParams, rng: &mut R) -> Self {
        let m = params.m();
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let v = if i <= j {
                    rng.gen_biguint_below(params.row_modulus(i))
                } else {
                    rng.gen_biguint_below(params.row_modulus(j)) * params.p_pow(i - j)
                };
                entries.push(v);
            }
        }
        Self::from_reduced(params, entries)
    }

    pub fn params(&self) -> &RingParams {
        &self.params
    }

    pub fn m(&self) -> usize {
        self.params.m()
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.m() + j]
    }

    /// Row-major canonical entries.
    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<BigUint>> {
        self.entries.chunks(self.m()).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        let m = self.m();
        (0..m).all(|i| (0..m).all(|j| i == j || self.get(i, j).is_zero()))
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        Ok(())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let m = self.m();
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .enumerate()
            .map(|(idx, (a, b))| (a + b) % self.params.row_modulus(idx / m))
            .collect();
        Ok(Self::from_reduced(&self.params, entries))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(&self) -> Self {
        let m = self.m();
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                if a.is_zero() {
                    BigUint::zero()
                } else {
                    self.params.row_modulus(idx / m) - a
                }
            })
            .collect();
        Self::from_reduced(&self.params, entries)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        self.add(&other.neg())
    }

    /// Row `i` of the integer product, reduced modulo `p^(i+1)`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let m = self.m();
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            let modulus = self.params.row_modulus(i);
            for j in 0..m {
                let mut acc = BigUint::zero();
                for k in 0..m {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc += a * other.get(k, j);
                }
                entries.push(acc % modulus);
            }
        }
        Ok(Self::from_reduced(&self.params, entries))
    }

    /// `self^k` by square-and-multiply; `self^0` is the identity.
    pub fn pow(&self, k: &BigUint) -> Self {
        let mut result = Self::identity(&self.params);
        let mut base = self.clone();
        let bits = k.bits();
        for b in 0..bits {
            if k.bit(b) {
                result = result.mul(&base).expect("same ring");
            }
            if b + 1 < bits {
                base = base.mul(&base).expect("same ring");
            }
        }
        result
    }

    pub fn pow_u64(&self, k: u64) -> Self {
        self.pow(&BigUint::from(k))
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        Ok(self.mul(other)? == other.mul(self)?)
    }

    /// A unit exactly when no diagonal entry is divisible by `p`.
    pub fn is_invertible(&self) -> bool {
        let p = self.params.p();
        (0..self.m()).all(|i| !(self.get(i, i) % p).is_zero())
    }

    /// Two-sided inverse.
    ///
    /// The element is lifted to a matrix over `Z_{p^m}` and inverted by
    /// Gauss-Jordan elimination on the diagonal pivots (units modulo `p`,
    /// hence modulo `p^m`). Row `i` of the result is then reduced modulo
    /// `p^(i+1)`, re-validated, and checked against both products.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let m = self.m();
        let big = self.params.row_modulus(m - 1).clone();
        let sub_mod = |a: &BigUint, b: &BigUint| -> BigUint { (a + &big - (b % &big)) % &big };

        let mut a: Vec<Vec<BigUint>> = self.rows();
        let mut inv: Vec<Vec<BigUint>> = Self::identity(&self.params).rows();

        for col in 0..m {
            let pivot_inv = a[col][col].modinv(&big).ok_or_else(|| {
                Error::InternalVerificationFailure(format!("pivot {} not a unit", col + 1))
            })?;
            for j in 0..m {
                a[col][j] = &a[col][j] * &pivot_inv % &big;
                inv[col][j] = &inv[col][j] * &pivot_inv % &big;
            }
            for row in 0..m {
                if row == col || a[row][col].is_zero() {
                    continue;
                }
                let factor = a[row][col].clone();
                for j in 0..m {
                    let t = &factor * &a[col][j];
                    a[row][j] = sub_mod(&a[row][j], &t);
                    let t = &factor * &inv[col][j];
                    inv[row][j] = sub_mod(&inv[row][j], &t);
                }
            }
        }

        let entries: Vec<BigUint> = inv
            .into_iter()
            .enumerate()
            .flat_map(|(i, row)| {
                let modulus = self.params.row_modulus(i).clone();
                row.into_iter().map(move |v| v % &modulus)
            })
            .collect();
        let candidate = Self::from_canonical(&self.params, entries)
            .map_err(|e| Error::InternalVerificationFailure(e.to_string()))?;
        let id = Self::identity(&self.params);
        if self.mul(&candidate)? != id || candidate.mul(self)? != id {
            return Err(Error::InternalVerificationFailure(
                "inverse candidate fails the two-sided check".into(),
            ));
        }
        Ok(candidate)
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.m()).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p2m2() -> RingParams {
        RingParams::from_u64(2, 2).unwrap()
    }

    fn el(pp: &RingParams, rows: &[&[i64]]) -> RingElement {
        let raw: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        RingElement::new(pp, &raw).unwrap()
    }

    #[test]
    fn construction_reduces_rows() {
        let pp = p2m2();
        assert_eq!(el(&pp, &[&[3, -1], &[6, 7]]), el(&pp, &[&[1, 1], &[2, 3]]));
        assert_eq!(
            RingElement::new(&pp, &[vec![0, 0], vec![1, 0]]),
            Err(Error::DivisibilityViolation {
                row: 2,
                col: 1,
                power: 1
            })
        );
        assert!(matches!(
            RingElement::new(&pp, &[vec![0, 0, 0], vec![0, 0, 0]]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn from_canonical_rejects_unreduced() {
        let pp = p2m2();
        let e = RingElement::from_canonical(
            &pp,
            vec![2u32, 0, 0, 0].into_iter().map(BigUint::from).collect(),
        );
        assert!(matches!(e, Err(Error::InvariantViolation(_))));
        let e = RingElement::from_canonical(
            &pp,
            vec![0u32, 0, 1, 0].into_iter().map(BigUint::from).collect(),
        );
        assert!(matches!(e, Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn add_sub_examples() {
        let pp = p2m2();
        let a = el(&pp, &[&[1, 1], &[2, 3]]);
        let b = el(&pp, &[&[1, 0], &[2, 1]]);
        assert_eq!(a.add(&b).unwrap(), el(&pp, &[&[0, 1], &[0, 0]]));
        assert_eq!(a.add(&RingElement::zero(&pp)).unwrap(), a);
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn mul_examples_and_noncommutativity() {
        let pp = p2m2();
        let a = el(&pp, &[&[1, 1], &[2, 3]]);
        let b = el(&pp, &[&[1, 0], &[2, 1]]);
        assert_eq!(a.mul(&b).unwrap(), el(&pp, &[&[1, 1], &[0, 3]]));
        assert_eq!(b.mul(&a).unwrap(), el(&pp, &[&[1, 1], &[0, 1]]));
        assert_eq!(a.mul(&RingElement::identity(&pp)).unwrap(), a);
        assert!(!a.commutes(&b).unwrap());
        assert!(a.commutes(&a).unwrap());
        assert!(a.commutes(&RingElement::identity(&pp)).unwrap());
    }

    #[test]
    fn params_mismatch() {
        let a = RingElement::identity(&p2m2());
        let b = RingElement::identity(&RingParams::from_u64(3, 2).unwrap());
        assert_eq!(a.add(&b), Err(Error::ParamsMismatch));
        assert_eq!(a.mul(&b), Err(Error::ParamsMismatch));
        assert_eq!(a.commutes(&b), Err(Error::ParamsMismatch));
    }

    #[test]
    fn powers() {
        let pp = p2m2();
        let m = el(&pp, &[&[0, 0], &[0, 3]]);
        assert_eq!(m.pow_u64(0), RingElement::identity(&pp));
        assert_eq!(m.pow_u64(2), el(&pp, &[&[0, 0], &[0, 1]]));
        assert_eq!(m.pow_u64(3), m);
    }

    #[test]
    fn invertibility_and_inverse() {
        let pp = p2m2();
        assert!(el(&pp, &[&[1, 1], &[2, 3]]).is_invertible());
        let singular = el(&pp, &[&[0, 1], &[2, 3]]);
        assert!(!singular.is_invertible());
        assert_eq!(singular.inverse(), Err(Error::NotInvertible));
        let id = RingElement::identity(&pp);
        assert_eq!(id.inverse().unwrap(), id);
        let inv = el(&pp, &[&[1, 0], &[2, 1]]);
        assert_eq!(inv.inverse().unwrap(), inv);
    }

    #[test]
    fn random_units_invert_at_large_parameters() {
        let pp = RingParams::from_u64(18446744073709551557, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let id = RingElement::identity(&pp);
        for _ in 0..50 {
            let a = RingElement::random(&pp, &mut rng);
            assert!(a.is_invertible());
            let b = a.inverse().unwrap();
            assert_eq!(a.mul(&b).unwrap(), id);
        }
    }

    #[test]
    fn random_is_reproducible() {
        let pp = RingParams::from_u64(7, 3).unwrap();
        let a = RingElement::random(&pp, &mut ChaCha8Rng::seed_from_u64(5));
        let b = RingElement::random(&pp, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn display() {
        let pp = p2m2();
        assert_eq!(el(&pp, &[&[1, 1], &[2, 3]]).to_string(), "[[1, 1], [2, 3]]");
    }
}
