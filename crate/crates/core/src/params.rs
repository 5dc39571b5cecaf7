use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::numtheory::is_probable_prime;

/// The pair `(p, m)` fixing a ring `E_p^(m)`, with the row moduli
/// `p, p^2, ..., p^m` cached. Cloning is cheap.
#[derive(Clone)]
pub struct RingParams(Arc<Inner>);

struct Inner {
    p: BigUint,
    m: usize,
    // powers[k] = p^k for k = 0..=m
    powers: Vec<BigUint>,
}

impl RingParams {
    /// Validates that `p` is prime and `m >= 1`.
    pub fn new(p: BigUint, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadParameter("m must be at least 1".into()));
        }
        if m > u16::MAX as usize {
            return Err(Error::BadParameter(format!("m = {m} exceeds 65535")));
        }
        if !is_probable_prime(&p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        let mut powers = Vec::with_capacity(m + 1);
        powers.push(BigUint::one());
        for k in 1..=m {
            powers.push(&powers[k - 1] * &p);
        }
        Ok(RingParams(Arc::new(Inner { p, m, powers })))
    }

    pub fn from_u64(p: u64, m: usize) -> Result<Self> {
        Self::new(BigUint::from(p), m)
    }

    pub fn p(&self) -> &BigUint {
        &self.0.p
    }

    pub fn m(&self) -> usize {
        self.0.m
    }

    /// `p^k` for `0 <= k <= m`.
    pub fn p_pow(&self, k: usize) -> &BigUint {
        &self.0.powers[k]
    }

    /// Modulus of row `i` (0-based), i.e. `p^(i+1)`.
    pub fn row_modulus(&self, i: usize) -> &BigUint {
        &self.0.powers[i + 1]
    }

    /// Protocol modules need off-diagonal room.
    pub fn require_protocol_size(&self) -> Result<()> {
        if self.m() < 2 {
            return Err(Error::BadParameter("protocols require m >= 2".into()));
        }
        Ok(())
    }

    /// Exponent of `p` in `|E_p^(m)|`: `(2m^3 + 3m^2 + m) / 6`.
    pub fn cardinality_exponent(&self) -> u64 {
        let m = self.m() as u64;
        (2 * m * m * m + 3 * m * m + m) / 6
    }

    /// `(2m^3 + 3m^2 - 5m) / 6`, the exponent of the `p`-power factor of the
    /// unit count.
    pub fn unit_count_exponent(&self) -> u64 {
        let m = self.m() as u64;
        (2 * m * m * m + 3 * m * m - 5 * m) / 6
    }

    pub fn cardinality(&self) -> BigUint {
        self.p().pow(self.cardinality_exponent() as u32)
    }

    /// `(p - 1)^m * p^((2m^3 + 3m^2 - 5m) / 6)`: a unit has each diagonal
    /// entry nonzero mod `p` and every other free digit arbitrary.
    pub fn unit_count(&self) -> BigUint {
        let p = self.p();
        (p - 1u32).pow(self.m() as u32) * p.pow(self.unit_count_exponent() as u32)
    }

    /// Size of the center, `p^m`.
    pub fn center_size(&self) -> &BigUint {
        self.p_pow(self.m())
    }
}

impl PartialEq for RingParams {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.m == other.0.m && self.0.p == other.0.p)
    }
}

impl Eq for RingParams {}

impl Hash for RingParams {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.m.hash(state);
    }
}

impl fmt::Debug for RingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E_{}^({})", self.0.p, self.0.m)
    }
}
