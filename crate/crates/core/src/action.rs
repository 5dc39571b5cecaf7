//! The set `Z_p x Z_{p^2} x ... x Z_{p^m}` and the left action of `E_p^(m)`
//! on it: component `i` of `M . v` is `(sum_k M[i][k] v_k) mod p^i`, i.e. `v`
//! is treated as a single column of a ring element.

use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::Zero;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::params::RingParams;
use crate::ring::RingElement;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ActionVector {
    params: RingParams,
    comps: Vec<BigUint>,
}

impl ActionVector {
    /// Reduces component `i` (0-based) modulo `p^(i+1)`.
    pub fn new<T>(params: &RingParams, raw: &[T]) -> Result<Self>
    where
        T: Clone + Into<BigInt>,
    {
        if raw.len() != params.m() {
            return Err(Error::ShapeMismatch {
                rows: raw.len(),
                cols: 1,
                m: params.m(),
            });
        }
        let comps = raw
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let modulus = BigInt::from(params.row_modulus(i).clone());
                let v: BigInt = v.clone().into();
                v.mod_floor(&modulus).to_biguint().expect("nonnegative")
            })
            .collect();
        Ok(ActionVector {
            params: params.clone(),
            comps,
        })
    }

    /// Accepts canonical components only.
    pub fn from_canonical(params: &RingParams, comps: Vec<BigUint>) -> Result<Self> {
        if comps.len() != params.m() {
            return Err(Error::InvariantViolation(format!(
                "expected {} components, found {}",
                params.m(),
                comps.len()
            )));
        }
        if let Some(i) = comps
            .iter()
            .enumerate()
            .position(|(i, v)| v >= params.row_modulus(i))
        {
            return Err(Error::InvariantViolation(format!(
                "component {} out of range",
                i + 1
            )));
        }
        Ok(ActionVector {
            params: params.clone(),
            comps,
        })
    }

    pub fn zero(params: &RingParams) -> Self {
        ActionVector {
            params: params.clone(),
            comps: vec![BigUint::zero(); params.m()],
        }
    }

    pub fn random<R: RngCore + ?Sized>(params: &RingParams, rng: &mut R) -> Self {
        let comps = (0..params.m())
            .map(|i| rng.gen_biguint_below(params.row_modulus(i)))
            .collect();
        ActionVector {
            params: params.clone(),
            comps,
        }
    }

    /// Uniform among vectors whose components are all prime to `p`.
    pub fn random_units<R: RngCore + ?Sized>(params: &RingParams, rng: &mut R) -> Self {
        let comps = (0..params.m())
            .map(|i| loop {
                let v = rng.gen_biguint_below(params.row_modulus(i));
                if !(&v % params.p()).is_zero() {
                    break v;
                }
            })
            .collect();
        ActionVector {
            params: params.clone(),
            comps,
        }
    }

    pub fn params(&self) -> &RingParams {
        &self.params
    }

    pub fn components(&self) -> &[BigUint] {
        &self.comps
    }

    pub fn get(&self, i: usize) -> &BigUint {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Zero::is_zero)
    }

    fn same_ring(&self, other: &RingParams) -> Result<()> {
        if &self.params != other {
            return Err(Error::ParamsMismatch);
        }
        Ok(())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ring(&other.params)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .enumerate()
            .map(|(i, (a, b))| (a + b) % self.params.row_modulus(i))
            .collect();
        Ok(ActionVector {
            params: self.params.clone(),
            comps,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_ring(&other.params)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .enumerate()
            .map(|(i, (a, b))| {
                let modulus = self.params.row_modulus(i);
                (a + modulus - b) % modulus
            })
            .collect();
        Ok(ActionVector {
            params: self.params.clone(),
            comps,
        })
    }
}

/// `M . v`.
pub fn act(m_elem: &RingElement, v: &ActionVector) -> Result<ActionVector> {
    v.same_ring(m_elem.params())?;
    let params = v.params();
    let comps = (0..params.m())
        .map(|i| {
            let acc =
                (0..params.m()).fold(BigUint::zero(), |acc, k| acc + m_elem.get(i, k) * v.get(k));
            acc % params.row_modulus(i)
        })
        .collect();
    Ok(ActionVector {
        params: params.clone(),
        comps,
    })
}

impl fmt::Debug for ActionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ActionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}
