//! The center of `E_p^(m)`, the commuting family `H(M)` of polynomials in a
//! base element with central coefficients, and the structured base elements
//! used for the SAP cryptosystem.
//!
//! A central element is determined by `m` base-`p` digits `u_0 .. u_{m-1}`:
//! it is diagonal, with diagonal entry `i` (1-based) equal to the truncation
//! `u_0 + u_1 p + ... + u_{i-1} p^(i-1)`.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::numtheory::is_primitive_root;
use crate::params::RingParams;
use crate::ring::RingElement;

/// Resampling bound shared by every sampler in the crate.
pub const DEFAULT_MAX_ATTEMPTS: usize = 256;
/// Default degree bound for `H(M)` polynomials.
pub const DEFAULT_MAX_DEGREE: usize = 8;
/// Guard for exhaustive enumerations.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

/// Degree bound and retry budget used when sampling commuting elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingConfig {
    pub max_degree: usize,
    pub max_attempts: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            max_degree: DEFAULT_MAX_DEGREE,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

/// Compact form of an element of `Z(E_p^(m))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CentralElement {
    params: RingParams,
    digits: Vec<BigUint>,
}

impl CentralElement {
    pub fn new(params: &RingParams, digits: Vec<BigUint>) -> Result<Self> {
        if digits.len() != params.m() {
            return Err(Error::BadParameter(format!(
                "expected {} digits, found {}",
                params.m(),
                digits.len()
            )));
        }
        if digits.iter().any(|d| d >= params.p()) {
            return Err(Error::BadParameter("central digit out of range".into()));
        }
        Ok(CentralElement {
            params: params.clone(),
            digits,
        })
    }

    pub fn from_u64_digits(params: &RingParams, digits: &[u64]) -> Result<Self> {
        Self::new(params, digits.iter().map(|&d| BigUint::from(d)).collect())
    }

    /// Digits of the `p`-adic expansion of `value`, truncated to `m` places.
    pub fn from_value(params: &RingParams, value: &BigUint) -> Self {
        let mut v = value % params.p_pow(params.m());
        let digits = (0..params.m())
            .map(|_| {
                let (q, r) = v.div_rem(params.p());
                v = q;
                r
            })
            .collect();
        CentralElement {
            params: params.clone(),
            digits,
        }
    }

    pub fn params(&self) -> &RingParams {
        &self.params
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    /// `sum u_j p^j` over all `m` digits, an element of `Z_{p^m}`.
    pub fn value(&self) -> BigUint {
        self.digits
            .iter()
            .enumerate()
            .fold(BigUint::zero(), |acc, (j, u)| {
                acc + u * self.params.p_pow(j)
            })
    }

    /// Invertible exactly when the lowest digit is nonzero.
    pub fn is_invertible(&self) -> bool {
        !self.digits[0].is_zero()
    }

    pub fn expand(&self) -> RingElement {
        let p = &self.params;
        let mut diagonal = Vec::with_capacity(p.m());
        let mut acc = BigUint::zero();
        for (j, u) in self.digits.iter().enumerate() {
            acc += u * p.p_pow(j);
            diagonal.push(BigInt::from(acc.clone()));
        }
        RingElement::diag(p, &diagonal).expect("central expansion is a valid element")
    }

    /// Recovers the digits of a central element, or `None` if `a` is not central.
    pub fn from_element(a: &RingElement) -> Option<Self> {
        if !is_central(a) {
            return None;
        }
        let params = a.params();
        let last = a.get(params.m() - 1, params.m() - 1);
        Some(Self::from_value(params, last))
    }

    /// Uniform digits; with `require_invertible`, `u_0` is drawn from `1..p`.
    pub fn sample<R: RngCore + ?Sized>(
        params: &RingParams,
        rng: &mut R,
        require_invertible: bool,
    ) -> Self {
        let p = params.p();
        let digits = (0..params.m())
            .map(|j| {
                if j == 0 && require_invertible {
                    rng.gen_biguint_range(&BigUint::one(), p)
                } else {
                    rng.gen_biguint_below(p)
                }
            })
            .collect();
        CentralElement {
            params: params.clone(),
            digits,
        }
    }

    /// Every central element, in increasing order of `value()`.
    pub fn enumerate(params: &RingParams) -> Result<Vec<Self>> {
        let size = params.center_size();
        if *size > BigUint::from(ENUMERATION_LIMIT) {
            return Err(Error::TooLarge(format!("center has {size} elements")));
        }
        let mut out = Vec::new();
        let mut v = BigUint::zero();
        while &v < size {
            out.push(Self::from_value(params, &v));
            v += 1u32;
        }
        Ok(out)
    }
}

/// True iff `a` is diagonal and each diagonal entry truncates the next one.
pub fn is_central(a: &RingElement) -> bool {
    if !a.is_diagonal() {
        return false;
    }
    let params = a.params();
    (1..params.m()).all(|i| a.get(i, i) % params.p_pow(i) == *a.get(i - 1, i - 1))
}

/// `C_0 + C_1 M + ... + C_k M^k` with central coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolynomial {
    base: RingElement,
    coeffs: Vec<CentralElement>,
}

impl HPolynomial {
    pub fn new(base: &RingElement, coeffs: Vec<CentralElement>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::BadParameter(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if coeffs.iter().any(|c| c.params() != base.params()) {
            return Err(Error::ParamsMismatch);
        }
        Ok(HPolynomial {
            base: base.clone(),
            coeffs,
        })
    }

    pub fn base(&self) -> &RingElement {
        &self.base
    }

    pub fn coeffs(&self) -> &[CentralElement] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation; valid because the coefficients are central.
    pub fn evaluate(&self) -> RingElement {
        let mut iter = self.coeffs.iter().rev();
        let mut acc = iter.next().expect("nonempty").expand();
        for c in iter {
            acc = acc
                .mul(&self.base)
                .and_then(|t| t.add(&c.expand()))
                .expect("same ring");
        }
        acc
    }
}

/// Random polynomial of degree `k` uniform in `[1, max_degree]` with uniform
/// central coefficients, together with its value. The value always commutes
/// with `m_base`; this is checked.
pub fn h_poly_sample<R: RngCore + ?Sized>(
    m_base: &RingElement,
    max_degree: usize,
    rng: &mut R,
) -> Result<(HPolynomial, RingElement)> {
    if max_degree < 1 {
        return Err(Error::BadParameter("max_degree must be at least 1".into()));
    }
    let params = m_base.params();
    let k = rng.gen_range(1..=max_degree);
    let coeffs = (0..=k)
        .map(|_| CentralElement::sample(params, rng, false))
        .collect();
    let poly = HPolynomial::new(m_base, coeffs)?;
    let g = poly.evaluate();
    if !g.commutes(m_base)? {
        return Err(Error::InternalVerificationFailure(
            "H(M) sample does not commute with M".into(),
        ));
    }
    Ok((poly, g))
}

/// Resamples `H(M)` until the value is not central.
pub fn sample_noncentral_commutant<R: RngCore + ?Sized>(
    m_base: &RingElement,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<(HPolynomial, RingElement)> {
    for _ in 0..cfg.max_attempts {
        let (poly, g) = h_poly_sample(m_base, cfg.max_degree, rng)?;
        if !is_central(&g) {
            return Ok((poly, g));
        }
    }
    Err(Error::ExhaustedRetries(cfg.max_attempts))
}

fn check_coprime(params: &RingParams, x: &BigInt) -> Result<BigInt> {
    let top = BigInt::from(params.p_pow(params.m()).clone());
    let x = x.mod_floor(&top);
    let p = BigInt::from(params.p().clone());
    if x.mod_floor(&p).is_zero() {
        return Err(Error::BadParameter(format!("x = {x} is not coprime to p")));
    }
    Ok(x)
}

/// The element whose only nonzero entry is `x` at `(m, m)`.
pub fn make_corner_m(params: &RingParams, x: &BigInt) -> Result<RingElement> {
    let x = check_coprime(params, x)?;
    let m = params.m();
    let mut raw = vec![vec![BigInt::zero(); m]; m];
    raw[m - 1][m - 1] = x;
    RingElement::new(params, &raw)
}

/// `x` at `(m, m)` and `y p^(m-1)` at `(m, 1)`, where `y` has order `p - 1`
/// modulo `p`.
pub fn make_two_entry_m(params: &RingParams, x: &BigInt, y: &BigInt) -> Result<RingElement> {
    let x = check_coprime(params, x)?;
    if params.m() < 2 {
        return Err(Error::BadParameter(
            "two-entry construction needs m >= 2".into(),
        ));
    }
    let p = BigInt::from(params.p().clone());
    let y = y.mod_floor(&p);
    let y_u = y.to_biguint().expect("reduced");
    match is_primitive_root(&y_u, params.p()) {
        Some(true) => {}
        Some(false) => {
            return Err(Error::BadParameter(format!(
                "y = {y} does not have order p - 1"
            )))
        }
        None => return Err(Error::BadParameter("cannot factor p - 1".into())),
    }
    let m = params.m();
    let mut raw = vec![vec![BigInt::zero(); m]; m];
    raw[m - 1][m - 1] = x;
    raw[m - 1][0] = y * BigInt::from(params.p_pow(m - 1).clone());
    RingElement::new(params, &raw)
}

/// Uniform `x` in `Z_{p^m}` coprime to `p`.
pub fn random_coprime<R: RngCore + ?Sized>(params: &RingParams, rng: &mut R) -> BigUint {
    loop {
        let x = rng.gen_biguint_below(params.p_pow(params.m()));
        if !(&x % params.p()).is_zero() {
            return x;
        }
    }
}

/// Random `y` of order `p - 1` modulo `p` (`y = 1` for `p = 2`).
pub fn random_primitive_root<R: RngCore + ?Sized>(
    params: &RingParams,
    rng: &mut R,
) -> Result<BigUint> {
    let p = params.p();
    if *p == BigUint::from(2u32) {
        return Ok(BigUint::one());
    }
    for _ in 0..DEFAULT_MAX_ATTEMPTS {
        let y = rng.gen_biguint_range(&BigUint::one(), p);
        match is_primitive_root(&y, p) {
            Some(true) => return Ok(y),
            Some(false) => continue,
            None => return Err(Error::BadParameter("cannot factor p - 1".into())),
        }
    }
    Err(Error::ExhaustedRetries(DEFAULT_MAX_ATTEMPTS))
}

/// Default public base: the two-entry construction with random coprime `x`
/// and random primitive `y` when `p > 2`, the corner construction otherwise.
pub fn default_base<R: RngCore + ?Sized>(params: &RingParams, rng: &mut R) -> Result<RingElement> {
    params.require_protocol_size()?;
    let x = BigInt::from(random_coprime(params, rng));
    if *params.p() > BigUint::from(2u32) {
        let y = BigInt::from(random_primitive_root(params, rng)?);
        make_two_entry_m(params, &x, &y)
    } else {
        make_corner_m(params, &x)
    }
}

/// Exact number of distinct values `sum_{i<=d} C_i M^i` over all central
/// coefficient tuples, for small parameters.
pub fn count_distinct_g(m_base: &RingElement, degree_bound: usize) -> Result<u64> {
    let params = m_base.params();
    let center = CentralElement::enumerate(params)?;
    let n = center.len() as u64;
    let tuples = u32::try_from(degree_bound + 1)
        .ok()
        .and_then(|e| n.checked_pow(e))
        .filter(|&t| t <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::TooLarge(format!("{n}^{} coefficient tuples", degree_bound + 1)))?;
    let center_elems: Vec<RingElement> = center.iter().map(CentralElement::expand).collect();
    // terms[i][c] = C_c * M^i
    let terms: Vec<Vec<RingElement>> = (0..=degree_bound)
        .map(|i| {
            let mp = m_base.pow_u64(i as u64);
            center_elems
                .iter()
                .map(|c| c.mul(&mp).expect("same ring"))
                .collect()
        })
        .collect();
    let mut seen = HashSet::new();
    let mut idx = vec![0usize; degree_bound + 1];
    for _ in 0..tuples {
        let mut g = RingElement::zero(params);
        for (i, &c) in idx.iter().enumerate() {
            g = g.add(&terms[i][c])?;
        }
        seen.insert(g);
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < center_elems.len() {
                break;
            }
            *slot = 0;
        }
    }
    Ok(seen.len() as u64)
}
