//! Public-key encryption over the action of `E_p^(m)` on
//! `Z_p x ... x Z_{p^m}`.
//!
//! Alice publishes `(R, T = F . R)` for a secret `F` commuting with the
//! public base `M`. Bob encrypts `S` as `(G . R, S + G . T)` with a fresh
//! `G` from `H(M)`; Alice recovers `S = D - F . H` because `F` and `G`
//! commute.
//!
//! Key generation only emits keys whose components `r_j` are prime to `p`
//! and whose ratios `r_j^-1 t_j mod p` are not all equal; otherwise a central
//! solution of `A . R = T` exists and decrypts every ciphertext.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;

use crate::action::{act, ActionVector};
use crate::center::{is_central, sample_noncentral_commutant, HPolynomial, SamplingConfig};
use crate::error::{Error, Result};
use crate::params::RingParams;
use crate::ring::RingElement;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SapPublicKey {
    pub base: RingElement,
    pub r: ActionVector,
    pub t: ActionVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SapPrivateKey {
    pub f: RingElement,
    /// Polynomial in the base that produced `f`.
    pub poly: HPolynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SapCiphertext {
    pub h: ActionVector,
    pub d: ActionVector,
}

/// Outcome of checking a public key against the central-solution attack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SapValidation {
    /// Every `r_j` is prime to `p`.
    pub coprime: bool,
    /// First 0-based index `k` with `r_k^-1 t_k != r_0^-1 t_0 (mod p)`.
    pub differing_index: Option<usize>,
}

impl SapValidation {
    pub fn is_valid(&self) -> bool {
        self.coprime && self.differing_index.is_some()
    }
}

impl SapPublicKey {
    pub fn params(&self) -> &RingParams {
        self.base.params()
    }
}

impl SapPrivateKey {
    pub fn params(&self) -> &RingParams {
        self.f.params()
    }
}

/// `r^-1 t mod p` for `r` prime to `p`.
pub(crate) fn ratio_mod_p(r: &BigUint, t: &BigUint, p: &BigUint) -> Option<BigUint> {
    let inv = (r % p).modinv(p)?;
    Some(inv * (t % p) % p)
}

pub fn sap_validate_key(key: &SapPublicKey) -> SapValidation {
    let p = key.params().p();
    let coprime = key.r.components().iter().all(|r| !(r % p).is_zero());
    if !coprime {
        return SapValidation {
            coprime,
            differing_index: None,
        };
    }
    let ratios: Vec<BigUint> = key
        .r
        .components()
        .iter()
        .zip(key.t.components())
        .map(|(r, t)| ratio_mod_p(r, t, p).expect("coprime"))
        .collect();
    let differing_index = ratios.iter().position(|q| *q != ratios[0]);
    SapValidation {
        coprime,
        differing_index,
    }
}

/// Draws `R` with unit components and a non-central `F` from `H(M)` until
/// the public key passes validation.
pub fn sap_keygen<R: RngCore + ?Sized>(
    base: &RingElement,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<(SapPublicKey, SapPrivateKey)> {
    let params = base.params();
    params.require_protocol_size()?;
    if is_central(base) {
        return Err(Error::BadParameter(
            "public base must not be central".into(),
        ));
    }
    for _ in 0..cfg.max_attempts {
        let r = ActionVector::random_units(params, rng);
        let (poly, f) = sample_noncentral_commutant(base, cfg, rng)?;
        let t = act(&f, &r)?;
        let public = SapPublicKey {
            base: base.clone(),
            r,
            t,
        };
        if sap_validate_key(&public).is_valid() {
            return Ok((public, SapPrivateKey { f, poly }));
        }
    }
    Err(Error::ExhaustedRetries(cfg.max_attempts))
}

/// Encrypts with a fresh non-central `G` from `H(M)`.
pub fn sap_encrypt<R: RngCore + ?Sized>(
    key: &SapPublicKey,
    message: &ActionVector,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<SapCiphertext> {
    if !sap_validate_key(key).is_valid() {
        return Err(Error::InvalidKey(
            "public key admits a central solution".into(),
        ));
    }
    let (_, g) = sample_noncentral_commutant(&key.base, cfg, rng)?;
    sap_encrypt_with(key, message, &g)
}

/// Deterministic encryption core: `(G . R, S + G . T)`. Performs no key or
/// `G` checks.
pub fn sap_encrypt_with(
    key: &SapPublicKey,
    message: &ActionVector,
    g: &RingElement,
) -> Result<SapCiphertext> {
    let h = act(g, &key.r)?;
    let d = message.add(&act(g, &key.t)?)?;
    Ok(SapCiphertext { h, d })
}

/// `D - F . H`.
pub fn sap_decrypt(key: &SapPrivateKey, ct: &SapCiphertext) -> Result<ActionVector> {
    ct.d.sub(&act(&key.f, &ct.h)?)
}
