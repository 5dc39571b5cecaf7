//! Key exchange and ElGamal-style encryption over the decomposition problem.
//!
//! Both parties draw their secrets from `H(M)`, so Alice's pair commutes
//! with Bob's. The exchange publishes `A1 X A2` and `B1 X B2` and both sides
//! arrive at `A1 B1 X B2 A2`. The encryption scheme publishes
//! `(X, P = A1 X A2)`; a sender masks the plaintext with `B1 P B2` and
//! sends `F = B1 X B2`, from which the receiver rebuilds the mask as
//! `A1 F A2`.
//!
//! The additive variant masks a ring element with ring addition. The xor
//! variant masks a raw `t`-bit string with the β encoding of the mask.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;

use crate::center::{h_poly_sample, is_central, HPolynomial, SamplingConfig};
use crate::codec::beta::{beta_encode, beta_len};
use crate::codec::bits::BitString;
use crate::error::{Error, Result};
use crate::params::RingParams;
use crate::ring::RingElement;
use crate::sap::ratio_mod_p;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Alice,
    Bob,
}

/// One party's state in the key exchange. Created by [`dhdp_init`] or
/// [`DhdpSession::with_locals`], finished by [`DhdpSession::complete`].
#[derive(Debug, Clone)]
pub struct DhdpSession {
    x: RingElement,
    base: RingElement,
    role: Role,
    local1: RingElement,
    local2: RingElement,
    outbound: RingElement,
    shared: Option<RingElement>,
}

fn check_locals(
    x: &RingElement,
    role: Role,
    local1: &RingElement,
    local2: &RingElement,
) -> Result<bool> {
    Ok(match role {
        Role::Alice => local1 != local2,
        Role::Bob => local1.mul(x)? != x.mul(local2)?,
    })
}

fn check_bases(x: &RingElement, base: &RingElement) -> Result<()> {
    if x.params() != base.params() {
        return Err(Error::ParamsMismatch);
    }
    x.params().require_protocol_size()?;
    if base.commutes(x)? {
        return Err(Error::BadBase);
    }
    Ok(())
}

impl DhdpSession {
    /// Session with caller-chosen secrets. The secrets must commute with the
    /// base and satisfy the role's inequality (`A1 != A2` for Alice,
    /// `B1 X != X B2` for Bob).
    pub fn with_locals(
        x: &RingElement,
        base: &RingElement,
        role: Role,
        local1: RingElement,
        local2: RingElement,
    ) -> Result<Self> {
        check_bases(x, base)?;
        if !local1.commutes(base)? || !local2.commutes(base)? {
            return Err(Error::BadParameter(
                "session secrets must commute with the base".into(),
            ));
        }
        if !check_locals(x, role, &local1, &local2)? {
            return Err(Error::BadParameter(format!(
                "secrets violate the {role:?} inequality"
            )));
        }
        let outbound = local1.mul(x)?.mul(&local2)?;
        Ok(DhdpSession {
            x: x.clone(),
            base: base.clone(),
            role,
            local1,
            local2,
            outbound,
            shared: None,
        })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn x(&self) -> &RingElement {
        &self.x
    }

    pub fn base(&self) -> &RingElement {
        &self.base
    }

    pub fn locals(&self) -> (&RingElement, &RingElement) {
        (&self.local1, &self.local2)
    }

    /// The element sent to the peer.
    pub fn outbound(&self) -> &RingElement {
        &self.outbound
    }

    pub fn shared(&self) -> Option<&RingElement> {
        self.shared.as_ref()
    }

    /// `local1 * peer * local2`, stored as the shared secret.
    pub fn complete(&mut self, peer_outbound: &RingElement) -> Result<RingElement> {
        let shared = self.local1.mul(peer_outbound)?.mul(&self.local2)?;
        self.shared = Some(shared.clone());
        Ok(shared)
    }
}

/// Samples both secrets from `H(M)`, resampling until the role's inequality
/// holds.
pub fn dhdp_init<R: RngCore + ?Sized>(
    x: &RingElement,
    base: &RingElement,
    role: Role,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<DhdpSession> {
    check_bases(x, base)?;
    for _ in 0..cfg.max_attempts {
        let (_, l1) = h_poly_sample(base, cfg.max_degree, rng)?;
        let (_, l2) = h_poly_sample(base, cfg.max_degree, rng)?;
        if check_locals(x, role, &l1, &l2)? {
            return DhdpSession::with_locals(x, base, role, l1, l2);
        }
    }
    Err(Error::ExhaustedRetries(cfg.max_attempts))
}

/// Random element that does not commute with `base`.
pub fn sample_noncommuting<R: RngCore + ?Sized>(
    base: &RingElement,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<RingElement> {
    for _ in 0..cfg.max_attempts {
        let x = RingElement::random(base.params(), rng);
        if !x.commutes(base)? {
            return Ok(x);
        }
    }
    Err(Error::ExhaustedRetries(cfg.max_attempts))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgdpPublicKey {
    pub base: RingElement,
    pub x: RingElement,
    pub p_elem: RingElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgdpPrivateKey {
    pub a1: RingElement,
    pub a2: RingElement,
    pub poly1: HPolynomial,
    pub poly2: HPolynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgdpCiphertextAdd {
    pub f: RingElement,
    pub d: RingElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgdpCiphertextXor {
    pub f: RingElement,
    pub d: BitString,
}

impl EgdpPublicKey {
    pub fn params(&self) -> &RingParams {
        self.x.params()
    }
}

/// Columns of the public key that block the reduction to a central SAP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgdpValidation {
    /// 0-based columns whose entries in `X` are all prime to `p`.
    pub coprime_columns: Vec<usize>,
    /// Subset of `coprime_columns` whose ratios `X_jk^-1 P_jk mod p` are not
    /// all equal.
    pub qualifying_columns: Vec<usize>,
}

impl EgdpValidation {
    pub fn is_valid(&self) -> bool {
        !self.qualifying_columns.is_empty()
    }
}

pub fn egdp_validate_key(key: &EgdpPublicKey) -> EgdpValidation {
    let params = key.params();
    let p = params.p();
    let m = params.m();
    let mut coprime_columns = Vec::new();
    let mut qualifying_columns = Vec::new();
    for k in 0..m {
        if (0..m).any(|i| (key.x.get(i, k) % p).is_zero()) {
            continue;
        }
        coprime_columns.push(k);
        let ratios: Vec<BigUint> = (0..m)
            .map(|j| ratio_mod_p(key.x.get(j, k), key.p_elem.get(j, k), p).expect("coprime"))
            .collect();
        if ratios.iter().any(|q| *q != ratios[0]) {
            qualifying_columns.push(k);
        }
    }
    EgdpValidation {
        coprime_columns,
        qualifying_columns,
    }
}

fn random_x_with_unit_last_column<R: RngCore + ?Sized>(
    params: &RingParams,
    rng: &mut R,
) -> RingElement {
    // Only column m can have every entry prime to p when m >= 2, so the
    // validator's coprimality condition is sampled directly.
    let m = params.m();
    loop {
        let x = RingElement::random(params, rng);
        if (0..m).all(|i| !(x.get(i, m - 1) % params.p()).is_zero()) {
            return x;
        }
    }
}

/// Alice's key: `X` not commuting with the base nor with either secret, and
/// `P = A1 X A2` passing [`egdp_validate_key`].
pub fn egdp_keygen<R: RngCore + ?Sized>(
    base: &RingElement,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<(EgdpPublicKey, EgdpPrivateKey)> {
    let params = base.params();
    params.require_protocol_size()?;
    for _ in 0..cfg.max_attempts {
        let x = random_x_with_unit_last_column(params, rng);
        if is_central(&x) || x.commutes(base)? {
            continue;
        }
        let (poly1, a1) = h_poly_sample(base, cfg.max_degree, rng)?;
        let (poly2, a2) = h_poly_sample(base, cfg.max_degree, rng)?;
        if x.commutes(&a1)? || x.commutes(&a2)? {
            continue;
        }
        let p_elem = a1.mul(&x)?.mul(&a2)?;
        let public = EgdpPublicKey {
            base: base.clone(),
            x,
            p_elem,
        };
        if egdp_validate_key(&public).is_valid() {
            return Ok((
                public,
                EgdpPrivateKey {
                    a1,
                    a2,
                    poly1,
                    poly2,
                },
            ));
        }
    }
    Err(Error::ExhaustedRetries(cfg.max_attempts))
}

/// Bob's ephemeral pair from `H(M)`, each not commuting with `X`.
fn sample_ephemeral<R: RngCore + ?Sized>(
    key: &EgdpPublicKey,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<(RingElement, RingElement)> {
    if !egdp_validate_key(key).is_valid() {
        return Err(Error::InvalidKey(
            "no qualifying column in public key".into(),
        ));
    }
    let draw = |rng: &mut R| -> Result<RingElement> {
        for _ in 0..cfg.max_attempts {
            let (_, b) = h_poly_sample(&key.base, cfg.max_degree, rng)?;
            if !key.x.commutes(&b)? {
                return Ok(b);
            }
        }
        Err(Error::ExhaustedRetries(cfg.max_attempts))
    };
    let b1 = draw(rng)?;
    let b2 = draw(rng)?;
    Ok((b1, b2))
}

/// `(B1 X B2, S + B1 P B2)` for caller-chosen `B1`, `B2`; no checks.
pub fn egdp_encrypt_add_with(
    key: &EgdpPublicKey,
    message: &RingElement,
    b1: &RingElement,
    b2: &RingElement,
) -> Result<EgdpCiphertextAdd> {
    let f = b1.mul(&key.x)?.mul(b2)?;
    let mask = b1.mul(&key.p_elem)?.mul(b2)?;
    Ok(EgdpCiphertextAdd {
        f,
        d: message.add(&mask)?,
    })
}

pub fn egdp_encrypt_add<R: RngCore + ?Sized>(
    key: &EgdpPublicKey,
    message: &RingElement,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<EgdpCiphertextAdd> {
    let (b1, b2) = sample_ephemeral(key, cfg, rng)?;
    egdp_encrypt_add_with(key, message, &b1, &b2)
}

/// `D - A1 F A2`.
pub fn egdp_decrypt_add(key: &EgdpPrivateKey, ct: &EgdpCiphertextAdd) -> Result<RingElement> {
    let mask = key.a1.mul(&ct.f)?.mul(&key.a2)?;
    ct.d.sub(&mask)
}

/// Xor variant with caller-chosen `B1`, `B2`; the message must have exactly
/// `beta_len(params)` bits.
pub fn egdp_encrypt_xor_with(
    key: &EgdpPublicKey,
    message: &BitString,
    b1: &RingElement,
    b2: &RingElement,
) -> Result<EgdpCiphertextXor> {
    let t = beta_len(key.params());
    if message.len() != t {
        return Err(Error::LengthMismatch {
            expected: t,
            got: message.len(),
        });
    }
    let f = b1.mul(&key.x)?.mul(b2)?;
    let mask = b1.mul(&key.p_elem)?.mul(b2)?;
    Ok(EgdpCiphertextXor {
        f,
        d: message.xor(&beta_encode(&mask))?,
    })
}

pub fn egdp_encrypt_xor<R: RngCore + ?Sized>(
    key: &EgdpPublicKey,
    message: &BitString,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<EgdpCiphertextXor> {
    let t = beta_len(key.params());
    if message.len() != t {
        return Err(Error::LengthMismatch {
            expected: t,
            got: message.len(),
        });
    }
    let (b1, b2) = sample_ephemeral(key, cfg, rng)?;
    egdp_encrypt_xor_with(key, message, &b1, &b2)
}

pub fn egdp_decrypt_xor(key: &EgdpPrivateKey, ct: &EgdpCiphertextXor) -> Result<BitString> {
    let t = beta_len(key.a1.params());
    if ct.d.len() != t {
        return Err(Error::LengthMismatch {
            expected: t,
            got: ct.d.len(),
        });
    }
    let mask = key.a1.mul(&ct.f)?.mul(&key.a2)?;
    ct.d.xor(&beta_encode(&mask))
}
