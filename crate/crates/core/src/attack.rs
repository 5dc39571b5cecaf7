//! Adversaries against the protocols: central solutions of the SAP and the
//! DP by `p`-adic digit lifting, message recovery built on them, the
//! DHDP-oracle reduction for the encryption scheme, and an exhaustive
//! commuting-unit search.
//!
//! Every `Recovered` outcome has been re-verified against the public data
//! before it is returned.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;

use crate::action::{act, ActionVector};
use crate::center::{CentralElement, ENUMERATION_LIMIT};
use crate::dp::{EgdpCiphertextAdd, EgdpPublicKey};
use crate::error::{Error, Result};
use crate::numtheory::valuation;
use crate::params::RingParams;
use crate::ring::RingElement;
use crate::sap::{SapCiphertext, SapPublicKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackStatus {
    Recovered,
    NoCentralSolution,
    NotFound,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Central solution `A` of `A . R = T` (or `A X = P`).
    Central(CentralElement),
    /// Central `M_c` with `M_c X = P`, rewritten as the decomposition
    /// `P = left * X * right` with `left = M_c H^-1`, `right = H`.
    Decomposition {
        central: CentralElement,
        left: RingElement,
        right: RingElement,
    },
    /// Central `w1`, invertible central `w2` with `F w2 = w1 X`.
    CommutingPair {
        w1: CentralElement,
        w2: CentralElement,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackOutcome<T> {
    pub status: AttackStatus,
    pub recovered: Option<T>,
    pub witness: Option<Witness>,
}

impl<T> AttackOutcome<T> {
    fn recovered(value: T, witness: Witness) -> Self {
        AttackOutcome {
            status: AttackStatus::Recovered,
            recovered: Some(value),
            witness: Some(witness),
        }
    }

    fn failed(status: AttackStatus) -> Self {
        AttackOutcome {
            status,
            recovered: None,
            witness: None,
        }
    }

    pub fn is_recovered(&self) -> bool {
        self.status == AttackStatus::Recovered
    }
}

/// Constraints `a = c (mod p^L)` on the digit string of a central element.
///
/// Each equation `a * r = t (mod p^e)` contributes one: with `v = v_p(r)`,
/// either `v >= e` (then `t` must vanish and `a` is unconstrained) or
/// `p^v | t` and `a = (t / p^v) (r / p^v)^-1 (mod p^(e-v))`. When every
/// coefficient is a unit this is exactly digit-by-digit lifting.
struct DigitLifter<'a> {
    params: &'a RingParams,
    value: BigUint,
    precision: usize,
    consistent: bool,
}

impl<'a> DigitLifter<'a> {
    fn new(params: &'a RingParams) -> Self {
        DigitLifter {
            params,
            value: BigUint::zero(),
            precision: 0,
            consistent: true,
        }
    }

    fn constrain(&mut self, r: &BigUint, t: &BigUint, e: usize) {
        if !self.consistent {
            return;
        }
        let p = self.params.p();
        let modulus = self.params.p_pow(e);
        let r = r % modulus;
        let t = t % modulus;
        let v = valuation(&r, p, e as u32) as usize;
        if v >= e {
            self.consistent = t.is_zero();
            return;
        }
        let pv = self.params.p_pow(v);
        if !(&t % pv).is_zero() {
            self.consistent = false;
            return;
        }
        let precision = e - v;
        let target_mod = self.params.p_pow(precision);
        let unit = (&r / pv) % target_mod;
        let inv = unit
            .modinv(target_mod)
            .expect("unit after removing p-power");
        let c = (&t / pv) * inv % target_mod;
        let common = self.params.p_pow(precision.min(self.precision));
        if &c % common != &self.value % common {
            self.consistent = false;
            return;
        }
        if precision > self.precision {
            self.value = c;
            self.precision = precision;
        }
    }

    /// Lowest-digit solution (unconstrained digits set to zero).
    fn solution(&self) -> Option<CentralElement> {
        self.consistent
            .then(|| CentralElement::from_value(self.params, &self.value))
    }
}

/// Central `A` with `A . R = T`, found by lifting `A`'s `p`-adic digits one
/// component at a time. Not applicable when `p | r_0`.
pub fn solve_central_sap(r: &ActionVector, t: &ActionVector) -> AttackOutcome<CentralElement> {
    let params = r.params();
    if params != t.params() {
        return AttackOutcome::failed(AttackStatus::NotApplicable);
    }
    if (r.get(0) % params.p()).is_zero() {
        return AttackOutcome::failed(AttackStatus::NotApplicable);
    }
    let mut lifter = DigitLifter::new(params);
    for i in 0..params.m() {
        lifter.constrain(r.get(i), t.get(i), i + 1);
    }
    match lifter.solution() {
        Some(a) if act(&a.expand(), r).ok().as_ref() == Some(t) => {
            AttackOutcome::recovered(a.clone(), Witness::Central(a))
        }
        Some(_) => AttackOutcome::failed(AttackStatus::NoCentralSolution),
        None => AttackOutcome::failed(AttackStatus::NoCentralSolution),
    }
}

/// Decrypts using a central solution `A` of the public SAP: since `A`
/// commutes with every `G`, `D - A . H = S`.
pub fn attack_sap(key: &SapPublicKey, ct: &SapCiphertext) -> AttackOutcome<ActionVector> {
    let solved = solve_central_sap(&key.r, &key.t);
    let Some(a) = solved.recovered else {
        return AttackOutcome::failed(solved.status);
    };
    let plain = act(&a.expand(), &ct.h).and_then(|ah| ct.d.sub(&ah));
    match plain {
        Ok(s) => AttackOutcome::recovered(s, Witness::Central(a)),
        Err(_) => AttackOutcome::failed(AttackStatus::NotApplicable),
    }
}

/// Central `M_c` with `M_c X = P`, via the same lifting applied to every
/// entry `(i, k)`: `(M_c)_ii X_ik = P_ik (mod p^i)`. On success the witness
/// also carries the decomposition `P = (M_c H^-1) X H` for a random
/// invertible central `H`.
pub fn solve_central_dp<R: RngCore + ?Sized>(
    x: &RingElement,
    p_elem: &RingElement,
    rng: &mut R,
) -> AttackOutcome<RingElement> {
    let params = x.params();
    if params != p_elem.params() {
        return AttackOutcome::failed(AttackStatus::NotApplicable);
    }
    let m = params.m();
    let mut lifter = DigitLifter::new(params);
    for i in 0..m {
        for k in 0..m {
            lifter.constrain(x.get(i, k), p_elem.get(i, k), i + 1);
        }
    }
    let Some(central) = lifter.solution() else {
        return AttackOutcome::failed(AttackStatus::NoCentralSolution);
    };
    let mc = central.expand();
    if mc.mul(x).ok().as_ref() != Some(p_elem) {
        return AttackOutcome::failed(AttackStatus::NoCentralSolution);
    }
    let h = CentralElement::sample(params, rng, true).expand();
    let decomposition = h
        .inverse()
        .and_then(|h_inv| mc.mul(&h_inv))
        .and_then(|left| {
            let check = left.mul(x)?.mul(&h)?;
            Ok((left, check))
        });
    match decomposition {
        Ok((left, check)) if &check == p_elem => AttackOutcome::recovered(
            mc,
            Witness::Decomposition {
                central,
                left,
                right: h,
            },
        ),
        _ => AttackOutcome::failed(AttackStatus::NoCentralSolution),
    }
}

/// Decrypts an additive ciphertext when the public key has a central
/// solution `M_c X = P`: then `M_c F = B1 P B2` is the mask.
pub fn attack_egdp_via_central<R: RngCore + ?Sized>(
    key: &EgdpPublicKey,
    ct: &EgdpCiphertextAdd,
    rng: &mut R,
) -> AttackOutcome<RingElement> {
    let solved = solve_central_dp(&key.x, &key.p_elem, rng);
    let (Some(mc), Some(witness)) = (solved.recovered, solved.witness) else {
        return AttackOutcome::failed(solved.status);
    };
    match mc.mul(&ct.f).and_then(|mask| ct.d.sub(&mask)) {
        Ok(s) => AttackOutcome::recovered(s, witness),
        Err(_) => AttackOutcome::failed(AttackStatus::NotApplicable),
    }
}

/// Shared secret of an observed key exchange when `G_A = M_c X` for a
/// central `M_c`: the secret is `M_c G_B`.
pub fn attack_dhdp_via_central<R: RngCore + ?Sized>(
    x: &RingElement,
    g_a: &RingElement,
    g_b: &RingElement,
    rng: &mut R,
) -> AttackOutcome<RingElement> {
    let solved = solve_central_dp(x, g_a, rng);
    let (Some(mc), Some(witness)) = (solved.recovered, solved.witness) else {
        return AttackOutcome::failed(solved.status);
    };
    match mc.mul(g_b) {
        Ok(shared) => AttackOutcome::recovered(shared, witness),
        Err(_) => AttackOutcome::failed(AttackStatus::NotApplicable),
    }
}

/// Guard on the size of the center searched by the unit attack.
pub const UNIT_ATTACK_CENTER_LIMIT: u64 = 1 << 20;

/// Exhaustive search over central `w1` and invertible central `w2` with
/// `F w2 = w1 X`. A hit yields the mask `A1 F A2 = w1 P w2^-1`.
///
/// `search_bound` caps the number of `(w1, w2)` pairs the search may cover.
pub fn brute_force_unit_attack(
    key: &EgdpPublicKey,
    ct: &EgdpCiphertextAdd,
    search_bound: u64,
) -> Result<AttackOutcome<RingElement>> {
    let params = key.params();
    let size = params.center_size();
    if *size > BigUint::from(UNIT_ATTACK_CENTER_LIMIT) {
        return Err(Error::TooLarge(format!("center has {size} elements")));
    }
    let n = crate::numtheory::to_u64_saturating(size);
    if n.saturating_mul(n) > search_bound.min(ENUMERATION_LIMIT.saturating_mul(ENUMERATION_LIMIT)) {
        return Err(Error::TooLarge(format!(
            "{n}^2 candidate pairs exceed the search bound {search_bound}"
        )));
    }
    let center = CentralElement::enumerate(params)?;
    // first w1 (in enumeration order) for every value of w1 X
    let mut by_product: HashMap<RingElement, &CentralElement> = HashMap::new();
    for w1 in &center {
        by_product.entry(w1.expand().mul(&key.x)?).or_insert(w1);
    }
    for w2 in center.iter().filter(|c| c.is_invertible()) {
        let w2e = w2.expand();
        let target = ct.f.mul(&w2e)?;
        let Some(&w1) = by_product.get(&target) else {
            continue;
        };
        let mask = w1.expand().mul(&key.p_elem)?.mul(&w2e.inverse()?)?;
        let plain = ct.d.sub(&mask)?;
        return Ok(AttackOutcome::recovered(
            plain,
            Witness::CommutingPair {
                w1: w1.clone(),
                w2: w2.clone(),
            },
        ));
    }
    Ok(AttackOutcome::failed(AttackStatus::NotFound))
}

/// Decrypts an additive ciphertext given any procedure that solves DHDP
/// instances `(X, A1 X A2, B1 X B2) -> B1 A1 X A2 B2`.
pub fn egdp_break_from_dhdp_oracle<O>(
    key: &EgdpPublicKey,
    ct: &EgdpCiphertextAdd,
    mut oracle: O,
) -> Result<RingElement>
where
    O: FnMut(&RingElement, &RingElement, &RingElement) -> Result<RingElement>,
{
    let shared = oracle(&key.x, &key.p_elem, &ct.f)?;
    ct.d.sub(&shared)
}
