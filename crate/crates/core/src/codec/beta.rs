//! The injective map from ring elements to fixed-length bit strings.
//!
//! Entries are visited in row-major order and each contributes its free
//! part in a fixed width: on or above the diagonal the residue `a_ij` in
//! `ceil(i log2 p)` bits, below it the cofactor `a_ij / p^(i-j)` in
//! `ceil(j log2 p)` bits (1-based indices). Fields are written most
//! significant bit first. The total length depends only on `(p, m)`.

use num_bigint::BigUint;
use num_traits::Zero;

use super::bits::BitString;
use crate::error::{Error, Result};
use crate::numtheory::width_bits;
use crate::params::RingParams;
use crate::ring::RingElement;

/// One entry's free part: values range over `[0, radix)` and the stored
/// entry is `value * p^shift`.
#[derive(Debug, Clone)]
pub(crate) struct Slot {
    pub radix: BigUint,
    pub shift: usize,
}

pub(crate) fn element_slots(params: &RingParams) -> Vec<Slot> {
    let m = params.m();
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            out.push(if i <= j {
                Slot {
                    radix: params.row_modulus(i).clone(),
                    shift: 0,
                }
            } else {
                Slot {
                    radix: params.row_modulus(j).clone(),
                    shift: i - j,
                }
            });
        }
    }
    out
}

/// Bit length `t` of every encoding for these parameters.
pub fn beta_len(params: &RingParams) -> usize {
    element_slots(params)
        .iter()
        .map(|s| width_bits(&s.radix))
        .sum()
}

pub fn beta_encode(a: &RingElement) -> BitString {
    let params = a.params();
    let mut out = BitString::default();
    for (slot, v) in element_slots(params).iter().zip(a.entries()) {
        let digit = v / params.p_pow(slot.shift);
        let width = width_bits(&slot.radix);
        for b in (0..width).rev() {
            out.push(digit.bit(b as u64));
        }
    }
    out
}

pub fn beta_decode(params: &RingParams, bits: &BitString) -> Result<RingElement> {
    let t = beta_len(params);
    if bits.len() != t {
        return Err(Error::MalformedBits(format!(
            "expected {t} bits, found {}",
            bits.len()
        )));
    }
    let mut pos = 0;
    let mut entries = Vec::with_capacity(params.m() * params.m());
    for slot in element_slots(params) {
        let width = width_bits(&slot.radix);
        let mut digit = BigUint::zero();
        for _ in 0..width {
            digit <<= 1;
            if bits.get(pos) {
                digit |= BigUint::from(1u32);
            }
            pos += 1;
        }
        if digit >= slot.radix {
            return Err(Error::MalformedBits(format!(
                "field at bit {} out of range",
                pos - width
            )));
        }
        entries.push(digit * params.p_pow(slot.shift));
    }
    RingElement::from_canonical(params, entries).map_err(|e| Error::MalformedBits(e.to_string()))
}
