//! Packing application byte strings into the two plaintext spaces.
//!
//! A byte string of length `n` is mapped to the integer
//! `256^0 + ... + 256^(n-1) + B`, where `B` is its big-endian value. This
//! bijective numbering carries the length implicitly, sends the empty string
//! to 0, and is then spread over the components by mixed-radix
//! decomposition: radix `p^i` for vector component `i`, and the entry free
//! parts in row-major order for ring elements (least significant first).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::beta::element_slots;
use crate::action::ActionVector;
use crate::error::{Error, Result};
use crate::params::RingParams;
use crate::ring::RingElement;

/// `256^0 + 256^1 + ... + 256^(len-1)`.
fn offset(len: usize) -> BigUint {
    let mut acc = BigUint::zero();
    let mut pw = BigUint::one();
    for _ in 0..len {
        acc += &pw;
        pw <<= 8;
    }
    acc
}

/// Largest `L` such that every byte string of length at most `L` numbers
/// below `space`.
fn capacity_for(space: &BigUint) -> usize {
    let mut len = 0;
    while offset(len + 2) <= *space {
        len += 1;
    }
    len
}

fn bytes_to_index(bytes: &[u8]) -> BigUint {
    offset(bytes.len()) + BigUint::from_bytes_be(bytes)
}

fn index_to_bytes(index: &BigUint, capacity: usize) -> Result<Vec<u8>> {
    if *index >= offset(capacity + 1) {
        return Err(Error::Malformed(
            "packed value exceeds message capacity".into(),
        ));
    }
    let mut len = 0;
    while offset(len + 1) <= *index {
        len += 1;
    }
    let value = index - offset(len);
    let raw = value.to_bytes_be();
    let mut out = vec![0u8; len];
    if !value.is_zero() {
        out[len - raw.len()..].copy_from_slice(&raw);
    }
    Ok(out)
}

fn vector_space(params: &RingParams) -> BigUint {
    (0..params.m()).fold(BigUint::one(), |acc, i| acc * params.row_modulus(i))
}

/// Maximum message length, in bytes, that fits one action vector.
pub fn vector_capacity(params: &RingParams) -> usize {
    capacity_for(&vector_space(params))
}

/// Maximum message length, in bytes, that fits one ring element.
pub fn element_capacity(params: &RingParams) -> usize {
    capacity_for(&params.cardinality())
}

pub fn pack_message_vector(bytes: &[u8], params: &RingParams) -> Result<ActionVector> {
    let capacity = vector_capacity(params);
    if bytes.len() > capacity {
        return Err(Error::MessageTooLong {
            len: bytes.len(),
            capacity,
        });
    }
    let mut rest = bytes_to_index(bytes);
    let comps = (0..params.m())
        .map(|i| {
            let (q, r) = rest.div_rem(params.row_modulus(i));
            rest = q;
            r
        })
        .collect();
    debug_assert!(rest.is_zero());
    ActionVector::from_canonical(params, comps)
}

pub fn unpack_message_vector(v: &ActionVector) -> Result<Vec<u8>> {
    let params = v.params();
    let mut index = BigUint::zero();
    for i in (0..params.m()).rev() {
        index = index * params.row_modulus(i) + v.get(i);
    }
    index_to_bytes(&index, vector_capacity(params))
}

pub fn pack_message_element(bytes: &[u8], params: &RingParams) -> Result<RingElement> {
    let capacity = element_capacity(params);
    if bytes.len() > capacity {
        return Err(Error::MessageTooLong {
            len: bytes.len(),
            capacity,
        });
    }
    let mut rest = bytes_to_index(bytes);
    let entries = element_slots(params)
        .into_iter()
        .map(|slot| {
            let (q, r) = rest.div_rem(&slot.radix);
            rest = q;
            r * params.p_pow(slot.shift)
        })
        .collect();
    debug_assert!(rest.is_zero());
    RingElement::from_canonical(params, entries)
}

pub fn unpack_message_element(a: &RingElement) -> Result<Vec<u8>> {
    let params = a.params();
    let slots = element_slots(params);
    let mut index = BigUint::zero();
    for (slot, v) in slots.iter().zip(a.entries()).rev() {
        index = index * &slot.radix + v / params.p_pow(slot.shift);
    }
    index_to_bytes(&index, element_capacity(params))
}
