//! Exhaustive ground truth for small parameters.
//!
//! Nothing here calls the closed-form characterizations it is meant to
//! check: units are found by pairing, the center by commuting against every
//! element, and enumeration walks the raw entry ranges directly.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::action::{act, ActionVector};
use crate::center::{CentralElement, ENUMERATION_LIMIT};
use crate::error::{Error, Result};
use crate::params::RingParams;
use crate::ring::RingElement;

/// Pairwise searches are quadratic in the ring size.
pub const PAIRWISE_LIMIT: u64 = 1 << 12;

fn ring_size(params: &RingParams, limit: u64) -> Result<u64> {
    params
        .cardinality()
        .to_u64()
        .filter(|&n| n <= limit)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "|E| = p^{} exceeds the enumeration limit {limit}",
                params.cardinality_exponent()
            ))
        })
}

/// Walks every element of `E_p^(m)` exactly once, in odometer order over the
/// row-major entries with the last entry varying fastest.
pub struct RingEnumerator {
    params: RingParams,
    // (number of values, step) per entry; entry value = counter * step
    ranges: Vec<(u64, u64)>,
    counters: Vec<u64>,
    done: bool,
}

pub fn enumerate_ring(params: &RingParams) -> Result<RingEnumerator> {
    ring_size(params, ENUMERATION_LIMIT)?;
    let p = params.p().to_u64().expect("guarded");
    let m = params.m();
    let mut ranges = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            if i <= j {
                ranges.push((p.pow(i as u32 + 1), 1));
            } else {
                ranges.push((p.pow(j as u32 + 1), p.pow((i - j) as u32)));
            }
        }
    }
    Ok(RingEnumerator {
        params: params.clone(),
        counters: vec![0; ranges.len()],
        ranges,
        done: false,
    })
}

impl Iterator for RingEnumerator {
    type Item = RingElement;

    fn next(&mut self) -> Option<RingElement> {
        if self.done {
            return None;
        }
        let entries = self
            .counters
            .iter()
            .zip(&self.ranges)
            .map(|(&c, &(_, step))| BigUint::from(c * step))
            .collect();
        let elem = RingElement::from_canonical(&self.params, entries)
            .expect("enumerated entries are canonical");
        let mut k = self.counters.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.counters[k] += 1;
            if self.counters[k] < self.ranges[k].0 {
                break;
            }
            self.counters[k] = 0;
        }
        Some(elem)
    }
}

/// Elements with a two-sided inverse, found by trying every partner.
pub fn brute_force_units(params: &RingParams) -> Result<Vec<RingElement>> {
    ring_size(params, PAIRWISE_LIMIT)?;
    let all: Vec<RingElement> = enumerate_ring(params)?.collect();
    let one = RingElement::identity(params);
    let mut units = Vec::new();
    for a in &all {
        for b in &all {
            if a.mul(b)? == one && b.mul(a)? == one {
                units.push(a.clone());
                break;
            }
        }
    }
    Ok(units)
}

/// Elements commuting with every element of the ring.
pub fn brute_force_center(params: &RingParams) -> Result<Vec<RingElement>> {
    ring_size(params, PAIRWISE_LIMIT)?;
    let all: Vec<RingElement> = enumerate_ring(params)?.collect();
    let mut center = Vec::new();
    'outer: for a in &all {
        for b in &all {
            if a.mul(b)? != b.mul(a)? {
                continue 'outer;
            }
        }
        center.push(a.clone());
    }
    Ok(center)
}

/// Every central `A` with `A . R = T`, ordered by value.
pub fn brute_force_central_sap(r: &ActionVector, t: &ActionVector) -> Result<Vec<CentralElement>> {
    if r.params() != t.params() {
        return Err(Error::ParamsMismatch);
    }
    let mut hits = Vec::new();
    for c in CentralElement::enumerate(r.params())? {
        if act(&c.expand(), r)? == *t {
            hits.push(c);
        }
    }
    Ok(hits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyRow {
    pub quantity: &'static str,
    pub formula: BigUint,
    /// `None` when the ring is too large for this oracle.
    pub enumerated: Option<BigUint>,
}

impl VerifyRow {
    pub fn matches(&self) -> Option<bool> {
        self.enumerated.as_ref().map(|e| *e == self.formula)
    }
}

/// Closed-form counts next to their enumerated values.
pub fn verify_params(params: &RingParams) -> Vec<VerifyRow> {
    let count = |n: usize| Some(BigUint::from(n));
    let enumerated_ring = enumerate_ring(params).ok().and_then(|it| count(it.count()));
    let units = brute_force_units(params).ok().and_then(|u| count(u.len()));
    let center = brute_force_center(params).ok().and_then(|c| count(c.len()));
    vec![
        VerifyRow {
            quantity: "cardinality",
            formula: params.cardinality(),
            enumerated: enumerated_ring,
        },
        VerifyRow {
            quantity: "units",
            formula: params.unit_count(),
            enumerated: units,
        },
        VerifyRow {
            quantity: "center",
            formula: params.center_size().clone(),
            enumerated: center,
        },
    ]
}

/// `(p - 1)^m / p^m` as an unreduced numerator/denominator pair.
pub fn unit_fraction(params: &RingParams) -> (BigUint, BigUint) {
    let p = params.p();
    let m = params.m() as u32;
    ((p - BigUint::one()).pow(m), p.pow(m))
}
