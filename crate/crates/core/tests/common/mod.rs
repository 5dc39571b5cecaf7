#![allow(dead_code)]

use std::path::PathBuf;

use epm_core::action::ActionVector;
use epm_core::center::{default_base, make_corner_m, CentralElement, HPolynomial, SamplingConfig};
use epm_core::codec::{beta_encode, Kind, Record};
use epm_core::dp::{egdp_encrypt_add, egdp_encrypt_xor, egdp_keygen};
use epm_core::sap::{sap_encrypt, sap_keygen};
use epm_core::{RingElement, RingParams};
use num_bigint::{BigInt, BigUint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn params(p: u64, m: usize) -> RingParams {
    RingParams::from_u64(p, m).unwrap()
}

/// 2^64 - 59, the largest prime below 2^64.
pub fn big64() -> RingParams {
    RingParams::new(BigUint::from(u64::MAX - 58), 8).unwrap()
}

pub fn mersenne61(m: usize) -> RingParams {
    RingParams::new(BigUint::from((1u64 << 61) - 1), m).unwrap()
}

pub fn el(pp: &RingParams, rows: &[&[i64]]) -> RingElement {
    let raw: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
    RingElement::new(pp, &raw).unwrap()
}

pub fn digits(pp: &RingParams, d: &[u64]) -> CentralElement {
    CentralElement::from_u64_digits(pp, d).unwrap()
}

/// The p = 2, m = 2 fixture: base, X, the four secrets with the
/// polynomials that produce them, and the exchanged values.
pub struct WorkedChain {
    pub params: RingParams,
    pub base: RingElement,
    pub x: RingElement,
    pub a: (HPolynomial, HPolynomial),
    pub b: (HPolynomial, HPolynomial),
}

impl WorkedChain {
    pub fn new() -> Self {
        let pp = params(2, 2);
        let base = make_corner_m(&pp, &BigInt::from(3)).unwrap();
        let poly = |c: &[&[u64]]| {
            HPolynomial::new(&base, c.iter().map(|d| digits(&pp, d)).collect()).unwrap()
        };
        WorkedChain {
            x: el(&pp, &[&[1, 1], &[2, 3]]),
            a: (poly(&[&[1, 1], &[1, 0]]), poly(&[&[0, 0], &[1, 1]])),
            b: (poly(&[&[1, 1]]), poly(&[&[0, 1]])),
            base,
            params: pp,
        }
    }
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// One record of every kind, generated deterministically for `(p, m)`.
pub fn golden_records(p: u64, m: usize) -> Vec<Record> {
    records_of_every_kind(&params(p, m), 1000 + p * 10 + m as u64)
}

pub fn records_of_every_kind(pp: &RingParams, seed: u64) -> Vec<Record> {
    let pp = pp.clone();
    let mut r = rng(seed);
    let p = pp.p().clone();
    let m = pp.m();
    let cfg = SamplingConfig::default();
    let base = match (u64::try_from(&p).unwrap_or(0), m) {
        (2, 2) => make_corner_m(&pp, &BigInt::from(3)).unwrap(),
        _ => default_base(&pp, &mut r).unwrap(),
    };
    let (sp, ss) = sap_keygen(&base, &cfg, &mut r).unwrap();
    let s = ActionVector::random(&pp, &mut r);
    let sc = sap_encrypt(&sp, &s, &cfg, &mut r).unwrap();
    let (ep, es) = egdp_keygen(&base, &cfg, &mut r).unwrap();
    let msg = RingElement::random(&pp, &mut r);
    let ca = egdp_encrypt_add(&ep, &msg, &cfg, &mut r).unwrap();
    let cx = egdp_encrypt_xor(&ep, &beta_encode(&msg), &cfg, &mut r).unwrap();
    vec![
        Record::Element(RingElement::random(&pp, &mut r)),
        Record::Vector(ActionVector::random(&pp, &mut r)),
        Record::PublicBase(base),
        Record::SapPublic(sp),
        Record::SapPrivate(ss),
        Record::SapCiphertext(sc),
        Record::EgdpPublic(ep),
        Record::EgdpPrivate(es),
        Record::EgdpCiphertextAdd(ca),
        Record::EgdpCiphertextXor(cx),
    ]
}

pub fn golden_path(p: u64, m: usize, kind: Kind) -> PathBuf {
    golden_dir().join(format!("p{p}m{m}_{}.bin", kind.name()))
}

/// The worked chain run end to end, as a labelled transcript.
pub fn worked_chain_transcript() -> epm_core::codec::Transcript {
    use epm_core::dp::{DhdpSession, Role};
    let w = WorkedChain::new();
    let (a1, a2) = (w.a.0.evaluate(), w.a.1.evaluate());
    let (b1, b2) = (w.b.0.evaluate(), w.b.1.evaluate());
    let mut alice =
        DhdpSession::with_locals(&w.x, &w.base, Role::Alice, a1.clone(), a2.clone()).unwrap();
    let mut bob =
        DhdpSession::with_locals(&w.x, &w.base, Role::Bob, b1.clone(), b2.clone()).unwrap();
    let (ga, gb) = (alice.outbound().clone(), bob.outbound().clone());
    let k_a = alice.complete(&gb).unwrap();
    let k_b = bob.complete(&ga).unwrap();
    let mut t = epm_core::codec::Transcript::default();
    t.push("M", Record::PublicBase(w.base));
    t.push("X", Record::Element(w.x));
    t.push("A1", Record::Element(a1));
    t.push("A2", Record::Element(a2));
    t.push("B1", Record::Element(b1));
    t.push("B2", Record::Element(b2));
    t.push("G_A", Record::Element(ga));
    t.push("G_B", Record::Element(gb));
    t.push("K_A", Record::Element(k_a));
    t.push("K_B", Record::Element(k_b));
    t
}

pub fn worked_chain_path() -> PathBuf {
    golden_dir().join("worked_chain.jsonl")
}
