//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p epm-core --test acceptance`. The process fails
//! unless every FAIL is listed in `KNOWN_CONFLICTS`, where the criterion
//! states a value that the ring does not have.

mod common;

use std::collections::HashSet;
use std::fs;
use std::time::{Duration, Instant};

use common::*;
use epm_core::action::{act, ActionVector};
use epm_core::attack::{attack_egdp_via_central, attack_sap, solve_central_sap, AttackStatus};
use epm_core::center::{
    count_distinct_g, default_base, h_poly_sample, make_corner_m, make_two_entry_m, random_coprime,
    random_primitive_root, CentralElement, SamplingConfig,
};
use epm_core::codec::{
    beta_decode, beta_encode, beta_len, deserialize, serialize, Kind, Transcript,
};
use epm_core::dp::{
    dhdp_init, egdp_decrypt_add, egdp_decrypt_xor, egdp_encrypt_add, egdp_encrypt_add_with,
    egdp_encrypt_xor, egdp_keygen, sample_noncommuting, EgdpPublicKey, Role,
};
use epm_core::numtheory::multiplicative_order;
use epm_core::oracle::{
    brute_force_center, brute_force_central_sap, brute_force_units, enumerate_ring,
};
use epm_core::sap::{
    sap_decrypt, sap_encrypt, sap_encrypt_with, sap_keygen, sap_validate_key, SapPublicKey,
};
use epm_core::RingElement;
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

/// Criteria whose stated numbers contradict exhaustive enumeration.
const KNOWN_CONFLICTS: &[(u32, &str)] = &[(
    2,
    "the unit count p^((2m^3+3m^2-5m)/6) is exact only for p = 2; \
     enumeration gives (p-1)^m times it, consistent with the unit fraction",
)];

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pow_formula(p: u64, num: u64) -> BigUint {
    BigUint::from(p).pow((num / 6) as u32)
}

fn cardinality() -> Outcome {
    let start = Instant::now();
    let mut seen = Vec::new();
    for (p, m, expected) in [(2u64, 2u64, 32u64), (3, 2, 243), (2, 3, 16384)] {
        let pp = params(p, m as usize);
        let formula = pow_formula(p, 2 * m * m * m + 3 * m * m + m);
        let distinct: HashSet<RingElement> =
            enumerate_ring(&pp).map_err(|e| e.to_string())?.collect();
        check(
            BigUint::from(distinct.len()) == formula && formula == BigUint::from(expected),
            || {
                format!(
                    "({p},{m}): enumerated {}, formula {formula}",
                    distinct.len()
                )
            },
        )?;
        seen.push(distinct.len().to_string());
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("{} in {took:.2?}", seen.join(", ")))
}

fn units() -> Outcome {
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for (p, m) in [(2u64, 2u64), (3, 2)] {
        let pp = params(p, m as usize);
        let brute: HashSet<RingElement> = brute_force_units(&pp)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        let all: Vec<RingElement> = enumerate_ring(&pp).map_err(|e| e.to_string())?.collect();
        let mismatched = all
            .iter()
            .filter(|a| brute.contains(*a) != a.is_invertible())
            .count();
        check(mismatched == 0, || {
            format!("({p},{m}): is_invertible disagrees on {mismatched}")
        })?;
        let count = BigUint::from(brute.len());
        let total = BigUint::from(all.len());
        let fraction_ok =
            &count * BigUint::from(p).pow(m as u32) == &total * BigUint::from(p - 1).pow(m as u32);
        check(fraction_ok, || {
            format!("({p},{m}): fraction {count}/{total}")
        })?;
        let formula = pow_formula(p, 2 * m * m * m + 3 * m * m - 5 * m);
        if count == formula {
            notes.push(format!("({p},{m}) {count} units"));
        } else {
            failures.push(format!(
                "({p},{m}): {count} units by pairing, formula states {formula}"
            ));
        }
    }
    if failures.is_empty() {
        Ok(format!("{}; fractions exact", notes.join(", ")))
    } else {
        Err(format!(
            "{}; criterion agrees with is_invertible and the fraction, count differs: {}",
            notes.join(", "),
            failures.join(", ")
        ))
    }
}

fn center() -> Outcome {
    let mut sizes = Vec::new();
    for (p, m) in [(2, 2), (3, 2)] {
        let pp = params(p, m);
        let brute: HashSet<RingElement> = brute_force_center(&pp)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        let expanded: HashSet<RingElement> = CentralElement::enumerate(&pp)
            .map_err(|e| e.to_string())?
            .iter()
            .map(CentralElement::expand)
            .collect();
        check(brute == expanded, || format!("({p},{m}): sets differ"))?;
        check(
            BigUint::from(brute.len()) == BigUint::from(p).pow(m as u32),
            || format!("({p},{m}): {} central elements", brute.len()),
        )?;
        sizes.push(brute.len().to_string());
    }
    Ok(format!("sizes {}", sizes.join(", ")))
}

fn ring_axioms() -> Outcome {
    let mut failures = 0;
    for (name, pp) in [
        ("(2,3)", params(2, 3)),
        ("(3,3)", params(3, 3)),
        ("(2^64-59,8)", big64()),
    ] {
        let mut r = rng(4);
        for _ in 0..1000 {
            let a = RingElement::random(&pp, &mut r);
            let b = RingElement::random(&pp, &mut r);
            let c = RingElement::random(&pp, &mut r);
            let ok = (|| -> epm_core::Result<bool> {
                let assoc = a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?;
                let left = a.mul(&b.add(&c)?)? == a.mul(&b)?.add(&a.mul(&c)?)?;
                let right = b.add(&c)?.mul(&a)? == b.mul(&a)?.add(&c.mul(&a)?)?;
                let closed = [a.mul(&b)?, a.add(&b)?]
                    .into_iter()
                    .all(|v| RingElement::from_canonical(&pp, v.entries().to_vec()).is_ok());
                Ok(assoc && left && right && closed)
            })();
            if !matches!(ok, Ok(true)) {
                failures += 1;
            }
        }
        check(failures == 0, || format!("{name}: {failures} failures"))?;
    }
    Ok("3 x 1000 triples, 0 failures".into())
}

fn structured_m() -> Outcome {
    let mut r = rng(5);
    let mut orders = Vec::new();
    for (p, m) in [(3u64, 3usize), (5, 2)] {
        let pp = params(p, m);
        for i in 0..20 {
            let x = random_coprime(&pp, &mut r);
            let n = multiplicative_order(&x, pp.p(), m as u32)
                .and_then(|n| n.to_u64())
                .ok_or("order")?;
            let corner = make_corner_m(&pp, &BigInt::from(x.clone())).map_err(|e| e.to_string())?;
            let y = random_primitive_root(&pp, &mut r).map_err(|e| e.to_string())?;
            let two = make_two_entry_m(&pp, &BigInt::from(x.clone()), &BigInt::from(y))
                .map_err(|e| e.to_string())?;
            for base in [corner, two] {
                check(base.pow_u64(n + 1) == base, || {
                    format!("x = {x}: M^(n+1) != M")
                })?;
                let distinct: HashSet<RingElement> = (1..=n).map(|k| base.pow_u64(k)).collect();
                check(distinct.len() as u64 == n, || {
                    format!("x = {x}: powers repeat")
                })?;
            }
            if i == 0 {
                orders.push(format!("({p},{m}) x={x} n={n}"));
            }
        }
    }
    Ok(format!(
        "20 x per ring, both constructions; e.g. {}",
        orders.join(", ")
    ))
}

fn sap_round_trip() -> Outcome {
    let cfg = SamplingConfig::default();
    let pp = params(3, 3);
    let mut r = rng(6);
    let base = default_base(&pp, &mut r).map_err(|e| e.to_string())?;
    let (public, private) = sap_keygen(&base, &cfg, &mut r).map_err(|e| e.to_string())?;
    for i in 0..1000 {
        let s = ActionVector::random(&pp, &mut r);
        let ct = sap_encrypt(&public, &s, &cfg, &mut r).map_err(|e| e.to_string())?;
        check(sap_decrypt(&private, &ct).ok() == Some(s), || {
            format!("(3,3) cycle {i}")
        })?;
    }
    let pp = big64();
    let mut slowest = Duration::ZERO;
    for i in 0..10 {
        let start = Instant::now();
        let base = default_base(&pp, &mut r).map_err(|e| e.to_string())?;
        let (public, private) = sap_keygen(&base, &cfg, &mut r).map_err(|e| e.to_string())?;
        let s = ActionVector::random(&pp, &mut r);
        let ct = sap_encrypt(&public, &s, &cfg, &mut r).map_err(|e| e.to_string())?;
        check(sap_decrypt(&private, &ct).ok() == Some(s), || {
            format!("64-bit cycle {i}")
        })?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        check(took < Duration::from_secs(1), || {
            format!("64-bit cycle {i} took {took:?}")
        })?;
    }
    Ok(format!(
        "1000 at (3,3); 10 at (2^64-59,8), slowest {slowest:.2?} incl. keygen"
    ))
}

fn dhdp() -> Outcome {
    let cfg = SamplingConfig::default();
    let pp = params(3, 3);
    let mut r = rng(7);
    for i in 0..1000 {
        let run = (|| -> epm_core::Result<bool> {
            let base = default_base(&pp, &mut r)?;
            let x = sample_noncommuting(&base, &cfg, &mut r)?;
            let mut alice = dhdp_init(&x, &base, Role::Alice, &cfg, &mut r)?;
            let mut bob = dhdp_init(&x, &base, Role::Bob, &cfg, &mut r)?;
            let (ga, gb) = (alice.outbound().clone(), bob.outbound().clone());
            Ok(alice.complete(&gb)? == bob.complete(&ga)?)
        })();
        check(matches!(run, Ok(true)), || format!("exchange {i}: {run:?}"))?;
    }
    Ok("1000 exchanges, all completions equal".into())
}

fn egdp() -> Outcome {
    let cfg = SamplingConfig::default();
    let pp = params(3, 3);
    let mut r = rng(8);
    let base = default_base(&pp, &mut r).map_err(|e| e.to_string())?;
    let (public, private) = egdp_keygen(&base, &cfg, &mut r).map_err(|e| e.to_string())?;
    for i in 0..1000 {
        let s = RingElement::random(&pp, &mut r);
        let ct = egdp_encrypt_add(&public, &s, &cfg, &mut r).map_err(|e| e.to_string())?;
        check(egdp_decrypt_add(&private, &ct).ok() == Some(s), || {
            format!("add {i}")
        })?;
    }
    for i in 0..1000 {
        let bits = beta_encode(&RingElement::random(&pp, &mut r));
        let ct = egdp_encrypt_xor(&public, &bits, &cfg, &mut r).map_err(|e| e.to_string())?;
        check(egdp_decrypt_xor(&private, &ct).ok() == Some(bits), || {
            format!("xor {i}")
        })?;
    }
    for (p, m) in [(2, 2), (3, 2)] {
        let pp = params(p, m);
        let mut seen = HashSet::new();
        for a in enumerate_ring(&pp).map_err(|e| e.to_string())? {
            let bits = beta_encode(&a);
            check(beta_decode(&pp, &bits).ok().as_ref() == Some(&a), || {
                format!("beta round trip {a}")
            })?;
            check(seen.insert(bits), || format!("beta collision at {a}"))?;
        }
    }
    Ok(format!(
        "1000 add + 1000 xor; beta injective on 32 (t={}) and 243 (t={}) elements",
        beta_len(&params(2, 2)),
        beta_len(&params(3, 2))
    ))
}

fn duality() -> Outcome {
    let cfg = SamplingConfig::default();
    let pp = params(2, 2);
    let base = make_corner_m(&pp, &BigInt::from(3)).map_err(|e| e.to_string())?;
    let mut r = rng(9);
    let mut weak_keys = 0;
    for f in CentralElement::enumerate(&pp).map_err(|e| e.to_string())? {
        for r2 in [1, 3] {
            let rv = ActionVector::new(&pp, &[1, r2]).map_err(|e| e.to_string())?;
            let t = act(&f.expand(), &rv).map_err(|e| e.to_string())?;
            let key = SapPublicKey {
                base: base.clone(),
                r: rv,
                t,
            };
            check(!sap_validate_key(&key).is_valid(), || {
                format!("F = {} not flagged", f.expand())
            })?;
            for s0 in 0..2 {
                for s1 in 0..4 {
                    let s = ActionVector::new(&pp, &[s0, s1]).map_err(|e| e.to_string())?;
                    for _ in 0..4 {
                        let (_, g) = h_poly_sample(&base, 4, &mut r).map_err(|e| e.to_string())?;
                        let ct = sap_encrypt_with(&key, &s, &g).map_err(|e| e.to_string())?;
                        let out = attack_sap(&key, &ct);
                        check(out.recovered.as_ref() == Some(&s), || {
                            format!("F = {}, S = {s}: {:?}", f.expand(), out.status)
                        })?;
                    }
                }
            }
            weak_keys += 1;
        }
    }
    for i in 0..200 {
        let (public, _) = sap_keygen(&base, &cfg, &mut r).map_err(|e| e.to_string())?;
        let status = solve_central_sap(&public.r, &public.t).status;
        check(status == AttackStatus::NoCentralSolution, || {
            format!("generated key {i}: {status:?}")
        })?;
    }

    let pp = params(3, 2);
    for i in 0..100 {
        let base = default_base(&pp, &mut r).map_err(|e| e.to_string())?;
        let x = sample_noncommuting(&base, &cfg, &mut r).map_err(|e| e.to_string())?;
        let a1 = CentralElement::sample(&pp, &mut r, false).expand();
        let p_elem = a1.mul(&x).map_err(|e| e.to_string())?;
        let weak = EgdpPublicKey {
            base: base.clone(),
            x,
            p_elem,
        };
        let s = RingElement::random(&pp, &mut r);
        let (_, b1) = h_poly_sample(&base, 4, &mut r).map_err(|e| e.to_string())?;
        let (_, b2) = h_poly_sample(&base, 4, &mut r).map_err(|e| e.to_string())?;
        let ct = egdp_encrypt_add_with(&weak, &s, &b1, &b2).map_err(|e| e.to_string())?;
        let out = attack_egdp_via_central(&weak, &ct, &mut r);
        check(out.recovered == Some(s), || {
            format!("weak EGDP key {i}: {:?}", out.status)
        })?;

        let (public, _) = egdp_keygen(&base, &cfg, &mut r).map_err(|e| e.to_string())?;
        let s = RingElement::random(&pp, &mut r);
        let ct = egdp_encrypt_add(&public, &s, &cfg, &mut r).map_err(|e| e.to_string())?;
        let out = attack_egdp_via_central(&public, &ct, &mut r);
        check(!out.is_recovered(), || {
            format!("generated EGDP key {i} broken")
        })?;
    }
    Ok(format!(
        "{weak_keys} weak SAP keys broken and flagged, 200 generated keys resist; 100 weak / 100 generated EGDP keys at (3,2)"
    ))
}

fn solver_vs_oracle() -> Outcome {
    // pairs with p | r_1 are outside the solver's domain and must be reported
    // as NotApplicable; the tally records how many of them are solvable
    let compare = |rv: &ActionVector,
                   tv: &ActionVector,
                   tally: &mut (u32, u32)|
     -> Result<(), String> {
        let brute = brute_force_central_sap(rv, tv).map_err(|e| e.to_string())?;
        let out = solve_central_sap(rv, tv);
        let agrees = match out.status {
            AttackStatus::Recovered => out.recovered.as_ref().is_some_and(|a| brute.contains(a)),
            AttackStatus::NoCentralSolution => {
                brute.is_empty() && !(rv.get(0) % rv.params().p()).is_zero()
            }
            AttackStatus::NotApplicable => {
                tally.0 += 1;
                tally.1 += u32::from(!brute.is_empty());
                (rv.get(0) % rv.params().p()).is_zero()
            }
            AttackStatus::NotFound => false,
        };
        check(agrees, || {
            format!(
                "R = {rv}, T = {tv}: {:?} vs {} solutions",
                out.status,
                brute.len()
            )
        })
    };
    let pp = params(2, 2);
    let space: Vec<ActionVector> = (0..2)
        .flat_map(|a| (0..4).map(move |b| (a, b)))
        .map(|(a, b)| ActionVector::new(&pp, &[a, b]).unwrap())
        .collect();
    let mut na_small = (0, 0);
    for rv in &space {
        for tv in &space {
            compare(rv, tv, &mut na_small)?;
        }
    }
    let pp = params(3, 2);
    let mut r = rng(10);
    let mut na_random = (0, 0);
    for _ in 0..1000 {
        let rv = ActionVector::random(&pp, &mut r);
        let tv = ActionVector::random(&pp, &mut r);
        compare(&rv, &tv, &mut na_random)?;
    }
    Ok(format!(
        "64 pairs at (2,2) and 1000 at (3,2) agree where r_1 is a unit; \
         NotApplicable exactly when p | r_1 ({} and {} pairs, of which {} and {} have central solutions)",
        na_small.0, na_random.0, na_small.1, na_random.1
    ))
}

fn distinct_g() -> Outcome {
    let pp = params(2, 2);
    let base = make_corner_m(&pp, &BigInt::from(3)).map_err(|e| e.to_string())?;
    let first = count_distinct_g(&base, 2).map_err(|e| e.to_string())?;
    let second = count_distinct_g(&base, 2).map_err(|e| e.to_string())?;
    check(first == second, || format!("{first} then {second}"))?;
    Ok(format!(
        "{first} distinct G (p^(2m-1) = 8); open question: differs from the p^(2m) = 16 estimate"
    ))
}

fn codec() -> Outcome {
    let mut r = rng(11);
    let rings = [
        params(2, 2),
        params(3, 2),
        params(3, 3),
        params(5, 2),
        params(2, 4),
    ];
    for i in 0..1000 {
        let pp = &rings[i % rings.len()];
        let records = records_of_every_kind(pp, r.next_u64());
        check(records.len() == Kind::ALL.len(), || "missing kind".into())?;
        for rec in records {
            let back = deserialize(&serialize(&rec)).map_err(|e| format!("{}: {e}", rec.kind()))?;
            check(back == rec, || format!("{} did not round trip", rec.kind()))?;
        }
    }

    let mut corpus: Vec<Vec<u8>> = golden_records(2, 2).iter().map(serialize).collect();
    corpus.extend(golden_records(3, 3).iter().map(serialize));
    let mut rejected = 0;
    for n in 0..1000 {
        let mut bad = corpus[n % corpus.len()].clone();
        let i = r.gen_range(0..bad.len());
        match n % 3 {
            0 => bad[i] ^= 1 << r.gen_range(0..8),
            1 => bad.truncate(i),
            _ => bad.insert(i, r.gen()),
        }
        match deserialize(&bad) {
            Ok(rec) => check(serialize(&rec) == bad, || {
                format!("mutation {n} silently repaired")
            })?,
            Err(_) => rejected += 1,
        }
    }

    for (p, m) in [(2, 2), (3, 3)] {
        for rec in golden_records(p, m) {
            let path = golden_path(p, m, rec.kind());
            let committed = fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            check(committed == serialize(&rec), || {
                format!("{} drifted", path.display())
            })?;
        }
    }
    Ok(format!(
        "1000 x {} kinds round trip; {rejected}/1000 mutations rejected, rest re-encode identically; 20 golden files stable",
        Kind::ALL.len()
    ))
}

fn worked_chain() -> Outcome {
    let pp = params(2, 2);
    let t = worked_chain_transcript();
    let get = |label: &str| -> Result<RingElement, String> {
        let rec = t.require(label).map_err(|e| e.to_string())?.clone();
        rec.clone()
            .into_element()
            .or_else(|_| rec.into_public_base())
            .map_err(|e| e.to_string())
    };
    let expected: [(&str, &[&[i64]]); 8] = [
        ("M", &[&[0, 0], &[0, 3]]),
        ("X", &[&[1, 1], &[2, 3]]),
        ("A1", &[&[1, 0], &[0, 2]]),
        ("A2", &[&[0, 0], &[0, 1]]),
        ("B1", &[&[1, 0], &[0, 3]]),
        ("B2", &[&[0, 0], &[0, 2]]),
        ("G_A", &[&[0, 1], &[0, 2]]),
        ("G_B", &[&[0, 0], &[0, 2]]),
    ];
    for (label, rows) in expected {
        let got = get(label)?;
        check(got == el(&pp, rows), || format!("{label} = {got}"))?;
    }
    check(get("K_A")?.is_zero() && get("K_B")?.is_zero(), || {
        "shared secret not zero".into()
    })?;
    let committed = fs::read_to_string(worked_chain_path()).map_err(|e| e.to_string())?;
    check(committed == t.to_json_lines(), || {
        "committed vector differs".into()
    })?;
    check(
        Transcript::from_json_lines(&committed).map_err(|e| e.to_string())? == t,
        || "committed vector does not decode".into(),
    )?;
    Ok("G_A, G_B and zero shared secret match the committed vector".into())
}

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "cardinality by enumeration", cardinality),
        (2, "units by exhaustive pairing", units),
        (3, "center by brute force", center),
        (4, "ring axioms on random triples", ring_axioms),
        (5, "structured M periodicity", structured_m),
        (6, "SAP round trips", sap_round_trip),
        (7, "DHDP completions agree", dhdp),
        (8, "EGDP round trips and beta injectivity", egdp),
        (9, "validator/attack duality", duality),
        (10, "central SAP solver vs oracle", solver_vs_oracle),
        (11, "distinct-G report", distinct_g),
        (12, "codec round trips, mutations, golden files", codec),
        (13, "worked-chain fixture", worked_chain),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (n, title, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => {
                passed += 1;
                println!("criterion {n:>2} PASS  {title}: {detail} [{took:.2?}]");
            }
            Err(reason) => {
                println!("criterion {n:>2} FAIL  {title}: {reason} [{took:.2?}]");
                match KNOWN_CONFLICTS.iter().find(|(k, _)| *k == n) {
                    Some((_, why)) => println!("             known conflict: {why}"),
                    None => unexpected.push(n),
                }
            }
        }
    }
    println!("{passed}/13 criteria pass");
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
