//! One line per acceptance criterion: `criterion N: PASS|FAIL <detail>`.
//!
//! Criterion 3 is expected to report FAIL on two misprinted cells of
//! table 30; the test fails if the discrepancy set differs from those two.

mod common;

use std::collections::BTreeSet;

use common::{basket, brute_force, check_exceeds_sqrt, check_floor_add_sqrt, fixture_baskets};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reid_basket::canonical::epsilon_n;
use reid_basket::criteria::VolumeData;
use reid_basket::{
    classify, delta_n, enumerate_b0, enumerate_index_profiles, gamma, lambda_of, mu0_candidates,
    plurigenus_closed, r_index, ratio, rr_lower_bound, sigma, sigma_prime, single_packings,
    table_pipeline, theta_max, unpack, verify_table, B2Spec, Basket, BranchPolicy,
    ClassificationConstraints, ClassifyOptions, CriterionUsed, Execution, FixtureBody,
    FixtureSource, IndexSlot, Level, OrbifoldPair, Plurigenera, Rational, WeightedBasket,
};

const SEED: u64 = 0x5eed_ba5e;
const PROPERTY_CASES: usize = 10_000;

/// The two printed cells of table 30 that disagree with their own row.
const TABLE30_MISPRINTS: &[(usize, &str, &str, &str)] =
    &[(51, "m0", "2", "4"), (56, "lambda", "3", "17/3")];

/// `(table, line, column, printed, computed)`.
type Mismatch = (u32, usize, String, String, String);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn from_failures(checked: usize, failures: Vec<String>) -> Self {
        if failures.is_empty() {
            Outcome { pass: true, detail: format!("{checked} checks") }
        } else {
            Outcome {
                pass: false,
                detail: format!("{} of {checked} checks failed: {}", failures.len(), failures.join("; ")),
            }
        }
    }
}

fn random_basket(rng: &mut ChaCha8Rng, max_r: u32, max_len: usize, coprime: bool) -> Basket {
    let len = rng.gen_range(0..=max_len);
    let mut pairs = Vec::with_capacity(len);
    while pairs.len() < len {
        let r = rng.gen_range(2..=max_r);
        let b = rng.gen_range(1..=r / 2);
        if !coprime || b.gcd(&r) == 1 {
            pairs.push(OrbifoldPair::new(b, r).unwrap());
        }
    }
    Basket::from_pairs(pairs)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    let mut checked = 0;
    for _ in 0..500 {
        let b = random_basket(&mut rng, 24, 8, false);
        let p1 = rng.gen_range(0..=3);
        let wb = WeightedBasket::new(b.clone(), p1);
        let p = Plurigenera::compute(&wb, 60);
        for m in 1..=60 {
            checked += 1;
            let closed = plurigenus_closed(&b, wb.anti_volume(), m).unwrap();
            if p.get(m) != &closed {
                failures.push(format!("{b} p1={p1} m={m}: {} vs {closed}", p.get(m)));
            }
        }
    }
    Outcome::from_failures(checked, failures)
}

fn criterion_2() -> Outcome {
    let x66 = WeightedBasket::new(basket("(1,2),(2,5),(1,3),(2,11)"), 1);
    let mut policy = BranchPolicy::for_p1(1);
    policy.b2 = Some(B2Spec { n0: 1, mu: Some(ratio(24, 15)) });
    let r = table_pipeline(&x66, &policy).unwrap();
    let b2 = r
        .alternatives
        .iter()
        .find(|b| b.criterion == CriterionUsed::B2)
        .map(|b| b.n2);
    let p24 = Plurigenera::compute(&x66, 24).get(24).clone();
    let got = format!(
        "k3={} rx={} M={} lambda={} n1={} m0={} P24={} n2(b2)={:?}",
        r.volume.k3, r.volume.rx, r.volume.big_m, r.volume.lambda, r.n1, r.m0, p24, b2
    );
    let want = "k3=1/330 rx=330 M=1 lambda=1 n1=37 m0=5 P24=16 n2(b2)=Some(52)";
    Outcome { pass: got == want, detail: got }
}

fn criterion_3() -> (Outcome, Vec<Mismatch>) {
    let tables = [1, 6, 9, 10, 11, 12, 13, 15, 16, 17, 18, 20, 24, 26, 28, 30];
    let mut found = Vec::new();
    let mut checked = 0;
    for id in tables {
        let report = verify_table(&FixtureSource::Embedded, id, Execution::default()).unwrap();
        checked += report.checked;
        for d in report.discrepancies {
            found.push((id, d.line, d.column, d.expected, d.computed));
        }
    }
    let failures = found
        .iter()
        .map(|(id, line, col, exp, got)| format!("table {id} line {line} {col}: printed {exp}, computed {got}"))
        .collect();
    (Outcome::from_failures(checked, failures), found)
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let run = |s: &str| -> BTreeSet<Basket> {
        let c: ClassificationConstraints = s.parse().unwrap();
        classify(&c, ClassifyOptions::default())
            .unwrap()
            .into_iter()
            .map(WeightedBasket::into_basket)
            .collect()
    };
    let a: BTreeSet<Basket> = (9..=11)
        .map(|s| basket(&format!("(1,2),(2,5),(1,3),(1,4),(1,{s})")))
        .collect();
    if run("p[1]=1 p[2]=1 p[8]=2") != a {
        failures.push("4a".to_string());
    }
    let FixtureBody::Rows(t18) = FixtureSource::Embedded.load(18).unwrap().body else {
        unreachable!("table 18 is a row table")
    };
    let b: BTreeSet<Basket> = t18.rows.into_iter().map(|r| r.basket).collect();
    let got_b = run("p[1]=0 p[2]=0 p[8]=2");
    if b.len() != 4 || !b.is_subset(&got_b) {
        failures.push("4b".to_string());
    }
    let FixtureBody::IndexProfile(t16) = FixtureSource::Embedded.load(16).unwrap().body else {
        unreachable!("table 16 is an index profile")
    };
    let slots: Vec<IndexSlot> = ["2:0..1", "3:1", "5:1", "7:1", "8:1"].iter().map(|s| s.parse().unwrap()).collect();
    let c: ClassificationConstraints = "p[1]=1 p[2]=1".parse().unwrap();
    let found = enumerate_index_profiles(840, &slots, |x| c.admits(&WeightedBasket::new(x.clone(), 1)));
    let expected: BTreeSet<Basket> = t16.baskets.into_iter().collect();
    let floor = ratio(47, 840);
    let above = found
        .iter()
        .all(|x| r_index(x) == 840 && WeightedBasket::new(x.clone(), 1).anti_volume() >= &floor);
    if found.into_iter().collect::<BTreeSet<_>>() != expected || expected.len() != 5 || !above {
        failures.push("4c".to_string());
    }
    Outcome::from_failures(3, failures)
}

fn criterion_5() -> Outcome {
    let first = rr_lower_bound(&ratio(1, 30), 24, 18, &ratio(18, 8)).unwrap();
    let second = rr_lower_bound(&ratio(3, 25), 13, 10, &ratio(30, 13)).unwrap();
    let pass = first == ratio(403, 20) && first > Rational::from(20) && second > Rational::from(15);
    Outcome { pass, detail: format!("P18 bound {first}, P10 bound {second}") }
}

fn packing_monotonicity(rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for _ in 0..PROPERTY_CASES {
        let b = random_basket(rng, 16, 7, false);
        let p1 = rng.gen_range(0..=3);
        let wb = WeightedBasket::new(b.clone(), p1);
        let p = Plurigenera::compute(&wb, 12);
        for (_, c) in single_packings(&b) {
            let wc = WeightedBasket::new(c.clone(), p1);
            let pc = Plurigenera::compute(&wc, 12);
            let ok = sigma(&c) == sigma(&b)
                && sigma_prime(&c) <= sigma_prime(&b)
                && gamma(&c) <= gamma(&b)
                && (2..=24).all(|n| delta_n(&c, n).unwrap() <= delta_n(&b, n).unwrap())
                && wc.anti_volume() >= wb.anti_volume()
                && (2..=12).all(|m| pc.get(m) >= p.get(m));
            if !ok {
                failures.push(format!("packing {b} -> {c}"));
            }
        }
    }
    failures
}

fn canonical_coherence(rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for _ in 0..PROPERTY_CASES {
        let b = random_basket(rng, 16, 6, true);
        let n = rng.gen_range(5..=17);
        let level = Level::new(n).unwrap();
        let below = level.previous().unwrap();
        let here = unpack(&b, level);
        let p1 = rng.gen_range(0..=3);
        let full = Plurigenera::compute(&WeightedBasket::new(b.clone(), p1), n);
        let unpacked = Plurigenera::compute(&WeightedBasket::new(here.clone(), p1), n);
        let eps = epsilon_n(&b, n).unwrap();
        let eps_direct = delta_n(&unpack(&b, below), n).unwrap() - delta_n(&b, n).unwrap();
        let ok = unpack(&here, below) == unpack(&b, below)
            && eps_direct == eps as i64
            && epsilon_n(&b, 6) == Ok(0)
            && (1..=n).all(|j| full.get(j) == unpacked.get(j));
        if !ok {
            failures.push(format!("canonical {b} at level {n}"));
        }
    }
    failures
}

fn lambda_over_theta() -> Vec<String> {
    let mut failures = Vec::new();
    for rx in [60, 330, 660, 840] {
        for m in 1..=2000 {
            if theta_max(m, rx) > lambda_of(m, rx) {
                failures.push(format!("theta > lambda at M={m} rx={rx}"));
            }
        }
    }
    failures
}

fn sqrt_routes() -> (usize, Vec<String>) {
    let mut failures = Vec::new();
    let mut checked = 0;
    for w in fixture_baskets() {
        let v = VolumeData::of(&w).unwrap();
        let p = Plurigenera::compute(&w, 200);
        let Some(m0) = p.first_at_least(2) else { continue };
        for mu in mu0_candidates(&w, m0, m0).into_iter().map(|c| c.value) {
            for n0 in 1..=3u64 {
                checked += 1;
                if let Err(e) = check_floor_add_sqrt(&mu, &Rational::new(8 * v.rx, n0)) {
                    failures.push(e);
                }
            }
        }
        let t = Rational::from(v.rmax.max(2));
        let base = Rational::from(12) / (&t * &v.k3) + ratio(1, 16);
        let radicand = Rational::from(72 * v.rx as i64) / &v.k3;
        for m in 1..=80 {
            checked += 1;
            let lhs = Rational::from(m) + ratio(3, 4);
            if let Err(e) = check_exceeds_sqrt(&(&lhs * &lhs - &base), &radicand) {
                failures.push(e);
            }
        }
    }
    (checked, failures)
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut failures = packing_monotonicity(&mut rng);
    failures.extend(canonical_coherence(&mut rng));
    failures.extend(lambda_over_theta());
    let (sqrt_checked, sqrt_failures) = sqrt_routes();
    failures.extend(sqrt_failures);
    let checked = 2 * PROPERTY_CASES + 4 * 2000 + sqrt_checked;
    Outcome::from_failures(checked, failures)
}

fn criterion_7() -> Outcome {
    const BUDGET: u32 = 20;
    let sets = [
        "p[1]=2 p[2]=3 rmax=2..6",
        "p[1]=2 p[2]=3 rmax=2..6 filters=none",
        "p[1]=3 p[2]=7 rmax=2..10",
        "p[1]=2 p[2]=2 rmax=2..10 filters=none",
        "p[1]=2 p[2]=5 rmax=2..4",
        "p[1]=3 p[2]=8 rmax=2..6",
    ];
    let mut failures = Vec::new();
    for s in sets {
        let c: ClassificationConstraints = s.parse().unwrap();
        if !enumerate_b0(&c).unwrap().iter().all(|x| x.basket.total_index() <= u64::from(BUDGET)) {
            failures.push(format!("{s}: candidate beyond the budget"));
            continue;
        }
        let got: BTreeSet<(Basket, u32)> = classify(&c, ClassifyOptions::default())
            .unwrap()
            .into_iter()
            .map(|w| (w.basket().clone(), w.p1()))
            .collect();
        let expected = brute_force(&c, BUDGET);
        let diff = got.symmetric_difference(&expected).count();
        if diff > 0 || expected.is_empty() {
            failures.push(format!("{s}: symmetric difference {diff}, oracle size {}", expected.len()));
        }
    }
    Outcome::from_failures(sets.len(), failures)
}

#[test]
fn acceptance() {
    let (third, discrepancies) = criterion_3();
    let outcomes = [
        (1, criterion_1()),
        (2, criterion_2()),
        (3, third),
        (4, criterion_4()),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7()),
    ];
    for (n, o) in &outcomes {
        println!("criterion {n}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    for (n, o) in &outcomes {
        if *n != 3 {
            assert!(o.pass, "criterion {n} failed: {}", o.detail);
        }
    }
    let expected: Vec<Mismatch> = TABLE30_MISPRINTS
        .iter()
        .map(|&(line, col, exp, got)| (30, line, col.to_string(), exp.to_string(), got.to_string()))
        .collect();
    assert_eq!(discrepancies, expected, "criterion 3 discrepancies changed");
}
