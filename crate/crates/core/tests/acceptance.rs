//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines show up in
//! `cargo test` output; exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_integer::Integer;
use zslab::atoms::{cross_number_k_group, enumerate_atoms, k_star};
use zslab::invariants::{sweep_subsets, SweepConfig};
use zslab::lengths;
use zslab::syslen::{compare_systems, Verdict};
use zslab::{EnumConfig, GElement, GroupSpec, Rational, Sequence};

use common::*;

fn grp(s: &str) -> GroupSpec {
    GroupSpec::parse(s).unwrap()
}

fn elems(g: &GroupSpec, coords: &[&[i64]]) -> Vec<GElement> {
    coords.iter().map(|c| g.element(c).unwrap()).collect()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panicked".into())
}

/// Criteria that cannot hold as stated, with the reason. They still run and
/// print FAIL, but do not fail the test binary.
const KNOWN_UNATTAINABLE: [(usize, &str); 1] = [(
    4,
    "rho*(C7,4) = 7/3 presumes 4 in Delta_1(C7), but no subset of C7 has min Delta divisible by 4",
)];

fn criterion(n: usize, title: &str, limit: Duration, f: impl FnOnce() -> String) -> bool {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(f)).map_err(panic_message);
    let took = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) if took <= limit => (true, d),
        Ok(d) => (
            false,
            format!("{d}; exceeded the {}s limit", limit.as_secs()),
        ),
        Err(e) => (false, e.replace('\n', " ")),
    };
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!(
        "criterion {n} {title}: {verdict} [{:.1}s] {detail}",
        took.as_secs_f64()
    );
    ok
}

fn elasticity_law() -> String {
    let mut out = Vec::new();
    for name in ["C3", "C4", "C5", "C2^2", "C2^3", "C3^2"] {
        let g = grp(name);
        let nz = g.nonzero_elements().unwrap();
        let d = brute_atoms(&g, &nz)
            .iter()
            .map(|a| a.iter().sum::<u32>())
            .max()
            .unwrap();
        let atoms = enumerate_atoms(&g, &nz, &EnumConfig::default()).unwrap();
        let e = lengths::elasticity(&atoms).unwrap();
        assert_eq!(e.value, q(d as i64, 2), "{name}: rho vs D/2 with D = {d}");
        assert!(e.is_accepted(&atoms), "{name}: witness not accepted");
        out.push(format!("{name} {}={d}/2", e.value));
    }
    out.join(", ")
}

fn cross_number_law() -> String {
    let mut out = Vec::new();
    for name in ["C2^2", "C2^3", "C3^2", "C4", "C8", "C9", "C3^3"] {
        let g = grp(name);
        // no cache is involved, so every group starts cold
        let k = cross_number_k_group(&g, &EnumConfig::forced()).unwrap();
        let ks = k_star(&g);
        assert_eq!(k, ks, "{name}: K vs K*");
        let r = g.rank() as i64;
        if r >= 2 {
            assert!(
                k < Rational::from_integer(r),
                "{name}: K = {k} not below r = {r}"
            );
            out.push(format!("{name} {k}<{r}"));
        } else {
            out.push(format!("{name} {k}"));
        }
    }
    out.join(", ")
}

fn distance_configurations() -> String {
    let cases: [(&str, &[&[i64]], u64); 3] = [
        ("C3^2", &[&[1, 1], &[1, 0], &[0, 1]], 1),
        ("C5^2", &[&[4, 4], &[1, 0], &[0, 1]], 2),
        (
            "C4^3",
            &[&[3, 3, 3], &[1, 1, 1], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
            2,
        ),
    ];
    let mut out = Vec::new();
    for (name, coords, want) in cases {
        let g = grp(name);
        let atoms = enumerate_atoms(&g, &elems(&g, coords), &EnumConfig::default()).unwrap();
        let md = lengths::min_delta(&atoms);
        assert_eq!(md, want, "{name}");
        assert!(!lengths::is_half_factorial(&atoms), "{name}");
        out.push(format!("{name} {md}"));
    }
    out.join(", ")
}

fn cyclic_rho_star() -> String {
    let mut out = Vec::new();
    let mut wrong = Vec::new();
    for (name, d, want) in [("C5", 3, q(5, 2)), ("C7", 5, q(7, 2)), ("C7", 4, q(7, 3))] {
        let sweep = sweep_subsets(&grp(name), &SweepConfig::default(), None).unwrap();
        assert!(sweep.orbit_reduced(), "{name} not orbit reduced");
        match sweep.rho_star(d).unwrap() {
            Some(rho) if rho.exact && rho.value == want => {
                out.push(format!("rho*({name},{d})={}", rho.value))
            }
            Some(rho) => wrong.push(format!(
                "rho*({name},{d}) = {} (exact: {}), expected {want}",
                rho.value, rho.exact
            )),
            None => {
                let star = sweep.delta_star().unwrap().value;
                wrong.push(format!(
                    "rho*({name},{d}) is undefined, expected {want}: no subset has min Delta divisible by {d}, Delta*({name}) = {star:?}"
                ));
            }
        }
    }
    assert!(
        wrong.is_empty(),
        "{}; passed: {}",
        wrong.join("; "),
        out.join(", ")
    );
    out.join(", ")
}

fn witness_elasticity() -> String {
    let g = grp("C4^3");
    let s = elems(
        &g,
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[3, 3, 3]],
    );
    let atoms = enumerate_atoms(&g, &s, &EnumConfig::default()).unwrap();
    let e = lengths::elasticity(&atoms).unwrap();
    let md = lengths::min_delta(&atoms);
    let (n, r) = (4, 3);
    let formula = Rational::from_integer(1) + q(n * (r - 1), n + 1);
    assert_eq!(e.value, q(13, 5));
    assert_eq!(e.value, formula);
    assert!(e.is_accepted(&atoms));
    assert_eq!(md, 2);
    format!("rho={} min_delta={md} formula={formula}", e.value)
}

fn prime_power_k() -> String {
    let g = grp("C3^3");
    let g2 = elems(&g, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]);
    let atoms = enumerate_atoms(&g, &g2, &EnumConfig::default()).unwrap();
    let (n1, r) = (3, 3);
    let formula = Rational::from_integer(1) + q((n1 - 1) * (r - 1), n1);
    assert_eq!(atoms.max_cross(), q(7, 3));
    assert_eq!(atoms.max_cross(), formula);
    let md = lengths::min_delta(&atoms);
    assert!(
        md > 0 && md % 2 == 0,
        "min_delta(G2) = {md} is not a positive multiple of 2"
    );

    let cfg = SweepConfig {
        max_subset_size: Some(8),
        with_elasticity: false,
        ..SweepConfig::default()
    };
    let sweep = sweep_subsets(&g, &cfg, None).unwrap();
    let k = sweep.k_of(2).unwrap().expect("G2 is swept");
    assert!(
        k.value <= q(7, 3),
        "capped sweep found K(G,2) = {}",
        k.value
    );
    assert_eq!(k.value, q(7, 3));
    assert!(!k.exact, "a capped sweep must not claim exactness");

    let full = sweep_subsets(
        &g,
        &SweepConfig {
            max_subset_size: None,
            ..cfg
        },
        None,
    )
    .unwrap();
    let exact = full.k_of(2).unwrap().expect("G2 is swept");
    assert!(exact.exact);
    assert_eq!(exact.value, q(7, 3), "uncapped sweep");
    format!(
        "max_cross(G2)={}; capped sweep ({} orbits, size <= 8): K(G,2) >= {} lower-bound certified; uncapped sweep ({} orbits): K(G,2) = {} exact",
        atoms.max_cross(),
        sweep.reports().len(),
        k.value,
        full.reports().len(),
        exact.value
    )
}

fn system_identity() -> String {
    let eq = compare_systems(&grp("C3"), &grp("C2^2"), 18).unwrap();
    assert!(matches!(eq.verdict, Verdict::BoundedEqual));
    let ne = compare_systems(&grp("C3"), &grp("C4"), 12).unwrap();
    let Verdict::Differ(cert) = &ne.verdict else {
        panic!("C3 and C4 reported equal up to 12");
    };
    assert!(cert.verified, "certificate failed re-verification");
    format!(
        "C3~C2^2 bounded-equal ({} sets); C3 vs C4 differ: {} from {} in {}, {} exclusion",
        eq.left_count,
        cert.witness,
        cert.sequence,
        cert.realized_in,
        cert.tier.as_str()
    )
}

/// Zero-sum exponent vectors over `G ∖ 0` of length `1..=cap`.
fn zero_sums(g: &GroupSpec, nz: &[GElement], cap: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let bound = vec![cap; nz.len()];
    for_each_below_len(&bound, cap, &mut |v| {
        let mut s = g.zero();
        for (x, &k) in nz.iter().zip(v) {
            s = g.add(&s, &g.scale(k as i64, x));
        }
        if s.is_zero() && v.iter().any(|&k| k > 0) {
            out.push(v.to_vec());
        }
    });
    out
}

fn oracle_equivalence() -> String {
    let (mut subsets, mut products, mut short_b, mut with_deltas) = (0, 0, 0, 0);
    for g in small_groups() {
        let nz = g.nonzero_elements().unwrap();
        let mut by_support: HashMap<Vec<GElement>, (zslab::AtomSet, Vec<Vec<u32>>)> =
            HashMap::new();
        for subset in all_subsets(&g) {
            let atoms = enumerate_atoms(&g, &subset, &EnumConfig::default()).unwrap();
            let brute: Vec<Vec<u32>> = brute_atoms(&g, atoms.subset()).into_iter().collect();
            // (a)
            let mine: BTreeSet<Vec<u32>> = atoms.exponents().iter().cloned().collect();
            assert_eq!(
                mine,
                brute.iter().cloned().collect(),
                "{g} {subset:?}: atoms"
            );
            // (b) on every product of at most two atoms
            let ex = atoms.exponents();
            for i in 0..ex.len() {
                for j in i..ex.len() {
                    let b: Vec<u32> = ex[i].iter().zip(&ex[j]).map(|(x, y)| x + y).collect();
                    let seq = Sequence::from_counts(
                        &g,
                        atoms.subset().iter().cloned().zip(b.iter().copied()),
                    )
                    .unwrap();
                    let l = lengths::length_set(&seq, &atoms).unwrap();
                    let want: Vec<u64> = brute_lengths(&brute, &b).into_iter().collect();
                    assert_eq!(l.as_slice(), want.as_slice(), "{g} {seq}");
                    products += 1;
                }
            }
            // (c)
            let md = lengths::min_delta(&atoms);
            let deltas = lengths::delta_bounded(&atoms, 2 * atoms.davenport() + 2).unwrap();
            if !deltas.is_empty() {
                let gcd = deltas.iter().fold(0u64, |a, b| a.gcd(b));
                assert_eq!(md, gcd, "{g} {subset:?}: min_delta vs gcd of {deltas:?}");
                with_deltas += 1;
            }
            // (d)
            assert_eq!(
                lengths::is_half_factorial(&atoms),
                md == 0,
                "{g} {subset:?}"
            );
            subsets += 1;
            let key = atoms.subset().to_vec();
            by_support.insert(key, (atoms, brute));
        }
        // (b) on every zero-sum sequence of length at most 10, over its support
        for v in zero_sums(&g, &nz, 10) {
            let supp: Vec<usize> = (0..nz.len()).filter(|&i| v[i] > 0).collect();
            let key: Vec<GElement> = supp.iter().map(|&i| nz[i].clone()).collect();
            let (atoms, brute) = by_support
                .iter()
                .find(|(k, _)| k.len() == key.len() && key.iter().all(|x| k.contains(x)))
                .map(|(_, v)| v)
                .expect("every support was enumerated");
            let counts: Vec<u32> = atoms
                .subset()
                .iter()
                .map(|x| v[nz.iter().position(|y| y == x).unwrap()])
                .collect();
            let seq = Sequence::from_counts(
                &g,
                atoms.subset().iter().cloned().zip(counts.iter().copied()),
            )
            .unwrap();
            let l = lengths::length_set(&seq, atoms).unwrap();
            let want: Vec<u64> = brute_lengths(brute, &counts).into_iter().collect();
            assert_eq!(l.as_slice(), want.as_slice(), "{g} {seq}");
            short_b += 1;
        }
    }
    format!(
        "{subsets} subsets of 12 groups; {products} two-atom products and {short_b} sequences of length <= 10 factored; {with_deltas} bounded distance sets"
    )
}

/// Every group of order at most 17, and those of order 18 to 27 that finish in
/// a few minutes on one core.
const SWEPT: [&str; 31] = [
    "C2", "C3", "C4", "C2^2", "C5", "C6", "C7", "C8", "C2xC4", "C2^3", "C9", "C3^2", "C10", "C11",
    "C12", "C2xC6", "C13", "C14", "C15", "C16", "C2xC8", "C4^2", "C2^2xC4", "C2^4", "C17", "C3xC6",
    "C18", "C19", "C2xC10", "C2^2xC6", "C3^3",
];

fn inequality_suite() -> String {
    let mut checked = 0;
    for name in SWEPT {
        let g = grp(name);
        let sweep = sweep_subsets(&g, &SweepConfig::default(), None).unwrap();
        assert!(sweep.is_exact(), "{name}: sweep incomplete");
        let (r, exp) = (g.rank() as i64, g.exponent() as i64);
        let mut davenport = 0;
        for rep in sweep.reports() {
            let s = rep.stats.as_ref().unwrap();
            assert_eq!(
                s.half_factorial,
                s.min_delta == 0,
                "{name} {:?}",
                rep.subset
            );
            davenport = davenport.max(s.davenport);
        }
        let star = sweep.delta_star().unwrap().value;
        for &d in &star {
            let rho = sweep.rho_star(d).unwrap().expect("d is realized").value;
            let k = sweep.k_of(d).unwrap().expect("d is realized").value;
            assert!(rho >= k, "{name}: rho*(G,{d}) = {rho} < K(G,{d}) = {k}");
            checked += 1;
        }
        let m = sweep.m().unwrap().value as i64;
        let m_bound = (r - 1).max(exp / 2 - 1).max(0);
        assert!(m <= m_bound, "{name}: m = {m} > {m_bound}");
        if davenport >= 4 {
            let max = star.iter().max().copied().unwrap_or(0) as i64;
            assert_eq!(max, (exp - 2).max(r - 1), "{name}: max Delta*");
        }
        if g.order() >= 3 {
            let need: BTreeSet<u64> = [1, r - 1, exp - 2]
                .into_iter()
                .filter(|&v| v >= 1)
                .map(|v| v as u64)
                .collect();
            assert!(need.is_subset(&star), "{name}: {need:?} not in {star:?}");
        }
        checked += 3;
    }
    format!(
        "{} groups fully swept ({}), {checked} inequalities",
        SWEPT.len(),
        SWEPT.join(" ")
    )
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let min = |m: u64| Duration::from_secs(60 * m);
    let results = [
        criterion(
            1,
            "elasticity equals D/2",
            Duration::from_secs(10),
            elasticity_law,
        ),
        criterion(2, "cross number of p-groups", min(10), cross_number_law),
        criterion(
            3,
            "distance-set configurations",
            min(1),
            distance_configurations,
        ),
        criterion(4, "rho* for cyclic groups", min(5), cyclic_rho_star),
        criterion(5, "witness elasticity in C4^3", min(2), witness_elasticity),
        criterion(6, "K(C3^3, 2) prime-power bound", min(120), prime_power_k),
        criterion(7, "systems of sets of lengths", min(5), system_identity),
        criterion(
            8,
            "oracle equivalence on groups of order <= 9",
            min(10),
            oracle_equivalence,
        ),
        criterion(
            9,
            "inequality suite on fully swept groups",
            min(30),
            inequality_suite,
        ),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", results.len());
    let mut unexpected = 0;
    for (i, &ok) in results.iter().enumerate() {
        if ok {
            continue;
        }
        match KNOWN_UNATTAINABLE.iter().find(|(n, _)| *n == i + 1) {
            Some((n, why)) => println!("criterion {n} is known to be unattainable: {why}"),
            None => unexpected += 1,
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
