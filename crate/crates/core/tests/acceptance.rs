//! Acceptance suite. Runs every criterion in sequence, prints one PASS/FAIL
//! line per criterion and fails if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use psdrank::cutpoly::{
    appendix_reduction_check, cut_clique_slack, cuts, graph_g, graph_h, DEFAULT_APPENDIX_CAP, DEFAULT_SUBSET_CAP,
};
use psdrank::embed::{embedding_from_psd, embedding_from_rank_factorization, psd_from_embedding, verify_embedding};
use psdrank::exact::{Field, QMatrix, Rational};
use psdrank::io::to_f64;
use psdrank::pattern::{
    boolean_rank, feasible_biclique_cover, support, triangular_rank, SupportPattern,
};
use psdrank::psd::{
    barvinok_reduce, generate_sn, order3_exclusion, realize_support, reduce_factor_ranks, FloatPsdMatrix,
    PsdFactorization, ReduceOptions, SqrtOptions,
};
use rand::Rng;
use rayon::prelude::*;

use common::*;

const BUDGET: u64 = 10_000_000;

fn literal() -> SqrtOptions {
    SqrtOptions {
        fix_global_sign: false,
        ..SqrtOptions::default()
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    if took <= limit {
        Ok(())
    } else {
        Err(format!("{what} took {took:?}, limit {limit:?}"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_s6_rank() -> Result<(), String> {
    let start = Instant::now();
    let r = generate_sn(6).unwrap().rank();
    within(start, Duration::from_millis(100), "rank(S_6)")?;
    ensure(r == 3, || format!("rank(S_6) = {r}"))
}

fn c2_s6_certificate() -> Result<(), String> {
    let start = Instant::now();
    let s6 = generate_sn(6).unwrap();
    let cert = order3_exclusion(&s6, literal()).unwrap();
    within(start, Duration::from_secs(2), "order3_exclusion(S_6)")?;
    ensure(cert.proves_bound(), || "no certificate".into())?;
    ensure(cert.rows == vec![2, 3, 4, 5], || format!("rows {:?}", cert.rows))?;
    ensure(cert.cols == vec![0, 1, 2, 3], || format!("cols {:?}", cert.cols))?;
    let e = cert.enumeration.as_ref().unwrap();
    ensure(e.assignments_checked == 512, || format!("{} assignments", e.assignments_checked))?;
    ensure(e.rank_counts.len() == 1 && e.rank_counts.get(&4) == Some(&512), || {
        format!("rank histogram {:?}", e.rank_counts)
    })?;
    // the witness lives in Q(sqrt 2, sqrt 3)
    let gens: Vec<u64> = e
        .witness_matrix
        .entries()
        .iter()
        .flat_map(|x| x.generators())
        .collect();
    ensure(gens.iter().all(|g| [2, 3].contains(g)), || format!("generators {gens:?}"))
}

fn c3_family() -> Result<(), String> {
    let start = Instant::now();
    for n in 6..=12 {
        let s = generate_sn(n).unwrap();
        ensure(s.rank() == 3, || format!("rank(S_{n}) = {}", s.rank()))?;
        let cert = order3_exclusion(&s, SqrtOptions::default()).unwrap();
        ensure(cert.proves_bound(), || format!("S_{n} inconclusive"))?;
        ensure(cert.window == (6, 6), || format!("S_{n} certified on window {:?}", cert.window))?;
    }
    within(start, Duration::from_secs(5), "family n = 6..12")
}

/// Everything criterion 4 computes for one matrix, compared across thread counts.
#[derive(Clone, PartialEq, Debug)]
struct RoundtripOutcome {
    rank: usize,
    ambient: usize,
    forward_ok: bool,
    psd_support_ok: bool,
    back_ok: bool,
    triangular: usize,
    factorization: PsdFactorization,
}

fn roundtrip_matrices() -> Vec<QMatrix> {
    let mut r = rng(4);
    (0..200).map(|_| random_rational(&mut r, 6)).collect()
}

fn roundtrip(s: &QMatrix) -> RoundtripOutcome {
    let p = support(s);
    let e = embedding_from_rank_factorization(s);
    let (f, t) = psd_from_embedding(&e);
    let back = embedding_from_psd(&f).unwrap();
    RoundtripOutcome {
        rank: s.rank(),
        ambient: e.ambient_dim(),
        forward_ok: verify_embedding(&e, &p).unwrap(),
        psd_support_ok: support(&t) == p,
        back_ok: verify_embedding(&back, &support(&t)).unwrap(),
        triangular: triangular_rank(&p).0,
        factorization: f,
    }
}

fn run_c4() -> Vec<RoundtripOutcome> {
    roundtrip_matrices().par_iter().map(roundtrip).collect()
}

fn c4_roundtrips() -> Result<(), String> {
    let out = run_c4();
    let bad: Vec<usize> = out
        .iter()
        .enumerate()
        .filter(|(_, o)| {
            !(o.forward_ok && o.psd_support_ok && o.back_ok && o.ambient == o.rank && o.triangular <= o.rank)
        })
        .map(|(i, _)| i)
        .collect();
    ensure(out.len() == 200 && bad.is_empty(), || format!("failures at {bad:?}"))
}

fn bool_patterns() -> Vec<SupportPattern> {
    let mut all: Vec<SupportPattern> = (0u32..512).map(|m| SupportPattern::from_fn(3, 3, |i, j| m >> (3 * i + j) & 1 == 1)).collect();
    let mut r = rng(5);
    all.extend((0..100).map(|_| random_pattern(&mut r, 5, 5)));
    all
}

fn run_c5() -> Vec<Option<usize>> {
    bool_patterns().par_iter().map(|p| boolean_rank(p, BUDGET).exact()).collect()
}

fn c5_boolean_rank() -> Result<(), String> {
    let start = Instant::now();
    let got = run_c5();
    let patterns = bool_patterns();
    let mismatches: Vec<usize> = patterns
        .iter()
        .zip(&got)
        .enumerate()
        .filter(|(_, (p, g))| **g != Some(brute_force_boolean_rank(p)))
        .map(|(i, _)| i)
        .collect();
    within(start, Duration::from_secs(60), "boolean rank sweep")?;
    ensure(mismatches.is_empty(), || format!("mismatches at {mismatches:?}"))
}

fn c6_triangular_rank() -> Result<(), String> {
    let mut r = rng(6);
    for i in 0..100 {
        let p = random_pattern(&mut r, 5, 5);
        let (t, w) = triangular_rank(&p);
        let oracle = brute_force_triangular_rank(&p);
        ensure(t == oracle && w.is_valid_for(&p), || format!("pattern {i}: {t} vs oracle {oracle}"))?;
    }
    let s6 = support(&generate_sn(6).unwrap());
    let (t, _) = triangular_rank(&s6);
    ensure(t == 3 && brute_force_triangular_rank(&s6) == 3, || format!("supp(S_6) gives {t}"))
}

fn run_c7(factorizations: &[PsdFactorization]) -> Vec<Result<(QMatrix, usize), String>> {
    factorizations
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            realize_support(f, 1000 + i as u64, 5)
                .map(|r| (r.matrix, r.tries))
                .map_err(|e| e.to_string())
        })
        .collect()
}

fn c7_support_realization() -> Result<(), String> {
    let facts: Vec<PsdFactorization> = run_c4().into_iter().take(100).map(|o| o.factorization).collect();
    for (i, (f, res)) in facts.iter().zip(run_c7(&facts)).enumerate() {
        let (t, _) = res.map_err(|e| format!("run {i}: {e}"))?;
        let target = support(&f.product_matrix());
        ensure(support(&t) == target, || format!("run {i}: support differs"))?;
        ensure(naive_rank(&t) <= f.order(), || format!("run {i}: rank {} > {}", t.rank(), f.order()))?;
    }
    Ok(())
}

fn random_psd_instance(seed: u64) -> (DMatrix<f64>, Vec<(DMatrix<f64>, f64)>) {
    let mut r = rng(seed);
    let g = DMatrix::from_fn(6, 6, |_, _| r.random_range(-1.0..1.0));
    let x = &g * g.transpose();
    let cons = (0..3)
        .map(|_| {
            let a = DMatrix::from_fn(6, 6, |_, _| r.random_range(-1.0..1.0));
            let a = (&a + a.transpose()) * 0.5;
            let alpha = a.component_mul(&x).sum();
            (a, alpha)
        })
        .collect();
    (x, cons)
}

fn c8_rank_reduction() -> Result<(), String> {
    for seed in 0..50 {
        let (x, cons) = random_psd_instance(800 + seed);
        let start = FloatPsdMatrix::from_symmetric(&x, 1e-9).map_err(|e| e.to_string())?;
        let red = barvinok_reduce(&start, &cons, ReduceOptions::default()).map_err(|e| format!("seed {seed}: {e}"))?;
        let out = red.matrix.matrix();
        let rank = red.matrix.numerical_rank(1e-9);
        let residual = cons
            .iter()
            .map(|(a, alpha)| (a.component_mul(&out).sum() - alpha).abs())
            .fold(0.0, f64::max);
        let min_eig = red.matrix.min_eigenvalue();
        ensure(rank <= 2, || format!("seed {seed}: rank {rank}"))?;
        ensure(residual <= 1e-6, || format!("seed {seed}: residual {residual:e}"))?;
        ensure(min_eig >= -1e-8, || format!("seed {seed}: min eigenvalue {min_eig:e}"))?;
        ensure(red.ranks.windows(2).all(|w| w[1] <= w[0]), || format!("seed {seed}: ranks {:?}", red.ranks))?;
    }
    let s6 = generate_sn(6).unwrap();
    // the projection factorization represents T, which shares the support of S_6
    let (f, t) = psd_from_embedding(&embedding_from_rank_factorization(&s6));
    let a: Vec<_> = f.row_factors().iter().map(to_f64).collect();
    let b: Vec<_> = f.col_factors().iter().map(to_f64).collect();
    let out = reduce_factor_ranks(&a, &b, &to_f64(&t), ReduceOptions::default()).map_err(|e| e.to_string())?;
    ensure(out.row_ranks.iter().chain(&out.col_ranks).all(|&r| r <= 3), || {
        format!("ranks {:?} {:?}", out.row_ranks, out.col_ranks)
    })?;
    ensure(out.max_residual <= 1e-6, || format!("factor residual {:e}", out.max_residual))
}

fn c9_appendix() -> Result<(), String> {
    let zero = Rational::from_integer(0.into());
    for n in 4..=6 {
        let g = graph_g(n).unwrap();
        ensure(cuts(n).len() == 1 << (n - 1) && g.cuts.len() == 1 << (n - 1), || format!("cut count for n = {n}"))?;
        for (i, u) in g.cliques.iter().enumerate() {
            for (j, w) in g.cuts.iter().enumerate() {
                let by_slack = cut_clique_slack(u, w).unwrap() > zero;
                let inside = (u.vertices() & w.side()).count_ones();
                let by_split = 2 * inside != u.size();
                let edge = g.graph.has_edge(i, j);
                ensure(edge == by_slack && edge == by_split, || format!("n = {n}, pair ({i}, {j})"))?;
            }
        }
    }
    let check = appendix_reduction_check(18, DEFAULT_APPENDIX_CAP).unwrap();
    ensure(check.pass && check.pairs_checked == 1296, || format!("{check:?}"))?;

    let d = graph_h(5, 1, DEFAULT_SUBSET_CAP).unwrap();
    let res = feasible_biclique_cover(&d.h, &d.hbar, BUDGET).unwrap();
    ensure(res.exact() == Some(4), || format!("feasible cover {:?}", res.bounds()))?;
    ensure(res.cover().verify(&d.h, &d.hbar), || "cover touches a forbidden edge".into())?;
    let oracle = brute_force_cover(&d.h.to_pattern(), &d.hbar.to_pattern());
    let crown = brute_force_boolean_rank(&SupportPattern::identity(5).complement());
    ensure(oracle == 4 && crown == 4, || format!("oracle {oracle}, crown {crown}"))?;
    ensure(d.h.is_edge_disjoint(&d.hbar) && d.h.edge_count() > 0, || "H and its complement graph share an edge".into())
}

fn with_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

fn c10_determinism() -> Result<(), String> {
    let c4_1 = with_threads(1, run_c4);
    let c4_4 = with_threads(4, run_c4);
    ensure(c4_1 == c4_4, || "criterion 4 differs across thread counts".into())?;
    ensure(with_threads(1, run_c5) == with_threads(4, run_c5), || "criterion 5 differs".into())?;
    let facts: Vec<PsdFactorization> = c4_1.into_iter().take(100).map(|o| o.factorization).collect();
    ensure(with_threads(1, || run_c7(&facts)) == with_threads(4, || run_c7(&facts)), || "criterion 7 differs".into())?;
    let s6 = generate_sn(6).unwrap();
    let w1 = with_threads(1, || order3_exclusion(&s6, literal()).unwrap());
    let w4 = with_threads(4, || order3_exclusion(&s6, literal()).unwrap());
    ensure(w1 == w4, || "certificate differs".into())
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Result<(), String>);
    let criteria: [Criterion; 10] = [
        ("1 S_6 rank is 3", c1_s6_rank),
        ("2 S_6 order-3 exclusion, 512 assignments of rank 4", c2_s6_certificate),
        ("3 S_n family n = 6..12", c3_family),
        ("4 embedding/psd roundtrips on 200 matrices", c4_roundtrips),
        ("5 Boolean rank vs brute force", c5_boolean_rank),
        ("6 triangular rank vs exhaustive sequences", c6_triangular_rank),
        ("7 support realization on 100 factorizations", c7_support_realization),
        ("8 psd rank reduction", c8_rank_reduction),
        ("9 cut/clique and disjointness constructions", c9_appendix),
        ("10 determinism at 1 and 4 threads", c10_determinism),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("PASS  criterion {name} ({:.2?})", start.elapsed()),
            Err(msg) => {
                println!("FAIL  criterion {name}: {msg}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn zero_entry_of_s6_is_field_zero() {
    let s6 = generate_sn(6).unwrap();
    assert!(s6.get(1, 0).is_zero());
    // zeros sit on the first two subdiagonals
    assert_eq!(support(&s6).count_zeros(), 5 + 4);
}
