//! Acceptance checks, one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use goodpair::definiteness::{decide, verify, Budget, Kind};
use goodpair::gbsp::{
    covering_count, critical_exponent, probe_phi, series_oracle, CoverProbe, PowerLawData, DEFAULT_MAX_SHELLS,
};
use goodpair::manifolds::{build_quadratic_system, ex1_coefficients, lambda_det, m_delta_system, ManifoldSpec};
use goodpair::matrices::search::{search, SearchConfig};
use goodpair::matrices::{
    block_compose, canonical_form, canonical_id, det_symbolic, m24, m37, partition_substitution, rank,
    specialize_vars, Alphabet, AlphabetSpec,
};
use goodpair::rational::{int, ratio};
use goodpair::{LinearForm, Poly, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> std::result::Result<(), String> {
    ensure(elapsed < limit, format!("{what} took {elapsed:.1?}, limit {limit:?}"))
}

fn poly(vars: usize, terms: &[(&[u32], i64)]) -> Poly {
    Poly::from_int_terms(vars, terms).expect("valid terms")
}

fn e(err: goodpair::Error) -> String {
    err.to_string()
}

fn determinant_of_m37() -> Check {
    let t = Instant::now();
    let det = det_symbolic(&m37());
    let expected = poly(3, &[(&[4, 0, 0], 1), (&[2, 2, 0], 2), (&[0, 4, 0], 1), (&[0, 0, 4], 4)]);
    ensure(det == expected, format!("det = {det}"))?;
    within(t.elapsed(), Duration::from_secs(1), "determinant")?;
    Ok(format!("det = {det} in {:.1?}", t.elapsed()))
}

fn determinant_of_m24() -> Check {
    let t = Instant::now();
    let det = det_symbolic(&m24());
    ensure(det == poly(2, &[(&[2, 0], -1), (&[0, 2], -1)]), format!("det = {det}"))?;
    let v = decide(&det, &Budget::default()).map_err(e)?;
    ensure(v.kind == Kind::NegativeDefinite, format!("verdict {:?}", v.kind))?;
    ensure(verify(&det, &v).map_err(e)?, "certificate does not re-verify")?;
    within(t.elapsed(), Duration::from_secs(1), "decision")?;
    Ok(format!("det = {det}, NegativeDefinite, certificate re-verified in {:.1?}", t.elapsed()))
}

fn ex1_identity() -> Check {
    let deltas = [int(2), int(-2), int(1), int(-1), ratio(1, 2), ratio(-1, 2), int(0)];
    for d in &deltas {
        let c = ex1_coefficients(&m_delta_system(d)).map_err(e)?;
        let expected = (int(-4) - d * d, int(-4), int(-8));
        ensure(
            (c.a1.clone(), c.a2.clone(), c.a3.clone()) == expected,
            format!("δ = {d}: got ({}, {}, {})", c.a1, c.a2, c.a3),
        )?;
        ensure(c.criterion_holds() == (*d != int(0)), format!("criterion wrong at δ = {d}"))?;
        let v = decide(&c.quadratic(), &Budget::default()).map_err(e)?;
        let want_definite = *d != int(0);
        ensure(v.kind.is_definite() == want_definite, format!("δ = {d}: verdict {:?}", v.kind))?;
        if !want_definite {
            ensure(v.kind == Kind::Indefinite, format!("δ = 0: verdict {:?}", v.kind))?;
        }
        ensure(verify(&c.quadratic(), &v).map_err(e)?, format!("δ = {d}: verdict does not re-verify"))?;
    }
    Ok(format!("(−4−δ², −4, −8) at {} values of δ; δ = 0 is Indefinite", deltas.len()))
}

fn lemma_roundtrip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a07a);
    let mut done = 0;
    while done < 100 {
        let l = rng.gen_range(2..=3);
        let size = rng.gen_range(1..=4);
        let alphabet = Alphabet::new(l, AlphabetSpec::Lemma).map_err(e)?;
        let codes: Vec<u16> = (0..size * (size + 1) / 2).map(|_| rng.gen_range(0..alphabet.len() as u16)).collect();
        let m = alphabet.decode(size, &codes);
        let forms: Vec<LinearForm> = (0..l)
            .map(|_| LinearForm::new((0..l).map(|_| int(rng.gen_range(-3..=3))).collect()))
            .collect();
        if rank(&forms) < l {
            continue;
        }
        let sys = build_quadratic_system(&m, &forms).map_err(e)?;
        let lhs = lambda_det(&sys);
        let rhs = det_symbolic(&m).substitute_linear(&forms).map_err(e)?;
        ensure(lhs == rhs, format!("mismatch for\n{m}\nwith L = {forms:?}"))?;
        done += 1;
    }
    Ok("det Λ = det M ∘ L on 100 random pairs".into())
}

fn search_rediscovery() -> Check {
    let small = search(&SearchConfig::new(2, 4)).map_err(e)?;
    let id24 = canonical_id(&canonical_form(&m24()).map_err(e)?);
    ensure(small.summary.exhaustive, "(2,4) search not exhaustive")?;
    ensure(small.canonical_ids().contains(&id24.as_str()), "(2,4) search misses M24")?;

    let t = Instant::now();
    let big = search(&SearchConfig::new(3, 7)).map_err(e)?;
    let elapsed = t.elapsed();
    let id37 = canonical_id(&canonical_form(&m37()).map_err(e)?);
    ensure(big.summary.exhaustive, "(3,7) search not exhaustive")?;
    ensure(big.summary.stats.definite >= 1, "(3,7) search found no definite candidate")?;
    ensure(big.canonical_ids().contains(&id37.as_str()), "(3,7) search misses M37")?;
    for c in &big.candidates {
        ensure(c.reverify().map_err(e)?, format!("candidate {} fails re-verification", c.canonical_id))?;
    }
    within(elapsed, Duration::from_secs(3600), "(3,7) search")?;
    Ok(format!(
        "(2,4): {} accepted; (3,7): {} scanned, {} accepted, {} unknown, M37 id {id37} present, {elapsed:.1?}",
        small.candidates.len(),
        big.summary.stats.scanned,
        big.candidates.len(),
        big.summary.stats.unknown
    ))
}

fn obstruction_soundness() -> Check {
    let mut cfg = SearchConfig::new(2, 5);
    cfg.force = true;
    cfg.prune_symmetry = false;
    let a = search(&cfg).map_err(e)?;
    let s = &a.summary.stats;
    ensure(a.candidates.is_empty(), format!("(2,5) emitted {} candidates", a.candidates.len()))?;
    ensure(a.summary.exhaustive, "(2,5) not exhaustive")?;
    ensure(s.refuted() == s.scanned && s.exact_witnesses == s.scanned, format!("(2,5) stats {s:?}"))?;

    let mut cfg = SearchConfig::new(3, 5);
    cfg.force = true;
    let b = search(&cfg).map_err(e)?;
    ensure(b.candidates.is_empty(), format!("(3,5) emitted {} candidates", b.candidates.len()))?;
    ensure(b.summary.exhaustive, "(3,5) not exhaustive")?;
    ensure(b.summary.stats.unknown == 0, "(3,5) left unknowns")?;
    Ok(format!(
        "(2,5): {} scanned, all with exact witnesses; (3,5): {} scanned; no candidates",
        s.scanned, b.summary.stats.scanned
    ))
}

fn going_up_and_down() -> Check {
    let up = block_compose(&m24(), &m24()).map_err(e)?;
    let det = det_symbolic(&up);
    let expected = poly(2, &[(&[4, 0], 1), (&[2, 2], 2), (&[0, 4], 1)]);
    ensure(det == expected, format!("block det = {det}"))?;
    let v = decide(&det, &Budget::default()).map_err(e)?;
    ensure(v.kind == Kind::PositiveDefinite && verify(&det, &v).map_err(e)?, format!("block verdict {:?}", v.kind))?;

    let merge = vec![vec![0, 1], vec![2]];
    let images = partition_substitution(3, &merge).map_err(e)?;
    let down = det_symbolic(&m37()).substitute(&images).map_err(e)?;
    let expected = poly(2, &[(&[4, 0], 4), (&[0, 4], 4)]);
    ensure(down == expected, format!("specialized det = {down}"))?;
    ensure(det_symbolic(&specialize_vars(&m37(), &merge).map_err(e)?) == down, "specialization does not commute")?;
    let v = decide(&down, &Budget::default()).map_err(e)?;
    ensure(v.kind == Kind::PositiveDefinite && verify(&down, &v).map_err(e)?, format!("specialized verdict {:?}", v.kind))?;
    Ok(format!("M24 ⊕ M24 → {det}; z2 ↦ z1 on M37 → {down} (variables z1, z3); both PositiveDefinite"))
}

fn series_dichotomy() -> Check {
    let t = Instant::now();
    let tau = int(7);
    let s_star = critical_exponent(7, 3, &tau).map_err(e)?;
    ensure(s_star == int(4), format!("s* = {s_star}"))?;
    let conv = series_oracle(&PowerLawData::new(7, 3, tau.clone(), int(5)).map_err(e)?, 500, DEFAULT_MAX_SHELLS)
        .map_err(e)?;
    let r = conv.ratio(500, 250);
    ensure(r < 1.01, format!("T(500)/T(250) = {r}"))?;
    let div = series_oracle(&PowerLawData::new(7, 3, tau, int(3)).map_err(e)?, 500, DEFAULT_MAX_SHELLS).map_err(e)?;
    ensure(div.term_exceeds(500, 1, &ratio(1, 2)), "last shell term is not above half the first")?;
    within(t.elapsed(), Duration::from_secs(30), "series oracle")?;
    Ok(format!("s* = 4; T(500)/T(250) = {r:.6} at s = 5; divergence signal at s = 3; {:.1?}", t.elapsed()))
}

fn covering_probe() -> Check {
    let t = Instant::now();
    let ladder: Vec<Rational> = (3..=9).map(|k| ratio(1, 1 << k)).collect();
    let zero = |d: usize| vec![int(0); d];

    let slab = covering_count(&CoverProbe::new(poly(2, &[(&[1, 0], 1)]), zero(2), int(1)), &ladder).map_err(e)?;
    ensure((slab.slope - 1.0).abs() <= 0.1, format!("slab slope {}", slab.slope))?;

    let md = ManifoldSpec::m_delta(&int(1)).map_err(e)?;
    let phi = probe_phi(&md, &[int(1), int(0)], &[int(1), int(0)], &int(0)).map_err(e)?;
    let mdr = covering_count(&CoverProbe::new(phi, zero(2), int(1)), &ladder).map_err(e)?;
    ensure((mdr.slope - 1.0).abs() <= 0.3, format!("M_δ slope {}", mdr.slope))?;

    let m = ManifoldSpec::m37();
    let phi = probe_phi(&m, &[int(1), int(0), int(0), int(0)], &[int(1), int(0), int(0)], &int(0)).map_err(e)?;
    let big = covering_count(&CoverProbe::new(phi, zero(4), ratio(1, 4)), &ladder).map_err(e)?;
    ensure((big.slope - 3.0).abs() <= 0.3, format!("M37 slope {}", big.slope))?;

    within(t.elapsed(), Duration::from_secs(300), "covering probes")?;
    Ok(format!(
        "slab {:.3}, M_δ {:.3}, M37 system {:.3}; {:.1?}",
        slab.slope,
        mdr.slope,
        big.slope,
        t.elapsed()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("symbolic determinant of the 4x4 matrix", determinant_of_m37),
        ("determinant and certificate of M24", determinant_of_m24),
        ("Ex1 coefficients for M_δ", ex1_identity),
        ("Λ determinant roundtrip", lemma_roundtrip),
        ("search rediscovery at (2,4) and (3,7)", search_rediscovery),
        ("obstruction soundness at (2,5) and (3,5)", obstruction_soundness),
        ("going up and going down", going_up_and_down),
        ("series dichotomy at (7,3,7)", series_dichotomy),
        ("covering-count slopes", covering_probe),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
