//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Ground truth comes from the naive helpers in `common`.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use almost_group::decision::{Answer, DecidedBy, Evidence};
use almost_group::oracle::reachable_subsets;
use almost_group::perm_group::DEFAULT_BLOCK_LATTICE_CAP;
use almost_group::random::{random_almost_group, random_defect_letter, rng_for};
use almost_group::rystsov::{
    build_hierarchy, d1_set, gamma1, profile_of, profile_step, reachable_profiles, translated_edges_check,
    DefectProfile, RystsovHierarchy,
};
use almost_group::{classify_shape, decide, standardize, Automaton, DecideOptions, Outcome, StateSet, Word};
use common::{fixture, set1};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 200 instances, n in 4..=8, one to three permutation letters, with and
/// without a post-permuted defect letter.
fn corpus() -> Vec<Automaton> {
    (0..200u64)
        .map(|i| {
            let n = 4 + (i % 5) as usize;
            let m = 1 + (i / 5 % 3) as usize;
            random_almost_group(n, m, 1000 + i, i % 2 == 1).unwrap()
        })
        .collect()
}

/// Standardized copy plus hierarchy, for transitive instances that admit one.
fn hierarchy_of(a: &Automaton) -> Option<(Automaton, RystsovHierarchy)> {
    let s = classify_shape(a).ok()?;
    if !s.generators(a).is_transitive() {
        return None;
    }
    let (b, _) = standardize(a, &s).ok()?;
    let sb = classify_shape(&b).unwrap();
    let h = build_hierarchy(&b, &sb).unwrap();
    Some((b, h))
}

fn raw_group(a: &Automaton) -> Vec<Vec<usize>> {
    let s = classify_shape(a).unwrap();
    let gens: Vec<Vec<usize>> = s
        .perm_letters
        .iter()
        .map(|&i| a.letter(i).map.images().to_vec())
        .collect();
    common::group(&gens, a.n())
}

fn e18_regression() -> Check {
    let start = Instant::now();
    let a = fixture("e18.aut");
    let s = classify_shape(&a).map_err(|e| e.to_string())?;
    ensure((s.e, s.d, s.coll) == (0, 5, (0, 4)), || {
        format!("shape e={} d={} coll={:?}", s.e, s.d, s.coll)
    })?;

    let gens = s.generators(&a);
    let blocks = gens
        .blocks_containing(0, false, DEFAULT_BLOCK_LATTICE_CAP)
        .map_err(|e| e.to_string())?;
    let want = vec![set1(&[1, 5]), set1(&[1, 2, 3, 4, 5, 6])];
    ensure(blocks == want, || format!("blocks {blocks:?}"))?;
    let group = raw_group(&a);
    let brute: Vec<u64> = common::all_blocks_containing(&group, 18, 0)
        .into_iter()
        .filter(|b| b.count_ones() > 1 && b.count_ones() < 18)
        .collect();
    ensure(brute.len() == 2, || {
        format!("brute-force found {} nontrivial blocks", brute.len())
    })?;

    let d1 = d1_set(&reachable_profiles(&a, 1), 0);
    ensure(d1 == set1(&[3, 5, 6]), || format!("D1 = {d1}"))?;
    let g1 = gamma1(&a, &s).map_err(|e| e.to_string())?;
    let comps: Vec<StateSet> = (0..g1.scc.len()).map(|c| g1.scc_foliage(c)).collect();
    let thirds = vec![
        set1(&[1, 2, 3, 4, 5, 6]),
        set1(&[7, 8, 9, 10, 11, 12]),
        set1(&[13, 14, 15, 16, 17, 18]),
    ];
    ensure(comps == thirds, || format!("level-1 components {comps:?}"))?;

    // Profiles along w, wb, wbb with w = ab³aca, checked against direct composition.
    let letters = common::images(&a);
    let w = a.parse_word("a b b b a c a").unwrap();
    let expected = [
        (set1(&[1, 3]), set1(&[8, 6])),
        (set1(&[11, 12]), set1(&[9, 16])),
        (set1(&[13, 15]), set1(&[18, 2])),
    ];
    let mut p = DefectProfile::of(&a.word_transformation(&w));
    let mut word = w.0.clone();
    let mut profiles = Vec::new();
    for (i, &(excl, dupl)) in expected.iter().enumerate() {
        if i > 0 {
            p = profile_step(&a, &p, "b").unwrap();
            word.push(a.letter_index("b").unwrap());
        }
        let (ex, du) = common::excl_dupl(&common::word_images(&letters, &word, 18));
        ensure(
            (p.excl, p.dupl) == (excl, dupl) && (ex, du) == (excl.bits(), dupl.bits()),
            || format!("profile {i}: got ({}, {})", p.excl, p.dupl),
        )?;
        profiles.push(p);
    }

    let h = build_hierarchy(&a, &s).map_err(|e| e.to_string())?;
    let g2 = h.level(2).map_err(|e| e.to_string())?;
    ensure(h.levels.len() == 2 && g2.is_strongly_connected(), || {
        "level 2 not strongly connected".into()
    })?;
    let (c, b2, b3) = (g2.vertex_of_state(0), g2.vertex_of_state(6), g2.vertex_of_state(12));
    let cycle = [(c, b2), (b2, b3), (b3, c)];
    for (&(src, tgt), prof) in cycle.iter().zip(&profiles) {
        let fits = prof.excl.is_subset(g2.vertices[src].foliage) && !prof.dupl.is_disjoint(g2.vertices[tgt].foliage);
        ensure(fits && g2.has_edge(src, tgt) && h.profiles.contains(prof), || {
            format!("edge {src} -> {tgt} not witnessed by ({}, {})", prof.excl, prof.dupl)
        })?;
    }

    let (outcome, _) = decide(
        &a,
        &DecideOptions {
            oracle_fallback: false,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let v = outcome.verdict().ok_or("inconclusive")?;
    ensure(
        v.answer == Answer::CompletelyReachable && v.decided_by == DecidedBy::StronglyConnectedLevel(2),
        || format!("verdict {v}"),
    )?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("all values match, {took:.2?}"))
}

fn e18_oracle() -> Check {
    let start = Instant::now();
    let t = reachable_subsets(&fixture("e18.aut"), 24).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(t.reachable_count() == 262_143, || {
        format!("count {}", t.reachable_count())
    })?;
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!("262143 subsets in {took:.2?}"))
}

fn invariant_block() -> Check {
    let a = Automaton::from_images(4, &[("s", vec![1, 2, 3, 0]), ("a", vec![2, 1, 2, 3])]).unwrap();
    let (outcome, _) = decide(&a, &DecideOptions::default()).map_err(|e| e.to_string())?;
    let Outcome::Decided(v) = outcome else {
        return Err("inconclusive".into());
    };
    let block_ok = matches!(v.evidence, Evidence::InvariantBlock { block, .. } if block == common::set(&[0, 2]));
    ensure(
        v.answer == Answer::NotCompletelyReachable && v.decided_by == DecidedBy::InvariantBlock && block_ok,
        || format!("verdict {v}"),
    )?;
    let t = reachable_subsets(&a, 24).map_err(|e| e.to_string())?;
    let target = common::set(&[1, 3]);
    ensure(t.unreachable(usize::MAX).contains(&target), || {
        "{1,3} (0-indexed) not listed".into()
    })?;
    ensure(
        !common::reachable(&common::images(&a), 4).contains_key(&target.bits()),
        || "naive search reaches {1,3}".into(),
    )?;
    Ok("invariant block {0,2}, {1,3} unreachable (0-indexed)".into())
}

fn profile_soundness() -> Check {
    let mut checked = 0usize;
    for i in 0..50u64 {
        let n = 3 + (i % 4) as usize;
        let m = 1 + (i / 4 % 2) as usize;
        let a = random_almost_group(n, m, 2000 + i, i % 3 == 0).unwrap();
        let letters = common::images(&a);
        let k = letters.len();
        // Depth-first over every word of length at most 8.
        let mut stack: Vec<(Vec<usize>, DefectProfile)> = vec![(Vec::new(), DefectProfile::EMPTY)];
        while let Some((word, p)) = stack.pop() {
            let direct = profile_of(&a.word_transformation(&Word(word.clone())));
            let (ex, du) = common::excl_dupl(&common::word_images(&letters, &word, n));
            if p != direct || (p.excl.bits(), p.dupl.bits()) != (ex, du) {
                return Err(format!(
                    "instance {i}, word {:?}: step {:?} vs direct {:?}",
                    word, p, direct
                ));
            }
            checked += 1;
            if word.len() < 8 {
                for x in 0..k {
                    let mut w = word.clone();
                    w.push(x);
                    stack.push((w, profile_step(&a, &p, &a.letter(x).name).unwrap()));
                }
            }
        }
    }
    Ok(format!("{checked} words, zero mismatches"))
}

fn theory_oracle_agreement(corpus: &[Automaton]) -> Check {
    let (mut structural, mut by_oracle) = (0, 0);
    for (i, a) in corpus.iter().enumerate() {
        let (outcome, _) = decide(a, &DecideOptions::default()).map_err(|e| format!("instance {i}: {e}"))?;
        let v = outcome.verdict().ok_or_else(|| format!("instance {i}: inconclusive"))?;
        if v.decided_by == DecidedBy::Oracle {
            by_oracle += 1;
            continue;
        }
        structural += 1;
        let truth = common::is_completely_reachable(&common::images(a), a.n());
        ensure(v.is_completely_reachable() == truth, || {
            format!("instance {i}: {v}, naive search says {truth}")
        })?;
    }
    Ok(format!(
        "{structural} decided structurally, {by_oracle} by the oracle, zero disagreements"
    ))
}

fn foliage_blocks(corpus: &[Automaton]) -> Check {
    let mut levels = 0;
    for (i, a) in corpus.iter().enumerate() {
        let Some((b, h)) = hierarchy_of(a) else { continue };
        let group = raw_group(&b);
        let full = (1u64 << b.n()) - 1;
        for level in &h.levels {
            let mut covered = 0u64;
            for v in &level.vertices {
                let f = v.foliage.bits();
                ensure(covered & f == 0, || {
                    format!("instance {i}, level {}: foliages overlap", level.k)
                })?;
                covered |= f;
                ensure(common::is_block(&group, f), || {
                    format!("instance {i}, level {}: {} not a block", level.k, v.foliage)
                })?;
            }
            ensure(covered == full, || {
                format!("instance {i}, level {}: foliages miss states", level.k)
            })?;
            levels += 1;
        }
    }
    Ok(format!("{levels} levels, zero failures"))
}

fn edge_translation(corpus: &[Automaton]) -> Check {
    let mut count = 0;
    for (i, a) in corpus.iter().enumerate() {
        let Some((b, h)) = hierarchy_of(a) else { continue };
        let s = classify_shape(&b).unwrap();
        ensure(
            translated_edges_check(&h.levels[0], &s.generators(&b), s.e) == Ok(true),
            || format!("instance {i}: level-1 edges are not translates of the edges at e"),
        )?;
        count += 1;
    }
    Ok(format!("{count} transitive instances, zero failures"))
}

fn hoffman() -> Check {
    for i in 0..50u64 {
        let n = 4 + (i % 5) as usize;
        let a_map = random_defect_letter(n, i % 2 == 0, &mut rng_for(3000 + i));
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        let cycle: Vec<usize> = (0..n).map(|q| (q + 1) % n).collect();
        let a = Automaton::from_images(n, &[("a", a_map.images().to_vec()), ("t", swap), ("c", cycle)]).unwrap();
        let (outcome, _) = decide(&a, &DecideOptions::default()).map_err(|e| e.to_string())?;
        let v = outcome.verdict().ok_or("inconclusive")?;
        ensure(v.is_completely_reachable(), || format!("instance {i}: {v}"))?;
        let (_, h) = hierarchy_of(&a).ok_or_else(|| format!("instance {i}: no hierarchy"))?;
        ensure(h.levels[0].is_strongly_connected(), || {
            format!("instance {i}: level 1 not strongly connected")
        })?;
    }
    Ok("50 instances completely reachable, level 1 strongly connected".into())
}

fn word_length_bound(corpus: &[Automaton]) -> Check {
    let (mut instances, mut subsets) = (0, 0);
    for (i, a) in corpus.iter().enumerate().filter(|(_, a)| a.n() <= 7) {
        let n = a.n();
        let dist = common::reachable(&common::images(a), n);
        if dist.len() != (1 << n) - 1 {
            continue;
        }
        instances += 1;
        for (&m, &d) in &dist {
            let k = m.count_ones() as usize;
            if d > 2 * n * (n - k) {
                return Err(format!(
                    "BOUND VIOLATED: instance {i}, subset {} of size {k} needs {d} > {}",
                    StateSet(m),
                    2 * n * (n - k)
                ));
            }
            subsets += 1;
        }
        let stats = reachable_subsets(a, 24).unwrap().witness_length_stats();
        ensure(stats.violations().is_empty(), || {
            format!("instance {i}: oracle stats report a violation")
        })?;
    }
    Ok(format!("{instances} instances, {subsets} subsets, zero violations"))
}

fn standardization_neutrality() -> Check {
    let mut found = 0;
    let mut seed = 4000u64;
    while found < 50 {
        let n = 3 + (seed % 4) as usize;
        let a = random_almost_group(n, 1 + (seed % 2) as usize, seed, true).unwrap();
        seed += 1;
        ensure(seed < 100_000, || {
            format!("only {found} non-standardized instances found")
        })?;
        let s = classify_shape(&a).unwrap();
        if s.standardized {
            continue;
        }
        let Ok((b, _)) = standardize(&a, &s) else { continue };
        found += 1;
        let before = reachable_subsets(&a, 24).unwrap().is_completely_reachable();
        let after = reachable_subsets(&b, 24).unwrap().is_completely_reachable();
        let naive = common::is_completely_reachable(&common::images(&b), n);
        ensure(before == after && after == naive, || {
            format!("seed {}: {before} before, {after} after", seed - 1)
        })?;
    }
    Ok("50 instances, zero disagreements".into())
}

fn main() -> ExitCode {
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        ("E18 regression", Box::new(e18_regression)),
        ("E18 oracle confirmation", Box::new(e18_oracle)),
        ("invariant-block instance", Box::new(invariant_block)),
        ("profile soundness", Box::new(profile_soundness)),
        ("theory-oracle agreement", Box::new(|| theory_oracle_agreement(&corpus))),
        ("foliage block systems", Box::new(|| foliage_blocks(&corpus))),
        ("level-1 edge translation", Box::new(|| edge_translation(&corpus))),
        ("primitive (transposition + cycle) groups", Box::new(hoffman)),
        ("word-length bound 2n(n-k)", Box::new(|| word_length_bound(&corpus))),
        ("standardization neutrality", Box::new(standardization_neutrality)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {detail}", i + 1);
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
