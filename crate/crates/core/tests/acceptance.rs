use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tamepres::geometry::{close_under_negation, cone_contains, LatticeSet, LayerCharacter};
use tamepres::group::{heisenberg, GroupElement, GroupSpec};
use tamepres::presenter::{present, Origin, Presentation};
use tamepres::radius::{compute_p0, moves_inward, positivity_margin};
use tamepres::ring::{RingElement, Valuation};
use tamepres::specfile::{self, render_spec, SpecFile};
use tamepres::tameness::{check_tame, sigma0_member, TamenessReport};
use tamepres::verifier::{build_finite_model, verify_relators, FiniteModel};
use tamepres::word::Word;

const BIN: &str = env!("CARGO_BIN_EXE_tamepres");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed<T>(limit: Duration, f: impl FnOnce() -> Result<T, String>) -> Result<(T, Duration), String> {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:?}, limit {limit:?}"))?;
    Ok((out, took))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn lattice(points: &[[i64; 2]]) -> BTreeSet<Vec<i64>> {
    points.iter().map(|p| p.to_vec()).collect()
}

fn family_points(report: &TamenessReport, layer: usize) -> BTreeSet<BTreeSet<Vec<i64>>> {
    report.layers[layer - 1].diagonals.iter().map(|d| d.lattice.points().clone()).collect()
}

/// Cone sets of the pivots of `1 + x - y` in `Z^2`: `{p - p0 : p != p0}`.
fn pivot_cones() -> BTreeSet<BTreeSet<Vec<i64>>> {
    let support = [[0i64, 0], [1, 0], [0, 1]];
    support
        .iter()
        .map(|p0| support.iter().filter(|p| *p != p0).map(|p| vec![p[0] - p0[0], p[1] - p0[1]]).collect())
        .collect()
}

fn criterion_1() -> Outcome {
    let (r1, t1) = timed(Duration::from_secs(5), || {
        let s = specfile::baumslag(1).map_err(|e| e.to_string())?;
        check_tame(&s.group, &s.module).map_err(|e| e.to_string())
    })?;
    ensure(r1.is_tame(), "k = 1 not certified")?;
    let expected = pivot_cones();
    ensure(
        expected == lattice_family_of(&[[[1, 0], [0, 1]], [[-1, 0], [-1, 1]], [[0, -1], [1, -1]]]),
        "pivot oracle disagrees with the three cone sets",
    )?;
    ensure(family_points(&r1, 1) == expected, "k = 1 cover is not the three pivot cones")?;
    let (r2, t2) = timed(Duration::from_secs(5), || {
        let s = specfile::baumslag(2).map_err(|e| e.to_string())?;
        check_tame(&s.group, &s.module).map_err(|e| e.to_string())
    })?;
    ensure(r2.is_tame(), "k = 2 not certified")?;
    Ok(format!("k=1 tame in {t1:?}, k=2 tame in {t2:?}"))
}

fn lattice_family_of(sets: &[[[i64; 2]; 2]]) -> BTreeSet<BTreeSet<Vec<i64>>> {
    sets.iter().map(|s| lattice(s)).collect()
}

fn criterion_2() -> Outcome {
    let (r, t) = timed(Duration::from_secs(5), || {
        let s = specfile::heisenberg(1, 2).map_err(|e| e.to_string())?;
        check_tame(&s.group, &s.module).map_err(|e| e.to_string())
    })?;
    ensure(r.layers.len() == 2, "expected two layers")?;
    ensure(r.layers[0].cover.is_covered(), "layer 1 inclusion not certified")?;
    ensure(r.layers[1].cover.is_covered(), "layer 2 inclusion not certified")?;
    ensure(family_points(&r, 1) == pivot_cones(), "layer 1 cones differ from the pivot cones")?;
    let h = heisenberg(1).map_err(|e| e.to_string())?;
    let expected = RingElement::monomial(GroupElement::from_exponents(vec![0, 0, -1]), BigInt::from(2));
    let d = &r.layers[1].diagonals;
    ensure(d.len() == 1 && d[0].entries.len() == 1, "layer 2 should carry one certificate")?;
    ensure(
        d[0].entries[0].lambda == expected,
        format!("layer 2 certificate is {}", d[0].entries[0].lambda.display(&h)),
    )?;
    Ok(format!("both layers covered, layer-2 lambda = 2 z^-1, {t:?}"))
}

fn criterion_3() -> Outcome {
    let s = specfile::free(1).map_err(|e| e.to_string())?;
    let r = check_tame(&s.group, &s.module).map_err(|e| e.to_string())?;
    ensure(!r.is_tame(), "free module certified")?;
    let l = &r.layers[0];
    ensure(l.certificates.is_empty() && l.diagonals.is_empty(), "free module produced certificates")?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let certs = vec![Vec::new()];
    for _ in 0..1000 {
        let u = [rng.gen_range(-50i64..=50), rng.gen_range(-50i64..=50)];
        if u == [0, 0] {
            continue;
        }
        let chi = LayerCharacter::from_integers(1, &u).map_err(|e| e.to_string())?;
        ensure(
            sigma0_member(&chi, &certs, s.module.generators(), &s.group).is_err(),
            format!("direction {u:?} has a certificate"),
        )?;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("free.spec");
    std::fs::write(&path, render_spec(&s).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let out = Command::new(BIN).arg("tame").arg(&path).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(1), format!("exit code {:?}", out.status.code()))?;
    ensure(String::from_utf8_lossy(&out.stdout).contains("witness"), "no witness printed")?;
    Ok("no certificates, 1000 directions uncovered, exit 1".into())
}

fn random_element(rng: &mut ChaCha8Rng, g: &GroupSpec) -> RingElement {
    let n = g.generator_count();
    let terms = rng.gen_range(1..=4);
    let mut r = RingElement::zero();
    while r.is_zero() {
        for _ in 0..terms {
            let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            let c = rng.gen_range(-3i64..=3);
            r.add_term(GroupElement::from_exponents(exps), BigInt::from(c));
        }
    }
    r
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let groups = [
        GroupSpec::free_abelian(vec!["x".into(), "y".into()]).map_err(|e| e.to_string())?,
        heisenberg(1).map_err(|e| e.to_string())?,
    ];
    let mut count = 0;
    for i in 0..1200 {
        let g = &groups[i % 2];
        let r = random_element(&mut rng, g);
        let s = random_element(&mut rng, g);
        let chi = loop {
            let v = [rng.gen_range(-7i64..=7), rng.gen_range(-7i64..=7)];
            if v != [0, 0] {
                break LayerCharacter::new(1, vec![q(v[0], rng.gen_range(1..=5)), q(v[1], rng.gen_range(1..=5))])
                    .map_err(|e| e.to_string())?;
            }
        };
        let v = |x: &RingElement| x.v_chi(&chi, g).map_err(|e| e.to_string());
        let (vr, vs) = (v(&r)?, v(&s)?);
        let sum = &r + &s;
        ensure(v(&sum)? >= vr.clone().min(vs.clone()), "sum law")?;
        let prod = r.mul(&s, g).map_err(|e| e.to_string())?;
        ensure(v(&prod)? == vr.clone() + vs.clone(), "product law is not an equality")?;
        let qe: Vec<i64> = (0..g.generator_count()).map(|_| rng.gen_range(-3..=3)).collect();
        let qq = GroupElement::from_exponents(qe);
        let shifted = r.scale_right(&qq, g).map_err(|e| e.to_string())?;
        let chi_q = chi.eval(&qq, g).map_err(|e| e.to_string())?;
        ensure(v(&shifted)? == vr + Valuation::Finite(chi_q), "translation law")?;
        count += 1;
    }
    Ok(format!("{count} instances on Z^2 and Heisenberg, exact"))
}

/// Independent scan: the largest `|x|^2` with no inward move, over `|x|^2 <= r2`.
fn brute_p0(family: &[LatticeSet], n: usize, r2: i64) -> i64 {
    let r = (r2 as f64).sqrt() as i64 + 1;
    let mut best = 0;
    let mut x = vec![-r; n];
    loop {
        let nx: i64 = x.iter().map(|v| v * v).sum();
        if nx > 0 && nx <= r2 {
            let good = family
                .iter()
                .any(|l| l.points().iter().all(|y| x.iter().zip(y).map(|(a, b)| (a + b) * (a + b)).sum::<i64>() < nx));
            if !good {
                best = best.max(nx);
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            x[i] += 1;
            if x[i] > r {
                x[i] = -r;
                i += 1;
            } else {
                break;
            }
        }
    }
}

fn criterion_5() -> Outcome {
    let (msg, t) = timed(Duration::from_secs(30), || {
        let line = vec![
            LatticeSet::new(1, vec![vec![1]], "+").map_err(|e| e.to_string())?,
            LatticeSet::new(1, vec![vec![-1]], "-").map_err(|e| e.to_string())?,
        ];
        let c = compute_p0(&line, 1).map_err(|e| e.to_string())?;
        ensure(c.p0 == 0, format!("p0 = {} for the unit steps", c.p0))?;

        let mut families = vec![(line, 1usize)];
        for spec in [specfile::baumslag(1), specfile::baumslag(2), specfile::heisenberg(1, 2)] {
            let s = spec.map_err(|e| e.to_string())?;
            let r = check_tame(&s.group, &s.module).map_err(|e| e.to_string())?;
            for l in &r.layers {
                families.push((close_under_negation(&l.family()), l.rank));
            }
        }
        let mut pinned = Vec::new();
        for (fam, n) in &families {
            let cert = compute_p0(fam, *n).map_err(|e| e.to_string())?;
            // replay every lattice point up to the scan bound
            let bound = cert.scan_bound;
            let mut bad = Vec::new();
            for x in enumerate_ball(*n, bound) {
                if x.iter().any(|&v| v != 0) && !fam.iter().any(|l| moves_inward(&x, l)) {
                    bad.push(x);
                }
            }
            ensure(bad == cert.bad_points, "replay disagrees with the stored verdicts")?;
            let rstar_sq = &cert.tail_bound * &cert.tail_bound;
            ensure(BigRational::from_integer(BigInt::from(bound)) >= rstar_sq, "scan bound below R*^2")?;
            pinned.push(cert.p0);
        }
        let b1 = &families[1].0;
        let brute = brute_p0(b1, 2, 400);
        ensure(brute == 1 && pinned[1] == 1, format!("Baumslag p0: brute {brute}, computed {}", pinned[1]))?;
        Ok(format!("p0 values {pinned:?}; Baumslag p0 = 1 pinned"))
    })?;
    Ok(format!("{msg}, {t:?}"))
}

fn enumerate_ball(n: usize, r2: i64) -> Vec<Vec<i64>> {
    let r = (r2 as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    let mut x = vec![-r; n];
    loop {
        if x.iter().map(|v| v * v).sum::<i64>() <= r2 {
            out.push(x.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                out.sort();
                return out;
            }
            i -= 1;
            x[i] += 1;
            if x[i] > r {
                x[i] = -r;
            } else {
                break;
            }
        }
    }
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    for (name, spec) in [
        ("baumslag1", specfile::baumslag(1)),
        ("baumslag2", specfile::baumslag(2)),
        ("heisenberg", specfile::heisenberg(1, 2)),
    ] {
        let s = spec.map_err(|e| e.to_string())?;
        let (report, radii, p) = present(&s.group, &s.module, s.options.cap).map_err(|e| e.to_string())?;
        let a = s.module.generators().len();
        let v_prod: usize =
            radii.iter().enumerate().map(|(i, r)| enumerate_ball(s.group.rank(i + 1), r.p0).len()).product();
        let ell: usize = report.layers.iter().map(|l| l.diagonals.len()).sum();
        ensure(p.nominal.k0 == a * a * v_prod, format!("{name}: |K0| = {} vs {}", p.nominal.k0, a * a * v_prod))?;
        ensure(p.nominal.c == a * ell, format!("{name}: |C| = {} vs {}", p.nominal.c, a * ell))?;
        ensure(p.w_size == v_prod, format!("{name}: |W| mismatch"))?;
        lines.push(format!("{name} K0={} C={}", p.nominal.k0, p.nominal.c));
    }
    Ok(lines.join(", "))
}

fn presentation_of(s: &SpecFile) -> Result<Presentation, String> {
    present(&s.group, &s.module, s.options.cap).map(|x| x.2).map_err(|e| e.to_string())
}

fn single_fails(p: &Presentation, origin: Origin, w: &Word, models: &[FiniteModel]) -> Result<bool, String> {
    for m in models {
        let rep = verify_relators(&[(origin, w.clone())], &p.alphabet, m).map_err(|e| e.to_string())?;
        if !rep.all_pass() {
            return Ok(true);
        }
    }
    Ok(false)
}

fn criterion_7() -> Outcome {
    let (msg, t) = timed(Duration::from_secs(60), || {
        let mut lines = Vec::new();
        // extra models in which the module quotient is nonzero
        for (name, spec, extra) in
            [("baumslag", specfile::baumslag(1), (5u64, 4i64)), ("heisenberg", specfile::heisenberg(1, 2), (3, 4))]
        {
            let s = spec.map_err(|e| e.to_string())?;
            let p = presentation_of(&s)?;
            let mut models = Vec::new();
            for (m, n) in [(5u64, 3i64), (7, 4), extra] {
                let fm = build_finite_model(&s.group, &s.module, m, n).map_err(|e| e.to_string())?;
                let rep = verify_relators(&p.relators, &p.alphabet, &fm).map_err(|e| e.to_string())?;
                ensure(rep.all_pass(), format!("{name} fails in model ({m}, {n}):\n{rep}"))?;
                models.push(fm);
            }
            ensure(models[2].module_dim() > 0, format!("{name}: extra model has trivial module"))?;
            let mut mutations = 0;
            for (origin, w) in &p.relators {
                for pos in 0..w.len() {
                    for delta in [1, -1] {
                        let mut letters = w.letters().to_vec();
                        letters[pos].1 += delta;
                        let mutated = Word::from_letters(letters);
                        ensure(
                            single_fails(&p, *origin, &mutated, &models)?,
                            format!("{name}: mutation of {origin} token {pos} by {delta} not caught"),
                        )?;
                        mutations += 1;
                    }
                }
            }
            lines.push(format!(
                "{name} {} relators pass, {mutations} mutations caught (dims {:?})",
                p.relators.len(),
                models.iter().map(|m| m.module_dim()).collect::<Vec<_>>()
            ));
        }
        Ok(lines.join("; "))
    })?;
    Ok(format!("{msg}, {t:?}"))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut sizes = Vec::new();
    for (name, s) in [("b1", specfile::baumslag(1)), ("h", specfile::heisenberg(1, 2))] {
        let s = s.map_err(|e| e.to_string())?;
        let spec = dir.path().join(format!("{name}.spec"));
        std::fs::write(&spec, render_spec(&s).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let mut outs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{name}.{run}.pres"));
            let st =
                Command::new(BIN).arg("present").arg(&spec).arg("-o").arg(&out).output().map_err(|e| e.to_string())?;
            ensure(st.status.success(), format!("present exited with {}", st.status))?;
            outs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        ensure(outs[0] == outs[1], format!("{name}: outputs differ"))?;
        sizes.push(outs[0].len());
    }
    Ok(format!("byte-identical outputs ({sizes:?} bytes)"))
}

fn norm_sq_rat(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x * x).sum()
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    // rational points on the unit circle
    let mut dirs: Vec<Vec<BigRational>> = Vec::new();
    for (a, b, c) in [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29), (1, 0, 1), (0, 1, 1)] {
        for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            dirs.push(vec![q(sa * a, c), q(sb * b, c)]);
            dirs.push(vec![q(sb * b, c), q(sa * a, c)]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (s, layer) in [(specfile::baumslag(1), 1usize), (specfile::heisenberg(1, 2), 1)] {
        let s = s.map_err(|e| e.to_string())?;
        let r = check_tame(&s.group, &s.module).map_err(|e| e.to_string())?;
        let l = &r.layers[layer - 1];
        let fam = close_under_negation(&l.family());
        let c = positivity_margin(&fam, l.rank).map_err(|e| e.to_string())?;
        let m2 = fam.iter().map(|f| f.max_norm_sq()).max().unwrap_or(0);
        let certs = l.by_generator(s.module.generators().len());
        for u in &dirs {
            let chi = {
                let chi = LayerCharacter::new(layer, u.clone()).map_err(|e| e.to_string())?;
                if sigma0_member(&chi, &certs, s.module.generators(), &s.group).map_err(|e| e.to_string())? {
                    chi
                } else {
                    chi.negated()
                }
            };
            ensure(
                sigma0_member(&chi, &certs, s.module.generators(), &s.group).map_err(|e| e.to_string())?,
                format!("neither {u:?} nor its negative is certified"),
            )?;
            for _ in 0..20 {
                // |δ|^2 M^2 < c^2 keeps every y of the best set positive
                let d: Vec<BigRational> = (0..l.rank).map(|_| q(rng.gen_range(-1000..=1000), 1000)).collect();
                let scale = {
                    let mut k = BigRational::from_integer(1.into());
                    while &norm_sq_rat(&d) * &k * &k * BigRational::from_integer(m2.into()) >= &c * &c {
                        k /= BigRational::from_integer(2.into());
                    }
                    k
                };
                let pert: Vec<BigRational> = chi.vector().iter().zip(&d).map(|(a, b)| a + b * &scale).collect();
                if pert.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let moved = LayerCharacter::new(layer, pert).map_err(|e| e.to_string())?;
                ensure(
                    sigma0_member(&moved, &certs, s.module.generators(), &s.group).map_err(|e| e.to_string())?,
                    "perturbed character lost its certificate",
                )?;
                ensure(
                    fam.iter().any(|f| cone_contains(f, moved.vector()).unwrap_or(false)),
                    "perturbed outside all cones",
                )?;
                checked += 1;
            }
        }
        ensure(c.is_positive(), "margin not positive")?;
    }
    Ok(format!("{checked} perturbations stay certified"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 Baumslag tameness k=1,2", criterion_1),
        ("2 Heisenberg tameness", criterion_2),
        ("3 free module negative control", criterion_3),
        ("4 valuation laws", criterion_4),
        ("5 radius p0 oracle", criterion_5),
        ("6 presentation counts", criterion_6),
        ("7 finite-model verification", criterion_7),
        ("8 determinism", criterion_8),
        ("9 openness", criterion_9),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria pass");
}
