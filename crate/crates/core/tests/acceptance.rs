use std::process::ExitCode;
use std::time::Instant;

use dentelle::descent::{self, synth, Obstruction, Transcript, Verdict};
use dentelle::finite_field::FiniteField;
use dentelle::graded_field::{DegreeGroup, GaloisData, GradedElem};
use dentelle::laurent::{Laurent, Tower};
use dentelle::linalg::{self, admissible_positions, gl_nonempty, HomMatrix};
use dentelle::scenario::{gallery, parse_scenario};
use dentelle::tate::{
    coordinate_check_lace, coordinate_check_polydisc, invert_coordinates, Domain, GradedPolynomial,
    PolydiscVerdict, Precision, TateSeries,
};
use dentelle::zshape::ZShape;
use dentelle::{Fq, Gamma, Point, ValueOrZero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coordinate inversion must reach `|t|^INVERSION_EXP`.
const INVERSION_EXP: i64 = 32;
const INVERSION_MAX_ITER: usize = 40;
/// Wall-clock budget per criterion, in seconds.
const TIME_BUDGET: f64 = 10.0;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn g(n: u64, d: u64) -> Gamma {
    Gamma::from_ratio(n, d)
}

fn tower(p: u32, m: u32, e: u32) -> Tower {
    Tower::new(p, 1, m, e, g(1, p as u64), None).expect("tower")
}

/// `ℤ/2` unramified, `ℤ/2` ramified, `ℤ/4` unramified and `ℤ/2 × ℤ/2`.
fn towers() -> Vec<(&'static str, Tower)> {
    vec![
        ("F9/F3", tower(3, 2, 1)),
        ("ramified Z/2", tower(3, 1, 2)),
        ("F81/F3", tower(3, 4, 1)),
        ("Z/2 x Z/2", tower(3, 2, 2)),
    ]
}

fn random_profile(rng: &mut ChaCha8Rng, t: &Tower, n: usize) -> Point {
    (0..n)
        .map(|_| {
            let base = t.s_pow(rng.gen_range(-3..=3));
            if rng.gen_bool(0.3) {
                base.mul(&Gamma::prime_power(2, dentelle::Rational::new(rng.gen_range(-2..=2), 3)))
            } else {
                base
            }
        })
        .collect()
}

fn graded_sum(terms: impl IntoIterator<Item = GradedElem>, field: &'static FiniteField) -> GradedElem {
    terms.into_iter().fold(GradedElem::zero(field), |acc, x| acc.add(&x))
}

/// `(A·B)_{ij}` by explicit sums of graded entries.
fn entry_product(a: &HomMatrix, b: &HomMatrix, i: usize, j: usize, field: &'static FiniteField) -> GradedElem {
    graded_sum((0..a.size().1).map(|k| a.entry(i, k).mul(&b.entry(k, j))), field)
}

fn act_entry(gd: &GaloisData, sigma: usize, m: &HomMatrix, i: usize, j: usize) -> GradedElem {
    gd.act(sigma, &m.entry(i, j))
}

fn rank(mut rows: Vec<Vec<Fq>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][c].inv();
        let pivot: Vec<Fq> = rows[rank].iter().map(|&x| x * inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let k = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = *x - k * y;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let towers = towers();
    for case in 0..100 {
        let (name, t) = &towers[case % towers.len()];
        let gd = t.residue();
        let field = gd.field();
        let n = rng.gen_range(1..=3);
        let r = random_profile(&mut rng, t, n);
        let alpha = linalg::random::mult_cocycle(&mut rng, gd, &r);
        let (_, p) = linalg::hilbert90_mult(gd, t.basis(), &r, &alpha).map_err(|e| format!("{name}: {e}"))?;
        for sigma in gd.elements() {
            for i in 0..n {
                for j in 0..n {
                    let lhs = entry_product(&alpha[sigma], &p, i, j, field);
                    let rhs = act_entry(gd, sigma, &p, i, j);
                    ensure(lhs == rhs, || format!("{name}, case {case}: α(σ)P ≠ σ·P at ({i}, {j})"))?;
                }
            }
        }
        ensure(p.is_gl(), || format!("{name}, case {case}: P is singular"))?;
    }
    Ok("100 cocycles over 4 towers, α(σ)·P = σ·P entrywise".into())
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let towers = towers();
    for (name, t) in &towers {
        let gd = t.residue();
        let lambda = linalg::trace_one_element(gd).map_err(|e| e.to_string())?;
        let trace = gd.elements().fold(gd.field().zero(), |acc, s| acc + gd.field_act(s, lambda));
        ensure(trace.is_one(), || format!("{name}: trace of λ is {trace}"))?;
    }
    for case in 0..100 {
        let (name, t) = &towers[case % towers.len()];
        let gd = t.residue();
        let rho = t.s_pow(rng.gen_range(-4..=4));
        let b = linalg::random::add_cocycle(&mut rng, gd, &rho);
        let mu = linalg::hilbert90_add(gd, &rho, &b).map_err(|e| format!("{name}: {e}"))?;
        for sigma in gd.elements() {
            ensure(gd.act(sigma, &mu).sub(&mu) == b[sigma], || {
                format!("{name}, case {case}: b({sigma}) ≠ σ·μ − μ")
            })?;
        }
    }
    Ok("100 additive cocycles split exactly, Σσ·λ = 1 on 4 towers".into())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let towers = towers();
    for case in 0..100 {
        let (name, t) = &towers[case % towers.len()];
        let gd = t.residue();
        let field = gd.field();
        let n = rng.gen_range(1..=3);
        let r = random_profile(&mut rng, t, n);
        let alpha = linalg::random::mult_cocycle(&mut rng, gd, &r);
        let (_, vs) = linalg::fixed_space_basis(gd, t.basis(), &r, &alpha).map_err(|e| format!("{name}: {e}"))?;
        ensure(vs.len() == n, || format!("{name}, case {case}: {} vectors for n = {n}", vs.len()))?;
        for (k, v) in vs.iter().enumerate() {
            for sigma in gd.elements() {
                for i in 0..n {
                    let moved = graded_sum(
                        (0..n).map(|j| alpha[sigma].entry(i, j).mul(&v.entry(j))),
                        field,
                    );
                    ensure(gd.act(sigma, &v.entry(i)) == moved, || {
                        format!("{name}, case {case}: v{k} is not invariant under {sigma}")
                    })?;
                }
            }
        }
        let rows: Vec<Vec<Fq>> = vs
            .iter()
            .map(|v| (0..n).map(|i| v.entry(i).terms().values().next().copied().unwrap_or(field.zero())).collect())
            .collect();
        let rk = rank(rows);
        ensure(rk == n, || format!("{name}, case {case}: invariance system has rank {rk}, expected {n}"))?;
    }
    Ok("100 twists, n invariant vectors of full rank each time".into())
}

fn random_base_series(rng: &mut ChaCha8Rng, t: &Tower, n: usize) -> TateSeries {
    let e = i64::from(t.degrees().2);
    let field = t.field();
    let terms: Vec<(Vec<i64>, Laurent)> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=3)).collect();
            let coeff = Laurent::from_terms(
                field,
                (0..rng.gen_range(1..=2)).map(|_| (e * rng.gen_range(-2..=2), field.from_int(rng.gen_range(1..3)))),
            );
            (exps, coeff)
        })
        .collect();
    TateSeries::from_terms(t, n, terms)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let towers = [("F9/F3", tower(3, 2, 1)), ("ramified Z/2", tower(3, 1, 2))];
    let points: Vec<Point> = vec![
        vec![Gamma::one(), Gamma::one()],
        vec![Gamma::prime_power(3, dentelle::Rational::new(-1, 2)), g(2, 1)],
        vec![Gamma::prime_power(2, dentelle::Rational::new(1, 3)), g(1, 9)],
    ];
    let mut checked = 0;
    for case in 0..1000 {
        let (name, t) = &towers[case % 2];
        let ls: Vec<Laurent> = t.basis().elements.iter().map(|b| t.lift(b)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let fs: Vec<TateSeries> = ls.iter().map(|_| random_base_series(&mut rng, t, 2)).collect();
        let sum = fs
            .iter()
            .zip(&ls)
            .fold(TateSeries::zero(t, 2), |acc, (f, l)| acc.add(&f.scale(l)));
        for r in &points {
            let lhs = sum.seminorm(r).map_err(|e| e.to_string())?;
            let mut rhs = ValueOrZero::Zero;
            for (f, l) in fs.iter().zip(&ls) {
                let fl = f.seminorm(r).map_err(|e| e.to_string())?;
                let al = t.abs(l).map_err(|e| e.to_string())?;
                rhs = rhs.max(fl.mul(&al));
            }
            ensure(lhs == rhs, || format!("{name}, case {case}: {lhs:?} ≠ {rhs:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("1000 families, {checked} exact seminorm identities"))
}

fn contracting_family(rng: &mut ChaCha8Rng, t: &Tower, r: &[Gamma]) -> Vec<TateSeries> {
    let n = r.len();
    let t_abs = t.t_abs().clone();
    (0..n)
        .map(|i| {
            let mut f = TateSeries::var(t, n, i);
            let (terms, degree) = match n { 1 => (4, 3), 2 => (4, 2), _ => (2, 2) };
            for _ in 0..rng.gen_range(1..=terms) {
                let mut exps: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
                while exps.iter().sum::<i64>() > degree {
                    exps = (0..n).map(|_| rng.gen_range(0..=2)).collect();
                }
                let size = dentelle::value_group::monomial_value(r, &exps);
                let limit = t_abs.mul(&r[i]);
                let mut k = -20;
                while size.mul(&t.s_pow(k)) > limit {
                    k += 1;
                }
                k += rng.gen_range(0..=2);
                let c = t.field().from_packed(rng.gen_range(1..t.field().order()));
                f = f.add(&TateSeries::monomial(t, n, Laurent::monomial(c, k), exps));
            }
            f
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t9 = tower(3, 2, 1);
    let tr = tower(3, 1, 2);
    let eps = t9.t_abs().powi(INVERSION_EXP);
    let cases: Vec<(&Tower, Point)> = vec![
        (&t9, vec![Gamma::one()]),
        (&t9, vec![Gamma::one(), Gamma::one()]),
        (&t9, vec![Gamma::one(), g(1, 3)]),
        (&tr, vec![Gamma::one(), tr.s_abs().clone()]),
        (&t9, vec![Gamma::one(), Gamma::one(), Gamma::one()]),
    ];
    let mut max_rounds = 0;
    let mut total = 0;
    for (t, r) in &cases {
        for rep in 0..4 {
            let fs = contracting_family(&mut rng, t, r);
            let domain = Domain::Polydisc(r.clone());
            let inv = invert_coordinates(&fs, &domain, t, &eps, INVERSION_MAX_ITER)
                .map_err(|e| format!("{}: {e}", fs[0]))?;
            ensure(inv.rounds <= INVERSION_MAX_ITER, || format!("{} rounds", inv.rounds))?;
            max_rounds = max_rounds.max(inv.rounds);
            let bound = ValueOrZero::Value(eps.clone());
            ensure(inv.worst() <= bound, || format!("audit reports {:?}", inv.worst()))?;
            let prec = Precision::uniform(vec![r.clone()], eps.mul(t.t_abs()));
            for (i, gi) in inv.g.iter().enumerate() {
                let back = gi.substitute(&fs, Some(&prec)).map_err(|e| e.to_string())?;
                let d = back.sub(&TateSeries::var(t, r.len(), i));
                let nb = d.norm_bound(r).map_err(|e| e.to_string())?;
                ensure(nb <= bound, || format!("case {rep}: ‖g{i}(f) − T{i}‖ ≤ {nb:?} exceeds ε"))?;
            }
            total += 1;
        }
    }
    Ok(format!("{total} families inverted to |t|^{INVERSION_EXP}, at most {max_rounds} rounds"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let towers = [tower(3, 2, 1), tower(3, 1, 2)];
    let radii: Vec<Point> = vec![
        vec![Gamma::one()],
        vec![Gamma::one(), Gamma::one()],
        vec![Gamma::one(), g(1, 3)],
        vec![g(2, 1), Gamma::one()],
    ];
    let mut nonlinear = 0;
    for case in 0..25 {
        let t = &towers[case % 2];
        let r = &radii[case % radii.len()];
        let scn = synth::polydisc_twist(&mut rng, t, r, &format!("twist-{case}")).map_err(|e| e.to_string())?;
        let Domain::Polydisc(rho) = &scn.domain else { unreachable!() };
        let report = descent::descend(&scn).map_err(|e| e.to_string())?;
        ensure(report.verdict == Verdict::Descends, || format!("case {case}: {}", report))?;
        report.reverify(t).map_err(|e| format!("case {case}: {e}"))?;
        let action = scn.closure().map_err(|e| e.to_string())?;
        if action.images(1).iter().any(|f| f.terms().keys().any(|e| e.iter().sum::<i64>() > 1)) {
            nonlinear += 1;
        }
        for (i, f) in report.coordinates.iter().enumerate() {
            let defect = action.invariance_defect(f).map_err(|e| e.to_string())?;
            ensure(defect <= ValueOrZero::Value(scn.eps.clone()), || {
                format!("case {case}: f{i} has invariance defect {defect:?}")
            })?;
            for sigma in 0..action.order() {
                let moved = action.act(sigma, f).map_err(|e| e.to_string())?;
                ensure(moved.sub(f).terms().is_empty(), || {
                    format!("case {case}: stored part of f{i} moves under {sigma}")
                })?;
            }
        }
        let s = report.radii.clone().ok_or("no radii")?;
        let check = coordinate_check_polydisc(&report.coordinates, &s, t, false).map_err(|e| e.to_string())?;
        ensure(check.verdict == PolydiscVerdict::Coordinates, || {
            format!("case {case}: {}", check.verdict)
        })?;
        ensure(check.a.as_ref().is_some_and(HomMatrix::is_gl), || format!("case {case}: reduction not invertible"))?;
        let group = t.value_group_l();
        for (si, ri) in s.iter().zip(rho) {
            ensure(group.contains(&si.div(ri)), || format!("case {case}: {si}/{ri} ∉ |L^×|"))?;
        }
    }
    Ok(format!("25 twists descend ({nonlinear} with nonlinear action)"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let towers = [tower(3, 1, 2), tower(3, 2, 1)];
    let shapes = [
        ZShape::interval(g(1, 2), g(2, 1)).expect("shape"),
        ZShape::boxed(&[g(1, 2), g(1, 3)], &[g(2, 1), Gamma::one()]).expect("shape"),
    ];
    let mut outside_k = 0;
    for case in 0..25 {
        let t = &towers[case % 2];
        let u = &shapes[(case / 2) % 2];
        let scn = synth::lace_twist(&mut rng, t, u, &format!("lace-{case}")).map_err(|e| e.to_string())?;
        let Domain::Lace(v) = &scn.domain else { unreachable!() };
        let report = descent::descend(&scn).map_err(|e| e.to_string())?;
        ensure(report.verdict == Verdict::Descends, || format!("case {case}: {report}"))?;
        report.reverify(t).map_err(|e| format!("case {case}: {e}"))?;
        let scale = report.scale.clone().ok_or("no scale")?;
        let shape = report.shape.clone().ok_or("no shape")?;
        ensure(shape == v.translate(&scale), || format!("case {case}: shape is not Λ·U"))?;
        let check = coordinate_check_lace(&report.coordinates, &shape).map_err(|e| e.to_string())?;
        ensure(check.coordinates, || format!("case {case}: degrees {:?}", check.matrix))?;
        ensure(matches!(report.transcript, Transcript::Lace { .. }), || "missing transcript".into())?;
        let l_group = t.value_group_l();
        let k_group = t.value_group_k();
        ensure(scale.iter().all(|x| l_group.contains(x)), || format!("case {case}: Λ ∉ |L^×|ⁿ"))?;
        if scale.iter().any(|x| !k_group.contains(x)) {
            outside_k += 1;
        }
    }
    ensure(outside_k > 0, || "no twist had Λ ∉ |k^×|ⁿ".into())?;
    Ok(format!("25 twists descend, {outside_k} with Λ ∉ |k^×|ⁿ"))
}

fn criterion_8() -> Outcome {
    let entries = gallery();
    let find = |file: &str| {
        entries
            .iter()
            .find(|e| e.file == file)
            .map(|e| parse_scenario(&e.contents).expect("gallery parses"))
            .ok_or_else(|| format!("{file} missing from gallery"))
    };
    let swapped = find("annulus-swapped-ends.toml")?;
    let action = swapped.scenario.closure().map_err(|e| e.to_string())?;
    let obstruction = descent::lattice_trivial_check(&action).map_err(|e| e.to_string())?;
    ensure(
        matches!(obstruction, Err(Obstruction::LatticeNontrivial { .. })),
        || "swapped ends pass the lattice check".into(),
    )?;
    let report = descent::descend(&swapped.scenario).map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::ObstructionLatticeNontrivial, || report.to_string())?;
    let negated = find("annulus-negated.toml")?;
    let report = descent::descend(&negated.scenario).map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::Descends, || report.to_string())?;
    let t = &negated.scenario.tower;
    let f = &report.coordinates[0];
    let action = negated.scenario.closure().map_err(|e| e.to_string())?;
    ensure(action.invariance_defect(f).map_err(|e| e.to_string())?.is_zero(), || "f not invariant".into())?;
    let Domain::Lace(u) = &negated.scenario.domain else { unreachable!() };
    ensure(report.shape.as_ref() == Some(u), || "shape moved".into())?;
    let raw = TateSeries::var(t, 1, 0);
    ensure(action.act(1, &raw).map_err(|e| e.to_string())? == raw.neg(), || "σ(T) ≠ −T".into())?;
    Ok(format!("swapped ends obstructed; negated annulus descends to f = {f}"))
}

fn criterion_9() -> Outcome {
    let q3 = DegreeGroup::new(vec![g(1, 3)]).map_err(|e| e.to_string())?;
    let two = vec![g(2, 1)];
    let one = vec![Gamma::one()];
    ensure(admissible_positions(&two, &one, &q3).is_empty(), || "M((2), (1)) has a nonzero entry".into())?;
    ensure(!gl_nonempty(&two, &one, &q3), || "GL((2), (1)) is nonempty".into())?;
    ensure(gl_nonempty(&[g(1, 3)], &one, &q3), || "GL((1/3), (1)) is empty".into())?;
    let entry = gallery().into_iter().find(|e| e.file == "empty-gl-types.toml").ok_or("missing")?;
    let scn = parse_scenario(&entry.contents).map_err(|e| e.to_string())?;
    let report = descent::descend(&scn.scenario).map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::NotIsomorphic, || report.to_string())?;
    Ok("M((2), (1)) = 0 and GL((2), (1)) = ∅ over 3^ℤ".into())
}

fn criterion_10() -> Outcome {
    let t = tower(3, 2, 1);
    let field = t.field();
    let r = vec![Gamma::one(), Gamma::one()];
    let t1 = TateSeries::var(&t, 2, 0);
    let t2 = TateSeries::var(&t, 2, 1);
    let fs = [t1.clone(), t2.add(&t1.mul(&t1))];
    let tau1 = GradedPolynomial::tau(field, r.clone(), 0);
    let tau2 = GradedPolynomial::tau(field, r.clone(), 1);
    let expected = [tau1.clone(), tau2.add(&tau1.mul(&tau1))];
    for (f, want) in fs.iter().zip(&expected) {
        let got = f.graded_reduction(&r).map_err(|e| e.to_string())?;
        ensure(&got == want, || format!("reduction of {f} is {got}, expected {want}"))?;
    }
    let entry = gallery().into_iter().find(|e| e.file == "bidisc-shear.toml").ok_or("missing")?;
    let scn = parse_scenario(&entry.contents).map_err(|e| e.to_string())?;
    let action = scn.scenario.closure().map_err(|e| e.to_string())?;
    match descent::residually_affine_check(&action).map_err(|e| e.to_string())? {
        Err(Obstruction::NotResiduallyAffine { monomial, .. }) => {
            ensure(monomial == vec![2, 0], || format!("flagged monomial {monomial:?}"))?
        }
        other => return Err(format!("shear not flagged: {other:?}")),
    }
    Ok(format!("({}, {}) flagged as not affine", expected[0], expected[1]))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("multiplicative Hilbert 90", criterion_1),
        ("additive Hilbert 90", criterion_2),
        ("fixed-space dimension", criterion_3),
        ("scalar-extension seminorm", criterion_4),
        ("coordinate inversion", criterion_5),
        ("polydisc descent roundtrip", criterion_6),
        ("lace descent roundtrip", criterion_7),
        ("annulus counterexample", criterion_8),
        ("empty GL", criterion_9),
        ("non-affine witness", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|msg| {
            if secs <= TIME_BUDGET {
                Ok(msg)
            } else {
                Err(format!("took {secs:.1}s, budget {TIME_BUDGET}s"))
            }
        });
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} ({secs:.2}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} ({secs:.2}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
