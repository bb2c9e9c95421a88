//! Acceptance criteria, one line per criterion. Run with
//! `cargo test --test acceptance`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use colombeau::analytic::characterize::{characterization_suite, entire_growth_analysis, truncated_exp, GrowthClaim, GrowthVerdict};
use colombeau::analytic::unicity::{unicity_check, UnicityVerdict};
use colombeau::analytic::{convergence_radius, representative_agrees, sum_at, AnalyticError, PowerSeries, TailLaw};
use colombeau::contour::{
    cauchy_estimate_check, cauchy_integral, cauchy_integral_quadrature, homotopy_invariance_check, ContourError,
    ConvexHomotopy, GenPath, HomotopyVerdict, Mode,
};
use colombeau::func::{GenFunction, GinftyVerdict, Poly, Schedule, TruncatedSeries};
use colombeau::net::{EpsGrid, NetClass, OracleConfig, SampledNet};
use colombeau::scalar::{AsymptoticScalar, ExtendedValuation, Rational};
use colombeau::sets::{contains, invertibility_on_set, InternalSetRep, Invertibility, Membership, SharpBall};

type Outcome = Result<(), String>;

const CAP: i64 = 24;

fn cap() -> Rational {
    Rational::from_integer(CAP)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grid() -> EpsGrid {
    EpsGrid::default()
}

fn cfg() -> OracleConfig {
    OracleConfig::default()
}

fn rho(e: Rational) -> AsymptoticScalar {
    AsymptoticScalar::rho_pow(e)
}

fn ri(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn rand_rat(r: &mut ChaCha8Rng, lo: i64, hi: i64, dens: &[i64]) -> Rational {
    let q = dens[r.gen_range(0..dens.len())];
    Rational::new(r.gen_range(lo * q..=hi * q), q)
}

fn rand_coeff(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(r.gen_range(0.5..2.0), r.gen_range(0.0..std::f64::consts::TAU))
}

/// Terms with distinct exponents in `[lo, hi]`.
fn rand_terms(r: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64, dens: &[i64]) -> BTreeMap<Rational, Complex64> {
    let mut t = BTreeMap::new();
    while t.len() < n {
        t.insert(rand_rat(r, lo, hi, dens), rand_coeff(r));
    }
    t
}

fn scalar(t: &BTreeMap<Rational, Complex64>) -> AsymptoticScalar {
    AsymptoticScalar::from_terms(t.iter().map(|(e, c)| (*e, *c)), cap())
}

fn rand_scalar(r: &mut ChaCha8Rng, lo: i64, hi: i64) -> AsymptoticScalar {
    let n = r.gen_range(1..=2);
    scalar(&rand_terms(r, n, lo, hi, &[1, 2]))
}

fn rand_holo_poly(r: &mut ChaCha8Rng, max_deg: usize, lo: i64, hi: i64) -> Poly {
    let deg = r.gen_range(1..=max_deg);
    let coeffs: Vec<AsymptoticScalar> = (0..=deg).map(|_| rand_scalar(r, lo, hi)).collect();
    Poly::holomorphic(&coeffs)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `D^k p(z) = Σ_n a_n n!/(n−k)! z^{n−k}` from the coefficient list.
fn derivative_oracle(coeffs: &[AsymptoticScalar], z: &AsymptoticScalar, k: u32) -> AsymptoticScalar {
    let mut acc = AsymptoticScalar::zero();
    for (n, a) in coeffs.iter().enumerate().skip(k as usize) {
        let n = n as u32;
        let ff: f64 = (n - k + 1..=n).map(f64::from).product();
        acc = &acc + &(a * &z.powi(n - k)).scale(Complex64::new(ff, 0.0));
    }
    acc
}

fn holo_coeffs(p: &Poly) -> Vec<AsymptoticScalar> {
    (0..=p.degree())
        .map(|n| p.coeff(n, 0).cloned().unwrap_or_else(AsymptoticScalar::zero))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1
fn ultrametric() -> Outcome {
    let mut r = rng(1);
    for i in 0..500 {
        let (nx, ny) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let tx = rand_terms(&mut r, nx, -6, 10, &[1, 2, 3]);
        let mut ty = rand_terms(&mut r, ny, -6, 10, &[1, 2, 3]);
        // every third pair cancels the leading term of x exactly
        if i % 3 == 0 {
            let (e, c) = tx.iter().next().map(|(e, c)| (*e, *c)).unwrap();
            ty.insert(e, -c);
        }
        let (x, y) = (scalar(&tx), scalar(&ty));
        let vx = *tx.keys().next().unwrap();
        let vy = *ty.keys().next().unwrap();
        let mut merged = tx.clone();
        for (e, c) in &ty {
            *merged.entry(*e).or_insert_with(Complex64::zero) += c;
        }
        merged.retain(|e, c| *c != Complex64::zero() && *e <= cap());
        let want = merged.keys().next().copied();
        let got = (&x + &y).valuation();
        match (want, got) {
            (Some(w), ExtendedValuation::Exact(g)) if w == g => {}
            (None, ExtendedValuation::AtLeast(_)) => {}
            other => return Err(format!("sum valuation {other:?} for {x} + {y}")),
        }
        if let ExtendedValuation::Exact(g) = got {
            ensure(g >= vx.min(vy), || format!("strong triangle fails for {x} + {y}"))?;
        }
        let xy = &x * &y;
        ensure(xy.valuation() == ExtendedValuation::Exact(vx + vy), || {
            format!("v({x} * {y}) = {:?}", xy.valuation())
        })?;
        let (nx, ny, nxy) = (x.sharp_norm().value, y.sharp_norm().value, xy.sharp_norm().value);
        ensure((nxy - nx * ny).abs() <= 1e-12 * nxy, || format!("norm of {x} * {y}"))?;
    }
    Ok(())
}

// 2
fn inverse_round_trip() -> Outcome {
    let mut r = rng(2);
    let one = AsymptoticScalar::one();
    for _ in 0..200 {
        let n = r.gen_range(1..=4);
        let x = scalar(&rand_terms(&mut r, n, -4, 4, &[1, 2, 3]));
        let inv = x.invert().map_err(|e| format!("{x}: {e}"))?;
        let d = &(&x * &inv) - &one;
        ensure(d.is_empty(), || format!("{x} * ({inv}) - 1 = {d}"))?;
    }
    Ok(())
}

// 3
fn valuation_oracle() -> Outcome {
    let mut r = rng(3);
    let g = grid();
    for _ in 0..100 {
        let n = r.gen_range(1..=3);
        let t = rand_terms(&mut r, n, -6, 10, &[1, 2, 4]);
        let v = t.keys().next().unwrap().to_owned();
        let x = scalar(&t);
        let est = SampledNet::from_scalar(&x, &g)
            .estimate_valuation(cfg().window)
            .map_err(|e| format!("{x}: {e}"))?;
        let v = *v.numer() as f64 / *v.denom() as f64;
        ensure((est.slope - v).abs() <= 0.05, || format!("{x}: slope {} vs {v}", est.slope))?;
    }
    Ok(())
}

/// Centre, radius `ρ^a` and a point well inside.
fn rand_circle(r: &mut ChaCha8Rng) -> (AsymptoticScalar, Rational, AsymptoticScalar) {
    let c = if r.gen_bool(0.3) { AsymptoticScalar::zero() } else { rand_scalar(r, 0, 2) };
    let a = Rational::new(r.gen_range(0..=2), 2);
    let w = Complex64::from_polar(r.gen_range(0.0..0.5), r.gen_range(0.0..std::f64::consts::TAU));
    let z = &c + &rho(a + Rational::new(1, 2)).scale(w);
    (c, a, z)
}

// 4
fn cauchy_formula() -> Outcome {
    let mut r = rng(4);
    let (g, cf) = (grid(), cfg());
    for _ in 0..50 {
        let p = rand_holo_poly(&mut r, 6, -2, 2);
        let (c, a, z) = rand_circle(&mut r);
        let k = r.gen_range(0..=3);
        let u = GenFunction::Poly(p.clone());
        let want = derivative_oracle(&holo_coeffs(&p), &z, k);
        let exact = cauchy_integral(&u, &c, &rho(a), &z, k, Mode::Exact, &g, &cf).map_err(|e| e.to_string())?;
        let got = exact.as_exact().ok_or("exact mode gave a sampled value")?;
        ensure(got.approx_eq(&want), || format!("D^{k} ({p}) at {z}: {got} vs {want}"))?;
        let q = cauchy_integral_quadrature(&u, &c, &rho(a), &z, k, 512, &g).map_err(|e| e.to_string())?;
        let (res, worst) = q.residual(&SampledNet::from_scalar(&want, &g));
        ensure(worst <= 1e-8, || format!("D^{k} ({p}) at {z}: relative residual {worst:e}"))?;
        ensure(res.classify(&cf) == NetClass::Negligible, || format!("D^{k} ({p}) residual not negligible"))?;
    }
    Ok(())
}

// 5
fn homotopy_invariance() -> Outcome {
    let mut r = rng(5);
    let (g, cf) = (grid(), cfg());
    for i in 0..20 {
        let (c, a, near) = rand_circle(&mut r);
        let p = GenFunction::Poly(rand_holo_poly(&mut r, 4, -2, 2));
        let u = if i % 2 == 0 { p } else { GenFunction::kernel(p, near, r.gen_range(1..=3)) };
        let h = ConvexHomotopy::new(
            GenPath::circle(c.clone(), rho(a)).map_err(|e| e.to_string())?,
            GenPath::square(&c, &rho(a)).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let rep = homotopy_invariance_check(&u, &h, Mode::default(), &g, &cf).map_err(|e| format!("{}: {e}", u.label()))?;
        ensure(rep.verdict == HomotopyVerdict::Equal, || format!("{}: {rep:?}", u.label()))?;
    }
    let k = GenFunction::kernel(GenFunction::Poly(Poly::constant(AsymptoticScalar::one())), AsymptoticScalar::rho(), 1);
    let re = |x: f64| AsymptoticScalar::real(x);
    let h = ConvexHomotopy::new(
        GenPath::circle(re(0.0), re(1.0)).map_err(|e| e.to_string())?,
        GenPath::circle(re(3.0), re(0.5)).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    match homotopy_invariance_check(&k, &h, Mode::default(), &g, &cf) {
        Err(ContourError::HomotopyLeavesDomain { .. }) => Ok(()),
        other => Err(format!("pole crossing: {other:?}")),
    }
}

// 6
fn cauchy_estimates() -> Outcome {
    let mut r = rng(6);
    let (g, cf) = (grid(), cfg());
    for _ in 0..30 {
        let p = rand_holo_poly(&mut r, 5, -2, 2);
        let (c, a, _) = rand_circle(&mut r);
        let k = r.gen_range(0..=3);
        let u = GenFunction::Poly(p.clone());
        let rep = cauchy_estimate_check(&u, &c, &rho(a), &c, k, &g, &cf).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("D^{k} ({p}) at {c}: violated at {:?}", rep.violation))?;
        // independent sides on the tail
        let d = derivative_oracle(&holo_coeffs(&p), &c, k);
        for eps in g.tail(cf.window).points() {
            let (cc, rr) = (c.eval(eps), rho(a).eval(eps).re);
            let lhs = d.eval(eps).norm();
            let max = (0..1024)
                .map(|j| {
                    let w = cc + Complex64::from_polar(rr, std::f64::consts::TAU * j as f64 / 1024.0);
                    u.freeze(eps).value(w).unwrap().norm()
                })
                .fold(0.0, f64::max);
            let rhs = factorial(k) * rr.powi(-(k as i32)) * max;
            ensure(lhs <= rhs * (1.0 + 1e-9), || format!("D^{k} ({p}) at eps {eps:e}: {lhs:e} > {rhs:e}"))?;
        }
    }
    Ok(())
}

// 7
fn convergence_radii() -> Outcome {
    let zero = AsymptoticScalar::zero();
    for c in -2..=2 {
        let rr = convergence_radius(&PowerSeries::from_law(zero.clone(), TailLaw::Affine(ri(c))));
        ensure(rr.radius == (c as f64).exp(), || format!("affine {c}: R = {}", rr.radius))?;
    }
    let s = PowerSeries::rho_nsq(zero.clone()).with_cap(ri(80));
    ensure(convergence_radius(&s).radius == f64::INFINITY, || "rho_nsq: finite radius".into())?;
    for k in 0..=8usize {
        let d = s.derivative(k).coefficient(0).ok_or("rho_nsq: missing coefficient")?;
        let want = AsymptoticScalar::rho_pow(ri((k * k) as i64)).with_cap(ri(80));
        ensure(d.approx_eq(&want), || format!("D^{k} u(0) = {d}"))?;
    }
    let slow = PowerSeries::from_law(zero.clone(), TailLaw::NegNOverLnN);
    ensure(convergence_radius(&slow).radius == 1.0, || "slow law: R != 1".into())?;
    let u = GenFunction::Series(TruncatedSeries {
        series: slow,
        schedule: Schedule::default(),
    });
    let set = InternalSetRep::disc(zero, AsymptoticScalar::rho()).map_err(|e| e.to_string())?;
    match u.is_ginfty(&set, 12, &grid(), &cfg()) {
        GinftyVerdict::No { .. } => Ok(()),
        other => Err(format!("slow law on the ball: {other:?}")),
    }
}

// 8
fn geometric_sums() -> Outcome {
    let g = PowerSeries::geometric(AsymptoticScalar::zero());
    for a in [Rational::new(1, 2), ri(1), ri(2)] {
        let s = sum_at(&g, &rho(a), cap()).map_err(|e| e.to_string())?;
        let want = (&AsymptoticScalar::one() - &rho(a)).invert().map_err(|e| e.to_string())?;
        ensure(s.value.approx_eq(&want), || format!("a = {a}: {} vs {want}", s.value))?;
    }
    match sum_at(&g, &AsymptoticScalar::real(2.0), cap()) {
        Err(AnalyticError::NotInRadius { certificate: Some(c), .. }) if !c.is_empty() => Ok(()),
        other => Err(format!("z = 2: {other:?}")),
    }
}

// 9
fn characterization() -> Outcome {
    let mut r = rng(9);
    let (g, cf) = (grid(), cfg());
    let ball = SharpBall::new(AsymptoticScalar::zero(), 1.0).map_err(|e| e.to_string())?;
    for _ in 0..50 {
        let p = rand_holo_poly(&mut r, 4, -3, 2);
        let rep = characterization_suite(&GenFunction::Poly(p.clone()), &ball, &g, &cf);
        ensure(rep.all_hold(), || format!("{p}: {rep:?}"))?;
    }
    let rep = characterization_suite(&GenFunction::Poly(Poly::zbar()), &ball, &g, &cf);
    ensure(!rep.conditions[0].holds, || "zbar passes condition 1".into())?;
    let s = PowerSeries::rho_nsq(AsymptoticScalar::zero());
    for z in ball.sample_points(20) {
        let (class, _) = representative_agrees(&s, Schedule::CeilLogInverse, &z, &g, &cf).map_err(|e| format!("{z}: {e}"))?;
        ensure(class == NetClass::Negligible, || format!("representative at {z}: {class}"))?;
    }
    Ok(())
}

// 10
fn unicity() -> Outcome {
    let (g, cf) = (grid(), cfg());
    let ball = SharpBall::new(AsymptoticScalar::zero(), 1.0).map_err(|e| e.to_string())?;
    let zeros: Vec<_> = (1..=10).map(|k| rho(Rational::new(1, k))).collect();
    let rep = unicity_check(&GenFunction::ks_net(), &ball, &zeros, &g, &cf);
    ensure(rep.levels.len() == 11 && rep.levels.iter().all(|l| l.negligible), || format!("{:?}", rep.levels))?;
    ensure(matches!(rep.verdict, UnicityVerdict::IdenticallyZero { depth: 10 }), || format!("{:?}", rep.verdict))?;
    let u = GenFunction::Poly(Poly::z().powi(2).sub(&Poly::constant(rho(ri(2)))));
    let rep = unicity_check(&u, &ball, &[AsymptoticScalar::rho(), -&AsymptoticScalar::rho()], &g, &cf);
    ensure(matches!(rep.verdict, UnicityVerdict::HypothesisFails(_)), || format!("{:?}", rep.verdict))
}

// 11
fn invertibility() -> Outcome {
    let mut r = rng(11);
    let (g, cf) = (grid(), cfg());
    let (mut yes, mut no) = (0, 0);
    for i in 0..50 {
        let c = rand_scalar(&mut r, 0, 2);
        let a = Rational::new(r.gen_range(0..=2), 2);
        let set = InternalSetRep::disc(c.clone(), rho(a)).map_err(|e| e.to_string())?;
        // even cases keep every zero outside the disc, odd ones put one inside
        let mut p = Poly::constant(AsymptoticScalar::one());
        for j in 0..r.gen_range(1..=3) {
            let m = if i % 2 == 1 && j == 0 { r.gen_range(0.0..0.9) } else { r.gen_range(2.0..3.0) };
            let z0 = &c + &rho(a).scale(Complex64::from_polar(m, r.gen_range(0.0..std::f64::consts::TAU)));
            p = p.mul(&Poly::z().sub(&Poly::constant(z0)));
        }
        let u = GenFunction::Poly(p.clone());
        match invertibility_on_set(&u, &set, &g, &cf) {
            Invertibility::Invertible { .. } => {
                ensure(i % 2 == 0, || format!("{p} on {set}: invertible despite an inner zero"))?;
                let mut pr = rng(1000 + i);
                for _ in 0..100 {
                    let x = set.random_member(&mut pr);
                    let v = u.eval(&x, &g).map_err(|e| e.to_string())?;
                    ensure(v.is_invertible(&cf), || format!("{p} on {set}: not invertible at {x}"))?;
                }
                yes += 1;
            }
            Invertibility::NotInvertible { witness, .. } => {
                ensure(i % 2 == 1, || format!("{p} on {set}: not invertible without an inner zero"))?;
                ensure(contains(&set, &witness, &g, &cf) == Membership::Yes, || format!("witness {witness} outside {set}"))?;
                let v = u.eval(&witness, &g).map_err(|e| e.to_string())?;
                ensure(!v.is_invertible(&cf), || format!("{p}: invertible at witness {witness}"))?;
                no += 1;
            }
        }
    }
    ensure(yes == 25 && no == 25, || format!("{yes} invertible, {no} not"))
}

// 12
fn growth() -> Outcome {
    let (g, cf) = (grid(), cfg());
    let run = |u: &GenFunction, claim: GrowthClaim| entire_growth_analysis(u, &claim, &g, &cf).map(|r| r.verdict).map_err(|e| e.to_string());
    let constant = GenFunction::Poly(Poly::constant(&AsymptoticScalar::real(3.0) + &AsymptoticScalar::rho()));
    let v = run(&constant, GrowthClaim::Bounded(AsymptoticScalar::real(6.0)))?;
    ensure(matches!(v, GrowthVerdict::Constant { .. }), || format!("constant: {v:?}"))?;
    let cubic = GenFunction::Poly(Poly::z().powi(3).add(&Poly::z().scale(&AsymptoticScalar::rho())));
    let v = run(&cubic, GrowthClaim::PolyGrowth(AsymptoticScalar::real(3.0), 3))?;
    ensure(v == GrowthVerdict::Polynomial { max_degree: 3 }, || format!("cubic: {v:?}"))?;
    let v = run(&cubic, GrowthClaim::Bounded(AsymptoticScalar::real(6.0)))?;
    ensure(matches!(v, GrowthVerdict::ClaimViolated { .. }), || format!("cubic claimed bounded: {v:?}"))?;
    let v = run(&truncated_exp(10), GrowthClaim::PolyGrowth(AsymptoticScalar::one(), 1))?;
    ensure(
        matches!(v, GrowthVerdict::ClaimViolated { derivative_witness: Some(_), .. }),
        || format!("truncated exp claimed linear: {v:?}"),
    )
}

// 13
fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_colombeau");
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    files.sort();
    ensure(!files.is_empty(), || "no scenarios".into())?;
    for f in &files {
        let run = || Command::new(bin).arg("run").arg(f).args(["--format", "json"]).output();
        let (a, b) = (run().map_err(|e| e.to_string())?, run().map_err(|e| e.to_string())?);
        ensure(a.stdout == b.stdout, || format!("{}: reports differ", f.display()))?;
        serde_json::from_slice::<serde_json::Value>(&a.stdout).map_err(|e| format!("{}: {e}", f.display()))?;
        let want = if f.file_stem().is_some_and(|s| s == "estimate_violation") { 1 } else { 0 };
        ensure(a.status.code() == Some(want), || format!("{}: exit {:?}", f.display(), a.status.code()))?;
    }
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bad = tmp.path().join("bad.scn");
    std::fs::write(&bad, "this is not a scenario\n").map_err(|e| e.to_string())?;
    let out = Command::new(bin).arg("run").arg(&bad).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(2), || format!("malformed file: exit {:?}", out.status.code()))?;
    let out = Command::new(bin).arg("run").arg(tmp.path().join("missing.scn")).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(2), || format!("missing file: exit {:?}", out.status.code()))
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 13] = [
        ("ultrametric suite", 1.0, ultrametric),
        ("inverse round-trip", 1.0, inverse_round_trip),
        ("valuation oracle agreement", 5.0, valuation_oracle),
        ("Cauchy formula", 30.0, cauchy_formula),
        ("homotopy invariance", 10.0, homotopy_invariance),
        ("Cauchy estimates", 10.0, cauchy_estimates),
        ("convergence radius", 5.0, convergence_radii),
        ("geometric-series summation", 1.0, geometric_sums),
        ("characterization", 30.0, characterization),
        ("unicity", 5.0, unicity),
        ("invertibility criterion", 20.0, invertibility),
        ("growth analysis", 5.0, growth),
        ("CLI determinism", 60.0, cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        let res = res.and_then(|_| ensure(secs < *limit, || format!("took {secs:.2} s, limit {limit} s")));
        match res {
            Ok(()) => println!("PASS {:>2} {name} ({:.0} ms)", i + 1, secs * 1e3),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({:.0} ms): {e}", i + 1, secs * 1e3);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
