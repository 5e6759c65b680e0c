//! End-to-end acceptance checks. Each criterion prints one `PASS`/`FAIL`
//! line with the measured quantity next to its bound; the process exits
//! non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use ncjulia::boundary::{
    boundary_model_residual, estimate_alpha, extract_w, julia_inequality_check, solve_ut,
    tfae_report, TfaeReport,
};
use ncjulia::derivative::{
    eta_numeric, homogeneity_check, ladder_independence, relative_error, Ladder,
};
use ncjulia::domain::{random_interior_point, ApproachSequence, DeltaMatrix, DEFAULT_RADIAL_STEPS};
use ncjulia::fixtures::{
    cartan_delta, example_eta, example_h1, example_phi_closed, example_psi, polydisk_delta,
    random_distinguished_point, random_inward_pair,
};
use ncjulia::freepoly::{
    eval_poly, format_poly, parse_poly, FreePolynomial, FreeWord, MatrixTuple,
};
use ncjulia::numerics::{
    block_diag, c, from_real_rows, identity, operator_norm, ComplexMatrix, Tolerances,
};
use ncjulia::random::{self, contractive_tuple, gaussian_matrix, haar_unitary, SeededRng};
use ncjulia::realization::{random_realization, NcFunctionHandle};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Check = fn() -> Result<Outcome, String>;

fn ident(d: usize, n: usize) -> MatrixTuple {
    MatrixTuple::scalar_identity(d, n, c(1.0, 0.0))
}

fn rel(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    operator_norm(&(a - b)) / operator_norm(b).max(1.0)
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn random_coefficient(rng: &mut SeededRng) -> Complex64 {
    match rng.random_range(0..4) {
        0 => c(rng.random_range(-5..=5) as f64, 0.0),
        1 => c(
            rng.random_range(-8..=8) as f64 / 4.0,
            rng.random_range(-8..=8) as f64 / 4.0,
        ),
        _ => random::complex_normal(rng),
    }
}

fn random_poly(
    d: usize,
    max_degree: usize,
    max_terms: usize,
    rng: &mut SeededRng,
) -> FreePolynomial {
    let count = rng.random_range(0..=max_terms);
    let terms: Vec<_> = (0..count)
        .map(|_| {
            let deg = rng.random_range(0..=max_degree);
            let word = FreeWord((0..deg).map(|_| rng.random_range(0..d)).collect());
            (random_coefficient(rng), word)
        })
        .collect();
    FreePolynomial::from_terms(d, terms).expect("letters are below d")
}

fn random_delta(rng: &mut SeededRng) -> DeltaMatrix {
    let d = rng.random_range(1..=3);
    let rows = rng.random_range(1..=3);
    let cols = rng.random_range(1..=3);
    let entries = (0..rows)
        .map(|_| (0..cols).map(|_| random_poly(d, 4, 4, rng)).collect())
        .collect();
    DeltaMatrix::new(d, entries).expect("rectangular grid")
}

/// ψ(diag(1,−1), antidiag(1,1)) is the non-contractive witness.
fn c1_psi_counterexample() -> Result<Outcome, String> {
    let z1 = from_real_rows(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let z2 = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let z = MatrixTuple::new(vec![z1, z2]).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let psi = example_psi(&z).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let exact = psi == from_real_rows(2, 2, &[2.0, 1.0, 1.0, 0.0]);
    let norm_err = (operator_norm(&psi) - (1.0 + 2f64.sqrt())).abs();
    Ok(outcome(
        exact && norm_err <= 1e-12 && within(elapsed, Duration::from_millis(1)),
        format!("exact={exact} |norm-(1+sqrt2)|={norm_err:.1e} (<=1e-12) time={elapsed:?} (<1ms)"),
    ))
}

fn c2_radial_alpha() -> Result<Outcome, String> {
    let h = example_h1();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        let seq = ApproachSequence::radial(ident(2, n), DEFAULT_RADIAL_STEPS);
        let a = estimate_alpha(&h, &seq).map_err(|e| e.to_string())?;
        worst = worst.max((a.alpha - 1.0).abs());
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        worst <= 1e-8 && within(elapsed, Duration::from_millis(100)),
        format!("max|alpha-1|={worst:.1e} (<=1e-8) time={elapsed:?} (<100ms)"),
    ))
}

/// Enough terms for a truncation bound near machine precision.
fn neumann_terms(delta: &DeltaMatrix, x: &MatrixTuple) -> Result<usize, String> {
    let q = operator_norm(&delta.eval(x).map_err(|e| e.to_string())?);
    if q < 1e-3 {
        return Ok(8);
    }
    Ok(((1e-16 * (1.0 - q)).ln() / q.ln()).ceil() as usize + 1)
}

fn c3_three_way_oracle() -> Result<Outcome, String> {
    let h = example_h1();
    let mut rng = random::rng(3);
    let start = Instant::now();
    let (mut worst_neumann, mut worst_closed) = (0.0f64, 0.0f64);
    let mut count = 0;
    for n in [1, 2, 4] {
        for _ in 0..200 {
            let x = contractive_tuple(2, n, 0.95, &mut rng);
            let direct = h.eval_phi(&x).map_err(|e| e.to_string())?;
            let neumann = h
                .eval_phi_neumann(&x, neumann_terms(h.delta(), &x)?)
                .map_err(|e| e.to_string())?;
            let closed = example_phi_closed(&x).map_err(|e| e.to_string())?;
            let slack = operator_norm(&(&direct - &neumann.phi)) - neumann.truncation_bound;
            worst_neumann = worst_neumann.max(slack);
            worst_closed = worst_closed.max(operator_norm(&(&direct - &closed)));
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        worst_neumann <= 1e-10 && worst_closed <= 1e-9 && within(elapsed, Duration::from_secs(10)),
        format!(
            "{count} points: max(|direct-neumann|-bound)={worst_neumann:.1e} (<=1e-10) \
             max|direct-closed|={worst_closed:.1e} (<=1e-9) time={elapsed:?} (<10s)"
        ),
    ))
}

/// Rescales `x` so that `‖δ(x)‖ = r`; `δ` must be linear.
fn at_radius(delta: &DeltaMatrix, x: MatrixTuple, r: f64) -> Result<MatrixTuple, String> {
    let norm = operator_norm(&delta.eval(&x).map_err(|e| e.to_string())?);
    Ok(x.scale(c(r / norm, 0.0)))
}

fn c4_model_identity() -> Result<Outcome, String> {
    let deltas = [polydisk_delta(2), polydisk_delta(3), cartan_delta(2)];
    let mut rng = random::rng(4);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..1000u64 {
        let delta = &deltas[i as usize % deltas.len()];
        let dim_e = 1 + (i as usize / 3) % 3;
        let n = 1 + (i as usize) % 3;
        let r = random_realization(dim_e, delta.j(), 4_000 + i).map_err(|e| e.to_string())?;
        let h = NcFunctionHandle::new(r, delta.clone()).map_err(|e| e.to_string())?;
        let x = random_interior_point(delta, n, 0.95, &mut rng).map_err(|e| e.to_string())?;
        let y = random_interior_point(delta, n, 0.95, &mut rng).map_err(|e| e.to_string())?;
        worst = worst.max(h.model_residual(&x, &y).map_err(|e| e.to_string())?);
    }
    let mut weakest_control = f64::INFINITY;
    for i in 0..100u64 {
        let delta = &deltas[i as usize % deltas.len()];
        let r = random_realization(1, delta.j(), 9_000 + i).map_err(|e| e.to_string())?;
        let mut d = r.d().clone();
        d[(0, 0)] += c(0.5, 0.0);
        let r = r.with_d_unvalidated(d).map_err(|e| e.to_string())?;
        let h = NcFunctionHandle::new(r, delta.clone()).map_err(|e| e.to_string())?;
        // The perturbation of D is invisible at the origin, so probe at ‖δ‖ = 0.9.
        let x = at_radius(
            delta,
            random_interior_point(delta, 2, 0.95, &mut rng).map_err(|e| e.to_string())?,
            0.9,
        )?;
        let y = at_radius(
            delta,
            random_interior_point(delta, 2, 0.95, &mut rng).map_err(|e| e.to_string())?,
            0.9,
        )?;
        weakest_control = weakest_control.min(h.model_residual(&x, &y).map_err(|e| e.to_string())?);
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        worst <= 1e-9 && weakest_control > 1e-3 && within(elapsed, Duration::from_secs(30)),
        format!(
            "max residual={worst:.1e} (<=1e-9) over 1000; min perturbed residual={weakest_control:.1e} (>1e-3) \
             over 100; time={elapsed:?} (<30s)"
        ),
    ))
}

fn c5_julia_inequality() -> Result<Outcome, String> {
    let h = example_h1();
    let mut rng = random::rng(5);
    let (mut violations, mut skipped, mut worst_ratio) = (0, 0, 0.0f64);
    for i in 0..1000 {
        let n = 1 + i % 3;
        let z = random_interior_point(h.delta(), n, 0.999, &mut rng).map_err(|e| e.to_string())?;
        let chk = julia_inequality_check(&h, &ident(2, n), &identity(n), 1.0, &z)
            .map_err(|e| e.to_string())?;
        if chk.skipped {
            skipped += 1;
            continue;
        }
        violations += usize::from(!chk.holds);
        worst_ratio = worst_ratio.max(chk.lhs / chk.rhs);
    }
    let mut worst_equality: f64 = 0.0;
    for i in 0..50 {
        let n = 1 + i % 3;
        let s = rng.random_range(0.05..=0.95);
        let x = haar_unitary(n, &mut rng).scale(s);
        let z = MatrixTuple::new(vec![x.clone(), x]).map_err(|e| e.to_string())?;
        let chk = julia_inequality_check(&h, &ident(2, n), &identity(n), 1.0, &z)
            .map_err(|e| e.to_string())?;
        worst_equality = worst_equality.max((chk.lhs - chk.rhs).abs() / chk.rhs);
    }
    Ok(outcome(
        violations == 0 && skipped == 0 && worst_equality <= 1e-10,
        format!(
            "violations={violations}/1000 skipped={skipped} max lhs/rhs={worst_ratio:.6}; \
             diagonal max rel|lhs-rhs|={worst_equality:.1e} (<=1e-10) over 50"
        ),
    ))
}

fn c6_boundary_model() -> Result<Outcome, String> {
    let h = example_h1();
    let t = ident(2, 1);
    let model = solve_ut(&h, &t, &Tolerances::default()).map_err(|e| e.to_string())?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let expected = from_real_rows(2, 1, &[s, s]);
    let u_err = operator_norm(&(&model.u_t - &expected));
    let seq = ApproachSequence::radial(t.clone(), DEFAULT_RADIAL_STEPS);
    let alpha = estimate_alpha(&h, &seq).map_err(|e| e.to_string())?.alpha;
    let w = extract_w(&h, &seq).map_err(|e| e.to_string())?.w;
    let un = operator_norm(&model.u_t);
    let alpha_gap = (un * un - alpha).abs();
    let mut rng = random::rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let z = random_interior_point(h.delta(), 1, 0.999, &mut rng).map_err(|e| e.to_string())?;
        worst = worst
            .max(boundary_model_residual(&h, &t, &w, &model.u_t, &z).map_err(|e| e.to_string())?);
    }
    Ok(outcome(
        u_err <= 1e-10 && model.range_residual <= 1e-10 && alpha_gap <= 1e-6 && worst <= 1e-8,
        format!(
            "|u_T-(1,1)/sqrt2|={u_err:.1e} (<=1e-10) range residual={:.1e} (<=1e-10) \
             |‖u_T‖²-alpha|={alpha_gap:.1e} (<=1e-6) max boundary-model residual={worst:.1e} (<=1e-8)",
            model.range_residual
        ),
    ))
}

fn c7_directional_derivative() -> Result<Outcome, String> {
    let h = example_h1();
    let ladder = Ladder::default();
    let mut rng = random::rng(7);
    let (mut worst_rel, mut worst_hom, mut worst_ladder) = (0.0f64, 0.0f64, 0.0f64);
    let mut unconverged = 0;
    for n in 1..=3 {
        let t = ident(2, n);
        let w = identity(n);
        for _ in 0..100 {
            let dir = random_inward_pair(n, &mut rng);
            let r = eta_numeric(&h, &t, &w, &dir, &ladder).map_err(|e| e.to_string())?;
            unconverged += usize::from(!r.converged);
            let exact = example_eta(&dir).map_err(|e| e.to_string())?;
            worst_rel = worst_rel.max(relative_error(&r.eta, &exact));
            for s in [0.3, 0.5, 1.0] {
                worst_hom = worst_hom
                    .max(homogeneity_check(&h, &t, &w, &r, s, &ladder).map_err(|e| e.to_string())?);
            }
            worst_ladder = worst_ladder
                .max(ladder_independence(&h, &t, &w, &dir, &ladder).map_err(|e| e.to_string())?);
        }
    }
    Ok(outcome(
        worst_rel <= 1e-6 && worst_hom <= 1e-6 && worst_ladder <= 1e-6 && unconverged == 0,
        format!(
            "300 directions: max rel err={worst_rel:.1e} (<=1e-6) homogeneity={worst_hom:.1e} (<=1e-6) \
             ladder={worst_ladder:.1e} (<=1e-6) unconverged={unconverged}"
        ),
    ))
}

fn random_similarity(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    identity(n) + gaussian_matrix(n, n, rng).scale(0.3 / (n as f64).sqrt())
}

fn c8_nc_axioms() -> Result<Outcome, String> {
    let mut rng = random::rng(8);
    let mut worst_poly: f64 = 0.0;
    for _ in 0..200 {
        let d = rng.random_range(1..=3);
        let p = random_poly(d, 3, 5, &mut rng);
        let (n1, n2) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let x = contractive_tuple(d, n1, 1.5, &mut rng);
        let y = contractive_tuple(d, n2, 1.5, &mut rng);
        let px = eval_poly(&p, &x).map_err(|e| e.to_string())?;
        let py = eval_poly(&p, &y).map_err(|e| e.to_string())?;
        let sum = eval_poly(&p, &x.direct_sum(&y).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        worst_poly = worst_poly.max(rel(&sum, &block_diag(&px, &py)));
        let s = random_similarity(n1, &mut rng);
        let sinv = s.clone().try_inverse().ok_or("singular similarity")?;
        let conj = eval_poly(&p, &x.similarity(&s).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        worst_poly = worst_poly.max(rel(&conj, &(&sinv * &px * &s)));
    }

    let deltas = [
        polydisk_delta(2),
        ncjulia::fixtures::ball_delta(2),
        cartan_delta(2),
    ];
    let mut worst_norm: f64 = 0.0;
    for i in 0..200 {
        let delta = &deltas[i % deltas.len()];
        let (n1, n2) = (1 + i % 3, 1 + (i / 3) % 3);
        let x = contractive_tuple(delta.d(), n1, 1.5, &mut rng);
        let y = contractive_tuple(delta.d(), n2, 1.5, &mut rng);
        let nx = operator_norm(&delta.eval_rect(&x).map_err(|e| e.to_string())?);
        let ny = operator_norm(&delta.eval_rect(&y).map_err(|e| e.to_string())?);
        let xy = x.direct_sum(&y).map_err(|e| e.to_string())?;
        let nsum = operator_norm(&delta.eval_rect(&xy).map_err(|e| e.to_string())?);
        worst_norm = worst_norm.max((nsum - nx.max(ny)).abs() / nx.max(ny).max(1.0));
        // Norms are invariant under unitary similarity only.
        let u = haar_unitary(n1, &mut rng);
        let nconj = operator_norm(
            &delta
                .eval_rect(&x.similarity(&u).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?,
        );
        worst_norm = worst_norm.max((nconj - nx).abs() / nx.max(1.0));
    }

    let mut worst_phi: f64 = 0.0;
    let mut done = 0;
    let mut seed = 80_000u64;
    while done < 200 {
        seed += 1;
        let delta = &deltas[done % 2 * 2];
        let r = random_realization(1 + done % 2, delta.j(), seed).map_err(|e| e.to_string())?;
        let h = NcFunctionHandle::new(r, delta.clone()).map_err(|e| e.to_string())?;
        let (n1, n2) = (1 + done % 3, 1 + (done / 3) % 2);
        let x = random_interior_point(delta, n1, 0.5, &mut rng).map_err(|e| e.to_string())?;
        let y = random_interior_point(delta, n2, 0.9, &mut rng).map_err(|e| e.to_string())?;
        let s = random_similarity(n1, &mut rng);
        let xs = x.similarity(&s).map_err(|e| e.to_string())?;
        if operator_norm(&delta.eval(&xs).map_err(|e| e.to_string())?) >= 0.95 {
            continue;
        }
        let px = h.eval_phi(&x).map_err(|e| e.to_string())?;
        let py = h.eval_phi(&y).map_err(|e| e.to_string())?;
        let sum = h
            .eval_phi(&x.direct_sum(&y).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        worst_phi = worst_phi.max(rel(&sum, &block_diag(&px, &py)));
        let sinv = s.clone().try_inverse().ok_or("singular similarity")?;
        let conj = h.eval_phi(&xs).map_err(|e| e.to_string())?;
        worst_phi = worst_phi.max(rel(&conj, &(&sinv * &px * &s)));
        done += 1;
    }
    Ok(outcome(
        worst_poly <= 1e-8 && worst_norm <= 1e-8 && worst_phi <= 1e-8,
        format!("200 each: poly={worst_poly:.1e} delta-norm={worst_norm:.1e} phi={worst_phi:.1e} (all <=1e-8)"),
    ))
}

fn c9_gradient_vs_differences() -> Result<Outcome, String> {
    let mut rng = random::rng(9);
    let mut worst: f64 = 0.0;
    let eps = 1e-4;
    for i in 0..200 {
        let delta = random_delta(&mut rng);
        let n = 1 + i % 3;
        let t = contractive_tuple(delta.d(), n, 1.0, &mut rng);
        let dir = contractive_tuple(delta.d(), n, 1.0, &mut rng);
        let analytic = delta.derivative_rect(&t, &dir).map_err(|e| e.to_string())?;
        // Richardson-extrapolated central difference: O(ε⁴) truncation.
        let central = |e: f64| -> Result<ComplexMatrix, String> {
            let plus = delta
                .eval_rect(&t.add_scaled(c(e, 0.0), &dir).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let minus = delta
                .eval_rect(&t.add_scaled(c(-e, 0.0), &dir).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            Ok((plus - minus).scale(0.5 / e))
        };
        let fd = (central(eps / 2.0)?.scale(4.0) - central(eps)?).scale(1.0 / 3.0);
        let scale = operator_norm(&analytic).max(1.0);
        worst = worst.max(operator_norm(&(&fd - &analytic)) / scale);
    }
    Ok(outcome(
        worst <= 1e-6,
        format!("200 instances, degree <= 4: max rel err={worst:.1e} (<=1e-6)"),
    ))
}

fn run_cli(delta_entry: &str) -> Result<(i32, String), String> {
    let delta = format!(r#"{{"d":2,"J":1,"entries":[["{delta_entry}"]]}}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_ncjulia"))
        .args([
            "eval",
            "--delta",
            &delta,
            "--realization",
            "random:1:0",
            "--point",
            "[[0.1,0],[0.2,0]]",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    ))
}

fn c10_parser() -> Result<Outcome, String> {
    let mut rng = random::rng(10);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let d = rng.random_range(1..=4);
        let p = random_poly(d, 4, 6, &mut rng);
        let text = format_poly(&p);
        match parse_poly(&text, d) {
            Ok(q) if q == p && format_poly(&q) == text => {}
            _ => mismatches += 1,
        }
    }
    let cases = [
        ("x5", "variable index out of range"),
        ("x0 x1", "explicit `*`"),
        ("x0^-1", "negative exponent"),
    ];
    let mut codes = Vec::new();
    let mut errors_ok = true;
    for (entry, needle) in cases {
        let (code, stderr) = run_cli(entry)?;
        errors_ok &= code == 2 && stderr.contains(needle) && stderr.contains("position");
        codes.push(code);
    }
    Ok(outcome(
        mismatches == 0 && errors_ok,
        format!("round-trip mismatches={mismatches}/1000; exit codes for x5, `x0 x1`, x0^-1 = {codes:?} (expect 2 with position)"),
    ))
}

fn tfae_ok(r: &TfaeReport) -> bool {
    r.ratio_within_2c
        && r.chain_holds
        && r.u_bound_holds
        && r.q1_bounded == r.q3_bounded
        && r.q1_bounded
}

fn c11_tfae() -> Result<Outcome, String> {
    let mut instances = 0;
    let mut failures = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut record = |r: TfaeReport| {
        instances += 1;
        failures += usize::from(!tfae_ok(&r));
        worst_ratio = worst_ratio.max(r.worst_ratio);
    };
    let h = example_h1();
    for n in 1..=3 {
        let seq = ApproachSequence::radial(ident(2, n), DEFAULT_RADIAL_STEPS);
        record(tfae_report(&h, &seq).map_err(|e| e.to_string())?);
    }
    let t = MatrixTuple::real_scalars(&[1.0, -1.0]);
    record(
        tfae_report(&h, &ApproachSequence::radial(t, DEFAULT_RADIAL_STEPS))
            .map_err(|e| e.to_string())?,
    );

    let mut rng = random::rng(11);
    for (i, (name, delta)) in [
        ("polydisk:2", polydisk_delta(2)),
        ("polydisk:3", polydisk_delta(3)),
        ("cartan:2", cartan_delta(2)),
    ]
    .into_iter()
    .enumerate()
    {
        for k in 0..20u64 {
            let r =
                random_realization(1 + (k as usize) % 2, delta.j(), 11_000 + 100 * i as u64 + k)
                    .map_err(|e| e.to_string())?;
            let h = NcFunctionHandle::new(r, delta.clone()).map_err(|e| e.to_string())?;
            let t = random_distinguished_point(name, 1 + (k as usize) % 3, &mut rng)
                .map_err(|e| e.to_string())?;
            record(
                tfae_report(&h, &ApproachSequence::radial(t, DEFAULT_RADIAL_STEPS))
                    .map_err(|e| e.to_string())?,
            );
        }
    }
    Ok(outcome(
        failures == 0,
        format!("{instances} B-points: failures={failures}; max q2/(2c q1)={worst_ratio:.4} (<=1)"),
    ))
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("psi counterexample", c1_psi_counterexample),
        ("radial Julia quotient", c2_radial_alpha),
        ("three-way oracle agreement", c3_three_way_oracle),
        ("model identity", c4_model_identity),
        ("nc Julia inequality", c5_julia_inequality),
        ("boundary model u_T", c6_boundary_model),
        ("directional derivative", c7_directional_derivative),
        ("nc axioms", c8_nc_axioms),
        (
            "analytic vs finite-difference gradient",
            c9_gradient_vs_differences,
        ),
        ("parser round trip and exit codes", c10_parser),
        ("TFAE comparability", c11_tfae),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let result = check().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", k + 1, result.detail);
        failed += usize::from(!result.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
