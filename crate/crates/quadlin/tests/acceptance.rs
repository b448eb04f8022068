//! Acceptance suite: every criterion prints one pass/fail line and enforces
//! its tolerance. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines for passing criteria too.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadlin::coeffs::{rhombic_nome_reduction_check, CoefficientFamily, FamilyRegime};
use quadlin::laplace::{self, EnergyForm};
use quadlin::pluri::{
    action_sijk, check_4d_consistency, classical_star_triangle, corner_system,
    elliptic_special_solution, flip_energy_invariance, gauge_construct, proportionality_defect,
    solve_corner_center, three_field_image_condition, three_field_map, two_field_f, two_field_g,
    BaseColor, CubeWeights2, FourDWeights, PlaquetteWeights2, PlaquetteWeights3, RootSign,
};
use quadlin::quadeq::{
    backlund, check_3d_consistency, discrete_exponential, exponential_path_spread,
    max_face_residual, CubeLabels, Domain, FieldAssignment,
};
use quadlin::quadgraph::{corner_patch, gen_from_stepped_surface, gen_square_grid, Color};
use quadlin::theta::ThetaParams;

type C = Complex64;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id:02} ({name}): {verdict} — {detail}");
    assert!(pass, "criterion {id:02} ({name}) failed: {detail}");
}

fn crand(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn families() -> Vec<(&'static str, CoefficientFamily<f64>)> {
    let mut out: Vec<(&'static str, CoefficientFamily<f64>)> = Vec::new();
    for tau0 in [0.5, 1.0, 2.0] {
        let name: &'static str = match tau0 {
            x if x == 0.5 => "rectangular tau0=0.5",
            x if x == 1.0 => "rectangular tau0=1",
            _ => "rectangular tau0=2",
        };
        out.push((name, CoefficientFamily::rectangular(tau0, 0.0).unwrap()));
    }
    for tau0 in [0.5, 1.0, 2.0] {
        let name: &'static str = match tau0 {
            x if x == 0.5 => "rhombic tau0=0.5",
            x if x == 1.0 => "rhombic tau0=1",
            _ => "rhombic tau0=2",
        };
        out.push((name, CoefficientFamily::rhombic(tau0, 0.0).unwrap()));
    }
    out.push(("degenerate", CoefficientFamily::degenerate(0.0)));
    out
}

/// Random angle whose f/g0 evaluations stay away from the poles by 0.05.
fn pole_free_angle(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let a = rng.random_range(0.0..TAU);
        if (a - PI).abs() > 0.05 && a > 0.05 && TAU - a > 0.05 {
            return a;
        }
    }
}

#[test]
fn criterion_01_theta_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut max_resid = 0.0f64;
    let params = [
        ThetaParams::<f64>::rectangular(1.0).unwrap(),
        ThetaParams::<f64>::rhombic(1.0).unwrap(),
        ThetaParams::<f64>::from_nome(C::new(0.3, 0.0)).unwrap(),
    ];
    for p in &params {
        // parity and half-period shifts at 500 random points each
        for _ in 0..500 {
            let z = C::new(rng.random_range(-3.0..3.0), rng.random_range(-0.4..0.4));
            let t1 = p.theta(1, z).unwrap();
            let par = (t1 + p.theta(1, -z).unwrap()).norm() / (1.0 + t1.norm());
            max_resid = max_resid.max(par);
            for k in 2..=4u8 {
                let v = p.theta(k, z).unwrap();
                let d = (v - p.theta(k, -z).unwrap()).norm() / (1.0 + v.norm());
                max_resid = max_resid.max(d);
            }
            let half = C::new(PI / 2.0, 0.0);
            let shifts = [
                (p.theta(1, z + half).unwrap(), p.theta(2, z).unwrap()),
                (p.theta(2, z + half).unwrap(), -p.theta(1, z).unwrap()),
                (p.theta(3, z + half).unwrap(), p.theta(4, z).unwrap()),
                (p.theta(4, z + half).unwrap(), p.theta(3, z).unwrap()),
            ];
            for (lhs, rhs) in shifts {
                max_resid = max_resid.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
            }
        }
        let k = p.constants().unwrap();
        let prod = k.theta2 * k.theta3 * k.theta4;
        max_resid = max_resid.max((k.theta1_prime - prod).norm() / (1.0 + prod.norm()));
    }
    // Fourier cross-check of the theta2 logarithmic derivative
    for _ in 0..500 {
        let q = rng.random_range(0.05..0.5);
        let a = rng.random_range(0.1..PI / 2.0 - 0.1);
        let p = ThetaParams::<f64>::from_nome(C::new(q, 0.0)).unwrap();
        let (t, d) = p.theta_pair(2, C::new(a, 0.0)).unwrap();
        let lhs = -(d / t).re;
        let mut rhs = a.tan();
        let mut n = 1;
        loop {
            let qe = q.powi(2 * n);
            rhs += 4.0 * (-1.0f64).powi(n - 1) * qe / (1.0 - qe) * (2.0 * n as f64 * a).sin();
            if qe < 1e-17 || n > 400 {
                break;
            }
            n += 1;
        }
        max_resid = max_resid.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    report(
        1,
        "theta identity suite",
        max_resid < 1e-10,
        &format!("max residual {max_resid:.3e} < 1e-10 over 500-point batches"),
    );
}

#[test]
fn criterion_02_functional_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut max_resid = 0.0f64;
    for (_, fam) in families() {
        let mut done = 0;
        while done < 500 {
            let q: Vec<f64> = (0..4).map(|_| pole_free_angle(&mut rng)).collect();
            let c = |x: f64| C::new(x, 0.0);
            let fff = fam.check_fff(c(q[0]), c(q[1]), c(q[2]), c(q[3]));
            let fhh = fam.check_fhh(q[0], q[1], q[2]);
            let gsum = fam.check_gsum(c(q[0]), c(q[1]), c(q[2]));
            match (fff, fhh, gsum) {
                (Ok(a), Ok(b), Ok(cc)) => {
                    max_resid = max_resid.max(a.norm()).max(b.norm()).max(cc.norm());
                    done += 1;
                }
                _ => continue, // pairwise difference hit a pole; redraw
            }
        }
    }
    // rhombic nome reduction rides along with the functional checks
    let mut rng2 = ChaCha8Rng::seed_from_u64(1022);
    for _ in 0..100 {
        let a = rng2.random_range(0.1..PI - 0.1);
        let tau0 = rng2.random_range(0.4..1.5);
        max_resid = max_resid.max(rhombic_nome_reduction_check(a, tau0).unwrap().norm());
    }
    report(
        2,
        "functional equations",
        max_resid < 1e-10,
        &format!("max |residual| {max_resid:.3e} < 1e-10, 500 draws per regime"),
    );
}

#[test]
fn criterion_03_symmetry_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut max_resid = 0.0f64;
    let regimes = [
        CoefficientFamily::rectangular(1.0, 0.3).unwrap(),
        CoefficientFamily::rhombic(1.0, 0.3).unwrap(),
        CoefficientFamily::degenerate(0.3),
    ];
    for fam in &regimes {
        let mut done = 0;
        while done < 200 {
            let a = pole_free_angle(&mut rng);
            let b = pole_free_angle(&mut rng);
            let ca = C::new(a, 0.0);
            let f_anti = match (fam.f(ca), fam.f(ca + C::new(PI, 0.0))) {
                (Ok(x), Ok(y)) => x * y + C::new(1.0, 0.0),
                _ => continue,
            };
            let h_sym = match (fam.h(a), fam.h(a + PI)) {
                (Ok(x), Ok(y)) => x * y - C::new(1.0, 0.0),
                _ => continue,
            };
            let add = match fam.additive_decomposition_residual(a, b) {
                Ok(r) => r,
                Err(_) => continue,
            };
            max_resid = max_resid
                .max(f_anti.norm())
                .max(h_sym.norm())
                .max(add.norm());
            done += 1;
        }
        // lambda0-independence of star masses on cyclic label sequences
        if fam.regime() == FamilyRegime::Degenerate {
            continue;
        }
        let with_l0 = |l0: f64| CoefficientFamily::new(fam.regime(), fam.tau0(), l0).unwrap();
        let mut done_mass = 0;
        while done_mass < 200 {
            let a = rng.random_range(0.1..1.2);
            let b = rng.random_range(1.4..2.6);
            let labels = [a, b, a + PI, b + PI];
            let mass = |f: &CoefficientFamily<f64>| -> Option<C> {
                let mut sum = C::new(0.0, 0.0);
                for k in 0..4 {
                    sum += f.g(labels[k], labels[(k + 1) % 4]).ok()?;
                }
                Some(sum)
            };
            let (l0a, l0b) = (rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            let (Some(m1), Some(m2)) = (mass(&with_l0(l0a)), mass(&with_l0(l0b))) else {
                continue; // a label hit the pole of h; redraw lambda0
            };
            max_resid = max_resid.max((m1 - m2).norm());
            done_mass += 1;
        }
    }
    report(
        3,
        "symmetry constraints",
        max_resid < 1e-10,
        &format!("max residual {max_resid:.3e} < 1e-10 over 200 draws per regime"),
    );
}

#[test]
fn criterion_04_three_dim_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut max_disc = 0.0f64;
    let mut max_tet = 0.0f64;
    let mut max_x0dep = 0.0f64;
    let regimes = [
        CoefficientFamily::rectangular(1.0, 0.2).unwrap(),
        CoefficientFamily::rhombic(1.0, 0.2).unwrap(),
        CoefficientFamily::degenerate(0.2),
    ];
    for fam in &regimes {
        let mut done = 0;
        while done < 100 {
            let labels = CubeLabels {
                alpha: pole_free_angle(&mut rng),
                beta: pole_free_angle(&mut rng),
                gamma: pole_free_angle(&mut rng),
            };
            let init = [
                crand(&mut rng),
                crand(&mut rng),
                crand(&mut rng),
                crand(&mut rng),
            ];
            let cons = match check_3d_consistency(fam, labels, init) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let tet = match tetrahedron_residual(fam, labels, init) {
                Some(t) => t,
                None => continue,
            };
            let mut init2 = init;
            init2[0] = crand(&mut rng);
            let cons2 = match check_3d_consistency(fam, labels, init2) {
                Ok(c) => c,
                Err(_) => continue,
            };
            max_disc = max_disc.max(cons.discrepancy);
            max_tet = max_tet.max(tet);
            max_x0dep = max_x0dep.max((cons2.candidates[0] - cons.candidates[0]).norm());
            done += 1;
        }
    }
    // negative control: a 1% coefficient perturbation must be detected
    let fam = CoefficientFamily::rectangular(1.0, 0.2).unwrap();
    let labels = CubeLabels {
        alpha: 0.3,
        beta: 1.4,
        gamma: 2.6,
    };
    let init = [
        crand(&mut rng),
        crand(&mut rng),
        crand(&mut rng),
        crand(&mut rng),
    ];
    let control = perturbed_cube_discrepancy(&fam, labels, init);
    let pass = max_disc < 1e-9 && max_tet < 1e-9 && max_x0dep < 1e-10 && control > 1e-3;
    report(
        4,
        "3D consistency and tetrahedron property",
        pass,
        &format!(
            "discrepancy {max_disc:.3e} < 1e-9, tetrahedron {max_tet:.3e} < 1e-9, \
             x0-dependence {max_x0dep:.3e} < 1e-10, perturbation control {control:.3e} > 1e-3"
        ),
    );
}

fn tetrahedron_residual(
    fam: &CoefficientFamily<f64>,
    labels: CubeLabels,
    init: [C; 4],
) -> Option<f64> {
    quadlin::quadeq::tetrahedron_check(fam, labels, init)
        .ok()
        .map(|r| r.norm())
}

/// Reruns the cube computation with the f coefficient scaled by 1.01 in one
/// label slot, through raw rows rather than the library solver.
fn perturbed_cube_discrepancy(
    fam: &CoefficientFamily<f64>,
    labels: CubeLabels,
    init: [C; 4],
) -> f64 {
    let solve = |al: f64, be: f64, vals: [C; 4], target: usize, perturb: bool| -> C {
        let mut f = fam.f(C::new(al - be, 0.0)).unwrap();
        if perturb {
            f *= 1.01;
        }
        let g = fam.g(al, be).unwrap();
        let (ha, hb) = (fam.h(al).unwrap(), fam.h(be).unwrap());
        let row = [-g, C::i() * ha, f, -(C::i() * hb)];
        let mut rhs = C::new(0.0, 0.0);
        for k in 0..4 {
            if k != target {
                rhs += row[k] * vals[k];
            }
        }
        -rhs / row[target]
    };
    let (a, b, c) = (labels.alpha, labels.beta, labels.gamma);
    let [x0, x1, x2, x3] = init;
    let z = C::new(0.0, 0.0);
    let x12 = solve(a, b, [x0, x1, z, x2], 2, true);
    let x13 = solve(a, c, [x0, x1, z, x3], 2, false);
    let x23 = solve(b, c, [x0, x2, z, x3], 2, false);
    let t1 = solve(b + PI, c, [x12, x1, x13, z], 3, false);
    let t2 = solve(a + PI, c, [x12, x2, x23, z], 3, false);
    (t1 - t2).norm()
}

#[test]
fn criterion_05_discrete_exponential() {
    let g = gen_square_grid(8, 0.4, 1.7).unwrap();
    let fam = CoefficientFamily::rectangular(1.0, 0.3).unwrap();
    let lambda = 0.9;
    let e = discrete_exponential(&g, &fam, lambda, 0).unwrap();

    let mut zero = FieldAssignment::new(Domain::Full);
    for v in g.vertices() {
        zero.set(v.id, C::new(0.0, 0.0));
    }
    let bt = backlund(&g, &fam, &zero, lambda, (0, C::new(1.0, 0.0))).unwrap();
    let mut agree = 0.0f64;
    for (id, v) in e.iter() {
        agree = agree.max((v - bt.get(id).unwrap()).norm() / (1.0 + v.norm()));
    }
    let spread = exponential_path_spread(&g, &fam, lambda, &e).unwrap();
    // the transform solves the dual family's equation on every face
    let face_resid = max_face_residual(&g, &fam.dual(), &e).unwrap() / (1.0 + e.max_abs());
    let mut reality = 0.0f64;
    for v in g.vertices() {
        let val = e.get(v.id).unwrap();
        let dev = match v.color {
            Color::Black => val.im.abs(),
            Color::White => val.re.abs(),
        };
        reality = reality.max(dev / (1.0 + val.norm()));
    }
    let op = laplace::assemble(&g, &fam).unwrap();
    let lap = op.max_residual(&e.restrict_to_black(&g)).unwrap() / (1.0 + e.max_abs());
    let pass =
        agree < 1e-10 && spread < 1e-10 && face_resid < 1e-9 && reality < 1e-10 && lap < 1e-9;
    report(
        5,
        "discrete exponential",
        pass,
        &format!(
            "product-vs-Backlund {agree:.3e} < 1e-10, path spread {spread:.3e} < 1e-10, \
             face residual {face_resid:.3e} < 1e-9, reality {reality:.3e} < 1e-10, \
             Laplace residual {lap:.3e} < 1e-9"
        ),
    );
}

#[test]
fn criterion_06_dirichlet_forms() {
    let mut min_eig_g0 = f64::INFINITY;
    let mut max_gg_abs = 0.0f64;
    let mut min_gg_coeff = f64::INFINITY;
    let mut max_margin_err = 0.0f64;
    for tau0 in [0.5, 1.0, 2.0] {
        let fam = CoefficientFamily::rectangular(tau0, 0.3).unwrap();
        let mut phi = 0.2;
        while phi < PI - 0.2 + 1e-12 {
            let g = gen_square_grid(2, 0.0, phi).unwrap();
            for cert in laplace::positivity_certificate(&g, &fam, EnergyForm::G0).unwrap() {
                min_eig_g0 = min_eig_g0.min(cert.min_eigenvalue);
            }
            // the gg form is an exact complete square: its minimum eigenvalue
            // is zero to rounding and the square coefficient stays positive
            for cert in laplace::positivity_certificate(&g, &fam, EnergyForm::Gg).unwrap() {
                max_gg_abs = max_gg_abs.max(cert.min_eigenvalue.abs());
                min_gg_coeff = min_gg_coeff.min(cert.square_coefficient);
            }
            max_margin_err = max_margin_err.max(
                (fam.lemma_margin(phi).unwrap() - fam.lemma_margin_closed_form(phi).unwrap()).abs(),
            );
            phi += 0.2;
        }
    }
    // rhombic: indefinite quads must be detected, and the rhombic margin
    // matches its closed form
    let famh = CoefficientFamily::rhombic(1.0, 0.3).unwrap();
    let gh = gen_square_grid(2, 0.0, 1.4).unwrap();
    let indefinite = laplace::positivity_certificate(&gh, &famh, EnergyForm::G0)
        .unwrap()
        .iter()
        .any(|c| c.min_eigenvalue < 0.0);
    let mut phi = 0.2;
    while phi < PI - 0.2 + 1e-12 {
        max_margin_err = max_margin_err.max(
            (famh.lemma_margin(phi).unwrap() - famh.lemma_margin_closed_form(phi).unwrap()).abs(),
        );
        phi += 0.2;
    }
    // energy gradient vs central finite differences
    let g = gen_square_grid(4, 0.4, 1.7).unwrap();
    let fam = CoefficientFamily::rectangular(1.0, 0.3).unwrap();
    let op = laplace::assemble(&g, &fam).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut x = FieldAssignment::new(Domain::Black);
    for v in g.vertex_ids(Color::Black) {
        x.set(v, C::new(rng.random_range(-1.0..1.0), 0.0));
    }
    let mut max_grad_err = 0.0f64;
    let h = 1e-6;
    for form in [EnergyForm::G0, EnergyForm::Gg] {
        let resid = op.residual(&x).unwrap();
        for row in op.rows() {
            let mut xp = x.clone();
            xp.set(row.center, x.get(row.center).unwrap() + C::new(h, 0.0));
            let mut xm = x.clone();
            xm.set(row.center, x.get(row.center).unwrap() - C::new(h, 0.0));
            let grad = (laplace::dirichlet_energy(&g, &fam, &xp, form).unwrap()
                - laplace::dirichlet_energy(&g, &fam, &xm, form).unwrap())
            .re / (2.0 * h);
            let r = resid[&row.center].re;
            max_grad_err = max_grad_err.max((grad - r).abs() / (1.0 + r.abs()));
        }
    }
    let pass = min_eig_g0 > 0.0
        && max_gg_abs < 1e-12
        && min_gg_coeff > 0.0
        && indefinite
        && max_margin_err < 1e-10
        && max_grad_err < 1e-6;
    report(
        6,
        "Dirichlet form positivity and margins",
        pass,
        &format!(
            "g0 min eigenvalue {min_eig_g0:.3e} > 0; gg complete square |eig| {max_gg_abs:.1e} \
             with coefficient {min_gg_coeff:.3e} > 0; rhombic indefinite detected: {indefinite}; \
             margin closed-form error {max_margin_err:.3e} < 1e-10; gradient error {max_grad_err:.3e} < 1e-6"
        ),
    );
}

#[test]
fn criterion_07_dirichlet_solve() {
    let g = gen_square_grid(8, 0.4, 1.7).unwrap();
    let fam = CoefficientFamily::rectangular(1.0, 0.3).unwrap();
    let op = laplace::assemble(&g, &fam).unwrap();
    let e = discrete_exponential(&g, &fam, 0.9, 0)
        .unwrap()
        .restrict_to_black(&g);
    let mut bnd = FieldAssignment::new(Domain::Black);
    for &b in op.boundary() {
        bnd.set(b, e.get(b).unwrap());
    }
    let sol = op.solve_dirichlet(&bnd).unwrap();
    let mut err = 0.0f64;
    for (id, v) in sol.iter() {
        err = err.max((v - e.get(id).unwrap()).norm());
    }
    // q = 0: constant boundary reproduces constants
    let deg = CoefficientFamily::degenerate(0.0);
    let opd = laplace::assemble(&g, &deg).unwrap();
    let mut ones = FieldAssignment::new(Domain::Black);
    for &b in opd.boundary() {
        ones.set(b, C::new(1.0, 0.0));
    }
    let sold = opd.solve_dirichlet(&ones).unwrap();
    let mut errd = 0.0f64;
    for (_, v) in sold.iter() {
        errd = errd.max((v - C::new(1.0, 0.0)).norm());
    }
    report(
        7,
        "Dirichlet solve",
        err < 1e-8 && errd < 1e-10,
        &format!(
            "exponential reproduction {err:.3e} < 1e-8, constant reproduction {errd:.3e} < 1e-10"
        ),
    );
}

#[test]
fn criterion_08_two_field_star_triangle() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut roundtrip = 0.0f64;
    let mut d2 = 0.0f64;
    let mut defect = 0.0f64;
    let mut action = 0.0f64;
    let mut done = 0;
    while done < 200 {
        let w = CubeWeights2::new([
            PlaquetteWeights2::new(crand(&mut rng), crand(&mut rng)),
            PlaquetteWeights2::new(crand(&mut rng), crand(&mut rng)),
            PlaquetteWeights2::new(crand(&mut rng), crand(&mut rng)),
        ]);
        if (w.w[0].c + w.w[1].c + w.w[2].c).norm() < 0.01 {
            continue;
        }
        let wf = match two_field_f(&w) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let back = match two_field_g(&wf, RootSign::Plus) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let scale = 1.0 + w.max_abs();
        let plus: f64 = (0..3)
            .map(|k| (back.weights.w[k].a - w.w[k].a).norm())
            .sum();
        let minus: f64 = (0..3)
            .map(|k| (back.weights.w[k].a + w.w[k].a).norm())
            .sum();
        roundtrip = roundtrip.max(plus.min(minus) / scale);
        for k in 0..3 {
            roundtrip = roundtrip.max((back.weights.w[k].c - w.w[k].c).norm() / scale);
        }
        d2 = d2.max(back.d_squared_residual / (1.0 + wf.max_abs().powi(4)));
        for sign in [RootSign::Plus, RootSign::Minus] {
            let b = two_field_g(&wf, sign).unwrap();
            let fw = two_field_f(&b.weights).unwrap();
            for k in 0..3 {
                roundtrip = roundtrip
                    .max((fw.w[k].a - wf.w[k].a).norm() / scale)
                    .max((fw.w[k].c - wf.w[k].c).norm() / scale);
            }
        }
        defect = defect.max(proportionality_defect(&corner_system(&w, &wf)));
        let outer = [crand(&mut rng), crand(&mut rng), crand(&mut rng)];
        if let Ok(x) = solve_corner_center(&w, outer) {
            let s = action_sijk(&w, &wf, [x, outer[0], outer[1], outer[2]]);
            let fs = 1.0 + outer.iter().map(|z| z.norm()).fold(x.norm(), f64::max);
            action = action.max(s.norm() / (fs * fs));
        }
        done += 1;
    }
    // 4D consistency, both base colors, all sign choices
    let mut disc4 = 0.0f64;
    let mut done4 = 0;
    while done4 < 100 {
        let init = FourDWeights {
            w: core::array::from_fn(|_| PlaquetteWeights2::new(crand(&mut rng), crand(&mut rng))),
        };
        let black = match check_4d_consistency(&init, BaseColor::Black, [RootSign::Plus; 4]) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let mut white_max = 0.0f64;
        let mut ok = true;
        for bits in 0..16u8 {
            let signs = core::array::from_fn(|k| {
                if bits & (1 << k) != 0 {
                    RootSign::Minus
                } else {
                    RootSign::Plus
                }
            });
            match check_4d_consistency(&init, BaseColor::White, signs) {
                Ok(d) => white_max = white_max.max(d),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        disc4 = disc4.max(black).max(white_max);
        done4 += 1;
    }
    let pass = roundtrip < 1e-10 && d2 < 1e-11 && defect < 1e-10 && action < 1e-9 && disc4 < 1e-9;
    report(
        8,
        "two-field star-triangle map",
        pass,
        &format!(
            "roundtrips {roundtrip:.3e} < 1e-10, D^2 cross-check {d2:.3e} < 1e-11, \
             rank-1 defect {defect:.3e} < 1e-10, corner action {action:.3e} < 1e-9, \
             4D consistency {disc4:.3e} < 1e-9"
        ),
    );
}

#[test]
fn criterion_09_elliptic_special_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let regimes = [
        CoefficientFamily::rectangular(1.0, 0.0).unwrap(),
        CoefficientFamily::rhombic(1.0, 0.0).unwrap(),
        CoefficientFamily::degenerate(0.0),
    ];
    let mut map_err = 0.0f64;
    let mut unit_err = 0.0f64;
    for fam in &regimes {
        let mut done = 0;
        while done < 50 {
            let p1 = rng.random_range(0.3..PI - 0.3);
            let p2 = rng.random_range(0.3..PI - 0.3);
            let p3 = TAU - p1 - p2;
            if (p3 - PI).abs() < 0.1 || p3 < 0.1 || p3 > TAU - 0.1 {
                continue;
            }
            let (star, tri) = match elliptic_special_solution((p1, p2, p3), fam) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let mapped = match two_field_f(&star) {
                Ok(v) => v,
                Err(_) => continue,
            };
            for k in 0..3 {
                map_err = map_err
                    .max((mapped.w[k].a - tri.w[k].a).norm())
                    .max((mapped.w[k].c - tri.w[k].c).norm());
                unit_err = unit_err.max((star.w[k].a * tri.w[k].a - C::new(1.0, 0.0)).norm());
            }
            done += 1;
        }
    }
    report(
        9,
        "elliptic special solution",
        map_err < 1e-10 && unit_err < 1e-11,
        &format!("F-image error {map_err:.3e} < 1e-10, a*a_k - 1 error {unit_err:.3e} < 1e-11"),
    );
}

#[test]
fn criterion_10_flip_energy_invariance() {
    let alphas = [0.1, 2.0, 4.3];
    let g = gen_from_stepped_surface(&corner_patch(2), &alphas).unwrap();
    assert!(g.faces().len() >= 10);
    let origin = g.vertex_at(C::new(0.0, 0.0)).unwrap();
    let fam = CoefficientFamily::rectangular(1.0, 0.0).unwrap();
    let op = laplace::assemble(&g, &fam).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut max_rel = 0.0f64;
    for _ in 0..20 {
        let mut boundary = FieldAssignment::new(Domain::Black);
        for &b in op.boundary() {
            boundary.set(b, C::new(rng.random_range(-1.0..1.0), 0.0));
        }
        let rep = flip_energy_invariance(&g, origin, &fam, &boundary).unwrap();
        max_rel = max_rel.max(rep.difference / rep.energy_before.norm().max(1e-30));
    }
    // corrupted weights are detected: scaling the family's mass by replacing
    // g0 with 1.02 g0 through a fake regime is not expressible, so check
    // instead that the energies differ across the flip for a non-integrable
    // weight choice (classical map at wrong angles)
    let fam_bad = CoefficientFamily::rectangular(0.4, 0.0).unwrap();
    let op_bad = laplace::assemble(&g, &fam_bad).unwrap();
    let mut boundary = FieldAssignment::new(Domain::Black);
    for &b in op_bad.boundary() {
        boundary.set(b, C::new(rng.random_range(-1.0..1.0), 0.0));
    }
    // same boundary, but compare against a flip evaluated with a different
    // family: the mismatch must be visible at order one
    let rep_ok = flip_energy_invariance(&g, origin, &fam_bad, &boundary).unwrap();
    let flipped = g.star_triangle_flip(origin).unwrap();
    let op2 = laplace::assemble(&flipped, &fam).unwrap();
    let int2 = op2.solve_dirichlet(&boundary).unwrap();
    let full2 = laplace::merge_black_field(&boundary, &int2);
    let cross_energy = laplace::dirichlet_energy(&flipped, &fam, &full2, EnergyForm::G0).unwrap();
    let opb = laplace::assemble(&g, &fam_bad).unwrap();
    let intb = opb.solve_dirichlet(&boundary).unwrap();
    let fullb = laplace::merge_black_field(&boundary, &intb);
    let base_energy = laplace::dirichlet_energy(&g, &fam_bad, &fullb, EnergyForm::G0).unwrap();
    let control = (cross_energy - base_energy).norm() / base_energy.norm().max(1e-30);
    let pass =
        max_rel < 1e-8 && rep_ok.difference / rep_ok.energy_before.norm() < 1e-8 && control > 1e-3;
    report(
        10,
        "flip energy invariance",
        pass,
        &format!(
            "relative energy difference {max_rel:.3e} < 1e-8 over 20 boundaries \
             ({} faces); mismatched-family control {control:.3e} > 1e-3",
            g.faces().len()
        ),
    );
}

#[test]
fn criterion_11_three_field_and_gauge() {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut variety = 0.0f64;
    let mut image = 0.0f64;
    let mut done = 0;
    while done < 200 {
        let mk = |rng: &mut ChaCha8Rng| -> Option<PlaquetteWeights3<f64>> {
            let a = crand(rng);
            let b = crand(rng);
            if b.norm() < 0.05 {
                return None;
            }
            PlaquetteWeights3::new(a, b, a * a / b).ok()
        };
        let (Some(w0), Some(w1), Some(w2)) = (mk(&mut rng), mk(&mut rng), mk(&mut rng)) else {
            continue;
        };
        let w = [w0, w1, w2];
        let out = match three_field_map(&w) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let scale = 1.0 + out.iter().map(|p| p.a.norm().powi(2)).fold(0.0, f64::max);
        for p in &out {
            variety = variety.max((p.b * p.c - p.a * p.a).norm() / scale);
        }
        let iscale = 1.0 + out.iter().map(|p| p.b.norm().powi(3)).fold(0.0, f64::max);
        image = image.max(three_field_image_condition(&out).norm() / iscale);
        done += 1;
    }
    // gauge construction
    let mut gauge_err = 0.0f64;
    let mut nu_err = 0.0f64;
    let mut done_g = 0;
    while done_g < 50 {
        let a_star = [crand(&mut rng), crand(&mut rng), crand(&mut rng)];
        let rho: [C; 4] = core::array::from_fn(|_| crand(&mut rng));
        if rho.iter().any(|r| r.norm() < 0.2) || (a_star[0] + a_star[1] + a_star[2]).norm() < 0.1 {
            continue;
        }
        let a_tri = classical_star_triangle(a_star).unwrap();
        let (star, tri) = gauge_construct(a_star, a_tri, rho).unwrap();
        let mapped = three_field_map(&star).unwrap();
        let scale = 1.0
            + tri
                .iter()
                .flat_map(|p| [p.a.norm(), p.b.norm(), p.c.norm()])
                .fold(0.0, f64::max);
        for k in 0..3 {
            gauge_err = gauge_err
                .max((mapped[k].a - tri[k].a).norm() / scale)
                .max((mapped[k].b - tri[k].b).norm() / scale)
                .max((mapped[k].c - tri[k].c).norm() / scale);
        }
        // nu telescopes to 1 around the closed black loop through the rhos
        let tele = (star[0].b / star[0].c) * (star[1].c / star[1].b) * (rho[2] / rho[1]).powi(2);
        nu_err = nu_err.max((tele - C::new(1.0, 0.0)).norm());
        done_g += 1;
    }
    // trivial gauge: exact classical reduction
    let a_star = [C::new(0.9, 0.0), C::new(-1.3, 0.4), C::new(0.5, 0.2)];
    let a_tri = classical_star_triangle(a_star).unwrap();
    let (star, tri) = gauge_construct(a_star, a_tri, [C::new(1.0, 0.0); 4]).unwrap();
    let trivial = star
        .iter()
        .zip(a_star)
        .all(|(p, a)| p.a == a && p.b == a && p.c == a)
        && tri
            .iter()
            .zip(a_tri)
            .all(|(p, a)| p.a == a && p.b == a && p.c == a);
    let pass = variety < 1e-12 && image < 1e-12 && gauge_err < 1e-11 && nu_err < 1e-11 && trivial;
    report(
        11,
        "three-field map and gauge classification",
        pass,
        &format!(
            "bc - a^2 residual {variety:.3e} < 1e-12, image condition {image:.3e} < 1e-12, \
             gauge map error {gauge_err:.3e} < 1e-11, nu loop error {nu_err:.3e} < 1e-11, \
             trivial gauge exact: {trivial}"
        ),
    );
}

#[test]
fn criterion_12_degenerate_limit() {
    // q = 1e-8 corresponds to tau0 = 8 ln(10) / pi in the rectangular regime
    let tau0 = 8.0 * std::f64::consts::LN_10 / PI;
    let fam = CoefficientFamily::rectangular(tau0, 0.0).unwrap();
    assert!(fam.theta_params().nome().re <= 1e-8 * 1.0000001);
    let mut err = 0.0f64;
    let mut a = 0.1;
    while a < PI - 0.1 {
        let t = (a / 2.0).tan();
        err = err.max((fam.f(C::new(a, 0.0)).unwrap().re - t).abs());
        err = err.max((fam.g0(C::new(a, 0.0)).unwrap().re - t).abs());
        a += 0.05;
    }
    // q = 0 Laplacian annihilates constants
    let g = gen_square_grid(5, 0.4, 1.7).unwrap();
    let deg = CoefficientFamily::degenerate(0.0);
    let op = laplace::assemble(&g, &deg).unwrap();
    let mut ones = FieldAssignment::new(Domain::Black);
    for v in g.vertex_ids(Color::Black) {
        ones.set(v, C::new(1.0, 0.0));
    }
    let lap = op.max_residual(&ones).unwrap();
    report(
        12,
        "degenerate limit",
        err < 1e-7 && lap < 1e-12,
        &format!(
            "|f - tan|, |g0 - tan| max {err:.3e} < 1e-7; constant-field residual {lap:.3e} < 1e-12"
        ),
    );
}
