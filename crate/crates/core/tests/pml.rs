use lisawave::grid::{Grid, MaterialField, NodeCoefficients};
use lisawave::kernel::{classical_step, lisa_step, SourceTerm, WaveState};
use lisawave::pml::{
    build_damping, node_materials, pad_materials, padded_grid, validate_layer_materials,
    coupled_step, pml1_step, pml2_step, DampingProfile, LogBase, PmlAuxState, PmlOrder, PmlRegion,
};
use lisawave::sources::SeparableSource;
use lisawave::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gauss-Legendre 5 on [0, hi]; exact for polynomials of degree <= 9.
fn integrate(f: impl Fn(f64) -> f64, hi: f64) -> f64 {
    let s10: f64 = (10.0_f64 / 7.0).sqrt();
    let nodes = [
        -(5.0 + 2.0 * s10).sqrt() / 3.0,
        -(5.0 - 2.0 * s10).sqrt() / 3.0,
        0.0,
        (5.0 - 2.0 * s10).sqrt() / 3.0,
        (5.0 + 2.0 * s10).sqrt() / 3.0,
    ];
    let s70: f64 = 70.0_f64.sqrt();
    let weights = [
        (322.0 - 13.0 * s70) / 900.0,
        (322.0 + 13.0 * s70) / 900.0,
        128.0 / 225.0,
        (322.0 + 13.0 * s70) / 900.0,
        (322.0 - 13.0 * s70) / 900.0,
    ];
    let half = hi / 2.0;
    nodes.iter().zip(&weights).map(|(&x, &w)| w * f(half * (x + 1.0))).sum::<f64>() * half
}

#[test]
fn amplitude_and_profile_values() {
    // ten cells of h = 0.1 make the layer depth exactly 1
    let interior = Grid::new(0.0, 1.0, 0.0, 1.0, 10, 10).unwrap();
    let p = build_damping(&interior, 10, 4, 1e-4, 1.0, LogBase::Natural).unwrap();
    assert!((p.lambda_max - 46.051701859880914).abs() < 1e-12);
    assert!((p.lambda_at_depth(0.5) - 2.878231366242557).abs() < 1e-12);
    assert_eq!(p.lambda_at_depth(0.0), 0.0);
    assert!((p.lambda_at_depth(1.0) - p.lambda_max).abs() < 1e-12);

    let p10 = build_damping(&interior, 10, 4, 1e-4, 1.0, LogBase::Ten).unwrap();
    assert!((p10.lambda_max - 20.0).abs() < 1e-12);

    // amplitude scales linearly with the wave speed
    let p2 = build_damping(&interior, 10, 4, 1e-4, 2.0, LogBase::Natural).unwrap();
    assert!((p2.lambda_max - 2.0 * p.lambda_max).abs() < 1e-12);
}

#[test]
fn interior_damping_is_exactly_zero() {
    let interior = Grid::new(0.0, 1.0, 0.0, 1.0, 20, 20).unwrap();
    let w = 4;
    let p = build_damping(&interior, w, 4, 1e-4, 1.0, LogBase::Natural).unwrap();
    assert_eq!(p.lambda_x.len(), 20 + 2 * w + 1);
    for i in w..=(w + 20) {
        assert_eq!(p.lambda_x[i], 0.0, "whole node {i}");
        assert_eq!(p.lambda_y[i], 0.0);
    }
    // half position i + 1/2 is interior for i in w..w+20
    for i in w..(w + 20) {
        assert_eq!(p.lambda_x_half[i], 0.0, "half node {i}");
    }
    assert!(p.lambda_x_half[w - 1] > 0.0);
    assert!(p.lambda_x_half[w + 20] > 0.0);

    // strictly increasing with depth on both flanks
    for i in 0..w {
        assert!(p.lambda_x[i] > p.lambda_x[i + 1].max(0.0) || p.lambda_x[i + 1] == 0.0);
        assert!(p.lambda_x[i] > 0.0);
    }
    for i in (w + 20)..(20 + 2 * w) {
        assert!(p.lambda_x[i + 1] > p.lambda_x[i]);
    }
    // outermost node carries the full amplitude
    assert!((p.lambda_x[0] - p.lambda_max * (w as f64 * interior.h).powi(4)).abs() < 1e-12);
}

#[test]
fn damping_parameters_are_validated() {
    let g = Grid::new(0.0, 1.0, 0.0, 1.0, 10, 10).unwrap();
    let err = build_damping(&g, 10, 4, 2.0, 1.0, LogBase::Natural).unwrap_err();
    assert!(err.to_string().contains("(0, 1)"), "{err}");
    assert!(build_damping(&g, 10, 4, 1.0, 1.0, LogBase::Natural).is_err());
    assert!(build_damping(&g, 0, 4, 1e-4, 1.0, LogBase::Natural).is_err());
    assert!(build_damping(&g, 10, 4, 1e-4, 0.0, LogBase::Natural).is_err());
    assert!(build_damping(&g, 10, 4, 1e-4, f64::NAN, LogBase::Natural).is_err());
    // several problems are collected into one report
    match build_damping(&g, 0, 4, 2.0, -1.0, LogBase::Natural) {
        Err(Error::Config(problems)) => assert_eq!(problems.len(), 3),
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn layer_integral_hits_the_attenuation_target() {
    let interior = Grid::new(-10.0, 10.0, -10.0, 10.0, 400, 400).unwrap();
    for (base, logr) in [(LogBase::Natural, (1e-4_f64).ln()), (LogBase::Ten, (1e-4_f64).log10())]
    {
        for c in [1.0, 1.3] {
            let p = build_damping(&interior, 15, 4, 1e-4, c, base).unwrap();
            let depth = 15.0 * interior.h;
            let integral = integrate(|d| p.lambda_at_depth(d), depth);
            let target = -c * logr;
            assert!(
                (integral - target).abs() <= 1e-12 * target,
                "{base:?} c={c}: {integral} vs {target}"
            );
        }
    }
}

#[test]
fn first_order_delta_response() {
    let g = Grid::new(0.0, 1.0, 0.0, 1.0, 8, 8).unwrap();
    let p = DampingProfile::zero(&g);
    let (rho, mu) = (2.0, 1.0);
    let tau = 0.01;
    let mut st = WaveState::zeros(&g, tau);
    let mut aux = PmlAuxState::zeros(&g);
    let c = g.idx(4, 4);
    st.u_curr[c] = 1.0;
    pml1_step(&mut st, &mut aux, &g, rho, mu, &p).unwrap();

    let gain = tau / (rho * g.h);
    assert!((aux.vx[g.idx(3, 4)] - gain).abs() < 1e-16);
    assert!((aux.vx[g.idx(4, 4)] + gain).abs() < 1e-16);
    assert!((aux.vy[g.idx(4, 3)] - gain).abs() < 1e-16);
    assert!((aux.vy[g.idx(4, 4)] + gain).abs() < 1e-16);
    assert_eq!(aux.vx[g.idx(5, 4)], 0.0);
    assert!(aux.psi.iter().all(|&v| v == 0.0), "psi is inert without damping");

    // u' = u + tau mu (dx vx + dy vy): the center loses 4 tau^2 mu / (rho h^2)
    let expect = 1.0 - 4.0 * tau * tau * mu / (rho * g.h * g.h);
    assert!((st.u_curr[c] - expect).abs() < 1e-15);
    let neighbor = tau * tau * mu / (rho * g.h * g.h);
    assert!((st.u_curr[g.idx(5, 4)] - neighbor).abs() < 1e-16);
    assert!((st.u_curr[g.idx(4, 5)] - neighbor).abs() < 1e-16);
}

#[test]
fn first_order_constant_is_fixed_without_damping() {
    let g = Grid::new(0.0, 1.0, 0.0, 1.0, 8, 8).unwrap();
    let p = DampingProfile::zero(&g);
    let mut st = WaveState::zeros(&g, 0.02);
    st.u_prev.fill(0.4);
    st.u_curr.fill(0.4);
    let mut aux = PmlAuxState::zeros(&g);
    for _ in 0..5 {
        pml1_step(&mut st, &mut aux, &g, 1.0, 1.0, &p).unwrap();
    }
    assert!(st.u_curr.iter().all(|&v| v == 0.4));
    assert!(aux.vx.iter().all(|&v| v == 0.0));
}

#[test]
fn second_order_without_damping_equals_the_homogeneous_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let g = Grid::new(0.0, 1.0, 0.0, 1.0, 12, 12).unwrap();
    let p = DampingProfile::zero(&g);
    for trial in 0..10 {
        let rho = rng.gen_range(0.5..2.0);
        let mu = rng.gen_range(0.5..2.0);
        let mut a = WaveState::zeros(&g, 0.01);
        for v in a.u_prev.iter_mut().chain(a.u_curr.iter_mut()) {
            *v = rng.gen_range(-1.0..1.0);
        }
        let mut b = a.clone();
        let mut aux = PmlAuxState::zeros(&g);
        // stale intermediate fields must not leak into u when lambda = 0
        for v in aux.vx.iter_mut().chain(aux.vy.iter_mut()) {
            *v = rng.gen_range(-1.0..1.0);
        }
        for _ in 0..10 {
            pml2_step(&mut a, &mut aux, &g, rho, mu, &p).unwrap();
            classical_step(&mut b, &g, rho, mu, None).unwrap();
        }
        for (x, y) in a.u_curr.iter().zip(&b.u_curr) {
            assert!((x - y).abs() == 0.0, "trial {trial}: {x} vs {y}");
        }
        assert!(aux.psi.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn coupled_step_without_layers_is_the_interior_stencil() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let g = Grid::new(0.0, 1.0, 0.0, 1.0, 10, 10).unwrap();
    let mut m = MaterialField::uniform(&g, 1.0, 1.0).unwrap();
    for v in m.rho.iter_mut().chain(m.mu.iter_mut()) {
        *v = rng.gen_range(0.5..2.0);
    }
    let coeffs = NodeCoefficients::build(&m).unwrap();
    let region = PmlRegion {
        order: PmlOrder::Second,
        profile: DampingProfile::zero(&g),
        mats: node_materials(&m),
    };
    let spatial: Vec<f64> = (0..g.n_nodes()).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let mut a = WaveState::zeros(&g, 0.01);
    for v in a.u_prev.iter_mut().chain(a.u_curr.iter_mut()) {
        *v = rng.gen_range(-1.0..1.0);
    }
    let mut b = a.clone();
    let mut aux = PmlAuxState::zeros(&g);
    for k in 0..10 {
        let src = SourceTerm { spatial: &spatial, amp: (k as f64 * 0.1).cos() };
        coupled_step(&mut a, &mut aux, &g, &coeffs, &region, Some(src)).unwrap();
        lisa_step(&mut b, &g, &coeffs, Some(src)).unwrap();
    }
    assert_eq!(a.u_curr, b.u_curr);
    assert_eq!(a.u_prev, b.u_prev);
}

#[test]
fn padding_and_clamping() {
    let interior = Grid::new(0.0, 1.0, 0.0, 1.0, 10, 10).unwrap();
    let padded = padded_grid(&interior, 3);
    assert_eq!(padded.n_x, 16);
    assert_eq!(padded.h, interior.h);
    assert!((padded.x(3) - 0.0).abs() < 1e-15);
    assert!((padded.x0 + 0.3).abs() < 1e-15);

    let g3 = Grid::new(0.0, 3.0, 0.0, 3.0, 3, 3).unwrap();
    let mut m = MaterialField::uniform(&g3, 1.0, 1.0).unwrap();
    for (k, v) in m.rho.iter_mut().enumerate() {
        *v = (k + 1) as f64;
    }
    let p = pad_materials(&m, 2);
    assert_eq!(p.n_x, 7);
    // corners replicate the interior corner cells
    assert_eq!(p.rho[p.cell(0, 0)], m.rho[m.cell(0, 0)]);
    assert_eq!(p.rho[p.cell(6, 6)], m.rho[m.cell(2, 2)]);
    assert_eq!(p.rho[p.cell(6, 0)], m.rho[m.cell(2, 0)]);
    // flanks replicate the nearest interior cell of their row
    assert_eq!(p.rho[p.cell(1, 3)], m.rho[m.cell(0, 1)]);
    assert_eq!(p.rho[p.cell(5, 3)], m.rho[m.cell(2, 1)]);
    // interior block is untouched
    for cy in 0..3 {
        for cx in 0..3 {
            assert_eq!(p.rho[p.cell(cx + 2, cy + 2)], m.rho[m.cell(cx, cy)]);
        }
    }
    validate_layer_materials(&p, 2).unwrap();
}

#[test]
fn layer_material_variation_is_rejected() {
    let interior = Grid::new(0.0, 1.0, 0.0, 1.0, 6, 6).unwrap();
    let m = MaterialField::vertical_interface(&interior, 0.5, (1.0, 1.0), (4.0, 2.0)).unwrap();
    let mut p = pad_materials(&m, 2);
    validate_layer_materials(&p, 2).unwrap();
    let k = p.cell(0, 4);
    p.rho[k] *= 1.5;
    let err = validate_layer_materials(&p, 2).unwrap_err();
    assert!(err.to_string().contains("vary along the layer depth"), "{err}");

    let mut p2 = pad_materials(&m, 2);
    let k = p2.cell(4, 9);
    p2.mu[k] *= 1.5;
    assert!(validate_layer_materials(&p2, 2).is_err());

    assert!(validate_layer_materials(&m, 3).is_err(), "field too small for the layers");
}

#[test]
fn node_materials_cover_staggered_positions() {
    let g3 = Grid::new(0.0, 3.0, 0.0, 3.0, 3, 3).unwrap();
    let mut m = MaterialField::uniform(&g3, 1.0, 1.0).unwrap();
    for (k, v) in m.rho.iter_mut().enumerate() {
        *v = (k + 1) as f64;
    }
    let nm = node_materials(&m);
    assert_eq!(nm.rho_node.len(), 16);
    let node = |i: usize, j: usize| j * 4 + i;
    assert_eq!(nm.rho_node[node(0, 0)], m.rho[m.cell(0, 0)]);
    assert_eq!(nm.rho_node[node(1, 2)], m.rho[m.cell(1, 2)]);
    // the last node row and column clamp back to the last cells
    assert_eq!(nm.rho_node[node(3, 1)], m.rho[m.cell(2, 1)]);
    assert_eq!(nm.rho_node[node(2, 3)], m.rho[m.cell(2, 2)]);
    for (r, ir) in nm.rho_node.iter().zip(&nm.inv_rho_node) {
        assert_eq!(*ir, 1.0 / r);
    }
}

#[test]
fn absorbing_run_decays_after_the_forcing_stops() {
    let interior = Grid::new(-1.0, 1.0, -1.0, 1.0, 40, 40).unwrap();
    let width = 8;
    let grid = padded_grid(&interior, width);
    let cells = pad_materials(&MaterialField::uniform(&interior, 1.0, 1.0).unwrap(), width);
    let coeffs = NodeCoefficients::build(&cells).unwrap();
    let profile = build_damping(&interior, width, 4, 1e-4, 1.0, LogBase::Natural).unwrap();
    let region =
        PmlRegion { order: PmlOrder::Second, profile, mats: node_materials(&cells) };
    let source = SeparableSource::pulse(&grid, 0.0, 0.0);
    let tau = grid.h / 4.0;
    let cutoff = (std::f64::consts::PI / tau).floor() as u64;
    let mut st = WaveState::zeros(&grid, tau);
    let mut aux = PmlAuxState::zeros(&grid);

    let total = 500u64;
    assert!(cutoff + 100 < total, "forcing must stop well before the tail windows");
    let mut maxima = Vec::new();
    let mut peak = 0.0_f64;
    for k in 0..total {
        let term = if k < cutoff {
            let t_next = (st.step_index + 1) as f64 * tau;
            Some(SourceTerm { spatial: &source.spatial, amp: source.amp(t_next) })
        } else {
            None
        };
        coupled_step(&mut st, &mut aux, &grid, &coeffs, &region, term).unwrap();
        let m = st.u_curr.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        peak = peak.max(m);
        maxima.push(m);
    }
    // five trailing 25-step windows: outgoing energy only leaves
    let tail = &maxima[(total as usize - 125)..];
    let windows: Vec<f64> =
        tail.chunks(25).map(|w| w.iter().fold(0.0_f64, |a, &b| a.max(b))).collect();
    eprintln!("peak {peak}, windows {windows:?}");
    for k in 1..windows.len() {
        assert!(
            windows[k] <= windows[k - 1] + 1e-6,
            "window {k} grew: {:?} (peak {peak})",
            windows
        );
    }
    assert!(
        windows[windows.len() - 1] < 0.5 * peak,
        "large residual: final window {} vs peak {peak}",
        windows[windows.len() - 1]
    );
}

#[test]
fn first_and_second_order_both_absorb() {
    // same setup as above at half the steps, comparing the two formulations;
    // the wider, softer layer keeps tau * lambda inside the explicit
    // stability margin of the first-order damping update
    let interior = Grid::new(-1.0, 1.0, -1.0, 1.0, 32, 32).unwrap();
    let width = 12;
    let grid = padded_grid(&interior, width);
    let cells = pad_materials(&MaterialField::uniform(&interior, 1.0, 1.0).unwrap(), width);
    let coeffs = NodeCoefficients::build(&cells).unwrap();
    let profile = build_damping(&interior, width, 4, 1e-3, 1.0, LogBase::Natural).unwrap();
    let source = SeparableSource::pulse(&grid, 0.0, 0.0);
    let tau = grid.h / 4.0;
    let cutoff = (std::f64::consts::PI / tau).floor() as u64;

    let mut finals = Vec::new();
    for order in [PmlOrder::First, PmlOrder::Second] {
        let region = PmlRegion {
            order,
            profile: profile.clone(),
            mats: node_materials(&cells),
        };
        let mut st = WaveState::zeros(&grid, tau);
        let mut aux = PmlAuxState::zeros(&grid);
        let mut peak = 0.0_f64;
        for k in 0..400u64 {
            let term = if k < cutoff {
                let t_next = (st.step_index + 1) as f64 * tau;
                Some(SourceTerm { spatial: &source.spatial, amp: source.amp(t_next) })
            } else {
                None
            };
            coupled_step(&mut st, &mut aux, &grid, &coeffs, &region, term).unwrap();
            peak = peak.max(st.u_curr.iter().fold(0.0_f64, |a, v| a.max(v.abs())));
        }
        let fin = st.u_curr.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        eprintln!("{order:?}: residual {fin} of peak {peak}");
        assert!(fin < 0.25 * peak, "{order:?}: residual {fin} of peak {peak}");
        finals.push(fin);
    }
    assert!(finals[0] > 0.0 && finals[1] > 0.0);
}

#[test]
fn aux_dimension_mismatch_is_rejected() {
    let g = Grid::new(0.0, 1.0, 0.0, 1.0, 8, 8).unwrap();
    let g_small = Grid::new(0.0, 1.0, 0.0, 1.0, 4, 4).unwrap();
    let p = DampingProfile::zero(&g);
    let mut st = WaveState::zeros(&g, 0.01);
    let mut aux = PmlAuxState::zeros(&g_small);
    assert!(matches!(
        pml1_step(&mut st, &mut aux, &g, 1.0, 1.0, &p),
        Err(Error::Dimension(_))
    ));
    let p_small = DampingProfile::zero(&g_small);
    let mut aux = PmlAuxState::zeros(&g);
    assert!(pml2_step(&mut st, &mut aux, &g, 1.0, 1.0, &p_small).is_err());
}

#[test]
fn layer_update_diverges_cleanly_when_unstable() {
    let g = Grid::new(0.0, 1.0, 0.0, 1.0, 12, 12).unwrap();
    let p = DampingProfile::zero(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut st = WaveState::zeros(&g, 4.0 * g.h);
    for v in st.u_prev.iter_mut().chain(st.u_curr.iter_mut()) {
        *v = rng.gen_range(-1.0..1.0);
    }
    let mut aux = PmlAuxState::zeros(&g);
    let mut saw = false;
    for _ in 0..400 {
        if let Err(Error::Diverged { step }) = pml2_step(&mut st, &mut aux, &g, 1.0, 1.0, &p) {
            assert_eq!(step, st.step_index + 1);
            saw = true;
            break;
        }
    }
    assert!(saw, "unstable layer run must report divergence");
}
