use proptest::prelude::*;
use qshear_core::atoms::{paper_gaussian_f, wedge};
use qshear_core::group::{apply_inv_sa, apply_sa, compose, invert, make_param_grid, GroupPoint, ParamGrid};
use qshear_core::io::{decode_qsig, decode_stack, encode_qsig, encode_stack};
use qshear_core::qft::{qft_forward, qft_inverse};
use qshear_core::transform::{energy_mu, sh_forward, CoeffStack};
use qshear_core::uncertainty::{entropy, essential_support, lieb_norm, log_constant};
use qshear_core::{lp_norm, Grid, QSignal, Quaternion};

fn quat() -> impl Strategy<Value = Quaternion> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(r, i, j, k)| Quaternion::new(r, i, j, k))
}

fn signal(shape: [usize; 2]) -> impl Strategy<Value = QSignal> {
    let len = shape[0] * shape[1];
    (prop::collection::vec(quat(), len), 0.1..0.6f64).prop_map(move |(data, h)| {
        QSignal::new(Grid::centered_with(1, shape.to_vec(), vec![h; 2]).unwrap(), data).unwrap()
    })
}

fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn small_stack() -> impl Strategy<Value = CoeffStack> {
    prop::collection::vec(quat(), 4 * 16).prop_map(|vals| {
        let grid = Grid::centered(1, 4, 0.5).unwrap();
        let pg = ParamGrid::positive(0.5, 2.0, 2, 0.5, 2, 1).unwrap();
        let slices = vals.chunks(16).map(|c| c.to_vec()).collect();
        CoeffStack { pg, grid, slices, generator: "test".into(), params: vec![], c_grid: 1.0, border: 0 }
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn quaternion_product_is_associative_and_multiplicative(p in quat(), q in quat(), r in quat()) {
        prop_assert!(close((p * q) * r, p * (q * r), 1e-13));
        prop_assert!(((p * q).abs() - p.abs() * q.abs()).abs() <= 1e-13 * (1.0 + p.abs() * q.abs()));
        prop_assert!(close((p * q).conj(), q.conj() * p.conj(), 1e-14));
    }

    #[test]
    fn qft_is_unitary_and_invertible(f in signal([6, 5])) {
        let spec = qft_forward(&f);
        let nf = lp_norm(&f, 2.0).unwrap();
        prop_assert!((lp_norm(&spec.values, 2.0).unwrap() - nf).abs() <= 1e-12 * nf);
        let back = qft_inverse(&spec);
        prop_assert!(back.data.iter().zip(&f.data).all(|(a, b)| close(*a, *b, 1e-12)));
    }

    #[test]
    fn group_law(a in 0.2..3.0f64, neg in any::<bool>(), s in -2.0..2.0f64, t in prop::array::uniform2(-3.0..3.0f64),
                 b in 0.2..3.0f64, s2 in -2.0..2.0f64, t2 in prop::array::uniform2(-3.0..3.0f64)) {
        let a = if neg { -a } else { a };
        let g = GroupPoint::new(a, vec![s], t.to_vec()).unwrap();
        let h = GroupPoint::new(b, vec![s2], t2.to_vec()).unwrap();
        let e = compose(&g, &invert(&g));
        prop_assert!((e.a - 1.0).abs() < 1e-12 && e.s[0].abs() < 1e-12 && e.t.iter().all(|v| v.abs() < 1e-12));
        let x = vec![t2[0], t[1]];
        let y = apply_inv_sa(a, &[s], &apply_sa(a, &[s], &x));
        prop_assert!((y[0] - x[0]).abs() < 1e-12 && (y[1] - x[1]).abs() < 1e-12);
        let gh = compose(&g, &h);
        prop_assert!((gh.a - a * b).abs() < 1e-12);
    }

    #[test]
    fn io_round_trips_bit_exactly(f in signal([3, 7])) {
        let bytes = encode_qsig(&f);
        let back = decode_qsig(&bytes).unwrap();
        prop_assert_eq!(encode_qsig(&back), bytes);
    }

    #[test]
    fn stack_round_trips_bit_exactly(c in small_stack()) {
        let bytes = encode_stack(&c);
        prop_assert_eq!(decode_stack(&bytes).unwrap(), c);
    }

    #[test]
    fn essential_support_shrinks_with_xi(c in small_stack(), x in 0.0..1.0f64, y in 0.0..1.0f64) {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let a = essential_support(&c, lo).unwrap();
        let b = essential_support(&c, hi).unwrap();
        prop_assert!(b.measure <= a.measure + 1e-12);
        prop_assert!(a.xi <= lo + 1e-12 && b.xi <= hi + 1e-12);
    }

    #[test]
    fn entropy_ignores_order_within_equal_weights(c in small_stack(), i in 0usize..16, j in 0usize..16, slice in 0usize..4) {
        let mut d = c.clone();
        d.slices[slice].swap(i, j);
        prop_assert!((entropy(&c) - entropy(&d)).abs() <= 1e-12 * (1.0 + entropy(&c).abs()));
    }

    #[test]
    fn lieb_norm_decreases_in_p_for_bounded_stacks(c in small_stack(), p in 1.0..8.0f64, dp in 0.0..8.0f64) {
        let m = c.slices.iter().flatten().map(|q| q.abs()).fold(0.0, f64::max);
        let u = c.scale(1.0 / m);
        let (lo, hi) = (lieb_norm(&u, &u, p).unwrap(), lieb_norm(&u, &u, p + dp).unwrap());
        prop_assert!(hi.powf(p + dp) <= lo.powf(p) * (1.0 + 1e-12));
        if lo >= 1.0 {
            prop_assert!(hi <= lo * (1.0 + 1e-12));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn transform_is_left_linear(f in signal([8, 8]), g in signal([8, 8]), alpha in quat(), beta in quat()) {
        let g = QSignal::new(f.grid.clone(), g.data).unwrap();
        let pg = make_param_grid(0.5, 2.0, 1, 1.0, 2, 1).unwrap();
        for psi in [wedge(1, 1.0, 1.0).unwrap(), paper_gaussian_f(1, 0.7).unwrap()] {
            let mix = f.left_mul(alpha).add(&g.left_mul(beta)).unwrap();
            let (cf, cg, cm) = (sh_forward(&f, &psi, &pg).unwrap(), sh_forward(&g, &psi, &pg).unwrap(), sh_forward(&mix, &psi, &pg).unwrap());
            for k in 0..pg.len() {
                for m in 0..f.grid.len() {
                    let want = alpha * cf.slices[k][m] + beta * cg.slices[k][m];
                    prop_assert!(close(cm.slices[k][m], want, 1e-11), "{}", psi.name);
                }
            }
        }
    }

    #[test]
    fn window_gain_conjugates_onto_coefficients(f in signal([8, 8]), gain in -3.0..3.0f64) {
        prop_assume!(gain.abs() > 0.1);
        let pg = make_param_grid(0.5, 2.0, 1, 1.0, 2, 1).unwrap();
        let psi = wedge(1, 1.0, 1.0).unwrap();
        let c = sh_forward(&f, &psi, &pg).unwrap();
        let d = sh_forward(&f, &psi.scaled(gain), &pg).unwrap();
        for (x, y) in c.slices.iter().flatten().zip(d.slices.iter().flatten()) {
            prop_assert!(close(*x * gain, *y, 1e-12));
        }
        prop_assert!((d.c_grid - gain * gain * c.c_grid).abs() <= 1e-12 * d.c_grid);
    }

    #[test]
    fn grid_shift_moves_coefficients(shift in prop::array::uniform2(-3i64..4), q in quat()) {
        let grid = Grid::centered(1, 20, 0.3).unwrap();
        let bump = |c: [f64; 2]| move |x: &[f64]| q * (-((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)) / 0.1).exp();
        let f = QSignal::from_fn(grid.clone(), bump([0.0, 0.0]));
        let tau = [shift[0] as f64 * 0.3, shift[1] as f64 * 0.3];
        let g = QSignal::from_fn(grid.clone(), bump(tau));
        let pg = make_param_grid(0.5, 1.5, 1, 0.5, 1, 1).unwrap();
        for psi in [wedge(1, 1.0, 1.0).unwrap(), paper_gaussian_f(1, 0.7).unwrap()] {
            let (cf, cg) = (sh_forward(&f, &psi, &pg).unwrap(), sh_forward(&g, &psi, &pg).unwrap());
            let scale = cf.slices.iter().flatten().map(|q| q.abs()).fold(0.0, f64::max);
            for k in 0..pg.len() {
                for i in 0..20i64 {
                    for j in 0..20i64 {
                        let (si, sj) = (i - shift[0], j - shift[1]);
                        if !(0..20).contains(&si) || !(0..20).contains(&sj) {
                            continue;
                        }
                        let a = cg.slices[k][(i * 20 + j) as usize];
                        let b = cf.slices[k][(si * 20 + sj) as usize];
                        prop_assert!((a - b).abs() <= 1e-9 * scale, "{}", psi.name);
                    }
                }
            }
        }
    }

    #[test]
    fn slice_energy_matches_its_spectrum(f in signal([8, 8])) {
        let pg = make_param_grid(0.5, 2.0, 1, 1.0, 1, 1).unwrap();
        let c = sh_forward(&f, &wedge(1, 1.0, 1.0).unwrap(), &pg).unwrap();
        for k in 0..pg.len() {
            let s = c.slice(k);
            let e = s.energy();
            prop_assert!((qft_forward(&s).values.energy() - e).abs() <= 1e-10 * (e + 1e-300));
        }
        prop_assert!(energy_mu(&c) >= 0.0);
    }
}

#[test]
fn log_constant_is_increasing() {
    for n in 1..30 {
        assert!(log_constant(n + 1).unwrap() > log_constant(n).unwrap());
    }
}
