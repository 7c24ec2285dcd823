#![allow(dead_code)]

use matched_adi::cases::ExampleCase;
use matched_adi::geometry::Side;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Worst relative residual of `u_t = div(alpha grad u) + f` at random interior
/// space-time samples, `samples` per side. Time derivatives by central differences,
/// space derivatives analytic.
pub fn residual_check(case: &ExampleCase, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = case.half_width;
    let f = case.source();
    let (mut minus, mut plus) = (0, 0);
    let mut worst = 0.0f64;
    while minus < samples || plus < samples {
        let (x, y) = (rng.gen_range(-d..d), rng.gen_range(-d..d));
        let side = case.interface.side_at(x, y);
        let count = if side == Side::Minus { &mut minus } else { &mut plus };
        if *count >= samples {
            continue;
        }
        *count += 1;
        let t = rng.gen_range(0.05..case.final_time);
        let dt = 1e-4;
        let u = |t: f64| case.exact.value(side, x, y, t);
        let ut = (u(t + dt) - u(t - dt)) / (2.0 * dt);
        let alpha = case.alpha(side);
        let rhs = alpha * case.exact.laplacian(side, x, y, t) + f.eval(side, x, y, t);
        let scale = 1.0f64.max(ut.abs()).max(rhs.abs());
        worst = worst.max((ut - rhs).abs() / scale);
    }
    worst
}

/// Worst mismatch, relative to the size of the branch terms, between the declared jump data and jumps measured from
/// the two branches with finite-difference gradients, at random interface points.
pub fn jump_check(case: &ExampleCase, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jumps = case.jumps();
    let (am, ap) = (case.alpha_minus, case.alpha_plus);
    let fd = 1e-3;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let s = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let t = rng.gen_range(0.0..case.final_time);
        let (x, y) = case.interface.point_at_polar_angle(s);
        let lv = |x: f64, y: f64| case.interface.level(x, y);
        let (gx, gy) = (
            diff4(|d| lv(x + d, y), fd),
            diff4(|d| lv(x, y + d), fd),
        );
        let m = gx.hypot(gy);
        let (nx, ny) = (gx / m, gy / m);
        let (tx, ty) = (-ny, nx);
        let grad = |side: Side| {
            let u = |x: f64, y: f64| case.exact.value(side, x, y, t);
            (diff4(|d| u(x + d, y), fd), diff4(|d| u(x, y + d), fd))
        };
        let (gp, gm) = (grad(Side::Plus), grad(Side::Minus));
        let phi = case.exact.value(Side::Plus, x, y, t) - case.exact.value(Side::Minus, x, y, t);
        let psi = ap * (gp.0 * nx + gp.1 * ny) - am * (gm.0 * nx + gm.1 * ny);
        let phi_tau = (gp.0 - gm.0) * tx + (gp.1 - gm.1) * ty;
        let (vp, vm) = (
            case.exact.value(Side::Plus, x, y, t).abs(),
            case.exact.value(Side::Minus, x, y, t).abs(),
        );
        let (np, nm) = (gp.0.hypot(gp.1), gm.0.hypot(gm.1));
        for (declared, measured, size) in [
            ((jumps.phi)(x, y, t), phi, vp.max(vm)),
            ((jumps.psi)(x, y, t), psi, (ap * np).max(am * nm)),
            ((jumps.phi_tau)(x, y, t), phi_tau, np.max(nm)),
        ] {
            worst = worst.max((declared - measured).abs() / size.max(1.0));
        }
    }
    worst
}

/// Fourth-order central difference of `g` at zero.
fn diff4(g: impl Fn(f64) -> f64, h: f64) -> f64 {
    (8.0 * (g(h) - g(-h)) - (g(2.0 * h) - g(-2.0 * h))) / (12.0 * h)
}
