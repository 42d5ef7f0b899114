//! Closed-form physics of a single Gaussian channel: dispersion, density,
//! osmotic and total velocity fields, the action/phase function, and the
//! underlying phase-space distribution.
//!
//! All quantities are evaluated analytically; gradients are never obtained
//! by differencing sampled fields (that would cancel catastrophically in
//! the Gaussian tails).

use crate::error::{Error, Result};
use crate::field::Field;
use crate::model::{GridSpec, PhysicalParams, SlitSpec};

/// Densities are clamped to this floor instead of underflowing to zero.
pub const DENSITY_FLOOR: f64 = 1e-300;

const SQRT_TAU: f64 = 2.5066282746310002; // sqrt(2 pi)

/// Initial spread velocity u0 = D / sigma0.
#[inline]
pub fn u0(slit: &SlitSpec, params: &PhysicalParams) -> f64 {
    params.diffusivity / slit.sigma0
}

/// Displacement from the moving centroid, xi = x - X - v t.
#[inline]
pub fn displacement(slit: &SlitSpec, x: f64, t: f64) -> f64 {
    x - slit.center - slit.velocity_x * t
}

#[inline]
fn sigma_unchecked(slit: &SlitSpec, params: &PhysicalParams, t: f64) -> f64 {
    let s0 = slit.sigma0;
    let u = params.diffusivity / s0;
    (s0 * s0 + u * u * t * t).sqrt()
}

/// Dispersion law sigma(t) = sqrt(sigma0^2 + (D/sigma0)^2 t^2).
pub fn sigma_at(slit: &SlitSpec, params: &PhysicalParams, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    Ok(sigma_unchecked(slit, params, t))
}

/// Unit-mass channel density P(x, t); the slit weight is applied by the
/// superposition, not here.
pub fn density_at(slit: &SlitSpec, params: &PhysicalParams, x: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let sigma = sigma_unchecked(slit, params, t);
    let xi = displacement(slit, x, t);
    let p = (-xi * xi / (2.0 * sigma * sigma)).exp() / (SQRT_TAU * sigma);
    p.max(DENSITY_FLOOR)
}

/// Osmotic velocity u = -D grad(P)/P = xi D / sigma^2.
pub fn osmotic_velocity(slit: &SlitSpec, params: &PhysicalParams, x: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let sigma = sigma_unchecked(slit, params, t);
    displacement(slit, x, t) * params.diffusivity / (sigma * sigma)
}

/// Average transport velocity of the channel, v_tot = v + xi u0^2 t / sigma^2.
pub fn total_velocity(slit: &SlitSpec, params: &PhysicalParams, x: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let sigma = sigma_unchecked(slit, params, t);
    let u = u0(slit, params);
    slit.velocity_x + displacement(slit, x, t) * u * u * t / (sigma * sigma)
}

/// Action/phase function of the channel,
/// S = m v (x - X) + (m u0^2 / 2) (xi/sigma)^2 t - E t + hbar * phase_offset.
///
/// The kinetic term uses (xi(t)/sigma(t))^2, which is constant along a
/// smoothed trajectory, so it equals (xi(0)/sigma0)^2.
pub fn phase_action(slit: &SlitSpec, params: &PhysicalParams, x: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let sigma = sigma_unchecked(slit, params, t);
    let u = u0(slit, params);
    let ratio = displacement(slit, x, t) / sigma;
    params.mass * slit.velocity_x * (x - slit.center)
        + 0.5 * params.mass * u * u * ratio * ratio * t
        - params.energy * t
        + params.hbar * slit.phase_offset
}

/// Phase-space distribution of the channel in its rest frame
/// (centroid at the origin, zero centroid velocity):
/// f(x, p, t) = N exp(-(x - p t / m)^2 / 2 sigma0^2) exp(-p^2 / 2 m^2 u0^2)
/// with N = 1 / (2 pi sigma0 m u0) = 2/h.
pub fn phase_space_density(
    slit: &SlitSpec,
    params: &PhysicalParams,
    x: f64,
    p: f64,
    t: f64,
) -> f64 {
    debug_assert!(t >= 0.0);
    let s0 = slit.sigma0;
    let m = params.mass;
    let u = u0(slit, params);
    let norm = 1.0 / (std::f64::consts::TAU * s0 * m * u);
    let a = x - p * t / m;
    norm * (-a * a / (2.0 * s0 * s0)).exp() * (-p * p / (2.0 * m * m * u * u)).exp()
}

/// Per-slit analytic fields sampled on the space-time grid.
///
/// Invariants: `p == r * r` pointwise, each `p` row integrates to unit mass
/// (before weighting), and `xi(t)/sigma(t)` is constant along smoothed
/// trajectories.
#[derive(Debug, Clone)]
pub struct ChannelField {
    pub slit: SlitSpec,
    pub params: PhysicalParams,
    /// sigma at each grid time.
    pub sigma_t: Vec<f64>,
    /// Amplitude sqrt(P).
    pub r: Field,
    /// Action field.
    pub s: Field,
    /// Probability density (unit mass, unweighted).
    pub p: Field,
    /// Osmotic velocity field.
    pub u: Field,
    /// Total average velocity field.
    pub v_tot: Field,
    /// Displacement field xi = x - X - v t.
    pub xi: Field,
}

impl ChannelField {
    /// Samples all analytic fields of `slit` on `grid`.
    pub fn evaluate(slit: &SlitSpec, params: &PhysicalParams, grid: &GridSpec) -> Self {
        let nx = grid.nx;
        let n_times = grid.n_times();
        let sigma_t: Vec<f64> = grid.ts().map(|t| sigma_unchecked(slit, params, t)).collect();

        let mut field = ChannelField {
            slit: *slit,
            params: *params,
            sigma_t,
            r: Field::zeros(nx, n_times),
            s: Field::zeros(nx, n_times),
            p: Field::zeros(nx, n_times),
            u: Field::zeros(nx, n_times),
            v_tot: Field::zeros(nx, n_times),
            xi: Field::zeros(nx, n_times),
        };

        // One pass per output field keeps the borrow checker happy without
        // an interleaved struct-of-rows; each pass is row-parallel.
        let eval_row = |out: &mut Field, f: &dyn Fn(f64, f64) -> f64| {
            let data = out.values_mut();
            crate::field::fill_time_rows(data, nx, |it, row| {
                let t = grid.t_at(it);
                for (ix, v) in row.iter_mut().enumerate() {
                    *v = f(grid.x_at(ix), t);
                }
            });
        };

        eval_row(&mut field.p, &|x, t| density_at(slit, params, x, t));
        eval_row(&mut field.s, &|x, t| phase_action(slit, params, x, t));
        eval_row(&mut field.u, &|x, t| osmotic_velocity(slit, params, x, t));
        eval_row(&mut field.v_tot, &|x, t| total_velocity(slit, params, x, t));
        eval_row(&mut field.xi, &|x, t| displacement(slit, x, t));

        // R derived from the stored P so that p == r * r holds bitwise.
        let r_data = field.r.values_mut();
        let p_data = field.p.values();
        crate::field::fill_time_rows(r_data, nx, |it, row| {
            for (ix, v) in row.iter_mut().enumerate() {
                *v = p_data[it * nx + ix].sqrt();
            }
        });

        field
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{trapezoid, trapezoid_fn};

    fn unit_slit() -> (SlitSpec, PhysicalParams) {
        (SlitSpec::new(0.0, 1.0), PhysicalParams::default())
    }

    #[test]
    fn sigma_examples() {
        let (slit, params) = unit_slit();
        assert_eq!(sigma_at(&slit, &params, 0.0).unwrap(), 1.0);
        assert!((sigma_at(&slit, &params, 1.0).unwrap() - 2.0f64.sqrt()).abs() < 1e-12);

        let wide = SlitSpec::new(0.0, 2.0);
        assert!((sigma_at(&wide, &params, 2.0).unwrap() - 5.0f64.sqrt()).abs() < 1e-12);

        assert!(matches!(
            sigma_at(&slit, &params, -0.5),
            Err(Error::NegativeTime { .. })
        ));
    }

    #[test]
    fn sigma_is_monotone_in_time() {
        let (slit, params) = unit_slit();
        let mut prev = 0.0;
        for k in 0..200 {
            let s = sigma_at(&slit, &params, k as f64 * 0.05).unwrap();
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn density_peak_and_symmetry() {
        let params = PhysicalParams::default();
        let slit = SlitSpec::new(1.5, 0.8).with_velocity(0.3);
        for t in [0.0, 0.7, 2.0] {
            let centroid = slit.centroid_at(t);
            let sigma = sigma_at(&slit, &params, t).unwrap();
            let peak = density_at(&slit, &params, centroid, t);
            assert!((peak - 1.0 / (SQRT_TAU * sigma)).abs() < 1e-14);
            for a in [0.1, 0.9, 2.3] {
                let lhs = density_at(&slit, &params, centroid + a, t);
                let rhs = density_at(&slit, &params, centroid - a, t);
                assert!((lhs - rhs).abs() <= 1e-15 * lhs.abs());
            }
        }
    }

    #[test]
    fn density_integrates_to_unit_mass() {
        let params = PhysicalParams::default();
        let slit = SlitSpec::new(0.4, 1.2).with_velocity(-0.2);
        for t in [0.0, 1.0, 3.0] {
            let sigma = sigma_at(&slit, &params, t).unwrap();
            let c = slit.centroid_at(t);
            let mass = trapezoid_fn(c - 8.0 * sigma, c + 8.0 * sigma, 4001, |x| {
                density_at(&slit, &params, x, t)
            });
            assert!((mass - 1.0).abs() < 1e-6, "mass = {mass} at t = {t}");
        }
    }

    #[test]
    fn osmotic_velocity_examples() {
        let (slit, params) = unit_slit();
        // Zero at the centroid.
        assert_eq!(osmotic_velocity(&slit, &params, 0.0, 0.7), 0.0);
        // xi = sigma^2, D = 1 -> u = 1. At t = 1, sigma^2 = 2.
        assert!((osmotic_velocity(&slit, &params, 2.0, 1.0) - 1.0).abs() < 1e-12);
        // Odd about the centroid.
        let l = osmotic_velocity(&slit, &params, -0.8, 0.5);
        let r = osmotic_velocity(&slit, &params, 0.8, 0.5);
        assert!((l + r).abs() < 1e-15);
    }

    #[test]
    fn mean_square_osmotic_velocity_is_d2_over_sigma2() {
        let (slit, params) = unit_slit();
        let d = params.diffusivity;
        for t in [0.0, 0.5, 1.5] {
            let sigma = sigma_at(&slit, &params, t).unwrap();
            let mean_u2 = trapezoid_fn(-9.0 * sigma, 9.0 * sigma, 6001, |x| {
                let u = osmotic_velocity(&slit, &params, x, t);
                density_at(&slit, &params, x, t) * u * u
            });
            let expect = d * d / (sigma * sigma);
            assert!(
                ((mean_u2 - expect) / expect).abs() < 1e-6,
                "mean u^2 = {mean_u2}, want {expect}"
            );
        }
        // Hence u0 = D / sigma0 at t = 0.
        assert_eq!(u0(&slit, &params), d / slit.sigma0);
    }

    #[test]
    fn osmotic_momentum_matches_gradient_form() {
        // m u == -(hbar/2) grad(P)/P with the analytic gradient
        // grad(P)/P = -xi/sigma^2, at every probe point.
        let params = PhysicalParams::derive(1.7, 0.9, 1.3).unwrap();
        let slit = SlitSpec::new(-0.6, 0.7).with_velocity(0.4);
        for t in [0.0, 0.9, 2.2] {
            let sigma = sigma_at(&slit, &params, t).unwrap();
            for x in [-3.0, -0.61, 0.0, 1.7, 4.2] {
                let xi = displacement(&slit, x, t);
                let grad_log_p = -xi / (sigma * sigma);
                let lhs = params.mass * osmotic_velocity(&slit, &params, x, t);
                let rhs = -(params.hbar / 2.0) * grad_log_p;
                assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-30));
            }
        }
    }

    #[test]
    fn total_velocity_examples() {
        let params = PhysicalParams::default();
        let slit = SlitSpec::new(0.0, 1.0).with_velocity(0.7);
        // Identity at t = 0.
        assert_eq!(total_velocity(&slit, &params, 3.0, 0.0), 0.7);

        // At xi = sigma and t large, v_tot -> v + u0.
        let u = u0(&slit, &params);
        let t = 1e4 * slit.sigma0 * slit.sigma0 / params.diffusivity;
        let sigma = sigma_at(&slit, &params, t).unwrap();
        let x = slit.centroid_at(t) + sigma;
        let v = total_velocity(&slit, &params, x, t);
        assert!(((v - (slit.velocity_x + u)) / (slit.velocity_x + u)).abs() < 1e-3);
    }

    #[test]
    fn spreading_trajectory_satisfies_velocity_field() {
        // x(t) = x0 sigma(t)/sigma0 has dx/dt == v_tot(x(t), t).
        let (slit, params) = unit_slit();
        let x0 = 0.8;
        let path = |t: f64| x0 * sigma_unchecked(&slit, &params, t) / slit.sigma0;
        let h = 1e-5;
        for t in [0.3, 1.0, 2.4] {
            let deriv = (path(t + h) - path(t - h)) / (2.0 * h);
            let v = total_velocity(&slit, &params, path(t), t);
            assert!((deriv - v).abs() < 1e-6, "t = {t}: {deriv} vs {v}");
        }
    }

    #[test]
    fn action_examples() {
        let params = PhysicalParams::default();
        let slit = SlitSpec::new(0.5, 1.0).with_velocity(1.2);
        // t = 0 with no offset: S = m v (x - X).
        for x in [-1.0, 0.5, 2.0] {
            let s = phase_action(&slit, &params, x, 0.0);
            assert!((s - params.mass * 1.2 * (x - 0.5)).abs() < 1e-14);
        }
        // Offset enters as hbar * phase_offset.
        let shifted = SlitSpec { phase_offset: 0.25, ..slit };
        let d = phase_action(&shifted, &params, 1.0, 0.7) - phase_action(&slit, &params, 1.0, 0.7);
        assert!((d - params.hbar * 0.25).abs() < 1e-14);
    }

    #[test]
    fn kinetic_ratio_is_conserved_along_spreading_paths() {
        // (xi(t)/sigma(t))^2 along x(t) = X + v t + xi0 sigma(t)/sigma0
        // equals (xi0/sigma0)^2.
        let params = PhysicalParams::default();
        let slit = SlitSpec::new(-0.3, 0.9).with_velocity(0.5);
        let xi0: f64 = 1.1;
        for t in [0.0, 0.8, 2.5] {
            let sigma = sigma_unchecked(&slit, &params, t);
            let x = slit.centroid_at(t) + xi0 * sigma / slit.sigma0;
            let ratio2 = (displacement(&slit, x, t) / sigma).powi(2);
            assert!((ratio2 - (xi0 / slit.sigma0).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_point_energy_average() {
        // integral of P * (m u0^2/2) (xi/sigma)^2 dx = m u0^2 / 2, which
        // equals hbar omega / 2 when omega = hbar / (4 m sigma0^2).
        let hbar = 2.0;
        let mass = 1.0;
        let sigma0 = 0.75;
        let omega = hbar / (4.0 * mass * sigma0 * sigma0);
        let params = PhysicalParams::derive(hbar, mass, omega).unwrap();
        let slit = SlitSpec::new(0.0, sigma0);
        let u = u0(&slit, &params);
        for t in [0.0, 0.6, 1.8] {
            let sigma = sigma_unchecked(&slit, &params, t);
            let avg = trapezoid_fn(-9.0 * sigma, 9.0 * sigma, 6001, |x| {
                let ratio = displacement(&slit, x, t) / sigma;
                density_at(&slit, &params, x, t) * 0.5 * mass * u * u * ratio * ratio
            });
            let zero_point = 0.5 * mass * u * u;
            assert!(((avg - zero_point) / zero_point).abs() < 1e-6);
            assert!((zero_point - 0.5 * hbar * omega).abs() < 1e-12);
        }
    }

    #[test]
    fn dispersion_law_from_quadrature_variance() {
        let (slit, params) = unit_slit();
        let d = params.diffusivity;
        let s0 = slit.sigma0;
        for t in [0.0, s0 * s0 / d, 3.0 * s0 * s0 / d] {
            let sigma = sigma_unchecked(&slit, &params, t);
            let variance = trapezoid_fn(-9.0 * sigma, 9.0 * sigma, 6001, |x| {
                density_at(&slit, &params, x, t) * x * x
            });
            let expect = s0 * s0 + (d / s0).powi(2) * t * t;
            assert!(
                ((variance - expect) / expect).abs() < 1e-3,
                "variance {variance} vs {expect} at t = {t}"
            );
        }
    }

    #[test]
    fn ballistic_diffusion_identity() {
        // Mean-square displacement grows as sigma0^2 + (u0^2 t) * t.
        let (slit, params) = unit_slit();
        let u = u0(&slit, &params);
        for t in [0.5, 1.0, 2.0] {
            let sigma2 = sigma_unchecked(&slit, &params, t).powi(2);
            let d_t = u * u * t;
            assert!((sigma2 - (slit.sigma0.powi(2) + d_t * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_space_norm_is_two_over_h() {
        let params = PhysicalParams::default();
        let slit = SlitSpec::new(0.0, 1.3);
        let h = std::f64::consts::TAU * params.hbar;
        for t in [0.0, 0.4, 2.0] {
            let peak = phase_space_density(&slit, &params, 0.0, 0.0, t);
            assert!((peak - 2.0 / h).abs() < 1e-15);
            assert!(
                (peak - 1.0 / (std::f64::consts::TAU * params.mass * params.diffusivity)).abs()
                    < 1e-15
            );
        }
    }

    #[test]
    fn phase_space_point_symmetry() {
        let params = PhysicalParams::default();
        let slit = SlitSpec::new(0.0, 0.9);
        for (x, p, t) in [(0.4, -0.3, 0.2), (1.1, 0.8, 1.5), (-0.7, 0.05, 3.0)] {
            let a = phase_space_density(&slit, &params, x, p, t);
            let b = phase_space_density(&slit, &params, -x, -p, t);
            assert!((a - b).abs() <= 1e-15 * a);
        }
    }

    #[test]
    fn momentum_marginal_recovers_density() {
        let params = PhysicalParams::default();
        let slit = SlitSpec::new(0.0, 1.0);
        for (x, t) in [(0.0, 0.5), (0.7, 0.8), (-1.3, 1.6), (2.0, 0.1)] {
            let marginal = trapezoid_fn(-30.0, 30.0, 40001, |p| {
                phase_space_density(&slit, &params, x, p, t)
            });
            let direct = density_at(&slit, &params, x, t);
            assert!(
                ((marginal - direct) / direct).abs() < 1e-6,
                "marginal {marginal} vs {direct} at (x={x}, t={t})"
            );
        }
    }

    #[test]
    fn channel_field_invariants() {
        let params = PhysicalParams::default();
        let slit = SlitSpec::new(0.6, 1.0).with_velocity(-0.4);
        let grid = GridSpec {
            x_min: -14.0,
            x_max: 14.0,
            nx: 561,
            t_max: 1.5,
            nt: 30,
        };
        let field = ChannelField::evaluate(&slit, &params, &grid);

        // P == R^2 everywhere.
        for (p, r) in field.p.values().iter().zip(field.r.values()) {
            assert_eq!(*p, r * r);
        }

        // Each time row integrates to unit mass.
        for it in 0..grid.n_times() {
            let mass = trapezoid(field.p.row(it), grid.dx());
            assert!((mass - 1.0).abs() < 1e-6, "row {it}: mass {mass}");
        }

        // Spot-check field values against the point functions.
        let (it, ix) = (17, 233);
        let (x, t) = (grid.x_at(ix), grid.t_at(it));
        assert_eq!(field.p.at(it, ix), density_at(&slit, &params, x, t));
        assert_eq!(field.s.at(it, ix), phase_action(&slit, &params, x, t));
        assert_eq!(field.u.at(it, ix), osmotic_velocity(&slit, &params, x, t));
        assert_eq!(field.v_tot.at(it, ix), total_velocity(&slit, &params, x, t));
        assert_eq!(field.xi.at(it, ix), displacement(&slit, x, t));
    }

    #[test]
    fn far_tail_density_clamps_to_floor() {
        let (slit, params) = unit_slit();
        let p = density_at(&slit, &params, 60.0, 0.0);
        assert_eq!(p, DENSITY_FLOOR);
    }
}
