//! n-slit superposition: total density, total average current with
//! interference and entangling terms, and the emergent velocity field.
//!
//! The n-slit case sums all pairwise interference terms; the quantum
//! reference in [`crate::oracle`] is the arbiter for that generalization
//! and for the sign of the sin-phase current term. Expanding the
//! probability current of the summed wavefunction gives, for the pair
//! (i, j), the interference current
//!
//! ```text
//! sqrt(P_i P_j) [ (v_i + v_j) cos(phi_ij) + (u_j - u_i) sin(phi_ij) ]
//! ```
//!
//! with `u` the osmotic velocity and `phi_ij = (S_i - S_j) / hbar`. The
//! sin term equals the heat-flow form sqrt(P_i P_j) grad(Q_i - Q_j) /
//! (2 omega m) sin(phi_ij) with Q = kT ln P, and is the negative of the
//! amplitude-gradient expression (hbar/m)(R_i grad R_j - R_j grad R_i);
//! [`entangling_current`] exposes both routes.

use crate::channel::{self, ChannelField};
use crate::error::{Error, Result};
use crate::field::{trapezoid, Field};
use crate::model::{GridSpec, PhysicalParams};

/// Velocities are undefined below `EPS_P_FRACTION` times the peak density.
pub const EPS_P_FRACTION: f64 = 1e-12;

/// Per-channel analytic quantities at one space-time point.
#[derive(Clone, Copy)]
struct ChannelPoint {
    weight: f64,
    r: f64,
    p: f64,
    u: f64,
    v: f64,
    /// Local phase theta = S / hbar.
    theta: f64,
}

impl ChannelPoint {
    fn eval(ch: &ChannelField, x: f64, t: f64) -> Self {
        let slit = &ch.slit;
        let params = &ch.params;
        let p = channel::density_at(slit, params, x, t);
        ChannelPoint {
            weight: slit.weight,
            r: p.sqrt(),
            p,
            u: channel::osmotic_velocity(slit, params, x, t),
            v: channel::total_velocity(slit, params, x, t),
            theta: channel::phase_action(slit, params, x, t) / params.hbar,
        }
    }
}

fn check_channels(channels: &[ChannelField]) -> Result<&PhysicalParams> {
    let first = channels.first().ok_or(Error::EmptyChannels)?;
    for ch in &channels[1..] {
        if ch.params != first.params {
            return Err(Error::MismatchedParams);
        }
    }
    Ok(&first.params)
}

/// Relative phase phi_ij = (S_i - S_j) / hbar between two channels,
/// including their phase offsets.
pub fn pairwise_phase(ch_i: &ChannelField, ch_j: &ChannelField, x: f64, t: f64) -> Result<f64> {
    if ch_i.params != ch_j.params {
        return Err(Error::MismatchedParams);
    }
    let params = &ch_i.params;
    let s_i = channel::phase_action(&ch_i.slit, params, x, t);
    let s_j = channel::phase_action(&ch_j.slit, params, x, t);
    Ok((s_i - s_j) / params.hbar)
}

/// Total density before renormalization:
/// P_tot = sum_i w_i^2 P_i + sum_{i<j} 2 w_i w_j sqrt(P_i P_j) cos(phi_ij).
pub fn total_density(channels: &[ChannelField], x: f64, t: f64) -> Result<f64> {
    check_channels(channels)?;
    let pts: Vec<ChannelPoint> = channels.iter().map(|c| ChannelPoint::eval(c, x, t)).collect();
    Ok(density_from_points(&pts))
}

/// Total average current before renormalization. The single-channel case
/// collapses to `w^2 P v_tot` exactly; pairs add the cos interference term
/// and the sin entangling term.
pub fn total_current(channels: &[ChannelField], x: f64, t: f64) -> Result<f64> {
    check_channels(channels)?;
    let pts: Vec<ChannelPoint> = channels.iter().map(|c| ChannelPoint::eval(c, x, t)).collect();
    Ok(current_from_points(&pts))
}

fn density_from_points(pts: &[ChannelPoint]) -> f64 {
    let mut total = 0.0;
    for pt in pts {
        total += pt.weight * pt.weight * pt.p;
    }
    for i in 0..pts.len() {
        let (si, ci) = pts[i].theta.sin_cos();
        for pt_j in &pts[i + 1..] {
            let (sj, cj) = pt_j.theta.sin_cos();
            let cos_phi = ci * cj + si * sj;
            total += 2.0 * pts[i].weight * pt_j.weight * pts[i].r * pt_j.r * cos_phi;
        }
    }
    total
}

fn current_from_points(pts: &[ChannelPoint]) -> f64 {
    let mut total = 0.0;
    for pt in pts {
        total += pt.weight * pt.weight * pt.p * pt.v;
    }
    for i in 0..pts.len() {
        let a = pts[i];
        let (si, ci) = a.theta.sin_cos();
        for j in i + 1..pts.len() {
            let b = pts[j];
            let (sj, cj) = b.theta.sin_cos();
            let cos_phi = ci * cj + si * sj;
            let sin_phi = si * cj - ci * sj;
            let amp = a.weight * b.weight * a.r * b.r;
            total += amp * ((a.v + b.v) * cos_phi + (b.u - a.u) * sin_phi);
        }
    }
    total
}

/// The sin-phase interference current of one channel pair, computed along
/// two algebraic routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglingCurrent {
    /// The term as it enters the total current (sign fixed by the quantum
    /// reference): w_i w_j sqrt(P_i P_j) (u_j - u_i) sin(phi_ij).
    pub value: f64,
    /// Heat-flow route: w_i w_j sqrt(P_i P_j) grad(Q_i - Q_j)/(2 omega m)
    /// * sin(phi_ij), with Q = kT ln P. Equals `value` identically.
    pub heat_flow_form: f64,
    /// Amplitude-gradient route as usually written,
    /// w_i w_j (hbar/m)(R_i grad R_j - R_j grad R_i) sin(phi_ij);
    /// opposite sign, same magnitude.
    pub amplitude_gradient_form: f64,
}

/// Entangling current of a channel pair at one point.
pub fn entangling_current(
    ch_i: &ChannelField,
    ch_j: &ChannelField,
    x: f64,
    t: f64,
) -> Result<EntanglingCurrent> {
    if ch_i.params != ch_j.params {
        return Err(Error::MismatchedParams);
    }
    let params = &ch_i.params;
    let a = ChannelPoint::eval(ch_i, x, t);
    let b = ChannelPoint::eval(ch_j, x, t);
    let sin_phi = (a.theta - b.theta).sin();
    let amp = a.weight * b.weight * a.r * b.r;

    let value = amp * (b.u - a.u) * sin_phi;

    // grad(Q_i - Q_j) = kT (grad P_i / P_i - grad P_j / P_j); dividing by
    // 2 omega m and using kT = hbar omega turns the bracket into u_j - u_i.
    let grad_log_i = -2.0 * params.mass / params.hbar * a.u;
    let grad_log_j = -2.0 * params.mass / params.hbar * b.u;
    let grad_q_diff = params.kt * (grad_log_i - grad_log_j);
    let heat_flow_form = amp * grad_q_diff / (2.0 * params.omega * params.mass) * sin_phi;

    // grad R = -(m/hbar) R u.
    let grad_r_i = -(params.mass / params.hbar) * a.r * a.u;
    let grad_r_j = -(params.mass / params.hbar) * b.r * b.u;
    let amplitude_gradient_form = a.weight
        * b.weight
        * (params.hbar / params.mass)
        * (a.r * grad_r_j - b.r * grad_r_i)
        * sin_phi;

    Ok(EntanglingCurrent {
        value,
        heat_flow_form,
        amplitude_gradient_form,
    })
}

/// Emergent average velocity v_bar = J_tot / P_tot at one point.
///
/// Fails with [`Error::VanishingDensity`] where the density is below
/// `EPS_P_FRACTION` of the analytic peak bound; callers integrating
/// trajectories treat that as hold-position.
pub fn average_velocity(channels: &[ChannelField], x: f64, t: f64) -> Result<f64> {
    check_channels(channels)?;
    let pts: Vec<ChannelPoint> = channels.iter().map(|c| ChannelPoint::eval(c, x, t)).collect();
    let p_tot = density_from_points(&pts);

    // Upper bound on the achievable density at this t:
    // (sum_i w_i max R_i)^2 with max R_i = (sqrt(2 pi) sigma_i(t))^(-1/2).
    let peak_bound: f64 = channels
        .iter()
        .map(|ch| {
            let sigma = channel::sigma_at(&ch.slit, &ch.params, t).unwrap_or(ch.slit.sigma0);
            ch.slit.weight * (1.0 / (SQRT_TAU * sigma)).sqrt()
        })
        .sum::<f64>()
        .powi(2);

    if p_tot <= EPS_P_FRACTION * peak_bound {
        return Err(Error::VanishingDensity { x, t });
    }
    Ok(current_from_points(&pts) / p_tot)
}

const SQRT_TAU: f64 = 2.5066282746310002;

/// Superposed fields on the space-time grid, renormalized once so that the
/// total mass at t = 0 is one (and never again; mass conservation is then
/// a checkable property).
#[derive(Debug, Clone)]
pub struct SuperposedField {
    pub grid: GridSpec,
    pub params: PhysicalParams,
    /// Renormalized total density.
    pub p_tot: Field,
    /// Renormalized total current.
    pub j_tot: Field,
    /// Renormalized entangling current (sum of pairwise sin terms).
    pub j_e: Field,
    /// Emergent velocity J_tot / P_tot; zero where `defined` is false.
    pub v_bar: Field,
    /// False where P_tot <= eps_p and the velocity is undefined.
    pub defined: Vec<bool>,
    /// Density floor actually used: `EPS_P_FRACTION` times the grid peak.
    pub eps_p: f64,
    /// Applied normalization factor 1 / mass(t = 0).
    pub norm: f64,
}

impl SuperposedField {
    /// Evaluates P_tot, J_tot, J_e and v_bar over the grid.
    pub fn evaluate(channels: &[ChannelField], grid: &GridSpec) -> Result<Self> {
        let params = *check_channels(channels)?;
        let nx = grid.nx;
        let n_times = grid.n_times();

        // Packed (P, J, J_e) triples filled row-parallel, then split.
        let mut packed = vec![0.0f64; nx * n_times * 3];
        crate::field::fill_time_rows(&mut packed, nx * 3, |it, row| {
            let t = grid.t_at(it);
            let mut pts = Vec::with_capacity(channels.len());
            for ix in 0..nx {
                let x = grid.x_at(ix);
                pts.clear();
                pts.extend(channels.iter().map(|c| ChannelPoint::eval(c, x, t)));

                let mut p_tot = 0.0;
                let mut j_tot = 0.0;
                let mut j_e = 0.0;
                for pt in &pts {
                    let w2 = pt.weight * pt.weight;
                    p_tot += w2 * pt.p;
                    j_tot += w2 * pt.p * pt.v;
                }
                for i in 0..pts.len() {
                    let a = pts[i];
                    let (si, ci) = a.theta.sin_cos();
                    for j in i + 1..pts.len() {
                        let b = pts[j];
                        let (sj, cj) = b.theta.sin_cos();
                        let cos_phi = ci * cj + si * sj;
                        let sin_phi = si * cj - ci * sj;
                        let amp = a.weight * b.weight * a.r * b.r;
                        p_tot += 2.0 * amp * cos_phi;
                        let sin_term = amp * (b.u - a.u) * sin_phi;
                        j_tot += amp * (a.v + b.v) * cos_phi + sin_term;
                        j_e += sin_term;
                    }
                }
                row[3 * ix] = p_tot;
                row[3 * ix + 1] = j_tot;
                row[3 * ix + 2] = j_e;
            }
        });

        let mut p_tot = Field::zeros(nx, n_times);
        let mut j_tot = Field::zeros(nx, n_times);
        let mut j_e = Field::zeros(nx, n_times);
        for it in 0..n_times {
            for ix in 0..nx {
                let base = (it * nx + ix) * 3;
                p_tot.set(it, ix, packed[base]);
                j_tot.set(it, ix, packed[base + 1]);
                j_e.set(it, ix, packed[base + 2]);
            }
        }
        drop(packed);

        // Renormalize once, at t = 0; the current scales with the density
        // so that v_bar is unaffected.
        let mass0 = trapezoid(p_tot.row(0), grid.dx());
        let norm = 1.0 / mass0;
        p_tot.scale(norm);
        j_tot.scale(norm);
        j_e.scale(norm);

        let eps_p = EPS_P_FRACTION * p_tot.max();
        let mut v_bar = Field::zeros(nx, n_times);
        let mut defined = vec![false; nx * n_times];
        {
            let v_data = v_bar.values_mut();
            crate::field::fill_time_rows(v_data, nx, |it, row| {
                for (ix, v) in row.iter_mut().enumerate() {
                    let p = p_tot.at(it, ix);
                    if p > eps_p {
                        *v = j_tot.at(it, ix) / p;
                    }
                }
            });
            for (k, d) in defined.iter_mut().enumerate() {
                *d = p_tot.values()[k] > eps_p;
            }
        }

        Ok(SuperposedField {
            grid: *grid,
            params,
            p_tot,
            j_tot,
            j_e,
            v_bar,
            defined,
            eps_p,
            norm,
        })
    }

    /// Pairwise relative-phase field phi_ij for channels `i < j`, computed
    /// on demand from the stored action fields.
    pub fn pairwise_phase_field(channels: &[ChannelField], i: usize, j: usize) -> Field {
        let hbar = channels[i].params.hbar;
        let (s_i, s_j) = (&channels[i].s, &channels[j].s);
        Field::from_rows(s_i.nx, s_i.n_times, |it, row| {
            for (ix, v) in row.iter_mut().enumerate() {
                *v = (s_i.at(it, ix) - s_j.at(it, ix)) / hbar;
            }
        })
    }

    /// Total mass at every grid time (trapezoid rule).
    pub fn masses(&self) -> Vec<f64> {
        (0..self.p_tot.n_times)
            .map(|it| trapezoid(self.p_tot.row(it), self.grid.dx()))
            .collect()
    }
}

/// Even-part fraction of a field on a symmetric grid:
/// sum |f(x) + f(-x)| / sum 2 |f(x)|, aggregated over all grid times.
/// Zero for an odd field, one for an even field; zero when the field
/// vanishes identically.
pub fn even_part_fraction(field: &Field) -> f64 {
    let nx = field.nx;
    let mut num = 0.0;
    let mut den = 0.0;
    for it in 0..field.n_times {
        let row = field.row(it);
        for ix in 0..nx {
            num += (row[ix] + row[nx - 1 - ix]).abs();
            den += 2.0 * row[ix].abs();
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}
