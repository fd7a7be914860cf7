//! Ground-state profiles of the stationary equation
//! `-Lap(phi) + (1 - w^2) phi = |phi|^(p-1) phi ln|phi|^2`
//! by two independent routes:
//!
//! * radial shooting with bisection on the central amplitude, and
//! * constrained minimization of the action over the set `K_w = 0`
//!   (Sobolev-gradient descent with re-projection each step).
//!
//! Both return a [`GroundState`] carrying the least-action value
//! `d(w) = J_w(phi_0)` and certification diagnostics; agreement of the two
//! routes is the primary cross-validation of the whole pipeline.

use crate::error::{Error, Result};
use crate::functionals::{
    self, nonlinearity, FunctionalParts, ModelParams, NehariProjection,
};
use crate::radial::{self, RadialField, RadialGrid};

/// How a shot trajectory left the positive decaying regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TrajectoryClass {
    /// Hit `phi = 0` at finite radius (amplitude too large).
    CrossesZero,
    /// Exceeded the amplitude cap, rose above its start, or turned upward
    /// after a positive minimum (amplitude too small: trapped in the well).
    Diverges,
    /// Decayed below the tail threshold with both `|phi|` and `|phi'|` small.
    ConvergedTail,
}

impl TrajectoryClass {
    fn crosses(self) -> bool {
        matches!(self, TrajectoryClass::CrossesZero)
    }
}

impl std::fmt::Display for TrajectoryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TrajectoryClass::CrossesZero => "crosses_zero",
            TrajectoryClass::Diverges => "diverges",
            TrajectoryClass::ConvergedTail => "converged_tail",
        };
        write!(f, "{s}")
    }
}

/// Configuration of the shooting solver.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ShootingConfig {
    /// Initial amplitude bracket for `phi(0)`.
    pub s_lo: f64,
    pub s_hi: f64,
    /// Bisection tolerance on the amplitude.
    pub tol_s: f64,
    /// Amplitude classifying a trajectory as divergent.
    pub blowup_cap: f64,
    /// Tail threshold below which `|phi| + |phi'|` counts as decayed.
    pub tail_threshold: f64,
    /// Grid the converged profile is sampled on.
    pub r_max: f64,
    pub n: usize,
    /// Cap on bisection iterations.
    pub max_iter: usize,
    /// Local error tolerance of the adaptive integrator.
    pub ode_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            s_lo: 1.2,
            s_hi: 30.0,
            tol_s: 1e-12,
            blowup_cap: 1e6,
            tail_threshold: 1e-8,
            r_max: 20.0,
            n: 4000,
            max_iter: 200,
            ode_tol: 1e-10,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s_lo < self.s_hi) {
            return Err(Error::InvalidParameter(format!(
                "shooting bracket requires s_lo < s_hi, got [{}, {}]",
                self.s_lo, self.s_hi
            )));
        }
        if !(self.tol_s > 0.0) {
            return Err(Error::InvalidParameter(
                "bisection tolerance must be positive".into(),
            ));
        }
        RadialGrid::new(self.r_max, self.n).map(|_| ())
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.r_max, self.n)
    }
}

/// Which solver produced a ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Shooting,
    NehariMin,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Shooting => write!(f, "shooting"),
            Method::NehariMin => write!(f, "nehari_min"),
        }
    }
}

/// Converged profile with its action value and certification diagnostics.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub field: RadialField,
    pub params: ModelParams,
    /// Least-action value `d(w) = J_w(phi_0)`.
    pub d_omega: f64,
    /// Constraint value `K_w(phi_0)` (zero for an exact solution).
    pub k_value: f64,
    /// r^2-weighted L^2 norm of the profile-equation residual.
    pub residual_norm: f64,
    /// Central amplitude `phi_0(0)`.
    pub amplitude: f64,
    pub method: Method,
}

/// Certification thresholds for a computed ground state.
#[derive(Debug, Clone, Copy)]
pub struct CertifyTolerances {
    /// `|K_w| <= k_rel * ||phi||_{H1}^2`
    pub k_rel: f64,
    /// `|d - ||grad||^2/3| <= action_rel * d`
    pub action_rel: f64,
    /// `residual_norm <= residual_factor * dr^2 * S`, where `S` is the
    /// combined L^2 size of the equation's three terms (the natural scale
    /// of the truncation error).
    pub residual_factor: f64,
}

impl Default for CertifyTolerances {
    fn default() -> Self {
        Self {
            k_rel: 1e-4,
            action_rel: 1e-4,
            residual_factor: 10.0,
        }
    }
}

impl GroundState {
    /// Check the variational certificates: constraint residual, the
    /// least-action identity `d = ||grad||^2 / 3`, profile positivity and
    /// monotone decay, and the equation residual bound.
    pub fn certify(&self, tol: &CertifyTolerances) -> Result<()> {
        let parts = FunctionalParts::compute(&self.field, &self.params)?;
        let h1 = parts.grad_sq + parts.mass_sq;
        if self.k_value.abs() > tol.k_rel * h1 {
            return Err(Error::CertificationFailure(format!(
                "constraint residual |K| = {:.3e} exceeds {:.1e} * h1_sq = {:.3e}",
                self.k_value.abs(),
                tol.k_rel,
                tol.k_rel * h1
            )));
        }
        let gap = (self.d_omega - parts.grad_sq / 3.0).abs();
        if gap > tol.action_rel * self.d_omega {
            return Err(Error::CertificationFailure(format!(
                "action identity gap {:.3e} exceeds {:.1e} * d = {:.3e}",
                gap,
                tol.action_rel,
                tol.action_rel * self.d_omega
            )));
        }
        // interior positivity; the truncation boundary may carry an exact
        // Dirichlet zero standing in for the decaying tail
        let vals = self.field.values();
        let interior = &vals[..vals.len() - 1];
        if interior.iter().any(|&v| v <= 0.0) || vals[vals.len() - 1] < 0.0 {
            return Err(Error::CertificationFailure(
                "profile is not positive on the domain interior".into(),
            ));
        }
        // monotone decay up to noise far below the profile scale (the far
        // tail of the minimization route carries interpolation wiggles at
        // the 1e-12 level)
        let slack = 1e-10 * self.amplitude.abs();
        if vals.windows(2).any(|w| w[1] > w[0] + slack) {
            return Err(Error::CertificationFailure(
                "profile is not monotonically decreasing".into(),
            ));
        }
        let dr = self.field.grid().dr();
        let scale = self.equation_term_scale()?;
        let res_bound = tol.residual_factor * dr * dr * scale;
        if self.residual_norm > res_bound {
            return Err(Error::CertificationFailure(format!(
                "equation residual {:.3e} exceeds {:.1e} * dr^2 * {:.3e} = {:.3e}",
                self.residual_norm, tol.residual_factor, scale, res_bound
            )));
        }
        Ok(())
    }

    /// Combined L^2 size of the three terms of the profile equation;
    /// the truncation error of the residual is measured against it.
    pub fn equation_term_scale(&self) -> Result<f64> {
        let lap = self.field.laplacian();
        let lap_norm = radial::l2_norm_sq(&lap)?.sqrt();
        let mass_norm = self.params.mass_coeff() * radial::l2_norm_sq(&self.field)?.sqrt();
        let f_norm = radial::l2_norm_sq(
            &self
                .field
                .map(|v| functionals::nonlinearity(v, &self.params)),
        )?
        .sqrt();
        Ok(lap_norm + mass_norm + f_norm)
    }

    pub fn h1_norm_sq(&self) -> Result<f64> {
        radial::h1_norm_sq(&self.field)
    }

    pub fn grad_l2_norm_sq(&self) -> Result<f64> {
        radial::grad_l2_norm_sq(&self.field)
    }
}

// ---------------------------------------------------------------------------
// adaptive Dormand-Prince 5(4) integration of the profile equation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct ShotState {
    phi: f64,
    dphi: f64,
}

fn rhs(r: f64, y: ShotState, params: &ModelParams) -> ShotState {
    ShotState {
        phi: y.dphi,
        dphi: params.mass_coeff() * y.phi - nonlinearity(y.phi, params) - 2.0 * y.dphi / r,
    }
}

fn axpy(y: ShotState, h: f64, k: &[ShotState], w: &[f64]) -> ShotState {
    let mut phi = y.phi;
    let mut dphi = y.dphi;
    for (ki, wi) in k.iter().zip(w) {
        phi += h * wi * ki.phi;
        dphi += h * wi * ki.dphi;
    }
    ShotState { phi, dphi }
}

/// One adaptive Dormand-Prince step from `r`, capped at `h`; returns
/// `(accepted state, step used, proposed next step)`.
fn dp_step(
    r: f64,
    y: ShotState,
    mut h: f64,
    params: &ModelParams,
    tol: f64,
) -> Result<(ShotState, f64, f64)> {
    const A2: [f64; 1] = [1.0 / 5.0];
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
    const A5: [f64; 4] = [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
    ];
    const A6: [f64; 5] = [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ];
    const B5: [f64; 6] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

    for _ in 0..60 {
        let k1 = rhs(r, y, params);
        let k2 = rhs(r + C[0] * h, axpy(y, h, &[k1], &A2), params);
        let k3 = rhs(r + C[1] * h, axpy(y, h, &[k1, k2], &A3), params);
        let k4 = rhs(r + C[2] * h, axpy(y, h, &[k1, k2, k3], &A4), params);
        let k5 = rhs(r + C[3] * h, axpy(y, h, &[k1, k2, k3, k4], &A5), params);
        let k6 = rhs(r + C[4] * h, axpy(y, h, &[k1, k2, k3, k4, k5], &A6), params);
        let y5 = axpy(y, h, &[k1, k2, k3, k4, k5, k6], &B5);
        let k7 = rhs(r + h, y5, params);
        let y4 = axpy(y, h, &[k1, k2, k3, k4, k5, k6, k7], &B4);

        let scale_p = tol * (1.0 + y.phi.abs().max(y5.phi.abs()));
        let scale_d = tol * (1.0 + y.dphi.abs().max(y5.dphi.abs()));
        let err = (((y5.phi - y4.phi) / scale_p).powi(2)
            + ((y5.dphi - y4.dphi) / scale_d).powi(2))
        .sqrt()
            / std::f64::consts::SQRT_2;

        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        let factor = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        if err <= 1.0 {
            return Ok((y5, h, h * factor));
        }
        h *= factor;
        if h < 1e-14 {
            return Err(Error::SolverFailure(format!(
                "integrator step collapsed near r = {r:.6}"
            )));
        }
    }
    Err(Error::SolverFailure(format!(
        "integrator failed to find an acceptable step near r = {r:.6}"
    )))
}

struct ShotOutcome {
    class: TrajectoryClass,
    /// `(phi, dphi)` at the grid nodes up to and including the event,
    /// when node recording was requested.
    nodes: Vec<ShotState>,
}

/// Integrate the profile equation from `phi(0) = s`, `phi'(0) = 0` and
/// classify the trajectory. `record` asks for node samples along the way.
fn shoot(s: f64, params: &ModelParams, cfg: &ShootingConfig, record: bool) -> Result<ShotOutcome> {
    let grid = cfg.grid()?;
    let dr = grid.dr();
    let n = grid.intervals();
    let mut nodes = Vec::new();
    if record {
        nodes.reserve(n + 1);
        nodes.push(ShotState { phi: s, dphi: 0.0 });
    }
    if s.abs() >= cfg.blowup_cap {
        return Ok(ShotOutcome {
            class: TrajectoryClass::Diverges,
            nodes,
        });
    }

    // series start off the coordinate singularity:
    // phi(h) = s + rhs0 h^2 / 6, phi'(h) = rhs0 h / 3
    let rhs0 = params.mass_coeff() * s - nonlinearity(s, params);
    let h_start = dr / 8.0;
    let mut r = h_start;
    let mut y = ShotState {
        phi: s + rhs0 * h_start * h_start / 6.0,
        dphi: rhs0 * h_start / 3.0,
    };
    let mut h = h_start;
    let mut seen_descent = false;
    let rise_cap = s + cfg.tail_threshold.max(1e-12 * s.abs());

    for i in 1..=n {
        let target = grid.node(i);
        while r < target {
            let hmax = (target - r).min(dr);
            let (y_new, h_used, h_next) = dp_step(r, y, h.min(hmax), params, cfg.ode_tol)?;
            r += h_used;
            y = y_new;
            h = h_next.min(dr);

            if y.dphi < 0.0 {
                seen_descent = true;
            }
            let event = if y.phi <= 0.0 {
                Some(TrajectoryClass::CrossesZero)
            } else if y.phi.abs() >= cfg.blowup_cap
                || y.phi > rise_cap
                || (seen_descent && y.dphi > 0.0 && y.phi > cfg.tail_threshold)
            {
                Some(TrajectoryClass::Diverges)
            } else if y.phi.abs() + y.dphi.abs() < cfg.tail_threshold {
                Some(TrajectoryClass::ConvergedTail)
            } else {
                None
            };
            if let Some(class) = event {
                if record && r >= target {
                    nodes.push(y);
                }
                return Ok(ShotOutcome {
                    class,
                    nodes,
                });
            }
        }
        if record {
            nodes.push(y);
        }
    }

    // still positive and decaying at R: converged for classification
    // purposes as long as it has dropped well below the launch amplitude
    // (slowly decaying tails at small 1 - w^2 arrive above any absolute
    // threshold)
    if y.phi > 0.0 && y.dphi < 0.0 && y.phi.abs() + y.dphi.abs() <= 1e-3 * s {
        Ok(ShotOutcome {
            class: TrajectoryClass::ConvergedTail,
            nodes,
        })
    } else {
        Err(Error::SolverFailure(format!(
            "trajectory not classified within R = {} (phi = {:.3e}, phi' = {:.3e}); increase R",
            grid.r_max(),
            y.phi,
            y.dphi
        )))
    }
}

/// Classify the trajectory launched from amplitude `s`.
pub fn shoot_classify(s: f64, params: &ModelParams, cfg: &ShootingConfig) -> Result<TrajectoryClass> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "shooting amplitude must be positive, got {s}"
        )));
    }
    Ok(shoot(s, params, cfg, false)?.class)
}

/// Compute the ground state by bisection on the central amplitude.
///
/// The bracket endpoints must classify to opposite sides of the crossing
/// threshold. After bisection the trajectory is sampled on the grid and the
/// tail beyond its most-decayed point is replaced by the exponential decay
/// `C e^(-kappa r) / r`, `kappa = sqrt(1 - w^2)`.
pub fn find_ground_state(params: &ModelParams, cfg: &ShootingConfig) -> Result<GroundState> {
    cfg.validate()?;
    let lo_class = shoot_classify(cfg.s_lo, params, cfg)?;
    let hi_class = shoot_classify(cfg.s_hi, params, cfg)?;
    if lo_class.crosses() == hi_class.crosses() {
        return Err(Error::BracketInvalid {
            s_lo: cfg.s_lo,
            s_hi: cfg.s_hi,
            lo_class: lo_class.to_string(),
            hi_class: hi_class.to_string(),
        });
    }

    let (mut lo, mut hi) = (cfg.s_lo, cfg.s_hi);
    let lo_crosses = lo_class.crosses();
    let mut iterations = 0;
    while hi - lo > cfg.tol_s * lo.abs().max(1.0) {
        iterations += 1;
        if iterations > cfg.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                context: format!("amplitude bracket still [{lo:.15e}, {hi:.15e}]"),
            });
        }
        let mid = 0.5 * (lo + hi);
        let mid_class = shoot_classify(mid, params, cfg)?;
        if mid_class.crosses() == lo_crosses {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_star = 0.5 * (lo + hi);

    let outcome = shoot(s_star, params, cfg, true)?;
    let grid = cfg.grid()?;
    let kappa = params.mass_coeff().sqrt();

    // most-decayed recorded node anchors the exponential tail
    let mut i_fit = outcome.nodes.len() - 1;
    let mut best = f64::INFINITY;
    for (i, st) in outcome.nodes.iter().enumerate() {
        if grid.node(i) < 1.0 {
            continue;
        }
        let m = st.phi.abs() + st.dphi.abs();
        if st.phi > 0.0 && m < best {
            best = m;
            i_fit = i;
        }
    }
    let r_fit = grid.node(i_fit);
    let phi_fit = outcome.nodes[i_fit].phi;
    if !(phi_fit > 0.0) {
        return Err(Error::SolverFailure(
            "no positive anchor for the decay tail".into(),
        ));
    }
    let c_tail = phi_fit * r_fit * (kappa * r_fit).exp();

    let mut values = vec![0.0; grid.len()];
    for i in 0..grid.len() {
        values[i] = if i <= i_fit {
            outcome.nodes[i].phi
        } else {
            let r = grid.node(i);
            c_tail * (-kappa * r).exp() / r
        };
    }
    let field = RadialField::new(grid, values)?;

    let parts = FunctionalParts::compute(&field, params)?;
    Ok(GroundState {
        d_omega: parts.action(params),
        k_value: parts.constraint(params),
        residual_norm: functionals::residual_norm(&field, params)?,
        amplitude: s_star,
        field,
        params: *params,
        method: Method::Shooting,
    })
}

// ---------------------------------------------------------------------------
// constrained minimization over the dilation-projected constraint set
// ---------------------------------------------------------------------------

/// Solve `(I - Lap) h = g` on the radial grid (ghost symmetry at the origin,
/// Dirichlet at `R`) by the Thomas algorithm. This is the Sobolev
/// preconditioner turning the L^2 action gradient into an H^1 one.
fn sobolev_solve(g: &RadialField) -> RadialField {
    let grid = g.grid();
    let n = grid.intervals();
    let dr = grid.dr();
    let dr2 = dr * dr;
    let m = n + 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs: Vec<f64> = g.values().to_vec();

    diag[0] = 1.0 + 6.0 / dr2;
    upper[0] = -6.0 / dr2;
    for i in 1..n {
        let r = grid.node(i);
        lower[i] = -1.0 / dr2 + 1.0 / (r * dr);
        diag[i] = 1.0 + 2.0 / dr2;
        upper[i] = -1.0 / dr2 - 1.0 / (r * dr);
    }
    diag[n] = 1.0;
    lower[n] = 0.0;
    rhs[n] = 0.0;

    for i in 1..m {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut h = vec![0.0; m];
    h[m - 1] = rhs[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        h[i] = (rhs[i] - upper[i] * h[i + 1]) / diag[i];
    }
    RadialField::new(grid, h).expect("same grid")
}

/// Minimize the action over the constraint set by projected descent.
///
/// Each step moves the iterate along the preconditioned negative gradient of
/// the free action and re-projects the trial onto `K_w = 0` by dilation;
/// the objective on the constraint set equals `||grad||^2 / 3`.
pub fn minimize_nehari(
    params: &ModelParams,
    grid: RadialGrid,
    seed: &RadialField,
) -> Result<GroundState> {
    if seed.is_zero() {
        return Err(Error::ZeroField {
            op: "minimize_nehari",
        });
    }
    if seed.grid() != grid {
        return Err(Error::GridMismatch);
    }
    const MAX_ITER: usize = 600;
    const STALL_LIMIT: usize = 3;
    const RELATIVE_DECREASE: f64 = 1e-12;

    let project = |u: &RadialField| -> Result<NehariProjection> {
        functionals::project_to_nehari(u, params)
    };

    let mut proj = project(seed)?;
    let mut action = functionals::eval_action(&proj.field, params)?;
    let mut alpha = 0.5;
    let mut stalls = 0;

    for _iter in 0..MAX_ITER {
        let grad = functionals::ode_residual(&proj.field, params)?;
        let precond = sobolev_solve(&grad);
        let slope = radial::integrate_volume(
            &RadialField::new(
                grid,
                grad.values()
                    .iter()
                    .zip(precond.values())
                    .map(|(a, b)| a * b)
                    .collect(),
            )?,
        )?;

        let mut accepted = false;
        let mut alpha_try = alpha;
        for _ in 0..40 {
            let trial = RadialField::new(
                grid,
                proj.field
                    .values()
                    .iter()
                    .zip(precond.values())
                    .map(|(u, h)| u - alpha_try * h)
                    .collect(),
            )?;
            match project(&trial) {
                Ok(p_new) => {
                    let a_new = functionals::eval_action(&p_new.field, params)?;
                    if a_new <= action - 1e-4 * alpha_try * slope.max(0.0) {
                        let decrease = (action - a_new) / action.abs().max(1e-300);
                        proj = p_new;
                        action = a_new;
                        accepted = true;
                        alpha = (alpha_try * 1.3).min(4.0);
                        if decrease < RELATIVE_DECREASE {
                            stalls += 1;
                        } else {
                            stalls = 0;
                        }
                        break;
                    }
                }
                Err(Error::NotProjectable { .. }) => {}
                Err(e) => return Err(e),
            }
            alpha_try *= 0.5;
        }
        if !accepted {
            stalls += 1;
            alpha *= 0.5;
            if alpha < 1e-14 {
                return Err(Error::NoConvergence {
                    iterations: _iter,
                    context: format!("line search stalled at action {action:.12e}"),
                });
            }
        }
        if stalls >= STALL_LIMIT {
            break;
        }
    }

    let parts = FunctionalParts::compute(&proj.field, params)?;
    let amplitude = proj.field.values()[0];
    Ok(GroundState {
        d_omega: parts.action(params),
        k_value: parts.constraint(params),
        residual_norm: functionals::residual_norm(&proj.field, params)?,
        amplitude,
        field: proj.field,
        params: *params,
        method: Method::NehariMin,
    })
}

// ---------------------------------------------------------------------------
// equivalence of the two variational problems
// ---------------------------------------------------------------------------

/// One trial field of the equivalence sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrialProjection {
    pub amplitude: f64,
    pub width: f64,
    /// `(beta, ||grad psi||^2 / 3)` when projectable.
    pub projected: Option<(f64, f64)>,
}

/// Outcome of checking `d(w) = inf { ||grad||^2/3 : K_w <= 0 }` against a
/// projected trial family.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EquivalenceReport {
    pub d_certified: f64,
    pub trials: Vec<TrialProjection>,
    pub skipped: usize,
    pub min_projected: f64,
    /// `(min_projected - d) / d`; nonnegative up to tolerance when the
    /// certified state is the true minimizer.
    pub relative_gap: f64,
    /// Gap of the certified state itself, `|d - ||grad phi_0||^2/3| / d`.
    pub attainment_gap: f64,
}

/// Default Gaussian trial amplitudes and widths for [`verify_equivalence`].
pub const TRIAL_AMPLITUDES: [f64; 5] = [1.5, 2.0, 2.5, 3.0, 3.5];
pub const TRIAL_WIDTHS: [f64; 5] = [0.8, 1.0, 1.3, 1.7, 2.2];

/// Project a Gaussian trial family onto the constraint set and compare
/// `||grad||^2 / 3` of every projected trial against the certified minimum.
pub fn verify_equivalence(params: &ModelParams, gs: &GroundState) -> Result<EquivalenceReport> {
    let grid = gs.field.grid();
    let mut trials = Vec::new();
    let mut skipped = 0;
    let mut min_projected = f64::INFINITY;
    for &c in &TRIAL_AMPLITUDES {
        for &sigma in &TRIAL_WIDTHS {
            let trial = RadialField::from_fn(grid, |r| c * (-r * r / (2.0 * sigma * sigma)).exp());
            match functionals::project_to_nehari(&trial, params) {
                Ok(p) => {
                    let dtilde = radial::grad_l2_norm_sq(&p.field)? / 3.0;
                    min_projected = min_projected.min(dtilde);
                    trials.push(TrialProjection {
                        amplitude: c,
                        width: sigma,
                        projected: Some((p.beta, dtilde)),
                    });
                }
                Err(Error::NotProjectable { .. }) => {
                    skipped += 1;
                    trials.push(TrialProjection {
                        amplitude: c,
                        width: sigma,
                        projected: None,
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }
    let d = gs.d_omega;
    let attainment_gap = (d - gs.grad_l2_norm_sq()? / 3.0).abs() / d;
    Ok(EquivalenceReport {
        d_certified: d,
        trials,
        skipped,
        min_projected,
        relative_gap: (min_projected - d) / d,
        attainment_gap,
    })
}
