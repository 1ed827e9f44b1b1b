//! Physical parameters, the reduced coefficient set and the problem data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::modal::FourierBasis;
use crate::thermo::projection::project_spatial;
use crate::{Error, Result};

/// Material constants of the rod and the interval length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParameters {
    pub rho: f64,
    pub bulk: f64,
    pub shear: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub c_rho: f64,
    pub theta0: f64,
    pub l: f64,
}

impl PhysicalParameters {
    /// The parameter set that reduces to `a = 2, b = c = d = 1` on `[0, π]`.
    pub fn unit() -> Self {
        Self {
            rho: 1.0,
            bulk: 1.0,
            shear: 0.75,
            alpha: 1.0,
            kappa: 1.0,
            c_rho: 1.0,
            theta0: 1.0,
            l: PI,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.fields() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositive { field: name.into() });
            }
        }
        Ok(())
    }

    pub fn fields(&self) -> [(&'static str, f64); 8] {
        [
            ("rho", self.rho),
            ("bulk", self.bulk),
            ("shear", self.shear),
            ("alpha", self.alpha),
            ("kappa", self.kappa),
            ("c_rho", self.c_rho),
            ("theta0", self.theta0),
            ("l", self.l),
        ]
    }

    /// Scale applied to the raw source `(r, ·, h)` so the solver sees `(f, ·, g)`.
    pub fn forcing_scale(&self) -> [f64; 3] {
        [1.0, 1.0, 1.0 / (self.rho * self.c_rho)]
    }
}

/// Reduced coefficients of the first-order system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl DerivedCoefficients {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositive { field: name.into() });
            }
        }
        Ok(())
    }

    /// Weights `(1, a, b/d)` of the energy inner product.
    pub fn weights(&self) -> [f64; 3] {
        [1.0, self.a, self.b / self.d]
    }
}

pub fn derive_coefficients(p: &PhysicalParameters) -> Result<DerivedCoefficients> {
    p.validate()?;
    let rc = p.rho * p.c_rho;
    Ok(DerivedCoefficients {
        a: (p.bulk + 4.0 / 3.0 * p.shear) / p.rho,
        b: p.alpha * p.bulk / p.rho,
        c: p.kappa / rc,
        d: p.alpha * p.theta0 * p.bulk / rc,
    })
}

pub type PointFn = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;
pub type FieldFn = Arc<dyn Fn(f64, f64) -> [f64; 3] + Send + Sync>;
pub type ModalFn = Arc<dyn Fn(usize, f64) -> [f64; 3] + Send + Sync>;

/// A spatial profile of the three `V` components: `(∂t u, ∂x u, θ)`.
#[derive(Clone)]
pub enum SpatialData {
    Zero,
    /// Coefficients against the normalized basis, indexed by mode `n ≥ 0`.
    Modal(Vec<[f64; 3]>),
    /// Closed-form evaluator of `x`.
    Evaluator(PointFn),
}

impl SpatialData {
    pub fn evaluator<F: Fn(f64) -> [f64; 3] + Send + Sync + 'static>(f: F) -> Self {
        SpatialData::Evaluator(Arc::new(f))
    }
}

impl fmt::Debug for SpatialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpatialData::Zero => write!(f, "Zero"),
            SpatialData::Modal(c) => f.debug_tuple("Modal").field(c).finish(),
            SpatialData::Evaluator(_) => write!(f, "Evaluator(..)"),
        }
    }
}

/// Time-parameterized data: prehistory on `[−τ, 0]` or forcing on `[0, T]`.
#[derive(Clone)]
pub enum TemporalData {
    /// Constant in time.
    Steady(SpatialData),
    /// Closed-form evaluator of `(x, t)`.
    Field(FieldFn),
    /// Closed-form modal coefficients as a function of `(n, t)`.
    Modal(ModalFn),
    /// Frames on the uniform grid `start + k·step`, linear in `t` between them.
    Sampled {
        start: f64,
        step: f64,
        frames: Vec<SpatialData>,
    },
}

impl TemporalData {
    pub fn zero() -> Self {
        TemporalData::Steady(SpatialData::Zero)
    }

    pub fn field<F: Fn(f64, f64) -> [f64; 3] + Send + Sync + 'static>(f: F) -> Self {
        TemporalData::Field(Arc::new(f))
    }

    pub fn modal<F: Fn(usize, f64) -> [f64; 3] + Send + Sync + 'static>(f: F) -> Self {
        TemporalData::Modal(Arc::new(f))
    }

    /// Spatial profile frozen at time `t` (modal closures are sampled for
    /// modes `0..n_modes`). Sampled data returns the nearest frame, which is
    /// exact at the knots.
    pub fn at(&self, t: f64, n_modes: usize) -> SpatialData {
        match self {
            TemporalData::Steady(s) => s.clone(),
            TemporalData::Field(f) => {
                let f = f.clone();
                SpatialData::Evaluator(Arc::new(move |x| f(x, t)))
            }
            TemporalData::Modal(f) => SpatialData::Modal((0..n_modes).map(|n| f(n, t)).collect()),
            TemporalData::Sampled { start, step, frames } => {
                let (k, w) = sampled_slot(*start, *step, frames.len(), t);
                if w < 0.5 {
                    frames[k].clone()
                } else {
                    frames[(k + 1).min(frames.len() - 1)].clone()
                }
            }
        }
    }
}

/// Interval index and local weight for linear interpolation between frames.
pub(crate) fn sampled_slot(start: f64, step: f64, len: usize, t: f64) -> (usize, f64) {
    if len < 2 {
        return (0, 0.0);
    }
    let pos = ((t - start) / step).clamp(0.0, (len - 1) as f64);
    let k = (pos.floor() as usize).min(len - 2);
    (k, pos - k as f64)
}

impl fmt::Debug for TemporalData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemporalData::Steady(s) => f.debug_tuple("Steady").field(s).finish(),
            TemporalData::Field(_) => write!(f, "Field(..)"),
            TemporalData::Modal(_) => write!(f, "Modal(..)"),
            TemporalData::Sampled { start, step, frames } => f
                .debug_struct("Sampled")
                .field("start", start)
                .field("step", step)
                .field("frames", &frames.len())
                .finish(),
        }
    }
}

pub type InitialData = SpatialData;
pub type PrehistoryData = TemporalData;
pub type ForcingData = TemporalData;

/// Output sampling controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grids {
    pub dt: f64,
    pub dx: f64,
}

impl Grids {
    /// `dt = τ/20` and a 257-point spatial grid.
    pub fn default_for(tau: f64, l: f64) -> Self {
        Self {
            dt: tau / 20.0,
            dx: l / 256.0,
        }
    }

    /// Uniform grid on `[0, l]` whose spacing does not exceed `dx`.
    pub fn x_grid(&self, l: f64) -> Vec<f64> {
        uniform_grid(0.0, l, self.dx)
    }

    /// Uniform grid on `[0, horizon]` whose spacing does not exceed `dt`.
    pub fn t_grid(&self, horizon: f64) -> Vec<f64> {
        uniform_grid(0.0, horizon, self.dt)
    }
}

/// `lo..=hi` split into the fewest equal steps not longer than `h`.
pub fn uniform_grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let steps = (((hi - lo) / h) - 1e-9).ceil().max(1.0) as usize;
    let dt = (hi - lo) / steps as f64;
    (0..=steps)
        .map(|k| if k == steps { hi } else { lo + dt * k as f64 })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub physical: PhysicalParameters,
    pub coeffs: DerivedCoefficients,
    pub tau: f64,
    pub horizon: f64,
    pub n_modes: usize,
    pub initial: InitialData,
    pub prehistory: PrehistoryData,
    pub forcing: ForcingData,
    pub grids: Grids,
}

impl ProblemSpec {
    /// Problem with constant-in-time prehistory equal to the initial data,
    /// zero forcing, and default grids. Not yet validated.
    pub fn new(
        physical: PhysicalParameters,
        tau: f64,
        horizon: f64,
        n_modes: usize,
        initial: InitialData,
    ) -> Result<Self> {
        let coeffs = derive_coefficients(&physical)?;
        Ok(Self {
            physical,
            coeffs,
            tau,
            horizon,
            n_modes,
            prehistory: TemporalData::Steady(initial.clone()),
            initial,
            forcing: TemporalData::zero(),
            grids: Grids::default_for(tau, physical.l),
        })
    }

    pub fn with_prehistory(mut self, p: PrehistoryData) -> Self {
        self.prehistory = p;
        self
    }

    pub fn with_forcing(mut self, f: ForcingData) -> Self {
        self.forcing = f;
        self
    }

    pub fn with_grids(mut self, g: Grids) -> Self {
        self.grids = g;
        self
    }

    pub fn l(&self) -> f64 {
        self.physical.l
    }

    pub fn basis(&self) -> FourierBasis {
        FourierBasis::new(self.physical.l, self.coeffs)
    }
}

/// Compatibility tolerance on the truncated X-norm mismatch.
pub const COMPATIBILITY_TOL: f64 = 1e-12;

/// Checks every invariant of the problem and returns it unchanged.
pub fn validate_problem(spec: ProblemSpec) -> Result<ProblemSpec> {
    spec.physical.validate()?;
    spec.coeffs.validate()?;
    if !(spec.tau > 0.0) || !spec.tau.is_finite() {
        return Err(Error::Domain("tau must be > 0".into()));
    }
    if !(spec.horizon > 0.0) || !spec.horizon.is_finite() {
        return Err(Error::Domain("horizon must be > 0".into()));
    }
    if spec.n_modes < 1 {
        return Err(Error::Domain("n_modes must be >= 1".into()));
    }
    if !(spec.grids.dt > 0.0) || !(spec.grids.dx > 0.0) {
        return Err(Error::Domain("dt and dx must be > 0".into()));
    }
    let l = spec.l();
    check_spatial_traces("initial", &spec.initial, l)?;
    check_temporal("prehistory", &spec.prehistory, l, -spec.tau, 0.0, spec.n_modes)?;
    check_temporal("forcing", &spec.forcing, l, 0.0, spec.horizon, spec.n_modes)?;
    if let TemporalData::Sampled { start, step, frames } = &spec.prehistory {
        let span = *step * (frames.len().saturating_sub(1)) as f64;
        if frames.len() < 2
            || (start + spec.tau).abs() > 1e-12 * spec.tau.max(1.0)
            || (span - spec.tau).abs() > 1e-9 * spec.tau
        {
            return Err(Error::Input(
                "sampled prehistory must cover [-tau, 0] with at least two frames".into(),
            ));
        }
    }

    let basis = spec.basis();
    let init = project_spatial(&spec.initial, &basis, spec.n_modes)?;
    let hist0 = project_spatial(&spec.prehistory.at(0.0, spec.n_modes), &basis, spec.n_modes)?;
    let mut diff_sq = 0.0;
    let mut norm_sq = 0.0;
    for n in 0..spec.n_modes {
        let w = basis.component_weights(n);
        for k in 0..3 {
            diff_sq += w[k] * (init[n][k] - hist0[n][k]).powi(2);
            norm_sq += w[k] * init[n][k].powi(2);
        }
    }
    let mismatch = diff_sq.sqrt();
    if mismatch > COMPATIBILITY_TOL * norm_sq.sqrt().max(1.0) {
        return Err(Error::Compatibility { mismatch });
    }
    Ok(spec)
}

fn check_temporal(
    what: &str,
    data: &TemporalData,
    l: f64,
    t0: f64,
    t1: f64,
    n_modes: usize,
) -> Result<()> {
    match data {
        TemporalData::Steady(s) => check_spatial_traces(what, s, l),
        TemporalData::Sampled { frames, .. } => {
            frames.iter().try_for_each(|s| check_spatial_traces(what, s, l))
        }
        TemporalData::Field(_) | TemporalData::Modal(_) => {
            check_spatial_traces(what, &data.at(t0, n_modes), l)?;
            check_spatial_traces(what, &data.at(t1, n_modes), l)
        }
    }
}

/// Dirichlet trace of component 1 and Neumann trace of component 3 for
/// evaluator-type data. Modal data satisfies both by construction.
fn check_spatial_traces(what: &str, data: &SpatialData, l: f64) -> Result<()> {
    let SpatialData::Evaluator(f) = data else {
        return Ok(());
    };
    let mut max = [0.0f64; 3];
    for i in 0..=64 {
        let v = f(l * i as f64 / 64.0);
        for k in 0..3 {
            if !v[k].is_finite() {
                return Err(Error::Input(format!("{what}: evaluator returned a non-finite value")));
            }
            max[k] = max[k].max(v[k].abs());
        }
    }
    let (v0, vl) = (f(0.0), f(l));
    if v0[0].abs() > 1e-8 * (1.0 + max[0]) || vl[0].abs() > 1e-8 * (1.0 + max[0]) {
        return Err(Error::Input(format!(
            "{what}: component 1 must vanish at x = 0 and x = l"
        )));
    }
    let h = 1e-6 * l;
    let d0 = f(h)[2] - v0[2];
    let dl = vl[2] - f(l - h)[2];
    if d0.abs() > 1e-6 * (1.0 + max[2]) || dl.abs() > 1e-6 * (1.0 + max[2]) {
        return Err(Error::Input(format!(
            "{what}: component 3 must have zero slope at x = 0 and x = l"
        )));
    }
    Ok(())
}
