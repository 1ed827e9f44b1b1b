//! Projection of problem data onto the normalized basis.

use std::sync::Arc;

use crate::delay_ode::Signal;
use crate::linalg::CVec;
use crate::modal::FourierBasis;
use crate::model::{sampled_slot, ProblemSpec, SpatialData, TemporalData};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result, C64};

/// Panels of the composite 16-point rule on `[0, l]` (512 nodes).
pub const PROJECTION_PANELS: usize = 32;

/// Per-mode coefficients of the initial value, prehistory and forcing.
#[derive(Debug, Clone)]
pub struct ModalData {
    pub initial: Vec<[f64; 3]>,
    pub prehistory: Vec<Signal>,
    pub forcing: Vec<Signal>,
}

impl ModalData {
    pub fn n_modes(&self) -> usize {
        self.initial.len()
    }

    pub fn initial_vec(&self, n: usize) -> CVec {
        to_cvec(self.initial[n])
    }
}

pub(crate) fn to_cvec(v: [f64; 3]) -> CVec {
    CVec::from_iterator(3, v.iter().map(|&x| C64::new(x, 0.0)))
}

/// Basis components tabulated on the quadrature nodes.
struct Projector {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `table[n][k][i]`: component `k` of `Φ_n` at node `i`.
    table: Vec<[Vec<f64>; 3]>,
    norm_sq: Vec<[f64; 3]>,
}

impl Projector {
    fn new(basis: &FourierBasis, n_modes: usize) -> Self {
        let rule = GaussLegendre::order16();
        let l = basis.l();
        let mut nodes = Vec::with_capacity(PROJECTION_PANELS * rule.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        let width = l / PROJECTION_PANELS as f64;
        for p in 0..PROJECTION_PANELS {
            let a = p as f64 * width;
            for (x, w) in rule.mapped(a, a + width) {
                nodes.push(x);
                weights.push(w);
            }
        }
        let table = (0..n_modes)
            .map(|n| {
                let vals: Vec<[f64; 3]> = nodes.iter().map(|&x| basis.eval_unchecked(n, x)).collect();
                std::array::from_fn(|k| vals.iter().map(|v| v[k]).collect())
            })
            .collect();
        let norm_sq = (0..n_modes)
            .map(|n| {
                let s = basis.normalization(n);
                std::array::from_fn(|k| s[k] * s[k] * basis.trig_norm_sq(n, k))
            })
            .collect();
        Self {
            nodes,
            weights,
            table,
            norm_sq,
        }
    }

    fn project(&self, data: &SpatialData, basis: &FourierBasis) -> Result<Vec<[f64; 3]>> {
        let n_modes = self.table.len();
        match data {
            SpatialData::Zero => Ok(vec![[0.0; 3]; n_modes]),
            SpatialData::Modal(c) => Ok((0..n_modes)
                .map(|n| {
                    let mut v = c.get(n).copied().unwrap_or([0.0; 3]);
                    if n == 0 {
                        v[0] = 0.0;
                    }
                    v
                })
                .collect()),
            SpatialData::Evaluator(f) => {
                let samples: Vec<[f64; 3]> = self.nodes.iter().map(|&x| f(x)).collect();
                if samples.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::Numeric("data evaluator returned a non-finite value".into()));
                }
                check_resolution(f.as_ref(), &samples, &self.weights, basis.l())?;
                Ok((0..n_modes)
                    .map(|n| {
                        std::array::from_fn(|k| {
                            if self.norm_sq[n][k] == 0.0 {
                                return 0.0;
                            }
                            let dot: f64 = samples
                                .iter()
                                .zip(&self.table[n][k])
                                .zip(&self.weights)
                                .map(|((v, phi), w)| v[k] * phi * w)
                                .sum();
                            dot / self.norm_sq[n][k]
                        })
                    })
                    .collect())
            }
        }
    }
}

/// Compares the 512-node integral of each component against a 256-node one.
fn check_resolution(
    f: &(dyn Fn(f64) -> [f64; 3] + Send + Sync),
    samples: &[[f64; 3]],
    weights: &[f64],
    l: f64,
) -> Result<()> {
    let rule = GaussLegendre::order16();
    for k in 0..3 {
        let fine: f64 = samples.iter().zip(weights).map(|(v, w)| v[k] * w).sum();
        let abs: f64 = samples.iter().zip(weights).map(|(v, w)| v[k].abs() * w).sum();
        let coarse = rule.integrate_composite(0.0, l, PROJECTION_PANELS / 2, |x| f(x)[k]);
        let gap = (fine - coarse).abs();
        if gap > 1e-9 * (abs + f64::MIN_POSITIVE) && gap > 1e-14 {
            return Err(Error::Quadrature {
                estimate: gap / abs.max(f64::MIN_POSITIVE),
            });
        }
    }
    Ok(())
}

/// Coefficients `⟨V^k, Φ_n^k⟩ / ‖Φ_n^k‖²` for modes `0..n_modes`. Modal data
/// is passed through; evaluators are integrated with the 512-node rule.
pub fn project_spatial(
    data: &SpatialData,
    basis: &FourierBasis,
    n_modes: usize,
) -> Result<Vec<[f64; 3]>> {
    Projector::new(basis, n_modes).project(data, basis)
}

/// Projects every data item of the problem. Forcing component 3 is divided
/// by `ρ c_ρ`.
pub fn project_data(spec: &ProblemSpec) -> Result<ModalData> {
    let basis = spec.basis();
    let n_modes = spec.n_modes;
    let projector = Projector::new(&basis, n_modes);
    let initial = projector.project(&spec.initial, &basis)?;
    let step = spec.grids.dt.min(spec.tau / 20.0);
    let prehistory = project_temporal(
        &spec.prehistory,
        &projector,
        &basis,
        (-spec.tau, 0.0),
        step,
        [1.0; 3],
    )?;
    let forcing = project_temporal(
        &spec.forcing,
        &projector,
        &basis,
        (0.0, spec.horizon),
        step,
        spec.physical.forcing_scale(),
    )?;
    Ok(ModalData {
        initial,
        prehistory,
        forcing,
    })
}

fn scaled(v: [f64; 3], scale: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|k| v[k] * scale[k])
}

fn project_temporal(
    data: &TemporalData,
    projector: &Projector,
    basis: &FourierBasis,
    span: (f64, f64),
    step: f64,
    scale: [f64; 3],
) -> Result<Vec<Signal>> {
    let n_modes = projector.table.len();
    match data {
        TemporalData::Steady(s) => {
            if matches!(s, SpatialData::Zero) {
                return Ok(vec![Signal::Zero; n_modes]);
            }
            Ok(projector
                .project(s, basis)?
                .into_iter()
                .map(|v| {
                    let v = scaled(v, scale);
                    if v == [0.0; 3] {
                        Signal::Zero
                    } else {
                        Signal::Constant(to_cvec(v))
                    }
                })
                .collect())
        }
        TemporalData::Modal(f) => Ok((0..n_modes)
            .map(|n| {
                let f = f.clone();
                Signal::function(move |t| {
                    let mut v = scaled(f(n, t), scale);
                    if n == 0 {
                        v[0] = 0.0;
                    }
                    to_cvec(v)
                })
            })
            .collect()),
        TemporalData::Field(f) => {
            let times = crate::model::uniform_grid(span.0, span.1, step);
            let frames = times
                .iter()
                .map(|&t| {
                    let f = f.clone();
                    let profile = SpatialData::Evaluator(Arc::new(move |x| f(x, t)));
                    projector.project(&profile, basis)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(tabulated_signals(times, frames, scale, Interpolation::Cubic))
        }
        TemporalData::Sampled { start, step, frames } => {
            let times: Vec<f64> = (0..frames.len()).map(|k| start + *step * k as f64).collect();
            let frames = frames
                .iter()
                .map(|s| projector.project(s, basis))
                .collect::<Result<Vec<_>>>()?;
            Ok(tabulated_signals(times, frames, scale, Interpolation::Linear))
        }
    }
}

#[derive(Clone, Copy)]
enum Interpolation {
    Linear,
    Cubic,
}

/// One signal per mode interpolating the per-frame coefficients in `t`.
fn tabulated_signals(
    times: Vec<f64>,
    frames: Vec<Vec<[f64; 3]>>,
    scale: [f64; 3],
    kind: Interpolation,
) -> Vec<Signal> {
    let n_modes = frames.first().map_or(0, Vec::len);
    let times = Arc::new(times);
    (0..n_modes)
        .map(|n| {
            let values: Vec<[f64; 3]> = frames.iter().map(|fr| scaled(fr[n], scale)).collect();
            if values.iter().all(|v| *v == [0.0; 3]) {
                return Signal::Zero;
            }
            let times = times.clone();
            let knots = times.to_vec();
            let f = move |t: f64| to_cvec(interpolate(&times, &values, t, kind));
            Signal::Function {
                f: Arc::new(f),
                knots,
            }
        })
        .collect()
}

fn interpolate(times: &[f64], values: &[[f64; 3]], t: f64, kind: Interpolation) -> [f64; 3] {
    let len = times.len();
    if len == 1 {
        return values[0];
    }
    let step = times[1] - times[0];
    let (k, w) = sampled_slot(times[0], step, len, t);
    match kind {
        Interpolation::Linear => {
            std::array::from_fn(|c| values[k][c] * (1.0 - w) + values[k + 1][c] * w)
        }
        Interpolation::Cubic if len >= 4 => {
            // Lagrange cubic through four consecutive frames around the slot.
            let first = k.saturating_sub(1).min(len - 4);
            let x = (t - times[first]) / step;
            let mut out = [0.0; 3];
            for i in 0..4 {
                let mut basis = 1.0;
                for j in 0..4 {
                    if i != j {
                        basis *= (x - j as f64) / (i as f64 - j as f64);
                    }
                }
                for c in 0..3 {
                    out[c] += basis * values[first + i][c];
                }
            }
            out
        }
        Interpolation::Cubic => interpolate(times, values, t, Interpolation::Linear),
    }
}

/// `V(x) = Σ_n c_n Φ_n(x)` for modal data, the evaluator itself otherwise.
pub fn evaluate_spatial(data: &SpatialData, basis: &FourierBasis, x: f64) -> [f64; 3] {
    match data {
        SpatialData::Zero => [0.0; 3],
        SpatialData::Evaluator(f) => f(x),
        SpatialData::Modal(c) => {
            let mut out = [0.0; 3];
            for (n, coef) in c.iter().enumerate() {
                let phi = basis.eval_unchecked(n, x);
                for k in 0..3 {
                    out[k] += coef[k] * phi[k];
                }
            }
            out
        }
    }
}
