use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::Table;

use super::{fuller_control, Control, FullerSynthesis};

const BALL_SAMPLES: usize = 64;
const NEWTON_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedBall,
    TimeBudget,
}

/// Piecewise-exact closed-loop trajectory.
///
/// `times`, `states` and `costs` hold arc endpoints; `controls[i]` acts on
/// `[times[i], times[i + 1]]`. Interior endpoints are switches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullerTrajectory {
    pub synthesis: FullerSynthesis,
    pub times: Vec<f64>,
    pub states: Vec<(f64, f64)>,
    pub controls: Vec<f64>,
    /// Cumulative `∫ x² dt` at each endpoint.
    pub costs: Vec<f64>,
    pub switch_times: Vec<f64>,
    pub cost: f64,
    pub termination: Termination,
}

/// Mean and relative spread of successive switch-interval ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchRatio {
    pub mean: f64,
    /// `max |ρ_k - mean| / mean`.
    pub dispersion: f64,
}

/// State after time `t` on an arc with constant control `u`.
pub(crate) fn arc_state(x: f64, y: f64, u: f64, t: f64) -> (f64, f64) {
    (x + y * t + 0.5 * u * t * t, y + u * t)
}

/// `∫_0^T (x + y t + u t²/2)² dt`.
pub(crate) fn arc_cost(x: f64, y: f64, u: f64, t: f64) -> f64 {
    let (a, b, c) = (x, y, 0.5 * u);
    let t2 = t * t;
    let t3 = t2 * t;
    a * a * t + a * b * t2 + (b * b + 2.0 * a * c) * t3 / 3.0 + b * c * t2 * t2 / 2.0 + c * c * t3 * t2 / 5.0
}

/// Smallest root of `a t² + b t + k` in `(lo, hi]`.
fn first_root(a: f64, b: f64, k: f64, lo: f64, hi: f64) -> Option<f64> {
    let mut roots = [f64::NAN; 2];
    if a == 0.0 {
        if b != 0.0 {
            roots[0] = -k / b;
        }
    } else {
        let disc = b * b - 4.0 * a * k;
        if disc < 0.0 {
            return None;
        }
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q != 0.0 {
            roots = [q / a, k / q];
        } else {
            roots = [0.0, 0.0];
        }
    }
    roots.into_iter().filter(|&t| t > lo && t <= hi).min_by(f64::total_cmp)
}

/// Time to the next crossing of the switching curve along the arc from
/// `(x, y)` with control `u`. With `at_switch` the start lies on the curve
/// and the trivial root at zero is removed exactly.
fn next_switch(syn: &FullerSynthesis, x: f64, y: f64, u: f64, at_switch: bool) -> Option<f64> {
    let c = syn.switch_coefficient;
    // Pieces on which sign(y) is fixed.
    let mut pieces = Vec::with_capacity(2);
    if y * u < 0.0 {
        let ty = -y / u;
        pieces.push((0.0, ty, y.signum()));
        pieces.push((ty, f64::INFINITY, u.signum()));
    } else {
        pieces.push((0.0, f64::INFINITY, if y != 0.0 { y.signum() } else { u.signum() }));
    }
    for (idx, &(lo, hi, sg)) in pieces.iter().enumerate() {
        // S(t) = a t² + b t + k with |y| replaced by sg·y on this piece.
        let a = 0.5 * u + c * sg * u * u;
        let b = y + 2.0 * c * sg * y * u;
        let k = x + c * sg * y * y;
        let root = if idx == 0 && at_switch {
            if a != 0.0 && -b / a > lo && -b / a <= hi {
                Some(-b / a)
            } else {
                None
            }
        } else {
            first_root(a, b, k, lo, hi)
        };
        if let Some(mut t) = root {
            for _ in 0..NEWTON_STEPS {
                let d = 2.0 * a * t + b;
                if d == 0.0 {
                    break;
                }
                let step = (a * t * t + b * t + k) / d;
                let next = t - step;
                if !(next > lo && next <= hi) || (idx == 0 && at_switch && next.abs() < 0.5 * t) {
                    break;
                }
                t = next;
                if step.abs() <= syn.event_tol * t.max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            return Some(t);
        }
    }
    None
}

/// First time in `(0, horizon]` at which the arc enters the closed ball of
/// radius `stop`.
fn ball_entry(x: f64, y: f64, u: f64, stop: f64, horizon: f64, tol: f64) -> Option<f64> {
    let inside = |t: f64| {
        let (a, b) = arc_state(x, y, u, t);
        a.hypot(b) <= stop
    };
    let mut prev = 0.0;
    for i in 1..=BALL_SAMPLES {
        let t = horizon * i as f64 / BALL_SAMPLES as f64;
        if inside(t) {
            let (mut lo, mut hi) = (prev, t);
            while hi - lo > tol * hi {
                let m = 0.5 * (lo + hi);
                if inside(m) {
                    hi = m;
                } else {
                    lo = m;
                }
            }
            return Some(hi);
        }
        prev = t;
    }
    None
}

/// Integrates the closed loop from `(x0, y0)` arc by arc until the state
/// enters the ball of radius `stop_radius` or `time_budget` runs out.
pub fn simulate_fuller(
    x0: f64,
    y0: f64,
    synthesis: &FullerSynthesis,
    stop_radius: f64,
    time_budget: f64,
) -> Result<FullerTrajectory> {
    synthesis.validate()?;
    if !(stop_radius > 0.0) {
        return Err(Error::Domain(format!("stop radius must be positive, got {stop_radius}")));
    }
    if !(time_budget >= 0.0) || !x0.is_finite() || !y0.is_finite() {
        return Err(Error::Domain("time budget and initial state must be finite and non-negative".into()));
    }
    let mut tr = FullerTrajectory {
        synthesis: *synthesis,
        times: vec![0.0],
        states: vec![(x0, y0)],
        controls: Vec::new(),
        costs: vec![0.0],
        switch_times: Vec::new(),
        cost: 0.0,
        termination: Termination::ReachedBall,
    };
    let ctrl = fuller_control((x0, y0), synthesis);
    if x0.hypot(y0) <= stop_radius || ctrl == Control::Terminal {
        return Ok(tr);
    }
    let mut u = ctrl.value().expect("non-terminal");
    let (mut x, mut y, mut t) = (x0, y0, 0.0);
    let mut at_switch = synthesis.switching_function(x0, y0) == 0.0;
    loop {
        let remaining = time_budget - t;
        let ts = next_switch(synthesis, x, y, u, at_switch).filter(|&s| s <= remaining);
        let horizon = ts.unwrap_or(remaining);
        let entry = ball_entry(x, y, u, stop_radius, horizon, synthesis.event_tol);
        let (dt, term) = match (entry, ts) {
            (Some(tb), _) => (tb, Some(Termination::ReachedBall)),
            (None, Some(ts)) => (ts, None),
            (None, None) => (remaining, Some(Termination::TimeBudget)),
        };
        tr.cost += arc_cost(x, y, u, dt);
        (x, y) = arc_state(x, y, u, dt);
        t += dt;
        tr.times.push(t);
        tr.states.push((x, y));
        tr.controls.push(u);
        tr.costs.push(tr.cost);
        if let Some(term) = term {
            tr.termination = term;
            return Ok(tr);
        }
        tr.switch_times.push(t);
        u = -u;
        at_switch = true;
    }
}

/// Successive interval ratios `(t_{k+1} - t_k) / (t_k - t_{k-1})`.
pub fn switch_ratio(times: &[f64]) -> Result<SwitchRatio> {
    if times.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "switch ratios need at least 4 switch times, got {}",
            times.len()
        )));
    }
    let ratios: Vec<f64> = times.windows(3).map(|w| (w[2] - w[1]) / (w[1] - w[0])).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let dispersion = ratios.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max) / mean.abs();
    Ok(SwitchRatio { mean, dispersion })
}

impl FullerTrajectory {
    pub fn switch_count(&self) -> usize {
        self.switch_times.len()
    }

    pub fn final_state(&self) -> (f64, f64) {
        *self.states.last().expect("trajectory has a start")
    }

    /// Interval ratios over the last `intervals` switch intervals.
    pub fn tail_switch_ratio(&self, intervals: usize) -> Result<SwitchRatio> {
        let n = self.switch_times.len();
        let take = (intervals + 1).min(n);
        switch_ratio(&self.switch_times[n - take..])
    }

    /// Largest mismatch between a stored endpoint and the exact arc
    /// propagated from the previous one.
    pub fn reconstruction_residual(&self) -> f64 {
        (0..self.controls.len())
            .map(|i| {
                let (x, y) = self.states[i];
                let (xe, ye) = arc_state(x, y, self.controls[i], self.times[i + 1] - self.times[i]);
                let (xs, ys) = self.states[i + 1];
                (xe - xs).abs().max((ye - ys).abs())
            })
            .fold(0.0, f64::max)
    }

    /// One row per switch: `(k, t_k, x_k, y_k, interval, ratio)`. The first
    /// interval is measured from the start; the first ratio is undefined.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["k", "t_k", "x_k", "y_k", "interval", "ratio"]);
        let mut prev_t = 0.0;
        let mut prev_iv = f64::NAN;
        for (k, &tk) in self.switch_times.iter().enumerate() {
            let (x, y) = self.states[k + 1];
            let iv = tk - prev_t;
            t.push(vec![(k as i64 + 1).into(), tk.into(), x.into(), y.into(), iv.into(), (iv / prev_iv).into()]);
            prev_t = tk;
            prev_iv = iv;
        }
        t
    }

    pub fn summary_line(&self) -> String {
        format!(
            "C = {:.15}, cost = {:.15e}, switches = {}",
            self.synthesis.switch_coefficient,
            self.cost,
            self.switch_count()
        )
    }
}
