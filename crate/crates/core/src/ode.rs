//! Adaptive Dormand-Prince 5(4) integration with a projection hook.

/// Butcher tableau of the Dormand-Prince pair (the system is autonomous,
/// so the nodes are not needed).
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Mixed absolute / relative local error tolerance.
    pub tol: f64,
    /// Smallest step magnitude before the integration is abandoned.
    pub min_step: f64,
    pub max_steps: usize,
}

impl StepControl {
    pub fn new(tol: f64) -> Self {
        Self { tol, min_step: 1e-14, max_steps: 1_000_000 }
    }
}

/// Why an integration stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Stop {
    pub time: f64,
    pub reason: String,
}

/// States at the requested output times, possibly truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stopped: Option<Stop>,
    pub steps: usize,
}

fn axpy(y: &[f64], h: f64, ks: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (k, &c) in ks.iter().zip(coeffs) {
        if c != 0.0 {
            for (o, kv) in out.iter_mut().zip(k) {
                *o += h * c * kv;
            }
        }
    }
    out
}

/// Integrates `y' = f(y)` from `y0` through the monotone output times
/// `outputs` (which may decrease for backward integration). `f` returns
/// `Err` when the state is outside its domain; `project` maps an accepted
/// state back to the constraint manifold.
pub fn integrate<F, P>(y0: &[f64], outputs: &[f64], ctl: StepControl, f: F, project: P) -> Solution
where
    F: Fn(&[f64]) -> Result<Vec<f64>, String>,
    P: Fn(&mut Vec<f64>),
{
    let mut sol = Solution { times: Vec::new(), states: Vec::new(), stopped: None, steps: 0 };
    let mut t = 0.0;
    let mut y = y0.to_vec();
    let mut k1 = match f(&y) {
        Ok(k) => k,
        Err(reason) => {
            sol.stopped = Some(Stop { time: t, reason });
            return sol;
        }
    };
    let span = outputs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut h = (span / 16.0).max(1e-3).min(0.05);
    for &target in outputs {
        let dir = if target >= t { 1.0 } else { -1.0 };
        while (target - t).abs() > 1e-15 * (1.0 + target.abs()) {
            if sol.steps >= ctl.max_steps {
                sol.stopped = Some(Stop { time: t, reason: "step budget exhausted".into() });
                return sol;
            }
            let mut step = dir * h.min((target - t).abs());
            let last = (target - t).abs() <= h;
            let mut ks: Vec<Vec<f64>> = vec![k1.clone()];
            let mut failed = None;
            for s in 1..7 {
                let ys = axpy(&y, step, &ks, &A[s][..s]);
                match f(&ys) {
                    Ok(k) => ks.push(k),
                    Err(reason) => {
                        failed = Some(reason);
                        break;
                    }
                }
            }
            if let Some(reason) = failed {
                h *= 0.25;
                if h < ctl.min_step {
                    sol.stopped = Some(Stop { time: t, reason });
                    return sol;
                }
                continue;
            }
            let y5 = axpy(&y, step, &ks, &B5);
            let y4 = axpy(&y, step, &ks, &B4);
            let err = y5
                .iter()
                .zip(&y4)
                .zip(&y)
                .map(|((p, q), r)| (p - q).abs() / (ctl.tol * (1.0 + r.abs().max(p.abs()))))
                .fold(0.0, f64::max);
            if err <= 1.0 {
                let mut next = y5;
                project(&mut next);
                t = if last { target } else { t + step };
                match f(&next) {
                    Ok(k) => k1 = k,
                    Err(reason) => {
                        sol.stopped = Some(Stop { time: t, reason });
                        return sol;
                    }
                }
                y = next;
                sol.steps += 1;
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || grow < 1.0 {
                    h = (step.abs() * grow).max(ctl.min_step);
                }
            } else {
                step = step.abs() * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                h = step;
                if h < ctl.min_step {
                    sol.stopped = Some(Stop { time: t, reason: "step size underflow".into() });
                    return sol;
                }
            }
        }
        sol.times.push(target);
        sol.states.push(y.clone());
    }
    sol
}
