//! Dormand–Prince 5(4) with adaptive step size.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
}

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on `|h|`; `None` means the whole span.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-9,
            max_step: None,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Reached the requested end time.
    End,
    /// The halting predicate fired.
    Halted,
    /// The step size collapsed, from error control or from a right-hand side
    /// that is not finite past a boundary. The trajectory holds everything
    /// accepted so far.
    Underflow,
}

#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub ts: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub stop: StopReason,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus the embedded fourth-order ones.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (w, k) in terms {
        for i in 0..N {
            out[i] += h * w * k[i];
        }
    }
    out
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], opts: &OdeOptions) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let scale = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
            (err[i] / scale).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end` (either direction).
///
/// Every accepted step is recorded. Steps are shortened to land exactly on
/// each of `checkpoints` lying between `t0` and `t_end`. `halt` is consulted
/// after each accepted step; when it returns true that state is dropped and
/// integration stops. A right-hand side that returns non-finite values makes
/// the step count as rejected.
pub fn integrate<const N: usize, F, H>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    halt: H,
    checkpoints: &[f64],
) -> Result<Trajectory<N>, OdeError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    H: Fn(f64, &[f64; N]) -> bool,
{
    let span = t_end - t0;
    let dir = if span >= 0.0 { 1.0 } else { -1.0 };
    let mut marks: Vec<f64> = checkpoints
        .iter()
        .copied()
        .filter(|c| (c - t0) * dir > 0.0 && (t_end - c) * dir > 0.0)
        .collect();
    marks.sort_by(|a, b| (a * dir).total_cmp(&(b * dir)));
    marks.push(t_end);
    let mut next_mark = 0;

    let mut traj = Trajectory {
        ts: vec![t0],
        states: vec![y0],
        stop: StopReason::End,
    };
    if span == 0.0 {
        return Ok(traj);
    }
    let h_max = opts.max_step.unwrap_or(span.abs()).min(span.abs());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let scale0: f64 = (0..N).map(|i| (y[i] / (opts.atol + opts.rtol * y[i].abs())).powi(2)).sum();
    let scale1: f64 = (0..N).map(|i| (k1[i] / (opts.atol + opts.rtol * y[i].abs())).powi(2)).sum();
    let mut h = if scale0 < 1e-10 || scale1 < 1e-10 || !scale1.is_finite() {
        1e-6
    } else {
        0.01 * (scale0 / scale1).sqrt()
    };
    h = h.min(h_max).max(1e-12);

    let mut steps = 0;
    while next_mark < marks.len() {
        if steps >= opts.max_steps {
            return Err(OdeError::TooManySteps(opts.max_steps));
        }
        steps += 1;
        let target = marks[next_mark];
        let remaining = (target - t) * dir;
        if remaining <= 1e-13 * t.abs().max(1.0) {
            // Already on the mark up to rounding.
            t = target;
            *traj.ts.last_mut().expect("nonempty") = target;
            next_mark += 1;
            continue;
        }
        let mut landing = false;
        let mut step = h;
        if step >= remaining {
            step = remaining;
            landing = true;
        }
        let hs = step * dir;
        if step <= 1e-14 * t.abs().max(1.0) {
            traj.stop = StopReason::Underflow;
            return Ok(traj);
        }

        let k2 = rhs(t + C2 * hs, &combo(&y, hs, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * hs, &combo(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * hs, &combo(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * hs,
            &combo(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + hs,
            &combo(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = combo(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + hs, &y_new);
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let norm = error_norm(&err, &y, &y_new, opts);

        if !norm.is_finite() || y_new.iter().chain(k7.iter()).any(|v| !v.is_finite()) {
            h = step * 0.25;
            continue;
        }
        if norm <= 1.0 {
            let t_new = if landing { target } else { t + hs };
            if halt(t_new, &y_new) {
                traj.stop = StopReason::Halted;
                return Ok(traj);
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            traj.ts.push(t);
            traj.states.push(y);
            if landing {
                next_mark += 1;
            }
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        // After a rejection never grow.
        let factor = if norm > 1.0 { factor.min(1.0) } else { factor };
        h = (step * factor).min(h_max);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn never<const N: usize>(_: f64, _: &[f64; N]) -> bool {
        false
    }

    #[test]
    fn exponential_growth() {
        let traj = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 3.0, &OdeOptions::default(), never, &[]).unwrap();
        let (t, y) = (traj.ts.last().unwrap(), traj.states.last().unwrap()[0]);
        assert_eq!(*t, 3.0);
        assert!((y - 3f64.exp()).abs() < 1e-8 * 3f64.exp());
    }

    #[test]
    fn harmonic_backwards_with_checkpoints() {
        let rhs = |_: f64, s: &[f64; 2]| [s[1], -s[0]];
        let opts = OdeOptions {
            rtol: 1e-11,
            atol: 1e-11,
            ..OdeOptions::default()
        };
        let traj = integrate(rhs, 0.0, [0.0, 1.0], -4.0, &opts, never, &[-1.0, -2.5]).unwrap();
        for mark in [-1.0, -2.5, -4.0] {
            let i = traj.ts.iter().position(|t| *t == mark).expect("checkpoint hit exactly");
            assert!((traj.states[i][0] - f64::sin(mark)).abs() < 1e-9);
        }
        assert!(traj.ts.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn halting_predicate() {
        // y' = y² blows up at t = 1.
        let traj = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            2.0,
            &OdeOptions::default(),
            |_, y| y[0] > 1e6,
            &[],
        )
        .unwrap();
        assert_eq!(traj.stop, StopReason::Halted);
        let t = *traj.ts.last().unwrap();
        assert!(t < 1.0 && t > 0.999);
        let y = traj.states.last().unwrap()[0];
        // Compare blow-up times: 1/y = 1 − t.
        assert!((1.0 / y - (1.0 - t)).abs() < 1e-8);
    }

    #[test]
    fn nonfinite_rhs_shrinks_to_boundary() {
        // y' = -1/(2y) reaches y = 0 at t = 1 with y = sqrt(1 - t).
        let rhs = |_: f64, y: &[f64; 1]| if y[0] > 0.0 { [-0.5 / y[0]] } else { [f64::NAN] };
        let traj = integrate(rhs, 0.0, [1.0], 2.0, &OdeOptions::default(), never, &[]).unwrap();
        assert_eq!(traj.stop, StopReason::Underflow);
        assert!((traj.ts.last().unwrap() - 1.0).abs() < 1e-6);
    }
}
