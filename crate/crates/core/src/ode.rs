//! Dormand-Prince 5(4) integrator with step-size control.
//!
//! Steps are clamped so that every requested output time and every
//! discontinuity of the right-hand side is hit exactly; outputs are therefore
//! full-accuracy solution values rather than interpolants.

use crate::error::{Error, Result};
use crate::pulse::Side;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b̂ (fifth minus fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Work {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl Work {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
        }
    }
}

fn combine(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &(a, k) in terms {
            acc += a * k[i];
        }
        *o = y[i] + h * acc;
    }
}

/// Integrates `dy/dt = f(t, y)` from `t0` and returns the state at each entry
/// of `outputs` (sorted, all `>= t0`). `breakpoints` mark times where `f` may
/// jump; the closure is told which side of the jump it is evaluated on.
pub fn integrate<F>(
    opts: &OdeOptions,
    mut rhs: F,
    t0: f64,
    y0: &[f64],
    outputs: &[f64],
    breakpoints: &[f64],
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, Side, &[f64], &mut [f64]),
{
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
        return Err(Error::InvalidInput(
            "output times must be sorted and not precede the start time".into(),
        ));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut result = Vec::with_capacity(outputs.len());
    let Some(&t_end) = outputs.last() else {
        return Ok(result);
    };

    let mut stops: Vec<f64> = outputs
        .iter()
        .chain(breakpoints.iter().filter(|&&b| b > t0 && b < t_end))
        .copied()
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let is_break = |s: f64| breakpoints.contains(&s);

    let mut w = Work::new(n);
    let mut steps = 0usize;
    let mut h_next: Option<f64> = None;
    let mut fsal_valid = false;
    let mut out_iter = outputs.iter().peekable();
    while out_iter.peek().is_some_and(|&&o| o == t) {
        result.push(y.clone());
        out_iter.next();
    }

    for &stop in &stops {
        if stop <= t {
            continue;
        }
        while t < stop {
            let start_side = if t == t0 || is_break(t) {
                Side::Right
            } else {
                Side::Left
            };
            if !fsal_valid || start_side == Side::Right {
                rhs(t, start_side, &y, &mut w.k[0]);
            }
            let remaining = stop - t;
            let mut h = h_next.unwrap_or_else(|| initial_step(opts, &y, &w.k[0], remaining));
            let clamped = h >= remaining;
            if clamped {
                h = remaining;
            }
            let hit_stop = clamped;
            dp_step(&mut rhs, &mut w, t, h, &y);
            let sc_err = error_norm(opts, &y, &w.y_new, &w.tmp);
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::TooManySteps {
                    t,
                    steps: opts.max_steps,
                });
            }
            if !sc_err.is_finite() {
                h_next = Some(h * 0.2);
                fsal_valid = true;
                if h * 0.2 < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t });
                }
                continue;
            }
            let factor = if sc_err == 0.0 {
                5.0
            } else {
                (0.9 * sc_err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if sc_err <= 1.0 {
                t = if hit_stop { stop } else { t + h };
                std::mem::swap(&mut y, &mut w.y_new);
                let (first, rest) = w.k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
                fsal_valid = true;
                // keep the unclamped proposal so output points do not shrink steps
                let proposal = h * factor;
                h_next = Some(match h_next {
                    Some(prev) if hit_stop && prev > h => prev.max(proposal),
                    _ => proposal,
                });
            } else {
                let reduced = h * factor.min(1.0);
                if reduced < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t });
                }
                h_next = Some(reduced);
                fsal_valid = true;
            }
        }
        while out_iter.peek().is_some_and(|&&o| o == stop) {
            result.push(y.clone());
            out_iter.next();
        }
    }
    Ok(result)
}

fn initial_step(opts: &OdeOptions, y: &[f64], f0: &[f64], span: f64) -> f64 {
    let scale = |i: usize| opts.atol + opts.rtol * y[i].abs();
    let d0 = (y
        .iter()
        .enumerate()
        .map(|(i, v)| (v / scale(i)).powi(2))
        .sum::<f64>()
        / y.len() as f64)
        .sqrt();
    let d1 = (f0
        .iter()
        .enumerate()
        .map(|(i, v)| (v / scale(i)).powi(2))
        .sum::<f64>()
        / y.len() as f64)
        .sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(span).max(1e-12 * span)
}

// Runs one step; leaves the fifth-order solution in `w.y_new` and the error
// vector in `w.tmp`. Stage 7 is evaluated at the step end (left side).
fn dp_step<F>(rhs: &mut F, w: &mut Work, t: f64, h: f64, y: &[f64])
where
    F: FnMut(f64, Side, &[f64], &mut [f64]),
{
    let Work { k, tmp, y_new } = w;
    let [k1, k2, k3, k4, k5, k6, k7] = k;
    combine(tmp, y, h, &[(A21, k1)]);
    rhs(t + C[1] * h, Side::Left, tmp, k2);
    combine(tmp, y, h, &[(A31, k1), (A32, k2)]);
    rhs(t + C[2] * h, Side::Left, tmp, k3);
    combine(tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
    rhs(t + C[3] * h, Side::Left, tmp, k4);
    combine(tmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
    rhs(t + C[4] * h, Side::Left, tmp, k5);
    combine(
        tmp,
        y,
        h,
        &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
    );
    rhs(t + h, Side::Left, tmp, k6);
    combine(
        y_new,
        y,
        h,
        &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)],
    );
    rhs(t + h, Side::Left, y_new, k7);
    for i in 0..y.len() {
        tmp[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
}

fn error_norm(opts: &OdeOptions, y: &[f64], y_new: &[f64], err: &[f64]) -> f64 {
    let n = y.len().max(1) as f64;
    let sum: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = opts.atol + opts.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}
