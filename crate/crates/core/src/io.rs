//! CSV serialisation of results with 12 significant digits.

use std::io::{self, Write};

use crate::coherent::PeakRow;
use crate::couplings::RatesRow;
use crate::optimize::Evaluation;
use crate::pulse::{Side, TemporalEnvelope};
use crate::trajectory::StateTrajectory;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub const RATES_HEADER: &str = "kr,gamma12_over_gamma,lambda12_over_gamma";
pub const ENVELOPE_HEADER: &str = "t,re_xi,im_xi";
pub const TRAJECTORY_HEADER: &str = "t,P_gg,P_s,P_a,P_ee,P_atom1,P_atom2,re_coh_sa,im_coh_sa";
pub const SWEEP_HEADER: &str = "kr,maxPs,Pee,Pa,Pgg";

/// Formats like C's `%.12g`: shortest of fixed or exponent notation, trailing
/// zeros removed.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn row<W: Write>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let line: Vec<String> = values.iter().map(|&v| fmt_sig(v)).collect();
    writeln!(w, "{}", line.join(","))
}

pub fn write_rates<W: Write>(w: &mut W, rows: &[RatesRow]) -> io::Result<()> {
    writeln!(w, "{RATES_HEADER}")?;
    for r in rows {
        row(w, &[r.kr, r.gamma12_over_gamma, r.lambda12_over_gamma])?;
    }
    Ok(())
}

pub fn write_envelope<W: Write>(
    w: &mut W,
    envelope: &TemporalEnvelope,
    times: &[f64],
) -> io::Result<()> {
    writeln!(w, "{ENVELOPE_HEADER}")?;
    for &t in times {
        let xi = envelope.eval(t, Side::Left);
        row(w, &[t, xi.re, xi.im])?;
    }
    Ok(())
}

pub fn write_trajectory<W: Write>(w: &mut W, traj: &StateTrajectory) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for i in 0..traj.len() {
        row(
            w,
            &[
                traj.times[i],
                traj.p_gg[i],
                traj.p_s[i],
                traj.p_a[i],
                traj.p_ee[i],
                traj.p_atom1[i],
                traj.p_atom2[i],
                traj.coherence_sa[i].re,
                traj.coherence_sa[i].im,
            ],
        )?;
    }
    Ok(())
}

/// Separation sweep; the `maxPs` column holds the driven channel's peak.
pub fn write_sweep<W: Write>(w: &mut W, rows: &[PeakRow]) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        row(w, &[r.kr, r.peak, r.p_ee, r.p_a, r.p_gg])?;
    }
    Ok(())
}

pub fn write_scan<W: Write>(
    w: &mut W,
    param_names: &[&str],
    rows: &[Evaluation],
) -> io::Result<()> {
    writeln!(w, "{},peak", param_names.join(","))?;
    for e in rows {
        let mut values = e.params.clone();
        values.push(e.peak);
        row(w, &values)?;
    }
    Ok(())
}
