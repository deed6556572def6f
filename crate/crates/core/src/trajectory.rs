//! Population time series and time-grid helpers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{per_atom_population, Op4, A, EE, GG, S};
use crate::pulse::PhotonMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Population {
    Ground,
    Symmetric,
    Antisymmetric,
    BothExcited,
    Atom1,
    Atom2,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub p_gg: Vec<f64>,
    pub p_s: Vec<f64>,
    pub p_a: Vec<f64>,
    pub p_ee: Vec<f64>,
    pub p_atom1: Vec<f64>,
    pub p_atom2: Vec<f64>,
    pub coherence_sa: Vec<Complex64>,
}

impl StateTrajectory {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            p_gg: Vec::with_capacity(n),
            p_s: Vec::with_capacity(n),
            p_a: Vec::with_capacity(n),
            p_ee: Vec::with_capacity(n),
            p_atom1: Vec::with_capacity(n),
            p_atom2: Vec::with_capacity(n),
            coherence_sa: Vec::with_capacity(n),
        }
    }

    pub fn from_density(times: &[f64], states: &[Op4]) -> Self {
        let mut traj = Self::with_capacity(times.len());
        for (&t, rho) in times.iter().zip(states) {
            traj.push_density(t, rho);
        }
        traj
    }

    pub fn push_density(&mut self, t: f64, rho: &Op4) {
        let (p1, p2) = per_atom_population(rho);
        self.times.push(t);
        self.p_gg.push(rho[(GG, GG)].re);
        self.p_s.push(rho[(S, S)].re);
        self.p_a.push(rho[(A, A)].re);
        self.p_ee.push(rho[(EE, EE)].re);
        self.p_atom1.push(p1);
        self.p_atom2.push(p2);
        self.coherence_sa.push(rho[(S, A)]);
    }

    /// Single-excitation pure-state sample; the rest of the norm is in `|gg⟩`.
    pub fn push_amplitudes(&mut self, t: f64, beta_s: Complex64, beta_a: Complex64) {
        let ps = beta_s.norm_sqr();
        let pa = beta_a.norm_sqr();
        let eg = (beta_s + beta_a).norm_sqr() / 2.0;
        let ge = (beta_s - beta_a).norm_sqr() / 2.0;
        self.times.push(t);
        self.p_gg.push(1.0 - ps - pa);
        self.p_s.push(ps);
        self.p_a.push(pa);
        self.p_ee.push(0.0);
        self.p_atom1.push(eg);
        self.p_atom2.push(ge);
        self.coherence_sa.push(beta_s * beta_a.conj());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn series(&self, which: Population) -> &[f64] {
        match which {
            Population::Ground => &self.p_gg,
            Population::Symmetric => &self.p_s,
            Population::Antisymmetric => &self.p_a,
            Population::BothExcited => &self.p_ee,
            Population::Atom1 => &self.p_atom1,
            Population::Atom2 => &self.p_atom2,
        }
    }

    /// Index and value of the largest sample (first one on ties).
    pub fn argmax(&self, which: Population) -> Option<(usize, f64)> {
        self.series(which)
            .iter()
            .copied()
            .enumerate()
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
    }

    pub fn max(&self, which: Population) -> f64 {
        self.argmax(which).map(|(_, v)| v).unwrap_or(0.0)
    }

    /// Checks the per-sample sum rule and population bounds.
    pub fn check(&self, tol: f64) -> Result<()> {
        for i in 0..self.len() {
            let sum = self.p_gg[i] + self.p_s[i] + self.p_a[i] + self.p_ee[i];
            if (sum - 1.0).abs() > tol {
                return Err(Error::Invariant {
                    t: self.times[i],
                    what: format!("populations sum to {sum}"),
                });
            }
            for p in [self.p_gg[i], self.p_s[i], self.p_a[i], self.p_ee[i]] {
                if !(-1e-9..=1.0 + 1e-9).contains(&p) {
                    return Err(Error::Invariant {
                        t: self.times[i],
                        what: format!("population {p} out of [0, 1]"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Linear interpolation of a series at time `t` inside the grid.
    pub fn interpolate(&self, which: Population, t: f64) -> Option<f64> {
        let s = self.series(which);
        let k = self.times.partition_point(|&x| x < t);
        if k == 0 {
            return (self.times.first() == Some(&t)).then(|| s[0]);
        }
        if k == self.len() {
            return None;
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 1.0 };
        Some(s[k - 1] + w * (s[k] - s[k - 1]))
    }
}

/// `n` evenly spaced points covering `[lo, hi]` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Default observation window: the whole pulse, then `10/γ` of decay.
pub fn default_window(mode: &PhotonMode, gamma: f64) -> Option<(f64, f64)> {
    let (lo, hi) = mode.support()?;
    Some((lo, hi.max(0.0) + 10.0 / gamma))
}

/// Grid for a pulse run: `n` points over the window plus a block of `n/2`
/// points spanning ten fast-channel lifetimes either side of `t = 0`, always
/// including `t = 0` itself.
pub fn pulse_grid(mode: &PhotonMode, window: (f64, f64), n: usize) -> Vec<f64> {
    let (lo, hi) = window;
    let mut grid = uniform_grid(lo, hi, n);
    if let Some(fast) = mode.fastest_bandwidth() {
        let half = 10.0 / fast;
        grid.extend(
            uniform_grid(-half, half, n / 2)
                .into_iter()
                .filter(|&t| t >= lo && t <= hi),
        );
    }
    if lo <= 0.0 && hi >= 0.0 {
        grid.push(0.0);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Abscissa of the vertex of the parabola through three samples, if the
/// samples are concave and the vertex falls inside the bracket.
pub fn parabolic_vertex(t: [f64; 3], y: [f64; 3]) -> Option<f64> {
    let d1 = (y[1] - y[0]) / (t[1] - t[0]);
    let d2 = (y[2] - y[1]) / (t[2] - t[1]);
    let curv = (d2 - d1) / (t[2] - t[0]);
    if !(curv < 0.0) {
        return None;
    }
    let vertex = 0.5 * (t[0] + t[1]) - d1 / (2.0 * curv);
    (vertex > t[0] && vertex < t[2]).then_some(vertex)
}
