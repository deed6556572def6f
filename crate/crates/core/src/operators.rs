//! Two-atom operators in the collective basis `{|gg⟩, |s⟩, |a⟩, |ee⟩}` and the
//! vacuum master-equation generator.

use nalgebra::Matrix4;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::couplings::CollectiveRates;
use crate::pulse::Channel;

pub type Op4 = Matrix4<Complex64>;

pub const GG: usize = 0;
pub const S: usize = 1;
pub const A: usize = 2;
pub const EE: usize = 3;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn projector(i: usize) -> Op4 {
    let mut m = Op4::zeros();
    m[(i, i)] = c(1.0);
    m
}

/// `|i⟩⟨j|`
pub fn transition(i: usize, j: usize) -> Op4 {
    let mut m = Op4::zeros();
    m[(i, j)] = c(1.0);
    m
}

/// Normalised collective lowering operator of a channel:
/// `(σ₁⁻ ± σ₂⁻)/√2`.
pub fn collective_lowering(channel: Channel) -> Op4 {
    match channel {
        Channel::Symmetric => transition(GG, S) + transition(S, EE),
        Channel::Antisymmetric => transition(GG, A) - transition(A, EE),
    }
}

/// Channel jump operators `√(γ ± γ12) · (σ₁⁻ ± σ₂⁻)/√2`.
pub fn jump_operators(rates: &CollectiveRates) -> [Op4; 2] {
    [
        collective_lowering(Channel::Symmetric) * c(rates.symmetric_width().max(0.0).sqrt()),
        collective_lowering(Channel::Antisymmetric)
            * c(rates.antisymmetric_width().max(0.0).sqrt()),
    ]
}

/// Dipole-dipole exchange `sign · (λ12/2)(σ₁⁺σ₂⁻ + σ₁⁻σ₂⁺)`, diagonal in the
/// collective basis.
pub fn exchange_hamiltonian(rates: &CollectiveRates, cls_sign: f64) -> Op4 {
    let e = cls_sign * rates.lambda12 / 2.0;
    (projector(S) - projector(A)) * c(e)
}

/// The vacuum generator `-i[H, ·] + Σ_c D[L_c]`, precomputed for repeated use
/// on arbitrary (not necessarily Hermitian) sector matrices.
#[derive(Debug, Clone)]
pub struct Generator {
    // -iH - ½ Σ L†L
    effective: Op4,
    jumps: [Op4; 2],
    jumps_dag: [Op4; 2],
}

impl Generator {
    pub fn new(rates: &CollectiveRates, cls_sign: f64) -> Self {
        let h = exchange_hamiltonian(rates, cls_sign);
        let jumps = jump_operators(rates);
        let jumps_dag = [jumps[0].adjoint(), jumps[1].adjoint()];
        let loss = jumps_dag[0] * jumps[0] + jumps_dag[1] * jumps[1];
        let effective = h * Complex64::new(0.0, -1.0) - loss * c(0.5);
        Self {
            effective,
            jumps,
            jumps_dag,
        }
    }

    pub fn jumps(&self) -> &[Op4; 2] {
        &self.jumps
    }

    pub fn apply(&self, rho: &Op4) -> Op4 {
        let mut out = self.effective * rho + rho * self.effective.adjoint();
        for (l, ld) in self.jumps.iter().zip(&self.jumps_dag) {
            out += l * rho * ld;
        }
        out
    }
}

pub fn commutator(a: &Op4, b: &Op4) -> Op4 {
    a * b - b * a
}

pub fn trace(m: &Op4) -> Complex64 {
    m.trace()
}

pub fn pure_state(amplitudes: [Complex64; 4]) -> Op4 {
    let mut m = Op4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = amplitudes[i] * amplitudes[j].conj();
        }
    }
    m
}

/// Probabilities that atom 1 and atom 2 are excited; both include `|ee⟩`.
pub fn per_atom_population(rho: &Op4) -> (f64, f64) {
    let ss = rho[(S, S)].re;
    let aa = rho[(A, A)].re;
    let sa = rho[(S, A)].re;
    let ee = rho[(EE, EE)].re;
    (0.5 * (ss + aa) + sa + ee, 0.5 * (ss + aa) - sa + ee)
}

/// Minimum eigenvalue of the Hermitian part.
pub fn min_eigenvalue(rho: &Op4) -> f64 {
    let herm = (rho + rho.adjoint()) * c(0.5);
    herm.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn hermiticity_defect(rho: &Op4) -> f64 {
    (rho - rho.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pauli {
    X,
    Y,
    Z,
}

// Single-atom matrices in the (g, e) basis with σz|e⟩ = +|e⟩ and σ⁺ = |e⟩⟨g|.
fn pauli(p: Option<Pauli>) -> [[Complex64; 2]; 2] {
    let z = c(0.0);
    let one = c(1.0);
    let i = Complex64::i();
    match p {
        None => [[one, z], [z, one]],
        Some(Pauli::X) => [[z, one], [one, z]],
        Some(Pauli::Y) => [[z, i], [-i, z]],
        Some(Pauli::Z) => [[-one, z], [z, one]],
    }
}

// Columns: collective basis vectors expressed in the product basis
// |g g⟩, |g e⟩, |e g⟩, |e e⟩ (atom 1 first).
fn collective_to_product() -> Op4 {
    let h = c(FRAC_1_SQRT_2);
    let mut u = Op4::zeros();
    u[(0, GG)] = c(1.0);
    u[(2, S)] = h;
    u[(1, S)] = h;
    u[(2, A)] = h;
    u[(1, A)] = -h;
    u[(3, EE)] = c(1.0);
    u
}

fn product_operator(first: Option<Pauli>, second: Option<Pauli>) -> Op4 {
    let a = pauli(first);
    let b = pauli(second);
    let mut m = Op4::zeros();
    for i1 in 0..2 {
        for j1 in 0..2 {
            for i2 in 0..2 {
                for j2 in 0..2 {
                    m[(2 * i1 + i2, 2 * j1 + j2)] = a[i1][j1] * b[i2][j2];
                }
            }
        }
    }
    let u = collective_to_product();
    u.adjoint() * m * u
}

/// Names of the fifteen nontrivial two-atom observables, in output order.
pub const OBSERVABLE_NAMES: [&str; 15] = [
    "sz1", "sz2", "sx1", "sx2", "sy1", "sy2", "sx1sx2", "sy1sy2", "sz1sz2", "sx1sy2", "sy1sx2",
    "sx1sz2", "sz1sx2", "sy1sz2", "sz1sy2",
];

fn observable_factors(name: &str) -> Option<(Option<Pauli>, Option<Pauli>)> {
    use Pauli::*;
    Some(match name {
        "sz1" => (Some(Z), None),
        "sz2" => (None, Some(Z)),
        "sx1" => (Some(X), None),
        "sx2" => (None, Some(X)),
        "sy1" => (Some(Y), None),
        "sy2" => (None, Some(Y)),
        "sx1sx2" => (Some(X), Some(X)),
        "sy1sy2" => (Some(Y), Some(Y)),
        "sz1sz2" => (Some(Z), Some(Z)),
        "sx1sy2" => (Some(X), Some(Y)),
        "sy1sx2" => (Some(Y), Some(X)),
        "sx1sz2" => (Some(X), Some(Z)),
        "sz1sx2" => (Some(Z), Some(X)),
        "sy1sz2" => (Some(Y), Some(Z)),
        "sz1sy2" => (Some(Z), Some(Y)),
        _ => return None,
    })
}

/// Matrix of a named observable in the collective basis.
pub fn observable(name: &str) -> Option<Op4> {
    observable_factors(name).map(|(a, b)| product_operator(a, b))
}

/// Whether the observable is even (group A) or odd (group B) in the
/// transverse spin components; the drive couples the two groups.
pub fn observable_group(name: &str) -> Option<char> {
    let (a, b) = observable_factors(name)?;
    let odd = [a, b]
        .iter()
        .filter(|p| matches!(p, Some(Pauli::X) | Some(Pauli::Y)))
        .count()
        % 2;
    Some(if odd == 0 { 'A' } else { 'B' })
}

/// The fifteen Pauli expectations of a two-atom state.
#[derive(Debug, Clone, PartialEq)]
pub struct Expectations {
    values: [f64; 15],
}

impl Expectations {
    pub fn of(rho: &Op4) -> Self {
        let mut values = [0.0; 15];
        for (v, name) in values.iter_mut().zip(OBSERVABLE_NAMES) {
            let op = observable(name).expect("known observable");
            *v = (op * rho).trace().re;
        }
        Self { values }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        OBSERVABLE_NAMES
            .iter()
            .position(|&n| n == name)
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        OBSERVABLE_NAMES
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }
}
