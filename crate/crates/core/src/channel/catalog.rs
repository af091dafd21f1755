use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{LowNoiseChannel, DEFAULT_VALIDATION_GRID};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ONE, ZERO};
use crate::series::OperatorSeries;
use crate::state::{complex_gaussian, task_rng};

pub const CATALOG_NAMES: [&str; 5] = [
    "identity",
    "depolarizing",
    "amplitude_damping",
    "phase_flip",
    "random_lownoise",
];

/// Built-in channels. `random_lownoise` parses from `random_lownoise` (seed 0)
/// or `random_lownoise:<seed>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogName {
    Identity,
    Depolarizing,
    AmplitudeDamping,
    PhaseFlip,
    RandomLowNoise { seed: u64 },
}

impl FromStr for CatalogName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Self::Identity),
            "depolarizing" => Ok(Self::Depolarizing),
            "amplitude_damping" => Ok(Self::AmplitudeDamping),
            "phase_flip" => Ok(Self::PhaseFlip),
            "random_lownoise" => Ok(Self::RandomLowNoise { seed: 0 }),
            other => match other.strip_prefix("random_lownoise:") {
                Some(seed) => seed
                    .parse()
                    .map(|seed| Self::RandomLowNoise { seed })
                    .map_err(|_| Error::Usage(format!("invalid random_lownoise seed `{seed}`"))),
                None => Err(Error::Usage(format!(
                    "unknown catalog channel `{other}` (expected one of {})",
                    CATALOG_NAMES.join(", ")
                ))),
            },
        }
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("identity"),
            Self::Depolarizing => f.write_str("depolarizing"),
            Self::AmplitudeDamping => f.write_str("amplitude_damping"),
            Self::PhaseFlip => f.write_str("phase_flip"),
            Self::RandomLowNoise { seed } => write!(f, "random_lownoise:{seed}"),
        }
    }
}

/// Taylor coefficients of √(1 − x) through order `order`.
fn sqrt_one_minus(order: usize) -> Vec<Complex64> {
    let mut c = vec![1.0f64];
    for n in 1..=order {
        let prev = c[n - 1];
        c.push(-prev * (1.5 - n as f64) / n as f64);
    }
    c.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
}

/// Generalized Pauli (clock and shift) operators X^a Z^b, (a, b) ≠ (0, 0).
/// For d = 2 these are replaced by σ_x, σ_y, σ_z.
fn unitary_error_basis(d: usize) -> Vec<ComplexMatrix> {
    if d == 2 {
        let i = Complex64::new(0.0, 1.0);
        return vec![
            ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap(),
            ComplexMatrix::from_rows(&[vec![ZERO, -i], vec![i, ZERO]]).unwrap(),
            ComplexMatrix::from_real_diag(&[1.0, -1.0]),
        ];
    }
    let mut out = Vec::with_capacity(d * d - 1);
    for a in 0..d {
        for b in 0..d {
            if a == 0 && b == 0 {
                continue;
            }
            let mut m = ComplexMatrix::zeros(d, d);
            for k in 0..d {
                let phase = std::f64::consts::TAU * (b * k) as f64 / d as f64;
                m[((k + a) % d, k)] = Complex64::from_polar(1.0, phase);
            }
            out.push(m);
        }
    }
    out
}

fn clock(d: usize) -> ComplexMatrix {
    if d == 2 {
        return ComplexMatrix::from_real_diag(&[1.0, -1.0]);
    }
    let diag: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64))
        .collect();
    ComplexMatrix::from_diag(&diag)
}

/// Builds a catalog channel and checks it on the default validation grid.
pub fn catalog(name: &CatalogName, dim: usize, order: usize) -> Result<LowNoiseChannel> {
    if dim < 2 {
        return Err(Error::Usage(format!(
            "catalog channels need dimension ≥ 2, got {dim}"
        )));
    }
    let id = ComplexMatrix::identity(dim);
    let damped_identity = || OperatorSeries::scalar_times(&id, &sqrt_one_minus(order));
    let ch = match name {
        CatalogName::Identity => LowNoiseChannel::new(
            dim,
            vec![OperatorSeries::constant(id.clone())?.with_order(order)],
            vec![],
            vec![ONE],
            "identity",
        )?,
        CatalogName::Depolarizing => {
            let basis = unitary_error_basis(dim);
            let w = Complex64::new(1.0 / (basis.len() as f64).sqrt(), 0.0);
            let c = basis
                .iter()
                .map(|u| Ok(OperatorSeries::constant(u.scale(w))?.with_order(order)))
                .collect::<Result<_>>()?;
            LowNoiseChannel::new(dim, vec![damped_identity()?], c, vec![ONE], "depolarizing")?
        }
        CatalogName::AmplitudeDamping => {
            // B = diag(1, √(1−ε), …), C_k = |0⟩⟨k|
            let mut upper = ComplexMatrix::identity(dim);
            upper[(0, 0)] = ZERO;
            let mut b = OperatorSeries::scalar_times(&upper, &sqrt_one_minus(order))?
                .coefficients()
                .to_vec();
            b[0][(0, 0)] = ONE;
            let c = (1..dim)
                .map(|k| {
                    let mut m = ComplexMatrix::zeros(dim, dim);
                    m[(0, k)] = ONE;
                    Ok(OperatorSeries::constant(m)?.with_order(order))
                })
                .collect::<Result<_>>()?;
            LowNoiseChannel::new(
                dim,
                vec![OperatorSeries::new(b)?],
                c,
                vec![ONE],
                "amplitude_damping",
            )?
        }
        CatalogName::PhaseFlip => LowNoiseChannel::new(
            dim,
            vec![damped_identity()?],
            vec![OperatorSeries::constant(clock(dim))?.with_order(order)],
            vec![ONE],
            "phase_flip",
        )?,
        CatalogName::RandomLowNoise { seed } => random_lownoise(dim, order, *seed)?,
    };
    let report = ch.validate(&DEFAULT_VALIDATION_GRID)?;
    if !report.passed {
        return Err(Error::Numerical(format!(
            "catalog channel `{name}` failed validation: {report:?}"
        )));
    }
    Ok(ch)
}

/// Seeded random low-noise channel: three noise operators `C_β(ε) = M_β + ε M_β^{(1)}`
/// with Gaussian entries, two near-identity operators `B_α = κ_α X(ε)` with a
/// random unit κ vector, and `X` the Hermitian solution of
/// `X² = 1 − ε Σ_β C_β†C_β`, solved order by order.
pub fn random_lownoise(dim: usize, order: usize, seed: u64) -> Result<LowNoiseChannel> {
    const NOISE_FAMILIES: usize = 3;
    const FIRST_ORDER_SCALE: f64 = 0.25;

    let mut rng = task_rng(seed, 0);
    let gaussian_matrix = |rng: &mut rand_chacha::ChaCha8Rng| {
        ComplexMatrix::from_vec_unchecked(dim, dim, complex_gaussian(dim * dim, rng))
    };

    let kappa_raw = complex_gaussian(2, &mut rng);
    let kappa_norm = kappa_raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let kappas: Vec<Complex64> = kappa_raw.iter().map(|z| z / kappa_norm).collect();

    let mut noise: Vec<(ComplexMatrix, ComplexMatrix)> = (0..NOISE_FAMILIES)
        .map(|_| {
            let m = gaussian_matrix(&mut rng);
            let m1 = gaussian_matrix(&mut rng).scale_real(FIRST_ORDER_SCALE);
            (m, m1)
        })
        .collect();

    // scale so that the largest eigenvalue of Σ M†M is 1
    let mut p = ComplexMatrix::zeros(dim, dim);
    for (m, _) in &noise {
        p.add_scaled(&m.adjoint().matmul(m), ONE);
    }
    let top = crate::matrix::hermitian_eig(&p.hermitize())?
        .values
        .last()
        .copied()
        .unwrap_or(1.0);
    let s = 1.0 / top.sqrt();
    for (m, m1) in noise.iter_mut() {
        *m = m.scale_real(s);
        *m1 = m1.scale_real(s);
    }

    let c_series: Vec<OperatorSeries> = noise
        .iter()
        .map(|(m, m1)| Ok(OperatorSeries::new(vec![m.clone(), m1.clone()])?.with_order(order)))
        .collect::<Result<_>>()?;

    // q_n: coefficients of Σ_β C_β(ε)†C_β(ε)
    let mut q = vec![ComplexMatrix::zeros(dim, dim); 2 * order + 1];
    for c in &c_series {
        for (i, a) in c.coefficients().iter().enumerate() {
            for (j, b) in c.coefficients().iter().enumerate() {
                q[i + j].add_scaled(&a.adjoint().matmul(b), ONE);
            }
        }
    }

    // X = Σ x_n ε^n, x_0 = 1, 2 x_n = −q_{n−1} − Σ_{k=1}^{n−1} x_k x_{n−k}
    let mut x = vec![ComplexMatrix::identity(dim)];
    for n in 1..=order {
        let mut rhs = q[n - 1].clone();
        for k in 1..n {
            rhs.add_scaled(&x[k].matmul(&x[n - k]), ONE);
        }
        x.push(rhs.scale_real(-0.5).hermitize());
    }
    let x = OperatorSeries::new(x)?;
    let b_series = kappas.iter().map(|&k| x.scale(k)).collect();

    LowNoiseChannel::new(
        dim,
        b_series,
        c_series,
        kappas,
        format!("random_lownoise:{seed}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in CATALOG_NAMES {
            let parsed: CatalogName = name.parse().unwrap();
            let shown = parsed.to_string();
            assert!(shown.starts_with(name));
        }
        assert_eq!(
            "random_lownoise:17".parse::<CatalogName>().unwrap(),
            CatalogName::RandomLowNoise { seed: 17 }
        );
        assert!(matches!(
            "bogus".parse::<CatalogName>(),
            Err(Error::Usage(_))
        ));
        assert!("random_lownoise:x".parse::<CatalogName>().is_err());
    }

    #[test]
    fn sqrt_coefficients() {
        let c: Vec<f64> = sqrt_one_minus(4).iter().map(|z| z.re).collect();
        assert_eq!(c, vec![1.0, -0.5, -0.125, -0.0625, -0.0390625]);
    }

    #[test]
    fn identity_at_order_zero() {
        let ch = catalog(&CatalogName::Identity, 2, 0).unwrap();
        assert_eq!(ch.b_series().len(), 1);
        assert_eq!(
            ch.b_series()[0].coefficients(),
            &[ComplexMatrix::identity(2)]
        );
        assert_eq!(ch.kappas(), &[ONE]);
    }

    #[test]
    fn depolarizing_noise_operators_resolve_identity() {
        for d in [2, 3] {
            let ch = catalog(&CatalogName::Depolarizing, d, 6).unwrap();
            let mut sum = ComplexMatrix::zeros(d, d);
            for m in ch.noise_operators() {
                sum.add_scaled(&m.adjoint().matmul(m), ONE);
            }
            assert!(
                sum.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-14,
                "d = {d}"
            );
        }
        let ch = catalog(&CatalogName::Depolarizing, 2, 6).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((ch.noise_operators()[0][(0, 1)].re - s).abs() < 1e-15);
        assert!((ch.noise_operators()[1][(1, 0)].im - s).abs() < 1e-15);
    }

    #[test]
    fn amplitude_damping_operator() {
        let ch = catalog(&CatalogName::AmplitudeDamping, 2, 6).unwrap();
        let m = ch.noise_operators()[0];
        assert_eq!(m[(0, 1)], ONE);
        let mm = m.adjoint().matmul(m);
        assert_eq!(mm, ComplexMatrix::from_real_diag(&[0.0, 1.0]));
    }

    #[test]
    fn every_catalog_channel_validates_in_several_dimensions() {
        for d in [2, 3, 4] {
            for name in CATALOG_NAMES {
                let ch = catalog(&name.parse().unwrap(), d, 6).unwrap();
                let r = ch.validate(&[1e-3, 1e-2, 0.1]).unwrap();
                assert!(r.passed, "{name} d={d}: {r:?}");
            }
        }
    }

    #[test]
    fn random_channels_are_seed_deterministic() {
        let a = random_lownoise(2, 6, 5).unwrap();
        let b = random_lownoise(2, 6, 5).unwrap();
        let c = random_lownoise(2, 6, 6).unwrap();
        assert_eq!(a.c_series(), b.c_series());
        assert_ne!(a.c_series(), c.c_series());
    }

    #[test]
    fn random_channel_near_identity_part_is_hermitian() {
        let ch = random_lownoise(3, 6, 11).unwrap();
        for (b, &k) in ch.b_series().iter().zip(ch.kappas()) {
            for coeff in &b.coefficients()[1..] {
                assert!(coeff.scale(k.inv()).is_hermitian());
            }
        }
    }

    #[test]
    fn dimension_one_is_rejected() {
        assert!(catalog(&CatalogName::Depolarizing, 1, 6).is_err());
    }
}
