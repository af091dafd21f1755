//! Brute-force Bloch-ball and Bloch-sphere search for qubit leading
//! coefficients. Uses only the order-0 noise operators and scalar trace
//! arithmetic, so it shares no code with the optimizers.

use lownoise::LowNoiseChannel;
use num_complex::Complex64;

/// `F(r) = ½(p₀ + r·p) − Σ_β |½(m₀ + r·m)|²` for `ρ = (1 + r·σ)/2`.
pub struct QubitFunctional {
    p0: f64,
    p: [f64; 3],
    m: Vec<(Complex64, [Complex64; 3])>,
}

fn pauli_traces(a: &[Complex64]) -> (Complex64, [Complex64; 3]) {
    // a is row-major 2x2; Tr(Aσ) for σ = 1, x, y, z
    let i = Complex64::i();
    (a[0] + a[3], [a[1] + a[2], i * a[1] - i * a[2], a[0] - a[3]])
}

impl QubitFunctional {
    pub fn new(ch: &LowNoiseChannel) -> Self {
        assert_eq!(ch.dim(), 2, "Bloch oracle is for qubits only");
        let mut p0 = 0.0;
        let mut p = [0.0; 3];
        let mut m = Vec::new();
        for op in ch.noise_operators() {
            let a = op.as_slice();
            let gram = [
                a[0].conj() * a[0] + a[2].conj() * a[2],
                a[0].conj() * a[1] + a[2].conj() * a[3],
                a[1].conj() * a[0] + a[3].conj() * a[2],
                a[1].conj() * a[1] + a[3].conj() * a[3],
            ];
            let (g0, g) = pauli_traces(&gram);
            p0 += g0.re;
            for k in 0..3 {
                p[k] += g[k].re;
            }
            m.push(pauli_traces(a));
        }
        Self { p0, p, m }
    }

    pub fn value(&self, r: [f64; 3]) -> f64 {
        let dot = |v: [f64; 3]| v[0] * r[0] + v[1] * r[1] + v[2] * r[2];
        let mut f = 0.5 * (self.p0 + dot(self.p));
        for (m0, mk) in &self.m {
            let t = 0.5 * (m0 + mk[0] * r[0] + mk[1] * r[1] + mk[2] * r[2]);
            f -= t.norm_sqr();
        }
        f
    }
}

/// Grid over the Bloch ball with step 0.01, followed by successively finer
/// local grids around the best point.
pub fn ball_maximum(f: &QubitFunctional) -> f64 {
    let mut best = ([0.0; 3], f64::NEG_INFINITY);
    let n = 100i32;
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let r = [
                    i as f64 / n as f64,
                    j as f64 / n as f64,
                    k as f64 / n as f64,
                ];
                if r[0] * r[0] + r[1] * r[1] + r[2] * r[2] <= 1.0 {
                    let v = f.value(r);
                    if v > best.1 {
                        best = (r, v);
                    }
                }
            }
        }
    }
    let mut h = 0.01;
    for _ in 0..6 {
        h *= 0.1;
        let center = best.0;
        for i in -15..=15 {
            for j in -15..=15 {
                for k in -15..=15 {
                    let r = [
                        center[0] + i as f64 * h,
                        center[1] + j as f64 * h,
                        center[2] + k as f64 * h,
                    ];
                    if r[0] * r[0] + r[1] * r[1] + r[2] * r[2] <= 1.0 {
                        let v = f.value(r);
                        if v > best.1 {
                            best = (r, v);
                        }
                    }
                }
            }
        }
    }
    best.1
}

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// Grid over the Bloch sphere in 1° steps, followed by finer local grids.
pub fn sphere_maximum(f: &QubitFunctional) -> f64 {
    let deg = std::f64::consts::PI / 180.0;
    let mut best = ((0.0, 0.0), f64::NEG_INFINITY);
    for i in 0..=180 {
        for j in 0..360 {
            let (theta, phi) = (i as f64 * deg, j as f64 * deg);
            let v = f.value(sphere_point(theta, phi));
            if v > best.1 {
                best = ((theta, phi), v);
            }
        }
    }
    let mut h = deg;
    for _ in 0..7 {
        h *= 0.1;
        let (t0, p0) = best.0;
        for i in -15..=15 {
            for j in -15..=15 {
                let (theta, phi) = (t0 + i as f64 * h, p0 + j as f64 * h);
                let v = f.value(sphere_point(theta, phi));
                if v > best.1 {
                    best = ((theta, phi), v);
                }
            }
        }
    }
    best.1
}
