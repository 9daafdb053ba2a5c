//! Seeded test maps `ℝᵏ → Hⁿ` on grids.
//!
//! Contact families:
//! * grid-line lifts of `u = c + Σₘ gₘ(x) vₘ` with `{vₘ}` spanning a random
//!   isotropic subspace and smooth scalar fields `gₘ`;
//! * quadratic maps `a * Φ(Ψ(φ(x)))` with `Ψ(s) = (s, Qs + c, 2c·s)`;
//! * Lagrangian graphs `p ↦ (p, ∇h(p), 4h − 2p·∇h)` of cubic `h` in the
//!   first `j` coordinates.
//!
//! For all three the central-difference Jacobian has rank at most the
//! isotropic dimension up to rounding, not just up to `O(h²)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contact::SampledMap;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::heisenberg::omega;
use crate::symplectic::{isometry_between_isotropic, random_isotropic, HIsometry};

#[derive(Debug, Clone, Serialize)]
pub struct GeneratedMap {
    pub name: String,
    pub map: SampledMap,
}

fn cube(k: usize) -> Vec<[f64; 2]> {
    vec![[-1.0, 1.0]; k]
}

fn check_dims(k: usize, n: usize) -> Result<()> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("need k, n ≥ 1 (k = {k}, n = {n})")));
    }
    Ok(())
}

/// Samples the planar map `u` and fills `t` by exact segment lifts along
/// grid lines: the grid point `i` is reached from `i − eₐ` where `a` is
/// the first axis with `iₐ > 0`. Lines along the first axis are therefore
/// lifted last, starting from the face `i₁ = 0`.
pub fn grid_line_lift<F>(
    n: usize,
    bounds: Vec<[f64; 2]>,
    shape: Vec<usize>,
    exec: Exec,
    u: F,
) -> Result<SampledMap>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
{
    let mut m = SampledMap::from_fn(n, bounds, shape, exec, |x| {
        let mut z = u(x);
        assert_eq!(z.len(), 2 * n, "planar map must return 2n coordinates");
        z.push(0.0);
        z
    })?;
    let s = m.stride();
    let strides: Vec<usize> = (0..m.k())
        .map(|a| m.shape()[a + 1..].iter().product())
        .collect();
    let len = m.len();
    for f in 1..len {
        let idx = m.multi_index(f);
        let a = idx.iter().position(|&i| i > 0).expect("f > 0");
        let prev = f - strides[a];
        let v = m.values_mut();
        let t = v[prev * s + s - 1]
            - 2.0 * omega(&v[prev * s..prev * s + s - 1], &v[f * s..f * s + s - 1]);
        v[f * s + s - 1] = t;
    }
    Ok(m)
}

/// Random smooth scalar field on ℝᵏ.
#[derive(Debug, Clone)]
struct Field {
    amp: Vec<f64>,
    freq: Vec<f64>,
    phase: Vec<f64>,
    lin: Vec<f64>,
}

impl Field {
    fn random(k: usize, rng: &mut impl Rng) -> Self {
        Field {
            amp: (0..k).map(|_| rng.random_range(-0.6..0.6)).collect(),
            freq: (0..k).map(|_| rng.random_range(0.5..2.0)).collect(),
            phase: (0..k).map(|_| rng.random_range(0.0..6.0)).collect(),
            lin: (0..k).map(|_| rng.random_range(-1.0..1.0)).collect(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for a in 0..x.len() {
            s += self.lin[a] * x[a] + self.amp[a] * (self.freq[a] * x[a] + self.phase[a]).sin();
        }
        s
    }
}

/// Grid-line lift of `u = c + Σₘ gₘ(x) vₘ` over a random isotropic
/// subspace of dimension `j`.
pub fn isotropic_lift_map(k: usize, n: usize, j: usize, size: usize, seed: u64) -> Result<SampledMap> {
    check_dims(k, n)?;
    if j > n {
        return Err(Error::InvalidArgument(format!("isotropic dimension {j} > n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = random_isotropic(n, j, &mut rng);
    let c: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-0.5..0.5)).collect();
    let fields: Vec<Field> = (0..j).map(|_| Field::random(k, &mut rng)).collect();
    let basis = v.basis().to_vec();
    grid_line_lift(n, cube(k), vec![size; k], Exec::default(), move |x| {
        let mut z = c.clone();
        for (f, b) in fields.iter().zip(&basis) {
            let g = f.eval(x);
            z.iter_mut().zip(b).for_each(|(zi, bi)| *zi += g * bi);
        }
        z
    })
}

/// Random `Φ` in `U(n)` and left translation `a`.
fn random_motion(n: usize, rng: &mut impl Rng) -> (HIsometry, Vec<f64>, f64) {
    let v = random_isotropic(n, n, rng);
    let w = random_isotropic(n, n, rng);
    let phi = isometry_between_isotropic(&v, &w).expect("Lagrangians of equal dimension");
    let az = (0..2 * n).map(|_| rng.random_range(-0.5..0.5)).collect();
    (phi, az, rng.random_range(-0.5..0.5))
}

/// `a * (Φz, t)` for the point `(z, t)`.
fn apply_motion(motion: &(HIsometry, Vec<f64>, f64), z: &[f64], t: f64) -> Vec<f64> {
    let (phi, az, at) = motion;
    let mut out = phi.apply_vec(z);
    let w = omega(az, &out);
    out.iter_mut().zip(az).for_each(|(o, a)| *o += a);
    out.push(at + t - 2.0 * w);
    out
}

/// `a * Φ(Ψ_Q(φ(x)))` with `φ: ℝᵏ → ℝⁿ` quadratic and
/// `Ψ_Q(s) = (x = s, y = Qs + c, t = 2c·s)`, `Q` symmetric.
pub fn quadratic_contact_map(k: usize, n: usize, size: usize, seed: u64) -> Result<SampledMap> {
    check_dims(k, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lin: Vec<f64> = (0..n * k).map(|_| rng.random_range(-1.0..1.0)).collect();
    let quad: Vec<f64> = (0..n * k * k).map(|_| rng.random_range(-0.3..0.3)).collect();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-0.5..0.5);
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    let motion = random_motion(n, &mut rng);
    SampledMap::from_fn(n, cube(k), vec![size; k], Exec::default(), move |x| {
        let s: Vec<f64> = (0..n)
            .map(|i| {
                let mut v = 0.0;
                for a in 0..k {
                    v += lin[i * k + a] * x[a];
                    for b in 0..k {
                        v += quad[(i * k + a) * k + b] * x[a] * x[b];
                    }
                }
                v
            })
            .collect();
        let mut z = Vec::with_capacity(2 * n);
        let mut t = 0.0;
        for i in 0..n {
            let y: f64 = (0..n).map(|j| q[i * n + j] * s[j]).sum::<f64>() + c[i];
            z.push(s[i]);
            z.push(y);
            t += 2.0 * c[i] * s[i];
        }
        apply_motion(&motion, &z, t)
    })
}

/// Graph of the gradient of a random cubic `h` in the first `j` domain
/// coordinates, composed with a random isometry and translation; constant
/// along the remaining `k − j` axes.
pub fn lagrangian_graph_map(k: usize, n: usize, j: usize, size: usize, seed: u64) -> Result<SampledMap> {
    check_dims(k, n)?;
    if j == 0 || j > n.min(k) {
        return Err(Error::InvalidArgument(format!(
            "graph dimension {j} must lie in 1..={}",
            n.min(k)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // h(p) = Σ aᵢ pᵢ + Σ bᵢₗ pᵢ pₗ + Σ cᵢₗₘ pᵢ pₗ pₘ
    let a: Vec<f64> = (0..j).map(|_| rng.random_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..j * j).map(|_| rng.random_range(-0.4..0.4)).collect();
    let cc: Vec<f64> = (0..j * j * j).map(|_| rng.random_range(-0.2..0.2)).collect();
    let motion = random_motion(n, &mut rng);
    SampledMap::from_fn(n, cube(k), vec![size; k], Exec::default(), move |x| {
        let p = &x[..j];
        let mut h = 0.0;
        let mut grad = vec![0.0; j];
        for i in 0..j {
            h += a[i] * p[i];
            grad[i] += a[i];
            for l in 0..j {
                let bv = b[i * j + l];
                h += bv * p[i] * p[l];
                grad[i] += bv * p[l];
                grad[l] += bv * p[i];
                for m in 0..j {
                    let cv = cc[(i * j + l) * j + m];
                    h += cv * p[i] * p[l] * p[m];
                    grad[i] += cv * p[l] * p[m];
                    grad[l] += cv * p[i] * p[m];
                    grad[m] += cv * p[i] * p[l];
                }
            }
        }
        let mut z = vec![0.0; 2 * n];
        let mut pg = 0.0;
        for i in 0..j {
            z[2 * i] = p[i];
            z[2 * i + 1] = grad[i];
            pg += p[i] * grad[i];
        }
        apply_motion(&motion, &z, 4.0 * h - 2.0 * pg)
    })
}

/// Grid-line lift of a curved planar map into H¹: `u = (cos g, sin g)`
/// with `g = x₁ + ½x₂² + 0.3 sin(x₁x₂)`. Chords of the image circle sweep
/// slightly less area than the arcs, and the deficit varies across lines,
/// so the interior contact residual is nonzero. It is bounded by `C·h` and
/// in fact decays like `h²`.
pub fn curved_lift_map(size: usize) -> Result<SampledMap> {
    grid_line_lift(1, cube(2), vec![size; 2], Exec::default(), |x| {
        let g = x[0] + 0.5 * x[1] * x[1] + 0.3 * (x[0] * x[1]).sin();
        vec![g.cos(), g.sin()]
    })
}

/// `x ↦ ((x₁, x₂, 0, …), 0)`: pullback `M₁₂ = 1`.
pub fn identity_plane_map(k: usize, n: usize, size: usize) -> Result<SampledMap> {
    check_dims(k, n)?;
    if k < 2 {
        return Err(Error::InvalidArgument("identity plane needs k ≥ 2".into()));
    }
    SampledMap::from_fn(n, cube(k), vec![size; k], Exec::default(), move |x| {
        let mut v = vec![0.0; 2 * n + 1];
        v[0] = x[0];
        v[1] = x[1];
        v
    })
}

/// A smooth non-contact map whose `x₁y₁` pullback does not vanish near the
/// origin.
pub fn twisted_control_map(k: usize, n: usize, size: usize, seed: u64) -> Result<SampledMap> {
    check_dims(k, n)?;
    if k < 2 {
        return Err(Error::InvalidArgument("control maps need k ≥ 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s1 = rng.random_range(0.1..0.3);
    let s2 = rng.random_range(0.1..0.3);
    let tilt = rng.random_range(-0.5..0.5);
    let extra: Vec<Field> = (0..2 * n - 2).map(|_| Field::random(k, &mut rng)).collect();
    SampledMap::from_fn(n, cube(k), vec![size; k], Exec::default(), move |x| {
        let mut v = Vec::with_capacity(2 * n + 1);
        v.push(x[0] + s1 * x[1].sin());
        v.push(x[1] + s2 * x[0] * x[0]);
        v.extend(extra.iter().map(|f| 0.2 * f.eval(x)));
        v.push(tilt * x[0] * x[1]);
        v
    })
}

/// `x ↦ ((0, …, 0), x₁)`.
pub fn pure_t_map(k: usize, n: usize, size: usize) -> Result<SampledMap> {
    check_dims(k, n)?;
    SampledMap::from_fn(n, cube(k), vec![size; k], Exec::default(), move |x| {
        let mut v = vec![0.0; 2 * n + 1];
        v[2 * n] = x[0];
        v
    })
}

/// `x ↦ ((x₁, 0, …), 0)`, isometric along the first axis.
pub fn isotropic_axis_map(k: usize, n: usize, size: usize) -> Result<SampledMap> {
    check_dims(k, n)?;
    SampledMap::from_fn(n, cube(k), vec![size; k], Exec::default(), move |x| {
        let mut v = vec![0.0; 2 * n + 1];
        v[0] = x[0];
        v
    })
}

/// Grid size per axis: at least 65, capped so the grid has at most 10⁶
/// points.
pub fn suite_grid_size(k: usize) -> usize {
    let mut s = 65;
    while (s as f64).powi(k as i32) > 1e6 {
        s -= 1;
    }
    s
}

/// The `(k, n)` pairs of the contact suite.
pub const SUITE_DIMS: [(usize, usize); 4] = [(2, 1), (3, 1), (3, 2), (4, 2)];

/// Contact maps for `(k, n)`: isotropic lifts of every dimension `1..=n`
/// (two of dimension `n`), two quadratic maps and a Lagrangian graph.
pub fn contact_family(k: usize, n: usize, size: usize, seed: u64) -> Result<Vec<GeneratedMap>> {
    let mut out = Vec::new();
    let mut next = seed;
    let mut bump = || {
        next = next.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        next
    };
    for j in 1..=n {
        let copies = if j == n { 2 } else { 1 };
        for r in 0..copies {
            out.push(GeneratedMap {
                name: format!("isotropic_lift_k{k}_n{n}_j{j}_{r}"),
                map: isotropic_lift_map(k, n, j, size, bump())?,
            });
        }
    }
    for r in 0..2 {
        out.push(GeneratedMap {
            name: format!("quadratic_k{k}_n{n}_{r}"),
            map: quadratic_contact_map(k, n, size, bump())?,
        });
    }
    let j = n.min(k);
    out.push(GeneratedMap {
        name: format!("lagrangian_graph_k{k}_n{n}_j{j}"),
        map: lagrangian_graph_map(k, n, j, size, bump())?,
    });
    Ok(out)
}

/// The full contact suite over [`SUITE_DIMS`] at [`suite_grid_size`].
pub fn contact_suite(seed: u64) -> Result<Vec<GeneratedMap>> {
    let mut out = Vec::new();
    for (i, &(k, n)) in SUITE_DIMS.iter().enumerate() {
        out.extend(contact_family(k, n, suite_grid_size(k), seed.wrapping_add(i as u64 * 1000))?);
    }
    Ok(out)
}

/// Non-contact controls for `(k, n)`.
pub fn control_family(k: usize, n: usize, size: usize, seed: u64) -> Result<Vec<GeneratedMap>> {
    Ok(vec![
        GeneratedMap {
            name: format!("identity_plane_k{k}_n{n}"),
            map: identity_plane_map(k, n, size)?,
        },
        GeneratedMap {
            name: format!("twisted_k{k}_n{n}"),
            map: twisted_control_map(k, n, size, seed)?,
        },
    ])
}
