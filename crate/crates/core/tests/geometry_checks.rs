//! Cross-validation of the chart geometry: the two-point distance formula
//! against a sphere embedding and against explicit path integrals, and the
//! radial profile identities.

use tzl_core::geometry::{
    disc_volume, fs_cdf, fs_density, fs_distance, fs_norm, ChartPoint, MAX_RADIUS,
};
use tzl_core::math;
use tzl_core::quad::{adaptive_simpson, GaussLegendre};
use tzl_core::rng::Stream;
use tzl_core::Complex64;

use approx::assert_relative_eq;

/// Unit-sphere image of a chart point under inverse stereographic
/// projection; the pole maps to (0,0,1).
fn embed(z: ChartPoint) -> [f64; 3] {
    match z.to_complex() {
        None => [0.0, 0.0, 1.0],
        Some(c) => {
            let t = c.norm_sqr();
            [
                2.0 * c.re / (1.0 + t),
                2.0 * c.im / (1.0 + t),
                (t - 1.0) / (1.0 + t),
            ]
        }
    }
}

/// Independent distance: the central angle on the embedded sphere, scaled
/// so antipodes sit at √π/2.
fn embedded_distance(z: ChartPoint, w: ChartPoint) -> f64 {
    let a = embed(z);
    let b = embed(w);
    let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
    math::acos(dot) / (2.0 * math::SQRT_PI)
}

fn random_point(st: &mut Stream) -> ChartPoint {
    let r = st.uniform01();
    if r < 0.05 {
        ChartPoint::infinity()
    } else {
        let scale = math::exp(6.0 * (st.uniform01() - 0.5));
        ChartPoint::new(
            scale * (st.uniform01() - 0.5),
            scale * (st.uniform01() - 0.5),
        )
    }
}

#[test]
fn distance_matches_sphere_embedding() {
    let mut st = Stream::for_trial(17, 0);
    for _ in 0..500 {
        let z = random_point(&mut st);
        let w = random_point(&mut st);
        let d1 = fs_distance(z, w);
        let d2 = embedded_distance(z, w);
        assert_relative_eq!(d1, d2, max_relative = 1e-11, epsilon = 1e-12);
    }
}

#[test]
fn distance_matches_geodesic_path_integral() {
    // The rotation moving z to the origin sends w to m(w) = (w−z)/(1+z̄w);
    // the pullback of the radial segment to m(w) is the geodesic between z
    // and w. Its length under ds = |dz|/(√π(1+|z|²)) must equal the closed
    // formula.
    let pairs = [
        (Complex64::new(0.3, -0.4), Complex64::new(1.2, 0.7)),
        (Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)),
        (Complex64::new(-1.5, 0.2), Complex64::new(-1.4, 0.1)),
        (Complex64::new(5.0, 5.0), Complex64::new(-0.2, 0.1)),
    ];
    for (z, w) in pairs {
        let mw = (w - z) / (Complex64::new(1.0, 0.0) + z.conj() * w);
        // γ(t) = m⁻¹(t·m(w)), m⁻¹(ζ) = (ζ+z)/(1−z̄ζ).
        let gamma = |t: f64| -> Complex64 {
            let zeta = mw * t;
            (zeta + z) / (Complex64::new(1.0, 0.0) - z.conj() * zeta)
        };
        let speed = |t: f64| -> f64 {
            let h = 1e-6;
            let d = (gamma(t + h) - gamma(t - h)) / (2.0 * h);
            let g = gamma(t);
            d.norm() / (math::SQRT_PI * (1.0 + g.norm_sqr()))
        };
        let length = adaptive_simpson(&speed, 0.0, 1.0, 1e-11).value;
        let d = fs_distance(ChartPoint::from_complex(z), ChartPoint::from_complex(w));
        assert_relative_eq!(length, d, max_relative = 1e-8);
    }
}

#[test]
fn triangle_inequality_on_random_triples() {
    let mut st = Stream::for_trial(18, 0);
    for _ in 0..300 {
        let a = random_point(&mut st);
        let b = random_point(&mut st);
        let c = random_point(&mut st);
        let ab = fs_distance(a, b);
        let bc = fs_distance(b, c);
        let ac = fs_distance(a, c);
        assert!(ac <= ab + bc + 1e-12, "{ac} > {ab} + {bc}");
    }
}

#[test]
fn radial_profile_identities() {
    // ∫ψ = 1 over the full radius range.
    let gl = GaussLegendre::new(64);
    let mut total = 0.0;
    let half = MAX_RADIUS / 2.0;
    for i in 0..64 {
        let (x, w) = gl.node(i);
        total += w * half * fs_density(half + half * x).unwrap();
    }
    assert_relative_eq!(total, 1.0, max_relative = 1e-12);
    // Ψ′ = ψ by central differences.
    for r in [0.1, 0.3, 0.5, 0.7, 0.85] {
        let h = 1e-6;
        let fd = (fs_cdf(r + h).unwrap() - fs_cdf(r - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(fd, fs_density(r).unwrap(), max_relative = 1e-6);
    }
    // Vol(𝔻(0,ρ)) = Ψ(fs_norm(ρ)): both are ρ²/(1+ρ²).
    for rho in [0.0, 0.2, 1.0, 3.0, 50.0] {
        let lhs = disc_volume(rho).unwrap();
        let rhs = fs_cdf(fs_norm(ChartPoint::new(rho, 0.0))).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-15);
    }
}
