//! Two-rule agreement on the spectral integrands.
//!
//! Every eigenvalue is a half-line integral
//!   λ_j = (p+1) C(p,j) ∫₀^∞ f(√t) t^j (1+t)^{−(p+2)} dt,
//! and the engine offers two routes with no shared code: composite
//! Gauss–Legendre (order 64, fixed panels) and recursive adaptive Simpson.
//! These tests pin the routes against each other and against the
//! closed-form spectra across every built-in radial symbol family up to
//! p = 100.

use tzl_core::math;
use tzl_core::quad::{adaptive_simpson_half_line, Domain, Quadrature, QuadratureSpec, Rule};
use tzl_core::spectra::{spectrum, Symbol};

/// Panel edges for the fixed rule: the symbol's own kinks plus a dyadic
/// ladder. On each dyadic panel every built-in profile is analytic with
/// scale-bounded derivatives (e^{−1/t} is self-similar under t → 2t), so
/// order-64 panels integrate to near machine precision; for polynomial
/// integrands (constant and power symbols in u = t/(1+t)) the rule is exact
/// regardless of the splits.
fn panel_breakpoints(symbol: &Symbol) -> Vec<f64> {
    let mut pts = symbol.breakpoints_t();
    // The deep end matters for profiles linear in ρ = √t, whose derivative
    // blows up at t = 0: the region below 2^−40 contributes ≲ 1e−18 of any
    // eigenvalue, so the kink never meets a wide panel.
    for k in -40..=20 {
        pts.push(math::exp2i(k));
    }
    pts
}

/// The integrand in t-coordinates with the log prefactor folded in, so the
/// integral is λ_j itself and both rules work at its native scale.
fn lambda_integrand(symbol: &Symbol, p: usize, j: usize) -> impl Fn(f64) -> f64 + '_ {
    let ln_pref = math::ln((p + 1) as f64) + math::ln_binomial(p, j);
    let jf = j as f64;
    let pf = p as f64;
    move |t: f64| {
        let f = symbol.eval_radial(math::sqrt(t)).expect("radial symbol");
        if f == 0.0 {
            return 0.0;
        }
        let log_weight = if t == 0.0 {
            if j == 0 {
                0.0
            } else {
                return 0.0;
            }
        } else {
            jf * math::ln(t)
        };
        f * math::exp(ln_pref + log_weight - (pf + 2.0) * math::ln_1p(t))
    }
}

fn builtin_symbols() -> Vec<Symbol> {
    vec![
        Symbol::Constant(1.0),
        Symbol::PowerVanish(1),
        Symbol::PowerVanish(3),
        Symbol::ExpInverse,
        Symbol::DiscIndicator(1.0),
        Symbol::DiscIndicator(0.5),
    ]
}

const DEGREES: [usize; 4] = [1, 10, 50, 100];

#[test]
fn gauss_legendre_matches_closed_spectra() {
    // Full eigenvalue sweep: the fixed rule reproduces every λ_j of every
    // built-in family. The closed routes share nothing with it (products,
    // binomial tail sums, and for exp(−1/ρ²) an adaptive quadrature of the
    // inverted integrand e^{−s} s^{p−j} (1+s)^{−(p+2)}).
    for symbol in builtin_symbols() {
        let cuts = panel_breakpoints(&symbol);
        for p in DEGREES {
            let reference = spectrum(&symbol, p).unwrap();
            for j in 0..=p {
                let spec = QuadratureSpec {
                    rule: Rule::GaussLegendre(64),
                    domain: Domain::HalfLine,
                    breakpoints: cuts.clone(),
                };
                let got = Quadrature::new(spec).integrate(lambda_integrand(&symbol, p, j));
                assert!(got.converged);
                let want = reference.lambdas[j];
                let gap = math::abs(got.value - want) / want.max(got.value);
                assert!(
                    gap <= 1e-8,
                    "{symbol} p={p} j={j}: GL {} vs closed {} (rel gap {gap:e})",
                    got.value,
                    want
                );
            }
        }
    }
}

#[test]
fn simpson_agrees_with_gauss_legendre_on_spectral_integrands() {
    // The shared-nothing cross-check. Simpson's tolerance is absolute, so it
    // is scaled by the GL value; the agreement budget sits three orders
    // above both engines' reported tolerances.
    for symbol in builtin_symbols() {
        let cuts = panel_breakpoints(&symbol);
        for p in DEGREES {
            let reference = spectrum(&symbol, p).unwrap();
            let mut js = vec![0, p.div_ceil(4), p / 2, p.saturating_sub(1), p];
            js.sort_unstable();
            js.dedup();
            for j in js {
                let f = lambda_integrand(&symbol, p, j);
                let spec = QuadratureSpec {
                    rule: Rule::GaussLegendre(64),
                    domain: Domain::HalfLine,
                    breakpoints: cuts.clone(),
                };
                let gl = Quadrature::new(spec).integrate(&f);
                // The Simpson budget is absolute; 1e−10 of the value keeps
                // the per-segment share above f64 rounding noise on the
                // dominant panel even after splitting across the ladder.
                let si = adaptive_simpson_half_line(&f, 1e-10 * gl.value.abs(), &cuts);
                assert!(
                    si.converged,
                    "{symbol} p={p} j={j}: Simpson did not converge"
                );
                let scale = gl.value.abs().max(si.value.abs());
                let gap = math::abs(gl.value - si.value) / scale;
                assert!(
                    gap <= 1e-9,
                    "{symbol} p={p} j={j}: GL {} vs Simpson {} (rel gap {gap:e})",
                    gl.value,
                    si.value
                );
                let want = reference.lambdas[j];
                let gap = math::abs(si.value - want) / want.max(si.value);
                assert!(
                    gap <= 1e-8,
                    "{symbol} p={p} j={j}: Simpson vs closed (rel gap {gap:e})"
                );
            }
        }
    }
}

#[test]
fn tabulated_routes_cover_exact_profiles() {
    // Piecewise-linear tables are represented exactly by the tabulated
    // symbol, so they exercise the generic adaptive route with no
    // interpolation error in the way.

    // A constant table is the identity operator: every eigenvalue is 1.
    let flat = Symbol::RadialTabulated(tzl_core::spectra::RadialTable {
        radii: vec![0.0, 1.0, 2.0],
        values: vec![1.0, 1.0, 1.0],
    });
    for p in DEGREES {
        let s = spectrum(&flat, p).unwrap();
        for (j, &l) in s.lambdas.iter().enumerate() {
            let gap = math::abs(l - 1.0);
            assert!(gap <= 1e-10, "flat table p={p} j={j}: λ = {l}");
        }
    }

    // A tent profile has a kink; its knots are declared breakpoints, so
    // both rules see piecewise-smooth panels and must agree.
    let tent = Symbol::RadialTabulated(tzl_core::spectra::RadialTable {
        radii: vec![0.0, 1.0, 3.0],
        values: vec![1.0, 0.2, 0.0],
    });
    let cuts = panel_breakpoints(&tent);
    for p in DEGREES {
        for j in [0, p / 2, p] {
            let f = lambda_integrand(&tent, p, j);
            let spec = QuadratureSpec {
                rule: Rule::GaussLegendre(64),
                domain: Domain::HalfLine,
                breakpoints: cuts.clone(),
            };
            let gl = Quadrature::new(spec).integrate(&f);
            let si = adaptive_simpson_half_line(&f, 1e-10 * gl.value.abs(), &cuts);
            assert!(si.converged);
            let gap = math::abs(gl.value - si.value) / gl.value.abs().max(si.value.abs());
            assert!(gap <= 1e-9, "tent p={p} j={j}: rel gap {gap:e}");
        }
    }
}
