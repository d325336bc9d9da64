//! Deterministic integration engines: Gauss–Legendre panels, a
//! composite-adaptive driver with declared breakpoints, and an independent
//! adaptive-Simpson rule used as a cross-check oracle.
//!
//! Half-line integrals are mapped through t = u/(1−u); integrands are always
//! supplied in their original coordinates and the Jacobian is applied here.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Integration domain. The half-line variant integrates over t ∈ [0,∞)
/// through the substitution t = u/(1−u).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    HalfLine,
}

impl Domain {
    pub fn unit_interval() -> Self {
        Domain::Interval { a: 0.0, b: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub enum Rule {
    /// Fixed Gauss–Legendre of the given order on every segment.
    GaussLegendre(usize),
    /// Bisection until each panel's error estimate fits its share of the
    /// relative budget.
    CompositeAdaptive { rel_tol: f64, max_depth: u32 },
}

#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub domain: Domain,
    /// Split points in original-domain coordinates; segments never straddle
    /// them, so integrand discontinuities must be declared here.
    pub breakpoints: Vec<f64>,
}

impl QuadratureSpec {
    pub fn adaptive(domain: Domain, rel_tol: f64) -> Self {
        QuadratureSpec {
            rule: Rule::CompositeAdaptive {
                rel_tol,
                max_depth: 60,
            },
            domain,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_breakpoints(mut self, pts: &[f64]) -> Self {
        self.breakpoints.extend_from_slice(pts);
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    /// Relative error estimate actually reached (0 for fixed rules).
    pub achieved_tol: f64,
    pub converged: bool,
}

/// Gauss–Legendre nodes and weights on [−1,1], generated by Newton iteration
/// on the Legendre recurrence. Nodes are exactly antisymmetric by mirroring.
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "rule order must be at least 2");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if math::abs(dx) < 1e-15 {
                    let (_, d2) = legendre(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// (node, weight) pair on the reference interval [−1,1].
    pub fn node(&self, i: usize) -> (f64, f64) {
        (self.nodes[i], self.weights[i])
    }

    /// ∫ₐᵇ g, single panel.
    pub fn panel<F: Fn(f64) -> f64>(&self, g: &F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(mid + half * x);
        }
        acc * half
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integration engine with cached nodes; construct once, reuse across many
/// integrands (per-eigenvalue quadratures share it).
pub struct Quadrature {
    spec: QuadratureSpec,
    gl: GaussLegendre,
}

/// Panel budget: hard cap on bisections so a hostile integrand cannot hang
/// the engine; overruns report `converged = false`.
const MAX_PANELS: usize = 40_000;

impl Quadrature {
    pub fn new(spec: QuadratureSpec) -> Self {
        let order = match spec.rule {
            Rule::GaussLegendre(n) => n,
            Rule::CompositeAdaptive { .. } => 16,
        };
        Quadrature {
            spec,
            gl: GaussLegendre::new(order),
        }
    }

    /// Integrate `f` (given in original-domain coordinates) over the
    /// configured domain.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> QuadResult {
        // Work coordinates: w ∈ [a,b] for intervals, u ∈ [0,1] for the
        // half-line with x = u/(1−u) and Jacobian (1−u)^−2.
        let (wa, wb) = match self.spec.domain {
            Domain::Interval { a, b } => (a, b),
            Domain::HalfLine => (0.0, 1.0),
        };
        let half_line = self.spec.domain == Domain::HalfLine;
        let g = |w: f64| -> f64 {
            if half_line {
                let om = 1.0 - w;
                f(w / om) / (om * om)
            } else {
                f(w)
            }
        };

        let mut cuts: Vec<f64> = self
            .spec
            .breakpoints
            .iter()
            .map(|&t| if half_line { t / (1.0 + t) } else { t })
            .filter(|&u| u > wa && u < wb)
            .collect();
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(wa);
        edges.extend_from_slice(&cuts);
        edges.push(wb);

        match self.spec.rule {
            Rule::GaussLegendre(_) => {
                let mut total = math::KahanSum::new();
                for seg in edges.windows(2) {
                    total.add(self.gl.panel(&g, seg[0], seg[1]));
                }
                QuadResult {
                    value: total.value(),
                    achieved_tol: 0.0,
                    converged: true,
                }
            }
            Rule::CompositeAdaptive { rel_tol, max_depth } => {
                self.adaptive(&g, &edges, rel_tol, max_depth)
            }
        }
    }

    fn adaptive<G: Fn(f64) -> f64>(
        &self,
        g: &G,
        edges: &[f64],
        rel_tol: f64,
        max_depth: u32,
    ) -> QuadResult {
        let span: f64 = edges[edges.len() - 1] - edges[0];
        // Coarse magnitude estimate fixes the absolute part of each panel's
        // budget; the |I₂| term handles panels that dominate the total.
        let mut scale = 0.0;
        for seg in edges.windows(2) {
            let m = 0.5 * (seg[0] + seg[1]);
            scale +=
                math::abs(self.gl.panel(g, seg[0], m)) + math::abs(self.gl.panel(g, m, seg[1]));
        }
        if scale == 0.0 {
            scale = 1e-300;
        }

        let mut total = math::KahanSum::new();
        let mut err_total = 0.0;
        let mut panels = 0usize;
        let mut converged = true;
        // LIFO stack keeps evaluation order (hence rounding) deterministic.
        let mut stack: Vec<(f64, f64, u32)> = Vec::new();
        for seg in edges.windows(2).rev() {
            stack.push((seg[0], seg[1], 0));
        }
        while let Some((a, b, depth)) = stack.pop() {
            panels += 1;
            if panels > MAX_PANELS {
                converged = false;
                total.add(self.gl.panel(g, a, b));
                for (ra, rb, _) in stack.drain(..) {
                    total.add(self.gl.panel(g, ra, rb));
                }
                break;
            }
            let m = 0.5 * (a + b);
            let whole = self.gl.panel(g, a, b);
            let left = self.gl.panel(g, a, m);
            let right = self.gl.panel(g, m, b);
            let fine = left + right;
            let err = math::abs(whole - fine);
            let budget = rel_tol * math::abs(fine) + rel_tol * scale * ((b - a) / span);
            // Noise floor: panels whose error is at rounding scale relative
            // to the whole integral cannot be improved by splitting.
            let budget = budget.max(1e-17 * scale);
            if err <= budget || m <= a || m >= b {
                total.add(fine);
                err_total += err;
            } else if depth >= max_depth {
                total.add(fine);
                err_total += err;
                converged = false;
            } else {
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
        let value = total.value();
        let achieved = err_total / math::abs(value).max(1e-300);
        QuadResult {
            value,
            achieved_tol: achieved,
            converged,
        }
    }
}

/// Adaptive Simpson on an interval: an engine with no shared code with the
/// Gauss–Legendre path, kept for two-rule agreement checks.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> QuadResult {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    struct Ctx<'c, F> {
        f: &'c F,
        evals: usize,
        converged: bool,
    }
    fn rec<F: Fn(f64) -> f64>(
        c: &mut Ctx<'_, F>,
        a: f64,
        m: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (c.f)(lm);
        let frm = (c.f)(rm);
        c.evals += 2;
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if math::abs(delta) <= 15.0 * tol || depth > 52 || c.evals > 4_000_000 {
            if math::abs(delta) > 15.0 * tol {
                c.converged = false;
            }
            left + right + delta / 15.0
        } else {
            rec(c, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + rec(c, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
        }
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, a, b);
    let mut ctx = Ctx {
        f,
        evals: 3,
        converged: true,
    };
    let value = rec(&mut ctx, a, m, b, fa, fm, fb, whole, tol, 0);
    QuadResult {
        value,
        achieved_tol: tol / math::abs(value).max(1e-300),
        converged: ctx.converged,
    }
}

/// Adaptive Simpson over [0,∞) through t = u/(1−u), split at the mapped
/// breakpoints. Endpoint evaluations are guarded: the mapped integrand is
/// taken as 0 where it is not finite (integrable endpoint singularities of
/// the Jacobian never contribute for decaying integrands).
pub fn adaptive_simpson_half_line<F: Fn(f64) -> f64>(
    f: &F,
    tol: f64,
    breakpoints: &[f64],
) -> QuadResult {
    let g = |u: f64| -> f64 {
        if u <= 0.0 {
            return guard(f(0.0));
        }
        if u >= 1.0 {
            return 0.0;
        }
        let om = 1.0 - u;
        guard(f(u / om) / (om * om))
    };
    let mut edges = vec![0.0];
    let mut cuts: Vec<f64> = breakpoints.iter().map(|&t| t / (1.0 + t)).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    edges.extend(cuts.into_iter().filter(|&u| u > 0.0 && u < 1.0));
    edges.push(1.0);
    let mut value = 0.0;
    let mut achieved: f64 = 0.0;
    let mut converged = true;
    for seg in edges.windows(2) {
        let r = adaptive_simpson(&g, seg[0], seg[1], tol / edges.len() as f64);
        value += r.value;
        achieved = achieved.max(r.achieved_tol);
        converged &= r.converged;
    }
    QuadResult {
        value,
        achieved_tol: achieved,
        converged,
    }
}

fn guard(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}
