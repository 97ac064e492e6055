#include "lognls/functionals.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <mutex>

namespace lognls {

namespace {

double psi(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

// Exponential partition of unity: S(0) = 0, S(1) = 1, C-infinity.
double partition_s(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = psi(s);
    const double b = psi(1.0 - s);
    return a / (a + b);
}

// chi' on x >= 0; even in x.
double ramp(double t) {
    if (t <= 0.5) return 1.0;
    if (t >= 1.5) return 0.0;
    return 1.0 - partition_s(t - 0.5);
}

// 20-point Gauss-Legendre nodes/weights on [0, 1].
constexpr int kGL = 10;
constexpr double kGLNode[kGL] = {
    0.013046735741414128, 0.067468316655507744, 0.160295215850487793,
    0.283302302935376393, 0.425562830509184394, 0.574437169490815606,
    0.716697697064623607, 0.839704784149512207, 0.932531683344492256,
    0.986953264258585872};
constexpr double kGLWeight[kGL] = {
    0.033335672154344069, 0.074725674575290297, 0.109543181257991022,
    0.134633359654998177, 0.147762112357376435, 0.147762112357376435,
    0.134633359654998177, 0.109543181257991022, 0.074725674575290297,
    0.033335672154344069};

// int_{lo}^{hi} ramp, composite Gauss-Legendre with panels <= 1/16.
double ramp_integral(double lo, double hi) {
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.0625)));
    const double w = (hi - lo) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double base = lo + p * w;
        double s = 0.0;
        for (int q = 0; q < kGL; ++q) s += kGLWeight[q] * ramp(base + w * kGLNode[q]);
        acc += w * s;
    }
    return acc;
}

double chi_positive(double x) {
    if (x <= 0.5) return x;
    if (x >= 1.5) return 1.0;
    // quadrature roundoff must not push chi past the plateau value
    return std::min(1.0, 0.5 + ramp_integral(0.5, x));
}

} // namespace

double chi_eval(double x) {
    const double y = chi_positive(std::abs(x));
    return x < 0.0 ? -y : y;
}

double chi_prime(double x) { return ramp(std::abs(x)); }

double xfrak_eval(double x) {
    const double ax = std::abs(x);
    if (ax <= 0.5) return 1.0;  // chi(x) = x there
    return chi_positive(ax) / ax;
}

double xfrak_prime(double x) {
    const double ax = std::abs(x);
    if (ax <= 0.5) return 0.0;
    // Xfrak is even; d/dx picks up the sign of x.
    const double d = (ramp(ax) * ax - chi_positive(ax)) / (ax * ax);
    return x < 0.0 ? -d : d;
}

double xfrak_floor(double a) {
    // Xfrak is even and nonincreasing on [0, inf) (chi is concave there),
    // so the infimum over [-a, a] sits at the endpoints.
    return xfrak_eval(a);
}

const CutoffSpec& cutoff_spec() {
    static std::once_flag flag;
    static CutoffSpec spec;
    std::call_once(flag, [] {
        const int n = 100000;
        double sup_c = 0.0, sup_cp = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = -4.0 + 8.0 * i / n;
            sup_c = std::max(sup_c, std::abs(chi_eval(x)));
            sup_cp = std::max(sup_cp, std::abs(chi_prime(x)));
        }
        spec.sup_abs_chi = sup_c;
        spec.sup_abs_chi_prime = sup_cp;
        spec.c_chi = xfrak_floor(16.0);
    });
    return spec;
}

CutoffOnGrid::CutoffOnGrid(const GridPtr& g) : grid(g) {
    const std::size_t n = g->n;
    chi.resize(n);
    chi_prime.resize(n);
    xfrak.resize(n);
    xfrak_prime.resize(n);
    log_xfrak.resize(n);
    v1_bracket.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = g->nodes[j];
        chi[j] = chi_eval(x);
        chi_prime[j] = lognls::chi_prime(x);
        xfrak[j] = xfrak_eval(x);
        xfrak_prime[j] = lognls::xfrak_prime(x);
        log_xfrak[j] = std::log(xfrak[j]);
        const double ax = std::abs(x);
        v1_bracket[j] = (ax <= 0.5 || ax >= 1.5)
                            ? 0.0
                            : chi_prime[j] / xfrak[j] - 1.0 - x * xfrak_prime[j] / xfrak[j];
    }
}

double phi_log(Complex w) {
    const double m2 = std::norm(w);
    // Exact zero plus a subnormal floor: |w|^2 below the smallest positive
    // normal would hand -inf to the phase factor.
    if (m2 < DBL_MIN) return 0.0;
    return std::log(m2);
}

double mass(const Field& u) {
    double acc = 0.0;
    for (const Complex& w : u.values) acc += std::norm(w);
    return u.grid->h * acc;
}

double energy(const Field& u, double lambda) {
    const Field lap = apply_laplacian(u);
    const double grad = -inner_product(lap, u, Weighting::PlainSum).real();
    double pot = 0.0;
    for (const Complex& w : u.values) {
        const double m2 = std::norm(w);
        if (m2 >= DBL_MIN) pot += m2 * std::log(m2);
    }
    return grad + lambda * u.grid->h * pot;
}

double hdot_norm(const ModeBasis& basis, const Field& u, int n) {
    if (n < 0 || n > 5) throw std::invalid_argument("hdot_norm: n must be in 0..5");
    if (n == 0) return l2h_norm(u, Weighting::PlainSum);
    return std::sqrt(basis.hdot_sq(u, n));
}

double hdot_norm(const Field& u, int n) {
    if (n == 0) return l2h_norm(u, Weighting::PlainSum);
    ModeBasis basis(u.grid);
    return hdot_norm(basis, u, n);
}

double h_norm(const ModeBasis& basis, const Field& u, int N) {
    if (N < 0 || N > 5) throw std::invalid_argument("h_norm: N must be in 0..5");
    double acc = 0.0;
    for (int n = 0; n <= N; ++n) {
        const double s = hdot_norm(basis, u, n);
        acc += s * s;
    }
    return std::sqrt(acc);
}

double h_norm(const Field& u, int N) {
    ModeBasis basis(u.grid);
    return h_norm(basis, u, N);
}

DiagnosticsRecord diagnostics(const ModeBasis& basis, const Field& u, double t, double lambda) {
    DiagnosticsRecord r;
    r.t = t;
    r.mass = mass(u);
    r.energy = energy(u, lambda);
    const std::array<double, 6> sq = basis.hdot_sq_all(u);
    r.hdot[0] = l2h_norm(u, Weighting::PlainSum);
    for (int n = 1; n <= 5; ++n) r.hdot[static_cast<std::size_t>(n)] = std::sqrt(sq[static_cast<std::size_t>(n)]);
    double acc = 0.0;
    for (int n = 0; n <= 5; ++n) {
        acc += r.hdot[static_cast<std::size_t>(n)] * r.hdot[static_cast<std::size_t>(n)];
        r.hfull[static_cast<std::size_t>(n)] = std::sqrt(acc);
    }
    double mn = std::numeric_limits<double>::infinity();
    for (const Complex& w : u.values) mn = std::min(mn, std::abs(w));
    r.min_abs_u = mn;
    const Field du = centered_derivative(u);
    const Field va = v_average(du);
    double mv = std::numeric_limits<double>::infinity();
    for (const Complex& w : va.values) mv = std::min(mv, std::abs(w));
    r.min_abs_V = mv;
    r.boundary_defect = std::max(std::abs(du[0]), std::abs(du[u.size() - 1]));
    r.odd_defect = odd_defect(u);
    return r;
}

Field v_average(const Field& f) {
    const std::size_t n = f.size();
    const std::size_t c = f.grid->center_index();
    std::vector<Complex> out(n);
    out[c] = f[c];
    // Running mean of trapezoid cell averages (Welford form): exact on
    // constants and on linear data, and never leaves the convex hull of the
    // cell means by more than roundoff.
    Complex mean(0.0, 0.0);
    for (std::size_t m = 1; c + m < n; ++m) {
        const Complex cell = 0.5 * (f[c + m - 1] + f[c + m]);
        mean += (cell - mean) / static_cast<double>(m);
        out[c + m] = mean;
    }
    mean = Complex(0.0, 0.0);
    for (std::size_t m = 1; m <= c; ++m) {
        const Complex cell = 0.5 * (f[c - m + 1] + f[c - m]);
        mean += (cell - mean) / static_cast<double>(m);
        out[c - m] = mean;
    }
    return Field(f.grid, std::move(out));
}

VjTerms vj_terms(const Field& v, double lambda) {
    CutoffOnGrid cut(v.grid);
    return vj_terms(v, lambda, cut);
}

namespace {

// The V_j formulas without the alpha-floor admission check; the public
// entry point guards, the residual identity below only needs the formulas
// to stay representable.
VjTerms vj_terms_unchecked(const Field& v, double lambda, const CutoffOnGrid& cut, Field va) {
    const std::size_t n = v.size();
    VjTerms out;
    std::vector<Complex> t1(n), t2(n), t3(n), t4(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Complex a = va[j];
        const double m2 = std::norm(a);
        t1[j] = 2.0 * lambda * a * cut.v1_bracket[j];
        t2[j] = lambda * v[j] * std::log(m2);
        t3[j] = 2.0 * lambda * a * (v[j] * std::conj(a)).real() / m2;
        t4[j] = -2.0 * lambda * v[j] * cut.log_xfrak[j];
    }
    out.v1 = Field(v.grid, std::move(t1));
    out.v2 = Field(v.grid, std::move(t2));
    out.v3 = Field(v.grid, std::move(t3));
    out.v4 = Field(v.grid, std::move(t4));
    out.v_avg = std::move(va);
    return out;
}

} // namespace

VjTerms vj_terms(const Field& v, double lambda, const CutoffOnGrid& cut) {
    if (cut.grid.get() != v.grid.get())
        throw std::invalid_argument("vj_terms: cutoff sampled on a different grid");
    Field va = v_average(v);
    double mv = std::numeric_limits<double>::infinity();
    for (const Complex& w : va.values) mv = std::min(mv, std::abs(w));
    const double floor = 1e-12 * max_abs(v);
    if (mv <= floor) throw VanishingAverageError(mv, floor);
    return vj_terms_unchecked(v, lambda, cut, std::move(va));
}

double decomposition_residual(const Field& u, double lambda, double x_min) {
    const GridPtr& g = u.grid;
    const std::size_t n = u.size();
    const Field v = centered_derivative(u);
    const CutoffOnGrid cut(g);

    // Gaussian-tailed data decays through the alpha floor near the boundary
    // with the identity still well defined, so the guard here is weaker than
    // in vj_terms: reject only when |V[v]|^2 underflows on an evaluated node.
    Field va = v_average(v);
    const double cutoff_x = std::max(4.0 * g->h, x_min);
    double mv = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(g->nodes[j]) >= cutoff_x) mv = std::min(mv, std::abs(va[j]));
    if (!(mv * mv >= DBL_MIN)) throw VanishingAverageError(mv, std::sqrt(DBL_MIN));
    const VjTerms vj = vj_terms_unchecked(v, lambda, cut, std::move(va));

    std::vector<Complex> nl(n);
    for (std::size_t j = 0; j < n; ++j) nl[j] = lambda * u[j] * phi_log(u[j]);
    const Field dnl = centered_derivative(Field(g, std::move(nl)));

    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = g->nodes[j];
        if (std::abs(x) < cutoff_x) continue;
        const double logchi2 = 2.0 * std::log(std::abs(cut.chi[j]));
        const Complex rhs = lambda * logchi2 * v[j] + vj.v1[j] + vj.v2[j] + vj.v3[j] + vj.v4[j];
        worst = std::max(worst, std::abs(dnl[j] - rhs));
    }
    return worst;
}

MembershipReport membership_D(const Field& u) {
    MembershipReport r;
    r.odd_defect = odd_defect(u);
    const std::size_t c = u.grid->center_index();
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < u.size(); ++j)
        if (j != c) mn = std::min(mn, std::abs(u[j]));
    r.min_offcenter_abs = mn;
    const Field du = centered_derivative(u);
    r.center_slope = du[c];
    const Field va = v_average(du);
    double mv = std::numeric_limits<double>::infinity();
    for (const Complex& w : va.values) mv = std::min(mv, std::abs(w));
    r.min_abs_V = mv;
    return r;
}

LogSlopeReport log_slope_probe(const std::vector<double>& times,
                               const std::vector<Field>& states,
                               double t, std::pair<double, double> window) {
    if (times.empty() || times.size() != states.size())
        throw std::invalid_argument("log_slope_probe: empty or inconsistent trajectory");
    // Nearest recorded frame.
    std::size_t idx = 0;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - t) < std::abs(times[idx] - t)) idx = i;

    const Field& u = states[idx];
    const GridPtr& g = u.grid;
    const Field du = centered_derivative(u);

    std::vector<std::size_t> sel;
    for (std::size_t j = 0; j < g->n; ++j) {
        const double ax = std::abs(g->nodes[j]);
        if (ax > window.first && ax < window.second) sel.push_back(j);
    }
    if (sel.size() < 8)
        throw std::invalid_argument("log_slope_probe: window holds fewer than 8 nodes");

    // LS fit du ~ alpha + beta log|x| via the 2x2 normal equations.
    double s11 = 0.0, s1l = 0.0, sll = 0.0;
    Complex b1(0.0, 0.0), bl(0.0, 0.0);
    for (std::size_t j : sel) {
        const double L = std::log(std::abs(g->nodes[j]));
        s11 += 1.0;
        s1l += L;
        sll += L * L;
        b1 += du[j];
        bl += du[j] * L;
    }
    const double det = s11 * sll - s1l * s1l;
    const Complex alpha = (sll * b1 - s1l * bl) / det;
    const Complex beta = (s11 * bl - s1l * b1) / det;

    double res2 = 0.0;
    for (std::size_t j : sel) {
        const double L = std::log(std::abs(g->nodes[j]));
        res2 += std::norm(du[j] - alpha - beta * L);
    }

    LogSlopeReport rep;
    rep.t = times[idx];
    rep.slope = beta;
    rep.fit_window = window;
    rep.fit_residual = std::sqrt(res2 / static_cast<double>(sel.size()));
    rep.window_nodes = sel.size();

    // zeta(tau) = D_h u(tau, 0), integrated by trapezoid over the recorded
    // frames up to the probe time.
    const std::size_t c = g->center_index();
    Complex zint(0.0, 0.0);
    for (std::size_t i = 0; i + 1 <= idx; ++i) {
        const Field dua = centered_derivative(states[i]);
        const Field dub = centered_derivative(states[i + 1]);
        zint += 0.5 * (times[i + 1] - times[i]) * (dua[c] + dub[c]);
    }
    rep.zeta_integral = zint;
    return rep;
}

} // namespace lognls
