#include "lognls/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace lognls {

namespace {

// FFTW planning is not thread-safe; executing plans on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double trap_weight(std::size_t j, std::size_t n) {
    return (j == 0 || j + 1 == n) ? 0.5 : 1.0;
}

} // namespace

Complex inner_product(const Field& u, const Field& v, Weighting w) {
    if (u.size() != v.size()) throw std::invalid_argument("inner_product: size mismatch");
    const std::size_t n = u.size();
    Complex acc(0.0, 0.0);
    if (w == Weighting::PlainSum) {
        for (std::size_t j = 0; j < n; ++j) acc += u[j] * std::conj(v[j]);
    } else {
        for (std::size_t j = 0; j < n; ++j) acc += trap_weight(j, n) * u[j] * std::conj(v[j]);
    }
    return u.grid->h * acc;
}

double l2h_norm(const Field& u, Weighting w) {
    const std::size_t n = u.size();
    double acc = 0.0;
    if (w == Weighting::PlainSum) {
        for (std::size_t j = 0; j < n; ++j) acc += std::norm(u[j]);
    } else {
        for (std::size_t j = 0; j < n; ++j) acc += trap_weight(j, n) * std::norm(u[j]);
    }
    return std::sqrt(u.grid->h * acc);
}

Field apply_laplacian(const Field& u) {
    const Grid& g = *u.grid;
    const std::size_t n = g.n;
    const double ih2 = 1.0 / (g.h * g.h);
    std::vector<Complex> out(n);
    for (std::size_t j = 1; j + 1 < n; ++j)
        out[j] = (u[j + 1] + u[j - 1] - 2.0 * u[j]) * ih2;
    switch (g.bc) {
        case BoundaryCondition::Neumann:
            out[0] = 2.0 * (u[1] - u[0]) * ih2;
            out[n - 1] = 2.0 * (u[n - 2] - u[n - 1]) * ih2;
            break;
        case BoundaryCondition::Dirichlet:
            // Acts as P (-Lap) P: endpoint values are treated as zero.
            out[0] = Complex(0.0, 0.0);
            out[n - 1] = Complex(0.0, 0.0);
            out[1] = (u[2] - 2.0 * u[1]) * ih2;
            out[n - 2] = (u[n - 3] - 2.0 * u[n - 2]) * ih2;
            break;
        case BoundaryCondition::Periodic: {
            // Node n-1 aliases node 0; the distinct unknowns are 0..n-2.
            const std::size_t M = n - 1;
            out[0] = (u[1] + u[M - 1] - 2.0 * u[0]) * ih2;
            out[M - 1] = (u[0] + u[M - 2] - 2.0 * u[M - 1]) * ih2;
            out[n - 1] = out[0];
            break;
        }
    }
    return Field(u.grid, std::move(out));
}

Field centered_derivative(const Field& u) {
    const Grid& g = *u.grid;
    const std::size_t n = g.n;
    const double i2h = 1.0 / (2.0 * g.h);
    std::vector<Complex> out(n);
    for (std::size_t j = 1; j + 1 < n; ++j) out[j] = (u[j + 1] - u[j - 1]) * i2h;
    if (g.bc == BoundaryCondition::Periodic) {
        const std::size_t M = n - 1;
        out[0] = (u[1] - u[M - 1]) * i2h;
        out[n - 1] = out[0];
    } else {
        out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * i2h;
        out[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * i2h;
    }
    return Field(u.grid, std::move(out));
}

ModeBasis::ModeBasis(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) throw std::invalid_argument("ModeBasis: null grid");
    const std::size_t n = grid_->n;
    const std::size_t M = n - 1;  // = 2^K
    const double h = grid_->h;
    const double pi = std::acos(-1.0);

    std::lock_guard<std::mutex> lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    switch (grid_->bc) {
        case BoundaryCondition::Neumann: {
            kind_ = TransformKind::CosineI;
            eigenvalues_.resize(n);
            weights_.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                const double s = std::sin(pi * static_cast<double>(k) / (2.0 * static_cast<double>(M)));
                eigenvalues_[k] = -4.0 / (h * h) * s * s;
                const double gamma = (k == 0 || k == M) ? 2.0 : 1.0;
                weights_[k] = h * static_cast<double>(M) * gamma / 2.0;
            }
            std::vector<double> tmp(n);
            plan_r2r_ = fftw_plan_r2r_1d(static_cast<int>(n), tmp.data(), tmp.data(),
                                         FFTW_REDFT00, flags);
            break;
        }
        case BoundaryCondition::Dirichlet: {
            kind_ = TransformKind::SineI;
            const std::size_t m = n - 2;
            eigenvalues_.resize(m);
            weights_.resize(m);
            for (std::size_t k = 0; k < m; ++k) {
                const double s = std::sin(pi * static_cast<double>(k + 1) / (2.0 * static_cast<double>(M)));
                eigenvalues_[k] = -4.0 / (h * h) * s * s;
                weights_[k] = h * static_cast<double>(M) / 2.0;
            }
            std::vector<double> tmp(m);
            plan_r2r_ = fftw_plan_r2r_1d(static_cast<int>(m), tmp.data(), tmp.data(),
                                         FFTW_RODFT00, flags);
            break;
        }
        case BoundaryCondition::Periodic: {
            kind_ = TransformKind::DiscreteFourier;
            eigenvalues_.resize(M);
            weights_.resize(M);
            for (std::size_t k = 0; k < M; ++k) {
                const double s = std::sin(pi * static_cast<double>(k) / static_cast<double>(M));
                eigenvalues_[k] = -4.0 / (h * h) * s * s;
                weights_[k] = h * static_cast<double>(M);
            }
            std::vector<Complex> tmp(M);
            auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
            plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(M), p, p, FFTW_FORWARD, flags);
            plan_bwd_ = fftw_plan_dft_1d(static_cast<int>(M), p, p, FFTW_BACKWARD, flags);
            break;
        }
    }
}

ModeBasis::~ModeBasis() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_r2r_) fftw_destroy_plan(static_cast<fftw_plan>(plan_r2r_));
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void ModeBasis::check_field(const Field& u) const {
    if (u.grid.get() != grid_.get())
        throw std::invalid_argument("ModeBasis: field grid does not match basis grid");
}

std::vector<Complex> ModeBasis::decompose(const Field& u) const {
    check_field(u);
    const std::size_t n = grid_->n;
    const std::size_t M = n - 1;
    switch (kind_) {
        case TransformKind::CosineI: {
            std::vector<double> re(n), im(n);
            for (std::size_t j = 0; j < n; ++j) { re[j] = u[j].real(); im[j] = u[j].imag(); }
            fftw_execute_r2r(static_cast<fftw_plan>(plan_r2r_), re.data(), re.data());
            fftw_execute_r2r(static_cast<fftw_plan>(plan_r2r_), im.data(), im.data());
            std::vector<Complex> c(n);
            for (std::size_t k = 0; k < n; ++k) {
                const double gamma = (k == 0 || k == M) ? 2.0 : 1.0;
                c[k] = Complex(re[k], im[k]) / (static_cast<double>(M) * gamma);
            }
            return c;
        }
        case TransformKind::SineI: {
            const std::size_t m = n - 2;
            std::vector<double> re(m), im(m);
            for (std::size_t j = 0; j < m; ++j) { re[j] = u[j + 1].real(); im[j] = u[j + 1].imag(); }
            fftw_execute_r2r(static_cast<fftw_plan>(plan_r2r_), re.data(), re.data());
            fftw_execute_r2r(static_cast<fftw_plan>(plan_r2r_), im.data(), im.data());
            std::vector<Complex> c(m);
            for (std::size_t k = 0; k < m; ++k)
                c[k] = Complex(re[k], im[k]) / static_cast<double>(M);
            return c;
        }
        case TransformKind::DiscreteFourier: {
            std::vector<Complex> buf(u.values.begin(), u.values.begin() + static_cast<std::ptrdiff_t>(M));
            auto* p = reinterpret_cast<fftw_complex*>(buf.data());
            fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
            for (Complex& z : buf) z /= static_cast<double>(M);
            return buf;
        }
    }
    throw std::logic_error("ModeBasis: unknown kind");
}

Field ModeBasis::reconstruct(const std::vector<Complex>& coeffs) const {
    if (coeffs.size() != mode_count())
        throw std::invalid_argument("ModeBasis: coefficient count mismatch");
    const std::size_t n = grid_->n;
    const std::size_t M = n - 1;
    std::vector<Complex> out(n);
    switch (kind_) {
        case TransformKind::CosineI: {
            std::vector<double> re(n), im(n);
            for (std::size_t k = 0; k < n; ++k) {
                const double half = (k == 0 || k == M) ? 1.0 : 0.5;
                re[k] = half * coeffs[k].real();
                im[k] = half * coeffs[k].imag();
            }
            fftw_execute_r2r(static_cast<fftw_plan>(plan_r2r_), re.data(), re.data());
            fftw_execute_r2r(static_cast<fftw_plan>(plan_r2r_), im.data(), im.data());
            for (std::size_t j = 0; j < n; ++j) out[j] = Complex(re[j], im[j]);
            break;
        }
        case TransformKind::SineI: {
            const std::size_t m = n - 2;
            std::vector<double> re(m), im(m);
            for (std::size_t k = 0; k < m; ++k) {
                re[k] = 0.5 * coeffs[k].real();
                im[k] = 0.5 * coeffs[k].imag();
            }
            fftw_execute_r2r(static_cast<fftw_plan>(plan_r2r_), re.data(), re.data());
            fftw_execute_r2r(static_cast<fftw_plan>(plan_r2r_), im.data(), im.data());
            out[0] = Complex(0.0, 0.0);
            out[n - 1] = Complex(0.0, 0.0);
            for (std::size_t j = 0; j < m; ++j) out[j + 1] = Complex(re[j], im[j]);
            break;
        }
        case TransformKind::DiscreteFourier: {
            std::vector<Complex> buf(coeffs);
            auto* p = reinterpret_cast<fftw_complex*>(buf.data());
            fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
            for (std::size_t j = 0; j < M; ++j) out[j] = buf[j];
            out[n - 1] = out[0];
            break;
        }
    }
    return Field(grid_, std::move(out));
}

Field ModeBasis::propagate(const Field& u, double t) const {
    std::vector<Complex> c = decompose(u);
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] *= std::polar(1.0, t * eigenvalues_[k]);
    return reconstruct(c);
}

double ModeBasis::hdot_sq(const Field& u, int n) const {
    if (n < 0) throw std::invalid_argument("hdot_sq: n must be >= 0");
    const std::vector<Complex> c = decompose(u);
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        double factor = 1.0;
        for (int p = 0; p < n; ++p) factor *= -eigenvalues_[k];
        acc += factor * weights_[k] * std::norm(c[k]);
    }
    return acc;
}

std::array<double, 6> ModeBasis::hdot_sq_all(const Field& u) const {
    const std::vector<Complex> c = decompose(u);
    std::array<double, 6> acc{};
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double amp = weights_[k] * std::norm(c[k]);
        double factor = 1.0;
        for (int n = 0; n <= 5; ++n) {
            acc[static_cast<std::size_t>(n)] += factor * amp;
            factor *= -eigenvalues_[k];
        }
    }
    return acc;
}

Field linear_propagator(const Field& u, double t) {
    ModeBasis basis(u.grid);
    return basis.propagate(u, t);
}

Eigen::MatrixXd dense_laplacian_matrix(const Grid& grid) {
    if (grid.n > 4097) throw std::invalid_argument("dense_laplacian_matrix: grid.n > 4097");
    const double ih2 = 1.0 / (grid.h * grid.h);
    const std::size_t n = grid.n;
    switch (grid.bc) {
        case BoundaryCondition::Neumann: {
            // S = W^{1/2} Lap W^{-1/2} with trapezoid weights; symmetric.
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            const double s2 = std::sqrt(2.0);
            for (std::size_t j = 1; j + 1 < n; ++j) {
                m(j, j) = -2.0 * ih2;
                m(j, j - 1) = ih2;
                m(j, j + 1) = ih2;
            }
            m(0, 0) = -2.0 * ih2;
            m(0, 1) = s2 * ih2;
            m(1, 0) = s2 * ih2;
            m(n - 1, n - 1) = -2.0 * ih2;
            m(n - 1, n - 2) = s2 * ih2;
            m(n - 2, n - 1) = s2 * ih2;
            return m;
        }
        case BoundaryCondition::Dirichlet: {
            const std::size_t m_sz = n - 2;
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_sz), static_cast<Eigen::Index>(m_sz));
            for (std::size_t j = 0; j < m_sz; ++j) {
                m(j, j) = -2.0 * ih2;
                if (j > 0) m(j, j - 1) = ih2;
                if (j + 1 < m_sz) m(j, j + 1) = ih2;
            }
            return m;
        }
        case BoundaryCondition::Periodic: {
            const Eigen::Index M = static_cast<Eigen::Index>(n) - 1;
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(M, M);
            for (Eigen::Index j = 0; j < M; ++j) {
                m(j, j) = -2.0 * ih2;
                m(j, (j + 1) % M) = ih2;
                m(j, (j + M - 1) % M) = ih2;
            }
            return m;
        }
    }
    throw std::logic_error("dense_laplacian_matrix: unknown bc");
}

Field dense_laplacian_apply(const Eigen::MatrixXd& m, const Field& u) {
    const Grid& g = *u.grid;
    const std::size_t n = g.n;
    std::vector<Complex> out(n, Complex(0.0, 0.0));
    auto mul = [&m](const Eigen::VectorXd& x) { return Eigen::VectorXd(m * x); };
    switch (g.bc) {
        case BoundaryCondition::Neumann: {
            Eigen::VectorXd re(n), im(n);
            const double s2 = std::sqrt(2.0);
            for (std::size_t j = 0; j < n; ++j) {
                const double w = (j == 0 || j + 1 == n) ? 1.0 / s2 : 1.0;
                re[static_cast<Eigen::Index>(j)] = w * u[j].real();
                im[static_cast<Eigen::Index>(j)] = w * u[j].imag();
            }
            Eigen::VectorXd r2 = mul(re), i2 = mul(im);
            for (std::size_t j = 0; j < n; ++j) {
                const double w = (j == 0 || j + 1 == n) ? s2 : 1.0;
                out[j] = Complex(w * r2[static_cast<Eigen::Index>(j)], w * i2[static_cast<Eigen::Index>(j)]);
            }
            break;
        }
        case BoundaryCondition::Dirichlet: {
            const std::size_t m_sz = n - 2;
            Eigen::VectorXd re(m_sz), im(m_sz);
            for (std::size_t j = 0; j < m_sz; ++j) {
                re[static_cast<Eigen::Index>(j)] = u[j + 1].real();
                im[static_cast<Eigen::Index>(j)] = u[j + 1].imag();
            }
            Eigen::VectorXd r2 = mul(re), i2 = mul(im);
            for (std::size_t j = 0; j < m_sz; ++j)
                out[j + 1] = Complex(r2[static_cast<Eigen::Index>(j)], i2[static_cast<Eigen::Index>(j)]);
            break;
        }
        case BoundaryCondition::Periodic: {
            const std::size_t M = n - 1;
            Eigen::VectorXd re(M), im(M);
            for (std::size_t j = 0; j < M; ++j) {
                re[static_cast<Eigen::Index>(j)] = u[j].real();
                im[static_cast<Eigen::Index>(j)] = u[j].imag();
            }
            Eigen::VectorXd r2 = mul(re), i2 = mul(im);
            for (std::size_t j = 0; j < M; ++j)
                out[j] = Complex(r2[static_cast<Eigen::Index>(j)], i2[static_cast<Eigen::Index>(j)]);
            out[n - 1] = out[0];
            break;
        }
    }
    return Field(u.grid, std::move(out));
}

} // namespace lognls
