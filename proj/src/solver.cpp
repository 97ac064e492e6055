#include "lognls/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace lognls {

void SplitConfig::validate() const {
    if (!(T > 0.0)) throw std::invalid_argument("SplitConfig: T must be positive");
    if (J < 1) throw std::invalid_argument("SplitConfig: J must be >= 1");
    if (!std::isfinite(lambda)) throw std::invalid_argument("SplitConfig: lambda must be finite");
}

Field nonlinear_flow(const Field& w, double t, double lambda) {
    const double c = -lambda * t;
    std::vector<Complex> out(w.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        out[j] = std::polar(1.0, c * phi_log(w[j])) * w[j];
    return Field(w.grid, std::move(out));
}

Field strang_step(const ModeBasis& basis, const Field& u, double tau, double lambda) {
    Field half = basis.propagate(u, 0.5 * tau);
    Field kicked = nonlinear_flow(half, tau, lambda);
    return basis.propagate(kicked, 0.5 * tau);
}

Field strang_step(const Field& u, double tau, double lambda) {
    ModeBasis basis(u.grid);
    return strang_step(basis, u, tau, lambda);
}

Trajectory run(const Field& u0, const SplitConfig& cfg) {
    cfg.validate();
    if (!all_finite(u0)) throw std::invalid_argument("run: non-finite initial data");

    const ModeBasis basis(u0.grid);
    const double tau = cfg.tau();
    const std::size_t stride = cfg.effective_stride();

    Trajectory traj;
    auto record = [&](const Field& u, std::size_t step) {
        const double t = static_cast<double>(step) * tau;
        traj.times.push_back(t);
        traj.records.push_back(diagnostics(basis, u, t, cfg.lambda));
        if (cfg.keep_states)
            traj.states.push_back(u);
        else if (traj.states.empty())
            traj.states.push_back(u);
        else
            traj.states.back() = u;
    };

    Field u = u0;
    record(u, 0);
    for (std::size_t j = 1; j <= cfg.J; ++j) {
        u = strang_step(basis, u, tau, cfg.lambda);
        if (!all_finite(u)) {
            traj.aborted = true;
            traj.abort_step = j;
            return traj;
        }
        if (j % stride == 0 || j == cfg.J) record(u, j);
    }
    return traj;
}

OrderEstimate observed_order(const Field& u0, double lambda, double T,
                             const std::array<double, 3>& taus) {
    OrderEstimate est;
    auto final_state = [&](double tau) {
        SplitConfig cfg;
        cfg.lambda = lambda;
        cfg.T = T;
        cfg.J = static_cast<std::size_t>(std::llround(T / tau));
        cfg.record_every = cfg.J;
        cfg.keep_states = false;
        Trajectory tr = run(u0, cfg);
        if (tr.aborted) throw std::runtime_error("observed_order: run aborted (non-finite)");
        return tr.final_state();
    };

    const Field ref = final_state(taus[2] / 8.0);
    const double ref_norm = l2h_norm(ref);
    for (int i = 0; i < 3; ++i) {
        Field ui = final_state(taus[static_cast<std::size_t>(i)]);
        for (std::size_t j = 0; j < ui.size(); ++j) ui[j] -= ref[j];
        est.errors[static_cast<std::size_t>(i)] = l2h_norm(ui);
    }

    // Errors at the roundoff floor make the exponent meaningless.
    const double floor = 1e-12 * std::max(1.0, ref_norm);
    if (est.errors[0] < floor || est.errors[1] < floor || est.errors[2] < floor) {
        est.degenerate = true;
        est.p = 0.0;
        return est;
    }
    est.ratios[0] = std::log2(est.errors[0] / est.errors[1]);
    est.ratios[1] = std::log2(est.errors[1] / est.errors[2]);
    est.p = 0.5 * (est.ratios[0] + est.ratios[1]);
    return est;
}

} // namespace lognls
