// Strang splitting for i u_t + Lap u = lambda u log|u|^2: the guarded
// logarithmic phase flow, the split step, and the time-stepping loop with
// per-frame diagnostics.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lognls/functionals.hpp"
#include "lognls/grid.hpp"
#include "lognls/spectral.hpp"

namespace lognls {

/// A run produced a non-finite value and was truncated.
class NumericalAbortError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SplitConfig {
    double lambda = 1.0;
    double T = 0.0;
    std::size_t J = 1;
    std::size_t record_every = 0;  // 0 means max(1, J/200)
    bool keep_states = true;       // false drops all frames but the last

    double tau() const { return T / static_cast<double>(J); }
    std::size_t effective_stride() const {
        return record_every > 0 ? record_every : std::max<std::size_t>(1, J / 200);
    }
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> states;
    std::vector<DiagnosticsRecord> records;
    bool aborted = false;       // non-finite value detected; truncated here
    std::size_t abort_step = 0;

    const Field& final_state() const { return states.back(); }
};

/// Nonlinear sub-flow w -> e^{-i lambda t phi(w)} w; |output| == |w|
/// pointwise up to one roundoff.
Field nonlinear_flow(const Field& w, double t, double lambda);

/// One Strang step: half linear step, full nonlinear step, half linear step.
Field strang_step(const ModeBasis& basis, const Field& u, double tau, double lambda);
Field strang_step(const Field& u, double tau, double lambda);

/// J Strang steps with diagnostics every record stride (steps 0 and J are
/// always recorded). If a non-finite value appears the trajectory is
/// truncated and flagged instead of continuing.
Trajectory run(const Field& u0, const SplitConfig& cfg);

struct OrderEstimate {
    double p = 0.0;                    // mean Richardson exponent
    std::array<double, 3> errors{};    // final-time errors per tau
    std::array<double, 2> ratios{};    // log2(e_i / e_{i+1})
    bool degenerate = false;           // errors at the roundoff floor
};

/// Richardson order study on a single grid: runs u0 with the three time
/// steps and compares, at time T, against a tau/8 reference run on the same
/// grid (which cancels the spatial error and isolates the splitting order).
OrderEstimate observed_order(const Field& u0, double lambda, double T,
                             const std::array<double, 3>& taus);

} // namespace lognls
