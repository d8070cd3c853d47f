#pragma once

#include "spincav/core.hpp"
#include "spincav/spectral.hpp"

namespace spincav {

// K(m dt) for m = 0..M on the bath nodes. K(0) = 0.
class KernelCache {
public:
    static KernelCache build(const SystemParams& params, const SpinBath& bath, double dt, Eigen::Index max_lag);

    double dt() const { return dt_; }
    Eigen::Index max_lag() const { return values_.size() - 1; }
    const Eigen::VectorXcd& values() const { return values_; }
    cplx operator[](Eigen::Index m) const { return values_(m); }

private:
    double dt_ = 0.0;
    Eigen::VectorXcd values_;
};

// Memory kernel of the cavity Volterra equation, evaluated directly at one lag.
cplx kernel_K(const SystemParams& params, const SpinBath& bath, double lag);

// Source term of the Volterra equation for a vacuum start.
cplx forcing_F(const SystemParams& params, const DriveProtocol& protocol, double t);

struct SolverOptions {
    // Phase recurrences are resynchronized with exact exponentials this often.
    Eigen::Index resync_every = 256;
    // Enforce step(omega) * t_max < pi/4 on the bath.
    bool check_resolution = true;
    // Size cap for the O(N^2) reference solver.
    std::size_t direct_max_steps = 4000;
};

// Cavity amplitude A(t) via the segment recurrence with frequency memory I_n(omega).
// The grid must start at 0 and every drive switching time must fall on a grid point.
ComplexSeries solve(const SystemParams& params, const SpinBath& bath, const DriveProtocol& protocol,
                    const TimeGrid& tgrid, cplx initial_amplitude = 0.0, const SolverOptions& options = {});

// Same equation by full-history product trapezoid. O(N^2), for checking solve.
ComplexSeries solve_direct(const SystemParams& params, const SpinBath& bath, const DriveProtocol& protocol,
                           const TimeGrid& tgrid, cplx initial_amplitude = 0.0,
                           const SolverOptions& options = {});

// J_x + i J_y from a cavity trace.
ComplexSeries collective_spin(const ComplexSeries& amplitude, const SystemParams& params, const SpinBath& bath);

struct SteadyState {
    cplx amplitude;
    double jx;
};

// Resonant steady state under constant drive eta.
SteadyState steady_state(const SystemParams& params, const SpinDensity& density, cplx eta);

// Ring-down after a long pulse, time counted from switch-off. A(0) = A_st.
ComplexSeries decay_from_steady_state(const SystemParams& params, const SpinBath& bath, const TimeGrid& tgrid,
                                      cplx eta, const SolverOptions& options = {});

// Amplitude of a single spin mode driven by the cavity, B_k(0) = 0.
ComplexSeries spin_mode_amplitude(const ComplexSeries& amplitude, const SystemParams& params, double omega_k,
                                  double g_k);

// Largest resolvable time for a bath grid: pi / (4 step).
double resolvable_time(const SpinBath& bath);

}  // namespace spincav
