#include "spincav/volterra.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "phase.hpp"

namespace spincav {

namespace {

constexpr cplx I{0.0, 1.0};

using detail::phases;
using detail::PhaseWalker;

// c_j = m_j / (i b_j), b_j = omega_j - omega_c + i kappa
Eigen::ArrayXcd kernel_weights(const SystemParams& params, const SpinBath& bath) {
    Eigen::ArrayXcd b(bath.omega.size());
    b.real() = bath.omega - params.omega_c();
    b.imag().setConstant(params.kappa());
    return bath.mass.cast<cplx>() / (I * b);
}

// Product trapezoid inside one segment: fills A(p+1..q) given A(p) and the source on [p, q].
void march(const KernelCache& kernel, double dt, const Eigen::Ref<const Eigen::VectorXcd>& source,
           Eigen::VectorXcd& amp, Eigen::Index p, Eigen::Index q) {
    const Eigen::VectorXcd& K = kernel.values();
    const Eigen::Index M = K.size() - 1;
    Eigen::VectorXcd krev = K.reverse();
    for (Eigen::Index m = p + 1; m <= q; ++m) {
        Eigen::Index len = m - p - 1;
        cplx conv = 0.5 * K(m - p) * amp(p);
        if (len > 0)
            conv += (krev.segment(M - m + p + 1, len).array() * amp.segment(p + 1, len).array()).sum();
        amp(m) = source(m - p) + dt * conv;
    }
}

struct Segment {
    Eigen::Index begin;
    Eigen::Index end;
    cplx eta;
};

std::vector<Segment> plan_segments(const DriveProtocol& protocol, const TimeGrid& tgrid) {
    const auto last = static_cast<Eigen::Index>(tgrid.n_steps() - 1);
    std::vector<Segment> plan;
    Eigen::Index begin = 0;
    double t = 0.0;
    for (const auto& seg : protocol.segments()) {
        t += seg.duration;
        double pos = t / tgrid.dt();
        double rounded = std::round(pos);
        if (std::abs(pos - rounded) > 1e-6 * std::max(1.0, pos))
            throw std::invalid_argument("drive switching time " + std::to_string(t) +
                                        " ns is not a multiple of dt");
        auto end = std::min(static_cast<Eigen::Index>(rounded), last);
        if (end > begin) plan.push_back({begin, end, seg.eta});
        begin = end;
        if (begin >= last) break;
    }
    if (begin < last) plan.push_back({begin, last, 0.0});
    return plan;
}

void check_grid(const SpinBath& bath, const TimeGrid& tgrid, const SolverOptions& options) {
    if (std::abs(tgrid.t_start()) > 1e-12) throw std::invalid_argument("solver grids must start at t = 0");
    if (options.check_resolution && bath.step() > 0.0 && bath.step() * tgrid.t_end() >= pi / 4.0)
        throw NumericalError("frequency grid too coarse: step * t_max = " +
                             std::to_string(bath.step() * tgrid.t_end()) + " >= pi/4");
}

}  // namespace

double resolvable_time(const SpinBath& bath) {
    return bath.step() > 0.0 ? pi / (4.0 * bath.step()) : std::numeric_limits<double>::infinity();
}

KernelCache KernelCache::build(const SystemParams& params, const SpinBath& bath, double dt, Eigen::Index max_lag) {
    if (!(dt > 0.0)) throw std::invalid_argument("KernelCache: dt must be positive");
    if (max_lag < 0) throw std::invalid_argument("KernelCache: negative lag count");
    KernelCache cache;
    cache.dt_ = dt;
    cache.values_ = Eigen::VectorXcd::Zero(max_lag + 1);
    const double omega2 = params.coupling() * params.coupling();
    if (omega2 == 0.0) return cache;
    Eigen::ArrayXd nu = bath.omega - params.omega_p();
    Eigen::ArrayXcd c = kernel_weights(params, bath);
    const cplx csum = c.sum();
    const cplx a = params.cavity_rate();
    PhaseWalker walker(nu, dt, 256);
    for (Eigen::Index m = 1; m <= max_lag; ++m) {
        walker.advance();
        double s = dt * static_cast<double>(m);
        cache.values_(m) = omega2 * ((c * walker.current()).sum() - csum * std::exp(-I * a * s));
    }
    return cache;
}

cplx kernel_K(const SystemParams& params, const SpinBath& bath, double lag) {
    if (!(lag >= 0.0)) throw std::invalid_argument("kernel_K: lag must be non-negative");
    if (lag == 0.0) return 0.0;
    const double omega2 = params.coupling() * params.coupling();
    if (omega2 == 0.0) return 0.0;
    Eigen::ArrayXcd c = kernel_weights(params, bath);
    Eigen::ArrayXcd ph = phases(bath.omega - params.omega_p(), lag);
    return omega2 * ((c * ph).sum() - c.sum() * std::exp(-I * params.cavity_rate() * lag));
}

cplx forcing_F(const SystemParams& params, const DriveProtocol& protocol, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("forcing_F: t must be non-negative");
    const cplx a = params.cavity_rate();
    cplx f = 0.0;
    double start = 0.0;
    for (const auto& seg : protocol.segments()) {
        if (start >= t) break;
        double stop = std::min(start + seg.duration, t);
        // -eta int_start^stop e^{-ia(t-u)} du
        f -= seg.eta * (std::exp(-I * a * (t - stop)) - std::exp(-I * a * (t - start))) / (I * a);
        start += seg.duration;
    }
    return f;
}

ComplexSeries solve(const SystemParams& params, const SpinBath& bath, const DriveProtocol& protocol,
                    const TimeGrid& tgrid, cplx initial_amplitude, const SolverOptions& options) {
    check_grid(bath, tgrid, options);
    const double dt = tgrid.dt();
    const auto n = static_cast<Eigen::Index>(tgrid.n_steps());
    const auto plan = plan_segments(protocol, tgrid);
    Eigen::Index longest = 1;
    for (const auto& s : plan) longest = std::max(longest, s.end - s.begin);
    KernelCache kernel = KernelCache::build(params, bath, dt, longest);

    const cplx a = params.cavity_rate();
    const double omega2 = params.coupling() * params.coupling();
    const bool coupled = omega2 > 0.0;
    Eigen::ArrayXd nu = bath.omega - params.omega_p();
    Eigen::ArrayXcd c = kernel_weights(params, bath);
    Eigen::ArrayXcd step_phase = phases(nu, dt);

    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(n);
    amp(0) = initial_amplitude;
    Eigen::ArrayXcd memory = Eigen::ArrayXcd::Zero(nu.size());  // I_n(omega)
    bool memory_empty = true;

    for (std::size_t si = 0; si < plan.size(); ++si) {
        const auto& seg = plan[si];
        const Eigen::Index len = seg.end - seg.begin;
        Eigen::VectorXcd source(len + 1);
        Eigen::ArrayXcd d;
        cplx dsum = 0.0;
        if (coupled && !memory_empty) {
            d = c * memory;
            dsum = d.sum();
        }
        PhaseWalker walker(nu, dt, options.resync_every);
        for (Eigen::Index k = 0; k <= len; ++k) {
            double s = dt * static_cast<double>(k);
            cplx ea = std::exp(-I * a * s);
            cplx f = ea * amp(seg.begin) + I * seg.eta * (1.0 - ea) / a;
            if (coupled && !memory_empty) f += omega2 * ((d * walker.current()).sum() - dsum * ea);
            source(k) = f;
            if (k < len && coupled && !memory_empty) walker.advance();
        }
        march(kernel, dt, source, amp, seg.begin, seg.end);

        if (coupled && si + 1 < plan.size()) {
            // I_{n+1} = e^{-i nu L} I_n + trapezoid of e^{-i nu (T_{n+1} - tau)} A(tau) over the segment
            Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(nu.size());
            for (Eigen::Index k = seg.begin; k <= seg.end; ++k) {
                double w = (k == seg.begin || k == seg.end) ? 0.5 : 1.0;
                acc = acc * step_phase + w * amp(k);
            }
            memory = phases(nu, dt * static_cast<double>(len)) * memory + dt * acc;
            memory_empty = false;
        }
    }
    return {tgrid, amp};
}

ComplexSeries solve_direct(const SystemParams& params, const SpinBath& bath, const DriveProtocol& protocol,
                           const TimeGrid& tgrid, cplx initial_amplitude, const SolverOptions& options) {
    if (tgrid.n_steps() > options.direct_max_steps)
        throw std::invalid_argument("solve_direct: " + std::to_string(tgrid.n_steps()) +
                                    " steps exceed the cap of " + std::to_string(options.direct_max_steps));
    check_grid(bath, tgrid, options);
    plan_segments(protocol, tgrid);
    const auto n = static_cast<Eigen::Index>(tgrid.n_steps());
    KernelCache kernel = KernelCache::build(params, bath, tgrid.dt(), n - 1);
    const cplx a = params.cavity_rate();
    Eigen::VectorXcd source(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        double t = tgrid.time(static_cast<std::size_t>(m));
        source(m) = forcing_F(params, protocol, t) + std::exp(-I * a * t) * initial_amplitude;
    }
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(n);
    amp(0) = initial_amplitude;
    march(kernel, tgrid.dt(), source, amp, 0, n - 1);
    return {tgrid, amp};
}

ComplexSeries collective_spin(const ComplexSeries& amplitude, const SystemParams& params, const SpinBath& bath) {
    const double dt = amplitude.grid.dt();
    const auto n = static_cast<Eigen::Index>(amplitude.size());
    Eigen::ArrayXcd r = phases(bath.omega - params.omega_p(), dt);
    Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(bath.omega.size());
    Eigen::VectorXcd j = Eigen::VectorXcd::Zero(n);
    const double scale = -0.5 * params.coupling();
    if (scale == 0.0) return {amplitude.grid, j};
    for (Eigen::Index m = 1; m < n; ++m) {
        acc = r * acc + (0.5 * dt) * (r * amplitude.values(m - 1) + amplitude.values(m));
        j(m) = scale * (bath.mass * acc).sum();
    }
    return {amplitude.grid, j};
}

SteadyState steady_state(const SystemParams& params, const SpinDensity& density, cplx eta) {
    if (!params.is_resonant()) throw std::invalid_argument("steady_state: requires omega_p = omega_c = omega_s");
    const double omega = params.coupling();
    const double kappa = params.kappa();
    if (density.kind() == DensityKind::DiracDelta) {
        if (omega == 0.0) return {-eta / kappa, 0.0};
        return {0.0, (eta / (2.0 * omega)).real()};
    }
    // int rho / (w - w_s - i0) = P int + i pi rho(w_s)
    SokhotskiSplit split = sokhotski_split(density, [&](double w) { return density(w); });
    const cplx integral = split.value();
    const cplx amp = eta / (-kappa + I * omega * omega * integral);
    const cplx spin = I * amp * omega * 0.5 * integral;
    return {amp, spin.real()};
}

ComplexSeries decay_from_steady_state(const SystemParams& params, const SpinBath& bath, const TimeGrid& tgrid,
                                      cplx eta, const SolverOptions& options) {
    if (!params.is_resonant())
        throw std::invalid_argument("decay_from_steady_state: requires omega_p = omega_c = omega_s");
    if (bath.density.kind() == DensityKind::DiracDelta)
        throw std::invalid_argument("decay_from_steady_state: needs a continuous density");
    check_grid(bath, tgrid, options);
    const double dt = tgrid.dt();
    const auto n = static_cast<Eigen::Index>(tgrid.n_steps());
    const double kappa = params.kappa();
    const double omega2 = params.coupling() * params.coupling();
    const cplx ast = steady_state(params, bath.density, eta).amplitude;
    const double rho_s = bath.density(params.omega_s());

    // Released-excitation source: A_st Omega^2 [sum m_j h(x_j,t)/x_j - pi rho_s (1-e^{-kt})/k],
    // h(x,t) = Im[(e^{ixt} - e^{-kt}) / (k + ix)].
    Eigen::ArrayXd x = bath.omega - params.omega_s();
    Eigen::ArrayXcd coef = Eigen::ArrayXcd::Zero(x.size());
    double mass_at_zero = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x(j) == 0.0)
            mass_at_zero += bath.mass(j);
        else
            coef(j) = bath.mass(j) / (x(j) * cplx(kappa, x(j)));
    }
    const double coef_im_sum = coef.sum().imag();
    Eigen::ArrayXd neg_x = -x;
    PhaseWalker walker(neg_x, dt, options.resync_every);  // e^{+ixt}
    Eigen::VectorXcd source(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        double t = dt * static_cast<double>(m);
        double decay = std::exp(-kappa * t);
        double released = (coef * walker.current()).sum().imag() - decay * coef_im_sum;
        released += mass_at_zero * (kappa * t - 1.0 + decay) / (kappa * kappa);
        released -= pi * rho_s * (1.0 - decay) / kappa;
        source(m) = decay * ast + ast * omega2 * released;
        if (m + 1 < n) walker.advance();
    }
    KernelCache kernel = KernelCache::build(params, bath, dt, n - 1);
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(n);
    amp(0) = source(0);
    march(kernel, dt, source, amp, 0, n - 1);
    return {tgrid, amp};
}

ComplexSeries spin_mode_amplitude(const ComplexSeries& amplitude, const SystemParams& params, double omega_k,
                                  double g_k) {
    const double dt = amplitude.grid.dt();
    const auto n = static_cast<Eigen::Index>(amplitude.size());
    const cplx r = std::exp(-cplx(params.gamma(), omega_k - params.omega_p()) * dt);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    cplx acc = 0.0;
    for (Eigen::Index m = 1; m < n; ++m) {
        acc = r * acc + 0.5 * dt * (r * amplitude.values(m - 1) + amplitude.values(m));
        b(m) = -g_k * acc;
    }
    return {amplitude.grid, b};
}

}  // namespace spincav
