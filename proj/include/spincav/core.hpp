#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spincav {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Raised when a numerical procedure cannot deliver a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Units: time in ns, angular frequency in rad/ns.
double mhz_to_angular(double f_mhz);
double angular_to_mhz(double omega);
double ghz_to_angular(double f_ghz);
double angular_to_ghz(double omega);

// Cavity, spin and probe frequencies plus loss rates and collective coupling.
class SystemParams {
public:
    SystemParams(double omega_c, double omega_s, double omega_p,
                 double kappa, double gamma, double coupling);

    // Resonant configuration, omega_c = omega_s = omega_p.
    static SystemParams resonant(double omega_c, double kappa, double coupling);

    double omega_c() const { return omega_c_; }
    double omega_s() const { return omega_s_; }
    double omega_p() const { return omega_p_; }
    double kappa() const { return kappa_; }
    double gamma() const { return gamma_; }
    double coupling() const { return coupling_; }

    // a = omega_c - omega_p - i kappa, the complex cavity rate in the probe frame.
    cplx cavity_rate() const { return {omega_c_ - omega_p_, -kappa_}; }
    bool is_resonant(double tol = 1e-12) const;

    SystemParams with_coupling(double coupling) const;
    SystemParams with_probe(double omega_p) const;
    SystemParams with_kappa(double kappa) const;

private:
    double omega_c_, omega_s_, omega_p_, kappa_, gamma_, coupling_;
};

class TimeGrid {
public:
    TimeGrid(double t_start, double dt, std::size_t n_steps);

    // Grid from t_start covering at least span with step dt.
    static TimeGrid covering(double span, double dt, double t_start = 0.0);

    double t_start() const { return t_start_; }
    double dt() const { return dt_; }
    std::size_t n_steps() const { return n_steps_; }
    double time(std::size_t k) const { return t_start_ + dt_ * static_cast<double>(k); }
    double t_end() const { return time(n_steps_ - 1); }
    Eigen::ArrayXd times() const;

private:
    double t_start_, dt_;
    std::size_t n_steps_;
};

struct DriveSegment {
    double duration;
    cplx eta;
};

// Piecewise-constant drive; zero after the last segment.
class DriveProtocol {
public:
    DriveProtocol() = default;
    explicit DriveProtocol(std::vector<DriveSegment> segments);

    const std::vector<DriveSegment>& segments() const { return segments_; }
    double total_duration() const;
    cplx eta_at(double t) const;
    double energy() const;
    bool empty() const { return segments_.empty(); }
    DriveProtocol scaled(cplx c) const;

private:
    std::vector<DriveSegment> segments_;
};

DriveProtocol rect_pulse(cplx eta, double tau_d);
DriveProtocol phase_switched_train(cplx eta, double tau, std::size_t n_pulses);

struct ComplexSeries {
    TimeGrid grid;
    Eigen::VectorXcd values;

    ComplexSeries(TimeGrid g, Eigen::VectorXcd v);

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    Eigen::ArrayXd abs2() const { return values.array().abs2(); }
    Eigen::ArrayXd real() const { return values.real().array(); }
    Eigen::ArrayXd imag() const { return values.imag().array(); }
};

// Relative L-infinity distance max|a-b| / max|b|.
double relative_linf(const Eigen::Ref<const Eigen::ArrayXd>& a,
                     const Eigen::Ref<const Eigen::ArrayXd>& b);
double relative_linf(const Eigen::Ref<const Eigen::ArrayXcd>& a,
                     const Eigen::Ref<const Eigen::ArrayXcd>& b);

}  // namespace spincav
