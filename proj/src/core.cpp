#include "spincav/core.hpp"

#include <algorithm>
#include <cmath>

namespace spincav {

double mhz_to_angular(double f_mhz) { return two_pi * f_mhz * 1e-3; }
double angular_to_mhz(double omega) { return omega / (two_pi * 1e-3); }
double ghz_to_angular(double f_ghz) { return two_pi * f_ghz; }
double angular_to_ghz(double omega) { return omega / two_pi; }

SystemParams::SystemParams(double omega_c, double omega_s, double omega_p,
                           double kappa, double gamma, double coupling)
    : omega_c_(omega_c), omega_s_(omega_s), omega_p_(omega_p),
      kappa_(kappa), gamma_(gamma), coupling_(coupling) {
    if (!std::isfinite(omega_c) || !std::isfinite(omega_s) || !std::isfinite(omega_p))
        throw std::invalid_argument("SystemParams: frequencies must be finite");
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw std::invalid_argument("SystemParams: kappa must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("SystemParams: gamma must be non-negative");
    if (!(coupling >= 0.0) || !std::isfinite(coupling))
        throw std::invalid_argument("SystemParams: coupling must be non-negative");
    if (!(coupling < std::abs(omega_c) / 50.0))
        throw std::invalid_argument("SystemParams: coupling violates rotating-wave limit (Omega < omega_c/50)");
}

SystemParams SystemParams::resonant(double omega_c, double kappa, double coupling) {
    return {omega_c, omega_c, omega_c, kappa, 0.0, coupling};
}

bool SystemParams::is_resonant(double tol) const {
    double scale = std::max(1.0, std::abs(omega_c_));
    return std::abs(omega_c_ - omega_p_) <= tol * scale && std::abs(omega_c_ - omega_s_) <= tol * scale;
}

SystemParams SystemParams::with_coupling(double coupling) const {
    return {omega_c_, omega_s_, omega_p_, kappa_, gamma_, coupling};
}

SystemParams SystemParams::with_probe(double omega_p) const {
    return {omega_c_, omega_s_, omega_p, kappa_, gamma_, coupling_};
}

SystemParams SystemParams::with_kappa(double kappa) const {
    return {omega_c_, omega_s_, omega_p_, kappa, gamma_, coupling_};
}

TimeGrid::TimeGrid(double t_start, double dt, std::size_t n_steps)
    : t_start_(t_start), dt_(dt), n_steps_(n_steps) {
    if (!std::isfinite(t_start)) throw std::invalid_argument("TimeGrid: t_start must be finite");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
    if (n_steps < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
}

TimeGrid TimeGrid::covering(double span, double dt, double t_start) {
    if (!(span > 0.0)) throw std::invalid_argument("TimeGrid: span must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
    auto n = static_cast<std::size_t>(std::ceil(span / dt - 1e-9)) + 1;
    return {t_start, dt, n};
}

Eigen::ArrayXd TimeGrid::times() const {
    return Eigen::ArrayXd::LinSpaced(static_cast<Eigen::Index>(n_steps_), 0.0,
                                     static_cast<double>(n_steps_ - 1)) * dt_ + t_start_;
}

DriveProtocol::DriveProtocol(std::vector<DriveSegment> segments) : segments_(std::move(segments)) {
    for (const auto& s : segments_) {
        if (!(s.duration > 0.0) || !std::isfinite(s.duration))
            throw std::invalid_argument("DriveProtocol: segment durations must be positive");
        if (!std::isfinite(s.eta.real()) || !std::isfinite(s.eta.imag()))
            throw std::invalid_argument("DriveProtocol: segment amplitude must be finite");
    }
}

double DriveProtocol::total_duration() const {
    double t = 0.0;
    for (const auto& s : segments_) t += s.duration;
    return t;
}

cplx DriveProtocol::eta_at(double t) const {
    if (t < 0.0) return 0.0;
    double start = 0.0;
    for (const auto& s : segments_) {
        if (t < start + s.duration) return s.eta;
        start += s.duration;
    }
    return 0.0;
}

double DriveProtocol::energy() const {
    double e = 0.0;
    for (const auto& s : segments_) e += std::norm(s.eta) * s.duration;
    return e;
}

DriveProtocol DriveProtocol::scaled(cplx c) const {
    auto segs = segments_;
    for (auto& s : segs) s.eta *= c;
    return DriveProtocol(std::move(segs));
}

DriveProtocol rect_pulse(cplx eta, double tau_d) {
    if (!(tau_d > 0.0)) throw std::invalid_argument("rect_pulse: tau_d must be positive");
    return DriveProtocol({{tau_d, eta}});
}

DriveProtocol phase_switched_train(cplx eta, double tau, std::size_t n_pulses) {
    if (!(tau > 0.0)) throw std::invalid_argument("phase_switched_train: tau must be positive");
    if (n_pulses < 1) throw std::invalid_argument("phase_switched_train: need at least one pulse");
    std::vector<DriveSegment> segs;
    segs.reserve(n_pulses);
    for (std::size_t n = 0; n < n_pulses; ++n) segs.push_back({tau, n % 2 == 0 ? eta : -eta});
    return DriveProtocol(std::move(segs));
}

ComplexSeries::ComplexSeries(TimeGrid g, Eigen::VectorXcd v) : grid(g), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != grid.n_steps())
        throw std::invalid_argument("ComplexSeries: value count does not match grid");
}

double relative_linf(const Eigen::Ref<const Eigen::ArrayXd>& a,
                     const Eigen::Ref<const Eigen::ArrayXd>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("relative_linf: size mismatch");
    double scale = b.abs().maxCoeff();
    double diff = (a - b).abs().maxCoeff();
    return scale > 0.0 ? diff / scale : diff;
}

double relative_linf(const Eigen::Ref<const Eigen::ArrayXcd>& a,
                     const Eigen::Ref<const Eigen::ArrayXcd>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("relative_linf: size mismatch");
    double scale = b.abs().maxCoeff();
    double diff = (a - b).abs().maxCoeff();
    return scale > 0.0 ? diff / scale : diff;
}

}  // namespace spincav
