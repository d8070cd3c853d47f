#include "spincav/lorentz.hpp"

#include <cmath>
#include <string>

#include "spincav/numerics.hpp"

namespace spincav {

LorentzParams::LorentzParams(double coupling_, double delta_, double kappa_, double eta_, double tau_d_)
    : coupling(coupling_), delta(delta_), kappa(kappa_), eta(eta_), tau_d(tau_d_) {
    if (!(coupling >= 0.0) || !(delta >= 0.0)) throw std::invalid_argument("LorentzParams: rates must be non-negative");
    if (!(kappa > 0.0)) throw std::invalid_argument("LorentzParams: kappa must be positive");
    if (!std::isfinite(eta)) throw std::invalid_argument("LorentzParams: eta must be finite");
    if (!(tau_d >= 0.0)) throw std::invalid_argument("LorentzParams: tau_d must be non-negative");
}

namespace {

// e^{-sigma t} (P cos wt + Q sin wt) and its derivatives.
struct Damped {
    double sigma, w, P, Q;

    Damped derivative() const { return {sigma, w, -sigma * P + w * Q, -sigma * Q - w * P}; }
    double at(double t) const { return std::exp(-sigma * t) * (P * std::cos(w * t) + Q * std::sin(w * t)); }
};

Jet jet(double offset, const Damped& f, double t) {
    Damped f1 = f.derivative();
    Damped f2 = f1.derivative();
    return {offset + f.at(t), f1.at(t), f2.at(t)};
}

double denom(const LorentzParams& p) { return p.coupling * p.coupling + p.delta * p.kappa; }

}  // namespace

std::pair<cplx, cplx> exponents(const LorentzParams& p) {
    double disc = (p.delta - p.kappa) * (p.delta - p.kappa) - 4.0 * p.coupling * p.coupling;
    cplx root = std::sqrt(cplx(disc, 0.0));
    cplx base(-(p.delta + p.kappa), 0.0);
    return {(base + root) / 2.0, (base - root) / 2.0};
}

bool underdamped(const LorentzParams& p) {
    return 4.0 * p.coupling * p.coupling > (p.delta - p.kappa) * (p.delta - p.kappa);
}

double rabi_frequency(const LorentzParams& p) {
    if (!underdamped(p)) throw std::domain_error("rabi_frequency: overdamped, no oscillation");
    return std::sqrt(4.0 * p.coupling * p.coupling - (p.delta - p.kappa) * (p.delta - p.kappa));
}

double oscillation_boundary(double delta, double kappa) { return std::abs(delta - kappa) / 2.0; }

double steady_amplitude(const LorentzParams& p) { return -p.delta * p.eta / denom(p); }

double steady_spin(const LorentzParams& p) { return p.eta * p.coupling / (2.0 * denom(p)); }

Jet cavity_on_jet(const LorentzParams& p, double t) {
    double wr = rabi_frequency(p), d = denom(p);
    double sigma = 0.5 * (p.delta + p.kappa);
    Damped f{sigma, 0.5 * wr, p.eta * p.delta / d,
             -p.eta * (wr * wr - p.delta * p.delta + p.kappa * p.kappa) / (2.0 * wr * d)};
    return jet(steady_amplitude(p), f, t);
}

Jet spin_on_jet(const LorentzParams& p, double t) {
    double wr = rabi_frequency(p), d = denom(p);
    double sigma = 0.5 * (p.delta + p.kappa);
    Damped f{sigma, 0.5 * wr, -p.eta * p.coupling / (2.0 * d),
             -p.eta * p.coupling * (p.delta + p.kappa) / (2.0 * wr * d)};
    return jet(steady_spin(p), f, t);
}

Jet cavity_off_jet(const LorentzParams& p, double t) {
    double wr = rabi_frequency(p), d = denom(p);
    double sigma = 0.5 * (p.delta + p.kappa);
    Damped f{sigma, 0.5 * wr, -p.eta * p.delta / d,
             p.eta * (wr * wr - p.delta * p.delta + p.kappa * p.kappa) / (2.0 * wr * d)};
    return jet(0.0, f, t - p.tau_d);
}

Jet spin_off_jet(const LorentzParams& p, double t) {
    double wr = rabi_frequency(p), d = denom(p);
    double sigma = 0.5 * (p.delta + p.kappa);
    Damped f{sigma, 0.5 * wr, p.eta * p.coupling / (2.0 * d),
             p.eta * p.coupling * (p.delta + p.kappa) / (2.0 * wr * d)};
    return jet(0.0, f, t - p.tau_d);
}

double cavity_on(const LorentzParams& p, double t) { return cavity_on_jet(p, t).value; }
double spin_on(const LorentzParams& p, double t) { return spin_on_jet(p, t).value; }
double cavity_off(const LorentzParams& p, double t) { return cavity_off_jet(p, t).value; }
double spin_off(const LorentzParams& p, double t) { return spin_off_jet(p, t).value; }

double cavity(const LorentzParams& p, double t) {
    if (t < 0.0) return 0.0;
    if (t <= p.tau_d) return cavity_on(p, t);
    // superposition keeps whatever transient is left at switch-off
    return cavity_off(p, t) + cavity_on(p, t) - steady_amplitude(p);
}

double spin(const LorentzParams& p, double t) {
    if (t < 0.0) return 0.0;
    if (t <= p.tau_d) return spin_on(p, t);
    return spin_off(p, t) + spin_on(p, t) - steady_spin(p);
}

FirstPeak overshoot_first_peak(const LorentzParams& p, double tol) {
    double wr = rabi_frequency(p);
    // first zero of A_off, then the maximum of |A|^2 before the next zero
    double theta0 = std::atan2(2.0 * wr * p.delta, wr * wr - p.delta * p.delta + p.kappa * p.kappa);
    double start = p.tau_d + 2.0 * theta0 / wr;
    auto intensity = [&](double t) {
        double a = cavity_off(p, t);
        return a * a;
    };
    Extremum e = golden_section_maximize(intensity, start, start + two_pi / wr, tol);
    return {e.x, e.value};
}

double overshoot_formula(const LorentzParams& p) {
    double wr = rabi_frequency(p);
    double ast = steady_amplitude(p);
    double arg = -(p.delta - p.kappa) / (2.0 * p.coupling);
    return ast * ast * std::exp(-(2.0 * (p.delta + p.kappa) / wr) * std::acos(arg));
}

double overshoot_threshold(double delta, double kappa, double tol) {
    if (tol <= 0.0) tol = mhz_to_angular(1e-4);
    auto excess = [&](double omega) {
        LorentzParams p(omega, delta, kappa, 1.0, 0.0);
        double ast = steady_amplitude(p);
        return overshoot_first_peak(p, 1e-9 / (delta + kappa)).value - ast * ast;
    };
    double lo = oscillation_boundary(delta, kappa) * (1.0 + 1e-6) + 1e-9 * (delta + kappa);
    double hi_limit = 200.0 * (delta + kappa);
    double prev = lo;
    double fprev = excess(prev);
    for (double omega = lo * 1.02 + 1e-6 * (delta + kappa); omega <= hi_limit; omega *= 1.02) {
        double f = excess(omega);
        if (fprev < 0.0 && f >= 0.0) return bisect_root(excess, prev, omega, tol);
        prev = omega;
        fprev = f;
    }
    throw NumericalError("overshoot_threshold: no sign change up to Omega = " + std::to_string(hi_limit));
}

LorentzFit fit_lorentz_to(double omega_r, double steady_abs, double kappa, double eta) {
    if (!(omega_r > 0.0) || !(steady_abs > 0.0) || !(kappa > 0.0))
        throw std::invalid_argument("fit_lorentz_to: targets must be positive");
    // |A_st| = eta Delta / (Omega^2 + Delta kappa) => Omega^2 = R Delta with R = eta/|A_st| - kappa
    double r = eta / steady_abs - kappa;
    if (!(r > 0.0)) throw NumericalError("fit_lorentz_to: steady-state target is not below eta/kappa");
    // Omega_R^2 = 4 R Delta - (Delta - kappa)^2
    double b = 2.0 * r + kappa;
    double disc = b * b - kappa * kappa - omega_r * omega_r;
    if (disc < 0.0) throw NumericalError("fit_lorentz_to: no Lorentzian matches both targets");
    double delta = b - std::sqrt(disc);
    return {std::sqrt(r * delta), delta};
}

}  // namespace spincav
