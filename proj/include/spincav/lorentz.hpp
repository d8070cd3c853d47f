#pragma once

#include <utility>

#include "spincav/core.hpp"

namespace spincav {

// Closed-form dynamics for a Lorentzian spin density at resonance.
struct LorentzParams {
    double coupling;
    double delta;
    double kappa;
    double eta;
    double tau_d;

    LorentzParams(double coupling, double delta, double kappa, double eta, double tau_d);
};

// Value with first and second time derivatives.
struct Jet {
    double value;
    double d1;
    double d2;
};

std::pair<cplx, cplx> exponents(const LorentzParams& p);
bool underdamped(const LorentzParams& p);
// Throws std::domain_error when 4 Omega^2 <= (Delta - kappa)^2.
double rabi_frequency(const LorentzParams& p);
double oscillation_boundary(double delta, double kappa);

double steady_amplitude(const LorentzParams& p);
double steady_spin(const LorentzParams& p);

// Driven phase, 0 <= t <= tau_d.
Jet cavity_on_jet(const LorentzParams& p, double t);
Jet spin_on_jet(const LorentzParams& p, double t);
double cavity_on(const LorentzParams& p, double t);
double spin_on(const LorentzParams& p, double t);

// Free phase, t >= tau_d, released from the driven steady state.
Jet cavity_off_jet(const LorentzParams& p, double t);
Jet spin_off_jet(const LorentzParams& p, double t);
double cavity_off(const LorentzParams& p, double t);
double spin_off(const LorentzParams& p, double t);

// Exact pulse response; after switch-off it adds the driven transient left at tau_d.
double cavity(const LorentzParams& p, double t);
double spin(const LorentzParams& p, double t);

struct FirstPeak {
    double time;
    double value;  // |A|^2
};

// First local maximum of |A|^2 after switch-off, by golden-section search.
FirstPeak overshoot_first_peak(const LorentzParams& p, double tol = 1e-6);
// A_1^2 = A_st^2 exp(-(2(Delta+kappa)/Omega_R) arccos(-(Delta-kappa)/(2 Omega))).
double overshoot_formula(const LorentzParams& p);
// Coupling where the first post-pulse peak equals the steady-state intensity.
double overshoot_threshold(double delta, double kappa, double tol = 0.0);

// (Omega, Delta) giving a target Rabi frequency and steady-state |A| for given kappa and eta.
struct LorentzFit {
    double coupling;
    double delta;
};
LorentzFit fit_lorentz_to(double omega_r, double steady_abs, double kappa, double eta);

}  // namespace spincav
