#pragma once

#include <string>
#include <vector>

#include "spincav/core.hpp"
#include "spincav/spectral.hpp"

namespace spincav {

// Pole s = sigma + i omega of the Laplace-transformed cavity amplitude (laboratory frame, omega ~ -omega_c).
struct PoleSolution {
    double sigma = 0.0;
    double omega = 0.0;
    cplx residue = 1.0;  // 1 / D'(s)
    double residual = 0.0;

    // Frequency in the frame rotating at omega_c.
    double offset(const SystemParams& params) const { return omega + params.omega_c(); }
};

struct PoleSearchOptions {
    double damping = 0.5;
    int max_iterations = 3000;
    double tolerance = 1e-12;          // on successive iterates, relative to kappa
    double residual_tolerance = 1e-10;
    double min_sigma_fraction = 1e-6;  // |sigma| below this * kappa is a collapse onto the cut
    double dedupe_tolerance = 1e-6;    // relative to max(kappa, Omega)
};

struct PoleSearchResult {
    std::vector<PoleSolution> poles;
    std::vector<std::string> diagnostics;
};

// U(omega) = rho / ((omega - omega_c - Omega^2 delta + i kappa)^2 + (pi Omega^2 rho)^2), truncated rho.
cplx kernel_U(const SystemParams& params, const SpinDensity& density, double omega, double lamb);
cplx kernel_U(const SystemParams& params, const SpinDensity& density, double omega);

// Lorentzian-peak condition omega - omega_c - Omega^2 delta(omega).
double resonance_mismatch(const SystemParams& params, const SpinDensity& density, double omega);

// Integrals over the truncated density with y = x + nu, x = omega - omega_c.
struct PoleIntegrals {
    double inv;    // int rho / (sigma^2 + y^2)
    double odd;    // int rho y / (sigma^2 + y^2)
    cplx inv_sq;   // int rho / (sigma + i y)^2
};
PoleIntegrals pole_integrals(const SpinDensity& density, double omega_c, double sigma, double nu);

PoleSearchResult find_poles(const SystemParams& params, const SpinDensity& density,
                            const PoleSearchOptions& options = {});

// Residue weight 1 / (1 - Omega^2 int rho / (sigma + i(omega_j + omega))^2).
cplx residue(const SystemParams& params, const SpinDensity& density, const PoleSolution& pole);

struct InvertOptions {
    double step = 0.0;  // frequency step; 0 picks fwhm/400 (or delta/200), refined to resolve t_max
    PoleSearchOptions poles;
};

struct Inversion {
    ComplexSeries amplitude;  // rotating frame, A(0) ~ 1
    std::vector<PoleSolution> poles;
    std::vector<std::string> diagnostics;
    double step = 0.0;
};

// Single-photon free decay from the branch-cut integral plus pole residues.
Inversion invert_detailed(const SystemParams& params, const SpinDensity& density, const TimeGrid& tgrid,
                          const InvertOptions& options = {});
ComplexSeries invert(const SystemParams& params, const SpinDensity& density, const TimeGrid& tgrid,
                     const InvertOptions& options = {});

enum class DecayMethod { TimeFit, Markov, Asymptotic, LorentzFormula, NoBroadening };
const char* to_string(DecayMethod method);

struct DecayRateEstimate {
    double gamma = 0.0;
    DecayMethod method = DecayMethod::TimeFit;
    std::string note;
};

// Two exponents of the overdamped regime, equal in the underdamped one.
struct RateBranches {
    double low = 0.0;
    double high = 0.0;
    bool overdamped = false;
};

DecayRateEstimate decay_rate_timefit(const ComplexSeries& series);
DecayRateEstimate gamma_markov(const SystemParams& params, const SpinDensity& density);
DecayRateEstimate gamma_asymptotic(const SystemParams& params, const SpinDensity& density);
RateBranches gamma_lorentz_formula(double coupling, double delta, double kappa);
RateBranches gamma_no_broadening(double coupling, double kappa);

}  // namespace spincav
