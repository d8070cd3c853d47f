#pragma once

#include <functional>

#include "spincav/core.hpp"

namespace spincav {

enum class DensityKind { QGaussian, Lorentzian, DiracDelta };

const char* to_string(DensityKind kind);

// How far the support of a heavy-tailed density is extended.
struct SupportPolicy {
    double tail_tolerance = 1e-6;   // analytic mass allowed outside the support
    double max_half_width = 100.0;  // cap on the half-width, in units of delta
    bool strict = false;            // throw instead of capping
};

// Spin spectral density rho(omega) with its truncated support.
class SpinDensity {
public:
    static SpinDensity q_gaussian(double q, double delta, double center, const SupportPolicy& policy = {});
    static SpinDensity q_gaussian_from_fwhm(double q, double fwhm, double center, const SupportPolicy& policy = {});
    static SpinDensity lorentzian(double delta, double center, const SupportPolicy& policy = {});
    static SpinDensity dirac(double center);

    DensityKind kind() const { return kind_; }
    double q() const { return q_; }
    double delta() const { return delta_; }
    double center() const { return center_; }
    double norm() const { return norm_; }
    double half_width() const { return half_width_; }
    double support_min() const { return center_ - half_width_; }
    double support_max() const { return center_ + half_width_; }
    bool in_support(double omega) const { return std::abs(omega - center_) <= half_width_; }
    // Analytic mass of the normalized density outside the support.
    double tail_mass() const { return tail_mass_; }
    // True when the support was capped and the analytic norm is kept.
    bool capped() const { return capped_; }
    double fwhm() const;

    // Analytic value, also outside the support. Dirac returns +inf at the center, 0 elsewhere.
    double operator()(double omega) const;
    double derivative(double omega) const;
    // Value with the truncation applied.
    double truncated(double omega) const { return in_support(omega) ? (*this)(omega) : 0.0; }

    SpinDensity with_norm(double c) const;
    // Same density with the support half-width replaced; tail mass is recomputed.
    SpinDensity with_half_width(double w) const;
    double analytic_norm() const;
    // Fraction of the analytic mass beyond |omega - center| > w.
    double tail_fraction(double w) const;

private:
    SpinDensity() = default;
    void choose_support(const SupportPolicy& policy);

    DensityKind kind_ = DensityKind::DiracDelta;
    double q_ = 0.0;
    double delta_ = 0.0;
    double center_ = 0.0;
    double norm_ = 1.0;
    double half_width_ = 0.0;
    double tail_mass_ = 0.0;
    bool capped_ = false;
};

double qgauss_eval(const SpinDensity& density, double omega);
double fwhm_relation(double q, double delta);
double delta_from_fwhm(double q, double fwhm);

// Uniform symmetric frequency grid with trapezoidal weights.
class FrequencyGrid {
public:
    static FrequencyGrid symmetric(double center, double half_width, double step);
    static FrequencyGrid single(double center);

    double center() const { return center_; }
    double step() const { return step_; }
    Eigen::Index size() const { return offsets_.size(); }
    const Eigen::ArrayXd& offsets() const { return offsets_; }
    Eigen::ArrayXd omegas() const { return offsets_ + center_; }
    const Eigen::ArrayXd& weights() const { return weights_; }
    double half_width() const { return offsets_.size() > 1 ? offsets_(offsets_.size() - 1) : 0.0; }

private:
    double center_ = 0.0;
    double step_ = 0.0;
    Eigen::ArrayXd offsets_;
    Eigen::ArrayXd weights_;
};

double default_grid_step(const SpinDensity& density);

// Normalization constant making the quadrature of rho over the support equal 1.
// For capped supports the analytic constant is returned and the quadrature equals 1 - tail_mass.
double normalize(const SpinDensity& density, const FrequencyGrid& grid);

// Density discretized into quadrature nodes: mass_j = w_j rho(omega_j).
struct SpinBath {
    SpinDensity density;
    FrequencyGrid grid;
    Eigen::ArrayXd omega;
    Eigen::ArrayXd mass;

    double step() const { return grid.step(); }
    double total_mass() const { return mass.sum(); }
};

// Builds a normalized bath; step <= 0 selects default_grid_step.
SpinBath make_bath(const SpinDensity& density, double step = 0.0);

// Principal value P int rho(w') / (omega - w') dw' by symmetric pairing around omega.
double lamb_shift(const SpinDensity& density, double omega, double step = 0.0);

// Lamb shift at every node of a uniform grid, using the truncated density on that grid.
Eigen::ArrayXd lamb_shift_on_grid(const SpinDensity& density, const FrequencyGrid& grid);

// int f(w)/(w - omega_s - i0) over the support = pv + i*imag.
struct SokhotskiSplit {
    double pv = 0.0;
    double imag = 0.0;
    cplx value() const { return {pv, imag}; }
};

SokhotskiSplit sokhotski_split(const SpinDensity& density, const std::function<double(double)>& f,
                               double step = 0.0);

}  // namespace spincav
