#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace spincav {

// Indices i with y(i-1) < y(i) >= y(i+1) and y(i) > floor.
std::vector<Eigen::Index> local_maxima(const Eigen::Ref<const Eigen::ArrayXd>& y, double floor = 0.0);
std::vector<Eigen::Index> local_minima(const Eigen::Ref<const Eigen::ArrayXd>& y);

// Parabolic refinement of a sampled extremum at index i; returns the fractional index.
double refine_extremum(const Eigen::Ref<const Eigen::ArrayXd>& y, Eigen::Index i);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit linear_fit(const Eigen::Ref<const Eigen::ArrayXd>& x, const Eigen::Ref<const Eigen::ArrayXd>& y);

struct Extremum {
    double x = 0.0;
    double value = 0.0;
};

// Golden-section search for the maximum of a unimodal f on [a, b].
Extremum golden_section_maximize(const std::function<double(double)>& f, double a, double b, double tol);

// Exponents s1, s2 of y_k ~ c1 e^{s1 t_k} + c2 e^{s2 t_k} on a uniform grid (linear-prediction fit).
std::array<std::complex<double>, 2> prony_two_exponents(const Eigen::Ref<const Eigen::ArrayXd>& y, double h);

// Bisection for a sign change of f on [a, b].
double bisect_root(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace spincav
