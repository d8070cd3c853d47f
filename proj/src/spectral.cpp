#include "spincav/spectral.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

namespace spincav {

const char* to_string(DensityKind kind) {
    switch (kind) {
        case DensityKind::QGaussian: return "q-gaussian";
        case DensityKind::Lorentzian: return "lorentzian";
        case DensityKind::DiracDelta: return "delta";
    }
    return "unknown";
}

namespace {

// The Lorentzian is the q = 2 member of the family, which keeps one code path.
double shape(double q, double delta, double x) {
    double z = 1.0 + (q - 1.0) * x * x / (delta * delta);
    if (q == 2.0) return 1.0 / z;
    return std::pow(z, -1.0 / (q - 1.0));
}

}  // namespace

SpinDensity SpinDensity::q_gaussian(double q, double delta, double center, const SupportPolicy& policy) {
    if (!(q > 1.0 && q < 3.0)) throw std::invalid_argument("q-Gaussian: q must lie in (1, 3)");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("q-Gaussian: delta must be positive");
    if (!std::isfinite(center)) throw std::invalid_argument("q-Gaussian: center must be finite");
    SpinDensity d;
    d.kind_ = DensityKind::QGaussian;
    d.q_ = q;
    d.delta_ = delta;
    d.center_ = center;
    d.norm_ = d.analytic_norm();
    d.choose_support(policy);
    return d;
}

SpinDensity SpinDensity::q_gaussian_from_fwhm(double q, double fwhm, double center, const SupportPolicy& policy) {
    return q_gaussian(q, delta_from_fwhm(q, fwhm), center, policy);
}

SpinDensity SpinDensity::lorentzian(double delta, double center, const SupportPolicy& policy) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("Lorentzian: delta must be positive");
    if (!std::isfinite(center)) throw std::invalid_argument("Lorentzian: center must be finite");
    SpinDensity d;
    d.kind_ = DensityKind::Lorentzian;
    d.q_ = 2.0;
    d.delta_ = delta;
    d.center_ = center;
    d.norm_ = d.analytic_norm();
    d.choose_support(policy);
    return d;
}

SpinDensity SpinDensity::dirac(double center) {
    if (!std::isfinite(center)) throw std::invalid_argument("delta density: center must be finite");
    SpinDensity d;
    d.kind_ = DensityKind::DiracDelta;
    d.center_ = center;
    d.norm_ = 1.0;
    return d;
}

void SpinDensity::choose_support(const SupportPolicy& policy) {
    if (!(policy.tail_tolerance > 0.0 && policy.tail_tolerance < 1.0))
        throw std::invalid_argument("support policy: tail tolerance must lie in (0, 1)");
    if (!(policy.max_half_width > 0.0))
        throw std::invalid_argument("support policy: max half-width must be positive");
    double p = 1.0 / (q_ - 1.0);
    double u = boost::math::ibeta_inv(p - 0.5, 0.5, policy.tail_tolerance);
    double needed = delta_ * std::sqrt((1.0 / u - 1.0) / (q_ - 1.0));
    double cap = policy.max_half_width * delta_;
    if (needed > cap) {
        if (policy.strict)
            throw NumericalError("support half-width " + std::to_string(needed / delta_) +
                                 " delta exceeds the cap of " + std::to_string(policy.max_half_width));
        half_width_ = cap;
        capped_ = true;
    } else {
        half_width_ = needed;
        capped_ = false;
    }
    tail_mass_ = tail_fraction(half_width_);
}

double SpinDensity::fwhm() const {
    if (kind_ == DensityKind::DiracDelta) return 0.0;
    return fwhm_relation(q_, delta_);
}

double SpinDensity::operator()(double omega) const {
    double x = omega - center_;
    if (kind_ == DensityKind::DiracDelta) return x == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return norm_ * shape(q_, delta_, x);
}

double SpinDensity::derivative(double omega) const {
    double x = omega - center_;
    if (kind_ == DensityKind::DiracDelta) return 0.0;
    double z = 1.0 + (q_ - 1.0) * x * x / (delta_ * delta_);
    return -2.0 * norm_ * x / (delta_ * delta_) * shape(q_, delta_, x) / z;
}

SpinDensity SpinDensity::with_norm(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("density norm must be positive");
    SpinDensity d = *this;
    d.norm_ = c;
    return d;
}

SpinDensity SpinDensity::with_half_width(double w) const {
    if (kind_ == DensityKind::DiracDelta) return *this;
    if (!(w > 0.0)) throw std::invalid_argument("support half-width must be positive");
    SpinDensity d = *this;
    d.half_width_ = w;
    d.tail_mass_ = tail_fraction(w);
    return d;
}

double SpinDensity::analytic_norm() const {
    if (kind_ == DensityKind::DiracDelta) return 1.0;
    double p = 1.0 / (q_ - 1.0);
    return std::sqrt(q_ - 1.0) / (delta_ * boost::math::beta(0.5, p - 0.5));
}

double SpinDensity::tail_fraction(double w) const {
    if (kind_ == DensityKind::DiracDelta) return 0.0;
    if (w <= 0.0) return 1.0;
    double p = 1.0 / (q_ - 1.0);
    double u = 1.0 / (1.0 + (q_ - 1.0) * w * w / (delta_ * delta_));
    return boost::math::ibeta(p - 0.5, 0.5, u);
}

double qgauss_eval(const SpinDensity& density, double omega) {
    if (density.kind() != DensityKind::QGaussian)
        throw std::invalid_argument("qgauss_eval: density is not a q-Gaussian");
    return density(omega);
}

double fwhm_relation(double q, double delta) {
    if (!(q > 1.0 && q < 3.0)) throw std::invalid_argument("fwhm_relation: q must lie in (1, 3)");
    if (!(delta > 0.0)) throw std::invalid_argument("fwhm_relation: delta must be positive");
    return 2.0 * delta * std::sqrt((std::pow(2.0, q) - 2.0) / (2.0 * q - 2.0));
}

double delta_from_fwhm(double q, double fwhm) {
    if (!(fwhm > 0.0)) throw std::invalid_argument("delta_from_fwhm: fwhm must be positive");
    return fwhm / fwhm_relation(q, 1.0);
}

FrequencyGrid FrequencyGrid::symmetric(double center, double half_width, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("FrequencyGrid: step must be positive");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("FrequencyGrid: half-width must be positive");
    auto m = static_cast<Eigen::Index>(std::ceil(half_width / step - 1e-9));
    m = std::max<Eigen::Index>(m, 1);
    FrequencyGrid g;
    g.center_ = center;
    g.step_ = step;
    g.offsets_ = Eigen::ArrayXd::LinSpaced(2 * m + 1, -static_cast<double>(m), static_cast<double>(m)) * step;
    g.weights_ = Eigen::ArrayXd::Constant(2 * m + 1, step);
    g.weights_(0) = g.weights_(2 * m) = 0.5 * step;
    return g;
}

FrequencyGrid FrequencyGrid::single(double center) {
    FrequencyGrid g;
    g.center_ = center;
    g.step_ = 0.0;
    g.offsets_ = Eigen::ArrayXd::Zero(1);
    g.weights_ = Eigen::ArrayXd::Ones(1);
    return g;
}

double default_grid_step(const SpinDensity& density) {
    switch (density.kind()) {
        case DensityKind::QGaussian: return density.fwhm() / 200.0;
        case DensityKind::Lorentzian: return density.delta() / 100.0;
        case DensityKind::DiracDelta: return 0.0;
    }
    return 0.0;
}

double normalize(const SpinDensity& density, const FrequencyGrid& grid) {
    if (density.kind() == DensityKind::DiracDelta) return 1.0;
    if (grid.half_width() < density.half_width() * (1.0 - 1e-12) ||
        std::abs(grid.center() - density.center()) > 1e-12 * std::max(1.0, std::abs(density.center())))
        throw std::invalid_argument("normalize: grid does not cover the density support");
    if (density.capped()) return density.analytic_norm();
    Eigen::ArrayXd omegas = grid.omegas();
    SpinDensity unit = density.with_norm(1.0);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < omegas.size(); ++j) sum += grid.weights()(j) * unit(omegas(j));
    return 1.0 / sum;
}

SpinBath make_bath(const SpinDensity& density, double step) {
    if (density.kind() == DensityKind::DiracDelta) {
        FrequencyGrid grid = FrequencyGrid::single(density.center());
        return {density, grid, grid.omegas(), Eigen::ArrayXd::Ones(1)};
    }
    if (step <= 0.0) step = default_grid_step(density);
    FrequencyGrid grid = FrequencyGrid::symmetric(density.center(), density.half_width(), step);
    SpinDensity d = density.with_half_width(grid.half_width());
    d = d.with_norm(normalize(d, grid));
    Eigen::ArrayXd omegas = grid.omegas();
    Eigen::ArrayXd rho = omegas.unaryExpr([&](double w) { return d(w); });
    Eigen::ArrayXd mass = grid.weights() * rho;
    return {d, grid, omegas, mass};
}

double lamb_shift(const SpinDensity& density, double omega, double step) {
    double x = omega - density.center();
    if (density.kind() == DensityKind::DiracDelta) return x == 0.0 ? 0.0 : 1.0 / x;
    if (step <= 0.0) step = default_grid_step(density);
    // P int rho(w')/(omega - w') = int_0^inf [rho(omega - y) - rho(omega + y)] / y dy
    double reach = std::abs(x) + density.half_width();
    auto kmax = static_cast<long>(std::ceil(reach / step)) + 1;
    double sum = 0.0;
    for (long k = kmax; k >= 1; --k) {
        double y = step * static_cast<double>(k);
        sum += (density.truncated(omega - y) - density.truncated(omega + y)) / y;
    }
    double central = density.in_support(omega) ? -step * density.derivative(omega) : 0.0;
    return step * sum + central;
}

Eigen::ArrayXd lamb_shift_on_grid(const SpinDensity& density, const FrequencyGrid& grid) {
    if (density.kind() == DensityKind::DiracDelta)
        throw std::invalid_argument("lamb_shift_on_grid: needs a continuous density");
    const Eigen::Index n = grid.size();
    const double h = grid.step();
    Eigen::ArrayXd omegas = grid.omegas();
    Eigen::ArrayXd rho = omegas.unaryExpr([&](double w) { return density.truncated(w); });
    Eigen::ArrayXd shift = Eigen::ArrayXd::Zero(n);
    for (Eigen::Index k = 1; k < n; ++k) {
        double inv = 1.0 / static_cast<double>(k);
        shift.segment(k, n - k) += rho.head(n - k) * inv;
        shift.head(n - k) -= rho.tail(n - k) * inv;
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (density.in_support(omegas(i))) shift(i) -= h * density.derivative(omegas(i));
    return shift;
}

SokhotskiSplit sokhotski_split(const SpinDensity& density, const std::function<double(double)>& f, double step) {
    if (density.kind() == DensityKind::DiracDelta)
        throw std::invalid_argument("sokhotski_split: needs a continuous density");
    if (step <= 0.0) step = default_grid_step(density);
    const double ws = density.center();
    auto g = [&](double y) { return (f(ws + y) - f(ws - y)) / y; };
    auto kmax = static_cast<long>(std::floor(density.half_width() / step));
    double sum = 0.0;
    for (long k = kmax; k >= 1; --k) sum += g(step * static_cast<double>(k));
    // g is even in y, so Richardson on g(h), g(2h) gives g(0) to O(h^4)
    double g0 = kmax >= 2 ? (4.0 * g(step) - g(2.0 * step)) / 3.0 : g(step);
    SokhotskiSplit out;
    out.pv = step * (sum + 0.5 * g0);
    out.imag = pi * f(ws);
    return out;
}

}  // namespace spincav
