#include "spincav/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phase.hpp"
#include "spincav/numerics.hpp"

namespace spincav {

namespace {

constexpr cplx I{0.0, 1.0};

template <class F>
double gk(F f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-10);
}

void check_resonant(const SystemParams& params, const char* where) {
    if (!params.is_resonant())
        throw std::invalid_argument(std::string(where) + ": requires omega_p = omega_c = omega_s");
}

double invert_default_step(const SpinDensity& density) {
    switch (density.kind()) {
        case DensityKind::QGaussian: return density.fwhm() / 400.0;
        case DensityKind::Lorentzian: return density.delta() / 200.0;
        case DensityKind::DiracDelta: return 0.0;
    }
    return 0.0;
}

}  // namespace

const char* to_string(DecayMethod method) {
    switch (method) {
        case DecayMethod::TimeFit: return "timefit";
        case DecayMethod::Markov: return "markov";
        case DecayMethod::Asymptotic: return "asymptotic";
        case DecayMethod::LorentzFormula: return "lorentz";
        case DecayMethod::NoBroadening: return "no-broadening";
    }
    return "unknown";
}

cplx kernel_U(const SystemParams& params, const SpinDensity& density, double omega, double lamb) {
    const double omega2 = params.coupling() * params.coupling();
    const double rho = density.truncated(omega);
    if (rho == 0.0) return 0.0;
    const cplx x = cplx(omega - params.omega_c() - omega2 * lamb, params.kappa());
    const double width = pi * omega2 * rho;
    return rho / (x * x + width * width);
}

cplx kernel_U(const SystemParams& params, const SpinDensity& density, double omega) {
    return kernel_U(params, density, omega, lamb_shift(density, omega, invert_default_step(density)));
}

double resonance_mismatch(const SystemParams& params, const SpinDensity& density, double omega) {
    const double omega2 = params.coupling() * params.coupling();
    return omega - params.omega_c() - omega2 * lamb_shift(density, omega, invert_default_step(density));
}

PoleIntegrals pole_integrals(const SpinDensity& density, double omega_c, double sigma, double nu) {
    const double shift = density.center() - omega_c;
    if (density.kind() == DensityKind::DiracDelta) {
        double y = nu + shift;
        double d = sigma * sigma + y * y;
        cplx z(sigma, y);
        return {1.0 / d, y / d, 1.0 / (z * z)};
    }
    // x is measured from omega_c; rho lives on [shift - W, shift + W]
    auto rho = [&](double x) { return density.truncated(omega_c + x); };
    const double lo = shift - density.half_width();
    const double hi = shift + density.half_width();
    const double a = std::max(std::abs(sigma), 1e-300);
    const double sgn = sigma < 0.0 ? 1.0 : -1.0;
    const double xs = -nu;

    PoleIntegrals out{0.0, 0.0, 0.0};
    // near the singular point: x = xs + a tan(theta)
    double clo = std::max(lo, xs - 10.0 * a);
    double chi = std::min(hi, xs + 10.0 * a);
    if (chi > clo) {
        double tlo = std::atan((clo - xs) / a), thi = std::atan((chi - xs) / a);
        auto x_of = [&](double th) { return xs + a * std::tan(th); };
        out.inv += gk([&](double th) { return rho(x_of(th)); }, tlo, thi) / a;
        out.odd += gk([&](double th) { return rho(x_of(th)) * std::tan(th); }, tlo, thi);
        double re = gk([&](double th) { return rho(x_of(th)) * std::cos(2.0 * th); }, tlo, thi);
        double im = gk([&](double th) { return rho(x_of(th)) * std::sin(2.0 * sgn * th); }, tlo, thi);
        out.inv_sq += cplx(re, im) / a;
    } else {
        clo = chi = std::clamp(xs, lo, hi);
    }
    // remaining pieces, split at the density center
    auto piece = [&](double a0, double b0) {
        auto den = [&](double x) { return sigma * sigma + (x + nu) * (x + nu); };
        auto zsq = [&](double x) {
            cplx z(sigma, x + nu);
            return 1.0 / (z * z);
        };
        out.inv += gk([&](double x) { return rho(x) / den(x); }, a0, b0);
        out.odd += gk([&](double x) { return rho(x) * (x + nu) / den(x); }, a0, b0);
        double re = gk([&](double x) { return rho(x) * zsq(x).real(); }, a0, b0);
        double im = gk([&](double x) { return rho(x) * zsq(x).imag(); }, a0, b0);
        out.inv_sq += cplx(re, im);
    };
    auto split = [&](double a0, double b0) {
        if (shift > a0 && shift < b0) {
            piece(a0, shift);
            piece(shift, b0);
        } else {
            piece(a0, b0);
        }
    };
    split(lo, clo);
    split(chi, hi);
    return out;
}

cplx residue(const SystemParams& params, const SpinDensity& density, const PoleSolution& pole) {
    const double omega2 = params.coupling() * params.coupling();
    PoleIntegrals ints = pole_integrals(density, params.omega_c(), pole.sigma, pole.offset(params));
    cplx denom = 1.0 - omega2 * ints.inv_sq;
    if (std::abs(denom) < 1e-12) throw NumericalError("residue: degenerate pole");
    return 1.0 / denom;
}

PoleSearchResult find_poles(const SystemParams& params, const SpinDensity& density,
                            const PoleSearchOptions& options) {
    check_resonant(params, "find_poles");
    const double kappa = params.kappa();
    const double omega = params.coupling();
    const double omega2 = omega * omega;
    const double lam = options.damping;
    PoleSearchResult result;

    struct Start {
        double sigma, nu;
    };
    std::vector<Start> starts{{-kappa, 0.0}};
    if (omega > 0.0) {
        starts.push_back({-kappa / 10.0, omega});
        starts.push_back({-kappa / 10.0, -omega});
    }
    const double scale = std::max(kappa, omega);
    for (const auto& st : starts) {
        double s = st.sigma, v = st.nu;
        bool converged = false;
        bool finite = true;
        for (int it = 0; it < options.max_iterations; ++it) {
            PoleIntegrals ints = pole_integrals(density, params.omega_c(), s, v);
            double sn = -kappa / (1.0 + omega2 * ints.inv);
            double vn = omega2 * ints.odd;
            if (!std::isfinite(sn) || !std::isfinite(vn)) {
                finite = false;
                break;
            }
            if (std::abs(sn - s) + std::abs(vn - v) < options.tolerance * kappa) {
                s = sn;
                v = vn;
                converged = true;
                break;
            }
            s = (1.0 - lam) * s + lam * sn;
            v = (1.0 - lam) * v + lam * vn;
        }
        std::string tag = "start (" + std::to_string(st.sigma) + ", " + std::to_string(st.nu) + ")";
        if (!finite) {
            result.diagnostics.push_back(tag + ": iteration left the finite range");
            continue;
        }
        if (!converged) {
            result.diagnostics.push_back(tag + ": no convergence after " + std::to_string(options.max_iterations) +
                                         " iterations");
            continue;
        }
        if (std::abs(s) < options.min_sigma_fraction * kappa) {
            result.diagnostics.push_back(tag + ": collapsed onto the branch cut (sigma = " + std::to_string(s) + ")");
            continue;
        }
        PoleIntegrals ints = pole_integrals(density, params.omega_c(), s, v);
        double r1 = std::abs(s * (1.0 + omega2 * ints.inv) + kappa) / kappa;
        double r2 = std::abs(v - omega2 * ints.odd) / std::max(kappa, std::abs(v));
        double res = std::max(r1, r2);
        if (res > options.residual_tolerance) {
            result.diagnostics.push_back(tag + ": residual " + std::to_string(res) + " too large");
            continue;
        }
        bool duplicate = false;
        for (const auto& p : result.poles)
            if (std::abs(p.sigma - s) + std::abs(p.offset(params) - v) < options.dedupe_tolerance * scale)
                duplicate = true;
        if (duplicate) continue;
        PoleSolution pole;
        pole.sigma = s;
        pole.omega = v - params.omega_c();
        pole.residual = res;
        pole.residue = residue(params, density, pole);
        result.poles.push_back(pole);
    }
    std::sort(result.poles.begin(), result.poles.end(),
              [&](const PoleSolution& a, const PoleSolution& b) { return a.omega < b.omega; });
    return result;
}

Inversion invert_detailed(const SystemParams& params, const SpinDensity& density, const TimeGrid& tgrid,
                          const InvertOptions& options) {
    check_resonant(params, "invert");
    if (density.kind() == DensityKind::DiracDelta)
        throw std::invalid_argument("invert: needs a continuous density");
    const double t_max = tgrid.t_end();
    const double limit = pi / (4.0 * std::max(t_max, 1e-300));
    double step = options.step;
    if (step > 0.0) {
        if (step >= limit)
            throw NumericalError("invert: frequency step too coarse for t_max (step * t_max >= pi/4)");
    } else {
        step = std::min(invert_default_step(density), 0.9 * limit);
    }
    Inversion out{ComplexSeries(tgrid, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(tgrid.n_steps()))), {}, {},
                  step};
    PoleSearchResult poles = find_poles(params, density, options.poles);
    out.poles = poles.poles;
    out.diagnostics = poles.diagnostics;
    // poles near the real axis leave features of width |sigma| in U
    for (const auto& p : poles.poles)
        if (options.step <= 0.0) step = std::min(step, std::abs(p.sigma) / 4.0);
    out.step = step;

    const double omega2 = params.coupling() * params.coupling();
    const double reach = std::max(density.half_width(), 2.0 * params.coupling());
    FrequencyGrid grid = FrequencyGrid::symmetric(params.omega_c(), reach, step);
    Eigen::ArrayXd omegas = grid.omegas();
    Eigen::ArrayXd lamb = lamb_shift_on_grid(density, grid);
    Eigen::ArrayXcd weights(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j)
        weights(j) = omega2 * grid.weights()(j) * kernel_U(params, density, omegas(j), lamb(j));

    const auto n = static_cast<Eigen::Index>(tgrid.n_steps());
    Eigen::ArrayXd x = grid.offsets();
    detail::PhaseWalker walker(x, tgrid.dt(), 256);
    // start the walker at t_start
    Eigen::ArrayXcd shift0 = detail::phases(x, tgrid.t_start());
    Eigen::VectorXcd& amp = out.amplitude.values;
    for (Eigen::Index m = 0; m < n; ++m) {
        double t = tgrid.time(static_cast<std::size_t>(m));
        cplx a = omega2 > 0.0 ? (weights * shift0 * walker.current()).sum() : cplx(0.0);
        for (const auto& p : out.poles) a += p.residue * std::exp(cplx(p.sigma, p.offset(params)) * t);
        amp(m) = a;
        if (m + 1 < n) walker.advance();
    }
    return out;
}

ComplexSeries invert(const SystemParams& params, const SpinDensity& density, const TimeGrid& tgrid,
                     const InvertOptions& options) {
    return invert_detailed(params, density, tgrid, options).amplitude;
}

DecayRateEstimate decay_rate_timefit(const ComplexSeries& series) {
    if (series.size() < 8) throw NumericalError("decay_rate_timefit: too few samples");
    Eigen::ArrayXd y = series.abs2();
    Eigen::ArrayXd t = series.grid.times();
    const double peak = y.maxCoeff();
    if (!(peak > 0.0)) throw NumericalError("decay_rate_timefit: identically zero series");
    // same six-decade range as the log-linear window; deeper tails can carry a slower bound component
    auto maxima = local_maxima(y, 1e-6 * peak);
    DecayRateEstimate est;
    est.method = DecayMethod::TimeFit;
    if (maxima.size() >= 3) {
        Eigen::ArrayXd pt(static_cast<Eigen::Index>(maxima.size())), pv(pt.size());
        for (Eigen::Index k = 0; k < pt.size(); ++k) {
            pt(k) = t(maxima[static_cast<std::size_t>(k)]);
            pv(k) = std::log(y(maxima[static_cast<std::size_t>(k)]));
        }
        est.gamma = -linear_fit(pt, pv).slope;
        est.note = "peak envelope fit over " + std::to_string(maxima.size()) + " maxima";
    } else {
        const double y0 = y(0) > 0.0 ? y(0) : peak;
        std::vector<Eigen::Index> idx;
        for (Eigen::Index k = 0; k < y.size(); ++k)
            if (y(k) >= 1e-6 * y0 && y(k) <= 1e-1 * y0) idx.push_back(k);
        if (idx.size() < 8) throw NumericalError("decay_rate_timefit: too few samples in the fit window");
        Eigen::ArrayXd wt(static_cast<Eigen::Index>(idx.size())), wv(wt.size());
        for (Eigen::Index k = 0; k < wt.size(); ++k) {
            wt(k) = t(idx[static_cast<std::size_t>(k)]);
            wv(k) = std::log(y(idx[static_cast<std::size_t>(k)]));
        }
        est.gamma = -linear_fit(wt, wv).slope;
        est.note = "log-linear fit over " + std::to_string(idx.size()) + " samples";
    }
    if (!(est.gamma > 0.0)) throw NumericalError("decay_rate_timefit: series is not decaying");
    return est;
}

DecayRateEstimate gamma_markov(const SystemParams& params, const SpinDensity& density) {
    if (density.kind() == DensityKind::DiracDelta)
        throw std::invalid_argument("gamma_markov: undefined for a delta density");
    const double omega2 = params.coupling() * params.coupling();
    return {2.0 * (params.kappa() + pi * omega2 * density(params.omega_s())), DecayMethod::Markov,
            "weak-coupling limit"};
}

DecayRateEstimate gamma_asymptotic(const SystemParams& params, const SpinDensity& density) {
    if (density.kind() == DensityKind::DiracDelta)
        throw std::invalid_argument("gamma_asymptotic: undefined for a delta density");
    const double omega2 = params.coupling() * params.coupling();
    return {params.kappa() + pi * omega2 * density(params.omega_c() + params.coupling()), DecayMethod::Asymptotic,
            "strong-coupling limit"};
}

RateBranches gamma_lorentz_formula(double coupling, double delta, double kappa) {
    if (!(coupling >= 0.0) || !(delta >= 0.0) || !(kappa > 0.0))
        throw std::invalid_argument("gamma_lorentz_formula: invalid rates");
    double disc = (delta - kappa) * (delta - kappa) - 4.0 * coupling * coupling;
    if (disc > 0.0) {
        double r = std::sqrt(disc);
        return {delta + kappa - r, delta + kappa + r, true};
    }
    return {delta + kappa, delta + kappa, false};
}

RateBranches gamma_no_broadening(double coupling, double kappa) { return gamma_lorentz_formula(coupling, 0.0, kappa); }

}  // namespace spincav
