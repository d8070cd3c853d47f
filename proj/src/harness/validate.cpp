#include "spincav/harness/validate.hpp"

#include <cmath>

#include "spincav/laplace.hpp"
#include "spincav/lorentz.hpp"
#include "spincav/volterra.hpp"

namespace spincav::harness {

namespace {

Check at_most(std::string name, double value, double tol) { return {std::move(name), value, tol, value <= tol}; }

}  // namespace

std::vector<Check> run_validation() {
    std::vector<Check> out;
    const double wc = ghz_to_angular(2.6915);
    const double kappa = mhz_to_angular(0.4);
    const SystemParams params = SystemParams::resonant(wc, kappa, mhz_to_angular(8.56));
    const SpinDensity qg = SpinDensity::q_gaussian_from_fwhm(1.39, mhz_to_angular(9.4), wc);
    const SpinBath bath = make_bath(qg);

    out.push_back(at_most("q-gaussian bath mass", std::abs(bath.total_mass() - 1.0), 1e-8));
    const SpinBath lb = make_bath(SpinDensity::lorentzian(mhz_to_angular(4.0), wc));
    out.push_back(at_most("lorentzian mass plus tail", std::abs(lb.total_mass() + lb.density.tail_mass() - 1.0), 1e-8));

    double asym = 0.0, negative = 0.0, odd = 0.0;
    for (int k = 1; k <= 40; ++k) {
        double x = 0.01 * k;
        asym = std::max(asym, std::abs(qg(wc + x) - qg(wc - x)) / qg(wc));
        negative = std::max(negative, -std::min(0.0, qg(wc + x)));
        double step = default_grid_step(qg);
        odd = std::max(odd, std::abs(lamb_shift(qg, wc + x, step) + lamb_shift(qg, wc - x, step)) /
                                std::abs(lamb_shift(qg, wc + x, step)));
    }
    out.push_back(at_most("density symmetry", asym, 1e-12));
    out.push_back(at_most("density positivity", negative, 0.0));
    out.push_back(at_most("lamb shift odd", odd, 1e-8));
    out.push_back(at_most("lamb shift at center",
                          std::abs(lamb_shift(qg, wc, default_grid_step(qg))) * qg.delta() / qg.norm(), 1e-10));

    const double dt = 0.05;
    const TimeGrid grid = TimeGrid::covering(100.0, dt);
    const DriveProtocol drive = rect_pulse(kappa, 60.0);
    ComplexSeries a1 = solve(params, bath, drive, grid);
    ComplexSeries a2 = solve(params, bath, drive.scaled(2.0), grid);
    out.push_back(at_most("linearity in eta", relative_linf(a2.values.array(), (2.0 * a1.values).array()), 1e-12));

    ComplexSeries j = collective_spin(a1, params, bath);
    out.push_back(at_most("J_y vanishes at resonance", j.imag().abs().maxCoeff() / j.values.array().abs().maxCoeff(),
                          1e-8));

    const TimeGrid short_grid = TimeGrid::covering(40.0, dt);
    const SystemParams detuned = params.with_probe(wc + mhz_to_angular(2.4));
    const DriveProtocol train = phase_switched_train(kappa, 8.0, 4);
    ComplexSeries r = solve(detuned, bath, train, short_grid, 0.5);
    ComplexSeries d = solve_direct(detuned, bath, train, short_grid, 0.5);
    out.push_back(at_most("recurrence vs direct", relative_linf(r.values.array(), d.values.array()), 1e-6));

    const LorentzParams lp(params.coupling(), mhz_to_angular(4.0), kappa, kappa, 60.0);
    ComplexSeries al = solve(params, lb, drive, grid);
    Eigen::ArrayXd exact(static_cast<Eigen::Index>(grid.n_steps()));
    for (std::size_t k = 0; k < grid.n_steps(); ++k) exact(static_cast<Eigen::Index>(k)) = cavity(lp, grid.time(k));
    out.push_back(at_most("lorentzian closed form", relative_linf(al.real(), exact), 1e-3));

    ComplexSeries inv = invert(params, qg, TimeGrid::covering(50.0, 0.5));
    out.push_back(at_most("inversion closure |A(0)| = 1", std::abs(std::abs(inv.values(0)) - 1.0), 1e-3));

    const SpinBath dirac = make_bath(SpinDensity::dirac(wc));
    const double s = 3.0;
    const cplx k_oracle = -params.coupling() * params.coupling() * (1.0 - std::exp(-kappa * s)) / kappa;
    out.push_back(at_most("delta-density kernel", std::abs(kernel_K(params, dirac, s) - k_oracle) / std::abs(k_oracle),
                          1e-12));
    return out;
}

}  // namespace spincav::harness
