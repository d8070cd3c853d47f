#include "doctest.h"

#include <cmath>

#include "spincav/spectral.hpp"

using namespace spincav;

namespace {

const double wc = ghz_to_angular(2.6915);

SpinDensity reference_qgauss() { return SpinDensity::q_gaussian_from_fwhm(1.39, mhz_to_angular(9.4), wc); }

}  // namespace

TEST_CASE("q-Gaussian width and normalization") {
    SpinDensity d = reference_qgauss();
    CHECK(angular_to_mhz(d.delta()) == doctest::Approx(5.268341512).epsilon(1e-9));
    CHECK(angular_to_mhz(d.fwhm()) == doctest::Approx(9.4).epsilon(1e-12));
    CHECK(d.analytic_norm() == doctest::Approx(14.40158749368).epsilon(1e-10));
    CHECK(fwhm_relation(1.39, d.delta()) == doctest::Approx(d.fwhm()).epsilon(1e-12));
    CHECK(delta_from_fwhm(1.39, d.fwhm()) == doctest::Approx(d.delta()).epsilon(1e-12));
    CHECK(d(wc) == doctest::Approx(d.norm()).epsilon(1e-14));
    CHECK(d(wc + 0.5 * d.fwhm()) == doctest::Approx(0.5 * d(wc)).epsilon(1e-12));
    CHECK_FALSE(d.capped());
    CHECK(d.tail_mass() <= 1e-6);
    CHECK(d.half_width() / d.delta() == doctest::Approx(35.72).epsilon(1e-3));
}

TEST_CASE("q-Gaussian tail fraction against the incomplete beta oracle") {
    SpinDensity d = reference_qgauss();
    CHECK(d.tail_fraction(10.0 * d.delta()) == doctest::Approx(1.84025600706e-4).epsilon(1e-9));
    CHECK(d.tail_fraction(0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("support capping") {
    SupportPolicy tight;
    tight.max_half_width = 10.0;
    SpinDensity d = SpinDensity::q_gaussian_from_fwhm(1.39, mhz_to_angular(9.4), wc, tight);
    CHECK(d.capped());
    CHECK(d.half_width() == doctest::Approx(10.0 * d.delta()));
    CHECK(d.tail_mass() == doctest::Approx(1.84025600706e-4).epsilon(1e-9));
    tight.strict = true;
    CHECK_THROWS(SpinDensity::q_gaussian_from_fwhm(1.39, mhz_to_angular(9.4), wc, tight));
    CHECK_THROWS_AS(SpinDensity::q_gaussian(3.5, 0.03, wc), std::invalid_argument);
}

TEST_CASE("bath quadrature sums to one") {
    SpinBath qb = make_bath(reference_qgauss());
    CHECK(std::abs(qb.total_mass() - 1.0) < 1e-8);
    CHECK(qb.grid.size() == 8009);
    CHECK(angular_to_mhz(qb.step()) == doctest::Approx(0.047).epsilon(1e-9));
    CHECK(qb.density.norm() == doctest::Approx(14.4016019).epsilon(1e-7));
    CHECK((qb.mass >= 0.0).all());

    SpinBath lb = make_bath(SpinDensity::lorentzian(mhz_to_angular(4.0), wc));
    CHECK(lb.density.capped());
    CHECK(std::abs(lb.total_mass() + lb.density.tail_mass() - 1.0) < 1e-8);
    CHECK(make_bath(SpinDensity::dirac(wc)).total_mass() == 1.0);
}

TEST_CASE("density is symmetric and positive") {
    SpinDensity d = reference_qgauss();
    for (int k = 0; k <= 200; ++k) {
        double x = 0.01 * k;
        CHECK(d(wc + x) == doctest::Approx(d(wc - x)).epsilon(1e-14));
        CHECK(d(wc + x) > 0.0);
        CHECK(d.derivative(wc + x) == doctest::Approx(-d.derivative(wc - x)).epsilon(1e-14));
    }
    const double h = 1e-6;
    CHECK(d.derivative(wc + 0.02) == doctest::Approx((d(wc + 0.02 + h) - d(wc + 0.02 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("Lamb shift of the q-Gaussian against quadrature oracles") {
    SpinDensity d = reference_qgauss();
    CHECK(lamb_shift(d, wc + d.delta()) == doctest::Approx(25.42696015940).epsilon(1e-4));
    CHECK(lamb_shift(d, wc + 3.0 * d.delta()) == doctest::Approx(11.33553829406).epsilon(1e-4));
    CHECK(lamb_shift(d, wc - d.delta()) == doctest::Approx(-lamb_shift(d, wc + d.delta())).epsilon(1e-12));
    CHECK(std::abs(lamb_shift(d, wc)) < 1e-10 * d(wc));
}

TEST_CASE("Lamb shift of a Lorentzian is its Hilbert transform") {
    const double delta = mhz_to_angular(4.0);
    SpinDensity d = SpinDensity::lorentzian(delta, wc);
    for (double r : {0.25, 1.0, 2.0, 5.0}) {
        double x = r * delta;
        CHECK(lamb_shift(d, wc + x) == doctest::Approx(x / (x * x + delta * delta)).epsilon(1e-4));
    }
}

TEST_CASE("Lamb shift on a grid matches the pointwise evaluation") {
    SpinDensity d = reference_qgauss();
    SpinBath b = make_bath(d);
    Eigen::ArrayXd shift = lamb_shift_on_grid(b.density, b.grid);
    for (Eigen::Index k : {Eigen::Index(4004 + 112), Eigen::Index(4004 - 336), Eigen::Index(4004 + 1000)}) {
        double expect = lamb_shift(b.density, b.omega(k), b.step());
        CHECK(shift(k) == doctest::Approx(expect).epsilon(1e-6));
    }
    CHECK(std::abs(shift(4004)) < 1e-8);
}

TEST_CASE("Sokhotski split of a shifted Gaussian") {
    SpinDensity d = reference_qgauss();
    const double s = d.delta();
    auto f = [&](double w) {
        double y = w - wc;
        return std::exp(-y * y / (s * s)) * (1.0 + y / s);
    };
    SokhotskiSplit r = sokhotski_split(d, f);
    CHECK(r.pv == doctest::Approx(std::sqrt(pi)).epsilon(1e-8));
    CHECK(r.imag == doctest::Approx(pi).epsilon(1e-14));
    CHECK(r.value() == cplx(r.pv, r.imag));
    CHECK_THROWS_AS(sokhotski_split(SpinDensity::dirac(wc), f), std::invalid_argument);
}
