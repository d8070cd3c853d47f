#include "doctest.h"

#include <cmath>

#include "spincav/lorentz.hpp"

using namespace spincav;

namespace {

const double kappa = mhz_to_angular(0.4);
const double delta = mhz_to_angular(4.0);

}  // namespace

TEST_CASE("exponents and the oscillation boundary") {
    LorentzParams p(mhz_to_angular(8.56), delta, kappa, kappa, 100.0);
    auto [s1, s2] = exponents(p);
    CHECK(underdamped(p));
    CHECK(s1.real() == doctest::Approx(-(delta + kappa) / 2.0));
    CHECK(s2.real() == doctest::Approx(-(delta + kappa) / 2.0));
    CHECK(std::abs(s1.imag() - s2.imag()) == doctest::Approx(rabi_frequency(p)));
    const double wr = std::sqrt(4.0 * p.coupling * p.coupling - (delta - kappa) * (delta - kappa));
    CHECK(rabi_frequency(p) == doctest::Approx(wr).epsilon(1e-14));

    CHECK(angular_to_mhz(oscillation_boundary(delta, kappa)) == doctest::Approx(1.8).epsilon(1e-12));
    LorentzParams slow(mhz_to_angular(1.0), delta, kappa, kappa, 100.0);
    CHECK_FALSE(underdamped(slow));
    CHECK_THROWS_AS(rabi_frequency(slow), std::domain_error);
    auto [r1, r2] = exponents(slow);
    CHECK(r1.imag() == 0.0);
    CHECK(r1.real() * r2.real() == doctest::Approx(kappa * delta + slow.coupling * slow.coupling).epsilon(1e-12));
    CHECK(r1.real() + r2.real() == doctest::Approx(-(kappa + delta)).epsilon(1e-12));
}

TEST_CASE("closed forms are continuous and their jets are consistent") {
    LorentzParams p(mhz_to_angular(8.56), delta, kappa, kappa, 60.0);
    CHECK(cavity(p, 0.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(spin(p, 0.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(cavity(p, 60.0 - 1e-9) == doctest::Approx(cavity(p, 60.0 + 1e-9)).epsilon(1e-7));
    CHECK(spin(p, 60.0 - 1e-9) == doctest::Approx(spin(p, 60.0 + 1e-9)).epsilon(1e-7));
    const double h = 1e-4;
    for (double t : {5.0, 30.0}) {
        Jet j = cavity_on_jet(p, t);
        CHECK(j.d1 == doctest::Approx((cavity_on(p, t + h) - cavity_on(p, t - h)) / (2 * h)).epsilon(1e-6));
        CHECK(j.d2 == doctest::Approx((cavity_on(p, t + h) - 2 * j.value + cavity_on(p, t - h)) / (h * h)).epsilon(1e-4));
        Jet s = spin_on_jet(p, t);
        CHECK(s.d1 == doctest::Approx((spin_on(p, t + h) - spin_on(p, t - h)) / (2 * h)).epsilon(1e-6));
    }
    for (double t : {70.0, 120.0}) {
        Jet j = cavity_off_jet(p, t);
        CHECK(j.d1 == doctest::Approx((cavity_off(p, t + h) - cavity_off(p, t - h)) / (2 * h)).epsilon(1e-6));
        Jet s = spin_off_jet(p, t);
        CHECK(s.d1 == doctest::Approx((spin_off(p, t + h) - spin_off(p, t - h)) / (2 * h)).epsilon(1e-6));
    }
    // cavity equation of motion: A' = -kappa A + 2 Omega J - eta while driven
    Jet a = cavity_on_jet(p, 17.0);
    CHECK(a.d1 == doctest::Approx(-kappa * a.value + 2.0 * p.coupling * spin_on(p, 17.0) - p.eta).epsilon(1e-10));
    // free phase from the steady state starts at A_st and J_st
    LorentzParams released(p.coupling, delta, kappa, kappa, 0.0);
    CHECK(cavity_off(released, 0.0) == doctest::Approx(steady_amplitude(p)).epsilon(1e-12));
    CHECK(spin_off(released, 0.0) == doctest::Approx(steady_spin(p)).epsilon(1e-12));
}

TEST_CASE("long drive relaxes to the steady state") {
    LorentzParams p(mhz_to_angular(8.56), delta, kappa, kappa, 5000.0);
    CHECK(cavity(p, 4000.0) == doctest::Approx(steady_amplitude(p)).epsilon(1e-10));
    CHECK(spin(p, 4000.0) == doctest::Approx(steady_spin(p)).epsilon(1e-10));
    CHECK(steady_amplitude(p) == doctest::Approx(-kappa * delta / (p.coupling * p.coupling + delta * kappa)));
}

TEST_CASE("dynamics are invariant under a common rescaling of rates") {
    const double c = 2.0;
    LorentzParams p(mhz_to_angular(8.56), delta, kappa, kappa, 60.0);
    LorentzParams q(c * p.coupling, c * delta, c * kappa, c * kappa, 60.0 / c);
    for (double t : {10.0, 59.0, 75.0, 200.0}) {
        CHECK(cavity(q, t / c) == doctest::Approx(cavity(p, t)).epsilon(1e-10));
        CHECK(spin(q, t / c) == doctest::Approx(spin(p, t)).epsilon(1e-10));
    }
    CHECK(overshoot_threshold(c * delta, c * kappa) / c == doctest::Approx(overshoot_threshold(delta, kappa)).epsilon(1e-4));
}

TEST_CASE("overshoot threshold") {
    const double threshold = angular_to_mhz(overshoot_threshold(delta, kappa));
    CHECK(threshold == doctest::Approx(7.15).epsilon(0.02));
    CHECK(threshold == doctest::Approx(7.1479).epsilon(1e-4));

    LorentzParams below(mhz_to_angular(threshold - 0.3), delta, kappa, 1.0, 0.0);
    LorentzParams above(mhz_to_angular(threshold + 0.3), delta, kappa, 1.0, 0.0);
    auto excess = [](const LorentzParams& p) {
        return overshoot_first_peak(p).value / (steady_amplitude(p) * steady_amplitude(p));
    };
    CHECK(excess(below) < 1.0);
    CHECK(excess(above) > 1.0);

    // the printed ratio never exceeds one, unlike the located peak
    for (double f : {3.0, 7.15, 8.56, 20.0}) {
        LorentzParams p(mhz_to_angular(f), delta, kappa, 1.0, 0.0);
        double ast2 = steady_amplitude(p) * steady_amplitude(p);
        CHECK(overshoot_formula(p) / ast2 < 1.0);
    }
}

TEST_CASE("first post-pulse peak is a maximum of the free phase") {
    LorentzParams p(mhz_to_angular(8.56), delta, kappa, kappa, 0.0);
    FirstPeak peak = overshoot_first_peak(p);
    auto i2 = [&](double t) { return cavity_off(p, t) * cavity_off(p, t); };
    CHECK(peak.value == doctest::Approx(i2(peak.time)).epsilon(1e-12));
    CHECK(i2(peak.time) >= i2(peak.time - 0.05));
    CHECK(i2(peak.time) >= i2(peak.time + 0.05));
    CHECK(peak.time < 2.0 * pi / rabi_frequency(p) * 1.5);
}

TEST_CASE("fitting a Lorentzian to a Rabi frequency and a steady state") {
    const double wr = mhz_to_angular(19.2), ast = std::sqrt(3.54996e-4), eta = kappa;
    LorentzFit f = fit_lorentz_to(wr, ast, kappa, eta);
    LorentzParams p(f.coupling, f.delta, kappa, eta, 0.0);
    CHECK(rabi_frequency(p) == doctest::Approx(wr).epsilon(1e-10));
    CHECK(std::abs(steady_amplitude(p)) == doctest::Approx(ast).epsilon(1e-10));
    CHECK(angular_to_mhz(f.coupling) == doctest::Approx(9.8313).epsilon(1e-4));
    CHECK(angular_to_mhz(f.delta) == doctest::Approx(4.6402).epsilon(1e-4));
    CHECK_THROWS_AS(fit_lorentz_to(wr, 2.0, kappa, eta), NumericalError);
}
