#pragma once

#include <algorithm>

#include <Eigen/Dense>

namespace spincav::detail {

inline Eigen::ArrayXcd phases(const Eigen::ArrayXd& nu, double s) {
    Eigen::ArrayXd arg = nu * s;
    Eigen::ArrayXcd out(nu.size());
    out.real() = arg.cos();
    out.imag() = -arg.sin();
    return out;
}

// e^{-i nu k dt} for k = 0, 1, ... by repeated multiplication, resynced periodically.
class PhaseWalker {
public:
    PhaseWalker(const Eigen::ArrayXd& nu, double dt, Eigen::Index resync)
        : nu_(nu), dt_(dt), resync_(std::max<Eigen::Index>(resync, 1)),
          factor_(phases(nu, dt)), current_(Eigen::ArrayXcd::Ones(nu.size())) {}

    const Eigen::ArrayXcd& current() const { return current_; }

    void advance() {
        ++k_;
        if (k_ % resync_ == 0)
            current_ = phases(nu_, dt_ * static_cast<double>(k_));
        else
            current_ *= factor_;
    }

private:
    const Eigen::ArrayXd& nu_;
    double dt_;
    Eigen::Index resync_;
    Eigen::Index k_ = 0;
    Eigen::ArrayXcd factor_;
    Eigen::ArrayXcd current_;
};

}  // namespace spincav::detail
