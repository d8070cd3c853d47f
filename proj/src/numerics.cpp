#include "spincav/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace spincav {

std::vector<Eigen::Index> local_maxima(const Eigen::Ref<const Eigen::ArrayXd>& y, double floor) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 1; i + 1 < y.size(); ++i)
        if (y(i) > y(i - 1) && y(i) >= y(i + 1) && y(i) > floor) out.push_back(i);
    return out;
}

std::vector<Eigen::Index> local_minima(const Eigen::Ref<const Eigen::ArrayXd>& y) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 1; i + 1 < y.size(); ++i)
        if (y(i) < y(i - 1) && y(i) <= y(i + 1)) out.push_back(i);
    return out;
}

double refine_extremum(const Eigen::Ref<const Eigen::ArrayXd>& y, Eigen::Index i) {
    if (i <= 0 || i + 1 >= y.size()) return static_cast<double>(i);
    double l = y(i - 1), c = y(i), r = y(i + 1);
    double denom = l - 2.0 * c + r;
    if (denom == 0.0) return static_cast<double>(i);
    return static_cast<double>(i) + 0.5 * (l - r) / denom;
}

LinearFit linear_fit(const Eigen::Ref<const Eigen::ArrayXd>& x, const Eigen::Ref<const Eigen::ArrayXd>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("linear_fit: need at least two points");
    double mx = x.mean(), my = y.mean();
    Eigen::ArrayXd dx = x - mx;
    double sxx = dx.square().sum();
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
    LinearFit fit;
    fit.slope = (dx * (y - my)).sum() / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

Extremum golden_section_maximize(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) throw std::invalid_argument("golden_section_maximize: empty bracket");
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    return {x, f(x)};
}

double bisect_root(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw std::invalid_argument("bisect_root: no sign change in bracket");
    auto stop = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
    auto r = boost::math::tools::bisect(f, a, b, stop);
    return 0.5 * (r.first + r.second);
}

std::array<std::complex<double>, 2> prony_two_exponents(const Eigen::Ref<const Eigen::ArrayXd>& y, double h) {
    const Eigen::Index n = y.size();
    if (n < 8 || !(h > 0.0)) throw std::invalid_argument("prony_two_exponents: need >= 8 samples and h > 0");
    // y_{k+2} = p y_{k+1} + q y_k
    Eigen::MatrixXd m(n - 2, 2);
    m.col(0) = y.segment(1, n - 2).matrix();
    m.col(1) = y.head(n - 2).matrix();
    Eigen::VectorXd rhs = y.tail(n - 2).matrix();
    Eigen::Vector2d pq = m.colPivHouseholderQr().solve(rhs);
    std::complex<double> disc = std::sqrt(std::complex<double>(pq(0) * pq(0) + 4.0 * pq(1), 0.0));
    std::complex<double> z1 = 0.5 * (pq(0) + disc), z2 = 0.5 * (pq(0) - disc);
    return {std::log(z1) / h, std::log(z2) / h};
}

}  // namespace spincav
