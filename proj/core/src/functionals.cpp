#include "gclt/functionals.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gclt/errors.hpp"
#include "gclt/quadrature.hpp"
#include "gclt/rng.hpp"
#include "kv_parse.hpp"
#include "rectangle_sum.hpp"

namespace gclt {

namespace {

constexpr std::uint64_t kHolderStreamTag = 0xFFFD;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::domain_error(msg);
}

double gauss_norm(int dim, double sigma) {
    return std::pow(2 * M_PI * sigma * sigma, -0.5 * dim);
}

} // namespace

TestFunction::TestFunction(Family family, int dim, double sa, double sb,
                           double amplitude)
    : family_(family), dim_(dim), sigma_a_(sa), sigma_b_(sb),
      amplitude_(amplitude) {}

TestFunction TestFunction::gaussian_diff(int dim, double sigma_a,
                                         double sigma_b) {
    require(dim >= 1, "gaussian_diff requires dim >= 1");
    require(sigma_a > 0 && sigma_b > sigma_a,
            "gaussian_diff requires 0 < sa < sb");
    return TestFunction(Family::GaussDiff, dim, sigma_a, sigma_b, 1.0);
}

TestFunction TestFunction::gaussian_bump(int dim, double sigma) {
    require(dim >= 1, "gaussian_bump requires dim >= 1");
    require(sigma > 0, "gaussian_bump requires sigma > 0");
    return TestFunction(Family::GaussBump, dim, sigma, 0.0, 1.0);
}

TestFunction TestFunction::parse(const std::string& spec, int dim) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("function spec needs 'family:params': " +
                                    spec);
    std::string family = detail::lower(spec.substr(0, colon));
    auto params = detail::parse_params(spec.substr(colon + 1), "function");
    double amp = 1.0;
    if (auto it = params.find("amp"); it != params.end()) {
        amp = it->second;
        params.erase(it);
    }
    TestFunction out = [&] {
        if (family == "gdiff")
            return gaussian_diff(dim, detail::take(params, "sa", "function"),
                                 detail::take(params, "sb", "function"));
        if (family == "gbump")
            return gaussian_bump(dim, detail::take(params, "sigma", "function"));
        throw std::invalid_argument("unknown function family: " + family);
    }();
    detail::reject_leftovers(params, "function");
    return out.scaled(amp);
}

double TestFunction::operator()(std::span<const double> x) const {
    require(static_cast<int>(x.size()) == dim_,
            "argument dimension mismatch in test function");
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return value_r2(r2);
}

double TestFunction::value_r2(double r2) const {
    double v = gauss_norm(dim_, sigma_a_) *
               std::exp(-0.5 * r2 / (sigma_a_ * sigma_a_));
    if (family_ == Family::GaussDiff)
        v -= gauss_norm(dim_, sigma_b_) *
             std::exp(-0.5 * r2 / (sigma_b_ * sigma_b_));
    return amplitude_ * v;
}

double TestFunction::fourier(double rho) const {
    double pref = amplitude_ * std::pow(2 * M_PI, -double(dim_));
    double v = std::exp(-0.5 * sigma_a_ * sigma_a_ * rho * rho);
    if (family_ == Family::GaussDiff)
        v -= std::exp(-0.5 * sigma_b_ * sigma_b_ * rho * rho);
    return pref * v;
}

double TestFunction::integral() const {
    return family_ == Family::GaussDiff ? 0.0 : amplitude_;
}

TestFunction TestFunction::scaled(double a) const {
    TestFunction out = *this;
    out.amplitude_ *= a;
    return out;
}

TestFunction TestFunction::dilated(double lam) const {
    require(lam > 0, "dilation factor must be positive");
    // lam^d g_s(lam x) = g_{s/lam}(x), so dilation shrinks both widths.
    TestFunction out = *this;
    out.sigma_a_ /= lam;
    if (family_ == Family::GaussDiff) out.sigma_b_ /= lam;
    return out;
}

std::string TestFunction::spec() const {
    std::string s;
    if (family_ == Family::GaussDiff)
        s = "gdiff:sa=" + detail::fmt_double(sigma_a_) +
            ",sb=" + detail::fmt_double(sigma_b_);
    else
        s = "gbump:sigma=" + detail::fmt_double(sigma_a_);
    if (amplitude_ != 1.0) s += ",amp=" + detail::fmt_double(amplitude_);
    return s;
}

WeightNorm weight_norm(const TestFunction& f, double hurst) {
    require(hurst > 0 && hurst < 1, "weight_norm requires H in (0,1)");
    const int d = f.dim();
    const double beta = 2.0 / hurst - d;
    if (beta <= 0)
        throw MembershipError(
            "weight exponent 2/H - d is nonpositive for spec " + f.spec());

    const double sphere = 2 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
    auto shell = [&](double r, double weight_pow) {
        return std::abs(f.value_r2(r * r)) * std::pow(r, d - 1) *
               (weight_pow == 0.0 ? 1.0 : 1.0 + std::pow(r, weight_pow));
    };
    // |f| has a kink where the two Gaussian layers cross; split there so the
    // adaptive rule only ever sees smooth pieces.
    double split = f.sigma_a();
    if (f.family() == TestFunction::Family::GaussDiff) {
        double sa2 = f.sigma_a() * f.sigma_a();
        double sb2 = f.sigma_b() * f.sigma_b();
        split = std::sqrt(2 * sa2 * sb2 * d * std::log(f.sigma_b() / f.sigma_a()) /
                          (sb2 - sa2));
    }

    auto radial = [&](double weight_pow) {
        auto g = [&](double r) { return shell(r, weight_pow); };
        return integrate_1d(g, 0.0, split).value +
               integrate_1d_tail(g, split).value;
    };

    WeightNorm out;
    out.beta_used = beta;
    out.abs_integral = sphere * radial(0.0);
    out.value = sphere * radial(beta);
    if (!std::isfinite(out.value))
        throw MembershipError("weighted norm diverges for spec " + f.spec());
    return out;
}

double holder_check(const TestFunction& f, double hurst, int trials,
                    std::uint64_t seed) {
    require(trials > 0, "holder_check requires trials > 0");
    const int d = f.dim();
    const double beta = 2.0 / hurst - d;
    if (beta <= 0)
        throw MembershipError(
            "weight exponent 2/H - d is nonpositive for spec " + f.spec());
    const double cap = std::min(beta, 1.0);
    const double alphas[] = {0.0, 0.5 * cap, cap};
    const double bound_scale =
        std::pow(2 * M_PI, -double(d)) * weight_norm(f, hurst).value;

    CounterStream stream(seed, kHolderStreamTag, 0, 0);
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> x(d), y(d);
    for (int t = 0; t < trials; ++t) {
        double rx2 = 0.0, ry2 = 0.0, sep2 = 0.0;
        for (int c = 0; c < d; ++c) {
            x[c] = 8.0 * stream.uniform() - 4.0;
            y[c] = 8.0 * stream.uniform() - 4.0;
            rx2 += x[c] * x[c];
            ry2 += y[c] * y[c];
            sep2 += (x[c] - y[c]) * (x[c] - y[c]);
        }
        double df = std::abs(f.fourier(std::sqrt(rx2)) - f.fourier(std::sqrt(ry2)));
        double sep = std::sqrt(sep2);
        for (double alpha : alphas)
            worst = std::max(worst, df - bound_scale * std::pow(sep, alpha));
    }
    return worst;
}

namespace detail {

RadialEval radial_eval(const TestFunction& f) {
    RadialEval ev;
    ev.ca = f.amplitude() * gauss_norm(f.dim(), f.sigma_a());
    ev.ea = 0.5 / (f.sigma_a() * f.sigma_a());
    if (f.family() == TestFunction::Family::GaussDiff) {
        ev.diff = true;
        ev.cb = f.amplitude() * gauss_norm(f.dim(), f.sigma_b());
        ev.eb = 0.5 / (f.sigma_b() * f.sigma_b());
    }
    return ev;
}

RadialEval gaussian_eval(int dim, double width, double amplitude) {
    RadialEval ev;
    ev.ca = amplitude * gauss_norm(dim, width);
    ev.ea = 0.5 / (width * width);
    return ev;
}

int grid_index(const TimeGrid& grid, double t, const char* what) {
    double tol = 1e-9 * std::max(1.0, std::abs(t));
    if (std::abs(t) <= tol) return -1;
    int i = static_cast<int>(std::lround(t / grid.step())) - 1;
    if (i < -1 || i >= grid.n_steps() || std::abs(grid.time(i) - t) > tol)
        throw std::invalid_argument(std::string(what) +
                                    " is not a grid node: " + fmt_double(t));
    return i;
}

std::vector<double> rectangle_sum(const PathEnsemble& x1,
                                  const PathEnsemble& x2, const RadialEval& ev,
                                  double arg_scale2,
                                  std::span<const double> shift, int lo1,
                                  int hi1, int lo2, int hi2, double norm) {
    const int dim = x1.dim;
    const int n_paths = x1.n_paths;
    if (x2.dim != dim || x2.n_paths != n_paths)
        throw std::invalid_argument("pair ensembles disagree in shape");
    if (static_cast<int>(shift.size()) != dim)
        throw std::invalid_argument("shift dimension mismatch");
    if (lo1 >= hi1 || lo2 >= hi2)
        throw std::invalid_argument("degenerate integration rectangle");

    const int m2 = hi2 - lo2 + 1;
    const double h1 = x1.grid.step();
    const double h2 = x2.grid.step();
    Eigen::ArrayXd w2(m2);
    w2.setConstant(h2);
    w2(0) = w2(m2 - 1) = 0.5 * h2;

    const double ea = ev.ea * arg_scale2;
    const double eb = ev.eb * arg_scale2;

    std::vector<double> out(n_paths);
    Eigen::ArrayXd r2(m2), row(m2);
    std::vector<Eigen::ArrayXd> x2c(dim, Eigen::ArrayXd(m2));
    for (int p = 0; p < n_paths; ++p) {
        for (int c = 0; c < dim; ++c) {
            auto comp = x2.component(p, c);
            for (int j = lo2; j <= hi2; ++j)
                x2c[c](j - lo2) = j < 0 ? 0.0 : comp[j];
        }
        double acc = 0.0;
        for (int i = lo1; i <= hi1; ++i) {
            double w1 = (i == lo1 || i == hi1) ? 0.5 * h1 : h1;
            r2.setZero();
            for (int c = 0; c < dim; ++c) {
                double a = (i < 0 ? 0.0 : x1.value(p, c, i)) - shift[c];
                r2 += (x2c[c] - a).square();
            }
            row = ev.ca * (-ea * r2).exp();
            if (ev.diff) row -= ev.cb * (-eb * r2).exp();
            acc += w1 * (row * w2).sum();
        }
        out[p] = norm * acc;
    }
    return out;
}

} // namespace detail

namespace {

void check_span(const TimeGrid& grid, double want, const char* axis) {
    if (std::abs(grid.t_max() - want) > 1e-9 * std::max(1.0, want))
        throw std::invalid_argument(
            std::string("grid/mode mismatch on ") + axis + ": grid spans " +
            detail::fmt_double(grid.t_max()) + ", functional needs " +
            detail::fmt_double(want));
}

void check_pair(const PathEnsemble& x1, const PathEnsemble& x2,
                const TestFunction& f) {
    if (x1.dim != x2.dim || x1.n_paths != x2.n_paths)
        throw std::invalid_argument("pair ensembles disagree in shape");
    if (f.dim() != x1.dim)
        throw std::invalid_argument("test function dimension mismatch");
}

struct Normalization {
    double arg_scale2 = 1.0;
    double norm = 1.0;
};

Normalization normalization(double hurst, int dim, double n_scale,
                            FunctionalMode mode) {
    require(hurst > 0 && hurst < 1, "functional requires H in (0,1)");
    require(n_scale > 0, "functional requires n_scale > 0");
    const double hd = hurst * dim;
    Normalization out;
    if (mode == FunctionalMode::Direct) {
        out.norm = std::pow(n_scale, 0.5 * (hd - 2.0));
    } else {
        out.arg_scale2 = std::pow(n_scale, 2.0 * hurst);
        out.norm = std::pow(n_scale, 0.5 * (hd + 2.0));
    }
    return out;
}

} // namespace

std::vector<double> additive_functional(const PathEnsemble& x1,
                                        const PathEnsemble& x2,
                                        const TestFunction& f, double hurst,
                                        double n_scale, double t1, double t2,
                                        FunctionalMode mode) {
    check_pair(x1, x2, f);
    require(t1 > 0 && t2 > 0, "functional requires positive horizons");
    const bool direct = mode == FunctionalMode::Direct;
    check_span(x1.grid, direct ? n_scale * t1 : t1, "axis 1");
    check_span(x2.grid, direct ? n_scale * t2 : t2, "axis 2");
    auto nrm = normalization(hurst, x1.dim, n_scale, mode);
    std::vector<double> shift(x1.dim, 0.0);
    return detail::rectangle_sum(x1, x2, detail::radial_eval(f), nrm.arg_scale2,
                                 shift, -1, x1.grid.n_steps() - 1, -1,
                                 x2.grid.n_steps() - 1, nrm.norm);
}

std::vector<double> additive_functional_increment(const PathEnsemble& x1,
                                                  const PathEnsemble& x2,
                                                  const TestFunction& f,
                                                  double hurst, double n_scale,
                                                  const Rectangle& e,
                                                  FunctionalMode mode) {
    check_pair(x1, x2, f);
    if (!e.valid()) throw std::invalid_argument("invalid rectangle");
    // In direct mode the rectangle is expressed in macroscopic time, the grid
    // in microscopic time; increments scale the corners onto the grid.
    const double s = mode == FunctionalMode::Direct ? n_scale : 1.0;
    auto nrm = normalization(hurst, x1.dim, n_scale, mode);
    int lo1 = detail::grid_index(x1.grid, s * e.a1, "rectangle edge a1");
    int hi1 = detail::grid_index(x1.grid, s * e.b1, "rectangle edge b1");
    int lo2 = detail::grid_index(x2.grid, s * e.a2, "rectangle edge a2");
    int hi2 = detail::grid_index(x2.grid, s * e.b2, "rectangle edge b2");
    std::vector<double> shift(x1.dim, 0.0);
    return detail::rectangle_sum(x1, x2, detail::radial_eval(f), nrm.arg_scale2,
                                 shift, lo1, hi1, lo2, hi2, nrm.norm);
}

} // namespace gclt
