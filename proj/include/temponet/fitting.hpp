#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "temponet/errors.hpp"

namespace temponet {

enum class FitFamily {
    polynomial,          // c0 + c1 x + ... + cd x^d
    exp_decay,           // a * exp(-x / b); coefficients (a, b)
    rational_power,      // (a - b x^e) / (c + x^e), e fixed; coefficients (a, b, c)
    rational_quadratic,  // (a + b x) / (1 + c x + d x^2); coefficients (a, b, c, d)
};

struct SeriesFit {
    FitFamily family = FitFamily::polynomial;
    std::vector<double> coefficients;
    // Exponent of the rational_power family, held fixed during the fit.
    double exponent = 0.0;
    std::optional<double> r_squared;
    double residual_norm = 0.0;
    bool converged = true;
    std::size_t iterations = 0;

    std::size_t degree() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
};

inline constexpr double kDefaultRationalExponent = 0.642;

inline double evaluate(const SeriesFit& fit, double x) {
    const auto& c = fit.coefficients;
    switch (fit.family) {
        case FitFamily::polynomial: {
            double y = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) y = y * x + *it;
            return y;
        }
        case FitFamily::exp_decay: return c[0] * std::exp(-x / c[1]);
        case FitFamily::rational_power: {
            const double u = std::pow(x, fit.exponent);
            return (c[0] - c[1] * u) / (c[2] + u);
        }
        case FitFamily::rational_quadratic: return (c[0] + c[1] * x) / (1.0 + c[2] * x + c[3] * x * x);
    }
    return 0.0;
}

/// 1 - SS_res / SS_tot. Undefined when the observations are constant.
inline std::optional<double> r_squared(std::span<const double> ys, std::span<const double> predictions) {
    if (ys.size() != predictions.size() || ys.size() < 2)
        throw std::invalid_argument("r_squared needs two equal-length series of length >= 2");
    const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        ss_res += (ys[i] - predictions[i]) * (ys[i] - predictions[i]);
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    if (ss_tot == 0.0) return std::nullopt;
    return 1.0 - ss_res / ss_tot;
}

namespace detail {

inline void check_series(std::span<const double> xs, std::span<const double> ys, std::size_t min_points) {
    if (xs.size() != ys.size()) throw std::invalid_argument("xs and ys differ in length");
    if (xs.size() < min_points)
        throw std::invalid_argument("need at least " + std::to_string(min_points) + " points");
}

inline void finish(SeriesFit& fit, std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> pred(xs.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        pred[i] = evaluate(fit, xs[i]);
        ss += (ys[i] - pred[i]) * (ys[i] - pred[i]);
    }
    fit.residual_norm = std::sqrt(ss);
    fit.r_squared = xs.size() >= 2 ? r_squared(ys, pred) : std::nullopt;
}

// Linear least squares via column-pivoted Householder QR.
inline Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < a.cols()) throw ill_conditioned_error("least-squares system is rank deficient");
    return qr.solve(b);
}

} // namespace detail

/// Least-squares polynomial of the given degree. Abscissae are rescaled to
/// [-1, 1] magnitude before the QR solve; coefficients are reported in the
/// original scale, lowest order first.
inline SeriesFit polyfit(std::span<const double> xs, std::span<const double> ys, std::size_t degree) {
    detail::check_series(xs, ys, degree + 1);
    double scale = 0.0;
    for (double x : xs) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) scale = 1.0;

    const auto n = static_cast<Eigen::Index>(xs.size());
    const auto cols = static_cast<Eigen::Index>(degree + 1);
    Eigen::MatrixXd vander(n, cols);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double p = 1.0;
        for (Eigen::Index j = 0; j < cols; ++j) {
            vander(i, j) = p;
            p *= xs[static_cast<std::size_t>(i)] / scale;
        }
        rhs(i) = ys[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = detail::solve_linear(vander, rhs);

    SeriesFit fit;
    fit.family = FitFamily::polynomial;
    fit.coefficients.resize(degree + 1);
    double s = 1.0;
    for (std::size_t j = 0; j <= degree; ++j) {
        fit.coefficients[j] = c(static_cast<Eigen::Index>(j)) / s;
        s *= scale;
    }
    detail::finish(fit, xs, ys);
    return fit;
}

// ---------------------------------------------------------------------------
// Damped Gauss-Newton
// ---------------------------------------------------------------------------

struct GaussNewtonOptions {
    std::size_t max_iterations = 200;
    double relative_step = 1e-10;
};

struct GaussNewtonResult {
    Eigen::VectorXd params;
    double ssr = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Minimizes sum (y_i - model(x_i, p))^2. `model(x, p, grad)` returns the
/// model value and writes d model / d p into grad.
///
/// Each iteration solves (J'J + lambda diag(J'J)) step = J'r; lambda shrinks
/// after a successful step and grows after a rejected one. Stops when an
/// accepted step is smaller than relative_step * |p|, or when no step of any
/// damping reduces the residual (a numerical minimum).
template <typename Model>
GaussNewtonResult damped_gauss_newton(Model&& model, std::span<const double> xs, std::span<const double> ys,
                                      Eigen::VectorXd start, const GaussNewtonOptions& opts = {}) {
    const auto np = start.size();
    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd jac(n, np);
    Eigen::VectorXd resid(n);
    Eigen::VectorXd grad(np);

    auto residuals = [&](const Eigen::VectorXd& p, bool with_jacobian) {
        double ssr = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            const double y = model(xs[idx], p, grad);
            resid(i) = ys[idx] - y;
            if (with_jacobian) jac.row(i) = grad.transpose();
            ssr += resid(i) * resid(i);
        }
        return std::isfinite(ssr) ? ssr : std::numeric_limits<double>::infinity();
    };

    GaussNewtonResult out;
    out.params = std::move(start);
    out.ssr = residuals(out.params, true);
    double lambda = 1e-3;

    for (out.iterations = 1; out.iterations <= opts.max_iterations; ++out.iterations) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * resid;
        bool accepted = false;
        Eigen::VectorXd step;
        while (lambda < 1e20) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index d = 0; d < np; ++d) damped(d, d) += lambda * std::max(jtj(d, d), 1e-300);
            step = damped.ldlt().solve(jtr);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd trial = out.params + step;
            const double trial_ssr = residuals(trial, false);
            if (trial_ssr <= out.ssr) {
                out.params = trial;
                out.ssr = residuals(out.params, true);
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            residuals(out.params, true);
            out.converged = true;
            return out;
        }
        if (step.norm() <= opts.relative_step * std::max(out.params.norm(), 1e-300)) {
            out.converged = true;
            return out;
        }
    }
    out.iterations = opts.max_iterations;
    return out;
}

// ---------------------------------------------------------------------------
// Nonlinear families
// ---------------------------------------------------------------------------

/// a * exp(-x / b) in the original space, seeded by a log-linear regression.
/// A non-decaying series (b infinite or negative) is reported non-converged.
inline SeriesFit fit_exp_decay(std::span<const double> xs, std::span<const double> ys,
                               const GaussNewtonOptions& opts = {}) {
    detail::check_series(xs, ys, 3);
    if (std::any_of(ys.begin(), ys.end(), [](double y) { return !(y > 0.0); }))
        throw std::invalid_argument("exponential decay fit needs positive ys");

    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = xs[static_cast<std::size_t>(i)];
        b(i) = std::log(ys[static_cast<std::size_t>(i)]);
    }
    const Eigen::VectorXd line = detail::solve_linear(a, b);

    // Internally parameterized by the rate 1/b so that "no decay" is finite.
    Eigen::VectorXd start(2);
    start << std::exp(line(0)), -line(1);
    auto model = [](double x, const Eigen::VectorXd& p, Eigen::VectorXd& g) {
        const double e = std::exp(-p(1) * x);
        g(0) = e;
        g(1) = -p(0) * x * e;
        return p(0) * e;
    };
    const auto res = damped_gauss_newton(model, xs, ys, start, opts);

    SeriesFit fit;
    fit.family = FitFamily::exp_decay;
    fit.iterations = res.iterations;
    const double rate = res.params(1);
    fit.converged = res.converged && rate > 0.0 && std::isfinite(1.0 / rate);
    fit.coefficients = {res.params(0), rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity()};
    if (rate > 0.0) {
        detail::finish(fit, xs, ys);
    } else {
        fit.r_squared = std::nullopt;
        double ss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - res.params(0) * std::exp(-rate * xs[i]);
            ss += r * r;
        }
        fit.residual_norm = std::sqrt(ss);
    }
    return fit;
}

/// (a - b x^e) / (c + x^e) with e fixed. Seeded by the linearization
/// y c - a + b x^e = -y x^e.
inline SeriesFit fit_rational_power(std::span<const double> xs, std::span<const double> ys,
                                    double exponent = kDefaultRationalExponent, const GaussNewtonOptions& opts = {}) {
    detail::check_series(xs, ys, 4);
    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const double u = std::pow(xs[idx], exponent);
        a(i, 0) = -1.0;
        a(i, 1) = u;
        a(i, 2) = ys[idx];
        b(i) = -ys[idx] * u;
    }
    const Eigen::VectorXd start = detail::solve_linear(a, b);
    auto model = [exponent](double x, const Eigen::VectorXd& p, Eigen::VectorXd& g) {
        const double u = std::pow(x, exponent);
        const double d = p(2) + u;
        const double num = p(0) - p(1) * u;
        g(0) = 1.0 / d;
        g(1) = -u / d;
        g(2) = -num / (d * d);
        return num / d;
    };
    const auto res = damped_gauss_newton(model, xs, ys, start, opts);

    SeriesFit fit;
    fit.family = FitFamily::rational_power;
    fit.exponent = exponent;
    fit.coefficients = {res.params(0), res.params(1), res.params(2)};
    fit.converged = res.converged;
    fit.iterations = res.iterations;
    detail::finish(fit, xs, ys);
    return fit;
}

/// (a + b x) / (1 + c x + d x^2). Seeded by the linearization
/// a + b x - y c x - y d x^2 = y.
inline SeriesFit fit_rational_quadratic(std::span<const double> xs, std::span<const double> ys,
                                        const GaussNewtonOptions& opts = {}) {
    detail::check_series(xs, ys, 5);
    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd a(n, 4);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const double x = xs[idx], y = ys[idx];
        a(i, 0) = 1.0;
        a(i, 1) = x;
        a(i, 2) = -y * x;
        a(i, 3) = -y * x * x;
        b(i) = y;
    }
    const Eigen::VectorXd start = detail::solve_linear(a, b);
    auto model = [](double x, const Eigen::VectorXd& p, Eigen::VectorXd& g) {
        const double d = 1.0 + p(2) * x + p(3) * x * x;
        const double num = p(0) + p(1) * x;
        g(0) = 1.0 / d;
        g(1) = x / d;
        g(2) = -num * x / (d * d);
        g(3) = -num * x * x / (d * d);
        return num / d;
    };
    const auto res = damped_gauss_newton(model, xs, ys, start, opts);

    SeriesFit fit;
    fit.family = FitFamily::rational_quadratic;
    fit.coefficients = {res.params(0), res.params(1), res.params(2), res.params(3)};
    fit.converged = res.converged;
    fit.iterations = res.iterations;
    detail::finish(fit, xs, ys);
    return fit;
}

inline std::string family_name(const SeriesFit& fit) {
    switch (fit.family) {
        case FitFamily::polynomial: return "polynomial(" + std::to_string(fit.degree()) + ")";
        case FitFamily::exp_decay: return "exp_decay";
        case FitFamily::rational_power: return "rational_power";
        case FitFamily::rational_quadratic: return "rational_quadratic";
    }
    return "unknown";
}

inline nlohmann::json to_json(const SeriesFit& fit) {
    nlohmann::json j;
    j["family"] = family_name(fit);
    j["coefficients"] = fit.coefficients;
    j["r_squared"] = fit.r_squared ? nlohmann::json(*fit.r_squared) : nlohmann::json(nullptr);
    j["converged"] = fit.converged;
    if (fit.family == FitFamily::rational_power) j["exponent"] = fit.exponent;
    return j;
}

} // namespace temponet
