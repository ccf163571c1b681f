#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qwalk {

/// Natural cubic smoothing spline minimising
///
///     sum_i (y_i - g(x_i))^2 + lambda * integral g''(x)^2 dx
///
/// solved with the Reinsch banded formulation. When no lambda is given it
/// is chosen by minimising the generalised cross-validation score
/// GCV = n RSS / (n - tr A)^2, with tr A obtained from the central band of
/// the inverse of the pentadiagonal system (Hutchinson & de Hoog).
class SmoothingSpline {
 public:
  SmoothingSpline(std::span<const double> x, std::span<const double> y,
                  std::optional<double> lambda = std::nullopt)
      : x_(x.begin(), x.end()) {
    const std::size_t n = x.size();
    if (n != y.size()) throw ContractViolation("smoothing spline: x and y differ in length");
    if (n < 3) throw DomainError("smoothing spline needs at least 3 points");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x[i + 1] > x[i])) throw DomainError("smoothing spline: x must be strictly increasing");
    for (double v : y)
      if (!std::isfinite(v)) throw DomainError("smoothing spline: non-finite data");
    if (lambda && !(*lambda >= 0.0)) throw DomainError("smoothing penalty must be >= 0");

    setup_bands();
    const std::vector<double> y_vec(y.begin(), y.end());
    if (lambda) {
      lambda_ = *lambda;
    } else {
      lambda_ = select_gcv(y_vec);
    }
    solve(y_vec, lambda_, /*want_trace=*/true);
  }

  double lambda() const noexcept { return lambda_; }
  double gcv() const noexcept { return gcv_; }
  double effective_dof() const noexcept { return trace_a_; }

  std::span<const double> knots() const noexcept { return x_; }
  std::span<const double> fitted() const noexcept { return g_; }
  std::span<const double> second_derivatives() const noexcept { return gamma_; }

  double value(double t) const {
    const auto [i, h, a, b] = locate(t);
    return a * g_[i] + b * g_[i + 1] -
           a * b * h * h / 6.0 * ((1.0 + a) * gamma_[i] + (1.0 + b) * gamma_[i + 1]);
  }

  double derivative(double t) const {
    const auto [i, h, a, b] = locate(t);
    return (g_[i + 1] - g_[i]) / h -
           h / 6.0 * ((3.0 * a * a - 1.0) * gamma_[i] - (3.0 * b * b - 1.0) * gamma_[i + 1]);
  }

  /// First derivative at every knot.
  std::vector<double> knot_derivatives() const {
    std::vector<double> d(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) d[i] = derivative(x_[i]);
    return d;
  }

 private:
  struct Segment {
    std::size_t i;
    double h, a, b;  // a = (x_{i+1}-t)/h, b = (t-x_i)/h
  };

  Segment locate(double t) const {
    const std::size_t n = x_.size();
    std::size_t i;
    if (t <= x_.front()) {
      i = 0;
    } else if (t >= x_.back()) {
      i = n - 2;
    } else {
      i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
    }
    const double h = x_[i + 1] - x_[i];
    const double b = (t - x_[i]) / h;
    return {i, h, 1.0 - b, b};
  }

  // Q columns (three nonzeros each), R bands and Q^T Q bands.
  void setup_bands() {
    const std::size_t n = x_.size();
    const std::size_t m = n - 2;
    h_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h_[i] = x_[i + 1] - x_[i];
    q0_.resize(m), q1_.resize(m), q2_.resize(m);
    r0_.assign(m, 0.0), r1_.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      q0_[j] = 1.0 / h_[j];
      q2_[j] = 1.0 / h_[j + 1];
      q1_[j] = -q0_[j] - q2_[j];
      r0_[j] = (h_[j] + h_[j + 1]) / 3.0;
      if (j + 1 < m) r1_[j] = h_[j + 1] / 6.0;
    }
    qq0_.assign(m, 0.0), qq1_.assign(m, 0.0), qq2_.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      qq0_[j] = q0_[j] * q0_[j] + q1_[j] * q1_[j] + q2_[j] * q2_[j];
      if (j + 1 < m) qq1_[j] = q1_[j] * q0_[j + 1] + q2_[j] * q1_[j + 1];
      if (j + 2 < m) qq2_[j] = q2_[j] * q0_[j + 2];
    }
  }

  // Solves (R + lambda Q^T Q) gamma = Q^T y and fills g_, gamma_, rss_ and,
  // when asked, trace_a_ and gcv_.
  void solve(const std::vector<double>& y, double lambda, bool want_trace) {
    const std::size_t n = x_.size();
    const std::size_t m = n - 2;

    std::vector<double> d(m), l1(m, 0.0), l2(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double b0 = r0_[j] + lambda * qq0_[j];
      const double b1 = r1_[j] + lambda * qq1_[j];
      const double b2 = lambda * qq2_[j];
      double dj = b0;
      if (j >= 1) dj -= l1[j - 1] * l1[j - 1] * d[j - 1];
      if (j >= 2) dj -= l2[j - 2] * l2[j - 2] * d[j - 2];
      if (!(dj > 0.0)) throw NumericError("smoothing spline: system not positive definite");
      d[j] = dj;
      double c1 = b1;
      if (j >= 1) c1 -= l2[j - 1] * l1[j - 1] * d[j - 1];
      if (j + 1 < m) l1[j] = c1 / dj;
      if (j + 2 < m) l2[j] = b2 / dj;
    }

    std::vector<double> z(m);
    for (std::size_t j = 0; j < m; ++j) {
      double v = q0_[j] * y[j] + q1_[j] * y[j + 1] + q2_[j] * y[j + 2];
      if (j >= 1) v -= l1[j - 1] * z[j - 1];
      if (j >= 2) v -= l2[j - 2] * z[j - 2];
      z[j] = v;
    }
    std::vector<double> gam(m);
    for (std::size_t jj = m; jj-- > 0;) {
      double v = z[jj] / d[jj];
      if (jj + 1 < m) v -= l1[jj] * gam[jj + 1];
      if (jj + 2 < m) v -= l2[jj] * gam[jj + 2];
      gam[jj] = v;
    }

    gamma_.assign(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) gamma_[j + 1] = gam[j];
    g_ = y;
    for (std::size_t j = 0; j < m; ++j) {
      g_[j] -= lambda * q0_[j] * gam[j];
      g_[j + 1] -= lambda * q1_[j] * gam[j];
      g_[j + 2] -= lambda * q2_[j] * gam[j];
    }
    rss_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) rss_ += (y[i] - g_[i]) * (y[i] - g_[i]);

    if (!want_trace) return;
    // Central band of (R + lambda Q^T Q)^{-1}.
    std::vector<double> s0(m, 0.0), s1(m, 0.0), s2(m, 0.0);
    for (std::size_t jj = m; jj-- > 0;) {
      const double s0_1 = jj + 1 < m ? s0[jj + 1] : 0.0;
      const double s1_1 = jj + 1 < m ? s1[jj + 1] : 0.0;
      const double s0_2 = jj + 2 < m ? s0[jj + 2] : 0.0;
      s2[jj] = -l1[jj] * s1_1 - l2[jj] * s0_2;
      s1[jj] = -l1[jj] * s0_1 - l2[jj] * s1_1;
      s0[jj] = 1.0 / d[jj] - l1[jj] * s1[jj] - l2[jj] * s2[jj];
    }
    double tr = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      tr += s0[j] * qq0_[j] + 2.0 * s1[j] * qq1_[j] + 2.0 * s2[j] * qq2_[j];
    trace_a_ = static_cast<double>(n) - lambda * tr;
    const double resid_dof = static_cast<double>(n) - trace_a_;
    gcv_ = resid_dof > 0.0 ? static_cast<double>(n) * rss_ / (resid_dof * resid_dof)
                           : std::numeric_limits<double>::infinity();
  }

  double gcv_at(const std::vector<double>& y, double log_lambda) {
    solve(y, std::exp(log_lambda), true);
    return gcv_;
  }

  // Coarse grid over log(lambda) around the natural scale tr R / tr Q^T Q,
  // then golden-section refinement.
  double select_gcv(const std::vector<double>& y) {
    double tr_r = 0.0, tr_qq = 0.0;
    for (std::size_t j = 0; j < r0_.size(); ++j) tr_r += r0_[j], tr_qq += qq0_[j];
    const double centre = std::log(tr_r / tr_qq);
    constexpr int grid = 97;
    constexpr double half_width = 12.0 * 2.302585092994046;  // twelve decades
    const double step = 2.0 * half_width / (grid - 1);

    int best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid; ++k) {
      const double s = gcv_at(y, centre - half_width + k * step);
      if (s < best_score) best_score = s, best = k;
    }
    double lo = centre - half_width + std::max(best - 1, 0) * step;
    double hi = centre - half_width + std::min(best + 1, grid - 1) * step;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double fa = gcv_at(y, a), fb = gcv_at(y, b);
    for (int it = 0; it < 60 && hi - lo > 1e-6; ++it) {
      if (fa < fb) {
        hi = b, b = a, fb = fa;
        a = hi - phi * (hi - lo), fa = gcv_at(y, a);
      } else {
        lo = a, a = b, fa = fb;
        b = lo + phi * (hi - lo), fb = gcv_at(y, b);
      }
    }
    const double log_best = fa < fb ? a : b;
    if (std::min(fa, fb) <= best_score) return std::exp(log_best);
    return std::exp(centre - half_width + best * step);
  }

  std::vector<double> x_, h_;
  std::vector<double> q0_, q1_, q2_, r0_, r1_, qq0_, qq1_, qq2_;
  std::vector<double> g_, gamma_;
  double lambda_ = 0.0;
  double rss_ = 0.0;
  double trace_a_ = 0.0;
  double gcv_ = 0.0;
};

}  // namespace qwalk
