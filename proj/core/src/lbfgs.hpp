// Compact L-BFGS with Armijo backtracking, internal to the library. The line
// search only ever accepts a strict decrease, so the reported loss sequence
// is non-increasing by construction.
#ifndef CMPOS_SRC_LBFGS_HPP
#define CMPOS_SRC_LBFGS_HPP

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

namespace cmpos::detail {

struct LbfgsOptions {
  int max_iterations = 200;
  double tolerance = 1e-5;  // on ||g|| / max(1, ||g0||)
  int memory = 10;
  double armijo_c1 = 1e-4;
  int max_backtracks = 60;
};

struct LbfgsResult {
  bool converged = false;
  int iterations = 0;
  double final_gradient_norm = 0.0;  // relative, same quantity as the test
};

// fg(x, grad) returns f(x) and fills grad; x is updated in place.
inline LbfgsResult lbfgs_minimize(
    const std::function<double(const std::vector<double>&, std::vector<double>&)>& fg,
    std::vector<double>& x, const LbfgsOptions& opts,
    std::vector<double>* loss_history = nullptr) {
  const std::size_t n = x.size();
  auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  };
  auto norm = [&](const std::vector<double>& a) { return std::sqrt(dot(a, a)); };

  std::vector<double> grad(n), new_x(n), new_grad(n), direction(n);
  double f = fg(x, grad);
  if (loss_history) loss_history->push_back(f);
  const double g0_norm = std::max(1.0, norm(grad));

  std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;  // (s, y)

  LbfgsResult result;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    result.final_gradient_norm = norm(grad) / g0_norm;
    if (result.final_gradient_norm < opts.tolerance) {
      result.converged = true;
      return result;
    }

    // two-loop recursion
    direction = grad;
    std::vector<double> alpha(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
      const auto& [s, y] = pairs[k];
      double rho = 1.0 / dot(y, s);
      alpha[k] = rho * dot(s, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha[k] * y[i];
    }
    if (!pairs.empty()) {
      const auto& [s, y] = pairs.back();
      double gamma = dot(s, y) / dot(y, y);
      for (auto& d : direction) d *= gamma;
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [s, y] = pairs[k];
      double rho = 1.0 / dot(y, s);
      double beta = rho * dot(y, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha[k] - beta) * s[i];
    }
    for (auto& d : direction) d = -d;

    double dg = dot(grad, direction);
    if (dg >= 0.0) {  // not a descent direction; fall back to steepest descent
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      dg = -dot(grad, grad);
      pairs.clear();
    }

    double step = pairs.empty() ? std::min(1.0, 1.0 / std::max(1.0, norm(grad))) : 1.0;
    double new_f = f;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) new_x[i] = x[i] + step * direction[i];
      new_f = fg(new_x, new_grad);
      if (std::isfinite(new_f) && new_f <= f + opts.armijo_c1 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {  // cannot make progress at machine precision
      result.iterations = iter;
      return result;
    }

    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = new_x[i] - x[i];
      y[i] = new_grad[i] - grad[i];
    }
    double sy = dot(s, y);
    if (sy > 1e-12 * norm(s) * norm(y)) {
      pairs.emplace_back(std::move(s), std::move(y));
      if (pairs.size() > static_cast<std::size_t>(opts.memory)) pairs.pop_front();
    }

    x.swap(new_x);
    grad.swap(new_grad);
    f = new_f;
    if (loss_history) loss_history->push_back(f);
    result.iterations = iter + 1;
  }
  result.final_gradient_norm = norm(grad) / g0_norm;
  result.converged = result.final_gradient_norm < opts.tolerance;
  return result;
}

}  // namespace cmpos::detail

#endif  // CMPOS_SRC_LBFGS_HPP
