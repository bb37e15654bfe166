#include "hawkes/optimize.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "hawkes/types.hpp"

namespace hawkes {

const char* to_string(OptimizeStatus s) {
  switch (s) {
    case OptimizeStatus::Converged: return "converged";
    case OptimizeStatus::MaxIterations: return "max_iterations";
    case OptimizeStatus::LineSearchFail: return "line_search_fail";
  }
  return "unknown";
}

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double fx, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper, double fd_step, long& evaluations) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd g(n);
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = fd_step * std::max(1.0, std::abs(x[i]));
    const bool can_up = x[i] + h <= upper[i];
    const bool can_down = x[i] - h >= lower[i];
    double f_up = std::numeric_limits<double>::quiet_NaN();
    double f_down = std::numeric_limits<double>::quiet_NaN();
    if (can_up) {
      probe[i] = x[i] + h;
      f_up = f(probe);
      ++evaluations;
    }
    if (can_down) {
      probe[i] = x[i] - h;
      f_down = f(probe);
      ++evaluations;
    }
    probe[i] = x[i];
    const bool up_ok = std::isfinite(f_up);
    const bool down_ok = std::isfinite(f_down);
    if (up_ok && down_ok) {
      g[i] = (f_up - f_down) / (2.0 * h);
    } else if (up_ok) {
      g[i] = (f_up - fx) / h;
    } else if (down_ok) {
      g[i] = (fx - f_down) / h;
    } else {
      g[i] = 0.0;
    }
  }
  return g;
}

OptimizeResult minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper, const OptimizeOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw ValidationError("bound vectors must match the variable count");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw ValidationError("lower bound exceeds upper bound");
  }

  OptimizeResult out;
  out.x = clamp(x0, lower, upper);
  out.f = f(out.x);
  out.evaluations = 1;
  if (!std::isfinite(out.f))
    throw NumericalError("objective is not finite at the (clamped) initial point");
  if (n == 0) {
    out.status = OptimizeStatus::Converged;
    return out;
  }

  Eigen::VectorXd g =
      fd_gradient(f, out.x, out.f, lower, upper, options.fd_step, out.evaluations);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  int stalled = 0;

  auto pg_norm = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& grad) {
    return (x - clamp(x - grad, lower, upper)).cwiseAbs().maxCoeff();
  };

  // Largest gradient consistent with having exhausted double precision: the
  // best decrease still available along the gradient is about g^2/(2 c) with
  // c the local curvature, and once that drops under the objective's rounding
  // noise (~eps |f|) no line search can verify further progress.  The most
  // recent curvature pair provides the scale for c; the factor 50 absorbs the
  // roughness of that scalar estimate.
  auto noise_floor_gradient = [&]() {
    double curvature = 1.0;
    if (!s_hist.empty()) {
      const double sy = s_hist.back().dot(y_hist.back());
      if (sy > 0.0) curvature = y_hist.back().squaredNorm() / sy;
    }
    constexpr double kEps = 2.220446049250313e-16;
    return 50.0 * std::sqrt(2.0 * curvature * kEps * std::max(1.0, std::abs(out.f)));
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter;
    out.pg_norm = pg_norm(out.x, g);
    if (out.pg_norm <= options.pg_tolerance) {
      out.status = OptimizeStatus::Converged;
      return out;
    }

    // Gradient restricted to the inactive set: coordinates pinned at a bound
    // with the gradient pushing outward take no part in the direction.
    Eigen::VectorXd gm = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lower = out.x[i] <= lower[i] && g[i] > 0.0;
      const bool at_upper = out.x[i] >= upper[i] && g[i] < 0.0;
      if (at_lower || at_upper) gm[i] = 0.0;
    }

    // Two-loop recursion on the restricted gradient.
    Eigen::VectorXd q = gm;
    const std::size_t m = s_hist.size();
    std::vector<double> alpha_coef(m);
    for (std::size_t h = m; h-- > 0;) {
      alpha_coef[h] = rho_hist[h] * s_hist[h].dot(q);
      q -= alpha_coef[h] * y_hist[h];
    }
    if (m > 0) {
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t h = 0; h < m; ++h) {
      const double beta_coef = rho_hist[h] * y_hist[h].dot(q);
      q += (alpha_coef[h] - beta_coef) * s_hist[h];
    }
    Eigen::VectorXd dir = -q;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (gm[i] == 0.0 && g[i] != 0.0) dir[i] = 0.0;
    }
    if (dir.dot(gm) >= 0.0) {
      // Not a descent direction (stale curvature); fall back to steepest
      // descent and drop the memory.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -gm;
    }

    double step = 1.0;
    if (s_hist.empty()) {
      const double norm1 = gm.cwiseAbs().sum();
      if (norm1 > 1.0) step = 1.0 / norm1;
    }

    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = out.f;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      x_new = clamp(out.x + step * dir, lower, upper);
      const Eigen::VectorXd actual = x_new - out.x;
      const double forecast = g.dot(actual);
      if (actual.cwiseAbs().maxCoeff() == 0.0) break;
      f_new = f(x_new);
      ++out.evaluations;
      if (std::isfinite(f_new) && forecast < 0.0 &&
          f_new <= out.f + options.armijo * forecast) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.status = out.pg_norm <= std::max(10.0 * options.pg_tolerance, noise_floor_gradient())
                       ? OptimizeStatus::Converged
                       : OptimizeStatus::LineSearchFail;
      return out;
    }

    Eigen::VectorXd g_new =
        fd_gradient(f, x_new, f_new, lower, upper, options.fd_step, out.evaluations);
    const Eigen::VectorXd s_vec = x_new - out.x;
    const Eigen::VectorXd y_vec = g_new - g;
    const double sy = s_vec.dot(y_vec);
    if (sy > 1e-10 * s_vec.norm() * y_vec.norm()) {
      s_hist.push_back(s_vec);
      y_hist.push_back(y_vec);
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > static_cast<std::size_t>(options.history)) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double df = out.f - f_new;
    out.x = std::move(x_new);
    out.f = f_new;
    g = std::move(g_new);

    if (std::abs(df) <= 1e-14 * std::max(1.0, std::abs(out.f))) {
      if (++stalled >= 2) {
        out.pg_norm = pg_norm(out.x, g);
        out.status =
            out.pg_norm <= std::max(10.0 * options.pg_tolerance, noise_floor_gradient())
                ? OptimizeStatus::Converged
                : OptimizeStatus::LineSearchFail;
        out.iterations = iter + 1;
        return out;
      }
    } else {
      stalled = 0;
    }
  }
  out.iterations = options.max_iterations;
  out.pg_norm = pg_norm(out.x, g);
  out.status = OptimizeStatus::MaxIterations;
  return out;
}

}  // namespace hawkes
