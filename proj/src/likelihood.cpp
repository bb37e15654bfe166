#include "hawkes/likelihood.hpp"

#include <cmath>
#include <limits>

#include "hawkes/intensity.hpp"

namespace hawkes {

double restart_time(double mu, double beta, double underlying_plus, double t_event) {
  if (!(mu > 0.0) || !(beta > 0.0))
    throw ValidationError("restart_time requires mu > 0 and beta > 0");
  if (underlying_plus >= 0.0) return t_event;
  // underlying(t) = mu + C exp(-beta (t - t_event)) with C = underlying_plus - mu
  // crosses zero at t_event + log(-C / mu) / beta; C < -mu makes the argument > 1.
  const double c = underlying_plus - mu;
  return t_event + std::log(-c / mu) / beta;
}

double segment_integral(double mu, double beta, double c, double t_event, double restart,
                        double t_end) {
  if (!(mu > 0.0) || !(beta > 0.0))
    throw ValidationError("segment_integral requires mu > 0 and beta > 0");
  if (!(t_event <= restart && restart <= t_end))
    throw ValidationError("segment_integral requires t_event <= restart <= t_end");
  return mu * (t_end - restart) +
         c / beta * (exp_flush(-beta * (restart - t_event)) - exp_flush(-beta * (t_end - t_event)));
}

namespace {

void check_common_decay_inputs(const Realization& r, const KernelParameters& p) {
  require_valid(r);
  require_valid(p);
  if (r.dimension != p.dimension())
    throw ValidationError("realization and parameters disagree on dimension");
  if (!p.common_decay())
    throw ValidationError(
        "closed-form compensator and likelihood require beta_tilde == beta exactly");
}

/// Single left-to-right sweep over the events.  Maintains the recent-past /
/// distant-past accumulators of the intensity recursion, integrates the
/// positive part of each dimension's intensity in closed form per segment
/// (restart times handle excursions below zero), and, when WithLog, adds the
/// log left-limit intensity at each own event.
template <bool WithTrace, bool WithLog>
LogLikelihood sweep(const Realization& r, const KernelParameters& p, LikelihoodWorkspace& ws,
                    Eigen::MatrixXd* trace) {
  const Eigen::Index d = p.dimension();
  const std::size_t n = r.size();
  if (ws.eta.size() != d) {
    ws.eta.resize(d);
    ws.eta_tilde.resize(d);
    ws.eta_aux.resize(d);
    ws.decay.resize(d);
    ws.lambda_mass.resize(d);
  }
  ws.eta.setZero();
  ws.eta_tilde.setZero();
  ws.eta_aux.setZero();
  ws.lambda_mass.setZero();

  LogLikelihood out;
  out.per_dimension = Eigen::VectorXd::Zero(d);

  const double* mu = p.mu.data();
  const double* beta = p.beta.data();
  const double* a = p.alpha.data();         // column-major: a[j*d + i] = alpha(i, j)
  const double* at = p.alpha_tilde.data();  // same layout
  double* eta = ws.eta.data();
  double* tilde = ws.eta_tilde.data();
  double* aux = ws.eta_aux.data();
  double* decay = ws.decay.data();
  double* lambda_mass = ws.lambda_mass.data();

  int prev = -1;
  double t_prev = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const bool is_event = k < n;
    const double seg_end = is_event ? r.times[k] : r.horizon;
    const double dt = seg_end - t_prev;
    const int istar = is_event ? r.dims[k] : -1;
    double c_star = 0.0;

    const double* a_prev = prev >= 0 ? a + static_cast<std::size_t>(prev) * d : nullptr;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double e = exp_flush(-beta[i] * dt);
      decay[i] = e;
      const double c = eta[i] + tilde[i] + (a_prev ? a_prev[i] : 0.0);
      if (i == istar) c_star = c;
      const double after_jump = mu[i] + c;
      double piece;
      if (after_jump >= 0.0) {
        piece = mu[i] * dt + c / beta[i] * (1.0 - e);
      } else {
        // Intensity starts the segment below zero; it contributes nothing
        // until the exact crossing time, dstar after the segment start.
        const double dstar = std::log(-c / mu[i]) / beta[i];
        piece = dstar >= dt ? 0.0
                            : mu[i] * (dt - dstar) +
                                  c / beta[i] * (exp_flush(-beta[i] * dstar) - e);
      }
      lambda_mass[i] += piece;
    }
    if constexpr (WithTrace) {
      if (is_event) trace->row(static_cast<Eigen::Index>(k)) = ws.lambda_mass.matrix().transpose();
    }
    if (!is_event) break;

    if constexpr (WithLog) {
      const double left = mu[istar] + c_star * decay[istar];
      if (!(left > 0.0)) {
        out.total = -std::numeric_limits<double>::infinity();
        out.finite = false;
        out.offending_event = static_cast<std::ptrdiff_t>(k);
        out.per_dimension.setConstant(std::numeric_limits<double>::quiet_NaN());
        return out;
      }
      out.per_dimension[istar] += std::log(left);
    }

    const double* at_prev = prev >= 0 ? at + static_cast<std::size_t>(prev) * d : nullptr;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double e = decay[i];
      eta[i] = (eta[i] + (a_prev ? a_prev[i] : 0.0)) * e;
      aux[i] = (aux[i] + (at_prev ? at_prev[i] : 0.0)) * e;
      tilde[i] *= e;
    }
    tilde[istar] += aux[istar];
    eta[istar] = 0.0;
    aux[istar] = 0.0;
    prev = istar;
    t_prev = seg_end;
  }

  out.per_dimension -= ws.lambda_mass.matrix();
  out.total = out.per_dimension.sum();
  return out;
}

}  // namespace

CompensatorTrace compensator(const Realization& r, const KernelParameters& p) {
  check_common_decay_inputs(r, p);
  CompensatorTrace trace;
  trace.cumulative.resize(static_cast<Eigen::Index>(r.size()), p.dimension());
  LikelihoodWorkspace ws;
  (void)sweep<true, false>(r, p, ws, &trace.cumulative);
  trace.at_horizon = ws.lambda_mass.matrix();
  return trace;
}

LogLikelihood log_likelihood(const Realization& r, const KernelParameters& p) {
  check_common_decay_inputs(r, p);
  LikelihoodWorkspace ws;
  return sweep<false, true>(r, p, ws, nullptr);
}

LogLikelihood log_likelihood_unchecked(const Realization& r, const KernelParameters& p,
                                       LikelihoodWorkspace& ws) {
  return sweep<false, true>(r, p, ws, nullptr);
}

}  // namespace hawkes
