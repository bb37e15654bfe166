#include "hawkes/intensity.hpp"

namespace hawkes {

namespace {

Eigen::ArrayXd decay_factors(const Eigen::VectorXd& rates, double dt) {
  return (-rates.array() * dt).unaryExpr([](double x) { return exp_flush(x); });
}

void check_dimension(const IntensityState& s, const KernelParameters& p) {
  if (s.eta.size() != p.dimension())
    throw ValidationError("intensity state and parameters disagree on dimension");
}

}  // namespace

IntensityState initial_state(Eigen::Index d) {
  if (d < 1) throw ValidationError("dimension must be at least 1");
  IntensityState s;
  s.time = 0.0;
  s.last_dim = -1;
  s.eta = Eigen::ArrayXd::Zero(d);
  s.eta_tilde = Eigen::ArrayXd::Zero(d);
  s.eta_aux = Eigen::ArrayXd::Zero(d);
  return s;
}

Eigen::VectorXd underlying_between(const IntensityState& s, const KernelParameters& p,
                                   double t) {
  check_dimension(s, p);
  if (!(t > s.time))
    throw ValidationError("evaluation time must lie strictly after the anchor event");
  const double dt = t - s.time;
  Eigen::ArrayXd recent = s.eta;
  if (s.last_dim >= 0) recent += p.alpha.col(s.last_dim).array();
  return (p.mu.array() + recent * decay_factors(p.beta, dt) +
          s.eta_tilde * decay_factors(p.beta_tilde, dt))
      .matrix();
}

Eigen::VectorXd intensity_between(const IntensityState& s, const KernelParameters& p,
                                  double t) {
  return underlying_between(s, p, t).cwiseMax(0.0);
}

IntensityState advance_state(const IntensityState& s, const KernelParameters& p, double t,
                             int dim) {
  check_dimension(s, p);
  if (dim < 0 || dim >= p.dimension())
    throw ValidationError("event dimension out of range in advance_state");
  if (!(t > s.time)) throw ValidationError("event times must be strictly increasing");

  const double dt = t - s.time;
  const Eigen::ArrayXd decay = decay_factors(p.beta, dt);
  const Eigen::ArrayXd decay_tilde = decay_factors(p.beta_tilde, dt);

  IntensityState next;
  next.time = t;
  next.last_dim = dim;
  if (s.last_dim >= 0) {
    next.eta = (s.eta + p.alpha.col(s.last_dim).array()) * decay;
    next.eta_aux = (s.eta_aux + p.alpha_tilde.col(s.last_dim).array()) * decay_tilde;
  } else {
    next.eta = s.eta * decay;
    next.eta_aux = s.eta_aux * decay_tilde;
  }
  next.eta_tilde = s.eta_tilde * decay_tilde;

  // Memory reset for the jumping dimension: everything it had accumulated
  // (already decayed at the distant-past rate) becomes distant past.
  next.eta_tilde[dim] += next.eta_aux[dim];
  next.eta[dim] = 0.0;
  next.eta_aux[dim] = 0.0;
  return next;
}

Eigen::VectorXd underlying_at_anchor(const IntensityState& s, const KernelParameters& p) {
  check_dimension(s, p);
  return (p.mu.array() + s.eta + s.eta_tilde).matrix();
}

ReplayResult replay(const Realization& r, const KernelParameters& p) {
  require_valid(r);
  if (r.dimension != p.dimension())
    throw ValidationError("realization and parameters disagree on dimension");
  const Eigen::Index n = static_cast<Eigen::Index>(r.size());
  ReplayResult out;
  out.left_limits.resize(n, p.dimension());
  out.at_event.resize(n, p.dimension());
  IntensityState state = initial_state(p.dimension());
  for (Eigen::Index k = 0; k < n; ++k) {
    out.left_limits.row(k) = underlying_between(state, p, r.times[k]).transpose();
    state = advance_state(state, p, r.times[k], r.dims[k]);
    out.at_event.row(k) = underlying_at_anchor(state, p).transpose();
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace hawkes
