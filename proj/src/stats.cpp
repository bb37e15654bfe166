#include "hawkes/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hawkes/types.hpp"

namespace hawkes {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

/// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 3e-16) return h;
  }
  throw NumericalError("incomplete beta continued fraction failed to converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw ValidationError("incomplete_beta requires a > 0 and b > 0");
  if (std::isnan(x)) throw ValidationError("incomplete_beta received NaN");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double nu) {
  if (!(nu > 0.0)) throw ValidationError("student_t_cdf requires nu > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  if (t == 0.0) return 0.5;
  const double x = nu / (nu + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

double fisher_f_cdf(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw ValidationError("fisher_f_cdf requires positive degrees of freedom");
  if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
  if (f <= 0.0) return 0.0;
  if (std::isinf(f)) return 1.0;
  return incomplete_beta(0.5 * d1, 0.5 * d2, d1 * f / (d1 * f + d2));
}

double kolmogorov_q(double x) {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Small-x branch via the theta-function form of the CDF.
    const double t = std::exp(-kPi * kPi / (8.0 * x * x));
    const double cdf = std::sqrt(2.0 * kPi) / x *
                       (t + std::pow(t, 9.0) + std::pow(t, 25.0) + std::pow(t, 49.0));
    return 1.0 - cdf;
  }
  const double u = std::exp(-2.0 * x * x);
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 30; ++k) {
    const double term = std::pow(u, static_cast<double>(k) * k);
    q += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::max(0.0, 2.0 * q);
}

std::string to_string(TestKind k) {
  switch (k) {
    case TestKind::HotellingT2: return "hotelling_t2";
    case TestKind::StudentT: return "student_t";
    case TestKind::EmpiricalSign: return "empirical_sign";
  }
  throw std::logic_error("unreachable test kind");
}

std::string to_string(TestNull n) {
  switch (n) {
    case TestNull::JointZero: return "joint_zero";
    case TestNull::TildeZero: return "tilde_zero";
    case TestNull::EqualMemory: return "equal_memory";
    case TestNull::AlphaZero: return "alpha_zero";
  }
  throw std::logic_error("unreachable test null");
}

std::string to_string(CiKind c) {
  return c == CiKind::Asymptotic ? "asymptotic" : "empirical";
}

CiKind ci_kind_from_string(const std::string& s) {
  std::string v = s;
  for (char& ch : v) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (v == "asymptotic") return CiKind::Asymptotic;
  if (v == "empirical") return CiKind::Empirical;
  throw ValidationError("unknown test variant '" + s + "' (expected asymptotic or empirical)");
}

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

/// Two-sided sign-test p-value 2 min(k+, k-) / n and the smaller count.
std::pair<double, double> sign_test(const std::vector<double>& v) {
  double pos = 0.0, neg = 0.0;
  for (double x : v) {
    if (x > 0.0) pos += 1.0;
    else if (x < 0.0) neg += 1.0;
  }
  const double smaller = std::min(pos, neg);
  return {2.0 * smaller / static_cast<double>(v.size()), smaller};
}

/// One-sample Student test of zero mean with the degenerate-sample
/// convention (constant zero -> p = 1, constant nonzero -> p = 0).
PairTest student_zero_mean(const std::vector<double>& samples, TestNull null_hyp) {
  if (samples.size() < 2)
    throw ValidationError("asymptotic mean test requires at least 2 samples");
  PairTest out;
  out.kind = TestKind::StudentT;
  out.null_hyp = null_hyp;
  const double n = static_cast<double>(samples.size());
  const double mean = mean_of(samples);
  const double var = sample_variance(samples, mean);
  if (var == 0.0) {
    out.zero_variance = true;
    if (mean == 0.0) {
      out.statistic = 0.0;
      out.p_value = 1.0;
    } else {
      out.statistic = mean > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
      out.p_value = 0.0;
    }
    return out;
  }
  out.statistic = mean * std::sqrt(n / var);
  out.p_value = 2.0 * (1.0 - student_t_cdf(std::abs(out.statistic), n - 1.0));
  return out;
}

PairTest sign_zero_mean(const std::vector<double>& samples, TestNull null_hyp) {
  if (samples.empty()) throw ValidationError("empirical mean test requires samples");
  PairTest out;
  out.kind = TestKind::EmpiricalSign;
  out.null_hyp = null_hyp;
  const auto [p, smaller] = sign_test(samples);
  out.statistic = smaller;
  out.p_value = p;
  return out;
}

}  // namespace

PairTest test1_joint_zero(const std::vector<double>& alpha_samples,
                          const std::vector<double>& alpha_tilde_samples, CiKind kind) {
  if (alpha_samples.size() != alpha_tilde_samples.size())
    throw ValidationError("paired samples must have equal length");
  const std::size_t n = alpha_samples.size();
  if (n == 0) throw ValidationError("joint test requires samples");

  auto empirical = [&](bool singular) {
    PairTest out;
    out.kind = TestKind::EmpiricalSign;
    out.null_hyp = TestNull::JointZero;
    out.covariance_singular = singular;
    const double eta = sign_test(alpha_samples).first;
    const double eta_tilde = sign_test(alpha_tilde_samples).first;
    out.statistic = std::min(eta, eta_tilde);
    out.p_value = std::min(1.0, 2.0 * out.statistic);
    return out;
  };
  if (kind == CiKind::Empirical) return empirical(false);

  if (n < 3) throw ValidationError("asymptotic joint test requires at least 3 samples");
  const double nn = static_cast<double>(n);
  const double m1 = mean_of(alpha_samples);
  const double m2 = mean_of(alpha_tilde_samples);
  double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d1 = alpha_samples[k] - m1;
    const double d2 = alpha_tilde_samples[k] - m2;
    s11 += d1 * d1;
    s22 += d2 * d2;
    s12 += d1 * d2;
  }
  s11 /= nn - 1.0;
  s22 /= nn - 1.0;
  s12 /= nn - 1.0;
  const double det = s11 * s22 - s12 * s12;
  if (!(det > 0.0) || !std::isfinite(det)) return empirical(true);

  // t^2 = n m' S^-1 m with the 2x2 inverse written out.
  const double t2 = nn * (m1 * (s22 * m1 - s12 * m2) + m2 * (s11 * m2 - s12 * m1)) / det;
  PairTest out;
  out.kind = TestKind::HotellingT2;
  out.null_hyp = TestNull::JointZero;
  out.statistic = t2;
  const double f_stat = t2 * (nn - 2.0) / (2.0 * (nn - 1.0));
  out.p_value = 1.0 - fisher_f_cdf(f_stat, 2.0, nn - 2.0);
  return out;
}

PairTest test2_tilde_zero(const std::vector<double>& alpha_tilde_samples, CiKind kind) {
  return kind == CiKind::Asymptotic
             ? student_zero_mean(alpha_tilde_samples, TestNull::TildeZero)
             : sign_zero_mean(alpha_tilde_samples, TestNull::TildeZero);
}

PairTest test3_equal_memory(const std::vector<double>& alpha_samples,
                            const std::vector<double>& alpha_tilde_samples, CiKind kind) {
  if (alpha_samples.size() != alpha_tilde_samples.size())
    throw ValidationError("paired samples must have equal length");
  std::vector<double> diff(alpha_samples.size());
  for (std::size_t k = 0; k < diff.size(); ++k)
    diff[k] = alpha_samples[k] - alpha_tilde_samples[k];
  return kind == CiKind::Asymptotic ? student_zero_mean(diff, TestNull::EqualMemory)
                                    : sign_zero_mean(diff, TestNull::EqualMemory);
}

PairTest test_alpha_zero(const std::vector<double>& alpha_samples, CiKind kind) {
  return kind == CiKind::Asymptotic ? student_zero_mean(alpha_samples, TestNull::AlphaZero)
                                    : sign_zero_mean(alpha_samples, TestNull::AlphaZero);
}

BhResult benjamini_hochberg(const std::vector<double>& p_values, double q) {
  if (!(q > 0.0) || !(q < 1.0)) throw ValidationError("q must lie in (0, 1)");
  for (double p : p_values) {
    if (std::isnan(p) || p < 0.0 || p > 1.0)
      throw ValidationError("p-values must lie in [0, 1]");
  }
  const std::size_t m = p_values.size();
  BhResult out;
  out.rejected.assign(m, false);
  if (m == 0) return out;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });
  double cutoff = -1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double level = static_cast<double>(r + 1) * q / static_cast<double>(m);
    if (p_values[order[r]] <= level) {
      cutoff = p_values[order[r]];
      break;
    }
  }
  if (cutoff < 0.0) return out;
  out.threshold = cutoff;
  for (std::size_t i = 0; i < m; ++i) {
    if (p_values[i] <= cutoff) {
      out.rejected[i] = true;
      ++out.n_rejected;
    }
  }
  return out;
}

std::pair<double, double> empirical_ci(std::vector<double> samples, double eta) {
  const std::size_t n = samples.size();
  if (n == 0) throw ValidationError("empirical_ci requires samples");
  if (!(eta >= 0.0) || !(eta <= 1.0)) throw ValidationError("eta must lie in [0, 1]");
  std::sort(samples.begin(), samples.end());
  const auto lower_idx = static_cast<std::size_t>(std::floor(eta * static_cast<double>(n) / 2.0));
  auto upper_idx = static_cast<std::size_t>(std::ceil((1.0 - eta / 2.0) * static_cast<double>(n)));
  upper_idx = std::min(upper_idx, n);
  const double lower = lower_idx == 0 ? -std::numeric_limits<double>::infinity()
                                      : samples[lower_idx - 1];
  const double upper = upper_idx == 0 ? -std::numeric_limits<double>::infinity()
                                      : samples[upper_idx - 1];
  return {lower, upper};
}

}  // namespace hawkes
