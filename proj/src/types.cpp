#include "hawkes/types.hpp"

#include <cmath>
#include <sstream>

namespace hawkes {

std::string to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::HP: return "hp";
    case ModelVariant::VM: return "vm";
    case ModelVariant::GVM: return "gvm";
  }
  throw std::logic_error("unreachable model variant");
}

std::string to_string(MaskTag t) {
  switch (t) {
    case MaskTag::Free: return "free";
    case MaskTag::Zero: return "zero";
    case MaskTag::Equal: return "equal";
    case MaskTag::TildeZero: return "tilde_zero";
  }
  throw std::logic_error("unreachable mask tag");
}

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

ModelVariant variant_from_string(const std::string& s) {
  const std::string v = lowercase(s);
  if (v == "hp") return ModelVariant::HP;
  if (v == "vm") return ModelVariant::VM;
  if (v == "gvm") return ModelVariant::GVM;
  throw ValidationError("unknown model variant '" + s + "' (expected hp, vm or gvm)");
}

MaskTag mask_tag_from_string(const std::string& s) {
  const std::string v = lowercase(s);
  if (v == "free") return MaskTag::Free;
  if (v == "zero") return MaskTag::Zero;
  if (v == "equal") return MaskTag::Equal;
  if (v == "tilde_zero") return MaskTag::TildeZero;
  throw ValidationError("unknown mask tag '" + s +
                        "' (expected free, zero, equal or tilde_zero)");
}

KernelParameters KernelParameters::zeros(Eigen::Index d) {
  KernelParameters p;
  p.mu = Eigen::VectorXd::Ones(d);
  p.alpha = Eigen::MatrixXd::Zero(d, d);
  p.beta = Eigen::VectorXd::Ones(d);
  p.alpha_tilde = Eigen::MatrixXd::Zero(d, d);
  p.beta_tilde = Eigen::VectorXd::Ones(d);
  p.mask = MaskMatrix::Constant(d, d, MaskTag::Free);
  return p;
}

bool KernelParameters::common_decay() const {
  return beta_tilde.size() == beta.size() && (beta_tilde.array() == beta.array()).all();
}

KernelParameters KernelParameters::as_hp() const {
  KernelParameters p = *this;
  p.alpha_tilde = p.alpha;
  p.beta_tilde = p.beta;
  return p;
}

KernelParameters KernelParameters::as_vm() const {
  KernelParameters p = *this;
  p.alpha_tilde.setZero();
  p.beta_tilde = p.beta;
  return p;
}

std::vector<double> per_dimension_times(const Realization& r, int dim) {
  std::vector<double> out;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    if (r.dims[k] == dim) out.push_back(r.times[k]);
  }
  return out;
}

Eigen::VectorXi per_dimension_counts(const Realization& r) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(r.dimension);
  for (int d : r.dims) counts[d] += 1;
  return counts;
}

std::vector<std::string> validate(const KernelParameters& p, ModelVariant variant) {
  std::vector<std::string> v;
  const Eigen::Index d = p.mu.size();
  if (d == 0) {
    v.push_back("dimension must be at least 1");
    return v;
  }
  auto check_shape = [&](Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (rows != d || cols != d) {
      std::ostringstream os;
      os << name << " must be " << d << "x" << d << ", got " << rows << "x" << cols;
      v.push_back(os.str());
      return false;
    }
    return true;
  };
  const bool alpha_ok = check_shape(p.alpha.rows(), p.alpha.cols(), "alpha");
  const bool tilde_ok = check_shape(p.alpha_tilde.rows(), p.alpha_tilde.cols(), "alpha_tilde");
  const bool mask_ok = check_shape(p.mask.rows(), p.mask.cols(), "mask");
  if (p.beta.size() != d) v.push_back("beta must have length " + std::to_string(d));
  if (p.beta_tilde.size() != d) v.push_back("beta_tilde must have length " + std::to_string(d));

  auto all_finite = [](const auto& m) { return m.array().isFinite().all(); };
  if (!all_finite(p.mu)) v.push_back("mu has non-finite entries");
  if (alpha_ok && !all_finite(p.alpha)) v.push_back("alpha has non-finite entries");
  if (tilde_ok && !all_finite(p.alpha_tilde)) v.push_back("alpha_tilde has non-finite entries");
  if (p.beta.size() == d && !all_finite(p.beta)) v.push_back("beta has non-finite entries");
  if (p.beta_tilde.size() == d && !all_finite(p.beta_tilde))
    v.push_back("beta_tilde has non-finite entries");

  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(p.mu[i] > 0.0)) v.push_back("mu[" + std::to_string(i + 1) + "] must be > 0");
    if (p.beta.size() == d && !(p.beta[i] > 0.0))
      v.push_back("beta[" + std::to_string(i + 1) + "] must be > 0");
    if (p.beta_tilde.size() == d && !(p.beta_tilde[i] > 0.0))
      v.push_back("beta_tilde[" + std::to_string(i + 1) + "] must be > 0");
  }

  if (alpha_ok && tilde_ok && mask_ok) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const std::string entry =
            "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
        switch (p.mask(i, j)) {
          case MaskTag::Free:
            break;
          case MaskTag::Zero:
            if (p.alpha(i, j) != 0.0 || p.alpha_tilde(i, j) != 0.0)
              v.push_back("mask" + entry + " is zero but alpha/alpha_tilde are nonzero");
            break;
          case MaskTag::Equal:
            if (p.alpha(i, j) != p.alpha_tilde(i, j))
              v.push_back("mask" + entry + " is equal but alpha != alpha_tilde");
            break;
          case MaskTag::TildeZero:
            if (p.alpha_tilde(i, j) != 0.0)
              v.push_back("mask" + entry + " is tilde_zero but alpha_tilde is nonzero");
            break;
        }
      }
    }
    if (variant == ModelVariant::HP) {
      if (!(p.alpha.array() == p.alpha_tilde.array()).all())
        v.push_back("hp variant requires alpha_tilde == alpha");
      if (p.beta.size() == d && p.beta_tilde.size() == d &&
          !(p.beta.array() == p.beta_tilde.array()).all())
        v.push_back("hp variant requires beta_tilde == beta");
    } else if (variant == ModelVariant::VM) {
      if (!(p.alpha_tilde.array() == 0.0).all())
        v.push_back("vm variant requires alpha_tilde == 0");
    }
  }
  return v;
}

std::vector<std::string> validate(const Realization& r) {
  std::vector<std::string> v;
  if (r.dimension < 1) v.push_back("dimension must be at least 1");
  if (!(r.horizon > 0.0) || !std::isfinite(r.horizon))
    v.push_back("horizon must be positive and finite");
  if (r.times.size() != r.dims.size())
    v.push_back("times and dims must have equal length");
  const std::size_t n = std::min(r.times.size(), r.dims.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(r.times[k]) || r.times[k] <= 0.0 || r.times[k] > r.horizon) {
      v.push_back("event " + std::to_string(k + 1) + " outside (0, horizon]");
      break;
    }
    if (k > 0 && !(r.times[k] > r.times[k - 1])) {
      v.push_back("event times must be strictly increasing (violated at event " +
                  std::to_string(k + 1) + ")");
      break;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (r.dims[k] < 0 || r.dims[k] >= r.dimension) {
      v.push_back("event " + std::to_string(k + 1) + " has dimension out of range");
      break;
    }
  }
  return v;
}

namespace {

[[noreturn]] void throw_violations(const std::vector<std::string>& v, const char* what) {
  std::ostringstream os;
  os << "invalid " << what << ":";
  for (const auto& s : v) os << "\n  - " << s;
  throw ValidationError(os.str());
}

}  // namespace

void require_valid(const KernelParameters& p, ModelVariant variant) {
  const auto v = validate(p, variant);
  if (!v.empty()) throw_violations(v, "parameters");
}

void require_valid(const Realization& r) {
  const auto v = validate(r);
  if (!v.empty()) throw_violations(v, "realization");
}

}  // namespace hawkes
