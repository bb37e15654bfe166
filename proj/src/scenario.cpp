#include "hawkes/scenario.hpp"

#include <cmath>
#include <utility>

#include "hawkes/parallel.hpp"
#include "hawkes/simulate.hpp"

namespace hawkes {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError("[" + std::string(name) + "] " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError("[" + std::string(name) + "] " + e.what());
  }
}

GroupError group_error(double err_sq, double norm_sq) {
  if (norm_sq > 0.0) return {err_sq / norm_sq, false};
  return {err_sq, true};
}

void count_decision(Confusion& c, bool truth_positive, bool rejected) {
  if (rejected)
    ++(truth_positive ? c.true_positive : c.false_positive);
  else
    ++(truth_positive ? c.false_negative : c.true_negative);
}

/// The generating parameters as seen from a fitted model class.
KernelParameters project_truth(const KernelParameters& truth, ModelVariant fitted) {
  switch (fitted) {
    case ModelVariant::HP: return truth.as_hp();
    case ModelVariant::VM: return truth.as_vm();
    case ModelVariant::GVM: return truth;
  }
  throw ValidationError("unknown model variant");
}

std::vector<GroupErrors> score_step(const std::vector<FitResult>& fits,
                                    const KernelParameters& truth) {
  std::vector<GroupErrors> out;
  out.reserve(fits.size());
  for (const FitResult& f : fits) out.push_back(report_errors(f.theta_hat, truth));
  return out;
}

io::json fit_to_json(const FitResult& f, ModelVariant fitted) {
  return io::json{{"theta", io::params_to_json(f.theta_hat, fitted)},
                  {"neg_loglik", f.neg_loglik},
                  {"status", to_string(f.status)},
                  {"iterations", f.iterations}};
}

}  // namespace

io::json group_errors_to_json(const GroupErrors& e) {
  auto one = [](const GroupError& g) {
    return io::json{{"value", g.value}, {"absolute", g.absolute}};
  };
  return io::json{{"mu", one(e.mu)},
                  {"alpha", one(e.alpha)},
                  {"beta", one(e.beta)},
                  {"alpha_tilde", one(e.alpha_tilde)}};
}

io::json confusion_to_json(const Confusion& c) {
  return io::json{{"true_positive", c.true_positive},
                  {"false_positive", c.false_positive},
                  {"true_negative", c.true_negative},
                  {"false_negative", c.false_negative}};
}

io::json mask_to_json(const MaskMatrix& mask) {
  io::json rows = io::json::array();
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    io::json row = io::json::array();
    for (Eigen::Index j = 0; j < mask.cols(); ++j) row.push_back(to_string(mask(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

io::json tests_to_json(const std::vector<PairTest>& tests, const BhResult& bh) {
  io::json arr = io::json::array();
  for (std::size_t k = 0; k < tests.size(); ++k) {
    const PairTest& t = tests[k];
    io::json item{{"i", t.i + 1},
                  {"j", t.j + 1},
                  {"kind", to_string(t.kind)},
                  {"null", to_string(t.null_hyp)},
                  {"statistic", t.statistic},
                  {"p_value", t.p_value},
                  {"rejected", k < bh.rejected.size() ? static_cast<bool>(bh.rejected[k])
                                                      : t.rejected}};
    if (t.covariance_singular) item["covariance_singular"] = true;
    if (t.zero_variance) item["zero_variance"] = true;
    arr.push_back(std::move(item));
  }
  return io::json{{"tests", std::move(arr)},
                  {"bh_threshold", bh.threshold},
                  {"n_rejected", bh.n_rejected}};
}

io::json pipeline_to_json(const PipelineResult& p) {
  io::json doc{{"variant", to_string(p.variant)},
               {"n_trials", p.step1.size()},
               {"mask_step1", mask_to_json(p.mask_step1)},
               {"mask_step3", mask_to_json(p.mask_step3)}};
  if (!p.step5.empty()) doc["mask_step5"] = mask_to_json(p.mask_step5);
  doc["step2"] = tests_to_json(p.step2_tests, p.step2_bh);
  if (p.variant == ModelVariant::GVM) {
    doc["step4_memory"] = tests_to_json(p.step4_memory_tests, p.step4_memory_bh);
    doc["step4_equality"] = tests_to_json(p.step4_equal_tests, p.step4_equal_bh);
  }
  doc["aggregate"] = io::params_to_json(p.aggregate, p.variant);
  if (p.has_pooled)
    doc["pooled"] = io::json{{"theta", io::params_to_json(p.pooled, p.variant)},
                             {"neg_loglik", p.pooled_neg_loglik},
                             {"status", to_string(p.pooled_status)}};
  io::json per_trial = io::json::array();
  for (std::size_t k = 0; k < p.step1.size(); ++k) {
    io::json trial{{"trial", k},
                   {"step1", fit_to_json(p.step1[k], p.variant)},
                   {"step3", fit_to_json(p.step3[k], p.variant)}};
    if (!p.step5.empty()) trial["step5"] = fit_to_json(p.step5[k], p.variant);
    per_trial.push_back(std::move(trial));
  }
  doc["per_trial"] = std::move(per_trial);
  return doc;
}

GroupErrors report_errors(const KernelParameters& fitted, const KernelParameters& truth) {
  if (fitted.dimension() != truth.dimension())
    throw ValidationError("report_errors: dimension mismatch");
  GroupErrors e;
  e.mu = group_error((fitted.mu - truth.mu).squaredNorm(), truth.mu.squaredNorm());
  e.alpha = group_error((fitted.alpha - truth.alpha).squaredNorm(), truth.alpha.squaredNorm());
  e.beta = group_error((fitted.beta - truth.beta).squaredNorm(), truth.beta.squaredNorm());
  e.alpha_tilde = group_error((fitted.alpha_tilde - truth.alpha_tilde).squaredNorm(),
                              truth.alpha_tilde.squaredNorm());
  return e;
}

ScenarioConfig scenario_config_from_json(const io::json& doc,
                                         const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ValidationError("scenario config must be a JSON object");
  auto require = [&](const char* key) -> const io::json& {
    if (!doc.contains(key))
      throw ValidationError(std::string("scenario config needs '") + key + "'");
    return doc.at(key);
  };

  ScenarioConfig cfg;
  cfg.name = require("name").get<std::string>();
  std::filesystem::path params = require("params_file").get<std::string>();
  if (params.is_relative()) params = base_dir / params;
  if (!std::filesystem::exists(params))
    throw ValidationError("params_file does not exist: " + params.string());
  cfg.params_file = params;
  cfg.variant = variant_from_string(require("variant").get<std::string>());
  const io::json& seed = require("seed");
  if (!(seed.is_number_unsigned() ||
        (seed.is_number_integer() && seed.get<long long>() >= 0)))
    throw ValidationError("scenario seed must be a non-negative integer");
  cfg.seed = seed.get<std::uint64_t>();
  cfg.n_realizations = doc.value("n_realizations", 25);
  cfg.events_per_realization = doc.value("events_per_realization", std::size_t{5000});
  cfg.gof_seed = cfg.seed;

  if (doc.contains("pipeline")) {
    const io::json& p = doc.at("pipeline");
    cfg.q = p.value("q", 0.05);
    if (p.contains("ci")) cfg.ci = ci_kind_from_string(p.at("ci").get<std::string>());
    cfg.multi_start = p.value("multi_start", 1);
  }
  if (doc.contains("gof")) {
    const io::json& g = doc.at("gof");
    if (g.contains("pn_rule"))
      cfg.pn_rule = pn_rule_from_string(g.at("pn_rule").get<std::string>());
    cfg.theta_frac = g.value("theta_frac", 0.9);
    if (g.contains("reduction"))
      cfg.reduction = ks_reduction_from_string(g.at("reduction").get<std::string>());
    cfg.gof_reps = g.value("reps", 25);
    cfg.gof_seed = g.value("seed", cfg.seed);
  }

  if (cfg.name.empty()) throw ValidationError("scenario name must be non-empty");
  if (cfg.n_realizations < 3) throw ValidationError("n_realizations must be >= 3");
  if (cfg.events_per_realization < 1)
    throw ValidationError("events_per_realization must be >= 1");
  if (!(cfg.q > 0.0 && cfg.q < 1.0)) throw ValidationError("q must be in (0, 1)");
  if (cfg.multi_start < 1) throw ValidationError("multi_start must be >= 1");
  if (!(cfg.theta_frac > 0.0 && cfg.theta_frac < 1.0))
    throw ValidationError("theta_frac must be in (0, 1)");
  if (cfg.gof_reps < 1) throw ValidationError("gof reps must be >= 1");
  return cfg;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  ScenarioResult res;
  res.config = cfg;

  res.truth = stage("load-parameters", [&] {
    const auto [base, doc_variant] = io::params_from_json(io::read_json_file(cfg.params_file));
    (void)doc_variant;  // the scenario's class decides the generating law
    KernelParameters truth = project_truth(base, cfg.variant);
    require_valid(truth, cfg.variant);
    if (!truth.common_decay())
      throw ValidationError("scenario parameters need beta_tilde == beta for the "
                            "closed-form compensator");
    return truth;
  });

  const std::vector<Realization> trials = stage("simulate", [&] {
    std::vector<Realization> out(static_cast<std::size_t>(cfg.n_realizations));
    parallel_for(out.size(), static_cast<unsigned>(cfg.threads), [&](std::size_t k) {
      SimulateOptions opt;
      opt.target_events = cfg.events_per_realization;
      opt.seed = cfg.seed;
      opt.stream = k;
      out[k] = simulate(res.truth, cfg.variant, opt);
    });
    return out;
  });

  const ModelVariant classes[3] = {ModelVariant::HP, ModelVariant::VM, ModelVariant::GVM};
  for (const ModelVariant fitted : classes) {
    const std::string tag = "pipeline-" + to_string(fitted);
    ScenarioModelResult m = stage(tag.c_str(), [&] {
      PipelineOptions popt;
      popt.variant = fitted;
      popt.q = cfg.q;
      popt.ci = cfg.ci;
      popt.fit_options.multi_start = cfg.multi_start;
      popt.fit_options.seed = cfg.seed;
      popt.threads = cfg.threads;

      ScenarioModelResult out;
      out.fitted = fitted;
      out.pipeline = run_pipeline(trials, popt);
      out.errors_step1 = score_step(out.pipeline.step1, res.truth);
      out.errors_step3 = score_step(out.pipeline.step3, res.truth);
      out.errors_step5 = score_step(out.pipeline.step5, res.truth);
      out.aggregate_errors = report_errors(out.pipeline.aggregate, res.truth);

      for (std::size_t k = 0; k < out.pipeline.step2_tests.size(); ++k) {
        const PairTest& t = out.pipeline.step2_tests[k];
        const bool active = res.truth.alpha(t.i, t.j) != 0.0 ||
                            res.truth.alpha_tilde(t.i, t.j) != 0.0;
        count_decision(out.support, active, out.pipeline.step2_bh.rejected[k]);
      }
      for (std::size_t k = 0; k < out.pipeline.step4_memory_tests.size(); ++k) {
        const PairTest& t = out.pipeline.step4_memory_tests[k];
        count_decision(out.memory, res.truth.alpha_tilde(t.i, t.j) != 0.0,
                       out.pipeline.step4_memory_bh.rejected[k]);
      }
      for (std::size_t k = 0; k < out.pipeline.step4_equal_tests.size(); ++k) {
        const PairTest& t = out.pipeline.step4_equal_tests[k];
        count_decision(out.equality,
                       res.truth.alpha(t.i, t.j) != res.truth.alpha_tilde(t.i, t.j),
                       out.pipeline.step4_equal_bh.rejected[k]);
      }
      return out;
    });
    res.models.push_back(std::move(m));
  }

  stage("goodness-of-fit", [&] {
    const int reps = cfg.gof_reps;
    const char* row_labels[2] = {"true", "estimate"};
    std::vector<GofTableRow> table;
    std::vector<KernelParameters> points;
    for (int row = 0; row < 2; ++row) {
      for (int c = 0; c < 3; ++c) {
        GofTableRow r;
        r.parameters = row_labels[row];
        r.fitted = classes[c];
        r.p_values.assign(static_cast<std::size_t>(reps), 0.0);
        table.push_back(std::move(r));
        points.push_back(row == 0 ? project_truth(res.truth, classes[c])
                                  : res.models[static_cast<std::size_t>(c)].pipeline.aggregate);
      }
    }
    const std::size_t total = table.size() * static_cast<std::size_t>(reps);
    parallel_for(total, static_cast<unsigned>(cfg.threads), [&](std::size_t idx) {
      const std::size_t row = idx / static_cast<std::size_t>(reps);
      const std::size_t rep = idx % static_cast<std::size_t>(reps);
      GofOptions gopt;
      gopt.pn_rule = cfg.pn_rule;
      gopt.theta_frac = cfg.theta_frac;
      gopt.reduction = cfg.reduction;
      gopt.seed = cfg.gof_seed;
      gopt.stream = idx;
      table[row].p_values[rep] = resampling_gof(trials, points[row], gopt).p_value;
    });
    for (GofTableRow& r : table) {
      double sum = 0.0;
      for (const double p : r.p_values) sum += p;
      r.average = sum / static_cast<double>(r.p_values.size());
    }
    res.gof_table = std::move(table);
    return 0;
  });

  return res;
}

void write_scenario_outputs(const ScenarioResult& res, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const ScenarioConfig& cfg = res.config;

  io::json manifest{
      {"name", cfg.name},
      {"variant", to_string(cfg.variant)},
      {"params_file", cfg.params_file.string()},
      {"n_realizations", cfg.n_realizations},
      {"events_per_realization", cfg.events_per_realization},
      {"seed", cfg.seed},
      {"pipeline",
       {{"q", cfg.q}, {"ci", to_string(cfg.ci)}, {"multi_start", cfg.multi_start}}},
      {"gof",
       {{"pn_rule", to_string(cfg.pn_rule)},
        {"theta_frac", cfg.theta_frac},
        {"reduction", to_string(cfg.reduction)},
        {"reps", cfg.gof_reps},
        {"seed", cfg.gof_seed}}},
      {"truth", io::params_to_json(res.truth, cfg.variant)},
      {"outputs",
       {"result_hp.json", "result_vm.json", "result_gvm.json", "gof.json"}}};
  io::write_json_file(out_dir / "manifest.json", manifest);

  for (const ScenarioModelResult& m : res.models) {
    io::json doc{{"fitted_model", to_string(m.fitted)},
                 {"pipeline", pipeline_to_json(m.pipeline)},
                 {"aggregate_errors", group_errors_to_json(m.aggregate_errors)}};
    io::json confusion{{"support", confusion_to_json(m.support)}};
    if (m.fitted == ModelVariant::GVM) {
      confusion["memory"] = confusion_to_json(m.memory);
      confusion["equality"] = confusion_to_json(m.equality);
    }
    doc["confusion"] = std::move(confusion);

    io::json per_trial_errors = io::json::array();
    for (std::size_t k = 0; k < m.errors_step1.size(); ++k) {
      io::json trial{{"trial", k},
                     {"step1", group_errors_to_json(m.errors_step1[k])},
                     {"step3", group_errors_to_json(m.errors_step3[k])}};
      if (!m.errors_step5.empty()) trial["step5"] = group_errors_to_json(m.errors_step5[k]);
      per_trial_errors.push_back(std::move(trial));
    }
    doc["per_trial_errors"] = std::move(per_trial_errors);

    io::write_json_file(out_dir / ("result_" + to_string(m.fitted) + ".json"), doc);
  }

  io::json rows = io::json::array();
  for (const GofTableRow& r : res.gof_table) {
    rows.push_back(io::json{{"parameters", r.parameters},
                            {"model", to_string(r.fitted)},
                            {"average", r.average},
                            {"p_values", r.p_values}});
  }
  io::write_json_file(out_dir / "gof.json",
                      io::json{{"repetitions", cfg.gof_reps}, {"rows", std::move(rows)}});
}

}  // namespace hawkes
