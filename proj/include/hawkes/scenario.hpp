#pragma once

// Experiment driver: simulate a named scenario, run the estimation pipeline
// under each of the three model classes, table the goodness-of-fit p-values
// at the true and at the averaged estimated parameters, and emit the whole
// report bundle as JSON.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hawkes/estimator.hpp"
#include "hawkes/gof.hpp"
#include "hawkes/io.hpp"
#include "hawkes/types.hpp"

namespace hawkes {

/// One parameter group's squared estimation error: relative to the group's
/// truth norm when that is nonzero, absolute (and flagged) otherwise.
struct GroupError {
  double value{0.0};
  bool absolute{false};
};

/// Squared errors per parameter group.
struct GroupErrors {
  GroupError mu, alpha, beta, alpha_tilde;
};

/// ||ghat - g||^2 / ||g||^2 for each group (mu, alpha, beta, alpha_tilde),
/// falling back to the absolute squared error on zero-norm groups.
[[nodiscard]] GroupErrors report_errors(const KernelParameters& fitted,
                                        const KernelParameters& truth);

/// Decision counts against the ground truth; "positive" = null rejected.
struct Confusion {
  int true_positive{0};
  int false_positive{0};
  int true_negative{0};
  int false_negative{0};
};

// JSON serialization shared by the report writers and the command-line
// tool.  Pair labels are written 1-based, matching the realization CSVs.
[[nodiscard]] io::json mask_to_json(const MaskMatrix& mask);
[[nodiscard]] io::json tests_to_json(const std::vector<PairTest>& tests, const BhResult& bh);
[[nodiscard]] io::json group_errors_to_json(const GroupErrors& e);
[[nodiscard]] io::json confusion_to_json(const Confusion& c);

/// Full pipeline report: masks, test families with their corrections,
/// per-trial fits of every executed step, and the aggregate.
[[nodiscard]] io::json pipeline_to_json(const PipelineResult& p);

struct ScenarioConfig {
  std::string name;
  std::filesystem::path params_file;
  ModelVariant variant{ModelVariant::GVM};  ///< data-generating class
  int n_realizations{25};
  std::size_t events_per_realization{5000};
  std::uint64_t seed{0};

  // Pipeline options.
  double q{0.05};
  CiKind ci{CiKind::Asymptotic};
  int multi_start{1};

  // Goodness-of-fit options.
  PnRule pn_rule{PnRule::Sqrt};
  double theta_frac{0.9};
  KsReduction reduction{KsReduction::Increments};
  int gof_reps{25};
  std::uint64_t gof_seed{0};

  /// Worker cap; an execution detail, never serialized, never result-bearing.
  int threads{1};
};

/// Parses a scenario document.  A relative params_file resolves against
/// `base_dir` and must exist.  `seed` is required (no wall-clock defaults);
/// the GoF seed defaults to `seed`.
[[nodiscard]] ScenarioConfig scenario_config_from_json(const io::json& doc,
                                                       const std::filesystem::path& base_dir);

/// Pipeline run under one fitted model class, scored against the truth.
struct ScenarioModelResult {
  ModelVariant fitted{ModelVariant::GVM};
  PipelineResult pipeline;
  std::vector<GroupErrors> errors_step1;  ///< one entry per trial
  std::vector<GroupErrors> errors_step3;
  std::vector<GroupErrors> errors_step5;  ///< empty when Step 5 did not run
  GroupErrors aggregate_errors;
  Confusion support;   ///< Step-2 decisions vs true support
  Confusion memory;    ///< Step-4 "memory matters" decisions (GVM only)
  Confusion equality;  ///< Step-4 "memories differ" decisions (GVM only)
};

/// One row of the average p-value table.
struct GofTableRow {
  std::string parameters;  ///< "true" or "estimate"
  ModelVariant fitted{ModelVariant::GVM};
  std::vector<double> p_values;  ///< one per resampling repetition
  double average{0.0};
};

struct ScenarioResult {
  ScenarioConfig config;
  KernelParameters truth;                   ///< generating parameters
  std::vector<ScenarioModelResult> models;  ///< fitted classes HP, VM, GVM
  std::vector<GofTableRow> gof_table;       ///< 2 parameter rows x 3 classes
};

/// Simulate -> pipeline under each of {HP, VM, GVM} -> GoF table.  The
/// "true" table rows evaluate the generating parameters projected into the
/// fitted class; the "estimate" rows evaluate that class's final average
/// estimate.  Failures carry a [stage] tag.  Bit-identical results for any
/// thread count.
[[nodiscard]] ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Writes manifest.json, result_hp.json, result_vm.json, result_gvm.json
/// and gof.json into out_dir (created if needed), deterministically.
void write_scenario_outputs(const ScenarioResult& res, const std::filesystem::path& out_dir);

}  // namespace hawkes
