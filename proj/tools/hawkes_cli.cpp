// Command-line front end: simulation, likelihood evaluation, fitting,
// structure tests, goodness-of-fit, spike preprocessing, and scenario
// drivers.  All output is JSON or CSV; exit codes: 0 success, 2 validation
// failure, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "hawkes/estimator.hpp"
#include "hawkes/existence.hpp"
#include "hawkes/gof.hpp"
#include "hawkes/io.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/preprocess.hpp"
#include "hawkes/scenario.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/stats.hpp"
#include "hawkes/types.hpp"

namespace fs = std::filesystem;
using hawkes::io::json;

namespace {

void print_json(const json& doc) { std::cout << doc.dump(2) << "\n"; }

void emit(const json& doc, const std::string& out_file) {
  if (out_file.empty())
    print_json(doc);
  else
    hawkes::io::write_json_file(out_file, doc);
}

std::string padded(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", k);
  return buf;
}

/// Loads a parameter file; an explicit variant name overrides the file's.
std::pair<hawkes::KernelParameters, hawkes::ModelVariant> load_params(
    const std::string& file, const std::string& variant_flag) {
  auto [p, v] = hawkes::io::params_from_json(hawkes::io::read_json_file(file));
  if (!variant_flag.empty()) {
    v = hawkes::variant_from_string(variant_flag);
    hawkes::require_valid(p, v);
  }
  return {std::move(p), v};
}

/// Accepts a plain parameter document, a fit result ({"pipeline":
/// {"aggregate": ...}}), or a scenario result ({"aggregate": ...}).
hawkes::KernelParameters load_params_or_result(const std::string& file) {
  const json doc = hawkes::io::read_json_file(file);
  if (doc.is_object() && doc.contains("mu")) return hawkes::io::params_from_json(doc).first;
  if (doc.is_object() && doc.contains("pipeline") && doc.at("pipeline").contains("aggregate"))
    return hawkes::io::params_from_json(doc.at("pipeline").at("aggregate")).first;
  if (doc.is_object() && doc.contains("aggregate"))
    return hawkes::io::params_from_json(doc.at("aggregate")).first;
  throw hawkes::ValidationError(file + ": neither a parameter document nor a result with "
                                       "an 'aggregate' entry");
}

std::vector<hawkes::Realization> load_trials(const std::string& dir,
                                             Eigen::Index dimension) {
  std::vector<hawkes::Realization> trials =
      hawkes::io::read_realization_dir(dir, dimension);
  if (trials.empty()) throw hawkes::ValidationError(dir + ": no .csv realizations found");
  for (const hawkes::Realization& r : trials)
    if (r.dimension != trials.front().dimension)
      throw hawkes::ValidationError(dir + ": trials disagree on the dimension; pass an "
                                          "explicit --dimension");
  return trials;
}

json provenance_to_json(const hawkes::SpikeDataset& ds) {
  json steps = json::array();
  for (const hawkes::ProvenanceEntry& e : ds.provenance) {
    steps.push_back(json{{"step", e.step},
                         {"detail", e.detail},
                         {"trials_before", e.trials_before},
                         {"trials_after", e.trials_after},
                         {"neurons_before", e.neurons_before},
                         {"neurons_after", e.neurons_after},
                         {"events_before", e.events_before},
                         {"events_after", e.events_after},
                         {"warnings", e.warnings}});
  }
  return json{{"dimension", ds.dimension()},
              {"neuron_ids", ds.neuron_ids},
              {"n_trials", ds.trials.size()},
              {"total_events", ds.total_events()},
              {"steps", std::move(steps)}};
}

void write_counts_csv(const fs::path& file, const hawkes::SpikeDataset& ds,
                      const hawkes::Realization& r, int grid) {
  const Eigen::MatrixXd counts = hawkes::normalized_counts(r, grid);
  std::string text = "t";
  for (const long id : ds.neuron_ids) text += ",n" + std::to_string(id);
  text += "\n";
  for (Eigen::Index row = 0; row < counts.rows(); ++row) {
    for (Eigen::Index col = 0; col < counts.cols(); ++col) {
      if (col > 0) text += ",";
      text += hawkes::io::format_double(counts(row, col));
    }
    text += "\n";
  }
  hawkes::io::write_text_file(file, text);
}

// ---------------------------------------------------------------------------
// Subcommand registration.  Each holds its options by value and installs a
// callback; option structs live until parsing ends.

struct CheckCmd {
  std::string params, variant;
  void run() const {
    const auto [p, v] = load_params(params, variant);
    const hawkes::ExistenceReport rep = hawkes::check_existence(p, v);
    print_json(json{
        {"variant", hawkes::to_string(v)},
        {"satisfied", rep.satisfied},
        {"theorem",
         rep.theorem == hawkes::ExistenceTheorem::Spectral ? "spectral" : "vm_bounded"},
        {"spectral_radius", rep.spectral_radius},
        {"condition_matrix", hawkes::io::matrix_to_json(rep.condition_matrix)}});
  }
};

struct SimulateCmd {
  std::string params, variant, out;
  double horizon = 0.0;
  std::size_t events = 0;
  std::uint64_t seed = 0, stream = 0;
  bool force = false;
  void run() const {
    if ((horizon > 0.0) == (events > 0))
      throw hawkes::ValidationError("pass exactly one of --horizon or --events");
    const auto [p, v] = load_params(params, variant);
    hawkes::SimulateOptions opt;
    opt.horizon = horizon;
    opt.target_events = events;
    opt.seed = seed;
    opt.stream = stream;
    opt.force = force;
    const hawkes::Realization r = hawkes::simulate(p, v, opt);
    hawkes::io::write_realization_csv(out, r);
    print_json(json{{"events", r.size()}, {"horizon", r.horizon}, {"out", out}});
  }
};

struct LoglikCmd {
  std::string params, data;
  double horizon = 0.0;
  void run() const {
    const auto [p, v] = load_params(params, "");
    (void)v;
    const hawkes::Realization r =
        hawkes::io::read_realization_csv(data, p.dimension(), horizon);
    const hawkes::LogLikelihood ll = hawkes::log_likelihood(r, p);
    json doc{{"events", r.size()}, {"horizon", r.horizon}, {"finite", ll.finite}};
    if (ll.finite) {
      doc["total"] = ll.total;
      doc["per_dimension"] = hawkes::io::vector_to_json(ll.per_dimension);
    } else {
      doc["total"] = nullptr;  // -inf is not representable in JSON
      doc["offending_event"] = ll.offending_event;
    }
    print_json(doc);
  }
};

struct FitCmd {
  std::string data, variant = "gvm", ci = "asymptotic", out;
  double q = 0.05;
  int multi_start = 1, threads = 1, dimension = 0;
  std::uint64_t seed = 0;
  bool pooled = false;
  void run() const {
    const std::vector<hawkes::Realization> trials = load_trials(data, dimension);
    hawkes::PipelineOptions opt;
    opt.variant = hawkes::variant_from_string(variant);
    opt.q = q;
    opt.ci = hawkes::ci_kind_from_string(ci);
    opt.fit_options.multi_start = multi_start;
    opt.fit_options.seed = seed;
    opt.threads = threads;
    opt.compute_pooled_aggregate = pooled;
    const hawkes::PipelineResult res = hawkes::run_pipeline(trials, opt);
    emit(json{{"options", json{{"data", data},
                               {"variant", hawkes::to_string(opt.variant)},
                               {"q", q},
                               {"ci", hawkes::to_string(opt.ci)},
                               {"multi_start", multi_start},
                               {"seed", seed},
                               {"n_trials", trials.size()}}},
              {"pipeline", hawkes::pipeline_to_json(res)}},
         out);
  }
};

struct TestCmd {
  std::string fits, ci = "asymptotic", out;
  double q = 0.05;
  void run() const {
    json doc = hawkes::io::read_json_file(fits);
    if (doc.is_object() && doc.contains("fits")) doc = doc.at("fits");
    if (doc.is_object() && doc.contains("pipeline")) {
      // A fit result: test the per-trial step-1 (unconstrained) estimates.
      json arr = json::array();
      for (const json& trial : doc.at("pipeline").at("per_trial"))
        arr.push_back(trial.at("step1").at("theta"));
      doc = std::move(arr);
    }
    if (!doc.is_array() || doc.empty())
      throw hawkes::ValidationError(fits + ": expected a non-empty array of parameter "
                                           "documents, an object with a 'fits' array, or "
                                           "a fit result");
    std::vector<hawkes::KernelParameters> thetas;
    for (const json& item : doc)
      thetas.push_back(hawkes::io::params_from_json(item).first);
    const Eigen::Index d = thetas.front().dimension();
    for (const hawkes::KernelParameters& t : thetas)
      if (t.dimension() != d)
        throw hawkes::ValidationError(fits + ": fits disagree on the dimension");

    const hawkes::CiKind kind = hawkes::ci_kind_from_string(ci);
    const std::size_t n = thetas.size();
    std::vector<hawkes::PairTest> support, memory, equality;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        std::vector<double> a(n), at(n);
        for (std::size_t k = 0; k < n; ++k) {
          a[k] = thetas[k].alpha(i, j);
          at[k] = thetas[k].alpha_tilde(i, j);
        }
        auto label = [&](hawkes::PairTest t) {
          t.i = static_cast<int>(i);
          t.j = static_cast<int>(j);
          return t;
        };
        support.push_back(label(hawkes::test1_joint_zero(a, at, kind)));
        memory.push_back(label(hawkes::test2_tilde_zero(at, kind)));
        equality.push_back(label(hawkes::test3_equal_memory(a, at, kind)));
      }
    }
    auto family = [&](const std::vector<hawkes::PairTest>& tests) {
      std::vector<double> p(tests.size());
      for (std::size_t k = 0; k < tests.size(); ++k) p[k] = tests[k].p_value;
      return hawkes::tests_to_json(tests, hawkes::benjamini_hochberg(p, q));
    };
    emit(json{{"n_trials", n},
              {"q", q},
              {"ci", hawkes::to_string(kind)},
              {"support", family(support)},
              {"memory", family(memory)},
              {"equality", family(equality)}},
         out);
  }
};

struct GofCmd {
  std::string data, params, pn = "sqrt", reduction = "increments", out;
  double theta_frac = 0.9;
  int reps = 25, threads = 1, dimension = 0;
  std::uint64_t seed = 0;
  void run() const {
    const std::vector<hawkes::Realization> trials = load_trials(data, dimension);
    const hawkes::KernelParameters theta = load_params_or_result(params);
    hawkes::GofOptions opt;
    opt.pn_rule = hawkes::pn_rule_from_string(pn);
    opt.theta_frac = theta_frac;
    opt.reduction = hawkes::ks_reduction_from_string(reduction);
    opt.seed = seed;
    if (reps < 1) throw hawkes::ValidationError("--reps must be >= 1");

    std::vector<hawkes::GofResult> results(static_cast<std::size_t>(reps));
    hawkes::parallel_for(results.size(), static_cast<unsigned>(threads),
                         [&](std::size_t k) {
                           hawkes::GofOptions rep_opt = opt;
                           rep_opt.stream = k;
                           results[k] = hawkes::resampling_gof(trials, theta, rep_opt);
                         });
    json rows = json::array();
    double sum = 0.0;
    for (std::size_t k = 0; k < results.size(); ++k) {
      const hawkes::GofResult& g = results[k];
      rows.push_back(json{{"rep", k},
                          {"statistic", g.statistic},
                          {"p_value", g.p_value},
                          {"n_points", g.n_points},
                          {"p_n", g.p_n},
                          {"mean_mass", g.mean_mass}});
      sum += g.p_value;
    }
    emit(json{{"data", data},
              {"params", params},
              {"pn_rule", hawkes::to_string(opt.pn_rule)},
              {"theta_frac", theta_frac},
              {"reduction", hawkes::to_string(opt.reduction)},
              {"reps", reps},
              {"seed", seed},
              {"average_p", sum / static_cast<double>(reps)},
              {"repetitions", std::move(rows)}},
         out);
  }
};

struct PreprocessCmd {
  std::string manifest, out;
  std::vector<double> trim_window;    // [lo, hi]
  std::vector<std::size_t> resample;  // [trials per sample, samples]
  int max_inactive = -1, min_jumps = -1, grid = 200;
  std::uint64_t seed = 0;
  bool seed_set = false;
  void run() const {
    hawkes::SpikeDataset ds = hawkes::ingest_spikes(manifest);
    if (!trim_window.empty()) ds = hawkes::trim(ds, trim_window[0], trim_window[1]);
    if (max_inactive >= 0) ds = hawkes::filter_trials(ds, max_inactive);
    if (min_jumps >= 0) ds = hawkes::filter_neurons(ds, min_jumps);

    const fs::path dir = out;
    fs::create_directories(dir / "trials");
    fs::create_directories(dir / "counts");
    hawkes::io::write_json_file(dir / "provenance.json", provenance_to_json(ds));
    for (std::size_t k = 0; k < ds.trials.size(); ++k) {
      hawkes::io::write_realization_csv(dir / "trials" / ("trial_" + padded(k) + ".csv"),
                                        ds.trials[k]);
      write_counts_csv(dir / "counts" / ("counts_" + padded(k) + ".csv"), ds,
                       ds.trials[k], grid);
    }

    json summary{{"out", out},
                 {"n_trials", ds.trials.size()},
                 {"dimension", ds.dimension()},
                 {"total_events", ds.total_events()}};
    if (!resample.empty()) {
      if (!seed_set)
        throw hawkes::ValidationError("--resample needs an explicit --seed");
      const std::vector<hawkes::Realization> samples =
          hawkes::resample_concat(ds, resample[0], resample[1], seed);
      fs::create_directories(dir / "samples");
      for (std::size_t k = 0; k < samples.size(); ++k)
        hawkes::io::write_realization_csv(dir / "samples" / ("sample_" + padded(k) + ".csv"),
                                          samples[k]);
      summary["n_samples"] = samples.size();
    }
    print_json(summary);
  }
};

struct ScenarioCmd {
  std::string config, out;
  int threads = 1;
  void run() const {
    const fs::path config_path = config;
    hawkes::ScenarioConfig cfg = hawkes::scenario_config_from_json(
        hawkes::io::read_json_file(config_path), config_path.parent_path());
    cfg.threads = threads;
    const hawkes::ScenarioResult res = hawkes::run_scenario(cfg);
    hawkes::write_scenario_outputs(res, out);
    json table = json::array();
    for (const hawkes::GofTableRow& row : res.gof_table)
      table.push_back(json{{"parameters", row.parameters},
                           {"model", hawkes::to_string(row.fitted)},
                           {"average_p", row.average}});
    print_json(json{{"name", cfg.name}, {"out", out}, {"gof_table", std::move(table)}});
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and inference for multivariate Hawkes processes with "
               "variable-length memory"};
  app.require_subcommand(1);

  CheckCmd check;
  auto* c = app.add_subcommand("check", "Stationarity condition report");
  c->add_option("--params", check.params, "Parameter JSON file")->required();
  c->add_option("--variant", check.variant, "Override the file's model class (hp/vm/gvm)");
  c->callback([&] { check.run(); });

  SimulateCmd sim;
  auto* s = app.add_subcommand("simulate", "Draw one realization by thinning");
  s->add_option("--params", sim.params, "Parameter JSON file")->required();
  s->add_option("--variant", sim.variant, "Override the file's model class (hp/vm/gvm)");
  s->add_option("--horizon", sim.horizon, "Stop at this time");
  s->add_option("--events", sim.events, "Stop after this many events");
  s->add_option("--seed", sim.seed, "RNG seed")->required();
  s->add_option("--stream", sim.stream, "RNG substream")->capture_default_str();
  s->add_flag("--force", sim.force, "Simulate even if the stationarity check fails");
  s->add_option("--out", sim.out, "Output CSV (time,dim)")->required();
  s->callback([&] { sim.run(); });

  LoglikCmd ll;
  auto* l = app.add_subcommand("loglik", "Exact log-likelihood of a realization");
  l->add_option("--params", ll.params, "Parameter JSON file")->required();
  l->add_option("--data", ll.data, "Realization CSV")->required();
  l->add_option("--horizon", ll.horizon, "Observation horizon (default: last event)");
  l->callback([&] { ll.run(); });

  FitCmd fit;
  auto* f = app.add_subcommand("fit", "Five-step structural estimation pipeline");
  f->add_option("--data", fit.data, "Directory of realization CSVs")->required();
  f->add_option("--variant", fit.variant, "Base model class (hp/vm/gvm)")->capture_default_str();
  f->add_option("--q", fit.q, "False-discovery level")->capture_default_str();
  f->add_option("--ci", fit.ci, "Test flavour (asymptotic/empirical)")->capture_default_str();
  f->add_option("--multi-start", fit.multi_start, "Optimizer starts per fit")->capture_default_str();
  f->add_option("--seed", fit.seed, "Jitter seed for extra starts")->capture_default_str();
  f->add_option("--dimension", fit.dimension, "Process dimension (default: infer)");
  f->add_option("--threads", fit.threads, "Worker cap")->capture_default_str();
  f->add_flag("--pooled", fit.pooled, "Also compute the pooled aggregate");
  f->add_option("--out", fit.out, "Result JSON file (default: stdout)");
  f->callback([&] { fit.run(); });

  TestCmd test;
  auto* t = app.add_subcommand("test", "Interaction and memory tests on per-trial fits");
  t->add_option("--fits", test.fits, "JSON array of per-trial parameter documents")
      ->required();
  t->add_option("--q", test.q, "False-discovery level")->capture_default_str();
  t->add_option("--ci", test.ci, "Test flavour (asymptotic/empirical)")->capture_default_str();
  t->add_option("--out", test.out, "Result JSON file (default: stdout)");
  t->callback([&] { test.run(); });

  GofCmd gof;
  auto* g = app.add_subcommand("gof", "Resampling goodness-of-fit");
  g->add_option("--data", gof.data, "Directory of realization CSVs")->required();
  g->add_option("--params", gof.params, "Parameter file or fit result with an aggregate")
      ->required();
  g->add_option("--pn", gof.pn, "Subsample size rule (sqrt/two_thirds)")->capture_default_str();
  g->add_option("--theta-frac", gof.theta_frac, "Truncation fraction")->capture_default_str();
  g->add_option("--reduction", gof.reduction,
                "KS reduction (increments/uniform_order_stats)")->capture_default_str();
  g->add_option("--reps", gof.reps, "Resampling repetitions")->capture_default_str();
  g->add_option("--seed", gof.seed, "RNG seed")->required();
  g->add_option("--dimension", gof.dimension, "Process dimension (default: infer)");
  g->add_option("--threads", gof.threads, "Worker cap")->capture_default_str();
  g->add_option("--out", gof.out, "Result JSON file (default: stdout)");
  g->callback([&] { gof.run(); });

  PreprocessCmd pre;
  auto* p = app.add_subcommand("preprocess", "Spike-train cleaning and resampling");
  p->add_option("--manifest", pre.manifest, "Dataset manifest JSON")->required();
  p->add_option("--trim", pre.trim_window, "Keep the closed window [LO, HI]")
      ->expected(2);
  p->add_option("--max-inactive", pre.max_inactive,
                "Drop trials with at least this many silent neurons");
  p->add_option("--min-jumps", pre.min_jumps,
                "Keep neurons with at least this many events across trials");
  p->add_option("--resample", pre.resample, "Concatenate K trials, N samples")
      ->expected(2);
  auto* seed_opt = p->add_option("--seed", pre.seed, "Resampling seed");
  p->add_option("--grid", pre.grid, "Grid points for normalized counts")->capture_default_str();
  p->add_option("--out", pre.out, "Output directory")->required();
  p->callback([&] {
    pre.seed_set = seed_opt->count() > 0;
    pre.run();
  });

  ScenarioCmd scen;
  auto* sc = app.add_subcommand("scenario", "Simulate, fit, test, and table a scenario");
  sc->add_option("config", scen.config, "Scenario config JSON")->required();
  sc->add_option("--out", scen.out, "Output directory")->required();
  sc->add_option("--threads", scen.threads, "Worker cap")->capture_default_str();
  sc->callback([&] { scen.run(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const hawkes::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const hawkes::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
