#include "hawkes/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "hawkes/io.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

namespace {

// Smallest separation inserted between simultaneous spikes: far below any
// physiological inter-spike interval, far above double rounding at
// laboratory time scales.
constexpr double kTieStep = 9.094947017729282e-13;  // 2^-40

std::size_t count_events(const std::vector<Realization>& trials) {
  std::size_t n = 0;
  for (const Realization& r : trials) n += r.size();
  return n;
}

ProvenanceEntry begin_entry(const SpikeDataset& ds, std::string step, std::string detail) {
  ProvenanceEntry e;
  e.step = std::move(step);
  e.detail = std::move(detail);
  e.trials_before = ds.trials.size();
  e.neurons_before = ds.dimension();
  e.events_before = ds.total_events();
  return e;
}

void finish_entry(SpikeDataset& ds, ProvenanceEntry e) {
  e.trials_after = ds.trials.size();
  e.neurons_after = ds.dimension();
  e.events_after = ds.total_events();
  ds.provenance.push_back(std::move(e));
}

std::string format_window(double lo, double hi) {
  std::ostringstream os;
  os << "window=[" << io::format_double(lo) << "," << io::format_double(hi) << "]";
  return os.str();
}

}  // namespace

std::size_t SpikeDataset::total_events() const { return count_events(trials); }

SpikeDataset make_dataset(std::vector<Realization> trials, std::vector<long> neuron_ids) {
  Eigen::Index d = 0;
  for (std::size_t k = 0; k < trials.size(); ++k) {
    require_valid(trials[k]);
    if (k == 0) d = trials[k].dimension;
    if (trials[k].dimension != d)
      throw ValidationError("all trials must share one dimension");
  }
  if (neuron_ids.empty()) {
    neuron_ids.resize(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) neuron_ids[static_cast<std::size_t>(i)] = i;
  }
  if (static_cast<Eigen::Index>(neuron_ids.size()) != d)
    throw ValidationError("neuron_ids length must equal the trial dimension");

  SpikeDataset ds;
  ds.trials = std::move(trials);
  ds.neuron_ids = std::move(neuron_ids);
  return ds;
}

SpikeDataset ingest_spikes(const std::filesystem::path& manifest_path) {
  const io::json manifest = io::read_json_file(manifest_path);
  if (!manifest.contains("horizon") || !manifest["horizon"].is_number())
    throw ValidationError("manifest needs a numeric 'horizon'");
  const double horizon = manifest["horizon"].get<double>();
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ValidationError("manifest horizon must be positive and finite");
  if (!manifest.contains("trials") || !manifest["trials"].is_array() ||
      manifest["trials"].empty())
    throw ValidationError("manifest needs a non-empty 'trials' array");

  const std::filesystem::path base = manifest_path.parent_path();

  // First pass: read raw (time, neuron) rows per trial and collect labels.
  std::vector<std::vector<std::pair<double, long>>> raw;
  std::vector<std::string> names;
  std::vector<long> labels;
  for (const io::json& entry : manifest["trials"]) {
    if (!entry.is_string()) throw ValidationError("manifest trial entries must be file names");
    const std::filesystem::path file = base / entry.get<std::string>();
    names.push_back(file.filename().string());
    std::istringstream in(io::read_text_file(file));
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(names.back() + ": empty spike file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "time,neuron_id")
      throw ValidationError(names.back() + ": expected header 'time,neuron_id'");
    std::vector<std::pair<double, long>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const std::size_t comma = line.find(',');
      if (comma == std::string::npos)
        throw ValidationError(names.back() + ": line " + std::to_string(line_no) +
                              " is not 'time,neuron_id'");
      const std::string where = names.back() + " line " + std::to_string(line_no);
      const double t = io::parse_double(line.substr(0, comma), where + " time");
      const long id = io::parse_long(line.substr(comma + 1), where + " neuron_id");
      if (!std::isfinite(t) || t < 0.0 || t > horizon)
        throw ValidationError(where + ": time outside [0, horizon]");
      rows.emplace_back(t, id);
      labels.push_back(id);
    }
    raw.push_back(std::move(rows));
  }

  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.empty()) throw ValidationError("no spikes in any trial");
  std::map<long, int> dense;
  for (std::size_t k = 0; k < labels.size(); ++k) dense[labels[k]] = static_cast<int>(k);

  SpikeDataset ds;
  ds.neuron_ids = labels;
  ProvenanceEntry e;
  e.step = "ingest";
  e.detail = "manifest=" + manifest_path.filename().string();

  for (std::size_t k = 0; k < raw.size(); ++k) {
    std::vector<std::pair<double, long>>& rows = raw[k];
    std::sort(rows.begin(), rows.end());
    const std::size_t before_dedup = rows.size();
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    if (const std::size_t dropped = before_dedup - rows.size(); dropped > 0)
      e.warnings.push_back(names[k] + ": dropped " + std::to_string(dropped) +
                           " duplicate spike(s)");

    Realization r;
    r.horizon = horizon;
    r.dimension = static_cast<Eigen::Index>(labels.size());
    r.times.reserve(rows.size());
    r.dims.reserve(rows.size());
    std::size_t jittered = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double t = rows[i].first;
      if (t == 0.0) {
        t = kTieStep;
        ++jittered;
      }
      if (!r.times.empty() && t <= r.times.back()) {
        t = r.times.back() + kTieStep;
        ++jittered;
      }
      if (t > horizon)
        throw ValidationError(names[k] + ": tie separation pushed an event past the horizon");
      r.times.push_back(t);
      r.dims.push_back(dense.at(rows[i].second));
    }
    if (jittered > 0)
      e.warnings.push_back(names[k] + ": separated " + std::to_string(jittered) +
                           " simultaneous spike(s)");
    require_valid(r);
    ds.trials.push_back(std::move(r));
  }

  e.trials_after = ds.trials.size();
  e.neurons_after = ds.dimension();
  e.events_after = ds.total_events();
  ds.provenance.push_back(std::move(e));
  return ds;
}

SpikeDataset trim(const SpikeDataset& ds, double window_lo, double window_hi) {
  if (!std::isfinite(window_lo) || !std::isfinite(window_hi) || !(window_lo < window_hi))
    throw ValidationError("trim window must satisfy lo < hi");

  SpikeDataset out = ds;
  ProvenanceEntry e = begin_entry(ds, "trim", format_window(window_lo, window_hi));
  for (std::size_t k = 0; k < out.trials.size(); ++k) {
    const Realization& src = ds.trials[k];
    Realization r;
    r.horizon = window_hi - window_lo;
    r.dimension = src.dimension;
    std::size_t nudged = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src.times[i] < window_lo || src.times[i] > window_hi) continue;
      double t = src.times[i] - window_lo;
      if (t == 0.0) {
        t = kTieStep;
        ++nudged;
      }
      r.times.push_back(t);
      r.dims.push_back(src.dims[i]);
    }
    if (nudged > 0)
      e.warnings.push_back("trial " + std::to_string(k) + ": moved " + std::to_string(nudged) +
                           " event(s) off the window edge");
    require_valid(r);
    out.trials[k] = std::move(r);
  }
  finish_entry(out, std::move(e));
  return out;
}

SpikeDataset filter_trials(const SpikeDataset& ds, int max_inactive) {
  if (max_inactive < 0) throw ValidationError("max_inactive must be >= 0");

  SpikeDataset out;
  out.neuron_ids = ds.neuron_ids;
  out.provenance = ds.provenance;
  ProvenanceEntry e =
      begin_entry(ds, "filter_trials", "max_inactive=" + std::to_string(max_inactive));
  for (std::size_t k = 0; k < ds.trials.size(); ++k) {
    const Eigen::VectorXi counts = per_dimension_counts(ds.trials[k]);
    const int inactive = static_cast<int>((counts.array() == 0).count());
    if (inactive >= max_inactive) {
      e.warnings.push_back("trial " + std::to_string(k) + ": dropped (" +
                           std::to_string(inactive) + " inactive neurons)");
      continue;
    }
    out.trials.push_back(ds.trials[k]);
  }
  finish_entry(out, std::move(e));
  return out;
}

SpikeDataset filter_neurons(const SpikeDataset& ds, long min_total_jumps) {
  if (min_total_jumps < 0) throw ValidationError("min_total_jumps must be >= 0");

  const Eigen::Index d = ds.dimension();
  std::vector<long> totals(static_cast<std::size_t>(d), 0);
  for (const Realization& r : ds.trials) {
    const Eigen::VectorXi counts = per_dimension_counts(r);
    for (Eigen::Index i = 0; i < d; ++i) totals[static_cast<std::size_t>(i)] += counts[i];
  }

  std::vector<int> remap(static_cast<std::size_t>(d), -1);
  std::vector<long> kept_ids;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (totals[static_cast<std::size_t>(i)] >= min_total_jumps) {
      remap[static_cast<std::size_t>(i)] = static_cast<int>(kept_ids.size());
      kept_ids.push_back(ds.neuron_ids[static_cast<std::size_t>(i)]);
    }
  }
  if (kept_ids.empty())
    throw ValidationError("empty result: no neuron reaches the activity threshold");

  SpikeDataset out;
  out.neuron_ids = kept_ids;
  out.provenance = ds.provenance;
  ProvenanceEntry e =
      begin_entry(ds, "filter_neurons", "min_total_jumps=" + std::to_string(min_total_jumps));
  for (const Realization& src : ds.trials) {
    Realization r;
    r.horizon = src.horizon;
    r.dimension = static_cast<Eigen::Index>(kept_ids.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      const int nd = remap[static_cast<std::size_t>(src.dims[i])];
      if (nd < 0) continue;
      r.times.push_back(src.times[i]);
      r.dims.push_back(nd);
    }
    require_valid(r);
    out.trials.push_back(std::move(r));
  }
  finish_entry(out, std::move(e));
  return out;
}

std::vector<Realization> resample_concat(const SpikeDataset& ds, int k_per_sample,
                                         int n_samples, std::uint64_t seed) {
  const std::size_t n_trials = ds.trials.size();
  if (k_per_sample < 1 || static_cast<std::size_t>(k_per_sample) > n_trials)
    throw ValidationError("k_per_sample must be in [1, number of trials]");
  if (n_samples < 1) throw ValidationError("n_samples must be >= 1");

  std::vector<Realization> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (int s = 0; s < n_samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    std::vector<std::size_t> pick =
        rng.sample_without_replacement(n_trials, static_cast<std::size_t>(k_per_sample));
    std::sort(pick.begin(), pick.end());  // dataset order is preserved

    Realization r;
    r.dimension = ds.dimension();
    double offset = 0.0;
    for (const std::size_t idx : pick) {
      const Realization& src = ds.trials[idx];
      for (std::size_t i = 0; i < src.size(); ++i) {
        const double t = src.times[i] + offset;
        if (!r.times.empty() && t <= r.times.back())
          throw ValidationError("exact boundary tie while concatenating trials");
        r.times.push_back(t);
        r.dims.push_back(src.dims[i]);
      }
      offset += src.horizon;
    }
    r.horizon = offset;
    require_valid(r);
    out.push_back(std::move(r));
  }
  return out;
}

Eigen::MatrixXd normalized_counts(const Realization& r, int n_grid) {
  if (n_grid < 1) throw ValidationError("n_grid must be >= 1");
  require_valid(r);

  Eigen::MatrixXd out(n_grid, r.dimension + 1);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(r.dimension);
  std::size_t next = 0;
  for (int j = 1; j <= n_grid; ++j) {
    const double t = r.horizon * static_cast<double>(j) / static_cast<double>(n_grid);
    while (next < r.size() && r.times[next] <= t) {
      counts[r.dims[next]] += 1.0;
      ++next;
    }
    out(j - 1, 0) = t;
    out.row(j - 1).tail(r.dimension) = (counts / t).transpose();
  }
  return out;
}

}  // namespace hawkes
