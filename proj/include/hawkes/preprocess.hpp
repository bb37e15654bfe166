#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hawkes/types.hpp"

namespace hawkes {

/// One applied preprocessing operation with its before/after bookkeeping.
struct ProvenanceEntry {
  std::string step;    ///< operation name, e.g. "trim"
  std::string detail;  ///< parameter summary, e.g. "window=[11,21]"
  std::size_t trials_before{0};
  std::size_t trials_after{0};
  Eigen::Index neurons_before{0};
  Eigen::Index neurons_after{0};
  std::size_t events_before{0};
  std::size_t events_after{0};
  std::vector<std::string> warnings;
};

/// Parallel spike-train trials over a common neuron labelling, plus the log
/// of every preprocessing step applied so far.  Dimension k of every trial
/// is the neuron originally labelled neuron_ids[k].
struct SpikeDataset {
  std::vector<Realization> trials;
  std::vector<long> neuron_ids;
  std::vector<ProvenanceEntry> provenance;

  [[nodiscard]] Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(neuron_ids.size());
  }
  [[nodiscard]] std::size_t total_events() const;
};

/// Builds a dataset from already-loaded trials.  All trials must share one
/// dimension and pass realization validation; an empty `neuron_ids` means
/// labels 0..d-1.
[[nodiscard]] SpikeDataset make_dataset(std::vector<Realization> trials,
                                        std::vector<long> neuron_ids = {});

/// Reads a manifest JSON `{ "horizon": H, "trials": ["a.csv", ...] }` with
/// trial paths resolved relative to the manifest's directory.  Each trial
/// CSV has the header `time,neuron_id`; rows may be unsorted.  Exact
/// duplicates of one neuron are dropped, and simultaneous spikes of
/// different neurons are separated by +k*2^-40 time units; both produce a
/// logged warning.  A spike at exactly time 0 is moved to 2^-40 the same
/// way.  The neuron labelling is the sorted union over all trials, so every
/// trial spans the same dimension.
[[nodiscard]] SpikeDataset ingest_spikes(const std::filesystem::path& manifest_path);

/// Keeps events with window_lo <= t <= window_hi, shifts times by
/// -window_lo and sets every horizon to the window length.
[[nodiscard]] SpikeDataset trim(const SpikeDataset& ds, double window_lo, double window_hi);

/// Drops trials whose number of zero-event neurons reaches `max_inactive`
/// ("fewer than max_inactive non-active neurons are retained").
[[nodiscard]] SpikeDataset filter_trials(const SpikeDataset& ds, int max_inactive);

/// Keeps neurons with at least `min_total_jumps` events summed over all
/// trials, re-indexing dimensions densely; `neuron_ids` keeps the map back
/// to the original labels.  Throws when no neuron qualifies.
[[nodiscard]] SpikeDataset filter_neurons(const SpikeDataset& ds, long min_total_jumps);

/// Draws `n_samples` concatenations of `k_per_sample` distinct trials each,
/// chosen without replacement, kept in dataset order, and laid end to end
/// with times shifted by the accumulated horizons.  Sample s draws from
/// stream s of `seed`, so the result is reproducible and independent of
/// evaluation order.
[[nodiscard]] std::vector<Realization> resample_concat(const SpikeDataset& ds, int k_per_sample,
                                                       int n_samples, std::uint64_t seed);

/// Normalised cumulative counts N^i(t)/t on n_grid equally spaced times
/// j*horizon/n_grid, j = 1..n_grid: one row per grid time, first column t,
/// then one column per dimension.
[[nodiscard]] Eigen::MatrixXd normalized_counts(const Realization& r, int n_grid);

}  // namespace hawkes
