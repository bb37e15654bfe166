#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "hawkes/io.hpp"
#include "hawkes/preprocess.hpp"
#include "hawkes/types.hpp"

using namespace hawkes;
namespace fs = std::filesystem;

namespace {

Realization make_trial(double horizon, Eigen::Index d, std::vector<double> times,
                       std::vector<int> dims) {
  Realization r;
  r.horizon = horizon;
  r.dimension = d;
  r.times = std::move(times);
  r.dims = std::move(dims);
  require_valid(r);
  return r;
}

/// Unique scratch directory for files this test writes.
fs::path scratch_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("hawkes_preprocess_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("trimming keeps the closed window, shifts, and resets the horizon") {
  SpikeDataset ds = make_dataset(
      {make_trial(40.0, 1, {10.5, 11.2, 20.9, 21.3}, {0, 0, 0, 0})});
  const SpikeDataset out = trim(ds, 11.0, 21.0);

  REQUIRE(out.trials.size() == 1);
  REQUIRE(out.trials[0].size() == 2);
  CHECK(out.trials[0].times[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(out.trials[0].times[1] == doctest::Approx(9.9).epsilon(1e-12));
  CHECK(out.trials[0].horizon == 10.0);

  // Provenance records the step with before/after counts.
  REQUIRE(out.provenance.size() == 1);
  CHECK(out.provenance.back().step == "trim");
  CHECK(out.provenance.back().events_before == 4);
  CHECK(out.provenance.back().events_after == 2);
  CHECK(out.provenance.back().trials_before == 1);
  CHECK(out.provenance.back().trials_after == 1);
}

TEST_CASE("trimming edge cases") {
  SpikeDataset ds =
      make_dataset({make_trial(10.0, 2, {1.0, 2.5, 7.0}, {0, 1, 0})});

  SUBCASE("full window is the identity") {
    const SpikeDataset out = trim(ds, 0.0, 10.0);
    CHECK(out.trials[0].times == ds.trials[0].times);
    CHECK(out.trials[0].dims == ds.trials[0].dims);
    CHECK(out.trials[0].horizon == 10.0);
  }
  SUBCASE("window without events keeps an empty trial") {
    const SpikeDataset out = trim(ds, 8.0, 9.0);
    REQUIRE(out.trials.size() == 1);
    CHECK(out.trials[0].size() == 0);
    CHECK(out.trials[0].horizon == 1.0);
    CHECK(out.provenance.back().events_after == 0);
  }
  SUBCASE("boundary events are kept on both sides") {
    const SpikeDataset out = trim(ds, 1.0, 7.0);
    REQUIRE(out.trials[0].size() == 3);
    // The event at the left edge is moved off zero by one tie step.
    CHECK(out.trials[0].times[0] > 0.0);
    CHECK(out.trials[0].times[0] < 1e-11);
    CHECK(out.trials[0].times[2] == out.trials[0].horizon);
    CHECK(out.provenance.back().warnings.size() == 1);
  }
  SUBCASE("degenerate windows are rejected") {
    CHECK_THROWS_AS((void)trim(ds, 5.0, 5.0), ValidationError);
    CHECK_THROWS_AS((void)trim(ds, 7.0, 3.0), ValidationError);
  }
}

TEST_CASE("trial filtering drops trials with too many inactive neurons") {
  // Three neurons; trial 0 uses all, trial 1 uses two, trial 2 uses one.
  SpikeDataset ds = make_dataset({
      make_trial(10.0, 3, {1.0, 2.0, 3.0}, {0, 1, 2}),
      make_trial(10.0, 3, {1.5, 2.5}, {0, 1}),
      make_trial(10.0, 3, {4.0, 5.0}, {2, 2}),
  });

  SUBCASE("threshold two drops the single-neuron trial") {
    const SpikeDataset out = filter_trials(ds, 2);
    REQUIRE(out.trials.size() == 2);
    CHECK(out.trials[0].size() == 3);
    CHECK(out.trials[1].size() == 2);
    CHECK(out.provenance.back().trials_before == 3);
    CHECK(out.provenance.back().trials_after == 2);
    CHECK(out.provenance.back().neurons_after == 3);
  }
  SUBCASE("threshold one keeps only fully active trials") {
    const SpikeDataset out = filter_trials(ds, 1);
    REQUIRE(out.trials.size() == 1);
    CHECK(out.trials[0].size() == 3);
  }
  SUBCASE("large threshold is the identity") {
    CHECK(filter_trials(ds, 4).trials.size() == 3);
  }
  SUBCASE("negative threshold is rejected") {
    CHECK_THROWS_AS((void)filter_trials(ds, -1), ValidationError);
  }
}

TEST_CASE("neuron filtering re-indexes densely and keeps the label map") {
  // Total jumps: neuron 0 -> 1, neuron 1 -> 3, neuron 2 -> 2.
  SpikeDataset ds = make_dataset({
      make_trial(10.0, 3, {1.0, 2.0, 3.0}, {0, 1, 2}),
      make_trial(10.0, 3, {1.5, 2.5, 3.5}, {1, 1, 2}),
  });

  SUBCASE("threshold two removes the weakest neuron") {
    const SpikeDataset out = filter_neurons(ds, 2);
    REQUIRE(out.dimension() == 2);
    CHECK(out.neuron_ids == std::vector<long>{1, 2});
    // Trial 0 lost the neuron-0 event; others remap 1 -> 0 and 2 -> 1.
    REQUIRE(out.trials[0].size() == 2);
    CHECK(out.trials[0].times == std::vector<double>{2.0, 3.0});
    CHECK(out.trials[0].dims == std::vector<int>{0, 1});
    CHECK(out.trials[1].dims == std::vector<int>{0, 0, 1});
    CHECK(out.provenance.back().neurons_before == 3);
    CHECK(out.provenance.back().neurons_after == 2);
  }
  SUBCASE("threshold zero is the identity") {
    const SpikeDataset out = filter_neurons(ds, 0);
    CHECK(out.dimension() == 3);
    CHECK(out.neuron_ids == std::vector<long>{0, 1, 2});
  }
  SUBCASE("unreachable threshold reports an empty result") {
    CHECK_THROWS_WITH_AS((void)filter_neurons(ds, 100),
                         doctest::Contains("empty result"), ValidationError);
  }
}

TEST_CASE("resampled concatenations preserve dataset order and shift by horizons") {
  // Disjoint dimensions per trial make the source of every event visible.
  SpikeDataset ds = make_dataset({
      make_trial(10.0, 3, {1.0, 9.0}, {0, 0}),
      make_trial(20.0, 3, {2.0, 19.0}, {1, 1}),
      make_trial(30.0, 3, {3.0}, {2}),
  });

  SUBCASE("selecting every trial gives the fully shifted concatenation") {
    const std::vector<Realization> samples = resample_concat(ds, 3, 1, 7);
    REQUIRE(samples.size() == 1);
    const Realization& r = samples[0];
    CHECK(r.horizon == 60.0);
    CHECK(r.times == std::vector<double>{1.0, 9.0, 12.0, 29.0, 33.0});
    CHECK(r.dims == std::vector<int>{0, 0, 1, 1, 2});
  }
  SUBCASE("selected trials appear in dataset order in every sample") {
    const std::vector<Realization> samples = resample_concat(ds, 2, 50, 123);
    for (const Realization& r : samples) {
      REQUIRE(r.size() >= 3);  // two distinct trials hold 2 + 1 or 2 + 2 events
      for (std::size_t k = 1; k < r.size(); ++k) {
        CHECK(r.dims[k] >= r.dims[k - 1]);  // dataset order
        CHECK(r.times[k] > r.times[k - 1]);
      }
    }
  }
  SUBCASE("draws are reproducible and seed-sensitive") {
    const std::vector<Realization> a = resample_concat(ds, 2, 10, 9);
    const std::vector<Realization> b = resample_concat(ds, 2, 10, 9);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].times == b[k].times);
      CHECK(a[k].dims == b[k].dims);
    }
    const std::vector<Realization> c = resample_concat(ds, 2, 10, 10);
    bool any_different = false;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k].times != c[k].times) any_different = true;
    CHECK(any_different);
  }
  SUBCASE("single-trial samples are plain bootstrap draws") {
    const std::vector<Realization> samples = resample_concat(ds, 1, 20, 3);
    for (const Realization& r : samples) {
      REQUIRE(r.size() >= 1);
      const int dim = r.dims[0];
      for (const int d : r.dims) CHECK(d == dim);
      CHECK(r.horizon == ds.trials[static_cast<std::size_t>(dim)].horizon);
    }
  }
  SUBCASE("oversized k is rejected") {
    CHECK_THROWS_AS((void)resample_concat(ds, 4, 1, 0), ValidationError);
    CHECK_THROWS_AS((void)resample_concat(ds, 0, 1, 0), ValidationError);
    CHECK_THROWS_AS((void)resample_concat(ds, 2, 0, 0), ValidationError);
  }
}

TEST_CASE("samples draw without replacement, so k trials are always distinct") {
  SpikeDataset ds = make_dataset({
      make_trial(5.0, 2, {1.0}, {0}),
      make_trial(5.0, 2, {2.0}, {1}),
  });
  // With two trials and k = 2, every sample must contain both events.
  for (const Realization& r : resample_concat(ds, 2, 25, 77)) {
    REQUIRE(r.size() == 2);
    CHECK(r.times == std::vector<double>{1.0, 7.0});
  }
}

TEST_CASE("spike ingestion builds a common labelling and separates ties") {
  const fs::path dir = scratch_dir("ingest");
  io::write_text_file(dir / "a.csv",
                      "time,neuron_id\n"
                      "2.0,12\n"
                      "1.5,7\n"
                      "1.5,3\n"
                      "2.0,12\n"  // exact duplicate, dropped
                      "0.0,7\n");
  io::write_text_file(dir / "b.csv",
                      "time,neuron_id\n"
                      "0.5,3\n"
                      "3.25,12\n");
  io::write_json_file(dir / "manifest.json",
                      io::json{{"horizon", 4.0}, {"trials", {"a.csv", "b.csv"}}});

  const SpikeDataset ds = ingest_spikes(dir / "manifest.json");
  REQUIRE(ds.trials.size() == 2);
  CHECK(ds.neuron_ids == std::vector<long>{3, 7, 12});
  CHECK(ds.dimension() == 3);

  const Realization& a = ds.trials[0];
  REQUIRE(a.size() == 4);  // five rows, one duplicate dropped
  // Sorted by time; the zero-time spike was moved off zero.
  CHECK(a.times[0] > 0.0);
  CHECK(a.times[0] < 1e-11);
  CHECK(a.dims[0] == 1);  // neuron 7
  // The tie at 1.5 keeps (neuron 3, neuron 7) label order and separates times.
  CHECK(a.times[1] == 1.5);
  CHECK(a.dims[1] == 0);
  CHECK(a.times[2] > 1.5);
  CHECK(a.times[2] - 1.5 < 1e-11);
  CHECK(a.dims[2] == 1);
  CHECK(a.times[3] == 2.0);
  CHECK(a.dims[3] == 2);  // neuron 12
  for (std::size_t k = 1; k < a.size(); ++k) CHECK(a.times[k] > a.times[k - 1]);

  const Realization& b = ds.trials[1];
  CHECK(b.horizon == 4.0);
  CHECK(b.times == std::vector<double>{0.5, 3.25});
  CHECK(b.dims == std::vector<int>{0, 2});

  REQUIRE(ds.provenance.size() == 1);
  CHECK(ds.provenance[0].step == "ingest");
  CHECK(ds.provenance[0].events_after == 6);
  CHECK(ds.provenance[0].warnings.size() == 2);  // duplicate note + tie note

  fs::remove_all(dir);
}

TEST_CASE("spike ingestion rejects malformed inputs") {
  const fs::path dir = scratch_dir("ingest_bad");

  SUBCASE("wrong header") {
    io::write_text_file(dir / "a.csv", "time,dim\n1.0,1\n");
    io::write_json_file(dir / "manifest.json",
                        io::json{{"horizon", 4.0}, {"trials", {"a.csv"}}});
    CHECK_THROWS_AS((void)ingest_spikes(dir / "manifest.json"), ValidationError);
  }
  SUBCASE("time outside the recording window") {
    io::write_text_file(dir / "a.csv", "time,neuron_id\n5.5,1\n");
    io::write_json_file(dir / "manifest.json",
                        io::json{{"horizon", 4.0}, {"trials", {"a.csv"}}});
    CHECK_THROWS_AS((void)ingest_spikes(dir / "manifest.json"), ValidationError);
  }
  SUBCASE("missing horizon") {
    io::write_text_file(dir / "a.csv", "time,neuron_id\n1.0,1\n");
    io::write_json_file(dir / "manifest.json", io::json{{"trials", {"a.csv"}}});
    CHECK_THROWS_AS((void)ingest_spikes(dir / "manifest.json"), ValidationError);
  }
  SUBCASE("no trials") {
    io::write_json_file(dir / "manifest.json",
                        io::json{{"horizon", 4.0}, {"trials", io::json::array()}});
    CHECK_THROWS_AS((void)ingest_spikes(dir / "manifest.json"), ValidationError);
  }

  fs::remove_all(dir);
}

TEST_CASE("normalized cumulative counts match hand arithmetic") {
  const Realization r = make_trial(4.0, 2, {1.0, 2.0, 4.0}, {0, 1, 0});
  const Eigen::MatrixXd table = normalized_counts(r, 4);
  REQUIRE(table.rows() == 4);
  REQUIRE(table.cols() == 3);
  CHECK(table(0, 0) == 1.0);
  CHECK(table(0, 1) == 1.0);  // N^0(1)/1 = 1
  CHECK(table(0, 2) == 0.0);
  CHECK(table(1, 1) == 0.5);  // N^0(2)/2
  CHECK(table(1, 2) == 0.5);  // N^1(2)/2
  CHECK(table(2, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(table(3, 1) == 0.5);  // N^0(4)/4 = 2/4
  CHECK(table(3, 2) == 0.25);

  CHECK_THROWS_AS((void)normalized_counts(r, 0), ValidationError);
}

TEST_CASE("dataset construction validates shapes") {
  CHECK_THROWS_AS((void)make_dataset({make_trial(5.0, 1, {1.0}, {0}),
                                      make_trial(5.0, 2, {1.0}, {1})}),
                  ValidationError);
  CHECK_THROWS_AS((void)make_dataset({make_trial(5.0, 2, {1.0}, {0})}, {4}),
                  ValidationError);
  const SpikeDataset ds = make_dataset({make_trial(5.0, 2, {1.0}, {0})});
  CHECK(ds.neuron_ids == std::vector<long>{0, 1});
}

TEST_CASE("a chained pipeline logs every step with consistent counts") {
  SpikeDataset ds = make_dataset({
      make_trial(40.0, 3, {10.5, 12.0, 15.0, 20.0, 30.0}, {0, 1, 2, 0, 0}),
      make_trial(40.0, 3, {11.5, 13.0, 14.0, 18.5}, {0, 0, 1, 1}),
      make_trial(40.0, 3, {12.5, 35.0}, {2, 2}),
  });
  const SpikeDataset trimmed = trim(ds, 11.0, 21.0);
  const SpikeDataset trials_kept = filter_trials(trimmed, 2);
  const SpikeDataset final_ds = filter_neurons(trials_kept, 2);

  REQUIRE(final_ds.provenance.size() == 3);
  CHECK(final_ds.provenance[0].step == "trim");
  CHECK(final_ds.provenance[1].step == "filter_trials");
  CHECK(final_ds.provenance[2].step == "filter_neurons");
  for (std::size_t k = 1; k < final_ds.provenance.size(); ++k) {
    CHECK(final_ds.provenance[k].trials_before == final_ds.provenance[k - 1].trials_after);
    CHECK(final_ds.provenance[k].trials_after <= final_ds.provenance[k].trials_before);
    CHECK(final_ds.provenance[k].neurons_after <= final_ds.provenance[k].neurons_before);
  }

  // Trial 2 kept only one in-window event (12.5): two inactive neurons at the
  // threshold, so it is dropped; neurons 0 and 1 each keep three in-window
  // events across the surviving trials while neuron 2 keeps one.
  CHECK(final_ds.trials.size() == 2);
  CHECK(final_ds.dimension() == 2);
  CHECK(final_ds.neuron_ids == std::vector<long>{0, 1});
}
