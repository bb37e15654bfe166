#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <set>

#include "hawkes/io.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/types.hpp"

using namespace hawkes;

namespace {

KernelParameters bivariate_example() {
  KernelParameters p = KernelParameters::zeros(2);
  p.mu << 0.7, 1.0;
  p.alpha << 0.2, 0.0, -0.6, 1.2;
  p.beta << 3.0, 2.0;
  p.alpha_tilde = p.alpha;
  p.beta_tilde = p.beta;
  return p;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("hawkes_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("parameter validation accepts the bivariate example") {
  CHECK(validate(bivariate_example(), ModelVariant::HP).empty());
  CHECK(validate(bivariate_example().as_vm(), ModelVariant::VM).empty());
  CHECK(validate(bivariate_example(), ModelVariant::GVM).empty());
}

TEST_CASE("parameter validation catches violations") {
  auto p = bivariate_example();
  p.mu[0] = 0.0;
  CHECK(!validate(p).empty());

  p = bivariate_example();
  p.beta[1] = -2.0;
  CHECK(!validate(p).empty());

  p = bivariate_example();
  p.mask(0, 1) = MaskTag::Zero;
  p.alpha(0, 1) = 0.5;
  CHECK(!validate(p).empty());

  p = bivariate_example();
  p.mask(1, 0) = MaskTag::Equal;
  p.alpha_tilde(1, 0) = 0.0;  // differs from alpha(1,0) = -0.6
  CHECK(!validate(p).empty());

  p = bivariate_example();
  p.mask(1, 1) = MaskTag::TildeZero;
  CHECK(!validate(p).empty());  // alpha_tilde(1,1) = 1.2 != 0

  p = bivariate_example();
  p.alpha_tilde(0, 0) = 0.3;
  CHECK(!validate(p, ModelVariant::HP).empty());
  CHECK(validate(p, ModelVariant::GVM).empty());

  p = bivariate_example().as_vm();
  p.alpha_tilde(1, 1) = 0.1;
  CHECK(!validate(p, ModelVariant::VM).empty());

  CHECK_THROWS_AS(require_valid(p, ModelVariant::VM), ValidationError);
}

TEST_CASE("enum round trips and case-insensitive parsing") {
  for (auto v : {ModelVariant::HP, ModelVariant::VM, ModelVariant::GVM})
    CHECK(variant_from_string(to_string(v)) == v);
  for (auto t : {MaskTag::Free, MaskTag::Zero, MaskTag::Equal, MaskTag::TildeZero})
    CHECK(mask_tag_from_string(to_string(t)) == t);
  CHECK(variant_from_string("HP") == ModelVariant::HP);
  CHECK(mask_tag_from_string("FREE") == MaskTag::Free);
  CHECK_THROWS_AS((void)variant_from_string("hawkes"), ValidationError);
  CHECK_THROWS_AS((void)mask_tag_from_string("frozen"), ValidationError);
}

TEST_CASE("realization validation") {
  Realization r;
  r.dimension = 2;
  r.horizon = 10.0;
  r.times = {1.0, 2.0, 2.5};
  r.dims = {0, 1, 0};
  CHECK(validate(r).empty());

  auto bad = r;
  bad.times[1] = 1.0;  // not strictly increasing
  CHECK(!validate(bad).empty());

  bad = r;
  bad.times[0] = 0.0;  // outside (0, horizon]
  CHECK(!validate(bad).empty());

  bad = r;
  bad.times[2] = 10.5;  // beyond horizon
  CHECK(!validate(bad).empty());

  bad = r;
  bad.dims[1] = 2;  // out of range
  CHECK(!validate(bad).empty());

  bad = r;
  bad.dims.pop_back();
  CHECK(!validate(bad).empty());

  // An event exactly at the horizon is legal.
  r.times[2] = 10.0;
  CHECK(validate(r).empty());
}

TEST_CASE("per-dimension helpers") {
  Realization r;
  r.dimension = 3;
  r.horizon = 5.0;
  r.times = {0.5, 1.0, 2.0, 3.0};
  r.dims = {2, 0, 2, 1};
  const auto counts = per_dimension_counts(r);
  CHECK(counts[0] == 1);
  CHECK(counts[1] == 1);
  CHECK(counts[2] == 2);
  CHECK(per_dimension_times(r, 2) == std::vector<double>{0.5, 2.0});
  CHECK(per_dimension_times(r, 1) == std::vector<double>{3.0});
}

TEST_CASE("realization CSV round trip is bit exact") {
  TempDir tmp;
  Realization r;
  r.dimension = 3;
  r.horizon = 100.0;
  r.times = {0.1 + 0.2, 1.0 / 3.0, 0.7071067811865476, 2.000000000000001, 99.99999999999999};
  // 0.1+0.2 = 0.30000000000000004 < 1/3; keep ascending:
  r.dims = {0, 2, 1, 0, 2};
  const auto file = tmp.path / "r.csv";
  io::write_realization_csv(file, r);

  const std::string text = io::read_text_file(file);
  CHECK(text.substr(0, 9) == "time,dim\n");
  CHECK(text.find(",3\n") != std::string::npos);  // dims are 1-based on disk

  const Realization back = io::read_realization_csv(file, 3, 100.0);
  REQUIRE(back.times.size() == r.times.size());
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    CHECK(back.times[k] == r.times[k]);  // bitwise equality via shortest round trip
    CHECK(back.dims[k] == r.dims[k]);
  }
  CHECK(back.horizon == 100.0);
  CHECK(back.dimension == 3);

  // Defaults: horizon = last event, dimension inferred from labels.
  const Realization inferred = io::read_realization_csv(file);
  CHECK(inferred.horizon == r.times.back());
  CHECK(inferred.dimension == 3);
}

TEST_CASE("realization CSV rejects malformed input") {
  TempDir tmp;
  const auto file = tmp.path / "bad.csv";

  io::write_text_file(file, "t,d\n1.0,1\n");
  CHECK_THROWS_AS((void)io::read_realization_csv(file), ValidationError);

  io::write_text_file(file, "time,dim\n1.0,0\n");
  CHECK_THROWS_AS((void)io::read_realization_csv(file), ValidationError);  // 0-based label

  io::write_text_file(file, "time,dim\nabc,1\n");
  CHECK_THROWS_AS((void)io::read_realization_csv(file), ValidationError);

  io::write_text_file(file, "time,dim\n2.0,1\n1.0,1\n");
  CHECK_THROWS_AS((void)io::read_realization_csv(file), ValidationError);  // not ascending

  io::write_text_file(file, "time,dim\n1.0,9\n");
  CHECK_THROWS_AS((void)io::read_realization_csv(file, 2), ValidationError);  // beyond d
}

TEST_CASE("parameter JSON round trip") {
  KernelParameters p = bivariate_example();
  p.mask(0, 1) = MaskTag::Zero;
  p.alpha(0, 1) = 0.0;
  p.alpha_tilde(0, 1) = 0.0;
  p.mask(1, 0) = MaskTag::Equal;
  const auto doc = io::params_to_json(p, ModelVariant::GVM);
  const auto [back, variant] = io::params_from_json(doc);
  CHECK(variant == ModelVariant::GVM);
  CHECK(back.mu == p.mu);
  CHECK(back.alpha == p.alpha);
  CHECK(back.beta == p.beta);
  CHECK(back.alpha_tilde == p.alpha_tilde);
  CHECK(back.beta_tilde == p.beta_tilde);
  CHECK(back.mask(0, 1) == MaskTag::Zero);
  CHECK(back.mask(1, 0) == MaskTag::Equal);
}

TEST_CASE("parameter JSON defaults") {
  io::json doc;
  doc["mu"] = {0.7, 1.0};
  doc["alpha"] = {{0.2, 0.0}, {-0.6, 1.2}};
  doc["beta"] = {3.0, 2.0};

  SUBCASE("gvm defaults: alpha_tilde zero, beta_tilde = beta, mask free") {
    const auto [p, variant] = io::params_from_json(doc);
    CHECK(variant == ModelVariant::GVM);
    CHECK((p.alpha_tilde.array() == 0.0).all());
    CHECK(p.beta_tilde == p.beta);
    CHECK(p.mask(1, 1) == MaskTag::Free);
  }
  SUBCASE("hp default alpha_tilde = alpha") {
    doc["variant"] = "hp";
    const auto [p, variant] = io::params_from_json(doc);
    CHECK(variant == ModelVariant::HP);
    CHECK(p.alpha_tilde == p.alpha);
  }
  SUBCASE("vm requires alpha_tilde zero") {
    doc["variant"] = "vm";
    doc["alpha_tilde"] = {{0.1, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS((void)io::params_from_json(doc), ValidationError);
  }
  SUBCASE("missing required key") {
    doc.erase("beta");
    CHECK_THROWS_AS((void)io::params_from_json(doc), ValidationError);
  }
  SUBCASE("invalid values rejected") {
    doc["mu"] = {0.0, 1.0};
    CHECK_THROWS_AS((void)io::params_from_json(doc), ValidationError);
  }
}

TEST_CASE("format_double round trips exactly") {
  for (double x : {0.1, 1.0 / 3.0, 6.02e23, 5e-324, 1e308, -0.0, 12345.6789, 0.30000000000000004}) {
    const double back = io::parse_double(io::format_double(x), "test");
    CHECK(back == x);
  }
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true;
  bool any_diff_stream = false;
  for (int k = 0; k < 1000; ++k) {
    const auto xa = a.next_u64();
    if (xa != b.next_u64()) all_equal = false;
    if (xa != c.next_u64()) any_diff_stream = true;
  }
  CHECK(all_equal);
  CHECK(any_diff_stream);
}

TEST_CASE("rng distributions behave sanely") {
  Rng rng(123, 0);
  double sum = 0.0, sum2 = 0.0;
  constexpr int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(sum2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.03));

  double esum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double e = rng.exponential(2.0);
    CHECK(e > 0.0);
    esum += e;
  }
  CHECK(esum / n == doctest::Approx(0.5).epsilon(0.05));

  double nsum = 0.0, nsum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = rng.normal();
    nsum += z;
    nsum2 += z * z;
  }
  CHECK(std::abs(nsum / n) < 0.03);
  CHECK(nsum2 / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sample_without_replacement returns distinct indices") {
  Rng rng(9, 3);
  const auto picks = rng.sample_without_replacement(25, 5);
  CHECK(picks.size() == 5);
  std::set<std::size_t> unique(picks.begin(), picks.end());
  CHECK(unique.size() == 5);
  for (auto i : picks) CHECK(i < 25);

  const auto all = rng.sample_without_replacement(6, 6);
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 6);
}

TEST_CASE("parallel_for covers every index once for any thread count") {
  for (unsigned threads : {1u, 2u, 4u, 7u}) {
    std::vector<std::atomic<int>> hits(101);
    for (auto& h : hits) h = 0;
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h == 1);
  }
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(8, 4,
                               [&](std::size_t i) {
                                 if (i == 5) throw ValidationError("boom");
                               }),
                  ValidationError);
}
