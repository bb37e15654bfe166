#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hawkes/types.hpp"

namespace hawkes::io {

using json = nlohmann::ordered_json;

/// Shortest decimal string that round-trips the double exactly.
[[nodiscard]] std::string format_double(double x);

/// Strict double / integer parsing; `context` names the offending field in
/// error messages.
[[nodiscard]] double parse_double(const std::string& text, const std::string& context);
[[nodiscard]] long parse_long(const std::string& text, const std::string& context);

/// Realization CSV: header `time,dim`, one event per line, times ascending,
/// dims 1-based in the file (0-based in memory).
[[nodiscard]] std::string realization_to_csv(const Realization& r);
void write_realization_csv(const std::filesystem::path& path, const Realization& r);

/// Reads a realization CSV.  `dimension` = 0 infers d as the largest dim
/// label seen; `horizon` <= 0 uses the last event time.  The result is
/// validated before being returned.
[[nodiscard]] Realization read_realization_csv(const std::filesystem::path& path,
                                               Eigen::Index dimension = 0,
                                               double horizon = 0.0);

/// All *.csv files of a directory, sorted by filename, read as realizations.
[[nodiscard]] std::vector<Realization> read_realization_dir(const std::filesystem::path& dir,
                                                            Eigen::Index dimension = 0,
                                                            double horizon = 0.0);

/// Parameter JSON document with keys mu, alpha, beta, alpha_tilde,
/// beta_tilde, mask, variant.  Matrices are row-major arrays-of-arrays; row i
/// holds the entries felt by dimension i.  Enum values are lowercase strings.
[[nodiscard]] json params_to_json(const KernelParameters& p,
                                  ModelVariant variant = ModelVariant::GVM);

/// Parses a parameter document.  Optional keys and their defaults:
/// variant "gvm"; beta_tilde = beta; alpha_tilde = alpha for hp, zeros
/// otherwise; mask all "free".  Enum strings are case-insensitive.  The
/// result is validated against the variant.
[[nodiscard]] std::pair<KernelParameters, ModelVariant> params_from_json(const json& doc);

[[nodiscard]] json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& doc);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// JSON <-> Eigen helpers shared by the result writers.
[[nodiscard]] json vector_to_json(const Eigen::VectorXd& v);
[[nodiscard]] json matrix_to_json(const Eigen::MatrixXd& m);
[[nodiscard]] Eigen::VectorXd vector_from_json(const json& j, const std::string& context);
[[nodiscard]] Eigen::MatrixXd matrix_from_json(const json& j, const std::string& context);

}  // namespace hawkes::io
