#include "hawkes/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace hawkes::io {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string strip(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

}  // namespace

double parse_double(const std::string& text, const std::string& context) {
  const std::string t = strip(text);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ValidationError(context + ": cannot parse '" + text + "' as a number");
  return value;
}

long parse_long(const std::string& text, const std::string& context) {
  const std::string t = strip(text);
  long value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ValidationError(context + ": cannot parse '" + text + "' as an integer");
  return value;
}

std::string realization_to_csv(const Realization& r) {
  std::string out = "time,dim\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    out += format_double(r.times[k]);
    out += ',';
    out += std::to_string(r.dims[k] + 1);
    out += '\n';
  }
  return out;
}

void write_realization_csv(const std::filesystem::path& path, const Realization& r) {
  write_text_file(path, realization_to_csv(r));
}

Realization read_realization_csv(const std::filesystem::path& path, Eigen::Index dimension,
                                 double horizon) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  const std::string context = path.filename().string();
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError(context + ": empty file (expected header time,dim)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (strip(line) != "time,dim")
    throw ValidationError(context + ": expected header 'time,dim', got '" + line + "'");

  Realization r;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (strip(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError(context + ":" + std::to_string(line_no) + ": expected 'time,dim'");
    const std::string where = context + ":" + std::to_string(line_no);
    const double t = parse_double(line.substr(0, comma), where);
    const long dim = parse_long(line.substr(comma + 1), where);
    if (dim < 1) throw ValidationError(where + ": dim labels are 1-based, got " +
                                       std::to_string(dim));
    r.times.push_back(t);
    r.dims.push_back(static_cast<int>(dim - 1));
  }
  Eigen::Index max_dim = 0;
  for (int d : r.dims) max_dim = std::max<Eigen::Index>(max_dim, d + 1);
  if (dimension > 0 && max_dim > dimension)
    throw ValidationError(context + ": dim label " + std::to_string(max_dim) +
                          " exceeds declared dimension " + std::to_string(dimension));
  r.dimension = dimension > 0 ? dimension : std::max<Eigen::Index>(max_dim, 1);
  r.horizon = horizon > 0.0 ? horizon : (r.times.empty() ? 1.0 : r.times.back());
  require_valid(r);
  return r;
}

std::vector<Realization> read_realization_dir(const std::filesystem::path& dir,
                                              Eigen::Index dimension, double horizon) {
  if (!std::filesystem::is_directory(dir))
    throw ValidationError("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  if (files.empty()) throw ValidationError("no .csv files in '" + dir.string() + "'");
  std::vector<Realization> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_realization_csv(f, dimension, horizon));
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& context) {
  if (!j.is_array()) throw ValidationError(context + " must be an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(context + " must contain numbers only");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty())
    throw ValidationError(context + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  if (j[0].is_array()) cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ValidationError(context + ": rows must be arrays of equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number())
        throw ValidationError(context + " must contain numbers only");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
  }
  return m;
}

json params_to_json(const KernelParameters& p, ModelVariant variant) {
  json doc;
  doc["mu"] = vector_to_json(p.mu);
  doc["alpha"] = matrix_to_json(p.alpha);
  doc["beta"] = vector_to_json(p.beta);
  doc["alpha_tilde"] = matrix_to_json(p.alpha_tilde);
  doc["beta_tilde"] = vector_to_json(p.beta_tilde);
  json mask_rows = json::array();
  for (Eigen::Index i = 0; i < p.mask.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < p.mask.cols(); ++j) row.push_back(to_string(p.mask(i, j)));
    mask_rows.push_back(std::move(row));
  }
  doc["mask"] = std::move(mask_rows);
  doc["variant"] = to_string(variant);
  return doc;
}

std::pair<KernelParameters, ModelVariant> params_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("parameter document must be a JSON object");
  for (const char* key : {"mu", "alpha", "beta"}) {
    if (!doc.contains(key))
      throw ValidationError(std::string("parameter document missing required key '") + key +
                            "'");
  }
  ModelVariant variant = ModelVariant::GVM;
  if (doc.contains("variant")) {
    if (!doc["variant"].is_string())
      throw ValidationError("'variant' must be a string (hp, vm or gvm)");
    variant = variant_from_string(doc["variant"].get<std::string>());
  }

  KernelParameters p;
  p.mu = vector_from_json(doc["mu"], "mu");
  p.alpha = matrix_from_json(doc["alpha"], "alpha");
  p.beta = vector_from_json(doc["beta"], "beta");
  const Eigen::Index d = p.mu.size();

  if (doc.contains("alpha_tilde")) {
    p.alpha_tilde = matrix_from_json(doc["alpha_tilde"], "alpha_tilde");
  } else if (variant == ModelVariant::HP) {
    p.alpha_tilde = p.alpha;
  } else {
    p.alpha_tilde = Eigen::MatrixXd::Zero(d, d);
  }
  p.beta_tilde = doc.contains("beta_tilde")
                     ? vector_from_json(doc["beta_tilde"], "beta_tilde")
                     : p.beta;
  if (variant == ModelVariant::HP && !doc.contains("beta_tilde")) p.beta_tilde = p.beta;

  p.mask = MaskMatrix::Constant(d, d, MaskTag::Free);
  if (doc.contains("mask")) {
    const json& m = doc["mask"];
    if (!m.is_array() || m.size() != static_cast<std::size_t>(d))
      throw ValidationError("'mask' must be a " + std::to_string(d) + "x" +
                            std::to_string(d) + " array of tags");
    for (Eigen::Index i = 0; i < d; ++i) {
      const json& row = m[static_cast<std::size_t>(i)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
        throw ValidationError("'mask' rows must have length " + std::to_string(d));
      for (Eigen::Index jcol = 0; jcol < d; ++jcol) {
        const json& cell = row[static_cast<std::size_t>(jcol)];
        if (!cell.is_string()) throw ValidationError("'mask' entries must be strings");
        p.mask(i, jcol) = mask_tag_from_string(cell.get<std::string>());
      }
    }
  }
  require_valid(p, variant);
  return {std::move(p), variant};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return doc;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

}  // namespace hawkes::io
