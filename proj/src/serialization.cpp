#include "epidyn/serialization.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace epidyn {

namespace {

std::vector<double> reals(const Json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw std::invalid_argument(std::string(what) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> allowed, const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw std::invalid_argument("unknown key '" + key + "' in " + where);
  }
}

const Json& require(const Json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw std::invalid_argument(std::string(where) + " is missing '" + key + "'");
  return j.at(key);
}

}  // namespace

Json concepts_to_json(const ConceptSpace& concepts) {
  Json j;
  if (const auto* b = std::get_if<BoxConcepts>(&concepts)) {
    j["type"] = "box";
    j["lo"] = b->lo;
    j["hi"] = b->hi;
  } else {
    const auto& d = std::get<DiscreteConcepts>(concepts);
    j["type"] = "discrete";
    j["labels"] = d.labels;
    j["points"] = d.points;
  }
  return j;
}

ConceptSpace concepts_from_json(const Json& j) {
  const auto type = require(j, "type", "concepts").get<std::string>();
  if (type == "box") {
    reject_unknown_keys(j, {"type", "lo", "hi"}, "concepts");
    return BoxConcepts{reals(require(j, "lo", "concepts"), "concepts.lo"), reals(require(j, "hi", "concepts"), "concepts.hi")};
  }
  if (type == "discrete") {
    reject_unknown_keys(j, {"type", "labels", "points"}, "concepts");
    DiscreteConcepts d;
    d.labels = require(j, "labels", "concepts").get<std::vector<std::string>>();
    for (const auto& p : require(j, "points", "concepts")) d.points.push_back(reals(p, "concepts.points"));
    return d;
  }
  throw std::invalid_argument("concepts.type must be 'box' or 'discrete'");
}

Json setting_to_json(const KnowledgeSetting& setting) {
  Json j;
  j["experiences"] = setting.experiences();
  j["concepts"] = concepts_to_json(setting.concepts());
  return j;
}

std::shared_ptr<const KnowledgeSetting> setting_from_json(const Json& j) {
  reject_unknown_keys(j, {"experiences", "concepts"}, "setting");
  std::vector<std::vector<double>> exps;
  for (const auto& e : require(j, "experiences", "setting")) exps.push_back(reals(e, "experiences"));
  return std::make_shared<const KnowledgeSetting>(std::move(exps), concepts_from_json(require(j, "concepts", "setting")));
}

Json values_to_json(const KnowledgeFunction& k) {
  Json rows = Json::array();
  for (std::size_t e = 0; e < k.size(); ++e) {
    const auto c = k.evaluate(e);
    rows.push_back(std::vector<double>(c.begin(), c.end()));
  }
  return rows;
}

KnowledgeFunction values_from_json(std::shared_ptr<const KnowledgeSetting> setting, const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("values must be an array with one entry per experience");
  std::vector<double> flat;
  for (const auto& row : j) {
    // A bare number is accepted for one-dimensional concepts.
    if (row.is_number()) {
      flat.push_back(row.get<double>());
    } else {
      const auto r = reals(row, "values");
      if (r.size() != setting->concept_dim()) throw std::invalid_argument("values entry has the wrong concept dimension");
      flat.insert(flat.end(), r.begin(), r.end());
    }
  }
  return KnowledgeFunction(std::move(setting), std::move(flat));
}

Json function_to_json(const KnowledgeFunction& k) {
  Json j = setting_to_json(k.setting());
  j["values"] = values_to_json(k);
  return j;
}

KnowledgeFunction function_from_json(const Json& j) {
  reject_unknown_keys(j, {"experiences", "concepts", "values"}, "knowledge function");
  Json setting;
  setting["experiences"] = require(j, "experiences", "knowledge function");
  setting["concepts"] = require(j, "concepts", "knowledge function");
  return values_from_json(setting_from_json(setting), require(j, "values", "knowledge function"));
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = reals(j[static_cast<std::size_t>(i)], "matrix row");
    if (static_cast<Eigen::Index>(row.size()) != n) throw std::invalid_argument("matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
  }
  return m;
}

Json spectral_to_json(const SpectralReport& r) {
  Json j;
  j["is_primitive"] = r.is_primitive;
  j["primitivity_exponent"] = r.primitivity_exponent ? Json(*r.primitivity_exponent) : Json(nullptr);
  j["second_modulus"] = r.second_modulus;
  j["dobrushin"] = r.dobrushin;
  j["min_entry"] = r.min_entry;
  return j;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void write_matrix_csv(std::ostream& os, const Matrix& m) {
  for (Eigen::Index k = 0; k < m.cols(); ++k) os << (k ? "," : "") << 'j' << k;
  os << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) os << (k ? "," : "") << format_real(m(i, k));
    os << '\n';
  }
}

void write_trace_csv(std::ostream& os, const MetricTrace& trace) {
  os << "t,replicate,d_consensus,d_nearest,relative_entropy\n";
  for (const auto& r : trace.rows) {
    os << r.t << ',' << r.replicate << ',' << format_real(r.d_consensus) << ',' << format_real(r.d_nearest) << ','
       << format_real(r.relative_entropy) << '\n';
  }
}

void write_mean_csv(std::ostream& os, const MetricTrace& trace) {
  os << "t,d_consensus,d_nearest,relative_entropy\n";
  for (const auto& m : trace.means) {
    os << m.t << ',' << format_real(m.d_consensus) << ',' << format_real(m.d_nearest) << ','
       << format_real(m.relative_entropy) << '\n';
  }
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[digest[k] >> 4]);
    out.push_back(hex[digest[k] & 0xf]);
  }
  return out;
}

}  // namespace epidyn
