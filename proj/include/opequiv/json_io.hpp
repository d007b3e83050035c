#pragma once

#include <string>

#include <json.hpp>

#include "opequiv/bucket_matcher.hpp"
#include "opequiv/conditions.hpp"
#include "opequiv/engine.hpp"
#include "opequiv/error.hpp"
#include "opequiv/spectral_model.hpp"

namespace opequiv {

using Json = nlohmann::json;

struct SpecDocument {
  SpecPtr T;
  SpecPtr S;
  EngineOptions options;
  Relation relation = Relation::ExtensionFamily;
  // bucket-matcher parameters for the match command
  long long match_N = 1;
  Rational match_M = 1;
  MatchMode match_mode = MatchMode::OneSided;
};

namespace json_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, "missing key '" + key + "'");
  return *it;
}

inline Rational rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (!j.is_string()) fail(path, "expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

inline Cardinal cardinal(const Json& j, const std::string& path) {
  try {
    if (j.is_number_unsigned() || j.is_number_integer()) return Cardinal(j.get<long long>());
    if (j.is_string()) return parse_cardinal(j.get<std::string>());
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(path, "expected a cardinal (integer or \"alephK\")");
}

inline long long integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

inline Json rational_json(const Rational& r) { return to_string(r); }

inline Json cardinal_json(const Cardinal& c) {
  if (c.is_finite() && c.finite() <= std::numeric_limits<long long>::max()) return c.finite().convert_to<long long>();
  return c.str();
}

inline TailModel tail_model(const Json& j, const std::string& path) {
  const std::string kind = field(j, "kind", path).is_string() ? j["kind"].get<std::string>() : "";
  auto opt_rational = [&](const char* key, Rational def) {
    return j.contains(key) ? rational(j[key], path + "/" + key) : def;
  };
  auto opt_start = [&](long long def) { return j.contains("start") ? integer(j["start"], path + "/start") : def; };
  if (kind == "zero") return TailModel::zero();
  if (kind == "geometric")
    return TailModel::geometric(opt_rational("c", 1), rational(field(j, "r", path), path + "/r"), opt_start(0));
  if (kind == "power_law")
    return TailModel::power_law(opt_rational("c", 1), rational(field(j, "p", path), path + "/p"), opt_start(1));
  if (kind == "factorial") return TailModel::factorial_reciprocal(opt_start(1));
  fail(path + "/kind", "unknown tail kind '" + kind + "'");
}

inline Json tail_model_json(const TailModel& t) {
  switch (t.kind) {
    case TailModel::Kind::Zero: return {{"kind", "zero"}};
    case TailModel::Kind::Geometric:
      return {{"kind", "geometric"}, {"c", rational_json(t.c)}, {"r", rational_json(t.r)}, {"start", t.start}};
    case TailModel::Kind::PowerLaw:
      return {{"kind", "power_law"}, {"c", rational_json(t.c)}, {"p", rational_json(t.p)}, {"start", t.start}};
    case TailModel::Kind::FactorialReciprocal: return {{"kind", "factorial"}, {"start", t.start}};
  }
  return {};
}

inline BucketTail bucket_tail(const Json& j, const std::string& path) {
  const std::string kind = field(j, "kind", path).is_string() ? j["kind"].get<std::string>() : "";
  long long from = integer(field(j, "from", path), path + "/from");
  if (kind == "constant") return BucketTail::constant_count(from, cardinal(field(j, "count", path), path + "/count"));
  if (kind == "geometric_count") {
    long long base = integer(field(j, "base", path), path + "/base");
    return BucketTail::geometric_count(from, Integer(base));
  }
  if (kind == "sparse_factorial") return BucketTail::sparse_factorial(from);
  if (kind == "sequence") return BucketTail::of_sequence(from, tail_model(field(j, "model", path), path + "/model"));
  fail(path + "/kind", "unknown bucket tail kind '" + kind + "'");
}

inline Json bucket_tail_json(const BucketTail& t) {
  switch (t.kind) {
    case BucketTail::Kind::AllZero: return {{"kind", "constant"}, {"from", t.from}, {"count", 0}};
    case BucketTail::Kind::Constant: return {{"kind", "constant"}, {"from", t.from}, {"count", cardinal_json(t.constant)}};
    case BucketTail::Kind::GeometricCount: return {{"kind", "geometric_count"}, {"from", t.from}, {"base", t.base.convert_to<long long>()}};
    case BucketTail::Kind::SparseFactorial: return {{"kind", "sparse_factorial"}, {"from", t.from}};
    case BucketTail::Kind::Sequence:
      return {{"kind", "sequence"}, {"from", t.from}, {"model", tail_model_json(t.sequence)}};
  }
  return {};
}

inline std::complex<double> matrix_entry(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(path, "expected a number or a [re, im] pair");
}

}  // namespace json_detail

inline BucketMeasure parse_measure(const Json& j, const Rational& default_delta, const std::string& path = "") {
  using namespace json_detail;
  BucketMeasure m;
  m.delta = j.contains("delta") ? rational(j["delta"], path + "/delta") : default_delta;
  if (j.contains("counts")) {
    const Json& counts = j["counts"];
    if (!counts.is_object()) fail(path + "/counts", "expected an object of bucket index -> count");
    for (const auto& [key, value] : counts.items()) {
      long long idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoll(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        fail(path + "/counts", "bucket index '" + key + "' is not an integer");
      }
      m.buckets[idx] = cardinal(value, path + "/counts/" + key);
    }
  }
  if (j.contains("tails")) {
    if (!j["tails"].is_array()) fail(path + "/tails", "expected an array");
    for (std::size_t i = 0; i < j["tails"].size(); ++i)
      m.tails.push_back(bucket_tail(j["tails"][i], path + "/tails/" + std::to_string(i)));
  }
  m.kernel_dim = j.contains("kernel") ? cardinal(j["kernel"], path + "/kernel") : Cardinal(0);
  m.cokernel_dim = j.contains("cokernel") ? cardinal(j["cokernel"], path + "/cokernel") : Cardinal(0);
  return m;
}

inline Json measure_json(const BucketMeasure& m) {
  using namespace json_detail;
  Json counts = Json::object();
  for (const auto& [j, c] : m.buckets)
    if (!c.is_zero()) counts[std::to_string(j)] = cardinal_json(c);
  Json tails = Json::array();
  for (const auto& t : m.tails)
    if (t.kind != BucketTail::Kind::AllZero) tails.push_back(bucket_tail_json(t));
  return {{"delta", rational_json(m.delta)},
          {"counts", counts},
          {"tails", tails},
          {"kernel", cardinal_json(m.kernel_dim)},
          {"cokernel", cardinal_json(m.cokernel_dim)}};
}

inline SpecPtr parse_operator(const Json& j, const Rational& delta, const std::string& path = "") {
  using namespace json_detail;
  const Json& kind_json = field(j, "kind", path);
  if (!kind_json.is_string()) fail(path + "/kind", "expected a string");
  const std::string kind = kind_json.get<std::string>();
  try {
    if (kind == "matrix") {
      const Json& rows = field(j, "rows", path);
      if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty())
        fail(path + "/rows", "expected a nonempty array of nonempty rows");
      Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        std::string rp = path + "/rows/" + std::to_string(r);
        if (!rows[r].is_array() || rows[r].size() != rows[0].size()) fail(rp, "rows must have equal length");
        for (std::size_t c = 0; c < rows[r].size(); ++c)
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              matrix_entry(rows[r][c], rp + "/" + std::to_string(c));
      }
      return make_spec(FiniteMatrix{m});
    }
    if (kind == "compact_diagonal") {
      std::vector<Rational> prefix;
      if (j.contains("prefix")) {
        if (!j["prefix"].is_array()) fail(path + "/prefix", "expected an array");
        for (std::size_t i = 0; i < j["prefix"].size(); ++i)
          prefix.push_back(rational(j["prefix"][i], path + "/prefix/" + std::to_string(i)));
      }
      TailModel tail = j.contains("tail") ? tail_model(j["tail"], path + "/tail") : TailModel::zero();
      Cardinal kernel = j.contains("kernel") ? cardinal(j["kernel"], path + "/kernel") : Cardinal(0);
      Cardinal cokernel = j.contains("cokernel") ? cardinal(j["cokernel"], path + "/cokernel") : Cardinal(0);
      return compact_diagonal(std::move(prefix), std::move(tail), std::move(kernel), std::move(cokernel));
    }
    if (kind == "buckets") return make_spec(Buckets{parse_measure(j, delta, path)});
    if (kind == "direct_sum") {
      if (j.contains("summands")) {
        const Json& list = j["summands"];
        if (!list.is_array() || list.empty()) fail(path + "/summands", "expected a nonempty array");
        SpecPtr acc = parse_operator(list[0], delta, path + "/summands/0");
        for (std::size_t i = 1; i < list.size(); ++i)
          acc = direct_sum(acc, parse_operator(list[i], delta, path + "/summands/" + std::to_string(i)));
        return acc;
      }
      SpecPtr left = parse_operator(field(j, "left", path), delta, path + "/left");
      SpecPtr right = parse_operator(field(j, "right", path), delta, path + "/right");
      return direct_sum(std::move(left), std::move(right));
    }
    if (kind == "scaled_identity")
      return scaled_identity(rational(field(j, "value", path), path + "/value"),
                             cardinal(field(j, "dim", path), path + "/dim"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaViolation) throw;
    throw Error(e.code(), "at " + (path.empty() ? std::string("/") : path) + ": " + e.what());
  }
  fail(path + "/kind", "unknown operator kind '" + kind + "'");
}

inline Json operator_json(const OperatorSpec& spec) {
  using namespace json_detail;
  return std::visit(
      [](const auto& node) -> Json {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, FiniteMatrix>) {
          Json rows = Json::array();
          for (Eigen::Index r = 0; r < node.entries.rows(); ++r) {
            Json row = Json::array();
            for (Eigen::Index c = 0; c < node.entries.cols(); ++c) {
              auto v = node.entries(r, c);
              if (v.imag() == 0.0) row.push_back(v.real());
              else row.push_back(Json::array({v.real(), v.imag()}));
            }
            rows.push_back(row);
          }
          return {{"kind", "matrix"}, {"rows", rows}};
        } else if constexpr (std::is_same_v<T, CompactDiagonal>) {
          Json prefix = Json::array();
          for (const auto& v : node.prefix) prefix.push_back(rational_json(v));
          return {{"kind", "compact_diagonal"},
                  {"prefix", prefix},
                  {"tail", tail_model_json(node.tail)},
                  {"kernel", cardinal_json(node.kernel_dim)},
                  {"cokernel", cardinal_json(node.cokernel_dim)}};
        } else if constexpr (std::is_same_v<T, Buckets>) {
          Json out = measure_json(node.measure);
          out["kind"] = "buckets";
          return out;
        } else if constexpr (std::is_same_v<T, DirectSum>) {
          return {{"kind", "direct_sum"}, {"left", operator_json(*node.left)}, {"right", operator_json(*node.right)}};
        } else {
          return {{"kind", "scaled_identity"}, {"value", rational_json(node.value)}, {"dim", cardinal_json(node.dim)}};
        }
      },
      spec.node);
}

inline SpecDocument parse_spec(const Json& doc) {
  using namespace json_detail;
  if (!doc.is_object()) fail("", "expected an object with keys \"T\" and \"S\"");
  SpecDocument out;
  if (doc.contains("options")) {
    const Json& o = doc["options"];
    if (!o.is_object()) fail("/options", "expected an object");
    if (o.contains("delta")) out.options.delta = rational(o["delta"], "/options/delta");
    if (o.contains("svd_tol")) {
      if (!o["svd_tol"].is_number() || o["svd_tol"].get<double>() < 0) fail("/options/svd_tol", "expected a number >= 0");
      out.options.svd_tol = o["svd_tol"].get<double>();
    }
    auto positive = [&](const char* key, long long& target) {
      if (!o.contains(key)) return;
      long long v = integer(o[key], std::string("/options/") + key);
      if (v < 1) fail(std::string("/options/") + key, "must be positive");
      target = v;
    };
    positive("q_max", out.options.q_max);
    positive("N_max", out.options.n_max);
    positive("prefix_check", out.options.prefix_check);
    positive("max_shift", out.options.max_shift);
    positive("N", out.match_N);
    if (o.contains("M")) out.match_M = rational(o["M"], "/options/M");
    if (o.contains("relation")) {
      const Json& r = o["relation"];
      if (r == "strong") out.relation = Relation::Strong;
      else if (r == "extension") out.relation = Relation::ExtensionFamily;
      else fail("/options/relation", "expected \"strong\" or \"extension\"");
    }
    if (o.contains("mode")) {
      const Json& m = o["mode"];
      if (m == "one_sided") out.match_mode = MatchMode::OneSided;
      else if (m == "two_sided") out.match_mode = MatchMode::TwoSidedStrict;
      else fail("/options/mode", "expected \"one_sided\" or \"two_sided\"");
    }
  }
  try {
    require_delta(out.options.delta);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("at /options/delta: ") + e.what());
  }
  out.T = parse_operator(field(doc, "T", ""), out.options.delta, "/T");
  out.S = parse_operator(field(doc, "S", ""), out.options.delta, "/S");
  return out;
}

inline SpecDocument parse_spec(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("malformed JSON: ") + e.what());
  }
  return parse_spec(doc);
}

inline SpecDocument parse_spec(const char* text) { return parse_spec(std::string(text)); }

inline Json serialize(const SpecDocument& doc) {
  using namespace json_detail;
  Json options = {{"delta", rational_json(doc.options.delta)},
                  {"svd_tol", doc.options.svd_tol},
                  {"q_max", doc.options.q_max},
                  {"N_max", doc.options.n_max},
                  {"prefix_check", doc.options.prefix_check},
                  {"max_shift", doc.options.max_shift},
                  {"relation", doc.relation == Relation::Strong ? "strong" : "extension"},
                  {"N", doc.match_N},
                  {"M", rational_json(doc.match_M)},
                  {"mode", doc.match_mode == MatchMode::OneSided ? "one_sided" : "two_sided"}};
  return {{"T", operator_json(*doc.T)}, {"S", operator_json(*doc.S)}, {"options", options}};
}

// Structural equality of specs.
inline bool same_spec(const OperatorSpec& a, const OperatorSpec& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, FiniteMatrix>) {
          return x.entries.rows() == y.entries.rows() && x.entries.cols() == y.entries.cols() && x.entries == y.entries;
        } else if constexpr (std::is_same_v<T, CompactDiagonal>) {
          return x.prefix == y.prefix && x.tail == y.tail && x.kernel_dim == y.kernel_dim &&
                 x.cokernel_dim == y.cokernel_dim;
        } else if constexpr (std::is_same_v<T, Buckets>) {
          return x.measure == y.measure;
        } else if constexpr (std::is_same_v<T, DirectSum>) {
          return same_spec(*x.left, *y.left) && same_spec(*x.right, *y.right);
        } else {
          return x.value == y.value && x.dim == y.dim;
        }
      },
      a.node);
}

inline bool operator==(const SpecDocument& a, const SpecDocument& b) {
  const auto& x = a.options;
  const auto& y = b.options;
  return same_spec(*a.T, *b.T) && same_spec(*a.S, *b.S) && x.delta == y.delta && x.svd_tol == y.svd_tol &&
         x.q_max == y.q_max && x.n_max == y.n_max && x.prefix_check == y.prefix_check && x.max_shift == y.max_shift &&
         a.relation == b.relation && a.match_N == b.match_N && a.match_M == b.match_M && a.match_mode == b.match_mode;
}

// ---------------------------------------------------------------------------
// Result serialization
// ---------------------------------------------------------------------------

inline Json match_json(const MatchResult& r) {
  using namespace json_detail;
  auto element = [](const MatchElement& e) -> Json {
    if (e.padding) return {{"padding", true}, {"ordinal", e.ordinal}};
    return {{"bucket", e.bucket}, {"ordinal", e.ordinal}};
  };
  Json pairs = Json::array();
  for (const auto& [t, s] : r.pairing) pairs.push_back(Json::array({element(t), element(s)}));
  return {{"case", to_string(r.case_tag)},
          {"padding", r.padding},
          {"delta_prime", rational_json(r.delta_prime)},
          {"pairs", pairs}};
}

inline Json window_json(const FailingWindow& w) {
  return {{"k", w.k}, {"ell", w.ell}, {"exceeding", w.first_exceeds ? "T" : "S"}, {"widening", w.widening}};
}

inline Json witness_json(const EquivalenceWitness& w) {
  using namespace json_detail;
  Json out = {{"delta_prime", rational_json(w.delta_prime)}};
  Json side = {{"kind", w.extension_side.kind == ExtensionSide::Kind::None        ? "none"
                        : w.extension_side.kind == ExtensionSide::Kind::LeftByDim ? "left"
                                                                                  : "right"}};
  if (w.extension_side.kind != ExtensionSide::Kind::None) side["dim"] = cardinal_json(w.extension_side.dim);
  out["extension_side"] = side;
  if (w.shift) out["shift"] = *w.shift;
  if (!w.feasible_shifts.empty()) out["feasible_shifts"] = w.feasible_shifts;
  if (w.cutoff_n) out["cutoff_N"] = *w.cutoff_n;
  if (w.pairing) {
    out["pairing"] = match_json(*w.pairing);
    out["pairing_coarsening"] = w.pairing_coarsening;
  }
  return out;
}

inline Json verdict_json(const Verdict& v) {
  Json out = {{"relation", to_string(v.relation)},
              {"holds", v.holds},
              {"reason", to_string(v.reason)},
              {"path", v.path}};
  if (v.window) out["window"] = window_json(*v.window);
  if (v.witness) out["witness"] = witness_json(*v.witness);
  if (v.relation == Relation::ExtensionFamily) out["strong_upgrade"] = v.strong_upgrade;
  return out;
}

}  // namespace opequiv
