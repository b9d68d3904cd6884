#pragma once

// JSON model/cost/strategy documents, CSV output and atomic file writes.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refrontier/cost.hpp"
#include "refrontier/error.hpp"
#include "refrontier/frontier.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/matrix.hpp"

namespace refrontier::io {

using json = nlohmann::json;

// 17 significant digits, enough for a lossless double round trip.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": " + e.what());
  }
}

// FNV-1a, 64 bit, as lowercase hex.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Write to a sibling temporary file, then rename over the target.
inline void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot rename onto " + path + ": " + ec.message());
  }
}

namespace detail {

inline void only_fields(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw InputError(what + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw InputError(what + ": unknown field '" + it.key() + "'");
}

inline const json& field(const json& j, const char* name, const std::string& what) {
  auto it = j.find(name);
  if (it == j.end()) throw InputError(what + ": missing field '" + name + "'");
  return *it;
}

inline Vector to_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of numbers");
  Vector v;
  for (const json& x : j) {
    if (!x.is_number()) throw InputError(what + " must contain numbers only");
    v.push_back(x.get<double>());
  }
  return v;
}

inline Matrix to_matrix(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const json& r : j) rows.push_back(to_vector(r, what + " row"));
  return Matrix::from_rows(rows);
}

inline std::size_t to_size(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 1) throw InputError(what + " must be a positive integer");
  return static_cast<std::size_t>(j.get<long long>());
}

}  // namespace detail

// {"n", "mu", "k"} | {"generator": "cycle", "n"} | {"generator": "metapop", "K", "mu"}
inline Kernel parse_model(const json& j) {
  if (!j.is_object()) throw InputError("model must be a JSON object");
  if (j.contains("generator")) {
    const json& g = j["generator"];
    if (!g.is_string()) throw InputError("model generator must be a string");
    const std::string kind = g.get<std::string>();
    if (kind == "cycle") {
      detail::only_fields(j, {"generator", "n"}, "cycle model");
      return cycle_kernel(detail::to_size(detail::field(j, "n", "cycle model"), "n"));
    }
    if (kind == "metapop") {
      detail::only_fields(j, {"generator", "K", "mu"}, "metapop model");
      return from_metapopulation(detail::to_matrix(detail::field(j, "K", "metapop model"), "K"),
                                 detail::to_vector(detail::field(j, "mu", "metapop model"), "mu"));
    }
    throw InputError("unknown model generator '" + kind + "'");
  }
  detail::only_fields(j, {"n", "mu", "k"}, "model");
  const std::size_t n = detail::to_size(detail::field(j, "n", "model"), "n");
  Vector mu = detail::to_vector(detail::field(j, "mu", "model"), "mu");
  Matrix k = detail::to_matrix(detail::field(j, "k", "model"), "k");
  if (mu.size() != n || k.rows() != n || k.cols() != n) throw InputError("model dimensions disagree with n");
  return Kernel(Population(std::move(mu)), std::move(k));
}

inline Kernel load_model(const std::string& path) { return parse_model(parse_json(read_file(path), path)); }

// {"cost": {"kind": "uniform"}} | {"cost": {"kind": "affine", "weights": [...]}}
inline CostModel parse_cost(const json& j, const Population& pop) {
  detail::only_fields(j, {"cost"}, "cost document");
  const json& c = detail::field(j, "cost", "cost document");
  if (!c.is_object()) throw InputError("cost must be an object");
  const json& kind = detail::field(c, "kind", "cost");
  if (!kind.is_string()) throw InputError("cost kind must be a string");
  if (kind == "uniform") {
    detail::only_fields(c, {"kind"}, "uniform cost");
    return CostModel::uniform(pop);
  }
  if (kind == "affine") {
    detail::only_fields(c, {"kind", "weights"}, "affine cost");
    return CostModel::affine(pop, detail::to_vector(detail::field(c, "weights", "affine cost"), "weights"));
  }
  throw InputError("unknown cost kind '" + kind.get<std::string>() + "'");
}

inline CostModel load_cost(const std::string& path, const Population& pop) {
  return parse_cost(parse_json(read_file(path), path), pop);
}

// {"eta": [...]}
inline Strategy parse_strategy(const json& j, std::size_t n) {
  detail::only_fields(j, {"eta"}, "strategy");
  Vector eta = detail::to_vector(detail::field(j, "eta", "strategy"), "eta");
  if (eta.size() != n) throw InputError("strategy length does not match the model");
  return Strategy(std::move(eta));
}

inline Strategy load_strategy(const std::string& path, std::size_t n) {
  return parse_strategy(parse_json(read_file(path), path), n);
}

inline std::string frontier_csv_header(std::size_t n) {
  std::string h = "kind,cost,loss";
  for (std::size_t i = 0; i < n; ++i) h += ",eta_" + std::to_string(i);
  return h + "\n";
}

inline std::string frontier_csv_rows(const Frontier& f) {
  const char* kind = f.kind == FrontierKind::pareto ? "pareto" : "anti";
  std::string out;
  for (const FrontierPoint& p : f.points) {
    out += kind;
    out += "," + format_double(p.cost) + "," + format_double(p.loss);
    for (double v : p.strategy.values()) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

inline json index_list(const IndexSet& s) {
  json a = json::array();
  for (std::size_t v : s) a.push_back(v);
  return a;
}

inline json strategy_json(const Strategy& s) { return json(s.values()); }

}  // namespace refrontier::io
