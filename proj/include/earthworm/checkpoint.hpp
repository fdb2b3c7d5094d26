#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "earthworm/error.hpp"
#include "earthworm/rng.hpp"
#include "earthworm/worm.hpp"

namespace earthworm {

using json = nlohmann::json;

inline constexpr int kCheckpointVersion = 1;

inline std::string rng_to_hex(const Xoshiro256pp& rng) {
  std::string out;
  char buf[17];
  for (std::uint64_t w : rng.state()) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(w));
    out += buf;
  }
  return out;
}

inline Xoshiro256pp rng_from_hex(const std::string& hex) {
  if (hex.size() != 64 || hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    throw FormatError("checkpoint field 'rng': expected 64 hex digits");
  }
  Xoshiro256pp::State s{};
  for (int i = 0; i < 4; ++i) s[i] = std::stoull(hex.substr(16 * i, 16), nullptr, 16);
  return Xoshiro256pp(s);
}

namespace detail {

inline const json& require(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw FormatError(std::string("checkpoint field '") + name + "': missing");
  }
  return obj.at(name);
}

template <class T>
T require_as(const json& obj, const char* name) {
  const json& v = require(obj, name);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("checkpoint field '") + name + "': wrong type");
  }
}

template <int D>
Site<D> site_from_json(const json& item, const char* name) {
  if (!item.is_array() || item.size() != D) {
    throw FormatError(std::string("checkpoint field '") + name + "': site of wrong dimension");
  }
  Site<D> s{};
  for (int a = 0; a < D; ++a) {
    if (!item[a].is_number_integer()) {
      throw FormatError(std::string("checkpoint field '") + name + "': non-integer coordinate");
    }
    s[a] = item[a].get<std::int64_t>();
  }
  return s;
}

template <int D>
std::vector<Site<D>> sites_from_json(const json& arr, const char* name) {
  if (!arr.is_array()) throw FormatError(std::string("checkpoint field '") + name + "': expected array");
  std::vector<Site<D>> out;
  out.reserve(arr.size());
  for (const auto& item : arr) out.push_back(site_from_json<D>(item, name));
  return out;
}

}  // namespace detail

// Self-describing JSON form of a worm. Hole and visit lists are sorted
// lexicographically so the document is a deterministic function of the state.
template <int D>
json worm_to_json(const Worm<D>& worm) {
  json j;
  j["dim"] = D;
  j["position"] = worm.position();
  j["step_count"] = worm.step_count();
  j["rng"] = worm.rng() ? json(rng_to_hex(*worm.rng())) : json(nullptr);
  j["created_total"] = worm.created_total();
  j["tan_total"] = worm.tan_total() ? json(*worm.tan_total()) : json(nullptr);
  j["holes"] = worm.holes_snapshot();
  j["visits"] = worm.visits() ? json(worm.visits()->sorted()) : json(nullptr);
  return j;
}

template <int D>
Worm<D> worm_from_json(const json& j) {
  if (detail::require_as<int>(j, "dim") != D) throw FormatError("checkpoint field 'dim': dimension mismatch");
  const Site<D> position = detail::site_from_json<D>(detail::require(j, "position"), "position");
  const auto step_count = detail::require_as<std::uint64_t>(j, "step_count");
  const json& rng_field = detail::require(j, "rng");
  std::optional<Xoshiro256pp> rng;
  if (!rng_field.is_null()) {
    if (!rng_field.is_string()) throw FormatError("checkpoint field 'rng': wrong type");
    rng = rng_from_hex(rng_field.get<std::string>());
  }
  const auto created = detail::require_as<std::uint64_t>(j, "created_total");
  const json& tan_field = detail::require(j, "tan_total");
  std::optional<std::uint64_t> tan;
  if (!tan_field.is_null()) tan = detail::require_as<std::uint64_t>(j, "tan_total");
  const auto holes = detail::sites_from_json<D>(detail::require(j, "holes"), "holes");
  const json& visits_field = detail::require(j, "visits");
  std::optional<std::vector<Site<D>>> visits;
  if (!visits_field.is_null()) visits = detail::sites_from_json<D>(visits_field, "visits");
  try {
    std::optional<std::span<const Site<D>>> visit_span;
    if (visits) visit_span = std::span<const Site<D>>(*visits);
    return Worm<D>::restore(position, step_count, rng, holes, visit_span, created, tan);
  } catch (const ConsistencyError& e) {
    throw FormatError(std::string("checkpoint field ") + e.what());
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("corrupt checkpoint file " + path.string() + ": " + e.what());
  }
}

// Writes to a sibling temporary and renames, so an interrupted save leaves
// the previous checkpoint intact.
inline void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << doc.dump() << '\n';
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void check_checkpoint_header(const json& doc, const char* kind) {
  const int version = detail::require_as<int>(doc, "format_version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint field 'format_version': unsupported version " + std::to_string(version));
  }
  if (detail::require_as<std::string>(doc, "kind") != kind) {
    throw FormatError(std::string("checkpoint field 'kind': expected '") + kind + "'");
  }
}

template <int D>
void save_worm_checkpoint(const std::filesystem::path& path, const Worm<D>& worm, json run_info = json::object()) {
  json doc;
  doc["format_version"] = kCheckpointVersion;
  doc["kind"] = "run";
  doc["run"] = std::move(run_info);
  doc["state"] = worm_to_json(worm);
  write_json_file(path, doc);
}

template <int D>
Worm<D> load_worm_checkpoint(const std::filesystem::path& path, json* run_info = nullptr) {
  const json doc = read_json_file(path);
  check_checkpoint_header(doc, "run");
  if (run_info) *run_info = detail::require(doc, "run");
  return worm_from_json<D>(detail::require(doc, "state"));
}

// Reads just the dimension of a run checkpoint, for runtime dispatch.
inline int checkpoint_dimension(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  check_checkpoint_header(doc, "run");
  return detail::require_as<int>(detail::require(doc, "state"), "dim");
}

template <int D>
Worm<D> checkpoint_roundtrip(const Worm<D>& worm, const std::filesystem::path& path) {
  save_worm_checkpoint(path, worm);
  return load_worm_checkpoint<D>(path);
}

}  // namespace earthworm
