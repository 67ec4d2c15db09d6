#pragma once

// JSON encodings of the ring elements that appear in data files and
// reports. Keys are emitted sorted (nlohmann's default object map), so a
// dump is a function of the value alone.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lamfam/cyclotomic.hpp"
#include "lamfam/padic.hpp"
#include "lamfam/qexp.hpp"
#include "lamfam/series.hpp"

namespace lamfam::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Canonical text of a JSON value: two-space indent, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// ParseError naming the offending field.
[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(where + "." + key, "missing field");
  return *it;
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    parse_fail(where, e.what());
  }
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& where) {
  return get_as<T>(field(j, key, where), where + "." + key);
}

inline void check_schema(const json& j, const std::string& where) {
  const int v = get_field<int>(j, "schema", where);
  if (v != kSchemaVersion)
    parse_fail(where + ".schema", "version " + std::to_string(v) + ", expected " + std::to_string(kSchemaVersion));
}

inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(source, e.what());
  }
}

// ---- p-adic elements ----

/// [[c0 digits], [c1 digits]], little-endian base p, length = precision.
inline json padic_to_json(const PadicElem& x) {
  return json::array({x.digits(0), x.digits(1)});
}

/// Accepts the digit-pair form or, for integer data, a plain integer.
inline PadicElem padic_from_json(const json& j, std::uint32_t p, int N, const std::string& where) {
  if (j.is_number_integer()) return PadicElem(p, N, j.get<std::int64_t>());
  if (!j.is_array() || j.size() != 2) parse_fail(where, "expected an integer or [[c0 digits], [c1 digits]]");
  const auto d0 = get_as<std::vector<std::uint32_t>>(j[0], where + "[0]");
  const auto d1 = get_as<std::vector<std::uint32_t>>(j[1], where + "[1]");
  try {
    return PadicElem::from_digits(p, N, d0, d1);
  } catch (const DomainError& e) {
    parse_fail(where, e.what());
  }
}

inline json padic_list_to_json(const std::vector<PadicElem>& xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(padic_to_json(x));
  return a;
}

inline std::vector<PadicElem> padic_list_from_json(const json& j, std::uint32_t p, int N, const std::string& where) {
  if (!j.is_array()) parse_fail(where, "expected an array");
  std::vector<PadicElem> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(padic_from_json(j[i], p, N, where + "[" + std::to_string(i) + "]"));
  return out;
}

// ---- cyclotomic integers ----

/// Power-basis coordinates modulo Phi_n.
inline json cyclo_to_json(const CycloInt& x) { return x.coeffs(); }

// ---- q-expansions ----

inline json qexp_to_json(const QExpansion<PadicElem>& f, const std::string& weight_ring) {
  json j;
  j["weight_ring"] = weight_ring;
  j["Q"] = f.cap();
  j["level"] = f.level();
  if (f.weight()) j["weight"] = *f.weight();
  j["coefficients"] = padic_list_to_json(f.coefficients());
  return j;
}

inline json qexp_to_json(const QExpansion<CycloInt>& f) {
  const int n = f.zero_elem().order();
  json j;
  j["weight_ring"] = "Z[zeta_" + std::to_string(n) + "]";
  j["Q"] = f.cap();
  j["level"] = f.level();
  if (f.weight()) j["weight"] = *f.weight();
  json a = json::array();
  for (const auto& c : f.coefficients()) a.push_back(cyclo_to_json(c));
  j["coefficients"] = std::move(a);
  return j;
}

// ---- truncated power series ----

inline const std::vector<std::pair<RingKind, std::string>>& ring_kind_names() {
  static const std::vector<std::pair<RingKind, std::string>> names{{RingKind::Generic, "generic"},
                                                                   {RingKind::Lambda, "lambda"},
                                                                   {RingKind::LambdaCol, "lambda_col"},
                                                                   {RingKind::GroupAlgebra, "group_algebra"},
                                                                   {RingKind::Triple, "triple"}};
  return names;
}

/// {variables, caps, total_cap, kind, prime, precision,
///  monomials: {"e1,e2,..": [[c0 digits], [c1 digits]]}}.
/// Only nonzero coefficients are listed.
inline json series_to_json(const LambdaSeries& s) {
  const SeriesLayout& L = *s.layout();
  json j;
  j["variables"] = L.variables();
  j["caps"] = L.caps();
  j["total_cap"] = L.total_cap();
  for (const auto& [k, name] : ring_kind_names())
    if (k == L.kind()) j["kind"] = name;
  const PadicElem& z = s.coefficients().at(0);
  j["prime"] = z.prime();
  j["precision"] = z.precision();
  json m = json::object();
  for (std::size_t i = 0; i < L.size(); ++i) {
    const PadicElem& c = s.coefficients()[i];
    if (c.is_zero()) continue;
    std::string key;
    for (std::size_t v = 0; v < L.nvars(); ++v) key += (v ? "," : "") + std::to_string(L.monomial(i)[v]);
    m[key] = padic_to_json(c);
  }
  j["monomials"] = std::move(m);
  return j;
}

inline LambdaSeries series_from_json(const json& j, const std::string& where = "series") {
  const auto vars = get_field<std::vector<std::string>>(j, "variables", where);
  const auto caps = get_field<std::vector<int>>(j, "caps", where);
  const int total = get_field<int>(j, "total_cap", where);
  const auto p = get_field<std::uint32_t>(j, "prime", where);
  const int N = get_field<int>(j, "precision", where);
  const auto kind_name = get_field<std::string>(j, "kind", where);
  std::optional<RingKind> kind;
  for (const auto& [k, name] : ring_kind_names())
    if (name == kind_name) kind = k;
  if (!kind) parse_fail(where + ".kind", "unknown ring kind '" + kind_name + "'");
  LayoutPtr L;
  try {
    L = make_layout(vars, caps, total, *kind);
  } catch (const NumericError& e) {
    parse_fail(where, e.what());
  }
  LambdaSeries s(L, PadicElem(p, N));
  const json& m = field(j, "monomials", where);
  if (!m.is_object()) parse_fail(where + ".monomials", "expected an object");
  for (const auto& [key, val] : m.items()) {
    std::vector<int> e;
    std::size_t pos = 0;
    try {
      while (pos <= key.size()) {
        const std::size_t comma = key.find(',', pos);
        e.push_back(std::stoi(key.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    } catch (const std::exception&) {
      parse_fail(where + ".monomials." + key, "malformed exponent vector");
    }
    if (e.size() != vars.size()) parse_fail(where + ".monomials." + key, "exponent vector of wrong length");
    const int idx = L->index_of(e);
    if (idx < 0) parse_fail(where + ".monomials." + key, "monomial outside caps");
    s.set_coeff_index(static_cast<std::size_t>(idx), padic_from_json(val, p, N, where + ".monomials." + key));
  }
  return s;
}

}  // namespace lamfam::io
