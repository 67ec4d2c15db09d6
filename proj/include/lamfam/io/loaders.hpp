#pragma once

// Readers for the JSON data files: character specs, ordinary bases, target
// eigen-data and Heegner point files. Every reader checks the schema
// version and reports the failing field path.

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "lamfam/characters.hpp"
#include "lamfam/elliptic.hpp"
#include "lamfam/io/codec.hpp"
#include "lamfam/io/files.hpp"
#include "lamfam/tate.hpp"
#include "lamfam/triple.hpp"

namespace lamfam::io {

// ---- character specs ----

/// {schema, d_K, c0, r, generator_images}: eta on Cl_K(c0 p^r O_K).
struct CharacterSpec {
  std::string label;
  std::int64_t d_K = 0;
  std::int64_t c0 = 1;
  int r = 1;
  std::vector<std::int64_t> generator_images;
};

inline CharacterSpec parse_character_spec(const json& j, const std::string& where) {
  check_schema(j, where);
  CharacterSpec s;
  s.label = j.contains("label") ? get_field<std::string>(j, "label", where) : std::string("eta");
  s.d_K = get_field<std::int64_t>(j, "d_K", where);
  s.c0 = get_field<std::int64_t>(j, "c0", where);
  s.r = get_field<int>(j, "r", where);
  s.generator_images = get_field<std::vector<std::int64_t>>(j, "generator_images", where);
  if (s.d_K <= 0) parse_fail(where + ".d_K", "must be positive");
  if (s.c0 < 1) parse_fail(where + ".c0", "must be >= 1");
  if (s.r < 0) parse_fail(where + ".r", "must be >= 0");
  return s;
}

/// Ray class contexts shared between characters on the same modulus, so that
/// eta_1 and eta_2 can be multiplied.
class CharacterStore {
 public:
  explicit CharacterStore(std::uint32_t p) : p_(p) {}

  std::shared_ptr<const QuadField> field(std::int64_t d) {
    auto it = fields_.find(d);
    if (it != fields_.end()) return it->second;
    return fields_[d] = std::make_shared<const QuadField>(d);
  }

  HeckeChar build(const CharacterSpec& s, const std::string& where) {
    auto K = field(s.d_K);
    const auto key = std::make_tuple(s.d_K, s.c0, s.r);
    auto it = contexts_.find(key);
    if (it == contexts_.end()) {
      const std::int64_t m = s.c0 * static_cast<std::int64_t>(detail::checked_pow(p_, s.r));
      it = contexts_.emplace(key, make_ray_context(K, K->principal({m, 0}))).first;
    }
    const std::size_t rank = it->second->G->structure().rank();
    if (s.generator_images.size() != rank)
      parse_fail(where + ".generator_images",
                 "expected " + std::to_string(rank) + " entries, got " + std::to_string(s.generator_images.size()));
    return HeckeChar(it->second, s.generator_images);
  }

 private:
  std::uint32_t p_;
  std::map<std::int64_t, std::shared_ptr<const QuadField>> fields_;
  std::map<std::tuple<std::int64_t, std::int64_t, int>, std::shared_ptr<const RayContext>> contexts_;
};

inline CharacterSpec load_character_spec(const fs::path& path) {
  return parse_character_spec(parse_text(read_text(path), path.string()), path.string());
}

// ---- ordinary bases ----

struct BasisFile {
  std::uint32_t p = 0;
  int N = 0;
  int weight = 0;
  OrdinaryBasis basis;
};

inline std::map<std::int64_t, PadicElem> eigenvalues_from_json(const json& j, std::uint32_t p, int N, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object keyed by primes");
  std::map<std::int64_t, PadicElem> ev;
  for (const auto& [key, val] : j.items()) {
    std::int64_t ell = 0;
    try {
      ell = std::stoll(key);
    } catch (const std::exception&) {
      parse_fail(where + "." + key, "key is not an integer");
    }
    if (ell < 2 || !detail::is_prime(static_cast<std::uint64_t>(ell))) parse_fail(where + "." + key, "key is not a prime");
    ev.emplace(ell, padic_from_json(val, p, N, where + "." + key));
  }
  return ev;
}

inline json eigenvalues_to_json(const std::map<std::int64_t, PadicElem>& ev) {
  json j = json::object();
  for (const auto& [ell, v] : ev) j[std::to_string(ell)] = padic_to_json(v);
  return j;
}

/// Largest prime at which stored eigenvalues are checked against the Hecke
/// action on the stored expansion.
inline constexpr std::int64_t kEigenCheckBound = 13;

/// T_l f = lambda_l f for trivial nebentypus, on the coefficients T_l can reach.
inline void check_eigenvalues(const BasisLine& line, int weight) {
  const auto& f = line.q;
  for (const auto& [ell, lambda] : line.eigenvalues) {
    if (ell > kEigenCheckBound || f.level() % ell == 0) continue;
    const PadicElem t = lambda.scalar(ell).pow(static_cast<std::uint64_t>(weight - 1));
    const auto Tf = hecke_T(ell, f, t);
    const auto lf = f.truncate(Tf.cap()).scaled(lambda);
    if (Tf == lf) continue;
    const PadicElem& a1 = f[1];
    const PadicElem found = a1.is_unit() ? f[ell] * a1.inverse() : f[ell];
    throw EigenMismatch(static_cast<long>(ell), lambda.to_string(), found.to_string() + " (line " + line.label + ")");
  }
}

/// {schema, prime, precision, weight, lines: [{label, level, eigenvalues, coefficients}]}.
inline BasisFile parse_eigenbasis(const json& j, const std::string& where) {
  check_schema(j, where);
  BasisFile B;
  B.p = get_field<std::uint32_t>(j, "prime", where);
  B.N = get_field<int>(j, "precision", where);
  B.weight = get_field<int>(j, "weight", where);
  if (B.weight < 1) parse_fail(where + ".weight", "must be >= 1");
  const json& lines = field(j, "lines", where);
  if (!lines.is_array() || lines.empty()) parse_fail(where + ".lines", "expected a non-empty array");
  std::vector<BasisLine> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string w = where + ".lines[" + std::to_string(i) + "]";
    BasisLine L;
    L.label = get_field<std::string>(lines[i], "label", w);
    const auto level = get_field<std::int64_t>(lines[i], "level", w);
    auto coeffs = padic_list_from_json(field(lines[i], "coefficients", w), B.p, B.N, w + ".coefficients");
    if (coeffs.size() < 2) parse_fail(w + ".coefficients", "need at least a_0 and a_1");
    L.q = QExpansion<PadicElem>(std::move(coeffs), level);
    L.q.set_weight(B.weight);
    L.eigenvalues = eigenvalues_from_json(field(lines[i], "eigenvalues", w), B.p, B.N, w + ".eigenvalues");
    check_eigenvalues(L, B.weight);
    out.push_back(std::move(L));
  }
  B.basis = OrdinaryBasis(std::move(out));
  return B;
}

inline BasisFile load_eigenbasis(const fs::path& path) {
  return parse_eigenbasis(parse_text(read_text(path), path.string()), path.string());
}

inline json eigenbasis_to_json(const OrdinaryBasis& B, int weight) {
  const PadicElem& z = B.zero();
  json j;
  j["schema"] = kSchemaVersion;
  j["prime"] = z.prime();
  j["precision"] = z.precision();
  j["weight"] = weight;
  json lines = json::array();
  for (std::size_t i = 0; i < B.size(); ++i) {
    const auto& L = B.line(i);
    json l;
    l["label"] = L.label;
    l["level"] = L.q.level();
    l["eigenvalues"] = eigenvalues_to_json(L.eigenvalues);
    l["coefficients"] = padic_list_to_json(L.q.coefficients());
    lines.push_back(std::move(l));
  }
  j["lines"] = std::move(lines);
  return j;
}

// ---- target eigen-data ----

inline EigenData parse_eigendata(const json& j, std::uint32_t p, int N, const std::string& where) {
  check_schema(j, where);
  EigenData f;
  f.label = get_field<std::string>(j, "label", where);
  f.level = get_field<std::int64_t>(j, "level", where);
  f.tame_level = get_field<std::int64_t>(j, "tame_level", where);
  f.s = get_field<int>(j, "s", where);
  f.weight = get_field<int>(j, "weight", where);
  f.eigenvalues = eigenvalues_from_json(field(j, "eigenvalues", where), p, N, where + ".eigenvalues");
  f.a_p = padic_from_json(field(j, "a_p", where), p, N, where + ".a_p");
  f.lambda_N = padic_from_json(field(j, "lambda_N", where), p, N, where + ".lambda_N");
  f.eta_f = padic_from_json(field(j, "eta_f", where), p, N, where + ".eta_f");
  f.p_new = get_field<bool>(j, "p_new", where);
  if (j.contains("ordinary")) f.ordinary = get_field<bool>(j, "ordinary", where);
  if (j.contains("trivial_character")) f.trivial_character = get_field<bool>(j, "trivial_character", where);
  f.validate();
  return f;
}

inline EigenData load_eigendata(const fs::path& path, std::uint32_t p, int N) {
  return parse_eigendata(parse_text(read_text(path), path.string()), p, N, path.string());
}

inline json eigendata_to_json(const EigenData& f) {
  json j;
  j["schema"] = kSchemaVersion;
  j["label"] = f.label;
  j["level"] = f.level;
  j["tame_level"] = f.tame_level;
  j["s"] = f.s;
  j["weight"] = f.weight;
  j["eigenvalues"] = eigenvalues_to_json(f.eigenvalues);
  j["a_p"] = padic_to_json(f.a_p);
  j["lambda_N"] = padic_to_json(f.lambda_N);
  j["eta_f"] = padic_to_json(f.eta_f);
  j["p_new"] = f.p_new;
  j["ordinary"] = f.ordinary;
  j["trivial_character"] = f.trivial_character;
  return j;
}

// ---- Heegner point files ----

struct LabeledPoint {
  std::string label;
  HeegnerPointData data;
};

struct PointFile {
  Weierstrass curve;
  std::vector<LabeledPoint> points;
};

inline PadicNumber padic_number_from_json(const json& j, std::uint32_t p, int N, const std::string& where) {
  const PadicElem x = padic_from_json(j, p, N, where);
  if (x.is_zero()) parse_fail(where, "u-coordinate is zero mod p^" + std::to_string(N));
  return PadicNumber::from(x);
}

/// {schema, curve: [a1, a2, a3, a4, a6], points: [{label, u, u_frob?, phi: {quadratic, phi1_p}}]}.
inline PointFile parse_points(const json& j, std::uint32_t p, int N, const std::string& where) {
  check_schema(j, where);
  PointFile F;
  const auto a = get_field<std::vector<std::int64_t>>(j, "curve", where);
  if (a.size() != 5) parse_fail(where + ".curve", "expected [a1, a2, a3, a4, a6]");
  F.curve = Weierstrass{a[0], a[1], a[2], a[3], a[4]};
  if (F.curve.discriminant() == 0) parse_fail(where + ".curve", "singular curve");
  const json& pts = field(j, "points", where);
  if (!pts.is_array()) parse_fail(where + ".points", "expected an array");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string w = where + ".points[" + std::to_string(i) + "]";
    LabeledPoint P;
    P.label = get_field<std::string>(pts[i], "label", w);
    P.data.u = padic_number_from_json(field(pts[i], "u", w), p, N, w + ".u");
    if (pts[i].contains("u_frob")) P.data.u_frob = padic_number_from_json(pts[i]["u_frob"], p, N, w + ".u_frob");
    const json& phi = field(pts[i], "phi", w);
    P.data.quadratic = get_field<bool>(phi, "quadratic", w + ".phi");
    P.data.phi1_p = phi.contains("phi1_p") ? get_field<int>(phi, "phi1_p", w + ".phi") : 1;
    if (P.data.phi1_p != 1 && P.data.phi1_p != -1) parse_fail(w + ".phi.phi1_p", "must be +1 or -1");
    F.points.push_back(std::move(P));
  }
  return F;
}

inline PointFile load_points(const fs::path& path, std::uint32_t p, int N) {
  return parse_points(parse_text(read_text(path), path.string()), p, N, path.string());
}

}  // namespace lamfam::io
