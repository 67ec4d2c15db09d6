#pragma once

// Pipeline configuration (TOML) and the standing-hypothesis validations run
// before any computation.

#include <array>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lamfam/io/loaders.hpp"
#include "lamfam/theta.hpp"
#include "toml.hpp"

namespace lamfam::io {

struct BasisEntry {
  int weight = 0;
  fs::path basis;
  fs::path target;
};

struct PipelineConfig {
  fs::path source;  // the TOML file; relative paths resolve against its directory
  std::uint32_t p = 5;
  int N = 8;
  int Q = 200;
  int threads = 1;

  std::optional<std::int64_t> d_K;
  std::optional<fs::path> eta1, eta2;
  std::optional<std::int64_t> tame_level;  // N_f

  std::vector<int> theta_weights{1};
  std::string family_kind = "both";
  std::vector<int> family_weights;
  std::vector<int> ordproj_theta_weights;
  std::vector<std::array<int, 3>> ordproj_triple_weights;

  // triple product
  std::int64_t twist_a = 1;
  std::optional<std::int64_t> M;
  std::vector<std::int64_t> fudge;
  std::vector<std::array<int, 3>> triple_weights;
  std::optional<int> triple_Q;
  std::vector<BasisEntry> bases;

  std::string euler_grid = "default";
  std::optional<fs::path> tate_points;
};

/// Command-line overrides; unset fields keep the file's values.
struct Overrides {
  std::optional<int> precision, qcap, threads;
};

namespace detail_cfg {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

template <class T>
std::optional<T> opt(const toml::node_view<const toml::node>& n, const std::string& where) {
  if (!n) return std::nullopt;
  auto v = n.value<T>();
  if (!v) fail(where, "wrong type");
  return *v;
}

inline std::vector<int> int_list(const toml::node_view<const toml::node>& n, const std::string& where) {
  std::vector<int> out;
  if (!n) return out;
  const auto* a = n.as_array();
  if (!a) fail(where, "expected an array of integers");
  for (std::size_t i = 0; i < a->size(); ++i) {
    auto v = (*a)[i].value<std::int64_t>();
    if (!v) fail(where + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

inline std::vector<std::array<int, 3>> triple_list(const toml::node_view<const toml::node>& n, const std::string& where) {
  std::vector<std::array<int, 3>> out;
  if (!n) return out;
  const auto* a = n.as_array();
  if (!a) fail(where, "expected an array of [k_x, k_y, k_z]");
  for (std::size_t i = 0; i < a->size(); ++i) {
    const auto w = where + "[" + std::to_string(i) + "]";
    const auto v = int_list(toml::node_view<const toml::node>(&(*a)[i]), w);
    if (v.size() != 3) fail(w, "expected three weights");
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

}  // namespace detail_cfg

inline PipelineConfig parse_config(const std::string& text, const fs::path& source, const Overrides& ov = {}) {
  using namespace detail_cfg;
  toml::table t;
  try {
    t = toml::parse(text, source.string());
  } catch (const toml::parse_error& e) {
    const auto& b = e.source().begin;
    throw ParseError(source.string() + ":" + std::to_string(b.line) + ":" + std::to_string(b.column) + ": " +
                     std::string(e.description()));
  }
  const toml::node_view<const toml::node> root(t);
  const fs::path dir = source.has_parent_path() ? source.parent_path() : fs::path(".");
  auto path_of = [&](const toml::node_view<const toml::node>& n, const std::string& where) -> std::optional<fs::path> {
    auto s = opt<std::string>(n, where);
    if (!s) return std::nullopt;
    return dir / *s;
  };

  PipelineConfig c;
  c.source = source;
  const auto p = opt<std::int64_t>(root["prime"], "prime");
  if (!p) fail("prime", "missing field");
  if (*p < 3 || *p > 1000) fail("prime", "out of range");
  c.p = static_cast<std::uint32_t>(*p);
  c.N = static_cast<int>(opt<std::int64_t>(root["precision"], "precision").value_or(8));
  c.Q = static_cast<int>(opt<std::int64_t>(root["qcap"], "qcap").value_or(200));
  c.threads = static_cast<int>(opt<std::int64_t>(root["threads"], "threads").value_or(1));
  if (ov.precision) c.N = *ov.precision;
  if (ov.qcap) c.Q = *ov.qcap;
  if (ov.threads) c.threads = *ov.threads;
  if (c.N < 1) fail("precision", "must be >= 1");
  if (c.Q < 1) fail("qcap", "must be >= 1");
  if (c.threads < 1) fail("threads", "must be >= 1");

  c.d_K = opt<std::int64_t>(root["field"]["d_K"], "field.d_K");
  c.eta1 = path_of(root["characters"]["eta1"], "characters.eta1");
  c.eta2 = path_of(root["characters"]["eta2"], "characters.eta2");
  c.tame_level = opt<std::int64_t>(root["f"]["tame_level"], "f.tame_level");

  if (root["theta"]["weights"]) c.theta_weights = int_list(root["theta"]["weights"], "theta.weights");
  c.family_kind = opt<std::string>(root["family"]["kind"], "family.kind").value_or("both");
  if (c.family_kind != "hida" && c.family_kind != "col" && c.family_kind != "both")
    fail("family.kind", "expected hida, col or both, got '" + c.family_kind + "'");
  c.family_weights = int_list(root["family"]["weights"], "family.weights");
  c.ordproj_theta_weights = int_list(root["ordproj"]["theta_weights"], "ordproj.theta_weights");
  c.ordproj_triple_weights = triple_list(root["ordproj"]["triple_weights"], "ordproj.triple_weights");

  const auto tr = root["triple"];
  c.twist_a = opt<std::int64_t>(tr["a"], "triple.a").value_or(1);
  c.M = opt<std::int64_t>(tr["M"], "triple.M");
  for (int v : int_list(tr["fudge"], "triple.fudge")) c.fudge.push_back(v);
  c.triple_weights = triple_list(tr["weights"], "triple.weights");
  if (auto q = opt<std::int64_t>(tr["qcap"], "triple.qcap")) c.triple_Q = static_cast<int>(*q);
  if (tr["basis"]) {
    const auto* a = tr["basis"].as_array();
    if (!a) fail("triple.basis", "expected an array of tables");
    for (std::size_t i = 0; i < a->size(); ++i) {
      const std::string w = "triple.basis[" + std::to_string(i) + "]";
      const toml::node_view<const toml::node> b(&(*a)[i]);
      if (!b.as_table()) fail(w, "expected a table");
      BasisEntry e;
      const auto k = opt<std::int64_t>(b["weight"], w + ".weight");
      if (!k) fail(w + ".weight", "missing field");
      e.weight = static_cast<int>(*k);
      auto bp = path_of(b["file"], w + ".file");
      auto tp = path_of(b["target"], w + ".target");
      if (!bp) fail(w + ".file", "missing field");
      if (!tp) fail(w + ".target", "missing field");
      e.basis = *bp;
      e.target = *tp;
      c.bases.push_back(std::move(e));
    }
  }

  c.euler_grid = opt<std::string>(root["euler"]["grid"], "euler.grid").value_or("default");
  if (c.euler_grid != "default") fail("euler.grid", "only the default grid is available, got '" + c.euler_grid + "'");
  c.tate_points = path_of(root["tate"]["points"], "tate.points");
  return c;
}

inline PipelineConfig load_config(const fs::path& path, const Overrides& ov = {}) { return parse_config(read_text(path), path, ov); }

// ---- standing hypotheses ----

/// ValidationFailed naming the violated clause.
[[noreturn]] inline void clause_fail(const std::string& clause, const std::string& what) {
  throw ValidationFailed("clause '" + clause + "': " + what);
}

inline std::vector<std::int64_t> prime_factors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t q = 2; q * q <= n; ++q)
    if (n % q == 0) {
      out.push_back(q);
      while (n % q == 0) n /= q;
    }
  if (n > 1) out.push_back(n);
  return out;
}

/// Characters and field resolved from a validated configuration.
struct ValidatedSetting {
  std::shared_ptr<const QuadField> K;
  std::optional<HeckeChar> eta1, eta2;
  std::optional<CharacterSpec> spec1, spec2;
};

/// c with conductor c p^r O_K, or clause failure.
inline std::int64_t check_conductor_shape(const HeckeChar& eta, const CharacterSpec& s, std::uint32_t p, const std::string& name) {
  if (s.r < 1) clause_fail("conductor-shape", name + " has r = " + std::to_string(s.r) + "; need r >= 1");
  if (eta.conductor() != eta.group().modulus())
    clause_fail("conductor-shape", name + " has conductor " + eta.conductor().to_string() + ", not c p^r O_K with c = " +
                                       std::to_string(s.c0) + ", r = " + std::to_string(s.r));
  if (s.c0 % static_cast<std::int64_t>(p) == 0) clause_fail("conductor-shape", name + ": c is divisible by p");
  return s.c0;
}

/// Runs every check whose data is present in the configuration, in a fixed
/// order, and throws at the first violated clause.
inline ValidatedSetting validate_setting(const PipelineConfig& c, CharacterStore& store) {
  ValidatedSetting V;
  const std::uint32_t p = c.p;
  if (!detail::is_prime(p) || p < 5) clause_fail("p-at-least-5", "p = " + std::to_string(p) + " must be a prime >= 5");

  std::optional<std::int64_t> d = c.d_K;
  std::vector<CharacterSpec> specs;
  for (const auto& path : {c.eta1, c.eta2})
    if (path) specs.push_back(load_character_spec(*path));
  for (const auto& s : specs) {
    if (d && *d != s.d_K) clause_fail("field", "character " + s.label + " lives over d_K = " + std::to_string(s.d_K) + ", config says " + std::to_string(*d));
    d = s.d_K;
  }
  if (d) {
    if (*d % 4 != 3 || !detail::is_squarefree(*d)) clause_fail("odd-discriminant", "-" + std::to_string(*d) + " is not an odd fundamental discriminant");
    V.K = store.field(*d);
    if (V.K->splitting(p).kind != Splitting::Inert) clause_fail("p-inert", std::to_string(p) + " is not inert in K");
    if (V.K->class_number() % static_cast<std::int64_t>(p) == 0)
      clause_fail("p-prime-to-class-number", "p divides h_K = " + std::to_string(V.K->class_number()));
  }
  if (c.tame_level) {
    const std::int64_t Nf = *c.tame_level;
    if (Nf < 1 || !detail::is_squarefree(Nf)) clause_fail("tame-level-squarefree", "N_f = " + std::to_string(Nf) + " is not squarefree");
    if (Nf % static_cast<std::int64_t>(p) == 0) clause_fail("tame-level-coprime", "p divides N_f");
    if (V.K) {
      if (std::gcd(Nf, V.K->d()) != 1) clause_fail("tame-level-coprime", "N_f and d_K share a factor");
      int inert = 0;
      for (auto q : prime_factors(Nf))
        if (V.K->splitting(q).kind == Splitting::Inert) ++inert;
      if (inert % 2 == 0) clause_fail("heegner-parity", "N_f^- has " + std::to_string(inert) + " prime factors; need an odd number");
    }
  }

  std::vector<HeckeChar> etas;
  std::optional<std::int64_t> c_common;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const std::string name = "eta" + std::to_string(i + 1);
    const std::string where = (i == 0 ? *c.eta1 : *c.eta2).string();
    HeckeChar eta = store.build(specs[i], where);
    const std::int64_t cc = check_conductor_shape(eta, specs[i], p, name);
    if (c_common && (*c_common != cc || specs[i].r != specs[0].r))
      clause_fail("conductor-shape", "eta1 and eta2 have different conductors");
    c_common = cc;
    if (!differs_from_conjugate(eta)) clause_fail("not-dihedral-induced", name + " equals its conjugate (induced from a Dirichlet character)");
    etas.push_back(eta);
  }
  if (c_common) {
    if (c.tame_level && std::gcd(*c_common, *c.tame_level) != 1) clause_fail("c-coprime", "c and N_f share a factor");
    for (auto q : prime_factors(*c_common))
      if (V.K->splitting(q).kind != Splitting::Split) clause_fail("c-split", "prime " + std::to_string(q) + " | c is not split in K");
  }
  if (etas.size() == 2) {
    const HeckeChar& a = etas[0];
    const HeckeChar& b = etas[1];
    const std::int64_t m = a.group().modulus().norm();
    for (std::int64_t n = 1; n <= m; ++n) {
      if (!V.K->coprime(V.K->principal({n, 0}), a.group().modulus())) continue;
      // e_a / M_a + e_b / M_b must be an integer
      const std::int64_t Ma = a.value_order(), Mb = b.value_order();
      if ((a.central_exponent(n) * Mb + b.central_exponent(n) * Ma) % (Ma * Mb) != 0)
        clause_fail("self-duality", "central characters of eta1 and eta2 are not inverse (at n = " + std::to_string(n) + ")");
    }
  }
  for (std::size_t i = 0; i < c.fudge.size(); ++i)
    if (c.fudge[i] % static_cast<std::int64_t>(p) == 0) clause_fail("fudge-units", "fudge factor " + std::to_string(c.fudge[i]) + " is not a p-adic unit");

  if (!etas.empty()) {
    V.eta1 = etas[0];
    V.spec1 = specs[0];
  }
  if (etas.size() == 2) {
    V.eta2 = etas[1];
    V.spec2 = specs[1];
  }
  return V;
}

}  // namespace lamfam::io
