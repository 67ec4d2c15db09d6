#pragma once

// The CLI verbs as functions from a configuration to payload files. Payloads
// carry no timestamps or paths of the run, so equal inputs give equal bytes.

#include <functional>
#include <iomanip>
#include <numeric>
#include <map>
#include <sstream>
#include <string>

#include "lamfam/euler.hpp"
#include "lamfam/io/config.hpp"
#include "lamfam/tate.hpp"
#include "lamfam/theta.hpp"
#include "lamfam/triple.hpp"

namespace lamfam::io {

struct Outputs {
  std::map<std::string, std::string> files;  // name -> content
  bool ok = true;                            // false when a self-check failed
};

inline void write_outputs(const Outputs& o, const fs::path& dir) {
  for (const auto& [name, content] : o.files) atomic_write(dir / name, content);
}

/// A validated configuration with its resolved characters.
struct Session {
  PipelineConfig cfg;
  CharacterStore store;
  ValidatedSetting setting;
  std::optional<fs::path> cache_dir;

  explicit Session(PipelineConfig c, std::optional<fs::path> cache = std::nullopt)
      : cfg(std::move(c)), store(cfg.p), setting(validate_setting(cfg, store)), cache_dir(std::move(cache)) {}

  const HeckeChar& eta1() const {
    if (!setting.eta1) throw ParseError(cfg.source.string() + ": characters.eta1: missing field");
    return *setting.eta1;
  }
  const HeckeChar& eta2() const { return setting.eta2 ? *setting.eta2 : eta1(); }
  std::shared_ptr<const LambdaChar> lambda() const { return std::make_shared<const LambdaChar>(setting.K, cfg.p, cfg.N); }
};

namespace detail_cmd {

inline json header(const Session& s, const std::string& verb) {
  json j;
  j["schema"] = kSchemaVersion;
  j["command"] = verb;
  j["prime"] = s.cfg.p;
  j["precision"] = s.cfg.N;
  return j;
}

inline std::string weight_ring(std::uint32_t p, int N) { return "Z_" + std::to_string(p) + "^2 mod " + std::to_string(p) + "^" + std::to_string(N); }

inline json triple_json(const TripleWeight& w) { return json::array({w.kx, w.ky, w.kz}); }

}  // namespace detail_cmd

// ---- theta ----

inline Outputs cmd_theta(const Session& s) {
  const HeckeChar& eta = s.eta1();
  const int Q = s.cfg.Q;
  const QuadField& K = eta.field();
  const auto ideals = s.cache_dir ? cached_ideals(K, Q, *s.cache_dir) : K.enumerate_ideals(Q);
  json j = detail_cmd::header(s, "theta");
  j["character"] = s.setting.spec1->label;
  j["d_K"] = K.d();
  json ex = json::array();
  std::shared_ptr<const LambdaChar> lam;
  for (int k : s.cfg.theta_weights) {
    if (k == 1) {
      ex.push_back(qexp_to_json(theta_exact(eta, Q, ideals)));
    } else {
      if (!lam) lam = s.lambda();
      ex.push_back(qexp_to_json(theta_classical(eta, *lam, k, Q, s.cfg.threads), detail_cmd::weight_ring(s.cfg.p, s.cfg.N)));
    }
  }
  j["expansions"] = std::move(ex);
  return {{{"theta.json", dump(j)}}, true};
}

// ---- families ----

inline Outputs cmd_family(const Session& s) {
  const HeckeChar& eta = s.eta1();
  const auto lam = s.lambda();
  const int Q = s.cfg.Q;
  json j = detail_cmd::header(s, "family");
  j["kind"] = s.cfg.family_kind;
  j["Q"] = Q;
  json rows = json::array();
  std::optional<HidaFamily> H;
  std::optional<ColFamily> C;
  if (s.cfg.family_kind != "col") H = build_g_hida(eta, lam, Q, 2, s.cfg.threads);
  if (s.cfg.family_kind != "hida") C = build_g_col(eta, lam, Q, -1, s.cfg.threads);
  for (int k : s.cfg.family_weights) {
    const auto classical = theta_classical(eta, *lam, k, Q, s.cfg.threads);
    auto emit = [&](const std::string& name, const QExpansion<PadicElem>& g) {
      if (g != classical) throw InconsistencyFound(name + " family disagrees with the classical theta series at k = " + std::to_string(k));
      json r;
      r["family"] = name;
      r["weight"] = k;
      r["expansion"] = qexp_to_json(g, detail_cmd::weight_ring(s.cfg.p, s.cfg.N));
      rows.push_back(std::move(r));
    };
    if (H) emit("hida", specialize_family(*H, Weight::group(k)));
    if (C) emit("col", specialize_family(*C, Weight::arithmetic(k)));
  }
  j["specializations"] = std::move(rows);
  return {{{"family.json", dump(j)}}, true};
}

// ---- triple product pipeline ----

/// Pipeline assembled from the configuration: Hida theta families of eta1
/// and eta2, ingested ordinary bases and targets.
inline TriplePipeline build_pipeline(const Session& s) {
  const auto& c = s.cfg;
  if (!c.tame_level) throw ParseError(c.source.string() + ": f.tame_level: missing field");
  if (c.bases.empty()) throw ParseError(c.source.string() + ": triple.basis: missing field");
  const int Q = c.triple_Q.value_or(c.Q);
  const auto lam = s.lambda();
  const HidaFamily Hg = build_g_hida(s.eta1(), lam, Q, 2, c.threads);
  const HidaFamily Hh = s.setting.eta2 ? build_g_hida(s.eta2(), lam, Q, 2, c.threads) : Hg;
  TriplePipeline P;
  auto f_coords = std::make_shared<const UnitCoordinates>(c.p, c.N, 1, 2);
  P.theta = std::make_shared<const TwistChar>(c.twist_a, c.N, f_coords, Hg.coords, Hh.coords);
  P.xi = build_xi(Hg.q, Hh.q, *P.theta);
  P.Nf = *c.tame_level;
  const std::int64_t cc = s.setting.spec1 ? s.setting.spec1->c0 : 1;
  P.M = c.M.value_or(P.Nf * s.setting.K->d() * cc * cc);
  for (auto f : c.fudge) P.fudge.push_back(PadicElem(c.p, c.N, f));
  for (const auto& e : c.bases) {
    BasisFile B = load_eigenbasis(e.basis);
    if (B.p != c.p) parse_fail(e.basis.string() + ".prime", "file has p = " + std::to_string(B.p) + ", config has " + std::to_string(c.p));
    if (B.N != c.N) parse_fail(e.basis.string() + ".precision", "file has N = " + std::to_string(B.N) + ", config has " + std::to_string(c.N));
    if (B.weight != e.weight) parse_fail(e.basis.string() + ".weight", "file has weight " + std::to_string(B.weight) + ", config has " + std::to_string(e.weight));
    EigenData f = load_eigendata(e.target, c.p, c.N);
    if (f.weight != e.weight) parse_fail(e.target.string() + ".weight", "target weight differs from its basis");
    if (f.tame_level != P.Nf)
      clause_fail("target-tame-level", "target " + f.label + " has tame level " + std::to_string(f.tame_level) + ", config has N_f = " + std::to_string(P.Nf));
    P.bases.emplace(e.weight, std::move(B.basis));
    P.targets.emplace(e.weight, std::move(f));
  }
  return P;
}

inline TripleWeight to_weight(const std::array<int, 3>& w) { return {w[0], w[1], w[2]}; }

inline Outputs cmd_ordproj(const Session& s) {
  json j = detail_cmd::header(s, "ordproj");
  json th = json::array();
  if (!s.cfg.ordproj_theta_weights.empty()) {
    const auto lam = s.lambda();
    for (int k : s.cfg.ordproj_theta_weights) {
      const auto g = theta_classical(s.eta1(), *lam, k, s.cfg.Q, s.cfg.threads);
      json r;
      r["weight"] = k;
      r["U_p_vanishes"] = hecke_U(s.cfg.p, g).is_zero();
      r["ordinary_part_vanishes"] = ord_project(s.cfg.p, g).is_zero();
      th.push_back(std::move(r));
    }
  }
  j["theta"] = std::move(th);
  json xs = json::array();
  if (!s.cfg.ordproj_triple_weights.empty()) {
    const TriplePipeline P = build_pipeline(s);
    for (const auto& wa : s.cfg.ordproj_triple_weights) {
      const TripleWeight w = to_weight(wa);
      auto it = P.bases.find(w.kx);
      if (it == P.bases.end()) throw DomainError("no ordinary basis at k_x = " + std::to_string(w.kx));
      const OrdinaryBasis& B = it->second;
      const auto xi_w = specialize_xi(P.xi, *P.theta, w, s.cfg.threads).truncate(B.cap());
      json r;
      r["weight"] = detail_cmd::triple_json(w);
      json lines = json::array();
      for (std::size_t i = 0; i < B.size(); ++i) lines.push_back(B.line(i).label);
      r["lines"] = std::move(lines);
      r["coordinates"] = padic_list_to_json(B.coordinates(xi_w));
      xs.push_back(std::move(r));
    }
  }
  j["xi"] = std::move(xs);
  return {{{"ordproj.json", dump(j)}}, true};
}

inline Outputs cmd_triple(const Session& s) {
  const TriplePipeline P = build_pipeline(s);
  json j = detail_cmd::header(s, "triple");
  j["M"] = P.M;
  j["N_f"] = P.Nf;
  j["certified_precision"] = s.cfg.N;
  json samples = json::array(), values = json::array();
  for (const auto& wa : s.cfg.triple_weights) {
    const TripleWeight w = to_weight(wa);
    const PipelineValue v = evaluate(P, w, s.cfg.threads);
    samples.push_back(detail_cmd::triple_json(w));
    json r;
    r["weight"] = detail_cmd::triple_json(w);
    r["value"] = padic_to_json(v.value);
    r["coordinate"] = padic_to_json(v.projection.coordinate);
    r["constant"] = padic_to_json(v.projection.constant);
    r["line"] = P.bases.at(w.kx).line(v.projection.line).label;
    r["t"] = v.t;
    values.push_back(std::move(r));
  }
  j["sample_weights"] = std::move(samples);
  j["values"] = std::move(values);
  return {{{"triple.json", dump(j)}}, true};
}

// ---- Euler factors ----

inline Outputs cmd_euler(const Session& s) {
  const auto rows = consistency_check(default_grid(s.cfg.p, s.cfg.N));
  std::vector<std::array<std::string, 9>> table;
  table.push_back({"k", "n", "form", "a_p", "eta", "local", "multiplier", "W", "ok"});
  std::size_t failures = 0;
  for (const auto& r : rows) {
    if (!r.ok) ++failures;
    table.push_back({std::to_string(r.input.k), std::to_string(r.input.n), r.input.form == FormType::PNew ? "p-new" : "p-old",
                     r.input.a_p.to_string(), r.input.eta ? r.input.eta->label() : "-", r.local.to_string(),
                     r.multiplier.to_string(), r.W ? r.W->value.to_string() : "-", r.ok ? "yes" : "NO"});
  }
  std::string csv;
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const bool quote = row[i].find(',') != std::string::npos;
      csv += (i ? "," : "") + (quote ? "\"" + row[i] + "\"" : row[i]);
    }
    csv += "\n";
  }
  std::array<std::size_t, 9> width{};
  for (const auto& row : table)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream txt;
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      txt << std::left << std::setw(static_cast<int>(width[i])) << row[i];
      if (i + 1 < row.size()) txt << "  ";
    }
    txt << "\n";
  }
  std::string aligned = txt.str();
  // drop the padding of the last column
  std::string trimmed;
  std::istringstream in(aligned);
  for (std::string line; std::getline(in, line);) {
    line.erase(line.find_last_not_of(' ') + 1);
    trimmed += line + "\n";
  }
  json j = detail_cmd::header(s, "euler");
  j["grid"] = s.cfg.euler_grid;
  j["rows"] = rows.size();
  j["failures"] = failures;
  return {{{"euler.csv", csv}, {"euler.txt", trimmed}, {"euler.json", dump(j)}}, failures == 0};
}

// ---- Tate curves and Heegner points ----

inline std::string log_class(const HeegnerLogs& L) {
  if (L.plus.is_zero() && L.minus.is_zero()) return "torsion";
  if (L.minus.is_zero()) return "plus";
  if (L.plus.is_zero()) return "minus";
  return "mixed";
}

inline Outputs cmd_tate(const Session& s) {
  if (!s.cfg.tate_points) throw ParseError(s.cfg.source.string() + ": tate.points: missing field");
  const PointFile F = load_points(*s.cfg.tate_points, s.cfg.p, s.cfg.N);
  const TateCurve T = tate_curve(F.curve, s.cfg.p, s.cfg.N);
  json j = detail_cmd::header(s, "tate");
  j["curve"] = {F.curve.a1, F.curve.a2, F.curve.a3, F.curve.a4, F.curve.a6};
  std::ostringstream js;
  js << T.j;
  j["j"] = js.str();
  j["q_E"] = padic_to_json(T.q);
  j["ord_q_E"] = T.vq();
  j["alpha"] = T.alpha;
  json pts = json::array();
  for (const auto& P : F.points) {
    const HeegnerLogs L = heegner_combine(P.data, T.alpha, T);
    json r;
    r["label"] = P.label;
    r["log_plus"] = padic_to_json(L.plus);
    r["log_minus"] = padic_to_json(L.minus);
    r["class"] = log_class(L);
    pts.push_back(std::move(r));
  }
  j["points"] = std::move(pts);
  return {{{"tate.json", dump(j)}}, true};
}

// ---- self-check ----

/// Quick internal consistency checks that need no data files.
inline Outputs cmd_selfcheck(const Session& s) {
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, const std::function<bool()>& f) {
    bool ok = false;
    std::string err;
    try {
      ok = f();
    } catch (const std::exception& e) {
      err = e.what();
    }
    json r;
    r["name"] = name;
    r["pass"] = ok;
    if (!err.empty()) r["error"] = err;
    checks.push_back(std::move(r));
    all = all && ok;
  };
  const std::uint32_t p = s.cfg.p;
  const int N = s.cfg.N;
  if (s.setting.eta1) {
    record("theta-multiplicative", [&] {
      const auto g = theta_exact(s.eta1(), 50);
      for (int m = 1; m <= 50; ++m)
        for (int n = 1; m * n <= 50; ++n)
          if (std::gcd(m, n) == 1 && !(g[m * n] == g[m] * g[n])) return false;
      return true;
    });
    record("theta-eigenform", [&] {
      const auto g = theta_exact(s.eta1(), 60);
      for (std::int64_t ell : {2, 3, 5, 7, 11, 13}) {
        const auto Tg = hecke_T(ell, g);
        if (Tg != g.truncate(Tg.cap()).scaled(g[ell])) return false;
      }
      return true;
    });
  }
  record("euler-default-grid", [&] {
    for (const auto& r : consistency_check(default_grid(p, N)))
      if (!r.ok) return false;
    return true;
  });
  record("tate-round-trip", [&] {
    const Rational j(BigInt(7), BigInt(detail::checked_pow(p, 2)));
    return scaled_j(tate_period(j, p, N)).with_precision(N) == scaled_j_value(j, p, N);
  });
  record("series-json-round-trip", [&] {
    auto L = make_layout({"X", "Y"}, {3, 2}, -1, RingKind::Lambda);
    LambdaSeries x = LambdaSeries::variable(L, "X", PadicElem(p, N, 1)) * LambdaSeries::constant(L, PadicElem(p, N, 7, 3)) +
                     LambdaSeries::variable(L, "Y", PadicElem(p, N, 1));
    return series_from_json(series_to_json(x)) == x && dump(series_to_json(series_from_json(series_to_json(x)))) == dump(series_to_json(x));
  });
  json j = detail_cmd::header(s, "selfcheck");
  j["checks"] = std::move(checks);
  j["all_pass"] = all;
  return {{{"selfcheck.json", dump(j)}}, all};
}

}  // namespace lamfam::io
