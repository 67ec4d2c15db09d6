#include <gtest/gtest.h>

#include <random>

#include "lamfam/io/commands.hpp"
#include "synthetic_triple.hpp"

using namespace lamfam;
using namespace lamfam::io;

namespace {

const fs::path kSamples = fs::path(LAMFAM_SOURCE_DIR) / "samples";

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lamfam_test_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

const Session& default_session() {
  static const Session s(load_config(kSamples / "default.toml"));
  return s;
}

template <class E>
std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  return "<no exception>";
}

}  // namespace

// ---- codecs ----

TEST(Codec, PadicDigitsRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const PadicElem x(5, 8, static_cast<std::int64_t>(rng() % 390625), static_cast<std::int64_t>(rng() % 390625));
    EXPECT_EQ(padic_from_json(padic_to_json(x), 5, 8, "x"), x);
  }
  EXPECT_EQ(padic_from_json(json(-2), 5, 8, "x"), PadicElem(5, 8, -2));
  EXPECT_EQ(padic_to_json(PadicElem(5, 3, 7)), json::parse("[[2,1,0],[0,0,0]]"));
}

TEST(Codec, MalformedValuesNameTheField) {
  EXPECT_NE(message_of<ParseError>([] { padic_from_json(json::parse("[[1,2]]"), 5, 8, "lines[0].a_p"); }).find("lines[0].a_p"), std::string::npos);
  EXPECT_NE(message_of<ParseError>([] { padic_from_json(json::parse("[[7],[0]]"), 5, 8, "u"); }).find("digit out of range"), std::string::npos);
  EXPECT_NE(message_of<ParseError>([] { padic_from_json(json::parse("[[1,2,3],[0]]"), 5, 2, "u"); }).find("more digits"), std::string::npos);
  EXPECT_THROW(parse_text("{ not json", "f.json"), ParseError);
}

TEST(Codec, SeriesSerializationIsBitExact) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto L = make_layout({"X", "Y", "Z"}, {3, 2, 2}, trial % 2 ? 4 : -1, RingKind::Triple);
    LambdaSeries s(L, PadicElem(5, 8));
    for (std::size_t i = 0; i < L->size(); ++i)
      if (rng() % 3) s.set_coeff_index(i, PadicElem(5, 8, static_cast<std::int64_t>(rng() % 390625), static_cast<std::int64_t>(rng() % 390625)));
    const std::string text = dump(series_to_json(s));
    const LambdaSeries back = series_from_json(json::parse(text));
    EXPECT_EQ(back, s);
    EXPECT_EQ(back.layout()->kind(), RingKind::Triple);
    EXPECT_EQ(dump(series_to_json(back)), text);
  }
  json bad = series_to_json(LambdaSeries::constant(make_layout({"T"}, {2}), PadicElem(5, 8, 3)));
  bad["monomials"]["5"] = 1;
  EXPECT_NE(message_of<ParseError>([&] { series_from_json(bad); }).find("monomials.5"), std::string::npos);
}

// ---- ideal cache ----

TEST(IdealCache, SortedCsvWrittenOnceAndReread) {
  const fs::path dir = scratch_dir("cache");
  const QuadField K(7);
  const auto first = cached_ideals(K, 120, dir);
  EXPECT_EQ(first, K.enumerate_ideals(120));
  std::vector<fs::path> entries(fs::directory_iterator(dir), fs::directory_iterator{});
  ASSERT_EQ(entries.size(), 1u);  // no temporaries left behind
  const std::string text = read_text(entries[0]);
  EXPECT_EQ(text.substr(0, 17), "norm,a,b,content\n");
  EXPECT_TRUE(std::is_sorted(first.begin(), first.end()));
  EXPECT_EQ(cached_ideals(K, 120, dir), first);
  EXPECT_EQ(ideals_to_csv(cached_ideals(K, 120, dir)), text);
  // a different key gets its own entry
  cached_ideals(K, 60, dir);
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 2);
  EXPECT_NE(message_of<ParseError>([&] { ideals_from_csv(K, "norm,a,b,content\n2,2,1,1\n4,2,3,1\n", "c.csv"); }).find("c.csv:3"),
            std::string::npos);
  EXPECT_THROW(ideals_from_csv(K, "norm,a,b\n", "c.csv"), ParseError);
  fs::remove_all(dir);
}

// ---- character specs ----

TEST(CharacterSpec, LoadsAndRejectsMalformedFields) {
  const CharacterSpec s = load_character_spec(kSamples / "characters" / "eta.json");
  EXPECT_EQ(s.d_K, 7);
  EXPECT_EQ(s.c0, 1);
  EXPECT_EQ(s.r, 1);
  CharacterStore store(5);
  const HeckeChar eta = store.build(s, "eta.json");
  EXPECT_EQ(eta.value_order(), 12);

  json j = json::parse(read_text(kSamples / "characters" / "eta.json"));
  json bad = j;
  bad["generator_images"] = "one";
  EXPECT_NE(message_of<ParseError>([&] { parse_character_spec(bad, "spec"); }).find("spec.generator_images"), std::string::npos);
  bad = j;
  bad.erase("d_K");
  EXPECT_NE(message_of<ParseError>([&] { parse_character_spec(bad, "spec"); }).find("spec.d_K"), std::string::npos);
  bad = j;
  bad["generator_images"] = {1, 2};
  EXPECT_NE(message_of<ParseError>([&] { store.build(parse_character_spec(bad, "spec"), "spec"); }).find("spec.generator_images"),
            std::string::npos);
  bad = j;
  bad["schema"] = 2;
  EXPECT_NE(message_of<ParseError>([&] { parse_character_spec(bad, "spec"); }).find("spec.schema"), std::string::npos);
}

// ---- eigenbases ----

TEST(Eigenbasis, ShippedBasesMatchTheConstructedFixture) {
  const auto& C = synthetic::shared_config();
  for (int k : {2, 4}) {
    const BasisFile B = load_eigenbasis(kSamples / "bases" / ("basis_w" + std::to_string(k) + ".json"));
    EXPECT_EQ(B.weight, k);
    const OrdinaryBasis& ref = C.P.bases.at(k);
    ASSERT_EQ(B.basis.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(B.basis.line(i).label, ref.line(i).label);
      EXPECT_EQ(B.basis.line(i).q, ref.line(i).q);
      EXPECT_EQ(B.basis.line(i).q.level(), ref.line(i).q.level());
      EXPECT_EQ(B.basis.line(i).eigenvalues, ref.line(i).eigenvalues);
    }
    EXPECT_EQ(B.basis.index_set(), ref.index_set());
    const EigenData f = load_eigendata(kSamples / "targets" / ("f_w" + std::to_string(k) + ".json"), 5, 8);
    EXPECT_EQ(B.basis.match(f), k == 2 ? C.target2 : C.target4);
    EXPECT_EQ(f.a_p, C.P.targets.at(k).a_p);
  }
}

TEST(Eigenbasis, DuplicatedLineIsRankDeficient) {
  json j = json::parse(read_text(kSamples / "bases" / "basis_w2.json"));
  j["lines"][2] = j["lines"][1];
  j["lines"][2]["label"] = "copy";
  EXPECT_THROW(parse_eigenbasis(j, "dup"), RankDeficient);
}

TEST(Eigenbasis, CorruptedEigenvalueIsEigenMismatch) {
  const json j = json::parse(read_text(kSamples / "bases" / "basis_w2.json"));
  json bad = j;
  bad["lines"][1]["eigenvalues"]["3"] = 5;  // 11a has a_3 = -1
  try {
    parse_eigenbasis(bad, "corrupt");
    FAIL() << "no EigenMismatch";
  } catch (const EigenMismatch& e) {
    EXPECT_EQ(e.ell(), 3);
  }
  bad = j;
  bad["lines"][0]["coefficients"][26] = 7;  // a_26 = a_2 a_13 breaks T_2 and T_13
  EXPECT_THROW(parse_eigenbasis(bad, "corrupt"), EigenMismatch);
  bad = j;
  bad["lines"][0].erase("level");
  EXPECT_NE(message_of<ParseError>([&] { parse_eigenbasis(bad, "b"); }).find("b.lines[0].level"), std::string::npos);
}

TEST(EigenData, ValidationAndRoundTrip) {
  const auto& C = synthetic::shared_config();
  const EigenData& t = C.P.targets.at(4);
  const EigenData back = parse_eigendata(eigendata_to_json(t), 5, 8, "t");
  EXPECT_EQ(dump(eigendata_to_json(back)), dump(eigendata_to_json(t)));
  json bad = eigendata_to_json(t);
  bad["a_p"] = 5;  // non-unit a_p for an ordinary form
  EXPECT_THROW(parse_eigendata(bad, 5, 8, "t"), ValidationFailed);
}

// ---- configuration and standing hypotheses ----

TEST(Config, DefaultInstanceValidates) {
  const Session& s = default_session();
  EXPECT_EQ(s.cfg.p, 5u);
  EXPECT_EQ(s.cfg.Q, 200);
  EXPECT_EQ(*s.cfg.tame_level, 6);
  ASSERT_TRUE(s.setting.eta1.has_value());
  EXPECT_EQ(s.setting.eta1->conductor(), s.setting.K->principal({5, 0}));
  const PipelineConfig o = load_config(kSamples / "default.toml", {8, 50, 2});
  EXPECT_EQ(o.Q, 50);
  EXPECT_EQ(o.threads, 2);
}

TEST(Config, EachClauseHasARejectingFixture) {
  const std::vector<std::string> clauses{"p-at-least-5",          "odd-discriminant", "p-inert",   "p-prime-to-class-number",
                                         "field",                 "tame-level-squarefree", "tame-level-coprime",
                                         "heegner-parity",        "conductor-shape",  "not-dihedral-induced",
                                         "c-coprime",             "c-split",          "self-duality", "fudge-units"};
  for (const auto& c : clauses) {
    const fs::path f = kSamples / "invalid" / (c + ".toml");
    ASSERT_TRUE(fs::exists(f)) << f;
    const std::string msg = message_of<ValidationFailed>([&] { Session s(load_config(f)); });
    EXPECT_NE(msg.find("clause '" + c + "'"), std::string::npos) << c << ": " << msg;
  }
}

TEST(Config, ParseErrorsCarryLocation) {
  EXPECT_NE(message_of<ParseError>([] { parse_config("prime = 5\nprecision = [", "bad.toml"); }).find("bad.toml:2"), std::string::npos);
  EXPECT_NE(message_of<ParseError>([] { parse_config("precision = 8\n", "x.toml"); }).find("prime"), std::string::npos);
  EXPECT_NE(message_of<ParseError>([] { parse_config("prime = 5\n[family]\nkind = \"other\"\n", "x.toml"); }).find("family.kind"),
            std::string::npos);
  EXPECT_NE(message_of<ParseError>([] { parse_config("prime = 5\n[triple]\nweights = [[4, 1]]\n", "x.toml"); }).find("triple.weights[0]"),
            std::string::npos);
  EXPECT_THROW(load_config(kSamples / "missing.toml"), ParseError);
}

// ---- commands ----

TEST(Commands, ThetaMatchesGoldenFile) {
  const fs::path cache = scratch_dir("theta");
  const Session s(load_config(kSamples / "default.toml"), cache);
  const Outputs o = cmd_theta(s);
  EXPECT_EQ(o.files.at("theta.json"), read_text(kSamples / "golden" / "theta.json"));
  // second run reads the ideal cache and must not change a byte
  EXPECT_EQ(cmd_theta(s).files.at("theta.json"), o.files.at("theta.json"));
  fs::remove_all(cache);
}

TEST(Commands, GoldenWeightOneAgreesWithElementEnumeration) {
  // h_K = 1 for Q(sqrt -7): every ideal is (alpha) for two alpha = +-alpha,
  // so a_n = (1/2) sum over alpha of norm n prime to 5 of eta((alpha)).
  const Session& s = default_session();
  const HeckeChar& eta = *s.setting.eta1;
  const QuadField& K = eta.field();
  const int Q = 200, M = static_cast<int>(eta.value_order());
  std::vector<std::vector<std::int64_t>> counts(Q + 1, std::vector<std::int64_t>(static_cast<std::size_t>(M), 0));
  for (std::int64_t y = -40; y <= 40; ++y)
    for (std::int64_t x = -40; x <= 40; ++x) {
      if (x == 0 && y == 0) continue;
      const std::int64_t n = K.norm({x, y});
      if (n > Q || n % 5 == 0) continue;
      ++counts[static_cast<std::size_t>(n)][static_cast<std::size_t>(eta.exponent(K.principal({x, y})))];
    }
  const json g = json::parse(read_text(kSamples / "golden" / "theta.json"));
  const json& w1 = g["expansions"][0];
  ASSERT_EQ(w1["weight"], 1);
  ASSERT_EQ(w1["Q"], Q);
  for (int n = 0; n <= Q; ++n) {
    for (auto& c : counts[static_cast<std::size_t>(n)]) {
      ASSERT_EQ(c % 2, 0);
      c /= 2;
    }
    const CycloInt expected = CycloInt::from_exponent_counts(M, counts[static_cast<std::size_t>(n)]);
    EXPECT_EQ(w1["coefficients"][static_cast<std::size_t>(n)].get<std::vector<std::int64_t>>(), expected.coeffs()) << n;
  }
}

TEST(Commands, EulerTableHasNoFailures) {
  const Outputs o = cmd_euler(default_session());
  EXPECT_TRUE(o.ok);
  const json j = json::parse(o.files.at("euler.json"));
  EXPECT_EQ(j["rows"], 200);
  EXPECT_EQ(j["failures"], 0);
  const std::string& csv = o.files.at("euler.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,n,form,a_p,eta,local,multiplier,W,ok");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 201);
  EXPECT_EQ(csv.find(",NO\n"), std::string::npos);
}

TEST(Commands, TateReportClassifiesTheFixtures) {
  const Outputs o = cmd_tate(default_session());
  const json j = json::parse(o.files.at("tate.json"));
  EXPECT_EQ(j["alpha"], -1);
  EXPECT_EQ(j["ord_q_E"], 1);
  std::map<std::string, std::string> cls;
  for (const auto& p : j["points"]) cls[p["label"]] = p["class"];
  // alpha = -1: phi_1(p) alpha = -1 puts the log in the minus slot
  EXPECT_EQ(cls["phi1-split"], "minus");
  EXPECT_EQ(cls["phi1-inert"], "plus");
  EXPECT_EQ(cls["torsion"], "torsion");
  EXPECT_EQ(cls["generic"], "mixed");
}

TEST(Commands, TripleAndOrdprojReports) {
  const Session& s = default_session();
  const json t = json::parse(cmd_triple(s).files.at("triple.json"));
  EXPECT_EQ(t["M"], 42);
  EXPECT_EQ(t["values"].size(), 3u);
  EXPECT_EQ(t["values"][0]["line"], "6.4.a.a-alpha");
  const json o = json::parse(cmd_ordproj(s).files.at("ordproj.json"));
  for (const auto& r : o["theta"]) {
    EXPECT_TRUE(r["U_p_vanishes"].get<bool>());
    EXPECT_TRUE(r["ordinary_part_vanishes"].get<bool>());
  }
  EXPECT_EQ(o["xi"].size(), 2u);
}

TEST(Commands, TargetWithForeignTameLevelIsRejected) {
  PipelineConfig c = load_config(kSamples / "default.toml");
  c.bases[0].target = kSamples / "targets" / "f_w2.json";
  c.bases[0].basis = kSamples / "bases" / "basis_w2.json";
  c.bases[0].weight = 2;
  const Session s(c);
  EXPECT_NE(message_of<ValidationFailed>([&] { build_pipeline(s); }).find("target-tame-level"), std::string::npos);
}

TEST(Commands, EveryVerbIsDeterministic) {
  const Session& s = default_session();
  for (auto cmd : {cmd_theta, cmd_family, cmd_ordproj, cmd_triple, cmd_euler, cmd_tate, cmd_selfcheck}) {
    const Outputs a = cmd(s), b = cmd(s);
    EXPECT_EQ(a.files, b.files);
    EXPECT_TRUE(a.ok);
  }
}

TEST(Commands, AtomicWriteLeavesOnlyTargets) {
  const fs::path dir = scratch_dir("write");
  write_outputs(cmd_euler(default_session()), dir);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"euler.csv", "euler.json", "euler.txt"}));
  fs::remove_all(dir);
}
