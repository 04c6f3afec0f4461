#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "spaceform/cli.hpp"

using namespace spaceform;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_in_process(std::vector<std::string> args) {
  args.insert(args.begin(), "spaceform");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Run run_binary(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + SPACEFORM_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "", ""};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, ""};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("spaceform_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Random well-formed specs; actions are drawn until they pass validation.
GroupSpec random_spec(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 4);
  switch (pick(rng)) {
    case 0: return GroupSpec::cyclic(1 + rng() % 30);
    case 1: return GroupSpec::q8();
    case 2: return GroupSpec::q16();
    case 3: return GroupSpec::tstar(1 + rng() % 3);
    case 4: return GroupSpec::ostar(1 + rng() % 3);
    case 5: return GroupSpec::direct(random_spec(rng, depth - 1), random_spec(rng, depth - 1));
    default: {
      const GroupSpec h = random_spec(rng, depth - 1);
      static const u64 primes[] = {5, 7, 11, 13, 19, 31, 37};
      u64 a = 1;
      for (u64 p : primes)
        if (std::gcd(p, h.order()) == 1 && rng() % 2) a *= p;
      for (int attempt = 0; attempt < 20; ++attempt) {
        Action act{a, rng() % a, rng() % a, rng() % a};
        GroupSpec s = GroupSpec::semidirect(a, h, act);
        const Roles r = h.roles();
        if (!r.u) s.action.u = 1 % a;
        if (!r.v) s.action.v = 1 % a;
        if (!r.w) s.action.w = 1 % a;
        try {
          validate_action(s);
          return s;
        } catch (const DomainError&) {
        }
      }
      Action trivial{a, 1 % a, 1 % a, 1 % a};
      return GroupSpec::semidirect(a, h, trivial);
    }
  }
}

}  // namespace

TEST(SpecParse, Examples) {
  EXPECT_EQ(parse_group_spec("T*(2)"), GroupSpec::tstar(2));
  // u=2 has order 4 mod 5, so it cannot be the image of a generator of C(7).
  try {
    parse_group_spec("C(5)x(C(7)xT*(3))[u=2,v=1]");
    FAIL() << "u=2 accepted for C(7)";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("u^7 != 1 mod 5"), std::string::npos) << e.what();
  }
  const auto s = parse_group_spec("C(5)x(C(7)xT*(3))[u=1,v=1]");
  ASSERT_EQ(s.kind, GroupSpec::Kind::Semidirect);
  EXPECT_EQ(s.param, 5u);
  EXPECT_EQ(s.children[0], GroupSpec::direct(GroupSpec::cyclic(7), GroupSpec::tstar(3)));
  EXPECT_EQ(s.action.u, 1u);
  EXPECT_EQ(s.action.v, 1u);
  EXPECT_EQ(parse_group_spec("C(1)xC(4)[]").action.u, 0u);
  EXPECT_EQ(print_group_spec(parse_group_spec(" C( 5 ) x Q8 ")), "C(5)xQ8");
  try {
    parse_group_spec("T*(0)");
    FAIL() << "T*(0) parsed";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 4u);
  }
  EXPECT_THROW(parse_group_spec("D(4)"), ParseError);
  EXPECT_THROW(parse_group_spec("C(5)xQ8[u=2]"), ParseError);  // Q8 has no u role
  EXPECT_THROW(parse_group_spec("C(5)xC(3)[u=2]"), ParseError);  // 2^3 != 1 mod 5
}

TEST(SpecParse, PrintParseRoundTrip) {
  std::mt19937_64 rng(424242);
  int semidirect = 0;
  for (int i = 0; i < 500; ++i) {
    const GroupSpec s = random_spec(rng, 3);
    const std::string text = print_group_spec(s);
    const GroupSpec back = parse_group_spec(text);
    ASSERT_EQ(back, s) << text;
    ASSERT_EQ(print_group_spec(back), text);
    semidirect += s.kind == GroupSpec::Kind::Semidirect;
  }
  EXPECT_GT(semidirect, 20);
}

TEST(Grid, ParsesSpecsAndLensCells) {
  std::istringstream in("# comment\n\nC(7)x(C(5)xT*(2))[u=1,v=2] k=3\nC(12) k=2  # lens\nC(5)xO*(1)[w=4] k=1\n");
  const auto grid = cli::parse_grid(in);
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_EQ(grid[0].params.family, Family::T);
  EXPECT_EQ(grid[0].params.a, 7u);
  EXPECT_EQ(grid[0].params.b, 5u);
  EXPECT_EQ(grid[0].params.v, 2u);
  EXPECT_EQ(grid[0].params.k, 3u);
  EXPECT_TRUE(grid[1].lens);
  EXPECT_EQ(grid[1].lens_m, 12u);
  EXPECT_EQ(grid[2].params.family, Family::O);
  EXPECT_EQ(grid[2].params.w, 4u);
  // Printing a family spec and reading it back is the identity on parameters.
  for (const auto& cell : default_grid()) {
    if (cell.lens) continue;
    std::istringstream line(cell.params.spec().to_string() + " k=" + std::to_string(cell.params.k));
    const auto back = cli::parse_grid(line);
    ASSERT_EQ(back.size(), 1u);
    FamilyParams expect = cell.params;
    expect.u %= expect.a;
    expect.v %= expect.a;
    expect.w %= expect.a;
    ASSERT_EQ(back[0].params, expect) << cell.params.label();
  }
  std::istringstream missing("T*(1)\n");
  EXPECT_THROW(cli::parse_grid(missing), cli::UsageError);
  std::istringstream bad_k("C(5) k=x\n");
  EXPECT_THROW(cli::parse_grid(bad_k), cli::UsageError);
  std::istringstream not_family("C(5)xQ8[] k=1\n");
  EXPECT_THROW(cli::parse_grid(not_family), cli::UsageError);
}

TEST(Cache, RoundTripVersionAndCorruption) {
  const auto dir = scratch_dir("cache");
  const Group g = build(GroupSpec::ostar(2));
  const auto auts = enumerate_automorphisms(g);
  ASSERT_EQ(auts.size(), 432u);
  std::vector<std::string> warnings;
  AutomorphismCache cache(dir);
  EXPECT_FALSE(cache.load(g, "", warnings));
  cache.store(g, "", auts, warnings);
  const auto loaded = cache.load(g, "", warnings);
  ASSERT_TRUE(loaded);
  ASSERT_EQ(loaded->size(), auts.size());
  for (std::size_t i = 0; i < auts.size(); ++i) ASSERT_EQ((*loaded)[i].images, auts[i].images);
  EXPECT_TRUE(warnings.empty());

  // Another engine version neither sees nor rejects the entry.
  AutomorphismCache other(dir, "spaceform-engine-0");
  EXPECT_FALSE(other.load(g, "", warnings));
  {
    auto j = json::parse(std::ifstream(cache.path(*g.spec(), "")));
    j["engine_version"] = "spaceform-engine-0";
    std::ofstream(cache.path(*g.spec(), "")) << j.dump();
  }
  EXPECT_FALSE(cache.load(g, "", warnings));
  EXPECT_TRUE(warnings.empty());

  // Images that break a relation are rejected and recomputed with a warning.
  cache.store(g, "", auts, warnings);
  {
    auto j = json::parse(std::ifstream(cache.path(*g.spec(), "")));
    j["automorphisms"][5][0] = 0;
    std::ofstream(cache.path(*g.spec(), "")) << j.dump();
  }
  const auto recomputed = cached_automorphisms(g, std::nullopt, "", &cache, {}, warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("rejected"), std::string::npos);
  EXPECT_EQ(recomputed, auts);
  warnings.clear();
  EXPECT_TRUE(cache.load(g, "", warnings));  // rewritten

  std::ofstream(cache.path(*g.spec(), "")) << "{not json";
  EXPECT_EQ(cached_automorphisms(g, std::nullopt, "", &cache, {}, warnings), auts);
  EXPECT_EQ(warnings.size(), 1u);
  fs::remove_all(dir);
}

TEST(Cache, FixingActionEntries) {
  const auto dir = scratch_dir("fixing");
  AutomorphismCache cache(dir);
  const Group g = build(GroupSpec::tstar(2));
  const Action act{7, 1, 2, 1};
  const auto chi = Character::from_action(g, act);
  std::vector<std::string> warnings;
  const auto first = cached_automorphisms(g, chi, cli::action_key(act), &cache, {}, warnings);
  const auto second = cached_automorphisms(g, chi, cli::action_key(act), &cache, {}, warnings);
  EXPECT_EQ(first.size(), 36u);
  EXPECT_EQ(first, second);
  EXPECT_TRUE(warnings.empty());
  // An unfiltered list stored under the action key must not be trusted.
  cache.store(g, cli::action_key(act), enumerate_automorphisms(g), warnings);
  EXPECT_EQ(cached_automorphisms(g, chi, cli::action_key(act), &cache, {}, warnings), first);
  EXPECT_EQ(warnings.size(), 1u);
  fs::remove_all(dir);
}

TEST(Report, LargeNumbersBecomeStrings) {
  EXPECT_EQ(report::number(u64{1} << 53), json(u64{1} << 53));
  EXPECT_EQ(report::number((u64{1} << 53) + 1), json("9007199254740993"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_in_process({"group-info", "Q8"}).code, 0);
  EXPECT_EQ(run_in_process({"group-info", "T*(0)"}).code, 1);
  EXPECT_EQ(run_in_process({"count", "--family", "T", "--a", "9"}).code, 1);
  EXPECT_EQ(run_in_process({"count", "--family", "T", "--a", "7", "--v", "3"}).code, 1);
  EXPECT_EQ(run_in_process({"aut", "O*(3)", "--max-enum", "100"}).code, 1);
  EXPECT_EQ(run_in_process({}).code, 2);
  EXPECT_EQ(run_in_process({"frobnicate"}).code, 2);
  EXPECT_EQ(run_in_process({"count", "--family", "X"}).code, 2);
  EXPECT_EQ(run_in_process({"count"}).code, 2);
  EXPECT_EQ(run_in_process({"aut", "Q8", "--action", "u=2"}).code, 2);
  EXPECT_EQ(run_in_process({"der", "Q8"}).code, 2);
  EXPECT_EQ(run_in_process({"cohomology", "Q8", "--from", "5", "--to", "2"}).code, 2);
  EXPECT_EQ(run_in_process({"reconcile", "--grid", "/nonexistent/grid.txt"}).code, 2);
  const auto err = run_in_process({"group-info", "T*(0)"});
  EXPECT_NE(err.err.find("column 4"), std::string::npos);
  EXPECT_TRUE(err.out.empty());
}

TEST(Cli, JsonSchema) {
  const std::set<std::string> envelope{"command", "params", "results", "warnings", "engine_version"};
  auto keys = [](const json& j) {
    std::set<std::string> out;
    for (const auto& [k, v] : j.items()) out.insert(k);
    return out;
  };

  const auto count = run_in_process({"count", "--family", "T", "--a", "1", "--b", "1", "--n", "1", "--k", "1", "--json"});
  ASSERT_EQ(count.code, 0) << count.err;
  const auto cj = json::parse(count.out);
  EXPECT_EQ(keys(cj), envelope);
  EXPECT_EQ(cj["command"], "count");
  EXPECT_EQ(cj["engine_version"], kEngineVersion);
  EXPECT_EQ(cj["results"]["oracle_count"], 4);
  EXPECT_EQ(keys(cj["results"]), (std::set<std::string>{"params", "N", "K", "ell", "phi_N", "subgroup_order", "oracle_count", "formula_counts", "corollary_count"}));
  EXPECT_EQ(cj["results"]["formula_counts"].size(), 6u);

  const auto aut = run_in_process({"aut", "Q8", "--json"});
  ASSERT_EQ(aut.code, 0);
  const auto aj = json::parse(aut.out);
  EXPECT_EQ(keys(aj), envelope);
  EXPECT_EQ(aj["results"]["order"], 24);
  EXPECT_EQ(aj["results"]["automorphisms"].size(), 24u);
  std::set<json> distinct(aj["results"]["automorphisms"].begin(), aj["results"]["automorphisms"].end());
  EXPECT_EQ(distinct.size(), 24u);

  // Field sets do not depend on the inputs.
  const auto fixed = json::parse(run_in_process({"aut", "T*(2)", "--action", "a=7,v=2", "--json"}).out);
  EXPECT_EQ(keys(fixed["results"]), keys(aj["results"]));
  EXPECT_EQ(fixed["results"]["order"], 36);
  const auto d1 = json::parse(run_in_process({"der", "T*(2)", "--action", "a=7,v=2", "--json"}).out);
  const auto d2 = json::parse(run_in_process({"der", "C(4)", "--a", "6", "--list", "--json"}).out);
  EXPECT_EQ(keys(d1["results"]), keys(d2["results"]));
  EXPECT_EQ(d1["results"]["count"], 7);
  EXPECT_EQ(d2["results"]["count"], 2);  // trivial action: Hom(Z/4, Z/6)
  EXPECT_EQ(d2["results"]["derivations"].size(), 2u);
  const auto c1 = json::parse(run_in_process({"cohomology", "Q8", "--json"}).out);
  const auto c2 = json::parse(run_in_process({"cohomology", "C(7)xT*(1)[v=2]", "--to", "12", "--json"}).out);
  EXPECT_EQ(keys(c1["results"]), keys(c2["results"]));
  EXPECT_EQ(c2["results"]["period"], 12);
  const auto s = json::parse(run_in_process({"selfeq", "--family", "T", "--a", "7", "--n", "3", "--v", "2", "--json"}).out);
  EXPECT_EQ(s["results"]["structure"]["total_order"], 1008);
  const auto g = json::parse(run_in_process({"group-info", "O*(2)", "--json"}).out);
  EXPECT_EQ(g["results"]["order"], 144);
  EXPECT_EQ(g["results"]["presentation_verified"], true);
}

TEST(Cli, ReconcileGridFile) {
  const auto dir = scratch_dir("grid");
  std::ofstream(dir / "grid.txt") << "C(1)xT*(1)[v=1] k=1\nC(5) k=2\nC(5)x(C(3)xT*(1))[u=1,v=1] k=1\n";
  const auto r = run_in_process({"reconcile", "--grid", (dir / "grid.txt").string(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  const auto& cells = j["results"]["cells"];
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0]["oracle_count"], 4);
  EXPECT_EQ(cells[0]["verdict"], "mismatch (recorded)");
  EXPECT_EQ(cells[1]["verdict"], "consistent");
  EXPECT_EQ(cells[2]["verdict"], "error");  // (ab,6) = 3; reported per cell, not fatal
  EXPECT_EQ(j["results"]["summary"]["errors"], 1);
  std::ofstream(dir / "bad.txt") << "C(5)xQ8 k=1\n";
  EXPECT_EQ(run_in_process({"reconcile", "--grid", (dir / "bad.txt").string()}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, BinaryIsDeterministicAndCacheTransparent) {
  const auto dir = scratch_dir("binary");
  const std::string args = "count --family O --a 5 --b 7 --n 2 --k 2 --w 4 --json";
  const auto plain = run_binary(args + " --no-cache");
  ASSERT_EQ(plain.code, 0);
  EXPECT_EQ(run_binary(args + " --no-cache").out, plain.out);
  const auto cold = run_binary(args + " --cache-dir " + dir.string());
  const auto warm = run_binary(args + " --cache-dir " + dir.string());
  EXPECT_EQ(cold.out, plain.out);
  EXPECT_EQ(warm.out, plain.out);
  EXPECT_FALSE(fs::is_empty(dir));
  const auto via_env = run_binary(args, "SPACEFORM_CACHE_DIR=" + dir.string());
  EXPECT_EQ(via_env.out, plain.out);
  EXPECT_EQ(run_binary("bogus").code, 2);
  EXPECT_EQ(run_binary("group-info 'T*(0)'").code, 1);
  fs::remove_all(dir);
}
