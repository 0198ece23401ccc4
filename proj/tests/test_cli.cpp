#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coagfrag/cli.hpp"

using coagfrag::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "coagfrag-cli-test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("eppf subcommand") {
  CHECK(cli({"eppf", "--spec", "pd:alpha=0.5,theta=1", "--sizes", "2"}).out == "0.25\n");
  CHECK(cli({"eppf", "--spec", "pd:alpha=0.5,theta=1", "--sizes", "1"}).out == "1\n");
  CHECK(cli({"eppf", "--spec", "pd:alpha=0.5,theta=1", "--sizes", "1,1"}).out == "0.75\n");
  CHECK(cli({"eppf", "--spec", "pd:alpha=0.5,theta=1", "--partition", "0,1"}).out == "0.75\n");
  const Run all = cli({"eppf", "--spec", "pd:alpha=0,theta=1", "--all", "3"});
  CHECK(all.code == 0);
  CHECK(std::count(all.out.begin(), all.out.end(), '\n') == 5);
  const Run ps = cli({"eppf", "--spec", "ps:levy=stable:alpha=0.5,alpha=0.6,theta=1", "--sizes", "2,1"});
  CHECK(ps.code == 0);
  CHECK(std::stod(ps.out) == doctest::Approx(0.7 * 1.3 / (2 * 3)).epsilon(1e-6));
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"eppf", "--spec", "pd:alpha=2,theta=1", "--sizes", "2"}).code == 2);
  CHECK(cli({"eppf", "--spec", "pd:alpha=0.5,theta=1"}).code == 2);
  CHECK(cli({"eppf", "--spec", "pd:alpha=0.5,theta=1", "--sizes", "2,x"}).code == 2);
  CHECK(cli({"verify"}).code == 2);
  CHECK(cli({"verify", "--case", "no-such-case"}).code == 2);
  CHECK(cli({"cs", "--kind", "weird"}).code == 2);
  CHECK(cli({"findim", "--nu", "3", "--eta", "1", "--mass"}).code == 2);
  const Run e = cli({"eppf", "--spec", "bogus", "--sizes", "1"});
  CHECK(e.code == 2);
  CHECK(e.err.find("error:") != std::string::npos);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("sample subcommand is reproducible") {
  const Run a = cli({"sample", "--spec", "pd:alpha=0.5,theta=1", "-n", "5", "-N", "20", "--seed", "3"});
  const Run b = cli({"sample", "--spec", "pd:alpha=0.5,theta=1", "-n", "5", "-N", "20", "--seed", "3"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 20);
  const Run g = cli({"sample", "--gem", "--alpha", "0.3", "--theta", "1", "-N", "2", "--tail-tol", "1e-3"});
  CHECK(g.code == 0);
  CHECK(g.out.find(";tail=") != std::string::npos);
  const Run pk = cli({"sample", "--spec", "linnik:nu=4,alpha=0.5,theta=1", "-n", "4", "-N", "3"});
  CHECK(pk.code == 0);
}

TEST_CASE("cs and findim subcommands") {
  const Run c = cli({"cs", "--kind", "pd", "--alpha", "0.5", "--theta", "1", "--z", "1"});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("z=1 value=0.343145750507", 0) == 0);
  const Run t = cli({"cs", "--kind", "pk_tilted", "--model", "stable:alpha=0.5", "--theta", "1", "--z", "1"});
  CHECK(t.code == 0);
  CHECK(t.out.rfind("z=1 value=0.34314575", 0) == 0);
  const Run mc = cli({"cs", "--kind", "pd", "--z", "0,1", "--mc", "2000", "--threads", "1"});
  CHECK(mc.code == 0);
  CHECK(mc.out.find("z=0 value=1 mc=1 se=0") != std::string::npos);
  const Run f = cli({"findim", "--theta", "2", "--nu", "3", "--p", "0.3,0.7", "--y", "0.4,0.6"});
  CHECK(f.code == 0);
  CHECK(f.out.rfind("density=", 0) == 0);
}

TEST_CASE("verify writes reports and honours the seed") {
  const auto out1 = scratch("r1.json"), out2 = scratch("r2.json"), csv = scratch("r.csv");
  const std::vector<std::string> base = {"verify", "--case", "pitman-coag", "-n", "4", "-N", "20000", "--tol", "0.03"};
  auto args1 = base;
  args1.insert(args1.end(), {"--seed", "5", "--out", out1.string(), "--csv", csv.string(), "--threads", "1"});
  auto args2 = base;
  args2.insert(args2.end(), {"--seed", "5", "--out", out2.string(), "--threads", "2"});
  const Run r1 = cli(args1);
  CHECK(r1.code == 0);
  CHECK(r1.out.rfind("pitman-coag: pass", 0) == 0);
  CHECK(cli(args2).code == 0);
  CHECK(slurp(out1) == slurp(out2));
  const auto j = nlohmann::json::parse(slurp(out1));
  CHECK(j.at("schema") == "coagfrag-report/1");
  CHECK(j.at("config").at("seed") == 5);
  CHECK(slurp(csv).rfind("partition,theoretical,empirical", 0) == 0);

  const std::vector<std::string> tight = {"verify", "--case", "pitman-coag", "-n", "4", "-N", "20000", "--tol", "1e-9"};
  CHECK(cli(tight).code == 1);

  const auto cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"case": "pitman-coag", "n": 3, "N": 10000, "seed": 9, "tol": 0.05})";
  const auto out3 = scratch("r3.json");
  CHECK(cli({"verify", "--config", cfg.string(), "--out", out3.string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(out3)).at("config").at("n") == 3);
  std::ofstream(cfg) << R"({"case": "pitman-coag", "colour": 3})";
  CHECK(cli({"verify", "--config", cfg.string()}).code == 2);
}

TEST_CASE("COAGFRAG_SEED sets the default seed") {
  const auto out = scratch("env.json");
  setenv("COAGFRAG_SEED", "123", 1);
  CHECK(cli({"verify", "--case", "pitman-coag", "-n", "3", "-N", "5000", "--tol", "0.05", "--out", out.string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(out)).at("config").at("seed") == 123);
  setenv("COAGFRAG_SEED", "abc", 1);
  CHECK(cli({"verify", "--case", "pitman-coag", "-n", "3", "-N", "5000", "--tol", "0.05"}).code == 2);
  unsetenv("COAGFRAG_SEED");
}
