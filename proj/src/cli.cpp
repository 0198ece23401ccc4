#include "coagfrag/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "coagfrag/errors.hpp"
#include "coagfrag/harness.hpp"
#include "coagfrag/samplers.hpp"
#include "coagfrag/spec_parse.hpp"
#include "coagfrag/transforms.hpp"

namespace coagfrag {

namespace {

/// Bad input discovered after CLI11 parsing; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("COAGFRAG_SEED");
  if (env == nullptr || *env == '\0') return 42;
  std::uint64_t v = 0;
  const std::string_view text(env);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw UsageError(fmt::format("COAGFRAG_SEED='{}' is not an unsigned integer", text));
  return v;
}

std::vector<int> parse_ints(std::string_view text, std::string_view what) {
  std::vector<int> out;
  for (const auto& tok : CLI::detail::split(std::string(text), ',')) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
      throw UsageError(fmt::format("{}: '{}' is not an integer", what, tok));
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_doubles(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (const auto& tok : CLI::detail::split(std::string(text), ',')) out.push_back(parse_number(tok, what));
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError(fmt::format("cannot open '{}' for writing", path));
  f << text;
  if (!f) throw UsageError(fmt::format("failed writing '{}'", path));
}

std::string num(double v) { return fmt::format("{:.15g}", v); }

struct SampleArgs {
  std::string spec;
  int n = 0;
  long count = 1;
  bool gem = false;
  double alpha = 0.5;
  double theta = 1.0;
  double tail_tol = 1e-6;
};

int cmd_sample(const SampleArgs& a, std::uint64_t seed, std::ostream& out) {
  RngStream rng(seed, fnv1a("sample"));
  if (a.gem) {
    for (long i = 0; i < a.count; ++i) {
      const RankedMasses m = gem_sticks(a.alpha, a.theta, a.tail_tol, rng);
      std::string line;
      for (double x : m.masses()) line += (line.empty() ? "" : ",") + num(x);
      fmt::print(out, "{};tail={}\n", line, num(m.tail()));
    }
    return 0;
  }
  if (a.spec.empty()) throw UsageError("sample: --spec or --gem is required");
  if (a.n < 1) throw UsageError("sample: -n must be >= 1");
  const EppfSpec spec = parse_eppf(a.spec);
  PartitionSampler sampler;
  if (spec.kind == EppfKind::PD) {
    sampler = crp_sampler(spec.alpha, spec.theta);
  } else {
    auto p = std::make_shared<PredictiveEppfSampler>([spec](const SizeComposition& s) { return evaluate(spec, s); });
    sampler = [p](int n, RngStream& r) { return p->sample(n, r); };
  }
  for (long i = 0; i < a.count; ++i) fmt::print(out, "{}\n", sampler(a.n, rng).key());
  return 0;
}

struct EppfArgs {
  std::string spec;
  std::string sizes;
  std::string partition;
  int all_n = 0;
};

int cmd_eppf(const EppfArgs& a, std::ostream& out) {
  const EppfSpec spec = parse_eppf(a.spec);
  const int given = !a.sizes.empty() + !a.partition.empty() + (a.all_n > 0);
  if (given != 1) throw UsageError("eppf: give exactly one of --sizes, --partition, --all");
  if (!a.sizes.empty()) {
    std::vector<int> sizes = parse_ints(a.sizes, "--sizes");
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    SizeComposition s = [&] {
      try {
        return SizeComposition(sizes);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
    }();
    fmt::print(out, "{}\n", num(evaluate(spec, s)));
  } else if (!a.partition.empty()) {
    SetPartition p = [&] {
      try {
        return SetPartition::parse(a.partition);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
    }();
    fmt::print(out, "{}\n", num(evaluate(spec, p.composition())));
  } else {
    if (a.all_n > 8) throw UsageError("eppf: --all requires n <= 8");
    for (const auto& [key, v] : exact_distribution(spec, a.all_n)) fmt::print(out, "{} {}\n", key, num(v));
  }
  return 0;
}

struct CsArgs {
  std::string kind = "pd";
  double alpha = 0.5;
  double theta = 1.0;
  std::string model;
  std::string z = "1";
  std::string g = "g=1,3;w=0.5,0.5";
  long mc = 0;
  double tail_tol = McOptions{}.tail_tol;
  int threads = 0;
};

int cmd_cs(const CsArgs& a, std::uint64_t seed, std::ostream& out) {
  const StepFunction g = StepFunction::parse(a.g);
  const std::vector<double> zs = parse_doubles(a.z, "--z");
  std::optional<LevyModel> model;
  if (a.kind == "pk_tilted") {
    if (a.model.empty()) throw UsageError("cs: --kind pk_tilted needs --model");
    model = parse_model(a.model);
  } else if (a.kind != "pd" && a.kind != "dirichlet" && a.kind != "stable") {
    throw UsageError(fmt::format("cs: unknown --kind '{}'", a.kind));
  }
  auto closed = [&](double z) {
    if (a.kind == "pd") return cs_pd(a.alpha, a.theta, z, g);
    if (a.kind == "dirichlet") return cs_dirichlet(a.theta, z, g);
    if (a.kind == "stable") return cs_stable(a.alpha, z, g);
    return cs_pk_tilted(*model, a.theta, z, g);
  };
  std::vector<McEstimate> mc;
  if (a.mc > 0) {
    if (a.kind == "pk_tilted") throw UsageError("cs: --mc supports pd, dirichlet and stable");
    McOptions o;
    o.samples = a.mc;
    o.tail_tol = a.tail_tol;
    o.threads = a.threads;
    const double alpha = a.kind == "dirichlet" ? 0.0 : a.alpha;
    const double theta = a.kind == "stable" ? 0.0 : a.theta;
    const double q = a.kind == "stable" ? 1.0 : a.theta;
    mc = cs_monte_carlo(PdLaw{alpha, theta}, q, zs, g, RngStream(seed, fnv1a("cs")), o);
  }
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (mc.empty()) {
      fmt::print(out, "z={} value={}\n", num(zs[i]), num(closed(zs[i])));
    } else {
      fmt::print(out, "z={} value={} mc={} se={}\n", num(zs[i]), num(closed(zs[i])), num(mc[i].estimate),
                 num(mc[i].std_error));
    }
  }
  return 0;
}

struct FindimArgs {
  double theta = 2.0;
  std::optional<double> nu;
  std::optional<double> eta;
  std::string p = "0.5,0.5";
  std::string y;
  std::optional<double> cdf;
  bool mass = false;
};

int cmd_findim(const FindimArgs& a, std::ostream& out) {
  if (a.nu.has_value() == a.eta.has_value()) throw UsageError("findim: give exactly one of --nu and --eta");
  const std::vector<double> p = parse_doubles(a.p, "--p");
  SimplexDensity f_q;
  if (a.nu) {
    std::vector<double> conc;
    for (double pi : p) conc.push_back(*a.nu * pi);
    f_q = [conc](std::span<const double> z) { return dirichlet_density(conc, z); };
  } else {
    const double eta = *a.eta;
    f_q = [eta, p](std::span<const double> z) { return carlton_density(eta, p, z); };
  }
  bool any = false;
  if (!a.y.empty()) {
    const std::vector<double> y = parse_doubles(a.y, "--y");
    if (y.size() != p.size()) throw UsageError("findim: --y and --p differ in length");
    fmt::print(out, "density={}\n", num(findim_density_composed(a.theta, f_q, y)));
    any = true;
  }
  if (a.cdf) {
    if (p.size() != 2) throw UsageError("findim: --cdf needs two cells");
    fmt::print(out, "cdf={}\n", num(findim_cdf_composed(a.theta, f_q, *a.cdf)));
    any = true;
  }
  if (a.mass) {
    if (p.size() != 2) throw UsageError("findim: --mass needs two cells");
    fmt::print(out, "mass={}\n", num(findim_total_mass(a.theta, f_q)));
    any = true;
  }
  if (!any) throw UsageError("findim: give --y, --cdf or --mass");
  return 0;
}

struct ReportOutputs {
  std::string out;
  std::string csv;
  std::string plot_data;
  bool timing = false;
};

void print_case_line(const VerificationReport& r, std::ostream& out) {
  std::string detail;
  for (const Check& c : r.checks)
    if (!c.pass) detail += fmt::format(" {}{}={:.4g}>{:.4g}", c.enforced ? "" : "warning:", c.name, c.value, c.limit);
  if (r.tv) detail = fmt::format(" tv={:.4g} tol={:.4g}", *r.tv, r.config.tol) + detail;
  if (!r.error.empty()) detail += " error: " + r.error;
  if (std::isfinite(r.wall_time)) detail += fmt::format(" ({:.1f}s)", r.wall_time);
  fmt::print(out, "{}: {}{}\n", r.config.case_name, verdict_name(r.verdict), detail);
}

int cmd_verify(const ExperimentConfig& config, const ReportOutputs& o, std::ostream& out) {
  const VerificationReport r = verify_case(config);
  if (!o.out.empty()) write_file(o.out, r.to_json(o.timing).dump(2) + "\n");
  if (!o.csv.empty()) write_file(o.csv, r.table_csv());
  if (!o.plot_data.empty()) write_file(o.plot_data, r.plot_data());
  print_case_line(r, out);
  return r.passed() ? 0 : 1;
}

int cmd_suite(std::uint64_t seed, int threads, const ReportOutputs& o, const std::string& csv_dir, std::ostream& out) {
  const SuiteReport s = run_suite(seed, threads);
  if (!o.out.empty()) write_file(o.out, s.to_json(o.timing).dump(2) + "\n");
  if (!csv_dir.empty())
    for (const auto& r : s.cases) write_file(csv_dir + "/" + r.config.case_name + ".csv", r.table_csv());
  for (const auto& r : s.cases) print_case_line(r, out);
  fmt::print(out, "suite: {} ({:.1f}s)\n", s.passed() ? "pass" : "fail", s.wall_time);
  return s.passed() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coagulation-fragmentation duality toolkit: partition laws, transforms and verification runs"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed_flag;

  SampleArgs sample;
  auto* s = app.add_subcommand("sample", "draw random partitions or GEM masses");
  s->add_option("--spec", sample.spec, "partition law, e.g. pd:alpha=0.5,theta=1");
  s->add_option("-n", sample.n, "ground-set size");
  s->add_option("-N,--count", sample.count, "number of draws")->check(CLI::PositiveNumber);
  s->add_flag("--gem", sample.gem, "draw GEM(alpha, theta) ranked masses instead");
  s->add_option("--alpha", sample.alpha);
  s->add_option("--theta", sample.theta);
  s->add_option("--tail-tol", sample.tail_tol);
  s->add_option("--seed", seed_flag, "seed (default $COAGFRAG_SEED or 42)");

  EppfArgs eppf;
  auto* e = app.add_subcommand("eppf", "evaluate a partition law");
  e->add_option("--spec", eppf.spec, "partition law")->required();
  e->add_option("--sizes", eppf.sizes, "block sizes, e.g. 2,1");
  e->add_option("--partition", eppf.partition, "partition in canonical form, e.g. 0,0,1");
  e->add_option("--all", eppf.all_n, "tabulate every partition of [n]");

  CsArgs cs;
  auto* c = app.add_subcommand("cs", "generalized Cauchy-Stieltjes transform of a step function");
  c->add_option("--kind", cs.kind, "pd | dirichlet | stable | pk_tilted");
  c->add_option("--alpha", cs.alpha);
  c->add_option("--theta", cs.theta);
  c->add_option("--model", cs.model, "subordinator for pk_tilted, e.g. gamma:nu=4");
  c->add_option("--z", cs.z, "comma-separated z values");
  c->add_option("--g", cs.g, "step function, e.g. g=1,3;w=0.5,0.5");
  c->add_option("--mc", cs.mc, "also estimate by Monte Carlo with this many samples");
  c->add_option("--tail-tol", cs.tail_tol);
  c->add_option("--threads", cs.threads);
  c->add_option("--seed", seed_flag);

  FindimArgs fd;
  auto* f = app.add_subcommand("findim", "finite-dimensional law of PD(0, theta) composed with Q");
  f->add_option("--theta", fd.theta);
  f->add_option("--nu", fd.nu, "Q = PD(0, nu): Dirichlet(nu p) mixing");
  f->add_option("--eta", fd.eta, "Q = PD(1/2, eta): Carlton mixing");
  f->add_option("--p", fd.p, "base-measure cell masses");
  f->add_option("--y", fd.y, "evaluate the density at this simplex point");
  f->add_option("--cdf", fd.cdf, "P(Y_1 <= y1), two cells");
  f->add_flag("--mass", fd.mass, "integral of the density, two cells");

  std::string case_name, config_path, model;
  double alpha = 0, beta = 0, theta = 0, nu = 0, tol = 0;
  int n = 0, threads = 0;
  long N = 0, N_master = 0;
  ReportOutputs outputs;
  auto* v = app.add_subcommand("verify", "run one verification case");
  auto* o_case = v->add_option("--case", case_name, fmt::format("one of: {}", fmt::join(case_names(), ", ")));
  auto* o_config = v->add_option("--config", config_path, "JSON file with ExperimentConfig fields");
  auto* o_alpha = v->add_option("--alpha", alpha);
  auto* o_beta = v->add_option("--beta", beta);
  auto* o_theta = v->add_option("--theta", theta);
  auto* o_nu = v->add_option("--nu", nu);
  auto* o_model = v->add_option("--model", model);
  auto* o_n = v->add_option("-n", n);
  auto* o_N = v->add_option("-N", N);
  auto* o_Nm = v->add_option("--N-master", N_master);
  auto* o_tol = v->add_option("--tol", tol);
  v->add_option("--seed", seed_flag);
  v->add_option("--threads", threads);
  v->add_option("--out", outputs.out, "JSON report path");
  v->add_option("--csv", outputs.csv, "per-partition table as CSV");
  v->add_option("--plot-data", outputs.plot_data, "(theoretical, empirical) pairs");
  v->add_flag("--timing", outputs.timing, "include wall_time in the report");

  std::string csv_dir;
  ReportOutputs suite_outputs;
  int suite_threads = 0;
  auto* u = app.add_subcommand("suite", "run every registered case");
  u->add_option("--seed", seed_flag);
  u->add_option("--threads", suite_threads);
  u->add_option("--out", suite_outputs.out, "JSON report path");
  u->add_option("--csv-dir", csv_dir, "directory for per-case CSV tables");
  u->add_flag("--timing", suite_outputs.timing, "include wall_time in the report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    return app.exit(pe, out, err) == 0 ? 0 : 2;
  }

  try {
    const std::uint64_t seed = seed_flag ? *seed_flag : default_seed();
    if (*s) return cmd_sample(sample, seed, out);
    if (*e) return cmd_eppf(eppf, out);
    if (*c) return cmd_cs(cs, seed, out);
    if (*f) return cmd_findim(fd, out);
    if (*v) {
      ExperimentConfig config;
      if (o_config->count()) {
        std::ifstream in(config_path);
        if (!in) throw UsageError(fmt::format("cannot read config '{}'", config_path));
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& je) {
          throw UsageError(fmt::format("config '{}': {}", config_path, je.what()));
        }
        if (o_case->count()) j["case"] = case_name;
        if (j.is_object() && !j.contains("seed")) j["seed"] = seed;
        try {
          config = ExperimentConfig::from_json(j);
        } catch (const nlohmann::json::exception& je) {
          throw UsageError(fmt::format("config '{}': {}", config_path, je.what()));
        }
      } else {
        if (!o_case->count()) throw UsageError("verify: --case or --config is required");
        config = ExperimentConfig::defaults(case_name);
        config.seed = seed;
      }
      if (seed_flag) config.seed = *seed_flag;
      if (o_alpha->count()) config.alpha = alpha;
      if (o_beta->count()) config.beta = beta;
      if (o_theta->count()) config.theta = theta;
      if (o_nu->count()) config.nu = nu;
      if (o_model->count()) config.model = model;
      if (o_n->count()) config.n = n;
      if (o_N->count()) config.N = N;
      if (o_Nm->count()) config.N_master = N_master;
      if (o_tol->count()) config.tol = tol;
      config.threads = threads;
      return cmd_verify(config, outputs, out);
    }
    if (*u) return cmd_suite(seed, suite_threads, suite_outputs, csv_dir, out);
  } catch (const UsageError& ue) {
    fmt::print(err, "error: {}\n", ue.what());
    return 2;
  } catch (const DomainError& de) {
    fmt::print(err, "error: {}\n", de.what());
    return 2;
  } catch (const std::exception& ex) {
    fmt::print(err, "error: {}\n", ex.what());
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace coagfrag
