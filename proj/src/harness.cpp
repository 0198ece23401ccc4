#include "coagfrag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <memory>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "coagfrag/coag_frag.hpp"
#include "coagfrag/errors.hpp"
#include "coagfrag/partition.hpp"
#include "coagfrag/spec_parse.hpp"
#include "coagfrag/transforms.hpp"

namespace coagfrag {

namespace {

constexpr long kChunk = 4096;
constexpr int kMaxEnumerationN = 8;
constexpr double kNormalizationTol = 1e-6;
/// E[sup of a Brownian bridge] = sqrt(pi/2) ln 2.
const double kKsNoise = std::sqrt(std::numbers::pi / 2.0) * std::numbers::ln2;

int resolve_threads(int threads, long jobs) {
  long t = threads > 0 ? threads : static_cast<long>(std::thread::hardware_concurrency());
  return static_cast<int>(std::clamp<long>(t, 1, std::max<long>(jobs, 1)));
}

/// Runs body(c) for c in [0, jobs) on a pool of workers.
template <typename Body>
void parallel_for(long jobs, int threads, Body body) {
  const int workers = resolve_threads(threads, jobs);
  std::atomic<long> next{0};
  auto run = [&] {
    for (long c = next++; c < jobs; c = next++) body(c);
  };
  if (workers == 1) {
    run();
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
}

void check_enumeration_n(int n, const char* who) {
  if (n < 1 || n > kMaxEnumerationN) throw DomainError(fmt::format("{}: n={} outside [1, {}]", who, n, kMaxEnumerationN));
}

Check make_check(std::string name, double value, double limit, bool enforced = true) {
  return {std::move(name), value, limit, value <= limit, enforced};
}

double table_sum(const Distribution& d) {
  double s = 0.0;
  for (const auto& [k, v] : d) s += v;
  return s;
}

double gamma_nu_of(const LevyModel& model) {
  const std::string spec = model.spec();
  constexpr std::string_view prefix = "gamma:nu=";
  if (!spec.starts_with(prefix)) return 0.0;
  return parse_number(std::string_view(spec).substr(prefix.size()), "nu");
}

/// Shared tail of the sampling cases: table, TV, chi-square and the checks.
void finish_sampling_case(VerificationReport& r, const Distribution& exact, const Distribution& empirical) {
  const ExperimentConfig& c = r.config;
  std::set<std::string> keys;
  for (const auto& [k, v] : exact) keys.insert(k);
  for (const auto& [k, v] : empirical) keys.insert(k);
  for (const auto& k : keys) {
    const auto e = exact.find(k);
    const auto m = empirical.find(k);
    r.table.push_back({k, e == exact.end() ? 0.0 : e->second, m == empirical.end() ? 0.0 : m->second});
  }
  r.tv = tv_distance(exact, empirical);
  r.chi = chi_square(exact, empirical, c.N);
  r.noise_scale = tv_noise_scale(exact, c.N);
  r.checks.push_back(make_check("tv_distance", *r.tv, c.tol));
  // Diagnostic: at n = 6 and N = 2e5 the noise scale is ~0.0115, so a 0.015
  // bound has less than 1.5x headroom.
  r.checks.push_back(make_check("noise_headroom", 1.5 * *r.noise_scale, c.tol, false));
  r.checks.push_back(make_check("normalization", std::abs(table_sum(exact) - 1.0), kNormalizationTol));
}

void run_pitman_coag(VerificationReport& r, const RngStream& rng) {
  const ExperimentConfig& c = r.config;
  check_enumeration_n(c.n, "pitman-coag");
  const double alpha = c.alpha, beta = c.beta, theta = c.theta;
  const EppfSpec target = EppfSpec::pd(alpha * beta, theta);
  EppfSpec::pd(beta, theta / alpha);  // range check for Q
  PartitionSampler sampler = [=](int n, RngStream& s) {
    return compose_coagulated_sample(alpha, theta, crp_sampler(beta, theta / alpha), n, s);
  };
  finish_sampling_case(r, exact_distribution(target, c.n), empirical_distribution(sampler, c.n, c.N, rng, c.threads));
}

void run_pitman_frag(VerificationReport& r, const RngStream& rng) {
  const ExperimentConfig& c = r.config;
  check_enumeration_n(c.n, "pitman-frag");
  const double alpha = c.alpha, beta = c.beta, theta = c.theta;
  EppfSpec::pd(alpha * beta, theta);
  EppfSpec::pd(alpha, -alpha * beta);
  const EppfSpec target = EppfSpec::pd(alpha, theta);
  PartitionSampler sampler = [=](int n, RngStream& s) {
    const SetPartition coarse = crp_partition(alpha * beta, theta, n, s);
    return frag_partition(coarse, crp_sampler(alpha, -alpha * beta), s);
  };
  finish_sampling_case(r, exact_distribution(target, c.n), empirical_distribution(sampler, c.n, c.N, rng, c.threads));
}

void run_thm1_coag(VerificationReport& r, const RngStream& rng) {
  const ExperimentConfig& c = r.config;
  check_enumeration_n(c.n, "thm1-coag");
  const LevyModel model = parse_model(c.model);
  const double alpha = c.alpha, theta = c.theta;
  const EppfSpec target = EppfSpec::ps(model, alpha, theta);
  const EppfSpec q_law = EppfSpec::pk_tilted(model, theta / alpha);
  auto predictive = std::make_shared<PredictiveEppfSampler>([q_law](const SizeComposition& s) {
    return evaluate(q_law, s);
  });
  PartitionSampler q_sampler = [predictive](int k, RngStream& s) { return predictive->sample(k, s); };
  PartitionSampler sampler = [=](int n, RngStream& s) {
    return compose_coagulated_sample(alpha, theta, q_sampler, n, s);
  };
  const Distribution exact = exact_distribution(target, c.n);
  finish_sampling_case(r, exact, empirical_distribution(sampler, c.n, c.N, rng, c.threads));
  r.checks.push_back(make_check("q_predictive_defect", predictive->max_weight_defect(), 1e-6));
  // For a gamma model the law is also the Linnik EPPF written with R_n.
  if (const double nu = gamma_nu_of(model); nu > 0.0) {
    double diff = 0.0;
    const Distribution linnik = exact_distribution(EppfSpec::linnik(nu, alpha, theta), c.n);
    for (const auto& [k, v] : exact) diff = std::max(diff, std::abs(v - linnik.at(k)));
    r.checks.push_back(make_check("ps_vs_linnik", diff, 1e-6));
  }
}

void run_linnik_coag(VerificationReport& r, const RngStream& rng) {
  const ExperimentConfig& c = r.config;
  check_enumeration_n(c.n, "linnik-coag");
  const double alpha = c.alpha, theta = c.theta, nu = c.nu;
  const EppfSpec target = EppfSpec::linnik(nu, alpha, theta);
  PartitionSampler sampler = [=](int n, RngStream& s) {
    return compose_coagulated_sample(alpha, theta, crp_sampler(0.0, nu), n, s);
  };
  finish_sampling_case(r, exact_distribution(target, c.n), empirical_distribution(sampler, c.n, c.N, rng, c.threads));
}

/// Joint law of (fine, grouping) by enumeration, then Bayes rule.
void run_bayes_consistency(VerificationReport& r) {
  const ExperimentConfig& c = r.config;
  check_enumeration_n(c.n, "bayes-consistency");
  const double alpha = c.alpha, theta = c.theta, nu = c.nu;
  EppfSpec::linnik(nu, alpha, theta);
  const LevyModel gamma = gamma_model(nu);

  std::map<std::string, double> linnik_memo;
  auto linnik = [&](const SizeComposition& s) {
    auto [it, fresh] = linnik_memo.try_emplace(s.key(), 0.0);
    if (fresh) it->second = eppf_linnik(nu, alpha, theta, s);
    return it->second;
  };
  // Both kernels depend on (fine sizes, refinement counts, coarse sizes) only.
  std::map<std::string, std::pair<double, double>> kernel_memo;
  auto kernels = [&](const SetPartition& fine, const SetPartition& coarse) {
    std::vector<int> j = refinement_counts(fine, coarse);
    std::vector<std::pair<int, int>> bj;
    const auto b = coarse.block_sizes();
    for (std::size_t i = 0; i < j.size(); ++i) bj.emplace_back(b[i], j[i]);
    std::sort(bj.begin(), bj.end());
    std::string key = fine.composition().key() + "|";
    for (auto [bi, ji] : bj) key += fmt::format("{}:{},", bi, ji);
    auto [it, fresh] = kernel_memo.try_emplace(key);
    if (fresh)
      it->second = {frag_kernel_eppf_dirichlet(nu, alpha, theta, fine, coarse),
                    frag_kernel_eppf(gamma, alpha, theta, fine, coarse)};
    return it->second;
  };

  double marginal_diff = 0.0, dirichlet_diff = 0.0, gamma_diff = 0.0, kernel_sum_diff = 0.0, joint_diff = 0.0;
  for (int m = 1; m <= c.n; ++m) {
    struct Entry {
      SetPartition fine;
      SetPartition coarse;
      double joint;
    };
    std::vector<Entry> entries;
    std::map<SetPartition, double> marginal;
    double joint_total = 0.0;
    for (const SetPartition& fine : enumerate_partitions(m)) {
      const double p_fine = eppf_pd(alpha, theta, fine.composition());
      for (const SetPartition& grouping : enumerate_partitions(fine.num_blocks())) {
        const double joint = p_fine * eppf_pd(0.0, nu, grouping.composition());
        const SetPartition coarse = coag_partition(fine, grouping);
        marginal[coarse] += joint;
        joint_total += joint;
        entries.push_back({fine, coarse, joint});
      }
    }
    joint_diff = std::max(joint_diff, std::abs(joint_total - 1.0));
    for (const auto& [coarse, p] : marginal) {
      const double theory = linnik(coarse.composition());
      marginal_diff = std::max(marginal_diff, std::abs(p - theory));
      if (m == c.n) r.table.push_back({coarse.key(), theory, p});
    }
    std::map<SetPartition, double> kernel_sums;
    for (const Entry& e : entries) {
      const double conditional = e.joint / marginal.at(e.coarse);
      const auto [k_dirichlet, k_gamma] = kernels(e.fine, e.coarse);
      dirichlet_diff = std::max(dirichlet_diff, std::abs(conditional - k_dirichlet));
      gamma_diff = std::max(gamma_diff, std::abs(conditional - k_gamma));
      kernel_sums[e.coarse] += k_dirichlet;
    }
    for (const auto& [coarse, s] : kernel_sums) kernel_sum_diff = std::max(kernel_sum_diff, std::abs(s - 1.0));
  }
  double tv = 0.0;
  for (const TableRow& row : r.table) tv += 0.5 * std::abs(row.theoretical - row.empirical);
  r.tv = tv;
  r.checks.push_back(make_check("joint_normalization", joint_diff, c.tol));
  r.checks.push_back(make_check("coarse_marginal_vs_linnik", marginal_diff, c.tol));
  r.checks.push_back(make_check("conditional_vs_dirichlet_kernel", dirichlet_diff, c.tol));
  r.checks.push_back(make_check("conditional_vs_gamma_kernel", gamma_diff, c.tol));
  r.checks.push_back(make_check("dirichlet_kernel_sums", kernel_sum_diff, c.tol));
}

void run_cs_check(VerificationReport& r, const RngStream& rng) {
  const ExperimentConfig& c = r.config;
  const StepFunction g = StepFunction::parse(c.step);
  const double alpha = c.alpha, beta = c.beta, theta = c.theta;
  McOptions options;
  options.samples = c.N;
  options.threads = c.threads;
  double worst_se = 0.0;

  const std::vector<McEstimate> direct = cs_monte_carlo(PdLaw{alpha, theta}, theta, c.z, g, rng.derive(0), options);
  for (const McEstimate& e : direct) {
    const double exact = cs_pd(alpha, theta, e.z, g);
    r.table.push_back({fmt::format("pd z={}", e.z), exact, e.estimate});
    r.checks.push_back(make_check(fmt::format("mc_pd_z={}", e.z), std::abs(e.estimate - exact) / e.std_error, c.tol));
    worst_se = std::max(worst_se, e.std_error);
  }
  const LevyModel stable = stable_model(alpha);
  for (double z : c.z) {
    const double exact = cs_pd(alpha, theta, z, g);
    const double via_pk = cs_pk_tilted(stable, theta, z, g);
    r.table.push_back({fmt::format("pk_tilted z={}", z), exact, via_pk});
    r.checks.push_back(make_check(fmt::format("pk_tilted_rel_z={}", z), std::abs(via_pk / exact - 1.0), 1e-6));
  }
  // E[(1 + tau_Q(g_alpha))^{-theta/alpha}] with Q ~ PD(beta, theta/alpha)
  // equals the PD(alpha beta, theta) transform at z.
  options.samples = c.N_master;
  for (std::size_t i = 0; i < c.z.size(); ++i) {
    const double z = c.z[i];
    const double exact = cs_pd(alpha * beta, theta, z, g);
    const McEstimate e = cs_monte_carlo(PdLaw{beta, theta / alpha}, theta / alpha, 1.0, alpha_transformed(g, alpha, z),
                                        rng.derive(1 + i), options);
    r.table.push_back({fmt::format("master z={}", z), exact, e.estimate});
    r.checks.push_back(make_check(fmt::format("master_z={}", z), std::abs(e.estimate - exact) / e.std_error, c.tol));
    worst_se = std::max(worst_se, e.std_error);
  }
  r.noise_scale = worst_se;
}

void run_findim_check(VerificationReport& r, const RngStream& rng) {
  const ExperimentConfig& c = r.config;
  if (c.p.size() != 2) throw DomainError("findim-check: p must have two cells");
  const double theta = c.theta, nu = c.nu;
  const std::vector<double> conc = {nu * c.p[0], nu * c.p[1]};
  SimplexDensity f_q = [conc](std::span<const double> z) { return dirichlet_density(conc, z); };

  // Two-stage sampler: Z ~ Dirichlet(nu p), then Y ~ Dirichlet(theta Z).
  std::vector<double> y1(static_cast<std::size_t>(c.N));
  const long chunks = (c.N + kChunk - 1) / kChunk;
  parallel_for(chunks, c.threads, [&](long k) {
    RngStream s = rng.derive(static_cast<std::uint64_t>(k));
    for (long i = k * kChunk; i < std::min(c.N, (k + 1) * kChunk); ++i) {
      const std::vector<double> z = dirichlet_vector(conc, s);
      const double tz[2] = {theta * z[0], theta * z[1]};
      y1[static_cast<std::size_t>(i)] = dirichlet_vector(tz, s)[0];
    }
  });
  std::sort(y1.begin(), y1.end());

  // KS distance bounded on a grid of empirical quantiles: between grid points
  // both CDFs are monotone, so the sup exceeds the grid maximum by at most the
  // largest step of the model CDF.
  constexpr int kGrid = 1000;
  const double n = static_cast<double>(c.N);
  double grid_max = 0.0, gap_max = 0.0, prev_f = 0.0;
  for (int i = 1; i < kGrid; ++i) {
    const double x = y1[static_cast<std::size_t>(static_cast<double>(i) / kGrid * (n - 1))];
    if (!(x > 0.0 && x < 1.0)) continue;
    const double f = findim_cdf_composed(theta, f_q, x);
    const double below = static_cast<double>(std::lower_bound(y1.begin(), y1.end(), x) - y1.begin()) / n;
    const double upto = static_cast<double>(std::upper_bound(y1.begin(), y1.end(), x) - y1.begin()) / n;
    grid_max = std::max({grid_max, std::abs(below - f), std::abs(upto - f)});
    gap_max = std::max(gap_max, f - prev_f);
    prev_f = f;
  }
  gap_max = std::max(gap_max, 1.0 - prev_f);
  for (int i = 1; i < 20; ++i) {
    const double x = i / 20.0;
    const double upto = static_cast<double>(std::upper_bound(y1.begin(), y1.end(), x) - y1.begin()) / n;
    r.table.push_back({fmt::format("F(y1={})", x), findim_cdf_composed(theta, f_q, x), upto});
  }
  const double mass = findim_total_mass(theta, f_q);
  r.noise_scale = kKsNoise / std::sqrt(n);
  r.checks.push_back(make_check("ks_grid", grid_max, c.tol));
  r.checks.push_back(make_check("ks_bound", grid_max + gap_max, c.tol));
  r.checks.push_back(make_check("noise_headroom", 1.5 * *r.noise_scale, c.tol, false));
  r.checks.push_back(make_check("density_mass", std::abs(mass - 1.0), 1e-4));
}

}  // namespace

Distribution exact_distribution(const EppfFunction& eppf, int n) {
  check_enumeration_n(n, "exact_distribution");
  std::map<SizeComposition, double> memo;
  Distribution out;
  for (const SetPartition& p : enumerate_partitions(n)) {
    const SizeComposition s = p.composition();
    auto it = memo.find(s);
    if (it == memo.end()) it = memo.emplace(s, eppf(s)).first;
    out[p.key()] = it->second;
  }
  return out;
}

Distribution exact_distribution(const EppfSpec& spec, int n) {
  return exact_distribution([&spec](const SizeComposition& s) { return evaluate(spec, s); }, n);
}

Distribution empirical_distribution(const PartitionSampler& sampler, int n, long N, const RngStream& rng,
                                    int threads) {
  if (N < 1) throw DomainError("empirical_distribution: N must be >= 1");
  const long chunks = (N + kChunk - 1) / kChunk;
  std::vector<std::map<std::string, long>> counts(static_cast<std::size_t>(chunks));
  parallel_for(chunks, threads, [&](long c) {
    RngStream s = rng.derive(static_cast<std::uint64_t>(c));
    auto& local = counts[static_cast<std::size_t>(c)];
    for (long i = c * kChunk; i < std::min(N, (c + 1) * kChunk); ++i) ++local[sampler(n, s).key()];
  });
  std::map<std::string, long> total;
  for (const auto& local : counts)
    for (const auto& [k, v] : local) total[k] += v;
  Distribution out;
  for (const auto& [k, v] : total) out[k] = static_cast<double>(v) / static_cast<double>(N);
  return out;
}

double tv_distance(const Distribution& a, const Distribution& b) {
  double s = 0.0;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    s += std::abs(v - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : b)
    if (!a.contains(k)) s += std::abs(v);
  return std::min(1.0, 0.5 * s);
}

ChiSquare chi_square(const Distribution& exact, const Distribution& empirical, long N) {
  const double n = static_cast<double>(N);
  std::vector<std::pair<double, double>> cells;  // (expected, observed)
  double pool_expected = 0.0, pool_observed = 0.0;
  for (const auto& [k, p] : exact) {
    const auto it = empirical.find(k);
    pool_expected += p * n;
    pool_observed += (it == empirical.end() ? 0.0 : it->second) * n;
    if (pool_expected >= 5.0) {
      cells.emplace_back(pool_expected, pool_observed);
      pool_expected = pool_observed = 0.0;
    }
  }
  // Observations on keys the exact law lacks, and a short final pool, join
  // the last cell.
  for (const auto& [k, f] : empirical)
    if (!exact.contains(k)) pool_observed += f * n;
  if (cells.empty()) cells.emplace_back(0.0, 0.0);
  cells.back().first += pool_expected;
  cells.back().second += pool_observed;

  ChiSquare out;
  for (const auto& [e, o] : cells) {
    if (e > 0.0) out.statistic += (o - e) * (o - e) / e;
    else if (o > 0.0) out.statistic = std::numeric_limits<double>::infinity();
  }
  out.cells = static_cast<int>(cells.size());
  out.dof = std::max(out.cells - 1, 0);
  return out;
}

double tv_noise_scale(const Distribution& exact, long N) {
  double s = 0.0;
  for (const auto& [k, p] : exact) s += std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(N));
  return s * 0.5 * std::sqrt(2.0 / std::numbers::pi);
}

const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names = {"pitman-coag", "pitman-frag",  "thm1-coag",   "linnik-coag",
                                                 "bayes-consistency", "cs-check", "findim-check"};
  return names;
}

ExperimentConfig ExperimentConfig::defaults(std::string_view case_name) {
  const auto& names = case_names();
  if (std::find(names.begin(), names.end(), case_name) == names.end())
    throw DomainError(fmt::format("unknown case '{}'", case_name));
  ExperimentConfig c;
  c.case_name = std::string(case_name);
  if (case_name == "thm1-coag" || case_name == "linnik-coag") c.n = 5;
  if (case_name == "bayes-consistency") {
    c.n = 5;
    c.tol = 1e-6;
  }
  if (case_name == "cs-check") {
    c.N = 1'000'000;
    c.tol = 3.0;
  }
  if (case_name == "findim-check") {
    c.theta = 2.0;
    c.nu = 3.0;
    c.tol = 0.01;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("case")) throw DomainError("config: expected an object with a \"case\" field");
  ExperimentConfig c = defaults(j.at("case").get<std::string>());
  for (const auto& [key, value] : j.items()) {
    if (key == "case") continue;
    if (key == "alpha") c.alpha = value.get<double>();
    else if (key == "beta") c.beta = value.get<double>();
    else if (key == "theta") c.theta = value.get<double>();
    else if (key == "nu") c.nu = value.get<double>();
    else if (key == "model") c.model = value.get<std::string>();
    else if (key == "n") c.n = value.get<int>();
    else if (key == "N") c.N = value.get<long>();
    else if (key == "N_master") c.N_master = value.get<long>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "tol") c.tol = value.get<double>();
    else if (key == "step") c.step = value.get<std::string>();
    else if (key == "z") c.z = value.get<std::vector<double>>();
    else if (key == "p") c.p = value.get<std::vector<double>>();
    else if (key == "threads") c.threads = value.get<int>();
    else throw DomainError(fmt::format("config: unknown field '{}'", key));
  }
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"case", case_name}, {"alpha", alpha}, {"beta", beta},         {"theta", theta}, {"nu", nu},
          {"model", model},    {"n", n},         {"N", N},               {"N_master", N_master},
          {"seed", seed},      {"tol", tol},     {"step", step},         {"z", z},         {"p", p}};
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Error:
      return "error";
  }
  return "error";
}

nlohmann::json VerificationReport::to_json(bool timing) const {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["config"] = config.to_json();
  j["stream_id"] = stream_id;
  j["table"] = nlohmann::json::array();
  for (const TableRow& row : table)
    j["table"].push_back({{"partition", row.key}, {"theoretical", row.theoretical}, {"empirical", row.empirical}});
  if (tv) j["tv_distance"] = *tv;
  if (chi) j["chi_square"] = {{"statistic", chi->statistic}, {"dof", chi->dof}, {"cells", chi->cells}};
  if (noise_scale) j["mc_std_error_scale"] = *noise_scale;
  j["checks"] = nlohmann::json::array();
  for (const Check& c : checks)
    j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}, {"enforced", c.enforced}});
  j["verdict"] = verdict_name(verdict);
  if (!error.empty()) j["error"] = error;
  if (timing) j["wall_time"] = wall_time;
  return j;
}

std::string VerificationReport::table_csv() const {
  std::string out = "partition,theoretical,empirical\n";
  for (const TableRow& row : table) out += fmt::format("\"{}\",{:.17g},{:.17g}\n", row.key, row.theoretical, row.empirical);
  return out;
}

std::string VerificationReport::plot_data() const {
  std::string out;
  for (const TableRow& row : table) out += fmt::format("{:.17g} {:.17g}\n", row.theoretical, row.empirical);
  return out;
}

VerificationReport verify_case(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport r;
  r.config = config;
  r.stream_id = fnv1a(config.case_name);
  try {
    if (config.N < 1 || config.N_master < 1) throw DomainError("N must be >= 1");
    const RngStream rng(config.seed, r.stream_id);
    const std::string& name = config.case_name;
    if (name == "pitman-coag") run_pitman_coag(r, rng);
    else if (name == "pitman-frag") run_pitman_frag(r, rng);
    else if (name == "thm1-coag") run_thm1_coag(r, rng);
    else if (name == "linnik-coag") run_linnik_coag(r, rng);
    else if (name == "bayes-consistency") run_bayes_consistency(r);
    else if (name == "cs-check") run_cs_check(r, rng);
    else if (name == "findim-check") run_findim_check(r, rng);
    else throw DomainError(fmt::format("unknown case '{}'", name));
    const bool ok = !r.checks.empty() &&
                    std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass || !c.enforced; });
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
  } catch (const std::exception& e) {
    r.verdict = Verdict::Error;
    r.error = e.what();
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

bool SuiteReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const VerificationReport& r) { return r.passed(); });
}

nlohmann::json SuiteReport::to_json(bool timing) const {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["seed"] = seed;
  j["cases"] = nlohmann::json::array();
  for (const auto& r : cases) j["cases"].push_back(r.to_json(timing));
  j["verdict"] = passed() ? "pass" : "fail";
  if (timing) j["wall_time"] = wall_time;
  return j;
}

SuiteReport run_suite(std::uint64_t seed, int threads) {
  const auto start = std::chrono::steady_clock::now();
  SuiteReport suite;
  suite.seed = seed;
  const auto& names = case_names();
  const long jobs = static_cast<long>(names.size());
  const int workers = resolve_threads(threads, jobs);
  suite.cases.resize(names.size());
  parallel_for(jobs, workers, [&](long i) {
    ExperimentConfig c = ExperimentConfig::defaults(names[static_cast<std::size_t>(i)]);
    c.seed = seed;
    // Cases already share the workers; nested sampling stays on one thread.
    c.threads = workers > 1 ? 1 : threads;
    suite.cases[static_cast<std::size_t>(i)] = verify_case(c);
  });
  suite.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return suite;
}

}  // namespace coagfrag
