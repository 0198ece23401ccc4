#pragma once

// Verification runner: exact versus empirical partition laws, the duality
// cases, and JSON/CSV reports.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coagfrag/eppf.hpp"
#include "coagfrag/rng.hpp"
#include "coagfrag/samplers.hpp"

namespace coagfrag {

/// Canonical partition key ("0,0,1") -> probability or frequency.
using Distribution = std::map<std::string, double>;

/// Every partition of [n] with its EPPF value; n <= 8.
Distribution exact_distribution(const EppfSpec& spec, int n);
Distribution exact_distribution(const EppfFunction& eppf, int n);

/// Normalized counts of N draws. Draws come in fixed-size chunks, chunk c
/// using rng.derive(c), so the result does not depend on `threads`
/// (0 = hardware concurrency).
Distribution empirical_distribution(const PartitionSampler& sampler, int n, long N, const RngStream& rng,
                                    int threads = 0);

/// Half the L1 distance; keys missing from one side count as 0.
double tv_distance(const Distribution& a, const Distribution& b);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  /// Number of cells after pooling those with expected count < 5.
  int cells = 0;
};

/// Pearson statistic of N observations at frequencies `empirical` against
/// `exact`. Cells with expected count below 5 are pooled (in key order)
/// until the pool reaches 5.
ChiSquare chi_square(const Distribution& exact, const Distribution& empirical, long N);

/// Expected TV distance from sampling noise alone:
/// sum_b sqrt(p_b (1 - p_b) / N) * (1/2) * sqrt(2/pi).
double tv_noise_scale(const Distribution& exact, long N);

inline constexpr std::string_view kReportSchema = "coagfrag-report/1";

/// Registered cases, in suite order.
const std::vector<std::string>& case_names();

/// Parameters of one case. Fields a case does not use are ignored; `tol`
/// is the TV bound for sampling cases, the absolute bound for
/// bayes-consistency, the number of standard errors for cs-check and the
/// Kolmogorov-Smirnov bound for findim-check.
struct ExperimentConfig {
  std::string case_name;
  double alpha = 0.5;
  double beta = 0.5;
  double theta = 1.0;
  double nu = 4.0;
  std::string model = "gamma:nu=4";
  int n = 6;
  long N = 200'000;
  /// cs-check: samples for each master-identity estimate.
  long N_master = 200'000;
  std::uint64_t seed = 42;
  double tol = 0.015;
  /// cs-check step function and arguments.
  std::string step = "g=1,3;w=0.5,0.5";
  std::vector<double> z = {0.5, 1.0, 2.0};
  /// findim-check base-measure cell masses.
  std::vector<double> p = {0.3, 0.7};
  /// Worker threads for sampling; results do not depend on it. Not echoed.
  int threads = 0;

  /// Suite defaults for a registered case; throws DomainError for unknown names.
  static ExperimentConfig defaults(std::string_view case_name);
  /// Overlays the keys present in `j` on defaults(j["case"]).
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TableRow {
  std::string key;
  double theoretical = 0.0;
  double empirical = 0.0;
};

/// A case-specific condition: value <= limit. Only enforced checks enter
/// the verdict; the others are reported diagnostics.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
  bool enforced = true;
};

enum class Verdict { Pass, Fail, Error };

struct VerificationReport {
  ExperimentConfig config;
  std::uint64_t stream_id = 0;
  std::vector<TableRow> table;
  std::optional<double> tv;
  std::optional<ChiSquare> chi;
  /// TV noise scale for sampling cases, standard error or KS scale otherwise.
  std::optional<double> noise_scale;
  std::vector<Check> checks;
  Verdict verdict = Verdict::Error;
  std::string error;
  double wall_time = 0.0;

  bool passed() const { return verdict == Verdict::Pass; }
  /// wall_time is written only when `timing` is set, so that reruns with the
  /// same seed give identical documents.
  nlohmann::json to_json(bool timing = false) const;
  /// "partition,theoretical,empirical" rows.
  std::string table_csv() const;
  /// "theoretical empirical" pairs, one per line.
  std::string plot_data() const;
};

/// Runs one case on the stream RngStream(config.seed, fnv1a(case_name)).
/// Evaluation failures produce Verdict::Error instead of throwing.
VerificationReport verify_case(const ExperimentConfig& config);

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<VerificationReport> cases;
  double wall_time = 0.0;

  bool passed() const;
  nlohmann::json to_json(bool timing = false) const;
};

/// All registered cases with their defaults and the given master seed.
/// Cases run concurrently on `threads` workers (0 = hardware concurrency);
/// reports keep registration order.
SuiteReport run_suite(std::uint64_t seed, int threads = 0);

const char* verdict_name(Verdict v);

}  // namespace coagfrag
