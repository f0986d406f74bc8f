#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stocknet/factors.hpp"
#include "stocknet/ingest.hpp"
#include "stocknet/network.hpp"
#include "stocknet/synth.hpp"

namespace stocknet::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kNumericalError = 3,
  kInternalError = 4,
};

/// Fixed file names inside the output directory.
namespace files {
inline constexpr const char* kReturns = "returns.csv";
inline constexpr const char* kEdges = "mst_edges.csv";
inline constexpr const char* kDot = "mst.dot";
inline constexpr const char* kDegrees = "degrees.csv";
inline constexpr const char* kDegreeDistribution = "degree_distribution.csv";
inline constexpr const char* kPowerLaw = "power_law.csv";
inline constexpr const char* kEigenvalues = "eigenvalues.csv";
inline constexpr const char* kLoadings = "loadings.csv";
inline constexpr const char* kScores = "scores.csv";
inline constexpr const char* kScoreCorrelations = "score_correlations.csv";
inline constexpr const char* kRegression = "regression.csv";
inline constexpr const char* kIndustryIndexes = "industry_indexes.csv";
inline constexpr const char* kFactorIndustry = "factor_industry.csv";
inline constexpr const char* kProfile = "degree_r2_profile.csv";
inline constexpr const char* kSummary = "summary.txt";
inline constexpr const char* kPrices = "prices.csv";
inline constexpr const char* kMembership = "membership.csv";
inline constexpr const char* kTrueLoadings = "true_loadings.csv";
inline constexpr const char* kTrueScores = "true_scores.csv";
}  // namespace files

struct RunConfig {
  std::optional<std::filesystem::path> prices;
  std::optional<std::filesystem::path> membership;
  // Stage inputs; default to the matching file in `out`.
  std::optional<std::filesystem::path> returns;
  std::optional<std::filesystem::path> scores;
  std::optional<std::filesystem::path> edges;
  std::optional<std::filesystem::path> regression;
  GapPolicy gap_policy = GapPolicy::reject;
  std::filesystem::path out = ".";
  std::optional<std::size_t> factors;  // overrides the Kaiser count
  bool no_rotate = false;
  bool industry = false;  // require the industry stage
  SynthSpec synth;
  double price_scale = 0.01;
};

/// A stage failed; carries the stage name and the exit status to report.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, ExitCode code, const std::string& what)
      : std::runtime_error("stage " + stage + ": " + what), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const noexcept { return stage_; }
  ExitCode code() const noexcept { return code_; }

 private:
  std::string stage_;
  ExitCode code_;
};

struct NetworkInfo {
  std::size_t n = 0;
  int l_min = 0;
  int l_max = 0;
  std::optional<PowerLawFit> power_law;
};

struct FactorInfo {
  std::size_t t = 0;
  std::size_t k = 0;
  std::size_t kaiser_k = 0;
  bool rotated = false;
  std::optional<double> mean_score_correlation;
};

struct RegressInfo {
  double mean_r_squared = 0.0;
  std::optional<double> mean_residual_correlation;
};

struct IndustryInfo {
  std::size_t qualifying = 0;
};

// Stage entry points. Each reads its inputs from files and writes its
// outputs into config.out.
ReturnPanel cmd_ingest(const RunConfig& config);
NetworkInfo cmd_network(const RunConfig& config);
FactorInfo cmd_factors(const RunConfig& config);
RegressInfo cmd_regress(const RunConfig& config);
IndustryInfo cmd_industry(const RunConfig& config);
void cmd_profile(const RunConfig& config);
/// ingest → network → factors → regress → industry (when membership is
/// given) → profile, then summary.txt.
void cmd_analyze(const RunConfig& config);
void cmd_synth(const RunConfig& config);

/// Parses arguments and dispatches; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stocknet::cli
