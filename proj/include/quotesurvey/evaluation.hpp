#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "quotesurvey/distribution.hpp"
#include "quotesurvey/knn.hpp"
#include "quotesurvey/stats.hpp"

namespace quotesurvey {

struct EvalConfig {
  std::vector<std::size_t> k_range = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<double> lambda_grid = {1.0, 1.25, 1.5, 2.0, 3.0, 5.0};
  double epsilon = 1e-9;
  double epsilon_w = 1e-9;
  std::size_t min_quotes = 30;  // cells with fewer quotes are dropped
  std::size_t jobs = 1;
};

enum class Scenario { kLoco, kScv };

std::string_view scenario_name(Scenario s);

/// Summed validation loss of one validation unit (a country for LOCO, a
/// year of the target for SCV).
struct FoldLoss {
  std::string unit;
  double loss = 0.0;
};

struct GridPoint {
  std::size_t k = 1;
  double lambda = 1.0;
  double total = 0.0;  // sum of per_unit losses
  std::vector<FoldLoss> per_unit;
};

/// Hyperparameter search for one held-out target (a country, or a
/// (country, year) for SCV).
struct Selection {
  std::string target;
  std::optional<int> test_year;
  std::vector<GridPoint> grid;
  std::size_t best_k = 1;
  double best_lambda = 1.0;
};

struct CellResult {
  std::string country;
  int year = 0;
  std::size_t n_quotes = 0;
  std::size_t best_k = 1;
  double best_lambda = 1.0;
  double loss = 0.0;  // KL(truth || prediction), nats
  SurveyDistribution truth;
  SurveyDistribution prediction;
};

struct EvaluationReport {
  Scenario scenario = Scenario::kLoco;
  std::vector<CellResult> per_cell;  // sorted by (country, year)
  std::vector<Selection> selections;
  stats::Summary summary;
  std::optional<stats::Correlation> correlation;  // loss vs log10(n_quotes)
  std::vector<std::string> warnings;
};

/// Leave-one-country-out. For every target country the K with the lowest
/// summed validation loss over the other countries (each validated against
/// a pool without the target and itself) is used to predict the target's
/// cells from all other countries. Needs >= 3 countries with usable cells.
EvaluationReport loco_evaluate(std::span<const Sample> samples, const EvalConfig& config);

/// Same-country validation for one target country with >= 3 usable years.
/// For each held-out test year, (K, lambda) is chosen by rotating the
/// validation year over the remaining years; lambda boosts similarity to
/// the target's own cells.
EvaluationReport scv_evaluate(std::span<const Sample> samples, const std::string& target,
                              const EvalConfig& config);

/// scv_evaluate over every country with enough usable years, merged.
EvaluationReport scv_evaluate_all(std::span<const Sample> samples, const EvalConfig& config);

/// Pearson r of per-cell loss against log10(n_quotes).
stats::Correlation correlate_loss_quotes(const EvaluationReport& report);

struct NeighborInfo {
  std::string country;
  int year = 0;
  double divergence = 0.0;
  double weight = 0.0;
};

struct UnsurveyedPrediction {
  std::string country;
  int year = 0;
  std::size_t n_quotes = 0;
  std::size_t k = 1;
  SurveyDistribution prediction;
  Favorability modal = Favorability::kVeryUnfavorable;
  std::vector<NeighborInfo> neighbors;
};

struct UnsurveyedResult {
  std::vector<UnsurveyedPrediction> predictions;
  std::optional<Selection> selection;
  std::vector<std::string> warnings;
};

/// Chooses K by LOCO-style validation over the surveyed countries, then
/// predicts every target cell from all surveyed cells.
UnsurveyedResult predict_unsurveyed(std::span<const Sample> surveyed,
                                    std::span<const Sample> targets, const EvalConfig& config);

/// Training-pool construction, exposed so leakage can be checked directly.
/// All return indices into `samples`.
namespace folds {
std::vector<std::size_t> loco_validation_pool(std::span<const Sample> samples,
                                              const std::string& target,
                                              const std::string& validation);
std::vector<std::size_t> loco_test_pool(std::span<const Sample> samples, const std::string& target);
std::vector<std::size_t> scv_validation_pool(std::span<const Sample> samples,
                                             const std::string& target, int test_year,
                                             int validation_year);
std::vector<std::size_t> scv_test_pool(std::span<const Sample> samples, const std::string& target,
                                       int test_year);
}  // namespace folds

nlohmann::ordered_json to_json(const EvaluationReport& report, const EvalConfig& config);
/// Reads back the per-cell rows of a report written by to_json.
EvaluationReport report_from_json(const nlohmann::json& doc);

/// `country,year,n_quotes,best_k,best_lambda,loss`
void write_cells_csv(std::ostream& out, const EvaluationReport& report);
/// `country,year,source,vuf,uf,f,vf` with truth and prediction rows.
void write_distributions_csv(std::ostream& out, const EvaluationReport& report);
/// `country,year,n_quotes,log10_n_quotes,loss`
void write_scatter_csv(std::ostream& out, const EvaluationReport& report);

nlohmann::ordered_json to_json(const UnsurveyedResult& result);

}  // namespace quotesurvey
