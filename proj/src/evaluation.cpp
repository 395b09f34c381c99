#include "quotesurvey/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "quotesurvey/error.hpp"
#include "quotesurvey/parallel.hpp"

namespace quotesurvey {

namespace {

using CellKey = std::pair<std::string, int>;

EvalConfig normalized(const EvalConfig& in) {
  EvalConfig cfg = in;
  std::sort(cfg.k_range.begin(), cfg.k_range.end());
  cfg.k_range.erase(std::unique(cfg.k_range.begin(), cfg.k_range.end()), cfg.k_range.end());
  std::sort(cfg.lambda_grid.begin(), cfg.lambda_grid.end());
  cfg.lambda_grid.erase(std::unique(cfg.lambda_grid.begin(), cfg.lambda_grid.end()),
                        cfg.lambda_grid.end());
  if (cfg.k_range.empty() || cfg.k_range.front() < 1) {
    throw std::invalid_argument("k range must be non-empty with k >= 1");
  }
  if (cfg.lambda_grid.empty() || !(cfg.lambda_grid.front() >= 1.0)) {
    throw std::invalid_argument("lambda grid must be non-empty with lambda >= 1");
  }
  if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!(cfg.epsilon_w > 0.0)) throw std::invalid_argument("epsilon_w must be > 0");
  cfg.jobs = std::max<std::size_t>(1, cfg.jobs);
  return cfg;
}

struct UsableCells {
  std::vector<Sample> cells;  // surveyed, >= min_quotes, sorted by (country, year)
  std::vector<std::string> countries;
  std::map<CellKey, std::size_t> index;
  std::vector<std::string> warnings;
};

UsableCells usable_cells(std::span<const Sample> samples, std::size_t min_quotes) {
  UsableCells u;
  for (const auto& s : samples) {
    if (!s.survey) continue;
    if (s.n_quotes() < min_quotes) {
      u.warnings.push_back(fmt::format("cell {}/{} has {} quotes (< {}) and is dropped", s.country,
                                       s.year, s.n_quotes(), min_quotes));
      continue;
    }
    u.cells.push_back(s);
  }
  std::sort(u.cells.begin(), u.cells.end(), [](const Sample& a, const Sample& b) {
    return std::tie(a.country, a.year) < std::tie(b.country, b.year);
  });
  for (std::size_t i = 0; i < u.cells.size(); ++i) {
    const auto& s = u.cells[i];
    if (!u.index.emplace(CellKey{s.country, s.year}, i).second) {
      throw std::invalid_argument(fmt::format("duplicate cell {}/{}", s.country, s.year));
    }
    if (u.countries.empty() || u.countries.back() != s.country) u.countries.push_back(s.country);
  }
  return u;
}

std::vector<std::size_t> cells_of(std::span<const Sample> cells, const std::string& country) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].country == country) out.push_back(i);
  }
  return out;
}

// Pairwise divergences D(cell_i || cell_j) over the usable cells.
class Engine {
 public:
  Engine(std::span<const Sample> cells, const EvalConfig& cfg)
      : cells_(cells), cfg_(cfg), n_(cells.size()), divergence_(n_ * n_, 0.0) {
    parallel_for(n_, cfg.jobs, [&](std::size_t i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (i == j) continue;
        divergence_[i * n_ + j] = kl_divergence(cells_[i].histogram.probabilities(),
                                                cells_[j].histogram.probabilities(), cfg_.epsilon);
      }
    });
  }

  std::vector<Neighbor> neighbors(std::size_t test, std::span<const std::size_t> pool,
                                  std::size_t k, double lambda,
                                  const std::string* boosted_country) const {
    std::vector<Candidate> candidates;
    candidates.reserve(pool.size());
    for (auto j : pool) {
      if (j == test) throw std::logic_error("test cell inside its own training pool");
      const bool boosted = boosted_country && cells_[j].country == *boosted_country;
      candidates.push_back({j, divergence_[test * n_ + j], boosted ? lambda : 1.0,
                            &cells_[j].country, cells_[j].year});
    }
    return select_neighbors(std::move(candidates), k, cfg_.epsilon_w);
  }

  SurveyDistribution predict(std::size_t test, std::span<const std::size_t> pool, std::size_t k,
                             double lambda, const std::string* boosted_country) const {
    const auto chosen = neighbors(test, pool, k, lambda, boosted_country);
    return weighted_survey(chosen, cells_, cfg_.epsilon);
  }

  double loss(std::size_t test, const SurveyDistribution& prediction) const {
    return kl_divergence(cells_[test].survey->probabilities(), prediction.probabilities(),
                         cfg_.epsilon);
  }

 private:
  std::span<const Sample> cells_;
  EvalConfig cfg_;
  std::size_t n_;
  std::vector<double> divergence_;
};

template <typename Pred>
void assert_pool_excludes(std::span<const Sample> cells, std::span<const std::size_t> pool,
                          Pred&& leaked) {
  for (auto j : pool) {
    if (leaked(cells[j])) {
      throw std::logic_error(fmt::format("held-out cell {}/{} leaked into a training pool",
                                         cells[j].country, cells[j].year));
    }
  }
}

const GridPoint& best_point(const std::vector<GridPoint>& grid) {
  // Grid is ordered by k then lambda, so the first minimum is the tie-break winner.
  const GridPoint* best = &grid.front();
  for (const auto& g : grid) {
    if (g.total < best->total) best = &g;
  }
  return *best;
}

void finalize(EvaluationReport& report) {
  std::sort(report.per_cell.begin(), report.per_cell.end(),
            [](const CellResult& a, const CellResult& b) {
              return std::tie(a.country, a.year) < std::tie(b.country, b.year);
            });
  std::vector<double> losses;
  for (const auto& c : report.per_cell) losses.push_back(c.loss);
  report.summary = stats::summarize(losses);
  try {
    report.correlation = correlate_loss_quotes(report);
  } catch (const DataError& e) {
    report.warnings.push_back(fmt::format("loss/quote correlation not computed: {}", e.what()));
  }
}

struct ScvTask {
  std::string target;
  int test_year;
};

void run_scv(const UsableCells& usable, const std::vector<std::string>& targets,
             const EvalConfig& cfg, EvaluationReport& report) {
  std::span<const Sample> cells = usable.cells;
  Engine engine(cells, cfg);

  std::vector<ScvTask> tasks;
  for (const auto& t : targets) {
    for (auto i : cells_of(cells, t)) tasks.push_back({t, cells[i].year});
  }
  std::vector<Selection> selections(tasks.size());
  std::vector<CellResult> results(tasks.size());

  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t ti) {
    const auto& [target, test_year] = tasks[ti];
    const std::size_t test_cell = usable.index.at({target, test_year});

    struct Validation {
      int year;
      std::size_t cell;
      std::vector<std::size_t> pool;
    };
    std::vector<Validation> validations;
    for (auto i : cells_of(cells, target)) {
      const int year = cells[i].year;
      if (year == test_year) continue;
      auto pool = folds::scv_validation_pool(cells, target, test_year, year);
      assert_pool_excludes(cells, pool, [&](const Sample& s) {
        return s.country == target && (s.year == test_year || s.year == year);
      });
      validations.push_back({year, i, std::move(pool)});
    }

    Selection sel{target, test_year, {}, 1, 1.0};
    for (auto k : cfg.k_range) {
      for (auto lambda : cfg.lambda_grid) {
        GridPoint gp{k, lambda, 0.0, {}};
        for (const auto& v : validations) {
          const double loss = engine.loss(v.cell, engine.predict(v.cell, v.pool, k, lambda, &target));
          gp.per_unit.push_back({std::to_string(v.year), loss});
          gp.total += loss;
        }
        sel.grid.push_back(std::move(gp));
      }
    }
    const auto& best = best_point(sel.grid);
    sel.best_k = best.k;
    sel.best_lambda = best.lambda;

    const auto pool = folds::scv_test_pool(cells, target, test_year);
    assert_pool_excludes(cells, pool, [&](const Sample& s) {
      return s.country == target && s.year == test_year;
    });
    const auto prediction = engine.predict(test_cell, pool, sel.best_k, sel.best_lambda, &target);
    const auto& cell = cells[test_cell];
    results[ti] = {cell.country, cell.year, cell.n_quotes(), sel.best_k, sel.best_lambda,
                   engine.loss(test_cell, prediction), *cell.survey, prediction};
    selections[ti] = std::move(sel);
  });

  report.per_cell = std::move(results);
  report.selections = std::move(selections);
}

}  // namespace

std::string_view scenario_name(Scenario s) { return s == Scenario::kLoco ? "LOCO" : "SCV"; }

namespace folds {

std::vector<std::size_t> loco_validation_pool(std::span<const Sample> samples,
                                              const std::string& target,
                                              const std::string& validation) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].country != target && samples[i].country != validation) pool.push_back(i);
  }
  return pool;
}

std::vector<std::size_t> loco_test_pool(std::span<const Sample> samples, const std::string& target) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].country != target) pool.push_back(i);
  }
  return pool;
}

std::vector<std::size_t> scv_validation_pool(std::span<const Sample> samples,
                                             const std::string& target, int test_year,
                                             int validation_year) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.country == target && (s.year == test_year || s.year == validation_year)) continue;
    pool.push_back(i);
  }
  return pool;
}

std::vector<std::size_t> scv_test_pool(std::span<const Sample> samples, const std::string& target,
                                       int test_year) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.country == target && s.year == test_year) continue;
    pool.push_back(i);
  }
  return pool;
}

}  // namespace folds

EvaluationReport loco_evaluate(std::span<const Sample> samples, const EvalConfig& config) {
  const auto cfg = normalized(config);
  const auto usable = usable_cells(samples, cfg.min_quotes);
  if (usable.countries.size() < 3) {
    throw DataError(fmt::format("LOCO needs at least 3 countries with usable cells, found {}",
                                usable.countries.size()));
  }
  std::span<const Sample> cells = usable.cells;
  Engine engine(cells, cfg);
  const auto& countries = usable.countries;

  std::vector<Selection> selections(countries.size());
  std::vector<std::vector<CellResult>> results(countries.size());
  parallel_for(countries.size(), cfg.jobs, [&](std::size_t ti) {
    const std::string& target = countries[ti];

    struct Validation {
      std::string country;
      std::vector<std::size_t> cells;
      std::vector<std::size_t> pool;
    };
    std::vector<Validation> validations;
    for (const auto& c : countries) {
      if (c == target) continue;
      auto pool = folds::loco_validation_pool(cells, target, c);
      assert_pool_excludes(cells, pool,
                           [&](const Sample& s) { return s.country == target || s.country == c; });
      validations.push_back({c, cells_of(cells, c), std::move(pool)});
    }

    Selection sel{target, std::nullopt, {}, 1, 1.0};
    for (auto k : cfg.k_range) {
      GridPoint gp{k, 1.0, 0.0, {}};
      for (const auto& v : validations) {
        double country_loss = 0.0;
        for (auto i : v.cells) country_loss += engine.loss(i, engine.predict(i, v.pool, k, 1.0, nullptr));
        gp.per_unit.push_back({v.country, country_loss});
        gp.total += country_loss;
      }
      sel.grid.push_back(std::move(gp));
    }
    sel.best_k = best_point(sel.grid).k;

    const auto pool = folds::loco_test_pool(cells, target);
    assert_pool_excludes(cells, pool, [&](const Sample& s) { return s.country == target; });
    for (auto i : cells_of(cells, target)) {
      const auto prediction = engine.predict(i, pool, sel.best_k, 1.0, nullptr);
      const auto& cell = cells[i];
      results[ti].push_back({cell.country, cell.year, cell.n_quotes(), sel.best_k, 1.0,
                             engine.loss(i, prediction), *cell.survey, prediction});
    }
    selections[ti] = std::move(sel);
  });

  EvaluationReport report;
  report.scenario = Scenario::kLoco;
  report.warnings = usable.warnings;
  report.selections = std::move(selections);
  for (auto& r : results) {
    for (auto& c : r) report.per_cell.push_back(std::move(c));
  }
  finalize(report);
  return report;
}

EvaluationReport scv_evaluate(std::span<const Sample> samples, const std::string& target,
                              const EvalConfig& config) {
  const auto cfg = normalized(config);
  const auto usable = usable_cells(samples, cfg.min_quotes);
  const auto years = cells_of(usable.cells, target).size();
  if (years < 3) {
    throw DataError(fmt::format("insufficient years for SCV: {} has {} usable surveyed year(s)",
                                target, years));
  }
  EvaluationReport report;
  report.scenario = Scenario::kScv;
  report.warnings = usable.warnings;
  run_scv(usable, {target}, cfg, report);
  finalize(report);
  return report;
}

EvaluationReport scv_evaluate_all(std::span<const Sample> samples, const EvalConfig& config) {
  const auto cfg = normalized(config);
  const auto usable = usable_cells(samples, cfg.min_quotes);
  EvaluationReport report;
  report.scenario = Scenario::kScv;
  report.warnings = usable.warnings;
  std::vector<std::string> targets;
  for (const auto& c : usable.countries) {
    const auto years = cells_of(usable.cells, c).size();
    if (years >= 3) {
      targets.push_back(c);
    } else {
      report.warnings.push_back(
          fmt::format("{} skipped for SCV: {} usable surveyed year(s)", c, years));
    }
  }
  if (targets.empty()) throw DataError("insufficient years for SCV in every country");
  run_scv(usable, targets, cfg, report);
  finalize(report);
  return report;
}

stats::Correlation correlate_loss_quotes(const EvaluationReport& report) {
  std::vector<double> log_quotes;
  std::vector<double> losses;
  std::set<std::size_t> distinct;
  for (const auto& c : report.per_cell) {
    if (c.n_quotes == 0) throw DataError("cell without quotes in report");
    log_quotes.push_back(std::log10(static_cast<double>(c.n_quotes)));
    losses.push_back(c.loss);
    distinct.insert(c.n_quotes);
  }
  if (distinct.size() < 3) throw DataError("correlation needs at least 3 distinct quote counts");
  return stats::pearson(log_quotes, losses);
}

UnsurveyedResult predict_unsurveyed(std::span<const Sample> surveyed,
                                    std::span<const Sample> targets, const EvalConfig& config) {
  const auto cfg = normalized(config);
  UnsurveyedResult result;
  if (targets.empty()) return result;

  const auto usable = usable_cells(surveyed, cfg.min_quotes);
  result.warnings = usable.warnings;
  if (usable.countries.size() < 2) {
    throw DataError("prediction needs surveyed cells from at least 2 countries");
  }
  const std::set<std::string> surveyed_countries(usable.countries.begin(), usable.countries.end());
  for (const auto& t : targets) {
    if (surveyed_countries.contains(t.country)) {
      throw DataError(fmt::format(
          "{} has survey data; evaluate it with LOCO or SCV instead of predicting it", t.country));
    }
  }

  std::span<const Sample> cells = usable.cells;
  Engine engine(cells, cfg);
  Selection sel{"", std::nullopt, {}, 1, 1.0};
  std::vector<std::vector<std::size_t>> pools;
  for (const auto& c : usable.countries) pools.push_back(folds::loco_test_pool(cells, c));
  for (auto k : cfg.k_range) {
    GridPoint gp{k, 1.0, 0.0, {}};
    for (std::size_t ci = 0; ci < usable.countries.size(); ++ci) {
      double country_loss = 0.0;
      for (auto i : cells_of(cells, usable.countries[ci])) {
        country_loss += engine.loss(i, engine.predict(i, pools[ci], k, 1.0, nullptr));
      }
      gp.per_unit.push_back({usable.countries[ci], country_loss});
      gp.total += country_loss;
    }
    sel.grid.push_back(std::move(gp));
  }
  sel.best_k = best_point(sel.grid).k;

  std::vector<const Sample*> ordered;
  for (const auto& t : targets) {
    if (t.n_quotes() < cfg.min_quotes) {
      result.warnings.push_back(fmt::format("target {}/{} has {} quotes (< {}) and is skipped",
                                            t.country, t.year, t.n_quotes(), cfg.min_quotes));
      continue;
    }
    ordered.push_back(&t);
  }
  std::sort(ordered.begin(), ordered.end(), [](const Sample* a, const Sample* b) {
    return std::tie(a->country, a->year) < std::tie(b->country, b->year);
  });

  result.predictions.resize(ordered.size());
  parallel_for(ordered.size(), cfg.jobs, [&](std::size_t ti) {
    const Sample& t = *ordered[ti];
    std::vector<Candidate> candidates;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      candidates.push_back({j,
                            kl_divergence(t.histogram.probabilities(),
                                          cells[j].histogram.probabilities(), cfg.epsilon),
                            1.0, &cells[j].country, cells[j].year});
    }
    const auto chosen = select_neighbors(std::move(candidates), sel.best_k, cfg.epsilon_w);
    auto& p = result.predictions[ti];
    p.country = t.country;
    p.year = t.year;
    p.n_quotes = t.n_quotes();
    p.k = sel.best_k;
    p.prediction = weighted_survey(chosen, cells, cfg.epsilon);
    p.modal = p.prediction.modal();
    for (const auto& n : chosen) {
      p.neighbors.push_back({cells[n.sample_index].country, cells[n.sample_index].year,
                             n.divergence, n.weight});
    }
  });
  result.selection = std::move(sel);
  return result;
}

namespace {

constexpr std::array<const char*, 4> kDistributionKeys = {"vuf", "uf", "f", "vf"};

nlohmann::ordered_json distribution_json(const SurveyDistribution& d) {
  nlohmann::ordered_json j;
  for (std::size_t i = 0; i < 4; ++i) j[kDistributionKeys[i]] = d[i];
  return j;
}

SurveyDistribution distribution_from_json(const nlohmann::json& j) {
  std::array<double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) p[i] = j.at(kDistributionKeys[i]).get<double>();
  return SurveyDistribution::from_probabilities(p);
}

nlohmann::ordered_json selection_json(const Selection& sel, bool with_lambda) {
  nlohmann::ordered_json j;
  j["target"] = sel.target;
  j["test_year"] = sel.test_year ? nlohmann::ordered_json(*sel.test_year) : nullptr;
  j["best_k"] = sel.best_k;
  if (with_lambda) j["best_lambda"] = sel.best_lambda;
  auto& grid = j["grid"] = nlohmann::ordered_json::array();
  for (const auto& g : sel.grid) {
    nlohmann::ordered_json point;
    point["k"] = g.k;
    if (with_lambda) point["lambda"] = g.lambda;
    point["total"] = g.total;
    auto& units = point["per_unit"] = nlohmann::ordered_json::array();
    for (const auto& u : g.per_unit) units.push_back({{"unit", u.unit}, {"loss", u.loss}});
    grid.push_back(std::move(point));
  }
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const EvaluationReport& report, const EvalConfig& config) {
  const bool scv = report.scenario == Scenario::kScv;
  nlohmann::ordered_json doc;
  doc["scenario"] = scenario_name(report.scenario);
  auto& cfg = doc["config"];
  cfg["k_range"] = config.k_range;
  if (scv) cfg["lambda_grid"] = config.lambda_grid;
  cfg["epsilon"] = config.epsilon;
  cfg["epsilon_w"] = config.epsilon_w;
  cfg["min_quotes"] = config.min_quotes;

  auto& summary = doc["summary"];
  summary["cells"] = report.summary.n;
  summary["min"] = report.summary.min;
  summary["q25"] = report.summary.q25;
  summary["median"] = report.summary.median;
  summary["q75"] = report.summary.q75;
  summary["max"] = report.summary.max;

  if (report.correlation) {
    doc["correlation"] = {{"pearson_r", report.correlation->r},
                          {"p_value", report.correlation->p},
                          {"n", report.correlation->n}};
  } else {
    doc["correlation"] = nullptr;
  }

  auto& cells = doc["per_cell"] = nlohmann::ordered_json::array();
  for (const auto& c : report.per_cell) {
    nlohmann::ordered_json row;
    row["country"] = c.country;
    row["year"] = c.year;
    row["n_quotes"] = c.n_quotes;
    row["best_k"] = c.best_k;
    row["best_lambda"] = c.best_lambda;
    row["loss"] = c.loss;
    row["truth"] = distribution_json(c.truth);
    row["prediction"] = distribution_json(c.prediction);
    cells.push_back(std::move(row));
  }
  auto& selections = doc["selections"] = nlohmann::ordered_json::array();
  for (const auto& s : report.selections) selections.push_back(selection_json(s, scv));
  doc["warnings"] = report.warnings;
  return doc;
}

EvaluationReport report_from_json(const nlohmann::json& doc) {
  EvaluationReport report;
  try {
    const auto scenario = doc.at("scenario").get<std::string>();
    if (scenario == "LOCO") {
      report.scenario = Scenario::kLoco;
    } else if (scenario == "SCV") {
      report.scenario = Scenario::kScv;
    } else {
      throw FormatError(fmt::format("unknown scenario '{}'", scenario));
    }
    for (const auto& row : doc.at("per_cell")) {
      report.per_cell.push_back({row.at("country").get<std::string>(), row.at("year").get<int>(),
                                 row.at("n_quotes").get<std::size_t>(),
                                 row.at("best_k").get<std::size_t>(),
                                 row.at("best_lambda").get<double>(), row.at("loss").get<double>(),
                                 distribution_from_json(row.at("truth")),
                                 distribution_from_json(row.at("prediction"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("not an evaluation report: {}", e.what()));
  } catch (const std::invalid_argument& e) {
    throw FormatError(fmt::format("not an evaluation report: {}", e.what()));
  }
  if (report.per_cell.empty()) throw FormatError("evaluation report has no cells");
  std::vector<double> losses;
  for (const auto& c : report.per_cell) losses.push_back(c.loss);
  report.summary = stats::summarize(losses);
  return report;
}

void write_cells_csv(std::ostream& out, const EvaluationReport& report) {
  out << "country,year,n_quotes,best_k,best_lambda,loss\n";
  for (const auto& c : report.per_cell) {
    out << fmt::format("{},{},{},{},{},{}\n", c.country, c.year, c.n_quotes, c.best_k,
                       c.best_lambda, c.loss);
  }
}

void write_distributions_csv(std::ostream& out, const EvaluationReport& report) {
  out << "country,year,source,vuf,uf,f,vf\n";
  for (const auto& c : report.per_cell) {
    for (const auto& [source, d] : {std::pair{"truth", &c.truth}, std::pair{"prediction", &c.prediction}}) {
      out << fmt::format("{},{},{},{},{},{},{}\n", c.country, c.year, source, (*d)[0], (*d)[1],
                         (*d)[2], (*d)[3]);
    }
  }
}

void write_scatter_csv(std::ostream& out, const EvaluationReport& report) {
  out << "country,year,n_quotes,log10_n_quotes,loss\n";
  for (const auto& c : report.per_cell) {
    out << fmt::format("{},{},{},{},{}\n", c.country, c.year, c.n_quotes,
                       std::log10(static_cast<double>(c.n_quotes)), c.loss);
  }
}

nlohmann::ordered_json to_json(const UnsurveyedResult& result) {
  nlohmann::ordered_json doc;
  doc["k"] = result.selection ? nlohmann::ordered_json(result.selection->best_k) : nullptr;
  auto& predictions = doc["predictions"] = nlohmann::ordered_json::array();
  for (const auto& p : result.predictions) {
    nlohmann::ordered_json row;
    row["country"] = p.country;
    row["year"] = p.year;
    row["n_quotes"] = p.n_quotes;
    row["k"] = p.k;
    row["lambda"] = 1.0;
    row["prediction"] = distribution_json(p.prediction);
    row["modal"] = label(p.modal);
    auto& neighbors = row["neighbors"] = nlohmann::ordered_json::array();
    for (const auto& n : p.neighbors) {
      neighbors.push_back({{"country", n.country},
                           {"year", n.year},
                           {"divergence", n.divergence},
                           {"weight", n.weight}});
    }
    predictions.push_back(std::move(row));
  }
  if (result.selection) {
    doc["selection"] = selection_json(*result.selection, false);
  }
  doc["warnings"] = result.warnings;
  return doc;
}

}  // namespace quotesurvey
