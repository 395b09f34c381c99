#include "quotesurvey/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "quotesurvey/bias.hpp"
#include "quotesurvey/corpus.hpp"
#include "quotesurvey/demography.hpp"
#include "quotesurvey/error.hpp"
#include "quotesurvey/evaluation.hpp"
#include "quotesurvey/samples.hpp"
#include "quotesurvey/sentiment.hpp"
#include "quotesurvey/synth.hpp"

namespace quotesurvey {

namespace {

namespace fs = std::filesystem;

struct Settings {
  std::string config;
  std::size_t jobs = 1;
  std::string out_dir = "out";
  std::string input;

  // Raw inputs.
  std::string quotes;
  std::string speakers;
  std::string survey;
  QuoteSchema schema;
  int first_year = 1900;
  int last_year = 2100;

  // Keywords.
  std::vector<std::string> keywords;
  std::vector<std::string> exact_keywords;
  std::string target_country = "US";
  std::size_t top_speakers = 50;
  bool no_enrich = false;

  // Scoring.
  std::string scorer = "lexicon";
  std::string lexicon;
  std::string negators;
  std::size_t negation_window = 2;

  // Bias.
  std::size_t top_outlets = 30;
  double alpha = 0.05;

  // Aggregation.
  std::size_t bins = 20;
  std::vector<std::string> exclude_countries;

  // Evaluation.
  std::size_t k_min = 1;
  std::size_t k_max = 9;
  std::vector<double> lambda_grid = EvalConfig{}.lambda_grid;
  std::size_t min_quotes = 30;
  double epsilon = 1e-9;
  double epsilon_w = 1e-9;
  std::string scv_target;
  std::vector<std::string> predict_countries;
  std::string report;
  bool with_scv = false;

  // Synthetic data.
  SynthConfig synth;
  std::string quotes_per_cell = "1500";
  std::vector<std::string> biased_outlets;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- options

void add_common(CLI::App& sub, Settings& s) {
  sub.add_option("--config", s.config,
                 fmt::format("TOML/INI config file (default: ${})", kConfigEnvVar));
  sub.add_option("-j,--jobs", s.jobs, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  sub.add_option("-o,--out-dir", s.out_dir, "Directory for outputs (and default inputs)");
}

void add_input(CLI::App& sub, Settings& s, const std::string& default_name) {
  sub.add_option("-i,--input", s.input, fmt::format("Input file (default: OUT_DIR/{})", default_name));
}

void add_schema(CLI::App& sub, Settings& s) {
  sub.add_option("--field-id", s.schema.id, "JSON field holding the quote id");
  sub.add_option("--field-text", s.schema.text, "JSON field holding the quotation");
  sub.add_option("--field-speaker", s.schema.speaker, "JSON field holding the speaker");
  sub.add_option("--field-date", s.schema.date, "JSON field holding the date");
  sub.add_option("--field-outlet", s.schema.outlet, "JSON field holding the outlet or its URLs");
  sub.add_option("--field-sentiment", s.schema.sentiment, "JSON field holding a precomputed score");
  sub.add_option("--first-year", s.first_year, "Earliest year kept");
  sub.add_option("--last-year", s.last_year, "Latest year kept");
}

void add_filter_options(CLI::App& sub, Settings& s, bool speakers_option) {
  sub.add_option("--keyword", s.keywords,
                 "Base keyword matched case-insensitively on token boundaries (repeatable)");
  sub.add_option("--exact-keyword", s.exact_keywords,
                 "Base keyword matched as a case-sensitive whole token (repeatable)");
  sub.add_option("--target-country", s.target_country,
                 "Country whose speakers enrich the keywords and whose cells are not aggregated");
  sub.add_option("--top-speakers", s.top_speakers, "Speakers added to the keywords")
      ->check(CLI::PositiveNumber);
  sub.add_flag("--no-enrich", s.no_enrich, "Use base keywords only");
  if (speakers_option) {
    sub.add_option("--speakers", s.speakers, "Speaker TSV used for keyword enrichment");
  }
}

void add_score_options(CLI::App& sub, Settings& s) {
  sub.add_option("--scorer", s.scorer, "lexicon or passthrough")
      ->check(CLI::IsMember({"lexicon", "passthrough"}));
  sub.add_option("--lexicon", s.lexicon, "Lexicon TSV (default: bundled English lexicon)");
  sub.add_option("--negators", s.negators, "Negator list, one word per line");
  sub.add_option("--negation-window", s.negation_window, "Tokens a negator reaches forward")
      ->check(CLI::PositiveNumber);
}

void add_bias_options(CLI::App& sub, Settings& s) {
  sub.add_option("--top-outlets", s.top_outlets, "Most common outlets tested")
      ->check(CLI::PositiveNumber);
  sub.add_option("--alpha", s.alpha, "Significance level; outlets with p < alpha are removed")
      ->check(CLI::Range(0.0, 1.0));
}

void add_aggregate_options(CLI::App& sub, Settings& s) {
  sub.add_option("--bins", s.bins, "Histogram bins over [-1, 1]")->check(CLI::Range(2, 100000));
  sub.add_option("--exclude-country", s.exclude_countries,
                 "Countries left out of the samples (default: the target country)");
  sub.add_option("--target-country", s.target_country, "Country the surveys ask about");
}

void add_eval_options(CLI::App& sub, Settings& s, bool lambda) {
  sub.add_option("--k-min", s.k_min, "Smallest K searched")->check(CLI::PositiveNumber);
  sub.add_option("--k-max", s.k_max, "Largest K searched")->check(CLI::PositiveNumber);
  sub.add_option("--min-quotes", s.min_quotes, "Cells with fewer quotes are dropped");
  sub.add_option("--epsilon", s.epsilon, "Smoothing added before KL when needed")
      ->check(CLI::NonNegativeNumber);
  sub.add_option("--epsilon-w", s.epsilon_w, "Added to divergences before inversion")
      ->check(CLI::NonNegativeNumber);
  if (lambda) {
    sub.add_option("--lambda-grid", s.lambda_grid, "Same-country multipliers searched")
        ->delimiter(',');
  }
}

void add_synth_options(CLI::App& sub, Settings& s) {
  auto& c = s.synth;
  sub.add_option("--seed", c.seed, "Random seed");
  sub.add_option("--countries", c.n_countries, "Number of countries (3..40)");
  sub.add_option("--first-year", c.first_year, "First year");
  sub.add_option("--last-year", c.last_year, "Last year");
  sub.add_option("--quotes-per-cell", s.quotes_per_cell, "N, or MIN:MAX drawn log-uniformly");
  sub.add_option("--respondents", c.survey_respondents, "Survey respondents per cell");
  sub.add_option("--noise", c.noise, "Standard deviation of quote sentiment")
      ->check(CLI::NonNegativeNumber);
  sub.add_option("--persistence", c.persistence, "Year-over-year correlation of favorability")
      ->check(CLI::Range(0.0, 1.0));
  sub.add_option("--year-spread", c.year_spread, "Spread of yearly favorability deviations");
  sub.add_option("--country-offset", c.country_offset,
                 "Spread of per-country offsets between quotes and surveys");
  sub.add_option("--outlets", c.n_outlets, "Unbiased outlets");
  sub.add_option("--biased-outlet", s.biased_outlets, "NAME=SHIFT (repeatable)");
  sub.add_option("--speakers-per-country", c.speakers_per_country, "Speakers per country");
  sub.add_option("--off-topic", c.off_topic, "Share of extra quotes without keywords");
}

// ----------------------------------------------------------------- helpers

fs::path output_path(const Settings& s, std::string_view name) { return fs::path(s.out_dir) / name; }

fs::path input_path(const Settings& s, std::string_view default_name) {
  return s.input.empty() ? output_path(s, default_name) : fs::path(s.input);
}

void require_file(const fs::path& path, std::string_view what) {
  if (path.empty()) throw UsageError(fmt::format("{} is required", what));
  if (!fs::is_regular_file(path)) {
    throw IoError(fmt::format("{} not found: '{}'", what, path.string()));
  }
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  body(out);
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

void write_json(const fs::path& path, const nlohmann::ordered_json& doc) {
  write_file(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

YearWindow window(const Settings& s) {
  if (s.last_year < s.first_year) throw UsageError("--last-year precedes --first-year");
  return {s.first_year, s.last_year};
}

EvalConfig eval_config(const Settings& s) {
  if (s.k_max < s.k_min) throw UsageError("--k-max is smaller than --k-min");
  EvalConfig c;
  c.k_range.clear();
  for (std::size_t k = s.k_min; k <= s.k_max; ++k) c.k_range.push_back(k);
  c.lambda_grid = s.lambda_grid;
  c.epsilon = s.epsilon;
  c.epsilon_w = s.epsilon_w;
  c.min_quotes = s.min_quotes;
  c.jobs = s.jobs;
  return c;
}

KeywordSet base_keywords(const Settings& s) {
  if (s.keywords.empty() && s.exact_keywords.empty()) return KeywordSet::united_states();
  std::vector<Keyword> base;
  for (const auto& k : s.exact_keywords) base.push_back({k, MatchMode::kWholeTokenCaseSensitive});
  for (const auto& k : s.keywords) base.push_back({k, MatchMode::kTokenCaseInsensitive});
  return KeywordSet(std::move(base));
}

std::vector<std::string> excluded_countries(const Settings& s) {
  return s.exclude_countries.empty() ? std::vector<std::string>{s.target_country}
                                     : s.exclude_countries;
}

std::vector<QuoteRecord> read_stage(const Settings& s, std::string_view default_name) {
  const auto path = input_path(s, default_name);
  require_file(path, "input file");
  return stream_quotes(path, s.schema, window(s)).records;
}

void write_quote_file(const Settings& s, std::string_view name, std::span<const QuoteRecord> quotes) {
  write_file(output_path(s, name), [&](std::ostream& out) {
    for (const auto& q : quotes) write_quote(out, q, s.schema);
  });
}

nlohmann::ordered_json keywords_json(const std::vector<Keyword>& keywords) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& k : keywords) {
    arr.push_back({{"text", k.text},
                   {"match", k.mode == MatchMode::kWholeTokenCaseSensitive ? "token-case-sensitive"
                                                                          : "token-case-insensitive"}});
  }
  return arr;
}

// ------------------------------------------------------------------ stages
// Each stage takes its input in memory and writes its artifacts, so the
// staged subcommands and `pipeline` share one code path.

std::vector<QuoteRecord> stage_filter(const Settings& s, QuoteStream stream,
                                      const SpeakerTable* speakers, std::ostream& out) {
  auto keywords = base_keywords(s);
  nlohmann::ordered_json selected = nlohmann::ordered_json::array();
  bool no_overlap = false;
  if (speakers != nullptr && !s.no_enrich) {
    std::unordered_set<std::string> nationals;
    for (const auto& [key, rec] : speakers->speakers) {
      if (std::find(rec.nationalities.begin(), rec.nationalities.end(), s.target_country) !=
          rec.nationalities.end()) {
        nationals.insert(key);
      }
    }
    auto enrichment = enrich_keywords(stream.records, nationals, s.top_speakers, keywords);
    for (const auto& sc : enrichment.selected) selected.push_back({{"speaker", sc.name}, {"quotes", sc.quotes}});
    no_overlap = enrichment.no_speaker_overlap;
    keywords = std::move(enrichment.keywords);
  }
  auto result = filter_quotes(stream.records, keywords, s.jobs);

  write_quote_file(s, "filtered.jsonl", result.kept);
  nlohmann::ordered_json stats;
  stats["lines"] = stream.stats.lines;
  stats["kept"] = result.kept.size();
  stats["dropped"] = result.dropped;
  stats["malformed"] = stream.stats.malformed;
  stats["base_keywords"] = keywords_json(keywords.base());
  stats["enriched_keywords"] = keywords_json(keywords.enriched());
  stats["enriched_speakers"] = selected;
  stats["no_speaker_overlap"] = no_overlap;
  write_json(output_path(s, "filter_stats.json"), stats);

  out << fmt::format("filter: kept {} of {} quotes ({} dropped, {} malformed, {} enriched keywords)\n",
                     result.kept.size(), stream.stats.lines, result.dropped, stream.stats.malformed,
                     keywords.enriched().size());
  if (no_overlap) out << "filter: warning: no quoted speaker has the target nationality\n";
  return std::move(result.kept);
}

std::vector<QuoteRecord> stage_score(const Settings& s, std::vector<QuoteRecord> quotes,
                                     std::ostream& out) {
  std::optional<Lexicon> lexicon;
  if (s.scorer == "lexicon") {
    if (s.lexicon.empty()) {
      if (!s.negators.empty()) throw UsageError("--negators requires --lexicon");
      lexicon = Lexicon::bundled(s.negation_window);
    } else {
      require_file(s.lexicon, "lexicon");
      if (!s.negators.empty()) require_file(s.negators, "negator list");
      lexicon = Lexicon::load(s.lexicon, s.negators, s.negation_window);
    }
  }
  const auto scorer = lexicon ? Scorer::lexicon(*lexicon) : Scorer::passthrough();
  auto scored = score_corpus(std::move(quotes), scorer, s.jobs);
  write_quote_file(s, "scored.jsonl", scored);
  out << fmt::format("score: {} quotes scored ({})\n", scored.size(), s.scorer);
  return scored;
}

std::vector<QuoteRecord> stage_bias(const Settings& s, std::span<const QuoteRecord> quotes,
                                    std::ostream& out) {
  auto result = detect_and_filter(quotes, s.top_outlets, s.alpha, s.jobs);
  write_quote_file(s, "unbiased.jsonl", result.kept);
  write_json(output_path(s, "bias_report.json"), to_json(result.report));
  write_file(output_path(s, "bias.csv"), [&](std::ostream& o) { write_bias_csv(o, result.report); });
  std::size_t excluded = 0;
  for (const auto& t : result.report.tested) excluded += t.excluded ? 1 : 0;
  out << fmt::format("bias: tested {} outlets, excluded {}, removed {} quotes\n",
                     result.report.tested.size(), excluded, result.report.removed_quotes);
  return std::move(result.kept);
}

std::vector<AttributedQuote> stage_attribute(const Settings& s, std::span<const QuoteRecord> quotes,
                                             const SpeakerTable& table, std::ostream& out) {
  auto result = attribute(quotes, table.speakers);
  write_file(output_path(s, "attributed.jsonl"), [&](std::ostream& o) {
    for (const auto& q : result.quotes) write_attributed(o, q, s.schema);
  });
  nlohmann::ordered_json stats;
  stats["unknown_speaker"] = result.stats.unknown_speaker;
  stats["unmatched_name"] = result.stats.unmatched_name;
  stats["emitted"] = result.stats.emitted;
  stats["speaker_table"] = {{"speakers", table.speakers.size()},
                            {"skipped_lines", table.skipped_lines},
                            {"truncated", table.truncated}};
  write_json(output_path(s, "attribution_stats.json"), stats);
  out << fmt::format("attribute: {} attributed quotes ({} without speaker, {} unmatched)\n",
                     result.stats.emitted, result.stats.unknown_speaker, result.stats.unmatched_name);
  return std::move(result.quotes);
}

std::vector<Sample> stage_aggregate(const Settings& s, std::span<const AttributedQuote> quotes,
                                    std::span<const SurveyRow> surveys, std::ostream& out,
                                    std::ostream& err) {
  const auto excluded = excluded_countries(s);
  auto agg = aggregate_cells(quotes, surveys, s.bins, excluded);
  write_file(output_path(s, "samples.json"), [&](std::ostream& o) { write_samples(o, agg.samples); });
  write_file(output_path(s, "histograms.csv"),
             [&](std::ostream& o) { write_histogram_csv(o, agg.samples); });
  std::size_t surveyed = 0;
  for (const auto& c : agg.samples) surveyed += c.survey ? 1 : 0;
  nlohmann::ordered_json stats;
  stats["cells"] = agg.samples.size();
  stats["surveyed_cells"] = surveyed;
  stats["bins"] = s.bins;
  stats["excluded_countries"] = excluded;
  stats["warnings"] = agg.warnings;
  write_json(output_path(s, "aggregate_stats.json"), stats);
  for (const auto& w : agg.warnings) err << "aggregate: warning: " << w << '\n';
  out << fmt::format("aggregate: {} cells, {} with surveys\n", agg.samples.size(), surveyed);
  return std::move(agg.samples);
}

void write_report(const Settings& s, const EvaluationReport& report, const EvalConfig& config,
                  std::string_view prefix, std::ostream& out, std::ostream& err) {
  write_json(output_path(s, fmt::format("{}_report.json", prefix)), to_json(report, config));
  write_file(output_path(s, fmt::format("{}_cells.csv", prefix)),
             [&](std::ostream& o) { write_cells_csv(o, report); });
  write_file(output_path(s, fmt::format("{}_distributions.csv", prefix)),
             [&](std::ostream& o) { write_distributions_csv(o, report); });
  write_file(output_path(s, fmt::format("{}_loss_vs_quotes.csv", prefix)),
             [&](std::ostream& o) { write_scatter_csv(o, report); });
  for (const auto& w : report.warnings) err << prefix << ": warning: " << w << '\n';
  out << fmt::format("{}: {} cells, median loss {:.6f}, q75 {:.6f}", scenario_name(report.scenario),
                     report.per_cell.size(), report.summary.median, report.summary.q75);
  if (report.correlation) {
    out << fmt::format(", r {:.4f} (p {:.3g})", report.correlation->r, report.correlation->p);
  }
  out << '\n';
}

// ------------------------------------------------------------ subcommands

int cmd_filter(const Settings& s, std::ostream& out, std::ostream&) {
  require_file(s.quotes, "quotes file");
  std::optional<SpeakerTable> speakers;
  if (!s.speakers.empty()) {
    require_file(s.speakers, "speaker table");
    speakers = load_speakers(s.speakers);
  }
  stage_filter(s, stream_quotes(s.quotes, s.schema, window(s)), speakers ? &*speakers : nullptr, out);
  return kExitOk;
}

int cmd_score(const Settings& s, std::ostream& out, std::ostream&) {
  stage_score(s, read_stage(s, "filtered.jsonl"), out);
  return kExitOk;
}

int cmd_bias(const Settings& s, std::ostream& out, std::ostream&) {
  const auto quotes = read_stage(s, "scored.jsonl");
  stage_bias(s, quotes, out);
  return kExitOk;
}

int cmd_attribute(const Settings& s, std::ostream& out, std::ostream&) {
  const auto quotes = read_stage(s, "unbiased.jsonl");
  require_file(s.speakers, "speaker table");
  stage_attribute(s, quotes, load_speakers(s.speakers), out);
  return kExitOk;
}

int cmd_aggregate(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto path = input_path(s, "attributed.jsonl");
  require_file(path, "input file");
  const auto quotes = read_attributed(path, s.schema);
  require_file(s.survey, "survey file");
  stage_aggregate(s, quotes, load_survey_csv(s.survey), out, err);
  return kExitOk;
}

std::vector<Sample> read_sample_stage(const Settings& s) {
  const auto path = input_path(s, "samples.json");
  require_file(path, "input file");
  return read_samples(path);
}

int cmd_eval_loco(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto samples = read_sample_stage(s);
  const auto config = eval_config(s);
  write_report(s, loco_evaluate(samples, config), config, "loco", out, err);
  return kExitOk;
}

int cmd_eval_scv(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto samples = read_sample_stage(s);
  const auto config = eval_config(s);
  const auto report = s.scv_target.empty() ? scv_evaluate_all(samples, config)
                                           : scv_evaluate(samples, s.scv_target, config);
  write_report(s, report, config, "scv", out, err);
  return kExitOk;
}

int cmd_predict(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto samples = read_sample_stage(s);
  const std::set<std::string> wanted(s.predict_countries.begin(), s.predict_countries.end());
  std::vector<Sample> surveyed, targets;
  for (const auto& c : samples) {
    if (c.survey) {
      surveyed.push_back(c);
    } else if (wanted.empty() || wanted.contains(c.country)) {
      targets.push_back(c);
    }
  }
  for (const auto& c : wanted) {
    if (std::none_of(targets.begin(), targets.end(), [&](const Sample& t) { return t.country == c; })) {
      throw DataError(fmt::format("no unsurveyed cells for country '{}'", c));
    }
  }
  const auto result = predict_unsurveyed(surveyed, targets, eval_config(s));
  write_json(output_path(s, "predictions.json"), to_json(result));
  for (const auto& w : result.warnings) err << "predict: warning: " << w << '\n';
  out << fmt::format("predict: {} cells predicted", result.predictions.size());
  if (result.selection) out << fmt::format(" with K={}", result.selection->best_k);
  out << '\n';
  return kExitOk;
}

int cmd_correlate(const Settings& s, std::ostream& out, std::ostream&) {
  const fs::path path = s.report.empty() ? output_path(s, "loco_report.json") : fs::path(s.report);
  require_file(path, "report");
  std::ifstream in(path, std::ios::binary);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", path.string(), e.what()));
  }
  const auto report = report_from_json(doc);
  const auto corr = correlate_loss_quotes(report);
  std::string name(scenario_name(report.scenario));
  for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  nlohmann::ordered_json result;
  result["scenario"] = scenario_name(report.scenario);
  result["n"] = corr.n;
  result["r"] = corr.r;
  result["p"] = corr.p;
  write_json(output_path(s, fmt::format("{}_correlation.json", name)), result);
  out << fmt::format("correlate: {} loss vs log10(quotes): r {:.6f}, p {:.6g}, n {}\n",
                     result["scenario"].get<std::string>(), corr.r, corr.p, corr.n);
  return kExitOk;
}

SynthConfig synth_config(const Settings& s) {
  SynthConfig c = s.synth;
  const auto parse_count = [](std::string_view text) {
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
      throw UsageError(fmt::format("invalid quote count '{}'", text));
    }
    return v;
  };
  const std::string_view q = s.quotes_per_cell;
  if (const auto colon = q.find(':'); colon != std::string_view::npos) {
    c.quotes_min = parse_count(q.substr(0, colon));
    c.quotes_max = parse_count(q.substr(colon + 1));
  } else {
    c.quotes_min = c.quotes_max = parse_count(q);
  }
  c.biased_outlets.clear();
  for (const auto& entry : s.biased_outlets) {
    const auto eq = entry.rfind('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError(fmt::format("--biased-outlet expects NAME=SHIFT, got '{}'", entry));
    }
    try {
      std::size_t used = 0;
      const double shift = std::stod(entry.substr(eq + 1), &used);
      if (used != entry.size() - eq - 1) throw std::invalid_argument(entry);
      c.biased_outlets.push_back({entry.substr(0, eq), shift});
    } catch (const std::exception&) {
      throw UsageError(fmt::format("invalid shift in --biased-outlet '{}'", entry));
    }
  }
  return c;
}

int cmd_synth(const Settings& s, std::ostream& out, std::ostream&) {
  const auto data = generate(synth_config(s));
  write_synth(s.out_dir, data);
  out << fmt::format("synth: {} quotes, {} survey rows, {} speakers (seed {})\n", data.quotes.size(),
                     data.surveys.size(), data.speakers.size(), data.config.seed);
  return kExitOk;
}

int cmd_pipeline(const Settings& s, std::ostream& out, std::ostream& err) {
  require_file(s.quotes, "quotes file");
  require_file(s.speakers, "speaker table");
  require_file(s.survey, "survey file");
  const auto speakers = load_speakers(s.speakers);
  const auto surveys = load_survey_csv(s.survey);
  auto filtered = stage_filter(s, stream_quotes(s.quotes, s.schema, window(s)), &speakers, out);
  const auto scored = stage_score(s, std::move(filtered), out);
  const auto unbiased = stage_bias(s, scored, out);
  const auto attributed = stage_attribute(s, unbiased, speakers, out);
  const auto samples = stage_aggregate(s, attributed, surveys, out, err);
  const auto config = eval_config(s);
  write_report(s, loco_evaluate(samples, config), config, "loco", out, err);
  if (s.with_scv) write_report(s, scv_evaluate_all(samples, config), config, "scv", out, err);
  return kExitOk;
}

// ------------------------------------------------------------ app assembly

using Handler = std::function<int(const Settings&, std::ostream&, std::ostream&)>;

struct Command {
  CLI::App* app;
  Handler handler;
};

std::unique_ptr<CLI::App> build_app(Settings& s, std::map<std::string, Command>& commands) {
  auto app = std::make_unique<CLI::App>(
      "Predict survey favorability distributions from quotation corpora.", "quotesurvey");
  app->require_subcommand(1);
  const auto add = [&](const std::string& name, const std::string& description, Handler handler) {
    auto* sub = app->add_subcommand(name, description);
    add_common(*sub, s);
    commands[name] = {sub, std::move(handler)};
    return sub;
  };

  auto* filter = add("filter", "Keep quotes mentioning the target (writes filtered.jsonl, filter_stats.json)",
                     cmd_filter);
  filter->add_option("-q,--quotes", s.quotes, "Quote corpus (JSONL)");
  add_schema(*filter, s);
  add_filter_options(*filter, s, true);

  auto* score = add("score", "Assign sentiment scores (writes scored.jsonl)", cmd_score);
  add_input(*score, s, "filtered.jsonl");
  add_schema(*score, s);
  add_score_options(*score, s);

  auto* bias = add("bias", "Remove quotes of biased outlets (writes unbiased.jsonl, bias_report.json, bias.csv)",
                   cmd_bias);
  add_input(*bias, s, "scored.jsonl");
  add_schema(*bias, s);
  add_bias_options(*bias, s);

  auto* attr = add("attribute", "Attach speaker nationalities (writes attributed.jsonl, attribution_stats.json)",
                   cmd_attribute);
  add_input(*attr, s, "unbiased.jsonl");
  add_schema(*attr, s);
  attr->add_option("--speakers", s.speakers, "Speaker TSV: name<TAB>code[,code...]");

  auto* agg = add("aggregate", "Build per-cell histograms and join surveys (writes samples.json, histograms.csv)",
                  cmd_aggregate);
  add_input(*agg, s, "attributed.jsonl");
  add_schema(*agg, s);
  agg->add_option("--survey", s.survey, "Survey CSV: country,year,vuf,uf,f,vf");
  add_aggregate_options(*agg, s);

  auto* loco = add("eval-loco", "Leave-one-country-out evaluation (writes loco_*)", cmd_eval_loco);
  add_input(*loco, s, "samples.json");
  add_eval_options(*loco, s, false);

  auto* scv = add("eval-scv", "Same-country validation (writes scv_*)", cmd_eval_scv);
  add_input(*scv, s, "samples.json");
  add_eval_options(*scv, s, true);
  scv->add_option("--target", s.scv_target, "Evaluate one country only");

  auto* predict = add("predict", "Predict unsurveyed cells (writes predictions.json)", cmd_predict);
  add_input(*predict, s, "samples.json");
  add_eval_options(*predict, s, false);
  predict->add_option("--country", s.predict_countries, "Unsurveyed countries to predict (default: all)");

  auto* corr = add("correlate", "Correlate per-cell loss with log10(quote count)", cmd_correlate);
  corr->add_option("--report", s.report, "Evaluation report JSON (default: OUT_DIR/loco_report.json)");

  auto* synth = add("synth", "Generate a synthetic corpus, surveys, speakers and truth", cmd_synth);
  add_synth_options(*synth, s);

  auto* pipe = add("pipeline", "Run filter, score, bias, attribute, aggregate and eval-loco in one go",
                   cmd_pipeline);
  pipe->add_option("-q,--quotes", s.quotes, "Quote corpus (JSONL)");
  pipe->add_option("--survey", s.survey, "Survey CSV");
  add_schema(*pipe, s);
  add_filter_options(*pipe, s, true);
  add_score_options(*pipe, s);
  add_bias_options(*pipe, s);
  pipe->add_option("--bins", s.bins, "Histogram bins over [-1, 1]")->check(CLI::Range(2, 100000));
  pipe->add_option("--exclude-country", s.exclude_countries,
                   "Countries left out of the samples (default: the target country)");
  add_eval_options(*pipe, s, true);
  pipe->add_flag("--with-scv", s.with_scv, "Also run same-country validation");
  return app;
}

bool truthy(const std::string& v) {
  std::string lower;
  for (char c : v) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  throw UsageError(fmt::format("expected a boolean, got '{}'", v));
}

/// Turns config entries for `sub` into command-line tokens for options the
/// user did not pass explicitly.
std::vector<std::string> config_arguments(const fs::path& path, const CLI::App& sub) {
  if (!fs::is_regular_file(path)) throw IoError(fmt::format("config file not found: '{}'", path.string()));
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path.string());
  } catch (const CLI::Error& e) {
    throw FormatError(fmt::format("config '{}': {}", path.string(), e.what()));
  }
  // Top-level keys first, then the subcommand's own section overrides them.
  std::map<std::string, std::vector<std::string>> values;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& item : items) {
      if (item.name == "++" || item.name == "--") continue;
      const bool top = item.parents.empty();
      const bool own = item.parents.size() == 1 && item.parents[0] == sub.get_name();
      if ((pass == 0 && !top) || (pass == 1 && !own)) continue;
      if (own && sub.get_option_no_throw("--" + item.name) == nullptr) {
        throw UsageError(fmt::format("config '{}': unknown option '{}' in [{}]", path.string(),
                                     item.name, sub.get_name()));
      }
      values[item.name] = item.inputs;
    }
  }
  std::vector<std::string> args;
  for (const auto& [name, inputs] : values) {
    if (name == "config") continue;
    const auto* opt = sub.get_option_no_throw("--" + name);
    if (opt == nullptr || opt->count() > 0) continue;  // other subcommand's key, or set on the CLI
    if (opt->get_expected_max() == 0) {
      if (inputs.size() != 1) throw UsageError(fmt::format("config key '{}' must be a boolean", name));
      if (truthy(inputs[0])) args.push_back("--" + name);
      continue;
    }
    if (inputs.size() > 1 && opt->get_items_expected_max() <= 1) {
      throw UsageError(fmt::format("config key '{}' takes a single value", name));
    }
    for (const auto& v : inputs) args.push_back(fmt::format("--{}={}", name, v));
  }
  return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  // First pass: find the subcommand and what the user set explicitly.
  Settings probe;
  std::map<std::string, Command> probe_commands;
  auto probe_app = build_app(probe, probe_commands);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    probe_app->parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = probe_app->get_subcommands();
    out << (subs.empty() ? probe_app->help() : subs.front()->help("quotesurvey"));
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << probe_app->help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto subs = probe_app->get_subcommands();
    err << "error: " << e.what() << "\n\n";
    err << (subs.empty() ? probe_app->help() : subs.front()->help("quotesurvey"));
    return kExitUsage;
  }

  try {
    const auto* probe_sub = probe_app->get_subcommands().front();
    const std::string name = probe_sub->get_name();
    std::string config = probe.config;
    if (config.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') config = env;
    }

    std::vector<std::string> final_args{name};
    if (!config.empty()) {
      auto extra = config_arguments(config, *probe_sub);
      final_args.insert(final_args.end(), extra.begin(), extra.end());
    }
    // args[0] may be preceded by nothing else: the subcommand comes first.
    auto sub_pos = std::find(args.begin(), args.end(), name);
    final_args.insert(final_args.end(), sub_pos + 1, args.end());

    Settings settings;
    std::map<std::string, Command> commands;
    auto app = build_app(settings, commands);
    std::vector<std::string> final_reversed(final_args.rbegin(), final_args.rend());
    try {
      app->parse(final_reversed);
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n\n" << commands.at(name).app->help("quotesurvey");
      return kExitUsage;
    }
    return commands.at(name).handler(settings, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    // IoError, FormatError, DataError and filesystem failures.
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace quotesurvey
