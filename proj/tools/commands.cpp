#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>

#include "stocknet/csv.hpp"
#include "stocknet/errors.hpp"
#include "stocknet/marketstats.hpp"
#include "stocknet/regression.hpp"

namespace stocknet::cli {

namespace fs = std::filesystem;

namespace {

template <class F>
auto in_stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const InputError& e) {
    throw StageError(name, kInputError, e.what());
  } catch (const NumericalError& e) {
    throw StageError(name, kNumericalError, e.what());
  } catch (const std::exception& e) {
    throw StageError(name, kInternalError, e.what());
  }
}

template <class Parse>
auto read_file(const fs::path& path, Parse&& parse) -> decltype(parse(std::declval<std::istream&>())) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return parse(in);
  } catch (const InputError& e) {
    throw InputError(path.filename().string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& emit) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  emit(out);
  out.flush();
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void prepare_out(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec || !fs::is_directory(config.out))
    throw InputError("cannot create output directory '" + config.out.string() + "'");
}

fs::path input_or_default(const std::optional<fs::path>& given, const RunConfig& config,
                          const char* name) {
  return given ? *given : config.out / name;
}

ReturnPanel read_returns_file(const fs::path& path) {
  return read_file(path, [](std::istream& in) { return load_returns(in); });
}

// Converts prices to returns and stores them in OUT/returns.csv. The panel
// handed back is the one read from that file, so every route through the
// stages sees the same (rounded) numbers.
ReturnPanel ingest_prices(const RunConfig& config) {
  const auto panel = read_file(*config.prices, [&](std::istream& in) {
    return to_returns(load_prices(in, config.gap_policy));
  });
  const auto path = config.out / files::kReturns;
  write_file(path, [&](std::ostream& o) { write_returns(o, panel); });
  return read_returns_file(path);
}

ReturnPanel load_panel(const RunConfig& config) {
  if (config.returns) return read_returns_file(*config.returns);
  if (config.prices) return ingest_prices(config);
  return read_returns_file(config.out / files::kReturns);
}

Matrix load_aligned_scores(const RunConfig& config, const ReturnPanel& panel) {
  auto table = read_file(input_or_default(config.scores, config, files::kScores),
                         [](std::istream& in) { return read_scores(in); });
  if (table.dates != panel.dates()) {
    throw InputError("scores dates do not match the return panel (" +
                     std::to_string(table.dates.size()) + " vs " +
                     std::to_string(panel.n_dates()) + " rows)");
  }
  return std::move(table.scores);
}

std::string optional_number(const std::optional<double>& v) {
  return v ? csv::format_number(*v) : std::string("NA");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ReturnPanel cmd_ingest(const RunConfig& config) {
  return in_stage("ingest", [&] {
    if (!config.prices) throw InputError("--prices is required");
    prepare_out(config);
    return ingest_prices(config);
  });
}

NetworkInfo cmd_network(const RunConfig& config) {
  return in_stage("network", [&] {
    prepare_out(config);
    const auto panel = load_panel(config);
    if (panel.n_tickers() < 2) throw InputError("network needs at least 2 stocks");
    const auto tree = kruskal_mst(distance_matrix(correlation_matrix(panel)));
    const auto& tickers = panel.tickers();

    NetworkInfo info{tree.size(), tree.min_degree(), tree.max_degree(), std::nullopt};
    const auto dist = degree_distribution(tree);
    try {
      info.power_law = fit_power_law(dist);
    } catch (const InputError&) {
    }

    write_file(config.out / files::kEdges, [&](std::ostream& o) { write_edge_list(o, tree, tickers); });
    write_file(config.out / files::kDot, [&](std::ostream& o) { write_dot(o, tree, tickers); });
    write_file(config.out / files::kDegrees, [&](std::ostream& o) {
      csv::write_row(o, {"node", "ticker", "degree", "l_star"});
      for (std::size_t i = 0; i < tree.size(); ++i) {
        const int k = tree.degree()[i];
        csv::write_row(o, {std::to_string(i), tickers[i], std::to_string(k),
                           info.l_max > info.l_min
                               ? csv::format_number(normalize_degree(k, info.l_min, info.l_max))
                               : std::string{}});
      }
    });
    write_file(config.out / files::kDegreeDistribution, [&](std::ostream& o) {
      csv::write_row(o, {"degree", "count", "probability"});
      for (const auto& b : dist)
        csv::write_row(o, {std::to_string(b.degree), std::to_string(b.count),
                           csv::format_number(b.probability)});
    });
    write_file(config.out / files::kPowerLaw, [&](std::ostream& o) {
      csv::write_row(o, {"status", "gamma", "intercept", "r2_loglog", "bins_used"});
      if (info.power_law) {
        const auto& f = *info.power_law;
        csv::write_row(o, {"ok", csv::format_number(f.gamma), csv::format_number(f.intercept),
                           csv::format_number(f.r2_loglog), std::to_string(f.bins_used)});
      } else {
        csv::write_row(o, {"insufficient support", "", "", "", std::to_string(dist.size())});
      }
    });
    return info;
  });
}

FactorInfo cmd_factors(const RunConfig& config) {
  return in_stage("factors", [&] {
    prepare_out(config);
    const auto panel = load_panel(config);
    FactorOptions options;
    options.k_override = config.factors;
    options.rotate = !config.no_rotate;
    const auto model = fit_factor_model(panel, options);
    const auto report = multicollinearity_report(model.scores);

    write_file(config.out / files::kEigenvalues, [&](std::ostream& o) { write_eigenvalues(o, model); });
    write_file(config.out / files::kLoadings,
               [&](std::ostream& o) { write_loadings(o, model.loadings, panel.tickers()); });
    write_file(config.out / files::kScores,
               [&](std::ostream& o) { write_scores(o, model.scores, panel.dates()); });
    write_file(config.out / files::kScoreCorrelations,
               [&](std::ostream& o) { write_score_correlations(o, report); });
    return FactorInfo{panel.n_dates(), model.k, model.kaiser_k, model.rotated,
                      report.mean_abs_offdiag};
  });
}

RegressInfo cmd_regress(const RunConfig& config) {
  return in_stage("regress", [&] {
    prepare_out(config);
    const auto panel = load_panel(config);
    const auto scores = load_aligned_scores(config, panel);
    const auto fits = fit_panel(panel, scores);
    write_file(config.out / files::kRegression, [&](std::ostream& o) { write_regression(o, fits); });
    double total = 0.0;
    for (const auto& f : fits) total += f.r_squared;
    return RegressInfo{total / static_cast<double>(fits.size()),
                       mean_abs_residual_correlation(fits)};
  });
}

IndustryInfo cmd_industry(const RunConfig& config) {
  return in_stage("industry", [&] {
    if (!config.membership) throw InputError("--membership is required");
    prepare_out(config);
    const auto membership =
        read_file(*config.membership, [](std::istream& in) { return read_membership(in); });
    const auto panel = load_panel(config);
    const auto scores = load_aligned_scores(config, panel);
    const auto indexes = industry_indexes(panel, membership);
    const auto table = factor_industry_correlations(scores, indexes);
    write_file(config.out / files::kIndustryIndexes,
               [&](std::ostream& o) { write_industry_indexes(o, indexes, panel.dates()); });
    write_file(config.out / files::kFactorIndustry,
               [&](std::ostream& o) { write_factor_industry(o, table); });
    return IndustryInfo{indexes.size()};
  });
}

void cmd_profile(const RunConfig& config) {
  in_stage("profile", [&] {
    prepare_out(config);
    std::vector<std::string> tickers;
    const auto tree = read_file(input_or_default(config.edges, config, files::kEdges),
                                [&](std::istream& in) { return read_edge_list(in, tickers); });
    const auto fits = read_file(input_or_default(config.regression, config, files::kRegression),
                                [](std::istream& in) { return read_regression(in); });
    std::map<std::string, double> r2_by_ticker;
    for (const auto& f : fits) r2_by_ticker[f.ticker] = f.r_squared;
    std::vector<double> r2;
    for (const auto& t : tickers) {
      const auto it = r2_by_ticker.find(t);
      if (it == r2_by_ticker.end()) throw InputError("no regression result for '" + t + "'");
      r2.push_back(it->second);
    }
    if (fits.size() != tickers.size()) {
      throw InputError("regression has " + std::to_string(fits.size()) + " stocks, tree has " +
                       std::to_string(tickers.size()));
    }
    const auto profile = degree_r2_profile(tree, r2);
    write_file(config.out / files::kProfile, [&](std::ostream& o) { write_degree_profile(o, profile); });
  });
}

void cmd_analyze(const RunConfig& config) {
  in_stage("input", [&] {
    if (!config.prices) throw InputError("--prices is required");
    if (config.industry && !config.membership)
      throw InputError("--industry requires --membership");
    if (config.membership && !std::ifstream(*config.membership))
      throw InputError("cannot open membership file '" + config.membership->string() + "'");
    return 0;
  });

  const auto panel = cmd_ingest(config);

  RunConfig stage = config;
  stage.prices.reset();
  stage.returns = config.out / files::kReturns;
  stage.scores = config.out / files::kScores;
  stage.edges = config.out / files::kEdges;
  stage.regression = config.out / files::kRegression;

  const auto network = cmd_network(stage);
  const auto factors = cmd_factors(stage);
  const auto regress = cmd_regress(stage);
  std::optional<IndustryInfo> industry;
  if (config.membership) industry = cmd_industry(stage);
  cmd_profile(stage);

  in_stage("summary", [&] {
    write_file(config.out / files::kSummary, [&](std::ostream& o) {
      o << "n_stocks=" << panel.n_tickers() << '\n';
      o << "n_returns=" << factors.t << '\n';
      o << "first_date=" << format_date(panel.dates().front()) << '\n';
      o << "last_date=" << format_date(panel.dates().back()) << '\n';
      o << "k_factors=" << factors.k << '\n';
      o << "kaiser_k=" << factors.kaiser_k << '\n';
      o << "rotation=" << (factors.rotated ? "varimax" : "none") << '\n';
      o << "l_max=" << network.l_max << '\n';
      o << "l_min=" << network.l_min << '\n';
      o << "degree_normalization=2*(L-L_min)/(L_max-L_min)-1\n";
      o << "degree_normalization_note=the unscaled form (L-L_min)/(L_max-L_min)-1 only spans "
           "[-1,0]; the rescaled form maps L_min to -1 and L_max to +1\n";
      if (network.power_law) {
        o << "power_law_gamma=" << csv::format_number(network.power_law->gamma) << '\n';
        o << "power_law_intercept=" << csv::format_number(network.power_law->intercept) << '\n';
        o << "power_law_r2_loglog=" << csv::format_number(network.power_law->r2_loglog) << '\n';
        o << "power_law_bins=" << network.power_law->bins_used << '\n';
      } else {
        o << "power_law_gamma=NA\npower_law_status=insufficient support\n";
      }
      o << "mean_score_cross_correlation=" << optional_number(factors.mean_score_correlation) << '\n';
      o << "mean_score_cross_correlation_percent="
        << optional_number(factors.mean_score_correlation
                               ? std::optional<double>(100.0 * *factors.mean_score_correlation)
                               : std::nullopt)
        << '\n';
      o << "mean_r_squared_percent=" << csv::format_number(100.0 * regress.mean_r_squared) << '\n';
      o << "mean_residual_cross_correlation=" << optional_number(regress.mean_residual_correlation)
        << '\n';
      o << "industries_qualifying=" << (industry ? std::to_string(industry->qualifying) : "NA")
        << '\n';
      o << "generated_at=" << utc_timestamp() << '\n';
    });
    return 0;
  });
}

void cmd_synth(const RunConfig& config) {
  in_stage("synth", [&] {
    prepare_out(config);
    const auto market = generate(config.synth);
    const auto& tickers = market.returns.tickers();
    const auto prices = to_prices(market.returns, config.price_scale);
    write_file(config.out / files::kPrices, [&](std::ostream& o) { write_prices(o, prices); });
    write_file(config.out / files::kMembership,
               [&](std::ostream& o) { write_membership(o, market.membership, tickers); });
    write_file(config.out / files::kTrueLoadings,
               [&](std::ostream& o) { write_loadings(o, market.true_loadings, tickers); });
    write_file(config.out / files::kTrueScores, [&](std::ostream& o) {
      write_scores(o, market.true_scores, market.returns.dates());
    });
    return 0;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stock correlation networks, statistical factors and factor-model R²", "stocknet"};
  app.require_subcommand(1);

  RunConfig config;
  std::string prices, membership, returns, scores, edges, regression, out_dir = ".";
  std::string gap = "reject";
  std::size_t factors = 0;

  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory (created if missing)");
  };
  const auto add_returns = [&](CLI::App* sub) {
    sub->add_option("--returns", returns, "Returns CSV (default: OUT/returns.csv)");
    sub->add_option("--prices", prices, "Price CSV to ingest instead of a returns file");
    sub->add_option("--gap-policy", gap, "Missing-price handling")
        ->check(CLI::IsMember({"reject", "forward-fill"}));
  };
  const auto add_factor_flags = [&](CLI::App* sub) {
    sub->add_option("--factors", factors, "Retain K factors instead of the Kaiser count")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--no-rotate", config.no_rotate, "Skip varimax (diagnostics)");
  };

  auto* analyze = app.add_subcommand("analyze", "Run the full pipeline on a price panel");
  analyze->add_option("--prices", prices, "Price CSV")->required();
  analyze->add_option("--membership", membership, "ticker,industry_id CSV");
  analyze->add_flag("--industry", config.industry, "Require the industry stage");
  analyze->add_option("--gap-policy", gap, "Missing-price handling")
      ->check(CLI::IsMember({"reject", "forward-fill"}));
  add_out(analyze);
  add_factor_flags(analyze);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic factor market");
  auto& spec = config.synth;
  synth->add_option("--seed", spec.seed, "Generator seed");
  synth->add_option("--stocks", spec.n_stocks, "Number of stocks");
  synth->add_option("--days", spec.n_days, "Number of return observations");
  synth->add_option("--factors", spec.k_factors, "Number of true factors");
  synth->add_option("--noise", spec.noise_sigma, "Residual standard deviation");
  synth->add_option("--loading-min", spec.loading_min, "Smallest loading scale");
  synth->add_option("--loading-max", spec.loading_max, "Largest loading scale");
  synth->add_option("--industries", spec.n_industries, "Industry blocks (0: one per factor)");
  synth->add_flag("--market-factor", spec.market_factor, "Factor 1 is a market-wide factor");
  synth->add_option("--market-weight", spec.market_weight, "Market weight in loading directions");
  synth->add_option("--diffuse-factors", spec.diffuse_factors, "Trailing non-industry factors");
  synth->add_option("--diffuse-weight", spec.diffuse_weight, "Scale of diffuse loadings");
  synth->add_option("--hub-fraction", spec.hub_fraction, "Share of each block at the top loading");
  synth->add_option("--price-scale", config.price_scale, "Multiplier applied before compounding prices");
  add_out(synth);

  auto* network = app.add_subcommand("network", "Correlation MST, degrees and power-law fit");
  add_returns(network);
  add_out(network);

  auto* factors_cmd = app.add_subcommand("factors", "Eigenvalues, varimax loadings and scores");
  add_returns(factors_cmd);
  add_out(factors_cmd);
  add_factor_flags(factors_cmd);

  auto* regress = app.add_subcommand("regress", "Per-stock multi-factor regressions");
  add_returns(regress);
  regress->add_option("--scores", scores, "Factor scores CSV (default: OUT/scores.csv)");
  add_out(regress);

  auto* industry = app.add_subcommand("industry", "Industry indexes vs factor correlations");
  add_returns(industry);
  industry->add_option("--scores", scores, "Factor scores CSV (default: OUT/scores.csv)");
  industry->add_option("--membership", membership, "ticker,industry_id CSV")->required();
  add_out(industry);

  auto* profile = app.add_subcommand("profile", "Mean R² per tree degree");
  profile->add_option("--edges", edges, "MST edge list (default: OUT/mst_edges.csv)");
  profile->add_option("--regression", regression, "Regression CSV (default: OUT/regression.csv)");
  add_out(profile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kInputError;
  }

  const auto opt_path = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<fs::path>(s);
  };
  config.prices = opt_path(prices);
  config.membership = opt_path(membership);
  config.returns = opt_path(returns);
  config.scores = opt_path(scores);
  config.edges = opt_path(edges);
  config.regression = opt_path(regression);
  config.out = out_dir;
  config.gap_policy = gap == "forward-fill" ? GapPolicy::forward_fill : GapPolicy::reject;
  if (factors > 0) config.factors = factors;

  try {
    if (analyze->parsed()) cmd_analyze(config);
    else if (synth->parsed()) cmd_synth(config);
    else if (network->parsed()) cmd_network(config);
    else if (factors_cmd->parsed()) cmd_factors(config);
    else if (regress->parsed()) cmd_regress(config);
    else if (industry->parsed()) cmd_industry(config);
    else if (profile->parsed()) cmd_profile(config);
  } catch (const StageError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
  return kSuccess;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"stocknet"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace stocknet::cli
