#include "stocknet/pipeline.hpp"

#include "stocknet/errors.hpp"

namespace stocknet {

PipelineResult run_pipeline(const ReturnPanel& returns, const FactorOptions& options) {
  auto correlations = correlation_matrix(returns);
  auto tree = kruskal_mst(distance_matrix(correlations));
  std::optional<PowerLawFit> power_law;
  try {
    power_law = fit_power_law(degree_distribution(tree));
  } catch (const InputError&) {
    // too few distinct degrees for a fit
  }
  auto factors = fit_factor_model(returns, options);
  auto multicollinearity = multicollinearity_report(factors.scores);
  auto fits = fit_panel(returns, factors.scores);
  auto profile = degree_r2_profile(tree, fits);
  return PipelineResult{std::move(correlations), std::move(tree),   power_law,
                        std::move(factors),      std::move(multicollinearity), std::move(fits),
                        std::move(profile)};
}

}  // namespace stocknet
