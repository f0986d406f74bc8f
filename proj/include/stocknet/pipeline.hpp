#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stocknet/factors.hpp"
#include "stocknet/ingest.hpp"
#include "stocknet/marketstats.hpp"
#include "stocknet/network.hpp"
#include "stocknet/regression.hpp"

namespace stocknet {

/// In-memory run of the whole analysis on one return panel.
struct PipelineResult {
  CorrelationMatrix correlations;
  SpanningTree tree;
  std::optional<PowerLawFit> power_law;  // empty with fewer than 3 degree bins
  FactorModel factors;
  MulticollinearityReport multicollinearity;
  std::vector<RegressionResult> fits;
  DegreeR2Profile profile;
};

PipelineResult run_pipeline(const ReturnPanel& returns, const FactorOptions& options = {});

}  // namespace stocknet
