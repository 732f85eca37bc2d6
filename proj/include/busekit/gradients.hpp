#pragma once

#include <vector>

#include "busekit/field.hpp"
#include "busekit/metric.hpp"

namespace busekit {

struct GradientCluster {
  Covector representative;  // member mean
  std::size_t size = 0;
};

// Single-linkage clustering in the covector norm |.|_{g^{-1}}, cut at `cut`.
// Clusters come back sorted lexicographically by representative.
std::vector<GradientCluster> cluster_gradients(const std::vector<Covector>& samples,
                                               const Mat2& inverse_metric, double cut);

struct GradientJump {
  std::vector<Covector> samples;          // near-unit sector gradients
  std::vector<GradientCluster> clusters;
  double diameter = 0.0;                  // max pairwise sample distance
};

// Reachable-gradient estimate at node (i,j) from its second-order sector
// gradients; samples with | |p|_g - 1 | > tol_grad are discarded.
GradientJump gradient_jump(const MetricChart& chart, const ScalarField& field, int i, int j,
                           double cut, double tol_grad);

}  // namespace busekit
