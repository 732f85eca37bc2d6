#include "busekit/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "busekit/eikonal.hpp"

namespace busekit {

namespace {

double covector_distance(const Mat2& ginv, Covector a, Covector b) {
  const double q = ginv.quad(a - b);
  return std::sqrt(q > 0.0 ? q : 0.0);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t k) {
  while (parent[k] != k) {
    parent[k] = parent[parent[k]];
    k = parent[k];
  }
  return k;
}

}  // namespace

std::vector<GradientCluster> cluster_gradients(const std::vector<Covector>& samples,
                                               const Mat2& inverse_metric, double cut) {
  const std::size_t n = samples.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (covector_distance(inverse_metric, samples[a], samples[b]) <= cut) {
        const std::size_t ra = find_root(parent, a), rb = find_root(parent, b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
  std::vector<GradientCluster> out;
  std::vector<std::size_t> root_of_cluster;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = find_root(parent, k);
    auto it = std::find(root_of_cluster.begin(), root_of_cluster.end(), r);
    std::size_t c = 0;
    if (it == root_of_cluster.end()) {
      root_of_cluster.push_back(r);
      out.push_back({});
      c = out.size() - 1;
    } else {
      c = static_cast<std::size_t>(it - root_of_cluster.begin());
    }
    out[c].representative = out[c].representative + samples[k];
    ++out[c].size;
  }
  for (auto& c : out) c.representative = c.representative * (1.0 / static_cast<double>(c.size));
  std::sort(out.begin(), out.end(), [](const GradientCluster& a, const GradientCluster& b) {
    if (a.representative.dx != b.representative.dx) return a.representative.dx < b.representative.dx;
    return a.representative.dy < b.representative.dy;
  });
  return out;
}

GradientJump gradient_jump(const MetricChart& chart, const ScalarField& field, int i, int j,
                           double cut, double tol_grad) {
  GradientJump out;
  const Mat2 ginv = chart.tensor_unchecked(chart.wrap(field.node(i, j))).inverse();
  for (const auto& g : sector_gradients(field, i, j)) {
    if (!g) continue;
    const double n = std::sqrt(std::max(0.0, ginv.quad(*g)));
    if (std::abs(n - 1.0) <= tol_grad) out.samples.push_back(*g);
  }
  for (std::size_t a = 0; a < out.samples.size(); ++a)
    for (std::size_t b = a + 1; b < out.samples.size(); ++b)
      out.diameter = std::max(out.diameter, covector_distance(ginv, out.samples[a], out.samples[b]));
  out.clusters = cluster_gradients(out.samples, ginv, cut);
  return out;
}

}  // namespace busekit
