#include "maxcut/energy.hpp"

#include <cmath>
#include <string>

namespace maxcut {

namespace {

void check_length(const Graph& g, Index len, const char* what) {
  if (len != g.num_nodes())
    throw std::invalid_argument(std::string(what) + " length " +
                                std::to_string(len) + " does not match n = " +
                                std::to_string(g.num_nodes()));
}

void check_binary(const CutAssignment& x) {
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] > 1)
      throw std::invalid_argument("assignment entry " + std::to_string(i) +
                                  " is not binary");
}

void check_unit_interval(const SoftAssignment& p) {
  for (Index i = 0; i < p.size(); ++i)
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw std::invalid_argument("probability entry " + std::to_string(i) +
                                  " = " + std::to_string(p[i]) +
                                  " outside [0, 1]");
}

}  // namespace

Scalar evaluate_cut(const Graph& g, const CutAssignment& x) {
  check_length(g, x.size(), "assignment");
  check_binary(x);
  Scalar cut = 0;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    const auto nbrs = g.neighbors(i);
    const auto ws = g.edge_weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (nbrs[k] > i && x[i] != x[nbrs[k]]) cut += ws[k];
  }
  return cut;
}

Scalar soft_loss(const Graph& g, const SoftAssignment& p) {
  check_length(g, p.size(), "probability vector");
  check_unit_interval(p);
  Scalar loss = 0;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    const auto nbrs = g.neighbors(i);
    const auto ws = g.edge_weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const Index j = nbrs[k];
      if (j > i) loss += ws[k] * (2.0 * p[i] * p[j] - p[i] - p[j]);
    }
  }
  return loss;
}

Vector soft_loss_grad(const Graph& g, const SoftAssignment& p) {
  check_length(g, p.size(), "probability vector");
  check_unit_interval(p);
  Vector grad = Vector::Zero(g.num_nodes());
  for (Index i = 0; i < g.num_nodes(); ++i) {
    const auto nbrs = g.neighbors(i);
    const auto ws = g.edge_weights(i);
    Scalar gi = 0;
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      gi += ws[k] * (2.0 * p[nbrs[k]] - 1.0);
    grad[i] = gi;
  }
  return grad;
}

CutMetrics cut_metrics(const Graph& g, const CutAssignment& x) {
  CutMetrics m;
  m.cut = evaluate_cut(g, x);
  m.gamma = m.cut / static_cast<Scalar>(g.num_nodes());
  const DegreeStats ds = degree_stats(g);
  if (ds.is_regular && g.unit_weights()) {
    m.degree = ds.regular_degree;
    m.energy_density = energy_density_from_gamma(m.gamma, ds.regular_degree);
    m.figure_of_merit = figure_of_merit_from_gamma(m.gamma, ds.regular_degree);
  }
  return m;
}

Scalar energy_density_from_gamma(Scalar gamma, Index d) {
  return static_cast<Scalar>(d) / 2.0 - 2.0 * gamma;
}

Scalar figure_of_merit_from_gamma(Scalar gamma, Index d) {
  return energy_density_from_gamma(gamma, d) / std::sqrt(static_cast<Scalar>(d));
}

Scalar gamma_from_figure_of_merit(Scalar fom, Index d) {
  const Scalar e = fom * std::sqrt(static_cast<Scalar>(d));
  return (static_cast<Scalar>(d) / 2.0 - e) / 2.0;
}

Scalar improvement_ratio(Scalar a, Scalar b) {
  if (b == 0.0) throw std::invalid_argument("improvement baseline must be nonzero");
  return std::abs(a - b) / std::abs(b);
}

}  // namespace maxcut
