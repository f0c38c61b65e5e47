#pragma once

#include <optional>

#include "maxcut/graph.hpp"
#include "maxcut/types.hpp"

namespace maxcut {

// Total weight of edges crossing the partition, each undirected edge once.
Scalar evaluate_cut(const Graph& g, const CutAssignment& x);

// Relaxed objective L(p) = sum over edges of w * (2 p_i p_j - p_i - p_j).
// For binary p this equals -cut(p) exactly; training minimizes it.
Scalar soft_loss(const Graph& g, const SoftAssignment& p);

// d L / d p_i = sum over j in N(i) of w_ij * (2 p_j - 1).
Vector soft_loss_grad(const Graph& g, const SoftAssignment& p);

// Cut statistics. The spin-glass energy fields are defined only for
// unweighted d-regular instances: with s = 2x - 1 the Ising energy is
// H = m - 2 cut, so e = H/n = d/2 - 2 gamma and the comparison figure of
// merit is e / sqrt(d).
struct CutMetrics {
  Scalar cut = 0;
  Scalar gamma = 0;  // cut / n
  std::optional<Scalar> energy_density;
  std::optional<Scalar> figure_of_merit;
  std::optional<Index> degree;
};

CutMetrics cut_metrics(const Graph& g, const CutAssignment& x);

// Conversions behind the `convert` subcommand.
Scalar energy_density_from_gamma(Scalar gamma, Index d);
Scalar figure_of_merit_from_gamma(Scalar gamma, Index d);
Scalar gamma_from_figure_of_merit(Scalar fom, Index d);

// |a - b| / |b|; relative change of figure of merit a against baseline b.
Scalar improvement_ratio(Scalar a, Scalar b);

}  // namespace maxcut
