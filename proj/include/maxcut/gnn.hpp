#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "maxcut/energy.hpp"
#include "maxcut/graph.hpp"
#include "maxcut/types.hpp"

namespace maxcut {

enum class LayerKind { Gcn, Sage };

enum class Activation { Identity, Relu };

struct TrainConfig {
  LayerKind kind = LayerKind::Gcn;
  Index embedding_dim = 0;  // 0: ceil(sqrt(n)) clamped to [10, 100]
  Index hidden_dim = 0;     // 0: embedding_dim / 2 rounded up
  Scalar learning_rate = 1e-3;
  Index max_epochs = 100000;
  Index patience = 500;     // epochs without improvement before stopping
  Scalar tolerance = 1e-4;  // minimum loss decrease that counts as improvement
  Scalar rounding_threshold = 0.5;
  RngSeed seed{1};
  Scalar adam_beta1 = 0.9;
  Scalar adam_beta2 = 0.999;
  Scalar adam_eps = 1e-8;
  int restarts = 1;  // independent trainings per solve; best cut wins
};

void validate_config(const TrainConfig& cfg);

// (embedding_dim, hidden_dim) with the auto defaults resolved for g.
std::pair<Index, Index> resolved_dims(const Graph& g, const TrainConfig& cfg);

// Per-layer weights. `w` is the single GCN weight (applied to the normalized
// aggregate) or the SAGE self path; `w_neigh` is the SAGE neighbor path and
// stays 0x0 for GCN.
struct LayerParams {
  Matrix w;
  Matrix w_neigh;
  Vector bias;
};

struct ModelParams {
  LayerKind kind = LayerKind::Gcn;
  Matrix embeddings;   // n x d0, trainable per-node inputs
  LayerParams layer1;  // d0 -> h
  LayerParams layer2;  // h -> 1
};

// Same shapes as the trainable tensors of a ModelParams; also used for the
// Adam moment accumulators.
struct ParamGrads {
  Matrix embeddings;
  LayerParams layer1;
  LayerParams layer2;
};

// Uniform init in +-1/sqrt(fan-in) per tensor, deterministic in cfg.seed.
ModelParams init_params(const Graph& g, const TrainConfig& cfg);

// Sparse product with the symmetrically normalized adjacency
// D^{-1/2} (A + I) D^{-1/2} where D is the degree matrix of A + I.
// Throws NumericError when some augmented weighted degree is nonpositive.
Matrix gcn_aggregate(const Graph& g, const Matrix& h);

// Row i = mean of neighbor rows (unweighted); zero row for isolated nodes.
Matrix neighbor_mean(const Graph& g, const Matrix& h);

// Product with the transpose of the neighbor-mean operator:
// row i = sum over j in N(i) of h_j / degree(j).
Matrix neighbor_mean_transpose(const Graph& g, const Matrix& h);

Matrix gcn_layer_forward(const Graph& g, const Matrix& h, const Matrix& w,
                         const Vector& bias, Activation act);
Matrix sage_layer_forward(const Graph& g, const Matrix& h, const Matrix& w_self,
                          const Matrix& w_neigh, const Vector& bias,
                          Activation act);

// Everything backward needs that forward already computed: the per-layer
// aggregates, the post-ReLU hidden features, and the output probabilities.
struct ForwardTrace {
  Matrix agg1;  // layer-1 aggregate of the embeddings
  Matrix h1;    // n x h, post-ReLU
  Matrix agg2;  // layer-2 aggregate of h1
  SoftAssignment p;
};

// embeddings -> layer1 (ReLU) -> layer2 (linear, width 1) -> sigmoid.
ForwardTrace forward(const Graph& g, const ModelParams& params);

// Reverse-mode gradients of every trainable tensor given dL/dp.
ParamGrads backward(const Graph& g, const ModelParams& params,
                    const ForwardTrace& trace, const Vector& dloss_dp);

struct TrainResult {
  ModelParams params;  // best-loss state seen, not the last epoch
  SoftAssignment p;    // output of that state
  std::vector<Scalar> loss_history;
  Scalar best_loss = 0;
};

// Full-batch Adam on soft_loss. Stops at max_epochs or once `patience`
// consecutive epochs improved the best loss by less than `tolerance`.
TrainResult train(const Graph& g, const TrainConfig& cfg);

// x_i = 1 iff p_i >= threshold.
CutAssignment round_assignment(const SoftAssignment& p, Scalar threshold);

struct SolveResult {
  CutAssignment assignment;
  CutMetrics metrics;
  double runtime_ms = 0;
  Index epochs = 0;  // summed over restarts
};

// train -> round -> evaluate, wall clock included.
SolveResult solve_pignn(const Graph& g, const TrainConfig& cfg);

// Bytes held live during one training run: parameters, gradients, the two
// Adam moments, and the forward trace. Grows linearly in n and m.
std::size_t training_state_bytes(const Graph& g, const TrainConfig& cfg);

}  // namespace maxcut
