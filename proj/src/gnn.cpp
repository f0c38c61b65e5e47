#include "maxcut/gnn.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "maxcut/rng.hpp"

namespace maxcut {

namespace {

Scalar sigmoid(Scalar z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (1.0 + e);
}

Matrix apply_activation(Matrix z, Activation act) {
  if (act == Activation::Relu) z = z.cwiseMax(0.0);
  return z;
}

void check_feature_input(const Graph& g, const Matrix& h) {
  if (h.rows() != g.num_nodes())
    throw std::invalid_argument("feature matrix has " + std::to_string(h.rows()) +
                                " rows, graph has " +
                                std::to_string(g.num_nodes()) + " nodes");
  if (!h.allFinite())
    throw std::invalid_argument("feature matrix has non-finite entries");
}

void check_layer_shapes(const Matrix& h, const Matrix& w, const Vector& bias) {
  if (h.cols() != w.rows())
    throw std::invalid_argument("feature width " + std::to_string(h.cols()) +
                                " does not match weight rows " +
                                std::to_string(w.rows()));
  if (bias.size() != w.cols())
    throw std::invalid_argument("bias size " + std::to_string(bias.size()) +
                                " does not match weight cols " +
                                std::to_string(w.cols()));
}

// 1/sqrt(1 + weighted degree) per node; the diagonal of D^{-1/2} for A + I.
Vector gcn_inv_sqrt_degree(const Graph& g) {
  Vector inv(g.num_nodes());
  for (Index i = 0; i < g.num_nodes(); ++i) {
    Scalar deg = 1.0;
    for (Scalar w : g.edge_weights(i)) deg += w;
    if (!(deg > 0.0))
      throw NumericError("gcn normalization undefined: augmented degree " +
                         std::to_string(deg) + " at node " + std::to_string(i));
    inv[i] = 1.0 / std::sqrt(deg);
  }
  return inv;
}

}  // namespace

Matrix gcn_aggregate(const Graph& g, const Matrix& h) {
  check_feature_input(g, h);
  const Vector inv = gcn_inv_sqrt_degree(g);
  Matrix out(h.rows(), h.cols());
  for (Index i = 0; i < g.num_nodes(); ++i) {
    const auto nbrs = g.neighbors(i);
    const auto ws = g.edge_weights(i);
    out.row(i) = (inv[i] * inv[i]) * h.row(i);  // the added self-loop
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      out.row(i) += (ws[k] * inv[i] * inv[nbrs[k]]) * h.row(nbrs[k]);
  }
  return out;
}

Matrix neighbor_mean(const Graph& g, const Matrix& h) {
  check_feature_input(g, h);
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (Index i = 0; i < g.num_nodes(); ++i) {
    const auto nbrs = g.neighbors(i);
    if (nbrs.empty()) continue;
    for (Index j : nbrs) out.row(i) += h.row(j);
    out.row(i) /= static_cast<Scalar>(nbrs.size());
  }
  return out;
}

Matrix neighbor_mean_transpose(const Graph& g, const Matrix& h) {
  check_feature_input(g, h);
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (Index i = 0; i < g.num_nodes(); ++i) {
    const auto nbrs = g.neighbors(i);
    for (Index j : nbrs)
      out.row(i) += h.row(j) / static_cast<Scalar>(g.degree(j));
  }
  return out;
}

Matrix gcn_layer_forward(const Graph& g, const Matrix& h, const Matrix& w,
                         const Vector& bias, Activation act) {
  check_layer_shapes(h, w, bias);
  Matrix z = gcn_aggregate(g, h) * w;
  z.rowwise() += bias.transpose();
  return apply_activation(std::move(z), act);
}

Matrix sage_layer_forward(const Graph& g, const Matrix& h, const Matrix& w_self,
                          const Matrix& w_neigh, const Vector& bias,
                          Activation act) {
  check_layer_shapes(h, w_self, bias);
  if (w_neigh.rows() != w_self.rows() || w_neigh.cols() != w_self.cols())
    throw std::invalid_argument("self and neighbor weights must share a shape");
  Matrix z = h * w_self + neighbor_mean(g, h) * w_neigh;
  z.rowwise() += bias.transpose();
  return apply_activation(std::move(z), act);
}

void validate_config(const TrainConfig& cfg) {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (cfg.embedding_dim < 0) fail("embedding_dim must be >= 0 (0 = auto)");
  if (cfg.hidden_dim < 0) fail("hidden_dim must be >= 0 (0 = auto)");
  if (!(cfg.learning_rate > 0)) fail("learning_rate must be positive");
  if (cfg.max_epochs <= 0) fail("max_epochs must be positive");
  if (cfg.patience <= 0) fail("patience must be positive");
  if (cfg.patience > cfg.max_epochs) fail("patience must not exceed max_epochs");
  if (!(cfg.tolerance > 0)) fail("tolerance must be positive");
  if (!(cfg.rounding_threshold > 0 && cfg.rounding_threshold < 1))
    fail("rounding_threshold must lie in (0, 1)");
  if (!(cfg.adam_beta1 > 0 && cfg.adam_beta1 < 1)) fail("adam_beta1 must lie in (0, 1)");
  if (!(cfg.adam_beta2 > 0 && cfg.adam_beta2 < 1)) fail("adam_beta2 must lie in (0, 1)");
  if (!(cfg.adam_eps > 0)) fail("adam_eps must be positive");
  if (cfg.restarts < 1) fail("restarts must be >= 1");
}

std::pair<Index, Index> resolved_dims(const Graph& g, const TrainConfig& cfg) {
  Index d0 = cfg.embedding_dim;
  if (d0 == 0) {
    d0 = static_cast<Index>(
        std::ceil(std::sqrt(static_cast<Scalar>(g.num_nodes()))));
    d0 = std::clamp<Index>(d0, 10, 100);
  }
  Index h = cfg.hidden_dim;
  if (h == 0) h = (d0 + 1) / 2;
  return {d0, h};
}

ModelParams init_params(const Graph& g, const TrainConfig& cfg) {
  validate_config(cfg);
  const auto [d0, h] = resolved_dims(g, cfg);
  const Index n = g.num_nodes();

  auto engine = make_engine(cfg.seed);
  auto fill = [&engine](auto& tensor, Index fan_in) {
    const Scalar bound = 1.0 / std::sqrt(static_cast<Scalar>(fan_in));
    std::uniform_real_distribution<Scalar> dist(-bound, bound);
    for (Index r = 0; r < tensor.rows(); ++r)
      for (Index c = 0; c < tensor.cols(); ++c) tensor(r, c) = dist(engine);
  };

  ModelParams params;
  params.kind = cfg.kind;
  params.embeddings.resize(n, d0);
  fill(params.embeddings, d0);
  params.layer1.w.resize(d0, h);
  fill(params.layer1.w, d0);
  params.layer2.w.resize(h, 1);
  fill(params.layer2.w, h);
  if (cfg.kind == LayerKind::Sage) {
    params.layer1.w_neigh.resize(d0, h);
    fill(params.layer1.w_neigh, d0);
    params.layer2.w_neigh.resize(h, 1);
    fill(params.layer2.w_neigh, h);
  }
  params.layer1.bias.resize(h);
  fill(params.layer1.bias, d0);
  params.layer2.bias.resize(1);
  fill(params.layer2.bias, h);

  // The relaxed loss has a stationary point at uniform p, so the embeddings
  // must not be constant. Random draws never are in practice; this guard
  // makes it a contract.
  if (params.embeddings.size() > 1 &&
      params.embeddings.minCoeff() == params.embeddings.maxCoeff())
    params.embeddings(0, 0) += 0.5 / std::sqrt(static_cast<Scalar>(d0));

  return params;
}

namespace {

void check_model_shapes(const Graph& g, const ModelParams& params) {
  const Index n = g.num_nodes();
  const Index d0 = params.embeddings.cols();
  const Index h = params.layer1.w.cols();
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (params.embeddings.rows() != n) fail("embeddings row count does not match n");
  if (params.layer1.w.rows() != d0) fail("layer1 weight rows do not match embedding dim");
  if (params.layer1.bias.size() != h) fail("layer1 bias size does not match hidden dim");
  if (params.layer2.w.rows() != h || params.layer2.w.cols() != 1)
    fail("layer2 weight must map hidden dim to width 1");
  if (params.layer2.bias.size() != 1) fail("layer2 bias must have size 1");
  const bool sage = params.kind == LayerKind::Sage;
  if (sage) {
    if (params.layer1.w_neigh.rows() != d0 || params.layer1.w_neigh.cols() != h)
      fail("layer1 neighbor weight shape mismatch");
    if (params.layer2.w_neigh.rows() != h || params.layer2.w_neigh.cols() != 1)
      fail("layer2 neighbor weight shape mismatch");
  } else if (params.layer1.w_neigh.size() != 0 || params.layer2.w_neigh.size() != 0) {
    fail("gcn model must not carry neighbor weights");
  }
}

}  // namespace

ForwardTrace forward(const Graph& g, const ModelParams& params) {
  check_model_shapes(g, params);
  const bool sage = params.kind == LayerKind::Sage;
  ForwardTrace t;

  Matrix z1;
  if (sage) {
    t.agg1 = neighbor_mean(g, params.embeddings);
    z1 = params.embeddings * params.layer1.w + t.agg1 * params.layer1.w_neigh;
  } else {
    t.agg1 = gcn_aggregate(g, params.embeddings);
    z1 = t.agg1 * params.layer1.w;
  }
  z1.rowwise() += params.layer1.bias.transpose();
  if (!z1.allFinite()) throw NumericError("non-finite activations in layer 1");
  t.h1 = z1.cwiseMax(0.0);

  Matrix z2;
  if (sage) {
    t.agg2 = neighbor_mean(g, t.h1);
    z2 = t.h1 * params.layer2.w + t.agg2 * params.layer2.w_neigh;
  } else {
    t.agg2 = gcn_aggregate(g, t.h1);
    z2 = t.agg2 * params.layer2.w;
  }
  z2.rowwise() += params.layer2.bias.transpose();
  if (!z2.allFinite()) throw NumericError("non-finite activations in layer 2");

  t.p.resize(g.num_nodes());
  for (Index i = 0; i < g.num_nodes(); ++i) t.p[i] = sigmoid(z2(i, 0));
  return t;
}

ParamGrads backward(const Graph& g, const ModelParams& params,
                    const ForwardTrace& trace, const Vector& dloss_dp) {
  check_model_shapes(g, params);
  const Index n = g.num_nodes();
  if (trace.p.size() != n || trace.h1.rows() != n || trace.agg1.rows() != n ||
      trace.agg2.rows() != n || trace.h1.cols() != params.layer1.w.cols() ||
      trace.agg1.cols() != params.embeddings.cols())
    throw std::invalid_argument("trace does not match model and graph");
  if (dloss_dp.size() != n)
    throw std::invalid_argument("upstream gradient length does not match n");

  const bool sage = params.kind == LayerKind::Sage;
  ParamGrads grads;

  // Output head: p = sigmoid(z2).
  Matrix dz2 =
      (dloss_dp.array() * trace.p.array() * (1.0 - trace.p.array())).matrix();

  grads.layer2.bias = dz2.colwise().sum().transpose();
  Matrix dh1;
  if (sage) {
    grads.layer2.w = trace.h1.transpose() * dz2;
    grads.layer2.w_neigh = trace.agg2.transpose() * dz2;
    dh1 = dz2 * params.layer2.w.transpose() +
          neighbor_mean_transpose(g, dz2 * params.layer2.w_neigh.transpose());
  } else {
    grads.layer2.w = trace.agg2.transpose() * dz2;
    // The normalized adjacency is symmetric, so its transpose product is the
    // same aggregate.
    dh1 = gcn_aggregate(g, dz2 * params.layer2.w.transpose());
  }

  const Matrix relu_mask = (trace.h1.array() > 0.0).cast<Scalar>().matrix();
  const Matrix dz1 = dh1.cwiseProduct(relu_mask);

  grads.layer1.bias = dz1.colwise().sum().transpose();
  if (sage) {
    grads.layer1.w = params.embeddings.transpose() * dz1;
    grads.layer1.w_neigh = trace.agg1.transpose() * dz1;
    grads.embeddings =
        dz1 * params.layer1.w.transpose() +
        neighbor_mean_transpose(g, dz1 * params.layer1.w_neigh.transpose());
  } else {
    grads.layer1.w = trace.agg1.transpose() * dz1;
    grads.embeddings = gcn_aggregate(g, dz1 * params.layer1.w.transpose());
  }
  return grads;
}

namespace {

ParamGrads zeros_like(const ModelParams& params) {
  ParamGrads z;
  z.embeddings = Matrix::Zero(params.embeddings.rows(), params.embeddings.cols());
  auto layer = [](const LayerParams& l) {
    LayerParams out;
    out.w = Matrix::Zero(l.w.rows(), l.w.cols());
    out.w_neigh = Matrix::Zero(l.w_neigh.rows(), l.w_neigh.cols());
    out.bias = Vector::Zero(l.bias.size());
    return out;
  };
  z.layer1 = layer(params.layer1);
  z.layer2 = layer(params.layer2);
  return z;
}

template <typename T>
void adam_update(T& x, const T& grad, T& m, T& v, const TrainConfig& cfg,
                 Index step) {
  if (x.size() == 0) return;
  m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
  v.array() = cfg.adam_beta2 * v.array() +
              (1.0 - cfg.adam_beta2) * grad.array().square();
  const Scalar corr1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<Scalar>(step));
  const Scalar corr2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<Scalar>(step));
  x.array() -= cfg.learning_rate * (m.array() / corr1) /
               ((v.array() / corr2).sqrt() + cfg.adam_eps);
}

void adam_step(ModelParams& params, const ParamGrads& grads, ParamGrads& m,
               ParamGrads& v, const TrainConfig& cfg, Index step) {
  adam_update(params.embeddings, grads.embeddings, m.embeddings, v.embeddings,
              cfg, step);
  adam_update(params.layer1.w, grads.layer1.w, m.layer1.w, v.layer1.w, cfg, step);
  adam_update(params.layer1.w_neigh, grads.layer1.w_neigh, m.layer1.w_neigh,
              v.layer1.w_neigh, cfg, step);
  adam_update(params.layer1.bias, grads.layer1.bias, m.layer1.bias,
              v.layer1.bias, cfg, step);
  adam_update(params.layer2.w, grads.layer2.w, m.layer2.w, v.layer2.w, cfg, step);
  adam_update(params.layer2.w_neigh, grads.layer2.w_neigh, m.layer2.w_neigh,
              v.layer2.w_neigh, cfg, step);
  adam_update(params.layer2.bias, grads.layer2.bias, m.layer2.bias,
              v.layer2.bias, cfg, step);
}

}  // namespace

TrainResult train(const Graph& g, const TrainConfig& cfg) {
  validate_config(cfg);
  ModelParams params = init_params(g, cfg);
  ParamGrads m = zeros_like(params);
  ParamGrads v = zeros_like(params);

  TrainResult result;
  result.best_loss = std::numeric_limits<Scalar>::infinity();
  result.loss_history.reserve(256);
  Scalar patience_reference = std::numeric_limits<Scalar>::infinity();
  Index epochs_without_improvement = 0;

  for (Index epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    ForwardTrace trace;
    try {
      trace = forward(g, params);
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) + ": " + e.what());
    }
    const Scalar loss = soft_loss(g, trace.p);
    if (!std::isfinite(loss))
      throw NumericError("epoch " + std::to_string(epoch) + ": non-finite loss");
    result.loss_history.push_back(loss);

    if (loss < result.best_loss) {
      result.best_loss = loss;
      result.params = params;
      result.p = trace.p;
    }
    if (loss < patience_reference - cfg.tolerance) {
      patience_reference = loss;
      epochs_without_improvement = 0;
    } else if (++epochs_without_improvement >= cfg.patience) {
      break;
    }

    const Vector dloss_dp = soft_loss_grad(g, trace.p);
    const ParamGrads grads = backward(g, params, trace, dloss_dp);
    adam_step(params, grads, m, v, cfg, epoch);
  }
  return result;
}

CutAssignment round_assignment(const SoftAssignment& p, Scalar threshold) {
  if (!(threshold > 0 && threshold < 1))
    throw std::invalid_argument("rounding threshold must lie in (0, 1)");
  CutAssignment x(p.size());
  for (Index i = 0; i < p.size(); ++i) x[i] = p[i] >= threshold ? 1 : 0;
  return x;
}

SolveResult solve_pignn(const Graph& g, const TrainConfig& cfg) {
  validate_config(cfg);
  const auto start = std::chrono::steady_clock::now();

  SolveResult result;
  Scalar best_cut = -std::numeric_limits<Scalar>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    TrainConfig run_cfg = cfg;
    if (r > 0) run_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
    const TrainResult trained = train(g, run_cfg);
    CutAssignment x = round_assignment(trained.p, cfg.rounding_threshold);
    const Scalar cut = evaluate_cut(g, x);
    result.epochs += static_cast<Index>(trained.loss_history.size());
    if (cut > best_cut) {
      best_cut = cut;
      result.assignment = std::move(x);
    }
  }
  result.metrics = cut_metrics(g, result.assignment);

  const auto end = std::chrono::steady_clock::now();
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(end - start).count();
  return result;
}

std::size_t training_state_bytes(const Graph& g, const TrainConfig& cfg) {
  validate_config(cfg);
  const auto [d0, h] = resolved_dims(g, cfg);
  const auto n = static_cast<std::size_t>(g.num_nodes());
  const bool sage = cfg.kind == LayerKind::Sage;

  const std::size_t layer_params = static_cast<std::size_t>(d0) * h + h +
                                   static_cast<std::size_t>(h) + 1 +
                                   (sage ? static_cast<std::size_t>(d0) * h + h : 0);
  const std::size_t param_count = n * static_cast<std::size_t>(d0) + layer_params;
  // params + grads + two Adam moments, then the forward trace.
  const std::size_t trace_count = n * static_cast<std::size_t>(d0) +
                                  2 * n * static_cast<std::size_t>(h) + 2 * n;
  return (4 * param_count + trace_count) * sizeof(Scalar);
}

}  // namespace maxcut
