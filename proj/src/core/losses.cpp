#include "core/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/rng.hpp"

namespace sfrd {

void LossWeights::validate() const {
  if (lambda_heatmap < 0.0 || lambda_depthmap < 0.0) {
    throw ContractError("LossWeights: scale factors must be nonnegative");
  }
}

void FitConfig::validate() const {
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw ContractError("FitConfig: step_size must be finite and nonnegative");
  }
  if (max_iters < 1) throw ContractError("FitConfig: max_iters must be at least 1");
}

double loss_uv(const JointSetUVD& pred, const JointSetUVD& gt) {
  if (pred.count() != gt.count()) {
    throw ContractError("loss_uv: joint count mismatch");
  }
  double acc = 0.0;
  for (int j = 0; j < pred.count(); ++j) {
    double du = pred.joints[j].u - gt.joints[j].u;
    double dv = pred.joints[j].v - gt.joints[j].v;
    acc += du * du + dv * dv;
  }
  return acc;
}

double loss_d(const JointSetUVD& pred, const JointSetUVD& gt) {
  if (pred.count() != gt.count()) {
    throw ContractError("loss_d: joint count mismatch");
  }
  double acc = 0.0;
  for (int j = 0; j < pred.count(); ++j) {
    double dd = pred.joints[j].d - gt.joints[j].d;
    acc += dd * dd;
  }
  return acc;
}

namespace {

double grid_sq_diff(const Grid& a, const Grid& b, const char* op) {
  if (!a.same_shape(b)) throw ContractError(std::string(op) + ": shape mismatch");
  double acc = 0.0;
  const auto& av = a.data();
  const auto& bv = b.data();
  for (std::size_t i = 0; i < av.size(); ++i) {
    double diff = av[i] - bv[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

double loss_heatmap(std::span<const Heatmap> pred, std::span<const Heatmap> gt) {
  if (pred.size() != gt.size()) {
    throw ContractError("loss_heatmap: joint count mismatch");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    acc += grid_sq_diff(pred[j].values, gt[j].values, "loss_heatmap");
  }
  return acc;
}

double loss_depthmap(std::span<const DepthOffsetMap> pred,
                     std::span<const DepthOffsetMap> gt) {
  if (pred.size() != gt.size()) {
    throw ContractError("loss_depthmap: joint count mismatch");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    acc += grid_sq_diff(pred[j].values, gt[j].values, "loss_depthmap");
  }
  return acc;
}

double stage_loss(const StageLossParts& parts, const LossWeights& w) {
  w.validate();
  return parts.uv + parts.d + w.lambda_heatmap * parts.heatmap +
         w.lambda_depthmap * parts.depthmap;
}

double total_loss(std::span<const double> stage_losses) {
  if (stage_losses.empty()) {
    throw ContractError("total_loss: at least one stage required");
  }
  double acc = 0.0;
  for (double s : stage_losses) acc += s;
  return acc;
}

const char* fit_mode_name(FitMode mode) {
  switch (mode) {
    case FitMode::full:
      return "full";
    case FitMode::coordinate_unsupervised:
      return "coordinate_unsupervised";
    case FitMode::representation_unsupervised:
      return "representation_unsupervised";
  }
  return "unknown";
}

namespace {

Grid softmax(const Grid& scores) {
  Grid h(scores.rows(), scores.cols());
  double peak = *std::max_element(scores.data().begin(), scores.data().end());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.data().size(); ++i) {
    double e = std::exp(scores.data()[i] - peak);
    h.data()[i] = e;
    total += e;
  }
  for (double& v : h.data()) v /= total;
  return h;
}

// dL/dS for H = softmax(S): H * (g - <g, H>).
void softmax_backward(const Grid& h, const Grid& grad_h, Grid* grad_s) {
  double dot = 0.0;
  for (std::size_t i = 0; i < h.data().size(); ++i) {
    dot += grad_h.data()[i] * h.data()[i];
  }
  for (std::size_t i = 0; i < h.data().size(); ++i) {
    grad_s->data()[i] = h.data()[i] * (grad_h.data()[i] - dot);
  }
}

bool uses_coordinate_losses(FitMode mode) {
  return mode != FitMode::coordinate_unsupervised;
}

bool uses_representation_losses(FitMode mode) {
  return mode != FitMode::representation_unsupervised;
}

}  // namespace

FitObjective::FitObjective(const JointSetUVD& target, const DepthFrame& img,
                           FitMode mode, const LossWeights& weights,
                           const GaussKernel& kernel)
    : target_(target), img_(img), mode_(mode), weights_(weights) {
  target_.validate();
  img_.validate();
  weights_.validate();
  kernel.validate();
  mask_ = build_mask(img_);
  com_ = ComKernel::make(img_.resolution);
  target_heatmaps_.reserve(target_.joints.size());
  target_offset_maps_.reserve(target_.joints.size());
  for (const JointUVD& joint : target_.joints) {
    Heatmap h = encode_heatmap(UV{joint.u, joint.v}, img_.resolution, kernel);
    double den = 0.0;
    for (int r = 0; r < img_.resolution; ++r) {
      for (int c = 0; c < img_.resolution; ++c) {
        den += mask_.values(r, c) * h.values(r, c);
      }
    }
    if (den <= kDepthDenominatorEpsilon) {
      throw UnsupportedJointError(
          "fit: target joint's heatmap support lies entirely off the hand");
    }
    target_offset_maps_.push_back(encode_depth_map(joint.d, h, img_, mask_));
    target_heatmaps_.push_back(std::move(h));
  }
}

FitState FitObjective::initial_state(std::uint64_t seed) const {
  Rng rng(splitmix64(seed));
  FitState state;
  const int n = img_.resolution;
  state.scores.reserve(target_.joints.size());
  state.offsets.reserve(target_.joints.size());
  for (int j = 0; j < target_.count(); ++j) {
    Grid s = Grid::square(n);
    for (double& v : s.data()) v = rng.uniform(-0.01, 0.01);
    state.scores.push_back(std::move(s));
    state.offsets.push_back(Grid::square(n));
  }
  return state;
}

std::vector<Heatmap> FitObjective::heatmaps(const FitState& state) const {
  std::vector<Heatmap> out;
  out.reserve(state.scores.size());
  for (const Grid& s : state.scores) out.push_back(Heatmap{softmax(s)});
  return out;
}

std::vector<DepthOffsetMap> FitObjective::offset_maps(const FitState& state) const {
  std::vector<DepthOffsetMap> out;
  out.reserve(state.offsets.size());
  for (const Grid& raw : state.offsets) {
    Grid masked(raw.rows(), raw.cols());
    for (std::size_t i = 0; i < raw.data().size(); ++i) {
      masked.data()[i] = raw.data()[i] * mask_.values.data()[i];
    }
    out.push_back(DepthOffsetMap{std::move(masked)});
  }
  return out;
}

JointSetUVD FitObjective::decode(const FitState& state) const {
  JointSetUVD decoded;
  const int n = img_.resolution;
  for (int j = 0; j < target_.count(); ++j) {
    Heatmap h{softmax(state.scores[j])};
    UV uv = decode_plane(h, com_);
    double num = 0.0;
    double den = 0.0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        double w = mask_.values(r, c) * h.values(r, c);
        num += w * (img_.values(r, c) + state.offsets[j](r, c));
        den += w;
      }
    }
    if (den <= kDepthDenominatorEpsilon) {
      throw UnsupportedJointError("fit: fitted heatmap lost its on-hand support");
    }
    decoded.joints.push_back(JointUVD{uv.u, uv.v, num / den});
  }
  return decoded;
}

FitObjective::Eval FitObjective::evaluate(const FitState& state) const {
  return evaluate_with_gradient(state, nullptr);
}

FitObjective::Eval FitObjective::evaluate_with_gradient(const FitState& state,
                                                        FitState* grad) const {
  const int n = img_.resolution;
  const int joints = target_.count();
  if (static_cast<int>(state.scores.size()) != joints ||
      static_cast<int>(state.offsets.size()) != joints) {
    throw ContractError("fit: state joint count mismatch");
  }
  if (grad) {
    grad->scores.assign(joints, Grid::square(n));
    grad->offsets.assign(joints, Grid::square(n));
  }

  Eval eval;
  Grid grad_h(n, n);
  for (int j = 0; j < joints; ++j) {
    const Grid& scores = state.scores[j];
    const Grid& offsets = state.offsets[j];
    if (!scores.is_square(n) || !offsets.is_square(n)) {
      throw ContractError("fit: state grid resolution mismatch");
    }
    Grid h = softmax(scores);

    // Decode both coordinates from the current representations.
    double u = 0.0;
    double v = 0.0;
    double num = 0.0;
    double den = 0.0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        double hv = h(r, c);
        u += hv * com_.u(r, c);
        v += hv * com_.v(r, c);
        double w = mask_.values(r, c) * hv;
        num += w * (img_.values(r, c) + offsets(r, c));
        den += w;
      }
    }
    if (den <= kDepthDenominatorEpsilon) {
      throw UnsupportedJointError("fit: fitted heatmap lost its on-hand support");
    }
    double d = num / den;
    eval.decoded.joints.push_back(JointUVD{u, v, d});

    const JointUVD& t = target_.joints[j];
    double ru = u - t.u;
    double rv = v - t.v;
    double rd = d - t.d;
    eval.parts.uv += ru * ru + rv * rv;
    eval.parts.d += rd * rd;
    eval.parts.heatmap += grid_sq_diff(h, target_heatmaps_[j].values, "fit");
    eval.parts.depthmap +=
        grid_sq_diff(offsets, target_offset_maps_[j].values, "fit");

    if (!grad) continue;

    std::fill(grad_h.data().begin(), grad_h.data().end(), 0.0);
    Grid& grad_d = grad->offsets[j];
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (uses_coordinate_losses(mode_)) {
          double mv = mask_.values(r, c);
          grad_h(r, c) += 2.0 * ru * com_.u(r, c) + 2.0 * rv * com_.v(r, c) +
                          2.0 * rd * mv *
                              ((img_.values(r, c) + offsets(r, c)) - d) / den;
          grad_d(r, c) += 2.0 * rd * mv * h(r, c) / den;
        }
        if (uses_representation_losses(mode_)) {
          grad_h(r, c) += 2.0 * weights_.lambda_heatmap *
                          (h(r, c) - target_heatmaps_[j].values(r, c));
          grad_d(r, c) += 2.0 * weights_.lambda_depthmap *
                          (offsets(r, c) - target_offset_maps_[j].values(r, c));
        }
      }
    }
    softmax_backward(h, grad_h, &grad->scores[j]);
  }

  StageLossParts optimized = eval.parts;
  if (!uses_coordinate_losses(mode_)) {
    optimized.uv = 0.0;
    optimized.d = 0.0;
  }
  LossWeights effective = weights_;
  if (!uses_representation_losses(mode_)) {
    effective.lambda_heatmap = 0.0;
    effective.lambda_depthmap = 0.0;
  }
  eval.objective = stage_loss(optimized, effective);
  return eval;
}

FitResult fit_representation(const JointSetUVD& target, const DepthFrame& img,
                             const FitConfig& cfg, const LossWeights& weights,
                             const GaussKernel& kernel) {
  cfg.validate();
  FitObjective objective(target, img, cfg.mode, weights, kernel);
  FitState state = objective.initial_state(cfg.seed);
  FitState grad;

  FitResult result;
  result.trace.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);
  double initial = 0.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    FitObjective::Eval eval = objective.evaluate_with_gradient(state, &grad);
    result.trace.push_back(FitTraceRow{it, eval.parts, eval.objective});
    if (it == 0) {
      initial = eval.objective;
    } else if (initial > 0.0 && eval.objective > initial * 1e3) {
      throw DivergenceError("fit: objective exploded past 1000x its initial value");
    }
    for (int j = 0; j < objective.joint_count(); ++j) {
      auto& s = state.scores[j].data();
      auto& o = state.offsets[j].data();
      const auto& gs = grad.scores[j].data();
      const auto& go = grad.offsets[j].data();
      for (std::size_t i = 0; i < s.size(); ++i) s[i] -= cfg.step_size * gs[i];
      for (std::size_t i = 0; i < o.size(); ++i)
        o[i] -= cfg.step_size * FitConfig::kOffsetStepScale * go[i];
    }
  }
  FitObjective::Eval final_eval = objective.evaluate(state);
  result.trace.push_back(
      FitTraceRow{cfg.max_iters, final_eval.parts, final_eval.objective});
  result.heatmaps = objective.heatmaps(state);
  result.offset_maps = objective.offset_maps(state);
  result.decoded = final_eval.decoded;
  return result;
}

}  // namespace sfrd
