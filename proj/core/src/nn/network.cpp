/*
 Copyright 2026 The fog-skills Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "fog/nn/network.hpp"

#include <cmath>

#include "fog/core/errors.hpp"

namespace fog::nn {

namespace {

std::vector<ConvSpec> default_conv_stack() {
  return {{16, 3, 2, 1}, {32, 3, 2, 1}, {32, 3, 2, 1}};  // 64 -> 32 -> 16 -> 8
}

}  // namespace

Network::Network(NetworkSpec spec, core::Rng& rng) : spec_(std::move(spec)) {
  int feature_dim = 0;
  std::size_t conv_params = 0;
  if (spec_.encoder == EncoderKind::kConv) {
    conv_ = ConvLayout(core::Image::kHeight, core::Image::kWidth, core::Image::kChannels, default_conv_stack());
    feature_dim = conv_.output_dim();
    conv_params = conv_.num_params();
  } else {
    if (spec_.obs_dim <= 0) throw InvalidArgument("vector network needs obs_dim > 0");
    if (spec_.obs_scale.size() == 0) spec_.obs_scale = Vector::Ones(spec_.obs_dim);
    if (spec_.obs_scale.size() != spec_.obs_dim) throw InvalidArgument("obs_scale length != obs_dim");
    feature_dim = spec_.obs_dim;
  }
  std::vector<int> sizes{feature_dim + spec_.extra_dim};
  sizes.insert(sizes.end(), spec_.hidden.begin(), spec_.hidden.end());
  sizes.push_back(spec_.out_dim);
  head_ = MlpLayout(sizes, spec_.activation);
  head_offset_ = conv_params;
  params_ = Vector::Zero(static_cast<Eigen::Index>(conv_params + head_.num_params()));
  if (conv_params > 0) conv_.init(params_.data(), rng);
  head_.init(params_.data() + head_offset_, rng, spec_.last_layer_scale);
}

Matrix Network::forward(const Matrix& obs, const Matrix& extra, NetworkTape* tape) const {
  const Eigen::Index batch = obs.cols();
  Matrix features;
  if (spec_.encoder == EncoderKind::kConv) {
    features = conv_.forward(params_.data(), obs, tape ? &tape->conv : nullptr);
  } else {
    if (obs.rows() != spec_.obs_dim) throw InvalidArgument("network observation has wrong dimension");
    features = spec_.obs_scale.asDiagonal() * obs;
  }
  Matrix input;
  if (spec_.extra_dim > 0) {
    if (extra.rows() != spec_.extra_dim || extra.cols() != batch) {
      throw InvalidArgument("network extra input has wrong shape");
    }
    input.resize(features.rows() + extra.rows(), batch);
    input.topRows(features.rows()) = features;
    input.bottomRows(extra.rows()) = extra;
  } else {
    input = std::move(features);
  }
  if (tape) tape->feature_dim = static_cast<int>(input.rows()) - spec_.extra_dim;
  return head_.forward(params_.data() + head_offset_, input, tape ? &tape->head : nullptr);
}

Matrix Network::backward(const NetworkTape& tape, const Matrix& dy, Vector* grad) const {
  if (grad && grad->size() != params_.size()) throw InvalidArgument("gradient buffer has wrong size");
  double* g = grad ? grad->data() : nullptr;
  Matrix dinput = head_.backward(params_.data() + head_offset_, tape.head, dy, g ? g + head_offset_ : nullptr);
  if (spec_.encoder == EncoderKind::kConv && g) {
    Matrix dfeat = dinput.topRows(tape.feature_dim);
    conv_.backward(params_.data(), tape.conv, dfeat, g);
  }
  return dinput.bottomRows(spec_.extra_dim);
}

Matrix Network::frames_to_matrix(const std::vector<const core::Image*>& frames) {
  Matrix m(static_cast<Eigen::Index>(core::Image::kBytes), static_cast<Eigen::Index>(frames.size()));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& px = frames[i]->bytes();
    for (std::size_t j = 0; j < px.size(); ++j) {
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = px[j] / 255.0;
    }
  }
  return m;
}

Matrix Network::states_to_matrix(const std::vector<const core::State*>& states) {
  if (states.empty()) return Matrix();
  if (states.front()->is_image()) {
    std::vector<const core::Image*> frames;
    frames.reserve(states.size());
    for (const auto* s : states) frames.push_back(&s->img());
    return frames_to_matrix(frames);
  }
  const Eigen::Index dim = states.front()->vec().size();
  Matrix m(dim, static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& v = states[i]->vec();
    if (v.size() != dim) throw InvalidArgument("states in one batch differ in length");
    m.col(static_cast<Eigen::Index>(i)) = v;
  }
  return m;
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(Vector::Zero(static_cast<Eigen::Index>(n))), v_(Vector::Zero(static_cast<Eigen::Index>(n))) {}

void Adam::step(Vector& params, const Vector& grad) {
  if (grad.size() != params.size() || m_.size() != params.size()) {
    throw InvalidArgument("Adam: parameter/gradient size mismatch");
  }
  if (!grad.allFinite()) throw TrainingDivergenceError("non-finite gradient");
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ * std::sqrt(c2) / c1;
  params.array() -= step * m_.array() / (v_.array().sqrt() + eps_ * std::sqrt(c2));
}

void Adam::save(core::ByteWriter& out) const {
  out.put<double>(lr_);
  out.put<std::int64_t>(t_);
  out.put_vector(m_);
  out.put_vector(v_);
}

void Adam::load(core::ByteReader& in) {
  lr_ = in.get<double>();
  t_ = in.get<std::int64_t>();
  m_ = in.get_vector();
  v_ = in.get_vector();
}

void soft_update(Vector& target, const Vector& source, double tau) {
  target = tau * target + (1.0 - tau) * source;
}

}  // namespace fog::nn
