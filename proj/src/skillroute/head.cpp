// Copyright 2026 The SkillRoute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "skillroute/head.hpp"

#include <algorithm>

#include "skillroute/error.hpp"

namespace skillroute {

HeadConfig HeadConfig::for_input(std::size_t input_dim, double dropout) {
  HeadConfig c;
  c.hidden1 = std::min<std::size_t>(512, 2 * input_dim);
  c.hidden2 = std::min<std::size_t>(256, c.hidden1);
  c.hidden3 = std::min<std::size_t>(128, c.hidden2);
  c.dropout = dropout;
  return c;
}

nlohmann::json to_json(const HeadConfig& c) {
  return {{"hidden", {c.hidden1, c.hidden2, c.hidden3}}, {"dropout", c.dropout}};
}

HeadConfig head_config_from_json(const nlohmann::json& j) {
  HeadConfig c;
  const auto h = j.at("hidden").get<std::vector<std::size_t>>();
  if (h.size() != 3) throw IntegrityError("head config needs three hidden widths");
  c.hidden1 = h[0];
  c.hidden2 = h[1];
  c.hidden3 = h[2];
  c.dropout = j.at("dropout").get<double>();
  return c;
}

ClassifierHead::ClassifierHead(std::size_t input_dim, HeadConfig config, std::uint64_t seed)
    : input_dim_(input_dim), config_(config) {
  if (input_dim == 0) throw ArgumentError("head input dimension must be positive");
  if (config.dropout < 0.0 || config.dropout >= 1.0) throw ArgumentError("dropout must be in [0, 1)");
  const std::array<std::size_t, kHidden + 2> dims = {input_dim, config.hidden1, config.hidden2, config.hidden3,
                                                     kNumSkills};
  Rng rng(seed);
  for (std::size_t l = 0; l <= kHidden; ++l) {
    const auto in = static_cast<Eigen::Index>(dims[l]);
    const auto out = static_cast<Eigen::Index>(dims[l + 1]);
    auto& lin = linear_[l];
    lin.w.resize(out, in);
    lin.b.resize(out);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    fill_uniform(lin.w.data(), static_cast<std::size_t>(lin.w.size()), bound, rng);
    fill_uniform(lin.b.data(), static_cast<std::size_t>(lin.b.size()), bound, rng);
    if (l < kHidden) {
      auto& bn = norm_[l];
      bn.gamma = Eigen::VectorXd::Ones(out);
      bn.beta = Eigen::VectorXd::Zero(out);
      bn.running_mean = Eigen::VectorXd::Zero(out);
      bn.running_var = Eigen::VectorXd::Ones(out);
    }
  }
  zero_grad();
}

Eigen::MatrixXd ClassifierHead::forward_eval(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim_) {
    throw ArgumentError("embedding dimension " + std::to_string(x.cols()) + " does not match head input " +
                        std::to_string(input_dim_));
  }
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < kHidden; ++l) {
    const auto& lin = linear_[l];
    const auto& bn = norm_[l];
    Eigen::MatrixXd z = (h * lin.w.transpose()).rowwise() + lin.b.transpose();
    const Eigen::ArrayXd inv_std = (bn.running_var.array() + kEps).rsqrt();
    z = ((z.rowwise() - bn.running_mean.transpose()).array().rowwise() * (inv_std * bn.gamma.array()).transpose())
            .matrix()
            .rowwise() +
        bn.beta.transpose();
    h = z.unaryExpr([](double v) { return gelu(v); });
  }
  const auto& out = linear_[kHidden];
  return (h * out.w.transpose()).rowwise() + out.b.transpose();
}

Eigen::MatrixXd ClassifierHead::forward_train(const Eigen::MatrixXd& x, Rng& rng, Cache& cache) {
  if (static_cast<std::size_t>(x.cols()) != input_dim_) {
    throw ArgumentError("embedding dimension " + std::to_string(x.cols()) + " does not match head input " +
                        std::to_string(input_dim_));
  }
  const auto batch = x.rows();
  if (batch < 2) throw ArgumentError("train-mode batch normalization needs at least two samples");
  const double keep = 1.0 - config_.dropout;

  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < kHidden; ++l) {
    auto& lc = cache.layers[l];
    auto& lin = linear_[l];
    auto& bn = norm_[l];
    lc.input = h;
    Eigen::MatrixXd z = (h * lin.w.transpose()).rowwise() + lin.b.transpose();
    const Eigen::VectorXd mean = z.colwise().mean().transpose();
    const Eigen::MatrixXd centered = z.rowwise() - mean.transpose();
    const Eigen::VectorXd var = centered.array().square().colwise().mean().transpose();
    lc.inv_std = (var.array() + kEps).rsqrt().matrix();
    lc.xhat = (centered.array().rowwise() * lc.inv_std.array().transpose()).matrix();
    lc.bn_out = (lc.xhat.array().rowwise() * bn.gamma.array().transpose()).matrix().rowwise() + bn.beta.transpose();

    const double unbias = static_cast<double>(batch) / static_cast<double>(batch - 1);
    bn.running_mean = (1.0 - kMomentum) * bn.running_mean + kMomentum * mean;
    bn.running_var = (1.0 - kMomentum) * bn.running_var + kMomentum * unbias * var;

    Eigen::MatrixXd act = lc.bn_out.unaryExpr([](double v) { return gelu(v); });
    lc.drop.resize(act.rows(), act.cols());
    // Row-major draw order so the stream does not depend on storage order.
    for (Eigen::Index r = 0; r < act.rows(); ++r) {
      for (Eigen::Index c = 0; c < act.cols(); ++c) {
        lc.drop(r, c) = config_.dropout > 0.0 ? (rng.uniform01() < keep ? 1.0 / keep : 0.0) : 1.0;
      }
    }
    h = act.cwiseProduct(lc.drop);
  }
  cache.final_input = h;
  const auto& out = linear_[kHidden];
  return (h * out.w.transpose()).rowwise() + out.b.transpose();
}

Eigen::MatrixXd ClassifierHead::backward(const Cache& cache, const Eigen::MatrixXd& grad_logits) {
  auto& out = linear_[kHidden];
  out.gw += grad_logits.transpose() * cache.final_input;
  out.gb += grad_logits.colwise().sum().transpose();
  Eigen::MatrixXd grad = grad_logits * out.w;

  for (std::size_t li = kHidden; li-- > 0;) {
    const auto& lc = cache.layers[li];
    auto& lin = linear_[li];
    auto& bn = norm_[li];
    const double batch = static_cast<double>(lc.input.rows());

    grad = grad.cwiseProduct(lc.drop);
    grad = grad.cwiseProduct(lc.bn_out.unaryExpr([](double v) { return gelu_grad(v); }));

    bn.g_gamma += grad.cwiseProduct(lc.xhat).colwise().sum().transpose();
    bn.g_beta += grad.colwise().sum().transpose();
    const Eigen::MatrixXd dxhat = (grad.array().rowwise() * bn.gamma.array().transpose()).matrix();
    const Eigen::RowVectorXd sum_dxhat = dxhat.colwise().sum();
    const Eigen::RowVectorXd sum_dxhat_xhat = dxhat.cwiseProduct(lc.xhat).colwise().sum();
    Eigen::MatrixXd dz = (batch * dxhat).rowwise() - sum_dxhat;
    dz -= (lc.xhat.array().rowwise() * sum_dxhat_xhat.array()).matrix();
    dz = (dz.array().rowwise() * (lc.inv_std.array() / batch).transpose()).matrix();

    lin.gw += dz.transpose() * lc.input;
    lin.gb += dz.colwise().sum().transpose();
    grad = dz * lin.w;
  }
  return grad;
}

void ClassifierHead::zero_grad() {
  for (auto& lin : linear_) {
    lin.gw = Eigen::MatrixXd::Zero(lin.w.rows(), lin.w.cols());
    lin.gb = Eigen::VectorXd::Zero(lin.b.size());
  }
  for (auto& bn : norm_) {
    bn.g_gamma = Eigen::VectorXd::Zero(bn.gamma.size());
    bn.g_beta = Eigen::VectorXd::Zero(bn.beta.size());
  }
}

std::vector<TensorRef> ClassifierHead::parameters() {
  std::vector<TensorRef> out;
  for (std::size_t l = 0; l <= kHidden; ++l) {
    const auto p = "head.linear" + std::to_string(l);
    out.push_back(tensor_ref(p + ".weight", linear_[l].w, &linear_[l].gw));
    out.push_back(tensor_ref(p + ".bias", linear_[l].b, &linear_[l].gb));
    if (l < kHidden) {
      const auto n = "head.norm" + std::to_string(l);
      out.push_back(tensor_ref(n + ".gamma", norm_[l].gamma, &norm_[l].g_gamma));
      out.push_back(tensor_ref(n + ".beta", norm_[l].beta, &norm_[l].g_beta));
    }
  }
  return out;
}

std::vector<TensorRef> ClassifierHead::state() {
  auto out = parameters();
  for (std::size_t l = 0; l < kHidden; ++l) {
    const auto n = "head.norm" + std::to_string(l);
    out.push_back(tensor_ref(n + ".running_mean", norm_[l].running_mean, nullptr));
    out.push_back(tensor_ref(n + ".running_var", norm_[l].running_var, nullptr));
  }
  return out;
}

void ClassifierHead::zero_output_layer() {
  linear_[kHidden].w.setZero();
  linear_[kHidden].b.setZero();
}

Eigen::MatrixXd head_forward(ClassifierHead& head, const Eigen::MatrixXd& embeddings, Mode mode, Rng* rng) {
  if (mode == Mode::kEval) return head.forward_eval(embeddings);
  if (!rng) throw ArgumentError("train-mode forward needs a dropout rng");
  ClassifierHead::Cache cache;
  return head.forward_train(embeddings, *rng, cache);
}

std::array<double, kNumSkills> head_forward(const ClassifierHead& head, const Eigen::VectorXd& embedding) {
  const Eigen::MatrixXd logits = head.forward_eval(embedding.transpose());
  std::array<double, kNumSkills> out{};
  for (std::size_t i = 0; i < kNumSkills; ++i) out[i] = logits(0, static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace skillroute
