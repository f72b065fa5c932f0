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

#include "skillroute/encoder.hpp"

#include <cctype>

#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"

namespace skillroute {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Eigen::VectorXd mean_pool(const Eigen::MatrixXd& tokens, const Eigen::VectorXd& mask) {
  if (tokens.rows() != mask.size()) throw ArgumentError("mask length must equal token count");
  const double total = mask.sum();
  if (total <= 0.0) throw ArgumentError("mean pooling needs at least one unmasked token");
  return (tokens.transpose() * mask) / total;
}

TokenBlock::TokenBlock(std::size_t dim, std::size_t hidden)
    : w1(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(dim))),
      w2(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(hidden))),
      b1(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hidden))),
      b2(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))) {
  zero_grad();
}

void TokenBlock::init(std::uint64_t seed, double scale) {
  Rng rng(seed);
  fill_uniform(w1.data(), static_cast<std::size_t>(w1.size()), scale / std::sqrt(static_cast<double>(w1.cols())), rng);
  fill_uniform(w2.data(), static_cast<std::size_t>(w2.size()), scale / std::sqrt(static_cast<double>(w2.cols())), rng);
  b1.setZero();
  b2.setZero();
}

void TokenBlock::zero_grad() {
  g_w1 = Eigen::MatrixXd::Zero(w1.rows(), w1.cols());
  g_w2 = Eigen::MatrixXd::Zero(w2.rows(), w2.cols());
  g_b1 = Eigen::VectorXd::Zero(b1.size());
  g_b2 = Eigen::VectorXd::Zero(b2.size());
}

Eigen::MatrixXd TokenBlock::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  Eigen::MatrixXd pre = (x * w1.transpose()).rowwise() + b1.transpose();
  Eigen::MatrixXd act = pre.unaryExpr([](double v) { return gelu(v); });
  Eigen::MatrixXd y = x + ((act * w2.transpose()).rowwise() + b2.transpose());
  if (cache) {
    cache->input = x;
    cache->pre = std::move(pre);
  }
  return y;
}

Eigen::MatrixXd TokenBlock::backward(const Cache& cache, const Eigen::MatrixXd& grad_out) {
  const Eigen::MatrixXd act = cache.pre.unaryExpr([](double v) { return gelu(v); });
  g_w2 += grad_out.transpose() * act;
  g_b2 += grad_out.colwise().sum().transpose();
  const Eigen::MatrixXd d_pre =
      (grad_out * w2).cwiseProduct(cache.pre.unaryExpr([](double v) { return gelu_grad(v); }));
  g_w1 += d_pre.transpose() * cache.input;
  g_b1 += d_pre.colwise().sum().transpose();
  return grad_out + d_pre * w1;
}

void TokenBlock::collect(const std::string& prefix, std::vector<TensorRef>& out) {
  out.push_back(tensor_ref(prefix + ".w1", w1, &g_w1));
  out.push_back(tensor_ref(prefix + ".b1", b1, &g_b1));
  out.push_back(tensor_ref(prefix + ".w2", w2, &g_w2));
  out.push_back(tensor_ref(prefix + ".b2", b2, &g_b2));
}

TokenStates EncoderBackend::frozen_states(std::string_view text) const {
  TokenStates s = embed_tokens(text);
  const std::size_t frozen = blocks_.size() - trainable_;
  for (std::size_t i = 0; i < frozen; ++i) s.tokens = blocks_[i].forward(s.tokens, nullptr);
  return s;
}

TokenStates EncoderBackend::encode(std::string_view text) const {
  TokenStates s = embed_tokens(text);
  for (const auto& b : blocks_) s.tokens = b.forward(s.tokens, nullptr);
  return s;
}

std::vector<TensorRef> EncoderBackend::block_tensors() {
  std::vector<TensorRef> out;
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i].collect("encoder.block" + std::to_string(i), out);
  return out;
}

Embedding embed(const EncoderBackend& backend, std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ArgumentError("text must be non-empty");
  }
  auto states = backend.encode(text);
  return Embedding{mean_pool(states.tokens, states.mask), states.truncated};
}

TokenStates HashingBackend::embed_tokens(std::string_view text) const {
  auto tokens = tokenize(text);
  if (tokens.empty()) tokens.emplace_back("<unk>");
  TokenStates s;
  if (tokens.size() > max_tokens()) {
    tokens.resize(max_tokens());
    s.truncated = true;
  }
  const auto t = static_cast<Eigen::Index>(tokens.size());
  s.tokens = Eigen::MatrixXd::Zero(t, static_cast<Eigen::Index>(dim_));
  s.mask = Eigen::VectorXd::Ones(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    const auto& tok = tokens[static_cast<std::size_t>(i)];
    const std::uint64_t h = fnv1a64(tok);
    const auto bucket = static_cast<Eigen::Index>(h % dim_);
    const double sign = (fnv1a64(tok, 0x9e3779b97f4a7c15ULL) & 1u) ? 1.0 : -1.0;
    s.tokens(i, bucket) = sign;
  }
  return s;
}

HashingBlockBackend::HashingBlockBackend(std::size_t dim) : HashingBackend(dim) {
  const std::uint64_t base = fnv1a64(kName);
  for (std::size_t i = 0; i < kBlocks; ++i) {
    blocks_.emplace_back(dim, dim);
    blocks_.back().init(base + i, 0.5);
  }
  trainable_ = 2;
}

std::vector<std::string> registered_backends() { return {HashingBackend::kName, HashingBlockBackend::kName}; }

std::unique_ptr<EncoderBackend> make_backend(const std::string& name) {
  if (name == HashingBackend::kName) return std::make_unique<HashingBackend>();
  if (name == HashingBlockBackend::kName) return std::make_unique<HashingBlockBackend>();
  throw ConfigError("encoder backend '" + name + "' is not registered");
}

}  // namespace skillroute
