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

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "skillroute/tensor.hpp"

namespace skillroute {

/// Lower-cased alphanumeric runs; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

struct TokenStates {
  Eigen::MatrixXd tokens;    // T x d, one row per token
  Eigen::VectorXd mask;      // length T, entries 0 or 1
  bool truncated = false;
};

/// sum_i mask_i * token_i / sum_i mask_i. Throws when the mask is all zero.
Eigen::VectorXd mean_pool(const Eigen::MatrixXd& tokens, const Eigen::VectorXd& mask);

/// Residual token-wise feed-forward block: x + W2 gelu(W1 x + b1) + b2.
class TokenBlock {
 public:
  TokenBlock(std::size_t dim, std::size_t hidden);

  struct Cache {
    Eigen::MatrixXd input;
    Eigen::MatrixXd pre;  // W1 x + b1, T x hidden
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache) const;
  /// Accumulates parameter gradients, returns d loss / d input.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& grad_out);

  void init(std::uint64_t seed, double scale);
  void zero_grad();
  void collect(const std::string& prefix, std::vector<TensorRef>& out);

  Eigen::MatrixXd w1, w2;  // hidden x d, d x hidden
  Eigen::VectorXd b1, b2;
  Eigen::MatrixXd g_w1, g_w2;
  Eigen::VectorXd g_b1, g_b2;
};

/// Text -> token states. Token embeddings come from a fixed lookup; an
/// optional stack of token blocks sits on top, and the top
/// `trainable_blocks()` of them can be fine-tuned while the rest stay frozen.
class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::unique_ptr<EncoderBackend> clone() const = 0;

  std::size_t max_tokens() const { return max_tokens_; }
  void set_max_tokens(std::size_t n) { max_tokens_ = n; }

  /// Fixed token-embedding lookup, before any block. Truncates to max_tokens.
  virtual TokenStates embed_tokens(std::string_view text) const = 0;

  std::size_t num_blocks() const { return blocks_.size(); }
  std::size_t trainable_blocks() const { return trainable_; }
  /// Unfreezes the top k blocks (clamped to the block count).
  void set_trainable_blocks(std::size_t k) { trainable_ = std::min(k, blocks_.size()); }

  /// Token states after the frozen blocks only.
  TokenStates frozen_states(std::string_view text) const;
  /// Full forward pass through every block.
  TokenStates encode(std::string_view text) const;

  std::vector<TokenBlock>& blocks() { return blocks_; }
  const std::vector<TokenBlock>& blocks() const { return blocks_; }

  /// Parameters of every block (trainable or not), for persistence.
  std::vector<TensorRef> block_tensors();

 protected:
  std::vector<TokenBlock> blocks_;
  std::size_t trainable_ = 0;
  std::size_t max_tokens_ = 128;
};

/// Masked mean pooling of the full encoder output.
struct Embedding {
  Eigen::VectorXd vector;
  bool truncated = false;
};
Embedding embed(const EncoderBackend& backend, std::string_view text);

/// Signed feature hashing of unigrams into `dim` buckets; no blocks, mask all
/// ones. Deterministic and dependency-free.
class HashingBackend : public EncoderBackend {
 public:
  static constexpr const char* kName = "hashing-bow";
  explicit HashingBackend(std::size_t dim = 256) : dim_(dim) {}

  std::string name() const override { return kName; }
  std::size_t dim() const override { return dim_; }
  std::unique_ptr<EncoderBackend> clone() const override { return std::make_unique<HashingBackend>(*this); }
  TokenStates embed_tokens(std::string_view text) const override;

 protected:
  std::size_t dim_;
};

/// Hashing embeddings followed by four seeded token blocks, the top two
/// trainable by default. Stands in for a pretrained transformer when
/// exercising partial unfreezing offline.
class HashingBlockBackend : public HashingBackend {
 public:
  static constexpr const char* kName = "hashing-blocks";
  static constexpr std::size_t kBlocks = 4;

  explicit HashingBlockBackend(std::size_t dim = 128);

  std::string name() const override { return kName; }
  std::unique_ptr<EncoderBackend> clone() const override { return std::make_unique<HashingBlockBackend>(*this); }
};

std::vector<std::string> registered_backends();
/// Throws ConfigError naming the backend when it is not registered.
std::unique_ptr<EncoderBackend> make_backend(const std::string& name);

}  // namespace skillroute
