#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lite/model_config.hpp"

namespace lite {

struct TokenCoord {
  std::size_t t = 0, h = 0, w = 0;
  bool operator==(const TokenCoord&) const = default;
};

// The (t, h, w) lattice of tubes; token index is t-major, then h, then w.
class TokenGrid {
 public:
  TokenGrid(std::size_t n_t, std::size_t n_h, std::size_t n_w);
  explicit TokenGrid(const ModelConfig& config)
      : TokenGrid(config.grid_t(), config.grid_h(), config.grid_w()) {}

  std::size_t n_t() const { return n_t_; }
  std::size_t n_h() const { return n_h_; }
  std::size_t n_w() const { return n_w_; }
  std::size_t size() const { return n_t_ * n_h_ * n_w_; }
  std::size_t spatial_size() const { return n_h_ * n_w_; }

  std::size_t index(TokenCoord c) const { return (c.t * n_h_ + c.h) * n_w_ + c.w; }
  TokenCoord coord(std::size_t index) const;
  std::size_t spatial_index(std::size_t index) const { return index % spatial_size(); }
  std::size_t temporal_index(std::size_t index) const { return index / spatial_size(); }

 private:
  std::size_t n_t_, n_h_, n_w_;
};

// Strictly increasing retained token indices into [0, N).
class SelectionMask {
 public:
  // Validates sortedness, uniqueness, range and non-emptiness (ContractError otherwise).
  SelectionMask(std::vector<std::size_t> indices, std::size_t num_tokens);
  static SelectionMask all(std::size_t num_tokens);

  std::span<const std::size_t> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  std::size_t num_tokens() const { return num_tokens_; }
  bool contains(std::size_t index) const;

 private:
  std::vector<std::size_t> indices_;
  std::size_t num_tokens_;
};

// Tokens retained for a P-Ratio: ceil(rho * N), clamped to [1, N]. rho must be in (0, 1].
std::size_t tokens_for_ratio(double rho, std::size_t num_tokens);

}  // namespace lite
