#include "lite/token_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lite/errors.hpp"

namespace lite {

TokenGrid::TokenGrid(std::size_t n_t, std::size_t n_h, std::size_t n_w)
    : n_t_(n_t), n_h_(n_h), n_w_(n_w) {
  if (n_t == 0 || n_h == 0 || n_w == 0) throw ShapeError("token grid dimensions must be positive");
}

TokenCoord TokenGrid::coord(std::size_t index) const {
  if (index >= size())
    throw ContractError("token index " + std::to_string(index) + " outside grid of " +
                        std::to_string(size()));
  return {index / spatial_size(), (index / n_w_) % n_h_, index % n_w_};
}

SelectionMask::SelectionMask(std::vector<std::size_t> indices, std::size_t num_tokens)
    : indices_(std::move(indices)), num_tokens_(num_tokens) {
  if (indices_.empty()) throw ContractError("selection mask is empty");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= num_tokens_)
      throw ContractError("mask index " + std::to_string(indices_[i]) + " out of range [0, " +
                          std::to_string(num_tokens_) + ")");
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw ContractError("mask indices must be strictly increasing");
  }
}

SelectionMask SelectionMask::all(std::size_t num_tokens) {
  std::vector<std::size_t> idx(num_tokens);
  for (std::size_t i = 0; i < num_tokens; ++i) idx[i] = i;
  return SelectionMask(std::move(idx), num_tokens);
}

bool SelectionMask::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

std::size_t tokens_for_ratio(double rho, std::size_t num_tokens) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ContractError("P-Ratio must lie in (0, 1], got " + std::to_string(rho));
  // Guard against representation error pushing e.g. 0.3*10 to 3.0000000000000004.
  const double exact = rho * static_cast<double>(num_tokens);
  const double nearest = std::round(exact);
  const double k = std::abs(exact - nearest) < 1e-9 ? nearest : std::ceil(exact);
  return std::clamp<std::size_t>(static_cast<std::size_t>(k), 1, num_tokens);
}

}  // namespace lite
