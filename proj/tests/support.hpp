#pragma once

#include <memory>
#include <string>
#include <vector>

#include "vforge/chart.hpp"
#include "vforge/poly.hpp"
#include "vforge/value_group.hpp"

namespace testing_support {

inline vforge::FramePtr frame_of(std::vector<int> sizes) {
  return std::make_shared<const vforge::ValuationFrame>(vforge::ValuationFrame::with_default_weights(std::move(sizes)));
}

inline vforge::FramePtr frame_with_primes(std::vector<int> sizes, const std::vector<std::uint32_t>& primes) {
  std::vector<std::vector<vforge::Weight>> weights;
  std::size_t next = 0;
  for (int s : sizes) {
    std::vector<vforge::Weight> block;
    for (int k = 0; k < s; ++k) block.push_back({vforge::SqrtTerm{1, primes.at(next++)}});
    weights.push_back(std::move(block));
  }
  return std::make_shared<const vforge::ValuationFrame>(std::move(sizes), std::move(weights));
}

/// x1, x2, ... in block 1, x21, x22, ... in block 2 and so on, plus free names.
inline vforge::Chart chart_of(const vforge::FramePtr& frame, const std::vector<std::string>& free = {}) {
  std::vector<std::vector<std::string>> names;
  for (int b = 1; b <= frame->num_blocks(); ++b) {
    std::vector<std::string> block;
    for (int k = 1; k <= frame->block_size(b); ++k) {
      block.push_back(b == 1 ? "x" + std::to_string(k) : "x" + std::to_string(b) + std::to_string(k));
    }
    names.push_back(std::move(block));
  }
  return vforge::Chart::standard(frame, names, free);
}

inline vforge::Poly poly(const std::string& text, const vforge::Chart& chart,
                         vforge::CoefficientField field = vforge::CoefficientField::rationals()) {
  return vforge::parse_poly(text, chart.names(), field);
}

}  // namespace testing_support
