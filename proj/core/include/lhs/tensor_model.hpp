#pragma once

// Rank-m Lohe tensor model, evaluated component by component:
//
//   d[T_j]_{a0}/dt = [A_j]_{a0 a1} [T_j]_{a1}
//     + sum_{i in {0,1}^m} k_i ( [T_c]_{a_i} conj([T_j]_{a1}) [T_j]_{a_(1-i)}
//                              - [T_j]_{a_i} conj([T_c]_{a1}) [T_j]_{a_(1-i)} ),
//
// where a0 is the free (output) multi-index, a1 is summed, and a_i takes slot k
// from a1 when i_k = 1 and from a0 otherwise. Tensors are stored flattened in
// row-major order; the rank-2m frequency tensor is stored as a (size x size) matrix
// with the first m indices as the row.
//
// Coupling patterns are addressed by bitmask: bit k of the mask is i_{k+1}.
// For m = 1, mask 0 is the Lohe sphere term (k0) and mask 1 the rotational term (k1).

#include <vector>

#include "lhs/geometry.hpp"

namespace lhs {

inline constexpr int kMaxTensorRank = 3;
inline constexpr Index kMaxTensorEntries = 10000;

class TensorEnsemble {
 public:
  // couplings.size() must be 2^m. Negative couplings are accepted here and
  // reported by has_negative_coupling().
  TensorEnsemble(std::vector<Index> shape, std::vector<CVector> tensors,
                 std::vector<SkewHermitian> frequencies, std::vector<double> couplings);

  int rank() const noexcept { return static_cast<int>(shape_.size()); }
  const std::vector<Index>& shape() const noexcept { return shape_; }
  Index entries() const noexcept { return entries_; }
  Index size() const noexcept { return static_cast<Index>(tensors_.size()); }

  const std::vector<CVector>& tensors() const noexcept { return tensors_; }
  const std::vector<SkewHermitian>& frequencies() const noexcept { return frequencies_; }
  const std::vector<double>& couplings() const noexcept { return couplings_; }

  bool has_negative_coupling() const;

 private:
  std::vector<Index> shape_;
  Index entries_ = 0;
  std::vector<CVector> tensors_;
  std::vector<SkewHermitian> frequencies_;
  std::vector<double> couplings_;
};

// Bitmask for an index pattern (i_1, ..., i_m), each entry 0 or 1.
unsigned coupling_mask(const std::vector<int>& pattern);

struct LtOptions {
  // The tensor model is stated for nonnegative couplings; negative values are
  // rejected unless this is set.
  bool allow_negative_couplings = false;
};

// Component-wise right-hand side, one tensor per particle. Cost O(N 2^m size^2).
std::vector<CVector> lt_rhs(const TensorEnsemble& tens, const LtOptions& options = {});

}  // namespace lhs
