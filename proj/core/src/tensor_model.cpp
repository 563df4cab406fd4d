#include "lhs/tensor_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lhs {

TensorEnsemble::TensorEnsemble(std::vector<Index> shape, std::vector<CVector> tensors,
                               std::vector<SkewHermitian> frequencies, std::vector<double> couplings)
    : shape_(std::move(shape)),
      tensors_(std::move(tensors)),
      frequencies_(std::move(frequencies)),
      couplings_(std::move(couplings)) {
  if (shape_.empty() || static_cast<int>(shape_.size()) > kMaxTensorRank) {
    throw std::invalid_argument("TensorEnsemble: rank must be in [1, " +
                                std::to_string(kMaxTensorRank) + "]");
  }
  entries_ = 1;
  for (Index e : shape_) {
    if (e < 1) throw std::invalid_argument("TensorEnsemble: extents must be positive");
    entries_ *= e;
  }
  if (entries_ > kMaxTensorEntries) {
    throw std::invalid_argument("TensorEnsemble: more than " + std::to_string(kMaxTensorEntries) +
                                " entries per tensor");
  }
  if (tensors_.empty()) throw std::invalid_argument("TensorEnsemble: no particles");
  if (frequencies_.size() != tensors_.size()) {
    throw std::invalid_argument("TensorEnsemble: one frequency tensor per particle required");
  }
  if (couplings_.size() != (std::size_t{1} << shape_.size())) {
    throw std::invalid_argument("TensorEnsemble: expected " +
                                std::to_string(std::size_t{1} << shape_.size()) +
                                " coupling strengths for rank " + std::to_string(shape_.size()) +
                                ", got " + std::to_string(couplings_.size()));
  }
  for (double k : couplings_) {
    if (!std::isfinite(k)) throw std::invalid_argument("TensorEnsemble: non-finite coupling");
  }
  for (std::size_t j = 0; j < tensors_.size(); ++j) {
    if (tensors_[j].size() != entries_) {
      throw std::invalid_argument("TensorEnsemble: tensor " + std::to_string(j) + " has " +
                                  std::to_string(tensors_[j].size()) + " entries, expected " +
                                  std::to_string(entries_));
    }
    if (std::abs(tensors_[j].norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("TensorEnsemble: tensor " + std::to_string(j) +
                                  " is not of unit Frobenius norm");
    }
    if (frequencies_[j].dim() != entries_) {
      throw std::invalid_argument("TensorEnsemble: frequency tensor shape mismatch");
    }
  }
}

bool TensorEnsemble::has_negative_coupling() const {
  for (double k : couplings_) {
    if (k < 0.0) return true;
  }
  return false;
}

unsigned coupling_mask(const std::vector<int>& pattern) {
  if (pattern.empty() || static_cast<int>(pattern.size()) > kMaxTensorRank) {
    throw std::invalid_argument("coupling_mask: pattern length out of range");
  }
  unsigned mask = 0;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    if (pattern[k] != 0 && pattern[k] != 1) {
      throw std::invalid_argument("coupling_mask: pattern entries must be 0 or 1");
    }
    if (pattern[k] == 1) mask |= 1u << k;
  }
  return mask;
}

std::vector<CVector> lt_rhs(const TensorEnsemble& tens, const LtOptions& options) {
  if (tens.has_negative_coupling() && !options.allow_negative_couplings) {
    throw std::invalid_argument(
        "lt_rhs: negative coupling strength (the tensor model requires nonnegative couplings; "
        "use the LHS path for negative rotational gain)");
  }
  const int m = tens.rank();
  const Index size = tens.entries();
  const auto& shape = tens.shape();

  // Row-major strides and per-slot digits of every flat index.
  std::vector<Index> stride(static_cast<std::size_t>(m));
  {
    Index s = 1;
    for (int k = m - 1; k >= 0; --k) {
      stride[static_cast<std::size_t>(k)] = s;
      s *= shape[static_cast<std::size_t>(k)];
    }
  }
  std::vector<std::vector<Index>> digit(static_cast<std::size_t>(m), std::vector<Index>(size));
  for (Index flat = 0; flat < size; ++flat) {
    for (int k = 0; k < m; ++k) {
      digit[k][flat] = (flat / stride[k]) % shape[k];
    }
  }

  CVector centroid = CVector::Zero(size);
  for (const auto& t : tens.tensors()) centroid += t;
  centroid /= static_cast<double>(tens.size());

  const std::size_t patterns = std::size_t{1} << m;
  // part[mask][flat] = sum over slots k with bit k of mask clear of digit_k * stride_k, so
  //   flat(a_i)     = part[mask][a0] + part[all ^ mask][a1]
  //   flat(a_(1-i)) = part[all ^ mask][a0] + part[mask][a1].
  std::vector<std::vector<Index>> part(patterns, std::vector<Index>(size, 0));
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    for (Index flat = 0; flat < size; ++flat) {
      Index acc = 0;
      for (int k = 0; k < m; ++k) {
        if (((mask >> k) & 1u) == 0u) acc += digit[k][flat] * stride[k];
      }
      part[mask][flat] = acc;
    }
  }
  const std::size_t all = patterns - 1;

  std::vector<CVector> out;
  out.reserve(tens.tensors().size());
  for (std::size_t j = 0; j < tens.tensors().size(); ++j) {
    const CVector& t = tens.tensors()[j];
    CVector dt = tens.frequencies()[j].mat() * t;
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      const double kappa = tens.couplings()[mask];
      if (kappa == 0.0) continue;
      const auto& i_from_out = part[mask];
      const auto& i_from_sum = part[all ^ mask];
      for (Index a0 = 0; a0 < size; ++a0) {
        Complex acc{0.0, 0.0};
        for (Index a1 = 0; a1 < size; ++a1) {
          const Index ai = i_from_out[a0] + i_from_sum[a1];
          const Index anti = i_from_sum[a0] + i_from_out[a1];
          acc += (centroid[ai] * std::conj(t[a1]) - t[ai] * std::conj(centroid[a1])) * t[anti];
        }
        dt[a0] += kappa * acc;
      }
    }
    out.push_back(std::move(dt));
  }
  return out;
}

}  // namespace lhs
