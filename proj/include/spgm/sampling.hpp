#pragma once

// Single-item weighted reservoir: after observing (x_1, h_1), ..., (x_k, h_k)
// the held item equals x_i with probability h_i / H_k, H_k = sum of h_i.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>

#include "spgm/error.hpp"
#include "spgm/random.hpp"

namespace spgm {

template <class T>
class WeightedReservoir {
 public:
  void observe(T item, double h, RandomStream& rng) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw InvalidInput("reservoir weight must be finite and > 0");
    }
    add_weight(h);
    ++count_;
    // The first item is always kept; u < 1 = h / H.
    if (!current_ || rng.uniform() < h / weight_sum()) {
      current_ = std::move(item);
    }
  }

  const T& current() const {
    if (!current_) throw std::logic_error("reservoir is empty");
    return *current_;
  }

  bool empty() const { return !current_.has_value(); }
  std::size_t count() const { return count_; }
  double weight_sum() const { return sum_ + compensation_; }

 private:
  // Neumaier summation.
  void add_weight(double h) {
    const double t = sum_ + h;
    if (std::abs(sum_) >= std::abs(h)) {
      compensation_ += (sum_ - t) + h;
    } else {
      compensation_ += (h - t) + sum_;
    }
    sum_ = t;
  }

  std::optional<T> current_;
  double sum_ = 0.0;
  double compensation_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace spgm
