#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace ahmass {

/// Pairwise (cascade) summation with a fixed split tree: the result depends only on
/// the input order, never on how the values were produced.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Kahan-Babuska (Neumaier) compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Evaluates fn(i) for i in [0, count) on up to `threads` workers and returns the
/// values in index order. Each slot is written by exactly one worker.
template <class Fn>
std::vector<double> parallel_evaluate(std::size_t count, int threads, Fn&& fn) {
  std::vector<double> out(count);
  const std::size_t workers =
      std::clamp<std::size_t>(threads > 0 ? static_cast<std::size_t>(threads) : 1, 1,
                              std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
    });
  }
  pool.clear();
  return out;
}

/// Vector-valued variant: fn(i, span<double> slot) fills `width` values per index.
template <class Fn>
std::vector<double> parallel_evaluate_rows(std::size_t count, std::size_t width, int threads,
                                           Fn&& fn) {
  std::vector<double> out(count * width);
  const std::size_t workers =
      std::clamp<std::size_t>(threads > 0 ? static_cast<std::size_t>(threads) : 1, 1,
                              std::max<std::size_t>(count, 1));
  auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      fn(i, std::span<double>(out.data() + i * width, width));
  };
  if (workers == 1) {
    run(0, count);
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(run, lo, hi);
  }
  pool.clear();
  return out;
}

/// Column sums of a row-major table, each reduced with the fixed pairwise tree.
inline std::vector<double> column_sums(const std::vector<double>& rows, std::size_t width) {
  const std::size_t count = width ? rows.size() / width : 0;
  std::vector<double> column(count);
  std::vector<double> sums(width);
  for (std::size_t c = 0; c < width; ++c) {
    for (std::size_t i = 0; i < count; ++i) column[i] = rows[i * width + c];
    sums[c] = pairwise_sum(column);
  }
  return sums;
}

}  // namespace ahmass
