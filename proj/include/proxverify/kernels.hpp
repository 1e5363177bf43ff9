#pragma once

// Data-parallel scan kernels. Every kernel has a serial reference and an
// OpenMP version; both return bit-identical results because each index is
// evaluated by the same expression and the reduction order is fixed by index.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace proxverify::kernels {

enum class Execution { serial, parallel };

/// Winning value and its index. `index == npos` when the range was empty.
struct Best {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = npos;
};

namespace detail {

// Lexicographic (value, index) order: smaller value wins, ties go to the smaller index.
// NaN compares as +inf so it never wins over a number.
inline bool min_better(double v, std::size_t i, const Best& b) {
  if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
  if (b.index == Best::npos) return true;
  if (v < b.value) return true;
  return v == b.value && i < b.index;
}

inline void min_merge(Best& into, const Best& other) {
  if (other.index != Best::npos && min_better(other.value, other.index, into)) into = other;
}

}  // namespace detail

template <class Fn>
Best argmin_serial(std::size_t n, Fn&& fn) {
  Best best;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = fn(i);
    if (detail::min_better(v, i, best)) best = {std::isnan(v) ? std::numeric_limits<double>::infinity() : v, i};
  }
  return best;
}

template <class Fn>
Best argmin_parallel(std::size_t n, Fn&& fn) {
  Best best;
#pragma omp parallel
  {
    Best local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(n); ++s) {
      const auto i = static_cast<std::size_t>(s);
      const double v = fn(i);
      if (detail::min_better(v, i, local))
        local = {std::isnan(v) ? std::numeric_limits<double>::infinity() : v, i};
    }
#pragma omp critical(proxverify_argmin)
    detail::min_merge(best, local);
  }
  return best;
}

template <class Fn>
Best argmin(std::size_t n, Fn&& fn, Execution exec) {
  return exec == Execution::parallel ? argmin_parallel(n, fn) : argmin_serial(n, fn);
}

/// argmax with ties to the smallest index; NaN never wins. Returned value is the maximum itself.
template <class Fn>
Best argmax(std::size_t n, Fn&& fn, Execution exec) {
  auto negated = [&fn](std::size_t i) {
    const double v = fn(i);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : -v;
  };
  Best b = argmin(n, negated, exec);
  if (b.index != Best::npos) b.value = -b.value;
  else b.value = -std::numeric_limits<double>::infinity();
  return b;
}

/// out[i] = fn(i).
template <class T, class Fn>
std::vector<T> tabulate(std::size_t n, Fn&& fn, Execution exec) {
  std::vector<T> out(n);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(n); ++s) {
      out[static_cast<std::size_t>(s)] = fn(static_cast<std::size_t>(s));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
  }
  return out;
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace proxverify::kernels
