#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace relmerge {

// Applies `fn` to every element on up to `threads` workers and returns the
// results in input order. If any call throws, the exception of the lowest
// failing index is rethrown after all workers finish.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, unsigned threads, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
  using R = std::invoke_result_t<Fn&, const T&>;
  const std::size_t n = items.size();
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), n));
  std::vector<R> out;
  out.reserve(n);
  if (workers <= 1) {
    for (const auto& item : items) out.push_back(fn(item));
    return out;
  }

  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(items[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace relmerge
