#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace csflow {

/// Number of workers to use when the caller asks for `requested` (0 = all).
inline unsigned resolve_jobs(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, count) on up to `jobs` threads. Each worker
/// owns one accumulator created by make_acc(); the accumulators are
/// returned for the caller to reduce. The first exception is rethrown.
template <class Acc, class MakeAcc, class Body>
std::vector<Acc> parallel_accumulate(std::size_t count, unsigned jobs, MakeAcc make_acc,
                                     Body body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), std::max<std::size_t>(count, 1)));
  std::vector<Acc> accs;
  accs.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) accs.push_back(make_acc());

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](unsigned w) {
    try {
      for (std::size_t i = next++; i < count; i = next++) body(i, accs[w]);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = count;
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  if (error) std::rethrow_exception(error);
  return accs;
}

}  // namespace csflow
