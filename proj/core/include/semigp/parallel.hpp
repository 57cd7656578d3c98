#ifndef SEMIGP_PARALLEL_HPP
#define SEMIGP_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace semigp {

// Runs f(i) for i in [0, count) on up to `threads` workers. Items must be
// independent and write only to their own output slots, which keeps results
// identical for any thread count.
template <class F>
void parallel_for(long count, int threads, F&& f) {
  if (count <= 0) return;
  threads = static_cast<int>(std::min<long>(std::max(threads, 1), count));
  if (threads == 1) {
    for (long i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= count) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace semigp

#endif
