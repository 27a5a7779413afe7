#include "kinscat/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "kinscat/types.hpp"

namespace kinscat {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

int thread_count() { return g_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(n, begin + block);
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ModeField arithmetic lives here to avoid a translation unit of its own.

ModeField& ModeField::operator+=(const ModeField& o) {
  if (o.lattice_ != lattice_) throw std::invalid_argument("ModeField: lattice mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ModeField& ModeField::operator-=(const ModeField& o) {
  if (o.lattice_ != lattice_) throw std::invalid_argument("ModeField: lattice mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ModeField& ModeField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

double ModeField::reality_defect() const {
  double worst = 0.0;
  for (int k = 0; k <= lattice_.kmax; ++k) {
    worst = std::max(worst, std::abs((*this)[-k] - std::conj((*this)[k])));
  }
  return worst;
}

void ModeField::symmetrize() {
  for (int k = 0; k <= lattice_.kmax; ++k) {
    const Complex avg = 0.5 * ((*this)[k] + std::conj((*this)[-k]));
    (*this)[k] = avg;
    (*this)[-k] = std::conj(avg);
  }
}

ModeField operator+(ModeField a, const ModeField& b) { return a += b; }
ModeField operator-(ModeField a, const ModeField& b) { return a -= b; }
ModeField operator*(double s, ModeField a) { return a *= s; }

}  // namespace kinscat
