#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fpcfg {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Bad command line or config file. Exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed or misaligned input data. Exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Zero-measure sentences and other numerical dead ends. Exit code 4.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double log_add(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  double hi = x > y ? x : y;
  double lo = x > y ? y : x;
  return hi + std::log1p(std::exp(lo - hi));
}

// Sampling goes through mt19937_64 with fixed algorithms instead of the
// std distributions, whose output differs between C++ runtimes. A given
// seed must produce the same grammar on any build.
double uniform01(std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);
double sample_gamma(std::mt19937_64& rng, double shape);
std::vector<double> sample_dirichlet(std::mt19937_64& rng, std::size_t k,
                                     double concentration);

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

// Runs make(b) for blocks b in [0, nblocks) on up to `threads` workers and
// hands the results to consume(b, result) in ascending block order. Any
// reduction done in consume is therefore independent of the worker count.
template <class R, class Make, class Consume>
void ordered_blocks(std::size_t nblocks, int threads, Make make,
                    Consume consume) {
  if (threads <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      R r = make(b);
      consume(b, r);
    }
    return;
  }
  std::deque<std::future<R>> inflight;
  std::size_t next_launch = 0;
  std::size_t next_consume = 0;
  while (next_consume < nblocks) {
    while (next_launch < nblocks &&
           inflight.size() < static_cast<std::size_t>(threads) + 1) {
      inflight.push_back(
          std::async(std::launch::async, make, next_launch));
      ++next_launch;
    }
    R r = inflight.front().get();
    inflight.pop_front();
    consume(next_consume, r);
    ++next_consume;
  }
}

std::string read_file(const std::string& path);

}  // namespace fpcfg
