#include "fpcfg/util.hpp"

#include <fstream>
#include <sstream>

namespace fpcfg {

double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa, value in [0, 1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller, cosine branch only so one draw consumes two words.
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  while (u1 == 0.0) u1 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

double sample_gamma(std::mt19937_64& rng, double shape) {
  if (!(shape > 0.0)) throw UsageError("gamma shape must be positive");
  if (shape < 1.0) {
    // Boost via Gamma(shape + 1) * U^(1/shape).
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = standard_normal(rng);
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return d * v;
    }
  }
}

std::vector<double> sample_dirichlet(std::mt19937_64& rng, std::size_t k,
                                     double concentration) {
  std::vector<double> out(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = sample_gamma(rng, concentration);
    total += out[i];
  }
  if (total <= 0.0) {
    // Extremely small concentrations can underflow every draw.
    for (auto& v : out) v = 1.0 / static_cast<double>(k);
    return out;
  }
  for (auto& v : out) v /= total;
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fpcfg
