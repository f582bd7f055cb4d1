#include "regretlab/rng.hpp"

#include <stdexcept>

namespace regretlab {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53-bit mantissa draw, identical on every platform.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) {
  return a + (b - a) * uniform();
}

int RngStream::uniform_int(int n) {
  if (n < 1) throw std::invalid_argument("uniform_int needs n >= 1");
  return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
}

int RngStream::categorical(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("negative categorical weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("categorical weights sum to 0");
  const double u = uniform() * total;
  double acc = 0.0;
  for (size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace regretlab
