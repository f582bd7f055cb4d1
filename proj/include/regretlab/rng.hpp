#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace regretlab {

// Deterministic random stream identified by (seed, stream id). Batch drivers
// give run i the stream (master_seed, i) so runs are reproducible in isolation
// and mutually independent in practice.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double uniform();                    // [0, 1)
  double uniform(double a, double b);  // [a, b)
  int uniform_int(int n);              // {0, ..., n-1}
  // Index drawn proportionally to the (nonnegative) weights.
  int categorical(const std::vector<double>& weights);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace regretlab
