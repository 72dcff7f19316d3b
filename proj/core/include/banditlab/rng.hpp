#pragma once

// Deterministic random-number streams for the simulation laboratory.
//
// Everything downstream (histories, CSV goldens, paired-seed sweeps) depends
// on these exact semantics, so they are frozen here:
//
//  * A stream is a splitmix64 generator identified by (base_seed, stream_id).
//  * derive_stream(base_seed, rep) seeds replication `rep` with the splitmix64
//    finalizer applied to base_seed XOR rep * 0x9E3779B97F4A7C15; distinct reps
//    get decorrelated streams and any replication can be regenerated in
//    isolation.
//  * next_unit() maps the top 53 bits to the open interval (0,1) -- never 0 or
//    1 -- so it is safe inside logs and inverse CDFs.
//  * next_normal() consumes exactly one uniform and inverts the normal CDF
//    (PPND16-class rational approximation, |error| ~ 1e-15). One uniform per
//    variate keeps stream consumption countable, which the replay tests rely
//    on.
//
// Within one replication a single stream serves every draw, in a fixed order
// per round: policy decision draws first, then the reward draw.

#include <cstdint>
#include <vector>

namespace banditlab {

// Inverse standard-normal CDF. Defined for p in (0,1); throws
// std::domain_error otherwise.
double normal_quantile(double p);

class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : state_(seed), stream_id_(stream_id) {}

  // splitmix64 step: increment by the golden-ratio constant, then finalize.
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1): (k + 0.5) * 2^-53 for k in [0, 2^53).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via inverse-CDF; exactly one next_unit() per call.
  double next_normal() { return normal_quantile(next_unit()); }

  std::uint64_t state() const { return state_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t stream_id_ = 0;
};

// Stream for one replication. Replications are decorrelated and individually
// reconstructible from (base_seed, rep).
RngStream derive_stream(std::uint64_t base_seed, std::uint64_t rep);

// Frozen categorical draw: cumulative scan of `probs` against one uniform u
// in (0,1); any shortfall from rounding falls to the last index. `probs`
// must be nonnegative and sum to 1 up to rounding.
inline int sample_categorical(const std::vector<double>& probs, double u) {
  double cum = 0.0;
  const int k = static_cast<int>(probs.size());
  for (int i = 0; i < k - 1; ++i) {
    cum += probs[static_cast<std::size_t>(i)];
    if (u < cum) return i;
  }
  return k - 1;
}

}  // namespace banditlab
