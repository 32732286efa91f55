#pragma once

#include <cstdint>
#include <random>

namespace lamarck {

// All randomness flows through mt19937_64 engines seeded from derived
// streams.  Streams are keyed by (master_seed, purpose, generation, index)
// through a splitmix64 mix, so any stream can be re-derived from scratch:
// resume after an interrupt re-creates the exact same engines without
// persisting engine state.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream purposes; values are part of the determinism contract.
enum class StreamPurpose : std::uint64_t {
  init_genotype = 1,   // initial population body generation
  reproduce = 2,       // per-generation variation (serial)
  learning = 3,        // per-individual lifetime learning
};

inline std::uint64_t derive_stream(std::uint64_t master_seed, StreamPurpose purpose,
                                   std::uint64_t generation, std::uint64_t index) {
  std::uint64_t s = splitmix64(master_seed ^ static_cast<std::uint64_t>(purpose));
  s = splitmix64(s + generation);
  s = splitmix64(s + index);
  return s;
}

inline Rng make_rng(std::uint64_t master_seed, StreamPurpose purpose,
                    std::uint64_t generation, std::uint64_t index) {
  return Rng(derive_stream(master_seed, purpose, generation, index));
}

// Monotone counter handing out fresh lineage ids.  One per run; the next
// value is checkpointed so resumed runs continue the same sequence.
class IdSource {
 public:
  explicit IdSource(std::uint64_t next = 0) : next_(next) {}
  std::uint64_t next() { return next_++; }
  std::uint64_t peek() const { return next_; }
 private:
  std::uint64_t next_;
};

}  // namespace lamarck
