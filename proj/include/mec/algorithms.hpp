#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "mec/barrier.hpp"
#include "mec/model.hpp"

namespace mec {

// Thrown by exhaustive() when (K+1)^L exceeds the enumeration limit.
class EnumerationLimit : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kDefaultExhaustiveLimit = 100000;
inline constexpr int kDefaultRandomDraws = 1000;
inline constexpr int kRandomSelectionAttempts = 100;

// Per-row argmax; ties go to the lowest helper index, the local column last.
Assignment round_assignment(const Assignment& fractional);

// Solves the allocation for a fixed binary assignment, tightens the download
// chain and audits energy. Infeasible or unconverged solves come back with
// feasible = false and an infinite objective.
Solution evaluate_assignment(const Instance& instance, const Assignment& assignment,
                             SchemeLabel scheme, const convex::BarrierOptions& options = {});

// Relax, round, re-solve; repairs the rounded assignment when it breaks a
// budget.
Solution algorithm1(const Instance& instance, const convex::BarrierOptions& options = {});

// Continuous relaxation as a solution record (fractional assignment).
Solution relaxed_bound(const Instance& instance, const convex::BarrierOptions& options = {});

// Everything on the helper with the best worse-direction channel.
Solution heuristic_channel(const Instance& instance, const convex::BarrierOptions& options = {});

// Each task on the helper that computes it fastest.
Solution heuristic_compute(const Instance& instance, const convex::BarrierOptions& options = {});

// Uniform node per task, redrawn up to kRandomSelectionAttempts times until
// the allocation problem is feasible.
Solution random_selection(const Instance& instance, std::uint64_t seed,
                          const convex::BarrierOptions& options = {});

// Best of random_selection(seed), random_selection(seed + 1), ...
Solution random_search(const Instance& instance, std::uint64_t seed,
                       int draws = kDefaultRandomDraws, const convex::BarrierOptions& options = {});

Solution local_execution(const Instance& instance);

// Throws EnumerationLimit when (K+1)^L > limit.
Solution exhaustive(const Instance& instance, std::size_t limit = kDefaultExhaustiveLimit,
                    const convex::BarrierOptions& options = {});

struct SchemeOptions {
  std::uint64_t seed = 0;
  int draws = kDefaultRandomDraws;
  std::size_t exhaustive_limit = kDefaultExhaustiveLimit;
  convex::BarrierOptions barrier;
};

Solution run_scheme(const Instance& instance, SchemeLabel scheme,
                    const SchemeOptions& options = {});

}  // namespace mec
