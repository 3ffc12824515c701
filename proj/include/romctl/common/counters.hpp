#pragma once

#include <atomic>
#include <cstdint>

namespace romctl {

// Simulator call accounting, safe to share across concurrent rollouts.
struct SimCounter {
  std::atomic<std::uint64_t> rollouts{0};
  std::atomic<std::uint64_t> steps{0};

  void add(std::uint64_t rollout_count, std::uint64_t step_count) {
    rollouts.fetch_add(rollout_count, std::memory_order_relaxed);
    steps.fetch_add(step_count, std::memory_order_relaxed);
  }
};

}  // namespace romctl
