#pragma once

// Deterministic lane-sharded work splitting.  Series are partitioned into a
// fixed number of lanes by term index, each lane accumulates sequentially,
// and lane results merge in lane order.  The partition never depends on the
// worker count, so any number of threads produces bit-identical sums.

#include <atomic>
#include <thread>
#include <vector>

namespace petersson {

inline constexpr int reduction_lanes = 16;

// Invokes lane_fn(lane) for lane = 0..reduction_lanes-1 on up to `workers`
// threads.  lane_fn must only write lane-local state.
template <class Fn>
void run_lanes(int workers, Fn&& lane_fn) {
    if (workers <= 1) {
        for (int lane = 0; lane < reduction_lanes; ++lane) lane_fn(lane);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int lane = next.fetch_add(1);
            if (lane >= reduction_lanes) return;
            lane_fn(lane);
        }
    };
    const int count = std::min(workers, reduction_lanes);
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(count - 1));
    for (int i = 1; i < count; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
}

}  // namespace petersson
