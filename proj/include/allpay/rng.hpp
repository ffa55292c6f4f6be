#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace allpay {

// SplitMix64 step; used for seed expansion and worker substream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic, platform-independent uniform stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        gen_.seed(splitmix64(s));
    }

    /// Uniform variate in [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

/// Seed of worker substream `stream` derived from a run seed. Streams for
/// distinct indices are independent for practical purposes, and the mapping
/// is fixed so results are reproducible for a given (seed, worker count).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 2));
    return splitmix64(s);
}

struct McAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    long count = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++count;
    }
    void merge(const McAccumulator& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        count += o.count;
    }
    double mean() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }
    double std_error() const {
        if (count < 2) return 0.0;
        const double n = static_cast<double>(count);
        double var = (sum_sq - sum * sum / n) / (n - 1.0);
        if (var < 0.0) var = 0.0;  // cancellation on degenerate data
        return std::sqrt(var / n);
    }
};

/// Runs `fn(worker_seed, count, acc)` on `workers` threads over a fixed
/// partition of `samples` and merges the accumulators in worker order.
/// The result depends on (seed, workers) only.
template <class Fn>
McAccumulator run_mc_workers(long samples, std::uint64_t seed, int workers, Fn fn) {
    if (workers < 1) workers = 1;
    if (static_cast<long>(workers) > samples && samples > 0) workers = static_cast<int>(samples);
    std::vector<McAccumulator> parts(static_cast<std::size_t>(workers));
    const long base = samples / workers;
    const long extra = samples % workers;
    auto run = [&](int w) {
        const long count = base + (w < extra ? 1 : 0);
        fn(substream_seed(seed, static_cast<std::uint64_t>(w)), count, parts[static_cast<std::size_t>(w)]);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    McAccumulator total;
    for (const auto& p : parts) total.merge(p);
    return total;
}

}  // namespace allpay
