#pragma once

// Deterministic random-number utilities.
//
// Everything downstream (matrix sampling, field simulation, Monte Carlo
// conditioning) must be bit-reproducible for a given 64-bit seed, including
// under multi-threaded execution.  Two ingredients make that work:
//
//  * Gaussian variates are produced by an explicit Box-Muller transform on
//    top of std::mt19937_64 raw output.  (std::normal_distribution is
//    implementation-defined and would not reproduce across standard
//    libraries.)
//  * Parallel work is split into a fixed number of chunks, each with a seed
//    derived from (base seed, chunk index); partial results are combined in
//    chunk order.  The outcome is therefore independent of the thread count.

#include <atomic>
#include <cstdint>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace critlab {

// One splitmix64 step; good avalanche, used only for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent stream seed for (base, stream).  Streams with equal base and
// different indices are decorrelated by double mixing.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ splitmix64(stream * 0xa0761d6478bd642fULL + 0x8bb84b93962eacc9ULL));
}

// Gaussian stream: mt19937_64 + explicit Box-Muller.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

    // Uniform on (0, 1]; 53-bit resolution, never returns 0 (log-safe).
    double uniform01() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform01();
        const double v = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u));
        const double angle = 2.0 * std::numbers::pi * v;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Process-wide default worker count (CLI --threads sets it).
inline int& thread_count_ref() {
    static int n = []() {
        unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : static_cast<int>(hc);
    }();
    return n;
}

inline int thread_count() { return thread_count_ref(); }
inline void set_thread_count(int n) { thread_count_ref() = n < 1 ? 1 : n; }

// Deterministic parallel map: evaluates job(chunk) for chunk = 0..n_chunks-1
// on up to thread_count() workers and returns results indexed by chunk.
// Chunk decomposition is fixed by the caller, so results do not depend on the
// number of workers.
template <typename Result>
std::vector<Result> parallel_chunks(int n_chunks, const std::function<Result(int)>& job) {
    std::vector<Result> out(static_cast<std::size_t>(n_chunks));
    const int workers = std::min(thread_count(), n_chunks);
    if (workers <= 1) {
        for (int c = 0; c < n_chunks; ++c) out[static_cast<std::size_t>(c)] = job(c);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int c = next.fetch_add(1);
                if (c >= n_chunks) return;
                try {
                    out[static_cast<std::size_t>(c)] = job(c);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace critlab
