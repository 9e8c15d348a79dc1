#pragma once

#include <cstdint>
#include <random>

namespace msrv {

/// splitmix64 step; used to derive well-separated substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seedable generator with named substreams. Replication r of a Monte Carlo
/// run draws from stream(master, r), so results are independent of worker
/// scheduling and reproducible from (config, seed) alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    static Rng stream(std::uint64_t master, std::uint64_t index) {
        // two mixing rounds keep adjacent (master, index) pairs uncorrelated
        return Rng(splitmix64(master ^ splitmix64(index + 0x51ed2701a9b5d4f3ULL)));
    }

    double uniform() { return unif_(eng_); }

    double gaussian() { return normal_(eng_); }

    /// Student-t with df degrees of freedom (finite 4th moment needs df > 4).
    double student_t(double df) {
        std::student_t_distribution<double> dist(df);
        return dist(eng_);
    }

    /// Symmetric two-point value in {-1, +1}.
    double two_point() { return (eng_() & 1u) ? 1.0 : -1.0; }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace msrv
