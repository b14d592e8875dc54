#pragma once

#include <cmath>
#include <cstdint>

namespace tdnc {

/*
 * Counter-based random stream. Every (seed, component, flow, replication)
 * tuple names an independent stream; draws are splitmix64 outputs of the
 * stream key XORed with a running counter position. Replications and
 * components never share draws, so any part of a simulation can be
 * regenerated in isolation.
 */
struct rng_stream {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(key ^ mix(counter++)); }

    // uniform in (0, 1]: never zero, so log() is safe
    double uniform() {
        std::uint64_t u = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(u) + 1.0) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // geometric number of trials >= 1 with success probability 1 - pe
    long geometric_trials(double pe) {
        if (pe <= 0.0) return 1;
        return 1 + static_cast<long>(std::floor(std::log(uniform()) / std::log(pe)));
    }
};

enum class stream_component : std::uint64_t {
    source = 1,
    server = 2,
    aggregate = 3,
};

inline rng_stream make_stream(std::uint64_t seed, stream_component comp, std::uint64_t flow_or_node,
                              std::uint64_t replication) {
    rng_stream s;
    std::uint64_t k = rng_stream::mix(seed);
    k = rng_stream::mix(k ^ (static_cast<std::uint64_t>(comp) << 56));
    k = rng_stream::mix(k ^ flow_or_node);
    k = rng_stream::mix(k ^ (replication * 0x9e3779b97f4a7c15ULL));
    s.key = k;
    return s;
}

}  // namespace tdnc
