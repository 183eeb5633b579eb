#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace graspdec {

// Deterministic PRNG (splitmix64). Self-contained so that streams, uniforms
// and normals are bit-identical across platforms and standard libraries;
// std::<distribution> output is implementation-defined and would break the
// byte-reproducibility contract of seeded runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), n > 0
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // standard normal via Box-Muller (one value per pair of uniforms)
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Named sub-stream of a master seed ("schedule", "noise", "split", ...).
// Distinct names give statistically independent streams; same (seed, name)
// always yields the same stream.
Rng substream(std::uint64_t master_seed, std::string_view name);
std::uint64_t substream_seed(std::uint64_t master_seed, std::string_view name);

}  // namespace graspdec
