#include "graspdec/rng.hpp"

#include <cmath>
#include <numbers>

namespace graspdec {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so the log is finite
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t substream_seed(std::uint64_t master_seed, std::string_view name) {
    // FNV-1a over the stream name, folded into the master seed
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return master_seed ^ h;
}

Rng substream(std::uint64_t master_seed, std::string_view name) {
    return Rng(substream_seed(master_seed, name));
}

}  // namespace graspdec
