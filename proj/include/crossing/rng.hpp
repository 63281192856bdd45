#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace crossing {

/// Deterministic, serializable random stream. normal() draws a fresh
/// Box-Muller pair each call so the state is fully captured by the engine.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    double uniform() {
        return std::generate_canonical<double, 53>(gen_);
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t next_u64() { return gen_(); }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(uniform() * (hi - lo + 1.0));
    }
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::string state() const {
        std::ostringstream os;
        os << gen_;
        return os.str();
    }
    void set_state(const std::string& s) {
        std::istringstream is(s);
        is >> gen_;
        if (is.fail()) throw std::invalid_argument("bad rng state");
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace crossing
