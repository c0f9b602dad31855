#include "cflow/lab/random.hpp"

#include <cmath>
#include <numbers>

#include "cflow/errors.hpp"

namespace cflow::lab {

ModeVector generate_perturbation(const PerturbationSpec& spec, Index n_total, std::uint64_t seed) {
    const Index last = spec.last > 0 ? std::min(spec.last, n_total) : n_total;
    if (spec.first < 0 || spec.first >= last) throw ValidationError("generate_perturbation: empty mode support");
    if (!(spec.delta >= 0.0)) throw ValidationError("generate_perturbation: delta must be nonnegative");

    SplitMix64 rng(seed);
    ModeVector out(n_total);
    for (Index k = spec.first; k < last; ++k) {
        const double r = std::sqrt(rng.uniform());
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        out[k] = std::polar(r, phi);
    }
    if (spec.zero_mode0) out[0] = 0.0;
    const double norm = weighted_norm(out, kH1);
    if (norm == 0.0) {
        if (spec.delta == 0.0) return out;
        throw ValidationError("generate_perturbation: support carries no mass");
    }
    out.coeffs() *= spec.delta / norm;
    return out;
}

}  // namespace cflow::lab
