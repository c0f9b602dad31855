#include "cflow/kernel.hpp"

#include <algorithm>

#include "cflow/errors.hpp"

namespace cflow {

LayeredPairSums::LayeredPairSums(Index n_modes, Index max_layer)
    : n_(n_modes), layers_(n_modes > 0 ? max_layer + 1 : 0) {
    if (n_modes > 0 && (max_layer < 0 || max_layer > n_modes - 1))
        throw ValidationError("layered_pair_sums: max_layer must lie in [0, N-1]");
    data_.assign(static_cast<std::size_t>(offset(layers_)), cplx{});
}

LayeredPairSums layered_pair_sums(const ModeVector& alpha, Index max_layer) {
    const Index n = alpha.size();
    LayeredPairSums table(n, max_layer);
    if (n == 0) return table;

    // For each degree s the layers are nested: C_l(s) = C_{l+1}(s) + 2 alpha_l alpha_{s-l}
    // (the centre term alpha_{s/2}^2 is counted once). Accumulating from the centre
    // outwards gives every layer of the row in O(N) and keeps k <-> s-k symmetry exact.
    for (Index s = 0; s <= 2 * n - 2; ++s) {
        const Index top = s / 2;  // innermost layer with a nonempty range
        const Index low = std::max<Index>(0, s - (n - 1));
        cplx acc{};
        for (Index l = top; l >= 0; --l) {
            if (l >= low) {
                const Index k = s - l;
                acc += (k == l) ? alpha[l] * alpha[l] : 2.0 * (alpha[l] * alpha[k]);
            }
            if (l <= max_layer) table.at(l, s) = acc;
        }
    }
    return table;
}

}  // namespace cflow
