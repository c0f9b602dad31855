#pragma once

#include <cassert>
#include <vector>

#include "cflow/state.hpp"

namespace cflow {

/// Resonant interaction coefficient S_{njkm} = min(n, j, k, m) + 1 on n + j = k + m.
constexpr long min_plus_one(long n, long j, long k, long m) {
    assert(n + j == k + m && "min_plus_one: off the resonant set");
    long v = n;
    if (j < v) v = j;
    if (k < v) v = k;
    if (m < v) v = m;
    return v + 1;
}

/// Layered pair sums C_l(s) = sum_{k=l}^{s-l} alpha_k alpha_{s-k}, for
/// 0 <= l <= max_layer and 2l <= s <= 2N-2.
///
/// Since S = min(n,j,k,m)+1 counts the layers l with n,j,k,m >= l, the quartic
/// energy is H = sum_l sum_s |C_l(s)|^2 and the vector field follows from the
/// same table. Entries outside the triangular index set read as zero.
class LayeredPairSums {
public:
    LayeredPairSums() = default;
    LayeredPairSums(Index n_modes, Index max_layer);

    Index modes() const noexcept { return n_; }
    Index max_layer() const noexcept { return layers_ - 1; }
    /// Largest total degree, 2N - 2.
    Index max_degree() const noexcept { return 2 * n_ - 2; }

    cplx operator()(Index layer, Index degree) const {
        if (layer < 0 || layer >= layers_ || degree < 2 * layer || degree > max_degree()) return {};
        return data_[offset(layer) + (degree - 2 * layer)];
    }

    cplx& at(Index layer, Index degree) { return data_[offset(layer) + (degree - 2 * layer)]; }

private:
    Index offset(Index l) const noexcept { return l * (2 * n_ - 1) - l * (l - 1); }

    Index n_ = 0;
    Index layers_ = 0;
    std::vector<cplx> data_;
};

/// Builds the full table in O(N^2) work.
LayeredPairSums layered_pair_sums(const ModeVector& alpha, Index max_layer);
inline LayeredPairSums layered_pair_sums(const ModeVector& alpha) {
    return layered_pair_sums(alpha, alpha.size() > 0 ? alpha.size() - 1 : 0);
}

}  // namespace cflow
