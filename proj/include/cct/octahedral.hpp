#pragma once

#include "cct/geometry.hpp"

#include <array>
#include <vector>

namespace cct {

// A signed permutation matrix: (g p)[i] = sign[i] * p[perm[i]].
// The 48 of them form the full symmetry group of the cube.
struct SignedPermutation {
    std::array<int, 3> perm{0, 1, 2};
    std::array<int, 3> sign{1, 1, 1};

    Vec3 apply(const Vec3& p) const {
        return Vec3(sign[0] * p[perm[0]], sign[1] * p[perm[1]], sign[2] * p[perm[2]]);
    }

    int determinant() const {
        const int parity = (perm[0] == 0 && perm[1] == 1) || (perm[0] == 1 && perm[1] == 2) ||
                                   (perm[0] == 2 && perm[1] == 0)
                               ? 1 : -1;
        return parity * sign[0] * sign[1] * sign[2];
    }

    SignedPermutation compose(const SignedPermutation& h) const {
        // (this * h) p = this(h(p))
        SignedPermutation g;
        for (int i = 0; i < 3; ++i) {
            g.perm[i] = h.perm[perm[i]];
            g.sign[i] = sign[i] * h.sign[perm[i]];
        }
        return g;
    }

    SignedPermutation inverse() const {
        SignedPermutation g;
        for (int i = 0; i < 3; ++i) {
            g.perm[perm[i]] = i;
            g.sign[perm[i]] = sign[i];
        }
        return g;
    }

    bool operator==(const SignedPermutation&) const = default;
};

// All 48 signed permutations in a fixed canonical order: permutations in
// lexicographic order, sign patterns in binary order.
inline std::vector<SignedPermutation> octahedral_group() {
    static constexpr std::array<std::array<int, 3>, 6> perms{{
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    std::vector<SignedPermutation> group;
    group.reserve(48);
    for (const auto& perm : perms)
        for (int bits = 0; bits < 8; ++bits) {
            SignedPermutation g;
            g.perm = perm;
            for (int i = 0; i < 3; ++i) g.sign[i] = (bits >> i) & 1 ? -1 : 1;
            group.push_back(g);
        }
    return group;
}

} // namespace cct
