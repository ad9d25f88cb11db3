#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace haarlab {

// Address of a dyadic subcube of the root cube. The root is (gen=0, coords=0);
// generation k cubes have side 2^-k times the root side and integer
// coordinates in [0, 2^k) per dimension.
struct CubeId {
    int dim = 1;
    int gen = 0;
    std::vector<std::uint64_t> coords;  // one entry per dimension

    bool operator==(const CubeId&) const = default;
};

CubeId root_cube(int dim);

// The 2^d children in row-major coordinate order. In d=1, index 0 is the
// left child I_- and index 1 is the right child I_+.
std::vector<CubeId> children(const CubeId& q);

CubeId child(const CubeId& q, int child_index);

// r-th dyadic ancestor; ancestor(q,1) is the parent. Throws when r > q.gen.
CubeId ancestor(const CubeId& q, int r);

// All cubes R with ancestor(R,s) == q, in row-major coordinate order.
std::vector<CubeId> descendants(const CubeId& q, int s);

// +1 for a left child, -1 for a right child (d=1 only, q != root).
int sibling_sign(const CubeId& q);

bool contains(const CubeId& outer, const CubeId& inner);

// Index of q among the children of its parent, matching children() order.
int child_index_in_parent(const CubeId& q);

// Dense per-generation node index used by the storage layer: the bits of the
// root-to-q path, d bits per generation (each step contributes the child
// index). For d=1 this equals the coordinate; for d>1 it is a bit
// interleaving of the coordinates.
std::uint64_t node_index(const CubeId& q);
CubeId cube_from_node(int dim, int gen, std::uint64_t node);

// Row-major index of q among all cubes of its generation (serialization
// order for leaf arrays).
std::uint64_t row_major_index(const CubeId& q);
CubeId cube_from_row_major(int dim, int gen, std::uint64_t idx);

std::uint64_t node_to_row_major(int dim, int gen, std::uint64_t node);
std::uint64_t row_major_to_node(int dim, int gen, std::uint64_t idx);

// "k:c1,c2,...,cd", e.g. "3:5" is [5/8, 6/8) in d=1.
std::string to_address(const CubeId& q);
CubeId parse_address(int dim, const std::string& s);

inline std::uint64_t nodes_at_gen(int dim, int gen) {
    return std::uint64_t{1} << (static_cast<unsigned>(dim) * static_cast<unsigned>(gen));
}

}  // namespace haarlab
