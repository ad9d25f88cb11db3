#include "haarlab/grid.hpp"

#include <sstream>
#include <stdexcept>

namespace haarlab {

namespace {
void check_cube(const CubeId& q) {
    if (q.dim < 1 || q.gen < 0 || static_cast<int>(q.coords.size()) != q.dim)
        throw std::invalid_argument("malformed CubeId");
    for (auto c : q.coords)
        if (q.gen >= 64 || c >= (std::uint64_t{1} << q.gen))
            throw std::invalid_argument("CubeId coordinate out of range");
}
}  // namespace

CubeId root_cube(int dim) {
    if (dim < 1) throw std::invalid_argument("dim must be positive");
    return CubeId{dim, 0, std::vector<std::uint64_t>(dim, 0)};
}

CubeId child(const CubeId& q, int child_index) {
    check_cube(q);
    if (child_index < 0 || child_index >= (1 << q.dim))
        throw std::invalid_argument("child index out of range");
    CubeId c{q.dim, q.gen + 1, q.coords};
    for (int j = 0; j < q.dim; ++j) {
        int bit = (child_index >> (q.dim - 1 - j)) & 1;
        c.coords[j] = 2 * q.coords[j] + static_cast<std::uint64_t>(bit);
    }
    return c;
}

std::vector<CubeId> children(const CubeId& q) {
    std::vector<CubeId> out;
    out.reserve(std::size_t{1} << q.dim);
    for (int c = 0; c < (1 << q.dim); ++c) out.push_back(child(q, c));
    return out;
}

CubeId ancestor(const CubeId& q, int r) {
    check_cube(q);
    if (r < 0) throw std::invalid_argument("ancestor level must be nonnegative");
    if (r > q.gen) throw std::out_of_range("above root");
    CubeId a{q.dim, q.gen - r, q.coords};
    for (auto& c : a.coords) c >>= r;
    return a;
}

std::vector<CubeId> descendants(const CubeId& q, int s) {
    check_cube(q);
    if (s < 0) throw std::invalid_argument("descendant level must be nonnegative");
    if (q.dim * (q.gen + s) > 62) throw std::out_of_range("depth overflow");
    std::vector<CubeId> out;
    const std::uint64_t per_dim = std::uint64_t{1} << s;
    std::vector<std::uint64_t> off(q.dim, 0);
    while (true) {
        CubeId r{q.dim, q.gen + s, q.coords};
        for (int j = 0; j < q.dim; ++j) r.coords[j] = (q.coords[j] << s) + off[j];
        out.push_back(std::move(r));
        int j = q.dim - 1;
        while (j >= 0 && ++off[j] == per_dim) off[j--] = 0;
        if (j < 0) break;
    }
    return out;
}

int sibling_sign(const CubeId& q) {
    check_cube(q);
    if (q.dim != 1) throw std::invalid_argument("sibling_sign requires d=1");
    if (q.gen < 1) throw std::invalid_argument("root has no sibling sign");
    return (q.coords[0] & 1) ? -1 : +1;
}

bool contains(const CubeId& outer, const CubeId& inner) {
    if (outer.dim != inner.dim || outer.gen > inner.gen) return false;
    return ancestor(inner, inner.gen - outer.gen) == outer;
}

int child_index_in_parent(const CubeId& q) {
    check_cube(q);
    if (q.gen < 1) throw std::invalid_argument("root has no parent");
    int idx = 0;
    for (int j = 0; j < q.dim; ++j) idx = (idx << 1) | static_cast<int>(q.coords[j] & 1);
    return idx;
}

std::uint64_t node_index(const CubeId& q) {
    check_cube(q);
    std::uint64_t n = 0;
    for (int level = q.gen - 1; level >= 0; --level)
        for (int j = 0; j < q.dim; ++j) n = (n << 1) | ((q.coords[j] >> level) & 1);
    return n;
}

CubeId cube_from_node(int dim, int gen, std::uint64_t node) {
    CubeId q{dim, gen, std::vector<std::uint64_t>(dim, 0)};
    int bit = dim * gen;
    for (int level = 0; level < gen; ++level)
        for (int j = 0; j < dim; ++j) {
            --bit;
            q.coords[j] = (q.coords[j] << 1) | ((node >> bit) & 1);
        }
    return q;
}

std::uint64_t row_major_index(const CubeId& q) {
    check_cube(q);
    std::uint64_t idx = 0;
    for (int j = 0; j < q.dim; ++j) idx = (idx << q.gen) | q.coords[j];
    return idx;
}

CubeId cube_from_row_major(int dim, int gen, std::uint64_t idx) {
    CubeId q{dim, gen, std::vector<std::uint64_t>(dim, 0)};
    const std::uint64_t mask = (gen == 0) ? 0 : ((std::uint64_t{1} << gen) - 1);
    for (int j = dim - 1; j >= 0; --j) {
        q.coords[j] = idx & mask;
        idx >>= gen;
    }
    return q;
}

std::uint64_t node_to_row_major(int dim, int gen, std::uint64_t node) {
    return row_major_index(cube_from_node(dim, gen, node));
}

std::uint64_t row_major_to_node(int dim, int gen, std::uint64_t idx) {
    return node_index(cube_from_row_major(dim, gen, idx));
}

std::string to_address(const CubeId& q) {
    check_cube(q);
    std::ostringstream os;
    os << q.gen << ':';
    for (int j = 0; j < q.dim; ++j) {
        if (j) os << ',';
        os << q.coords[j];
    }
    return os.str();
}

CubeId parse_address(int dim, const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad cube address: " + s);
    CubeId q{dim, std::stoi(s.substr(0, colon)), {}};
    std::stringstream coords(s.substr(colon + 1));
    std::string tok;
    while (std::getline(coords, tok, ',')) q.coords.push_back(std::stoull(tok));
    check_cube(q);
    return q;
}

}  // namespace haarlab
