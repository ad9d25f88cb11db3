#include "haarlab/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace haarlab {

namespace {
MeasureTree from_leaf_masses(int dim, int depth, double root_volume,
                             const std::vector<double>& row_major_leaves) {
    if (row_major_leaves.size() != nodes_at_gen(dim, depth))
        throw std::invalid_argument("leaf mass count does not match depth");
    MeasureTree mu{dim, depth, root_volume, {}};
    mu.level.resize(depth + 1);
    for (int k = 0; k <= depth; ++k) mu.level[k].assign(nodes_at_gen(dim, k), 0.0);
    for (std::uint64_t i = 0; i < row_major_leaves.size(); ++i) {
        if (row_major_leaves[i] < 0) throw std::invalid_argument("negative mass");
        mu.level[depth][row_major_to_node(dim, depth, i)] = row_major_leaves[i];
    }
    for (int k = depth - 1; k >= 0; --k)
        for (std::uint64_t n = 0; n < mu.level[k].size(); ++n) {
            double s = 0;
            for (int c = 0; c < (1 << dim); ++c) s += mu.level[k + 1][(n << dim) + c];
            mu.level[k][n] = s;
        }
    return mu;
}
}  // namespace

MeasureTree measure_from_json(const json& spec) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "lebesgue") {
        return build_lebesgue(spec.at("dim").get<int>(), spec.at("depth").get<int>(),
                              spec.value("root_volume", 1.0));
    }
    if (kind == "split") {
        SplitSequenceSpec s;
        s.depth = spec.at("depth").get<int>();
        const std::string formula = spec.value("formula", "explicit");
        using K = SplitSequenceSpec::Kind;
        if (formula == "a")
            s.kind = K::formula_a;
        else if (formula == "b")
            s.kind = K::formula_b;
        else if (formula == "c")
            s.kind = K::formula_c;
        else if (formula == "d")
            s.kind = K::formula_d;
        else if (formula == "explicit") {
            s.kind = K::explicit_list;
            s.b = spec.at("b").get<std::vector<double>>();
        } else {
            throw std::invalid_argument("unknown split formula: " + formula);
        }
        return build_split_measure(s);
    }
    if (kind == "r2_nonstandard")
        return build_r2_nonstandard(spec.at("K").get<int>(), spec.at("depth").get<int>());
    if (kind == "product") {
        std::vector<MeasureTree> factors;
        for (const auto& f : spec.at("factors")) factors.push_back(measure_from_json(f));
        return build_product(factors);
    }
    if (kind == "explicit")
        return from_leaf_masses(spec.at("dim").get<int>(), spec.at("depth").get<int>(),
                                spec.value("root_volume", 1.0),
                                spec.at("leaf_masses").get<std::vector<double>>());
    throw std::invalid_argument("unknown measure kind: " + kind);
}

json measure_to_json(const MeasureTree& mu) {
    std::vector<double> leaves(mu.level[mu.depth].size());
    for (std::uint64_t n = 0; n < leaves.size(); ++n)
        leaves[node_to_row_major(mu.dim, mu.depth, n)] = mu.level[mu.depth][n];
    return json{{"kind", "explicit"},
                {"dim", mu.dim},
                {"depth", mu.depth},
                {"root_volume", mu.root_volume},
                {"leaf_masses", leaves}};
}

SimpleFunction function_from_json(const json& j) {
    SimpleFunction f;
    f.dim = j.value("dim", 1);
    f.resolution = j.at("resolution").get<int>();
    const auto vals = j.at("values").get<std::vector<double>>();
    if (vals.size() != nodes_at_gen(f.dim, f.resolution))
        throw std::invalid_argument("value count does not match resolution");
    f.values.resize(vals.size());
    for (std::uint64_t i = 0; i < vals.size(); ++i)
        f.values[row_major_to_node(f.dim, f.resolution, i)] = vals[i];
    return f;
}

json function_to_json(const SimpleFunction& f) {
    std::vector<double> vals(f.values.size());
    for (std::uint64_t n = 0; n < vals.size(); ++n)
        vals[node_to_row_major(f.dim, f.resolution, n)] = f.values[n];
    return json{{"dim", f.dim}, {"resolution", f.resolution}, {"values", vals}};
}

HaarSystem system_from_json(const json& spec, const MeasureTree& mu) {
    const std::string builder = spec.at("builder").get<std::string>();
    if (builder == "canonical1d") return canonical_1d(mu);
    if (builder == "wilson") return wilson(mu, spec.value("selector", 0));
    if (builder == "mitrea") return mitrea(mu, spec.value("selector", 0));
    if (builder == "indicator") return noncancellative_indicator(mu);
    if (builder == "tensor") {
        std::vector<MeasureTree> factors;
        for (const auto& f : spec.at("factors")) factors.push_back(measure_from_json(f));
        return tensor(factors, spec.at("epsilon").get<std::vector<int>>());
    }
    if (builder == "custom") {
        std::vector<std::pair<CubeId, std::vector<double>>> entries;
        for (const auto& e : spec.at("entries"))
            entries.emplace_back(parse_address(mu.dim, e.at("cube").get<std::string>()),
                                 e.at("child_values").get<std::vector<double>>());
        return custom_system(mu, entries, spec.value("cancellative", true));
    }
    throw std::invalid_argument("unknown system builder: " + builder);
}

json verification_to_json(const VerificationReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back(
            {{"name", c.name}, {"bound", c.bound}, {"measured", c.measured}, {"pass", c.pass}});
    return json{{"ok", rep.ok}, {"checks", checks}};
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace haarlab
