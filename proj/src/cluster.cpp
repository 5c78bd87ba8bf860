#include "sketchsci/cluster.hpp"

#include "sketchsci/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>

namespace sketchsci::cluster {

namespace {

    const std::vector<std::string> builtin_scale = {"Very Low", "Low", "Medium", "High", "Very High"};

    struct ColorGroup {
        const Coloring* coloring;
        std::set<std::size_t> rows; ///< 0-based
    };

    /// Group colorings painted on `table`, in sketch order.
    std::vector<ColorGroup> color_groups(const Sketch& sketch, const Table& table)
    {
        require_roles(sketch, {Role::group}, "cluster");
        std::vector<ColorGroup> out;
        std::map<std::size_t, std::string> owner;
        for (const auto& coloring : sketch.colorings) {
            ColorGroup group{&coloring, {}};
            for (const auto& cell : coloring.cells) {
                if (cell.table != table.name())
                    continue;
                if (cell.row >= table.row_count())
                    throw Error(ErrorCode::validation, "colored cell outside the table",
                        table.name() + " row " + std::to_string(cell.row + 1));
                auto [it, fresh] = owner.try_emplace(cell.row, coloring.color);
                if (!fresh && it->second != coloring.color)
                    throw Error(ErrorCode::conflict, "a row carries two group colors",
                        "row " + std::to_string(cell.row + 1) + ": " + it->second + ", " + coloring.color);
                group.rows.insert(cell.row);
            }
            if (!group.rows.empty())
                out.push_back(std::move(group));
        }
        return out;
    }

    struct UnionFind {
        std::vector<std::size_t> parent;
        explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
        std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
        void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
    };

    /// Must-link path from a to b (0-based rows) as constraint text.
    std::string must_link_path(
        const std::vector<PairConstraint>& constraints, std::size_t n, std::size_t from, std::size_t to)
    {
        std::vector<std::vector<std::size_t>> adjacent(n);
        for (const auto& c : constraints)
            if (c.kind == LinkKind::must_link) {
                adjacent[c.a - 1].push_back(c.b - 1);
                adjacent[c.b - 1].push_back(c.a - 1);
            }
        std::vector<std::optional<std::size_t>> previous(n);
        std::deque<std::size_t> queue{from};
        previous[from] = from;
        while (!queue.empty()) {
            auto x = queue.front();
            queue.pop_front();
            for (auto y : adjacent[x])
                if (!previous[y]) {
                    previous[y] = x;
                    queue.push_back(y);
                }
        }
        std::vector<std::string> steps;
        for (auto x = to; x != from; x = *previous[x]) {
            auto y = *previous[x];
            steps.push_back(to_string(PairConstraint{LinkKind::must_link, std::min(x, y) + 1, std::max(x, y) + 1}));
        }
        std::reverse(steps.begin(), steps.end());
        std::string out;
        for (const auto& step : steps)
            out += step + ", ";
        return out
            + to_string(PairConstraint{LinkKind::cannot_link, std::min(from, to) + 1, std::max(from, to) + 1});
    }

} // namespace

std::string to_string(const PairConstraint& constraint)
{
    return std::string(constraint.kind == LinkKind::must_link ? "mustlink(" : "cannotlink(")
        + std::to_string(constraint.a) + ", " + std::to_string(constraint.b) + ")";
}

std::vector<PairConstraint> sketch_to_constraints(const Sketch& sketch, const Table& table)
{
    auto groups = color_groups(sketch, table);
    std::set<PairConstraint> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (auto a : groups[g].rows) {
            for (auto b : groups[g].rows)
                if (a < b)
                    out.insert({LinkKind::must_link, a + 1, b + 1});
            for (std::size_t h = g + 1; h < groups.size(); ++h)
                for (auto b : groups[h].rows)
                    out.insert({LinkKind::cannot_link, std::min(a, b) + 1, std::max(a, b) + 1});
        }
    }
    return {out.begin(), out.end()};
}

FeatureSpace default_feature_space(const Table& table, const FeatureOverrides& overrides)
{
    for (const auto& name : overrides.identifiers)
        if (!table.column_index(name))
            throw Error(ErrorCode::configuration, "unknown identifier column", name);
    for (const auto& [name, ordering] : overrides.ordinals)
        if (!table.column_index(name))
            throw Error(ErrorCode::configuration, "unknown ordinal column", name);

    FeatureSpace fs;
    for (std::size_t c = 0; c < table.col_count(); ++c) {
        const auto& name = table.header()[c];
        std::vector<CellValue> observed;
        for (const auto& cell : table.column(c))
            if (cell.is_observed())
                observed.push_back(cell);

        Feature feature;
        if (name == "Cluster"
            || std::find(overrides.identifiers.begin(), overrides.identifiers.end(), name)
                != overrides.identifiers.end()) {
            feature.kind = FeatureKind::identifier;
        } else if (auto it = overrides.ordinals.find(name); it != overrides.ordinals.end()) {
            feature.kind = FeatureKind::ordinal;
            feature.ordering = it->second;
            for (const auto& cell : observed)
                if (std::find(feature.ordering.begin(), feature.ordering.end(), cell.display())
                    == feature.ordering.end())
                    throw Error(ErrorCode::configuration, "ordinal ordering does not cover every value",
                        name + ": " + cell.display());
        } else if (!observed.empty() && table.col_types()[c] == TypeTag::numeric) {
            feature.kind = FeatureKind::numeric;
            auto [lo, hi] = std::minmax_element(observed.begin(), observed.end(),
                [](const CellValue& x, const CellValue& y) { return x.number() < y.number(); });
            feature.low = lo->number();
            feature.high = hi->number();
        } else if (!observed.empty() && table.col_types()[c] == TypeTag::textual) {
            std::set<std::string> values;
            for (const auto& cell : observed)
                values.insert(cell.text());
            bool on_scale = std::all_of(values.begin(), values.end(), [](const std::string& v) {
                return std::find(builtin_scale.begin(), builtin_scale.end(), v) != builtin_scale.end();
            });
            if (on_scale) {
                feature.kind = FeatureKind::ordinal;
                for (const auto& v : builtin_scale)
                    if (values.count(v))
                        feature.ordering.push_back(v);
            } else if (table.row_count() >= 3 && observed.size() == table.row_count()
                && values.size() == observed.size()) {
                feature.kind = FeatureKind::identifier;
            }
        }
        fs.features.push_back(std::move(feature));
    }
    return fs;
}

double gower_distance(const Row& a, const Row& b, const FeatureSpace& fs)
{
    double total = 0;
    std::size_t used = 0;
    for (std::size_t c = 0; c < fs.features.size(); ++c) {
        const auto& feature = fs.features[c];
        if (feature.kind == FeatureKind::identifier)
            continue;
        ++used;
        const auto& x = a.at(c);
        const auto& y = b.at(c);
        if (!x.is_observed() || !y.is_observed()) {
            total += 0.5;
            continue;
        }
        switch (feature.kind) {
        case FeatureKind::categorical:
            total += x == y ? 0.0 : 1.0;
            break;
        case FeatureKind::ordinal: {
            const auto rank = [&](const CellValue& v) {
                auto it = std::find(feature.ordering.begin(), feature.ordering.end(), v.display());
                if (it == feature.ordering.end())
                    throw Error(ErrorCode::configuration, "value outside the ordinal ordering", v.display());
                return static_cast<double>(it - feature.ordering.begin());
            };
            double span = static_cast<double>(feature.ordering.size()) - 1;
            total += span > 0 ? std::abs(rank(x) - rank(y)) / span : 0.0;
            break;
        }
        case FeatureKind::numeric: {
            if (!x.is_number() || !y.is_number()) {
                total += x == y ? 0.0 : 1.0;
                break;
            }
            double span = feature.high - feature.low;
            total += span > 0 ? std::min(1.0, std::abs(x.number() - y.number()) / span) : 0.0;
            break;
        }
        case FeatureKind::identifier:
            break;
        }
    }
    if (used == 0)
        throw Error(ErrorCode::configuration, "every column is an identifier; nothing to measure distance on");
    return total / static_cast<double>(used);
}

ClusterAssignment constrained_cluster(const Table& table, const std::vector<PairConstraint>& constraints, std::size_t k,
    const FeatureSpace& fs, unsigned seed)
{
    const std::size_t n = table.row_count();
    if (k == 0)
        throw Error(ErrorCode::invalid_arguments, "cluster count must be positive");
    for (const auto& c : constraints)
        if (c.a == c.b || c.a == 0 || c.b == 0 || c.a > n || c.b > n)
            throw Error(ErrorCode::invalid_arguments, "constraint refers to an invalid row", to_string(c));

    // Must-link components become super-points, ordered by lowest row.
    UnionFind uf(n);
    for (const auto& c : constraints)
        if (c.kind == LinkKind::must_link)
            uf.unite(c.a - 1, c.b - 1);
    std::vector<std::size_t> comp_of(n);
    std::vector<std::vector<std::size_t>> members;
    std::map<std::size_t, std::size_t> root_comp;
    for (std::size_t r = 0; r < n; ++r) {
        auto [it, fresh] = root_comp.try_emplace(uf.find(r), members.size());
        if (fresh)
            members.emplace_back();
        comp_of[r] = it->second;
        members[it->second].push_back(r);
    }
    const std::size_t m = members.size();

    for (const auto& c : constraints)
        if (c.kind == LinkKind::cannot_link && comp_of[c.a - 1] == comp_of[c.b - 1])
            throw Error(ErrorCode::infeasible, "must-link and cannot-link constraints contradict each other",
                must_link_path(constraints, n, c.a - 1, c.b - 1));
    if (k > m)
        throw Error(ErrorCode::infeasible, "more clusters requested than must-link components",
            std::to_string(k) + " clusters, " + std::to_string(m) + " components");

    std::vector<std::vector<bool>> cannot(m, std::vector<bool>(m, false));
    std::vector<bool> constrained(m, false);
    for (const auto& c : constraints) {
        auto p = comp_of[c.a - 1], q = comp_of[c.b - 1];
        constrained[p] = constrained[q] = true;
        if (c.kind == LinkKind::cannot_link)
            cannot[p][q] = cannot[q][p] = true;
    }

    std::vector<std::vector<double>> row_distance(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            row_distance[i][j] = row_distance[j][i] = gower_distance(table.rows()[i], table.rows()[j], fs);
    // single linkage between super-points
    std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = p + 1; q < m; ++q) {
            double best = std::numeric_limits<double>::infinity();
            for (auto i : members[p])
                for (auto j : members[q])
                    best = std::min(best, row_distance[i][j]);
            dist[p][q] = dist[q][p] = best;
        }

    // Pinned: constrained components that are pairwise cannot-linked.
    std::vector<std::size_t> pinned;
    for (std::size_t p = 0; p < m && pinned.size() < k; ++p)
        if (constrained[p] && std::all_of(pinned.begin(), pinned.end(), [&](std::size_t q) { return cannot[p][q]; }))
            pinned.push_back(p);
    std::vector<std::size_t> medoid = pinned;
    if (medoid.size() < k) {
        std::vector<std::size_t> rest;
        for (std::size_t p = 0; p < m; ++p)
            if (std::find(pinned.begin(), pinned.end(), p) == pinned.end())
                rest.push_back(p);
        std::mt19937 rng(seed);
        std::shuffle(rest.begin(), rest.end(), rng);
        medoid.insert(medoid.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(k - medoid.size()));
    }

    const auto allowed = [&](const std::vector<std::optional<std::size_t>>& of, std::size_t p, std::size_t c) {
        for (std::size_t q = 0; q < m; ++q)
            if (of[q] == c && cannot[p][q])
                return false;
        return true;
    };
    const auto clusters_by_distance = [&](std::size_t p) {
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return dist[p][medoid[x]] < dist[p][medoid[y]]; });
        return order;
    };

    std::vector<std::optional<std::size_t>> assignment(m);
    for (int iteration = 0; iteration < 100; ++iteration) {
        std::vector<std::optional<std::size_t>> of(m);
        for (std::size_t c = 0; c < k; ++c)
            of[medoid[c]] = c;
        for (std::size_t c = 0; c < pinned.size(); ++c)
            of[pinned[c]] = c;

        std::vector<std::size_t> free;
        for (std::size_t p = 0; p < m; ++p)
            if (!of[p])
                free.push_back(p);
        const auto nearest = [&](std::size_t p) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c)
                best = std::min(best, dist[p][medoid[c]]);
            return best;
        };
        std::stable_sort(free.begin(), free.end(), [&](std::size_t x, std::size_t y) { return nearest(x) < nearest(y); });

        bool stuck = false;
        for (auto p : free) {
            std::optional<std::size_t> chosen;
            for (auto c : clusters_by_distance(p))
                if (allowed(of, p, c)) {
                    chosen = c;
                    break;
                }
            if (!chosen) {
                stuck = true;
                break;
            }
            of[p] = chosen;
        }

        if (stuck) {
            // Backtrack over every unpinned super-point; clusters must stay non-empty.
            std::vector<std::size_t> open;
            for (std::size_t p = 0; p < m; ++p)
                if (std::find(pinned.begin(), pinned.end(), p) == pinned.end())
                    open.push_back(p);
            std::stable_sort(open.begin(), open.end(), [&](std::size_t x, std::size_t y) { return nearest(x) < nearest(y); });
            std::fill(of.begin(), of.end(), std::nullopt);
            for (std::size_t c = 0; c < pinned.size(); ++c)
                of[pinned[c]] = c;
            std::vector<std::size_t> sizes(k, 0);
            for (std::size_t c = 0; c < pinned.size(); ++c)
                sizes[c] = 1;
            std::function<bool(std::size_t)> place = [&](std::size_t i) {
                auto empty = static_cast<std::size_t>(std::count(sizes.begin(), sizes.end(), 0));
                if (open.size() - i < empty)
                    return false;
                if (i == open.size())
                    return true;
                auto p = open[i];
                for (auto c : clusters_by_distance(p)) {
                    if (!allowed(of, p, c))
                        continue;
                    of[p] = c;
                    ++sizes[c];
                    if (place(i + 1))
                        return true;
                    --sizes[c];
                    of[p] = std::nullopt;
                }
                return false;
            };
            if (!place(0))
                throw Error(ErrorCode::infeasible, "no assignment into the requested clusters satisfies the cannot-links",
                    std::to_string(k) + " clusters");
        }

        // Medoid update: least summed distance to the cluster, ties to the lower row.
        std::vector<std::size_t> next = medoid;
        for (std::size_t c = 0; c < k; ++c) {
            std::optional<std::pair<double, std::size_t>> best;
            for (std::size_t p = 0; p < m; ++p) {
                if (of[p] != c)
                    continue;
                double sum = 0;
                for (std::size_t q = 0; q < m; ++q)
                    if (of[q] == c)
                        sum += dist[p][q];
                if (!best || sum < best->first - 1e-12)
                    best = {sum, p};
            }
            next[c] = best->second;
        }

        bool settled = of == assignment && next == medoid;
        assignment = std::move(of);
        medoid = std::move(next);
        if (settled)
            break;
    }

    ClusterAssignment out;
    out.k = k;
    for (std::size_t r = 0; r < n; ++r)
        out.cluster_of.push_back(*assignment[comp_of[r]] + 1);
    return out;
}

std::size_t count_violations(const ClusterAssignment& assignment, const std::vector<PairConstraint>& constraints)
{
    std::size_t out = 0;
    for (const auto& c : constraints) {
        bool same = assignment.cluster_of.at(c.a - 1) == assignment.cluster_of.at(c.b - 1);
        if (same != (c.kind == LinkKind::must_link))
            ++out;
    }
    return out;
}

ClusterResult emit_cluster_sketch(const ClusterAssignment& assignment, const Table& table, const Sketch& original)
{
    auto groups = color_groups(original, table);
    std::map<std::size_t, const Coloring*> color_of_cluster;
    std::set<std::size_t> colored_rows;
    for (const auto& group : groups)
        for (auto r : group.rows) {
            color_of_cluster.try_emplace(assignment.cluster_of.at(r), group.coloring);
            colored_rows.insert(r);
        }

    ClusterResult out;
    out.assignment = assignment;
    out.sketch = original;
    std::vector<CellValue> labels;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        auto cluster = assignment.cluster_of.at(r);
        auto it = color_of_cluster.find(cluster);
        labels.emplace_back(it != color_of_cluster.end() ? it->second->color : std::to_string(cluster));
        if (it == color_of_cluster.end() || colored_rows.count(r))
            continue;
        auto& coloring = out.sketch.colorings[static_cast<std::size_t>(it->second - original.colorings.data())];
        for (std::size_t c = 0; c < table.col_count(); ++c) {
            if (table.header()[c] == "Cluster")
                continue;
            CellRef cell{table.name(), r, c};
            coloring.cells.insert(cell);
            out.sketch.machine_generated.insert(cell);
        }
    }
    out.table = table.with_column("Cluster", std::move(labels));
    return out;
}

ClusterResult run_clustering(const Table& table, const Sketch& sketch, const FeatureOverrides& overrides, unsigned seed)
{
    auto groups = color_groups(sketch, table);
    if (groups.empty())
        throw Error(ErrorCode::task_role, "cluster requires at least one group-colored row", "table " + table.name());
    auto constraints = sketch_to_constraints(sketch, table);
    auto fs = default_feature_space(table, overrides);
    auto assignment = constrained_cluster(table, constraints, groups.size(), fs, seed);
    auto result = emit_cluster_sketch(assignment, table, sketch);
    result.constraints = std::move(constraints);
    return result;
}

} // namespace sketchsci::cluster
