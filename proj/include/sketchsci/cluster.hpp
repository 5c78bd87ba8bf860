#pragma once

#include "sketchsci/sketch.hpp"
#include "sketchsci/workbook.hpp"

#include <map>
#include <string>
#include <vector>

namespace sketchsci::cluster {

enum class LinkKind { must_link, cannot_link };

/// Rows are 1-based with a < b.
struct PairConstraint {
    LinkKind kind = LinkKind::must_link;
    std::size_t a = 0;
    std::size_t b = 0;

    friend auto operator<=>(const PairConstraint&, const PairConstraint&) = default;
};

/// `mustlink(1, 7)` / `cannotlink(2, 4)`.
std::string to_string(const PairConstraint& constraint);

/// Must-links within each group color, cannot-links across colors; sorted,
/// must-links first.
std::vector<PairConstraint> sketch_to_constraints(const Sketch& sketch, const Table& table);

enum class FeatureKind { categorical, ordinal, numeric, identifier };

struct Feature {
    FeatureKind kind = FeatureKind::categorical;
    std::vector<std::string> ordering; ///< ordinal values, lowest first
    double low = 0, high = 0;          ///< numeric range
};

struct FeatureSpace {
    std::vector<Feature> features; ///< one per table column
};

struct FeatureOverrides {
    std::map<std::string, std::vector<std::string>> ordinals;
    std::vector<std::string> identifiers;

    friend bool operator==(const FeatureOverrides&, const FeatureOverrides&) = default;
};

/// Numeric columns are numeric; text columns drawn from the built-in scale
/// (Very Low .. Very High) are ordinal; all-distinct text columns and a
/// column named "Cluster" are identifiers; everything else is categorical.
FeatureSpace default_feature_space(const Table& table, const FeatureOverrides& overrides = {});

/// Mean per-feature distance over the non-identifier columns; a Missing or
/// Empty side contributes 0.5.
double gower_distance(const Row& a, const Row& b, const FeatureSpace& fs);

struct ClusterAssignment {
    std::vector<std::size_t> cluster_of; ///< per row, 1..k
    std::size_t k = 0;

    friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Constrained k-medoids over must-link super-points. Throws an
/// infeasibility error on inconsistent constraints or when no k-clustering
/// satisfies the cannot-links.
ClusterAssignment constrained_cluster(const Table& table, const std::vector<PairConstraint>& constraints, std::size_t k,
    const FeatureSpace& fs, unsigned seed = 0);

/// Number of constraints the assignment breaks.
std::size_t count_violations(const ClusterAssignment& assignment, const std::vector<PairConstraint>& constraints);

struct ClusterResult {
    Table table; ///< with the Cluster column
    Sketch sketch;
    std::vector<PairConstraint> constraints;
    ClusterAssignment assignment;
};

/// Each cluster keeps the color of the rows pinned to it; newly colored rows
/// are machine generated and a Cluster column names every row's color.
ClusterResult emit_cluster_sketch(const ClusterAssignment& assignment, const Table& table, const Sketch& original);

ClusterResult run_clustering(
    const Table& table, const Sketch& sketch, const FeatureOverrides& overrides = {}, unsigned seed = 0);

} // namespace sketchsci::cluster
