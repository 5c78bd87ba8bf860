#include "sketchsci/predict.hpp"

#include "sketchsci/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace sketchsci::predict {

namespace {

    bool all_numbers(const std::vector<CellValue>& xs)
    {
        return std::all_of(xs.begin(), xs.end(), [](const CellValue& v) { return v.is_number(); });
    }

    std::vector<CellValue> feature_column(const TrainingSet& data, std::size_t f)
    {
        std::vector<CellValue> out;
        for (const auto& row : data.x)
            out.push_back(row[f]);
        return out;
    }

    /// Most frequent label; ties go to the smallest value.
    CellValue majority(const std::vector<CellValue>& labels, const std::vector<std::size_t>& rows)
    {
        std::map<CellValue, std::size_t> counts;
        for (auto r : rows)
            ++counts[labels[r]];
        auto best = std::max_element(counts.begin(), counts.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
        return best->first;
    }

    double mean_of(const std::vector<CellValue>& labels, const std::vector<std::size_t>& rows)
    {
        double sum = 0;
        for (auto r : rows)
            sum += labels[r].number();
        return sum / static_cast<double>(rows.size());
    }

    std::vector<std::size_t> all_rows(std::size_t n)
    {
        std::vector<std::size_t> out(n);
        std::iota(out.begin(), out.end(), 0);
        return out;
    }

    class Baseline : public Learner {
    public:
        explicit Baseline(bool numeric) : numeric_(numeric) {}
        void fit(const TrainingSet& data) override
        {
            auto rows = all_rows(data.y.size());
            value_ = numeric_ ? CellValue(mean_of(data.y, rows)) : majority(data.y, rows);
        }
        CellValue predict(const std::vector<CellValue>&) const override { return value_; }

    private:
        bool numeric_;
        CellValue value_;
    };

    /// Per-feature scaling shared by the nearest-neighbour and tree learners.
    struct FeatureInfo {
        bool numeric = false;
        double range = 0;
    };

    std::vector<FeatureInfo> describe_features(const TrainingSet& data)
    {
        std::vector<FeatureInfo> out;
        std::size_t width = data.x.empty() ? 0 : data.x.front().size();
        for (std::size_t f = 0; f < width; ++f) {
            auto column = feature_column(data, f);
            FeatureInfo info;
            info.numeric = all_numbers(column);
            if (info.numeric && !column.empty()) {
                auto [lo, hi] = std::minmax_element(column.begin(), column.end(),
                    [](const CellValue& a, const CellValue& b) { return a.number() < b.number(); });
                info.range = hi->number() - lo->number();
            }
            out.push_back(info);
        }
        return out;
    }

    class Knn : public Learner {
    public:
        explicit Knn(bool numeric) : numeric_(numeric) {}
        void fit(const TrainingSet& data) override
        {
            data_ = data;
            features_ = describe_features(data);
        }
        CellValue predict(const std::vector<CellValue>& x) const override
        {
            const std::size_t n = data_.y.size();
            std::vector<std::pair<double, std::size_t>> by_distance;
            for (std::size_t i = 0; i < n; ++i)
                by_distance.push_back({distance(x, data_.x[i]), i});
            std::stable_sort(by_distance.begin(), by_distance.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
            std::size_t k = std::min<std::size_t>(3, n);
            if (numeric_) {
                double sum = 0;
                for (std::size_t i = 0; i < k; ++i)
                    sum += data_.y[by_distance[i].second].number();
                return sum / static_cast<double>(k);
            }
            std::map<CellValue, std::pair<std::size_t, double>> votes;
            for (std::size_t i = 0; i < k; ++i) {
                auto& vote = votes[data_.y[by_distance[i].second]];
                ++vote.first;
                vote.second += by_distance[i].first;
            }
            auto best = votes.begin();
            for (auto it = votes.begin(); it != votes.end(); ++it)
                if (it->second.first > best->second.first
                    || (it->second.first == best->second.first && it->second.second < best->second.second))
                    best = it;
            return best->first;
        }

    private:
        double distance(const std::vector<CellValue>& a, const std::vector<CellValue>& b) const
        {
            if (features_.empty())
                return 0;
            double total = 0;
            for (std::size_t f = 0; f < features_.size(); ++f) {
                if (features_[f].numeric && a[f].is_number() && b[f].is_number())
                    total += features_[f].range > 0
                        ? std::min(1.0, std::abs(a[f].number() - b[f].number()) / features_[f].range)
                        : 0.0;
                else
                    total += a[f] == b[f] ? 0.0 : 1.0;
            }
            return total / static_cast<double>(features_.size());
        }

        bool numeric_;
        TrainingSet data_;
        std::vector<FeatureInfo> features_;
    };

    /// Least squares with an intercept over numeric inputs and one-hot
    /// encoded categorical inputs; minimum-norm when rank deficient.
    class Linear : public Learner {
    public:
        void fit(const TrainingSet& data) override
        {
            features_ = describe_features(data);
            categories_.assign(features_.size(), {});
            for (std::size_t f = 0; f < features_.size(); ++f)
                if (!features_[f].numeric)
                    for (const auto& v : feature_column(data, f))
                        categories_[f].insert(v);
            const auto n = static_cast<Eigen::Index>(data.y.size());
            Eigen::MatrixXd design(n, static_cast<Eigen::Index>(width()));
            Eigen::VectorXd target(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                design.row(i) = encode(data.x[static_cast<std::size_t>(i)]).transpose();
                target(i) = data.y[static_cast<std::size_t>(i)].number();
            }
            coefficients_ = design.completeOrthogonalDecomposition().solve(target);
        }
        CellValue predict(const std::vector<CellValue>& x) const override { return encode(x).dot(coefficients_); }

    private:
        std::size_t width() const
        {
            std::size_t w = 1;
            for (std::size_t f = 0; f < features_.size(); ++f)
                w += features_[f].numeric ? 1 : categories_[f].size();
            return w;
        }
        Eigen::VectorXd encode(const std::vector<CellValue>& x) const
        {
            Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width()));
            out(0) = 1;
            Eigen::Index at = 1;
            for (std::size_t f = 0; f < features_.size(); ++f) {
                if (features_[f].numeric) {
                    out(at++) = x[f].is_number() ? x[f].number() : 0.0;
                    continue;
                }
                for (const auto& category : categories_[f])
                    out(at++) = x[f] == category ? 1.0 : 0.0;
            }
            return out;
        }

        std::vector<FeatureInfo> features_;
        std::vector<std::set<CellValue>> categories_;
        Eigen::VectorXd coefficients_;
    };

    /// Depth-limited tree with exhaustive threshold / equality split search.
    class Tree : public Learner {
    public:
        explicit Tree(bool numeric) : numeric_(numeric) {}
        void fit(const TrainingSet& data) override
        {
            data_ = &data;
            features_ = describe_features(data);
            nodes_.clear();
            build(all_rows(data.y.size()), 0);
            data_ = nullptr;
        }
        CellValue predict(const std::vector<CellValue>& x) const override
        {
            std::size_t at = 0;
            while (!nodes_[at].leaf) {
                const auto& node = nodes_[at];
                const auto& v = x[node.feature];
                bool left = node.numeric ? (v.is_number() && v.number() <= node.threshold) : v == node.category;
                at = left ? node.left : node.right;
            }
            return nodes_[at].value;
        }

    private:
        static constexpr int max_depth = 3;

        struct Node {
            bool leaf = true;
            CellValue value;
            std::size_t feature = 0;
            bool numeric = false;
            double threshold = 0;
            CellValue category;
            std::size_t left = 0, right = 0;
        };

        double impurity(const std::vector<std::size_t>& rows) const
        {
            if (rows.empty())
                return 0;
            if (numeric_) {
                double mean = mean_of(data_->y, rows), sse = 0;
                for (auto r : rows)
                    sse += std::pow(data_->y[r].number() - mean, 2);
                return sse;
            }
            std::map<CellValue, std::size_t> counts;
            for (auto r : rows)
                ++counts[data_->y[r]];
            double n = static_cast<double>(rows.size()), gini = 1;
            for (const auto& [label, count] : counts)
                gini -= std::pow(static_cast<double>(count) / n, 2);
            return gini * n;
        }

        std::size_t build(const std::vector<std::size_t>& rows, int depth)
        {
            std::size_t index = nodes_.size();
            nodes_.emplace_back();
            nodes_[index].value = numeric_ ? CellValue(mean_of(data_->y, rows)) : majority(data_->y, rows);
            double parent = impurity(rows);
            if (depth >= max_depth || rows.size() < 2 || parent <= 1e-12)
                return index;

            struct Split {
                double cost;
                std::size_t feature;
                bool numeric;
                double threshold;
                CellValue category;
            };
            std::optional<Split> best;
            const auto partition = [&](const auto& goes_left) {
                std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
                for (auto r : rows)
                    (goes_left(r) ? out.first : out.second).push_back(r);
                return out;
            };
            const auto consider = [&](Split split, const auto& goes_left) {
                auto [left, right] = partition(goes_left);
                if (left.empty() || right.empty())
                    return;
                split.cost = impurity(left) + impurity(right);
                if (split.cost < parent - 1e-12 && (!best || split.cost < best->cost - 1e-12))
                    best = split;
            };
            for (std::size_t f = 0; f < features_.size(); ++f) {
                if (features_[f].numeric) {
                    std::set<double> values;
                    for (auto r : rows)
                        values.insert(data_->x[r][f].number());
                    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
                        double threshold = (*it + *std::next(it)) / 2;
                        consider(Split{0, f, true, threshold, {}},
                            [&](std::size_t r) { return data_->x[r][f].number() <= threshold; });
                    }
                } else {
                    std::set<CellValue> values;
                    for (auto r : rows)
                        values.insert(data_->x[r][f]);
                    for (const auto& v : values)
                        consider(Split{0, f, false, 0, v}, [&](std::size_t r) { return data_->x[r][f] == v; });
                }
            }
            if (!best)
                return index;
            auto [left, right] = best->numeric
                ? partition([&](std::size_t r) { return data_->x[r][best->feature].number() <= best->threshold; })
                : partition([&](std::size_t r) { return data_->x[r][best->feature] == best->category; });
            std::size_t l = build(left, depth + 1);
            std::size_t r = build(right, depth + 1);
            auto& node = nodes_[index];
            node.leaf = false;
            node.feature = best->feature;
            node.numeric = best->numeric;
            node.threshold = best->threshold;
            node.category = best->category;
            node.left = l;
            node.right = r;
            return index;
        }

        bool numeric_;
        const TrainingSet* data_ = nullptr;
        std::vector<FeatureInfo> features_;
        std::vector<Node> nodes_;
    };

    std::size_t index_of(const std::vector<CellValue>& classes, const CellValue& v)
    {
        return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), v) - classes.begin());
    }

    bool contains(const std::vector<CellValue>& classes, const CellValue& v)
    {
        return std::binary_search(classes.begin(), classes.end(), v);
    }

} // namespace

std::string_view to_string(Family family)
{
    switch (family) {
    case Family::baseline:
        return "Baseline";
    case Family::knn:
        return "KNN";
    case Family::linear:
        return "LinearLSQ";
    case Family::tree:
        return "Tree";
    }
    return "?";
}

std::unique_ptr<Learner> make_learner(Family family, bool numeric_target)
{
    switch (family) {
    case Family::baseline:
        return std::make_unique<Baseline>(numeric_target);
    case Family::knn:
        return std::make_unique<Knn>(numeric_target);
    case Family::linear:
        if (!numeric_target)
            throw Error(ErrorCode::invalid_arguments, "least squares needs a numeric target");
        return std::make_unique<Linear>();
    case Family::tree:
        return std::make_unique<Tree>(numeric_target);
    }
    throw Error(ErrorCode::invalid_arguments, "unknown model family");
}

PredictionTask derive_prediction_task(
    const Workbook& workbook, const Sketch& sketch, const std::optional<std::string>& table)
{
    require_roles(sketch, {Role::input, Role::target, Role::exclude}, "predict");
    std::set<std::string> painted;
    for (const auto& coloring : sketch.colorings)
        for (const auto& cell : coloring.cells)
            painted.insert(cell.table);
    if (painted.size() > 1)
        throw Error(ErrorCode::validation, "a prediction sketch must stay within one table",
            std::to_string(painted.size()) + " tables colored");

    PredictionTask task;
    if (!painted.empty()) {
        task.table = *painted.begin();
    } else if (table) {
        task.table = *table;
    } else {
        for (const auto& t : workbook.tables()) {
            bool missing = std::any_of(t.rows().begin(), t.rows().end(), [](const Row& row) {
                return std::any_of(row.begin(), row.end(), [](const CellValue& c) { return c.is_missing(); });
            });
            if (missing) {
                task.table = t.name();
                break;
            }
        }
        if (task.table.empty() && !workbook.tables().empty())
            task.table = workbook.tables().front().name();
    }
    const auto* t = workbook.find(task.table);
    if (!t)
        throw Error(ErrorCode::not_found, "no such table", task.table);

    std::set<std::size_t> inputs, targets;
    for (const auto& coloring : sketch.colorings)
        for (const auto& cell : coloring.cells) {
            if (coloring.role == Role::input)
                inputs.insert(cell.col);
            else if (coloring.role == Role::target)
                targets.insert(cell.col);
            else
                task.excluded_rows.insert(cell.row);
        }
    for (auto c : inputs)
        if (targets.count(c))
            throw Error(ErrorCode::validation, "a column cannot be both input and target", t->header().at(c));

    if (targets.empty())
        for (std::size_t c = 0; c < t->col_count(); ++c) {
            auto column = t->column(c);
            if (!inputs.count(c)
                && std::any_of(column.begin(), column.end(), [](const CellValue& v) { return v.is_missing(); }))
                targets.insert(c);
        }
    if (targets.empty())
        throw Error(ErrorCode::validation, "nothing to predict", "no target column and no Missing cell in " + task.table);
    if (inputs.empty())
        for (std::size_t c = 0; c < t->col_count(); ++c)
            if (!targets.count(c))
                inputs.insert(c);

    for (auto c : targets) {
        std::size_t observed = 0;
        for (std::size_t r = 0; r < t->row_count(); ++r)
            if (!task.excluded_rows.count(r) && t->at(r, c).is_observed())
                ++observed;
        if (observed == 0)
            throw Error(ErrorCode::untrainable_target, "target column has no observed value", t->header()[c]);
        task.loss[c] = t->col_types()[c] == TypeTag::numeric ? Loss::rmse : Loss::accuracy;
    }
    task.input_cols.assign(inputs.begin(), inputs.end());
    task.target_cols.assign(targets.begin(), targets.end());
    return task;
}

double CalibrationMap::probability(const CellValue& truth, const CellValue& predicted) const
{
    if (!contains(classes, truth))
        return 0;
    if (!contains(classes, predicted))
        return 1.0 / static_cast<double>(classes.size());
    return matrix[index_of(classes, predicted)][index_of(classes, truth)];
}

CalibrationMap calibrate(
    const LearnerFactory& factory, const TrainingSet& data, bool numeric_target, std::vector<CellValue> classes)
{
    const std::size_t n = data.y.size();
    if (n < 2)
        throw Error(ErrorCode::insufficient_data, "calibration needs at least two rows");

    std::vector<CellValue> loo;
    for (std::size_t i = 0; i < n; ++i) {
        TrainingSet rest;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) {
                rest.x.push_back(data.x[j]);
                rest.y.push_back(data.y[j]);
            }
        auto model = factory();
        model->fit(rest);
        loo.push_back(model->predict(data.x[i]));
    }

    CalibrationMap map;
    map.classifier = !numeric_target;
    if (numeric_target) {
        std::vector<double> residuals;
        for (std::size_t i = 0; i < n; ++i)
            residuals.push_back(data.y[i].number() - loo[i].number());
        double sum = std::accumulate(residuals.begin(), residuals.end(), 0.0);
        map.bias = sum / static_cast<double>(n);
        double squares = 0, spread = 0;
        for (double r : residuals) {
            squares += r * r;
            spread += (r - map.bias) * (r - map.bias);
        }
        map.sigma = n >= 2 ? std::sqrt(spread / static_cast<double>(n - 1)) : 0.0;
        map.loo_score = 1.0 / (1.0 + std::sqrt(squares / static_cast<double>(n)));
        return map;
    }

    for (const auto& y : data.y)
        classes.push_back(y);
    for (const auto& p : loo)
        classes.push_back(p);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const std::size_t c = classes.size();
    std::vector<std::vector<double>> counts(c, std::vector<double>(c, 0.0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ++counts[index_of(classes, loo[i])][index_of(classes, data.y[i])];
        correct += loo[i] == data.y[i];
    }
    map.classes = classes;
    map.matrix.assign(c, std::vector<double>(c, 0.0));
    for (std::size_t p = 0; p < c; ++p) {
        double row = std::accumulate(counts[p].begin(), counts[p].end(), 0.0);
        for (std::size_t t = 0; t < c; ++t)
            map.matrix[p][t] = (counts[p][t] + 1) / (row + static_cast<double>(c));
    }
    map.loo_score = static_cast<double>(correct) / static_cast<double>(n);
    return map;
}

Ensemble train_ensemble(const Table& table, const PredictionTask& task, std::size_t target, const EnsembleConfig& cfg)
{
    if (cfg.m < 5 || cfg.m > 10)
        throw Error(ErrorCode::configuration, "ensemble size must be between 5 and 10", std::to_string(cfg.m));
    if (target >= table.col_count())
        throw Error(ErrorCode::invalid_arguments, "target column out of range", std::to_string(target + 1));

    Ensemble ensemble;
    ensemble.table = table.name();
    ensemble.target = target;
    ensemble.target_name = table.header()[target];
    ensemble.numeric = table.col_types()[target] == TypeTag::numeric;
    ensemble.column_names = table.header();

    std::vector<std::size_t> base;
    for (std::size_t r = 0; r < table.row_count(); ++r)
        if (!task.excluded_rows.count(r) && table.at(r, target).is_observed())
            base.push_back(r);
    if (base.size() < 3)
        throw Error(ErrorCode::insufficient_data, "not enough trainable rows",
            ensemble.target_name + ": " + std::to_string(base.size()) + " rows, need 3");
    ensemble.integral = ensemble.numeric && std::all_of(base.begin(), base.end(), [&](std::size_t r) {
        double v = table.at(r, target).number();
        return v == std::floor(v);
    });

    std::vector<std::size_t> inputs;
    for (auto c : task.input_cols)
        if (c != target)
            inputs.push_back(c);
    std::vector<CellValue> classes;
    if (!ensemble.numeric) {
        for (auto r : base)
            classes.push_back(table.at(r, target));
        std::sort(classes.begin(), classes.end());
        classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    }

    std::vector<Family> cycle = ensemble.numeric
        ? std::vector<Family>{Family::baseline, Family::knn, Family::linear, Family::tree}
        : std::vector<Family>{Family::baseline, Family::knn, Family::tree};
    std::seed_seq seq{cfg.seed, static_cast<unsigned>(target)};
    std::mt19937_64 rng(seq);

    for (std::size_t i = 0; i < cfg.m; ++i) {
        Member member;
        member.family = cycle[i % cycle.size()];
        if (!inputs.empty()) {
            // uniform over the non-empty subsets
            std::vector<bool> chosen(inputs.size(), false);
            do {
                for (std::size_t b = 0; b < inputs.size(); ++b)
                    chosen[b] = rng() & 1u;
            } while (std::none_of(chosen.begin(), chosen.end(), [](bool x) { return x; }));
            for (std::size_t b = 0; b < inputs.size(); ++b)
                if (chosen[b])
                    member.inputs.push_back(inputs[b]);
        }

        std::vector<std::size_t> rows;
        for (auto r : base)
            if (std::all_of(member.inputs.begin(), member.inputs.end(),
                    [&](std::size_t c) { return table.at(r, c).is_observed(); }))
                rows.push_back(r);
        if (rows.size() < 3 || member.inputs.empty()) {
            member.family = Family::baseline;
            rows = base;
        }

        TrainingSet data;
        for (auto r : rows) {
            std::vector<CellValue> x;
            for (auto c : member.inputs)
                x.push_back(table.at(r, c));
            data.x.push_back(std::move(x));
            data.y.push_back(table.at(r, target));
        }
        auto family = member.family;
        bool numeric = ensemble.numeric;
        LearnerFactory factory = [family, numeric] { return make_learner(family, numeric); };
        member.calibration = calibrate(factory, data, numeric, classes);
        auto model = factory();
        model->fit(data);
        member.model = std::move(model);
        ensemble.members.push_back(std::move(member));
    }

    double total = 0;
    for (const auto& member : ensemble.members)
        total += member.calibration.loo_score;
    for (auto& member : ensemble.members)
        member.weight = total > 0 ? member.calibration.loo_score / total : 1.0 / static_cast<double>(cfg.m);
    return ensemble;
}

std::vector<Candidate> predict_candidates(const Ensemble& ensemble, const Row& row, double min_weight)
{
    struct Vote {
        CellValue predicted;
        const Member* member;
    };
    std::vector<Vote> votes;
    for (const auto& member : ensemble.members) {
        if (member.weight < min_weight)
            continue;
        bool available = std::all_of(
            member.inputs.begin(), member.inputs.end(), [&](std::size_t c) { return row.at(c).is_observed(); });
        if (!available)
            continue;
        std::vector<CellValue> x;
        for (auto c : member.inputs)
            x.push_back(row.at(c));
        votes.push_back({member.model->predict(x), &member});
    }
    if (votes.empty())
        throw Error(ErrorCode::no_prediction, "every ensemble member abstains", ensemble.target_name);

    std::vector<Candidate> out;
    if (!ensemble.numeric) {
        const auto& classes = votes.front().member->calibration.classes;
        for (const auto& value : classes) {
            double score = 0;
            for (const auto& vote : votes)
                score += vote.member->weight * vote.member->calibration.probability(value, vote.predicted);
            out.push_back({value, score});
        }
        std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
            if (a.score != b.score)
                return a.score > b.score;
            return a.value.display() < b.value.display();
        });
        return out;
    }

    struct Numeric {
        double value, score, sigma;
    };
    std::vector<Numeric> merged;
    for (const auto& vote : votes) {
        Numeric v{vote.predicted.number() + vote.member->calibration.bias, vote.member->weight,
            vote.member->calibration.sigma};
        auto near = std::find_if(merged.begin(), merged.end(),
            [&](const Numeric& m) { return std::abs(m.value - v.value) <= 0.5 * std::min(m.sigma, v.sigma); });
        if (near == merged.end()) {
            merged.push_back(v);
            continue;
        }
        double score = near->score + v.score;
        near->value = score > 0 ? (near->value * near->score + v.value * v.score) / score : near->value;
        near->score = score;
        near->sigma = std::min(near->sigma, v.sigma);
    }
    std::map<double, double> scores;
    for (const auto& m : merged)
        scores[ensemble.integral ? std::round(m.value) : m.value] += m.score;
    for (const auto& [value, score] : scores)
        out.push_back({CellValue(value), score});
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    return out;
}

Json ensemble_to_json(const Ensemble& ensemble)
{
    Json members = Json::array();
    for (const auto& member : ensemble.members) {
        Json inputs = Json::array();
        for (auto c : member.inputs)
            inputs.push_back(ensemble.column_names.at(c));
        members.push_back({{"family", std::string(to_string(member.family))}, {"inputs", inputs},
            {"loo_score", member.calibration.loo_score}, {"weight", member.weight}});
    }
    return {{"table", ensemble.table}, {"target", ensemble.target_name},
        {"kind", ensemble.numeric ? "regression" : "classification"}, {"members", members}};
}

} // namespace sketchsci::predict
