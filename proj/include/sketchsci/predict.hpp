#pragma once

#include "sketchsci/io.hpp"
#include "sketchsci/sketch.hpp"
#include "sketchsci/workbook.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sketchsci::predict {

enum class Loss { rmse, accuracy };

struct PredictionTask {
    std::string table;
    std::vector<std::size_t> input_cols;
    std::vector<std::size_t> target_cols;
    std::set<std::size_t> excluded_rows;
    std::map<std::size_t, Loss> loss; ///< per target column
};

/// Green inputs, blue targets, red excluded rows. Without targets every
/// column holding a Missing cell is a target; without inputs every other
/// column is an input. `table` picks the table when nothing is colored.
PredictionTask derive_prediction_task(
    const Workbook& workbook, const Sketch& sketch, const std::optional<std::string>& table = std::nullopt);

/// Rows of feature values (one per chosen input column) and their labels.
struct TrainingSet {
    std::vector<std::vector<CellValue>> x;
    std::vector<CellValue> y;
};

class Learner {
public:
    virtual ~Learner() = default;
    virtual void fit(const TrainingSet& data) = 0;
    virtual CellValue predict(const std::vector<CellValue>& x) const = 0;
};

using LearnerFactory = std::function<std::unique_ptr<Learner>()>;

enum class Family { baseline, knn, linear, tree };

std::string_view to_string(Family family);

std::unique_ptr<Learner> make_learner(Family family, bool numeric_target);

struct CalibrationMap {
    bool classifier = true;
    std::vector<CellValue> classes;          ///< sorted
    std::vector<std::vector<double>> matrix; ///< [predicted][true] = P(true | predicted)
    double bias = 0;
    double sigma = 0;
    double loo_score = 0; ///< accuracy, or 1 / (1 + RMSE)

    /// P(true = value | predicted); uniform for an unseen prediction.
    double probability(const CellValue& truth, const CellValue& predicted) const;
};

/// Leave-one-out predictions give the confusion matrix with add-one
/// smoothing (classifiers) or the residual bias and spread (regressors).
CalibrationMap calibrate(
    const LearnerFactory& factory, const TrainingSet& data, bool numeric_target, std::vector<CellValue> classes = {});

struct Member {
    Family family = Family::baseline;
    std::vector<std::size_t> inputs;
    std::shared_ptr<const Learner> model;
    CalibrationMap calibration;
    double weight = 0;
};

struct Ensemble {
    std::string table;
    std::size_t target = 0;
    std::string target_name;
    bool numeric = false;
    bool integral = false; ///< every training label is a whole number
    std::vector<std::string> column_names;
    std::vector<Member> members;
};

struct EnsembleConfig {
    std::size_t m = 7;
    unsigned seed = 0;
};

/// m members over seeded random input subsets; weights are normalized
/// leave-one-out scores. Throws insufficient-data below 3 trainable rows.
Ensemble train_ensemble(const Table& table, const PredictionTask& task, std::size_t target, const EnsembleConfig& cfg = {});

struct Candidate {
    CellValue value;
    double score = 0;
};

/// Weighted votes of the members whose inputs are observed in `row` and
/// whose weight reaches `min_weight`; best first. Throws no-prediction when
/// every member abstains.
std::vector<Candidate> predict_candidates(const Ensemble& ensemble, const Row& row, double min_weight = 0);

/// Per member: family, input columns, leave-one-out score, weight.
Json ensemble_to_json(const Ensemble& ensemble);

} // namespace sketchsci::predict
