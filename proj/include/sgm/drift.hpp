#pragma once

#include "sgm/score.hpp"
#include "sgm/time_grid.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sgm {

/// Time-indexed drift b_{kh}(x). Evaluation is deterministic and must return finite values for
/// finite input; NumericError is thrown otherwise.
class DriftField {
public:
    using Function = std::function<void(std::size_t k, std::span<const double> x, std::span<double> out)>;

    DriftField(std::string label, std::size_t dim, Function fn);

    const std::string& label() const noexcept { return label_; }
    std::size_t dim() const noexcept { return dim_; }

    void evaluate(std::size_t k, std::span<const double> x, std::span<double> out) const;
    std::vector<double> operator()(std::size_t k, std::span<const double> x) const;

    /// Grid the drift is tied to (reverse drifts index scores by T - kh), if any.
    const std::optional<TimeGrid>& grid() const noexcept { return grid_; }
    /// Score behind a reverse drift; the exponential-integrator stepper needs it.
    const ScoreModel* score() const noexcept { return score_.get(); }

    /// Forward OU drift b(x) = -x.
    static DriftField ou(std::size_t dim);
    /// Reverse-SDE drift b_k(x) = x + 2 score(T - kh, x).
    static DriftField reverse(ScoreModel score, TimeGrid grid);
    /// Constant drift b_k(x) = value.
    static DriftField constant(std::vector<double> value);
    /// base plus a constant vector, keeping base's grid and score metadata.
    static DriftField shifted(const DriftField& base, std::vector<double> shift);

private:
    std::string label_;
    std::size_t dim_;
    Function fn_;
    std::optional<TimeGrid> grid_;
    std::shared_ptr<const ScoreModel> score_;
};

} // namespace sgm
