#include "sgm/drift.hpp"

#include "sgm/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace sgm {

DriftField::DriftField(std::string label, std::size_t dim, Function fn)
    : label_(std::move(label)), dim_(dim), fn_(std::move(fn))
{
    if (dim == 0 || !fn_) {
        throw std::invalid_argument("DriftField: need dim >= 1 and a callable");
    }
}

void DriftField::evaluate(std::size_t k, std::span<const double> x, std::span<double> out) const
{
    if (x.size() != dim_ || out.size() != dim_) {
        throw std::invalid_argument("DriftField '" + label_ + "': dimension mismatch");
    }
    fn_(k, x, out);
    for (double v : out) {
        if (!std::isfinite(v)) throw NumericError("DriftField '" + label_ + "': non-finite drift");
    }
}

std::vector<double> DriftField::operator()(std::size_t k, std::span<const double> x) const
{
    std::vector<double> out(dim_);
    evaluate(k, x, out);
    return out;
}

DriftField DriftField::ou(std::size_t dim)
{
    return DriftField("ou", dim, [](std::size_t, std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
    });
}

DriftField DriftField::reverse(ScoreModel score, TimeGrid grid)
{
    auto shared = std::make_shared<const ScoreModel>(std::move(score));
    const std::string label = shared->is_exact() ? "reverse_exact" : "reverse_perturbed";
    const std::size_t d = shared->dim();
    Function fn = [shared, grid](std::size_t k, std::span<const double> x, std::span<double> out) {
        shared->evaluate(grid.reverse_time(k), x, out);
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + 2.0 * out[i];
    };
    if (shared->affine_at(grid.horizon())) {
        // Gaussian data: b_k(x) = (1 + 2 slope_k) x + 2 intercept_k, tabulated once per grid step
        // so the hot loop skips the exponentials.
        auto gain = std::make_shared<std::vector<double>>((grid.steps() + 1) * d);
        auto bias = std::make_shared<std::vector<double>>((grid.steps() + 1) * d);
        for (std::size_t k = 0; k <= grid.steps(); ++k) {
            const AffineScore a = *shared->affine_at(grid.reverse_time(k));
            for (std::size_t i = 0; i < d; ++i) {
                (*gain)[k * d + i] = 1.0 + 2.0 * a.slope[i];
                (*bias)[k * d + i] = 2.0 * a.intercept[i];
            }
        }
        fn = [gain, bias, d, last = grid.steps()](std::size_t k, std::span<const double> x, std::span<double> out) {
            if (k > last) throw std::invalid_argument("reverse drift: step index past the grid");
            const double* g = gain->data() + k * d;
            const double* c = bias->data() + k * d;
            for (std::size_t i = 0; i < d; ++i) out[i] = g[i] * x[i] + c[i];
        };
    }
    DriftField drift(label, d, std::move(fn));
    drift.grid_ = grid;
    drift.score_ = std::move(shared);
    return drift;
}

DriftField DriftField::constant(std::vector<double> value)
{
    const std::size_t dim = value.size();
    return DriftField("constant", dim, [value = std::move(value)](std::size_t, std::span<const double>,
                                                                  std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = value[i];
    });
}

DriftField DriftField::shifted(const DriftField& base, std::vector<double> shift)
{
    if (shift.size() != base.dim()) {
        throw std::invalid_argument("DriftField::shifted: dimension mismatch");
    }
    DriftField drift(base.label() + "_shifted", base.dim(),
                     [base, shift = std::move(shift)](std::size_t k, std::span<const double> x,
                                                      std::span<double> out) {
                         base.evaluate(k, x, out);
                         for (std::size_t i = 0; i < out.size(); ++i) out[i] += shift[i];
                     });
    drift.grid_ = base.grid_;
    return drift;
}

} // namespace sgm
