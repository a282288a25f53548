#pragma once

// Dense two-phase revised simplex with an explicit basis inverse.
//
// Problems are rewritten into standard form (min c'x, Ax = b, b >= 0, x >= 0):
// finite lower bounds are shifted out, upper-only variables are mirrored, free
// variables are split, and finite upper bounds become extra rows. Fixed
// variables (lower == upper) are substituted away, which is how branch-and-bound
// fixings reach the solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dea/error.hpp"

namespace dea::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };
enum class Direction { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
    }
    return "?";
}

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInfinity;
};

struct Constraint {
    std::vector<double> coefficients;
    Sense sense = Sense::Equal;
    double rhs = 0.0;
};

struct LinearProgram {
    std::vector<Variable> variables;
    std::vector<Constraint> constraints;
    Direction direction = Direction::Minimize;
    std::vector<double> objective;

    std::size_t num_variables() const noexcept { return variables.size(); }
    std::size_t num_constraints() const noexcept { return constraints.size(); }

    /// Appends a variable; existing rows are padded with a zero coefficient.
    std::size_t add_variable(std::string name, double lower = 0.0, double upper = kInfinity,
                             double cost = 0.0) {
        variables.push_back({std::move(name), lower, upper});
        objective.resize(variables.size(), 0.0);
        objective.back() = cost;
        for (auto& c : constraints) {
            c.coefficients.resize(variables.size(), 0.0);
        }
        return variables.size() - 1;
    }

    std::size_t add_constraint(const std::vector<std::pair<std::size_t, double>>& terms, Sense sense,
                               double rhs) {
        Constraint c;
        c.coefficients.assign(variables.size(), 0.0);
        for (auto [j, a] : terms) {
            c.coefficients.at(j) += a;
        }
        c.sense = sense;
        c.rhs = rhs;
        constraints.push_back(std::move(c));
        return constraints.size() - 1;
    }

    /// Structural problems: row lengths, crossed bounds, non-finite data.
    std::vector<std::string> check() const {
        std::vector<std::string> out;
        if (objective.size() != variables.size()) {
            out.push_back("objective length differs from variable count");
        }
        for (std::size_t j = 0; j < variables.size(); ++j) {
            const auto& v = variables[j];
            if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper ||
                v.lower == kInfinity || v.upper == -kInfinity) {
                out.push_back("variable " + std::to_string(j) + " ('" + v.name + "') has invalid bounds");
            }
        }
        for (std::size_t i = 0; i < constraints.size(); ++i) {
            const auto& c = constraints[i];
            if (c.coefficients.size() != variables.size()) {
                out.push_back("constraint " + std::to_string(i) + " row length differs from variable count");
            }
            bool finite = std::isfinite(c.rhs);
            for (double a : c.coefficients) {
                finite = finite && std::isfinite(a);
            }
            if (!finite) {
                out.push_back("constraint " + std::to_string(i) + " has non-finite data");
            }
        }
        for (double c : objective) {
            if (!std::isfinite(c)) {
                out.push_back("objective has non-finite coefficients");
                break;
            }
        }
        return out;
    }
};

struct Tolerances {
    double feasibility = 1e-7;
    double optimality = 1e-7;
    double pivot = 1e-9;
};

struct Solution {
    Status status = Status::Infeasible;
    std::vector<double> primal;
    /// One multiplier per original constraint, sign convention of the original
    /// objective direction (d objective / d rhs).
    std::vector<double> dual;
    double objective = 0.0;
    double dual_objective = 0.0;
    /// Standard-form column indices of the final basis, in row order.
    std::vector<std::size_t> basis;
    std::size_t iterations = 0;
};

namespace detail {

enum class MapKind { Shift, Mirror, Split, Fixed };

struct VariableMap {
    MapKind kind = MapKind::Shift;
    std::size_t column = 0;
    std::size_t negative_column = 0;
    double offset = 0.0;
};

// Standard-form data in column-major layout.
struct StandardForm {
    std::size_t rows = 0;
    std::size_t structural = 0;  // shifted/mirrored/split columns
    std::size_t columns = 0;     // structural + slacks
    std::vector<double> a;       // columns * rows
    std::vector<double> b;
    std::vector<double> c;
    std::vector<int> slack_sign;           // per row: +1, -1, or 0 (no slack)
    std::vector<std::size_t> slack_column;
    std::vector<bool> flipped;
    double objective_offset = 0.0;
    std::vector<VariableMap> maps;

    double& at(std::size_t row, std::size_t col) { return a[col * rows + row]; }
    double at(std::size_t row, std::size_t col) const { return a[col * rows + row]; }
};

inline StandardForm standardize(const LinearProgram& p) {
    StandardForm sf;
    const std::size_t n = p.num_variables();
    const double sign = p.direction == Direction::Maximize ? -1.0 : 1.0;
    sf.maps.resize(n);

    std::size_t col = 0;
    std::vector<std::size_t> upper_rows;  // variables needing an x' <= u - l row
    for (std::size_t j = 0; j < n; ++j) {
        const auto& v = p.variables[j];
        auto& mp = sf.maps[j];
        const bool lo = std::isfinite(v.lower);
        const bool up = std::isfinite(v.upper);
        if (lo && up && v.lower == v.upper) {
            mp.kind = MapKind::Fixed;
            mp.offset = v.lower;
        } else if (lo) {
            mp.kind = MapKind::Shift;
            mp.column = col++;
            mp.offset = v.lower;
            if (up) {
                upper_rows.push_back(j);
            }
        } else if (up) {
            mp.kind = MapKind::Mirror;
            mp.column = col++;
            mp.offset = v.upper;
        } else {
            mp.kind = MapKind::Split;
            mp.column = col++;
            mp.negative_column = col++;
        }
    }
    sf.structural = col;
    sf.rows = p.num_constraints() + upper_rows.size();

    // Row data in structural columns, before slacks.
    std::vector<std::vector<double>> rows(sf.rows, std::vector<double>(sf.structural, 0.0));
    std::vector<double> rhs(sf.rows, 0.0);
    std::vector<Sense> senses(sf.rows, Sense::LessEqual);
    for (std::size_t i = 0; i < p.num_constraints(); ++i) {
        const auto& con = p.constraints[i];
        double r = con.rhs;
        for (std::size_t j = 0; j < n; ++j) {
            const double aij = con.coefficients[j];
            if (aij == 0.0) {
                continue;
            }
            const auto& mp = sf.maps[j];
            switch (mp.kind) {
                case MapKind::Fixed: r -= aij * mp.offset; break;
                case MapKind::Shift:
                    rows[i][mp.column] += aij;
                    r -= aij * mp.offset;
                    break;
                case MapKind::Mirror:
                    rows[i][mp.column] -= aij;
                    r -= aij * mp.offset;
                    break;
                case MapKind::Split:
                    rows[i][mp.column] += aij;
                    rows[i][mp.negative_column] -= aij;
                    break;
            }
        }
        rhs[i] = r;
        senses[i] = con.sense;
    }
    for (std::size_t k = 0; k < upper_rows.size(); ++k) {
        const std::size_t i = p.num_constraints() + k;
        const auto& v = p.variables[upper_rows[k]];
        rows[i][sf.maps[upper_rows[k]].column] = 1.0;
        rhs[i] = v.upper - v.lower;
        senses[i] = Sense::LessEqual;
    }

    std::size_t slacks = 0;
    for (auto s : senses) {
        slacks += s == Sense::Equal ? 0 : 1;
    }
    sf.columns = sf.structural + slacks;
    sf.a.assign(sf.columns * sf.rows, 0.0);
    sf.b.assign(sf.rows, 0.0);
    sf.slack_sign.assign(sf.rows, 0);
    sf.slack_column.assign(sf.rows, 0);
    sf.flipped.assign(sf.rows, false);
    std::size_t next_slack = sf.structural;
    for (std::size_t i = 0; i < sf.rows; ++i) {
        const bool flip = rhs[i] < 0.0;
        const double f = flip ? -1.0 : 1.0;
        sf.flipped[i] = flip;
        for (std::size_t c = 0; c < sf.structural; ++c) {
            sf.at(i, c) = f * rows[i][c];
        }
        sf.b[i] = f * rhs[i];
        if (senses[i] != Sense::Equal) {
            const double s = senses[i] == Sense::LessEqual ? 1.0 : -1.0;
            sf.slack_column[i] = next_slack;
            sf.at(i, next_slack) = f * s;
            sf.slack_sign[i] = static_cast<int>(f * s);
            ++next_slack;
        }
    }

    sf.c.assign(sf.columns, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double cj = sign * p.objective[j];
        const auto& mp = sf.maps[j];
        switch (mp.kind) {
            case MapKind::Fixed: sf.objective_offset += cj * mp.offset; break;
            case MapKind::Shift:
                sf.c[mp.column] += cj;
                sf.objective_offset += cj * mp.offset;
                break;
            case MapKind::Mirror:
                sf.c[mp.column] -= cj;
                sf.objective_offset += cj * mp.offset;
                break;
            case MapKind::Split:
                sf.c[mp.column] += cj;
                sf.c[mp.negative_column] -= cj;
                break;
        }
    }
    return sf;
}

class RevisedSimplex {
public:
    RevisedSimplex(const StandardForm& sf, const Tolerances& tol) : sf_(sf), tol_(tol) {
        m_ = sf.rows;
        // Artificial columns are appended for rows without a +1 slack.
        artificial_begin_ = sf.columns;
        basis_.assign(m_, 0);
        std::size_t next = sf.columns;
        for (std::size_t i = 0; i < m_; ++i) {
            if (sf.slack_sign[i] == 1) {
                basis_[i] = sf.slack_column[i];
            } else {
                artificial_row_.push_back(i);
                basis_[i] = next++;
            }
        }
        total_columns_ = next;
        position_.assign(total_columns_, -1);
        for (std::size_t i = 0; i < m_; ++i) {
            position_[basis_[i]] = static_cast<long>(i);
        }
        degenerate_limit_ = 2 * (sf.columns + m_);
        refactor();
    }

    enum class Outcome { Optimal, Unbounded };

    // Phase 1 then phase 2. Returns false when infeasible.
    bool phase_one() {
        if (artificial_row_.empty()) {
            return true;
        }
        std::vector<double> cost(total_columns_, 0.0);
        for (std::size_t k = artificial_begin_; k < total_columns_; ++k) {
            cost[k] = 1.0;
        }
        run(cost, /*allow_artificial=*/true);
        double infeasibility = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] >= artificial_begin_) {
                infeasibility += std::max(0.0, x_basic_[i]);
            }
        }
        double bnorm = 0.0;
        for (double v : sf_.b) {
            bnorm = std::max(bnorm, std::abs(v));
        }
        if (infeasibility > tol_.feasibility * (1.0 + bnorm)) {
            return false;
        }
        drive_out_artificials();
        return true;
    }

    Outcome phase_two() {
        std::vector<double> cost(total_columns_, 0.0);
        std::copy(sf_.c.begin(), sf_.c.end(), cost.begin());
        return run(cost, /*allow_artificial=*/false);
    }

    void refactor() {
        // Gauss-Jordan inversion of the basis matrix with partial pivoting.
        std::vector<double> work(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t r = 0; r < m_; ++r) {
                work[r * m_ + i] = column_entry(basis_[i], r);
            }
        }
        inverse_.assign(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            inverse_[i * m_ + i] = 1.0;
        }
        for (std::size_t k = 0; k < m_; ++k) {
            std::size_t piv = k;
            for (std::size_t r = k + 1; r < m_; ++r) {
                if (std::abs(work[r * m_ + k]) > std::abs(work[piv * m_ + k])) {
                    piv = r;
                }
            }
            if (std::abs(work[piv * m_ + k]) < 1e-13) {
                throw NumericalError("simplex basis became singular during refactorization");
            }
            if (piv != k) {
                for (std::size_t c = 0; c < m_; ++c) {
                    std::swap(work[k * m_ + c], work[piv * m_ + c]);
                    std::swap(inverse_[k * m_ + c], inverse_[piv * m_ + c]);
                }
            }
            const double inv = 1.0 / work[k * m_ + k];
            for (std::size_t c = 0; c < m_; ++c) {
                work[k * m_ + c] *= inv;
                inverse_[k * m_ + c] *= inv;
            }
            for (std::size_t r = 0; r < m_; ++r) {
                if (r == k) {
                    continue;
                }
                const double f = work[r * m_ + k];
                if (f == 0.0) {
                    continue;
                }
                for (std::size_t c = 0; c < m_; ++c) {
                    work[r * m_ + c] -= f * work[k * m_ + c];
                    inverse_[r * m_ + c] -= f * inverse_[k * m_ + c];
                }
            }
        }
        // Row swaps above permute rows of B^-1 correctly because they were
        // applied to [B | I] together; basis order is unchanged.
        x_basic_.assign(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double v = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                v += inverse_[i * m_ + r] * sf_.b[r];
            }
            x_basic_[i] = v;
        }
        since_refactor_ = 0;
    }

    std::vector<double> standard_primal() const {
        std::vector<double> x(sf_.columns, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < sf_.columns) {
                x[basis_[i]] = std::max(0.0, x_basic_[i]);
            }
        }
        return x;
    }

    std::vector<double> duals(const std::vector<double>& cost) const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = basis_[i] < cost.size() ? cost[basis_[i]] : 0.0;
            if (cb == 0.0) {
                continue;
            }
            for (std::size_t k = 0; k < m_; ++k) {
                y[k] += cb * inverse_[i * m_ + k];
            }
        }
        return y;
    }

    const std::vector<std::size_t>& basis() const { return basis_; }
    std::size_t iterations() const { return iterations_; }

private:
    double column_entry(std::size_t col, std::size_t row) const {
        if (col < sf_.columns) {
            return sf_.at(row, col);
        }
        return artificial_row_[col - artificial_begin_] == row ? 1.0 : 0.0;
    }

    double dot_column(const std::vector<double>& y, std::size_t col) const {
        if (col >= sf_.columns) {
            return y[artificial_row_[col - artificial_begin_]];
        }
        const double* a = sf_.a.data() + col * m_;
        double v = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            v += y[r] * a[r];
        }
        return v;
    }

    void ftran(std::size_t col, std::vector<double>& w) const {
        w.assign(m_, 0.0);
        if (col >= sf_.columns) {
            const std::size_t r = artificial_row_[col - artificial_begin_];
            for (std::size_t i = 0; i < m_; ++i) {
                w[i] = inverse_[i * m_ + r];
            }
            return;
        }
        const double* a = sf_.a.data() + col * m_;
        for (std::size_t r = 0; r < m_; ++r) {
            if (a[r] == 0.0) {
                continue;
            }
            for (std::size_t i = 0; i < m_; ++i) {
                w[i] += inverse_[i * m_ + r] * a[r];
            }
        }
    }

    void pivot(std::size_t row, std::size_t entering, const std::vector<double>& w, double theta) {
        for (std::size_t i = 0; i < m_; ++i) {
            x_basic_[i] -= theta * w[i];
        }
        x_basic_[row] = theta;
        const double inv = 1.0 / w[row];
        double* prow = inverse_.data() + row * m_;
        for (std::size_t c = 0; c < m_; ++c) {
            prow[c] *= inv;
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row || w[i] == 0.0) {
                continue;
            }
            const double f = w[i];
            double* ri = inverse_.data() + i * m_;
            for (std::size_t c = 0; c < m_; ++c) {
                ri[c] -= f * prow[c];
            }
        }
        position_[basis_[row]] = -1;
        basis_[row] = entering;
        position_[entering] = static_cast<long>(row);
        ++iterations_;
        if (++since_refactor_ >= kRefactorInterval) {
            refactor();
        }
    }

    Outcome run(const std::vector<double>& cost, bool allow_artificial) {
        const std::size_t limit = 200 * (total_columns_ + m_) + 10000;
        std::vector<double> y;
        std::vector<double> w;
        std::size_t local = 0;
        for (;;) {
            if (++local > limit) {
                throw NumericalError("simplex iteration limit exceeded");
            }
            y = duals(cost);
            const std::size_t candidates = allow_artificial ? total_columns_ : sf_.columns;
            std::size_t entering = total_columns_;
            double best = -tol_.optimality;
            for (std::size_t j = 0; j < candidates; ++j) {
                if (position_[j] >= 0) {
                    continue;
                }
                const double d = cost[j] - dot_column(y, j);
                if (d < best) {
                    best = d;
                    entering = j;
                    if (bland_) {
                        break;
                    }
                }
            }
            if (entering == total_columns_) {
                return Outcome::Optimal;
            }
            ftran(entering, w);
            std::size_t leaving = m_;
            double ratio = kInfinity;
            for (std::size_t i = 0; i < m_; ++i) {
                if (w[i] <= tol_.pivot) {
                    continue;
                }
                const double r = std::max(0.0, x_basic_[i]) / w[i];
                if (leaving == m_ || r < ratio - 1e-12 * (1.0 + ratio)) {
                    leaving = i;
                    ratio = r;
                } else if (r <= ratio + 1e-12 * (1.0 + ratio)) {
                    const bool take = bland_ ? basis_[i] < basis_[leaving] : w[i] > w[leaving];
                    if (take) {
                        leaving = i;
                        ratio = std::min(ratio, r);
                    }
                }
            }
            if (leaving == m_) {
                return Outcome::Unbounded;
            }
            const double theta = std::max(0.0, x_basic_[leaving]) / w[leaving];
            if (theta <= 1e-12) {
                if (++degenerate_ >= degenerate_limit_) {
                    bland_ = true;
                }
            }
            pivot(leaving, entering, w, theta);
        }
    }

    void drive_out_artificials() {
        std::vector<double> w;
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < artificial_begin_) {
                continue;
            }
            std::size_t best_col = sf_.columns;
            double best = 1e-9;
            for (std::size_t j = 0; j < sf_.columns; ++j) {
                if (position_[j] >= 0) {
                    continue;
                }
                double alpha = 0.0;
                const double* a = sf_.a.data() + j * m_;
                for (std::size_t r = 0; r < m_; ++r) {
                    alpha += inverse_[i * m_ + r] * a[r];
                }
                if (std::abs(alpha) > best) {
                    best = std::abs(alpha);
                    best_col = j;
                }
            }
            if (best_col == sf_.columns) {
                continue;  // redundant row; the artificial stays basic at zero
            }
            ftran(best_col, w);
            pivot(i, best_col, w, std::max(0.0, x_basic_[i]) / w[i]);
        }
    }

    static constexpr std::size_t kRefactorInterval = 50;

    const StandardForm& sf_;
    Tolerances tol_;
    std::size_t m_ = 0;
    std::size_t artificial_begin_ = 0;
    std::size_t total_columns_ = 0;
    std::vector<std::size_t> artificial_row_;
    std::vector<std::size_t> basis_;
    std::vector<long> position_;
    std::vector<double> inverse_;  // row-major m x m
    std::vector<double> x_basic_;
    std::size_t since_refactor_ = 0;
    std::size_t iterations_ = 0;
    std::size_t degenerate_ = 0;
    std::size_t degenerate_limit_ = 0;
    bool bland_ = false;
};

inline double max_violation(const LinearProgram& p, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& con : p.constraints) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            lhs += con.coefficients[j] * x[j];
        }
        double v = 0.0;
        switch (con.sense) {
            case Sense::LessEqual: v = lhs - con.rhs; break;
            case Sense::GreaterEqual: v = con.rhs - lhs; break;
            case Sense::Equal: v = std::abs(lhs - con.rhs); break;
        }
        worst = std::max(worst, v / (1.0 + std::abs(con.rhs)));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto& var = p.variables[j];
        worst = std::max({worst, var.lower - x[j], x[j] - var.upper});
    }
    return worst;
}

}  // namespace detail

/// Solves `p`. Throws NumericalError when an optimal basis cannot be made to
/// satisfy the feasibility tolerance, and UsageError for malformed programs.
inline Solution solve(const LinearProgram& p, const Tolerances& tol = {}) {
    if (auto problems = p.check(); !problems.empty()) {
        throw UsageError("malformed linear program: " + problems.front());
    }
    const detail::StandardForm sf = detail::standardize(p);
    detail::RevisedSimplex simplex(sf, tol);

    Solution sol;
    if (!simplex.phase_one()) {
        sol.status = Status::Infeasible;
        sol.iterations = simplex.iterations();
        return sol;
    }
    auto outcome = simplex.phase_two();
    if (outcome == detail::RevisedSimplex::Outcome::Unbounded) {
        sol.status = Status::Unbounded;
        sol.iterations = simplex.iterations();
        return sol;
    }

    auto recover = [&](const std::vector<double>& xs) {
        std::vector<double> x(p.num_variables(), 0.0);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const auto& mp = sf.maps[j];
            switch (mp.kind) {
                case detail::MapKind::Fixed: x[j] = mp.offset; break;
                case detail::MapKind::Shift: x[j] = mp.offset + xs[mp.column]; break;
                case detail::MapKind::Mirror: x[j] = mp.offset - xs[mp.column]; break;
                case detail::MapKind::Split: x[j] = xs[mp.column] - xs[mp.negative_column]; break;
            }
        }
        return x;
    };

    std::vector<double> x = recover(simplex.standard_primal());
    if (detail::max_violation(p, x) > tol.feasibility) {
        simplex.refactor();
        if (simplex.phase_two() == detail::RevisedSimplex::Outcome::Unbounded) {
            sol.status = Status::Unbounded;
            return sol;
        }
        x = recover(simplex.standard_primal());
        if (detail::max_violation(p, x) > tol.feasibility) {
            throw NumericalError("simplex solution violates feasibility tolerance after refactorization");
        }
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] = std::clamp(x[j], p.variables[j].lower, p.variables[j].upper);
    }

    const double sign = p.direction == Direction::Maximize ? -1.0 : 1.0;
    std::vector<double> cost(sf.columns, 0.0);
    std::copy(sf.c.begin(), sf.c.end(), cost.begin());
    const std::vector<double> y = simplex.duals(cost);
    double dual_std = sf.objective_offset;
    for (std::size_t i = 0; i < sf.rows; ++i) {
        dual_std += sf.b[i] * y[i];
    }
    sol.dual.assign(p.num_constraints(), 0.0);
    for (std::size_t i = 0; i < p.num_constraints(); ++i) {
        sol.dual[i] = sign * (sf.flipped[i] ? -y[i] : y[i]);
    }
    sol.dual_objective = sign * dual_std;

    double obj = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        obj += p.objective[j] * x[j];
    }
    sol.status = Status::Optimal;
    sol.objective = obj;
    sol.primal = std::move(x);
    sol.basis = simplex.basis();
    sol.iterations = simplex.iterations();
    return sol;
}

}  // namespace dea::lp
