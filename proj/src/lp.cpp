#include "treedual/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace treedual {
namespace {

constexpr double kPivotTol = 1e-11;

// Tableau simplex on  min c.x, A x = b, x >= 0  with artificial basis.
// Rows 0..m-1 hold the constraints, the last two rows hold the phase-2
// and phase-1 objectives.
class Simplex {
public:
    Simplex(const std::vector<std::vector<double>>& A,
            const std::vector<double>& b,
            const std::vector<double>& c)
        : m_(static_cast<int>(A.size())), n_(static_cast<int>(c.size())) {
        tab_.assign(m_ + 2, std::vector<double>(n_ + m_ + 1, 0.0));
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            double sign = b[i] < 0.0 ? -1.0 : 1.0;
            for (int j = 0; j < n_; ++j) tab_[i][j] = sign * A[i][j];
            tab_[i][n_ + i] = 1.0;  // artificial
            tab_[i].back() = sign * b[i];
            basis_[i] = n_ + i;
        }
        for (int j = 0; j < n_; ++j) tab_[m_][j] = c[j];
        // phase-1 objective: sum of artificials, expressed in the structural
        // columns; the basic artificials keep reduced cost zero
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) tab_[m_ + 1][j] -= tab_[i][j];
            tab_[m_ + 1].back() -= tab_[i].back();
        }
    }

    LpResult run() {
        // phase 1
        if (!iterate(m_ + 1, n_)) return {LpStatus::Unbounded, {}, 0.0};
        phase1_value_ = -tab_[m_ + 1].back();
        if (phase1_value_ > 1e-8) return {LpStatus::Infeasible, extract(), phase1_value_};
        drive_out_artificials();
        // phase 2 (artificial columns frozen)
        if (!iterate(m_, n_)) return {LpStatus::Unbounded, extract(), 0.0};
        LpResult r;
        r.status = LpStatus::Optimal;
        r.x = extract();
        r.value = -tab_[m_].back();
        return r;
    }

    double phase1_value() const { return phase1_value_; }

private:
    std::vector<double> extract() const {
        std::vector<double> x(static_cast<size_t>(n_), 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = tab_[i].back();
        return x;
    }

    void pivot(int row, int col) {
        double p = tab_[row][col];
        for (double& v : tab_[row]) v /= p;
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == row) continue;
            double f = tab_[i][col];
            if (f == 0.0) continue;
            for (int j = 0; j <= n_ + m_; ++j) tab_[i][j] -= f * tab_[row][j];
        }
        basis_[row] = col;
    }

    // Bland's rule: smallest-index entering and leaving variables.
    bool iterate(int obj_row, int n_cols) {
        for (long guard = 0;; ++guard) {
            if (guard > 200000L)
                throw std::runtime_error("simplex: iteration guard tripped");
            int enter = -1;
            for (int j = 0; j < n_cols; ++j)
                if (tab_[obj_row][j] < -kPivotTol) { enter = j; break; }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (tab_[i][enter] > kPivotTol) {
                    double ratio = tab_[i].back() / tab_[i][enter];
                    if (ratio < best - kPivotTol ||
                        (ratio < best + kPivotTol &&
                         (leave < 0 || basis_[i] < basis_[leave]))) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;  // unbounded
            pivot(leave, enter);
        }
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            int col = -1;
            for (int j = 0; j < n_; ++j)
                if (std::abs(tab_[i][j]) > 1e-9) { col = j; break; }
            if (col >= 0) pivot(i, col);
            // otherwise the row is redundant; the artificial stays basic at 0
        }
    }

    int m_, n_;
    std::vector<std::vector<double>> tab_;
    std::vector<int> basis_;
    double phase1_value_ = 0.0;
};

}  // namespace

LpResult solve_lp(const std::vector<std::vector<double>>& A,
                  const std::vector<double>& b,
                  const std::vector<double>& c) {
    return Simplex(A, b, c).run();
}

FeasibilityResult lp_feasibility(const std::vector<std::vector<double>>& A_ub,
                                 const std::vector<double>& b_ub,
                                 const std::vector<std::vector<double>>& A_lb,
                                 const std::vector<double>& b_lb,
                                 int n_vars) {
    // slacks turn every row into an equality; phase 1 measures violation
    const int m_ub = static_cast<int>(A_ub.size());
    const int m_lb = static_cast<int>(A_lb.size());
    const int n = n_vars + m_ub + m_lb;
    std::vector<std::vector<double>> A(static_cast<size_t>(m_ub + m_lb),
                                       std::vector<double>(static_cast<size_t>(n), 0.0));
    std::vector<double> b(static_cast<size_t>(m_ub + m_lb), 0.0);
    for (int i = 0; i < m_ub; ++i) {
        for (int j = 0; j < n_vars; ++j) A[i][j] = A_ub[i][j];
        A[i][n_vars + i] = 1.0;
        b[i] = b_ub[i];
    }
    for (int i = 0; i < m_lb; ++i) {
        for (int j = 0; j < n_vars; ++j) A[m_ub + i][j] = A_lb[i][j];
        A[m_ub + i][n_vars + m_ub + i] = -1.0;
        b[m_ub + i] = b_lb[i];
    }
    std::vector<double> c(static_cast<size_t>(n), 0.0);
    LpResult r = solve_lp(A, b, c);
    FeasibilityResult out;
    out.violation = r.status == LpStatus::Infeasible ? r.value : 0.0;
    out.x.assign(r.x.begin(), r.x.begin() + (r.x.empty() ? 0 : n_vars));
    if (out.x.empty()) out.x.assign(static_cast<size_t>(n_vars), 0.0);
    return out;
}

}  // namespace treedual
