#include "hocd/mixing.hpp"

#include <array>
#include <cmath>

#include "hocd/cumulants.hpp"

namespace hocd {

int MixingMatrix::row_index(const std::string& label) const {
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i] == label) return static_cast<int>(i);
    return -1;
}

int MixingMatrix::column_index(const ComponentDescriptor& c) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == c) return static_cast<int>(i);
    return -1;
}

namespace {

struct ArgCtx {
    int n, m;
};

double sqrt_arg_stat(std::span<const std::span<const double>> cols, const void* p) {
    const auto* c = static_cast<const ArgCtx*>(p);
    const double num = cum_ab_value(cols[0], cols[1], c->n + 1, c->m);
    const double den = cum_ab_value(cols[0], cols[1], c->n, c->m + 1);
    const double c11 = cum_ab_value(cols[0], cols[1], 1, 1);
    if (den == 0.0) return 0.0;
    return num / den * c11;
}

}  // namespace

PairCoefficients estimate_pair_general(const Series& xi, const Series& xj, int n, int m,
                                       double degeneracy_multiplier) {
    if (n < 1 || m < 1 || n + m + 1 > 6)
        throw UnsupportedOrderError("estimate_pair_general: requires n,m >= 1 and n+m+1 <= 6");
    if (xi.size() != xj.size()) throw InputShapeError("estimate_pair_general: length mismatch");

    std::span<const double> a(xi.values), b(xj.values);
    const double num = cum_ab_value(a, b, n + 1, m);  // C_{n+1,m}
    const double den = cum_ab_value(a, b, n, m + 1);  // C_{n,m+1}
    const double c11 = cum_ab_value(a, b, 1, 1);

    const double den_se = jackknife_se_cum_ab(a, b, n, m + 1);
    if (std::abs(den) <= degeneracy_multiplier * den_se)
        throw DegenerateCumulantError("estimate_pair: C_{n,m+1} below the degeneracy threshold",
                                      den, den_se);
    const double num_se = jackknife_se_cum_ab(a, b, n + 1, m);
    if (std::abs(num) <= degeneracy_multiplier * num_se)
        throw DegenerateCumulantError("estimate_pair: C_{n+1,m} below the degeneracy threshold",
                                      num, num_se);

    const double arg = num / den * c11;
    if (arg <= 0.0) {
        ArgCtx ctx{n, m};
        const std::array<std::span<const double>, 2> cols{a, b};
        const double arg_se = jackknife_se(cols, 20, &sqrt_arg_stat, &ctx);
        // within two SEs of zero the sign carries no evidence; beyond that the
        // One-Latent-Component hypothesis itself is implausible
        throw NonEstimableError("estimate_pair: non-positive sqrt argument",
                                /*strong=*/arg < -2.0 * arg_se);
    }

    PairCoefficients out;
    out.alpha_i = std::sqrt(arg);
    out.alpha_j = c11 / out.alpha_i;
    out.order_used = {n, m};
    out.cum11 = c11;
    out.diagnostics.numerator = num;
    out.diagnostics.denominator = den;
    out.diagnostics.sqrt_arg = arg;
    out.diagnostics.denominator_se = den_se;
    return out;
}

PairCoefficients estimate_pair(const Series& xi, const Series& xj, double degeneracy_multiplier) {
    if (xi.size() < 100) throw SampleSizeError("estimate_pair: requires N >= 100");
    return estimate_pair_general(xi, xj, 1, 2, degeneracy_multiplier);
}

std::pair<int, int> select_order(const Series& xi, const Series& xj, double multiplier) {
    if (xi.size() != xj.size()) throw InputShapeError("select_order: length mismatch");
    static constexpr std::array<std::pair<int, int>, 9> kScan{{
        {1, 2}, {2, 1},                  // total order 4
        {1, 3}, {3, 1}, {2, 2},          // total order 5
        {1, 4}, {4, 1}, {2, 3}, {3, 2},  // total order 6
    }};
    std::span<const double> a(xi.values), b(xj.values);
    for (const auto& [n, m] : kScan) {
        const double den = cum_ab_value(a, b, n, m + 1);
        const double den_se = jackknife_se_cum_ab(a, b, n, m + 1);
        if (std::abs(den) <= multiplier * den_se) continue;
        const double num = cum_ab_value(a, b, n + 1, m);
        const double num_se = jackknife_se_cum_ab(a, b, n + 1, m);
        if (std::abs(num) <= multiplier * num_se) continue;
        return {n, m};
    }
    throw NonEstimableError("select_order: no order with usable cumulants", false);
}

WeightVector null_weight(const Eigen::MatrixXd& a_sub, const std::vector<std::string>& row_labels,
                         const std::optional<std::string>& anchor, double rank_tolerance) {
    const auto rows = a_sub.rows();
    if (rows == 0 || static_cast<std::size_t>(rows) != row_labels.size())
        throw InputShapeError("null_weight: row/label mismatch");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a_sub.transpose(), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = rank_tolerance * (sv.size() > 0 ? sv(0) : 0.0);
    long rank = 0;
    for (long i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    const long null_dim = rows - rank;
    if (null_dim <= 0)
        throw NoNullSpaceError("null_weight: A_sub has full row rank");

    const Eigen::MatrixXd basis = svd.matrixV().rightCols(null_dim);

    WeightVector w;
    w.labels = row_labels;
    Eigen::VectorXd omega;
    if (anchor) {
        long arow = -1;
        for (std::size_t i = 0; i < row_labels.size(); ++i)
            if (row_labels[i] == *anchor) arow = static_cast<long>(i);
        if (arow < 0) throw InputShapeError("null_weight: anchor not among rows");
        const Eigen::RowVectorXd arow_basis = basis.row(arow);
        const double norm2 = arow_basis.squaredNorm();
        if (norm2 > rank_tolerance * rank_tolerance) {
            // least-norm coefficients with the anchor entry pinned to 1
            omega = basis * (arow_basis.transpose() / norm2);
            omega(arow) = 1.0;  // exact by the invariant
            w.normalization_anchor = anchor;
        }
    }
    if (omega.size() == 0) {
        omega = basis.col(0);
        omega.normalize();
        // deterministic sign: first nonzero entry positive
        for (long i = 0; i < omega.size(); ++i) {
            if (std::abs(omega(i)) > 1e-14) {
                if (omega(i) < 0) omega = -omega;
                break;
            }
        }
    }
    w.entries.assign(omega.data(), omega.data() + omega.size());
    return w;
}

Series surrogate_residual(const Series& xj, const std::vector<Series>& xk,
                          const Eigen::MatrixXd& a_sub, double rank_tolerance) {
    if (a_sub.rows() != static_cast<long>(1 + xk.size()))
        throw InputShapeError("surrogate_residual: A_sub rows must match {x_j} + X_k");
    std::vector<std::string> labels;
    labels.push_back(xj.label);
    for (const auto& s : xk) {
        if (s.size() != xj.size()) throw InputShapeError("surrogate_residual: length mismatch");
        labels.push_back(s.label);
    }
    const WeightVector w = null_weight(a_sub, labels, xj.label, rank_tolerance);

    Series out;
    out.label = "~" + xj.label;
    out.values.resize(xj.size());
    for (std::size_t r = 0; r < xj.size(); ++r) {
        double v = w.entries[0] * xj.values[r];
        for (std::size_t c = 0; c < xk.size(); ++c) v += w.entries[c + 1] * xk[c].values[r];
        out.values[r] = v;
    }
    return out;
}

}  // namespace hocd
