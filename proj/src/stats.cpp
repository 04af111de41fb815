#include "ethd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ethd/csv.hpp"
#include "ethd/errors.hpp"
#include "ethd/parallel.hpp"
#include "ethd/rng.hpp"

namespace ethd::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr double eps = 3.0e-16;
    constexpr double fpmin = 1.0e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double sum(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

AnovaEffect make_effect(std::string name, double ss, long df, double ms_residual,
                        long df_residual) {
    AnovaEffect e;
    e.name = std::move(name);
    e.ss = ss;
    e.df = df;
    e.ms = df > 0 ? ss / df : 0.0;
    if (df <= 0 || df_residual <= 0) {
        e.f = 0.0;
        e.p = 1.0;
    } else if (ms_residual <= 0.0) {
        e.f = e.ms > 0.0 ? kInf : 0.0;
        e.p = e.ms > 0.0 ? 0.0 : 1.0;
    } else {
        e.f = e.ms / ms_residual;
        e.p = f_sf(e.f, static_cast<double>(df), static_cast<double>(df_residual));
    }
    return e;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double f_sf(double f_value, double df1, double df2) {
    if (df1 < 1.0 || df2 < 1.0) throw DomainError("f_sf: degrees of freedom must be >= 1");
    if (std::isnan(f_value)) throw DomainError("f_sf: F is NaN");
    if (f_value <= 0.0) return 1.0;
    if (std::isinf(f_value)) return 0.0;
    // P(F > f) = I_x(df2/2, df1/2) with x = df2 / (df2 + df1 f)
    const double x = df2 / (df2 + df1 * f_value);
    return incomplete_beta(0.5 * df2, 0.5 * df1, x);
}

std::string format_p(double p) {
    if (p < 1e-12) return "<1e-12";
    return csv::format_double(p);
}

std::string AnovaTable::text() const {
    std::ostringstream os;
    for (const auto& e : effects) {
        os << e.name << ": F(" << e.df << "," << df_residual << ")=";
        if (std::isinf(e.f))
            os << "inf";
        else
            os << csv::format_double(e.f);
        os << ", p" << (e.p < 1e-12 ? "" : "=") << format_p(e.p) << '\n';
    }
    return os.str();
}

AnovaTable one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DomainError("one_way_anova: need at least 2 groups");
    for (const auto& g : groups)
        if (g.size() < 2) throw DomainError("one_way_anova: every group needs >= 2 values");

    double total = 0.0;
    long n = 0;
    for (const auto& g : groups) {
        total += sum(g);
        n += static_cast<long>(g.size());
    }
    const double grand = total / n;

    double ss_between = 0.0;
    double ss_within = 0.0;
    for (const auto& g : groups) {
        const double m = sum(g) / g.size();
        ss_between += g.size() * (m - grand) * (m - grand);
        for (double v : g) ss_within += (v - m) * (v - m);
    }

    const long df_between = static_cast<long>(groups.size()) - 1;
    const long df_within = n - static_cast<long>(groups.size());

    if (ss_within <= 0.0 && ss_between <= 0.0)
        throw NumericError("one_way_anova: zero variance everywhere, F undefined (0/0)");

    AnovaTable t;
    t.grand_mean = grand;
    t.ss_residual = ss_within;
    t.df_residual = df_within;
    t.ms_residual = df_within > 0 ? ss_within / df_within : 0.0;
    t.ss_total = ss_between + ss_within;
    t.df_total = n - 1;
    t.effects.push_back(make_effect("group", ss_between, df_between, t.ms_residual, df_within));
    return t;
}

std::size_t FactorialTable::validate() const {
    if (factor_a_levels.empty() || factor_b_levels.empty())
        throw DomainError("two_way_anova: empty factor levels");
    if (cells.size() != n_a()) throw DomainError("two_way_anova: cell grid does not match factor A");
    std::size_t reps = 0;
    for (const auto& row : cells) {
        if (row.size() != n_b())
            throw DomainError("two_way_anova: cell grid does not match factor B");
        for (const auto& cell : row) {
            if (reps == 0) reps = cell.size();
            if (cell.empty() || cell.size() != reps)
                throw DomainError(
                    "two_way_anova: unbalanced design (unequal replicates); run one_way_anova per "
                    "factor instead");
        }
    }
    return reps;
}

AnovaTable two_way_anova(const FactorialTable& table, Interaction interaction) {
    const std::size_t reps = table.validate();
    const std::size_t na = table.n_a();
    const std::size_t nb = table.n_b();
    if (na < 2 && nb < 2) throw DomainError("two_way_anova: need >= 2 levels in some factor");
    if (interaction == Interaction::Separate && reps < 2)
        throw DomainError("two_way_anova: separate interaction needs >= 2 replicates per cell");
    if (interaction == Interaction::PooledIntoResidual && reps < 2 && (na < 2 || nb < 2))
        throw DomainError("two_way_anova: no residual degrees of freedom");

    const double n_total = static_cast<double>(na * nb * reps);
    double grand = 0.0;
    std::vector<double> mean_a(na, 0.0), mean_b(nb, 0.0);
    std::vector<std::vector<double>> mean_cell(na, std::vector<double>(nb, 0.0));
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            const double s = sum(table.cells[i][j]);
            mean_cell[i][j] = s / reps;
            mean_a[i] += s;
            mean_b[j] += s;
            grand += s;
        }
    grand /= n_total;
    for (auto& m : mean_a) m /= static_cast<double>(nb * reps);
    for (auto& m : mean_b) m /= static_cast<double>(na * reps);

    double ss_total = 0.0;
    double ss_within = 0.0;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            for (double v : table.cells[i][j]) {
                ss_total += (v - grand) * (v - grand);
                ss_within += (v - mean_cell[i][j]) * (v - mean_cell[i][j]);
            }

    double ss_a = 0.0;
    for (std::size_t i = 0; i < na; ++i)
        ss_a += static_cast<double>(nb * reps) * (mean_a[i] - grand) * (mean_a[i] - grand);
    double ss_b = 0.0;
    for (std::size_t j = 0; j < nb; ++j)
        ss_b += static_cast<double>(na * reps) * (mean_b[j] - grand) * (mean_b[j] - grand);

    double ss_ab = 0.0;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            const double d = mean_cell[i][j] - mean_a[i] - mean_b[j] + grand;
            ss_ab += static_cast<double>(reps) * d * d;
        }

    if (ss_total <= 0.0)
        throw NumericError("two_way_anova: all cells identical, F undefined (0/0)");

    const long df_a = static_cast<long>(na) - 1;
    const long df_b = static_cast<long>(nb) - 1;
    const long df_ab = df_a * df_b;
    const long df_total = static_cast<long>(n_total) - 1;

    AnovaTable t;
    t.grand_mean = grand;
    t.ss_total = ss_total;
    t.df_total = df_total;

    if (interaction == Interaction::Separate) {
        t.ss_residual = ss_within;
        t.df_residual = df_total - df_a - df_b - df_ab;
    } else {
        t.ss_residual = ss_within + ss_ab;
        t.df_residual = df_total - df_a - df_b;
    }
    if (t.df_residual <= 0) throw DomainError("two_way_anova: no residual degrees of freedom");
    t.ms_residual = t.ss_residual / t.df_residual;

    if (df_a > 0)
        t.effects.push_back(make_effect("factor_a", ss_a, df_a, t.ms_residual, t.df_residual));
    if (df_b > 0)
        t.effects.push_back(make_effect("factor_b", ss_b, df_b, t.ms_residual, t.df_residual));
    if (interaction == Interaction::Separate && df_ab > 0)
        t.effects.push_back(
            make_effect("interaction", ss_ab, df_ab, t.ms_residual, t.df_residual));
    return t;
}

PairwiseResult permutation_pairwise(const std::vector<std::vector<double>>& groups, long n_perm,
                                    std::uint64_t seed) {
    if (groups.size() < 2) throw DomainError("permutation_pairwise: need >= 2 groups");
    if (n_perm < 100) throw DomainError("permutation_pairwise: n_perm < 100 gives useless precision");
    for (const auto& g : groups)
        if (g.empty()) throw DomainError("permutation_pairwise: empty group");

    const std::size_t k = groups.size();
    PairwiseResult out;
    out.n_groups = k;
    out.n_perm = n_perm;
    out.p_raw.assign(k, std::vector<double>(k, 1.0));
    out.p_bonferroni.assign(k, std::vector<double>(k, 1.0));

    struct Pair {
        std::size_t i, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) pairs.push_back({i, j});
    const double n_pairs = static_cast<double>(pairs.size());

    std::vector<double> raw(pairs.size(), 1.0);
    parallel::for_index(static_cast<std::int64_t>(pairs.size()), [&](std::int64_t pi) {
        const auto [i, j] = pairs[static_cast<std::size_t>(pi)];
        const auto& a = groups[i];
        const auto& b = groups[j];
        std::vector<double> pooled;
        pooled.reserve(a.size() + b.size());
        pooled.insert(pooled.end(), a.begin(), a.end());
        pooled.insert(pooled.end(), b.begin(), b.end());
        const double obs =
            std::fabs(sum(a) / a.size() - sum(b) / b.size());

        Rng rng(derive_seed(seed, {0x7065726dULL, i, j}));
        long hits = 0;
        std::vector<double> work = pooled;
        const std::size_t na = a.size();
        for (long p = 0; p < n_perm; ++p) {
            // Fisher-Yates; first na entries become the permuted group A
            for (std::size_t m = work.size() - 1; m > 0; --m) {
                const std::size_t idx =
                    static_cast<std::size_t>(rng.uniform() * static_cast<double>(m + 1));
                std::swap(work[m], work[idx <= m ? idx : m]);
            }
            double sa = 0.0;
            for (std::size_t m = 0; m < na; ++m) sa += work[m];
            const double sb = sum(work) - sa;
            const double diff =
                std::fabs(sa / na - sb / (work.size() - na));
            if (diff >= obs - 1e-12) ++hits;
        }
        raw[static_cast<std::size_t>(pi)] =
            static_cast<double>(hits + 1) / static_cast<double>(n_perm + 1);
    });

    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto [i, j] = pairs[pi];
        out.p_raw[i][j] = out.p_raw[j][i] = raw[pi];
        out.p_bonferroni[i][j] = out.p_bonferroni[j][i] = std::min(1.0, raw[pi] * n_pairs);
    }
    return out;
}

} // namespace ethd::stats
