#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace ethd::stats {

struct AnovaEffect {
    std::string name;
    double ss = 0.0;
    long df = 0;
    double ms = 0.0;
    double f = 0.0;
    double p = 1.0;
};

struct AnovaTable {
    std::vector<AnovaEffect> effects; // main effects, plus interaction when separated
    double ss_residual = 0.0;
    long df_residual = 0;
    double ms_residual = 0.0;
    double ss_total = 0.0;
    long df_total = 0;
    double grand_mean = 0.0;

    // "name: F(df1,df2)=..., p..." lines, one per effect
    std::string text() const;
};

// Balanced two-factor design: cells[a][b] holds the replicate values of
// cell (a, b); every cell needs the same replicate count.
struct FactorialTable {
    std::vector<std::string> factor_a_levels;
    std::vector<std::string> factor_b_levels;
    std::vector<std::vector<std::vector<double>>> cells;

    std::size_t n_a() const { return factor_a_levels.size(); }
    std::size_t n_b() const { return factor_b_levels.size(); }
    // replicate count; throws DomainError when ragged/unbalanced
    std::size_t validate() const;
};

// With one observation per cell the interaction cannot be separated from
// error, so the pooled variant uses it as the residual.
enum class Interaction { PooledIntoResidual, Separate };

AnovaTable one_way_anova(const std::vector<std::vector<double>>& groups);
AnovaTable two_way_anova(const FactorialTable& table,
                         Interaction interaction = Interaction::PooledIntoResidual);

// Survival function of the F distribution (upper tail), via the regularized
// incomplete beta function.
double f_sf(double f_value, double df1, double df2);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Values below 1e-12 render as "<1e-12", never 0.
std::string format_p(double p);

struct PairwiseResult {
    std::size_t n_groups = 0;
    long n_perm = 0;
    // row-major (i, j) matrices, diagonal = 1
    std::vector<std::vector<double>> p_raw;
    std::vector<std::vector<double>> p_bonferroni;
};

// Permutation test on |difference of means| per group pair, Bonferroni
// adjustment across pairs. Deterministic per seed (one derived stream per
// pair, so pairs can run in parallel).
PairwiseResult permutation_pairwise(const std::vector<std::vector<double>>& groups,
                                    long n_perm = 10000, std::uint64_t seed = 0);

} // namespace ethd::stats
