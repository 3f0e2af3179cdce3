#pragma once

#include <cstddef>
#include <vector>

#include "sagaze/error.hpp"

namespace sagaze {

// Gaussian kernel density estimate, bandwidth by Scott's rule: the factor
// n^(-1/(d+4)) squared is applied to the sample (n-1) covariance of the
// training points. Raises DegenerateData for n < 2, zero variance, or a
// singular 2D covariance.
class DensityModel {
public:
    static DensityModel fit(const std::vector<double>& xs);
    static DensityModel fit(const std::vector<double>& xs, const std::vector<double>& ys);

    int dim() const { return dim_; }

    // Density at a query point; finite and non-negative for finite queries
    // (the kernel sum can underflow to 0 far from the data). The summation
    // order over training points is fixed, so results never depend on
    // evaluation batching.
    double density(double x) const;
    double density(double x, double y) const;

private:
    DensityModel() = default;

    int dim_ = 0;
    std::vector<double> xs_;
    std::vector<double> ys_;
    double norm_ = 0.0; // 1 / (n * kernel volume)
    // 1D: h2_ = bandwidth^2. 2D: upper triangle of the inverse bandwidth.
    double h2_ = 0.0;
    double inv_xx_ = 0.0;
    double inv_xy_ = 0.0;
    double inv_yy_ = 0.0;
};

// Resubstitution estimate of mutual information in bits:
//   MI = (1/n) sum_i log2( f_XY(x_i, y_i) / (f_X(x_i) * f_Y(y_i)) )
// with the KDE densities above. Either series constant -> exactly 0. The
// estimate is reported unclipped and may be slightly negative. Symmetric in
// its arguments bit-for-bit. Raises LengthMismatch, TooFewSamples (n < 16);
// a perfectly linear relation between non-constant xs and ys surfaces as
// DegenerateData from the joint fit (the true MI is infinite).
double mutual_information(const std::vector<double>& xs, const std::vector<double>& ys);

struct PcaModel {
    std::vector<double> mean;     // per-feature mean
    std::vector<double> sd;       // per-feature population std; 0 marks a constant feature
    std::vector<double> loadings; // unit-norm first principal axis
    double explained_variance_ratio = 0.0;
};

struct PcaResult {
    PcaModel model;
    std::vector<double> scores; // z-scored rows projected onto the loadings
};

// First principal component of the column-wise z-scored matrix (population
// std; a zero-variance column z-scores to all zeros). Eigenvalue ties within
// 1e-9 resolve to the earliest index. Sign convention: sum of loadings
// positive; if the sum is zero, the first nonzero loading is made positive.
// Raises TooFewRows for n < 2.
PcaResult pca_first_component(const std::vector<std::vector<double>>& rows);

// -sum p_i log2 p_i with 0*log0 = 0. Raises NotADistribution when any
// p_i < 0 or the sum is off 1 by more than 1e-9.
double shannon_entropy(const std::vector<double>& p);

struct StationaryResult {
    std::vector<double> pi;
    bool converged = true; // false when the 10,000-iteration cap was hit
};

// Stationary distribution of a row-stochastic matrix by power iteration from
// the uniform start, converged when the L1 step falls below 1e-12. Raises
// NotStochastic.
StationaryResult stationary_distribution(const std::vector<std::vector<double>>& P);

struct CorrelationResult {
    double coefficient = 0.0;
    double p_value = 1.0; // two-sided
    std::size_t n = 0;
};

// Pearson r with p from t = r*sqrt((n-2)/(1-r^2)) against Student-t(n-2).
// Spearman is Pearson on mid-ranks (ties averaged). Kendall is tau-b with
// tie-corrected denominator and the tie-adjusted normal approximation for p.
// All require equal lengths and n >= 3; constant input raises ConstantSeries
// (for Kendall: a fully tied series, which zeroes the tau-b denominator).
CorrelationResult pearson(const std::vector<double>& xs, const std::vector<double>& ys);
CorrelationResult spearman(const std::vector<double>& xs, const std::vector<double>& ys);
CorrelationResult kendall(const std::vector<double>& xs, const std::vector<double>& ys);

// Mid-ranks (1-based, ties averaged); the rank transform behind spearman.
std::vector<double> mid_ranks(const std::vector<double>& values);

// Two-sided p for a Pearson/Spearman coefficient at sample size n, via the
// regularized incomplete beta. Exposed because it is the exact machinery the
// correlation functions share.
double correlation_p_value(double r, std::size_t n);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

} // namespace sagaze
