#include "sagaze/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace sagaze {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

DensityModel DensityModel::fit(const std::vector<double>& xs) {
    std::size_t n = xs.size();
    if (n < 2) raise(Errc::DegenerateData, "KDE needs at least 2 points");

    double mx = mean_of(xs);
    double var = 0.0;
    for (double x : xs) var += (x - mx) * (x - mx);
    var /= static_cast<double>(n - 1);
    if (var <= 0.0) raise(Errc::DegenerateData, "KDE input has zero variance");

    // Scott's rule: factor^2 applied to the sample variance.
    double factor = std::pow(static_cast<double>(n), -1.0 / 5.0);
    DensityModel model;
    model.dim_ = 1;
    model.xs_ = xs;
    model.h2_ = factor * factor * var;
    model.norm_ = 1.0 / (static_cast<double>(n) * std::sqrt(kTwoPi * model.h2_));
    return model;
}

DensityModel DensityModel::fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) raise(Errc::LengthMismatch, "KDE coordinate lengths differ");
    std::size_t n = xs.size();
    if (n < 2) raise(Errc::DegenerateData, "KDE needs at least 2 points");

    // Sample covariance, written so that swapping the coordinates swaps
    // cxx/cyy and leaves cxy bit-identical.
    double mx = mean_of(xs);
    double my = mean_of(ys);
    double cxx = 0.0, cyy = 0.0, cxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        cxx += dx * dx;
        cyy += dy * dy;
        cxy += dx * dy;
    }
    double denom = static_cast<double>(n - 1);
    cxx /= denom;
    cyy /= denom;
    cxy /= denom;

    double factor = std::pow(static_cast<double>(n), -1.0 / 6.0);
    double f2 = factor * factor;
    double hxx = f2 * cxx, hyy = f2 * cyy, hxy = f2 * cxy;
    double det = hxx * hyy - hxy * hxy;
    if (cxx <= 0.0 || cyy <= 0.0 || det <= 0.0) {
        raise(Errc::DegenerateData, "KDE covariance is not positive definite");
    }

    DensityModel model;
    model.dim_ = 2;
    model.xs_ = xs;
    model.ys_ = ys;
    model.inv_xx_ = hyy / det;
    model.inv_yy_ = hxx / det;
    model.inv_xy_ = -hxy / det;
    model.norm_ = 1.0 / (static_cast<double>(n) * kTwoPi * std::sqrt(det));
    return model;
}

double DensityModel::density(double x) const {
    double sum = 0.0;
    for (double xi : xs_) {
        double d = x - xi;
        sum += std::exp(-0.5 * (d * d) / h2_);
    }
    return norm_ * sum;
}

double DensityModel::density(double x, double y) const {
    // Quadratic form grouped as (axx + cyy) + b(xy): every term is mirrored
    // by the coordinate swap, so density(x, y) of a fit on (X, Y) equals
    // density(y, x) of a fit on (Y, X) bit-for-bit.
    double sum = 0.0;
    double b2 = 2.0 * inv_xy_;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        double dx = x - xs_[i];
        double dy = y - ys_[i];
        double q = (inv_xx_ * dx * dx + inv_yy_ * dy * dy) + b2 * (dx * dy);
        sum += std::exp(-0.5 * q);
    }
    return norm_ * sum;
}

double mutual_information(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) raise(Errc::LengthMismatch, "series lengths differ");
    std::size_t n = xs.size();
    if (n < 16) raise(Errc::TooFewSamples, "mutual information needs at least 16 pairs");

    auto constant = [](const std::vector<double>& v) {
        for (double x : v) {
            if (x != v.front()) return false;
        }
        return true;
    };
    if (constant(xs) || constant(ys)) return 0.0;

    DensityModel joint = DensityModel::fit(xs, ys);
    DensityModel fx = DensityModel::fit(xs);
    DensityModel fy = DensityModel::fit(ys);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += std::log2(joint.density(xs[i], ys[i]) / (fx.density(xs[i]) * fy.density(ys[i])));
    }
    return sum / static_cast<double>(n);
}

namespace {

// Cyclic Jacobi sweeps; leaves eigenvalues on the diagonal of `a` and the
// matching eigenvectors in the columns of `v`. Plenty for the k <= 3
// matrices this library fuses, and exact on already-diagonal input.
void jacobi_eigen(std::vector<std::vector<double>>& a, std::vector<std::vector<double>>& v) {
    std::size_t k = a.size();
    v.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) v[i][i] = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < k; ++i) scale = std::max(scale, std::abs(a[i][i]));
    scale = std::max(scale, 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q) off += a[p][q] * a[p][q];
        if (off <= k * k * 1e-32 * scale * scale) break;

        for (std::size_t p = 0; p < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                if (a[p][q] == 0.0) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double apq = a[p][q];
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for (std::size_t r = 0; r < k; ++r) {
                    if (r != p && r != q) {
                        double arp = a[r][p], arq = a[r][q];
                        a[r][p] = c * arp - s * arq;
                        a[p][r] = a[r][p];
                        a[r][q] = s * arp + c * arq;
                        a[q][r] = a[r][q];
                    }
                    double vrp = v[r][p], vrq = v[r][q];
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }
}

} // namespace

PcaResult pca_first_component(const std::vector<std::vector<double>>& rows) {
    std::size_t n = rows.size();
    if (n < 2) raise(Errc::TooFewRows, "PCA needs at least 2 rows");
    std::size_t k = rows[0].size();
    if (k < 2) raise(Errc::InvalidConfig, "PCA needs at least 2 features");
    for (const auto& row : rows) {
        if (row.size() != k) raise(Errc::LengthMismatch, "ragged feature matrix");
        for (double x : row) {
            if (!std::isfinite(x)) raise(Errc::InvalidConfig, "non-finite feature");
        }
    }

    PcaModel model;
    model.mean.assign(k, 0.0);
    model.sd.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += rows[i][j];
        model.mean[j] = s / static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = rows[i][j] - model.mean[j];
            var += d * d;
        }
        model.sd[j] = std::sqrt(var / static_cast<double>(n)); // population std
    }

    // Zero-variance columns z-score to all zeros: they carry no direction.
    std::vector<std::vector<double>> z(n, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            z[i][j] = model.sd[j] > 0.0 ? (rows[i][j] - model.mean[j]) / model.sd[j] : 0.0;

    std::vector<std::vector<double>> cov(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += z[i][a] * z[i][b];
            cov[a][b] = s / static_cast<double>(n);
            cov[b][a] = cov[a][b];
        }
    }
    double trace = 0.0;
    for (std::size_t j = 0; j < k; ++j) trace += cov[j][j];

    std::vector<std::vector<double>> diag = cov;
    std::vector<std::vector<double>> vecs;
    jacobi_eigen(diag, vecs);

    std::vector<double> eig(k);
    for (std::size_t j = 0; j < k; ++j) eig[j] = diag[j][j];

    // Earliest index wins ties within 1e-9.
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
        if (eig[j] > eig[best] + 1e-9) best = j;
    }

    std::vector<double> sorted = eig;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    bool tied_top = k >= 2 && sorted[0] - sorted[1] <= 1e-9;

    model.loadings.assign(k, 0.0);
    if (tied_top) {
        // The top direction is isotropic to tolerance; pin the convention to
        // the first feature axis.
        model.loadings[0] = 1.0;
    } else {
        double norm = 0.0;
        for (std::size_t j = 0; j < k; ++j) norm += vecs[j][best] * vecs[j][best];
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < k; ++j) model.loadings[j] = vecs[j][best] / norm;
    }

    double sum = 0.0;
    for (double l : model.loadings) sum += l;
    bool flip = false;
    // An analytically zero sum (the (1,-1)/sqrt(2) direction every
    // anti-correlated feature pair produces) reaches us as rounding noise of
    // either sign. The loadings are unit-norm, so anything at noise scale is
    // the tie case; orientation must not hang on the last bit.
    if (std::abs(sum) <= 1e-12) {
        for (double l : model.loadings) {
            if (l != 0.0) {
                flip = l < 0.0;
                break;
            }
        }
    } else if (sum < 0.0) {
        flip = true;
    }
    if (flip) {
        for (double& l : model.loadings) l = -l;
    }

    double ratio = trace > 0.0 ? eig[best] / trace : 0.0;
    model.explained_variance_ratio = std::clamp(ratio, 0.0, 1.0);

    PcaResult result;
    result.model = std::move(model);
    result.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += z[i][j] * result.model.loadings[j];
        result.scores[i] = s;
    }
    return result;
}

double shannon_entropy(const std::vector<double>& p) {
    double sum = 0.0;
    for (double x : p) {
        if (x < 0.0) raise(Errc::NotADistribution, "negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        raise(Errc::NotADistribution, "probabilities sum to " + std::to_string(sum));
    }
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log2(x);
    }
    return h;
}

StationaryResult stationary_distribution(const std::vector<std::vector<double>>& P) {
    std::size_t k = P.size();
    if (k == 0) raise(Errc::NotStochastic, "empty matrix");
    for (const auto& row : P) {
        if (row.size() != k) raise(Errc::NotStochastic, "matrix not square");
        double sum = 0.0;
        for (double x : row) {
            if (x < 0.0) raise(Errc::NotStochastic, "negative transition probability");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            raise(Errc::NotStochastic, "row sums to " + std::to_string(sum));
        }
    }

    StationaryResult result;
    result.pi.assign(k, 1.0 / static_cast<double>(k));
    std::vector<double> next(k);
    for (int iter = 0; iter < 10000; ++iter) {
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i) s += result.pi[i] * P[i][j];
            next[j] = s;
        }
        double l1 = 0.0;
        for (std::size_t j = 0; j < k; ++j) l1 += std::abs(next[j] - result.pi[j]);
        result.pi = next;
        if (l1 < 1e-12) return result;
    }
    result.converged = false;
    return result;
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double correlation_p_value(double r, std::size_t n) {
    if (n < 3) raise(Errc::TooFewSamples, "p-value needs n >= 3");
    double nu = static_cast<double>(n - 2);
    double r2 = r * r;
    if (r2 >= 1.0) return 0.0;
    double t2 = r2 * nu / (1.0 - r2);
    // P(|T_nu| > t) through the regularized incomplete beta.
    return incomplete_beta(0.5 * nu, 0.5, nu / (nu + t2));
}

namespace {

void check_pair(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) raise(Errc::LengthMismatch, "series lengths differ");
    if (xs.size() < 3) raise(Errc::TooFewSamples, "correlation needs n >= 3");
}

} // namespace

CorrelationResult pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    check_pair(xs, ys);
    std::size_t n = xs.size();
    double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) raise(Errc::ConstantSeries, "constant input series");
    double r = std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
    return {r, correlation_p_value(r, n), n};
}

std::vector<double> mid_ranks(const std::vector<double>& values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = 0.5 * static_cast<double>(i + j) + 1.0; // 1-based mid-rank
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

CorrelationResult spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    check_pair(xs, ys);
    return pearson(mid_ranks(xs), mid_ranks(ys));
}

namespace {

// Counts inversions (strictly decreasing pairs) in `values` by merge sort.
double count_inversions(std::vector<double>& values, std::vector<double>& scratch,
                        std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0.0;
    std::size_t mid = lo + (hi - lo) / 2;
    double count = count_inversions(values, scratch, lo, mid) +
                   count_inversions(values, scratch, mid, hi);
    std::size_t a = lo, b = mid, out = lo;
    while (a < mid && b < hi) {
        if (values[b] < values[a]) {
            count += static_cast<double>(mid - a);
            scratch[out++] = values[b++];
        } else {
            scratch[out++] = values[a++];
        }
    }
    while (a < mid) scratch[out++] = values[a++];
    while (b < hi) scratch[out++] = values[b++];
    std::copy(scratch.begin() + lo, scratch.begin() + hi, values.begin() + lo);
    return count;
}

} // namespace

CorrelationResult kendall(const std::vector<double>& xs, const std::vector<double>& ys) {
    check_pair(xs, ys);
    std::size_t n = xs.size();
    double nd = static_cast<double>(n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (xs[a] != xs[b]) return xs[a] < xs[b];
        return ys[a] < ys[b];
    });

    // Tie statistics: pair counts and the moment sums the variance needs.
    auto tie_stats = [](const std::vector<double>& sorted_keys, double& pairs, double& v_2n5,
                        double& v_lin, double& v_quad) {
        pairs = v_2n5 = v_lin = v_quad = 0.0;
        std::size_t i = 0;
        while (i < sorted_keys.size()) {
            std::size_t j = i;
            while (j + 1 < sorted_keys.size() && sorted_keys[j + 1] == sorted_keys[i]) ++j;
            double t = static_cast<double>(j - i + 1);
            pairs += t * (t - 1.0) / 2.0;
            v_2n5 += t * (t - 1.0) * (2.0 * t + 5.0);
            v_lin += t * (t - 1.0);
            v_quad += t * (t - 1.0) * (t - 2.0);
            i = j + 1;
        }
    };

    std::vector<double> x_sorted(n), y_by_x(n), y_sorted(n);
    for (std::size_t i = 0; i < n; ++i) {
        x_sorted[i] = xs[order[i]];
        y_by_x[i] = ys[order[i]];
    }
    y_sorted = ys;
    std::sort(y_sorted.begin(), y_sorted.end());

    double n1, vt, v1x, v2x;
    tie_stats(x_sorted, n1, vt, v1x, v2x);
    double n2, vu, v1y, v2y;
    tie_stats(y_sorted, n2, vu, v1y, v2y);

    double n3 = 0.0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && x_sorted[j + 1] == x_sorted[i] && y_by_x[j + 1] == y_by_x[i]) ++j;
            double t = static_cast<double>(j - i + 1);
            n3 += t * (t - 1.0) / 2.0;
            i = j + 1;
        }
    }

    double n0 = nd * (nd - 1.0) / 2.0;
    if (n0 - n1 <= 0.0 || n0 - n2 <= 0.0) raise(Errc::ConstantSeries, "fully tied series");

    std::vector<double> scratch(n);
    double dis = count_inversions(y_by_x, scratch, 0, n);
    double c_minus_d = n0 - n1 - n2 + n3 - 2.0 * dis;

    // Single sqrt of the exact integer-valued product, so small-n results are
    // bit-identical to the definition (C - D) / sqrt((P - Tx)(P - Ty)).
    double tau = std::clamp(c_minus_d / std::sqrt((n0 - n1) * (n0 - n2)), -1.0, 1.0);

    // Tie-adjusted variance of C - D; reduces to n(n-1)(2n+5)/18 without
    // ties, where z matches 3*tau*sqrt(n(n-1))/sqrt(2(2n+5)).
    double var = (nd * (nd - 1.0) * (2.0 * nd + 5.0) - vt - vu) / 18.0 +
                 v1x * v1y / (2.0 * nd * (nd - 1.0)) +
                 v2x * v2y / (9.0 * nd * (nd - 1.0) * (nd - 2.0));
    double p = 1.0;
    if (var > 0.0) {
        double z = c_minus_d / std::sqrt(var);
        p = std::erfc(std::abs(z) / std::sqrt(2.0));
    }
    return {tau, p, n};
}

} // namespace sagaze
