#include "evaluation/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "common/error.hpp"

namespace restopath::eval {

IndexVector compute_indices(const search::Scheme& scheme, const grid::Scenario& input) {
    const grid::Scenario s = grid::transform_islands(input);
    const auto zone = grid::restored_zone(s);
    IndexVector v;
    std::set<int> touched;
    for (int id : scheme.lines) {
        const auto& br = s.network.branch(id);
        v.v1 += br.is_transformer ? 1 : 0;
        v.v2 += br.breaker_count;
        touched.insert(br.from_bus);
        touched.insert(br.to_bus);
    }
    double sum = 0.0;
    int middle = 0;
    for (int bus : touched) {
        if (zone.contains(bus) || s.targets.contains(bus)) continue;
        const auto& b = s.network.bus(bus);
        sum += b.importance + s.params.alpha * b.important_load;
        ++middle;
    }
    v.v3 = middle > 0 ? sum / middle : 0.0;
    v.v4 = scheme.objective_mvar;
    v.v5 = scheme.max_depth;
    return v;
}

Row to_row(const IndexVector& v) {
    return {static_cast<double>(v.v1), static_cast<double>(v.v2), v.v3, v.v4,
            static_cast<double>(v.v5)};
}

Matrix normalize(const Matrix& a) {
    Matrix g(a.size());
    for (int j = 0; j < kAttributes; ++j) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& row : a) {
            if (!std::isfinite(row[j])) throw ValidationError("decision matrix has a non-finite entry");
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (hi == lo) {
                g[i][j] = 0.0;
            } else if (kAttributeKinds[j] == AttributeKind::benefit) {
                g[i][j] = (a[i][j] - lo) / (hi - lo);
            } else {
                g[i][j] = (hi - a[i][j]) / (hi - lo);
            }
        }
    }
    return g;
}

namespace {

Matrix relational(const Matrix& g, double ideal, double lambda) {
    double dmin = INFINITY, dmax = -INFINITY;
    for (const auto& row : g)
        for (double x : row) {
            const double d = std::abs(ideal - x);
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
    Matrix r(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int j = 0; j < kAttributes; ++j) {
            const double d = std::abs(ideal - g[i][j]);
            r[i][j] = dmax > 0.0 ? (dmin + lambda * dmax) / (d + lambda * dmax) : 0.0;
        }
    return r;
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in (0, 1]");
}

} // namespace

GreyCoefficients grey_coefficients(const Matrix& g, double lambda) {
    check_lambda(lambda);
    return {relational(g, 1.0, lambda), relational(g, 0.0, lambda)};
}

GreyCoefficients grey_coefficients_closed_form(const Matrix& g, double lambda) {
    check_lambda(lambda);
    GreyCoefficients out{Matrix(g.size()), Matrix(g.size())};
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int j = 0; j < kAttributes; ++j) {
            out.plus[i][j] = lambda / (1.0 - g[i][j] + lambda);
            out.minus[i][j] = lambda / (g[i][j] + lambda);
        }
    return out;
}

std::vector<double> projections(const Matrix& r, const Weights& w) {
    double sq = 0.0;
    for (double x : w) sq += x * x;
    if (sq == 0.0) throw ValidationError("weight vector is zero");
    const double norm = std::sqrt(sq);
    std::vector<double> y(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < kAttributes; ++j) acc += r[i][j] * w[j] * w[j];
        y[i] = acc / norm;
    }
    return y;
}

double synthetic_projection(double y_plus, double y_minus) {
    const double p = y_plus * y_plus;
    const double m = y_minus * y_minus;
    if (p + m == 0.0) throw ValidationError("both projections are zero; u is undefined");
    return p / (p + m);
}

RankingResult rank_matrix(const Matrix& a, const Weights& weights, double lambda,
                          std::vector<int> scheme_numbers) {
    RankingResult out;
    out.weights = weights;
    out.lambda = lambda;
    if (scheme_numbers.empty()) {
        scheme_numbers.resize(a.size());
        std::iota(scheme_numbers.begin(), scheme_numbers.end(), 1);
    }
    if (scheme_numbers.size() != a.size())
        throw ValidationError("scheme numbering does not match the matrix");
    out.scheme_numbers = std::move(scheme_numbers);
    out.matrix = a;
    if (a.empty()) {
        out.status = "no valid schemes to rank";
        return out;
    }
    out.normalized = normalize(a);
    auto r = grey_coefficients(out.normalized, lambda);
    out.r_plus = std::move(r.plus);
    out.r_minus = std::move(r.minus);
    out.y_plus = projections(out.r_plus, weights);
    out.y_minus = projections(out.r_minus, weights);
    for (std::size_t i = 0; i < a.size(); ++i)
        out.u.push_back(synthetic_projection(out.y_plus[i], out.y_minus[i]));

    std::vector<std::size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        if (out.u[x] != out.u[y]) return out.u[x] > out.u[y];
        if (a[x][3] != a[y][3]) return a[x][3] < a[y][3];
        return out.scheme_numbers[x] < out.scheme_numbers[y];
    });
    for (auto i : idx) out.order.push_back(out.scheme_numbers[i]);
    out.status = "ok";
    return out;
}

RankingResult rank(std::span<const search::Scheme> schemes, const grid::Scenario& scenario) {
    Matrix a;
    std::vector<int> numbers;
    std::vector<IndexVector> indices;
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        if (!schemes[i].valid) continue;
        indices.push_back(compute_indices(schemes[i], scenario));
        a.push_back(to_row(indices.back()));
        numbers.push_back(static_cast<int>(i) + 1);
    }
    if (a.empty()) {
        RankingResult out;
        out.weights = scenario.params.weights;
        out.lambda = scenario.params.lambda;
        out.status = schemes.empty() ? "no schemes were found" : "no valid schemes to rank";
        return out;
    }
    auto out = rank_matrix(a, scenario.params.weights, scenario.params.lambda, std::move(numbers));
    out.indices = std::move(indices);
    return out;
}

} // namespace restopath::eval
