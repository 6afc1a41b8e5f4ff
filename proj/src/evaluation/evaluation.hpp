#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "grid/network.hpp"
#include "search/scheme.hpp"

namespace restopath::eval {

inline constexpr int kAttributes = 5;

enum class AttributeKind { benefit, cost };

/// V1, V2, V4, V5 are costs; V3 (importance) is the only benefit.
inline constexpr std::array<AttributeKind, kAttributes> kAttributeKinds{
    AttributeKind::cost, AttributeKind::cost, AttributeKind::benefit, AttributeKind::cost,
    AttributeKind::cost};

struct IndexVector {
    int v1 = 0;      // transformers switched in
    int v2 = 0;      // breaker operations
    double v3 = 0.0; // mean importance of the middle nodes
    double v4 = 0.0; // charging MVar
    int v5 = 0;      // radial depth
};

using Row = std::array<double, kAttributes>;
using Matrix = std::vector<Row>;
using Weights = std::array<double, kAttributes>;

IndexVector compute_indices(const search::Scheme& scheme, const grid::Scenario& scenario);
Row to_row(const IndexVector& v);

/// Min-max normalization per column; a constant column maps to all zeros.
Matrix normalize(const Matrix& a);

struct GreyCoefficients {
    Matrix plus;  // against the all-ones ideal
    Matrix minus; // against the all-zeros ideal
};

/// Grey relational coefficients with the min/max distances taken over all
/// scheme rows and attributes. When every distance to an ideal is zero the
/// coefficients against it are set to 0.
GreyCoefficients grey_coefficients(const Matrix& g, double lambda = 0.5);

/// lambda / (1 - g + lambda) and lambda / (g + lambda). Equal to the
/// definitional form whenever some entry is 0 and some entry is 1.
GreyCoefficients grey_coefficients_closed_form(const Matrix& g, double lambda = 0.5);

/// Y_i = sum_j r_ij w_j^2 / sqrt(sum_j w_j^2). Throws ValidationError on a
/// zero weight vector.
std::vector<double> projections(const Matrix& r, const Weights& weights);

/// Y+^2 / (Y+^2 + Y-^2). Throws ValidationError when both are zero.
double synthetic_projection(double y_plus, double y_minus);

struct RankingResult {
    std::vector<int> scheme_numbers; // 1-based discovery number per row
    std::vector<IndexVector> indices;
    Matrix matrix;                   // A
    Matrix normalized;               // G
    Matrix r_plus;
    Matrix r_minus;
    std::vector<double> y_plus;
    std::vector<double> y_minus;
    std::vector<double> u;
    std::vector<int> order;          // scheme numbers, best first
    std::string status;              // "ok" or why the ranking is empty
    Weights weights{};
    double lambda = 0.5;
};

/// Ranks the rows of a decision matrix. Ties on u go to the lower V4, then
/// to the lower scheme number. `scheme_numbers` defaults to 1..n.
RankingResult rank_matrix(const Matrix& a, const Weights& weights, double lambda,
                          std::vector<int> scheme_numbers = {});

/// Valid schemes only, numbered by their position in `schemes`.
RankingResult rank(std::span<const search::Scheme> schemes, const grid::Scenario& scenario);

nlohmann::ordered_json ranking_to_json(const RankingResult& ranking);

} // namespace restopath::eval
