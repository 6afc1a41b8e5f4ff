#include "evaluation/evaluation.hpp"

namespace restopath::eval {

using nlohmann::ordered_json;

namespace {

ordered_json row_json(const Row& r) { return ordered_json(std::vector<double>(r.begin(), r.end())); }

} // namespace

ordered_json ranking_to_json(const RankingResult& rk) {
    ordered_json j;
    j["status"] = rk.status;
    j["lambda"] = rk.lambda;
    j["weights"] = std::vector<double>(rk.weights.begin(), rk.weights.end());
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < rk.u.size(); ++i) {
        ordered_json r;
        r["scheme"] = rk.scheme_numbers[i];
        if (i < rk.indices.size()) {
            const auto& v = rk.indices[i];
            r["indices"] = {{"v1", v.v1}, {"v2", v.v2}, {"v3", v.v3}, {"v4", v.v4}, {"v5", v.v5}};
        } else {
            const auto& a = rk.matrix[i];
            r["indices"] = {{"v1", a[0]}, {"v2", a[1]}, {"v3", a[2]}, {"v4", a[3]}, {"v5", a[4]}};
        }
        r["g"] = row_json(rk.normalized[i]);
        r["r_plus"] = row_json(rk.r_plus[i]);
        r["r_minus"] = row_json(rk.r_minus[i]);
        r["y_plus"] = rk.y_plus[i];
        r["y_minus"] = rk.y_minus[i];
        r["u"] = rk.u[i];
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["order"] = rk.order;
    return j;
}

} // namespace restopath::eval
