#include "restopath/restopath.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include <json.hpp>

#include "common/error.hpp"
#include "grid/network.hpp"
#include "search/trace_io.hpp"
#include "session/events.hpp"
#include "session/report.hpp"

#ifndef RESTOPATH_VERSION
#define RESTOPATH_VERSION "0.0.0"
#endif

struct rp_scenario {
    restopath::grid::Scenario value;
};

namespace {

thread_local std::string last_error;

rp_status fail(rp_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
rp_status guarded(F&& body) {
    last_error.clear();
    try {
        body();
        return RP_OK;
    } catch (const restopath::ParseError& e) {
        return fail(RP_ERR_PARSE, e.what());
    } catch (const restopath::ValidationError& e) {
        return fail(RP_ERR_VALIDATION, e.what());
    } catch (const restopath::UnsolvableError& e) {
        return fail(RP_ERR_UNSOLVABLE, e.what());
    } catch (const restopath::Error& e) {
        return fail(RP_ERR_SOLVER, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(RP_ERR_PARSE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RP_ERR_INTERNAL, e.what());
    }
}

char* copy_out(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

restopath::session::SolveRequest to_request(const rp_solve_options* o) {
    restopath::session::SolveRequest r;
    if (!o) return r;
    using restopath::ValidationError;
    if (o->max_schemes < 0) throw ValidationError("max_schemes must not be negative");
    if (o->d_max < 0) throw ValidationError("d_max must not be negative");
    if (o->max_schemes > 0) r.max_schemes = o->max_schemes;
    if (o->d_max > 0) r.d_max = o->d_max;
    if (o->k1 != 0.0) r.k1 = o->k1;
    if (o->lambda != 0.0) r.lambda = o->lambda;
    if (o->has_weights) {
        restopath::eval::Weights w{};
        for (int i = 0; i < 5; ++i) w[i] = o->weights[i];
        r.weights = w;
    }
    if (o->has_targets) {
        if (o->n_targets > 0 && !o->targets) throw ValidationError("targets pointer is null");
        r.targets = std::set<int>(o->targets, o->targets + o->n_targets);
    }
    r.check_depth = o->check_depth != 0;
    r.check_reactive = o->check_reactive != 0;
    r.check_voltage = o->check_voltage != 0;
    r.node_limit = o->node_limit;
    return r;
}

restopath::session::ProgressFn to_progress(const rp_solve_options* o) {
    if (!o || !o->progress) return {};
    const rp_progress_fn fn = o->progress;
    void* user = o->progress_user;
    return [fn, user](const restopath::search::SearchProgress& p) {
        const rp_progress c{p.iteration, p.schemes_found, p.valid_found, p.max_schemes, p.last_objective};
        return fn(&c, user) == 0;
    };
}

} // namespace

extern "C" {

const char* rp_version(void) { return RESTOPATH_VERSION; }

const char* rp_status_string(rp_status status) {
    switch (status) {
    case RP_OK: return "ok";
    case RP_ERR_ARGUMENT: return "invalid argument";
    case RP_ERR_PARSE: return "parse error";
    case RP_ERR_VALIDATION: return "validation error";
    case RP_ERR_UNSOLVABLE: return "unsolvable";
    case RP_ERR_SOLVER: return "solver failure";
    case RP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* rp_last_error(void) { return last_error.c_str(); }

void rp_string_free(char* text) { std::free(text); }

void rp_solve_options_init(rp_solve_options* o) {
    if (!o) return;
    std::memset(o, 0, sizeof *o);
    o->check_depth = 1;
    o->check_reactive = 1;
    o->check_voltage = 1;
    o->node_limit = 2000000;
}

rp_status rp_solve_options_from_json(const char* request_json, rp_solve_options* o) {
    if (!request_json || !o) return fail(RP_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(request_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw restopath::ParseError(std::string("solve request is not valid JSON: ") + e.what());
        }
        const auto r = restopath::session::request_from_json(j);
        rp_solve_options_init(o);
        o->max_schemes = r.max_schemes.value_or(0);
        o->d_max = r.d_max.value_or(0);
        o->k1 = r.k1.value_or(0.0);
        o->lambda = r.lambda.value_or(0.0);
        if (r.weights) {
            o->has_weights = 1;
            for (int i = 0; i < 5; ++i) o->weights[i] = (*r.weights)[i];
        }
        if (r.targets) {
            o->has_targets = 1;
            o->n_targets = r.targets->size();
            int* t = static_cast<int*>(std::malloc(sizeof(int) * (r.targets->size() + 1)));
            if (!t) throw std::bad_alloc();
            std::size_t i = 0;
            for (int id : *r.targets) t[i++] = id;
            o->targets = t;
        }
        o->check_depth = r.check_depth;
        o->check_reactive = r.check_reactive;
        o->check_voltage = r.check_voltage;
        o->node_limit = r.node_limit;
    });
}

void rp_solve_options_release(rp_solve_options* o) {
    if (!o) return;
    std::free(const_cast<int*>(o->targets));
    o->targets = nullptr;
    o->n_targets = 0;
    o->has_targets = 0;
}

rp_status rp_scenario_from_json(const char* document, rp_scenario** out) {
    if (!document || !out) return fail(RP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new rp_scenario{restopath::grid::load_scenario(document)}; });
}

rp_status rp_scenario_to_json(const rp_scenario* scenario, char** out) {
    if (!scenario || !out) return fail(RP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = copy_out(restopath::grid::save_scenario(scenario->value)); });
}

void rp_scenario_free(rp_scenario* scenario) { delete scenario; }

rp_status rp_scenario_apply_event(const rp_scenario* scenario, const char* event_json, rp_scenario** out) {
    if (!scenario || !event_json || !out) return fail(RP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(event_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw restopath::ParseError(std::string("event is not valid JSON: ") + e.what());
        }
        const auto event = restopath::session::event_from_json(j);
        *out = new rp_scenario{restopath::session::apply_event(scenario->value, event)};
    });
}

rp_status rp_scenario_islands(const rp_scenario* scenario, char** out) {
    if (!scenario || !out) return fail(RP_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = copy_out(nlohmann::json(restopath::grid::compute_islands(scenario->value)).dump());
    });
}

rp_status rp_check_options(const rp_scenario* scenario, const rp_solve_options* options) {
    if (!scenario) return fail(RP_ERR_ARGUMENT, "null argument");
    return guarded([&] { restopath::session::apply_request(scenario->value, to_request(options)); });
}

rp_status rp_solve(const rp_scenario* scenario, const rp_solve_options* options, char** out_report,
                   int* valid_count) {
    if (!scenario || !out_report) return fail(RP_ERR_ARGUMENT, "null argument");
    *out_report = nullptr;
    return guarded([&] {
        const auto outcome =
            restopath::session::solve(scenario->value, to_request(options), to_progress(options));
        *out_report = copy_out(restopath::session::dump_report(outcome.report));
        if (valid_count) *valid_count = outcome.trace.valid_count();
    });
}

rp_status rp_evaluate(const rp_scenario* scenario, const char* trace_json, const rp_solve_options* options,
                      char** out_report, int* valid_count) {
    if (!scenario || !trace_json || !out_report) return fail(RP_ERR_ARGUMENT, "null argument");
    *out_report = nullptr;
    return guarded([&] {
        const auto trace = restopath::search::parse_trace(trace_json);
        const auto outcome = restopath::session::evaluate(scenario->value, trace, to_request(options));
        *out_report = copy_out(restopath::session::dump_report(outcome.report));
        if (valid_count) *valid_count = outcome.trace.valid_count();
    });
}

rp_status rp_report_table(const char* report_json, char** out_text) {
    if (!report_json || !out_text) return fail(RP_ERR_ARGUMENT, "null argument");
    *out_text = nullptr;
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(report_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw restopath::ParseError(std::string("report is not valid JSON: ") + e.what());
        }
        *out_text = copy_out(restopath::session::report_table(j));
    });
}

rp_status rp_export_lp(const rp_scenario* scenario, const rp_solve_options* options, char** out_text) {
    if (!scenario || !out_text) return fail(RP_ERR_ARGUMENT, "null argument");
    *out_text = nullptr;
    return guarded([&] {
        *out_text = copy_out(restopath::session::export_lp(scenario->value, to_request(options)));
    });
}

} // extern "C"
