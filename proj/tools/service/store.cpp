#include "store.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "restopath/restopath.h"

namespace restopath::service {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct CString {
    char* p = nullptr;
    ~CString() { rp_string_free(p); }
    std::string str() const { return p ? std::string(p) : std::string(); }
};

struct ScenarioHandle {
    rp_scenario* p = nullptr;
    ~ScenarioHandle() { rp_scenario_free(p); }
};

struct Options {
    rp_solve_options o{};
    Options() { rp_solve_options_init(&o); }
    ~Options() { rp_solve_options_release(&o); }
};

std::string code_of(rp_status s) {
    switch (s) {
    case RP_OK: return "ok";
    case RP_ERR_ARGUMENT: return "invalid_argument";
    case RP_ERR_PARSE: return "parse_error";
    case RP_ERR_VALIDATION: return "validation_error";
    case RP_ERR_UNSOLVABLE: return "unsolvable";
    case RP_ERR_SOLVER: return "solver_failure";
    case RP_ERR_INTERNAL: return "internal_error";
    }
    return "internal_error";
}

int http_of(rp_status s) {
    switch (s) {
    case RP_ERR_ARGUMENT:
    case RP_ERR_PARSE: return 400;
    case RP_ERR_VALIDATION:
    case RP_ERR_UNSOLVABLE: return 422;
    default: return 500;
    }
}

void check(rp_status s) {
    if (s != RP_OK) throw ServiceError(http_of(s), code_of(s), rp_last_error());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ServiceError(500, "io_error", "cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Write to a sibling temp file, then rename over the target.
void write_file(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ServiceError(500, "io_error", "cannot write " + tmp.string());
        out << text;
    }
    fs::rename(tmp, path);
}

void append_line(const fs::path& path, const std::string& line) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw ServiceError(500, "io_error", "cannot append to " + path.string());
    out << line << '\n';
}

int highest_number(const fs::path& dir, const std::regex& pattern) {
    int best = 0;
    if (!fs::exists(dir)) return 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern)) best = std::max(best, std::stoi(m[1].str()));
    }
    return best;
}

const std::regex kScenarioId(R"(s([0-9]{1,9}))");
const std::regex kRunId(R"(r([0-9]{1,9}))");
const std::regex kRunStatusFile(R"(r([0-9]{1,9})\.status\.json)");

json parse_body(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ServiceError(400, "parse_error", std::string(what) + " is not valid JSON: " + e.what());
    }
}

} // namespace

SessionStore::SessionStore(fs::path data_dir) : root_(std::move(data_dir)) {
    fs::create_directories(root_ / "scenarios");
    fs::create_directories(root_ / "runs");
    next_scenario_ = highest_number(root_ / "scenarios", kScenarioId) + 1;
    next_run_ = highest_number(root_ / "runs", kRunStatusFile) + 1;
}

SessionStore::~SessionStore() {
    {
        std::lock_guard lk(mu_);
        for (auto& [id, run] : runs_) run->cancel = true;
    }
    for (auto& t : workers_)
        if (t.joinable()) t.join();
}

fs::path SessionStore::scenario_dir(const std::string& id) const { return root_ / "scenarios" / id; }

SessionStore::ScenarioLocks& SessionStore::locks(const std::string& id) {
    std::lock_guard lk(mu_);
    auto& slot = scenario_locks_[id];
    if (!slot) slot = std::make_unique<ScenarioLocks>();
    return *slot;
}

void SessionStore::require_scenario(const std::string& id) const {
    if (!std::regex_match(id, kScenarioId) || !fs::exists(scenario_dir(id) / "current.json"))
        throw ServiceError(404, "not_found", "unknown scenario '" + id + "'");
}

std::string SessionStore::create_scenario(const std::string& document) {
    ScenarioHandle h;
    check(rp_scenario_from_json(document.c_str(), &h.p));
    CString canonical;
    check(rp_scenario_to_json(h.p, &canonical.p));
    std::string id;
    {
        std::lock_guard lk(mu_);
        id = "s" + std::to_string(next_scenario_++);
    }
    const fs::path dir = scenario_dir(id);
    fs::create_directories(dir);
    write_file(dir / "initial.json", canonical.str());
    write_file(dir / "events.jsonl", "");
    write_file(dir / "current.json", canonical.str());
    return id;
}

std::string SessionStore::scenario_document(const std::string& id) {
    require_scenario(id);
    std::lock_guard lk(locks(id).write);
    return read_file(scenario_dir(id) / "current.json");
}

std::string SessionStore::apply_event(const std::string& id, const std::string& event_json) {
    require_scenario(id);
    json event = parse_body(event_json, "event");
    if (!event.is_object()) throw ServiceError(400, "parse_error", "event must be a JSON object");

    std::lock_guard lk(locks(id).write);
    const std::string current = read_file(scenario_dir(id) / "current.json");

    if (event.value("kind", std::string()) == "scheme_committed" && event.contains("run_id")) {
        if (!event["run_id"].is_string() || !event.contains("scheme") || !event["scheme"].is_number_integer())
            throw ServiceError(400, "parse_error", "scheme reference needs a run_id string and a scheme number");
        const auto run = find_run(event["run_id"].get<std::string>());
        std::string status;
        {
            std::lock_guard g(mu_);
            status = run->status;
        }
        if (run->scenario_id != id)
            throw ServiceError(422, "validation_error", "run " + run->id + " belongs to scenario " + run->scenario_id);
        if (status != "done" && status != "cancelled")
            throw ServiceError(409, "run_pending", "run " + run->id + " has no report yet");
        const json report = json::parse(read_file(root_ / "runs" / (run->id + ".json")));
        const auto& schemes = report.at("trace").at("schemes");
        const int n = event["scheme"].get<int>();
        if (n < 1 || n > static_cast<int>(schemes.size()))
            throw ServiceError(422, "validation_error", "run " + run->id + " has no scheme " + std::to_string(n));
        const json doc = json::parse(current);
        std::set<int> energized;
        for (const auto& b : doc.at("state").at("energized_buses")) energized.insert(b.get<int>());
        std::vector<int> targets;
        for (const auto& t : report.at("targets"))
            if (!energized.contains(t.get<int>())) targets.push_back(t.get<int>());
        json resolved{{"kind", "scheme_committed"}, {"lines", schemes[n - 1].at("lines")}, {"targets", targets}};
        if (event.contains("timestamp")) resolved["timestamp"] = event["timestamp"];
        event = std::move(resolved);
    }

    ScenarioHandle before;
    check(rp_scenario_from_json(current.c_str(), &before.p));
    ScenarioHandle after;
    const std::string line = event.dump();
    check(rp_scenario_apply_event(before.p, line.c_str(), &after.p));
    CString doc;
    check(rp_scenario_to_json(after.p, &doc.p));
    append_line(scenario_dir(id) / "events.jsonl", line);
    write_file(scenario_dir(id) / "current.json", doc.str());
    return doc.str();
}

std::string SessionStore::event_log(const std::string& id) {
    require_scenario(id);
    std::lock_guard lk(locks(id).write);
    std::istringstream in(read_file(scenario_dir(id) / "events.jsonl"));
    ordered_json out = ordered_json::array();
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(ordered_json::parse(line));
    return out.dump(2) + "\n";
}

std::string SessionStore::replay(const std::string& id) {
    require_scenario(id);
    std::lock_guard lk(locks(id).write);
    const std::string initial = read_file(scenario_dir(id) / "initial.json");
    ScenarioHandle cur;
    check(rp_scenario_from_json(initial.c_str(), &cur.p));
    std::istringstream in(read_file(scenario_dir(id) / "events.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ScenarioHandle next;
        check(rp_scenario_apply_event(cur.p, line.c_str(), &next.p));
        std::swap(cur.p, next.p);
    }
    CString doc;
    check(rp_scenario_to_json(cur.p, &doc.p));
    return doc.str();
}

std::string SessionStore::start_solve(const std::string& id, const std::string& request_json) {
    require_scenario(id);
    const std::string body = request_json.empty() ? "{}" : request_json;
    {
        Options probe;
        check(rp_solve_options_from_json(body.c_str(), &probe.o));
        std::string current;
        {
            std::lock_guard lk(locks(id).write);
            current = read_file(scenario_dir(id) / "current.json");
        }
        ScenarioHandle h;
        check(rp_scenario_from_json(current.c_str(), &h.p));
        check(rp_check_options(h.p, &probe.o));
    }
    auto run = std::make_shared<Run>();
    run->scenario_id = id;
    {
        std::lock_guard lk(mu_);
        run->id = "r" + std::to_string(next_run_++);
        runs_[run->id] = run;
        persist_status(*run);
        workers_.emplace_back([this, run, body] { execute(run, body); });
    }
    return run->id;
}

void SessionStore::execute(std::shared_ptr<Run> run, std::string request_json) {
    std::lock_guard solve_lock(locks(run->scenario_id).solve);
    auto set_status = [&](const std::string& s) {
        std::lock_guard lk(mu_);
        run->status = s;
        try {
            persist_status(*run);
        } catch (const std::exception&) {
            // Data directory gone; the in-memory status still moves on.
        }
        run_changed_.notify_all();
    };
    set_status("running");

    struct Ctx {
        SessionStore* self;
        Run* run;
    } ctx{this, run.get()};
    auto on_progress = [](const rp_progress* p, void* user) -> int {
        auto* c = static_cast<Ctx*>(user);
        std::lock_guard lk(c->self->mu_);
        c->run->iteration = p->iteration;
        c->run->schemes_found = p->schemes_found;
        c->run->valid_found = p->valid_found;
        c->run->max_schemes = p->max_schemes;
        c->run->last_objective = p->last_objective_mvar;
        c->self->run_changed_.notify_all();
        return c->run->cancel ? 1 : 0;
    };

    try {
        std::string current;
        {
            std::lock_guard lk(locks(run->scenario_id).write);
            current = read_file(scenario_dir(run->scenario_id) / "current.json");
        }
        ScenarioHandle h;
        check(rp_scenario_from_json(current.c_str(), &h.p));
        Options opts;
        check(rp_solve_options_from_json(request_json.c_str(), &opts.o));
        opts.o.progress = on_progress;
        opts.o.progress_user = &ctx;
        CString report;
        check(rp_solve(h.p, &opts.o, &report.p, nullptr));
        write_file(root_ / "runs" / (run->id + ".json"), report.str());
        bool cancelled;
        {
            std::lock_guard lk(mu_);
            cancelled = run->cancel;
        }
        set_status(cancelled ? "cancelled" : "done");
    } catch (const ServiceError& e) {
        {
            std::lock_guard lk(mu_);
            run->error_code = e.code();
            run->error = e.what();
        }
        set_status("failed");
    } catch (const std::exception& e) {
        {
            std::lock_guard lk(mu_);
            run->error_code = "internal_error";
            run->error = e.what();
        }
        set_status("failed");
    }
}

std::shared_ptr<SessionStore::Run> SessionStore::find_run(const std::string& run_id) {
    if (!std::regex_match(run_id, kRunId)) throw ServiceError(404, "not_found", "unknown run '" + run_id + "'");
    std::lock_guard lk(mu_);
    if (auto it = runs_.find(run_id); it != runs_.end()) return it->second;
    // A run from an earlier process: restore it from its status file.
    const fs::path status_path = root_ / "runs" / (run_id + ".status.json");
    if (!fs::exists(status_path)) throw ServiceError(404, "not_found", "unknown run '" + run_id + "'");
    const json j = json::parse(read_file(status_path));
    auto run = std::make_shared<Run>();
    run->id = run_id;
    run->scenario_id = j.at("scenario_id").get<std::string>();
    run->status = j.at("status").get<std::string>();
    const auto& p = j.at("progress");
    run->iteration = p.at("iteration").get<int>();
    run->schemes_found = p.at("schemes_found").get<int>();
    run->valid_found = p.at("valid_found").get<int>();
    run->max_schemes = p.at("max_schemes").get<int>();
    run->last_objective = p.at("last_objective_mvar").get<double>();
    if (j.contains("error") && j["error"].is_object()) {
        run->error_code = j["error"].at("code").get<std::string>();
        run->error = j["error"].at("message").get<std::string>();
    }
    if (run->status == "queued" || run->status == "running") {
        run->status = "failed";
        run->error_code = "interrupted";
        run->error = "the service stopped before the run finished";
    }
    runs_[run_id] = run;
    return run;
}

std::string SessionStore::status_json(const Run& run) const {
    ordered_json j;
    j["run_id"] = run.id;
    j["scenario_id"] = run.scenario_id;
    j["status"] = run.status;
    j["progress"] = {{"iteration", run.iteration},
                     {"schemes_found", run.schemes_found},
                     {"valid_found", run.valid_found},
                     {"max_schemes", run.max_schemes},
                     {"last_objective_mvar", run.last_objective}};
    if (run.error.empty())
        j["error"] = nullptr;
    else
        j["error"] = {{"code", run.error_code}, {"message", run.error}};
    return j.dump(2) + "\n";
}

// Caller holds mu_.
void SessionStore::persist_status(const Run& run) {
    write_file(root_ / "runs" / (run.id + ".status.json"), status_json(run));
}

std::string SessionStore::run_status(const std::string& run_id) {
    const auto run = find_run(run_id);
    std::lock_guard lk(mu_);
    return status_json(*run);
}

std::string SessionStore::run_report(const std::string& run_id) {
    const auto run = find_run(run_id);
    std::string status, code, message;
    {
        std::lock_guard lk(mu_);
        status = run->status;
        code = run->error_code;
        message = run->error;
    }
    if (status == "queued" || status == "running")
        throw ServiceError(409, "run_pending", "run " + run_id + " is still " + status);
    if (status == "failed") throw ServiceError(422, code.empty() ? "failed" : code, message);
    return read_file(root_ / "runs" / (run_id + ".json"));
}

void SessionStore::cancel_run(const std::string& run_id) {
    const auto run = find_run(run_id);
    std::lock_guard lk(mu_);
    run->cancel = true;
}

void SessionStore::wait_run(const std::string& run_id) {
    const auto run = find_run(run_id);
    std::unique_lock lk(mu_);
    run_changed_.wait(lk, [&] { return run->status != "queued" && run->status != "running"; });
}

} // namespace restopath::service
